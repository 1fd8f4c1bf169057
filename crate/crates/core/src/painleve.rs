//! The Hastings–McLeod solution of `u″ = 2u³ + xu`, the Tracy–Widom
//! distributions built from it, and the corner asymptotics of the OPUC data.
//!
//! The solution is a separatrix: integrating backward from the right,
//! relative errors grow like `exp((2√2/3)|x|^{3/2})` on the negative axis.
//! The default solve therefore runs in multiprecision from `x = 16`, seeded
//! with `u = −Ai`, whose error there (of order `Ai³ ≈ 1e−58`) is far below
//! any amplified tolerance.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::airy::{airy_asymptotic, airy_tail_integral};
use crate::cache::Cache;
use crate::error::{Error, Result};
use crate::ode::{integrate_to, Controls};
use crate::opuc::{build_opuc, y_corner, OpucData, PrecisionProfile};
use crate::real::{MpFloat, Real};
use crate::symbols::SymbolSpec;

/// Local tolerance of the default (multiprecision) solve.
pub const DEFAULT_TOL: f64 = 1e-24;

/// Output grid spacing; values between nodes use quintic Hermite interpolation.
pub const GRID_STEP: f64 = 1.0 / 32.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    /// Working precision; `≤ 53` selects `f64`.
    pub bits: usize,
    pub x_right: f64,
}

impl SolveOptions {
    /// Chooses arithmetic and matching point from the tolerance: `f64` with
    /// matching at 8 when `tol ≥ 1e−15`, otherwise multiprecision at 16.
    pub fn for_tolerance(tol: f64) -> Self {
        if tol >= 1e-15 {
            Self {
                tol,
                bits: 53,
                x_right: 8.0,
            }
        } else {
            let bits = (-tol.log2()).ceil() as usize + 96;
            Self {
                tol,
                bits: bits.div_ceil(64) * 64,
                x_right: 16.0,
            }
        }
    }
}

/// Hastings–McLeod solution sampled on a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiiSolution {
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// `v(x) = ∫_∞^x u² ≤ 0`.
    pub v: Vec<f64>,
    /// `I(x) = ∫_x^∞ u`.
    #[serde(rename = "I")]
    pub i: Vec<f64>,
    /// `R(x) = ∫_x^∞ (y − x) u(y)² dy = −log F_GUE(x)`.
    pub r: Vec<f64>,
    pub x_right: f64,
    pub tol: f64,
    pub precision_bits: usize,
}

fn rhs<T: Real>(x: &T, y: &[T]) -> Vec<T> {
    let u = y[0].clone();
    let two = u.cst(2.0);
    vec![
        y[1].clone(),
        two * u.clone() * u.clone() * u.clone() + x.clone() * u.clone(),
        u.clone() * u.clone(),
        y[2].clone(),
        -u,
    ]
}

/// `(u, u′, v, R, I)` at `x` from `u = −Ai`.
fn airy_state<T: Real>(x: &T) -> Vec<T> {
    let (ai, aip) = airy_asymptotic(x);
    let x2 = x.clone() * x.clone();
    let ai2 = ai.clone() * ai.clone();
    let aip2 = aip.clone() * aip.clone();
    let v = -(aip2.clone() - x.clone() * ai2.clone());
    let r = (x.cst(2.0) * x2 * ai2 - x.cst(2.0) * x.clone() * aip2 - ai.clone() * aip.clone()) / x.cst(3.0);
    let i = -airy_tail_integral(x, &ai, &aip);
    vec![-ai, -aip, v, r, i]
}

fn guard<T: Real>(x: &T, y: &[T]) -> Result<()> {
    let xf = x.to_f64();
    let u = y[0].to_f64();
    let bound = 1.5 * (xf.min(0.0).abs() / 2.0).sqrt() + 1.0;
    if !u.is_finite() || u >= 0.0 || u.abs() > bound {
        return Err(Error::BlowUp { x: xf, value: u });
    }
    Ok(())
}

fn solve_in<T: Real>(proto: &T, grid: &[f64], opts: &SolveOptions) -> Result<Vec<[f64; 5]>> {
    let x0 = proto.cst(opts.x_right);
    let y0 = airy_state(&x0);
    let targets: Vec<T> = grid.iter().rev().map(|&x| proto.cst(x)).collect();
    let ctl = Controls {
        tol: opts.tol,
        floor: 1e-300,
        initial_step: 1e-2,
        min_step: 1e-12,
    };
    let out = integrate_to(&rhs::<T>, &x0, y0, &targets, ctl, &guard::<T>)?;
    Ok(out
        .iter()
        .rev()
        .map(|y| {
            [
                y[0].to_f64(),
                y[1].to_f64(),
                y[2].to_f64(),
                y[3].to_f64(),
                y[4].to_f64(),
            ]
        })
        .collect())
}

/// Solves on `[x_min, x_max]` with the arithmetic chosen by
/// [`SolveOptions::for_tolerance`].
pub fn solve_hastings_mcleod(x_min: f64, x_max: f64, tol: f64) -> Result<PiiSolution> {
    solve_with(x_min, x_max, &SolveOptions::for_tolerance(tol))
}

pub fn solve_with(x_min: f64, x_max: f64, opts: &SolveOptions) -> Result<PiiSolution> {
    if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
        return Err(Error::InvalidArgument(format!(
            "need finite x_min < x_max (got {x_min}, {x_max})"
        )));
    }
    if x_max < 6.0 {
        return Err(Error::InvalidArgument(format!(
            "x_max = {x_max} must be at least 6 so the right tail is covered by the Airy asymptote"
        )));
    }
    if x_min < -16.0 {
        return Err(Error::InvalidArgument(format!(
            "x_min = {x_min} is below the supported range (x_min ≥ −16)"
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let opts = SolveOptions {
        x_right: opts.x_right.max(x_max),
        ..*opts
    };
    let n = ((x_max - x_min) / GRID_STEP).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|j| x_min + (x_max - x_min) * j as f64 / n as f64).collect();
    let rows = if opts.bits <= 53 {
        solve_in(&0.0f64, &grid, &opts)?
    } else {
        solve_in(&MpFloat::new(0.0, opts.bits), &grid, &opts)?
    };
    let col = |c: usize| rows.iter().map(|r| r[c]).collect::<Vec<_>>();
    Ok(PiiSolution {
        u: col(0),
        du: col(1),
        v: col(2),
        r: col(3),
        i: col(4),
        grid,
        x_right: opts.x_right,
        tol: opts.tol,
        precision_bits: opts.bits.max(53),
    })
}

/// Loads a cached solution for identical parameters or solves and stores it.
/// Returns the solution and whether it came from the cache.
pub fn solve_cached(cache: &Cache, x_min: f64, x_max: f64, tol: f64) -> Result<(PiiSolution, bool)> {
    let opts = SolveOptions::for_tolerance(tol);
    let key = ("hastings-mcleod", x_min, x_max, opts, GRID_STEP);
    if let Some(sol) = cache.load::<_, PiiSolution>("painleve", &key) {
        return Ok((sol, true));
    }
    let sol = solve_with(x_min, x_max, &opts)?;
    cache.store("painleve", &key, &sol)?;
    Ok((sol, false))
}

fn hermite5(t: f64, h: f64, f0: [f64; 3], f1: [f64; 3]) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h20 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h21 = 0.5 * (t3 - 2.0 * t4 + t5);
    h00 * f0[0] + h * h10 * f0[1] + h * h * h20 * f0[2] + h01 * f1[0] + h * h11 * f1[1] + h * h * h21 * f1[2]
}

#[derive(Clone, Copy)]
enum Field {
    U,
    V,
    I,
    R,
}

impl PiiSolution {
    pub fn x_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    fn jets(&self, j: usize, f: Field) -> [f64; 3] {
        let (x, u, du) = (self.grid[j], self.u[j], self.du[j]);
        match f {
            Field::U => [u, du, 2.0 * u * u * u + x * u],
            Field::V => [self.v[j], u * u, 2.0 * u * du],
            Field::I => [self.i[j], -u, -du],
            Field::R => [self.r[j], self.v[j], u * u],
        }
    }

    fn interp(&self, x: f64, f: Field) -> Result<f64> {
        if !(x >= self.x_min() && x <= self.x_max()) {
            return Err(Error::OutOfRange {
                what: "x",
                index: x.floor() as i64,
                allowed: format!("[{}, {}]", self.x_min(), self.x_max()),
            });
        }
        let n = self.grid.len() - 1;
        let h = (self.x_max() - self.x_min()) / n as f64;
        let j = (((x - self.x_min()) / h).floor() as usize).min(n - 1);
        let t = (x - self.grid[j]) / h;
        Ok(hermite5(t, h, self.jets(j, f), self.jets(j + 1, f)))
    }

    fn beyond_right(&self, x: f64) -> Option<[f64; 4]> {
        (x > self.x_max()).then(|| {
            let s = airy_state(&x);
            [s[0], s[2], s[4], s[3]]
        })
    }

    fn value(&self, x: f64, f: Field) -> Result<f64> {
        if let Some(s) = self.beyond_right(x) {
            return Ok(match f {
                Field::U => s[0],
                Field::V => s[1],
                Field::I => s[2],
                Field::R => s[3],
            });
        }
        self.interp(x, f)
    }

    pub fn u_at(&self, x: f64) -> Result<f64> {
        self.value(x, Field::U)
    }

    pub fn v_at(&self, x: f64) -> Result<f64> {
        self.value(x, Field::V)
    }

    pub fn i_at(&self, x: f64) -> Result<f64> {
        self.value(x, Field::I)
    }

    /// `log F_GUE(x) = −R(x)`.
    pub fn log_f_gue(&self, x: f64) -> Result<f64> {
        Ok(-self.value(x, Field::R)?.max(0.0))
    }

    /// `log(1 − F_GUE(x))`, accurate deep in the right tail.
    pub fn log_one_minus_f_gue(&self, x: f64) -> Result<f64> {
        let r = self.value(x, Field::R)?.max(0.0);
        Ok((-(-r).exp_m1()).ln())
    }
}

/// `F_GUE(x) = exp(−∫_x^∞ (y − x) u(y)² dy)`.
pub fn f_gue(sol: &PiiSolution, x: f64) -> Result<f64> {
    Ok(sol.log_f_gue(x)?.exp())
}

/// `F_GOE(x) = exp(½ ∫_x^∞ u) · F_GUE(x)^{1/2}`.
pub fn f_goe(sol: &PiiSolution, x: f64) -> Result<f64> {
    Ok((0.5 * sol.i_at(x)? + 0.5 * sol.log_f_gue(x)?).exp())
}

/// `F_GSE(x) = cosh(½ ∫_x^∞ u) · F_GUE(x)^{1/2}`.
pub fn f_gse(sol: &PiiSolution, x: f64) -> Result<f64> {
    Ok((0.5 * sol.i_at(x)?).cosh() * (0.5 * sol.log_f_gue(x)?).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailSide {
    Right,
    Left,
}

/// Fit of `a + b log|x| − c |x|^p` to `log(1 − F_GUE)` (right) or `log F_GUE` (left).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub exponent: f64,
    pub rate: f64,
    pub log_power: f64,
    pub offset: f64,
    pub rms: f64,
}

fn fit_fixed_p(xs: &[f64], ys: &[f64], p: f64) -> (f64, [f64; 3]) {
    let n = xs.len();
    let a = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => 1.0,
        1 => xs[i].abs().ln(),
        _ => -xs[i].abs().powf(p),
    });
    let b = DVector::from_column_slice(ys);
    let sol = a.clone().svd(true, true).solve(&b, 1e-14).expect("SVD solve");
    let res = &a * &sol - b;
    ((res.norm_squared() / n as f64).sqrt(), [sol[0], sol[1], sol[2]])
}

/// Least-squares tail fit over `[lo, hi]`, sampled with `step`; the
/// exponent is found by golden-section search on the residual.
pub fn tail_fit(sol: &PiiSolution, side: TailSide, lo: f64, hi: f64, step: f64) -> Result<TailFit> {
    let n = ((hi - lo) / step).round() as usize;
    if n < 4 {
        return Err(Error::InvalidArgument(
            "tail fit needs at least five sample points".into(),
        ));
    }
    let xs: Vec<f64> = (0..=n).map(|j| lo + (hi - lo) * j as f64 / n as f64).collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|&x| match side {
            TailSide::Right => sol.log_one_minus_f_gue(x),
            TailSide::Left => sol.log_f_gue(x),
        })
        .collect::<Result<_>>()?;
    let cost = |p: f64| fit_fixed_p(&xs, &ys, p).0;
    // Coarse scan, then golden section around the best point.
    let mut best = 0.5;
    for k in 0..=90 {
        let p = 0.5 + 0.05 * k as f64;
        if cost(p) < cost(best) {
            best = p;
        }
    }
    let (mut a, mut b) = (best - 0.05, best + 0.05);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if cost(c) < cost(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let p = 0.5 * (a + b);
    let (rms, [off, lp, rate]) = fit_fixed_p(&xs, &ys, p);
    Ok(TailFit {
        exponent: p,
        rate,
        log_power: lp,
        offset: off,
        rms,
    })
}

/// Deviations of `Y(0;k)` from the Painlevé II predictions at the `x`
/// corresponding to `(t, k)` under `2t/k = 1 − x/(2^{1/3} k^{2/3})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerReport {
    pub k: usize,
    pub t: f64,
    pub x: f64,
    /// `|−Y₂₁(0;k) − 1 − 2^{1/3} k^{−1/3} v(x)|`.
    pub dev_y21: f64,
    /// `|Y₁₁(0;k) + (−1)^k 2^{1/3} k^{−1/3} u(x)|`.
    pub dev_y11: f64,
}

/// Largest `|x|` for which the central corner asymptotics are checked.
pub const CORNER_REGIME: f64 = 3.0;

pub fn scaling_x(t: f64, k: usize) -> f64 {
    let kf = k as f64;
    2f64.cbrt() * kf.powf(2.0 / 3.0) * (1.0 - 2.0 * t / kf)
}

pub fn scaling_t(x: f64, k: usize) -> f64 {
    let kf = k as f64;
    0.5 * kf * (1.0 - x / (2f64.cbrt() * kf.powf(2.0 / 3.0)))
}

pub fn corner_asymptotics_check(data: &OpucData, t: f64, k: usize, sol: &PiiSolution) -> Result<CornerReport> {
    let x = scaling_x(t, k);
    if x.abs() > CORNER_REGIME {
        return Err(Error::Regime {
            x,
            lo: -CORNER_REGIME,
            hi: CORNER_REGIME,
            hint: "beyond it the corner follows the exponential edge bounds instead",
        });
    }
    let y = y_corner(data, k)?;
    let scale = 2f64.cbrt() / (k as f64).cbrt();
    let minus_y21_minus_one = (-data.log_norm(k - 1)).exp_m1();
    let y11 = -y.b;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    Ok(CornerReport {
        k,
        t,
        x,
        dev_y21: (minus_y21_minus_one - scale * sol.v_at(x)?).abs(),
        dev_y11: (y11 + sign * scale * sol.u_at(x)?).abs(),
    })
}

/// Corner deviations at fixed `x` over several `k`, with fitted power laws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerStudy {
    pub x: f64,
    pub rows: Vec<CornerReport>,
    /// Slope of `log dev` against `log k`; the prediction is `−2/3`.
    pub slope_y21: f64,
    pub slope_y11: f64,
    /// Fitted constants `C` in `dev ≈ C k^{slope}`.
    pub const_y21: f64,
    pub const_y11: f64,
}

fn loglog_fit(ks: &[f64], devs: &[f64]) -> (f64, f64) {
    let n = ks.len() as f64;
    let lx: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let ly: Vec<f64> = devs.iter().map(|d| d.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, (my - slope * mx).exp())
}

pub fn corner_study(x: f64, ks: &[usize], sol: &PiiSolution, profile: PrecisionProfile) -> Result<CornerStudy> {
    if ks.len() < 2 {
        return Err(Error::InvalidArgument(
            "corner study needs at least two values of k".into(),
        ));
    }
    let rows: Vec<CornerReport> = ks
        .iter()
        .map(|&k| {
            let t = scaling_t(x, k);
            let data = build_opuc(&SymbolSpec::poisson_square(t), k + 1, profile)?;
            corner_asymptotics_check(&data, t, k, sol)
        })
        .collect::<Result<_>>()?;
    let kf: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let (slope_y21, const_y21) = loglog_fit(&kf, &rows.iter().map(|r| r.dev_y21).collect::<Vec<_>>());
    let (slope_y11, const_y11) = loglog_fit(&kf, &rows.iter().map(|r| r.dev_y11).collect::<Vec<_>>());
    Ok(CornerStudy {
        x,
        rows,
        slope_y21,
        slope_y11,
        const_y21,
        const_y11,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn sol() -> &'static PiiSolution {
        static S: OnceLock<PiiSolution> = OnceLock::new();
        S.get_or_init(|| solve_hastings_mcleod(-10.0, 8.0, DEFAULT_TOL).unwrap())
    }

    #[test]
    fn u_at_zero() {
        let u0 = sol().u_at(0.0).unwrap();
        assert!((u0 + 0.367_061_551_548_1).abs() < 1e-9, "{u0}");
    }

    #[test]
    fn matches_airy_on_the_right() {
        let s = sol();
        let (ai, _) = airy_asymptotic(&8.0f64);
        assert!((s.u_at(8.0).unwrap() + ai).abs() < 1e-10 * ai);
        // Past the grid the Airy tail takes over continuously.
        let inside = f_gue(s, 8.0).unwrap();
        let outside = f_gue(s, 8.0 + 1e-9).unwrap();
        assert!((inside - outside).abs() < 1e-15);
    }

    #[test]
    fn sign_and_monotonicity_of_v() {
        let s = sol();
        assert!(s.u.iter().all(|&u| u < 0.0));
        assert!(s.v.iter().all(|&v| v <= 0.0));
        assert!(s.v.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn v_derivative_is_u_squared() {
        let s = sol();
        let h = 1e-4;
        for x in [-6.0, -2.3, 0.0, 1.7, 4.1] {
            let dv = (s.v_at(x + h).unwrap() - s.v_at(x - h).unwrap()) / (2.0 * h);
            let u = s.u_at(x).unwrap();
            assert!((dv - u * u).abs() < 1e-7 * (1.0 + u * u), "x={x}");
        }
    }

    #[test]
    fn left_asymptote() {
        let s = sol();
        for x in [-10.0, -9.0, -8.0] {
            let ratio = s.u_at(x).unwrap() / -(-x / 2.0f64).sqrt();
            assert!(ratio > 0.99 && ratio < 1.01, "x={x}: {ratio}");
        }
    }

    #[test]
    fn distribution_values() {
        let s = sol();
        assert!((f_gue(s, 0.0).unwrap() - 0.969_372_828_355).abs() < 1e-9);
        assert!(f_gue(s, -8.0).unwrap() < 1e-3);
        assert!(f_gue(s, 50.0).unwrap() == 1.0);
        let goe0 = f_goe(s, 0.0).unwrap();
        assert!((goe0 - 0.831_908_066_266).abs() < 1e-8, "{goe0}");
        let mut prev = (0.0, 0.0, 0.0);
        for j in 0..=40 {
            let x = -6.0 + 0.25 * j as f64;
            let (a, b, c) = (f_gse(s, x).unwrap(), f_gue(s, x).unwrap(), f_goe(s, x).unwrap());
            assert!(a >= b, "x={x}");
            // F_GOE has the heavier left tail and overtakes F_GUE near x ≈ −3.2.
            if x >= -3.0 {
                assert!(b >= c, "x={x}");
            }
            if x <= -3.5 {
                assert!(c > b, "x={x}");
            }
            assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&c));
            assert!(a >= prev.0 && b >= prev.1 && c >= prev.2);
            prev = (a, b, c);
        }
    }

    #[test]
    fn tail_exponents() {
        let s = sol();
        let right = tail_fit(s, TailSide::Right, 2.0, 8.0, 0.125).unwrap();
        assert!((right.exponent - 1.5).abs() < 0.15, "{right:?}");
        let left = tail_fit(s, TailSide::Left, -10.0, -4.0, 0.125).unwrap();
        assert!((left.exponent - 3.0).abs() < 0.15, "{left:?}");
    }

    #[test]
    fn double_precision_path_is_faithful_near_the_origin() {
        let d = solve_hastings_mcleod(-4.0, 8.0, 1e-13).unwrap();
        assert_eq!(d.precision_bits, 53);
        assert!((d.u_at(0.0).unwrap() - sol().u_at(0.0).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(solve_hastings_mcleod(-4.0, 5.0, 1e-12).is_err());
        assert!(solve_hastings_mcleod(-20.0, 8.0, 1e-12).is_err());
        assert!(f_gue(sol(), -11.0).is_err());
    }

    #[test]
    fn corner_regime_is_enforced() {
        let data = build_opuc(&SymbolSpec::poisson_square(5.0), 41, PrecisionProfile::Auto).unwrap();
        let e = corner_asymptotics_check(&data, 5.0, 40, sol()).unwrap_err();
        assert!(matches!(e, Error::Regime { .. }));
    }

    #[test]
    fn corner_deviations_shrink() {
        let st = corner_study(0.0, &[40, 60], sol(), PrecisionProfile::Auto).unwrap();
        let (a, b) = (&st.rows[0], &st.rows[1]);
        assert!(b.dev_y21 < a.dev_y21 && b.dev_y11 < a.dev_y11, "{st:?}");
        let bound = 5.0 * 60f64.powf(-2.0 / 3.0);
        assert!(b.dev_y21 < bound && b.dev_y11 < bound);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::at(dir.path());
        let (a, hit) = solve_cached(&c, -2.0, 6.0, 1e-13).unwrap();
        assert!(!hit);
        let (b, hit) = solve_cached(&c, -2.0, 6.0, 1e-13).unwrap();
        assert!(hit);
        assert_eq!(a, b);
    }
}

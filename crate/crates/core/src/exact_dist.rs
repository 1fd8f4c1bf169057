//! Exact distribution functions of the percolation models.
//!
//! Unitary-group models reduce to `P(L ≤ ℓ) = D_ℓ(φ)/Z`. The triangle and
//! external-source models use closed forms in the OPUC of `e^{t(z+1/z)}`.
//! Orthogonal-group expectations are also evaluated directly by Weyl
//! integration, which serves as an independent route for small `ℓ`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opuc::{build_opuc, eval_pi, toeplitz_log_det, OpucData, PrecisionProfile};
use crate::symbols::{build_symbol, normalization_log_z, orthogonal_weight, ModelKind, ModelSpec, SymbolSpec};

/// Accepted truncation error of the infinite products.
pub const TAIL_TOL: f64 = 1e-12;

/// Largest `ℓ` accepted by the Weyl-quadrature path.
pub const WEYL_MAX_ELL: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistEntry {
    pub ell: usize,
    pub p: f64,
    pub log_p: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TruncationInfo {
    /// OPUC cutoff `K` used, if any.
    pub cutoff: Option<usize>,
    /// Bound on the neglected tail of infinite products, if any.
    pub tail_bound: Option<f64>,
    pub precision_bits: Option<usize>,
    pub method: String,
}

/// `ℓ ↦ P(L ≤ ℓ)` for one model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistTable {
    pub model: ModelSpec,
    pub entries: Vec<DistEntry>,
    pub truncation_info: TruncationInfo,
}

impl DistTable {
    fn push(&mut self, ell: usize, p: f64) {
        self.entries.push(DistEntry { ell, p, log_p: p.ln() });
    }

    pub fn get(&self, ell: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.ell == ell).map(|e| e.p)
    }

    /// `ell,p,log_p` with a header row and LF line endings.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("ell,p,log_p\n");
        for e in &self.entries {
            s.push_str(&format!("{},{:.17e},{:.17e}\n", e.ell, e.p, e.log_p));
        }
        s
    }

    /// Values in `[0, 1]` and nondecreasing in `ℓ`, up to `slack`.
    pub fn check_invariants(&self, slack: f64) -> Result<()> {
        let mut prev = 0.0;
        for e in &self.entries {
            if !(e.p >= -slack && e.p <= 1.0 + slack) {
                return Err(Error::InvalidArgument(format!(
                    "P(L ≤ {}) = {} outside [0,1]",
                    e.ell, e.p
                )));
            }
            if e.p < prev - slack {
                return Err(Error::InvalidArgument(format!(
                    "distribution decreases at ℓ = {} ({} < {prev})",
                    e.ell, e.p
                )));
            }
            prev = e.p;
        }
        Ok(())
    }
}

/// A cutoff comfortably past the edge `k ≈ 2t` of the square symbol, where
/// the reflection coefficients decay super-exponentially.
pub fn square_edge_cutoff(t: f64) -> usize {
    (2.0 * t + 10.0 * t.cbrt() + 30.0).ceil() as usize
}

fn require_square(opuc: &OpucData, t: f64) -> Result<()> {
    let s = &opuc.source.symbol;
    if s.exp_plus_t != t
        || s.exp_minus_t != t
        || !s.zeros_plus.is_empty()
        || !s.zeros_minus.is_empty()
        || !s.poles_plus.is_empty()
        || !s.poles_minus.is_empty()
    {
        return Err(Error::InvalidArgument(format!(
            "OPUC data must come from the symbol e^{{t(z+1/z)}} with t = {t}"
        )));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Constraint(format!("t must be finite and nonnegative (got {t})")));
    }
    Ok(())
}

/// `P(L(t) ≤ ℓ) = e^{−t²} D_ℓ`.
pub fn prob_square(t: f64, ell: usize, opuc: &OpucData) -> Result<f64> {
    check_t(t)?;
    require_square(opuc, t)?;
    Ok((toeplitz_log_det(opuc, ell)? - t * t).exp())
}

/// The product side `∏_{k≥ℓ} N_k^{−1}`, truncated at the cutoff, and a bound
/// on the neglected factors extrapolated from the last two.
pub fn prob_square_product(opuc: &OpucData, ell: usize) -> Result<(f64, f64)> {
    let k = opuc.cutoff;
    if ell > k {
        return Err(Error::OutOfRange {
            what: "ell",
            index: ell as i64,
            allowed: format!("0..={k}"),
        });
    }
    let s: f64 = opuc.log_norms[ell..=k].iter().sum();
    let last = opuc.log_norm(k).abs();
    let prev = opuc.log_norm(k - 1).abs();
    let bound = if prev > 0.0 && last < prev {
        let r = last / prev;
        last * r / (1.0 - r)
    } else {
        f64::INFINITY
    };
    Ok(((-s).exp(), bound))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleValue {
    /// `P(L_s ≤ 2ℓ+1)`.
    pub p: f64,
    pub tail_bound: f64,
}

/// `P(L_s(t;α) ≤ 2ℓ+1)` from the OPUC of `e^{t(z+1/z)}` with the products
/// `H^±_ℓ` truncated after `k_tail + 1` factors.
pub fn prob_triangle_odd(t: f64, alpha: f64, ell: usize, opuc: &OpucData, k_tail: usize) -> Result<TriangleValue> {
    check_t(t)?;
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::Constraint(format!(
            "α must be finite and nonnegative (got {alpha})"
        )));
    }
    require_square(opuc, t)?;
    let last = ell + k_tail;
    let need = 2 * last + 1;
    if opuc.cutoff < need {
        return Err(Error::OutOfRange {
            what: "cutoff",
            index: opuc.cutoff as i64,
            allowed: format!(">= {need} = 2(ℓ + k_tail) + 1"),
        });
    }
    // For this symbol N_∞ = 1 and log N_j = −Σ_{i>j} log(1 − b(i)²), so both
    // neglected factors are controlled by |b| alone.
    let term = |k: usize| {
        let b = opuc.b(2 * k + 1).abs();
        2.0 * b + 2.0 * b * b
    };
    // Once the terms fall below the tolerance with ratio ≤ 1/2 they keep
    // decaying super-exponentially, so twice that term bounds everything
    // past it. Factors beyond it are at rounding level and are left out.
    let certified = (1..=last).find(|&k| {
        let x = term(k);
        x <= 0.5 * TAIL_TOL && (x <= 0.5 * term(k - 1) || x < 1e-3 * TAIL_TOL)
    });
    let tail_bound = certified.map_or(f64::INFINITY, |k| 2.0 * term(k));
    let stop = certified.map_or(last, |k| k.max(ell));
    let mut log_hp = 0.0;
    let mut log_hm = 0.0;
    for k in ell..=stop {
        let j = 2 * k + 1;
        let pi0 = -opuc.b(j);
        log_hp += -opuc.log_norm(j) + (-pi0).ln_1p();
        log_hm += -opuc.log_norm(j) + pi0.ln_1p();
    }
    if tail_bound > TAIL_TOL {
        return Err(Error::TailBound {
            bound: tail_bound,
            tol: TAIL_TOL,
            hint: "k_tail",
        });
    }
    let v = eval_pi(opuc, 2 * ell, Complex64::new(-alpha, 0.0))?;
    let plus = (v.pi_star + alpha * v.pi).re;
    let minus = (v.pi_star - alpha * v.pi).re;
    let scale = v.log_scale - alpha * t;
    let p = 0.5 * (plus * (scale + log_hp).exp() + minus * (scale + log_hm).exp());
    Ok(TriangleValue { p, tail_bound })
}

/// Builds the OPUC data and chooses `k_tail` automatically.
pub fn triangle_odd(t: f64, alpha: f64, ell: usize, profile: PrecisionProfile) -> Result<TriangleValue> {
    let (opuc, k_tail) = triangle_opuc(t, ell, profile)?;
    prob_triangle_odd(t, alpha, ell, &opuc, k_tail)
}

fn triangle_opuc(t: f64, max_ell: usize, profile: PrecisionProfile) -> Result<(OpucData, usize)> {
    check_t(t)?;
    let k_tail = (square_edge_cutoff(t) / 2 + 1).max(2);
    let cutoff = 2 * (max_ell + k_tail) + 1;
    Ok((build_opuc(&SymbolSpec::poisson_square(t), cutoff, profile)?, k_tail))
}

fn rational_ratio(opuc: &OpucData, ell: usize, ap: f64, am: f64) -> Result<(f64, f64)> {
    let vp = eval_pi(opuc, ell, Complex64::new(-ap, 0.0))?;
    let vm = eval_pi(opuc, ell, Complex64::new(-am, 0.0))?;
    let m = (vp.pi_star * vm.pi_star - ap * am * vp.pi * vm.pi).re / (1.0 - ap * am);
    Ok((m, vp.log_scale + vm.log_scale))
}

fn external_core(t: f64, ap: f64, am: f64, ell: usize, opuc: &OpucData) -> Result<f64> {
    let log_z = (ap + am) * t + t * t;
    let (m1, s1) = rational_ratio(opuc, ell, ap, am)?;
    let first = m1 * (toeplitz_log_det(opuc, ell)? + s1 - log_z).exp();
    if ell == 0 {
        return Ok(first);
    }
    let (m0, s0) = rational_ratio(opuc, ell - 1, ap, am)?;
    let second = ap * am * m0 * (toeplitz_log_det(opuc, ell - 1)? + s0 - log_z).exp();
    Ok(first - second)
}

/// Distance from `α₊α₋ = 1` below which the limit is taken numerically.
pub const EXTERNAL_SINGULAR_BAND: f64 = 1e-4;

/// `P(L_e(t;α₊,α₋) ≤ ℓ) = (D′_ℓ − α₊α₋ D′_{ℓ−1})/Z`.
pub fn prob_external(t: f64, a_plus: f64, a_minus: f64, ell: usize, opuc: &OpucData) -> Result<f64> {
    check_t(t)?;
    for a in [a_plus, a_minus] {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::Constraint(format!(
                "boundary rates must be nonnegative (got {a})"
            )));
        }
    }
    require_square(opuc, t)?;
    if (1.0 - a_plus * a_minus).abs() >= EXTERNAL_SINGULAR_BAND {
        return external_core(t, a_plus, a_minus, ell, opuc);
    }
    // Symmetric differences in α₋ with Richardson extrapolation (error O(h⁴)).
    let h = 1e-3 * a_minus.max(1.0);
    let sym = |h: f64| -> Result<f64> {
        Ok(0.5
            * (external_core(t, a_plus, a_minus + h, ell, opuc)? + external_core(t, a_plus, a_minus - h, ell, opuc)?))
    };
    let (f1, f2) = (sym(h)?, sym(0.5 * h)?);
    Ok((4.0 * f2 - f1) / 3.0)
}

/// `D_ℓ(φ)/Z` for a unitary-group model.
pub fn prob_lattice(model: &ModelSpec, ell: usize, profile: PrecisionProfile) -> Result<f64> {
    let t = lattice_table(model, ell, profile)?;
    Ok(t.entries[ell].p)
}

fn table(model: &ModelSpec, method: &str) -> DistTable {
    DistTable {
        model: model.clone(),
        entries: Vec::new(),
        truncation_info: TruncationInfo {
            method: method.to_string(),
            ..TruncationInfo::default()
        },
    }
}

pub fn lattice_table(model: &ModelSpec, lmax: usize, profile: PrecisionProfile) -> Result<DistTable> {
    if !model.kind.is_toeplitz() {
        return Err(Error::InvalidArgument(format!(
            "{:?} is not a Toeplitz model",
            model.kind
        )));
    }
    let sym = build_symbol(model)?;
    let log_z = normalization_log_z(model)?;
    let opuc = build_opuc(&sym, lmax.max(1), profile)?;
    let mut out = table(model, "toeplitz-levinson");
    out.truncation_info.cutoff = Some(opuc.cutoff);
    out.truncation_info.precision_bits = Some(opuc.source.precision_bits);
    for ell in 0..=lmax {
        out.push(ell, (toeplitz_log_det(&opuc, ell)? - log_z).exp());
    }
    Ok(out)
}

pub fn square_table(t: f64, lmax: usize, profile: PrecisionProfile) -> Result<DistTable> {
    check_t(t)?;
    let cutoff = lmax.max(square_edge_cutoff(t));
    let opuc = build_opuc(&SymbolSpec::poisson_square(t), cutoff, profile)?;
    let model = ModelSpec::poisson_square(t);
    let mut out = table(&model, "toeplitz-levinson");
    out.truncation_info.cutoff = Some(cutoff);
    out.truncation_info.precision_bits = Some(opuc.source.precision_bits);
    let mut worst: f64 = 0.0;
    for ell in 0..=lmax {
        let p = prob_square(t, ell, &opuc)?;
        let (q, bound) = prob_square_product(&opuc, ell)?;
        worst = worst.max(((p - q).abs() - bound).max(0.0));
        out.push(ell, p);
    }
    out.truncation_info.tail_bound = Some(worst);
    Ok(out)
}

/// Odd entries `ℓ = 2m+1 ≤ lmax` of the triangle model.
pub fn triangle_table(t: f64, alpha: f64, lmax: usize, profile: PrecisionProfile) -> Result<DistTable> {
    let model = ModelSpec::poisson_triangle(t, alpha);
    model.validate()?;
    let mmax = lmax.saturating_sub(1) / 2;
    let (opuc, k_tail) = triangle_opuc(t, mmax, profile)?;
    let mut out = table(&model, "triangle-odd-opuc");
    out.truncation_info.cutoff = Some(opuc.cutoff);
    out.truncation_info.precision_bits = Some(opuc.source.precision_bits);
    let mut bound: f64 = 0.0;
    for m in 0..=mmax {
        if 2 * m + 1 > lmax {
            break;
        }
        let v = prob_triangle_odd(t, alpha, m, &opuc, k_tail)?;
        bound = bound.max(v.tail_bound);
        out.push(2 * m + 1, v.p);
    }
    out.truncation_info.tail_bound = Some(bound);
    Ok(out)
}

/// `P(L_s ≤ 2ℓ−1) ≤ P(L_s ≤ 2ℓ) ≤ P(L_s ≤ 2ℓ+1)` for even values, `ℓ ≥ 1`.
pub fn triangle_even_bounds(t: f64, alpha: f64, ell: usize, profile: PrecisionProfile) -> Result<(f64, f64)> {
    if ell == 0 {
        let upper = triangle_odd(t, alpha, 0, profile)?.p;
        return Ok(((-(alpha * t) - 0.5 * t * t).exp(), upper));
    }
    let (opuc, k_tail) = triangle_opuc(t, ell, profile)?;
    Ok((
        prob_triangle_odd(t, alpha, ell - 1, &opuc, k_tail)?.p,
        prob_triangle_odd(t, alpha, ell, &opuc, k_tail)?.p,
    ))
}

pub fn external_table(t: f64, a_plus: f64, a_minus: f64, lmax: usize, profile: PrecisionProfile) -> Result<DistTable> {
    let model = ModelSpec::poisson_external(t, a_plus, a_minus);
    model.validate()?;
    let cutoff = lmax.max(square_edge_cutoff(t));
    let opuc = build_opuc(&SymbolSpec::poisson_square(t), cutoff, profile)?;
    let mut out = table(&model, "external-opuc");
    out.truncation_info.cutoff = Some(cutoff);
    out.truncation_info.precision_bits = Some(opuc.source.precision_bits);
    for ell in 0..=lmax {
        out.push(ell, prob_external(t, a_plus, a_minus, ell, &opuc)?);
    }
    Ok(out)
}

fn psi_at(psi: &SymbolSpec, z: Complex64) -> Complex64 {
    let mut v = (z * psi.exp_plus_t).exp();
    for &q in &psi.zeros_plus {
        v *= 1.0 + q * z;
    }
    for &q in &psi.poles_plus {
        v /= 1.0 - q * z;
    }
    v
}

/// Ratio `det(∫ cos jθ cos kθ f w) / det(∫ cos jθ cos kθ w)` over `[0, π]`.
fn weyl_ratio(n: usize, f: &dyn Fn(f64) -> f64, w: &dyn Fn(f64) -> f64, nodes: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut num = DMatrix::<f64>::zeros(n, n);
    let mut den = DMatrix::<f64>::zeros(n, n);
    let h = std::f64::consts::PI / nodes as f64;
    for i in 0..nodes {
        let th = (i as f64 + 0.5) * h;
        let (fw, ww) = (f(th) * w(th), w(th));
        for j in 0..n {
            for k in 0..=j {
                let c = (j as f64 * th).cos() * (k as f64 * th).cos();
                num[(j, k)] += c * fw;
                den[(j, k)] += c * ww;
            }
        }
    }
    for j in 0..n {
        for k in 0..j {
            num[(k, j)] = num[(j, k)];
            den[(k, j)] = den[(j, k)];
        }
    }
    num.lu().determinant() / den.lu().determinant()
}

/// `E_{U∈O(ℓ)} det ψ(U)` by Weyl integration over both components, for a
/// one-sided weight `ψ` (only plus-side fields are used).
pub fn orthogonal_expectation(psi: &SymbolSpec, ell: usize) -> Result<f64> {
    if ell > WEYL_MAX_ELL {
        return Err(Error::OutOfRange {
            what: "ell",
            index: ell as i64,
            allowed: format!("0..={WEYL_MAX_ELL} for the quadrature path"),
        });
    }
    if !psi.zeros_minus.is_empty() || !psi.poles_minus.is_empty() || psi.exp_minus_t != 0.0 {
        return Err(Error::InvalidArgument(
            "ψ must be one-sided (plus-side factors only)".into(),
        ));
    }
    psi.validate()?;
    let p1 = psi_at(psi, Complex64::new(1.0, 0.0)).re;
    let m1 = psi_at(psi, Complex64::new(-1.0, 0.0)).re;
    if ell == 0 {
        return Ok(1.0);
    }
    if ell == 1 {
        return Ok(0.5 * (p1 + m1));
    }
    let f = |th: f64| psi_at(psi, Complex64::from_polar(1.0, th)).norm_sqr();
    let nodes = 512;
    let n = ell / 2;
    let (plus, minus) = if ell % 2 == 1 {
        (
            p1 * weyl_ratio(n, &f, &|th| (0.5 * th).sin().powi(2), nodes),
            m1 * weyl_ratio(n, &f, &|th| (0.5 * th).cos().powi(2), nodes),
        )
    } else {
        (
            weyl_ratio(n, &f, &|_| 1.0, nodes),
            p1 * m1 * weyl_ratio(n - 1, &f, &|th| th.sin().powi(2), nodes),
        )
    };
    Ok(0.5 * (plus + minus))
}

/// `P(L ≤ ℓ) = E_{O(ℓ)} det((1 + αU)e^{tU}) / e^{αt + t²/2}`.
pub fn prob_triangle_fs_via_ogroup(t: f64, alpha: f64, ell: usize) -> Result<f64> {
    prob_orthogonal_model(&ModelSpec::triangle_fs(t, alpha), ell)
}

/// Weyl-quadrature evaluation of an orthogonal-group model
/// (triangle or symmetrized lattice).
pub fn prob_orthogonal_model(model: &ModelSpec, ell: usize) -> Result<f64> {
    let psi = orthogonal_weight(model)?;
    let log_z = normalization_log_z(model)?;
    Ok(orthogonal_expectation(&psi, ell)? * (-log_z).exp())
}

pub fn orthogonal_table(model: &ModelSpec, lmax: usize) -> Result<DistTable> {
    let mut out = table(model, "weyl-quadrature");
    for ell in 0..=lmax {
        out.push(ell, prob_orthogonal_model(model, ell)?);
    }
    Ok(out)
}

/// Table for any catalog model, using the production route for its kind.
pub fn model_table(model: &ModelSpec, lmax: usize, profile: PrecisionProfile) -> Result<DistTable> {
    use ModelKind::*;
    model.validate()?;
    match model.kind {
        PoissonSquare => square_table(model.t, lmax, profile),
        PoissonTriangle => triangle_table(model.t, model.alpha, lmax, profile),
        PoissonExternal => external_table(model.t, model.alpha_plus, model.alpha_minus, lmax, profile),
        LatticeA | LatticeB | LatticeC | PoissonLinesD | PoissonLinesE => lattice_table(model, lmax, profile),
        TrianglePoissonFS | SymmetricLatticeA | SymmetricLatticeC => orthogonal_table(model, lmax),
    }
}

/// `P((L(t) − 2t)/t^{1/3} ≤ x)` for many `x` at one `t`, sharing the OPUC data.
pub struct ScaledCdf {
    t: f64,
    opuc: OpucData,
}

impl ScaledCdf {
    pub fn new(t: f64, profile: PrecisionProfile) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidArgument(format!("t must be positive (got {t})")));
        }
        let opuc = build_opuc(&SymbolSpec::poisson_square(t), square_edge_cutoff(t), profile)?;
        Ok(Self { t, opuc })
    }

    pub fn ell(&self, x: f64) -> f64 {
        (2.0 * self.t + x * self.t.cbrt()).floor()
    }

    /// Beyond the cutoff the remaining factors `N_k^{−1}` are below the
    /// declared tail and the value is reported at the cutoff.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let ell = self.ell(x);
        if ell < 0.0 {
            return Ok(0.0);
        }
        let ell = (ell as usize).min(self.opuc.cutoff + 1);
        prob_square(self.t, ell, &self.opuc)
    }
}

pub fn scaled_cdf(t: f64, x: f64, profile: PrecisionProfile) -> Result<f64> {
    ScaledCdf::new(t, profile)?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opuc::build_opuc_with;
    use crate::symbols::{default_nodes, fourier_coeffs};

    fn sq(t: f64, k: usize) -> OpucData {
        build_opuc(&SymbolSpec::poisson_square(t), k, PrecisionProfile::Auto).unwrap()
    }

    #[test]
    fn square_small_values() {
        let d = sq(0.0, 10);
        for ell in 0..=3 {
            assert!((prob_square(0.0, ell, &d).unwrap() - 1.0).abs() < 1e-15);
        }
        // Poissonized count: only the decreasing permutation has LIS ≤ 1.
        let d = sq(1.0, 30);
        let mut series = 0.0;
        let mut term = 1.0;
        for n in 0..40 {
            if n > 0 {
                term /= (n * n) as f64;
            }
            series += term;
        }
        let p = prob_square(1.0, 1, &d).unwrap();
        assert!((p - (-1.0f64).exp() * series).abs() < 1e-14);
        assert!((p - 0.838_613).abs() < 1e-6);
    }

    #[test]
    fn square_product_form_agrees() {
        let d = sq(3.0, square_edge_cutoff(3.0));
        for ell in 0..12 {
            let p = prob_square(3.0, ell, &d).unwrap();
            let (q, bound) = prob_square_product(&d, ell).unwrap();
            assert!((p - q).abs() <= bound + 1e-12, "ell={ell}: {p} vs {q} ± {bound}");
        }
    }

    #[test]
    fn table_invariants() {
        let t = square_table(2.0, 20, PrecisionProfile::Auto).unwrap();
        t.check_invariants(1e-10).unwrap();
        assert!(t.entries.last().unwrap().p > 1.0 - 1e-10);
        let csv = t.to_csv();
        assert!(csv.starts_with("ell,p,log_p\n0,"));
        assert_eq!(csv.lines().count(), 22);
    }

    #[test]
    fn triangle_trivial_limits() {
        for ell in 0..4 {
            let v = triangle_odd(0.0, 0.0, ell, PrecisionProfile::Auto).unwrap();
            assert!((v.p - 1.0).abs() < 1e-14);
        }
        // P(L_s ≤ 1) from O(1) = {±1}.
        for (t, a) in [(1.0f64, 0.5f64), (0.7, 1.5)] {
            let v = triangle_odd(t, a, 0, PrecisionProfile::Auto).unwrap();
            let exact = 0.5 * ((1.0 + a) * t.exp() + (1.0 - a) * (-t).exp()) / (a * t + 0.5 * t * t).exp();
            assert!((v.p - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_matches_weyl_quadrature() {
        for (t, a) in [(1.0, 0.0), (1.0, 0.5), (1.0, 1.5), (2.0, 0.3)] {
            for ell in 0..=3 {
                let v = triangle_odd(t, a, ell, PrecisionProfile::Auto).unwrap();
                let w = prob_triangle_fs_via_ogroup(t, a, 2 * ell + 1).unwrap();
                assert!((v.p - w).abs() < 1e-10, "t={t} α={a} ℓ={}: {} vs {w}", 2 * ell + 1, v.p);
            }
        }
    }

    #[test]
    fn triangle_tail_bound_enforced() {
        let d = sq(6.0, 40);
        let e = prob_triangle_odd(6.0, 0.5, 1, &d, 2).unwrap_err();
        assert!(matches!(e, Error::TailBound { hint: "k_tail", .. }));
    }

    #[test]
    fn triangle_monotone_and_even_brackets() {
        let t = triangle_table(1.5, 0.5, 15, PrecisionProfile::Auto).unwrap();
        t.check_invariants(1e-12).unwrap();
        let (lo, hi) = triangle_even_bounds(1.5, 0.5, 2, PrecisionProfile::Auto).unwrap();
        assert!(lo <= hi && (lo - t.get(3).unwrap()).abs() < 1e-12 && (hi - t.get(5).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn external_reduces_to_square() {
        let d = sq(1.3, 40);
        for ell in 0..10 {
            let a = prob_external(1.3, 0.0, 0.0, ell, &d).unwrap();
            let b = prob_square(1.3, ell, &d).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn external_ratio_matches_dense_toeplitz() {
        // D′_ℓ is the Toeplitz determinant of (1+α₊z)(1+α₋/z)e^{t(z+1/z)}.
        let (t, ap, am) = (1.0, 0.3, 0.6);
        let d = sq(t, 20);
        let s = SymbolSpec {
            exp_plus_t: t,
            exp_minus_t: t,
            zeros_plus: vec![ap],
            zeros_minus: vec![am],
            ..SymbolSpec::default()
        };
        let c = fourier_coeffs(&s, 12, default_nodes(12)).unwrap();
        for ell in 1..8 {
            let m = DMatrix::from_fn(ell, ell, |j, k| c.get(j as i64 - k as i64));
            let dense = m.lu().determinant();
            let (r, sc) = rational_ratio(&d, ell, ap, am).unwrap();
            let formula = r * (toeplitz_log_det(&d, ell).unwrap() + sc).exp();
            assert!((dense / formula - 1.0).abs() < 1e-11, "ell={ell}");
        }
    }

    #[test]
    fn external_singular_limit() {
        let d = sq(1.0, 30);
        let (ap, am) = (2.0, 0.5);
        let at = prob_external(1.0, ap, am, 4, &d).unwrap();
        let h = 1e-3;
        let lo = external_core(1.0, ap, am - h, 4, &d).unwrap();
        let hi = external_core(1.0, ap, am + h, 4, &d).unwrap();
        let lo2 = external_core(1.0, ap, am - 2.0 * h, 4, &d).unwrap();
        let hi2 = external_core(1.0, ap, am + 2.0 * h, 4, &d).unwrap();
        let extrap = (4.0 * 0.5 * (lo + hi) - 0.5 * (lo2 + hi2)) / 3.0;
        assert!(((at - extrap) / at).abs() < 1e-5, "{at} vs {extrap}");
        let tab = external_table(1.0, ap, am, 12, PrecisionProfile::Auto).unwrap();
        tab.check_invariants(1e-9).unwrap();
    }

    #[test]
    fn lattice_one_by_one() {
        let a = ModelSpec::lattice(ModelKind::LatticeA, vec![0.5], vec![0.4]);
        assert!((prob_lattice(&a, 0, PrecisionProfile::Auto).unwrap() - 0.8).abs() < 1e-10);
        assert!((prob_lattice(&a, 1, PrecisionProfile::Auto).unwrap() - 0.96).abs() < 1e-10);
        let b = ModelSpec::lattice(ModelKind::LatticeB, vec![0.5], vec![0.4]);
        assert!((prob_lattice(&b, 0, PrecisionProfile::Auto).unwrap() - 1.0 / 1.2).abs() < 1e-10);
        assert!((prob_lattice(&b, 1, PrecisionProfile::Auto).unwrap() - 1.0).abs() < 1e-10);
        let c = ModelSpec::lattice(ModelKind::LatticeC, vec![0.5], vec![0.4]);
        for ell in 0..4 {
            let p = prob_lattice(&c, ell, PrecisionProfile::Auto).unwrap();
            // A single geometric site contributes at most one under strict/strict paths.
            let expect = if ell == 0 { 0.8 } else { 1.0 };
            assert!((p - expect).abs() < 1e-10, "ell={ell}: {p}");
        }
    }

    #[test]
    fn single_line_models() {
        let (t, q) = (1.7, 0.6);
        let d = ModelSpec::poisson_lines(ModelKind::PoissonLinesD, t, vec![q]);
        let mut cdf = 0.0;
        let mut term = (-t * q).exp();
        for ell in 0..8 {
            if ell > 0 {
                term *= t * q / ell as f64;
            }
            cdf += term;
            assert!((prob_lattice(&d, ell, PrecisionProfile::Auto).unwrap() - cdf).abs() < 1e-10);
        }
        let e = ModelSpec::poisson_lines(ModelKind::PoissonLinesE, t, vec![q]);
        assert!((prob_lattice(&e, 0, PrecisionProfile::Auto).unwrap() - (-t * q).exp()).abs() < 1e-10);
        assert!((prob_lattice(&e, 1, PrecisionProfile::Auto).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lattice_a_two_by_two_enumeration() {
        let rows = [0.3, 0.5];
        let cols = [0.4, 0.2];
        let m = ModelSpec::lattice(ModelKind::LatticeA, rows.to_vec(), cols.to_vec());
        let table = lattice_table(&m, 6, PrecisionProfile::Auto).unwrap();
        // Exhaustive sum over X(i,j) ≤ 30 (tail mass < 1e-12).
        let cap = 30usize;
        let mut probs = vec![0.0; 7];
        let pmf = |r: f64, k: usize| (1.0 - r) * r.powi(k as i32);
        let r = [
            rows[0] * cols[0],
            rows[0] * cols[1],
            rows[1] * cols[0],
            rows[1] * cols[1],
        ];
        for a in 0..cap {
            for b in 0..cap {
                for c in 0..cap {
                    for d in 0..cap {
                        let l = a + b.max(c) + d;
                        let w = pmf(r[0], a) * pmf(r[1], b) * pmf(r[2], c) * pmf(r[3], d);
                        for (ell, p) in probs.iter_mut().enumerate() {
                            if l <= ell {
                                *p += w;
                            }
                        }
                    }
                }
            }
        }
        for ell in 0..=6 {
            assert!((table.get(ell).unwrap() - probs[ell]).abs() < 1e-10, "ell={ell}");
        }
    }

    #[test]
    fn weyl_small_groups() {
        let psi = SymbolSpec::trivial();
        for ell in 0..=8 {
            assert!((orthogonal_expectation(&psi, ell).unwrap() - 1.0).abs() < 1e-12);
        }
        let psi = SymbolSpec {
            exp_plus_t: 1.0,
            zeros_plus: vec![0.5],
            ..SymbolSpec::default()
        };
        let e1 = orthogonal_expectation(&psi, 1).unwrap();
        assert!((e1 - 0.5 * (1.5 * 1f64.exp() + 0.5 * (-1f64).exp())).abs() < 1e-14);
        assert!(orthogonal_expectation(&psi, 9).is_err());
    }

    #[test]
    fn weyl_even_dimension_against_direct_integral() {
        // O(2): rotations R_θ (eigenvalues e^{±iθ}) and reflections (±1),
        // each with probability ½ and θ uniform.
        let psi = SymbolSpec {
            exp_plus_t: 0.8,
            zeros_plus: vec![0.3],
            ..SymbolSpec::default()
        };
        let n = 4000;
        let mut rot = 0.0;
        for i in 0..n {
            let th = std::f64::consts::TAU * (i as f64 + 0.5) / n as f64;
            rot += psi_at(&psi, Complex64::from_polar(1.0, th)).norm_sqr();
        }
        rot /= n as f64;
        let refl = psi_at(&psi, Complex64::new(1.0, 0.0)).re * psi_at(&psi, Complex64::new(-1.0, 0.0)).re;
        let e2 = orthogonal_expectation(&psi, 2).unwrap();
        assert!((e2 - 0.5 * (rot + refl)).abs() < 1e-12);
    }

    #[test]
    fn scaled_cdf_behaviour() {
        let s = ScaledCdf::new(4.0, PrecisionProfile::Auto).unwrap();
        assert_eq!(s.eval(-20.0).unwrap(), 0.0);
        assert!(s.eval(40.0).unwrap() > 1.0 - 1e-10);
        let mut prev = 0.0;
        for j in 0..60 {
            let v = s.eval(-6.0 + 0.2 * j as f64).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn double_and_multiprecision_tables_agree() {
        let s = SymbolSpec::poisson_square(1.0);
        let a = build_opuc_with(&s, 20, 400, 53).unwrap();
        let b = build_opuc_with(&s, 20, 400, 192).unwrap();
        for ell in 0..15 {
            assert!((prob_square(1.0, ell, &a).unwrap() - prob_square(1.0, ell, &b).unwrap()).abs() < 1e-13);
        }
    }
}

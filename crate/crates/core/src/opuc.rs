//! Orthogonal polynomials on the unit circle for a (possibly non-symmetric)
//! symbol, Toeplitz determinants, the corner matrix `Y(0;k)` and the
//! discrete Painlevé II checks.
//!
//! The bilinear form is `⟨p, q⟩ = (1/2π) ∫ p(e^{iθ}) q(e^{−iθ}) φ(e^{iθ}) dθ`,
//! so `⟨z^a, z^b⟩ = φ_{b−a}`. Two monic families are built: `π_k` with
//! `⟨π_k, z^j⟩ = 0` and `π̃_k` with `⟨z^j, π̃_k⟩ = 0` for `j < k`. They share the
//! norms `N_k = D_{k+1}/D_k` and coincide when `φ(1/z) = φ(z)`.

use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{MpFloat, Real};
use crate::symbols::{default_nodes, fourier_coeffs_in, FourierTable, SymbolSpec};

/// Reflection products at or beyond this distance from 1 count as breakdown.
pub const BREAKDOWN_MARGIN: f64 = 1e-13;

/// Arithmetic used for the Fourier quadrature and the Levinson recursion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecisionProfile {
    /// Always `f64`. Loses roughly `R / ln 10` digits where `R` is the log
    /// dynamic range of the symbol.
    Double,
    /// Always multiprecision, at least 128 bits.
    Extended,
    /// `f64` when the dynamic range is small, multiprecision otherwise.
    #[default]
    Auto,
}

impl FromStr for PrecisionProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double" => Ok(Self::Double),
            "extended" => Ok(Self::Extended),
            "auto" => Ok(Self::Auto),
            _ => Err(Error::InvalidArgument(format!(
                "unknown precision profile {s:?} (expected double, extended or auto)"
            ))),
        }
    }
}

impl PrecisionProfile {
    /// Working precision in bits for a symbol with log dynamic range `range`.
    pub fn bits_for_range(self, range: f64) -> usize {
        let needed = 128 + (range / std::f64::consts::LN_2).ceil() as usize;
        let needed = needed.div_ceil(64) * 64;
        match self {
            Self::Double => 53,
            Self::Extended => needed.max(128),
            Self::Auto if range <= 8.0 => 53,
            Self::Auto => needed,
        }
    }
}

/// Where an [`OpucData`] came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpucSource {
    pub symbol: SymbolSpec,
    pub half_width: usize,
    pub quadrature_nodes: usize,
    pub precision_bits: usize,
}

/// Reflection coefficients and norms up to a cutoff `K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpucData {
    /// `reflection[k-1] = b(k) = −π_k(0)`, `k = 1..=K`.
    pub reflection: Vec<f64>,
    /// `dual_reflection[k-1] = −π̃_k(0)`; equal to `reflection` for symmetric symbols.
    pub dual_reflection: Vec<f64>,
    /// `log_norms[k] = log N_k`, `k = 0..=K`.
    pub log_norms: Vec<f64>,
    pub cutoff: usize,
    pub source: OpucSource,
}

impl OpucData {
    /// `b(k) = −π_k(0)` for `1 ≤ k ≤ K`.
    pub fn b(&self, k: usize) -> f64 {
        self.reflection[k - 1]
    }

    pub fn b_dual(&self, k: usize) -> f64 {
        self.dual_reflection[k - 1]
    }

    pub fn log_norm(&self, k: usize) -> f64 {
        self.log_norms[k]
    }

    fn check_k(&self, what: &'static str, k: usize, lo: usize, hi: usize) -> Result<()> {
        if k < lo || k > hi {
            return Err(Error::OutOfRange {
                what,
                index: k as i64,
                allowed: format!("{lo}..={hi}"),
            });
        }
        Ok(())
    }
}

struct Recursion<T> {
    reflection: Vec<T>,
    dual: Vec<T>,
    log_norms: Vec<T>,
}

/// Two-sided Levinson recursion on `φ_j` stored at `c[j + half_width]`.
///
/// Norms are evaluated directly as `⟨π_k, z^k⟩` rather than through the
/// product `N_{k+1} = N_k (1 − π_{k+1}(0) π̃_{k+1}(0))`, so that the norm
/// recurrence remains an independent check of the output.
fn levinson_in<T: Real>(c: &[T], half_width: usize, cutoff: usize) -> Result<Recursion<T>> {
    if cutoff > half_width {
        return Err(Error::OutOfRange {
            what: "cutoff",
            index: cutoff as i64,
            allowed: format!("0..={half_width} (the Fourier half-width)"),
        });
    }
    let phi = |j: i64| c[(j + half_width as i64) as usize].clone();
    let zero = c[half_width].zero_like();
    let one = zero.one_like();
    let n0 = phi(0);
    if n0 <= zero {
        return Err(Error::Breakdown {
            k: 0,
            product: n0.to_f64(),
        });
    }
    let mut p = vec![one.clone()];
    let mut pt = vec![one.clone()];
    let mut norm = n0.clone();
    let mut out = Recursion {
        reflection: Vec::with_capacity(cutoff),
        dual: Vec::with_capacity(cutoff),
        log_norms: vec![n0.ln()],
    };
    let limit = one.cst(1.0 - BREAKDOWN_MARGIN);
    for k in 0..cutoff {
        let mut s = zero.clone();
        let mut st = zero.clone();
        for a in 0..=k {
            s = s + p[a].clone() * phi(-1 - a as i64);
            st = st + pt[a].clone() * phi(a as i64 + 1);
        }
        let r = -(s / norm.clone());
        let rt = -(st / norm.clone());
        let prod = r.clone() * rt.clone();
        if prod >= limit {
            return Err(Error::Breakdown {
                k: k + 1,
                product: prod.to_f64(),
            });
        }
        let mut np = Vec::with_capacity(k + 2);
        let mut npt = Vec::with_capacity(k + 2);
        for i in 0..=k {
            let (shift, shift_t) = if i == 0 {
                (zero.clone(), zero.clone())
            } else {
                (p[i - 1].clone(), pt[i - 1].clone())
            };
            np.push(shift + r.clone() * pt[k - i].clone());
            npt.push(shift_t + rt.clone() * p[k - i].clone());
        }
        np.push(one.clone());
        npt.push(one.clone());
        p = np;
        pt = npt;
        let mut nk = zero.clone();
        for (a, pa) in p.iter().enumerate() {
            nk = nk + pa.clone() * phi(k as i64 + 1 - a as i64);
        }
        if nk <= zero {
            return Err(Error::Breakdown {
                k: k + 1,
                product: prod.to_f64(),
            });
        }
        out.reflection.push(-r);
        out.dual.push(-rt);
        out.log_norms.push(nk.ln());
        norm = nk;
    }
    Ok(out)
}

fn finish<T: Real>(rec: Recursion<T>, cutoff: usize, source: OpucSource) -> OpucData {
    let f = |v: Vec<T>| v.iter().map(Real::to_f64).collect::<Vec<_>>();
    OpucData {
        reflection: f(rec.reflection),
        dual_reflection: f(rec.dual),
        log_norms: f(rec.log_norms),
        cutoff,
        source,
    }
}

/// Double-precision Levinson recursion on an existing Fourier table.
pub fn levinson(coeffs: &FourierTable, cutoff: usize) -> Result<OpucData> {
    let rec = levinson_in(&coeffs.coeffs, coeffs.half_width, cutoff)?;
    Ok(finish(
        rec,
        cutoff,
        OpucSource {
            symbol: coeffs.symbol.clone(),
            half_width: coeffs.half_width,
            quadrature_nodes: coeffs.quadrature_nodes,
            precision_bits: 53,
        },
    ))
}

/// Fourier quadrature plus Levinson, in the precision chosen by `profile`.
pub fn build_opuc(symbol: &SymbolSpec, cutoff: usize, profile: PrecisionProfile) -> Result<OpucData> {
    let half_width = cutoff.max(1);
    let nodes = default_nodes(half_width);
    let range = symbol.log_dynamic_range(nodes.min(4096));
    let bits = profile.bits_for_range(range);
    build_opuc_with(symbol, cutoff, nodes, bits)
}

/// As [`build_opuc`] with explicit node count and working precision
/// (`bits ≤ 53` selects `f64`).
pub fn build_opuc_with(symbol: &SymbolSpec, cutoff: usize, nodes: usize, bits: usize) -> Result<OpucData> {
    let half_width = cutoff.max(1);
    let source = OpucSource {
        symbol: symbol.clone(),
        half_width,
        quadrature_nodes: nodes,
        precision_bits: bits.max(53),
    };
    if bits <= 53 {
        let c = fourier_coeffs_in(symbol, half_width, nodes, &0.0f64)?;
        Ok(finish(levinson_in(&c, half_width, cutoff)?, cutoff, source))
    } else {
        let proto = MpFloat::new(0.0, bits);
        let c = fourier_coeffs_in(symbol, half_width, nodes, &proto)?;
        Ok(finish(levinson_in(&c, half_width, cutoff)?, cutoff, source))
    }
}

/// `log D_ℓ = Σ_{k<ℓ} log N_k`, with `D_0 = 1`.
pub fn toeplitz_log_det(data: &OpucData, ell: usize) -> Result<f64> {
    data.check_k("ell", ell, 0, data.cutoff + 1)?;
    Ok(data.log_norms[..ell].iter().sum())
}

/// Polynomial values `mantissa · e^{log_scale}` sharing one scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiValues {
    pub pi: Complex64,
    pub pi_star: Complex64,
    pub pi_dual: Complex64,
    pub pi_dual_star: Complex64,
    pub log_scale: f64,
}

impl PiValues {
    pub fn pi_unscaled(&self) -> Complex64 {
        self.pi * self.log_scale.exp()
    }

    pub fn pi_star_unscaled(&self) -> Complex64 {
        self.pi_star * self.log_scale.exp()
    }
}

/// `π_k(z)`, `π*_k(z) = z^k π_k(1/z)` and their duals via the Szegő recurrence.
pub fn eval_pi(data: &OpucData, k: usize, z: Complex64) -> Result<PiValues> {
    data.check_k("k", k, 0, data.cutoff)?;
    let one = Complex64::new(1.0, 0.0);
    let (mut p, mut pds, mut pd, mut ps) = (one, one, one, one);
    let mut log_scale = 0.0;
    for j in 1..=k {
        let r = -data.b(j);
        let rt = -data.b_dual(j);
        let np = z * p + r * pds;
        let npds = pds + rt * z * p;
        let npd = z * pd + rt * ps;
        let nps = ps + r * z * pd;
        p = np;
        pds = npds;
        pd = npd;
        ps = nps;
        let m = p.norm().max(pds.norm()).max(pd.norm()).max(ps.norm());
        if m > 1e100 || (m < 1e-100 && m > 0.0) {
            p /= m;
            pds /= m;
            pd /= m;
            ps /= m;
            log_scale += m.ln();
        }
    }
    Ok(PiValues {
        pi: p,
        pi_star: ps,
        pi_dual: pd,
        pi_dual_star: pds,
        log_scale,
    })
}

/// Values of `Y(0;k)`: `Y_11 = −b`, `Y_21 = a`, `Y_22 = b̃`, `Y_12 = d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YCorner {
    pub a: f64,
    pub b: f64,
    /// `−π̃_k(0)`; equals `b` for symmetric symbols.
    pub b_dual: f64,
    pub d: f64,
    pub k: usize,
}

impl YCorner {
    /// `a d + b b̃`, which equals one.
    pub fn det(&self) -> f64 {
        self.a * self.d + self.b * self.b_dual
    }
}

pub fn y_corner(data: &OpucData, k: usize) -> Result<YCorner> {
    data.check_k("k", k, 1, data.cutoff)?;
    let a = -(-data.log_norm(k - 1)).exp();
    let b = data.b(k);
    let b_dual = data.b_dual(k);
    Ok(YCorner {
        a,
        b,
        b_dual,
        d: (1.0 - b * b_dual) / a,
        k,
    })
}

/// `(k/t) b(k) + (b(k−1) + b(k+1)) (1 − b(k)²)`, which vanishes for `e^{t(z+1/z)}`.
pub fn dpii_residual(data: &OpucData, t: f64, k: usize) -> Result<f64> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "t must be finite and nonzero (got {t})"
        )));
    }
    if data.cutoff < 3 {
        return Err(Error::OutOfRange {
            what: "cutoff",
            index: data.cutoff as i64,
            allowed: ">= 3".into(),
        });
    }
    data.check_k("k", k, 2, data.cutoff - 1)?;
    let b = |j| data.b(j);
    Ok(k as f64 / t * b(k) + (b(k - 1) + b(k + 1)) * (1.0 - b(k) * b(k)))
}

/// Maximal relative deviations from `a(k) = (1 − b b̃)(k) a(k+1)` and
/// `d(k) = (1 − b b̃)(k) d(k−1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub a_deviation: f64,
    pub d_deviation: f64,
    /// `max |a d + b b̃ − 1|`.
    pub det_deviation: f64,
}

pub fn recurrence_checks(data: &OpucData) -> Result<RecurrenceReport> {
    if data.cutoff < 2 {
        return Err(Error::OutOfRange {
            what: "cutoff",
            index: data.cutoff as i64,
            allowed: ">= 2".into(),
        });
    }
    let y: Vec<YCorner> = (1..=data.cutoff).map(|k| y_corner(data, k)).collect::<Result<_>>()?;
    // a(k+1) = −1/N_k is available for k = cutoff as well.
    let a_next = |k: usize| -(-data.log_norm(k)).exp();
    let mut rep = RecurrenceReport {
        a_deviation: 0.0,
        d_deviation: 0.0,
        det_deviation: 0.0,
    };
    for (i, yk) in y.iter().enumerate() {
        let k = i + 1;
        let f = 1.0 - yk.b * yk.b_dual;
        rep.a_deviation = rep.a_deviation.max((yk.a - f * a_next(k)).abs() / yk.a.abs());
        if k >= 2 {
            // d from the inverse norm rather than from the corner of step k.
            let d_prev = -(1.0 - y[i - 1].b * y[i - 1].b_dual) * data.log_norm(k - 2).exp();
            let d_here = -f * data.log_norm(k - 1).exp();
            rep.d_deviation = rep
                .d_deviation
                .max((d_here - f * d_prev).abs() / d_here.abs().max(f64::MIN_POSITIVE));
        }
        rep.det_deviation = rep.det_deviation.max((yk.det() - 1.0).abs());
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{build_symbol, fourier_coeffs, ModelKind, ModelSpec};
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn bessel_i(n: u32, x: f64) -> f64 {
        // Power series; adequate for the small arguments used here.
        let mut term = (x / 2.0).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
        let mut sum = term;
        for m in 1..200 {
            term *= (x / 2.0).powi(2) / (m as f64 * (m + n) as f64);
            sum += term;
        }
        sum
    }

    fn dense_log_det(c: &FourierTable, ell: usize) -> f64 {
        if ell == 0 {
            return 0.0;
        }
        let m = DMatrix::from_fn(ell, ell, |j, k| c.get(j as i64 - k as i64));
        m.lu().determinant().ln()
    }

    /// Monic `π_k` coefficients from the moment system `Σ_a p_a φ_{j−a} = 0`, `j < k`.
    fn gram_schmidt(c: &FourierTable, k: usize) -> Vec<f64> {
        if k == 0 {
            return vec![1.0];
        }
        let a = DMatrix::from_fn(k, k, |j, a| c.get(j as i64 - a as i64));
        let rhs = nalgebra::DVector::from_fn(k, |j, _| -c.get(j as i64 - k as i64));
        let sol = a.lu().solve(&rhs).unwrap();
        let mut p: Vec<f64> = sol.iter().copied().collect();
        p.push(1.0);
        p
    }

    fn square(t: f64, k: usize) -> OpucData {
        build_opuc(&SymbolSpec::poisson_square(t), k, PrecisionProfile::Auto).unwrap()
    }

    #[test]
    fn trivial_symbol() {
        let d = build_opuc(&SymbolSpec::trivial(), 10, PrecisionProfile::Double).unwrap();
        assert!(d.reflection.iter().all(|b| b.abs() < 1e-15));
        assert!(d.log_norms.iter().all(|n| n.abs() < 1e-15));
        let z = Complex64::new(0.3, -0.7);
        let v = eval_pi(&d, 5, z).unwrap();
        assert!((v.pi_unscaled() - z.powi(5)).norm() < 1e-14);
        assert!((v.pi_star_unscaled() - 1.0).norm() < 1e-14);
        let y = y_corner(&d, 3).unwrap();
        assert!((y.a + 1.0).abs() < 1e-15 && y.b.abs() < 1e-15 && (y.d + 1.0).abs() < 1e-15);
        let r = recurrence_checks(&d).unwrap();
        assert!(r.a_deviation < 1e-15 && r.d_deviation < 1e-15);
    }

    #[test]
    fn square_first_coefficients_match_bessel() {
        let d = square(1.0, 12);
        let (i0, i1) = (bessel_i(0, 2.0), bessel_i(1, 2.0));
        assert!((d.log_norm(0) - i0.ln()).abs() < 1e-14);
        assert!((i0 - 2.279585302336067).abs() < 1e-12);
        // b(1) = −π_1(0) = φ_1/φ_0
        assert!((d.b(1) - i1 / i0).abs() < 1e-14);
        let y = y_corner(&d, 1).unwrap();
        assert!((y.a + 1.0 / i0).abs() < 1e-14);
        assert!((y.b - i1 / i0).abs() < 1e-14);
    }

    #[test]
    fn log_det_matches_dense() {
        let models = [
            ModelSpec::poisson_square(1.5),
            ModelSpec::lattice(ModelKind::LatticeA, vec![0.6, 0.3], vec![0.5]),
            ModelSpec::lattice(ModelKind::LatticeB, vec![0.7], vec![0.4, 0.2]),
            ModelSpec::lattice(ModelKind::LatticeC, vec![0.5], vec![0.6]),
            ModelSpec::poisson_lines(ModelKind::PoissonLinesD, 1.0, vec![0.5, 0.8]),
            ModelSpec::poisson_lines(ModelKind::PoissonLinesE, 1.0, vec![0.5, 0.3]),
        ];
        for m in &models {
            let s = build_symbol(m).unwrap();
            let d = build_opuc(&s, 40, PrecisionProfile::Auto).unwrap();
            let c = fourier_coeffs(&s, 40, default_nodes(40)).unwrap();
            assert_eq!(toeplitz_log_det(&d, 0).unwrap(), 0.0);
            for ell in 1..=12 {
                let a = toeplitz_log_det(&d, ell).unwrap();
                let b = dense_log_det(&c, ell);
                assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "{m:?} ell={ell}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn two_by_two_determinant() {
        let d = square(1.0, 4);
        let (i0, i1) = (bessel_i(0, 2.0), bessel_i(1, 2.0));
        let expect = (i0 * i0 - i1 * i1).ln();
        assert!((toeplitz_log_det(&d, 2).unwrap() - expect).abs() < 1e-14);
        assert!(toeplitz_log_det(&d, 6).is_err());
    }

    #[test]
    fn eval_pi_matches_gram_schmidt() {
        for m in [
            ModelSpec::poisson_square(1.0),
            ModelSpec::lattice(ModelKind::LatticeA, vec![0.6], vec![0.5]),
        ] {
            let s = build_symbol(&m).unwrap();
            let d = build_opuc(&s, 8, PrecisionProfile::Double).unwrap();
            let c = fourier_coeffs(&s, 8, default_nodes(8)).unwrap();
            for k in [0, 1, 2, 5] {
                let p = gram_schmidt(&c, k);
                for z in [Complex64::new(-0.3, 0.0), Complex64::new(0.4, 0.9)] {
                    let direct: Complex64 = p.iter().enumerate().map(|(a, pa)| pa * z.powi(a as i32)).sum();
                    let star: Complex64 = p.iter().enumerate().map(|(a, pa)| pa * z.powi((k - a) as i32)).sum();
                    let v = eval_pi(&d, k, z).unwrap();
                    assert!((v.pi_unscaled() - direct).norm() < 1e-12, "k={k}");
                    assert!((v.pi_star_unscaled() - star).norm() < 1e-12, "k={k}");
                }
                let at0 = eval_pi(&d, k, Complex64::new(0.0, 0.0)).unwrap();
                let expect = if k == 0 { 1.0 } else { -d.b(k) };
                assert!((at0.pi_unscaled().re - expect).abs() < 1e-15);
                assert!((at0.pi_star_unscaled().re - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn scaled_evaluation_survives_large_arguments() {
        let d = square(2.0, 200);
        let v = eval_pi(&d, 200, Complex64::new(-40.0, 0.0)).unwrap();
        assert!(v.log_scale > 600.0);
        assert!(v.pi.norm().is_finite() && v.pi.norm() > 0.0);
    }

    #[test]
    fn dpii_holds_for_square_symbol() {
        let d = square(1.0, 14);
        for k in 2..=12 {
            assert!(dpii_residual(&d, 1.0, k).unwrap().abs() < 1e-8);
        }
        let d = square(3.0, 10);
        assert!(dpii_residual(&d, 3.0, 5).unwrap().abs() < 1e-8);
        assert!(dpii_residual(&d, 0.0, 5).is_err());
        assert!(dpii_residual(&d, 3.0, 10).is_err());
    }

    #[test]
    fn dpii_fails_for_other_symbols() {
        let s = build_symbol(&ModelSpec::lattice(ModelKind::LatticeA, vec![0.6], vec![0.5])).unwrap();
        let d = build_opuc(&s, 10, PrecisionProfile::Double).unwrap();
        assert!(dpii_residual(&d, 1.0, 2).unwrap().abs() > 1e-3);
    }

    #[test]
    fn recurrences_hold() {
        let r = recurrence_checks(&square(2.0, 20)).unwrap();
        assert!(
            r.a_deviation < 1e-9 && r.d_deviation < 1e-9 && r.det_deviation < 1e-10,
            "{r:?}"
        );
        let s = build_symbol(&ModelSpec::lattice(ModelKind::LatticeA, vec![0.6], vec![0.5])).unwrap();
        let d = build_opuc(&s, 10, PrecisionProfile::Double).unwrap();
        let r = recurrence_checks(&d).unwrap();
        assert!(r.a_deviation < 1e-9 && r.d_deviation < 1e-9, "{r:?}");
        assert!(d.reflection != d.dual_reflection);
    }

    #[test]
    fn multiprecision_agrees_with_double_and_extends_range() {
        let s = SymbolSpec::poisson_square(1.5);
        let a = build_opuc(&s, 20, PrecisionProfile::Double).unwrap();
        let b = build_opuc(&s, 20, PrecisionProfile::Extended).unwrap();
        assert!(b.source.precision_bits >= 128);
        for k in 1..=20 {
            assert!((a.b(k) - b.b(k)).abs() < 1e-12);
        }
        let t = 20.0;
        let d = build_opuc(&SymbolSpec::poisson_square(t), 70, PrecisionProfile::Auto).unwrap();
        for k in 2..70 {
            assert!(dpii_residual(&d, t, k).unwrap().abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn square_edge_decay_and_signs() {
        for t in [1.0f64, 3.0, 6.0] {
            let d = square(t, 60);
            let start = (2.0 * t + 10.0 * t.cbrt() + 10.0).ceil() as usize;
            for k in start..=60 {
                assert!(d.b(k).abs() < 1e-6, "t={t} k={k}");
            }
            let sign = d.b(1).signum();
            for k in 1..=start.min(60) {
                let s = if k % 2 == 1 { d.b(k) } else { -d.b(k) };
                if s != 0.0 {
                    assert_eq!(s.signum(), sign, "t={t} k={k}");
                }
            }
        }
    }

    #[test]
    fn breakdown_is_reported() {
        let c = FourierTable {
            coeffs: vec![0.0, 1.0, 1.0, 1.0, 0.0],
            half_width: 2,
            quadrature_nodes: 0,
            symbol: SymbolSpec::trivial(),
        };
        let e = levinson(&c, 2).unwrap_err();
        assert!(matches!(e, Error::Breakdown { k: 1, .. }), "{e}");
    }

    #[test]
    fn opuc_json_round_trip() {
        let d = square(1.0, 5);
        let s = serde_json::to_string(&d).unwrap();
        let back: OpucData = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn lattice_norm_recurrence(q in 0.0..0.9f64, qp in 0.0..0.9f64, r in 0.0..0.9f64) {
            let s = build_symbol(&ModelSpec::lattice(ModelKind::LatticeA, vec![q, r], vec![qp])).unwrap();
            let d = build_opuc(&s, 12, PrecisionProfile::Auto).unwrap();
            for k in 1..=12 {
                let lhs = (d.log_norm(k) - d.log_norm(k - 1)).exp();
                prop_assert!((lhs - (1.0 - d.b(k) * d.b_dual(k))).abs() < 1e-10);
                prop_assert!((y_corner(&d, k).unwrap().det() - 1.0).abs() < 1e-10);
            }
        }
    }
}

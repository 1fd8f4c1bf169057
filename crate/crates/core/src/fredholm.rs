//! Nyström discretization of the integrable operator `K_k` on the unit circle
//! and the determinant identities linking it to Toeplitz determinants.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opuc::{toeplitz_log_det, y_corner, OpucData};
use crate::symbols::{strong_szego_log_dinf, SymbolSpec};

/// Pivots below this fraction of the largest one are treated as singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-13;

/// Residual threshold of [`identity_checks`].
pub const IDENTITY_TOL: f64 = 1e-6;

/// `K(z,w) = (z^{−k}w^k − ψ(z)/ψ(w)) / (2πi(z−w))` with `ψ = φ₊/φ₋`.
///
/// Plus-indexed factors of the symbol form `φ₊` (so `φ₊(0) = 1`) and
/// minus-indexed factors form `φ₋` (so `φ₋(∞) = 1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrableKernelSpec {
    pub k: usize,
    pub symbol: SymbolSpec,
    pub nodes: usize,
}

impl IntegrableKernelSpec {
    /// Square symbol `e^{t(z+1/z)}`, so `ψ(z) = e^{t(z−1/z)}`.
    pub fn square(t: f64, k: usize, nodes: usize) -> Self {
        Self {
            k,
            symbol: SymbolSpec::poisson_square(t),
            nodes,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nodes < 16 || self.nodes % 2 == 1 {
            return Err(Error::InvalidArgument(format!(
                "Nyström resolution must be even and at least 16 (got {})",
                self.nodes
            )));
        }
        self.symbol.validate()?;
        if !self.symbol.has_zero_winding() {
            return Err(Error::Constraint(
                "the Wiener-Hopf factorization needs all zero and pole parameters below 1".into(),
            ));
        }
        Ok(())
    }

    pub fn phi_plus(&self, z: Complex64) -> Complex64 {
        let s = &self.symbol;
        let mut v = (z * s.exp_plus_t).exp();
        for &q in &s.zeros_plus {
            v *= 1.0 + q * z;
        }
        for &q in &s.poles_plus {
            v /= 1.0 - q * z;
        }
        v
    }

    pub fn phi_minus(&self, z: Complex64) -> Complex64 {
        let s = &self.symbol;
        let zi = z.inv();
        let mut v = (zi * s.exp_minus_t).exp();
        for &q in &s.zeros_minus {
            v *= 1.0 + q * zi;
        }
        for &q in &s.poles_minus {
            v /= 1.0 - q * zi;
        }
        v
    }

    pub fn psi(&self, z: Complex64) -> Complex64 {
        self.phi_plus(z) / self.phi_minus(z)
    }

    /// `ψ′/ψ = φ₊′/φ₊ − φ₋′/φ₋`.
    fn log_psi_prime(&self, z: Complex64) -> Complex64 {
        let s = &self.symbol;
        let z2 = z * z;
        let mut d = Complex64::new(s.exp_plus_t, 0.0) + s.exp_minus_t / z2;
        for &q in &s.zeros_plus {
            d += q / (1.0 + q * z);
        }
        for &q in &s.poles_plus {
            d += q / (1.0 - q * z);
        }
        for &q in &s.zeros_minus {
            d += q / (z2 + q * z);
        }
        for &q in &s.poles_minus {
            d += q / (z2 - q * z);
        }
        d
    }
}

fn node(j: usize, m: usize) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / m as f64)
}

/// Nyström matrix `K(z_i, z_j) · 2πi z_j / m` on `z_j = e^{2πij/m}`.
pub fn kernel_matrix(spec: &IntegrableKernelSpec) -> Result<DMatrix<Complex64>> {
    spec.validate()?;
    let m = spec.nodes;
    let k = spec.k as i32;
    let two_pi_i = Complex64::new(0.0, std::f64::consts::TAU);
    let z: Vec<Complex64> = (0..m).map(|j| node(j, m)).collect();
    let psi: Vec<Complex64> = z.iter().map(|&w| spec.psi(w)).collect();
    let rows: Vec<Vec<Complex64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (0..m)
                .map(|j| {
                    let weight = two_pi_i * z[j] / m as f64;
                    let kij = if i == j {
                        -(k as f64 / z[j] + spec.log_psi_prime(z[j])) / two_pi_i
                    } else {
                        ((z[j] / z[i]).powi(k) - psi[i] / psi[j]) / (two_pi_i * (z[i] - z[j]))
                    };
                    kij * weight
                })
                .collect()
        })
        .collect();
    Ok(DMatrix::from_fn(m, m, |i, j| rows[i][j]))
}

/// `log det(I − K)` by partially pivoted LU, with the argument taken in
/// `(−π, π]`.
pub fn fredholm_log_det(spec: &IntegrableKernelSpec) -> Result<Complex64> {
    let k = kernel_matrix(spec)?;
    let a = DMatrix::<Complex64>::identity(spec.nodes, spec.nodes) - k;
    let lu = a.lu();
    let u = lu.u();
    let pivots: Vec<f64> = (0..spec.nodes).map(|i| u[(i, i)].norm()).collect();
    let big = pivots.iter().copied().fold(0.0, f64::max);
    let small = pivots.iter().copied().fold(f64::INFINITY, f64::min);
    if !(small > SINGULAR_PIVOT_RATIO * big) {
        return Err(Error::Singular {
            modulus: pivots.iter().map(|p| p.ln()).sum::<f64>().exp(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..spec.nodes {
        acc += u[(i, i)].ln();
    }
    // The permutation contributes its sign.
    let det_p = lu.p().determinant::<f64>();
    if det_p < 0.0 {
        acc += Complex64::new(0.0, std::f64::consts::PI);
    }
    let im = acc.im.rem_euclid(std::f64::consts::TAU);
    acc.im = if im > std::f64::consts::PI {
        im - std::f64::consts::TAU
    } else {
        im
    };
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub k: usize,
    /// `Re log det(1 − K_k)`.
    pub log_det: f64,
    pub log_det_imag: f64,
    /// `2^{−k} det(1 − K_k)`.
    pub normalized: f64,
    /// `|log D_k − log D_∞ − (−k log 2 + log det(1 − K_k))|`.
    pub product_residual: f64,
    /// `|−Y_21(0;k) − 2 det(1 − K_{k−1})/det(1 − K_k)|`, relative; absent at `k = 0`.
    pub ratio_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub t: f64,
    pub nodes: usize,
    pub log_dinf: f64,
    pub rows: Vec<IdentityRow>,
    pub max_residual: f64,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.max_residual < IDENTITY_TOL
    }
}

/// Residuals of the ratio and product identities for `k = 0..=k_max`.
pub fn identity_checks(t: f64, k_max: usize, opuc: &OpucData, nodes: usize) -> Result<IdentityReport> {
    let sym = &opuc.source.symbol;
    if opuc.cutoff < k_max {
        return Err(Error::OutOfRange {
            what: "cutoff",
            index: opuc.cutoff as i64,
            allowed: format!(">= k_max = {k_max}"),
        });
    }
    if *sym != SymbolSpec::poisson_square(t) {
        return Err(Error::InvalidArgument(format!(
            "OPUC data must come from the symbol e^{{t(z+1/z)}} with t = {t}"
        )));
    }
    let log_dinf = if t == 0.0 {
        0.0
    } else {
        strong_szego_log_dinf(sym, 64, 512)?.log_dinf
    };
    let log_dets: Vec<Complex64> = (0..=k_max)
        .map(|k| fredholm_log_det(&IntegrableKernelSpec::square(t, k, nodes)))
        .collect::<Result<_>>()?;
    let ln2 = std::f64::consts::LN_2;
    let mut rows = Vec::with_capacity(k_max + 1);
    let mut worst: f64 = 0.0;
    for (k, ld) in log_dets.iter().enumerate() {
        let product_residual = (toeplitz_log_det(opuc, k)? - log_dinf - (-(k as f64) * ln2 + ld.re)).abs();
        worst = worst.max(product_residual).max(ld.im.abs());
        let ratio_residual = if k == 0 {
            None
        } else {
            let lhs = -y_corner(opuc, k)?.a;
            let rhs = 2.0 * (log_dets[k - 1].re - ld.re).exp();
            let r = (lhs - rhs).abs() / lhs.abs();
            worst = worst.max(r);
            Some(r)
        };
        rows.push(IdentityRow {
            k,
            log_det: ld.re,
            log_det_imag: ld.im,
            normalized: (ld.re - k as f64 * ln2).exp(),
            product_residual,
            ratio_residual,
        });
    }
    Ok(IdentityReport {
        t,
        nodes,
        log_dinf,
        rows,
        max_residual: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opuc::{build_opuc, PrecisionProfile};

    #[test]
    fn rejects_bad_resolution() {
        for m in [8, 17, 31] {
            assert!(kernel_matrix(&IntegrableKernelSpec::square(1.0, 0, m)).is_err());
        }
    }

    #[test]
    fn trivial_symbol() {
        let k = kernel_matrix(&IntegrableKernelSpec::square(0.0, 0, 32)).unwrap();
        assert!(k.iter().all(|v| v.norm() < 1e-15));
        for k in 0..5 {
            let ld = fredholm_log_det(&IntegrableKernelSpec::square(0.0, k, 32)).unwrap();
            // D_k = D_∞ = 1, so det(1 − K_k) = 2^k.
            assert!((ld.re - k as f64 * std::f64::consts::LN_2).abs() < 1e-12, "k={k}: {ld}");
        }
    }

    #[test]
    fn zeroth_order_closed_form() {
        let ld = fredholm_log_det(&IntegrableKernelSpec::square(1.0, 0, 64)).unwrap();
        assert!((ld.re + 1.0).abs() < 1e-8 && ld.im.abs() < 1e-8);
    }

    #[test]
    fn resolution_self_convergence() {
        for k in [0, 3, 6, 8] {
            let a = fredholm_log_det(&IntegrableKernelSpec::square(1.0, k, 64)).unwrap();
            let b = fredholm_log_det(&IntegrableKernelSpec::square(1.0, k, 128)).unwrap();
            assert!((a - b).norm() < 1e-10, "k={k}");
            assert!(b.im.abs() < 1e-8);
        }
    }

    #[test]
    fn identities_hold() {
        for t in [1.0, 2.0] {
            let o = build_opuc(&SymbolSpec::poisson_square(t), 30, PrecisionProfile::Auto).unwrap();
            let r = identity_checks(t, 8, &o, 128).unwrap();
            assert!(r.passed(), "t={t}: {}", r.max_residual);
            assert!((r.log_dinf - t * t).abs() < 1e-12);
        }
        let o = build_opuc(&SymbolSpec::poisson_square(0.0), 8, PrecisionProfile::Auto).unwrap();
        assert!(identity_checks(0.0, 8, &o, 32).unwrap().max_residual < 1e-12);
    }

    #[test]
    fn normalized_determinant_tends_to_one() {
        for t in [1.0f64, 2.0] {
            let k0 = (2.0 * t + 15.0).ceil() as usize;
            for k in k0..k0 + 3 {
                let ld = fredholm_log_det(&IntegrableKernelSpec::square(t, k, 128)).unwrap();
                let v = (ld.re - k as f64 * std::f64::consts::LN_2).exp();
                assert!((v - 1.0).abs() < 1e-6, "t={t} k={k}: {v}");
            }
        }
    }

    #[test]
    fn general_factorization_matches_toeplitz() {
        // A lattice-type symbol with rational factors on both sides.
        let s = SymbolSpec {
            zeros_plus: vec![0.4],
            zeros_minus: vec![0.3],
            poles_plus: vec![0.2],
            poles_minus: vec![0.5],
            ..SymbolSpec::default()
        };
        let o = build_opuc(&s, 10, PrecisionProfile::Double).unwrap();
        let dinf = strong_szego_log_dinf(&s, 64, 512).unwrap().log_dinf;
        for k in 0..6 {
            let spec = IntegrableKernelSpec {
                k,
                symbol: s.clone(),
                nodes: 128,
            };
            let ld = fredholm_log_det(&spec).unwrap();
            let lhs = toeplitz_log_det(&o, k).unwrap() - dinf;
            assert!(
                (lhs - (ld.re - k as f64 * std::f64::consts::LN_2)).abs() < 1e-9,
                "k={k}"
            );
        }
    }
}

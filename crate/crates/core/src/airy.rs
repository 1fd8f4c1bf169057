//! Airy function for large positive arguments, in any [`Real`] arithmetic.
//!
//! Used to seed the Hastings–McLeod integration far to the right, where
//! `u ≈ −Ai` up to corrections of order `Ai³`.

use crate::real::Real;

/// `(Ai(x), Ai′(x))` from the large-`x` asymptotic series, truncated at the
/// smallest term. Relative accuracy is about `e^{−(4/3) x^{3/2}}` or the
/// working precision, whichever is larger; intended for `x ≥ 5`.
pub fn airy_asymptotic<T: Real>(x: &T) -> (T, T) {
    let three_halves = x.sqrt() * x.clone();
    let zeta = x.cst(2.0) / x.cst(3.0) * three_halves;
    let pre = (-zeta.clone()).exp() / (x.cst(2.0) * x.pi().sqrt());
    let eps = 2f64.powi(-(x.precision_bits() as i32));
    let zf = zeta.to_f64();
    let mut su = x.one_like();
    let mut sv = x.one_like();
    // Coefficient magnitudes tracked in f64 to decide truncation.
    let mut uk = x.one_like();
    let mut zpow = x.one_like();
    let mut last = 1.0f64;
    for k in 1..1000u32 {
        let kf = f64::from(k);
        let ratio = (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / (216.0 * kf * (2.0 * kf - 1.0));
        let mag = last * ratio / zf;
        if mag >= last || mag < eps {
            break;
        }
        last = mag;
        uk = uk * x.cst(6.0 * kf - 5.0) * x.cst(6.0 * kf - 3.0) * x.cst(6.0 * kf - 1.0)
            / (x.cst(216.0 * kf) * x.cst(2.0 * kf - 1.0));
        zpow = zpow * zeta.clone();
        let vk = -(uk.clone() * x.cst(6.0 * kf + 1.0) / x.cst(6.0 * kf - 1.0));
        let sign = if k % 2 == 1 { x.cst(-1.0) } else { x.one_like() };
        su = su + sign.clone() * uk.clone() / zpow.clone();
        sv = sv + sign * vk / zpow.clone();
    }
    let q = x.sqrt().sqrt();
    let ai = pre.clone() * su / q.clone();
    let aip = -(pre * q * sv);
    (ai, aip)
}

/// `∫_x^∞ Ai(s) ds` from repeated integration by parts, given `Ai(x)` and
/// `Ai′(x)`. Accurate to roughly `Ai(x)·(3k)!/(3^k k! x^{3k})` at the optimal `k`.
pub fn airy_tail_integral<T: Real>(x: &T, ai: &T, aip: &T) -> T {
    // J_n = ∫_x^∞ Ai(s) s^{−n} ds = −Ai′/x^{n+1} − (n+1)Ai/x^{n+2} + (n+1)(n+2) J_{n+3}
    let eps = 2f64.powi(-(x.precision_bits() as i32));
    let mut coeff = x.one_like();
    let mut xp = x.clone();
    let mut acc = x.zero_like();
    let mut last = f64::INFINITY;
    let x3 = x.clone() * x.clone() * x.clone();
    for k in 0..200u32 {
        let n = 3.0 * f64::from(k);
        let term = -(aip.clone() / xp.clone()) - x.cst(n + 1.0) * ai.clone() / (xp.clone() * x.clone());
        let term = coeff.clone() * term;
        let mag = term.abs().to_f64();
        if mag >= last {
            break;
        }
        acc = acc + term;
        if mag <= eps * acc.abs().to_f64() {
            break;
        }
        last = mag;
        coeff = coeff * x.cst((n + 1.0) * (n + 2.0));
        xp = xp * x3.clone();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::MpFloat;

    /// Maclaurin series in high precision, an independent route to Ai.
    fn airy_maclaurin(x: f64, bits: usize) -> (f64, f64) {
        let x = MpFloat::new(x, bits);
        // Ai(0) = 3^{-2/3}/Γ(2/3), Ai′(0) = −3^{-1/3}/Γ(1/3)
        let c1 = x.cst(0.355_028_053_887_817_2);
        let c2 = x.cst(0.258_819_403_792_806_8);
        let mut f = x.one_like();
        let mut g = x.clone();
        let mut fd = x.zero_like();
        let mut gd = x.one_like();
        let mut tf = x.one_like();
        let mut tg = x.clone();
        let x3 = x.clone() * x.clone() * x.clone();
        for k in 1..400 {
            let k3 = 3.0 * k as f64;
            tf = tf * x3.clone() / x.cst((k3 - 1.0) * k3);
            tg = tg * x3.clone() / x.cst(k3 * (k3 + 1.0));
            f = f + tf.clone();
            g = g + tg.clone();
            fd = fd + tf.clone() * x.cst(k3) / x.clone();
            gd = gd + tg.clone() * x.cst(k3 + 1.0) / x.clone();
        }
        let ai = c1.clone() * f - c2.clone() * g;
        let aip = c1 * fd - c2 * gd;
        (ai.to_f64(), aip.to_f64())
    }

    #[test]
    fn asymptotic_matches_maclaurin() {
        // Ai(0) and Ai′(0) carry only double precision, so cancellation against
        // the growing Bi component limits this comparison to moderate x.
        for x in [5.0, 6.0] {
            let (a, ap) = airy_asymptotic(&x);
            let (b, bp) = airy_maclaurin(x, 256);
            assert!(((a - b) / b).abs() < 1e-6, "x={x}: {a} vs {b}");
            assert!(((ap - bp) / bp).abs() < 1e-6);
        }
    }

    #[test]
    fn tabulated_values() {
        let (a, ap) = airy_asymptotic(&8.0f64);
        assert!((a / 4.692_207_616_099_224e-8 - 1.0).abs() < 1e-12);
        assert!((ap / -1.341_439_297_906_784_4e-7 - 1.0).abs() < 1e-12);
        let (a, ap) = airy_asymptotic(&MpFloat::new(16.0, 192));
        assert!((a.to_f64() / 4.156_888_828_917_035e-20 - 1.0).abs() < 1e-14);
        assert!((ap.to_f64() / -1.669_188_676_838_185e-19 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tail_integral_against_quadrature() {
        let x = 8.0f64;
        let (a, ap) = airy_asymptotic(&x);
        let tail = airy_tail_integral(&x, &a, &ap);
        // Trapezoid on a fine grid of the asymptotic Ai.
        let h = 1e-3;
        let mut s = 0.5 * a;
        for i in 1..20_000 {
            s += airy_asymptotic(&(x + i as f64 * h)).0;
        }
        s *= h;
        assert!((tail / s - 1.0).abs() < 1e-6, "{tail} vs {s}");
    }
}

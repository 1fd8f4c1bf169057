//! F_GUE(s) = det(I − K_Ai) on L²(s, ∞) by Gauss–Legendre Nyström, using
//! only f64 and its own Airy evaluations.

use std::f64::consts::PI;

/// Ai and Ai' from the Maclaurin series for x ≤ 5, asymptotic series beyond.
pub fn airy(x: f64) -> (f64, f64) {
    if x <= 5.0 {
        airy_series(x)
    } else {
        airy_large(x)
    }
}

fn airy_series(x: f64) -> (f64, f64) {
    // Ai = c1 f − c2 g with f = Σ 3^k (1/3)_k x^{3k}/(3k)!, g = Σ 3^k (2/3)_k x^{3k+1}/(3k+1)!.
    let c1 = 0.355_028_053_887_817_2;
    let c2 = 0.258_819_403_792_806_8;
    if x == 0.0 {
        return (c1, -c2);
    }
    let (mut f, mut g, mut fp, mut gp) = (0.0, 0.0, 0.0, 0.0);
    let mut tf = 1.0;
    let mut tg = x;
    let x3 = x * x * x;
    for k in 0..200 {
        let kf = k as f64;
        f += tf;
        g += tg;
        fp += tf * 3.0 * kf / x;
        gp += tg * (3.0 * kf + 1.0) / x;
        let nf = tf * x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        let ng = tg * x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        tf = nf;
        tg = ng;
        if tf.abs() < 1e-18 * f.abs().max(1e-300) && tg.abs() < 1e-18 * g.abs().max(1e-300) && k > 4 {
            break;
        }
    }
    (c1 * f - c2 * g, c1 * fp - c2 * gp)
}

fn airy_large(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let (mut sa, mut sb) = (0.0, 0.0);
    let mut u = 1.0;
    let mut zk = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..40 {
        let kf = k as f64;
        if k > 0 {
            u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
            zk *= -zeta;
        }
        let v = if k == 0 {
            1.0
        } else {
            -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u
        };
        let term = u / zk;
        if term.abs() > last {
            break;
        }
        last = term.abs();
        sa += term;
        sb += v / zk;
    }
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    (e * x.powf(-0.25) * sa, -e * x.powf(0.25) * sb)
}

/// Gauss–Legendre nodes and weights on [a, b].
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = 0.5 * (b - a) * z + 0.5 * (b + a);
        ws[i] = (b - a) / ((1.0 - z * z) * dp * dp);
    }
    (xs, ws)
}

fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        let piv = m[c][c];
        d *= piv;
        for r in c + 1..n {
            let f = m[r][c] / piv;
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    d
}

/// det(I − K_Ai) on (s, s + 16) with `n` nodes.
pub fn f_gue_fredholm(s: f64, n: usize) -> f64 {
    let (xs, ws) = gauss_legendre(n, s, s + 16.0);
    let a: Vec<(f64, f64)> = xs.iter().map(|&x| airy(x)).collect();
    let k = |i: usize, j: usize| {
        let (ai, api) = a[i];
        let (aj, apj) = a[j];
        if i == j {
            api * api - xs[i] * ai * ai
        } else {
            (ai * apj - api * aj) / (xs[i] - xs[j])
        }
    };
    let m = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (i == j) as u8 as f64 - ws[i].sqrt() * k(i, j) * ws[j].sqrt())
                .collect()
        })
        .collect();
    det(m)
}

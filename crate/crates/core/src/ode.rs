//! Adaptive Runge–Kutta–Fehlberg 7(8) integration in any [`Real`] arithmetic.

use crate::error::{Error, Result};
use crate::real::Real;

const STAGES: usize = 13;

const C: [(i64, i64); STAGES] = [
    (0, 1),
    (2, 27),
    (1, 9),
    (1, 6),
    (5, 12),
    (1, 2),
    (5, 6),
    (1, 6),
    (2, 3),
    (1, 3),
    (1, 1),
    (0, 1),
    (1, 1),
];

#[rustfmt::skip]
const A: [&[(i64, i64)]; STAGES] = [
    &[],
    &[(2, 27)],
    &[(1, 36), (1, 12)],
    &[(1, 24), (0, 1), (1, 8)],
    &[(5, 12), (0, 1), (-25, 16), (25, 16)],
    &[(1, 20), (0, 1), (0, 1), (1, 4), (1, 5)],
    &[(-25, 108), (0, 1), (0, 1), (125, 108), (-65, 27), (125, 54)],
    &[(31, 300), (0, 1), (0, 1), (0, 1), (61, 225), (-2, 9), (13, 900)],
    &[(2, 1), (0, 1), (0, 1), (-53, 6), (704, 45), (-107, 9), (67, 90), (3, 1)],
    &[(-91, 108), (0, 1), (0, 1), (23, 108), (-976, 135), (311, 54), (-19, 60), (17, 6), (-1, 12)],
    &[(2383, 4100), (0, 1), (0, 1), (-341, 164), (4496, 1025), (-301, 82), (2133, 4100), (45, 82), (45, 164), (18, 41)],
    &[(3, 205), (0, 1), (0, 1), (0, 1), (0, 1), (-6, 41), (-3, 205), (-3, 41), (3, 41), (6, 41), (0, 1)],
    &[(-1777, 4100), (0, 1), (0, 1), (-341, 164), (4496, 1025), (-289, 82), (2193, 4100), (51, 82), (33, 164), (12, 41), (0, 1), (1, 1)],
];

/// Eighth-order weights; the embedded seventh-order solution differs by
/// `(41/840)(k₀ + k₁₀ − k₁₁ − k₁₂)·h`.
const B8: [(i64, i64); STAGES] = [
    (0, 1),
    (0, 1),
    (0, 1),
    (0, 1),
    (0, 1),
    (34, 105),
    (9, 35),
    (9, 35),
    (9, 280),
    (9, 280),
    (0, 1),
    (41, 840),
    (41, 840),
];

/// Tableau converted to the working arithmetic once.
pub struct Rkf78<T> {
    c: Vec<T>,
    a: Vec<Vec<Option<T>>>,
    b: Vec<Option<T>>,
    e: T,
}

fn ratio<T: Real>(proto: &T, (n, d): (i64, i64)) -> T {
    proto.cst(n as f64) / proto.cst(d as f64)
}

impl<T: Real> Rkf78<T> {
    pub fn new(proto: &T) -> Self {
        let nz = |r: (i64, i64)| (r.0 != 0).then(|| ratio(proto, r));
        Self {
            c: C.iter().map(|&r| ratio(proto, r)).collect(),
            a: A.iter().map(|row| row.iter().map(|&r| nz(r)).collect()).collect(),
            b: B8.iter().map(|&r| nz(r)).collect(),
            e: ratio(proto, (41, 840)),
        }
    }

    /// One step of size `h` (which may be negative). Returns the
    /// eighth-order solution and the componentwise local error estimate.
    pub fn step<F>(&self, f: &F, x: &T, y: &[T], h: &T) -> (Vec<T>, Vec<T>)
    where
        F: Fn(&T, &[T]) -> Vec<T>,
    {
        let n = y.len();
        let mut k: Vec<Vec<T>> = Vec::with_capacity(STAGES);
        for s in 0..STAGES {
            let xs = x.clone() + self.c[s].clone() * h.clone();
            let ys: Vec<T> = (0..n)
                .map(|i| {
                    let mut acc = x.zero_like();
                    for (j, a) in self.a[s].iter().enumerate() {
                        if let Some(a) = a {
                            acc = acc + a.clone() * k[j][i].clone();
                        }
                    }
                    y[i].clone() + h.clone() * acc
                })
                .collect();
            k.push(f(&xs, &ys));
        }
        let y_new = (0..n)
            .map(|i| {
                let mut acc = x.zero_like();
                for (j, b) in self.b.iter().enumerate() {
                    if let Some(b) = b {
                        acc = acc + b.clone() * k[j][i].clone();
                    }
                }
                y[i].clone() + h.clone() * acc
            })
            .collect();
        let err = (0..n)
            .map(|i| {
                self.e.clone() * (k[0][i].clone() + k[10][i].clone() - k[11][i].clone() - k[12][i].clone()) * h.clone()
            })
            .collect();
        (y_new, err)
    }
}

/// Integration controls. The local error of every component is kept below
/// `tol · max(|y_i|, floor)`.
#[derive(Clone, Copy, Debug)]
pub struct Controls {
    pub tol: f64,
    pub floor: f64,
    pub initial_step: f64,
    pub min_step: f64,
}

/// Integrates from `x0` through the targets `xs` (monotone, all on the same
/// side of `x0`), landing exactly on each. `guard` may abort the integration
/// after any accepted step. Returns the state at each target.
pub fn integrate_to<T, F, G>(f: &F, x0: &T, y0: Vec<T>, targets: &[T], ctl: Controls, guard: &G) -> Result<Vec<Vec<T>>>
where
    T: Real,
    F: Fn(&T, &[T]) -> Vec<T>,
    G: Fn(&T, &[T]) -> Result<()>,
{
    let rk = Rkf78::new(x0);
    let mut x = x0.clone();
    let mut y = y0;
    let mut h = ctl.initial_step.abs();
    let mut out = Vec::with_capacity(targets.len());
    let floor = x0.cst(ctl.floor);
    for target in targets {
        let dir = if *target < x { -1.0 } else { 1.0 };
        loop {
            let remaining = (target.clone() - x.clone()).abs();
            if remaining.to_f64() == 0.0 {
                break;
            }
            let last = h >= remaining.to_f64();
            let hs = if last { remaining } else { x.cst(h) } * x.cst(dir);
            let (y_new, err) = rk.step(f, &x, &y, &hs);
            let mut worst = 0.0f64;
            for i in 0..y.len() {
                let mut scale = y_new[i].abs();
                if scale < floor {
                    scale = floor.clone();
                }
                let r = (err[i].abs() / scale).to_f64() / ctl.tol;
                worst = worst.max(if r.is_nan() { f64::INFINITY } else { r });
            }
            let hf = hs.abs().to_f64();
            if worst <= 1.0 {
                x = if last { target.clone() } else { x + hs };
                y = y_new;
                guard(&x, &y)?;
                let grow = if worst == 0.0 {
                    4.0
                } else {
                    (0.9 * worst.powf(-1.0 / 8.0)).min(4.0)
                };
                // A step shortened to land on a target says nothing about the
                // admissible size.
                if !last {
                    h = hf * grow;
                } else {
                    h = h.max(hf * grow);
                }
            } else {
                h = hf * (0.9 * worst.powf(-1.0 / 8.0)).max(0.1);
            }
            if h < ctl.min_step {
                return Err(Error::StepUnderflow { x: x.to_f64() });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

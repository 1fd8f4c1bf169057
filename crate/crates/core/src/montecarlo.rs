//! Simulation of every model in the catalog, plus brute-force oracles.
//!
//! Trials are split into fixed chunks of [`CHUNK`]; chunk `c` draws from the
//! ChaCha8 stream `c` of the run seed. Counts are merged by integer addition,
//! so results do not depend on the number of workers.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbols::{ModelKind, ModelSpec, SymbolSpec};

/// Trials per random stream.
pub const CHUNK: u64 = 4096;

/// Largest `N` accepted by [`brute_force_lis_distribution`].
pub const BRUTE_FORCE_MAX_N: usize = 8;

/// Largest `ℓ` accepted by [`haar_orthogonal_expectation`].
pub const HAAR_MAX_ELL: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub model: ModelSpec,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

/// Counts of the simulated values of `L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    pub counts: BTreeMap<usize, u64>,
    pub trials: u64,
}

impl EmpiricalCdf {
    pub fn max_value(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    /// Empirical `P(L ≤ ℓ)`.
    pub fn cdf(&self, ell: usize) -> f64 {
        let c: u64 = self.counts.range(..=ell).map(|(_, c)| c).sum();
        c as f64 / self.trials as f64
    }

    /// Binomial standard error of [`EmpiricalCdf::cdf`].
    pub fn stderr(&self, ell: usize) -> f64 {
        let p = self.cdf(ell);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn mean(&self) -> f64 {
        let s: f64 = self.counts.iter().map(|(&v, &c)| v as f64 * c as f64).sum();
        s / self.trials as f64
    }

    /// `value,count,cdf,stderr` for every value from 0 to the maximum seen.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("value,count,cdf,stderr\n");
        for v in 0..=self.max_value() {
            let c = self.counts.get(&v).copied().unwrap_or(0);
            s.push_str(&format!("{v},{c},{:.17e},{:.17e}\n", self.cdf(v), self.stderr(v)));
        }
        s
    }
}

/// One row of an exact-vs-simulated comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossRow {
    pub ell: usize,
    pub exact: f64,
    pub empirical: f64,
    /// `sqrt(p(1−p)/n)` at the exact `p`.
    pub stderr: f64,
    pub z: f64,
    pub pass: bool,
}

/// Compares at every `ℓ` whose exact mass lies in `(lo, hi)`; other rows are
/// reported but always pass.
pub fn cross_check(emp: &EmpiricalCdf, exact: &[(usize, f64)], sigmas: f64, lo: f64, hi: f64) -> Vec<CrossRow> {
    exact
        .iter()
        .map(|&(ell, p)| {
            let e = emp.cdf(ell);
            let se = (p * (1.0 - p) / emp.trials as f64).sqrt();
            let z = if se > 0.0 { (e - p).abs() / se } else { 0.0 };
            let tested = p > lo && p < hi;
            CrossRow {
                ell,
                exact: p,
                empirical: e,
                stderr: se,
                z,
                pass: !tested || z <= sigmas,
            }
        })
        .collect()
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {workers} workers: {e}")))
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `trials` draws of `sample` in deterministic chunks.
pub fn simulate<F>(trials: u64, seed: u64, workers: usize, sample: F) -> Result<EmpiricalCdf>
where
    F: Fn(&mut ChaCha8Rng) -> usize + Sync,
{
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<BTreeMap<usize, u64>> = pool(workers)?.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = chunk_rng(seed, c);
                let n = CHUNK.min(trials - c * CHUNK);
                let mut m = BTreeMap::new();
                for _ in 0..n {
                    *m.entry(sample(&mut rng)).or_insert(0) += 1;
                }
                m
            })
            .collect()
    });
    let mut counts = BTreeMap::new();
    for p in parts {
        for (v, c) in p {
            *counts.entry(v).or_insert(0) += c;
        }
    }
    Ok(EmpiricalCdf { counts, trials })
}

/// Length of the longest strictly increasing subsequence (patience sorting).
pub fn lis_strict<T: PartialOrd + Copy>(seq: &[T]) -> usize {
    let mut tops: Vec<T> = Vec::new();
    for &x in seq {
        let i = tops.partition_point(|t| *t < x);
        if i == tops.len() {
            tops.push(x);
        } else {
            tops[i] = x;
        }
    }
    tops.len()
}

/// Length of the longest nondecreasing subsequence.
pub fn lis_weak<T: PartialOrd + Copy>(seq: &[T]) -> usize {
    let mut tops: Vec<T> = Vec::new();
    for &x in seq {
        let i = tops.partition_point(|t| *t <= x);
        if i == tops.len() {
            tops.push(x);
        } else {
            tops[i] = x;
        }
    }
    tops.len()
}

/// Quadratic-time reference for [`lis_strict`].
pub fn lis_quadratic<T: PartialOrd>(seq: &[T]) -> usize {
    let mut best = vec![1usize; seq.len()];
    for i in 0..seq.len() {
        for j in 0..i {
            if seq[j] < seq[i] {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

fn poisson<R: Rng>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive finite mean").sample(rng) as usize
}

/// Sort points by the first key and measure a strict chain in the second.
fn chain_length<K: PartialOrd + Copy>(mut pts: Vec<(K, K)>) -> usize {
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite coordinates"));
    let ys: Vec<K> = pts.into_iter().map(|p| p.1).collect();
    lis_strict(&ys)
}

pub fn sample_poisson_square<R: Rng>(t: f64, rng: &mut R) -> usize {
    let n = poisson(t * t, rng);
    let pts = (0..n).map(|_| (rng.gen::<f64>() * t, rng.gen::<f64>() * t)).collect();
    chain_length(pts)
}

/// Rate-1 points in `{0 ≤ y < x ≤ t}` and a rate-α process on `y = x`.
pub fn sample_triangle<R: Rng>(t: f64, alpha: f64, rng: &mut R) -> usize {
    let bulk = poisson(0.5 * t * t, rng);
    let diag = poisson(alpha * t, rng);
    let mut pts = Vec::with_capacity(bulk + diag);
    for _ in 0..bulk {
        let (u, v) = (rng.gen::<f64>() * t, rng.gen::<f64>() * t);
        pts.push((u.max(v), u.min(v)));
    }
    for _ in 0..diag {
        let s = rng.gen::<f64>() * t;
        pts.push((s, s));
    }
    chain_length(pts)
}

/// Square model with rate-α₊ points on `y = 0` and rate-α₋ points on `x = 0`.
///
/// Coordinates are compared lexicographically as `(value, offset)` pairs: a
/// point at `s` on `y = 0` sits at `x = (s, 0)`, `y = (0, s)`, so the points on
/// one axis form a chain, as they do on the line itself.
pub fn sample_external<R: Rng>(t: f64, a_plus: f64, a_minus: f64, rng: &mut R) -> usize {
    let bulk = poisson(t * t, rng);
    let bottom = poisson(a_plus * t, rng);
    let left = poisson(a_minus * t, rng);
    let mut pts = Vec::with_capacity(bulk + bottom + left);
    for _ in 0..bulk {
        pts.push(((rng.gen::<f64>() * t, 0.0), (rng.gen::<f64>() * t, 0.0)));
    }
    for _ in 0..bottom {
        let s = rng.gen::<f64>() * t;
        pts.push(((s, 0.0), (0.0, s)));
    }
    for _ in 0..left {
        let s = rng.gen::<f64>() * t;
        pts.push(((0.0, s), (s, 0.0)));
    }
    chain_length(pts)
}

/// Points of rate `t q_i` on line `i`; the path reads line indices in order
/// of position, nondecreasing for (d) and strictly increasing for (e).
pub fn sample_lines<R: Rng>(t: f64, rates: &[f64], strict: bool, rng: &mut R) -> usize {
    let mut pts: Vec<(f64, usize)> = Vec::new();
    for (i, &q) in rates.iter().enumerate() {
        for _ in 0..poisson(t * q, rng) {
            pts.push((rng.gen::<f64>() * t, i));
        }
    }
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite positions"));
    let lines: Vec<usize> = pts.into_iter().map(|p| p.1).collect();
    if strict {
        lis_strict(&lines)
    } else {
        lis_weak(&lines)
    }
}

/// `P(k) = (1 − r) r^k`.
pub fn sample_geometric<R: Rng>(r: f64, rng: &mut R) -> u64 {
    if r <= 0.0 {
        return 0;
    }
    Geometric::new(1.0 - r).expect("ratio in [0,1)").sample(rng)
}

/// `P(1) = r/(1 + r)`.
pub fn sample_bernoulli<R: Rng>(r: f64, rng: &mut R) -> u64 {
    u64::from(rng.gen::<f64>() < r / (1.0 + r))
}

/// The diagonal law `P(k) = (1 − q²)/(1 + αq) · α^{k mod 2} q^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GPrime {
    pub alpha: f64,
    pub q: f64,
}

impl GPrime {
    pub fn new(alpha: f64, q: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0 && (0.0..1.0).contains(&q)) {
            return Err(Error::Constraint(format!(
                "g' needs α ≥ 0 and 0 ≤ q < 1 (got α = {alpha}, q = {q})"
            )));
        }
        let law = Self { alpha, q };
        let total: f64 = (0..4000).map(|k| law.pmf(k)).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Constraint(format!("g'({alpha}, {q}) sums to {total}, not 1")));
        }
        Ok(law)
    }

    pub fn pmf(&self, k: u64) -> f64 {
        let odd = if k % 2 == 1 { self.alpha } else { 1.0 };
        (1.0 - self.q * self.q) / (1.0 + self.alpha * self.q) * odd * self.q.powi(k as i32)
    }

    /// `k = 2j + b` with `P(b = 1) = αq/(1 + αq)` and `j ~ g(q²)`.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        let aq = self.alpha * self.q;
        let b = u64::from(rng.gen::<f64>() < aq / (1.0 + aq));
        2 * sample_geometric(self.q * self.q, rng) + b
    }
}

/// Path rules of the lattice models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathRule {
    /// Weakly up and weakly right; weights summed.
    WeakWeak,
    /// Weakly up, strictly right (one cell per column); weights summed.
    WeakStrict,
    /// Strictly up and strictly right; occupied cells counted.
    StrictStrict,
}

/// Last-passage value of `x` (row-major, `m × n`) under `rule`, in `O(mn)`.
pub fn lattice_lpp(x: &[u64], m: usize, n: usize, rule: PathRule) -> u64 {
    let at = |i: usize, j: usize| x[i * n + j];
    match rule {
        PathRule::WeakWeak => {
            let mut l = vec![0u64; m * n];
            for i in 0..m {
                for j in 0..n {
                    let up = if i > 0 { l[(i - 1) * n + j] } else { 0 };
                    let left = if j > 0 { l[i * n + j - 1] } else { 0 };
                    l[i * n + j] = at(i, j) + up.max(left);
                }
            }
            l[m * n - 1]
        }
        PathRule::WeakStrict | PathRule::StrictStrict => {
            // best[i][j] = max path value over cells (i', j') with i' ≤ i, j' ≤ j.
            let mut best = vec![0u64; (m + 1) * (n + 1)];
            let w = n + 1;
            for i in 0..m {
                for j in 0..n {
                    let gain = match rule {
                        PathRule::StrictStrict => u64::from(at(i, j) > 0),
                        _ => at(i, j),
                    };
                    let before = match rule {
                        PathRule::StrictStrict => best[i * w + j],
                        _ => best[(i + 1) * w + j],
                    };
                    let here = gain + before;
                    best[(i + 1) * w + j + 1] = here.max(best[i * w + j + 1]).max(best[(i + 1) * w + j]);
                }
            }
            best[m * w + n]
        }
    }
}

/// Reference `O((mn)²)` strict/strict value.
pub fn lattice_strict_naive(x: &[u64], m: usize, n: usize) -> u64 {
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let mut l = vec![0u64; cells.len()];
    for (a, &(i, j)) in cells.iter().enumerate() {
        let mut best = 0;
        for (b, &(p, q)) in cells[..a].iter().enumerate() {
            if p < i && q < j {
                best = best.max(l[b]);
            }
        }
        l[a] = best + u64::from(x[i * n + j] > 0);
    }
    l.into_iter().max().unwrap_or(0)
}

pub fn sample_lattice_array<R: Rng>(model: &ModelSpec, rng: &mut R) -> Vec<u64> {
    let (m, n) = (model.row_params.len(), model.col_params.len());
    let mut x = Vec::with_capacity(m * n);
    for &a in &model.row_params {
        for &b in &model.col_params {
            let r = a * b;
            x.push(match model.kind {
                ModelKind::LatticeB => sample_bernoulli(r, rng),
                _ => sample_geometric(r, rng),
            });
        }
    }
    x
}

fn lattice_rule(kind: ModelKind) -> PathRule {
    match kind {
        ModelKind::LatticeA | ModelKind::SymmetricLatticeA => PathRule::WeakWeak,
        ModelKind::LatticeB => PathRule::WeakStrict,
        _ => PathRule::StrictStrict,
    }
}

pub fn sample_lattice<R: Rng>(model: &ModelSpec, rng: &mut R) -> usize {
    let x = sample_lattice_array(model, rng);
    lattice_lpp(
        &x,
        model.row_params.len(),
        model.col_params.len(),
        lattice_rule(model.kind),
    ) as usize
}

/// Symmetric `N × N` array: `X(i,j) = X(j,i) ~ g(q_i q_j)` off the diagonal;
/// the diagonal is `g(α q_i)` for (a-S) and `g′(α, q_i)` for (c-S).
pub fn sample_symmetric_array<R: Rng>(model: &ModelSpec, diag: &[GPrime], rng: &mut R) -> Vec<u64> {
    let q = &model.row_params;
    let n = q.len();
    let mut x = vec![0u64; n * n];
    for i in 0..n {
        x[i * n + i] = match model.kind {
            ModelKind::SymmetricLatticeA => sample_geometric(model.alpha * q[i], rng),
            _ => diag[i].sample(rng),
        };
        for j in (i + 1)..n {
            let v = sample_geometric(q[i] * q[j], rng);
            x[i * n + j] = v;
            x[j * n + i] = v;
        }
    }
    x
}

fn symmetric_diag(model: &ModelSpec) -> Result<Vec<GPrime>> {
    if model.kind == ModelKind::SymmetricLatticeC {
        model.row_params.iter().map(|&q| GPrime::new(model.alpha, q)).collect()
    } else {
        Ok(Vec::new())
    }
}

pub fn symmetrized_lattice_sample<R: Rng>(model: &ModelSpec, rng: &mut R) -> Result<usize> {
    let diag = symmetric_diag(model)?;
    let n = model.row_params.len();
    let x = sample_symmetric_array(model, &diag, rng);
    Ok(lattice_lpp(&x, n, n, lattice_rule(model.kind)) as usize)
}

/// Simulates `config.model`.
pub fn run(config: &SimConfig) -> Result<EmpiricalCdf> {
    use ModelKind::*;
    let m = &config.model;
    m.validate()?;
    let (n, seed, w) = (config.trials, config.seed, config.workers);
    match m.kind {
        PoissonSquare => simulate(n, seed, w, |r| sample_poisson_square(m.t, r)),
        PoissonTriangle | TrianglePoissonFS => simulate(n, seed, w, |r| sample_triangle(m.t, m.alpha, r)),
        PoissonExternal => simulate(n, seed, w, |r| sample_external(m.t, m.alpha_plus, m.alpha_minus, r)),
        LatticeA | LatticeB | LatticeC => simulate(n, seed, w, |r| sample_lattice(m, r)),
        PoissonLinesD => simulate(n, seed, w, |r| sample_lines(m.t, &m.row_params, false, r)),
        PoissonLinesE => simulate(n, seed, w, |r| sample_lines(m.t, &m.row_params, true, r)),
        SymmetricLatticeA | SymmetricLatticeC => {
            let diag = symmetric_diag(m)?;
            let k = m.row_params.len();
            let rule = lattice_rule(m.kind);
            simulate(n, seed, w, |r| {
                lattice_lpp(&sample_symmetric_array(m, &diag, r), k, k, rule) as usize
            })
        }
    }
}

/// `counts[L]` = number of permutations of `S_N` with longest increasing
/// subsequence `L`.
pub fn brute_force_lis_distribution(n: usize) -> Result<Vec<u64>> {
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::OutOfRange {
            what: "N",
            index: n as i64,
            allowed: format!("0..={BRUTE_FORCE_MAX_N}"),
        });
    }
    let mut counts = vec![0u64; n + 1];
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        counts[lis_strict(&p)] += 1;
        // Next permutation in lexicographic order.
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            break;
        };
        let j = (i..n)
            .rev()
            .find(|&j| p[j] > p[i - 1])
            .expect("a larger element exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    Ok(counts)
}

/// `#{π ∈ S_N : LIS(π) ≤ ℓ} = Σ_{λ ⊢ N, λ₁ ≤ ℓ} (f^λ)²` through the
/// Robinson–Schensted correspondence, with `f^λ` from the hook-length formula.
/// Exact for `N ≤ 30`.
pub fn lis_count_via_tableaux(n: usize, ell: usize) -> Result<u128> {
    if n > 30 {
        return Err(Error::OutOfRange {
            what: "N",
            index: n as i64,
            allowed: "0..=30".into(),
        });
    }
    fn partitions(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            partitions(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    partitions(n, ell.min(n), &mut Vec::new(), &mut all);
    let fact: u128 = (1..=n as u128).product();
    let mut total = 0u128;
    for lam in all {
        let conj: Vec<usize> = (0..lam.first().copied().unwrap_or(0))
            .map(|j| lam.iter().filter(|&&r| r > j).count())
            .collect();
        let mut hooks = 1u128;
        for (i, &r) in lam.iter().enumerate() {
            for j in 0..r {
                hooks *= (r - j + conj[j] - i - 1) as u128;
            }
        }
        let f = fact / hooks;
        total += f * f;
    }
    Ok(total)
}

/// `Σ_{N ≤ n_max} e^{−t²} t^{2N}/N! · P(LIS_N ≤ ℓ)` and the neglected Poisson
/// mass. Counts come from enumeration of `S_N` for `N ≤ 8` and from
/// [`lis_count_via_tableaux`] beyond.
pub fn poissonized_square_oracle(t: f64, ell: usize, n_max: usize) -> Result<(f64, f64)> {
    let mut sum = 0.0;
    let mut weight = (-t * t).exp();
    let mut used = 0.0;
    let mut fact = 1.0f64;
    for n in 0..=n_max {
        if n > 0 {
            weight *= t * t / n as f64;
            fact *= n as f64;
        }
        let frac = if n <= BRUTE_FORCE_MAX_N {
            let counts = brute_force_lis_distribution(n)?;
            counts.iter().take(ell + 1).sum::<u64>() as f64 / fact
        } else {
            lis_count_via_tableaux(n, ell)? as f64 / fact
        };
        sum += weight * frac;
        used += weight;
    }
    Ok((sum, (1.0 - used).max(0.0)))
}

/// Haar-distributed element of `O(ℓ)`: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal moved into `Q`.
pub fn sample_haar_orthogonal<R: Rng>(ell: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(ell, ell, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..ell {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `det ψ(U) = e^{t tr U} ∏ det(1 + aU) / ∏ det(1 − qU)` for a one-sided `ψ`.
pub fn det_psi(psi: &SymbolSpec, u: &DMatrix<f64>) -> f64 {
    let n = u.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut v = (psi.exp_plus_t * u.trace()).exp();
    for &a in &psi.zeros_plus {
        v *= (&id + u * a).determinant();
    }
    for &q in &psi.poles_plus {
        v /= (&id - u * q).determinant();
    }
    v
}

/// Monte Carlo estimate of `E_{U∈O(ℓ)} det ψ(U)` with its standard error.
pub fn haar_orthogonal_expectation(
    psi: &SymbolSpec,
    ell: usize,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<(f64, f64)> {
    if ell > HAAR_MAX_ELL {
        return Err(Error::OutOfRange {
            what: "ell",
            index: ell as i64,
            allowed: format!("0..={HAAR_MAX_ELL}"),
        });
    }
    if trials < 2 {
        return Err(Error::InvalidArgument("at least two samples are needed".into()));
    }
    if ell == 0 {
        return Ok((1.0, 0.0));
    }
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<(f64, f64)> = pool(workers)?.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = chunk_rng(seed, c);
                let n = CHUNK.min(trials - c * CHUNK);
                let (mut s, mut s2) = (0.0, 0.0);
                for _ in 0..n {
                    let v = det_psi(psi, &sample_haar_orthogonal(ell, &mut rng));
                    s += v;
                    s2 += v * v;
                }
                (s, s2)
            })
            .collect()
    });
    let (s, s2) = parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = trials as f64;
    let mean = s / n;
    let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

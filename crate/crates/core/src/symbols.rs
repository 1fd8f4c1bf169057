//! Symbols of the percolation models, their Fourier coefficients and the
//! normalization constants `Z`.
//!
//! A symbol is a function on the unit circle of the form
//!
//! ```text
//! φ(z) = exp(t₊ z + t₋ / z) · ∏(1 + a z) ∏(1 + b / z) / (∏(1 − c z) ∏(1 − d / z))
//! ```
//!
//! with nonnegative real parameters. Fourier coefficients follow the
//! convention `φ_j = (1/2π) ∫ φ(e^{iθ}) e^{−ijθ} dθ` and the Toeplitz matrix of
//! size ℓ is `(φ_{j−k})_{0≤j,k<ℓ}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{Cx, Real};

/// Structured description of a symbol on the unit circle.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    /// Coefficient of `z` in the exponent.
    pub exp_plus_t: f64,
    /// Coefficient of `1/z` in the exponent.
    pub exp_minus_t: f64,
    /// Factors `(1 + q z)`.
    pub zeros_plus: Vec<f64>,
    /// Factors `(1 + q / z)`.
    pub zeros_minus: Vec<f64>,
    /// Factors `(1 − q z)^{-1}`.
    pub poles_plus: Vec<f64>,
    /// Factors `(1 − q / z)^{-1}`.
    pub poles_minus: Vec<f64>,
}

impl SymbolSpec {
    /// The constant symbol `φ ≡ 1`.
    pub fn trivial() -> Self {
        Self::default()
    }

    /// `φ(z) = e^{t(z + 1/z)}`.
    pub fn poisson_square(t: f64) -> Self {
        Self {
            exp_plus_t: t,
            exp_minus_t: t,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.exp_plus_t, self.exp_minus_t]
            .into_iter()
            .chain(self.zeros_plus.iter().copied())
            .chain(self.zeros_minus.iter().copied())
            .chain(self.poles_plus.iter().copied())
            .chain(self.poles_minus.iter().copied());
        for p in all {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Constraint(format!(
                    "symbol parameters must be finite and nonnegative (got {p})"
                )));
            }
        }
        for &q in self.poles_plus.iter().chain(&self.poles_minus) {
            if q >= 1.0 {
                return Err(Error::Constraint(format!(
                    "pole parameter {q} must lie in [0,1) so that φ is continuous on |z|=1"
                )));
            }
        }
        Ok(())
    }

    /// True when `φ(1/z) = φ(z)`, i.e. the Toeplitz matrix is symmetric.
    pub fn is_reflection_symmetric(&self) -> bool {
        fn same(a: &[f64], b: &[f64]) -> bool {
            let mut a = a.to_vec();
            let mut b = b.to_vec();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            a == b
        }
        self.exp_plus_t == self.exp_minus_t
            && same(&self.zeros_plus, &self.zeros_minus)
            && same(&self.poles_plus, &self.poles_minus)
    }

    /// Applies `z ↦ c z`. Toeplitz determinants are unchanged because the
    /// moment matrix is conjugated by `diag(c^j)`.
    pub fn rescaled(&self, c: f64) -> Self {
        Self {
            exp_plus_t: self.exp_plus_t * c,
            exp_minus_t: self.exp_minus_t / c,
            zeros_plus: self.zeros_plus.iter().map(|q| q * c).collect(),
            zeros_minus: self.zeros_minus.iter().map(|q| q / c).collect(),
            poles_plus: self.poles_plus.iter().map(|q| q * c).collect(),
            poles_minus: self.poles_minus.iter().map(|q| q / c).collect(),
        }
    }

    fn max_rational_param(v: &[f64], w: &[f64]) -> f64 {
        v.iter().chain(w).copied().fold(0.0, f64::max)
    }

    /// Whether every zero and pole parameter lies strictly inside the unit
    /// interval, so that `log φ` is continuous with zero winding on the circle.
    pub fn has_zero_winding(&self) -> bool {
        Self::max_rational_param(&self.zeros_plus, &self.poles_plus) < 1.0
            && Self::max_rational_param(&self.zeros_minus, &self.poles_minus) < 1.0
    }

    /// Rescales `z ↦ c z` when some zero or pole parameter is `≥ 1`, choosing `c`
    /// to equalize the largest plus- and minus-side parameters. Returns the
    /// (possibly unchanged) symbol and the scale used.
    pub fn balanced(&self) -> Result<(Self, f64)> {
        if self.has_zero_winding() {
            self.validate()?;
            return Ok((self.clone(), 1.0));
        }
        let plus = Self::max_rational_param(&self.zeros_plus, &self.poles_plus);
        let minus = Self::max_rational_param(&self.zeros_minus, &self.poles_minus);
        let c = if plus > 0.0 && minus > 0.0 {
            (minus / plus).sqrt()
        } else if plus == 0.0 {
            2.0 * minus
        } else {
            0.5 / plus
        };
        let out = self.rescaled(c);
        out.validate().map_err(|_| {
            Error::Constraint(format!(
                "no rescaling z -> cz places all poles inside the unit disk \
                 (largest plus-side {plus}, minus-side {minus}; their product must be < 1)"
            ))
        })?;
        Ok((out, c))
    }

    /// `φ(e^{iθ})` from precomputed `cos θ` and `sin θ`.
    pub fn eval_on_circle<T: Real>(&self, cos: &T, sin: &T) -> Cx<T> {
        let one = cos.one_like();
        let exponent = Cx::new(
            cos.cst(self.exp_plus_t + self.exp_minus_t) * cos.clone(),
            cos.cst(self.exp_plus_t - self.exp_minus_t) * sin.clone(),
        );
        let mut num = if self.exp_plus_t == 0.0 && self.exp_minus_t == 0.0 {
            Cx::new(one.clone(), one.zero_like())
        } else {
            exponent.exp()
        };
        // 1 + q e^{±iθ} and 1 − q e^{±iθ}
        let factor = |q: f64, sign: f64, conj: bool| {
            let q = cos.cst(q);
            let re = one.clone() + cos.cst(sign) * q.clone() * cos.clone();
            let im = cos.cst(sign) * q * sin.clone();
            Cx::new(re, if conj { -im } else { im })
        };
        for &q in &self.zeros_plus {
            num = num.mul(&factor(q, 1.0, false));
        }
        for &q in &self.zeros_minus {
            num = num.mul(&factor(q, 1.0, true));
        }
        let mut den = Cx::new(one.clone(), one.zero_like());
        for &q in &self.poles_plus {
            den = den.mul(&factor(q, -1.0, false));
        }
        for &q in &self.poles_minus {
            den = den.mul(&factor(q, -1.0, true));
        }
        if self.poles_plus.is_empty() && self.poles_minus.is_empty() {
            num
        } else {
            num.div(&den)
        }
    }

    /// Continuous logarithm of `φ(e^{iθ})`; requires zero winding.
    pub fn log_on_circle(&self, theta: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, theta);
        let zi = z.conj();
        let mut acc = z * self.exp_plus_t + zi * self.exp_minus_t;
        for &q in &self.zeros_plus {
            acc += (1.0 + z * q).ln();
        }
        for &q in &self.zeros_minus {
            acc += (1.0 + zi * q).ln();
        }
        for &q in &self.poles_plus {
            acc -= (1.0 - z * q).ln();
        }
        for &q in &self.poles_minus {
            acc -= (1.0 - zi * q).ln();
        }
        acc
    }

    /// `max log|φ| − min log|φ|` over `nodes` equally spaced points, in nats.
    /// Governs the conditioning of the Toeplitz moment matrices.
    pub fn log_dynamic_range(&self, nodes: usize) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for n in 0..nodes {
            let th = std::f64::consts::TAU * n as f64 / nodes as f64;
            let v = self.eval_on_circle(&th.cos(), &th.sin());
            let m = (v.re * v.re + v.im * v.im).sqrt().ln();
            lo = lo.min(m);
            hi = hi.max(m);
        }
        hi - lo
    }
}

/// Fourier coefficients `φ_j`, `|j| ≤ half_width`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierTable {
    /// `coeffs[j + half_width] = φ_j`.
    pub coeffs: Vec<f64>,
    pub half_width: usize,
    pub quadrature_nodes: usize,
    pub symbol: SymbolSpec,
}

impl FourierTable {
    pub fn get(&self, j: i64) -> f64 {
        let jw = self.half_width as i64;
        assert!(j.abs() <= jw, "Fourier index {j} outside ±{jw}");
        self.coeffs[(j + jw) as usize]
    }
}

/// Default node count `16·(J+1)`, at least 64.
pub fn default_nodes(half_width: usize) -> usize {
    (16 * (half_width + 1)).max(64)
}

fn check_nodes(half_width: usize, nodes: usize) -> Result<()> {
    let required = 4 * (half_width + 1);
    if nodes < required || nodes % 2 == 1 {
        return Err(Error::TooFewNodes {
            nodes,
            half_width,
            required: required + required % 2,
        });
    }
    Ok(())
}

/// Equally spaced trapezoid quadrature of the Fourier coefficients in the
/// arithmetic of `proto`. Returns `φ_j` at index `j + half_width`.
pub fn fourier_coeffs_in<T: Real>(symbol: &SymbolSpec, half_width: usize, nodes: usize, proto: &T) -> Result<Vec<T>> {
    symbol.validate()?;
    check_nodes(half_width, nodes)?;
    let m = nodes;
    let zero = proto.zero_like();
    let tau = proto.pi() * proto.cst(2.0);
    let mf = proto.cst(m as f64);
    let (cos_t, sin_t): (Vec<T>, Vec<T>) = (0..m)
        .map(|r| {
            let th = tau.clone() * proto.cst(r as f64) / mf.clone();
            (th.cos(), th.sin())
        })
        .unzip();
    // φ(e^{-iθ}) is the conjugate of φ(e^{iθ}); only half the circle is needed.
    let half = m / 2;
    let values: Vec<Cx<T>> = (0..=half)
        .map(|n| symbol.eval_on_circle(&cos_t[n], &sin_t[n]))
        .collect();
    let mut out = vec![zero.clone(); 2 * half_width + 1];
    let two = proto.cst(2.0);
    for j in 0..=half_width {
        let mut a = values[0].re.clone();
        let mut b = zero.clone();
        for (n, v) in values.iter().enumerate().take(half).skip(1) {
            let r = (j * n) % m;
            a = a + two.clone() * v.re.clone() * cos_t[r].clone();
            b = b + two.clone() * v.im.clone() * sin_t[r].clone();
        }
        let r = (j * half) % m;
        a = a + values[half].re.clone() * cos_t[r].clone();
        out[half_width + j] = (a.clone() + b.clone()) / mf.clone();
        out[half_width - j] = (a - b) / mf.clone();
    }
    Ok(out)
}

/// Fourier coefficients in double precision.
pub fn fourier_coeffs(symbol: &SymbolSpec, half_width: usize, nodes: usize) -> Result<FourierTable> {
    let coeffs = fourier_coeffs_in(symbol, half_width, nodes, &0.0f64)?;
    Ok(FourierTable {
        coeffs,
        half_width,
        quadrature_nodes: nodes,
        symbol: symbol.clone(),
    })
}

/// Strong Szegő sum with an estimate of the neglected tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SzegoSum {
    pub log_dinf: f64,
    pub remainder: f64,
}

/// `Σ_{j=1}^{J} j (log φ)_j (log φ)_{−j}` with the logarithmic Fourier
/// coefficients computed by quadrature of a continuous branch of `log φ`.
pub fn strong_szego_log_dinf(symbol: &SymbolSpec, truncation: usize, nodes: usize) -> Result<SzegoSum> {
    check_nodes(truncation, nodes)?;
    let (sym, _) = symbol.balanced()?;
    if !sym.has_zero_winding() {
        return Err(Error::Constraint(
            "strong Szegő limit requires a symbol with zero winding number".into(),
        ));
    }
    let logs: Vec<Complex64> = (0..nodes)
        .map(|n| sym.log_on_circle(std::f64::consts::TAU * n as f64 / nodes as f64))
        .collect();
    let coeff = |j: i64| -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, l) in logs.iter().enumerate() {
            let th = std::f64::consts::TAU * ((j * n as i64).rem_euclid(nodes as i64)) as f64 / nodes as f64;
            acc += l * Complex64::from_polar(1.0, -th);
        }
        acc.re / nodes as f64
    };
    let terms: Vec<f64> = (1..=truncation as i64)
        .map(|j| j as f64 * coeff(j) * coeff(-j))
        .collect();
    let sum: f64 = terms.iter().sum();
    let floor = 1e-15 * sum.abs().max(1.0);
    let n = terms.len();
    let remainder = if n < 2 || terms[n - 1].abs() <= floor {
        terms.last().map_or(0.0, |t| t.abs())
    } else {
        let ratio = (terms[n - 1] / terms[n - 2]).abs();
        if ratio >= 1.0 || !ratio.is_finite() {
            return Err(Error::NonDecaying { j: n, ratio });
        }
        terms[n - 1].abs() * ratio / (1.0 - ratio)
    };
    Ok(SzegoSum {
        log_dinf: sum,
        remainder,
    })
}

/// Percolation models with determinant formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Rate-1 Poisson points in the square, longest up/right path.
    PoissonSquare,
    /// Bulk points below the diagonal plus a rate-α process on the diagonal.
    PoissonTriangle,
    /// Square model with rate-α₊/α₋ processes on the two axes.
    PoissonExternal,
    /// Geometric weights, weakly-up/weakly-right paths.
    LatticeA,
    /// Bernoulli weights, weakly-up/strictly-right paths.
    LatticeB,
    /// Geometric weights, strictly-up/strictly-right paths.
    LatticeC,
    /// Poisson processes on horizontal lines, weakly-up paths.
    PoissonLinesD,
    /// Poisson processes on horizontal lines, at most one point per line.
    PoissonLinesE,
    /// Triangle model viewed as a diagonal-symmetric Poisson configuration.
    TrianglePoissonFS,
    /// Diagonal-symmetric version of [`ModelKind::LatticeA`].
    SymmetricLatticeA,
    /// Diagonal-symmetric version of [`ModelKind::LatticeC`].
    SymmetricLatticeC,
}

impl ModelKind {
    /// Models whose law is a unitary-group (Toeplitz) expectation of their symbol.
    pub fn is_toeplitz(self) -> bool {
        matches!(
            self,
            ModelKind::PoissonSquare
                | ModelKind::LatticeA
                | ModelKind::LatticeB
                | ModelKind::LatticeC
                | ModelKind::PoissonLinesD
                | ModelKind::PoissonLinesE
        )
    }
}

/// Percolation model descriptor shared by the exact and Monte Carlo paths.
///
/// Lattice models use `row_params` for `q_i` (i = 1..M) and `col_params` for
/// `q′_j` (j = 1..N). The line models (d), (e) and the symmetrized lattices
/// keep their per-line rates in `row_params`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    #[serde(default)]
    pub t: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub alpha_plus: f64,
    #[serde(default)]
    pub alpha_minus: f64,
    #[serde(default)]
    pub row_params: Vec<f64>,
    #[serde(default)]
    pub col_params: Vec<f64>,
    #[serde(default)]
    pub m: usize,
    #[serde(default)]
    pub n: usize,
}

impl ModelSpec {
    fn base(kind: ModelKind) -> Self {
        Self {
            kind,
            t: 0.0,
            alpha: 0.0,
            alpha_plus: 0.0,
            alpha_minus: 0.0,
            row_params: Vec::new(),
            col_params: Vec::new(),
            m: 0,
            n: 0,
        }
    }

    pub fn poisson_square(t: f64) -> Self {
        Self {
            t,
            ..Self::base(ModelKind::PoissonSquare)
        }
    }

    pub fn poisson_triangle(t: f64, alpha: f64) -> Self {
        Self {
            t,
            alpha,
            ..Self::base(ModelKind::PoissonTriangle)
        }
    }

    pub fn triangle_fs(t: f64, alpha: f64) -> Self {
        Self {
            t,
            alpha,
            ..Self::base(ModelKind::TrianglePoissonFS)
        }
    }

    pub fn poisson_external(t: f64, alpha_plus: f64, alpha_minus: f64) -> Self {
        Self {
            t,
            alpha_plus,
            alpha_minus,
            ..Self::base(ModelKind::PoissonExternal)
        }
    }

    pub fn lattice(kind: ModelKind, rows: Vec<f64>, cols: Vec<f64>) -> Self {
        Self {
            m: rows.len(),
            n: cols.len(),
            row_params: rows,
            col_params: cols,
            ..Self::base(kind)
        }
    }

    pub fn poisson_lines(kind: ModelKind, t: f64, rates: Vec<f64>) -> Self {
        Self {
            t,
            n: rates.len(),
            row_params: rates,
            ..Self::base(kind)
        }
    }

    pub fn symmetric_lattice(kind: ModelKind, q: Vec<f64>, alpha: f64) -> Self {
        Self {
            alpha,
            n: q.len(),
            m: q.len(),
            row_params: q,
            ..Self::base(kind)
        }
    }

    fn check_nonneg(name: &str, v: f64) -> Result<()> {
        if v.is_finite() && v >= 0.0 {
            Ok(())
        } else {
            Err(Error::Constraint(format!(
                "{name} must be finite and nonnegative (got {v})"
            )))
        }
    }

    fn check_products(&self) -> Result<()> {
        for &a in &self.row_params {
            for &b in &self.col_params {
                if a * b >= 1.0 {
                    return Err(Error::Constraint(format!(
                        "q_i·q'_j = {a}·{b} = {} must lie in [0,1)",
                        a * b
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        use ModelKind::*;
        for (name, v) in [
            ("t", self.t),
            ("alpha", self.alpha),
            ("alpha_plus", self.alpha_plus),
            ("alpha_minus", self.alpha_minus),
        ] {
            Self::check_nonneg(name, v)?;
        }
        for &q in self.row_params.iter().chain(&self.col_params) {
            Self::check_nonneg("q", q)?;
        }
        match self.kind {
            LatticeA | LatticeB | LatticeC => {
                if self.row_params.is_empty() || self.col_params.is_empty() {
                    return Err(Error::Constraint("lattice models need M, N ≥ 1".into()));
                }
                if self.m != self.row_params.len() || self.n != self.col_params.len() {
                    return Err(Error::Constraint(format!(
                        "M = {}, N = {} disagree with {} row and {} column parameters",
                        self.m,
                        self.n,
                        self.row_params.len(),
                        self.col_params.len()
                    )));
                }
                if self.kind != LatticeB {
                    self.check_products()?;
                }
            }
            PoissonLinesD | PoissonLinesE => {
                if self.row_params.is_empty() {
                    return Err(Error::Constraint("line models need N ≥ 1 rates".into()));
                }
            }
            SymmetricLatticeA | SymmetricLatticeC => {
                if self.row_params.is_empty() {
                    return Err(Error::Constraint("symmetrized models need N ≥ 1".into()));
                }
                for &q in &self.row_params {
                    if q >= 1.0 {
                        return Err(Error::Constraint(format!("q_i = {q} must lie in [0,1)")));
                    }
                    if self.kind == SymmetricLatticeA && self.alpha * q >= 1.0 {
                        return Err(Error::Constraint(format!(
                            "α·q_i = {} must lie in [0,1)",
                            self.alpha * q
                        )));
                    }
                }
            }
            PoissonSquare | PoissonTriangle | PoissonExternal | TrianglePoissonFS => {}
        }
        Ok(())
    }
}

/// The symbol of a unitary-group (Toeplitz) model.
///
/// Parameters are placed literally (rows on the `z` side, columns on the `1/z`
/// side). If some zero or pole parameter is `≥ 1` the symbol is rescaled by
/// `z ↦ cz`, which leaves every Toeplitz determinant unchanged.
pub fn build_symbol(model: &ModelSpec) -> Result<SymbolSpec> {
    use ModelKind::*;
    model.validate()?;
    let rows = model.row_params.clone();
    let cols = model.col_params.clone();
    let literal = match model.kind {
        PoissonSquare => SymbolSpec::poisson_square(model.t),
        LatticeA => SymbolSpec {
            zeros_plus: rows,
            zeros_minus: cols,
            ..SymbolSpec::default()
        },
        LatticeB => SymbolSpec {
            zeros_plus: rows,
            poles_minus: cols,
            ..SymbolSpec::default()
        },
        LatticeC => SymbolSpec {
            poles_plus: rows,
            poles_minus: cols,
            ..SymbolSpec::default()
        },
        PoissonLinesD => SymbolSpec {
            exp_plus_t: model.t,
            zeros_minus: rows,
            ..SymbolSpec::default()
        },
        PoissonLinesE => SymbolSpec {
            exp_plus_t: model.t,
            poles_minus: rows,
            ..SymbolSpec::default()
        },
        PoissonTriangle | PoissonExternal | TrianglePoissonFS | SymmetricLatticeA | SymmetricLatticeC => {
            return Err(Error::InvalidArgument(format!(
                "{:?} is not a unitary-group model; see orthogonal_weight or the dedicated formulas",
                model.kind
            )))
        }
    };
    Ok(literal.balanced()?.0)
}

/// The one-sided weight `ψ` of an orthogonal-group model, stored with only
/// plus-side parameters: `ψ(z) = e^{t z} ∏(1 + q z) / ∏(1 − q z)`.
pub fn orthogonal_weight(model: &ModelSpec) -> Result<SymbolSpec> {
    use ModelKind::*;
    model.validate()?;
    let alpha = model.alpha;
    let w = match model.kind {
        PoissonTriangle | TrianglePoissonFS => SymbolSpec {
            exp_plus_t: model.t,
            zeros_plus: vec![alpha],
            ..SymbolSpec::default()
        },
        SymmetricLatticeA => {
            let mut zeros = vec![alpha];
            zeros.extend(&model.row_params);
            SymbolSpec {
                zeros_plus: zeros,
                ..SymbolSpec::default()
            }
        }
        SymmetricLatticeC => SymbolSpec {
            zeros_plus: vec![alpha],
            poles_plus: model.row_params.clone(),
            ..SymbolSpec::default()
        },
        _ => {
            return Err(Error::InvalidArgument(format!(
                "{:?} is not an orthogonal-group model",
                model.kind
            )))
        }
    };
    Ok(w)
}

/// `log Z` for every model in the catalog.
pub fn normalization_log_z(model: &ModelSpec) -> Result<f64> {
    use ModelKind::*;
    model.validate()?;
    let t = model.t;
    let pairs = || {
        model
            .row_params
            .iter()
            .flat_map(|a| model.col_params.iter().map(move |b| a * b))
    };
    let sym_pairs = || {
        let q = &model.row_params;
        (0..q.len()).flat_map(move |i| ((i + 1)..q.len()).map(move |j| q[i] * q[j]))
    };
    let z = match model.kind {
        PoissonSquare => t * t,
        PoissonTriangle | TrianglePoissonFS => model.alpha * t + 0.5 * t * t,
        PoissonExternal => (model.alpha_plus + model.alpha_minus) * t + t * t,
        LatticeA | LatticeC => pairs().map(|r| -(-r).ln_1p()).sum(),
        LatticeB => pairs().map(f64::ln_1p).sum(),
        PoissonLinesD | PoissonLinesE => t * model.row_params.iter().sum::<f64>(),
        SymmetricLatticeA => {
            model
                .row_params
                .iter()
                .map(|q| -(-model.alpha * q).ln_1p())
                .sum::<f64>()
                + sym_pairs().map(|r| -(-r).ln_1p()).sum::<f64>()
        }
        SymmetricLatticeC => {
            model
                .row_params
                .iter()
                .map(|q| (model.alpha * q).ln_1p() - (-q * q).ln_1p())
                .sum::<f64>()
                + sym_pairs().map(|r| -(-r).ln_1p()).sum::<f64>()
        }
    };
    Ok(z)
}

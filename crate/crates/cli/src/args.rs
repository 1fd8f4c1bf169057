use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lpp_core::opuc::PrecisionProfile;
use lpp_core::symbols::{ModelKind, ModelSpec};

#[derive(Parser, Debug)]
#[command(
    name = "lpp",
    version,
    about = "Exact and simulated last-passage percolation distributions"
)]
pub struct Cli {
    /// Directory receiving output files and the run manifest.
    #[arg(long, global = true, default_value = "lpp-out")]
    pub out_dir: PathBuf,

    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Worker threads for simulation and matrix assembly.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,

    /// Arithmetic used for Fourier coefficients and the Levinson recursion.
    #[arg(long, global = true, default_value = "auto")]
    pub precision_profile: PrecisionProfile,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact distribution table P(L ≤ ℓ), ℓ = 0..=lmax.
    Dist {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 20)]
        lmax: usize,
    },
    /// Tracy-Widom distribution values on a grid.
    Tw {
        #[arg(long, value_enum, default_value = "gue")]
        which: TwKind,
        #[command(flatten)]
        grid: GridArgs,
        /// Local relative tolerance of the Painlevé II integration.
        #[arg(long, default_value_t = lpp_core::painleve::DEFAULT_TOL)]
        tol: f64,
    },
    /// Verification suites; exit code 3 on any failure.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Scaled CDF of the square model against F_GUE for several t.
    Converge {
        #[arg(long, value_delimiter = ',', default_value = "4,7,10")]
        t: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Monte Carlo empirical distribution.
    Mc {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum Suite {
    /// Discrete Painlevé II residuals and corner-matrix recurrences.
    Dpii {
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 12)]
        kmax: usize,
    },
    /// Toeplitz–Fredholm determinant identities.
    Fredholm {
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 8)]
        kmax: usize,
        #[arg(long, default_value_t = 128)]
        nodes: usize,
    },
    /// Decay of the corner deviations from their Painlevé II predictions.
    CornerAsymptotics {
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "40,60,90,135")]
        k: Vec<usize>,
    },
    /// Exact distribution against simulation, 3 standard errors.
    McCross {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 200_000)]
        trials: u64,
        #[arg(long, default_value_t = 12)]
        lmax: usize,
    },
    /// Exact formulas against independent oracles.
    Oracles {
        /// Haar samples for the orthogonal-group check.
        #[arg(long, default_value_t = 200_000)]
        trials: u64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 0.25)]
    pub step: f64,
}

impl GridArgs {
    pub fn points(&self) -> Result<Vec<f64>, String> {
        if !(self.step > 0.0) || !(self.x_max >= self.x_min) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return Err(format!(
                "grid needs x_min ≤ x_max and a positive step (got {}..{} step {})",
                self.x_min, self.x_max, self.step
            ));
        }
        let n = ((self.x_max - self.x_min) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|j| self.x_min + j as f64 * self.step).collect())
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwKind {
    Gue,
    Goe,
    Gse,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelName {
    Square,
    Triangle,
    External,
    LatticeA,
    LatticeB,
    LatticeC,
    LinesD,
    LinesE,
    SymA,
    SymC,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(value_enum)]
    pub model: ModelName,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Diagonal rate (triangle) or diagonal parameter (symmetrized lattices).
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha_plus: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha_minus: f64,
    /// Row parameters q_i (lattices), line rates (line models) or q_i (symmetrized).
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
    /// Column parameters q'_j (lattices).
    #[arg(long, value_delimiter = ',')]
    pub qp: Vec<f64>,
}

impl ModelArgs {
    pub fn spec(&self) -> ModelSpec {
        match self.model {
            ModelName::Square => ModelSpec::poisson_square(self.t),
            ModelName::Triangle => ModelSpec::poisson_triangle(self.t, self.alpha),
            ModelName::External => ModelSpec::poisson_external(self.t, self.alpha_plus, self.alpha_minus),
            ModelName::LatticeA => ModelSpec::lattice(ModelKind::LatticeA, self.q.clone(), self.qp.clone()),
            ModelName::LatticeB => ModelSpec::lattice(ModelKind::LatticeB, self.q.clone(), self.qp.clone()),
            ModelName::LatticeC => ModelSpec::lattice(ModelKind::LatticeC, self.q.clone(), self.qp.clone()),
            ModelName::LinesD => ModelSpec::poisson_lines(ModelKind::PoissonLinesD, self.t, self.q.clone()),
            ModelName::LinesE => ModelSpec::poisson_lines(ModelKind::PoissonLinesE, self.t, self.q.clone()),
            ModelName::SymA => ModelSpec::symmetric_lattice(ModelKind::SymmetricLatticeA, self.q.clone(), self.alpha),
            ModelName::SymC => ModelSpec::symmetric_lattice(ModelKind::SymmetricLatticeC, self.q.clone(), self.alpha),
        }
    }

    pub fn slug(&self) -> String {
        self.model
            .to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default()
    }
}

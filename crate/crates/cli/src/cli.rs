use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "lpneg", version, about = "Negative-power Fourier transforms, L_{-p} embedding checks and stable-vector experiments")]
pub struct Cli {
    /// key=value file overriding the defaults (after the one named by LPNEG_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Record wall time in the manifest. Output is then no longer byte-reproducible.
    #[arg(long, global = true)]
    pub timing: bool,

    /// Write the JSON report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourier transform of ‖x‖^{-p} at one point, by one or all methods.
    Transform(TransformArgs),
    /// Sign scan of the transform over a grid on the positive unit sphere.
    Signscan(SignscanArgs),
    /// Sign-change certificate for l_q^n with q > 2 and 0 < p < n - 3.
    Certify(CertifyArgs),
    /// Bisection for the smallest p without a sign change.
    Critical(CriticalArgs),
    /// Correlation experiment E‖X‖^p vs E‖Y‖^p for a q-stable vector.
    Simulate(SimulateArgs),
    /// Runs the acceptance suite.
    Selftest(SelftestArgs),
    /// Tabulates the stable characteristic integral gamma_q.
    Gammaq(GammaqArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpaceArgs {
    /// linf, lq (with --q), l<r> such as l1 or l3, or spectral-file.
    #[arg(long)]
    pub space: String,
    /// Exponent of l_q.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Atoms CSV for --space spectral-file (header m=<int>, then n rows).
    #[arg(long)]
    pub spectral_file: Option<PathBuf>,
    /// Exponent r of the spectral norm (span of the atom rows in l_r^m).
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TolArgs {
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Closed,
    Quad,
    Lq,
    LqViaLinf,
    Sphere,
    All,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TransformArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub p: f64,
    /// Comma-separated frequency vector.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub xi: Vec<f64>,
    #[arg(long, value_enum, default_value = "all")]
    pub method: MethodArg,
    #[command(flatten)]
    pub tol: TolArgs,
    /// Draws for the lq-via-linf route.
    #[arg(long)]
    pub mc_samples: Option<usize>,
    #[arg(long)]
    pub mc_seed: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    /// Coordinate levels per axis of the grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Extra random points.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Smallest coordinate on the unit sphere.
    #[arg(long)]
    pub floor: Option<f64>,
    #[arg(long)]
    pub decision_tol: Option<f64>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SignscanArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long)]
    pub p: f64,
    #[command(flatten)]
    pub scan: ScanArgs,
    /// CSV of every scan point with its value and error.
    #[arg(long)]
    pub dump_grid: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CertifyArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CriticalArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AtomsPreset {
    Identity,
    Coupled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorArg {
    Mean,
    MedianOfMeans,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// linf, l<r> such as l1 or l3, lq (with --norm-q), or spectral-file.
    #[arg(long)]
    pub space: String,
    /// Exponent of the l_q norm when --space lq.
    #[arg(long)]
    pub norm_q: Option<f64>,
    #[arg(long)]
    pub spectral_file: Option<PathBuf>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Stable index in (0, 2].
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub n: Option<usize>,
    /// Block split: Y replaces the sources of coordinates after k.
    #[arg(long)]
    pub k: usize,
    /// Signed moment exponent.
    #[arg(long, allow_hyphen_values = true)]
    pub p: f64,
    #[arg(long, value_enum, conflicts_with = "atoms_file")]
    pub atoms: Option<AtomsPreset>,
    /// CSV atoms: header m=<int>, then n rows of m reals.
    #[arg(long)]
    pub atoms_file: Option<PathBuf>,
    #[arg(long = "N")]
    pub n_samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorArg>,
    /// CSV of the sampled ‖X‖^p and ‖Y‖^p.
    #[arg(long)]
    pub dump_samples: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultArg {
    Gamma,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SelftestArgs {
    /// Reduced sample sizes.
    #[arg(long)]
    pub quick: bool,
    /// Deliberately corrupt a component to check that the suite notices.
    #[arg(long, value_enum)]
    pub inject_fault: Option<FaultArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaqMethod {
    Table,
    Direct,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GammaqArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long, default_value_t = 20.0)]
    pub t_max: f64,
    /// Equally spaced points on [0, t_max].
    #[arg(long, default_value_t = 41)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "table")]
    pub method: GammaqMethod,
    /// Also write the table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub tol: TolArgs,
}

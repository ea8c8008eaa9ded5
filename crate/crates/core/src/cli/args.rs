use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::ConfigFile;

fn put<T: ToString>(cfg: &mut ConfigFile, key: &str, v: &Option<T>) {
    if let Some(v) = v {
        cfg.set(key, v.to_string());
    }
}

fn put_list(cfg: &mut ConfigFile, key: &str, v: &[f64]) {
    if !v.is_empty() {
        cfg.set(key, v.iter().map(f64::to_string).collect::<Vec<_>>().join(", "));
    }
}

fn put_flag(cfg: &mut ConfigFile, key: &str, v: bool) {
    if v {
        cfg.set(key, "true");
    }
}

#[derive(Debug, Parser)]
#[command(name = "mkdv-imethod", version, about = "mKdV / coupled mKdV simulator with modified-energy diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file of `key = value` lines under `[section]` headers;
    /// flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory [default: out]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker thread cap [default: machine parallelism]
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Random seed [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate initial data and write the trajectory.
    Simulate(FlowArgs),
    /// Integrate and check the conserved quantities.
    Invariants(FlowArgs),
    /// Drift of the first and second modified energies against the cutoff.
    DriftSweep(DriftArgs),
    /// Exact integer check of the cubic resonance identity.
    VerifyIdentity(IdentityArgs),
    /// Sampled bounds on the quartic and sextic multipliers and their
    /// closed-form resonant limits (profile defaults to blend; near the
    /// sharp profile's kink the quartic ratio is unbounded).
    VerifyBounds(BoundsArgs),
    /// Double mean value bound for the squared symbol (profile defaults to
    /// blend; the sharp profile's kink violates the bound).
    VerifyDmvt(DmvtArgs),
    /// Quartic cancellation and calibration of the energy coefficients.
    VerifyCancellation(CancellationArgs),
    /// Finite-difference rate of the second modified energy against its prediction.
    VerifyDerivative(DerivativeArgs),
    /// Frequency-sum functionals against physical-space integrals.
    Plancherel(PlancherelArgs),
    /// Cutoff, scaling and step count for a target time.
    PlanGwp(PlanArgs),
    /// Norms of rescaled data.
    RescaleCheck(RescaleArgs),
    /// Energy bookkeeping of the iteration with a measured increment constant.
    Ledger(LedgerArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Invariants(_) => "invariants",
            Command::DriftSweep(_) => "drift-sweep",
            Command::VerifyIdentity(_) => "verify-identity",
            Command::VerifyBounds(_) => "verify-bounds",
            Command::VerifyDmvt(_) => "verify-dmvt",
            Command::VerifyCancellation(_) => "verify-cancellation",
            Command::VerifyDerivative(_) => "verify-derivative",
            Command::Plancherel(_) => "plancherel",
            Command::PlanGwp(_) => "plan-gwp",
            Command::RescaleCheck(_) => "rescale-check",
            Command::Ledger(_) => "ledger",
        }
    }

    /// Flag values as config keys.
    pub fn overrides(&self) -> ConfigFile {
        let mut c = ConfigFile::default();
        match self {
            Command::Simulate(a) | Command::Invariants(a) => {
                a.grid.collect(&mut c);
                a.data.collect(&mut c);
                a.time.collect(&mut c);
                put(&mut c, "experiment.alpha", &a.alpha);
                put(&mut c, "experiment.calibration_scale", &a.calibration_scale);
            }
            Command::DriftSweep(a) => {
                a.grid.collect(&mut c);
                a.data.collect(&mut c);
                a.time.collect(&mut c);
                a.cutoff.collect(&mut c);
                put_list(&mut c, "experiment.N_list", &a.n_list);
                put_flag(&mut c, "experiment.control", a.control);
            }
            Command::VerifyIdentity(a) => {
                put(&mut c, "experiment.samples", &a.samples);
                put(&mut c, "experiment.bound", &a.bound);
                put(&mut c, "experiment.radius", &a.radius);
            }
            Command::VerifyBounds(a) => {
                a.cutoff.collect(&mut c);
                put(&mut c, "experiment.samples", &a.samples);
                put_flag(&mut c, "experiment.stability", a.stability);
                put(&mut c, "experiment.pairs", &a.pairs);
            }
            Command::VerifyDmvt(a) => {
                a.cutoff.collect(&mut c);
                put(&mut c, "experiment.samples", &a.samples);
            }
            Command::VerifyCancellation(a) => {
                a.grid.collect(&mut c);
                a.data.collect(&mut c);
                a.cutoff.collect(&mut c);
                put(&mut c, "time.dt", &a.dt);
                put(&mut c, "experiment.samples", &a.samples);
            }
            Command::VerifyDerivative(a) => {
                a.grid.collect(&mut c);
                a.data.collect(&mut c);
                a.cutoff.collect(&mut c);
                put(&mut c, "time.dt", &a.dt);
            }
            Command::Plancherel(a) => {
                a.grid.collect(&mut c);
                a.data.collect(&mut c);
                put(&mut c, "experiment.samples", &a.samples);
            }
            Command::PlanGwp(a) => a.collect(&mut c),
            Command::RescaleCheck(a) => {
                a.grid.collect(&mut c);
                a.data.collect(&mut c);
                a.cutoff.collect(&mut c);
                put_list(&mut c, "experiment.lambda_list", &a.lambda_list);
                put(&mut c, "experiment.epsilon", &a.epsilon);
            }
            Command::Ledger(a) => {
                a.plan.collect(&mut c);
                put(&mut c, "experiment.increment_constant", &a.increment_constant);
                put(&mut c, "experiment.sweep", &a.sweep.as_ref().map(|p| p.display().to_string()));
            }
        }
        c
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// mkdv or system
    #[arg(long)]
    pub equation: Option<String>,
    /// Period of the domain
    #[arg(long = "L")]
    pub length: Option<f64>,
    /// Number of grid points (power of two)
    #[arg(long = "K")]
    pub points: Option<usize>,
}

impl GridArgs {
    fn collect(&self, c: &mut ConfigFile) {
        put(c, "run.equation", &self.equation);
        put(c, "grid.L", &self.length);
        put(c, "grid.K", &self.points);
    }
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// soliton, multiscale, random or file
    #[arg(long)]
    pub initial: Option<String>,
    /// Amplitude, or multiplier of the soliton profile
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Soliton speed
    #[arg(long)]
    pub speed: Option<f64>,
    /// Highest mode of random data
    #[arg(long)]
    pub band: Option<i64>,
    /// Field file(s) for `--initial file`, comma-separated for the system
    #[arg(long)]
    pub input: Option<String>,
}

impl DataArgs {
    fn collect(&self, c: &mut ConfigFile) {
        put(c, "data.initial", &self.initial);
        put(c, "data.amplitude", &self.amplitude);
        put(c, "data.speed", &self.speed);
        put(c, "data.band", &self.band);
        put(c, "data.input", &self.input);
    }
}

#[derive(Debug, Args)]
pub struct TimeArgs {
    /// Time step
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    /// Steps between stored snapshots
    #[arg(long = "snapshot-every")]
    pub snapshot_every: Option<u64>,
}

impl TimeArgs {
    fn collect(&self, c: &mut ConfigFile) {
        put(c, "time.dt", &self.dt);
        put(c, "time.t_end", &self.t_end);
        put(c, "time.snapshot_every", &self.snapshot_every);
    }
}

#[derive(Debug, Args)]
pub struct CutoffArgs {
    /// Frequency cutoff of the smoothing operator
    #[arg(long = "N")]
    pub cutoff: Option<f64>,
    /// Sobolev regularity
    #[arg(long)]
    pub s: Option<f64>,
    /// sharp or blend
    #[arg(long)]
    pub profile: Option<String>,
    /// calibrated or printed
    #[arg(long)]
    pub constants: Option<String>,
}

impl CutoffArgs {
    fn collect(&self, c: &mut ConfigFile) {
        put(c, "imethod.N", &self.cutoff);
        put(c, "imethod.s", &self.s);
        put(c, "imethod.profile", &self.profile);
        put(c, "imethod.constants", &self.constants);
    }
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub time: TimeArgs,
    /// Quartic coefficient of the energy
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Factor applied to the data for the energy calibration run of
    /// `invariants` [default: 1.2]
    #[arg(long)]
    pub calibration_scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DriftArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub time: TimeArgs,
    #[command(flatten)]
    pub cutoff: CutoffArgs,
    /// Cutoffs, comma-separated and increasing
    #[arg(long = "N-list", value_delimiter = ',')]
    pub n_list: Vec<f64>,
    /// Band-limited control run: every cutoff above the data, drift must vanish
    #[arg(long)]
    pub control: bool,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[arg(long)]
    pub samples: Option<u64>,
    /// Range of the random entries
    #[arg(long)]
    pub bound: Option<i64>,
    /// Radius of the exhaustive lattice
    #[arg(long)]
    pub radius: Option<i64>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub cutoff: CutoffArgs,
    #[arg(long)]
    pub samples: Option<u64>,
    /// Repeat with four times the samples and compare the maxima
    #[arg(long)]
    pub stability: bool,
    /// Number of resonant pairs
    #[arg(long)]
    pub pairs: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DmvtArgs {
    #[command(flatten)]
    pub cutoff: CutoffArgs,
    #[arg(long)]
    pub samples: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CancellationArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub cutoff: CutoffArgs,
    /// Finite-difference step [default: 1e-5]
    #[arg(long)]
    pub dt: Option<f64>,
    /// Number of random states in the calibration fit
    #[arg(long)]
    pub samples: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DerivativeArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub cutoff: CutoffArgs,
    /// Finite-difference step [default: 1e-5]
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PlancherelArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Number of random fields
    #[arg(long)]
    pub samples: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub s: Option<f64>,
    /// Target time
    #[arg(long = "T")]
    pub t: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Margin constant of the cutoff constraint
    #[arg(long = "c")]
    pub c_margin: Option<f64>,
    /// Size of the rescaled data
    #[arg(long)]
    pub epsilon: Option<f64>,
}

impl PlanArgs {
    fn collect(&self, c: &mut ConfigFile) {
        put(c, "imethod.s", &self.s);
        put(c, "experiment.T", &self.t);
        put(c, "experiment.theta", &self.theta);
        put(c, "experiment.c", &self.c_margin);
        put(c, "experiment.epsilon", &self.epsilon);
    }
}

#[derive(Debug, Args)]
pub struct RescaleArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub cutoff: CutoffArgs,
    /// Scalings, comma-separated and increasing
    #[arg(long = "lambda-list", value_delimiter = ',')]
    pub lambda_list: Vec<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LedgerArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    /// Increment constant; overrides the one read from `--sweep`
    #[arg(long = "increment-constant")]
    pub increment_constant: Option<f64>,
    /// drift.json written by drift-sweep, source of the increment constant
    #[arg(long)]
    pub sweep: Option<PathBuf>,
}

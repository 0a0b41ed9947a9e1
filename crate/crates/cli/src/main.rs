mod commands;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use parse::Epsilon;
use skyroute::{PlanMode, PlanningBasis, Vec3};

/// Radio maps and SINR-constrained 3D UAV path planning.
#[derive(Debug, Parser)]
#[command(name = "skyroute", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random GBS and obstacle layout.
    GenScene(GenSceneArgs),
    /// Build per-GBS channel gain maps and the SINR map for a scene.
    BuildMaps(BuildMapsArgs),
    /// Plan a path on an SINR map.
    Plan(PlanArgs),
    /// Plan over a grid of SINR targets, modes and bases; write CSV.
    Sweep(SweepArgs),
    /// Print statistics of a map file.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct GenSceneArgs {
    /// Number of GBSs.
    #[arg(long, default_value_t = 6)]
    pub m: usize,
    /// Number of cuboid obstacles.
    #[arg(long, default_value_t = 30)]
    pub obstacles: usize,
    /// Edge length of the square region, m.
    #[arg(long, default_value_t = 630.0)]
    pub edge: f64,
    /// Minimum UAV altitude, m.
    #[arg(long, default_value_t = 90.0)]
    pub h_min: f64,
    /// Maximum UAV altitude, m.
    #[arg(long, default_value_t = 130.0)]
    pub h_max: f64,
    /// GBS antenna height, m.
    #[arg(long, default_value_t = 10.0)]
    pub h_gbs: f64,
    /// Obstacle footprint side range `lo,hi`, m.
    #[arg(long, default_value = "50,70")]
    pub obstacle_size: String,
    /// Mean obstacle height (Rayleigh), m.
    #[arg(long, default_value_t = 30.0)]
    pub obstacle_height: f64,
    /// Loading factors: comma list, `random`, or `reference` (six fixed
    /// values; the default when `--m 6`, otherwise `random`).
    #[arg(long)]
    pub loads: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AntennaKind {
    /// 0 dB in every direction.
    Isotropic,
    /// 8-element half-wavelength ULA tilted 10 degrees down.
    Ula,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Grid spacing, m.
    #[arg(long, default_value_t = 10.0)]
    pub delta: f64,
    /// Gain-map truncation threshold in amplitude dB, or `auto` for the
    /// noise-floor value `(sigma^2 - P) / 2`.
    #[arg(long, default_value = "auto", value_parser = parse::epsilon, allow_hyphen_values = true)]
    pub epsilon: Epsilon,
    #[arg(long, value_enum, default_value_t = AntennaKind::Isotropic)]
    pub antenna: AntennaKind,
    /// Carrier frequency, GHz.
    #[arg(long, default_value_t = 2.0)]
    pub carrier_ghz: f64,
    /// Total GBS transmit power, dBm.
    #[arg(long, default_value_t = 41.0)]
    pub total_power_dbm: f64,
    /// Resource blocks sharing the transmit power.
    #[arg(long, default_value_t = 50)]
    pub n_rb: u32,
    /// Noise power spectral density, dBm/Hz.
    #[arg(long, default_value_t = -169.0, allow_hyphen_values = true)]
    pub noise_psd_dbm_hz: f64,
    /// Resource block bandwidth, Hz.
    #[arg(long, default_value_t = 180e3)]
    pub rb_bandwidth_hz: f64,
    /// Receiver noise figure, dB.
    #[arg(long, default_value_t = 9.0)]
    pub noise_figure_db: f64,
}

#[derive(Debug, Args)]
pub struct BuildMapsArgs {
    #[arg(long)]
    pub scene: PathBuf,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// actual, worst-case-load[:L], zero-load, all-los or all-nlos.
    #[arg(long, default_value = "actual", value_parser = parse::basis)]
    pub basis: PlanningBasis,
    /// Output directory for `gain_<id>.json` and `sinr.json`.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeKind {
    Optimal,
    Quantized,
    OutageTolerant,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// SINR map the planner uses.
    #[arg(long)]
    pub sinr: PathBuf,
    /// SINR map used to score outage; defaults to `--sinr`.
    #[arg(long)]
    pub actual: Option<PathBuf>,
    /// Start point `x,y,z`, m; must be a grid point.
    #[arg(long, value_parser = parse::vec3, allow_hyphen_values = true)]
    pub start: Vec3,
    /// Goal point `x,y,z`, m; must be a grid point.
    #[arg(long, value_parser = parse::vec3, allow_hyphen_values = true)]
    pub goal: Vec3,
    /// Expected-SINR target, dB.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_db: f64,
    #[arg(long, value_enum, default_value_t = ModeKind::Optimal)]
    pub mode: ModeKind,
    /// Horizontal quantization ratio (odd).
    #[arg(long, default_value_t = 3)]
    pub kxy: usize,
    /// Vertical quantization ratio (odd).
    #[arg(long, default_value_t = 1)]
    pub kz: usize,
    /// Outage tolerance per bridge, m.
    #[arg(long, default_value_t = 50.0)]
    pub ot: f64,
    /// UAV speed, m/s.
    #[arg(long, default_value_t = 10.0)]
    pub speed: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub scene: PathBuf,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_parser = parse::vec3, default_value = "5,5,95")]
    pub start: Vec3,
    #[arg(long, value_parser = parse::vec3, default_value = "625,625,125")]
    pub goal: Vec3,
    /// UAV speed, m/s.
    #[arg(long, default_value_t = 10.0)]
    pub speed: f64,
    /// First SINR target, dB.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_from: f64,
    /// Last SINR target, dB (inclusive).
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_to: f64,
    /// SINR target step, dB.
    #[arg(long, default_value_t = 1.0)]
    pub gamma_step: f64,
    /// Comma list of optimal, quantized[:KXY[:KZ]], outage-tolerant[:OT].
    #[arg(long, default_value = "optimal")]
    pub modes: String,
    /// Comma list of actual, worst-case-load[:L], zero-load, all-los, all-nlos.
    #[arg(long, default_value = "actual")]
    pub bases: String,
    /// Record planning wall time in the runtime column.
    #[arg(long)]
    pub timing: bool,
    /// CSV output; the resolved configuration goes to `<out>.config.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    /// Map file written by build-maps.
    pub map: PathBuf,
    /// Comma list of SINR targets, dB, for feasible-cell counts.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_db: Option<String>,
}

pub const EXIT_NO_PATH: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::GenScene(a) => commands::gen_scene(&a),
        Command::BuildMaps(a) => commands::build_maps(&a),
        Command::Plan(a) => commands::plan(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Inspect(a) => commands::inspect(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

impl PlanArgs {
    fn plan_mode(&self) -> PlanMode {
        match self.mode {
            ModeKind::Optimal => PlanMode::Optimal,
            ModeKind::Quantized => PlanMode::Quantized {
                kappa_xy: self.kxy,
                kappa_z: self.kz,
            },
            ModeKind::OutageTolerant => PlanMode::OutageTolerant {
                max_outage_m: self.ot,
                bridge_radius: None,
            },
        }
    }
}

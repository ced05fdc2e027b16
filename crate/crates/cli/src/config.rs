//! Command-line configuration.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use gratingprob::probability::{CurveKind, InclusionRule, ThresholdSide, DEFAULT_TIE_EPS};

use crate::dataset::Format;
use crate::expr::{parse_alpha, parse_length_nm};

/// Figure data, order tables and occupation values for diffraction gratings.
#[derive(Debug, Clone, Parser)]
#[command(name = "gratingprob", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Data behind one of the figures.
    Figure(FigureArgs),
    /// Per-order probability, energy and occupation table for one grating.
    Table(TableArgs),
    /// Occupation value of one grating.
    Omega(OmegaArgs),
    /// Apparent occupation values of an imperfect coupling apparatus.
    Experiment(ExperimentArgs),
    /// Any combination of curves over a range of truncation points.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of stdout. Relative paths resolve against the
    /// output directory when one is set.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory for relative `--out` paths.
    #[arg(long, global = true, env = "GRATINGPROB_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    /// Seed for the synthetic pulse trains.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

impl OutputArgs {
    pub fn target(&self) -> Option<PathBuf> {
        let out = self.out.as_ref()?;
        match &self.out_dir {
            Some(dir) if out.is_relative() => Some(dir.join(out)),
            _ => Some(out.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct RuleArgs {
    /// Drop an order sitting exactly on the truncation point.
    #[arg(long)]
    pub strict_below: bool,
    /// Tolerance for an order coinciding with the truncation point.
    #[arg(long, default_value_t = DEFAULT_TIE_EPS)]
    pub tie_eps: f64,
}

impl RuleArgs {
    pub fn rule(&self) -> InclusionRule {
        if self.strict_below {
            InclusionRule::strict_below()
        } else {
            InclusionRule::inclusive(self.tie_eps)
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Args)]
pub struct RangeArgs {
    /// Lower end of the α range, e.g. `pi` or `3pi/2`.
    #[arg(long, value_parser = parse_alpha, allow_hyphen_values = true, conflicts_with = "j_min")]
    pub alpha_min: Option<f64>,
    #[arg(long, value_parser = parse_alpha, allow_hyphen_values = true, conflicts_with = "j_max")]
    pub alpha_max: Option<f64>,
    /// Lower end of the range as a continuum order, α = jπσ.
    #[arg(long, allow_hyphen_values = true)]
    pub j_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub j_max: Option<f64>,
    /// Number of uniformly spaced samples.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
            FigureId::Fig9 => "fig9",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(long, value_enum)]
    pub id: FigureId,
    /// Duty cycle; fig3 and fig4 default to 1/8, the rest to 0.5.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Irradiated slits; 4 for fig3 to fig5, 257 otherwise.
    #[arg(long)]
    pub n: Option<u32>,
    /// Order of the fig4 subinterval or the fig8 threshold.
    #[arg(long, allow_hyphen_values = true)]
    pub order: Option<i64>,
    #[command(flatten)]
    pub range: RangeArgs,
    #[command(flatten)]
    pub rule: RuleArgs,
}

/// Ways of fixing a grating's truncation point.
#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("truncation").required(true).args(["w", "j_equiv", "alpha_t", "threshold"])))]
pub struct GratingArgs {
    /// Slit width, e.g. `1000nm` or `1000e-9`.
    #[arg(long, value_parser = parse_length_nm)]
    pub w: Option<f64>,
    /// Wavelength.
    #[arg(long = "lambda", value_parser = parse_length_nm, default_value = "633nm")]
    pub lambda: f64,
    /// Continuum order of the truncation point, α_t / (πσ).
    #[arg(long)]
    pub j_equiv: Option<f64>,
    /// Truncation point in α-space.
    #[arg(long, value_parser = parse_alpha)]
    pub alpha_t: Option<f64>,
    /// Put the truncation point just beside order J (see `--side`).
    #[arg(long, value_name = "J")]
    pub threshold: Option<i64>,
    #[arg(long, value_enum, default_value_t = Side::Below, requires = "threshold")]
    pub side: Side,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    #[arg(long, default_value_t = 257)]
    pub n: u32,
    #[command(flatten)]
    pub rule: RuleArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Below,
    Above,
}

impl From<Side> for ThresholdSide {
    fn from(s: Side) -> Self {
        match s {
            Side::Below => ThresholdSide::Below,
            Side::Above => ThresholdSide::Above,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub grating: GratingArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OmegaArgs {
    #[command(flatten)]
    pub grating: GratingArgs,
    /// |Ω − 1| below this marks a control grating.
    #[arg(long, default_value_t = 0.005)]
    pub control_tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    /// Idealized occupation values, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1.025,0.975")]
    pub omega_id: Vec<f64>,
    /// Reference-to-grating probability ratio.
    #[arg(long, default_value_t = 100.0)]
    pub p_ratio: f64,
    /// Grating-beam fraction inside the sampling annulus.
    #[arg(long, default_value_t = 0.4)]
    pub f_g: f64,
    /// Reference-beam fraction inside the sampling annulus.
    #[arg(long, default_value_t = 0.01)]
    pub f_r: f64,
    /// Coupling-path efficiency.
    #[arg(long, default_value_t = 1.0)]
    pub efficiency: f64,
    /// Underestimates at or above this are flagged.
    #[arg(long, default_value_t = gratingprob::experiment::DEFAULT_SIGNIFICANCE)]
    pub threshold: f64,
    #[arg(long, default_value_t = 100)]
    pub cycles: usize,
    #[arg(long, default_value_t = 10)]
    pub samples_per_half_cycle: usize,
    #[arg(long, default_value_t = 0.2)]
    pub baseline: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gain: f64,
    /// Per-sample detector noise.
    #[arg(long, default_value_t = 0.0, conflicts_with = "dispersion")]
    pub noise_sd: f64,
    /// Pick the noise so the recovered Ω scatters by this much.
    #[arg(long)]
    pub dispersion: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    /// Normalized resultant probability.
    #[value(name = "p_r")]
    PR,
    /// Occupation value.
    Omega,
    /// 0th-order share of the resultant probability.
    #[value(name = "r_0")]
    R0,
    /// 0th-order energy for unit output energy.
    #[value(name = "e_r0")]
    ER0,
}

impl From<SweepKind> for CurveKind {
    fn from(k: SweepKind) -> Self {
        match k {
            SweepKind::PR => CurveKind::ResultantProbability,
            SweepKind::Omega => CurveKind::Occupation,
            SweepKind::R0 => CurveKind::ZeroOrderShare,
            SweepKind::ER0 => CurveKind::ZeroOrderEnergy,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Curves to tabulate; repeat or comma separate.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "p_r")]
    pub kind: Vec<SweepKind>,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    #[command(flatten)]
    pub range: RangeArgs,
    #[command(flatten)]
    pub rule: RuleArgs,
}

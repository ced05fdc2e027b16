//! Builds the dataset for each subcommand.

use std::f64::consts::PI;

use gratingprob::diffraction::{equivalent_order, grating_intensity, order_alpha, sinc_sq, truncation_alpha};
use gratingprob::experiment::{
    apparent_omega_combined, bias_report, ideal_annular_omega, noise_sd_for_dispersion, synthesize_pulse_train,
    CouplingScenario, PulseTrainConfig,
};
use gratingprob::probability::{
    curve, curve_grid, near_threshold, normalized_resultant_probability, occupation_value, order_table_at, CurveKind,
    InclusionRule, OrderTable, ThresholdSide,
};
use gratingprob::quadrature::{adaptive_integrate, grating_factor_subinterval_integral, sinc_sq_integral, Interval};
use gratingprob::GratingSpec;

use crate::config::{ExperimentArgs, FigureArgs, FigureId, GratingArgs, OmegaArgs, RangeArgs, SweepArgs, TableArgs};
use crate::dataset::FigureDataset;
use crate::CliError;

const GENERATOR: &str = concat!("gratingprob-cli ", env!("CARGO_PKG_VERSION"));

fn base(kind: &str, columns: &[&str]) -> FigureDataset {
    let mut ds = FigureDataset::new(columns);
    ds.set_meta("generator", GENERATOR);
    ds.set_meta("command", kind);
    ds
}

fn set_rule(ds: &mut FigureDataset, rule: InclusionRule) {
    ds.set_meta("inclusion", format!("{:?}", rule.mode).to_lowercase());
    ds.set_meta("tie_eps", rule.tie_eps);
}

/// Resolved `[lo, hi]` and sample count, with defaults for anything unset.
fn resolve_range(r: &RangeArgs, duty: f64, lo: f64, hi: f64, samples: usize) -> Result<(f64, f64, usize), CliError> {
    let lo = r.alpha_min.or(r.j_min.map(|j| j * PI * duty)).unwrap_or(lo);
    let hi = r.alpha_max.or(r.j_max.map(|j| j * PI * duty)).unwrap_or(hi);
    let samples = r.samples.unwrap_or(samples);
    if !(lo < hi) {
        return Err(CliError::Usage(format!("alpha range is empty: [{lo}, {hi}]")));
    }
    if samples < 2 {
        return Err(CliError::Usage(format!("--samples must be at least 2, got {samples}")));
    }
    Ok((lo, hi, samples))
}

fn check_duty(duty: f64) -> Result<(), CliError> {
    if duty > 0.0 && duty < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--sigma must lie in (0, 1), got {duty}")))
    }
}

fn check_slits(n: u32) -> Result<(), CliError> {
    if n == 0 {
        Err(CliError::Usage("--n must be at least 1".into()))
    } else {
        Ok(())
    }
}

pub fn figure(args: &FigureArgs) -> Result<FigureDataset, CliError> {
    let id = args.id;
    let duty = args.sigma.unwrap_or(match id {
        FigureId::Fig3 | FigureId::Fig4 => 0.125,
        _ => 0.5,
    });
    let slits = args.n.unwrap_or(match id {
        FigureId::Fig3 | FigureId::Fig4 | FigureId::Fig5 => 4,
        _ => 257,
    });
    check_duty(duty)?;
    check_slits(slits)?;
    let rule = args.rule.rule();
    let mut ds = match id {
        FigureId::Fig3 | FigureId::Fig5 => intensity_profile(args, duty, slits)?,
        FigureId::Fig4 => subinterval_detail(args, duty, slits)?,
        FigureId::Fig6 => probability_curve(CurveKind::ResultantProbability, &args.range, duty, PI, 6.0 * PI, rule)?,
        FigureId::Fig7 => probability_curve(CurveKind::Occupation, &args.range, duty, PI, 6.0 * PI, rule)?,
        FigureId::Fig8 => threshold_tables(args.order.unwrap_or(3), duty, slits, rule)?,
        FigureId::Fig9 => probability_curve(CurveKind::ZeroOrderShare, &args.range, duty, PI / 4.0, 6.0 * PI, rule)?,
    };
    ds.set_meta("figure", id.name());
    ds.set_meta("sigma", duty);
    ds.set_meta("n", slits);
    Ok(ds)
}

/// Collective output envelope `N sinc² α` against the resultant intensity.
fn intensity_profile(args: &FigureArgs, duty: f64, slits: u32) -> Result<FigureDataset, CliError> {
    let (lo, hi, samples) = resolve_range(&args.range, duty, -4.0 * PI, 4.0 * PI, 2001)?;
    let n = slits as f64;
    let mut ds = base("figure", &["alpha", "envelope", "intensity"]);
    for a in uniform(lo, hi, samples) {
        ds.push_row(vec![a, n * sinc_sq(a), grating_intensity(a, duty, slits)]);
    }
    // the areas under the two curves, the quantities the figure compares
    let iv = Interval::new(lo, hi)?;
    let envelope_area = n * sinc_sq_integral(iv);
    let intensity_area = lobe_integral(lo, hi, duty, slits)?;
    ds.set_meta("alpha_min", lo);
    ds.set_meta("alpha_max", hi);
    ds.set_meta("envelope_area", envelope_area);
    ds.set_meta("intensity_area", intensity_area);
    Ok(ds)
}

/// Integrates the resultant intensity one grating-factor lobe at a time.
fn lobe_integral(lo: f64, hi: f64, duty: f64, slits: u32) -> Result<f64, CliError> {
    let step = PI * duty / slits as f64;
    let f = |a: f64| grating_intensity(a, duty, slits);
    let mut total = 0.0;
    let mut a = lo;
    while a < hi {
        let b = ((a / step).floor() + 1.0) * step;
        let b = if b <= a { a + step } else { b.min(hi) };
        total += adaptive_integrate(f, Interval::new(a, b)?, 1e-12)?.value;
        a = b;
    }
    Ok(total)
}

/// One subinterval `[α_j − πσ/2, α_j + πσ/2]` around the j-th peak.
fn subinterval_detail(args: &FigureArgs, duty: f64, slits: u32) -> Result<FigureDataset, CliError> {
    let j = args.order.unwrap_or(2);
    let center = order_alpha(j, duty).0;
    let half = PI * duty / 2.0;
    let (lo, hi, samples) = resolve_range(&args.range, duty, center - half, center + half, 401)?;
    let n = slits as f64;
    let peak_env = sinc_sq(center);
    let mut ds = base("figure", &["alpha", "sinc_sq", "envelope", "riemann", "intensity"]);
    for a in uniform(lo, hi, samples) {
        ds.push_row(vec![
            a,
            sinc_sq(a),
            n * sinc_sq(a),
            n * peak_env,
            grating_intensity(a, duty, slits),
        ]);
    }
    ds.set_meta("order", j);
    ds.set_meta("alpha_j", center);
    ds.set_meta("peak_area", grating_factor_subinterval_integral(j, duty, slits)?);
    ds.set_meta("riemann_area", n * PI * duty * peak_env);
    ds.set_meta(
        "envelope_area",
        n * sinc_sq_integral(Interval::new(center - half, center + half)?),
    );
    Ok(ds)
}

fn probability_curve(
    kind: CurveKind,
    range: &RangeArgs,
    duty: f64,
    lo: f64,
    hi: f64,
    rule: InclusionRule,
) -> Result<FigureDataset, CliError> {
    let (lo, hi, samples) = resolve_range(range, duty, lo, hi, 2000)?;
    let c = curve(kind, duty, lo, hi, samples, rule)?;
    let mut ds = base("figure", &["alpha_t", "j_equiv", kind.column_name()]);
    for ((a, j), v) in c.abscissa.iter().zip(c.j_equivalents()).zip(&c.ordinate) {
        ds.push_row(vec![*a, j, *v]);
    }
    ds.set_meta("alpha_min", lo);
    ds.set_meta("alpha_max", hi);
    ds.set_meta("samples", samples);
    set_rule(&mut ds, rule);
    Ok(ds)
}

fn table_columns() -> [&'static str; 6] {
    ["alpha_t", "j_equiv", "j", "P_rj", "E_rj", "omega_j"]
}

fn push_table(ds: &mut FigureDataset, t: &OrderTable) {
    for r in &t.rows {
        ds.push_row(vec![
            t.alpha_t,
            t.j_equiv,
            r.j as f64,
            r.probability,
            r.energy_share,
            r.omega,
        ]);
    }
}

fn set_totals(ds: &mut FigureDataset, prefix: &str, t: &OrderTable) {
    ds.set_meta(&format!("{prefix}alpha_t"), t.alpha_t);
    ds.set_meta(&format!("{prefix}j_equiv"), t.j_equiv);
    ds.set_meta(&format!("{prefix}P_r"), t.totals.probability);
    ds.set_meta(&format!("{prefix}E_r"), t.totals.energy);
    ds.set_meta(&format!("{prefix}omega"), t.totals.omega);
}

/// The gratings G(j−) and G(j+) on either side of order j, one table each.
fn threshold_tables(j: i64, duty: f64, slits: u32, rule: InclusionRule) -> Result<FigureDataset, CliError> {
    if j < 1 {
        return Err(CliError::Usage(format!("--order must be positive for fig8, got {j}")));
    }
    let mut ds = base("figure", &table_columns());
    let spec = GratingSpec::new(j as f64 * duty * 633.0, 633.0, duty, slits)?;
    for (side, prefix) in [(ThresholdSide::Below, "below."), (ThresholdSide::Above, "above.")] {
        let t = order_table_at(&spec, near_threshold(j, duty, side), rule)?;
        push_table(&mut ds, &t);
        set_totals(&mut ds, prefix, &t);
    }
    ds.set_meta("order", j);
    set_rule(&mut ds, rule);
    Ok(ds)
}

/// The grating and the truncation point selected by a [`GratingArgs`].
fn locate(g: &GratingArgs) -> Result<(GratingSpec, f64), CliError> {
    check_duty(g.sigma)?;
    check_slits(g.n)?;
    if let Some(w) = g.w {
        let spec = GratingSpec::new(w, g.lambda, g.sigma, g.n)?;
        return Ok((spec, truncation_alpha(&spec).0));
    }
    let alpha_t = match (g.j_equiv, g.alpha_t, g.threshold) {
        (Some(j), _, _) => j * PI * g.sigma,
        (_, Some(a), _) => a,
        (_, _, Some(j)) => near_threshold(j, g.sigma, g.side.into()),
        _ => {
            return Err(CliError::Usage(
                "one of --w, --j-equiv, --alpha-t or --threshold is required".into(),
            ))
        }
    };
    if !(alpha_t > 0.0 && alpha_t.is_finite()) {
        return Err(CliError::Usage(format!(
            "truncation point must be positive, got {alpha_t}"
        )));
    }
    // the slit whose truncation point is α_t; the threshold offset stays on α_t
    let at = match g.threshold {
        Some(j) if g.j_equiv.is_none() && g.alpha_t.is_none() => order_alpha(j, g.sigma).0,
        _ => alpha_t,
    };
    let spec = GratingSpec::new(at * g.lambda / PI, g.lambda, g.sigma, g.n)?;
    Ok((spec, alpha_t))
}

fn set_grating(ds: &mut FigureDataset, spec: &GratingSpec) {
    ds.set_meta("w_nm", spec.slit_width());
    ds.set_meta("lambda_nm", spec.wavelength());
    ds.set_meta("sigma", spec.duty());
    ds.set_meta("n", spec.slits());
}

pub fn table(args: &TableArgs) -> Result<FigureDataset, CliError> {
    let (spec, alpha_t) = locate(&args.grating)?;
    let rule = args.grating.rule.rule();
    let t = order_table_at(&spec, alpha_t, rule)?;
    let mut ds = base("table", &table_columns());
    push_table(&mut ds, &t);
    set_totals(&mut ds, "", &t);
    set_grating(&mut ds, &spec);
    set_rule(&mut ds, rule);
    Ok(ds)
}

pub fn omega(args: &OmegaArgs) -> Result<FigureDataset, CliError> {
    let (spec, alpha_t) = locate(&args.grating)?;
    let rule = args.grating.rule.rule();
    let duty = spec.duty();
    let p = normalized_resultant_probability(alpha_t, duty, rule)?;
    let omega = occupation_value(alpha_t, duty, rule)?;
    let j_equiv = if args.grating.w.is_some() {
        equivalent_order(&spec)
    } else {
        alpha_t / (PI * duty)
    };
    let mut ds = base("omega", &["alpha_t", "j_equiv", "P_r", "omega", "modulation_pct"]);
    ds.push_row(vec![alpha_t, j_equiv, p, omega, 100.0 * (omega - 1.0)]);
    let note = if (omega - 1.0).abs() < args.control_tol {
        "control grating, no significant net energy transfer expected"
    } else if omega > 1.0 {
        "enriched orders"
    } else {
        "depleted orders"
    };
    ds.set_meta("note", note);
    ds.set_meta("control_tol", args.control_tol);
    set_grating(&mut ds, &spec);
    set_rule(&mut ds, rule);
    Ok(ds)
}

pub fn experiment(args: &ExperimentArgs, seed: u64) -> Result<FigureDataset, CliError> {
    if args.omega_id.is_empty() {
        return Err(CliError::Usage("--omega-id needs at least one value".into()));
    }
    let mut ds = base(
        "experiment",
        &[
            "omega_id",
            "omega_c",
            "finite_reservoir",
            "annular",
            "ideal_annular",
            "combined",
            "omega_ex",
            "underestimate_finite",
            "underestimate_annular",
            "significant",
        ],
    );
    for (k, &omega_id) in args.omega_id.iter().enumerate() {
        let s = CouplingScenario::with_efficiency(omega_id, args.p_ratio, args.f_g, args.f_r, args.efficiency)?;
        let report = bias_report(&s, args.threshold)?;
        let mut config = PulseTrainConfig {
            cycles: args.cycles,
            samples_per_half_cycle: args.samples_per_half_cycle,
            baseline: args.baseline,
            gain: args.gain,
            noise_sd: args.noise_sd,
            seed: seed.wrapping_add(k as u64),
        };
        if let Some(target) = args.dispersion {
            config.noise_sd = noise_sd_for_dispersion(target, &s, &config)?;
        }
        let train = synthesize_pulse_train(&s, &config)?;
        ds.push_row(vec![
            omega_id,
            report.equilibrated_omega,
            report.finite_reservoir.apparent,
            report.annular.apparent,
            ideal_annular_omega(&s)?,
            apparent_omega_combined(&s)?,
            train.omega(),
            report.finite_reservoir.underestimate,
            report.annular.underestimate,
            if report.any_significant() { 1.0 } else { 0.0 },
        ]);
    }
    ds.set_meta("p_ratio", args.p_ratio);
    ds.set_meta("f_g", args.f_g);
    ds.set_meta("f_r", args.f_r);
    ds.set_meta("efficiency", args.efficiency);
    ds.set_meta("threshold", args.threshold);
    ds.set_meta("cycles", args.cycles);
    ds.set_meta("seed", seed);
    Ok(ds)
}

pub fn sweep(args: &SweepArgs) -> Result<FigureDataset, CliError> {
    check_duty(args.sigma)?;
    if args.kind.is_empty() {
        return Err(CliError::Usage("--kind needs at least one curve".into()));
    }
    let duty = args.sigma;
    let rule = args.rule.rule();
    let (lo, hi, samples) = resolve_range(&args.range, duty, PI, 6.0 * PI, 2000)?;
    let grid = curve_grid(duty, lo, hi, samples)?;
    let kinds: Vec<CurveKind> = args.kind.iter().map(|&k| k.into()).collect();
    let mut columns = vec!["alpha_t", "j_equiv"];
    columns.extend(kinds.iter().map(|k| k.column_name()));
    let mut ds = base("sweep", &columns);
    let curves = kinds
        .iter()
        .map(|&k| curve(k, duty, lo, hi, samples, rule))
        .collect::<Result<Vec<_>, _>>()?;
    for (i, &a) in grid.iter().enumerate() {
        let mut row = vec![a, a / (PI * duty)];
        row.extend(curves.iter().map(|c| c.ordinate[i]));
        ds.push_row(row);
    }
    ds.set_meta("sigma", duty);
    ds.set_meta("alpha_min", lo);
    ds.set_meta("alpha_max", hi);
    ds.set_meta("samples", samples);
    set_rule(&mut ds, rule);
    Ok(ds)
}

fn uniform(lo: f64, hi: f64, samples: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (samples - 1) as f64;
    (0..samples).map(move |i| if i + 1 == samples { hi } else { lo + step * i as f64 })
}

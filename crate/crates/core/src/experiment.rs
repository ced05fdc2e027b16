//! Occupation values inferred from detector pulse heights, and the bias
//! introduced when the coupling criteria are only approximately met.
//!
//! A grating beam G with idealized occupation Ω_id couples to an ordinary
//! reference beam R carrying `p_ratio` times its probability. After
//! coupling the detector samples an annulus holding a fraction `f_g` of G
//! and `f_r` of R. Energies are normalized so `E_G = 1`, and the energy
//! exchanged with a perfect infinite reservoir is `ΔE = |Ω_id − 1|`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Default significance threshold on Ω for [`bias_report`].
pub const DEFAULT_SIGNIFICANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingScenario {
    /// Idealized occupation value of the grating beam.
    pub omega_id: f64,
    /// Reference-to-grating probability ratio `P_R / P_G`.
    pub p_ratio: f64,
    /// Fraction of the grating beam inside the annular sampling region.
    pub f_g: f64,
    /// Fraction of the reference beam inside the annular sampling region.
    pub f_r: f64,
    /// Coupling-path efficiency η multiplying the transferred energy.
    pub efficiency: f64,
}

impl CouplingScenario {
    pub fn new(omega_id: f64, p_ratio: f64, f_g: f64, f_r: f64) -> Result<Self> {
        Self::with_efficiency(omega_id, p_ratio, f_g, f_r, 1.0)
    }

    pub fn with_efficiency(omega_id: f64, p_ratio: f64, f_g: f64, f_r: f64, efficiency: f64) -> Result<Self> {
        if !(omega_id.is_finite() && omega_id > 0.0) {
            return Err(ModelError::Domain(format!("omega_id must be positive, got {omega_id}")));
        }
        if !(p_ratio > 0.0) {
            return Err(ModelError::Domain(format!("p_ratio must be positive, got {p_ratio}")));
        }
        if !(f_g > 0.0 && f_g <= 1.0) {
            return Err(ModelError::Domain(format!("f_g must lie in (0, 1], got {f_g}")));
        }
        // f_r == f_g is admitted so the degenerate no-separation case can be reported
        if !(f_r >= 0.0 && f_r <= f_g) {
            return Err(ModelError::Domain(format!("f_r must lie in [0, f_g], got {f_r}")));
        }
        if !((0.0..=1.0).contains(&efficiency)) {
            return Err(ModelError::Domain(format!(
                "efficiency must lie in [0, 1], got {efficiency}"
            )));
        }
        Ok(Self {
            omega_id,
            p_ratio,
            f_g,
            f_r,
            efficiency,
        })
    }

    /// The apparatus parameters: reservoir ratio 100, `F_G = 0.4`, `F_R = 0.01`.
    pub fn reference_apparatus(omega_id: f64) -> Self {
        Self {
            omega_id,
            p_ratio: 100.0,
            f_g: 0.4,
            f_r: 0.01,
            efficiency: 1.0,
        }
    }

    fn with_omega(&self, omega_id: f64) -> Self {
        Self { omega_id, ..*self }
    }
}

/// Pulse heights with the reference beam blocked (`dv_g`) and coupled (`dv_gc`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulsePair {
    pub dv_g: f64,
    pub dv_gc: f64,
}

impl PulsePair {
    pub fn new(dv_g: f64, dv_gc: f64) -> Result<Self> {
        if !(dv_g > 0.0 && dv_gc > 0.0 && dv_g.is_finite() && dv_gc.is_finite()) {
            return Err(ModelError::Domain(format!(
                "pulse heights must be positive, got {dv_g} and {dv_gc}"
            )));
        }
        Ok(Self { dv_g, dv_gc })
    }
}

/// Measured occupation value `ΔV_G / ΔV_Gc`; the detector gain cancels.
pub fn omega_ex(pulses: PulsePair) -> f64 {
    pulses.dv_g / pulses.dv_gc
}

/// Common occupation value of G and R after equilibrating with a finite
/// reservoir, `(Ω_id + P_R/P_G) / (1 + P_R/P_G)`.
pub fn equilibrated_omega(scenario: &CouplingScenario) -> f64 {
    let r = scenario.p_ratio;
    if r.is_infinite() {
        return 1.0;
    }
    (scenario.omega_id + r) / (1.0 + r)
}

/// Apparent Ω when the equilibrated `E_Gc` is taken as `P_G`: `Ω_id / Ω_c`.
pub fn apparent_omega_finite_reservoir(scenario: &CouplingScenario) -> f64 {
    scenario.omega_id / equilibrated_omega(scenario)
}

fn annular_value(f_g: f64, f_r: f64, delta: f64, depleted: bool) -> Result<f64> {
    let net = (f_g - f_r) * delta;
    let denom = if depleted { f_g + net } else { f_g - net };
    if !(denom > 0.0) {
        return Err(ModelError::Domain(format!(
            "energy transfer {delta} exceeds the sampled grating energy"
        )));
    }
    Ok(f_g / denom)
}

fn transfer(scenario: &CouplingScenario) -> (f64, bool) {
    let delta = (scenario.omega_id - 1.0).abs() * scenario.efficiency;
    (delta, scenario.omega_id < 1.0)
}

/// Apparent Ω when a fraction `f_r` of the reference beam shares the
/// annular sampling region:
/// `F_G / (F_G ± (F_G − F_R) ΔE)`, `+` for a depleted beam.
pub fn apparent_omega_annular(scenario: &CouplingScenario) -> Result<f64> {
    if scenario.f_r >= scenario.f_g {
        return Err(ModelError::Domain(format!(
            "f_r = {} leaves no separation from f_g = {}",
            scenario.f_r, scenario.f_g
        )));
    }
    let (delta, depleted) = transfer(scenario);
    annular_value(scenario.f_g, scenario.f_r, delta, depleted)
}

/// The annular map with the reference beam fully masked (`F_R = 0`),
/// `1 / (1 ∓ ΔE)`.
pub fn ideal_annular_omega(scenario: &CouplingScenario) -> Result<f64> {
    let (delta, depleted) = transfer(scenario);
    annular_value(scenario.f_g, 0.0, delta, depleted)
}

/// Finite reservoir followed by partial annular separation: the annular map
/// applied to the finite-reservoir apparent value.
pub fn apparent_omega_combined(scenario: &CouplingScenario) -> Result<f64> {
    apparent_omega_annular(&scenario.with_omega(apparent_omega_finite_reservoir(scenario)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasEntry {
    /// Ω the apparatus would report under this bias.
    pub apparent: f64,
    /// Ω with the corresponding criterion met exactly.
    pub reference: f64,
    /// `|reference − 1| − |apparent − 1|`; positive means the modulation is
    /// underestimated.
    pub underestimate: f64,
    pub underestimate_pct: f64,
    /// Whether the underestimate reaches the significance threshold.
    pub significant: bool,
}

impl BiasEntry {
    fn new(apparent: f64, reference: f64, threshold: f64) -> Self {
        let underestimate = (reference - 1.0).abs() - (apparent - 1.0).abs();
        Self {
            apparent,
            reference,
            underestimate,
            underestimate_pct: 100.0 * underestimate,
            significant: underestimate.abs() >= threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub scenario: CouplingScenario,
    pub threshold: f64,
    pub omega_id: f64,
    pub equilibrated_omega: f64,
    /// Finite reservoir, measured against Ω_id.
    pub finite_reservoir: BiasEntry,
    /// Reference beam leaking into the annulus, measured against `F_R = 0`.
    pub annular: BiasEntry,
}

impl BiasReport {
    pub fn any_significant(&self) -> bool {
        self.finite_reservoir.significant || self.annular.significant
    }
}

/// Summarizes how far each non-ideal criterion pulls the reported Ω toward 1.
pub fn bias_report(scenario: &CouplingScenario, threshold: f64) -> Result<BiasReport> {
    if !(threshold > 0.0) {
        return Err(ModelError::Domain(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let finite = apparent_omega_finite_reservoir(scenario);
    let ideal = ideal_annular_omega(scenario)?;
    let annular = if scenario.f_r >= scenario.f_g {
        // no separation: the transfers into and out of the annulus cancel
        1.0
    } else {
        apparent_omega_annular(scenario)?
    };
    Ok(BiasReport {
        scenario: *scenario,
        threshold,
        omega_id: scenario.omega_id,
        equilibrated_omega: equilibrated_omega(scenario),
        finite_reservoir: BiasEntry::new(finite, scenario.omega_id, threshold),
        annular: BiasEntry::new(annular, ideal, threshold),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseTrainConfig {
    pub cycles: usize,
    /// Detector samples in each half of a chopper cycle.
    pub samples_per_half_cycle: usize,
    /// Steady detector offset present in both acquisitions.
    pub baseline: f64,
    /// Detector gain κ.
    pub gain: f64,
    /// Standard deviation of additive Gaussian noise on every sample.
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for PulseTrainConfig {
    fn default() -> Self {
        Self {
            cycles: 100,
            samples_per_half_cycle: 10,
            baseline: 0.2,
            gain: 1.0,
            noise_sd: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseTrain {
    /// Samples with the reference beam blocked.
    pub blocked: Vec<f64>,
    /// Samples with the reference beam coupled.
    pub coupled: Vec<f64>,
    pub pulses: PulsePair,
}

impl PulseTrain {
    pub fn omega(&self) -> f64 {
        omega_ex(self.pulses)
    }
}

/// Noise-free pulse heights `(ΔV_G, ΔV_Gc)` for a scenario.
pub fn ideal_pulse_heights(scenario: &CouplingScenario, gain: f64) -> Result<(f64, f64)> {
    let fr = apparent_omega_finite_reservoir(scenario);
    let (delta, depleted) = transfer(&scenario.with_omega(fr));
    let blocked = gain * scenario.f_g;
    let net = (scenario.f_g - scenario.f_r) * delta;
    let coupled = gain
        * if depleted {
            scenario.f_g + net
        } else {
            scenario.f_g - net
        };
    if !(coupled > 0.0) {
        return Err(ModelError::Domain("coupled pulse height is not positive".into()));
    }
    Ok((blocked, coupled))
}

/// Per-sample noise giving a target standard deviation of the recovered Ω.
pub fn noise_sd_for_dispersion(target_sd: f64, scenario: &CouplingScenario, config: &PulseTrainConfig) -> Result<f64> {
    let (hb, hc) = ideal_pulse_heights(scenario, config.gain)?;
    let m = (config.cycles * config.samples_per_half_cycle) as f64;
    // height = mean(on) − mean(off), each over m samples
    let height_sd_per_noise = (2.0 / m).sqrt();
    let omega = hb / hc;
    let rel = height_sd_per_noise * (1.0 / (hb * hb) + 1.0 / (hc * hc)).sqrt();
    Ok(target_sd / (omega * rel))
}

fn square_wave(
    height: f64,
    baseline: f64,
    config: &PulseTrainConfig,
    noise: &Option<Normal<f64>>,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, f64) {
    let half = config.samples_per_half_cycle;
    let mut samples = Vec::with_capacity(2 * half * config.cycles);
    let mut heights = 0.0;
    for _ in 0..config.cycles {
        let mut on = 0.0;
        let mut off = 0.0;
        for k in 0..2 * half {
            let level = if k < half { baseline + height } else { baseline };
            let v = match noise {
                Some(n) => level + n.sample(rng),
                None => level,
            };
            if k < half {
                on += v;
            } else {
                off += v;
            }
            samples.push(v);
        }
        // peak height of this cycle
        heights += (on - off) / half as f64;
    }
    (samples, heights / config.cycles as f64)
}

/// Synthesizes the two chopped square-wave acquisitions and recovers the
/// pulse heights by averaging over all cycles.
///
/// The coupled acquisition also carries the reference beam's steady residual
/// in its baseline; peak-height differencing removes both baselines.
pub fn synthesize_pulse_train(scenario: &CouplingScenario, config: &PulseTrainConfig) -> Result<PulseTrain> {
    if config.cycles == 0 || config.samples_per_half_cycle == 0 {
        return Err(ModelError::Domain(
            "need at least one cycle and one sample per half cycle".into(),
        ));
    }
    if !(config.noise_sd >= 0.0 && config.noise_sd.is_finite()) {
        return Err(ModelError::Domain(format!(
            "noise_sd must be non-negative, got {}",
            config.noise_sd
        )));
    }
    if !(config.gain > 0.0) {
        return Err(ModelError::Domain(format!(
            "gain must be positive, got {}",
            config.gain
        )));
    }
    let (hb, hc) = ideal_pulse_heights(scenario, config.gain)?;
    let noise = if config.noise_sd > 0.0 {
        Some(Normal::new(0.0, config.noise_sd).map_err(|e| ModelError::Domain(e.to_string()))?)
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let residual = config.gain * scenario.f_r * scenario.p_ratio.min(1e6);
    let (blocked, dv_g) = square_wave(hb, config.baseline, config, &noise, &mut rng);
    let (coupled, dv_gc) = square_wave(hc, config.baseline + residual, config, &noise, &mut rng);
    let pulses = PulsePair::new(dv_g, dv_gc)?;
    Ok(PulseTrain {
        blocked,
        coupled,
        pulses,
    })
}

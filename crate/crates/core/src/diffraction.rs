//! Single-slit and N-slit intensity in α-space.
//!
//! The α coordinate is `π w sin θ / λ`. A slit's far-field envelope is
//! `sinc² α`; an N-slit grating of duty cycle σ multiplies it by the grating
//! factor `(sin(Nα/σ) / sin(α/σ))²`, whose principal maxima sit at
//! `α_j = jπσ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Below this |α| the sinc is evaluated from its Taylor series.
const SINC_SERIES_BAND: f64 = 1e-6;

/// Below this |Nδ| (δ = distance of α/σ from the nearest multiple of π) the
/// grating factor is evaluated from its series about the principal maximum.
const GRATING_SERIES_BAND: f64 = 1e-6;

/// A coordinate in α-space.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Alpha(pub f64);

impl Alpha {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

/// Physical description of a transmission grating and its illumination.
///
/// Lengths are in nanometres. The period is derived from the slit width and
/// duty cycle, so `p = w / σ` holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GratingSpec {
    slit_width: f64,
    period: f64,
    duty: f64,
    wavelength: f64,
    slits: u32,
}

impl GratingSpec {
    /// Builds a grating from slit width `w`, wavelength `λ` (both nm), duty
    /// cycle σ and the number of irradiated slits.
    pub fn new(slit_width_nm: f64, wavelength_nm: f64, duty: f64, slits: u32) -> Result<Self> {
        if !(slit_width_nm.is_finite() && slit_width_nm > 0.0) {
            return Err(ModelError::InvalidGrating(format!(
                "slit width must be positive and finite, got {slit_width_nm}"
            )));
        }
        if !(wavelength_nm.is_finite() && wavelength_nm > 0.0) {
            return Err(ModelError::InvalidGrating(format!(
                "wavelength must be positive and finite, got {wavelength_nm}"
            )));
        }
        if !(duty > 0.0 && duty < 1.0) {
            return Err(ModelError::InvalidGrating(format!(
                "duty cycle must lie in (0, 1), got {duty}"
            )));
        }
        if slit_width_nm < wavelength_nm {
            return Err(ModelError::InvalidGrating(format!(
                "sub-wavelength slit: w = {slit_width_nm} nm < lambda = {wavelength_nm} nm"
            )));
        }
        if slits == 0 {
            return Err(ModelError::InvalidGrating(
                "at least one slit must be irradiated".into(),
            ));
        }
        Ok(Self {
            slit_width: slit_width_nm,
            period: slit_width_nm / duty,
            duty,
            wavelength: wavelength_nm,
            slits,
        })
    }

    /// A Ronchi ruling (σ = 0.5).
    pub fn ronchi(slit_width_nm: f64, wavelength_nm: f64, slits: u32) -> Result<Self> {
        Self::new(slit_width_nm, wavelength_nm, 0.5, slits)
    }

    /// The Ronchi ruling whose truncation point sits at the continuum order
    /// `j_equiv`, i.e. `w = j_equiv · λ / 2`.
    pub fn ronchi_at_order(j_equiv: f64, wavelength_nm: f64, slits: u32) -> Result<Self> {
        Self::ronchi(j_equiv * wavelength_nm / 2.0, wavelength_nm, slits)
    }

    pub fn slit_width(&self) -> f64 {
        self.slit_width
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn duty(&self) -> f64 {
        self.duty
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn slits(&self) -> u32 {
        self.slits
    }
}

/// α at diffraction angle `theta_deg` (degrees): `(π w / λ) sin θ`.
pub fn alpha_from_theta(spec: &GratingSpec, theta_deg: f64) -> Result<Alpha> {
    if !(-90.0..=90.0).contains(&theta_deg) {
        return Err(ModelError::AngleOutOfRange(theta_deg));
    }
    // sin(90°) must be exactly 1 so this agrees with `truncation_alpha`.
    let s = if theta_deg == 90.0 {
        1.0
    } else if theta_deg == -90.0 {
        -1.0
    } else {
        theta_deg.to_radians().sin()
    };
    Ok(Alpha(PI * spec.slit_width / spec.wavelength * s))
}

/// Envelope truncation point `α_t = π w / λ` (grazing emergence, θ = 90°).
pub fn truncation_alpha(spec: &GratingSpec) -> Alpha {
    Alpha(PI * spec.slit_width / spec.wavelength)
}

/// Position of the j-th principal maximum, `jπσ`.
pub fn order_alpha(j: i64, duty: f64) -> Alpha {
    Alpha(j as f64 * PI * duty)
}

/// Continuum order index of the truncation point, `α_t / (πσ)`.
///
/// For a Ronchi ruling this is `2w/λ`.
pub fn equivalent_order(spec: &GratingSpec) -> f64 {
    if spec.duty == 0.5 {
        2.0 * spec.slit_width / spec.wavelength
    } else {
        truncation_alpha(spec).0 / (PI * spec.duty)
    }
}

/// `sin α / α`, equal to 1 at the origin.
pub fn sinc(alpha: f64) -> f64 {
    if alpha.abs() < SINC_SERIES_BAND {
        let a2 = alpha * alpha;
        1.0 - a2 / 6.0 + a2 * a2 / 120.0
    } else {
        alpha.sin() / alpha
    }
}

/// Single-slit intensity envelope `sinc² α`.
pub fn sinc_sq(alpha: f64) -> f64 {
    let s = sinc(alpha);
    s * s
}

/// `(sin(Nβ) / sin β)²` with `β = α/σ`; equals N² at every multiple of π.
pub fn grating_factor(alpha: f64, duty: f64, slits: u32) -> f64 {
    let n = slits as f64;
    let beta = alpha / duty;
    // Reduce to the offset from the nearest principal maximum. The squared
    // ratio is π-periodic in β, so the sign flip from the shift drops out.
    let delta = beta - (beta / PI).round() * PI;
    if (n * delta).abs() < GRATING_SERIES_BAND {
        let d2 = delta * delta;
        let n2 = n * n;
        let ratio = n * (1.0 - (n2 - 1.0) * d2 / 6.0 + (3.0 * n2 * n2 - 10.0 * n2 + 7.0) * d2 * d2 / 360.0);
        ratio * ratio
    } else {
        let ratio = (n * delta).sin() / delta.sin();
        ratio * ratio
    }
}

/// Resultant intensity of an N-slit grating, `sinc² α · (sin(Nα/σ)/sin(α/σ))²`.
///
/// Not rescaled by N⁻², so principal maxima reach `N² sinc² α_j`.
pub fn grating_intensity(alpha: f64, duty: f64, slits: u32) -> f64 {
    sinc_sq(alpha) * grating_factor(alpha, duty, slits)
}

//! Sine integral, closed-form `sinc²` integrals and an adaptive
//! Gauss–Kronrod integrator.
//!
//! The closed forms are what the probability model uses. The adaptive
//! integrator shares no code with them and serves as the cross-check.

// node, weight and reference tables keep all their published digits
#![allow(clippy::excessive_precision)]

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diffraction::{grating_intensity, order_alpha};
use crate::error::{ModelError, Result};

/// A closed interval `[lo, hi]` in α-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(ModelError::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// `[-half_width, half_width]`
    pub fn symmetric(half_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Sine integral `Si(x) = ∫₀ˣ sin t / t dt`.
///
/// Power series for |x| ≤ 4; beyond that the auxiliary functions come from
/// the continued fraction for `E₁(ix)`, evaluated with the modified Lentz
/// method.
pub fn si(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= 4.0 {
        si_series(ax)
    } else {
        si_continued_fraction(ax)
    };
    v.copysign(x)
}

fn si_series(x: f64) -> f64 {
    // Σ (-1)^k x^(2k+1) / ((2k+1)(2k+1)!)
    let x2 = x * x;
    let mut term = x; // (-1)^k x^(2k+1) / (2k+1)!
    let mut sum = x;
    let mut k = 0usize;
    loop {
        k += 1;
        let m = (2 * k) as f64;
        term *= -x2 / (m * (m + 1.0));
        let add = term / (m + 1.0);
        sum += add;
        if add.abs() < f64::EPSILON * sum.abs() || k > 60 {
            break;
        }
    }
    sum
}

fn si_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 2..1000 {
        let a = -((i - 1) * (i - 1)) as f64;
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < f64::EPSILON {
            break;
        }
    }
    // h = e^{ix} E₁(ix); Si(x) = π/2 + Im(e^{-ix} h)
    let h = Complex64::new(x.cos(), -x.sin()) * h;
    FRAC_PI_2 + h.im
}

/// `∫₀ˣ sinc² t dt = Si(2x) − sin² x / x`, odd in x.
fn sinc_sq_antiderivative(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        return sinc_sq_antiderivative_series(x);
    }
    let s = x.sin();
    si(2.0 * x) - s * s / x
}

fn sinc_sq_antiderivative_series(x: f64) -> f64 {
    let x2 = x * x;
    x * (1.0 - x2 / 9.0 + 2.0 * x2 * x2 / 225.0)
}

/// `∫ sinc² α dα` over the interval, in closed form.
pub fn sinc_sq_integral(iv: Interval) -> f64 {
    if iv.lo == iv.hi {
        return 0.0;
    }
    sinc_sq_antiderivative(iv.hi) - sinc_sq_antiderivative(iv.lo)
}

/// Symmetric integral `∫_{-a}^{a} sinc² α dα` for `a ≥ 0`.
pub fn symmetric_sinc_sq_integral(half_width: f64) -> f64 {
    2.0 * sinc_sq_antiderivative(half_width.abs())
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 48;

/// One 15-point Kronrod panel, returning (kronrod, |kronrod − gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Accumulator {
    value: f64,
    error: f64,
    evaluations: usize,
    converged: bool,
}

fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: (f64, f64),
    tol_density: f64,
    depth: u32,
    acc: &mut Accumulator,
) {
    let (value, error) = whole;
    let local_tol = (tol_density * (b - a)).max(50.0 * f64::EPSILON * value.abs());
    if error <= local_tol {
        acc.value += value;
        acc.error += error;
        return;
    }
    if depth >= MAX_DEPTH {
        acc.value += value;
        acc.error += error;
        acc.converged = false;
        return;
    }
    let mid = 0.5 * (a + b);
    let left = gk15(f, a, mid);
    let right = gk15(f, mid, b);
    acc.evaluations += 30;
    refine(f, a, mid, left, tol_density, depth + 1, acc);
    refine(f, mid, b, right, tol_density, depth + 1, acc);
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `iv`.
///
/// Panels are bisected until each one's Kronrod–Gauss difference falls below
/// its width-proportional share of `tol`. Deterministic for fixed inputs.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(f: F, iv: Interval, tol: f64) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(ModelError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if iv.width() == 0.0 {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let mut acc = Accumulator {
        value: 0.0,
        error: 0.0,
        evaluations: 15,
        converged: true,
    };
    let whole = gk15(&f, iv.lo, iv.hi);
    refine(&f, iv.lo, iv.hi, whole, tol / iv.width(), 0, &mut acc);
    if !acc.value.is_finite() {
        return Err(ModelError::Domain("integrand is not finite on the interval".into()));
    }
    if acc.converged {
        Ok(QuadratureResult {
            value: acc.value,
            abs_error_estimate: acc.error,
            evaluations: acc.evaluations,
        })
    } else {
        Err(ModelError::NoConvergence {
            value: acc.value,
            abs_error_estimate: acc.error,
            evaluations: acc.evaluations,
        })
    }
}

/// Integral of the full resultant intensity over the j-th subinterval
/// `[α_j − πσ/2, α_j + πσ/2]`.
///
/// For large N this approaches `Nπσ · sinc² α_j`. Panels are split at the
/// grating-factor nulls so each one holds a single lobe.
pub fn grating_factor_subinterval_integral(j: i64, duty: f64, slits: u32) -> Result<f64> {
    let center = order_alpha(j, duty).0;
    let half = PI * duty / 2.0;
    let lobes = slits.max(1) as usize;
    // nulls of sin(Nα/σ) are spaced πσ/N apart, one of them at α_j + πσ/N
    let step = 2.0 * half / lobes as f64;
    let f = |a: f64| grating_intensity(a, duty, slits);
    let mut total = 0.0;
    for k in 0..lobes {
        let lo = center - half + k as f64 * step;
        let hi = if k + 1 == lobes { center + half } else { lo + step };
        total += adaptive_integrate(f, Interval::new(lo, hi)?, 1e-12 * slits as f64)?.value;
    }
    Ok(total)
}

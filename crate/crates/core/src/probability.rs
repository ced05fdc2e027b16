//! Output and resultant probability of a grating, occupation values and the
//! 0th-order share.
//!
//! The collective output probability is the truncated envelope integral
//! `∫_{-α_t}^{α_t} sinc² α dα`. The resultant probability is the Riemann sum
//! of the envelope over the propagating principal maxima, `Σ πσ sinc² α_j`.
//! Their ratio is the normalized resultant probability, and its reciprocal
//! the occupation value (energy per unit probability, with the output energy
//! normalized to 1). All of these are independent of N.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::diffraction::{equivalent_order, order_alpha, sinc_sq, truncation_alpha, GratingSpec};
use crate::error::{ModelError, Result};
use crate::quadrature::symmetric_sinc_sq_integral;

/// Offset used to evaluate just below (`j−`) or just above (`j+`) an order
/// threshold, and to bracket discontinuities when sampling curves.
pub const THRESHOLD_OFFSET: f64 = 1e-6;

/// Default tie tolerance for [`InclusionMode::Inclusive`].
pub const DEFAULT_TIE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InclusionMode {
    /// Orders with `|α_j| < α_t`.
    StrictBelow,
    /// Orders with `|α_j| ≤ α_t + ε_tie`.
    Inclusive,
}

/// Which principal maxima count as propagating for a given truncation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InclusionRule {
    pub mode: InclusionMode,
    pub tie_eps: f64,
}

impl InclusionRule {
    pub fn inclusive(tie_eps: f64) -> Self {
        Self {
            mode: InclusionMode::Inclusive,
            tie_eps: tie_eps.max(0.0),
        }
    }

    pub fn strict_below() -> Self {
        Self {
            mode: InclusionMode::StrictBelow,
            tie_eps: 0.0,
        }
    }

    fn admits(&self, order_pos: f64, alpha_t: f64) -> bool {
        match self.mode {
            InclusionMode::StrictBelow => order_pos < alpha_t,
            InclusionMode::Inclusive => order_pos <= alpha_t + self.tie_eps,
        }
    }
}

impl Default for InclusionRule {
    fn default() -> Self {
        Self::inclusive(DEFAULT_TIE_EPS)
    }
}

/// Side of an order threshold: `Below` marginally excludes order j, `Above`
/// marginally includes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSide {
    Below,
    Above,
}

/// Truncation point `α_j ∓ THRESHOLD_OFFSET` for the gratings G(j−) / G(j+).
pub fn near_threshold(j: i64, duty: f64, side: ThresholdSide) -> f64 {
    let a = order_alpha(j, duty).0;
    match side {
        ThresholdSide::Below => a - THRESHOLD_OFFSET,
        ThresholdSide::Above => a + THRESHOLD_OFFSET,
    }
}

/// Envelope value at the j-th order.
///
/// Exactly zero when `α_j` is a nonzero multiple of π (e.g. even orders of a
/// Ronchi ruling).
pub fn order_envelope(j: i64, duty: f64) -> f64 {
    let jd = j as f64 * duty;
    if j != 0 && jd.fract() == 0.0 {
        0.0
    } else {
        sinc_sq(order_alpha(j, duty).0)
    }
}

fn check_duty(duty: f64) -> Result<()> {
    if duty > 0.0 && duty < 1.0 {
        Ok(())
    } else {
        Err(ModelError::Domain(format!("duty cycle must lie in (0, 1), got {duty}")))
    }
}

fn check_alpha_t(alpha_t: f64) -> Result<()> {
    if alpha_t.is_finite() && alpha_t > 0.0 {
        Ok(())
    } else {
        Err(ModelError::Domain(format!(
            "truncation point must be positive and finite, got {alpha_t}"
        )))
    }
}

fn check_zero_order_margin(alpha_t: f64, duty: f64) -> Result<()> {
    check_alpha_t(alpha_t)?;
    check_duty(duty)?;
    if alpha_t < PI * duty * (1.0 - 1e-12) {
        return Err(ModelError::Domain(format!(
            "truncation point {alpha_t} lies below the first order position {}",
            PI * duty
        )));
    }
    Ok(())
}

/// Highest propagating order n, so that the orders are `-n..=n`.
pub fn max_propagating_order(alpha_t: f64, duty: f64, rule: InclusionRule) -> Result<i64> {
    check_alpha_t(alpha_t)?;
    check_duty(duty)?;
    let spacing = PI * duty;
    let mut n = (alpha_t / spacing).floor() as i64;
    // settle rounding at the boundary against the same comparison the rule uses
    while n > 0 && !rule.admits(order_alpha(n, duty).0, alpha_t) {
        n -= 1;
    }
    while rule.admits(order_alpha(n + 1, duty).0, alpha_t) {
        n += 1;
    }
    Ok(n)
}

/// The symmetric set of propagating orders `{-n, …, n}`.
pub fn propagating_orders(alpha_t: f64, duty: f64, rule: InclusionRule) -> Result<Vec<i64>> {
    let n = max_propagating_order(alpha_t, duty, rule)?;
    Ok((-n..=n).collect())
}

/// `Σ_{j=-n}^{n} sinc² α_j` over the propagating orders.
fn envelope_sum(n: i64, duty: f64) -> f64 {
    // sum from the outermost order inwards
    let tail: f64 = (1..=n).rev().map(|j| order_envelope(j, duty)).sum();
    1.0 + 2.0 * tail
}

/// Collective output probability `N ∫_{-α_t}^{α_t} sinc² α dα`.
pub fn output_probability(alpha_t: f64, slits: u32) -> Result<f64> {
    check_alpha_t(alpha_t)?;
    Ok(slits as f64 * symmetric_sinc_sq_integral(alpha_t))
}

/// Unnormalized resultant probability `Σ πσ N sinc² α_j` over the
/// propagating orders.
pub fn resultant_sum(alpha_t: f64, duty: f64, slits: u32, rule: InclusionRule) -> Result<f64> {
    let n = max_propagating_order(alpha_t, duty, rule)?;
    Ok(PI * duty * slits as f64 * envelope_sum(n, duty))
}

/// Resultant probability normalized by the output probability.
///
/// Tends to 1 for dense sampling (σ → 0) and for coarse gratings
/// (α_t → ∞); departs from 1 near order thresholds when σ is large.
pub fn normalized_resultant_probability(alpha_t: f64, duty: f64, rule: InclusionRule) -> Result<f64> {
    check_zero_order_margin(alpha_t, duty)?;
    Ok(resultant_sum(alpha_t, duty, 1, rule)? / symmetric_sinc_sq_integral(alpha_t))
}

/// Probability on the single order j, `πσ sinc² α_j / ∫_{-α_t}^{α_t} sinc²`.
pub fn order_probability(j: i64, alpha_t: f64, duty: f64, rule: InclusionRule) -> Result<f64> {
    let n = max_propagating_order(alpha_t, duty, rule)?;
    if j.abs() > n {
        return Err(ModelError::OrderNotPropagating { j, alpha_t });
    }
    Ok(PI * duty * order_envelope(j, duty) / symmetric_sinc_sq_integral(alpha_t))
}

/// Occupation value Ω: reciprocal of the normalized resultant probability.
///
/// Ω > 1 means the propagating orders are enriched, Ω < 1 depleted.
pub fn occupation_value(alpha_t: f64, duty: f64, rule: InclusionRule) -> Result<f64> {
    Ok(1.0 / normalized_resultant_probability(alpha_t, duty, rule)?)
}

/// Direction of a probability change between output and resultant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilityChange {
    Created,
    Annihilated,
}

/// Occupation value from a probability change at fixed energy,
/// `(1 ± ΔP/P_o)⁻¹`, `+` for creation.
pub fn omega_from_delta_p(delta_p: f64, p_o: f64, change: ProbabilityChange) -> Result<f64> {
    if !(p_o > 0.0) {
        return Err(ModelError::Domain(format!(
            "output probability must be positive, got {p_o}"
        )));
    }
    if !(delta_p >= 0.0) {
        return Err(ModelError::Domain(format!(
            "probability change must be non-negative, got {delta_p}"
        )));
    }
    let ratio = delta_p / p_o;
    match change {
        ProbabilityChange::Created => Ok(1.0 / (1.0 + ratio)),
        ProbabilityChange::Annihilated if delta_p >= p_o => Err(ModelError::Domain(format!(
            "cannot annihilate {delta_p} from an output probability of {p_o}"
        ))),
        ProbabilityChange::Annihilated => Ok(1.0 / (1.0 - ratio)),
    }
}

/// Fraction of the resultant probability carried by the 0th order,
/// `1 / Σ sinc² α_j`. Piecewise constant between order positions.
pub fn zero_order_share(alpha_t: f64, duty: f64, rule: InclusionRule) -> Result<f64> {
    let n = max_propagating_order(alpha_t, duty, rule)?;
    Ok(1.0 / envelope_sum(n, duty))
}

/// Energy on the 0th order for output energy `e_o`.
pub fn zero_order_energy(alpha_t: f64, duty: f64, e_o: f64, rule: InclusionRule) -> Result<f64> {
    if !(e_o > 0.0) {
        return Err(ModelError::Domain(format!("output energy must be positive, got {e_o}")));
    }
    Ok(e_o * zero_order_share(alpha_t, duty, rule)?)
}

/// Upward jump of the normalized resultant probability as α_t crosses order
/// j from below: `2πσ sinc² α_j / ∫_{-α_j}^{α_j} sinc²`.
pub fn edge_jump(j: i64, duty: f64) -> Result<f64> {
    check_duty(duty)?;
    if j <= 0 {
        return Err(ModelError::Domain(format!(
            "edge jumps are defined for positive orders, got {j}"
        )));
    }
    let a = order_alpha(j, duty).0;
    Ok(2.0 * PI * duty * order_envelope(j, duty) / symmetric_sinc_sq_integral(a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderRow {
    pub j: i64,
    /// Resultant probability on this order.
    pub probability: f64,
    /// Share of the (unit) output energy that equilibrates onto this order.
    pub energy_share: f64,
    /// Occupation value of this order.
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderTotals {
    pub probability: f64,
    pub energy: f64,
    pub omega: f64,
}

/// Probability and energy on each propagating order of one grating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderTable {
    pub grating: GratingSpec,
    pub alpha_t: f64,
    pub j_equiv: f64,
    pub rows: Vec<OrderRow>,
    pub totals: OrderTotals,
}

impl OrderTable {
    pub fn row(&self, j: i64) -> Option<&OrderRow> {
        self.rows.iter().find(|r| r.j == j)
    }
}

/// Tabulates P, E and Ω for every propagating order, with unit output energy.
///
/// Null orders are kept as zero-probability rows. Their Ω is the limit
/// `E_rj / P_rj = 1 / P_r`, the same as every other row.
pub fn order_table(spec: &GratingSpec, rule: InclusionRule) -> Result<OrderTable> {
    order_table_at(spec, truncation_alpha(spec).0, rule)
}

/// [`order_table`] evaluated at an explicit truncation point, e.g. one of the
/// [`near_threshold`] offsets.
pub fn order_table_at(spec: &GratingSpec, alpha_t: f64, rule: InclusionRule) -> Result<OrderTable> {
    let duty = spec.duty();
    check_zero_order_margin(alpha_t, duty)?;
    let orders = propagating_orders(alpha_t, duty, rule)?;
    let norm = symmetric_sinc_sq_integral(alpha_t);
    let probs: Vec<f64> = orders
        .iter()
        .map(|&j| PI * duty * order_envelope(j, duty) / norm)
        .collect();
    let n = *orders.last().unwrap_or(&0);
    let total_p = PI * duty * envelope_sum(n, duty) / norm;
    let omega = 1.0 / total_p;
    let rows: Vec<OrderRow> = orders
        .iter()
        .zip(&probs)
        .map(|(&j, &p)| {
            let e = p / total_p;
            OrderRow {
                j,
                probability: p,
                energy_share: e,
                omega: if p > 0.0 { e / p } else { omega },
            }
        })
        .collect();
    let energy = rows.iter().map(|r| r.energy_share).sum();
    Ok(OrderTable {
        grating: *spec,
        alpha_t,
        j_equiv: if alpha_t == truncation_alpha(spec).0 {
            equivalent_order(spec)
        } else {
            alpha_t / (PI * duty)
        },
        rows,
        totals: OrderTotals {
            probability: total_p,
            energy,
            omega,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    ResultantProbability,
    Occupation,
    ZeroOrderShare,
    ZeroOrderEnergy,
}

impl CurveKind {
    pub fn column_name(self) -> &'static str {
        match self {
            CurveKind::ResultantProbability => "P_r",
            CurveKind::Occupation => "omega",
            CurveKind::ZeroOrderShare => "R_0",
            CurveKind::ZeroOrderEnergy => "E_r0",
        }
    }
}

/// A sampled function of the truncation point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityCurve {
    pub kind: CurveKind,
    pub duty: f64,
    /// Truncation points α_t, strictly increasing.
    pub abscissa: Vec<f64>,
    pub ordinate: Vec<f64>,
}

impl ProbabilityCurve {
    /// Abscissa as continuum order index `α_t / (πσ)`.
    pub fn j_equivalents(&self) -> Vec<f64> {
        self.abscissa.iter().map(|a| a / (PI * self.duty)).collect()
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }
}

/// Sample points: a uniform grid over the range plus a pair at
/// `α_j ± THRESHOLD_OFFSET` around every order inside it.
pub fn curve_grid(duty: f64, lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>> {
    check_duty(duty)?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(ModelError::InvalidInterval { lo, hi });
    }
    if samples < 2 {
        return Err(ModelError::Domain(format!("need at least 2 samples, got {samples}")));
    }
    let step = (hi - lo) / (samples - 1) as f64;
    let mut pts: Vec<f64> = (0..samples)
        .map(|i| if i + 1 == samples { hi } else { lo + step * i as f64 })
        .collect();
    let first = (lo / (PI * duty)).floor() as i64;
    let last = (hi / (PI * duty)).ceil() as i64;
    for j in first..=last {
        let a = order_alpha(j, duty).0;
        for p in [a - THRESHOLD_OFFSET, a + THRESHOLD_OFFSET] {
            if p > lo && p < hi {
                pts.push(p);
            }
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    Ok(pts)
}

/// Samples `kind` over `[lo, hi]`.
pub fn curve(
    kind: CurveKind,
    duty: f64,
    lo: f64,
    hi: f64,
    samples: usize,
    rule: InclusionRule,
) -> Result<ProbabilityCurve> {
    let abscissa = curve_grid(duty, lo, hi, samples)?;
    let ordinate = abscissa
        .iter()
        .map(|&a| match kind {
            CurveKind::ResultantProbability => normalized_resultant_probability(a, duty, rule),
            CurveKind::Occupation => occupation_value(a, duty, rule),
            CurveKind::ZeroOrderShare => zero_order_share(a, duty, rule),
            CurveKind::ZeroOrderEnergy => zero_order_energy(a, duty, 1.0, rule),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbabilityCurve {
        kind,
        duty,
        abscissa,
        ordinate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{adaptive_integrate, Interval};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const A3: f64 = 1.5 * PI;

    fn below3() -> f64 {
        near_threshold(3, 0.5, ThresholdSide::Below)
    }

    fn above3() -> f64 {
        near_threshold(3, 0.5, ThresholdSide::Above)
    }

    /// Direct-sum oracle over j with an explicit loop and adaptive quadrature
    /// for the normalization.
    fn oracle_normalized(alpha_t: f64, duty: f64) -> f64 {
        let mut sum = 0.0;
        let mut j = -1000i64;
        while j <= 1000 {
            let a = j as f64 * PI * duty;
            if a.abs() <= alpha_t {
                sum += PI * duty * sinc_sq(a);
            }
            j += 1;
        }
        let integral = adaptive_integrate(sinc_sq, Interval::symmetric(alpha_t).unwrap(), 1e-12)
            .unwrap()
            .value;
        sum / integral
    }

    #[test]
    fn propagating_orders_examples() {
        let rule = InclusionRule::default();
        assert_eq!(propagating_orders(PI, 0.5, rule).unwrap(), vec![-2, -1, 0, 1, 2]);
        assert_eq!(
            propagating_orders(PI, 0.5, InclusionRule::strict_below()).unwrap(),
            vec![-1, 0, 1]
        );
        assert_eq!(
            propagating_orders(2.63 * PI / 2.0, 0.5, rule).unwrap(),
            (-2..=2).collect::<Vec<_>>()
        );
        assert_eq!(
            propagating_orders(3.16 * PI / 2.0, 0.5, rule).unwrap(),
            (-3..=3).collect::<Vec<_>>()
        );
        assert_eq!(
            propagating_orders(below3(), 0.5, InclusionRule::strict_below())
                .unwrap()
                .len(),
            5
        );
        assert_eq!(propagating_orders(above3(), 0.5, rule).unwrap().len(), 7);
        assert_eq!(propagating_orders(0.1, 0.5, rule).unwrap(), vec![0]);
        assert!(propagating_orders(-1.0, 0.5, rule).is_err());
        assert!(propagating_orders(1.0, 1.5, rule).is_err());
    }

    #[test]
    fn exact_threshold_follows_rule() {
        let a = order_alpha(12, 0.125).0;
        assert_eq!(max_propagating_order(a, 0.125, InclusionRule::default()).unwrap(), 12);
        assert_eq!(
            max_propagating_order(a, 0.125, InclusionRule::strict_below()).unwrap(),
            11
        );
    }

    #[test]
    fn output_probability_examples() {
        assert!((output_probability(1e6, 1).unwrap() - PI).abs() < 1e-3);
        let p1 = output_probability(A3, 1).unwrap();
        assert!((p1 - 2.92503).abs() < 1e-4);
        let p4 = output_probability(A3, 4).unwrap();
        assert!((p4 - 11.70013).abs() < 4e-4);
        assert_relative_eq!(p4, 4.0 * p1, max_relative = 1e-15);
        assert!(output_probability(0.0, 1).is_err());
    }

    #[test]
    fn resultant_sum_examples() {
        let rule = InclusionRule::default();
        // (π/2)(1 + 8/π² + 8/(9π²)); mpmath 2.98550693205618849...
        let above = resultant_sum(above3(), 0.5, 1, rule).unwrap();
        let direct = PI / 2.0 * (1.0 + 8.0 / (PI * PI) + 8.0 / (9.0 * PI * PI));
        assert_relative_eq!(above, direct, max_relative = 1e-14);
        assert_relative_eq!(above, 2.985_506_932_056_188, max_relative = 1e-14);
        // mpmath 2.84403587153005930...
        let below = resultant_sum(below3(), 0.5, 1, rule).unwrap();
        assert_relative_eq!(below, 2.844_035_871_530_059, max_relative = 1e-14);
        assert_relative_eq!(
            resultant_sum(below3(), 0.5, 257, rule).unwrap(),
            257.0 * below,
            max_relative = 1e-14
        );
    }

    #[test]
    fn riemann_sum_tends_to_integral() {
        let at = 3.0 * PI + 0.1;
        let out = output_probability(at, 1).unwrap();
        let coarse = (resultant_sum(at, 0.25, 1, InclusionRule::default()).unwrap() - out).abs();
        let fine = (resultant_sum(at, 1.0 / 512.0, 1, InclusionRule::default()).unwrap() - out).abs();
        assert!(fine < 1e-4 * out);
        assert!(fine < coarse);
    }

    #[test]
    fn normalized_examples() {
        let rule = InclusionRule::default();
        let fig3 = normalized_resultant_probability(A3 + PI / 16.0, 0.125, rule).unwrap();
        assert!((fig3 - 1.0).abs() < 0.02);
        // mpmath 0.972283253173134 / 1.020647601996976
        let lo = normalized_resultant_probability(below3(), 0.5, rule).unwrap();
        let hi = normalized_resultant_probability(above3(), 0.5, rule).unwrap();
        assert!((lo - 0.972_283_253_173_134).abs() < 1e-6);
        assert!((hi - 1.020_647_601_996_976).abs() < 1e-6);
        assert!((lo - oracle_normalized(below3(), 0.5)).abs() < 1e-10);
        assert!((hi - oracle_normalized(above3(), 0.5)).abs() < 1e-10);
        assert!(normalized_resultant_probability(1.0, 0.5, rule).is_err());
    }

    #[test]
    fn order_probability_examples() {
        let rule = InclusionRule::default();
        // (π/2) / 2.92511041638153...; mpmath 0.537004113758559
        let p0 = order_probability(0, A3, 0.5, rule).unwrap();
        assert_relative_eq!(p0, 0.537_004_113_758_559, max_relative = 1e-12);
        assert_eq!(order_probability(2, A3, 0.5, rule).unwrap(), 0.0);
        assert_eq!(
            order_probability(1, A3, 0.5, rule).unwrap(),
            order_probability(-1, A3, 0.5, rule).unwrap()
        );
        assert!(matches!(
            order_probability(4, A3, 0.5, rule),
            Err(ModelError::OrderNotPropagating { j: 4, .. })
        ));
    }

    #[test]
    fn occupation_examples() {
        let rule = InclusionRule::default();
        let lo = occupation_value(below3(), 0.5, rule).unwrap();
        let hi = occupation_value(above3(), 0.5, rule).unwrap();
        // mpmath 1.028506864369421 / 0.979770096988836
        assert!((lo - 1.028_506_864_369_421).abs() < 1e-6);
        assert!((hi - 0.979_770_096_988_836).abs() < 1e-6);
        assert!((lo - 1.025).abs() < 0.005);
        assert!((hi - 0.975).abs() < 0.005);
        let control = occupation_value(3.94 * PI / 2.0, 0.5, rule).unwrap();
        assert!((control - 1.0).abs() < 0.005);
    }

    #[test]
    fn omega_from_delta_p_examples() {
        use ProbabilityChange::*;
        assert_eq!(omega_from_delta_p(0.0, 1.0, Created).unwrap(), 1.0);
        assert_eq!(omega_from_delta_p(0.0, 1.0, Annihilated).unwrap(), 1.0);
        assert!((omega_from_delta_p(0.0276, 1.0, Annihilated).unwrap() - 1.0284).abs() < 1e-4);
        assert!((omega_from_delta_p(0.0208, 1.0, Created).unwrap() - 0.9796).abs() < 1e-4);
        assert!(omega_from_delta_p(1.0, 1.0, Annihilated).is_err());
        assert!(omega_from_delta_p(0.1, 0.0, Created).is_err());
        assert!(omega_from_delta_p(-0.1, 1.0, Created).is_err());
    }

    #[test]
    fn delta_p_route_matches_occupation() {
        let rule = InclusionRule::default();
        for at in [below3(), above3(), 2.63 * PI / 2.0, 3.16 * PI / 2.0, 7.3] {
            let p_r = normalized_resultant_probability(at, 0.5, rule).unwrap();
            let (dp, change) = if p_r >= 1.0 {
                (p_r - 1.0, ProbabilityChange::Created)
            } else {
                (1.0 - p_r, ProbabilityChange::Annihilated)
            };
            let via_dp = omega_from_delta_p(dp, 1.0, change).unwrap();
            assert!((via_dp - occupation_value(at, 0.5, rule).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_order_share_examples() {
        let rule = InclusionRule::default();
        // mpmath 1/1.810569469138702 and 1/1.900632743487447
        assert_relative_eq!(
            zero_order_share(3.5, 0.5, rule).unwrap(),
            0.552_312_417_195_295_7,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            zero_order_share(6.0, 0.5, rule).unwrap(),
            0.526_140_572_620_627_8,
            max_relative = 1e-13
        );
        assert_eq!(zero_order_share(1.0, 0.5, rule).unwrap(), 1.0);
        assert_relative_eq!(
            zero_order_share(below3(), 0.5, rule).unwrap(),
            zero_order_share(2.0, 0.5, rule).unwrap()
        );
    }

    #[test]
    fn zero_order_energy_examples() {
        let rule = InclusionRule::default();
        let lo = zero_order_energy(below3(), 0.5, 1.0, rule).unwrap();
        let hi = zero_order_energy(above3(), 0.5, 1.0, rule).unwrap();
        assert!((lo - 0.55231).abs() < 1e-5);
        assert!((hi - 0.52614).abs() < 1e-5);
        assert_relative_eq!(zero_order_energy(above3(), 0.5, 2.0, rule).unwrap(), 2.0 * hi);
        assert!(zero_order_energy(1.0, 0.5, 0.0, rule).is_err());
    }

    #[test]
    fn edge_jump_matches_curve_discontinuity() {
        let rule = InclusionRule::default();
        for j in [1i64, 3, 5, 7] {
            let a = order_alpha(j, 0.5).0;
            if a < PI * 0.5 + 2.0 * THRESHOLD_OFFSET {
                continue;
            }
            let lo = normalized_resultant_probability(a - 1e-9, 0.5, InclusionRule::strict_below()).unwrap();
            let hi = normalized_resultant_probability(a, 0.5, rule).unwrap();
            assert_relative_eq!(hi - lo, edge_jump(j, 0.5).unwrap(), max_relative = 1e-6);
        }
        // mpmath 0.0483643488238416 and 0.0169016990287347
        assert_relative_eq!(
            edge_jump(3, 0.5).unwrap(),
            0.048_364_348_823_841_6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            edge_jump(5, 0.5).unwrap(),
            0.016_901_699_028_734_7,
            max_relative = 1e-12
        );
        assert_eq!(edge_jump(4, 0.5).unwrap(), 0.0);
        assert!(edge_jump(0, 0.5).is_err());
    }

    #[test]
    fn order_table_g3_pair() {
        let rule = InclusionRule::default();
        let g = GratingSpec::ronchi(1.5 * 633.0, 633.0, 257).unwrap();
        let minus = order_table_at(&g, below3(), rule).unwrap();
        let plus = order_table_at(&g, above3(), rule).unwrap();
        assert_eq!(minus.rows.len(), 5);
        assert_eq!(plus.rows.len(), 7);
        assert!((minus.totals.probability - 0.9723).abs() < 1e-4);
        assert!((minus.totals.omega - 1.0285).abs() < 1e-4);
        assert!((plus.totals.probability - 1.0206).abs() < 1e-4);
        assert!((plus.totals.omega - 0.9798).abs() < 1e-4);
        // mpmath (π/2)sinc²(3π/2)/resultant_sum = 0.0236929713689686
        assert_relative_eq!(
            plus.row(3).unwrap().energy_share,
            0.023_692_971_368_968_6,
            max_relative = 1e-12
        );
        assert_eq!(plus.row(3), plus.row(-3).map(|r| OrderRow { j: 3, ..*r }).as_ref());
        for t in [&minus, &plus] {
            assert!((t.totals.energy - 1.0).abs() < 1e-12);
            for r in &t.rows {
                if r.j % 2 == 0 && r.j != 0 {
                    assert_eq!(r.probability, 0.0);
                    assert_eq!(r.energy_share, 0.0);
                }
                assert!((r.omega - t.totals.omega).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn order_table_uses_truncation_of_spec() {
        let g = GratingSpec::ronchi(1000.0, 633.0, 257).unwrap();
        let t = order_table(&g, InclusionRule::default()).unwrap();
        assert_eq!(t.rows.len(), 7);
        assert_relative_eq!(t.j_equiv, 2000.0 / 633.0);
        assert_relative_eq!(
            t.totals.omega,
            occupation_value(truncation_alpha(&g).0, 0.5, InclusionRule::default()).unwrap()
        );
    }

    #[test]
    fn curve_grid_brackets_orders() {
        let pts = curve_grid(0.5, PI, 3.0 * PI, 11).unwrap();
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        for j in 3..6 {
            let a = order_alpha(j, 0.5).0;
            assert!(pts.iter().any(|&p| (p - (a - THRESHOLD_OFFSET)).abs() < 1e-15));
            assert!(pts.iter().any(|&p| (p - (a + THRESHOLD_OFFSET)).abs() < 1e-15));
        }
        assert_eq!(pts[0], PI);
        assert_eq!(*pts.last().unwrap(), 3.0 * PI);
        assert!(curve_grid(0.5, 1.0, 1.0, 10).is_err());
        assert!(curve_grid(0.5, 1.0, 2.0, 1).is_err());
    }

    #[test]
    fn resultant_curve_sawtooth() {
        let rule = InclusionRule::default();
        let c = curve(CurveKind::ResultantProbability, 0.5, PI, 3.0 * PI, 2000, rule).unwrap();
        let mut jumps = Vec::new();
        for (w, a) in c.ordinate.windows(2).zip(c.abscissa.windows(2)) {
            let d = w[1] - w[0];
            if d > 0.0 {
                jumps.push((a[1], d));
            }
        }
        // upward only across odd orders 3 and 5
        assert_eq!(jumps.len(), 2, "{jumps:?}");
        assert!((jumps[0].0 - (A3 + THRESHOLD_OFFSET)).abs() < 1e-12);
        assert!((jumps[1].0 - (2.5 * PI + THRESHOLD_OFFSET)).abs() < 1e-12);
        assert!(jumps[0].1 > jumps[1].1);

        let occ = curve(CurveKind::Occupation, 0.5, PI, 3.0 * PI, 2000, rule).unwrap();
        assert_eq!(occ.abscissa, c.abscissa);
        for (o, p) in occ.ordinate.iter().zip(&c.ordinate) {
            assert!((o * p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_order_curve_is_step_down() {
        let rule = InclusionRule::default();
        let c = curve(CurveKind::ZeroOrderShare, 0.5, PI / 4.0, 4.0 * PI, 500, rule).unwrap();
        assert!(c.ordinate.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(c.ordinate[0], 1.0);
        assert!(c.ordinate.iter().all(|&v| v > 0.0));
        let e = curve(CurveKind::ZeroOrderEnergy, 0.5, PI / 4.0, 4.0 * PI, 500, rule).unwrap();
        assert_eq!(e.ordinate, c.ordinate);
    }

    #[test]
    fn occupation_tends_to_one() {
        let v = occupation_value(100.0 * PI, 0.5, InclusionRule::default()).unwrap();
        assert!((0.99..=1.01).contains(&v));
    }

    #[test]
    fn dense_sampling_deviation_bounded_by_sigma() {
        let at = 3.0 * PI + 0.1;
        let devs: Vec<(f64, f64)> = [0.25, 0.125, 0.0625, 0.03125]
            .iter()
            .map(|&s| {
                (
                    s,
                    (normalized_resultant_probability(at, s, InclusionRule::default()).unwrap() - 1.0).abs(),
                )
            })
            .collect();
        let c = devs.iter().map(|(s, d)| d / s).fold(0.0, f64::max);
        assert!(c < 1e-3, "fitted C = {c}");
        for (s, d) in &devs {
            assert!(*d <= c * s);
        }
    }

    #[test]
    fn dense_sampling_off_grid_is_not_monotone() {
        // With α_t off the order grid the residual is an edge term whose size
        // depends on where α_t falls inside the last subinterval.
        let at = 3.0 * PI + 0.1;
        let dev = |s: f64| (normalized_resultant_probability(at, s, InclusionRule::default()).unwrap() - 1.0).abs();
        assert!(dev(1.0 / 32.0) > dev(1.0 / 16.0));
    }

    #[test]
    fn dense_sampling_on_grid_halves_with_sigma() {
        let at = 11.0 * PI / 4.0;
        let devs: Vec<f64> = [0.25, 0.125, 0.0625, 0.03125]
            .iter()
            .map(|&s| (normalized_resultant_probability(at, s, InclusionRule::default()).unwrap() - 1.0).abs())
            .collect();
        assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
    }

    proptest! {
        #[test]
        fn reciprocity(at in PI / 2.0..60.0, duty in prop::sample::select(vec![0.5, 0.25, 0.125])) {
            prop_assume!(at >= PI * duty);
            let rule = InclusionRule::default();
            let p = normalized_resultant_probability(at, duty, rule).unwrap();
            let o = occupation_value(at, duty, rule).unwrap();
            prop_assert!((o * p - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn orders_are_symmetric(at in 0.01f64..100.0, duty in 0.05f64..0.95) {
            let orders = propagating_orders(at, duty, InclusionRule::default()).unwrap();
            let mut neg: Vec<i64> = orders.iter().map(|j| -j).collect();
            neg.reverse();
            prop_assert_eq!(&orders, &neg);
            for &j in &orders {
                let p = order_probability(j, at.max(PI * duty), duty, InclusionRule::default());
                let q = order_probability(-j, at.max(PI * duty), duty, InclusionRule::default());
                prop_assert_eq!(p.ok(), q.ok());
            }
        }

        #[test]
        fn non_increasing_between_orders(k in 2i64..12, f1 in 0.01f64..0.99, f2 in 0.01f64..0.99) {
            let rule = InclusionRule::default();
            let lo = order_alpha(k, 0.5).0;
            let a = lo + f1.min(f2) * PI / 2.0;
            let b = lo + f1.max(f2) * PI / 2.0;
            let pa = normalized_resultant_probability(a, 0.5, rule).unwrap();
            let pb = normalized_resultant_probability(b, 0.5, rule).unwrap();
            prop_assert!(pb <= pa);
            prop_assert_eq!(zero_order_share(a, 0.5, rule).unwrap(), zero_order_share(b, 0.5, rule).unwrap());
        }

        #[test]
        fn table_energy_sums_to_one(je in 1.0f64..12.0) {
            let g = GratingSpec::ronchi_at_order(je.max(2.0), 633.0, 257).unwrap();
            let t = order_table(&g, InclusionRule::default()).unwrap();
            prop_assert!((t.totals.energy - 1.0).abs() < 1e-9);
            for r in &t.rows {
                prop_assert!((r.omega - t.totals.omega).abs() < 1e-9);
            }
        }
    }
}

//! Asymptotic two-sided power of the allele tests.
//!
//! Under the alternative, `T` is approximately normal with mean `sqrt(m) B Delta Q`
//! and unit variance, while `W` has mean `sqrt(m) B Delta` and variance `Q^-2`.
//! `W_delta` is handled with the general normal approximation of its numerator
//! and denominator at the population frequencies.

use crate::error::{Error, Result};
use crate::model::{
    pooled_variance, DesignConstants, MarkerSpec, PenetranceModel, PopulationSummary,
};
use crate::normal::{cdf, sf, z_half};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `sqrt(m) B Delta`, the mean of `W` under the alternative.
pub fn noncentrality(m: f64, b: f64, delta: f64) -> f64 {
    m.sqrt() * b * delta
}

fn check_inputs(m: f64, q: f64) -> Result<()> {
    // NaN fails too
    if m.is_nan() || m <= 0.0 {
        return Err(Error::param("m", m, "must be positive"));
    }
    if q.is_nan() || q <= 0.0 {
        return Err(Error::param("Q", q, "must be positive"));
    }
    Ok(())
}

/// `P(|N(mean, sd^2)| >= z)`.
fn two_sided_rejection(z: f64, mean: f64, sd: f64) -> f64 {
    sf((z - mean) / sd) + cdf((-z - mean) / sd)
}

pub fn power_t(m: f64, b: f64, delta: f64, q: f64, alpha: f64) -> Result<f64> {
    check_inputs(m, q)?;
    let z = z_half(alpha)?;
    let shift = noncentrality(m, b, delta) * q;
    Ok(sf(z - shift) + cdf(-z - shift))
}

pub fn power_w(m: f64, b: f64, delta: f64, q: f64, alpha: f64) -> Result<f64> {
    check_inputs(m, q)?;
    let z = z_half(alpha)?;
    let shift = noncentrality(m, b, delta) * q;
    Ok(sf(z * q - shift) + cdf(-z * q - shift))
}

/// Power of the combined test: `W`'s when `Q < 1`, otherwise `T`'s.
pub fn power_u(m: f64, b: f64, delta: f64, q: f64, alpha: f64) -> Result<f64> {
    if q < 1.0 {
        power_w(m, b, delta, q, alpha)
    } else {
        power_t(m, b, delta, q, alpha)
    }
}

/// Power of `W_delta` at population frequencies. At `delta_weight` equal to the
/// true prevalence this is the power of `W`.
pub fn power_w_delta(
    model: &PenetranceModel,
    marker: &MarkerSpec,
    design: &DesignConstants,
    delta_weight: f64,
    alpha: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta_weight) {
        return Err(Error::param(
            "delta weight",
            delta_weight,
            "must lie in [0, 1]",
        ));
    }
    let summary = PopulationSummary::new(model, marker)?;
    let z = z_half(alpha)?;
    Ok(power_w_delta_at(&summary, design, delta_weight, z))
}

fn power_w_delta_at(
    summary: &PopulationSummary,
    design: &DesignConstants,
    delta_weight: f64,
    z: f64,
) -> f64 {
    let mix = delta_weight * summary.q1_case + (1.0 - delta_weight) * summary.q1_ctrl;
    let mix_sd = (mix * (1.0 - mix)).sqrt();
    let mean = design.m.sqrt() * (summary.q1_ctrl - summary.q1_case) / mix_sd;
    let sd = pooled_variance(summary.q1_case, summary.q1_ctrl, design.lambda).sqrt() / mix_sd;
    two_sided_rejection(z, mean, sd)
}

/// Which coordinate a power curve sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridAxis {
    /// Marker allele frequency `q1`.
    Q1,
    /// LD coefficient `Delta`.
    Delta,
    /// Weight `delta` in the denominator of `W_delta`.
    DeltaWeight,
}

impl GridAxis {
    pub fn name(&self) -> &'static str {
        match self {
            GridAxis::Q1 => "q1",
            GridAxis::Delta => "delta",
            GridAxis::DeltaWeight => "delta_weight",
        }
    }
}

/// One evaluated point of a power curve. Power fields are `None` when the
/// (q1, Delta) pair lies outside the feasible LD region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerPoint {
    pub axis_value: f64,
    pub q1: f64,
    pub delta: f64,
    /// Weight used for `power_w_delta` (a prevalence estimate, or any `delta`).
    pub delta_weight: f64,
    pub alpha: f64,
    pub prevalence: f64,
    pub q: Option<f64>,
    pub power_t: Option<f64>,
    pub power_w: Option<f64>,
    pub power_w_delta: Option<f64>,
    pub power_u: Option<f64>,
    pub feasible: bool,
}

/// Sweep specification for [`power_grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axis: GridAxis,
    pub values: Vec<f64>,
    /// Weights evaluated at every point for `W_delta` when the axis is not
    /// `DeltaWeight`; empty means the true prevalence.
    pub weights: Vec<f64>,
}

/// Evaluate every power function along a one-dimensional sweep.
///
/// `marker` supplies the coordinate that is held fixed (`Delta` for a `q1`
/// sweep, `q1` for a `Delta` sweep, both for a weight sweep). Output order is
/// values-major, weights-minor, independent of the thread pool.
pub fn power_grid(
    model: &PenetranceModel,
    marker: (f64, f64),
    design: &DesignConstants,
    spec: &GridSpec,
    alpha: f64,
) -> Result<Vec<PowerPoint>> {
    if spec.values.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let z = z_half(alpha)?;
    let prevalence = model.prevalence();
    let weights = match spec.axis {
        GridAxis::DeltaWeight => vec![f64::NAN],
        _ if spec.weights.is_empty() => vec![prevalence],
        _ => spec.weights.clone(),
    };
    for &w in spec
        .values
        .iter()
        .filter(|_| spec.axis == GridAxis::DeltaWeight)
        .chain(&spec.weights)
    {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::param("delta weight", w, "must lie in [0, 1]"));
        }
    }

    let tasks: Vec<(f64, f64)> = spec
        .values
        .iter()
        .flat_map(|&v| weights.iter().map(move |&w| (v, w)))
        .collect();

    tasks
        .into_par_iter()
        .map(|(value, weight)| {
            let (q1, delta, weight) = match spec.axis {
                GridAxis::Q1 => (value, marker.1, weight),
                GridAxis::Delta => (marker.0, value, weight),
                GridAxis::DeltaWeight => (marker.0, marker.1, value),
            };
            let mut point = PowerPoint {
                axis_value: value,
                q1,
                delta,
                delta_weight: weight,
                alpha,
                prevalence,
                q: None,
                power_t: None,
                power_w: None,
                power_w_delta: None,
                power_u: None,
                feasible: false,
            };
            let summary =
                MarkerSpec::new(q1, delta).and_then(|m| PopulationSummary::new(model, &m));
            if let Ok(summary) = summary {
                let q = summary.q(design.lambda);
                point.q = Some(q);
                point.power_t = Some(power_t(design.m, summary.b, delta, q, alpha)?);
                point.power_w = Some(power_w(design.m, summary.b, delta, q, alpha)?);
                point.power_u = Some(power_u(design.m, summary.b, delta, q, alpha)?);
                point.power_w_delta = Some(power_w_delta_at(&summary, design, weight, z));
                point.feasible = true;
            }
            Ok(point)
        })
        .collect()
}

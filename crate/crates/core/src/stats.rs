//! Allele-based association statistics for one marker.
//!
//! All statistics standardize the difference of sample M1 frequencies between
//! controls and cases, `q̂_{1|0} - q̂_{1|1}`, and differ only in the denominator:
//!
//! * `T` uses the plug-in binomial variance of the difference.
//! * `W` uses `sqrt(q̂1 q̂2)` with `q̂1` the prevalence-weighted mixture of the
//!   case and control frequencies, scaled by `sqrt(m)`.
//! * `W_delta` replaces the prevalence estimate by an arbitrary weight.
//! * `U` picks `T` when `Q̂ > 1` and `W` otherwise.
//!
//! They satisfy `T = W Q̂` exactly.

use crate::error::{Error, Result};
use crate::model::DesignConstants;
use crate::normal;
use serde::{Deserialize, Serialize};

/// 2x2 allele table for one marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlleleCounts {
    /// M1 alleles among cases.
    pub r1: u64,
    /// M2 alleles among cases.
    pub r2: u64,
    /// M1 alleles among controls.
    pub s1: u64,
    /// M2 alleles among controls.
    pub s2: u64,
}

impl AlleleCounts {
    pub fn new(r1: u64, r2: u64, s1: u64, s2: u64) -> Result<Self> {
        let counts = AlleleCounts { r1, r2, s1, s2 };
        for (label, total) in [("case", r1 + r2), ("control", s1 + s2)] {
            if total < 2 || total % 2 != 0 {
                return Err(Error::InvalidCounts(format!(
                    "{label} allele total {total} must be even and at least 2"
                )));
            }
        }
        Ok(counts)
    }

    /// Number of cases, `R`.
    pub fn cases(&self) -> u64 {
        (self.r1 + self.r2) / 2
    }

    /// Number of controls, `S`.
    pub fn controls(&self) -> u64 {
        (self.s1 + self.s2) / 2
    }

    pub fn design(&self) -> DesignConstants {
        DesignConstants::new(self.cases(), self.controls())
            .expect("validated counts have at least one case and one control")
    }

    /// `(q̂_{1|0}, q̂_{1|1})`: sample M1 frequency among controls, then cases.
    pub fn sample_freqs(&self) -> (f64, f64) {
        (
            self.s1 as f64 / (self.s1 + self.s2) as f64,
            self.r1 as f64 / (self.r1 + self.r2) as f64,
        )
    }

    /// No copies of one of the alleles in the whole sample.
    pub fn is_monomorphic(&self) -> bool {
        self.r1 + self.s1 == 0 || self.r2 + self.s2 == 0
    }

    /// Some sample frequency is exactly 0 or 1.
    pub fn is_degenerate(&self) -> bool {
        self.r1 == 0 || self.r2 == 0 || self.s1 == 0 || self.s2 == 0
    }

    /// Cases become controls and vice versa.
    pub fn swap_status(&self) -> Self {
        AlleleCounts {
            r1: self.s1,
            r2: self.s2,
            s1: self.r1,
            s2: self.r2,
        }
    }

    /// M1 and M2 exchanged.
    pub fn swap_alleles(&self) -> Self {
        AlleleCounts {
            r1: self.r2,
            r2: self.r1,
            s1: self.s2,
            s2: self.s1,
        }
    }

    fn checked(&self) -> Result<Observed> {
        if self.is_monomorphic() {
            return Err(Error::Monomorphic);
        }
        if self.is_degenerate() {
            return Err(Error::Degenerate);
        }
        let (ctrl, case) = self.sample_freqs();
        Ok(Observed {
            ctrl,
            case,
            design: self.design(),
        })
    }
}

/// Sample frequencies of a non-degenerate table.
struct Observed {
    ctrl: f64,
    case: f64,
    design: DesignConstants,
}

impl Observed {
    fn diff(&self) -> f64 {
        self.ctrl - self.case
    }

    fn mixture_sd(&self, weight: f64) -> f64 {
        let mix = weight * self.case + (1.0 - weight) * self.ctrl;
        (mix * (1.0 - mix)).sqrt()
    }

    fn pooled_variance(&self) -> f64 {
        crate::model::pooled_variance(self.case, self.ctrl, self.design.lambda)
    }
}

fn check_prevalence(pi_hat: f64) -> Result<()> {
    if pi_hat > 0.0 && pi_hat < 1.0 {
        Ok(())
    } else {
        Err(Error::param(
            "prevalence estimate",
            pi_hat,
            "must lie strictly between 0 and 1",
        ))
    }
}

fn check_weight(delta_weight: f64) -> Result<()> {
    if (0.0..=1.0).contains(&delta_weight) {
        Ok(())
    } else {
        Err(Error::param(
            "delta weight",
            delta_weight,
            "must lie in [0, 1]",
        ))
    }
}

/// Sign convention for the continuity correction of `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuityDirection {
    /// Shrink `|q̂_{1|0} - q̂_{1|1}|`, never past zero.
    #[default]
    TowardZero,
    /// Inflate `|q̂_{1|0} - q̂_{1|1}|`; a zero difference stays zero.
    AwayFromZero,
}

/// Continuity shift `min(S, R) / (4 S R)`.
pub fn continuity_shift(r_cases: u64, s_controls: u64) -> f64 {
    let (r, s) = (r_cases as f64, s_controls as f64);
    0.5 * r.min(s) / (2.0 * s * r)
}

pub fn sample_freqs(counts: &AlleleCounts) -> (f64, f64) {
    counts.sample_freqs()
}

pub fn t_statistic(counts: &AlleleCounts) -> Result<f64> {
    let obs = counts.checked()?;
    let r = obs.design.r_cases as f64;
    let s = obs.design.s_controls as f64;
    let variance =
        obs.ctrl * (1.0 - obs.ctrl) / (2.0 * s) + obs.case * (1.0 - obs.case) / (2.0 * r);
    Ok(obs.diff() / variance.sqrt())
}

pub fn w_statistic(counts: &AlleleCounts, pi_hat: f64) -> Result<f64> {
    check_prevalence(pi_hat)?;
    w_delta_statistic(counts, pi_hat)
}

pub fn w_delta_statistic(counts: &AlleleCounts, delta_weight: f64) -> Result<f64> {
    check_weight(delta_weight)?;
    let obs = counts.checked()?;
    Ok(obs.design.m.sqrt() * obs.diff() / obs.mixture_sd(delta_weight))
}

pub fn w_corrected(
    counts: &AlleleCounts,
    pi_hat: f64,
    direction: ContinuityDirection,
) -> Result<f64> {
    check_prevalence(pi_hat)?;
    w_corrected_delta(counts, pi_hat, direction)
}

/// Continuity-corrected `W_delta`.
pub fn w_corrected_delta(
    counts: &AlleleCounts,
    delta_weight: f64,
    direction: ContinuityDirection,
) -> Result<f64> {
    check_weight(delta_weight)?;
    let obs = counts.checked()?;
    let shift = continuity_shift(obs.design.r_cases, obs.design.s_controls);
    let diff = obs.diff();
    let corrected = match direction {
        ContinuityDirection::TowardZero => diff.signum() * (diff.abs() - shift).max(0.0),
        ContinuityDirection::AwayFromZero if diff == 0.0 => 0.0,
        ContinuityDirection::AwayFromZero => diff.signum() * (diff.abs() + shift),
    };
    Ok(obs.design.m.sqrt() * corrected / obs.mixture_sd(delta_weight))
}

/// `Q̂`, so that `T = W Q̂`.
pub fn q_hat(counts: &AlleleCounts, pi_hat: f64) -> Result<f64> {
    check_prevalence(pi_hat)?;
    q_hat_delta(counts, pi_hat)
}

/// `Q̂_delta`, so that `T = W_delta Q̂_delta`.
pub fn q_hat_delta(counts: &AlleleCounts, delta_weight: f64) -> Result<f64> {
    check_weight(delta_weight)?;
    let obs = counts.checked()?;
    Ok(obs.mixture_sd(delta_weight) / obs.pooled_variance().sqrt())
}

/// Plug-in estimate of the mixture-of-products form of `Q_delta`; a diagnostic
/// that does not link `W_delta` and `T`.
pub fn q_hat_delta_mixture_form(
    counts: &AlleleCounts,
    pi_hat: f64,
    delta_weight: f64,
) -> Result<f64> {
    check_prevalence(pi_hat)?;
    check_weight(delta_weight)?;
    let obs = counts.checked()?;
    let mix = pi_hat * obs.case + (1.0 - pi_hat) * obs.ctrl;
    Ok(crate::model::q_delta_mixture_form(
        mix,
        obs.case,
        obs.ctrl,
        delta_weight,
    ))
}

/// Combined statistic: `T` when `Q̂ > 1`, else `W`.
pub fn u_statistic(counts: &AlleleCounts, pi_hat: f64) -> Result<f64> {
    let q = q_hat(counts, pi_hat)?;
    if q > 1.0 {
        t_statistic(counts)
    } else {
        w_statistic(counts, pi_hat)
    }
}

/// Two-sided normal p-value.
pub fn p_value(stat: f64) -> Result<f64> {
    normal::two_sided_p(stat)
}

/// Ratio `q̂_{1|0} / q̂_{1|1}` with a normal interval on the log scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectSize {
    pub ratio: f64,
    pub lo: f64,
    pub hi: f64,
}

pub fn effect_size(counts: &AlleleCounts, ci_level: f64) -> Result<EffectSize> {
    if !(ci_level > 0.0 && ci_level < 1.0) {
        return Err(Error::param(
            "confidence level",
            ci_level,
            "must lie in (0, 1)",
        ));
    }
    let (ctrl, case) = counts.sample_freqs();
    if case == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let ratio = ctrl / case;
    if ctrl == 0.0 {
        return Ok(EffectSize {
            ratio,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let r = counts.cases() as f64;
    let s = counts.controls() as f64;
    // delta method, independent binomial samples
    let var_log = (1.0 - ctrl) / (2.0 * s * ctrl) + (1.0 - case) / (2.0 * r * case);
    let half_width = normal::z_half(1.0 - ci_level)? * var_log.sqrt();
    Ok(EffectSize {
        ratio,
        lo: ratio * (-half_width).exp(),
        hi: ratio * half_width.exp(),
    })
}

/// Every statistic for one marker. Statistic fields are `None` for degenerate
/// or monomorphic tables, whose p-values are reported as 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestReport {
    pub q_hat_ctrl: f64,
    pub q_hat_case: f64,
    pub t_stat: Option<f64>,
    pub w_stat: Option<f64>,
    pub w_cor_stat: Option<f64>,
    pub u_stat: Option<f64>,
    pub p_t: f64,
    pub p_w: f64,
    pub p_u: f64,
    pub q_hat: Option<f64>,
    pub effect: Option<EffectSize>,
    pub degenerate: bool,
    pub monomorphic: bool,
}

impl TestReport {
    pub fn new(
        counts: &AlleleCounts,
        pi_hat: f64,
        ci_level: f64,
        direction: ContinuityDirection,
    ) -> Result<Self> {
        check_prevalence(pi_hat)?;
        let (q_hat_ctrl, q_hat_case) = counts.sample_freqs();
        let monomorphic = counts.is_monomorphic();
        let effect = if monomorphic {
            None
        } else {
            effect_size(counts, ci_level).ok()
        };
        let mut report = TestReport {
            q_hat_ctrl,
            q_hat_case,
            t_stat: None,
            w_stat: None,
            w_cor_stat: None,
            u_stat: None,
            p_t: 1.0,
            p_w: 1.0,
            p_u: 1.0,
            q_hat: None,
            effect,
            degenerate: !monomorphic && counts.is_degenerate(),
            monomorphic,
        };
        if counts.is_degenerate() {
            return Ok(report);
        }
        let t = t_statistic(counts)?;
        let w = w_statistic(counts, pi_hat)?;
        let u = u_statistic(counts, pi_hat)?;
        report.t_stat = Some(t);
        report.w_stat = Some(w);
        report.w_cor_stat = Some(w_corrected(counts, pi_hat, direction)?);
        report.u_stat = Some(u);
        report.q_hat = Some(q_hat(counts, pi_hat)?);
        report.p_t = p_value(t)?;
        report.p_w = p_value(w)?;
        report.p_u = p_value(u)?;
        Ok(report)
    }
}

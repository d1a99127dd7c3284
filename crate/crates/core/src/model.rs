//! Two-locus population model.
//!
//! A biallelic causal variant (alleles A1/A2) with genotype-specific disease
//! risks, and a biallelic marker (M1/M2) in linkage disequilibrium with it.
//! Both loci are in Hardy-Weinberg equilibrium under random mating. Every
//! population quantity the tests and power functions need is derived here:
//! haplotype frequencies, prevalence, allele frequencies conditional on disease
//! status, and the effect terms `B` and `Q`.

use crate::error::{Error, Result};
use serde::Serialize;

/// Slack allowed when checking an LD coefficient against its feasibility bounds.
const FEASIBILITY_TOL: f64 = 1e-12;

fn check_frequency(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::param(
            name,
            value,
            "must lie strictly between 0 and 1",
        ))
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::param(name, value, "must lie in [0, 1]"))
    }
}

/// Causal variant: risk-allele frequency and the three genotype penetrances.
///
/// The heterozygote penetrance is shared by `A1A2` and `A2A1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PenetranceModel {
    p1: f64,
    pen11: f64,
    pen12: f64,
    pen22: f64,
}

impl PenetranceModel {
    pub fn new(p1: f64, pen11: f64, pen12: f64, pen22: f64) -> Result<Self> {
        check_frequency("p1", p1)?;
        check_probability("pen11", pen11)?;
        check_probability("pen12", pen12)?;
        check_probability("pen22", pen22)?;
        let model = PenetranceModel {
            p1,
            pen11,
            pen12,
            pen22,
        };
        let prevalence = model.prevalence();
        if !(prevalence > 0.0 && prevalence < 1.0) {
            return Err(Error::DegeneratePrevalence(prevalence));
        }
        Ok(model)
    }

    /// Additive model: the heterozygote risk is the mean of the homozygote risks.
    pub fn additive(p1: f64, pen11: f64, pen22: f64) -> Result<Self> {
        Self::new(p1, pen11, 0.5 * (pen11 + pen22), pen22)
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        1.0 - self.p1
    }

    /// Penetrances `(pi_11, pi_12, pi_22)`.
    pub fn penetrances(&self) -> (f64, f64, f64) {
        (self.pen11, self.pen12, self.pen22)
    }

    /// Disease risk for a causal genotype carrying `copies` A1 alleles.
    pub fn penetrance(&self, copies: usize) -> f64 {
        match copies {
            2 => self.pen11,
            1 => self.pen12,
            _ => self.pen22,
        }
    }

    /// True when all genotypes carry the same risk (no causal effect).
    pub fn is_null(&self) -> bool {
        self.pen11 == self.pen12 && self.pen12 == self.pen22
    }

    /// Same population with the causal allele labels exchanged.
    pub fn swap_alleles(&self) -> Self {
        PenetranceModel {
            p1: 1.0 - self.p1,
            pen11: self.pen22,
            pen12: self.pen12,
            pen22: self.pen11,
        }
    }

    /// `P(X = 1)` as the Hardy-Weinberg mixture of genotype risks.
    pub fn prevalence(&self) -> f64 {
        let (p1, p2) = (self.p1, self.p2());
        p1 * p1 * self.pen11 + 2.0 * p1 * p2 * self.pen12 + p2 * p2 * self.pen22
    }

    /// Disease risk averaged over the partner allele, for a haplotype carrying
    /// A1 (`.0`) or A2 (`.1`).
    pub fn allele_risks(&self) -> (f64, f64) {
        let (p1, p2) = (self.p1, self.p2());
        (
            p1 * self.pen11 + p2 * self.pen12,
            p1 * self.pen12 + p2 * self.pen22,
        )
    }

    /// A1 frequency among cases and among controls, `(p_{1|1}, p_{1|0})`.
    pub fn causal_conditional_freqs(&self) -> (f64, f64) {
        let prevalence = self.prevalence();
        let (f1, _) = self.allele_risks();
        let case = self.p1 * f1 / prevalence;
        let ctrl = self.p1 * (1.0 - f1) / (1.0 - prevalence);
        (case, ctrl)
    }

    /// Effect term of the causal variant, `B = (p_{1|0} - p_{1|1}) / sqrt(p1 p2)`.
    pub fn b_term(&self) -> f64 {
        let (case, ctrl) = self.causal_conditional_freqs();
        (ctrl - case) / (self.p1 * self.p2()).sqrt()
    }
}

/// Marker allele frequency and its LD coefficient (correlation) with A1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkerSpec {
    q1: f64,
    delta: f64,
}

impl MarkerSpec {
    pub fn new(q1: f64, delta: f64) -> Result<Self> {
        check_frequency("q1", q1)?;
        if !delta.is_finite() {
            return Err(Error::param("delta", delta, "must be finite"));
        }
        Ok(MarkerSpec { q1, delta })
    }

    pub fn q1(&self) -> f64 {
        self.q1
    }

    pub fn q2(&self) -> f64 {
        1.0 - self.q1
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Same marker with M1 and M2 exchanged.
    pub fn swap_alleles(&self) -> Self {
        MarkerSpec {
            q1: 1.0 - self.q1,
            delta: -self.delta,
        }
    }

    /// Fails with the violated bound when the LD coefficient is outside the
    /// feasible range for a causal variant with frequency `p1`.
    pub fn check_feasible(&self, p1: f64) -> Result<()> {
        let bounds = delta_bounds(p1, self.q1)?;
        let tol = FEASIBILITY_TOL * bounds.min.abs().max(bounds.max.abs()).max(1.0);
        if self.delta < bounds.min - tol {
            return Err(Error::InfeasibleLd {
                delta: self.delta,
                bound: "lower",
                limit: bounds.min,
                min: bounds.min,
                max: bounds.max,
            });
        }
        if self.delta > bounds.max + tol {
            return Err(Error::InfeasibleLd {
                delta: self.delta,
                bound: "upper",
                limit: bounds.max,
                min: bounds.min,
                max: bounds.max,
            });
        }
        Ok(())
    }
}

/// Feasible range of the LD coefficient for given allele frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaBounds {
    pub min: f64,
    pub max: f64,
}

impl DeltaBounds {
    pub fn contains(&self, delta: f64) -> bool {
        delta >= self.min && delta <= self.max
    }
}

/// Range of `Delta` for which all four haplotype frequencies lie in `[0, 1]`.
pub fn delta_bounds(p1: f64, q1: f64) -> Result<DeltaBounds> {
    check_frequency("p1", p1)?;
    check_frequency("q1", q1)?;
    let (p2, q2) = (1.0 - p1, 1.0 - q1);
    let min = -((p1 * q1) / (p2 * q2))
        .sqrt()
        .min(((p2 * q2) / (p1 * q1)).sqrt());
    let max = ((p1 * q2) / (p2 * q1))
        .sqrt()
        .min(((p2 * q1) / (p1 * q2)).sqrt());
    Ok(DeltaBounds { min, max })
}

/// Population haplotype frequencies `P(A_i M_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HaplotypeFreqs {
    pub a1m1: f64,
    pub a1m2: f64,
    pub a2m1: f64,
    pub a2m2: f64,
}

impl HaplotypeFreqs {
    pub fn as_array(&self) -> [f64; 4] {
        [self.a1m1, self.a1m2, self.a2m1, self.a2m2]
    }
}

/// `D = Delta * sqrt(p1 p2 q1 q2)`, the covariance of the allele indicators.
fn ld_covariance(model: &PenetranceModel, marker: &MarkerSpec) -> f64 {
    marker.delta * (model.p1 * model.p2() * marker.q1 * marker.q2()).sqrt()
}

pub fn haplotype_freqs(model: &PenetranceModel, marker: &MarkerSpec) -> Result<HaplotypeFreqs> {
    marker.check_feasible(model.p1)?;
    let d = ld_covariance(model, marker);
    let (p1, p2, q1, q2) = (model.p1, model.p2(), marker.q1, marker.q2());
    // rounding at an exact Frechet bound can leave a -1e-17 residue
    let clamp = |x: f64| x.clamp(0.0, 1.0);
    Ok(HaplotypeFreqs {
        a1m1: clamp(p1 * q1 + d),
        a1m2: clamp(p1 * q2 - d),
        a2m1: clamp(p2 * q1 - d),
        a2m2: clamp(p2 * q2 + d),
    })
}

/// M1 frequency among cases and among controls, `(q_{1|1}, q_{1|0})`.
pub fn marker_conditional_freqs(
    model: &PenetranceModel,
    marker: &MarkerSpec,
) -> Result<(f64, f64)> {
    marker.check_feasible(model.p1)?;
    let prevalence = model.prevalence();
    let (f1, f2) = model.allele_risks();
    let shift = ld_covariance(model, marker) * (f1 - f2);
    Ok((
        marker.q1 + shift / prevalence,
        marker.q1 - shift / (1.0 - prevalence),
    ))
}

/// Sample-size constants of a case-control design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignConstants {
    pub r_cases: u64,
    pub s_controls: u64,
    pub n_total: u64,
    /// Fraction of cases, `R / N`.
    pub lambda: f64,
    /// `2 N lambda (1 - lambda)`.
    pub m: f64,
}

impl DesignConstants {
    pub fn new(r_cases: u64, s_controls: u64) -> Result<Self> {
        if r_cases == 0 || s_controls == 0 {
            return Err(Error::Config(format!(
                "need at least one case and one control (R = {r_cases}, S = {s_controls})"
            )));
        }
        let n_total = r_cases + s_controls;
        let (r, s, n) = (r_cases as f64, s_controls as f64, n_total as f64);
        Ok(DesignConstants {
            r_cases,
            s_controls,
            n_total,
            lambda: r / n,
            m: 2.0 * r * s / n,
        })
    }
}

/// `Q^2 = q1 q2 / (lambda q_{1|0} q_{2|0} + (1 - lambda) q_{1|1} q_{2|1})`.
pub fn q_term(q1: f64, q1_case: f64, q1_ctrl: f64, lambda: f64) -> f64 {
    (q1 * (1.0 - q1) / pooled_variance(q1_case, q1_ctrl, lambda)).sqrt()
}

/// Weighted `Q`: the numerator is the product of `delta`-mixtures of the case and
/// control frequencies, which makes `W_delta = T / Q_delta` exact.
pub fn q_delta_term(q1_case: f64, q1_ctrl: f64, lambda: f64, delta_weight: f64) -> f64 {
    let mix = delta_weight * q1_case + (1.0 - delta_weight) * q1_ctrl;
    (mix * (1.0 - mix) / pooled_variance(q1_case, q1_ctrl, lambda)).sqrt()
}

/// Alternative weighted `Q` with `delta` taking the place of `lambda` in the
/// denominator: `q1 q2 / (delta q_{1|0} q_{2|0} + (1 - delta) q_{1|1} q_{2|1})`.
/// Reported as a diagnostic only; it does not satisfy `W_delta = T / Q_delta`.
pub fn q_delta_mixture_form(q1: f64, q1_case: f64, q1_ctrl: f64, delta_weight: f64) -> f64 {
    q_term(q1, q1_case, q1_ctrl, delta_weight)
}

/// `lambda q_{1|0} q_{2|0} + (1 - lambda) q_{1|1} q_{2|1}`.
pub(crate) fn pooled_variance(q1_case: f64, q1_ctrl: f64, lambda: f64) -> f64 {
    lambda * q1_ctrl * (1.0 - q1_ctrl) + (1.0 - lambda) * q1_case * (1.0 - q1_case)
}

/// Every derived population quantity for one (causal variant, marker) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationSummary {
    pub p1: f64,
    pub q1: f64,
    pub delta: f64,
    pub prevalence: f64,
    pub p1_case: f64,
    pub p1_ctrl: f64,
    pub q1_case: f64,
    pub q1_ctrl: f64,
    pub b: f64,
    pub haplotypes: HaplotypeFreqs,
    pub delta_bounds: DeltaBounds,
}

impl PopulationSummary {
    pub fn new(model: &PenetranceModel, marker: &MarkerSpec) -> Result<Self> {
        let haplotypes = haplotype_freqs(model, marker)?;
        let (q1_case, q1_ctrl) = marker_conditional_freqs(model, marker)?;
        let (p1_case, p1_ctrl) = model.causal_conditional_freqs();
        Ok(PopulationSummary {
            p1: model.p1,
            q1: marker.q1,
            delta: marker.delta,
            prevalence: model.prevalence(),
            p1_case,
            p1_ctrl,
            q1_case,
            q1_ctrl,
            b: model.b_term(),
            haplotypes,
            delta_bounds: delta_bounds(model.p1, marker.q1)?,
        })
    }

    /// `Q` at case fraction `lambda`.
    pub fn q(&self, lambda: f64) -> f64 {
        q_term(self.q1, self.q1_case, self.q1_ctrl, lambda)
    }

    pub fn q_delta(&self, lambda: f64, delta_weight: f64) -> f64 {
        q_delta_term(self.q1_case, self.q1_ctrl, lambda, delta_weight)
    }

    pub fn q_delta_mixture_form(&self, delta_weight: f64) -> f64 {
        q_delta_mixture_form(self.q1, self.q1_case, self.q1_ctrl, delta_weight)
    }
}

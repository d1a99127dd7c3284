//! Seeded Monte Carlo engine for type I error and empirical power.
//!
//! Replication `i` draws from its own ChaCha8 stream, keyed by the run seed with
//! stream id `i`, so results do not depend on how replications are scheduled
//! across threads. Rejection tallies are integer sums.
//!
//! Two sampling schemes are available. `Allele` draws the M1 allele counts of
//! cases and controls as independent binomials at the conditional allele
//! frequencies. `Genotype` draws marker genotypes of individuals from the exact
//! genotype distributions given disease status, which keeps the dependence
//! between the two alleles of one individual.

use crate::error::{Error, Result};
use crate::model::{haplotype_freqs, marker_conditional_freqs, MarkerSpec, PenetranceModel};
use crate::stats::{self, AlleleCounts, ContinuityDirection};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::time::Instant;

pub const GENERATOR: &str = "ChaCha8 keyed by seed, stream = replication index";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    #[default]
    Allele,
    Genotype,
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingMode::Allele => "allele",
            SamplingMode::Genotype => "genotype",
        })
    }
}

/// A statistic whose rejections are tallied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "test", rename_all = "snake_case")]
pub enum TestKind {
    T,
    W,
    WCor,
    WDelta { weight: f64 },
    WCorDelta { weight: f64 },
    U,
}

impl TestKind {
    pub fn label(&self) -> String {
        match self {
            TestKind::T => "T".into(),
            TestKind::W => "W".into(),
            TestKind::WCor => "W_cor".into(),
            TestKind::WDelta { weight } => format!("W_delta({weight})"),
            TestKind::WCorDelta { weight } => format!("W_cor_delta({weight})"),
            TestKind::U => "U".into(),
        }
    }

    pub fn statistic(
        &self,
        counts: &AlleleCounts,
        pi_hat: f64,
        direction: ContinuityDirection,
    ) -> Result<f64> {
        match *self {
            TestKind::T => stats::t_statistic(counts),
            TestKind::W => stats::w_statistic(counts, pi_hat),
            TestKind::WCor => stats::w_corrected(counts, pi_hat, direction),
            TestKind::WDelta { weight } => stats::w_delta_statistic(counts, weight),
            TestKind::WCorDelta { weight } => stats::w_corrected_delta(counts, weight, direction),
            TestKind::U => stats::u_statistic(counts, pi_hat),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub model: PenetranceModel,
    pub marker: MarkerSpec,
    pub r_cases: u64,
    pub s_controls: u64,
    /// Prevalence estimate plugged into `W`, `W_cor` and `U`.
    pub pi_hat: f64,
    pub replications: u64,
    pub alphas: Vec<f64>,
    pub mode: SamplingMode,
    pub seed: u64,
    pub tests: Vec<TestKind>,
    pub correction: ContinuityDirection,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.r_cases == 0 || self.s_controls == 0 {
            return Err(Error::Config(
                "need at least one case and one control".into(),
            ));
        }
        if !(self.pi_hat > 0.0 && self.pi_hat < 1.0) {
            return Err(Error::param(
                "prevalence estimate",
                self.pi_hat,
                "must lie in (0, 1)",
            ));
        }
        if self.alphas.is_empty() || self.tests.is_empty() {
            return Err(Error::Config("need at least one test and one alpha".into()));
        }
        for &alpha in &self.alphas {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::param("alpha", alpha, "must lie in (0, 1)"));
            }
        }
        for test in &self.tests {
            if let TestKind::WDelta { weight } | TestKind::WCorDelta { weight } = *test {
                if !(0.0..=1.0).contains(&weight) {
                    return Err(Error::param("delta weight", weight, "must lie in [0, 1]"));
                }
            }
        }
        self.marker.check_feasible(self.model.p1())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectionRate {
    pub test: String,
    pub alpha: f64,
    pub rejections: u64,
    pub fraction: f64,
    /// Binomial Monte Carlo standard error of `fraction`.
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub rates: Vec<RejectionRate>,
    pub replications: u64,
    /// Replicates with a sample frequency of 0 or 1, counted as non-rejections.
    pub degenerate_replicates: u64,
    pub seed: u64,
    pub mode: SamplingMode,
    pub generator: String,
    pub wall_time_secs: f64,
}

impl SimResult {
    pub fn rate(&self, test: &TestKind, alpha: f64) -> Option<&RejectionRate> {
        let label = test.label();
        self.rates
            .iter()
            .find(|r| r.test == label && r.alpha == alpha)
    }

    pub fn degenerate_fraction(&self) -> f64 {
        self.degenerate_replicates as f64 / self.replications as f64
    }

    /// Long-format table: `test, alpha, fraction, se, replications`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("test\talpha\trejections\tfraction\tse\treplications\n");
        for r in &self.rates {
            out.push_str(&format!(
                "{}\t{:e}\t{}\t{:.17e}\t{:.17e}\t{}\n",
                r.test, r.alpha, r.rejections, r.fraction, r.se, self.replications
            ));
        }
        out
    }
}

/// Independent binomial allele sampling at fixed conditional frequencies.
#[derive(Debug, Clone, Copy)]
pub struct AlleleSampler {
    cases: Binomial,
    controls: Binomial,
    r_alleles: u64,
    s_alleles: u64,
}

impl AlleleSampler {
    pub fn new(q1_case: f64, q1_ctrl: f64, r_cases: u64, s_controls: u64) -> Result<Self> {
        let binomial = |n: u64, p: f64, name: &'static str| {
            Binomial::new(n, p).map_err(|_| Error::param(name, p, "must lie in [0, 1]"))
        };
        Ok(AlleleSampler {
            cases: binomial(2 * r_cases, q1_case, "case allele frequency")?,
            controls: binomial(2 * s_controls, q1_ctrl, "control allele frequency")?,
            r_alleles: 2 * r_cases,
            s_alleles: 2 * s_controls,
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> AlleleCounts {
        let r1 = self.cases.sample(rng);
        let s1 = self.controls.sample(rng);
        AlleleCounts {
            r1,
            r2: self.r_alleles - r1,
            s1,
            s2: self.s_alleles - s1,
        }
    }
}

/// `r1 ~ Bin(2R, q1_case)`, `s1 ~ Bin(2S, q1_ctrl)`.
pub fn draw_counts<R: Rng + ?Sized>(
    q1_case: f64,
    q1_ctrl: f64,
    r_cases: u64,
    s_controls: u64,
    rng: &mut R,
) -> Result<AlleleCounts> {
    Ok(AlleleSampler::new(q1_case, q1_ctrl, r_cases, s_controls)?.draw(rng))
}

/// Marker genotype distributions by disease status, indexed by the number of
/// M1 alleles (0, 1, 2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenotypeDistributions {
    pub case: [f64; 3],
    pub control: [f64; 3],
}

impl GenotypeDistributions {
    pub fn case_allele_freq(&self) -> f64 {
        allele_freq(&self.case)
    }

    pub fn control_allele_freq(&self) -> f64 {
        allele_freq(&self.control)
    }
}

fn allele_freq(g: &[f64; 3]) -> f64 {
    (g[1] + 2.0 * g[2]) / 2.0
}

/// Exact enumeration over pairs of haplotypes under random union of gametes.
pub fn genotype_distributions(
    model: &PenetranceModel,
    marker: &MarkerSpec,
) -> Result<GenotypeDistributions> {
    let h = haplotype_freqs(model, marker)?.as_array();
    // (A1 copies, M1 copies) of a1m1, a1m2, a2m1, a2m2
    const ALLELES: [(usize, usize); 4] = [(1, 1), (1, 0), (0, 1), (0, 0)];
    let mut case = [0.0; 3];
    let mut control = [0.0; 3];
    for (i, &(a_i, m_i)) in ALLELES.iter().enumerate() {
        for (j, &(a_j, m_j)) in ALLELES.iter().enumerate() {
            let pair = h[i] * h[j];
            let risk = model.penetrance(a_i + a_j);
            case[m_i + m_j] += pair * risk;
            control[m_i + m_j] += pair * (1.0 - risk);
        }
    }
    let case_mass: f64 = case.iter().sum();
    let control_mass: f64 = control.iter().sum();
    if !(case_mass > 0.0 && control_mass > 0.0) {
        return Err(Error::DegeneratePrevalence(case_mass));
    }
    Ok(GenotypeDistributions {
        case: case.map(|p| p / case_mass),
        control: control.map(|p| p / control_mass),
    })
}

/// Count M1 alleles among `n` individuals with genotype distribution `g`,
/// drawn as a multinomial by sequential conditional binomials.
fn draw_m1_alleles<R: Rng + ?Sized>(g: &[f64; 3], n: u64, rng: &mut R) -> u64 {
    let two = Binomial::new(n, g[2].clamp(0.0, 1.0))
        .expect("probability in range")
        .sample(rng);
    let rest = 1.0 - g[2];
    let one = if rest > 0.0 && n > two {
        let p = (g[1] / rest).clamp(0.0, 1.0);
        Binomial::new(n - two, p)
            .expect("probability in range")
            .sample(rng)
    } else {
        0
    };
    2 * two + one
}

pub fn draw_counts_genotype<R: Rng + ?Sized>(
    distributions: &GenotypeDistributions,
    r_cases: u64,
    s_controls: u64,
    rng: &mut R,
) -> AlleleCounts {
    let r1 = draw_m1_alleles(&distributions.case, r_cases, rng);
    let s1 = draw_m1_alleles(&distributions.control, s_controls, rng);
    AlleleCounts {
        r1,
        r2: 2 * r_cases - r1,
        s1,
        s2: 2 * s_controls - s1,
    }
}

enum Sampler {
    Allele(AlleleSampler),
    Genotype(GenotypeDistributions, u64, u64),
}

impl Sampler {
    fn new(config: &SimConfig) -> Result<Self> {
        Ok(match config.mode {
            SamplingMode::Allele => {
                let (case, ctrl) = marker_conditional_freqs(&config.model, &config.marker)?;
                Sampler::Allele(AlleleSampler::new(
                    case.clamp(0.0, 1.0),
                    ctrl.clamp(0.0, 1.0),
                    config.r_cases,
                    config.s_controls,
                )?)
            }
            SamplingMode::Genotype => Sampler::Genotype(
                genotype_distributions(&config.model, &config.marker)?,
                config.r_cases,
                config.s_controls,
            ),
        })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> AlleleCounts {
        match self {
            Sampler::Allele(s) => s.draw(rng),
            Sampler::Genotype(d, r, s) => draw_counts_genotype(d, *r, *s, rng),
        }
    }
}

/// Key shared by every replication stream of a run.
fn stream_key(seed: u64) -> <ChaCha8Rng as SeedableRng>::Seed {
    ChaCha8Rng::seed_from_u64(seed).get_seed()
}

fn replication_rng(key: &<ChaCha8Rng as SeedableRng>::Seed, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(*key);
    rng.set_stream(replication);
    rng
}

#[derive(Debug, Clone)]
struct Tally {
    rejections: Vec<u64>,
    degenerate: u64,
}

impl Tally {
    fn new(cells: usize) -> Self {
        Tally {
            rejections: vec![0; cells],
            degenerate: 0,
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.rejections.iter_mut().zip(other.rejections) {
            *a += b;
        }
        self.degenerate += other.degenerate;
        self
    }
}

fn run(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let started = Instant::now();
    let sampler = Sampler::new(config)?;
    let key = stream_key(config.seed);
    let n_alphas = config.alphas.len();
    let cells = config.tests.len() * n_alphas;

    let tally = (0..config.replications)
        .into_par_iter()
        .fold(
            || Tally::new(cells),
            |mut tally, i| {
                let mut rng = replication_rng(&key, i);
                let counts = sampler.draw(&mut rng);
                if counts.is_degenerate() {
                    tally.degenerate += 1;
                    return tally;
                }
                for (t, test) in config.tests.iter().enumerate() {
                    let p = test
                        .statistic(&counts, config.pi_hat, config.correction)
                        .and_then(stats::p_value)
                        .expect("validated configuration on a non-degenerate table");
                    for (a, &alpha) in config.alphas.iter().enumerate() {
                        if p < alpha {
                            tally.rejections[t * n_alphas + a] += 1;
                        }
                    }
                }
                tally
            },
        )
        .reduce(|| Tally::new(cells), Tally::merge);

    let reps = config.replications as f64;
    let mut rates = Vec::with_capacity(cells);
    for (t, test) in config.tests.iter().enumerate() {
        for (a, &alpha) in config.alphas.iter().enumerate() {
            let rejections = tally.rejections[t * n_alphas + a];
            let fraction = rejections as f64 / reps;
            rates.push(RejectionRate {
                test: test.label(),
                alpha,
                rejections,
                fraction,
                se: (fraction * (1.0 - fraction) / reps).sqrt(),
            });
        }
    }
    Ok(SimResult {
        rates,
        replications: config.replications,
        degenerate_replicates: tally.degenerate,
        seed: config.seed,
        mode: config.mode,
        generator: GENERATOR.to_string(),
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

fn require_null(config: &SimConfig) -> Result<()> {
    if config.marker.delta() != 0.0 {
        return Err(Error::Config(format!(
            "type I error simulation requires Delta = 0, got {}",
            config.marker.delta()
        )));
    }
    Ok(())
}

/// Rejection fractions under the null (`Delta = 0`).
pub fn estimate_type1(config: &SimConfig) -> Result<SimResult> {
    require_null(config)?;
    run(config)
}

/// Rejection fractions under the configured alternative.
pub fn estimate_power(config: &SimConfig) -> Result<SimResult> {
    if config.replications < 1000 {
        return Err(Error::Config(format!(
            "power estimation needs at least 1000 replications, got {}",
            config.replications
        )));
    }
    run(config)
}

/// Raw statistics of one null replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NullDraw {
    pub t: f64,
    pub w: f64,
    pub u: f64,
    pub q_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullSample {
    /// Non-degenerate replicates, in replication order.
    pub draws: Vec<NullDraw>,
    pub degenerate_replicates: u64,
}

/// Statistic values under the null for QQ plots and goodness-of-fit checks.
/// Uses the same replication streams as [`estimate_type1`].
pub fn null_distribution_sample(config: &SimConfig) -> Result<NullSample> {
    require_null(config)?;
    config.validate()?;
    let sampler = Sampler::new(config)?;
    let key = stream_key(config.seed);
    let draws: Vec<Option<NullDraw>> = (0..config.replications)
        .into_par_iter()
        .map(|i| {
            let counts = sampler.draw(&mut replication_rng(&key, i));
            if counts.is_degenerate() {
                return None;
            }
            let t = stats::t_statistic(&counts).ok()?;
            let w = stats::w_statistic(&counts, config.pi_hat).ok()?;
            let q_hat = stats::q_hat(&counts, config.pi_hat).ok()?;
            let u = if q_hat > 1.0 { t } else { w };
            Some(NullDraw { t, w, u, q_hat })
        })
        .collect();
    let degenerate_replicates = draws.iter().filter(|d| d.is_none()).count() as u64;
    Ok(NullSample {
        draws: draws.into_iter().flatten().collect(),
        degenerate_replicates,
    })
}

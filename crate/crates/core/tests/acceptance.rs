//! Acceptance suite: one PASS/FAIL line per criterion, every tolerance pinned
//! below. Runs as a plain binary so the lines are always printed:
//!
//! ```text
//! cargo test -p allele-assoc --test acceptance
//! cargo test -p allele-assoc --test acceptance -- type1   # name filter
//! ```

use allele_assoc::ks::ks_normal;
use allele_assoc::normal::z_half;
use allele_assoc::power::{noncentrality, power_t, power_u, power_w, power_w_delta};
use allele_assoc::sim::{
    estimate_power, estimate_type1, null_distribution_sample, SamplingMode, SimConfig, SimResult,
    TestKind,
};
use allele_assoc::stats::{q_hat, q_hat_delta, t_statistic, w_delta_statistic, w_statistic};
use allele_assoc::{
    delta_bounds, AlleleCounts, ContinuityDirection, DesignConstants, MarkerSpec, PenetranceModel,
    PopulationSummary,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const SEED: u64 = 20_240_601;
/// Type I error settings: replications and significance level.
const TYPE1_REPS: u64 = 1_000_000;
const TYPE1_ALPHA: f64 = 1e-3;
/// Allowed distance from a reference rejection rate, in Monte Carlo SEs of that rate.
const TYPE1_SES: f64 = 4.0;
/// Pairwise separation required for the qualitative ordering, in combined SEs.
const ORDER_SES: f64 = 2.0;
const IDENTITY_TABLES: usize = 10_000;
const IDENTITY_RTOL: f64 = 1e-12;
const SIZE_COMBINATIONS: usize = 100;
const SIZE_TOL: f64 = 1e-12;
const POWER_REPS: u64 = 100_000;
const POWER_TOL: f64 = 0.02;
const KS_REPS: u64 = 100_000;
const KS_LEVEL: f64 = 0.01;
const TAIL_SES: f64 = 2.0;
/// Slack for "nonincreasing" comparisons of power values.
const SHAPE_TOL: f64 = 1e-12;
/// One-ulp-scale tolerance for "exactly 0.15".
const PREVALENCE_TOL: f64 = 1e-15;

type Criterion = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn additive(p1: f64) -> PenetranceModel {
    PenetranceModel::additive(p1, 0.60, 0.10).unwrap()
}

fn null_config(n: u64, q1: f64, tests: Vec<TestKind>, reps: u64) -> SimConfig {
    let model = additive(0.10);
    SimConfig {
        model,
        marker: MarkerSpec::new(q1, 0.0).unwrap(),
        r_cases: n,
        s_controls: n,
        pi_hat: model.prevalence(),
        replications: reps,
        alphas: vec![TYPE1_ALPHA],
        mode: SamplingMode::Allele,
        seed: SEED,
        tests,
        correction: ContinuityDirection::TowardZero,
    }
}

fn null_run(n: u64, q1: f64, tests: Vec<TestKind>) -> SimResult {
    estimate_type1(&null_config(n, q1, tests, TYPE1_REPS)).unwrap()
}

/// Compare simulated rates with reference rates, each within `TYPE1_SES`
/// binomial SEs of the reference.
fn against_reference(result: &SimResult, targets: &[(TestKind, f64)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for &(test, target) in targets {
        let got = result.rate(&test, TYPE1_ALPHA).unwrap().fraction;
        let tol = TYPE1_SES * (target * (1.0 - target) / TYPE1_REPS as f64).sqrt();
        let ok = (got - target).abs() <= tol;
        pass &= ok;
        parts.push(format!(
            "{} {got:.5e} vs {target:.5e} (|d| {:.2e} {} {tol:.2e})",
            test.label(),
            (got - target).abs(),
            if ok { "<=" } else { ">" }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn type1_r500_q010() -> Outcome {
    let r = null_run(500, 0.10, vec![TestKind::T, TestKind::W, TestKind::WCor]);
    against_reference(
        &r,
        &[
            (TestKind::T, 1.00124e-3),
            (TestKind::W, 1.27542e-3),
            (TestKind::WCor, 1.12314e-3),
        ],
    )
}

fn type1_r2000_q025() -> Outcome {
    let wd = TestKind::WDelta { weight: 0.40 };
    let r = null_run(
        2000,
        0.25,
        vec![TestKind::T, TestKind::W, TestKind::WCor, wd],
    );
    against_reference(
        &r,
        &[
            (TestKind::W, 1.01565e-3),
            (TestKind::T, 1.00851e-3),
            (TestKind::WCor, 0.96987e-3),
            (wd, 1.00206e-3),
        ],
    )
}

fn type1_ordering() -> Outcome {
    let tests = vec![TestKind::W, TestKind::WCor];
    let base = null_run(500, 0.10, tests.clone());
    let get = |r: &SimResult, t: TestKind| {
        let rate = r.rate(&t, TYPE1_ALPHA).unwrap();
        (rate.fraction, rate.se)
    };
    let (w, w_se) = get(&base, TestKind::W);
    let (wc, wc_se) = get(&base, TestKind::WCor);
    let mut pass = true;
    let mut parts = Vec::new();
    let mut check = |label: String, hi: f64, lo: f64, se: f64| {
        let ok = hi - lo > ORDER_SES * se;
        pass &= ok;
        parts.push(format!(
            "{label}: {hi:.4e} - {lo:.4e} {} {:.1e}",
            if ok { ">" } else { "<=" },
            ORDER_SES * se
        ));
    };
    check(
        "W > W_cor".into(),
        w,
        wc,
        (w_se * w_se + wc_se * wc_se).sqrt(),
    );
    check("W_cor > nominal".into(), wc, TYPE1_ALPHA, wc_se);
    for (n, q1) in [(2000, 0.10), (500, 0.25)] {
        let (w2, w2_se) = get(&null_run(n, q1, tests.clone()), TestKind::W);
        check(
            format!("W inflation shrinks at R=S={n}, q1={q1}"),
            w,
            w2,
            (w_se * w_se + w2_se * w2_se).sqrt(),
        );
    }
    outcome(pass, parts.join("; "))
}

fn delta_bound_values() -> Outcome {
    let round2 = |x: f64| (x * 100.0).round() / 100.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for (p1, q1, reference) in [
        (0.05, 0.05, -0.053),
        (0.25, 0.05, -0.12),
        (0.25, 0.25, -0.26),
    ] {
        let got = delta_bounds(p1, q1).unwrap().min;
        let ok = round2(got) == round2(reference);
        pass &= ok;
        parts.push(format!(
            "p1={p1},q1={q1}: {got:.4} vs {reference} {}",
            if ok { "ok" } else { "MISMATCH" }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn prevalence() -> Outcome {
    let pi = additive(0.10).prevalence();
    outcome(
        (pi - 0.15).abs() <= PREVALENCE_TOL,
        format!("pi = {pi:.17} (tolerance {PREVALENCE_TOL:e})"),
    )
}

fn identity_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut tables, mut worst_w, mut worst_wd, mut branch_violations, mut ties) =
        (0, 0f64, 0f64, 0, 0);
    while tables < IDENTITY_TABLES {
        let r: u64 = rng.random_range(1..=5000);
        let s: u64 = rng.random_range(1..=5000);
        let r1 = rng.random_range(0..=2 * r);
        let s1 = rng.random_range(0..=2 * s);
        let counts = AlleleCounts::new(r1, 2 * r - r1, s1, 2 * s - s1).unwrap();
        if counts.is_degenerate() {
            continue;
        }
        tables += 1;
        let pi_hat = rng.random_range(1e-3..1.0 - 1e-3);
        let weight = rng.random_range(0.0..=1.0);
        let t = t_statistic(&counts).unwrap();
        let w = w_statistic(&counts, pi_hat).unwrap();
        let q = q_hat(&counts, pi_hat).unwrap();
        let wd = w_delta_statistic(&counts, weight).unwrap();
        let qd = q_hat_delta(&counts, weight).unwrap();
        let rel = |x: f64| {
            if t == 0.0 {
                x.abs()
            } else {
                (x - t).abs() / t.abs()
            }
        };
        worst_w = worst_w.max(rel(w * q));
        worst_wd = worst_wd.max(rel(wd * qd));
        // the equivalence is vacuous when both statistics are zero
        if t == 0.0 {
            ties += 1;
            continue;
        }
        if (w.abs() > t.abs()) != (q < 1.0) {
            branch_violations += 1;
        }
    }
    outcome(
        worst_w <= IDENTITY_RTOL && worst_wd <= IDENTITY_RTOL && branch_violations == 0,
        format!(
            "{tables} tables: max rel |W*Q-T| {worst_w:.1e}, |W_d*Q_d-T| {worst_wd:.1e} (tol {IDENTITY_RTOL:e}); \
             branch violations {branch_violations} ({ties} zero-difference tables skipped)"
        ),
    )
}

fn size_property() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst = 0f64;
    let mut done = 0;
    while done < SIZE_COMBINATIONS {
        let pens: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        let Ok(model) =
            PenetranceModel::new(rng.random_range(0.01..0.99), pens[0], pens[1], pens[2])
        else {
            continue;
        };
        let marker = MarkerSpec::new(rng.random_range(0.01..0.99), 0.0).unwrap();
        let design =
            DesignConstants::new(rng.random_range(10..10_000), rng.random_range(10..10_000))
                .unwrap();
        let alpha = 10f64.powf(rng.random_range(-10.0..-1.0));
        let p = PopulationSummary::new(&model, &marker).unwrap();
        let q = p.q(design.lambda);
        let values = [
            power_t(design.m, p.b, 0.0, q, alpha).unwrap(),
            power_w(design.m, p.b, 0.0, q, alpha).unwrap(),
            power_u(design.m, p.b, 0.0, q, alpha).unwrap(),
            power_w_delta(&model, &marker, &design, rng.random_range(0.0..=1.0), alpha).unwrap(),
        ];
        for v in values {
            worst = worst.max((v - alpha).abs());
        }
        done += 1;
    }
    outcome(
        worst <= SIZE_TOL,
        format!(
            "{done} combinations x 4 functions: max |power - alpha| {worst:.1e} (tol {SIZE_TOL:e})"
        ),
    )
}

fn formula_vs_simulation() -> Outcome {
    // (p1, q1, Delta, alpha), all at R = S = 1000 under the additive model
    let points = [
        (0.05, 0.15, 0.3, 1e-8),
        (0.15, 0.15, 0.3, 1e-8),
        (0.15, 0.30, 0.3, 1e-8),
        (0.05, 0.15, 0.2, 1e-4),
        (0.60, 0.20, -0.4, 1e-8),
    ];
    let design = DesignConstants::new(1000, 1000).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (p1, q1, delta, alpha) in points {
        let model = additive(p1);
        let marker = MarkerSpec::new(q1, delta).unwrap();
        let p = PopulationSummary::new(&model, &marker).unwrap();
        let q = p.q(design.lambda);
        let config = SimConfig {
            model,
            marker,
            r_cases: 1000,
            s_controls: 1000,
            pi_hat: model.prevalence(),
            replications: POWER_REPS,
            alphas: vec![alpha],
            mode: SamplingMode::Allele,
            seed: SEED,
            tests: vec![TestKind::T, TestKind::W],
            correction: ContinuityDirection::TowardZero,
        };
        let sim = estimate_power(&config).unwrap();
        let t = power_t(design.m, p.b, delta, q, alpha).unwrap();
        let w = power_w(design.m, p.b, delta, q, alpha).unwrap();
        let st = sim.rate(&TestKind::T, alpha).unwrap().fraction;
        let sw = sim.rate(&TestKind::W, alpha).unwrap().fraction;
        let ok = (st - t).abs() <= POWER_TOL && (sw - w).abs() <= POWER_TOL;
        pass &= ok;
        parts.push(format!(
            "({p1},{q1},{delta},{alpha:e}) T {st:.4}/{t:.4} W {sw:.4}/{w:.4}"
        ));
    }
    outcome(
        pass,
        format!("sim/formula, tol {POWER_TOL}: {}", parts.join("; ")),
    )
}

/// Feasible points of a q1 sweep at fixed `Delta`.
fn q1_sweep(p1: f64, delta: f64, step: f64) -> Vec<(MarkerSpec, PopulationSummary)> {
    let model = additive(p1);
    let n = (1.0 / step).round() as usize;
    (1..n)
        .filter_map(|i| {
            let marker = MarkerSpec::new(i as f64 * step, delta).ok()?;
            let summary = PopulationSummary::new(&model, &marker).ok()?;
            Some((marker, summary))
        })
        .collect()
}

fn power_curve_shapes() -> Outcome {
    let design = DesignConstants::new(1000, 1000).unwrap();
    let alpha = 1e-8;
    let mut parts = Vec::new();
    let mut pass = true;

    // q1 sweeps at Delta = 0.3: T rises with q1, the mean term of W does not move
    for p1 in [0.05, 0.15] {
        let sweep = q1_sweep(p1, 0.3, 1e-3);
        let t: Vec<f64> = sweep
            .iter()
            .map(|(_, s)| power_t(design.m, s.b, 0.3, s.q(design.lambda), alpha).unwrap())
            .collect();
        let rising = t.windows(2).all(|w| w[1] > w[0]);
        let terms: Vec<f64> = sweep
            .iter()
            .map(|(_, s)| noncentrality(design.m, s.b, 0.3))
            .collect();
        let flat = terms.iter().all(|&x| x == terms[0]);
        pass &= rising && flat;
        parts.push(format!(
            "q1 sweep p1={p1}: {} points, power_t strictly increasing {rising}, sqrt(m)B*Delta constant {flat}",
            t.len()
        ));
    }

    // weight sweep: W_delta falls as delta grows when q_{1|0} < q_{1|1}
    let model = additive(0.05);
    let weights: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let (mut curves, mut bad) = (0, 0);
    for (marker, s) in q1_sweep(0.05, 0.3, 1e-2) {
        if s.q1_ctrl >= s.q1_case {
            continue;
        }
        curves += 1;
        let p: Vec<f64> = weights
            .iter()
            .map(|&d| power_w_delta(&model, &marker, &design, d, alpha).unwrap())
            .collect();
        if p.windows(2).any(|w| w[1] > w[0] + SHAPE_TOL) {
            bad += 1;
        }
    }
    pass &= bad == 0 && curves > 0;
    parts.push(format!(
        "weight sweep: {curves} q1 values, {bad} with power_w_delta increasing in delta"
    ));

    // Delta = -0.4, p1 = 0.6: negative LD with a minor allele M1 favours T
    let sweep: Vec<_> = q1_sweep(0.60, -0.40, 1e-3)
        .into_iter()
        .filter(|(m, _)| m.q1() <= 0.5)
        .collect();
    let bad = sweep
        .iter()
        .filter(|(_, s)| {
            let q = s.q(design.lambda);
            power_t(design.m, s.b, -0.4, q, alpha).unwrap()
                < power_w(design.m, s.b, -0.4, q, alpha).unwrap()
        })
        .count();
    pass &= bad == 0 && !sweep.is_empty();
    parts.push(format!(
        "negative LD sweep: {} points with q1 <= 0.5, {bad} with power_t < power_w",
        sweep.len()
    ));

    outcome(pass, parts.join("; "))
}

fn null_calibration() -> Outcome {
    let ks_config = null_config(2000, 0.25, vec![TestKind::T], KS_REPS);
    let sample = null_distribution_sample(&ks_config).unwrap();
    let t: Vec<f64> = sample.draws.iter().map(|d| d.t).collect();
    let ks = ks_normal(&t);
    let ks_ok = ks.passes(KS_LEVEL);

    let config = null_config(500, 0.10, vec![TestKind::U], TYPE1_REPS);
    let sample = null_distribution_sample(&config).unwrap();
    let z = z_half(TYPE1_ALPHA).unwrap();
    let lower: Vec<_> = sample.draws.iter().filter(|d| d.u < -z).collect();
    let upper = sample.draws.iter().filter(|d| d.u > z).count();
    let w_branch = lower.iter().filter(|d| d.q_hat < 1.0).count();
    let reps = TYPE1_REPS as f64;
    let half = TYPE1_ALPHA / 2.0;
    let frac = lower.len() as f64 / reps;
    let se = (half * (1.0 - half) / reps).sqrt();
    let tail_ok = frac - half > TAIL_SES * se;

    outcome(
        ks_ok && tail_ok,
        format!(
            "KS of T (R=S=2000, q1=0.25, n={}): D={:.5}, p={:.2e} {} {KS_LEVEL}; \
             U lower tail (R=S=500, q1=0.10): {frac:.3e} vs {half:.1e}, excess {:.1e} {} {:.1e} \
             ({w_branch} of {} from the Q_hat<1 branch; upper tail {:.3e})",
            ks.n,
            ks.statistic,
            ks.p_value,
            if ks_ok { ">" } else { "<=" },
            frac - half,
            if tail_ok { ">" } else { "<=" },
            TAIL_SES * se,
            lower.len(),
            upper as f64 / reps,
        ),
    )
}

fn determinism() -> Outcome {
    let null = null_config(
        500,
        0.10,
        vec![TestKind::T, TestKind::W, TestKind::WCor, TestKind::U],
        200_000,
    );
    let mut alt = null.clone();
    alt.marker = MarkerSpec::new(0.10, 0.3).unwrap();
    alt.mode = SamplingMode::Genotype;
    let counts = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            [
                estimate_type1(&null).unwrap(),
                estimate_power(&alt).unwrap(),
            ]
            .map(|r| {
                (
                    r.rates.iter().map(|x| x.rejections).collect::<Vec<_>>(),
                    r.degenerate_replicates,
                )
            })
        })
    };
    let runs: Vec<_> = [1, 4, 8].into_iter().map(counts).collect();
    let same = runs.iter().all(|r| *r == runs[0]);
    outcome(
        same,
        format!(
            "rejection counts under 1/4/8 threads identical: {same} ({:?})",
            runs[0][0].0
        ),
    )
}

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("type1_r500_q010", type1_r500_q010),
        ("type1_r2000_q025", type1_r2000_q025),
        ("type1_ordering", type1_ordering),
        ("delta_bound_values", delta_bound_values),
        ("prevalence", prevalence),
        ("identity_suite", identity_suite),
        ("size_property", size_property),
        ("formula_vs_simulation", formula_vs_simulation),
        ("power_curve_shapes", power_curve_shapes),
        ("null_calibration", null_calibration),
        ("determinism", determinism),
    ];
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let (mut passed, mut failed) = (0, 0);
    for (name, criterion) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let started = Instant::now();
        let o = criterion();
        println!(
            "{} {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            started.elapsed().as_secs_f64()
        );
        if o.pass {
            passed += 1;
        } else {
            failed += 1;
        }
    }
    println!("acceptance: {passed} passed, {failed} failed");
    if failed > 0 {
        std::process::exit(1);
    }
}

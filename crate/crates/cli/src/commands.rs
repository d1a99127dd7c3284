//! Subcommand implementations. Each writes to a file or, when no output path
//! is given, to the supplied writer.

use crate::args::{
    required, AxisArg, CorrectionArg, ModeArg, ModelArgs, PowerArgs, ScanArgs, SimulateArgs,
    TestArg,
};
use crate::counts::parse_counts_file;
use crate::error::{CliError, CliResult};
use crate::scan::{self, num, LOCALITY_NOTE};
use allele_assoc::power::{power_grid, GridAxis, GridSpec, PowerPoint};
use allele_assoc::sim::{
    estimate_power, estimate_type1, SamplingMode, SimConfig, SimResult, TestKind,
};
use allele_assoc::{
    ContinuityDirection, DesignConstants, MarkerSpec, PenetranceModel, PopulationSummary,
};
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

fn penetrance_model(p1: Option<f64>, pen: Option<Vec<f64>>) -> CliResult<PenetranceModel> {
    let p1 = required(p1, "p1")?;
    let pen = required(pen, "pen")?;
    let [a, b, c] = pen[..] else {
        return Err(CliError::Usage(format!(
            "--pen takes three penetrances (A1A1,A1A2,A2A2), got {}",
            pen.len()
        )));
    };
    Ok(PenetranceModel::new(p1, a, b, c)?)
}

fn direction(arg: Option<CorrectionArg>) -> ContinuityDirection {
    match arg {
        Some(CorrectionArg::AwayFromZero) => ContinuityDirection::AwayFromZero,
        _ => ContinuityDirection::TowardZero,
    }
}

/// Write through `sink` to `path`, or to `fallback` when no path is given.
fn emit<F>(path: Option<&Path>, fallback: &mut dyn Write, sink: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> CliResult<()>,
{
    match path {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut out = BufWriter::new(file);
            sink(&mut out)?;
            out.flush().map_err(|e| CliError::io(path, e))
        }
        None => {
            sink(fallback)?;
            Ok(fallback.flush()?)
        }
    }
}

#[derive(Serialize)]
struct ModelOutput {
    penetrances: [f64; 3],
    allele_risks: [f64; 2],
    #[serde(flatten)]
    summary: PopulationSummary,
    r_cases: Option<u64>,
    s_controls: Option<u64>,
    lambda: f64,
    q: f64,
}

pub fn model(args: ModelArgs, out: &mut dyn Write) -> CliResult<()> {
    let args = args.resolve()?;
    let model = penetrance_model(args.p1, args.pen)?;
    let marker = MarkerSpec::new(required(args.q1, "q1")?, required(args.delta, "delta")?)?;
    let summary = PopulationSummary::new(&model, &marker)?;
    let lambda = match (args.r, args.s) {
        (Some(r), Some(s)) => DesignConstants::new(r, s)?.lambda,
        (None, None) => 0.5,
        _ => return Err(CliError::Usage("give both --r and --s, or neither".into())),
    };
    let (pen11, pen12, pen22) = model.penetrances();
    let (f1, f2) = model.allele_risks();
    let output = ModelOutput {
        penetrances: [pen11, pen12, pen22],
        allele_risks: [f1, f2],
        summary,
        r_cases: args.r,
        s_controls: args.s,
        lambda,
        q: summary.q(lambda),
    };
    let json = serde_json::to_string_pretty(&output).expect("model summary serializes");
    writeln!(out, "{json}")?;
    Ok(())
}

pub fn scan(args: ScanArgs, out: &mut dyn Write, note: &mut dyn Write) -> CliResult<()> {
    let args = args.resolve()?;
    let input = required(args.input, "input")?;
    let pi_hat = required(args.pi_hat, "pi-hat")?;
    if !(pi_hat > 0.0 && pi_hat < 1.0) {
        return Err(CliError::Validation(format!(
            "--pi-hat must lie in (0, 1), got {pi_hat}"
        )));
    }
    let ci_level = args.ci_level.unwrap_or(0.95);
    if !(ci_level > 0.0 && ci_level < 1.0) {
        return Err(CliError::Validation(format!(
            "--ci-level must lie in (0, 1), got {ci_level}"
        )));
    }
    let markers = parse_counts_file(&input)?;
    let rows = scan::scan(&markers, pi_hat, ci_level, direction(args.correction))?;
    emit(args.output.as_deref(), out, |w| scan::write_tsv(w, &rows))?;

    let flagged = |f: fn(&scan::ScanRow) -> bool| rows.iter().filter(|r| f(r)).count();
    writeln!(
        note,
        "scanned {} markers ({} degenerate, {} monomorphic)",
        rows.len(),
        flagged(|r| r.report.degenerate),
        flagged(|r| r.report.monomorphic),
    )?;
    if args.warn_locality.unwrap_or(true) {
        writeln!(note, "{LOCALITY_NOTE}")?;
    }
    Ok(())
}

fn default_grid(axis: AxisArg) -> Vec<f64> {
    let (lo, hi, n) = match axis {
        AxisArg::Q1 => (0.005, 0.995, 199),
        AxisArg::Delta => (-1.0, 1.0, 201),
        AxisArg::DeltaWeight => (0.0, 1.0, 101),
    };
    linspace(lo, hi, n)
}

fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![from];
    }
    (0..steps)
        .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
        .collect()
}

pub fn power(args: PowerArgs, out: &mut dyn Write) -> CliResult<()> {
    let args = args.resolve()?;
    let axis = required(args.axis, "axis")?;
    let model = penetrance_model(args.p1, args.pen)?;
    let design = DesignConstants::new(required(args.r, "r")?, required(args.s, "s")?)?;
    let alpha = required(args.alpha, "alpha")?;

    // validate whatever is held fixed before sweeping
    let (grid_axis, fixed) = match axis {
        AxisArg::Q1 => {
            let delta = required(args.delta, "delta")?;
            MarkerSpec::new(0.5, delta)?;
            (GridAxis::Q1, (f64::NAN, delta))
        }
        AxisArg::Delta => {
            let q1 = required(args.q1, "q1")?;
            MarkerSpec::new(q1, 0.0)?;
            (GridAxis::Delta, (q1, f64::NAN))
        }
        AxisArg::DeltaWeight => {
            let marker = MarkerSpec::new(required(args.q1, "q1")?, required(args.delta, "delta")?)?;
            marker.check_feasible(model.p1())?;
            (GridAxis::DeltaWeight, (marker.q1(), marker.delta()))
        }
    };
    let values = match (args.values, args.from, args.to, args.steps) {
        (Some(v), None, None, None) => v,
        (None, Some(from), Some(to), Some(steps)) if steps > 0 => linspace(from, to, steps),
        (None, None, None, None) => default_grid(axis),
        _ => {
            return Err(CliError::Usage(
                "give either --values or all of --from, --to and --steps (steps >= 1)".into(),
            ))
        }
    };
    let spec = GridSpec {
        axis: grid_axis,
        values,
        weights: args.weights.unwrap_or_default(),
    };
    let points = power_grid(&model, fixed, &design, &spec, alpha)?;
    emit(args.output.as_deref(), out, |w| {
        write_power_csv(w, grid_axis, &points)
    })
}

fn write_power_csv(out: &mut dyn Write, axis: GridAxis, points: &[PowerPoint]) -> CliResult<()> {
    writeln!(out, "{},test,weight,power,feasible", axis.name())?;
    let cell = |p: Option<f64>| p.map(num).unwrap_or_default();
    let mut last: Option<f64> = None;
    for p in points {
        let x = num(p.axis_value);
        // T, W and U do not depend on the weight: once per axis value
        if last != Some(p.axis_value) {
            for (name, value) in [("T", p.power_t), ("W", p.power_w), ("U", p.power_u)] {
                writeln!(out, "{x},{name},,{},{}", cell(value), p.feasible)?;
            }
            last = Some(p.axis_value);
        }
        writeln!(
            out,
            "{x},W_delta,{},{},{}",
            num(p.delta_weight),
            cell(p.power_w_delta),
            p.feasible
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    config: &'a SimConfig,
    result: &'a SimResult,
}

pub fn simulate(args: SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    let args = args.resolve()?;
    let model = penetrance_model(args.p1, args.pen)?;
    let marker = MarkerSpec::new(required(args.q1, "q1")?, args.delta.unwrap_or(0.0))?;
    let deltas = args.deltas.unwrap_or_default();
    let requested = args.tests.unwrap_or_else(|| {
        let mut t = vec![TestArg::T, TestArg::W, TestArg::WCor, TestArg::U];
        if !deltas.is_empty() {
            t.push(TestArg::WDelta);
        }
        t
    });
    let mut tests = Vec::new();
    for t in requested {
        match t {
            TestArg::T => tests.push(TestKind::T),
            TestArg::W => tests.push(TestKind::W),
            TestArg::WCor => tests.push(TestKind::WCor),
            TestArg::U => tests.push(TestKind::U),
            TestArg::WDelta | TestArg::WCorDelta if deltas.is_empty() => {
                return Err(CliError::Usage(
                    "w_delta and w_cor_delta need --deltas".into(),
                ))
            }
            TestArg::WDelta => {
                tests.extend(deltas.iter().map(|&weight| TestKind::WDelta { weight }))
            }
            TestArg::WCorDelta => {
                tests.extend(deltas.iter().map(|&weight| TestKind::WCorDelta { weight }))
            }
        }
    }
    let config = SimConfig {
        model,
        marker,
        r_cases: required(args.r, "r")?,
        s_controls: required(args.s, "s")?,
        pi_hat: required(args.pi_hat, "pi-hat")?,
        replications: required(args.reps, "reps")?,
        alphas: args.alphas.unwrap_or_else(|| vec![1e-3]),
        mode: match args.mode {
            Some(ModeArg::Genotype) => SamplingMode::Genotype,
            _ => SamplingMode::Allele,
        },
        seed: args.seed.unwrap_or(1),
        tests,
        correction: direction(args.correction),
    };
    let type1 = args.type1.unwrap_or(false);
    let run = || {
        if type1 {
            estimate_type1(&config)
        } else {
            estimate_power(&config)
        }
    };
    let result = match args.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let json = serde_json::to_string_pretty(&SimulateOutput {
        config: &config,
        result: &result,
    })
    .expect("simulation result serializes");
    emit(args.output.as_deref(), out, |w| Ok(writeln!(w, "{json}")?))?;
    if let Some(path) = args.tsv.as_deref() {
        std::fs::write(path, result.to_tsv()).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

use std::collections::BTreeMap;
use std::path::Path;

use lpneg::acceptance::{run_suite, Fault, SuiteOptions};
use lpneg::embedcheck::{
    critical_exponent, scan_points, sign_change_certificate, sign_scan, PointEvaluator, ScanConfig,
};
use lpneg::negft::{
    ft_linf_closed, ft_linf_quadrature, ft_lq_quadrature, ft_lq_via_linf, ft_sphere, GammaQTable,
};
use lpneg::specfun::gamma_q;
use lpneg::stablesim::{
    correlation_experiment, simulate_norm_powers, Estimator, StableSpec, PARTITIONS, STREAM_X, STREAM_Y,
};
use lpneg::{Error, QuadratureConfig, SpaceSpec, TransformValue};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::{
    AtomsPreset, CertifyArgs, CriticalArgs, EstimatorArg, FaultArg, GammaqArgs, GammaqMethod, MethodArg, ScanArgs,
    SelftestArgs, SignscanArgs, SimulateArgs, SpaceArgs, TolArgs, TransformArgs,
};
use crate::output::{canonical_json_line, to_value};
use crate::settings::Settings;
use crate::CliError;

/// What a subcommand hands back to `main` for the manifest and exit code.
pub struct Outcome {
    pub report: Value,
    pub seed: Option<u64>,
    pub partitions: Option<u64>,
    pub errors: BTreeMap<String, f64>,
    /// 0, 1 for failed self-test criteria, 3 for non-convergence.
    pub exit: u8,
    pub message: Option<String>,
}

impl Outcome {
    fn new(report: Value) -> Self {
        Outcome {
            report,
            seed: None,
            partitions: None,
            errors: BTreeMap::new(),
            exit: 0,
            message: None,
        }
    }
}

/// Writes a CSV whose first line is `# manifest: <json>`.
pub type CsvSink<'a> = &'a dyn Fn(&Path, Vec<String>, Vec<Vec<String>>) -> Result<(), CliError>;

pub fn write_csv(path: &Path, manifest: &Value, header: Vec<String>, rows: Vec<Vec<String>>) -> Result<(), CliError> {
    let io = |e: &dyn std::fmt::Display| CliError::io(format!("{}: {e}", path.display()));
    let mut buf = format!("# manifest: {}\n", canonical_json_line(manifest)).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&header).map_err(|e| io(&e))?;
        for r in rows {
            w.write_record(&r).map_err(|e| io(&e))?;
        }
        w.flush().map_err(|e| io(&e))?;
    }
    std::fs::write(path, buf).map_err(|e| io(&e))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn quad_config(settings: &Settings, tol: &TolArgs) -> QuadratureConfig {
    let mut cfg = settings.quad.clone();
    if let Some(r) = tol.rel_tol {
        cfg.rel_tol = r;
    }
    if let Some(a) = tol.abs_tol {
        cfg.abs_tol = a;
    }
    cfg
}

/// Reads an atoms CSV: a header line `m=<int>`, then rows of `m` reals.
pub fn read_atoms(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let bad = |msg: String| CliError::validation(format!("{}: {msg}", path.display()));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let m: usize = header
        .trim()
        .strip_prefix("m=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| bad(format!("expected header m=<int>, got {header:?}")))?;
    let body: String = lines.collect::<Vec<_>>().join("\n");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let row: Vec<f64> = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| bad(format!("row {}: {e}", i + 1))))
            .collect::<Result<_, _>>()?;
        if row.len() != m {
            return Err(bad(format!("row {} has {} entries, header says m={m}", i + 1, row.len())));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(bad("no rows".into()));
    }
    Ok(rows)
}

fn build_space(
    kind: &str,
    q: Option<f64>,
    n: Option<usize>,
    spectral_file: Option<&Path>,
    r: Option<f64>,
) -> Result<SpaceSpec<f64>, CliError> {
    let need_n = || n.ok_or_else(|| CliError::validation(format!("--space {kind} needs --n")));
    let space = match kind {
        "linf" => SpaceSpec::Linf { n: need_n()? },
        "lq" => {
            let q = q.ok_or_else(|| CliError::validation("--space lq needs its exponent"))?;
            SpaceSpec::lq(q, need_n()?)?
        }
        "spectral-file" | "spectral" => {
            let path = spectral_file.ok_or_else(|| CliError::validation("--space spectral-file needs --spectral-file"))?;
            let r = r.ok_or_else(|| CliError::validation("--space spectral-file needs --r"))?;
            let s = SpaceSpec::spectral(read_atoms(path)?, r)?;
            if let Some(n) = n {
                if n != s.n() {
                    return Err(CliError::validation(format!("--n {n} but the atoms file has {} rows", s.n())));
                }
            }
            s
        }
        other => {
            let exponent = other
                .strip_prefix('l')
                .and_then(|e| e.parse::<f64>().ok())
                .ok_or_else(|| CliError::validation(format!("unknown space {other:?}")))?;
            SpaceSpec::lq(exponent, need_n()?)?
        }
    };
    Ok(space)
}

fn space_from(args: &SpaceArgs) -> Result<SpaceSpec<f64>, CliError> {
    build_space(&args.space, args.q, args.n, args.spectral_file.as_deref(), args.r)
}

fn evaluate(method: MethodArg, space: &SpaceSpec<f64>, p: f64, xi: &[f64], cfg: &QuadratureConfig) -> lpneg::Result<TransformValue<f64>> {
    let none = |what: &str| Err(Error::NoEvaluator(format!("{what} on {space}")));
    match (method, space) {
        (MethodArg::Sphere, _) => ft_sphere(space, p, xi, cfg),
        (MethodArg::Closed, SpaceSpec::Linf { .. }) => ft_linf_closed(p, xi),
        (MethodArg::Quad, SpaceSpec::Linf { .. }) => ft_linf_quadrature(p, xi, cfg),
        (MethodArg::Quad | MethodArg::Lq, SpaceSpec::Lq { q, .. }) => ft_lq_quadrature(*q, p, xi, cfg),
        (MethodArg::LqViaLinf, SpaceSpec::Lq { q, .. }) => ft_lq_via_linf(*q, p, xi, cfg),
        (MethodArg::Closed, _) => none("the closed form (l_inf only)"),
        (MethodArg::Quad, _) => none("oscillatory quadrature"),
        (MethodArg::Lq, _) => none("the gamma_q product integral"),
        (MethodArg::LqViaLinf, _) => none("the l_inf Monte Carlo route"),
        (MethodArg::All, _) => unreachable!("expanded by the caller"),
    }
}

fn methods_for(space: &SpaceSpec<f64>) -> Vec<MethodArg> {
    match space {
        SpaceSpec::Linf { .. } => vec![MethodArg::Closed, MethodArg::Quad, MethodArg::Sphere],
        SpaceSpec::Lq { .. } => vec![MethodArg::Lq, MethodArg::LqViaLinf, MethodArg::Sphere],
        SpaceSpec::Spectral { .. } => vec![MethodArg::Sphere],
    }
}

fn method_label(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Closed => "closed",
        MethodArg::Quad => "quad",
        MethodArg::Lq => "lq",
        MethodArg::LqViaLinf => "lq-via-linf",
        MethodArg::Sphere => "sphere",
        MethodArg::All => "all",
    }
}

#[derive(Serialize)]
struct MethodRecord {
    method: String,
    value: f64,
    err_estimate: f64,
    converged: bool,
}

#[derive(Serialize)]
struct Skipped {
    method: String,
    reason: String,
}

#[derive(Serialize)]
struct Delta {
    a: String,
    b: String,
    delta: f64,
    err_sum: f64,
    agree: bool,
}

pub fn transform(args: &TransformArgs, settings: &Settings) -> Result<Outcome, CliError> {
    let space = space_from(&args.space)?;
    if args.xi.len() != space.n() {
        return Err(CliError::validation(format!(
            "--xi has {} coordinates, the space has dimension {}",
            args.xi.len(),
            space.n()
        )));
    }
    let mut cfg = quad_config(settings, &args.tol);
    if let Some(n) = args.mc_samples {
        cfg.mc_samples = n;
    }
    if let Some(s) = args.mc_seed {
        cfg.mc_seed = s;
    }
    cfg.validate()?;
    let all = args.method == MethodArg::All;
    let methods = if all { methods_for(&space) } else { vec![args.method] };
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for m in methods {
        match evaluate(m, &space, args.p, &args.xi, &cfg) {
            Ok(v) => records.push(MethodRecord {
                method: v.method.as_str().into(),
                value: v.value,
                err_estimate: v.err_estimate,
                converged: v.converged,
            }),
            Err(Error::NonConvergence { estimate, err_bound, what }) => {
                records.push(MethodRecord {
                    method: method_label(m).into(),
                    value: estimate,
                    err_estimate: err_bound,
                    converged: false,
                });
                skipped.push(Skipped {
                    method: method_label(m).into(),
                    reason: format!("{what} stopped short of tolerance"),
                });
            }
            Err(e) if all => skipped.push(Skipped {
                method: method_label(m).into(),
                reason: e.to_string(),
            }),
            Err(e) => return Err(e.into()),
        }
    }
    if records.is_empty() {
        let reasons: Vec<String> = skipped.iter().map(|s| format!("{}: {}", s.method, s.reason)).collect();
        return Err(CliError::validation(format!("no method applies: {}", reasons.join("; "))));
    }
    skipped.retain(|s| !records.iter().any(|r| r.method == s.method && !r.converged));
    let mut deltas = Vec::new();
    for i in 0..records.len() {
        for j in i + 1..records.len() {
            let (a, b) = (&records[i], &records[j]);
            let delta = (a.value - b.value).abs();
            let err_sum = a.err_estimate + b.err_estimate;
            deltas.push(Delta {
                a: a.method.clone(),
                b: b.method.clone(),
                delta,
                err_sum,
                agree: delta <= err_sum,
            });
        }
    }
    let mut out = Outcome::new(json!({
        "space": to_value(&space),
        "p": args.p,
        "xi": args.xi,
        "methods": to_value(&records),
        "skipped": to_value(&skipped),
        "deltas": to_value(&deltas),
    }));
    if records.iter().any(|r| r.method == "lq_via_linf") {
        out.seed = Some(cfg.mc_seed);
    }
    for r in &records {
        out.errors.insert(r.method.clone(), r.err_estimate);
    }
    if records.iter().any(|r| !r.converged) {
        out.exit = 3;
        out.message = Some("at least one method did not reach its tolerance".into());
    }
    Ok(out)
}

fn scan_config(settings: &Settings, args: &ScanArgs) -> Result<ScanConfig, CliError> {
    let quad = quad_config(settings, &args.tol);
    quad.validate()?;
    Ok(ScanConfig {
        levels: args.grid.unwrap_or(settings.grid),
        samples: args.samples.unwrap_or(settings.samples),
        seed: args.seed.unwrap_or(settings.scan_seed),
        floor: args.floor.unwrap_or(settings.floor),
        decision_tol: args.decision_tol,
        quad,
    })
}

pub fn signscan(args: &SignscanArgs, settings: &Settings, csv_sink: CsvSink) -> Result<Outcome, CliError> {
    let space = space_from(&args.space)?;
    let cfg = scan_config(settings, &args.scan)?;
    let report = sign_scan(&space, args.p, &cfg)?;
    if let Some(path) = &args.dump_grid {
        let eval = PointEvaluator::for_space(&space, args.p, &cfg.quad)?;
        let (points, _) = scan_points(space.n(), &cfg);
        let mut rows = Vec::with_capacity(points.len());
        for x in &points {
            let (v, e) = match eval.eval(args.p, x) {
                Ok(v) => (v.value, v.err_estimate),
                Err(Error::NonConvergence { estimate, err_bound, .. }) => (estimate, err_bound),
                Err(e) => return Err(e.into()),
            };
            let mut row: Vec<String> = x.iter().map(|&c| num(c)).collect();
            row.push(num(v));
            row.push(num(e));
            rows.push(row);
        }
        let mut header: Vec<String> = (1..=space.n()).map(|i| format!("xi{i}")).collect();
        header.push("value".into());
        header.push("err".into());
        csv_sink(path, header, rows)?;
    }
    let mut out = Outcome::new(to_value(&report));
    out.seed = Some(cfg.seed);
    out.errors.insert("max_err".into(), report.max_err);
    out.errors.insert("median_err".into(), report.median_err);
    Ok(out)
}

pub fn certify(args: &CertifyArgs) -> Result<Outcome, CliError> {
    let report = sign_change_certificate(args.q, args.n, args.p)?;
    Ok(Outcome::new(to_value(&report)))
}

pub fn critical(args: &CriticalArgs, settings: &Settings) -> Result<Outcome, CliError> {
    let space = space_from(&args.space)?;
    let cfg = scan_config(settings, &args.scan)?;
    let report = critical_exponent(&space, &cfg)?;
    let mut out = Outcome::new(to_value(&report));
    out.seed = Some(cfg.seed);
    out.errors.insert("bracket_half_width".into(), 0.5 * (report.hi - report.lo));
    Ok(out)
}

pub fn simulate(args: &SimulateArgs, settings: &Settings, csv_sink: CsvSink) -> Result<Outcome, CliError> {
    let atoms = match (&args.atoms, &args.atoms_file) {
        (Some(preset), None) => {
            let n = args
                .n
                .ok_or_else(|| CliError::validation("--atoms presets need --n"))?;
            match preset {
                AtomsPreset::Identity => StableSpec::identity_atoms(n),
                AtomsPreset::Coupled => StableSpec::coupled_atoms(n),
            }
        }
        (None, Some(path)) => read_atoms(path)?,
        _ => return Err(CliError::validation("give exactly one of --atoms and --atoms-file")),
    };
    let n = atoms.len();
    if let Some(given) = args.n {
        if given != n {
            return Err(CliError::validation(format!("--n {given} but the atoms have {n} rows")));
        }
    }
    let space = build_space(&args.space, args.norm_q, Some(n), args.spectral_file.as_deref(), args.r)?;
    let spec = StableSpec::new(args.q, atoms, args.k)?;
    let n_samples = args.n_samples.unwrap_or(settings.n_samples);
    let seed = args.seed.unwrap_or(settings.sim_seed);
    let estimator = args.estimator.map(|e| match e {
        EstimatorArg::Mean => Estimator::Mean,
        EstimatorArg::MedianOfMeans => Estimator::MedianOfMeans,
    });
    let report = correlation_experiment(&space, &spec, args.p, n_samples, seed, estimator)?;
    if let Some(path) = &args.dump_samples {
        let xs = simulate_norm_powers(&space, &spec, args.p, n_samples, seed, STREAM_X);
        let ys = simulate_norm_powers(&space, &spec, args.p, n_samples, seed, STREAM_Y);
        let rows = xs
            .iter()
            .zip(&ys)
            .enumerate()
            .map(|(i, (x, y))| vec![i.to_string(), num(*x), num(*y)])
            .collect();
        csv_sink(path, vec!["index".into(), "x_norm_power".into(), "y_norm_power".into()], rows)?;
    }
    let mut out = Outcome::new(to_value(&report));
    out.seed = Some(seed);
    out.partitions = Some(PARTITIONS);
    out.errors.insert("e_x_ci_half_width".into(), report.e_x.ci_half_width);
    out.errors.insert("e_y_ci_half_width".into(), report.e_y.ci_half_width);
    Ok(out)
}

pub fn selftest(args: &SelftestArgs) -> Result<Outcome, CliError> {
    let opts = SuiteOptions {
        quick: args.quick,
        fault: args.inject_fault.map(|f| match f {
            FaultArg::Gamma => Fault::Gamma,
        }),
    };
    let report = run_suite(&opts);
    let mut out = Outcome::new(to_value(&report));
    let failed: Vec<String> = report
        .failed()
        .iter()
        .map(|c| format!("criterion {} ({}): {}", c.id, c.name, c.detail))
        .collect();
    if !failed.is_empty() {
        out.exit = 1;
        out.message = Some(format!("FAILED {}", failed.join("\nFAILED ")));
    }
    Ok(out)
}

pub fn gammaq(args: &GammaqArgs, settings: &Settings, csv_sink: CsvSink) -> Result<Outcome, CliError> {
    if args.points < 2 || !(args.t_max > 0.0) || !args.t_max.is_finite() {
        return Err(CliError::validation("need --points >= 2 and a positive finite --t-max"));
    }
    let cfg = quad_config(settings, &args.tol);
    cfg.validate()?;
    let ts: Vec<f64> = (0..args.points)
        .map(|i| args.t_max * i as f64 / (args.points - 1) as f64)
        .collect();
    let mut rows = Vec::with_capacity(ts.len());
    let (switch_point, table_err) = match args.method {
        GammaqMethod::Table => {
            let table = GammaQTable::build(args.q, &cfg)?;
            for &t in &ts {
                let (v, e) = table.eval(t);
                rows.push((t, v, e));
            }
            (table.switch_point(), Some(table.max_err()))
        }
        GammaqMethod::Direct => {
            for &t in &ts {
                let e = gamma_q(args.q, t, &cfg)?;
                rows.push((t, e.value, e.err));
            }
            (None, None)
        }
    };
    if let Some(path) = &args.csv {
        let body = rows.iter().map(|(t, v, e)| vec![num(*t), num(*v), num(*e)]).collect();
        csv_sink(path, vec!["t".into(), "value".into(), "err".into()], body)?;
    }
    let max_err = rows.iter().fold(0.0_f64, |m, r| m.max(r.2));
    let mut out = Outcome::new(json!({
        "q": args.q,
        "method": match args.method { GammaqMethod::Table => "table", GammaqMethod::Direct => "direct" },
        "switch_point": switch_point,
        "table_max_err": table_err,
        "rows": rows.iter().map(|(t, v, e)| json!({"t": t, "value": v, "err": e})).collect::<Vec<_>>(),
    }));
    out.errors.insert("max_err".into(), max_err);
    Ok(out)
}

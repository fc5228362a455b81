use std::io::Write;
use std::path::Path;

use hhcert_core::certify::{
    self, Builtin, CertificateReport, CertifyOptions, FunctionSpec, Interval, NdBudget, Verdict,
};
use hhcert_core::circulant::{
    circ_apply, circ_multiply, classify_stochasticity, product_row_formula, CirculantGenerator, Stochasticity,
};
use hhcert_core::closed_forms;
use hhcert_core::expr::parse;
use hhcert_core::korovkin::{decay_experiment, g_distance};
use hhcert_core::parallel::default_workers;
use hhcert_core::simplex::{simplex_volume, Mode, MonteCarlo};
use hhcert_core::{Rational, Report};
use num_traits::One;
use serde::Serialize;

use crate::output::{csv_text, decimal, emit, json_text, parse_number, parse_rational, rational_list, RunConfig};
use crate::{CertifyArgs, CliError, Format, KorovkinArgs, MatrixOp, NdArgs, OutputArgs, PropertyArg};

type Outcome = Result<i32, CliError>;

const SOLID_NOTE: &str = "note: solid mode draws generators from {c >= 0, sum c <= 1}; products then shrink \
toward the zero row, so T_m(g) tends to 1 rather than 0. Face mode (sum c = 1) is the reading under which \
the decay claims hold.";

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn workers(requested: Option<usize>) -> Result<usize, CliError> {
    match requested {
        Some(0) => Err(usage("--workers must be positive")),
        Some(w) => Ok(w),
        None => Ok(default_workers()),
    }
}

#[derive(Serialize)]
struct Exact {
    exact: String,
    decimal: f64,
}

impl From<&Rational> for Exact {
    fn from(r: &Rational) -> Self {
        Exact {
            exact: r.to_string(),
            decimal: decimal(r),
        }
    }
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn write_json<T: Serialize>(config: &RunConfig, body: T, args: &OutputArgs, out: &mut dyn Write) -> Result<(), CliError> {
    emit(&json_text(&Tagged { config, body }), args, out)
}

pub(crate) fn volume(sides: Option<Vec<String>>, n: Option<usize>, args: &OutputArgs, out: &mut dyn Write) -> Outcome {
    let mut config = RunConfig::new("volume", args);
    let sides: Vec<Rational> = match (sides, n) {
        (Some(list), _) => list
            .iter()
            .map(|s| parse_rational(s).map_err(CliError::Usage))
            .collect::<Result<_, _>>()?,
        (None, Some(n)) => {
            if n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            config.n = Some(n);
            vec![Rational::one(); n]
        }
        (None, None) => return Err(usage("give --sides or --n")),
    };
    config.inputs = sides.iter().map(|s| s.to_string()).collect();
    let vol = simplex_volume(&sides)?;
    match args.format {
        Format::Csv => {
            let joined: Vec<String> = sides.iter().map(|s| s.to_string()).collect();
            let text = config.comment()
                + &csv_text(
                    &["sides", "volume", "decimal"],
                    &[vec![joined.join(";"), vol.to_string(), decimal(&vol).to_string()]],
                );
            emit(&text, args, out)?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Body {
                sides: Vec<String>,
                volume: Exact,
            }
            let body = Body {
                sides: config.inputs.clone(),
                volume: (&vol).into(),
            };
            write_json(&config, body, args, out)?;
        }
    }
    Ok(0)
}

pub(crate) fn closed_forms(n: usize, s: &str, args: &OutputArgs, out: &mut dyn Write) -> Outcome {
    let mut config = RunConfig::new("closed-forms", args);
    config.n = Some(n);
    config.inputs = vec![s.to_string()];
    let s = parse_rational(s).map_err(CliError::Usage)?;
    let rho = closed_forms::rho(n)?;
    let rows: Vec<(&str, Rational)> = vec![
        ("I", closed_forms::i_closed(n, &s)?),
        ("J", closed_forms::j_closed(n, &s)?),
        ("K", closed_forms::k_closed(n, &s)?),
        ("abs_deviation_integral", rho.script_i.clone()),
        ("rho", rho.rho.clone()),
    ];
    match args.format {
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|(k, v)| vec![k.to_string(), n.to_string(), s.to_string(), v.to_string(), decimal(v).to_string()])
                .collect();
            emit(&(config.comment() + &csv_text(&["quantity", "n", "s", "exact", "decimal"], &body)), args, out)?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Body {
                n: usize,
                s: String,
                values: Vec<(String, Exact)>,
            }
            let body = Body {
                n,
                s: s.to_string(),
                values: rows.iter().map(|(k, v)| (k.to_string(), v.into())).collect(),
            };
            write_json(&config, body, args, out)?;
        }
    }
    Ok(0)
}

pub(crate) fn contraction(n_max: usize, args: &OutputArgs, out: &mut dyn Write) -> Outcome {
    let mut config = RunConfig::new("contraction", args);
    config.n = Some(n_max);
    let records = (1..=n_max).map(closed_forms::rho).collect::<Result<Vec<_>, _>>()?;
    let yes_no = |b: bool| if b { "yes" } else { "no" }.to_string();
    match args.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.rho.to_string(),
                        r.decimal.to_string(),
                        yes_no(r.below_one()),
                        yes_no(r.forms_agree()),
                    ]
                })
                .collect();
            let text = config.comment() + &csv_text(&["n", "rho", "decimal", "below_one", "forms_agree"], &rows);
            emit(&text, args, out)?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                n: usize,
                rho: String,
                decimal: f64,
                below_one: bool,
                forms_agree: bool,
            }
            let rows: Vec<Row> = records
                .iter()
                .map(|r| Row {
                    n: r.n,
                    rho: r.rho.to_string(),
                    decimal: r.decimal,
                    below_one: r.below_one(),
                    forms_agree: r.forms_agree(),
                })
                .collect();
            #[derive(Serialize)]
            struct Body {
                table: Vec<Row>,
            }
            write_json(&config, Body { table: rows }, args, out)?;
        }
    }
    Ok(if records.iter().all(|r| r.below_one()) { 0 } else { 1 })
}

fn generator(text: &str) -> Result<CirculantGenerator<Rational>, CliError> {
    Ok(CirculantGenerator::new(rational_list(text)?)?)
}

fn emit_vector(config: &RunConfig, values: &[Rational], args: &OutputArgs, out: &mut dyn Write) -> Result<(), CliError> {
    match args.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = values
                .iter()
                .enumerate()
                .map(|(i, v)| vec![(i + 1).to_string(), v.to_string(), decimal(v).to_string()])
                .collect();
            emit(&(config.comment() + &csv_text(&["index", "exact", "decimal"], &rows)), args, out)
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Body {
                values: Vec<Exact>,
            }
            write_json(
                config,
                Body {
                    values: values.iter().map(Exact::from).collect(),
                },
                args,
                out,
            )
        }
    }
}

pub(crate) fn matrix(op: MatrixOp, out: &mut dyn Write) -> Outcome {
    match op {
        MatrixOp::Multiply { a, b, out: args } => {
            let mut config = RunConfig::new("matrix multiply", &args);
            config.inputs = vec![a.clone(), b.clone()];
            let p = circ_multiply(&generator(&a)?, &generator(&b)?)?;
            emit_vector(&config, p.row(), &args, out)?;
        }
        MatrixOp::Apply { a, x, out: args } => {
            let mut config = RunConfig::new("matrix apply", &args);
            config.inputs = vec![a.clone(), x.clone()];
            let y = circ_apply(&generator(&a)?, &rational_list(&x)?)?;
            emit_vector(&config, &y, &args, out)?;
        }
        MatrixOp::Classify { a, tol, out: args } => {
            let mut config = RunConfig::new("matrix classify", &args);
            config.inputs = vec![a.clone()];
            config.tol = Some(tol);
            if !(tol >= 0.0 && tol.is_finite()) {
                return Err(usage("--tol must be a non-negative number"));
            }
            let tol = Rational::from_float(tol).ok_or_else(|| usage("invalid tolerance"))?;
            let c = classify_stochasticity(&generator(&a)?, tol);
            let class = match c.class {
                Stochasticity::DoublyStochastic => "doubly-stochastic",
                Stochasticity::SubStochastic => "sub-stochastic",
                Stochasticity::Neither => "neither",
            };
            match args.format {
                Format::Csv => {
                    let rows = vec![vec![class.to_string(), c.row_sum.to_string(), decimal(&c.row_sum).to_string()]];
                    emit(&(config.comment() + &csv_text(&["class", "row_sum", "decimal"], &rows)), &args, out)?;
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct Body {
                        class: &'static str,
                        row_sum: Exact,
                    }
                    let body = Body {
                        class,
                        row_sum: (&c.row_sum).into(),
                    };
                    write_json(&config, body, &args, out)?;
                }
            }
        }
        MatrixOp::ProductRow { generators, out: args } => {
            let mut config = RunConfig::new("matrix product-row", &args);
            config.inputs = generators.clone();
            let gens = generators.iter().map(|g| generator(g)).collect::<Result<Vec<_>, _>>()?;
            let row = product_row_formula(&gens)?;
            emit_vector(&config, row.row(), &args, out)?;
        }
    }
    Ok(0)
}

pub(crate) fn korovkin(args: &KorovkinArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    if args.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    if args.m_max < 2 {
        return Err(usage("--m-max must be at least 2"));
    }
    if args.samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let mode: Mode = args.mode.into();
    let mut config = RunConfig::new("korovkin", &args.out);
    config.n = Some(args.n);
    config.m_max = Some(args.m_max);
    config.samples = Some(args.samples);
    config.mode = Some(mode.to_string());
    config.seed = Some(args.seed);
    config.expressions = vec![args.target.clone().unwrap_or_else(|| "g (sum |t_j - 1/n|)".to_string())];
    if mode == Mode::Solid {
        let _ = writeln!(err, "{SOLID_NOTE}");
    }
    let mc = MonteCarlo::new(args.samples, args.seed).with_workers(workers(args.workers)?);
    let series = match &args.target {
        None => decay_experiment(g_distance::<f64>, args.n, args.m_max, mode, mc)?,
        Some(text) => {
            let e = parse(text, args.n)?;
            decay_experiment(|t: &[f64]| e.eval_slice(t).unwrap_or(f64::NAN), args.n, args.m_max, mode, mc)?
        }
    };
    let bound_at = |m: usize| series.bound.map(|b| b.powi(m as i32));
    match args.out.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = series
                .estimates
                .iter()
                .map(|e| {
                    vec![
                        e.m.to_string(),
                        e.mean.to_string(),
                        e.stderr.to_string(),
                        bound_at(e.m).map_or(String::new(), |b| b.to_string()),
                        e.mode.to_string(),
                        e.n.to_string(),
                        e.seed.to_string(),
                    ]
                })
                .collect();
            let mut text = config.comment();
            text += &csv_text(&["m", "mean", "stderr", "bound", "mode", "n", "seed"], &rows);
            text += &format!(
                "# fitted_ratio: {}\n# step_bound: {}\n# rho: {}\n",
                series.fitted_ratio.map_or("none".to_string(), |r| r.to_string()),
                series.bound.map_or("none".to_string(), |b| b.to_string()),
                series.rho
            );
            emit(&text, &args.out, out)?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                m: usize,
                mean: f64,
                stderr: f64,
                bound: Option<f64>,
            }
            #[derive(Serialize)]
            struct Body {
                estimates: Vec<Row>,
                fitted_ratio: Option<f64>,
                step_bound: Option<f64>,
                rho: f64,
            }
            let body = Body {
                estimates: series
                    .estimates
                    .iter()
                    .map(|e| Row {
                        m: e.m,
                        mean: e.mean,
                        stderr: e.stderr,
                        bound: bound_at(e.m),
                    })
                    .collect(),
                fitted_ratio: series.fitted_ratio,
                step_bound: series.bound,
                rho: series.rho,
            };
            write_json(&config, body, &args.out, out)?;
        }
    }
    Ok(0)
}

/// Builtin name or expression in `x`.
pub(crate) fn function_spec(text: &str, arity: usize) -> Result<FunctionSpec, CliError> {
    if arity == 1 {
        if let Ok(b) = text.trim().parse::<Builtin>() {
            return Ok(FunctionSpec::Builtin(b));
        }
    }
    Ok(FunctionSpec::Expr(parse(text, arity)?))
}

fn parse_domain(text: &str) -> Result<Interval<f64>, CliError> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| usage(format!("domain `{text}` must look like a:b")))?;
    let lo = parse_number(a).map_err(CliError::Usage)?;
    let hi = parse_number(b).map_err(CliError::Usage)?;
    if lo > hi {
        return Err(usage(format!("domain `{text}` has a > b")));
    }
    Ok(Interval::new(lo, hi)?)
}

fn verdict_text(v: &Verdict<f64>) -> String {
    match v {
        Verdict::Pass => "pass".to_string(),
        Verdict::Fail { witness, margin } => {
            let w: Vec<String> = witness.iter().map(|x| x.to_string()).collect();
            format!("fail at ({}) with margin {margin}", w.join(", "))
        }
    }
}

fn report_trailer(report: &Report) -> String {
    let mut s = format!(
        "# verdict: {}\n# min_margin: {}\n# excluded: {}\n",
        verdict_text(&report.verdict),
        report.min_margin,
        report.excluded.len()
    );
    if let Some(c) = &report.conclusion {
        s += &format!("# conclusion: {} (min_margin {})\n", verdict_text(&c.verdict), c.min_margin);
    }
    if let Some(f) = &report.finding {
        s += &format!("# finding: {f}\n");
    }
    for w in &report.warnings {
        s += &format!("# warning: {w}\n");
    }
    s += &format!("# note: {}\n", report.note);
    s
}

fn emit_report(config: &RunConfig, report: &CertificateReport<f64>, header: &[&str], args: &OutputArgs, out: &mut dyn Write) -> Outcome {
    match args.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .margins
                .iter()
                .map(|m| {
                    m.point
                        .iter()
                        .chain([m.lhs, m.rhs, m.margin, m.error].iter())
                        .map(|v| v.to_string())
                        .collect()
                })
                .collect();
            let text = config.comment() + &csv_text(header, &rows) + &report_trailer(report);
            emit(&text, args, out)?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                report: &'a CertificateReport<f64>,
                overall_pass: bool,
            }
            let body = Body {
                report,
                overall_pass: report.overall_passed(),
            };
            write_json(config, body, args, out)?;
        }
    }
    Ok(if report.overall_passed() { 0 } else { 1 })
}

pub(crate) fn certify(args: &CertifyArgs, out: &mut dyn Write) -> Outcome {
    if args.grid < 2 {
        return Err(usage("--grid must be at least 2"));
    }
    if args.quad_order == 0 {
        return Err(usage("--quad-order must be positive"));
    }
    if !(args.tol >= 0.0 && args.tol.is_finite()) {
        return Err(usage("--tol must be a non-negative number"));
    }
    if args.property != PropertyArg::Strong && args.modulus.is_some() {
        return Err(usage("--modulus only applies to `certify strong`"));
    }
    let g = function_spec(&args.g, 1)?;
    let interval = parse_domain(&args.domain)?;
    let mut config = RunConfig::new("certify", &args.out);
    config.grid = Some(args.grid);
    config.quad_order = Some(args.quad_order);
    config.tol = Some(args.tol);
    config.domain = Some(args.domain.clone());
    config.expressions = vec![args.g.clone()];
    let opts = CertifyOptions {
        grid_points: args.grid,
        quad_order: args.quad_order,
        tol: args.tol,
        workers: workers(args.workers)?,
    };
    let report = match args.property {
        PropertyArg::Convex => {
            config.subcommand = "certify convex".into();
            certify::certify_convex(&g, interval, &opts)?
        }
        PropertyArg::Quasi => {
            config.subcommand = "certify quasi".into();
            certify::certify_quasiconvex(&g, interval, &opts)?
        }
        PropertyArg::Strong => {
            config.subcommand = "certify strong".into();
            let text = args.modulus.as_deref().ok_or_else(|| usage("`certify strong` needs --modulus"))?;
            config.modulus = Some(text.to_string());
            let c = parse_number(text).map_err(CliError::Usage)?;
            certify::certify_strong_convex(&g, c, interval, &opts)?
        }
    };
    emit_report(&config, &report, &["x1", "x2", "lhs", "rhs", "margin", "error"], &args.out, out)
}

fn read_points(path: &Path, n: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let mut points = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| usage(format!("{}: {e}", path.display())))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let x = record
            .iter()
            .map(parse_number)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| usage(format!("{} record {}: {e}", path.display(), line + 1)))?;
        if x.len() != n {
            return Err(usage(format!(
                "{} record {}: expected {n} coordinates, found {}",
                path.display(),
                line + 1,
                x.len()
            )));
        }
        points.push(x);
    }
    if points.is_empty() {
        return Err(usage(format!("{} contains no points", path.display())));
    }
    Ok(points)
}

pub(crate) fn certify_nd(args: &NdArgs, out: &mut dyn Write) -> Outcome {
    if args.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    if args.quad_order == 0 || args.samples == 0 {
        return Err(usage("--quad-order and --samples must be positive"));
    }
    if !(args.tol >= 0.0 && args.tol.is_finite()) {
        return Err(usage("--tol must be a non-negative number"));
    }
    let f = function_spec(&args.f, args.n)?;
    let points = read_points(&args.points, args.n)?;
    let mode: Mode = args.mode.into();
    let mut config = RunConfig::new("certify-nd", &args.out);
    config.n = Some(args.n);
    config.mode = Some(mode.to_string());
    config.tol = Some(args.tol);
    config.expressions = vec![args.f.clone()];
    config.inputs = points
        .iter()
        .map(|p| p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";"))
        .collect();
    if args.n <= 3 {
        config.quad_order = Some(args.quad_order);
    } else {
        config.samples = Some(args.samples);
        config.seed = Some(args.seed);
    }
    let budget = NdBudget {
        quad_order: args.quad_order,
        samples: args.samples,
        seed: args.seed,
        workers: workers(args.workers)?,
    };
    let report = certify::certify_nd_premise(&f, &points, mode, budget, args.tol)?;
    let names: Vec<String> = (1..=args.n).map(|i| format!("x{i}")).collect();
    let mut header: Vec<&str> = names.iter().map(String::as_str).collect();
    header.extend(["lhs", "rhs", "margin", "error"]);
    emit_report(&config, &report, &header, &args.out, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domains() {
        let i = parse_domain("-2:2").unwrap();
        assert_eq!((i.lo, i.hi), (-2.0, 2.0));
        assert_eq!(parse_domain("1/2:4").unwrap().lo, 0.5);
        assert!(parse_domain("2:1").is_err());
        assert!(parse_domain("2").is_err());
    }

    #[test]
    fn builtin_names_resolve() {
        assert_eq!(function_spec("sqrt-abs", 1).unwrap(), FunctionSpec::Builtin(Builtin::SqrtAbs));
        assert!(matches!(function_spec("x^2", 1).unwrap(), FunctionSpec::Expr(_)));
        assert!(function_spec("y", 1).is_err());
    }

    #[test]
    fn decimals_of_exact_values() {
        let r = Rational::new(59.into(), 108.into());
        assert!((Exact::from(&r).decimal - 59.0 / 108.0).abs() < 1e-16);
        assert_eq!(decimal(&r), 59.0 / 108.0);
    }
}

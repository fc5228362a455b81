//! Acceptance suite. Each criterion returns an [`Outcome`]; `hhcert selftest` and the
//! `acceptance` test target both run them.

use std::io::Write;
use std::time::{Duration, Instant};

use hhcert_core::certify::{
    certify_convex, certify_quasiconvex, certify_strong_convex, hh_lhs_2d, quasi_lhs_2d, triangle_integral,
    Builtin, CertificateReport, CertifyOptions, FunctionSpec, Interval, Verdict,
};
use hhcert_core::circulant::{circ_multiply, product_row_formula, CirculantGenerator};
use hhcert_core::closed_forms::{i_closed, j_closed, k_closed, rho, script_i};
use hhcert_core::expr::{parse, BinOp, Expr, Expression, Func};
use hhcert_core::korovkin::{decay_experiment, face_decay_bound, g_distance};
use hhcert_core::simplex::{integrate_simplex, sample_face, Mode, MonteCarlo, ScaledSimplex, Scheme, SimplexDomain};
use hhcert_core::stats::substream;
use hhcert_core::Rational;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rand::Rng;

use crate::DEFAULT_SEED;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl Outcome {
    pub fn within_limit(&self) -> bool {
        self.limit.is_none_or(|l| self.elapsed <= l)
    }

    pub fn ok(&self) -> bool {
        self.passed && self.within_limit()
    }

    pub fn line(&self) -> String {
        let limit = self.limit.map_or(String::new(), |l| format!(", limit {} s", l.as_secs()));
        format!(
            "[{}] criterion {:>2} {}: {} ({:.2} s{limit})",
            if self.ok() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

pub const CRITERIA: [u32; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

/// Runs one criterion by number.
pub fn criterion(id: u32) -> Outcome {
    let (title, limit, body): (&'static str, Option<u64>, fn() -> Result<String, String>) = match id {
        1 => ("contraction bound", Some(1), contraction_bound),
        2 => ("closed-form identities", Some(1), closed_form_identities),
        3 => ("quadrature consistency", Some(30), quadrature_consistency),
        4 => ("product row formula", Some(30), product_row),
        5 => ("decay, face mode, n = 2", Some(60), decay_two),
        6 => ("decay, face mode, n = 3, 4", Some(120), decay_three_four),
        7 => ("solid-mode exhibit", Some(60), solid_exhibit),
        8 => ("one-variable goldens", Some(30), one_variable_goldens),
        9 => ("theorem direction", Some(10), theorem_direction),
        10 => ("determinism", None, determinism),
        11 => ("parser", None, parser),
        _ => panic!("unknown criterion {id}"),
    };
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Outcome {
        id,
        title,
        passed,
        detail,
        elapsed,
        limit: limit.map(Duration::from_secs),
    }
}

pub(crate) fn run_suite(only: Option<&[u32]>, out: &mut dyn Write) -> i32 {
    let ids: Vec<u32> = match only {
        Some(list) => list.to_vec(),
        None => CRITERIA.to_vec(),
    };
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.contains(id)) {
        let _ = writeln!(out, "unknown criterion {bad}");
        return 2;
    }
    let mut all = true;
    for id in ids {
        let o = criterion(id);
        all &= o.ok();
        let _ = writeln!(out, "{}", o.line());
    }
    if all {
        0
    } else {
        1
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(p: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(d))
}

fn fact(n: usize) -> Rational {
    Rational::from_integer((1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k)))
}

fn f64_of(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn contraction_bound() -> Result<String, String> {
    for n in 1..=12 {
        let r = rho(n).map_err(|e| e.to_string())?;
        ensure(r.below_one(), || format!("rho_{n} = {} is not below one", r.rho))?;
    }
    for (n, want) in [(1, q(1, 2)), (2, q(1, 2)), (3, q(59, 108))] {
        let got = rho(n).map_err(|e| e.to_string())?.rho;
        ensure(got == want, || format!("rho_{n} = {got}, expected {want}"))?;
    }
    // independent quadrature and Monte Carlo values of the deviation integral
    let dev = |n: usize, scheme: Scheme| {
        let inv = 1.0 / n as f64;
        let domain = SimplexDomain::<f64>::solid(n).and_then(|d| d.with_kink(0, inv)).map_err(|e| e.to_string())?;
        integrate_simplex(|c: &[f64]| (c[0] - inv).abs(), &domain, scheme).map_err(|e| e.to_string())
    };
    let i2 = dev(2, Scheme::Deterministic { order: 16 })?;
    ensure((i2.value - 0.125).abs() < 1e-13, || format!("quadrature I_2 = {}", i2.value))?;
    ensure(script_i(2).map_err(|e| e.to_string())? == q(1, 8), || "exact I_2 != 1/8".into())?;
    let i3 = dev(3, Scheme::Deterministic { order: 16 })?;
    ensure((i3.value - 59.0 / 1944.0).abs() < 1e-13, || format!("quadrature I_3 = {}", i3.value))?;
    let mc = dev(3, Scheme::MonteCarlo(MonteCarlo::new(100_000, DEFAULT_SEED)))?;
    ensure((mc.value - 59.0 / 1944.0).abs() <= 4.0 * mc.error, || {
        format!("Monte Carlo I_3 = {} +- {}", mc.value, mc.error)
    })?;
    Ok(format!(
        "rho_n < 1 for n <= 12; rho_1 = rho_2 = 1/2, rho_3 = 59/108; I_2 by quadrature {:.3e}, I_3 by Monte Carlo {:.5} +- {:.1e}",
        i2.value, mc.value, mc.error
    ))
}

fn closed_form_identities() -> Result<String, String> {
    let one = Rational::one();
    for n in 1..=12 {
        let i = i_closed(n, &one).map_err(|e| e.to_string())?;
        let j = j_closed(n, &one).map_err(|e| e.to_string())?;
        let k = k_closed(n, &one).map_err(|e| e.to_string())?;
        ensure(i == one.clone() / fact(n), || format!("I_{n}(1) = {i}"))?;
        ensure(j == one.clone() / fact(n + 1), || format!("J_{n}(1) = {j}"))?;
        ensure(k == one.clone() / fact(n + 1), || format!("K_{n}(1) = {k}"))?;
        let r = rho(n).map_err(|e| e.to_string())?;
        ensure(r.forms_agree(), || format!("rho forms differ at n = {n}"))?;
    }
    Ok("I_n(1) = 1/n!, J_n(1) = K_n(1) = 1/(n+1)!, both rho forms equal, n = 1..12".into())
}

fn quadrature_consistency() -> Result<String, String> {
    let order = 16;
    let mut worst = 0f64;
    for n in 1..=4usize {
        for s in [q(1, 5), q(1, n as i64), q(9, 10)] {
            let sf = f64_of(&s);
            let cut = SimplexDomain::<f64>::solid(n).and_then(|d| d.with_kink(0, sf)).map_err(|e| e.to_string())?;
            let scheme = Scheme::Deterministic { order };
            let quad_i = integrate_simplex(|c: &[f64]| if c[0] <= sf { 1.0 } else { 0.0 }, &cut, scheme);
            let quad_j = integrate_simplex(|c: &[f64]| if c[0] <= sf { c[0] } else { 0.0 }, &cut, scheme);
            let small = ScaledSimplex::new(vec![sf; n]).map_err(|e| e.to_string())?;
            let quad_k = integrate_simplex(|c: &[f64]| c[0], &SimplexDomain::scaled(small, Mode::Solid), scheme);
            let pairs = [
                ("I", quad_i, i_closed(n, &s)),
                ("J", quad_j, j_closed(n, &s)),
                ("K", quad_k, k_closed(n, &s)),
            ];
            for (name, quad, exact) in pairs {
                let quad = quad.map_err(|e| e.to_string())?.value;
                let exact = f64_of(&exact.map_err(|e| e.to_string())?);
                let dev = (quad - exact).abs();
                worst = worst.max(dev);
                ensure(dev <= 1e-9, || format!("{name}_{n}({s}): quadrature {quad} vs closed form {exact}"))?;
            }
        }
    }
    Ok(format!("36 comparisons, max deviation {worst:.2e} (tolerance 1e-9)"))
}

fn product_row() -> Result<String, String> {
    let mut rng = substream(DEFAULT_SEED, 4);
    let mut worst = 0f64;
    for _ in 0..1000 {
        let n = rng.random_range(2..=6usize);
        let m = rng.random_range(2..=5usize);
        let gens = (0..m)
            .map(|_| {
                let p = sample_face::<f64, _>(n, &mut rng).map_err(|e| e.to_string())?;
                CirculantGenerator::new(p.into_coords()).map_err(|e| e.to_string())
            })
            .collect::<Result<Vec<_>, String>>()?;
        let formula = product_row_formula(&gens).map_err(|e| e.to_string())?;
        let mut iterated = gens[0].clone();
        for g in &gens[1..] {
            iterated = circ_multiply(&iterated, g).map_err(|e| e.to_string())?;
        }
        for (a, b) in formula.row().iter().zip(iterated.row()) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("1000 trials, max componentwise deviation {worst:.2e}"))
}

fn decay_two() -> Result<String, String> {
    let s = decay_experiment(g_distance::<f64>, 2, 10, Mode::Face, MonteCarlo::new(100_000, DEFAULT_SEED))
        .map_err(|e| e.to_string())?;
    let mut worst_z = 0f64;
    for e in &s.estimates {
        let want = 0.5f64.powi(e.m as i32);
        let z = (e.mean - want).abs() / e.stderr;
        worst_z = worst_z.max(z);
        ensure(z <= 3.0, || format!("m = {}: mean {} vs {want}, {z:.2} SE", e.m, e.mean))?;
    }
    let ratio = s.fitted_ratio.ok_or("no fitted ratio")?;
    ensure((ratio - 0.5).abs() <= 0.05, || format!("fitted ratio {ratio}"))?;
    Ok(format!("max |mean - 2^-m| = {worst_z:.2} SE over m = 1..10, fitted ratio {ratio:.4}"))
}

fn decay_three_four() -> Result<String, String> {
    let mut parts = Vec::new();
    for n in [3usize, 4] {
        let s = decay_experiment(g_distance::<f64>, n, 10, Mode::Face, MonteCarlo::new(100_000, DEFAULT_SEED))
            .map_err(|e| e.to_string())?;
        let bound = face_decay_bound::<f64>(n);
        let ratio = s.fitted_ratio.ok_or_else(|| format!("no fitted ratio for n = {n}"))?;
        ensure(ratio <= bound + 0.05, || format!("n = {n}: fitted ratio {ratio} above bound {bound}"))?;
        for e in s.estimates.iter().filter(|e| e.m >= 8) {
            ensure(e.mean < 0.05, || format!("n = {n}, m = {}: mean {}", e.m, e.mean))?;
        }
        parts.push(format!("n = {n}: ratio {ratio:.4} <= bound {bound:.4}"));
    }
    Ok(parts.join("; "))
}

fn solid_exhibit() -> Result<String, String> {
    let s = decay_experiment(g_distance::<f64>, 2, 10, Mode::Solid, MonteCarlo::new(100_000, DEFAULT_SEED))
        .map_err(|e| e.to_string())?;
    let est = &s.estimates;
    for w in est[1..].windows(2) {
        let slack = 3.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        ensure(w[1].mean >= w[0].mean - slack, || {
            format!("mean drops from {} (m = {}) to {} (m = {})", w[0].mean, w[0].m, w[1].mean, w[1].m)
        })?;
    }
    let (first, last) = (&est[1], &est[9]);
    ensure(last.mean < 1.0 && last.mean > first.mean, || format!("m = 10 mean {}", last.mean))?;
    Ok(format!("means rise from {:.4} (m = 2) to {:.4} (m = 10), below 1", first.mean, last.mean))
}

fn one_variable_goldens() -> Result<String, String> {
    let sq = FunctionSpec::Builtin(Builtin::Square);
    let mut worst_a = 0f64;
    let axis = [-2.0, -1.0, 0.0, 1.0, 2.0];
    for &x1 in &axis {
        for &x2 in &axis {
            let v = hh_lhs_2d::<f64>(&sq, x1, x2, 32).map_err(|e| e.to_string())?.value;
            worst_a = worst_a.max((v - (x1 * x1 + x2 * x2 + x1 * x2) / 12.0).abs());
        }
    }
    ensure(worst_a <= 1e-10, || format!("(a) deviation {worst_a:e}"))?;

    let log = FunctionSpec::Builtin(Builtin::Logarithm);
    let mut worst_b = 0f64;
    for x in [0.5, 1.0, 2.0, 3.0, 4.0] {
        let v = quasi_lhs_2d::<f64>(&log, x, x, 32).map_err(|e| e.to_string())?.value;
        worst_b = worst_b.max((v - (-0.125 + 0.25 * f64::ln(x))).abs());
    }
    ensure(worst_b <= 1e-8, || format!("(b) deviation {worst_b:e}"))?;

    let mut worst_c = 0f64;
    for x in [-4.0f64, -1.0, 0.25, 2.0, 4.0] {
        let root = x.abs().sqrt();
        let v = triangle_integral(|s: f64, t: f64| Ok((s + t).sqrt() * root), 32, &[])
            .map_err(|e| e.to_string())?
            .value
            / 2.0;
        worst_c = worst_c.max((v - root / 5.0).abs());
    }
    ensure(worst_c <= 1e-8, || format!("(c) deviation {worst_c:e}"))?;

    let (a, b) = (1.0, 2.0);
    let r = certify_strong_convex(
        &FunctionSpec::Builtin(Builtin::Reciprocal),
        1.0 / (b * b * b),
        Interval::new(a, b).map_err(|e| e.to_string())?,
        &CertifyOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure(r.overall_passed(), || format!("(d) 1/x with modulus 1/8: {:?}", r.verdict))?;
    Ok(format!(
        "(a) {worst_a:.1e} (b) {worst_b:.1e} (c) {worst_c:.1e}; (d) 1/x strongly convex, modulus 1/8, min margin {:.3e}",
        r.min_margin
    ))
}

fn theorem_direction() -> Result<String, String> {
    let opts = CertifyOptions::default();
    let iv = |a: f64, b: f64| Interval::new(a, b).expect("valid interval");
    let expr = |t: &str| FunctionSpec::Expr(parse(t, 1).expect("valid expression"));
    let builtin = FunctionSpec::Builtin;
    let err = |e: hhcert_core::Error| e.to_string();

    let mut runs: Vec<(String, CertificateReport<f64>)> = Vec::new();
    for (g, a, b) in [
        (builtin(Builtin::Square), -2.0, 2.0),
        (builtin(Builtin::Exponential), -1.0, 2.0),
        (builtin(Builtin::Reciprocal), 1.0, 2.0),
        (expr("abs(x)"), -1.0, 1.0),
        (expr("x^4 - x"), -1.0, 1.0),
    ] {
        runs.push((format!("convex {g}"), certify_convex(&g, iv(a, b), &opts).map_err(err)?));
    }
    for (g, a, b) in [
        (builtin(Builtin::SqrtAbs), -4.0, 4.0),
        (builtin(Builtin::Logarithm), 1.0, 4.0),
        (builtin(Builtin::Logarithm), 0.5, 4.0),
        (expr("abs(x - 0.5)"), -1.0, 1.0),
        (expr("x^3"), 0.0, 2.0),
    ] {
        runs.push((format!("quasi {g}"), certify_quasiconvex(&g, iv(a, b), &opts).map_err(err)?));
    }
    for (g, c, a, b) in [
        (builtin(Builtin::Reciprocal), 0.125, 1.0, 2.0),
        (builtin(Builtin::Square), 1.0, -1.0, 1.0),
        (builtin(Builtin::Exponential), 0.5, 0.0, 1.0),
        (builtin(Builtin::Square), 0.0, -2.0, 2.0),
    ] {
        runs.push((format!("strong {g} c = {c}"), certify_strong_convex(&g, c, iv(a, b), &opts).map_err(err)?));
    }
    let mut premise_passes = 0;
    for (name, r) in &runs {
        if r.passed() {
            premise_passes += 1;
            let c = r.conclusion.as_ref().ok_or_else(|| format!("{name}: premise passed without a conclusion check"))?;
            ensure(c.passed(), || format!("{name}: premise passed, conclusion {:?}", c.verdict))?;
        }
    }

    let neg_convex = certify_convex(&expr("-x^2"), iv(-2.0, 2.0), &opts).map_err(err)?;
    let neg_quasi = certify_quasiconvex(&expr("-abs(x)"), iv(-1.0, 1.0), &opts).map_err(err)?;
    let mut witnesses = Vec::new();
    for (name, r) in [("-x^2 convex", &neg_convex), ("-|x| quasi", &neg_quasi)] {
        match &r.verdict {
            Verdict::Fail { witness, margin } if witness.len() == 2 => {
                witnesses.push(format!("{name} fails at ({}, {}) margin {margin:.3}", witness[0], witness[1]))
            }
            other => return Err(format!("{name}: expected a failing witness, got {other:?}")),
        }
    }

    // the weaker c/48 premise admits x^2 with c = 2.5; the report must flag it
    let over = certify_strong_convex(&builtin(Builtin::Square), 2.5, iv(-1.0, 1.0), &opts).map_err(err)?;
    ensure(over.passed() && over.finding.is_some() && !over.overall_passed(), || {
        "x^2 with c = 2.5 is not reported as a finding".into()
    })?;

    Ok(format!(
        "{premise_passes}/{} premise passes all carry passing conclusions; {}; x^2 with c = 2.5 flagged as finding",
        runs.len(),
        witnesses.join("; ")
    ))
}

fn capture(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hhcert").chain(args.iter().copied());
    let code = crate::run(argv, &mut out, &mut err);
    (code, out)
}

fn determinism() -> Result<String, String> {
    let korovkin = ["korovkin", "--n", "3", "--m-max", "5", "--samples", "20000", "--seed", "7"];
    let certify = ["certify", "quasi", "--g", "sqrt-abs", "--domain", "-4:4", "--grid", "17"];
    let strong = ["certify", "strong", "--g", "1/x", "--domain", "1:2", "--modulus", "1/8", "--grid", "9", "--format", "json"];
    let mut checked = 0;
    for base in [&korovkin[..], &certify[..], &strong[..]] {
        let mut outputs = Vec::new();
        for workers in ["1", "3", "1"] {
            let mut args = base.to_vec();
            args.extend(["--workers", workers]);
            let (code, out) = capture(&args);
            ensure(code == 0, || format!("`{}` exited with {code}", args.join(" ")))?;
            outputs.push(out);
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || {
            format!("`{}` output differs across repeats or worker counts", base.join(" "))
        })?;
        checked += 1;
    }
    Ok(format!("{checked} invocations byte-identical across repeats and 1 vs 3 workers"))
}

/// Input, arity, variable values, expected value.
const PARSER_GOLDENS: [(&str, usize, &[f64], f64); 20] = [
    ("1+2*3", 1, &[0.0], 7.0),
    ("(1+2)*3", 1, &[0.0], 9.0),
    ("2^3^2", 1, &[0.0], 512.0),
    ("-2^2", 1, &[0.0], -4.0),
    ("2^-1", 1, &[0.0], 0.5),
    ("8/4/2", 1, &[0.0], 1.0),
    ("10-4-3", 1, &[0.0], 3.0),
    ("-x^2", 1, &[3.0], -9.0),
    ("--x", 1, &[2.0], 2.0),
    ("2*-x", 1, &[3.0], -6.0),
    ("x1*x2+x3", 3, &[2.0, 3.0, 4.0], 10.0),
    ("max(x1, x2, x3)", 3, &[5.0, 1.0, 3.0], 5.0),
    ("min(x, 1-x)", 1, &[0.25], 0.25),
    ("pow(2, 10)", 1, &[0.0], 1024.0),
    ("abs(x-3)", 1, &[1.0], 2.0),
    ("sqrt(16)+exp(0)+log(1)", 1, &[0.0], 5.0),
    ("2 × 3 − 4 ÷ 2", 1, &[0.0], 4.0),
    ("(x)^(2)", 1, &[-3.0], 9.0),
    ("-(x+1)^2", 1, &[1.0], -4.0),
    ("1/2/x", 1, &[4.0], 0.125),
];

fn random_expr<R: Rng>(rng: &mut R, depth: usize, arity: usize) -> Expr {
    if depth == 0 || rng.random_bool(0.25) {
        return if rng.random_bool(0.5) {
            Expr::Var(rng.random_range(1..=arity))
        } else {
            let v: f64 = match rng.random_range(0..3) {
                0 => rng.random_range(0..20) as f64,
                1 => rng.random_range(0..1000) as f64 / 8.0,
                _ => rng.random::<f64>() * 100.0,
            };
            Expr::Num(v)
        };
    }
    let sub = |rng: &mut R| Box::new(random_expr(rng, depth - 1, arity));
    match rng.random_range(0..4) {
        0 => Expr::Neg(sub(rng)),
        1 | 2 => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow][rng.random_range(0..5)];
            Expr::Bin(op, sub(rng), sub(rng))
        }
        _ => {
            let f = [Func::Abs, Func::Sqrt, Func::Exp, Func::Log, Func::Min, Func::Max, Func::Pow][rng.random_range(0..7)];
            let argc = match f {
                Func::Min | Func::Max => rng.random_range(2..=3),
                Func::Pow => 2,
                _ => 1,
            };
            Expr::Call(f, (0..argc).map(|_| random_expr(rng, depth - 1, arity)).collect())
        }
    }
}

fn parser() -> Result<String, String> {
    for (text, arity, x, want) in PARSER_GOLDENS {
        let e = parse(text, arity).map_err(|e| format!("`{text}`: {e}"))?;
        let got = e.eval_slice(x).map_err(|e| format!("`{text}`: {e}"))?;
        ensure((got - want).abs() <= 1e-12 * want.abs().max(1.0), || format!("`{text}` = {got}, expected {want}"))?;
        let again = parse(&e.print(), arity).map_err(|err| format!("`{}`: {err}", e.print()))?;
        ensure(again == e, || format!("`{text}` does not survive printing as `{}`", e.print()))?;
    }
    let mut rng = substream(DEFAULT_SEED, 11);
    for i in 0..1000 {
        let arity = rng.random_range(1..=3);
        let depth = rng.random_range(0..=8);
        let e = Expression::new(random_expr(&mut rng, depth, arity), arity).map_err(|e| e.to_string())?;
        let text = e.print();
        let back = parse(&text, arity).map_err(|err| format!("tree {i}: `{text}`: {err}"))?;
        ensure(back == e, || format!("tree {i} changed after printing as `{text}`"))?;
    }
    Ok("20 precedence goldens and 1000 random trees round-trip".into())
}

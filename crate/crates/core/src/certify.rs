//! Grid certification of convexity-type properties through simplex-averaged
//! Hermite-Hadamard inequalities.
//!
//! For a one-variable `g` the averaged premise over the triangle
//! `{(s, t) : s, t >= 0, s + t <= 1}` reads
//!
//! * convex: `int int g(s x1 + t x2) ds dt <= g(x1) + g(x2)`,
//! * quasi-convex: `1/2 int int max{g(s x1 + t x2), g(t x1 + s x2)} ds dt <= max{g(x1), g(x2)}`,
//! * strongly convex with modulus `c`:
//!   `int int g(s x1 + t x2) ds dt <= g(x1) + g(x2) + c/48 (x1 x2 - 11 x1^2 - 11 x2^2)`,
//!
//! and its consequence is the matching midpoint (Jensen) inequality. The premise is
//! checked on every ordered pair of a uniform grid. A `Pass` only means that no
//! violation was found at the tested resolution and tolerance.
//!
//! Triangle integrals are computed in the coordinates `s = u w`, `t = u (1 - w)` with
//! `u = v^3`, which removes integrable singularities of `g` at the origin (as for `1/x`
//! or `log x`) and turns every kink of the form `s x1 + t x2 = 0` or `s = t` into a
//! line `w = const` where the `w` panels are split.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::circulant::{circ_apply, CirculantGenerator};
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::parallel;
use crate::quadrature::GaussLegendre;
use crate::scalar::{to_f64_vec, Real};
use crate::simplex::{integrate_simplex, Integral, Mode, MonteCarlo, Scheme, SimplexDomain};
use crate::stats::substream;

pub const SCOPE_NOTE: &str = "Pass means no violation was found at this grid resolution and tolerance; it is evidence, not a proof.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    Square,
    Reciprocal,
    Exponential,
    Logarithm,
    SqrtAbs,
}

impl Builtin {
    fn apply<T: Real>(self, x: T) -> T {
        match self {
            Builtin::Square => x * x,
            Builtin::Reciprocal => x.recip(),
            Builtin::Exponential => x.exp(),
            Builtin::Logarithm => x.ln(),
            Builtin::SqrtAbs => x.abs().sqrt(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Builtin::Square => "square",
            Builtin::Reciprocal => "reciprocal",
            Builtin::Exponential => "exponential",
            Builtin::Logarithm => "logarithm",
            Builtin::SqrtAbs => "sqrt-abs",
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "square" => Builtin::Square,
            "reciprocal" => Builtin::Reciprocal,
            "exponential" => Builtin::Exponential,
            "logarithm" => Builtin::Logarithm,
            "sqrt-abs" => Builtin::SqrtAbs,
            other => return Err(Error::UnknownIdentifier(other.to_string())),
        })
    }
}

/// A test function: one of the builtins (arity 1) or a parsed expression.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Builtin(Builtin),
    Expr(Expression),
}

impl FunctionSpec {
    pub fn arity(&self) -> usize {
        match self {
            FunctionSpec::Builtin(_) => 1,
            FunctionSpec::Expr(e) => e.arity(),
        }
    }

    pub fn eval<T: Real>(&self, x: &[T]) -> Result<T> {
        match self {
            FunctionSpec::Builtin(b) => {
                if x.len() != 1 {
                    return Err(Error::domain(format!("{} takes one argument", b.name())));
                }
                let v = b.apply(x[0]);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::evaluation(to_f64_vec(x), format!("{} evaluated to {v}", b.name())))
                }
            }
            FunctionSpec::Expr(e) => e.eval_slice(x),
        }
    }

    pub fn eval1<T: Real>(&self, x: T) -> Result<T> {
        self.eval(&[x])
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Builtin(b) => f.write_str(b.name()),
            FunctionSpec::Expr(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MidpointForm<T> {
    /// `2 g((x1+x2)/2) <= g(x1) + g(x2)`.
    SplitSum,
    /// `g((x1+x2)/2) <= max{g(x1), g(x2)}`.
    Quasi,
    /// `g((x1+x2)/2) <= (g(x1)+g(x2))/2 - (c/4)|x1-x2|^2`.
    Strong { modulus: T },
    /// `f(mean, ..., mean) <= f(x)`.
    Barycenter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Property<T> {
    Convex,
    QuasiConvex,
    StrongConvex { modulus: T },
    NDPremise { mode: Mode },
    JensenConclusion { form: MidpointForm<T> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Domain<T> {
    Interval { lo: T, hi: T },
    Points(Vec<Vec<T>>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Margin<T> {
    /// `(x1, x2)` for one-variable checks, the point `x` otherwise.
    pub point: Vec<T>,
    pub lhs: T,
    pub rhs: T,
    /// `rhs - lhs`.
    pub margin: T,
    /// Quadrature (or Monte Carlo) error estimate carried by `lhs`.
    pub error: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Verdict<T> {
    Pass,
    Fail { witness: Vec<T>, margin: T },
}

impl<T> Verdict<T> {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport<T> {
    pub property: Property<T>,
    pub function: String,
    pub domain: Domain<T>,
    pub grid: String,
    pub tolerance: T,
    /// Ordered by grid index.
    pub margins: Vec<Margin<T>>,
    pub min_margin: T,
    pub verdict: Verdict<T>,
    /// Grid points skipped because the function is non-finite on their segment.
    pub excluded: Vec<Vec<T>>,
    /// Midpoint/Jensen check, run when the premise passes.
    pub conclusion: Option<Box<CertificateReport<T>>>,
    /// Set when the premise passes but the conclusion fails.
    pub finding: Option<String>,
    pub warnings: Vec<String>,
    pub note: String,
}

impl<T: Real> CertificateReport<T> {
    fn assemble(
        property: Property<T>,
        function: String,
        domain: Domain<T>,
        grid: String,
        tolerance: T,
        margins: Vec<Margin<T>>,
        excluded: Vec<Vec<T>>,
    ) -> Self {
        let worst = margins
            .iter()
            .enumerate()
            .fold(None::<(usize, T)>, |acc, (i, m)| match acc {
                Some((_, best)) if !(m.margin < best) => acc,
                _ => Some((i, m.margin)),
            });
        let min_margin = worst.map_or(T::infinity(), |w| w.1);
        let verdict = match worst {
            Some((i, m)) if m < -tolerance => Verdict::Fail {
                witness: margins[i].point.clone(),
                margin: m,
            },
            _ => Verdict::Pass,
        };
        let mut warnings = Vec::new();
        if margins.is_empty() {
            warnings.push("no grid point could be evaluated".to_string());
        }
        CertificateReport {
            property,
            function,
            domain,
            grid,
            tolerance,
            margins,
            min_margin,
            verdict,
            excluded,
            conclusion: None,
            finding: None,
            warnings,
            note: SCOPE_NOTE.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    /// Premise and (when present) conclusion both pass.
    pub fn overall_passed(&self) -> bool {
        self.passed() && self.conclusion.as_ref().is_none_or(|c| c.passed())
    }

    fn attach_conclusion(&mut self, conclusion: CertificateReport<T>) {
        if self.passed() && !conclusion.passed() {
            self.finding = Some(format!(
                "premise passed but the midpoint conclusion failed ({:?})",
                conclusion.verdict
            ));
        }
        self.conclusion = Some(Box::new(conclusion));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    /// `points` equally spaced values, endpoints included.
    pub fn grid(&self, points: usize) -> Vec<T> {
        match points {
            0 => Vec::new(),
            1 => vec![self.lo],
            k => {
                let step = (self.hi - self.lo) / T::from_usize_lossy(k - 1);
                (0..k)
                    .map(|i| if i == k - 1 { self.hi } else { self.lo + step * T::from_usize_lossy(i) })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions<T> {
    pub grid_points: usize,
    pub quad_order: usize,
    pub tol: T,
    pub workers: usize,
}

impl<T: Real> Default for CertifyOptions<T> {
    fn default() -> Self {
        CertifyOptions {
            grid_points: 33,
            quad_order: 32,
            tol: T::lit(1e-9),
            workers: parallel::default_workers(),
        }
    }
}

/// `int_0^1 int_0^{1-t} f(s, t) ds dt` with `w` panels split at `w_breaks`.
///
/// The error estimate is the difference to the half-order rule.
pub fn triangle_integral<T, F>(f: F, order: usize, w_breaks: &[T]) -> Result<Integral<T>>
where
    T: Real,
    F: Fn(T, T) -> Result<T>,
{
    if order == 0 {
        return Err(Error::domain("quadrature order must be positive"));
    }
    let fine = triangle_rule(&f, order, w_breaks)?;
    let error = if order > 1 {
        (fine - triangle_rule(&f, order / 2, w_breaks)?).abs()
    } else {
        fine.abs()
    };
    Ok(Integral {
        value: fine,
        error: error.max(fine.abs() * T::epsilon() * T::lit(16.0)),
    })
}

fn triangle_rule<T, F>(f: &F, order: usize, w_breaks: &[T]) -> Result<T>
where
    T: Real,
    F: Fn(T, T) -> Result<T>,
{
    let rule = GaussLegendre::<T>::new(order);
    let three = T::lit(3.0);
    let mut total = T::zero();
    for (v, wv) in rule.mapped(T::zero(), T::one()) {
        let u = v * v * v;
        // d(area) = u du dw and du = 3 v^2 dv
        let jac = three * v * v * u;
        let mut row = T::zero();
        for panel in crate::quadrature::panel_edges(T::zero(), T::one(), w_breaks).windows(2) {
            for (w, ww) in rule.mapped(panel[0], panel[1]) {
                row = row + ww * f(u * w, u * (T::one() - w))?;
            }
        }
        total = total + wv * jac * row;
    }
    Ok(total)
}

// w at which w x1 + (1 - w) x2 = 0, if inside (0, 1)
fn sign_change<T: Real>(x1: T, x2: T) -> Option<T> {
    if x1 == x2 {
        return None;
    }
    let w = x2 / (x2 - x1);
    (w > T::zero() && w < T::one()).then_some(w)
}

fn tag_pair<T: Real>(err: Error, x1: T, x2: T) -> Error {
    match err {
        Error::Evaluation { point, message } => Error::Evaluation {
            point,
            message: format!("{message} (pair x1 = {x1}, x2 = {x2})"),
        },
        other => other,
    }
}

/// `int_0^1 int_0^{1-t} g(s x1 + t x2) ds dt`.
pub fn hh_lhs_2d<T: Real>(g: &FunctionSpec, x1: T, x2: T, quad_order: usize) -> Result<Integral<T>> {
    let breaks: Vec<T> = sign_change(x1, x2).into_iter().collect();
    triangle_integral(|s, t| g.eval1(s * x1 + t * x2), quad_order, &breaks).map_err(|e| tag_pair(e, x1, x2))
}

/// `1/2 int int max{g(s x1 + t x2), g(t x1 + s x2)} ds dt`.
pub fn quasi_lhs_2d<T: Real>(g: &FunctionSpec, x1: T, x2: T, quad_order: usize) -> Result<Integral<T>> {
    let half = T::lit(0.5);
    let mut breaks = vec![half];
    if let Some(w) = sign_change(x1, x2) {
        breaks.push(w);
        breaks.push(T::one() - w);
    }
    let v = triangle_integral(
        |s, t| Ok(g.eval1(s * x1 + t * x2)?.max(g.eval1(t * x1 + s * x2)?)),
        quad_order,
        &breaks,
    )
    .map_err(|e| tag_pair(e, x1, x2))?;
    Ok(Integral {
        value: v.value * half,
        error: v.error * half,
    })
}

/// `(c/48)(x1 x2 - 11 x1^2 - 11 x2^2)`, the modulus term of the strong-convexity premise.
pub fn strong_modulus_term<T: Real>(modulus: T, x1: T, x2: T) -> T {
    let eleven = T::lit(11.0);
    modulus / T::lit(48.0) * (x1 * x2 - eleven * x1 * x1 - eleven * x2 * x2)
}

// Skips pairs whose segment [x1, x2] meets a point where g is not finite. Singularities
// at the origin corner of the triangle are integrable and handled by the quadrature.
fn screen_pair<T: Real>(g: &FunctionSpec, x1: T, x2: T) -> bool {
    let mid = (x1 + x2) / T::lit(2.0);
    let mut probes = vec![x1, x2, mid];
    if x1.min(x2) <= T::zero() && x1.max(x2) >= T::zero() {
        probes.push(T::zero());
    }
    probes.iter().all(|&x| g.eval1(x).is_ok())
}

#[derive(Clone, Copy)]
enum OneVar<T> {
    Convex,
    Quasi,
    Strong(T),
}

impl<T: Real> OneVar<T> {
    fn property(self) -> Property<T> {
        match self {
            OneVar::Convex => Property::Convex,
            OneVar::Quasi => Property::QuasiConvex,
            OneVar::Strong(c) => Property::StrongConvex { modulus: c },
        }
    }

    fn midpoint_form(self) -> MidpointForm<T> {
        match self {
            OneVar::Convex => MidpointForm::SplitSum,
            OneVar::Quasi => MidpointForm::Quasi,
            OneVar::Strong(c) => MidpointForm::Strong { modulus: c },
        }
    }

    fn margin(self, g: &FunctionSpec, x1: T, x2: T, order: usize) -> Result<Margin<T>> {
        let (g1, g2) = (g.eval1(x1)?, g.eval1(x2)?);
        let (lhs, rhs) = match self {
            OneVar::Convex => (hh_lhs_2d(g, x1, x2, order)?, g1 + g2),
            OneVar::Quasi => (quasi_lhs_2d(g, x1, x2, order)?, g1.max(g2)),
            OneVar::Strong(c) => (hh_lhs_2d(g, x1, x2, order)?, g1 + g2 + strong_modulus_term(c, x1, x2)),
        };
        Ok(Margin {
            point: vec![x1, x2],
            lhs: lhs.value,
            rhs,
            margin: rhs - lhs.value,
            error: lhs.error,
        })
    }
}

fn grid_pairs<T: Real>(g: &FunctionSpec, grid: &[T]) -> (Vec<(T, T)>, Vec<Vec<T>>) {
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for &x1 in grid {
        for &x2 in grid {
            if screen_pair(g, x1, x2) {
                kept.push((x1, x2));
            } else {
                excluded.push(vec![x1, x2]);
            }
        }
    }
    (kept, excluded)
}

fn grid_label<T: Real>(interval: &Interval<T>, opts: &CertifyOptions<T>, with_quadrature: bool) -> String {
    let mut s = format!(
        "{}-point uniform grid on [{}, {}], all ordered pairs",
        opts.grid_points, interval.lo, interval.hi
    );
    if with_quadrature {
        s.push_str(&format!("; Gauss-Legendre order {} per triangle axis", opts.quad_order));
    }
    s
}

fn certify_one_var<T: Real>(g: &FunctionSpec, kind: OneVar<T>, interval: Interval<T>, opts: &CertifyOptions<T>) -> Result<CertificateReport<T>> {
    if g.arity() != 1 {
        return Err(Error::domain("one-variable certification needs an arity-1 function"));
    }
    let grid = interval.grid(opts.grid_points);
    let (pairs, excluded) = grid_pairs(g, &grid);
    let margins = parallel::map_indexed(pairs.len(), opts.workers, |i| {
        let (x1, x2) = pairs[i];
        kind.margin(g, x1, x2, opts.quad_order)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut report = CertificateReport::assemble(
        kind.property(),
        g.to_string(),
        Domain::Interval {
            lo: interval.lo,
            hi: interval.hi,
        },
        grid_label(&interval, opts, true),
        opts.tol,
        margins,
        excluded,
    );
    if report.passed() {
        let conclusion = jensen_midpoint_check(g, kind.midpoint_form(), interval, opts)?;
        report.attach_conclusion(conclusion);
    }
    Ok(report)
}

pub fn certify_convex<T: Real>(g: &FunctionSpec, interval: Interval<T>, opts: &CertifyOptions<T>) -> Result<CertificateReport<T>> {
    certify_one_var(g, OneVar::Convex, interval, opts)
}

pub fn certify_quasiconvex<T: Real>(g: &FunctionSpec, interval: Interval<T>, opts: &CertifyOptions<T>) -> Result<CertificateReport<T>> {
    certify_one_var(g, OneVar::Quasi, interval, opts)
}

pub fn certify_strong_convex<T: Real>(
    g: &FunctionSpec,
    modulus: T,
    interval: Interval<T>,
    opts: &CertifyOptions<T>,
) -> Result<CertificateReport<T>> {
    if !(modulus >= T::zero()) {
        return Err(Error::domain(format!("modulus {modulus} must be non-negative")));
    }
    certify_one_var(g, OneVar::Strong(modulus), interval, opts)
}

/// Midpoint inequality of the requested form on every ordered grid pair.
pub fn jensen_midpoint_check<T: Real>(
    g: &FunctionSpec,
    form: MidpointForm<T>,
    interval: Interval<T>,
    opts: &CertifyOptions<T>,
) -> Result<CertificateReport<T>> {
    if matches!(form, MidpointForm::Barycenter) {
        return Err(Error::domain("use jensen_barycenter_check for the n-dimensional form"));
    }
    let grid = interval.grid(opts.grid_points);
    let (pairs, excluded) = grid_pairs(g, &grid);
    let two = T::lit(2.0);
    let margins = pairs
        .iter()
        .map(|&(x1, x2)| {
            let (g1, g2, gm) = (g.eval1(x1)?, g.eval1(x2)?, g.eval1((x1 + x2) / two)?);
            let (lhs, rhs) = match form {
                MidpointForm::SplitSum => (two * gm, g1 + g2),
                MidpointForm::Quasi => (gm, g1.max(g2)),
                MidpointForm::Strong { modulus } => {
                    let d = x1 - x2;
                    (gm, (g1 + g2) / two - modulus / T::lit(4.0) * d * d)
                }
                MidpointForm::Barycenter => unreachable!(),
            };
            Ok(Margin {
                point: vec![x1, x2],
                lhs,
                rhs,
                margin: rhs - lhs,
                error: T::zero(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CertificateReport::assemble(
        Property::JensenConclusion { form },
        g.to_string(),
        Domain::Interval {
            lo: interval.lo,
            hi: interval.hi,
        },
        grid_label(&interval, opts, false),
        opts.tol,
        margins,
        excluded,
    ))
}

/// `f(mean, ..., mean) <= f(x)` at every point.
pub fn jensen_barycenter_check<T: Real>(f: &FunctionSpec, points: &[Vec<T>], tol: T) -> Result<CertificateReport<T>> {
    let margins = points
        .iter()
        .map(|x| {
            check_point_arity(f, x)?;
            let mean = x.iter().copied().sum::<T>() / T::from_usize_lossy(x.len());
            let lhs = f.eval(&vec![mean; x.len()])?;
            let rhs = f.eval(x)?;
            Ok(Margin {
                point: x.clone(),
                lhs,
                rhs,
                margin: rhs - lhs,
                error: T::zero(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CertificateReport::assemble(
        Property::JensenConclusion {
            form: MidpointForm::Barycenter,
        },
        f.to_string(),
        Domain::Points(points.to_vec()),
        format!("{} user points", points.len()),
        tol,
        margins,
        Vec::new(),
    ))
}

fn check_point_arity<T: Real>(f: &FunctionSpec, x: &[T]) -> Result<()> {
    if x.len() != f.arity() {
        return Err(Error::domain(format!(
            "point has {} coordinates, function has arity {}",
            x.len(),
            f.arity()
        )));
    }
    Ok(())
}

/// Budget of the n-dimensional premise: Gauss-Legendre for `n <= 3`, Monte Carlo above.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NdBudget {
    pub quad_order: usize,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Default for NdBudget {
    fn default() -> Self {
        NdBudget {
            quad_order: 32,
            samples: 100_000,
            seed: 42,
            workers: parallel::default_workers(),
        }
    }
}

/// Checks `(1/vol) int_{S_n} f(circ(c) x) dc <= f(x)` at each point.
///
/// Symmetry of `f` is the caller's claim; it is spot-checked with seeded random
/// permutations and violations are reported as warnings.
pub fn certify_nd_premise<T: Real>(
    f: &FunctionSpec,
    points: &[Vec<T>],
    mode: Mode,
    budget: NdBudget,
    tol: T,
) -> Result<CertificateReport<T>> {
    let n = f.arity();
    let domain = SimplexDomain::<T>::new(n, mode)?;
    let scheme = if n <= 3 {
        Scheme::Deterministic {
            order: budget.quad_order,
        }
    } else {
        Scheme::MonteCarlo(MonteCarlo::new(budget.samples, budget.seed).with_workers(budget.workers))
    };
    let vol = domain.volume();
    let mut margins = Vec::with_capacity(points.len());
    for x in points {
        check_point_arity(f, x)?;
        let rhs = f.eval(x)?;
        let integrand = |c: &[T]| {
            let gen = CirculantGenerator::new(c.to_vec()).expect("non-empty generator");
            let y = circ_apply(&gen, x).expect("matching lengths");
            f.eval(&y).unwrap_or(T::nan())
        };
        let integral = integrate_simplex(integrand, &domain, scheme).map_err(|e| match e {
            Error::Evaluation { point, .. } => Error::evaluation(
                to_f64_vec(x),
                format!("f is not finite at circ(c) x for c = {point:?}"),
            ),
            other => other,
        })?;
        let lhs = integral.value / vol;
        margins.push(Margin {
            point: x.clone(),
            lhs,
            rhs,
            margin: rhs - lhs,
            error: integral.error / vol,
        });
    }
    let grid = match scheme {
        Scheme::Deterministic { order } => format!("{} user points; {mode} simplex, Gauss-Legendre order {order}", points.len()),
        Scheme::MonteCarlo(mc) => format!(
            "{} user points; {mode} simplex, Monte Carlo with {} samples, seed {}",
            points.len(),
            mc.samples,
            mc.seed
        ),
    };
    let mut report = CertificateReport::assemble(
        Property::NDPremise { mode },
        f.to_string(),
        Domain::Points(points.to_vec()),
        grid,
        tol,
        margins,
        Vec::new(),
    );
    report.warnings.extend(symmetry_warnings(f, points, budget.seed)?);
    if report.passed() {
        let conclusion = jensen_barycenter_check(f, points, tol)?;
        report.attach_conclusion(conclusion);
    }
    Ok(report)
}

fn symmetry_warnings<T: Real>(f: &FunctionSpec, points: &[Vec<T>], seed: u64) -> Result<Vec<String>> {
    const TRIALS: usize = 4;
    let mut rng = substream(seed, u64::MAX);
    let mut warnings = Vec::new();
    for x in points {
        let fx = f.eval(x)?;
        let scale = T::one().max(fx.abs());
        let mut perms: Vec<Vec<T>> = (0..TRIALS)
            .map(|_| {
                let mut p = x.clone();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        perms.push(x.iter().rev().copied().collect());
        for p in perms {
            let fp = f.eval(&p)?;
            if (fp - fx).abs() > T::lit(1e-9) * scale {
                warnings.push(format!(
                    "symmetry spot check failed: f({}) = {fx} but f({}) = {fp}",
                    fmt_point(x),
                    fmt_point(&p)
                ));
                break;
            }
        }
    }
    Ok(warnings)
}

fn fmt_point<T: Real>(x: &[T]) -> String {
    let parts: Vec<String> = x.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

//! The standard simplex: volumes, uniform sampling and integration.
//!
//! Two measures are supported. [`Mode::Solid`] is Lebesgue measure on
//! `{c >= 0 : sum c <= 1}`; [`Mode::Face`] is the flat measure on the probability face
//! `{c >= 0 : sum c = 1}`, parameterized by its first `n - 1` coordinates. Integrals are
//! always reported unnormalized; divide by [`SimplexDomain::volume`] for an average.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel;
use crate::quadrature::GaussLegendre;
use crate::scalar::{to_f64_vec, Real};
use crate::stats::{chunk_sizes, substream, Moments};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Solid,
    Face,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Solid => "solid",
            Mode::Face => "face",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "solid" => Ok(Mode::Solid),
            "face" => Ok(Mode::Face),
            other => Err(Error::domain(format!("unknown simplex mode `{other}`"))),
        }
    }
}

/// A point of the standard simplex under one of the two readings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexPoint<T> {
    coords: Vec<T>,
    mode: Mode,
}

impl<T: Real> SimplexPoint<T> {
    pub fn new(coords: Vec<T>, mode: Mode) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::domain("simplex point needs at least one coordinate"));
        }
        let tol = T::support_tol();
        if let Some(c) = coords.iter().find(|c| !(**c >= T::zero())) {
            return Err(Error::domain(format!("negative or NaN coordinate {c}")));
        }
        let sum: T = coords.iter().copied().sum();
        let ok = match mode {
            Mode::Solid => sum <= T::one() + tol,
            Mode::Face => (sum - T::one()).abs() <= tol,
        };
        if !ok {
            return Err(Error::domain(format!(
                "coordinate sum {sum} violates the {mode} support"
            )));
        }
        Ok(SimplexPoint { coords, mode })
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }
}

/// `S_n(a) = {c >= 0 : c1/a1 + ... + cn/an <= 1}` (solid reading).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledSimplex<T> {
    sides: Vec<T>,
}

impl<T: Real> ScaledSimplex<T> {
    pub fn new(sides: Vec<T>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::domain("simplex needs at least one side"));
        }
        if let Some(a) = sides.iter().find(|a| !(**a > T::zero()) || !a.is_finite()) {
            return Err(Error::domain(format!("side {a} is not strictly positive")));
        }
        Ok(ScaledSimplex { sides })
    }

    pub fn unit(n: usize) -> Result<Self> {
        Self::new(vec![T::one(); n])
    }

    pub fn sides(&self) -> &[T] {
        &self.sides
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }
}

/// Exact volume `(a1 * ... * an) / n!` of `S_n(a)`.
pub fn simplex_volume(sides: &[Rational]) -> Result<Rational> {
    if sides.is_empty() {
        return Err(Error::domain("simplex needs at least one side"));
    }
    if let Some(a) = sides.iter().find(|a| !a.is_positive()) {
        return Err(Error::domain(format!("side {a} is not strictly positive")));
    }
    let product = sides.iter().fold(Rational::one(), |acc, a| acc * a);
    Ok(product / Rational::from_integer(factorial(sides.len())))
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Total mass of the unit simplex under `mode`: `1/n!` (solid) or `1/(n-1)!` (face).
pub fn mode_volume<T: Real>(n: usize, mode: Mode) -> T {
    let k = match mode {
        Mode::Solid => n,
        Mode::Face => n.saturating_sub(1),
    };
    (1..=k).fold(T::one(), |acc, i| acc / T::from_usize_lossy(i))
}

fn exp_variate<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(Exp1))
}

/// Fills `out` with a uniform point of the solid simplex: `n + 1` exponentials
/// normalized to sum one, last coordinate dropped.
pub fn fill_solid<T: Real, R: Rng + ?Sized>(out: &mut [T], rng: &mut R) {
    loop {
        let mut total = T::zero();
        for c in out.iter_mut() {
            *c = exp_variate(rng);
            total = total + *c;
        }
        total = total + exp_variate(rng);
        if total > T::zero() {
            out.iter_mut().for_each(|c| *c = *c / total);
            return;
        }
    }
}

/// Fills `out` with a flat-Dirichlet point of the probability face.
pub fn fill_face<T: Real, R: Rng + ?Sized>(out: &mut [T], rng: &mut R) {
    loop {
        let mut total = T::zero();
        for c in out.iter_mut() {
            *c = exp_variate(rng);
            total = total + *c;
        }
        if total > T::zero() {
            out.iter_mut().for_each(|c| *c = *c / total);
            return;
        }
    }
}

pub fn fill<T: Real, R: Rng + ?Sized>(mode: Mode, out: &mut [T], rng: &mut R) {
    match mode {
        Mode::Solid => fill_solid(out, rng),
        Mode::Face => fill_face(out, rng),
    }
}

pub fn sample_solid<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SimplexPoint<T>> {
    sample(n, Mode::Solid, rng)
}

pub fn sample_face<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SimplexPoint<T>> {
    sample(n, Mode::Face, rng)
}

pub fn sample<T: Real, R: Rng + ?Sized>(n: usize, mode: Mode, rng: &mut R) -> Result<SimplexPoint<T>> {
    if n == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let mut coords = vec![T::zero(); n];
    fill(mode, &mut coords, rng);
    Ok(SimplexPoint { coords, mode })
}

/// Axis-aligned hyperplane `c[axis] = at` across which the integrand may have a kink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kink<T> {
    pub axis: usize,
    pub at: T,
}

/// Integration region: the (optionally scaled) simplex under a measure, plus kinks.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexDomain<T> {
    n: usize,
    mode: Mode,
    sides: Option<ScaledSimplex<T>>,
    kinks: Vec<Kink<T>>,
}

impl<T: Real> SimplexDomain<T> {
    pub fn new(n: usize, mode: Mode) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        Ok(SimplexDomain {
            n,
            mode,
            sides: None,
            kinks: Vec::new(),
        })
    }

    pub fn solid(n: usize) -> Result<Self> {
        Self::new(n, Mode::Solid)
    }

    pub fn face(n: usize) -> Result<Self> {
        Self::new(n, Mode::Face)
    }

    pub fn scaled(sides: ScaledSimplex<T>, mode: Mode) -> Self {
        SimplexDomain {
            n: sides.dim(),
            mode,
            sides: Some(sides),
            kinks: Vec::new(),
        }
    }

    /// Declares a kink hyperplane. In face mode kinks on the last (dependent)
    /// coordinate cannot be split and are ignored by the deterministic scheme.
    pub fn with_kink(mut self, axis: usize, at: T) -> Result<Self> {
        if axis >= self.n {
            return Err(Error::domain(format!("kink axis {axis} out of range")));
        }
        self.kinks.push(Kink { axis, at });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    fn side(&self, i: usize) -> T {
        self.sides.as_ref().map_or(T::one(), |s| s.sides()[i])
    }

    /// Mass of the region under its measure.
    pub fn volume(&self) -> T {
        let free = self.free_axes();
        (0..free).fold(mode_volume::<T>(self.n, self.mode), |acc, i| acc * self.side(i))
    }

    fn free_axes(&self) -> usize {
        match self.mode {
            Mode::Solid => self.n,
            Mode::Face => self.n - 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
}

impl MonteCarlo {
    pub fn new(samples: usize, seed: u64) -> Self {
        MonteCarlo {
            samples,
            seed,
            workers: parallel::default_workers(),
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// Nested Gauss-Legendre with `order` nodes per axis and panel.
    Deterministic { order: usize },
    MonteCarlo(MonteCarlo),
}

/// Unnormalized integral with an error estimate: the difference to a half-order rule
/// for the deterministic scheme, one standard error for Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
}

/// Integrates `f` over the domain.
pub fn integrate_simplex<T, F>(f: F, domain: &SimplexDomain<T>, scheme: Scheme) -> Result<Integral<T>>
where
    T: Real,
    F: Fn(&[T]) -> T + Sync,
{
    match scheme {
        Scheme::Deterministic { order } => {
            if order == 0 {
                return Err(Error::domain("quadrature order must be positive"));
            }
            let fine = nested(&f, domain, order)?;
            let error = if order > 1 {
                (fine - nested(&f, domain, order / 2)?).abs()
            } else {
                fine.abs()
            };
            let roundoff = fine.abs() * T::epsilon() * T::lit(16.0);
            Ok(Integral {
                value: fine,
                error: error.max(roundoff),
            })
        }
        Scheme::MonteCarlo(mc) => monte_carlo(&f, domain, mc),
    }
}

fn nested<T: Real, F: Fn(&[T]) -> T>(f: &F, domain: &SimplexDomain<T>, order: usize) -> Result<T> {
    let rule = GaussLegendre::<T>::new(order);
    let mut coords = vec![T::zero(); domain.n];
    let walker = Nested { f, domain, rule: &rule };
    walker.axis(0, T::one(), &mut coords)
}

struct Nested<'a, T, F> {
    f: &'a F,
    domain: &'a SimplexDomain<T>,
    rule: &'a GaussLegendre<T>,
}

impl<T: Real, F: Fn(&[T]) -> T> Nested<'_, T, F> {
    // `remaining` is 1 - sum_{j<k} c_j / a_j.
    fn axis(&self, k: usize, remaining: T, coords: &mut Vec<T>) -> Result<T> {
        let d = self.domain;
        if k == d.free_axes() {
            if d.mode == Mode::Face {
                coords[k] = d.side(k) * remaining.max(T::zero());
            }
            let v = (self.f)(coords);
            if !v.is_finite() {
                return Err(Error::evaluation(to_f64_vec(coords), format!("integrand returned {v}")));
            }
            return Ok(v);
        }
        let side = d.side(k);
        let upper = side * remaining.max(T::zero());
        let breaks: Vec<T> = d.kinks.iter().filter(|kk| kk.axis == k).map(|kk| kk.at).collect();
        let edges = crate::quadrature::panel_edges(T::zero(), upper, &breaks);
        let mut total = T::zero();
        for panel in edges.windows(2) {
            for (x, w) in self.rule.mapped(panel[0], panel[1]) {
                coords[k] = x;
                total = total + w * self.axis(k + 1, remaining - x / side, coords)?;
            }
        }
        Ok(total)
    }
}

fn monte_carlo<T, F>(f: &F, domain: &SimplexDomain<T>, mc: MonteCarlo) -> Result<Integral<T>>
where
    T: Real,
    F: Fn(&[T]) -> T + Sync,
{
    if mc.samples == 0 {
        return Err(Error::domain("sample count must be positive"));
    }
    let sizes: Vec<usize> = chunk_sizes(mc.samples).collect();
    let parts = parallel::map_indexed(sizes.len(), mc.workers, |chunk| {
        let mut rng = substream(mc.seed, chunk as u64);
        let mut c = vec![T::zero(); domain.n];
        let mut acc = Moments::new();
        for _ in 0..sizes[chunk] {
            fill(domain.mode, &mut c, &mut rng);
            for (i, ci) in c.iter_mut().enumerate() {
                *ci = *ci * domain.side(i);
            }
            let v = f(&c);
            if !v.is_finite() {
                return Err(Error::evaluation(to_f64_vec(&c), format!("integrand returned {v}")));
            }
            acc.push(v);
        }
        Ok(acc)
    });
    let mut total = Moments::new();
    for part in parts {
        total.merge(&part?);
    }
    let vol = domain.volume();
    Ok(Integral {
        value: total.mean() * vol,
        error: total.std_error() * vol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::substream;
    use num_traits::FromPrimitive;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn volume_goldens() {
        assert_eq!(simplex_volume(&[q(1, 1), q(1, 1), q(1, 1)]).unwrap(), q(1, 6));
        assert_eq!(simplex_volume(&[q(1, 1)]).unwrap(), q(1, 1));
        assert_eq!(simplex_volume(&[q(2, 1), q(3, 1)]).unwrap(), q(3, 1));
    }

    #[test]
    fn volume_rejects_nonpositive_sides() {
        assert!(matches!(simplex_volume(&[q(1, 1), q(0, 1)]), Err(Error::Domain(_))));
        assert!(matches!(simplex_volume(&[q(-1, 2)]), Err(Error::Domain(_))));
        assert!(simplex_volume(&[]).is_err());
    }

    #[test]
    fn unit_volume_times_factorial_is_one() {
        for n in 1..=12 {
            let v = simplex_volume(&vec![q(1, 1); n]).unwrap();
            assert_eq!(v * Rational::from_integer(factorial(n)), q(1, 1));
        }
    }

    // Brute-force oracle: midpoint count of {c1/2 + c2/3 <= 1} on [0,2]x[0,3].
    #[test]
    fn scaled_volume_matches_grid_count() {
        let k = 600;
        let mut inside = 0usize;
        for i in 0..k {
            for j in 0..k {
                let c1 = 2.0 * (i as f64 + 0.5) / k as f64;
                let c2 = 3.0 * (j as f64 + 0.5) / k as f64;
                if c1 / 2.0 + c2 / 3.0 <= 1.0 {
                    inside += 1;
                }
            }
        }
        let area = 6.0 * inside as f64 / (k * k) as f64;
        assert!((area - 3.0).abs() < 0.02, "{area}");
        let exact = simplex_volume(&[q(2, 1), q(3, 1)]).unwrap();
        assert_eq!(exact, Rational::from_f64(3.0).unwrap());
        let dom = SimplexDomain::scaled(ScaledSimplex::new(vec![2.0, 3.0]).unwrap(), Mode::Solid);
        let quad = integrate_simplex(|_| 1.0, &dom, Scheme::Deterministic { order: 4 }).unwrap();
        assert!((quad.value - 3.0).abs() < 1e-13);
    }

    #[test]
    fn sampling_rejects_zero_dimension() {
        let mut rng = substream(1, 0);
        assert!(sample_solid::<f64, _>(0, &mut rng).is_err());
        assert!(sample_face::<f64, _>(0, &mut rng).is_err());
    }

    #[test]
    fn one_dimensional_samples() {
        let mut rng = substream(9, 0);
        for _ in 0..100 {
            let p = sample_solid::<f64, _>(1, &mut rng).unwrap();
            assert!((0.0..=1.0).contains(&p.coords()[0]));
            let f = sample_face::<f64, _>(1, &mut rng).unwrap();
            assert_eq!(f.coords(), &[1.0]);
        }
    }

    #[test]
    fn solid_mean_of_first_coordinate() {
        let mut rng = substream(2024, 0);
        let mut m = Moments::new();
        for _ in 0..100_000 {
            let p = sample_solid::<f64, _>(2, &mut rng).unwrap();
            m.push(p.coords()[0]);
        }
        assert!((m.mean() - 1.0 / 3.0).abs() < 3.0 * m.std_error(), "{:?}", m);
    }

    #[test]
    fn solid_support_in_three_dimensions() {
        let mut rng = substream(3, 1);
        for _ in 0..100_000 {
            let p = sample_solid::<f64, _>(3, &mut rng).unwrap();
            assert!(p.coords().iter().sum::<f64>() <= 1.0);
        }
    }

    #[test]
    fn face_mean_abs_deviation() {
        let mut rng = substream(77, 0);
        let mut m = Moments::new();
        for _ in 0..100_000 {
            let p = sample_face::<f64, _>(2, &mut rng).unwrap();
            m.push((p.coords()[0] - 0.5).abs());
        }
        assert!((m.mean() - 0.25).abs() < 3.0 * m.std_error(), "{:?}", m);
    }

    #[test]
    fn face_samples_are_normalized() {
        let mut rng = substream(5, 5);
        for n in 1..=9 {
            for _ in 0..2000 {
                let p = sample_face::<f64, _>(n, &mut rng).unwrap();
                assert!((p.coords().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn point_validation() {
        assert!(SimplexPoint::new(vec![0.2, 0.3], Mode::Solid).is_ok());
        assert!(SimplexPoint::new(vec![0.2, 0.3], Mode::Face).is_err());
        assert!(SimplexPoint::new(vec![-0.1, 0.3], Mode::Solid).is_err());
        assert!(SimplexPoint::new(vec![0.7, 0.7], Mode::Solid).is_err());
        assert!(SimplexPoint::new(vec![0.25, 0.75], Mode::Face).is_ok());
        assert!(ScaledSimplex::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn integral_goldens() {
        let solid2 = SimplexDomain::<f64>::solid(2).unwrap();
        let det = Scheme::Deterministic { order: 32 };
        let one = integrate_simplex(|_| 1.0, &solid2, det).unwrap();
        assert!((one.value - 0.5).abs() < 1e-14);
        let lin = integrate_simplex(|c| c[0], &solid2, det).unwrap();
        assert!((lin.value - 1.0 / 6.0).abs() < 1e-14);
        let kinked = solid2.clone().with_kink(0, 0.5).unwrap();
        let abs = integrate_simplex(|c| (c[0] - 0.5).abs(), &kinked, det).unwrap();
        assert!((abs.value - 0.125).abs() < 1e-14);
        // Without the split, convergence is algebraic but the error bound covers it.
        let rough = integrate_simplex(|c| (c[0] - 0.5).abs(), &solid2, det).unwrap();
        assert!((rough.value - 0.125).abs() <= rough.error);
    }

    #[test]
    fn face_integrals() {
        let det = Scheme::Deterministic { order: 16 };
        let face1 = SimplexDomain::<f64>::face(1).unwrap();
        let v = integrate_simplex(|c| c[0] * 3.0, &face1, det).unwrap();
        assert_eq!(v.value, 3.0);
        let face3 = SimplexDomain::<f64>::face(3).unwrap();
        assert!((face3.volume() - 0.5).abs() < 1e-15);
        // E[c3] = 1/3 under the flat Dirichlet law, mass 1/2.
        let v = integrate_simplex(|c| c[2], &face3, det).unwrap();
        assert!((v.value - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn nonfinite_integrand_reports_point() {
        let dom = SimplexDomain::<f64>::solid(2).unwrap();
        let err = integrate_simplex(|c| if c[0] > 0.5 { f64::NAN } else { 1.0 }, &dom, Scheme::Deterministic { order: 4 })
            .unwrap_err();
        match err {
            Error::Evaluation { point, .. } => assert!(point[0] > 0.5),
            other => panic!("unexpected {other:?}"),
        }
        let mc = Scheme::MonteCarlo(MonteCarlo::new(1000, 1));
        assert!(matches!(
            integrate_simplex(|_| f64::INFINITY, &dom, mc),
            Err(Error::Evaluation { .. })
        ));
    }

    #[test]
    fn monte_carlo_independent_of_workers() {
        let dom = SimplexDomain::<f64>::solid(3).unwrap();
        let base = MonteCarlo::new(20_000, 11);
        let a = integrate_simplex(|c| c[0] * c[1] + c[2], &dom, Scheme::MonteCarlo(base.with_workers(1))).unwrap();
        let b = integrate_simplex(|c| c[0] * c[1] + c[2], &dom, Scheme::MonteCarlo(base.with_workers(7))).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error.to_bits(), b.error.to_bits());
    }
}

//! Circulant matrices represented by their first row.
//!
//! Entry `(i, j)` (0-based) of `circ(c)` is `c[(j - i) mod n]`, so row `i` is the
//! generator shifted right `i` times.

use std::fmt;

use num_traits::{FromPrimitive, Num};
use serde::Serialize;

use crate::error::{Error, Result};

/// Scalars the circulant routines work over: `f32`, `f64` and [`crate::Rational`].
pub trait Field: Num + Clone + FromPrimitive + PartialOrd + fmt::Debug {}

impl<T> Field for T where T: Num + Clone + FromPrimitive + PartialOrd + fmt::Debug {}

fn distance<T: Field>(a: T, b: T) -> T {
    if a < b {
        b - a
    } else {
        a - b
    }
}

/// Classification tolerance used when the caller has no better value.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Row-sum tolerance for the probability-face precondition of [`product_row_formula`].
pub const FACE_TOL: f64 = 1e-12;

/// Reduces a 1-based index "taken modulo n" into `1..=n`.
pub fn wrap_index(k: i64, n: usize) -> usize {
    let n = n as i64;
    ((k - 1).rem_euclid(n) + 1) as usize
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CirculantGenerator<T> {
    row: Vec<T>,
}

impl<T: Field> CirculantGenerator<T> {
    pub fn new(row: Vec<T>) -> Result<Self> {
        if row.is_empty() {
            return Err(Error::domain("circulant generator must have length >= 1"));
        }
        Ok(CirculantGenerator { row })
    }

    /// `circ(1, 0, ..., 0)`.
    pub fn identity(n: usize) -> Result<Self> {
        let mut row = vec![T::zero(); n];
        if let Some(first) = row.first_mut() {
            *first = T::one();
        }
        Self::new(row)
    }

    /// `circ(1/n, ..., 1/n)`.
    pub fn barycenter(n: usize) -> Result<Self> {
        let inv = T::one() / T::from_usize(n.max(1)).expect("dimension fits scalar");
        Self::new(vec![inv; n])
    }

    pub fn dim(&self) -> usize {
        self.row.len()
    }

    pub fn row(&self) -> &[T] {
        &self.row
    }

    pub fn into_row(self) -> Vec<T> {
        self.row
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        let n = self.dim();
        self.row[(j + n - i % n) % n].clone()
    }

    pub fn to_matrix(&self) -> Vec<Vec<T>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.entry(i, j)).collect()).collect()
    }

    pub fn row_sum(&self) -> T {
        self.row.iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::domain(format!(
                "length mismatch: generator has {} entries, operand has {n}",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Generator of `circ(a) * circ(b)`: the cyclic convolution of the two rows.
pub fn circ_multiply<T: Field>(a: &CirculantGenerator<T>, b: &CirculantGenerator<T>) -> Result<CirculantGenerator<T>> {
    a.check_len(b.dim())?;
    let n = a.dim();
    let mut out = vec![T::zero(); n];
    multiply_into(&a.row, &b.row, &mut out);
    Ok(CirculantGenerator { row: out })
}

/// Allocation-free kernel of [`circ_multiply`]; all slices must have equal length.
pub fn multiply_into<T: Field>(a: &[T], b: &[T], out: &mut [T]) {
    let n = a.len();
    debug_assert!(b.len() == n && out.len() == n);
    for (alpha, slot) in out.iter_mut().enumerate() {
        let mut acc = T::zero();
        for (i, ai) in a.iter().enumerate() {
            acc = acc + ai.clone() * b[(alpha + n - i) % n].clone();
        }
        *slot = acc;
    }
}

/// `circ(a) x`.
pub fn circ_apply<T: Field>(a: &CirculantGenerator<T>, x: &[T]) -> Result<Vec<T>> {
    a.check_len(x.len())?;
    let n = a.dim();
    Ok((0..n)
        .map(|i| {
            x.iter()
                .enumerate()
                .fold(T::zero(), |acc, (j, xj)| acc + a.row[(j + n - i) % n].clone() * xj.clone())
        })
        .collect())
}

/// First row `t_m` of `circ(c_1) ... circ(c_m)` from the centered nested-sum expansion
///
/// `t_m^a = 1/n + sum_{i_{m-1}} ... sum_{i_1} (c_1^{i_1} - 1/n)(c_2^{i_2-i_1+1} - 1/n) ... (c_m^{a-i_{m-1}+1} - 1/n)`
///
/// with 1-based superscripts reduced by [`wrap_index`]. Only valid when every generator
/// has unit row sum; anything else is rejected.
pub fn product_row_formula<T: Field>(generators: &[CirculantGenerator<T>]) -> Result<CirculantGenerator<T>> {
    let m = generators.len();
    if m < 2 {
        return Err(Error::Precondition(format!("need at least two generators, got {m}")));
    }
    let n = generators[0].dim();
    let tol = T::from_f64(FACE_TOL).expect("tolerance representable");
    for (k, g) in generators.iter().enumerate() {
        g.check_len(n)?;
        if distance(g.row_sum(), T::one()) > tol {
            return Err(Error::Precondition(format!(
                "generator {} has row sum {:?}, expected 1",
                k + 1,
                g.row_sum()
            )));
        }
    }
    let inv_n = T::one() / T::from_usize(n).expect("dimension fits scalar");
    let centered: Vec<Vec<T>> = generators
        .iter()
        .map(|g| g.row.iter().map(|c| c.clone() - inv_n.clone()).collect())
        .collect();
    // superscript lookup, 1-based
    let sup = |k: usize, idx: i64| centered[k][wrap_index(idx, n) - 1].clone();

    let mut row = Vec::with_capacity(n);
    for alpha in 1..=n as i64 {
        let mut total = T::zero();
        // odometer over (i_1, ..., i_{m-1}) in {1..n}^{m-1}
        let mut idx = vec![1i64; m - 1];
        loop {
            let mut term = sup(0, idx[0]);
            for k in 1..m - 1 {
                term = term * sup(k, idx[k] - idx[k - 1] + 1);
            }
            term = term * sup(m - 1, alpha - idx[m - 2] + 1);
            total = total + term;

            let mut pos = 0;
            while pos < idx.len() && idx[pos] == n as i64 {
                idx[pos] = 1;
                pos += 1;
            }
            if pos == idx.len() {
                break;
            }
            idx[pos] += 1;
        }
        row.push(inv_n.clone() + total);
    }
    Ok(CirculantGenerator { row })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stochasticity {
    DoublyStochastic,
    SubStochastic,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StochasticityClass<T> {
    pub class: Stochasticity,
    pub row_sum: T,
}

/// Classifies `circ(a)`; column sums of a circulant equal its row sum.
pub fn classify_stochasticity<T: Field>(a: &CirculantGenerator<T>, tol: T) -> StochasticityClass<T> {
    let row_sum = a.row_sum();
    let nonneg = a.row.iter().all(|c| c.clone() + tol.clone() >= T::zero());
    let class = if !nonneg {
        Stochasticity::Neither
    } else if distance(row_sum.clone(), T::one()) <= tol {
        Stochasticity::DoublyStochastic
    } else if row_sum < T::one() - tol {
        Stochasticity::SubStochastic
    } else {
        Stochasticity::Neither
    };
    StochasticityClass { class, row_sum }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn gen(v: &[f64]) -> CirculantGenerator<f64> {
        CirculantGenerator::new(v.to_vec()).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    // Independent dense n x n product.
    fn dense_product(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = a.len();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    }

    #[test]
    fn layout_matches_shifted_rows() {
        let c = gen(&[1.0, 2.0, 3.0, 4.0]);
        let m = c.to_matrix();
        assert_eq!(m[0], vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m[1], vec![4.0, 1.0, 2.0, 3.0]);
        assert_eq!(m[3], vec![2.0, 3.0, 4.0, 1.0]);
    }

    #[test]
    fn wrap_index_is_one_based() {
        assert_eq!(wrap_index(1, 3), 1);
        assert_eq!(wrap_index(3, 3), 3);
        assert_eq!(wrap_index(4, 3), 1);
        assert_eq!(wrap_index(0, 3), 3);
        assert_eq!(wrap_index(-2, 3), 1);
    }

    #[test]
    fn multiply_two_by_two() {
        let (a, b, c, d) = (q(1, 3), q(2, 5), q(-7, 2), q(4, 1));
        let x = CirculantGenerator::new(vec![a.clone(), b.clone()]).unwrap();
        let y = CirculantGenerator::new(vec![c.clone(), d.clone()]).unwrap();
        let p = circ_multiply(&x, &y).unwrap();
        assert_eq!(p.row(), &[&a * &c + &b * &d, &a * &d + &b * &c]);
    }

    #[test]
    fn multiply_golden() {
        let p = circ_multiply(&gen(&[0.3, 0.7]), &gen(&[0.6, 0.4])).unwrap();
        let dense = dense_product(&gen(&[0.3, 0.7]).to_matrix(), &gen(&[0.6, 0.4]).to_matrix());
        assert!((p.row()[0] - dense[0][0]).abs() < 1e-15);
        assert!((p.row()[0] - 0.46).abs() < 1e-15 && (p.row()[1] - 0.54).abs() < 1e-15);
    }

    #[test]
    fn identity_is_neutral() {
        let b = gen(&[0.1, -2.0, 5.5]);
        let id = CirculantGenerator::identity(3).unwrap();
        assert_eq!(circ_multiply(&id, &b).unwrap(), b);
        assert_eq!(circ_apply(&id, &[3.0, 4.0, 5.0]).unwrap(), vec![3.0, 4.0, 5.0]);
    }

    #[test]
    fn length_mismatch_is_domain_error() {
        assert!(matches!(circ_multiply(&gen(&[1.0]), &gen(&[1.0, 0.0])), Err(Error::Domain(_))));
        assert!(matches!(circ_apply(&gen(&[1.0, 0.0]), &[1.0]), Err(Error::Domain(_))));
        assert!(CirculantGenerator::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn apply_goldens() {
        let bary = CirculantGenerator::<Rational>::barycenter(4).unwrap();
        let x = vec![q(1, 1), q(-3, 1), q(5, 2), q(7, 1)];
        let y = circ_apply(&bary, &x).unwrap();
        assert!(y.iter().all(|v| *v == q(15, 8)));

        // rows (1/2,1/4,1/4), (1/4,1/2,1/4), (1/4,1/4,1/2)
        let c = CirculantGenerator::new(vec![q(1, 2), q(1, 4), q(1, 4)]).unwrap();
        let y = circ_apply(&c, &[q(1, 1), q(2, 1), q(3, 1)]).unwrap();
        let rows = c.to_matrix();
        let oracle: Vec<Rational> = rows
            .iter()
            .map(|r| &r[0] * q(1, 1) + &r[1] * q(2, 1) + &r[2] * q(3, 1))
            .collect();
        assert_eq!(y, oracle);
        assert_eq!(y, vec![q(7, 4), q(2, 1), q(9, 4)]);
    }

    #[test]
    fn formula_two_by_two_golden() {
        let t = product_row_formula(&[gen(&[0.3, 0.7]), gen(&[0.6, 0.4])]).unwrap();
        assert!((t.row()[0] - 0.46).abs() < 1e-15);
        assert!((t.row()[1] - 0.54).abs() < 1e-15);
        assert!((0.5 + 2.0 * (0.3 - 0.5) * (0.6 - 0.5) - 0.46f64).abs() < 1e-15);
    }

    #[test]
    fn formula_on_barycenters() {
        for n in 1..=5 {
            let b = CirculantGenerator::<Rational>::barycenter(n).unwrap();
            let t = product_row_formula(&vec![b.clone(); 4]).unwrap();
            assert_eq!(t, b);
        }
    }

    #[test]
    fn formula_exact_against_product() {
        let gens: Vec<_> = [
            vec![q(1, 2), q(1, 3), q(1, 6)],
            vec![q(0, 1), q(3, 4), q(1, 4)],
            vec![q(2, 7), q(2, 7), q(3, 7)],
        ]
        .into_iter()
        .map(|r| CirculantGenerator::new(r).unwrap())
        .collect();
        let mut prod = gens[0].clone();
        for g in &gens[1..] {
            prod = circ_multiply(&prod, g).unwrap();
        }
        assert_eq!(product_row_formula(&gens).unwrap(), prod);
    }

    #[test]
    fn formula_rejects_off_face_and_short_input() {
        assert!(matches!(
            product_row_formula(&[gen(&[0.2, 0.3]), gen(&[0.5, 0.5])]),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(product_row_formula(&[gen(&[0.5, 0.5])]), Err(Error::Precondition(_))));
    }

    #[test]
    fn classification_goldens() {
        let c = classify_stochasticity(&gen(&[0.2, 0.8]), DEFAULT_TOL);
        assert_eq!(c.class, Stochasticity::DoublyStochastic);
        let c = classify_stochasticity(&gen(&[0.2, 0.3]), DEFAULT_TOL);
        assert_eq!(c.class, Stochasticity::SubStochastic);
        assert!((c.row_sum - 0.5).abs() < 1e-15);
        let c = classify_stochasticity(&gen(&[-0.1, 1.1]), DEFAULT_TOL);
        assert_eq!(c.class, Stochasticity::Neither);
        let c = classify_stochasticity(&gen(&[0.6, 0.6]), DEFAULT_TOL);
        assert_eq!(c.class, Stochasticity::Neither);
    }
}

//! Exact closed forms for the simplex integrals
//!
//! * `I_n(s)` = measure of `{c in S_n : c1 <= s}`,
//! * `J_n(s)` = integral of `c1` over the same set,
//! * `K_n(s)` = integral of `c1` over the solid simplex of size `s`,
//!
//! and the contraction factor `rho_n = n * n! * int_{S_n} |c1 - 1/n|`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::simplex::factorial;
use crate::Rational;

fn int(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn fact(n: usize) -> Rational {
    Rational::from_integer(factorial(n))
}

fn pow(base: &Rational, e: usize) -> Rational {
    num_traits::pow(base.clone(), e)
}

fn check(n: usize, s: &Rational) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if s.is_negative() {
        return Err(Error::domain(format!("s = {s} must be non-negative")));
    }
    Ok(())
}

/// `I_n(s) = -sum_{i=1}^n (-s)^i / (i! (n-i)!)`.
pub fn i_closed(n: usize, s: &Rational) -> Result<Rational> {
    check(n, s)?;
    let neg = -s.clone();
    Ok(-(1..=n)
        .map(|i| pow(&neg, i) / (fact(i) * fact(n - i)))
        .fold(Rational::zero(), |a, b| a + b))
}

/// `J_n(s) = sum_{i=1}^n i (-s)^{i+1} / ((i+1)! (n-i)!)`.
pub fn j_closed(n: usize, s: &Rational) -> Result<Rational> {
    check(n, s)?;
    let neg = -s.clone();
    Ok((1..=n)
        .map(|i| int(i) * pow(&neg, i + 1) / (fact(i + 1) * fact(n - i)))
        .fold(Rational::zero(), |a, b| a + b))
}

/// `K_n(s) = s^{n+1} / (n+1)!`.
pub fn k_closed(n: usize, s: &Rational) -> Result<Rational> {
    check(n, s)?;
    Ok(pow(s, n + 1) / fact(n + 1))
}

/// `int_{S_n} |c1 - 1/n|` via `-J_n(1/n) + (1/n) I_n(1/n) + K_n(1 - 1/n)`.
pub fn script_i(n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let inv = Rational::new(BigInt::one(), BigInt::from(n));
    let below = -j_closed(n, &inv)? + &inv * i_closed(n, &inv)?;
    let above = k_closed(n, &(Rational::one() - &inv))?;
    Ok(below + above)
}

/// Expanded binomial form of `rho_n`:
/// `sum_{i=1}^n C(n,i) (i/(i+1)) (-1/n)^i - (1-1/n)^n + 1 + (1-1/n)^n (n-1)/(n+1)`.
pub fn rho_expanded(n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let neg_inv = Rational::new(-BigInt::one(), BigInt::from(n));
    let sum = (1..=n)
        .map(|i| {
            Rational::from_integer(binomial(BigInt::from(n), BigInt::from(i)))
                * Rational::new(BigInt::from(i), BigInt::from(i + 1))
                * pow(&neg_inv, i)
        })
        .fold(Rational::zero(), |a, b| a + b);
    let tail = pow(&(Rational::one() + &neg_inv), n);
    let ratio = Rational::new(BigInt::from(n - 1), BigInt::from(n + 1));
    Ok(sum - &tail + Rational::one() + tail * ratio)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionRecord {
    pub n: usize,
    pub script_i: Rational,
    pub rho: Rational,
    pub decimal: f64,
    /// The expanded binomial form, which must equal `rho`.
    pub rho_expanded: Rational,
}

impl ContractionRecord {
    pub fn below_one(&self) -> bool {
        self.rho < Rational::one()
    }

    pub fn forms_agree(&self) -> bool {
        self.rho == self.rho_expanded
    }
}

/// `rho_n = n * n! * script_i(n)`, cross-checked against [`rho_expanded`].
pub fn rho(n: usize) -> Result<ContractionRecord> {
    let si = script_i(n)?;
    let rho = int(n) * fact(n) * &si;
    let expanded = rho_expanded(n)?;
    if expanded != rho {
        return Err(Error::Precondition(format!(
            "contraction factor forms disagree for n = {n}: {rho} vs {expanded}"
        )));
    }
    Ok(ContractionRecord {
        n,
        decimal: rho.to_f64().unwrap_or(f64::NAN),
        script_i: si,
        rho,
        rho_expanded: expanded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternatingCheck {
    pub n: usize,
    pub holds: bool,
    /// `(i, ratio)` with ratio `(i+1)/(i+2) * (n-i)/n * 1/i`, each required to be `< 1`.
    pub ratios: Vec<(usize, Rational)>,
}

/// Monotone decrease of the alternating terms of the expanded `rho_n` sum.
pub fn alternating_term_check(n: usize) -> Result<AlternatingCheck> {
    if n < 2 {
        return Err(Error::domain("alternating term check needs n >= 2"));
    }
    let ratios: Vec<(usize, Rational)> = (1..n)
        .map(|i| {
            let r = Rational::new(BigInt::from(i + 1), BigInt::from(i + 2))
                * Rational::new(BigInt::from(n - i), BigInt::from(n))
                * Rational::new(BigInt::one(), BigInt::from(i));
            (i, r)
        })
        .collect();
    let holds = ratios.iter().all(|(_, r)| *r < Rational::one());
    Ok(AlternatingCheck { n, holds, ratios })
}

//! Exact rational arithmetic and exact polynomial interpolation.
//!
//! Every volume in this crate is a [`Rational`]; nothing in the numeric core
//! ever touches floating point. [`UnivariatePolynomial`] together with
//! [`lagrange_interpolate`] backs the Ehrhart oracle, which recovers volumes
//! from lattice-point counts.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("duplicate interpolation abscissa t = {0}")]
    DuplicateAbscissa(i64),
    #[error("interpolation needs at least one sample")]
    EmptySampleSet,
    #[error("cannot parse rational from {0:?}")]
    Unparseable(String),
}

/// An exact fraction: arbitrary-precision, always stored reduced with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// Builds `numerator/denominator`, reducing and normalizing the sign.
    pub fn new(
        numerator: impl Into<BigInt>,
        denominator: impl Into<BigInt>,
    ) -> Result<Self, ArithError> {
        let den = denominator.into();
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numerator.into(), den)))
    }

    /// Shorthand for tests and literals; panics on a zero denominator.
    pub fn fraction(numerator: i64, denominator: i64) -> Self {
        Self::new(numerator, denominator).expect("nonzero denominator")
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The integer value, when the fraction is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational, ArithError> {
        if rhs.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Rational, ArithError> {
        Rational::one().checked_div(self)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for Rational {
    type Output = Rational;
    /// Panics on a zero divisor; use [`Rational::checked_div`] where the
    /// divisor is not known to be nonzero.
    fn div(self, rhs: Rational) -> Rational {
        self.checked_div(&rhs).expect("division by zero")
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for Rational {
    /// `num/den`, with `/den` omitted for integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, ArithError> {
        let bad = || ArithError::Unparseable(s.to_string());
        match s.split_once('/') {
            None => {
                let n = BigInt::from_str(s.trim()).map_err(|_| bad())?;
                Ok(Rational::from_integer(n))
            }
            Some((num, den)) => {
                let n = BigInt::from_str(num.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(den.trim()).map_err(|_| bad())?;
                Rational::new(n, d).map_err(|_| bad())
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `n!` as an exact integer.
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// `2^k` as an exact integer.
pub fn pow2(k: usize) -> BigInt {
    BigInt::one() << k
}

/// A polynomial with exact rational coefficients; `coefficients[i]` is the
/// coefficient of `t^i` and trailing zeros are trimmed, so the zero
/// polynomial has no coefficients at all.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UnivariatePolynomial {
    coefficients: Vec<Rational>,
}

impl UnivariatePolynomial {
    pub fn new(mut coefficients: Vec<Rational>) -> Self {
        while coefficients.last().is_some_and(Rational::is_zero) {
            coefficients.pop();
        }
        UnivariatePolynomial { coefficients }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    /// Coefficient of `t^i`, zero beyond the degree.
    pub fn coefficient(&self, i: usize) -> Rational {
        self.coefficients
            .get(i)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn evaluate(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coefficients.iter().rev() {
            acc = &(&acc * t) + c;
        }
        acc
    }

    pub fn evaluate_at_integer(&self, t: i64) -> Rational {
        self.evaluate(&Rational::from_integer(t))
    }

    fn add_assign_scaled(&mut self, other: &UnivariatePolynomial, scale: &Rational) {
        if self.coefficients.len() < other.coefficients.len() {
            self.coefficients
                .resize(other.coefficients.len(), Rational::zero());
        }
        for (i, c) in other.coefficients.iter().enumerate() {
            self.coefficients[i] = &self.coefficients[i] + &(c * scale);
        }
        while self.coefficients.last().is_some_and(Rational::is_zero) {
            self.coefficients.pop();
        }
    }

    /// Multiply by the linear factor `(t - root)`, used to build Lagrange
    /// basis numerators.
    fn mul_linear(&mut self, root: i64) {
        let r = Rational::from_integer(root);
        let mut out = vec![Rational::zero(); self.coefficients.len() + 1];
        for (i, c) in self.coefficients.iter().enumerate() {
            out[i + 1] = &out[i + 1] + c;
            out[i] = &out[i] - &(c * &r);
        }
        self.coefficients = out;
        while self.coefficients.last().is_some_and(Rational::is_zero) {
            self.coefficients.pop();
        }
    }
}

impl fmt::Display for UnivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let mag = if c.is_negative() { -c } else { c.clone() };
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag} ")?;
                    }
                    if i == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{i}")?;
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}

/// The unique polynomial of degree < `samples.len()` passing exactly through
/// every `(t, count)` sample, by the exact Lagrange basis form.
pub fn lagrange_interpolate(samples: &[(i64, BigInt)]) -> Result<UnivariatePolynomial, ArithError> {
    if samples.is_empty() {
        return Err(ArithError::EmptySampleSet);
    }
    for (i, (t, _)) in samples.iter().enumerate() {
        if samples[..i].iter().any(|(s, _)| s == t) {
            return Err(ArithError::DuplicateAbscissa(*t));
        }
    }
    let mut result = UnivariatePolynomial::zero();
    for (i, (ti, yi)) in samples.iter().enumerate() {
        let mut basis = UnivariatePolynomial::constant(Rational::one());
        let mut denom = Rational::one();
        for (j, (tj, _)) in samples.iter().enumerate() {
            if i != j {
                basis.mul_linear(*tj);
                denom = &denom * &Rational::from_integer(ti - tj);
            }
        }
        let scale = Rational::from_integer(yi.clone()).checked_div(&denom)?;
        result.add_assign_scaled(&basis, &scale);
    }
    Ok(result)
}

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::field::Rat;
use crate::{Result, SymbolicError};

/// Truncated power series `c_0 + c_1 x + ... + c_N x^N`; arithmetic keeps
/// the smaller of the two orders.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PowerSeries {
    coeffs: Vec<Rat>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least one coefficient");
        Self { coeffs }
    }

    pub fn from_integers<I: IntoIterator<Item = T>, T: Into<BigInt>>(coeffs: I) -> Self {
        Self::new(coeffs.into_iter().map(|c| Rat::from_integer(c.into())).collect())
    }

    /// Truncation order `N` (the series holds `N + 1` coefficients).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rat> {
        self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Rat {
        self.coeffs.get(n).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs.iter().take(order + 1).cloned().collect())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        Self::new((0..n).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        Self::new((0..n).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut out = vec![Rat::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplicative inverse; needs a non-zero constant term.
    pub fn inv(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(SymbolicError::NonUnitDenominator);
        }
        let inv0 = c0.recip();
        let mut out: Vec<Rat> = vec![inv0.clone()];
        for n in 1..self.coeffs.len() {
            let mut acc = Rat::zero();
            for k in 1..=n {
                acc += &self.coeffs[k] * &out[n - k];
            }
            out.push(-acc * &inv0);
        }
        Ok(Self::new(out))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Coefficients as integers, if they all are.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.coeffs.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }

    pub fn one(order: usize) -> Self {
        let mut c = vec![Rat::zero(); order + 1];
        c[0] = Rat::one();
        Self::new(c)
    }
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "] + O(x^{})", self.coeffs.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_one_minus_x() {
        let s = PowerSeries::from_integers([1, -1, 0, 0, 0]);
        assert_eq!(s.inv().unwrap(), PowerSeries::from_integers([1, 1, 1, 1, 1]));
    }

    #[test]
    fn product_truncates_to_shorter() {
        let a = PowerSeries::from_integers([1, 1, 1]);
        let b = PowerSeries::from_integers([1, 2, 3, 4]);
        assert_eq!(a.mul(&b), PowerSeries::from_integers([1, 3, 6]));
    }
}

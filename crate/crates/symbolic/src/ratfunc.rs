use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::field::{rat, Rat};
use crate::poly::{fmt_poly, Poly};
use crate::series::PowerSeries;
use crate::{Result, SymbolicError};

/// An element of `Q(x)` kept in lowest terms.
///
/// The denominator is normalized to constant term 1 when it does not vanish
/// at 0, and to a monic polynomial otherwise, so structural equality is
/// mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(SymbolicError::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let scale = match den.coeffs().first() {
            Some(c0) if !c0.is_zero() => c0.clone(),
            _ => den.lc().expect("non-zero").clone(),
        };
        if !scale.is_one() {
            let inv = scale.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Self { num, den }
    }

    pub fn zero() -> Self {
        Self { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        Self { num: p, den: Poly::one() }
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(rat(c))
    }

    /// The indeterminate `x`.
    pub fn x() -> Self {
        Self::from_poly(Poly::var())
    }

    /// `x^e` for any integer exponent.
    pub fn x_pow(e: i32) -> Self {
        if e >= 0 {
            Self::from_poly(Poly::monomial(Rat::one(), e as usize))
        } else {
            Self { num: Poly::one(), den: Poly::monomial(Rat::one(), (-e) as usize) }
        }
    }

    /// Builds `num/den` from integer coefficient lists (ascending degree).
    pub fn from_ints(num: &[i64], den: &[i64]) -> Result<Self> {
        Self::new(Poly::from_ints(num), Poly::from_ints(den))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(SymbolicError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Value at `x = 0`; errors when 0 is a pole.
    pub fn eval_at_zero(&self) -> Result<Rat> {
        self.eval(&Rat::zero())
    }

    pub fn eval(&self, at: &Rat) -> Result<Rat> {
        let d = self.den.eval(at);
        if d.is_zero() {
            return Err(SymbolicError::PoleAtEvaluationPoint(format!("x = {at}")));
        }
        Ok(self.num.eval(at) / d)
    }

    /// Order of vanishing at `x = 0`; negative for a pole, `None` for zero.
    pub fn valuation(&self) -> Option<i32> {
        let vn = self.num.valuation()? as i32;
        let vd = self.den.valuation().expect("non-zero denominator") as i32;
        Some(vn - vd)
    }

    /// First `order + 1` Maclaurin coefficients.
    pub fn series_expand(&self, order: usize) -> Result<PowerSeries> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            return Err(SymbolicError::NonUnitDenominator);
        }
        let inv0 = d0.recip();
        let mut out: Vec<Rat> = Vec::with_capacity(order + 1);
        let den = self.den.coeffs();
        for n in 0..=order {
            let mut acc = self.num.coeff(n);
            for (k, dk) in den.iter().enumerate().skip(1).take(n) {
                acc -= dk * &out[n - k];
            }
            out.push(acc * &inv0);
        }
        Ok(PowerSeries::new(out))
    }

    /// Laurent expansion `x^v * (c_0 + c_1 x + ... + c_len-1 x^(len-1))`.
    /// Returns `(v, coefficients)`; zero yields `(0, [0; len])`.
    pub fn laurent_expand(&self, len: usize) -> (i32, Vec<Rat>) {
        if self.is_zero() {
            return (0, vec![Rat::zero(); len]);
        }
        let vd = self.den.valuation().expect("non-zero") as i32;
        let vn = self.num.valuation().expect("non-zero") as i32;
        let shifted = Self { num: self.num.shift_down(vn as usize), den: self.den.shift_down(vd as usize) };
        let s = shifted.series_expand(len.saturating_sub(1)).expect("unit denominator after shift");
        (vn - vd, s.into_coeffs())
    }

    /// Numerator and denominator as integer arrays with no common content and
    /// the denominator's constant term positive (or its leading coefficient,
    /// if the constant term vanishes).
    pub fn to_integer_pair(&self) -> (Vec<BigInt>, Vec<BigInt>) {
        let lcm = self.num.coeffs().iter().chain(self.den.coeffs()).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let to_ints = |p: &Poly| -> Vec<BigInt> { p.coeffs().iter().map(|c| (c * &lcm).to_integer()).collect() };
        let (mut n, mut d) = (to_ints(&self.num), to_ints(&self.den));
        let g = n.iter().chain(d.iter()).fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let pivot = d.iter().find(|c| !c.is_zero()).expect("non-zero denominator");
        let g = if pivot.is_negative() { -g } else { g };
        for c in n.iter_mut().chain(d.iter_mut()) {
            *c /= &g;
        }
        (n, d)
    }

    pub fn from_integer_pair(num: &[BigInt], den: &[BigInt]) -> Result<Self> {
        Self::new(Poly::from_bigints(num), Poly::from_bigints(den))
    }

    /// Substitutes `x -> c x`.
    pub fn scale_var(&self, c: &Rat) -> Self {
        let sc = |p: &Poly| {
            let mut pw = Rat::one();
            let mut out = Vec::new();
            for a in p.coeffs() {
                out.push(a * &pw);
                pw *= c;
            }
            Poly::new(out)
        };
        Self::normalized(sc(&self.num), sc(&self.den))
    }
}

impl crate::field::Field for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn one() -> Self {
        RationalFunction::one()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        RationalFunction::inv(self).ok()
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalFunction::normalized(&self.num + &rhs.num, self.den.clone());
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalFunction::normalized(num, &self.den * &rhs.den)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction::normalized(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

/// Panics on division by zero, like integer division; use
/// [`RationalFunction::inv`] for a checked variant.
impl Div for &RationalFunction {
    type Output = RationalFunction;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self * &rhs.inv().expect("division by zero rational function")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction { (&self).$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl From<Poly> for RationalFunction {
    fn from(p: Poly) -> Self {
        Self::from_poly(p)
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = |p: &Poly| p.coeffs().iter().filter(|c| !c.is_zero()).count();
        if self.den.is_one() {
            return fmt_poly(f, self.num.coeffs(), "x");
        }
        if terms(&self.num) > 1 {
            write!(f, "(")?;
            fmt_poly(f, self.num.coeffs(), "x")?;
            write!(f, ")")?;
        } else {
            fmt_poly(f, self.num.coeffs(), "x")?;
        }
        write!(f, "/")?;
        if terms(&self.den) > 1 {
            write!(f, "(")?;
            fmt_poly(f, self.den.coeffs(), "x")?;
            write!(f, ")")
        } else {
            fmt_poly(f, self.den.coeffs(), "x")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::from_ints(n, d).unwrap()
    }

    #[test]
    fn geometric_series() {
        let s = rf(&[0, 1], &[1, -2]).series_expand(5).unwrap();
        assert_eq!(s.to_integers().unwrap(), vec![0, 1, 2, 4, 8, 16].into_iter().map(BigInt::from).collect::<Vec<_>>());
    }

    #[test]
    fn normalizes_constant_term_of_denominator() {
        // x(1-2x) / ((1-x)(1-3x)) written with a scaled denominator
        let num = Poly::from_ints(&[0, 2, -4]);
        let den = Poly::from_ints(&[1, -1]).mul(&Poly::from_ints(&[2, -6]));
        let f = RationalFunction::new(num, den).unwrap();
        assert_eq!(f.den().coeff(0), rat(1));
        assert_eq!(f, rf(&[0, 1, -2], &[1, -4, 3]));
    }

    #[test]
    fn sum_of_two_fractions() {
        // x/(1-x) + x^2/(1-x)^3, expanded coefficientwise by hand:
        // 0,1,1,1,1,1,1 + 0,0,1,3,6,10,15 = 0,1,2,4,7,11,16
        let a = rf(&[0, 1], &[1, -1]);
        let b = rf(&[0, 0, 1], &[1, -3, 3, -1]);
        let s = (&a + &b).series_expand(6).unwrap();
        let want: Vec<BigInt> = [0, 1, 2, 4, 7, 11, 16].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(s.to_integers().unwrap(), want);
    }

    #[test]
    fn cancellation_reduces() {
        let a = rf(&[1, -1], &[1, -3, 2]); // (1-x)/((1-x)(1-2x))
        assert_eq!(a, rf(&[1], &[1, -2]));
    }

    #[test]
    fn pole_at_zero_is_reported() {
        let f = RationalFunction::x_pow(-1);
        assert_eq!(f.series_expand(3), Err(SymbolicError::NonUnitDenominator));
        assert!(f.eval_at_zero().is_err());
        let (v, c) = f.laurent_expand(2);
        assert_eq!(v, -1);
        assert_eq!(c, vec![rat(1), rat(0)]);
    }

    #[test]
    fn integer_pair_normalization() {
        let f = RationalFunction::new(
            Poly::new(vec![Rat::new(1.into(), 2.into()), rat(0)]),
            Poly::new(vec![rat(1), Rat::new((-1).into(), 3.into())]),
        )
        .unwrap();
        let (n, d) = f.to_integer_pair();
        assert_eq!(n, vec![BigInt::from(3)]);
        assert_eq!(d, vec![BigInt::from(6), BigInt::from(-2)]);
        assert_eq!(RationalFunction::from_integer_pair(&n, &d).unwrap(), f);
    }

    #[test]
    fn display_form() {
        assert_eq!(rf(&[0, 1], &[1, -2]).to_string(), "x/(1 - 2*x)");
    }
}

use std::fmt;

use crate::field::Field;
use crate::poly::DensePoly;
use crate::quadext::QuadExt;
use crate::ratfunc::RationalFunction;
use crate::{Result, SymbolicError};

type TPoly = DensePoly<RationalFunction>;

/// A rational function in `t` over `Q(x)`, stored as `num(t)/den(t)`.
///
/// Arithmetic does not cancel common factors; [`BivariateRF::reduce`] does,
/// and evaluation reduces on demand when it hits an apparent pole. Equality
/// is mathematical (cross-multiplication), not structural.
///
/// This is the coefficient ring of the catalytic equations: the unknown
/// `A(t) = Σ F_i t^i` of a family is a combination of such functions.
#[derive(Clone)]
pub struct BivariateRF {
    num: TPoly,
    den: TPoly,
}

impl BivariateRF {
    /// Cancels `gcd(num, den)` and makes the denominator monic.
    pub fn reduce(&self) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        let (num, den) = if self.den.degree() == Some(0) || self.num.degree() == Some(0) {
            (self.num.clone(), self.den.clone())
        } else {
            let g = self.num.gcd_euclid(&self.den);
            if g.degree() == Some(0) {
                (self.num.clone(), self.den.clone())
            } else {
                (self.num.div_exact(&g).expect("gcd divides"), self.den.div_exact(&g).expect("gcd divides"))
            }
        };
        let inv = den.lc().and_then(Field::inv).expect("non-zero denominator");
        Self { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn zero() -> Self {
        Self { num: TPoly::zero(), den: TPoly::one() }
    }

    pub fn one() -> Self {
        Self::constant(RationalFunction::one())
    }

    /// A function of `x` alone.
    pub fn constant(c: RationalFunction) -> Self {
        Self { num: TPoly::constant(c), den: TPoly::one() }
    }

    /// The catalytic variable `t`.
    pub fn t() -> Self {
        Self { num: TPoly::var(), den: TPoly::one() }
    }

    pub fn from_t_poly(p: TPoly) -> Self {
        Self { num: p, den: TPoly::one() }
    }

    pub fn from_parts(num: TPoly, den: TPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(SymbolicError::DivisionByZero);
        }
        Ok(Self { num, den })
    }

    pub fn num(&self) -> &TPoly {
        &self.num
    }

    pub fn den(&self) -> &TPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Value at `t = 0`.
    pub fn eval_t0(&self) -> Result<RationalFunction> {
        if self.den.coeff(0).is_zero() && !self.is_zero() {
            let r = self.reduce();
            if !r.den.coeff(0).is_zero() {
                return r.eval_t0();
            }
        }
        let d = self.den.coeff(0);
        if d.is_zero() {
            return Err(SymbolicError::PoleAtEvaluationPoint("t = 0".into()));
        }
        Ok(&self.num.coeff(0) / &d)
    }

    /// `[t^j]` of the Taylor expansion at `t = 0`.
    pub fn coeff_t(&self, j: usize) -> Result<RationalFunction> {
        if self.den.coeff(0).is_zero() && !self.is_zero() {
            let r = self.reduce();
            if !r.den.coeff(0).is_zero() {
                return r.coeff_t(j);
            }
        }
        let d0 = self.den.coeff(0);
        let inv0 = d0.inv().map_err(|_| SymbolicError::PoleAtEvaluationPoint("t = 0".into()))?;
        let mut out: Vec<RationalFunction> = Vec::with_capacity(j + 1);
        for n in 0..=j {
            let mut acc = self.num.coeff(n);
            for k in 1..=n.min(self.den.coeffs().len().saturating_sub(1)) {
                acc = &acc - &(&self.den.coeff(k) * &out[n - k]);
            }
            out.push(&acc * &inv0);
        }
        Ok(out.pop().expect("non-empty"))
    }

    /// `(f(t) - f(0)) / t`.
    pub fn drop_constant_div_t(&self) -> Result<Self> {
        let base = if self.den.coeff(0).is_zero() { self.reduce() } else { self.clone() };
        let c = Self::constant(base.eval_t0()?);
        let diff = Field::sub(&base, &c);
        Ok(Self { num: diff.num.shift_down(1), den: diff.den })
    }

    /// Substitutes `t -> x` style values: evaluates at an element of `Q(x)`.
    pub fn eval_rf(&self, at: &RationalFunction) -> Result<RationalFunction> {
        let d = self.den.eval(at);
        if d.is_zero() && !self.is_zero() {
            let r = self.reduce();
            if r.den.degree() < self.den.degree() {
                return r.eval_rf(at);
            }
        }
        if d.is_zero() {
            return Err(SymbolicError::PoleAtEvaluationPoint(format!("t = {at}")));
        }
        Ok(&self.num.eval(at) / &d)
    }

    /// Evaluates at an element of a quadratic extension of `Q(x)`.
    pub fn eval_quad(&self, at: &QuadExt) -> Result<QuadExt> {
        let horner = |p: &TPoly| -> Result<QuadExt> {
            let mut acc = QuadExt::zero();
            for c in p.coeffs().iter().rev() {
                acc = acc.try_mul(at)?.try_add(&QuadExt::from_rf(c.clone()))?;
            }
            Ok(acc)
        };
        let d = horner(&self.den)?;
        if Field::is_zero(&d) && !self.is_zero() {
            let r = self.reduce();
            if r.den.degree() < self.den.degree() {
                return r.eval_quad(at);
            }
        }
        if Field::is_zero(&d) {
            return Err(SymbolicError::PoleAtEvaluationPoint("t = kernel root".into()));
        }
        horner(&self.num)?.try_mul(&d.try_inv()?)
    }

    /// Numerator of `self` viewed as a polynomial in `t` after clearing the
    /// denominator, i.e. `num(t)`.
    pub fn numerator_poly(&self) -> &TPoly {
        &self.num
    }
}

impl PartialEq for BivariateRF {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Field for BivariateRF {
    fn zero() -> Self {
        BivariateRF::zero()
    }
    fn one() -> Self {
        BivariateRF::one()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return Self { num: self.num.add(&rhs.num), den: self.den.clone() };
        }
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        Self { num, den: self.den.mul(&rhs.den) }
    }
    fn sub(&self, rhs: &Self) -> Self {
        Field::add(self, &Field::neg(rhs))
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.mul(&rhs.num), den: self.den.mul(&rhs.den) }
    }
    fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self { num: self.den.clone(), den: self.num.clone() })
    }
}

impl fmt::Debug for BivariateRF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &TPoly| {
            let terms: Vec<String> = p
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| match i {
                    0 => format!("({c})"),
                    1 => format!("({c})*t"),
                    _ => format!("({c})*t^{i}"),
                })
                .collect();
            if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join(" + ")
            }
        };
        let r = self.reduce();
        write!(f, "[{}] / [{}]", show(&r.num), show(&r.den))
    }
}

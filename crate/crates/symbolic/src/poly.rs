use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::field::{Field, Rat};

/// Dense univariate polynomial over a field, coefficients in ascending degree.
///
/// The coefficient vector never carries trailing zeros, so the zero
/// polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DensePoly<F> {
    coeffs: Vec<F>,
}

/// Polynomial in `x` over `Q`.
pub type Poly = DensePoly<Rat>;

impl<F: Field> DensePoly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// `c * var^deg`
    pub fn monomial(c: F, deg: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![F::zero(); deg + 1];
        coeffs[deg] = c;
        Self { coeffs }
    }

    /// The variable itself.
    pub fn var() -> Self {
        Self::monomial(F::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }

    /// Leading coefficient.
    pub fn lc(&self) -> Option<&F> {
        self.coeffs.last()
    }

    /// Index of the lowest non-zero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i).add(&rhs.coeff(i))).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i).sub(&rhs.coeff(i))).collect())
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(Field::neg).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Multiplies by `var^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![F::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Divides by `var^k`, dropping the low coefficients. Exact only when the
    /// valuation is at least `k`.
    pub fn shift_down(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division; `None` when dividing by zero.
    pub fn div_rem(&self, d: &Self) -> Option<(Self, Self)> {
        let dd = d.degree()?;
        let inv_lc = d.lc()?.inv()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Some((Self::zero(), self.clone()));
        }
        let mut quot = vec![F::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd].mul(&inv_lc);
            if c.is_zero() {
                continue;
            }
            for (j, b) in d.coeffs.iter().enumerate() {
                rem[i + j] = rem[i + j].sub(&c.mul(b));
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Some((Self::new(quot), Self::new(rem)))
    }

    /// Exact quotient, `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d)?;
        r.is_zero().then_some(q)
    }

    pub fn eval(&self, at: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(at).add(c);
        }
        acc
    }

    pub fn monic(&self) -> Self {
        match self.lc().and_then(Field::inv) {
            Some(inv) => self.scale(&inv),
            None => Self::zero(),
        }
    }

    /// Monic gcd by the Euclidean algorithm. Suitable for coefficient fields
    /// where growth is not an issue; over `Q` prefer [`Poly::gcd`].
    pub fn gcd_euclid(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("non-zero divisor");
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> DensePoly<G> {
        DensePoly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<'a, F: Field> Add<&'a DensePoly<F>> for &'a DensePoly<F> {
    type Output = DensePoly<F>;
    fn add(self, rhs: &'a DensePoly<F>) -> DensePoly<F> {
        DensePoly::add(self, rhs)
    }
}

impl<'a, F: Field> Sub<&'a DensePoly<F>> for &'a DensePoly<F> {
    type Output = DensePoly<F>;
    fn sub(self, rhs: &'a DensePoly<F>) -> DensePoly<F> {
        DensePoly::sub(self, rhs)
    }
}

impl<'a, F: Field> Mul<&'a DensePoly<F>> for &'a DensePoly<F> {
    type Output = DensePoly<F>;
    fn mul(self, rhs: &'a DensePoly<F>) -> DensePoly<F> {
        DensePoly::mul(self, rhs)
    }
}

impl<F: Field> Neg for &DensePoly<F> {
    type Output = DensePoly<F>;
    fn neg(self) -> DensePoly<F> {
        DensePoly::neg(self)
    }
}

impl Poly {
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        Self::new(coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    /// Splits `self = content * primitive` where `primitive` has coprime
    /// integer coefficients and positive leading coefficient.
    pub fn integer_primitive(&self) -> (Rat, Vec<BigInt>) {
        if self.is_zero() {
            return (<Rat as Zero>::zero(), Vec::new());
        }
        let lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &lcm).to_integer()).collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if ints.last().is_some_and(|c| c.is_negative()) {
            g = -g;
        }
        let prim = ints.iter().map(|c| c / &g).collect();
        (BigRational::new(g, lcm), prim)
    }

    /// Monic gcd computed with a primitive pseudo-remainder sequence over `Z`,
    /// which keeps intermediate coefficients small.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        let (_, mut a) = self.integer_primitive();
        let (_, mut b) = other.integer_primitive();
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = pseudo_rem(&a, &b);
            a = b;
            b = int_primitive(r);
        }
        Poly::from_bigints(&a).monic()
    }

    /// Exact square root in `Q[x]`, if one exists.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let deg = self.degree()?;
        if deg % 2 == 1 {
            return None;
        }
        let v = self.valuation()?;
        if v % 2 == 1 {
            return None;
        }
        let lead = rat_sqrt(self.lc()?)?;
        // Solve from the top down: r = lead x^{d/2} + ...
        let half = deg / 2;
        let mut root = vec![<Rat as Zero>::zero(); half + 1];
        root[half] = lead.clone();
        let two_lead = &lead + &lead;
        for k in (0..half).rev() {
            // coefficient of x^{half + k} in root^2 must match self
            let mut acc = <Rat as Zero>::zero();
            for i in (k + 1)..=half {
                let j = half + k - i;
                if j <= half && j > k {
                    acc += &root[i] * &root[j];
                }
            }
            root[k] = (self.coeff(half + k) - acc) / &two_lead;
        }
        let r = Poly::new(root);
        (r.mul(&r) == *self).then_some(r)
    }

    /// Integer coefficients of `self`, if all coefficients are integral.
    pub fn to_bigints(&self) -> Option<Vec<BigInt>> {
        self.coeffs.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }
}

pub(crate) fn rat_sqrt(q: &Rat) -> Option<Rat> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

fn int_primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return v;
    }
    v.iter().map(|c| c / &g).collect()
}

/// Pseudo-remainder of `a` by `b` over `Z`: `lc(b)^(deg a - deg b + 1) a mod b`.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (j, bj) in b.iter().enumerate() {
            r[dr - db + j] -= &lr * bj;
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

impl fmt::Debug for DensePoly<Rat> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DensePoly<Rat> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(f, &self.coeffs, "x")
    }
}

pub(crate) fn fmt_poly(f: &mut fmt::Formatter<'_>, coeffs: &[Rat], var: &str) -> fmt::Result {
    if coeffs.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate() {
        if Zero::is_zero(c) {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { " - " } else { " + " })?;
        }
        first = false;
        let show_coeff = i == 0 || !One::is_one(&mag);
        if show_coeff {
            if mag.is_integer() {
                write!(f, "{}", mag.numer())?;
            } else {
                write!(f, "{}/{}", mag.numer(), mag.denom())?;
            }
        }
        match i {
            0 => {}
            1 => write!(f, "{}{var}", if show_coeff { "*" } else { "" })?,
            _ => write!(f, "{}{var}^{i}", if show_coeff { "*" } else { "" })?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_of_products() {
        let a = Poly::from_ints(&[1, -1]); // 1 - x
        let b = Poly::from_ints(&[1, -3]); // 1 - 3x
        let c = Poly::from_ints(&[2, 0, 5]);
        let g = a.mul(&b).mul(&c).gcd(&a.mul(&c));
        assert_eq!(g, a.mul(&c).monic());
    }

    #[test]
    fn gcd_coprime_is_one() {
        let a = Poly::from_ints(&[1, -2]);
        let b = Poly::from_ints(&[1, -1, -1]);
        assert!(a.gcd(&b).is_one());
    }

    #[test]
    fn euclid_agrees_with_prs() {
        let a = Poly::from_ints(&[3, 1, -4, 1, 5]);
        let b = Poly::from_ints(&[-2, 7, 1]);
        let p = a.mul(&b);
        let q = b.mul(&Poly::from_ints(&[9, 0, 2]));
        assert_eq!(p.gcd(&q), p.gcd_euclid(&q));
    }

    #[test]
    fn division_round_trip() {
        let a = Poly::from_ints(&[5, 0, 3, 1, 8]);
        let d = Poly::from_ints(&[1, 2, 3]);
        let (q, r) = a.div_rem(&d).unwrap();
        assert_eq!(q.mul(&d).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn square_roots() {
        let p = Poly::from_ints(&[1, -2, 3]);
        assert_eq!(p.mul(&p).sqrt(), Some(p.clone()));
        assert_eq!(Poly::from_ints(&[1, -4]).sqrt(), None);
        let shifted = p.mul(&p).shift_up(2);
        assert_eq!(shifted.sqrt(), Some(p.shift_up(1)));
    }

    #[test]
    fn display() {
        assert_eq!(Poly::from_ints(&[0, 1, -2]).to_string(), "x - 2*x^2");
        assert_eq!(Poly::from_ints(&[-1]).to_string(), "-1");
    }
}

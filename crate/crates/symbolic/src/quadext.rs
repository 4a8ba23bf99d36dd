use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::field::{rat, Rat};
use crate::poly::Poly;
use crate::ratfunc::RationalFunction;
use crate::series::PowerSeries;
use crate::{Result, SymbolicError};

/// A quadratic `c2(x) T^2 + c1(x) T + c0(x)` over `Q[x]` together with the
/// power-series root `θ(x)` it singles out.
///
/// The root is pinned down by its value at `x = 0` (`seed`), which must be a
/// simple root of the quadratic reduced at `x = 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadContext {
    minpoly: [Poly; 3],
    seed: Rat,
    a_loops: Option<u32>,
}

impl QuadContext {
    /// Normalizes the coefficients (primitive integer polynomials, common
    /// powers of `x` removed, first non-zero coefficient of the leading term
    /// positive) and checks the seed.
    pub fn new(minpoly: [Poly; 3], seed: Rat, a_loops: Option<u32>) -> Result<Self> {
        if minpoly[2].is_zero() {
            return Err(SymbolicError::Unsupported("minimal polynomial is not quadratic".into()));
        }
        let minpoly = normalize_triple(minpoly);
        let ctx = Self { minpoly, seed, a_loops };
        let [c0, c1, c2] = &ctx.minpoly;
        let s = &ctx.seed;
        let at0 = c2.coeff(0) * s * s + c1.coeff(0) * s + c0.coeff(0);
        if !at0.is_zero() {
            return Err(SymbolicError::Unsupported(format!("{s} is not a root of the minimal polynomial at x = 0")));
        }
        if ctx.derivative_at_seed().is_zero() {
            return Err(SymbolicError::Unsupported("root at x = 0 is not simple".into()));
        }
        Ok(ctx)
    }

    /// Values at `x = 0` that lift to a power-series root.
    pub fn simple_seeds(minpoly: &[Poly; 3]) -> Vec<Rat> {
        let [c0, c1, c2] = normalize_triple(minpoly.clone());
        let (a, b, c) = (c2.coeff(0), c1.coeff(0), c0.coeff(0));
        let mut out = Vec::new();
        if a.is_zero() {
            if !b.is_zero() {
                out.push(-c / b);
            }
            return out;
        }
        let disc = &b * &b - rat(4) * &a * &c;
        if disc.is_zero() {
            return out;
        }
        if let Some(r) = crate::poly::rat_sqrt(&disc) {
            let two_a = rat(2) * &a;
            let mut roots = [(-&b - &r) / &two_a, (-&b + &r) / &two_a];
            roots.sort();
            out.extend(roots);
        }
        out
    }

    pub fn minpoly(&self) -> &[Poly; 3] {
        &self.minpoly
    }

    pub fn seed(&self) -> &Rat {
        &self.seed
    }

    /// Number of loops `a` when this is the kernel root of the backward
    /// path-directed family equation.
    pub fn a_loops(&self) -> Option<u32> {
        self.a_loops
    }

    fn derivative_at_seed(&self) -> Rat {
        rat(2) * self.minpoly[2].coeff(0) * &self.seed + self.minpoly[1].coeff(0)
    }

    /// Discriminant `c1^2 - 4 c0 c2`.
    pub fn discriminant(&self) -> Poly {
        let [c0, c1, c2] = &self.minpoly;
        c1.mul(c1).sub(&c0.mul(c2).scale(&rat(4)))
    }

    /// Maclaurin coefficients of the root up to `x^order`.
    pub fn root_series(&self, order: usize) -> PowerSeries {
        let [c0, c1, c2] = &self.minpoly;
        let d_inv = self.derivative_at_seed().recip();
        let mut theta = vec![Rat::zero(); order + 1];
        theta[0] = self.seed.clone();
        for n in 1..=order {
            // [x^n] of c2 θ^2 + c1 θ + c0 with θ_n still zero
            let mut acc = c0.coeff(n);
            for k in 0..=n {
                let t = &theta[n - k];
                if !t.is_zero() {
                    acc += c1.coeff(k) * t;
                }
                let c2k = c2.coeff(k);
                if !c2k.is_zero() {
                    let mut s = Rat::zero();
                    let m = n - k;
                    for i in 0..=m {
                        s += &theta[i] * &theta[m - i];
                    }
                    acc += c2k * s;
                }
            }
            theta[n] = -acc * &d_inv;
        }
        PowerSeries::new(theta)
    }

    fn p_q(&self) -> (RationalFunction, RationalFunction) {
        let [c0, c1, c2] = &self.minpoly;
        let c2 = RationalFunction::from_poly(c2.clone());
        let p = -(&RationalFunction::from_poly(c1.clone()) / &c2);
        let q = -(&RationalFunction::from_poly(c0.clone()) / &c2);
        (p, q)
    }
}

fn normalize_triple(minpoly: [Poly; 3]) -> [Poly; 3] {
    let val = minpoly.iter().filter_map(Poly::valuation).min().unwrap_or(0);
    let shifted: Vec<Poly> = minpoly.iter().map(|p| p.shift_down(val)).collect();
    let lcm = shifted.iter().flat_map(|p| p.coeffs().iter()).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<Vec<BigInt>> = shifted
        .iter()
        .map(|p| p.coeffs().iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect())
        .collect();
    let mut g = ints.iter().flatten().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let lead_first = ints[2].iter().find(|c| !c.is_zero()).expect("quadratic");
    if lead_first.is_negative() {
        g = -g;
    }
    let mut it = ints.into_iter().map(|v| Poly::from_bigints(&v.into_iter().map(|c| c / &g).collect::<Vec<_>>()));
    [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
}

impl fmt::Debug for QuadContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [c0, c1, c2] = &self.minpoly;
        write!(f, "root of ({c2})*T^2 + ({c1})*T + ({c0}) with T(0) = {}", self.seed)
    }
}

/// Kernel root for the backward path-directed equation with `a` loops:
/// the power-series root of `x(1+x-ax) T^2 - (1+x-ax) T + 1`, with `T(0) = 1`.
///
/// For `a = 1` this is the Catalan generating function.
pub fn kernel_t0(a: u32) -> QuadExt {
    let a = a as i64;
    let lin = Poly::from_ints(&[1, 1 - a]);
    let c2 = lin.mul(&Poly::var());
    let c1 = lin.neg();
    let ctx = QuadContext::new([Poly::one(), c1, c2], Rat::one(), Some(a as u32)).expect("valid kernel");
    QuadExt::theta(Arc::new(ctx))
}

/// An element `a + b θ` of `Q(x)(θ)`.
///
/// With no context the element lives in `Q(x)` and `b` is zero.
#[derive(Clone)]
pub struct QuadExt {
    a: RationalFunction,
    b: RationalFunction,
    ctx: Option<Arc<QuadContext>>,
}

impl QuadExt {
    pub fn from_rf(a: RationalFunction) -> Self {
        Self { a, b: RationalFunction::zero(), ctx: None }
    }

    pub fn new(a: RationalFunction, b: RationalFunction, ctx: Arc<QuadContext>) -> Self {
        Self { a, b, ctx: Some(ctx) }.canonical()
    }

    /// The adjoined root itself.
    pub fn theta(ctx: Arc<QuadContext>) -> Self {
        Self { a: RationalFunction::zero(), b: RationalFunction::one(), ctx: Some(ctx) }
    }

    fn canonical(mut self) -> Self {
        if self.b.is_zero() {
            self.ctx = None;
        }
        self
    }

    pub fn rational_part(&self) -> &RationalFunction {
        &self.a
    }

    pub fn irrational_part(&self) -> &RationalFunction {
        &self.b
    }

    pub fn context(&self) -> Option<&Arc<QuadContext>> {
        self.ctx.as_ref()
    }

    /// The value as an element of `Q(x)`, if it has no `θ` component.
    pub fn as_rational(&self) -> Option<&RationalFunction> {
        self.b.is_zero().then_some(&self.a)
    }

    fn join(&self, rhs: &Self) -> Result<Option<Arc<QuadContext>>> {
        match (&self.ctx, &rhs.ctx) {
            (None, c) | (c, None) => Ok(c.clone()),
            (Some(a), Some(b)) if Arc::ptr_eq(a, b) || a == b => Ok(Some(a.clone())),
            _ => Err(SymbolicError::ExtensionMismatch),
        }
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        let ctx = self.join(rhs)?;
        Ok(Self { a: &self.a + &rhs.a, b: &self.b + &rhs.b, ctx }.canonical())
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        let ctx = self.join(rhs)?;
        let Some(c) = &ctx else {
            return Ok(Self::from_rf(&self.a * &rhs.a));
        };
        let (p, q) = c.p_q();
        let bd = &self.b * &rhs.b;
        let a = &(&self.a * &rhs.a) + &(&bd * &q);
        let b = &(&(&self.a * &rhs.b) + &(&self.b * &rhs.a)) + &(&bd * &p);
        Ok(Self { a, b, ctx }.canonical())
    }

    /// `a^2 + a b p - b^2 q`, the product with the conjugate.
    pub fn norm(&self) -> RationalFunction {
        match &self.ctx {
            None => &self.a * &self.a,
            Some(c) => {
                let (p, q) = c.p_q();
                let ab = &self.a * &self.b;
                &(&(&self.a * &self.a) + &(&ab * &p)) - &(&(&self.b * &self.b) * &q)
            }
        }
    }

    pub fn try_inv(&self) -> Result<Self> {
        let Some(c) = &self.ctx else {
            return Ok(Self::from_rf(self.a.inv()?));
        };
        let n = self.norm().inv()?;
        let (p, _) = c.p_q();
        let a = &(&self.a + &(&self.b * &p)) * &n;
        let b = -(&self.b * &n);
        Ok(Self { a, b, ctx: self.ctx.clone() }.canonical())
    }

    /// Maclaurin coefficients up to `x^order`. The parts `a` and `b` may have
    /// poles at 0 as long as they cancel in `a + b θ`.
    pub fn series_expand(&self, order: usize) -> Result<PowerSeries> {
        let Some(ctx) = &self.ctx else {
            return self.a.series_expand(order);
        };
        let va = self.a.valuation().unwrap_or(0);
        let vb = self.b.valuation().unwrap_or(0);
        let low = va.min(vb).min(0);
        let extra = (-low) as usize;
        let len = order + 1 + extra;
        // Everything as coefficient vectors starting at x^low.
        let place = |rf: &RationalFunction| -> Vec<Rat> {
            let mut out = vec![Rat::zero(); len];
            if rf.is_zero() {
                return out;
            }
            let (v, c) = rf.laurent_expand(len);
            let off = (v - low) as usize;
            for (i, ci) in c.into_iter().enumerate() {
                if off + i < len {
                    out[off + i] = ci;
                }
            }
            out
        };
        let a = place(&self.a);
        let b = place(&self.b);
        let theta = ctx.root_series(len - 1);
        let mut total = a;
        for i in 0..len {
            if b[i].is_zero() {
                continue;
            }
            for j in 0..len - i {
                total[i + j] += &b[i] * theta.coeff(j);
            }
        }
        if total[..extra].iter().any(|c| !c.is_zero()) {
            return Err(SymbolicError::NonUnitDenominator);
        }
        Ok(PowerSeries::new(total[extra..].to_vec()))
    }

    /// Coefficients `[P0, P1, P2]` of a relation `P2 y^2 + P1 y + P0 = 0`
    /// satisfied by this element, as primitive integer polynomials.
    /// Rational elements give `P2 = 0`.
    pub fn minimal_relation(&self) -> [Poly; 3] {
        let Some(ctx) = &self.ctx else {
            let mut t = [self.a.num().neg(), self.a.den().clone(), Poly::zero()];
            t = clear_triple(t);
            return t;
        };
        let [c0, c1, c2] = ctx.minpoly.clone().map(RationalFunction::from_poly);
        let (a, b) = (&self.a, &self.b);
        let p2 = c2.clone();
        let p1 = &(&c1 * b) - &(&(&c2 * a) * &RationalFunction::from_int(2));
        let p0 = &(&(&c2 * a) * a) - &(&(&(&c1 * a) * b) - &(&(&c0 * b) * b));
        let den_lcm = [&p0, &p1, &p2].iter().fold(Poly::one(), |acc, r| {
            let g = acc.gcd(r.den());
            acc.mul(r.den()).div_exact(&g).expect("gcd divides")
        });
        let to_poly = |r: &RationalFunction| r.num().mul(&den_lcm.div_exact(r.den()).expect("lcm"));
        clear_triple([to_poly(&p0), to_poly(&p1), to_poly(&p2)])
    }

    /// Maps `x -> x` and evaluates; convenience for displaying the element.
    pub fn describe(&self) -> String {
        match &self.ctx {
            None => self.a.to_string(),
            Some(c) => format!("{} + ({})*T where T = {:?}", self.a, self.b, c),
        }
    }
}

fn clear_triple(t: [Poly; 3]) -> [Poly; 3] {
    if t.iter().all(Poly::is_zero) {
        return t;
    }
    let lcm = t.iter().flat_map(|p| p.coeffs().iter()).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<Vec<BigInt>> = t
        .iter()
        .map(|p| p.coeffs().iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect())
        .collect();
    let mut g = ints.iter().flatten().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let lead = ints.iter().rev().flat_map(|v| v.iter().rev()).find(|c| !c.is_zero()).expect("non-zero");
    if lead.is_negative() {
        g = -g;
    }
    let mut it = ints.into_iter().map(|v| Poly::from_bigints(&v.into_iter().map(|c| c / &g).collect::<Vec<_>>()));
    [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        if self.a != other.a || self.b != other.b {
            return false;
        }
        match (&self.ctx, &other.ctx) {
            (Some(x), Some(y)) => Arc::ptr_eq(x, y) || x == y,
            (None, None) => true,
            _ => false,
        }
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Mixing elements of two different extensions is a programming error and
/// panics; use the `try_*` methods to handle it.
impl crate::field::Field for QuadExt {
    fn zero() -> Self {
        Self::from_rf(RationalFunction::zero())
    }
    fn one() -> Self {
        Self::from_rf(RationalFunction::one())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        self.try_add(rhs).expect("same extension")
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.try_add(&crate::field::Field::neg(rhs)).expect("same extension")
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("same extension")
    }
    fn neg(&self) -> Self {
        Self { a: -&self.a, b: -&self.b, ctx: self.ctx.clone() }
    }
    fn inv(&self) -> Option<Self> {
        self.try_inv().ok()
    }
}

impl From<RationalFunction> for QuadExt {
    fn from(a: RationalFunction) -> Self {
        Self::from_rf(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    const CATALAN: [u64; 20] = [
        1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786, 208012, 742900, 2674440, 9694845, 35357670, 129644790,
        477638700, 1767263190,
    ];

    #[test]
    fn catalan_kernel_root() {
        let t0 = kernel_t0(1);
        let s = t0.series_expand(19).unwrap();
        let want: Vec<BigInt> = CATALAN.iter().map(|&c| BigInt::from(c)).collect();
        assert_eq!(s.to_integers().unwrap(), want);
    }

    #[test]
    fn theta_satisfies_its_relation() {
        for a in 0..4 {
            let t0 = kernel_t0(a);
            let ctx = t0.context().unwrap().clone();
            let [c0, c1, c2] = ctx.minpoly().clone().map(|p| QuadExt::from_rf(RationalFunction::from_poly(p)));
            let r = c2.mul(&t0).mul(&t0).add(&c1.mul(&t0)).add(&c0);
            assert!(r.is_zero(), "a = {a}");
        }
    }

    #[test]
    fn inverse_and_series_agree() {
        let t0 = kernel_t0(2);
        let y = t0.add(&QuadExt::from_rf(RationalFunction::x()));
        let inv = y.inv().unwrap();
        assert!(y.mul(&inv).is_one());
        let prod = y.series_expand(10).unwrap().mul(&inv.series_expand(10).unwrap());
        assert_eq!(prod, PowerSeries::one(10));
    }

    #[test]
    fn cancelling_poles() {
        // (T - 1)/x has a pole in each part but not overall; for a = 1 it is C(x)^2.
        let t0 = kernel_t0(1);
        let xinv = QuadExt::from_rf(RationalFunction::x_pow(-1));
        let y = t0.sub(&QuadExt::one()).mul(&xinv);
        let s = y.series_expand(5).unwrap();
        assert_eq!(s, PowerSeries::from_integers([1, 2, 5, 14, 42, 132]));
    }

    #[test]
    fn relation_of_shifted_root() {
        // y = T - 1 + x^3 satisfies a relation whose series check holds.
        let t0 = kernel_t0(1);
        let y = t0.add(&QuadExt::from_rf(RationalFunction::from_ints(&[-1, 0, 0, 1], &[1]).unwrap()));
        let [p0, p1, p2] = y.minimal_relation();
        let s = y.series_expand(12).unwrap();
        let ps = |p: &Poly| PowerSeries::new((0..=12).map(|i| p.coeff(i)).collect());
        let r = ps(&p2).mul(&s).mul(&s).add(&ps(&p1).mul(&s)).add(&ps(&p0));
        assert!(r.is_zero());
        assert_eq!(p2, Poly::from_ints(&[0, 1]));
    }

    #[test]
    fn seeds() {
        let mp = [Poly::one(), Poly::from_ints(&[-1]), Poly::from_ints(&[0, 1])];
        assert_eq!(QuadContext::simple_seeds(&mp), vec![rat(1)]);
    }
}

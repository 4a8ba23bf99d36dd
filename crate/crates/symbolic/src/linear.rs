use std::collections::BTreeMap;
use std::fmt;

use crate::field::Field;
use crate::{Result, SymbolicError};

/// A scalar unknown in a linear system.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Unknown(pub u32);

impl fmt::Debug for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}", self.0)
    }
}

/// `constant + Σ coeff_u * u` with coefficients in `C`.
#[derive(Clone, PartialEq)]
pub struct LinearForm<C: Field> {
    pub constant: C,
    pub terms: BTreeMap<Unknown, C>,
}

impl<C: Field> LinearForm<C> {
    pub fn zero() -> Self {
        Self { constant: C::zero(), terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        Self { constant: c, terms: BTreeMap::new() }
    }

    pub fn unknown(u: Unknown) -> Self {
        Self::term(u, C::one())
    }

    pub fn term(u: Unknown, c: C) -> Self {
        let mut f = Self::zero();
        f.add_term(u, c);
        f
    }

    pub fn add_term(&mut self, u: Unknown, c: C) {
        let slot = self.terms.entry(u).or_insert_with(C::zero);
        *slot = slot.add(&c);
        if slot.is_zero() {
            self.terms.remove(&u);
        }
    }

    pub fn coeff(&self, u: Unknown) -> C {
        self.terms.get(&u).cloned().unwrap_or_else(C::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.constant = out.constant.add(&rhs.constant);
        for (u, c) in &rhs.terms {
            out.add_term(*u, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&C::one().neg()))
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { constant: self.constant.mul(c), terms: self.terms.iter().map(|(u, v)| (*u, v.mul(c))).collect() }
    }

    pub fn map<D: Field>(&self, f: impl Fn(&C) -> D) -> LinearForm<D> {
        let mut out = LinearForm::constant(f(&self.constant));
        for (u, c) in &self.terms {
            out.add_term(*u, f(c));
        }
        out
    }

    pub fn try_map<D: Field, E>(&self, f: impl Fn(&C) -> Result<D, E>) -> Result<LinearForm<D>, E> {
        let mut out = LinearForm::constant(f(&self.constant)?);
        for (u, c) in &self.terms {
            out.add_term(*u, f(c)?);
        }
        Ok(out)
    }

    /// Value once every unknown is assigned.
    pub fn evaluate(&self, values: &BTreeMap<Unknown, C>) -> Result<C> {
        let mut acc = self.constant.clone();
        for (u, c) in &self.terms {
            let v = values.get(u).ok_or(SymbolicError::UndeclaredUnknown(*u))?;
            acc = acc.add(&c.mul(v));
        }
        Ok(acc)
    }

    /// Replaces `u` by a form.
    pub fn substitute(&self, u: Unknown, by: &Self) -> Self {
        match self.terms.get(&u) {
            None => self.clone(),
            Some(c) => {
                let mut rest = self.clone();
                rest.terms.remove(&u);
                rest.add(&by.scale(c))
            }
        }
    }
}

impl<C: Field> fmt::Debug for LinearForm<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.constant)?;
        for (u, c) in &self.terms {
            write!(f, " + ({c:?})*{u:?}")?;
        }
        Ok(())
    }
}

/// Solves `form_i = 0` for the declared unknowns by fraction-free (Bareiss)
/// elimination with row pivoting. The system must be square and
/// non-singular; the solution is substituted back and checked before it is
/// returned.
pub fn solve_linear_system<C: Field>(
    equations: &[LinearForm<C>],
    unknowns: &[Unknown],
) -> Result<BTreeMap<Unknown, C>> {
    let n = unknowns.len();
    if equations.len() != n {
        return Err(SymbolicError::NotSquare { equations: equations.len(), unknowns: n });
    }
    let index: BTreeMap<Unknown, usize> = unknowns.iter().enumerate().map(|(i, u)| (*u, i)).collect();
    // augmented matrix [A | -b]
    let mut m: Vec<Vec<C>> = Vec::with_capacity(n);
    for eq in equations {
        let mut row = vec![C::zero(); n + 1];
        for (u, c) in &eq.terms {
            let &j = index.get(u).ok_or(SymbolicError::UndeclaredUnknown(*u))?;
            row[j] = c.clone();
        }
        row[n] = eq.constant.neg();
        m.push(row);
    }
    let mut prev = C::one();
    for k in 0..n {
        let p = (k..n).find(|&i| !m[i][k].is_zero()).ok_or(SymbolicError::SingularSystem)?;
        m.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = v.div(&prev).ok_or(SymbolicError::DivisionByZero)?;
            }
            m[i][k] = C::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x = vec![C::zero(); n];
    for i in (0..n).rev() {
        let mut acc = m[i][n].clone();
        for j in i + 1..n {
            acc = acc.sub(&m[i][j].mul(&x[j]));
        }
        x[i] = acc.div(&m[i][i]).ok_or(SymbolicError::SingularSystem)?;
    }
    let sol: BTreeMap<Unknown, C> = unknowns.iter().copied().zip(x).collect();
    for eq in equations {
        if !eq.evaluate(&sol)?.is_zero() {
            return Err(SymbolicError::Unsupported("solution fails residual check".into()));
        }
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, Rat};

    #[test]
    fn two_by_two() {
        // u0 + 2 u1 = 5, 3 u0 - u1 = 1 -> u0 = 1, u1 = 2
        let (u0, u1) = (Unknown(0), Unknown(1));
        let mut e1 = LinearForm::<Rat>::constant(rat(-5));
        e1.add_term(u0, rat(1));
        e1.add_term(u1, rat(2));
        let mut e2 = LinearForm::<Rat>::constant(rat(-1));
        e2.add_term(u0, rat(3));
        e2.add_term(u1, rat(-1));
        let s = solve_linear_system(&[e1, e2], &[u0, u1]).unwrap();
        assert_eq!(s[&u0], rat(1));
        assert_eq!(s[&u1], rat(2));
    }

    #[test]
    fn needs_pivot() {
        let (u0, u1) = (Unknown(0), Unknown(1));
        let e1 = LinearForm::<Rat>::unknown(u1).sub(&LinearForm::constant(rat(3)));
        let e2 = LinearForm::<Rat>::unknown(u0).sub(&LinearForm::constant(rat(4)));
        let s = solve_linear_system(&[e1, e2], &[u0, u1]).unwrap();
        assert_eq!(s[&u0], rat(4));
        assert_eq!(s[&u1], rat(3));
    }

    #[test]
    fn singular_and_shape_errors() {
        let u0 = Unknown(0);
        let e = LinearForm::<Rat>::constant(rat(1));
        assert_eq!(solve_linear_system(std::slice::from_ref(&e), &[u0]), Err(SymbolicError::SingularSystem));
        assert_eq!(
            solve_linear_system(&[e.clone(), e], &[u0]),
            Err(SymbolicError::NotSquare { equations: 2, unknowns: 1 })
        );
        let stray = LinearForm::<Rat>::unknown(Unknown(7));
        assert_eq!(solve_linear_system(&[stray], &[u0]), Err(SymbolicError::UndeclaredUnknown(Unknown(7))));
    }
}

use num_traits::Zero;

use crate::field::Rat;
use crate::poly::Poly;
use crate::ratfunc::RationalFunction;
use crate::series::PowerSeries;

/// Coefficients held back from fitting and used only to confirm a fit.
pub const RESERVE_COEFFICIENTS: usize = 4;

/// `P0 + P1 G + P2 G^2 = 0`, with primitive integer coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicRelation {
    pub p0: Poly,
    pub p1: Poly,
    pub p2: Poly,
}

impl AlgebraicRelation {
    /// Whether the relation holds on every coefficient of `series`.
    pub fn holds_on(&self, series: &PowerSeries) -> bool {
        let n = series.order();
        let as_series = |p: &Poly| PowerSeries::new((0..=n).map(|i| p.coeff(i)).collect());
        let g = series;
        let r = as_series(&self.p2).mul(g).mul(g).add(&as_series(&self.p1).mul(g)).add(&as_series(&self.p0));
        r.is_zero()
    }

    /// `P2 = 0`: the series is rational, `G = -P0/P1`.
    pub fn as_rational(&self) -> Option<RationalFunction> {
        if !self.p2.is_zero() || self.p1.is_zero() {
            return None;
        }
        RationalFunction::new(self.p0.neg(), self.p1.clone()).ok()
    }
}

/// Least-degree `N/D` with `deg N, deg D <= max_deg` whose expansion agrees
/// with `series`. The fit uses all but the last [`RESERVE_COEFFICIENTS`]
/// coefficients; those must then agree as well.
pub fn pade_reconstruct(series: &PowerSeries, max_deg: usize) -> Option<RationalFunction> {
    let len = series.coeffs().len();
    let fit = len.checked_sub(RESERVE_COEFFICIENTS)?;
    for total in 0..=2 * max_deg {
        if total + 1 > fit {
            break;
        }
        for q in 0..=total.min(max_deg) {
            let p = total - q;
            if p > max_deg {
                continue;
            }
            // unknowns: D_0..D_q, then N_0..N_p
            let cols = q + 1 + p + 1;
            let rows: Vec<Vec<Rat>> = (0..fit)
                .map(|k| {
                    let mut row = vec![Rat::zero(); cols];
                    for (j, slot) in row.iter_mut().enumerate().take(q + 1) {
                        if j <= k {
                            *slot = series.coeff(k - j);
                        }
                    }
                    if k <= p {
                        row[q + 1 + k] = -Rat::from_integer(1.into());
                    }
                    row
                })
                .collect();
            for v in nullspace(rows, cols) {
                let den = Poly::new(v[..=q].to_vec());
                let num = Poly::new(v[q + 1..].to_vec());
                if den.is_zero() {
                    continue;
                }
                let Ok(f) = RationalFunction::new(num, den) else { continue };
                if let Ok(s) = f.series_expand(len - 1) {
                    if &s == series {
                        return Some(f);
                    }
                }
            }
        }
    }
    None
}

/// A non-trivial relation `P0 + P1 G + P2 G^2 = 0` with each `deg P_i <=
/// max_deg`, found by exact nullspace computation. Relations with `P2 = 0`
/// are preferred at each total degree; any relation must also hold on the
/// reserve coefficients.
pub fn algebraic_fit_deg2(series: &PowerSeries, max_deg: usize) -> Option<AlgebraicRelation> {
    let len = series.coeffs().len();
    let fit = len.checked_sub(RESERVE_COEFFICIENTS)?;
    let g = series.coeffs();
    let g2 = series.mul(series);
    let powers: [&[Rat]; 3] = [&[], g, g2.coeffs()];
    for total in 0..=3 * max_deg {
        // degree triples (d0, d1, d2) summing to `total`, with `None` for P2 = 0
        let mut shapes: Vec<(usize, usize, Option<usize>)> = Vec::new();
        for d1 in 0..=total.min(max_deg) {
            let d0 = total - d1;
            if d0 <= max_deg {
                shapes.push((d0, d1, None));
            }
        }
        for d2 in 0..=total.min(max_deg) {
            for d1 in 0..=(total - d2).min(max_deg) {
                let d0 = total - d1 - d2;
                if d0 <= max_deg {
                    shapes.push((d0, d1, Some(d2)));
                }
            }
        }
        for (d0, d1, d2) in shapes {
            let degs = [Some(d0), Some(d1), d2];
            let cols: usize = degs.iter().flatten().map(|d| d + 1).sum();
            if cols > fit {
                continue;
            }
            let rows: Vec<Vec<Rat>> = (0..fit)
                .map(|k| {
                    let mut row = Vec::with_capacity(cols);
                    for (e, d) in degs.iter().enumerate() {
                        let Some(d) = d else { continue };
                        for i in 0..=*d {
                            let c = if k < i {
                                Rat::zero()
                            } else if e == 0 {
                                if k == i {
                                    Rat::from_integer(1.into())
                                } else {
                                    Rat::zero()
                                }
                            } else {
                                powers[e][k - i].clone()
                            };
                            row.push(c);
                        }
                    }
                    row
                })
                .collect();
            for v in nullspace(rows, cols) {
                let mut it = v.into_iter();
                let mut take = |d: Option<usize>| match d {
                    Some(d) => Poly::new(it.by_ref().take(d + 1).collect()),
                    None => Poly::zero(),
                };
                let (p0, p1, p2) = (take(Some(d0)), take(Some(d1)), take(d2));
                if p1.is_zero() && p2.is_zero() {
                    continue;
                }
                let [p0, p1, p2] = primitive_triple([p0, p1, p2]);
                let rel = AlgebraicRelation { p0, p1, p2 };
                if rel.holds_on(series) {
                    return Some(rel);
                }
            }
        }
    }
    None
}

fn primitive_triple(t: [Poly; 3]) -> [Poly; 3] {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{One, Signed};
    let lcm = t.iter().flat_map(|p| p.coeffs().iter()).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<Vec<BigInt>> = t
        .iter()
        .map(|p| p.coeffs().iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect())
        .collect();
    let mut g = ints.iter().flatten().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let lead = ints.iter().rev().flat_map(|v| v.iter().rev()).find(|c| !c.is_zero());
    if lead.is_some_and(|c| c.is_negative()) {
        g = -g;
    }
    let mut it = ints.into_iter().map(|v| Poly::from_bigints(&v.into_iter().map(|c| c / &g).collect::<Vec<_>>()));
    [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
}

/// Basis of the right nullspace of a rational matrix, via reduced row
/// echelon form.
pub(crate) fn nullspace(mut rows: Vec<Vec<Rat>>, cols: usize) -> Vec<Vec<Rat>> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::from_integer(1.into());
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[i][f].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalan(n: usize) -> Vec<u64> {
        let mut c = vec![1u64];
        for i in 1..n {
            let next = (0..i).map(|j| c[j] * c[i - 1 - j]).sum();
            c.push(next);
        }
        c
    }

    #[test]
    fn geometric() {
        let s = PowerSeries::from_integers([0, 1, 2, 4, 8, 16, 32, 64, 128, 256]);
        let f = pade_reconstruct(&s, 4).unwrap();
        assert_eq!(f, RationalFunction::from_ints(&[0, 1], &[1, -2]).unwrap());
    }

    #[test]
    fn catalan_is_not_rational() {
        let s = PowerSeries::from_integers(catalan(12));
        assert_eq!(pade_reconstruct(&s, 4), None);
    }

    #[test]
    fn fibonacci_like() {
        let f = RationalFunction::from_ints(&[0, 1, -1], &[1, -3, 1]).unwrap();
        let s = f.series_expand(12).unwrap();
        assert_eq!(pade_reconstruct(&s, 6), Some(f));
    }

    #[test]
    fn catalan_minus_one_relation() {
        let mut c: Vec<i64> = catalan(20).into_iter().map(|v| v as i64).collect();
        c[0] -= 1;
        let s = PowerSeries::from_integers(c);
        let rel = algebraic_fit_deg2(&s, 4).unwrap();
        // x G^2 + (2x - 1) G + x = 0
        assert_eq!(rel.p2, Poly::from_ints(&[0, 1]));
        assert_eq!(rel.p1, Poly::from_ints(&[-1, 2]));
        assert_eq!(rel.p0, Poly::from_ints(&[0, 1]));
    }

    #[test]
    fn rational_series_takes_linear_branch() {
        let f = RationalFunction::from_ints(&[0, 1], &[1, -2]).unwrap();
        let s = f.series_expand(14).unwrap();
        let rel = algebraic_fit_deg2(&s, 3).unwrap();
        assert!(rel.p2.is_zero());
        assert_eq!(rel.as_rational(), Some(f));
    }

    #[test]
    fn nullspace_of_rank_one() {
        let one = Rat::from_integer(1.into());
        let two = Rat::from_integer(2.into());
        let ns = nullspace(vec![vec![one.clone(), two.clone()], vec![two.clone(), two.clone() * two.clone()]], 2);
        assert_eq!(ns, vec![vec![-two, one]]);
    }
}

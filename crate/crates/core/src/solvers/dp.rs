use std::collections::BTreeMap;

use num_bigint::BigInt;
use subregular_symbolic::{solve_linear_system, LinearForm, PowerSeries, RationalFunction, Unknown};

use crate::error::Result;
use crate::gentree::TransitionMatrix;
use crate::induction::{ChildRef, CompressedRules};

/// `Σ_n P_n x^n` to order `order` by walking the compressed rules level by
/// level. A family index grows by at most one per level, so only members up
/// to index `order` are ever instantiated.
pub fn series_dp(cr: &CompressedRules, order: usize) -> PowerSeries {
    let mut coeffs = vec![BigInt::from(0); order + 1];
    let mut level: BTreeMap<ChildRef, BigInt> = BTreeMap::new();
    level.insert(cr.root, BigInt::from(1));
    for slot in coeffs.iter_mut().skip(1) {
        *slot = level.values().sum();
        let mut next: BTreeMap<ChildRef, BigInt> = BTreeMap::new();
        for (node, count) in &level {
            for (child, mult) in cr.children_of(*node) {
                *next.entry(child).or_default() += count * BigInt::from(mult);
            }
        }
        level = next;
    }
    PowerSeries::from_integers(coeffs)
}

/// `G = x e_1ᵀ (I - xM)⁻¹ 1`, via `(I - xM) y = 1`. The first class of the
/// matrix is the root.
pub fn solve_finite(matrix: &TransitionMatrix) -> Result<RationalFunction> {
    let n = matrix.order();
    let x = RationalFunction::x();
    let equations: Vec<LinearForm<RationalFunction>> = (0..n)
        .map(|i| {
            let mut eq = LinearForm::constant(RationalFunction::from_int(-1));
            eq.add_term(Unknown(i as u32), RationalFunction::one());
            for (j, &mult) in matrix.entries[i].iter().enumerate() {
                if mult > 0 {
                    eq.add_term(Unknown(j as u32), -(&x * &RationalFunction::from_int(mult as i64)));
                }
            }
            eq
        })
        .collect();
    let unknowns: Vec<Unknown> = (0..n as u32).map(Unknown).collect();
    let sol = solve_linear_system(&equations, &unknowns)?;
    Ok(&x * &sol[&Unknown(0)])
}

//! Functional equations for families and their solution by the kernel method.
//!
//! `F_c` denotes the generating function of the subtree of class `c`, with
//! the class representative weighted `x^{|c|}`; a child of class `c` below a
//! node of length `n` therefore contributes `x^{n+1-|c|} F_c`.
//!
//! For each family `A_f(t) = Σ_i F_{v_i} t^i` satisfies
//!
//! ```text
//! K_f(t) A_f(t) = x^m/(1-xt) + Σ_w x^{m+1-|w|} P_w(xt) F_w
//!               + (cross terms from other families) - c₊ A_f(0)/t
//! K_f(t) = 1 - c₀x - c₋x²t - r x²t/(1-xt) - c₊/t
//! ```
//!
//! where `r`, `c₋`, `c₀`, `c₊` are the self-link multiplicities. Families
//! without a forward self link are solved by division; otherwise `A_f(0)`
//! stays an unknown, pinned down by `RHS_f(t₀) = 0` at the power-series
//! root `t₀` of the kernel.

use std::collections::BTreeMap;
use std::sync::Arc;

use subregular_symbolic::{
    solve_linear_system, BivariateRF, DensePoly, Field, LinearForm, Poly, QuadContext, QuadExt, RationalFunction,
    SymbolicError, Unknown,
};

use crate::error::{Error, Result};
use crate::induction::{ChildRef, CompressedRules, FamilyLink, MultiplicityPoly};

type Form = LinearForm<BivariateRF>;
type RfForm = LinearForm<RationalFunction>;
type QForm = LinearForm<QuadExt>;

/// Generating functions produced by [`solve_families`].
#[derive(Clone, Debug)]
pub struct FamilySolution {
    pub g: QuadExt,
    /// `F_c` for each `W` class and for `v_0`, `v_1` of every family, keyed
    /// by representative.
    pub class_gfs: Vec<(String, QuadExt)>,
    /// The kernel root used for each family with a forward self link.
    pub kernel_roots: Vec<(usize, QuadExt)>,
}

fn unsupported(msg: impl Into<String>) -> Error {
    Error::Symbolic(SymbolicError::Unsupported(msg.into()))
}

fn c(r: RationalFunction) -> BivariateRF {
    BivariateRF::constant(r)
}

fn xpow(e: i64) -> RationalFunction {
    RationalFunction::x_pow(e as i32)
}

fn int(n: u64) -> BivariateRF {
    c(RationalFunction::from_int(n as i64))
}

fn xt() -> BivariateRF {
    c(RationalFunction::x()).mul(&BivariateRF::t())
}

fn inv(b: &BivariateRF) -> Result<BivariateRF> {
    b.inv().ok_or(Error::Symbolic(SymbolicError::DivisionByZero))
}

/// `Σ_i p(i) (xt)^i`.
fn multiplicity_in_xt(p: &MultiplicityPoly) -> Result<BivariateRF> {
    let u = xt();
    let one_minus = BivariateRF::one().sub(&u);
    let mut acc = BivariateRF::zero();
    let mut u_pow = BivariateRF::one();
    let mut denom = one_minus.clone();
    for &a in p.newton() {
        if a != 0 {
            let term = u_pow.mul(&inv(&denom)?).mul(&c(RationalFunction::from_int(a)));
            acc = acc.add(&term);
        }
        u_pow = u_pow.mul(&u);
        denom = denom.mul(&one_minus);
    }
    Ok(acc)
}

fn scale(form: &Form, by: &BivariateRF) -> Form {
    if by.is_zero() {
        return Form::zero();
    }
    form.scale(by)
}

/// Contribution of `link` given the target family's series `a`.
fn cross_terms(link: &FamilyLink, a: &Form) -> Result<Form> {
    let x = c(RationalFunction::x());
    let x2t = c(xpow(2)).mul(&BivariateRF::t());
    let mut out = Form::zero();
    if link.range > 0 {
        let k = x2t.mul(&inv(&BivariateRF::one().sub(&xt()))?).mul(&int(link.range));
        out = out.add(&scale(a, &k));
    }
    if link.minus > 0 {
        out = out.add(&scale(a, &x2t.mul(&int(link.minus))));
    }
    if link.zero > 0 {
        out = out.add(&scale(a, &x.mul(&int(link.zero))));
    }
    if link.plus > 0 {
        let shifted = a.try_map(|k| k.drop_constant_div_t())?;
        out = out.add(&shifted.scale(&int(link.plus)));
    }
    Ok(out)
}

/// Clears denominators of a polynomial in `t` over `Q(x)`.
fn to_poly_coeffs(p: &DensePoly<RationalFunction>) -> Vec<Poly> {
    let mut den = RationalFunction::one();
    for k in p.coeffs() {
        den = &den * &RationalFunction::from_poly(k.den().clone());
    }
    p.coeffs()
        .iter()
        .map(|k| {
            let v = k * &den;
            let d = v.den().coeff(0);
            v.num().scale(&Field::inv(&d).expect("polynomial after clearing"))
        })
        .collect()
}

/// The power-series root of the kernel `k` (with valuation `>= 0` in `x`).
pub fn kernel_root(k: &BivariateRF, a_loops: Option<u32>) -> Result<QuadExt> {
    let r = k.reduce();
    let coeffs = to_poly_coeffs(r.numerator_poly());
    let small = |rf: &RationalFunction| rf.valuation().is_some_and(|v| v >= 0);
    match coeffs.len() {
        2 => {
            let t0 = RationalFunction::new(coeffs[0].neg(), coeffs[1].clone())?;
            if small(&t0) {
                Ok(QuadExt::from_rf(t0))
            } else {
                Err(unsupported(format!("kernel root {t0} is not a power series")))
            }
        }
        3 => {
            let (c0, c1, c2) = (&coeffs[0], &coeffs[1], &coeffs[2]);
            let disc = c1.mul(c1).sub(&c0.mul(c2).scale(&subregular_symbolic::Rat::from_integer(4.into())));
            if let Some(s) = disc.sqrt() {
                let two_c2 = c2.scale(&subregular_symbolic::Rat::from_integer(2.into()));
                for sign in [-1i64, 1] {
                    let num = c1.neg().add(&s.scale(&subregular_symbolic::Rat::from_integer(sign.into())));
                    if num.is_zero() {
                        continue;
                    }
                    let t0 = RationalFunction::new(num, two_c2.clone())?;
                    if small(&t0) {
                        return Ok(QuadExt::from_rf(t0));
                    }
                }
                return Err(unsupported("no power-series root of the kernel"));
            }
            let minpoly = [c0.clone(), c1.clone(), c2.clone()];
            for seed in QuadContext::simple_seeds(&minpoly) {
                if let Ok(ctx) = QuadContext::new(minpoly.clone(), seed, a_loops) {
                    return Ok(QuadExt::theta(Arc::new(ctx)));
                }
            }
            Err(unsupported("kernel has no simple power-series root"))
        }
        n => Err(unsupported(format!("kernel of degree {} in t", n.saturating_sub(1)))),
    }
}

fn family_order(cr: &CompressedRules) -> Result<Vec<usize>> {
    let n = cr.families.len();
    let deps: Vec<Vec<usize>> = cr
        .families
        .iter()
        .enumerate()
        .map(|(f, fam)| fam.rule.links.iter().map(|l| l.target).filter(|&g| g != f).collect())
        .collect();
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n).find(|&f| !done[f] && deps[f].iter().all(|&g| done[g]));
        let Some(f) = next else {
            return Err(unsupported("families depend on each other cyclically"));
        };
        done[f] = true;
        order.push(f);
    }
    Ok(order)
}

/// Solves the compressed rule set for `G = F_root` and the class GFs.
pub fn solve_families(cr: &CompressedRules) -> Result<FamilySolution> {
    let m = cr.m as i64;
    let w_index: BTreeMap<usize, u32> = cr.w.iter().enumerate().map(|(i, &w)| (w, i as u32)).collect();
    let nw = cr.w.len() as u32;
    let z = |f: usize| Unknown(nw + f as u32);
    let len_of = |w: usize| cr.rules.class(w).rep_length() as i64;

    let mut a: Vec<Option<Form>> = vec![None; cr.families.len()];
    let mut kernel_eqs: Vec<QForm> = Vec::new();
    let mut z_unknowns = Vec::new();
    let mut kernel_roots = Vec::new();
    for f in family_order(cr)? {
        let rule = &cr.families[f].rule;
        let one_minus_xt = BivariateRF::one().sub(&xt());
        let mut rhs = Form::constant(c(xpow(m)).mul(&inv(&one_minus_xt)?));
        for (&w, p) in &rule.fixed {
            let coeff = c(xpow(m + 1 - len_of(w))).mul(&multiplicity_in_xt(p)?);
            rhs.add_term(Unknown(w_index[&w]), coeff);
        }
        let mut own = FamilyLink { target: f, range: 0, minus: 0, zero: 0, plus: 0 };
        for link in &rule.links {
            if link.target == f {
                own = link.clone();
            } else {
                let target = a[link.target].as_ref().expect("topological order");
                rhs = rhs.add(&cross_terms(link, target)?);
            }
        }
        let x = c(RationalFunction::x());
        let x2t = c(xpow(2)).mul(&BivariateRF::t());
        let t_inv = inv(&BivariateRF::t())?;
        let kernel = BivariateRF::one()
            .sub(&x.mul(&int(own.zero)))
            .sub(&x2t.mul(&int(own.minus)))
            .sub(&x2t.mul(&inv(&one_minus_xt)?).mul(&int(own.range)))
            .sub(&t_inv.mul(&int(own.plus)));
        if own.plus > 0 {
            rhs.add_term(z(f), t_inv.mul(&int(own.plus)).neg());
            let a_loops = (own.range == 1 && own.minus == 0).then_some(own.zero as u32);
            let t0 = kernel_root(&kernel, a_loops)?;
            let eq = rhs.try_map(|k| k.eval_quad(&t0))?;
            kernel_eqs.push(eq);
            z_unknowns.push(z(f));
            kernel_roots.push((f, t0));
        }
        let k_inv = inv(&kernel)?;
        a[f] = Some(rhs.map(|k| k.mul(&k_inv).reduce()));
    }
    let a: Vec<Form> = a.into_iter().map(|x| x.expect("all families solved")).collect();

    let val = |r: ChildRef| -> Result<RfForm> {
        match r {
            ChildRef::Fixed(w) => Ok(RfForm::unknown(Unknown(w_index[&w]))),
            ChildRef::Member { family, index } => Ok(a[family].try_map(|k| k.coeff_t(index))?),
        }
    };

    let mut equations: Vec<QForm> = Vec::new();
    for &w in &cr.w {
        let lw = len_of(w);
        let mut eq = RfForm::unknown(Unknown(w_index[&w]));
        eq.constant = xpow(lw).neg();
        for &(child, mult) in &cr.w_rules[&w] {
            let lc = cr.len_of(child) as i64;
            let coeff = &xpow(lw + 1 - lc) * &RationalFunction::from_int(mult as i64);
            eq = eq.sub(&val(child)?.scale(&coeff));
        }
        equations.push(eq.map(|k| QuadExt::from_rf(k.clone())));
    }
    equations.extend(kernel_eqs);
    let unknowns: Vec<Unknown> = (0..nw).map(Unknown).chain(z_unknowns).collect();
    let sol = solve_linear_system(&equations, &unknowns)?;
    let eval = |form: &RfForm| -> Result<QuadExt> { Ok(form.map(|k| QuadExt::from_rf(k.clone())).evaluate(&sol)?) };
    let g = eval(&val(cr.root)?)?;

    let mut class_gfs = Vec::new();
    for &w in &cr.w {
        class_gfs.push((cr.rules.class(w).representative.to_string(), sol[&Unknown(w_index[&w])].clone()));
    }
    for (f, fam) in cr.families.iter().enumerate() {
        for index in 0..2 {
            let gf = eval(&val(ChildRef::Member { family: f, index })?)?;
            class_gfs.push((fam.template.instance(index).to_string(), gf));
        }
    }
    Ok(FamilySolution { g, class_gfs, kernel_roots })
}

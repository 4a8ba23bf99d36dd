use num_bigint::BigInt;
use proptest::prelude::*;
use subregular_symbolic::{
    algebraic_fit_deg2, kernel_t0, pade_reconstruct, solve_linear_system, BivariateRF, Field, LinearForm, Poly,
    PowerSeries, QuadExt, RationalFunction, Unknown,
};

fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
    RationalFunction::from_ints(n, d).unwrap()
}

fn small_poly() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-5i64..=5, 1..=4)
}

/// Random element of Q(x) whose denominator does not vanish at 0.
fn small_rf() -> impl Strategy<Value = RationalFunction> {
    (small_poly(), 1i64..=4, prop::collection::vec(-4i64..=4, 0..=3)).prop_map(|(n, d0, rest)| {
        let mut d = vec![d0];
        d.extend(rest);
        rf(&n, &d)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in small_rf(), b in small_rf(), c in small_rf()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, RationalFunction::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), RationalFunction::one());
        }
    }

    #[test]
    fn series_of_product(a in small_rf(), b in small_rf()) {
        let n = 12;
        let lhs = (&a * &b).series_expand(n).unwrap();
        let rhs = a.series_expand(n).unwrap().mul(&b.series_expand(n).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn quadext_field_axioms(a in small_rf(), b in small_rf(), c in small_rf(), loops in 0u32..4) {
        let t0 = kernel_t0(loops);
        let u = QuadExt::from_rf(a.clone()).add(&t0.mul(&QuadExt::from_rf(b.clone())));
        let v = QuadExt::from_rf(c.clone()).add(&t0);
        prop_assert_eq!(u.mul(&v).sub(&v.mul(&u)), QuadExt::zero());
        if !u.is_zero() {
            prop_assert!(u.mul(&u.inv().unwrap()).is_one());
        }
        let n = 10;
        let lhs = u.mul(&v).series_expand(n).unwrap();
        let rhs = u.series_expand(n).unwrap().mul(&v.series_expand(n).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn pade_roundtrip_on_fifty_random_functions() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    for case in 0..50 {
        let dn = rng.gen_range(0..=6);
        let dd = rng.gen_range(0..=6);
        let num: Vec<i64> = (0..=dn).map(|_| rng.gen_range(-6..=6)).collect();
        let mut den: Vec<i64> = (0..=dd).map(|_| rng.gen_range(-6..=6)).collect();
        den[0] = rng.gen_range(1..=3);
        let f = rf(&num, &den);
        let s = f.series_expand(2 * 6 + 2 + 4 + 2).unwrap();
        assert_eq!(pade_reconstruct(&s, 6), Some(f), "case {case}");
    }
}

#[test]
fn kernel_root_residual_vanishes() {
    for a in 0..4u32 {
        let t0 = kernel_t0(a);
        let n = 32;
        let s = t0.series_expand(n).unwrap();
        // x(1+x-ax) T^2 - (1+x-ax) T + 1
        let lin = PowerSeries::new((0..=n).map(|i| Poly::from_ints(&[1, 1 - a as i64]).coeff(i)).collect());
        let x = PowerSeries::new((0..=n).map(|i| Poly::var().coeff(i)).collect());
        let r = x.mul(&lin).mul(&s).mul(&s).sub(&lin.mul(&s)).add(&PowerSeries::one(n));
        assert!(r.is_zero(), "a = {a}");
        // 1 + a x + (a^2 + 1) x^2 + ...
        let a = a as i64;
        assert_eq!(s.to_integers().unwrap()[..3], [1.into(), a.into(), (a * a + 1).into()]);
    }
}

#[test]
fn kernel_root_reduction_identity() {
    // t0^2 = t0/x - 1/(x(1+x-ax))
    for a in 0..4u32 {
        let t0 = kernel_t0(a);
        let xinv = QuadExt::from_rf(RationalFunction::x_pow(-1));
        let c = rf(&[1], &[0, 1, 1 - a as i64]);
        let rhs = t0.mul(&xinv).sub(&QuadExt::from_rf(c));
        assert_eq!(t0.mul(&t0), rhs);
    }
}

#[test]
fn catalan_in_closed_form() {
    // x^3 t0 / (1 - x t0) + (stuff) -> x^3 - 1 + C(x); check the simpler identity C = 1 + x C^2.
    let c = kernel_t0(1);
    let x = QuadExt::from_rf(RationalFunction::x());
    assert_eq!(c, QuadExt::one().add(&x.mul(&c).mul(&c)));
    let g = c.add(&QuadExt::from_rf(rf(&[-1, 0, 0, 1], &[1])));
    let s = g.series_expand(6).unwrap();
    assert_eq!(s.to_integers().unwrap(), [0, 1, 2, 6, 14, 42, 132].map(BigInt::from).to_vec());
}

#[test]
fn shifted_catalan_has_quadratic_relation() {
    let g = kernel_t0(1).add(&QuadExt::from_rf(rf(&[-1, 0, 0, 1], &[1])));
    let s = g.series_expand(24).unwrap();
    let rel = algebraic_fit_deg2(&s, 8).expect("relation");
    assert!(!rel.p2.is_zero());
    assert!(rel.holds_on(&g.series_expand(40).unwrap()));
}

#[test]
fn two_class_system() {
    // F1 = x + F12 + F21
    // F21 = x^2/(1-x) + F12 (2x - x^2)/(1-x)^2
    // F12 = x^2/(1-x) + F12 x^2/(1-x)^2
    let (f1, f12, f21) = (Unknown(0), Unknown(1), Unknown(2));
    let one = RationalFunction::one();
    let mut e1 = LinearForm::constant(RationalFunction::x());
    e1.add_term(f12, one.clone());
    e1.add_term(f21, one.clone());
    e1.add_term(f1, -one.clone());
    let mut e2 = LinearForm::constant(rf(&[0, 0, 1], &[1, -1]));
    e2.add_term(f12, rf(&[0, 2, -1], &[1, -2, 1]));
    e2.add_term(f21, -one.clone());
    let mut e3 = LinearForm::constant(rf(&[0, 0, 1], &[1, -1]));
    e3.add_term(f12, &rf(&[0, 0, 1], &[1, -2, 1]) - &one);
    let sol = solve_linear_system(&[e1, e2, e3], &[f1, f12, f21]).unwrap();
    assert_eq!(sol[&f12], rf(&[0, 0, 1, -1], &[1, -2]));
    assert_eq!(sol[&f21], rf(&[0, 0, 1, 1], &[1, -2]));
    assert_eq!(sol[&f1], rf(&[0, 1], &[1, -2]));
}

#[test]
fn four_class_system() {
    // F132 = x^3/(1-x) + F12 x^3/(1-x)^2
    // F1 = x/(1-x) + F12/(1-x)^2
    // F12 = x^2 + x F21 + F132
    // F1 = x + F12 + F21
    let (f1, f12, f21, f132) = (Unknown(0), Unknown(1), Unknown(2), Unknown(3));
    let one = RationalFunction::one();
    let mut e1 = LinearForm::constant(rf(&[0, 0, 0, 1], &[1, -1]));
    e1.add_term(f12, rf(&[0, 0, 0, 1], &[1, -2, 1]));
    e1.add_term(f132, -one.clone());
    let mut e2 = LinearForm::constant(rf(&[0, 1], &[1, -1]));
    e2.add_term(f12, rf(&[1], &[1, -2, 1]));
    e2.add_term(f1, -one.clone());
    let mut e3 = LinearForm::constant(rf(&[0, 0, 1], &[1]));
    e3.add_term(f21, RationalFunction::x());
    e3.add_term(f132, one.clone());
    e3.add_term(f12, -one.clone());
    let mut e4 = LinearForm::constant(RationalFunction::x());
    e4.add_term(f12, one.clone());
    e4.add_term(f21, one.clone());
    e4.add_term(f1, -one.clone());
    let sol = solve_linear_system(&[e1, e2, e3, e4], &[f1, f12, f21, f132]).unwrap();
    assert_eq!(sol[&f1], rf(&[0, 1], &[1, -2, -1]));
}

#[test]
fn random_systems_have_zero_residual() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..20 {
        let n = rng.gen_range(1..=4);
        let unknowns: Vec<Unknown> = (0..n).map(Unknown).collect();
        // identity plus x times a random matrix: determinant 1 at x = 0
        let eqs: Vec<LinearForm<RationalFunction>> = (0..n)
            .map(|i| {
                let mut f = LinearForm::constant(rf(&[rng.gen_range(-3..=3), rng.gen_range(-3..=3)], &[1]));
                for j in 0..n {
                    let c = rf(&[if i == j { 1 } else { 0 }, rng.gen_range(-3..=3)], &[1, rng.gen_range(-2..=2)]);
                    f.add_term(Unknown(j), c);
                }
                f
            })
            .collect();
        let sol = solve_linear_system(&eqs, &unknowns).unwrap();
        for e in &eqs {
            assert!(e.evaluate(&sol).unwrap().is_zero());
        }
    }
}

#[test]
fn bivariate_evaluations() {
    let x = BivariateRF::constant(RationalFunction::x());
    let t = BivariateRF::t();
    let geo = BivariateRF::one().sub(&x.mul(&t)).inv().unwrap();
    // 1/(1 - x t) at t = t0
    let t0 = kernel_t0(1);
    let at = geo.eval_quad(&t0).unwrap();
    let want = QuadExt::one().sub(&QuadExt::from_rf(RationalFunction::x()).mul(&t0)).inv().unwrap();
    assert_eq!(at, want);
    // x^2 t/(1 - x t) at t = 0
    assert!(x.mul(&x).mul(&t).mul(&geo).eval_t0().unwrap().is_zero());
    // [t^1] x^m/(1 - x t) = x^(m+1)
    let m = 4;
    let xm = BivariateRF::constant(RationalFunction::x_pow(m));
    assert_eq!(xm.mul(&geo).coeff_t(1).unwrap(), RationalFunction::x_pow(m + 1));
}

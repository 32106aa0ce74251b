mod common;

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

use ahss_core::abgroup::rational::Q;
use ahss_core::abgroup::{cokernel, smith_normal_form, CoefficientTag, IntMatrix, PresentedAbGroup};
use ahss_core::cochains::{coboundary, cohomology, cup, is_cocycle, Cochain};
use ahss_core::forms::{has_integral_periods, periods, DiscreteForm};
use ahss_core::simpcomplex::{builtin_space, SimplicialComplex};
use ahss_core::steenrod::{adem_reduce, sq, SteenrodElement};

use common::*;

fn spaces() -> &'static [Arc<SimplicialComplex>] {
    static S: OnceLock<Vec<Arc<SimplicialComplex>>> = OnceLock::new();
    S.get_or_init(|| {
        ["circle", "sphere(2)", "torus2", "rp2", "rp3", "moore(2,1)", "moore(3,2)"]
            .iter()
            .map(|id| Arc::new(builtin_space(id).unwrap()))
            .collect()
    })
}

fn is_unit(d: &BigInt) -> bool {
    d.magnitude().is_one()
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

fn to_big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

fn cochain(x: &Arc<SimplicialComplex>, k: usize, tag: CoefficientTag, seed: &[i64]) -> Cochain {
    let vals: Vec<Q> = (0..x.count(k)).map(|i| Q::from_integer(BigInt::from(seed[i % seed.len()] + i as i64 % 3))).collect();
    Cochain::new(x.clone(), k, tag, vals).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn smith_form_is_a_unimodular_diagonalization(m in matrix()) {
        let (r, c) = (m.len(), m[0].len());
        let a = IntMatrix::from_dense(r, c, &to_big(&m));
        let snf = smith_normal_form(&a);
        prop_assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.s.clone());
        prop_assert!(is_unit(&snf.u.determinant()));
        prop_assert!(is_unit(&snf.v.determinant()));
        let d = snf.diagonal();
        for w in d.windows(2) {
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
        prop_assert!(d.iter().all(|x| *x >= BigInt::zero()));
        prop_assert_eq!(snf.rank(), rank_q(&m, c));
        let mut oracle = invariant_factors(to_big(&m));
        oracle.sort();
        let mut ours: Vec<BigInt> = d.into_iter().filter(|x| !x.is_zero()).collect();
        ours.sort();
        prop_assert_eq!(ours, oracle);
    }

    #[test]
    fn cokernel_counts(m in matrix()) {
        let (r, c) = (m.len(), m[0].len());
        let g = cokernel(&IntMatrix::from_dense(r, c, &to_big(&m)));
        let f = invariant_factors(to_big(&m));
        prop_assert_eq!(g.free_rank, r - f.len());
        let order: BigInt = f.iter().fold(BigInt::one(), |a, b| a * b);
        let tors: BigInt = g.torsion.iter().fold(BigInt::one(), |a, b| a * b);
        prop_assert_eq!(tors, order);
    }

    #[test]
    fn group_normalization(a in 1u64..40, b in 1u64..40, free in 0usize..3) {
        let g = PresentedAbGroup::new(free, vec![BigInt::from(a), BigInt::from(b)]);
        let (ga, gb) = (BigInt::from(a), BigInt::from(b));
        let h = PresentedAbGroup::new(free, vec![ga.gcd(&gb), ga.lcm(&gb)]);
        prop_assert_eq!(&g, &h);
        let s = g.direct_sum(&PresentedAbGroup::cyclic(a));
        prop_assert_eq!(s, PresentedAbGroup::cyclic(a).direct_sum(&g));
    }

    #[test]
    fn coboundary_squares_to_zero(i in 0usize..7, k in 0usize..3, seed in prop::collection::vec(-5i64..5, 1..6)) {
        let x = &spaces()[i];
        prop_assume!(k + 2 <= x.dim());
        for tag in [CoefficientTag::IntZ, CoefficientTag::ModP(2), CoefficientTag::ModP(3)] {
            let c = cochain(x, k, tag, &seed);
            prop_assert!(coboundary(&coboundary(&c)).is_zero());
        }
    }

    #[test]
    fn cup_is_a_derivation(i in 0usize..7, a in 0usize..3, b in 0usize..3,
                          s1 in prop::collection::vec(-4i64..4, 1..5), s2 in prop::collection::vec(-4i64..4, 1..5)) {
        let x = &spaces()[i];
        prop_assume!(a + b < x.dim());
        let (u, v) = (cochain(x, a, CoefficientTag::IntZ, &s1), cochain(x, b, CoefficientTag::IntZ, &s2));
        let lhs = coboundary(&cup(&u, &v).unwrap());
        let mut rhs = cup(&coboundary(&u), &v).unwrap();
        let t = cup(&u, &coboundary(&v)).unwrap();
        rhs = if a % 2 == 0 { rhs.add(&t) } else { rhs.sub(&t) }.unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn squares_preserve_cocycles(i in 0usize..7, k in 0usize..3, j in 0u32..3, seed in prop::collection::vec(0i64..2, 1..8)) {
        let x = &spaces()[i];
        prop_assume!(k <= x.dim());
        let g = cohomology(x, k, CoefficientTag::ModP(2));
        let coords: Vec<Q> = (0..g.len()).map(|t| Q::from_integer(BigInt::from(seed[t % seed.len()]))).collect();
        let c = g.lift(&coords);
        prop_assert!(is_cocycle(&c));
        prop_assert!(is_cocycle(&sq(j, &c).unwrap()));
    }

    #[test]
    fn adem_reduction_agrees_with_the_action(m in prop::collection::vec(1u32..6, 1..4)) {
        let e = SteenrodElement::monomial(m.clone());
        let r = adem_reduce(&e);
        prop_assert!(r.is_admissible());
        prop_assert_eq!(adem_reduce(&r), r.clone());
        let d = e.degree() as usize;
        let terms: Vec<Vec<u32>> = r.terms().cloned().collect();
        prop_assert_eq!(act_sum(&terms, d), act(&m, d));
    }

    #[test]
    fn exact_forms_do_not_change_periods(i in 0usize..3, seed in prop::collection::vec(-6i64..6, 1..6), den in 1i64..5) {
        let x = &spaces()[i];
        let k = x.dim();
        let g = cohomology(x, k, CoefficientTag::IntZ);
        let coords: Vec<Q> = (0..g.len()).map(|t| Q::new(BigInt::from(seed[t % seed.len()]), BigInt::from(den))).collect();
        let f = DiscreteForm::new(x.clone(), k, g.lift_values(&coords)).unwrap();
        let h = cochain(x, k - 1, CoefficientTag::Rational, &seed);
        let e = DiscreteForm::exact(&h).unwrap();
        prop_assert!(periods(&e).unwrap().values.iter().all(|v| v.is_zero()));
        prop_assert_eq!(has_integral_periods(&f.add(&e).unwrap()), has_integral_periods(&f));
        let integral = coords.iter().all(|c| c.is_integer());
        prop_assert_eq!(has_integral_periods(&f), integral);
    }
}

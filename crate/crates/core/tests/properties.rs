mod common;

use proptest::prelude::*;

use hamfactor::classifier::classify;
use hamfactor::dsolver::{oracle_family, solve_family};
use hamfactor::exact::{rat, ratio, Assignment, LinForm, ParamMatrix, RatMatrix, Rational};
use hamfactor::integrability::{commutant, compare_commutant, sylvester_oracle};
use hamfactor::jordan::{conjugate, pushforward_d, Conjugation, JordanSpec};
use hamfactor::sample::RationalSampler;

use common::{random_assignment, random_spec, KINDS};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = RatMatrix> {
    // a third of the entries are zero so rank deficiency actually shows up
    prop::collection::vec(prop_oneof![Just(rat(0)), small_rational()], rows * cols).prop_map(move |v| {
        let mut it = v.into_iter();
        RatMatrix::from_fn(rows, cols, |_, _| it.next().unwrap())
    })
}

fn spec_from(seed: u64, max_m: usize) -> JordanSpec {
    let mut rng = RationalSampler::new(seed);
    let first = KINDS[rng.below(6) as usize];
    random_spec(&mut rng, max_m, first)
}

/// Unit upper triangular times unit lower triangular: always invertible.
fn conjugation(rng: &mut RationalSampler, n: usize) -> Conjugation {
    let upper = RatMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => rat(1),
        std::cmp::Ordering::Less => rat(rng.below(5) as i64 - 2),
        _ => rat(0),
    });
    let lower = RatMatrix::from_fn(n, n, |i, j| if i == j { rat(1) } else if i > j { rat(rng.below(3) as i64 - 1) } else { rat(0) });
    Conjugation::new(&upper * &lower).expect("unipotent product is invertible")
}

fn nullity(m: &RatMatrix) -> usize {
    m.cols() - m.rank()
}

/// `nullity(N^k) - nullity(N^(k-1))` for `k = 1..=n`.
fn nullity_steps(n_mat: &RatMatrix) -> Vec<usize> {
    let n = n_mat.rows();
    let mut out = Vec::new();
    let mut prev = 0;
    let mut power = RatMatrix::identity(n);
    for _ in 0..n {
        power = &power * n_mat;
        let now = nullity(&power);
        out.push(now - prev);
        prev = now;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_nullity((rows, cols, seed) in (1usize..6, 1usize..6, any::<u64>())) {
        let mut rng = RationalSampler::new(seed);
        let m = RatMatrix::from_fn(rows, cols, |_, _| if rng.below(3) == 0 { rat(0) } else { rng.rational() });
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.len(), cols);
        for v in &kernel {
            prop_assert!((&m * v).is_zero());
        }
        if !kernel.is_empty() {
            prop_assert_eq!(RatMatrix::hstack(&kernel).unwrap().rank(), kernel.len());
        }
    }

    #[test]
    fn transpose_keeps_rank(m in matrix(4, 3)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn inverse_round_trip(m in matrix(4, 4)) {
        if m.is_invertible() {
            prop_assert_eq!(&m * &m.inverse().unwrap(), RatMatrix::identity(4));
        } else {
            prop_assert!(m.inverse().is_err());
        }
    }

    #[test]
    fn linform_evaluation_is_linear(
        cx in small_rational(), cy in small_rational(), k in small_rational(),
        x in small_rational(), y in small_rational(), c0 in small_rational(),
    ) {
        let f = &LinForm::term("x", cx.clone()) + &LinForm::constant(c0.clone());
        let g = LinForm::term("y", cy.clone());
        let a: Assignment = [("x".to_string(), x.clone()), ("y".to_string(), y.clone())].into_iter().collect();
        let combo = &(&f * &k) + &g;
        let expected = (cx * &x + c0) * &k + cy * &y;
        prop_assert_eq!(combo.evaluate(&a).unwrap(), expected);
        let partial: Assignment = [("x".to_string(), x)].into_iter().collect();
        prop_assert_eq!(combo.substitute(&partial).substitute(&a), combo.substitute(&a));
    }

    #[test]
    fn substitution_commutes_with_products(
        b1 in matrix(3, 3), b2 in matrix(3, 3), r in matrix(3, 2), l in matrix(2, 3),
        p in small_rational(), q in small_rational(),
    ) {
        let family = ParamMatrix::from_basis(3, 3, &[("p".to_string(), b1), ("q".to_string(), b2)]);
        let a: Assignment = [("p".to_string(), p), ("q".to_string(), q)].into_iter().collect();
        let value = family.evaluate(&a).unwrap();
        prop_assert_eq!(family.mul_right(&r).unwrap().evaluate(&a).unwrap(), &value * &r);
        prop_assert_eq!(family.mul_left(&l).unwrap().evaluate(&a).unwrap(), &l * &value);
        prop_assert_eq!(family.transpose().evaluate(&a).unwrap(), value.transpose());
    }

    #[test]
    fn realize_has_prescribed_jordan_structure(seed in any::<u64>()) {
        let spec = spec_from(seed, 6);
        let b = spec.realize();
        let m = spec.dim();
        prop_assert_eq!(b.rows(), m);
        let mut accounted = 0;
        for group in spec.groups() {
            for (side, sizes) in group.size_lists() {
                if sizes.is_empty() {
                    continue;
                }
                let (re, im) = group.eigenvalue(side);
                let shifted = &b - &RatMatrix::identity(m).scale(&re);
                let (n_mat, cell) = if im == rat(0) {
                    (shifted, 1)
                } else {
                    (&(&shifted * &shifted) + &RatMatrix::identity(m).scale(&(&im * &im)), 2)
                };
                let steps = nullity_steps(&n_mat);
                for (k, step) in steps.iter().enumerate() {
                    let at_least = sizes.iter().filter(|s| **s > k).count();
                    prop_assert_eq!(*step, cell * at_least, "{:?} {:?} k={}", group, side, k + 1);
                }
                accounted += cell * sizes.iter().sum::<usize>();
            }
        }
        prop_assert_eq!(accounted, m);
    }

    #[test]
    fn family_members_are_solutions(seed in any::<u64>()) {
        let spec = spec_from(seed, 8);
        let b = spec.realize();
        let family = solve_family(&spec);
        for (name, basis) in &family.basis {
            prop_assert!(basis.is_symmetric(), "{}", name);
            prop_assert!((basis * &b).is_skew(), "{}", name);
        }
        let mut rng = RationalSampler::new(seed ^ 1);
        let d = family.general.evaluate(&random_assignment(&mut rng, family.params())).unwrap();
        prop_assert!(classify(&b, &d).is_ok());
    }

    #[test]
    fn family_dimension_is_conjugation_invariant(seed in any::<u64>()) {
        let spec = spec_from(seed, 6);
        let b = spec.realize();
        let family = solve_family(&spec);
        let mut rng = RationalSampler::new(seed);
        let conj = conjugation(&mut rng, spec.dim());
        let moved = conjugate(&b, &conj).unwrap();
        prop_assert_eq!(oracle_family(&moved).dim, family.dim);

        let d = family.general.evaluate(&random_assignment(&mut rng, family.params())).unwrap();
        let pushed = pushforward_d(&ParamMatrix::from_constant(&d), &conj).unwrap().constant_part();
        let before = classify(&b, &d).unwrap();
        let after = classify(&moved, &pushed).unwrap();
        prop_assert_eq!(before.verdict, after.verdict);
        prop_assert_eq!(before.dynamics_paired, after.dynamics_paired);
    }

    #[test]
    fn commutant_matches_kernel_of_commutator(seed in any::<u64>()) {
        let spec = spec_from(seed, 7);
        let b = spec.realize();
        let closed = commutant(&spec);
        for x in &closed.basis {
            prop_assert!(x.commutator(&b).is_zero());
        }
        let cmp = compare_commutant(&closed, &sylvester_oracle(&b));
        prop_assert!(cmp.agrees, "{:?}", cmp);
        prop_assert!(closed.dim >= spec.dim(), "commutant contains the polynomials in B");
    }
}

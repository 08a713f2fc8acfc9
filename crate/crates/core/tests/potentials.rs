mod common;

use common::*;
use otcert::monotonicity::BRUTE_CHECK_LIMIT;
use otcert::potentials::Direction::{XToY, YToX};
use otcert::*;
use proptest::prelude::*;
use rand::Rng;

fn finite(v: &[f64]) -> Vec<PotentialValue<f64>> {
    v.iter().map(|&x| PotentialValue::Finite(x)).collect()
}

fn values(v: &[PotentialValue<f64>]) -> Vec<f64> {
    v.iter().map(|p| p.to_f64()).collect()
}

#[test]
fn column_minima_example() {
    let c = CostMatrix::from_finite(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
    assert_eq!(c_transform(&finite(&[0.0, 0.0]), &c, XToY).unwrap(), finite(&[1.0, 1.0]));
    let all_neg = vec![PotentialValue::NegativeInfinity; 2];
    assert_eq!(c_transform(&all_neg, &c, XToY), Err(Error::AllNegativeInfinity));
}

#[test]
fn harvested_supports_round_trip() {
    let mut r = rng(31);
    for _ in 0..200 {
        let (n, m) = (r.gen_range(1..=10), r.gen_range(1..=10));
        let c = uniform_matrix(&mut r, n, m);
        let mu = random_weights(&mut r, n);
        let nu = random_weights(&mut r, m);
        let res = solve_transport(&mu, &nu, &c).unwrap();
        let gamma = res.plan.support();
        let pp = build_potentials(&gamma, &c, 0).unwrap();
        assert!(verify_feasibility(&pp, &c, 1e-9).unwrap().passed);
        for &(i, j) in gamma.pairs() {
            assert!(superdifferential_contains(&pp.phi, &c, (i, j)).unwrap());
        }
        let dual = dual_value(&pp, &mu, &nu).unwrap().value().unwrap();
        assert!((dual - res.cost.value().unwrap()).abs() <= 1e-8);
        let root = r.gen_range(0..gamma.len());
        let other = build_potentials(&gamma, &c, root).unwrap();
        assert!(verify_feasibility(&other, &c, 1e-9).unwrap().passed);
        assert!((dual_value(&other, &mu, &nu).unwrap().value().unwrap() - dual).abs() <= 1e-8);
    }
}

#[test]
fn assignment_optimum_duality_cross_checked_with_brute_force() {
    let mut r = rng(32);
    for _ in 0..50 {
        let n = r.gen_range(2..=7);
        let c = uniform_matrix(&mut r, n, n);
        let res = solve_assignment(&c).unwrap();
        let pp = build_potentials(&res.plan.support(), &c, 0).unwrap();
        let w = vec![1.0 / n as f64; n];
        let dual = dual_value(&pp, &w, &w).unwrap().value().unwrap();
        let brute = brute_force_optimal(&c, 9).unwrap().cost.value().unwrap();
        assert!((dual - brute).abs() <= 1e-8, "{dual} vs {brute}");
    }
}

#[test]
fn strong_monotone_beats_solver_at_fifty() {
    let mut r = rng(33);
    for _ in 0..5 {
        let n = 50;
        let c = uniform_matrix(&mut r, n, n);
        let res = solve_assignment(&c).unwrap();
        let gamma = res.plan.support();
        let pp = build_potentials(&gamma, &c, 0).unwrap();
        assert!(verify_feasibility(&pp, &c, 1e-9).unwrap().passed);
        // A rival plan: the optimum of a perturbed matrix.
        let rival_costs = uniform_matrix(&mut r, n, n);
        let rival = solve_assignment(&rival_costs).unwrap().plan;
        assert!(res.cost.value().unwrap() <= plan_cost(&rival, &c).unwrap().value().unwrap() + 1e-12);
    }
}

#[test]
fn torus_gamma1_contact_is_exact() {
    for n in [2usize, 3, 5, 8, 13] {
        let inst = torus::TorusInstance::<Rational64>::new(n).unwrap();
        let pp = build_potentials(&inst.gamma1, &inst.costs, 0).unwrap();
        let one = Rational64::from_integer(1);
        for k in 0..n {
            assert_eq!((pp.phi[k] + pp.psi[k]).value(), Some(one));
        }
        for i in 0..n {
            for j in 0..n {
                if let Some(c) = inst.costs.finite(i, j) {
                    assert!((pp.phi[i] + pp.psi[j]).value().unwrap() <= c);
                }
            }
        }
        assert!(verify_feasibility(&pp, &inst.costs, Rational64::from_integer(0)).unwrap().passed);
    }
}

/// Around the shift cycle, equality on Γ₂ and feasibility on the diagonal force
/// `φ(k) ≥ φ(k + 1) + 1`; summing over the cycle gives `0 ≥ N`.
#[test]
fn torus_gamma2_telescoping_contradiction() {
    for n in 2..=12usize {
        let inst = torus::TorusInstance::<Rational64>::new(n).unwrap();
        let c = |i: usize, j: usize| inst.costs.finite(i, j).unwrap();
        let mut total = Rational64::from_integer(0);
        for k in 0..n {
            let next = (k + 1) % n;
            // ψ(k+1) = c(k, k+1) − φ(k) and φ(k+1) + ψ(k+1) ≤ c(k+1, k+1).
            total += c(k, next) - c(next, next);
        }
        assert_eq!(total, Rational64::from_integer(n as i64));
        match build_potentials(&inst.gamma2, &inst.costs, 0) {
            Err(Error::NotMonotone { cycle, improvement }) => {
                assert_eq!(cycle.len(), n);
                assert_eq!(improvement, n as f64);
            }
            other => panic!("expected NotMonotone, got {other:?}"),
        }
        // The natural candidate with equality on Γ₂ must fail feasibility.
        let zero = Rational64::from_integer(0);
        let two = Rational64::from_integer(2);
        let candidate = PotentialPair {
            phi: vec![PotentialValue::Finite(zero); n],
            psi: vec![PotentialValue::Finite(two); n],
            contact: inst.gamma2.clone(),
            tol: zero,
        };
        assert!(!verify_feasibility(&candidate, &inst.costs, zero).unwrap().passed);
    }
}

#[test]
fn superdifferential_examples() {
    let c = CostMatrix::from_finite(vec![vec![1.0, 3.0], vec![2.0, 0.5]]).unwrap();
    let zero = finite(&[0.0, 0.0]);
    assert!(superdifferential_contains(&zero, &c, (0, 0)).unwrap());
    assert!(!superdifferential_contains(&zero, &c, (0, 1)).unwrap());
}

#[test]
fn feasibility_trivial_and_negative_infinity_cases() {
    let c = CostMatrix::from_finite(vec![vec![1.0, 0.0], vec![0.5, 2.0]]).unwrap();
    let pp = PotentialPair { phi: finite(&[0.0, 0.0]), psi: finite(&[0.0, 0.0]), contact: SupportSet::default(), tol: 0.0 };
    assert!(verify_feasibility(&pp, &c, 1e-9).unwrap().passed);
    let with_inf = PotentialPair {
        phi: vec![PotentialValue::NegativeInfinity, PotentialValue::Finite(0.0)],
        psi: finite(&[0.5, 0.0]),
        contact: SupportSet::new(vec![(0, 0)]),
        tol: 0.0,
    };
    let rep = verify_feasibility(&with_inf, &c, 1e-9).unwrap();
    assert!(!rep.passed);
    assert_eq!(rep.contact_failures, vec![(0, 0)]);
    assert_eq!(dual_value(&with_inf, &[0.5, 0.5], &[0.5, 0.5]).unwrap(), PotentialValue::NegativeInfinity);
    assert_eq!(dual_value(&with_inf, &[0.0, 1.0], &[0.5, 0.5]).unwrap(), PotentialValue::Finite(0.25));
}

#[test]
fn strong_implies_optimal_among_permutations() {
    let mut r = rng(34);
    let mut checked = 0;
    while checked < 100 {
        let n = r.gen_range(2..=6);
        let c = uniform_matrix(&mut r, n, n);
        let mut s: Vec<usize> = (0..n).collect();
        for k in (1..n).rev() {
            s.swap(k, r.gen_range(0..=k));
        }
        let gamma = SupportSet::new(s.iter().copied().enumerate().collect());
        let Ok(pp) = build_potentials(&gamma, &c, 0) else { continue };
        assert!(verify_feasibility(&pp, &c, 1e-9).unwrap().passed);
        let mine = permutation_cost(&c, &s).unwrap();
        for alt in permutations(n) {
            assert!(mine <= permutation_cost(&c, &alt).unwrap() + 1e-12);
        }
        checked += 1;
    }
}

#[test]
fn brute_check_agrees_on_potential_construction() {
    let mut r = rng(35);
    for _ in 0..100 {
        let c = uniform_matrix(&mut r, 5, 5);
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        while pairs.len() < 5 {
            let p = (r.gen_range(0..5), r.gen_range(0..5));
            if !pairs.contains(&p) {
                pairs.push(p);
            }
        }
        let gamma = SupportSet::new(pairs);
        let brute = brute_check(&gamma, &c, 1e-12, BRUTE_CHECK_LIMIT).unwrap();
        assert_eq!(build_potentials(&gamma, &c, 0).is_ok(), brute.is_monotone());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn triple_transform_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = uniform_matrix(&mut r, 10, 10);
        let phi: Vec<f64> = (0..10).map(|_| r.gen_range(-1.0..1.0)).collect();
        let once = c_transform(&finite(&phi), &c, XToY).unwrap();
        let twice = c_transform(&once, &c, YToX).unwrap();
        let thrice = c_transform(&twice, &c, XToY).unwrap();
        for (a, b) in values(&once).iter().zip(values(&thrice)) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn gauge_invariance(seed in any::<u64>(), shift in -100.0f64..100.0) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=8);
        let c = uniform_matrix(&mut r, n, n);
        let mu = random_weights(&mut r, n);
        let nu = random_weights(&mut r, n);
        let res = solve_transport(&mu, &nu, &c).unwrap();
        let pp = build_potentials(&res.plan.support(), &c, 0).unwrap();
        let moved = pp.gauge_shift(shift);
        let (a, b) = (verify_feasibility(&pp, &c, 1e-9).unwrap(), verify_feasibility(&moved, &c, 1e-9).unwrap());
        prop_assert_eq!(a.passed, b.passed);
        prop_assert!((a.max_contact_residual - b.max_contact_residual).abs() <= 1e-9);
        let (da, db) = (dual_value(&pp, &mu, &nu).unwrap().to_f64(), dual_value(&moved, &mu, &nu).unwrap().to_f64());
        prop_assert!((da - db).abs() <= 1e-12 * (1.0 + shift.abs()));
    }

    #[test]
    fn weak_duality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.gen_range(1..=8), r.gen_range(1..=8));
        let c = uniform_matrix(&mut r, n, m);
        let mu = random_weights(&mut r, n);
        let nu = random_weights(&mut r, m);
        // Feasible by clamping: ψ = φ^c.
        let phi: Vec<f64> = (0..n).map(|_| r.gen_range(-2.0..2.0)).collect();
        let psi = c_transform(&finite(&phi), &c, XToY).unwrap();
        let pp = PotentialPair { phi: finite(&phi), psi, contact: SupportSet::default(), tol: 0.0 }.gauge_shift(r.gen_range(-5.0..5.0));
        prop_assert!(verify_feasibility(&pp, &c, 1e-9).unwrap().passed);
        let dual = dual_value(&pp, &mu, &nu).unwrap().to_f64();
        for plan in [TransportPlan::product(&mu, &nu).unwrap(), solve_transport(&mu, &nu, &c).unwrap().plan] {
            prop_assert!(dual <= plan_cost(&plan, &c).unwrap().value().unwrap() + 1e-9);
        }
    }
}

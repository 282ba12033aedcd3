mod common;

use newton_infinity::analysis::critical_values;
use newton_infinity::geometry::{is_convenient, newton_polyhedron, restrict_polyhedron_check, verify_bad_witness};
use newton_infinity::lp::{self, Constraint, LpOutcome};
use newton_infinity::numeric::{solve_gradient_system, strict_feasibility_exact, SolverConfig};
use newton_infinity::poly::{parse, Polynomial, VarSet};
use newton_infinity::rational::{dot, int, to_f64, Rational};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_instance, sparse};

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn euler_relation_on_every_face(seed in any::<u64>(), xs in prop::collection::vec(-2.0f64..2.0, 3)) {
        let p = random_instance(seed);
        let gamma = newton_polyhedron(&p).unwrap();
        let x = &xs[..p.nvars()];
        for face in gamma.faces.iter().filter(|f| f.rep_normal.is_some()) {
            let q: Vec<f64> = face.rep_normal.as_ref().unwrap().iter().map(to_f64).collect();
            let d = to_f64(face.d_value.as_ref().unwrap());
            let g = p.face_polynomial(face).unwrap();
            let lhs: f64 = g.gradient().iter().enumerate().map(|(j, h)| q[j] * x[j] * h.evaluate(x).unwrap()).sum();
            let v = g.evaluate(x).unwrap();
            prop_assert!((lhs - d * v).abs() <= 1e-9 * (1.0 + g.term_scale(x) * (1.0 + d.abs())));
        }
    }

    #[test]
    fn face_polynomials_are_weighted_homogeneous(seed in any::<u64>(), t in 0.1f64..2.0) {
        let p = random_instance(seed);
        let gamma = newton_polyhedron(&p).unwrap();
        let x: Vec<Rational> = (0..p.nvars()).map(|j| int(j as i64 + 2) / int(3)).collect();
        let t = Rational::from_float(t).unwrap();
        for face in gamma.faces.iter().filter(|f| f.rep_normal.is_some()) {
            let q = face.rep_normal.as_ref().unwrap();
            let d = face.d_value.as_ref().unwrap();
            let g = p.face_polynomial(face).unwrap();
            let pow = |r: &Rational| -> Rational {
                let k: i32 = r.to_integer().try_into().unwrap();
                num_traits::pow::Pow::pow(&t, k)
            };
            let scaled: Vec<Rational> = x.iter().zip(q).map(|(xj, qj)| xj * pow(qj)).collect();
            prop_assert_eq!(g.evaluate_exact(&scaled).unwrap(), pow(d) * g.evaluate_exact(&x).unwrap());
        }
    }

    #[test]
    fn restriction_commutes_with_newton_polyhedron(seed in any::<u64>()) {
        let p = random_instance(seed);
        for set in VarSet::nonempty_subsets(p.nvars()) {
            if !p.is_constant_on(set).unwrap() {
                prop_assert!(restrict_polyhedron_check(&p, set).unwrap());
            }
        }
    }

    #[test]
    fn convenient_polynomials_have_no_bad_faces(seed in any::<u64>()) {
        let mut p = random_instance(seed);
        // force convenience half of the time
        if seed % 2 == 0 {
            for j in 0..p.nvars() {
                p = p.add(&Polynomial::var(p.var_names(), j).pow(2 + (seed % 3) as u32));
            }
        }
        if is_convenient(&p) {
            prop_assert!(newton_polyhedron(&p).unwrap().bad_faces().is_empty());
        }
    }

    #[test]
    fn faces_and_normals_are_dual(seed in any::<u64>()) {
        let p = random_instance(seed);
        let gamma = newton_polyhedron(&p).unwrap();
        for face in &gamma.faces {
            if let Some(q) = &face.rep_normal {
                prop_assert_eq!(gamma.face_of(q).unwrap().id, face.id);
                prop_assert_eq!(&gamma.support_value(q).unwrap(), face.d_value.as_ref().unwrap());
            }
            if let Some(w) = &face.boundary_witness {
                prop_assert!(face.in_newton_boundary);
                prop_assert!(gamma.support_value(w).unwrap().is_negative());
                prop_assert_eq!(gamma.face_of(w).unwrap().id, face.id);
            }
            if face.is_bad {
                prop_assert!(verify_bad_witness(&gamma, face, face.bad_witness.as_ref().unwrap()));
            }
        }
    }

    #[test]
    fn printing_and_parsing_round_trip(seed in any::<u64>()) {
        let p = random_instance(seed);
        prop_assert_eq!(parse(&p.to_string(), p.var_names()).unwrap(), p);
    }

    #[test]
    fn products_evaluate_exactly(a in any::<u64>(), b in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(a);
        let p = sparse(&mut rng, 2, 4, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(b);
        let q = sparse(&mut rng, 2, 4, 3);
        let x = [int(3) / int(7), int(-5) / int(2)];
        prop_assert_eq!(p.mul(&q).evaluate_exact(&x).unwrap(), p.evaluate_exact(&x).unwrap() * q.evaluate_exact(&x).unwrap());
        prop_assert_eq!(p.add(&q).sub(&q), p.clone());
    }

    #[test]
    fn lp_optima_are_feasible(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3);
        let mut cons: Vec<Constraint> = (0..n).flat_map(|j| {
            let mut e = vec![int(0); n];
            e[j] = int(1);
            [Constraint::le(e.clone(), int(5)), Constraint::ge(e, int(-5))]
        }).collect();
        for _ in 0..rng.gen_range(0..4) {
            let a: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-3..=3))).collect();
            cons.push(Constraint::le(a, int(rng.gen_range(-4..=4))));
        }
        let c: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-3..=3))).collect();
        match lp::maximize(n, &cons, &c) {
            LpOutcome::Optimal { x, value } => {
                prop_assert!(cons.iter().all(|k| k.holds(&x)));
                prop_assert_eq!(dot(&c, &x), value);
            }
            LpOutcome::Infeasible => prop_assert!(lp::feasible_point(n, &cons).is_none()),
            LpOutcome::Unbounded => prop_assert!(false, "bounded box"),
        }
        if let Some(x) = lp::feasible_point(n, &cons) {
            prop_assert!(cons.iter().all(|k| k.holds(&x)));
        }
    }

    #[test]
    fn descent_directions_are_strict(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gs: Vec<Vec<Rational>> = (0..rng.gen_range(1..4)).map(|_| (0..3).map(|_| int(rng.gen_range(-3..=3))).collect()).collect();
        let (v, t) = strict_feasibility_exact(&gs);
        prop_assert!(!t.is_negative());
        if t.is_positive() {
            prop_assert!(gs.iter().all(|g| dot(g, &v).is_negative()));
        } else {
            prop_assert!(t.is_zero());
        }
    }
}

proptest! {
    #![proptest_config(cfg(8))]

    #[test]
    fn root_finding_is_deterministic(seed in any::<u64>()) {
        let p = random_instance(seed);
        let c = SolverConfig { rng_seed: seed, ..SolverConfig::default() };
        let a = solve_gradient_system(&p.gradient(), &c).unwrap();
        let b = solve_gradient_system(&p.gradient(), &c).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn critical_values_scale_with_the_polynomial(seed in any::<u64>()) {
        let p = random_instance(seed);
        let c = SolverConfig::default();
        let a = critical_values(&p, &c).unwrap();
        let b = critical_values(&p.scale(&int(3)), &c).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((3.0 * u.value - v.value).abs() <= 1e-6 * (1.0 + v.value.abs()));
        }
    }
}

mod common;

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symbreak::lie::{AlgebraVector, CoalgebraVector, GroupElement, GroupId};
use symbreak::models::{self, HamiltonianFamily, PhasePoint, Velocity};
use symbreak::solver::{
    self, check_alpha_nondegenerate, check_g_nondegenerate, continuation, find_equilibria, find_relative_equilibria,
    NodeOutcome, SolveRequest, Verdict,
};
use symbreak::{pendulum, Error};

fn cylinder_request(n: u32, lambda: f64) -> SolveRequest {
    SolveRequest::equilibria(HamiltonianFamily::cylinder(n).unwrap(), lambda, PhasePoint::cylinder(0.0, 0.0))
}

fn desk() -> HamiltonianFamily {
    HamiltonianFamily::body_fluid_added(1.0, 1.0, 2.0, 1.0).unwrap()
}

fn pendulum_request(s: f64, lambda: f64) -> SolveRequest {
    let f = HamiltonianFamily::pendulum();
    let seed = PhasePoint::t_star_sphere(Vector3::x(), Vector3::y() * s).unwrap();
    let xi0 = Velocity::new(&f, AlgebraVector::from_slice(GroupId::SO2, &[s]).unwrap()).unwrap();
    let alpha = CoalgebraVector::from_slice(GroupId::SO2, &[s]).unwrap();
    SolveRequest::relative_equilibria(f, lambda, alpha, xi0, seed)
}

#[test]
fn cylinder_six_equilibria_in_two_orbits() {
    let set = find_equilibria(&cylinder_request(3, 0.05)).unwrap();
    assert_eq!(set.points.len(), 6);
    for (k, p) in set.points.iter().enumerate() {
        let PhasePoint::Cylinder { theta, z } = p.point else { panic!() };
        assert!((theta - PI * k as f64 / 3.0).abs() < 1e-8, "theta {theta} vs k {k}");
        assert!(z.abs() < 1e-8);
        assert!(p.residual <= 1e-10);
    }
    assert_eq!(set.clustering.clusters, vec![vec![0, 2, 4], vec![1, 3, 5]]);
    assert_eq!(set.bound.value, 2);
    assert_eq!(set.verdict, Verdict::Satisfied);
    let labels: Vec<&str> = set.representatives().map(|p| p.stability.as_str()).collect();
    assert_eq!(labels, vec!["unstable", "stable"]);
}

#[test]
fn signatures_constant_on_clusters() {
    let set = find_equilibria(&cylinder_request(4, 0.1)).unwrap();
    for cluster in &set.clustering.clusters {
        for w in cluster.windows(2) {
            assert_eq!(set.points[w[0]].signature, set.points[w[1]].signature);
        }
    }
}

#[test]
fn body_fluid_four_equilibria() {
    let req = SolveRequest::equilibria(desk(), 0.1, PhasePoint::se2_dual(Vector3::new(0.0, 1.0, 0.0)));
    let set = find_equilibria(&req).unwrap();
    let expected = [
        Vector3::new(0.0, -1.0, 0.0),
        Vector3::new(0.0, 0.0, -1.0),
        Vector3::new(0.0, 0.0, 1.0),
        Vector3::new(0.0, 1.0, 0.0),
    ];
    assert_eq!(set.points.len(), 4);
    for e in expected {
        assert!(set.points.iter().any(|p| p.point.distance(&PhasePoint::se2_dual(e)) < 1e-8), "missing {e:?}");
    }
    assert_eq!(set.orbit_count(), 2);
    for cluster in &set.clustering.clusters {
        assert_eq!(cluster.len(), 2);
    }
    let saddles = set.points.iter().filter(|p| p.stability == "saddle").count();
    let centers = set.points.iter().filter(|p| p.stability == "center").count();
    assert_eq!((saddles, centers), (2, 2));
}

#[test]
fn equilibria_invariant_under_seed_symmetry() {
    let base = find_equilibria(&cylinder_request(3, 0.05)).unwrap();
    for g in GroupId::Dn(3).finite_elements().unwrap() {
        let mut req = cylinder_request(3, 0.05);
        req.seed = models::act(&g, &req.seed).unwrap();
        let moved = find_equilibria(&req).unwrap();
        assert_eq!(moved.points.len(), base.points.len());
        for (a, b) in base.points.iter().zip(&moved.points) {
            assert!(a.point.distance(&b.point) < 1e-7);
        }
    }
}

#[test]
fn lambda_zero_is_a_continuum() {
    assert!(matches!(find_equilibria(&cylinder_request(3, 0.0)), Err(Error::ContinuumAtZero)));
}

#[test]
fn seed_must_be_critical() {
    let mut req = cylinder_request(3, 0.05);
    req.seed = PhasePoint::cylinder(0.0, 0.3);
    assert!(matches!(find_equilibria(&req), Err(Error::NotCritical { .. })));
}

#[test]
fn request_validation() {
    let mut req = cylinder_request(3, 0.05);
    req.tube_radius = 0.0;
    assert!(find_equilibria(&req).is_err());
    let mut req = cylinder_request(3, 0.05);
    req.multistart_count = 0;
    assert!(find_equilibria(&req).is_err());
    assert!(find_equilibria(&pendulum_request(1.0, 0.1)).is_err());
}

#[test]
fn grid_oracle_cylinder() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let lambda = rng.gen_range(0.01..0.3);
        let oracle = common::grid_scan_zeros(
            |t, z| {
                let g = common::fd_gradient2(|a, b| common::cylinder_energy(n, lambda, a, b), t, z, 1e-6);
                g[0].hypot(g[1])
            },
            -0.5,
            0.5,
            400,
            1e-6,
        );
        let set = find_equilibria(&cylinder_request(n, lambda)).unwrap();
        assert_eq!(set.points.len(), oracle.len(), "n={n}, lambda={lambda}");
        assert_eq!(set.points.len(), 2 * n as usize);
        for (t, z) in oracle {
            assert!(
                set.points.iter().any(|p| {
                    let PhasePoint::Cylinder { theta, z: pz } = p.point else { panic!() };
                    common::angle_gap(theta, t).hypot(pz - z) < 1e-4
                }),
                "oracle point ({t}, {z}) not found"
            );
        }
    }
}

#[test]
fn grid_oracle_coadjoint_cylinder() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let m = rng.gen_range(0.5..2.0);
        let ib = rng.gen_range(0.5..2.0);
        let b = rng.gen_range(0.5..1.5);
        let a = b * rng.gen_range(1.2..2.5);
        let lambda = rng.gen_range(0.01..0.5);
        let radius = rng.gen_range(0.5..2.0);
        let k = common::added_mass_diagonal(m, ib, a, b, lambda);
        let oracle = common::grid_scan_zeros(
            |psi, x| {
                let f = common::lp_field(k, [x, radius * psi.cos(), radius * psi.sin()]);
                (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt()
            },
            -0.5,
            0.5,
            400,
            1e-9,
        );
        let family = HamiltonianFamily::body_fluid_added(m, ib, a, b).unwrap();
        let req = SolveRequest::equilibria(family, lambda, PhasePoint::se2_dual(Vector3::new(0.0, radius, 0.0)));
        let set = find_equilibria(&req).unwrap();
        assert_eq!(set.points.len(), 4);
        assert_eq!(oracle.len(), 4, "oracle found {oracle:?}");
        for (psi, x) in oracle {
            let target = PhasePoint::se2_dual(Vector3::new(x, radius * psi.cos(), radius * psi.sin()));
            assert!(set.points.iter().any(|p| p.point.distance(&target) < 1e-4), "oracle point {target:?} not found");
        }
    }
}

#[test]
fn pendulum_relative_equilibrium() {
    let set = find_relative_equilibria(&pendulum_request(1.0, 0.1)).unwrap();
    assert_eq!(set.orbit_count(), 1);
    assert_eq!(set.bound.value, 1);
    assert_eq!(set.verdict, Verdict::Satisfied);
    let r_oracle = common::quartic_root(1.0, 0.1);
    for p in &set.points {
        let r = p.velocity.as_ref().unwrap().xi().coords()[0];
        assert!((r - r_oracle).abs() < 1e-10, "r = {r}, oracle {r_oracle}");
        let PhasePoint::TStarSphere { x, .. } = p.point else { panic!() };
        assert!((x.z + 0.1 / (r * r)).abs() < 1e-10);
        assert!(p.residual <= 1e-10);
        assert_eq!(p.stability, "stable");
    }
}

#[test]
fn pendulum_unperturbed_is_equator() {
    let set = find_relative_equilibria(&pendulum_request(1.3, 0.0)).unwrap();
    assert_eq!(set.orbit_count(), 1);
    for p in &set.points {
        let PhasePoint::TStarSphere { x, y } = p.point else { panic!() };
        assert!(x.z.abs() < 1e-10);
        assert!((y.norm() - 1.3).abs() < 1e-10);
        assert!(p.velocity_shift.unwrap() < 1e-10);
    }
}

#[test]
fn pendulum_far_level_set_is_empty() {
    let mut req = pendulum_request(1.0, 0.1);
    let solver::Mode::RelativeEquilibria { alpha, .. } = &mut req.mode else { panic!() };
    *alpha = CoalgebraVector::from_slice(GroupId::SO2, &[5.0]).unwrap();
    assert!(matches!(find_relative_equilibria(&req), Err(Error::EmptyLevelSet { .. })));
}

#[test]
fn pendulum_seed_must_be_relative_equilibrium() {
    let mut req = pendulum_request(1.0, 0.1);
    req.seed = PhasePoint::t_star_sphere(Vector3::x(), Vector3::y() * 2.0).unwrap();
    assert!(matches!(find_relative_equilibria(&req), Err(Error::NotCritical { .. })));
}

#[test]
fn curve_consistency_with_solver() {
    let lambda = 0.1;
    for s in [0.8, 1.0, 1.5, 2.5] {
        let alpha = s - lambda * lambda / (s * s * s);
        let f = HamiltonianFamily::pendulum();
        let seed = PhasePoint::t_star_sphere(Vector3::x(), Vector3::y() * alpha).unwrap();
        let xi0 = Velocity::new(&f, AlgebraVector::from_slice(GroupId::SO2, &[alpha]).unwrap()).unwrap();
        let req = SolveRequest::relative_equilibria(
            f,
            lambda,
            CoalgebraVector::from_slice(GroupId::SO2, &[alpha]).unwrap(),
            xi0,
            seed,
        );
        let set = find_relative_equilibria(&req).unwrap();
        let expected = pendulum::gamma(lambda, s);
        for p in &set.points {
            let em = pendulum::energy_momentum(lambda, &p.point).unwrap();
            assert!((em.energy - expected.energy).abs() < 1e-8 && (em.momentum - expected.momentum).abs() < 1e-8);
        }
    }
}

#[test]
fn g_nondegeneracy_examples() {
    let cyl = HamiltonianFamily::cylinder(3).unwrap();
    let r = check_g_nondegenerate(&cyl, &PhasePoint::cylinder(0.0, 0.0), None).unwrap();
    assert!(r.nondegenerate && r.signature.as_tuple() == (0, 0, 1));

    let f = HamiltonianFamily::pendulum();
    let s = 1.7;
    let p = PhasePoint::t_star_sphere(Vector3::x(), Vector3::y() * s).unwrap();
    let xi = Velocity::new(&f, AlgebraVector::from_slice(GroupId::SO3, &[0.0, 0.0, s]).unwrap()).unwrap();
    assert!(check_g_nondegenerate(&f, &p, Some(&xi)).unwrap().nondegenerate);
    let a = check_alpha_nondegenerate(&f, &p, &xi).unwrap();
    assert_eq!((a.dim_ker_h, a.dim_ker_g, a.dim_m), (3, 1, 2));
    assert!(a.holds);

    let body = check_g_nondegenerate(&desk(), &PhasePoint::se2_dual(Vector3::new(0.0, 1.0, 0.0)), None).unwrap();
    assert!(body.nondegenerate);
}

#[test]
fn cylinder_continuation() {
    let grid: Vec<f64> = (0..=10).map(|i| 0.02 * i as f64).collect();
    let res = continuation(&cylinder_request(3, 0.0), &grid).unwrap();
    assert!(matches!(res.nodes[0].outcome, NodeOutcome::Skipped(_)));
    for node in &res.nodes[1..] {
        let NodeOutcome::Solved(set) = &node.outcome else { panic!("{:?}", node.outcome) };
        assert_eq!(set.points.len(), 6);
        assert_eq!(set.orbit_count(), 2);
    }
    assert_eq!(res.predicted_orbits, Some(2));
    assert_eq!(res.persists_up_to, Some(0.2));
    assert_eq!(res.first_change, None);
}

#[test]
fn pendulum_continuation_monotone() {
    let grid: Vec<f64> = (0..=6).map(|i| 0.05 * i as f64).collect();
    let res = continuation(&pendulum_request(1.0, 0.0), &grid).unwrap();
    let mut last = 0.0;
    for node in &res.nodes {
        let NodeOutcome::Solved(set) = &node.outcome else { panic!("{:?}", node.outcome) };
        assert_eq!(set.orbit_count(), 1);
        let r = set.points[0].velocity.as_ref().unwrap().xi().coords()[0];
        assert!(r >= last);
        assert!((r - pendulum::solve_r(1.0, node.lambda).unwrap().r).abs() < 1e-10);
        last = r;
    }
}

#[test]
fn continuation_grid_validation() {
    let req = cylinder_request(3, 0.0);
    assert!(continuation(&req, &[]).is_err());
    assert!(continuation(&req, &[0.1, 0.05]).is_err());
    assert!(continuation(&req, &[-0.1, 0.05]).is_err());
}

#[test]
fn rotated_pendulum_seed_gives_same_orbit() {
    let mut req = pendulum_request(1.0, 0.1);
    let g = GroupElement::rotation(GroupId::SO2, 1.1).unwrap();
    req.seed = models::act(&g, &req.seed).unwrap();
    let set = find_relative_equilibria(&req).unwrap();
    assert_eq!(set.orbit_count(), 1);
}

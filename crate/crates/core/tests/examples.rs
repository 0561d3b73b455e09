//! Worked examples with values frozen from the dense and brute-force
//! references in `owlball-oracle`. Each test also re-derives its value from
//! the reference so a drift in either side shows up here.

use owlball::jacobian::{cone_jacobian, BlockPartition, ConeJacobian};
use owlball::{
    ball_jacobian, dual_norm, is_trivial, owl_norm, project_ball, project_cone, prox_owl,
    signed_sort, solve_root, ssn, Instance, RootfindParams, SsnParams, Weights,
};
use owlball_oracle::closed_form::{linf_ball_projection, soft_threshold};
use owlball_oracle::{dense_affine_jacobian, dense_cone_jacobian, oracle_ball, oracle_cone};

fn weights(v: &[f64]) -> Weights {
    Weights::new(v.to_vec()).unwrap()
}

fn instance(b: &[f64], lam: &[f64], tau: f64) -> Instance {
    Instance::new(b.to_vec(), weights(lam), tau).unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn dense(op: &ConeJacobian) -> Vec<Vec<f64>> {
    let n = op.dim();
    (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            op.apply(&e).unwrap()
        })
        .collect()
}

#[test]
fn owl_norm_of_a_small_vector() {
    assert_eq!(owl_norm(&[-3.0, 5.0], &weights(&[2.0, 1.0])).unwrap(), 13.0);
    assert_eq!(
        owl_norm(&[0.0; 4], &weights(&[3.0, 2.0, 1.0, 0.0])).unwrap(),
        0.0
    );
}

#[test]
fn signed_sort_examples() {
    let (s, w) = signed_sort(&[-3.0, 1.0, 2.0]);
    assert_eq!(w, vec![3.0, 2.0, 1.0]);
    assert_eq!(s.apply_inverse(&w).unwrap(), vec![-3.0, 1.0, 2.0]);

    let (s, w) = signed_sort(&[5.0, 2.0, 0.0]);
    assert_eq!(w, vec![5.0, 2.0, 0.0]);
    assert_eq!(s.perm(), &[0, 1, 2]);

    let (s, w) = signed_sort(&[2.0, -2.0]);
    assert_eq!(w, vec![2.0, 2.0]);
    assert_eq!(s.perm(), &[0, 1]);
}

#[test]
fn trivial_gate() {
    assert!(is_trivial(&instance(&[1.0, 0.0], &[1.0, 1.0], 2.0)));
    assert!(!is_trivial(&instance(&[3.0, 1.0], &[1.0, 1.0], 2.0)));
    assert!(is_trivial(&instance(&[1.5, -0.5], &[1.0, 1.0], 2.0)));
}

#[test]
fn cone_projection_examples() {
    for (d, x) in [
        (vec![5.0, 3.0, 1.0], vec![5.0, 3.0, 1.0]),
        (vec![1.0, 3.0, 2.0], vec![2.0, 2.0, 2.0]),
        (vec![-1.0, -2.0, 3.0], vec![0.0, 0.0, 0.0]),
    ] {
        let p = project_cone(&d);
        assert_eq!(p.x(), x.as_slice());
        assert!(close(&oracle_cone(&d).unwrap().x, &x, 1e-12));
    }
}

#[test]
fn active_sets_from_blocks() {
    assert!(project_cone(&[5.0, 3.0, 1.0]).active_set().is_empty());
    assert_eq!(project_cone(&[1.0, 3.0, 2.0]).active_set(), vec![0, 1]);
    assert_eq!(project_cone(&[-1.0, -2.0, 3.0]).active_set(), vec![0, 1, 2]);
}

#[test]
fn cone_jacobian_examples() {
    let third = 1.0 / 3.0;
    let h = cone_jacobian(&project_cone(&[1.0, 3.0, 2.0]));
    let frozen = vec![vec![third; 3]; 3];
    for (col, want) in dense(&h).iter().zip(&frozen) {
        assert!(close(col, want, 1e-15));
    }
    let reference = dense_cone_jacobian(&[0, 1], 3).unwrap();
    assert!(reference.iter().all(|v| (v - third).abs() < 1e-15));
    assert!(close(
        &h.apply(&[3.0, 0.0, 0.0]).unwrap(),
        &[1.0, 1.0, 1.0],
        1e-15
    ));
    assert_eq!(h.curvature(&weights(&[1.0, 1.0, 1.0])).unwrap(), 3.0);

    let last = ConeJacobian::from_partition(BlockPartition::from_active_set(&[2], 3).unwrap());
    assert_eq!(last.diagonal(), vec![1.0, 1.0, 0.0]);
    let reference = dense_cone_jacobian(&[2], 3).unwrap();
    assert_eq!(reference.diagonal().as_slice(), &[1.0, 1.0, 0.0]);

    let zero = cone_jacobian(&project_cone(&[-1.0, -2.0, 3.0]));
    assert_eq!(zero.apply(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);
    assert_eq!(zero.curvature(&weights(&[3.0, 2.0, 1.0])).unwrap(), 0.0);

    let id = cone_jacobian(&project_cone(&[5.0, 3.0, 1.0]));
    assert_eq!(id.curvature(&weights(&[3.0, 2.0, 1.0])).unwrap(), 14.0);
}

#[test]
fn ball_jacobian_on_a_smooth_point() {
    // x* = (2.5, 1.5), no active constraint: S = I - lambda lambda^T / 2.
    let inst = instance(&[3.0, 2.0], &[1.0, 1.0], 4.0);
    let w = signed_sort(inst.b()).1;
    let rep = ssn::solve(&w, inst.weights(), inst.tau(), &SsnParams::default()).unwrap();
    assert!(close(rep.x_star(), &[2.5, 1.5], 1e-15));
    let s = ball_jacobian(&inst, &rep).unwrap();
    let reference = dense_affine_jacobian(&[], &[1.0, 1.0]).unwrap();
    let frozen = [[0.5, -0.5], [-0.5, 0.5]];
    for j in 0..2 {
        let mut e = [0.0; 2];
        e[j] = 1.0;
        let col = s.apply(&e).unwrap();
        for i in 0..2 {
            assert!((col[i] - frozen[i][j]).abs() < 1e-15);
            assert!((reference[(i, j)] - frozen[i][j]).abs() < 1e-15);
        }
    }
    assert!(close(&s.apply(&[1.0, 0.0]).unwrap(), &[0.5, -0.5], 1e-15));
    assert!(close(&s.apply(&[1.0, 1.0]).unwrap(), &[0.0, 0.0], 1e-15));
}

#[test]
fn ball_jacobian_on_a_kink() {
    // x* = (2, 0) with x_2 >= 0 active: S = 0.
    let inst = instance(&[3.0, 1.0], &[1.0, 1.0], 2.0);
    let r = project_ball(&inst, &SsnParams::default()).unwrap();
    assert_eq!(r.x, vec![2.0, 0.0]);
    assert_eq!(r.report().unwrap().projection().active_set(), vec![1]);
    let s = r.jacobian(inst.weights()).unwrap();
    let reference = dense_affine_jacobian(&[1], &[1.0, 1.0]).unwrap();
    assert!(reference.amax() < 1e-15);
    assert_eq!(s.apply(&[1.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    assert_eq!(s.apply(&[0.0, 1.0]).unwrap(), vec![0.0, 0.0]);
}

#[test]
fn smooth_identity_permutation_annihilates_lambda() {
    let inst = instance(&[4.0, 3.0, 2.0], &[3.0, 2.0, 1.0], 10.0);
    let r = project_ball(&inst, &SsnParams::default()).unwrap();
    assert!(r.report().unwrap().projection().active_set().is_empty());
    let s = r.jacobian(inst.weights()).unwrap();
    let out = s.apply(&[3.0, 2.0, 1.0]).unwrap();
    assert!(out.iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn dual_function_examples() {
    let (w, lam) = ([3.0, 1.0], weights(&[1.0, 1.0]));
    assert_eq!(ssn::dual_value(0.0, &w, &lam, 2.0).unwrap(), 0.0);
    assert_eq!(ssn::dual_value(-1.0, &w, &lam, 2.0).unwrap(), -1.0);
    assert_eq!(ssn::dual_gradient(0.0, &w, &lam, 2.0).unwrap().0, 2.0);
    assert_eq!(ssn::dual_gradient(-1.0, &w, &lam, 2.0).unwrap().0, 0.0);
    assert_eq!(ssn::dual_gradient(-1e3, &w, &lam, 2.0).unwrap().0, -2.0);
}

#[test]
fn ssn_solves_the_l1_example_in_one_step() {
    let rep = ssn::solve(
        &[3.0, 1.0],
        &weights(&[1.0, 1.0]),
        2.0,
        &SsnParams::default(),
    )
    .unwrap();
    assert!(rep.converged);
    assert_eq!(rep.iterations, 1);
    assert_eq!(rep.y_star, -1.0);
    assert_eq!(rep.x_star(), &[2.0, 0.0]);
    assert_eq!(rep.residual_eta, 0.0);
    let cert = owlball_oracle::oracle_sorted_ball(&[3.0, 1.0], &[1.0, 1.0], 2.0).unwrap();
    assert!(close(&cert.x, &[2.0, 0.0], 1e-12));
}

#[test]
fn projector_examples() {
    let p = SsnParams::default();
    let r = project_ball(&instance(&[1.0, 0.0], &[1.0, 1.0], 2.0), &p).unwrap();
    assert!(r.is_inside());
    assert_eq!(r.x, vec![1.0, 0.0]);

    let b = [-3.0, 1.0];
    let r = project_ball(&instance(&b, &[1.0, 1.0], 2.0), &p).unwrap();
    assert_eq!(r.x, vec![-2.0, 0.0]);
    assert!(close(
        &oracle_ball(&b, &[1.0, 1.0], 2.0).unwrap().x,
        &r.x,
        1e-12
    ));

    let b = [3.0, 1.0];
    let r = project_ball(&instance(&b, &[1.0, 0.0], 2.0), &p).unwrap();
    assert!(close(&r.x, &[2.0, 1.0], 1e-14));
    assert_eq!(linf_ball_projection(&b, 2.0), vec![2.0, 1.0]);
}

#[test]
fn prox_examples() {
    let ones = weights(&[1.0, 1.0]);
    assert_eq!(prox_owl(&[3.0, -1.0], &ones, 0.0).unwrap(), vec![3.0, -1.0]);
    assert_eq!(prox_owl(&[3.0, 1.0], &ones, 1.0).unwrap(), vec![2.0, 0.0]);
    assert_eq!(soft_threshold(&[3.0, 1.0], 1.0), vec![2.0, 0.0]);

    let v = [0.7, -2.0, 1.1, 0.4];
    let lam = weights(&[2.0, 1.0, 1.0, 0.25]);
    let mu = dual_norm(&v, &lam).unwrap();
    assert!(prox_owl(&v, &lam, mu)
        .unwrap()
        .iter()
        .all(|x| x.abs() < 1e-15));
    assert!(prox_owl(&v, &lam, 2.0 * mu)
        .unwrap()
        .iter()
        .all(|x| *x == 0.0));
}

#[test]
fn dual_norm_examples() {
    let y = [0.5, -2.0, 1.25, 0.0];
    assert_eq!(dual_norm(&y, &weights(&[1.0; 4])).unwrap(), 2.0);
    assert_eq!(
        dual_norm(&y, &weights(&[1.0, 0.0, 0.0, 0.0])).unwrap(),
        3.75
    );
    let lam = [2.0, 1.0, 1.0, 0.25];
    let oracle = owlball_oracle::oracle_dual_norm(&y, &lam).unwrap();
    assert!((dual_norm(&y, &weights(&lam)).unwrap() - oracle).abs() < 1e-12);
}

#[test]
fn rootfind_solves_the_l1_example() {
    let r = solve_root(
        &instance(&[3.0, 1.0], &[1.0, 1.0], 2.0),
        &RootfindParams::default(),
    )
    .unwrap();
    assert!((r.mu_star - 1.0).abs() < 1e-9);
    assert!(close(&r.x, &[2.0, 0.0], 1e-9));
}

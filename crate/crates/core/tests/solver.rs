use owlball::experiment::{
    generate_instance, instance_rng, run_experiment, ExperimentConfig, Solver,
};
use owlball::io::{read_vector, write_vector};
use owlball::ssn::{self, dual_gradient, newton_step, SsnParams};
use owlball::{
    owl_norm, project_ball, signed_sort, solve_root, Error, Instance, RootfindParams, Weights,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn small_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.random_range(2..=20);
    let scale = 10f64.powi(rng.random_range(-3..=3));
    let b: Vec<f64> = (0..n)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mut lam: Vec<f64> = (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal).abs())
        .collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    let w = Weights::new(lam).unwrap();
    let tau = rng.random_range(0.01..0.95) * owl_norm(&b, &w).unwrap();
    Instance::new(b, w, tau).unwrap()
}

#[test]
fn small_instances_terminate_on_the_final_piece() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let inst = small_instance(&mut rng);
        let (_, w) = signed_sort(inst.b());
        let (lam, tau) = (inst.weights(), inst.tau());
        let r = ssn::solve(&w, lam, tau, &SsnParams::default()).unwrap();
        assert!(
            r.converged && r.iterations <= 20,
            "{} iterations",
            r.iterations
        );
        let (grad, p) = dual_gradient(r.y_star, &w, lam, tau).unwrap();
        assert!(grad.abs() <= 1e-12 * (1.0 + tau));
        // One more Newton step stays on the same piece and keeps the residual.
        let y = newton_step(r.y_star, &w, lam, tau).unwrap();
        let (next, q) = dual_gradient(y, &w, lam, tau).unwrap();
        assert_eq!(q.active_set(), p.active_set());
        assert!(next.abs() <= 1e-12 * (1.0 + tau));
    }
}

#[test]
fn root_finder_needs_more_evaluations_than_newton_iterations() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let total = 300;
    let mut more = 0;
    for _ in 0..total {
        let inst = small_instance(&mut rng);
        let iters = project_ball(&inst, &SsnParams::default())
            .unwrap()
            .report()
            .map_or(0, |r| r.iterations);
        let evals = solve_root(&inst, &RootfindParams::default())
            .unwrap()
            .evaluations;
        more += usize::from(evals > iters);
    }
    assert!(more * 10 >= total * 9, "{more} of {total}");
}

#[test]
fn generated_radius_is_a_fraction_of_the_norm() {
    let mut rng = instance_rng(3, 0, 0);
    let inst = generate_instance(1000, 1.0, 0.5, &mut rng).unwrap();
    let kappa = owl_norm(inst.b(), inst.weights()).unwrap();
    assert!((0.5 * kappa - inst.tau()).abs() <= 1e-10 * inst.tau());
    let lam = inst.weights().as_slice();
    assert!(lam.windows(2).all(|p| p[0] >= p[1]) && lam[lam.len() - 1] >= 0.0);

    let again = generate_instance(1000, 1.0, 0.5, &mut instance_rng(3, 0, 0)).unwrap();
    assert_eq!(again.b(), inst.b());
    let other = generate_instance(1000, 1.0, 0.5, &mut instance_rng(3, 0, 1)).unwrap();
    assert_ne!(other.b(), inst.b());
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(matches!(
        Weights::new(vec![1.0, 2.0]),
        Err(Error::UnsortedWeights { index: 0 })
    ));
    assert!(matches!(
        Weights::new(vec![0.0, 0.0]),
        Err(Error::ZeroWeights)
    ));
    let w = Weights::ones(2).unwrap();
    assert!(matches!(
        Instance::new(vec![1.0, 2.0], w.clone(), 0.0),
        Err(Error::InvalidRadius(_))
    ));
    assert!(matches!(
        Instance::new(vec![1.0], w.clone(), 1.0),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(matches!(
        Instance::new(vec![f64::NAN, 1.0], w.clone(), 1.0),
        Err(Error::NonFiniteInput(0))
    ));
    let bad = SsnParams {
        mu: 0.7,
        ..SsnParams::default()
    };
    assert!(matches!(
        ssn::solve(&[3.0, 1.0], &w, 1.0, &bad),
        Err(Error::InvalidParams(_))
    ));
}

#[test]
fn exhausted_iteration_budget_surfaces_as_an_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let inst = generate_instance(500, 1.0, 0.1, &mut rng).unwrap();
    let params = SsnParams {
        max_iter: 1,
        y0: -50.0,
        ..SsnParams::default()
    };
    assert!(matches!(
        project_ball(&inst, &params),
        Err(Error::NotConverged { .. })
    ));
}

#[test]
fn vector_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let values = vec![0.1, -2.5e-300, 1.0 / 3.0, f64::MAX, -0.0, 7.0];
    for name in ["v.csv", "v.f64"] {
        let path = dir.path().join(name);
        write_vector(&path, &values).unwrap();
        let back = read_vector(&path).unwrap();
        assert_eq!(back.len(), values.len());
        assert!(
            back.iter()
                .zip(&values)
                .all(|(a, b)| a.to_bits() == b.to_bits()),
            "{name}"
        );
    }
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1.0\nnope\n").unwrap();
    assert!(matches!(
        read_vector(&bad),
        Err(Error::Parse { line: 2, .. })
    ));
    assert!(matches!(
        read_vector(dir.path().join("v.txt")),
        Err(Error::UnknownExtension { .. })
    ));
}

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        n_list: vec![200, 1000],
        sigma_list: vec![1e-3, 1.0],
        beta_list: vec![0.1, 0.8],
        reps: 1,
        seed: 5,
        ..ExperimentConfig::default()
    }
}

#[test]
fn experiments_are_deterministic_apart_from_timings() {
    let strip = |cfg: &ExperimentConfig| {
        run_experiment(cfg)
            .unwrap()
            .records
            .into_iter()
            .map(|r| {
                (
                    r.beta,
                    r.n,
                    r.sigma,
                    r.solver,
                    r.rep,
                    r.iters_or_evals,
                    r.eta.to_bits(),
                    r.objective.to_bits(),
                )
            })
            .collect::<Vec<_>>()
    };
    let cfg = small_config();
    let first = strip(&cfg);
    assert_eq!(first.len(), 16);
    assert_eq!(first, strip(&cfg));
    assert_eq!(first, strip(&ExperimentConfig { threads: 3, ..cfg }));
}

#[test]
fn experiment_tables_render() {
    let cfg = ExperimentConfig {
        rootfind: RootfindParams {
            tol: 1e-12,
            ..RootfindParams::default()
        },
        ..small_config()
    };
    let table = run_experiment(&cfg).unwrap();
    assert!(!table.any_failure());
    assert!(table.cells.iter().all(|c| !c.gap_exceeded()));

    let mut csv = Vec::new();
    table.write_csv(&mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    assert!(csv.starts_with("beta,n,sigma,solver,rep,time_s,iters_or_evals,eta,objective\n"));
    assert_eq!(csv.lines().count(), 17);

    let mut md = Vec::new();
    table.write_markdown(&mut md).unwrap();
    let md = String::from_utf8(md).unwrap();
    assert!(md.contains("time rootfind (s)") && md.contains("max gap"));
    assert_eq!(md.lines().count(), 2 + 8);
}

#[test]
fn newton_only_table_omits_the_baseline_columns() {
    let cfg = ExperimentConfig {
        solvers: vec![Solver::Ssn],
        ..small_config()
    };
    let table = run_experiment(&cfg).unwrap();
    assert!(table
        .cells
        .iter()
        .all(|c| c.rootfind.is_none() && c.max_objective_gap.is_none()));
    let mut md = Vec::new();
    table.write_markdown(&mut md).unwrap();
    let md = String::from_utf8(md).unwrap();
    assert!(md.contains("time ssn (s)"));
    assert!(!md.contains("rootfind") && !md.contains("evals") && !md.contains("gap"));
}

#[test]
fn invalid_configurations_are_rejected() {
    let bad = [
        ExperimentConfig {
            beta_list: vec![1.0],
            ..small_config()
        },
        ExperimentConfig {
            reps: 0,
            ..small_config()
        },
        ExperimentConfig {
            n_list: vec![],
            ..small_config()
        },
        ExperimentConfig {
            threads: 0,
            ..small_config()
        },
        ExperimentConfig {
            sigma_list: vec![-1.0],
            ..small_config()
        },
    ];
    for cfg in bad {
        assert!(matches!(run_experiment(&cfg), Err(Error::InvalidConfig(_))));
    }
    assert!("newton".parse::<Solver>().is_err());
}

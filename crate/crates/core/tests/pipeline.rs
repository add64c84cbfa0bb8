use swg_core::analysis::{
    convergence_table, discrete_l2_error, dmp_check, has_reaction, mesh_for_spacing, solve_on_mesh,
    Discretization, RunOptions,
};
use swg_core::assembly::{assemble, AssemblyConfig, BcMode};
use swg_core::mesh::TensorMesh;
use swg_core::problems::{get_problem, ConstantCoefficients, ProblemId, ProblemSpec};
use swg_core::solver::{solve, SolveConfig, SolveMethod};

#[test]
fn single_cell_returns_boundary_values() {
    let p = get_problem(ProblemId::Tc1).unwrap();
    let mesh = TensorMesh::uniform(1).unwrap();
    let sys = assemble(&mesh, &p, &AssemblyConfig::new(1.0)).unwrap();
    let sol = solve(&sys, &SolveConfig::default()).unwrap();
    let u = &p.exact.as_ref().unwrap().value;
    for (e, v) in sys.dof_map.edges.iter().zip(&sol.values) {
        assert_eq!(*v, u(e.midpoint[0], e.midpoint[1]));
    }
}

#[test]
fn quadratic_reproduced_at_kappa_four() {
    let p = get_problem(ProblemId::Tc1).unwrap();
    let mesh = TensorMesh::uniform(8).unwrap();
    let sys = assemble(&mesh, &p, &AssemblyConfig::new(4.0)).unwrap();
    let sol = solve(&sys, &SolveConfig::default()).unwrap();
    assert!(sol.residual_norm <= 1e-12);
    let u = &p.exact.as_ref().unwrap().value;
    for (e, v) in sys.dof_map.edges.iter().zip(&sol.values) {
        assert!((v - u(e.midpoint[0], e.midpoint[1])).abs() <= 1e-12);
    }
}

#[test]
fn direct_and_iterative_agree_on_builtins() {
    for id in ProblemId::BUILT_IN {
        let p = get_problem(id).unwrap();
        let mesh = mesh_for_spacing(p.domain, 16).unwrap();
        let sys = assemble(&mesh, &p, &AssemblyConfig::new(0.7)).unwrap();
        let d = solve(
            &sys,
            &SolveConfig::default().with_method(SolveMethod::Direct),
        )
        .unwrap();
        let it = solve(
            &sys,
            &SolveConfig::default().with_method(SolveMethod::Iterative),
        )
        .unwrap();
        let diff = d
            .values
            .iter()
            .zip(&it.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-10, "{id}: {diff:e}");
        assert_eq!(d.iterations, 0);
    }
}

#[test]
fn convergence_table_tc1_rates() {
    let p = get_problem(ProblemId::Tc1).unwrap();
    let rows = convergence_table(
        &p,
        &RunOptions::new(Discretization::Swg, 0.7),
        &[8, 16, 32, 64],
    )
    .unwrap();
    assert_eq!(rows[0].l2_rate, None);
    for r in &rows[1..] {
        let rate = r.l2_rate.unwrap();
        assert!((1.75..=2.15).contains(&rate), "{rate}");
    }
    let rows = convergence_table(&p, &RunOptions::new(Discretization::Swg, 4.0), &[8, 16]).unwrap();
    assert!(rows
        .iter()
        .all(|r| r.l2_error <= 1e-12 && r.l2_rate.is_none()));
}

#[test]
fn convergence_table_rejects_bad_sizes() {
    let p = get_problem(ProblemId::Tc1).unwrap();
    let o = RunOptions::new(Discretization::Swg, 1.0);
    assert!(convergence_table(&p, &o, &[16, 8]).is_err());
    assert!(convergence_table(&p, &o, &[1, 2]).is_err());
    assert!(convergence_table(&p, &o, &[]).is_err());
}

#[test]
fn tc3_uses_inverse_meshsize() {
    let p = get_problem(ProblemId::Tc3).unwrap();
    let mesh = mesh_for_spacing(p.domain, 4).unwrap();
    assert_eq!(mesh.nx(), 8);
    let sol = solve_on_mesh(&p, &mesh, &RunOptions::new(Discretization::Swg, 4.0)).unwrap();
    let r = dmp_check(&sol.values, &mesh, has_reaction(&p, &mesh)).unwrap();
    assert!(r.c_nonneg && r.satisfied);
    assert!(r.boundary_max < 0.0 && r.bound() == 0.0);
}

#[test]
fn dmp_spot_values() {
    let p = get_problem(ProblemId::Fd2).unwrap();
    let mesh = TensorMesh::uniform(8).unwrap();
    let sol = solve_on_mesh(&p, &mesh, &RunOptions::new(Discretization::Fd7, 0.7)).unwrap();
    let r = dmp_check(&sol.values, &mesh, false).unwrap();
    assert!((r.boundary_max - 0.9435).abs() < 5e-4);
    assert!((r.interior_max - 0.7448).abs() < 5e-4);

    let p = get_problem(ProblemId::Fd1).unwrap();
    let mesh = TensorMesh::uniform(32).unwrap();
    let sol = solve_on_mesh(&p, &mesh, &RunOptions::new(Discretization::Fd7, 4.0)).unwrap();
    let r = dmp_check(&sol.values, &mesh, false).unwrap();
    assert!((r.interior_max + 4.6e-4).abs() < 1e-5);
    assert!(r.satisfied);
}

#[test]
fn penalty_leaves_boundary_footprint() {
    let p = get_problem(ProblemId::Fd1).unwrap();
    let mesh = TensorMesh::uniform(8).unwrap();
    let mut o = RunOptions::new(Discretization::Swg, 0.7);
    o.bc_mode = BcMode::Penalty { weight: 1e8 };
    let sol = solve_on_mesh(&p, &mesh, &o).unwrap();
    let r = dmp_check(&sol.values, &mesh, false).unwrap();
    assert!(
        r.boundary_max < 0.0 && r.boundary_max > -1e-9,
        "{}",
        r.boundary_max
    );
    assert!(r.satisfied);
}

#[test]
fn fd_rejects_other_domains() {
    let p = get_problem(ProblemId::Tc3).unwrap();
    let mesh = mesh_for_spacing(p.domain, 2).unwrap();
    assert!(solve_on_mesh(&p, &mesh, &RunOptions::new(Discretization::Fd5, 4.0)).is_err());
}

#[test]
fn constant_solution_of_custom_problem() {
    // c g = f makes u = g exact; nonuniform grid with convection
    let p = ProblemSpec::custom(ConstantCoefficients {
        alpha: [[2.0, 0.0], [0.0, 0.5]],
        beta: [1.0, -3.0],
        c: 2.0,
        f: 3.0,
        g: 1.5,
        ..Default::default()
    })
    .unwrap();
    let mesh = TensorMesh::new(vec![0.0, 0.1, 0.45, 1.0], vec![0.0, 0.3, 0.6, 0.8, 1.0]).unwrap();
    let sol = solve_on_mesh(&p, &mesh, &RunOptions::new(Discretization::Swg, 1.0)).unwrap();
    assert!(sol.values.iter().all(|v| (v - 1.5).abs() < 1e-12));
    let uniform = TensorMesh::uniform(4).unwrap();
    let sol = solve_on_mesh(&p, &uniform, &RunOptions::new(Discretization::Swg, 1.0)).unwrap();
    assert!(discrete_l2_error(&sol.values, &uniform, &|_, _| 1.5).unwrap() < 1e-12);
}

use proptest::prelude::*;

use convdiff::fd1d::{assemble_1d, solve_1d, SchemeKind};
use convdiff::fd2d::{assemble_upwind_2d, solve_2d, Grid2DSolution};
use convdiff::fem2d::{choose_delta, solve_fem, DeltaStrategy, ElementGeometry, FemSpace};
use convdiff::harness::{
    exact_error_2d, oscillation_amplitude, run_convergence, two_mesh_error_2d, ExperimentConfig,
};
use convdiff::linalg::{is_m_matrix, solve_sparse, solve_tridiagonal, CsrMatrix, SparseSystem, TridiagonalSystem};
use convdiff::mesh::{
    bakhvalov_mesh_1d, shishkin_mesh_1d, shishkin_with_transition, signed_area, tensor_shishkin_2d, triangulate, uniform_mesh_1d,
    BakhvalovParams, TensorMesh2D,
};
use convdiff::problems::{classify_boundary, layer_profile, manufactured_2d, model_problem_p1, p1_exact, ProblemSpec1D, ProblemSpec2D};
use convdiff::Execution;

fn eps_strategy() -> impl Strategy<Value = f64> {
    (-10.0f64..0.0).prop_map(|e| 10f64.powf(e))
}

fn even_n() -> impl Strategy<Value = usize> {
    (2usize..=256).prop_map(|k| 2 * k)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn shishkin_transition_point(n in even_n(), eps in eps_strategy(), b in 0.5f64..4.0) {
        let m = shishkin_mesh_1d(n, eps, b).unwrap();
        let lambda = (4.0 * eps * (n as f64).ln() / b).min(0.5);
        prop_assert!((m.nodes()[n / 2] - (1.0 - lambda)).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn shishkin_parts_are_uniform(n in even_n(), eps in eps_strategy(), b in 0.5f64..4.0) {
        let m = shishkin_mesh_1d(n, eps, b).unwrap();
        let w: Vec<f64> = m.widths().collect();
        for part in [&w[..n / 2], &w[n / 2..]] {
            // Widths are differences of nodes of size O(1).
            let h = part[0];
            prop_assert!(part.iter().all(|&x| (x - h).abs() <= 4.0 * f64::EPSILON), "{part:?}");
        }
    }

    #[test]
    fn bakhvalov_grading(n in even_n(), eps in eps_strategy()) {
        let m = bakhvalov_mesh_1d(n, eps, 1.0, BakhvalovParams::default()).unwrap();
        prop_assert!(m.nodes().windows(2).all(|w| w[1] > w[0]));
        // The layer sits at x = 1, so widths shrink towards it.
        let w: Vec<f64> = m.widths().collect();
        prop_assert!(w.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-9)), "{w:?}");
    }

    #[test]
    fn triangulation_euler_count(nx in 1usize..20, ny in 1usize..20) {
        let mesh = TensorMesh2D::new(uniform_mesh_1d(nx).unwrap(), uniform_mesh_1d(ny).unwrap());
        let t = triangulate(&mesh);
        let v = t.vertices.len() as i64;
        let e = t.edges().len() as i64;
        let f = t.triangles.len() as i64;
        prop_assert_eq!(v - e + f, 1);
        prop_assert_eq!(f as usize, 2 * nx * ny);
    }

    #[test]
    fn p1_exact_satisfies_the_ode(eps in 1e-3f64..1.0, x in 0.01f64..0.99) {
        let h = 1e-3 * eps;
        let u = |t: f64| p1_exact(eps, t);
        let d2 = (u(x + h) - 2.0 * u(x) + u(x - h)) / (h * h);
        let d1 = (u(x + h) - u(x - h)) / (2.0 * h);
        let residual = -eps * d2 + d1 - 2.0;
        // Stencil truncation O(h²) times the layer derivatives plus cancellation
        // in the second difference.
        let layer = 2.0 * (-(1.0 - x - h) / eps).exp();
        let bound = h * h * layer / eps.powi(3) + 16.0 * f64::EPSILON * (eps / (h * h) + 1.0 / h);
        prop_assert!(residual.abs() <= bound, "residual {residual:e} bound {bound:e}");
    }

    #[test]
    fn boundary_classes_ignore_positive_scaling(b1 in -5.0f64..5.0, b2 in -5.0f64..5.0, s in 1e-3f64..1e3) {
        prop_assume!(b1.hypot(b2) > 1e-6);
        let a = classify_boundary([b1, b2]).unwrap();
        let c = classify_boundary([s * b1, s * b2]).unwrap();
        let mut all: Vec<_> = a.inflow.iter().chain(&a.outflow).chain(&a.tangential).copied().collect();
        all.sort();
        all.dedup();
        prop_assert_eq!(all.len(), 4);
        prop_assert_eq!(a, c);
    }

    #[test]
    fn layer_profile_is_monotone_before_the_transition(eps in 1e-8f64..1e-2, n in even_n()) {
        let lambda = shishkin_mesh_1d(n, eps, 1.0).unwrap().lambda();
        let values: Vec<f64> = (0..=100).map(|k| layer_profile(eps, 1.0, k as f64 / 100.0 * (1.0 - lambda))).collect();
        prop_assert!(values.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn ilin_is_nodally_exact(eps in eps_strategy(), k in 0usize..3) {
        let n = [8, 16, 32][k];
        let p = model_problem_p1(eps).unwrap();
        let err = solve_1d(&p, &uniform_mesh_1d(n).unwrap(), SchemeKind::Ilin).unwrap().max_error(&|x| p1_exact(eps, x));
        prop_assert!(err <= 1e-10, "{err:e}");
    }

    #[test]
    fn upwind_is_central_with_extra_diffusion(eps in eps_strategy(), n in 2usize..128) {
        let h = 1.0 / n as f64;
        let mesh = uniform_mesh_1d(n).unwrap();
        let up = assemble_1d(&model_problem_p1(eps).unwrap(), &mesh, SchemeKind::Upwind).unwrap();
        let central = assemble_1d(
            &ProblemSpec1D::constant(eps + h / 2.0, 1.0, 2.0, 0.0, 0.0).unwrap(),
            &mesh,
            SchemeKind::Central,
        )
        .unwrap();
        // Widths are differences of O(1) nodes, so each carries a relative
        // rounding error of order EPS/h that the entries inherit.
        let size = up.diag.iter().chain(&up.rhs).fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 8.0 * f64::EPSILON / h * size;
        prop_assert!(max_abs_diff(&up.diag, &central.diag) <= tol);
        prop_assert!(max_abs_diff(&up.lower, &central.lower) <= tol);
        prop_assert!(max_abs_diff(&up.upper, &central.upper) <= tol);
        prop_assert!(max_abs_diff(&up.rhs, &central.rhs) <= tol);
    }

    #[test]
    fn m_matrix_schemes_preserve_sign(
        eps in eps_strategy(),
        n in even_n(),
        f in 0.0f64..5.0,
        ul in 0.0f64..2.0,
        ur in 0.0f64..2.0,
        mesh_kind in 0usize..3,
    ) {
        let p = ProblemSpec1D::new(eps, |x| 1.0 + x * x, 1.0, move |x| f * (1.0 - x), ul, ur).unwrap();
        let mesh = match mesh_kind {
            0 => uniform_mesh_1d(n).unwrap(),
            1 => shishkin_mesh_1d(n, eps, 1.0).unwrap(),
            _ => bakhvalov_mesh_1d(n, eps, 1.0, BakhvalovParams::default()).unwrap(),
        };
        for scheme in [SchemeKind::Upwind, SchemeKind::Central] {
            let sys = assemble_1d(&p, &mesh, scheme).unwrap();
            if is_m_matrix(&sys).is_candidate {
                let sol = solve_1d(&p, &mesh, scheme).unwrap();
                prop_assert!(sol.values.iter().all(|&v| v >= 0.0), "{scheme:?}");
            }
        }
    }

    #[test]
    fn m_matrix_tridiagonal_solves_are_nonnegative(
        rows in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..3.0), 1..60)
    ) {
        let n = rows.len();
        let lower: Vec<f64> = rows[1..].iter().map(|r| -r.0).collect();
        let upper: Vec<f64> = rows[..n - 1].iter().map(|r| -r.1).collect();
        let diag: Vec<f64> = rows.iter().map(|r| r.0 + r.1 + 0.01 + r.2).collect();
        let rhs: Vec<f64> = rows.iter().map(|r| r.3).collect();
        let sys = TridiagonalSystem::new(lower, diag, upper, rhs).unwrap();
        prop_assert!(is_m_matrix(&sys).is_candidate);
        let x = solve_tridiagonal(&sys).unwrap();
        prop_assert!(x.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn tridiagonal_and_sparse_solvers_agree(
        rows in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, 0.1f64..2.0, -5.0f64..5.0), 1..120)
    ) {
        let n = rows.len();
        let lower: Vec<f64> = rows[1..].iter().map(|r| r.0).collect();
        let upper: Vec<f64> = rows[..n - 1].iter().map(|r| r.1).collect();
        let diag: Vec<f64> = rows.iter().map(|r| r.0.abs() + r.1.abs() + r.2).collect();
        let rhs: Vec<f64> = rows.iter().map(|r| r.3).collect();
        let sys = TridiagonalSystem::new(lower, diag, upper, rhs).unwrap();
        let a = solve_tridiagonal(&sys).unwrap();
        let b = solve_sparse(&sys.to_sparse(), 1e-13).unwrap().values;
        prop_assert!(max_abs_diff(&a, &b) <= 1e-10);
    }

    #[test]
    fn csr_rows_are_sorted_without_zeros(
        entries in prop::collection::vec((0usize..12, 0usize..12, -2i32..3), 0..80)
    ) {
        let triplets: Vec<(usize, usize, f64)> = entries.iter().map(|&(i, j, v)| (i, j, v as f64)).collect();
        let m = CsrMatrix::from_triplets(12, triplets.clone());
        let mut dense = [[0.0; 12]; 12];
        for (i, j, v) in triplets {
            dense[i][j] += v;
        }
        for (i, row) in dense.iter().enumerate() {
            let cols: Vec<(usize, f64)> = m.row(i).collect();
            prop_assert!(cols.windows(2).all(|w| w[0].0 < w[1].0));
            prop_assert!(cols.iter().all(|&(_, v)| v != 0.0));
            for (j, &v) in row.iter().enumerate() {
                prop_assert_eq!(m.get(i, j), v);
            }
        }
    }

    #[test]
    fn element_geometry_is_consistent(
        p in prop::array::uniform3((0.0f64..1.0, 0.0f64..1.0)),
    ) {
        let corners = p.map(|(x, y)| [x, y]);
        let area = signed_area(&corners);
        prop_assume!(area > 1e-6);
        let g = ElementGeometry::new(&corners, 0).unwrap();
        prop_assert!((g.area - area).abs() <= 1e-15);
        for d in 0..2 {
            let sum: f64 = g.gradients.iter().map(|v| v[d]).sum();
            let scale: f64 = g.gradients.iter().map(|v| v[d].abs()).sum();
            prop_assert!(sum.abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn delta_is_never_negative(
        p in prop::array::uniform3((0.0f64..1.0, 0.0f64..1.0)),
        eps in eps_strategy(),
        theta in 0.0f64..std::f64::consts::FRAC_PI_2,
        c in 0.0f64..10.0,
        which in 0usize..3,
    ) {
        let corners = p.map(|(x, y)| [x, y]);
        prop_assume!(signed_area(&corners) > 1e-6);
        let s = [DeltaStrategy::GalerkinZero, DeltaStrategy::CoarseHalfH, DeltaStrategy::UserConstant(c)][which];
        prop_assert!(choose_delta(&corners, eps, [theta.cos(), theta.sin()], s).unwrap() >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fd2d_maximum_principle(
        eps in eps_strategy(),
        k in 1usize..5,
        b1 in 0.2f64..3.0,
        b2 in 0.2f64..3.0,
        f0 in 0.0f64..3.0,
        g0 in 0.0f64..1.0,
        shishkin in any::<bool>(),
    ) {
        let n = 4 * k;
        let p = ProblemSpec2D::new(eps, [b1, b2], move |x, y| f0 * x * (1.0 - y), move |x, y| g0 * (x + y)).unwrap();
        let mesh = if shishkin { tensor_shishkin_2d(n, eps, b1, b2).unwrap() } else { TensorMesh2D::uniform(n).unwrap() };
        prop_assert!(is_m_matrix(&assemble_upwind_2d(&p, &mesh).unwrap()).is_candidate);
        let sol = solve_2d(&p, &mesh).unwrap();
        prop_assert!(sol.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn manufactured_source_matches_the_operator(eps in prop::sample::select(vec![0.1, 0.05]), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let b = [1.0, 0.7];
        let p = manufactured_2d(eps, b).unwrap();
        let u = p.exact().unwrap();
        let h = 1e-5 * eps.sqrt();
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        for _ in 0..100 {
            let (x, y) = (rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95));
            let uxx = (u(x + h, y) - 2.0 * u(x, y) + u(x - h, y)) / (h * h);
            let uyy = (u(x, y + h) - 2.0 * u(x, y) + u(x, y - h)) / (h * h);
            let ux = (u(x + h, y) - u(x - h, y)) / (2.0 * h);
            let uy = (u(x, y + h) - u(x, y - h)) / (2.0 * h);
            let lhs = -eps * (uxx + uyy) + b[0] * ux + b[1] * uy;
            let rel = (lhs - p.f(x, y)).abs() / (1.0 + p.f(x, y).abs());
            prop_assert!(rel < 1e-5, "at ({x}, {y}): {rel:e}");
        }
    }
}

fn sweep(mesh: &str, scheme: &str, problem: &str, ns: &[usize], eps: &[f64]) -> convdiff::harness::ConvergenceTable {
    let cfg = ExperimentConfig::from_json(&format!(
        r#"{{"problem": "{problem}", "scheme": "{scheme}", "mesh": "{mesh}", "N": {ns:?}, "eps": {eps:?}}}"#
    ))
    .unwrap();
    run_convergence(&cfg).unwrap()
}

#[test]
fn shishkin_sweep_is_eps_uniform() {
    let t = sweep("shishkin", "upwind", "p1", &[32, 64, 128, 256], &[1e-4, 1e-6, 1e-8]);
    for n in [32, 64, 128, 256] {
        assert!(t.eps_spread(n).unwrap() < 3.0);
    }
}

#[test]
fn bakhvalov_rates_beat_shishkin_rates() {
    let ns = [32, 64, 128, 256];
    let eps = [1e-4, 1e-8];
    let b = sweep("bakhvalov", "upwind", "p1", &ns, &eps);
    let s = sweep("shishkin", "upwind", "p1", &ns, &eps);
    for &e in &eps {
        for &n in &ns[..ns.len() - 1] {
            let rb = b.row(e, n).unwrap().rate_plain.unwrap();
            let rs = s.row(e, n).unwrap().rate_plain.unwrap();
            assert!(rb > rs, "eps={e} N={n}: {rb} vs {rs}");
        }
    }
}

#[test]
fn identical_configs_give_identical_csv() {
    let a = sweep("shishkin", "fd2d-upwind", "mms2d", &[8, 16], &[1e-3, 1e-6]).to_csv();
    let b = sweep("shishkin", "fd2d-upwind", "mms2d", &[8, 16], &[1e-3, 1e-6]).to_csv();
    assert_eq!(a, b);
    // The largest N of each eps has no successor, so both rate cells are empty.
    let last_rows: Vec<&str> = a.lines().filter(|l| l.contains(",16,")).collect();
    assert_eq!(last_rows.len(), 2);
    assert!(last_rows.iter().all(|l| l.ends_with(",,")));
}

#[test]
fn fd2d_errors_are_eps_uniform() {
    for n in [16, 32] {
        let errors: Vec<f64> = [1e-4, 1e-6, 1e-8]
            .iter()
            .map(|&eps| {
                let p = manufactured_2d(eps, [1.0, 1.0]).unwrap();
                solve_2d(&p, &tensor_shishkin_2d(n, eps, 1.0, 1.0).unwrap()).unwrap().max_error(p.exact().unwrap())
            })
            .collect();
        let max = errors.iter().copied().fold(f64::MIN, f64::max);
        let min = errors.iter().copied().fold(f64::MAX, f64::min);
        assert!(max < 3.0 * min, "N={n}: {errors:?}");
    }
}

#[test]
fn upwind_smears_the_layer() {
    let eps = 1e-6;
    let n = 16;
    let p = model_problem_p1(eps).unwrap();
    let mesh = uniform_mesh_1d(n).unwrap();
    let up = solve_1d(&p, &mesh, SchemeKind::Upwind).unwrap();
    let ilin = solve_1d(&p, &mesh, SchemeKind::Ilin).unwrap();
    assert!(up.values[n - 1] < ilin.values[n - 1]);
}

#[test]
fn shishkin_upwind_improves_at_tiny_eps() {
    let eps = 1e-8;
    let p = model_problem_p1(eps).unwrap();
    let err = |n| {
        solve_1d(&p, &shishkin_mesh_1d(n, eps, 1.0).unwrap(), SchemeKind::Upwind).unwrap().max_error(&|x| p1_exact(eps, x))
    };
    assert!(err(64) < err(32));
}

fn fem_grid(p: &ProblemSpec2D, mesh: &TensorMesh2D, s: DeltaStrategy) -> Grid2DSolution {
    Grid2DSolution { mesh: mesh.clone(), values: solve_fem(p, &triangulate(mesh), s).unwrap() }
}

#[test]
fn sdfem_on_shishkin_beats_galerkin_oscillations() {
    let eps = 1e-6;
    let n = 32;
    let p = manufactured_2d(eps, [1.0, 1.0]).unwrap();
    let exact = p.exact().unwrap();
    let uniform = TensorMesh2D::uniform(n).unwrap();
    let reference: Vec<f64> = uniform.x_mesh.nodes().iter().map(|&x| exact(x, 0.5)).collect();
    let galerkin = oscillation_amplitude(fem_grid(&p, &uniform, DeltaStrategy::GalerkinZero).row(n / 2), &reference);
    let sdfem = fem_grid(&p, &tensor_shishkin_2d(n, eps, 1.0, 1.0).unwrap(), DeltaStrategy::CoarseHalfH);
    assert!(sdfem.max_error(exact) < galerkin, "{} vs {galerkin}", sdfem.max_error(exact));
}

#[test]
fn fem_l2_rate_for_diffusion_dominated_problem() {
    let t = sweep("uniform", "fem-galerkin", "mms2d", &[8, 32], &[1.0]);
    let l2 = |n| {
        let cfg = ExperimentConfig::from_json(&format!(
            r#"{{"problem": "mms2d", "scheme": "fem-galerkin", "mesh": "uniform", "N": [{n}], "eps": [1.0], "norm": "l2"}}"#
        ))
        .unwrap();
        run_convergence(&cfg).unwrap().rows[0].error.unwrap()
    };
    assert!(t.rows.len() == 2);
    let rate = (l2(8) / l2(32)).log2() / 2.0;
    assert!((1.8..=2.2).contains(&rate), "{rate}");
}

#[test]
fn sdfem_interior_error_falls_faster_than_h_to_five_quarters() {
    let eps = 1e-6;
    let p = manufactured_2d(eps, [1.0, 1.0]).unwrap();
    let errors: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| {
            let sol = fem_grid(&p, &tensor_shishkin_2d(n, eps, 1.0, 1.0).unwrap(), DeltaStrategy::CoarseHalfH);
            exact_error_2d(&sol, p.exact().map(|u| u as &dyn Fn(f64, f64) -> f64), |x, y| x <= 0.5 && y <= 0.5).unwrap()
        })
        .collect();
    for w in errors.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.25, "{errors:?}");
    }
}

#[test]
fn two_mesh_estimate_tracks_true_error() {
    let eps = 1e-6;
    let n = 64;
    let p = manufactured_2d(eps, [1.0, 1.0]).unwrap();
    let coarse_mesh = tensor_shishkin_2d(n, eps, 1.0, 1.0).unwrap();
    let refined = shishkin_with_transition(2 * n, coarse_mesh.x_mesh.lambda()).unwrap();
    let fine_mesh = TensorMesh2D::new(refined.clone(), refined);
    let coarse = solve_2d(&p, &coarse_mesh).unwrap();
    let fine = solve_2d(&p, &fine_mesh).unwrap();
    let truth = coarse.max_error(p.exact().unwrap());
    let proxy = two_mesh_error_2d(&coarse, &fine, |_, _| true).unwrap();
    assert!(proxy <= 4.0 * truth && truth <= 4.0 * proxy, "proxy {proxy:e} truth {truth:e}");
}

#[test]
fn three_by_three_laplacian() {
    // Five-point Laplacian on a 3x3 interior grid with unit spacing and f = 1.
    let n = 9;
    let mut triplets = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let k = 3 * j + i;
            triplets.push((k, k, 4.0));
            if i > 0 { triplets.push((k, k - 1, -1.0)); }
            if i < 2 { triplets.push((k, k + 1, -1.0)); }
            if j > 0 { triplets.push((k, k - 3, -1.0)); }
            if j < 2 { triplets.push((k, k + 3, -1.0)); }
        }
    }
    let sys = SparseSystem::new(CsrMatrix::from_triplets(n, triplets), vec![1.0; n]).unwrap();
    let x = solve_sparse(&sys, 1e-14).unwrap().values;
    // Symmetry gives corner a, edge c, centre d with 4a-2c=1, 4c-2a-d=1, 4d-4c=1.
    let (a, c, d) = (11.0 / 16.0, 7.0 / 8.0, 9.0 / 8.0);
    let expected = [a, c, a, c, d, c, a, c, a];
    assert!(max_abs_diff(&x, &expected) <= 1e-12, "{x:?}");
}

#[test]
fn fem_space_sequential_and_parallel_agree() {
    let eps = 1e-4;
    let p = manufactured_2d(eps, [1.0, 0.5]).unwrap();
    let t = triangulate(&tensor_shishkin_2d(16, eps, 1.0, 0.5).unwrap());
    let space = FemSpace::new(&t).unwrap();
    let a = convdiff::fem2d::solve_fem_with(&p, &t, DeltaStrategy::CoarseHalfH, Execution::Sequential).unwrap();
    let b = convdiff::fem2d::solve_fem_with(&p, &t, DeltaStrategy::CoarseHalfH, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(space.dim(), 15 * 15);
}

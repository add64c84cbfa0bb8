use proptest::prelude::*;

use swg_core::analysis::{local_sign_value, split_pos_neg};
use swg_core::assembly::{assemble_full, AssemblyConfig};
use swg_core::kernels::{
    bilinear, diffusion_matrix, extension_coeffs, load_vector, midpoint_defects, stabilizer_matrix,
    weak_gradient, LocalMatrix, LocalVector,
};
use swg_core::mesh::{ElementGeom, TensorMesh};
use swg_core::problems::{ConstantCoefficients, ProblemSpec};
use swg_core::solver::{solve_linear, SolveConfig, SolveMethod};
use swg_core::sparse::CsrMatrix;

fn geom_strategy() -> impl Strategy<Value = ElementGeom> {
    (1e-3f64..1.0, 1e-3f64..1.0, -2.0f64..2.0, -2.0f64..2.0)
        .prop_map(|(hx, hy, cx, cy)| ElementGeom::from_center([cx, cy], hx, hy))
}

fn local_vec() -> impl Strategy<Value = LocalVector> {
    prop::array::uniform4(-1.0f64..1.0)
}

fn scale(m: &LocalMatrix) -> f64 {
    m.iter().flatten().fold(1.0f64, |a, v| a.max(v.abs()))
}

fn sample_linear(geom: &ElementGeom, a: f64, b: f64, c: f64) -> LocalVector {
    let mids = geom.midpoints();
    let mut v = [0.0; 4];
    for k in 0..4 {
        v[k] = a + b * mids[k][0] + c * mids[k][1];
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn weak_gradient_matches_boundary_integral(geom in geom_strategy(), v in local_vec(), q in prop::array::uniform2(-1.0f64..1.0)) {
        // |T| (grad_w v . q) = sum_i v_i |e_i| (q . n_i) for constant q
        let g = weak_gradient(&geom, &v);
        let lhs = geom.area() * (g[0] * q[0] + g[1] * q[1]);
        let lens = geom.edge_lengths();
        let normals = geom.normals();
        let rhs: f64 = (0..4).map(|i| v[i] * lens[i] * (q[0] * normals[i][0] + q[1] * normals[i][1])).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * (1.0 + rhs.abs()));
    }

    #[test]
    fn extension_reproduces_linears(geom in geom_strategy(), a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
        let v = sample_linear(&geom, a, b, c);
        let e = extension_coeffs(&geom, &v);
        for p in [[geom.center[0] + 0.3 * geom.hx, geom.center[1] - 0.1 * geom.hy], geom.center] {
            let exact = a + b * p[0] + c * p[1];
            prop_assert!((e.eval(&geom, p[0], p[1]) - exact).abs() <= 1e-12);
        }
        prop_assert!(midpoint_defects(&geom, &v).iter().all(|d| d.abs() <= 1e-13));
    }

    #[test]
    fn stabilizer_kills_linears(geom in geom_strategy(), a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, w in local_vec()) {
        let h = geom.hx.max(geom.hy);
        let s = stabilizer_matrix(&geom, h).unwrap();
        let v = sample_linear(&geom, a, b, c);
        prop_assert!(bilinear(&s, &v, &w).abs() <= 1e-13 * scale(&s));
    }

    #[test]
    fn stabilizer_matches_defect_sum(geom in geom_strategy(), u in local_vec(), v in local_vec()) {
        // h^{-1} sum_i |e_i| (u_i - s(u)(M_i)) (v_i - s(v)(M_i)), extensions evaluated directly
        let h = geom.hx.max(geom.hy);
        let s = stabilizer_matrix(&geom, h).unwrap();
        let (eu, ev) = (extension_coeffs(&geom, &u), extension_coeffs(&geom, &v));
        let mids = geom.midpoints();
        let lens = geom.edge_lengths();
        let direct: f64 = (0..4)
            .map(|i| {
                let du = u[i] - eu.eval(&geom, mids[i][0], mids[i][1]);
                let dv = v[i] - ev.eval(&geom, mids[i][0], mids[i][1]);
                lens[i] * du * dv
            })
            .sum::<f64>() / h;
        prop_assert!((bilinear(&s, &u, &v) - direct).abs() <= 1e-13 * scale(&s));
    }

    #[test]
    fn constant_load_sums_to_area(geom in geom_strategy(), f in -3.0f64..3.0) {
        let l = load_vector(&geom, &|_, _| f);
        let sum: f64 = l.iter().sum();
        prop_assert!((sum - f * geom.area()).abs() <= 1e-13 * (1.0 + (f * geom.area()).abs()));
    }

    #[test]
    fn stabilizer_and_diffusion_symmetric_psd(geom in geom_strategy(), a11 in 0.1f64..5.0, a22 in 0.1f64..5.0, v in local_vec()) {
        let h = geom.hx.max(geom.hy);
        let s = stabilizer_matrix(&geom, h).unwrap();
        let a = diffusion_matrix(&geom, &|_, _| [a11, a22]).unwrap();
        for m in [&s, &a] {
            let tol = 1e-13 * scale(m);
            for i in 0..4 {
                for j in 0..4 {
                    prop_assert!((m[i][j] - m[j][i]).abs() <= tol);
                }
            }
            prop_assert!(bilinear(m, &v, &v) >= -tol);
        }
    }

    #[test]
    fn split_reconstructs(v in local_vec()) {
        let (p, m) = split_pos_neg(&v);
        for k in 0..4 {
            prop_assert_eq!(p[k] + m[k], v[k]);
            prop_assert_eq!(p[k] * m[k], 0.0);
            prop_assert!(p[k] >= 0.0 && m[k] <= 0.0);
        }
    }

    #[test]
    fn local_inequality_for_pure_diffusion(hy in 0.01f64..1.0, sigma in 0.5f64..2.0, frac in 0.0f64..1.0, v in local_vec()) {
        // with beta = 0 and c = 0 the admissible range is 0 < kappa <= 4 min(sigma, 1/sigma)
        let geom = ElementGeom::from_center([0.0, 0.0], sigma * hy, hy);
        let h = 2.0 * geom.area() / (geom.hx + geom.hy);
        let kappa = (frac * 4.0 * sigma.min(1.0 / sigma)).max(1e-6);
        let p = ProblemSpec::custom(ConstantCoefficients::default()).unwrap();
        prop_assert!(local_sign_value(&geom, kappa, h, &p, &v).unwrap() >= -1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn full_operator_annihilates_constants(
        xs in prop::collection::vec(0.05f64..1.0, 1..6),
        ys in prop::collection::vec(0.05f64..1.0, 1..6),
        bx in -2.0f64..2.0,
        by in -2.0f64..2.0,
        kappa in 0.1f64..10.0,
    ) {
        let breaks = |steps: &[f64]| {
            let mut b = vec![0.0];
            for s in steps {
                b.push(b.last().unwrap() + s);
            }
            b
        };
        let mesh = TensorMesh::new(breaks(&xs), breaks(&ys)).unwrap();
        let p = ProblemSpec::custom(ConstantCoefficients { beta: [bx, by], ..Default::default() }).unwrap();
        let (triplets, _) = assemble_full(&mesh, &p, &AssemblyConfig::new(kappa)).unwrap();
        let n = mesh.num_edges();
        let a = CsrMatrix::from_triplets(n, n, &triplets);
        let scale = a.max_abs();
        for r in a.matvec(&vec![1.0; n]) {
            prop_assert!(r.abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn csr_matches_dense_accumulation(entries in prop::collection::vec((0usize..6, 0usize..5, -1.0f64..1.0), 0..40)) {
        let m = CsrMatrix::from_triplets(6, 5, &entries);
        let mut dense = [[0.0; 5]; 6];
        for &(r, c, v) in &entries {
            dense[r][c] += v;
        }
        for r in 0..6 {
            for c in 0..5 {
                prop_assert!((m.get(r, c) - dense[r][c]).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn direct_and_iterative_agree(diag in prop::collection::vec(3.0f64..5.0, 30), off in -1.0f64..1.0, b in prop::collection::vec(-1.0f64..1.0, 30)) {
        let n = diag.len();
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, diag[i]));
            if i + 1 < n {
                t.push((i, i + 1, off));
                t.push((i + 1, i, -0.5 * off));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &t);
        let d = solve_linear(&a, &b, &SolveConfig::default().with_method(SolveMethod::Direct)).unwrap();
        let it = solve_linear(&a, &b, &SolveConfig::default().with_method(SolveMethod::Iterative)).unwrap();
        for (x, y) in d.x.iter().zip(&it.x) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }
}

//! Error norms, convergence studies, maximum-principle checks and the
//! element-level sign inequality behind them.

use rayon::prelude::*;

use crate::assembly::{
    self, AssemblyConfig, BcMode, BoundaryProjection, MeshsizeRule, SparseSystem,
};
use crate::error::{Result, SwgError};
use crate::fd::{self, FdOptions};
use crate::kernels::{self, LocalVector, QuadratureRule};
use crate::mesh::{Domain, ElementGeom, TensorMesh};
use crate::problems::ProblemSpec;
use crate::solver::{self, Solution, SolveConfig};

/// Errors at or below this level are treated as exact when computing rates.
pub const RATE_FLOOR: f64 = 1e-12;

/// Absolute slack allowed by [`dmp_check`].
pub const DMP_SLACK: f64 = 1e-12;

fn spacing(mesh: &TensorMesh) -> Result<f64> {
    mesh.uniform_spacing().ok_or(SwgError::NonUniformMesh)
}

fn check_len(values: &[f64], mesh: &TensorMesh) -> Result<()> {
    if values.len() != mesh.num_edges() {
        return Err(SwgError::DimensionMismatch {
            expected: mesh.num_edges(),
            found: values.len(),
        });
    }
    Ok(())
}

/// `h * sqrt(sum over all edge midpoints of |u_b - u|^2)`.
pub fn discrete_l2_error(
    values: &[f64],
    mesh: &TensorMesh,
    u: &dyn Fn(f64, f64) -> f64,
) -> Result<f64> {
    let h = spacing(mesh)?;
    check_len(values, mesh)?;
    let sum: f64 = values
        .iter()
        .enumerate()
        .map(|(id, v)| {
            let m = mesh.edge(id).midpoint;
            (v - u(m[0], m[1])).powi(2)
        })
        .sum();
    Ok(h * sum.sqrt())
}

/// `h * sqrt(sum over element centres of |difference quotient - grad u|^2)`.
pub fn discrete_h1_error(
    values: &[f64],
    mesh: &TensorMesh,
    grad: &dyn Fn(f64, f64) -> [f64; 2],
) -> Result<f64> {
    let h = spacing(mesh)?;
    check_len(values, mesh)?;
    let sum: f64 = mesh
        .elements()
        .map(|geom| {
            let e = geom.edges;
            let dx = (values[e[1]] - values[e[0]]) / h;
            let dy = (values[e[3]] - values[e[2]]) / h;
            let g = grad(geom.center[0], geom.center[1]);
            (dx - g[0]).powi(2) + (dy - g[1]).powi(2)
        })
        .sum();
    Ok(h * sum.sqrt())
}

/// Uniform mesh of `domain` with spacing `1 / inv_h`.
pub fn mesh_for_spacing(domain: Domain, inv_h: usize) -> Result<TensorMesh> {
    if inv_h == 0 {
        return Err(SwgError::ZeroSubdivisions);
    }
    let cells = |len: f64| -> Result<usize> {
        let c = len * inv_h as f64;
        let r = c.round();
        if r < 1.0 || (c - r).abs() > 1e-9 * c.max(1.0) {
            return Err(SwgError::InvalidGrid(format!(
                "side length {len} is not a multiple of h = 1/{inv_h}"
            )));
        }
        Ok(r as usize)
    };
    let (nx, ny) = (cells(domain.x1 - domain.x0)?, cells(domain.y1 - domain.y0)?);
    let breaks = |a: f64, b: f64, k: usize| -> Vec<f64> {
        (0..=k)
            .map(|i| {
                if i == k {
                    b
                } else {
                    a + (b - a) * i as f64 / k as f64
                }
            })
            .collect()
    };
    TensorMesh::new(
        breaks(domain.x0, domain.x1, nx),
        breaks(domain.y0, domain.y1, ny),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Discretization {
    #[default]
    Swg,
    Fd5,
    Fd7,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub method: Discretization,
    /// Ignored by the five-point scheme.
    pub kappa: f64,
    pub bc_mode: BcMode,
    pub projection: BoundaryProjection,
    pub meshsize: MeshsizeRule,
    pub solver: SolveConfig,
}

impl RunOptions {
    pub fn new(method: Discretization, kappa: f64) -> Self {
        RunOptions {
            method,
            kappa,
            bc_mode: BcMode::Eliminate,
            projection: BoundaryProjection::default(),
            meshsize: MeshsizeRule::default(),
            solver: SolveConfig::default(),
        }
    }

    pub fn assembly(&self) -> AssemblyConfig {
        AssemblyConfig::new(self.kappa)
            .with_bc(self.bc_mode)
            .with_projection(self.projection)
            .with_meshsize(self.meshsize)
    }
}

/// Assembles `problem` on `mesh`. The finite difference schemes accept only
/// uniform square grids of the unit square.
pub fn build_system(
    problem: &ProblemSpec,
    mesh: &TensorMesh,
    opts: &RunOptions,
) -> Result<SparseSystem> {
    Ok(match opts.method {
        Discretization::Swg => assembly::assemble(mesh, problem, &opts.assembly())?,
        Discretization::Fd5 | Discretization::Fd7 => {
            let unit = mesh.domain() == Domain::UNIT_SQUARE;
            if !unit || mesh.nx() != mesh.ny() || mesh.uniform_spacing().is_none() {
                return Err(SwgError::InvalidGrid(
                    "finite difference schemes need a uniform n x n grid of the unit square".into(),
                ));
            }
            let fo = FdOptions {
                bc_mode: opts.bc_mode,
                projection: opts.projection,
            };
            let (f, g) = (&*problem.source, &*problem.dirichlet);
            if opts.method == Discretization::Fd5 {
                fd::assemble_fd5(mesh.nx(), f, g, &fo)?
            } else {
                fd::assemble_fd7(mesh.nx(), opts.kappa, f, g, &fo)?
            }
        }
    })
}

pub fn solve_on_mesh(
    problem: &ProblemSpec,
    mesh: &TensorMesh,
    opts: &RunOptions,
) -> Result<Solution> {
    solver::solve(&build_system(problem, mesh, opts)?, &opts.solver)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    /// Inverse meshsize `1/h`.
    pub n: usize,
    pub l2_error: f64,
    pub l2_rate: Option<f64>,
    pub h1_error: f64,
    pub h1_rate: Option<f64>,
}

/// Observed order between two refinements; `None` when either error is at
/// round-off level.
pub fn observed_rate(coarse: (usize, f64), fine: (usize, f64)) -> Option<f64> {
    let ((n0, e0), (n1, e1)) = (coarse, fine);
    if e0 <= RATE_FLOOR || e1 <= RATE_FLOOR {
        return None;
    }
    Some((e0 / e1).ln() / (n1 as f64 / n0 as f64).ln())
}

/// One solve per entry of `ns` (each the inverse meshsize), run in parallel.
pub fn convergence_table(
    problem: &ProblemSpec,
    opts: &RunOptions,
    ns: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    let exact = problem.exact.as_ref().ok_or_else(|| {
        SwgError::SingularConfig(format!("problem {} has no exact solution", problem.id))
    })?;
    if ns.is_empty() || ns.iter().any(|&n| n < 2) || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SwgError::InvalidGrid(format!(
            "mesh sizes must be increasing and at least 2, got {ns:?}"
        )));
    }
    let errors: Vec<(f64, f64)> = ns
        .par_iter()
        .map(|&n| {
            let mesh = mesh_for_spacing(problem.domain, n)?;
            let sol = solve_on_mesh(problem, &mesh, opts)?;
            let l2 = discrete_l2_error(&sol.values, &mesh, &*exact.value)?;
            let h1 = discrete_h1_error(&sol.values, &mesh, &*exact.gradient)?;
            log::info!(
                "n = {n}: L2 {l2:.3e}, H1 {h1:.3e}, residual {:.1e}",
                sol.residual_norm
            );
            Ok((l2, h1))
        })
        .collect::<Result<_>>()?;
    Ok((0..ns.len())
        .map(|k| {
            let (l2, h1) = errors[k];
            let rate = |pick: fn(&(f64, f64)) -> f64| {
                (k > 0)
                    .then(|| {
                        observed_rate((ns[k - 1], pick(&errors[k - 1])), (ns[k], pick(&errors[k])))
                    })
                    .flatten()
            };
            ConvergenceRow {
                n: ns[k],
                l2_error: l2,
                l2_rate: rate(|e| e.0),
                h1_error: h1,
                h1_rate: rate(|e| e.1),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmpReport {
    pub interior_max: f64,
    pub boundary_max: f64,
    pub clipped_boundary_max: f64,
    pub c_nonneg: bool,
    pub satisfied: bool,
    /// Bound minus `interior_max`.
    pub margin: f64,
}

impl DmpReport {
    pub fn bound(&self) -> f64 {
        if self.c_nonneg {
            self.clipped_boundary_max
        } else {
            self.boundary_max
        }
    }
}

/// Compares interior and boundary maxima of an edge vector. With `c_nonneg`
/// the bound is `max(boundary_max, 0)`, otherwise `boundary_max`.
pub fn dmp_check(values: &[f64], mesh: &TensorMesh, c_nonneg: bool) -> Result<DmpReport> {
    check_len(values, mesh)?;
    let mut interior_max = f64::NEG_INFINITY;
    let mut boundary_max = f64::NEG_INFINITY;
    for (id, &v) in values.iter().enumerate() {
        if mesh.edge(id).is_boundary {
            boundary_max = boundary_max.max(v);
        } else {
            interior_max = interior_max.max(v);
        }
    }
    let clipped = boundary_max.max(0.0);
    let bound = if c_nonneg { clipped } else { boundary_max };
    Ok(DmpReport {
        interior_max,
        boundary_max,
        clipped_boundary_max: clipped,
        c_nonneg,
        satisfied: interior_max <= bound + DMP_SLACK,
        margin: bound - interior_max,
    })
}

/// Sample points used to probe coefficients on an element: corners, centre
/// and the 2x2 Gauss points.
fn probe_points(geom: &ElementGeom) -> Vec<[f64; 2]> {
    let [cx, cy] = geom.center;
    let (dx, dy) = (0.5 * geom.hx, 0.5 * geom.hy);
    let mut pts = vec![
        [cx, cy],
        [cx - dx, cy - dy],
        [cx + dx, cy - dy],
        [cx - dx, cy + dy],
        [cx + dx, cy + dy],
    ];
    pts.extend(QuadratureRule::gauss_2x2(geom).points);
    pts
}

/// Whether the reaction coefficient is nonzero somewhere on the mesh, so the
/// maximum principle is stated against `max(boundary max, 0)`.
pub fn has_reaction(problem: &ProblemSpec, mesh: &TensorMesh) -> bool {
    mesh.elements().any(|g| {
        probe_points(&g)
            .iter()
            .any(|p| (problem.reaction)(p[0], p[1]) != 0.0)
    })
}

/// Whether `c >= 0` and `f <= 0` at every probe point of the mesh.
pub fn dmp_hypotheses_hold(problem: &ProblemSpec, mesh: &TensorMesh) -> bool {
    mesh.elements().all(|g| {
        probe_points(&g)
            .iter()
            .chain(g.midpoints().iter())
            .all(|p| (problem.reaction)(p[0], p[1]) >= 0.0 && (problem.source)(p[0], p[1]) <= 0.0)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementKappaCheck {
    pub i: usize,
    pub j: usize,
    pub eta: f64,
    pub slack1: f64,
    pub slack2: f64,
    pub slack3: f64,
    pub aspect_ok: bool,
}

impl ElementKappaCheck {
    pub fn ok(&self) -> bool {
        self.aspect_ok && self.slack1 >= 0.0 && self.slack2 >= 0.0 && self.slack3 >= 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KappaConditionReport {
    pub kappa: f64,
    pub elements: Vec<ElementKappaCheck>,
    pub all_ok: bool,
}

impl KappaConditionReport {
    /// Smallest of the three slacks over all elements.
    pub fn min_slack(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| e.slack1.min(e.slack2).min(e.slack3))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Per-element quantities that do not depend on `kappa`.
struct KappaTerms {
    /// `eta / kappa`.
    eta_per_kappa: f64,
    rhs_bound: f64,
    cap_y: f64,
    cap_x: f64,
    aspect_ok: bool,
}

fn kappa_terms(geom: &ElementGeom, h: f64, problem: &ProblemSpec, c0: f64, c1: f64) -> KappaTerms {
    let area = geom.area();
    let pts = probe_points(geom);
    let alpha_min = QuadratureRule::gauss_2x2(geom)
        .points
        .iter()
        .map(|p| {
            let a = (problem.alpha)(p[0], p[1]);
            a[0].min(a[1])
        })
        .fold(f64::INFINITY, f64::min);
    let beta_sup = pts
        .iter()
        .map(|p| {
            let b = (problem.beta)(p[0], p[1]);
            b[0].hypot(b[1])
        })
        .fold(0.0, f64::max);
    let c_sup = pts
        .iter()
        .map(|p| (problem.reaction)(p[0], p[1]).abs())
        .fold(0.0, f64::max);
    let sigma = geom.sigma();
    KappaTerms {
        eta_per_kappa: area / (2.0 * h * (geom.hx + geom.hy)),
        rhs_bound: c0 * beta_sup * h + c1 * c_sup * h * h,
        cap_y: alpha_min * geom.hy * geom.hy / area,
        cap_x: alpha_min * geom.hx * geom.hx / area,
        aspect_ok: (0.5..=2.0).contains(&sigma),
    }
}

/// Evaluates the three sign conditions on `kappa` and the aspect-ratio test
/// on every element.
pub fn kappa_condition(
    mesh: &TensorMesh,
    problem: &ProblemSpec,
    kappa: f64,
    c0: f64,
    c1: f64,
    rule: MeshsizeRule,
) -> KappaConditionReport {
    let mesh_h = mesh.meshsize();
    let elements: Vec<ElementKappaCheck> = mesh
        .elements()
        .map(|geom| {
            let t = kappa_terms(&geom, rule.meshsize(mesh_h, &geom), problem, c0, c1);
            let eta = kappa * t.eta_per_kappa;
            ElementKappaCheck {
                i: geom.i,
                j: geom.j,
                eta,
                slack1: eta - t.rhs_bound,
                slack2: t.cap_y - eta - t.rhs_bound,
                slack3: t.cap_x - eta - t.rhs_bound,
                aspect_ok: t.aspect_ok,
            }
        })
        .collect();
    let all_ok = elements.iter().all(ElementKappaCheck::ok);
    KappaConditionReport {
        kappa,
        elements,
        all_ok,
    }
}

/// Closed interval of `kappa` for which [`kappa_condition`] holds on every
/// element, or `None` if it is empty or some element fails the aspect test.
pub fn admissible_kappa(
    mesh: &TensorMesh,
    problem: &ProblemSpec,
    c0: f64,
    c1: f64,
    rule: MeshsizeRule,
) -> Option<(f64, f64)> {
    let mesh_h = mesh.meshsize();
    let mut lo: f64 = 0.0;
    let mut hi = f64::INFINITY;
    for geom in mesh.elements() {
        let t = kappa_terms(&geom, rule.meshsize(mesh_h, &geom), problem, c0, c1);
        if !t.aspect_ok {
            return None;
        }
        lo = lo.max(t.rhs_bound / t.eta_per_kappa);
        hi = hi.min((t.cap_y.min(t.cap_x) - t.rhs_bound) / t.eta_per_kappa);
    }
    (lo <= hi && hi > 0.0).then_some((lo, hi))
}

/// Componentwise `(max(v, 0), min(v, 0))`.
pub fn split_pos_neg(v: &LocalVector) -> (LocalVector, LocalVector) {
    let mut plus = [0.0; 4];
    let mut minus = [0.0; 4];
    for k in 0..4 {
        if v[k] > 0.0 {
            plus[k] = v[k];
        } else {
            minus[k] = v[k];
        }
    }
    (plus, minus)
}

/// `kappa S_T(v-, v+) + a_T(v-, v+) + b_T(v-, v+) + c_T(v-, v+)`, first
/// argument in the trial slot.
pub fn local_sign_value(
    geom: &ElementGeom,
    kappa: f64,
    h: f64,
    problem: &ProblemSpec,
    v: &LocalVector,
) -> Result<f64> {
    let (plus, minus) = split_pos_neg(v);
    let m = assembly::element_matrix(geom, problem, kappa, h)?;
    Ok(kernels::bilinear(&m, &minus, &plus))
}

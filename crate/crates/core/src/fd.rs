//! Seven- and five-point finite difference schemes on the edge-midpoint
//! lattice of a uniform unit-square grid.
//!
//! Lattice points are addressed by doubled coordinates `(a, b)`, meaning the
//! point `(a h / 2, b h / 2)`. Vertical-edge midpoints have `a` even and `b`
//! odd, horizontal-edge midpoints the reverse. Rows are ordered by `(b, a)`.

use crate::assembly::SparseSystem;
use crate::assembly::{self, AssemblyConfig, BcMode, BoundaryProjection, MIN_PENALTY_WEIGHT};
use crate::error::{Result, SwgError};
use crate::mesh::TensorMesh;
use crate::problems::{get_problem, ProblemId, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdStencil {
    /// Parallel neighbour on the positive side.
    pub c1: f64,
    /// Centre.
    pub c2: f64,
    /// Parallel neighbour on the negative side.
    pub c3: f64,
    /// Each of the four perpendicular neighbours.
    pub c4: f64,
}

impl FdStencil {
    pub fn row_sum(&self) -> f64 {
        self.c1 + self.c2 + self.c3 + 4.0 * self.c4
    }
}

pub fn stencil_weights(kappa: f64) -> Result<FdStencil> {
    if !(kappa > 0.0) {
        return Err(SwgError::NonPositiveKappa(kappa));
    }
    Ok(FdStencil {
        c1: kappa / 4.0 - 1.0,
        c2: kappa / 2.0 + 2.0,
        c3: kappa / 4.0 - 1.0,
        c4: -kappa / 4.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdOptions {
    pub bc_mode: BcMode,
    pub projection: BoundaryProjection,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions {
            bc_mode: BcMode::Eliminate,
            projection: BoundaryProjection::Midpoint,
        }
    }
}

/// Midpoint lattice of an `n x n` grid on the unit square.
struct Lattice {
    n: usize,
    mesh: TensorMesh,
}

impl Lattice {
    fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(SwgError::InvalidGrid(format!(
                "finite difference grids need n >= 2, got {n}"
            )));
        }
        Ok(Lattice {
            n,
            mesh: TensorMesh::uniform(n)?,
        })
    }

    fn is_point(&self, a: i64, b: i64) -> bool {
        let m = 2 * self.n as i64;
        (0..=m).contains(&a) && (0..=m).contains(&b) && (a + b) % 2 == 1
    }

    fn is_boundary(&self, a: i64, b: i64) -> bool {
        let m = 2 * self.n as i64;
        a == 0 || a == m || b == 0 || b == m
    }

    fn edge_id(&self, a: i64, b: i64) -> usize {
        let (a, b) = (a as usize, b as usize);
        if a % 2 == 0 {
            self.mesh.vertical_edge_id(a / 2, (b - 1) / 2)
        } else {
            self.mesh.horizontal_edge_id((a - 1) / 2, b / 2)
        }
    }

    /// Interior points in `(b, a)` order.
    fn interior_points(&self) -> Vec<(i64, i64)> {
        let m = 2 * self.n as i64;
        let mut pts = Vec::new();
        for b in 1..m {
            for a in 1..m {
                if self.is_point(a, b) {
                    pts.push((a, b));
                }
            }
        }
        pts
    }

    fn midpoint(&self, a: i64, b: i64) -> (f64, f64) {
        let h2 = 0.5 / self.n as f64;
        (a as f64 * h2, b as f64 * h2)
    }
}

fn assemble_lattice(
    n: usize,
    stencil: FdStencil,
    rhs_scale: f64,
    f: &dyn Fn(f64, f64) -> f64,
    g: &dyn Fn(f64, f64) -> f64,
    opts: &FdOptions,
) -> Result<SparseSystem> {
    if let BcMode::Penalty { weight } = opts.bc_mode {
        if !(weight >= MIN_PENALTY_WEIGHT) {
            return Err(SwgError::SingularConfig(format!(
                "penalty weight must be at least {MIN_PENALTY_WEIGHT:e}, got {weight:e}"
            )));
        }
    }
    let lat = Lattice::new(n)?;
    let dofs = lat.mesh.dofs();
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; dofs.len()];
    let points = lat.interior_points();
    for &(a, b) in &points {
        let row = lat.edge_id(a, b);
        // the parallel neighbours sit two half-steps along the edge normal
        let (da, db) = if a % 2 == 0 { (2, 0) } else { (0, 2) };
        let entries = [
            ((a, b), stencil.c2),
            ((a + da, b + db), stencil.c1),
            ((a - da, b - db), stencil.c3),
            ((a + 1, b - 1), stencil.c4),
            ((a + 1, b + 1), stencil.c4),
            ((a - 1, b - 1), stencil.c4),
            ((a - 1, b + 1), stencil.c4),
        ];
        for ((p, q), w) in entries {
            debug_assert!(lat.is_point(p, q));
            triplets.push((row, lat.edge_id(p, q), w));
        }
        let (x, y) = lat.midpoint(a, b);
        rhs[row] = rhs_scale * f(x, y);
    }
    debug_assert!(points.iter().all(|&(a, b)| !lat.is_boundary(a, b)));
    let boundary = assembly::boundary_data(&dofs, g, opts.projection);
    let order: Vec<usize> = points.iter().map(|&(a, b)| lat.edge_id(a, b)).collect();
    Ok(assembly::impose_dirichlet(
        dofs,
        &triplets,
        &rhs,
        boundary,
        &order,
        opts.bc_mode,
    ))
}

/// Seven-point scheme with right-hand side `(h^2 / 2) f` at each midpoint.
pub fn assemble_fd7(
    n: usize,
    kappa: f64,
    f: &dyn Fn(f64, f64) -> f64,
    g: &dyn Fn(f64, f64) -> f64,
    opts: &FdOptions,
) -> Result<SparseSystem> {
    let stencil = stencil_weights(kappa)?;
    let h = 1.0 / n.max(1) as f64;
    assemble_lattice(n, stencil, 0.5 * h * h, f, g, opts)
}

/// Five-point scheme: the `kappa = 4` stencil divided by `h^2`, right-hand
/// side `f / 2`.
pub fn assemble_fd5(
    n: usize,
    f: &dyn Fn(f64, f64) -> f64,
    g: &dyn Fn(f64, f64) -> f64,
    opts: &FdOptions,
) -> Result<SparseSystem> {
    let s = stencil_weights(4.0)?;
    let h = 1.0 / n.max(1) as f64;
    let ih2 = 1.0 / (h * h);
    let stencil = FdStencil {
        c1: s.c1 * ih2,
        c2: s.c2 * ih2,
        c3: s.c3 * ih2,
        c4: s.c4 * ih2,
    };
    assemble_lattice(n, stencil, 0.5, f, g, opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceReport {
    pub n: usize,
    pub kappa: f64,
    /// Largest entrywise difference between the two matrices.
    pub matrix_diff: f64,
    pub rhs_diff: f64,
    /// `10 h^4 max|f|` over the midpoints.
    pub rhs_tolerance: f64,
}

impl EquivalenceReport {
    pub fn holds(&self, matrix_tol: f64) -> bool {
        self.matrix_diff <= matrix_tol && self.rhs_diff <= self.rhs_tolerance
    }
}

/// Compares the weak Galerkin system with the seven-point scheme on
/// the Poisson problem `fd1`.
pub fn check_equivalence(n: usize, kappa: f64) -> Result<EquivalenceReport> {
    check_equivalence_for(n, kappa, &get_problem(ProblemId::Fd1)?)
}

/// As [`check_equivalence`] for any problem with `alpha = 1, beta = 0, c = 0`
/// on the unit square; coefficients are not checked.
pub fn check_equivalence_for(
    n: usize,
    kappa: f64,
    problem: &ProblemSpec,
) -> Result<EquivalenceReport> {
    let fd = assemble_fd7(
        n,
        kappa,
        &*problem.source,
        &*problem.dirichlet,
        &FdOptions::default(),
    )?;
    let mesh = TensorMesh::uniform(n)?;
    let swg = assembly::assemble(&mesh, problem, &AssemblyConfig::new(kappa))?;
    if swg.unknowns.len() != fd.unknowns.len() {
        return Err(SwgError::DimensionMismatch {
            expected: swg.unknowns.len(),
            found: fd.unknowns.len(),
        });
    }
    let mut fd_row = vec![usize::MAX; swg.dof_map.len()];
    for (k, &id) in fd.unknowns.iter().enumerate() {
        fd_row[id] = k;
    }

    let mut matrix_diff: f64 = 0.0;
    let mut rhs_diff: f64 = 0.0;
    for (r, &id) in swg.unknowns.iter().enumerate() {
        let fr = fd_row[id];
        for (c, v) in swg.matrix.row(r).0.iter().zip(swg.matrix.row(r).1) {
            let fc = fd_row[swg.unknowns[*c]];
            matrix_diff = matrix_diff.max((v - fd.matrix.get(fr, fc)).abs());
        }
        // entries present only on the finite difference side
        let (fcols, fvals) = fd.matrix.row(fr);
        for (fc, fv) in fcols.iter().zip(fvals) {
            let id_c = fd.unknowns[*fc];
            let sc = swg.unknowns.binary_search(&id_c).ok();
            let sv = sc.map(|c| swg.matrix.get(r, c)).unwrap_or(0.0);
            matrix_diff = matrix_diff.max((sv - fv).abs());
        }
        rhs_diff = rhs_diff.max((swg.rhs[r] - fd.rhs[fr]).abs());
    }

    let h = 1.0 / n as f64;
    let fmax = swg
        .dof_map
        .edges
        .iter()
        .map(|e| (problem.source)(e.midpoint[0], e.midpoint[1]).abs())
        .fold(0.0, f64::max);
    Ok(EquivalenceReport {
        n,
        kappa,
        matrix_diff,
        rhs_diff,
        rhs_tolerance: 10.0 * h.powi(4) * fmax,
    })
}

//! Global system over edge midpoints and Dirichlet treatment.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Result, SwgError};
use crate::kernels::{self, LocalMatrix, QuadratureRule};
use crate::mesh::{DofMap, EdgeDof, ElementGeom, TensorMesh};
use crate::problems::ProblemSpec;
use crate::sparse::CsrMatrix;

/// Minimum accepted penalty weight.
pub const MIN_PENALTY_WEIGHT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BcMode {
    /// Substitute the boundary values and drop boundary rows.
    Eliminate,
    /// Keep boundary rows and add `weight` to their diagonal.
    Penalty { weight: f64 },
}

/// How the edge average `Q_b g` of the Dirichlet data is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryProjection {
    /// One-point rule: `g` at the edge midpoint.
    #[default]
    Midpoint,
    /// Three-point Simpson average, exact for cubics along the edge.
    Simpson,
}

/// Meshsize entering the stabilizer `h^{-1}` factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeshsizeRule {
    /// Global `max over elements of max(hx, hy)`.
    #[default]
    GlobalMax,
    /// Element-wise `2|T| / (hx + hy)`.
    ElementHarmonic,
}

impl MeshsizeRule {
    pub fn meshsize(&self, mesh_h: f64, geom: &ElementGeom) -> f64 {
        match self {
            MeshsizeRule::GlobalMax => mesh_h,
            MeshsizeRule::ElementHarmonic => 2.0 * geom.area() / (geom.hx + geom.hy),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyConfig {
    pub kappa: f64,
    pub bc_mode: BcMode,
    pub projection: BoundaryProjection,
    pub meshsize: MeshsizeRule,
}

impl AssemblyConfig {
    pub fn new(kappa: f64) -> Self {
        AssemblyConfig {
            kappa,
            bc_mode: BcMode::Eliminate,
            projection: BoundaryProjection::default(),
            meshsize: MeshsizeRule::default(),
        }
    }

    pub fn with_bc(mut self, bc_mode: BcMode) -> Self {
        self.bc_mode = bc_mode;
        self
    }

    pub fn with_projection(mut self, projection: BoundaryProjection) -> Self {
        self.projection = projection;
        self
    }

    pub fn with_meshsize(mut self, meshsize: MeshsizeRule) -> Self {
        self.meshsize = meshsize;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) {
            return Err(SwgError::SingularConfig(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        if let BcMode::Penalty { weight } = self.bc_mode {
            if !(weight >= MIN_PENALTY_WEIGHT) {
                return Err(SwgError::SingularConfig(format!(
                    "penalty weight must be at least {MIN_PENALTY_WEIGHT:e}, got {weight:e}"
                )));
            }
        }
        Ok(())
    }
}

/// Linear system `matrix * x = rhs` where row/column `k` is the edge
/// `unknowns[k]`.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub dof_map: DofMap,
    pub unknowns: Vec<usize>,
    /// Imposed `Q_b g` on every boundary edge.
    pub boundary_values: BTreeMap<usize, f64>,
    pub bc_mode: BcMode,
}

impl SparseSystem {
    pub fn dimension(&self) -> usize {
        self.unknowns.len()
    }

    /// Scatters a solution of the reduced system into a full edge vector,
    /// filling eliminated boundary edges with their imposed values.
    pub fn expand(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dimension() {
            return Err(SwgError::DimensionMismatch {
                expected: self.dimension(),
                found: x.len(),
            });
        }
        let mut full = vec![f64::NAN; self.dof_map.len()];
        for (&id, &v) in self.boundary_values.iter() {
            full[id] = v;
        }
        for (&id, &v) in self.unknowns.iter().zip(x) {
            full[id] = v;
        }
        Ok(full)
    }
}

/// Simpson approximation of the average of `g` over a boundary edge.
pub fn edge_average(g: &dyn Fn(f64, f64) -> f64, edge: &EdgeDof) -> f64 {
    QuadratureRule::simpson_edge(edge.start, edge.end).integrate(g) / edge.length
}

pub fn project_boundary(
    g: &dyn Fn(f64, f64) -> f64,
    edge: &EdgeDof,
    projection: BoundaryProjection,
) -> f64 {
    match projection {
        BoundaryProjection::Midpoint => g(edge.midpoint[0], edge.midpoint[1]),
        BoundaryProjection::Simpson => edge_average(g, edge),
    }
}

pub(crate) fn boundary_data(
    dofs: &DofMap,
    g: &dyn Fn(f64, f64) -> f64,
    projection: BoundaryProjection,
) -> BTreeMap<usize, f64> {
    dofs.boundary
        .iter()
        .map(|&id| (id, project_boundary(g, &dofs.edges[id], projection)))
        .collect()
}

/// `kappa S_T + a_T + b_T + c_T` on one element, `c` sampled at the center.
pub fn element_matrix(
    geom: &ElementGeom,
    problem: &ProblemSpec,
    kappa: f64,
    h: f64,
) -> Result<LocalMatrix> {
    let stab = kernels::stabilizer_matrix(geom, h)?;
    let diff = kernels::diffusion_matrix(geom, &*problem.alpha)?;
    let conv = kernels::convection_matrix(geom, &*problem.beta);
    let c = (problem.reaction)(geom.center[0], geom.center[1]);
    if c < 0.0 {
        log::warn!(
            "negative reaction {c} on element ({}, {}); maximum principle guarantees do not apply",
            geom.i,
            geom.j
        );
    }
    let reac = kernels::reaction_matrix_unchecked(geom, c);
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = kappa * stab[i][j] + diff[i][j] + conv[i][j] + reac[i][j];
        }
    }
    Ok(m)
}

/// Applies Dirichlet data to a full operator given as triplets over all edges.
///
/// `order` lists the edges that become unknowns in eliminate mode, in row
/// order; boundary edges are appended after them in penalty mode.
pub(crate) fn impose_dirichlet(
    dof_map: DofMap,
    full: &[(usize, usize, f64)],
    full_rhs: &[f64],
    boundary_values: BTreeMap<usize, f64>,
    order: &[usize],
    bc_mode: BcMode,
) -> SparseSystem {
    let ndofs = dof_map.len();
    let mut unknowns: Vec<usize> = order.to_vec();
    if let BcMode::Penalty { .. } = bc_mode {
        unknowns.extend(boundary_values.keys().copied());
    }
    let mut row_of = vec![usize::MAX; ndofs];
    for (k, &id) in unknowns.iter().enumerate() {
        row_of[id] = k;
    }
    let mut rhs: Vec<f64> = unknowns.iter().map(|&id| full_rhs[id]).collect();
    let mut triplets = Vec::with_capacity(full.len());
    for &(r, c, v) in full {
        let row = row_of[r];
        if row == usize::MAX {
            continue;
        }
        match row_of[c] {
            usize::MAX => rhs[row] -= v * boundary_values[&c],
            col => triplets.push((row, col, v)),
        }
    }
    if let BcMode::Penalty { weight } = bc_mode {
        for (&id, &g) in boundary_values.iter() {
            let row = row_of[id];
            triplets.push((row, row, weight));
            rhs[row] += weight * g;
        }
    }
    let n = unknowns.len();
    SparseSystem {
        matrix: CsrMatrix::from_triplets(n, n, &triplets),
        rhs,
        dof_map,
        unknowns,
        boundary_values,
        bc_mode,
    }
}

/// Element contributions to the full operator and load, before boundary treatment.
pub fn assemble_full(
    mesh: &TensorMesh,
    problem: &ProblemSpec,
    config: &AssemblyConfig,
) -> Result<(Vec<(usize, usize, f64)>, Vec<f64>)> {
    config.validate()?;
    let mesh_h = mesh.meshsize();
    let elements: Vec<ElementGeom> = mesh.elements().collect();
    let locals: Vec<(LocalMatrix, [f64; 4])> = elements
        .par_iter()
        .map(|geom| {
            let h = config.meshsize.meshsize(mesh_h, geom);
            let m = element_matrix(geom, problem, config.kappa, h)?;
            let l = kernels::load_vector(geom, &*problem.source);
            Ok((m, l))
        })
        .collect::<Result<_>>()?;

    let mut triplets = Vec::with_capacity(16 * elements.len());
    let mut rhs = vec![0.0; mesh.num_edges()];
    for (geom, (m, l)) in elements.iter().zip(&locals) {
        for a in 0..4 {
            let row = geom.edges[a];
            rhs[row] += l[a];
            for b in 0..4 {
                triplets.push((row, geom.edges[b], m[a][b]));
            }
        }
    }
    Ok((triplets, rhs))
}

/// Assembles the simplified weak Galerkin system.
pub fn assemble(
    mesh: &TensorMesh,
    problem: &ProblemSpec,
    config: &AssemblyConfig,
) -> Result<SparseSystem> {
    let (triplets, rhs) = assemble_full(mesh, problem, config)?;
    let dofs = mesh.dofs();
    let boundary = boundary_data(&dofs, &*problem.dirichlet, config.projection);
    let order = dofs.interior.clone();
    Ok(impose_dirichlet(
        dofs,
        &triplets,
        &rhs,
        boundary,
        &order,
        config.bc_mode,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Orientation;
    use crate::problems::{get_problem, ConstantCoefficients, ProblemId};
    use approx::assert_abs_diff_eq;

    fn laplace() -> ProblemSpec {
        ProblemSpec::custom(ConstantCoefficients::default()).unwrap()
    }

    #[test]
    fn edge_average_cases() {
        let m = TensorMesh::uniform(1).unwrap();
        let bottom = m.edge(m.horizontal_edge_id(0, 0));
        assert_abs_diff_eq!(edge_average(&|_, _| 3.5, &bottom), 3.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            edge_average(&|x, _| 2.0 * x - 1.0, &bottom),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            edge_average(&|x, _| x * x, &bottom),
            1.0 / 3.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn single_cell_eliminates_everything() {
        let m = TensorMesh::uniform(1).unwrap();
        let s = assemble(&m, &laplace(), &AssemblyConfig::new(1.0)).unwrap();
        assert_eq!(s.dimension(), 0);
        assert_eq!(s.boundary_values.len(), 4);
    }

    #[test]
    fn seven_point_row_on_uniform_grid() {
        let n = 4;
        let kappa = 0.7;
        let m = TensorMesh::uniform(n).unwrap();
        let s = assemble(&m, &laplace(), &AssemblyConfig::new(kappa)).unwrap();
        // interior vertical edge with interior neighbours all around
        let id = m.vertical_edge_id(2, 1);
        let row = s.unknowns.iter().position(|&u| u == id).unwrap();
        let (cols, vals) = s.matrix.row(row);
        assert_eq!(cols.len(), 7);
        let c13 = kappa / 4.0 - 1.0;
        let c2 = kappa / 2.0 + 2.0;
        let c4 = -kappa / 4.0;
        for (&c, &v) in cols.iter().zip(vals) {
            let e = m.edge(s.unknowns[c]);
            let expected = match (e.orientation, e.i, e.j) {
                (Orientation::Vertical, 2, 1) => c2,
                (Orientation::Vertical, 1 | 3, 1) => c13,
                (Orientation::Horizontal, 1 | 2, 1 | 2) => c4,
                other => panic!("unexpected coupling {other:?}"),
            };
            assert_abs_diff_eq!(v, expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn symmetric_without_convection() {
        let m = TensorMesh::new(vec![0.0, 0.3, 0.5, 1.0], vec![0.0, 0.2, 0.7, 0.9, 1.0]).unwrap();
        let p = get_problem(ProblemId::Tc3).unwrap();
        let s = assemble(&m, &p, &AssemblyConfig::new(2.0)).unwrap();
        assert!(s.matrix.asymmetry() <= 1e-13 * s.matrix.max_abs());
        let p = get_problem(ProblemId::Tc1).unwrap();
        let s = assemble(&m, &p, &AssemblyConfig::new(2.0)).unwrap();
        assert!(s.matrix.asymmetry() > 1e-3);
    }

    #[test]
    fn rows_couple_only_neighbours() {
        let m = TensorMesh::uniform(5).unwrap();
        let p = get_problem(ProblemId::Tc2).unwrap();
        let s = assemble(&m, &p, &AssemblyConfig::new(4.0)).unwrap();
        for r in 0..s.dimension() {
            assert!(s.matrix.row(r).0.len() <= 7);
        }
    }

    #[test]
    fn rejects_bad_config() {
        let m = TensorMesh::uniform(2).unwrap();
        assert!(matches!(
            assemble(&m, &laplace(), &AssemblyConfig::new(0.0)),
            Err(SwgError::SingularConfig(_))
        ));
        let cfg = AssemblyConfig::new(1.0).with_bc(BcMode::Penalty { weight: 10.0 });
        assert!(matches!(
            assemble(&m, &laplace(), &cfg),
            Err(SwgError::SingularConfig(_))
        ));
    }

    #[test]
    fn penalty_keeps_all_rows() {
        let m = TensorMesh::uniform(3).unwrap();
        let cfg = AssemblyConfig::new(1.0).with_bc(BcMode::Penalty { weight: 1e10 });
        let s = assemble(&m, &laplace(), &cfg).unwrap();
        assert_eq!(s.dimension(), m.num_edges());
        let b = s.dof_map.boundary[0];
        let row = s.unknowns.iter().position(|&u| u == b).unwrap();
        assert!(s.matrix.get(row, row) > 1e10);
    }

    #[test]
    fn boundary_projection_modes() {
        let m = TensorMesh::uniform(2).unwrap();
        let e = m.edge(m.horizontal_edge_id(0, 0));
        let g = |x: f64, _: f64| x * x;
        assert_eq!(
            project_boundary(&g, &e, BoundaryProjection::Midpoint),
            0.0625
        );
        assert_abs_diff_eq!(
            project_boundary(&g, &e, BoundaryProjection::Simpson),
            1.0 / 12.0,
            epsilon = 1e-15
        );
    }
}

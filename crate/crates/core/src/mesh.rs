//! Rectangular tensor-product partitions and their edge degrees of freedom.
//!
//! Unknowns live at edge midpoints. Edges are keyed by integer triples
//! `(orientation, i, j)`:
//!
//! ```text
//! vertical   edge (i, j): x = x_i,            y in [y_j, y_{j+1}],  i in 0..=nx, j in 0..ny
//! horizontal edge (i, j): x in [x_i, x_{i+1}], y = y_j,             i in 0..nx,  j in 0..=ny
//! ```
//!
//! Global edge ids enumerate all vertical edges row-major (`j * (nx + 1) + i`),
//! followed by all horizontal edges (`nv + j * nx + i`).

use crate::error::{Result, SwgError};

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Domain {
    pub const UNIT_SQUARE: Domain = Domain {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };

    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Domain { x0, x1, y0, y1 }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

/// One edge of the partition, carrying a single unknown at its midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeDof {
    pub orientation: Orientation,
    pub i: usize,
    pub j: usize,
    pub midpoint: [f64; 2],
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub length: f64,
    pub is_boundary: bool,
}

impl EdgeDof {
    /// Label in the half-index convention of the uniform-grid stencils, where
    /// element `T_{k,l}` (1-based) is centered at `(x_k, y_l)`.
    pub fn half_index_label(&self) -> String {
        fn half(k: usize) -> String {
            format!("{}/2", 2 * k + 1)
        }
        match self.orientation {
            Orientation::Vertical => format!("u[{},{}]", half(self.i), self.j + 1),
            Orientation::Horizontal => format!("u[{},{}]", self.i + 1, half(self.j)),
        }
    }
}

/// Geometry of one rectangular element.
///
/// Local edges follow the fixed ordering `e1 = left`, `e2 = right`,
/// `e3 = bottom`, `e4 = top`, so `|e1| = |e2| = hy` and `|e3| = |e4| = hx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeom {
    pub i: usize,
    pub j: usize,
    pub hx: f64,
    pub hy: f64,
    pub center: [f64; 2],
    /// Global edge ids of (left, right, bottom, top).
    pub edges: [usize; 4],
}

impl ElementGeom {
    /// Standalone element, useful for kernel-level work; edge ids are `0..4`.
    pub fn from_center(center: [f64; 2], hx: f64, hy: f64) -> Self {
        ElementGeom {
            i: 0,
            j: 0,
            hx,
            hy,
            center,
            edges: [0, 1, 2, 3],
        }
    }

    pub fn area(&self) -> f64 {
        self.hx * self.hy
    }

    /// Aspect ratio `hx / hy`.
    pub fn sigma(&self) -> f64 {
        self.hx / self.hy
    }

    pub fn edge_lengths(&self) -> [f64; 4] {
        [self.hy, self.hy, self.hx, self.hx]
    }

    /// Outward unit normals of (left, right, bottom, top).
    pub fn normals(&self) -> [[f64; 2]; 4] {
        [[-1.0, 0.0], [1.0, 0.0], [0.0, -1.0], [0.0, 1.0]]
    }

    pub fn midpoints(&self) -> [[f64; 2]; 4] {
        let [xc, yc] = self.center;
        let (dx, dy) = (0.5 * self.hx, 0.5 * self.hy);
        [[xc - dx, yc], [xc + dx, yc], [xc, yc - dy], [xc, yc + dy]]
    }
}

/// Bijection between edges and contiguous dof indices, split into interior
/// and boundary sets.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub edges: Vec<EdgeDof>,
    pub interior: Vec<usize>,
    pub boundary: Vec<usize>,
}

impl DofMap {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Nonuniform rectangular partition given by two strictly increasing break arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorMesh {
    x_breaks: Vec<f64>,
    y_breaks: Vec<f64>,
}

fn validate_breaks(axis: char, breaks: &[f64]) -> Result<()> {
    if breaks.len() < 2 {
        return Err(SwgError::TooFewPoints {
            axis,
            len: breaks.len(),
        });
    }
    for (k, w) in breaks.windows(2).enumerate() {
        // also rejects NaN
        if !(w[1] > w[0]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(SwgError::NonMonotoneBreaks { axis, index: k + 1 });
        }
    }
    Ok(())
}

impl TensorMesh {
    pub fn new(x_breaks: Vec<f64>, y_breaks: Vec<f64>) -> Result<Self> {
        validate_breaks('x', &x_breaks)?;
        validate_breaks('y', &y_breaks)?;
        Ok(TensorMesh { x_breaks, y_breaks })
    }

    /// `n x n` uniform partition of the unit square.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::uniform_on(Domain::UNIT_SQUARE, n)
    }

    /// `n x n` uniform partition of `domain`.
    pub fn uniform_on(domain: Domain, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(SwgError::ZeroSubdivisions);
        }
        let breaks = |a: f64, b: f64| -> Vec<f64> {
            (0..=n)
                .map(|k| {
                    if k == n {
                        b
                    } else {
                        a + (b - a) * (k as f64) / (n as f64)
                    }
                })
                .collect()
        };
        Self::new(breaks(domain.x0, domain.x1), breaks(domain.y0, domain.y1))
    }

    pub fn x_breaks(&self) -> &[f64] {
        &self.x_breaks
    }

    pub fn y_breaks(&self) -> &[f64] {
        &self.y_breaks
    }

    pub fn nx(&self) -> usize {
        self.x_breaks.len() - 1
    }

    pub fn ny(&self) -> usize {
        self.y_breaks.len() - 1
    }

    pub fn num_elements(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn num_vertical_edges(&self) -> usize {
        (self.nx() + 1) * self.ny()
    }

    pub fn num_edges(&self) -> usize {
        self.num_vertical_edges() + self.nx() * (self.ny() + 1)
    }

    pub fn domain(&self) -> Domain {
        Domain {
            x0: self.x_breaks[0],
            x1: *self.x_breaks.last().unwrap(),
            y0: self.y_breaks[0],
            y1: *self.y_breaks.last().unwrap(),
        }
    }

    /// Global meshsize: max over elements of `max(hx, hy)`.
    pub fn meshsize(&self) -> f64 {
        let span = |b: &[f64]| b.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        span(&self.x_breaks).max(span(&self.y_breaks))
    }

    /// Common spacing if every element is a square of the same size.
    pub fn uniform_spacing(&self) -> Option<f64> {
        let h = self.x_breaks[1] - self.x_breaks[0];
        let same = |b: &[f64]| b.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-10 * h);
        (same(&self.x_breaks) && same(&self.y_breaks)).then_some(h)
    }

    pub fn vertical_edge_id(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= self.nx() && j < self.ny());
        j * (self.nx() + 1) + i
    }

    pub fn horizontal_edge_id(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx() && j <= self.ny());
        self.num_vertical_edges() + j * self.nx() + i
    }

    pub fn element(&self, i: usize, j: usize) -> Result<ElementGeom> {
        let (nx, ny) = (self.nx(), self.ny());
        if i >= nx || j >= ny {
            return Err(SwgError::IndexOutOfRange { i, j, nx, ny });
        }
        Ok(self.element_unchecked(i, j))
    }

    fn element_unchecked(&self, i: usize, j: usize) -> ElementGeom {
        let (x0, x1) = (self.x_breaks[i], self.x_breaks[i + 1]);
        let (y0, y1) = (self.y_breaks[j], self.y_breaks[j + 1]);
        ElementGeom {
            i,
            j,
            hx: x1 - x0,
            hy: y1 - y0,
            center: [0.5 * (x0 + x1), 0.5 * (y0 + y1)],
            edges: [
                self.vertical_edge_id(i, j),
                self.vertical_edge_id(i + 1, j),
                self.horizontal_edge_id(i, j),
                self.horizontal_edge_id(i, j + 1),
            ],
        }
    }

    /// Elements in row-major order (`j` outer, `i` inner).
    pub fn elements(&self) -> impl Iterator<Item = ElementGeom> + '_ {
        let nx = self.nx();
        (0..self.num_elements()).map(move |k| self.element_unchecked(k % nx, k / nx))
    }

    pub fn edge(&self, id: usize) -> EdgeDof {
        let nv = self.num_vertical_edges();
        let (nx, ny) = (self.nx(), self.ny());
        if id < nv {
            let (i, j) = (id % (nx + 1), id / (nx + 1));
            let x = self.x_breaks[i];
            let (y0, y1) = (self.y_breaks[j], self.y_breaks[j + 1]);
            EdgeDof {
                orientation: Orientation::Vertical,
                i,
                j,
                midpoint: [x, 0.5 * (y0 + y1)],
                start: [x, y0],
                end: [x, y1],
                length: y1 - y0,
                is_boundary: i == 0 || i == nx,
            }
        } else {
            let k = id - nv;
            let (i, j) = (k % nx, k / nx);
            let y = self.y_breaks[j];
            let (x0, x1) = (self.x_breaks[i], self.x_breaks[i + 1]);
            EdgeDof {
                orientation: Orientation::Horizontal,
                i,
                j,
                midpoint: [0.5 * (x0 + x1), y],
                start: [x0, y],
                end: [x1, y],
                length: x1 - x0,
                is_boundary: j == 0 || j == ny,
            }
        }
    }

    pub fn dofs(&self) -> DofMap {
        let edges: Vec<EdgeDof> = (0..self.num_edges()).map(|id| self.edge(id)).collect();
        let (boundary, interior): (Vec<usize>, Vec<usize>) =
            (0..edges.len()).partition(|&id| edges[id].is_boundary);
        DofMap {
            edges,
            interior,
            boundary,
        }
    }
}

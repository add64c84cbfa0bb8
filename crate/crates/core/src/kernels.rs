//! Element-local quantities of the simplified weak Galerkin scheme on a
//! rectangle: weak gradient, linear extension, stabilizer, the three
//! bilinear-form matrices and the quadrature load vector.
//!
//! Local vectors and matrices are indexed by the element edges in the order
//! (left, right, bottom, top). Matrix rows correspond to the test basis
//! function and columns to the trial basis function, so a bilinear form
//! `F(u, v)` is `v^T M u`.

use crate::error::{Result, SwgError};
use crate::mesh::ElementGeom;

pub type LocalVector = [f64; 4];
pub type LocalMatrix = [[f64; 4]; 4];

/// Sign pattern of the rank-1 stabilizer.
const STAB_DIRECTION: LocalVector = [1.0, 1.0, -1.0, -1.0];

/// Coefficients of `s(v)(x, y) = gamma0 + gamma1 (x - xT) + gamma2 (y - yT)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionCoeffs {
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl ExtensionCoeffs {
    pub fn eval(&self, geom: &ElementGeom, x: f64, y: f64) -> f64 {
        self.gamma0 + self.gamma1 * (x - geom.center[0]) + self.gamma2 * (y - geom.center[1])
    }
}

/// Points and weights of a quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Tensor 2x2 Gauss-Legendre rule on the element; exact for polynomials
    /// of degree <= 3 in each coordinate.
    pub fn gauss_2x2(geom: &ElementGeom) -> Self {
        let off = 0.5 / 3f64.sqrt();
        let [xc, yc] = geom.center;
        let w = 0.25 * geom.area();
        let mut points = Vec::with_capacity(4);
        for sy in [-1.0, 1.0] {
            for sx in [-1.0, 1.0] {
                points.push([xc + sx * off * geom.hx, yc + sy * off * geom.hy]);
            }
        }
        QuadratureRule {
            points,
            weights: vec![w; 4],
        }
    }

    /// Three-point Simpson rule on the segment `a -> b`.
    pub fn simpson_edge(a: [f64; 2], b: [f64; 2]) -> Self {
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        QuadratureRule {
            points: vec![a, m, b],
            weights: vec![len / 6.0, 4.0 * len / 6.0, len / 6.0],
        }
    }

    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p[0], p[1]))
            .sum()
    }
}

/// `v^T M u`.
pub fn bilinear(m: &LocalMatrix, u: &LocalVector, v: &LocalVector) -> f64 {
    (0..4)
        .map(|i| v[i] * (0..4).map(|j| m[i][j] * u[j]).sum::<f64>())
        .sum()
}

/// Weak gradients of the four edge basis functions.
fn basis_weak_gradients(geom: &ElementGeom) -> [[f64; 2]; 4] {
    let (ix, iy) = (1.0 / geom.hx, 1.0 / geom.hy);
    [[-ix, 0.0], [ix, 0.0], [0.0, -iy], [0.0, iy]]
}

pub fn weak_gradient(geom: &ElementGeom, v: &LocalVector) -> [f64; 2] {
    [(v[1] - v[0]) / geom.hx, (v[3] - v[2]) / geom.hy]
}

pub fn extension_coeffs(geom: &ElementGeom, v: &LocalVector) -> ExtensionCoeffs {
    let (hx, hy) = (geom.hx, geom.hy);
    ExtensionCoeffs {
        gamma0: (hy * (v[0] + v[1]) + hx * (v[2] + v[3])) / (2.0 * hx + 2.0 * hy),
        gamma1: (v[1] - v[0]) / hx,
        gamma2: (v[3] - v[2]) / hy,
    }
}

/// `v_i - s(v)(M_i)` at the four edge midpoints, in closed form.
pub fn midpoint_defects(geom: &ElementGeom, v: &LocalVector) -> LocalVector {
    let (hx, hy) = (geom.hx, geom.hy);
    let d = v[0] + v[1] - v[2] - v[3];
    let s = 2.0 * (hx + hy);
    let a = hx * d / s;
    let b = -hy * d / s;
    [a, a, b, b]
}

/// Extensions of the four local basis functions.
pub fn basis_extensions(geom: &ElementGeom) -> [ExtensionCoeffs; 4] {
    let (hx, hy) = (geom.hx, geom.hy);
    let cx = hy / (2.0 * (hx + hy));
    let cy = hx / (2.0 * (hx + hy));
    [
        ExtensionCoeffs {
            gamma0: cx,
            gamma1: -1.0 / hx,
            gamma2: 0.0,
        },
        ExtensionCoeffs {
            gamma0: cx,
            gamma1: 1.0 / hx,
            gamma2: 0.0,
        },
        ExtensionCoeffs {
            gamma0: cy,
            gamma1: 0.0,
            gamma2: -1.0 / hy,
        },
        ExtensionCoeffs {
            gamma0: cy,
            gamma1: 0.0,
            gamma2: 1.0 / hy,
        },
    ]
}

/// Scalar `mu` such that the stabilizer is `mu * d d^T` with `d = (1, 1, -1, -1)`.
pub fn stabilizer_scale(geom: &ElementGeom, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(SwgError::NonPositiveMeshsize(h));
    }
    Ok(geom.hx * geom.hy / (2.0 * h * (geom.hx + geom.hy)))
}

/// Stabilizer `S_T` with meshsize `h`, as a rank-1 matrix.
pub fn stabilizer_matrix(geom: &ElementGeom, h: f64) -> Result<LocalMatrix> {
    let mu = stabilizer_scale(geom, h)?;
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = mu * STAB_DIRECTION[i] * STAB_DIRECTION[j];
        }
    }
    Ok(m)
}

/// Diffusion form for a diagonal tensor `alpha(x, y) = (a11, a22)`, with the
/// coefficient integrated by the 2x2 Gauss rule.
pub fn diffusion_matrix(
    geom: &ElementGeom,
    alpha: &dyn Fn(f64, f64) -> [f64; 2],
) -> Result<LocalMatrix> {
    let rule = QuadratureRule::gauss_2x2(geom);
    let (mut int11, mut int22) = (0.0, 0.0);
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let [a11, a22] = alpha(p[0], p[1]);
        if !(a11 > 0.0 && a22 > 0.0) {
            return Err(SwgError::NonPositiveDiffusion {
                x: p[0],
                y: p[1],
                a11,
                a22,
            });
        }
        int11 += w * a11;
        int22 += w * a22;
    }
    let g = basis_weak_gradients(geom);
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = g[j][0] * g[i][0] * int11 + g[j][1] * g[i][1] * int22;
        }
    }
    Ok(m)
}

/// Convection form `(beta . grad_w phi_j, s(phi_i))_T`.
pub fn convection_matrix(geom: &ElementGeom, beta: &dyn Fn(f64, f64) -> [f64; 2]) -> LocalMatrix {
    let rule = QuadratureRule::gauss_2x2(geom);
    let g = basis_weak_gradients(geom);
    let ext = basis_extensions(geom);
    let mut m = [[0.0; 4]; 4];
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let b = beta(p[0], p[1]);
        let s: Vec<f64> = ext.iter().map(|e| e.eval(geom, p[0], p[1])).collect();
        for j in 0..4 {
            let flux = b[0] * g[j][0] + b[1] * g[j][1];
            if flux == 0.0 {
                continue;
            }
            for i in 0..4 {
                m[i][j] += w * flux * s[i];
            }
        }
    }
    m
}

pub(crate) fn reaction_matrix_unchecked(geom: &ElementGeom, c: f64) -> LocalMatrix {
    let mut m = [[0.0; 4]; 4];
    if c == 0.0 {
        return m;
    }
    let rule = QuadratureRule::gauss_2x2(geom);
    let ext = basis_extensions(geom);
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let s: Vec<f64> = ext.iter().map(|e| e.eval(geom, p[0], p[1])).collect();
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] += w * c * s[i] * s[j];
            }
        }
    }
    m
}

/// Reaction form for an element-wise constant `c >= 0`.
pub fn reaction_matrix(geom: &ElementGeom, c: f64) -> Result<LocalMatrix> {
    if c < 0.0 {
        return Err(SwgError::NegativeReaction(c));
    }
    Ok(reaction_matrix_unchecked(geom, c))
}

/// Quadrature load vector: Simpson across the edge direction, midpoint along
/// it, with the edge-midpoint pair collapsed onto the element center.
pub fn load_vector(geom: &ElementGeom, f: &dyn Fn(f64, f64) -> f64) -> LocalVector {
    let area = geom.area();
    let sigma = geom.sigma();
    let fc = f(geom.center[0], geom.center[1]);
    let center_part = area / (6.0 * (1.0 + sigma)) * fc;
    let weights = [
        2.0 - sigma,
        2.0 - sigma,
        2.0 * sigma - 1.0,
        2.0 * sigma - 1.0,
    ];
    let mids = geom.midpoints();
    let mut out = [0.0; 4];
    for k in 0..4 {
        out[k] = area / 6.0 * f(mids[k][0], mids[k][1]) + center_part * weights[k];
    }
    out
}

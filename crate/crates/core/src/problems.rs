//! Model problems `-div(alpha grad u) + beta . grad u + c u = f` with
//! Dirichlet data `g`, and the registry of built-in manufactured solutions.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Result, SwgError};
use crate::mesh::Domain;

pub type ScalarField = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    Tc1,
    Tc2,
    Tc3,
    Fd1,
    Fd2,
    Custom,
}

impl ProblemId {
    pub const BUILT_IN: [ProblemId; 5] = [
        ProblemId::Tc1,
        ProblemId::Tc2,
        ProblemId::Tc3,
        ProblemId::Fd1,
        ProblemId::Fd2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ProblemId::Tc1 => "tc1",
            ProblemId::Tc2 => "tc2",
            ProblemId::Tc3 => "tc3",
            ProblemId::Fd1 => "fd1",
            ProblemId::Fd2 => "fd2",
            ProblemId::Custom => "custom",
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = SwgError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tc1" => Ok(ProblemId::Tc1),
            "tc2" => Ok(ProblemId::Tc2),
            "tc3" => Ok(ProblemId::Tc3),
            "fd1" => Ok(ProblemId::Fd1),
            "fd2" => Ok(ProblemId::Fd2),
            "custom" => Ok(ProblemId::Custom),
            _ => Err(SwgError::UnknownProblem(s.to_string())),
        }
    }
}

/// Exact solution and its gradient, for error studies.
#[derive(Clone)]
pub struct ExactSolution {
    pub value: ScalarField,
    pub gradient: VectorField,
}

/// Coefficients and data of a boundary value problem.
///
/// The diffusion tensor is diagonal: `alpha` returns `(a11, a22)`. The
/// reaction coefficient is sampled once per element at its center.
#[derive(Clone)]
pub struct ProblemSpec {
    pub id: ProblemId,
    pub summary: String,
    pub domain: Domain,
    pub alpha: VectorField,
    pub beta: VectorField,
    pub reaction: ScalarField,
    pub source: ScalarField,
    pub dirichlet: ScalarField,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("id", &self.id)
            .field("summary", &self.summary)
            .field("domain", &self.domain)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

/// Constant-coefficient user problem on a rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCoefficients {
    /// Full 2x2 diffusion tensor; must be diagonal with positive entries.
    pub alpha: [[f64; 2]; 2],
    pub beta: [f64; 2],
    pub c: f64,
    pub f: f64,
    pub g: f64,
    pub domain: Domain,
}

impl Default for ConstantCoefficients {
    fn default() -> Self {
        ConstantCoefficients {
            alpha: [[1.0, 0.0], [0.0, 1.0]],
            beta: [0.0, 0.0],
            c: 0.0,
            f: 0.0,
            g: 0.0,
            domain: Domain::UNIT_SQUARE,
        }
    }
}

impl ProblemSpec {
    pub fn custom(k: ConstantCoefficients) -> Result<Self> {
        if k.alpha[0][1] != 0.0 || k.alpha[1][0] != 0.0 {
            return Err(SwgError::OffDiagonalDiffusion);
        }
        let (a11, a22) = (k.alpha[0][0], k.alpha[1][1]);
        if !(a11 > 0.0 && a22 > 0.0) {
            return Err(SwgError::NonPositiveDiffusion {
                x: f64::NAN,
                y: f64::NAN,
                a11,
                a22,
            });
        }
        if k.c < 0.0 {
            return Err(SwgError::NegativeReaction(k.c));
        }
        // u = g is the exact solution exactly when c g = f
        let exact = (k.c * k.g == k.f).then(|| ExactSolution {
            value: constant(k.g),
            gradient: Arc::new(|_, _| [0.0, 0.0]),
        });
        let beta = k.beta;
        Ok(ProblemSpec {
            id: ProblemId::Custom,
            summary: format!(
                "alpha=diag({a11},{a22}), beta=({},{}), c={}, f={}, g={}",
                beta[0], beta[1], k.c, k.f, k.g
            ),
            domain: k.domain,
            alpha: Arc::new(move |_, _| [a11, a22]),
            beta: Arc::new(move |_, _| beta),
            reaction: constant(k.c),
            source: constant(k.f),
            dirichlet: constant(k.g),
            exact,
        })
    }
}

fn constant(v: f64) -> ScalarField {
    Arc::new(move |_, _| v)
}

fn tc3_factor(t: f64) -> f64 {
    t * t * (t * t - 1.2) - 0.3
}

fn tc3_factor_derivative(t: f64) -> f64 {
    4.0 * t * t * t - 2.4 * t
}

/// Looks up a built-in problem.
pub fn get_problem(id: ProblemId) -> Result<ProblemSpec> {
    let unit = Domain::UNIT_SQUARE;
    let identity: VectorField = Arc::new(|_, _| [1.0, 1.0]);
    let no_flow: VectorField = Arc::new(|_, _| [0.0, 0.0]);
    let spec = match id {
        ProblemId::Tc1 => {
            let u = |x: f64, y: f64| x * x + 2.0 * x * y;
            ProblemSpec {
                id,
                summary: "u=x^2+2xy, alpha=I, beta=(-1,-1), c=0, f=-2-4x-2y".into(),
                domain: unit,
                alpha: identity,
                beta: Arc::new(|_, _| [-1.0, -1.0]),
                reaction: constant(0.0),
                source: Arc::new(|x, y| -2.0 - 4.0 * x - 2.0 * y),
                dirichlet: Arc::new(u),
                exact: Some(ExactSolution {
                    value: Arc::new(u),
                    gradient: Arc::new(|x, y| [2.0 * x + 2.0 * y, 2.0 * x]),
                }),
            }
        }
        ProblemId::Tc2 => {
            let u = |x: f64, y: f64| -x.sin() * y.sin();
            ProblemSpec {
                id,
                summary: "u=-sin(x)sin(y), alpha=diag(xy+1,3xy), beta=(y,3x), c=0, f=-(4xy+1)sin(x)sin(y)"
                    .into(),
                domain: unit,
                alpha: Arc::new(|x, y| [x * y + 1.0, 3.0 * x * y]),
                beta: Arc::new(|x, y| [y, 3.0 * x]),
                reaction: constant(0.0),
                source: Arc::new(|x, y| -(4.0 * x * y + 1.0) * x.sin() * y.sin()),
                dirichlet: Arc::new(u),
                exact: Some(ExactSolution {
                    value: Arc::new(u),
                    gradient: Arc::new(|x, y| [-x.cos() * y.sin(), -x.sin() * y.cos()]),
                }),
            }
        }
        ProblemId::Tc3 => {
            let u = |x: f64, y: f64| -tc3_factor(x) * tc3_factor(y);
            ProblemSpec {
                id,
                summary:
                    "u=-(x^2(x^2-1.2)-0.3)(y^2(y^2-1.2)-0.3) on (-1,1)^2, alpha=I, beta=0, c=16"
                        .into(),
                domain: Domain::new(-1.0, 1.0, -1.0, 1.0),
                alpha: identity,
                beta: no_flow,
                reaction: constant(16.0),
                source: Arc::new(|x, y| {
                    8.0 * y * y * (2.7 - y * y) * tc3_factor(x)
                        + 8.0 * x * x * (2.7 - x * x) * tc3_factor(y)
                }),
                dirichlet: Arc::new(u),
                exact: Some(ExactSolution {
                    value: Arc::new(u),
                    gradient: Arc::new(|x, y| {
                        [
                            -tc3_factor_derivative(x) * tc3_factor(y),
                            -tc3_factor(x) * tc3_factor_derivative(y),
                        ]
                    }),
                }),
            }
        }
        ProblemId::Fd1 => {
            let u = |x: f64, y: f64| -x * (x - 1.0) * y * (y - 1.0);
            ProblemSpec {
                id,
                summary: "u=-x(x-1)y(y-1), alpha=I, beta=0, c=0, f=2x(x-1)+2y(y-1)".into(),
                domain: unit,
                alpha: identity,
                beta: no_flow,
                reaction: constant(0.0),
                source: Arc::new(|x, y| 2.0 * x * (x - 1.0) + 2.0 * y * (y - 1.0)),
                dirichlet: Arc::new(u),
                exact: Some(ExactSolution {
                    value: Arc::new(u),
                    gradient: Arc::new(|x, y| {
                        [
                            -(2.0 * x - 1.0) * y * (y - 1.0),
                            -x * (x - 1.0) * (2.0 * y - 1.0),
                        ]
                    }),
                }),
            }
        }
        ProblemId::Fd2 => {
            let u = |x: f64, y: f64| -x.sin() * y.sin() - x * x + y * y;
            ProblemSpec {
                id,
                summary: "u=-sin(x)sin(y)-x^2+y^2, alpha=I, beta=0, c=0, f=-2sin(x)sin(y)".into(),
                domain: unit,
                alpha: identity,
                beta: no_flow,
                reaction: constant(0.0),
                source: Arc::new(|x, y| -2.0 * x.sin() * y.sin()),
                dirichlet: Arc::new(u),
                exact: Some(ExactSolution {
                    value: Arc::new(u),
                    gradient: Arc::new(|x, y| {
                        [-x.cos() * y.sin() - 2.0 * x, -x.sin() * y.cos() + 2.0 * y]
                    }),
                }),
            }
        }
        ProblemId::Custom => {
            return Err(SwgError::UnknownProblem(
                "custom (build it with ProblemSpec::custom)".into(),
            ))
        }
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Samples on a 10x10 grid strictly inside the domain.
    fn samples(d: &Domain) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for a in 0..10 {
            for b in 0..10 {
                let x = d.x0 + (d.x1 - d.x0) * (a as f64 + 0.5) / 10.0;
                let y = d.y0 + (d.y1 - d.y0) * (b as f64 + 0.5) / 10.0;
                out.push((x, y));
            }
        }
        out
    }

    #[test]
    fn parse_ids() {
        assert_eq!("tc2".parse::<ProblemId>().unwrap(), ProblemId::Tc2);
        assert_eq!("FD1".parse::<ProblemId>().unwrap(), ProblemId::Fd1);
        assert!(matches!(
            "nosuch".parse::<ProblemId>(),
            Err(SwgError::UnknownProblem(_))
        ));
    }

    #[test]
    fn manufactured_consistency() {
        // residual of the PDE evaluated with centered differences of the stored u
        let step = 1e-5;
        for id in ProblemId::BUILT_IN {
            let p = get_problem(id).unwrap();
            let ex = p.exact.clone().unwrap();
            let u = |x: f64, y: f64| (ex.value)(x, y);
            for (x, y) in samples(&p.domain) {
                let flux_x = |x: f64, y: f64| {
                    (p.alpha)(x, y)[0] * (u(x + step, y) - u(x - step, y)) / (2.0 * step)
                };
                let flux_y = |x: f64, y: f64| {
                    (p.alpha)(x, y)[1] * (u(x, y + step) - u(x, y - step)) / (2.0 * step)
                };
                let div = (flux_x(x + step, y) - flux_x(x - step, y)) / (2.0 * step)
                    + (flux_y(x, y + step) - flux_y(x, y - step)) / (2.0 * step);
                let grad = (ex.gradient)(x, y);
                let b = (p.beta)(x, y);
                let residual =
                    -div + b[0] * grad[0] + b[1] * grad[1] + (p.reaction)(x, y) * u(x, y)
                        - (p.source)(x, y);
                assert!(residual.abs() < 1e-4, "{id} at ({x},{y}): {residual}");
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let step = 1e-6;
        for id in ProblemId::BUILT_IN {
            let p = get_problem(id).unwrap();
            let ex = p.exact.unwrap();
            for (x, y) in samples(&p.domain) {
                let g = (ex.gradient)(x, y);
                let gx = ((ex.value)(x + step, y) - (ex.value)(x - step, y)) / (2.0 * step);
                let gy = ((ex.value)(x, y + step) - (ex.value)(x, y - step)) / (2.0 * step);
                assert_abs_diff_eq!(g[0], gx, epsilon = 1e-8);
                assert_abs_diff_eq!(g[1], gy, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn sources_nonpositive() {
        for id in ProblemId::BUILT_IN {
            let p = get_problem(id).unwrap();
            for (x, y) in samples(&p.domain) {
                assert!((p.source)(x, y) <= 0.0, "{id} f>0 at ({x},{y})");
            }
        }
    }

    #[test]
    fn registry_values() {
        let p = get_problem(ProblemId::Tc1).unwrap();
        assert_eq!((p.beta)(0.3, 0.2), [-1.0, -1.0]);
        assert_abs_diff_eq!((p.source)(0.5, 0.25), -2.0 - 2.0 - 0.5);
        let p = get_problem(ProblemId::Tc2).unwrap();
        assert_eq!((p.alpha)(0.5, 0.5), [1.25, 0.75]);
        let p = get_problem(ProblemId::Tc3).unwrap();
        assert_eq!(p.domain, Domain::new(-1.0, 1.0, -1.0, 1.0));
        assert_eq!((p.reaction)(0.1, 0.1), 16.0);
    }

    #[test]
    fn custom_problem_validation() {
        let k = ConstantCoefficients {
            alpha: [[1.0, 0.5], [0.0, 1.0]],
            ..Default::default()
        };
        assert_eq!(
            ProblemSpec::custom(k).unwrap_err(),
            SwgError::OffDiagonalDiffusion
        );
        let k = ConstantCoefficients {
            g: 2.0,
            ..Default::default()
        };
        let p = ProblemSpec::custom(k).unwrap();
        assert_eq!((p.exact.unwrap().value)(0.3, 0.3), 2.0);
        assert!(get_problem(ProblemId::Custom).is_err());
    }
}

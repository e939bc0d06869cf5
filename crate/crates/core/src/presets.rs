//! Built-in problem families and the plain-data description they are written in.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BoxDomain, CoefficientSpec, Exponents, Expr, ProblemSpec};

fn zero() -> Expr {
    Expr::Const(0.0)
}

/// Problem written with [`Expr`] data, as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub horizon: f64,
    pub p: Vec<f64>,
    pub m: Vec<f64>,
    /// One coefficient `a_j(x, t, u)` per axis.
    pub coefficients: Vec<Expr>,
    pub lambda: f64,
    #[serde(default)]
    pub lipschitz: f64,
    #[serde(default = "zero")]
    pub source: Expr,
    #[serde(default = "zero")]
    pub boundary: Expr,
    #[serde(default = "zero")]
    pub initial: Expr,
    pub sigma: f64,
    #[serde(default)]
    pub eps0: f64,
}

impl ProblemConfig {
    pub fn domain(&self) -> Result<BoxDomain> {
        BoxDomain::new(self.lower.clone(), self.upper.clone())
    }

    pub fn build(&self) -> Result<ProblemSpec> {
        let domain = self.domain()?;
        let exponents = Exponents::new(self.p.clone(), self.m.clone())?;
        let coefficients = CoefficientSpec {
            coeffs: self.coefficients.iter().map(|e| e.compile(&domain)).collect(),
            lambda: self.lambda,
            lipschitz: self.lipschitz,
        };
        ProblemSpec::new(
            domain.clone(),
            self.horizon,
            exponents,
            coefficients,
            self.source.compile(&domain),
            self.boundary.compile(&domain),
            self.initial.compile(&domain),
            self.sigma,
            self.eps0,
        )
    }

    /// Same problem with `f ≡ 0` and `g ≡ u₀ ≡ c`.
    pub fn constant_data(&self, c: f64) -> Self {
        Self {
            source: Expr::Const(0.0),
            boundary: Expr::Const(c),
            initial: Expr::Const(c),
            eps0: c,
            ..self.clone()
        }
    }
}

pub const PRESET_NAMES: [&str; 5] = ["porous", "orthotropic", "anisotropic", "manufactured", "manufactured-1d"];

/// Amplitude `A` of the two-dimensional manufactured solution.
pub const MANUFACTURED_AMPLITUDE: f64 = 12.0;
/// Initial and boundary value `c` of the two-dimensional manufactured solution.
pub const MANUFACTURED_BASE: f64 = 0.5;

fn unit_box(n: usize) -> (Vec<f64>, Vec<f64>) {
    (vec![0.0; n], vec![1.0; n])
}

fn affine_x(c: f64, x: Vec<f64>) -> Expr {
    Expr::Affine { c, x, t: 0.0, u: 0.0 }
}

fn affine_t(c: f64, t: f64) -> Expr {
    Expr::Affine { c, x: Vec::new(), t, u: 0.0 }
}

/// `u = c + A t Π sin(π x_j)` on the unit square.
pub fn manufactured_exact(base: f64, amplitude: f64) -> Expr {
    Expr::Sum(vec![
        Expr::Const(base),
        Expr::Product(vec![Expr::Bump(amplitude), affine_t(0.0, 1.0)]),
    ])
}

/// `u = 1 + t x (1 − x)` on the unit interval.
pub fn manufactured_1d_exact() -> Expr {
    Expr::Sum(vec![
        Expr::Const(1.0),
        Expr::Product(vec![affine_t(0.0, 1.0), affine_x(0.0, vec![1.0]), affine_x(1.0, vec![-1.0])]),
    ])
}

pub fn preset(name: &str) -> Result<ProblemConfig> {
    let cfg = match name {
        // p_j = 2, m_j = 2: porous-medium type, g ≡ 0
        "porous" => {
            let (lower, upper) = unit_box(2);
            ProblemConfig {
                lower,
                upper,
                horizon: 0.25,
                p: vec![2.0, 2.0],
                m: vec![2.0, 2.0],
                coefficients: vec![Expr::Const(1.0), Expr::Const(1.0)],
                lambda: 1.0,
                lipschitz: 0.0,
                source: Expr::Const(0.2),
                boundary: Expr::Const(0.0),
                initial: Expr::Bump(0.2),
                sigma: 3.0,
                eps0: 0.0,
            }
        }
        // m_j = 1, mixed p_j
        "orthotropic" => {
            let (lower, upper) = unit_box(2);
            ProblemConfig {
                lower,
                upper,
                horizon: 0.25,
                p: vec![1.75, 3.0],
                m: vec![1.0, 1.0],
                coefficients: vec![affine_x(1.0, vec![0.5, 0.0]), Expr::Const(1.0)],
                lambda: 1.5,
                lipschitz: 0.0,
                source: Expr::Const(1.0),
                boundary: affine_x(0.1, vec![0.2, 0.0]),
                initial: Expr::Bump(0.3),
                sigma: 3.0,
                eps0: 0.1,
            }
        }
        // p = (3, 2), m = (1, 1.5), coefficient depending on u
        "anisotropic" => {
            let (lower, upper) = unit_box(2);
            ProblemConfig {
                lower,
                upper,
                horizon: 0.25,
                p: vec![3.0, 2.0],
                m: vec![1.0, 1.5],
                coefficients: vec![
                    Expr::Sum(vec![
                        Expr::Const(1.0),
                        Expr::Product(vec![
                            Expr::Const(0.25),
                            Expr::Tanh(Box::new(Expr::Affine { c: 0.0, x: Vec::new(), t: 0.0, u: 1.0 })),
                        ]),
                    ]),
                    Expr::Sum(vec![Expr::Const(1.0), Expr::Bump(0.2)]),
                ],
                lambda: 4.0 / 3.0,
                lipschitz: 0.25,
                source: Expr::Const(0.5),
                boundary: Expr::Const(0.05),
                initial: Expr::Bump(0.3),
                sigma: 3.0,
                eps0: 0.05,
            }
        }
        // u = c + A t Π sin(π x_j), p = 2, m = 1, a ≡ 1
        "manufactured" => {
            let (lower, upper) = unit_box(2);
            let a = MANUFACTURED_AMPLITUDE;
            ProblemConfig {
                lower,
                upper,
                horizon: 1.0,
                p: vec![2.0, 2.0],
                m: vec![1.0, 1.0],
                coefficients: vec![Expr::Const(1.0), Expr::Const(1.0)],
                lambda: 1.0,
                lipschitz: 0.0,
                source: Expr::Product(vec![
                    Expr::Bump(a),
                    affine_t(1.0, 2.0 * std::f64::consts::PI * std::f64::consts::PI),
                ]),
                boundary: Expr::Const(MANUFACTURED_BASE),
                initial: Expr::Const(MANUFACTURED_BASE),
                sigma: 3.0,
                eps0: MANUFACTURED_BASE,
            }
        }
        // u = 1 + t x (1 − x), f = x (1 − x) + 2t
        "manufactured-1d" => {
            let (lower, upper) = unit_box(1);
            ProblemConfig {
                lower,
                upper,
                horizon: 1.0,
                p: vec![2.0],
                m: vec![1.0],
                coefficients: vec![Expr::Const(1.0)],
                lambda: 1.0,
                lipschitz: 0.0,
                source: Expr::Sum(vec![
                    Expr::Product(vec![affine_x(0.0, vec![1.0]), affine_x(1.0, vec![-1.0])]),
                    affine_t(0.0, 2.0),
                ]),
                boundary: Expr::Const(1.0),
                initial: Expr::Const(1.0),
                sigma: 3.0,
                eps0: 1.0,
            }
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown preset {other:?}; known: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(cfg)
}

/// Exact solution of a manufactured preset.
pub fn exact_solution(name: &str) -> Option<Expr> {
    match name {
        "manufactured" => Some(manufactured_exact(MANUFACTURED_BASE, MANUFACTURED_AMPLITUDE)),
        "manufactured-1d" => Some(manufactured_1d_exact()),
        _ => None,
    }
}

/// Randomized data pair `(lower, upper)` around `base` with `f_u ≤ f_v`,
/// `u₀ ≤ v₀`, `g_u ≤ g_v`, and `g_v ≥ ε > 0`.
pub fn ordered_pair(base: &ProblemConfig, rng: &mut impl Rng) -> (ProblemConfig, ProblemConfig) {
    let eps_v: f64 = rng.gen_range(0.05..0.3);
    let eps_u: f64 = rng.gen_range(0.0..eps_v);
    let beta: f64 = rng.gen_range(0.5..1.0);
    let alpha: f64 = rng.gen_range(0.5..1.0);
    let gamma: f64 = rng.gen_range(0.0..0.5);
    let scale = |c: f64, e: &Expr| Expr::Product(vec![Expr::Const(c), e.clone()]);
    let shift = |c: f64, e: Expr| Expr::Sum(vec![Expr::Const(c), e]);
    let lower = ProblemConfig {
        source: scale(beta, &base.source),
        boundary: shift(eps_u, base.boundary.clone()),
        initial: scale(alpha, &base.initial),
        eps0: if eps_u > 0.0 || base.eps0 > 0.0 { base.eps0 + eps_u } else { 0.0 },
        ..base.clone()
    };
    let upper = ProblemConfig {
        boundary: shift(eps_v, base.boundary.clone()),
        initial: shift(eps_v, scale(1.0 + gamma, &base.initial)),
        eps0: base.eps0 + eps_v,
        ..base.clone()
    };
    (lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_admissibility;

    #[test]
    fn presets_are_admissible() {
        for name in PRESET_NAMES {
            let spec = preset(name).unwrap().build().unwrap();
            let report = check_admissibility(&spec, 500, 1);
            assert!(report.all_passed(), "{name}: {report:?}");
        }
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = preset("anisotropic").unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ProblemConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }
}

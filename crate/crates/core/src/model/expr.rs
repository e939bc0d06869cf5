use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::problem::BoxDomain;

/// Arguments handed to every data evaluator. Evaluators ignore what they do
/// not depend on (`u0` ignores `t` and `u`, sources ignore `u`).
#[derive(Debug, Clone, Copy)]
pub struct Point<'a> {
    pub x: &'a [f64],
    pub t: f64,
    pub u: f64,
}

type DynFn = dyn Fn(Point<'_>) -> f64 + Send + Sync;

/// Shared, pure evaluator of a scalar function of `(x, t, u)`.
#[derive(Clone)]
pub struct Evaluator {
    func: Arc<DynFn>,
    depends_on_u: bool,
}

impl Evaluator {
    pub fn new<F>(func: F) -> Self
    where
        F: Fn(Point<'_>) -> f64 + Send + Sync + 'static,
    {
        Self {
            func: Arc::new(func),
            depends_on_u: true,
        }
    }

    /// Evaluator known not to depend on `u`; lets the Jacobian skip the
    /// finite-difference derivative in `u`.
    pub fn without_u<F>(func: F) -> Self
    where
        F: Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            func: Arc::new(move |p: Point<'_>| func(p.x, p.t)),
            depends_on_u: false,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::without_u(move |_, _| value)
    }

    #[inline]
    pub fn eval(&self, x: &[f64], t: f64, u: f64) -> f64 {
        (self.func)(Point { x, t, u })
    }

    pub fn depends_on_u(&self) -> bool {
        self.depends_on_u
    }

    /// Central-difference derivative in `u`; zero for `u`-independent evaluators.
    pub fn du(&self, x: &[f64], t: f64, u: f64) -> f64 {
        if !self.depends_on_u {
            return 0.0;
        }
        let step = 1e-6 * u.abs().max(1.0);
        (self.eval(x, t, u + step) - self.eval(x, t, u - step)) / (2.0 * step)
    }
}

impl fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Evaluator")
            .field("depends_on_u", &self.depends_on_u)
            .finish_non_exhaustive()
    }
}

/// Data expressions accepted by the plain-text configuration.
///
/// `bump(a)` is `a * Π_j sin(π (x_j - lo_j) / L_j)`, which vanishes on the
/// boundary of the box it is compiled against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    Const(f64),
    Affine {
        #[serde(default)]
        c: f64,
        #[serde(default)]
        x: Vec<f64>,
        #[serde(default)]
        t: f64,
        #[serde(default)]
        u: f64,
    },
    Bump(f64),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Tanh(Box<Expr>),
    Sin(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn depends_on_u(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Bump(_) => false,
            Expr::Affine { u, .. } => *u != 0.0,
            Expr::Sum(items) | Expr::Product(items) => items.iter().any(Expr::depends_on_u),
            Expr::Tanh(inner) | Expr::Sin(inner) | Expr::Exp(inner) => inner.depends_on_u(),
        }
    }

    pub fn evaluate(&self, domain: &BoxDomain, p: Point<'_>) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Affine { c, x, t, u } => {
                let lin: f64 = x.iter().zip(p.x).map(|(a, xi)| a * xi).sum();
                c + lin + t * p.t + u * p.u
            }
            Expr::Bump(amp) => {
                let prod: f64 = p
                    .x
                    .iter()
                    .enumerate()
                    .map(|(j, &xj)| {
                        (PI * (xj - domain.lower()[j]) / domain.extent(j)).sin()
                    })
                    .product();
                amp * prod
            }
            Expr::Sum(items) => items.iter().map(|e| e.evaluate(domain, p)).sum(),
            Expr::Product(items) => items.iter().map(|e| e.evaluate(domain, p)).product(),
            Expr::Tanh(inner) => inner.evaluate(domain, p).tanh(),
            Expr::Sin(inner) => inner.evaluate(domain, p).sin(),
            Expr::Exp(inner) => inner.evaluate(domain, p).exp(),
        }
    }

    pub fn compile(&self, domain: &BoxDomain) -> Evaluator {
        let expr = self.clone();
        let domain = domain.clone();
        let depends_on_u = expr.depends_on_u();
        Evaluator {
            func: Arc::new(move |p: Point<'_>| expr.evaluate(&domain, p)),
            depends_on_u,
        }
    }
}

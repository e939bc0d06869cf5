use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-axis growth exponents `p` and power exponents `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    p: Vec<f64>,
    m: Vec<f64>,
}

impl Exponents {
    pub fn new(p: Vec<f64>, m: Vec<f64>) -> Result<Self> {
        if p.is_empty() || p.len() != m.len() {
            return Err(Error::Dimension(format!(
                "p has {} entries, m has {}",
                p.len(),
                m.len()
            )));
        }
        for (axis, &value) in p.iter().enumerate() {
            if !(value > 1.0) || !value.is_finite() {
                return Err(Error::InvalidGrowthExponent { axis, value });
            }
        }
        for (axis, &value) in m.iter().enumerate() {
            if !(value >= 1.0) || !value.is_finite() {
                return Err(Error::InvalidPowerExponent { axis, value });
            }
        }
        Ok(Self { p, m })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn m(&self) -> &[f64] {
        &self.m
    }

    /// `m = min_j m_j`.
    pub fn m_min(&self) -> f64 {
        self.m.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Hölder conjugate `p_j' = p_j / (p_j - 1)`.
    pub fn conjugate(&self, axis: usize) -> f64 {
        let p = self.p[axis];
        p / (p - 1.0)
    }

    /// Per-axis margin `p_j' m - m_j`; closeness holds iff every entry is positive.
    pub fn closeness_margins(&self) -> Vec<f64> {
        let m = self.m_min();
        (0..self.dim())
            .map(|j| self.conjugate(j) * m - self.m[j])
            .collect()
    }

    /// First axis violating `m_j < p_j' m`, if any.
    pub fn closeness_violation(&self) -> Option<usize> {
        self.closeness_margins().iter().position(|&gap| !(gap > 0.0))
    }

    pub fn satisfies_closeness(&self) -> bool {
        self.closeness_violation().is_none()
    }

    pub fn bar(&self) -> BarExponents {
        compute_bar_exponents(self)
    }
}

/// Sobolev conjugate of the harmonic mean: finite below the dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SobolevConjugate {
    Finite(f64),
    Unbounded,
}

impl SobolevConjugate {
    pub fn finite(self) -> Option<f64> {
        match self {
            SobolevConjugate::Finite(v) => Some(v),
            SobolevConjugate::Unbounded => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarExponents {
    /// Harmonic mean `p̄` of the growth exponents.
    pub p_bar: f64,
    /// `p̄' = p̄ / (p̄ - 1)`.
    pub p_bar_conj: f64,
    pub p_bar_star: SobolevConjugate,
    /// `μ = (m + 1) / m`.
    pub mu: f64,
}

pub fn compute_bar_exponents(exponents: &Exponents) -> BarExponents {
    let n = exponents.dim() as f64;
    let inv_sum: f64 = exponents.p().iter().map(|p| 1.0 / p).sum();
    let p_bar = n / inv_sum;
    let p_bar_star = if p_bar < n {
        SobolevConjugate::Finite(n * p_bar / (n - p_bar))
    } else {
        SobolevConjugate::Unbounded
    };
    let m = exponents.m_min();
    BarExponents {
        p_bar,
        p_bar_conj: p_bar / (p_bar - 1.0),
        p_bar_star,
        mu: (m + 1.0) / m,
    }
}

//! Sampled audit of the data conditions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::problem::ProblemSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub conditions: Vec<ConditionCheck>,
    /// Minimum over axes of `p_j' m - m_j`.
    pub closeness_margin: f64,
    pub closeness_failing_axis: Option<usize>,
    /// `σ - (1 + N/p̄)`.
    pub sigma_margin: f64,
    pub cascade_enabled: bool,
    pub degiorgi_enabled: bool,
}

impl AdmissibilityReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionCheck> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// All conditions except closeness, which only gates the cascade.
    pub fn single_solve_admissible(&self) -> bool {
        self.conditions
            .iter()
            .filter(|c| c.name != "closeness")
            .all(|c| c.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }
}

/// Relative tolerance under which `σ` is considered to sit on its lower bound.
pub const SIGMA_BOUNDARY_RTOL: f64 = 1e-12;

fn check(name: &str, passed: bool, detail: String) -> ConditionCheck {
    ConditionCheck {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Audits the data conditions on `samples` random points per condition.
///
/// Coefficients are probed for `u` in `[0, u_range]`, where `u_range` is ten
/// times `M_* = max(sup u0, sup g) + 1` estimated from the same samples.
pub fn check_admissibility(spec: &ProblemSpec, samples: usize, seed: u64) -> AdmissibilityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.dim();
    let lo = spec.domain.lower().to_vec();
    let hi = spec.domain.upper().to_vec();
    let horizon = spec.horizon;
    let samples = samples.max(1);

    let point = |rng: &mut ChaCha8Rng| -> (Vec<f64>, f64) {
        let x = (0..n).map(|j| rng.gen_range(lo[j]..=hi[j])).collect();
        (x, rng.gen_range(0.0..=horizon))
    };
    let boundary_point = |rng: &mut ChaCha8Rng| -> (Vec<f64>, f64) {
        let mut x: Vec<f64> = (0..n).map(|j| rng.gen_range(lo[j]..=hi[j])).collect();
        let face = rng.gen_range(0..n);
        x[face] = if rng.gen_bool(0.5) { lo[face] } else { hi[face] };
        (x, rng.gen_range(0.0..=horizon))
    };

    let mut conditions = Vec::new();
    let exps = &spec.exponents;

    let p_ok = exps.p().iter().all(|&p| p > 1.0);
    conditions.push(check("p_gt_one", p_ok, format!("p = {:?}", exps.p())));
    let m_ok = exps.m_min() >= 1.0;
    conditions.push(check("m_ge_one", m_ok, format!("m = {}", exps.m_min())));

    // initial data: nonnegative, bounded
    let mut u0_min = f64::INFINITY;
    let mut u0_max = f64::NEG_INFINITY;
    for _ in 0..samples {
        let (x, _) = point(&mut rng);
        let v = spec.initial.eval(&x, 0.0, 0.0);
        u0_min = u0_min.min(v);
        u0_max = u0_max.max(v);
    }
    conditions.push(check(
        "initial_nonnegative_bounded",
        u0_min >= 0.0 && u0_max.is_finite(),
        format!("sampled u0 in [{u0_min:.6e}, {u0_max:.6e}]"),
    ));

    // boundary data: g >= eps0 > 0 everywhere, or g == 0
    let mut g_min = f64::INFINITY;
    let mut g_max = f64::NEG_INFINITY;
    let mut g_abs_max: f64 = 0.0;
    for i in 0..2 * samples {
        let (x, t) = if i % 2 == 0 {
            point(&mut rng)
        } else {
            boundary_point(&mut rng)
        };
        let v = spec.boundary.eval(&x, t, 0.0);
        g_min = g_min.min(v);
        g_max = g_max.max(v);
        g_abs_max = g_abs_max.max(v.abs());
    }
    let g_ok = if spec.eps0 > 0.0 {
        g_min >= spec.eps0 && g_max.is_finite()
    } else {
        g_abs_max == 0.0
    };
    conditions.push(check(
        "boundary_form",
        g_ok,
        format!("eps0 = {}, sampled g in [{g_min:.6e}, {g_max:.6e}]", spec.eps0),
    ));

    let m_star = u0_max.max(g_max).max(0.0) + 1.0;
    let u_range = 10.0 * m_star;

    // coefficients: ellipticity band and Lipschitz continuity in u
    let lambda = spec.coefficients.lambda;
    let lip = spec.coefficients.lipschitz;
    let mut a_min = f64::INFINITY;
    let mut a_max = f64::NEG_INFINITY;
    let mut worst_lip: f64 = 0.0;
    for coeff in &spec.coefficients.coeffs {
        for _ in 0..samples {
            let (x, t) = point(&mut rng);
            let u = rng.gen_range(0.0..=u_range);
            let v = rng.gen_range(0.0..=u_range);
            let au = coeff.eval(&x, t, u);
            let av = coeff.eval(&x, t, v);
            a_min = a_min.min(au).min(av);
            a_max = a_max.max(au).max(av);
            if u != v {
                worst_lip = worst_lip.max((au - av).abs() / (u - v).abs());
            }
        }
    }
    conditions.push(check(
        "ellipticity",
        a_min >= 1.0 / lambda && a_max <= lambda,
        format!("sampled a in [{a_min:.6e}, {a_max:.6e}], band [{:.6e}, {lambda:.6e}]", 1.0 / lambda),
    ));
    conditions.push(check(
        "lipschitz_in_u",
        worst_lip <= lip * (1.0 + 1e-9) + 1e-12,
        format!("largest sampled slope {worst_lip:.6e}, declared {lip:.6e}"),
    ));

    // source: nonnegative and finite on the sampled cylinder
    let mut f_min = f64::INFINITY;
    let mut f_max = f64::NEG_INFINITY;
    for _ in 0..samples {
        let (x, t) = point(&mut rng);
        let v = spec.source.eval(&x, t, 0.0);
        f_min = f_min.min(v);
        f_max = f_max.max(v);
    }
    conditions.push(check(
        "source_nonnegative",
        f_min >= 0.0,
        format!("sampled f in [{f_min:.6e}, {f_max:.6e}]"),
    ));
    conditions.push(check(
        "source_integrable",
        f_max.is_finite() && f_min.is_finite(),
        format!("sampled sup |f| = {:.6e}", f_max.abs().max(f_min.abs())),
    ));

    let bound = spec.sigma_bound();
    let sigma_margin = spec.sigma - bound;
    let sigma_ok = sigma_margin > SIGMA_BOUNDARY_RTOL * bound;
    conditions.push(check(
        "sigma_bound",
        sigma_ok,
        format!("sigma = {}, 1 + N/p_bar = {bound}", spec.sigma),
    ));

    let margins = exps.closeness_margins();
    let closeness_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let failing = exps.closeness_violation();
    conditions.push(check(
        "closeness",
        failing.is_none(),
        match failing {
            Some(j) => format!(
                "axis {j}: m_j = {} is not below p_j' m = {}",
                exps.m()[j],
                exps.conjugate(j) * exps.m_min()
            ),
            None => format!("margins {margins:?}"),
        },
    ));

    let report = AdmissibilityReport {
        conditions,
        closeness_margin,
        closeness_failing_axis: failing,
        sigma_margin,
        cascade_enabled: false,
        degiorgi_enabled: sigma_ok,
    };
    AdmissibilityReport {
        cascade_enabled: failing.is_none() && report.single_solve_admissible(),
        ..report
    }
}

use std::sync::Arc;

use anisodnl::analysis::*;
use anisodnl::discretization::{series_lp_norm, Grid, ScalarField, TimeSeries};
use anisodnl::model::{Exponents, ProblemSpec};
use anisodnl::presets::{ordered_pair, ProblemConfig};
use anisodnl::solver::{regularization_cascade, solve_problem, Mode};
use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::artifacts::{report, Artifacts};
use crate::config::RunConfig;

/// Outcome of a scenario: the JSON results and any violated properties.
pub struct Outcome {
    pub results: Value,
    pub violations: Vec<String>,
}

struct Setup {
    problem: ProblemConfig,
    spec: ProblemSpec,
    grid: Arc<Grid>,
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    let problem = cfg.problem()?;
    let spec = problem.build().context("building the problem")?;
    let grid = Arc::new(Grid::new(&spec.domain, cfg.counts(spec.dim())?)?);
    Ok(Setup { problem, spec, grid })
}

pub fn run(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome> {
    let outcome = match cfg.scenario.as_str() {
        "constant" => constant(cfg, out)?,
        "manufactured" => manufactured(cfg, out)?,
        "cascade" => cascade(cfg, out)?,
        "comparison" => comparison(cfg, out)?,
        "degiorgi-report" => degiorgi(cfg, out)?,
        "mollifier-demo" => mollifier(cfg, out)?,
        "calibrate" => calibrate(cfg, out)?,
        other => bail!("unknown scenario {other:?}"),
    };
    let doc = report(&cfg.scenario, cfg, &outcome.violations, outcome.results.clone());
    out.json("report.json", &doc)?;
    Ok(outcome)
}

fn modes(ks: &[u32]) -> Vec<Mode> {
    std::iter::once(Mode::Direct)
        .chain(ks.iter().map(|&k| Mode::Truncated(k)))
        .collect()
}

fn mode_label(mode: Mode) -> String {
    match mode {
        Mode::Direct => "direct".into(),
        Mode::Truncated(k) => format!("k{k}"),
    }
}

fn constant(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome> {
    let c = cfg.options.constant;
    let mut s = setup(cfg)?;
    s.spec = s.problem.constant_data(c).build()?;
    let mut violations = Vec::new();
    let mut rows = Vec::new();
    let mut per_mode = Vec::new();
    for mode in modes(&cfg.ks) {
        let solver = cfg.solver(s.spec.horizon, mode);
        let (series, rep) = solve_problem(&s.spec, s.grid.clone(), &solver)?;
        let target = c + mode.shift();
        let dev = series
            .frames()
            .iter()
            .flat_map(|f| f.values().iter().map(move |v| (v - target).abs()))
            .fold(0.0, f64::max);
        if dev > solver.newton_tol {
            violations.push(format!("{mode}: deviation {dev:.3e} exceeds {:.3e}", solver.newton_tol));
        }
        let k = if let Mode::Truncated(k) = mode { f64::from(k) } else { 0.0 };
        rows.push(vec![k, dev, rep.total_iterations() as f64]);
        out.field(&format!("constant_{}_final.csv", mode_label(mode)), series.last())?;
        per_mode.push(json!({ "mode": mode, "target": target, "max_deviation": dev, "solve": rep }));
    }
    out.table("constant_deviation.csv", &["k", "max_deviation", "newton_iterations"], &rows)?;
    Ok(Outcome {
        results: json!({ "constant": c, "modes": per_mode }),
        violations,
    })
}

fn manufactured(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome> {
    let s = setup(cfg)?;
    let exact = cfg
        .exact()
        .context("manufactured scenario needs `exact` or a manufactured preset")?
        .compile(&s.spec.domain);
    let solver = cfg.solver(s.spec.horizon, Mode::Direct);
    let (series, rep) = solve_problem(&s.spec, s.grid.clone(), &solver)?;
    let err = l2_error(&series, &exact);
    let last = series.last();
    let reference = ScalarField::sample(s.grid.clone(), last.time(), &exact);
    let diff = ScalarField::new(
        s.grid.clone(),
        last.values().iter().zip(reference.values()).map(|(a, b)| a - b).collect(),
        last.time(),
    )?;
    out.field("manufactured_final.csv", last)?;
    out.field("manufactured_error_final.csv", &diff)?;
    out.checkpoint("manufactured_series.bin", &series)?;
    let mut violations = Vec::new();
    if series.min() < s.spec.eps0 - solver.ordering_tol(s.spec.horizon) {
        violations.push(format!("solution minimum {:.6e} is below eps0 = {}", series.min(), s.spec.eps0));
    }
    Ok(Outcome {
        results: json!({ "l2_error": err, "solve": rep }),
        violations,
    })
}

fn cascade(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome> {
    let s = setup(cfg)?;
    let solver = cfg.solver(s.spec.horizon, Mode::Direct);
    let r = regularization_cascade(&s.spec, s.grid.clone(), &solver, &cfg.ks)?;
    let mut violations = Vec::new();
    if let Some(f) = &r.failure {
        violations.push(format!("member k={} failed: {}", f.k, f.message));
    }
    let mut members = Vec::new();
    for ((k, series), rep) in r.ks.iter().zip(&r.series).zip(&r.reports) {
        let bound = 1.0 / f64::from(*k);
        if series.min() < bound - r.ordering_tol {
            violations.push(format!("k={k}: minimum {:.6e} below 1/k", series.min()));
        }
        out.checkpoint(&format!("cascade_k{k}.bin"), series)?;
        out.field(&format!("cascade_k{k}_final.csv"), series.last())?;
        members.push(json!({ "k": k, "min": series.min(), "max": series.max(), "solve": rep }));
    }
    let mut rows = Vec::new();
    for (i, pair) in r.ks.windows(2).enumerate().take(r.distances.len()) {
        rows.push(vec![f64::from(pair[0]), f64::from(pair[1]), r.distances[i], r.ordering_gaps[i]]);
        if r.ordering_gaps[i] > r.ordering_tol {
            violations.push(format!(
                "u_{} exceeds u_{} by {:.3e} (tolerance {:.3e})",
                pair[1], pair[0], r.ordering_gaps[i], r.ordering_tol
            ));
        }
    }
    out.table("cascade_distances.csv", &["k", "k_next", "distance", "ordering_gap"], &rows)?;
    Ok(Outcome {
        results: json!({
            "ks": r.ks,
            "ordering_tol": r.ordering_tol,
            "ordering_gaps": r.ordering_gaps,
            "distances": r.distances,
            "failure": r.failure,
            "members": members,
        }),
        violations,
    })
}

fn comparison(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome> {
    let s = setup(cfg)?;
    let solver = cfg.solver(s.spec.horizon, Mode::Direct);
    let tol = solver.ordering_tol(s.spec.horizon);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut violations = Vec::new();
    let mut rows = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..cfg.options.pairs {
        let (lo, hi) = ordered_pair(&s.problem, &mut rng);
        let (slo, shi) = (lo.build()?, hi.build()?);
        let (u, _) = solve_problem(&slo, s.grid.clone(), &solver)?;
        let (v, _) = solve_problem(&shi, s.grid.clone(), &solver)?;
        let rep = comparison_check(&u, &v, &slo.source, &shi.source, 0.0, 10.0 * solver.newton_tol)?;
        if rep.violation > tol || rep.max_pointwise_excess > tol {
            violations.push(format!(
                "pair {i}: integral violation {:.3e}, pointwise excess {:.3e}, tolerance {tol:.3e}",
                rep.violation, rep.max_pointwise_excess
            ));
        }
        for ((t, l), r) in rep.times.iter().zip(&rep.lhs).zip(&rep.rhs) {
            rows.push(vec![i as f64, *t, *l, *r]);
        }
        pairs.push(json!({ "lower": lo, "upper": hi, "report": rep }));
    }
    out.table("comparison_trace.csv", &["pair", "time", "lhs", "rhs"], &rows)?;
    Ok(Outcome {
        results: json!({ "tolerance": tol, "pairs": pairs }),
        violations,
    })
}

fn degiorgi(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome> {
    let s = setup(cfg)?;
    let solver = cfg.solver(s.spec.horizon, Mode::Direct);
    let steps = solver.steps_for(s.spec.horizon);
    let dg = degiorgi_constants(&s.spec, &s.grid, steps, cfg.options.c_struct)?;
    let r = regularization_cascade(&s.spec, s.grid.clone(), &solver, &cfg.ks)?;
    let mut violations = Vec::new();
    if let Some(f) = &r.failure {
        violations.push(format!("member k={} failed: {}", f.k, f.message));
    }
    let j_max = cfg.options.j_max;
    let mut level_rows = Vec::new();
    let mut energy_rows = Vec::new();
    let mut members = Vec::new();
    for (k, series) in r.ks.iter().zip(&r.series) {
        let cap = f64::from(*k);
        let v = series.map(|x| x.min(cap));
        let lv = measure_levels(&v, dg.m_level, dg.m, dg.q_bar, j_max);
        let ratio = level_recursion_ratio(&lv, dg.m_level, dg.m, dg.q_bar);
        let envelope = fit_envelope(&lv.y, dg.b, dg.dg_delta);
        if lv.y.windows(2).any(|w| w[1] > w[0]) {
            violations.push(format!("k={k}: Y_j is not nonincreasing"));
        }
        if ratio > 1.0 {
            violations.push(format!("k={k}: level recursion ratio {ratio:.3e} exceeds 1"));
        }
        if let Some(e) = &envelope {
            if !e.dominates(&lv.y, 1e-9) {
                violations.push(format!("k={k}: fitted envelope does not dominate Y_j"));
            }
        }
        for j in 0..lv.y.len() {
            level_rows.push(vec![cap, j as f64, lv.levels[j], lv.y[j], lv.e[j]]);
        }
        let energy = energy_check(series, &s.spec, Some(*k), dg.m_level)?;
        energy_rows.push(vec![cap, energy.m_level, energy.lhs, energy.source_term, energy.ratio]);
        members.push(json!({
            "k": k,
            "sup": series.max(),
            "levels": lv,
            "recursion_ratio": ratio,
            "envelope": envelope,
            "energy": energy,
        }));
    }
    out.table("degiorgi_levels.csv", &["k", "j", "level", "y", "e"], &level_rows)?;
    out.table("energy.csv", &["k", "m_level", "lhs", "source_term", "ratio"], &energy_rows)?;
    Ok(Outcome {
        results: json!({ "constants": dg, "members": members }),
        violations,
    })
}

/// Spatial `L²` norm of each frame.
fn frame_norms(series: &TimeSeries) -> Vec<f64> {
    let w = series.grid().weights();
    series
        .frames()
        .iter()
        .map(|f| f.values().iter().zip(w).map(|(v, w)| v * v * w).sum::<f64>().sqrt())
        .collect()
}

fn mollifier(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome> {
    let s = setup(cfg)?;
    let solver = cfg.solver(s.spec.horizon, Mode::Direct);
    let (series, _) = solve_problem(&s.spec, s.grid.clone(), &solver)?;
    let dt = s.spec.horizon / solver.steps_for(s.spec.horizon) as f64;
    let h = cfg.options.mollifier_steps.max(1) as f64 * dt;
    let p_bar = s.spec.bar().p_bar;
    let variants = [
        ("steklov_forward", steklov(&series, h, false)?),
        ("steklov_backward", steklov(&series, h, true)?),
        ("exp_forward", exp_mollify(&series, h, false)?),
        ("exp_backward", exp_mollify(&series, h, true)?),
    ];
    let mut violations = Vec::new();
    let mut norms = Vec::new();
    for (name, m) in &variants {
        for p in [1.0, 2.0, p_bar] {
            let (a, b) = (series_lp_norm(m, p), series_lp_norm(&series, p));
            if a > b * (1.0 + 1e-12) {
                violations.push(format!("{name}: L^{p} norm {a:.6e} exceeds {b:.6e}"));
            }
            norms.push(json!({ "mollifier": name, "p": p, "mollified": a, "original": b }));
        }
    }
    let (u, ef, eb) = (frame_norms(&series), frame_norms(&variants[2].1), frame_norms(&variants[3].1));
    let rows: Vec<Vec<f64>> = series
        .times()
        .iter()
        .enumerate()
        .map(|(i, &t)| vec![t, u[i], ef[i], eb[i]])
        .collect();
    out.table("mollifier_norms.csv", &["time", "u_l2", "exp_forward_l2", "exp_backward_l2"], &rows)?;
    Ok(Outcome {
        results: json!({ "h": h, "p_bar": p_bar, "norms": norms }),
        violations,
    })
}

fn calibrate(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome> {
    let s = setup(cfg)?;
    let sandwich: Vec<Value> = cfg
        .options
        .m_values
        .iter()
        .map(|&m| json!({ "m": m, "calibration": calibrate_b_sandwich(m, 400) }))
        .collect();
    let power: Vec<Value> = cfg
        .options
        .gamma_values
        .iter()
        .map(|&g| json!({ "gamma": g, "calibration": calibrate_power_inequality(g, 400) }))
        .collect();
    let exps = Exponents::new(s.problem.p.clone(), s.problem.m.clone())?;
    let troisi = calibrate_troisi(s.grid.clone(), &exps, cfg.options.troisi_samples, cfg.seed)?;
    let fixture = json!({
        "schema": REPORT_SCHEMA,
        "b_sandwich": sandwich,
        "power_inequality": power,
        "troisi": { "p": exps.p(), "grid": s.grid.counts(), "calibration": troisi },
    });
    out.json("calibration.json", &fixture)?;
    Ok(Outcome {
        results: fixture,
        violations: Vec::new(),
    })
}

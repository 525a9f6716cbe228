use std::f64::consts::E;
use std::path::Path;

use henon_tm::bounds::{
    alpha_star_estimate, concentration_upper_bound, ALPHA_STAR_BRACKET,
};
use henon_tm::candidates::{
    a_alpha, b_alpha, candidate_value, carleson_chang_candidate, gauss_integral,
};
use henon_tm::optimizer::{
    concentrated_values, maximize_radial, Init, OptimizerConfig, OptimizerResult, ProbeCenter,
};
use henon_tm::profiles::io::{read_profile, ProfileFile};
use henon_tm::profiles::{
    dirichlet_norm_halfline, dirichlet_norm_radial, disk_value_via_halfline, functional_report,
    halfline_exponent, HalfLineProfile, RadialProfile, WeightExponent, CRITICAL_GAMMA,
};
use henon_tm::quadrature::QuadratureSpec;
use henon_tm::rearrange::{
    distribution_function, equimeasurability, mu_rearrange_general, mu_rearrange_radial,
    polya_szego_check, read_sample,
};
use henon_tm::transforms::{
    from_halfline, full_pipeline_identity_with_gamma, moser_inverse, moser_transform,
    ssw_functional_identity_with_gamma, ssw_inverse, ssw_transform, to_halfline,
};
use henon_tm::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::args::{CandidateReport, Common, Map, OptimizeArgs};
use crate::report::{num, Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
    NotConverged,
}

pub struct Outcome {
    pub report: Report,
    pub status: Status,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Self {
            report,
            status: Status::Ok,
        }
    }
}

/// Test function for the equimeasurability report.
type Phi = Box<dyn Fn(f64) -> f64>;

fn weight(alpha: f64) -> Result<WeightExponent> {
    WeightExponent::new(alpha)
}

fn gamma(common: &Common) -> Result<f64> {
    if common.gamma_factor.is_nan() || common.gamma_factor <= 0.0 || common.gamma_factor.is_infinite() {
        return Err(Error::Precondition(format!(
            "--gamma-factor must be positive, got {}",
            common.gamma_factor
        )));
    }
    Ok(common.gamma_factor * CRITICAL_GAMMA)
}

fn quadrature(tol: f64) -> Result<QuadratureSpec> {
    let q = QuadratureSpec::adaptive(tol);
    q.validate()?;
    Ok(q)
}

fn radial_table(u: &RadialProfile, x: &str, y: &str) -> Table {
    let mut t = Table::new(&[x, y]);
    for (a, b) in u.grid().iter().zip(u.values()) {
        t.push(vec![num(*a), num(*b)]);
    }
    t
}

fn halfline_table(w: &HalfLineProfile) -> Table {
    let mut t = Table::new(&["t", "w"]);
    for (a, b) in w.grid().iter().zip(w.values()) {
        t.push(vec![num(*a), num(*b)]);
    }
    t
}

pub fn evaluate(
    common: &Common,
    profile: Option<&Path>,
    moser: Option<&[u32]>,
    offset: f64,
    tol: f64,
) -> Result<Outcome> {
    let w = weight(common.alpha)?;
    let g = gamma(common)?;
    let q = quadrature(tol)?;
    let config = json!({ "common": common, "gamma": g, "tol": tol, "offset": offset,
                         "profile": profile.map(|p| p.display().to_string()) });
    if let Some(ns) = moser {
        if ns.is_empty() {
            return Err(Error::Precondition("--moser needs at least one index".into()));
        }
        let center = if offset == 0.0 {
            ProbeCenter::ORIGIN
        } else {
            ProbeCenter {
                offset,
                radius: 1.0 - offset,
            }
        };
        let values = concentrated_values(&w, g, ns, &center, &q)?;
        let bound = concentration_upper_bound(&w);
        let mut table = Table::new(&["n", "value", "overflow"]);
        for (n, v) in ns.iter().zip(&values) {
            table.push(vec![n.to_string(), num(*v), v.is_infinite().to_string()]);
        }
        let result = json!({
            "kind": "moser",
            "center": center,
            "n": ns,
            "values": values.iter().map(|v| if v.is_finite() { json!(v) } else { json!("inf") }).collect::<Vec<_>>(),
            "concentration_bound": bound,
        });
        return Ok(Outcome::ok(Report::new("evaluate", config, result, table)));
    }
    let path = profile.expect("clap enforces --profile or --moser");
    let (result, table) = match read_profile(path)? {
        ProfileFile::Radial(u) => {
            let r = functional_report(&u, &w, g, &q)?;
            let table = Table::record(&[
                ("kind", "radial".into()),
                ("alpha", num(w.alpha())),
                ("gamma", num(g)),
                ("functional", num(r.exp_integral)),
                ("dirichlet", num(r.dirichlet)),
                ("overflow", r.overflow.to_string()),
            ]);
            let result = json!({
                "kind": "radial",
                "functional": if r.overflow { json!("inf") } else { json!(r.exp_integral) },
                "dirichlet": r.dirichlet,
                "overflow": r.overflow,
            });
            (result, table)
        }
        ProfileFile::HalfLine(hw) => {
            let v = disk_value_via_halfline(&hw, &w, g, &q)?;
            let d = dirichlet_norm_halfline(&hw);
            let overflow = v.is_infinite();
            let table = Table::record(&[
                ("kind", "halfline".into()),
                ("alpha", num(w.alpha())),
                ("gamma", num(g)),
                ("functional", num(v)),
                ("dirichlet", num(d)),
                ("overflow", overflow.to_string()),
            ]);
            let result = json!({
                "kind": "halfline",
                "functional": if overflow { json!("inf") } else { json!(v) },
                "dirichlet": d,
                "overflow": overflow,
                "exponent": halfline_exponent(&w, g),
            });
            (result, table)
        }
    };
    Ok(Outcome::ok(Report::new("evaluate", config, result, table)))
}

pub fn rearrange(
    common: &Common,
    sample: Option<&Path>,
    profile: Option<&Path>,
    tol: f64,
) -> Result<Outcome> {
    let w = weight(common.alpha)?;
    let g = gamma(common)?;
    let q = quadrature(tol)?;
    let config = json!({
        "common": common, "gamma": g, "tol": tol,
        "sample": sample.map(|p| p.display().to_string()),
        "profile": profile.map(|p| p.display().to_string()),
    });
    if let Some(path) = profile {
        let ProfileFile::Radial(u) = read_profile(path)? else {
            return Err(Error::Precondition("rearrange --profile needs a radial `r,u` profile".into()));
        };
        let star = mu_rearrange_radial(&u, &w)?;
        let result = json!({
            "kind": "radial",
            "star_radius": w.star_radius(),
            "dirichlet": dirichlet_norm_radial(&u),
            "dirichlet_rearranged": dirichlet_norm_radial(&star),
            "rearranged": star,
        });
        let table = radial_table(&star, "r", "u_star");
        return Ok(Outcome::ok(Report::new("rearrange", config, result, table)));
    }
    let s = read_sample(sample.expect("clap enforces --sample or --profile"))?;
    let dist = distribution_function(&s, &w);
    let star = mu_rearrange_general(&s, &w);
    let ps = polya_szego_check(&s, &w);
    let phis: [(&str, Phi); 3] = [
        ("t", Box::new(|t| t)),
        ("t^2", Box::new(|t| t * t)),
        ("exp(gamma t^2)-1", Box::new(move |t| (g * t * t).exp_m1())),
    ];
    let equi: Vec<_> = phis
        .iter()
        .map(|(name, f)| json!({ "phi": name, "report": equimeasurability(&s, &w, f, &q) }))
        .collect();
    let result = json!({
        "kind": "sample",
        "nr": s.nr(),
        "ntheta": s.ntheta(),
        "levels": dist.thresholds.len(),
        "total_mass": dist.total_mass,
        "measure": dist.measure,
        "star_radius": w.star_radius(),
        "polya_szego": ps,
        "equimeasurability": equi,
        "rearranged": star,
    });
    let table = radial_table(&star, "r", "u_star");
    Ok(Outcome::ok(Report::new("rearrange", config, result, table)))
}

pub fn transform(common: &Common, profile: &Path, map: Map, tol: f64) -> Result<Outcome> {
    let w = weight(common.alpha)?;
    let g = gamma(common)?;
    let q = quadrature(tol)?;
    let config = json!({ "common": common, "gamma": g, "tol": tol, "map": map,
                         "profile": profile.display().to_string() });
    let input = read_profile(profile)?;
    let need_radial = |p: ProfileFile| match p {
        ProfileFile::Radial(u) => Ok(u),
        ProfileFile::HalfLine(_) => Err(Error::Precondition(format!(
            "map {map:?} needs a radial `r,u` profile"
        ))),
    };
    let need_halfline = |p: ProfileFile| match p {
        ProfileFile::HalfLine(hw) => Ok(hw),
        ProfileFile::Radial(_) => Err(Error::Precondition(format!(
            "map {map:?} needs a half-line `t,w` profile"
        ))),
    };
    let (result, table) = match map {
        Map::Ssw => {
            let u = need_radial(input)?;
            let v = ssw_transform(&u, &w)?;
            let id = ssw_functional_identity_with_gamma(&u, &w, g, &q)?;
            let energy = json!({ "input": dirichlet_norm_radial(&u), "output": dirichlet_norm_radial(&v) });
            let t = radial_table(&v, "r", "v");
            (json!({ "output": v, "functional_identity": id, "dirichlet": energy }), t)
        }
        Map::SswInverse => {
            let v = need_radial(input)?;
            let u = ssw_inverse(&v, &w)?;
            let id = ssw_functional_identity_with_gamma(&u, &w, g, &q)?;
            let energy = json!({ "input": dirichlet_norm_radial(&v), "output": dirichlet_norm_radial(&u) });
            let t = radial_table(&u, "r", "u");
            (json!({ "output": u, "functional_identity": id, "dirichlet": energy }), t)
        }
        Map::Moser => {
            let v = need_radial(input)?;
            let hw = moser_transform(&v)?;
            let energy = json!({ "input": dirichlet_norm_radial(&v), "output": dirichlet_norm_halfline(&hw) });
            let t = halfline_table(&hw);
            (json!({ "output": hw, "dirichlet": energy }), t)
        }
        Map::MoserInverse => {
            let hw = need_halfline(input)?;
            let v = moser_inverse(&hw)?;
            let energy = json!({ "input": dirichlet_norm_halfline(&hw), "output": dirichlet_norm_radial(&v) });
            let t = radial_table(&v, "r", "v");
            (json!({ "output": v, "dirichlet": energy }), t)
        }
        Map::ToHalfline => {
            let u = need_radial(input)?;
            let hw = to_halfline(&u, &w)?;
            let id = full_pipeline_identity_with_gamma(&u, &w, g, &q)?;
            let energy = json!({ "input": dirichlet_norm_radial(&u), "output": dirichlet_norm_halfline(&hw) });
            let t = halfline_table(&hw);
            (json!({ "output": hw, "functional_identity": id, "dirichlet": energy }), t)
        }
        Map::FromHalfline => {
            let hw = need_halfline(input)?;
            let u = from_halfline(&hw, &w)?;
            let id = full_pipeline_identity_with_gamma(&u, &w, g, &q)?;
            let energy = json!({ "input": dirichlet_norm_halfline(&hw), "output": dirichlet_norm_radial(&u) });
            let t = radial_table(&u, "r", "u");
            (json!({ "output": u, "functional_identity": id, "dirichlet": energy }), t)
        }
    };
    Ok(Outcome::ok(Report::new("transform", config, result, table)))
}

pub fn candidate(common: &Common, report: CandidateReport, tol: f64) -> Result<Outcome> {
    let w = weight(common.alpha)?;
    let q = quadrature(tol)?;
    let config = json!({ "common": common, "tol": tol, "report": report });
    match report {
        CandidateReport::Pieces => {
            let v = candidate_value(&w, &q)?;
            let bound = concentration_upper_bound(&w);
            let result = json!({
                "total": v.value,
                "pieces": v.pieces,
                "a_alpha": v.a_alpha,
                "b_alpha": b_alpha(&w),
                "functional": v.functional,
                "concentration_bound": bound,
                "margin": v.functional - bound,
                "beats_bound": v.functional > bound,
            });
            let table = Table::record(&[
                ("alpha", num(w.alpha())),
                ("total", num(v.value)),
                ("head", num(v.pieces.head)),
                ("middle", num(v.pieces.middle)),
                ("tail", num(v.pieces.tail)),
                ("a_alpha", num(v.a_alpha)),
                ("b_alpha", num(b_alpha(&w))),
                ("functional", num(v.functional)),
                ("concentration_bound", num(bound)),
            ]);
            Ok(Outcome::ok(Report::new("candidate", config, result, table)))
        }
        CandidateReport::Profile => {
            let c = carleson_chang_candidate();
            let result = json!({
                "dirichlet": dirichlet_norm_halfline(&c),
                "nodes": c.grid().len(),
                "profile": c,
            });
            Ok(Outcome::ok(Report::new("candidate", config, result, halfline_table(&c))))
        }
    }
}

fn parse_init(spec: &str) -> Result<Init> {
    if spec == "candidate" {
        return Ok(Init::Candidate);
    }
    if let Some(n) = spec.strip_prefix("moser:") {
        let n = n
            .parse::<u32>()
            .map_err(|e| Error::Precondition(format!("--init moser:N: {e}")))?;
        return Ok(Init::Moser(n));
    }
    match read_profile(spec)? {
        ProfileFile::HalfLine(w) => Ok(Init::Custom(w)),
        ProfileFile::Radial(_) => Err(Error::Precondition(
            "--init file must be a half-line `t,w` profile".into(),
        )),
    }
}

fn optimizer_config(opt: &OptimizeArgs) -> Result<OptimizerConfig> {
    let cfg = OptimizerConfig {
        grid_nodes: opt.grid,
        t_max: opt.tmax,
        value_tol: opt.tol,
        max_iters: opt.max_iters,
        init: parse_init(&opt.init)?,
        ..OptimizerConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Config record without the inline initial profile.
fn config_summary(cfg: &OptimizerConfig, t_max: f64) -> serde_json::Value {
    let init = match &cfg.init {
        Init::Candidate => json!("candidate"),
        Init::Moser(n) => json!(format!("moser:{n}")),
        Init::Custom(p) => json!({ "custom_nodes": p.grid().len() }),
    };
    json!({
        "grid_nodes": cfg.grid_nodes,
        "t_max": t_max,
        "step_init": cfg.step_init,
        "backtrack_factor": cfg.backtrack_factor,
        "value_tol": cfg.value_tol,
        "max_iters": cfg.max_iters,
        "concentration_rho": cfg.concentration_rho,
        "init": init,
    })
}

fn optimizer_record(r: &OptimizerResult) -> Vec<(&'static str, String)> {
    vec![
        ("alpha", num(r.alpha)),
        ("gamma", num(r.gamma)),
        ("value", num(r.value)),
        ("initial_value", num(r.initial_value)),
        ("converged", r.converged.to_string()),
        ("iterations", r.iterations.to_string()),
        ("concentration", num(r.concentration)),
        ("t_max", num(r.t_max)),
        ("grid_nodes", r.grid_nodes.to_string()),
    ]
}

pub fn optimize(common: &Common, opt: &OptimizeArgs) -> Result<Outcome> {
    let w = weight(common.alpha)?;
    let g = gamma(common)?;
    let cfg = optimizer_config(opt)?;
    let r = maximize_radial(&w, g, &cfg)?;
    let config = json!({
        "common": common,
        "gamma": g,
        "optimizer": config_summary(&cfg, r.t_max),
    });
    let status = if r.converged { Status::Ok } else { Status::NotConverged };
    let table = Table::record(&optimizer_record(&r));
    Ok(Outcome {
        report: Report::new("optimize", config, &r, table),
        status,
    })
}

#[derive(Debug, Serialize)]
struct SweepRow {
    alpha: f64,
    optimizer_value: Option<f64>,
    optimizer_converged: Option<bool>,
    candidate_value: Option<f64>,
    bound: Option<f64>,
    /// `|S^rad(α,γ) - ε S(0, εγ)| / S^rad(α,γ)`.
    identity_gap: Option<f64>,
    concentration: Option<f64>,
    t_max: Option<f64>,
    error: Option<String>,
}

fn sweep_row(alpha: f64, g: f64, cfg: &OptimizerConfig, q: &QuadratureSpec) -> SweepRow {
    let mut row = SweepRow {
        alpha,
        optimizer_value: None,
        optimizer_converged: None,
        candidate_value: None,
        bound: None,
        identity_gap: None,
        concentration: None,
        t_max: None,
        error: None,
    };
    let run = |row: &mut SweepRow| -> Result<()> {
        let w = weight(alpha)?;
        row.bound = Some(concentration_upper_bound(&w));
        row.candidate_value = Some(candidate_value(&w, q)?.functional);
        let lhs = maximize_radial(&w, g, cfg)?;
        row.optimizer_value = Some(lhs.value);
        row.optimizer_converged = Some(lhs.converged);
        row.concentration = Some(lhs.concentration);
        row.t_max = Some(lhs.t_max);
        let eps = w.epsilon();
        let rhs = maximize_radial(&WeightExponent::unweighted(), eps * g, cfg)?;
        row.identity_gap = Some((lhs.value - eps * rhs.value).abs() / lhs.value.abs());
        Ok(())
    };
    if let Err(e) = run(&mut row) {
        row.error = Some(e.to_string());
    }
    row
}

pub fn sweep(common: &Common, alphas: &[f64], opt: &OptimizeArgs) -> Result<Outcome> {
    if alphas.is_empty() {
        return Err(Error::Precondition("sweep needs a non-empty --alphas list".into()));
    }
    let g = gamma(common)?;
    let cfg = optimizer_config(opt)?;
    let q = QuadratureSpec::default();
    let rows: Vec<SweepRow> = alphas.par_iter().map(|&a| sweep_row(a, g, &cfg, &q)).collect();
    let opt_num = |v: Option<f64>| v.map(num).unwrap_or_default();
    let mut table = Table::new(&[
        "alpha",
        "optimizer_value",
        "optimizer_converged",
        "candidate_value",
        "bound",
        "identity_gap",
        "concentration",
        "t_max",
        "error",
    ]);
    for r in &rows {
        table.push(vec![
            num(r.alpha),
            opt_num(r.optimizer_value),
            r.optimizer_converged.map(|b| b.to_string()).unwrap_or_default(),
            opt_num(r.candidate_value),
            opt_num(r.bound),
            opt_num(r.identity_gap),
            opt_num(r.concentration),
            opt_num(r.t_max),
            r.error.clone().unwrap_or_default(),
        ]);
    }
    let status = if rows.iter().any(|r| r.optimizer_converged == Some(false)) {
        Status::NotConverged
    } else {
        Status::Ok
    };
    let config = json!({
        "common": common,
        "gamma": g,
        "alphas": alphas,
        "optimizer": config_summary(&cfg, f64::NAN).as_object().map(|o| {
            let mut o = o.clone();
            o.insert("t_max".into(), json!(opt.tmax));
            o
        }),
    });
    Ok(Outcome {
        report: Report::new("sweep", config, json!({ "rows": rows }), table),
        status,
    })
}

pub fn threshold(tol: f64) -> Result<Outcome> {
    let q = QuadratureSpec::default();
    let est = alpha_star_estimate(tol, &q)?;
    let result = json!({
        "alpha_star_estimate": est.alpha_star,
        "margin_at_zero": est.margin_at_zero,
        "tol": est.tol,
        "no_sign_change": est.no_sign_change,
        "iterations": est.iterations,
        "bracket": [ALPHA_STAR_BRACKET.0, ALPHA_STAR_BRACKET.1],
    });
    let table = Table::record(&[
        ("alpha_star_estimate", num(est.alpha_star)),
        ("margin_at_zero", num(est.margin_at_zero)),
        ("tol", num(tol)),
        ("no_sign_change", est.no_sign_change.to_string()),
    ]);
    let config = json!({ "tol": tol, "quadrature": q });
    Ok(Outcome::ok(Report::new("threshold", config, result, table)))
}

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    value: f64,
    target: String,
}

pub fn verify(full: bool) -> Result<Outcome> {
    let q = QuadratureSpec::default();
    let mut checks = Vec::new();
    let mut add = |name, pass, value, target: &str| {
        checks.push(Check {
            name,
            pass,
            value,
            target: target.to_string(),
        })
    };

    let norm = dirichlet_norm_halfline(&carleson_chang_candidate());
    add("candidate_norm", (norm - 1.0).abs() < 1e-6, norm, "1 within 1e-6");

    let gi = gauss_integral(&q)?;
    add("gaussian_integral", gi > 2.906, gi, "> 2.906");

    let a = a_alpha(&weight(1e-4)?);
    add("a_alpha_limit", (a - E).abs() < 0.02, a, "|A - e| < 0.02 at α = 1e-4");

    let b = b_alpha(&weight(1e-3)?) / 1e-3;
    add("b_alpha_limit", (0.45..=0.55).contains(&b), b, "B/α in [0.45, 0.55] at α = 1e-3");

    for alpha in [0.0, 0.01] {
        let w = weight(alpha)?;
        let m = candidate_value(&w, &q)?.functional - concentration_upper_bound(&w);
        add("candidate_beats_bound", m > 0.0, m, "functional - 2πe/(α+2) > 0");
    }

    let tent = RadialProfile::from_fn(1.0, 64, |r| 0.8 * (1.0 - r) * (1.0 + 0.3 * r))?;
    for alpha in [0.0, 0.5, 2.0] {
        let id = full_pipeline_identity_with_gamma(&tent, &weight(alpha)?, CRITICAL_GAMMA, &q)?;
        add("pipeline_identity", id.holds(1e-6), id.rel_gap, "relative gap < 1e-6");
    }

    let w1 = weight(1.0)?;
    let probe = concentrated_values(
        &w1,
        1.1 * CRITICAL_GAMMA,
        &[1, 40],
        &ProbeCenter::default(),
        &QuadratureSpec::adaptive(1e-10),
    )?;
    let growth = probe[1] / probe[0];
    add("supercritical_growth", growth > 10.0, growth, "value(40)/value(1) > 10");

    if full {
        for alpha in [1.0, 4.0] {
            let rep = henon_tm::bounds::radial_identity_check(&weight(alpha)?, &OptimizerConfig::default())?;
            add("radial_identity", rep.rel_gap < 0.01, rep.rel_gap, "relative gap < 1%");
        }
        let r = maximize_radial(&WeightExponent::unweighted(), CRITICAL_GAMMA, &OptimizerConfig::default())?;
        add("optimizer_lower_bound", r.value >= 8.77, r.value, "≥ 8.77 at α = 0");
    }

    let all = checks.iter().all(|c| c.pass);
    let mut table = Table::new(&["name", "pass", "value", "target"]);
    for c in &checks {
        table.push(vec![c.name.into(), c.pass.to_string(), num(c.value), c.target.clone()]);
    }
    let config = json!({ "full": full, "quadrature": q });
    Ok(Outcome {
        report: Report::new("verify", config, json!({ "all_pass": all, "checks": checks }), table),
        status: if all { Status::Ok } else { Status::Failed },
    })
}

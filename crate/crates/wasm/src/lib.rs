//! Browser bindings for the interactive demo page.
//!
//! Three operations, each returning a JSON string the page renders on a
//! canvas: an entropic-time sweep over k (the phase transition), an exact
//! TV mixing curve (the cutoff profile), and a BFS distance histogram (the
//! typical-distance shell). Errors come back as `{"error": "..."}` rather
//! than thrown exceptions.

use heisenlab::entropic::{EntropicReport, ReportOptions};
use heisenlab::geometry::{bfs_distances, default_radius_slack, m_k, m_star, typical_distance};
use heisenlab::group::GroupParams;
use heisenlab::walk::{tv_curve, GeneratorSet, TimeModel};
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

/// Keep browser memory and latency reasonable: exact evolution and BFS are
/// limited to this many group elements in the demo.
const DEMO_CAP: usize = 1 << 21;

fn json_or_error<T: Serialize>(result: Result<T, heisenlab::Error>) -> String {
    match result {
        Ok(value) => serde_json::to_string(&value)
            .unwrap_or_else(|e| format!("{{\"error\":\"serialize: {e}\"}}")),
        Err(e) => serde_json::to_string(&serde_json::json!({ "error": e.to_string() }))
            .expect("error payload serializes"),
    }
}

#[derive(Serialize)]
struct SweepRow {
    k: f64,
    s0: f64,
    t0: f64,
    t_diam: f64,
    t_star: f64,
    branch: &'static str,
    regime: &'static str,
}

#[derive(Serialize)]
struct Sweep {
    p: u32,
    d: u32,
    threshold_k: f64,
    log_abelian: f64,
    log_order: f64,
    rows: Vec<SweepRow>,
}

/// Entropic, diameter and cutoff times on a log-spaced k grid.
#[wasm_bindgen]
pub fn entropic_sweep(p: u32, d: u32, k_min: f64, k_max: f64, points: u32) -> String {
    json_or_error((|| {
        if !(k_min >= 2.0 && k_max > k_min && (2..=512).contains(&points)) {
            return Err(heisenlab::Error::InvalidArgument(
                "need 2 <= k_min < k_max and 2..=512 points".into(),
            ));
        }
        let options = ReportOptions::default();
        let mut rows = Vec::new();
        let mut threshold_k = 0.0;
        let (mut log_abelian, mut log_order) = (0.0, 0.0);
        for i in 0..points {
            let frac = i as f64 / (points - 1) as f64;
            let k = (k_min.ln() + frac * (k_max.ln() - k_min.ln())).exp();
            let report = EntropicReport::compute(k, p as u64, d, &options)?;
            threshold_k = report.threshold_k;
            log_abelian = report.params.log_abelian;
            log_order = report.params.log_order;
            rows.push(SweepRow {
                k,
                s0: report.s0,
                t0: report.t0,
                t_diam: report.t_diam,
                t_star: report.t_star,
                branch: match report.branch {
                    heisenlab::entropic::Branch::Entropic => "entropic",
                    heisenlab::entropic::Branch::Diameter => "diameter",
                },
                regime: match report.params.regime {
                    heisenlab::entropic::Regime::Sub => "sub",
                    heisenlab::entropic::Regime::Crit => "crit",
                    heisenlab::entropic::Regime::Super => "super",
                },
            });
        }
        Ok(Sweep {
            p,
            d,
            threshold_k,
            log_abelian,
            log_order,
            rows,
        })
    })())
}

#[derive(Serialize)]
struct Curve {
    p: u32,
    d: u32,
    k: u32,
    seed: u32,
    order: u64,
    time_model: &'static str,
    t0: f64,
    t_diam: f64,
    t_star: f64,
    points: Vec<heisenlab::walk::CurvePoint>,
}

/// Exact TV mixing curve of one sampled generator set.
#[wasm_bindgen]
pub fn mixing_curve(
    p: u32,
    d: u32,
    k: u32,
    seed: u32,
    t_max: f64,
    points: u32,
    poissonized: bool,
) -> String {
    json_or_error((|| {
        if !(1..=64).contains(&k) || !(2..=512).contains(&points) || t_max <= 0.0 {
            return Err(heisenlab::Error::InvalidArgument(
                "need 1 <= k <= 64, 2..=512 points, t_max > 0".into(),
            ));
        }
        let params = GroupParams::new(p as u64, d as usize)?;
        let z = GeneratorSet::sample(params.clone(), k as usize, seed as u64);
        let times: Vec<f64> = (0..points)
            .map(|i| t_max * i as f64 / (points - 1) as f64)
            .collect();
        let model = if poissonized {
            TimeModel::Poissonized
        } else {
            TimeModel::Discrete
        };
        let curve = tv_curve(&z, &times, model, DEMO_CAP)?;
        let report =
            EntropicReport::compute((k as f64).max(2.0), p as u64, d, &ReportOptions::default())?;
        Ok(Curve {
            p,
            d,
            k,
            seed,
            order: params.order_usize().unwrap_or(0) as u64,
            time_model: if poissonized {
                "poissonized"
            } else {
                "discrete"
            },
            t0: report.t0,
            t_diam: report.t_diam,
            t_star: report.t_star,
            points: curve,
        })
    })())
}

#[derive(Serialize)]
struct Profile {
    p: u32,
    d: u32,
    k: u32,
    seed: u32,
    order: u64,
    unreachable: u64,
    counts: Vec<u64>,
    d25: Option<u64>,
    d50: Option<u64>,
    d75: Option<u64>,
    m_star: f64,
    m_k: u64,
    omega: f64,
}

/// BFS distance histogram with typical-distance quantiles and the two radii.
#[wasm_bindgen]
pub fn distance_profile(p: u32, d: u32, k: u32, seed: u32) -> String {
    json_or_error((|| {
        if !(1..=64).contains(&k) {
            return Err(heisenlab::Error::InvalidArgument(
                "need 1 <= k <= 64".into(),
            ));
        }
        let params = GroupParams::new(p as u64, d as usize)?;
        let z = GeneratorSet::sample(params, k as usize, seed as u64);
        let hist = bfs_distances(&z, DEMO_CAP)?;
        let omega = default_radius_slack(k as u64, p as u64, d);
        let quantile = |beta: f64| typical_distance(&hist, beta).ok();
        Ok(Profile {
            p,
            d,
            k,
            seed,
            order: hist.order,
            unreachable: hist.unreachable,
            counts: hist.counts.clone(),
            d25: quantile(0.25),
            d50: quantile(0.5),
            d75: quantile(0.75),
            m_star: m_star(k as u64, p as u64, d),
            m_k: m_k(k as u64, p as u64, d, omega)?,
            omega,
        })
    })())
}

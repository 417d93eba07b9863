//! The six subcommands.

use std::time::Instant;

use heisenlab::entropic::{EntropicReport, ReportOptions};
use heisenlab::geometry::{
    ball_size, bfs_distances, counting_bound_sweep, default_radius_slack, m_k, m_star,
    sample_uniform_ball, typical_distance,
};
use heisenlab::group::{word_stats, GroupParams, Word};
use heisenlab::rng::stream;
use heisenlab::walk::{tv_curve, CurvePoint, GeneratorSet, TimeModel};
use heisenlab::Error;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    BallConfig, CommonConfig, EntropicConfig, TvCurveConfig, TypdistConfig, VerifyConfig,
    WordStatsConfig,
};
use crate::output::{fmt_f64, write_run, CsvTable};
use crate::CliError;

#[derive(Serialize)]
struct Resolved<'a, C: Serialize> {
    common: &'a CommonConfig,
    #[serde(flatten)]
    command: &'a C,
}

fn finish<C: Serialize>(
    common: &CommonConfig,
    command: &str,
    cfg: &C,
    started: Instant,
    tables: &[CsvTable],
) -> Result<(), CliError> {
    let paths = write_run(
        &common.out,
        command,
        &Resolved {
            common,
            command: cfg,
        },
        common.seed,
        started.elapsed().as_millis(),
        tables,
    )?;
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}

pub fn run_entropic(common: &CommonConfig, cfg: &EntropicConfig) -> Result<(), CliError> {
    let started = Instant::now();
    let mut table = CsvTable::new(
        "entropic",
        "entropic/v1",
        &[
            "k",
            "alpha",
            "kappa",
            "rho",
            "nu",
            "regime",
            "s0",
            "t0",
            "t_diam",
            "t_star",
            "branch",
            "threshold_k",
            "h0",
            "omega",
            "h",
            "v",
            "t_alpha",
            "asym_sub",
            "asym_crit",
            "asym_super",
            "asym_diam",
            "asym_selected",
        ],
    );
    for &k in &cfg.k {
        for &alpha in &cfg.alpha {
            let options = ReportOptions {
                alpha,
                omega_floor: cfg.omega_floor,
                omega: None,
            };
            let report = EntropicReport::compute(k, cfg.p, cfg.d, &options)?;
            table.push(vec![
                fmt_f64(k),
                fmt_f64(alpha),
                fmt_f64(report.params.kappa),
                fmt_f64(report.params.rho),
                fmt_f64(report.params.nu),
                format!("{:?}", report.params.regime).to_lowercase(),
                fmt_f64(report.s0),
                fmt_f64(report.t0),
                fmt_f64(report.t_diam),
                fmt_f64(report.t_star),
                format!("{:?}", report.branch).to_lowercase(),
                fmt_f64(report.threshold_k),
                fmt_f64(report.h0),
                fmt_f64(report.omega),
                fmt_f64(report.h),
                fmt_f64(report.v),
                fmt_f64(report.t_alpha),
                fmt_f64(report.asymptotics.sub_entropic),
                fmt_f64(report.asymptotics.crit_entropic),
                fmt_f64(report.asymptotics.super_entropic),
                fmt_f64(report.asymptotics.diameter_bound),
                report.asymptotics.selected.to_string(),
            ]);
        }
    }
    finish(common, "entropic", cfg, started, &[table])
}

fn curve_rows(replica: u64, seed: u64, points: &[CurvePoint]) -> Vec<Vec<String>> {
    points
        .iter()
        .map(|p| {
            vec![
                replica.to_string(),
                seed.to_string(),
                fmt_f64(p.t),
                fmt_f64(p.tv_full),
                fmt_f64(p.tv_abelian),
                fmt_f64(p.l2),
                p.support.to_string(),
            ]
        })
        .collect()
}

pub fn run_tv_curve(common: &CommonConfig, cfg: &TvCurveConfig) -> Result<(), CliError> {
    let started = Instant::now();
    let params = GroupParams::new(cfg.p, cfg.d as usize)?;
    let model = match cfg.time_model.as_str() {
        "discrete" => TimeModel::Discrete,
        "poissonized" => TimeModel::Poissonized,
        other => {
            return Err(CliError::Config(format!(
                "time-model must be discrete or poissonized, got {other:?}"
            )))
        }
    };
    if cfg.t_points < 1 {
        return Err(CliError::Config("t-points must be >= 1".into()));
    }
    let times: Vec<f64> = (0..cfg.t_points)
        .map(|i| cfg.t_max * i as f64 / (cfg.t_points.max(2) - 1) as f64)
        .collect();

    match cfg.mode.as_str() {
        "exact" => {
            if params.order_usize().is_none_or(|n| n > common.cap) {
                return Err(CliError::Cap(format!(
                    "group order {} exceeds the dense cap {}; rerun with --mode trajectories for the Monte-Carlo trajectory mode (no exact TV)",
                    params.order(),
                    common.cap
                )));
            }
            let results: Vec<_> = (0..cfg.replicas)
                .into_par_iter()
                .map(|replica| {
                    let seed = common.seed + replica;
                    let z = GeneratorSet::sample(params.clone(), cfg.k, seed);
                    tv_curve(&z, &times, model, common.cap).map(|pts| (replica, seed, pts))
                })
                .collect::<Result<Vec<_>, Error>>()?;

            let mut table = CsvTable::new(
                "tv-curve",
                "tv-curve/v1",
                &[
                    "replica",
                    "seed",
                    "t",
                    "tv_full",
                    "tv_abelian",
                    "l2",
                    "support",
                ],
            );
            for (replica, seed, points) in &results {
                for row in curve_rows(*replica, *seed, points) {
                    table.push(row);
                }
            }
            let mut tables = vec![table];
            if cfg.average {
                let mut avg = CsvTable::new(
                    "tv-curve-avg",
                    "tv-curve-avg/v1",
                    &["t", "tv_full", "tv_abelian", "l2", "replicas"],
                );
                for (i, &t) in times.iter().enumerate() {
                    let m = results.len() as f64;
                    let tv = results.iter().map(|(_, _, p)| p[i].tv_full).sum::<f64>() / m;
                    let ab = results.iter().map(|(_, _, p)| p[i].tv_abelian).sum::<f64>() / m;
                    let l2 = results.iter().map(|(_, _, p)| p[i].l2).sum::<f64>() / m;
                    avg.push(vec![
                        fmt_f64(t),
                        fmt_f64(tv),
                        fmt_f64(ab),
                        fmt_f64(l2),
                        results.len().to_string(),
                    ]);
                }
                tables.push(avg);
            }
            finish(common, "tv-curve", cfg, started, &tables)
        }
        "trajectories" => {
            // beyond the dense cap: paired-trajectory collision estimate of
            // D(t) = n P(S = S') - 1; no exact TV, clearly labelled.
            let order = params
                .order()
                .to_string()
                .parse::<f64>()
                .unwrap_or(f64::INFINITY);
            let mut table = CsvTable::new(
                "tv-trajectories",
                "tv-trajectories/v1",
                &["replica", "seed", "t", "pairs", "collisions", "d_hat"],
            );
            for replica in 0..cfg.replicas {
                let seed = common.seed + replica;
                let z = GeneratorSet::sample(params.clone(), cfg.k, seed);
                for &t in &times {
                    let mut collisions = 0u64;
                    let mut rng = stream(seed, 1 + t.to_bits());
                    for _ in 0..cfg.pairs {
                        let s1 = random_endpoint(&z, t, model, &mut rng)?;
                        let s2 = random_endpoint(&z, t, model, &mut rng)?;
                        if s1 == s2 {
                            collisions += 1;
                        }
                    }
                    let d_hat = order * collisions as f64 / cfg.pairs as f64 - 1.0;
                    table.push(vec![
                        replica.to_string(),
                        seed.to_string(),
                        fmt_f64(t),
                        cfg.pairs.to_string(),
                        collisions.to_string(),
                        fmt_f64(d_hat),
                    ]);
                }
            }
            finish(common, "tv-curve", cfg, started, &[table])
        }
        other => Err(CliError::Config(format!(
            "mode must be exact or trajectories, got {other:?}"
        ))),
    }
}

fn random_endpoint(
    z: &GeneratorSet,
    t: f64,
    model: TimeModel,
    rng: &mut impl Rng,
) -> Result<heisenlab::GroupElement, CliError> {
    use rand_distr_steps::steps_for;
    let steps = steps_for(t, model, rng);
    let params = z.params();
    let mut acc = params.identity();
    for _ in 0..steps {
        let i = rng.random_range(0..z.k());
        acc = params.mul(&acc, &z.elements()[i])?;
    }
    Ok(acc)
}

mod rand_distr_steps {
    use heisenlab::walk::TimeModel;
    use rand::Rng;
    use rand_distr::{Distribution, Poisson};

    pub fn steps_for(t: f64, model: TimeModel, rng: &mut impl Rng) -> u64 {
        match model {
            TimeModel::Discrete => t.max(0.0) as u64,
            TimeModel::Poissonized => {
                if t <= 0.0 {
                    0
                } else {
                    Poisson::new(t).expect("t > 0").sample(rng) as u64
                }
            }
        }
    }
}

pub fn run_typdist(common: &CommonConfig, cfg: &TypdistConfig) -> Result<(), CliError> {
    let started = Instant::now();
    for &beta in &cfg.beta {
        if !(0.0 < beta && beta < 1.0) {
            return Err(CliError::Config(format!(
                "beta must be in (0,1), got {beta}"
            )));
        }
    }
    let mut header: Vec<String> = vec![
        "p".into(),
        "replica".into(),
        "seed".into(),
        "unreachable".into(),
        "max_distance".into(),
        "m_star".into(),
        "m_k".into(),
        "omega".into(),
        "counting_bound".into(),
    ];
    for &beta in &cfg.beta {
        header.push(format!("d({beta})"));
        header.push(format!("ratio({beta})"));
    }
    let mut table = CsvTable::new(
        "typdist",
        "typdist/v1",
        &header.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
    );
    let mut hist_table = CsvTable::new(
        "typdist-hist",
        "typdist-hist/v1",
        &["p", "replica", "distance", "count"],
    );

    for &p in &cfg.p_schedule {
        let params = GroupParams::new(p, cfg.d as usize)?;
        let rows: Vec<_> = (0..cfg.replicas)
            .into_par_iter()
            .map(|replica| -> Result<(Vec<String>, Vec<u64>), Error> {
                let seed = common.seed + replica;
                let z = GeneratorSet::sample(params.clone(), cfg.k, seed);
                let hist = bfs_distances(&z, common.cap)?;
                let omega = cfg
                    .omega
                    .unwrap_or_else(|| default_radius_slack(cfg.k as u64, p, cfg.d));
                let mstar = m_star(cfg.k as u64, p, cfg.d);
                let mk = m_k(cfg.k as u64, p, cfg.d, omega)?;
                let bound_ok = counting_bound_sweep(&z, common.cap)?
                    .iter()
                    .all(|row| row.coarse_holds);
                let mut row = vec![
                    p.to_string(),
                    replica.to_string(),
                    seed.to_string(),
                    hist.unreachable.to_string(),
                    hist.max_distance().to_string(),
                    fmt_f64(mstar),
                    mk.to_string(),
                    fmt_f64(omega),
                    bound_ok.to_string(),
                ];
                for &beta in &cfg.beta {
                    match typical_distance(&hist, beta) {
                        Ok(dist) => {
                            row.push(dist.to_string());
                            row.push(fmt_f64((dist as f64 - mstar).abs() / mstar));
                        }
                        Err(Error::NotEnoughMass { .. }) => {
                            // non-generating Z: flagged, not fatal
                            row.push("NA".into());
                            row.push("NA".into());
                        }
                        Err(e) => return Err(e),
                    }
                }
                Ok((row, hist.counts))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        for (replica, (row, counts)) in rows.into_iter().enumerate() {
            table.push(row);
            for (distance, count) in counts.iter().enumerate() {
                hist_table.push(vec![
                    p.to_string(),
                    replica.to_string(),
                    distance.to_string(),
                    count.to_string(),
                ]);
            }
        }
    }
    finish(common, "typdist", cfg, started, &[table, hist_table])
}

pub fn run_ball(common: &CommonConfig, cfg: &BallConfig) -> Result<(), CliError> {
    let started = Instant::now();
    if cfg.k == 0 {
        return Err(CliError::Config("ball needs k >= 1".into()));
    }
    let mut summary = CsvTable::new(
        "ball",
        "ball/v1",
        &["k", "radius", "volume", "p", "d", "omega", "m_star", "m_k"],
    );
    let (volume, radius_str) = match cfg.radius {
        Some(r) => (ball_size(cfg.k, r).to_string(), r.to_string()),
        None => (String::from("NA"), String::from("NA")),
    };
    let (p_str, d_str, omega_str, mstar_str, mk_str) = match (cfg.p, cfg.d) {
        (Some(p), Some(d)) => {
            let omega = cfg
                .omega
                .unwrap_or_else(|| default_radius_slack(cfg.k, p, d));
            (
                p.to_string(),
                d.to_string(),
                fmt_f64(omega),
                fmt_f64(m_star(cfg.k, p, d)),
                m_k(cfg.k, p, d, omega)?.to_string(),
            )
        }
        _ => (
            "NA".into(),
            "NA".into(),
            "NA".into(),
            "NA".into(),
            "NA".into(),
        ),
    };
    summary.push(vec![
        cfg.k.to_string(),
        radius_str,
        volume,
        p_str,
        d_str,
        omega_str,
        mstar_str,
        mk_str,
    ]);

    let mut tables = vec![summary];
    if cfg.samples > 0 {
        let r = cfg
            .radius
            .ok_or_else(|| CliError::Config("sampling needs an explicit radius".into()))?;
        let mut header = vec!["sample".to_string()];
        for i in 1..=cfg.k {
            header.push(format!("x{i}"));
        }
        let mut samples = CsvTable::new(
            "ball-samples",
            "ball-samples/v1",
            &header.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
        );
        let mut rng = stream(common.seed, 0);
        for s in 0..cfg.samples {
            let point = sample_uniform_ball(cfg.k, r, &mut rng);
            let mut row = vec![s.to_string()];
            row.extend(point.iter().map(|x| x.to_string()));
            samples.push(row);
        }
        tables.push(samples);
    }
    finish(common, "ball", cfg, started, &tables)
}

pub fn run_word_stats(common: &CommonConfig, cfg: &WordStatsConfig) -> Result<(), CliError> {
    let started = Instant::now();
    let word = Word::new(cfg.word.clone());
    let stats = word_stats(&word, cfg.k)?;
    let mut table = CsvTable::new("word-stats", "word-stats/v1", &["kind", "i", "j", "value"]);
    for i in 1..=cfg.k {
        table.push(vec![
            "count".into(),
            i.to_string(),
            String::new(),
            stats.letter_count(i).to_string(),
        ]);
    }
    for i in 1..=cfg.k {
        for j in 1..=cfg.k {
            table.push(vec![
                "pair".into(),
                i.to_string(),
                j.to_string(),
                stats.pair_count(i, j).to_string(),
            ]);
        }
    }
    finish(common, "word-stats", cfg, started, &[table])
}

pub fn run_verify(common: &CommonConfig, cfg: &VerifyConfig) -> Result<(), CliError> {
    let started = Instant::now();
    let mut table = CsvTable::new("verify", "verify/v1", &["group", "pass", "detail"]);
    let mut failures = 0u64;
    let mut push = |group: &str, pass: bool, detail: String| {
        println!(
            "[verify] {group}: {} — {detail}",
            if pass { "pass" } else { "FAIL" }
        );
        table.push(vec![group.into(), pass.to_string(), detail]);
        if !pass {
            failures += 1;
        }
    };

    verify_group_axioms(common, cfg, &mut push)?;
    verify_rank_bijection(&mut push)?;
    verify_product_formula(common, cfg, &mut push)?;
    verify_step2(common, cfg, &mut push)?;
    verify_entropy_solver(&mut push)?;
    verify_walk_diagnostics(common, &mut push)?;
    verify_geometry(common, &mut push)?;

    finish(common, "verify", cfg, started, &[table])?;
    if failures > 0 {
        return Err(CliError::Verification(format!(
            "{failures} invariant group(s) failed"
        )));
    }
    Ok(())
}

type Push<'a> = &'a mut dyn FnMut(&str, bool, String);

fn verify_group_axioms(
    common: &CommonConfig,
    cfg: &VerifyConfig,
    push: Push,
) -> Result<(), CliError> {
    let mut bad = None;
    let mut triples = 0u64;
    for (p, d) in [(2u64, 3usize), (5, 3), (3, 4)] {
        let params = GroupParams::new(p, d)?;
        let n = params.order_usize().unwrap();
        let mut rng = stream(common.seed, p + d as u64);
        for _ in 0..cfg.trials {
            let g = params.unrank_index(rng.random_range(0..n));
            let h = params.unrank_index(rng.random_range(0..n));
            let f = params.unrank_index(rng.random_range(0..n));
            let assoc =
                params.mul(&params.mul(&g, &h)?, &f)? == params.mul(&g, &params.mul(&h, &f)?)?;
            let inverse = params.mul(&g, &params.inv(&g)?)? == params.identity();
            if !(assoc && inverse) {
                bad = Some(format!("p={p} d={d} g={:?}", g.entries()));
                break;
            }
            triples += 1;
        }
    }
    match bad {
        None => push(
            "group-axioms",
            true,
            format!(
                "{triples} random triples over 3 parameter sets, seed {}",
                common.seed
            ),
        ),
        Some(detail) => push("group-axioms", false, format!("counterexample: {detail}")),
    }
    Ok(())
}

fn verify_rank_bijection(push: Push) -> Result<(), CliError> {
    for (p, d) in [(2u64, 3usize), (3, 3), (2, 4)] {
        let params = GroupParams::new(p, d)?;
        let n = params.order_usize().unwrap();
        let mut kernel = 0u64;
        for r in 0..n {
            let g = params.unrank_index(r);
            if params.rank_index(&g) != r {
                push(
                    "rank-bijection",
                    false,
                    format!("rank mismatch at {r}, p={p} d={d}"),
                );
                return Ok(());
            }
            if params.in_commutator(&g)? {
                kernel += 1;
            }
        }
        let expected: u64 = (d * (d - 1) / 2 - (d - 1)) as u64;
        let expected = p.pow(expected as u32);
        if kernel != expected {
            push(
                "rank-bijection",
                false,
                format!("kernel {kernel} != {expected} for p={p} d={d}"),
            );
            return Ok(());
        }
    }
    push(
        "rank-bijection",
        true,
        "exhaustive rank/unrank and commutator-kernel sizes on 3 groups".into(),
    );
    Ok(())
}

fn verify_product_formula(
    common: &CommonConfig,
    cfg: &VerifyConfig,
    push: Push,
) -> Result<(), CliError> {
    use heisenlab::group::f_poly;
    let params = GroupParams::new(7, 3)?;
    let k = 4u32;
    let mut rng = stream(common.seed, 73);
    let gens: Vec<_> = (0..k)
        .map(|_| {
            let entries = (0..3).map(|_| rng.random_range(0..7)).collect();
            params.element(entries).unwrap()
        })
        .collect();
    for _ in 0..cfg.trials {
        let len = rng.random_range(0..=50usize);
        let letters: Vec<u32> = (0..len).map(|_| rng.random_range(1..=k)).collect();
        let word = Word::new(letters.clone());
        let product = heisenlab::group::word_product(&params, &gens, &word)?;
        let a_seq: Vec<u64> = letters
            .iter()
            .map(|&l| gens[(l - 1) as usize].entries()[0])
            .collect();
        let b_seq: Vec<u64> = letters
            .iter()
            .map(|&l| gens[(l - 1) as usize].entries()[2])
            .collect();
        let c_sum = letters.iter().fold(0u64, |acc, &l| {
            (acc + gens[(l - 1) as usize].entries()[1]) % 7
        });
        let a_sum = a_seq.iter().fold(0u64, |a, &v| (a + v) % 7);
        let b_sum = b_seq.iter().fold(0u64, |a, &v| (a + v) % 7);
        let corner = (c_sum + f_poly(&a_seq, &b_seq, 7)?) % 7;
        if product.entries() != [a_sum, corner, b_sum] {
            push(
                "d3-product-formula",
                false,
                format!("counterexample word {letters:?}"),
            );
            return Ok(());
        }
    }
    push(
        "d3-product-formula",
        true,
        format!("{} random words at (p,d)=(7,3)", cfg.trials),
    );
    Ok(())
}

/// Step-2 decomposition with a switchable pair-count convention; the faulty
/// transposed convention is reachable through the `inject` config hook so the
/// mutation test can watch this group fail with a concrete word.
fn verify_step2(common: &CommonConfig, cfg: &VerifyConfig, push: Push) -> Result<(), CliError> {
    let transpose = match cfg.inject.as_str() {
        "" => false,
        "cij-transpose" => true,
        other => {
            return Err(CliError::Config(format!(
                "unknown inject value {other:?} (expected \"cij-transpose\")"
            )))
        }
    };
    for p in [5u64, 13] {
        let params = GroupParams::new(p, 3)?;
        let k = 3u32;
        let mut rng = stream(common.seed, 52 + p);
        let gens: Vec<_> = (0..k)
            .map(|_| {
                let entries = (0..3).map(|_| rng.random_range(0..p)).collect();
                params.element(entries).unwrap()
            })
            .collect();
        for _ in 0..cfg.trials {
            let len = rng.random_range(2..=30usize);
            let letters: Vec<u32> = (0..len).map(|_| rng.random_range(1..=k)).collect();
            let word = Word::new(letters.clone());
            let direct = heisenlab::group::word_product(&params, &gens, &word)?;
            let stats = word_stats(&word, k as usize)?;
            let mut sorted = params.identity();
            for (i, z) in gens.iter().enumerate() {
                sorted = params.mul(&sorted, &params.pow(z, stats.letter_count(i + 1) as i64)?)?;
            }
            for i in 1..=k as usize {
                for j in (i + 1)..=k as usize {
                    let count = if transpose {
                        stats.pair_count(i, j)
                    } else {
                        stats.pair_count(j, i)
                    };
                    if count == 0 {
                        continue;
                    }
                    let comm = params
                        .commutator(&params.inv(&gens[i - 1])?, &params.inv(&gens[j - 1])?)?;
                    sorted = params.mul(&sorted, &params.pow(&comm, -(count as i64))?)?;
                }
            }
            if direct != sorted {
                push(
                    "step2-decomposition",
                    false,
                    format!("counterexample word {letters:?} at p={p}"),
                );
                return Ok(());
            }
        }
    }
    push(
        "step2-decomposition",
        true,
        format!("{} random words per p in {{5, 13}}", cfg.trials),
    );
    Ok(())
}

fn verify_entropy_solver(push: Push) -> Result<(), CliError> {
    use heisenlab::entropic::{entropic_time, poisson_entropy};
    for (k, log_n) in [(2.0, 2.0), (10.0, 30.0), (400.0, 100.0)] {
        let t0 = entropic_time(k, log_n)?;
        let residual = (poisson_entropy(t0 / k)? * k - log_n).abs() / log_n;
        if residual > 1e-9 {
            push(
                "entropy-solver",
                false,
                format!("residual {residual:e} at k={k}, log N={log_n}"),
            );
            return Ok(());
        }
    }
    push(
        "entropy-solver",
        true,
        "solver residual <= 1e-9 on 3 targets".into(),
    );
    Ok(())
}

fn verify_walk_diagnostics(common: &CommonConfig, push: Push) -> Result<(), CliError> {
    let params = GroupParams::new(3, 3)?;
    for seed in common.seed..common.seed + 5 {
        let z = GeneratorSet::sample(params.clone(), 4, seed);
        let times: Vec<f64> = (0..=30).map(|m| m as f64).collect();
        let curve = tv_curve(&z, &times, TimeModel::Discrete, common.cap)?;
        for pair in curve.windows(2) {
            if pair[1].tv_full > pair[0].tv_full + 1e-12 {
                push(
                    "walk-diagnostics",
                    false,
                    format!("TV increased at t={} for seed {seed}", pair[1].t),
                );
                return Ok(());
            }
        }
        for point in &curve {
            if point.tv_abelian > point.tv_full + 1e-12
                || 2.0 * point.tv_full * point.tv_full > point.l2 + 1e-9
            {
                push(
                    "walk-diagnostics",
                    false,
                    format!("projection/collision bound violated at t={}", point.t),
                );
                return Ok(());
            }
        }
    }
    push(
        "walk-diagnostics",
        true,
        "TV contraction, projection contraction and 2tv^2 <= l2 on 5 curves".into(),
    );
    Ok(())
}

fn verify_geometry(common: &CommonConfig, push: Push) -> Result<(), CliError> {
    // exact ball volumes against enumeration, then the counting bound
    fn enumerate_ball(k: u64, budget: u64) -> u64 {
        if k == 0 {
            return 1;
        }
        (0..=budget)
            .map(|v| enumerate_ball(k - 1, budget - v))
            .sum()
    }
    for k in 1..=3u64 {
        for r in 0..=8u64 {
            if ball_size(k, r) != enumerate_ball(k, r).into() {
                push(
                    "ball-geometry",
                    false,
                    format!("volume mismatch at k={k} R={r}"),
                );
                return Ok(());
            }
        }
    }
    let params = GroupParams::new(3, 3)?;
    for seed in common.seed..common.seed + 3 {
        let z = GeneratorSet::sample(params.clone(), 3, seed);
        for row in counting_bound_sweep(&z, common.cap)? {
            if !row.holds() {
                push(
                    "ball-geometry",
                    false,
                    format!("counting bound fails at R={} for seed {seed}", row.radius),
                );
                return Ok(());
            }
        }
        if !heisenlab::walk::support_growth_check(&z, 4, common.cap)? {
            push(
                "ball-geometry",
                false,
                format!("support growth fails for seed {seed}"),
            );
            return Ok(());
        }
    }
    push(
        "ball-geometry",
        true,
        "volumes exact, counting bound and support growth hold on sampled graphs".into(),
    );
    Ok(())
}

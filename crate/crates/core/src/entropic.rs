//! Poisson entropy and entropic times.
//!
//! The auxiliary occupancy process behind the random walk has k iid
//! coordinates, each Poisson(t/k) at time t (total jump rate 1, rate 1/k per
//! coordinate). Everything here is a function of the per-coordinate mean
//! `s = t/k`:
//!
//! - `H(s)`, the Poisson entropy, via the series
//!   `H(s) = s log(1/s) + s + e^-s * sum_l s^l log(l!)/l!` (all logs natural);
//! - the entropic time `t0(k, N) = k * H^-1(log N / k)`;
//! - the diameter time `log_k n`;
//! - the statistic `Q(t) = -log mu_t(W(t))` whose mean is the entropy, its
//!   per-coordinate variance, window times and a concentration experiment.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::group::is_prime;
use crate::rng::stream;
use crate::{Error, Result};

pub const TWO_PI_E: f64 = 2.0 * std::f64::consts::PI * std::f64::consts::E;

/// `log(v!)`: exact factorials below 21 (they fit u64), Stirling series with
/// four correction terms above, accurate to ~1 ulp throughout.
pub fn ln_factorial(v: u64) -> f64 {
    if v < 21 {
        let mut f = 1u64;
        for i in 2..=v {
            f *= i;
        }
        return (f as f64).ln();
    }
    let x = v as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// Series truncation index: the Poisson tail past `s + 40 sqrt(s+1) + 50`
/// is below 1e-300.
fn series_cap(s: f64) -> u64 {
    (s + 40.0 * (s + 1.0).sqrt() + 50.0).ceil() as u64
}

/// Above this mean the series is replaced by the large-s expansions; at the
/// switch point the expansion errors (O(s^-4) for the entropy, O(s^-3) for
/// the variance) are below the float noise of the series itself, and the
/// series cost would keep growing linearly in s.
const LARGE_S: f64 = 5e3;

/// `H(s) = 1/2 log(2 pi e s) - 1/(12 s) - 1/(24 s^2) - 19/(360 s^3) + O(s^-4)`.
fn entropy_large_s(s: f64) -> f64 {
    0.5 * (TWO_PI_E * s).ln() - 1.0 / (12.0 * s) - 1.0 / (24.0 * s * s) - 19.0 / (360.0 * s * s * s)
}

/// `Var(-log pmf) = 1/2 - 1/(12 s) - 1/(8 s^2) + O(s^-3)`.
fn surprisal_variance_large_s(s: f64) -> f64 {
    0.5 - 1.0 / (12.0 * s) - 1.0 / (8.0 * s * s)
}

/// Kahan-compensated accumulator; the entropy series sums thousands of
/// terms of size ~log s, where naive accumulation costs ~1e-11 at s ~ 5e3.
#[derive(Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Natural log of the Poisson(s) pmf at v.
pub fn poisson_log_pmf(v: u64, s: f64) -> f64 {
    if s == 0.0 {
        return if v == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -s + v as f64 * s.ln() - ln_factorial(v)
}

/// Entropy of Poisson(s) in nats.
pub fn poisson_entropy(s: f64) -> Result<f64> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "entropy needs s >= 0, got {s}"
        )));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    if s > LARGE_S {
        return Ok(entropy_large_s(s));
    }
    // -sum pmf * log pmf; summing the surprisal directly (rather than the
    // split form s log(1/s) + s + sum pmf log v!) cancels the systematic
    // rounding bias of v * log s at large s.
    let mut acc = Kahan::default();
    for v in 0..=series_cap(s) {
        let lp = poisson_log_pmf(v, s);
        acc.add(lp.exp() * (-lp));
    }
    Ok(acc.sum)
}

/// Variance of `Q_1 = -log pmf(X)`, `X ~ Poisson(s)`, by the same truncated
/// series.
pub fn poisson_surprisal_variance(s: f64) -> Result<f64> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "variance needs s >= 0, got {s}"
        )));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    if s > LARGE_S {
        return Ok(surprisal_variance_large_s(s));
    }
    let mut mean = Kahan::default();
    let mut second = Kahan::default();
    for v in 0..=series_cap(s) {
        let lp = poisson_log_pmf(v, s);
        let w = lp.exp();
        mean.add(w * (-lp));
        second.add(w * lp * lp);
    }
    Ok((second.sum - mean.sum * mean.sum).max(0.0))
}

/// `H^-1(target)` by bisection; `H` is strictly increasing with `H(0) = 0`.
pub fn inverse_entropy(target: f64) -> Result<f64> {
    if !target.is_finite() || target < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "entropy target must be >= 0, got {target}"
        )));
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0f64;
    while poisson_entropy(hi)? < target {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Infeasible(format!(
                "entropy target {target} out of reach"
            )));
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 * mid {
            break;
        }
        if poisson_entropy(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Entropic time `t0`: the time at which the k-coordinate occupancy process
/// reaches entropy `log_cardinality`, i.e. `k * H^-1(log_cardinality / k)`.
pub fn entropic_time(k: f64, log_cardinality: f64) -> Result<f64> {
    if !k.is_finite() || k < 1.0 {
        return Err(Error::InvalidArgument(format!("need k >= 1, got {k}")));
    }
    if !log_cardinality.is_finite() || log_cardinality <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "need log cardinality > 0, got {log_cardinality}"
        )));
    }
    Ok(k * inverse_entropy(log_cardinality / k)?)
}

/// Diameter time `log_k n = log_order / log k`.
pub fn diameter_time(k: f64, log_order: f64) -> Result<f64> {
    if !k.is_finite() || k < 2.0 {
        return Err(Error::InvalidArgument(format!(
            "diameter time needs k >= 2, got {k}"
        )));
    }
    if !log_order.is_finite() || log_order <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "need log order > 0, got {log_order}"
        )));
    }
    Ok(log_order / k.ln())
}

/// `Q` statistic of an occupancy vector: `sum_i -log pmf_{Poisson(t/k)}(w_i)`.
pub fn q_statistic(w: &[u64], t: f64, k: usize) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidArgument(format!("need t >= 0, got {t}")));
    }
    if w.len() != k {
        return Err(Error::LengthMismatch(w.len(), k));
    }
    let s = t / k as f64;
    Ok(w.iter().map(|&v| -poisson_log_pmf(v, s)).sum())
}

/// `Var(Q_1(t))` for one coordinate of the k-coordinate process.
pub fn var_q1(t: f64, k: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidArgument(format!("need t >= 0, got {t}")));
    }
    poisson_surprisal_variance(t / k)
}

/// Window time `t_alpha`: solves
/// `E[Q_1(t_alpha)] = (log_target + alpha * sqrt(v k)) / k`
/// with `v = Var(Q_1(t0))` taken at the entropic time for the same target.
///
/// The window definition leaves the cardinality in the numerator ambiguous
/// between the Abelianisation and the full group; the target is therefore an
/// explicit argument (use `log N` to match `t0`).
pub fn window_time(k: f64, log_target: f64, alpha: f64) -> Result<f64> {
    let t0 = entropic_time(k, log_target)?;
    let v = var_q1(t0, k)?;
    let rhs = (log_target + alpha * (v * k).sqrt()) / k;
    if rhs < 0.0 {
        return Err(Error::Infeasible(format!(
            "window target (log_target + alpha*sqrt(vk))/k = {rhs} is negative"
        )));
    }
    Ok(k * inverse_entropy(rhs)?)
}

/// Asymptotic approximations to `t0(k, N)` in the three regimes.
pub fn t0_asymptotic_sub(k: f64, log_cardinality: f64) -> f64 {
    k * (2.0 * log_cardinality / k).exp() / TWO_PI_E
}

pub fn t0_asymptotic_super(k: f64, log_cardinality: f64) -> f64 {
    let kappa = k / log_cardinality;
    k / (kappa * kappa.ln())
}

/// Phase-transition generator count `k* = (log p^(d-1))^(1 + 2/(d-2))`.
pub fn phase_threshold(p: u64, d: u32) -> f64 {
    let log_abelian = (d as f64 - 1.0) * (p as f64).ln();
    log_abelian.powf(1.0 + 2.0 / (d as f64 - 2.0))
}

/// Regime of `k` against `log N`; the cuts on `kappa = k / log N` are the
/// crate's finite-size reading of "much smaller / comparable / much larger".
pub const KAPPA_SUB_MAX: f64 = 0.5;
pub const KAPPA_SUPER_MIN: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Sub,
    Crit,
    Super,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Entropic,
    Diameter,
}

/// Derived exponents of the parameter triple.
#[derive(Debug, Clone, Serialize)]
pub struct EntropicParams {
    pub k: f64,
    /// `log N = (d-1) log p`, the log-cardinality of the Abelianisation.
    pub log_abelian: f64,
    /// `log n = d(d-1)/2 * log p`, the log of the group order.
    pub log_order: f64,
    pub d: u32,
    /// `kappa = k / log N`.
    pub kappa: f64,
    /// `rho`: `k = (log n)^rho`.
    pub rho: f64,
    /// `nu`: `d/2 = (log n)^nu`.
    pub nu: f64,
    /// Crit-regime ratio limit, equal to `kappa` at finite size.
    pub lambda: f64,
    pub regime: Regime,
}

impl EntropicParams {
    pub fn new(k: f64, p: u64, d: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if d < 3 {
            return Err(Error::DimensionTooSmall(d as usize));
        }
        if !k.is_finite() || k < 2.0 {
            return Err(Error::InvalidArgument(format!("need k >= 2, got {k}")));
        }
        let log_p = (p as f64).ln();
        let log_abelian = (d as f64 - 1.0) * log_p;
        let log_order = (d as f64) * (d as f64 - 1.0) / 2.0 * log_p;
        let kappa = k / log_abelian;
        // k = (log n)^rho and d/2 = (log n)^nu
        let rho = k.ln() / log_order.ln();
        let nu = (d as f64 / 2.0).ln() / log_order.ln();
        let regime = if kappa < KAPPA_SUB_MAX {
            Regime::Sub
        } else if kappa > KAPPA_SUPER_MIN {
            Regime::Super
        } else {
            Regime::Crit
        };
        Ok(Self {
            k,
            log_abelian,
            log_order,
            d,
            kappa,
            rho,
            nu,
            lambda: kappa,
            regime,
        })
    }
}

/// The four asymptotic forms of `t* = max(t0, t_diam)` with the one selected
/// by the regime conditions.
#[derive(Debug, Clone, Serialize)]
pub struct TStarAsymptotics {
    /// `k * n^(4/(dk)) / (2 pi e)` for `k << (2/d) log n`.
    pub sub_entropic: f64,
    /// `k * H^-1(1/lambda)` for `k ~ lambda (2/d) log n`.
    pub crit_entropic: f64,
    /// `(2/d) log n / ((rho + nu - 1) loglog n)` for moderate super `k`.
    pub super_entropic: f64,
    /// `log n / (rho loglog n)` above the phase threshold.
    pub diameter_bound: f64,
    pub selected: &'static str,
}

/// Full entropic report for one `(k, p, d)`.
#[derive(Debug, Clone, Serialize)]
pub struct EntropicReport {
    pub params: EntropicParams,
    /// Per-coordinate time `t0 / k`.
    pub s0: f64,
    pub t0: f64,
    pub t_diam: f64,
    pub t_star: f64,
    /// Which branch attains the max.
    pub branch: Branch,
    /// Phase-transition generator count `(log p^(d-1))^(1+2/(d-2))`.
    pub threshold_k: f64,
    /// Target entropy at the governing time.
    pub h0: f64,
    /// Slack above the target; `(v k)^(1/4)` floored at the configured
    /// minimum.
    pub omega: f64,
    pub h: f64,
    /// `Var(Q_1(t0))`.
    pub v: f64,
    pub alpha: f64,
    pub t_alpha: f64,
    pub asymptotics: TStarAsymptotics,
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    /// Window parameter for the reported `t_alpha`.
    pub alpha: f64,
    /// Floor applied to the default slack `omega = (v k)^(1/4)`.
    pub omega_floor: f64,
    /// Overrides the default slack entirely when set.
    pub omega: Option<f64>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            omega_floor: 1.0,
            omega: None,
        }
    }
}

impl EntropicReport {
    pub fn compute(k: f64, p: u64, d: u32, options: &ReportOptions) -> Result<Self> {
        let params = EntropicParams::new(k, p, d)?;
        let s0 = inverse_entropy(params.log_abelian / k)?;
        let t0 = k * s0;
        let t_diam = diameter_time(k, params.log_order)?;
        let (t_star, branch) = if t0 >= t_diam {
            (t0, Branch::Entropic)
        } else {
            (t_diam, Branch::Diameter)
        };
        let threshold_k = phase_threshold(p, d);
        // h0 switches branch at k = (log n)^(1 + 2/(d-2)).
        let h0_switch = params.log_order.powf(1.0 + 2.0 / (d as f64 - 2.0));
        let h0 = if k <= h0_switch {
            params.log_abelian
        } else {
            (1.0 - 1.0 / params.rho) * params.log_order
        };
        let v = var_q1(t0, k)?;
        let omega = options
            .omega
            .unwrap_or_else(|| (v * k).powf(0.25).max(options.omega_floor));
        let t_alpha = window_time(k, params.log_abelian, options.alpha)?;

        let loglog_n = params.log_order.ln();
        let two_over_d_logn = params.log_abelian;
        let asymptotics = TStarAsymptotics {
            sub_entropic: t0_asymptotic_sub(k, two_over_d_logn),
            crit_entropic: k * inverse_entropy(1.0 / params.lambda)?,
            super_entropic: two_over_d_logn / ((params.rho + params.nu - 1.0) * loglog_n),
            diameter_bound: params.log_order / (params.rho * loglog_n),
            selected: match params.regime {
                Regime::Sub => "sub-entropic",
                Regime::Crit => "crit-entropic",
                Regime::Super => {
                    if k <= two_over_d_logn.powf(1.0 + 2.0 / (d as f64 - 2.0)) {
                        "super-entropic"
                    } else {
                        "diameter-bound"
                    }
                }
            },
        };

        Ok(Self {
            params,
            s0,
            t0,
            t_diam,
            t_star,
            branch,
            threshold_k,
            h0,
            omega,
            h: h0 + omega,
            v,
            alpha: options.alpha,
            t_alpha,
            asymptotics,
        })
    }
}

/// Outcome of the `Q` concentration experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationOutcome {
    pub k: u64,
    pub log_cardinality: f64,
    pub xi: f64,
    pub t0: f64,
    pub v: f64,
    pub omega: f64,
    pub threshold: f64,
    pub trials: u64,
    pub hits: u64,
    pub estimate: f64,
    pub seed: u64,
}

/// Monte-Carlo estimate of `P(Q((1+xi) t0) >= log N + omega)` with
/// `omega = (v k)^(1/4)`. Trials use independent sub-streams of `seed` and
/// merge by index, so the estimate is reproducible.
pub fn concentration_experiment(
    k: u64,
    log_cardinality: f64,
    xi: f64,
    trials: u64,
    seed: u64,
) -> Result<ConcentrationOutcome> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    if xi <= -1.0 {
        return Err(Error::InvalidArgument(format!("need xi > -1, got {xi}")));
    }
    let kf = k as f64;
    let t0 = entropic_time(kf, log_cardinality)?;
    let v = var_q1(t0, kf)?;
    let omega = (v * kf).powf(0.25);
    let threshold = log_cardinality + omega;
    let s = (1.0 + xi) * t0 / kf;
    let sampler =
        Poisson::new(s).map_err(|e| Error::InvalidArgument(format!("Poisson({s}): {e}")))?;
    let mut hits = 0u64;
    for trial in 0..trials {
        let mut rng = stream(seed, trial);
        let mut q = 0.0;
        for _ in 0..k {
            let w = sampler.sample(&mut rng) as u64;
            q -= poisson_log_pmf(w, s);
        }
        if q >= threshold {
            hits += 1;
        }
    }
    Ok(ConcentrationOutcome {
        k,
        log_cardinality,
        xi,
        t0,
        v,
        omega,
        threshold,
        trials,
        hits,
        estimate: hits as f64 / trials as f64,
        seed,
    })
}

/// Draws the occupancy vector `W(t)`: k iid Poisson(t/k) coordinates.
pub fn sample_occupancy(k: usize, t: f64, rng: &mut impl Rng) -> Result<Vec<u64>> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidArgument(format!("need t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(vec![0; k]);
    }
    let s = t / k as f64;
    let sampler =
        Poisson::new(s).map_err(|e| Error::InvalidArgument(format!("Poisson({s}): {e}")))?;
    Ok((0..k).map(|_| sampler.sample(rng) as u64).collect())
}

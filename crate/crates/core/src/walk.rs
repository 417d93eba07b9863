//! Random generator sets and exact walk diagnostics.
//!
//! The walk lives on the directed Cayley multigraph of `H_{p,d}` with k
//! generators drawn iid uniform: from `g` it moves to `g * Z_i` for a uniform
//! `i`. For groups under the dense cap the full distribution is evolved
//! exactly, giving exact total-variation curves, the collision diagnostic
//! `n * sum mu^2 - 1`, and exact support counts. Occupancy-level statistics
//! (typicality, pair collisions, longest gaps) are Monte Carlo with seeded
//! sub-streams.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::entropic::{poisson_log_pmf, q_statistic, sample_occupancy};
use crate::group::{step2_decomposition_check, word_product, GroupElement, GroupParams, Word};
use crate::rng::stream;
use crate::{Error, Result};

/// Default dense-vector cap: exact evolution and BFS refuse larger groups.
pub const DEFAULT_DENSE_CAP: usize = 1 << 24;

/// A multiset of k generators with the parameters and the seed that
/// produced it (when sampled).
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    params: GroupParams,
    elems: Vec<GroupElement>,
    seed: Option<u64>,
}

impl GeneratorSet {
    /// k iid uniform elements, by uniform strictly-upper entries.
    pub fn sample(params: GroupParams, k: usize, seed: u64) -> Self {
        let mut rng = stream(seed, 0);
        let elems = (0..k)
            .map(|_| {
                let entries = (0..params.entry_count())
                    .map(|_| rng.random_range(0..params.p()))
                    .collect();
                params.element(entries).expect("entries are reduced")
            })
            .collect();
        Self {
            params,
            elems,
            seed: Some(seed),
        }
    }

    pub fn from_elements(params: GroupParams, elems: Vec<GroupElement>) -> Result<Self> {
        for e in &elems {
            if e.entries().len() != params.entry_count() {
                return Err(Error::ParamMismatch);
            }
            for &v in e.entries() {
                if v >= params.p() {
                    return Err(Error::EntryOutOfRange {
                        value: v,
                        p: params.p(),
                    });
                }
            }
        }
        Ok(Self {
            params,
            elems,
            seed: None,
        })
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn k(&self) -> usize {
        self.elems.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elems
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn word_product(&self, word: &Word) -> Result<GroupElement> {
        word_product(&self.params, &self.elems, word)
    }

    pub fn step2_decomposition_check(&self, word: &Word) -> Result<bool> {
        step2_decomposition_check(&self.params, &self.elems, word)
    }

    /// Per-generator permutation tables on ranks: `maps[i][r] = rank(g * Z_i)`
    /// for `g = unrank(r)`. Requires the order to fit in `cap`.
    pub fn rank_maps(&self, cap: usize) -> Result<Vec<Vec<u32>>> {
        let n = self.dense_order(cap)?;
        let mut maps = Vec::with_capacity(self.elems.len());
        for z in &self.elems {
            let mut map = Vec::with_capacity(n);
            for r in 0..n {
                let g = self.params.unrank_index(r);
                let gz = self.params.mul(&g, z)?;
                map.push(self.params.rank_index(&gz) as u32);
            }
            maps.push(map);
        }
        Ok(maps)
    }

    /// Group order as a dense index bound, or a cap error.
    pub fn dense_order(&self, cap: usize) -> Result<usize> {
        match self.params.order_usize() {
            Some(n) if n <= cap => Ok(n),
            _ => Err(Error::CapExceeded {
                order: self.params.order().to_string(),
                cap,
            }),
        }
    }
}

/// A probability distribution over group elements, indexed by rank.
#[derive(Debug, Clone, PartialEq)]
pub struct DistVector {
    probs: Vec<f64>,
}

impl DistVector {
    pub fn point_mass(n: usize, index: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Self { probs }
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// Wraps raw probabilities; they must sum to 1 within 1e-10.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 || probs.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support_size(&self) -> u64 {
        self.probs.iter().filter(|&&p| p > 0.0).count() as u64
    }
}

/// One step of the directed walk: `nu(x) = (1/k) sum_i mu(x * Z_i^-1)`,
/// i.e. mass at `y` flows to `y * Z_i`.
pub fn step_distribution(mu: &DistVector, z: &GeneratorSet) -> Result<DistVector> {
    let maps = z.rank_maps(DEFAULT_DENSE_CAP)?;
    if mu.len() != maps[0].len() {
        return Err(Error::LengthMismatch(mu.len(), maps[0].len()));
    }
    Ok(step_with_maps(mu, &maps))
}

fn step_with_maps(mu: &DistVector, maps: &[Vec<u32>]) -> DistVector {
    let weight = 1.0 / maps.len() as f64;
    let mut out = vec![0.0; mu.len()];
    for map in maps {
        for (r, &p) in mu.probs.iter().enumerate() {
            if p > 0.0 {
                out[map[r] as usize] += p * weight;
            }
        }
    }
    DistVector { probs: out }
}

/// Total variation distance `1/2 sum |mu - nu|`.
pub fn tv_distance(mu: &DistVector, nu: &DistVector) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::LengthMismatch(mu.len(), nu.len()));
    }
    Ok(0.5
        * mu.probs
            .iter()
            .zip(&nu.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

/// Collision diagnostic `n * sum mu(x)^2 - 1`; zero iff uniform, and an
/// upper bound for `2 tv(mu, uniform)^2` by Cauchy-Schwarz.
pub fn l2_collision(mu: &DistVector) -> f64 {
    let n = mu.len() as f64;
    (n * mu.probs.iter().map(|p| p * p).sum::<f64>() - 1.0).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeModel {
    /// Walk time is a step count; fractional times are floored.
    Discrete,
    /// Continuous time: discrete steps mixed with Poisson(t) weights above
    /// 1e-14.
    Poissonized,
}

/// One row of a TV curve.
#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    pub tv_full: f64,
    pub tv_abelian: f64,
    pub l2: f64,
    pub support: u64,
}

/// Exact TV/L2/support curve of the walk started at the identity, with the
/// Abelianised walk tracked through the super-diagonal pushforward.
///
/// Poissonized curves hold one accumulator vector per requested time, so
/// memory scales as `times.len() * n` doubles; keep the grid modest near
/// the cap.
pub fn tv_curve(
    z: &GeneratorSet,
    times: &[f64],
    model: TimeModel,
    cap: usize,
) -> Result<Vec<CurvePoint>> {
    use num_traits::ToPrimitive;
    let n = z.dense_order(cap)?;
    let params = z.params();
    let ab_n = match params.abelian_order().to_usize() {
        Some(m) if m <= cap => m,
        _ => {
            return Err(Error::CapExceeded {
                order: params.abelian_order().to_string(),
                cap,
            })
        }
    };
    let maps = z.rank_maps(cap)?;
    let ab_map: Vec<u32> = (0..n)
        .map(|r| {
            let g = params.unrank_index(r);
            params.abelian_rank_index(&params.abelianize(&g).expect("valid element")) as u32
        })
        .collect();

    let measure = |mu: &DistVector, t: f64| -> CurvePoint {
        let uniform = DistVector::uniform(n);
        let mut ab = vec![0.0; ab_n];
        for (r, &p) in mu.probs.iter().enumerate() {
            ab[ab_map[r] as usize] += p;
        }
        let ab_uniform = 1.0 / ab_n as f64;
        let tv_abelian = 0.5 * ab.iter().map(|p| (p - ab_uniform).abs()).sum::<f64>();
        CurvePoint {
            t,
            tv_full: tv_distance(mu, &uniform).expect("same length"),
            tv_abelian,
            l2: l2_collision(mu),
            support: mu.support_size(),
        }
    };

    match model {
        TimeModel::Discrete => {
            let steps: Vec<u64> = times.iter().map(|&t| t.max(0.0) as u64).collect();
            let max_step = steps.iter().copied().max().unwrap_or(0);
            let mut mu = DistVector::point_mass(n, 0);
            let mut by_step = Vec::with_capacity(max_step as usize + 1);
            by_step.push(measure(&mu, 0.0));
            for m in 1..=max_step {
                mu = step_with_maps(&mu, &maps);
                by_step.push(measure(&mu, m as f64));
            }
            Ok(times
                .iter()
                .zip(&steps)
                .map(|(&t, &m)| {
                    let mut point = by_step[m as usize].clone();
                    point.t = t;
                    point
                })
                .collect())
        }
        TimeModel::Poissonized => {
            // include every step count whose Poisson(t) weight clears 1e-14
            let windows: Vec<(u64, u64)> = times.iter().map(|&t| poisson_window(t)).collect();
            let max_step = windows.iter().map(|&(_, hi)| hi).max().unwrap_or(0);
            let mut acc = vec![vec![0.0; n]; times.len()];
            let mut mu = DistVector::point_mass(n, 0);
            for m in 0..=max_step {
                if m > 0 {
                    mu = step_with_maps(&mu, &maps);
                }
                for (ti, &t) in times.iter().enumerate() {
                    let (lo, hi) = windows[ti];
                    if m < lo || m > hi {
                        continue;
                    }
                    let w = poisson_log_pmf(m, t).exp();
                    for (r, &p) in mu.probs.iter().enumerate() {
                        acc[ti][r] += w * p;
                    }
                }
            }
            Ok(times
                .iter()
                .zip(acc)
                .map(|(&t, probs)| {
                    // renormalise the truncated mixture (missing mass < 1e-11)
                    let total: f64 = probs.iter().sum();
                    let mu = DistVector {
                        probs: probs.iter().map(|p| p / total).collect(),
                    };
                    measure(&mu, t)
                })
                .collect())
        }
    }
}

/// Step-count window carrying all Poisson(t) weight above 1e-14.
fn poisson_window(t: f64) -> (u64, u64) {
    if t <= 0.0 {
        return (0, 0);
    }
    let mode = t.floor() as u64;
    let mut lo = mode;
    while lo > 0 && poisson_log_pmf(lo - 1, t) > (1e-14f64).ln() {
        lo -= 1;
    }
    let mut hi = mode;
    while poisson_log_pmf(hi + 1, t) > (1e-14f64).ln() {
        hi += 1;
    }
    (lo, hi)
}

/// Occupancy sample of the auxiliary process: k iid Poisson(t/k) counts.
pub fn aux_process_sample(k: usize, t: f64, seed: u64) -> Result<Vec<u64>> {
    sample_occupancy(k, t, &mut stream(seed, 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypicalityVariant {
    /// Only the pointwise-mass and cap clauses.
    EntropyOnly,
    /// Adds the once-picked count window
    /// `|J(w) - t e^(-t/k)| <= eps/2 * t e^(-t/k)`.
    OnceCount,
    /// Adds the per-coordinate window count
    /// `#{i : eta s <= w_i <= s/eta} >= 4k/5`.
    PairWindow,
}

/// Membership spec for the typicality set: every member has
/// `mu_t(w) <= e^-h` and `max_i w_i < cap`, plus the variant clause.
#[derive(Debug, Clone, Serialize)]
pub struct TypicalitySpec {
    pub variant: TypicalityVariant,
    pub h: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub cap: u64,
}

impl TypicalitySpec {
    /// Defaults `eta = 0.2`, `epsilon = 0.1`; `cap` is normally `p`.
    pub fn new(variant: TypicalityVariant, h: f64, cap: u64) -> Self {
        Self {
            variant,
            h,
            eta: 0.2,
            epsilon: 0.1,
            cap,
        }
    }
}

/// Checks membership of an occupancy vector in the typicality set; `s` is
/// the per-coordinate scale used by the window clause (`t/k` for the walk).
pub fn typicality_check(
    w: &[u64],
    spec: &TypicalitySpec,
    t: f64,
    k: usize,
    s: f64,
) -> Result<bool> {
    if w.iter().any(|&v| v >= spec.cap) {
        return Ok(false);
    }
    if q_statistic(w, t, k)? < spec.h {
        return Ok(false);
    }
    match spec.variant {
        TypicalityVariant::EntropyOnly => Ok(true),
        TypicalityVariant::OnceCount => {
            let expect = t * (-t / k as f64).exp();
            let j = w.iter().filter(|&&v| v == 1).count() as f64;
            Ok((j - expect).abs() <= 0.5 * spec.epsilon * expect)
        }
        TypicalityVariant::PairWindow => {
            let lo = spec.eta * s;
            let hi = s / spec.eta;
            let inside = w
                .iter()
                .filter(|&&v| (v as f64) >= lo && (v as f64) <= hi)
                .count();
            Ok(inside as f64 >= 0.8 * k as f64)
        }
    }
}

/// Outcome of the paired occupancy collision experiment.
#[derive(Debug, Clone, Serialize)]
pub struct CollisionOutcome {
    pub trials: u64,
    pub typical_pairs: u64,
    pub collisions: u64,
    /// `P(W = W' | typ)` estimate.
    pub estimate: f64,
    /// `P(typ)` estimate.
    pub p_typ: f64,
    /// `e^-h / P(typ)`.
    pub bound: f64,
    /// Binomial std error of the estimate.
    pub sigma: f64,
    pub seed: u64,
}

impl CollisionOutcome {
    /// The lemma's inequality with Monte-Carlo slack:
    /// `estimate <= bound + 3 sigma`.
    pub fn within_bound(&self) -> bool {
        self.estimate <= self.bound + 3.0 * self.sigma
    }
}

/// Paired Monte-Carlo estimate of `P(W = W' | both typical)` against the
/// bound `e^-h / P(typ)`.
pub fn collision_experiment(
    k: usize,
    t: f64,
    trials: u64,
    spec: &TypicalitySpec,
    seed: u64,
) -> Result<CollisionOutcome> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let s = t / k as f64;
    let mut typical_pairs = 0u64;
    let mut collisions = 0u64;
    for trial in 0..trials {
        let w = sample_occupancy(k, t, &mut stream(seed, 2 * trial))?;
        let w2 = sample_occupancy(k, t, &mut stream(seed, 2 * trial + 1))?;
        if typicality_check(&w, spec, t, k, s)? && typicality_check(&w2, spec, t, k, s)? {
            typical_pairs += 1;
            if w == w2 {
                collisions += 1;
            }
        }
    }
    let p_typ = typical_pairs as f64 / trials as f64;
    let estimate = if typical_pairs == 0 {
        0.0
    } else {
        collisions as f64 / typical_pairs as f64
    };
    let sigma = if typical_pairs == 0 {
        0.0
    } else {
        (estimate * (1.0 - estimate) / typical_pairs as f64).sqrt()
    };
    Ok(CollisionOutcome {
        trials,
        typical_pairs,
        collisions,
        estimate,
        p_typ,
        bound: (-spec.h).exp() / p_typ.max(f64::MIN_POSITIVE),
        sigma,
        seed,
    })
}

/// Exact unconditional pair-collision probability
/// `P(W = W') = (sum_v pmf(v; t/k)^2)^k` by coordinate independence.
pub fn pair_collision_prob(k: usize, t: f64) -> f64 {
    let s = t / k as f64;
    if s == 0.0 {
        return 1.0;
    }
    let cap = (s + 40.0 * (s + 1.0).sqrt() + 50.0).ceil() as u64;
    let per: f64 = (0..=cap).map(|v| (2.0 * poisson_log_pmf(v, s)).exp()).sum();
    per.powi(k as i32)
}

/// Longest run containing no ball of the given colour; a colour absent from
/// the sequence yields the full length.
pub fn longest_gap(seq: &[u32], colour: u32) -> Result<usize> {
    if seq.is_empty() {
        return Err(Error::InvalidArgument("empty colour sequence".into()));
    }
    let mut best = 0usize;
    let mut run = 0usize;
    for &c in seq {
        if c == colour {
            run = 0;
        } else {
            run += 1;
            best = best.max(run);
        }
    }
    Ok(best)
}

/// Exact support sizes `|supp(P_m)|` for m = 0..=m_max by bitset evolution;
/// `P_m` is the law after exactly m steps.
pub fn support_sizes(z: &GeneratorSet, m_max: u32, cap: usize) -> Result<Vec<u64>> {
    let n = z.dense_order(cap)?;
    let maps = z.rank_maps(cap)?;
    let mut current = vec![false; n];
    current[0] = true;
    let mut sizes = vec![1u64];
    for _ in 1..=m_max {
        let mut next = vec![false; n];
        for (r, &alive) in current.iter().enumerate() {
            if alive {
                for map in &maps {
                    next[map[r] as usize] = true;
                }
            }
        }
        sizes.push(next.iter().filter(|&&b| b).count() as u64);
        current = next;
    }
    Ok(sizes)
}

/// Verifies `|supp(P_m)| <= k^m` for every m up to the given bound.
pub fn support_growth_check(z: &GeneratorSet, m_max: u32, cap: usize) -> Result<bool> {
    use num_bigint::BigUint;
    let sizes = support_sizes(z, m_max, cap)?;
    let k = BigUint::from(z.k());
    let mut bound = BigUint::from(1u32);
    for &size in &sizes {
        if BigUint::from(size) > bound {
            return Ok(false);
        }
        bound *= &k;
    }
    Ok(true)
}

/// Uniform shuffle of the multiset with `counts[i]` copies of colour `i+1`
/// (colours are 1-based like word letters).
pub fn random_colour_sequence(counts: &[u64], rng: &mut impl Rng) -> Vec<u32> {
    let mut seq: Vec<u32> = counts
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n((i + 1) as u32, c as usize))
        .collect();
    seq.shuffle(rng);
    seq
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn chi_square_pvalue(observed: &[u64], expected: &[f64]) -> f64 {
        let stat: f64 = observed
            .iter()
            .zip(expected)
            .map(|(&o, &e)| (o as f64 - e) * (o as f64 - e) / e)
            .sum();
        let df = (observed.len() - 1) as f64;
        1.0 - ChiSquared::new(df).unwrap().cdf(stat)
    }

    #[test]
    fn sampling_is_deterministic_and_uniform() {
        let params = GroupParams::new(2, 3).unwrap();
        let a = GeneratorSet::sample(params.clone(), 5, 42);
        let b = GeneratorSet::sample(params.clone(), 5, 42);
        assert_eq!(a.elements(), b.elements());
        assert_eq!(a.seed(), Some(42));

        // uniformity over the 8 elements of H_{2,3}
        let z = GeneratorSet::sample(params.clone(), 100_000, 7);
        let mut counts = vec![0u64; 8];
        for e in z.elements() {
            counts[params.rank_index(e)] += 1;
        }
        let expected = vec![100_000.0 / 8.0; 8];
        assert!(chi_square_pvalue(&counts, &expected) > 0.01);

        // k > n is fine: sampling with replacement
        let z = GeneratorSet::sample(params, 20, 1);
        assert_eq!(z.k(), 20);
    }

    #[test]
    fn step_moves_point_mass_along_generators() {
        let params = GroupParams::new(3, 3).unwrap();
        let z = GeneratorSet::sample(params.clone(), 1, 3);
        let n = params.order_usize().unwrap();
        let mu = DistVector::point_mass(n, 0);
        let nu = step_distribution(&mu, &z).unwrap();
        let z_rank = params.rank_index(&z.elements()[0]);
        assert_eq!(nu.probs()[z_rank], 1.0);
        assert_eq!(nu.support_size(), 1);
    }

    #[test]
    fn uniform_is_stationary() {
        let params = GroupParams::new(3, 3).unwrap();
        let n = params.order_usize().unwrap();
        let z = GeneratorSet::sample(params, 4, 9);
        let uniform = DistVector::uniform(n);
        let stepped = step_distribution(&uniform, &z).unwrap();
        for (&a, &b) in uniform.probs().iter().zip(stepped.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn two_steps_enumerate_two_letter_words() {
        let params = GroupParams::new(5, 3).unwrap();
        let n = params.order_usize().unwrap();
        let z = GeneratorSet::sample(params.clone(), 3, 11);
        let mut mu = DistVector::point_mass(n, 0);
        mu = step_distribution(&mu, &z).unwrap();
        mu = step_distribution(&mu, &z).unwrap();

        let mut brute = vec![0.0; n];
        for i in 1..=3u32 {
            for j in 1..=3u32 {
                let g = z.word_product(&Word::new(vec![i, j])).unwrap();
                brute[params.rank_index(&g)] += 1.0 / 9.0;
            }
        }
        for (a, b) in mu.probs().iter().zip(&brute) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn tv_examples() {
        let mu = DistVector::point_mass(8, 0);
        let uniform = DistVector::uniform(8);
        assert_eq!(tv_distance(&mu, &mu).unwrap(), 0.0);
        assert!((tv_distance(&mu, &uniform).unwrap() - 0.875).abs() < 1e-15);
        assert_eq!(
            tv_distance(&mu, &uniform).unwrap(),
            tv_distance(&uniform, &mu).unwrap()
        );
    }

    #[test]
    fn l2_collision_examples_and_tv_bound() {
        let uniform = DistVector::uniform(8);
        assert!(l2_collision(&uniform) < 1e-12);
        let point = DistVector::point_mass(8, 3);
        assert!((l2_collision(&point) - 7.0).abs() < 1e-12);

        let mut rng = stream(15, 0);
        for _ in 0..50 {
            let raw: Vec<f64> = (0..16).map(|_| rng.random_range(0.0..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let mu = DistVector::from_probs(raw.iter().map(|p| p / total).collect()).unwrap();
            let tv = tv_distance(&mu, &DistVector::uniform(16)).unwrap();
            assert!(2.0 * tv * tv <= l2_collision(&mu) + 1e-12);
        }
    }

    #[test]
    fn curve_starts_at_point_mass_and_contracts() {
        let params = GroupParams::new(3, 3).unwrap();
        let n = params.order_usize().unwrap() as f64;
        let z = GeneratorSet::sample(params, 3, 5);
        let times: Vec<f64> = (0..=30).map(|m| m as f64).collect();
        let curve = tv_curve(&z, &times, TimeModel::Discrete, DEFAULT_DENSE_CAP).unwrap();
        assert!((curve[0].tv_full - (1.0 - 1.0 / n)).abs() < 1e-12);
        assert_eq!(curve[0].support, 1);
        for pair in curve.windows(2) {
            assert!(
                pair[1].tv_full <= pair[0].tv_full + 1e-12,
                "not contracting"
            );
        }
        for point in &curve {
            assert!(point.tv_abelian <= point.tv_full + 1e-12);
            assert!(2.0 * point.tv_full * point.tv_full <= point.l2 + 1e-9);
        }
        // fully mixed by the end
        assert!(curve.last().unwrap().tv_full < 0.01);
    }

    #[test]
    fn poissonized_curve_is_a_window_average() {
        let params = GroupParams::new(3, 3).unwrap();
        let z = GeneratorSet::sample(params, 3, 5);
        let discrete_times: Vec<f64> = (0..=40).map(|m| m as f64).collect();
        let discrete =
            tv_curve(&z, &discrete_times, TimeModel::Discrete, DEFAULT_DENSE_CAP).unwrap();
        let t = 9.0;
        let poisson = tv_curve(&z, &[t], TimeModel::Poissonized, DEFAULT_DENSE_CAP).unwrap();
        let (lo, hi) = poisson_window(t);
        let window = &discrete[lo as usize..=(hi as usize).min(40)];
        let window_max = window.iter().map(|p| p.tv_full).fold(0.0, f64::max);
        let window_min = window.iter().map(|p| p.tv_full).fold(1.0, f64::min);
        assert!(poisson[0].tv_full <= window_max + 1e-10);
        assert!(poisson[0].tv_full >= window_min - 1e-10);
    }

    #[test]
    fn abelian_pushforward_commutes_with_stepping() {
        // project-then-step equals step-then-project, and rank indexing of
        // the projection agrees with the group's abelian_rank_index.
        let params = GroupParams::new(3, 3).unwrap();
        let n = params.order_usize().unwrap();
        let ab_n = params.abelian_order().to_usize().unwrap();
        let z = GeneratorSet::sample(params.clone(), 4, 23);

        let push = |mu: &DistVector| -> Vec<f64> {
            let mut ab = vec![0.0; ab_n];
            for (r, &p) in mu.probs().iter().enumerate() {
                let g = params.unrank_index(r);
                ab[params.abelian_rank_index(&params.abelianize(&g).unwrap())] += p;
            }
            ab
        };
        let ab_step = |pf: &[f64]| -> Vec<f64> {
            let p = params.p() as usize;
            let dm1 = params.d() - 1;
            let mut out = vec![0.0; ab_n];
            for (r, &mass) in pf.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                for e in z.elements() {
                    let zab = params.abelianize(e).unwrap();
                    // add the generator image digit-wise mod p
                    let mut rank = 0usize;
                    let mut rest = r;
                    let mut scale = 1usize;
                    for digit in zab.iter().take(dm1) {
                        let mine = rest % p;
                        rest /= p;
                        rank += ((mine + *digit as usize) % p) * scale;
                        scale *= p;
                    }
                    out[rank] += mass / z.k() as f64;
                }
            }
            out
        };

        let mut mu = DistVector::point_mass(n, 0);
        let mut pf = push(&mu);
        for _ in 0..5 {
            mu = step_distribution(&mu, &z).unwrap();
            pf = ab_step(&pf);
            let direct = push(&mu);
            for (a, b) in pf.iter().zip(&direct) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn aux_process_matches_poisson_marginals() {
        assert_eq!(aux_process_sample(6, 0.0, 1).unwrap(), vec![0; 6]);

        let k = 500;
        let t = 1000.0;
        let mut total = 0u64;
        for trial in 0..100u64 {
            let w = sample_occupancy(k, t, &mut stream(3, trial)).unwrap();
            total += w.iter().sum::<u64>();
        }
        let mean = total as f64 / 100.0;
        assert!((mean - t).abs() < 20.0, "mean={mean}");

        // chi-square of one coordinate against Poisson(2)
        let s = 2.0f64;
        let mut counts = vec![0u64; 8]; // 0..6 and 7+
        for trial in 0..10_000u64 {
            let w = sample_occupancy(1, s, &mut stream(8, trial)).unwrap();
            counts[(w[0] as usize).min(7)] += 1;
        }
        let mut expected: Vec<f64> = (0..7)
            .map(|v| 10_000.0 * poisson_log_pmf(v, s).exp())
            .collect();
        expected.push(10_000.0 - expected.iter().sum::<f64>());
        assert!(chi_square_pvalue(&counts, &expected) > 0.01);
    }

    #[test]
    fn typicality_clauses() {
        let spec = TypicalitySpec::new(TypicalityVariant::EntropyOnly, 0.0, 5);
        // cap violation
        assert!(!typicality_check(&[5, 0], &spec, 2.0, 2, 1.0).unwrap());
        assert!(typicality_check(&[4, 0], &spec, 2.0, 2, 1.0).unwrap());

        // all coordinates equal to s puts the whole index set in the window
        let spec = TypicalitySpec::new(TypicalityVariant::PairWindow, 0.0, 100);
        let w = vec![3u64; 10];
        assert!(typicality_check(&w, &spec, 30.0, 10, 3.0).unwrap());

        // entropy clause: a low-surprisal w fails for large h
        let spec = TypicalitySpec::new(TypicalityVariant::EntropyOnly, 1e6, 100);
        assert!(!typicality_check(&[1, 2], &spec, 3.0, 2, 1.5).unwrap());

        // once-count clause: t e^(-t/k) = 9.048 with eps = 0.1 forces J = 9
        let spec = TypicalitySpec::new(TypicalityVariant::OnceCount, 0.0, 100);
        let t = 10.0;
        let k = 100;
        let mut nine_ones = vec![0u64; k];
        for w in nine_ones.iter_mut().take(9) {
            *w = 1;
        }
        assert!(typicality_check(&nine_ones, &spec, t, k, 0.1).unwrap());
        let mut five_ones = vec![0u64; k];
        for w in five_ones.iter_mut().take(5) {
            *w = 1;
        }
        assert!(!typicality_check(&five_ones, &spec, t, k, 0.1).unwrap());
    }

    #[test]
    fn typicality_pass_rate_is_high_at_recommended_parameters() {
        // s = 20, k = 100: window [4, 100] captures nearly all mass and the
        // entropy clause sits 3.5 sigma below the mean of Q.
        let k = 100usize;
        let s = 20.0;
        let t = s * k as f64;
        let h = 275.0;
        let spec = TypicalitySpec::new(TypicalityVariant::PairWindow, h, 1_000_000);
        let trials = 10_000u64;
        let mut passes = 0u64;
        for trial in 0..trials {
            let w = sample_occupancy(k, t, &mut stream(77, trial)).unwrap();
            if typicality_check(&w, &spec, t, k, s).unwrap() {
                passes += 1;
            }
        }
        let rate = passes as f64 / trials as f64;
        assert!(rate >= 0.99, "rate={rate}");
    }

    #[test]
    fn collision_degenerate_case() {
        // k=1, t=0: W = W' = (0) always; with h = 0 the bound is exactly 1.
        let spec = TypicalitySpec::new(TypicalityVariant::EntropyOnly, 0.0, 10);
        let out = collision_experiment(1, 0.0, 100, &spec, 5).unwrap();
        assert_eq!(out.typical_pairs, 100);
        assert_eq!(out.estimate, 1.0);
        assert!(out.bound >= 1.0 - 1e-12);
        assert!(out.estimate <= out.bound + 1e-12);
    }

    #[test]
    fn collision_estimate_respects_the_bound() {
        let k = 20;
        let t = 20.0;
        let h = 15.0; // below E[Q] = k H(1) ~ 26.1, so most pairs are typical
        let spec = TypicalitySpec::new(TypicalityVariant::EntropyOnly, h, 1_000_000);
        let out = collision_experiment(k, t, 20_000, &spec, 6).unwrap();
        assert!(out.p_typ > 0.5);
        assert!(out.estimate <= out.bound + 3.0 * out.sigma);
    }

    #[test]
    fn pair_collision_matches_grid_enumeration() {
        // k=2: P(W = W') = sum over the occupancy grid of P(w)^2.
        let t = 1.6;
        let s = t / 2.0;
        let mut grid = 0.0;
        for v1 in 0..60u64 {
            for v2 in 0..60u64 {
                let lp = poisson_log_pmf(v1, s) + poisson_log_pmf(v2, s);
                grid += (2.0 * lp).exp();
            }
        }
        let direct = pair_collision_prob(2, t);
        assert!((direct - grid).abs() < 1e-10, "direct={direct} grid={grid}");
    }

    #[test]
    fn collision_monte_carlo_agrees_with_exact_probability() {
        // no typicality restriction: the empirical collision rate over all
        // pairs must approach the exact product formula
        let k = 2;
        let t = 1.0;
        let spec = TypicalitySpec::new(TypicalityVariant::EntropyOnly, 0.0, u64::MAX);
        let out = collision_experiment(k, t, 40_000, &spec, 13).unwrap();
        let exact = pair_collision_prob(k, t);
        let sd = (exact * (1.0 - exact) / 40_000.0).sqrt();
        assert!(
            (out.estimate - exact).abs() < 4.0 * sd,
            "est={} exact={exact}",
            out.estimate
        );
    }

    #[test]
    fn longest_gap_examples() {
        assert_eq!(longest_gap(&[1, 2, 2, 1], 1).unwrap(), 2);
        assert_eq!(longest_gap(&[1, 1, 1], 1).unwrap(), 0);
        assert_eq!(longest_gap(&[2, 2, 2], 1).unwrap(), 3);
        assert_eq!(longest_gap(&[2, 1, 2, 2, 1, 2], 1).unwrap(), 2);
        assert!(longest_gap(&[], 1).is_err());
    }

    #[test]
    fn longest_gap_tail_is_geometric() {
        // P(L > (kappa+1) eta^-2 m log r) <= r^-kappa for equal colour counts
        let r = 100u64;
        let counts = vec![r / 2, r / 2];
        let kappa = 1.0;
        let threshold = (kappa + 1.0) * 2.0 * (r as f64).ln();
        let trials = 10_000u64;
        let mut exceed = 0u64;
        for trial in 0..trials {
            let seq = random_colour_sequence(&counts, &mut stream(19, trial));
            if longest_gap(&seq, 1).unwrap() as f64 > threshold {
                exceed += 1;
            }
        }
        let est = exceed as f64 / trials as f64;
        let bound = (r as f64).powf(-kappa);
        let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
        assert!(est <= bound + 3.0 * sigma, "est={est} bound={bound}");
    }

    #[test]
    fn support_grows_at_most_geometrically() {
        let params = GroupParams::new(3, 3).unwrap();
        let z = GeneratorSet::sample(params.clone(), 3, 2);
        let sizes = support_sizes(&z, 4, DEFAULT_DENSE_CAP).unwrap();
        assert_eq!(sizes[0], 1);
        assert!(sizes[1] <= 3);
        assert!(support_growth_check(&z, 4, DEFAULT_DENSE_CAP).unwrap());

        // degenerate generator set: the identity alone never spreads
        let id_set = GeneratorSet::from_elements(params.clone(), vec![params.identity()]).unwrap();
        assert_eq!(
            support_sizes(&id_set, 3, DEFAULT_DENSE_CAP).unwrap(),
            vec![1, 1, 1, 1]
        );
    }

    #[test]
    fn equal_occupancies_collide_iff_pair_counts_agree() {
        // at d=3 with generic generators, S = S' iff the ordered pair-count
        // matrices agree, given equal occupancies
        use crate::group::word_stats;
        let params = GroupParams::new(97, 3).unwrap();
        let z = GeneratorSet::sample(params.clone(), 2, 31);
        // genericity: A1 B2 != A2 B1 mod p for this seed
        let a1 = z.elements()[0].entries()[0];
        let b1 = z.elements()[0].entries()[2];
        let a2 = z.elements()[1].entries()[0];
        let b2 = z.elements()[1].entries()[2];
        assert_ne!((a1 * b2) % 97, (a2 * b1) % 97, "degenerate seed");

        let perms = multiset_permutations(&[2, 2]);
        for wa in &perms {
            for wb in &perms {
                let sa = z.word_product(&Word::new(wa.clone())).unwrap();
                let sb = z.word_product(&Word::new(wb.clone())).unwrap();
                let ca = word_stats(&Word::new(wa.clone()), 2).unwrap();
                let cb = word_stats(&Word::new(wb.clone()), 2).unwrap();
                assert_eq!(sa == sb, ca == cb, "wa={wa:?} wb={wb:?}");
            }
        }
    }

    fn multiset_permutations(counts: &[u64]) -> Vec<Vec<u32>> {
        fn recurse(
            counts: &mut [u64],
            current: &mut Vec<u32>,
            total: u64,
            out: &mut Vec<Vec<u32>>,
        ) {
            if current.len() as u64 == total {
                out.push(current.clone());
                return;
            }
            for i in 0..counts.len() {
                if counts[i] > 0 {
                    counts[i] -= 1;
                    current.push((i + 1) as u32);
                    recurse(counts, current, total, out);
                    current.pop();
                    counts[i] += 1;
                }
            }
        }
        let mut out = Vec::new();
        let total: u64 = counts.iter().sum();
        recurse(&mut counts.to_vec(), &mut Vec::new(), total, &mut out);
        out
    }
}

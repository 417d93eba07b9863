//! Cayley-ball geometry: lattice-ball volumes, candidate radii, exact BFS
//! distance histograms, the counting bound and the uniform-ball sampler.
//!
//! The directed lattice ball `B_k(R) = {x in Z_+^k : sum x_i <= R}` has
//! exactly `C(R+k, k)` points and proxies the graph ball around the identity.
//! Two radii matter: the closed form `M* = k p^((d-1)/k) / e` and the minimal
//! `M_k` with `|B_k(M_k)| >= e^omega p^(d-1)`.

use num_bigint::BigUint;
use num_traits::{FromPrimitive, One, ToPrimitive};
use rand::Rng;
use serde::Serialize;

use crate::group::Word;
use crate::rng::random_biguint_below;
use crate::walk::{random_colour_sequence, GeneratorSet};
use crate::{Error, Result};

/// `|B_k(R)| = C(R + k, k)` exactly.
pub fn ball_size(k: u64, r: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc = acc * (r + i) / i;
    }
    acc
}

/// Closed-form radius `M* = k p^((d-1)/k) / e`.
pub fn m_star(k: u64, p: u64, d: u32) -> f64 {
    let kf = k as f64;
    kf * ((d as f64 - 1.0) * (p as f64).ln() / kf).exp() / std::f64::consts::E
}

/// Default slack `omega = max(log^2 k, k / p^((d-1)/(2k)))`, floored at 1.
pub fn default_radius_slack(k: u64, p: u64, d: u32) -> f64 {
    let kf = k as f64;
    let log_k = kf.ln();
    let decay = kf / ((d as f64 - 1.0) * (p as f64).ln() / (2.0 * kf)).exp();
    (log_k * log_k).max(decay).max(1.0)
}

/// Minimal integer radius with `|B_k(R)| >= e^omega p^(d-1)`, by exponential
/// plus binary search on the exact ball volume.
///
/// The target is compared in 64.64 fixed point, so `omega = 0` is exact.
pub fn m_k(k: u64, p: u64, d: u32, omega: f64) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidArgument("need k >= 1".into()));
    }
    if p < 2 || d < 3 {
        return Err(Error::InvalidArgument(format!(
            "need p >= 2 and d >= 3, got p={p} d={d}"
        )));
    }
    if !(0.0..=600.0).contains(&omega) {
        return Err(Error::InvalidArgument(format!(
            "omega must be in [0, 600], got {omega}"
        )));
    }
    let scale = BigUint::from_f64((omega.exp() * 2f64.powi(64)).ceil())
        .ok_or_else(|| Error::InvalidArgument(format!("bad omega {omega}")))?;
    let target = scale * BigUint::from(p).pow(d - 1);
    let reaches = |r: u64| (ball_size(k, r) << 64u32) >= target;
    if reaches(0) {
        return Ok(0);
    }
    let mut hi = 1u64;
    while !reaches(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2; // known not to reach
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if reaches(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Distances from the identity in the directed Cayley graph, as counts per
/// distance; `counts[r]` is the number of elements at distance exactly `r`.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceHistogram {
    pub counts: Vec<u64>,
    pub unreachable: u64,
    pub order: u64,
}

impl DistanceHistogram {
    pub fn reachable(&self) -> u64 {
        self.order - self.unreachable
    }

    /// Cumulative ball size `|{x : dist(id, x) <= r}|`.
    pub fn ball(&self, r: u64) -> u64 {
        self.counts.iter().take(r as usize + 1).sum()
    }

    pub fn max_distance(&self) -> u64 {
        self.counts.len().saturating_sub(1) as u64
    }
}

/// Visited set at one bit per rank.
struct Bitset {
    words: Vec<u64>,
}

impl Bitset {
    fn new(n: usize) -> Self {
        Self {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }
}

/// Level-synchronous BFS over ranks with on-the-fly neighbours; memory is
/// one visited bit per rank plus the frontier queues.
fn bfs_level_counts(n: usize, neighbours: impl Fn(u32, &mut Vec<u32>)) -> DistanceHistogram {
    let mut visited = Bitset::new(n);
    visited.insert(0);
    let mut frontier: Vec<u32> = vec![0];
    let mut counts = vec![1u64];
    let mut reached = 1u64;
    let mut scratch = Vec::new();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &r in &frontier {
            scratch.clear();
            neighbours(r, &mut scratch);
            for &to in &scratch {
                if visited.insert(to as usize) {
                    next.push(to);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        counts.push(next.len() as u64);
        reached += next.len() as u64;
        frontier = next;
    }
    DistanceHistogram {
        counts,
        unreachable: n as u64 - reached,
        order: n as u64,
    }
}

#[cfg(test)]
fn bfs_dist_vector(n: usize, start: usize, neighbours: &[Vec<u32>]) -> Vec<u32> {
    let mut dist = vec![u32::MAX; n];
    dist[start] = 0;
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(start as u32);
    while let Some(r) = queue.pop_front() {
        let next_dist = dist[r as usize] + 1;
        for map in neighbours {
            let to = map[r as usize];
            if dist[to as usize] == u32::MAX {
                dist[to as usize] = next_dist;
                queue.push_back(to);
            }
        }
    }
    dist
}

/// Exact BFS from the identity along the directed edges `g -> g * Z_i`.
pub fn bfs_distances(z: &GeneratorSet, cap: usize) -> Result<DistanceHistogram> {
    let n = z.dense_order(cap)?;
    let params = z.params().clone();
    let elems = z.elements().to_vec();
    Ok(bfs_level_counts(n, move |r, out| {
        let g = params.unrank_index(r as usize);
        for e in &elems {
            let gz = params.mul(&g, e).expect("same params");
            out.push(params.rank_index(&gz) as u32);
        }
    }))
}

/// Minimal radius `R` with `|ball(R)| >= beta * order`.
pub fn typical_distance(hist: &DistanceHistogram, beta: f64) -> Result<u64> {
    if !(0.0 < beta && beta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "beta must be in (0, 1), got {beta}"
        )));
    }
    let needed = beta * hist.order as f64;
    let mut cum = 0u64;
    for (r, &count) in hist.counts.iter().enumerate() {
        cum += count;
        if cum as f64 >= needed {
            return Ok(r as u64);
        }
    }
    Err(Error::NotEnoughMass {
        requested: beta,
        unreachable: hist.unreachable,
    })
}

/// One radius of the counting bound.
#[derive(Debug, Clone, Serialize)]
pub struct CountingBoundRow {
    pub radius: u64,
    /// `|ball(R)|` in the Cayley graph.
    pub graph_ball: u64,
    /// `|ball(R)|` in the projected Cayley graph on `Z_p^(d-1)`.
    pub abelian_ball: u64,
    /// `|B_k(R)| = C(R+k, k)`.
    pub lattice_ball: BigUint,
    /// `graph_ball <= p^((d-1)(d-2)/2) * lattice_ball`.
    pub coarse_holds: bool,
    /// `graph_ball <= p^((d-1)(d-2)/2) * abelian_ball`.
    pub sharp_holds: bool,
}

impl CountingBoundRow {
    pub fn holds(&self) -> bool {
        self.coarse_holds && self.sharp_holds
    }
}

/// Verifies, for every radius up to the graph diameter, that the Cayley ball
/// is at most `|[G,G]|` times the lattice ball — and the sharper form with
/// the projected (Abelianised) ball in place of the lattice ball.
pub fn counting_bound_sweep(z: &GeneratorSet, cap: usize) -> Result<Vec<CountingBoundRow>> {
    let params = z.params();
    let full_hist = bfs_distances(z, cap)?;

    // projected BFS on the Abelianisation
    let ab_n = match params.abelian_order().to_usize() {
        Some(m) if m <= cap => m,
        _ => {
            return Err(Error::CapExceeded {
                order: params.abelian_order().to_string(),
                cap,
            })
        }
    };
    let p = params.p() as usize;
    let dm1 = params.d() - 1;
    let ab_gens: Vec<Vec<u64>> = z
        .elements()
        .iter()
        .map(|e| params.abelianize(e).expect("valid element"))
        .collect();
    let ab_hist = bfs_level_counts(ab_n, |r, out| {
        for zab in &ab_gens {
            let mut rank = 0usize;
            let mut rest = r as usize;
            let mut scale = 1usize;
            for digit in zab.iter().take(dm1) {
                let mine = rest % p;
                rest /= p;
                rank += ((mine + *digit as usize) % p) * scale;
                scale *= p;
            }
            out.push(rank as u32);
        }
    });

    let commutator = params.commutator_order();
    let k = z.k() as u64;

    let mut rows = Vec::new();
    let mut graph_cum = 0u64;
    let mut ab_cum = 0u64;
    for r in 0..=full_hist.max_distance() {
        graph_cum += full_hist.counts.get(r as usize).copied().unwrap_or(0);
        ab_cum += ab_hist.counts.get(r as usize).copied().unwrap_or(0);
        let lattice = ball_size(k, r);
        let graph_big = BigUint::from(graph_cum);
        rows.push(CountingBoundRow {
            radius: r,
            graph_ball: graph_cum,
            abelian_ball: ab_cum,
            lattice_ball: lattice.clone(),
            coarse_holds: graph_big <= &commutator * &lattice,
            sharp_holds: graph_big <= &commutator * BigUint::from(ab_cum),
        });
    }
    Ok(rows)
}

/// The counting bound at a single radius.
pub fn counting_bound_check(z: &GeneratorSet, r: u64, cap: usize) -> Result<CountingBoundRow> {
    let rows = counting_bound_sweep(z, cap)?;
    let idx = (r as usize).min(rows.len().saturating_sub(1));
    let mut row = rows
        .get(idx)
        .cloned()
        .ok_or_else(|| Error::InvalidArgument("empty sweep".into()))?;
    if r > row.radius {
        // beyond the diameter the graph ball stops growing; recheck against
        // the larger lattice ball at the requested radius
        row.radius = r;
        row.lattice_ball = ball_size(z.k() as u64, r);
        row.coarse_holds =
            BigUint::from(row.graph_ball) <= z.params().commutator_order() * &row.lattice_ball;
    }
    Ok(row)
}

/// Exactly uniform point of `B_k(R)` by colexicographic unranking of a
/// uniform index.
pub fn sample_uniform_ball(k: u64, r: u64, rng: &mut impl Rng) -> Vec<u64> {
    let index = random_biguint_below(rng, &ball_size(k, r));
    unrank_ball_point(k, r, &index)
}

/// Decodes a colex-order index into a lattice point: the block with last
/// coordinate `v` holds the points of `B_(k-1)(R - v)`, so cumulative block
/// sizes telescope to `C(R+k, k) - C(R-V-1+k, k)` and each coordinate comes
/// out of a binary search.
pub fn unrank_ball_point(k: u64, r: u64, index: &BigUint) -> Vec<u64> {
    assert!(index < &ball_size(k, r), "index out of range");
    let mut coords = vec![0u64; k as usize];
    let mut u = index.clone();
    let mut budget = r;
    for i in (2..=k).rev() {
        // cum(v) = #points with last coordinate <= v
        let whole = ball_size(i, budget);
        let cum = |v: u64| -> BigUint {
            if v >= budget {
                whole.clone()
            } else {
                &whole - ball_size(i, budget - v - 1)
            }
        };
        let mut lo = 0u64;
        let mut hi = budget;
        if cum(0) > u {
            hi = 0;
        }
        while hi > lo {
            let mid = lo + (hi - lo) / 2;
            if cum(mid) > u {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let v = hi;
        if v > 0 {
            u -= cum(v - 1);
        }
        coords[i as usize - 1] = v;
        budget -= v;
    }
    coords[0] = u.to_u64().expect("remaining index fits the 1-ball");
    coords
}

/// Word with letter `i` used exactly `occupancy[i-1]` times, in uniformly
/// random order.
pub fn random_order_word(occupancy: &[u64], rng: &mut impl Rng) -> Word {
    Word::new(random_colour_sequence(occupancy, rng))
}

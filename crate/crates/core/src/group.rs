//! Exact arithmetic in the Heisenberg group `H_{p,d}`.
//!
//! Elements are `d x d` upper triangular matrices with 1s on the diagonal and
//! entries mod `p`; only the `d(d-1)/2` strictly-upper entries are stored, in
//! row-major order `(1,2), (1,3), ..., (1,d), (2,3), ..., (d-1,d)` with
//! 1-based positions. Ranking uses mixed-radix base `p` with entry `(1,2)`
//! least significant, so the identity has rank 0.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result};

/// Parameters of a Heisenberg group: prime modulus `p` and dimension `d >= 3`.
///
/// All element operations live here; elements are plain entry vectors and stay
/// immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupParams {
    p: u64,
    d: usize,
    entry_count: usize,
    order: BigUint,
}

/// One element of `H_{p,d}`: the strictly-upper entries in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    entries: Vec<u64>,
}

impl GroupElement {
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        base %= n;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            exp >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl GroupParams {
    /// Rejects non-prime `p`, `p >= 2^31` and `d` outside `3..=256`.
    pub fn new(p: u64, d: usize) -> Result<Self> {
        if p >= 1 << 31 {
            return Err(Error::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if d < 3 {
            return Err(Error::DimensionTooSmall(d));
        }
        if d > 256 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimension {d} is beyond the supported 256"
            )));
        }
        let entry_count = d * (d - 1) / 2;
        let order = BigUint::from(p).pow(entry_count as u32);
        Ok(Self {
            p,
            d,
            entry_count,
            order,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of stored entries, `d(d-1)/2`.
    pub fn entry_count(&self) -> usize {
        self.entry_count
    }

    /// Exact group order `p^(d(d-1)/2)`.
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// The order as `usize` if it fits (dense vectors need this).
    pub fn order_usize(&self) -> Option<usize> {
        self.order.to_usize()
    }

    /// Order of the Abelianisation, `p^(d-1)`.
    pub fn abelian_order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.d as u32 - 1)
    }

    /// Order of the commutator subgroup, `p^((d-1)(d-2)/2)`.
    pub fn commutator_order(&self) -> BigUint {
        BigUint::from(self.p).pow(((self.d - 1) * (self.d - 2) / 2) as u32)
    }

    /// Index of entry `(a, b)`, `1 <= a < b <= d`, in the canonical order.
    pub fn entry_index(&self, a: usize, b: usize) -> usize {
        debug_assert!(1 <= a && a < b && b <= self.d);
        let row_start = (a - 1) * self.d - a * (a - 1) / 2;
        row_start + (b - a - 1)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            entries: vec![0; self.entry_count],
        }
    }

    pub fn element(&self, entries: Vec<u64>) -> Result<GroupElement> {
        if entries.len() != self.entry_count {
            return Err(Error::EntryCount {
                expected: self.entry_count,
                got: entries.len(),
            });
        }
        for &value in &entries {
            if value >= self.p {
                return Err(Error::EntryOutOfRange { value, p: self.p });
            }
        }
        Ok(GroupElement { entries })
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if g.entries.len() != self.entry_count {
            return Err(Error::ParamMismatch);
        }
        Ok(())
    }

    /// Matrix product `g * h` with entries reduced mod `p`.
    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        let p = self.p;
        let mut out = vec![0u64; self.entry_count];
        for a in 1..self.d {
            for b in (a + 1)..=self.d {
                let ab = self.entry_index(a, b);
                let mut acc = (g.entries[ab] + h.entries[ab]) % p;
                for r in (a + 1)..b {
                    let term =
                        g.entries[self.entry_index(a, r)] * h.entries[self.entry_index(r, b)] % p;
                    acc = (acc + term) % p;
                }
                out[ab] = acc;
            }
        }
        Ok(GroupElement { entries: out })
    }

    /// Inverse, by back-substitution on the diagonal gap `b - a`.
    pub fn inv(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        let p = self.p;
        let mut out = vec![0u64; self.entry_count];
        for gap in 1..self.d {
            for a in 1..=(self.d - gap) {
                let b = a + gap;
                let mut acc = g.entries[self.entry_index(a, b)];
                for r in (a + 1)..b {
                    let term = g.entries[self.entry_index(a, r)] * out[self.entry_index(r, b)] % p;
                    acc = (acc + term) % p;
                }
                out[self.entry_index(a, b)] = (p - acc % p) % p;
            }
        }
        Ok(GroupElement { entries: out })
    }

    /// `g^e` for any integer exponent.
    pub fn pow(&self, g: &GroupElement, e: i64) -> Result<GroupElement> {
        self.check(g)?;
        let mut base = if e < 0 { self.inv(g)? } else { g.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = self.identity();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            base = self.mul(&base, &base)?;
            exp >>= 1;
        }
        Ok(acc)
    }

    /// Commutator `[g, h] = g h g^-1 h^-1`.
    pub fn commutator(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        let gh = self.mul(g, h)?;
        let inv = self.mul(&self.inv(g)?, &self.inv(h)?)?;
        self.mul(&gh, &inv)
    }

    /// Super-diagonal image, a vector of `d-1` residues; this is the
    /// Abelianisation homomorphism onto `Z_p^(d-1)`.
    pub fn abelianize(&self, g: &GroupElement) -> Result<Vec<u64>> {
        self.check(g)?;
        Ok((1..self.d)
            .map(|a| g.entries[self.entry_index(a, a + 1)])
            .collect())
    }

    /// True iff `g` lies in the commutator subgroup (zero super-diagonal).
    pub fn in_commutator(&self, g: &GroupElement) -> Result<bool> {
        Ok(self.abelianize(g)?.iter().all(|&v| v == 0))
    }

    /// Mixed-radix rank in `[0, n)`; entry `(1,2)` is least significant.
    pub fn rank(&self, g: &GroupElement) -> Result<BigUint> {
        self.check(g)?;
        let mut acc = BigUint::zero();
        for &entry in g.entries.iter().rev() {
            acc = acc * self.p + entry;
        }
        Ok(acc)
    }

    pub fn unrank(&self, r: &BigUint) -> Result<GroupElement> {
        if r >= &self.order {
            return Err(Error::RankOutOfRange);
        }
        let mut rest = r.clone();
        let p = BigUint::from(self.p);
        let mut entries = Vec::with_capacity(self.entry_count);
        for _ in 0..self.entry_count {
            let digit = (&rest % &p).to_u64().expect("digit fits u64");
            entries.push(digit);
            rest /= &p;
        }
        Ok(GroupElement { entries })
    }

    /// Rank as `usize`; callers must have checked `order_usize()` is Some.
    pub fn rank_index(&self, g: &GroupElement) -> usize {
        let mut acc = 0usize;
        for &entry in g.entries.iter().rev() {
            acc = acc * self.p as usize + entry as usize;
        }
        acc
    }

    pub fn unrank_index(&self, mut r: usize) -> GroupElement {
        let p = self.p as usize;
        let mut entries = Vec::with_capacity(self.entry_count);
        for _ in 0..self.entry_count {
            entries.push((r % p) as u64);
            r /= p;
        }
        GroupElement { entries }
    }

    /// Rank of an Abelianisation vector in `[0, p^(d-1))`, same digit order.
    pub fn abelian_rank_index(&self, ab: &[u64]) -> usize {
        let mut acc = 0usize;
        for &entry in ab.iter().rev() {
            acc = acc * self.p as usize + entry as usize;
        }
        acc
    }
}

/// A word over generator indices `1..=k`, applied left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    letters: Vec<u32>,
}

impl Word {
    pub fn new(letters: Vec<u32>) -> Self {
        Self { letters }
    }

    pub fn empty() -> Self {
        Self {
            letters: Vec::new(),
        }
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        for &letter in &self.letters {
            if letter == 0 || letter as usize > k {
                return Err(Error::LetterOutOfRange { letter, k });
            }
        }
        Ok(())
    }
}

impl From<Vec<u32>> for Word {
    fn from(letters: Vec<u32>) -> Self {
        Self::new(letters)
    }
}

/// Letter occupancies and ordered pair counts of a word.
///
/// `pair_count(i, j)` is the number of position pairs `(m, l)`, `m < l`, with
/// letter `i` at `m` and letter `j` at `l` (i.e. `i` strictly before `j`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordStats {
    k: usize,
    counts: Vec<u64>,
    pairs: Vec<u64>,
}

impl WordStats {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Occupancy of letter `i` (1-based).
    pub fn letter_count(&self, i: usize) -> u64 {
        self.counts[i - 1]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Count of `i`-before-`j` position pairs (both 1-based).
    pub fn pair_count(&self, i: usize, j: usize) -> u64 {
        self.pairs[(i - 1) * self.k + (j - 1)]
    }
}

/// Computes occupancies and ordered pair counts in one left-to-right sweep.
pub fn word_stats(word: &Word, k: usize) -> Result<WordStats> {
    word.validate(k)?;
    let mut counts = vec![0u64; k];
    let mut pairs = vec![0u64; k * k];
    for &letter in word.letters() {
        let j = (letter - 1) as usize;
        for i in 0..k {
            if i != j {
                pairs[i * k + j] += counts[i];
            }
        }
        counts[j] += 1;
    }
    Ok(WordStats { k, counts, pairs })
}

/// Left-to-right product of the indicated generators; the empty word gives
/// the identity.
pub fn word_product(
    params: &GroupParams,
    generators: &[GroupElement],
    word: &Word,
) -> Result<GroupElement> {
    word.validate(generators.len())?;
    let mut acc = params.identity();
    for &letter in word.letters() {
        acc = params.mul(&acc, &generators[(letter - 1) as usize])?;
    }
    Ok(acc)
}

/// The corner polynomial `sum_s b_s * sum_{r<s} a_r mod p` of the `d = 3`
/// product formula.
pub fn f_poly(a: &[u64], b: &[u64], p: u64) -> Result<u64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let mut prefix = 0u64;
    let mut acc = 0u64;
    for (&ai, &bi) in a.iter().zip(b) {
        acc = (acc + bi % p * prefix) % p;
        prefix = (prefix + ai) % p;
    }
    Ok(acc)
}

/// Step-2 decomposition check at `d = 3`:
/// the word product must equal
/// `prod_i Z_i^{w_i}  *  prod_{i<j} [Z_i^-1, Z_j^-1]^{-pair_count(j, i)}`.
///
/// Moving `Z_j` past `Z_i` (`i < j`) uses `h g = g h [h^-1, g^-1]` once per
/// `j`-before-`i` pair, which is why the exponent counts pairs with `j` at
/// the earlier position. Commutators are central at `d = 3`, so the second
/// product needs no ordering.
pub fn step2_decomposition_check(
    params: &GroupParams,
    generators: &[GroupElement],
    word: &Word,
) -> Result<bool> {
    if params.d() != 3 {
        return Err(Error::InvalidArgument(format!(
            "step-2 decomposition requires d = 3, got d = {}",
            params.d()
        )));
    }
    let k = generators.len();
    let stats = word_stats(word, k)?;
    let direct = word_product(params, generators, word)?;

    let mut sorted = params.identity();
    for (i, z) in generators.iter().enumerate() {
        let power = params.pow(z, stats.letter_count(i + 1) as i64)?;
        sorted = params.mul(&sorted, &power)?;
    }
    for i in 1..=k {
        for j in (i + 1)..=k {
            let exponent = -(stats.pair_count(j, i) as i64);
            if exponent == 0 {
                continue;
            }
            let comm = params.commutator(
                &params.inv(&generators[i - 1])?,
                &params.inv(&generators[j - 1])?,
            )?;
            sorted = params.mul(&sorted, &params.pow(&comm, exponent)?)?;
        }
    }
    Ok(direct == sorted)
}

#[cfg(test)]
mod tests {
    // index loops in the dense oracle mirror the matrix notation
    #![allow(clippy::needless_range_loop)]

    use super::*;
    use crate::rng::stream;
    use num_traits::One;
    use rand::Rng;

    /// Dense d x d matrix multiplication oracle (full matrices, unit diagonal).
    fn dense_mul(p: u64, d: usize, g: &[Vec<u64>], h: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0u64; d]; d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0u64;
                for r in 0..d {
                    acc = (acc + g[i][r] * h[r][j]) % p;
                }
                out[i][j] = acc;
            }
        }
        out
    }

    fn to_dense(params: &GroupParams, g: &GroupElement) -> Vec<Vec<u64>> {
        let d = params.d();
        let mut out = vec![vec![0u64; d]; d];
        for i in 0..d {
            out[i][i] = 1;
            for j in (i + 1)..d {
                out[i][j] = g.entries()[params.entry_index(i + 1, j + 1)];
            }
        }
        out
    }

    fn from_dense(params: &GroupParams, m: &[Vec<u64>]) -> GroupElement {
        let d = params.d();
        let mut entries = Vec::new();
        for i in 0..d {
            for j in (i + 1)..d {
                entries.push(m[i][j]);
            }
        }
        params.element(entries).unwrap()
    }

    fn random_element(params: &GroupParams, rng: &mut impl Rng) -> GroupElement {
        let entries = (0..params.entry_count())
            .map(|_| rng.random_range(0..params.p()))
            .collect();
        params.element(entries).unwrap()
    }

    /// Builds a d=3 element from the (a, b, c) triple notation where
    /// a = entry (1,2), b = entry (2,3) and c = the corner entry (1,3);
    /// row-major storage is [a, c, b].
    fn el3(params: &GroupParams, a: u64, b: u64, c: u64) -> GroupElement {
        params.element(vec![a, c, b]).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(matches!(GroupParams::new(4, 3), Err(Error::NotPrime(4))));
        assert!(matches!(GroupParams::new(1, 3), Err(Error::NotPrime(1))));
        assert!(matches!(
            GroupParams::new(5, 2),
            Err(Error::DimensionTooSmall(2))
        ));
        assert!(matches!(
            GroupParams::new(1 << 31, 3),
            Err(Error::ModulusTooLarge(_))
        ));
        let params = GroupParams::new(5, 3).unwrap();
        assert_eq!(params.entry_count(), 3);
        assert_eq!(params.order(), &BigUint::from(125u32));
        assert_eq!(params.abelian_order(), BigUint::from(25u32));
        assert_eq!(params.commutator_order(), BigUint::from(5u32));
    }

    #[test]
    fn entry_index_is_row_major() {
        let params = GroupParams::new(2, 4).unwrap();
        let expected = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
        for (idx, &(a, b)) in expected.iter().enumerate() {
            assert_eq!(params.entry_index(a, b), idx);
        }
    }

    #[test]
    fn mul_matches_spec_example() {
        // (d=3, p=5), (a,b,c) triples: (1,2,3) * (4,0,1) = (0,2,4),
        // cross-checked against the dense oracle.
        let params = GroupParams::new(5, 3).unwrap();
        let g = el3(&params, 1, 2, 3);
        let h = el3(&params, 4, 0, 1);
        let gh = params.mul(&g, &h).unwrap();
        assert_eq!(gh, el3(&params, 0, 2, 4));
        let dense = dense_mul(5, 3, &to_dense(&params, &g), &to_dense(&params, &h));
        assert_eq!(from_dense(&params, &dense), gh);
    }

    #[test]
    fn mul_matches_dense_oracle_random() {
        for (p, d) in [(2u64, 3usize), (5, 3), (3, 4), (7, 5), (2, 6)] {
            let params = GroupParams::new(p, d).unwrap();
            let mut rng = stream(11, p * 100 + d as u64);
            for _ in 0..100 {
                let g = random_element(&params, &mut rng);
                let h = random_element(&params, &mut rng);
                let fast = params.mul(&g, &h).unwrap();
                let dense = dense_mul(p, d, &to_dense(&params, &g), &to_dense(&params, &h));
                assert_eq!(from_dense(&params, &dense), fast);
            }
        }
    }

    #[test]
    fn identity_and_associativity() {
        let params = GroupParams::new(7, 4).unwrap();
        let mut rng = stream(2, 0);
        let id = params.identity();
        for _ in 0..200 {
            let g = random_element(&params, &mut rng);
            let h = random_element(&params, &mut rng);
            let f = random_element(&params, &mut rng);
            assert_eq!(params.mul(&g, &id).unwrap(), g);
            assert_eq!(params.mul(&id, &g).unwrap(), g);
            let left = params.mul(&params.mul(&g, &h).unwrap(), &f).unwrap();
            let right = params.mul(&g, &params.mul(&h, &f).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn inv_matches_spec_example() {
        // (a,b,c) triples: inv((1,2,3)) = (4,3,4), i.e. (-a, -b, ab - c).
        let params = GroupParams::new(5, 3).unwrap();
        let g = el3(&params, 1, 2, 3);
        let inv = params.inv(&g).unwrap();
        assert_eq!(inv, el3(&params, 4, 3, 4));
        assert_eq!(params.mul(&g, &inv).unwrap(), params.identity());
        assert_eq!(params.mul(&inv, &g).unwrap(), params.identity());
    }

    #[test]
    fn inv_is_involution_and_two_sided() {
        for (p, d) in [(2u64, 3usize), (13, 3), (3, 5)] {
            let params = GroupParams::new(p, d).unwrap();
            let mut rng = stream(5, p + d as u64);
            assert_eq!(params.inv(&params.identity()).unwrap(), params.identity());
            for _ in 0..200 {
                let g = random_element(&params, &mut rng);
                let inv = params.inv(&g).unwrap();
                assert_eq!(params.mul(&g, &inv).unwrap(), params.identity());
                assert_eq!(params.mul(&inv, &g).unwrap(), params.identity());
                assert_eq!(params.inv(&inv).unwrap(), g);
            }
        }
    }

    #[test]
    fn abelianize_is_a_homomorphism() {
        let params = GroupParams::new(5, 3).unwrap();
        let g = el3(&params, 1, 2, 3);
        assert_eq!(params.abelianize(&g).unwrap(), vec![1, 2]);
        assert_eq!(params.abelianize(&params.identity()).unwrap(), vec![0, 0]);
        for (p, d) in [(5u64, 3usize), (3, 4)] {
            let params = GroupParams::new(p, d).unwrap();
            let mut rng = stream(9, p);
            for _ in 0..200 {
                let g = random_element(&params, &mut rng);
                let h = random_element(&params, &mut rng);
                let sum: Vec<u64> = params
                    .abelianize(&g)
                    .unwrap()
                    .iter()
                    .zip(params.abelianize(&h).unwrap())
                    .map(|(&x, y)| (x + y) % p)
                    .collect();
                assert_eq!(
                    params.abelianize(&params.mul(&g, &h).unwrap()).unwrap(),
                    sum
                );
            }
        }
    }

    #[test]
    fn commutators_live_in_the_commutator_subgroup() {
        let params = GroupParams::new(5, 3).unwrap();
        assert!(params.in_commutator(&params.identity()).unwrap());
        assert!(params.in_commutator(&el3(&params, 0, 0, 4)).unwrap());
        let mut rng = stream(4, 0);
        for (p, d) in [(5u64, 3usize), (2, 4)] {
            let params = GroupParams::new(p, d).unwrap();
            for _ in 0..200 {
                let g = random_element(&params, &mut rng);
                let h = random_element(&params, &mut rng);
                assert!(params
                    .in_commutator(&params.commutator(&g, &h).unwrap())
                    .unwrap());
            }
        }
    }

    #[test]
    fn commutator_kernel_has_expected_size() {
        // Kernel of abelianize = commutator subgroup, size p^((d-1)(d-2)/2).
        for (p, d) in [(2u64, 3usize), (3, 3), (2, 4)] {
            let params = GroupParams::new(p, d).unwrap();
            let n = params.order_usize().unwrap();
            let mut kernel = 0u64;
            let mut images = std::collections::HashSet::new();
            for r in 0..n {
                let g = params.unrank_index(r);
                if params.in_commutator(&g).unwrap() {
                    kernel += 1;
                }
                images.insert(params.abelianize(&g).unwrap());
            }
            let expected: u64 = (&params.commutator_order()).try_into().unwrap();
            assert_eq!(kernel, expected);
            let ab: u64 = (&params.abelian_order()).try_into().unwrap();
            assert_eq!(images.len() as u64, ab, "abelianize must be surjective");
        }
    }

    #[test]
    fn rank_unrank_round_trip() {
        let params = GroupParams::new(2, 3).unwrap();
        assert_eq!(params.rank(&params.identity()).unwrap(), BigUint::zero());
        // (1,0,0) has entry (1,2) = 1 least significant.
        let g = params.element(vec![1, 0, 0]).unwrap();
        assert_eq!(params.rank(&g).unwrap(), BigUint::one());
        let n = params.order_usize().unwrap();
        let mut seen = std::collections::HashSet::new();
        for r in 0..n {
            let g = params.unrank_index(r);
            assert_eq!(params.rank_index(&g), r);
            assert_eq!(params.rank(&g).unwrap(), BigUint::from(r));
            assert_eq!(params.unrank(&BigUint::from(r)).unwrap(), g);
            seen.insert(g);
        }
        assert_eq!(seen.len(), n);
        let top = params.unrank(&(params.order() - BigUint::one())).unwrap();
        assert!(top.entries().iter().all(|&v| v == 1));
        assert!(matches!(
            params.unrank(params.order()),
            Err(Error::RankOutOfRange)
        ));
    }

    #[test]
    fn word_product_basics() {
        let params = GroupParams::new(5, 3).unwrap();
        let mut rng = stream(21, 0);
        let gens: Vec<GroupElement> = (0..3).map(|_| random_element(&params, &mut rng)).collect();
        assert_eq!(
            word_product(&params, &gens, &Word::empty()).unwrap(),
            params.identity()
        );
        assert_eq!(
            word_product(&params, &gens, &Word::new(vec![1])).unwrap(),
            gens[0]
        );
        let w = Word::new(vec![1, 2, 1]);
        let expected = params
            .mul(&params.mul(&gens[0], &gens[1]).unwrap(), &gens[0])
            .unwrap();
        assert_eq!(word_product(&params, &gens, &w).unwrap(), expected);
        assert!(matches!(
            word_product(&params, &gens, &Word::new(vec![4])),
            Err(Error::LetterOutOfRange { .. })
        ));
    }

    #[test]
    fn word_stats_matches_brute_force() {
        let w = Word::new(vec![1, 2, 1, 2]);
        let stats = word_stats(&w, 2).unwrap();
        assert_eq!(stats.pair_count(1, 2), 3);
        assert_eq!(stats.pair_count(2, 1), 1);
        assert_eq!(stats.counts(), &[2, 2]);

        let mut rng = stream(33, 0);
        for _ in 0..50 {
            let k = rng.random_range(1..5usize);
            let len = rng.random_range(0..40usize);
            let letters: Vec<u32> = (0..len).map(|_| rng.random_range(1..=k as u32)).collect();
            let w = Word::new(letters.clone());
            let stats = word_stats(&w, k).unwrap();
            // brute-force double loop over position pairs
            for i in 1..=k as u32 {
                for j in 1..=k as u32 {
                    if i == j {
                        assert_eq!(stats.pair_count(i as usize, j as usize), 0);
                        continue;
                    }
                    let mut count = 0u64;
                    for m in 0..letters.len() {
                        for l in (m + 1)..letters.len() {
                            if letters[m] == i && letters[l] == j {
                                count += 1;
                            }
                        }
                    }
                    assert_eq!(stats.pair_count(i as usize, j as usize), count);
                }
            }
        }
    }

    #[test]
    fn word_stats_pair_identities() {
        let repeated = Word::new(vec![2, 2, 2, 2]);
        let stats = word_stats(&repeated, 3).unwrap();
        for i in 1..=3 {
            for j in 1..=3 {
                if i != j {
                    assert_eq!(stats.pair_count(i, j), 0);
                }
            }
        }
        let mut rng = stream(34, 0);
        for _ in 0..50 {
            let len = rng.random_range(0..30usize);
            let letters: Vec<u32> = (0..len).map(|_| rng.random_range(1..=2)).collect();
            let stats = word_stats(&Word::new(letters), 2).unwrap();
            assert_eq!(
                stats.pair_count(1, 2) + stats.pair_count(2, 1),
                stats.letter_count(1) * stats.letter_count(2)
            );
        }
    }

    #[test]
    fn f_poly_examples() {
        assert_eq!(f_poly(&[1, 0, 1], &[0, 1, 1], 7).unwrap(), 2);
        assert_eq!(f_poly(&[3, 1, 4], &[0, 0, 0], 7).unwrap(), 0);
        assert!(matches!(
            f_poly(&[1], &[1, 2], 7),
            Err(Error::LengthMismatch(1, 2))
        ));
    }

    #[test]
    fn corner_polynomial_expands_over_pair_counts() {
        // f(a-seq, b-seq) = sum_{i != j} c[i][j] A_i B_j
        //                 + sum_i (w_i choose 2) A_i B_i  (mod p),
        // the expansion that makes the pair-count matrices drive collisions.
        let p = 11u64;
        let params = GroupParams::new(p, 3).unwrap();
        let mut rng = stream(56, 0);
        let k = 3usize;
        let gens: Vec<GroupElement> = (0..k).map(|_| random_element(&params, &mut rng)).collect();
        for _ in 0..200 {
            let len = rng.random_range(0..40usize);
            let letters: Vec<u32> = (0..len).map(|_| rng.random_range(1..=k as u32)).collect();
            let word = Word::new(letters.clone());
            let stats = word_stats(&word, k).unwrap();
            let a_seq: Vec<u64> = letters
                .iter()
                .map(|&l| gens[(l - 1) as usize].entries()[0])
                .collect();
            let b_seq: Vec<u64> = letters
                .iter()
                .map(|&l| gens[(l - 1) as usize].entries()[2])
                .collect();
            let direct = f_poly(&a_seq, &b_seq, p).unwrap();
            let mut expanded = 0u64;
            for i in 1..=k {
                let a_i = gens[i - 1].entries()[0];
                for j in 1..=k {
                    let b_j = gens[j - 1].entries()[2];
                    let count = if i == j {
                        let w = stats.letter_count(i);
                        w * w.saturating_sub(1) / 2
                    } else {
                        stats.pair_count(i, j)
                    };
                    expanded = (expanded + count % p * (a_i * b_j % p)) % p;
                }
            }
            assert_eq!(direct, expanded, "letters={letters:?}");
        }
    }

    #[test]
    fn d3_product_formula_holds() {
        // word_product corner = sum of c entries + f(a-seq, b-seq).
        let params = GroupParams::new(7, 3).unwrap();
        let mut rng = stream(55, 0);
        let k = 4;
        let gens: Vec<GroupElement> = (0..k).map(|_| random_element(&params, &mut rng)).collect();
        for _ in 0..1000 {
            let len = rng.random_range(0..=50usize);
            let letters: Vec<u32> = (0..len).map(|_| rng.random_range(1..=k as u32)).collect();
            let word = Word::new(letters.clone());
            let product = word_product(&params, &gens, &word).unwrap();
            let a_seq: Vec<u64> = letters
                .iter()
                .map(|&l| gens[(l - 1) as usize].entries()[0])
                .collect();
            let b_seq: Vec<u64> = letters
                .iter()
                .map(|&l| gens[(l - 1) as usize].entries()[2])
                .collect();
            let c_sum: u64 = letters
                .iter()
                .map(|&l| gens[(l - 1) as usize].entries()[1])
                .fold(0, |acc, c| (acc + c) % 7);
            let a_sum = a_seq.iter().fold(0, |acc, &a| (acc + a) % 7);
            let b_sum = b_seq.iter().fold(0, |acc, &b| (acc + b) % 7);
            let corner = (c_sum + f_poly(&a_seq, &b_seq, 7).unwrap()) % 7;
            assert_eq!(product.entries(), &[a_sum, corner, b_sum]);
        }
    }

    #[test]
    fn super_diagonal_is_letter_count_weighted_sum() {
        for (p, d) in [(5u64, 4usize), (3, 5)] {
            let params = GroupParams::new(p, d).unwrap();
            let mut rng = stream(77, d as u64);
            let k = 3;
            let gens: Vec<GroupElement> =
                (0..k).map(|_| random_element(&params, &mut rng)).collect();
            for _ in 0..50 {
                let len = rng.random_range(0..30usize);
                let letters: Vec<u32> = (0..len).map(|_| rng.random_range(1..=k as u32)).collect();
                let word = Word::new(letters);
                let stats = word_stats(&word, k).unwrap();
                let product = word_product(&params, &gens, &word).unwrap();
                let super_diag = params.abelianize(&product).unwrap();
                for a in 1..d {
                    let mut acc = 0u64;
                    for i in 1..=k {
                        let z = params.abelianize(&gens[i - 1]).unwrap();
                        acc = (acc + stats.letter_count(i) % p * (z[a - 1] % p)) % p;
                    }
                    assert_eq!(super_diag[a - 1], acc);
                }
            }
        }
    }

    #[test]
    fn step2_decomposition_examples() {
        let params = GroupParams::new(5, 3).unwrap();
        let mut rng = stream(88, 0);
        let gens: Vec<GroupElement> = (0..2).map(|_| random_element(&params, &mut rng)).collect();

        // (1,2): no inversions, pure sorted product.
        assert!(step2_decomposition_check(&params, &gens, &Word::new(vec![1, 2])).unwrap());
        // single letter: no commutator factor.
        assert!(step2_decomposition_check(&params, &gens, &Word::new(vec![2])).unwrap());

        // (2,1): exactly one factor [Z1^-1, Z2^-1]^-1, via h g = g h [h^-1, g^-1].
        let z2z1 = params.mul(&gens[1], &gens[0]).unwrap();
        let comm = params
            .commutator(
                &params.inv(&gens[0]).unwrap(),
                &params.inv(&gens[1]).unwrap(),
            )
            .unwrap();
        let sorted = params
            .mul(
                &params.mul(&gens[0], &gens[1]).unwrap(),
                &params.pow(&comm, -1).unwrap(),
            )
            .unwrap();
        assert_eq!(z2z1, sorted);
        assert!(step2_decomposition_check(&params, &gens, &Word::new(vec![2, 1])).unwrap());
    }

    #[test]
    fn step2_decomposition_random_words() {
        for p in [2u64, 5, 13] {
            let params = GroupParams::new(p, 3).unwrap();
            let mut rng = stream(99, p);
            let k = 3;
            let gens: Vec<GroupElement> =
                (0..k).map(|_| random_element(&params, &mut rng)).collect();
            for _ in 0..200 {
                let len = rng.random_range(0..=30usize);
                let letters: Vec<u32> = (0..len).map(|_| rng.random_range(1..=k as u32)).collect();
                assert!(step2_decomposition_check(&params, &gens, &Word::new(letters)).unwrap());
            }
        }
        let params = GroupParams::new(5, 4).unwrap();
        assert!(step2_decomposition_check(&params, &[], &Word::empty()).is_err());
    }

    #[test]
    fn pow_handles_negative_exponents() {
        let params = GroupParams::new(13, 3).unwrap();
        let mut rng = stream(123, 0);
        let g = random_element(&params, &mut rng);
        let cube = params.mul(&params.mul(&g, &g).unwrap(), &g).unwrap();
        assert_eq!(params.pow(&g, 3).unwrap(), cube);
        assert_eq!(params.pow(&g, -3).unwrap(), params.inv(&cube).unwrap());
        assert_eq!(params.pow(&g, 0).unwrap(), params.identity());
    }
}

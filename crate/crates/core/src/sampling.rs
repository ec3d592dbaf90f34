//! Seeded random streams, stick partitions, and k-gon feasibility.
//!
//! Every Monte Carlo sample draws from its own stream, keyed by the run seed
//! and the sample's ordinal. The generator is ChaCha with 8 rounds
//! (`rand_chacha::ChaCha8Rng`): the 256-bit key is four successive SplitMix64
//! outputs of the seed (little-endian), and the ChaCha stream id is the sample
//! index. Uniform reals are `(x >> 11) * 2^-53 + 2^-54` for each 64-bit output
//! `x`, which lies strictly inside (0, 1).
//!
//! Because a sample's stream depends only on `(seed, index)`, results do not
//! depend on how samples are distributed over worker threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest piece count accepted by the exhaustive subset enumeration.
pub const MAX_PIECES: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    /// Expands the seed into a 256-bit ChaCha key.
    pub fn key(self) -> [u8; 32] {
        let mut state = self.0;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        key
    }
}

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed(value)
    }
}

impl std::fmt::Display for Seed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform generator for a single sample.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub(crate) fn from_key(key: [u8; 32], index: u64) -> Self {
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        RandomStream { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// A uniform real strictly inside (0, 1).
    pub fn uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE + 0.5 * SCALE
    }

    /// A uniform index in `0..n`, taken from the top bits of one draw.
    pub fn below(&mut self, n: u32) -> u32 {
        (((self.next_u64() >> 32) * n as u64) >> 32) as u32
    }
}

pub fn stream_for_sample(seed: Seed, index: u64) -> RandomStream {
    RandomStream::from_key(seed.key(), index)
}

/// Lengths of the pieces of a broken stick, as fractions of the whole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pieces(Vec<f64>);

impl Pieces {
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::invalid("pieces", "at least one piece is required"));
        }
        if let Some(bad) = lengths.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::invalid(
                "pieces",
                format!("lengths must be finite and nonnegative, got {bad}"),
            ));
        }
        Ok(Pieces(lengths))
    }

    /// Rescales the lengths so they sum to one.
    pub fn normalized(lengths: Vec<f64>) -> Result<Self> {
        let mut pieces = Pieces::new(lengths)?;
        let total = pieces.total();
        if total <= 0.0 {
            return Err(Error::invalid("pieces", "total length must be positive"));
        }
        pieces.0.iter_mut().for_each(|x| *x /= total);
        Ok(pieces)
    }

    pub fn lengths(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Pieces {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Sorted break points of the unit interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    breaks: Vec<f64>,
}

impl Partition {
    /// Builds a partition from break points in [0, 1], sorting them.
    /// Duplicates are kept and produce zero-length pieces.
    pub fn from_breaks(mut breaks: Vec<f64>) -> Result<Self> {
        if let Some(bad) = breaks.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::invalid(
                "breaks",
                format!("break points must lie in [0, 1], got {bad}"),
            ));
        }
        breaks.sort_by(f64::total_cmp);
        Ok(Partition { breaks })
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn piece_count(&self) -> usize {
        self.breaks.len() + 1
    }

    /// Successive gaps between 0, the breaks, and 1.
    pub fn pieces(&self) -> Pieces {
        Pieces(gaps(&self.breaks))
    }
}

fn gaps(sorted_breaks: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(sorted_breaks.len() + 1);
    let mut prev = 0.0;
    for &b in sorted_breaks {
        out.push(b - prev);
        prev = b;
    }
    out.push(1.0 - prev);
    out
}

/// Breaks the unit stick into `n` pieces at `n - 1` independent uniform points.
pub fn sample_partition(stream: &mut RandomStream, n: usize) -> Result<Partition> {
    if n == 0 {
        return Err(Error::invalid("n", "piece count must be at least 1"));
    }
    let mut breaks: Vec<f64> = (1..n).map(|_| stream.uniform()).collect();
    breaks.sort_by(f64::total_cmp);
    Ok(Partition { breaks })
}

/// Shortcut for `sample_partition(..).pieces()` that writes into `out`.
pub(crate) fn sample_pieces_into(stream: &mut RandomStream, n: usize, out: &mut Vec<f64>) {
    out.clear();
    out.extend((1..n).map(|_| stream.uniform()));
    out.sort_by(f64::total_cmp);
    out.push(1.0);
    for i in (1..out.len()).rev() {
        out[i] -= out[i - 1];
    }
}

/// Whether a polygon with these side lengths exists: the longest side must be
/// strictly shorter than the sum of the others.
pub fn forms_kgon(sides: &[f64]) -> Result<bool> {
    if sides.len() < 3 {
        return Err(Error::invalid(
            "sides",
            format!("a polygon needs at least 3 sides, got {}", sides.len()),
        ));
    }
    if let Some(bad) = sides.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::invalid(
            "sides",
            format!("side lengths must be finite and nonnegative, got {bad}"),
        ));
    }
    Ok(is_polygon(sides))
}

pub(crate) fn is_polygon(sides: &[f64]) -> bool {
    let (imax, &longest) = sides
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    let rest: f64 = sides
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != imax)
        .map(|(_, x)| x)
        .sum();
    longest < rest
}

fn check_subset_size(n: usize, k: usize) -> Result<()> {
    if n > MAX_PIECES {
        return Err(Error::invalid(
            "n",
            format!("exhaustive enumeration supports at most {MAX_PIECES} pieces, got {n}"),
        ));
    }
    if k < 3 || k > n {
        return Err(Error::invalid(
            "k",
            format!("subset size must satisfy 3 <= k <= n = {n}, got {k}"),
        ));
    }
    Ok(())
}

/// Visits every `k`-element subset of `0..n` as a bitmask (Gosper's hack),
/// stopping early when `visit` returns false.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(u32) -> bool) {
    let mut mask: u32 = (1u32 << k) - 1;
    let limit: u32 = 1u32 << n;
    while mask < limit {
        if !visit(mask) {
            return;
        }
        let low = mask & mask.wrapping_neg();
        let ripple = mask + low;
        mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
}

fn subset_is_polygon(pieces: &[f64], mask: u32) -> bool {
    let mut sum = 0.0;
    let mut longest = f64::NEG_INFINITY;
    let mut bits = mask;
    while bits != 0 {
        let i = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let x = pieces[i];
        sum += x;
        if x > longest {
            longest = x;
        }
    }
    longest < sum - longest
}

/// Number of `k`-subsets of the pieces that bound a `k`-gon, by exhaustive
/// enumeration.
pub fn count_kgons(pieces: &[f64], k: usize) -> Result<u64> {
    check_subset_size(pieces.len(), k)?;
    let mut count = 0;
    for_each_subset(pieces.len(), k, |mask| {
        if subset_is_polygon(pieces, mask) {
            count += 1;
        }
        true
    });
    Ok(count)
}

/// Whether at least one `k`-subset bounds a `k`-gon; stops at the first hit.
pub fn any_kgon(pieces: &[f64], k: usize) -> Result<bool> {
    check_subset_size(pieces.len(), k)?;
    let mut found = false;
    for_each_subset(pieces.len(), k, |mask| {
        found = subset_is_polygon(pieces, mask);
        !found
    });
    Ok(found)
}

/// The `k`-th largest piece, `k = 1` being the longest.
pub fn kth_longest(pieces: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > pieces.len() {
        return Err(Error::invalid(
            "k",
            format!("rank must satisfy 1 <= k <= {}, got {k}", pieces.len()),
        ));
    }
    let mut sorted = pieces.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(sorted[k - 1])
}

/// Exact binomial coefficient; `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

//! Index selector: the bijection between index bits and k-of-n subcarrier
//! activation patterns.
//!
//! Patterns are ordered lexicographically (as sorted position lists) and
//! identified by their rank in that order. Only the first
//! 2^⌊log2 C(n,k)⌋ ranks are addressable by index bits; the remaining
//! patterns are never transmitted.
//!
//! Two implementations share the same walk over candidate positions and
//! differ in how they obtain the binomial coefficient at each candidate:
//!
//! * [`IxsVariant::Original`] evaluates every coefficient from its factorial
//!   definition m! / (j! (m-j)!), which costs 2m loop iterations, so one
//!   call costs on the order of n² steps (n·k at the k = n/2 operating point).
//! * [`IxsVariant::Optimized`] carries the coefficient along the walk and
//!   updates it with one multiply/divide per candidate, so one call costs on
//!   the order of n steps.
//!
//! Every loop iteration is charged one step to the selector's counter. The
//! coefficients computed once when a selector is built (C(n,k) and the seed
//! C(n-1,k-1)) are not charged.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::CostUnits;
use crate::waveform::{binomial_unchecked, floor_log2_binom, IxsVariant};

/// A k-subset of positions `0..n` together with its lexicographic rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivationPattern {
    pub n: usize,
    pub k: usize,
    pub positions: Vec<usize>,
    #[serde(with = "decimal")]
    pub rank: BigUint,
}

impl ActivationPattern {
    /// Checks the structural invariants (not the rank).
    pub fn validate(&self) -> Result<()> {
        check_positions(self.n, self.k, &self.positions)
    }

    pub fn is_active(&self, position: usize) -> bool {
        self.positions.binary_search(&position).is_ok()
    }
}

fn check_positions(n: usize, k: usize, positions: &[usize]) -> Result<()> {
    if positions.len() != k {
        return Err(Error::Pattern(format!(
            "expected {k} positions, got {}",
            positions.len()
        )));
    }
    if let Some(&p) = positions.iter().find(|&&p| p >= n) {
        return Err(Error::Pattern(format!(
            "position {p} out of range for n = {n}"
        )));
    }
    if positions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Pattern(format!(
            "positions {positions:?} are not strictly increasing"
        )));
    }
    Ok(())
}

/// ⌊log2 C(n, k)⌋: how many index bits one subblock can carry.
pub fn index_bits_capacity(n: usize, k: usize) -> Result<u32> {
    floor_log2_binom(n as u64, k as u64)
}

/// Reads `bits` as a big-endian unsigned integer.
pub fn rank_from_bits(bits: &[bool]) -> BigUint {
    let mut rank = BigUint::zero();
    for &b in bits {
        rank <<= 1u32;
        if b {
            rank += 1u32;
        }
    }
    rank
}

/// Writes `rank` as exactly `width` big-endian bits.
pub fn bits_from_rank(rank: &BigUint, width: u32) -> Vec<bool> {
    (0..width as u64).rev().map(|i| rank.bit(i)).collect()
}

/// One mapper/demapper context for a fixed (n, k, variant), with its own
/// step counter.
#[derive(Clone, Debug)]
pub struct IndexSelector {
    n: usize,
    k: usize,
    variant: IxsVariant,
    patterns: BigUint,
    index_bits: u32,
    addressable: BigUint,
    // C(n-1, k-1): the count at the first candidate of every walk
    seed: BigUint,
    steps: u64,
}

impl IndexSelector {
    pub fn new(n: usize, k: usize, variant: IxsVariant) -> Result<Self> {
        if k > n {
            return Err(Error::domain(format!(
                "cannot activate k = {k} of n = {n} positions"
            )));
        }
        let patterns = binomial_unchecked(n as u64, k as u64);
        let index_bits = (patterns.bits() - 1) as u32;
        let seed = if k == 0 {
            BigUint::zero()
        } else {
            binomial_unchecked(n as u64 - 1, k as u64 - 1)
        };
        Ok(IndexSelector {
            n,
            k,
            variant,
            patterns,
            index_bits,
            addressable: BigUint::one() << index_bits,
            seed,
            steps: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn variant(&self) -> IxsVariant {
        self.variant
    }

    /// C(n, k).
    pub fn pattern_count(&self) -> &BigUint {
        &self.patterns
    }

    /// ⌊log2 C(n, k)⌋.
    pub fn index_bits(&self) -> u32 {
        self.index_bits
    }

    /// 2^index_bits: the number of patterns reachable from index bits.
    pub fn addressable(&self) -> &BigUint {
        &self.addressable
    }

    /// Steps accumulated since the last reset; resets the counter when asked.
    pub fn step_counter_snapshot(&mut self, reset: bool) -> CostUnits {
        let snapshot = CostUnits(self.steps);
        if reset {
            self.steps = 0;
        }
        snapshot
    }

    pub fn steps(&self) -> CostUnits {
        CostUnits(self.steps)
    }

    /// Maps an addressable rank to its activation pattern.
    pub fn unrank(&mut self, rank: &BigUint) -> Result<ActivationPattern> {
        if rank >= &self.addressable {
            return Err(Error::domain(format!(
                "rank {rank} is not addressable with {} index bits (n = {}, k = {})",
                self.index_bits, self.n, self.k
            )));
        }
        let positions = match self.variant {
            IxsVariant::Original => self.unrank_original(rank),
            IxsVariant::Optimized => self.unrank_optimized(rank),
        };
        Ok(ActivationPattern {
            n: self.n,
            k: self.k,
            positions,
            rank: rank.clone(),
        })
    }

    /// Maps index bits (big-endian, exactly `index_bits` long) to a pattern.
    pub fn map_bits(&mut self, bits: &[bool]) -> Result<ActivationPattern> {
        if bits.len() != self.index_bits as usize {
            return Err(Error::domain(format!(
                "expected {} index bits, got {}",
                self.index_bits,
                bits.len()
            )));
        }
        self.unrank(&rank_from_bits(bits))
    }

    /// Lexicographic rank of any valid pattern, addressable or not.
    pub fn rank(&mut self, positions: &[usize]) -> Result<BigUint> {
        check_positions(self.n, self.k, positions)?;
        Ok(match self.variant {
            IxsVariant::Original => self.rank_original(positions),
            IxsVariant::Optimized => self.rank_optimized(positions),
        })
    }

    /// Receiver-side inverse: ranks the pattern and rejects patterns that no
    /// transmitter could have produced.
    pub fn demap(&mut self, positions: &[usize]) -> Result<BigUint> {
        let rank = self.rank(positions)?;
        if rank >= self.addressable {
            return Err(Error::Detection(format!(
                "activation pattern {positions:?} has rank {rank}, beyond the {} addressable patterns",
                self.addressable
            )));
        }
        Ok(rank)
    }

    /// Demaps to index bits (big-endian, `index_bits` long).
    pub fn demap_bits(&mut self, positions: &[usize]) -> Result<Vec<bool>> {
        let rank = self.demap(positions)?;
        Ok(bits_from_rank(&rank, self.index_bits))
    }

    fn factorial(&mut self, x: usize) -> BigUint {
        let mut acc = BigUint::one();
        for t in 1..=x as u64 {
            self.steps += 1;
            acc *= t;
        }
        acc
    }

    fn factorial_binomial(&mut self, m: usize, j: usize) -> BigUint {
        let numerator = self.factorial(m);
        let denominator = self.factorial(j) * self.factorial(m - j);
        numerator / denominator
    }

    fn unrank_original(&mut self, rank: &BigUint) -> Vec<usize> {
        let (n, k) = (self.n, self.k);
        let mut rest = rank.clone();
        let mut positions = Vec::with_capacity(k);
        let mut c = 0;
        for i in 0..k {
            loop {
                self.steps += 1;
                let count = self.factorial_binomial(n - c - 1, k - i - 1);
                c += 1;
                if count <= rest {
                    rest -= count;
                } else {
                    positions.push(c - 1);
                    break;
                }
            }
        }
        positions
    }

    fn rank_original(&mut self, positions: &[usize]) -> BigUint {
        let (n, k) = (self.n, self.k);
        let mut rank = BigUint::zero();
        let mut start = 0;
        for (i, &p) in positions.iter().enumerate() {
            // the coefficient is evaluated at every candidate, chosen or not,
            // exactly as the unranking walk does
            for c in start..=p {
                self.steps += 1;
                let count = self.factorial_binomial(n - c - 1, k - i - 1);
                if c < p {
                    rank += count;
                }
            }
            start = p + 1;
        }
        rank
    }

    fn unrank_optimized(&mut self, rank: &BigUint) -> Vec<usize> {
        let (n, k) = (self.n, self.k);
        let mut rest = rank.clone();
        let mut positions = Vec::with_capacity(k);
        if k == 0 {
            return positions;
        }
        // count = C(n - c - 1, k - i - 1) throughout
        let mut count = self.seed.clone();
        let mut i = 0;
        let mut c = 0;
        loop {
            self.steps += 1;
            let m = (n - c - 1) as u64;
            let j = (k - i - 1) as u64;
            if count <= rest {
                rest -= &count;
                count = count * (m - j) / m;
            } else {
                positions.push(c);
                i += 1;
                if i == k {
                    break;
                }
                count = count * j / m;
            }
            c += 1;
        }
        positions
    }

    fn rank_optimized(&mut self, positions: &[usize]) -> BigUint {
        let (n, k) = (self.n, self.k);
        let mut rank = BigUint::zero();
        if k == 0 {
            return rank;
        }
        let mut count = self.seed.clone();
        let mut c = 0;
        for (i, &p) in positions.iter().enumerate() {
            let j = (k - i - 1) as u64;
            while c < p {
                self.steps += 1;
                let m = (n - c - 1) as u64;
                rank += &count;
                count = count * (m - j) / m;
                c += 1;
            }
            self.steps += 1;
            if j > 0 {
                let m = (n - c - 1) as u64;
                count = count * j / m;
            }
            c += 1;
        }
        rank
    }
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        BigUint::parse_bytes(text.as_bytes(), 10)
            .ok_or_else(|| D::Error::custom(format!("not a decimal integer: {text:?}")))
    }
}

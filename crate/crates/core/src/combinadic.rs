//! Lexicographic ranking of k-subsets (the combinatorial number system).
//!
//! The rank of a sorted subset `c_0 < c_1 < ... < c_{k-1}` of `{0, .., m-1}` is
//! its position in lexicographic order. It is computed through the descending
//! combinadic of the complement rank:
//!
//! ```text
//! rank = C(m, k) - 1 - sum_i C(m - 1 - c_i, k - i)
//! ```
//!
//! Arithmetic is exact. A `u128` fast path is tried first and falls back to
//! big integers on overflow, so results never depend on which path ran.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinationError {
    #[error("rank {rank} is out of range for C({m}, {k})")]
    RankOutOfRange { rank: String, m: usize, k: usize },
    #[error("indices do not form a sorted {k}-subset of 0..{m}")]
    InvalidSubset { m: usize, k: usize },
}

/// Exact integer arithmetic needed by the ranking routines.
///
/// Every operation is checked; `None` means the representation overflowed.
trait Count: Sized + Clone + Ord {
    fn zero_count() -> Self;
    fn one_count() -> Self;
    fn add(&self, other: &Self) -> Option<Self>;
    fn sub(&self, other: &Self) -> Option<Self>;
    fn mul_small(&self, v: u64) -> Option<Self>;
    fn div_small(&self, v: u64) -> Self;
}

impl Count for u128 {
    fn zero_count() -> Self {
        0
    }
    fn one_count() -> Self {
        1
    }
    fn add(&self, other: &Self) -> Option<Self> {
        self.checked_add(*other)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        self.checked_sub(*other)
    }
    fn mul_small(&self, v: u64) -> Option<Self> {
        self.checked_mul(v as u128)
    }
    fn div_small(&self, v: u64) -> Self {
        self / v as u128
    }
}

impl Count for BigUint {
    fn zero_count() -> Self {
        Zero::zero()
    }
    fn one_count() -> Self {
        One::one()
    }
    fn add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        if other > self {
            None
        } else {
            Some(self - other)
        }
    }
    fn mul_small(&self, v: u64) -> Option<Self> {
        Some(self * v)
    }
    fn div_small(&self, v: u64) -> Self {
        self / v
    }
}

fn binom_generic<T: Count>(n: u64, k: u64) -> Option<T> {
    if k > n {
        return Some(T::zero_count());
    }
    let k = k.min(n - k);
    let mut acc = T::one_count();
    for i in 0..k {
        // acc = C(n, i) here, so acc * (n - i) is divisible by (i + 1)
        acc = acc.mul_small(n - i)?.div_small(i + 1);
    }
    Some(acc)
}

/// Binomial coefficient `C(n, k)` as a big integer (zero when `k > n`).
pub fn binomial(n: u64, k: u64) -> BigUint {
    binom_generic::<BigUint>(n, k).expect("big integer arithmetic does not overflow")
}

/// `floor(log2 C(m, k))`, computed exactly.
///
/// Returns `None` when `C(m, k) = 0`, i.e. `k > m`.
pub fn floor_log2_binomial(m: u64, k: u64) -> Option<u64> {
    let c = binomial(m, k);
    if c.is_zero() {
        None
    } else {
        Some(c.bits() - 1)
    }
}

fn rank_generic<T: Count>(indices: &[usize], m: usize, k: usize) -> Option<T> {
    let mut acc = T::zero_count();
    for (i, &c) in indices.iter().enumerate() {
        let term = binom_generic::<T>((m - 1 - c) as u64, (k - i) as u64)?;
        acc = acc.add(&term)?;
    }
    let total = binom_generic::<T>(m as u64, k as u64)?;
    total.sub(&T::one_count())?.sub(&acc)
}

fn unrank_generic<T: Count>(rank: &T, m: usize, k: usize, out: &mut Vec<usize>) -> Option<()> {
    out.clear();
    let total = binom_generic::<T>(m as u64, k as u64)?;
    // complement rank, decomposed greedily as sum_i C(x_i, k - i) with x_i decreasing
    let mut rem = total.sub(&T::one_count())?.sub(rank)?;
    let mut upper = m; // exclusive bound on the next x
    for i in 0..k {
        let t = (k - i) as u64;
        let mut x = upper - 1;
        let mut cur = binom_generic::<T>(x as u64, t)?;
        while cur > rem {
            // C(x - 1, t) = C(x, t) * (x - t) / x; cur > rem >= 0 implies x >= t >= 1
            cur = cur.mul_small(x as u64 - t)?.div_small(x as u64);
            x -= 1;
        }
        rem = rem.sub(&cur)?;
        out.push(m - 1 - x);
        upper = x;
    }
    Some(())
}

fn check_subset(indices: &[usize], m: usize, k: usize) -> Result<(), CombinationError> {
    let sorted = indices.windows(2).all(|w| w[0] < w[1]);
    let in_range = indices.last().is_none_or(|&last| last < m);
    if indices.len() != k || k > m || !sorted || !in_range {
        return Err(CombinationError::InvalidSubset { m, k });
    }
    Ok(())
}

/// Lexicographic rank of the sorted `k`-subset `indices` of `{0, .., m-1}`.
pub fn combination_rank(
    indices: &[usize],
    m: usize,
    k: usize,
) -> Result<BigUint, CombinationError> {
    check_subset(indices, m, k)?;
    if let Some(r) = rank_generic::<u128>(indices, m, k) {
        return Ok(BigUint::from(r));
    }
    Ok(rank_generic::<BigUint>(indices, m, k).expect("validated subset"))
}

/// The `rank`-th `k`-subset of `{0, .., m-1}` in lexicographic order.
pub fn combination_unrank(
    rank: &BigUint,
    m: usize,
    k: usize,
) -> Result<Vec<usize>, CombinationError> {
    let total = binomial(m as u64, k as u64);
    if k > m || rank >= &total {
        return Err(CombinationError::RankOutOfRange {
            rank: rank.to_string(),
            m,
            k,
        });
    }
    let mut out = Vec::with_capacity(k);
    if let Some(r) = rank.to_u128() {
        if unrank_generic::<u128>(&r, m, k, &mut out).is_some() {
            return Ok(out);
        }
    }
    unrank_generic::<BigUint>(rank, m, k, &mut out).expect("rank checked against C(m, k)");
    Ok(out)
}

/// Support rank in whichever width fits. Used by the encoder and decoders to
/// avoid big-integer allocation on the common small-code path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Rank {
    Small(u128),
    Big(BigUint),
}

impl Rank {
    /// Reads `bits` as an unsigned integer, most significant bit first.
    pub(crate) fn from_bits(bits: &[bool]) -> Rank {
        if bits.len() <= 127 {
            Rank::Small(bits.iter().fold(0u128, |acc, &b| (acc << 1) | b as u128))
        } else {
            let mut v = BigUint::zero();
            for &b in bits {
                v <<= 1u32;
                if b {
                    v += 1u32;
                }
            }
            Rank::Big(v)
        }
    }

    /// Writes the low `width` bits, most significant first.
    pub(crate) fn write_bits(&self, width: usize, out: &mut Vec<bool>) {
        match self {
            Rank::Small(v) => {
                for i in (0..width).rev() {
                    out.push(i < 128 && (v >> i) & 1 == 1);
                }
            }
            Rank::Big(v) => {
                for i in (0..width).rev() {
                    out.push(v.bit(i as u64));
                }
            }
        }
    }

    /// True when the value is `>= 2^width`.
    pub(crate) fn exceeds_width(&self, width: usize) -> bool {
        match self {
            Rank::Small(v) => width < 128 && (v >> width) != 0,
            Rank::Big(v) => v.bits() > width as u64,
        }
    }

    /// `2^width - 1`.
    pub(crate) fn max_for_width(width: usize) -> Rank {
        if width <= 127 {
            Rank::Small((1u128 << width) - 1)
        } else {
            Rank::Big((BigUint::one() << width) - 1u32)
        }
    }
}

pub(crate) fn unrank_into(rank: &Rank, m: usize, k: usize, out: &mut Vec<usize>) {
    let ok = match rank {
        Rank::Small(r) => unrank_generic::<u128>(r, m, k, out).is_some(),
        Rank::Big(_) => false,
    };
    if !ok {
        let big = match rank {
            Rank::Small(r) => BigUint::from(*r),
            Rank::Big(r) => r.clone(),
        };
        unrank_generic::<BigUint>(&big, m, k, out).expect("rank below C(m, k)");
    }
}

pub(crate) fn rank_of(indices: &[usize], m: usize, k: usize) -> Rank {
    match rank_generic::<u128>(indices, m, k) {
        Some(r) => Rank::Small(r),
        None => Rank::Big(rank_generic::<BigUint>(indices, m, k).expect("valid subset")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// All k-subsets of 0..m in lexicographic order, by recursion.
    fn enumerate_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
        fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..m {
                cur.push(i);
                go(i + 1, m, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(0, m, k, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn unrank_examples() {
        assert_eq!(combination_unrank(&0u32.into(), 4, 2).unwrap(), vec![0, 1]);
        let enumerated = enumerate_subsets(4, 2);
        assert_eq!(enumerated[5], vec![2, 3]);
        assert_eq!(
            combination_unrank(&5u32.into(), 4, 2).unwrap(),
            enumerated[5]
        );
        let last = binomial(10, 3) - 1u32;
        assert_eq!(combination_unrank(&last, 10, 3).unwrap(), vec![7, 8, 9]);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(combination_rank(&[0, 1], 4, 2).unwrap(), 0u32.into());
        assert_eq!(combination_rank(&[2, 3], 4, 2).unwrap(), 5u32.into());
        assert_eq!(
            combination_rank(&[7, 8, 9], 10, 3).unwrap(),
            binomial(10, 3) - 1u32
        );
    }

    #[test]
    fn matches_enumeration_order() {
        for m in 1..=9 {
            for k in 1..=m {
                for (r, subset) in enumerate_subsets(m, k).iter().enumerate() {
                    let rank = BigUint::from(r);
                    assert_eq!(&combination_unrank(&rank, m, k).unwrap(), subset);
                    assert_eq!(combination_rank(subset, m, k).unwrap(), rank);
                }
            }
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(
            combination_unrank(&6u32.into(), 4, 2),
            Err(CombinationError::RankOutOfRange { .. })
        ));
        assert!(matches!(
            combination_rank(&[1, 1], 4, 2),
            Err(CombinationError::InvalidSubset { .. })
        ));
        assert!(matches!(
            combination_rank(&[3, 1], 4, 2),
            Err(CombinationError::InvalidSubset { .. })
        ));
        assert!(matches!(
            combination_rank(&[1, 4], 4, 2),
            Err(CombinationError::InvalidSubset { .. })
        ));
        assert!(matches!(
            combination_rank(&[1], 4, 2),
            Err(CombinationError::InvalidSubset { .. })
        ));
    }

    #[test]
    fn floor_log2_matches_float_for_small() {
        assert_eq!(floor_log2_binomial(48, 2), Some(10));
        assert_eq!(floor_log2_binomial(46, 2), Some(10));
        assert_eq!(floor_log2_binomial(2, 1), Some(1));
        assert_eq!(floor_log2_binomial(2, 3), None);
    }

    /// Oracle: repeated doubling against the exact value, independent of `bits()`.
    #[test]
    fn floor_log2_exact_up_to_512() {
        for m in (1..=512u64).step_by(37).chain([511, 512]) {
            for k in [1, 2, 3, m / 3, m / 2, m] {
                if k == 0 || k > m {
                    continue;
                }
                let c = binomial(m, k);
                let mut p = BigUint::one();
                let mut e = 0u64;
                while &p * 2u32 <= c {
                    p *= 2u32;
                    e += 1;
                }
                assert_eq!(floor_log2_binomial(m, k), Some(e), "m={m} k={k}");
            }
        }
    }

    #[test]
    fn big_path_round_trip() {
        // C(256, 128) needs ~252 bits, forcing the big-integer path
        let m = 256;
        let k = 128;
        let rank = binomial(m as u64, k as u64) / 3u32;
        let subset = combination_unrank(&rank, m, k).unwrap();
        assert_eq!(subset.len(), k);
        assert_eq!(combination_rank(&subset, m, k).unwrap(), rank);
        assert!(matches!(rank_of(&subset, m, k), Rank::Big(_)));
    }

    #[test]
    fn rank_bits_round_trip() {
        let bits = [true, false, true, true];
        let r = Rank::from_bits(&bits);
        assert_eq!(r, Rank::Small(11));
        let mut out = Vec::new();
        r.write_bits(4, &mut out);
        assert_eq!(out, bits);
        assert!(r.exceeds_width(3));
        assert!(!r.exceeds_width(4));
        assert_eq!(Rank::max_for_width(4), Rank::Small(15));
    }

    proptest! {
        #[test]
        fn rank_unrank_bijection(m in 1usize..200, kf in 0.0f64..1.0, rf in 0.0f64..1.0) {
            let k = ((m as f64 * kf) as usize).clamp(1, m);
            let total = binomial(m as u64, k as u64);
            // scale a fraction of the total without floating point overflow
            let scaled = (&total * BigUint::from((rf * 1e9) as u64)) / BigUint::from(1_000_000_000u64);
            let rank = if scaled >= total { &total - 1u32 } else { scaled };
            let subset = combination_unrank(&rank, m, k).unwrap();
            prop_assert_eq!(subset.len(), k);
            prop_assert!(subset.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(combination_rank(&subset, m, k).unwrap(), rank);
        }
    }
}

//! Density manipulations on sets of positive integers.
//!
//! Stretching a set (replacing its `k`-th member `a_k` by `k·a_k`) keeps the
//! same information but pushes its density to zero. Alternating long blocks
//! and long gaps gives a set whose prefix density swings between values
//! near 1 and near 0. Block boundaries sit at the markers `m_j = 2^(2^j)`:
//! the set is `{1}` together with `[m_j, m_(j+1))` for every even `j`.

use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::One;

/// `|{1..=n} ∩ set| / n`, counted exactly.
pub fn prefix_density(set: impl Fn(u64) -> bool, n: u64) -> Ratio<u64> {
    assert!(n >= 1, "empty prefix");
    Ratio::new((1..=n).filter(|&x| set(x)).count() as u64, n)
}

/// Maps the `k`-th member `a_k` (1-based) of a strictly increasing sequence
/// to `k·a_k`. The output stays strictly increasing. Ends early if a
/// product would overflow `u64`.
pub fn stretch_set(members: impl IntoIterator<Item = u64>) -> impl Iterator<Item = u64> {
    members.into_iter().zip(1u64..).map_while(|(a, k)| a.checked_mul(k))
}

/// `m_j = 2^(2^j)`.
pub fn oscillating_marker(j: u32) -> BigUint {
    BigUint::one() << (1u64 << j)
}

pub fn oscillating_set_membership(x: u64) -> bool {
    assert!(x >= 1, "members are positive");
    if x == 1 {
        return true;
    }
    // m_j <= x exactly when 2^j <= floor(log2 x).
    let log2 = 63 - x.leading_zeros();
    let j = 31 - log2.leading_zeros();
    j.is_multiple_of(2)
}

/// Number of members in `{1..=n}`.
pub fn oscillating_count(n: &BigUint) -> BigUint {
    let mut count = BigUint::from(u8::from(*n >= BigUint::one()));
    let mut j = 0;
    loop {
        let start = oscillating_marker(j);
        if start > *n {
            break;
        }
        let end = oscillating_marker(j + 1);
        let last = if end > *n { n.clone() } else { &end - 1u32 };
        count += last - &start + 1u32;
        j += 2;
    }
    count
}

pub fn oscillating_density(n: &BigUint) -> BigRational {
    BigRational::new(oscillating_count(n).into(), n.clone().into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_density_examples() {
        assert_eq!(prefix_density(|x| x % 2 == 0, 100), Ratio::new(1, 2));
        let is_square = |x: u64| {
            let r = (x as f64).sqrt() as u64;
            (r.saturating_sub(1)..=r + 1).any(|s| s * s == x)
        };
        assert_eq!(prefix_density(is_square, 100), Ratio::new(1, 10));
        assert_eq!(prefix_density(|_| true, 7), Ratio::new(1, 1));
    }

    #[test]
    fn stretch_examples() {
        let squares: Vec<u64> = stretch_set(1..=5).collect();
        assert_eq!(squares, [1, 4, 9, 16, 25]);
        let evens: Vec<u64> = stretch_set((1..=4).map(|k| 2 * k)).collect();
        assert_eq!(evens, [2, 8, 18, 32]);
        assert_eq!(stretch_set([u64::MAX / 2, u64::MAX - 1]).count(), 1);
    }

    #[test]
    fn stretched_density_shrinks() {
        let members: Vec<u64> = stretch_set(1..).take_while(|&m| m <= 1_000_000).collect();
        let member = |x: u64| members.binary_search(&x).is_ok();
        let mut previous = Ratio::new(1, 1);
        for n in [10, 100, 1000, 10_000, 100_000, 1_000_000] {
            let d = prefix_density(member, n);
            assert!(d < previous);
            previous = d;
        }
        assert!(previous <= Ratio::new(1, 1000));
    }

    #[test]
    fn membership_matches_blocks() {
        let members: Vec<u64> = (1..=300).filter(|&x| oscillating_set_membership(x)).collect();
        let expected: Vec<u64> = [1, 2, 3].into_iter().chain(16..256).collect();
        assert_eq!(members, expected);
        assert!(oscillating_set_membership(65_536));
        assert!(!oscillating_set_membership(65_535));
        assert!(oscillating_set_membership(u64::from(u32::MAX)));
        assert!(!oscillating_set_membership(1 << 32));
    }

    #[test]
    fn closed_form_count_matches_predicate() {
        let mut running = 0u64;
        for x in 1..=70_000u64 {
            running += u64::from(oscillating_set_membership(x));
            if x % 997 == 0 || x.is_power_of_two() || x == 255 || x == 256 {
                assert_eq!(oscillating_count(&BigUint::from(x)), BigUint::from(running), "n = {x}");
            }
        }
    }

    #[test]
    fn densities_swing() {
        let half = BigRational::new(1.into(), 2.into());
        for i in 2..5 {
            let block_end = oscillating_density(&oscillating_marker(2 * i + 1));
            let gap_end = oscillating_density(&oscillating_marker(2 * i + 2));
            assert!(block_end > half && gap_end < half && gap_end < block_end);
        }
    }
}

//! k-subsets of `{0, .., m-1}` as 64-bit masks in colexicographic order.
//!
//! Colex order on k-subsets coincides with numeric order of their masks, so
//! Gosper's successor walks it directly, and the combinadic rank
//! `sum_i C(c_i, i + 1)` (members `c_0 < c_1 < ..`) numbers it from 0.

/// `C(m, k)`, saturating at `u128::MAX`.
pub fn binomial(m: u64, k: u64) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // C(m, i) * (m - i) = C(m, i + 1) * (i + 1), so the division is exact
        acc = match acc.checked_mul((m - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Sum of `C(m, k)` for `k` in `sizes`.
pub fn subsets_in_range(m: u64, sizes: std::ops::RangeInclusive<u64>) -> u128 {
    sizes.fold(0u128, |acc, k| acc.saturating_add(binomial(m, k)))
}

/// Next mask with the same popcount (Gosper's hack); `None` past the last
/// subset of a `universe`-bit ground set.
#[inline]
pub fn next_subset(mask: u64, universe: u32) -> Option<u64> {
    if mask == 0 {
        return None;
    }
    let c = mask & mask.wrapping_neg();
    let r = mask.wrapping_add(c);
    if r == 0 {
        return None;
    }
    let next = (((r ^ mask) >> 2) / c) | r;
    if universe < 64 && next >> universe != 0 {
        None
    } else {
        Some(next)
    }
}

/// Colex rank of a mask among subsets of its popcount.
pub fn rank(mask: u64) -> u64 {
    let mut m = mask;
    let mut i = 1u64;
    let mut r: u128 = 0;
    while m != 0 {
        let c = m.trailing_zeros() as u64;
        r += binomial(c, i);
        i += 1;
        m &= m - 1;
    }
    r as u64
}

/// Inverse of [`rank`] for k-subsets of a `universe`-element ground set.
pub fn unrank(mut r: u64, k: u32, universe: u32) -> u64 {
    assert!(universe <= 64 && k <= universe);
    assert!((r as u128) < binomial(universe as u64, k as u64), "rank out of range");
    let mut mask = 0u64;
    let mut hi = universe as u64;
    for i in (1..=k as u64).rev() {
        // largest c < hi with C(c, i) <= r
        let mut c = hi - 1;
        while binomial(c, i) > r as u128 {
            c -= 1;
        }
        r -= binomial(c, i) as u64;
        mask |= 1u64 << c;
        hi = c;
    }
    mask
}

/// Iterator over consecutive colex ranks `[start, start + len)` of k-subsets.
#[derive(Debug, Clone)]
pub struct SubsetRange {
    current: Option<u64>,
    remaining: u64,
    universe: u32,
}

impl SubsetRange {
    pub fn new(universe: u32, k: u32, start: u64, len: u64) -> Self {
        let total = binomial(universe as u64, k as u64);
        let len = (len as u128).min(total.saturating_sub(start as u128)) as u64;
        let current = if len == 0 {
            None
        } else if k == 0 {
            Some(0)
        } else {
            Some(unrank(start, k, universe))
        };
        SubsetRange { current, remaining: len, universe }
    }
}

impl Iterator for SubsetRange {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        if self.remaining == 0 {
            return None;
        }
        let out = self.current?;
        self.remaining -= 1;
        self.current = if self.remaining == 0 { None } else { next_subset(out, self.universe) };
        Some(out)
    }
}

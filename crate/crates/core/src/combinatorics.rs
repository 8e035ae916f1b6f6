//! Binomial coefficients and colex (un)ranking of k-subsets.

use statrs::function::gamma::ln_gamma;

/// Exact `C(n, k)`, or `None` when it does not fit in a `u64`.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n - k + i) / i stays integral at every step
        acc = acc.checked_mul((n - k + i) as u128)? / i as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Natural log of `C(n, k)` for real-valued `n >= k >= 0` with integral `k`.
///
/// Short products are summed term by term; long ones go through ln-Gamma.
pub fn ln_choose(n: f64, k: f64) -> f64 {
    if k < 0.0 || k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if k == 0.0 {
        return 0.0;
    }
    if k <= 256.0 {
        let base = n - k;
        let mut acc = 0.0;
        let mut i = 1.0;
        while i <= k {
            acc += ((base + i) / i).ln();
            i += 1.0;
        }
        acc
    } else {
        ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
    }
}

/// `ln(m!)` for small integers, exact summation.
pub fn ln_factorial(m: u64) -> f64 {
    if m <= 256 {
        (2..=m).map(|i| (i as f64).ln()).sum()
    } else {
        ln_gamma(m as f64 + 1.0)
    }
}

/// Pascal table `C(c, i)` for `c <= n`, `i <= k`, saturating at `u64::MAX`.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    n: usize,
    k: usize,
    table: Vec<u64>,
}

impl BinomialTable {
    pub fn new(n: usize, k: usize) -> Self {
        let width = k + 1;
        let mut table = vec![0u64; (n + 1) * width];
        for c in 0..=n {
            table[c * width] = 1;
            for i in 1..=k.min(c) {
                let above = table[(c - 1) * width + i];
                let diag = table[(c - 1) * width + i - 1];
                table[c * width + i] = above.saturating_add(diag);
            }
        }
        BinomialTable { n, k, table }
    }

    #[inline]
    pub fn get(&self, c: usize, i: usize) -> u64 {
        debug_assert!(c <= self.n && i <= self.k);
        self.table[c * (self.k + 1) + i]
    }

    /// Size of the universe of k-subsets of an n-set, if it fits in 63 bits.
    pub fn universe(&self) -> Option<u64> {
        let total = self.get(self.n, self.k);
        (total < (1u64 << 63)).then_some(total)
    }

    /// Writes the k-subset of colex rank `rank` into `out` as strictly
    /// increasing 1-based vertex ids.
    ///
    /// Colex rank of `c_1 < ... < c_k` (0-based) is `sum_i C(c_i, i)`.
    pub fn unrank_colex(&self, mut rank: u64, out: &mut [u32]) {
        debug_assert_eq!(out.len(), self.k);
        let mut hi = self.n;
        for i in (1..=self.k).rev() {
            // largest c < hi with C(c, i) <= rank; C(., i) is nondecreasing in c
            let (mut lo, mut up) = (i - 1, hi - 1);
            while lo < up {
                let mid = (lo + up).div_ceil(2);
                if self.get(mid, i) <= rank {
                    lo = mid;
                } else {
                    up = mid - 1;
                }
            }
            rank -= self.get(lo, i);
            out[i - 1] = lo as u32 + 1;
            hi = lo;
        }
    }

    /// Colex rank of a strictly increasing 1-based k-subset.
    pub fn rank_colex(&self, subset: &[u32]) -> u64 {
        subset
            .iter()
            .enumerate()
            .map(|(i, &v)| self.get(v as usize - 1, i + 1))
            .sum()
    }
}

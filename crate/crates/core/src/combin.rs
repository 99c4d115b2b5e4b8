//! Enumeration of neighbor profiles.
//!
//! A profile of degree `k` is a composition of `k` into four non-negative
//! parts `(m00, m01, m10, m11)`. Profiles of a fixed degree are ordered
//! lexicographically, so `(0,0,0,k)` has rank 0 and `(k,0,0,0)` has the
//! last rank `C(k+3,3) - 1`.

use crate::games::NeighborProfile;

/// Binomial coefficient as `u64`. Exact for all arguments used here.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of profiles with `|m| = k`.
pub fn profiles_of_degree(k: usize) -> usize {
    binomial(k as u64 + 3, 3) as usize
}

/// Number of profiles with `|m| <= k_max`, i.e. `C(k_max+4, 4)`.
pub fn profiles_up_to(k_max: usize) -> usize {
    binomial(k_max as u64 + 4, 4) as usize
}

/// Lexicographic rank of `m` among the profiles of its own degree.
pub fn rank(m: &NeighborProfile) -> usize {
    let k = m.degree();
    let mut r = 0usize;
    let mut rest = k;
    // compositions of `rest - j` into 3 parts, for every smaller first part j
    for j in 0..m.m00 {
        r += profiles_into(rest - j, 3);
    }
    rest -= m.m00;
    for j in 0..m.m01 {
        r += profiles_into(rest - j, 2);
    }
    r + m.m10
}

/// Inverse of [`rank`].
pub fn unrank(k: usize, mut r: usize) -> NeighborProfile {
    debug_assert!(r < profiles_of_degree(k));
    let mut rest = k;
    let mut parts = [0usize; 3];
    for (slot, parts_left) in [(0usize, 3usize), (1, 2)] {
        let mut j = 0;
        loop {
            let block = profiles_into(rest - j, parts_left);
            if r < block {
                break;
            }
            r -= block;
            j += 1;
        }
        parts[slot] = j;
        rest -= j;
    }
    parts[2] = r;
    NeighborProfile::new(parts[0], parts[1], parts[2], rest - r)
}

/// All profiles of degree `k` in rank order.
pub fn enumerate(k: usize) -> Vec<NeighborProfile> {
    let mut out = Vec::with_capacity(profiles_of_degree(k));
    for m00 in 0..=k {
        for m01 in 0..=k - m00 {
            for m10 in 0..=k - m00 - m01 {
                out.push(NeighborProfile::new(m00, m01, m10, k - m00 - m01 - m10));
            }
        }
    }
    out
}

/// Multinomial pmf `k!/(m00! m01! m10! m11!) * prod w_s^{m_s}`.
pub fn multinomial_pmf(m: &NeighborProfile, w: &[f64; 4]) -> f64 {
    let mut prod = multinomial_coefficient(m) as f64;
    for (&c, &ws) in m.counts().iter().zip(w) {
        if c > 0 {
            if ws == 0.0 {
                return 0.0;
            }
            prod *= ws.powi(c as i32);
        }
    }
    prod
}

/// `k!/(m00! m01! m10! m11!)`, exact while it fits in `u128`.
pub fn multinomial_coefficient(m: &NeighborProfile) -> u128 {
    let k = m.degree() as u64;
    let a = binomial(k, m.m00 as u64) as u128;
    let b = binomial(k - m.m00 as u64, m.m01 as u64) as u128;
    let c = binomial(k - (m.m00 + m.m01) as u64, m.m10 as u64) as u128;
    a * b * c
}

// number of compositions of n into `parts` non-negative parts
fn profiles_into(n: usize, parts: usize) -> usize {
    binomial((n + parts - 1) as u64, (parts - 1) as u64) as usize
}

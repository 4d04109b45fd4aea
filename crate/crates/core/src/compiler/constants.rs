//! Rational bounds on `log2 k`, all checked with exact integer powers.

use num_bigint::BigUint;
use num_traits::{One, Pow};

use crate::rational::Rational;

/// `p/q` with `(k−1)^q < 2^p < k^q`, i.e. `log(k−1) < p/q < log k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RationalLogBound {
    pub k: u64,
    pub p: u64,
    pub q: u64,
}

impl RationalLogBound {
    pub fn holds(&self) -> bool {
        log_bound_holds(self.k, self.p, self.q)
    }

    pub fn as_rational(&self) -> Rational {
        Rational::new(self.p as i64, self.q as i64)
    }
}

fn big_pow(base: u64, exp: u64) -> BigUint {
    Pow::pow(BigUint::from(base), exp as u32)
}

/// Exact check of `(k−1)^q < 2^p < k^q`.
pub fn log_bound_holds(k: u64, p: u64, q: u64) -> bool {
    if k < 2 || q == 0 {
        return false;
    }
    let two_p = BigUint::one() << p as usize;
    big_pow(k - 1, q) < two_p && two_p < big_pow(k, q)
}

/// Smallest `p` with `2^p > (k−1)^q`, if that `p` also satisfies `2^p < k^q`.
fn smallest_p(k: u64, q: u64) -> Option<u64> {
    let lower = big_pow(k - 1, q);
    let p = lower.bits();
    log_bound_holds(k, p, q).then_some(p)
}

/// `α_k`: the bound with the smallest denominator (then smallest numerator).
///
/// Panics if `k < 2`.
pub fn pick_alpha(k: u64) -> Rational {
    pick_alpha_bound(k).as_rational()
}

pub fn pick_alpha_bound(k: u64) -> RationalLogBound {
    assert!(k >= 2, "pick_alpha needs k >= 2");
    (1..).find_map(|q| smallest_p(k, q).map(|p| RationalLogBound { k, p, q })).expect("a bound exists for every k >= 2")
}

/// `(p_k, q_k)` with a power-of-two denominator: the smallest `q = 2^j`
/// admitting a valid `p`, then the smallest such `p`.
///
/// Panics if `k < 2`.
pub fn pick_log_bounds(k: u64) -> RationalLogBound {
    assert!(k >= 2, "pick_log_bounds needs k >= 2");
    let mut q = 1u64;
    loop {
        if let Some(p) = smallest_p(k, q) {
            return RationalLogBound { k, p, q };
        }
        q *= 2;
    }
}

/// Inverse of [`pick_alpha`]: the `k` whose `α_k` equals `value`.
pub fn alpha_index(value: &Rational) -> Option<u64> {
    let approx = value.to_f64();
    if !(approx.is_finite() && approx > 0.0 && approx < 60.0) {
        return None;
    }
    let guess = approx.exp2().floor() as u64 + 1;
    (guess.saturating_sub(1).max(2)..=guess + 1).find(|&k| &pick_alpha(k) == value)
}

/// Integers `(p3, q3, p4, q4)` bracketing `log2 3` such that no positive
/// integer `u` satisfies `3^p3 <= u^q3` and `u^q4 <= 3^p4`, while `u = 3`
/// satisfies `2^p3 <= 3^q3` and `3^q4 <= 2^p4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CardinalityGapBounds {
    pub p3: u64,
    pub q3: u64,
    pub p4: u64,
    pub q4: u64,
}

/// The gap bounds used by the cardinality-implication rewrite, found by
/// [`search_gap_bounds`] and pinned here.
pub const GAP_BOUNDS: CardinalityGapBounds = CardinalityGapBounds { p3: 3, q3: 2, p4: 8, q4: 5 };

impl CardinalityGapBounds {
    /// `card(Y) = y` admits some `card(U) = u` in the gadget.
    pub fn admits(&self, y: u64, u: u64) -> bool {
        big_pow(y, self.p3) <= big_pow(u, self.q3) && big_pow(u, self.q4) <= big_pow(y, self.p4)
    }

    /// Exhaustive exact check of the defining properties.
    pub fn is_valid(&self) -> bool {
        if !self.admits(2, 3) {
            return false;
        }
        // any admissible u satisfies u^q4 <= 3^p4, so u <= 3^p4
        let cap = big_pow(3, self.p4);
        let mut u = 1u64;
        while big_pow(u, self.q4) <= cap {
            if self.admits(3, u) {
                return false;
            }
            u += 1;
        }
        true
    }
}

/// Searches denominators in order of `q3 + q4`, taking the tightest numerators.
pub fn search_gap_bounds(max_q: u64) -> Option<CardinalityGapBounds> {
    for total in 2..=2 * max_q {
        for q3 in 1..total {
            let q4 = total - q3;
            if q3 > max_q || q4 > max_q {
                continue;
            }
            // largest p3 with 2^p3 < 3^q3, smallest p4 with 2^p4 > 3^q4
            let p3 = big_pow(3, q3).bits() - 1;
            let p4 = big_pow(3, q4).bits();
            let cand = CardinalityGapBounds { p3, q3, p4, q4 };
            if cand.is_valid() {
                return Some(cand);
            }
        }
    }
    None
}

/// `⌊log2 r⌋`.
pub fn floor_log2(r: u64) -> u64 {
    assert!(r >= 1);
    63 - r.leading_zeros() as u64
}

/// Exact check of `r^{1/⌊log r⌋} < 4`, i.e. `r < 4^{⌊log r⌋}`.
pub fn root_below_four(r: u64) -> bool {
    let e = floor_log2(r);
    e >= 1 && BigUint::from(r) < big_pow(4, e)
}

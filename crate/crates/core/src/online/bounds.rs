//! Mistake ceilings, forced floors and the Hedge regret bound.

/// ⌊4·M·ln(2(k+1))⌋ for the fully informative reduction.
pub fn fi_ceiling(m: usize, k: usize) -> usize {
    (4.0 * m as f64 * (2.0 * (k as f64 + 1.0)).ln()).floor() as usize
}

/// ⌊4·k·M·ln(2(k+1))⌋ for the post-manipulation reduction.
pub fn pmf_ceiling(m: usize, k: usize) -> usize {
    (4.0 * k as f64 * m as f64 * (2.0 * (k as f64 + 1.0)).ln()).floor() as usize
}

/// ⌈log2|G|⌉ + ⌊8k·M·ln(2(2k+1))⌋ for the unknown-graph learner.
pub fn ug_ceiling(m: usize, k: usize, graphs: usize) -> usize {
    let log = if graphs <= 1 {
        0
    } else {
        (usize::BITS - (graphs - 1).leading_zeros()) as usize
    };
    log + (8.0 * k as f64 * m as f64 * (2.0 * (2.0 * k as f64 + 1.0)).ln()).floor() as usize
}

/// d·log2 k mistakes forced on the binary-representation fixture.
pub fn binrep_floor(d: usize, k: usize) -> usize {
    d * k.trailing_zeros() as usize
}

/// d(k−1) mistakes forced on d stars.
pub fn star_floor(d: usize, k: usize) -> usize {
    d * k.saturating_sub(1)
}

/// n−1 mistakes forced by the unknown-graph constructions.
pub fn ug_floor(n: usize) -> usize {
    n.saturating_sub(1)
}

/// sqrt(T·ln N / 2).
pub fn hedge_regret_bound(horizon: usize, experts: usize) -> f64 {
    (horizon as f64 * (experts.max(1) as f64).ln() / 2.0).sqrt()
}

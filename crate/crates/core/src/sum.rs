//! Order-fixed pairwise summation.
//!
//! Every quadrature in the crate goes through [`pairwise_sum`] so that results
//! are reproducible bit for bit regardless of how the caller produced the terms.

const BLOCK: usize = 32;

/// Sums `terms` with a cascade of pairwise additions over blocks of 32 values.
///
/// No allocation: partial sums are kept in a binary-counter stack, so the
/// rounding error grows like `O(log n)` instead of `O(n)`.
pub fn pairwise_sum<I>(terms: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut levels = [0.0f64; 64];
    let mut occupied: u64 = 0;
    let mut block = 0.0;
    let mut in_block = 0usize;

    for t in terms {
        block += t;
        in_block += 1;
        if in_block == BLOCK {
            let mut carry = block;
            let mut level = 0;
            while occupied & (1 << level) != 0 {
                carry += levels[level];
                occupied &= !(1 << level);
                level += 1;
            }
            levels[level] = carry;
            occupied |= 1 << level;
            block = 0.0;
            in_block = 0;
        }
    }

    let mut total = block;
    for (level, value) in levels.iter().enumerate() {
        if occupied & (1 << level) != 0 {
            total += value;
        }
    }
    total
}

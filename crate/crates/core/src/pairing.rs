//! Cantor pairing `ℕ × ℕ → ℕ`, used to flatten row/column vertices to codes.

use num_bigint::BigUint;

/// `(i + j)(i + j + 1) / 2 + j`.
pub fn pair(i: &BigUint, j: &BigUint) -> BigUint {
    let d = i + j;
    ((&d * (&d + 1u32)) >> 1) + j
}

pub fn unpair(z: &BigUint) -> (BigUint, BigUint) {
    let w = ((z * 8u32 + 1u32).sqrt() - 1u32) >> 1;
    let t = (&w * (&w + 1u32)) >> 1;
    let j = z - t;
    let i = w - &j;
    (i, j)
}

/// Small-argument convenience used by tests and the CLI.
pub fn pair_u64(i: u64, j: u64) -> BigUint {
    pair(&BigUint::from(i), &BigUint::from(j))
}

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest order for which signed Stirling numbers are tabulated.
pub const STIRLING_MAX: usize = 20;

fn stirling_table() -> &'static [Vec<i128>] {
    static TABLE: OnceLock<Vec<Vec<i128>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // s(n, k): x(x-1)...(x-n+1) = Σ_k s(n, k) x^k
        let mut t = vec![vec![0i128; STIRLING_MAX + 1]; STIRLING_MAX + 1];
        t[0][0] = 1;
        for n in 0..STIRLING_MAX {
            for k in 0..=n + 1 {
                let left = if k > 0 { t[n][k - 1] } else { 0 };
                let right = if k <= n { t[n][k] } else { 0 };
                t[n + 1][k] = left - n as i128 * right;
            }
        }
        t
    })
}

/// Signed Stirling number of the first kind `S^{(i)}_λ`, the coefficient of
/// `x^i` in the falling factorial `x(x-1)...(x-λ+1)`.
pub fn stirling_first(i: usize, lambda: usize) -> Result<i128> {
    if lambda > STIRLING_MAX {
        return Err(Error::OutOfRange {
            what: "Stirling order",
            value: lambda,
            max: STIRLING_MAX,
        });
    }
    if i > lambda {
        return Err(Error::OutOfRange {
            what: "Stirling index",
            value: i,
            max: lambda,
        });
    }
    Ok(stirling_table()[lambda][i])
}

/// `n!! = n (n-2) (n-4) ...`, with `0!! = 1!! = 1`.
pub fn double_factorial(n: usize) -> Result<u128> {
    let mut acc: u128 = 1;
    let mut k = n;
    while k > 1 {
        acc = acc.checked_mul(k as u128).ok_or(Error::OutOfRange {
            what: "double factorial argument",
            value: n,
            max: 56,
        })?;
        k -= 2;
    }
    Ok(acc)
}

/// Binomial coefficient, exact.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    acc
}

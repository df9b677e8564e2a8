use num_bigint::BigInt;
use num_traits::One;

use super::{ResidueMat, ResidueRing, VerifyError};

/// Default bound on the number of candidate matrices enumerated.
pub const DEFAULT_ENUM_CAP: u64 = 100_000_000;

/// Rings up to this size may be enumerated outright.
pub const ENUM_RING_LIMIT: u64 = 49;

/// How an ambient order was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderMethod {
    Enumerated,
    Counted,
}

/// `|SL(n, F_q)|`, counting admissible columns one at a time: column `j`
/// of an invertible matrix avoids the `q^j` vectors spanned by the
/// earlier ones, and fixing the determinant divides by `q - 1`.
pub fn sl_order_field(q: &BigInt, n: usize) -> BigInt {
    let qn = q.pow(n as u32);
    let gl = (0..n).fold(BigInt::one(), |acc, j| acc * (&qn - q.pow(j as u32)));
    gl / (q - 1)
}

/// `|SL(n, R)|` for `R` a product of finite fields.
pub fn count_sl_order(ring: &ResidueRing, n: usize) -> Option<BigInt> {
    let degrees = ring.factor_degrees()?;
    let p = BigInt::from(ring.p());
    Some(
        degrees
            .iter()
            .fold(BigInt::one(), |acc, &d| acc * sl_order_field(&p.pow(d as u32), n)),
    )
}

/// Counts determinant-one matrices by brute force, or `None` when there
/// are more than `cap` candidates.
pub fn enumerate_sl_order(ring: &ResidueRing, n: usize, cap: u64) -> Option<u64> {
    let q = ring.size();
    let cells = (n * n) as u32;
    let total = q.checked_pow(cells).filter(|&t| t <= cap)?;
    let mut m = ResidueMat {
        n,
        entries: vec![0; n * n],
    };
    let mut count = 0u64;
    for _ in 0..total {
        if m.det(ring) == 1 {
            count += 1;
        }
        // odometer increment
        for e in m.entries.iter_mut() {
            *e += 1;
            if u64::from(*e) < q {
                break;
            }
            *e = 0;
        }
    }
    Some(count)
}

/// Exact `|SL(n, R)|`: enumerated for rings of at most 49 elements (within
/// `cap`), counted from the factorization of `f mod p` otherwise.
pub fn ambient_order(ring: &ResidueRing, n: usize, cap: u64) -> Result<(BigInt, OrderMethod), VerifyError> {
    if ring.size() <= ENUM_RING_LIMIT {
        if let Some(c) = enumerate_sl_order(ring, n, cap) {
            return Ok((BigInt::from(c), OrderMethod::Enumerated));
        }
    }
    count_sl_order(ring, n)
        .map(|c| (c, OrderMethod::Counted))
        .ok_or(VerifyError::CapExceeded)
}

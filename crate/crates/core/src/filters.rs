//! Necessary arithmetic conditions on the order of a simple left brace.

use serde::{Deserialize, Serialize};

use crate::error::{BraceError, Result};

/// Prime factorization by trial division, primes ascending.
pub fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Multiplicative order of `a` modulo the prime `q`, or `None` if `q | a`.
pub fn multiplicative_order_mod(a: u64, q: u64) -> Option<u64> {
    let a = a % q;
    if a == 0 {
        return None;
    }
    let mut x = a;
    let mut k = 1;
    while x != 1 % q {
        x = (x as u128 * a as u128 % q as u128) as u64;
        k += 1;
    }
    Some(k)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OrderVerdict {
    Possible,
    Impossible { reason: String },
}

impl OrderVerdict {
    pub fn is_possible(&self) -> bool {
        matches!(self, OrderVerdict::Possible)
    }
}

/// Screens `n` as the order of a simple left brace. `Possible` means only
/// that no known obstruction applies.
pub fn order_filter(n: u64) -> Result<OrderVerdict> {
    if n < 2 {
        return Err(BraceError::InvalidParameter(format!("order must be at least 2, got {n}")));
    }
    let factors = prime_factors(n);
    if factors.len() == 1 {
        let (p, e) = factors[0];
        return Ok(if e == 1 {
            OrderVerdict::Possible
        } else {
            OrderVerdict::Impossible { reason: format!("prime power order {p}^{e}: simple braces of prime power order have prime order") }
        });
    }
    for &(q, _) in &factors {
        let witness = factors.iter().any(|&(p, e)| {
            p != q && multiplicative_order_mod(p, q).is_some_and(|t| t <= u64::from(e))
        });
        if !witness {
            return Ok(OrderVerdict::Impossible {
                reason: format!("no prime p with {q} | p^t - 1 and p^t dividing the {q}'-part"),
            });
        }
    }
    if let [(a, ea), (b, eb)] = factors[..] {
        for (p, n_exp, q, q_exp) in [(a, ea, b, eb), (b, eb, a, ea)] {
            if q_exp == 1 && multiplicative_order_mod(p, q) == Some(u64::from(n_exp)) {
                return Ok(OrderVerdict::Impossible {
                    reason: format!("normal Sylow obstruction: order {p}^{n_exp}*{q} with {n_exp} the order of {p} mod {q}"),
                });
            }
        }
    }
    Ok(OrderVerdict::Possible)
}

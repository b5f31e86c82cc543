//! The generalized totient `phi_P(n) = #{0 <= k < n : gcd(P(k), n) = 1}`.
//!
//! Two independent routes: a brute-force count straight from the definition,
//! and the product formula `phi_P(n) = n * prod_{p | n} (1 - f(p)/p)` with
//! `f(p)` the number of roots of `P` modulo `p`.

use rayon::prelude::*;
use serde::Serialize;

use crate::modular::count_distinct_roots;
use crate::polynomial::{check_modulus, horner_mod, Polynomial};
use crate::primes::{primes_up_to, FactoredInteger, SieveConfig, SmallestPrimeFactor};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TotientMethod {
    Bruteforce,
    Lemma,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TotientResult {
    pub n: u64,
    pub value: u64,
    pub method: TotientMethod,
    /// `(p, f(p))` for each distinct prime `p | n`; empty for brute force.
    pub per_prime: Vec<(u64, u64)>,
}

fn binary_gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

const BRUTE_CHUNK: u64 = 1 << 16;

/// Counts `k` in `[0, n)` with `gcd(P(k) mod n, n) = 1`; `gcd(0, n) = n`, so
/// roots of `P` modulo `n` never count.
pub fn phi_p_bruteforce(poly: &Polynomial, n: u64) -> Result<TotientResult> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("phi_P(n) needs n >= 2, got {n}")));
    }
    check_modulus(n)?;
    let residues = poly.residues(n);
    let count_range = |lo: u64, hi: u64| {
        (lo..hi)
            .filter(|&k| binary_gcd(horner_mod(&residues, k, n), n) == 1)
            .count() as u64
    };
    let value = if n <= BRUTE_CHUNK {
        count_range(0, n)
    } else {
        (0..n.div_ceil(BRUTE_CHUNK))
            .into_par_iter()
            .map(|c| count_range(c * BRUTE_CHUNK, ((c + 1) * BRUTE_CHUNK).min(n)))
            .sum()
    };
    Ok(TotientResult {
        n,
        value,
        method: TotientMethod::Bruteforce,
        per_prime: Vec::new(),
    })
}

/// `n * prod (p - f(p)) / prod p`, dividing before multiplying so every step
/// is exact.
fn product_formula(n: u64, per_prime: &[(u64, u64)]) -> u64 {
    let mut value = n as u128;
    for &(p, f) in per_prime {
        assert!(value % p as u128 == 0, "{p} does not divide the running value");
        assert!(f <= p, "f({p}) = {f} exceeds p");
        value = value / p as u128 * (p - f) as u128;
    }
    assert!(value <= n as u128);
    value as u64
}

/// `phi_P(n)` from the factorization of `n` and the root counts `f(p)`.
pub fn phi_p_lemma(poly: &Polynomial, n: &FactoredInteger) -> Result<TotientResult> {
    let per_prime = n
        .distinct_primes()
        .map(|p| Ok((p, count_distinct_roots(poly, p)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TotientResult {
        n: n.n(),
        value: product_formula(n.n(), &per_prime),
        method: TotientMethod::Lemma,
        per_prime,
    })
}

/// `phi_P(n)` for every `2 <= n <= limit`, built multiplicatively from the
/// smallest-prime-factor table:
/// `phi_P(p^e m) = p^(e-1) (p - f(p)) phi_P(m)` for `p` not dividing `m`.
#[derive(Debug, Clone)]
pub struct TotientTable {
    values: Vec<u32>,
    spf: SmallestPrimeFactor,
}

const ROOT_CHUNK: usize = 1024;

pub fn phi_p_batch(poly: &Polynomial, limit: u64, config: &SieveConfig) -> Result<TotientTable> {
    if limit < 2 {
        return Err(Error::InvalidArgument(format!("batch limit must be >= 2, got {limit}")));
    }
    let spf = SmallestPrimeFactor::new(limit, config)?;
    let primes = primes_up_to(limit, config)?;
    let roots: Vec<u64> = primes
        .par_chunks(ROOT_CHUNK)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&p| count_distinct_roots(poly, p))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .concat();

    let mut values = vec![0u32; limit as usize + 1];
    values[1] = 1;
    for (&p, &f) in primes.iter().zip(&roots) {
        values[p as usize] = (p - f) as u32;
    }
    for n in 4..=limit as usize {
        let p = spf.get(n as u64) as usize;
        if p == n {
            continue;
        }
        let rest = n / p;
        values[n] = if rest % p == 0 {
            values[rest] * p as u32
        } else {
            values[rest] * values[p]
        };
    }
    Ok(TotientTable { values, spf })
}

impl TotientTable {
    pub fn limit(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    /// `phi_P(n)` for `2 <= n <= limit`.
    pub fn get(&self, n: u64) -> u64 {
        assert!(n >= 2 && n <= self.limit(), "{n} outside table");
        self.values[n as usize] as u64
    }

    /// `f(p)` for a prime `p <= limit`.
    pub fn root_count(&self, p: u64) -> u64 {
        debug_assert_eq!(self.spf.get(p), p);
        p - self.values[p as usize] as u64
    }

    pub fn factor(&self, n: u64) -> FactoredInteger {
        self.spf.factor(n)
    }

    /// Results for `n = 2..=limit`, ascending.
    pub fn results(&self) -> impl Iterator<Item = TotientResult> + '_ {
        (2..=self.limit()).map(|n| TotientResult {
            n,
            value: self.get(n),
            method: TotientMethod::Lemma,
            per_prime: self
                .factor(n)
                .distinct_primes()
                .map(|p| (p, self.root_count(p)))
                .collect(),
        })
    }
}

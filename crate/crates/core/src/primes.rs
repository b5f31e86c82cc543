//! Prime generation and 64-bit factorization.
//!
//! The sieve stores odd numbers only, one bit each, and works over fixed-size
//! segments. Segments are independent, so they are sieved in parallel and
//! concatenated in order; the output does not depend on the thread count.

use rayon::prelude::*;

use crate::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 100_000_000;
pub const DEFAULT_SEGMENT_BITS: usize = 1 << 18;

/// Factors below this bound are removed by trial division before
/// Miller-Rabin and Pollard rho take over.
pub const TRIAL_DIVISION_LIMIT: u64 = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Largest limit any sieve or table may be asked for.
    pub budget: u64,
    /// Odd numbers covered by one segment.
    pub segment_bits: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            segment_bits: DEFAULT_SEGMENT_BITS,
        }
    }
}

impl SieveConfig {
    pub fn with_budget(budget: u64) -> Self {
        Self {
            budget,
            ..Self::default()
        }
    }

    pub fn check(&self, limit: u64) -> Result<()> {
        if limit > self.budget {
            Err(Error::BudgetExceeded {
                limit,
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// Plain odd-only sieve for the base primes of the segmented sieve.
fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let len = (limit as usize + 1) / 2;
    // composite[i] refers to 2i + 1
    let mut composite = vec![false; len];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < len {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = vec![2];
    out.extend((1..len).filter(|&i| !composite[i]).map(|i| 2 * i as u64 + 1));
    out
}

fn sieve_segment(lo: u64, bits: usize, hi: u64, base: &[u64]) -> Vec<u64> {
    // bit i stands for lo + 2i; lo is odd
    let mut words = vec![0u64; bits.div_ceil(64)];
    for &q in base.iter().skip(1) {
        if q * q > hi {
            break;
        }
        let mut start = (q * q).max(lo.div_ceil(q) * q);
        if start % 2 == 0 {
            start += q;
        }
        let mut idx = ((start - lo) / 2) as usize;
        while idx < bits {
            words[idx / 64] |= 1 << (idx % 64);
            idx += q as usize;
        }
    }
    let mut out = Vec::new();
    for (w, &word) in words.iter().enumerate() {
        let mut free = !word;
        while free != 0 {
            let idx = w * 64 + free.trailing_zeros() as usize;
            free &= free - 1;
            if idx >= bits {
                break;
            }
            let v = lo + 2 * idx as u64;
            if v > hi {
                break;
            }
            out.push(v);
        }
    }
    out
}

/// All primes `<= limit`, ascending.
pub fn primes_up_to(limit: u64, config: &SieveConfig) -> Result<Vec<u64>> {
    config.check(limit)?;
    if limit < 3 {
        return Ok(if limit == 2 { vec![2] } else { Vec::new() });
    }
    let base = small_primes(isqrt(limit));
    let bits = config.segment_bits.max(64);
    let span = 2 * bits as u64;
    // odd numbers from 3 upward
    let segments = (limit - 3) / span + 1;
    let parts: Vec<Vec<u64>> = (0..segments)
        .into_par_iter()
        .map(|s| {
            let lo = 3 + s * span;
            let hi = (lo + span - 2).min(limit);
            let seg_bits = ((hi - lo) / 2 + 1) as usize;
            sieve_segment(lo, seg_bits, hi, &base)
        })
        .collect();
    let mut out = Vec::with_capacity(parts.iter().map(Vec::len).sum::<usize>() + 1);
    out.push(2);
    for part in parts {
        out.extend(part);
    }
    Ok(out)
}

/// Least prime factor of every `2 <= m <= limit`.
#[derive(Debug, Clone)]
pub struct SmallestPrimeFactor {
    table: Vec<u32>,
}

impl SmallestPrimeFactor {
    pub fn new(limit: u64, config: &SieveConfig) -> Result<Self> {
        config.check(limit)?;
        if limit > u32::MAX as u64 {
            return Err(Error::BudgetExceeded {
                limit,
                budget: u32::MAX as u64,
            });
        }
        let n = limit as usize;
        let mut table = vec![0u32; n + 1];
        for p in 2..=n {
            if table[p] != 0 {
                continue;
            }
            table[p] = p as u32;
            let mut m = p.saturating_mul(p);
            while m <= n {
                if table[m] == 0 {
                    table[m] = p as u32;
                }
                m += p;
            }
        }
        Ok(Self { table })
    }

    pub fn limit(&self) -> u64 {
        (self.table.len() - 1) as u64
    }

    /// Least prime factor of `m`; `m` must lie in `[2, limit]`.
    pub fn get(&self, m: u64) -> u64 {
        assert!(m >= 2 && m <= self.limit(), "{m} outside table");
        self.table[m as usize] as u64
    }

    pub fn factor(&self, mut m: u64) -> FactoredInteger {
        let n = m;
        let mut factors: Vec<(u64, u32)> = Vec::new();
        while m > 1 {
            let p = self.get(m);
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        FactoredInteger { n, factors }
    }
}

/// An integer `n >= 2` together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    /// Checks the factorization: strictly increasing primes, positive
    /// exponents, and an exact product.
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        let bad = |why: &str| Error::InvalidArgument(format!("bad factorization: {why}"));
        if factors.is_empty() {
            return Err(bad("n must be at least 2"));
        }
        let mut n: u64 = 1;
        for (i, &(p, e)) in factors.iter().enumerate() {
            if e == 0 || !is_prime(p) {
                return Err(bad("factors must be primes with positive exponent"));
            }
            if i > 0 && factors[i - 1].0 >= p {
                return Err(bad("primes must be strictly increasing"));
            }
            let pe = p.checked_pow(e).ok_or_else(|| bad("product overflows"))?;
            n = n.checked_mul(pe).ok_or_else(|| bad("product overflows"))?;
        }
        Ok(Self { n, factors })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn distinct_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn radical(&self) -> u64 {
        self.distinct_primes().product()
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

/// Montgomery arithmetic modulo an odd `n < 2^64`.
#[derive(Clone, Copy)]
struct Montgomery {
    n: u64,
    n_inv: u64, // -n^{-1} mod 2^64
    r2: u64,    // 2^128 mod n
}

impl Montgomery {
    fn new(n: u64) -> Self {
        debug_assert!(n % 2 == 1);
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(n.wrapping_mul(inv)));
        }
        let r2 = ((u128::MAX % n as u128) + 1) % n as u128;
        Self {
            n,
            n_inv: inv.wrapping_neg(),
            r2: r2 as u64,
        }
    }

    fn reduce(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.n_inv);
        let (sum, carry) = t.overflowing_add(m as u128 * self.n as u128);
        let mut r = (sum >> 64) as u64;
        if carry {
            r = r.wrapping_add(0u64.wrapping_sub(self.n));
        } else if r >= self.n {
            r -= self.n;
        }
        r
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.n, self.r2)
    }

    fn one(&self) -> u64 {
        self.to_mont(1)
    }

    fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        let (s, carry) = a.overflowing_add(b);
        if carry || s >= self.n {
            s.wrapping_sub(self.n)
        } else {
            s
        }
    }
}

const MR_BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let mont = Montgomery::new(n);
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let one = mont.one();
    let minus_one = mont.to_mont(n - 1);
    'witness: for &a in &MR_BASES {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = mont.pow(mont.to_mont(a), d);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = mont.mul(x, x);
            if x == minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Brent's variant of Pollard rho; returns a nontrivial factor of the odd
/// composite `n`.
fn pollard_brent(n: u64) -> u64 {
    let mont = Montgomery::new(n);
    const BATCH: u64 = 128;
    for c in 1u64.. {
        let c_m = mont.to_mont(c);
        let step = |v: u64| mont.add(mont.mul(v, v), c_m);
        let mut y = mont.to_mont(2);
        let mut q = mont.one();
        let mut g = 1;
        let mut r = 1u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = step(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = step(y);
                    q = mont.mul(q, x.abs_diff(y));
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = step(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn collect_prime_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    collect_prime_factors(d, out);
    collect_prime_factors(n / d, out);
}

/// Complete factorization of `n >= 2`.
pub fn factorize(n: u64) -> Result<FactoredInteger> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("cannot factor {n}: need n >= 2")));
    }
    let mut rest = n;
    let mut found: Vec<u64> = Vec::new();
    while rest % 2 == 0 {
        rest /= 2;
        found.push(2);
    }
    let mut p = 3;
    while p < TRIAL_DIVISION_LIMIT && p * p <= rest {
        while rest % p == 0 {
            rest /= p;
            found.push(p);
        }
        p += 2;
    }
    if rest > 1 {
        collect_prime_factors(rest, &mut found);
    }
    found.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for q in found {
        match factors.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => factors.push((q, 1)),
        }
    }
    Ok(FactoredInteger { n, factors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_limits() {
        let cfg = SieveConfig::default();
        assert_eq!(primes_up_to(10, &cfg).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(2, &cfg).unwrap(), vec![2]);
        assert_eq!(primes_up_to(3, &cfg).unwrap(), vec![2, 3]);
        assert!(primes_up_to(1, &cfg).unwrap().is_empty());
        assert_eq!(
            primes_up_to(11, &SieveConfig::with_budget(10)),
            Err(Error::BudgetExceeded { limit: 11, budget: 10 })
        );
    }

    #[test]
    fn segment_boundaries() {
        // tiny segments put many primes right at segment edges
        let cfg = SieveConfig {
            segment_bits: 64,
            ..SieveConfig::default()
        };
        for limit in [127, 128, 129, 130, 131, 257, 1000] {
            assert_eq!(
                primes_up_to(limit, &cfg).unwrap(),
                small_primes(limit),
                "limit {limit}"
            );
        }
    }

    #[test]
    fn spf_examples() {
        let spf = SmallestPrimeFactor::new(100, &SieveConfig::default()).unwrap();
        assert_eq!(spf.get(9), 3);
        assert_eq!(spf.get(97), 97);
        assert_eq!(spf.get(91), 7);
        assert_eq!(spf.get(2), 2);
        assert_eq!(spf.factor(60).factors(), &[(2, 2), (3, 1), (5, 1)]);
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(60).unwrap().factors(), &[(2, 2), (3, 1), (5, 1)]);
        let m61 = (1u64 << 61) - 1;
        assert!(factorize(m61).unwrap().is_prime());
        assert!(factorize(1_000_000_007).unwrap().is_prime());
        assert_eq!(
            factorize(1470626929934143021).unwrap().factors(),
            &[(1206429347, 1), (1218991343, 1)]
        );
        assert_eq!(factorize(u64::MAX).unwrap().radical(), u64::MAX);
        assert!(factorize(1).is_err());
    }

    #[test]
    fn miller_rabin_agrees_with_trial_division() {
        let trial = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..20_000 {
            assert_eq!(is_prime(n), trial(n), "{n}");
        }
        // strong pseudoprimes to several small bases
        for n in [3215031751u64, 2152302898747, 3474749660383, 341550071728321] {
            assert!(!is_prime(n));
        }
        assert!(is_prime(18446744073709551557));
    }

    #[test]
    fn factored_integer_validation() {
        assert!(FactoredInteger::from_factors(vec![(2, 1), (3, 2)]).is_ok());
        assert!(FactoredInteger::from_factors(vec![(3, 1), (2, 1)]).is_err());
        assert!(FactoredInteger::from_factors(vec![(4, 1)]).is_err());
        assert!(FactoredInteger::from_factors(vec![(2, 0)]).is_err());
        assert!(FactoredInteger::from_factors(vec![]).is_err());
    }
}

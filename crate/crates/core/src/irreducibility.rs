//! Layered irreducibility screen over `Q`.
//!
//! This is not a decision procedure. Layers run in this order and the first
//! conclusive one wins:
//!
//! 1. rational roots (a root `a/b` yields the factor `bx - a`),
//! 2. Eisenstein at shift 0 for primes up to 100,
//! 3. irreducibility modulo primes up to 50 not dividing `lc(P)`,
//! 4. Eisenstein on `P(x + s)` for `0 < |s| <= 10`,
//! 5. Kronecker's interpolation search for quadratic factors of quartics,
//! 6. for degree <= 3, the absence of rational roots already settles it.
//!
//! Anything else is reported as [`Status::Unknown`].

use serde::Serialize;

use crate::modular::FpPoly;
use crate::polynomial::Polynomial;
use crate::primes::{factorize, primes_up_to, SieveConfig};

const EISENSTEIN_PRIME_LIMIT: u64 = 100;
const MOD_P_PRIME_LIMIT: u64 = 50;
const MAX_SHIFT: i64 = 10;
const MAX_RATIONAL_CANDIDATES: usize = 1_000_000;
const KRONECKER_VALUE_LIMIT: u64 = 10_000_000;
const MAX_KRONECKER_TRIPLES: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    ProvenIrreducible,
    ProvenReducible,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    RationalRoot,
    EisensteinShift,
    ModP,
    Kronecker,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `factor * cofactor == P` exactly.
    Factor {
        factor: Polynomial,
        cofactor: Polynomial,
    },
    /// `P` is irreducible modulo this prime.
    Prime(u64),
    /// `P(x + shift)` is Eisenstein at `prime`.
    EisensteinShift { prime: u64, shift: i64 },
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::Factor { factor, cofactor } => {
                write!(f, "({}) * ({})", factor.pretty(), cofactor.pretty())
            }
            Witness::Prime(p) => write!(f, "irreducible mod {p}"),
            Witness::EisensteinShift { prime, shift } => {
                write!(f, "Eisenstein at p={prime} after x -> x + {shift}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub method: Method,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn irreducible(method: Method, witness: Option<Witness>) -> Self {
        Self {
            status: Status::ProvenIrreducible,
            method,
            witness,
        }
    }

    fn reducible(method: Method, factor: Polynomial, cofactor: Polynomial) -> Self {
        Self {
            status: Status::ProvenReducible,
            method,
            witness: Some(Witness::Factor { factor, cofactor }),
        }
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    if n < 2 {
        return out;
    }
    for &(p, e) in factorize(n).expect("n >= 2").factors() {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Searches for a linear factor `bx - a` with `a | P(0)` and `b | lc(P)`.
/// `Err(())` means the candidate set was too large to enumerate.
fn find_linear_factor(poly: &Polynomial) -> Result<Option<(Polynomial, Polynomial)>, ()> {
    if poly.constant_term() == 0 {
        let q = poly.div_exact(&Polynomial::x()).expect("x divides P");
        return Ok(Some((Polynomial::x(), q)));
    }
    let nums = divisors(poly.constant_term().unsigned_abs());
    let dens = divisors(poly.leading_coeff().unsigned_abs());
    if nums.len().saturating_mul(dens.len()) > MAX_RATIONAL_CANDIDATES {
        return Err(());
    }
    for &b in &dens {
        for &a in &nums {
            if gcd(a, b) != 1 {
                continue;
            }
            for a in [a as i64, -(a as i64)] {
                let Ok(factor) = Polynomial::new(vec![-a, b as i64]) else {
                    continue;
                };
                if let Some(q) = poly.div_exact(&factor) {
                    return Ok(Some((factor, q)));
                }
            }
        }
    }
    Ok(None)
}

fn is_eisenstein(poly: &Polynomial, p: u64) -> bool {
    let c = poly.coeffs();
    let divides = |v: i64| v.unsigned_abs() % p == 0;
    let (lc, rest) = c.split_last().unwrap();
    !divides(*lc)
        && rest.iter().all(|&v| divides(v))
        && (c[0].unsigned_abs() as u128) % (p as u128 * p as u128) != 0
}

fn eisenstein_at_shift(poly: &Polynomial, shift: i64, primes: &[u64]) -> Option<Verdict> {
    let shifted = poly.shift(shift).ok()?;
    primes.iter().find(|&&p| is_eisenstein(&shifted, p)).map(|&p| {
        Verdict::irreducible(
            Method::EisensteinShift,
            Some(Witness::EisensteinShift { prime: p, shift }),
        )
    })
}

/// Kronecker search for a quadratic factor of a quartic, interpolating
/// through divisors of `P(0)`, `P(1)`, `P(-1)`. `None` means inconclusive.
fn kronecker_quartic(poly: &Polynomial) -> Option<Verdict> {
    let values = [0i128, 1, -1].map(|k| poly.eval_exact(k).ok());
    let values: Vec<i128> = values.into_iter().collect::<Option<_>>()?;
    if values
        .iter()
        .any(|&v| v == 0 || v.unsigned_abs() > KRONECKER_VALUE_LIMIT as u128)
    {
        return None;
    }
    let divs: Vec<Vec<u64>> = values
        .iter()
        .map(|&v| divisors(v.unsigned_abs() as u64))
        .collect();
    let triples = 4 * divs.iter().map(Vec::len).product::<usize>();
    if triples > MAX_KRONECKER_TRIPLES {
        return None;
    }
    let lc = poly.leading_coeff().unsigned_abs() as i128;
    // g(0) = v0 > 0 fixes the overall sign; g = a x^2 + b x + c through
    // g(0) = v0, g(1) = v1, g(-1) = vm
    for &v0 in &divs[0] {
        for &d1 in &divs[1] {
            for &dm in &divs[2] {
                for (s1, sm) in [(1i128, 1i128), (1, -1), (-1, 1), (-1, -1)] {
                    let (v0, v1, vm) = (v0 as i128, s1 * d1 as i128, sm * dm as i128);
                    if (v1 + vm) % 2 != 0 {
                        continue;
                    }
                    let a = (v1 + vm) / 2 - v0;
                    let b = (v1 - vm) / 2;
                    if a == 0 || lc % a != 0 {
                        continue;
                    }
                    let Ok(g) = Polynomial::new(vec![v0 as i64, b as i64, a as i64]) else {
                        continue;
                    };
                    if let Some(q) = poly.div_exact(&g) {
                        return Some(Verdict::reducible(Method::Kronecker, g, q));
                    }
                }
            }
        }
    }
    Some(Verdict::irreducible(Method::Kronecker, None))
}

pub fn check_irreducible(poly: &Polynomial) -> Verdict {
    let d = poly.degree();
    if d == 0 {
        return Verdict {
            status: Status::Unknown,
            method: Method::None,
            witness: None,
        };
    }
    if d == 1 {
        return Verdict::irreducible(Method::RationalRoot, None);
    }
    let rational = find_linear_factor(poly);
    if let Ok(Some((factor, cofactor))) = rational {
        return Verdict::reducible(Method::RationalRoot, factor, cofactor);
    }
    let no_rational_root = rational.is_ok();

    let primes = primes_up_to(EISENSTEIN_PRIME_LIMIT, &SieveConfig::default()).expect("tiny sieve");
    if let Some(v) = eisenstein_at_shift(poly, 0, &primes) {
        return v;
    }

    let lc = poly.leading_coeff().unsigned_abs();
    for &p in primes.iter().take_while(|&&p| p <= MOD_P_PRIME_LIMIT) {
        if lc % p != 0 && FpPoly::reduce(poly, p).is_irreducible() {
            return Verdict::irreducible(Method::ModP, Some(Witness::Prime(p)));
        }
    }

    for s in 1..=MAX_SHIFT {
        for shift in [s, -s] {
            if let Some(v) = eisenstein_at_shift(poly, shift, &primes) {
                return v;
            }
        }
    }

    if d == 4 && no_rational_root {
        if let Some(v) = kronecker_quartic(poly) {
            return v;
        }
    }

    if d <= 3 && no_rational_root {
        return Verdict::irreducible(Method::RationalRoot, None);
    }

    Verdict {
        status: Status::Unknown,
        method: Method::None,
        witness: None,
    }
}

//! Root counts of an integer polynomial modulo a prime.
//!
//! `f(p)` is the number of distinct residues `k` with `P(k) = 0 mod p` and
//! `g(p)` the number of roots counted with multiplicity. Small primes are
//! handled by scanning every residue; larger ones by
//! `deg gcd(x^p - x, P mod p)`.

use serde::Serialize;

use crate::polynomial::{check_modulus, horner_mod, Polynomial};
use crate::primes::is_prime;
use crate::{Error, Result};

/// Primes up to this bound are handled by direct scan.
pub const SCAN_THRESHOLD: u64 = 4096;

/// Polynomial over `Z/pZ`, constant term first, no trailing zeros
/// (the zero polynomial is empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + (p - b)
    }
}

impl FpPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        let mut poly = Self { p, coeffs };
        poly.trim();
        poly
    }

    /// Reduction of an integer polynomial modulo `p`.
    pub fn reduce(poly: &Polynomial, p: u64) -> Self {
        let mut out = Self {
            p,
            coeffs: poly.residues(p),
        };
        out.trim();
        out
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, k: u64) -> u64 {
        horner_mod(&self.coeffs, k % self.p, self.p)
    }

    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&lc) => {
                let inv = inv_mod(lc, self.p);
                Self {
                    p: self.p,
                    coeffs: self.coeffs.iter().map(|&c| mul_mod(c, inv, self.p)).collect(),
                }
            }
        }
    }

    /// Remainder of `self` divided by the nonzero `divisor`.
    pub fn rem(&self, divisor: &Self) -> Self {
        let p = self.p;
        let dd = divisor.degree().expect("division by zero polynomial");
        let mut r = self.coeffs.clone();
        let lc_inv = inv_mod(divisor.coeffs[dd], p);
        while r.len() > dd {
            let top = *r.last().unwrap();
            if top != 0 {
                let q = mul_mod(top, lc_inv, p);
                let shift = r.len() - 1 - dd;
                for (j, &c) in divisor.coeffs.iter().enumerate() {
                    r[shift + j] = sub_mod(r[shift + j], mul_mod(q, c, p), p);
                }
            }
            r.pop();
        }
        Self::new(p, r)
    }

    /// `self * other mod modulus`.
    pub fn mul_rem(&self, other: &Self, modulus: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::new(self.p, Vec::new());
        }
        let p = self.p;
        let mut prod = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        Self::new(p, prod).rem(modulus)
    }

    /// `x^e mod modulus` by left-to-right square-and-multiply.
    pub fn pow_x_rem(e: u64, modulus: &Self) -> Self {
        let p = modulus.p;
        let x = Self::new(p, vec![0, 1]).rem(modulus);
        let mut acc = Self::new(p, vec![1]).rem(modulus);
        if e == 0 {
            return acc;
        }
        for bit in (0..64 - e.leading_zeros()).rev() {
            acc = acc.mul_rem(&acc, modulus);
            if (e >> bit) & 1 == 1 {
                acc = acc.mul_rem(&x, modulus);
            }
        }
        acc
    }

    pub fn sub(&self, other: &Self) -> Self {
        let p = self.p;
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
        let coeffs = (0..n)
            .map(|i| sub_mod(get(&self.coeffs, i), get(&other.coeffs, i), p))
            .collect();
        Self::new(p, coeffs)
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Exact quotient by the nonzero `divisor`; the remainder is discarded.
    pub fn div(&self, divisor: &Self) -> Self {
        let p = self.p;
        let dd = divisor.degree().expect("division by zero polynomial");
        let Some(deg) = self.degree() else {
            return self.clone();
        };
        if deg < dd {
            return Self::new(p, Vec::new());
        }
        let lc_inv = inv_mod(divisor.coeffs[dd], p);
        let mut r = self.coeffs.clone();
        let mut q = vec![0u64; deg - dd + 1];
        for i in (dd..=deg).rev() {
            let c = mul_mod(r[i], lc_inv, p);
            q[i - dd] = c;
            if c != 0 {
                for (j, &d) in divisor.coeffs.iter().enumerate() {
                    r[i - dd + j] = sub_mod(r[i - dd + j], mul_mod(c, d, p), p);
                }
            }
        }
        Self::new(p, q)
    }

    /// Divides by `(x - r)` if `r` is a root, by synthetic division.
    pub fn deflate(&self, r: u64) -> Option<Self> {
        let p = self.p;
        let deg = self.degree()?;
        if deg == 0 {
            return None;
        }
        let mut q = vec![0u64; deg];
        let mut carry = 0u64;
        for i in (0..=deg).rev() {
            let v = (self.coeffs[i] + mul_mod(carry, r, p)) % p;
            if i == 0 {
                return (v == 0).then(|| Self::new(p, q));
            }
            q[i - 1] = v;
            carry = v;
        }
        unreachable!()
    }

    /// Whether this polynomial is irreducible over `F_p`: it has no factor
    /// of degree `i <= deg/2`, i.e. `gcd(x^(p^i) - x, self) = 1` for each
    /// such `i`.
    pub fn is_irreducible(&self) -> bool {
        let Some(deg) = self.degree() else {
            return false;
        };
        if deg == 0 {
            return false;
        }
        let f = self.monic();
        let x = Self::new(self.p, vec![0, 1]).rem(&f);
        let mut frob = x.clone();
        for _ in 1..=deg / 2 {
            frob = pow_poly_rem(&frob, self.p, &f);
            if frob.sub(&x).gcd(&f).degree() != Some(0) {
                return false;
            }
        }
        true
    }
}

fn pow_poly_rem(base: &FpPoly, mut e: u64, modulus: &FpPoly) -> FpPoly {
    let mut acc = FpPoly::new(base.p, vec![1]).rem(modulus);
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul_rem(&b, modulus);
        }
        b = b.mul_rem(&b, modulus);
        e >>= 1;
    }
    acc
}

fn check_prime(p: u64) -> Result<()> {
    check_modulus(p)?;
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Residues `k` in `[0, p)` with `P(k) = 0 mod p`, by direct scan.
pub fn roots_by_scan(reduced: &FpPoly) -> Vec<u64> {
    let p = reduced.p;
    (0..p).filter(|&k| reduced.eval(k) == 0).collect()
}

/// `f(p)` by scanning every residue.
pub fn count_distinct_roots_scan(poly: &Polynomial, p: u64) -> Result<u64> {
    check_prime(p)?;
    let reduced = FpPoly::reduce(poly, p);
    if reduced.is_zero() {
        return Ok(p);
    }
    Ok(roots_by_scan(&reduced).len() as u64)
}

/// Product of `(x - r)` over the distinct roots `r` in `F_p`.
fn root_part(reduced: &FpPoly) -> FpPoly {
    let p = reduced.p;
    let frob = FpPoly::pow_x_rem(p, reduced);
    let x = FpPoly::new(p, vec![0, 1]);
    frob.sub(&x).rem(reduced).gcd(reduced)
}

/// `f(p)` as `deg gcd(x^p - x, P mod p)`.
pub fn count_distinct_roots_gcd(poly: &Polynomial, p: u64) -> Result<u64> {
    check_prime(p)?;
    let reduced = FpPoly::reduce(poly, p);
    Ok(match reduced.degree() {
        None => p,
        Some(0) => 0,
        Some(_) => root_part(&reduced).degree().unwrap() as u64,
    })
}

/// `f(p)`: the number of residues `k` in `[0, p)` with `p | P(k)`; equal to
/// `p` when `P` vanishes identically modulo `p`.
pub fn count_distinct_roots(poly: &Polynomial, p: u64) -> Result<u64> {
    if p <= SCAN_THRESHOLD {
        count_distinct_roots_scan(poly, p)
    } else {
        count_distinct_roots_gcd(poly, p)
    }
}

fn multiplicity_sum_by_deflation(reduced: &FpPoly, roots: &[u64]) -> u64 {
    let mut total = 0;
    for &r in roots {
        let mut q = reduced.clone();
        while let Some(next) = q.deflate(r) {
            total += 1;
            q = next;
        }
    }
    total
}

/// Peels one copy of every remaining root per round: `h` is the squarefree
/// root part, and each round removes `gcd(q, h)` from `q`.
pub(crate) fn multiplicity_sum_by_gcd(reduced: &FpPoly) -> u64 {
    let Some(deg) = reduced.degree() else {
        return 0;
    };
    if deg == 0 {
        return 0;
    }
    let h = root_part(reduced);
    let mut q = reduced.clone();
    let mut total = 0;
    loop {
        let g = q.gcd(&h);
        let gd = g.degree().unwrap_or(0);
        if gd == 0 {
            return total;
        }
        total += gd as u64;
        q = q.div(&g);
    }
}

/// `g(p)`: roots of `P mod p` counted with multiplicity.
pub fn count_roots_with_multiplicity(poly: &Polynomial, p: u64) -> Result<u64> {
    check_prime(p)?;
    let reduced = FpPoly::reduce(poly, p);
    if reduced.is_zero() {
        return Err(Error::DegenerateReduction(p));
    }
    Ok(if p <= SCAN_THRESHOLD {
        multiplicity_sum_by_deflation(&reduced, &roots_by_scan(&reduced))
    } else {
        multiplicity_sum_by_gcd(&reduced)
    })
}

/// Per-prime data for `P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimeRecord {
    pub p: u64,
    /// distinct roots; `p` when `P = 0 mod p`
    pub f: u64,
    /// roots with multiplicity; `p` when `P = 0 mod p`
    pub g: u64,
    pub reduced_degree: usize,
    /// `p <= deg P`, `p | lc(P)`, or `p | disc(P)` when the discriminant is known
    pub ramified: bool,
}

/// Classifies primes for one fixed polynomial, caching what does not depend
/// on `p`.
#[derive(Debug, Clone)]
pub struct Classifier {
    poly: Polynomial,
    discriminant: Option<i128>,
}

impl Classifier {
    pub fn new(poly: &Polynomial) -> Self {
        let discriminant = if poly.is_constant() {
            None
        } else {
            poly.discriminant().ok()
        };
        Self {
            poly: poly.clone(),
            discriminant,
        }
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn discriminant(&self) -> Option<i128> {
        self.discriminant
    }

    /// `p <= d` or `p | lc(P)`: primes where the reduction loses information
    /// about the degree-`d` root structure.
    pub fn is_excluded(&self, p: u64) -> bool {
        p <= self.poly.degree() as u64 || self.poly.leading_coeff().unsigned_abs() % p == 0
    }

    pub fn classify(&self, p: u64) -> Result<PrimeRecord> {
        check_prime(p)?;
        let reduced = FpPoly::reduce(&self.poly, p);
        let ramified = self.is_excluded(p)
            || self
                .discriminant
                .is_some_and(|disc| disc.unsigned_abs() % p as u128 == 0);
        let Some(reduced_degree) = reduced.degree() else {
            return Ok(PrimeRecord {
                p,
                f: p,
                g: p,
                reduced_degree: 0,
                ramified,
            });
        };
        let (f, g) = if reduced_degree == 0 {
            (0, 0)
        } else if p <= SCAN_THRESHOLD {
            let roots = roots_by_scan(&reduced);
            (roots.len() as u64, multiplicity_sum_by_deflation(&reduced, &roots))
        } else {
            (
                root_part(&reduced).degree().unwrap() as u64,
                multiplicity_sum_by_gcd(&reduced),
            )
        };
        Ok(PrimeRecord {
            p,
            f,
            g,
            reduced_degree,
            ramified,
        })
    }
}

pub fn classify(poly: &Polynomial, p: u64) -> Result<PrimeRecord> {
    Classifier::new(poly).classify(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn distinct_root_examples() {
        let x2p1 = poly("1,0,1");
        assert_eq!(count_distinct_roots(&x2p1, 5).unwrap(), 2);
        assert_eq!(count_distinct_roots(&x2p1, 3).unwrap(), 0);
        assert_eq!(count_distinct_roots(&Polynomial::x(), 7).unwrap(), 1);
        assert_eq!(count_distinct_roots(&x2p1, 2).unwrap(), 1);
        for p in [2, 3, 5, 13, 10007, 1_000_000_007] {
            assert_eq!(
                count_distinct_roots_gcd(&x2p1, p).unwrap(),
                if p == 2 { 1 } else if p % 4 == 1 { 2 } else { 0 },
                "p = {p}"
            );
        }
    }

    #[test]
    fn vanishing_reduction() {
        let p6 = poly("6,12");
        assert_eq!(count_distinct_roots(&p6, 3).unwrap(), 3);
        assert_eq!(count_distinct_roots_gcd(&p6, 2).unwrap(), 2);
        assert_eq!(
            count_roots_with_multiplicity(&p6, 3),
            Err(Error::DegenerateReduction(3))
        );
        let rec = classify(&p6, 3).unwrap();
        assert_eq!((rec.f, rec.g), (3, 3));
        assert!(rec.ramified);
    }

    #[test]
    fn multiplicity_examples() {
        let x2p1 = poly("1,0,1");
        assert_eq!(count_roots_with_multiplicity(&x2p1, 2).unwrap(), 2);
        assert_eq!(count_roots_with_multiplicity(&x2p1, 5).unwrap(), 2);
        assert_eq!(count_roots_with_multiplicity(&poly("-2,0,0,1"), 5).unwrap(), 1);
        // (x - 1)^3 (x + 1) over a large prime
        let p = 1_000_003;
        let lin = poly("-1,1");
        let q = lin.mul(&lin).unwrap().mul(&lin).unwrap().mul(&poly("1,1")).unwrap();
        assert_eq!(count_roots_with_multiplicity(&q, p).unwrap(), 4);
        assert_eq!(count_distinct_roots(&q, p).unwrap(), 2);
    }

    #[test]
    fn peeling_matches_deflation() {
        let polys = ["1,0,1", "-2,0,0,1", "1,1,0,1", "1,0,0,0,1", "0,0,1,1", "-1,3,-3,1", "2,1,1"];
        for s in polys {
            let q = poly(s);
            for p in crate::primes::primes_up_to(400, &Default::default()).unwrap() {
                let reduced = FpPoly::reduce(&q, p);
                if reduced.is_zero() {
                    continue;
                }
                let by_scan = multiplicity_sum_by_deflation(&reduced, &roots_by_scan(&reduced));
                assert_eq!(multiplicity_sum_by_gcd(&reduced), by_scan, "{s} mod {p}");
            }
        }
    }

    #[test]
    fn classify_examples() {
        let x2p1 = poly("1,0,1");
        let r13 = classify(&x2p1, 13).unwrap();
        assert_eq!((r13.f, r13.g, r13.ramified), (2, 2, false));
        let r2 = classify(&x2p1, 2).unwrap();
        assert_eq!((r2.f, r2.g, r2.ramified), (1, 2, true));
        let r7 = classify(&poly("-2,0,0,1"), 7).unwrap();
        assert_eq!((r7.f, r7.g, r7.ramified), (0, 0, false));
        // 31 | disc(x^3 + x + 1)
        let r31 = classify(&poly("1,1,0,1"), 31).unwrap();
        assert!(r31.ramified);
        assert_eq!((r31.f, r31.g), (2, 3));
        // lc drop: 3x^2 + x + 1 mod 3 is x + 1
        let r3 = classify(&poly("1,1,3"), 3).unwrap();
        assert_eq!((r3.f, r3.g, r3.reduced_degree, r3.ramified), (1, 1, 1, true));
    }

    #[test]
    fn rejects_composite_and_out_of_range() {
        assert_eq!(count_distinct_roots(&Polynomial::x(), 9), Err(Error::NotPrime(9)));
        assert_eq!(
            count_distinct_roots(&Polynomial::x(), 1),
            Err(Error::ModulusOutOfRange(1))
        );
    }

    #[test]
    fn irreducibility_over_fp() {
        assert!(FpPoly::reduce(&poly("1,0,1"), 3).is_irreducible());
        assert!(!FpPoly::reduce(&poly("1,0,1"), 5).is_irreducible());
        assert!(FpPoly::reduce(&poly("1,1,0,1"), 2).is_irreducible());
        // x^4 + 1 splits modulo every prime
        for p in [3, 5, 7, 11, 13, 17] {
            assert!(!FpPoly::reduce(&poly("1,0,0,0,1"), p).is_irreducible());
        }
        // (x^2 + 1)^2 mod 3 has no roots but is reducible
        let sq = poly("1,0,1").mul(&poly("1,0,1")).unwrap();
        assert!(!FpPoly::reduce(&sq, 3).is_irreducible());
    }
}

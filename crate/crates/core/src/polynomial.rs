//! Integer polynomials with machine-width coefficients.
//!
//! Coefficients are `i64` values in `[-(2^63 - 1), 2^63 - 1]`; `i64::MIN` is
//! rejected so that negation never wraps. Exact evaluations go through
//! checked `i128` arithmetic and every modular evaluation reduces each Horner
//! step, so no operation wraps silently.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Largest supported modulus (exclusive).
pub const MODULUS_LIMIT: u64 = 1 << 63;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    // constant term first; never empty; last entry nonzero unless the
    // polynomial is zero, which is stored as [0]
    coeffs: Vec<i64>,
}

pub(crate) fn check_modulus(m: u64) -> Result<()> {
    if (2..MODULUS_LIMIT).contains(&m) {
        Ok(())
    } else {
        Err(Error::ModulusOutOfRange(m))
    }
}

fn narrow(v: i128, what: &'static str) -> Result<i64> {
    match i64::try_from(v) {
        Ok(c) if c != i64::MIN => Ok(c),
        _ => Err(Error::Overflow(what)),
    }
}

pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Polynomial {
    /// Builds a polynomial from coefficients (constant term first). Trailing
    /// zeros are trimmed; an empty or all-zero list gives the zero polynomial.
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.contains(&i64::MIN) {
            return Err(Error::Overflow("polynomial coefficient"));
        }
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0);
        }
        Ok(Self { coeffs })
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self { coeffs: vec![0, 1] }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0] }
    }

    fn from_wide(coeffs: Vec<i128>, what: &'static str) -> Result<Self> {
        let narrowed = coeffs
            .into_iter()
            .map(|c| narrow(c, what))
            .collect::<Result<Vec<_>>>()?;
        Self::new(narrowed)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading_coeff(&self) -> i64 {
        *self.coeffs.last().unwrap()
    }

    pub fn constant_term(&self) -> i64 {
        self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [0]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// Coefficients reduced into `[0, m)`. `m` must already be range-checked.
    pub(crate) fn residues(&self, m: u64) -> Vec<u64> {
        self.coeffs
            .iter()
            .map(|&c| (c as i128).rem_euclid(m as i128) as u64)
            .collect()
    }

    /// `P(k) mod m` by Horner's rule with every intermediate reduced mod `m`.
    pub fn eval_mod(&self, k: u64, m: u64) -> Result<u64> {
        check_modulus(m)?;
        Ok(horner_mod(&self.residues(m), k % m, m))
    }

    /// Exact value `P(k)`; errors instead of wrapping.
    pub fn eval_exact(&self, k: i128) -> Result<i128> {
        let mut acc: i128 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = acc
                .checked_mul(k)
                .and_then(|v| v.checked_add(c as i128))
                .ok_or(Error::Overflow("polynomial evaluation"))?;
        }
        Ok(acc)
    }

    /// The fixed divisor `gcd_{k >= 0} P(k)`.
    ///
    /// Only `P(0), ..., P(d)` are needed: in the binomial basis
    /// `P = sum c_i binom(x, i)` the `c_i` are the iterated forward
    /// differences at 0, the change of basis is unimodular, and
    /// `gcd_k P(k) = gcd_i c_i`.
    pub fn fixed_divisor(&self) -> Result<u128> {
        if self.is_constant() {
            return Err(Error::ConstantPolynomial);
        }
        let mut g: u128 = 0;
        for k in 0..=self.degree() as i128 {
            g = gcd_u128(g, self.eval_exact(k)?.unsigned_abs());
        }
        Ok(g)
    }

    pub fn derivative(&self) -> Result<Self> {
        if self.is_constant() {
            return Ok(Self::zero());
        }
        let wide = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (c as i128) * i as i128)
            .collect();
        Self::from_wide(wide, "derivative")
    }

    /// `P(x + s)`.
    pub fn shift(&self, s: i64) -> Result<Self> {
        let mut acc: Vec<i128> = vec![0];
        for &c in self.coeffs.iter().rev() {
            // acc <- acc * (x + s) + c
            let mut next = vec![0i128; acc.len() + 1];
            for (i, &a) in acc.iter().enumerate() {
                next[i + 1] = next[i + 1].checked_add(a).ok_or(Error::Overflow("shift"))?;
                let t = a.checked_mul(s as i128).ok_or(Error::Overflow("shift"))?;
                next[i] = next[i].checked_add(t).ok_or(Error::Overflow("shift"))?;
            }
            next[0] = next[0]
                .checked_add(c as i128)
                .ok_or(Error::Overflow("shift"))?;
            acc = next;
        }
        Self::from_wide(acc, "shift")
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = vec![0i128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j]
                    .checked_add(a as i128 * b as i128)
                    .ok_or(Error::Overflow("product"))?;
            }
        }
        Self::from_wide(out, "product")
    }

    /// Quotient of an exact division in `Z[x]`, or `None` when `divisor`
    /// does not divide `self` (or the quotient leaves the coefficient range).
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() || divisor.degree() > self.degree() {
            return None;
        }
        let lc = divisor.leading_coeff() as i128;
        let dd = divisor.degree();
        let mut rem: Vec<i128> = self.coeffs.iter().map(|&c| c as i128).collect();
        let mut quot = vec![0i128; self.degree() - dd + 1];
        for i in (dd..=self.degree()).rev() {
            let top = rem[i];
            if top % lc != 0 {
                return None;
            }
            let q = top / lc;
            quot[i - dd] = q;
            for (j, &c) in divisor.coeffs.iter().enumerate() {
                let t = q.checked_mul(c as i128)?;
                rem[i - dd + j] = rem[i - dd + j].checked_sub(t)?;
            }
        }
        if rem.iter().any(|&r| r != 0) {
            return None;
        }
        Self::from_wide(quot, "quotient").ok()
    }

    /// gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> u64 {
        self.coeffs
            .iter()
            .fold(0u128, |g, &c| gcd_u128(g, c.unsigned_abs() as u128)) as u64
    }

    /// Discriminant `(-1)^(d(d-1)/2) Res(P, P') / lc(P)`, with the resultant
    /// taken as a fraction-free (Bareiss) determinant of the Sylvester matrix.
    pub fn discriminant(&self) -> Result<i128> {
        if self.is_constant() {
            return Err(Error::ConstantPolynomial);
        }
        let d = self.degree();
        let res = resultant(self, &self.derivative()?)?;
        let lc = self.leading_coeff() as i128;
        if res % lc != 0 {
            return Err(Error::Overflow("discriminant"));
        }
        let disc = res / lc;
        Ok(if (d * (d - 1) / 2) % 2 == 1 { -disc } else { disc })
    }

    /// Human-readable form, e.g. `x^3 - 2`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mag = c.unsigned_abs();
            if out.is_empty() {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
            }
            if mag != 1 || i == 0 {
                out.push_str(&mag.to_string());
            }
            match i {
                0 => {}
                1 => out.push('x'),
                _ => out.push_str(&format!("x^{i}")),
            }
        }
        out
    }
}

pub(crate) fn horner_mod(residues: &[u64], k: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        let mut acc = 0u64;
        for &c in residues.iter().rev() {
            acc = (acc * k + c) % m;
        }
        acc
    } else {
        let (k, m) = (k as u128, m as u128);
        let mut acc = 0u128;
        for &c in residues.iter().rev() {
            acc = (acc * k + c as u128) % m;
        }
        acc as u64
    }
}

fn resultant(a: &Polynomial, b: &Polynomial) -> Result<i128> {
    let (m, n) = (a.degree(), b.degree());
    let size = m + n;
    if size == 0 {
        return Ok(1);
    }
    let mut rows = vec![vec![0i128; size]; size];
    // n shifted copies of a, then m shifted copies of b, highest degree first
    for r in 0..n {
        for (i, &c) in a.coeffs.iter().rev().enumerate() {
            rows[r][r + i] = c as i128;
        }
    }
    for r in 0..m {
        for (i, &c) in b.coeffs.iter().rev().enumerate() {
            rows[n + r][r + i] = c as i128;
        }
    }
    bareiss_det(rows)
}

fn bareiss_det(mut mat: Vec<Vec<i128>>) -> Result<i128> {
    const OVF: Error = Error::Overflow("discriminant");
    let n = mat.len();
    let mut negate = false;
    let mut prev: i128 = 1;
    for k in 0..n.saturating_sub(1) {
        if mat[k][k] == 0 {
            match (k + 1..n).find(|&i| mat[i][k] != 0) {
                Some(i) => {
                    mat.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = mat[i][j].checked_mul(mat[k][k]).ok_or(OVF)?;
                let rhs = mat[i][k].checked_mul(mat[k][j]).ok_or(OVF)?;
                mat[i][j] = lhs.checked_sub(rhs).ok_or(OVF)? / prev;
            }
        }
        prev = mat[k][k];
    }
    let det = mat[n - 1][n - 1];
    Ok(if negate { -det } else { det })
}

impl fmt::Display for Polynomial {
    /// The comma-separated text form, constant term first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse {
                token: String::new(),
                reason: "empty coefficient list".into(),
            });
        }
        let tokens: Vec<&str> = compact.split(',').collect();
        let mut coeffs = Vec::with_capacity(tokens.len());
        for tok in &tokens {
            let value: i128 = tok.parse().map_err(|_| Error::Parse {
                token: tok.to_string(),
                reason: "not an integer".into(),
            })?;
            let c = narrow(value, "coefficient").map_err(|_| Error::Parse {
                token: tok.to_string(),
                reason: "coefficient out of range".into(),
            })?;
            coeffs.push(c);
        }
        if *coeffs.last().unwrap() == 0 {
            return Err(Error::Parse {
                token: tokens.last().unwrap().to_string(),
                reason: "top coefficient must be nonzero".into(),
            });
        }
        Self::new(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn eval_mod_examples() {
        assert_eq!(poly("1,0,1").eval_mod(3, 7).unwrap(), 3);
        assert_eq!(poly("0,1").eval_mod(5, 9).unwrap(), 5);
        assert_eq!(poly("-1,0,0,2").eval_mod(2, 5).unwrap(), 0);
        assert_eq!(poly("1,0,1").eval_mod(3, 1), Err(Error::ModulusOutOfRange(1)));
        assert!(poly("1,0,1").eval_mod(3, 1 << 63).is_err());
        // near the top of the range the u128 path kicks in
        let m = (1u64 << 63) - 25;
        let big = poly("-9223372036854775807,9223372036854775807");
        let expected = ((-(i64::MAX as i128)) + (i64::MAX as i128) * 5).rem_euclid(m as i128);
        assert_eq!(big.eval_mod(5, m).unwrap() as i128, expected);
    }

    #[test]
    fn fixed_divisor_examples() {
        assert_eq!(Polynomial::x().fixed_divisor().unwrap(), 1);
        assert_eq!(poly("2,1,1").fixed_divisor().unwrap(), 2);
        assert_eq!(poly("1,0,1").fixed_divisor().unwrap(), 1);
        // x^3 - x is divisible by 6 everywhere
        assert_eq!(poly("0,-1,0,1").fixed_divisor().unwrap(), 6);
        assert_eq!(poly("5").fixed_divisor(), Err(Error::ConstantPolynomial));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(poly("1,0,1").derivative().unwrap(), poly("0,2"));
        let d = poly("5").derivative().unwrap();
        assert!(d.is_zero());
        assert_eq!(d.degree(), 0);
        assert_eq!(poly("-2,0,0,1").derivative().unwrap(), poly("0,0,3"));
        let huge = Polynomial::new(vec![0, 0, i64::MAX]).unwrap();
        assert_eq!(huge.derivative(), Err(Error::Overflow("derivative")));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(poly("1,0,1").discriminant().unwrap(), -4);
        assert_eq!(poly("-2,0,1").discriminant().unwrap(), 8);
        // x^3 + p x + q: -4p^3 - 27q^2 = -27 * 4
        assert_eq!(poly("-2,0,0,1").discriminant().unwrap(), -108);
        assert_eq!(poly("1,1,0,1").discriminant().unwrap(), -31);
        assert_eq!(poly("1,0,0,0,1").discriminant().unwrap(), 256);
        // general quadratic b^2 - 4ac
        assert_eq!(poly("2,1,1").discriminant().unwrap(), 1 - 8);
        assert_eq!(poly("7,-3,5").discriminant().unwrap(), 9 - 4 * 5 * 7);
        // repeated root
        assert_eq!(poly("1,2,1").discriminant().unwrap(), 0);
        assert_eq!(poly("3,1").discriminant().unwrap(), 1);
    }

    #[test]
    fn shift_and_division() {
        let p = poly("1,0,0,0,1");
        assert_eq!(p.shift(1).unwrap(), poly("2,4,6,4,1"));
        assert_eq!(p.shift(1).unwrap().shift(-1).unwrap(), p);
        let f = poly("1,1");
        let g = poly("2,1");
        let prod = f.mul(&g).unwrap();
        assert_eq!(prod, poly("2,3,1"));
        assert_eq!(prod.div_exact(&f).unwrap(), g);
        assert!(poly("1,0,1").div_exact(&f).is_none());
    }

    #[test]
    fn text_format() {
        let p: Polynomial = " 1, 0 ,1 ".parse().unwrap();
        assert_eq!(p.coeffs(), &[1, 0, 1]);
        assert_eq!(p.to_string(), "1,0,1");
        assert_eq!(p.pretty(), "x^2 + 1");
        assert_eq!(poly("-2,0,0,1").pretty(), "x^3 - 2");
        assert_eq!(poly("2,-1,3").pretty(), "3x^2 - x + 2");
        match "1,0,0".parse::<Polynomial>() {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "0"),
            other => panic!("{other:?}"),
        }
        match "1,a,1".parse::<Polynomial>() {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "a"),
            other => panic!("{other:?}"),
        }
        assert!("".parse::<Polynomial>().is_err());
        assert!("-9223372036854775808".parse::<Polynomial>().is_err());
    }
}

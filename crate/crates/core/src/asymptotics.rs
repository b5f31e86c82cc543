//! Mertens-type prime products.
//!
//! Every product is accumulated as a compensated sum of logarithms and only
//! exponentiated for the report. Covered products:
//!
//! * `prod_{p <= x} (1 - 1/p)`, normalized by its asymptote `e^-gamma / log x`;
//! * `prod_{d < p <= x} (1 - d/p)`, normalized by
//!   `prod_{p <= d} (1 - 1/p)^-d * e^(-d gamma) / (log x)^d * G_d(x)`;
//! * the convergent corrections
//!   `G_d = prod_{p > d} (1 - d/p) (1 - 1/p)^-d` and its restriction
//!   `G_{d,k}` to primes where `P` has exactly `k` roots.

use serde::{Deserialize, Serialize};

use crate::density::classify_primes;
use crate::modular::Classifier;
use crate::polynomial::Polynomial;
use crate::primes::{primes_up_to, SieveConfig};
use crate::summation::CompensatedSum;
use crate::{Error, Result};

pub const EULER_GAMMA: f64 = 0.5772156649015329;

/// `H_n - log n - 1/(2n)`, which approaches the Euler-Mascheroni constant
/// with error about `1/(12 n^2)`.
pub fn gamma_from_harmonic(n: u64) -> f64 {
    let mut h = CompensatedSum::new();
    for i in (1..=n).rev() {
        h.add(1.0 / i as f64);
    }
    h.add(-(n as f64).ln());
    h.add(-0.5 / n as f64);
    h.value()
}

pub const GAMMA_CHECK_N: u64 = 1_000_000;
pub const GAMMA_TOLERANCE: f64 = 1e-9;

/// Re-derives gamma from its defining limit and checks it against
/// [`EULER_GAMMA`]; returns the derived value.
pub fn validate_gamma() -> Result<f64> {
    let derived = gamma_from_harmonic(GAMMA_CHECK_N);
    if (derived - EULER_GAMMA).abs() > GAMMA_TOLERANCE {
        return Err(Error::InvalidArgument(format!(
            "gamma check failed: derived {derived}, constant {EULER_GAMMA}"
        )));
    }
    Ok(derived)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductTrace {
    pub x: u64,
    pub value: f64,
    /// `value` divided by its predicted asymptote. For the convergent
    /// constants `G_d`, `G_{d,k}` this is `value` itself.
    pub normalized: f64,
    /// number of prime factors included
    pub terms: u64,
    pub log_value: f64,
}

fn check_checkpoints(checkpoints: &[u64], min_exclusive: u64) -> Result<()> {
    if checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("checkpoints must be ascending".into()));
    }
    if let Some(&first) = checkpoints.first() {
        if first <= min_exclusive {
            return Err(Error::EmptyRange {
                d: min_exclusive,
                x: first,
            });
        }
    }
    Ok(())
}

/// Running log-sums over `primes`, sampled at each checkpoint. `term(i, p)`
/// yields the log-factor of the `i`-th prime or `None` to skip it.
fn log_sums<F>(primes: &[u64], checkpoints: &[u64], mut term: F) -> Vec<(CompensatedSum, u64)>
where
    F: FnMut(usize, u64) -> Option<f64>,
{
    let mut sum = CompensatedSum::new();
    let mut terms = 0;
    let mut i = 0;
    let mut out = Vec::with_capacity(checkpoints.len());
    for &x in checkpoints {
        while i < primes.len() && primes[i] <= x {
            if let Some(t) = term(i, primes[i]) {
                sum.add(t);
                terms += 1;
            }
            i += 1;
        }
        out.push((sum, terms));
    }
    out
}

fn ln_one_minus(a: u64, p: u64) -> f64 {
    (-(a as f64) / p as f64).ln_1p()
}

/// `sum_{p <= d} log(1 - 1/p)`
fn small_prime_log(d: u64) -> f64 {
    (2..=d)
        .filter(|&q| crate::primes::is_prime(q))
        .map(|q| ln_one_minus(1, q))
        .collect::<CompensatedSum>()
        .value()
}

/// Log-sums of `G_d` at each checkpoint.
fn gd_logs(d: u64, primes: &[u64], checkpoints: &[u64]) -> Vec<(CompensatedSum, u64)> {
    log_sums(primes, checkpoints, |_, p| {
        (p > d).then(|| ln_one_minus(d, p) - d as f64 * ln_one_minus(1, p))
    })
}

pub fn generalized_trace(d: u64, checkpoints: &[u64], config: &SieveConfig) -> Result<Vec<ProductTrace>> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    check_checkpoints(checkpoints, d)?;
    let Some(&last) = checkpoints.last() else {
        return Ok(Vec::new());
    };
    let primes = primes_up_to(last, config)?;
    let values = log_sums(&primes, checkpoints, |_, p| (p > d).then(|| ln_one_minus(d, p)));
    let corrections = gd_logs(d, &primes, checkpoints);
    let head = small_prime_log(d);
    let df = d as f64;
    Ok(checkpoints
        .iter()
        .zip(values.iter().zip(&corrections))
        .map(|(&x, ((log_value, terms), (log_gd, _)))| {
            let log_value = log_value.value();
            let log_asymptote =
                -df * head - df * EULER_GAMMA - df * (x as f64).ln().ln() + log_gd.value();
            ProductTrace {
                x,
                value: log_value.exp(),
                normalized: (log_value - log_asymptote).exp(),
                terms: *terms,
                log_value,
            }
        })
        .collect())
}

/// `prod_{d < p <= x} (1 - d/p)`.
pub fn generalized_product(d: u64, x: u64, config: &SieveConfig) -> Result<ProductTrace> {
    Ok(generalized_trace(d, &[x], config)?[0])
}

pub fn mertens_trace(checkpoints: &[u64], config: &SieveConfig) -> Result<Vec<ProductTrace>> {
    generalized_trace(1, checkpoints, config)
}

/// `prod_{p <= x} (1 - 1/p)`; `normalized` is `value * e^gamma * log x`.
pub fn mertens_product(x: u64, config: &SieveConfig) -> Result<ProductTrace> {
    generalized_product(1, x, config)
}

fn constant_trace(x: u64, (log_sum, terms): &(CompensatedSum, u64)) -> ProductTrace {
    let log_value = log_sum.value();
    let value = log_value.exp();
    ProductTrace {
        x,
        value,
        normalized: value,
        terms: *terms,
        log_value,
    }
}

pub fn gd_trace(d: u64, checkpoints: &[u64], config: &SieveConfig) -> Result<Vec<ProductTrace>> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    check_checkpoints(checkpoints, d)?;
    let Some(&last) = checkpoints.last() else {
        return Ok(Vec::new());
    };
    let primes = primes_up_to(last, config)?;
    Ok(checkpoints
        .iter()
        .zip(&gd_logs(d, &primes, checkpoints))
        .map(|(&x, acc)| constant_trace(x, acc))
        .collect())
}

/// Partial product of `G_d` over `d < p <= x`.
pub fn gd_constant(d: u64, x: u64, config: &SieveConfig) -> Result<ProductTrace> {
    Ok(gd_trace(d, &[x], config)?[0])
}

pub fn gdk_trace(
    poly: &Polynomial,
    k: usize,
    checkpoints: &[u64],
    config: &SieveConfig,
) -> Result<Vec<ProductTrace>> {
    if poly.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    let d = poly.degree();
    if k > d {
        return Err(Error::InvalidArgument(format!("class index {k} exceeds degree {d}")));
    }
    check_checkpoints(checkpoints, d as u64)?;
    let Some(&last) = checkpoints.last() else {
        return Ok(Vec::new());
    };
    let primes = primes_up_to(last, config)?;
    let classes = classify_primes(&Classifier::new(poly), &primes)?;
    let kk = k as u64;
    let logs = log_sums(&primes, checkpoints, |i, p| {
        (classes[i] == Some(k)).then(|| ln_one_minus(kk, p) - kk as f64 * ln_one_minus(1, p))
    });
    Ok(checkpoints
        .iter()
        .zip(&logs)
        .map(|(&x, acc)| constant_trace(x, acc))
        .collect())
}

/// Partial product of `G_{d,k}` over classified primes `d < p <= x` in `P_k`.
pub fn gdk_constant(poly: &Polynomial, k: usize, x: u64, config: &SieveConfig) -> Result<ProductTrace> {
    Ok(gdk_trace(poly, k, &[x], config)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SieveConfig {
        SieveConfig::default()
    }

    #[test]
    fn mertens_small() {
        assert!((mertens_product(2, &cfg()).unwrap().value - 0.5).abs() < 1e-15);
        let t = mertens_product(10, &cfg()).unwrap();
        assert!((t.value - 8.0 / 35.0).abs() < 1e-15);
        assert_eq!(t.terms, 4);
        assert!(mertens_product(1, &cfg()).is_err());
    }

    #[test]
    fn generalized_small() {
        let t = generalized_product(2, 10, &cfg()).unwrap();
        assert!((t.value - 1.0 / 7.0).abs() < 1e-15);
        assert_eq!(
            generalized_product(1, 10, &cfg()).unwrap(),
            mertens_product(10, &cfg()).unwrap()
        );
        assert_eq!(
            generalized_product(3, 3, &cfg()),
            Err(Error::EmptyRange { d: 3, x: 3 })
        );
    }

    #[test]
    fn gd_small() {
        for x in [2, 10, 1000] {
            assert_eq!(gd_constant(1, x, &cfg()).unwrap().value, 1.0);
        }
        assert!((gd_constant(2, 3, &cfg()).unwrap().value - 0.75).abs() < 1e-15);
    }

    #[test]
    fn gdk_trivial_classes() {
        let p: Polynomial = "1,0,1".parse().unwrap();
        for k in [0, 1] {
            assert_eq!(gdk_constant(&p, k, 10_000, &cfg()).unwrap().value, 1.0);
        }
        assert!(gdk_constant(&p, 3, 100, &cfg()).is_err());
    }

    #[test]
    fn normalized_generalized_is_power_of_mertens() {
        // the G_d factor cancels, leaving (value_1 e^gamma log x)^d
        for d in [2, 3, 4] {
            let g = generalized_product(d, 100_000, &cfg()).unwrap();
            let m = mertens_product(100_000, &cfg()).unwrap();
            let expected = m.normalized.powi(d as i32);
            assert!((g.normalized / expected - 1.0).abs() < 1e-12, "d = {d}");
        }
    }

    #[test]
    fn harmonic_gamma() {
        let derived = validate_gamma().unwrap();
        assert!((derived - EULER_GAMMA).abs() < 1e-9);
    }
}

//! Empirical densities of the prime classes `P_k = {p > d : g(p) = k}`.
//!
//! Counts are exact integers and the densities are ratios of them; the
//! reciprocal sums `S_k(X) = sum_{p in P_k, p <= X} 1/p` use compensated
//! summation. Primes `p <= d` and primes dividing the leading coefficient
//! are excluded rather than classified.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::modular::Classifier;
use crate::polynomial::Polynomial;
use crate::primes::{primes_up_to, SieveConfig};
use crate::summation::CompensatedSum;
use crate::{Error, Result};

const CLASSIFY_CHUNK: usize = 1024;

/// Class index `g(p)` for each prime, `None` for excluded primes. Work is
/// split into fixed chunks and concatenated in order.
pub fn classify_primes(classifier: &Classifier, primes: &[u64]) -> Result<Vec<Option<usize>>> {
    Ok(primes
        .par_chunks(CLASSIFY_CHUNK)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&p| {
                    if classifier.is_excluded(p) {
                        Ok(None)
                    } else {
                        Ok(Some(classifier.classify(p)?.g as usize))
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .concat())
}

/// Partial statistics over some set of primes; partials over disjoint
/// ranges merge componentwise.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityAccumulator {
    counts: Vec<u64>,
    recip: Vec<CompensatedSum>,
    recip_total: CompensatedSum,
    excluded: Vec<u64>,
}

impl DensityAccumulator {
    pub fn new(degree: usize) -> Self {
        Self {
            counts: vec![0; degree + 1],
            recip: vec![CompensatedSum::new(); degree + 1],
            recip_total: CompensatedSum::new(),
            excluded: Vec::new(),
        }
    }

    /// Records prime `p` with class `k` (`None`: excluded).
    pub fn record(&mut self, p: u64, class: Option<usize>) {
        let r = 1.0 / p as f64;
        self.recip_total.add(r);
        match class {
            Some(k) => {
                self.counts[k] += 1;
                self.recip[k].add(r);
            }
            None => self.excluded.push(p),
        }
    }

    /// Appends a partial computed over a later prime range.
    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        for (a, b) in self.recip.iter_mut().zip(&other.recip) {
            a.merge(b);
        }
        self.recip_total.merge(&other.recip_total);
        self.excluded.extend_from_slice(&other.excluded);
    }

    pub fn report(&self, limit: u64) -> Result<DensityReport> {
        let total: u64 = self.counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidArgument(format!(
                "no classifiable prime up to {limit}"
            )));
        }
        let weighted: u64 = self.counts.iter().enumerate().map(|(k, &c)| k as u64 * c).sum();
        Ok(DensityReport {
            limit,
            degree: self.counts.len() - 1,
            counts: self.counts.clone(),
            total,
            alpha_hat: self.counts.iter().map(|&c| c as f64 / total as f64).collect(),
            weighted_sum: weighted as f64 / total as f64,
            recip_sums: self.recip.iter().map(CompensatedSum::value).collect(),
            recip_total: self.recip_total.value(),
            excluded: self.excluded.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub limit: u64,
    pub degree: usize,
    /// `pi_k(X)` for `k = 0..=d`
    pub counts: Vec<u64>,
    pub total: u64,
    pub alpha_hat: Vec<f64>,
    /// `sum_k k * alpha_hat_k`
    pub weighted_sum: f64,
    pub recip_sums: Vec<f64>,
    /// `sum_{p <= X} 1/p` over all primes, excluded ones included
    pub recip_total: f64,
    pub excluded: Vec<u64>,
}

impl DensityReport {
    /// `sum_k k * alpha_hat_k` as the exact ratio `(sum_k k pi_k, total)`.
    pub fn weighted_sum_exact(&self) -> (u64, u64) {
        let num = self.counts.iter().enumerate().map(|(k, &c)| k as u64 * c).sum();
        (num, self.total)
    }
}

fn check_ascending(checkpoints: &[u64]) -> Result<()> {
    if checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("checkpoints must be ascending".into()));
    }
    Ok(())
}

/// One report per checkpoint from a single sieve and classification pass.
pub fn density_trace(
    poly: &Polynomial,
    checkpoints: &[u64],
    config: &SieveConfig,
) -> Result<Vec<DensityReport>> {
    let Some(&last) = checkpoints.last() else {
        return Ok(Vec::new());
    };
    if poly.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    check_ascending(checkpoints)?;
    let primes = primes_up_to(last, config)?;
    let classes = classify_primes(&Classifier::new(poly), &primes)?;

    let mut acc = DensityAccumulator::new(poly.degree());
    let mut reports = Vec::with_capacity(checkpoints.len());
    let mut i = 0;
    for &x in checkpoints {
        while i < primes.len() && primes[i] <= x {
            acc.record(primes[i], classes[i]);
            i += 1;
        }
        reports.push(acc.report(x)?);
    }
    Ok(reports)
}

pub fn scan_densities(poly: &Polynomial, limit: u64, config: &SieveConfig) -> Result<DensityReport> {
    Ok(density_trace(poly, &[limit], config)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn x2_plus_1_up_to_100() {
        let r = scan_densities(&poly("1,0,1"), 100, &SieveConfig::default()).unwrap();
        assert_eq!(r.counts, vec![13, 0, 11]);
        assert_eq!(r.total, 24);
        assert_eq!(r.excluded, vec![2]);
        assert_eq!(r.weighted_sum_exact(), (22, 24));
        assert!((r.weighted_sum - 22.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn identity_polynomial_is_all_class_one() {
        let r = scan_densities(&Polynomial::x(), 100, &SieveConfig::default()).unwrap();
        assert_eq!(r.counts, vec![0, 25]);
        assert_eq!(r.alpha_hat, vec![0.0, 1.0]);
        assert!(r.excluded.is_empty());
    }

    #[test]
    fn empty_checkpoints_and_ordering() {
        let cfg = SieveConfig::default();
        assert!(density_trace(&poly("1,0,1"), &[], &cfg).unwrap().is_empty());
        assert!(density_trace(&poly("1,0,1"), &[100, 10], &cfg).is_err());
        // only p = 2 (excluded) is below 2
        assert!(scan_densities(&poly("1,0,1"), 2, &cfg).is_err());
    }

    #[test]
    fn leading_coefficient_primes_are_excluded() {
        let r = scan_densities(&poly("1,1,6"), 50, &SieveConfig::default()).unwrap();
        assert_eq!(r.excluded, vec![2, 3]);
    }

    #[test]
    fn reciprocal_sums_account_for_everything() {
        let r = scan_densities(&poly("-2,0,0,1"), 10_000, &SieveConfig::default()).unwrap();
        let classified: f64 = r.recip_sums.iter().sum();
        let excluded: f64 = r.excluded.iter().map(|&p| 1.0 / p as f64).sum();
        assert!((classified + excluded - r.recip_total).abs() < 1e-12);
        assert!((r.alpha_hat.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(r.counts[2], 0, "a cubic cannot have exactly two roots counted with multiplicity");
    }
}

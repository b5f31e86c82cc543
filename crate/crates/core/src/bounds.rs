//! Lower-bound harness for `phi_P(n)`.
//!
//! `phi_P(n)/n = prod_{p | n} (1 - f(p)/p)` is split at `p <= d` and
//! `p < log n` into three partial products. The tail product over primes
//! `p >= log n` has at most `log n / log log n` factors, each at least
//! `1 - d/log n`, which gives the envelope `(1 - d/log n)^(log n/log log n)`.
//! The scan reports `phi_P(n) (log log n)^e / n` over `16 <= n <= X` with
//! `gcd(n, delta) = 1`; its infimum is the empirical constant in
//! `phi_P(n) >= c n (log log n)^-e`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::EULER_GAMMA;
use crate::density::scan_densities;
use crate::modular::count_distinct_roots;
use crate::polynomial::{gcd_u128, Polynomial};
use crate::primes::{FactoredInteger, SieveConfig};
use crate::totient::{phi_p_batch, TotientTable};
use crate::{Error, Result};

/// First `n` of every scan; `log log n > 1` from here on.
pub const SCAN_START: u64 = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiDecomposition {
    pub n: u64,
    pub degree: usize,
    pub log_n: f64,
    /// over `p | n`, `p <= d`
    pub pi1: f64,
    /// over `p | n`, `d < p < log n`
    pub pi2: f64,
    /// over `p | n`, `p >= log n`
    pub pi3: f64,
    pub product: f64,
    /// `(p, f(p))` per range, in the order `pi1, pi2, pi3`
    pub parts: [Vec<(u64, u64)>; 3],
}

impl PiDecomposition {
    /// `product` as the exact ratio `prod (p - f(p)) / prod p`.
    pub fn exact_ratio(&self) -> (u128, u128) {
        self.parts
            .iter()
            .flatten()
            .fold((1u128, 1u128), |(num, den), &(p, f)| {
                (num * (p - f) as u128, den * p as u128)
            })
    }

    /// Whether `product * n == value` holds exactly.
    pub fn matches_exactly(&self, value: u64) -> bool {
        let (num, den) = self.exact_ratio();
        value as u128 * den == self.n as u128 * num
    }
}

/// Smallest admissible `n` is any `n > e^(d+1)`.
pub fn decomposition_threshold(degree: usize) -> f64 {
    ((degree + 1) as f64).exp()
}

fn check_admissible_size(n: u64, degree: usize) -> Result<()> {
    let bound = decomposition_threshold(degree);
    if (n as f64) <= bound {
        return Err(Error::TooSmall { n, bound });
    }
    Ok(())
}

/// Decomposition from precomputed root counts `(p, f(p))` over `p | n`.
pub fn decompose(n: u64, degree: usize, per_prime: &[(u64, u64)]) -> Result<PiDecomposition> {
    check_admissible_size(n, degree)?;
    let log_n = (n as f64).ln();
    let mut parts: [Vec<(u64, u64)>; 3] = Default::default();
    for &(p, f) in per_prime {
        let slot = if p <= degree as u64 {
            0
        } else if (p as f64) < log_n {
            1
        } else {
            2
        };
        parts[slot].push((p, f));
    }
    let prod = |part: &[(u64, u64)]| {
        part.iter()
            .map(|&(p, f)| 1.0 - f as f64 / p as f64)
            .product::<f64>()
    };
    let (pi1, pi2, pi3) = (prod(&parts[0]), prod(&parts[1]), prod(&parts[2]));
    Ok(PiDecomposition {
        n,
        degree,
        log_n,
        pi1,
        pi2,
        pi3,
        product: pi1 * pi2 * pi3,
        parts,
    })
}

pub fn pi_decomposition(poly: &Polynomial, n: &FactoredInteger) -> Result<PiDecomposition> {
    if poly.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    check_admissible_size(n.n(), poly.degree())?;
    let per_prime = n
        .distinct_primes()
        .map(|p| Ok((p, count_distinct_roots(poly, p)?)))
        .collect::<Result<Vec<_>>>()?;
    decompose(n.n(), poly.degree(), &per_prime)
}

/// `(1 - d/L)^(L / log L)` with `L = log n`, written through
/// `t = log log n` so it stays finite for astronomically large `n`.
pub fn tail_envelope_loglog(degree: usize, loglog_n: f64) -> f64 {
    let d = degree as f64;
    let y = d * (-loglog_n).exp(); // d / log n
    let ratio = if y < 1e-8 { -1.0 - y / 2.0 } else { (-y).ln_1p() / y };
    (d / loglog_n * ratio).exp()
}

pub fn tail_envelope(degree: usize, n: u64) -> f64 {
    tail_envelope_loglog(degree, (n as f64).ln().ln())
}

/// The value of `log log n` above which the tail envelope reaches `level`.
pub fn envelope_crossing_loglog(degree: usize, level: f64) -> f64 {
    assert!(level > 0.0 && level < 1.0);
    let mut lo = ((degree + 1) as f64).ln();
    let mut hi = lo.max(1.0);
    while tail_envelope_loglog(degree, hi) < level {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tail_envelope_loglog(degree, mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pi3Check {
    pub n: u64,
    pub log_n: f64,
    pub pi3: f64,
    /// `prod_{p | n, p >= log n} (1 - d/p)`
    pub tail_lower: f64,
    /// `(1 - d/log n)^(log n / log log n)`
    pub envelope: f64,
    /// number of prime factors `>= log n`, and its bound `log n / log log n`
    pub tail_primes: usize,
    pub tail_prime_bound: f64,
    pub holds: bool,
}

/// Checks `pi3 >= prod (1 - d/p) >= (1 - d/log n)^(log n / log log n)`.
pub fn pi3_inequality_check(poly: &Polynomial, n: &FactoredInteger) -> Result<Pi3Check> {
    let dec = pi_decomposition(poly, n)?;
    Ok(pi3_from_decomposition(&dec))
}

pub fn pi3_from_decomposition(dec: &PiDecomposition) -> Pi3Check {
    let d = dec.degree as f64;
    let tail = &dec.parts[2];
    let tail_lower: f64 = tail.iter().map(|&(p, _)| 1.0 - d / p as f64).product();
    let loglog = dec.log_n.ln();
    let envelope = tail_envelope_loglog(dec.degree, loglog);
    let tail_prime_bound = dec.log_n / loglog;
    Pi3Check {
        n: dec.n,
        log_n: dec.log_n,
        pi3: dec.pi3,
        tail_lower,
        envelope,
        tail_primes: tail.len(),
        tail_prime_bound,
        holds: dec.pi3 >= tail_lower
            && tail_lower >= envelope
            && tail.len() as f64 <= tail_prime_bound,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentMode {
    /// the measured `sum_k k alpha_k` plus epsilon
    QdEmpirical,
    /// the degree `d`, no epsilon
    SafeD,
    /// the given exponent as is
    Custom(f64),
}

impl std::str::FromStr for ExponentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qd-empirical" | "qd" => Ok(Self::QdEmpirical),
            "safe-d" => Ok(Self::SafeD),
            other => other
                .strip_prefix("custom:")
                .unwrap_or(other)
                .parse::<f64>()
                .ok()
                .filter(|e| e.is_finite())
                .map(Self::Custom)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "unknown exponent mode `{other}` (qd-empirical, safe-d or a number)"
                    ))
                }),
        }
    }
}

impl std::fmt::Display for ExponentMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::QdEmpirical => f.write_str("qd-empirical"),
            Self::SafeD => f.write_str("safe-d"),
            Self::Custom(e) => write!(f, "custom:{e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub polynomial: String,
    pub degree: usize,
    pub delta: u128,
    pub mode: String,
    pub exponent: f64,
    pub epsilon: f64,
    /// weighted fixed-point sum behind `qd-empirical`
    pub qd_estimate: Option<f64>,
    pub range: (u64, u64),
    pub tested: u64,
    /// `n` with `gcd(n, delta) > 1`
    pub skipped: u64,
    pub min_ratio: f64,
    pub argmin: u64,
    /// admissible `n` with `phi_P(n) = 0`
    pub zero_count: u64,
    pub first_zero: Option<u64>,
    /// set when a zero was found and positivity was not asserted
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub n: u64,
    pub phi_p: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct BoundScan {
    pub report: BoundReport,
    pub rows: Vec<BoundRow>,
}

const SCAN_CHUNK: usize = 1 << 14;

fn min_row(rows: &[BoundRow]) -> Option<BoundRow> {
    rows.iter()
        .copied()
        .reduce(|best, r| if r.ratio < best.ratio { r } else { best })
}

/// Scan over an already-built table; `exponent` is final.
pub fn scan_table(
    poly: &Polynomial,
    table: &TotientTable,
    exponent: f64,
    epsilon: f64,
    mode: ExponentMode,
    qd_estimate: Option<f64>,
) -> Result<BoundScan> {
    let limit = table.limit();
    if limit < SCAN_START {
        return Err(Error::InvalidArgument(format!(
            "scan limit must be at least {SCAN_START}, got {limit}"
        )));
    }
    let delta = poly.fixed_divisor()?;
    let candidates: Vec<u64> = (SCAN_START..=limit).collect();
    let rows: Vec<BoundRow> = candidates
        .par_chunks(SCAN_CHUNK)
        .map(|chunk| {
            chunk
                .iter()
                .filter(|&&n| gcd_u128(n as u128, delta) == 1)
                .map(|&n| {
                    let phi = table.get(n);
                    let loglog = (n as f64).ln().ln();
                    BoundRow {
                        n,
                        phi_p: phi,
                        ratio: phi as f64 * loglog.powf(exponent) / n as f64,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat();
    let best = rows
        .par_chunks(SCAN_CHUNK)
        .map(min_row)
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .reduce(|best, r| if r.ratio < best.ratio { r } else { best })
        .ok_or_else(|| Error::InvalidArgument("no admissible n in range".into()))?;
    let zeros: Vec<u64> = rows.iter().filter(|r| r.phi_p == 0).map(|r| r.n).collect();
    let tested = rows.len() as u64;
    let report = BoundReport {
        polynomial: poly.to_string(),
        degree: poly.degree(),
        delta,
        mode: mode.to_string(),
        exponent,
        epsilon,
        qd_estimate,
        range: (SCAN_START, limit),
        tested,
        skipped: limit - SCAN_START + 1 - tested,
        min_ratio: best.ratio,
        argmin: best.n,
        zero_count: zeros.len() as u64,
        first_zero: zeros.first().copied(),
        flagged: !zeros.is_empty(),
    };
    if !report.flagged && report.min_ratio <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "non-positive ratio at n = {} without a zero of phi_P",
            report.argmin
        )));
    }
    Ok(BoundScan { report, rows })
}

pub fn bound_scan(
    poly: &Polynomial,
    limit: u64,
    epsilon: f64,
    mode: ExponentMode,
    config: &SieveConfig,
) -> Result<BoundScan> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {epsilon}")));
    }
    if limit < SCAN_START {
        return Err(Error::InvalidArgument(format!(
            "scan limit must be at least {SCAN_START}, got {limit}"
        )));
    }
    if poly.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    let (exponent, qd) = match mode {
        ExponentMode::QdEmpirical => {
            let qd = scan_densities(poly, limit, config)?.weighted_sum;
            (qd + epsilon, Some(qd))
        }
        ExponentMode::SafeD => (poly.degree() as f64, None),
        ExponentMode::Custom(e) => (e, None),
    };
    let table = phi_p_batch(poly, limit, config)?;
    scan_table(poly, &table, exponent, epsilon, mode, qd)
}

pub const E_MINUS_GAMMA: f64 = 0.5614594835668851;

#[derive(Debug, Clone)]
pub struct ClassicDiagnostic {
    pub scan: BoundScan,
    /// `e^-gamma`, the asymptotic constant for the classic totient
    pub reference: f64,
    pub below_reference: bool,
}

/// The classic totient against `e^-gamma n / log log n` over `[16, X]`.
pub fn classic_phi_diagnostic(limit: u64, config: &SieveConfig) -> Result<ClassicDiagnostic> {
    let scan = bound_scan(&Polynomial::x(), limit, 0.0, ExponentMode::Custom(1.0), config)?;
    let reference = (-EULER_GAMMA).exp();
    Ok(ClassicDiagnostic {
        below_reference: scan.report.min_ratio < reference,
        scan,
        reference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::factorize;

    fn poly(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn decomposition_606() {
        let n = factorize(606).unwrap();
        let dec = pi_decomposition(&poly("1,0,1"), &n).unwrap();
        assert_eq!(dec.parts[0], vec![(2, 1)]);
        assert_eq!(dec.parts[1], vec![(3, 0)]);
        assert_eq!(dec.parts[2], vec![(101, 2)]);
        assert_eq!(dec.pi1, 0.5);
        assert_eq!(dec.pi2, 1.0);
        assert!((dec.pi3 - 99.0 / 101.0).abs() < 1e-15);
        assert_eq!(dec.exact_ratio(), (297, 606));

        let classic = pi_decomposition(&Polynomial::x(), &n).unwrap();
        let expected = 0.5 * (2.0 / 3.0) * (100.0 / 101.0);
        assert!((classic.product - expected).abs() < 1e-15);
        assert!(classic.matches_exactly(200));
    }

    #[test]
    fn decomposition_needs_large_n() {
        let err = pi_decomposition(&poly("1,0,1"), &factorize(4).unwrap()).unwrap_err();
        assert!(matches!(err, Error::TooSmall { n: 4, .. }));
        // e^3 ~ 20.09
        assert!(pi_decomposition(&poly("1,0,1"), &factorize(20).unwrap()).is_err());
        assert!(pi_decomposition(&poly("1,0,1"), &factorize(21).unwrap()).is_ok());
    }

    #[test]
    fn pi3_examples() {
        let c = pi3_inequality_check(&poly("1,0,1"), &factorize(606).unwrap()).unwrap();
        assert!(c.holds);
        assert!((c.pi3 - 0.980198).abs() < 1e-6);
        let direct = (1.0 - 2.0 / 606f64.ln()).powf(606f64.ln() / 606f64.ln().ln());
        assert!((c.envelope - direct).abs() < 1e-12);
        assert!((c.envelope - 0.2750).abs() < 1e-3, "{}", c.envelope);

        let c = pi3_inequality_check(&Polynomial::x(), &factorize(101).unwrap()).unwrap();
        assert!(c.holds);
        assert!((c.pi3 - 100.0 / 101.0).abs() < 1e-15);

        // 2^5 * 3^3: no prime >= log n = 6.77
        let c = pi3_inequality_check(&poly("1,0,1"), &factorize(864).unwrap()).unwrap();
        assert_eq!((c.pi3, c.tail_primes), (1.0, 0));
        assert!(c.holds);
    }

    #[test]
    fn envelope_crossing() {
        let t = envelope_crossing_loglog(2, 0.99);
        assert!((tail_envelope_loglog(2, t) - 0.99).abs() < 1e-9);
        assert!(t > 150.0, "{t}");
        // at n = 10^6 the envelope is still far below 0.99
        assert!((tail_envelope(2, 1_000_000) - 0.4392).abs() < 1e-3);
    }

    #[test]
    fn exponent_mode_parsing() {
        assert_eq!("qd-empirical".parse::<ExponentMode>().unwrap(), ExponentMode::QdEmpirical);
        assert_eq!("safe-d".parse::<ExponentMode>().unwrap(), ExponentMode::SafeD);
        assert_eq!("1.5".parse::<ExponentMode>().unwrap(), ExponentMode::Custom(1.5));
        assert_eq!("custom:2".parse::<ExponentMode>().unwrap(), ExponentMode::Custom(2.0));
        assert!("fast".parse::<ExponentMode>().is_err());
    }

    #[test]
    fn classic_single_point() {
        let diag = classic_phi_diagnostic(16, &SieveConfig::default()).unwrap();
        let r = &diag.scan.report;
        assert_eq!(r.argmin, 16);
        let expected = 0.5 * 16f64.ln().ln();
        assert!((r.min_ratio - expected).abs() < 1e-15);
        assert!((r.min_ratio - 0.5099).abs() < 1e-4);
        assert!((diag.reference - (-EULER_GAMMA).exp()).abs() < 1e-16);
    }

    #[test]
    fn skipped_values_are_counted() {
        // delta = 2 for x^2 + x + 2: only odd n are admissible
        let scan = bound_scan(&poly("2,1,1"), 100, 0.0, ExponentMode::SafeD, &SieveConfig::default())
            .unwrap();
        assert_eq!(scan.report.delta, 2);
        assert_eq!(scan.report.tested + scan.report.skipped, 85);
        assert_eq!(scan.report.skipped, 43);
        assert!(scan.rows.iter().all(|r| r.n % 2 == 1));
        assert!(!scan.report.flagged);
    }

    #[test]
    fn rejects_bad_parameters() {
        let cfg = SieveConfig::default();
        let p = poly("1,0,1");
        assert!(bound_scan(&p, 15, 0.0, ExponentMode::SafeD, &cfg).is_err());
        assert!(bound_scan(&p, 100, -0.1, ExponentMode::SafeD, &cfg).is_err());
        assert!(bound_scan(&p, 100, f64::NAN, ExponentMode::SafeD, &cfg).is_err());
    }
}

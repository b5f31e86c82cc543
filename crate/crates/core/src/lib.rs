//! Generalized Euler totient of an integer polynomial.
//!
//! For an integer polynomial `P`, `phi_P(n)` counts the `k` in `[0, n)` with
//! `gcd(P(k), n) = 1`. The crate evaluates it both by brute force and by the
//! product formula `phi_P(n) = n * prod_{p | n} (1 - f(p)/p)`, where `f(p)` is
//! the number of roots of `P` modulo `p`, and provides the numerical machinery
//! around its lower bound: prime sieving and factorization, root counting over
//! prime fields, densities of the prime classes `{p : P has k roots mod p}`,
//! Mertens-type products and the scan of `phi_P(n) (log log n)^e / n`.

pub mod asymptotics;
pub mod bounds;
pub mod cli;
pub mod corpus;
pub mod density;
mod error;
pub mod irreducibility;
pub mod modular;
pub mod polynomial;
pub mod primes;
pub mod report;
pub mod summation;
pub mod totient;

pub use error::{Error, Result};
pub use polynomial::Polynomial;

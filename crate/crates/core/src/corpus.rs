//! Reference polynomials with known Galois groups.
//!
//! `expected_alpha[k]` is the proportion of Galois-group elements fixing
//! exactly `k` roots, which is the natural density of the primes where the
//! polynomial has exactly `k` roots.

use crate::Polynomial;

#[derive(Debug, Clone, Copy)]
pub struct CorpusEntry {
    pub text: &'static str,
    pub name: &'static str,
    pub group: &'static str,
    pub expected_alpha: &'static [f64],
}

pub const CORPUS: &[CorpusEntry] = &[
    CorpusEntry { text: "3,1", name: "x + 3", group: "trivial", expected_alpha: &[0.0, 1.0] },
    CorpusEntry { text: "1,0,1", name: "x^2 + 1", group: "C2", expected_alpha: &[0.5, 0.0, 0.5] },
    CorpusEntry { text: "-2,0,1", name: "x^2 - 2", group: "C2", expected_alpha: &[0.5, 0.0, 0.5] },
    CorpusEntry { text: "2,1,1", name: "x^2 + x + 2", group: "C2", expected_alpha: &[0.5, 0.0, 0.5] },
    CorpusEntry {
        text: "-2,0,0,1",
        name: "x^3 - 2",
        group: "S3",
        expected_alpha: &[1.0 / 3.0, 0.5, 0.0, 1.0 / 6.0],
    },
    CorpusEntry {
        text: "1,1,0,1",
        name: "x^3 + x + 1",
        group: "S3",
        expected_alpha: &[1.0 / 3.0, 0.5, 0.0, 1.0 / 6.0],
    },
    CorpusEntry {
        text: "1,0,0,0,1",
        name: "x^4 + 1",
        group: "C2 x C2",
        expected_alpha: &[0.75, 0.0, 0.0, 0.0, 0.25],
    },
];

impl CorpusEntry {
    pub fn polynomial(&self) -> Polynomial {
        self.text.parse().expect("corpus entries parse")
    }
}

pub fn corpus() -> Vec<Polynomial> {
    CORPUS.iter().map(CorpusEntry::polynomial).collect()
}

use std::fmt;

use crate::error::{Error, Result};

/// One of the six commuting-field generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// `∂_axis`, axis in `0..3`.
    Partial(usize),
    /// `Ω̃_axis`, axis in `0..3`.
    Rotation(usize),
}

impl Generator {
    pub const ALL: [Generator; 6] = [
        Generator::Partial(0),
        Generator::Partial(1),
        Generator::Partial(2),
        Generator::Rotation(0),
        Generator::Rotation(1),
        Generator::Rotation(2),
    ];

    pub fn is_rotation(self) -> bool {
        matches!(self, Generator::Rotation(_))
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Partial(a) => write!(f, "d{}", a + 1),
            Generator::Rotation(a) => write!(f, "O{}", a + 1),
        }
    }
}

/// The operator word `S^k Γ_{a₁} ⋯ Γ_{a_m}`; the last letter acts first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub scaling: usize,
    pub letters: Vec<Generator>,
}

impl Word {
    pub fn order(&self) -> usize {
        self.scaling + self.letters.len()
    }

    /// True when the word multiplies by coordinates somewhere.
    pub fn needs_window(&self) -> bool {
        self.scaling > 0 || self.letters.iter().any(|g| g.is_rotation())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scaling == 0 && self.letters.is_empty() {
            return write!(f, "I");
        }
        for _ in 0..self.scaling {
            write!(f, "S")?;
        }
        for g in &self.letters {
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Largest plan a diagnostic accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlanCaps {
    pub p: usize,
    pub q: usize,
}

impl Default for PlanCaps {
    fn default() -> Self {
        Self { p: 2, q: 1 }
    }
}

/// All words `S^k Γ^a` with `k ≤ q` and `k + |a| ≤ p`, in a fixed order:
/// by `k`, then by length, then lexicographically in [`Generator::ALL`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiIndexPlan {
    p: usize,
    q: usize,
    words: Vec<Word>,
}

impl MultiIndexPlan {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if q > p {
            return Err(Error::Config(format!("plan needs q <= p, got ({p}, {q})")));
        }
        let mut words = Vec::new();
        for k in 0..=q {
            for len in 0..=(p - k) {
                for letters in sequences(len) {
                    words.push(Word {
                        scaling: k,
                        letters,
                    });
                }
            }
        }
        Ok(Self { p, q, words })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Words of the localized energies: `k ≤ q`, `k + |a| ≤ p − 1`.
    pub fn local_words(&self) -> impl Iterator<Item = &Word> {
        let p = self.p;
        self.words.iter().filter(move |w| w.order() < p)
    }

    /// Rejects plans beyond `caps`.
    pub fn check_caps(&self, caps: PlanCaps) -> Result<()> {
        if self.p > caps.p || self.q > caps.q {
            return Err(Error::PlanExceedsCaps(format!(
                "plan ({}, {}) exceeds caps ({}, {})",
                self.p, self.q, caps.p, caps.q
            )));
        }
        Ok(())
    }
}

fn sequences(len: usize) -> Vec<Vec<Generator>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                Generator::ALL.iter().map(move |&g| {
                    let mut w = prefix.clone();
                    w.push(g);
                    w
                })
            })
            .collect();
    }
    out
}

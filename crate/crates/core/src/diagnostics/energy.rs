use std::collections::HashMap;

use crate::calculus::{
    japanese, visit_words, CutoffFamily, FieldPair, MultiIndexPlan, PlanCaps, Tensor, TensorField,
    Window, Word,
};
use crate::dynamics::Rhs;
use crate::error::{Error, Result};
use crate::grid::{same_grid, ScalarField, State};

/// `½‖W U‖²` and `‖∇ W v‖²` for every word `W` of a plan at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyEntry {
    pub t: f64,
    pub words: Vec<WordSample>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WordSample {
    pub word: Word,
    pub half_norm_sq: f64,
    pub grad_v_sq: f64,
}

/// Localized energies at one instant.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LocalEntry {
    pub t: f64,
    /// `Σ ‖ζ∇S^kΓ^a U‖²` over words with `k ≤ q`, `k + |a| ≤ p − 1`.
    pub y: f64,
    /// `Σ ‖ζΔS^kΓ^a v‖²` over the same words.
    pub z: f64,
}

/// Energy entry for `plan`, windowing with the default window of the box.
pub fn energy(state: &State, rhs: &Rhs, plan: &MultiIndexPlan) -> Result<EnergyEntry> {
    let window = Window::default_for(state.grid().length());
    Ok(word_pass(state, rhs, plan, &window, None)?.0)
}

/// Localized energies for `plan` under the cutoffs at the state's time.
pub fn local_energy(
    state: &State,
    rhs: &Rhs,
    plan: &MultiIndexPlan,
    cutoffs: &CutoffFamily,
) -> Result<LocalEntry> {
    let window = Window::default_for(state.grid().length());
    Ok(word_pass(state, rhs, plan, &window, Some(cutoffs))?.1)
}

/// Both entries from a single walk over the words.
pub(crate) fn word_pass(
    state: &State,
    rhs: &Rhs,
    plan: &MultiIndexPlan,
    window: &Window,
    cutoffs: Option<&CutoffFamily>,
) -> Result<(EnergyEntry, LocalEntry)> {
    plan.check_caps(PlanCaps::default())?;
    same_grid(state.grid(), rhs.dv.grid())?;
    let grid = state.grid().clone();
    let t = state.t;
    let u = FieldPair::from_state(state);
    let dudt = (plan.q() > 0 && t != 0.0).then(|| FieldPair {
        g: rhs.dg.to_tensor(),
        v: rhs.dv.to_tensor(),
    });
    let w = window.field(&grid);
    let zeta_sq = cutoffs.map(|c| c.zeta_field(&grid, t).map(|z| z * z));

    let index: HashMap<&Word, usize> = plan.words().iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut words: Vec<Option<WordSample>> = vec![None; plan.words().len()];
    let mut local = LocalEntry {
        t,
        ..LocalEntry::default()
    };
    visit_words(plan, &u, dudt.as_ref(), t, &w, |word, node| {
        let i = index[word];
        words[i] = Some(WordSample {
            word: word.clone(),
            half_norm_sq: 0.5 * node.norm_squared(),
            grad_v_sq: node.v.gradient_norm_squared(),
        });
        if let Some(z2) = &zeta_sq {
            if word.order() < plan.p() {
                local.y += weighted_sq(&node.g.gradient(), z2) + weighted_sq(&node.v.gradient(), z2);
                local.z += weighted_sq(&node.v.laplacian(), z2);
            }
        }
    })?;
    let words = words
        .into_iter()
        .map(|w| w.ok_or_else(|| Error::Config("word walk missed a plan word".into())))
        .collect::<Result<_>>()?;
    Ok((EnergyEntry { t, words }, local))
}

/// `Σ_c ∫ weight·|c|²` over the physical components of `t`.
fn weighted_sq(t: &Tensor, weight: &ScalarField) -> f64 {
    let dv = weight.grid().cell_volume();
    t.to_physical()
        .iter()
        .map(|f| {
            f.values()
                .iter()
                .zip(weight.values())
                .filter(|(_, w)| **w != 0.0)
                .map(|(a, w)| w * a * a)
                .sum::<f64>()
        })
        .sum::<f64>()
        * dv
}

/// Per-word energies with their dissipation integrals.
#[derive(Clone, Debug, PartialEq)]
pub struct WordEnergy {
    pub word: Word,
    pub half_norm_sq: f64,
    /// `ν∫₀ᵗ‖∇ W v‖² ds` by the trapezoid rule over recorded samples.
    pub dissipation: f64,
    pub(crate) last_grad_v_sq: f64,
}

/// Running energies `E_{p,q}(t)` over a fixed plan.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyLedger {
    pub(crate) nu: f64,
    pub(crate) t: Option<f64>,
    pub(crate) words: Vec<WordEnergy>,
}

impl EnergyLedger {
    pub fn new(plan: &MultiIndexPlan, nu: f64) -> Self {
        Self {
            nu,
            t: None,
            words: plan
                .words()
                .iter()
                .map(|w| WordEnergy {
                    word: w.clone(),
                    half_norm_sq: 0.0,
                    dissipation: 0.0,
                    last_grad_v_sq: 0.0,
                })
                .collect(),
        }
    }

    /// Time of the last recorded entry.
    pub fn t(&self) -> Option<f64> {
        self.t
    }

    pub fn words(&self) -> &[WordEnergy] {
        &self.words
    }

    /// Adds an entry; times must increase and the words must match the plan.
    pub fn record(&mut self, entry: &EnergyEntry) -> Result<()> {
        if entry.words.len() != self.words.len()
            || entry.words.iter().zip(&self.words).any(|(a, b)| a.word != b.word)
        {
            return Err(Error::Config("energy entry does not match the ledger plan".into()));
        }
        let h = match self.t {
            Some(t0) if entry.t <= t0 => {
                return Err(Error::Config(format!(
                    "energy entry at t = {} does not follow t = {t0}",
                    entry.t
                )))
            }
            Some(t0) => entry.t - t0,
            None => 0.0,
        };
        for (w, s) in self.words.iter_mut().zip(&entry.words) {
            w.dissipation += self.nu * 0.5 * h * (w.last_grad_v_sq + s.grad_v_sq);
            w.half_norm_sq = s.half_norm_sq;
            w.last_grad_v_sq = s.grad_v_sq;
        }
        self.t = Some(entry.t);
        Ok(())
    }

    fn sum(&self, p: usize, q: usize, f: impl Fn(&WordEnergy) -> f64) -> f64 {
        self.words
            .iter()
            .filter(|w| w.word.order() <= p && w.word.scaling <= q)
            .map(f)
            .sum()
    }

    /// `Σ ½‖S^kΓ^a U‖²` over `k ≤ q`, `k + |a| ≤ p`.
    pub fn instantaneous(&self, p: usize, q: usize) -> f64 {
        self.sum(p, q, |w| w.half_norm_sq)
    }

    pub fn dissipation(&self, p: usize, q: usize) -> f64 {
        self.sum(p, q, |w| w.dissipation)
    }

    /// `E_{p,q}(t)`, instantaneous part plus dissipation.
    pub fn total(&self, p: usize, q: usize) -> f64 {
        self.instantaneous(p, q) + self.dissipation(p, q)
    }
}

/// Localized energies, their weighted time integrals and the null norms.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayRecord {
    pub(crate) nu: f64,
    pub(crate) thetas: Vec<f64>,
    pub(crate) t: Option<f64>,
    pub(crate) last: LocalEntry,
    /// `∫₀ᵗ⟨s⟩^θ [Y + ν²Z] ds` for each θ.
    pub(crate) integrals: Vec<f64>,
    pub(crate) null: super::NullNorms,
}

impl DecayRecord {
    pub fn new(nu: f64, thetas: &[f64]) -> Self {
        Self {
            nu,
            thetas: thetas.to_vec(),
            t: None,
            last: LocalEntry::default(),
            integrals: vec![0.0; thetas.len()],
            null: super::NullNorms::default(),
        }
    }

    pub fn record(&mut self, local: &LocalEntry, null: &super::NullNorms) -> Result<()> {
        let f = |e: &LocalEntry, th: f64| japanese(e.t).powf(th) * (e.y + self.nu * self.nu * e.z);
        if let Some(t0) = self.t {
            if local.t <= t0 {
                return Err(Error::Config(format!(
                    "decay entry at t = {} does not follow t = {t0}",
                    local.t
                )));
            }
            let h = local.t - t0;
            for (acc, &th) in self.integrals.iter_mut().zip(&self.thetas) {
                *acc += 0.5 * h * (f(&self.last, th) + f(local, th));
            }
        }
        self.t = Some(local.t);
        self.last = *local;
        self.null = *null;
        Ok(())
    }

    pub fn y(&self) -> f64 {
        self.last.y
    }

    pub fn z(&self) -> f64 {
        self.last.z
    }

    pub fn null_norms(&self) -> &super::NullNorms {
        &self.null
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Weighted integral for `theta`, if tracked.
    pub fn weighted(&self, theta: f64) -> Option<f64> {
        self.thetas
            .iter()
            .position(|&th| th == theta)
            .map(|i| self.integrals[i])
    }
}

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{ScalarField, SpectralGrid, State};

use super::plan::{Generator, MultiIndexPlan, Word};
use super::tensor::{Tensor, TensorField};

/// Spectral form of `U = (G, v)`.
#[derive(Clone, Debug)]
pub struct FieldPair {
    pub g: Tensor,
    pub v: Tensor,
}

impl FieldPair {
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        Self {
            g: Tensor::zeros(grid, 2),
            v: Tensor::zeros(grid, 1),
        }
    }

    pub fn from_state(state: &State) -> Self {
        Self {
            g: state.g.to_tensor(),
            v: state.v.to_tensor(),
        }
    }

    /// Physical state at time `t`.
    pub fn to_state(&self, t: f64) -> State {
        State {
            t,
            g: TensorField::from_tensor(&self.g),
            v: TensorField::from_tensor(&self.v),
        }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.v.grid()
    }

    pub fn map(&self, f: impl Fn(&Tensor) -> Tensor) -> Self {
        Self {
            g: f(&self.g),
            v: f(&self.v),
        }
    }

    pub fn apply(&self, gen: Generator) -> Self {
        match gen {
            Generator::Partial(a) => self.map(|t| t.partial(a)),
            Generator::Rotation(l) => self.map(|t| t.omega_tilde(l)),
        }
    }

    pub fn s0(&self) -> Self {
        self.map(Tensor::s0)
    }

    pub fn multiply(&self, w: &ScalarField) -> Self {
        self.map(|t| t.multiply(w))
    }

    pub fn axpy(&mut self, s: f64, other: &Self) {
        self.g.axpy(s, &other.g);
        self.v.axpy(s, &other.v);
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|t| t.scale(s))
    }

    pub fn norm_squared(&self) -> f64 {
        self.g.norm_squared() + self.v.norm_squared()
    }
}

/// Walks every word of `plan` applied to `u`, calling `visit` once per word.
///
/// Words containing a rotation or the scaling field act on `window·u`; pure
/// translation words act on `u` itself. `S` words use
/// `S Γ^a U = t·Γ^a ∂ₜU + S₀ Γ^a U`, with `dudt = None` allowed only at
/// `t = 0`. Words arrive in depth-first order, not plan order.
pub fn visit_words(
    plan: &MultiIndexPlan,
    u: &FieldPair,
    dudt: Option<&FieldPair>,
    t: f64,
    window: &ScalarField,
    mut visit: impl FnMut(&Word, &FieldPair),
) -> Result<()> {
    if plan.q() > 1 {
        return Err(Error::PlanExceedsCaps(format!(
            "scaling words beyond first order are not available, q = {}",
            plan.q()
        )));
    }
    if t != 0.0 && dudt.is_none() && plan.q() > 0 {
        return Err(Error::Config("time derivative required for t > 0".into()));
    }
    let p = plan.p();
    translations(u, &mut Vec::new(), p, &mut visit);

    let wu = u.multiply(window);
    let wdt = match dudt {
        Some(d) if plan.q() > 0 && t != 0.0 => Some(d.multiply(window)),
        _ => None,
    };
    let ctx = Walk {
        p,
        q: plan.q(),
        t,
    };
    ctx.descend(&wu, wdt.as_ref(), &mut Vec::new(), &mut visit);
    Ok(())
}

fn translations(
    node: &FieldPair,
    letters: &mut Vec<Generator>,
    p: usize,
    visit: &mut impl FnMut(&Word, &FieldPair),
) {
    visit(
        &Word {
            scaling: 0,
            letters: letters.clone(),
        },
        node,
    );
    if letters.len() == p {
        return;
    }
    for a in 0..3 {
        let child = node.apply(Generator::Partial(a));
        letters.insert(0, Generator::Partial(a));
        translations(&child, letters, p, visit);
        letters.remove(0);
    }
}

struct Walk {
    p: usize,
    q: usize,
    t: f64,
}

impl Walk {
    fn descend(
        &self,
        node: &FieldPair,
        node_dt: Option<&FieldPair>,
        letters: &mut Vec<Generator>,
        visit: &mut impl FnMut(&Word, &FieldPair),
    ) {
        let has_rotation = letters.iter().any(|g| g.is_rotation());
        if has_rotation {
            visit(
                &Word {
                    scaling: 0,
                    letters: letters.clone(),
                },
                node,
            );
        }
        if self.q > 0 && letters.len() < self.p {
            let mut su = node.s0();
            if let Some(d) = node_dt {
                su.axpy(self.t, d);
            }
            visit(
                &Word {
                    scaling: 1,
                    letters: letters.clone(),
                },
                &su,
            );
        }
        if letters.len() == self.p {
            return;
        }
        let need_dt = self.q > 0 && letters.len() + 1 < self.p;
        for gen in Generator::ALL {
            letters.insert(0, gen);
            // a full-length translation word is already covered unwindowed
            if has_rotation || gen.is_rotation() || letters.len() < self.p {
                let child = node.apply(gen);
                let child_dt = match node_dt {
                    Some(d) if need_dt => Some(d.apply(gen)),
                    _ => None,
                };
                self.descend(&child, child_dt.as_ref(), letters, visit);
            }
            letters.remove(0);
        }
    }
}

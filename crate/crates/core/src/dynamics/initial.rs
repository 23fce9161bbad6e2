use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{visit_words, FieldPair, MultiIndexPlan, Tensor, Window};
use crate::error::{Error, Result};
use crate::grid::{MatrixField, ScalarField, SpectralGrid, Spectrum, State, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataKind {
    /// `ε·(sin x₁ cos x₂ cos x₃, −cos x₁ sin x₂ cos x₃, 0)` at the box scale.
    TaylorGreen,
    /// Curl of a Gaussian-enveloped random band-limited vector potential.
    RandomSolenoidal,
}

impl FromStr for DataKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor-green" => Ok(DataKind::TaylorGreen),
            "random-solenoidal" => Ok(DataKind::RandomSolenoidal),
            other => Err(Error::Config(format!("unknown data kind {other:?}"))),
        }
    }
}

impl fmt::Display for DataKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DataKind::TaylorGreen => "taylor-green",
            DataKind::RandomSolenoidal => "random-solenoidal",
        })
    }
}

/// Full description of an initial velocity.
#[derive(Clone, Debug, PartialEq)]
pub struct DataSpec {
    pub kind: DataKind,
    pub epsilon: f64,
    pub seed: u64,
    /// Radius `R₀` of the ball holding localized data.
    pub radius: f64,
    /// Plan whose norm is normalized to `epsilon` for localized data.
    pub plan: MultiIndexPlan,
    pub window: Window,
}

impl DataSpec {
    /// Defaults for a box of side `length`: `R₀ = L/8`, plan `(2, 1)`.
    pub fn new(kind: DataKind, epsilon: f64, seed: u64, length: f64) -> Self {
        Self {
            kind,
            epsilon,
            seed,
            radius: length / 8.0,
            plan: MultiIndexPlan::new(2, 1).expect("valid default plan"),
            window: Window::default_for(length),
        }
    }
}

/// Admissible initial state with `G = 0` and default [`DataSpec`] settings.
pub fn make_initial_data(
    grid: &Arc<SpectralGrid>,
    kind: DataKind,
    epsilon: f64,
    seed: u64,
) -> Result<State> {
    make_initial_data_with(grid, &DataSpec::new(kind, epsilon, seed, grid.length()))
}

/// Admissible initial state with `G = 0`.
///
/// Taylor–Green data has maximum velocity `ε`. Random data is scaled so that
/// `(Σ_words ‖Γ-word v₀‖²)^{1/2}` over the spec's plan equals `ε`.
pub fn make_initial_data_with(grid: &Arc<SpectralGrid>, spec: &DataSpec) -> Result<State> {
    if !(spec.epsilon.is_finite() && spec.epsilon >= 0.0) {
        return Err(Error::Config(format!("epsilon must be >= 0, got {}", spec.epsilon)));
    }
    if spec.epsilon == 0.0 {
        return Ok(State::zeros(grid, 0.0));
    }
    match spec.kind {
        DataKind::TaylorGreen => {
            let k = 2.0 * std::f64::consts::PI / grid.length();
            let e = spec.epsilon;
            let v = VectorField::from_fn(grid, |x| {
                let (s1, c1) = (k * x[0]).sin_cos();
                let (s2, c2) = (k * x[1]).sin_cos();
                let c3 = (k * x[2]).cos();
                [e * s1 * c2 * c3, -e * c1 * s2 * c3, 0.0]
            });
            State::new(0.0, MatrixField::zeros(grid), v)
        }
        DataKind::RandomSolenoidal => random_solenoidal(grid, spec),
    }
}

fn random_solenoidal(grid: &Arc<SpectralGrid>, spec: &DataSpec) -> Result<State> {
    if !(spec.radius > 0.0 && spec.radius <= grid.length() / 4.0) {
        return Err(Error::Config(format!(
            "data radius must lie in (0, L/4], got {}",
            spec.radius
        )));
    }
    let width = spec.radius / 3.5;
    let kb = 1.0 / width;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let potential: Vec<Spectrum> = (0..3)
        .map(|_| {
            let mut c = vec![Complex64::default(); grid.len()];
            for m in 0..grid.len() {
                let k2 = grid.k_squared(m);
                if k2 == 0.0 || k2 > kb * kb {
                    continue;
                }
                let mirror = grid.mirror(m);
                if mirror < m {
                    continue;
                }
                let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if mirror == m {
                    c[m] = Complex64::new(a.re, 0.0);
                } else {
                    c[m] = a;
                    c[mirror] = a.conj();
                }
            }
            Spectrum::from_raw(grid, c)
        })
        .collect();
    let envelope = ScalarField::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|a| a * a).sum();
        (-r2 / (2.0 * width * width)).exp()
    });
    let a = Tensor::from_components(grid, 1, potential)
        .multiply(&envelope)
        .dealias();

    // v = ∇ × A
    let curl = |j: usize, k: usize| {
        let mut c = a.components()[k].partial(j);
        c.axpy(-1.0, &a.components()[j].partial(k));
        c
    };
    let mut v = Tensor::from_components(grid, 1, vec![curl(1, 2), curl(2, 0), curl(0, 1)]);
    for c in v.components_mut() {
        c.coefficients_mut()[0] = Complex64::default();
    }

    let u = FieldPair {
        g: Tensor::zeros(grid, 2),
        v,
    };
    let norm = plan_norm(&u, &spec.plan, &spec.window)?;
    if norm == 0.0 {
        return Ok(State::zeros(grid, 0.0));
    }
    Ok(u.scale(spec.epsilon / norm).to_state(0.0))
}

/// `(Σ_words ‖S₀^k Γ^a U‖²)^{1/2}` at `t = 0`.
pub fn plan_norm(u: &FieldPair, plan: &MultiIndexPlan, window: &Window) -> Result<f64> {
    let w = window.field(u.grid());
    let mut total = 0.0;
    visit_words(plan, u, None, 0.0, &w, |_, node| total += node.norm_squared())?;
    Ok(total.sqrt())
}

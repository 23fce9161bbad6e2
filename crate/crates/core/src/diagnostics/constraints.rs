use crate::calculus::{
    column_divergence, curl_g, q_compat, radius, CutoffFamily, Generator, Tensor, TensorField,
};
use crate::grid::{ScalarField, Spectrum, State};

/// L² norms of the three constraint defects.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConstraintResiduals {
    /// `‖∇·v‖₂`.
    pub div_v: f64,
    /// `‖∂_i G_ij‖₂`.
    pub div_gt: f64,
    /// `‖∂_k G_ij − ∂_j G_ik − Q_ijk‖₂` with `Q` restricted to the retained modes.
    pub compat: f64,
}

impl ConstraintResiduals {
    /// Every entry divided by `scale`; all zero when `scale` is zero.
    pub fn relative(&self, scale: f64) -> Self {
        if scale == 0.0 {
            return Self::default();
        }
        Self {
            div_v: self.div_v / scale,
            div_gt: self.div_gt / scale,
            compat: self.compat / scale,
        }
    }
}

pub fn constraint_residuals(state: &State) -> ConstraintResiduals {
    let v = state.v.to_tensor();
    let mut div = Spectrum::zeros(state.grid());
    for (i, c) in v.components().iter().enumerate() {
        div.axpy(1.0, &c.partial(i));
    }
    let g = state.g.to_tensor();
    let div_gt = column_divergence(&g).norm();

    let q = q_compat(&state.g);
    let refs: Vec<&ScalarField> = q.components().collect();
    let q_hat = Tensor::from_physical(3, &refs).dealias();
    let mut defect = curl_g(&g);
    defect.axpy(-1.0, &q_hat);
    ConstraintResiduals {
        div_v: div.norm(),
        div_gt,
        compat: defect.norm(),
    }
}

/// Sup norms of the radial components in the exterior region, and the
/// volume defect.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NullNorms {
    /// `max η|Gᵀω|`, `(Gᵀω)_j = G_ij ω_i`.
    pub eta_gw: f64,
    /// `max η|ω·v|`.
    pub eta_wv: f64,
    /// `max|det(I + G) − 1|`.
    pub det_dev: f64,
}

/// `ω = x/|x|` is taken as zero at the grid point on the origin.
pub fn null_norms(state: &State, cutoffs: &CutoffFamily) -> NullNorms {
    let grid = state.grid();
    let half = 0.5 * grid.dx();
    let mut out = NullNorms::default();
    grid.for_each_point(|p, x| {
        let g = state.g.at(p);
        out.det_dev = out.det_dev.max((det_identity_plus(&g) - 1.0).abs());
        let r = radius(x);
        if r < half {
            return;
        }
        let eta = cutoffs.eta(state.t, x);
        if eta == 0.0 {
            return;
        }
        let w = [x[0] / r, x[1] / r, x[2] / r];
        let gw = (0..3)
            .map(|j| (0..3).map(|i| g[i][j] * w[i]).sum::<f64>().powi(2))
            .sum::<f64>()
            .sqrt();
        let v = state.v.at(p);
        let wv = (0..3).map(|i| w[i] * v[i]).sum::<f64>().abs();
        out.eta_gw = out.eta_gw.max(eta * gw);
        out.eta_wv = out.eta_wv.max(eta * wv);
    });
    out
}

/// `det(I + G)` by cofactor expansion along the first row.
pub fn det_identity_plus(g: &[[f64; 3]; 3]) -> f64 {
    let a = |i: usize, j: usize| g[i][j] + if i == j { 1.0 } else { 0.0 };
    a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
}

/// `‖rU‖∞² / (Σ_{|a|≤1}‖∂_r Ω̃ᵃU‖₂ · Σ_{|a|≤2}‖Ω̃ᵃU‖₂)`, or `0` when either
/// side vanishes. `state` should already be windowed.
pub fn sobolev_ratio(state: &State) -> f64 {
    let grid = state.grid().clone();
    let mut sup: f64 = 0.0;
    grid.for_each_point(|p, x| {
        let g = state.g.at(p);
        let v = state.v.at(p);
        let m2: f64 = g.iter().flatten().chain(v.iter()).map(|a| a * a).sum();
        sup = sup.max(radius(x) * m2.sqrt());
    });
    let lhs = sup * sup;
    if lhs == 0.0 {
        return 0.0;
    }

    let u = crate::calculus::FieldPair::from_state(state);
    let radial_norm = |f: &crate::calculus::FieldPair| -> f64 {
        (radial_sq(&f.g) + radial_sq(&f.v)).sqrt()
    };
    let mut first = radial_norm(&u);
    let mut second = u.norm_squared().sqrt();
    for l in 0..3 {
        let a = u.apply(Generator::Rotation(l));
        first += radial_norm(&a);
        second += a.norm_squared().sqrt();
        for m in 0..3 {
            second += a.apply(Generator::Rotation(m)).norm_squared().sqrt();
        }
    }
    let denom = first * second;
    if denom == 0.0 {
        0.0
    } else {
        lhs / denom
    }
}

/// `‖∂_r t‖₂²` with `∂_r = ω·∇`, skipping the origin point.
fn radial_sq(t: &Tensor) -> f64 {
    let grid = t.grid().clone();
    let half = 0.5 * grid.dx();
    let grad = t.gradient().to_physical();
    let ncomp = t.components().len();
    let mut total = 0.0;
    grid.for_each_point(|p, x| {
        let r = radius(x);
        if r < half {
            return;
        }
        for c in 0..ncomp {
            let d: f64 = (0..3).map(|a| x[a] * grad[c * 3 + a].values()[p]).sum::<f64>() / r;
            total += d * d;
        }
    });
    total * grid.cell_volume()
}

use super::*;

#[test]
fn scalar_commutation_passes() {
    let r = check_scalar_commutation(&Ensemble::new(1, 3)).unwrap();
    assert!(r.pass, "{r}");
}

#[test]
fn linear_commutation_passes_with_and_without_viscosity() {
    for nu in [0.0, 0.5] {
        let r = check_linear_commutation(&Ensemble::new(2, 2), nu).unwrap();
        assert!(r.pass, "{r}");
    }
}

#[test]
fn linear_commutation_detects_wrong_shift() {
    // dropping the `+1` on the right must show up
    let grid = make_grid(32, 2.0 * std::f64::consts::PI).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u0 = windowed_pair(&grid, &mut rng, 3, 10);
    let good = linear_commutation_residual(&u0, None, 0.3, 1.0, 0.8);
    let bad = linear_commutation_residual(&u0, None, 0.3, 1.0, 0.0) + {
        let mut lhs = u0.s0();
        lhs.axpy(1.0, &u0);
        pair_diff(&u0.s0(), &lhs)
    };
    assert!(good < 1e-8 && bad > 1e-3, "{good} {bad}");
}

#[test]
fn nonlinear_leibniz_passes() {
    let r = check_nonlinear_leibniz(&Ensemble::new(3, 2)).unwrap();
    assert!(r.pass, "{r}");
}

#[test]
fn nonlinear_leibniz_passes_on_richer_fields() {
    let ens = Ensemble {
        n: 48,
        ..Ensemble::new(3, 1)
    };
    let r = check_nonlinear_leibniz(&ens).unwrap();
    assert!(r.pass, "{r}");
}

#[test]
fn quadratic_forms_match_hand_value() {
    // G = diag(x₁, 0, 0) near the origin, v = 0: N₂ = (2x₁, 0, 0)
    let grid = make_grid(16, 2.0 * std::f64::consts::PI).unwrap();
    let s = ScalarField::from_fn(&grid, |x| x[0].sin());
    let z = ScalarField::zeros(&grid);
    let mut g: Vec<&ScalarField> = vec![&z; 9];
    g[0] = &s;
    let u = FieldPair {
        g: Tensor::from_physical(2, &g),
        v: Tensor::from_physical(1, &[&z, &z, &z]),
    };
    let n = quadratic_forms(&u, &u).v.to_physical();
    let expect = ScalarField::from_fn(&grid, |x| 2.0 * x[0].sin() * x[0].cos());
    let mut d = n[0].clone();
    d.axpy(-1.0, &expect);
    assert!(d.max_abs() < 1e-12);
}

#[test]
fn pressure_commutation_passes() {
    let r = check_pressure_commutation(&Ensemble::new(4, 1)).unwrap();
    assert!(r.pass, "{r}");
}

#[test]
fn div2grad_passes() {
    let r = check_div2grad(&Ensemble::new(5, 2)).unwrap();
    assert!(r.pass, "{r}");
    assert!(r.measured.unwrap() < 1e-3, "{r}");
}

#[test]
fn deformation_gradient_is_exact_for_a_shear() {
    // a single wide bump is close to affine near its center
    let def = Deformation {
        centers: vec![[0.0; 3]],
        amplitudes: vec![[0.1, 0.0, 0.0]],
        width: 50.0,
    };
    let grid = make_grid(8, 2.0).unwrap();
    let g = def.displacement_gradient(&grid);
    assert!(g.max_abs() < 1e-3);
}

#[test]
fn null_ratio_vanishes_for_rigid_rotation() {
    let grid = make_grid(32, 2.0 * std::f64::consts::PI).unwrap();
    let w = Window::CosinePower { m: 6 };
    let l = grid.length();
    let comps: Vec<ScalarField> = (0..3)
        .map(|i| {
            ScalarField::from_fn(&grid, |x| {
                let ax = [-x[1], x[0], 0.0];
                ax[i] * w.value(x, l)
            })
        })
        .collect();
    let z = ScalarField::zeros(&grid);
    let u = FieldPair {
        g: Tensor::from_physical(2, &[&z; 9]),
        v: Tensor::from_physical(1, &comps.iter().collect::<Vec<_>>()),
    };
    let r = null_pointwise_ratio(&u);
    assert!(r < 1e-6, "{r}");
}

#[test]
fn report_line_format() {
    let r = IdentityReport::new("x", 3, 1e-10, 1e-9);
    let s = r.to_string();
    assert!(s.starts_with("x ") && s.ends_with("PASS"), "{s}");
}

#[test]
fn null_ratio_is_stable_under_refinement() {
    let r = check_null_pointwise(&Ensemble::new(6, 1)).unwrap();
    assert!(r.pass, "{r}");
}

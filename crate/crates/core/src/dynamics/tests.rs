use std::f64::consts::PI;

use super::*;
use crate::calculus::{divergence_vec, gradient_vec, partial, pressure_solve};
use crate::error::Error;
use crate::grid::{make_grid, MatrixField, ScalarField, State, VectorField};

fn tg(n: usize, eps: f64) -> State {
    let g = make_grid(n, 2.0 * PI).unwrap();
    make_initial_data(&g, DataKind::TaylorGreen, eps, 0).unwrap()
}

#[test]
fn zero_state_has_zero_rhs() {
    let s = State::zeros(&make_grid(8, 3.0).unwrap(), 0.0);
    let r = rhs(&s, 0.3).unwrap();
    assert_eq!(r.dg.max_abs(), 0.0);
    assert_eq!(r.dv.max_abs(), 0.0);
    assert_eq!(r.pi.max_abs(), 0.0);
}

#[test]
fn rejects_non_finite_state() {
    let mut s = tg(8, 0.1);
    s.v.0[1].values_mut()[3] = f64::INFINITY;
    assert!(matches!(rhs(&s, 0.0), Err(Error::NonFinite { .. })));
}

#[test]
fn taylor_green_rhs_matches_hand_assembly() {
    let s = tg(16, 0.7);
    let r = rhs(&s, 0.0).unwrap();
    assert!((&r.dg - &gradient_vec(&s.v)).max_abs() < 1e-14);
    let gv = gradient_vec(&s.v);
    let pi = pressure_solve(&s.g, &s.v);
    let expect = VectorField(std::array::from_fn(|i| {
        let mut acc = ScalarField::zeros(s.grid());
        for j in 0..3 {
            acc = &acc - &s.v.0[j].mul(&gv.0[i][j]);
        }
        &acc - &partial(&pi, i)
    }));
    assert!((&r.dv - &expect).max_abs() < 1e-14);
    assert!(divergence_vec(&r.dv).max_abs() < 1e-13);
}

#[test]
fn projected_and_pressure_assemblies_agree() {
    let g = make_grid(16, 8.0).unwrap();
    let mut spec = DataSpec::new(DataKind::RandomSolenoidal, 0.3, 4, 8.0);
    spec.plan = crate::calculus::MultiIndexPlan::new(1, 0).unwrap();
    let mut s = make_initial_data_with(&g, &spec).unwrap();
    let phys = Physics::new(0.1);
    let integ = Integrator::new(phys, IntegratorConfig::default()).unwrap();
    for _ in 0..3 {
        let dt = integ.cfl_dt(&s);
        s = integ.step(&s, dt).unwrap();
    }
    assert!(s.g.max_abs() > 0.0);
    let a = rhs_with(&s, &phys).unwrap().dv;
    let b = dv_with_pressure(&s, &phys).unwrap();
    let scale = a.max_abs();
    assert!((&a - &b).max_abs() < 1e-10 * scale, "{}", (&a - &b).max_abs() / scale);
}

#[test]
fn linearization_defect_is_quadratic() {
    let g = make_grid(16, 2.0 * PI).unwrap();
    let base = VectorField::from_fn(&g, |x| {
        [x[1].sin() + (x[2]).cos(), (x[2] + x[0]).sin(), (x[0]).cos()]
    });
    let gbase = MatrixField::from_fn(&g, |x| {
        std::array::from_fn(|i| std::array::from_fn(|j| 0.1 * ((i + 2 * j + 1) as f64 * 0.3 + x[j]).sin()))
    });
    let lin = |a: f64| {
        let s = State::new(0.0, gbase.scale(a), base.scale(a)).unwrap();
        let r = rhs_with(&s, &Physics::new(0.2)).unwrap();
        let l = rhs_with(&s, &Physics::linear(0.2)).unwrap();
        ((&r.dg - &l.dg).max_abs()).max((&r.dv - &l.dv).max_abs())
    };
    let (e1, e2) = (lin(1e-2), lin(1e-3));
    let slope = (e1 / e2).log10();
    assert!((slope - 2.0).abs() < 0.05, "{slope}");
}

#[test]
fn zero_state_stays_zero() {
    let s = State::zeros(&make_grid(8, 2.0).unwrap(), 0.0);
    let integ = Integrator::new(Physics::new(1.0), IntegratorConfig::default()).unwrap();
    let next = integ.step(&s, integ.cfl_dt(&s)).unwrap();
    assert_eq!(next.max_abs(), 0.0);
}

#[test]
fn heat_kernel_is_exact() {
    let l = 2.0 * PI;
    let g = make_grid(16, l).unwrap();
    let v = VectorField::from_fn(&g, |x| [0.0, (3.0 * x[0]).sin(), 0.0]);
    for nu in [0.01, 1.0] {
        let phys = Physics {
            nu,
            nonlinear: true,
            elastic: false,
        };
        for scheme in [Scheme::Rk4Exponential, Scheme::Ssprk3Exponential] {
            let cfg = IntegratorConfig {
                scheme,
                cfl: 0.9,
                dt_max: 0.05,
            };
            let integ = Integrator::new(phys, cfg).unwrap();
            let mut s = State::new(0.0, MatrixField::zeros(&g), v.clone()).unwrap();
            for _ in 0..20 {
                let dt = integ.cfl_dt(&s);
                s = integ.step(&s, dt).unwrap();
            }
            let expect = v.scale((-nu * 9.0 * s.t).exp());
            let err = (&s.v - &expect).max_abs() / expect.max_abs();
            assert!(err < 1e-10, "{scheme} {nu} {err}");
        }
    }
}

/// Runs the linear plane wave to `t_end` with `steps` equal steps.
fn plane_wave_error(steps: usize) -> f64 {
    let l = 2.0 * PI;
    let g = make_grid(16, l).unwrap();
    let k = [2.0, 1.0, 0.0];
    let kn = (5.0f64).sqrt();
    let e = [0.0, 0.0, 1.0];
    let a = 0.3;
    let exact = |t: f64| {
        let v = VectorField::from_fn(&g, |x| {
            let ph = k[0] * x[0] + k[1] * x[1];
            std::array::from_fn(|i| a * (kn * t).cos() * ph.sin() * e[i])
        });
        let m = MatrixField::from_fn(&g, |x| {
            let ph = k[0] * x[0] + k[1] * x[1];
            std::array::from_fn(|i| {
                std::array::from_fn(|j| a * (kn * t).sin() / kn * e[i] * k[j] * ph.cos())
            })
        });
        State::new(t, m, v).unwrap()
    };
    let t_end = 1.0;
    let dt = t_end / steps as f64;
    let cfg = IntegratorConfig {
        scheme: Scheme::Rk4Exponential,
        cfl: 1.0,
        dt_max: 1.0,
    };
    let integ = Integrator::new(Physics::linear(0.0), cfg).unwrap();
    let mut s = exact(0.0);
    for _ in 0..steps {
        s = integ.step(&s, dt).unwrap();
    }
    let ex = exact(t_end);
    (&s.v - &ex.v).max_abs().max((&s.g - &ex.g).max_abs())
}

#[test]
fn plane_wave_is_fourth_order() {
    let e1 = plane_wave_error(10);
    let e2 = plane_wave_error(20);
    let order = (e1 / e2).log2();
    assert!(order > 3.8 && order < 4.3, "{order}");
}

#[test]
fn cfl_examples() {
    let g = make_grid(16, 4.0).unwrap();
    let cfg = IntegratorConfig {
        scheme: Scheme::Rk4Exponential,
        cfl: 0.5,
        dt_max: 10.0,
    };
    let z = State::zeros(&g, 0.0);
    assert_eq!(cfl_dt(&z, &cfg), 0.5 * g.dx());
    let mut one = z.clone();
    one.v.0[0] = ScalarField::constant(&g, 1.0);
    assert!((cfl_dt(&one, &cfg) - 0.25 * g.dx()).abs() < 1e-15);
    let capped = IntegratorConfig { dt_max: 0.01, ..cfg };
    assert_eq!(cfl_dt(&z, &capped), 0.005);
    let integ = Integrator::new(Physics::new(0.0), cfg).unwrap();
    assert!(matches!(
        integ.step(&z, g.dx()),
        Err(Error::StepTooLarge { .. })
    ));
    assert!(IntegratorConfig { cfl: 1.5, ..cfg }.validate().is_err());
    assert!(IntegratorConfig { cfl: 0.0, ..cfg }.validate().is_err());
}

#[test]
fn blow_up_guard_trips() {
    let small = tg(8, 1e-6);
    let big = tg(8, 1e-2);
    let integ = Integrator::new(Physics::new(0.0), IntegratorConfig::default())
        .unwrap()
        .with_guard(&small);
    let err = integ.step(&big, integ.cfl_dt(&big)).unwrap_err();
    assert!(matches!(err, Error::BlowUp { .. }));
}

#[test]
fn initial_data_properties() {
    let g = make_grid(16, 16.0).unwrap();
    let z = make_initial_data(&g, DataKind::RandomSolenoidal, 0.0, 1).unwrap();
    assert_eq!(z.max_abs(), 0.0);
    let t = make_initial_data(&g, DataKind::TaylorGreen, 0.2, 1).unwrap();
    assert!(divergence_vec(&t.v).max_abs() < 1e-12);
    assert!((t.v.max_abs() - 0.2).abs() < 1e-2);
    let mut spec = DataSpec::new(DataKind::RandomSolenoidal, 0.01, 42, 16.0);
    spec.plan = crate::calculus::MultiIndexPlan::new(1, 1).unwrap();
    let a = make_initial_data_with(&g, &spec).unwrap();
    let b = make_initial_data_with(&g, &spec).unwrap();
    assert_eq!(a.g.max_abs(), 0.0);
    for (x, y) in a.components().zip(b.components()) {
        assert!(x.values().iter().zip(y.values()).all(|(p, q)| p.to_bits() == q.to_bits()));
    }
    assert!(divergence_vec(&a.v).max_abs() < 1e-12 * a.v.max_abs().max(1e-300) * 10.0);
    for c in &a.v.0 {
        assert!(c.integral().abs() < 1e-14);
    }
    let u = crate::calculus::FieldPair::from_state(&a);
    let norm = plan_norm(&u, &spec.plan, &spec.window).unwrap();
    assert!((norm - 0.01).abs() < 1e-12);
    assert!(DataKind::TaylorGreen.to_string().parse::<DataKind>().is_ok());
    assert!("vortex".parse::<DataKind>().is_err());
}

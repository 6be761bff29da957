mod common;

use common::{fd_gradient, fit_problem, random_net, rel_error, small, Rng};
use galerkin_nn::catalog;
use galerkin_nn::galerkin::galerkin_lsq;
use galerkin_nn::{eta, eta_gradient, ActivationSpec, ShallowNetwork};

#[test]
fn eta_gradient_matches_finite_differences_per_form_kind() {
    let cases = [
        ("l2_fit", 32),
        ("string_1d", 32),
        ("membrane_2d", 10),
        ("beam_1d", 32),
        ("plate_point_load", 10),
    ];
    let mut rng = Rng::new(3);
    for (name, nq) in cases {
        let p = small(name, nq);
        let d = p.training();
        for k in 0..10 {
            let u = d.sample_network(&random_net(&p, 3, &mut rng)).unwrap();
            let net = random_net(&p, 4, &mut rng);
            let g = eta_gradient(&p, &u, &net).unwrap();
            let fd = fd_gradient(&p, &u, &net, 1e-6);
            let e = rel_error(&g, &fd);
            assert!(e < 1e-5, "{name} #{k}: {e:e}");
        }
    }
}

#[test]
fn eta_is_scale_invariant() {
    let p = catalog::problem("string_1d").unwrap();
    let mut rng = Rng::new(4);
    let u = p.training().zero_bundle();
    let v = random_net(&p, 8, &mut rng);
    let a = eta(&p, &u, &v).unwrap();
    let b = eta(&p, &u, &v.scale_output(2.0)).unwrap();
    assert!((a - b).abs() <= 1e-12 * a.abs());
}

#[test]
fn eta_at_exact_solution_is_small() {
    let p = catalog::problem("string_1d").unwrap();
    let u = p.training().sample_exact(p.exact.as_ref().unwrap());
    let mut rng = Rng::new(5);
    for _ in 0..5 {
        let v = random_net(&p, 6, &mut rng);
        let vb = p.training().sample_network(&v).unwrap();
        let scale = p.load(&vb).unwrap().abs() / p.energy_norm(&vb).unwrap().value;
        assert!(eta(&p, &u, &v).unwrap().abs() <= 1e-6 * scale);
    }
}

#[test]
fn eta_of_target_direction_is_its_norm() {
    // l2 fit with f representable by one activation: v = f gives eta = ||f||
    let act = ActivationSpec::tanh(2.0);
    let f = move |x: f64| (2.0 * (x - 0.3)).tanh();
    let p = fit_problem(64, f);
    let net = ShallowNetwork::new(1, vec![1.0], vec![-0.3], vec![1.0], act).unwrap();
    let zero = p.training().zero_bundle();
    let vb = p.training().sample_network(&net).unwrap();
    let norm = p.training().l2_norm(&vb);
    assert!((eta(&p, &zero, &net).unwrap() - norm).abs() < 1e-14);
    // stationary: gradient vanishes at the exact direction
    let g = eta_gradient(&p, &zero, &net).unwrap();
    assert!(g.iter().map(|x| x * x).sum::<f64>().sqrt() <= 1e-6);
}

#[test]
fn unit_with_zero_coefficient_has_zero_gradient() {
    let p = catalog::problem("string_1d").unwrap();
    let mut rng = Rng::new(6);
    let mut net = random_net(&p, 5, &mut rng);
    let mut c = net.coeffs().to_vec();
    c[2] = 0.0;
    net.set_coeffs(&c).unwrap();
    let g = eta_gradient(&p, &p.training().zero_bundle(), &net).unwrap();
    assert_eq!(g[2], 0.0);
    assert_eq!(g[5 + 2], 0.0);
}

#[test]
fn least_squares_coefficients_maximize_eta() {
    let mut rng = Rng::new(7);
    for name in ["l2_fit", "string_1d", "beam_1d"] {
        let p = small(name, 64);
        let zero = p.training().zero_bundle();
        let net = random_net(&p, 6, &mut rng);
        let c = galerkin_lsq(net.weights(), net.biases(), net.activation(), &p, &zero).unwrap();
        let mut best = net.clone();
        best.set_coeffs(&c).unwrap();
        let top = eta(&p, &zero, &best).unwrap();
        for _ in 0..20 {
            let mut other = net.clone();
            let c: Vec<f64> = (0..6).map(|_| rng.uniform(-1.0, 1.0)).collect();
            other.set_coeffs(&c).unwrap();
            assert!(eta(&p, &zero, &other).unwrap() <= top + 1e-10 * top.abs(), "{name}");
        }
    }
}

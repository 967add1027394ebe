use spherelab::radial::sphere_area;
use spherelab::*;
use std::f64::consts::PI;

fn params(kappa2: f64, gamma: f64) -> Params {
    Params::with_kappa2(kappa2, gamma).unwrap()
}

#[test]
fn equilibria() {
    for kappa in [0.5, 3.0, 7.0] {
        let p = Params::new(kappa, 0.4).unwrap();
        let zero = shoot(0.0, &p, 1.0, 1e-3).unwrap();
        assert!(zero.u.iter().all(|&u| u == 0.0) && zero.du.iter().all(|&d| d == 0.0));
        let pi = shoot(PI, &p, 1.0, 1e-3).unwrap();
        assert!(pi.u.iter().all(|&u| u == PI));
    }
}

#[test]
fn curvature_at_origin() {
    let dr = 1e-3;
    for (kappa2, u0, n) in [(9.0, 2.0, 2), (5.0, 1.0, 3), (16.0, 0.3, 1)] {
        let p = params(kappa2, 0.2).with_dimension(n).unwrap();
        let s = shoot(u0, &p, 1.0, dr).unwrap();
        let measured = (s.u[1] - u0) / (dr * dr);
        let expected = -kappa2 * f64::sin(u0) / (2.0 * n as f64);
        assert!((measured - expected).abs() <= 0.01 * expected.abs(), "{measured} vs {expected}");
    }
}

#[test]
fn shot_validation() {
    let p = params(9.0, 0.1);
    assert!(shoot(-0.1, &p, 1.0, 1e-3).is_err());
    assert!(shoot(3.2, &p, 1.0, 1e-3).is_err());
    assert!(shoot(1.0, &p, 1.0, 0.02).is_err());
}

/// Observed order `log2(|e_h − e_{h/2}| / |e_{h/2} − e_{h/4}|)` of the endpoint values.
fn observed_order(u0: f64, p: &Params) -> f64 {
    let end = |dr: f64| {
        let s = shoot(u0, p, 1.0, dr).unwrap();
        (s.u_at_boundary(), s.du_at_boundary())
    };
    let [a, b, c] = [end(1e-2), end(5e-3), end(2.5e-3)];
    let d1 = (a.0 - b.0).abs().max((a.1 - b.1).abs());
    let d2 = (b.0 - c.0).abs().max((b.1 - c.1).abs());
    (d1 / d2).log2()
}

#[test]
fn integrator_order() {
    for (kappa2, u0, n) in [(9.0, 2.0, 2), (5.0, 1.2, 2), (16.0, 2.5, 3), (4.0, 1.0, 1)] {
        let p = params(kappa2, 0.3).with_dimension(n).unwrap();
        let order = observed_order(u0, &p);
        assert!(order >= 3.8, "kappa2={kappa2} u0={u0} N={n}: order {order}");
    }
}

#[test]
fn ode_residual_of_solved_profiles() {
    let opts = RadialOptions::default();
    for (kappa2, gamma) in [(9.0, 0.0), (9.0, 0.1), (16.0, 0.5), (9.0, 0.3)] {
        let sol = solve_radial_bvp(&params(kappa2, gamma), 1.0, &opts).unwrap();
        assert_eq!(sol.classification, Classification::Nonconstant, "kappa2={kappa2} gamma={gamma}");
        let p = &sol.profile;
        assert!(p.closure().abs() <= 1e-10);
        assert!(p.ode_residual(0.05) <= 100.0 * p.dr.powi(4), "{}", p.ode_residual(0.05));
        assert!(check_monotone(p).is_monotone);
        assert!(p.u.iter().all(|&u| (-1e-9..=PI + 1e-9).contains(&u)));
        assert!(p.u_at_boundary() < p.u0 && p.u0 < PI);
    }
}

#[test]
fn ball_profiles_in_three_dimensions() {
    let p = params(25.0, 0.3).with_dimension(3).unwrap();
    let sol = solve_radial_bvp(&p, 1.0, &RadialOptions::default()).unwrap();
    assert_eq!(sol.classification, Classification::Nonconstant);
    assert!(check_monotone(&sol.profile).is_monotone);
    let trivial = sphere_area(3) / 3.0 * 25.0;
    assert!(sol.energy.total < trivial);
}

#[test]
fn vanishing_gamma_approaches_dirichlet() {
    let opts = RadialOptions::default();
    let a = solve_radial_bvp(&params(9.0, 0.0), 1.0, &opts).unwrap();
    let b = solve_radial_bvp(&params(9.0, 1e-3), 1.0, &opts).unwrap();
    assert!((a.profile.u0 - b.profile.u0).abs() <= 1e-3, "{} vs {}", a.profile.u0, b.profile.u0);
}

#[test]
fn trivial_roots_are_reported() {
    let opts = RadialOptions::default();
    // in-plane regime: the constant π is a root and wins
    let sol = solve_radial_bvp(&Params::new(2.0, 2.0).unwrap(), 1.0, &opts).unwrap();
    assert_eq!(sol.classification, Classification::ConstantInPlane);
    assert_eq!(sol.profile.u0, PI);
    assert!(sol.roots.iter().any(|r| r.u0 == 0.0));
    assert!((sol.energy.total - 2.0 * PI / 4.0).abs() < 1e-12);
    // Dirichlet mode: π never closes
    let sol = solve_radial_bvp(&params(1.0, 0.0), 1.0, &opts).unwrap();
    assert_eq!(sol.classification, Classification::ConstantE3);
    assert!(sol.roots.iter().all(|r| r.u0 < PI));
}

/// Solves `min E_h(u)` for the reduced Dirichlet energy
/// `2π ∫ ((u'/2)² + κ² cos²(u/2)) r dr`, `u(R) = 0`, on a uniform grid by
/// damped Newton iteration with a tridiagonal Hessian.
fn reduced_dirichlet_minimizer(kappa2: f64, m: usize) -> (Vec<f64>, f64) {
    let h = 1.0 / m as f64;
    let r = |i: usize| i as f64 * h;
    // gradient term: Σ c_i (u_{i+1} − u_i)², c_i = r_{i+½} / (4h)
    let c: Vec<f64> = (0..m).map(|i| (r(i) + 0.5 * h) / (4.0 * h)).collect();
    // potential: Σ d_i cos²(u_i/2) with annular cell areas / 2π
    let d: Vec<f64> = (0..=m)
        .map(|i| match i {
            0 => h * h / 8.0,
            _ if i == m => 0.5 * r(i) * h,
            _ => r(i) * h,
        })
        .map(|w| kappa2 * w)
        .collect();
    let energy = |u: &[f64]| {
        let g: f64 = (0..m).map(|i| c[i] * (u[i + 1] - u[i]).powi(2)).sum();
        let v: f64 = (0..=m).map(|i| d[i] * (0.5 * u[i]).cos().powi(2)).sum();
        2.0 * PI * (g + v)
    };
    let mut u: Vec<f64> = (0..=m).map(|i| 2.0 * (1.0 - r(i) * r(i))).collect();
    for _ in 0..100 {
        // unknowns u_0..u_{m−1}; u_m = 0
        let n = m;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            rhs[i] = -0.5 * d[i] * u[i].sin();
            diag[i] = -0.5 * d[i] * u[i].cos();
        }
        for i in 0..m {
            let f = 2.0 * c[i] * (u[i] - u[i + 1]);
            rhs[i] += f;
            diag[i] += 2.0 * c[i];
            if i + 1 < n {
                rhs[i + 1] -= f;
                diag[i + 1] += 2.0 * c[i];
                off[i] -= 2.0 * c[i];
            }
        }
        let norm = rhs.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm < 1e-13 {
            break;
        }
        // Thomas algorithm for H s = −g
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        cp[0] = if n > 1 { off[0] / diag[0] } else { 0.0 };
        dp[0] = -rhs[0] / diag[0];
        for i in 1..n {
            let den = diag[i] - off[i - 1] * cp[i - 1];
            if i + 1 < n {
                cp[i] = off[i] / den;
            }
            dp[i] = (-rhs[i] - off[i - 1] * dp[i - 1]) / den;
        }
        let mut s = vec![0.0; n];
        s[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            s[i] = dp[i] - cp[i] * s[i + 1];
        }
        let e0 = energy(&u);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = (0..=m).map(|i| if i < n { u[i] + t * s[i] } else { 0.0 }).collect();
            if energy(&trial) <= e0 || t < 1e-8 {
                u = trial;
                break;
            }
            t *= 0.5;
        }
    }
    let e = energy(&u);
    (u, e)
}

#[test]
fn dirichlet_profile_matches_direct_energy_minimization() {
    let (u, e) = reduced_dirichlet_minimizer(9.0, 4000);
    let sol = solve_radial_bvp(&params(9.0, 0.0), 1.0, &RadialOptions::default()).unwrap();
    assert!((sol.profile.u0 - u[0]).abs() <= 1e-3, "{} vs {}", sol.profile.u0, u[0]);
    assert!((sol.energy.total - e).abs() <= 1e-4 * e, "{} vs {e}", sol.energy.total);
    assert!(e < 9.0 * PI);
}

#[test]
fn reduced_energy_matches_planar_quadrature() {
    let sol = solve_radial_bvp(&params(9.0, 0.1), 1.0, &RadialOptions::default()).unwrap();
    let mesh = build_disk_mesh(64, 128, 1.0).unwrap();
    let phase = PhaseField::from_fn(mesh.len(), |k| {
        let [x, y] = mesh.nodes()[k];
        0.5 * sol.profile.u_at(x.hypot(y))
    });
    let planar = energy_phase(&mesh, &phase, &sol.profile.params).unwrap();
    let radial = sol.energy;
    assert!((planar.total - radial.total).abs() <= 1e-3 * radial.total, "{} vs {}", planar.total, radial.total);
    assert!((planar.boundary - radial.boundary).abs() <= 1e-3 * radial.boundary);
}

#[test]
fn constant_profiles_have_closed_form_energy() {
    let p = Params::new(1.5, 0.7).unwrap();
    let zero = shoot(0.0, &p, 2.0, 1e-2).unwrap();
    let e = radial_energy(&zero, &p);
    assert!((e.total - 2.25 * PI * 4.0).abs() < 1e-10);
    let pi = shoot(PI, &p, 2.0, 1e-2).unwrap();
    let e = radial_energy(&pi, &p);
    assert!((e.total - 4.0 * PI / 0.49).abs() < 1e-10);
}

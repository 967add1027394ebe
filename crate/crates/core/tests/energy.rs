use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spherelab::*;
use std::f64::consts::PI;

fn disk() -> Mesh {
    build_disk_mesh(12, 24, 1.0).unwrap()
}

fn random_field(mesh: &Mesh, seed: u64) -> SphereField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SphereField::random_uniform(mesh.len(), &mut rng)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn constant_state_examples() {
    let mesh = disk();
    let e3 = SphereField::constant(mesh.len(), [0.0, 0.0, 1.0]);
    let e = energy_sphere_field(&mesh, &e3, &Params::new(2.0, 1.0).unwrap()).unwrap();
    assert_relative_eq!(e.total, 4.0 * PI, max_relative = 1e-12);
    assert_eq!((e.dirichlet, e.boundary), (0.0, 0.0));

    let e1 = SphereField::constant(mesh.len(), [1.0, 0.0, 0.0]);
    let e = energy_sphere_field(&mesh, &e1, &Params::new(2.0, 0.5).unwrap()).unwrap();
    assert_relative_eq!(e.total, 8.0 * PI, max_relative = 1e-12);
    assert_eq!((e.dirichlet, e.anisotropy), (0.0, 0.0));

    let c = constant_state_energies(&mesh, &Params::new(0.0, 0.1).unwrap()).unwrap();
    assert_eq!(c.out_of_plane, 0.0);
    assert_relative_eq!(c.in_plane.unwrap(), 200.0 * PI, max_relative = 1e-12);
    let square = build_rectangle_mesh(8, 8, 1.0, 1.0).unwrap();
    let c = constant_state_energies(&square, &Params::new(1.0, 2.0).unwrap()).unwrap();
    assert_relative_eq!(c.out_of_plane, 1.0, max_relative = 1e-12);
    assert_relative_eq!(c.in_plane.unwrap(), 1.0, max_relative = 1e-12);
    assert!(constant_state_energies(&mesh, &Params::new(1.0, 0.0).unwrap()).unwrap().in_plane.is_none());
}

#[test]
fn phase_examples() {
    let mesh = disk();
    let zero = PhaseField::constant(mesh.len(), 0.0);
    let e = energy_phase(&mesh, &zero, &Params::new(1.0, 1.0).unwrap()).unwrap();
    assert_relative_eq!(e.total, PI, max_relative = 1e-12);
    let half = PhaseField::constant(mesh.len(), PI / 2.0);
    let e = energy_phase(&mesh, &half, &Params::new(3.0, 0.5).unwrap()).unwrap();
    assert_relative_eq!(e.total, 8.0 * PI, max_relative = 1e-12);
    assert!(e.anisotropy < 1e-28);
    assert!(energy_phase(&mesh, &half, &Params::new(3.0, 0.0).unwrap()).is_err());
}

#[test]
fn breakdown_total_is_sum_of_nonnegative_terms() {
    let mesh = disk();
    for seed in 0..10 {
        let f = random_field(&mesh, seed);
        let e = energy_sphere_field(&mesh, &f, &Params::new(1.3, 0.7).unwrap()).unwrap();
        assert!(e.dirichlet >= 0.0 && e.anisotropy >= 0.0 && e.boundary >= 0.0);
        assert!((e.total - (e.dirichlet + e.anisotropy + e.boundary)).abs() <= 1e-12 * e.total);
    }
}

#[test]
fn breakdown_json_keys() {
    let v = serde_json::to_value(EnergyBreakdown::new(1.0, 2.0, 3.0)).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["dirichlet", "anisotropy", "boundary", "total"] {
        assert!(keys.contains(&k));
    }
    assert_eq!(v["total"], 6.0);
}

/// Random tangent direction at every node.
fn tangent_direction(field: &SphereField, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    field
        .iter()
        .map(|m| {
            let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let s = v[0] * m[0] + v[1] * m[1] + v[2] * m[2];
            [v[0] - s * m[0], v[1] - s * m[1], v[2] - s * m[2]]
        })
        .collect()
}

/// Central difference of `t ↦ E(m + t v)`. The discrete energy is quadratic in
/// the nodal values, so the central difference is exact up to rounding.
fn directional_fd(mesh: &Mesh, f: &SphereField, v: &[[f64; 3]], p: &Params, h: f64) -> f64 {
    let shifted = |t: f64| {
        let g = SphereField::from_fn(f.len(), |k| {
            [f[k][0] + t * v[k][0], f[k][1] + t * v[k][1], f[k][2] + t * v[k][2]]
        });
        energy_sphere_field(mesh, &g, p).unwrap().total
    };
    (shifted(h) - shifted(-h)) / (2.0 * h)
}

#[test]
fn gradient_matches_central_differences() {
    for (mesh, p) in [
        (disk(), Params::new(1.7, 0.6).unwrap()),
        (build_rectangle_mesh(9, 7, 2.0, 1.0).unwrap(), Params::new(0.4, 2.0).unwrap()),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let f = random_field(&mesh, 4);
        let g = energy_gradient(&mesh, &f, &p).unwrap();
        for _ in 0..20 {
            let v = tangent_direction(&f, &mut rng);
            let analytic: f64 = g.iter().zip(&v).map(|(a, b)| a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).sum();
            let fd = directional_fd(&mesh, &f, &v, &p, 1e-4);
            assert!(rel(analytic, fd) <= 1e-6, "analytic {analytic} fd {fd}");
        }
    }
}

fn unit_field(n: usize) -> impl Strategy<Value = SphereField> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), n).prop_filter_map("zero vector", |v| {
        let out: Option<Vec<[f64; 3]>> = v
            .into_iter()
            .map(|(a, b, c)| {
                let n = (a * a + b * b + c * c).sqrt();
                (n > 1e-3).then(|| [a / n, b / n, c / n])
            })
            .collect();
        out.map(SphereField::from_vectors)
    })
}

fn symmetry() -> impl Strategy<Value = Symmetry> {
    (0.0..2.0 * PI, any::<bool>(), any::<bool>()).prop_map(|(angle, in_plane_reflection, axis_reflection)| Symmetry {
        angle,
        in_plane_reflection,
        axis_reflection,
    })
}

const DISK_NODES: usize = 1 + 6 * 12;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn energy_invariant_under_symmetry(f in unit_field(DISK_NODES), sigma in symmetry(), k in 0.0..3.0f64, g in 0.1..3.0f64) {
        let mesh = build_disk_mesh(6, 12, 1.0).unwrap();
        let p = Params::new(k, g).unwrap();
        let a = energy_sphere_field(&mesh, &f, &p).unwrap().total;
        let b = energy_sphere_field(&mesh, &apply_symmetry(&f, &sigma), &p).unwrap().total;
        prop_assert!(rel(a, b) <= 1e-12, "{a} vs {b}");
        prop_assert!(apply_symmetry(&f, &sigma).max_norm_deviation() <= 1e-12);
    }

    #[test]
    fn energy_invariant_under_folding(f in unit_field(DISK_NODES), k in 0.0..3.0f64, g in 0.1..3.0f64) {
        let mesh = build_disk_mesh(6, 12, 1.0).unwrap();
        let p = Params::new(k, g).unwrap();
        let a = energy_sphere_field(&mesh, &f, &p).unwrap().total;
        for axis in [Axis::E1, Axis::E2, Axis::E3] {
            let folded = fold_positive(&f, axis);
            prop_assert!(folded.iter().all(|m| m[axis.index()] >= 0.0));
            let b = energy_sphere_field(&mesh, &folded, &p).unwrap().total;
            // folding can only shorten chords, so the energy never increases
            prop_assert!(b <= a * (1.0 + 1e-12));
        }
    }

    #[test]
    fn meridian_field_matches_phase(coef in prop::array::uniform4(-2.0..2.0f64), k in 0.0..4.0f64, g in 0.05..3.0f64) {
        let mesh = build_disk_mesh(8, 16, 1.0).unwrap();
        let phi = PhaseField::from_fn(mesh.len(), |i| {
            let [x, y] = mesh.nodes()[i];
            coef[0] + coef[1] * x + coef[2] * y * y + coef[3] * x * y
        });
        let p = Params::new(k, g).unwrap();
        let a = energy_phase(&mesh, &phi, &p).unwrap().total;
        let b = energy_sphere_field(&mesh, &SphereField::from_phase(&phi), &p).unwrap().total;
        prop_assert!(rel(a, b) <= 1e-10, "{a} vs {b}");
    }

    #[test]
    fn localization_is_additive(mask in prop::collection::vec(any::<bool>(), DISK_NODES), seed in any::<u64>()) {
        let mesh = build_disk_mesh(6, 12, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = PhaseField::from_fn(mesh.len(), |_| rng.gen_range(-1.0..2.0));
        let p = Params::new(1.2, 0.8).unwrap();
        let complement: Vec<bool> = mask.iter().map(|b| !b).collect();
        let a = localized_energy_phase(&mesh, &phi, &p, &mask).unwrap();
        let b = localized_energy_phase(&mesh, &phi, &p, &complement).unwrap();
        let whole = energy_phase(&mesh, &phi, &p).unwrap();
        prop_assert!((a.anisotropy + b.anisotropy - whole.anisotropy).abs() <= 1e-12 * whole.total);
        prop_assert!((a.boundary + b.boundary - whole.boundary).abs() <= 1e-12 * whole.total);
        prop_assert!((a.total + b.total - whole.total).abs() <= 1e-12 * whole.total);
    }
}

#[test]
fn folding_known_field_keeps_energy() {
    // m₃ < 0 everywhere: folding acts as the e₃-reflection
    let mesh = disk();
    let f = SphereField::from_fn(mesh.len(), |k| {
        let [x, y] = mesh.nodes()[k];
        let phi = 0.3 + 0.4 * x * x + 0.2 * y;
        [phi.sin(), 0.0, -phi.cos()]
    });
    let p = Params::new(2.0, 0.7).unwrap();
    let a = energy_sphere_field(&mesh, &f, &p).unwrap().total;
    let b = energy_sphere_field(&mesh, &fold_positive(&f, Axis::E3), &p).unwrap().total;
    assert!(rel(a, b) <= 1e-12);
    assert!(fold_positive(&f, Axis::E3).iter().all(|m| m[2] >= 0.0));
}

#[test]
fn quarter_turn_and_identity() {
    let mesh = disk();
    let e1 = SphereField::constant(mesh.len(), [1.0, 0.0, 0.0]);
    let turned = apply_symmetry(&e1, &Symmetry::rotation(PI / 2.0));
    assert!(turned.iter().all(|m| m[0].abs() < 1e-15 && (m[1] - 1.0).abs() < 1e-15 && m[2] == 0.0));
    let f = random_field(&mesh, 8);
    assert_eq!(apply_symmetry(&f, &Symmetry::identity()), f);
}

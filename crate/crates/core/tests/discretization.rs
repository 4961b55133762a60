use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use insdg::dgops::{elliptic_apply, local_gradient, mass_apply, Discretization, EllipticBc};
use insdg::mesh::{load_mesh, write_mesh, BoundaryTag, Mesh};
use insdg::ScalarField;

use BoundaryTag::*;

const TAGS: [BoundaryTag; 4] = [DirichletInflow, NeumannOutflow, Wall, Wall];

fn perturbed(nx: usize, ny: usize, seed: u64) -> Mesh {
    let mut mesh = Mesh::generate_structured(nx, ny, [0.0, 1.0, 0.0, 1.0], TAGS).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (hx, hy) = (1.0 / nx as f64, 1.0 / ny as f64);
    for v in mesh.vertices.iter_mut() {
        let inside = |c: f64| c > 1e-12 && c < 1.0 - 1e-12;
        if inside(v[0]) && inside(v[1]) {
            v[0] += rng.gen_range(-0.25..0.25) * hx;
            v[1] += rng.gen_range(-0.25..0.25) * hy;
        }
    }
    mesh
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn interior_traces_pair_coincident_nodes(n in 1usize..=6, nx in 1usize..4, ny in 1usize..4, seed: u64) {
        let d = Discretization::new(&perturbed(nx, ny, seed), n).unwrap();
        let c = &d.conn;
        for e in 0..c.k {
            for f in 0..3 {
                if c.bc[3 * e + f].is_some() {
                    continue;
                }
                for j in 0..c.nfp {
                    let t = c.trace(e, f, j);
                    let (m, p) = (c.id_m[t], c.id_p[t]);
                    prop_assert_ne!(m / c.np, p / c.np);
                    prop_assert!((d.geom.x[m] - d.geom.x[p]).abs() < 1e-12);
                    prop_assert!((d.geom.y[m] - d.geom.y[p]).abs() < 1e-12);
                    let (e2, f2) = (c.etoe[e][f], c.etof[e][f]);
                    prop_assert!((0..c.nfp).any(|i| c.id_p[c.trace(e2, f2, i)] == m));
                }
            }
        }
        let interior_faces = 3 * nx * ny - nx - ny;
        prop_assert_eq!(c.num_interior_faces(), interior_faces);
    }

    #[test]
    fn mass_integrates_constants_to_area(n in 1usize..=7, seed: u64) {
        let d = Discretization::new(&perturbed(3, 2, seed), n).unwrap();
        let one = ScalarField::interpolate(&d.geom, |_, _| 1.0);
        let area: f64 = mass_apply(&one, &d.geom, &d.re).unwrap().values.iter().sum();
        prop_assert!((area - 1.0).abs() < 1e-12, "{}", area);
        prop_assert!((d.geom.total_area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_of_affine_field_is_exact(
        n in 1usize..=6,
        seed: u64,
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
        c in -5.0f64..5.0,
    ) {
        let d = Discretization::new(&perturbed(2, 3, seed), n).unwrap();
        let f = ScalarField::interpolate(&d.geom, |x, y| c + a * x + b * y);
        let (fx, fy) = local_gradient(&f, &d.geom, &d.re).unwrap();
        prop_assert!(fx.values.iter().all(|v| (v - a).abs() < 1e-10));
        prop_assert!(fy.values.iter().all(|v| (v - b).abs() < 1e-10));
    }

    #[test]
    fn neumann_laplacian_annihilates_constants(n in 1usize..=5, seed: u64, c in -10.0f64..10.0) {
        let d = Discretization::new(&perturbed(3, 3, seed), n).unwrap();
        let f = ScalarField::interpolate(&d.geom, |_, _| c);
        let af = elliptic_apply(&f, 0.0, EllipticBc::ALL_NEUMANN, &d.geom, &d.conn, &d.re).unwrap();
        prop_assert!(af.norm() < 1e-10 * (1.0 + c.abs()), "{}", af.norm());
    }

    #[test]
    fn helmholtz_energy_dominates_mass(n in 1usize..=4, seed: u64, lambda in 0.5f64..50.0) {
        let d = Discretization::new(&perturbed(2, 2, seed), n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = d.dofs();
        let f = ScalarField::from_values(d.geom.k, d.re.np, (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .unwrap();
        let af = elliptic_apply(&f, lambda, EllipticBc::VELOCITY, &d.geom, &d.conn, &d.re).unwrap();
        let mf = mass_apply(&f, &d.geom, &d.re).unwrap();
        prop_assert!(f.dot(&af) >= lambda * f.dot(&mf) * (1.0 - 1e-10));
    }

    #[test]
    fn mesh_text_round_trip(nx in 1usize..5, ny in 1usize..5, seed: u64) {
        let mesh = perturbed(nx, ny, seed);
        let back = load_mesh(&write_mesh(&mesh)).unwrap();
        prop_assert_eq!(&back.triangles, &mesh.triangles);
        prop_assert_eq!(&back.boundary, &mesh.boundary);
        for (a, b) in back.vertices.iter().zip(&mesh.vertices) {
            prop_assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        }
    }
}

#[test]
fn clockwise_triangles_are_reoriented() {
    let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let boundary = [((0, 1), Wall), ((1, 2), Wall), ((2, 0), Wall)]
        .into_iter()
        .collect();
    let mesh = Mesh::new(vertices, vec![[0, 2, 1]], boundary).unwrap();
    assert!(mesh.element_area(0) > 0.0);
    assert!((mesh.element_area(0) - 0.5).abs() < 1e-15);
}

#[test]
fn untagged_boundary_edge_is_rejected() {
    let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let boundary = [((0, 1), Wall), ((1, 2), Wall)].into_iter().collect();
    assert!(Mesh::new(vertices, vec![[0, 1, 2]], boundary).is_err());
}

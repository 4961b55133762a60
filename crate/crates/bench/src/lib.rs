//! Shared fixtures for the kernel benchmarks.

use insdg::dgops::Discretization;
use insdg::{BoundaryTag, Mesh};

/// Discretization of the unit square on a `cells` x `cells` grid with smooth input fields.
pub struct Fixture {
    pub disc: Discretization,
    pub fields: [Vec<f64>; 4],
    pub boundary: Vec<f64>,
}

impl Fixture {
    pub fn new(cells: usize, degree: usize) -> insdg::Result<Self> {
        let mesh = Mesh::generate_structured(
            cells,
            cells,
            [0.0, 1.0, 0.0, 1.0],
            [BoundaryTag::DirichletInflow; 4],
        )?;
        let disc = Discretization::new(&mesh, degree)?;
        let len = disc.dofs();
        let field = |s: f64| (0..len).map(|i| (i as f64 * s).sin()).collect::<Vec<f64>>();
        let boundary = vec![0.5; 2 * 3 * disc.geom.k * disc.re.nfc()];
        Ok(Self {
            fields: [field(0.3), field(0.7), field(1.1), field(1.3)],
            boundary,
            disc,
        })
    }

    pub fn len(&self) -> usize {
        self.disc.dofs()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

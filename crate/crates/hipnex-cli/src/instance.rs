//! Problem construction from a resolved configuration.

use hipnex::linalg::DenseMatrix;
use hipnex::problem::VIProblem;
use hipnex::problems::{
    gen_affine, gen_box, gen_cubic_minmax, AffineMonotoneSpec, AffineVip, BoxVip, BoxVipSpec,
    CubicMinMax, CubicMinMaxSpec,
};

use crate::config::{ProblemKind, RunConfig};

pub enum ProblemInstance {
    Cubic(CubicMinMax),
    Affine(AffineVip),
    Box(BoxVip),
}

impl ProblemInstance {
    pub fn build(config: &RunConfig) -> Self {
        match config.problem {
            ProblemKind::Cubic => ProblemInstance::Cubic(gen_cubic_minmax(&CubicMinMaxSpec {
                n: config.n,
                seed: config.seed,
                l: config.l,
                cond: config.cond,
            })),
            ProblemKind::Affine => {
                ProblemInstance::Affine(gen_affine(&AffineMonotoneSpec::new(config.n, config.seed)))
            }
            ProblemKind::Box => {
                ProblemInstance::Box(gen_box(&BoxVipSpec::new(config.n, config.seed)))
            }
        }
    }

    pub fn as_affine(&self) -> Option<&AffineVip> {
        match self {
            ProblemInstance::Affine(p) => Some(p),
            _ => None,
        }
    }
}

impl VIProblem for ProblemInstance {
    fn dim(&self) -> usize {
        match self {
            ProblemInstance::Cubic(p) => p.dim(),
            ProblemInstance::Affine(p) => p.dim(),
            ProblemInstance::Box(p) => p.dim(),
        }
    }

    fn lipschitz(&self) -> f64 {
        match self {
            ProblemInstance::Cubic(p) => p.lipschitz(),
            ProblemInstance::Affine(p) => p.lipschitz(),
            ProblemInstance::Box(p) => p.lipschitz(),
        }
    }

    fn eval_f(&self, x: &[f64]) -> Vec<f64> {
        match self {
            ProblemInstance::Cubic(p) => p.eval_f(x),
            ProblemInstance::Affine(p) => p.eval_f(x),
            ProblemInstance::Box(p) => p.eval_f(x),
        }
    }

    fn apply_jacobian(&self, anchor: &[f64], dir: &[f64]) -> Vec<f64> {
        match self {
            ProblemInstance::Cubic(p) => p.apply_jacobian(anchor, dir),
            ProblemInstance::Affine(p) => p.apply_jacobian(anchor, dir),
            ProblemInstance::Box(p) => p.apply_jacobian(anchor, dir),
        }
    }

    fn jacobian_matrix(&self, anchor: &[f64]) -> Option<DenseMatrix> {
        match self {
            ProblemInstance::Cubic(p) => p.jacobian_matrix(anchor),
            ProblemInstance::Affine(p) => p.jacobian_matrix(anchor),
            ProblemInstance::Box(p) => p.jacobian_matrix(anchor),
        }
    }

    fn project(&self, z: &[f64]) -> Vec<f64> {
        match self {
            ProblemInstance::Cubic(p) => p.project(z),
            ProblemInstance::Affine(p) => p.project(z),
            ProblemInstance::Box(p) => p.project(z),
        }
    }

    fn unconstrained(&self) -> bool {
        match self {
            ProblemInstance::Cubic(p) => p.unconstrained(),
            ProblemInstance::Affine(p) => p.unconstrained(),
            ProblemInstance::Box(p) => p.unconstrained(),
        }
    }

    fn known_solution(&self) -> Option<&[f64]> {
        match self {
            ProblemInstance::Cubic(p) => p.known_solution(),
            ProblemInstance::Affine(p) => p.known_solution(),
            ProblemInstance::Box(p) => p.known_solution(),
        }
    }
}

/// Dimension of the ambient space for a given size parameter.
pub fn ambient_dim(kind: ProblemKind, n: usize) -> usize {
    match kind {
        ProblemKind::Cubic => 2 * n,
        ProblemKind::Affine | ProblemKind::Box => n,
    }
}

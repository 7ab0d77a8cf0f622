#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use proplattice::algebra::{close, AlgebraBasis, GeneratorSet};
use proplattice::scenarios::{build_classical, build_sectors, build_weyl_finite};
use proplattice::{seeds, ComplexMatrix, Tolerance};

pub fn tol() -> Tolerance {
    Tolerance::default()
}

pub fn random_matrix(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = seeds::rng(seed);
    let m = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    ComplexMatrix::new(m).unwrap()
}

/// Random matrix of rank at most `rank`.
pub fn random_low_rank(dim: usize, rank: usize, seed: u64) -> ComplexMatrix {
    let mut rng = seeds::rng(seed);
    let mut g = |r, c| {
        DMatrix::from_fn(r, c, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
    };
    let (a, b) = (g(dim, rank), g(rank, dim));
    ComplexMatrix::new(a * b).unwrap()
}

pub fn closed(gens: GeneratorSet) -> AlgebraBasis {
    close(&gens, &tol()).unwrap()
}

/// Named scenario algebras used across the suites.
pub fn scenario_algebras() -> Vec<(&'static str, AlgebraBasis)> {
    vec![
        ("classical n=8", closed(build_classical(8).unwrap())),
        ("weyl d=2", closed(build_weyl_finite(2).unwrap())),
        ("weyl d=3", closed(build_weyl_finite(3).unwrap())),
        ("weyl d=4", closed(build_weyl_finite(4).unwrap())),
        ("sectors [(2,1),(3,1)]", closed(build_sectors(&[(2, 1), (3, 1)]).unwrap())),
    ]
}

/// A small pool of structurally different algebras, indexed for proptest.
pub fn pool(index: usize) -> AlgebraBasis {
    match index % 8 {
        0 => closed(build_classical(4).unwrap()),
        1 => closed(build_weyl_finite(2).unwrap()),
        2 => closed(build_weyl_finite(3).unwrap()),
        3 => closed(build_sectors(&[(2, 1), (1, 2)]).unwrap()),
        4 => closed(build_sectors(&[(2, 2)]).unwrap()),
        5 => closed(build_sectors(&[(1, 1), (2, 1), (1, 1)]).unwrap()),
        6 => AlgebraBasis::scalars(3),
        _ => closed(build_classical(1).unwrap()),
    }
}

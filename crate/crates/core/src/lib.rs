//! Projector lattices and logical states of finite-dimensional operator
//! algebras.
//!
//! A physical system is described by a unital *-algebra of observables,
//! here always a subalgebra of the `d × d` complex matrices. Its elementary
//! yes/no propositions are the projectors of the algebra's weak closure (its
//! bicommutant, which at finite dimension is the algebra itself), ordered by
//! range inclusion. States are density matrices; their restrictions to
//! projectors are the logical states of the system.
//!
//! Module map:
//!
//! * [`numerics`]: complex matrices, Hermitian eigensolver, rank, kernels.
//! * [`algebra`]: closure of generators, commutant, bicommutant, center.
//! * [`sectors`]: superselection sectors, factors, Murray–von Neumann dimension.
//! * [`logic`]: orthocomplement, meet, join, order, law checkers, reports.
//! * [`states`]: density functionals, logical states, characters, purity.
//! * [`scenarios`]: declarative scenario files and the end-to-end runner.
//!
//! Only type I factors exist at matrix scale; type II/III phenomena and
//! non-separable sector continua have no finite-dimensional model here.

pub mod algebra;
pub mod error;
pub mod logic;
pub mod numerics;
pub mod scenarios;
pub mod sectors;
pub mod seeds;
pub mod states;

pub use algebra::{AlgebraBasis, GeneratorSet};
pub use error::{Error, Result};
pub use logic::{LatticeReport, Projector};
pub use numerics::{ComplexMatrix, Tolerance};
pub use scenarios::{Scenario, ScenarioReport};
pub use sectors::SectorDecomposition;
pub use states::{LogicalState, StateFunctional};

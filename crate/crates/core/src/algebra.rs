//! Unital *-subalgebras of `M_d`: closure of generators, commutants,
//! bicommutants and centers.
//!
//! An algebra is stored as a Hilbert–Schmidt orthonormal basis of its span.
//! Subspaces are compared by projection residuals, never by basis identity.
//!
//! At finite dimension the weak closure of a concretely represented algebra
//! is its bicommutant, and the defining representation already plays the
//! role of the atomic one, so [`baire_envelope`] is simply `A''`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{null_space_rect, null_space_stacked, operator_norm, ComplexMatrix, Tolerance};

/// Generators of an algebra, all acting on the same `C^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGenerators")]
pub struct GeneratorSet {
    #[serde(rename = "dim")]
    ambient_dim: usize,
    generators: Vec<ComplexMatrix>,
}

#[derive(Deserialize)]
struct RawGenerators {
    dim: usize,
    generators: Vec<ComplexMatrix>,
}

impl TryFrom<RawGenerators> for GeneratorSet {
    type Error = Error;
    fn try_from(raw: RawGenerators) -> Result<Self> {
        GeneratorSet::new(raw.dim, raw.generators)
    }
}

impl GeneratorSet {
    pub fn new(ambient_dim: usize, generators: Vec<ComplexMatrix>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        if generators.is_empty() {
            return Err(Error::PreconditionFailed("generator list is empty".into()));
        }
        for g in &generators {
            g.check_dim(ambient_dim)?;
        }
        Ok(GeneratorSet { ambient_dim, generators })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }
}

/// Hilbert–Schmidt orthonormal basis of a subspace of `M_d`.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraBasis {
    ambient_dim: usize,
    dim: usize,
    contains_unit: bool,
    basis: Vec<ComplexMatrix>,
}

impl AlgebraBasis {
    fn from_columns(ambient_dim: usize, columns: &DMatrix<Complex64>, tol: &Tolerance) -> Self {
        let basis: Vec<ComplexMatrix> = columns
            .column_iter()
            .map(|c| ComplexMatrix::from_vector(ambient_dim, &c.into_owned()))
            .collect();
        let mut out = AlgebraBasis {
            ambient_dim,
            dim: basis.len(),
            contains_unit: false,
            basis,
        };
        out.contains_unit = out.contains(&ComplexMatrix::identity(ambient_dim), tol);
        out
    }

    /// Orthonormal basis of the linear span of `elements`. No closure is
    /// performed; use [`close`] for the generated algebra.
    pub fn span_of(ambient_dim: usize, elements: &[ComplexMatrix], tol: &Tolerance) -> Result<Self> {
        let mut ortho = Orthonormalizer::new(ambient_dim * ambient_dim);
        for e in elements {
            e.check_dim(ambient_dim)?;
            ortho.try_extend(e.vectorize(), tol.rank_tol);
        }
        Ok(Self::from_columns(ambient_dim, &ortho.columns(), tol))
    }

    /// Multiples of the identity.
    pub fn scalars(ambient_dim: usize) -> Self {
        let unit = ComplexMatrix::identity(ambient_dim).scale_re(1.0 / (ambient_dim as f64).sqrt());
        AlgebraBasis {
            ambient_dim,
            dim: 1,
            contains_unit: true,
            basis: vec![unit],
        }
    }

    /// All of `M_d`, spanned by the matrix units.
    pub fn full(ambient_dim: usize) -> Self {
        let mut basis = Vec::with_capacity(ambient_dim * ambient_dim);
        for j in 0..ambient_dim {
            for i in 0..ambient_dim {
                basis.push(ComplexMatrix::unit(ambient_dim, i, j));
            }
        }
        AlgebraBasis {
            ambient_dim,
            dim: basis.len(),
            contains_unit: true,
            basis,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Dimension of the span.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn contains_unit(&self) -> bool {
        self.contains_unit
    }

    /// Basis vectors as the columns of a `d² × dim` matrix.
    pub fn columns(&self) -> DMatrix<Complex64> {
        let n = self.ambient_dim * self.ambient_dim;
        let mut out = DMatrix::zeros(n, self.dim);
        for (k, b) in self.basis.iter().enumerate() {
            out.set_column(k, &b.vectorize());
        }
        out
    }

    /// Hilbert–Schmidt orthogonal projection onto the span.
    pub fn project(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.ambient_dim);
        for b in &self.basis {
            out = out + b.scale(b.hs_inner(m));
        }
        out
    }

    /// Hilbert–Schmidt distance from `m` to the span.
    pub fn residual(&self, m: &ComplexMatrix) -> f64 {
        (m - self.project(m)).hs_norm()
    }

    pub fn contains(&self, m: &ComplexMatrix, tol: &Tolerance) -> bool {
        m.dim() == self.ambient_dim && self.residual(m) <= tol.eq_tol * (1.0 + operator_norm(m))
    }

    /// Real-linear spanning set of the self-adjoint part of the span.
    pub fn self_adjoint_spanning_set(&self) -> Vec<ComplexMatrix> {
        let mut out = Vec::with_capacity(2 * self.dim);
        for b in &self.basis {
            for part in [b.hermitian_part(), b.skew_part()] {
                if part.hs_norm() > 1e-12 {
                    out.push(part);
                }
            }
        }
        out
    }

    /// Largest residual of one side's basis vectors against the other side,
    /// taken in both directions.
    pub fn subspace_distance(&self, other: &AlgebraBasis) -> f64 {
        let there = self.basis.iter().map(|b| other.residual(b));
        let back = other.basis.iter().map(|b| self.residual(b));
        there.chain(back).fold(0.0, f64::max)
    }

    /// Subspace equality: every basis vector of each side lies in the other
    /// within `eq_tol`.
    pub fn same_subspace(&self, other: &AlgebraBasis, tol: &Tolerance) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.dim == other.dim
            && self.subspace_distance(other) <= tol.eq_tol
    }

    /// `A ⊆ B` as subspaces.
    pub fn is_subspace_of(&self, other: &AlgebraBasis, tol: &Tolerance) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.basis.iter().all(|b| other.residual(b) <= tol.eq_tol)
    }

    /// Largest defect of the algebra axioms: orthonormality, *-closure,
    /// product closure and presence of the unit.
    pub fn axiom_defect(&self) -> f64 {
        let mut worst = self.residual(&ComplexMatrix::identity(self.ambient_dim));
        for (i, a) in self.basis.iter().enumerate() {
            worst = worst.max(self.residual(&a.adjoint()));
            for (j, b) in self.basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.hs_inner(b) - Complex64::new(expected, 0.0)).norm());
                worst = worst.max(self.residual(&(a * b)));
            }
        }
        worst
    }
}

/// Gram–Schmidt with one re-orthogonalisation pass.
pub(crate) struct Orthonormalizer {
    len: usize,
    vectors: Vec<DVector<Complex64>>,
}

impl Orthonormalizer {
    pub(crate) fn new(len: usize) -> Self {
        Orthonormalizer { len, vectors: Vec::new() }
    }

    /// Adds the normalised component of `v` orthogonal to the current span if
    /// its relative norm exceeds `threshold`; returns whether it was added.
    pub(crate) fn try_extend(&mut self, mut v: DVector<Complex64>, threshold: f64) -> bool {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return false;
        }
        v /= Complex64::new(norm, 0.0);
        for _ in 0..2 {
            for b in &self.vectors {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        let residual = v.norm();
        if residual > threshold {
            v /= Complex64::new(residual, 0.0);
            self.vectors.push(v);
            true
        } else {
            false
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.vectors.len()
    }

    pub(crate) fn last(&self) -> &DVector<Complex64> {
        self.vectors.last().expect("non-empty basis")
    }

    pub(crate) fn columns(&self) -> DMatrix<Complex64> {
        if self.vectors.is_empty() {
            return DMatrix::zeros(self.len, 0);
        }
        DMatrix::from_columns(&self.vectors)
    }
}

/// Smallest unital *-algebra containing the generators, with the default
/// word-length cap `2d²`.
pub fn close(gens: &GeneratorSet, tol: &Tolerance) -> Result<AlgebraBasis> {
    let d = gens.ambient_dim();
    close_with_cap(gens, tol, 2 * d * d)
}

/// Breadth-first closure over words in the generators and their adjoints.
///
/// Round `L` multiplies the directions that first appeared at word length `L`
/// by every generator; the span stops growing once a round adds nothing.
pub fn close_with_cap(gens: &GeneratorSet, tol: &Tolerance, word_cap: usize) -> Result<AlgebraBasis> {
    let d = gens.ambient_dim();
    let mut letters: Vec<ComplexMatrix> = Vec::with_capacity(2 * gens.generators().len());
    for g in gens.generators() {
        letters.push(g.clone());
        if g.hermitian_deviation() > tol.eq_tol {
            letters.push(g.adjoint());
        }
    }

    let mut ortho = Orthonormalizer::new(d * d);
    ortho.try_extend(ComplexMatrix::identity(d).vectorize(), tol.rank_tol);
    let mut frontier = Vec::new();
    for g in &letters {
        if ortho.try_extend(g.vectorize(), tol.rank_tol) {
            frontier.push(ComplexMatrix::from_vector(d, ortho.last()));
        }
    }

    let mut length = 1;
    while !frontier.is_empty() {
        if length >= word_cap.max(1) {
            return Err(Error::ClosureNotReached { word_cap });
        }
        length += 1;
        let mut next = Vec::new();
        for w in &frontier {
            for g in &letters {
                if ortho.try_extend((g * w).vectorize(), tol.rank_tol) {
                    next.push(ComplexMatrix::from_vector(d, ortho.last()));
                }
            }
        }
        frontier = next;
        debug_assert!(ortho.len() <= d * d);
    }
    Ok(AlgebraBasis::from_columns(d, &ortho.columns(), tol))
}

/// The `d² × d²` matrix of `x ↦ xb − bx` on column-major `vec(x)`.
fn commutator_map(b: &ComplexMatrix) -> DMatrix<Complex64> {
    let d = b.dim();
    let mut k = DMatrix::zeros(d * d, d * d);
    // Row (i, j) -> i + j d, column (p, l) -> p + l d:
    // (xb)_ij = Σ_l x_il b_lj and (bx)_ij = Σ_p b_ip x_pj.
    for j in 0..d {
        for i in 0..d {
            let row = i + j * d;
            for l in 0..d {
                k[(row, i + l * d)] += b.get(l, j);
            }
            for p in 0..d {
                k[(row, p + j * d)] -= b.get(i, p);
            }
        }
    }
    k
}

/// `{x ∈ M_d : xa = ax for all a ∈ alg}`, solved as one stacked linear system.
pub fn commutant(alg: &AlgebraBasis, tol: &Tolerance) -> Result<AlgebraBasis> {
    let d = alg.ambient_dim();
    // ‖x ↦ xb − bx‖ ≤ 2‖b‖ ≤ 2‖b‖_HS = 2 for every basis element.
    let blocks = alg.basis().iter().map(commutator_map);
    let scale = 2.0 * (alg.dim() as f64).sqrt();
    let kernel = null_space_stacked(blocks, d * d, scale, tol)?;
    Ok(AlgebraBasis::from_columns(d, &kernel, tol))
}

/// Weak closure of the algebra, realised as the bicommutant `alg''`.
pub fn baire_envelope(alg: &AlgebraBasis, tol: &Tolerance) -> Result<AlgebraBasis> {
    commutant(&commutant(alg, tol)?, tol)
}

/// Intersection of two spans.
pub fn intersect(a: &AlgebraBasis, b: &AlgebraBasis, tol: &Tolerance) -> Result<AlgebraBasis> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: a.ambient_dim(),
            found: b.ambient_dim(),
        });
    }
    let d = a.ambient_dim();
    let (ca, cb) = (a.columns(), b.columns());
    let mut joint = DMatrix::zeros(d * d, a.dim() + b.dim());
    joint.view_mut((0, 0), (d * d, a.dim())).copy_from(&ca);
    joint.view_mut((0, a.dim()), (d * d, b.dim())).copy_from(&cb);
    // A c + B e = 0  ⇔  A c = -B e lies in both spans.
    let kernel = null_space_rect(&joint, tol)?;
    let mut ortho = Orthonormalizer::new(d * d);
    for k in kernel.column_iter() {
        let c = k.rows(0, a.dim());
        ortho.try_extend(&ca * c, tol.rank_tol);
    }
    Ok(AlgebraBasis::from_columns(d, &ortho.columns(), tol))
}

/// `alg ∩ alg'`
pub fn center(alg: &AlgebraBasis, tol: &Tolerance) -> Result<AlgebraBasis> {
    intersect(alg, &commutant(alg, tol)?, tol)
}

pub fn is_commutative(alg: &AlgebraBasis, tol: &Tolerance) -> bool {
    let basis = alg.basis();
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i + 1..] {
            let c = a.commutator(b);
            if c.hs_norm() > tol.eq_tol && operator_norm(&c) > tol.eq_tol {
                return false;
            }
        }
    }
    true
}

/// Whether `m` lies in the span of `alg` within `eq_tol · (1 + ‖m‖)`.
pub fn contains(alg: &AlgebraBasis, m: &ComplexMatrix, tol: &Tolerance) -> bool {
    alg.contains(m, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn closed(d: usize, gens: Vec<ComplexMatrix>) -> AlgebraBasis {
        close(&GeneratorSet::new(d, gens).unwrap(), &tol()).unwrap()
    }

    fn diagonal_algebra(d: usize) -> AlgebraBasis {
        let entries: Vec<f64> = (1..=d).map(|k| k as f64).collect();
        closed(d, vec![ComplexMatrix::diag(&entries)])
    }

    fn block_m2_m2() -> AlgebraBasis {
        let mut gens = Vec::new();
        for offset in [0, 2] {
            for (i, j) in [(0, 1), (1, 0), (0, 0)] {
                gens.push(ComplexMatrix::unit(4, offset + i, offset + j));
            }
        }
        closed(4, gens)
    }

    /// Brute-force oracle: rank of the vectorised words `U^a V^b`.
    fn clock_shift(d: usize) -> (ComplexMatrix, ComplexMatrix) {
        let w = std::f64::consts::TAU / d as f64;
        let u = ComplexMatrix::diag_complex(
            &(0..d).map(|k| Complex64::from_polar(1.0, w * k as f64)).collect::<Vec<_>>(),
        );
        let mut v = ComplexMatrix::zeros(d);
        for k in 0..d {
            v = v + ComplexMatrix::unit(d, (k + 1) % d, k);
        }
        (u, v)
    }

    #[test]
    fn generator_set_validation() {
        assert!(GeneratorSet::new(2, vec![]).is_err());
        assert!(GeneratorSet::new(2, vec![ComplexMatrix::identity(3)]).is_err());
        let json = r#"{"dim": 1, "generators": [[[[2.0, 0.0]]]]}"#;
        let g: GeneratorSet = serde_json::from_str(json).unwrap();
        assert_eq!(g.ambient_dim(), 1);
        assert!(serde_json::from_str::<GeneratorSet>(r#"{"dim": 2, "generators": []}"#).is_err());
    }

    #[test]
    fn close_identity_gives_scalars() {
        let alg = closed(2, vec![ComplexMatrix::identity(2)]);
        assert_eq!(alg.dim(), 1);
        assert!(alg.same_subspace(&AlgebraBasis::scalars(2), &tol()));
    }

    #[test]
    fn close_distinct_diagonal_gives_all_diagonals() {
        // Vandermonde oracle: powers 0,1,2 of (1,2,3) are independent.
        let vandermonde = ComplexMatrix::from_real(3, &[1.0, 1.0, 1.0, 1.0, 2.0, 3.0, 1.0, 4.0, 9.0]).unwrap();
        assert_eq!(crate::numerics::rank_of(&vandermonde, &tol()), 3);
        let alg = diagonal_algebra(3);
        assert_eq!(alg.dim(), 3);
        for k in 0..3 {
            assert!(alg.contains(&ComplexMatrix::unit(3, k, k), &tol()));
        }
        assert!(alg.axiom_defect() < 1e-9);
    }

    #[test]
    fn close_clock_shift_three_is_full() {
        let (u, v) = clock_shift(3);
        // Oracle: the nine words U^a V^b are linearly independent.
        let mut words = Vec::new();
        let mut ua = ComplexMatrix::identity(3);
        for _ in 0..3 {
            let mut w = ua.clone();
            for _ in 0..3 {
                words.push(w.clone());
                w = &w * &v;
            }
            ua = &ua * &u;
        }
        let oracle = AlgebraBasis::span_of(3, &words, &tol()).unwrap();
        assert_eq!(oracle.dim(), 9);
        let alg = closed(3, vec![u, v]);
        assert_eq!(alg.dim(), 9);
        assert!(alg.same_subspace(&oracle, &tol()));
    }

    #[test]
    fn word_cap_too_small_is_reported() {
        let (u, v) = clock_shift(3);
        let gens = GeneratorSet::new(3, vec![u, v]).unwrap();
        assert!(matches!(
            close_with_cap(&gens, &tol(), 1),
            Err(Error::ClosureNotReached { word_cap: 1 })
        ));
    }

    #[test]
    fn generator_order_does_not_matter() {
        let (u, v) = clock_shift(4);
        let p = ComplexMatrix::unit(4, 0, 0);
        let a = closed(4, vec![p.clone(), u.clone()]);
        let b = closed(4, vec![u, p]);
        assert!(a.same_subspace(&b, &tol()));
        let _ = v;
    }

    #[test]
    fn commutant_of_full_is_scalars() {
        let c = commutant(&AlgebraBasis::full(2), &tol()).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(c.same_subspace(&AlgebraBasis::scalars(2), &tol()));
    }

    #[test]
    fn diagonal_algebra_is_self_commutant() {
        let diag = diagonal_algebra(3);
        let c = commutant(&diag, &tol()).unwrap();
        assert!(c.same_subspace(&diag, &tol()));
    }

    #[test]
    fn commutant_of_scalars_is_full() {
        let c = commutant(&AlgebraBasis::scalars(2), &tol()).unwrap();
        assert_eq!(c.dim(), 4);
        assert!(c.contains_unit());
    }

    #[test]
    fn envelope_examples() {
        let full = AlgebraBasis::full(3);
        assert!(baire_envelope(&full, &tol()).unwrap().same_subspace(&full, &tol()));

        let alg = closed(2, vec![ComplexMatrix::unit(2, 0, 0)]);
        assert_eq!(alg.dim(), 2);
        let comm = commutant(&alg, &tol()).unwrap();
        assert_eq!(comm.dim(), 2);
        assert!(baire_envelope(&alg, &tol()).unwrap().same_subspace(&alg, &tol()));

        // rank-one projector in M_3: alg = span{1, p}; commutant = M_1 ⊕ M_2
        let v = DVector::from_vec(vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
            Complex64::new(0.0, 0.0),
        ]);
        let p = ComplexMatrix::outer(&v);
        let alg = closed(3, vec![p.clone()]);
        assert_eq!(alg.dim(), 2);
        assert_eq!(commutant(&alg, &tol()).unwrap().dim(), 5);
        let env = baire_envelope(&alg, &tol()).unwrap();
        assert!(env.same_subspace(&alg, &tol()));
        assert!(env.contains(&p, &tol()));
        assert!(env.contains(&(ComplexMatrix::identity(3) - &p), &tol()));
    }

    #[test]
    fn center_examples() {
        let z = center(&AlgebraBasis::full(3), &tol()).unwrap();
        assert_eq!(z.dim(), 1);
        let diag = diagonal_algebra(3);
        assert!(center(&diag, &tol()).unwrap().same_subspace(&diag, &tol()));
        let blocks = block_m2_m2();
        assert_eq!(blocks.dim(), 8);
        let z = center(&blocks, &tol()).unwrap();
        assert_eq!(z.dim(), 2);
        assert!(z.contains(&ComplexMatrix::diag(&[1.0, 1.0, 0.0, 0.0]), &tol()));
        assert!(z.contains(&ComplexMatrix::diag(&[0.0, 0.0, 1.0, 1.0]), &tol()));
    }

    #[test]
    fn commutativity_examples() {
        assert!(is_commutative(&diagonal_algebra(4), &tol()));
        assert!(!is_commutative(&AlgebraBasis::full(2), &tol()));
        let (u, v) = clock_shift(4);
        assert!(!is_commutative(&closed(4, vec![u, v]), &tol()));
    }

    #[test]
    fn containment_examples() {
        let diag = diagonal_algebra(3);
        assert!(contains(&diag, &ComplexMatrix::diag(&[-2.0, 0.5, 7.0]), &tol()));
        assert!(!contains(&AlgebraBasis::scalars(2), &ComplexMatrix::unit(2, 0, 0), &tol()));
    }

    #[test]
    fn intersection_of_transverse_spans_is_trivial() {
        let a = AlgebraBasis::span_of(2, &[ComplexMatrix::unit(2, 0, 1)], &tol()).unwrap();
        let b = AlgebraBasis::span_of(2, &[ComplexMatrix::unit(2, 1, 0)], &tol()).unwrap();
        assert_eq!(intersect(&a, &b, &tol()).unwrap().dim(), 0);
    }

    #[test]
    fn serialises_with_dimension_fields() {
        let json = serde_json::to_value(AlgebraBasis::scalars(1)).unwrap();
        assert_eq!(json["ambient_dim"], 1);
        assert_eq!(json["dim"], 1);
        assert_eq!(json["contains_unit"], true);
        assert_eq!(json["basis"][0], serde_json::json!([[[1.0, 0.0]]]));
    }
}

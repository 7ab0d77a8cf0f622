//! Superselection sectors of a closed algebra.
//!
//! Every unital *-subalgebra of `M_d` is unitarily a direct sum
//! `⊕_i M_{n_i} ⊗ 1_{m_i}`. The summands are cut out by the minimal
//! projectors of the center; within a summand the algebra is a full matrix
//! algebra of size `n_i` repeated `m_i` times. All factors here are of type
//! `I_n`.
//!
//! The Murray–von Neumann dimension of a projector is reported per sector as
//! its reduced rank `rank(z_i p) / m_i`. On a factor this is the usual
//! integer-valued dimension function; on a non-factor the vector extends it
//! sector by sector.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::algebra::{center, AlgebraBasis, Orthonormalizer};
use crate::error::{Error, Result};
use crate::numerics::{
    cluster_descending, eig_unchecked, gap_margins, operator_norm, rank_with_scale, right_singular,
    ComplexMatrix, Tolerance,
};
use crate::seeds;

const ATTEMPTS: u64 = 5;
const DIAGONALIZATION_SEED: u64 = 0x5EC7_0125;
/// Spectral gaps between `gap` and `gap * AMBIGUITY_FACTOR` are neither
/// clearly degenerate nor clearly separated.
const AMBIGUITY_FACTOR: f64 = 1e3;

/// One superselection sector: a minimal central projector and the block it
/// cuts out.
#[derive(Debug, Clone, Serialize)]
pub struct Sector {
    pub block_size: usize,
    pub multiplicity: usize,
    pub central_projector: ComplexMatrix,
    /// `d × (n·m)` isometry; column `k·m + j` carries block coordinate
    /// `e_k ⊗ f_j`, so the compressed algebra becomes `M_n ⊗ 1_m`.
    #[serde(skip)]
    pub isometry: DMatrix<Complex64>,
}

impl Sector {
    /// Transports a block-level operator `a ∈ M_n` into the ambient space as
    /// `W (a ⊗ 1_m) W*`.
    pub fn embed(&self, a: &DMatrix<Complex64>) -> ComplexMatrix {
        let (n, m) = (self.block_size, self.multiplicity);
        assert_eq!(a.shape(), (n, n));
        let lifted = DMatrix::from_fn(n * m, n * m, |r, c| {
            if r % m == c % m {
                a[(r / m, c / m)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        ComplexMatrix::from_inner(&self.isometry * lifted * self.isometry.adjoint())
    }

    /// Minimal projector `W (e_kk ⊗ 1_m) W*` of this block.
    pub fn minimal_projector(&self, k: usize) -> ComplexMatrix {
        let n = self.block_size;
        let mut e = DMatrix::zeros(n, n);
        e[(k, k)] = Complex64::new(1.0, 0.0);
        self.embed(&e)
    }

    /// Reduced `n × n` operator: compress to the block, then trace out the
    /// multiplicity space.
    pub fn reduce(&self, m: &ComplexMatrix) -> DMatrix<Complex64> {
        let (n, mult) = (self.block_size, self.multiplicity);
        let compressed = self.isometry.adjoint() * m.as_matrix() * &self.isometry;
        DMatrix::from_fn(n, n, |k, l| {
            (0..mult).map(|j| compressed[(k * mult + j, l * mult + j)]).sum()
        })
    }

    /// Distance of `W* a W` from the `M_n ⊗ 1_m` form.
    fn tensor_form_defect(&self, a: &ComplexMatrix) -> f64 {
        let (n, mult) = (self.block_size, self.multiplicity);
        let t = self.isometry.adjoint() * a.as_matrix() * &self.isometry;
        let reduced = self.reduce(a) / Complex64::new(mult as f64, 0.0);
        let mut defect = 0.0f64;
        for r in 0..n * mult {
            for c in 0..n * mult {
                let expected = if r % mult == c % mult {
                    reduced[(r / mult, c / mult)]
                } else {
                    Complex64::new(0.0, 0.0)
                };
                defect = defect.max((t[(r, c)] - expected).norm());
            }
        }
        defect
    }
}

/// Block structure `⊕_i M_{n_i} ⊗ 1_{m_i}` of a closed algebra.
#[derive(Debug, Clone)]
pub struct SectorDecomposition {
    pub ambient_dim: usize,
    pub sectors: Vec<Sector>,
}

impl Serialize for SectorDecomposition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.sectors.len()))?;
        for s in &self.sectors {
            seq.serialize_element(s)?;
        }
        seq.end()
    }
}

impl SectorDecomposition {
    pub fn sector_count(&self) -> usize {
        self.sectors.len()
    }

    /// `(block_size, multiplicity)` per sector.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        self.sectors.iter().map(|s| (s.block_size, s.multiplicity)).collect()
    }

    /// Per-sector reduced rank of a projector already known to lie in the
    /// algebra.
    pub fn dimension_vector(&self, p: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<usize>> {
        self.sectors
            .iter()
            .map(|s| {
                let r = rank_with_scale(&(&s.central_projector * p), 1.0, tol);
                if r % s.multiplicity != 0 {
                    return Err(Error::PreconditionFailed(format!(
                        "rank {r} in a sector of multiplicity {} is not a multiple; \
                         projector is not in the algebra",
                        s.multiplicity
                    )));
                }
                Ok(r / s.multiplicity)
            })
            .collect()
    }

    /// Largest deviation of the algebra's compressions from block form.
    pub fn block_form_defect(&self, alg: &AlgebraBasis) -> f64 {
        let mut worst = 0.0f64;
        for s in &self.sectors {
            for b in alg.basis() {
                worst = worst.max(s.tensor_form_defect(b));
            }
        }
        worst
    }
}

fn random_real_combination<R: Rng>(rng: &mut R, elements: &[ComplexMatrix], dim: usize) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(dim);
    for e in elements {
        let c: f64 = rng.sample(StandardNormal);
        h = h + e.scale_re(c);
    }
    h
}

/// Orders projectors by their diagonals, lexicographically descending, so
/// that block-diagonal sectors come out in block order.
fn canonical_order(projectors: &mut [ComplexMatrix]) {
    projectors.sort_by(|a, b| {
        for k in 0..a.dim() {
            let (x, y) = (a.get(k, k).re, b.get(k, k).re);
            if (x - y).abs() > 1e-9 {
                return y.total_cmp(&x);
            }
        }
        std::cmp::Ordering::Equal
    });
}

/// Minimal projectors of the center, pairwise orthogonal and summing to one.
///
/// A generic real combination of a self-adjoint spanning set of the center
/// is diagonalised and its spectrum clustered; the clusters are the joint
/// eigenspaces. The attempt is repeated with fresh coefficients when the
/// cluster count disagrees with `dim(center)` or a gap is ambiguous.
pub fn minimal_central_projectors(alg: &AlgebraBasis, tol: &Tolerance) -> Result<Vec<ComplexMatrix>> {
    let z = center(alg, tol)?;
    spectral_atoms(&z, tol)
}

/// Minimal projectors of a commutative algebra.
pub(crate) fn spectral_atoms(commutative: &AlgebraBasis, tol: &Tolerance) -> Result<Vec<ComplexMatrix>> {
    let d = commutative.ambient_dim();
    let k = commutative.dim();
    if k <= 1 {
        return Ok(vec![ComplexMatrix::identity(d)]);
    }
    let spanning = commutative.self_adjoint_spanning_set();
    let mut last_problem = String::new();
    for attempt in 0..ATTEMPTS {
        let mut rng = seeds::rng(seeds::derive(DIAGONALIZATION_SEED, attempt));
        let h = random_real_combination(&mut rng, &spanning, d);
        let eig = eig_unchecked(&h)?;
        let scale = eig.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
        let gap = tol.rank_tol * scale;
        let clusters = cluster_descending(&eig.values, gap);
        let (open, _) = gap_margins(&eig.values, gap);
        if clusters.len() != k {
            last_problem = format!("{} clusters for a {k}-dimensional center", clusters.len());
            continue;
        }
        if open < gap * AMBIGUITY_FACTOR {
            last_problem = format!("spectral gap {open:.3e} too close to threshold {gap:.3e}");
            continue;
        }
        let mut projectors: Vec<ComplexMatrix> =
            clusters.into_iter().map(|c| eig.spectral_projector(c)).collect();
        if let Some(bad) = projectors.iter().find(|p| !commutative.contains(p, tol)) {
            last_problem = format!(
                "cluster projector escapes the center (residual {:.3e})",
                commutative.residual(bad)
            );
            continue;
        }
        canonical_order(&mut projectors);
        return Ok(projectors);
    }
    Err(Error::CenterDiagonalizationFailed(last_problem))
}

/// Orthonormal basis (columns) of the range of a projector.
fn range_basis(p: &ComplexMatrix, tol: &Tolerance) -> Result<DMatrix<Complex64>> {
    let r = rank_with_scale(p, 1.0, tol);
    let eig = eig_unchecked(&p.hermitian_part())?;
    Ok(eig.columns(0..r))
}

fn decompose_sector(
    alg: &AlgebraBasis,
    z: ComplexMatrix,
    tol: &Tolerance,
) -> Result<Sector> {
    let range = range_basis(&z, tol)?;
    let r = range.ncols();
    let compressed: Vec<DMatrix<Complex64>> = alg
        .basis()
        .iter()
        .map(|b| range.adjoint() * b.as_matrix() * &range)
        .collect();
    let mut ortho = Orthonormalizer::new(r * r);
    for c in &compressed {
        ortho.try_extend(nalgebra::DVector::from_column_slice(c.as_slice()), tol.rank_tol);
    }
    let span_dim = ortho.len();
    let n = (span_dim as f64).sqrt().round() as usize;
    if n == 0 || n * n != span_dim || r % n != 0 {
        return Err(Error::CenterDiagonalizationFailed(format!(
            "compressed algebra of dimension {span_dim} on a rank-{r} sector is not M_n ⊗ 1_m"
        )));
    }
    let m = r / n;
    let compressed: Vec<ComplexMatrix> = compressed.into_iter().map(ComplexMatrix::from_inner).collect();
    let hermitian: Vec<ComplexMatrix> = compressed
        .iter()
        .flat_map(|c| [c.hermitian_part(), c.skew_part()])
        .collect();

    let mut last_problem = String::new();
    for attempt in 0..ATTEMPTS {
        let mut rng = seeds::rng(seeds::derive(DIAGONALIZATION_SEED ^ 0xB10C, attempt));
        let h = random_real_combination(&mut rng, &hermitian, r);
        let eig = eig_unchecked(&h)?;
        let scale = eig.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
        let gap = tol.rank_tol * scale;
        let clusters = cluster_descending(&eig.values, gap);
        if clusters.len() != n || clusters.iter().any(|c| c.len() != m) {
            last_problem = format!("generic block element split into clusters {clusters:?}");
            continue;
        }
        let frames: Vec<DMatrix<Complex64>> = clusters.into_iter().map(|c| eig.columns(c)).collect();

        // Transport the first eigenspace onto the others through a generic
        // element: F_k* a F_1 is a multiple of a unitary.
        let mut a = DMatrix::zeros(r, r);
        for c in &compressed {
            let w = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            a += c.as_matrix() * w;
        }
        let mut local = DMatrix::zeros(r, n * m);
        let mut degenerate = false;
        for (k, frame) in frames.iter().enumerate() {
            let aligned = if k == 0 {
                frame.clone()
            } else {
                let y = frame.adjoint() * &a * &frames[0];
                let scale = (y.norm_squared() / m as f64).sqrt();
                if scale < 1e-6 {
                    degenerate = true;
                    break;
                }
                frame * (y / Complex64::new(scale, 0.0))
            };
            local.view_mut((0, k * m), (r, m)).copy_from(&aligned);
        }
        if degenerate {
            last_problem = "generic element failed to connect eigenspaces".into();
            continue;
        }
        let sector = Sector {
            block_size: n,
            multiplicity: m,
            central_projector: z.clone(),
            isometry: &range * local,
        };
        let defect = alg
            .basis()
            .iter()
            .map(|b| sector.tensor_form_defect(b) / (1.0 + operator_norm(b)))
            .fold(0.0f64, f64::max);
        if defect > 1e-7 {
            last_problem = format!("block form defect {defect:.3e}");
            continue;
        }
        return Ok(sector);
    }
    Err(Error::CenterDiagonalizationFailed(last_problem))
}

/// Wedderburn form of a closed algebra.
pub fn block_decomposition(alg: &AlgebraBasis, tol: &Tolerance) -> Result<SectorDecomposition> {
    let zs = minimal_central_projectors(alg, tol)?;
    let sectors = zs
        .into_iter()
        .map(|z| decompose_sector(alg, z, tol))
        .collect::<Result<Vec<_>>>()?;
    let total: usize = sectors.iter().map(|s| s.block_size * s.multiplicity).sum();
    assert_eq!(total, alg.ambient_dim(), "sector sizes must exhaust the ambient space");
    Ok(SectorDecomposition {
        ambient_dim: alg.ambient_dim(),
        sectors,
    })
}

/// Trivial center.
pub fn is_factor(alg: &AlgebraBasis, tol: &Tolerance) -> Result<bool> {
    Ok(center(alg, tol)?.dim() == 1)
}

/// Validates that `p` is a projector lying in `alg`.
pub fn check_projector_in(alg: &AlgebraBasis, p: &ComplexMatrix, tol: &Tolerance) -> Result<()> {
    p.check_dim(alg.ambient_dim())?;
    let deviation = (p * p - p).hs_norm().max(p.hermitian_deviation());
    if deviation > tol.eq_tol {
        return Err(Error::NotProjector { deviation });
    }
    if !alg.contains(p, tol) {
        return Err(Error::NotInAlgebra {
            residual: alg.residual(p),
        });
    }
    Ok(())
}

/// Per-sector Murray–von Neumann dimension.
pub fn mvn_dimension(alg: &AlgebraBasis, p: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<usize>> {
    check_projector_in(alg, p, tol)?;
    block_decomposition(alg, tol)?.dimension_vector(p, tol)
}

/// `p ∼ q`: decided by equality of per-sector reduced ranks.
pub fn projectors_equivalent(
    alg: &AlgebraBasis,
    p: &ComplexMatrix,
    q: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<bool> {
    check_projector_in(alg, p, tol)?;
    check_projector_in(alg, q, tol)?;
    let sectors = block_decomposition(alg, tol)?;
    Ok(sectors.dimension_vector(p, tol)? == sectors.dimension_vector(q, tol)?)
}

/// Explicit partial isometry `V ∈ alg` with `V*V = p`, `VV* = q`, if one
/// exists. Built from the polar part of `q w p` for a generic `w ∈ alg`;
/// serves as an independent check on [`projectors_equivalent`].
pub fn equivalence_witness(
    alg: &AlgebraBasis,
    p: &ComplexMatrix,
    q: &ComplexMatrix,
    seed: u64,
    tol: &Tolerance,
) -> Result<Option<ComplexMatrix>> {
    check_projector_in(alg, p, tol)?;
    check_projector_in(alg, q, tol)?;
    let d = alg.ambient_dim();
    let mut rng = seeds::rng(seed);
    let mut w = DMatrix::zeros(d, d);
    for b in alg.basis() {
        let c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        w += b.as_matrix() * c;
    }
    let w_norm = w.norm();
    let x = q.as_matrix() * w * p.as_matrix();
    if rank_with_scale(&ComplexMatrix::from_inner(x.clone()), w_norm, tol) == 0 {
        let zero = ComplexMatrix::zeros(d);
        let trivially = (p.hs_norm() <= tol.eq_tol) && (q.hs_norm() <= tol.eq_tol);
        return Ok(trivially.then_some(zero));
    }
    // Left vectors are recovered as `x v_k / σ_k`; the library's left
    // factor is unreliable for rank-deficient complex input.
    let (values, right) = right_singular(&x)?;
    let top = values.first().copied().unwrap_or(0.0).max(w_norm);
    let mut v = DMatrix::zeros(d, d);
    for (k, &s) in values.iter().enumerate() {
        if s > tol.rank_tol * top {
            let vk = right.column(k);
            let uk = &x * vk / Complex64::new(s, 0.0);
            v += uk * vk.adjoint();
        }
    }
    let v = ComplexMatrix::from_inner(v);
    let ok = operator_norm(&(v.adjoint() * &v - p)) <= 1e-7
        && operator_norm(&(&v * v.adjoint() - q)) <= 1e-7;
    Ok(ok.then_some(v))
}

//! States as density matrices, their restriction to projectors, and the
//! commutative special case of point (Dirac) states.
//!
//! A state is always carried by a density `ρ` on the ambient `M_d` and acts
//! as `a ↦ tr(ρa)`. Its lift to the envelope is the same density, since the
//! envelope of a finite-dimensional algebra is the algebra itself. Purity is
//! relative to the algebra: a mixed ambient density may be pure on a
//! subalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{baire_envelope, is_commutative, AlgebraBasis};
use crate::error::{Error, Result};
use crate::logic::{join, orthocomplement, Projector, ProjectorSampler, LAW_TOLERANCE};
use crate::numerics::{eig_unchecked, operator_norm, rank_with_scale, ComplexMatrix, Tolerance};
use crate::sectors::{block_decomposition, check_projector_in, spectral_atoms, SectorDecomposition};
use crate::seeds;

/// A density matrix: self-adjoint, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState")]
pub struct StateFunctional {
    density: ComplexMatrix,
}

#[derive(Deserialize)]
struct RawState {
    density: ComplexMatrix,
}

impl TryFrom<RawState> for StateFunctional {
    type Error = Error;

    fn try_from(raw: RawState) -> Result<Self> {
        make_state(raw.density, &Tolerance::default())
    }
}

impl StateFunctional {
    pub fn density(&self) -> &ComplexMatrix {
        &self.density
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    /// `tr(ρa)`
    pub fn evaluate(&self, a: &ComplexMatrix) -> Result<Complex64> {
        evaluate(self, a)
    }
}

pub fn make_state(rho: ComplexMatrix, tol: &Tolerance) -> Result<StateFunctional> {
    let deviation = rho.hermitian_deviation();
    if deviation > tol.eq_tol {
        return Err(Error::NotHermitian { deviation });
    }
    let density = rho.hermitian_part();
    let eig = eig_unchecked(&density)?;
    let lowest = *eig.values.last().expect("dimension >= 1");
    if lowest < -tol.rank_tol {
        return Err(Error::NotPositive { eigenvalue: lowest });
    }
    let trace = density.trace().re;
    if (trace - 1.0).abs() > tol.eq_tol {
        return Err(Error::NotNormalized { trace });
    }
    Ok(StateFunctional { density })
}

/// Vector state `vv*` for a unit vector `v`.
pub fn vector_state(v: &[Complex64], tol: &Tolerance) -> Result<StateFunctional> {
    let v = nalgebra::DVector::from_column_slice(v);
    make_state(ComplexMatrix::outer(&v), tol)
}

/// Normalised trace `1/d`.
pub fn maximally_mixed(dim: usize) -> StateFunctional {
    StateFunctional {
        density: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
    }
}

/// `t ρ₁ + (1 − t) ρ₂`
pub fn mixture(t: f64, a: &StateFunctional, b: &StateFunctional, tol: &Tolerance) -> Result<StateFunctional> {
    b.density.check_dim(a.dim())?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ValueOutOfRange { value: t });
    }
    make_state(a.density.scale_re(t) + b.density.scale_re(1.0 - t), tol)
}

pub fn evaluate(state: &StateFunctional, a: &ComplexMatrix) -> Result<Complex64> {
    a.check_dim(state.dim())?;
    Ok(state.density.hs_inner(a))
}

/// A state seen only through its values on the projectors of an algebra's
/// envelope.
#[derive(Debug, Clone)]
pub struct LogicalState {
    pub underlying: StateFunctional,
    pub domain: AlgebraBasis,
}

impl LogicalState {
    /// `φ_L(p) = tr(ρp)` for a projector of the domain.
    pub fn value(&self, p: &Projector, tol: &Tolerance) -> Result<f64> {
        p.matrix().check_dim(self.domain.ambient_dim())?;
        check_projector_in(&self.domain, p.matrix(), tol)?;
        self.value_unchecked(p, tol)
    }

    fn value_unchecked(&self, p: &Projector, tol: &Tolerance) -> Result<f64> {
        let value = evaluate(&self.underlying, p.matrix())?.re;
        if value < -tol.eq_tol || value > 1.0 + tol.eq_tol {
            return Err(Error::ValueOutOfRange { value });
        }
        Ok(value)
    }
}

/// Restricts a state to the projectors of `baire_envelope(alg)`.
///
/// Fails only if the envelope itself cannot be computed.
pub fn restrict_logical(state: &StateFunctional, alg: &AlgebraBasis, tol: &Tolerance) -> Result<LogicalState> {
    state.density.check_dim(alg.ambient_dim())?;
    Ok(LogicalState {
        underlying: state.clone(),
        domain: baire_envelope(alg, tol)?,
    })
}

/// Checks `φ_L(∨ pᵢ) = Σ φ_L(pᵢ)` and `φ_L(pᵢ⊥) = 1 − φ_L(pᵢ)`.
///
/// Countable families reduce to finite ones: a pairwise orthogonal family in
/// `M_d` has at most `d` nonzero members, so zero members are dropped and
/// the rest is checked exactly.
pub fn check_sigma_orthoadditive(ls: &LogicalState, family: &[Projector], tol: &Tolerance) -> Result<bool> {
    Ok(sigma_orthoadditive_residuals(ls, family, tol)?.passes())
}

/// Worst residuals of the two identities checked by
/// [`check_sigma_orthoadditive`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdditivityResiduals {
    pub additivity: f64,
    pub complement: f64,
}

impl AdditivityResiduals {
    pub const ADDITIVITY_TOLERANCE: f64 = LAW_TOLERANCE;
    pub const COMPLEMENT_TOLERANCE: f64 = 1e-9;

    pub fn passes(&self) -> bool {
        self.additivity <= Self::ADDITIVITY_TOLERANCE && self.complement <= Self::COMPLEMENT_TOLERANCE
    }
}

pub fn sigma_orthoadditive_residuals(
    ls: &LogicalState,
    family: &[Projector],
    tol: &Tolerance,
) -> Result<AdditivityResiduals> {
    let d = ls.domain.ambient_dim();
    for p in family {
        p.matrix().check_dim(d)?;
    }
    let members: Vec<(usize, &Projector)> = family.iter().enumerate().filter(|(_, p)| !p.is_zero()).collect();
    for (a, &(i, p)) in members.iter().enumerate() {
        for &(j, q) in &members[a + 1..] {
            if operator_norm(&(p.matrix() * q.matrix())) > tol.eq_tol {
                return Err(Error::NotOrthogonalFamily { first: i, second: j });
            }
        }
    }
    debug_assert!(members.len() <= d);

    let mut joined = Projector::zero(d);
    let mut sum = 0.0;
    let mut complement = 0.0f64;
    for &(_, p) in &members {
        let v = ls.value(p, tol)?;
        sum += v;
        let vc = ls.value_unchecked(&orthocomplement(p), tol)?;
        complement = complement.max((vc - (1.0 - v)).abs());
        joined = join(&joined, p, tol)?;
    }
    let additivity = (ls.value_unchecked(&joined, tol)? - sum).abs();
    Ok(AdditivityResiduals { additivity, complement })
}

/// A pairwise orthogonal family of projectors in `alg`: a random subset of
/// the spectral projectors of a random self-adjoint element. Its join is
/// the sum of the members.
pub fn random_orthogonal_family(alg: &AlgebraBasis, seed: u64, tol: &Tolerance) -> Vec<Projector> {
    let sampler = ProjectorSampler::new(alg, tol);
    let parts = sampler.partition(seeds::lane(seed, 0));
    let mut rng = seeds::rng(seeds::lane(seed, 1));
    parts.into_iter().filter(|_| rng.random_bool(0.5)).collect()
}

/// A random density of full support on `C^d`, deterministic in `seed`.
pub fn random_state(dim: usize, seed: u64) -> StateFunctional {
    let mut rng = seeds::rng(seed);
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(rand_distr::StandardNormal);
        let im: f64 = rng.sample(rand_distr::StandardNormal);
        Complex64::new(re, im)
    });
    let gg = ComplexMatrix::from_inner(&g * g.adjoint()).hermitian_part();
    let trace = gg.trace().re;
    StateFunctional {
        density: gg.scale_re(1.0 / trace),
    }
}

/// Reduced weight and rank per sector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorWeight {
    pub weight: f64,
    pub rank: usize,
}

pub fn sector_weights(state: &StateFunctional, sectors: &SectorDecomposition, tol: &Tolerance) -> Vec<SectorWeight> {
    sectors
        .sectors
        .iter()
        .map(|s| {
            let reduced = ComplexMatrix::from_inner(s.reduce(&state.density)).hermitian_part();
            SectorWeight {
                weight: reduced.trace().re,
                rank: rank_with_scale(&reduced, 1.0, tol),
            }
        })
        .collect()
}

/// Pure on `alg`: exactly one sector carries weight and its reduced
/// density has rank one.
pub fn is_pure(state: &StateFunctional, alg: &AlgebraBasis, tol: &Tolerance) -> Result<bool> {
    state.density.check_dim(alg.ambient_dim())?;
    let sectors = block_decomposition(alg, tol)?;
    Ok(is_pure_in(state, &sectors, tol))
}

pub(crate) fn is_pure_in(state: &StateFunctional, sectors: &SectorDecomposition, tol: &Tolerance) -> bool {
    let weights = sector_weights(state, sectors, tol);
    let carrying: Vec<&SectorWeight> = weights.iter().filter(|w| w.weight > tol.rank_tol).collect();
    carrying.len() == 1 && carrying[0].rank == 1
}

/// The characters of a commutative unital algebra, one per joint eigenspace,
/// each realised by the normalised projector onto that eigenspace.
pub fn dirac_characters(alg: &AlgebraBasis, tol: &Tolerance) -> Result<Vec<StateFunctional>> {
    if !is_commutative(alg, tol) {
        return Err(Error::NotCommutative);
    }
    if !alg.contains_unit() {
        return Err(Error::PreconditionFailed("characters need a unital algebra".into()));
    }
    Ok(spectral_atoms(alg, tol)?
        .into_iter()
        .map(|p| {
            let rank = p.trace().re;
            StateFunctional {
                density: p.hermitian_part().scale_re(1.0 / rank),
            }
        })
        .collect())
}

/// Worst defect `|χ(ab) − χ(a)χ(b)|` over pairs of basis elements.
pub fn multiplicativity_defect(state: &StateFunctional, alg: &AlgebraBasis) -> Result<f64> {
    let mut worst = 0.0f64;
    for a in alg.basis() {
        let ea = evaluate(state, a)?;
        for b in alg.basis() {
            let eab = evaluate(state, &(a * b))?;
            worst = worst.max((eab - ea * evaluate(state, b)?).norm());
        }
    }
    Ok(worst)
}

/// No nonzero positive element of `alg` is annihilated by every member.
///
/// Decided on the Gram form `G_kl = Σᵢ φᵢ(b_k* b_l)` over a basis of `alg`:
/// `Σᵢ φᵢ(x*x) = c* G c` for `x = Σ c_k b_k`, and every positive element is
/// of the form `x*x`, so the family separates iff `G` is nonsingular.
pub fn is_separating(family: &[StateFunctional], alg: &AlgebraBasis, tol: &Tolerance) -> Result<bool> {
    let d = alg.ambient_dim();
    for s in family {
        s.density.check_dim(d)?;
    }
    let total = family
        .iter()
        .fold(ComplexMatrix::zeros(d), |acc, s| acc + &s.density);
    let basis = alg.basis();
    let k = basis.len();
    let products: Vec<ComplexMatrix> = basis.iter().map(|b| &total * b).collect();
    let gram = DMatrix::from_fn(k, k, |r, c| basis[r].hs_inner(&products[c]));
    let gram = ComplexMatrix::from_inner(gram).hermitian_part();
    Ok(rank_with_scale(&gram, 1.0, tol) == k)
}

/// Rank-one densities on a basis grid of `C^d`, forming a separating family
/// of pure states for the full matrix algebra: `e_k`, `(e_k + e_l)/√2` and
/// `(e_k + i e_l)/√2`.
pub fn grid_vector_states(dim: usize) -> Vec<StateFunctional> {
    let mut out = Vec::with_capacity(dim * dim);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let push = |out: &mut Vec<StateFunctional>, v: Vec<Complex64>| {
        let v = nalgebra::DVector::from_vec(v);
        out.push(StateFunctional {
            density: ComplexMatrix::outer(&v),
        });
    };
    for k in 0..dim {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[k] = Complex64::new(1.0, 0.0);
        push(&mut out, v);
        for l in k + 1..dim {
            for phase in [Complex64::new(h, 0.0), Complex64::new(0.0, h)] {
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                v[k] = Complex64::new(h, 0.0);
                v[l] = phase;
                push(&mut out, v);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{close, GeneratorSet};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag_algebra(values: &[f64]) -> AlgebraBasis {
        let gens = GeneratorSet::new(values.len(), vec![ComplexMatrix::diag(values)]).unwrap();
        close(&gens, &tol()).unwrap()
    }

    fn proj(values: &[f64]) -> Projector {
        Projector::new(ComplexMatrix::diag(values), &tol()).unwrap()
    }

    #[test]
    fn make_state_examples() {
        make_state(ComplexMatrix::identity(2).scale_re(0.5), &tol()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        vector_state(&[c(h), Complex64::new(0.0, h)], &tol()).unwrap();
        assert!(matches!(
            make_state(ComplexMatrix::diag(&[1.5, -0.5]), &tol()),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            make_state(ComplexMatrix::diag(&[0.5, 0.6]), &tol()),
            Err(Error::NotNormalized { .. })
        ));
        let skew = ComplexMatrix::from_real(2, &[0.5, 1.0, 0.0, 0.5]).unwrap();
        assert!(matches!(make_state(skew, &tol()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn evaluate_examples() {
        let mixed = maximally_mixed(2);
        assert!((evaluate(&mixed, &ComplexMatrix::unit(2, 0, 0)).unwrap() - c(0.5)).norm() < 1e-15);
        let v = vector_state(&[c(1.0), c(0.0)], &tol()).unwrap();
        assert!((evaluate(&v, &ComplexMatrix::diag(&[3.0, 7.0])).unwrap() - c(3.0)).norm() < 1e-15);
        let r = random_state(4, 5);
        assert!((evaluate(&r, &ComplexMatrix::identity(4)).unwrap() - c(1.0)).norm() < 1e-12);
        assert!(matches!(
            evaluate(&r, &ComplexMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn state_json_round_trip_validates() {
        let s = maximally_mixed(2);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.starts_with("{\"density\":"));
        assert_eq!(serde_json::from_str::<StateFunctional>(&json).unwrap(), s);
        let bad = r#"{"density": [[[2.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]]}"#;
        assert!(serde_json::from_str::<StateFunctional>(bad).is_err());
    }

    #[test]
    fn restrict_logical_examples() {
        let alg = diag_algebra(&[1.0, 2.0]);
        let ls = restrict_logical(&maximally_mixed(2), &alg, &tol()).unwrap();
        assert!((ls.value(&proj(&[1.0, 0.0]), &tol()).unwrap() - 0.5).abs() < 1e-15);

        let full = AlgebraBasis::full(3);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = vector_state(&[c(h), c(h), c(0.0)], &tol()).unwrap();
        let ls = restrict_logical(&v, &full, &tol()).unwrap();
        assert!((ls.value(&proj(&[1.0, 1.0, 0.0]), &tol()).unwrap() - 1.0).abs() < 1e-12);

        let ls = restrict_logical(&vector_state(&[c(h), c(h)], &tol()).unwrap(), &AlgebraBasis::full(2), &tol())
            .unwrap();
        assert!((ls.value(&proj(&[1.0, 0.0]), &tol()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn value_rejects_projectors_outside_domain() {
        let alg = diag_algebra(&[1.0, 2.0]);
        let ls = restrict_logical(&maximally_mixed(2), &alg, &tol()).unwrap();
        let h = 0.5;
        let off = Projector::new(ComplexMatrix::from_real(2, &[h, h, h, h]).unwrap(), &tol()).unwrap();
        assert!(matches!(ls.value(&off, &tol()), Err(Error::NotInAlgebra { .. })));
    }

    #[test]
    fn sigma_orthoadditivity_examples() {
        let full = AlgebraBasis::full(3);
        let ls = restrict_logical(&random_state(3, 1), &full, &tol()).unwrap();
        let family = [proj(&[1.0, 0.0, 0.0]), proj(&[0.0, 1.0, 0.0])];
        let direct = ls.value(&proj(&[1.0, 1.0, 0.0]), &tol()).unwrap();
        let sum = ls.value(&family[0], &tol()).unwrap() + ls.value(&family[1], &tol()).unwrap();
        assert!((direct - sum).abs() < 1e-12);
        assert!(check_sigma_orthoadditive(&ls, &family, &tol()).unwrap());

        let p = proj(&[1.0, 0.0, 1.0]);
        assert!(check_sigma_orthoadditive(&ls, &[p.clone(), orthocomplement(&p)], &tol()).unwrap());
        assert!(check_sigma_orthoadditive(&ls, &[], &tol()).unwrap());

        let overlapping = [proj(&[1.0, 1.0, 0.0]), proj(&[0.0, 1.0, 1.0])];
        assert!(matches!(
            check_sigma_orthoadditive(&ls, &overlapping, &tol()),
            Err(Error::NotOrthogonalFamily { first: 0, second: 1 })
        ));
    }

    #[test]
    fn random_families_are_orthogonal_and_in_algebra() {
        let alg = AlgebraBasis::full(4);
        for seed in 0..20 {
            let family = random_orthogonal_family(&alg, seed, &tol());
            let ls = restrict_logical(&random_state(4, seed), &alg, &tol()).unwrap();
            assert!(check_sigma_orthoadditive(&ls, &family, &tol()).unwrap());
        }
    }

    fn m2_plus_m2() -> AlgebraBasis {
        let mut gens = Vec::new();
        for o in [0, 2] {
            gens.push(ComplexMatrix::unit(4, o, o + 1));
            gens.push(ComplexMatrix::unit(4, o, o));
        }
        close(&GeneratorSet::new(4, gens).unwrap(), &tol()).unwrap()
    }

    #[test]
    fn purity_examples() {
        let v = vector_state(&[c(0.6), Complex64::new(0.0, 0.8), c(0.0)], &tol()).unwrap();
        assert!(is_pure(&v, &AlgebraBasis::full(3), &tol()).unwrap());
        assert!(!is_pure(&maximally_mixed(2), &AlgebraBasis::full(2), &tol()).unwrap());

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let straddling = vector_state(&[c(h), c(0.0), c(h), c(0.0)], &tol()).unwrap();
        let blocks = m2_plus_m2();
        assert!(!is_pure(&straddling, &blocks, &tol()).unwrap());
        // The straddling state agrees on the algebra with the even mixture
        // of its two block components, each pure.
        let first = vector_state(&[c(1.0), c(0.0), c(0.0), c(0.0)], &tol()).unwrap();
        let second = vector_state(&[c(0.0), c(0.0), c(1.0), c(0.0)], &tol()).unwrap();
        let mix = mixture(0.5, &first, &second, &tol()).unwrap();
        for b in blocks.basis() {
            let diff = evaluate(&straddling, b).unwrap() - evaluate(&mix, b).unwrap();
            assert!(diff.norm() < 1e-12);
        }
        assert!(is_pure(&first, &blocks, &tol()).unwrap() && is_pure(&second, &blocks, &tol()).unwrap());
    }

    #[test]
    fn mixed_ambient_density_can_be_pure_on_subalgebra() {
        // Scalars: every state is pure.
        assert!(is_pure(&maximally_mixed(3), &AlgebraBasis::scalars(3), &tol()).unwrap());
    }

    #[test]
    fn dirac_character_examples() {
        let alg = diag_algebra(&[1.0, 2.0, 3.0]);
        let chars = dirac_characters(&alg, &tol()).unwrap();
        assert_eq!(chars.len(), 3);
        let a = ComplexMatrix::diag(&[4.0, -1.0, 9.0]);
        let mut read: Vec<f64> = chars.iter().map(|x| evaluate(x, &a).unwrap().re).collect();
        read.sort_by(f64::total_cmp);
        for (got, want) in read.iter().zip([-1.0, 4.0, 9.0]) {
            assert!((got - want).abs() < 1e-10);
        }
        for x in &chars {
            assert!(multiplicativity_defect(x, &alg).unwrap() < 1e-8);
        }

        let scalars = dirac_characters(&AlgebraBasis::scalars(2), &tol()).unwrap();
        assert_eq!(scalars.len(), 1);
        assert!((scalars[0].density() - maximally_mixed(2).density()).hs_norm() < 1e-12);

        let two = dirac_characters(&diag_algebra(&[1.0, 1.0, 2.0]), &tol()).unwrap();
        let mut ranks: Vec<usize> = two.iter().map(|x| rank_with_scale(x.density(), 1.0, &tol())).collect();
        ranks.sort();
        assert_eq!(ranks, [1, 2]);

        assert!(matches!(
            dirac_characters(&AlgebraBasis::full(2), &tol()),
            Err(Error::NotCommutative)
        ));
    }

    #[test]
    fn separating_examples() {
        let alg = diag_algebra(&[1.0, 2.0, 3.0]);
        let chars = dirac_characters(&alg, &tol()).unwrap();
        assert!(is_separating(&chars, &alg, &tol()).unwrap());

        let diag2 = diag_algebra(&[1.0, 2.0]);
        let first = vector_state(&[c(1.0), c(0.0)], &tol()).unwrap();
        assert!(!is_separating(&[first], &diag2, &tol()).unwrap());

        assert!(is_separating(&[maximally_mixed(2)], &AlgebraBasis::full(2), &tol()).unwrap());
        assert!(!is_separating(&[], &AlgebraBasis::full(2), &tol()).unwrap());
    }

    #[test]
    fn grid_states_separate_full_algebra() {
        for d in 1..=4 {
            let grid = grid_vector_states(d);
            assert_eq!(grid.len(), d * d);
            let full = AlgebraBasis::full(d);
            assert!(grid.iter().all(|s| is_pure(s, &full, &tol()).unwrap()));
            assert!(is_separating(&grid, &full, &tol()).unwrap());
        }
    }
}

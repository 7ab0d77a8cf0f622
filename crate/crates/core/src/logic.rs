//! The projector lattice: orthocomplement, meet, join and order, plus
//! checkers for the orthomodular and distributive laws and a seeded sampler.
//!
//! The meet is computed along two independent routes. The iterative route
//! follows the limit `p ∧ q = lim (p q)ⁿ` in its symmetrised form
//! `(p q p)ⁿ`, advanced by repeated squaring so that it visits the
//! subsequence `n = 2^k`. The oracle route takes the projector onto the
//! joint kernel of `1 − p` and `1 − q`. [`meet`] returns the oracle result
//! and fails when the two disagree.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{is_commutative, AlgebraBasis};
use crate::error::{Error, Result};
use crate::numerics::{
    cluster_descending, eig_unchecked, null_space_scaled, operator_norm, ComplexMatrix, Tolerance,
};
use crate::sectors::{block_decomposition, check_projector_in, SectorDecomposition};
use crate::seeds;

/// Agreement required between the iterative and the null-space meet.
pub const MEET_AGREEMENT: f64 = 1e-8;
/// Residual allowed in the orthomodular and distributive identities.
pub const LAW_TOLERANCE: f64 = 1e-7;
/// Eigenvalues of a converged iterate may not fall inside this band.
const ROUNDING_BAND: (f64, f64) = (0.45, 0.55);

/// A self-adjoint idempotent.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Projector(ComplexMatrix);

impl Projector {
    pub fn new(m: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        let deviation = (&m * &m - &m).hs_norm().max(m.hermitian_deviation());
        if deviation > tol.eq_tol {
            return Err(Error::NotProjector { deviation });
        }
        Ok(Projector(m.hermitian_part()))
    }

    /// Projector onto the span of orthonormal columns.
    pub fn onto(columns: &DMatrix<Complex64>) -> Self {
        Projector(ComplexMatrix::range_projector(columns))
    }

    pub fn zero(dim: usize) -> Self {
        Projector(ComplexMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Projector(ComplexMatrix::identity(dim))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `tr p`, rounded.
    pub fn rank(&self) -> usize {
        self.0.trace().re.round().max(0.0) as usize
    }

    pub fn is_zero(&self) -> bool {
        self.0.trace().re < 0.5
    }
}

fn same_dim(p: &Projector, q: &Projector) -> Result<()> {
    q.0.check_dim(p.dim())
}

/// `p⊥ = 1 − p`
pub fn orthocomplement(p: &Projector) -> Projector {
    Projector(ComplexMatrix::identity(p.dim()) - &p.0)
}

/// Null-space route: projector onto `ker(1 − p) ∩ ker(1 − q)`.
pub fn meet_nullspace(p: &Projector, q: &Projector, tol: &Tolerance) -> Result<Projector> {
    same_dim(p, q)?;
    let d = p.dim();
    let (cp, cq) = (orthocomplement(p), orthocomplement(q));
    let mut stacked = DMatrix::zeros(2 * d, d);
    stacked.view_mut((0, 0), (d, d)).copy_from(cp.0.as_matrix());
    stacked.view_mut((d, 0), (d, d)).copy_from(cq.0.as_matrix());
    let kernel = null_space_scaled(&stacked, 1.0, tol)?;
    Ok(Projector::onto(&kernel))
}

/// Outcome of the iterative meet before rounding.
#[derive(Debug, Clone)]
pub struct MeetIteration {
    pub limit: ComplexMatrix,
    /// Number of squarings; the limit approximates `(pqp)^(2^steps)`.
    pub steps: usize,
    pub residual: f64,
}

fn iterate_to_limit(start: ComplexMatrix, symmetric: bool, tol: &Tolerance) -> Result<MeetIteration> {
    let mut s = start;
    let mut residual = f64::INFINITY;
    for step in 1..=tol.max_iter {
        let mut next = &s * &s;
        if symmetric {
            next = next.hermitian_part();
        }
        residual = operator_norm(&(&next - &s));
        s = next;
        if residual < tol.conv_tol {
            return Ok(MeetIteration { limit: s, steps: step, residual });
        }
    }
    Err(Error::ConvergenceFailed {
        iterations: tol.max_iter,
        residual,
    })
}

/// Rounds the spectrum of a converged iterate to {0, 1}.
fn round_spectrum(limit: &ComplexMatrix, iterations: usize) -> Result<Projector> {
    let eig = eig_unchecked(&limit.hermitian_part())?;
    if let Some(&bad) = eig
        .values
        .iter()
        .find(|&&v| v > ROUNDING_BAND.0 && v < ROUNDING_BAND.1)
    {
        return Err(Error::ConvergenceFailed {
            iterations,
            residual: (bad - 0.5).abs(),
        });
    }
    let kept = eig.values.iter().take_while(|&&v| v >= 0.5).count();
    Ok(Projector::onto(&eig.columns(0..kept)))
}

/// Iterative route: `lim (pqp)ⁿ` with eigenvalue rounding.
pub fn meet_iterative(p: &Projector, q: &Projector, tol: &Tolerance) -> Result<Projector> {
    same_dim(p, q)?;
    let start = (&p.0 * &q.0 * &p.0).hermitian_part();
    let it = iterate_to_limit(start, true, tol)?;
    round_spectrum(&it.limit, it.steps)
}

/// The unsymmetrised limit `lim (pq)ⁿ`; non-Hermitian iterates, kept as a
/// cross-check at relaxed tolerance.
pub fn meet_unsymmetrized(p: &Projector, q: &Projector, tol: &Tolerance) -> Result<ComplexMatrix> {
    same_dim(p, q)?;
    Ok(iterate_to_limit(&p.0 * &q.0, false, tol)?.limit)
}

/// The first `steps` plain powers `(pqp)¹, (pqp)², ...`.
pub fn meet_iterates(p: &Projector, q: &Projector, steps: usize) -> Vec<ComplexMatrix> {
    let base = &p.0 * &q.0 * &p.0;
    let mut out = Vec::with_capacity(steps);
    let mut s = base.clone();
    for _ in 0..steps {
        out.push(s.clone());
        s = &s * &base;
    }
    out
}

/// Projector onto `range(p) ∩ range(q)`.
pub fn meet(p: &Projector, q: &Projector, tol: &Tolerance) -> Result<Projector> {
    let oracle = meet_nullspace(p, q, tol)?;
    let iterative = meet_iterative(p, q, tol)?;
    let residual = operator_norm(&(&oracle.0 - &iterative.0));
    if residual > MEET_AGREEMENT {
        return Err(Error::RouteMismatch { residual });
    }
    Ok(oracle)
}

/// `p ∨ q = (p⊥ ∧ q⊥)⊥`
pub fn join(p: &Projector, q: &Projector, tol: &Tolerance) -> Result<Projector> {
    Ok(orthocomplement(&meet(&orthocomplement(p), &orthocomplement(q), tol)?))
}

/// `p ≤ q` iff `p = p ∧ q`.
pub fn leq(p: &Projector, q: &Projector, tol: &Tolerance) -> Result<bool> {
    let m = meet(p, q, tol)?;
    Ok(operator_norm(&(&m.0 - &p.0)) <= tol.eq_tol)
}

/// `p ≤ q⊥`
pub fn orthogonal(p: &Projector, q: &Projector, tol: &Tolerance) -> Result<bool> {
    leq(p, &orthocomplement(q), tol)
}

/// `‖q − (p ∨ (p⊥ ∧ q))‖` for `p ≤ q`.
pub fn orthomodular_residual(p: &Projector, q: &Projector, tol: &Tolerance) -> Result<f64> {
    if !leq(p, q, tol)? {
        return Err(Error::PreconditionFailed("orthomodular law needs p ≤ q".into()));
    }
    let inner = meet(&orthocomplement(p), q, tol)?;
    let rhs = join(p, &inner, tol)?;
    Ok(operator_norm(&(&q.0 - &rhs.0)))
}

pub fn check_orthomodular(p: &Projector, q: &Projector, tol: &Tolerance) -> Result<bool> {
    Ok(orthomodular_residual(p, q, tol)? <= LAW_TOLERANCE)
}

/// Both sides of `p ∧ (q ∨ r) = (p ∧ q) ∨ (p ∧ r)`.
pub fn distributive_sides(
    p: &Projector,
    q: &Projector,
    r: &Projector,
    tol: &Tolerance,
) -> Result<(Projector, Projector)> {
    let left = meet(p, &join(q, r, tol)?, tol)?;
    let right = join(&meet(p, q, tol)?, &meet(p, r, tol)?, tol)?;
    Ok((left, right))
}

pub fn distributive_residual(p: &Projector, q: &Projector, r: &Projector, tol: &Tolerance) -> Result<f64> {
    let (left, right) = distributive_sides(p, q, r, tol)?;
    Ok(operator_norm(&(&left.0 - &right.0)))
}

pub fn check_distributive(p: &Projector, q: &Projector, r: &Projector, tol: &Tolerance) -> Result<bool> {
    Ok(distributive_residual(p, q, r, tol)? <= LAW_TOLERANCE)
}

/// Minimal nonzero projector of `alg`: its dimension vector is a single 1.
pub fn is_atom(alg: &AlgebraBasis, p: &Projector, tol: &Tolerance) -> Result<bool> {
    check_projector_in(alg, &p.0, tol)?;
    let sectors = block_decomposition(alg, tol)?;
    is_atom_in(&sectors, p, tol)
}

pub(crate) fn is_atom_in(sectors: &SectorDecomposition, p: &Projector, tol: &Tolerance) -> Result<bool> {
    let dims = sectors.dimension_vector(&p.0, tol)?;
    let nonzero: Vec<usize> = dims.into_iter().filter(|&x| x != 0).collect();
    Ok(nonzero == [1])
}

/// Seeded sampler of projectors lying in a fixed algebra.
///
/// A sample is a spectral projector of a random self-adjoint element `h` of
/// the algebra: the spectrum of `h` is grouped into eigenvalue clusters and
/// a uniformly chosen number of leading clusters is kept. Spectral
/// projectors of `h` are polynomials in `h`, so they stay in the algebra.
#[derive(Debug, Clone)]
pub struct ProjectorSampler {
    dim: usize,
    spanning: Vec<ComplexMatrix>,
    tol: Tolerance,
}

impl ProjectorSampler {
    pub fn new(alg: &AlgebraBasis, tol: &Tolerance) -> Self {
        ProjectorSampler {
            dim: alg.ambient_dim(),
            spanning: alg.self_adjoint_spanning_set(),
            tol: *tol,
        }
    }

    /// All spectral projectors (one per eigenvalue cluster, descending) of a
    /// random self-adjoint element; pairwise orthogonal and summing to one.
    pub fn partition(&self, seed: u64) -> Vec<Projector> {
        let mut rng = seeds::rng(seed);
        self.partition_with(&mut rng)
    }

    fn partition_with<R: Rng>(&self, rng: &mut R) -> Vec<Projector> {
        let mut h = ComplexMatrix::zeros(self.dim);
        for s in &self.spanning {
            let c: f64 = rng.sample(StandardNormal);
            h = h + s.scale_re(c);
        }
        let eig = eig_unchecked(&h.hermitian_part()).expect("eigendecomposition of a Hermitian sample");
        let scale = eig.values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        cluster_descending(&eig.values, self.tol.rank_tol * scale)
            .into_iter()
            .map(|c| Projector::onto(&eig.columns(c)))
            .collect()
    }

    pub fn sample(&self, seed: u64) -> Projector {
        let mut rng = seeds::rng(seed);
        let parts = self.partition_with(&mut rng);
        let keep = rng.random_range(0..=parts.len());
        let mut p = ComplexMatrix::zeros(self.dim);
        for part in &parts[..keep] {
            p = p + &part.0;
        }
        Projector(p)
    }
}

/// A projector in `alg`, deterministic in `(alg, seed)`.
pub fn random_projector(alg: &AlgebraBasis, seed: u64, tol: &Tolerance) -> Projector {
    ProjectorSampler::new(alg, tol).sample(seed)
}

/// Whether sweeps run on the calling thread or on the rayon pool. Results
/// are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

pub(crate) fn sweep<T, F>(trials: usize, execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match execution {
        Execution::Sequential => (0..trials as u64).map(f).collect(),
        Execution::Parallel => (0..trials as u64).into_par_iter().map(f).collect(),
    }
}

/// A failed distributivity instance.
#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub p: Projector,
    pub q: Projector,
    pub r: Projector,
    /// `p ∧ (q ∨ r)`
    pub left: Projector,
    /// `(p ∧ q) ∨ (p ∧ r)`
    pub right: Projector,
    pub residual: f64,
    /// `"sampled"` (with the trial index) or `"structural"`.
    pub source: String,
}

/// Lattice verdicts for one algebra.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeReport {
    pub orthomodular_pass_rate: f64,
    pub orthomodular_max_residual: f64,
    pub distributive: bool,
    pub distributive_pass_rate: f64,
    pub counterexample: Option<Counterexample>,
    pub boolean_lattice: bool,
    pub atomic: bool,
    /// Recorded as `factor ∧ one sector ∧ multiplicity 1`: the lattice is
    /// then that of all subspaces of `C^d`.
    pub hilbertian: bool,
    pub factor: bool,
    pub sector_count: usize,
    pub trials: usize,
    pub seed: u64,
}

fn structural_counterexample(sectors: &SectorDecomposition, tol: &Tolerance) -> Result<Option<Counterexample>> {
    let Some(sector) = sectors.sectors.iter().find(|s| s.block_size >= 2) else {
        return Ok(None);
    };
    let n = sector.block_size;
    let line = |angle: f64| {
        let (c, s) = (angle.cos(), angle.sin());
        let mut a = DMatrix::zeros(n, n);
        a[(0, 0)] = Complex64::new(c * c, 0.0);
        a[(0, 1)] = Complex64::new(c * s, 0.0);
        a[(1, 0)] = Complex64::new(c * s, 0.0);
        a[(1, 1)] = Complex64::new(s * s, 0.0);
        Projector(sector.embed(&a).hermitian_part())
    };
    let quarter = std::f64::consts::FRAC_PI_4;
    let (p, q, r) = (line(0.0), line(quarter), line(2.0 * quarter));
    let (left, right) = distributive_sides(&p, &q, &r, tol)?;
    let residual = operator_norm(&(&left.0 - &right.0));
    Ok((residual > LAW_TOLERANCE).then(|| Counterexample {
        p,
        q,
        r,
        left,
        right,
        residual,
        source: "structural".into(),
    }))
}

struct TrialOutcome {
    orthomodular: f64,
    distributive: Option<(f64, [Projector; 3])>,
}

/// Seeded law sweep plus structural facts, using the default parallel
/// execution.
pub fn lattice_report(alg: &AlgebraBasis, trials: usize, seed: u64, tol: &Tolerance) -> Result<LatticeReport> {
    lattice_report_with(alg, trials, seed, tol, Execution::default())
}

pub fn lattice_report_with(
    alg: &AlgebraBasis,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
    execution: Execution,
) -> Result<LatticeReport> {
    let sectors = block_decomposition(alg, tol)?;
    lattice_report_for(alg, &sectors, trials, seed, tol, execution)
}

pub(crate) fn lattice_report_for(
    alg: &AlgebraBasis,
    sectors: &SectorDecomposition,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
    execution: Execution,
) -> Result<LatticeReport> {
    let sampler = ProjectorSampler::new(alg, tol);
    let outcomes: Vec<Result<TrialOutcome>> = sweep(trials, execution, |i| {
        let trial = seeds::derive(seed, i);
        let q = sampler.sample(seeds::lane(trial, 0));
        let r = sampler.sample(seeds::lane(trial, 1));
        let s = sampler.sample(seeds::lane(trial, 2));
        let p = meet(&r, &q, tol)?;
        let orthomodular = orthomodular_residual(&p, &q, tol)?;
        let distributive = distributive_residual(&q, &r, &s, tol)?;
        Ok(TrialOutcome {
            orthomodular,
            distributive: (distributive > LAW_TOLERANCE).then_some((distributive, [q, r, s])),
        })
    });

    let mut om_pass = 0usize;
    let mut om_max = 0.0f64;
    let mut dist_fail = 0usize;
    let mut counterexample = None;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        om_max = om_max.max(outcome.orthomodular);
        if outcome.orthomodular <= LAW_TOLERANCE {
            om_pass += 1;
        }
        if let Some((residual, [p, q, r])) = outcome.distributive {
            dist_fail += 1;
            if counterexample.is_none() {
                let (left, right) = distributive_sides(&p, &q, &r, tol)?;
                counterexample = Some(Counterexample {
                    p,
                    q,
                    r,
                    left,
                    right,
                    residual,
                    source: format!("sampled (trial {i})"),
                });
            }
        }
    }
    if counterexample.is_none() {
        counterexample = structural_counterexample(sectors, tol)?;
    }

    let atomic = sectors.sectors.iter().all(|s| {
        let atom = Projector(s.minimal_projector(0).hermitian_part());
        alg.contains(&atom.0, tol) && is_atom_in(sectors, &atom, tol).unwrap_or(false)
    });
    let factor = sectors.sector_count() == 1;
    let rate = |passes: usize| if trials == 0 { 1.0 } else { passes as f64 / trials as f64 };
    Ok(LatticeReport {
        orthomodular_pass_rate: rate(om_pass),
        orthomodular_max_residual: om_max,
        distributive: counterexample.is_none(),
        distributive_pass_rate: rate(trials - dist_fail),
        counterexample,
        boolean_lattice: is_commutative(alg, tol),
        atomic,
        hilbertian: factor && sectors.sectors[0].multiplicity == 1,
        factor,
        sector_count: sectors.sector_count(),
        trials,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{close, GeneratorSet};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn proj(values: &[f64]) -> Projector {
        Projector::new(ComplexMatrix::diag(values), &tol()).unwrap()
    }

    fn line(angle: f64) -> Projector {
        let (c, s) = (angle.cos(), angle.sin());
        Projector::new(ComplexMatrix::from_real(2, &[c * c, c * s, c * s, s * s]).unwrap(), &tol()).unwrap()
    }

    fn close_to(a: &Projector, b: &Projector) -> bool {
        operator_norm(&(a.matrix() - b.matrix())) < 1e-9
    }

    #[test]
    fn projector_validation() {
        assert!(Projector::new(ComplexMatrix::diag(&[1.0, 0.5]), &tol()).is_err());
        let nilpotent = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(Projector::new(nilpotent, &tol()), Err(Error::NotProjector { .. })));
        // idempotent but not self-adjoint
        let oblique = ComplexMatrix::from_real(2, &[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(Projector::new(oblique, &tol()).is_err());
    }

    #[test]
    fn orthocomplement_examples() {
        assert!(close_to(&orthocomplement(&Projector::zero(3)), &Projector::identity(3)));
        assert!(close_to(&orthocomplement(&proj(&[1.0, 0.0])), &proj(&[0.0, 1.0])));
        let p = line(0.3);
        let pc = orthocomplement(&p);
        assert_eq!(pc.rank(), 1);
        assert!(close_to(&Projector(p.matrix() + pc.matrix()), &Projector::identity(2)));
        assert!((orthocomplement(&pc).matrix() - p.matrix()).hs_norm() <= 1e-15);
    }

    #[test]
    fn meet_examples() {
        let m = meet(&proj(&[1.0, 1.0, 0.0]), &proj(&[0.0, 1.0, 1.0]), &tol()).unwrap();
        assert!(close_to(&m, &proj(&[0.0, 1.0, 0.0])));
        let m = meet(&line(0.0), &line(0.7), &tol()).unwrap();
        assert!(m.is_zero() && close_to(&m, &Projector::zero(2)));
        let p = line(1.1);
        assert!(close_to(&meet(&p, &p, &tol()).unwrap(), &p));
    }

    #[test]
    fn meet_routes_agree_with_unsymmetrized_limit() {
        let p = proj(&[1.0, 1.0, 0.0]);
        let q = Projector::new(
            ComplexMatrix::from_real(3, &[1.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.0, 0.5, 0.5]).unwrap(),
            &tol(),
        )
        .unwrap();
        let oracle = meet_nullspace(&p, &q, &tol()).unwrap();
        let iterative = meet_iterative(&p, &q, &tol()).unwrap();
        assert!(close_to(&oracle, &iterative));
        assert!(close_to(&oracle, &proj(&[1.0, 0.0, 0.0])));
        let plain = meet_unsymmetrized(&p, &q, &tol()).unwrap();
        assert!(operator_norm(&(&plain - oracle.matrix())) < 1e-6);
    }

    #[test]
    fn iterates_decrease_monotonically() {
        let (p, q) = (line(0.0), line(0.4));
        let iterates = meet_iterates(&p, &q, 30);
        for w in iterates.windows(2) {
            let diff = (&w[0] - &w[1]).hermitian_part();
            let eig = crate::numerics::hermitian_eig(&diff, &tol()).unwrap();
            assert!(*eig.values.last().unwrap() >= -1e-12);
        }
    }

    #[test]
    fn join_examples() {
        let j = join(&proj(&[1.0, 0.0, 0.0]), &proj(&[0.0, 1.0, 0.0]), &tol()).unwrap();
        assert!(close_to(&j, &proj(&[1.0, 1.0, 0.0])));
        let j = join(&line(0.2), &line(1.3), &tol()).unwrap();
        assert!(close_to(&j, &Projector::identity(2)));
        let p = line(0.9);
        assert!(close_to(&join(&p, &Projector::zero(2), &tol()).unwrap(), &p));
    }

    #[test]
    fn order_examples() {
        assert!(leq(&proj(&[1.0, 0.0, 0.0]), &proj(&[1.0, 1.0, 0.0]), &tol()).unwrap());
        assert!(!leq(&proj(&[1.0, 1.0, 0.0]), &proj(&[1.0, 0.0, 0.0]), &tol()).unwrap());
        let p = line(0.5);
        assert!(leq(&p, &p, &tol()).unwrap());
    }

    #[test]
    fn orthogonality_examples() {
        assert!(orthogonal(&proj(&[1.0, 0.0]), &proj(&[0.0, 1.0]), &tol()).unwrap());
        let p = line(0.5);
        assert!(!orthogonal(&p, &p, &tol()).unwrap());
        assert!(orthogonal(&p, &Projector::zero(2), &tol()).unwrap());
    }

    #[test]
    fn orthomodular_examples() {
        assert!(check_orthomodular(&proj(&[1.0, 0.0, 0.0]), &proj(&[1.0, 1.0, 0.0]), &tol()).unwrap());
        let p = line(0.8);
        assert!(check_orthomodular(&p, &p, &tol()).unwrap());
        assert!(matches!(
            check_orthomodular(&proj(&[1.0, 1.0, 0.0]), &proj(&[1.0, 0.0, 0.0]), &tol()),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn distributive_examples() {
        let (a, b, c) = (proj(&[1.0, 1.0, 0.0]), proj(&[0.0, 1.0, 1.0]), proj(&[1.0, 0.0, 1.0]));
        assert!(check_distributive(&a, &b, &c, &tol()).unwrap());
        let quarter = std::f64::consts::FRAC_PI_4;
        let (p, q, r) = (line(0.0), line(quarter), line(2.0 * quarter));
        let (left, right) = distributive_sides(&p, &q, &r, &tol()).unwrap();
        assert!(close_to(&left, &p));
        assert!(close_to(&right, &Projector::zero(2)));
        assert!(!check_distributive(&p, &q, &r, &tol()).unwrap());
        assert!(check_distributive(&q, &q, &q, &tol()).unwrap());
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
    fn atom_examples() {
        let full = AlgebraBasis::full(3);
        assert!(is_atom(&full, &proj(&[1.0, 0.0, 0.0]), &tol()).unwrap());
        assert!(!is_atom(&full, &proj(&[1.0, 1.0, 0.0]), &tol()).unwrap());
        let blocks = m2_plus_m2();
        assert!(!is_atom(&blocks, &proj(&[1.0, 1.0, 0.0, 0.0]), &tol()).unwrap());
        for k in 0..4 {
            let mut v = [0.0; 4];
            v[k] = 1.0;
            assert!(is_atom(&blocks, &proj(&v), &tol()).unwrap());
        }
    }

    #[test]
    fn sampler_is_deterministic_and_stays_in_algebra() {
        let full = AlgebraBasis::full(4);
        assert_eq!(random_projector(&full, 9, &tol()), random_projector(&full, 9, &tol()));
        let sampler = ProjectorSampler::new(&full, &tol());
        for seed in 0..200 {
            let p = sampler.sample(seed);
            Projector::new(p.matrix().clone(), &tol()).unwrap();
            assert!(full.contains(p.matrix(), &tol()));
        }
        let scalars = AlgebraBasis::scalars(3);
        for seed in 0..20 {
            let p = random_projector(&scalars, seed, &tol());
            assert!(close_to(&p, &Projector::zero(3)) || close_to(&p, &Projector::identity(3)));
        }
    }

    #[test]
    fn report_for_full_m2() {
        let report = lattice_report(&AlgebraBasis::full(2), 200, 3, &tol()).unwrap();
        assert_eq!(report.orthomodular_pass_rate, 1.0);
        assert!(!report.distributive);
        assert!(report.counterexample.is_some());
        assert!(report.factor && report.hilbertian && report.atomic);
        assert!(!report.boolean_lattice);
    }

    #[test]
    fn report_is_independent_of_execution() {
        let alg = m2_plus_m2();
        let a = lattice_report_with(&alg, 50, 17, &tol(), Execution::Sequential).unwrap();
        let b = lattice_report_with(&alg, 50, 17, &tol(), Execution::Parallel).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.sector_count, 2);
        assert!(!a.factor);
    }
}

//! Declarative scenarios: a generator recipe plus sampling parameters,
//! configured states, named projectors and expectations, run end to end into
//! a JSON report.
//!
//! Planck's constant has no finite-dimensional home. In the `weyl_finite`
//! kind the exchange phase `ω = exp(2πi/d)` of the clock and shift pair
//! takes its role, and the classical limit is the commutative `classical`
//! kind rather than `ħ → 0`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{baire_envelope, center, close, commutant, is_commutative, AlgebraBasis, GeneratorSet};
use crate::error::{Error, Result};
use crate::logic::{lattice_report_for, sweep, Execution, LatticeReport, Projector};
use crate::numerics::{ComplexMatrix, Tolerance};
use crate::sectors::{block_decomposition, check_projector_in, SectorDecomposition};
use crate::seeds;
use crate::states::{
    dirac_characters, is_pure_in, is_separating, multiplicativity_defect, random_orthogonal_family, random_state,
    sigma_orthoadditive_residuals, LogicalState, StateFunctional,
};

/// Relative tolerance for numeric expectations.
const EXPECTATION_TOLERANCE: f64 = 1e-9;

/// Always attached to reports: the finite models cannot show it.
pub const NON_COMPLETENESS_NOTE: &str = "lattice non-completeness (uncountably many sectors) is not representable \
at finite dimension; every finite projector lattice is complete";

const WEYL_NOTE: &str = "the exchange phase exp(2πi/d) of the clock and shift pair stands in for Planck's constant";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Classical,
    WeylFinite,
    Sectors,
    Custom,
}

/// Kind-specific parameters; only the fields of the chosen kind are read.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<usize>,
    /// `[block_size, multiplicity]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<GeneratorSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedProjector {
    pub id: String,
    pub matrix: ComplexMatrix,
}

/// A named check against the report. `args` selects a state or projector
/// where the check needs one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub check: String,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub args: Value,
    pub expect: Value,
}

fn default_trials() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    pub dim: usize,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub states: Vec<StateFunctional>,
    #[serde(default)]
    pub projectors: Vec<NamedProjector>,
    #[serde(default)]
    pub expectations: Vec<Expectation>,
}

impl Scenario {
    fn bare(name: String, kind: ScenarioKind, dim: usize, parameters: Parameters) -> Self {
        Scenario {
            name,
            kind,
            dim,
            parameters,
            trials: default_trials(),
            seed: 0,
            states: Vec::new(),
            projectors: Vec::new(),
            expectations: Vec::new(),
        }
    }

    pub fn classical(point_count: usize) -> Self {
        let parameters = Parameters {
            point_count: Some(point_count),
            ..Parameters::default()
        };
        Self::bare(format!("classical-{point_count}"), ScenarioKind::Classical, point_count, parameters)
    }

    pub fn weyl_finite(modulus: usize) -> Self {
        let parameters = Parameters {
            modulus: Some(modulus),
            ..Parameters::default()
        };
        Self::bare(format!("weyl-{modulus}"), ScenarioKind::WeylFinite, modulus, parameters)
    }

    pub fn sectors(blocks: &[(usize, usize)]) -> Self {
        let dim = blocks.iter().map(|(n, m)| n * m).sum();
        let label: Vec<String> = blocks.iter().map(|(n, m)| format!("{n}x{m}")).collect();
        let parameters = Parameters {
            blocks: Some(blocks.to_vec()),
            ..Parameters::default()
        };
        Self::bare(format!("sectors-{}", label.join("+")), ScenarioKind::Sectors, dim, parameters)
    }

    pub fn custom(name: &str, generators: GeneratorSet) -> Self {
        let dim = generators.ambient_dim();
        let parameters = Parameters {
            generators: Some(generators),
            ..Parameters::default()
        };
        Self::bare(name.to_string(), ScenarioKind::Custom, dim, parameters)
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))
    }

    /// Checks parameters against `dim` and builds the generators.
    pub fn generators(&self) -> Result<GeneratorSet> {
        let missing = |field: &str| Error::InvalidScenario(format!("kind {:?} needs parameters.{field}", self.kind));
        let mismatch = |what: &str, value: usize| {
            Error::InvalidScenario(format!("{what} = {value} is inconsistent with dim = {}", self.dim))
        };
        match self.kind {
            ScenarioKind::Classical => {
                let n = self.parameters.point_count.ok_or_else(|| missing("point_count"))?;
                if n != self.dim {
                    return Err(mismatch("point_count", n));
                }
                build_classical(n)
            }
            ScenarioKind::WeylFinite => {
                let d = self.parameters.modulus.ok_or_else(|| missing("modulus"))?;
                if d != self.dim {
                    return Err(mismatch("modulus", d));
                }
                build_weyl_finite(d)
            }
            ScenarioKind::Sectors => {
                let blocks = self.parameters.blocks.as_ref().ok_or_else(|| missing("blocks"))?;
                let total: usize = blocks.iter().map(|(n, m)| n * m).sum();
                if total != self.dim {
                    return Err(mismatch("sum of block sizes", total));
                }
                build_sectors(blocks)
            }
            ScenarioKind::Custom => {
                let gens = self.parameters.generators.clone().ok_or_else(|| missing("generators"))?;
                if gens.ambient_dim() != self.dim {
                    return Err(mismatch("generator dimension", gens.ambient_dim()));
                }
                Ok(gens)
            }
        }
    }
}

/// `diag(1, 2, ..., n)`, whose closure is the full diagonal algebra.
pub fn build_classical(point_count: usize) -> Result<GeneratorSet> {
    if point_count == 0 {
        return Err(Error::InvalidScenario("point_count must be at least 1".into()));
    }
    let values: Vec<f64> = (1..=point_count).map(|k| k as f64).collect();
    GeneratorSet::new(point_count, vec![ComplexMatrix::diag(&values)])
}

/// `ω = exp(2πi/d)`
pub fn weyl_phase(modulus: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / modulus as f64)
}

/// Clock `U = diag(1, ω, ..., ω^{d−1})` and shift `V e_k = e_{k−1}`, so
/// that `VU = ωUV`.
pub fn clock_shift(modulus: usize) -> (ComplexMatrix, ComplexMatrix) {
    let d = modulus;
    let omega = weyl_phase(d);
    let clock = ComplexMatrix::diag_complex(&(0..d).map(|k| omega.powu(k as u32)).collect::<Vec<_>>());
    let mut shift = ComplexMatrix::zeros(d);
    for k in 0..d {
        shift = shift + ComplexMatrix::unit(d, k, (k + 1) % d);
    }
    (clock, shift)
}

pub fn build_weyl_finite(modulus: usize) -> Result<GeneratorSet> {
    if modulus < 2 {
        return Err(Error::InvalidScenario("modulus must be at least 2".into()));
    }
    let (u, v) = clock_shift(modulus);
    GeneratorSet::new(modulus, vec![u, v])
}

/// Generators of `⊕ M_{n_i} ⊗ 1_{m_i}`, block-diagonal in the order given.
/// Block coordinate `o + k·m + j` carries `e_k ⊗ f_j`.
pub fn build_sectors(blocks: &[(usize, usize)]) -> Result<GeneratorSet> {
    if blocks.is_empty() || blocks.iter().any(|&(n, m)| n == 0 || m == 0) {
        return Err(Error::InvalidScenario("blocks must be non-empty with sizes >= 1".into()));
    }
    let d: usize = blocks.iter().map(|(n, m)| n * m).sum();
    let mut generators = Vec::new();
    let mut offset = 0;
    for &(n, m) in blocks {
        let lift = |a: &ComplexMatrix| {
            let mut out = ComplexMatrix::zeros(d);
            for k in 0..n {
                for l in 0..n {
                    let z = a.get(k, l);
                    if z != Complex64::new(0.0, 0.0) {
                        for j in 0..m {
                            out = out + ComplexMatrix::unit(d, offset + k * m + j, offset + l * m + j).scale(z);
                        }
                    }
                }
            }
            out
        };
        if n == 1 {
            generators.push(lift(&ComplexMatrix::identity(1)));
        } else {
            let (u, v) = clock_shift(n);
            generators.push(lift(&u));
            generators.push(lift(&v));
        }
        offset += n * m;
    }
    GeneratorSet::new(d, generators)
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockSummary {
    pub block_size: usize,
    pub multiplicity: usize,
    /// Dimension vector of this sector's central projector.
    pub mvn_dimension: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorSummary {
    pub sector_count: usize,
    pub center_dim: usize,
    pub factor: bool,
    pub blocks: Vec<BlockSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacterSummary {
    pub count: usize,
    pub max_multiplicativity_defect: f64,
    pub all_pure: bool,
    pub separating: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StateEvaluation {
    pub state: usize,
    pub pure: bool,
    /// Projector id to `tr(ρp)`.
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdditivitySweep {
    pub trials: usize,
    pub pass_rate: f64,
    pub max_additivity_residual: f64,
    pub max_complement_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub check: String,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub args: Value,
    pub expect: Value,
    pub actual: Value,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub algebra_dim: usize,
    pub commutant_dim: usize,
    pub commutative: bool,
    pub envelope_residual: f64,
    pub lattice: LatticeReport,
    pub sectors: SectorSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub characters: Option<CharacterSummary>,
    pub state_evaluations: Vec<StateEvaluation>,
    pub orthoadditivity: AdditivitySweep,
    pub verdicts: Vec<Verdict>,
    pub all_passed: bool,
    pub notes: Vec<String>,
}

impl ScenarioReport {
    /// Stable pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

pub fn run_scenario(s: &Scenario, tol: &Tolerance) -> Result<ScenarioReport> {
    run_scenario_with(s, tol, Execution::default())
}

pub fn run_scenario_with(s: &Scenario, tol: &Tolerance, execution: Execution) -> Result<ScenarioReport> {
    run_inner(s, tol, execution).map_err(|e| e.in_scenario(&s.name))
}

fn run_inner(s: &Scenario, tol: &Tolerance, execution: Execution) -> Result<ScenarioReport> {
    tol.validate()?;
    let gens = s.generators()?;
    let alg = close(&gens, tol)?;
    let envelope = baire_envelope(&alg, tol)?;
    let envelope_residual = envelope.subspace_distance(&alg);
    if !envelope.same_subspace(&alg, tol) {
        return Err(Error::EnvelopeMismatch {
            residual: envelope_residual,
        });
    }
    let commutant_dim = commutant(&alg, tol)?.dim();
    let sectors = block_decomposition(&alg, tol)?;
    let lattice = lattice_report_for(&alg, &sectors, s.trials, s.seed, tol, execution)?;
    let summary = sector_summary(&alg, &sectors, tol)?;
    let commutative = is_commutative(&alg, tol);

    let characters = if commutative {
        let chars = dirac_characters(&alg, tol)?;
        let mut defect = 0.0f64;
        for x in &chars {
            defect = defect.max(multiplicativity_defect(x, &alg)?);
        }
        Some(CharacterSummary {
            count: chars.len(),
            max_multiplicativity_defect: defect,
            all_pure: chars.iter().all(|x| is_pure_in(x, &sectors, tol)),
            separating: is_separating(&chars, &alg, tol)?,
        })
    } else {
        None
    };

    let projectors = named_projectors(s, &envelope, tol)?;
    let mut state_evaluations = Vec::with_capacity(s.states.len());
    for (index, state) in s.states.iter().enumerate() {
        state.density().check_dim(s.dim)?;
        let ls = LogicalState {
            underlying: state.clone(),
            domain: envelope.clone(),
        };
        let mut values = BTreeMap::new();
        for (id, p) in &projectors {
            values.insert(id.clone(), ls.value(p, tol)?);
        }
        state_evaluations.push(StateEvaluation {
            state: index,
            pure: is_pure_in(state, &sectors, tol),
            values,
        });
    }

    let orthoadditivity = orthoadditivity_sweep(&envelope, s, tol, execution)?;

    let mut report = ScenarioReport {
        scenario: s.clone(),
        algebra_dim: alg.dim(),
        commutant_dim,
        commutative,
        envelope_residual,
        lattice,
        sectors: summary,
        characters,
        state_evaluations,
        orthoadditivity,
        verdicts: Vec::new(),
        all_passed: true,
        notes: Vec::new(),
    };
    report.notes.push(NON_COMPLETENESS_NOTE.to_string());
    if s.kind == ScenarioKind::WeylFinite {
        report.notes.push(WEYL_NOTE.to_string());
    }
    let mut verdicts = Vec::with_capacity(s.expectations.len());
    for e in &s.expectations {
        verdicts.push(judge(e, &report, &alg, &sectors, &projectors, tol)?);
    }
    report.all_passed = verdicts.iter().all(|v| v.pass);
    report.verdicts = verdicts;
    Ok(report)
}

fn sector_summary(alg: &AlgebraBasis, sectors: &SectorDecomposition, tol: &Tolerance) -> Result<SectorSummary> {
    let mut blocks = Vec::with_capacity(sectors.sector_count());
    for s in &sectors.sectors {
        blocks.push(BlockSummary {
            block_size: s.block_size,
            multiplicity: s.multiplicity,
            mvn_dimension: sectors.dimension_vector(&s.central_projector, tol)?,
        });
    }
    Ok(SectorSummary {
        sector_count: sectors.sector_count(),
        center_dim: center(alg, tol)?.dim(),
        factor: sectors.sector_count() == 1,
        blocks,
    })
}

fn named_projectors(s: &Scenario, envelope: &AlgebraBasis, tol: &Tolerance) -> Result<Vec<(String, Projector)>> {
    let mut out: Vec<(String, Projector)> = Vec::with_capacity(s.projectors.len());
    for np in &s.projectors {
        if out.iter().any(|(id, _)| id == &np.id) {
            return Err(Error::InvalidScenario(format!("duplicate projector id `{}`", np.id)));
        }
        np.matrix.check_dim(s.dim)?;
        let p = Projector::new(np.matrix.clone(), tol)?;
        check_projector_in(envelope, p.matrix(), tol)?;
        out.push((np.id.clone(), p));
    }
    Ok(out)
}

fn orthoadditivity_sweep(
    envelope: &AlgebraBasis,
    s: &Scenario,
    tol: &Tolerance,
    execution: Execution,
) -> Result<AdditivitySweep> {
    let results = sweep(s.trials, execution, |i| {
        let trial = seeds::derive(s.seed ^ 0x57A7_E5ED, i);
        let ls = LogicalState {
            underlying: random_state(s.dim, seeds::lane(trial, 0)),
            domain: envelope.clone(),
        };
        let family = random_orthogonal_family(envelope, seeds::lane(trial, 1), tol);
        sigma_orthoadditive_residuals(&ls, &family, tol)
    });
    let mut passes = 0;
    let mut additivity = 0.0f64;
    let mut complement = 0.0f64;
    for r in results {
        let r = r?;
        passes += usize::from(r.passes());
        additivity = additivity.max(r.additivity);
        complement = complement.max(r.complement);
    }
    Ok(AdditivitySweep {
        trials: s.trials,
        pass_rate: if s.trials == 0 { 1.0 } else { passes as f64 / s.trials as f64 },
        max_additivity_residual: additivity,
        max_complement_residual: complement,
    })
}

fn arg_str<'a>(e: &'a Expectation, key: &str) -> Result<&'a str> {
    e.args
        .get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidScenario(format!("check `{}` needs string argument `{key}`", e.check)))
}

fn arg_index(e: &Expectation, key: &str, len: usize) -> Result<usize> {
    let i = e
        .args
        .get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::InvalidScenario(format!("check `{}` needs integer argument `{key}`", e.check)))?;
    if i as usize >= len {
        return Err(Error::InvalidScenario(format!("{key} index {i} out of range")));
    }
    Ok(i as usize)
}

fn lookup<'a>(projectors: &'a [(String, Projector)], id: &str) -> Result<&'a Projector> {
    projectors
        .iter()
        .find(|(pid, _)| pid == id)
        .map(|(_, p)| p)
        .ok_or_else(|| Error::InvalidScenario(format!("unknown projector id `{id}`")))
}

fn matches(expect: &Value, actual: &Value) -> bool {
    match (expect, actual) {
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap_or(f64::NAN), b.as_f64().unwrap_or(f64::NAN));
            (a - b).abs() <= EXPECTATION_TOLERANCE * a.abs().max(1.0)
        }
        (Value::Array(a), Value::Array(b)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| matches(x, y)),
        _ => expect == actual,
    }
}

fn judge(
    e: &Expectation,
    report: &ScenarioReport,
    alg: &AlgebraBasis,
    sectors: &SectorDecomposition,
    projectors: &[(String, Projector)],
    tol: &Tolerance,
) -> Result<Verdict> {
    let actual = match e.check.as_str() {
        "algebra_dim" => json!(report.algebra_dim),
        "commutant_dim" => json!(report.commutant_dim),
        "center_dim" => json!(report.sectors.center_dim),
        "commutative" => json!(report.commutative),
        "boolean_lattice" => json!(report.lattice.boolean_lattice),
        "distributive" => json!(report.lattice.distributive),
        "has_counterexample" => json!(report.lattice.counterexample.is_some()),
        "atomic" => json!(report.lattice.atomic),
        "hilbertian" => json!(report.lattice.hilbertian),
        "factor" => json!(report.lattice.factor),
        "sector_count" => json!(report.sectors.sector_count),
        "orthomodular_pass_rate" => json!(report.lattice.orthomodular_pass_rate),
        "orthoadditivity_pass_rate" => json!(report.orthoadditivity.pass_rate),
        "blocks" => {
            let mut blocks = sectors.blocks();
            blocks.sort_unstable();
            json!(blocks)
        }
        "character_count" => json!(report.characters.as_ref().map(|c| c.count)),
        "characters_separating" => json!(report.characters.as_ref().map(|c| c.separating)),
        "mvn_dimension" => {
            let p = lookup(projectors, arg_str(e, "projector")?)?;
            json!(sectors.dimension_vector(p.matrix(), tol)?)
        }
        "contains" => {
            let p = lookup(projectors, arg_str(e, "projector")?)?;
            json!(alg.contains(p.matrix(), tol))
        }
        "state_value" => {
            let i = arg_index(e, "state", report.state_evaluations.len())?;
            let id = arg_str(e, "projector")?;
            lookup(projectors, id)?;
            json!(report.state_evaluations[i].values[id])
        }
        "state_pure" => {
            let i = arg_index(e, "state", report.state_evaluations.len())?;
            json!(report.state_evaluations[i].pure)
        }
        other => return Err(Error::InvalidScenario(format!("unknown check `{other}`"))),
    };
    Ok(Verdict {
        check: e.check.clone(),
        args: e.args.clone(),
        expect: e.expect.clone(),
        pass: matches(&e.expect, &actual),
        actual,
    })
}

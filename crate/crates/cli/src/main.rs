use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use proplattice::algebra::{baire_envelope, center, close, commutant};
use proplattice::logic::{join, lattice_report, meet};
use proplattice::scenarios::run_scenario;
use proplattice::sectors::block_decomposition;
use proplattice::states::{dirac_characters, evaluate};
use proplattice::{ComplexMatrix, GeneratorSet, Projector, Scenario, StateFunctional, Tolerance};

/// Projector lattices and states of finite-dimensional operator algebras.
///
/// Algebra verbs read `{"dim", "generators"}`; `meet` and `join` read
/// `{"p", "q"}`; `eval-state` reads `{"state", "operator"}`; `run` reads a
/// scenario. Input comes from `--input` or stdin; JSON goes to stdout or
/// `--json-out`; a summary goes to stderr.
#[derive(Debug, Parser)]
#[command(name = "proplattice", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    #[arg(long, global = true)]
    tol_eq: Option<f64>,
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    /// Iteration cap of the meet iteration.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Overrides the scenario seed for `run`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the scenario trial count for `run`.
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PATH")]
    input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Close generators into a unital *-algebra.
    Close,
    /// Commutant of the closed algebra.
    Commutant,
    /// Bicommutant of the closed algebra.
    Envelope,
    /// Center of the closed algebra.
    Center,
    /// Block structure and central projectors.
    Sectors,
    /// Meet of two projectors.
    Meet,
    /// Join of two projectors.
    Join,
    /// Lattice law sweep for the closed algebra.
    Report,
    /// Run a scenario file.
    Run {
        /// Scenario file; takes precedence over `--input`.
        path: Option<PathBuf>,
    },
    /// Dirac characters of a commutative algebra.
    Characters,
    /// Evaluate a state on an operator.
    EvalState,
}

#[derive(Deserialize)]
struct ProjectorPair {
    p: ComplexMatrix,
    q: ComplexMatrix,
}

#[derive(Deserialize)]
struct StateInput {
    state: StateFunctional,
    operator: ComplexMatrix,
}

#[derive(Serialize)]
struct Evaluation {
    re: f64,
    im: f64,
}

/// Validation failures exit with 1, numerical ones with 2.
const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let numerical = err
                .chain()
                .find_map(|e| e.downcast_ref::<proplattice::Error>())
                .is_some_and(proplattice::Error::is_numerical);
            ExitCode::from(if numerical { EXIT_NUMERICAL } else { EXIT_VALIDATION })
        }
    }
}

fn tolerance(g: &Global) -> Result<Tolerance> {
    let mut tol = Tolerance::default();
    if let Some(eq) = g.tol_eq {
        tol.eq_tol = eq;
    }
    if let Some(rank) = g.tol_rank {
        tol.rank_tol = rank;
    }
    if let Some(max_iter) = g.max_iter {
        tol.max_iter = max_iter;
    }
    tol.validate()?;
    Ok(tol)
}

fn read_input(path: Option<&PathBuf>) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        }
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text).context("parsing input JSON")?)
}

fn emit<T: Serialize>(value: &T, out: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    let tol = tolerance(g)?;
    let out = g.json_out.as_ref();
    let algebra = || -> Result<_> {
        let gens: GeneratorSet = parse(&read_input(g.input.as_ref())?)?;
        Ok(close(&gens, &tol)?)
    };

    match cli.command {
        Command::Close => {
            let alg = algebra()?;
            eprintln!("closure: dimension {} in M_{}", alg.dim(), alg.ambient_dim());
            emit(&alg, out)
        }
        Command::Commutant => {
            let c = commutant(&algebra()?, &tol)?;
            eprintln!("commutant: dimension {}", c.dim());
            emit(&c, out)
        }
        Command::Envelope => {
            let alg = algebra()?;
            let env = baire_envelope(&alg, &tol)?;
            eprintln!(
                "envelope: dimension {} (closure {}), subspace distance {:.3e}",
                env.dim(),
                alg.dim(),
                env.subspace_distance(&alg)
            );
            emit(&env, out)
        }
        Command::Center => {
            let z = center(&algebra()?, &tol)?;
            eprintln!("center: dimension {}", z.dim());
            emit(&z, out)
        }
        Command::Sectors => {
            let sectors = block_decomposition(&algebra()?, &tol)?;
            eprintln!("sectors: {:?} as (block size, multiplicity)", sectors.blocks());
            emit(&sectors, out)
        }
        Command::Meet | Command::Join => {
            let pair: ProjectorPair = parse(&read_input(g.input.as_ref())?)?;
            let p = Projector::new(pair.p, &tol)?;
            let q = Projector::new(pair.q, &tol)?;
            let (label, r) = match cli.command {
                Command::Meet => ("meet", meet(&p, &q, &tol)?),
                _ => ("join", join(&p, &q, &tol)?),
            };
            eprintln!("{label}: rank {}", r.rank());
            emit(&r, out)
        }
        Command::Report => {
            let alg = algebra()?;
            let report = lattice_report(&alg, g.trials.unwrap_or(200), g.seed.unwrap_or(0), &tol)?;
            eprintln!(
                "lattice: orthomodular {:.1}%, distributive {}, boolean {}, factor {}, sectors {}",
                100.0 * report.orthomodular_pass_rate,
                report.distributive,
                report.boolean_lattice,
                report.factor,
                report.sector_count
            );
            emit(&report, out)
        }
        Command::Run { ref path } => {
            let text = read_input(path.as_ref().or(g.input.as_ref()))?;
            let mut scenario = Scenario::from_json(&text)?;
            if let Some(seed) = g.seed {
                scenario.seed = seed;
            }
            if let Some(trials) = g.trials {
                scenario.trials = trials;
            }
            let report = run_scenario(&scenario, &tol)?;
            eprintln!(
                "{}: algebra dim {}, sectors {}, distributive {}, orthomodular {:.1}%, expectations {}/{} passed",
                scenario.name,
                report.algebra_dim,
                report.sectors.sector_count,
                report.lattice.distributive,
                100.0 * report.lattice.orthomodular_pass_rate,
                report.verdicts.iter().filter(|v| v.pass).count(),
                report.verdicts.len()
            );
            for v in report.verdicts.iter().filter(|v| !v.pass) {
                eprintln!("  FAIL {}: expected {}, got {}", v.check, v.expect, v.actual);
            }
            emit(&report, out)
        }
        Command::Characters => {
            let chars = dirac_characters(&algebra()?, &tol)?;
            eprintln!("characters: {}", chars.len());
            emit(&chars, out)
        }
        Command::EvalState => {
            let input: StateInput = parse(&read_input(g.input.as_ref())?)?;
            let z = evaluate(&input.state, &input.operator)?;
            eprintln!("tr(ρa) = {} {:+}i", z.re, z.im);
            emit(&Evaluation { re: z.re, im: z.im }, out)
        }
    }
}

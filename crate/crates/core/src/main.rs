use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use topologic::decide::{
    axiom_soundness_sweep, decide_sat, decide_valid, sweep_models, violation_is_unsound,
    SearchBound, SweepReport, Verdict,
};
use topologic::document::{parse_family, ModelDocument};
use topologic::finitemodel::{basis_equivalent, extract_finite_model, BasisDisagreement};
use topologic::semantics::{Evaluator, Pair};
use topologic::splitting::{build_splitting, is_stable_with};
use topologic::{parse, random, Error, Formula, Model};

/// Exit codes: 0 positive verdict, 1 negative verdict, 2 input error,
/// 3 internal consistency failure.
#[derive(Parser)]
#[command(
    name = "topologic",
    version,
    about = "Knowledge and effort over finite subset spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a formula on a model: validity, or truth at one pair with --at.
    Check {
        model: PathBuf,
        formula: String,
        /// Point identifier and open, e.g. `--at a a,b`.
        #[arg(long, num_args = 2, value_names = ["POINT", "OPEN"])]
        at: Option<Vec<String>>,
    },
    /// Print the stable splittings built for a formula and its subformulas.
    Split { model: PathBuf, formula: String },
    /// Extract the finite quotient model for a formula.
    Quotient {
        model: PathBuf,
        formula: String,
        /// Where to write the quotient model; printed to stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a topology model with the model over a union-closed basis.
    Basis {
        model: PathBuf,
        /// JSON list of opens, e.g. `[["a"],["a","b"],["a","b","c"]]`.
        #[arg(long)]
        basis: String,
        /// Formulas to compare; random ones are added with --random.
        #[arg(long = "formula")]
        formulas: Vec<String>,
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bounded satisfiability or validity over finite topologies.
    Decide {
        formula: String,
        #[arg(long, value_enum, default_value_t = Mode::Valid)]
        mode: Mode,
        #[arg(long, default_value_t = 3)]
        points: usize,
        /// Comma-separated atom alphabet; defaults to the formula's atoms.
        #[arg(long, value_delimiter = ',')]
        atoms: Option<Vec<String>>,
        /// Sample valuations with this seed instead of enumerating them all.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the witness or counter model here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check random axiom instances on a model file or on all small topologies.
    Axioms {
        model: Option<PathBuf>,
        #[arg(long, conflicts_with = "model")]
        enumerate: Option<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "1,2,3,4,5,6,7,8,9,10,11,12"
        )]
        schemes: Vec<u8>,
        /// Atom alphabet for the enumerated models.
        #[arg(long, value_delimiter = ',', default_value = "A")]
        atoms: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Sat,
    Valid,
}

enum Outcome {
    Positive,
    Negative,
    Inconsistent,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Positive) => ExitCode::from(0),
        Ok(Outcome::Negative) => ExitCode::from(1),
        Ok(Outcome::Inconsistent) => ExitCode::from(3),
        Err(e @ Error::Inconsistency(_)) => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &PathBuf) -> topologic::Result<Model> {
    ModelDocument::load(path)?.to_model()
}

/// Parse and make sure every atom is declared by the model.
fn formula_for(model: &Model, text: &str) -> topologic::Result<Formula> {
    let f = parse(text)?;
    for a in f.atoms() {
        model.truth_set(&a)?;
    }
    Ok(f)
}

fn run(command: Command) -> topologic::Result<Outcome> {
    match command {
        Command::Check { model, formula, at } => check(&load(&model)?, &formula, at),
        Command::Split { model, formula } => split(&load(&model)?, &formula),
        Command::Quotient {
            model,
            formula,
            out,
        } => quotient(&load(&model)?, &formula, out),
        Command::Basis {
            model,
            basis,
            formulas,
            random,
            depth,
            seed,
        } => basis_cmd(&load(&model)?, &basis, &formulas, random, depth, seed),
        Command::Decide {
            formula,
            mode,
            points,
            atoms,
            seed,
            out,
        } => decide_cmd(&formula, mode, points, atoms, seed, out),
        Command::Axioms {
            model,
            enumerate,
            trials,
            seed,
            schemes,
            atoms,
        } => axioms_cmd(model, enumerate, trials, seed, &schemes, atoms),
    }
}

fn check(model: &Model, text: &str, at: Option<Vec<String>>) -> topologic::Result<Outcome> {
    let f = formula_for(model, text)?;
    let space = &model.space;
    let mut ev = Evaluator::new(model);
    if let Some(at) = at {
        let point = space
            .point_index(&at[0])
            .ok_or_else(|| Error::Document(format!("undeclared point `{}`", at[0])))?;
        let members = at[1]
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|m| {
                space
                    .point_index(m)
                    .ok_or_else(|| Error::Document(format!("undeclared point `{m}`")))
            })
            .collect::<topologic::Result<_>>()?;
        let pair = Pair::new(space, point, members)?;
        let holds = ev.satisfies(pair, &f)?;
        println!(
            "{}: {}",
            pair.render(space),
            if holds { "true" } else { "false" }
        );
        return Ok(if holds {
            Outcome::Positive
        } else {
            Outcome::Negative
        });
    }
    match ev.counterexample(&f)? {
        None => {
            println!("valid");
            Ok(Outcome::Positive)
        }
        Some(pair) => {
            println!("counterexample: {}", pair.render(space));
            Ok(Outcome::Negative)
        }
    }
}

fn split(model: &Model, text: &str) -> topologic::Result<Outcome> {
    let f = formula_for(model, text)?;
    let space = &model.space;
    let table = build_splitting(model, &f)?;
    let render_family = |fam: &[topologic::PointSet]| {
        fam.iter()
            .map(|u| space.render(*u))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut ev = Evaluator::new(model);
    let mut all_stable = true;
    for entry in table.entries() {
        let psi = &entry.formula;
        println!("subformula: {psi}");
        println!("  family: {{{}}}", render_family(entry.splitting.family()));
        let partition = entry.splitting.partition(space)?;
        for (rep, block) in partition.blocks() {
            println!(
                "  block {}: {{{}}}",
                space.render(rep),
                render_family(&block)
            );
            println!("    extension: {}", space.render(entry.extensions[&rep]));
            let verdicts: Vec<String> = psi
                .subformulas()
                .iter()
                .map(|phi| {
                    let stable = is_stable_with(&mut ev, &block, phi)?;
                    all_stable &= stable;
                    Ok(format!(
                        "{phi}: {}",
                        if stable { "stable" } else { "UNSTABLE" }
                    ))
                })
                .collect::<topologic::Result<_>>()?;
            println!("    {}", verdicts.join("; "));
        }
    }
    let failures = table.verify(model)?;
    for failure in &failures {
        println!("check failed: {failure}");
    }
    if all_stable && failures.is_empty() {
        println!("all blocks stable");
        Ok(Outcome::Positive)
    } else {
        Ok(Outcome::Inconsistent)
    }
}

fn quotient(model: &Model, text: &str, out: Option<PathBuf>) -> topologic::Result<Outcome> {
    let f = formula_for(model, text)?;
    let fm = extract_finite_model(model, &f)?;
    let space = &model.space;
    let q = &fm.quotient;
    let qspace = &q.quotient.space;
    println!("points:");
    for (c, members) in q.classes.iter().enumerate() {
        println!(
            "  {} <- {}",
            qspace.point_names()[c],
            space.render(*members)
        );
    }
    println!("opens:");
    for (i, u) in fm.restricted.space.opens().iter().enumerate() {
        println!(
            "  {} -> {}",
            space.render(*u),
            qspace.render(q.open_class[i])
        );
    }
    let doc = ModelDocument::from_model(&q.quotient);
    match out {
        Some(path) => {
            doc.save(&path)?;
            println!("wrote {}", path.display());
        }
        None => print!("{}", doc.to_json()),
    }
    Ok(Outcome::Positive)
}

fn basis_cmd(
    model: &Model,
    basis_text: &str,
    texts: &[String],
    random_count: usize,
    depth: usize,
    seed: u64,
) -> topologic::Result<Outcome> {
    let basis = parse_family(&model.space, basis_text)?;
    let mut formulas = texts
        .iter()
        .map(|t| formula_for(model, t))
        .collect::<topologic::Result<Vec<_>>>()?;
    let atoms: Vec<String> = model.valuation().keys().cloned().collect();
    let mut rng = random::rng(seed);
    formulas.extend((0..random_count).map(|_| random::formula(&mut rng, &atoms, depth)));
    match basis_equivalent(model, &basis, &formulas)? {
        None => {
            println!("equivalent on {} formulas", formulas.len());
            Ok(Outcome::Positive)
        }
        Some(BasisDisagreement::Pointwise {
            formula,
            point,
            open,
        }) => Err(Error::Inconsistency(format!(
            "{formula} differs at point {} and open {}",
            model.space.point_names()[point],
            model.space.render(open)
        ))),
        Some(BasisDisagreement::Validity { formula }) => Err(Error::Inconsistency(format!(
            "{formula} is valid in exactly one of the two models"
        ))),
    }
}

fn decide_cmd(
    text: &str,
    mode: Mode,
    points: usize,
    atoms: Option<Vec<String>>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> topologic::Result<Outcome> {
    let f = parse(text)?;
    let bound = SearchBound {
        max_points: points,
        atoms: atoms.unwrap_or_else(|| f.atoms().into_iter().collect()),
        enumerate_valuations: seed.is_none(),
        seed: seed.unwrap_or(0),
    };
    let verdict = match mode {
        Mode::Sat => decide_sat(&f, &bound)?,
        Mode::Valid => decide_valid(&f, &bound)?,
    };
    let label = match &verdict {
        Verdict::Satisfiable(_) => "satisfiable",
        Verdict::NoModelWithinBound => "no model within bound",
        Verdict::ValidWithinBound => "valid within bound",
        Verdict::Invalid(_) => "invalid",
    };
    println!("{label}");
    if let Some(w) = verdict.witness() {
        println!("at {}", w.pair.render(&w.model.space));
        let doc = ModelDocument::from_model(&w.model);
        match out {
            Some(path) => {
                doc.save(&path)?;
                println!("wrote {}", path.display());
            }
            None => print!("{}", doc.to_json()),
        }
    }
    Ok(if verdict.is_positive() {
        Outcome::Positive
    } else {
        Outcome::Negative
    })
}

fn print_sweep(report: &SweepReport) {
    println!("scheme  instances  models  violations");
    for row in &report.rows {
        println!(
            "{:>6}  {:>9}  {:>6}  {:>10}",
            row.scheme, row.instances, row.models, row.violation_count
        );
        for v in &row.violations {
            println!("    {} at {}", v.instance, v.pair.render(&v.model.space));
            println!(
                "      model: {}",
                ModelDocument::from_model(&v.model)
                    .to_json()
                    .replace('\n', " ")
            );
        }
    }
}

fn axioms_cmd(
    model: Option<PathBuf>,
    enumerate: Option<usize>,
    trials: usize,
    seed: u64,
    schemes: &[u8],
    atoms: Vec<String>,
) -> topologic::Result<Outcome> {
    if let Some(&bad) = schemes.iter().find(|s| !(1..=12).contains(*s)) {
        return Err(Error::Precondition(format!("no axiom scheme {bad}")));
    }
    let report = match model {
        Some(path) => {
            let m = load(&path)?;
            let atoms: Vec<String> = m.valuation().keys().cloned().collect();
            sweep_models(&[m], &atoms, schemes, trials, seed)?
        }
        None => {
            let bound = SearchBound {
                max_points: enumerate.unwrap_or(3),
                atoms,
                enumerate_valuations: true,
                seed,
            };
            axiom_soundness_sweep(&bound, schemes, trials, seed)?
        }
    };
    print_sweep(&report);
    let unsound = report.rows.iter().any(|r| {
        r.violations
            .iter()
            .any(|v| violation_is_unsound(r.scheme, &v.model.space))
    });
    if unsound {
        println!("soundness violated");
        Ok(Outcome::Inconsistent)
    } else if report.total_violations() > 0 {
        println!("violations found on a non-topological space");
        Ok(Outcome::Negative)
    } else {
        println!("no violations");
        Ok(Outcome::Positive)
    }
}

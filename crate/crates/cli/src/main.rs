use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cpog_core::checker::{CheckError, CheckOptions, Checker, Verdict};
use cpog_core::cpog::{write_cpog, CpogReader, CpogReadError};
use cpog_core::evaluator::{
    complete_weights, function_hash, parse_weights, unweighted_count, weighted_count,
    weights_from_annotations, Q25Ring,
};
use cpog_core::generator::{generate_from_d4, GenError, GenMode, GenOptions};
use cpog_core::oracle::{brute_count, brute_weighted};
use cpog_core::satproof::{Oracle, SolverOptions};
use cpog_core::{compiler, format_dimacs, parse_dimacs, CnfFormula, Lit, Pog, PrimeField, Q25};

const OK: u8 = 0;
const REJECTED: u8 = 10;
const INPUT_ERROR: u8 = 20;
const GEN_FAILURE: u8 = 30;
const INTERNAL: u8 = 40;

#[derive(Parser)]
#[command(name = "cpog", version, about = "Check, generate and count with CPOG proofs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum Mode {
    Hybrid,
    Structural,
    Mono,
    OneSided,
}

#[derive(Subcommand)]
enum Command {
    /// Check a CPOG proof against a CNF formula.
    Check {
        cnf: PathBuf,
        cpog: PathBuf,
        #[arg(long)]
        one_sided: bool,
        /// Reprint the parsed formula.
        #[arg(long)]
        print_cnf: bool,
        /// Reprint the parsed proof.
        #[arg(long)]
        print_cpog: bool,
    },
    /// Check a proof, then count the models of the verified POG.
    Count {
        cnf: PathBuf,
        cpog: PathBuf,
        #[arg(long)]
        one_sided: bool,
        /// File of `<lit> <decimal>` lines.
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Prime modulus for a function hash.
        #[arg(long = "mod", requires = "seed")]
        modulus: Option<u64>,
        #[arg(long, requires = "modulus")]
        seed: Option<u64>,
    },
    /// Generate a CPOG proof from a CNF formula and a decision-DNNF graph.
    Gen {
        cnf: PathBuf,
        ddnnf: PathBuf,
        #[arg(short = 'o', long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "hybrid")]
        mode: Mode,
        #[arg(long)]
        no_lemmas: bool,
        #[arg(long)]
        no_grouping: bool,
        /// External solver command with `{cnf}` and `{proof}` placeholders.
        #[arg(long, env = "CPOG_SOLVER")]
        solver: Option<String>,
        #[arg(long, default_value_t = 1_000_000)]
        threshold: u64,
    },
    /// Compile a CNF formula into a decision-DNNF graph in d4 format.
    Compile {
        cnf: PathBuf,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Brute-force model counts for small formulas.
    Oracle {
        cnf: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(INPUT_ERROR, format!("{}: {e}", path.display())))
}

fn load_cnf(path: &Path) -> Result<CnfFormula, Failure> {
    parse_dimacs(&read(path)?).map_err(|e| fail(INPUT_ERROR, format!("{}: {e}", path.display())))
}

fn load_weights(path: Option<&Path>, cnf: &CnfFormula) -> Result<Option<BTreeMap<Lit, Q25>>, Failure> {
    if let Some(p) = path {
        let w = parse_weights(&read(p)?)
            .map_err(|e| fail(INPUT_ERROR, format!("{}: {e}", p.display())))?;
        return Ok(Some(w));
    }
    if cnf.weight_annotations().is_empty() {
        return Ok(None);
    }
    weights_from_annotations(cnf.weight_annotations())
        .map(Some)
        .map_err(|e| fail(INPUT_ERROR, e.to_string()))
}

/// Streams the proof through the checker and prints the verdict line.
fn check(
    cnf: &CnfFormula,
    path: &Path,
    options: CheckOptions,
    out: &mut impl Write,
    print_cpog: bool,
) -> Result<(Verdict, Option<Pog>), Failure> {
    let file = File::open(path).map_err(|e| fail(INPUT_ERROR, format!("{}: {e}", path.display())))?;
    let mut checker = Checker::new(cnf, options).map_err(|e| fail(INPUT_ERROR, e.to_string()))?;
    let mut index = 0usize;
    let mut failed: Option<(usize, CheckError)> = None;
    for item in CpogReader::new(BufReader::new(file)) {
        let step = item.map_err(|e| match e {
            CpogReadError::Parse(p) => fail(INPUT_ERROR, format!("{}: {p}", path.display())),
            other => fail(INPUT_ERROR, other.to_string()),
        })?;
        index += 1;
        if print_cpog {
            write_cpog(std::iter::once(&step), &mut *out).map_err(io_failure)?;
        }
        if failed.is_none() {
            if let Err(e) = checker.apply(&step) {
                failed = Some((index, e));
                if !print_cpog {
                    break;
                }
            }
        }
    }
    let (verdict, pog) = match failed {
        Some((step, error)) => (
            Verdict::Rejected {
                step: Some(step),
                error,
            },
            None,
        ),
        None => checker.finish(),
    };
    let line = match &verdict {
        Verdict::FullEquivalence => "VERIFIED FULL".to_string(),
        Verdict::ReverseOnly => "VERIFIED REVERSE-ONLY".to_string(),
        Verdict::Rejected { step, error } => {
            let at = step.map_or("final".to_string(), |s| s.to_string());
            format!("REJECTED step={at} reason={error}")
        }
    };
    writeln!(out, "{line}").map_err(io_failure)?;
    Ok((verdict, pog))
}

fn io_failure(e: io::Error) -> Failure {
    fail(INTERNAL, format!("output error: {e}"))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = match cli.command {
        Command::Check {
            cnf,
            cpog,
            one_sided,
            print_cnf,
            print_cpog,
        } => {
            let f = load_cnf(&cnf)?;
            if print_cnf {
                write!(out, "{}", format_dimacs(&f)).map_err(io_failure)?;
            }
            let (verdict, _) = check(&f, &cpog, CheckOptions { one_sided }, &mut out, print_cpog)?;
            if verdict == Verdict::ReverseOnly {
                writeln!(out, "guarantee pog-models-subset-of-cnf-models").map_err(io_failure)?;
            }
            if verdict.is_accepted() {
                OK
            } else {
                REJECTED
            }
        }
        Command::Count {
            cnf,
            cpog,
            one_sided,
            weights,
            modulus,
            seed,
        } => {
            let f = load_cnf(&cnf)?;
            let w = load_weights(weights.as_deref(), &f)?;
            let field = modulus
                .map(|p| PrimeField::new(p).map_err(|e| fail(INPUT_ERROR, e.to_string())))
                .transpose()?;
            let (verdict, pog) = check(&f, &cpog, CheckOptions { one_sided }, &mut out, false)?;
            let Some(pog) = pog.filter(|_| verdict.is_accepted()) else {
                out.flush().map_err(io_failure)?;
                return Ok(REJECTED);
            };
            let count = unweighted_count(&pog).map_err(|e| fail(INTERNAL, e.to_string()))?;
            writeln!(out, "models {count}").map_err(io_failure)?;
            if let Some(w) = w {
                let wc = weighted_count(&pog, &w).map_err(|e| fail(INPUT_ERROR, e.to_string()))?;
                writeln!(out, "weighted-count {wc}").map_err(io_failure)?;
            }
            if let (Some(field), Some(seed)) = (field, seed) {
                let h = function_hash(&pog, &field, seed).map_err(|e| fail(INTERNAL, e.to_string()))?;
                writeln!(out, "hash {h} mod {} seed {seed}", field.modulus()).map_err(io_failure)?;
            }
            if verdict == Verdict::ReverseOnly {
                writeln!(out, "guarantee lower-bound").map_err(io_failure)?;
            }
            OK
        }
        Command::Gen {
            cnf,
            ddnnf,
            output,
            mode,
            no_lemmas,
            no_grouping,
            solver,
            threshold,
        } => {
            let f = load_cnf(&cnf)?;
            let d4 = read(&ddnnf)?;
            let opts = GenOptions {
                mode: match mode {
                    Mode::Hybrid => GenMode::Hybrid,
                    Mode::Structural => GenMode::Structural,
                    Mode::Mono => GenMode::Monolithic,
                    Mode::OneSided => GenMode::OneSided,
                },
                lemmas: !no_lemmas,
                grouping: !no_grouping,
                threshold,
                oracle: match solver {
                    Some(cmd) => Oracle::External(cmd),
                    None => Oracle::BuiltIn(SolverOptions::default()),
                },
                ..GenOptions::default()
            };
            let generated = generate_from_d4(&f, &d4, &opts).map_err(|e| match e {
                GenError::Ddnnf(d) => fail(INPUT_ERROR, format!("{}: {d}", ddnnf.display())),
                other => fail(GEN_FAILURE, other.to_string()),
            })?;
            let file = File::create(&output)
                .map_err(|e| fail(INPUT_ERROR, format!("{}: {e}", output.display())))?;
            let mut w = BufWriter::new(file);
            write_cpog(generated.steps.iter(), &mut w)
                .and_then(|_| w.flush())
                .map_err(io_failure)?;
            let s = &generated.stats;
            let lines = [
                ("strategy", s.strategy.to_string()),
                ("pog-nodes", s.pog_nodes.to_string()),
                ("tree-size", s.tree_size.to_string()),
                ("tree-ratio", format!("{:.3}", s.tree_ratio)),
                ("declarations", s.declarations.to_string()),
                ("forward-steps", s.forward_steps.to_string()),
                ("deletions", s.deletions.to_string()),
                ("total-steps", s.total_steps().to_string()),
                ("lemmas", s.lemmas.to_string()),
                ("lemma-applications", s.lemma_applications.to_string()),
                ("lemma-fallbacks", s.lemma_fallbacks.to_string()),
                ("sat-calls", s.sat_calls.to_string()),
                ("groups", s.groups.to_string()),
            ];
            for (k, v) in lines {
                writeln!(out, "{k} {v}").map_err(io_failure)?;
            }
            OK
        }
        Command::Compile { cnf, output } => {
            let f = load_cnf(&cnf)?;
            fs::write(&output, compiler::compile_to_d4(&f))
                .map_err(|e| fail(INPUT_ERROR, format!("{}: {e}", output.display())))?;
            OK
        }
        Command::Oracle { cnf, weights } => {
            let f = load_cnf(&cnf)?;
            let w = load_weights(weights.as_deref(), &f)?;
            let n = brute_count(&f).map_err(|e| fail(INPUT_ERROR, e.to_string()))?;
            writeln!(out, "models {n}").map_err(io_failure)?;
            if let Some(w) = w {
                let pairs = complete_weights(&w, f.var_count());
                let wc = brute_weighted(&f, &Q25Ring, &pairs)
                    .map_err(|e| fail(INPUT_ERROR, e.to_string()))?;
                writeln!(out, "weighted-count {wc}").map_err(io_failure)?;
            }
            OK
        }
    };
    out.flush().map_err(io_failure)?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let worker = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(move || run(cli));
    let result = match worker.map(|h| h.join()) {
        Ok(Ok(r)) => r,
        Ok(Err(_)) => Err(fail(INTERNAL, "internal error")),
        Err(e) => Err(fail(INTERNAL, e.to_string())),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

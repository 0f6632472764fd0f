use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use theta_lab::cmfield::ElementRepr;
use theta_lab::gmks::{ks_kernel_check, ks_pair};
use theta_lab::maass::{delta_iterate, holomorphic_part, NearlyHoloFormRepr};
use theta_lab::matrix::Matrix;
use theta_lab::qexp::{derivation_d, frobenius};
use theta_lab::suite::{self, Suite, SuiteOptions};
use theta_lab::theta::theta_z;
use theta_lab::{Error, NearlyHoloForm, PointOfHn, Projector, ProjectorKind, QExpansion, QuadField};

const PRECISION_VAR: &str = "THETA_LAB_PRECISION";

#[derive(Parser)]
#[command(name = "theta-lab", version, about = "Theta and Maass-Shimura operators on Hermitian q-expansions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply theta^E, optionally followed by a projector on the new letters.
    Theta {
        input: PathBuf,
        #[arg(long)]
        power: usize,
        #[arg(long, value_enum, default_value_t = Project::None)]
        project: Project,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Apply the Frobenius substitution q^h -> q^(p h).
    Frobenius {
        input: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Apply the derivation D(gamma) for a matrix read from a file.
    Derive {
        input: PathBuf,
        #[arg(long)]
        gamma: PathBuf,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Iterate the weight-raising operator on an n=1 form.
    Maass {
        input: PathBuf,
        #[arg(long)]
        k: Option<i64>,
        #[arg(long, default_value_t = 1)]
        iterate: usize,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Extract the holomorphic part of a nearly holomorphic form.
    Holpart {
        input: PathBuf,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Kodaira-Spencer pairing table and kernel check at a point of H_n.
    KsTable {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: i64,
        #[arg(long)]
        point: PathBuf,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Run the seeded invariant suites.
    Check {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Project {
    Sym,
    Det,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Theta,
    Gmks,
    Maass,
    Weights,
    Unitary,
}

enum Failure {
    Lib(Error),
    Io(String),
    Checks(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| Error::Validation(format!("malformed {what} in {}: {e}", path.display())).into())
}

fn read_series(path: &Path) -> CliResult<QExpansion> {
    Ok(QExpansion::from_json_str(&read_text(path)?)?)
}

fn read_matrix(path: &Path, field: QuadField) -> CliResult<Matrix> {
    let rows: Vec<Vec<ElementRepr>> = parse_json(path, "matrix")?;
    Ok(Matrix::from_repr(rows, field)?)
}

/// serde_json keeps object keys in a BTreeMap, so this output has sorted keys.
fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn form_json(f: &NearlyHoloForm) -> Value {
    serde_json::to_value(f.to_repr()).expect("serializable")
}

fn precision_cap() -> CliResult<Option<u32>> {
    match std::env::var(PRECISION_VAR) {
        Err(_) => Ok(None),
        Ok(s) => s
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|&c| c > 0)
            .map(Some)
            .ok_or_else(|| Failure::Io(format!("{PRECISION_VAR} must be a positive integer, got {s:?}"))),
    }
}

/// Accepts a nearly holomorphic form, or an n=1 scalar q-expansion together with `--k`.
fn read_form(path: &Path, k: Option<i64>) -> CliResult<NearlyHoloForm> {
    let value: Value = parse_json(path, "JSON")?;
    if value.get("coeffs").is_some() {
        let repr: NearlyHoloFormRepr = serde_json::from_value(value)
            .map_err(|e| Error::Validation(format!("malformed form in {}: {e}", path.display())))?;
        let form = NearlyHoloForm::from_repr(repr)?;
        if let Some(k) = k {
            if k != form.weight() {
                return Err(Error::Validation(format!("--k {k} disagrees with the form's weight {}", form.weight())).into());
            }
        }
        return Ok(form);
    }
    let f = QExpansion::from_json_str(&value.to_string())?;
    let k = k.ok_or_else(|| Error::Parameter("--k is required for a q-expansion input".into()))?;
    Ok(NearlyHoloForm::from_qexp(&f, k)?)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Theta { input, power, project, output } => {
            let f = read_series(&input)?;
            let kind = match project {
                Project::Sym => ProjectorKind::SymmetrizeTau,
                Project::Det => ProjectorKind::DetAntisymmetrize,
                Project::None => ProjectorKind::Identity,
            };
            let z = Projector::new(kind, f.n(), power, f.field())?;
            write_json(&output, &theta_z(&f, power, &z)?.to_json_value())
        }
        Command::Frobenius { input, p, output } => {
            let f = read_series(&input)?;
            write_json(&output, &frobenius(&f, p, None)?.to_json_value())
        }
        Command::Derive { input, gamma, output } => {
            let f = read_series(&input)?;
            let g = read_matrix(&gamma, f.field())?;
            write_json(&output, &derivation_d(&g, &f)?.to_json_value())
        }
        Command::Maass { input, k, iterate, output } => {
            let f = read_form(&input, k)?;
            write_json(&output, &form_json(&delta_iterate(&f, iterate)?))
        }
        Command::Holpart { input, output } => {
            let f = read_form(&input, None)?;
            write_json(&output, &holomorphic_part(&f).to_json_value())
        }
        Command::KsTable { n, d, point, output } => {
            let field = QuadField::new(d)?;
            let z = read_matrix(&point, field)?;
            if z.rows() != n || z.cols() != n {
                return Err(Error::Shape(format!("point is {}x{}, expected {n}x{n}", z.rows(), z.cols())).into());
            }
            let p = PointOfHn::new(z)?;
            let mut table = Vec::new();
            for i in 1..=2 * n {
                for j in 1..=2 * n {
                    let pair = ks_pair(i, j, &p)?.map(|(a, b)| json!([a, b]));
                    table.push(json!({ "i": i, "j": j, "pair": pair }));
                }
            }
            let report = json!({
                "n": n,
                "d": d,
                "point": p.matrix().to_repr(),
                "table": table,
                "kernel_ok": ks_kernel_check(n, &p)?,
            });
            write_json(&output, &report)
        }
        Command::Check { suite } => {
            let suites: Vec<Suite> = match suite {
                SuiteArg::All => Suite::ALL.to_vec(),
                SuiteArg::Theta => vec![Suite::Theta],
                SuiteArg::Gmks => vec![Suite::Gmks],
                SuiteArg::Maass => vec![Suite::Maass],
                SuiteArg::Weights => vec![Suite::Weights],
                SuiteArg::Unitary => vec![Suite::Unitary],
            };
            let opts = SuiteOptions { precision_cap: precision_cap()? };
            let mut failed = 0;
            for s in suites {
                for r in suite::run(s, opts) {
                    match &r.outcome {
                        Ok(()) => println!("PASS  {}: {}", s.name(), r.name),
                        Err(msg) => {
                            failed += 1;
                            println!("FAIL  {}: {} ({msg})", s.name(), r.name);
                        }
                    }
                }
            }
            if failed > 0 {
                return Err(Failure::Checks(failed));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_math_domain() { 2 } else { 1 })
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Checks(n)) => {
            eprintln!("{n} check(s) failed");
            ExitCode::from(1)
        }
    }
}

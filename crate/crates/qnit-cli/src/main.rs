//! `qnit` — command-line front end for the state-partition toolkit.
//!
//! One subcommand per capability: build the canonical nit set, enumerate
//! the full catalogue, relabel states, validate families, compose
//! prime-valued context operators, run the W-basis separation demo,
//! render two-particle tessellations, and run generalized-urn sessions.
//!
//! Exit codes: `0` success, `1` domain or validation failure, `2` usage
//! error. All output is deterministic for fixed inputs and seeds.

mod render;

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use qnit::enumerate::{enumerate_nit_sets, SweepOptions, DEFAULT_BUDGET};
use qnit::inverse::{build_w_basis, conjugated_nit_operators, verify_separation};
use qnit::operators::{context_operator, nit_operators_for, PrimeAssignment};
use qnit::partitions::{canonical_nit_set, NitParams, NitSet};
use qnit::perm::Permutation;
use qnit::urn::{run_session, urn_from_nit_set, Lens, LensMode};
use qnit::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qnit",
    version,
    about = "Balanced state partitions, separating observables, and their quasi-classical urn analogue"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical nit set for n outcomes and k particles
    Construct {
        /// Outcomes per observable (at least 2)
        #[arg(long)]
        n: u32,
        /// Number of particles (at least 1)
        #[arg(long)]
        k: u32,
    },
    /// Sweep all state relabelings and list every nit set, one JSON object per line
    Enumerate {
        /// Outcomes per observable (at least 2)
        #[arg(long)]
        n: u32,
        /// Number of particles (at least 1)
        #[arg(long)]
        k: u32,
        /// Print only the number of distinct nit sets
        #[arg(long)]
        count_only: bool,
        /// Emit at most this many entries (the sweep still runs in full)
        #[arg(long)]
        limit: Option<usize>,
        /// Maximum number of candidate relabelings to visit
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Worker threads for the sweep (0 = auto); output order is unaffected
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Apply a state relabeling, given in cycle notation, to a nit set
    Permute {
        #[command(flatten)]
        source: SourceArgs,
        /// Relabeling in cycle notation, e.g. "(1)(2,5,6,7,3,9,8,4)"
        #[arg(long)]
        perm: String,
    },
    /// Check the structural and separation invariants and print the report
    Verify {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Compose per-partition prime observables into a context operator
    Context {
        #[command(flatten)]
        source: SourceArgs,
        /// Flat comma-separated prime list, one row of n values per partition
        /// (defaults to the first k·n primes)
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
    },
    /// Conjugate the three-bit observables into the W basis and verify separation
    WDemo,
    /// Render the two-partition grid of a k = 2 nit set
    Tessellate {
        #[command(flatten)]
        source: SourceArgs,
        /// Output format (json is not meaningful for this command)
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
    },
    /// Draw balls from the generalized urn of a nit set and tally lens results
    Urn {
        #[command(flatten)]
        source: SourceArgs,
        /// Number of draws
        #[arg(long, default_value_t = 10)]
        draws: u64,
        /// RNG seed; identical seeds reproduce identical tallies
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lens color; matches a partition color or is foreign to the model
        #[arg(long, default_value = "blue")]
        lens: String,
        /// Foreign-lens behavior: no answer, or every glyph at once
        #[arg(long, value_enum, default_value_t = Mode::Monospectral)]
        mode: Mode,
    },
}

/// Where a command gets its nit set: an explicit JSON file, or the
/// canonical set for a given shape.
#[derive(Args)]
struct SourceArgs {
    /// Outcomes per observable, for the canonical set (with --k)
    #[arg(long)]
    n: Option<u32>,
    /// Number of particles, for the canonical set (with --n)
    #[arg(long)]
    k: Option<u32>,
    /// Read the nit set from this JSON file instead
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Ascii,
    Svg,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    Monospectral,
    Broadened,
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

/// Writes to stdout; a closed pipe (e.g. piping into `head`) ends the
/// program quietly with success instead of an error.
fn print_out(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(stream_error(e)),
    }
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Construct { n, k } => {
            let set = canonical_nit_set(NitParams::new(n, k)?);
            print_set(&set)?;
            Ok(0)
        }
        Command::Enumerate {
            n,
            k,
            count_only,
            limit,
            budget,
            jobs,
        } => {
            let params = NitParams::new(n, k)?;
            let options = SweepOptions {
                budget,
                jobs: if jobs == 0 {
                    SweepOptions::default().jobs
                } else {
                    jobs
                },
            };
            let sets = enumerate_nit_sets(params, &options)?;
            if count_only {
                print_out(&format!("{}\n", sets.len()))?;
            } else {
                let mut lines = String::new();
                for set in sets.iter().take(limit.unwrap_or(usize::MAX)) {
                    lines.push_str(&serde_json::to_string(set)?);
                    lines.push('\n');
                    if lines.len() >= 1 << 16 {
                        print_out(&lines)?;
                        lines.clear();
                    }
                }
                print_out(&lines)?;
            }
            Ok(0)
        }
        Command::Permute { source, perm } => {
            let set = resolve_set(&source)?;
            require_structural(&set)?;
            let p = Permutation::from_cycles(&perm, set.params.state_count())?;
            print_set(&set.apply_state_permutation(&p)?)?;
            Ok(0)
        }
        Command::Verify { source } => {
            let set = resolve_set(&source)?;
            let report = set.validate();
            print_out(&format!("{}\n", serde_json::to_string_pretty(&report)?))?;
            Ok(if report.is_valid() { 0 } else { 1 })
        }
        Command::Context { source, primes } => {
            let set = resolve_set(&source)?;
            set.require_valid()?;
            let assignment = match primes {
                Some(values) => assignment_from_flat(&set, values)?,
                None => PrimeAssignment::default_for(set.params),
            };
            let operators = nit_operators_for(&set, &assignment)?;
            let context = context_operator(&operators)?;
            print_out(&format!("{}\n", serde_json::to_string_pretty(&context)?))?;
            Ok(0)
        }
        Command::WDemo => w_demo(),
        Command::Tessellate { source, format } => {
            let set = resolve_set(&source)?;
            let text = match format {
                Format::Ascii => render::render_ascii(&set)?,
                Format::Svg => render::render_svg(&set)?,
                Format::Json => {
                    return Err(Error::Unsupported(
                        "tessellate renders ascii or svg; json output is not meaningful here"
                            .into(),
                    ))
                }
            };
            print_out(&text)?;
            Ok(0)
        }
        Command::Urn {
            source,
            draws,
            seed,
            lens,
            mode,
        } => {
            let set = resolve_set(&source)?;
            let colors = default_colors(set.params.k() as usize);
            let glyphs = default_glyphs(set.params.n() as usize);
            let urn = urn_from_nit_set(&set, &colors, &glyphs)?;
            let lens = Lens {
                color: lens,
                mode: match mode {
                    Mode::Monospectral => LensMode::Monospectral,
                    Mode::Broadened => LensMode::Broadened,
                },
            };
            let tally = run_session(&urn, &lens, draws, seed)?;
            print_out(&format!("{}\n", serde_json::to_string_pretty(&tally)?))?;
            Ok(0)
        }
    }
}

/// Resolves the nit-set source flags; flag-combination mistakes are usage
/// errors (exit 2), while unreadable or malformed files are domain errors
/// (exit 1).
fn resolve_set(source: &SourceArgs) -> Result<NitSet> {
    match (&source.input, source.n, source.k) {
        (Some(path), None, None) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::InvalidParameter(format!("cannot read {}: {e}", path.display()))
            })?;
            Ok(serde_json::from_str(&text)?)
        }
        (None, Some(n), Some(k)) => Ok(canonical_nit_set(NitParams::new(n, k)?)),
        (Some(_), _, _) => usage_error("--input cannot be combined with --n/--k"),
        (None, _, _) => usage_error("give either --input FILE or both --n and --k"),
    }
}

fn usage_error(message: &str) -> ! {
    Cli::command()
        .error(ErrorKind::MissingRequiredArgument, message)
        .exit()
}

fn stream_error(e: std::io::Error) -> Error {
    Error::InvalidParameter(format!("cannot write output: {e}"))
}

/// Canonicalized pretty JSON with a trailing newline, so writing a set
/// that was read back produces byte-identical files.
fn print_set(set: &NitSet) -> Result<()> {
    print_out(&format!(
        "{}\n",
        serde_json::to_string_pretty(&set.canonicalize())?
    ))
}

fn require_structural(set: &NitSet) -> Result<()> {
    let report = set.validate();
    if report.structural.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidNitSet(report))
    }
}

/// Splits a flat prime list into one row of n values per partition.
fn assignment_from_flat(set: &NitSet, values: Vec<u64>) -> Result<PrimeAssignment> {
    let n = set.params.n() as usize;
    let k = set.params.k() as usize;
    if values.len() != n * k {
        return Err(Error::PrimeAssignment(format!(
            "--primes needs {} values ({k} partitions x {n} outcomes), got {}",
            n * k,
            values.len()
        )));
    }
    PrimeAssignment::new(values.chunks(n).map(<[u64]>::to_vec).collect())
}

/// Lens colors for the first partitions; past the named palette the
/// colors are numbered so any k stays distinct.
fn default_colors(k: usize) -> Vec<String> {
    const PALETTE: [&str; 6] = ["blue", "yellow", "red", "green", "orange", "violet"];
    (0..k)
        .map(|j| {
            PALETTE
                .get(j)
                .map(|c| (*c).to_string())
                .unwrap_or_else(|| format!("color{}", j + 1))
        })
        .collect()
}

/// Block glyphs: single letters while the alphabet lasts, numbered past it.
fn default_glyphs(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n)
            .map(|b| char::from(b'A' + b as u8).to_string())
            .collect()
    } else {
        (1..=n).map(|b| format!("G{b}")).collect()
    }
}

/// A real with 12 significant digits, stable across runs.
fn fmt_real(x: f64) -> String {
    format!("{x:.11e}")
}

/// Builds the W basis, conjugates the three two-valued observables into
/// it, and reports the full separation verification. Any failed check
/// exits 1.
fn w_demo() -> Result<i32> {
    let basis = build_w_basis();
    let params = NitParams::new(2, 3)?;
    let set = canonical_nit_set(params);
    let assignment = PrimeAssignment::default_for(params);
    let operators = nit_operators_for(&set, &assignment)?;

    let conjugated = conjugated_nit_operators(&basis, &operators)?;
    let first = &conjugated[0];
    let diagonal: Vec<String> = first
        .diagonal()
        .iter()
        .map(|z| format!("{}", z.re.round() as i64))
        .collect();

    let mut text = String::new();
    text.push_str(&format!(
        "W basis: {dim} x {dim} unitary, deviation from unitarity {dev}\n",
        dim = basis.dim(),
        dev = fmt_real(basis.unitarity_deviation())
    ));
    text.push_str(&format!(
        "conjugated operator 1 diagonal: diag({})\n",
        diagonal.join(", ")
    ));
    text.push_str(&format!(
        "  max off-diagonal magnitude: {}\n",
        fmt_real(first.max_off_diagonal())
    ));

    let report = verify_separation(&basis, &operators)?;
    let eigenvalues: Vec<String> = report
        .eigenvalue_check
        .values
        .iter()
        .map(i64::to_string)
        .collect();
    text.push_str(&format!(
        "context eigenvalues (by basis column): {}\n",
        eigenvalues.join(" ")
    ));
    text.push_str(&format!(
        "check eigenvectors: {} (max deviation {})\n",
        pass_word(report.eigenvector_check.pass),
        fmt_real(report.eigenvector_check.max_deviation)
    ));
    text.push_str(&format!(
        "check commutators: {} (max deviation {})\n",
        pass_word(report.commutation_check.pass),
        fmt_real(report.commutation_check.max_deviation)
    ));
    text.push_str(&format!(
        "check eigenvalues: {} (max integer defect {})\n",
        pass_word(report.eigenvalue_check.pass),
        fmt_real(report.eigenvalue_check.max_integer_defect)
    ));
    text.push_str(&format!(
        "check decode: {}\n",
        pass_word(report.decode_check.pass)
    ));
    for row in &report.decode_check.table {
        let blocks: Vec<String> = row.blocks.iter().map(usize::to_string).collect();
        text.push_str(&format!(
            "  value {} -> column {}, blocks ({})\n",
            row.value,
            row.column,
            blocks.join(", ")
        ));
    }
    text.push_str(&format!(
        "cross-order deviation: {}\n",
        fmt_real(report.cross_order_deviation)
    ));
    let code = if report.all_pass() {
        text.push_str("result: all checks passed\n");
        0
    } else {
        text.push_str("result: CHECK FAILURE\n");
        1
    };
    print_out(&text)?;
    Ok(code)
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

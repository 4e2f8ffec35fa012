//! `untwist`: which single-twist unknotting indices does a knot admit?
//!
//! Subcommands: `analyze` one knot from a dataset, `torus` invariants of a
//! torus knot, `lens` d-spectra, `forms` rank-2 form enumeration, and
//! `table` regression against an expected results table.
//!
//! Exit codes: 0 on success (and table match), 1 on input errors, 2 when the
//! table check finds a mismatch.

use clap::{Parser, Subcommand, ValueEnum};
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use untwist_core::engine::{
    analyze, parse_expected_table, reproduce_table, AnalysisConfig, ReportFormat,
};
use untwist_core::floer_engine::upsilon_from_v;
use untwist_core::forms_and_d::lens_spectrum;
use untwist_core::knot_model::{load_dataset, torus_knot, KnotRecord};
use untwist_core::numeric::{format_rational, rat, Definiteness, Parity};
use untwist_core::signature_engine::torus_signature;

#[derive(Parser)]
#[command(
    name = "untwist",
    about = "Obstructions to unknotting a knot with a single full twist",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
}

#[derive(Clone, Copy, ValueEnum)]
enum DefiniteArg {
    Pos,
    Neg,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one knot from a dataset and report a verdict per twist index.
    Analyze {
        /// Dataset file (JSON array of knot records).
        #[arg(long)]
        data: PathBuf,
        /// Name of the knot inside the dataset.
        #[arg(long)]
        knot: String,
        /// Candidate cap for knots with no Floer or four-genus data.
        #[arg(long, default_value_t = 16)]
        max_l: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Invariants of the torus knot T(p,q): V-sequence, Upsilon, signatures.
    Torus {
        p: i64,
        q: i64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// d-invariant spectrum of the lens space L(p,q).
    Lens {
        p: u64,
        q: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Rank-2 forms `[[a,b],[b,a]]` with `|a^2 - b^2| = det`, one per class.
    Forms {
        #[arg(long)]
        det: i64,
        #[arg(long, value_enum)]
        parity: ParityArg,
        #[arg(long, value_enum)]
        definite: DefiniteArg,
    },
    /// Analyze every knot in the expected table and diff the results.
    Table {
        #[arg(long)]
        data: PathBuf,
        /// Expected-table file (`name | known | unknown` rows).
        #[arg(long)]
        check: PathBuf,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &PathBuf) -> anyhow::Result<String> {
    std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))
}

/// Writes to stdout, treating a closed pipe as a normal early exit rather
/// than a panic.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing to stdout: {e}");
        std::process::exit(1);
    }
}

fn run() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            data,
            knot,
            max_l,
            format,
        } => {
            let records = load_dataset(&read(&data)?)?;
            let rec = records
                .iter()
                .find(|r| r.name == knot)
                .ok_or_else(|| anyhow::anyhow!("knot {knot:?} not in {}", data.display()))?;
            let config = AnalysisConfig { max_l };
            let report = analyze(rec, &config)?;
            let fmt = match format {
                Format::Text => ReportFormat::Text,
                Format::Json => ReportFormat::Json,
                Format::Csv => ReportFormat::Csv,
            };
            emit(&report.render(fmt));
            Ok(ExitCode::SUCCESS)
        }
        Command::Torus { p, q, format } => {
            let k = torus_knot(p, q)?;
            emit(&render_torus(&k, p, q, format));
            Ok(ExitCode::SUCCESS)
        }
        Command::Lens { p, q, format } => {
            let spectrum = lens_spectrum(p, q)?;
            let mut out = String::new();
            match format {
                Format::Json => {
                    let values: Vec<String> = spectrum.values.iter().map(format_rational).collect();
                    let json = serde_json::json!({ "p": p, "q": q, "d": values });
                    out.push_str(&serde_json::to_string_pretty(&json)?);
                    out.push('\n');
                }
                _ => {
                    use std::fmt::Write;
                    let _ = writeln!(out, "d-invariants of L({p},{q}):");
                    for (i, v) in spectrum.values.iter().enumerate() {
                        let _ = writeln!(out, "  {i:>3}  {}", format_rational(v));
                    }
                }
            }
            emit(&out);
            Ok(ExitCode::SUCCESS)
        }
        Command::Forms {
            det,
            parity,
            definite,
        } => {
            if det < 1 {
                anyhow::bail!("determinant must be positive");
            }
            let forms = untwist_core::numeric::enumerate_forms(
                det,
                match parity {
                    ParityArg::Even => Parity::Even,
                    ParityArg::Odd => Parity::Odd,
                },
                match definite {
                    DefiniteArg::Pos => Definiteness::Positive,
                    DefiniteArg::Neg => Definiteness::Negative,
                },
            );
            let mut out = String::new();
            if forms.is_empty() {
                out.push_str("no forms\n");
            }
            for f in forms {
                out.push_str(&format!("{f}\n"));
            }
            emit(&out);
            Ok(ExitCode::SUCCESS)
        }
        Command::Table { data, check } => {
            let records = load_dataset(&read(&data)?)?;
            let expected = parse_expected_table(&read(&check)?)?;
            let report = reproduce_table(&records, &expected, &AnalysisConfig::default())?;
            emit(&report.render_text());
            if report.matched() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
    }
}

fn render_torus(k: &KnotRecord, p: i64, q: i64, format: Format) -> String {
    let v = k.v_seq.as_ref().expect("torus knots carry V");
    let upsilon = k
        .upsilon
        .clone()
        .unwrap_or_else(|| upsilon_from_v(v, Some(k.genus)));
    // signature samples at r/l for l <= 8, skipping jumps
    let mut samples: Vec<(String, i64)> = Vec::new();
    let mut seen = BTreeSet::new();
    for l in 2i64..=8 {
        for r in 1..l {
            let x = rat(r, l);
            if !seen.insert(x.clone()) {
                continue;
            }
            if let Ok(s) = torus_signature(p, q, &x) {
                samples.push((format!("{r}/{l}"), s));
            }
        }
    }
    match format {
        Format::Json => {
            let breakpoints: Vec<(String, String)> = upsilon
                .breakpoints()
                .iter()
                .map(|(t, val)| (format_rational(t), format_rational(val)))
                .collect();
            let json = serde_json::json!({
                "name": k.name,
                "signature": k.signature,
                "determinant": k.determinant,
                "arf": k.arf,
                "genus": k.genus,
                "v_seq": v.to_vec(),
                "upsilon_breakpoints": breakpoints,
                "signature_samples": samples
                    .iter()
                    .map(|(x, s)| (x.clone(), *s))
                    .collect::<std::collections::BTreeMap<_, _>>(),
            });
            let mut out = serde_json::to_string_pretty(&json).expect("serializable");
            out.push('\n');
            out
        }
        _ => {
            use std::fmt::Write;
            let mut out = String::new();
            let _ = writeln!(out, "{}", k.name);
            let _ = writeln!(out, "  signature   = {}", k.signature);
            let _ = writeln!(out, "  determinant = {}", k.determinant);
            let _ = writeln!(out, "  arf         = {}", k.arf);
            let _ = writeln!(out, "  genus       = {}", k.genus);
            let _ = writeln!(out, "  V           = {:?}", v.to_vec());
            let _ = writeln!(out, "  Upsilon     = {upsilon}");
            let rendered: Vec<String> = samples.iter().map(|(x, s)| format!("{x}: {s}")).collect();
            let _ = writeln!(out, "  sigma_x     = {{{}}}", rendered.join(", "));
            out
        }
    }
}

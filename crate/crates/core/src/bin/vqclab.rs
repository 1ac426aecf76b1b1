use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vqclab::grad::{grad_variance, reparameterize_with};
use vqclab::harness::{emit_csv, emit_heatmaps, run_sweep, SweepConfig};
use vqclab::sim::expect_z;
use vqclab::text::{circuit_from_text, circuit_to_text};
use vqclab::transpiler::{transpile, ParamOrigin, ParamProvenance};
use vqclab::{AnsatzKind, BackendRef, Circuit, Error, ReparamMode, Result, TranspileOptions};

#[derive(Parser)]
#[command(
    name = "vqclab",
    version,
    about = "Trainability laboratory for variational quantum circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an ansatz circuit and write it in text form.
    Build {
        #[arg(long)]
        ansatz: AnsatzKind,
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        reps: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile a circuit for a backend.
    Transpile {
        #[arg(long = "in")]
        input: PathBuf,
        /// `line:n`, `heavy-hex:R,C` or a backend JSON file.
        #[arg(long, default_value = "heavy-hex:5,11")]
        backend: BackendRef,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the physical-parameter provenance JSON.
        #[arg(long)]
        provenance: Option<PathBuf>,
        #[arg(long)]
        no_optimize: bool,
    },
    /// Print <Z_q> for a circuit at a parameter point.
    Expect {
        #[arg(long = "in")]
        input: PathBuf,
        /// File with the angles: a JSON array or a comma/whitespace list.
        #[arg(long)]
        theta: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        qubit: usize,
    },
    /// Estimate the gradient variance of a circuit.
    Gradvar {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Requires --provenance for compiled circuits.
        #[arg(long)]
        mode: Option<ReparamMode>,
        #[arg(long, default_value_t = 0)]
        cost_qubit: usize,
        #[arg(long)]
        provenance: Option<PathBuf>,
    },
    /// Run a sweep and write CSV plus per-ansatz heatmaps.
    Sweep {
        /// Sweep configuration JSON; built-in default sweep when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        meta_seeds: Option<usize>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    circuit_from_text(&read(path)?)
}

fn parse_theta(text: &str) -> Result<Vec<f64>> {
    let t = text.trim();
    if t.starts_with('[') {
        return Ok(serde_json::from_str(t)?);
    }
    t.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad angle '{s}'")))
        })
        .collect()
}

fn logical_symbols(prov: &ParamProvenance) -> usize {
    prov.origins()
        .iter()
        .filter_map(|o| match o {
            ParamOrigin::FromLogical { symbol, .. } => Some(symbol + 1),
            ParamOrigin::Synthesized(_) => None,
        })
        .max()
        .unwrap_or(0)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build {
            ansatz,
            qubits,
            reps,
            out,
        } => {
            let c = ansatz.build(qubits, reps)?;
            write_or_print(out.as_deref(), &circuit_to_text(&c))
        }
        Command::Transpile {
            input,
            backend,
            out,
            provenance,
            no_optimize,
        } => {
            let logical = read_circuit(&input)?;
            let backend = backend.resolve()?;
            let options = TranspileOptions {
                optimize: !no_optimize,
                ..TranspileOptions::default()
            };
            let t = transpile(&logical, &backend, &options)?;
            write_or_print(out.as_deref(), &circuit_to_text(&t.physical))?;
            if let Some(p) = provenance {
                write_or_print(Some(&p), &t.provenance.to_json())?;
            }
            let (b, a) = (t.metrics_before, t.metrics_after);
            eprintln!(
                "g1q {} -> {}, g2q {} -> {}, depth {} -> {}, params {} -> {}, swaps {}, cost qubit {}",
                b.g1q,
                a.g1q,
                b.g2q,
                a.g2q,
                b.dag_depth,
                a.dag_depth,
                b.num_symbols,
                a.num_symbols,
                t.swaps.len(),
                t.cost_qubit()
            );
            Ok(())
        }
        Command::Expect {
            input,
            theta,
            qubit,
        } => {
            let c = read_circuit(&input)?;
            let theta = match theta {
                Some(p) => parse_theta(&read(&p)?)?,
                None => Vec::new(),
            };
            let v = expect_z(&c.bind(&theta)?, qubit)?;
            println!("{v:.12}");
            Ok(())
        }
        Command::Gradvar {
            input,
            samples,
            seed,
            mode,
            cost_qubit,
            provenance,
        } => {
            let mut c = read_circuit(&input)?;
            match (mode, provenance) {
                (Some(mode), Some(p)) => {
                    let prov = ParamProvenance::from_json(&read(&p)?)?;
                    c = reparameterize_with(&c, &prov, logical_symbols(&prov), mode)?;
                }
                (Some(ReparamMode::SymbolDerived), None) => {
                    return Err(Error::Config(
                        "--mode symbol-derived needs --provenance".into(),
                    ));
                }
                _ => {}
            }
            let stats = grad_variance(&c, samples, seed, cost_qubit)?;
            if let Some(w) = &stats.warning {
                eprintln!("warning: {w}");
            }
            println!("{}", serde_json::to_string_pretty(&stats)?);
            Ok(())
        }
        Command::Sweep {
            config,
            out_csv,
            out_dir,
            checkpoint,
            meta_seeds,
        } => {
            let mut cfg = match config {
                Some(p) => SweepConfig::from_json(&read(&p)?)?,
                None => SweepConfig::default(),
            };
            cfg.out_csv = out_csv.or(cfg.out_csv);
            cfg.out_dir = out_dir.or(cfg.out_dir);
            cfg.checkpoint = checkpoint.or(cfg.checkpoint);
            if let Some(m) = meta_seeds {
                cfg.meta_seeds = m;
            }
            let records = run_sweep(&cfg)?;
            let mut failed = 0;
            for r in &records {
                if let Some(e) = &r.error {
                    failed += 1;
                    eprintln!("cell {} n={} reps={} failed: {e}", r.ansatz, r.n, r.reps);
                }
            }
            match &cfg.out_csv {
                Some(p) => emit_csv(&records, p)?,
                None => print!("{}", vqclab::harness::csv_string(&records)?),
            }
            if let Some(dir) = &cfg.out_dir {
                for path in emit_heatmaps(&records, dir)? {
                    eprintln!("wrote {}", path.display());
                }
            }
            eprintln!("{} cells, {} failed", records.len(), failed);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

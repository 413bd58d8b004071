use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{anyhow, Result};
use beamsynth_core::OracleConfig;
use clap::{Parser, Subcommand};

use crate::commands::{bench_csv, compare_csv, run_bench, run_compare, run_synthesis, write_file};
use crate::scenario::Scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

/// Robust beam-pattern synthesis for uniform linear arrays.
#[derive(Debug, Parser)]
#[command(name = "beamsynth", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a scenario and write pattern.csv and report.json.
    Synth {
        scenario: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Override the seed of a random uncertainty draw.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Time ADMM over (M, N) ladder pairs and write bench.csv.
    Bench {
        /// Comma-separated MxN pairs.
        #[arg(long, value_delimiter = ',', value_parser = parse_pair,
              default_value = "30x16,60x30,90x30,180x80,360x200")]
        pairs: Vec<(usize, usize)>,
        #[arg(long, default_value_t = 0.15)]
        delta: f64,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Compare the element-wise, l2 and nominal designs and write compare.csv.
    Compare {
        scenario: PathBuf,
        /// Comma-separated amplitude bounds.
        #[arg(long, value_delimiter = ',', required = true)]
        u_max: Vec<f64>,
        /// Phase bound in degrees.
        #[arg(long, default_value_t = 5.0)]
        phi_max: f64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected MxN, got {s:?}"))?;
    let m = m.trim().parse().map_err(|e| format!("bad M in {s:?}: {e}"))?;
    let n = n.trim().parse().map_err(|e| format!("bad N in {s:?}: {e}"))?;
    Ok((m, n))
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn status(converged: bool) -> i32 {
    if converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    }
}

pub fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Synth { scenario, out_dir, seed } => {
            let art = run_synthesis(&scenario, out_dir.as_deref(), seed)?;
            let r = &art.synthesis.report;
            println!(
                "converged={} iterations={} objective={:.9} peak_worst_case_db={:.4} at {} deg",
                r.converged, r.iterations, r.objective_direct, r.summary.peak_worst_case_db, r.summary.peak_angle
            );
            println!("wrote {} and {}", art.pattern_path.display(), art.report_path.display());
            Ok(status(r.converged))
        }
        Command::Bench { pairs, delta, repeats, out_dir } => {
            let rows = run_bench(&pairs, delta, repeats)?;
            let csv = bench_csv(&rows);
            print!("{csv}");
            let path = out_dir.unwrap_or_else(|| PathBuf::from(".")).join("bench.csv");
            write_file(&path, &csv)?;
            Ok(status(rows.iter().all(|r| r.converged)))
        }
        Command::Compare { scenario, u_max, phi_max, out_dir, seed } => {
            let sc = Scenario::load(&scenario)?;
            if u_max.is_empty() {
                return Err(anyhow!("--u-max needs at least one value"));
            }
            let rows = run_compare(&sc, &u_max, phi_max, seed, &OracleConfig::default())?;
            let csv = compare_csv(&rows);
            print!("{csv}");
            let dir = out_dir.or(sc.output.dir.clone()).unwrap_or_else(|| PathBuf::from("."));
            write_file(&dir.join("compare.csv"), &csv)?;
            Ok(status(rows.iter().all(|r| r.proposed_converged && r.nominal_converged)))
        }
    }
}

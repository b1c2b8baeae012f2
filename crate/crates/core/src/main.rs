use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use isoext::classify::{self, Form};
use isoext::linalg::CMatrix;
use isoext::sampling::Sampler;
use isoext::scenario;

#[derive(Parser)]
#[command(name = "isoext", version, about = "Extension and classification of invertible-group isometries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file.
    Run {
        path: PathBuf,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Record wall time in the report (breaks byte-determinism).
        #[arg(long)]
        timing: bool,
    },
    /// Run every shipped scenario plus the property checks.
    Selftest {
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        timing: bool,
    },
    /// Build a random map of the given form on M_n and classify it.
    Classify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 40)]
        samples: usize,
        /// SimilarityLinear, TransposeLinear, SimilarityConjugate or TransposeConjugate.
        #[arg(long)]
        form: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn write_report(path: &Option<PathBuf>, json: &str) -> Result<(), String> {
    if let Some(p) = path {
        std::fs::write(p, json).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Run {
            path,
            report,
            seed,
            timing,
        } => {
            let r = scenario::run_scenario_file(&path, seed, timing).map_err(|e| e.to_string())?;
            print!("{}", scenario::summary_table(std::slice::from_ref(&r)));
            write_report(&report, &r.to_json())?;
            Ok(r.all_match)
        }
        Command::Selftest { report, seed, timing } => {
            let r = scenario::selftest(seed, timing);
            print!("{}", scenario::summary_table(&r.scenarios));
            for (id, e) in &r.scenario_errors {
                println!("{id:<26} ERROR {e}");
            }
            println!();
            for p in &r.properties {
                println!("{:<40} {:<5} {:.3e}", p.name, if p.pass { "pass" } else { "FAIL" }, p.value);
            }
            if let Some(ms) = r.wall_time_ms {
                println!("wall time {ms:.0} ms");
            }
            write_report(&report, &r.to_json())?;
            Ok(r.all_pass)
        }
        Command::Classify { n, samples, form, seed } => {
            let form = Form::from_label(&form)
                .filter(|f| *f != Form::NoFormFits)
                .ok_or_else(|| format!("unknown form `{form}`"))?;
            let mut s = Sampler::new(seed);
            let u = s.invertible_matrix(n, 50.0);
            let ui = u.clone().try_inverse().ok_or("sampled U is singular")?;
            let map = |m: &CMatrix| &u * form.phi(m) * &ui;
            let r = classify::classify_matrix_isometry(&map, n, samples, seed ^ 1).map_err(|e| e.to_string())?;
            let err = (&r.u - classify::normalize_u(&u)).norm();
            println!("form       {}", r.form.label());
            println!("residual   {:.3e}", r.residual);
            for (h, v) in Form::HYPOTHESES.iter().zip(r.hypothesis_residuals) {
                println!("  {:<20} {v:.3e}", h.label());
            }
            println!("U error    {err:.3e}");
            println!("cond(U)    {:.3e}", r.condition_number);
            Ok(r.form == form)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

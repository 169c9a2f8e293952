use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use rayleigh::studies::{run_study, StudyConfig, StudyReport};
use serde_json::json;

/// Run a study recipe and write its table, schema and summary.
#[derive(Parser, Debug)]
#[command(name = "study", version)]
struct Args {
    /// TOML config naming the study, profile and parameter grids.
    config: PathBuf,
    /// Output directory (overrides RAYLEIGH_OUT_DIR).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the parameter map.
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed for randomised checks (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let tmp = dir.join(format!(".{}.tmp", path.file_name().unwrap().to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

fn write_outputs(dir: &Path, cfg: &StudyConfig, rep: &StudyReport) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let name = cfg.study.name();
    write_atomic(&dir.join(format!("{name}.csv")), &rep.table.to_csv())?;
    let schema = json!({
        "study": name,
        "file": format!("{name}.csv"),
        "separator": ",",
        "float_format": "scientific, 17 significant digits",
        "complex": "two columns with suffixes _re and _im",
        "columns": rep.table.columns,
    });
    write_atomic(&dir.join(format!("{name}.schema.json")), &serde_json::to_string_pretty(&schema)?)?;
    let summary = json!({
        "study": name,
        "criterion": rep.criterion,
        "profile": cfg.profile,
        "seed": cfg.seed,
        "rows": rep.table.rows.len(),
        "passed": rep.passed(),
        "checks": rep.checks,
        "values": rep.values,
        "warnings": rep.warnings,
        "runtime_seconds": rep.runtime_seconds,
    });
    write_atomic(&dir.join(format!("{name}.summary.json")), &serde_json::to_string_pretty(&summary)?)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match StudyConfig::from_toml(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(j) = args.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let out = args
        .out
        .or_else(|| std::env::var_os("RAYLEIGH_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("study-out"));

    let rep = match run_study(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: study {} failed: {e}", cfg.study);
            return ExitCode::from(1);
        }
    };
    for w in &rep.warnings {
        eprintln!("warning: {w}");
    }
    if let Err(e) = write_outputs(&out, &cfg, &rep) {
        eprintln!("error: writing to {}: {e}", out.display());
        return ExitCode::from(1);
    }
    for line in rep.summary_lines() {
        println!("{line}");
    }
    println!("{} {} ({} rows) -> {}", cfg.study, if rep.passed() { "PASS" } else { "FAIL" }, rep.table.rows.len(), out.display());
    if rep.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

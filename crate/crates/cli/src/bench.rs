use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::Args;

use carmc::aiger::{self, Format};
use carmc::batch::{run_batch, BatchConfig, BatchRow, Instance};

use crate::EngineArgs;

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Directory of .aag and .aig files.
    dir: PathBuf,

    /// Write the report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// The timeout applies to each instance separately.
    #[command(flatten)]
    engine: EngineArgs,
}

fn is_aiger(path: &Path) -> bool {
    path.is_file()
        && matches!(
            path.extension().and_then(|e| e.to_str()),
            Some("aag" | "aig")
        )
}

fn instances(dir: &Path) -> Result<Vec<Instance>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot list {}", dir.display()))? {
        let path = entry?.path();
        if is_aiger(&path) {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|p| {
            let aig = fs::read(&p)
                .map_err(|e| e.to_string())
                .and_then(|b| aiger::parse(&b, Format::Auto).map_err(|e| e.to_string()));
            Instance {
                name: p
                    .file_name()
                    .map_or_else(String::new, |n| n.to_string_lossy().into_owned()),
                aig: aig.map(Arc::new),
            }
        })
        .collect())
}

fn write_report<W: io::Write>(out: W, rows: &[BatchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BatchRow::HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Always exits 0 once the report is written; failures are report rows.
pub fn run(args: &BenchArgs) -> Result<u8> {
    let insts = instances(&args.dir)?;
    let mut options = args.engine.options();
    options.limits.deadline = None;
    let cfg = BatchConfig {
        options,
        timeout: args.engine.timeout,
    };
    let rows = run_batch(&insts, &cfg);
    match &args.out {
        Some(path) => {
            let f = fs::File::create(path)
                .with_context(|| format!("cannot write {}", path.display()))?;
            write_report(f, &rows)?;
        }
        None => write_report(io::stdout().lock(), &rows)?,
    }
    Ok(0)
}

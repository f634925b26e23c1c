use std::fs;
use std::process::ExitCode;

use clap::Parser;

use coslat::config::{ExperimentConfig, Flags};
use coslat::experiments::run;
use coslat::report::{plot_data, to_csv};
use coslat::{Error, Result};

fn main() -> ExitCode {
    let flags = Flags::parse();
    match run_cli(&flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("coslat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run_cli(flags: &Flags) -> Result<()> {
    let cfg = ExperimentConfig::from_flags(flags)?;
    let out = run(&cfg)?;
    for note in &out.notes {
        eprintln!("{note}");
    }
    let text = match &out.report {
        Some(r) => r.clone(),
        None => to_csv(&out.rows),
    };
    write_or_print(cfg.out.as_deref(), &text)?;
    if let Some(p) = &cfg.plot_data {
        fs::write(p, plot_data(&out.rows)).map_err(|source| Error::Io { path: p.clone(), source })?;
    }
    Ok(())
}

fn write_or_print(path: Option<&std::path::Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io { path: p.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

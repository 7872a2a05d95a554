//! Command-line front end for the staged pipeline.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use nlwave::pipeline::{self, RunConfig, Stage};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Solve,
    Postproc,
    Chars,
    Goursat,
    Validate,
    Report,
    /// solve, postproc, chars, goursat and report in order
    All,
}

/// Four-quadrant rarefaction pipeline.
#[derive(Debug, Parser)]
#[command(name = "nlwave", version)]
struct Args {
    /// Key = value config file; `#` starts a comment.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `outdir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Single `key=value` override, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    show_config: bool,
    #[arg(value_enum, required_unless_present = "show_config")]
    stages: Vec<Cmd>,
}

fn stages(cmds: &[Cmd]) -> Vec<Stage> {
    cmds.iter()
        .flat_map(|c| match c {
            Cmd::Solve => vec![Stage::Solve],
            Cmd::Postproc => vec![Stage::Postproc],
            Cmd::Chars => vec![Stage::Chars],
            Cmd::Goursat => vec![Stage::Goursat],
            Cmd::Validate => vec![Stage::Validate],
            Cmd::Report => vec![Stage::Report],
            Cmd::All => vec![Stage::Solve, Stage::Postproc, Stage::Chars, Stage::Goursat, Stage::Report],
        })
        .collect()
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = RunConfig::load(args.config.as_deref(), &args.set).and_then(|mut c| {
        if let Some(out) = &args.out {
            c.outdir = out.clone();
        }
        c.validate()?;
        Ok(c)
    });
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("nlwave: {e}");
            return ExitCode::from(pipeline::exit_code(&e) as u8);
        }
    };
    if args.show_config {
        print!("{}", cfg.canonical());
        return ExitCode::SUCCESS;
    }
    for stage in stages(&args.stages) {
        match pipeline::run_stage(&cfg, stage) {
            Ok(rec) => {
                let mut brief = rec.clone();
                if let Some(m) = brief.as_object_mut() {
                    m.remove("config");
                }
                println!("{brief}");
            }
            Err(e) => {
                eprintln!("nlwave {}: {e}", stage.name());
                return ExitCode::from(pipeline::exit_code(&e) as u8);
            }
        }
    }
    ExitCode::SUCCESS
}

//! The staged pipeline driven from code on a coarse grid, writing into a temporary directory.
//!
//! Usage: `cargo run --release --example pipeline_run [outdir]`

use nlwave::pipeline::{self, RunConfig, Stage};

fn main() -> nlwave::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.apply_text("nr = 120\nntheta = 180\nmesh_n = 100\nrequire_valid = false\n")?;
    cfg.outdir = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("nlwave_pipeline"));
    println!("run {} -> {}", &cfg.run_id()[..12], cfg.outdir.display());
    let stages = [Stage::Solve, Stage::Postproc, Stage::Chars, Stage::Goursat, Stage::Report];
    for rec in pipeline::run_pipeline(&cfg, &stages)? {
        let stage = rec["stage"].as_str().unwrap_or("?");
        println!("{stage:>8}: {:.2} s", rec["wall_seconds"].as_f64().unwrap_or(0.0));
    }
    let rec = pipeline::run_stage(&cfg, Stage::Report)?;
    println!("{}", serde_json::to_string_pretty(&rec["theta3_interval_deg"]).unwrap_or_default());
    Ok(())
}

//! Solves at moderate resolution and classifies each ray as shock or smooth sonic.
//!
//! Usage: `cargo run --release --example sonic_shock_scan [nr ntheta]`

use std::sync::Arc;

use nlwave::fv::{self, Bounds, MappedGrid, Order, SolverConfig};
use nlwave::selfsim::{self, DEFAULT_JUMP_THRESHOLD, DEFAULT_WINDOW};
use nlwave::{four_quadrant_states, GasLaw};

fn main() -> nlwave::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("grid sizes are integers"));
    let nr = args.next().unwrap_or(200);
    let nt = args.next().unwrap_or(300);
    let gl = GasLaw::new(3.0)?;
    let qd = four_quadrant_states(&gl, 0.5, 0.25)?;
    let grid = Arc::new(MappedGrid::polar(nr, nt, Bounds::annulus(0.01, 1.0, 0.0, 1.5 * std::f64::consts::PI))?);
    let (field, log) = fv::solve(&gl, &qd, grid, &SolverConfig::new(Order::Second))?;
    println!("solved {nr}x{nt} in {:.1} s", log.wall_seconds);
    let ss = selfsim::to_selfsimilar(&gl, &field)?;
    let rep = selfsim::scan_angles(&ss, &selfsim::angle_sweep(0.0, 90.0, 5.0), DEFAULT_JUMP_THRESHOLD, DEFAULT_WINDOW)?;
    for a in &rep.angles {
        let r = a.transition_r.map(|r| format!("{r:.4}")).unwrap_or_else(|| "-".into());
        println!("{:5.1} deg  {:<13} r = {r}", a.theta_deg, a.class.to_string());
    }
    let cs = selfsim::radial_cross_section(&ss, 30f64.to_radians())?;
    println!("density dip on the 30 deg ray: {:.2e}", cs.dip_depth());
    match rep.theta3_interval {
        Some((lo, hi)) => println!("theta3 in ({lo}, {hi}) deg"),
        None => println!("no shock to sonic switch found"),
    }
    Ok(())
}

//! Small polar run of the finite-volume solver with conservation bookkeeping.
//!
//! Usage: `cargo run --release --example fv_solve [nr ntheta]`

use std::sync::Arc;

use nlwave::fv::{Bounds, FvField, MappedGrid, Order, Solver, SolverConfig};
use nlwave::{four_quadrant_states, GasLaw};

fn main() -> nlwave::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("grid sizes are integers"));
    let nr = args.next().unwrap_or(100);
    let nt = args.next().unwrap_or(150);
    let gl = GasLaw::new(3.0)?;
    let qd = four_quadrant_states(&gl, 0.5, 0.25)?;
    let grid = Arc::new(MappedGrid::polar(nr, nt, Bounds::annulus(0.01, 1.0, 0.0, 1.5 * std::f64::consts::PI))?);
    let mut field = FvField::initial(grid.clone(), &gl, &qd);
    let mut solver = Solver::new(gl, qd, SolverConfig::new(Order::Second), grid)?;
    let start = field.totals();
    let mut outflow = [0.0; 3];
    let log = solver.run(&mut field, |_, st| {
        for c in 0..3 {
            outflow[c] += st.dt * st.boundary_outflow[c];
        }
    })?;
    let end = field.totals();
    println!("{nr}x{nt}: {} steps, dt in [{:.2e}, {:.2e}], {:.2} s", log.steps, log.dt_min, log.dt_max, log.wall_seconds);
    for (c, name) in ["rho", "m", "n"].iter().enumerate() {
        println!("  {name}: total {:+.10} -> {:+.10}, balance defect {:.1e}", start[c], end[c], end[c] - start[c] + outflow[c]);
    }
    let (lo, hi) = field.density_range();
    println!("  density range [{lo:.5}, {hi:.5}]");
    Ok(())
}

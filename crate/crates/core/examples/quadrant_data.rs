//! Quadrant states, corner points and the exact planar rarefaction for the reference data.

use nlwave::gas::{planar_rarefaction, PlanarWave};
use nlwave::{four_quadrant_states, GasLaw};

fn main() -> nlwave::Result<()> {
    let gl = GasLaw::new(3.0)?;
    let qd = four_quadrant_states(&gl, 0.5, 0.25)?;
    println!("p1 = {:.6}  p4 = {:.6}  c1 = {:.7}  c4 = {:.7}", qd.p1, qd.p4, qd.c1, qd.c4);
    for (name, u) in [("U1", qd.u1), ("U2", qd.u2), ("U3", qd.u3), ("U4", qd.u4)] {
        println!("{name}: rho = {:.4}  m = {:+.6}  n = {:+.6}", u.rho, u.m, u.n);
    }
    println!("Xi1 = (r {:.7}, {:.1} deg)", qd.xi1.r, qd.xi1.theta.to_degrees());
    println!("Xi2 = (r {:.7}, {:.1} deg)  speed class {:?}", qd.xi2.r, qd.xi2.theta.to_degrees(), qd.speed_class);
    println!("\nR14 fan, s = y/t:");
    for k in 0..=8 {
        let s = 0.4 + 0.06 * k as f64;
        let u = planar_rarefaction(&gl, &qd, PlanarWave::R14, s);
        println!("  s = {s:.2}  rho = {:.6}  n = {:+.6}", u.rho, u.n);
    }
    Ok(())
}

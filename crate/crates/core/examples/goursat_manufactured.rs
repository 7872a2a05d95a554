//! Goursat march on data from the exact rarefaction region, where the answer is known.

use nlwave::chars;
use nlwave::goursat::{self, BoundaryData};
use nlwave::{four_quadrant_states, GasLaw};

fn main() -> nlwave::Result<()> {
    let gl = GasLaw::new(3.0)?;
    let qd = four_quadrant_states(&gl, 0.5, 0.25)?;
    let mut prev = None;
    for n in [50, 100, 200, 400] {
        let bd = BoundaryData::manufactured(&gl, &qd, n)?;
        let mesh = goursat::goursat_march(&gl, &qd, &bd, n, 1e-4)?;
        let err = mesh
            .iter()
            .filter(|(_, _, m)| !m.sonic)
            .map(|(_, _, m)| (m.p - chars::r0_pressure(&gl, m.r, m.theta)).abs())
            .fold(0.0, f64::max);
        let selfdiff = prev.as_ref().map(|c| goursat::self_difference(c, &mesh, 0.0));
        println!(
            "n = {n:3}: {} nodes, max |p - exact| {err:.2e}, difference to n/2 {}",
            mesh.len(),
            selfdiff.map(|d| format!("{d:.2e}")).unwrap_or_else(|| "-".into())
        );
        prev = Some(mesh);
    }
    Ok(())
}

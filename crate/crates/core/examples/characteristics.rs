//! Characteristic toolkit: closed-form boundary curves, straight characteristics
//! of a simple wave, their envelope and the Riccati law for `S`.

use nlwave::chars::{self, CharOptions, Family, SimpleWaveFoot};
use nlwave::{four_quadrant_states, GasLaw};

fn main() -> nlwave::Result<()> {
    let gl = GasLaw::new(3.0)?;
    let qd = four_quadrant_states(&gl, 0.5, 0.25)?;
    let opt = CharOptions::default();

    let c24 = chars::integrate_char(&gl, |_, _| Ok(qd.p4), qd.xi2, Family::Plus, 60f64.to_radians(), &opt)?;
    let err = c24.samples.iter().map(|s| (s.r - chars::gamma24(&qd, s.theta).unwrap()).abs()).fold(0.0, f64::max);
    println!("Gamma24 traced with {} samples, max deviation from the secant law {err:.1e}", c24.samples.len());

    // feet with slowly decreasing pressure: their straight characteristics converge
    let feet: Vec<SimpleWaveFoot> = (0..30)
        .map(|k| {
            let th = 0.9 + 0.01 * k as f64;
            let p = qd.p4 * (1.0 + 0.2 * k as f64 / 30.0);
            SimpleWaveFoot::new(&gl, th, 0.62 + 0.002 * k as f64, p)
        })
        .collect::<nlwave::Result<_>>()?;
    let env = chars::envelope_point(&feet, 0.0, std::f64::consts::FRAC_PI_2)?;
    println!("envelope: {} points", env.points.len());
    if let Some(p) = env.xi4 {
        println!("  first focus at r = {:.4}, theta = {:.2} deg", p.r, p.theta.to_degrees());
    }

    let foot = feet[0];
    for dth in [0.05, 0.1, 0.2] {
        let th = foot.theta0 + dth;
        let h = chars::h_integral(&gl, &foot, th)?;
        match chars::riccati_s(1.0, h) {
            Ok(s) => println!("S from 1.0 after {dth} rad: {s:.6}"),
            Err(e) => println!("after {dth} rad: {e}"),
        }
    }
    Ok(())
}

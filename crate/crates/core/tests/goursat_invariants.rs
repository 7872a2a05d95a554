//! Invariants of the Goursat march on admissible prescribed data.

use nlwave::chars::lambda_speed;
use nlwave::goursat::{self, BoundaryData};
use nlwave::{four_quadrant_states, GasLaw, QuadrantData};
use proptest::prelude::*;

fn setup() -> (GasLaw, QuadrantData) {
    let gl = GasLaw::new(3.0).unwrap();
    let qd = four_quadrant_states(&gl, 0.5, 0.25).unwrap();
    (gl, qd)
}

/// Minus characteristic from `Xi2` carrying `p = p4 + bump s^k`, `s` the normalised angle.
/// `None` when the curve leaves the supersonic zone.
fn table(gl: &GasLaw, qd: &QuadrantData, bump: f64, k: i32, span: f64) -> Option<BoundaryData> {
    let th2 = qd.theta2();
    let g = |th: f64| qd.p4 + bump * ((th - th2) / span).powi(k);
    let n = 200;
    let h = span / n as f64;
    let (mut th, mut f) = (vec![th2], vec![qd.xi2.r]);
    let rhs = |t: f64, r: f64| lambda_speed(gl, r, g(t)).ok().map(|l| -l);
    for i in 0..n {
        let (t0, r0) = (th[i], f[i]);
        let k1 = rhs(t0, r0)?;
        let k2 = rhs(t0 + h / 2.0, r0 + h / 2.0 * k1)?;
        let k3 = rhs(t0 + h / 2.0, r0 + h / 2.0 * k2)?;
        let k4 = rhs(t0 + h, r0 + h * k3)?;
        th.push(t0 + h);
        f.push(r0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    let p: Vec<f64> = th.iter().map(|&t| g(t)).collect();
    goursat::gamma23_from_table(gl, qd, &th, &f, &p).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn admissible_data_give_no_hard_breaches(bump in 0.002f64..0.02, k in 2i32..4, span in 0.08f64..0.2) {
        let (gl, qd) = setup();
        let bd = table(&gl, &qd, bump, k, span);
        prop_assume!(bd.is_some());
        let bd = bd.unwrap();
        let rep = goursat::validate_boundary_data(&gl, &qd, &bd, 5e-3).unwrap();
        prop_assume!(rep.accepted());
        let mesh = goursat::goursat_march(&gl, &qd, &bd, 60, 1e-4).unwrap();
        prop_assert!(mesh.hard_breaches().is_empty(), "{:?}", mesh.hard_breaches().first());
        for (_, _, n) in mesh.iter().filter(|(_, _, n)| !n.sonic) {
            prop_assert!(n.p >= qd.p4 - 1e-12 && n.p <= qd.p1 + 1e-12);
            prop_assert!(n.t >= 0.0);
        }
        // within a few spacings of Xi1 the lines hold one to three nodes and
        // the front is nearly tangent to them, so coarse meshes may zigzag there
        let mut front = goursat::extract_sonic(&gl, &mesh);
        front.samples.retain(|s| s.theta < std::f64::consts::FRAC_PI_2 - 4.0 * mesh.dtheta);
        if front.samples.len() >= 3 {
            prop_assert!(front.strictly_decreasing(0.0), "{:?}", front.cartesian_slopes());
        }
    }

    #[test]
    fn mesh_differences_shrink_under_refinement(bump in 0.002f64..0.02, span in 0.08f64..0.2) {
        let (gl, qd) = setup();
        let bd = table(&gl, &qd, bump, 2, span);
        prop_assume!(bd.is_some());
        let bd = bd.unwrap();
        let m: Vec<_> = [40, 80, 160].iter().map(|&n| goursat::goursat_march(&gl, &qd, &bd, n, 1e-4).unwrap()).collect();
        // away from the near-sonic band, where the march is first order at best
        let d1 = goursat::self_difference(&m[0], &m[1], 0.1);
        let d2 = goursat::self_difference(&m[1], &m[2], 0.1);
        prop_assert!(d2 < d1, "{d1:e} {d2:e}");
    }
}

//! Self-similar view of a finite-volume snapshot.
//!
//! A snapshot at time `t` is read in the coordinates `(xi, eta) = (x, y) / t`.
//! Along radial rays the density profile tells a captured shock apart from a
//! smooth passage through the sonic circle `r^2 = c^2(p)`; the angle where the
//! behaviour switches is bracketed from a sweep of rays.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::fv::{FvField, Mapping, MappedGrid};
use crate::gas::GasLaw;

pub const DEFAULT_JUMP_THRESHOLD: f64 = 0.02;
pub const DEFAULT_WINDOW: usize = 3;

/// Density and pressure samples at the cell centers in self-similar coordinates.
#[derive(Debug, Clone)]
pub struct SelfSimField {
    gl: GasLaw,
    grid: Arc<MappedGrid>,
    time: f64,
    xi_eta: Vec<(f64, f64)>,
    rho: Vec<f64>,
    p: Vec<f64>,
}

pub fn to_selfsimilar(gl: &GasLaw, field: &FvField) -> Result<SelfSimField> {
    let t = field.time;
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("self-similar coordinates need t > 0, got {t}"));
    }
    let rho: Vec<f64> = field.q.iter().map(|s| s.rho).collect();
    if let Some(k) = rho.iter().position(|r| !(*r > 0.0)) {
        return Err(Error::State(format!("non-positive density {} in cell {k}", rho[k])));
    }
    let p = rho.iter().map(|&r| gl.pressure_unchecked(r)).collect();
    Ok(SelfSimField {
        gl: *gl,
        xi_eta: scaled_centers(&field.grid, t),
        grid: field.grid.clone(),
        time: t,
        rho,
        p,
    })
}

fn scaled_centers(grid: &MappedGrid, t: f64) -> Vec<(f64, f64)> {
    grid.centers().iter().map(|&(x, y)| (x / t, y / t)).collect()
}

impl SelfSimField {
    /// A field given by its pressure at the cell centers (density follows
    /// from the gas law). Useful for closed-form solutions.
    pub fn from_pressure(gl: &GasLaw, grid: Arc<MappedGrid>, time: f64, p: Vec<f64>) -> Result<Self> {
        if !(time > 0.0 && time.is_finite()) {
            return domain(format!("self-similar coordinates need t > 0, got {time}"));
        }
        if p.len() != grid.len() {
            return Err(Error::Config(format!("{} pressures for {} cells", p.len(), grid.len())));
        }
        let rho = p
            .iter()
            .map(|&v| {
                if v > 0.0 {
                    Ok(v.powf(1.0 / gl.gamma()))
                } else {
                    domain(format!("pressure must be positive, got {v}"))
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            gl: *gl,
            xi_eta: scaled_centers(&grid, time),
            grid,
            time,
            rho,
            p,
        })
    }

    pub fn grid(&self) -> &MappedGrid {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn gas(&self) -> &GasLaw {
        &self.gl
    }

    pub fn xi_eta(&self, i: usize, j: usize) -> (f64, f64) {
        self.xi_eta[self.grid.index(i, j)]
    }

    pub fn r(&self, i: usize, j: usize) -> f64 {
        let (a, b) = self.xi_eta(i, j);
        a.hypot(b)
    }

    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.rho[self.grid.index(i, j)]
    }

    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.p[self.grid.index(i, j)]
    }

    pub fn c2(&self, i: usize, j: usize) -> f64 {
        self.gl.c2_of_p(self.p(i, j))
    }

    /// Sonic indicator `r^2 - c^2(p)`: negative inside the subsonic zone.
    pub fn u(&self, i: usize, j: usize) -> f64 {
        let r = self.r(i, j);
        r * r - self.c2(i, j)
    }

    /// Bilinear interpolation of the pressure between the cell centers of a
    /// polar grid, at self-similar polar coordinates `(r, theta)`.
    pub fn pressure_at(&self, r: f64, theta: f64) -> Result<f64> {
        self.require_polar()?;
        let g = &*self.grid;
        let b = g.bounds();
        let (d1, d2) = g.spacing();
        let a1 = (r * self.time - b.lo1) / d1 - 0.5;
        let a2 = (theta - b.lo2) / d2 - 0.5;
        let (n1, n2) = (g.n1() as f64, g.n2() as f64);
        if !(a1 >= -0.5 && a1 <= n1 - 0.5 && a2 >= -0.5 && a2 <= n2 - 0.5) {
            return Err(Error::Extraction(format!("point (r={r}, theta={theta}) is outside the grid")));
        }
        let i0 = (a1.floor().max(0.0) as usize).min(g.n1().saturating_sub(2));
        let j0 = (a2.floor().max(0.0) as usize).min(g.n2().saturating_sub(2));
        let w1 = (a1 - i0 as f64).clamp(0.0, 1.0);
        let w2 = (a2 - j0 as f64).clamp(0.0, 1.0);
        let (i1, j1) = ((i0 + 1).min(g.n1() - 1), (j0 + 1).min(g.n2() - 1));
        let lo = self.p(i0, j0) * (1.0 - w1) + self.p(i1, j0) * w1;
        let hi = self.p(i0, j1) * (1.0 - w1) + self.p(i1, j1) * w1;
        Ok(lo * (1.0 - w2) + hi * w2)
    }

    fn require_polar(&self) -> Result<()> {
        match self.grid.mapping() {
            Mapping::Polar => Ok(()),
            Mapping::Cartesian => domain("radial analysis needs a polar grid"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectionPoint {
    pub r: f64,
    pub rho: f64,
    pub p: f64,
    pub u: f64,
}

/// Samples along one ray, ordered by increasing self-similar radius.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    /// Angle of the grid row actually sampled, radians.
    pub theta: f64,
    pub points: Vec<SectionPoint>,
}

impl CrossSection {
    /// Depth of the deepest density dip: how far a sample falls below the
    /// lower of the maxima on either side of it. Zero for monotone profiles.
    pub fn dip_depth(&self) -> f64 {
        let n = self.points.len();
        if n < 3 {
            return 0.0;
        }
        let mut right = vec![f64::NEG_INFINITY; n + 1];
        for k in (0..n).rev() {
            right[k] = right[k + 1].max(self.points[k].rho);
        }
        let mut left = f64::NEG_INFINITY;
        let mut depth = 0.0f64;
        for k in 0..n {
            let rho = self.points[k].rho;
            depth = depth.max(left.min(right[k + 1]) - rho);
            left = left.max(rho);
        }
        depth
    }
}

/// The grid row nearest to `theta` (radians), as a radial profile.
pub fn radial_cross_section(field: &SelfSimField, theta: f64) -> Result<CrossSection> {
    field.require_polar()?;
    let g = field.grid();
    let j = match g.row_of(theta) {
        Some(j) => j,
        None => {
            let b = g.bounds();
            return domain(format!("angle {theta} outside [{}, {}]", b.lo2, b.hi2));
        }
    };
    let points = (0..g.n1())
        .map(|i| SectionPoint {
            r: field.r(i, j),
            rho: field.rho(i, j),
            p: field.p(i, j),
            u: field.u(i, j),
        })
        .collect();
    Ok(CrossSection {
        theta: g.comp_center(0, j).1,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Transition {
    Shock,
    SmoothSonic,
    Unclassified,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transition::Shock => "SHOCK",
            Transition::SmoothSonic => "SMOOTH_SONIC",
            Transition::Unclassified => "UNCLASSIFIED",
        })
    }
}

impl std::str::FromStr for Transition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SHOCK" => Ok(Transition::Shock),
            "SMOOTH_SONIC" => Ok(Transition::SmoothSonic),
            "UNCLASSIFIED" => Ok(Transition::Unclassified),
            _ => Err(Error::Parse(format!("unknown transition class {s:?}"))),
        }
    }
}

/// Shock if the density spread inside some run of `window` consecutive
/// samples exceeds `jump_threshold`; otherwise smooth-sonic if `u` changes
/// sign. The radius is the steepest step of the strongest window, or the
/// interpolated zero of `u`.
pub fn classify_angle(cs: &CrossSection, jump_threshold: f64, window: usize) -> (Transition, Option<f64>) {
    let pts = &cs.points;
    if window < 2 || pts.len() < 2 * window {
        return (Transition::Unclassified, None);
    }
    let mut strongest: Option<(f64, usize)> = None;
    for k in 0..=pts.len() - window {
        let w = &pts[k..k + window];
        let (lo, hi) = w
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), q| (a.min(q.rho), b.max(q.rho)));
        let spread = hi - lo;
        if spread > jump_threshold && strongest.map_or(true, |(s, _)| spread > s) {
            strongest = Some((spread, k));
        }
    }
    if let Some((_, k)) = strongest {
        let step = (k..k + window - 1)
            .max_by(|&a, &b| {
                let da = (pts[a + 1].rho - pts[a].rho).abs();
                let db = (pts[b + 1].rho - pts[b].rho).abs();
                da.total_cmp(&db)
            })
            .unwrap_or(k);
        return (Transition::Shock, Some(0.5 * (pts[step].r + pts[step + 1].r)));
    }
    for k in 0..pts.len() - 1 {
        let (a, b) = (&pts[k], &pts[k + 1]);
        if a.u == 0.0 || (a.u < 0.0) != (b.u < 0.0) {
            if (b.rho - a.rho).abs() < jump_threshold {
                let r = if a.u == b.u { a.r } else { a.r + (b.r - a.r) * a.u / (a.u - b.u) };
                return (Transition::SmoothSonic, Some(r));
            }
        }
    }
    (Transition::Unclassified, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleClass {
    pub theta_deg: f64,
    pub class: Transition,
    pub transition_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SonicShockReport {
    pub angles: Vec<AngleClass>,
    /// Bracket of the switch from shock to smooth-sonic, degrees.
    pub theta3_interval: Option<(f64, f64)>,
}

/// Classifies the rays at `angles_deg` and brackets the switch angle when one exists.
pub fn scan_angles(field: &SelfSimField, angles_deg: &[f64], jump_threshold: f64, window: usize) -> Result<SonicShockReport> {
    let angles = angles_deg
        .iter()
        .map(|&deg| {
            let cs = radial_cross_section(field, deg.to_radians())?;
            let (class, transition_r) = classify_angle(&cs, jump_threshold, window);
            Ok(AngleClass {
                theta_deg: deg,
                class,
                transition_r,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let theta3_interval = estimate_theta3(&angles).ok();
    Ok(SonicShockReport { angles, theta3_interval })
}

/// `(last shock angle, first smooth-sonic angle after it)` scanning upward.
pub fn estimate_theta3(angles: &[AngleClass]) -> Result<(f64, f64)> {
    if angles.windows(2).any(|w| !(w[1].theta_deg > w[0].theta_deg)) {
        return Err(Error::Analysis("angles must be strictly increasing".into()));
    }
    let last_shock = angles
        .iter()
        .rposition(|a| a.class == Transition::Shock)
        .ok_or_else(|| Error::Analysis("no shock ray found".into()))?;
    let smooth = angles[last_shock + 1..]
        .iter()
        .find(|a| a.class == Transition::SmoothSonic)
        .ok_or_else(|| Error::Analysis("no smooth-sonic ray above the last shock ray".into()))?;
    Ok((angles[last_shock].theta_deg, smooth.theta_deg))
}

/// Angles `lo, lo + step, ...` up to `hi` inclusive, degrees.
pub fn angle_sweep(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| lo + k as f64 * step).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    /// Mean absolute residual over the evaluated cells.
    pub l1: f64,
    pub linf: f64,
    pub cells: usize,
}

/// Cells at least `margin` cells from every grid edge and, when
/// `jump_threshold` is given, not within `margin` cells of a density step
/// larger than it.
pub fn interior_mask(field: &SelfSimField, margin: usize, jump_threshold: Option<f64>) -> Vec<bool> {
    let g = field.grid();
    let (n1, n2) = (g.n1(), g.n2());
    let mut mask = vec![false; g.len()];
    for j in margin..n2.saturating_sub(margin) {
        for i in margin..n1.saturating_sub(margin) {
            mask[g.index(i, j)] = true;
        }
    }
    if let Some(th) = jump_threshold {
        let mut rough = vec![false; g.len()];
        for j in 0..n2 {
            for i in 0..n1 {
                let here = field.rho(i, j);
                let steep = (i + 1 < n1 && (field.rho(i + 1, j) - here).abs() > th)
                    || (j + 1 < n2 && (field.rho(i, j + 1) - here).abs() > th);
                rough[g.index(i, j)] = steep;
            }
        }
        for j in 0..n2 {
            for i in 0..n1 {
                if !rough[g.index(i, j)] {
                    continue;
                }
                for jj in j.saturating_sub(margin)..(j + margin + 2).min(n2) {
                    for ii in i.saturating_sub(margin)..(i + margin + 2).min(n1) {
                        mask[g.index(ii, jj)] = false;
                    }
                }
            }
        }
    }
    mask
}

/// Central-difference residual of the second-order equation for `p` in
/// polar self-similar coordinates:
///
/// ```text
/// r^2 (1 - r^2/c^2) p_rr + p_tt + r (1 - 2 r^2/c^2) p_r + kappa (r^2/c^2) (r^2/p) p_r^2
/// ```
///
/// Cells on the outermost layer are skipped even if masked.
pub fn pnd_residual(field: &SelfSimField, mask: &[bool]) -> Result<Residual> {
    field.require_polar()?;
    let g = field.grid();
    if mask.len() != g.len() {
        return Err(Error::Config(format!("mask has {} entries for {} cells", mask.len(), g.len())));
    }
    let (n1, n2) = (g.n1(), g.n2());
    let (d1, d2) = g.spacing();
    let dr = d1 / field.time();
    let kappa = field.gas().kappa();
    let (mut sum, mut max, mut cells) = (0.0, 0.0f64, 0usize);
    for j in 1..n2.saturating_sub(1) {
        for i in 1..n1.saturating_sub(1) {
            if !mask[g.index(i, j)] {
                continue;
            }
            let r = g.comp_center(i, j).0 / field.time();
            let p = field.p(i, j);
            let (pw, pe) = (field.p(i - 1, j), field.p(i + 1, j));
            let (ps, pn) = (field.p(i, j - 1), field.p(i, j + 1));
            let p_r = (pe - pw) / (2.0 * dr);
            let p_rr = (pe - 2.0 * p + pw) / (dr * dr);
            let p_tt = (pn - 2.0 * p + ps) / (d2 * d2);
            let q = r * r / field.gas().c2_of_p(p);
            let res = r * r * (1.0 - q) * p_rr + p_tt + r * (1.0 - 2.0 * q) * p_r + kappa * q * (r * r / p) * p_r * p_r;
            sum += res.abs();
            max = max.max(res.abs());
            cells += 1;
        }
    }
    if cells == 0 {
        return domain("residual mask selects no interior cell");
    }
    Ok(Residual {
        l1: sum / cells as f64,
        linf: max,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fv::Bounds;
    use crate::gas::{four_quadrant_states, State};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn gl3() -> GasLaw {
        GasLaw::new(3.0).unwrap()
    }

    fn sector(nr: usize, nt: usize) -> Arc<MappedGrid> {
        Arc::new(MappedGrid::polar(nr, nt, Bounds::annulus(0.01, 1.0, 0.0, 1.5 * PI)).unwrap())
    }

    fn constant(rho: f64, t: f64) -> FvField {
        let mut f = FvField::constant(sector(40, 54), State::new(rho, 0.0, 0.0));
        f.time = t;
        f
    }

    #[test]
    fn unit_time_keeps_coordinates() {
        let f = constant(0.5, 1.0);
        let s = to_selfsimilar(&gl3(), &f).unwrap();
        for (k, &(x, y)) in f.grid.centers().iter().enumerate() {
            assert_eq!(s.xi_eta[k], (x, y));
        }
    }

    #[test]
    fn bilinear_pressure_is_exact_for_bilinear_data() {
        let g = sector(30, 40);
        let (d1, d2) = g.spacing();
        let f = |r: f64, th: f64| 0.1 + 0.02 * r + 0.01 * th + 0.005 * r * th;
        let p = (0..g.n2())
            .flat_map(|j| (0..g.n1()).map(move |i| (i, j)))
            .map(|(i, j)| f(0.01 + (i as f64 + 0.5) * d1, (j as f64 + 0.5) * d2))
            .collect();
        let s = SelfSimField::from_pressure(&gl3(), g, 0.5, p).unwrap();
        for (r, th) in [(0.3, 1.0), (1.2, 2.5), (1.9, 4.0)] {
            assert!((s.pressure_at(r, th).unwrap() - f(r * 0.5, th)).abs() < 1e-14);
        }
        assert!(matches!(s.pressure_at(2.5, 1.0), Err(Error::Extraction(_))));
    }

    #[test]
    fn zero_time_is_rejected() {
        assert!(matches!(to_selfsimilar(&gl3(), &constant(0.5, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn half_time_doubles_coordinates() {
        let a = to_selfsimilar(&gl3(), &constant(0.5, 1.0)).unwrap();
        let b = to_selfsimilar(&gl3(), &constant(0.5, 0.5)).unwrap();
        let (x, y) = a.xi_eta(7, 9);
        assert_eq!(b.xi_eta(7, 9), (2.0 * x, 2.0 * y));
    }

    #[test]
    fn radius_matches_coordinates() {
        let s = to_selfsimilar(&gl3(), &constant(0.5, 0.7)).unwrap();
        let g = s.grid();
        for j in 0..g.n2() {
            for i in 0..g.n1() {
                let (a, b) = s.xi_eta(i, j);
                assert!((a * a + b * b - s.r(i, j).powi(2)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sonic_indicator_of_constant_state() {
        let s = to_selfsimilar(&gl3(), &constant(0.5, 1.0)).unwrap();
        let cs = radial_cross_section(&s, 0.3).unwrap();
        for q in &cs.points {
            assert!((q.u - (q.r * q.r - 0.75)).abs() < 1e-14);
        }
        let (class, r) = classify_angle(&cs, 0.02, 3);
        assert_eq!(class, Transition::SmoothSonic);
        assert!((r.unwrap() - 0.8660254).abs() < 2e-4);
    }

    #[test]
    fn cross_sections_of_initial_data() {
        let gl = gl3();
        let qd = four_quadrant_states(&gl, 0.5, 0.25).unwrap();
        let mut f = FvField::initial(sector(40, 54), &gl, &qd);
        f.time = 1e-9;
        let s = to_selfsimilar(&gl, &f).unwrap();
        // the first row lies just above the x-axis, inside quadrant 1
        let cs = radial_cross_section(&s, 0.0).unwrap();
        assert!(cs.points.iter().all(|q| q.rho == 0.5));
        assert!(cs.points.windows(2).all(|w| w[1].r > w[0].r));
        let cs = radial_cross_section(&s, PI / 4.0).unwrap();
        assert!(cs.points.iter().all(|q| q.rho == 0.5));
        assert!(radial_cross_section(&s, 5.0).is_err());
        let sweep = angle_sweep(0.0, 90.0, 10.0);
        assert_eq!(sweep.len(), 10);
        for deg in sweep {
            radial_cross_section(&s, deg.to_radians()).unwrap();
        }
    }

    fn synthetic(profile: impl Fn(f64) -> f64, c2: f64) -> CrossSection {
        let points = (0..100)
            .map(|k| {
                let r = 0.01 + 0.01 * k as f64;
                SectionPoint {
                    r,
                    rho: profile(r),
                    p: 0.0,
                    u: r * r - c2,
                }
            })
            .collect();
        CrossSection { theta: 0.2, points }
    }

    #[test]
    fn step_profile_is_a_shock() {
        let cs = synthetic(|r| if r < 0.505 { 0.35 } else { 0.25 }, 0.2);
        let (class, r) = classify_angle(&cs, 0.05, 3);
        assert_eq!(class, Transition::Shock);
        assert!((r.unwrap() - 0.505).abs() < 1e-12);
    }

    #[test]
    fn smooth_ramp_is_sonic() {
        let cs = synthetic(|r| 0.5 - 0.2 * r, 0.25);
        let (class, r) = classify_angle(&cs, 0.05, 3);
        assert_eq!(class, Transition::SmoothSonic);
        assert!((r.unwrap() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn short_profile_is_unclassified() {
        let mut cs = synthetic(|_| 0.3, 0.1);
        cs.points.truncate(5);
        assert_eq!(classify_angle(&cs, 0.02, 3), (Transition::Unclassified, None));
    }

    #[test]
    fn dip_depth_of_profiles() {
        assert_eq!(synthetic(|r| 0.5 - 0.2 * r, 0.25).dip_depth(), 0.0);
        let cs = synthetic(|r| if (0.3..0.35).contains(&r) { 0.4 } else { 0.5 }, 0.25);
        assert!((cs.dip_depth() - 0.1).abs() < 1e-12);
    }

    fn entry(theta_deg: f64, class: Transition) -> AngleClass {
        AngleClass {
            theta_deg,
            class,
            transition_r: None,
        }
    }

    #[test]
    fn theta3_bracket() {
        use Transition::*;
        let classes = [Shock, Shock, Unclassified, Shock, SmoothSonic, SmoothSonic];
        let a: Vec<_> = classes.iter().enumerate().map(|(k, &c)| entry(10.0 * k as f64, c)).collect();
        assert_eq!(estimate_theta3(&a).unwrap(), (30.0, 40.0));
        let all: Vec<_> = (0..5).map(|k| entry(k as f64, Shock)).collect();
        assert!(matches!(estimate_theta3(&all), Err(Error::Analysis(_))));
        let unsorted = vec![entry(5.0, Shock), entry(1.0, SmoothSonic)];
        assert!(estimate_theta3(&unsorted).is_err());
    }

    fn simple_wave_field(n: usize) -> SelfSimField {
        let gl = gl3();
        let b = Bounds::annulus(0.5, 0.9, 40f64.to_radians(), 80f64.to_radians());
        let grid = Arc::new(MappedGrid::polar(n, n, b).unwrap());
        let p = (0..grid.len())
            .map(|k| {
                let (r, th) = grid.comp_center(k % n, k / n);
                let eta = r * th.sin();
                gl.p_of_c2(eta * eta)
            })
            .collect();
        SelfSimField::from_pressure(&gl, grid, 1.0, p).unwrap()
    }

    #[test]
    fn simple_wave_residual_is_second_order() {
        let res = |n: usize| {
            let f = simple_wave_field(n);
            pnd_residual(&f, &interior_mask(&f, 3, None)).unwrap().linf
        };
        let (a, b) = (res(40), res(80));
        assert!(a / b >= 3.5, "{a} {b}");
    }

    #[test]
    fn constant_pressure_residual_vanishes() {
        let gl = gl3();
        let grid = sector(20, 30);
        let f = SelfSimField::from_pressure(&gl, grid.clone(), 1.0, vec![0.05; grid.len()]).unwrap();
        let r = pnd_residual(&f, &interior_mask(&f, 3, None)).unwrap();
        assert_eq!((r.l1, r.linf), (0.0, 0.0));
        assert!(r.cells > 0);
        assert!(pnd_residual(&f, &vec![false; grid.len()]).is_err());
    }

    #[test]
    fn shock_cells_leave_the_mask() {
        let gl = gl3();
        let grid = sector(20, 30);
        let p = (0..grid.len()).map(|k| if k % 20 < 10 { 0.1 } else { 0.02 }).collect();
        let f = SelfSimField::from_pressure(&gl, grid, 1.0, p).unwrap();
        let m = interior_mask(&f, 3, Some(0.02));
        let g = f.grid();
        assert!(!m[g.index(9, 10)] && !m[g.index(12, 10)]);
        assert!(m[g.index(5, 10)] && m[g.index(15, 10)]);
    }

    proptest! {
        #[test]
        fn raising_threshold_never_creates_shocks(
            rhos in proptest::collection::vec(0.2f64..0.6, 12..40),
            t1 in 0.001f64..0.2,
            dt in 0.0f64..0.2,
        ) {
            let points = rhos.iter().enumerate().map(|(k, &rho)| {
                let r = 0.1 + 0.02 * k as f64;
                SectionPoint { r, rho, p: 0.0, u: r * r - 0.1 }
            }).collect();
            let cs = CrossSection { theta: 0.0, points };
            let (lo, _) = classify_angle(&cs, t1, 3);
            let (hi, _) = classify_angle(&cs, t1 + dt, 3);
            prop_assert!(!(lo == Transition::SmoothSonic && hi == Transition::Shock));
            if lo != Transition::Shock {
                prop_assert_ne!(hi, Transition::Shock);
            }
        }

        #[test]
        fn time_scaling_is_consistent(t in 0.05f64..3.0) {
            let a = to_selfsimilar(&gl3(), &constant(0.4, t)).unwrap();
            let b = to_selfsimilar(&gl3(), &constant(0.4, 1.0)).unwrap();
            let (x, y) = a.xi_eta(11, 17);
            let (u, v) = b.xi_eta(11, 17);
            prop_assert!((x * t - u).abs() < 1e-14 && (y * t - v).abs() < 1e-14);
        }
    }
}

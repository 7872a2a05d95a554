//! Method of characteristics for the transient region.
//!
//! The region is bounded by the plus characteristic `Gamma12` (the edge of
//! the rarefaction region, where everything is known in closed form) and the
//! minus characteristic `Gamma23` leaving `Xi2`. Node `(i, j)` of the mesh sits
//! on the minus characteristic through the `i`-th node of `Gamma12` and the
//! plus characteristic through the `j`-th node of `Gamma23`. `R` is carried
//! along minus characteristics, `S` along plus characteristics, and the march
//! stops on each line once `t = sqrt(r^2 - c^2)` falls below a cut.

use serde::Serialize;

use crate::chars::{self, Family};
use crate::error::{domain, Error, Result};
use crate::gas::{GasLaw, QuadrantData, SpeedRatioClass};
use crate::selfsim::SelfSimField;

pub const DEFAULT_T_CUT: f64 = 1e-4;
pub const DEFAULT_MESH_N: usize = 200;
const PICARD_TOL: f64 = 1e-12;
const PICARD_MAX: usize = 20;
/// Non-converged nodes whose iterates came within this many `t_cut` (or one
/// mesh spacing) of the sonic locus are flagged sonic.
const SONIC_SOLVE_FACTOR: f64 = 10.0;
/// Slack on the pressure bounds before a node counts as a breach.
pub const P_BOUND_TOL: f64 = 1e-8;
/// Slack on the discrete angular pressure derivative.
pub const P_THETA_TOL: f64 = 1e-10;

/// A sample of boundary data on one of the two characteristic arcs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcNode {
    pub theta: f64,
    pub r: f64,
    /// `dr/dtheta` along the arc.
    pub dr: f64,
    pub p: f64,
    /// Derivative of `p` along plus characteristics.
    pub r_dir: f64,
    /// Derivative of `p` along minus characteristics.
    pub s_dir: f64,
}

/// Goursat data: both arcs start at `Xi2` and are ordered by increasing angle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryData {
    pub gamma12: Vec<ArcNode>,
    pub gamma23: Vec<ArcNode>,
    /// Terminal angle of `Gamma23`.
    pub theta3: f64,
}

fn uniform_angles(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![lo];
    }
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

/// `Gamma12` with `n + 1` nodes from `Xi2` to `Xi1`, from the rarefaction region.
pub fn gamma12_arc(gl: &GasLaw, qd: &QuadrantData, n: usize) -> Result<Vec<ArcNode>> {
    uniform_angles(qd.theta2(), std::f64::consts::FRAC_PI_2, n)
        .into_iter()
        .map(|theta| {
            let r = chars::gamma12(qd, theta)?;
            let (p, r_dir, s_dir) = chars::r0_exact(gl, qd, crate::gas::PolarPoint { r, theta })?;
            Ok(ArcNode {
                theta,
                r,
                dr: qd.c1 * theta.cos(),
                p,
                r_dir,
                s_dir,
            })
        })
        .collect()
}

/// The minus characteristic `eta = c4` of the rarefaction region, from `Xi2` up to `theta_end`.
pub fn rarefaction_minus_arc(gl: &GasLaw, qd: &QuadrantData, n: usize, theta_end: f64) -> Result<Vec<ArcNode>> {
    uniform_angles(qd.theta2(), theta_end, n)
        .into_iter()
        .map(|theta| {
            let s = theta.sin();
            let r = qd.c4 / s;
            let (p, r_dir, s_dir) = chars::r0_exact(gl, qd, crate::gas::PolarPoint { r, theta })?;
            Ok(ArcNode {
                theta,
                r,
                dr: -qd.c4 * theta.cos() / (s * s),
                p,
                r_dir,
                s_dir,
            })
        })
        .collect()
}

impl BoundaryData {
    /// A Goursat problem whose solution is the rarefaction region itself: both
    /// arcs are characteristics of the closed-form solution.
    pub fn manufactured(gl: &GasLaw, qd: &QuadrantData, n: usize) -> Result<Self> {
        let end = std::f64::consts::FRAC_PI_2;
        Ok(Self {
            gamma12: gamma12_arc(gl, qd, n)?,
            gamma23: rarefaction_minus_arc(gl, qd, n, end)?,
            theta3: end,
        })
    }

    /// Both arcs collapsed onto `Xi2`.
    pub fn degenerate(gl: &GasLaw, qd: &QuadrantData) -> Result<Self> {
        let node = gamma12_arc(gl, qd, 0)?.remove(0);
        Ok(Self {
            gamma12: vec![node],
            gamma23: vec![node],
            theta3: qd.theta2(),
        })
    }
}

/// `R` at `Xi2`: the rarefaction-region value at `r2 = sqrt(c1 c4)`, `theta2`.
pub fn r_at_xi2(gl: &GasLaw, qd: &QuadrantData) -> f64 {
    let k = gl.kappa();
    let th = qd.theta2();
    let r2 = (qd.c1 * qd.c4).sqrt();
    4.0 / (k * gl.gamma().powf(1.0 / k)) * th.cos() * th.sin().powf(2.0 / k - 1.0) * r2.powf(2.0 / k)
}

/// Segment mean of `h = K / t^2` with `K = r^2 (c^2)' / (4 c^2)` and
/// `t^2 = r^2 - c^2`: the mean of `K` over `t0 t1`. This integrates the `1/t^2`
/// singularity exactly when `t` varies linearly, and is second order otherwise.
/// Infinite when either end is sonic.
fn h_mean(gl: &GasLaw, r0: f64, p0: f64, r1: f64, p1: f64) -> f64 {
    let k = |r: f64, p: f64| {
        let c2 = gl.c2_of_p(p);
        (r * r * gl.dc2_dp(p) / (4.0 * c2), (r * r - c2).max(0.0).sqrt())
    };
    let (k0, t0) = k(r0, p0);
    let (k1, t1) = k(r1, p1);
    let tt = t0 * t1;
    if tt > 0.0 {
        0.5 * (k0 + k1) / tt
    } else {
        f64::INFINITY
    }
}

/// `(1 - e^{-x}) / x`, continuous at 0.
fn phi1(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - 0.5 * x
    } else {
        -(-x).exp_m1() / x
    }
}

/// One step of `dy/dtheta = h (a - y) y` with `hi` the integral of `h` over
/// the step and `a` going linearly from `a0` to `a1`. In `z = 1/y` the
/// equation is linear, `dz/dH = 1 - a z` with `dH = h dtheta`; the rate is
/// frozen at the mean of `a`. Once the rate is large the variable is relaxing
/// towards `1/a`, and the step is taken on the deviation from that target so
/// that an infinite `hi` (a sonic endpoint) returns `y = a1`.
fn transport(y0: f64, a0: f64, a1: f64, hi: f64) -> f64 {
    if y0 == 0.0 {
        return 0.0;
    }
    let am = 0.5 * (a0 + a1);
    let x = am * hi;
    let z0 = 1.0 / y0;
    if a0 * a1 > 0.0 && x > 1.0 {
        if !hi.is_finite() {
            return a1;
        }
        let (q0, q1) = (1.0 / a0, 1.0 / a1);
        let z1 = q1 + (z0 - q0) * (-x).exp() - (q1 - q0) * phi1(x);
        return 1.0 / z1;
    }
    if !hi.is_finite() {
        return 0.0;
    }
    1.0 / (z0 * (-x).exp() + hi * phi1(x))
}

/// Integrates `dR/dtheta = h (S - R) R` along a minus arc from its first value.
pub fn integrate_r_along_minus(gl: &GasLaw, arc: &mut [ArcNode]) {
    for k in 1..arc.len() {
        let (a, b) = (arc[k - 1], arc[k]);
        let hm = h_mean(gl, a.r, a.p, b.r, b.p);
        arc[k].r_dir = transport(a.r_dir, a.s_dir, b.s_dir, hm * (b.theta - a.theta));
    }
}

/// Local least-squares quadratic through the samples within `half_width`
/// of each abscissa: smoothed values and slopes.
pub fn local_quadratic(xs: &[f64], ys: &[f64], half_width: f64) -> Result<Vec<(f64, f64)>> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return domain("local fit needs at least 3 matching samples");
    }
    let n = xs.len();
    let mut out = Vec::with_capacity(n);
    let mut lo = 0;
    for k in 0..n {
        while xs[k] - xs[lo] > half_width {
            lo += 1;
        }
        let mut hi = k;
        while hi + 1 < n && xs[hi + 1] - xs[k] <= half_width {
            hi += 1;
        }
        // widen to at least 5 points
        let (mut a, mut b) = (lo, hi);
        while b - a < 4 && (a > 0 || b + 1 < n) {
            if a > 0 {
                a -= 1;
            }
            if b - a < 4 && b + 1 < n {
                b += 1;
            }
        }
        let mut m = [[0.0; 3]; 3];
        let mut v = [0.0; 3];
        for q in a..=b {
            let x = xs[q] - xs[k];
            let w = 1.0 - (x / (half_width.max(xs[b] - xs[a]) * 1.01)).powi(2);
            let basis = [1.0, x, x * x];
            for r in 0..3 {
                v[r] += w * basis[r] * ys[q];
                for c in 0..3 {
                    m[r][c] += w * basis[r] * basis[c];
                }
            }
        }
        let sol = solve_n(m, v).ok_or_else(|| Error::Analysis("singular local fit".into()))?;
        out.push((sol[0], sol[1]));
    }
    Ok(out)
}

fn solve_n<const N: usize>(mut m: [[f64; N]; N], mut v: [f64; N]) -> Option<[f64; N]> {
    for c in 0..N {
        let piv = (c..N).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[piv][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, piv);
        v.swap(c, piv);
        for r in c + 1..N {
            let f = m[r][c] / m[c][c];
            for q in c..N {
                m[r][q] -= f * m[c][q];
            }
            v[r] -= f * v[c];
        }
    }
    let mut x = [0.0; N];
    for r in (0..N).rev() {
        let s: f64 = (r + 1..N).map(|q| m[r][q] * x[q]).sum();
        x[r] = (v[r] - s) / m[r][r];
    }
    Some(x)
}

/// Builds `Gamma23` data from a table of `f` (radius) and `g` (pressure) on
/// uniformly spaced angles from `theta2`. `R` follows from its transport
/// along the arc, starting from the rarefaction value at `Xi2`.
pub fn gamma23_from_table(gl: &GasLaw, qd: &QuadrantData, thetas: &[f64], f: &[f64], g: &[f64]) -> Result<BoundaryData> {
    if thetas.len() != f.len() || f.len() != g.len() || f.len() < 4 {
        return domain("Gamma23 table needs at least 4 rows of matching length");
    }
    let df = chars::curve_derivatives(thetas, f)?;
    let dg = chars::curve_derivatives(thetas, g)?;
    let mut arc: Vec<ArcNode> = (0..f.len())
        .map(|k| ArcNode {
            theta: thetas[k],
            r: f[k],
            dr: df[k].0,
            p: g[k],
            r_dir: 0.0,
            s_dir: dg[k].0,
        })
        .collect();
    arc[0].r_dir = r_at_xi2(gl, qd);
    integrate_r_along_minus(gl, &mut arc);
    let n = arc.len() - 1;
    Ok(BoundaryData {
        gamma12: gamma12_arc(gl, qd, n)?,
        theta3: arc[n].theta,
        gamma23: arc,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    /// Samples on each arc (plus one).
    pub samples: usize,
    /// The trace stops once `sqrt(r^2 - c^2)` drops below this.
    pub t_stop: f64,
    /// Half width of the smoothing window for `g` and its slope, in units of
    /// the angular cell size of the field.
    pub smoothing_cells: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            samples: 400,
            t_stop: 1e-3,
            smoothing_cells: 1.0,
        }
    }
}

/// Traces `Gamma23` from `Xi2` through the bilinear pressure of a
/// self-similar field and samples `g`, its slope and `R` along it.
pub fn gamma23_from_field(field: &SelfSimField, qd: &QuadrantData, opt: &ExtractOptions) -> Result<BoundaryData> {
    let gl = *field.gas();
    let p_eval = |r: f64, th: f64| field.pressure_at(r, th);
    let copt = chars::CharOptions {
        t_cut: opt.t_stop,
        ..Default::default()
    };
    let trace = chars::integrate_char(&gl, p_eval, qd.xi2, Family::Minus, std::f64::consts::FRAC_PI_2, &copt)
        .map_err(|e| Error::Extraction(format!("Gamma23 trace failed: {e}")))?;
    if trace.stop != chars::CharStop::Sonic {
        return Err(Error::Extraction(format!(
            "Gamma23 trace ended with {:?} at theta = {} before turning sonic",
            trace.stop,
            trace.last().theta
        )));
    }
    let s = &trace.samples;
    if s.len() < 4 {
        return Err(Error::Extraction("Gamma23 trace is too short".into()));
    }
    let n = opt.samples.max(4);
    let thetas = uniform_angles(s[0].theta, s[s.len() - 1].theta, n);
    let mut k = 0;
    let mut rs = Vec::with_capacity(n + 1);
    for &th in &thetas {
        while k + 2 < s.len() && s[k + 1].theta < th {
            k += 1;
        }
        let w = ((th - s[k].theta) / (s[k + 1].theta - s[k].theta)).clamp(0.0, 1.0);
        rs.push(s[k].r + w * (s[k + 1].r - s[k].r));
    }
    let raw: Vec<f64> = rs
        .iter()
        .zip(&thetas)
        .map(|(&r, &th)| field.pressure_at(r, th))
        .collect::<Result<_>>()?;
    let half = opt.smoothing_cells * field.grid().spacing().1;
    let fit = local_quadratic(&thetas, &raw, half)?;
    let g: Vec<f64> = fit.iter().map(|v| v.0).collect();
    let df = chars::curve_derivatives(&thetas, &rs)?;
    let mut arc: Vec<ArcNode> = (0..=n)
        .map(|k| ArcNode {
            theta: thetas[k],
            r: rs[k],
            dr: df[k].0,
            p: g[k],
            r_dir: 0.0,
            s_dir: fit[k].1,
        })
        .collect();
    arc[0].r_dir = r_at_xi2(&gl, qd);
    integrate_r_along_minus(&gl, &mut arc);
    Ok(BoundaryData {
        gamma12: gamma12_arc(&gl, qd, n)?,
        theta3: arc[n].theta,
        gamma23: arc,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Hard checks reject the data; soft ones only warn.
    pub hard: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.hard)
    }

    pub fn failures(&self) -> Vec<&ValidationCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn check(&self, name: &str) -> Option<&ValidationCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks `Gamma23` data against the admissibility conditions. Quantities
/// are compared relative to their natural scale: `p1 - p4` for pressure,
/// the largest value on the arc for `lambda`, `R` and `S`.
pub fn validate_boundary_data(gl: &GasLaw, qd: &QuadrantData, bd: &BoundaryData, tol: f64) -> Result<ValidationReport> {
    let arc = &bd.gamma23;
    if arc.len() < 32 {
        return domain(format!("validation needs at least 32 samples on Gamma23, got {}", arc.len()));
    }
    let mut checks = Vec::new();
    let mut push = |name, hard, value: f64, tolerance: f64, detail: String| {
        checks.push(ValidationCheck {
            name,
            passed: value <= tolerance,
            hard,
            value,
            tolerance,
            detail,
        })
    };
    let n = arc.len() - 1;
    let lam: Vec<f64> = arc
        .iter()
        .map(|a| chars::lambda_speed(gl, a.r, a.p).unwrap_or(f64::NAN))
        .collect();
    let lam_max = lam.iter().copied().fold(0.0, f64::max).max(1e-300);
    let slope_err = arc.iter().zip(&lam).map(|(a, l)| (a.dr + l).abs()).fold(0.0, f64::max);
    push(
        "gamma23_slope",
        true,
        slope_err / lam_max,
        tol,
        "max |f' + lambda(f, g)| over the largest lambda".into(),
    );
    let rising = arc.iter().map(|a| a.dr).fold(f64::NEG_INFINITY, f64::max);
    push(
        "gamma23_decreasing",
        true,
        rising.max(0.0) / lam_max,
        tol,
        "largest positive f' over the largest lambda".into(),
    );
    let r2 = (qd.c1 * qd.c4).sqrt();
    push("r2", true, (arc[0].r - r2).abs() / r2, tol, format!("f(theta2) = {} vs {r2}", arc[0].r));
    let dp = qd.p1 - qd.p4;
    push("g_at_xi2", true, (arc[0].p - qd.p4).abs() / dp, tol, format!("g(Xi2) = {} vs p4 = {}", arc[0].p, qd.p4));
    let s_max = arc.iter().map(|a| a.s_dir).fold(0.0, f64::max).max(1e-300);
    push("s_at_xi2", true, arc[0].s_dir.abs() / s_max, tol, format!("S(Xi2) = {}", arc[0].s_dir));
    let s_min = arc[1..n].iter().map(|a| a.s_dir).fold(f64::INFINITY, f64::min);
    checks.push(ValidationCheck {
        name: "s_positive",
        passed: s_min > 0.0,
        hard: true,
        value: s_min,
        tolerance: 0.0,
        detail: "smallest interior S on Gamma23 must be positive".into(),
    });
    let rx = r_at_xi2(gl, qd);
    let mut push = |name, hard, value: f64, tolerance: f64, detail: String| {
        checks.push(ValidationCheck {
            name,
            passed: value <= tolerance,
            hard,
            value,
            tolerance,
            detail,
        })
    };
    push("r_at_xi2", true, (arc[0].r_dir - rx).abs() / rx, tol, format!("R(Xi2) = {} vs {rx}", arc[0].r_dir));
    // exponential form with the stored values in the integrand
    let r_max = arc.iter().map(|a| a.r_dir).fold(0.0, f64::max).max(1e-300);
    let mut integral = 0.0;
    let mut worst: f64 = 0.0;
    for k in 1..=n {
        let (a, b) = (&arc[k - 1], &arc[k]);
        let hm = h_mean(gl, a.r, a.p, b.r, b.p);
        if !hm.is_finite() {
            break;
        }
        integral += 0.5 * (b.theta - a.theta) * hm * ((a.s_dir - a.r_dir) + (b.s_dir - b.r_dir));
        worst = worst.max((rx * integral.exp() - b.r_dir).abs());
    }
    push("r23_quadrature", true, worst / r_max, tol, "stored R vs the exponential integral".into());
    let last = |v: &dyn Fn(&ArcNode) -> f64| {
        // linear extrapolation of the last three samples to theta3
        let (a, b, c) = (&arc[n - 2], &arc[n - 1], &arc[n]);
        let slope = (v(c) - v(a)) / (c.theta - a.theta);
        v(b) + slope * (bd.theta3 - b.theta)
    };
    let r_end = last(&|a| a.r_dir).abs() / r_max;
    let s_end = last(&|a| a.s_dir).abs() / s_max;
    push("g1_limit_r", false, r_end, tol, "R at theta3 over max R (extrapolated)".into());
    push("g1_limit_s", false, s_end, tol, "S at theta3 over max S (extrapolated)".into());
    let c4sq = qd.c4 * qd.c4;
    let mut bound = 0.0f64;
    for a in arc {
        let c2 = gl.c2_of_p(a.p);
        let f2 = a.r * a.r;
        bound = bound
            .max((c4sq - c2) / c4sq)
            .max((c2 - f2) / f2)
            .max((f2 - qd.c1 * qd.c4) / (qd.c1 * qd.c4));
    }
    push("fg_bounds", true, bound.max(0.0), tol, "c4^2 < c^2(g) <= f^2 <= c1 c4, worst relative violation".into());
    let boundary = qd.speed_class == SpeedRatioClass::Boundary;
    checks.push(ValidationCheck {
        name: "speed_ratio",
        passed: !boundary,
        hard: false,
        value: 2.0 * qd.c4 - qd.c1,
        tolerance: 0.0,
        detail: format!("2 c4 - c1 = {}; {:?} case", 2.0 * qd.c4 - qd.c1, qd.speed_class),
    });
    Ok(ValidationReport { checks })
}

/// A node of the characteristic mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshNode {
    pub theta: f64,
    pub r: f64,
    pub p: f64,
    pub r_dir: f64,
    pub s_dir: f64,
    /// `sqrt(max(r^2 - c^2, 0))`.
    pub t: f64,
    /// `r^2 - c^2`, negative if the node overshot into the subsonic zone.
    pub u: f64,
    pub sonic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BreachKind {
    RNonPositive,
    SNonPositive,
    PressureBounds,
    PressureDecreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Breach {
    pub i: usize,
    pub j: usize,
    pub kind: BreachKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharMesh {
    /// Nodes along `Gamma12` (index `i`).
    pub n12: usize,
    /// Nodes along `Gamma23` (index `j`).
    pub n23: usize,
    nodes: Vec<Option<MeshNode>>,
    pub breaches: Vec<Breach>,
    pub t_cut: f64,
    /// Largest angular spacing of the boundary arcs.
    pub dtheta: f64,
}

impl CharMesh {
    pub fn get(&self, i: usize, j: usize) -> Option<&MeshNode> {
        if i < self.n12 && j < self.n23 {
            self.nodes[i * self.n23 + j].as_ref()
        } else {
            None
        }
    }

    /// All computed nodes with their indices, `i` major.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &MeshNode)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(move |(k, n)| n.as_ref().map(|n| (k / self.n23, k % self.n23, n)))
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Breaches at interior nodes that are not flagged sonic.
    pub fn hard_breaches(&self) -> Vec<Breach> {
        self.breaches
            .iter()
            .copied()
            .filter(|b| self.get(b.i, b.j).is_some_and(|n| !n.sonic))
            .collect()
    }
}

fn node_from_arc(gl: &GasLaw, a: &ArcNode, t_cut: f64) -> MeshNode {
    let u = a.r * a.r - gl.c2_of_p(a.p);
    let t = u.max(0.0).sqrt();
    MeshNode {
        theta: a.theta,
        r: a.r,
        p: a.p,
        r_dir: a.r_dir,
        s_dir: a.s_dir,
        t,
        u,
        sonic: t < t_cut,
    }
}

/// Linear resampling of an arc onto `n + 1` uniformly spaced angles.
fn resample(arc: &[ArcNode], n: usize) -> Vec<ArcNode> {
    if arc.len() <= 1 || arc.len() == n + 1 {
        return arc.to_vec();
    }
    let (lo, hi) = (arc[0].theta, arc[arc.len() - 1].theta);
    let mut k = 0;
    uniform_angles(lo, hi, n)
        .into_iter()
        .map(|th| {
            while k + 2 < arc.len() && arc[k + 1].theta < th {
                k += 1;
            }
            let (a, b) = (&arc[k], &arc[k + 1]);
            let w = ((th - a.theta) / (b.theta - a.theta)).clamp(0.0, 1.0);
            let mix = |x: f64, y: f64| x + w * (y - x);
            ArcNode {
                theta: th,
                r: mix(a.r, b.r),
                dr: mix(a.dr, b.dr),
                p: mix(a.p, b.p),
                r_dir: mix(a.r_dir, b.r_dir),
                s_dir: mix(a.s_dir, b.s_dir),
            }
        })
        .collect()
}

fn lambda_of(gl: &GasLaw, r: f64, p: f64) -> f64 {
    let c2 = gl.c2_of_p(p);
    r * ((r * r - c2).max(0.0) / c2).sqrt()
}

/// Marches the characteristic mesh between the two arcs, each resampled to
/// `mesh_n + 1` nodes. Nodes where `t < t_cut` are flagged sonic and end
/// their lines.
pub fn goursat_march(gl: &GasLaw, qd: &QuadrantData, bd: &BoundaryData, mesh_n: usize, t_cut: f64) -> Result<CharMesh> {
    if bd.gamma12.is_empty() || bd.gamma23.is_empty() {
        return domain("boundary arcs must hold at least one node");
    }
    if !(t_cut >= 0.0) {
        return domain(format!("t_cut must be non-negative, got {t_cut}"));
    }
    let g12 = resample(&bd.gamma12, mesh_n);
    let g23 = resample(&bd.gamma23, mesh_n);
    let (n12, n23) = (g12.len(), g23.len());
    let spacing = |arc: &[ArcNode]| arc.windows(2).map(|w| w[1].theta - w[0].theta).fold(0.0, f64::max);
    let mut mesh = CharMesh {
        n12,
        n23,
        nodes: vec![None; n12 * n23],
        breaches: Vec::new(),
        t_cut,
        dtheta: spacing(&g12).max(spacing(&g23)),
    };
    let (plo, phi) = (qd.p4 - P_BOUND_TOL, qd.p1 + P_BOUND_TOL);
    // a boundary line is cut at its first sonic node
    for (i, a) in g12.iter().enumerate() {
        let n = node_from_arc(gl, a, t_cut);
        mesh.nodes[i * n23] = Some(n);
        if n.sonic {
            break;
        }
    }
    for (j, a) in g23.iter().enumerate().skip(1) {
        let n = node_from_arc(gl, a, t_cut);
        mesh.nodes[j] = Some(n);
        if n.sonic {
            break;
        }
    }
    for i in 1..n12 {
        for j in 1..n23 {
            let live = |n: Option<&MeshNode>| n.filter(|n| !n.sonic).copied();
            let (Some(a), Some(b)) = (live(mesh.get(i - 1, j)), live(mesh.get(i, j - 1))) else {
                continue;
            };
            let node = march_node(gl, &a, &b, mesh.get(i - 1, j - 1), t_cut, mesh.dtheta).map_err(|msg| Error::Mesh { i, j, msg })?;
            // the supersonic zone lies below the vertical axis
            if node.theta > std::f64::consts::FRAC_PI_2 + 1e-12 {
                continue;
            }
            let mut flag = |kind, value| mesh.breaches.push(Breach { i, j, kind, value });
            if !(node.r_dir > 0.0) {
                flag(BreachKind::RNonPositive, node.r_dir);
            }
            if !(node.s_dir > 0.0) {
                flag(BreachKind::SNonPositive, node.s_dir);
            }
            if !(node.p >= plo && node.p <= phi) {
                flag(BreachKind::PressureBounds, node.p);
            }
            let pt = vertical_p_theta(&a, &b, &node);
            if pt < -P_THETA_TOL {
                flag(BreachKind::PressureDecreasing, pt);
            }
            mesh.nodes[i * n23 + j] = Some(node);
        }
    }
    Ok(mesh)
}

/// Discrete `p_theta` at fixed radius: the segment between the two parents
/// is crossed by the circle through the new node.
fn vertical_p_theta(a: &MeshNode, b: &MeshNode, n: &MeshNode) -> f64 {
    let dr = b.r - a.r;
    if dr.abs() < 1e-300 {
        return (n.r_dir + n.s_dir) / 2.0;
    }
    let w = ((n.r - a.r) / dr).clamp(0.0, 1.0);
    let th = a.theta + w * (b.theta - a.theta);
    let p = a.p + w * (b.p - a.p);
    let d = n.theta - th;
    if d <= 0.0 {
        return (n.r_dir + n.s_dir) / 2.0;
    }
    (n.p - p) / d
}

/// New node from its parent `a` on the same plus characteristic and `b` on
/// the same minus characteristic. The trapezoidal relations are solved by
/// Newton iteration on `(r, p, R, S)` started from a parallelogram predictor.
fn march_node(gl: &GasLaw, a: &MeshNode, b: &MeshNode, d: Option<&MeshNode>, t_cut: f64, dtheta: f64) -> std::result::Result<MeshNode, String> {
    let la = lambda_of(gl, a.r, a.p);
    let lb = lambda_of(gl, b.r, b.p);
    // one sweep of the trapezoidal relations: returns (theta, image of x)
    let sweep = |x: [f64; 4]| -> std::result::Result<(f64, [f64; 4]), String> {
        let [r, p, rr, ss] = x;
        let lam = lambda_of(gl, r, p);
        let sa = 0.5 * (la + lam);
        let sb = 0.5 * (lb + lam);
        if !(sa + sb > 0.0) {
            return Err("characteristics are parallel".into());
        }
        let th = (b.r - a.r + sa * a.theta + sb * b.theta) / (sa + sb);
        let (da, db) = (th - a.theta, th - b.theta);
        if !(da > 0.0 && db > 0.0) {
            return Err(format!("intersection does not advance in angle ({da:e}, {db:e})"));
        }
        let r_new = a.r + sa * da;
        let rr_new = transport(b.r_dir, b.s_dir, ss, h_mean(gl, b.r, b.p, r_new, p) * db);
        let ss_new = transport(a.s_dir, a.r_dir, rr, h_mean(gl, a.r, a.p, r_new, p) * da);
        let p_plus = a.p + 0.5 * da * (a.r_dir + rr_new);
        let p_minus = b.p + 0.5 * db * (b.s_dir + ss_new);
        Ok((th, [r_new, 0.5 * (p_plus + p_minus), rr_new, ss_new]))
    };
    let mut x = match d {
        Some(d) => [a.r + b.r - d.r, a.p + b.p - d.p, a.r_dir + b.r_dir - d.r_dir, a.s_dir + b.s_dir - d.s_dir],
        None => [0.5 * (a.r + b.r), 0.5 * (a.p + b.p), b.r_dir, a.s_dir],
    };
    if !(x[2] * b.r_dir > 0.0) {
        x[2] = b.r_dir;
    }
    if !(x[3] * a.s_dir > 0.0) {
        x[3] = a.s_dir;
    }
    // a plain sweep makes the starting point consistent with the geometry
    x = sweep(x)?.1;
    let scale = |v: f64| v.abs().max(1e-3);
    let sonic_u = (SONIC_SOLVE_FACTOR * t_cut).max(dtheta * a.r.max(b.r)).powi(2);
    let mut near_sonic = false;
    let mut failure = format!("intersection did not converge in {PICARD_MAX} iterations");
    for _ in 0..PICARD_MAX {
        let (th, fx) = sweep(x)?;
        for y in [&x, &fx] {
            let u = y[0] * y[0] - gl.c2_of_p(y[1]);
            // within the band, or closer to sonic than the cell resolves
            near_sonic |= u <= sonic_u.max(a.u.max(b.u) - u);
        }
        let res: [f64; 4] = std::array::from_fn(|k| fx[k] - x[k]);
        let small = (0..4).all(|k| res[k].abs() <= PICARD_TOL * scale(x[k]));
        if small {
            let (r, p) = (fx[0], fx[1]);
            let u = r * r - gl.c2_of_p(p);
            let t = u.max(0.0).sqrt();
            return Ok(MeshNode {
                theta: th,
                r,
                p,
                r_dir: fx[2],
                s_dir: fx[3],
                t,
                u,
                sonic: t < t_cut,
            });
        }
        let mut jac = [[0.0; 4]; 4];
        for k in 0..4 {
            let eps = 1e-7 * scale(x[k]);
            let mut xe = x;
            xe[k] += eps;
            let fe = sweep(xe)?.1;
            for q in 0..4 {
                jac[q][k] = (fe[q] - xe[q] - res[q]) / eps;
            }
        }
        let Some(step) = solve_n(jac, res.map(|v| -v)) else {
            failure = "singular Newton system".into();
            break;
        };
        // halve the step until the sweep is defined again
        let mut w = 1.0;
        let next = loop {
            let trial: [f64; 4] = std::array::from_fn(|k| x[k] + w * step[k]);
            if sweep(trial).is_ok() && trial[1] > 0.0 {
                break Some(trial);
            }
            w *= 0.5;
            if w < 1e-6 {
                break None;
            }
        };
        match next {
            Some(t) => x = t,
            None => {
                failure = "Newton step left the admissible set".into();
                break;
            }
        }
    }
    // the solve degenerates near the sonic locus, where lambda has a square-root
    // singularity and h blows up; such a node ends its lines like a sonic one
    let (th, fx) = sweep(x)?;
    let u = fx[0] * fx[0] - gl.c2_of_p(fx[1]);
    if near_sonic || u <= sonic_u {
        return Ok(MeshNode {
            theta: th,
            r: fx[0],
            p: fx[1],
            r_dir: fx[2],
            s_dir: fx[3],
            t: u.max(0.0).sqrt(),
            u,
            sonic: true,
        });
    }
    Err(failure)
}


/// Largest pressure difference between a mesh and its refinement on the
/// nodes they share (`(i, j)` of the coarse mesh is `(2i, 2j)` of the fine
/// one). Nodes with `t < t_min` on the coarse mesh are left out.
pub fn self_difference(coarse: &CharMesh, fine: &CharMesh, t_min: f64) -> f64 {
    coarse
        .iter()
        .filter(|(_, _, n)| !n.sonic && n.t >= t_min)
        .filter_map(|(i, j, n)| fine.get(2 * i, 2 * j).filter(|m| !m.sonic).map(|m| (n.p - m.p).abs()))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontSample {
    pub theta: f64,
    pub r: f64,
    /// The common value of `R` and `S` (and `p_theta`) on the sonic curve.
    pub rs_value: f64,
}

/// Sonic curve sampled by increasing angle: the first sample is on the
/// `Xi3` side, the last on the `Xi1` side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SonicFront {
    pub samples: Vec<FrontSample>,
}

impl SonicFront {
    /// Finite-difference `d eta / d xi` between consecutive samples.
    pub fn cartesian_slopes(&self) -> Vec<f64> {
        self.samples
            .windows(2)
            .map(|w| {
                let (x0, y0) = (w[0].r * w[0].theta.cos(), w[0].r * w[0].theta.sin());
                let (x1, y1) = (w[1].r * w[1].theta.cos(), w[1].r * w[1].theta.sin());
                (y1 - y0) / (x1 - x0)
            })
            .collect()
    }

    /// Whether `eta` strictly decreases as `xi` increases along the front.
    pub fn strictly_decreasing(&self, margin: f64) -> bool {
        self.cartesian_slopes().iter().all(|s| *s <= -margin)
    }
}

/// Continues a minus characteristic past its last live node `l` up to
/// `u = 0`, with `dr/dtheta = -lambda` and `dp/dtheta = S`, where `S`, and `R`
/// for the reported value, are extended linearly through `prev` and `l`.
/// Gives up (None) after `max_dtheta`.
fn continue_to_sonic(gl: &GasLaw, prev: &MeshNode, l: &MeshNode, max_dtheta: f64) -> Option<FrontSample> {
    const STEPS: usize = 200;
    let d = l.theta - prev.theta;
    let slope = |a: f64, b: f64| if d > 0.0 { (b - a) / d } else { 0.0 };
    let (ds, dr_dir) = (slope(prev.s_dir, l.s_dir), slope(prev.r_dir, l.r_dir));
    let s_at = |dth: f64| l.s_dir + ds * dth;
    let f = |dth: f64, y: [f64; 2]| -> [f64; 2] { [-lambda_of(gl, y[0], y[1]), s_at(dth)] };
    let u = |y: [f64; 2]| y[0] * y[0] - gl.c2_of_p(y[1]);
    let h = max_dtheta / STEPS as f64;
    let mut y = [l.r, l.p];
    let mut u0 = u(y);
    for k in 0..STEPS {
        let t = k as f64 * h;
        let k1 = f(t, y);
        let k2 = f(t + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = f(t + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = f(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        let y1 = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        let u1 = u(y1);
        if !(y1[1] > 0.0) {
            return None;
        }
        if u1 <= 0.0 {
            let w = if u0 > u1 { u0 / (u0 - u1) } else { 0.0 };
            let dth = t + w * h;
            let rs = 0.5 * (l.r_dir + dr_dir * dth + s_at(dth));
            return Some(FrontSample { theta: l.theta + dth, r: y[0] + w * (y1[0] - y[0]), rs_value: rs });
        }
        y = y1;
        u0 = u1;
    }
    None
}

/// One sample per minus-family line that ends in a sonic flag. A sonic node
/// that converged onto the locus (`t < t_cut`) is used as it is; one that was
/// flagged because the intersection left the supersonic zone is replaced by
/// the continuation of the line from its last live node to `u = 0`. When the
/// flagged node overshot (`u < 0`) the crossing lies before it, so the
/// continuation is searched up to 1.5 times that gap and, failing that, `u`
/// is interpolated linearly across it. Otherwise the search runs up to four
/// times the last step of the line and the flagged node is kept on failure.
pub fn extract_sonic(gl: &GasLaw, mesh: &CharMesh) -> SonicFront {
    let mut samples: Vec<FrontSample> = (0..mesh.n12)
        .filter_map(|i| {
            let line: Vec<&MeshNode> = (0..mesh.n23).filter_map(|j| mesh.get(i, j)).collect();
            let end = *line.last()?;
            if !end.sonic {
                return None;
            }
            let verbatim = FrontSample { theta: end.theta, r: end.r, rs_value: 0.5 * (end.r_dir + end.s_dir) };
            if end.t < mesh.t_cut && end.u >= -mesh.t_cut * mesh.t_cut {
                return Some(verbatim);
            }
            let k = line.iter().rposition(|n| !n.sonic)?;
            let l = line[k];
            let gap = end.theta - l.theta;
            let bracketed = end.u < 0.0 && l.u > 0.0 && gap > 0.0;
            let fallback = if bracketed {
                let w = l.u / (l.u - end.u);
                let mix = |a: f64, b: f64| a + w * (b - a);
                FrontSample {
                    theta: mix(l.theta, end.theta),
                    r: mix(l.r, end.r),
                    rs_value: 0.5 * (mix(l.r_dir, end.r_dir) + mix(l.s_dir, end.s_dir)),
                }
            } else {
                verbatim
            };
            if k == 0 {
                return Some(fallback);
            }
            let prev = line[k - 1];
            let window = if bracketed { 1.5 * gap } else { 4.0 * (l.theta - prev.theta).max(mesh.dtheta) };
            continue_to_sonic(gl, prev, l, window).or(Some(fallback))
        })
        .collect();
    samples.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    SonicFront { samples }
}

/// Points of the level set `u = d`, linearly interpolated along mesh lines
/// of both families, sorted by angle.
pub fn level_curve_u(mesh: &CharMesh, d: f64) -> Result<Vec<(f64, f64)>> {
    let umax = mesh.iter().map(|(_, _, n)| n.u).fold(f64::NEG_INFINITY, f64::max);
    if !(d > 0.0 && d < umax) {
        return domain(format!("level {d} outside (0, {umax})"));
    }
    let mut pts = Vec::new();
    let mut cross = |a: &MeshNode, b: &MeshNode| {
        if (a.u - d) * (b.u - d) <= 0.0 && a.u != b.u {
            let w = (d - a.u) / (b.u - a.u);
            pts.push((a.theta + w * (b.theta - a.theta), a.r + w * (b.r - a.r)));
        }
    };
    for (i, j, n) in mesh.iter() {
        if let Some(m) = mesh.get(i + 1, j) {
            cross(n, m);
        }
        if let Some(m) = mesh.get(i, j + 1) {
            cross(n, m);
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-14);
    Ok(pts)
}

/// `u_r = 2r - (c^2)' c (R - S) / (2 r sqrt(u))`, the radial derivative of `u`
/// from `p_r = (R - S) / (2 lambda)`.
pub fn u_radial(gl: &GasLaw, r: f64, p: f64, r_dir: f64, s_dir: f64) -> f64 {
    let c2 = gl.c2_of_p(p);
    let u = r * r - c2;
    2.0 * r - gl.dc2_dp(p) * c2.sqrt() * (r_dir - s_dir) / (2.0 * r * u.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearSonicDiagnostics {
    /// `(i, j, 1/S - 1/R)` at nodes with `R, S > 0`.
    pub v: Vec<(usize, usize, f64)>,
    /// `(i, j, (R - S)/t)` at marched (not boundary) non-sonic nodes with
    /// `t < t_band`.
    pub band: Vec<(usize, usize, f64)>,
    /// `None` when the band is empty ("not applicable").
    pub band_sup: Option<f64>,
    /// Nodes skipped because `R <= 0` or `S <= 0`.
    pub excluded: usize,
}

pub fn near_sonic_diagnostics(mesh: &CharMesh, t_band: f64) -> NearSonicDiagnostics {
    let mut out = NearSonicDiagnostics {
        v: Vec::new(),
        band: Vec::new(),
        band_sup: None,
        excluded: 0,
    };
    for (i, j, n) in mesh.iter() {
        if !(n.r_dir > 0.0 && n.s_dir > 0.0) {
            out.excluded += 1;
            continue;
        }
        out.v.push((i, j, 1.0 / n.s_dir - 1.0 / n.r_dir));
        if i > 0 && j > 0 && !n.sonic && n.t < t_band {
            out.band.push((i, j, (n.r_dir - n.s_dir) / n.t));
        }
    }
    out.band_sup = out.band.iter().map(|b| b.2.abs()).reduce(f64::max);
    out
}

/// Successive ratios of band suprema across refinements, and whether any
/// ratio exceeds 2 (the bound is diverging).
pub fn refinement_ratios(sups: &[f64]) -> (Vec<f64>, bool) {
    let ratios: Vec<f64> = sups.windows(2).map(|w| w[1] / w[0]).collect();
    let diverging = ratios.iter().any(|r| *r > 2.0);
    (ratios, diverging)
}

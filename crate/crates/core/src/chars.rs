//! Characteristics of the pressure equation in the supersonic zone.
//!
//! In polar self-similar coordinates the two families satisfy
//! `dr/dtheta = +lambda` (plus) and `-lambda` (minus) with
//! `lambda = r sqrt((r^2 - c^2) / c^2)`. The directional derivatives of `p`
//! along them are `R` (plus) and `S` (minus).
//!
//! Closed forms: the rarefaction region where `c^2(p) = eta^2`, the bounding
//! plus characteristic `r = c1 sin(theta)`, straight plus characteristics of
//! a constant state (tangent lines of its sonic circle), and the Riccati
//! transport of `S` along them.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::gas::{GasLaw, PolarPoint, QuadrantData};

/// Slack on `r^2 >= c^2` before a state counts as subsonic.
pub const SONIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Plus,
    Minus,
}

impl Family {
    pub fn sign(self) -> f64 {
        match self {
            Family::Plus => 1.0,
            Family::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Family::Plus => "plus",
            Family::Minus => "minus",
        }
    }
}

/// `r sqrt((r^2 - c^2)/c^2)`, zero on the sonic circle.
pub fn lambda_speed(gl: &GasLaw, r: f64, p: f64) -> Result<f64> {
    let c2 = gl.sound_speed_sq_p(p)?;
    lambda_c2(r, c2)
}

fn lambda_c2(r: f64, c2: f64) -> Result<f64> {
    let d = r * r - c2;
    if d < -SONIC_TOL || !d.is_finite() {
        return domain(format!("subsonic state: r^2 - c^2 = {d:e}"));
    }
    Ok(r * (d.max(0.0) / c2).sqrt())
}

/// Coefficient of the Riccati-type transport, `r^2 (c^2)' / (4 c^2 (r^2 - c^2))`.
pub fn h_coeff(gl: &GasLaw, r: f64, p: f64) -> Result<f64> {
    let c2 = gl.sound_speed_sq_p(p)?;
    let d = r * r - c2;
    if !(d > 0.0) {
        return domain(format!("h is singular at r^2 - c^2 = {d:e}"));
    }
    Ok(r * r * gl.dc2_dp(p) / (4.0 * c2 * d))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slope {
    Finite(f64),
    /// `xi^2 = c^2`: the curve has a vertical tangent in the `(xi, eta)` plane.
    Vertical,
}

impl Slope {
    pub fn value(self) -> Option<f64> {
        match self {
            Slope::Finite(v) => Some(v),
            Slope::Vertical => None,
        }
    }
}

/// `(d eta/d xi)` of the minus and plus characteristics through `(xi, eta)`.
pub fn cart_slopes(gl: &GasLaw, xi: f64, eta: f64, p: f64) -> Result<(Slope, Slope)> {
    let c2 = gl.sound_speed_sq_p(p)?;
    let q = xi * xi + eta * eta - c2;
    if q < -SONIC_TOL {
        return domain(format!("subsonic point: xi^2 + eta^2 - c^2 = {q:e}"));
    }
    let root = (c2 * q.max(0.0)).sqrt();
    let den = xi * xi - c2;
    let slope = |num: f64| {
        if den.abs() <= 1e-14 * c2 {
            Slope::Vertical
        } else {
            Slope::Finite(num / den)
        }
    };
    Ok((slope(xi * eta - root), slope(xi * eta + root)))
}

/// Plus characteristic bounding the rarefaction region, `r = c1 sin(theta)`
/// for `theta2 <= theta <= pi/2`.
pub fn gamma12(qd: &QuadrantData, theta: f64) -> Result<f64> {
    let lo = qd.theta2();
    if !(theta >= lo - 1e-12 && theta <= std::f64::consts::FRAC_PI_2 + 1e-12) {
        return domain(format!("gamma12 is defined on [{lo}, pi/2], got {theta}"));
    }
    Ok(qd.c1 * theta.sin())
}

/// Phase `arcsec sqrt(c1/c4) - arcsin sqrt(c4/c1)` of the plus characteristic
/// leaving `Xi2` through the constant state `p4`. Zero when `c1 = 2 c4`.
pub fn gamma24_phase(qd: &QuadrantData) -> f64 {
    let q = (qd.c4 / qd.c1).sqrt();
    q.acos() - q.asin()
}

/// `r = c4 sec(theta + phase)`, the tangent line of the circle `r = c4` through `Xi2`.
pub fn gamma24(qd: &QuadrantData, theta: f64) -> Result<f64> {
    let c = (theta + gamma24_phase(qd)).cos();
    if !(c > 1e-12) {
        return domain(format!("gamma24 has no finite positive radius at theta = {theta}"));
    }
    Ok(qd.c4 / c)
}

/// Exact `(p, R, S)` in the rarefaction region `c^2(p) = eta^2`.
pub fn r0_exact(gl: &GasLaw, qd: &QuadrantData, pt: PolarPoint) -> Result<(f64, f64, f64)> {
    let eta = pt.r * pt.theta.sin();
    let tol = 1e-12;
    if !(pt.r > 0.0 && eta >= qd.c4 - tol && eta <= qd.c1 + tol && pt.theta.cos() >= -tol) {
        return domain(format!(
            "({}, {}) is outside the rarefaction region c4 <= eta <= c1",
            pt.r, pt.theta
        ));
    }
    let k = gl.kappa();
    let p = gl.p_of_c2(eta * eta);
    let (s, c) = pt.theta.sin_cos();
    let r_dir = 4.0 / (k * gl.gamma().powf(1.0 / k)) * c * s.powf(2.0 / k - 1.0) * pt.r.powf(2.0 / k);
    Ok((p, r_dir, 0.0))
}

/// Pressure of the rarefaction region, usable as a field callback.
pub fn r0_pressure(gl: &GasLaw, r: f64, theta: f64) -> f64 {
    let eta = r * theta.sin();
    gl.p_of_c2(eta * eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharSample {
    pub theta: f64,
    pub r: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CharStop {
    /// The target angle was reached.
    Reached,
    /// `sqrt(r^2 - c^2)` fell below the sonic cut.
    Sonic,
    /// The curve left the radial window.
    Exit,
    /// The step size collapsed before reaching the target.
    Underflow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharCurve {
    pub family: Family,
    /// Samples ordered along the integration, `theta` strictly monotone.
    pub samples: Vec<CharSample>,
    pub stop: CharStop,
}

impl CharCurve {
    pub fn last(&self) -> CharSample {
        *self.samples.last().expect("curves hold at least their start")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharOptions {
    pub h_max: f64,
    pub h_min: f64,
    /// Local error target per step (step doubling).
    pub tol: f64,
    /// Stop once `sqrt(r^2 - c^2)` drops below this.
    pub t_cut: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for CharOptions {
    fn default() -> Self {
        Self {
            h_max: 1e-4,
            h_min: 1e-13,
            tol: 1e-13,
            t_cut: 1e-6,
            r_min: 0.0,
            r_max: f64::INFINITY,
        }
    }
}

/// Traces `dr/dtheta = +-lambda(r, p(r, theta))` from `start` towards `theta_end`
/// with step-doubled classical Runge-Kutta.
pub fn integrate_char<F>(gl: &GasLaw, p_eval: F, start: PolarPoint, family: Family, theta_end: f64, opt: &CharOptions) -> Result<CharCurve>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let sgn = family.sign();
    let rhs = |th: f64, r: f64| -> Result<f64> {
        let p = p_eval(r, th)?;
        Ok(sgn * lambda_speed(gl, r, p)?)
    };
    let sonic_gap = |th: f64, r: f64| -> Result<(f64, f64)> {
        let p = p_eval(r, th)?;
        let c2 = gl.sound_speed_sq_p(p)?;
        Ok((p, (r * r - c2).max(0.0).sqrt()))
    };
    let rk4 = |th: f64, r: f64, h: f64| -> Result<f64> {
        let k1 = rhs(th, r)?;
        let k2 = rhs(th + 0.5 * h, r + 0.5 * h * k1)?;
        let k3 = rhs(th + 0.5 * h, r + 0.5 * h * k2)?;
        let k4 = rhs(th + h, r + h * k3)?;
        Ok(r + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
    };

    let (mut th, mut r) = (start.theta, start.r);
    let (p0, t0) = sonic_gap(th, r)?;
    lambda_speed(gl, r, p0)?;
    let mut samples = vec![CharSample { theta: th, r, p: p0 }];
    let finish = |samples, stop| Ok(CharCurve { family, samples, stop });
    if t0 < opt.t_cut {
        return finish(samples, CharStop::Sonic);
    }
    let dir = if theta_end >= th { 1.0 } else { -1.0 };
    let mut h = opt.h_max;
    loop {
        let remaining = (theta_end - th) * dir;
        if remaining <= 1e-15 {
            return finish(samples, CharStop::Reached);
        }
        let step = h.min(remaining);
        let attempt = rk4(th, r, dir * step).and_then(|full| {
            let half = rk4(th, r, dir * 0.5 * step)?;
            let two = rk4(th + dir * 0.5 * step, half, dir * 0.5 * step)?;
            Ok((full, two))
        });
        let accepted = match attempt {
            Ok((full, two)) => {
                let err = (two - full).abs() / 15.0;
                if err <= opt.tol * r.abs().max(1.0) {
                    let grow = if err > 0.0 { 0.9 * (opt.tol / err).powf(0.2) } else { 2.0 };
                    h = (step * grow.clamp(0.2, 2.0)).min(opt.h_max);
                    Some(two + (two - full) / 15.0)
                } else {
                    h = step * (0.9 * (opt.tol / err).powf(0.2)).clamp(0.1, 0.5);
                    None
                }
            }
            // a stage left the supersonic zone
            Err(Error::Domain(_)) => {
                h = 0.5 * step;
                None
            }
            Err(e) => return Err(e),
        };
        match accepted {
            Some(rn) => {
                th = if step == remaining { theta_end } else { th + dir * step };
                r = rn;
                if !(r > opt.r_min && r < opt.r_max) {
                    return finish(samples, CharStop::Exit);
                }
                let (p, t) = sonic_gap(th, r)?;
                samples.push(CharSample { theta: th, r, p });
                if t < opt.t_cut {
                    return finish(samples, CharStop::Sonic);
                }
            }
            None if h < opt.h_min => return finish(samples, CharStop::Underflow),
            None => {}
        }
    }
}

/// Foot of a straight plus characteristic on the minus characteristic bounding the simple wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimpleWaveFoot {
    pub theta0: f64,
    pub r0: f64,
    pub p0: f64,
    /// `sqrt((r0^2 - c^2(p0)) / c^2(p0))`.
    pub s0: f64,
}

impl SimpleWaveFoot {
    pub fn new(gl: &GasLaw, theta0: f64, r0: f64, p0: f64) -> Result<Self> {
        let c2 = gl.sound_speed_sq_p(p0)?;
        let d = r0 * r0 - c2;
        if d < -SONIC_TOL || !(r0 > 0.0) {
            return domain(format!("foot ({r0}, {theta0}) is subsonic for p0 = {p0}"));
        }
        Ok(Self {
            theta0,
            r0,
            p0,
            s0: (d.max(0.0) / c2).sqrt(),
        })
    }

    pub fn xy(&self) -> (f64, f64) {
        (self.r0 * self.theta0.cos(), self.r0 * self.theta0.sin())
    }

    /// Coefficients `(a, b)` with the characteristic `a eta + b xi = r0`.
    fn line(&self) -> (f64, f64) {
        let (s, c) = self.theta0.sin_cos();
        (s - c * self.s0, s * self.s0 + c)
    }
}

/// Radius of the straight plus characteristic from `foot` at angle `theta`.
pub fn simple_wave_char(foot: &SimpleWaveFoot, theta: f64) -> Result<f64> {
    let (a, b) = foot.line();
    let den = a * theta.sin() + b * theta.cos();
    if !(den > 0.0) {
        return domain(format!("angle {theta} is past the asymptote of the characteristic"));
    }
    Ok(foot.r0 / den)
}

/// Squared distance from the origin of the chord through `foot` and `point`,
/// which is `c^2(p0)` when both lie on one straight plus characteristic.
pub fn recover_c2(foot: (f64, f64), point: (f64, f64)) -> Result<f64> {
    let (x0, y0) = foot;
    let (x, y) = point;
    let d2 = (y - y0).powi(2) + (x - x0).powi(2);
    if !(d2 > 0.0) {
        return domain("foot and point coincide");
    }
    Ok((y * x0 - x * y0).powi(2) / d2)
}

/// `S = S0 / (S0 H + 1)` with `H` the integral of `h` along the plus
/// characteristic. A non-positive denominator means the gradient blew up.
pub fn riccati_s(s0: f64, h_integral: f64) -> Result<f64> {
    let den = s0 * h_integral + 1.0;
    if !(den > 0.0) {
        return Err(Error::Analysis(format!("Riccati blow-up: 1 + S0 H = {den:e}")));
    }
    Ok(s0 / den)
}

/// Integral of `h` along the straight plus characteristic of `foot` from
/// `theta0` to `theta` (negative when `theta < theta0`), by composite
/// Gauss-Legendre quadrature.
pub fn h_integral(gl: &GasLaw, foot: &SimpleWaveFoot, theta: f64) -> Result<f64> {
    const X: [f64; 3] = [-0.7745966692414834, 0.0, 0.7745966692414834];
    const W: [f64; 3] = [0.5555555555555556, 0.8888888888888888, 0.5555555555555556];
    let pieces = 64;
    let h = (theta - foot.theta0) / pieces as f64;
    let mut sum = 0.0;
    for k in 0..pieces {
        let mid = foot.theta0 + (k as f64 + 0.5) * h;
        for (x, w) in X.iter().zip(W) {
            let th = mid + 0.5 * h * x;
            sum += w * h_coeff(gl, simple_wave_char(foot, th)?, foot.p0)?;
        }
    }
    Ok(0.5 * h * sum)
}

/// `(p, R)` or `(p, S)` from the shape of a characteristic: its radius and
/// first two angular derivatives at one point.
pub fn rs_from_curve(gl: &GasLaw, r: f64, dr: f64, d2r: f64, family: Family) -> Result<(f64, f64)> {
    let q = dr * dr + r * r;
    if !(q > 0.0 && r > 0.0) {
        return domain("curve data must have r > 0");
    }
    let c2 = r.powi(4) / q;
    let p = gl.p_of_c2(c2);
    let k = 2.0 * r.powi(3) * p.powf(1.0 / gl.gamma()) / (gl.gamma() * gl.kappa() * q * q);
    let v = match family {
        Family::Plus => k * dr * (r * r + 2.0 * dr * dr - r * d2r),
        Family::Minus => k * (-dr) * (r * d2r - r * r - 2.0 * dr * dr),
    };
    if !v.is_finite() {
        return domain("non-finite curvature data");
    }
    Ok((p, v))
}

/// Second-order finite differences `(r', r'')` of samples on a uniform angle grid.
pub fn curve_derivatives(thetas: &[f64], rs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = rs.len();
    if n < 4 || thetas.len() != n {
        return domain("need at least 4 samples with matching angles");
    }
    let h = (thetas[n - 1] - thetas[0]) / (n - 1) as f64;
    let out = (0..n)
        .map(|k| {
            let (d1, d2) = if k == 0 {
                (
                    (-3.0 * rs[0] + 4.0 * rs[1] - rs[2]) / (2.0 * h),
                    (2.0 * rs[0] - 5.0 * rs[1] + 4.0 * rs[2] - rs[3]) / (h * h),
                )
            } else if k == n - 1 {
                (
                    (3.0 * rs[k] - 4.0 * rs[k - 1] + rs[k - 2]) / (2.0 * h),
                    (2.0 * rs[k] - 5.0 * rs[k - 1] + 4.0 * rs[k - 2] - rs[k - 3]) / (h * h),
                )
            } else {
                ((rs[k + 1] - rs[k - 1]) / (2.0 * h), (rs[k + 1] - 2.0 * rs[k] + rs[k - 1]) / (h * h))
            };
            (d1, d2)
        })
        .collect();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelope {
    /// Intersections of neighbouring characteristics, in foot order.
    pub points: Vec<PolarPoint>,
    /// The intersection with the smallest angle.
    pub xi4: Option<PolarPoint>,
}

/// Intersections of the straight plus characteristics of neighbouring feet
/// that fall in `[theta_lo, theta_hi]` on the forward branch of both lines.
pub fn envelope_point(feet: &[SimpleWaveFoot], theta_lo: f64, theta_hi: f64) -> Result<Envelope> {
    if feet.len() < 3 {
        return domain(format!("envelope needs at least 3 feet, got {}", feet.len()));
    }
    let mut points = Vec::new();
    for w in feet.windows(2) {
        let (a1, b1) = w[0].line();
        let (a2, b2) = w[1].line();
        // b xi + a eta = r0 for both lines
        let det = b1 * a2 - b2 * a1;
        if det.abs() < 1e-14 {
            continue;
        }
        let xi = (w[0].r0 * a2 - w[1].r0 * a1) / det;
        let eta = (b1 * w[1].r0 - b2 * w[0].r0) / det;
        let r = xi.hypot(eta);
        let theta = eta.atan2(xi);
        let ok = theta >= theta_lo && theta <= theta_hi && r > 0.0;
        if ok && simple_wave_char(&w[0], theta).is_ok() && simple_wave_char(&w[1], theta).is_ok() {
            points.push(PolarPoint { r, theta });
        }
    }
    let xi4 = points.iter().copied().min_by(|a, b| a.theta.total_cmp(&b.theta));
    Ok(Envelope { points, xi4 })
}

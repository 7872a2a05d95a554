//! Polytropic gas law, conserved states and the four-quadrant Riemann data.
//!
//! The pressure law is `p = rho^gamma` (unit constant), so that
//! `c^2(rho) = gamma rho^(gamma-1)` and, written in terms of the pressure,
//! `c^2(p) = gamma p^kappa` with `kappa = (gamma - 1) / gamma`.
//!
//! The quadrant states are
//!
//! ```text
//! U1 = (rho1, 0, Phi14)    U2 = (rho1, 0, 0)
//! U3 = (rho1, -Phi14, 0)   U4 = (rho4, 0, 0)
//! ```
//!
//! with `Phi14 = int_{rho4}^{rho1} c(s) ds`. The two planar rarefactions are
//! R14 (between U1 and U4, moving in +y) and its mirror image R34 under the
//! reflection `(x, y) -> (-y, -x)`.

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Polytropic gas closure `p(rho) = rho^gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasLaw {
    gamma: f64,
    kappa: f64,
    // Integer exponents take the `powi` fast path in the finite-volume kernels.
    int_gamma: Option<i32>,
}

impl GasLaw {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(Error::Config(format!("gamma must satisfy 1 < gamma < inf, got {gamma}")));
        }
        let int_gamma = (gamma.fract() == 0.0 && gamma <= 16.0).then_some(gamma as i32);
        Ok(Self {
            gamma,
            kappa: (gamma - 1.0) / gamma,
            int_gamma,
        })
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    #[inline]
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn pressure(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return domain(format!("pressure needs rho > 0, got {rho}"));
        }
        Ok(self.pressure_unchecked(rho))
    }

    /// `rho^gamma` without the positivity check, for hot loops that have
    /// already validated the state.
    #[inline]
    pub fn pressure_unchecked(&self, rho: f64) -> f64 {
        match self.int_gamma {
            Some(2) => rho * rho,
            Some(3) => rho * rho * rho,
            Some(k) => rho.powi(k),
            None => rho.powf(self.gamma),
        }
    }

    /// Secant slope `(p(b) - p(a)) / (b - a)` as the division-free sum
    /// `sum_k a^k b^(gamma-1-k)` when `gamma` is an integer; `None` otherwise.
    #[inline]
    pub fn secant_slope_int(&self, a: f64, b: f64) -> Option<f64> {
        match self.int_gamma {
            Some(2) => Some(a + b),
            Some(3) => Some(a * a + a * b + b * b),
            Some(n) => {
                let (mut s, mut pa) = (0.0, 1.0);
                for _ in 0..n {
                    s = s * b + pa;
                    pa *= a;
                }
                Some(s)
            }
            None => None,
        }
    }

    pub fn sound_speed_sq(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return domain(format!("sound speed needs rho > 0, got {rho}"));
        }
        Ok(self.gamma * self.pressure_unchecked(rho) / rho)
    }

    /// `c^2` as a function of pressure: `gamma p^kappa`.
    pub fn sound_speed_sq_p(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return domain(format!("sound speed needs p > 0, got {p}"));
        }
        Ok(self.c2_of_p(p))
    }

    #[inline]
    pub fn c2_of_p(&self, p: f64) -> f64 {
        self.gamma * p.powf(self.kappa)
    }

    /// `d(c^2)/dp = (gamma - 1) p^(kappa - 1)`.
    #[inline]
    pub fn dc2_dp(&self, p: f64) -> f64 {
        (self.gamma - 1.0) * p.powf(self.kappa - 1.0)
    }

    /// Inverse of `c2_of_p`.
    #[inline]
    pub fn p_of_c2(&self, c2: f64) -> f64 {
        (c2 / self.gamma).powf(1.0 / self.kappa)
    }

    /// Density whose sound speed equals `c`.
    #[inline]
    pub fn rho_of_c(&self, c: f64) -> f64 {
        (c * c / self.gamma).powf(1.0 / (self.gamma - 1.0))
    }

    /// `Phi_ij = int_{rho_j}^{rho_i} c(s) ds = 2 sqrt(gamma)/(gamma+1) (rho_i^((gamma+1)/2) - rho_j^((gamma+1)/2))`.
    ///
    /// The `sqrt(gamma)` comes from `c = sqrt(gamma) rho^((gamma-1)/2)`; without
    /// it the states would not be joined by a single rarefaction.
    pub fn phi(&self, rho_i: f64, rho_j: f64) -> Result<f64> {
        if !(rho_i > 0.0 && rho_j > 0.0) {
            return domain(format!("phi needs positive densities, got ({rho_i}, {rho_j})"));
        }
        let e = 0.5 * (self.gamma + 1.0);
        Ok(2.0 * self.gamma.sqrt() / (self.gamma + 1.0) * (rho_i.powf(e) - rho_j.powf(e)))
    }
}

/// Conserved state `(rho, m, n) = (rho, rho u, rho v)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct State {
    pub rho: f64,
    pub m: f64,
    pub n: f64,
}

impl State {
    pub const fn new(rho: f64, m: f64, n: f64) -> Self {
        Self { rho, m, n }
    }

    /// Checked constructor: density positive, momenta finite.
    pub fn try_new(rho: f64, m: f64, n: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::State(format!("density must be positive, got {rho}")));
        }
        if !(m.is_finite() && n.is_finite()) {
            return Err(Error::State(format!("momenta must be finite, got ({m}, {n})")));
        }
        Ok(Self { rho, m, n })
    }

    pub fn velocity(&self) -> (f64, f64) {
        (self.m / self.rho, self.n / self.rho)
    }

    /// Image under the reflection `(x, y) -> (-y, -x)`: `(rho, m, n) -> (rho, -n, -m)`.
    pub fn mirror(&self) -> Self {
        Self::new(self.rho, -self.n, -self.m)
    }
}

/// How `2 c4` compares with `c1`; the existence theory assumes the strict case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedRatioClass {
    /// `2 c4 > c1`.
    Strict,
    /// `2 c4 = c1` (to 1e-12 relative).
    Boundary,
    /// `2 c4 < c1`.
    Below,
}

/// A point in self-similar polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite() && theta.is_finite()) {
            return domain(format!("polar point needs r > 0, got ({r}, {theta})"));
        }
        Ok(Self { r, theta })
    }

    pub fn xy(&self) -> (f64, f64) {
        (self.r * self.theta.cos(), self.r * self.theta.sin())
    }
}

/// The four sectorial states and the constants derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadrantData {
    pub u1: State,
    pub u2: State,
    pub u3: State,
    pub u4: State,
    pub c1: f64,
    pub c4: f64,
    pub p1: f64,
    pub p4: f64,
    pub phi14: f64,
    /// Sonic tip of the rarefaction, `(c1, pi/2)`.
    pub xi1: PolarPoint,
    /// Exit point of the bounding plus characteristic at `eta = c4`.
    pub xi2: PolarPoint,
    pub speed_class: SpeedRatioClass,
}

impl QuadrantData {
    pub fn rho1(&self) -> f64 {
        self.u1.rho
    }

    pub fn rho4(&self) -> f64 {
        self.u4.rho
    }

    /// Polar angle of the second corner, `arcsin sqrt(c4 / c1)`.
    pub fn theta2(&self) -> f64 {
        self.xi2.theta
    }
}

/// Builds the quadrant data for `rho1 > rho4 > 0`.
///
/// The boundary case `2 c4 = c1` (which includes the reference data
/// `gamma = 3, rho1 = 0.5, rho4 = 0.25`) is accepted; callers that care
/// inspect `speed_class`.
pub fn four_quadrant_states(gl: &GasLaw, rho1: f64, rho4: f64) -> Result<QuadrantData> {
    if !(rho4 > 0.0 && rho1 > rho4 && rho1.is_finite()) {
        return Err(Error::Config(format!(
            "quadrant data needs rho1 > rho4 > 0, got rho1={rho1}, rho4={rho4}"
        )));
    }
    quadrant_data(gl, rho1, rho4)
}

/// Degenerate data with the same density in all four quadrants; every state
/// is at rest. Used to check that a solver keeps a jump-free configuration.
pub fn uniform_quadrants(gl: &GasLaw, rho: f64) -> Result<QuadrantData> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Config(format!("uniform data needs rho > 0, got {rho}")));
    }
    quadrant_data(gl, rho, rho)
}

fn quadrant_data(gl: &GasLaw, rho1: f64, rho4: f64) -> Result<QuadrantData> {
    let phi14 = gl.phi(rho1, rho4)?;
    let c1 = gl.sound_speed_sq(rho1)?.sqrt();
    let c4 = gl.sound_speed_sq(rho4)?.sqrt();
    let p1 = gl.pressure(rho1)?;
    let p4 = gl.pressure(rho4)?;
    let speed_class = {
        let d = 2.0 * c4 - c1;
        if d.abs() <= 1e-12 * c1 {
            SpeedRatioClass::Boundary
        } else if d > 0.0 {
            SpeedRatioClass::Strict
        } else {
            SpeedRatioClass::Below
        }
    };
    Ok(QuadrantData {
        u1: State::new(rho1, 0.0, phi14),
        u2: State::new(rho1, 0.0, 0.0),
        u3: State::new(rho1, -phi14, 0.0),
        u4: State::new(rho4, 0.0, 0.0),
        c1,
        c4,
        p1,
        p4,
        phi14,
        xi1: PolarPoint {
            r: c1,
            theta: std::f64::consts::FRAC_PI_2,
        },
        xi2: PolarPoint {
            r: (c1 * c4).sqrt(),
            theta: (c4 / c1).sqrt().asin(),
        },
        speed_class,
    })
}

/// Which planar rarefaction to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanarWave {
    /// Between U1 and U4; `s = y / t`.
    R14,
    /// Between U3 and U4; `s = -x / t` (mirror image of R14).
    R34,
}

/// Exact one-dimensional fan solution of a planar rarefaction at similarity
/// coordinate `s`.
///
/// Inside the fan `c(rho) = s` and the Riemann invariant `n - Phi(rho, rho4)`
/// vanishes. R34 returns the mirrored state.
pub fn planar_rarefaction(gl: &GasLaw, qd: &QuadrantData, which: PlanarWave, s: f64) -> State {
    let r14 = if s >= qd.c1 {
        qd.u1
    } else if s <= qd.c4 {
        qd.u4
    } else {
        let rho = gl.rho_of_c(s);
        // phi() only fails for non-positive densities, excluded inside the fan.
        let n = gl.phi(rho, qd.rho4()).unwrap_or(0.0);
        State::new(rho, 0.0, n)
    };
    match which {
        PlanarWave::R14 => r14,
        PlanarWave::R34 => r14.mirror(),
    }
}

/// Exact solution away from the interaction zone: the two planar rarefactions
/// superposed on the quadrant constants. Valid at `(x, y, t)` as long as the
/// point lies outside the disturbance emanating from the origin (e.g. on any
/// circle of radius larger than `c1 t`). At `t = 0` this is the initial data.
pub fn far_field_state(gl: &GasLaw, qd: &QuadrantData, x: f64, y: f64, t: f64) -> State {
    let upper = y >= 0.0;
    let right = x >= 0.0;
    match (right, upper) {
        (true, true) => {
            if t <= 0.0 {
                qd.u1
            } else {
                planar_rarefaction(gl, qd, PlanarWave::R14, y / t)
            }
        }
        (false, true) => qd.u2,
        (false, false) => {
            if t <= 0.0 {
                qd.u3
            } else {
                planar_rarefaction(gl, qd, PlanarWave::R34, -x / t)
            }
        }
        (true, false) => qd.u4,
    }
}

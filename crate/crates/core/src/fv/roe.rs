//! Roe linearization of the interface problem in the face-normal frame.
//!
//! In the frame `(rho, m_n, m_t)` the normal flux is `(m_n, p(rho), 0)`. The
//! secant sound speed `c_hat^2 = (p_r - p_l) / (rho_r - rho_l)` makes the
//! averaged Jacobian reproduce the flux jump exactly. Eigenpairs:
//!
//! ```text
//! -c_hat : (1, -c_hat, 0)
//!      0 : (0, 0, 1)
//! +c_hat : (1,  c_hat, 0)
//! ```
//!
//! Jumps are taken right minus left. For integer `gamma` the secant slope is
//! evaluated as a polynomial, which needs no special case for equal densities.

use crate::error::{Error, Result};
use crate::gas::{GasLaw, State};

/// Below this density jump the secant slope is replaced by `c^2` at the mean density.
pub const DEGENERATE_JUMP: f64 = 1e-12;

/// Decomposition of one interface jump into three waves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoeFan {
    pub c_hat: f64,
    pub speeds: [f64; 3],
    /// Coefficients of the jump in the eigenbasis.
    pub strengths: [f64; 3],
    /// Waves in the physical frame; they sum to `ur - ul`.
    pub waves: [State; 3],
    /// Left-going flux difference `A^- dQ`.
    pub amdq: State,
    /// Right-going flux difference `A^+ dQ`.
    pub apdq: State,
}

#[inline]
pub(crate) fn roe_speed(gl: &GasLaw, rho_l: f64, rho_r: f64, p_l: f64, p_r: f64) -> f64 {
    if let Some(c2) = gl.secant_slope_int(rho_l, rho_r) {
        return c2.sqrt();
    }
    let drho = rho_r - rho_l;
    let c2 = if drho.abs() > DEGENERATE_JUMP {
        (p_r - p_l) / drho
    } else {
        let rho = 0.5 * (rho_l + rho_r);
        gl.gamma() * gl.pressure_unchecked(rho) / rho
    };
    c2.sqrt()
}

/// Strengths of the three waves for the jump `(d_rho, d_mn, d_mt)`.
#[inline]
pub(crate) fn strengths(c: f64, d_rho: f64, d_mn: f64, d_mt: f64) -> [f64; 3] {
    let h = d_mn / c;
    [0.5 * (d_rho - h), d_mt, 0.5 * (d_rho + h)]
}

#[inline]
pub(crate) fn to_normal(m: f64, n: f64, (nx, ny): (f64, f64)) -> (f64, f64) {
    (m * nx + n * ny, -m * ny + n * nx)
}

#[inline]
pub(crate) fn from_normal(mn: f64, mt: f64, (nx, ny): (f64, f64)) -> (f64, f64) {
    (mn * nx - mt * ny, mn * ny + mt * nx)
}

/// Physical flux of `(rho, m, n)` through a face with unit normal `normal`.
pub fn normal_flux(gl: &GasLaw, q: &State, (nx, ny): (f64, f64)) -> State {
    let p = gl.pressure_unchecked(q.rho);
    State::new(q.m * nx + q.n * ny, p * nx, p * ny)
}

pub fn roe_interface(gl: &GasLaw, ul: &State, ur: &State, normal: (f64, f64)) -> Result<RoeFan> {
    if !(ul.rho > 0.0 && ur.rho > 0.0) {
        return Err(Error::State(format!(
            "interface states need positive density, got {} and {}",
            ul.rho, ur.rho
        )));
    }
    let (p_l, p_r) = (gl.pressure_unchecked(ul.rho), gl.pressure_unchecked(ur.rho));
    let c = roe_speed(gl, ul.rho, ur.rho, p_l, p_r);
    assert!(c > 0.0, "Roe speed must be positive for positive densities");
    let (mn_l, mt_l) = to_normal(ul.m, ul.n, normal);
    let (mn_r, mt_r) = to_normal(ur.m, ur.n, normal);
    let a = strengths(c, ur.rho - ul.rho, mn_r - mn_l, mt_r - mt_l);
    let speeds = [-c, 0.0, c];
    let eig = [(1.0, -c, 0.0), (0.0, 0.0, 1.0), (1.0, c, 0.0)];
    let mut waves = [State::default(); 3];
    for k in 0..3 {
        let (r0, rn, rt) = eig[k];
        let (m, n) = from_normal(a[k] * rn, a[k] * rt, normal);
        waves[k] = State::new(a[k] * r0, m, n);
    }
    let scale = |w: &State, s: f64| State::new(s * w.rho, s * w.m, s * w.n);
    Ok(RoeFan {
        c_hat: c,
        speeds,
        strengths: a,
        waves,
        amdq: scale(&waves[0], -c),
        apdq: scale(&waves[2], c),
    })
}

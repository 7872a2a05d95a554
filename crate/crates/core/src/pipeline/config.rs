//! Flat `key=value` run configuration.
//!
//! One pair per line, `#` starts a comment. Every key is listed in
//! [`KEYS`]; anything else is rejected. Angles are degrees.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fv::{Limiter, Order};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataMode {
    /// `Gamma23` traced through the finite-volume field.
    Coupled,
    /// `Gamma23` read from a `theta_deg,f,g` table.
    Prescribed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub gamma: f64,
    pub rho1: f64,
    pub rho4: f64,
    pub nr: usize,
    pub ntheta: usize,
    pub rmin: f64,
    pub rmax: f64,
    pub thetamin: f64,
    pub thetamax: f64,
    pub cfl: f64,
    pub order: Order,
    pub limiter: Limiter,
    pub t_final: f64,
    pub jump_threshold: f64,
    pub window: usize,
    pub angle_step_deg: f64,
    /// Spacing of the rays written to `crosssections.csv`.
    pub section_step_deg: f64,
    pub mesh_n: usize,
    pub t_cut: f64,
    pub t_band: f64,
    pub mode: DataMode,
    pub gamma23_table: Option<PathBuf>,
    pub validation_tol: f64,
    /// Stop the `goursat` stage when the boundary data fail a hard check.
    pub require_valid: bool,
    pub outdir: PathBuf,
}

/// Recognised keys, in the order used by [`RunConfig::canonical`].
pub const KEYS: &[&str] = &[
    "gamma",
    "rho1",
    "rho4",
    "nr",
    "ntheta",
    "rmin",
    "rmax",
    "thetamin",
    "thetamax",
    "cfl",
    "order",
    "limiter",
    "t_final",
    "jump_threshold",
    "window",
    "angle_step_deg",
    "section_step_deg",
    "mesh_n",
    "t_cut",
    "t_band",
    "mode",
    "gamma23_table",
    "validation_tol",
    "require_valid",
    "outdir",
];

impl Default for RunConfig {
    /// The full-resolution reproduction: `dr = 1/2400` on `[0.01, 1]` and
    /// `dtheta = 2 pi / 3600` on `[0, 270]` degrees, run to `t = 1`.
    fn default() -> Self {
        Self {
            gamma: 3.0,
            rho1: 0.5,
            rho4: 0.25,
            nr: 2376,
            ntheta: 2700,
            rmin: 0.01,
            rmax: 1.0,
            thetamin: 0.0,
            thetamax: 270.0,
            cfl: 0.9,
            order: Order::Second,
            limiter: Limiter::Mc,
            t_final: 1.0,
            jump_threshold: crate::selfsim::DEFAULT_JUMP_THRESHOLD,
            window: crate::selfsim::DEFAULT_WINDOW,
            angle_step_deg: 1.0,
            section_step_deg: 10.0,
            mesh_n: crate::goursat::DEFAULT_MESH_N,
            t_cut: crate::goursat::DEFAULT_T_CUT,
            t_band: 0.05,
            mode: DataMode::Coupled,
            gamma23_table: None,
            validation_tol: 5e-3,
            require_valid: true,
            outdir: PathBuf::from("out"),
        }
    }
}

fn bad(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| bad(key, format!("cannot parse `{v}`")))
}

impl RunConfig {
    /// Sets one key from its text value. Range checks happen in [`validate`](Self::validate).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "gamma" => self.gamma = num(key, v)?,
            "rho1" => self.rho1 = num(key, v)?,
            "rho4" => self.rho4 = num(key, v)?,
            "nr" => self.nr = num(key, v)?,
            "ntheta" => self.ntheta = num(key, v)?,
            "rmin" => self.rmin = num(key, v)?,
            "rmax" => self.rmax = num(key, v)?,
            "thetamin" => self.thetamin = num(key, v)?,
            "thetamax" => self.thetamax = num(key, v)?,
            "cfl" => self.cfl = num(key, v)?,
            "order" => {
                self.order = match v {
                    "1" => Order::First,
                    "2" => Order::Second,
                    _ => return Err(bad(key, format!("expected 1 or 2, got `{v}`"))),
                }
            }
            "limiter" => {
                self.limiter = match v {
                    "none" => Limiter::None,
                    "minmod" => Limiter::Minmod,
                    "mc" => Limiter::Mc,
                    _ => return Err(bad(key, format!("expected none, minmod or mc, got `{v}`"))),
                }
            }
            "t_final" => self.t_final = num(key, v)?,
            "jump_threshold" => self.jump_threshold = num(key, v)?,
            "window" => self.window = num(key, v)?,
            "angle_step_deg" => self.angle_step_deg = num(key, v)?,
            "section_step_deg" => self.section_step_deg = num(key, v)?,
            "mesh_n" => self.mesh_n = num(key, v)?,
            "t_cut" => self.t_cut = num(key, v)?,
            "t_band" => self.t_band = num(key, v)?,
            "mode" => {
                self.mode = match v {
                    "coupled" => DataMode::Coupled,
                    "prescribed" => DataMode::Prescribed,
                    _ => return Err(bad(key, format!("expected coupled or prescribed, got `{v}`"))),
                }
            }
            "gamma23_table" => self.gamma23_table = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
            "validation_tol" => self.validation_tol = num(key, v)?,
            "require_valid" => self.require_valid = num(key, v)?,
            "outdir" => self.outdir = PathBuf::from(v),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got `{line}`", k + 1)))?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    /// Defaults, then the file (if any), then the `key=value` overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            cfg.apply_text(&text)?;
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{o}` is not key=value")))?;
            cfg.set(k.trim(), v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, key: &str, what: &str| if ok { Ok(()) } else { Err(bad(key, what)) };
        check(self.gamma > 1.0 && self.gamma.is_finite(), "gamma", "must exceed 1")?;
        check(self.rho4 > 0.0 && self.rho4.is_finite(), "rho4", "must be positive")?;
        check(self.rho1 > self.rho4 && self.rho1.is_finite(), "rho1", "must exceed rho4")?;
        check(self.nr >= 4, "nr", "needs at least 4 cells")?;
        check(self.ntheta >= 4, "ntheta", "needs at least 4 cells")?;
        check(self.rmin >= 0.0, "rmin", "must be non-negative")?;
        check(self.rmax > self.rmin && self.rmax.is_finite(), "rmax", "must exceed rmin")?;
        check(self.thetamin >= -360.0, "thetamin", "must be at least -360")?;
        check(
            self.thetamax > self.thetamin && self.thetamax - self.thetamin <= 360.0,
            "thetamax",
            "must exceed thetamin by at most 360",
        )?;
        check(self.cfl > 0.0 && self.cfl < 1.0, "cfl", "range (0, 1)")?;
        check(self.t_final > 0.0 && self.t_final.is_finite(), "t_final", "must be positive")?;
        check(self.jump_threshold > 0.0, "jump_threshold", "must be positive")?;
        check(self.window >= 1, "window", "must be at least 1")?;
        check(self.angle_step_deg > 0.0 && self.angle_step_deg <= 90.0, "angle_step_deg", "range (0, 90]")?;
        check(self.section_step_deg > 0.0 && self.section_step_deg <= 90.0, "section_step_deg", "range (0, 90]")?;
        check(self.mesh_n >= 1, "mesh_n", "must be at least 1")?;
        check(self.t_cut >= 0.0, "t_cut", "must be non-negative")?;
        check(self.t_band > 0.0, "t_band", "must be positive")?;
        check(self.validation_tol > 0.0, "validation_tol", "must be positive")?;
        check(
            self.mode == DataMode::Coupled || self.gamma23_table.is_some(),
            "gamma23_table",
            "required in prescribed mode",
        )?;
        Ok(())
    }

    pub fn value(&self, key: &str) -> String {
        match key {
            "gamma" => self.gamma.to_string(),
            "rho1" => self.rho1.to_string(),
            "rho4" => self.rho4.to_string(),
            "nr" => self.nr.to_string(),
            "ntheta" => self.ntheta.to_string(),
            "rmin" => self.rmin.to_string(),
            "rmax" => self.rmax.to_string(),
            "thetamin" => self.thetamin.to_string(),
            "thetamax" => self.thetamax.to_string(),
            "cfl" => self.cfl.to_string(),
            "order" => (if self.order == Order::First { "1" } else { "2" }).into(),
            "limiter" => match self.limiter {
                Limiter::None => "none",
                Limiter::Minmod => "minmod",
                Limiter::Mc => "mc",
            }
            .into(),
            "t_final" => self.t_final.to_string(),
            "jump_threshold" => self.jump_threshold.to_string(),
            "window" => self.window.to_string(),
            "angle_step_deg" => self.angle_step_deg.to_string(),
            "section_step_deg" => self.section_step_deg.to_string(),
            "mesh_n" => self.mesh_n.to_string(),
            "t_cut" => self.t_cut.to_string(),
            "t_band" => self.t_band.to_string(),
            "mode" => (if self.mode == DataMode::Coupled { "coupled" } else { "prescribed" }).into(),
            "gamma23_table" => self.gamma23_table.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            "validation_tol" => self.validation_tol.to_string(),
            "require_valid" => self.require_valid.to_string(),
            "outdir" => self.outdir.display().to_string(),
            _ => String::new(),
        }
    }

    /// Every key in [`KEYS`] order, one `key=value` per line.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        for k in KEYS {
            let _ = writeln!(s, "{k}={}", self.value(k));
        }
        s
    }

    /// Hex SHA-256 of the canonical form, without `outdir` (moving the
    /// output does not make a different run).
    pub fn run_id(&self) -> String {
        let text: String = self.canonical().lines().filter(|l| !l.starts_with("outdir=")).map(|l| format!("{l}\n")).collect();
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map = KEYS.iter().map(|k| (k.to_string(), serde_json::Value::String(self.value(k)))).collect();
        serde_json::Value::Object(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_reproduction_profile() {
        let c = RunConfig::default();
        assert_eq!((c.gamma, c.rho1, c.rho4, c.t_final), (3.0, 0.5, 0.25, 1.0));
        c.validate().unwrap();
    }

    #[test]
    fn parses_comments_and_overrides() {
        let mut c = RunConfig::default();
        c.apply_text("# reduced\nnr = 600\nntheta=900 # trailing\n\norder=1\n").unwrap();
        assert_eq!((c.nr, c.ntheta, c.order), (600, 900, Order::First));
        let c = RunConfig::load(None, &["cfl=0.5".into(), "mode=prescribed".into(), "gamma23_table=g.csv".into()]).unwrap();
        assert_eq!(c.cfl, 0.5);
        assert_eq!(c.mode, DataMode::Prescribed);
    }

    #[test]
    fn rejects_bad_input_naming_the_key() {
        let e = RunConfig::load(None, &["cfl=1.5".into()]).unwrap_err().to_string();
        assert!(e.contains("cfl"), "{e}");
        let e = RunConfig::load(None, &["colour=red".into()]).unwrap_err().to_string();
        assert!(e.contains("colour"), "{e}");
        let e = RunConfig::load(None, &["nr=lots".into()]).unwrap_err().to_string();
        assert!(e.contains("nr"), "{e}");
        assert!(RunConfig::load(None, &["mode=prescribed".into()]).is_err());
        assert!(RunConfig::default().apply_text("just words").is_err());
    }

    #[test]
    fn canonical_form_round_trips() {
        let mut c = RunConfig::default();
        c.apply_text("nr=600\nlimiter=minmod\ngamma23_table=t.csv\nrequire_valid=false").unwrap();
        let mut d = RunConfig::default();
        d.apply_text(&c.canonical()).unwrap();
        assert_eq!(c, d);
        assert_eq!(c.run_id(), d.run_id());
        d.outdir = "elsewhere".into();
        assert_eq!(c.run_id(), d.run_id());
        d.nr = 601;
        assert_ne!(c.run_id(), d.run_id());
    }
}

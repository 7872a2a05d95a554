//! Unsplit wave-propagation update with cell capacities.
//!
//! A step first bounds the face speeds by the cell sound speeds to pick the
//! time step.
//! The update then runs over blocks of angular rows: each block decomposes
//! the faces it touches (recomputing a one-row halo), forms the
//! second-order and transverse correction fluxes, and gathers them per cell.
//! Every face quantity is a pure function of the input field, so blocks can
//! run in parallel and the result does not depend on the thread count.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fv::bc::{BoundarySpec, GhostCells};
use crate::fv::grid::MappedGrid;
use crate::fv::roe::roe_speed;
use crate::gas::{far_field_state, GasLaw, QuadrantData, State};

const MAX_RETRIES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limiter {
    /// Unlimited (Lax-Wendroff) corrections.
    None,
    Minmod,
    /// Monotonized central.
    Mc,
}

impl Limiter {
    #[inline]
    pub fn phi(&self, theta: f64) -> f64 {
        match self {
            Limiter::None => 1.0,
            Limiter::Minmod => theta.min(1.0).max(0.0),
            Limiter::Mc => (0.5 * (1.0 + theta)).min(2.0).min(2.0 * theta).max(0.0),
        }
    }

    /// `phi(upwind / a) * a` without the division.
    #[inline]
    pub fn limit(&self, a: f64, upwind: f64) -> f64 {
        match self {
            Limiter::None => a,
            _ if a * upwind <= 0.0 => 0.0,
            Limiter::Minmod => a.abs().min(upwind.abs()).copysign(a),
            Limiter::Mc => (0.5 * (a + upwind).abs()).min(2.0 * a.abs()).min(2.0 * upwind.abs()).copysign(a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub cfl: f64,
    pub order: Order,
    pub limiter: Limiter,
    pub t_final: f64,
    pub bc: BoundarySpec,
    pub transverse: bool,
}

impl SolverConfig {
    /// CFL 0.9 to `t = 1`; transverse corrections follow the order.
    pub fn new(order: Order) -> Self {
        Self {
            cfl: 0.9,
            order,
            limiter: Limiter::Mc,
            t_final: 1.0,
            bc: BoundarySpec::default(),
            transverse: order == Order::Second,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0, 1), got {}", self.cfl)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("t_final must be positive, got {}", self.t_final)));
        }
        self.bc.validate()
    }
}

/// Cell averages on a grid at one instant.
#[derive(Debug, Clone)]
pub struct FvField {
    pub grid: Arc<MappedGrid>,
    pub q: Vec<State>,
    pub time: f64,
}

impl FvField {
    /// Quadrant data sampled at the cell centers (`t = 0`).
    pub fn initial(grid: Arc<MappedGrid>, gl: &GasLaw, qd: &QuadrantData) -> Self {
        let q = grid
            .centers()
            .iter()
            .map(|&(x, y)| far_field_state(gl, qd, x, y, 0.0))
            .collect();
        Self { grid, q, time: 0.0 }
    }

    pub fn constant(grid: Arc<MappedGrid>, s: State) -> Self {
        let q = vec![s; grid.len()];
        Self { grid, q, time: 0.0 }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> State {
        self.q[self.grid.index(i, j)]
    }

    /// Area-weighted totals of `(rho, m, n)`.
    pub fn totals(&self) -> [f64; 3] {
        let mut t = [0.0; 3];
        let area = self.grid.area_col();
        for (k, s) in self.q.iter().enumerate() {
            let a = area[k % area.len()];
            t[0] += a * s.rho;
            t[1] += a * s.m;
            t[2] += a * s.n;
        }
        t
    }

    pub fn density_range(&self) -> (f64, f64) {
        self.q
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.rho), hi.max(s.rho)))
    }
}

/// Ghost layers of `field` at time `t`.
pub fn apply_bc(gl: &GasLaw, qd: &QuadrantData, field: &FvField, bc: &BoundarySpec, t: f64) -> GhostCells {
    let g = &field.grid;
    let mut gh = GhostCells::new(g.n1(), g.n2());
    gh.fill(&field.q, g, gl, qd, bc, t);
    gh
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub dt: f64,
    pub retries: usize,
    /// Net outflow rate of `(rho, m, n)` through the domain boundary.
    pub boundary_outflow: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveLog {
    pub steps: usize,
    pub retries: usize,
    pub dt_min: f64,
    pub dt_max: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct FaceWave {
    c: f64,
    inv_c: f64,
    // strengths of the -c and +c waves; the 0-speed wave carries no fluctuation
    a_minus: f64,
    a_plus: f64,
}

impl FaceWave {
    #[inline]
    fn new(gl: &GasLaw, l: &State, r: &State, (nx, ny): (f64, f64)) -> Self {
        let pl = gl.pressure_unchecked(l.rho);
        let pr = gl.pressure_unchecked(r.rho);
        let c = roe_speed(gl, l.rho, r.rho, pl, pr);
        let inv_c = 1.0 / c;
        let h = ((r.m - l.m) * nx + (r.n - l.n) * ny) * inv_c;
        let d = r.rho - l.rho;
        Self {
            c,
            inv_c,
            a_minus: 0.5 * (d - h),
            a_plus: 0.5 * (d + h),
        }
    }

    /// `len * A^- dQ`.
    #[inline]
    fn amdq(&self, (nx, ny): (f64, f64), len: f64) -> [f64; 3] {
        let k = -self.c * self.a_minus * len;
        [k, -self.c * k * nx, -self.c * k * ny]
    }

    /// `len * A^+ dQ`.
    #[inline]
    fn apdq(&self, (nx, ny): (f64, f64), len: f64) -> [f64; 3] {
        let k = self.c * self.a_plus * len;
        [k, self.c * k * nx, self.c * k * ny]
    }
}

#[inline]
fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
fn axpy(acc: &mut [f64; 3], s: f64, v: &[f64; 3]) {
    acc[0] += s * v[0];
    acc[1] += s * v[1];
    acc[2] += s * v[2];
}

#[inline]
fn scaled(s: f64, v: [f64; 3]) -> [f64; 3] {
    [s * v[0], s * v[1], s * v[2]]
}

const BLOCK_ROWS: usize = 16;

/// Read access to interior rows and ghost rows of the current field.
struct Rows<'a> {
    q: &'a [State],
    ghosts: &'a GhostCells,
    n1: usize,
    n2: usize,
}

impl<'a> Rows<'a> {
    #[inline]
    fn row(&self, j: isize) -> &'a [State] {
        if j >= 0 && (j as usize) < self.n2 {
            let j = j as usize;
            &self.q[j * self.n1..(j + 1) * self.n1]
        } else {
            self.ghosts.row(j)
        }
    }
}

/// Reusable per-task buffers of the update pass.
#[derive(Default)]
struct Scratch {
    w1: Vec<FaceWave>,
    d1: Vec<[f64; 3]>,
    prow: Vec<State>,
    w2: Vec<FaceWave>,
    g2: Vec<[f64; 3]>,
    d2: Vec<[f64; 3]>,
    g1: Vec<[f64; 3]>,
}

/// Per-block outcome of the update pass.
struct BlockResult {
    outflow: [f64; 3],
    bad: Option<(usize, usize)>,
}

/// Wave-propagation solver bound to one grid and data set.
pub struct Solver {
    gl: GasLaw,
    qd: QuadrantData,
    cfg: SolverConfig,
    grid: Arc<MappedGrid>,
    ghosts: GhostCells,
    next: Vec<State>,
}

impl Solver {
    pub fn new(gl: GasLaw, qd: QuadrantData, cfg: SolverConfig, grid: Arc<MappedGrid>) -> Result<Self> {
        cfg.validate()?;
        let (n1, n2) = (grid.n1(), grid.n2());
        Ok(Self {
            gl,
            qd,
            cfg,
            ghosts: GhostCells::new(n1, n2),
            next: vec![State::default(); n1 * n2],
            grid,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// Advances `field` by one step, never past `cfg.t_final`.
    pub fn step(&mut self, field: &mut FvField) -> Result<StepStats> {
        if field.q.len() != self.grid.len() {
            return Err(Error::Config("field and solver grids differ".into()));
        }
        let remaining = self.cfg.t_final - field.time;
        if !(remaining > 0.0) {
            return Err(Error::Config("field already at t_final".into()));
        }
        self.ghosts
            .fill(&field.q, &self.grid, &self.gl, &self.qd, &self.cfg.bc, field.time);

        let mut dt = (self.cfg.cfl / self.max_rate(&field.q)).min(remaining);
        let mut clipped = dt == remaining;
        for retries in 0..=MAX_RETRIES {
            match self.update(&field.q, dt) {
                Ok(outflow) => {
                    std::mem::swap(&mut field.q, &mut self.next);
                    field.time = if clipped { self.cfg.t_final } else { field.time + dt };
                    return Ok(StepStats {
                        dt,
                        retries,
                        boundary_outflow: outflow,
                    });
                }
                Err(e) if retries == MAX_RETRIES => return Err(e),
                Err(_) => {
                    dt *= 0.5;
                    clipped = false;
                }
            }
        }
        unreachable!()
    }

    /// Steps until `cfg.t_final`, calling `observe` after every step.
    pub fn run(&mut self, field: &mut FvField, mut observe: impl FnMut(&FvField, &StepStats)) -> Result<SolveLog> {
        let start = Instant::now();
        let mut log = SolveLog {
            steps: 0,
            retries: 0,
            dt_min: f64::INFINITY,
            dt_max: 0.0,
            wall_seconds: 0.0,
        };
        while field.time < self.cfg.t_final {
            let st = self.step(field)?;
            log.steps += 1;
            log.retries += st.retries;
            log.dt_min = log.dt_min.min(st.dt);
            log.dt_max = log.dt_max.max(st.dt);
            observe(field, &st);
        }
        log.wall_seconds = start.elapsed().as_secs_f64();
        Ok(log)
    }

    fn blocks(&self) -> Vec<(usize, usize)> {
        let n2 = self.grid.n2();
        (0..n2)
            .step_by(BLOCK_ROWS)
            .map(|j0| (j0, (j0 + BLOCK_ROWS).min(n2)))
            .collect()
    }

    /// Largest `max face speed * max edge / area` over all cells.
    /// Upper bound of `max_face_speed * max_edge / area` over all cells.
    ///
    /// The Roe speed of a face never exceeds the larger of the two cell sound
    /// speeds (`p` is convex in `rho`), so a per-column density maximum over
    /// the cell and its neighbours bounds every face speed of that column.
    fn max_rate(&self, q: &[State]) -> f64 {
        let grid = &*self.grid;
        let (n1, n2) = (grid.n1(), grid.n2());
        let rows = Rows {
            q,
            ghosts: &self.ghosts,
            n1,
            n2,
        };
        let col_max = self
            .blocks()
            .into_par_iter()
            .map(|(j0, j1)| {
                let mut m = vec![0.0f64; n1];
                let lo = if j0 == 0 { -1 } else { j0 as isize };
                let hi = if j1 == n2 { n2 as isize + 1 } else { j1 as isize };
                for j in lo..hi {
                    for (mi, s) in m.iter_mut().zip(rows.row(j)) {
                        *mi = mi.max(s.rho);
                    }
                }
                m
            })
            .reduce(
                || vec![0.0; n1],
                |mut a, b| {
                    a.iter_mut().zip(&b).for_each(|(x, y)| *x = x.max(*y));
                    a
                },
            );
        let mut edge = (0.0f64, 0.0f64);
        for j in 0..n2 as isize {
            edge.0 = edge.0.max(self.ghosts.get(-1, j).map_or(0.0, |s| s.rho));
            edge.1 = edge.1.max(self.ghosts.get(n1 as isize, j).map_or(0.0, |s| s.rho));
        }
        let eoa = grid.edge_over_area();
        (0..n1)
            .map(|i| {
                let lo = if i == 0 { edge.0 } else { col_max[i - 1] };
                let hi = if i + 1 == n1 { edge.1 } else { col_max[i + 1] };
                let rho = lo.max(hi).max(col_max[i]);
                (self.gl.gamma() * self.gl.pressure_unchecked(rho) / rho).sqrt() * eoa[i]
            })
            .fold(0.0, f64::max)
    }

    fn update(&mut self, q: &[State], dt: f64) -> Result<[f64; 3]> {
        let grid = &*self.grid;
        let (n1, n2) = (grid.n1(), grid.n2());
        let rows = Rows {
            q,
            ghosts: &self.ghosts,
            n1,
            n2,
        };
        let gl = self.gl;
        let second = self.cfg.order == Order::Second;
        let transverse = self.cfg.transverse;
        let lim = self.cfg.limiter;
        let area = grid.area_col();
        let len1 = grid.face1_len_col();
        let len2 = grid.face2_len_col();
        let ghosts = &self.ghosts;

        // limited second-order correction flux of face `fw`, whose
        // neighbours along the same axis are `lo` (behind) and `hi` (ahead)
        let wave_correction = |fw: &FaceWave, lo: &FaceWave, hi: &FaceWave, nrm: (f64, f64), len: f64, inv_a: f64| {
            let c = fw.c;
            let k = 0.5 * c * (1.0 - dt * c * len * inv_a) * len;
            let am = lim.limit(fw.a_minus, hi.a_minus);
            let ap = lim.limit(fw.a_plus, lo.a_plus);
            let s = k * (ap - am) * c;
            [k * (am + ap), s * nrm.0, s * nrm.1]
        };
        // flux moving the part of `d` (the total fluctuation entering a cell
        // of area 1/inv_a) that leaves through face `fw`; `left` when the
        // cell is on the negative side of that face
        let transverse_flux = |d: &[f64; 3], fw: &FaceWave, nrm: (f64, f64), len: f64, inv_a: f64, left: bool| {
            let c = fw.c;
            let dn = (d[1] * nrm.0 + d[2] * nrm.1) * fw.inv_c;
            let k = 0.5 * dt * inv_a * len * c;
            let (b, sc) = if left {
                (-k * 0.5 * (d[0] + dn), c)
            } else {
                (k * 0.5 * (d[0] - dn), -c)
            };
            [b, b * sc * nrm.0, b * sc * nrm.1]
        };

        let blocks = self.blocks();
        let mut chunks: Vec<&mut [State]> = Vec::with_capacity(blocks.len());
        let mut rest: &mut [State] = &mut self.next;
        for &(j0, j1) in &blocks {
            let (a, b) = rest.split_at_mut((j1 - j0) * n1);
            chunks.push(a);
            rest = b;
        }

        let results: Vec<BlockResult> = blocks
            .par_iter()
            .zip(chunks.into_par_iter())
            .map_init(Scratch::default, |sc, (&(j0, j1), out)| {
                let nb = j1 - j0;
                let Scratch { w1, d1, prow, w2, g2, d2, g1 } = sc;
                // axis-1 waves for rows j0-1 ..= j1 (real rows only), faces -1 ..= n1+1
                let s1 = n1 + 3;
                w1.resize((nb + 2) * s1, FaceWave::default());
                // fluctuations entering each cell through its axis-1 faces, same rows
                d1.resize((nb + 2) * n1, [0.0; 3]);
                prow.resize(n1 + 4, State::default());
                for r in 0..nb + 2 {
                    let j = j0 as isize - 1 + r as isize;
                    if j < 0 || j >= n2 as isize {
                        continue;
                    }
                    let ju = j as usize;
                    ghosts.padded_row(rows.row(j), ju, prow);
                    let nrm = grid.face1_normal_row(ju);
                    let wr = &mut w1[r * s1..(r + 1) * s1];
                    for (k, fw) in wr.iter_mut().enumerate() {
                        *fw = FaceWave::new(&gl, &prow[k], &prow[k + 1], nrm);
                    }
                    let dr = &mut d1[r * n1..(r + 1) * n1];
                    for i in 0..n1 {
                        dr[i] = add(wr[i + 1].apdq(nrm, len1[i]), wr[i + 2].amdq(nrm, len1[i + 1]));
                    }
                }
                let w1_row = |j: usize| &w1[(j + 1 - j0) * s1..(j + 2 - j0) * s1];
                let d1_row = |j: usize| &d1[(j + 1 - j0) * n1..(j + 2 - j0) * n1];

                // axis-2 waves for face rows j0-1 ..= j1+1
                w2.resize((nb + 3) * n1, FaceWave::default());
                for r in 0..nb + 3 {
                    let f = j0 as isize - 1 + r as isize;
                    let nrm = grid.face2_normal_row(f.clamp(0, n2 as isize) as usize);
                    let (a, b) = (rows.row(f - 1), rows.row(f));
                    for (i, fw) in w2[r * n1..(r + 1) * n1].iter_mut().enumerate() {
                        *fw = FaceWave::new(&gl, &a[i], &b[i], nrm);
                    }
                }
                let w2_row = |f: usize| &w2[(f + 1 - j0) * n1..(f + 2 - j0) * n1];

                // axis-2 correction fluxes for face rows j0 ..= j1
                g2.clear();
                g2.resize((nb + 1) * n1, [0.0; 3]);
                if second || transverse {
                    for f in j0..=j1 {
                        let nrm = grid.face2_normal_row(f);
                        let (wlo, wf, whi) = (w2_row(f - 1 + usize::from(f == 0)), w2_row(f), w2_row(f + 1));
                        // face row -1 sits just before row 0 in the buffer
                        let wlo = if f == 0 { &w2[..n1] } else { wlo };
                        let gr = &mut g2[(f - j0) * n1..(f - j0 + 1) * n1];
                        for i in 0..n1 {
                            let inv_a = 1.0 / area[i];
                            let mut g = [0.0; 3];
                            if second {
                                g = wave_correction(&wf[i], &wlo[i], &whi[i], nrm, len2[i], inv_a);
                            }
                            if transverse {
                                if f >= 1 {
                                    let d = &d1_row(f - 1)[i];
                                    g = add(g, transverse_flux(d, &wf[i], nrm, len2[i], inv_a, true));
                                }
                                if f < n2 {
                                    let d = &d1_row(f)[i];
                                    g = add(g, transverse_flux(d, &wf[i], nrm, len2[i], inv_a, false));
                                }
                            }
                            gr[i] = g;
                        }
                    }
                }

                let mut res = BlockResult {
                    outflow: [0.0; 3],
                    bad: None,
                };
                d2.resize(n1, [0.0; 3]);
                g1.resize(n1 + 1, [0.0; 3]);
                for j in j0..j1 {
                    let wr = w1_row(j);
                    let nrm1 = grid.face1_normal_row(j);
                    let (wlo2, whi2) = (w2_row(j), w2_row(j + 1));
                    let (nlo2, nhi2) = (grid.face2_normal_row(j), grid.face2_normal_row(j + 1));
                    for i in 0..n1 {
                        d2[i] = add(wlo2[i].apdq(nlo2, len2[i]), whi2[i].amdq(nhi2, len2[i]));
                    }
                    for (i, g) in g1.iter_mut().enumerate() {
                        *g = [0.0; 3];
                        if second {
                            let al = area[i.saturating_sub(1)];
                            let ar = area[i.min(n1 - 1)];
                            let inv_a = 0.5 * (1.0 / al + 1.0 / ar);
                            *g = wave_correction(&wr[i + 1], &wr[i], &wr[i + 2], nrm1, len1[i], inv_a);
                        }
                        if transverse {
                            if i >= 1 {
                                let t = transverse_flux(&d2[i - 1], &wr[i + 1], nrm1, len1[i], 1.0 / area[i - 1], true);
                                *g = add(*g, t);
                            }
                            if i < n1 {
                                let t = transverse_flux(&d2[i], &wr[i + 1], nrm1, len1[i], 1.0 / area[i], false);
                                *g = add(*g, t);
                            }
                        }
                    }

                    let g2lo = &g2[(j - j0) * n1..(j - j0 + 1) * n1];
                    let g2hi = &g2[(j + 1 - j0) * n1..(j + 2 - j0) * n1];
                    let d1r = d1_row(j);
                    let qrow = rows.row(j as isize);
                    let orow = &mut out[(j - j0) * n1..(j - j0 + 1) * n1];
                    let mut row_ok = true;
                    for i in 0..n1 {
                        let mut acc = add(d1r[i], d2[i]);
                        axpy(&mut acc, 1.0, &g1[i + 1]);
                        axpy(&mut acc, -1.0, &g1[i]);
                        axpy(&mut acc, 1.0, &g2hi[i]);
                        axpy(&mut acc, -1.0, &g2lo[i]);
                        let k = dt / area[i];
                        let s = qrow[i];
                        let o = State::new(s.rho - k * acc[0], s.m - k * acc[1], s.n - k * acc[2]);
                        // a NaN or infinity in any component makes the sum non-finite
                        row_ok &= (o.rho > 0.0) & (o.rho + o.m + o.n).is_finite();
                        orow[i] = o;
                    }
                    if !row_ok && res.bad.is_none() {
                        let i = orow
                            .iter()
                            .position(|o| !(o.rho > 0.0 && (o.rho + o.m + o.n).is_finite()))
                            .unwrap_or(0);
                        res.bad = Some((i, j));
                    }

                    // radial boundary faces of this row
                    let f_in = boundary_flux(&gl, &qrow[0], &wr[1], nrm1, len1[0], &g1[0], false);
                    let f_out = boundary_flux(&gl, &qrow[n1 - 1], &wr[n1 + 1], nrm1, len1[n1], &g1[n1], true);
                    for c in 0..3 {
                        res.outflow[c] += f_out[c] - f_in[c];
                    }
                }
                // angular boundary faces
                if j0 == 0 {
                    let nrm = grid.face2_normal_row(0);
                    let (wr, gr, qr) = (w2_row(0), &g2[..n1], rows.row(0));
                    for i in 0..n1 {
                        let f = boundary_flux(&gl, &qr[i], &wr[i], nrm, len2[i], &gr[i], false);
                        for c in 0..3 {
                            res.outflow[c] -= f[c];
                        }
                    }
                }
                if j1 == n2 {
                    let nrm = grid.face2_normal_row(n2);
                    let (wr, gr, qr) = (w2_row(n2), &g2[nb * n1..], rows.row(n2 as isize - 1));
                    for i in 0..n1 {
                        let f = boundary_flux(&gl, &qr[i], &wr[i], nrm, len2[i], &gr[i], true);
                        for c in 0..3 {
                            res.outflow[c] += f[c];
                        }
                    }
                }
                res
            })
            .collect();

        let mut outflow = [0.0; 3];
        for r in &results {
            if let Some((i, j)) = r.bad {
                return Err(Error::Solver {
                    i,
                    j,
                    msg: format!("density not positive after {MAX_RETRIES} time-step halvings"),
                });
            }
            for c in 0..3 {
                outflow[c] += r.outflow[c];
            }
        }
        Ok(outflow)
    }
}

/// Numerical flux (times length, plus correction flux) through a boundary
/// face along its normal; `interior_left` when the interior cell is on the
/// negative side.
#[inline]
fn boundary_flux(gl: &GasLaw, s: &State, fw: &FaceWave, nrm: (f64, f64), len: f64, g: &[f64; 3], interior_left: bool) -> [f64; 3] {
    let p = gl.pressure_unchecked(s.rho);
    let f = [len * (s.m * nrm.0 + s.n * nrm.1), len * p * nrm.0, len * p * nrm.1];
    let fl = if interior_left { fw.amdq(nrm, len) } else { scaled(-1.0, fw.apdq(nrm, len)) };
    [f[0] + fl[0] + g[0], f[1] + fl[1] + g[1], f[2] + fl[2] + g[2]]
}

/// Runs the four-quadrant problem from the quadrant data to `cfg.t_final`.
pub fn solve(gl: &GasLaw, qd: &QuadrantData, grid: Arc<MappedGrid>, cfg: &SolverConfig) -> Result<(FvField, SolveLog)> {
    let mut field = FvField::initial(grid.clone(), gl, qd);
    let mut solver = Solver::new(*gl, *qd, *cfg, grid)?;
    let log = solver.run(&mut field, |_, _| {})?;
    Ok((field, log))
}

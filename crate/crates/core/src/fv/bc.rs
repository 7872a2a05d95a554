//! Ghost-cell boundary conditions.
//!
//! Two ghost layers surround the grid. Far-field edges are filled with the
//! superposition of the two planar rarefactions evaluated at the ghost cell
//! centers, which is exact until the interaction zone reaches the edge.

use crate::fv::grid::MappedGrid;
use crate::gas::{far_field_state, GasLaw, QuadrantData, State};

pub const GHOSTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeBc {
    /// Exact planar-wave composition at the ghost centers.
    FarField,
    /// Zero-order extrapolation of the adjacent interior cell.
    Extrapolate,
    /// Wrap around (axis 2 only, both sides).
    Periodic,
}

/// Boundary treatment per edge: `lo1`/`hi1` are the inner/outer radial edges,
/// `lo2`/`hi2` the first/last angular edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundarySpec {
    pub lo1: EdgeBc,
    pub hi1: EdgeBc,
    pub lo2: EdgeBc,
    pub hi2: EdgeBc,
}

impl Default for BoundarySpec {
    fn default() -> Self {
        Self {
            lo1: EdgeBc::Extrapolate,
            hi1: EdgeBc::FarField,
            lo2: EdgeBc::FarField,
            hi2: EdgeBc::FarField,
        }
    }
}

impl BoundarySpec {
    pub fn all(bc: EdgeBc) -> Self {
        Self {
            lo1: bc,
            hi1: bc,
            lo2: bc,
            hi2: bc,
        }
    }

    pub(crate) fn validate(&self) -> crate::error::Result<()> {
        let p1 = matches!(self.lo1, EdgeBc::Periodic) || matches!(self.hi1, EdgeBc::Periodic);
        let p2 = matches!(self.lo2, EdgeBc::Periodic) != matches!(self.hi2, EdgeBc::Periodic);
        if p1 || p2 {
            return Err(crate::error::Error::Config(
                "periodic boundaries are only supported on both angular edges together".into(),
            ));
        }
        Ok(())
    }
}

/// The ghost layers of a field. Corner ghosts are not stored.
#[derive(Debug, Clone)]
pub struct GhostCells {
    n1: usize,
    n2: usize,
    // [j * 2 + k - 1] holds i = -k (lo1) or i = n1 - 1 + k (hi1)
    lo1: Vec<State>,
    hi1: Vec<State>,
    // [(k - 1) * n1 + i] holds j = -k (lo2) or j = n2 - 1 + k (hi2)
    lo2: Vec<State>,
    hi2: Vec<State>,
}

impl GhostCells {
    pub fn new(n1: usize, n2: usize) -> Self {
        Self {
            n1,
            n2,
            lo1: vec![State::default(); GHOSTS * n2],
            hi1: vec![State::default(); GHOSTS * n2],
            lo2: vec![State::default(); GHOSTS * n1],
            hi2: vec![State::default(); GHOSTS * n1],
        }
    }

    /// Ghost value at signed indices; `None` for interior cells and corners.
    pub fn get(&self, i: isize, j: isize) -> Option<State> {
        let (n1, n2) = (self.n1 as isize, self.n2 as isize);
        let g = GHOSTS as isize;
        let in1 = (0..n1).contains(&i);
        let in2 = (0..n2).contains(&j);
        match (in1, in2) {
            (true, false) if j < 0 && j >= -g => Some(self.lo2[(-j - 1) as usize * self.n1 + i as usize]),
            (true, false) if j >= n2 && j < n2 + g => Some(self.hi2[(j - n2) as usize * self.n1 + i as usize]),
            (false, true) if i < 0 && i >= -g => Some(self.lo1[j as usize * GHOSTS + (-i - 1) as usize]),
            (false, true) if i >= n1 && i < n1 + g => Some(self.hi1[j as usize * GHOSTS + (i - n1) as usize]),
            _ => None,
        }
    }

    /// Ghost row `j` (`-2, -1, n2, n2 + 1`) over the interior columns.
    #[inline]
    pub(crate) fn row(&self, j: isize) -> &[State] {
        let n1 = self.n1;
        if j < 0 {
            let k = (-j - 1) as usize;
            &self.lo2[k * n1..(k + 1) * n1]
        } else {
            let k = j as usize - self.n2;
            &self.hi2[k * n1..(k + 1) * n1]
        }
    }

    /// Writes row `j` padded with its axis-1 ghosts into `out` (length `n1 + 4`).
    #[inline]
    pub(crate) fn padded_row(&self, interior: &[State], j: usize, out: &mut [State]) {
        let n1 = self.n1;
        out[0] = self.lo1[j * GHOSTS + 1];
        out[1] = self.lo1[j * GHOSTS];
        out[2..n1 + 2].copy_from_slice(interior);
        out[n1 + 2] = self.hi1[j * GHOSTS];
        out[n1 + 3] = self.hi1[j * GHOSTS + 1];
    }

    pub(crate) fn fill(
        &mut self,
        q: &[State],
        grid: &MappedGrid,
        gl: &GasLaw,
        qd: &QuadrantData,
        bc: &BoundarySpec,
        t: f64,
    ) {
        let (n1, n2) = (self.n1, self.n2);
        let far = |i: isize, j: isize| {
            let (x, y) = grid.center_signed(i, j);
            far_field_state(gl, qd, x, y, t)
        };
        for k in 1..=GHOSTS {
            let ki = k as isize;
            for i in 0..n1 {
                let slot = (k - 1) * n1 + i;
                self.lo2[slot] = match bc.lo2 {
                    EdgeBc::FarField => far(i as isize, -ki),
                    EdgeBc::Extrapolate => q[i],
                    EdgeBc::Periodic => q[(n2 * GHOSTS - k) % n2 * n1 + i],
                };
                self.hi2[slot] = match bc.hi2 {
                    EdgeBc::FarField => far(i as isize, n2 as isize - 1 + ki),
                    EdgeBc::Extrapolate => q[(n2 - 1) * n1 + i],
                    EdgeBc::Periodic => q[(k - 1) % n2 * n1 + i],
                };
            }
            for j in 0..n2 {
                let slot = j * GHOSTS + k - 1;
                self.lo1[slot] = match bc.lo1 {
                    EdgeBc::FarField => far(-ki, j as isize),
                    _ => q[j * n1],
                };
                self.hi1[slot] = match bc.hi1 {
                    EdgeBc::FarField => far(n1 as isize - 1 + ki, j as isize),
                    _ => q[j * n1 + n1 - 1],
                };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fv::grid::Bounds;
    use crate::gas::{four_quadrant_states, planar_rarefaction, PlanarWave};
    use std::f64::consts::PI;

    fn setup() -> (GasLaw, QuadrantData, MappedGrid) {
        let gl = GasLaw::new(3.0).unwrap();
        let qd = four_quadrant_states(&gl, 0.5, 0.25).unwrap();
        let g = MappedGrid::polar(20, 36, Bounds::annulus(0.01, 1.0, 0.0, 1.5 * PI)).unwrap();
        (gl, qd, g)
    }

    #[test]
    fn initial_ghosts_are_quadrant_constants() {
        let (gl, qd, g) = setup();
        let mut gh = GhostCells::new(g.n1(), g.n2());
        gh.fill(&vec![qd.u2; g.len()], &g, &gl, &qd, &BoundarySpec::default(), 0.0);
        // outer edge: quadrant 1 rows give U1, quadrant 3 rows give U3
        assert_eq!(gh.get(20, 3), Some(qd.u1));
        assert_eq!(gh.get(21, 14), Some(qd.u2));
        assert_eq!(gh.get(20, 30), Some(qd.u3));
        // both angular edges lie in quadrant 4
        assert_eq!(gh.get(5, -1), Some(qd.u4));
        assert_eq!(gh.get(5, 36), Some(qd.u4));
        assert_eq!(gh.get(5, 37), Some(qd.u4));
        // inner edge extrapolates
        assert_eq!(gh.get(-1, 3), Some(qd.u2));
        assert_eq!(gh.get(3, 3), None);
        assert_eq!(gh.get(-1, -1), None);
    }

    #[test]
    fn outer_ghosts_follow_planar_waves() {
        let (gl, qd, g) = setup();
        let mut gh = GhostCells::new(g.n1(), g.n2());
        let t = 0.5;
        gh.fill(&vec![qd.u2; g.len()], &g, &gl, &qd, &BoundarySpec::default(), t);
        let mut in_fan = 0;
        for j in 0..g.n2() as isize {
            let (x, y) = g.center_signed(20, j);
            let s = gh.get(20, j).unwrap();
            if x > 0.0 && y > 0.0 {
                assert_eq!(s, planar_rarefaction(&gl, &qd, PlanarWave::R14, y / t));
                if y / t > qd.c4 && y / t < qd.c1 {
                    in_fan += 1;
                }
            }
            if x > 0.0 && y < 0.0 {
                assert_eq!(s, qd.u4);
            }
        }
        assert!(in_fan > 0);
    }

    #[test]
    fn periodic_wraps() {
        let (gl, qd, g) = setup();
        let mut gh = GhostCells::new(g.n1(), g.n2());
        let cells: Vec<State> = (0..g.len()).map(|k| State::new(1.0 + k as f64, 0.0, 0.0)).collect();
        let bc = BoundarySpec {
            lo2: EdgeBc::Periodic,
            hi2: EdgeBc::Periodic,
            ..BoundarySpec::default()
        };
        gh.fill(&cells, &g, &gl, &qd, &bc, 0.0);
        let at = |i: usize, j: usize| cells[g.index(i, j)];
        assert_eq!(gh.get(4, -1), Some(at(4, 35)));
        assert_eq!(gh.get(4, -2), Some(at(4, 34)));
        assert_eq!(gh.get(4, 36), Some(at(4, 0)));
        assert_eq!(gh.get(4, 37), Some(at(4, 1)));
        assert!(BoundarySpec { lo2: EdgeBc::Periodic, ..BoundarySpec::default() }.validate().is_err());
    }
}

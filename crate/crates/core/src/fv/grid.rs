//! Logically rectangular quadrilateral grids obtained by mapping a uniform
//! computational grid into the physical plane.
//!
//! Cells have straight edges joining the mapped nodes, so each cell is an
//! exact quadrilateral and the outward edge normals of every cell (scaled
//! by edge length) sum to zero. The capacity of a cell is its physical area
//! divided by the computational cell area.
//!
//! Axis 1 is the radial direction (`i`), axis 2 the angular direction (`j`).
//! Cells are stored with `i` fastest: `index = j * n1 + i`.
//!
//! Both supported mappings make all cells of one column congruent, so edge
//! lengths and areas are stored per column and normals per row.

use crate::error::{Error, Result};

/// The map from computational coordinates to the physical plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mapping {
    /// `(r, theta) -> (r cos theta, r sin theta)`.
    Polar,
    /// Identity.
    Cartesian,
}

impl Mapping {
    #[inline]
    pub fn map(&self, a: f64, b: f64) -> (f64, f64) {
        match self {
            Mapping::Polar => (a * b.cos(), a * b.sin()),
            Mapping::Cartesian => (a, b),
        }
    }
}

/// Extent of the computational domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lo1: f64,
    pub hi1: f64,
    pub lo2: f64,
    pub hi2: f64,
}

impl Bounds {
    /// Annular sector `rmin <= r <= rmax`, `thetamin <= theta <= thetamax` (radians).
    pub fn annulus(rmin: f64, rmax: f64, thetamin: f64, thetamax: f64) -> Self {
        Self {
            lo1: rmin,
            hi1: rmax,
            lo2: thetamin,
            hi2: thetamax,
        }
    }

    pub fn rect(xlo: f64, xhi: f64, ylo: f64, yhi: f64) -> Self {
        Self {
            lo1: xlo,
            hi1: xhi,
            lo2: ylo,
            hi2: yhi,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MappedGrid {
    mapping: Mapping,
    n1: usize,
    n2: usize,
    bounds: Bounds,
    d1: f64,
    d2: f64,
    /// Cell area per column.
    area: Vec<f64>,
    /// Longest cell edge over area, per column.
    edge_over_area: Vec<f64>,
    center: Vec<(f64, f64)>,
    /// Length of the axis-1 faces, per face column `0..=n1`.
    face1_len: Vec<f64>,
    /// Normal of the axis-1 faces of row `j`, pointing towards increasing `i`.
    face1_normal: Vec<(f64, f64)>,
    /// Length of the axis-2 faces, per column.
    face2_len: Vec<f64>,
    /// Normal of the axis-2 faces of face row `0..=n2`, towards increasing `j`.
    face2_normal: Vec<(f64, f64)>,
}

/// Alias used where the grid is known to be the polar one.
pub type PolarGrid = MappedGrid;

impl MappedGrid {
    /// Polar grid on an annular sector with `nr` radial and `ntheta` angular cells.
    pub fn polar(nr: usize, ntheta: usize, bounds: Bounds) -> Result<Self> {
        if !(bounds.lo1 > 0.0) {
            return Err(Error::Config(format!("rmin must be positive, got {}", bounds.lo1)));
        }
        if bounds.hi2 - bounds.lo2 > 2.0 * std::f64::consts::PI + 1e-12 {
            return Err(Error::Config("angular extent exceeds a full turn".into()));
        }
        Self::build(Mapping::Polar, nr, ntheta, bounds)
    }

    /// Uniform Cartesian grid (axis 1 = x, axis 2 = y).
    pub fn cartesian(nx: usize, ny: usize, bounds: Bounds) -> Result<Self> {
        Self::build(Mapping::Cartesian, nx, ny, bounds)
    }

    fn build(mapping: Mapping, n1: usize, n2: usize, b: Bounds) -> Result<Self> {
        if n1 < 1 || n2 < 1 {
            return Err(Error::Config(format!("grid needs at least one cell per axis, got {n1}x{n2}")));
        }
        let finite = [b.lo1, b.hi1, b.lo2, b.hi2].iter().all(|v| v.is_finite());
        if !finite || !(b.hi1 > b.lo1) || !(b.hi2 > b.lo2) {
            return Err(Error::Config(format!("degenerate grid bounds {b:?}")));
        }
        let d1 = (b.hi1 - b.lo1) / n1 as f64;
        let d2 = (b.hi2 - b.lo2) / n2 as f64;
        let c1 = |i: usize| b.lo1 + i as f64 * d1;
        let c2 = |j: usize| b.lo2 + j as f64 * d2;

        let (face1_len, face1_normal, face2_len, face2_normal, area): (Vec<f64>, Vec<_>, Vec<f64>, Vec<_>, Vec<f64>) =
            match mapping {
                Mapping::Polar => {
                    let chord = 2.0 * (0.5 * d2).sin();
                    (
                        (0..=n1).map(|i| c1(i) * chord).collect(),
                        (0..n2)
                            .map(|j| {
                                let t = b.lo2 + (j as f64 + 0.5) * d2;
                                (t.cos(), t.sin())
                            })
                            .collect(),
                        vec![d1; n1],
                        (0..=n2).map(|j| (-c2(j).sin(), c2(j).cos())).collect(),
                        (0..n1)
                            .map(|i| 0.5 * d2.sin() * (c1(i + 1) * c1(i + 1) - c1(i) * c1(i)))
                            .collect(),
                    )
                }
                Mapping::Cartesian => (
                    vec![d2; n1 + 1],
                    vec![(1.0, 0.0); n2],
                    vec![d1; n1],
                    vec![(0.0, 1.0); n2 + 1],
                    vec![d1 * d2; n1],
                ),
            };
        if let Some(i) = area.iter().position(|a| !(*a > 0.0)) {
            return Err(Error::Config(format!("column {i} has non-positive cell area")));
        }
        let edge_over_area = (0..n1)
            .map(|i| face1_len[i].max(face1_len[i + 1]).max(face2_len[i]) / area[i])
            .collect();
        let mut center = Vec::with_capacity(n1 * n2);
        for j in 0..n2 {
            for i in 0..n1 {
                center.push(mapping.map(b.lo1 + (i as f64 + 0.5) * d1, b.lo2 + (j as f64 + 0.5) * d2));
            }
        }
        Ok(Self {
            mapping,
            n1,
            n2,
            bounds: b,
            d1,
            d2,
            area,
            edge_over_area,
            center,
            face1_len,
            face1_normal,
            face2_len,
            face2_normal,
        })
    }

    pub fn mapping(&self) -> Mapping {
        self.mapping
    }

    /// Cells along axis 1 (radial).
    pub fn n1(&self) -> usize {
        self.n1
    }

    /// Cells along axis 2 (angular).
    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn spacing(&self) -> (f64, f64) {
        (self.d1, self.d2)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n1 + i
    }

    #[inline]
    pub fn area(&self, i: usize, _j: usize) -> f64 {
        self.area[i]
    }

    #[inline]
    pub fn capacity(&self, i: usize, j: usize) -> f64 {
        self.area(i, j) / (self.d1 * self.d2)
    }

    /// Physical position of the mapped computational cell center.
    #[inline]
    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        self.center[self.index(i, j)]
    }

    pub fn centers(&self) -> &[(f64, f64)] {
        &self.center
    }

    /// Computational coordinates of a cell center, `(r, theta)` on a polar grid.
    #[inline]
    pub fn comp_center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.bounds.lo1 + (i as f64 + 0.5) * self.d1,
            self.bounds.lo2 + (j as f64 + 0.5) * self.d2,
        )
    }

    /// Physical position of a ghost or interior center at signed indices.
    pub fn center_signed(&self, i: isize, j: isize) -> (f64, f64) {
        self.mapping.map(
            self.bounds.lo1 + (i as f64 + 0.5) * self.d1,
            self.bounds.lo2 + (j as f64 + 0.5) * self.d2,
        )
    }

    #[inline]
    pub fn area_col(&self) -> &[f64] {
        &self.area
    }

    #[inline]
    pub(crate) fn edge_over_area(&self) -> &[f64] {
        &self.edge_over_area
    }

    #[inline]
    pub(crate) fn face1_len_col(&self) -> &[f64] {
        &self.face1_len
    }

    #[inline]
    pub(crate) fn face2_len_col(&self) -> &[f64] {
        &self.face2_len
    }

    #[inline]
    pub(crate) fn face1_normal_row(&self, j: usize) -> (f64, f64) {
        self.face1_normal[j]
    }

    #[inline]
    pub(crate) fn face2_normal_row(&self, j: usize) -> (f64, f64) {
        self.face2_normal[j]
    }

    /// Axis-1 face between cells `(i - 1, j)` and `(i, j)`: unit normal and length.
    #[inline]
    pub fn face1(&self, i: usize, j: usize) -> ((f64, f64), f64) {
        (self.face1_normal[j], self.face1_len[i])
    }

    /// Axis-2 face between cells `(i, j - 1)` and `(i, j)`: unit normal and length.
    #[inline]
    pub fn face2(&self, i: usize, j: usize) -> ((f64, f64), f64) {
        (self.face2_normal[j], self.face2_len[i])
    }

    pub fn total_area(&self) -> f64 {
        self.area.iter().sum::<f64>() * self.n2 as f64
    }

    /// Sum over the cell's edges of `length * outward normal`; zero for a closed polygon.
    pub fn closure_defect(&self, i: usize, j: usize) -> (f64, f64) {
        let ((a, b), la) = self.face1(i, j);
        let ((c, d), lc) = self.face1(i + 1, j);
        let ((e, f), le) = self.face2(i, j);
        let ((g, h), lg) = self.face2(i, j + 1);
        (
            -la * a + lc * c - le * e + lg * g,
            -la * b + lc * d - le * f + lg * h,
        )
    }

    /// Nearest cell row to the axis-2 coordinate, or `None` outside the range.
    pub fn row_of(&self, coord2: f64) -> Option<usize> {
        let b = self.bounds;
        if !(coord2 >= b.lo2 - 1e-12 && coord2 <= b.hi2 + 1e-12) {
            return None;
        }
        let j = ((coord2 - b.lo2) / self.d2 - 0.5).round();
        Some((j.max(0.0) as usize).min(self.n2 - 1))
    }
}

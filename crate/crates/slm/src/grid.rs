use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Result, SlmError};

/// Deepest refinement level. Keeps every vertex index below 2^53 so dyadic
/// fractions stay exactly representable in f64 and cross-shift comparisons
/// fit in u128.
pub const MAX_LEVEL: u32 = 52;

/// Axis-aligned box the search runs in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(SlmError::Domain(format!(
                "need matching non-empty bounds, got {} lower and {} upper",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(SlmError::Domain(format!("axis {i} bounds must be finite")));
            }
            if lo >= hi {
                return Err(SlmError::Domain(format!(
                    "axis {i}: lower {lo} must be below upper {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Square box helper: the same interval on every axis.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn span(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// Real coordinates of a grid point in this box.
    pub fn coords(&self, p: &DyadicPoint) -> Vec<f64> {
        assert_eq!(p.dim(), self.dim(), "point/domain dimension mismatch");
        let scale = (1u64 << p.level) as f64;
        p.k.iter()
            .enumerate()
            // k / 2^level is exact; one rounding each for * and +.
            .map(|(i, &k)| self.lower[i] + (k as f64 / scale) * self.span(i))
            .collect()
    }
}

/// Grid vertex held exactly: unit-cube coordinates k / 2^level per axis.
/// Always canonical (level 0, or some index odd), so structural equality
/// coincides with geometric equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DyadicPoint {
    level: u32,
    k: Vec<u64>,
}

impl DyadicPoint {
    /// Build from indices at a given level, reducing to canonical form.
    /// Levels up to MAX_LEVEL + 1 are representable: labeling looks at the
    /// half-step grid below the deepest cell level.
    pub fn new(level: u32, k: Vec<u64>) -> Self {
        debug_assert!(level <= MAX_LEVEL + 1);
        debug_assert!(k.iter().all(|&ki| ki <= 1u64 << level));
        let mut p = Self { level, k };
        while p.level > 0 && p.k.iter().all(|ki| ki % 2 == 0) {
            for ki in &mut p.k {
                *ki /= 2;
            }
            p.level -= 1;
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn indices(&self) -> &[u64] {
        &self.k
    }

    /// Indices of this point on the (finer or equal) grid at `level`.
    /// None if the point is not on that grid.
    pub fn indices_at_level(&self, level: u32) -> Option<Vec<u64>> {
        if level < self.level {
            return None;
        }
        let shift = level - self.level;
        Some(self.k.iter().map(|&ki| ki << shift).collect())
    }

    /// Unit-cube coordinates (exact in f64 up to MAX_LEVEL).
    pub fn unit_coords(&self) -> Vec<f64> {
        let scale = (1u64 << self.level) as f64;
        self.k.iter().map(|&ki| ki as f64 / scale).collect()
    }
}

impl PartialOrd for DyadicPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicPoint {
    /// Lexicographic over axes, each axis compared as the exact rational
    /// k / 2^level via cross multiplication.
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.k.iter().zip(&other.k) {
            let left = (*a as u128) << other.level;
            let right = (*b as u128) << self.level;
            match left.cmp(&right) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl fmt::Display for DyadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let denom = 1u64 << self.level;
        write!(f, "[")?;
        for (i, ki) in self.k.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if self.level == 0 {
                write!(f, "{ki}")?;
            } else {
                write!(f, "{ki}/{denom}")?;
            }
        }
        write!(f, "]")
    }
}

/// Point rendering shared by every output surface: "(x1, x2, ...)" with
/// plain f64 formatting.
pub fn format_coords(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(f64::to_string).collect();
    format!("({})", parts.join(", "))
}

/// Integer label attached to a vertex: 0 means no coordinate of the descent
/// direction is negative, i > 0 names the last axis (1-based) on which it is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Label(pub usize);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One grid cell: the box whose lower corner has index `anchor` on the level
/// grid and whose side is span / 2^level per axis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Cell {
    level: u32,
    anchor: Vec<u64>,
}

impl Cell {
    /// The whole domain as one cell.
    pub fn initial(dim: usize) -> Self {
        Self { level: 0, anchor: vec![0; dim] }
    }

    pub fn new(level: u32, anchor: Vec<u64>) -> Self {
        debug_assert!(anchor.iter().all(|&a| a < (1u64 << level)));
        Self { level, anchor }
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn anchor(&self) -> &[u64] {
        &self.anchor
    }

    pub fn corner_count(&self) -> usize {
        1usize << self.dim()
    }

    /// Corner vertices in binary-counter order, axis 0 fastest.
    pub fn vertices(&self) -> Vec<DyadicPoint> {
        let n = self.dim();
        (0..1usize << n)
            .map(|m| {
                let k = self
                    .anchor
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| a + ((m >> i) & 1) as u64)
                    .collect();
                DyadicPoint::new(self.level, k)
            })
            .collect()
    }

    /// Halve every side: 2^n children, one per corner of the unit offset cube.
    pub fn subdivide(&self, max_level: u32) -> Result<Vec<Cell>> {
        if self.level + 1 > max_level {
            return Err(SlmError::RefinementLimit { level: self.level + 1, max: max_level });
        }
        let n = self.dim();
        Ok((0..1usize << n)
            .map(|m| {
                let anchor = self
                    .anchor
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| 2 * a + ((m >> i) & 1) as u64)
                    .collect();
                Cell { level: self.level + 1, anchor }
            })
            .collect())
    }

    /// Longest side in real coordinates.
    pub fn step(&self, domain: &SearchDomain) -> f64 {
        let scale = (1u64 << self.level) as f64;
        (0..self.dim())
            .map(|i| domain.span(i) / scale)
            .fold(0.0, f64::max)
    }

    /// Lower and upper corner in real coordinates.
    pub fn bounds(&self, domain: &SearchDomain) -> (Vec<f64>, Vec<f64>) {
        let lo = domain.coords(&DyadicPoint::new(self.level, self.anchor.clone()));
        let hi_k = self.anchor.iter().map(|&a| a + 1).collect();
        let hi = domain.coords(&DyadicPoint::new(self.level, hi_k));
        (lo, hi)
    }
}

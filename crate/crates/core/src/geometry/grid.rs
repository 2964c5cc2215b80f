use std::f64::consts::PI;

use super::{GeometryError, Point};

/// Minimum number of sampling directions accepted for a grid.
pub const MIN_DIRECTIONS: usize = 64;

/// Fixed set of unit directions on which support functions are sampled.
///
/// Planar grids are equally spaced on the circle; spatial grids use a
/// Fibonacci point set symmetrized so antipodes are present in both cases.
/// All operations combining two bodies require them to carry equal grids.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGrid {
    dim: usize,
    dirs: Vec<Point>,
}

impl DirectionGrid {
    /// Build the standard near-uniform grid: equal angles for `dim == 2`,
    /// an antipodally symmetrized Fibonacci sphere for `dim == 3`.
    ///
    /// `count` must be even and at least 64 so every direction has its
    /// antipode on the grid (widths and bounding data stay exact).
    pub fn uniform(dim: usize, count: usize) -> Result<Self, GeometryError> {
        if count < MIN_DIRECTIONS || count % 2 != 0 {
            return Err(GeometryError::BadDirectionCount(count));
        }
        let dirs = match dim {
            2 => circle(count),
            3 => sphere(count),
            other => return Err(GeometryError::UnsupportedDimension(other)),
        };
        Ok(Self { dim, dirs })
    }

    /// Wrap explicit directions (body files may carry them).  Validates unit
    /// norm, evenness, and for planar grids equal angular spacing.
    pub fn from_directions(dim: usize, dirs: Vec<Point>) -> Result<Self, GeometryError> {
        if dim != 2 && dim != 3 {
            return Err(GeometryError::UnsupportedDimension(dim));
        }
        if dirs.len() < MIN_DIRECTIONS || dirs.len() % 2 != 0 {
            return Err(GeometryError::BadDirectionCount(dirs.len()));
        }
        for (index, d) in dirs.iter().enumerate() {
            let norm = super::norm(*d);
            if (norm - 1.0).abs() > 1e-12 {
                return Err(GeometryError::NotUnit { index, norm });
            }
            if dim == 2 && d[2] != 0.0 {
                return Err(GeometryError::NotUnit { index, norm });
            }
        }
        if dim == 2 {
            let n = dirs.len();
            let step = 2.0 * PI / n as f64;
            let base = dirs[0][1].atan2(dirs[0][0]);
            for (k, d) in dirs.iter().enumerate() {
                let expect = base + step * k as f64;
                let (sx, cx) = expect.sin_cos();
                if (d[0] - cx).abs() > 1e-9 || (d[1] - sx).abs() > 1e-9 {
                    return Err(GeometryError::UnevenGrid);
                }
            }
        }
        Ok(Self { dim, dirs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn dirs(&self) -> &[Point] {
        &self.dirs
    }

    /// Index of the direction opposite `i`.  Exact for both constructions
    /// because grids are built antipodally symmetric.
    pub fn antipode(&self, i: usize) -> usize {
        let n = self.dirs.len();
        (i + n / 2) % n
    }
}

fn circle(count: usize) -> Vec<Point> {
    (0..count)
        .map(|k| {
            let angle = 2.0 * PI * k as f64 / count as f64;
            let (s, c) = angle.sin_cos();
            [c, s, 0.0]
        })
        .collect()
}

/// Fibonacci hemisphere doubled by reflection: `count / 2` spiral points on
/// the upper half sphere followed by their antipodes, so `antipode(i)` is
/// `i + count/2` exactly as in the planar case.
fn sphere(count: usize) -> Vec<Point> {
    let half = count / 2;
    let golden = PI * (3.0 - 5.0_f64.sqrt());
    let mut dirs = Vec::with_capacity(count);
    for k in 0..half {
        // z in (0, 1]: strictly upper hemisphere, no equatorial duplicates.
        let z = 1.0 - k as f64 / half as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden * k as f64;
        let (s, c) = phi.sin_cos();
        let v = [r * c, r * s, z];
        let n = super::norm(v);
        dirs.push([v[0] / n, v[1] / n, v[2] / n]);
    }
    for k in 0..half {
        let d = dirs[k];
        dirs.push([-d[0], -d[1], -d[2]]);
    }
    dirs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_grid_is_unit_and_evenly_spaced() {
        let g = DirectionGrid::uniform(2, 256).unwrap();
        assert_eq!(g.len(), 256);
        for d in g.dirs() {
            assert!((super::super::norm(*d) - 1.0).abs() < 1e-12);
        }
        let step = 2.0 * PI / 256.0;
        for (k, d) in g.dirs().iter().enumerate() {
            let a = step * k as f64;
            assert!((d[0] - a.cos()).abs() < 1e-12);
            assert!((d[1] - a.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn antipodes_are_exact_opposites() {
        for (dim, count) in [(2usize, 64usize), (3, 512)] {
            let g = DirectionGrid::uniform(dim, count).unwrap();
            for i in 0..count {
                let j = g.antipode(i);
                let d = g.dirs()[i];
                let e = g.dirs()[j];
                for c in 0..3 {
                    assert!(
                        (d[c] + e[c]).abs() < 1e-12,
                        "antipode mismatch at {i} ({dim}d)"
                    );
                }
            }
        }
    }

    #[test]
    fn sphere_grid_is_unit() {
        let g = DirectionGrid::uniform(3, 512).unwrap();
        for d in g.dirs() {
            assert!((super::super::norm(*d) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_small_or_odd_counts() {
        assert!(DirectionGrid::uniform(2, 32).is_err());
        assert!(DirectionGrid::uniform(2, 65).is_err());
        assert!(DirectionGrid::uniform(4, 64).is_err());
    }
}

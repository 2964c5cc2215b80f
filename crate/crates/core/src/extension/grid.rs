use crate::geometry::ConvexBody;

use super::ExtensionError;

/// Grid resolution and box-size knobs.
#[derive(Debug, Clone, Copy)]
pub struct ExtensionParams {
    /// Box half-width as a multiple of the body circumradius (at least 4).
    pub box_factor: f64,
    /// Grid cells across the body inradius (at least 10).
    pub cells_per_inradius: f64,
    /// Target for the maximal 7-point stencil residual.
    pub residual_target: f64,
    pub max_sweeps: usize,
}

impl Default for ExtensionParams {
    fn default() -> Self {
        Self {
            box_factor: 4.0,
            cells_per_inradius: 12.0,
            residual_target: 1e-8,
            max_sweeps: 40_000,
        }
    }
}

/// Uniform grid on the half-space box `[cx-L, cx+L] x [cy-L, cy+L] x [0, L]`.
///
/// The floor `z = 0` carries the body mask (Dirichlet 1); floor points off
/// the mask use the even reflection of the full-space problem.  Node `(i, j, k)`
/// sits at `(cx - L + i h, cy - L + j h, k h)` with `0 <= i, j <= 2 m` and
/// `0 <= k <= m`.
#[derive(Debug, Clone)]
pub struct ExtensionGrid {
    h: f64,
    half_width: f64,
    m: usize,
    center: [f64; 2],
    circumradius: f64,
    mask: Vec<bool>,
}

impl ExtensionGrid {
    pub fn build(body: &ConvexBody, params: &ExtensionParams) -> Result<Self, ExtensionError> {
        if body.dim() != 2 {
            return Err(ExtensionError::PlanarOnly(body.dim()));
        }
        if !(params.box_factor >= 4.0) {
            return Err(ExtensionError::BadParams(format!(
                "box factor {} is below 4 circumradii",
                params.box_factor
            )));
        }
        if !(params.cells_per_inradius >= 10.0) {
            return Err(ExtensionError::BadParams(format!(
                "{} cells per inradius leaves cells coarser than a tenth of it",
                params.cells_per_inradius
            )));
        }
        let (lo, hi) = body.bounding_box();
        let center = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
        let circumradius = body.outer_radius_about([center[0], center[1], 0.0]);
        let half_width = params.box_factor * circumradius;
        // Slab width bounds the inradius from above (tight for symmetric
        // bodies), so this keeps h at or below inradius/10.
        let h_target = 0.5 * body.min_width() / params.cells_per_inradius;
        let m = (half_width / h_target).ceil().max(4.0) as usize;
        let h = half_width / m as f64;

        let nx = 2 * m + 1;
        let mut mask = vec![false; nx * nx];
        let mut any = false;
        for j in 0..nx {
            for i in 0..nx {
                let x = center[0] - half_width + i as f64 * h;
                let y = center[1] - half_width + j as f64 * h;
                if body.contains_point([x, y, 0.0]) {
                    mask[j * nx + i] = true;
                    any = true;
                }
            }
        }
        if !any {
            return Err(ExtensionError::EmptyMask);
        }
        Ok(Self {
            h,
            half_width,
            m,
            center,
            circumradius,
            mask,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Points per horizontal axis.
    pub fn nx(&self) -> usize {
        2 * self.m + 1
    }

    /// Points along z.
    pub fn nz(&self) -> usize {
        self.m + 1
    }

    pub fn len(&self) -> usize {
        self.nx() * self.nx() * self.nz()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn center(&self) -> [f64; 2] {
        self.center
    }

    pub fn circumradius(&self) -> f64 {
        self.circumradius
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.nx() + j) * self.nx() + i
    }

    #[inline]
    pub fn position(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.center[0] - self.half_width + i as f64 * self.h,
            self.center[1] - self.half_width + j as f64 * self.h,
            k as f64 * self.h,
        ]
    }

    /// Distance from grid point to the box center on the floor.
    #[inline]
    pub fn radius(&self, i: usize, j: usize, k: usize) -> f64 {
        let p = self.position(i, j, k);
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        (dx * dx + dy * dy + p[2] * p[2]).sqrt()
    }
}

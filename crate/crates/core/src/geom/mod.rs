//! Linear algebra and analytic geometry shared by every camera strategy.
//!
//! Everything here is a pure function over `Copy` values.

mod mat;
mod vec;

pub use mat::{
    frustum_matrix, homogeneous_divide, unproject_ndc, Mat4, MIN_FRUSTUM_EXTENT, SINGULAR_DET,
};
pub use vec::{Vec3, Vec4};

use crate::error::{Error, Result};

/// Cross-product norm below which two planes or two lines count as parallel.
pub const PARALLEL_EPS: f64 = 1e-9;

/// Minimum edge length for a screen rectangle.
pub const MIN_SCREEN_EDGE: f64 = 1e-9;

/// A plane stored as a unit normal and an anchor point on the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    normal: Vec3,
    point: Vec3,
}

impl Plane {
    /// Normalizes `normal`; fails if it has (near) zero length.
    pub fn new(normal: Vec3, point: Vec3) -> Result<Self> {
        let normal = normal
            .try_normalize(PARALLEL_EPS)
            .ok_or_else(|| Error::DegenerateFrustum(format!("zero plane normal {normal}")))?;
        Ok(Plane { normal, point })
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    pub fn point(&self) -> Vec3 {
        self.point
    }

    /// Signed distance of `p` along the normal.
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p - self.point)
    }
}

/// An infinite line with a unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    point: Vec3,
    direction: Vec3,
}

impl Line {
    pub fn new(point: Vec3, direction: Vec3) -> Result<Self> {
        let direction = direction
            .try_normalize(PARALLEL_EPS)
            .ok_or(Error::ParallelLines { cross_norm: 0.0 })?;
        Ok(Line { point, direction })
    }

    pub fn point(&self) -> Vec3 {
        self.point
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.point + self.direction * t
    }

    pub fn distance_to_point(&self, p: Vec3) -> f64 {
        (p - self.point).cross(self.direction).length()
    }
}

/// Line of intersection of two planes.
///
/// The direction is `normalize(a.normal x b.normal)`. The returned anchor is
/// the point of the line closest to `a.point`: it solves the three-plane
/// system formed by `a`, `b`, and the plane through `a.point` orthogonal to
/// the line, with coordinates taken relative to `a.point` so large CAVE
/// offsets do not cost precision.
pub fn intersect_plane_plane(a: &Plane, b: &Plane) -> Result<Line> {
    let cross = a.normal.cross(b.normal);
    let cross_norm = cross.length();
    if !(cross_norm > PARALLEL_EPS) {
        return Err(Error::ParallelPlanes { cross_norm });
    }
    let direction = cross / cross_norm;
    // With the origin at a.point the right-hand sides for planes `a` and the
    // orthogonal plane vanish; det(n_a, n_b, d) = |n_a x n_b|.
    let h_b = b.normal.dot(b.point - a.point);
    let point = a.point + direction.cross(a.normal) * (h_b / cross_norm);
    Ok(Line { point, direction })
}

/// Endpoints of the shortest segment connecting two non-parallel lines,
/// `(on a, on b)`.
pub fn closest_segment_between_lines(a: &Line, b: &Line) -> Result<(Vec3, Vec3)> {
    let cross_norm = a.direction.cross(b.direction).length();
    if !(cross_norm > PARALLEL_EPS) {
        return Err(Error::ParallelLines { cross_norm });
    }
    let w0 = a.point - b.point;
    let ab = a.direction.dot(b.direction);
    let da = a.direction.dot(w0);
    let db = b.direction.dot(w0);
    // Directions are unit, so the Gram determinant is 1 - (a.b)^2 = |a x b|^2.
    let denom = cross_norm * cross_norm;
    let s = (ab * db - da) / denom;
    let t = (db - ab * da) / denom;
    Ok((a.at(s), b.at(t)))
}

/// Orthonormal screen basis from three rectangle corners.
///
/// `X` runs along the bottom edge, `Y` up the right edge and `Z = X x Y`
/// points to the viewer's side of the screen. Only non-collinearity is
/// required here; rectangularity is checked by `ScreenConfig`.
pub fn screen_basis(lower_left: Vec3, lower_right: Vec3, upper_right: Vec3) -> Result<[Vec3; 3]> {
    let bottom = lower_right - lower_left;
    let side = upper_right - lower_right;
    let x = bottom.try_normalize(MIN_SCREEN_EDGE).ok_or_else(|| {
        Error::DegenerateScreen(format!("lower edge has length {:e}", bottom.length()))
    })?;
    let y = side.try_normalize(MIN_SCREEN_EDGE).ok_or_else(|| {
        Error::DegenerateScreen(format!("right edge has length {:e}", side.length()))
    })?;
    let z = x
        .cross(y)
        .try_normalize(PARALLEL_EPS)
        .ok_or_else(|| Error::DegenerateScreen("corners are collinear".to_string()))?;
    Ok([x, y, z])
}

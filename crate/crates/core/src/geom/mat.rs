//! 4x4 matrices in column-major storage.
//!
//! Matrices act on homogeneous column vectors by left multiplication
//! (`v' = M * v`), and `cols[c][r]` holds row `r` of column `c`. This is the
//! layout OpenGL/glm hand out from `glGet*` calls, so matrices copied from a
//! host application can be loaded with [`Mat4::from_cols_array`] unchanged.

use std::ops::Mul;

use super::vec::{Vec3, Vec4};
use crate::error::{Error, Result};

/// Determinant magnitude below which a matrix is treated as singular.
pub const SINGULAR_DET: f64 = 1e-12;

/// Minimum extent for a frustum's width, height and depth range.
pub const MIN_FRUSTUM_EXTENT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4 {
    cols: [[f64; 4]; 4],
}

impl Default for Mat4 {
    fn default() -> Self {
        Mat4::IDENTITY
    }
}

impl Mat4 {
    pub const IDENTITY: Mat4 = Mat4 {
        cols: [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
    };

    pub const fn from_cols(cols: [[f64; 4]; 4]) -> Self {
        Mat4 { cols }
    }

    /// Builds a matrix from 16 scalars in column-major order.
    pub fn from_cols_array(a: &[f64; 16]) -> Self {
        let mut cols = [[0.0; 4]; 4];
        for (c, col) in cols.iter_mut().enumerate() {
            col.copy_from_slice(&a[c * 4..c * 4 + 4]);
        }
        Mat4 { cols }
    }

    /// Builds a matrix from rows, which reads naturally in source code.
    pub fn from_rows(rows: [[f64; 4]; 4]) -> Self {
        let mut m = Mat4 {
            cols: [[0.0; 4]; 4],
        };
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                m.cols[c][r] = *v;
            }
        }
        m
    }

    pub fn to_cols_array(&self) -> [f64; 16] {
        let mut a = [0.0; 16];
        for c in 0..4 {
            a[c * 4..c * 4 + 4].copy_from_slice(&self.cols[c]);
        }
        a
    }

    pub fn translation(t: Vec3) -> Self {
        let mut m = Mat4::IDENTITY;
        m.cols[3] = [t.x, t.y, t.z, 1.0];
        m
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.cols[col][row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.cols[col][row] = v;
    }

    pub fn row(&self, r: usize) -> [f64; 4] {
        [
            self.cols[0][r],
            self.cols[1][r],
            self.cols[2][r],
            self.cols[3][r],
        ]
    }

    pub fn transpose(&self) -> Mat4 {
        Mat4::from_rows(self.cols)
    }

    pub fn mul_vec4(&self, v: Vec4) -> Vec4 {
        let v = v.to_array();
        let mut out = [0.0; 4];
        for (c, col) in self.cols.iter().enumerate() {
            for r in 0..4 {
                out[r] += col[r] * v[c];
            }
        }
        Vec4::new(out[0], out[1], out[2], out[3])
    }

    /// Transforms a point (w = 1) and applies the perspective divide.
    pub fn transform_point(&self, p: Vec3) -> Result<Vec3> {
        homogeneous_divide(self.mul_vec4(Vec4::point(p)))
    }

    /// Largest absolute entrywise difference to `rhs`.
    pub fn max_abs_diff(&self, rhs: &Mat4) -> f64 {
        self.to_cols_array()
            .iter()
            .zip(rhs.to_cols_array().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.cols.iter().flatten().all(|v| v.is_finite())
    }

    pub fn determinant(&self) -> f64 {
        lu_eliminate(self).0
    }

    /// General inverse by Gauss-Jordan elimination with partial pivoting.
    ///
    /// Fails with [`Error::SingularMatrix`] when `|det| <= 1e-12`.
    pub fn invert(&self) -> Result<Mat4> {
        let (det, inv) = lu_eliminate(self);
        if !(det.abs() > SINGULAR_DET) {
            return Err(Error::SingularMatrix { det });
        }
        Ok(inv.expect("non-singular elimination yields an inverse"))
    }
}

impl Mul for Mat4 {
    type Output = Mat4;

    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut out = [[0.0; 4]; 4];
        for (c, out_col) in out.iter_mut().enumerate() {
            for (r, out_v) in out_col.iter_mut().enumerate() {
                *out_v = (0..4).map(|k| self.cols[k][r] * rhs.cols[c][k]).sum();
            }
        }
        Mat4::from_cols(out)
    }
}

impl Mul<Vec4> for Mat4 {
    type Output = Vec4;

    fn mul(self, rhs: Vec4) -> Vec4 {
        self.mul_vec4(rhs)
    }
}

/// Runs Gauss-Jordan on `[m | I]`, returning the determinant and, when every
/// pivot is non-zero, the inverse.
fn lu_eliminate(m: &Mat4) -> (f64, Option<Mat4>) {
    // Row-major working copies.
    let mut a: [[f64; 4]; 4] = std::array::from_fn(|r| m.row(r));
    let mut inv: [[f64; 4]; 4] = std::array::from_fn(|r| Mat4::IDENTITY.row(r));
    let mut det = 1.0;

    for col in 0..4 {
        let pivot_row = (col..4)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        let pivot = a[pivot_row][col];
        if pivot == 0.0 || !pivot.is_finite() {
            return (if pivot.is_finite() { 0.0 } else { f64::NAN }, None);
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            inv.swap(pivot_row, col);
            det = -det;
        }
        det *= pivot;

        let recip = 1.0 / pivot;
        for c in 0..4 {
            a[col][c] *= recip;
            inv[col][c] *= recip;
        }
        for r in 0..4 {
            if r == col {
                continue;
            }
            let f = a[r][col];
            if f == 0.0 {
                continue;
            }
            for c in 0..4 {
                a[r][c] -= f * a[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    (det, Some(Mat4::from_rows(inv)))
}

/// Perspective divide of a homogeneous point.
pub fn homogeneous_divide(h: Vec4) -> Result<Vec3> {
    if !(h.w.abs() >= SINGULAR_DET) {
        return Err(Error::UnprojectionSingularity { w: h.w });
    }
    Ok(h.xyz() / h.w)
}

/// The OpenGL `glFrustum` matrix: maps eye space (looking down -z) to clip
/// space so that the near plane lands on NDC z = -1 and the far plane on
/// z = +1.
pub fn frustum_matrix(
    left: f64,
    right: f64,
    bottom: f64,
    top: f64,
    znear: f64,
    zfar: f64,
) -> Result<Mat4> {
    let (w, h, d) = (right - left, top - bottom, zfar - znear);
    if !(znear > 0.0) {
        return Err(Error::DegenerateFrustum(format!(
            "znear must be positive, got {znear}"
        )));
    }
    for (name, extent) in [
        ("right - left", w),
        ("top - bottom", h),
        ("zfar - znear", d),
    ] {
        if !(extent >= MIN_FRUSTUM_EXTENT) || !extent.is_finite() {
            return Err(Error::DegenerateFrustum(format!("{name} = {extent:e}")));
        }
    }
    Ok(Mat4::from_rows([
        [2.0 * znear / w, 0.0, (right + left) / w, 0.0],
        [0.0, 2.0 * znear / h, (top + bottom) / h, 0.0],
        [0.0, 0.0, -(zfar + znear) / d, -2.0 * zfar * znear / d],
        [0.0, 0.0, -1.0, 0.0],
    ]))
}

/// Maps an NDC point back to world space through the inverse projection and
/// inverse view transforms. Each product is followed by its own perspective
/// divide, so a view inverse with a non-trivial bottom row is still honored.
pub fn unproject_ndc(proj_inv: &Mat4, view_inv: &Mat4, ndc: Vec3) -> Result<Vec3> {
    let eye_space = homogeneous_divide(proj_inv.mul_vec4(Vec4::point(ndc)))?;
    homogeneous_divide(view_inv.mul_vec4(Vec4::point(eye_space)))
}

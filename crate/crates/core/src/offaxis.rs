//! Off-axis camera construction for a fixed screen and a tracked eye.
//!
//! A screen is a rectangle given by its lower-left, lower-right and
//! upper-right corners in CAVE space. From the screen and an eye position
//! this module builds
//!
//! * the OpenGL-style projection and view matrices of the asymmetric
//!   frustum ([`offaxis_stereo_transform`]),
//! * an equivalent symmetric pinhole camera whose image is cropped to a
//!   sub-region so that the visible part matches the asymmetric frustum
//!   ([`offaxis_stereo_camera`]),
//! * the left/right eye positions of a stereo rig ([`stereo_eyes`]).

use log::warn;

use crate::error::{Error, Result};
use crate::geom::{frustum_matrix, screen_basis, Mat4, Vec3};

/// Relative corner skew above which a screen triggers a warning.
pub const RECTANGULARITY_WARN: f64 = 1e-4;
/// Relative corner skew above which a screen is rejected.
pub const RECTANGULARITY_LIMIT: f64 = 1e-2;

pub const DEFAULT_ZNEAR: f64 = 1e-3;
pub const DEFAULT_ZFAR: f64 = 1000.0;

/// Human IPD range outside of which a rig is still accepted but logged.
pub const IPD_TYPICAL_RANGE: (f64, f64) = (0.03, 0.09);

/// Minimum eye-to-screen distance.
const MIN_EYE_DISTANCE: f64 = 1e-9;

/// The fixed projection rectangle, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenConfig {
    lower_left: Vec3,
    lower_right: Vec3,
    upper_right: Vec3,
    basis: [Vec3; 3],
}

impl ScreenConfig {
    pub fn new(lower_left: Vec3, lower_right: Vec3, upper_right: Vec3) -> Result<Self> {
        if !(lower_left.is_finite() && lower_right.is_finite() && upper_right.is_finite()) {
            return Err(Error::DegenerateScreen("non-finite corner".to_string()));
        }
        let basis = screen_basis(lower_left, lower_right, upper_right)?;
        let bottom = lower_right - lower_left;
        let side = upper_right - lower_right;
        let skew = bottom.dot(side).abs() / (bottom.length() * side.length());
        if skew > RECTANGULARITY_LIMIT {
            return Err(Error::NonRectangularScreen {
                skew,
                limit: RECTANGULARITY_LIMIT,
            });
        }
        if skew > RECTANGULARITY_WARN {
            warn!("screen corners deviate from a rectangle: relative skew {skew:.2e}");
        }
        Ok(ScreenConfig {
            lower_left,
            lower_right,
            upper_right,
            basis,
        })
    }

    pub fn lower_left(&self) -> Vec3 {
        self.lower_left
    }

    pub fn lower_right(&self) -> Vec3 {
        self.lower_right
    }

    pub fn upper_right(&self) -> Vec3 {
        self.upper_right
    }

    pub fn upper_left(&self) -> Vec3 {
        self.lower_left + (self.upper_right - self.lower_right)
    }

    pub fn center(&self) -> Vec3 {
        (self.lower_left + self.upper_right) * 0.5
    }

    /// `[X, Y, Z]`: along the bottom edge, up the side, towards the viewer.
    pub fn basis(&self) -> [Vec3; 3] {
        self.basis
    }

    pub fn width(&self) -> f64 {
        (self.lower_right - self.lower_left).length()
    }

    pub fn height(&self) -> f64 {
        (self.upper_right - self.lower_right).length()
    }

    pub fn diagonal(&self) -> f64 {
        (self.upper_right - self.lower_left).length()
    }

    /// Point at normalized screen coordinates, `(0, 0)` at the lower-left
    /// corner and `(1, 1)` at the upper-right.
    pub fn point_at(&self, s: f64, t: f64) -> Vec3 {
        self.lower_left
            + (self.lower_right - self.lower_left) * s
            + (self.upper_right - self.lower_right) * t
    }

    /// Corners in counter-clockwise order starting at the lower-left.
    pub fn corners(&self) -> [Vec3; 4] {
        [
            self.lower_left,
            self.lower_right,
            self.upper_right,
            self.upper_left(),
        ]
    }
}

/// Eye-to-screen distance and the distances from the eye's projection onto
/// the screen plane to each screen edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrustumDistances {
    pub dist: f64,
    pub left: f64,
    pub right: f64,
    pub bottom: f64,
    pub top: f64,
}

pub fn frustum_distances(screen: &ScreenConfig, eye: Vec3) -> Result<FrustumDistances> {
    if !eye.is_finite() {
        return Err(Error::EyeBehindScreen { dist: f64::NAN });
    }
    let [x, y, z] = screen.basis;
    let eye_rel = eye - screen.lower_left;
    let dist = eye_rel.dot(z);
    if !(dist > MIN_EYE_DISTANCE) {
        return Err(Error::EyeBehindScreen { dist });
    }
    let left = eye_rel.dot(x);
    let right = screen.width() - left;
    let bottom = eye_rel.dot(y);
    let top = screen.height() - bottom;

    for (edge, value) in [
        ("left", left),
        ("right", right),
        ("bottom", bottom),
        ("top", top),
    ] {
        if value < 0.0 {
            return Err(Error::EyeOffScreen { edge, value });
        }
    }
    Ok(FrustumDistances {
        dist,
        left,
        right,
        bottom,
        top,
    })
}

/// Projection and view transforms together with their inverses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraMatrices {
    pub proj: Mat4,
    pub view: Mat4,
    pub proj_inv: Mat4,
    pub view_inv: Mat4,
}

impl CameraMatrices {
    /// Inverts both transforms.
    pub fn new(proj: Mat4, view: Mat4) -> Result<Self> {
        Ok(CameraMatrices {
            proj,
            view,
            proj_inv: proj.invert()?,
            view_inv: view.invert()?,
        })
    }

    /// Projects a world point to NDC.
    pub fn project(&self, p: Vec3) -> Result<Vec3> {
        (self.proj * self.view).transform_point(p)
    }
}

/// Builds the asymmetric-frustum projection and the view transform for
/// `eye` looking perpendicularly at `screen`.
///
/// The view matrix maps `p` to `(X.(p-eye), Y.(p-eye), Z.(p-eye))`, i.e.
/// the screen basis becomes the eye-space axes with the eye at the origin.
/// The frustum's near-plane window is the screen rectangle scaled by
/// `znear / dist`, so the screen corners land exactly on the NDC corners.
pub fn offaxis_stereo_transform(
    screen: &ScreenConfig,
    eye: Vec3,
    znear: f64,
    zfar: f64,
) -> Result<CameraMatrices> {
    let d = frustum_distances(screen, eye)?;
    if !(znear > 0.0 && zfar > znear) {
        return Err(Error::DegenerateFrustum(format!(
            "need 0 < znear < zfar, got znear = {znear}, zfar = {zfar}"
        )));
    }
    let scale = znear / d.dist;
    let proj = frustum_matrix(
        -d.left * scale,
        d.right * scale,
        -d.bottom * scale,
        d.top * scale,
        znear,
        zfar,
    )?;

    let [x, y, z] = screen.basis;
    let view = Mat4::from_rows([
        [x.x, x.y, x.z, -x.dot(eye)],
        [y.x, y.y, y.z, -y.dot(eye)],
        [z.x, z.y, z.z, -z.dot(eye)],
        [0.0, 0.0, 0.0, 1.0],
    ]);
    CameraMatrices::new(proj, view)
}

/// Sub-rectangle of the normalized image plane, `[0, 1]^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box2 {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Box2 {
    pub const UNIT: Box2 = Box2 {
        min: [0.0, 0.0],
        max: [1.0, 1.0],
    };

    pub fn new(min: [f64; 2], max: [f64; 2]) -> Result<Self> {
        let b = Box2 { min, max };
        if !b.is_valid() {
            return Err(Error::InvalidCamera(format!(
                "image region {min:?}..{max:?} is not inside [0,1]^2 with min <= max"
            )));
        }
        Ok(b)
    }

    pub fn is_valid(&self) -> bool {
        (0..2).all(|i| 0.0 <= self.min[i] && self.min[i] <= self.max[i] && self.max[i] <= 1.0)
    }

    pub fn max_abs_diff(&self, rhs: &Box2) -> f64 {
        (0..2)
            .map(|i| {
                (self.min[i] - rhs.min[i])
                    .abs()
                    .max((self.max[i] - rhs.max[i]).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// A symmetric perspective camera plus the image region that restricts it to
/// the visible screen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinholeCamera {
    pub eye: Vec3,
    pub direction: Vec3,
    pub up: Vec3,
    /// Vertical field of view in radians.
    pub fovy: f64,
    /// Width over height of the (virtual, uncropped) image plane.
    pub aspect: f64,
    pub image_region: Box2,
}

impl PinholeCamera {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidCamera(msg));
        if !self.eye.is_finite() {
            return bad("eye is not finite".into());
        }
        if (self.direction.length() - 1.0).abs() > 1e-6 || (self.up.length() - 1.0).abs() > 1e-6 {
            return bad("direction and up must be unit vectors".into());
        }
        if self.direction.dot(self.up).abs() > 1e-6 {
            return bad("direction and up must be perpendicular".into());
        }
        if !(self.fovy > 0.0 && self.fovy < std::f64::consts::PI) {
            return bad(format!("fovy {} outside (0, pi)", self.fovy));
        }
        if !(self.aspect > 0.0 && self.aspect.is_finite()) {
            return bad(format!("aspect {} must be positive", self.aspect));
        }
        if !self.image_region.is_valid() {
            return bad(format!("image region {:?} invalid", self.image_region));
        }
        Ok(())
    }
}

/// Converts the off-axis setup into a pinhole camera whose frustum is the
/// smallest symmetric one containing the asymmetric frustum, together with
/// the image region that crops it back.
///
/// The virtual image plane is twice the larger of the left/right (and
/// bottom/top) edge distances, centered on the eye's projection. The region
/// is that virtual plane's portion covered by the real screen.
pub fn offaxis_stereo_camera(screen: &ScreenConfig, eye: Vec3) -> Result<PinholeCamera> {
    let FrustumDistances {
        dist,
        left,
        right,
        bottom,
        top,
    } = frustum_distances(screen, eye)?;
    let [_, y, z] = screen.basis;

    let new_width = if left < right {
        2.0 * right
    } else {
        2.0 * left
    };
    let new_height = if bottom < top {
        2.0 * top
    } else {
        2.0 * bottom
    };

    let fovy = 2.0 * (new_height / (2.0 * dist)).atan();
    let aspect = new_width / new_height;

    let image_region = Box2 {
        min: [
            if left < right {
                (right - left) / new_width
            } else {
                0.0
            },
            if bottom < top {
                (top - bottom) / new_height
            } else {
                0.0
            },
        ],
        max: [
            if right < left {
                (left + right) / new_width
            } else {
                1.0
            },
            if top < bottom {
                (bottom + top) / new_height
            } else {
                1.0
            },
        ],
    };

    Ok(PinholeCamera {
        eye,
        direction: -z,
        up: y,
        fovy,
        aspect,
        image_region,
    })
}

/// Tracked head with a lateral axis and interpupillary distance (meters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StereoRig {
    head_position: Vec3,
    head_right: Vec3,
    ipd: f64,
}

impl StereoRig {
    /// `head_right` is normalized; a zero axis or negative IPD is rejected.
    pub fn new(head_position: Vec3, head_right: Vec3, ipd: f64) -> Result<Self> {
        if !head_position.is_finite() {
            return Err(Error::InvalidRig("head position is not finite".into()));
        }
        let head_right = head_right.try_normalize(1e-9).ok_or_else(|| {
            Error::InvalidRig(format!("head right axis {head_right} has zero length"))
        })?;
        if !(ipd >= 0.0 && ipd.is_finite()) {
            return Err(Error::InvalidRig(format!("ipd must be >= 0, got {ipd}")));
        }
        if ipd < IPD_TYPICAL_RANGE.0 || ipd > IPD_TYPICAL_RANGE.1 {
            warn!(
                "ipd {ipd} m is outside the typical human range [{}, {}] m",
                IPD_TYPICAL_RANGE.0, IPD_TYPICAL_RANGE.1
            );
        }
        Ok(StereoRig {
            head_position,
            head_right,
            ipd,
        })
    }

    pub fn head_position(&self) -> Vec3 {
        self.head_position
    }

    pub fn head_right(&self) -> Vec3 {
        self.head_right
    }

    pub fn ipd(&self) -> f64 {
        self.ipd
    }
}

/// Left and right eye positions, offset by half the IPD along the head's
/// right axis.
pub fn stereo_eyes(rig: &StereoRig) -> (Vec3, Vec3) {
    let half = rig.head_right * (rig.ipd * 0.5);
    (rig.head_position - half, rig.head_position + half)
}

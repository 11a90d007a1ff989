//! Primary ray generation.
//!
//! Three interchangeable ways to produce the same off-axis rays:
//!
//! 1. [`ray_from_matrices`]: push NDC rays through the inverse projection
//!    and view transforms.
//! 2. [`ray_from_pinhole`]: an ordinary symmetric pinhole camera whose pixel
//!    coordinates are first squeezed into an image region.
//! 3. [`offaxis_stereo_camera_from_xfm`]: recover screen and eye from the
//!    matrices, then proceed as in 2.
//!
//! Pixel `(0, 0)` is the lower-left pixel; `y` grows upwards along the
//! screen's `Y` axis.

use crate::error::{Error, Result};
use crate::geom::{
    closest_segment_between_lines, intersect_plane_plane, unproject_ndc, Line, Plane, Vec3,
};
use crate::offaxis::{
    offaxis_stereo_camera, offaxis_stereo_transform, Box2, CameraMatrices, PinholeCamera,
    ScreenConfig,
};

/// Closest-segment length allowed during eye reconstruction, relative to the
/// far-plane diagonal.
pub const MAX_RECONSTRUCTION_SKEW: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    /// Unit length.
    pub direction: Vec3,
    pub tmin: f64,
    pub tmax: f64,
}

impl Ray {
    pub fn new(origin: Vec3, direction: Vec3) -> Self {
        Ray {
            origin,
            direction,
            tmin: 0.0,
            tmax: f64::INFINITY,
        }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }

    pub fn line(&self) -> Line {
        Line::new(self.origin, self.direction).expect("ray direction is unit length")
    }

    /// Restricts `[tmin, tmax]` to the segment between the near and far clip
    /// planes. A ray that never enters the slab gets an empty range
    /// (`tmin > tmax` is avoided by collapsing to `tmin == tmax`).
    pub fn clipped(mut self, clip: &ClipPlanes) -> Ray {
        let mut lo = self.tmin;
        let mut hi = self.tmax;
        for plane in [&clip.near, &clip.far] {
            // Both plane normals point into the slab.
            let denom = plane.normal().dot(self.direction);
            let dist = plane.signed_distance(self.origin);
            if denom.abs() < 1e-15 {
                if dist < 0.0 {
                    hi = lo;
                }
                continue;
            }
            let t = -dist / denom;
            if denom > 0.0 {
                lo = lo.max(t);
            } else {
                hi = hi.min(t);
            }
        }
        self.tmin = lo.max(0.0);
        self.tmax = hi.max(self.tmin);
        self
    }
}

/// World-space near and far clip planes of a matrix camera, normals facing
/// into the visible slab.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipPlanes {
    pub near: Plane,
    pub far: Plane,
}

impl ClipPlanes {
    pub fn from_matrices(cams: &CameraMatrices) -> Result<Self> {
        let at = |x: f64, y: f64, z: f64| {
            unproject_ndc(&cams.proj_inv, &cams.view_inv, Vec3::new(x, y, z))
        };
        let plane_through = |z: f64| -> Result<(Vec3, Vec3)> {
            let a = at(-1.0, -1.0, z)?;
            let b = at(1.0, -1.0, z)?;
            let c = at(-1.0, 1.0, z)?;
            Ok(((b - a).cross(c - a), a))
        };
        let (n_near, p_near) = plane_through(-1.0)?;
        let (n_far, p_far) = plane_through(1.0)?;
        let into = p_far - p_near;
        let near = Plane::new(
            if n_near.dot(into) >= 0.0 {
                n_near
            } else {
                -n_near
            },
            p_near,
        )?;
        let far = Plane::new(
            if n_far.dot(into) <= 0.0 {
                n_far
            } else {
                -n_far
            },
            p_far,
        )?;
        Ok(ClipPlanes { near, far })
    }
}

/// Image dimensions in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelGrid {
    width: usize,
    height: usize,
}

impl PixelGrid {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGrid { width, height });
        }
        Ok(PixelGrid { width, height })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check(&self, x: usize, y: usize) -> Result<()> {
        if x >= self.width || y >= self.height {
            return Err(Error::PixelOutOfRange {
                x,
                y,
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }

    /// Pixel-center coordinates in `[0, 1]^2`.
    fn unit_coords(&self, x: usize, y: usize) -> (f64, f64) {
        (
            (x as f64 + 0.5) / self.width as f64,
            (y as f64 + 0.5) / self.height as f64,
        )
    }
}

/// Strategy 1: shoot the NDC ray from `z = -1` to `z = +1` at the pixel
/// center and carry it back through the inverse transforms. The origin lies
/// on the near plane.
pub fn ray_from_matrices(
    x: usize,
    y: usize,
    cams: &CameraMatrices,
    grid: &PixelGrid,
) -> Result<Ray> {
    grid.check(x, y)?;
    let u = 2.0 * (x as f64 + 0.5) / grid.width as f64 - 1.0;
    let v = 2.0 * (y as f64 + 0.5) / grid.height as f64 - 1.0;
    let origin = unproject_ndc(&cams.proj_inv, &cams.view_inv, Vec3::new(u, v, -1.0))?;
    let target = unproject_ndc(&cams.proj_inv, &cams.view_inv, Vec3::new(u, v, 1.0))?;
    let direction = (target - origin)
        .try_normalize(0.0)
        .ok_or(Error::UnprojectionSingularity { w: 0.0 })?;
    Ok(Ray::new(origin, direction))
}

/// Linear interpolation of normalized image coordinates into `region`:
/// `(1 - uv) * min + uv * max`, componentwise.
pub fn remap_image_region(u: f64, v: f64, region: &Box2) -> (f64, f64) {
    (
        (1.0 - u) * region.min[0] + u * region.max[0],
        (1.0 - v) * region.min[1] + v * region.max[1],
    )
}

/// Strategy 2: a symmetric pinhole camera sampled inside its image region.
pub fn ray_from_pinhole(x: usize, y: usize, cam: &PinholeCamera, grid: &PixelGrid) -> Result<Ray> {
    grid.check(x, y)?;
    let (u, v) = grid.unit_coords(x, y);
    Ok(PinholeBasis::new(cam).ray(u, v))
}

/// Per-camera constants for pinhole ray generation.
#[derive(Debug, Clone, Copy)]
struct PinholeBasis {
    eye: Vec3,
    direction: Vec3,
    right: Vec3,
    up: Vec3,
    region: Box2,
}

impl PinholeBasis {
    fn new(cam: &PinholeCamera) -> Self {
        let tan_half = (cam.fovy * 0.5).tan();
        PinholeBasis {
            eye: cam.eye,
            direction: cam.direction,
            right: cam.direction.cross(cam.up) * (cam.aspect * tan_half),
            up: cam.up * tan_half,
            region: cam.image_region,
        }
    }

    fn ray(&self, u: f64, v: f64) -> Ray {
        let (u, v) = remap_image_region(u, v, &self.region);
        let d = self.direction + self.right * (2.0 * u - 1.0) + self.up * (2.0 * v - 1.0);
        Ray::new(self.eye, d.normalize())
    }
}

/// Screen rectangle and eye recovered from a pair of viewing transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrustumReconstruction {
    /// Far-plane corners: a rectangle parallel to the true screen.
    pub screen: ScreenConfig,
    /// Midpoint of the shortest segment between the two plane-pair lines.
    pub eye: Vec3,
    /// Length of that segment; zero for an exact perspective frustum.
    pub skew: f64,
}

/// Recovers the frustum apex and a screen-parallel rectangle from the
/// inverse transforms.
///
/// The eight NDC cube corners are unprojected; the left/right and
/// bottom/top side planes are built from cross products of the frustum
/// edges, each pair is intersected into a line, and the eye is the midpoint
/// of the shortest segment joining the two lines.
pub fn reconstruct_frustum(cams: &CameraMatrices) -> Result<FrustumReconstruction> {
    // corner[i][j][k] is the unprojection of NDC (2i-1, 2j-1, 2k-1).
    let mut corner = [[[Vec3::ZERO; 2]; 2]; 2];
    for (i, plane_x) in corner.iter_mut().enumerate() {
        for (j, row) in plane_x.iter_mut().enumerate() {
            for (k, c) in row.iter_mut().enumerate() {
                let ndc = Vec3::new(sign(i), sign(j), sign(k));
                *c = unproject_ndc(&cams.proj_inv, &cams.view_inv, ndc)?;
            }
        }
    }
    let dir = |from: Vec3, to: Vec3| -> Result<Vec3> {
        (to - from)
            .try_normalize(0.0)
            .ok_or(Error::DegenerateFrustum(
                "coincident frustum corners".into(),
            ))
    };

    // Edges along NDC z, indexed by (x, y).
    let ez00 = dir(corner[0][0][0], corner[0][0][1])?;
    let ez10 = dir(corner[1][0][0], corner[1][0][1])?;
    let ez01 = dir(corner[0][1][0], corner[0][1][1])?;
    // Edges along NDC y, indexed by (x, z).
    let ey00 = dir(corner[0][0][0], corner[0][1][0])?;
    let ey10 = dir(corner[1][0][0], corner[1][1][0])?;
    // Edges along NDC x, indexed by (y, z).
    let ex00 = dir(corner[0][0][0], corner[1][0][0])?;
    let ex10 = dir(corner[0][1][0], corner[1][1][0])?;

    // Outward-facing side planes.
    let left = Plane::new(ey00.cross(ez00), corner[0][0][0])?;
    let right = Plane::new(ez10.cross(ey10), corner[1][0][0])?;
    let bottom = Plane::new(ez00.cross(ex00), corner[0][0][0])?;
    let top = Plane::new(ex10.cross(ez01), corner[0][1][0])?;

    let lr = intersect_plane_plane(&left, &right)?;
    let bt = intersect_plane_plane(&bottom, &top)?;
    let (p1, p2) = closest_segment_between_lines(&lr, &bt)?;

    let screen = ScreenConfig::new(corner[0][0][1], corner[1][0][1], corner[1][1][1])?;
    let skew = p1.distance(p2);
    let limit = MAX_RECONSTRUCTION_SKEW * screen.diagonal();
    if !(skew <= limit) {
        return Err(Error::ExcessiveSkew { skew, limit });
    }
    Ok(FrustumReconstruction {
        screen,
        eye: (p1 + p2) * 0.5,
        skew,
    })
}

fn sign(bit: usize) -> f64 {
    if bit == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Strategy 3: pinhole camera plus image region derived from matrices alone.
pub fn offaxis_stereo_camera_from_xfm(cams: &CameraMatrices) -> Result<PinholeCamera> {
    let rec = reconstruct_frustum(cams)?;
    offaxis_stereo_camera(&rec.screen, rec.eye)
}

/// Which of the three ray generation routes to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    /// Inverse viewing transform applied to NDC rays.
    Matrices,
    /// Pinhole camera with an image region.
    Pinhole,
    /// Pinhole camera reconstructed from the viewing transform.
    Reconstructed,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::Matrices,
        Strategy::Pinhole,
        Strategy::Reconstructed,
    ];

    pub fn number(self) -> u8 {
        match self {
            Strategy::Matrices => 1,
            Strategy::Pinhole => 2,
            Strategy::Reconstructed => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Strategy> {
        match n {
            1 => Some(Strategy::Matrices),
            2 => Some(Strategy::Pinhole),
            3 => Some(Strategy::Reconstructed),
            _ => None,
        }
    }
}

/// Camera description in the form a given strategy consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CameraInput {
    Matrices(CameraMatrices),
    Pinhole(PinholeCamera),
    /// Matrices that are converted to a pinhole camera before use.
    Reconstructed(CameraMatrices),
}

impl CameraInput {
    /// Builds the camera form `strategy` consumes for `eye` in front of
    /// `screen`. The clip range only affects the matrix forms.
    pub fn for_eye(
        strategy: Strategy,
        screen: &ScreenConfig,
        eye: Vec3,
        znear: f64,
        zfar: f64,
    ) -> Result<CameraInput> {
        Ok(match strategy {
            Strategy::Matrices => {
                CameraInput::Matrices(offaxis_stereo_transform(screen, eye, znear, zfar)?)
            }
            Strategy::Pinhole => CameraInput::Pinhole(offaxis_stereo_camera(screen, eye)?),
            Strategy::Reconstructed => {
                CameraInput::Reconstructed(offaxis_stereo_transform(screen, eye, znear, zfar)?)
            }
        })
    }

    pub fn strategy(&self) -> Strategy {
        match self {
            CameraInput::Matrices(_) => Strategy::Matrices,
            CameraInput::Pinhole(_) => Strategy::Pinhole,
            CameraInput::Reconstructed(_) => Strategy::Reconstructed,
        }
    }
}

/// A camera prepared for per-pixel ray queries. Strategy 3 is resolved to
/// its pinhole camera once, up front.
#[derive(Debug, Clone, Copy)]
pub struct RayGenerator {
    kind: GeneratorKind,
    grid: PixelGrid,
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, Copy)]
enum GeneratorKind {
    Matrices(CameraMatrices),
    Pinhole(PinholeBasis),
}

impl RayGenerator {
    pub fn new(input: &CameraInput, grid: PixelGrid) -> Result<Self> {
        let kind = match input {
            CameraInput::Matrices(m) => GeneratorKind::Matrices(*m),
            CameraInput::Pinhole(cam) => {
                cam.validate()?;
                GeneratorKind::Pinhole(PinholeBasis::new(cam))
            }
            CameraInput::Reconstructed(m) => {
                let cam = offaxis_stereo_camera_from_xfm(m)?;
                GeneratorKind::Pinhole(PinholeBasis::new(&cam))
            }
        };
        Ok(RayGenerator { kind, grid })
    }

    pub fn grid(&self) -> PixelGrid {
        self.grid
    }

    pub fn ray(&self, x: usize, y: usize) -> Result<Ray> {
        match &self.kind {
            GeneratorKind::Matrices(m) => ray_from_matrices(x, y, m, &self.grid),
            GeneratorKind::Pinhole(b) => {
                self.grid.check(x, y)?;
                let (u, v) = self.grid.unit_coords(x, y);
                Ok(b.ray(u, v))
            }
        }
    }
}

/// All primary rays of `grid` in row-major order, bottom row first.
pub fn generate_rays(input: &CameraInput, grid: PixelGrid) -> Result<Vec<Ray>> {
    let gen = RayGenerator::new(input, grid)?;
    let mut rays = Vec::with_capacity(grid.len());
    for y in 0..grid.height {
        for x in 0..grid.width {
            rays.push(gen.ray(x, y)?);
        }
    }
    Ok(rays)
}

/// Largest disagreement between two ray sets of equal length.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RayDeviation {
    /// Maximum angle between paired directions, radians.
    pub max_angle: f64,
    /// Maximum distance from either origin to the other ray's line, meters.
    pub max_line_distance: f64,
}

impl RayDeviation {
    pub fn within(&self, angle_tol: f64, distance_tol: f64) -> bool {
        self.max_angle < angle_tol && self.max_line_distance < distance_tol
    }
}

/// Compares rays pairwise as geometric lines, ignoring where along the line
/// each origin sits.
pub fn ray_deviation(a: &[Ray], b: &[Ray]) -> RayDeviation {
    assert_eq!(a.len(), b.len(), "ray sets differ in length");
    a.iter()
        .zip(b)
        .fold(RayDeviation::default(), |acc, (ra, rb)| {
            let angle = ra.direction.angle_between(rb.direction);
            let dist = ra
                .line()
                .distance_to_point(rb.origin)
                .max(rb.line().distance_to_point(ra.origin));
            // NaN counts as the worst possible disagreement.
            let worst = |v: f64| if v.is_nan() { f64::INFINITY } else { v };
            RayDeviation {
                max_angle: acc.max_angle.max(worst(angle)),
                max_line_distance: acc.max_line_distance.max(worst(dist)),
            }
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{frustum_matrix, Mat4};

    fn unit_screen() -> ScreenConfig {
        ScreenConfig::new(
            Vec3::new(-1.0, -1.0, 0.0),
            Vec3::new(1.0, -1.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn identity_matrices_pixel_zero() {
        // u = v = 2 * 0.5 / 2 - 1 = -0.5; origin at NDC z = -1, direction +z.
        let cams = CameraMatrices::new(Mat4::IDENTITY, Mat4::IDENTITY).unwrap();
        let grid = PixelGrid::new(2, 2).unwrap();
        let r = ray_from_matrices(0, 0, &cams, &grid).unwrap();
        assert_eq!(r.origin, Vec3::new(-0.5, -0.5, -1.0));
        assert_eq!(r.direction, Vec3::Z);
        assert_eq!((r.tmin, r.tmax), (0.0, f64::INFINITY));
    }

    #[test]
    fn symmetric_center_ray() {
        let eye = Vec3::new(0.0, 0.0, 1.0);
        let cams = offaxis_stereo_transform(&unit_screen(), eye, 1e-3, 1000.0).unwrap();
        let grid = PixelGrid::new(33, 33).unwrap();
        let r = ray_from_matrices(16, 16, &cams, &grid).unwrap();
        assert!(r.direction.max_abs_diff(Vec3::new(0.0, 0.0, -1.0)) < 1e-12);
        assert!(r.origin.x.abs() < 1e-12 && r.origin.y.abs() < 1e-12);
        assert!((r.origin.z - (1.0 - 1e-3)).abs() < 1e-9);
    }

    #[test]
    fn corner_ray_passes_through_eye() {
        let eye = Vec3::new(0.0, 0.0, 1.0);
        let cams = offaxis_stereo_transform(&unit_screen(), eye, 1e-3, 1000.0).unwrap();
        let grid = PixelGrid::new(33, 33).unwrap();
        let r = ray_from_matrices(0, 0, &cams, &grid).unwrap();
        assert!((r.origin - eye).normalize().cross(r.direction).length() < 1e-5);
        assert!(r.direction.x < 0.0 && r.direction.y < 0.0);
    }

    #[test]
    fn pixel_out_of_range() {
        let cams = CameraMatrices::new(Mat4::IDENTITY, Mat4::IDENTITY).unwrap();
        let grid = PixelGrid::new(2, 2).unwrap();
        assert!(matches!(
            ray_from_matrices(2, 0, &cams, &grid),
            Err(Error::PixelOutOfRange { .. })
        ));
        assert!(PixelGrid::new(0, 3).is_err());
    }

    #[test]
    fn remap_examples() {
        assert_eq!(remap_image_region(0.3, 0.8, &Box2::UNIT), (0.3, 0.8));
        let r = Box2::new([1.0 / 3.0, 0.0], [1.0, 1.0]).unwrap();
        let (u, v) = remap_image_region(0.5, 0.5, &r);
        assert!((u - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(v, 0.5);
        let r = Box2::new([0.25, 0.75], [0.25, 0.75]).unwrap();
        assert_eq!(remap_image_region(0.1, 0.9, &r), (0.25, 0.75));
    }

    #[test]
    fn centered_pinhole_center_ray() {
        let cam = offaxis_stereo_camera(&unit_screen(), Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let grid = PixelGrid::new(5, 5).unwrap();
        let r = ray_from_pinhole(2, 2, &cam, &grid).unwrap();
        assert!(r.direction.max_abs_diff(cam.direction) < 1e-15);
        assert_eq!(r.origin, cam.eye);
    }

    #[test]
    fn pinhole_rays_stay_on_screen() {
        let s = unit_screen();
        let cam = offaxis_stereo_camera(&s, Vec3::new(-0.5, 0.0, 1.0)).unwrap();
        let grid = PixelGrid::new(16, 16).unwrap();
        for r in generate_rays(&CameraInput::Pinhole(cam), grid).unwrap() {
            let t = -r.origin.z / r.direction.z;
            let hit = r.at(t);
            assert!(
                hit.x.abs() <= 1.0 + 1e-9 && hit.y.abs() <= 1.0 + 1e-9,
                "{hit}"
            );
        }
    }

    #[test]
    fn pinhole_corner_angle() {
        // The virtual image corner (u' = v' = 1) sits at angle
        // atan(sqrt(aspect^2 + 1) * tan(fovy / 2)) from the view axis.
        let cam = PinholeCamera {
            eye: Vec3::ZERO,
            direction: -Vec3::Z,
            up: Vec3::Y,
            fovy: 1.0,
            aspect: 1.7,
            image_region: Box2::UNIT,
        };
        let r = PinholeBasis::new(&cam).ray(1.0, 1.0);
        let expect = ((1.7f64 * 1.7 + 1.0).sqrt() * 0.5f64.tan()).atan();
        assert!((r.direction.angle_between(cam.direction) - expect).abs() < 1e-12);
        assert!(r.direction.x > 0.0 && r.direction.y > 0.0);
    }

    #[test]
    fn reconstruct_centered_eye() {
        let eye = Vec3::new(0.0, 0.0, 1.0);
        let cams = offaxis_stereo_transform(&unit_screen(), eye, 1e-3, 1000.0).unwrap();
        let rec = reconstruct_frustum(&cams).unwrap();
        assert!(rec.eye.distance(eye) < 1e-4);
        let cam = offaxis_stereo_camera_from_xfm(&cams).unwrap();
        assert!(cam.image_region.max_abs_diff(&Box2::UNIT) < 1e-6);
    }

    #[test]
    fn reconstruct_symmetric_perspective() {
        let proj = frustum_matrix(-0.4, 0.4, -0.3, 0.3, 0.5, 50.0).unwrap();
        let cams = CameraMatrices::new(proj, Mat4::IDENTITY).unwrap();
        let cam = offaxis_stereo_camera_from_xfm(&cams).unwrap();
        assert!(cam.eye.length() < 1e-9);
        assert!(cam.image_region.max_abs_diff(&Box2::UNIT) < 1e-6);
        assert!((cam.aspect - 0.8 / 0.6).abs() < 1e-9);
        assert!((cam.fovy - 2.0 * (0.3f64 / 0.5).atan()).abs() < 1e-9);
    }

    #[test]
    fn orthographic_input_rejected() {
        let ortho = Mat4::from_rows([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, -0.02, -1.0],
            [0.0, 0.0, 0.0, 1.0],
        ]);
        let cams = CameraMatrices::new(ortho, Mat4::IDENTITY).unwrap();
        assert!(matches!(
            offaxis_stereo_camera_from_xfm(&cams),
            Err(Error::ParallelPlanes { .. })
        ));
    }

    #[test]
    fn single_pixel_grid() {
        let s = unit_screen();
        let eye = Vec3::new(-0.5, 0.25, 1.0);
        let cams = offaxis_stereo_transform(&s, eye, 1e-3, 1000.0).unwrap();
        let grid = PixelGrid::new(1, 1).unwrap();
        let rays = generate_rays(&CameraInput::Matrices(cams), grid).unwrap();
        assert_eq!(rays.len(), 1);
        // Through the screen center.
        let expect = (s.center() - eye).normalize();
        assert!(rays[0].direction.angle_between(expect) < 1e-9);
    }

    #[test]
    fn clip_planes_bound_rays() {
        let s = unit_screen();
        let eye = Vec3::new(0.2, -0.1, 1.5);
        let cams = offaxis_stereo_transform(&s, eye, 0.1, 10.0).unwrap();
        let clip = ClipPlanes::from_matrices(&cams).unwrap();
        let grid = PixelGrid::new(3, 3).unwrap();

        let r1 = ray_from_matrices(0, 2, &cams, &grid)
            .unwrap()
            .clipped(&clip);
        assert!(r1.tmin.abs() < 1e-9);
        // The far end is the z = +1 unprojection.
        let far = unproject_ndc(
            &cams.proj_inv,
            &cams.view_inv,
            Vec3::new(-2.0 / 3.0, 2.0 / 3.0, 1.0),
        )
        .unwrap();
        assert!(r1.at(r1.tmax).distance(far) < 1e-9);

        let cam = offaxis_stereo_camera(&s, eye).unwrap();
        let r2 = ray_from_pinhole(1, 1, &cam, &grid).unwrap().clipped(&clip);
        let cos = r2.direction.dot(-Vec3::Z);
        assert!((r2.tmin - 0.1 / cos).abs() < 1e-9);
        assert!((r2.tmax - 10.0 / cos).abs() < 1e-7);
    }
}

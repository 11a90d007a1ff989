//! A deterministic CPU ray caster for analytic scenes and stereo pairs.
//!
//! Shading is single-bounce Lambertian with a fixed ambient term, no
//! shadows and no sampling noise, so identical inputs produce bit-identical
//! images and the three ray generation strategies can be compared pixel by
//! pixel.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::offaxis::{stereo_eyes, ScreenConfig, StereoRig};
use crate::raygen::{CameraInput, PixelGrid, Ray, RayGenerator, Strategy};

/// Linear RGB.
pub type Rgb = [f64; 3];

/// Fraction of the light intensity applied regardless of orientation.
pub const AMBIENT: f64 = 0.1;

/// Slack on the sphere discriminant so tangent rays still report a hit.
const GRAZING_EPS: f64 = 1e-9;

/// Environment variable capping the number of render threads.
pub const THREADS_ENV: &str = "OFFAXIS_THREADS";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
    pub albedo: Rgb,
}

/// Infinite plane with a two-color checkerboard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckerPlane {
    point: Vec3,
    normal: Vec3,
    tangent: Vec3,
    bitangent: Vec3,
    albedos: [Rgb; 2],
    period: f64,
}

impl CheckerPlane {
    pub fn new(point: Vec3, normal: Vec3, albedos: [Rgb; 2], period: f64) -> Result<Self> {
        let normal = normal
            .try_normalize(1e-12)
            .ok_or_else(|| Error::InvalidScene("checker plane normal has zero length".into()))?;
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidScene(format!(
                "checker period {period} must be positive"
            )));
        }
        let helper = if normal.x.abs() < 0.9 {
            Vec3::X
        } else {
            Vec3::Y
        };
        let tangent = helper.cross(normal).normalize();
        let bitangent = normal.cross(tangent);
        Ok(CheckerPlane {
            point,
            normal,
            tangent,
            bitangent,
            albedos,
            period,
        })
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    /// In-plane coordinates of `p` relative to the anchor point.
    pub fn local_coords(&self, p: Vec3) -> (f64, f64) {
        let d = p - self.point;
        (d.dot(self.tangent), d.dot(self.bitangent))
    }

    /// First albedo where `floor(a / period) + floor(b / period)` is even.
    pub fn albedo_at_local(&self, a: f64, b: f64) -> Rgb {
        let cell = (a / self.period).floor() + (b / self.period).floor();
        self.albedos[(cell.rem_euclid(2.0) != 0.0) as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalLight {
    /// Direction the light travels, unit length.
    pub direction: Vec3,
    pub intensity: Rgb,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub spheres: Vec<Sphere>,
    pub planes: Vec<CheckerPlane>,
    pub light: DirectionalLight,
    pub background: Rgb,
}

/// Identifies the object a ray hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectId {
    Sphere(usize),
    Plane(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub point: Vec3,
    /// Unit normal facing the incoming ray.
    pub normal: Vec3,
    pub albedo: Rgb,
    pub object: ObjectId,
}

impl Scene {
    pub fn empty(background: Rgb) -> Self {
        Scene {
            spheres: Vec::new(),
            planes: Vec::new(),
            light: DirectionalLight {
                direction: -Vec3::Y,
                intensity: [1.0; 3],
            },
            background,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.spheres.iter().enumerate() {
            if !(s.radius > 0.0 && s.radius.is_finite()) || !s.center.is_finite() {
                return Err(Error::InvalidScene(format!(
                    "sphere {i} has radius {}",
                    s.radius
                )));
            }
        }
        if (self.light.direction.length() - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidScene(
                "light direction must be unit length".into(),
            ));
        }
        Ok(())
    }

    /// Checker floor along the bottom edge of `screen` and three spheres:
    /// one in front of the screen plane (left), one centered on it
    /// (middle) and one behind it (right).
    pub fn default_for_screen(screen: &ScreenConfig) -> Scene {
        let [x, y, z] = screen.basis();
        let (w, h) = (screen.width(), screen.height());
        let s = w.min(h);
        let c = screen.center();
        let floor = CheckerPlane::new(
            c - y * (0.5 * h),
            y,
            [[0.85, 0.85, 0.85], [0.25, 0.25, 0.3]],
            s / 8.0,
        )
        .expect("screen basis is unit length");
        Scene {
            spheres: vec![
                Sphere {
                    center: c - x * (0.2 * w) + z * (0.15 * s),
                    radius: 0.06 * s,
                    albedo: [0.9, 0.2, 0.15],
                },
                Sphere {
                    center: c,
                    radius: 0.08 * s,
                    albedo: [0.2, 0.8, 0.25],
                },
                Sphere {
                    center: c + x * (0.28 * w) - z * (0.4 * s),
                    radius: 0.1 * s,
                    albedo: [0.2, 0.35, 0.9],
                },
            ],
            planes: vec![floor],
            light: DirectionalLight {
                direction: (x * 0.3 - y - z * 0.8).normalize(),
                intensity: [1.0, 1.0, 1.0],
            },
            background: [0.05, 0.07, 0.12],
        }
    }

    /// Index of the default scene's sphere for each depth class.
    pub const DEFAULT_FRONT: usize = 0;
    pub const DEFAULT_ON_SCREEN: usize = 1;
    pub const DEFAULT_BEHIND: usize = 2;
}

fn intersect_sphere(ray: &Ray, s: &Sphere) -> Option<f64> {
    let oc = ray.origin - s.center;
    let b = oc.dot(ray.direction);
    let c = oc.length_squared() - s.radius * s.radius;
    let disc = b * b - c;
    if disc < -GRAZING_EPS {
        return None;
    }
    let root = disc.max(0.0).sqrt();
    [-b - root, -b + root]
        .into_iter()
        .find(|t| *t >= ray.tmin && *t <= ray.tmax)
}

fn intersect_plane(ray: &Ray, p: &CheckerPlane) -> Option<f64> {
    let denom = p.normal.dot(ray.direction);
    if denom.abs() < 1e-12 {
        return None;
    }
    let t = p.normal.dot(p.point - ray.origin) / denom;
    (t >= ray.tmin && t <= ray.tmax).then_some(t)
}

/// Nearest hit with `t` in `[tmin, tmax]`.
pub fn intersect_scene(ray: &Ray, scene: &Scene) -> Option<Hit> {
    let mut best: Option<(f64, ObjectId)> = None;
    let mut consider = |t: f64, id: ObjectId| {
        if best.is_none_or(|(bt, _)| t < bt) {
            best = Some((t, id));
        }
    };
    for (i, s) in scene.spheres.iter().enumerate() {
        if let Some(t) = intersect_sphere(ray, s) {
            consider(t, ObjectId::Sphere(i));
        }
    }
    for (i, p) in scene.planes.iter().enumerate() {
        if let Some(t) = intersect_plane(ray, p) {
            consider(t, ObjectId::Plane(i));
        }
    }

    let (t, object) = best?;
    let point = ray.at(t);
    let (normal, albedo) = match object {
        ObjectId::Sphere(i) => {
            let s = &scene.spheres[i];
            ((point - s.center) / s.radius, s.albedo)
        }
        ObjectId::Plane(i) => {
            let p = &scene.planes[i];
            let (a, b) = p.local_coords(point);
            (p.normal, p.albedo_at_local(a, b))
        }
    };
    let normal = if normal.dot(ray.direction) > 0.0 {
        -normal
    } else {
        normal
    };
    Some(Hit {
        t,
        point,
        normal,
        albedo,
        object,
    })
}

/// Lambertian term plus ambient, before clamping.
pub fn shade(hit: &Hit, scene: &Scene) -> Rgb {
    let lambert = hit.normal.dot(-scene.light.direction).max(0.0);
    std::array::from_fn(|c| hit.albedo[c] * scene.light.intensity[c] * (lambert + AMBIENT))
}

fn trace(ray: &Ray, scene: &Scene) -> Rgb {
    intersect_scene(ray, scene).map_or(scene.background, |h| shade(&h, scene))
}

/// Linear float image; row 0 is the bottom row.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl Image {
    pub fn new(width: usize, height: usize, fill: Rgb) -> Self {
        Image {
            width,
            height,
            pixels: vec![fill; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    /// 8-bit RGB triples, bottom row first.
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.pixels.iter().flat_map(|p| p.map(quantize)).collect()
    }

    /// Binary PPM (P6). Rows go out top to bottom, so the image appears
    /// y-up in ordinary viewers.
    pub fn encode_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.width * self.height * 3);
        for y in (0..self.height).rev() {
            let row = &self.pixels[y * self.width..(y + 1) * self.width];
            out.extend(row.iter().flat_map(|p| p.map(quantize)));
        }
        out
    }

    pub fn write_ppm<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(&self.encode_ppm())
    }

    /// `left` and `right` next to each other; heights must match.
    pub fn side_by_side(left: &Image, right: &Image) -> Image {
        assert_eq!(left.height, right.height, "stereo halves differ in height");
        let width = left.width + right.width;
        let mut pixels = Vec::with_capacity(width * left.height);
        for y in 0..left.height {
            pixels.extend_from_slice(&left.pixels[y * left.width..(y + 1) * left.width]);
            pixels.extend_from_slice(&right.pixels[y * right.width..(y + 1) * right.width]);
        }
        Image {
            width,
            height: left.height,
            pixels,
        }
    }
}

/// `round(255 * clamp(c, 0, 1))`; NaN maps to 0.
pub fn quantize(c: f64) -> u8 {
    if c.is_nan() {
        return 0;
    }
    (255.0 * c.clamp(0.0, 1.0)).round() as u8
}

/// Parses a binary PPM written by [`Image::encode_ppm`]. Returns the width,
/// height and the pixel bytes in file order (top row first).
pub fn decode_ppm(bytes: &[u8]) -> Option<(usize, usize, &[u8])> {
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return None;
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).ok()?);
    }
    if fields[0] != "P6" || fields[3] != "255" {
        return None;
    }
    let width: usize = fields[1].parse().ok()?;
    let height: usize = fields[2].parse().ok()?;
    // Exactly one whitespace byte separates the header from the raster.
    let data = bytes.get(pos + 1..)?;
    (data.len() == width * height * 3).then_some((width, height, data))
}

/// Runs `f` on a pool capped by `OFFAXIS_THREADS` when that is set to a
/// positive integer, otherwise on rayon's global pool.
fn with_render_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0);
    match cap.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

/// Evaluates `f` for every pixel, rows in parallel, output row-major.
fn per_pixel<T, F>(gen: &RayGenerator, f: F) -> Result<Vec<T>>
where
    T: Send + Clone + Default,
    F: Fn(&Ray) -> T + Sync,
{
    let grid = gen.grid();
    let (w, h) = (grid.width(), grid.height());
    with_render_pool(|| {
        let mut out = vec![T::default(); w * h];
        out.par_chunks_mut(w)
            .enumerate()
            .try_for_each(|(y, row)| -> Result<()> {
                for (x, slot) in row.iter_mut().enumerate() {
                    *slot = f(&gen.ray(x, y)?);
                }
                Ok(())
            })?;
        Ok(out)
    })
}

/// Renders one view. Pixel `(x, y)` is shaded from the ray the camera
/// generates for that pixel.
pub fn render_view(scene: &Scene, input: &CameraInput, grid: PixelGrid) -> Result<Image> {
    scene.validate()?;
    let gen = RayGenerator::new(input, grid)?;
    let pixels = per_pixel(&gen, |ray| trace(ray, scene))?;
    Ok(Image {
        width: grid.width(),
        height: grid.height(),
        pixels,
    })
}

/// Which object each pixel's primary ray hits, row-major, bottom row first.
pub fn hit_map(
    scene: &Scene,
    input: &CameraInput,
    grid: PixelGrid,
) -> Result<Vec<Option<ObjectId>>> {
    scene.validate()?;
    let gen = RayGenerator::new(input, grid)?;
    per_pixel(&gen, |ray| intersect_scene(ray, scene).map(|h| h.object))
}

/// Mean pixel-center position `(x, y)` of all pixels showing `object`.
pub fn object_centroid(
    map: &[Option<ObjectId>],
    grid: PixelGrid,
    object: ObjectId,
) -> Option<(f64, f64)> {
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    for (i, id) in map.iter().enumerate() {
        if *id == Some(object) {
            sx += (i % grid.width()) as f64 + 0.5;
            sy += (i / grid.width()) as f64 + 0.5;
            n += 1;
        }
    }
    (n > 0).then(|| (sx / n as f64, sy / n as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StereoPair {
    pub left: Image,
    pub right: Image,
    pub side_by_side: Image,
}

/// Camera inputs for both eyes of `rig` in the form `strategy` consumes.
pub fn stereo_inputs(
    screen: &ScreenConfig,
    rig: &StereoRig,
    strategy: Strategy,
    znear: f64,
    zfar: f64,
) -> Result<(CameraInput, CameraInput)> {
    let (l, r) = stereo_eyes(rig);
    Ok((
        CameraInput::for_eye(strategy, screen, l, znear, zfar)?,
        CameraInput::for_eye(strategy, screen, r, znear, zfar)?,
    ))
}

/// Renders both eyes and their side-by-side composite (left eye on the
/// left).
pub fn render_stereo_pair(
    scene: &Scene,
    screen: &ScreenConfig,
    rig: &StereoRig,
    strategy: Strategy,
    grid: PixelGrid,
    znear: f64,
    zfar: f64,
) -> Result<StereoPair> {
    let (left_in, right_in) = stereo_inputs(screen, rig, strategy, znear, zfar)?;
    let left = render_view(scene, &left_in, grid)?;
    let right = render_view(scene, &right_in, grid)?;
    let side_by_side = Image::side_by_side(&left, &right);
    Ok(StereoPair {
        left,
        right,
        side_by_side,
    })
}

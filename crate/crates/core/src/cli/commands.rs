use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::geom::{Mat4, Vec3};
use crate::offaxis::{
    offaxis_stereo_camera, offaxis_stereo_transform, stereo_eyes, Box2, CameraMatrices,
    PinholeCamera,
};
use crate::raygen::{
    generate_rays, ray_deviation, reconstruct_frustum, CameraInput, RayDeviation, Strategy,
};
use crate::render::render_stereo_pair;

use super::config::{RunConfig, StrategySelection};
use super::CliError;

/// Maximum angle between equivalent rays, radians.
pub const COMPARE_ANGLE_TOL: f64 = 1e-5;
/// Maximum origin-to-line distance between equivalent rays, meters.
pub const COMPARE_DISTANCE_TOL: f64 = 1e-5;

/// Eye displacement injected by the corrupted-matrix negative control.
const CORRUPTION_OFFSET: f64 = 0.05;

fn fmt_num(v: f64) -> String {
    let s = format!("{v:.9}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn fmt_vec(v: Vec3) -> String {
    format!("{} {} {}", fmt_num(v.x), fmt_num(v.y), fmt_num(v.z))
}

fn fmt_box(b: &Box2) -> String {
    format!(
        "{} {} {} {}",
        fmt_num(b.min[0]),
        fmt_num(b.min[1]),
        fmt_num(b.max[0]),
        fmt_num(b.max[1])
    )
}

fn fmt_sci(v: f64) -> String {
    format!("{v:.3e}")
}

fn eyes(config: &RunConfig) -> [(&'static str, Vec3); 2] {
    let (l, r) = stereo_eyes(&config.rig);
    [("left", l), ("right", r)]
}

/// Output paths for one strategy's stereo pair.
pub fn output_paths(config: &RunConfig, strategy: Strategy) -> [PathBuf; 3] {
    let prefix = config.output_prefix.to_string_lossy().into_owned();
    let stem = match config.strategy {
        StrategySelection::All => format!("{prefix}_s{}", strategy.number()),
        StrategySelection::One(_) => prefix,
    };
    ["left", "right", "sbs"].map(|part| PathBuf::from(format!("{stem}_{part}.ppm")))
}

/// Renders every selected strategy and writes `<prefix>_left.ppm`,
/// `<prefix>_right.ppm` and `<prefix>_sbs.ppm` (with an `_s<N>` infix when
/// all strategies are selected). Either every file is written or none.
pub fn cmd_render(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let scene = config.scene.build(&config.screen);
    let mut files = Vec::new();
    for strategy in config.strategy.strategies() {
        let pair = render_stereo_pair(
            &scene,
            &config.screen,
            &config.rig,
            strategy,
            config.grid,
            config.znear,
            config.zfar,
        )?;
        let [l, r, sbs] = output_paths(config, strategy);
        files.push((l, pair.left.encode_ppm()));
        files.push((r, pair.right.encode_ppm()));
        files.push((sbs, pair.side_by_side.encode_ppm()));
    }
    write_all_or_nothing(&files)?;
    for (path, _) in &files {
        writeln!(out, "wrote = {}", path.display())?;
    }
    Ok(())
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".tmp");
    PathBuf::from(s)
}

fn write_all_or_nothing(files: &[(PathBuf, Vec<u8>)]) -> Result<(), CliError> {
    let io_err = |path: &Path, source: io::Error| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut staged = Vec::new();
    for (path, bytes) in files {
        let tmp = tmp_path(path);
        if let Err(e) = fs::write(&tmp, bytes) {
            for t in &staged {
                let _ = fs::remove_file(t);
            }
            let _ = fs::remove_file(&tmp);
            return Err(io_err(path, e));
        }
        staged.push(tmp);
    }
    for (i, ((path, _), tmp)) in files.iter().zip(&staged).enumerate() {
        if let Err(e) = fs::rename(tmp, path) {
            for (p, _) in &files[..i] {
                let _ = fs::remove_file(p);
            }
            for t in &staged[i..] {
                let _ = fs::remove_file(t);
            }
            return Err(io_err(path, e));
        }
    }
    Ok(())
}

/// Shifts the eye encoded in `m.view` sideways, keeping a valid perspective
/// camera that no longer matches the configured eye.
pub fn corrupt_view(m: &CameraMatrices, screen_x: Vec3) -> Result<CameraMatrices, CliError> {
    let view = m.view * Mat4::translation(-screen_x * CORRUPTION_OFFSET);
    Ok(CameraMatrices::new(m.proj, view)?)
}

/// Cross-strategy deviation for one eye.
#[derive(Debug, Clone, Copy)]
pub struct EyeComparison {
    pub eye: Vec3,
    /// Pairs (1,2), (1,3), (2,3).
    pub pairs: [(Strategy, Strategy, RayDeviation); 3],
    pub eye_recovery_error: f64,
}

/// Generates all three ray sets for one eye and compares them pairwise.
pub fn compare_eye(
    config: &RunConfig,
    eye: Vec3,
    corrupt: bool,
) -> Result<EyeComparison, CliError> {
    let mut m = offaxis_stereo_transform(&config.screen, eye, config.znear, config.zfar)?;
    if corrupt {
        m = corrupt_view(&m, config.screen.basis()[0])?;
    }
    let cam = offaxis_stereo_camera(&config.screen, eye)?;
    let rays1 = generate_rays(&CameraInput::Matrices(m), config.grid)?;
    let rays2 = generate_rays(&CameraInput::Pinhole(cam), config.grid)?;
    let rays3 = generate_rays(&CameraInput::Reconstructed(m), config.grid)?;
    let rec = reconstruct_frustum(&m)?;
    Ok(EyeComparison {
        eye,
        pairs: [
            (
                Strategy::Matrices,
                Strategy::Pinhole,
                ray_deviation(&rays1, &rays2),
            ),
            (
                Strategy::Matrices,
                Strategy::Reconstructed,
                ray_deviation(&rays1, &rays3),
            ),
            (
                Strategy::Pinhole,
                Strategy::Reconstructed,
                ray_deviation(&rays2, &rays3),
            ),
        ],
        eye_recovery_error: rec.eye.distance(eye),
    })
}

/// Prints the per-eye, per-pair report; returns whether every pair is
/// within tolerance.
pub fn cmd_compare(
    config: &RunConfig,
    corrupt: bool,
    out: &mut dyn Write,
) -> Result<bool, CliError> {
    let mut pass = true;
    writeln!(
        out,
        "grid = {}x{}",
        config.grid.width(),
        config.grid.height()
    )?;
    writeln!(out, "threshold.angle_rad = {}", fmt_sci(COMPARE_ANGLE_TOL))?;
    writeln!(
        out,
        "threshold.distance_m = {}",
        fmt_sci(COMPARE_DISTANCE_TOL)
    )?;
    for (name, eye) in eyes(config) {
        let c = compare_eye(config, eye, corrupt)?;
        writeln!(out, "{name}.eye = {}", fmt_vec(c.eye))?;
        for (a, b, dev) in c.pairs {
            let key = format!("{name}.s{}_s{}", a.number(), b.number());
            writeln!(out, "{key}.max_angle_rad = {}", fmt_sci(dev.max_angle))?;
            writeln!(
                out,
                "{key}.max_origin_line_distance_m = {}",
                fmt_sci(dev.max_line_distance)
            )?;
            pass &= dev.within(COMPARE_ANGLE_TOL, COMPARE_DISTANCE_TOL);
        }
        writeln!(
            out,
            "{name}.s3.eye_recovery_error_m = {}",
            fmt_sci(c.eye_recovery_error)
        )?;
    }
    writeln!(out, "result = {}", if pass { "pass" } else { "fail" })?;
    Ok(pass)
}

fn write_matrix(out: &mut dyn Write, key: &str, m: &Mat4) -> io::Result<()> {
    for r in 0..4 {
        let row = m.row(r).map(fmt_num).join(" ");
        writeln!(out, "{key}.row{r} = {row}")?;
    }
    Ok(())
}

fn write_pinhole(out: &mut dyn Write, key: &str, c: &PinholeCamera) -> io::Result<()> {
    writeln!(out, "{key}.eye = {}", fmt_vec(c.eye))?;
    writeln!(out, "{key}.direction = {}", fmt_vec(c.direction))?;
    writeln!(out, "{key}.up = {}", fmt_vec(c.up))?;
    writeln!(out, "{key}.fovy_rad = {}", fmt_num(c.fovy))?;
    writeln!(out, "{key}.aspect = {}", fmt_num(c.aspect))?;
    writeln!(out, "{key}.image_region = {}", fmt_box(&c.image_region))
}

/// Largest parameter difference between two pinhole cameras, per field.
pub fn pinhole_differences(a: &PinholeCamera, b: &PinholeCamera) -> [(&'static str, f64); 6] {
    [
        ("eye", a.eye.max_abs_diff(b.eye)),
        ("direction", a.direction.max_abs_diff(b.direction)),
        ("up", a.up.max_abs_diff(b.up)),
        ("fovy_rad", (a.fovy - b.fovy).abs()),
        ("aspect", (a.aspect - b.aspect).abs()),
        ("image_region", a.image_region.max_abs_diff(&b.image_region)),
    ]
}

/// Prints, per eye, the matrices, the direct pinhole conversion and the
/// pinhole camera reconstructed from the matrices, plus their differences.
pub fn cmd_derive(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    for (name, eye) in eyes(config) {
        let m = offaxis_stereo_transform(&config.screen, eye, config.znear, config.zfar)?;
        let direct = offaxis_stereo_camera(&config.screen, eye)?;
        let rec = reconstruct_frustum(&m)?;
        let rebuilt = offaxis_stereo_camera(&rec.screen, rec.eye)?;

        writeln!(out, "{name}.eye = {}", fmt_vec(eye))?;
        write_matrix(out, &format!("{name}.proj"), &m.proj)?;
        write_matrix(out, &format!("{name}.view"), &m.view)?;
        write_pinhole(out, &format!("{name}.pinhole"), &direct)?;
        write_pinhole(out, &format!("{name}.reconstructed"), &rebuilt)?;
        writeln!(out, "{name}.reconstructed.skew_m = {}", fmt_sci(rec.skew))?;
        for (field, diff) in pinhole_differences(&direct, &rebuilt) {
            writeln!(out, "{name}.diff.{field} = {}", fmt_sci(diff))?;
        }
    }
    Ok(())
}

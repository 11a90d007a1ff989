//! Run configuration files.
//!
//! The format is TOML. Only `[screen]` and `head.position` are required:
//!
//! ```toml
//! [screen]                      # meters, CAVE space
//! lower_left  = [-1.0, -1.0, 0.0]
//! lower_right = [ 1.0, -1.0, 0.0]
//! upper_right = [ 1.0,  1.0, 0.0]
//!
//! [head]
//! position = [0.0, 0.0, 1.5]
//! right = [1.0, 0.0, 0.0]       # default: along the screen's bottom edge
//! ipd = 0.063                   # default 0.063
//!
//! [image]
//! width = 512                   # default 512
//! height = 512                  # default 512
//!
//! [camera]
//! znear = 0.001                 # default 1e-3
//! zfar = 1000.0                 # default 1000
//!
//! [render]
//! strategy = 2                  # 1, 2, 3 or "all"; default 2
//! scene = "default"             # "default" or "empty"
//! output = "stereo"             # output path prefix
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::geom::Vec3;
use crate::offaxis::{
    frustum_distances, stereo_eyes, ScreenConfig, StereoRig, DEFAULT_ZFAR, DEFAULT_ZNEAR,
};
use crate::raygen::{PixelGrid, Strategy};
use crate::render::Scene;

pub const DEFAULT_IPD: f64 = 0.063;
pub const DEFAULT_SIZE: usize = 512;
pub const DEFAULT_OUTPUT: &str = "stereo";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config field `{field}`: {message}")]
    Invalid { field: String, message: String },
}

impl ConfigError {
    fn invalid(field: &str, message: impl fmt::Display) -> Self {
        ConfigError::Invalid {
            field: field.to_string(),
            message: message.to_string(),
        }
    }
}

/// One strategy or all three.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategySelection {
    One(Strategy),
    All,
}

impl StrategySelection {
    pub fn strategies(&self) -> Vec<Strategy> {
        match self {
            StrategySelection::One(s) => vec![*s],
            StrategySelection::All => Strategy::ALL.to_vec(),
        }
    }
}

impl FromStr for StrategySelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "all" => Ok(StrategySelection::All),
            n => n
                .parse::<u8>()
                .ok()
                .and_then(Strategy::from_number)
                .map(StrategySelection::One)
                .ok_or_else(|| format!("expected 1, 2, 3 or \"all\", got `{n}`")),
        }
    }
}

impl fmt::Display for StrategySelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySelection::One(s) => write!(f, "{}", s.number()),
            StrategySelection::All => f.write_str("all"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneSelector {
    Default,
    Empty,
}

impl FromStr for SceneSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "default" => Ok(SceneSelector::Default),
            "empty" => Ok(SceneSelector::Empty),
            other => Err(format!(
                "unknown scene `{other}` (expected \"default\" or \"empty\")"
            )),
        }
    }
}

impl SceneSelector {
    pub fn build(&self, screen: &ScreenConfig) -> Scene {
        match self {
            SceneSelector::Default => Scene::default_for_screen(screen),
            SceneSelector::Empty => Scene::empty([0.05, 0.07, 0.12]),
        }
    }
}

/// Fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub screen: ScreenConfig,
    pub rig: StereoRig,
    pub grid: PixelGrid,
    pub strategy: StrategySelection,
    pub znear: f64,
    pub zfar: f64,
    pub scene: SceneSelector,
    pub output_prefix: PathBuf,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub strategy: Option<StrategySelection>,
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub output_prefix: Option<PathBuf>,
    pub scene: Option<SceneSelector>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    screen: RawScreen,
    head: RawHead,
    #[serde(default)]
    image: RawImage,
    #[serde(default)]
    camera: RawCamera,
    #[serde(default)]
    render: RawRender,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScreen {
    lower_left: [f64; 3],
    lower_right: [f64; 3],
    upper_right: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHead {
    position: [f64; 3],
    right: Option<[f64; 3]>,
    ipd: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawImage {
    width: Option<i64>,
    height: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCamera {
    znear: Option<f64>,
    zfar: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRender {
    strategy: Option<RawStrategy>,
    scene: Option<String>,
    output: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawStrategy {
    Number(i64),
    Text(String),
}

/// Parses and validates a config with no overrides.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;

    let screen = ScreenConfig::new(
        Vec3::from_array(raw.screen.lower_left),
        Vec3::from_array(raw.screen.lower_right),
        Vec3::from_array(raw.screen.upper_right),
    )
    .map_err(|e| ConfigError::invalid("screen", e))?;

    let ipd = raw.head.ipd.unwrap_or(DEFAULT_IPD);
    if !(ipd > 0.0) {
        return Err(ConfigError::invalid(
            "head.ipd",
            format!("must be > 0, got {ipd}"),
        ));
    }
    let right = raw
        .head
        .right
        .map(Vec3::from_array)
        .unwrap_or(screen.basis()[0]);
    let rig = StereoRig::new(Vec3::from_array(raw.head.position), right, ipd)
        .map_err(|e| ConfigError::invalid("head", e))?;

    let (left_eye, right_eye) = stereo_eyes(&rig);
    for (name, eye) in [("left", left_eye), ("right", right_eye)] {
        frustum_distances(&screen, eye).map_err(|e| {
            ConfigError::invalid("head.position", format!("{name} eye at {eye}: {e}"))
        })?;
    }

    let dim =
        |field: &str, from_file: Option<i64>, flag: Option<usize>| -> Result<usize, ConfigError> {
            let v = match flag {
                Some(v) => v as i64,
                None => from_file.unwrap_or(DEFAULT_SIZE as i64),
            };
            if v < 1 {
                return Err(ConfigError::invalid(
                    field,
                    format!("must be >= 1, got {v}"),
                ));
            }
            Ok(v as usize)
        };
    let width = dim("image.width", raw.image.width, overrides.width)?;
    let height = dim("image.height", raw.image.height, overrides.height)?;
    let grid = PixelGrid::new(width, height).map_err(|e| ConfigError::invalid("image", e))?;

    let znear = raw.camera.znear.unwrap_or(DEFAULT_ZNEAR);
    let zfar = raw.camera.zfar.unwrap_or(DEFAULT_ZFAR);
    if !(znear > 0.0 && znear.is_finite()) {
        return Err(ConfigError::invalid(
            "camera.znear",
            format!("must be > 0, got {znear}"),
        ));
    }
    if !(zfar > znear && zfar.is_finite()) {
        return Err(ConfigError::invalid(
            "camera.zfar",
            format!("must be finite and > znear ({znear}), got {zfar}"),
        ));
    }

    let strategy = match (overrides.strategy, raw.render.strategy) {
        (Some(s), _) => s,
        (None, None) => StrategySelection::One(Strategy::Pinhole),
        (None, Some(RawStrategy::Number(n))) => n
            .to_string()
            .parse()
            .map_err(|e: String| ConfigError::invalid("render.strategy", e))?,
        (None, Some(RawStrategy::Text(t))) => t
            .parse()
            .map_err(|e: String| ConfigError::invalid("render.strategy", e))?,
    };

    let scene = match (overrides.scene, raw.render.scene) {
        (Some(s), _) => s,
        (None, Some(name)) => name
            .parse()
            .map_err(|e: String| ConfigError::invalid("render.scene", e))?,
        (None, None) => SceneSelector::Default,
    };

    let output_prefix = overrides
        .output_prefix
        .clone()
        .or(raw.render.output.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    if output_prefix.as_os_str().is_empty() {
        return Err(ConfigError::invalid("render.output", "must not be empty"));
    }

    Ok(RunConfig {
        screen,
        rig,
        grid,
        strategy,
        znear,
        zfar,
        scene,
        output_prefix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[screen]
lower_left = [-1.0, -1.0, 0.0]
lower_right = [1.0, -1.0, 0.0]
upper_right = [1.0, 1.0, 0.0]

[head]
position = [0.0, 0.0, 1.5]
"#;

    fn invalid_field(text: &str) -> String {
        match parse_config(text) {
            Err(ConfigError::Invalid { field, .. }) => field,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.znear, 1e-3);
        assert_eq!(c.zfar, 1000.0);
        assert_eq!(c.rig.ipd(), 0.063);
        assert_eq!(c.rig.head_right(), Vec3::X);
        assert_eq!(c.strategy, StrategySelection::One(Strategy::Pinhole));
        assert_eq!((c.grid.width(), c.grid.height()), (512, 512));
        assert_eq!(c.scene, SceneSelector::Default);
        assert_eq!(c.output_prefix, PathBuf::from("stereo"));
    }

    #[test]
    fn collinear_screen() {
        let text = MINIMAL.replace(
            "upper_right = [1.0, 1.0, 0.0]",
            "upper_right = [3.0, -1.0, 0.0]",
        );
        assert_eq!(invalid_field(&text), "screen");
    }

    #[test]
    fn negative_ipd() {
        let text = format!("{MINIMAL}ipd = -0.01\n");
        assert_eq!(invalid_field(&text), "head.ipd");
    }

    #[test]
    fn eye_behind_screen() {
        let text = MINIMAL.replace("position = [0.0, 0.0, 1.5]", "position = [0.0, 0.0, -1.5]");
        assert_eq!(invalid_field(&text), "head.position");
    }

    #[test]
    fn parse_error_has_location() {
        let err = parse_config("[screen]\nlower_left = [1, 2\n").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, ConfigError::Parse(_)));
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn unknown_field_rejected() {
        let text = format!("{MINIMAL}eye_height = 1.7\n");
        let msg = parse_config(&text).unwrap_err().to_string();
        assert!(msg.contains("eye_height"), "{msg}");
    }

    #[test]
    fn strategies_and_overrides() {
        let text = format!("{MINIMAL}\n[render]\nstrategy = \"all\"\n");
        assert_eq!(
            parse_config(&text).unwrap().strategy,
            StrategySelection::All
        );
        let text = format!("{MINIMAL}\n[render]\nstrategy = 3\n");
        assert_eq!(
            parse_config(&text).unwrap().strategy,
            StrategySelection::One(Strategy::Reconstructed)
        );
        let text = format!("{MINIMAL}\n[render]\nstrategy = 4\n");
        assert_eq!(invalid_field(&text), "render.strategy");

        let o = Overrides {
            strategy: Some(StrategySelection::One(Strategy::Matrices)),
            width: Some(7),
            height: Some(9),
            output_prefix: Some(PathBuf::from("out/x")),
            scene: Some(SceneSelector::Empty),
        };
        let c = parse_config_with(&text, &o).unwrap();
        assert_eq!(c.strategy, StrategySelection::One(Strategy::Matrices));
        assert_eq!((c.grid.width(), c.grid.height()), (7, 9));
        assert_eq!(c.output_prefix, PathBuf::from("out/x"));
        assert_eq!(c.scene, SceneSelector::Empty);
    }

    #[test]
    fn bad_image_and_clip() {
        let text = format!("{MINIMAL}\n[image]\nwidth = 0\n");
        assert_eq!(invalid_field(&text), "image.width");
        let text = format!("{MINIMAL}\n[camera]\nznear = 1.0\nzfar = 0.5\n");
        assert_eq!(invalid_field(&text), "camera.zfar");
    }
}

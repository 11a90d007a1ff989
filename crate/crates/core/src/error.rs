use thiserror::Error;

/// Errors raised by the camera-geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate frustum: {0}")]
    DegenerateFrustum(String),
    #[error("singular matrix (|det| = {det:e})")]
    SingularMatrix { det: f64 },
    #[error("unprojection singularity: homogeneous w = {w:e}")]
    UnprojectionSingularity { w: f64 },
    #[error("planes are parallel (|n_a x n_b| = {cross_norm:e})")]
    ParallelPlanes { cross_norm: f64 },
    #[error("lines are parallel (|d_a x d_b| = {cross_norm:e})")]
    ParallelLines { cross_norm: f64 },
    #[error("degenerate screen: {0}")]
    DegenerateScreen(String),
    #[error("screen is not rectangular: relative corner skew {skew:e} exceeds {limit:e}")]
    NonRectangularScreen { skew: f64, limit: f64 },
    #[error("eye is behind (or on) the screen plane: distance {dist}")]
    EyeBehindScreen { dist: f64 },
    #[error("eye projects outside the screen: {edge} edge distance is {value}")]
    EyeOffScreen { edge: &'static str, value: f64 },
    #[error("matrices do not describe a perspective frustum: eye reconstruction skew {skew:e} m exceeds {limit:e} m")]
    ExcessiveSkew { skew: f64, limit: f64 },
    #[error("invalid stereo rig: {0}")]
    InvalidRig(String),
    #[error("invalid pinhole camera: {0}")]
    InvalidCamera(String),
    #[error("invalid pixel grid {width}x{height}")]
    InvalidGrid { width: usize, height: usize },
    #[error("pixel ({x}, {y}) outside {width}x{height} grid")]
    PixelOutOfRange {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },
    #[error("invalid scene: {0}")]
    InvalidScene(String),
}

pub type Result<T> = std::result::Result<T, Error>;

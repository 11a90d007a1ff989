#![allow(dead_code)]

use offaxis_stereo::geom::Vec3;
use offaxis_stereo::offaxis::ScreenConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_screen() -> ScreenConfig {
    ScreenConfig::new(
        Vec3::new(-1.0, -1.0, 0.0),
        Vec3::new(1.0, -1.0, 0.0),
        Vec3::new(1.0, 1.0, 0.0),
    )
    .unwrap()
}

pub fn random_vec(rng: &mut impl Rng, lo: f64, hi: f64) -> Vec3 {
    Vec3::new(
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
    )
}

pub fn random_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = random_vec(rng, -1.0, 1.0);
        let len = v.length();
        if len > 0.1 && len <= 1.0 {
            return v / len;
        }
    }
}

/// Random right-handed orthonormal frame by Gram-Schmidt.
pub fn random_frame(rng: &mut impl Rng) -> [Vec3; 3] {
    let x = random_unit(rng);
    loop {
        let t = random_unit(rng);
        let y = t - x * x.dot(t);
        if y.length() > 0.1 {
            let y = y.normalize();
            return [x, y, x.cross(y)];
        }
    }
}

/// A screen and tracked eye drawn from the acceptance distribution:
/// edges 0.5-10 m, arbitrary rigid pose, eye 0.2-5 m in front with every
/// edge distance at least 5% of the screen extent in that direction.
#[derive(Debug, Clone, Copy)]
pub struct Configuration {
    pub screen: ScreenConfig,
    pub eye: Vec3,
}

pub fn random_configuration(rng: &mut impl Rng) -> Configuration {
    let [x, y, z] = random_frame(rng);
    let w = rng.random_range(0.5..10.0);
    let h = rng.random_range(0.5..10.0);
    let origin = random_vec(rng, -5.0, 5.0);
    let ll = origin;
    let lr = ll + x * w;
    let ur = lr + y * h;
    let screen = ScreenConfig::new(ll, lr, ur).unwrap();
    let s = rng.random_range(0.05..0.95);
    let t = rng.random_range(0.05..0.95);
    let dist = rng.random_range(0.2..5.0);
    let eye = ll + x * (s * w) + y * (t * h) + z * dist;
    Configuration { screen, eye }
}

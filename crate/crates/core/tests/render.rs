mod common;

use common::unit_screen;
use offaxis_stereo::geom::Vec3;
use offaxis_stereo::offaxis::{offaxis_stereo_transform, stereo_eyes, ScreenConfig, StereoRig};
use offaxis_stereo::raygen::{CameraInput, PixelGrid, Strategy};
use offaxis_stereo::render::{
    decode_ppm, hit_map, object_centroid, render_stereo_pair, render_view, stereo_inputs, ObjectId,
    Scene,
};

const ZNEAR: f64 = 1e-3;
const ZFAR: f64 = 1000.0;

fn rig() -> StereoRig {
    StereoRig::new(Vec3::new(0.1, -0.05, 1.5), Vec3::X, 0.063).unwrap()
}

#[test]
fn renders_are_bit_identical() {
    let s = unit_screen();
    let scene = Scene::default_for_screen(&s);
    let grid = PixelGrid::new(48, 40).unwrap();
    for strat in Strategy::ALL {
        let a = render_stereo_pair(&scene, &s, &rig(), strat, grid, ZNEAR, ZFAR).unwrap();
        let b = render_stereo_pair(&scene, &s, &rig(), strat, grid, ZNEAR, ZFAR).unwrap();
        assert_eq!(a.side_by_side.encode_ppm(), b.side_by_side.encode_ppm());
    }
}

#[test]
fn empty_scene_is_background() {
    let s = unit_screen();
    let scene = Scene::empty([0.2, 0.4, 0.6]);
    let input =
        CameraInput::for_eye(Strategy::Pinhole, &s, Vec3::new(0.0, 0.0, 1.0), ZNEAR, ZFAR).unwrap();
    let img = render_view(&scene, &input, PixelGrid::new(8, 8).unwrap()).unwrap();
    assert!(img.pixels().iter().all(|p| *p == [0.2, 0.4, 0.6]));
}

fn assert_strategies_match(screen: &ScreenConfig, rig: &StereoRig, grid: PixelGrid) {
    let scene = Scene::default_for_screen(screen);
    let images: Vec<Vec<u8>> = Strategy::ALL
        .iter()
        .map(|st| {
            render_stereo_pair(&scene, screen, rig, *st, grid, ZNEAR, ZFAR)
                .unwrap()
                .side_by_side
                .to_rgb8()
        })
        .collect();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let worst = images[i]
            .iter()
            .zip(&images[j])
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap();
        assert!(
            worst <= 1,
            "strategies {} and {}: max channel difference {worst}",
            i + 1,
            j + 1
        );
    }
}

// Head positions avoid sampling rows that land exactly on a checker edge,
// where a last-bit difference between strategies would flip the tile.
#[test]
fn strategies_render_the_same_image() {
    let rig = StereoRig::new(Vec3::new(0.1037, -0.0561, 1.4719), Vec3::X, 0.063).unwrap();
    assert_strategies_match(&unit_screen(), &rig, PixelGrid::new(96, 96).unwrap());

    let wall = ScreenConfig::new(
        Vec3::new(-1.5, 0.0, -1.5),
        Vec3::new(1.5, 0.0, -1.5),
        Vec3::new(1.5, 3.0, -1.5),
    )
    .unwrap();
    let rig = StereoRig::new(Vec3::new(0.0131, 1.6173, 0.0219), Vec3::X, 0.063).unwrap();
    assert_strategies_match(&wall, &rig, PixelGrid::new(128, 128).unwrap());
}

#[test]
fn zero_ipd_gives_identical_eyes() {
    let s = unit_screen();
    let scene = Scene::default_for_screen(&s);
    let rig = StereoRig::new(Vec3::new(0.0, 0.0, 1.5), Vec3::X, 0.0).unwrap();
    let pair = render_stereo_pair(
        &scene,
        &s,
        &rig,
        Strategy::Matrices,
        PixelGrid::new(32, 32).unwrap(),
        ZNEAR,
        ZFAR,
    )
    .unwrap();
    assert_eq!(pair.left, pair.right);
    assert_eq!(pair.side_by_side.width(), 64);
    let bytes = pair.side_by_side.encode_ppm();
    let (w, h, data) = decode_ppm(&bytes).unwrap();
    assert_eq!((w, h, data.len()), (64, 32, 64 * 32 * 3));
}

#[test]
fn disparity_sign_of_projected_points() {
    // Projective oracle on single points: in front of the screen the left
    // eye sees the point further right than the right eye (crossed); behind
    // it, further left (uncrossed).
    let s = unit_screen();
    let (l, r) = stereo_eyes(&rig());
    let ml = offaxis_stereo_transform(&s, l, ZNEAR, ZFAR).unwrap();
    let mr = offaxis_stereo_transform(&s, r, ZNEAR, ZFAR).unwrap();
    let front = Vec3::new(0.2, 0.1, 0.5);
    let behind = Vec3::new(0.2, 0.1, -0.5);
    let on = Vec3::new(0.2, 0.1, 0.0);
    assert!(ml.project(front).unwrap().x > mr.project(front).unwrap().x);
    assert!(ml.project(behind).unwrap().x < mr.project(behind).unwrap().x);
    assert!((ml.project(on).unwrap().x - mr.project(on).unwrap().x).abs() < 1e-12);
}

#[test]
fn sphere_silhouettes_show_parallax() {
    let s = unit_screen();
    let scene = Scene::default_for_screen(&s);
    let grid = PixelGrid::new(160, 160).unwrap();
    let (li, ri) = stereo_inputs(&s, &rig(), Strategy::Pinhole, ZNEAR, ZFAR).unwrap();
    let lm = hit_map(&scene, &li, grid).unwrap();
    let rm = hit_map(&scene, &ri, grid).unwrap();
    let disparity = |i: usize| {
        let a = object_centroid(&lm, grid, ObjectId::Sphere(i)).unwrap();
        let b = object_centroid(&rm, grid, ObjectId::Sphere(i)).unwrap();
        a.0 - b.0
    };
    assert!(disparity(Scene::DEFAULT_FRONT) > 1.0);
    assert!(disparity(Scene::DEFAULT_ON_SCREEN).abs() <= 1.0);
    assert!(disparity(Scene::DEFAULT_BEHIND) < -1.0);
}

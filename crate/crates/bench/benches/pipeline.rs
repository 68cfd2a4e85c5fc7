//! Benchmarks of the per-frame hot paths: background subtraction,
//! connected-component labeling, the particle-filter tracking step, and
//! fuzzy inference.

use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use depthfall::background::{build_model, subtract};
use depthfall::dataio::CameraModel;
use depthfall::features::{DynamicFeatures, StaticFeatures};
use depthfall::fuzzy::FallFuzzy;
use depthfall::segmentation::connected_components_depth;
use depthfall::synth::{render_ellipsoid, Aabb, Scene};
use depthfall::tracking::{HeadTracker, TrackerConfig};
use depthfall::Config;

const W: u32 = 160;
const H: u32 = 120;

fn scene_frames() -> Vec<depthfall::dataio::DepthFrame> {
    let scene = Scene::indoor(W, H);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let person = Aabb::centered([0.0, 0.85, 3.0], [0.25, 0.85, 0.2]);
    (0..35)
        .map(|i| {
            let (mut f, _) = scene.render(if i >= 30 { Some(&person) } else { None }, &mut rng);
            f.frame_index = i;
            f.t_ms = i as i64 * 33;
            f
        })
        .collect()
}

fn bench_background(c: &mut Criterion) {
    let frames = scene_frames();
    let model = build_model(&frames[..30], 30, 100).unwrap();
    let frame = &frames[34];
    c.bench_function("background_subtract_160x120", |b| {
        b.iter(|| subtract(black_box(frame), black_box(&model)).unwrap())
    });
}

fn bench_ccl(c: &mut Criterion) {
    let frames = scene_frames();
    let model = build_model(&frames[..30], 30, 100).unwrap();
    let fore = subtract(&frames[34], &model).unwrap();
    c.bench_function("connected_components_160x120", |b| {
        b.iter(|| connected_components_depth(black_box(&fore.depth), 50.0, 400, 8))
    });
}

fn bench_tracker_step(c: &mut Criterion) {
    let cfg = Config::default();
    let cam = CameraModel {
        focal_px: 145.0,
        baseline_m: 0.075,
        principal_x: (W as f64 - 1.0) / 2.0,
        principal_y: (H as f64 - 1.0) / 2.0,
        distortion_dx: 0.0,
        distortion_dy: 0.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let frame =
        render_ellipsoid(W, H, &cam, [0.0, 0.3, 3.0], [0.09, 0.09, 0.12], 5.0, 2.0, &mut rng);
    let mut base = HeadTracker::new(TrackerConfig::from_config(&cfg).unwrap());
    base.init([0.0, 0.3, 3.0]);
    c.bench_function("tracker_step_500_particles", |b| {
        b.iter_batched(
            || base.clone(),
            |mut t| t.step(black_box(&frame), black_box(&cam)).unwrap(),
            criterion::BatchSize::SmallInput,
        )
    });
}

fn bench_fuzzy(c: &mut Criterion) {
    let fis = FallFuzzy::from_config(&Config::default()).unwrap();
    let stat = StaticFeatures {
        hw: 0.6,
        h_hmax: 0.25,
        d: 300.0,
        max_sigma: 700.0,
        p40: 0.9,
        height_m: 0.4,
    };
    let dynf = DynamicFeatures { h_ratio: 0.4, d_ratio: 0.5, sv_total: 3.1 };
    c.bench_function("fuzzy_full_hierarchy", |b| {
        b.iter(|| fis.evaluate(black_box(&stat), black_box(&dynf)).unwrap())
    });
}

criterion_group!(benches, bench_background, bench_ccl, bench_tracker_step, bench_fuzzy);
criterion_main!(benches);

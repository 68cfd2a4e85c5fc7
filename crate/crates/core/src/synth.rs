//! Synthetic depth-scene and accelerometer generation used by tests,
//! benchmarks and the evaluation harness. Renders analytic geometry (floor
//! plane, wall, boxes, an ellipsoid head) through the same camera model the
//! loaders use, so every stage of the pipeline can be exercised against known
//! ground truth.

use crate::dataio::{AccelSample, CameraModel, DepthFrame, Sequence};
use crate::error::{Error, Result};
use crate::geometry::Plane;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a rendered pixel ray hit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hit {
    None,
    Floor,
    Wall,
    Person,
    Furniture,
}

/// Axis-aligned box in world coordinates (metres, Y up, floor at y = 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn centered(center: [f64; 3], half: [f64; 3]) -> Self {
        Self {
            min: [center[0] - half[0], center[1] - half[1], center[2] - half[2]],
            max: [center[0] + half[0], center[1] + half[1], center[2] + half[2]],
        }
    }

    /// Slab-method ray intersection; returns the entry parameter `s > 0`.
    pub fn ray_hit(&self, origin: &[f64; 3], dir: &[f64; 3]) -> Option<f64> {
        let mut t_near = f64::NEG_INFINITY;
        let mut t_far = f64::INFINITY;
        for k in 0..3 {
            if dir[k].abs() < 1e-12 {
                if origin[k] < self.min[k] || origin[k] > self.max[k] {
                    return None;
                }
                continue;
            }
            let inv = 1.0 / dir[k];
            let (mut t0, mut t1) = ((self.min[k] - origin[k]) * inv, (self.max[k] - origin[k]) * inv);
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_near = t_near.max(t0);
            t_far = t_far.min(t1);
            if t_near > t_far {
                return None;
            }
        }
        if t_far <= 0.0 {
            return None;
        }
        Some(if t_near > 0.0 { t_near } else { t_far })
    }
}

/// A static room seen by a tilted frontal camera.
#[derive(Debug, Clone)]
pub struct Scene {
    pub width: u32,
    pub height: u32,
    pub camera: CameraModel,
    /// Camera height above the floor, metres.
    pub cam_height: f64,
    /// Downward pitch of the optical axis, radians.
    pub pitch: f64,
    /// Back wall at this world z.
    pub wall_z: f64,
    pub furniture: Vec<Aabb>,
    /// Uniform depth noise amplitude, millimetres.
    pub noise_mm: f64,
    /// Sensor range: minimum and full-scale depth, millimetres.
    pub min_depth_mm: f64,
    pub ci_mm: f64,
}

impl Scene {
    /// A 320 x 240 indoor default: camera 1 m high, pitched 8 degrees down,
    /// wall 7 m away.
    pub fn indoor(width: u32, height: u32) -> Self {
        let f = 580.0 * width as f64 / 640.0; // keep the 640-wide field of view
        Scene {
            width,
            height,
            camera: CameraModel {
                focal_px: f,
                baseline_m: 0.075,
                principal_x: (width as f64 - 1.0) / 2.0,
                principal_y: (height as f64 - 1.0) / 2.0,
                distortion_dx: 0.0,
                distortion_dy: 0.0,
            },
            cam_height: 1.0,
            pitch: 8f64.to_radians(),
            wall_z: 7.0,
            furniture: Vec::new(),
            noise_mm: 5.0,
            min_depth_mm: 400.0,
            ci_mm: 6000.0,
        }
    }

    /// Camera origin in world coordinates.
    fn origin(&self) -> [f64; 3] {
        [0.0, self.cam_height, 0.0]
    }

    /// Rotate a camera-frame vector to world frame: pitch `t` tips the
    /// optical axis (camera +Z) downward about the world X axis.
    fn cam_to_world(&self, v: [f64; 3]) -> [f64; 3] {
        let (c, s) = (self.pitch.cos(), self.pitch.sin());
        [v[0], v[1] * c - v[2] * s, v[1] * s + v[2] * c]
    }

    /// The camera-frame ray direction of a pixel, z-component 1, matching the
    /// loader back-projection `X = -(Z/f)(x - cx)`.
    fn pixel_ray(&self, x: u32, y: u32) -> [f64; 3] {
        [
            -(x as f64 - self.camera.principal_x) / self.camera.focal_px,
            -(y as f64 - self.camera.principal_y) / self.camera.focal_px,
            1.0,
        ]
    }

    /// The true floor plane (world y = 0) expressed in the camera frame,
    /// oriented positive above the floor.
    pub fn floor_plane(&self) -> Plane {
        // A camera point p maps to world height
        // cam_height + p.y*cos(pitch) - p.z*sin(pitch), so the floor is the
        // zero set of that expression; the normal already has unit length.
        let (c, s) = (self.pitch.cos(), self.pitch.sin());
        Plane { a: 0.0, b: c, c: -s, d: self.cam_height, inlier_ratio: 1.0 }
    }

    /// Render one frame: depth in millimetres (0 = no measured depth) plus a
    /// ground-truth hit class per pixel.
    pub fn render(&self, person: Option<&Aabb>, rng: &mut ChaCha8Rng) -> (DepthFrame, Vec<Hit>) {
        let origin = self.origin();
        let n_px = (self.width * self.height) as usize;
        let mut depth = vec![0u16; n_px];
        let mut hits = vec![Hit::None; n_px];
        for y in 0..self.height {
            for x in 0..self.width {
                let dir = self.cam_to_world(self.pixel_ray(x, y));
                let mut best: Option<(f64, Hit)> = None;
                let consider = |s: Option<f64>, hit: Hit, best: &mut Option<(f64, Hit)>| {
                    if let Some(s) = s {
                        if s > 0.0 && best.map(|(b, _)| s < b).unwrap_or(true) {
                            *best = Some((s, hit));
                        }
                    }
                };
                // Floor y = 0.
                let floor_s = if dir[1] < -1e-9 { Some(-origin[1] / dir[1]) } else { None };
                consider(floor_s, Hit::Floor, &mut best);
                // Back wall z = wall_z.
                let wall_s =
                    if dir[2] > 1e-9 { Some((self.wall_z - origin[2]) / dir[2]) } else { None };
                consider(wall_s, Hit::Wall, &mut best);
                for fur in &self.furniture {
                    consider(fur.ray_hit(&origin, &dir), Hit::Furniture, &mut best);
                }
                if let Some(p) = person {
                    consider(p.ray_hit(&origin, &dir), Hit::Person, &mut best);
                }
                let i = (y * self.width + x) as usize;
                if let Some((s, hit)) = best {
                    // Depth is the camera-frame z of the hit, which equals s
                    // because the pixel ray has unit z in the camera frame.
                    let mut mm = s * 1000.0;
                    if self.noise_mm > 0.0 {
                        mm += rng.gen_range(-self.noise_mm..=self.noise_mm);
                    }
                    if mm >= self.min_depth_mm && mm <= self.ci_mm {
                        depth[i] = mm.round() as u16;
                        hits[i] = hit;
                    }
                }
            }
        }
        (DepthFrame::new(self.width, self.height, depth), hits)
    }
}

/// A straight-down ceiling camera over the same world.
#[derive(Debug, Clone)]
pub struct OverheadScene {
    pub width: u32,
    pub height: u32,
    pub camera: CameraModel,
    /// Ceiling height, metres.
    pub cam_height: f64,
    pub furniture: Vec<Aabb>,
    pub noise_mm: f64,
    pub min_depth_mm: f64,
    pub ci_mm: f64,
}

impl OverheadScene {
    pub fn indoor(width: u32, height: u32) -> Self {
        let f = 580.0 * width as f64 / 640.0;
        OverheadScene {
            width,
            height,
            camera: CameraModel {
                focal_px: f,
                baseline_m: 0.075,
                principal_x: (width as f64 - 1.0) / 2.0,
                principal_y: (height as f64 - 1.0) / 2.0,
                distortion_dx: 0.0,
                distortion_dy: 0.0,
            },
            cam_height: 2.6,
            furniture: Vec::new(),
            noise_mm: 5.0,
            min_depth_mm: 400.0,
            ci_mm: 6000.0,
        }
    }

    /// Floor plane in the camera frame: depth `cam_height` straight down.
    pub fn floor_plane(&self) -> Plane {
        Plane { a: 0.0, b: 0.0, c: -1.0, d: self.cam_height, inlier_ratio: 1.0 }
    }

    /// Map camera frame to world: camera +Z looks along world -Y, camera -X
    /// maps to world +X (consistent with the negated back-projection),
    /// camera -Y maps to world +Z.
    fn cam_to_world(&self, v: [f64; 3]) -> [f64; 3] {
        [-v[0], -v[2], -v[1]]
    }

    pub fn render(&self, person: Option<&Aabb>, rng: &mut ChaCha8Rng) -> (DepthFrame, Vec<Hit>) {
        let origin = [0.0, self.cam_height, 0.0];
        let n_px = (self.width * self.height) as usize;
        let mut depth = vec![0u16; n_px];
        let mut hits = vec![Hit::None; n_px];
        for y in 0..self.height {
            for x in 0..self.width {
                let ray = [
                    -(x as f64 - self.camera.principal_x) / self.camera.focal_px,
                    -(y as f64 - self.camera.principal_y) / self.camera.focal_px,
                    1.0,
                ];
                let dir = self.cam_to_world(ray);
                let mut best: Option<(f64, Hit)> = None;
                let consider = |s: Option<f64>, hit: Hit, best: &mut Option<(f64, Hit)>| {
                    if let Some(s) = s {
                        if s > 0.0 && best.map(|(b, _)| s < b).unwrap_or(true) {
                            *best = Some((s, hit));
                        }
                    }
                };
                let floor_s = if dir[1] < -1e-9 { Some(-origin[1] / dir[1]) } else { None };
                consider(floor_s, Hit::Floor, &mut best);
                for fur in &self.furniture {
                    consider(fur.ray_hit(&origin, &dir), Hit::Furniture, &mut best);
                }
                if let Some(p) = person {
                    consider(p.ray_hit(&origin, &dir), Hit::Person, &mut best);
                }
                let i = (y * self.width + x) as usize;
                if let Some((s, hit)) = best {
                    let mut mm = s * 1000.0;
                    if self.noise_mm > 0.0 {
                        mm += rng.gen_range(-self.noise_mm..=self.noise_mm);
                    }
                    if mm >= self.min_depth_mm && mm <= self.ci_mm {
                        depth[i] = mm.round() as u16;
                        hits[i] = hit;
                    }
                }
            }
        }
        (DepthFrame::new(self.width, self.height, depth), hits)
    }
}

/// Render an ellipsoid (axes `a, b, c` metres) centred at `center` (camera
/// frame, metres) against a flat background at `background_m`, by exact
/// ray-quadric intersection through the standard pixel rays.
pub fn render_ellipsoid(
    width: u32,
    height: u32,
    cam: &CameraModel,
    center: [f64; 3],
    axes: [f64; 3],
    background_m: f64,
    noise_mm: f64,
    rng: &mut ChaCha8Rng,
) -> DepthFrame {
    let mut depth = vec![0u16; (width * height) as usize];
    for y in 0..height {
        for x in 0..width {
            let dir = [
                -(x as f64 - cam.principal_x) / cam.focal_px,
                -(y as f64 - cam.principal_y) / cam.focal_px,
                1.0,
            ];
            // Solve |diag(1/a,1/b,1/c) (s*dir - center)|^2 = 1 for s.
            let d = [dir[0] / axes[0], dir[1] / axes[1], dir[2] / axes[2]];
            let o = [-center[0] / axes[0], -center[1] / axes[1], -center[2] / axes[2]];
            let qa = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
            let qb = 2.0 * (o[0] * d[0] + o[1] * d[1] + o[2] * d[2]);
            let qc = o[0] * o[0] + o[1] * o[1] + o[2] * o[2] - 1.0;
            let disc = qb * qb - 4.0 * qa * qc;
            let mut z = background_m;
            if disc >= 0.0 {
                let s = (-qb - disc.sqrt()) / (2.0 * qa);
                if s > 0.0 && s < background_m {
                    z = s;
                }
            }
            let mut mm = z * 1000.0;
            if noise_mm > 0.0 {
                mm += rng.gen_range(-noise_mm..=noise_mm);
            }
            depth[(y * width + x) as usize] = mm.round().max(0.0) as u16;
        }
    }
    DepthFrame::new(width, height, depth)
}

/// Activity scripts for episode generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Walk in, stand, fall forward in ~600 ms with free-fall dip and impact
    /// spike, then lie still.
    Fall,
    /// Walk in, lie down slowly (~2.5 s), no impact spike.
    LieDown,
    /// Walk in, sit down on a bench; optionally with an energetic ~2.9 g
    /// plop, but the bench keeps the pose clearly not lying.
    Sit { spike: bool },
    /// Walk in, squat for a while, stand back up. No spike.
    Squat,
    /// Walk in, bend down to pick something up, straighten. No spike.
    Bend,
    /// Walk around only.
    Walk,
}

impl Scenario {
    pub fn is_fall(self) -> bool {
        matches!(self, Scenario::Fall)
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fall => "fall",
            Scenario::LieDown => "lie-down",
            Scenario::Sit { spike: true } => "sit-energetic",
            Scenario::Sit { spike: false } => "sit",
            Scenario::Squat => "squat",
            Scenario::Bend => "bend",
            Scenario::Walk => "walk",
        }
    }
}

/// A generated test episode with ground-truth label.
#[derive(Debug, Clone)]
pub struct Episode {
    pub seq: Sequence,
    pub fall: bool,
    pub name: String,
}

const FPS: f64 = 30.0;
const ACCEL_HZ: f64 = 100.0;
/// Person-free frames at the start of every episode (background + floor
/// warm-up for the detector).
pub const WARMUP_FRAMES: usize = 35;

/// Per-frame person pose: world position of the body centre line and body
/// shape.
#[derive(Debug, Clone, Copy)]
struct Pose {
    /// Body centre floor position.
    x: f64,
    z: f64,
    /// Body top height above floor.
    height: f64,
    /// Lateral half width; lying poses grow along X instead of Y.
    lying: bool,
}

impl Pose {
    fn aabb(&self) -> Aabb {
        if self.lying {
            // Lying along the X axis: 1.6 m long, 0.25 m high, 0.5 m wide.
            Aabb::centered([self.x, self.height / 2.0, self.z], [0.8, self.height / 2.0, 0.25])
        } else {
            Aabb::centered([self.x, self.height / 2.0, self.z], [0.25, self.height / 2.0, 0.18])
        }
    }
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t.clamp(0.0, 1.0)
}

/// Script of (pose per frame, accelerometer magnitude envelope per sample).
struct Script {
    poses: Vec<Option<Pose>>,
    /// Per-accel-sample SVtotal values.
    sv: Vec<f64>,
}

fn standing_height() -> f64 {
    1.7
}

/// Walk-in segment: the person enters at z = 3.5 m and sways sideways so the
/// detector sees sustained motion (used for h_max calibration).
fn walk_frames(n: usize, phase: f64) -> Vec<Pose> {
    (0..n)
        .map(|k| {
            let t = k as f64 / FPS;
            Pose {
                x: 0.4 * (1.3 * t + phase).sin(),
                z: 3.2 + 0.3 * (0.9 * t + phase).cos(),
                height: standing_height() - 0.02 * (4.0 * t).sin().abs(),
                lying: false,
            }
        })
        .collect()
}

fn rest_sv(rng: &mut ChaCha8Rng) -> f64 {
    1.0 + rng.gen_range(-0.02..0.02)
}

fn walk_sv(rng: &mut ChaCha8Rng) -> f64 {
    1.0 + rng.gen_range(-0.25..0.25)
}

fn build_script(kind: Scenario, rng: &mut ChaCha8Rng) -> Script {
    let mut poses: Vec<Option<Pose>> = Vec::new();
    // Background warm-up: empty room.
    for _ in 0..WARMUP_FRAMES {
        poses.push(None);
    }
    // Walk in (2.5 s), then stand still (1.2 s).
    let walk_n = 75;
    let stand_n = 36;
    let walked = walk_frames(walk_n, rng.gen_range(0.0..3.0));
    let stand_at = *walked.last().unwrap();
    poses.extend(walked.into_iter().map(Some));
    for _ in 0..stand_n {
        poses.push(Some(Pose { height: standing_height(), ..stand_at }));
    }

    // Scenario action + aftermath.
    let action_start = poses.len();
    match kind {
        Scenario::Fall => {
            let n = 18; // ~600 ms
            for k in 0..n {
                let t = (k + 1) as f64 / n as f64;
                poses.push(Some(Pose {
                    x: stand_at.x,
                    z: stand_at.z,
                    height: lerp(standing_height(), 0.25, t * t), // accelerating drop
                    lying: t > 0.6,
                }));
            }
            for _ in 0..80 {
                poses.push(Some(Pose { height: 0.25, lying: true, ..stand_at }));
            }
        }
        Scenario::LieDown => {
            let n = 75; // ~2.5 s
            for k in 0..n {
                let t = (k + 1) as f64 / n as f64;
                poses.push(Some(Pose {
                    x: stand_at.x,
                    z: stand_at.z,
                    height: lerp(standing_height(), 0.25, t),
                    lying: t > 0.75,
                }));
            }
            for _ in 0..80 {
                poses.push(Some(Pose { height: 0.25, lying: true, ..stand_at }));
            }
        }
        Scenario::Sit { .. } => {
            let n = 24; // ~0.8 s down onto the bench
            for k in 0..n {
                let t = (k + 1) as f64 / n as f64;
                poses.push(Some(Pose {
                    x: stand_at.x,
                    z: stand_at.z,
                    height: lerp(standing_height(), 1.05, t),
                    lying: false,
                }));
            }
            for _ in 0..90 {
                poses.push(Some(Pose { height: 1.05, lying: false, ..stand_at }));
            }
        }
        Scenario::Squat => {
            let n = 30;
            for k in 0..n {
                let t = (k + 1) as f64 / n as f64;
                poses.push(Some(Pose {
                    x: stand_at.x,
                    z: stand_at.z,
                    height: lerp(standing_height(), 0.85, t),
                    lying: false,
                }));
            }
            for _ in 0..45 {
                poses.push(Some(Pose { height: 0.85, lying: false, ..stand_at }));
            }
            for k in 0..30 {
                let t = (k + 1) as f64 / 30.0;
                poses.push(Some(Pose {
                    x: stand_at.x,
                    z: stand_at.z,
                    height: lerp(0.85, standing_height(), t),
                    lying: false,
                }));
            }
            for _ in 0..30 {
                poses.push(Some(Pose { height: standing_height(), lying: false, ..stand_at }));
            }
        }
        Scenario::Bend => {
            let n = 27;
            for k in 0..n {
                let t = (k + 1) as f64 / n as f64;
                poses.push(Some(Pose {
                    x: stand_at.x,
                    z: stand_at.z,
                    height: lerp(standing_height(), 1.0, t),
                    lying: false,
                }));
            }
            for _ in 0..36 {
                poses.push(Some(Pose { height: 1.0, lying: false, ..stand_at }));
            }
            for k in 0..27 {
                let t = (k + 1) as f64 / 27.0;
                poses.push(Some(Pose {
                    x: stand_at.x,
                    z: stand_at.z,
                    height: lerp(1.0, standing_height(), t),
                    lying: false,
                }));
            }
            for _ in 0..30 {
                poses.push(Some(Pose { height: standing_height(), lying: false, ..stand_at }));
            }
        }
        Scenario::Walk => {
            let more = walk_frames(120, rng.gen_range(3.0..6.0));
            poses.extend(more.into_iter().map(Some));
        }
    }

    // Accelerometer track aligned on the shared clock.
    let total_ms = (poses.len() as f64 / FPS * 1000.0) as i64;
    let n_samples = (total_ms as f64 / 1000.0 * ACCEL_HZ) as usize;
    let action_ms = (action_start as f64 / FPS * 1000.0) as i64;
    let walk_start_ms = (WARMUP_FRAMES as f64 / FPS * 1000.0) as i64;
    let walk_end_ms = ((WARMUP_FRAMES + walk_n) as f64 / FPS * 1000.0) as i64;
    let mut sv = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let t = (i as f64 / ACCEL_HZ * 1000.0) as i64;
        let value = match kind {
            Scenario::Fall => {
                // Free-fall dip then impact spike inside the 600 ms drop.
                let dip = (action_ms + 150, action_ms + 400);
                let spike = (action_ms + 450, action_ms + 560);
                if t >= dip.0 && t < dip.1 {
                    0.4 + rng.gen_range(-0.05..0.05)
                } else if t >= spike.0 && t < spike.1 {
                    rng.gen_range(3.0..3.3)
                } else if t >= walk_start_ms && t < walk_end_ms {
                    walk_sv(rng)
                } else {
                    rest_sv(rng)
                }
            }
            Scenario::Sit { spike: true } => {
                let spike = (action_ms + 700, action_ms + 800);
                if t >= spike.0 && t < spike.1 {
                    2.9 + rng.gen_range(-0.05..0.05)
                } else if t >= walk_start_ms && t < walk_end_ms {
                    walk_sv(rng)
                } else {
                    rest_sv(rng)
                }
            }
            _ => {
                if t >= walk_start_ms && t < walk_end_ms {
                    walk_sv(rng)
                } else {
                    rest_sv(rng)
                }
            }
        };
        sv.push(value);
    }
    Script { poses, sv }
}

fn accel_track(sv: &[f64]) -> Vec<AccelSample> {
    sv.iter()
        .enumerate()
        .map(|(i, &v)| AccelSample {
            t_ms: (i as f64 / ACCEL_HZ * 1000.0) as i64,
            sv_total: v,
            ax: 0.0,
            ay: 0.0,
            az: -v,
        })
        .collect()
}

/// Generate a frontal-camera episode.
pub fn make_episode(kind: Scenario, seed: u64, with_accel: bool) -> Result<Episode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scene = Scene::indoor(160, 120);
    // A bench for sitting scenarios, present from the first warm-up frame.
    if matches!(kind, Scenario::Sit { .. }) {
        scene.furniture.push(Aabb::centered([0.9, 0.25, 3.1], [0.5, 0.25, 0.25]));
    }
    let script = build_script(kind, &mut rng);
    let mut frames = Vec::with_capacity(script.poses.len());
    for (i, pose) in script.poses.iter().enumerate() {
        let person = pose.map(|p| p.aabb());
        let (mut frame, _) = scene.render(person.as_ref(), &mut rng);
        frame.frame_index = i;
        frame.t_ms = (i as f64 / FPS * 1000.0) as i64;
        frames.push(frame);
    }
    if frames.is_empty() {
        return Err(Error::Invalid("empty script".into()));
    }
    let accel = if with_accel { accel_track(&script.sv) } else { Vec::new() };
    Ok(Episode {
        seq: Sequence {
            frames,
            sync: None,
            accel,
            camera: scene.camera,
            ci_mm: scene.ci_mm,
        },
        fall: kind.is_fall(),
        name: format!("{}-{seed}", kind.name()),
    })
}

/// Generate an overhead-camera episode (straight-down ceiling view).
pub fn make_overhead_episode(kind: Scenario, seed: u64, with_accel: bool) -> Result<Episode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6f76_6572);
    let scene = OverheadScene::indoor(160, 120);
    let script = build_script(kind, &mut rng);
    let mut frames = Vec::with_capacity(script.poses.len());
    for (i, pose) in script.poses.iter().enumerate() {
        // Keep the person inside the narrow overhead footprint.
        let person = pose.map(|p| {
            let mut q = p;
            q.x *= 0.5;
            q.z = (q.z - 3.2) * 0.5; // recentre under the camera
            q.aabb()
        });
        let (mut frame, _) = scene.render(person.as_ref(), &mut rng);
        frame.frame_index = i;
        frame.t_ms = (i as f64 / FPS * 1000.0) as i64;
        frames.push(frame);
    }
    let accel = if with_accel { accel_track(&script.sv) } else { Vec::new() };
    Ok(Episode {
        seq: Sequence {
            frames,
            sync: None,
            accel,
            camera: scene.camera,
            ci_mm: scene.ci_mm,
        },
        fall: kind.is_fall(),
        name: format!("overhead-{}-{seed}", kind.name()),
    })
}

/// The standard evaluation suites: `n_falls` falls and a mixed bag of
/// activities of daily living (5 slow lie-downs, 5 sits — at least two
/// energetic, 5 squats, 5 bends).
pub fn standard_suite(n_falls: usize, seed: u64, with_accel: bool) -> Result<Vec<Episode>> {
    suite_with(make_episode, n_falls, seed, with_accel)
}

/// The same scenario mix as [`standard_suite`], rendered from the overhead
/// camera.
pub fn standard_overhead_suite(
    n_falls: usize,
    seed: u64,
    with_accel: bool,
) -> Result<Vec<Episode>> {
    suite_with(make_overhead_episode, n_falls, seed, with_accel)
}

fn suite_with(
    make: fn(Scenario, u64, bool) -> Result<Episode>,
    n_falls: usize,
    seed: u64,
    with_accel: bool,
) -> Result<Vec<Episode>> {
    let mut out = Vec::new();
    for i in 0..n_falls {
        out.push(make(Scenario::Fall, seed + i as u64, with_accel)?);
    }
    let adls = [
        Scenario::LieDown,
        Scenario::LieDown,
        Scenario::LieDown,
        Scenario::LieDown,
        Scenario::LieDown,
        Scenario::Sit { spike: true },
        Scenario::Sit { spike: true },
        Scenario::Sit { spike: false },
        Scenario::Sit { spike: false },
        Scenario::Sit { spike: false },
        Scenario::Squat,
        Scenario::Squat,
        Scenario::Squat,
        Scenario::Squat,
        Scenario::Squat,
        Scenario::Bend,
        Scenario::Bend,
        Scenario::Bend,
        Scenario::Bend,
        Scenario::Bend,
    ];
    for (i, &kind) in adls.iter().enumerate() {
        out.push(make(kind, seed + 1000 + i as u64, with_accel)?);
    }
    Ok(out)
}

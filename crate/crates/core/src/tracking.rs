//! Head tracking with a sampling-importance-resampling particle filter over
//! an ellipsoid head model, plus the overhead concentric-rectangle
//! appearance descriptor.

use crate::config::Config;
use crate::dataio::{depth_to_pointcloud, CameraModel, DepthFrame, Rect};
use crate::error::{Error, Result};
use nalgebra::{Rotation3, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Depth edge map: Sobel gradient magnitude over the depth image thresholded
/// in millimetres. Pixels adjacent to no-measurement zones count as edges.
pub fn sobel_edges(frame: &DepthFrame, thold_mm: f64) -> Vec<bool> {
    let (w, h) = (frame.width as i64, frame.height as i64);
    let at = |x: i64, y: i64| -> f64 {
        let x = x.clamp(0, w - 1);
        let y = y.clamp(0, h - 1);
        frame.at(x as u32, y as u32) as f64
    };
    let mut edges = vec![false; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let gx = at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)
                - at(x - 1, y - 1)
                - 2.0 * at(x - 1, y)
                - at(x - 1, y + 1);
            let gy = at(x, y + 1) * 2.0 + at(x - 1, y + 1) + at(x + 1, y + 1)
                - 2.0 * at(x, y - 1)
                - at(x - 1, y - 1)
                - at(x + 1, y - 1);
            // The Sobel kernel sums 4 unit weights per axis.
            let mag = (gx * gx + gy * gy).sqrt() / 4.0;
            edges[(y * w + x) as usize] = mag > thold_mm;
        }
    }
    edges
}

/// Exact Euclidean distance transform (two-pass 1D lower-envelope algorithm):
/// for each pixel, the distance in pixels to the nearest `true` cell.
pub fn distance_transform(mask: &[bool], width: u32, height: u32) -> Vec<f64> {
    const INF: f64 = 1e18;
    let (w, h) = (width as usize, height as usize);
    assert_eq!(mask.len(), w * h);

    fn dt_1d(f: &[f64], d: &mut [f64]) {
        let n = f.len();
        let mut v = vec![0usize; n];
        let mut z = vec![0.0f64; n + 1];
        let mut k = 0usize;
        v[0] = 0;
        z[0] = -1e20;
        z[1] = 1e20;
        for q in 1..n {
            let mut s;
            loop {
                let p = v[k];
                s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64))
                    / (2.0 * q as f64 - 2.0 * p as f64);
                if s <= z[k] {
                    k -= 1;
                } else {
                    break;
                }
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = 1e20;
        }
        k = 0;
        for q in 0..n {
            while z[k + 1] < q as f64 {
                k += 1;
            }
            let p = v[k];
            let dq = q as f64 - p as f64;
            d[q] = dq * dq + f[p];
        }
    }

    let mut g = vec![INF; w * h];
    for (i, &m) in mask.iter().enumerate() {
        if m {
            g[i] = 0.0;
        }
    }
    // Columns.
    let mut col = vec![0.0; h];
    let mut out_col = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = g[y * w + x];
        }
        dt_1d(&col, &mut out_col);
        for y in 0..h {
            g[y * w + x] = out_col[y];
        }
    }
    // Rows.
    let mut row = vec![0.0; w];
    let mut out_row = vec![0.0; w];
    for y in 0..h {
        row.copy_from_slice(&g[y * w..(y + 1) * w]);
        dt_1d(&row, &mut out_row);
        for x in 0..w {
            g[y * w + x] = out_row[x].sqrt().min(1e9);
        }
    }
    g
}

/// Systematic resampling: returns indices drawn with one uniform offset and
/// evenly spaced positions, preserving the weight distribution with minimal
/// variance.
pub fn systematic_resample<R: Rng>(weights: &[f64], rng: &mut R) -> Result<Vec<usize>> {
    let n = weights.len();
    let total: f64 = weights.iter().sum();
    if n == 0 || total <= 0.0 || !total.is_finite() {
        return Err(Error::Degenerate("non-positive particle weight sum".into()));
    }
    let step = total / n as f64;
    let mut u = rng.gen_range(0.0..step);
    let mut out = Vec::with_capacity(n);
    let mut cum = weights[0];
    let mut i = 0usize;
    for _ in 0..n {
        while cum < u && i + 1 < n {
            i += 1;
            cum += weights[i];
        }
        out.push(i);
        u += step;
    }
    Ok(out)
}

/// Particle state: head centre in the camera frame (metres) and the two tilt
/// angles of the ellipsoid's major axis.
pub type HeadState = [f64; 5];

#[derive(Debug, Clone)]
pub struct TrackerConfig {
    pub n_particles: usize,
    pub sigma_obs: f64,
    pub motion_std: [f64; 5],
    /// Ellipsoid semi-axes, metres.
    pub head_axes: [f64; 3],
    /// Depth agreement scale, metres.
    pub d_thold: f64,
    pub edge_thold_mm: f64,
    pub seed: u64,
}

impl TrackerConfig {
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let motion = cfg.get_f64_list("track.motion_std")?;
        let axes = cfg.get_f64_list("track.head_axes_m")?;
        if motion.len() != 5 || axes.len() != 3 {
            return Err(Error::Config(
                "track.motion_std needs 5 entries, track.head_axes_m needs 3".into(),
            ));
        }
        Ok(Self {
            n_particles: cfg.get_usize("track.n_particles")?,
            sigma_obs: cfg.get_f64("track.sigma_obs")?,
            motion_std: [motion[0], motion[1], motion[2], motion[3], motion[4]],
            head_axes: [axes[0], axes[1], axes[2]],
            d_thold: cfg.get_f64("track.d_thold")?,
            edge_thold_mm: cfg.get_f64("track.edge_thold_mm")?,
            seed: cfg.get_u64("track.seed")?,
        })
    }
}

/// Unitless ellipsoid distance of a point in the head frame of a state:
/// the quadratic form minus one (negative inside, 0 on the surface).
pub fn ellipsoid_distance(axes: [f64; 3], state: &HeadState, point: &[f64; 3]) -> f64 {
    let rot = Rotation3::from_euler_angles(state[3], state[4], 0.0);
    let v = rot.inverse()
        * Vector3::new(point[0] - state[0], point[1] - state[1], point[2] - state[2]);
    (v[0] / axes[0]).powi(2) + (v[1] / axes[1]).powi(2) + (v[2] / axes[2]).powi(2) - 1.0
}

/// Membership of one point: 1 inside the ellipsoid, linearly falling to 0 at
/// distance `d_thold` outside.
pub fn ellipsoid_membership(axes: [f64; 3], d_thold: f64, state: &HeadState, point: &[f64; 3]) -> f64 {
    let d = ellipsoid_distance(axes, state, point);
    if d < 0.0 {
        1.0
    } else {
        (1.0 - d / d_thold).max(0.0)
    }
}

/// Cloud fitness: summed membership over the neighbourhood points.
pub fn ellipsoid_fitness(
    axes: [f64; 3],
    d_thold: f64,
    state: &HeadState,
    points: &[[f64; 3]],
) -> f64 {
    // Hoist the rotation out of the per-point loop.
    let rot = Rotation3::from_euler_angles(state[3], state[4], 0.0).inverse();
    let mut f1 = 0.0;
    for p in points {
        let v = rot * Vector3::new(p[0] - state[0], p[1] - state[1], p[2] - state[2]);
        let d = (v[0] / axes[0]).powi(2) + (v[1] / axes[1]).powi(2) + (v[2] / axes[2]).powi(2)
            - 1.0;
        f1 += if d < 0.0 { 1.0 } else { (1.0 - d / d_thold).max(0.0) };
    }
    f1
}

/// One filter step's outcome.
#[derive(Debug, Clone, Copy)]
pub struct TrackEstimate {
    pub state: HeadState,
    /// Best raw particle score this step.
    pub score: f64,
    /// All particles scored zero — the head was not found.
    pub lost: bool,
}

/// SIR particle filter for the head.
#[derive(Debug, Clone)]
pub struct HeadTracker {
    pub cfg: TrackerConfig,
    particles: Vec<HeadState>,
    rng: ChaCha8Rng,
}

impl HeadTracker {
    pub fn new(cfg: TrackerConfig) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Self { cfg, particles: Vec::new(), rng }
    }

    /// Initialise the particle cloud around a head hypothesis.
    pub fn init(&mut self, center: [f64; 3]) {
        let spread = Normal::new(0.0, 0.03).unwrap();
        let tilt = Normal::new(0.0, 0.1).unwrap();
        self.particles = (0..self.cfg.n_particles)
            .map(|_| {
                [
                    center[0] + spread.sample(&mut self.rng),
                    center[1] + spread.sample(&mut self.rng),
                    center[2] + spread.sample(&mut self.rng),
                    tilt.sample(&mut self.rng),
                    tilt.sample(&mut self.rng),
                ]
            })
            .collect();
    }

    pub fn is_initialized(&self) -> bool {
        !self.particles.is_empty()
    }

    /// Score one particle against the frame: 3D ellipsoid membership summed
    /// over the neighbourhood cloud (f1) times contour-to-edge agreement
    /// along the projected silhouette (f2).
    fn score(
        &self,
        p: &HeadState,
        frame: &DepthFrame,
        cam: &CameraModel,
        neighborhood: &[[f64; 3]],
        edt: &[f64],
    ) -> f64 {
        if p[2] <= 0.1 {
            return 0.0;
        }
        let f1 = ellipsoid_fitness(self.cfg.head_axes, self.cfg.d_thold, p, neighborhood);

        let lateral = self.cfg.head_axes[0].max(self.cfg.head_axes[1]);
        let r_px = lateral * cam.focal_px / p[2];
        if r_px < 1.0 {
            return 0.0;
        }
        let cx = cam.principal_x - cam.focal_px * p[0] / p[2];
        let cy = cam.principal_y - cam.focal_px * p[1] / p[2];

        // f2: the silhouette ring should coincide with depth edges; one
        // sample per contour pixel.
        let mut f2 = 0.0;
        let rim = (std::f64::consts::TAU * r_px).ceil().max(8.0) as usize;
        for k in 0..rim {
            let a = k as f64 / rim as f64 * std::f64::consts::TAU;
            let x = cx + r_px * a.cos();
            let y = cy + r_px * a.sin();
            if x < 0.0 || y < 0.0 || x >= frame.width as f64 || y >= frame.height as f64 {
                continue;
            }
            let d = edt[y as usize * frame.width as usize + x as usize];
            f2 += (5.0 - d).max(0.0);
        }
        f1 * f2
    }

    /// One predict-weight-resample cycle.
    pub fn step(&mut self, frame: &DepthFrame, cam: &CameraModel) -> Result<TrackEstimate> {
        if self.particles.is_empty() {
            return Err(Error::Invalid("tracker not initialised".into()));
        }
        // Predict: random-walk diffusion.
        let noise: Vec<Normal<f64>> = self
            .cfg
            .motion_std
            .iter()
            .map(|&s| Normal::new(0.0, s.max(1e-9)).unwrap())
            .collect();
        for p in &mut self.particles {
            for (d, n) in p.iter_mut().zip(&noise) {
                *d += n.sample(&mut self.rng);
            }
        }

        let edges = sobel_edges(frame, self.cfg.edge_thold_mm);
        let edt = distance_transform(&edges, frame.width, frame.height);

        // Shared neighbourhood cloud: points within three head radii of the
        // particle-mean centre (plus a margin covering the cloud spread).
        let cloud = depth_to_pointcloud(frame, cam);
        let center = self.mean_state(None);
        let max_axis = self.cfg.head_axes.iter().cloned().fold(0.0f64, f64::max);
        let radius = 3.0 * max_axis + 0.3;
        let r2 = radius * radius;
        let neighborhood: Vec<[f64; 3]> = cloud
            .points
            .iter()
            .filter(|p| {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                let dz = p[2] - center[2];
                dx * dx + dy * dy + dz * dz <= r2
            })
            .cloned()
            .collect();

        let scores: Vec<f64> = self
            .particles
            .iter()
            .map(|p| self.score(p, frame, cam, &neighborhood, &edt))
            .collect();
        let s_max = scores.iter().fold(0.0f64, |m, &s| m.max(s));
        if s_max <= 0.0 {
            // Track lost: keep the cloud, report failure.
            let mean = self.mean_state(None);
            return Ok(TrackEstimate { state: mean, score: 0.0, lost: true });
        }
        let two_sigma_sq = 2.0 * self.cfg.sigma_obs * self.cfg.sigma_obs;
        let weights: Vec<f64> =
            scores.iter().map(|&s| (-(s_max - s) / two_sigma_sq).exp()).collect();

        let estimate = self.mean_state(Some(&weights));
        let idx = systematic_resample(&weights, &mut self.rng)?;
        self.particles = idx.iter().map(|&i| self.particles[i]).collect();
        Ok(TrackEstimate { state: estimate, score: s_max, lost: false })
    }

    fn mean_state(&self, weights: Option<&[f64]>) -> HeadState {
        let mut mean = [0.0; 5];
        let mut total = 0.0;
        for (i, p) in self.particles.iter().enumerate() {
            let w = weights.map(|w| w[i]).unwrap_or(1.0);
            total += w;
            for d in 0..5 {
                mean[d] += w * p[d];
            }
        }
        for d in &mut mean {
            *d /= total;
        }
        mean
    }
}

/// Summed-area table over depth (millimetres); no-measurement pixels
/// contribute zero and are counted separately so means stay unbiased.
#[derive(Debug, Clone)]
pub struct IntegralImage {
    pub width: u32,
    pub height: u32,
    sum: Vec<f64>,
    count: Vec<u32>,
}

impl IntegralImage {
    pub fn new(frame: &DepthFrame) -> Self {
        let (w, h) = (frame.width as usize, frame.height as usize);
        let mut sum = vec![0.0; (w + 1) * (h + 1)];
        let mut count = vec![0u32; (w + 1) * (h + 1)];
        for y in 0..h {
            for x in 0..w {
                let v = frame.at(x as u32, y as u32);
                let i = (y + 1) * (w + 1) + (x + 1);
                sum[i] = v as f64 + sum[i - 1] + sum[i - w - 1] - sum[i - w - 2];
                count[i] = (v != 0) as u32 + count[i - 1] + count[i - w - 1] - count[i - w - 2];
            }
        }
        Self { width: frame.width, height: frame.height, sum, count }
    }

    /// Mean depth of measured pixels in the rectangle (clipped to the image);
    /// zero when nothing is measured.
    pub fn rect_mean(&self, rect: &Rect) -> f64 {
        let w = self.width as usize + 1;
        let x0 = rect.x.min(self.width) as usize;
        let y0 = rect.y.min(self.height) as usize;
        let x1 = (rect.x + rect.w).min(self.width) as usize;
        let y1 = (rect.y + rect.h).min(self.height) as usize;
        let s = self.sum[y1 * w + x1] + self.sum[y0 * w + x0]
            - self.sum[y0 * w + x1]
            - self.sum[y1 * w + x0];
        let c = self.count[y1 * w + x1] + self.count[y0 * w + x0]
            - self.count[y0 * w + x1]
            - self.count[y1 * w + x0];
        if c == 0 {
            0.0
        } else {
            s / c as f64
        }
    }
}

/// Appearance descriptor around a point for the overhead view: mean depths of
/// concentric rectangle rings, computed in O(rings) from the integral image.
pub fn concentric_descriptor(
    ii: &IntegralImage,
    center: (u32, u32),
    rings: usize,
    ring_step: u32,
) -> Vec<f64> {
    assert!(rings > 0 && ring_step > 0);
    let mut out = Vec::with_capacity(rings);
    let mut prev_sum = 0.0;
    let mut prev_n = 0.0;
    for r in 1..=rings {
        let half = r as u32 * ring_step;
        let rect = Rect {
            x: center.0.saturating_sub(half),
            y: center.1.saturating_sub(half),
            w: 2 * half + 1,
            h: 2 * half + 1,
        };
        // Ring = this rectangle minus the previous one.
        let w = ii.width as usize + 1;
        let x0 = rect.x.min(ii.width) as usize;
        let y0 = rect.y.min(ii.height) as usize;
        let x1 = (rect.x + rect.w).min(ii.width) as usize;
        let y1 = (rect.y + rect.h).min(ii.height) as usize;
        let s = ii.sum[y1 * w + x1] + ii.sum[y0 * w + x0]
            - ii.sum[y0 * w + x1]
            - ii.sum[y1 * w + x0];
        let c = (ii.count[y1 * w + x1] + ii.count[y0 * w + x0]
            - ii.count[y0 * w + x1]
            - ii.count[y1 * w + x0]) as f64;
        let (ring_s, ring_n) = (s - prev_sum, c - prev_n);
        out.push(if ring_n > 0.0 { ring_s / ring_n } else { 0.0 });
        prev_sum = s;
        prev_n = c;
    }
    out
}

/// L1 distance between two descriptors.
pub fn descriptor_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::render_ellipsoid;
    use rand::Rng;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn camera() -> CameraModel {
        CameraModel {
            focal_px: 290.0,
            baseline_m: 0.075,
            principal_x: 79.5,
            principal_y: 59.5,
            distortion_dx: 0.0,
            distortion_dy: 0.0,
        }
    }

    #[test]
    fn sobel_finds_step_edges_only() {
        let mut frame = DepthFrame::new(16, 16, vec![2000; 256]);
        for y in 0..16 {
            for x in 8..16 {
                frame.set(x, y, 2500);
            }
        }
        let edges = sobel_edges(&frame, 80.0);
        // The step at x = 7/8 is an edge; far regions are flat.
        assert!(edges[5 * 16 + 7] || edges[5 * 16 + 8]);
        assert!(!edges[5 * 16 + 2]);
        assert!(!edges[5 * 16 + 13]);
    }

    #[test]
    fn edt_matches_brute_force() {
        let (w, h) = (13u32, 9u32);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mask: Vec<bool> =
                (0..w * h).map(|_| rng.gen_bool(0.15)).collect();
            if !mask.iter().any(|&m| m) {
                continue;
            }
            let edt = distance_transform(&mask, w, h);
            for y in 0..h {
                for x in 0..w {
                    let mut best = f64::INFINITY;
                    for yy in 0..h {
                        for xx in 0..w {
                            if mask[(yy * w + xx) as usize] {
                                let dx = x as f64 - xx as f64;
                                let dy = y as f64 - yy as f64;
                                best = best.min((dx * dx + dy * dy).sqrt());
                            }
                        }
                    }
                    assert_relative_eq!(
                        edt[(y * w + x) as usize],
                        best,
                        epsilon = 1e-9
                    );
                }
            }
        }
    }

    #[test]
    fn edt_zero_on_edges() {
        let mask = vec![true; 25];
        assert!(distance_transform(&mask, 5, 5).iter().all(|&d| d == 0.0));
    }

    #[test]
    fn systematic_resample_tracks_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // One dominant weight: almost every draw picks it.
        let mut weights = vec![0.001; 100];
        weights[37] = 10.0;
        let idx = systematic_resample(&weights, &mut rng).unwrap();
        let hits = idx.iter().filter(|&&i| i == 37).count();
        assert!(hits > 95, "dominant particle drawn {hits}/100");
        // Uniform weights: every particle drawn about once.
        let idx = systematic_resample(&vec![1.0; 100], &mut rng).unwrap();
        let mut counts = vec![0usize; 100];
        for &i in &idx {
            counts[i] += 1;
        }
        assert!(counts.iter().all(|&c| c <= 2));
        assert!(counts.iter().filter(|&&c| c == 1).count() >= 98);
    }

    #[test]
    fn resample_rejects_degenerate_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(systematic_resample(&[], &mut rng).is_err());
        assert!(systematic_resample(&[0.0, 0.0], &mut rng).is_err());
    }

    #[test]
    fn membership_anchors() {
        let axes = [0.09, 0.09, 0.12];
        let s: HeadState = [0.3, -0.2, 2.0, 0.0, 0.0];
        // Centre and interior points are full members.
        assert_eq!(ellipsoid_membership(axes, 1.0, &s, &[0.3, -0.2, 2.0]), 1.0);
        assert_eq!(ellipsoid_membership(axes, 1.0, &s, &[0.3 + 0.05, -0.2, 2.0]), 1.0);
        // On the surface the unitless distance is 0, so membership is still 1.
        let surf = [0.3, -0.2 + 0.09, 2.0];
        assert_relative_eq!(ellipsoid_distance(axes, &s, &surf), 0.0, epsilon = 1e-12);
        assert_relative_eq!(ellipsoid_membership(axes, 1.0, &s, &surf), 1.0, epsilon = 1e-12);
        // At distance d_thold membership reaches 0 and stays there beyond.
        let far = [0.3, -0.2, 2.0 + 0.12 * 2.0f64.sqrt()]; // d = 2 - 1 = 1
        assert_relative_eq!(ellipsoid_distance(axes, &s, &far), 1.0, epsilon = 1e-12);
        assert_relative_eq!(ellipsoid_membership(axes, 1.0, &s, &far), 0.0, epsilon = 1e-12);
        assert_eq!(ellipsoid_membership(axes, 1.0, &s, &[5.0, 5.0, 5.0]), 0.0);
        // Halfway out: d = 0.5 -> membership 0.5.
        let half = [0.3 + 0.09 * 1.5f64.sqrt(), -0.2, 2.0];
        assert_relative_eq!(ellipsoid_membership(axes, 1.0, &s, &half), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn fitness_is_rigid_motion_invariant() {
        let axes = [0.09, 0.09, 0.12];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pts: Vec<[f64; 3]> = (0..200)
            .map(|_| {
                [
                    rng.gen_range(-0.2..0.2),
                    rng.gen_range(-0.2..0.2),
                    2.0 + rng.gen_range(-0.2..0.2),
                ]
            })
            .collect();
        let s: HeadState = [0.0, 0.0, 2.0, 0.0, 0.0];
        let base = ellipsoid_fitness(axes, 1.0, &s, &pts);
        // Translate the state and every point by the same offset.
        let off = [0.37, -0.81, 1.44];
        let s2: HeadState = [off[0], off[1], 2.0 + off[2], 0.0, 0.0];
        let moved: Vec<[f64; 3]> =
            pts.iter().map(|p| [p[0] + off[0], p[1] + off[1], p[2] + off[2]]).collect();
        assert_relative_eq!(ellipsoid_fitness(axes, 1.0, &s2, &moved), base, epsilon = 1e-9);
        assert!(base > 0.0);
    }

    fn tracker() -> HeadTracker {
        HeadTracker::new(TrackerConfig::from_config(&Config::default()).unwrap())
    }

    #[test]
    fn tracks_moving_head_within_tolerance() {
        let cam = camera();
        let mut tk = tracker();
        let axes = tk.cfg.head_axes;
        let start = [0.15, 0.1, 2.0];
        tk.init(start);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut sq_err = 0.0;
        let n = 40;
        for k in 0..n {
            let t = k as f64 / 30.0;
            let truth = [start[0] - 0.25 * t, start[1] - 0.1 * t, start[2] + 0.3 * t];
            let frame = render_ellipsoid(160, 120, &cam, truth, axes, 3.2, 3.0, &mut rng);
            let est = tk.step(&frame, &cam).unwrap();
            assert!(!est.lost, "lost at frame {k}");
            let e = [
                est.state[0] - truth[0],
                est.state[1] - truth[1],
                est.state[2] - truth[2],
            ];
            sq_err += e[0] * e[0] + e[1] * e[1] + e[2] * e[2];
        }
        let rmse = (sq_err / n as f64).sqrt();
        assert!(rmse < 0.10, "tracking RMSE {rmse}");
    }

    #[test]
    fn reports_lost_when_head_vanishes() {
        let cam = camera();
        let mut tk = tracker();
        tk.init([0.0, 0.0, 2.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        // A frame with nothing in it: flat far background.
        let frame = render_ellipsoid(
            160,
            120,
            &cam,
            [10.0, 10.0, 50.0],
            [0.09, 0.12, 0.09],
            3.2,
            0.0,
            &mut rng,
        );
        let est = tk.step(&frame, &cam).unwrap();
        assert!(est.lost);
    }

    #[test]
    fn step_requires_init() {
        let cam = camera();
        let mut tk = tracker();
        let frame = DepthFrame::new(16, 16, vec![1000; 256]);
        assert!(tk.step(&frame, &cam).is_err());
    }

    #[test]
    fn integral_image_means() {
        let mut frame = DepthFrame::new(8, 8, vec![100; 64]);
        frame.set(0, 0, 0); // unmeasured pixel is excluded from the mean
        frame.set(1, 1, 500);
        let ii = IntegralImage::new(&frame);
        let full = Rect { x: 0, y: 0, w: 8, h: 8 };
        let expected = (62.0 * 100.0 + 500.0) / 63.0;
        assert_relative_eq!(ii.rect_mean(&full), expected, epsilon = 1e-9);
        let corner = Rect { x: 0, y: 0, w: 1, h: 1 };
        assert_eq!(ii.rect_mean(&corner), 0.0);
    }

    #[test]
    fn descriptor_separates_depth_profiles() {
        // A raised plateau in the middle versus a flat field.
        let mut bump = DepthFrame::new(32, 32, vec![2600; 1024]);
        for y in 12..20 {
            for x in 12..20 {
                bump.set(x, y, 1500);
            }
        }
        let flat = DepthFrame::new(32, 32, vec![2600; 1024]);
        let d_bump = concentric_descriptor(&IntegralImage::new(&bump), (15, 15), 4, 3);
        let d_flat = concentric_descriptor(&IntegralImage::new(&flat), (15, 15), 4, 3);
        assert!(descriptor_distance(&d_bump, &d_flat) > 300.0);
        assert_relative_eq!(descriptor_distance(&d_flat, &d_flat), 0.0);
        // Same profile at another location matches itself.
        let d_shift = concentric_descriptor(&IntegralImage::new(&flat), (24, 24), 4, 3);
        assert!(descriptor_distance(&d_flat, &d_shift) < 1e-9);
    }

    proptest! {
        #[test]
        fn descriptor_is_translation_invariant_on_constant_fields(
            v in 500u16..4000,
            cx in 8u32..24, cy in 8u32..24,
        ) {
            let frame = DepthFrame::new(32, 32, vec![v; 1024]);
            let ii = IntegralImage::new(&frame);
            let d = concentric_descriptor(&ii, (cx, cy), 3, 2);
            for m in &d {
                prop_assert!((m - v as f64).abs() < 1e-9);
            }
        }

        #[test]
        fn resample_preserves_count(n in 1usize..50, seed in 0u64..100) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let weights: Vec<f64> = (0..n).map(|i| (i + 1) as f64).collect();
            let idx = systematic_resample(&weights, &mut rng).unwrap();
            prop_assert_eq!(idx.len(), n);
            prop_assert!(idx.iter().all(|&i| i < n));
        }
    }
}

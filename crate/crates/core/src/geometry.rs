//! Floor-plane detection: v-disparity accumulation, weighted Hough line
//! search, floor pixel masking, and RANSAC plane refinement.
//!
//! Pipeline order: disparity grid -> v-disparity -> Hough floor line ->
//! floor mask seeds -> RANSAC refinement on the masked 3D points. Starting
//! RANSAC from the Hough hypothesis keeps clutter from dominating the fit.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;

use crate::config::Config;
use crate::dataio::{
    depth_to_disparity, depth_to_pointcloud, CameraModel, DepthFrame, DisparityGrid, PointCloud,
};
use crate::error::{Error, Result};

/// Row-wise disparity histogram: `cell(row, bin)` accumulates the pixels of
/// that image row whose quantized disparity falls in `bin`.
#[derive(Debug, Clone)]
pub struct VDisparityImage {
    pub rows: u32,
    pub bins: u32,
    pub cells: Vec<f64>,
}

impl VDisparityImage {
    #[inline]
    pub fn at(&self, row: u32, bin: u32) -> f64 {
        self.cells[(row * self.bins + bin) as usize]
    }
}

/// Hough line in normal form: `x*cos(theta) + y*sin(theta) = rho`, with x the
/// disparity axis and y the image row counted from the *bottom* of the image
/// (`rows - 1 - image_row`). The bottom-up convention keeps floor lines —
/// whose disparity grows towards the bottom of the image — at small positive
/// theta with non-negative rho.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub rho: f64,
    pub theta: f64,
}

/// Plane `a*x + b*y + c*z + d = 0` with unit normal; signed distance is
/// positive on the side where most fitted points lie (above the floor).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub inlier_ratio: f64,
}

/// Build the v-disparity image; disparities quantize by flooring, NaN
/// (unmeasured) and out-of-range values are skipped.
pub fn v_disparity(disp: &DisparityGrid, bins: u32) -> VDisparityImage {
    assert!(bins >= 2, "need at least 2 disparity bins");
    let mut vd = VDisparityImage {
        rows: disp.height,
        bins,
        cells: vec![0.0; (disp.height * bins) as usize],
    };
    for y in 0..disp.height {
        for x in 0..disp.width {
            let d = disp.at(x, y);
            if !d.is_finite() || d < 0.0 {
                continue;
            }
            let bin = d.floor() as i64;
            if bin >= 0 && (bin as u32) < bins {
                vd.cells[(y * bins + bin as u32) as usize] += 1.0;
            }
        }
    }
    vd
}

/// Weighted Hough line search over the v-disparity image: every cell votes
/// with its accumulated count (not 1), so dense disparity evidence dominates.
/// Theta is restricted to `[theta_min_deg, theta_max_deg)`; fails when the
/// best accumulator score is below `min_score`.
pub fn hough_floor_line(
    vdisp: &VDisparityImage,
    theta_min_deg: f64,
    theta_max_deg: f64,
    theta_step_deg: f64,
    rho_step: f64,
    min_score: f64,
) -> Result<Line> {
    if vdisp.cells.iter().all(|&c| c == 0.0) {
        return Err(Error::NotFound("empty v-disparity accumulator".into()));
    }
    let n_theta = ((theta_max_deg - theta_min_deg) / theta_step_deg).ceil() as usize;
    let max_rho = vdisp.bins as f64 + vdisp.rows as f64;
    let n_rho = (max_rho / rho_step).ceil() as usize + 1;

    let thetas: Vec<(f64, f64, f64)> = (0..n_theta)
        .map(|ti| {
            let theta = (theta_min_deg + ti as f64 * theta_step_deg).to_radians();
            (theta, theta.cos(), theta.sin())
        })
        .collect();

    let mut acc = vec![0.0f64; n_theta * n_rho];
    for row in 0..vdisp.rows {
        for bin in 0..vdisp.bins {
            let weight = vdisp.at(row, bin);
            if weight == 0.0 {
                continue;
            }
            let (x, y) = (bin as f64, (vdisp.rows - 1 - row) as f64);
            for (ti, &(_, cos_t, sin_t)) in thetas.iter().enumerate() {
                let rho = x * cos_t + y * sin_t;
                let ri = (rho / rho_step).round();
                if ri >= 0.0 && (ri as usize) < n_rho {
                    acc[ti * n_rho + ri as usize] += weight;
                }
            }
        }
    }

    let (mut best, mut best_score) = (0usize, f64::NEG_INFINITY);
    for (i, &score) in acc.iter().enumerate() {
        if score > best_score {
            best = i;
            best_score = score;
        }
    }
    if best_score < min_score {
        return Err(Error::NotFound(format!(
            "best Hough score {best_score} below minimum {min_score}"
        )));
    }
    Ok(Line {
        rho: (best % n_rho) as f64 * rho_step,
        theta: thetas[best / n_rho].0,
    })
}

/// Disparity predicted by the line at row `y` counted from the bottom of the
/// image (`rows - 1 - image_row`, matching the line's coordinate system).
pub fn line_disparity_at_row(line: &Line, y: f64) -> Result<f64> {
    // Solving x*cos + y*sin = rho for x degenerates when the line is
    // horizontal in (disparity, row) space.
    if line.theta.cos().abs() < 1e-6 {
        return Err(Error::Degenerate("floor line parallel to the row axis".into()));
    }
    Ok((line.rho - y * line.theta.sin()) / line.theta.cos())
}

/// Mark the pixels whose disparity falls inside the open band
/// `(d_y - d_t, d_y + d_t)` around the line's per-row disparity.
pub fn floor_mask(disp: &DisparityGrid, line: &Line, d_t: f64) -> Result<Vec<bool>> {
    assert!(d_t > 0.0);
    let mut mask = vec![false; disp.values.len()];
    for y in 0..disp.height {
        let d_y = line_disparity_at_row(line, (disp.height - 1 - y) as f64)?;
        for x in 0..disp.width {
            let d = disp.at(x, y);
            if d.is_finite() && (d - d_y).abs() < d_t {
                mask[(y * disp.width + x) as usize] = true;
            }
        }
    }
    Ok(mask)
}

/// Number of RANSAC draws needed so a fully inlier sample is picked with
/// probability at least `1 - eps`, given per-draw success probability `q`.
pub fn ransac_iterations(eps: f64, q: f64, cap: usize) -> usize {
    if q >= 1.0 {
        return 1;
    }
    if q <= 0.0 {
        return cap;
    }
    let h = (eps.ln() / (1.0 - q).ln()).ceil();
    if !h.is_finite() || h >= cap as f64 {
        cap
    } else {
        (h as usize).max(1)
    }
}

fn plane_from_three(p0: &[f64; 3], p1: &[f64; 3], p2: &[f64; 3]) -> Option<(Vector3<f64>, f64)> {
    let a = Vector3::new(p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]);
    let b = Vector3::new(p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]);
    let n = a.cross(&b);
    let norm = n.norm();
    if norm < 1e-12 {
        return None; // collinear sample
    }
    let n = n / norm;
    let d = -(n[0] * p0[0] + n[1] * p0[1] + n[2] * p0[2]);
    Some((n, d))
}

fn least_squares_plane(points: &[[f64; 3]], inliers: &[usize]) -> Option<(Vector3<f64>, f64)> {
    let n = inliers.len() as f64;
    let mut c = Vector3::zeros();
    for &i in inliers {
        c += Vector3::from(points[i]);
    }
    c /= n;
    let mut cov = Matrix3::zeros();
    for &i in inliers {
        let d = Vector3::from(points[i]) - c;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let mut min_i = 0;
    for k in 1..3 {
        if eig.eigenvalues[k] < eig.eigenvalues[min_i] {
            min_i = k;
        }
    }
    let normal = eig.eigenvectors.column(min_i).into_owned();
    let norm = normal.norm();
    if norm < 1e-12 {
        return None;
    }
    let normal = normal / norm;
    Some((normal, -normal.dot(&c)))
}

/// Signed point-to-plane distance in metres (positive above the floor).
pub fn plane_distance(plane: &Plane, p: &[f64; 3]) -> f64 {
    plane.a * p[0] + plane.b * p[1] + plane.c * p[2] + plane.d
}

/// RANSAC plane fit: repeatedly sample 3 points, count consensus within
/// `delta`, stop early once the consensus fraction reaches `tau`; the best
/// consensus set is then refit by least squares and oriented so that most
/// points lie at non-negative signed distance.
pub fn ransac_plane<R: Rng>(
    points: &[[f64; 3]],
    delta: f64,
    tau: f64,
    max_iter: usize,
    rng: &mut R,
) -> Result<Plane> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "RANSAC needs at least 3 points, got {}",
            points.len()
        )));
    }
    assert!(delta > 0.0 && tau > 0.0 && tau <= 1.0);

    let mut best: Option<(Vector3<f64>, f64, usize)> = None;
    for _ in 0..max_iter {
        let i = rng.gen_range(0..points.len());
        let j = rng.gen_range(0..points.len());
        let k = rng.gen_range(0..points.len());
        if i == j || j == k || i == k {
            continue;
        }
        let Some((n, d)) = plane_from_three(&points[i], &points[j], &points[k]) else {
            continue;
        };
        let consensus = points
            .iter()
            .filter(|p| (n[0] * p[0] + n[1] * p[1] + n[2] * p[2] + d).abs() <= delta)
            .count();
        if best.as_ref().map(|&(_, _, c)| consensus > c).unwrap_or(true) {
            best = Some((n, d, consensus));
        }
        if consensus as f64 / points.len() as f64 >= tau {
            break;
        }
    }

    let (n, d, _) = best.ok_or_else(|| {
        Error::FitFailure("no non-degenerate RANSAC sample found".into())
    })?;

    let inliers: Vec<usize> = points
        .iter()
        .enumerate()
        .filter(|(_, p)| (n[0] * p[0] + n[1] * p[1] + n[2] * p[2] + d).abs() <= delta)
        .map(|(i, _)| i)
        .collect();
    let (n, d) = least_squares_plane(points, &inliers)
        .or(Some((n, d)))
        .unwrap();

    let mut plane = Plane { a: n[0], b: n[1], c: n[2], d, inlier_ratio: 0.0 };
    let above = points.iter().filter(|p| plane_distance(&plane, p) >= 0.0).count();
    if above * 2 < points.len() {
        plane = Plane { a: -plane.a, b: -plane.b, c: -plane.c, d: -plane.d, inlier_ratio: 0.0 };
    }
    plane.inlier_ratio = points
        .iter()
        .filter(|p| plane_distance(&plane, p).abs() <= delta)
        .count() as f64
        / points.len() as f64;
    Ok(plane)
}

/// Full floor estimation on one frame: v-disparity line -> floor mask seeds
/// -> RANSAC refinement. Falls back to the full Hough theta range and then to
/// RANSAC over the whole cloud when the line search fails.
pub fn estimate_floor<R: Rng>(
    frame: &DepthFrame,
    cam: &CameraModel,
    cfg: &Config,
    rng: &mut R,
) -> Result<Plane> {
    let disp = depth_to_disparity(frame, cam);
    let bins = cfg.get_usize("floor.bins")? as u32;
    let theta_max = cfg.get_f64("floor.theta_max_deg")?;
    let theta_step = cfg.get_f64("floor.theta_step_deg")?;
    let rho_step = cfg.get_f64("floor.rho_step")?;
    let min_score = cfg.get_f64("floor.min_score")?;
    let delta = cfg.get_f64("floor.ransac_delta_m")?;
    let tau = cfg.get_f64("floor.ransac_tau")?;
    let max_iter = cfg.get_usize("floor.ransac_max_iter")?;

    let vd = v_disparity(&disp, bins);
    let line = hough_floor_line(&vd, 0.0, theta_max, theta_step, rho_step, min_score)
        .or_else(|_| hough_floor_line(&vd, 0.0, 180.0, theta_step, rho_step, min_score));

    let cloud = depth_to_pointcloud(frame, cam);
    let seeds: Vec<[f64; 3]> = match &line {
        Ok(line) => {
            let mask = floor_mask(&disp, line, cfg.get_f64("floor.d_t")?)?;
            cloud
                .points
                .iter()
                .zip(&cloud.pixels)
                .filter(|(_, &(x, y))| mask[(y * frame.width + x) as usize])
                .map(|(p, _)| *p)
                .collect()
        }
        Err(_) => cloud.points.clone(),
    };
    let seeds = subsample(&seeds, 20000);
    ransac_plane(&seeds, delta, tau, max_iter, rng)
}

/// Deterministic stride subsampling to bound RANSAC cost.
pub fn subsample(points: &[[f64; 3]], max: usize) -> Vec<[f64; 3]> {
    if points.len() <= max {
        return points.to_vec();
    }
    let stride = points.len() as f64 / max as f64;
    (0..max)
        .map(|i| points[(i as f64 * stride) as usize])
        .collect()
}

/// Floor distances for a whole cloud, metres.
pub fn cloud_plane_distances(plane: &Plane, cloud: &PointCloud) -> Vec<f64> {
    cloud.points.iter().map(|p| plane_distance(plane, p)).collect()
}

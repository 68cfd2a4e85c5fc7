//! Static, overhead and dynamic feature descriptors feeding the decision
//! back-ends.

use crate::dataio::{AccelSample, PointCloud};
use crate::error::{Error, Result};
use crate::geometry::{plane_distance, Plane};
use crate::segmentation::Blob;

/// Pose descriptors of a segmented person in one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticFeatures {
    /// Bounding-box height / width on the depth image.
    pub hw: f64,
    /// Person height over calibrated standing height.
    pub h_hmax: f64,
    /// Floor distance of the 3D centroid, millimetres.
    pub d: f64,
    /// Max of the point-spread standard deviations along the camera X and Z
    /// axes, millimetres.
    pub max_sigma: f64,
    /// Fraction of person points within 0.40 m of the floor.
    pub p40: f64,
    /// Person height above the floor, metres (max signed plane distance).
    pub height_m: f64,
}

/// Descriptors for the ceiling-mounted camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverheadFeatures {
    pub h_hmax: f64,
    /// Blob area normalized to the reference depth (scale-corrected pixels).
    pub area: f64,
    /// Major over minor axis length of the blob mask, >= 1.
    pub lw: f64,
    pub height_m: f64,
}

/// Time-ratio descriptors over a trailing window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicFeatures {
    /// H(t) / H(t - dt).
    pub h_ratio: f64,
    /// D(t) / D(t - dt).
    pub d_ratio: f64,
    /// Peak SVtotal (g) in [t - dt, t]; 1.0 (rest) when no accelerometer.
    pub sv_total: f64,
}

/// Static pose features from the person blob and its 3D points.
pub fn extract_static(
    blob: &Blob,
    cloud: &PointCloud,
    floor: &Plane,
    h_max: f64,
) -> Result<StaticFeatures> {
    if cloud.is_empty() {
        return Err(Error::Invalid("empty person point cloud".into()));
    }
    assert!(h_max > 0.0);
    let hw = blob.bbox.h as f64 / blob.bbox.w as f64;

    let mut height = f64::NEG_INFINITY;
    let mut near_floor = 0usize;
    for p in &cloud.points {
        let dist = plane_distance(floor, p);
        height = height.max(dist);
        if (0.0..=0.40).contains(&dist) {
            near_floor += 1;
        }
    }
    let centroid = cloud.centroid().unwrap();
    let d_mm = plane_distance(floor, &centroid) * 1000.0;

    let n = cloud.points.len() as f64;
    let (mut var_x, mut var_z) = (0.0, 0.0);
    for p in &cloud.points {
        var_x += (p[0] - centroid[0]).powi(2);
        var_z += (p[2] - centroid[2]).powi(2);
    }
    let max_sigma = (var_x / n).sqrt().max((var_z / n).sqrt()) * 1000.0;

    Ok(StaticFeatures {
        hw,
        h_hmax: height / h_max,
        d: d_mm,
        max_sigma,
        p40: near_floor as f64 / n,
        height_m: height,
    })
}

/// Vertical-to-horizontal aspect of a point cloud measured against the floor
/// plane: peak height above the plane divided by the larger in-plane extent.
/// The image-box aspect used by [`extract_static`] assumes a roughly
/// horizontal viewing axis; under a straight-down camera the silhouette box
/// measures the body footprint instead of its posture, so the overhead
/// pipeline substitutes this world-space ratio.
pub fn world_aspect(cloud: &PointCloud, floor: &Plane) -> f64 {
    let n = [floor.a, floor.b, floor.c];
    // In-plane orthonormal basis: cross the normal with whichever axis is
    // least aligned with it.
    let u = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let mut e1 = [
        n[1] * u[2] - n[2] * u[1],
        n[2] * u[0] - n[0] * u[2],
        n[0] * u[1] - n[1] * u[0],
    ];
    let len = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1 = [e1[0] / len, e1[1] / len, e1[2] / len];
    let e2 = [
        n[1] * e1[2] - n[2] * e1[1],
        n[2] * e1[0] - n[0] * e1[2],
        n[0] * e1[1] - n[1] * e1[0],
    ];

    let mut height = f64::NEG_INFINITY;
    let (mut lo1, mut hi1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut lo2, mut hi2) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &cloud.points {
        height = height.max(plane_distance(floor, p));
        let s1 = p[0] * e1[0] + p[1] * e1[1] + p[2] * e1[2];
        let s2 = p[0] * e2[0] + p[1] * e2[1] + p[2] * e2[2];
        lo1 = lo1.min(s1);
        hi1 = hi1.max(s1);
        lo2 = lo2.min(s2);
        hi2 = hi2.max(s2);
    }
    let extent = (hi1 - lo1).max(hi2 - lo2).max(1e-6);
    height.max(0.0) / extent
}

/// Major/minor axis lengths of a binary mask from its second-order image
/// moments. Degenerate masks (single pixel, or perfectly thin after the
/// discrete correction) return zeros.
pub fn axis_lengths(pixels: &[(u32, u32)]) -> (f64, f64) {
    let m00 = pixels.len() as f64;
    if pixels.len() < 2 {
        return (0.0, 0.0);
    }
    let (mut m10, mut m01, mut m11, mut m20, mut m02) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y) in pixels {
        let (x, y) = (x as f64, y as f64);
        m10 += x;
        m01 += y;
        m11 += x * y;
        m20 += x * x;
        m02 += y * y;
    }
    let xc = m10 / m00;
    let yc = m01 / m00;
    let a = m20 / m00 - xc * xc;
    let b = 2.0 * (m11 / m00 - xc * yc);
    let c = m02 / m00 - yc * yc;
    let root = (b * b + (a - c) * (a - c)).sqrt();
    let l = 0.707 * ((a + c) + root).max(0.0).sqrt();
    let w = 0.707 * ((a + c) - root).max(0.0).sqrt();
    (l, w)
}

/// Overhead-camera descriptors. Area scales with the squared mean depth so
/// that the same physical object covers the same normalized area at any
/// distance from the ceiling.
pub fn extract_overhead(
    blob: &Blob,
    cloud: &PointCloud,
    floor: &Plane,
    h_max: f64,
    z_ref_mm: f64,
) -> Result<OverheadFeatures> {
    if cloud.is_empty() {
        return Err(Error::Invalid("empty person point cloud".into()));
    }
    assert!(h_max > 0.0 && z_ref_mm > 0.0);
    let mut height = f64::NEG_INFINITY;
    for p in &cloud.points {
        height = height.max(plane_distance(floor, p));
    }
    let (l, w) = axis_lengths(&blob.pixels);
    let lw = if w > 1e-9 { l / w } else { 1.0 };
    Ok(OverheadFeatures {
        h_hmax: height / h_max,
        area: blob.area as f64 * (blob.mean_depth / z_ref_mm).powi(2),
        lw,
        height_m: height,
    })
}

/// Nearest sample in a `(t_ms, height, distance)` history.
fn nearest(history: &[(i64, f64, f64)], t: i64) -> (i64, f64, f64) {
    *history
        .iter()
        .min_by_key(|(ht, _, _)| (ht - t).abs())
        .expect("history checked non-empty")
}

/// Time-ratio features at time `t` over a `delta_t` window. The history must
/// reach back to `t - delta_t` (one frame period of slack is allowed);
/// callers skip the dynamic path until it is warm.
pub fn extract_dynamic(
    history: &[(i64, f64, f64)],
    accel: &[AccelSample],
    t: i64,
    delta_t: i64,
) -> Result<DynamicFeatures> {
    const SLACK_MS: i64 = 40;
    let t_past = t - delta_t;
    if history.is_empty() || history[0].0 > t_past + SLACK_MS {
        return Err(Error::InsufficientData(format!(
            "feature history does not reach back to t-{delta_t} ms"
        )));
    }
    let (_, h_now, d_now) = nearest(history, t);
    let (_, h_past, d_past) = nearest(history, t_past);
    if h_past <= 0.0 || d_past <= 0.0 {
        return Err(Error::Degenerate("non-positive height/distance in history".into()));
    }
    let sv = accel
        .iter()
        .filter(|s| s.t_ms >= t_past && s.t_ms <= t)
        .map(|s| s.sv_total)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(DynamicFeatures {
        h_ratio: h_now / h_past,
        d_ratio: d_now / d_past,
        sv_total: if sv.is_finite() { sv } else { 1.0 },
    })
}

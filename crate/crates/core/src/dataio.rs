//! Decoding of recorded depth/accelerometer sequences, depth-map
//! preprocessing, and projection to 3D point clouds.
//!
//! On-disk layout of a sequence directory:
//! `<seq>/depth/%05d.png` (16-bit grayscale PNG depth maps),
//! `<seq>/sync.csv` (`frame_index,t_ms,sv_total`, optional),
//! `<seq>/accel.csv` (`t_ms,sv_total,ax,ay,az`, optional),
//! `<seq>/camera.toml` (key/value camera overrides: f, b, cx, cy, ci, optional).

use std::collections::BTreeMap;
use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, ImageFormat};

use crate::config::Config;
use crate::error::{Error, Result};

/// A rectangular grid of depth values in millimetres. 0 encodes "no
/// measurement" (nmd) and is preserved through every stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthFrame {
    pub width: u32,
    pub height: u32,
    pub depth: Vec<u16>,
    /// Milliseconds since sequence start.
    pub t_ms: i64,
    pub frame_index: usize,
}

impl DepthFrame {
    pub fn new(width: u32, height: u32, depth: Vec<u16>) -> Self {
        assert_eq!(depth.len(), (width * height) as usize);
        DepthFrame { width, height, depth, t_ms: 0, frame_index: 0 }
    }

    #[inline]
    pub fn at(&self, x: u32, y: u32) -> u16 {
        self.depth[(y * self.width + x) as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: u16) {
        self.depth[(y * self.width + x) as usize] = value;
    }

    pub fn nmd_count(&self) -> usize {
        self.depth.iter().filter(|&&d| d == 0).count()
    }
}

/// Axis-aligned rectangle in image coordinates (half-open in neither axis:
/// `x..x+w`, `y..y+h` are the covered pixel ranges).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }

    /// Overlap area with another rectangle, in pixels.
    pub fn overlap(&self, other: &Rect) -> u64 {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = (self.x + self.w).min(other.x + other.w);
        let y1 = (self.y + self.h).min(other.y + other.h);
        if x1 > x0 && y1 > y0 {
            (x1 - x0) as u64 * (y1 - y0) as u64
        } else {
            0
        }
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    /// Grow by `margin` pixels on every side, clamped to `width`/`height`.
    pub fn dilate(&self, margin: u32, width: u32, height: u32) -> Rect {
        let x = self.x.saturating_sub(margin);
        let y = self.y.saturating_sub(margin);
        let w = (self.x + self.w + margin).min(width) - x;
        let h = (self.y + self.h + margin).min(height) - y;
        Rect { x, y, w, h }
    }
}

/// Pinhole camera intrinsics of the depth sensor.
///
/// Back-projection convention (kept verbatim from the sensor's calibration
/// model, note the unusual sign — X is negative to the *right* of center):
/// `X = -(Z/f)(x - cx + dx)`, `Y = -(Z/f)(y - cy + dy)`, Z in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraModel {
    pub focal_px: f64,
    pub baseline_m: f64,
    pub principal_x: f64,
    pub principal_y: f64,
    pub distortion_dx: f64,
    pub distortion_dy: f64,
}

impl CameraModel {
    /// Resolve the camera model from config for a given image size
    /// (`camera.cx`/`camera.cy` may be "auto" = image center).
    pub fn from_config(cfg: &Config, width: u32, height: u32) -> Result<CameraModel> {
        let axis = |key: &str, extent: u32| -> Result<f64> {
            match cfg.get_str(key)? {
                "auto" => Ok((extent as f64 - 1.0) / 2.0),
                s => s
                    .parse()
                    .map_err(|_| Error::Config(format!("key {key:?}: {s:?} is not a number"))),
            }
        };
        let cam = CameraModel {
            focal_px: cfg.get_f64("camera.f")?,
            baseline_m: cfg.get_f64("camera.b")?,
            principal_x: axis("camera.cx", width)?,
            principal_y: axis("camera.cy", height)?,
            distortion_dx: cfg.get_f64("camera.dx")?,
            distortion_dy: cfg.get_f64("camera.dy")?,
        };
        if cam.focal_px <= 0.0 || cam.baseline_m <= 0.0 {
            return Err(Error::Config("camera focal/baseline must be positive".into()));
        }
        Ok(cam)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelSample {
    pub t_ms: i64,
    pub sv_total: f64,
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncRecord {
    pub frame_index: usize,
    pub t_ms: i64,
    pub sv_total_interp: f64,
}

/// 3D points in the camera frame (metres) with their source pixels.
#[derive(Debug, Clone, Default)]
pub struct PointCloud {
    pub points: Vec<[f64; 3]>,
    pub pixels: Vec<(u32, u32)>,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn centroid(&self) -> Option<[f64; 3]> {
        if self.points.is_empty() {
            return None;
        }
        let mut c = [0.0; 3];
        for p in &self.points {
            for k in 0..3 {
                c[k] += p[k];
            }
        }
        let n = self.points.len() as f64;
        Some([c[0] / n, c[1] / n, c[2] / n])
    }
}

/// Real-valued disparity per pixel; NaN marks pixels without a measurement.
#[derive(Debug, Clone)]
pub struct DisparityGrid {
    pub width: u32,
    pub height: u32,
    pub values: Vec<f64>,
}

impl DisparityGrid {
    #[inline]
    pub fn at(&self, x: u32, y: u32) -> f64 {
        self.values[(y * self.width + x) as usize]
    }
}

/// A loaded sequence: ordered frames plus optional synchronized
/// accelerometer data.
#[derive(Debug, Clone)]
pub struct Sequence {
    pub frames: Vec<DepthFrame>,
    pub sync: Option<Vec<SyncRecord>>,
    pub accel: Vec<AccelSample>,
    pub camera: CameraModel,
    pub ci_mm: f64,
}

impl Sequence {
    pub fn has_accel(&self) -> bool {
        !self.accel.is_empty()
    }
}

/// Decode a 16-bit grayscale PNG into a depth frame.
///
/// Pixel values map linearly to depth: `d = scale_ci * P / 65535` rounded to
/// whole millimetres; `P = 0` stays 0 (nmd).
pub fn decode_depth_png16(bytes: &[u8], scale_ci: f64) -> Result<DepthFrame> {
    if scale_ci <= 0.0 {
        return Err(Error::Invalid("scale_ci must be positive".into()));
    }
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)
        .map_err(|e| Error::Decode(e.to_string()))?;
    let img = match img {
        DynamicImage::ImageLuma16(img) => img,
        other => {
            return Err(Error::Format(format!(
                "expected 16-bit single-channel PNG, got {:?}",
                other.color()
            )))
        }
    };
    let (width, height) = img.dimensions();
    let depth = img
        .pixels()
        .map(|p| {
            let raw = p.0[0];
            if raw == 0 {
                0
            } else {
                (scale_ci * raw as f64 / 65535.0).round() as u16
            }
        })
        .collect();
    Ok(DepthFrame::new(width, height, depth))
}

/// Inverse of [`decode_depth_png16`]; debug dumps only.
pub fn encode_depth_png16(frame: &DepthFrame, scale_ci: f64) -> Result<Vec<u8>> {
    if scale_ci <= 0.0 {
        return Err(Error::Invalid("scale_ci must be positive".into()));
    }
    let raw: Vec<u16> = frame
        .depth
        .iter()
        .map(|&d| {
            if d == 0 {
                0
            } else {
                ((d as f64) * 65535.0 / scale_ci).round().min(65535.0) as u16
            }
        })
        .collect();
    let img = image::ImageBuffer::<image::Luma<u16>, _>::from_raw(frame.width, frame.height, raw)
        .expect("buffer size matches dimensions");
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png)
        .map_err(|e| Error::Decode(e.to_string()))?;
    Ok(out.into_inner())
}

fn parse_field<T: std::str::FromStr>(field: &str, row: usize, what: &str) -> Result<T> {
    field.trim().parse().map_err(|_| Error::Parse {
        row,
        msg: format!("{what}: {field:?} is not numeric"),
    })
}

fn csv_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?)
}

fn looks_like_header(record: &csv::StringRecord) -> bool {
    record
        .get(0)
        .map(|f| f.parse::<f64>().is_err())
        .unwrap_or(false)
}

/// Load `t_ms,sv_total,ax,ay,az` rows; samples are re-sorted stably by
/// timestamp and the magnitude is cross-checked against the components.
pub fn load_accel_csv(path: &Path) -> Result<Vec<AccelSample>> {
    let mut reader = csv_reader(path)?;
    let mut samples = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse { row: i + 1, msg: e.to_string() })?;
        if i == 0 && looks_like_header(&record) {
            continue;
        }
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if record.len() < 5 {
            return Err(Error::Parse {
                row: i + 1,
                msg: format!("expected 5 fields (t_ms,sv_total,ax,ay,az), got {}", record.len()),
            });
        }
        let t_ms: f64 = parse_field(&record[0], i + 1, "t_ms")?;
        let sample = AccelSample {
            t_ms: t_ms.round() as i64,
            sv_total: parse_field(&record[1], i + 1, "sv_total")?,
            ax: parse_field(&record[2], i + 1, "ax")?,
            ay: parse_field(&record[3], i + 1, "ay")?,
            az: parse_field(&record[4], i + 1, "az")?,
        };
        let derived = crate::accel::sv_total(sample.ax, sample.ay, sample.az);
        if (sample.sv_total - derived).abs() > 1e-3 {
            return Err(Error::Parse {
                row: i + 1,
                msg: format!(
                    "sv_total {} disagrees with component magnitude {derived:.6}",
                    sample.sv_total
                ),
            });
        }
        samples.push(sample);
    }
    samples.sort_by_key(|s| s.t_ms);
    Ok(samples)
}

/// Load `frame_index,t_ms,sv_total` rows.
pub fn load_sync_csv(path: &Path) -> Result<Vec<SyncRecord>> {
    let mut reader = csv_reader(path)?;
    let mut records = Vec::new();
    let mut last_t = i64::MIN;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse { row: i + 1, msg: e.to_string() })?;
        if i == 0 && looks_like_header(&record) {
            continue;
        }
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if record.len() < 3 {
            return Err(Error::Parse {
                row: i + 1,
                msg: format!("expected 3 fields (frame_index,t_ms,sv_total), got {}", record.len()),
            });
        }
        let rec = SyncRecord {
            frame_index: parse_field(&record[0], i + 1, "frame_index")?,
            t_ms: parse_field::<f64>(&record[1], i + 1, "t_ms")?.round() as i64,
            sv_total_interp: parse_field(&record[2], i + 1, "sv_total")?,
        };
        if rec.t_ms < last_t {
            return Err(Error::Parse {
                row: i + 1,
                msg: "sync timestamps must be non-decreasing".into(),
            });
        }
        last_t = rec.t_ms;
        records.push(rec);
    }
    Ok(records)
}

/// Load a full sequence directory (see module docs for the layout).
pub fn load_sequence(dir: &Path, cfg: &Config) -> Result<Sequence> {
    let depth_dir = dir.join("depth");
    if !depth_dir.is_dir() {
        return Err(Error::NotFound(format!("{} has no depth/ directory", dir.display())));
    }

    // Camera overrides from an optional sidecar file; per-sequence Ci is
    // required here because the PNG scale is camera-setup dependent.
    let mut cfg = cfg.clone();
    let sidecar = dir.join("camera.toml");
    if sidecar.is_file() {
        let text = std::fs::read_to_string(&sidecar)?;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("camera.toml: bad line {raw:?}")))?;
            let key = match key.trim().trim_matches('"') {
                "f" => "camera.f",
                "b" => "camera.b",
                "cx" => "camera.cx",
                "cy" => "camera.cy",
                "ci" | "ci_mm" => "camera.ci_mm",
                other => {
                    return Err(Error::Format(format!("camera.toml: unknown key {other:?}")))
                }
            };
            cfg.set(key, value.trim());
        }
    }
    let ci_mm = cfg.get_f64("camera.ci_mm")?;

    // Collect numbered PNG frames.
    let mut by_index: BTreeMap<usize, std::path::PathBuf> = BTreeMap::new();
    for entry in std::fs::read_dir(&depth_dir)? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("png") {
            continue;
        }
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::Format(format!("bad file name {}", path.display())))?;
        let index: usize = stem.parse().map_err(|_| {
            Error::Format(format!("depth file name {stem:?} is not a frame number"))
        })?;
        by_index.insert(index, path);
    }
    if by_index.is_empty() {
        return Err(Error::NotFound(format!("{} contains no PNG frames", depth_dir.display())));
    }
    let first = *by_index.keys().next().unwrap();
    let last = *by_index.keys().last().unwrap();
    let missing: Vec<usize> = (first..=last).filter(|i| !by_index.contains_key(i)).collect();
    if !missing.is_empty() {
        return Err(Error::Format(format!("gap in frame numbering, missing indices {missing:?}")));
    }

    let sync_path = dir.join("sync.csv");
    let sync = if sync_path.is_file() {
        let records = load_sync_csv(&sync_path)?;
        if records.len() != by_index.len() {
            return Err(Error::Alignment(format!(
                "{} sync rows for {} frames",
                records.len(),
                by_index.len()
            )));
        }
        Some(records)
    } else {
        None
    };

    let accel_path = dir.join("accel.csv");
    let accel = if accel_path.is_file() {
        load_accel_csv(&accel_path)?
    } else {
        Vec::new()
    };

    let frame_period_ms = 1000.0 / cfg.get_f64("camera.fps")?;
    let mut frames = Vec::with_capacity(by_index.len());
    for (ordinal, (&index, path)) in by_index.iter().enumerate() {
        let bytes = std::fs::read(path)?;
        let mut frame = decode_depth_png16(&bytes, ci_mm)?;
        frame.frame_index = index;
        frame.t_ms = match &sync {
            Some(records) => records[ordinal].t_ms,
            None => (ordinal as f64 * frame_period_ms).round() as i64,
        };
        frames.push(frame);
    }

    let camera = CameraModel::from_config(&cfg, frames[0].width, frames[0].height)?;
    Ok(Sequence { frames, sync, accel, camera, ci_mm })
}

fn median_u16(values: &mut Vec<u16>) -> u16 {
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        // Average of the two middle values, rounded to the nearest mm.
        ((values[n / 2 - 1] as u32 + values[n / 2] as u32 + 1) / 2) as u16
    }
}

/// Denoise a depth map: 5x5 spatial median ignoring nmd cells, then a
/// per-pixel temporal median over up to 3 frames (this one plus up to two
/// history frames), again skipping nmd values. Never turns a measured pixel
/// into nmd.
pub fn preprocess_depth(frame: &DepthFrame, history: &[&DepthFrame]) -> Result<DepthFrame> {
    if history.len() > 2 {
        return Err(Error::Invalid("at most 2 history frames".into()));
    }
    for h in history {
        if h.width != frame.width || h.height != frame.height {
            return Err(Error::Dimension("history frame size differs".into()));
        }
    }

    let (w, h) = (frame.width as i64, frame.height as i64);
    let mut spatial = frame.clone();
    let mut window = Vec::with_capacity(25);
    for y in 0..h {
        for x in 0..w {
            window.clear();
            for dy in -2..=2 {
                for dx in -2..=2 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    let d = frame.at(nx as u32, ny as u32);
                    if d != 0 {
                        window.push(d);
                    }
                }
            }
            let value = if window.is_empty() { 0 } else { median_u16(&mut window) };
            spatial.set(x as u32, y as u32, value);
        }
    }

    if history.is_empty() {
        return Ok(spatial);
    }
    let mut out = spatial.clone();
    let mut stack = Vec::with_capacity(3);
    for i in 0..spatial.depth.len() {
        stack.clear();
        if spatial.depth[i] != 0 {
            stack.push(spatial.depth[i]);
        }
        for hist in history {
            if hist.depth[i] != 0 {
                stack.push(hist.depth[i]);
            }
        }
        out.depth[i] = if stack.is_empty() { 0 } else { median_u16(&mut stack) };
    }
    Ok(out)
}

/// Back-project every measured pixel to a 3D point in the camera frame.
pub fn depth_to_pointcloud(frame: &DepthFrame, cam: &CameraModel) -> PointCloud {
    let mut cloud = PointCloud {
        points: Vec::with_capacity(frame.depth.len()),
        pixels: Vec::with_capacity(frame.depth.len()),
    };
    for y in 0..frame.height {
        for x in 0..frame.width {
            let d = frame.at(x, y);
            if d == 0 {
                continue;
            }
            let z = d as f64 / 1000.0;
            let px = -(z / cam.focal_px) * (x as f64 - cam.principal_x + cam.distortion_dx);
            let py = -(z / cam.focal_px) * (y as f64 - cam.principal_y + cam.distortion_dy);
            cloud.points.push([px, py, z]);
            cloud.pixels.push((x, y));
        }
    }
    cloud
}

/// Convert depth (mm) to stereo disparity (pixels): `d = b*f / z`.
pub fn depth_to_disparity(frame: &DepthFrame, cam: &CameraModel) -> DisparityGrid {
    let values = frame
        .depth
        .iter()
        .map(|&d| {
            if d == 0 {
                f64::NAN
            } else {
                cam.baseline_m * cam.focal_px / (d as f64 / 1000.0)
            }
        })
        .collect();
    DisparityGrid { width: frame.width, height: frame.height, values }
}

/// Invert [`depth_to_disparity`] for one disparity value, returning metres.
pub fn disparity_to_depth_m(disparity: f64, cam: &CameraModel) -> f64 {
    cam.baseline_m * cam.focal_px / disparity
}

//! End-to-end fall-detection pipelines: frontal-camera and overhead-camera
//! orchestration with accelerometer-gated, event-driven processing and four
//! interchangeable decision backends.

use std::collections::VecDeque;

use crate::accel::{activity_state, threshold_events, Activity, AccelEvent, EventKind};
use crate::background::{build_model, subtract, update_model_roi, BackgroundModel, FrameBuffer};
use crate::classify::Model;
use crate::config::Config;
use crate::dataio::{
    depth_to_pointcloud, AccelSample, CameraModel, DepthFrame, PointCloud, Rect, Sequence,
};
use crate::error::{Error, Result};
use crate::eval::ConfusionMatrix;
use crate::features::{
    extract_dynamic, extract_overhead, extract_static, world_aspect, DynamicFeatures,
    StaticFeatures,
};
use crate::fuzzy::FallFuzzy;
use crate::geometry::{estimate_floor, plane_distance, Plane};
use crate::segmentation::{
    connected_components_depth, region_growing, select_person_blob, Blob,
};
use crate::synth::Episode;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Camera placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Frontal,
    Overhead,
}

/// Decision backend applied at trigger time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Accelerometer upper-fall-threshold crossing alone.
    Threshold,
    Knn,
    Svm,
    /// Hierarchical Static/Transition/Decision fuzzy system.
    Fuzzy,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Threshold => "threshold",
            Backend::Knn => "knn",
            Backend::Svm => "svm",
            Backend::Fuzzy => "fuzzy",
        }
    }
}

/// Everything a pipeline run needs besides the sequence itself.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub backend: Backend,
    /// Trained model, required by the Knn/Svm backends.
    pub model: Option<Model>,
    /// Use accelerometer gating when a stream is present. When false (or when
    /// no stream exists) classification is attempted on every frame.
    pub gated: bool,
    pub cfg: Config,
}

impl PipelineConfig {
    pub fn new(mode: Mode, backend: Backend, cfg: Config) -> Self {
        Self { mode, backend, model: None, gated: true, cfg }
    }
}

/// One debounced alarm.
#[derive(Debug, Clone)]
pub struct FallEvent {
    pub t_ms: i64,
    pub frame_index: usize,
    pub backend: Backend,
    pub score: f64,
    /// Feature snapshot at decision time (layout per [`feature_names`]).
    pub features: Vec<f64>,
}

/// Per-frame processing record.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub frame_index: usize,
    pub t_ms: i64,
    /// Vision ran this frame (false when skipped by the idle gate).
    pub processed: bool,
    pub person: bool,
    /// Full backend feature vector once the dynamic history is warm.
    pub features: Option<Vec<f64>>,
    /// Person-centroid error from the image centre in pixels (pan-tilt
    /// steering output; logged only, drives no hardware).
    pub steer_px: (f64, f64),
    /// Lying-pose hypothesis (overhead mode).
    pub lying: bool,
    pub scene_changed: bool,
    /// Overhead track was lost and reseeded from the largest component.
    pub reseeded: bool,
    pub triggered: bool,
    /// Backend score when classification ran, NaN otherwise.
    pub score: f64,
    pub decision: bool,
}

impl TraceRow {
    fn empty(frame_index: usize, t_ms: i64) -> Self {
        TraceRow {
            frame_index,
            t_ms,
            processed: false,
            person: false,
            features: None,
            steer_px: (0.0, 0.0),
            lying: false,
            scene_changed: false,
            reseeded: false,
            triggered: false,
            score: f64::NAN,
            decision: false,
        }
    }
}

/// Feature-vector layout per mode, in trace/model column order.
pub fn feature_names(mode: Mode) -> &'static [&'static str] {
    match mode {
        Mode::Frontal => {
            &["hw", "h_hmax", "d_mm", "max_sigma", "p40", "h_ratio", "d_ratio", "sv_total"]
        }
        Mode::Overhead => &["h_hmax", "area", "lw", "h_ratio", "d_ratio", "sv_total"],
    }
}

/// Index of the peak-SVtotal column in [`feature_names`] order.
pub fn sv_index(mode: Mode) -> usize {
    feature_names(mode).len() - 1
}

/// An impact hypothesis stays actionable this long after the UFT crossing.
const GATE_WINDOW_MS: i64 = 1000;

/// Orient a floor plane so the camera origin lies at positive height.
pub fn orient_floor(mut plane: Plane) -> Plane {
    if plane.d < 0.0 {
        plane = Plane {
            a: -plane.a,
            b: -plane.b,
            c: -plane.c,
            d: -plane.d,
            inlier_ratio: plane.inlier_ratio,
        };
    }
    plane
}

/// Back-project only the blob's pixels.
fn blob_cloud(frame: &DepthFrame, cam: &CameraModel, blob: &Blob) -> PointCloud {
    let mut masked =
        DepthFrame::new(frame.width, frame.height, vec![0; frame.depth.len()]);
    for &(x, y) in &blob.pixels {
        masked.set(x, y, frame.at(x, y));
    }
    depth_to_pointcloud(&masked, cam)
}

/// Stateful pipeline instance over one sequence.
pub struct Detector {
    pcfg: PipelineConfig,
    cam: CameraModel,
    floor: Plane,
    bg: BackgroundModel,
    fuzzy: Option<FallFuzzy>,
    accel: Vec<AccelSample>,
    uft_events: Vec<AccelEvent>,

    // Config knobs resolved once.
    idle_eps: f64,
    idle_hold_ms: i64,
    th_depth: f64,
    delta_thold: f64,
    min_area: usize,
    adjacency: u8,
    area_jump: f64,
    delta_t_ms: i64,
    z_ref_mm: f64,
    debounce_ms: i64,
    lying_h_hmax: f64,
    fall_h_ratio: f64,
    window_lo_ms: i64,
    window_hi_ms: i64,
    update_budget: usize,

    // Evolving state.
    h_max: f64,
    h_max_auto: bool,
    /// (t_ms, height above floor [m], centroid floor distance [mm]).
    history: Vec<(i64, f64, f64)>,
    buffer: FrameBuffer,
    buffer_masks: VecDeque<Vec<bool>>,
    buffer_capacity: usize,
    prev_blob: Option<Blob>,
    last_event_ms: Option<i64>,
    prev_lying: bool,
    /// Image-only impact hypothesis window (overhead, no accelerometer).
    image_gate_until: Option<i64>,
}

impl Detector {
    pub fn new(
        pcfg: PipelineConfig,
        cam: CameraModel,
        floor: Plane,
        bg: BackgroundModel,
        accel: Vec<AccelSample>,
    ) -> Result<Self> {
        let cfg = &pcfg.cfg;
        match pcfg.backend {
            Backend::Threshold if accel.is_empty() => {
                return Err(Error::Invalid(
                    "threshold backend requires an accelerometer stream".into(),
                ));
            }
            Backend::Knn | Backend::Svm if pcfg.model.is_none() => {
                return Err(Error::Invalid(
                    "knn/svm backend requires a trained model".into(),
                ));
            }
            _ => {}
        }
        let fuzzy = if pcfg.backend == Backend::Fuzzy {
            Some(FallFuzzy::from_config(cfg)?)
        } else {
            None
        };
        let uft = cfg.get_f64("accel.uft_g")?;
        let lft = cfg.get_f64("accel.lft_g")?;
        let uft_events = threshold_events(&accel, uft, lft);
        let (h_max, h_max_auto) = match cfg.get_str("feat.h_max_m")? {
            "auto" => (0.0, true),
            v => {
                let h: f64 = v
                    .parse()
                    .map_err(|_| Error::Config(format!("feat.h_max_m: bad value {v:?}")))?;
                (h, false)
            }
        };
        let buffer_capacity = cfg.get_usize("bg.buffer_capacity")?;
        Ok(Detector {
            idle_eps: cfg.get_f64("accel.idle_eps_g")?,
            idle_hold_ms: cfg.get_i64("accel.idle_hold_ms")?,
            th_depth: cfg.get_f64("seg.th_depth_mm")?,
            delta_thold: cfg.get_f64("seg.delta_thold_mm")?,
            min_area: cfg.get_usize("seg.min_area_px")?,
            adjacency: cfg.get_i64("seg.adjacency")? as u8,
            area_jump: cfg.get_f64("seg.area_jump")?,
            delta_t_ms: cfg.get_i64("feat.delta_t_ms")?,
            z_ref_mm: cfg.get_f64("feat.z_ref_mm")?,
            debounce_ms: cfg.get_i64("det.debounce_ms")?,
            lying_h_hmax: cfg.get_f64("det.lying_h_hmax")?,
            fall_h_ratio: cfg.get_f64("det.fall_h_ratio")?,
            window_lo_ms: cfg.get_i64("det.window_lo_ms")?,
            window_hi_ms: cfg.get_i64("det.window_hi_ms")?,
            update_budget: cfg.get_usize("bg.update_budget_frames")?,
            buffer: FrameBuffer::new(buffer_capacity),
            buffer_masks: VecDeque::new(),
            buffer_capacity,
            h_max,
            h_max_auto,
            history: Vec::new(),
            prev_blob: None,
            last_event_ms: None,
            prev_lying: false,
            image_gate_until: None,
            pcfg,
            cam,
            floor,
            bg,
            fuzzy,
            accel,
            uft_events,
        })
    }

    pub fn floor(&self) -> &Plane {
        &self.floor
    }

    /// Calibrated (or configured) person height, metres; 0 until observed.
    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    fn has_accel(&self) -> bool {
        !self.accel.is_empty()
    }

    /// Peak SVtotal of any UFT crossing in the gate window before `t`.
    fn uft_recent(&self, t: i64) -> Option<f64> {
        self.uft_events
            .iter()
            .filter(|e| {
                e.kind == EventKind::UftExceeded && e.t_ms > t - GATE_WINDOW_MS && e.t_ms <= t
            })
            .map(|e| e.value)
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |x| x.max(v))))
    }

    /// Trailing-window activity state; `Moving` until enough history exists.
    fn activity(&self, t: i64) -> Activity {
        let lo = self
            .accel
            .partition_point(|s| s.t_ms < t - self.idle_hold_ms - 500);
        let hi = self.accel.partition_point(|s| s.t_ms <= t);
        match activity_state(&self.accel[lo..hi], self.idle_eps, self.idle_hold_ms) {
            Ok(st) => st.state,
            Err(_) => Activity::Moving,
        }
    }

    /// Keep ratio features meaningful across idle-skipped frames.
    fn carry_forward_history(&mut self, t: i64) {
        if let Some(&(_, h, d)) = self.history.last() {
            self.history.push((t, h, d));
        }
    }

    fn push_buffered(&mut self, frame: &DepthFrame, mask: Vec<bool>) {
        self.buffer.push(frame.clone());
        self.buffer_masks.push_back(mask);
        while self.buffer_masks.len() > self.buffer_capacity {
            self.buffer_masks.pop_front();
        }
        debug_assert_eq!(self.buffer.len(), self.buffer_masks.len());
    }

    /// Calibrate `h_max` and return the height ratio for the current height.
    fn observe_height(&mut self, height_m: f64) -> f64 {
        if self.h_max_auto {
            self.h_max = self.h_max.max(height_m);
        }
        height_m / self.h_max.max(0.1)
    }

    /// Rebuild the background inside the bounding boxes of non-person blobs.
    /// Detection continues regardless of the outcome (alarm safety beats
    /// model freshness), so update failures are swallowed.
    fn refresh_background(&mut self, blobs: &[Blob], person: Option<&Blob>) {
        let rois: Vec<Rect> = blobs
            .iter()
            .filter(|b| person.map_or(true, |p| p.label != b.label))
            .map(|b| b.bbox.dilate(4, self.bg.width, self.bg.height))
            .collect();
        if rois.is_empty() || self.buffer.len() < 3 {
            return;
        }
        let masks: Vec<Vec<bool>> = self.buffer_masks.iter().cloned().collect();
        let _ = update_model_roi(&mut self.bg, &self.buffer, &masks, &rois, self.update_budget);
    }

    /// Connected components over the full foreground (so model-hole pixels
    /// can join a person region), keeping only blobs with enough
    /// valid-reference pixels — holes alone must not spawn phantom objects.
    fn person_blobs(&self, fore: &crate::background::Foreground) -> Vec<Blob> {
        let w = fore.depth.width;
        let blobs = connected_components_depth(
            &fore.depth,
            self.th_depth,
            self.min_area,
            self.adjacency,
        );
        blobs
            .into_iter()
            .filter(|b| {
                let valid = b
                    .pixels
                    .iter()
                    .filter(|&&(x, y)| !fore.model_holes[(y * w + x) as usize])
                    .count();
                valid * 4 >= self.min_area
            })
            .collect()
    }

    /// Backend classification at a triggered frame.
    fn classify(
        &self,
        stat: &StaticFeatures,
        dynf: &DynamicFeatures,
        vec: &[f64],
        uft_value: Option<f64>,
    ) -> Result<(f64, bool)> {
        match self.pcfg.backend {
            Backend::Threshold => {
                Ok((uft_value.unwrap_or(0.0), uft_value.is_some()))
            }
            Backend::Knn | Backend::Svm => {
                let model = self.pcfg.model.as_ref().expect("validated in new()");
                let label = model.predict(vec);
                let score = match model {
                    Model::Svm(svm) => svm.decision(vec),
                    Model::Knn(_) => label as f64,
                };
                Ok((score, label == 1))
            }
            Backend::Fuzzy => {
                let fz = self.fuzzy.as_ref().expect("validated in new()");
                let decision = fz.evaluate(stat, dynf)?;
                Ok((decision.score, decision.fall))
            }
        }
    }

    fn emit(
        &mut self,
        row: &TraceRow,
        features: Vec<f64>,
    ) -> Option<FallEvent> {
        if let Some(last) = self.last_event_ms {
            if row.t_ms - last < self.debounce_ms {
                return None;
            }
        }
        self.last_event_ms = Some(row.t_ms);
        Some(FallEvent {
            t_ms: row.t_ms,
            frame_index: row.frame_index,
            backend: self.pcfg.backend,
            score: row.score,
            features,
        })
    }

    /// Frontal-camera step: background subtraction, component labeling,
    /// person selection, features, gated classification.
    pub fn frontal_step(
        &mut self,
        frame: &DepthFrame,
    ) -> Result<(TraceRow, Option<FallEvent>)> {
        let t = frame.t_ms;
        let mut row = TraceRow::empty(frame.frame_index, t);

        // Store-and-wait while the wearer is provably at rest.
        if self.pcfg.gated && self.has_accel() && self.activity(t) == Activity::Idle {
            self.carry_forward_history(t);
            return Ok((row, None));
        }
        row.processed = true;

        let fore = subtract(frame, &self.bg)?;
        let blobs = self.person_blobs(&fore);
        let (selected, scene_changed) =
            select_person_blob(&blobs, self.prev_blob.as_ref(), self.area_jump);
        row.scene_changed = scene_changed;

        let mask = selected
            .as_ref()
            .map(|b| b.mask(frame.width, frame.height))
            .unwrap_or_else(|| vec![false; frame.depth.len()]);
        self.push_buffered(frame, mask);
        if scene_changed || blobs.len() > 1 {
            self.refresh_background(&blobs, selected.as_ref());
        }

        let Some(blob) = selected else {
            return Ok((row, None));
        };
        row.person = true;
        row.steer_px = steer(&blob, frame);
        self.prev_blob = Some(blob.clone());

        let cloud = blob_cloud(&fore.depth, &self.cam, &blob);
        if cloud.is_empty() {
            return Ok((row, None));
        }
        let mut stat = extract_static(&blob, &cloud, &self.floor, self.h_max.max(0.5))?;
        stat.h_hmax = self.observe_height(stat.height_m);
        self.history.push((t, stat.height_m, stat.d.max(1.0)));

        let Ok(dynf) = extract_dynamic(&self.history, &self.accel, t, self.delta_t_ms) else {
            return Ok((row, None)); // history not warm yet
        };
        let vec = vec![
            stat.hw,
            stat.h_hmax,
            stat.d,
            stat.max_sigma,
            stat.p40,
            dynf.h_ratio,
            dynf.d_ratio,
            dynf.sv_total,
        ];
        row.features = Some(vec.clone());

        let uft_value = self.uft_recent(t);
        row.triggered =
            if self.pcfg.gated && self.has_accel() { uft_value.is_some() } else { true };
        if !row.triggered {
            return Ok((row, None));
        }
        let (score, decision) = self.classify(&stat, &dynf, &vec, uft_value)?;
        row.score = score;
        row.decision = decision;
        let event = if decision { self.emit(&row, vec) } else { None };
        Ok((row, event))
    }

    /// Overhead-camera step: region growing from the previous silhouette,
    /// lying-pose hypothesis, windowed fall-speed criterion.
    pub fn overhead_step(
        &mut self,
        frame: &DepthFrame,
    ) -> Result<(TraceRow, Option<FallEvent>)> {
        let t = frame.t_ms;
        let mut row = TraceRow::empty(frame.frame_index, t);

        if self.pcfg.gated && self.has_accel() && self.activity(t) == Activity::Idle {
            self.carry_forward_history(t);
            return Ok((row, None));
        }
        row.processed = true;

        let fore = subtract(frame, &self.bg)?;

        // Grow from the previous frame's silhouette; reseed from the largest
        // component when the track is lost.
        let mut blob: Option<Blob> = None;
        if let Some(prev) = &self.prev_blob {
            let seeds: Vec<(u32, u32)> = prev
                .pixels
                .iter()
                .copied()
                .filter(|&(x, y)| fore.depth.at(x, y) != 0)
                .step_by(5)
                .take(500)
                .collect();
            if !seeds.is_empty() {
                if let Ok(grown) = region_growing(&fore.depth, &seeds, self.delta_thold) {
                    if grown.area >= self.min_area {
                        blob = Some(grown);
                    }
                }
            }
        }
        if blob.is_none() {
            blob = self.person_blobs(&fore).into_iter().max_by_key(|b| b.area);
            row.reseeded = blob.is_some() && self.prev_blob.is_some();
        }
        self.push_buffered(
            frame,
            blob.as_ref()
                .map(|b| b.mask(frame.width, frame.height))
                .unwrap_or_else(|| vec![false; frame.depth.len()]),
        );

        let Some(blob) = blob else {
            return Ok((row, None));
        };
        row.person = true;
        row.steer_px = steer(&blob, frame);
        self.prev_blob = Some(blob.clone());

        let cloud = blob_cloud(&fore.depth, &self.cam, &blob);
        if cloud.is_empty() {
            return Ok((row, None));
        }
        let mut over =
            extract_overhead(&blob, &cloud, &self.floor, self.h_max.max(0.5), self.z_ref_mm)?;
        over.h_hmax = self.observe_height(over.height_m);
        row.lying = over.h_hmax < self.lying_h_hmax;

        let centroid = cloud.centroid().expect("cloud checked non-empty");
        let d_mm = (plane_distance(&self.floor, &centroid) * 1000.0).max(1.0);
        self.history.push((t, over.height_m, d_mm));

        let Ok(dynf) = extract_dynamic(&self.history, &self.accel, t, self.delta_t_ms) else {
            return Ok((row, None));
        };
        let vec = vec![
            over.h_hmax,
            over.area,
            over.lw,
            dynf.h_ratio,
            dynf.d_ratio,
            dynf.sv_total,
        ];
        row.features = Some(vec.clone());

        // Image-only impact hypothesis: the lying pose was just reached, and
        // it was reached at fall speed within the duration window. The
        // hypothesis stays actionable for the same window as an UFT crossing.
        let lying_onset = row.lying && !self.prev_lying;
        self.prev_lying = row.lying;
        if lying_onset && self.fast_drop(t) {
            self.image_gate_until = Some(t + GATE_WINDOW_MS);
        }
        let uft_value = self.uft_recent(t);
        row.triggered = if self.pcfg.gated && self.has_accel() {
            uft_value.is_some()
        } else {
            self.image_gate_until.is_some_and(|until| t <= until)
        };
        if !row.triggered {
            return Ok((row, None));
        }

        // The fuzzy backend reuses the posture descriptors. Heights and
        // spreads are measured against the floor plane and carry over as-is,
        // but the silhouette-box aspect would measure the footprint from this
        // viewpoint, so it is replaced by the world-space aspect.
        let mut stat = extract_static(&blob, &cloud, &self.floor, self.h_max.max(0.5))?;
        stat.hw = world_aspect(&cloud, &self.floor);
        let (score, decision) = self.classify(&stat, &dynf, &vec, uft_value)?;
        row.score = score;
        row.decision = decision;
        let event = if decision { self.emit(&row, vec) } else { None };
        Ok((row, event))
    }

    /// Fall-speed criterion: the height ratio H(t)/H(t−Δt) drops to or below
    /// the threshold for some Δt inside the duration window.
    fn fast_drop(&self, t: i64) -> bool {
        let h_now = match self.history.last() {
            Some(&(_, h, _)) => h,
            None => return false,
        };
        let mut dt = self.window_lo_ms;
        while dt <= self.window_hi_ms {
            if let Some(&(_, h_past, _)) = self
                .history
                .iter()
                .rev()
                .find(|&&(ht, _, _)| ht <= t - dt)
            {
                if h_past > 0.0 && h_now / h_past <= self.fall_h_ratio {
                    return true;
                }
            }
            dt += 50;
        }
        false
    }

    pub fn step(&mut self, frame: &DepthFrame) -> Result<(TraceRow, Option<FallEvent>)> {
        match self.pcfg.mode {
            Mode::Frontal => self.frontal_step(frame),
            Mode::Overhead => self.overhead_step(frame),
        }
    }
}

/// Pixel error of the person centroid from the image centre.
fn steer(blob: &Blob, frame: &DepthFrame) -> (f64, f64) {
    let n = blob.pixels.len() as f64;
    let (sx, sy) = blob
        .pixels
        .iter()
        .fold((0.0, 0.0), |(ax, ay), &(x, y)| (ax + x as f64, ay + y as f64));
    (
        sx / n - (frame.width as f64 - 1.0) / 2.0,
        sy / n - (frame.height as f64 - 1.0) / 2.0,
    )
}

/// Run one pipeline over a whole sequence: floor and background initialize
/// from the person-free warm-up frames, then every later frame is stepped.
pub fn run_sequence(
    seq: &Sequence,
    pcfg: &PipelineConfig,
) -> Result<(Vec<FallEvent>, Vec<TraceRow>)> {
    if seq.frames.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let cfg = &pcfg.cfg;
    let warmup = cfg.get_usize("det.warmup_frames")?;
    let bg_n = cfg.get_usize("bg.n_frames")?;
    let need = warmup.max(bg_n);
    if seq.frames.len() < need {
        return Err(Error::InsufficientData(format!(
            "sequence has {} frames, warm-up needs {need}",
            seq.frames.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.get_u64("floor.seed")?);
    let floor = orient_floor(estimate_floor(&seq.frames[0], &seq.camera, cfg, &mut rng)?);
    let b_thold = cfg.get_f64("bg.b_thold_mm")? as u16;
    let bg = build_model(&seq.frames[..bg_n], bg_n, b_thold)?;

    let mut det =
        Detector::new(pcfg.clone(), seq.camera, floor, bg, seq.accel.clone())?;
    let mut events = Vec::new();
    let mut trace = Vec::with_capacity(seq.frames.len().saturating_sub(need));
    for frame in &seq.frames[need..] {
        let (row, event) = det.step(frame)?;
        trace.push(row);
        events.extend(event);
    }
    Ok((events, trace))
}

/// Extract one labeled training vector per episode: the trace row with the
/// highest windowed SVtotal (ties resolve to the latest row), which lands on
/// the impact for falls and on the most energetic motion otherwise.
pub fn collect_training_set(
    episodes: &[Episode],
    mode: Mode,
    cfg: &Config,
) -> Result<(Vec<Vec<f64>>, Vec<u8>)> {
    let mut pcfg = PipelineConfig::new(mode, Backend::Threshold, cfg.clone());
    pcfg.gated = false;
    let sv = sv_index(mode);
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for ep in episodes {
        let (_, trace) = run_sequence(&ep.seq, &pcfg)?;
        let best = trace
            .iter()
            .filter_map(|r| r.features.as_ref())
            .max_by(|a, b| a[sv].partial_cmp(&b[sv]).unwrap());
        if let Some(vec) = best {
            samples.push(vec.clone());
            labels.push(ep.fall as u8);
        }
    }
    Ok((samples, labels))
}

/// Sequence-level scoring: a fall episode with at least one event is a true
/// positive, an ADL episode with any event is a false positive.
pub fn evaluate_suite(
    episodes: &[Episode],
    pcfg: &PipelineConfig,
) -> Result<ConfusionMatrix> {
    let mut cm = ConfusionMatrix::new(0, 0, 0, 0);
    for ep in episodes {
        let (events, _) = run_sequence(&ep.seq, pcfg)?;
        match (ep.fall, events.is_empty()) {
            (true, false) => cm.tp += 1,
            (true, true) => cm.false_neg += 1,
            (false, false) => cm.fp += 1,
            (false, true) => cm.tn += 1,
        }
    }
    Ok(cm)
}

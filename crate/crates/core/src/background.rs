//! Depth background modeling: nmd-skipping temporal median reference,
//! foreground subtraction, and ROI-scoped model updates on scene changes.

use std::collections::VecDeque;

use crate::dataio::{DepthFrame, Rect};
use crate::error::{Error, Result};

/// Reference background depth map. `b_thold` is the per-pixel tolerance (mm)
/// below which a measurement counts as background.
#[derive(Debug, Clone)]
pub struct BackgroundModel {
    pub width: u32,
    pub height: u32,
    pub reference: Vec<u16>,
    pub b_thold: u16,
}

impl BackgroundModel {
    #[inline]
    pub fn at(&self, x: u32, y: u32) -> u16 {
        self.reference[(y * self.width + x) as usize]
    }

    pub fn nmd_count(&self) -> usize {
        self.reference.iter().filter(|&&d| d == 0).count()
    }
}

/// Foreground extraction result. `depth` keeps the measured depth of
/// foreground pixels (0 elsewhere); `model_holes` flags pixels that are only
/// foreground *candidates* because the model has no reference there — those
/// must not seed new blobs (a hole in the model must not spawn phantom
/// objects), but may be absorbed into regions grown from valid seeds.
#[derive(Debug, Clone)]
pub struct Foreground {
    pub depth: DepthFrame,
    pub model_holes: Vec<bool>,
}

impl Foreground {
    /// Foreground with model-hole candidates removed; safe input for
    /// connected-component seeding.
    pub fn seedable(&self) -> DepthFrame {
        let mut frame = self.depth.clone();
        for (d, &hole) in frame.depth.iter_mut().zip(&self.model_holes) {
            if hole {
                *d = 0;
            }
        }
        frame
    }
}

/// Fixed-capacity FIFO of recent frames.
#[derive(Debug, Clone)]
pub struct FrameBuffer {
    capacity: usize,
    frames: VecDeque<DepthFrame>,
}

impl FrameBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        FrameBuffer { capacity, frames: VecDeque::with_capacity(capacity) }
    }

    pub fn push(&mut self, frame: DepthFrame) {
        if self.frames.len() == self.capacity {
            self.frames.pop_front();
        }
        self.frames.push_back(frame);
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &DepthFrame> {
        self.frames.iter()
    }

    /// Frame `lag` steps before the newest one.
    pub fn lagged(&self, lag: usize) -> Option<&DepthFrame> {
        let n = self.frames.len();
        if lag >= n {
            None
        } else {
            self.frames.get(n - 1 - lag)
        }
    }
}

fn median_nonzero(values: &mut Vec<u16>) -> u16 {
    if values.is_empty() {
        return 0;
    }
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        ((values[n / 2 - 1] as u32 + values[n / 2] as u32 + 1) / 2) as u16
    }
}

/// Build the reference as a per-pixel temporal median that skips nmd values.
/// Only when a pixel is nmd in every frame does the reference stay nmd —
/// this is what keeps the model denser than a plain median would be.
pub fn build_model(frames: &[DepthFrame], n: usize, b_thold: u16) -> Result<BackgroundModel> {
    if n < 3 {
        return Err(Error::Invalid("background median needs n >= 3".into()));
    }
    if frames.len() < n {
        return Err(Error::InsufficientData(format!(
            "need {n} frames to build the background, got {}",
            frames.len()
        )));
    }
    let frames = &frames[frames.len() - n..];
    let (width, height) = (frames[0].width, frames[0].height);
    for f in frames {
        if f.width != width || f.height != height {
            return Err(Error::Dimension("background frames differ in size".into()));
        }
    }
    let mut reference = vec![0u16; (width * height) as usize];
    let mut stack = Vec::with_capacity(n);
    for (i, r) in reference.iter_mut().enumerate() {
        stack.clear();
        for f in frames {
            let d = f.depth[i];
            if d != 0 {
                stack.push(d);
            }
        }
        *r = median_nonzero(&mut stack);
    }
    Ok(BackgroundModel { width, height, reference, b_thold })
}

/// Classic zero-including median reference, kept for comparison tests.
pub fn build_model_classic(frames: &[DepthFrame], n: usize, b_thold: u16) -> Result<BackgroundModel> {
    let model = build_model(frames, n, b_thold)?; // validates inputs
    let frames = &frames[frames.len() - n..];
    let mut reference = vec![0u16; model.reference.len()];
    let mut stack = Vec::with_capacity(n);
    for (i, r) in reference.iter_mut().enumerate() {
        stack.clear();
        for f in frames {
            stack.push(f.depth[i]);
        }
        stack.sort_unstable();
        *r = if n % 2 == 1 {
            stack[n / 2]
        } else {
            ((stack[n / 2 - 1] as u32 + stack[n / 2] as u32 + 1) / 2) as u16
        };
    }
    Ok(BackgroundModel { reference, ..model })
}

/// Foreground = pixels deviating from the reference by more than `b_thold`.
/// nmd measurements are never foreground; pixels without a reference are
/// candidates only (see [`Foreground::model_holes`]).
pub fn subtract(frame: &DepthFrame, model: &BackgroundModel) -> Result<Foreground> {
    if frame.width != model.width || frame.height != model.height {
        return Err(Error::Dimension("frame does not match background model".into()));
    }
    let mut out = frame.clone();
    let mut holes = vec![false; frame.depth.len()];
    for i in 0..frame.depth.len() {
        let d = frame.depth[i];
        let b = model.reference[i];
        out.depth[i] = if d == 0 {
            0
        } else if b == 0 {
            holes[i] = true;
            d
        } else if (d as i32 - b as i32).unsigned_abs() > model.b_thold as u32 {
            d
        } else {
            0
        };
    }
    Ok(Foreground { depth: out, model_holes: holes })
}

/// Rebuild the model inside `rois` from recent person-free evidence.
///
/// For each ROI: walk the buffered frames oldest-to-newest, zero out the
/// person pixels of each crop and push it on a stack while maintaining the
/// logical coverage array L (has this ROI pixel been observed measured at
/// least once?). Once L is all-true the per-pixel nmd-skipping median of the
/// stack replaces the model's ROI. If coverage is not reached within
/// `budget_frames` stacked crops the model is left untouched and a timeout
/// is reported. Pixels outside the ROIs are never modified.
pub fn update_model_roi(
    model: &mut BackgroundModel,
    buffer: &FrameBuffer,
    person_masks: &[Vec<bool>],
    rois: &[Rect],
    budget_frames: usize,
) -> Result<()> {
    if buffer.len() < 3 {
        return Err(Error::InsufficientData("ROI update needs >= 3 buffered frames".into()));
    }
    if person_masks.len() != buffer.len() {
        return Err(Error::Dimension("one person mask per buffered frame required".into()));
    }

    let mut patches: Vec<(Rect, Vec<u16>)> = Vec::with_capacity(rois.len());
    for roi in rois {
        if roi.x + roi.w > model.width || roi.y + roi.h > model.height {
            return Err(Error::Invalid("ROI exceeds frame bounds".into()));
        }
        let size = (roi.w * roi.h) as usize;
        let mut stack: Vec<Vec<u16>> = Vec::new();
        let mut covered = vec![false; size];

        for (frame, mask) in buffer.iter().zip(person_masks) {
            let mut crop = Vec::with_capacity(size);
            for y in roi.y..roi.y + roi.h {
                for x in roi.x..roi.x + roi.w {
                    let i = (y * frame.width + x) as usize;
                    let d = if mask[i] { 0 } else { frame.depth[i] };
                    crop.push(d);
                }
            }
            for (c, &d) in covered.iter_mut().zip(&crop) {
                if d != 0 {
                    *c = true;
                }
            }
            stack.push(crop);
            if covered.iter().all(|&c| c) {
                break;
            }
            if stack.len() >= budget_frames {
                break;
            }
        }

        if !covered.iter().all(|&c| c) {
            return Err(Error::Timeout(format!(
                "ROI {roi:?} not fully observed within {budget_frames} frames"
            )));
        }

        let mut patch = vec![0u16; size];
        let mut values = Vec::with_capacity(stack.len());
        for (i, p) in patch.iter_mut().enumerate() {
            values.clear();
            for crop in &stack {
                if crop[i] != 0 {
                    values.push(crop[i]);
                }
            }
            *p = median_nonzero(&mut values);
        }
        patches.push((*roi, patch));
    }

    // All ROIs succeeded; commit.
    for (roi, patch) in patches {
        let mut k = 0;
        for y in roi.y..roi.y + roi.h {
            for x in roi.x..roi.x + roi.w {
                model.reference[(y * model.width + x) as usize] = patch[k];
                k += 1;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn frame1(value: u16) -> DepthFrame {
        DepthFrame::new(1, 1, vec![value])
    }

    #[test]
    fn nmd_skipping_median_hand_example() {
        let frames: Vec<DepthFrame> = [1000, 0, 1010, 0, 990].iter().map(|&v| frame1(v)).collect();
        let model = build_model(&frames, 5, 100).unwrap();
        assert_eq!(model.reference[0], 1000);
        // The zero-including median would sit on a stale value instead.
        let classic = build_model_classic(&frames, 5, 100).unwrap();
        assert_eq!(classic.reference[0], 990);
    }

    #[test]
    fn all_zero_history_stays_nmd() {
        let frames: Vec<DepthFrame> = (0..5).map(|_| frame1(0)).collect();
        let model = build_model(&frames, 5, 100).unwrap();
        assert_eq!(model.reference[0], 0);
    }

    #[test]
    fn constant_history() {
        let frames: Vec<DepthFrame> = (0..4).map(|_| frame1(1500)).collect();
        let model = build_model(&frames, 4, 100).unwrap();
        assert_eq!(model.reference[0], 1500);
    }

    #[test]
    fn too_few_frames_error() {
        let frames = vec![frame1(1000); 2];
        assert!(build_model(&frames, 5, 100).is_err());
    }

    #[test]
    fn subtraction_rules() {
        let model = BackgroundModel { width: 4, height: 1, reference: vec![2000, 2000, 2000, 0], b_thold: 100 };
        let frame = DepthFrame::new(4, 1, vec![2000, 1500, 0, 1200]);
        let fg = subtract(&frame, &model).unwrap();
        assert_eq!(fg.depth.depth, vec![0, 1500, 0, 1200]);
        assert_eq!(fg.model_holes, vec![false, false, false, true]);
        assert_eq!(fg.seedable().depth, vec![0, 1500, 0, 0]);
    }

    #[test]
    fn subtract_is_idempotent_on_zeros() {
        let model = BackgroundModel { width: 3, height: 1, reference: vec![2000; 3], b_thold: 100 };
        let frame = DepthFrame::new(3, 1, vec![2000, 900, 2050]);
        let fg1 = subtract(&frame, &model).unwrap();
        let fg2 = subtract(&fg1.depth, &model).unwrap();
        for (a, b) in fg1.depth.depth.iter().zip(&fg2.depth.depth) {
            if *a == 0 {
                assert_eq!(*b, 0);
            }
        }
    }

    fn buffer_of(frames: Vec<DepthFrame>) -> FrameBuffer {
        let mut buf = FrameBuffer::new(16);
        for f in frames {
            buf.push(f);
        }
        buf
    }

    #[test]
    fn roi_update_static_scene() {
        let mut model = BackgroundModel { width: 4, height: 4, reference: vec![3000; 16], b_thold: 100 };
        let frames: Vec<DepthFrame> = (0..3)
            .map(|_| DepthFrame::new(4, 4, vec![1000; 16]))
            .collect();
        let masks = vec![vec![false; 16]; 3];
        let roi = Rect { x: 1, y: 1, w: 2, h: 2 };
        let buf = buffer_of(frames);
        update_model_roi(&mut model, &buf, &masks, &[roi], 10).unwrap();
        for y in 0..4u32 {
            for x in 0..4u32 {
                let expected = if roi.contains(x, y) { 1000 } else { 3000 };
                assert_eq!(model.at(x, y), expected, "({x},{y})");
            }
        }
    }

    #[test]
    fn roi_update_removes_person_and_uses_singleton_observation() {
        // Pixel (1,1) is covered by the person in all but the last frame;
        // its single non-person observation must land in the model.
        let mut model = BackgroundModel { width: 2, height: 2, reference: vec![3000; 4], b_thold: 100 };
        let mut frames = Vec::new();
        let mut masks = Vec::new();
        for i in 0..5 {
            let person_here = i < 4;
            let mut f = DepthFrame::new(2, 2, vec![1000; 4]);
            if person_here {
                f.set(1, 1, 700); // person depth
            } else {
                f.set(1, 1, 1010);
            }
            let mut m = vec![false; 4];
            m[3] = person_here;
            frames.push(f);
            masks.push(m);
        }
        let buf = buffer_of(frames);
        update_model_roi(&mut model, &buf, &masks, &[Rect { x: 0, y: 0, w: 2, h: 2 }], 10).unwrap();
        assert_eq!(model.at(1, 1), 1010);
        assert!(model.reference.iter().all(|&d| d != 700), "person depth leaked into model");
    }

    #[test]
    fn roi_update_timeout_leaves_model_unchanged() {
        let mut model = BackgroundModel { width: 2, height: 1, reference: vec![3000, 3000], b_thold: 100 };
        let before = model.reference.clone();
        // Second pixel is never observed (always nmd).
        let frames: Vec<DepthFrame> = (0..4).map(|_| DepthFrame::new(2, 1, vec![1000, 0])).collect();
        let masks = vec![vec![false; 2]; 4];
        let buf = buffer_of(frames);
        let err = update_model_roi(&mut model, &buf, &masks, &[Rect { x: 0, y: 0, w: 2, h: 1 }], 3);
        assert!(matches!(err, Err(Error::Timeout(_))));
        assert_eq!(model.reference, before);
    }

    #[test]
    fn roi_update_never_touches_outside() {
        let mut model = BackgroundModel { width: 8, height: 8, reference: vec![2500; 64], b_thold: 100 };
        let frames: Vec<DepthFrame> = (0..3).map(|_| DepthFrame::new(8, 8, vec![900; 64])).collect();
        let masks = vec![vec![false; 64]; 3];
        let roi = Rect { x: 2, y: 3, w: 3, h: 2 };
        let buf = buffer_of(frames);
        update_model_roi(&mut model, &buf, &masks, &[roi], 10).unwrap();
        for y in 0..8u32 {
            for x in 0..8u32 {
                if !roi.contains(x, y) {
                    assert_eq!(model.at(x, y), 2500);
                }
            }
        }
    }

    #[test]
    fn frame_buffer_evicts_fifo() {
        let mut buf = FrameBuffer::new(2);
        for v in [1u16, 2, 3] {
            buf.push(frame1(v));
        }
        assert_eq!(buf.len(), 2);
        let values: Vec<u16> = buf.iter().map(|f| f.depth[0]).collect();
        assert_eq!(values, vec![2, 3]);
        assert_eq!(buf.lagged(0).unwrap().depth[0], 3);
        assert_eq!(buf.lagged(1).unwrap().depth[0], 2);
        assert!(buf.lagged(2).is_none());
    }

    proptest! {
        // The nmd-skipping median never has more holes than the classic one.
        #[test]
        fn skipping_median_is_denser(
            histories in proptest::collection::vec(
                proptest::collection::vec(
                    prop_oneof![2 => Just(0u16), 3 => 500u16..3000], 5),
                1..20)
        ) {
            let n_px = histories.len();
            let frames: Vec<DepthFrame> = (0..5).map(|t| {
                let depth: Vec<u16> = histories.iter().map(|h| h[t]).collect();
                DepthFrame::new(n_px as u32, 1, depth)
            }).collect();
            let skipping = build_model(&frames, 5, 100).unwrap();
            let classic = build_model_classic(&frames, 5, 100).unwrap();
            prop_assert!(skipping.nmd_count() <= classic.nmd_count());
        }
    }
}

//! Person-region extraction: depth-aware connected components on the
//! foreground, seeded single-region growing, and person-blob selection
//! across frames.

use std::collections::{BTreeMap, VecDeque};

use crate::dataio::{DepthFrame, Rect};
use crate::error::{Error, Result};

/// A labeled connected pixel region.
#[derive(Debug, Clone, PartialEq)]
pub struct Blob {
    pub label: u32,
    pub pixels: Vec<(u32, u32)>,
    pub area: usize,
    pub mean_depth: f64,
    pub bbox: Rect,
}

impl Blob {
    /// Assemble a blob from its pixel set, reading depths from `depth`.
    pub fn from_pixels(label: u32, pixels: Vec<(u32, u32)>, depth: &DepthFrame) -> Blob {
        assert!(!pixels.is_empty());
        let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0u32, 0u32);
        let mut sum = 0.0;
        for &(x, y) in &pixels {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
            sum += depth.at(x, y) as f64;
        }
        let area = pixels.len();
        Blob {
            label,
            area,
            mean_depth: sum / area as f64,
            bbox: Rect { x: x0, y: y0, w: x1 - x0 + 1, h: y1 - y0 + 1 },
            pixels,
        }
    }

    /// Binary mask of the blob over the full image.
    pub fn mask(&self, width: u32, height: u32) -> Vec<bool> {
        let mut mask = vec![false; (width * height) as usize];
        for &(x, y) in &self.pixels {
            mask[(y * width + x) as usize] = true;
        }
        mask
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        UnionFind { parent: vec![0] } // label 0 is "no label"
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Two-pass connected-component labeling where adjacent measured pixels
/// merge only if their depth difference is at most `th_depth` (pass
/// `f64::INFINITY` for classic binary labeling). Components smaller than
/// `min_area` are discarded.
pub fn connected_components_depth(
    fore: &DepthFrame,
    th_depth: f64,
    min_area: usize,
    adjacency: u8,
) -> Vec<Blob> {
    assert!(adjacency == 4 || adjacency == 8, "adjacency must be 4 or 8");
    assert!(th_depth > 0.0);
    let (w, h) = (fore.width as i64, fore.height as i64);
    let mut labels = vec![0u32; fore.depth.len()];
    let mut uf = UnionFind::new();

    // Backward neighbors only: W and N for 4-adjacency, plus NW and NE for 8.
    let offsets: &[(i64, i64)] = if adjacency == 4 {
        &[(-1, 0), (0, -1)]
    } else {
        &[(-1, 0), (-1, -1), (0, -1), (1, -1)]
    };

    for y in 0..h {
        for x in 0..w {
            let idx = (y * w + x) as usize;
            let d = fore.depth[idx];
            if d == 0 {
                continue;
            }
            let mut assigned = 0u32;
            for &(dx, dy) in offsets {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                let nidx = (ny * w + nx) as usize;
                let nlabel = labels[nidx];
                if nlabel == 0 {
                    continue;
                }
                let nd = fore.depth[nidx];
                if (d as f64 - nd as f64).abs() <= th_depth {
                    if assigned == 0 {
                        assigned = nlabel;
                    } else {
                        uf.union(assigned, nlabel);
                    }
                }
            }
            labels[idx] = if assigned == 0 { uf.make() } else { assigned };
        }
    }

    // Second pass: resolve roots and gather pixels per component.
    let mut by_root: BTreeMap<u32, Vec<(u32, u32)>> = BTreeMap::new();
    for y in 0..h {
        for x in 0..w {
            let idx = (y * w + x) as usize;
            if labels[idx] != 0 {
                let root = uf.find(labels[idx]);
                by_root.entry(root).or_default().push((x as u32, y as u32));
            }
        }
    }

    by_root
        .into_values()
        .filter(|pixels| pixels.len() >= min_area)
        .enumerate()
        .map(|(i, pixels)| Blob::from_pixels(i as u32 + 1, pixels, fore))
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum GrowLabel {
    NotLabeled,
    InNQueue,
    InQueue,
    Labeled,
}

/// Grow a single region from `seeds` over the depth map.
///
/// Candidate neighbors pass through a FIFO (NHQ) where their depth deviation
/// from the running region mean is measured; candidates within `delta_thold`
/// are bucketed in a queue map keyed by the integer deviation, and the
/// lowest-deviation bucket is flushed wholesale into the region. The region
/// mean updates incrementally after each bucket flush, so pixels rejected
/// early can be revisited later once the mean has drifted toward them.
pub fn region_growing(
    depth: &DepthFrame,
    seeds: &[(u32, u32)],
    delta_thold: f64,
) -> Result<Blob> {
    if seeds.is_empty() {
        return Err(Error::Invalid("region growing needs at least one seed".into()));
    }
    let (w, h) = (depth.width as i64, depth.height as i64);
    for &(x, y) in seeds {
        if x >= depth.width || y >= depth.height {
            return Err(Error::Invalid(format!("seed ({x},{y}) out of bounds")));
        }
        if depth.at(x, y) == 0 {
            return Err(Error::Invalid(format!("seed ({x},{y}) is on an unmeasured pixel")));
        }
    }

    let mut labels = vec![GrowLabel::NotLabeled; depth.depth.len()];
    let idx = |x: u32, y: u32| (y * depth.width + x) as usize;

    let mut region: Vec<(u32, u32)> = Vec::new();
    let mut sum = 0.0f64;
    for &(x, y) in seeds {
        if labels[idx(x, y)] == GrowLabel::Labeled {
            continue;
        }
        labels[idx(x, y)] = GrowLabel::Labeled;
        region.push((x, y));
        sum += depth.at(x, y) as f64;
    }
    let mut mean = sum / region.len() as f64;

    let neighbors = |x: u32, y: u32| {
        let mut out = Vec::with_capacity(8);
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx >= 0 && ny >= 0 && nx < w && ny < h {
                    out.push((nx as u32, ny as u32));
                }
            }
        }
        out
    };

    let mut nhq: VecDeque<(u32, u32)> = VecDeque::new();
    for &(x, y) in &region.clone() {
        for (nx, ny) in neighbors(x, y) {
            let i = idx(nx, ny);
            if labels[i] == GrowLabel::NotLabeled && depth.at(nx, ny) != 0 {
                labels[i] = GrowLabel::InNQueue;
                nhq.push_back((nx, ny));
            }
        }
    }

    let mut qm: BTreeMap<u64, VecDeque<(u32, u32)>> = BTreeMap::new();
    loop {
        // Classify every pending neighbor against the current region mean.
        while let Some((x, y)) = nhq.pop_front() {
            let i = idx(x, y);
            if labels[i] != GrowLabel::InNQueue {
                continue;
            }
            let delta = (depth.at(x, y) as f64 - mean).abs();
            if delta <= delta_thold {
                labels[i] = GrowLabel::InQueue;
                qm.entry(delta.floor() as u64).or_default().push_back((x, y));
            } else {
                // Rejected for now; may re-enter via another neighbor later.
                labels[i] = GrowLabel::NotLabeled;
            }
        }

        // Flush the closest bucket wholesale.
        let Some((&key, _)) = qm.iter().next() else { break };
        let bucket = qm.remove(&key).unwrap();
        let mut flushed = 0usize;
        for (x, y) in bucket {
            let i = idx(x, y);
            if labels[i] != GrowLabel::InQueue {
                continue;
            }
            labels[i] = GrowLabel::Labeled;
            region.push((x, y));
            sum += depth.at(x, y) as f64;
            flushed += 1;
            for (nx, ny) in neighbors(x, y) {
                let ni = idx(nx, ny);
                if labels[ni] == GrowLabel::NotLabeled && depth.at(nx, ny) != 0 {
                    labels[ni] = GrowLabel::InNQueue;
                    nhq.push_back((nx, ny));
                }
            }
        }
        if flushed > 0 {
            mean = sum / region.len() as f64;
        }
        if nhq.is_empty() && qm.is_empty() {
            break;
        }
    }

    Ok(Blob::from_pixels(1, region, depth))
}

/// Pick the blob most similar to the previous person blob.
///
/// Similarity is the product of bounding-box overlap (intersection over
/// union) and mean-depth closeness — cheap, and robust enough for a single
/// tracked person; the metric is deliberately replaceable. Without a
/// previous blob the largest one wins. `scene_changed` is raised when more
/// than one blob is present or the selected area jumped by more than
/// `area_jump` relative to the previous frame.
pub fn select_person_blob(
    blobs: &[Blob],
    prev: Option<&Blob>,
    area_jump: f64,
) -> (Option<Blob>, bool) {
    if blobs.is_empty() {
        return (None, false);
    }
    let selected = match prev {
        None => blobs.iter().max_by_key(|b| b.area).unwrap(),
        Some(prev) => {
            let similarity = |b: &Blob| {
                let inter = b.bbox.overlap(&prev.bbox) as f64;
                let union = (b.bbox.area() + prev.bbox.area()) as f64 - inter;
                let overlap = if union > 0.0 { inter / union } else { 0.0 };
                let depth_closeness = (-(b.mean_depth - prev.mean_depth).abs() / 500.0).exp();
                overlap * depth_closeness
            };
            let best = blobs
                .iter()
                .max_by(|a, b| similarity(a).partial_cmp(&similarity(b)).unwrap())
                .unwrap();
            if similarity(best) > 0.0 {
                best
            } else {
                blobs.iter().max_by_key(|b| b.area).unwrap()
            }
        }
    };
    let mut scene_changed = blobs.len() > 1;
    if let Some(prev) = prev {
        if selected.area as f64 / prev.area as f64 > area_jump {
            scene_changed = true;
        }
    }
    (Some(selected.clone()), scene_changed)
}

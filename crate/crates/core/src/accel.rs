//! Accelerometer stream analysis: magnitude, threshold crossings and
//! activity/inactivity gating.

use crate::dataio::AccelSample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// SVtotal crossed above the upper fall threshold (impact hypothesis).
    UftExceeded,
    /// SVtotal crossed below the lower fall threshold (free-fall hypothesis).
    LftUndershot,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelEvent {
    pub t_ms: i64,
    pub kind: EventKind,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activity {
    Moving,
    Idle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivityState {
    pub state: Activity,
    /// Timestamp since which the current state has held.
    pub since_ms: i64,
}

/// Total acceleration magnitude in g-units: sqrt(ax^2 + ay^2 + az^2).
///
/// 1 g at rest, approximately 0 g in free fall.
pub fn sv_total(ax: f64, ay: f64, az: f64) -> f64 {
    (ax * ax + ay * ay + az * az).sqrt()
}

/// Edge-triggered threshold events: one `UftExceeded` per upward crossing of
/// `uft`, one `LftUndershot` per downward crossing of `lft`. Level-triggered
/// repeats are deliberately not emitted — one alarm hypothesis per impact.
pub fn threshold_events(stream: &[AccelSample], uft: f64, lft: f64) -> Vec<AccelEvent> {
    let mut events = Vec::new();
    for pair in stream.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        if prev.sv_total <= uft && cur.sv_total > uft {
            events.push(AccelEvent {
                t_ms: cur.t_ms,
                kind: EventKind::UftExceeded,
                value: cur.sv_total,
            });
        }
        if prev.sv_total >= lft && cur.sv_total < lft {
            events.push(AccelEvent {
                t_ms: cur.t_ms,
                kind: EventKind::LftUndershot,
                value: cur.sv_total,
            });
        }
    }
    events
}

/// Activity classification over a trailing window: `Idle` iff every sample in
/// the last `hold_ms` keeps |SVtotal - 1| <= eps, else `Moving`.
pub fn activity_state(window: &[AccelSample], eps: f64, hold_ms: i64) -> Result<ActivityState> {
    let last = window
        .last()
        .ok_or_else(|| Error::InsufficientData("empty accelerometer window".into()))?;
    let first = &window[0];
    if last.t_ms - first.t_ms < hold_ms {
        return Err(Error::InsufficientData(format!(
            "window spans {} ms, need {} ms",
            last.t_ms - first.t_ms,
            hold_ms
        )));
    }
    let cutoff = last.t_ms - hold_ms;
    let at_rest = |s: &AccelSample| (s.sv_total - 1.0).abs() <= eps;

    let idle = window.iter().filter(|s| s.t_ms >= cutoff).all(at_rest);
    if idle {
        // Idle since the start of the trailing at-rest run.
        let mut since = last.t_ms;
        for s in window.iter().rev() {
            if at_rest(s) {
                since = s.t_ms;
            } else {
                break;
            }
        }
        Ok(ActivityState { state: Activity::Idle, since_ms: since })
    } else {
        // Moving since the most recent deviation.
        let since = window
            .iter()
            .rev()
            .find(|s| !at_rest(s))
            .map(|s| s.t_ms)
            .unwrap_or(first.t_ms);
        Ok(ActivityState { state: Activity::Moving, since_ms: since })
    }
}

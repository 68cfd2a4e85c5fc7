//! One-dimensional fuzzy c-means clustering and shoulder/triangle membership
//! fitting from cluster centres.

use crate::error::{Error, Result};
use crate::fuzzy::mf::Mf;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fuzzy c-means on scalar data. Returns cluster centres in ascending order
/// and the membership matrix `u[sample][cluster]` (rows sum to 1).
pub fn fcm_1d(
    data: &[f64],
    c: usize,
    m: f64,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if c == 0 || data.len() < c {
        return Err(Error::InsufficientData(format!(
            "need at least {c} samples for {c} clusters, got {}",
            data.len()
        )));
    }
    if m <= 1.0 {
        return Err(Error::Invalid("fuzzifier m must exceed 1".into()));
    }
    let (lo, hi) = data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers: Vec<f64> = if lo == hi {
        vec![lo; c]
    } else {
        (0..c).map(|_| rng.gen_range(lo..hi)).collect()
    };
    centers.sort_by(f64::total_cmp);

    let exp = 2.0 / (m - 1.0);
    let mut u = vec![vec![0.0; c]; data.len()];
    for _ in 0..max_iter {
        // Membership update.
        for (i, &x) in data.iter().enumerate() {
            if let Some(k0) = centers.iter().position(|&ck| x == ck) {
                for (k, uik) in u[i].iter_mut().enumerate() {
                    *uik = (k == k0) as u8 as f64;
                }
                continue;
            }
            let mut total = 0.0;
            for k in 0..c {
                let mut inv = 0.0;
                let dk = (x - centers[k]).abs();
                for cj in &centers {
                    inv += (dk / (x - cj).abs()).powf(exp);
                }
                u[i][k] = 1.0 / inv;
                total += u[i][k];
            }
            for uik in &mut u[i] {
                *uik /= total;
            }
        }
        // Centre update.
        let mut shift = 0.0f64;
        for k in 0..c {
            let mut num = 0.0;
            let mut den = 0.0;
            for (i, &x) in data.iter().enumerate() {
                let w = u[i][k].powf(m);
                num += w * x;
                den += w;
            }
            if den > 0.0 {
                let nc = num / den;
                shift = shift.max((nc - centers[k]).abs());
                centers[k] = nc;
            }
        }
        centers.sort_by(f64::total_cmp);
        if shift < tol {
            break;
        }
    }

    // Final membership pass against the converged, sorted centres.
    for (i, &x) in data.iter().enumerate() {
        if let Some(k0) = centers.iter().position(|&ck| x == ck) {
            for (k, uik) in u[i].iter_mut().enumerate() {
                *uik = (k == k0) as u8 as f64;
            }
            continue;
        }
        let mut total = 0.0;
        for k in 0..c {
            let mut inv = 0.0;
            let dk = (x - centers[k]).abs();
            for cj in &centers {
                inv += (dk / (x - cj).abs()).powf(exp);
            }
            u[i][k] = 1.0 / inv;
            total += u[i][k];
        }
        for uik in &mut u[i] {
            *uik /= total;
        }
    }
    Ok((centers, u))
}

/// Fit a Lo/Me/Hi term triple from data: cluster into three centres
/// `c0 < c1 < c2` and build `Lo = l(c0, c1)`, `Me = tri(c0, c1, c2)`,
/// `Hi = gamma(c1, c2)`.
pub fn fit_three_terms(data: &[f64], seed: u64) -> Result<[(String, Mf); 3]> {
    let (centers, _) = fcm_1d(data, 3, 2.0, 200, 1e-8, seed)?;
    let (c0, c1, c2) = (centers[0], centers[1], centers[2]);
    if c0 >= c1 || c1 >= c2 {
        return Err(Error::FitFailure("cluster centres collapsed".into()));
    }
    Ok([
        ("Lo".into(), Mf::L { a: c0, b: c1 }),
        ("Me".into(), Mf::Tri { a: c0, b: c1, c: c2 }),
        ("Hi".into(), Mf::Gamma { a: c1, b: c2 }),
    ])
}

//! Arrival-time detection of the decoherence front and a linear speed fit.

use serde::Serialize;

use crate::error::{Error, Result};

/// Fraction of the per-cell peak deviation that marks the arrival of the front.
pub const DEFAULT_THRESHOLD: f64 = 0.1;

/// Local density histories on a uniform time grid.
#[derive(Debug, Clone)]
pub struct DensityHistory {
    pub times: Vec<f64>,
    /// Distance of each tracked cell from the measured cell.
    pub distances: Vec<f64>,
    /// `densities[i][k]` is `ρ(r_i, r_i, t_k)`.
    pub densities: Vec<Vec<f64>>,
    /// Unperturbed density of each tracked cell.
    pub baseline: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Arrival {
    pub distance: f64,
    pub time: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrontFit {
    pub speed: f64,
    pub intercept: f64,
    /// Root-mean-square residual of `r − (speed·t* + intercept)`.
    pub residual: f64,
    pub arrivals: Vec<Arrival>,
}

/// Fits `r = speed · t*(r) + b`, where `t*(r)` is the first time the deviation
/// `|ρ(r, r, t) − baseline(r)|` exceeds `threshold` times its maximum over time.
///
/// Arrival times must be non-decreasing with distance.
pub fn front_speed_estimate(history: &DensityHistory, threshold: f64) -> Result<FrontFit> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::param("threshold", format!("must lie in (0, 1), got {threshold}")));
    }
    let nt = history.times.len();
    if history.densities.len() != history.distances.len() || history.baseline.len() != history.distances.len() {
        return Err(Error::param("history", "distances, densities and baseline differ in length"));
    }
    if history.densities.iter().any(|row| row.len() != nt) {
        return Err(Error::param("history", "every density row must span the time grid"));
    }
    if nt >= 3 {
        let dt = history.times[1] - history.times[0];
        let uniform = history
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(1.0));
        if !(dt > 0.0 && uniform) {
            return Err(Error::param("times", "time grid must be uniform and increasing"));
        }
    }

    let mut arrivals = Vec::new();
    for ((row, &r), &base) in history.densities.iter().zip(&history.distances).zip(&history.baseline) {
        let dev: Vec<f64> = row.iter().map(|x| (x - base).abs()).collect();
        let peak = dev.iter().cloned().fold(0.0, f64::max);
        if peak <= 0.0 {
            continue;
        }
        if let Some(k) = dev.iter().position(|&d| d > threshold * peak) {
            arrivals.push(Arrival {
                distance: r,
                time: history.times[k],
            });
        }
    }
    if arrivals.len() < 3 {
        return Err(Error::InsufficientFront(format!(
            "{} front crossings found, need at least 3",
            arrivals.len()
        )));
    }
    arrivals.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    if let Some(w) = arrivals.windows(2).find(|w| w[1].time < w[0].time) {
        return Err(Error::InsufficientFront(format!(
            "arrival times not monotone in distance: r = {} at t = {}, r = {} at t = {}",
            w[0].distance, w[0].time, w[1].distance, w[1].time
        )));
    }

    let (slope, intercept) = least_squares(&arrivals)?;
    let residual = (arrivals
        .iter()
        .map(|a| (a.distance - slope * a.time - intercept).powi(2))
        .sum::<f64>()
        / arrivals.len() as f64)
        .sqrt();
    Ok(FrontFit {
        speed: slope,
        intercept,
        residual,
        arrivals,
    })
}

fn least_squares(points: &[Arrival]) -> Result<(f64, f64)> {
    let n = points.len() as f64;
    let mt = points.iter().map(|a| a.time).sum::<f64>() / n;
    let mr = points.iter().map(|a| a.distance).sum::<f64>() / n;
    let stt: f64 = points.iter().map(|a| (a.time - mt).powi(2)).sum();
    if stt == 0.0 {
        return Err(Error::InsufficientFront("all arrivals at the same time".into()));
    }
    let str_: f64 = points.iter().map(|a| (a.time - mt) * (a.distance - mr)).sum();
    let slope = str_ / stt;
    Ok((slope, mr - slope * mt))
}

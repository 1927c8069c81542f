//! Small curve utilities for emission-probability and infidelity series.

/// Least-squares slope of `ln y` against `ln x`. Points with a nonpositive
/// coordinate are skipped; `None` if fewer than two remain.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Indices of strict interior local maxima (`y[i-1] < y[i] >= y[i+1]`).
pub fn local_maxima(ys: &[f64]) -> Vec<usize> {
    (1..ys.len().saturating_sub(1))
        .filter(|&i| ys[i] > ys[i - 1] && ys[i] >= ys[i + 1])
        .collect()
}

/// Mean spacing between consecutive peaks, in units of the sample index.
pub fn mean_peak_spacing(ys: &[f64]) -> Option<f64> {
    let peaks = local_maxima(ys);
    match (peaks.first(), peaks.last()) {
        (Some(&first), Some(&last)) if peaks.len() >= 2 => {
            Some((last - first) as f64 / (peaks.len() - 1) as f64)
        }
        _ => None,
    }
}

/// `max - min` over a window.
pub fn peak_to_trough(ys: &[f64]) -> f64 {
    let max = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ys.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

//! Summary statistics for comparing hit distributions between engines.

use vmc_apps::Hit;

/// Mean of a per-hit observable with a standard error that treats events, not hits, as
/// the independent units (hits of one track are correlated).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// Hit-level standard deviation.
    pub sd: f64,
    /// Event-clustered standard error of `mean`.
    pub se: f64,
}

/// Estimates the mean of `value(hit)` over all hits.
///
/// `events` is the number of events run, including those without hits. The standard
/// error is the ratio-estimator (delta method) form
/// `se² = N/(N−1) · Σₑ (Sₑ − m·nₑ)² / (Σₑ nₑ)²`, with `Sₑ` the sum and `nₑ` the count of
/// hits in event `e`.
pub fn clustered_mean(hits: &[Hit], events: u64, value: impl Fn(&Hit) -> f64) -> Option<Estimate> {
    if hits.is_empty() {
        return None;
    }
    let n = hits.len() as f64;
    let mean = hits.iter().map(&value).sum::<f64>() / n;
    let var = if hits.len() > 1 {
        hits.iter().map(|h| (value(h) - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };

    let mut residuals = Vec::new();
    let mut current: Option<(u64, f64)> = None;
    for h in hits {
        let r = value(h) - mean;
        match &mut current {
            Some((event, acc)) if *event == h.event => *acc += r,
            _ => {
                if let Some((_, acc)) = current.take() {
                    residuals.push(acc);
                }
                current = Some((h.event, r));
            }
        }
    }
    if let Some((_, acc)) = current {
        residuals.push(acc);
    }
    let clusters = events.max(residuals.len() as u64) as f64;
    let se = if clusters > 1.0 {
        (clusters / (clusters - 1.0) * residuals.iter().map(|r| r * r).sum::<f64>()).sqrt() / n
    } else {
        0.0
    };
    Some(Estimate {
        mean,
        sd: var.sqrt(),
        se,
    })
}

/// `|Δmean| / sqrt(se_a² + se_b²)`; zero when the means agree exactly.
pub fn standardized_difference(a: &Estimate, b: &Estimate) -> f64 {
    let diff = (a.mean - b.mean).abs();
    if diff == 0.0 {
        return 0.0;
    }
    diff / (a.se * a.se + b.se * b.se).sqrt()
}

/// `|a − b| / max(|a|, |b|)`; zero when both vanish.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

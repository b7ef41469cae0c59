//! The doubling-ladder classifier shared by the divergence conditions and
//! the Lehto-type checks: a numeric proxy for "this integral is infinite".

/// Outcome of a divergence probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Divergent,
    Convergent,
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Divergent => "divergent",
            Verdict::Convergent => "convergent",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn is_decisive(self) -> bool {
        self != Verdict::Inconclusive
    }
}

/// Thresholds of the ladder classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderParams {
    /// Number of doublings after the first rung.
    pub k_max: usize,
    /// Trailing window of increments that is inspected.
    pub window: usize,
    pub eps_div: f64,
    pub eps_conv: f64,
    /// Increment ratio separating geometric decay from stagnation.
    pub q_geo: f64,
}

impl Default for LadderParams {
    fn default() -> Self {
        LadderParams { k_max: 40, window: 5, eps_div: 1e-3, eps_conv: 1e-6, q_geo: 0.9 }
    }
}

/// Classify a sequence of cumulative truncated integrals, one per rung.
///
/// Divergent when the last `window` increments all stay `≥ eps_div` and
/// no increment ratio drops to `q_geo`; Convergent when the increments
/// decay geometrically to `≤ eps_conv` or all stay `≤ eps_conv`;
/// Inconclusive otherwise. Any infinite value is Divergent.
pub fn classify_cumulative(values: &[f64], params: &LadderParams) -> Verdict {
    if values.contains(&f64::INFINITY) {
        return Verdict::Divergent;
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Verdict::Inconclusive;
    }
    let m = params.window.max(1);
    if values.len() < m + 1 {
        return Verdict::Inconclusive;
    }
    let tail = &values[values.len() - m - 1..];
    let mut inc = [0.0f64; 64];
    let m = m.min(inc.len());
    for k in 0..m {
        inc[k] = (tail[k + 1] - tail[k]).abs();
    }
    let inc = &inc[..m];
    let ratio = |k: usize| {
        if inc[k] == 0.0 {
            if inc[k + 1] == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            inc[k + 1] / inc[k]
        }
    };
    let all_small = inc.iter().all(|d| *d <= params.eps_conv);
    if all_small {
        return Verdict::Convergent;
    }
    let geometric = (0..m - 1).all(|k| ratio(k) <= params.q_geo);
    if geometric && inc[m - 1] <= params.eps_conv {
        return Verdict::Convergent;
    }
    let large = inc.iter().all(|d| *d >= params.eps_div);
    let stagnant = (0..m - 1).all(|k| ratio(k) > params.q_geo);
    if large && stagnant {
        return Verdict::Divergent;
    }
    Verdict::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn cumulative(inc: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut acc = 0.0;
        (0..=40)
            .map(|k| {
                acc += inc(k);
                acc
            })
            .collect()
    }

    #[test]
    fn constant_increments_diverge() {
        let p = LadderParams::default();
        assert_eq!(classify_cumulative(&cumulative(|_| 0.69), &p), Verdict::Divergent);
        // harmonic-like decay still diverges
        assert_eq!(classify_cumulative(&cumulative(|k| 1.0 / (k + 1) as f64), &p), Verdict::Divergent);
    }

    #[test]
    fn geometric_decay_converges() {
        let p = LadderParams::default();
        let v = cumulative(|k| crate::real::powf(0.5, k as f64));
        assert_eq!(classify_cumulative(&v, &p), Verdict::Convergent);
        assert_eq!(classify_cumulative(&cumulative(|_| 0.0), &p), Verdict::Convergent);
    }

    #[test]
    fn slow_decay_is_inconclusive() {
        let p = LadderParams::default();
        let v = cumulative(|k| 1e-2 / ((k + 1) * (k + 1)) as f64);
        assert_eq!(classify_cumulative(&v, &p), Verdict::Inconclusive);
    }

    #[test]
    fn infinity_is_divergent() {
        let p = LadderParams::default();
        assert_eq!(classify_cumulative(&[0.0, 1.0, f64::INFINITY], &p), Verdict::Divergent);
    }
}

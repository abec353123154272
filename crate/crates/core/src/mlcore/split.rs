use crate::num::Scalar;

use super::Dataset;

/// A chosen split: samples with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split<T> {
    pub feature: usize,
    pub threshold: T,
    /// Weighted variance decrease `I(node) - n_L/n I(L) - n_R/n I(R)`.
    pub decrease: T,
}

/// Exhaustive variance-reduction search over `candidates` (ascending
/// feature indices) for the samples in `samples`. Duplicate sample indices
/// count once per occurrence, which is how bootstrap weights enter.
///
/// Thresholds are midpoints between adjacent distinct values. The first
/// strictly-best candidate wins, so ties go to the lowest feature index and
/// then the lowest threshold. Returns `None` when nothing improves.
pub fn best_split<T: Scalar>(data: &Dataset<T>, samples: &[usize], candidates: &[usize]) -> Option<Split<T>> {
    let n = samples.len();
    if n < 2 {
        return None;
    }
    let y = data.target();
    let nt = T::from_count(n);

    // Centre targets on the node mean; exact for rationals, and keeps the
    // running sums small for floats.
    let mut mean = T::zero();
    for &s in samples {
        mean += y[s];
    }
    mean /= nt;

    let mut total = T::zero();
    let mut total_sq = T::zero();
    for &s in samples {
        let d = y[s] - mean;
        total += d;
        total_sq += d * d;
    }
    let sse_node = total_sq - total * total / nt;
    if sse_node <= T::zero() {
        return None;
    }
    let floor = T::noise_floor(sse_node / nt);

    let two = T::from_count(2);
    let mut best: Option<Split<T>> = None;
    let mut pairs: Vec<(T, T)> = Vec::with_capacity(n);
    for &feature in candidates {
        let col = data.column(feature);
        pairs.clear();
        pairs.extend(samples.iter().map(|&s| (col[s], y[s] - mean)));
        // stable: equal x keep sample order
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("feature values are comparable"));

        let mut left = T::zero();
        let mut left_sq = T::zero();
        for i in 0..n - 1 {
            let (x, d) = pairs[i];
            left += d;
            left_sq += d * d;
            let next = pairs[i + 1].0;
            if x.partial_cmp(&next) != Some(std::cmp::Ordering::Less) {
                continue;
            }
            let nl = T::from_count(i + 1);
            let nr = T::from_count(n - i - 1);
            let right = total - left;
            let right_sq = total_sq - left_sq;
            let sse_l = left_sq - left * left / nl;
            let sse_r = right_sq - right * right / nr;
            let decrease = (sse_node - sse_l - sse_r) / nt;
            if decrease <= floor {
                continue;
            }
            if best.is_none_or(|b| decrease > b.decrease) {
                best = Some(Split { feature, threshold: (x + next) / two, decrease });
            }
        }
    }
    best
}

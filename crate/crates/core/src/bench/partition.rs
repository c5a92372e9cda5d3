use serde::{Deserialize, Serialize};

use super::variation::ComparatorSequence;
use crate::{OcoError, Result};

/// Inclusive, 1-based round range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bin {
    pub start: usize,
    pub end: usize,
}

impl Bin {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }
}

/// Contiguous, disjoint bins covering `1..=T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub bins: Vec<Bin>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Path variation accumulated inside each bin.
    pub fn bin_variations(&self, z: &ComparatorSequence) -> Vec<f64> {
        // steps[t - 2] = |z_t - z_{t-1}|
        let steps = z.steps();
        self.bins
            .iter()
            .map(|b| (b.start + 1..=b.end).map(|t| steps[t - 2]).sum())
            .collect()
    }
}

/// Greedy partition: starting a bin at `s`, scan `t = s, s+1, ...` and close
/// `[s, t-1]` as soon as the variation from `s` to `t` reaches `threshold`,
/// restarting at `t`. The open bin `[s, T]` is appended at the end.
///
/// Every bin has internal variation strictly below `threshold`, and
/// `(bins - 1) * threshold <= V_T`.
pub fn partition_by_variation(z: &ComparatorSequence, threshold: f64) -> Result<Partition> {
    if !(threshold > 0.0) {
        return Err(OcoError::config(format!("variation threshold must be positive, got {threshold}")));
    }
    let horizon = z.len();
    if horizon == 0 {
        return Ok(Partition { bins: Vec::new() });
    }
    let steps = z.steps();
    let mut bins = Vec::new();
    let mut start = 1;
    let mut running = 0.0;
    for t in 1..=horizon {
        if t > start {
            running += steps[t - 2];
        }
        if running >= threshold {
            bins.push(Bin { start, end: t - 1 });
            start = t;
            running = 0.0;
        }
    }
    bins.push(Bin { start, end: horizon });
    Ok(Partition { bins })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Vector;

    fn seq(xs: &[f64]) -> ComparatorSequence {
        ComparatorSequence::from_points(xs.iter().map(|x| Vector::from_element(1, *x)).collect()).unwrap()
    }

    #[test]
    fn constant_sequence_is_one_bin() {
        let p = partition_by_variation(&seq(&[0.5; 9]), 0.1).unwrap();
        assert_eq!(p.bins, vec![Bin { start: 1, end: 9 }]);
    }

    #[test]
    fn hand_traced_example() {
        let p = partition_by_variation(&seq(&[0.0, 0.4, 0.8, 1.2]), 1.0).unwrap();
        assert_eq!(p.bins, vec![Bin { start: 1, end: 3 }, Bin { start: 4, end: 4 }]);
    }

    #[test]
    fn large_single_steps_make_singleton_bins() {
        let p = partition_by_variation(&seq(&[0.0, 5.0, 10.0]), 1.0).unwrap();
        assert_eq!(
            p.bins,
            vec![Bin { start: 1, end: 1 }, Bin { start: 2, end: 2 }, Bin { start: 3, end: 3 }]
        );
    }

    #[test]
    fn rejects_nonpositive_threshold() {
        assert!(partition_by_variation(&seq(&[0.0, 1.0]), 0.0).is_err());
        assert!(partition_by_variation(&seq(&[0.0, 1.0]), -1.0).is_err());
    }
}

//! Summary statistics of a single composition as one serializable record.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::composition::Composition;

/// Smallest square side reported in [`StatsReport::square_counts`].
pub const MIN_SQUARE_SIDE: u64 = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsReport {
    pub n: usize,
    pub size: u64,
    pub components: usize,
    pub gaps: usize,
    pub cmax: usize,
    pub cmin: usize,
    pub gmax: usize,
    pub gmin: usize,
    pub tmax: u64,
    pub tmin: u64,
    pub largest_square: u64,
    /// Side `k` to the number of `k`-squares, for `k >= 2`.
    pub square_counts: BTreeMap<u64, u64>,
    pub longest_increasing_run: usize,
    pub is_carlitz: bool,
    pub max_multiplicity: usize,
}

impl StatsReport {
    pub fn new(c: &Composition) -> Self {
        let ex = analysis::extremes(c);
        StatsReport {
            n: c.len(),
            size: c.size(),
            components: analysis::components(c).count(),
            gaps: analysis::gaps(c).count(),
            cmax: ex.cmax,
            cmin: ex.cmin,
            gmax: ex.gmax,
            gmin: ex.gmin,
            tmax: ex.tmax,
            tmin: ex.tmin,
            largest_square: analysis::largest_square(c),
            square_counts: analysis::square_counts(c, MIN_SQUARE_SIDE),
            longest_increasing_run: analysis::longest_increasing_run(c),
            is_carlitz: analysis::is_carlitz(c),
            max_multiplicity: analysis::max_multiplicity(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::figures::figure1;

    #[test]
    fn figure_one() {
        let r = StatsReport::new(&figure1());
        assert_eq!((r.components, r.cmax, r.gaps, r.gmax, r.size, r.largest_square), (10, 7, 10, 4, 80, 4));
        assert_eq!(r.square_counts, BTreeMap::from([(2, 2), (4, 1)]));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"square_counts\":{\"2\":2,\"4\":1}"), "{json}");
    }

    #[test]
    fn small_inputs() {
        let r = StatsReport::new(&"0000".parse().unwrap());
        assert_eq!((r.components, r.gaps, r.gmax), (0, 1, 4));
        let r = StatsReport::new(&"5".parse().unwrap());
        assert_eq!((r.components, r.cmax, r.tmax), (1, 1, 5));
    }
}

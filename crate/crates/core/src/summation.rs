//! Compensated accumulation and the fixed-shape reduction used for every
//! sum over the unitary dual.
//!
//! Dual sums are split into chunks whose boundaries depend only on the group
//! and the cutoff, never on the thread count. Each chunk is accumulated
//! sequentially in canonical order; chunk results are merged left to right.
//! The outcome is therefore bit-identical for any number of worker threads.

use rayon::prelude::*;

use crate::groups::{DualChunk, DualElement, GroupModel};

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub const ZERO: CompensatedSum = CompensatedSum { sum: 0.0, comp: 0.0 };

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::ZERO;
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `K` compensated accumulators per bin.
pub(crate) type Bins<const K: usize> = Vec<[CompensatedSum; K]>;

fn bin_of(bounds: &[f64], weight: f64) -> usize {
    bounds.partition_point(|&b| b < weight)
}

/// Accumulates `term(ξ)` over every dual element with `lo < ⟨ξ⟩ ≤ bounds.last()`,
/// binned into the first bound that contains ⟨ξ⟩. `lo = None` starts at the
/// trivial representation.
pub(crate) fn binned_dual_sums<const K: usize, F>(
    group: &GroupModel,
    lo: Option<f64>,
    bounds: &[f64],
    term: F,
) -> Bins<K>
where
    F: Fn(&DualElement) -> [f64; K] + Sync,
{
    let nbins = bounds.len();
    let Some(&hi) = bounds.last() else {
        return Vec::new();
    };
    let chunks: Vec<DualChunk> = group.dual_chunks(hi);
    let partials: Vec<Bins<K>> = chunks
        .par_iter()
        .map(|chunk| {
            let mut bins = vec![[CompensatedSum::ZERO; K]; nbins];
            group.visit_chunk(chunk, lo, hi, |xi| {
                let b = bin_of(bounds, xi.weight);
                let vals = term(xi);
                for (acc, v) in bins[b].iter_mut().zip(vals) {
                    acc.add(v);
                }
            });
            bins
        })
        .collect();

    let mut total = vec![[CompensatedSum::ZERO; K]; nbins];
    for part in &partials {
        for (dst, src) in total.iter_mut().zip(part) {
            for (d, s) in dst.iter_mut().zip(src) {
                d.merge(s);
            }
        }
    }
    total
}

/// Running totals of binned sums, one row per bin.
pub(crate) fn cumulative<const K: usize>(bins: &Bins<K>) -> Vec<[f64; K]> {
    let mut running = [CompensatedSum::ZERO; K];
    bins.iter()
        .map(|row| {
            let mut out = [0.0; K];
            for k in 0..K {
                running[k].merge(&row[k]);
                out[k] = running[k].value();
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_low_bits() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        let acc: CompensatedSum = xs.iter().copied().collect();
        assert_eq!(acc.value(), 2.0);
        let naive: f64 = xs.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn merge_matches_sequential_on_exact_data() {
        let xs: Vec<f64> = (1..=1000).map(|k| 1.0 / k as f64).collect();
        let seq: CompensatedSum = xs.iter().copied().collect();
        let mut a: CompensatedSum = xs[..400].iter().copied().collect();
        let b: CompensatedSum = xs[400..].iter().copied().collect();
        a.merge(&b);
        assert!((a.value() - seq.value()).abs() <= 1e-15);
    }

    #[test]
    fn binning_uses_first_containing_bound() {
        let bounds = [2.0, 4.0, 8.0];
        assert_eq!(bin_of(&bounds, 1.0), 0);
        assert_eq!(bin_of(&bounds, 2.0), 0);
        assert_eq!(bin_of(&bounds, 2.5), 1);
        assert_eq!(bin_of(&bounds, 8.0), 2);
    }
}

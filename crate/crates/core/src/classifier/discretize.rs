use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscretizationMethod {
    #[default]
    EqualFrequency,
    EqualWidth,
}

/// Cut points mapping a numeric target onto class indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discretizer {
    pub method: DiscretizationMethod,
    /// Strictly increasing. A value `v` belongs to class
    /// `#{b in boundaries : v > b}`.
    pub boundaries: Vec<f64>,
    pub class_count: usize,
    /// Class sizes over the values used to fit.
    pub class_sizes: Vec<usize>,
    /// True when tied values forced sizes to differ by more than one.
    pub tie_adjusted: bool,
}

impl Discretizer {
    pub fn class_of(&self, v: f64) -> usize {
        self.boundaries.iter().filter(|&&b| v > b).count()
    }
}

fn distinct_counts(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut distinct: Vec<f64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for v in sorted {
        if distinct.last() == Some(&v) {
            *counts.last_mut().unwrap() += 1;
        } else {
            distinct.push(v);
            counts.push(1);
        }
    }
    (distinct, counts)
}

fn check(values: &[f64], class_count: usize, distinct: usize) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Discretization("no values to discretize".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Discretization("non-finite target value".into()));
    }
    if class_count < 2 {
        return Err(Error::Discretization(format!(
            "class count must be at least 2, got {class_count}"
        )));
    }
    if distinct < class_count {
        return Err(Error::Discretization(format!(
            "only {distinct} distinct values for {class_count} classes; use a class count of at most {distinct}"
        )));
    }
    Ok(())
}

/// Equal-frequency binning that never splits a run of tied values.
///
/// Cuts are placed between distinct values so that the sum of squared class
/// sizes is minimal (i.e. the sizes are as even as ties allow). Among
/// equally even placements the one with the earliest cuts wins.
pub fn discretize_equal_frequency(values: &[f64], class_count: usize) -> Result<Discretizer> {
    let (distinct, counts) = distinct_counts(values);
    check(values, class_count, distinct.len())?;
    let m = distinct.len();
    let k = class_count;
    let mut prefix = vec![0u64; m + 1];
    for j in 0..m {
        prefix[j + 1] = prefix[j] + counts[j] as u64;
    }
    let sq = |a: usize, b: usize| {
        let s = prefix[b] - prefix[a];
        s * s
    };

    // best[c][j]: minimal cost of splitting distinct values j.. into c classes.
    const INF: u64 = u64::MAX;
    let mut best = vec![vec![INF; m + 1]; k + 1];
    for j in 0..m {
        best[1][j] = sq(j, m);
    }
    for c in 2..=k {
        for j in 0..m {
            // Need at least c distinct values from j onwards.
            if m - j < c {
                continue;
            }
            let mut b = INF;
            for t in j + 1..=m - (c - 1) {
                if best[c - 1][t] == INF {
                    continue;
                }
                b = b.min(sq(j, t) + best[c - 1][t]);
            }
            best[c][j] = b;
        }
    }

    let mut cuts = Vec::with_capacity(k - 1);
    let mut j = 0;
    for c in (2..=k).rev() {
        let target = best[c][j];
        let t = (j + 1..=m - (c - 1))
            .find(|&t| best[c - 1][t] != INF && sq(j, t) + best[c - 1][t] == target)
            .expect("optimal continuation exists");
        cuts.push(t);
        j = t;
    }

    let boundaries: Vec<f64> = cuts
        .iter()
        .map(|&t| distinct[t - 1] + (distinct[t] - distinct[t - 1]) / 2.0)
        .collect();
    let mut sizes = Vec::with_capacity(k);
    let mut prev = 0;
    for &t in cuts.iter().chain(std::iter::once(&m)) {
        sizes.push((prefix[t] - prefix[prev]) as usize);
        prev = t;
    }
    let tie_adjusted = sizes.iter().max().unwrap() - sizes.iter().min().unwrap() > 1;
    Ok(Discretizer {
        method: DiscretizationMethod::EqualFrequency,
        boundaries,
        class_count: k,
        class_sizes: sizes,
        tie_adjusted,
    })
}

/// Equal-width binning over `[min, max]`. Classes may be empty.
pub fn discretize_equal_width(values: &[f64], class_count: usize) -> Result<Discretizer> {
    let (distinct, _) = distinct_counts(values);
    check(values, class_count, distinct.len())?;
    let lo = distinct[0];
    let hi = *distinct.last().unwrap();
    let width = (hi - lo) / class_count as f64;
    let boundaries: Vec<f64> = (1..class_count).map(|i| lo + width * i as f64).collect();
    if boundaries.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Discretization("value range too narrow for equal-width bins".into()));
    }
    let mut d = Discretizer {
        method: DiscretizationMethod::EqualWidth,
        boundaries,
        class_count,
        class_sizes: vec![0; class_count],
        tie_adjusted: false,
    };
    for &v in values {
        let c = d.class_of(v);
        d.class_sizes[c] += 1;
    }
    Ok(d)
}

pub fn discretize(
    values: &[f64],
    class_count: usize,
    method: DiscretizationMethod,
) -> Result<Discretizer> {
    match method {
        DiscretizationMethod::EqualFrequency => discretize_equal_frequency(values, class_count),
        DiscretizationMethod::EqualWidth => discretize_equal_width(values, class_count),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Enumerate every placement of `k - 1` cuts between distinct values and
    /// keep the one with the smallest size variance (earliest on ties).
    fn brute_force_sizes(values: &[f64], k: usize) -> Vec<usize> {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        // Positions in the sorted list where a cut does not split ties.
        let gaps: Vec<usize> = (1..sorted.len())
            .filter(|&i| sorted[i] != sorted[i - 1])
            .collect();
        let n = sorted.len() as f64;
        let mean = n / k as f64;
        let mut best: Option<(f64, Vec<usize>)> = None;
        let mut combo: Vec<usize> = (0..k - 1).collect();
        loop {
            let cuts: Vec<usize> = combo.iter().map(|&c| gaps[c]).collect();
            let mut sizes = Vec::new();
            let mut prev = 0;
            for &c in cuts.iter().chain(std::iter::once(&sorted.len())) {
                sizes.push(c - prev);
                prev = c;
            }
            let var: f64 = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum();
            let better = match &best {
                None => true,
                Some((bv, _)) => var < *bv - 1e-9,
            };
            if better {
                best = Some((var, sizes));
            }
            // next combination in lexicographic order
            let r = k - 1;
            let mut i = r;
            loop {
                if i == 0 {
                    return best.unwrap().1;
                }
                i -= 1;
                if combo[i] < gaps.len() - r + i {
                    combo[i] += 1;
                    for j in i + 1..r {
                        combo[j] = combo[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn one_to_eight() {
        let v: Vec<f64> = (1..=8).map(f64::from).collect();
        let d = discretize_equal_frequency(&v, 4).unwrap();
        assert_eq!(d.boundaries, vec![2.5, 4.5, 6.5]);
        assert_eq!(d.class_sizes, vec![2, 2, 2, 2]);
        assert!(!d.tie_adjusted);
        assert_eq!(d.class_of(1.0), 0);
        assert_eq!(d.class_of(8.0), 3);
    }

    #[test]
    fn tie_block_moves_first_boundary() {
        let v = [1.0, 1.0, 1.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let d = discretize_equal_frequency(&v, 4).unwrap();
        // Frozen from brute_force_sizes (see the property test below).
        assert_eq!(d.class_sizes, vec![4, 1, 1, 2]);
        assert_eq!(d.boundaries, vec![1.5, 2.5, 3.5]);
        assert!(d.tie_adjusted);
        assert_eq!(brute_force_sizes(&v, 4), vec![4, 1, 1, 2]);
    }

    #[test]
    fn too_few_distinct_values() {
        let err = discretize_equal_frequency(&[1.0, 1.0, 2.0], 4).unwrap_err();
        assert!(matches!(err, Error::Discretization(_)));
        assert!(err.to_string().contains("at most 2"));
    }

    #[test]
    fn bad_inputs() {
        assert!(discretize_equal_frequency(&[], 4).is_err());
        assert!(discretize_equal_frequency(&[1.0, 2.0], 1).is_err());
    }

    #[test]
    fn equal_width() {
        let v = [0.0, 1.0, 2.0, 3.0, 100.0];
        let d = discretize_equal_width(&v, 4).unwrap();
        assert_eq!(d.boundaries, vec![25.0, 50.0, 75.0]);
        assert_eq!(d.class_sizes, vec![4, 0, 0, 1]);
    }

    proptest! {
        #[test]
        fn matches_brute_force(values in prop::collection::vec(0u8..12, 4..14), k in 2usize..5) {
            let v: Vec<f64> = values.iter().map(|&x| f64::from(x)).collect();
            let distinct = { let mut d = v.clone(); d.sort_by(f64::total_cmp); d.dedup(); d.len() };
            prop_assume!(distinct >= k);
            let d = discretize_equal_frequency(&v, k).unwrap();
            prop_assert_eq!(d.class_sizes.clone(), brute_force_sizes(&v, k));
            prop_assert!(d.boundaries.windows(2).all(|w| w[0] < w[1]));
            let mut recount = vec![0; k];
            for &x in &v { recount[d.class_of(x)] += 1; }
            prop_assert_eq!(recount, d.class_sizes);
        }

        #[test]
        fn distinct_values_balance_within_one(n in 4usize..60, k in 2usize..5) {
            prop_assume!(n >= k);
            let v: Vec<f64> = (0..n).rev().map(|i| i as f64).collect();
            let d = discretize_equal_frequency(&v, k).unwrap();
            let max = *d.class_sizes.iter().max().unwrap();
            let min = *d.class_sizes.iter().min().unwrap();
            prop_assert!(max - min <= 1);
        }
    }
}

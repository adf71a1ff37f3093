//! Equal-width discretization.

use crate::types::Value;

/// True when every value is a non-negative integer representable as a
/// [`Value`].
pub fn is_discrete(values: &[f64]) -> bool {
    values
        .iter()
        .all(|&v| v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= Value::MAX as f64)
}

/// Bin index `floor((v - min) / width)` over the observed range, with the
/// top edge folded into the last bin. A constant column maps to bin 0.
pub fn equal_width(values: &[f64], bins: usize) -> Vec<Value> {
    let (min, max) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let width = (max - min) / bins as f64;
    if width.is_nan() || width <= 0.0 || !width.is_finite() {
        return vec![0; values.len()];
    }
    let top = (bins - 1) as Value;
    values
        .iter()
        .map(|&v| (((v - min) / width).floor() as Value).min(top))
        .collect()
}

/// Integer columns pass through; anything else is binned.
pub fn discretize(values: &[f64], bins: usize) -> Vec<Value> {
    if is_discrete(values) {
        values.iter().map(|&v| v as Value).collect()
    } else {
        equal_width(values, bins)
    }
}

/// Discretizes a sparse column given its explicit values and the number
/// of implicit zeros. Zero keeps symbol 0 so sparsity survives: the bin
/// holding 0.0 is relabelled to 0 and lower bins shift up by one.
pub fn discretize_sparse(values: &[f64], implicit_zeros: usize, bins: usize) -> Vec<Value> {
    if is_discrete(values) {
        return values.iter().map(|&v| v as Value).collect();
    }
    let mut all = Vec::with_capacity(values.len() + 1);
    all.extend_from_slice(values);
    if implicit_zeros > 0 || values.contains(&0.0) {
        all.push(0.0);
    }
    let binned = equal_width(&all, bins);
    let zero_bin = if all.len() > values.len() {
        binned[values.len()]
    } else {
        return binned;
    };
    binned[..values.len()]
        .iter()
        .map(|&b| match b.cmp(&zero_bin) {
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Less => b + 1,
            std::cmp::Ordering::Greater => b,
        })
        .collect()
}

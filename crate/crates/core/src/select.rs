//! Deterministic top-k selection. Ties are always broken by lowest index.

use std::cmp::Ordering;

fn by_key_desc(keys: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&a, &b| {
        keys[b]
            .partial_cmp(&keys[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    }
}

/// Indices of the `k` largest entries of `keys`, sorted ascending.
pub fn top_k_by_value(keys: &[f64], k: usize) -> Vec<usize> {
    let k = k.min(keys.len());
    if k == 0 {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    let cmp = by_key_desc(keys);
    if k < idx.len() {
        idx.select_nth_unstable_by(k - 1, &cmp);
        idx.truncate(k);
    }
    idx.sort_unstable();
    idx
}

/// Indices of the `k` largest magnitudes `|values[i]|`, sorted ascending.
pub fn top_k_by_magnitude(values: &[f64], k: usize) -> Vec<usize> {
    let mags: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    top_k_by_value(&mags, k)
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some(b) if values[b] >= v => {}
            _ => best = Some(i),
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn picks_largest_magnitudes() {
        assert_eq!(top_k_by_magnitude(&[0.1, -0.5, 0.3], 2), vec![1, 2]);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        assert_eq!(top_k_by_magnitude(&[0.0; 6], 3), vec![0, 1, 2]);
        assert_eq!(top_k_by_magnitude(&[1.0, -2.0, 2.0, 2.0], 2), vec![1, 2]);
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), Some(1));
        assert_eq!(argmax(&[]), None);
    }

    proptest! {
        #[test]
        fn agrees_with_full_sort(values in prop::collection::vec(-5i32..5, 1..40), k in 1usize..40) {
            let values: Vec<f64> = values.into_iter().map(f64::from).collect();
            let k = k.min(values.len());
            let mut order: Vec<usize> = (0..values.len()).collect();
            order.sort_by(|&a, &b| values[b].abs().partial_cmp(&values[a].abs()).unwrap().then(a.cmp(&b)));
            let mut expected = order[..k].to_vec();
            expected.sort_unstable();
            prop_assert_eq!(top_k_by_magnitude(&values, k), expected);
        }
    }
}

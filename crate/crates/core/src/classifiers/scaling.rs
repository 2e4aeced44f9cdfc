//! Per-feature min/max scaling of raw feature values into [-1, 1].

/// P = 2 (F - min) / (max - min) - 1, clamped; a degenerate feature with
/// max = min maps to 0.
pub fn scale_value(f: f64, min: f64, max: f64) -> f64 {
    if max == min {
        return 0.0;
    }
    (2.0 * (f - min) / (max - min) - 1.0).clamp(-1.0, 1.0)
}

pub fn scale_features(values: &[f64], min: &[f64], max: &[f64]) -> Vec<f64> {
    assert_eq!(values.len(), min.len());
    assert_eq!(values.len(), max.len());
    values
        .iter()
        .zip(min.iter().zip(max))
        .map(|(&v, (&lo, &hi))| scale_value(v, lo, hi))
        .collect()
}

/// Column-wise (min, max) bounds over a sample matrix.
pub fn learn_bounds(samples: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    assert!(!samples.is_empty());
    let dim = samples[0].len();
    let mut min = vec![f64::INFINITY; dim];
    let mut max = vec![f64::NEG_INFINITY; dim];
    for s in samples {
        assert_eq!(s.len(), dim);
        for (j, &v) in s.iter().enumerate() {
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    (min, max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn endpoints_and_midpoint() {
        assert_eq!(scale_value(2.0, 2.0, 10.0), -1.0);
        assert_eq!(scale_value(10.0, 2.0, 10.0), 1.0);
        assert_eq!(scale_value(6.0, 2.0, 10.0), 0.0);
    }

    #[test]
    fn out_of_range_clamps_and_degenerate_maps_to_zero() {
        assert_eq!(scale_value(-5.0, 0.0, 1.0), -1.0);
        assert_eq!(scale_value(7.0, 0.0, 1.0), 1.0);
        assert_eq!(scale_value(123.0, 4.0, 4.0), 0.0);
    }

    proptest! {
        #[test]
        fn always_in_range_and_monotone(f1 in -1e6..1e6f64, f2 in -1e6..1e6f64,
                                        lo in -1e6..1e6f64, span in 0.0..1e6f64) {
            let hi = lo + span;
            let a = scale_value(f1.min(f2), lo, hi);
            let b = scale_value(f1.max(f2), lo, hi);
            prop_assert!((-1.0..=1.0).contains(&a));
            prop_assert!((-1.0..=1.0).contains(&b));
            prop_assert!(a <= b);
        }
    }
}

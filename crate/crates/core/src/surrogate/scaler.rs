use serde::{Deserialize, Serialize};

/// Per-feature min-max scaler fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let n_features = rows.first().map_or(0, Vec::len);
        let mut min = vec![f64::INFINITY; n_features];
        let mut max = vec![f64::NEG_INFINITY; n_features];
        for r in rows {
            for (j, &v) in r.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Self { min, max }
    }

    pub fn n_features(&self) -> usize {
        self.min.len()
    }

    /// Map into `[0, 1]`, clamping values outside the training range.
    /// A degenerate feature (`max == min`) maps to 0.
    #[inline]
    pub fn transform_into(&self, x: &[f64], out: &mut [f64]) {
        for j in 0..self.min.len() {
            let span = self.max[j] - self.min[j];
            out[j] = if span > 0.0 {
                ((x[j] - self.min[j]) / span).clamp(0.0, 1.0)
            } else {
                0.0
            };
        }
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.min.len()];
        self.transform_into(x, &mut out);
        out
    }
}

/// Min-max normalization of a scalar regression target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetScaler {
    pub min: f64,
    pub max: f64,
}

impl TargetScaler {
    pub fn fit(y: &[f64]) -> Self {
        let (min, max) = y
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        Self { min, max }
    }

    pub fn span(&self) -> f64 {
        self.max - self.min
    }

    #[inline]
    pub fn normalize(&self, v: f64) -> f64 {
        let span = self.span();
        if span > 0.0 {
            (v - self.min) / span
        } else {
            0.0
        }
    }

    #[inline]
    pub fn denormalize(&self, v: f64) -> f64 {
        let span = self.span();
        if span > 0.0 {
            self.min + span * v
        } else {
            self.min
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_training_range_to_unit_interval() {
        let rows = vec![vec![1.0, 5.0, 2.0], vec![3.0, 5.0, 4.0], vec![2.0, 5.0, 3.0]];
        let s = MinMaxScaler::fit(&rows);
        assert_eq!(s.transform(&rows[0]), vec![0.0, 0.0, 0.0]);
        assert_eq!(s.transform(&rows[1]), vec![1.0, 0.0, 1.0]);
        assert_eq!(s.transform(&rows[2]), vec![0.5, 0.0, 0.5]);
        // out of range clamps
        assert_eq!(s.transform(&[10.0, 7.0, -3.0]), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn target_round_trip_and_degenerate() {
        let t = TargetScaler::fit(&[2.0, 6.0, 4.0]);
        assert_eq!(t.normalize(4.0), 0.5);
        assert_eq!(t.denormalize(0.5), 4.0);
        let z = TargetScaler::fit(&[0.0, 0.0]);
        assert_eq!(z.normalize(0.0), 0.0);
        assert_eq!(z.denormalize(0.37), 0.0);
    }
}

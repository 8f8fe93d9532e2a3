use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::Matrix;

/// Decision stump: `polarity` if `x[feature] > threshold`, else `-polarity`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    pub polarity: i8,
}

impl Stump {
    #[inline]
    pub fn predict(&self, row: &[f64]) -> f64 {
        let p = f64::from(self.polarity);
        if row[self.feature] > self.threshold {
            p
        } else {
            -p
        }
    }
}

/// Per-feature row orders, sorted ascending by value then row index.
pub(crate) fn sorted_orders(x: &Matrix) -> Vec<Vec<usize>> {
    (0..x.cols())
        .map(|j| {
            let mut idx: Vec<usize> = (0..x.rows()).collect();
            idx.sort_by(|&a, &b| x.get(a, j).total_cmp(&x.get(b, j)).then(a.cmp(&b)));
            idx
        })
        .collect()
}

/// Best stump under sample weights `w` for targets `y` in {-1, +1}.
///
/// Candidate thresholds are midpoints between distinct consecutive values,
/// plus one constant stump below every value. Ties go to the lowest
/// feature, then the lowest threshold, then polarity +1.
pub(crate) fn fit_stump(x: &Matrix, orders: &[Vec<usize>], y: &[f64], w: &[f64]) -> (Stump, f64) {
    let total_pos: f64 = y.iter().zip(w).filter(|(&t, _)| t > 0.0).map(|(_, &wi)| wi).sum();
    let total_neg: f64 = y.iter().zip(w).filter(|(&t, _)| t < 0.0).map(|(_, &wi)| wi).sum();

    let mut best = Stump {
        feature: 0,
        threshold: -f64::MAX,
        polarity: 1,
    };
    let mut best_err = f64::INFINITY;
    let mut consider = |err: f64, feature: usize, threshold: f64, polarity: i8| {
        if err < best_err {
            best_err = err;
            best = Stump {
                feature,
                threshold,
                polarity,
            };
        }
    };

    for (j, order) in orders.iter().enumerate() {
        // Everything above the threshold: polarity +1 misclassifies negatives.
        let mut err_pos = total_neg;
        consider(err_pos, j, -f64::MAX, 1);
        consider(total_pos, j, -f64::MAX, -1);
        for k in 0..order.len() {
            let i = order[k];
            if y[i] > 0.0 {
                err_pos += w[i];
            } else {
                err_pos -= w[i];
            }
            let Some(&next) = order.get(k + 1) else { break };
            let (a, b) = (x.get(i, j), x.get(next, j));
            if a == b {
                continue;
            }
            let thr = a + (b - a) / 2.0;
            let err_neg = (total_pos + total_neg) - err_pos;
            consider(err_pos, j, thr, 1);
            consider(err_neg, j, thr, -1);
        }
    }
    (best, best_err.max(0.0))
}

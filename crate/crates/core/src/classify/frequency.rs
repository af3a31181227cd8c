use std::collections::HashMap;

use ndarray::{ArrayView1, ArrayView2};

use super::{check_training, Classifier};
use crate::error::{Error, Result};

/// Memorizes the mean label of every distinct feature row.
///
/// On finite-support features this is the exact minimizer of the empirical
/// cross-entropy. Rows unseen during training get the global label mean.
#[derive(Debug, Clone, Default)]
pub struct FrequencyClassifier {
    fitted: Option<Table>,
}

#[derive(Debug, Clone)]
struct Table {
    n_features: usize,
    cells: HashMap<Vec<u64>, (f64, f64)>,
    global_mean: f64,
}

fn key(row: ArrayView1<'_, f64>) -> Vec<u64> {
    // -0.0 and 0.0 share a cell
    row.iter().map(|&v| (v + 0.0).to_bits()).collect()
}

impl FrequencyClassifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cell_count(&self) -> usize {
        self.fitted.as_ref().map_or(0, |t| t.cells.len())
    }
}

impl Classifier for FrequencyClassifier {
    fn fit(&mut self, features: ArrayView2<'_, f64>, labels: &[bool]) -> Result<()> {
        check_training(features, labels)?;
        let mut cells: HashMap<Vec<u64>, (f64, f64)> = HashMap::new();
        for (row, &y) in features.rows().into_iter().zip(labels) {
            let cell = cells.entry(key(row)).or_insert((0.0, 0.0));
            cell.0 += if y { 1.0 } else { 0.0 };
            cell.1 += 1.0;
        }
        let positives = labels.iter().filter(|&&y| y).count();
        self.fitted = Some(Table {
            n_features: features.ncols(),
            cells,
            global_mean: positives as f64 / labels.len() as f64,
        });
        Ok(())
    }

    fn predict_proba(&self, features: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        let t = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        if features.ncols() != t.n_features {
            return Err(Error::InvalidInput(format!(
                "expected {} features, got {}",
                t.n_features,
                features.ncols()
            )));
        }
        Ok(features
            .rows()
            .into_iter()
            .map(|row| t.cells.get(&key(row)).map_or(t.global_mean, |&(s, c)| s / c))
            .collect())
    }
}

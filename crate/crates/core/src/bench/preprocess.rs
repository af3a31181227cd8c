use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::io::{Cell, ColumnKind, RawDynamic, RawStatic, Schema};
use super::split::Splits;
use crate::error::{Error, Result};
use crate::record::{DynamicRecord, Observation, StaticRecord};

/// Feature rows belonging to the training split. The only way to build one
/// is from a dataset and its [`Splits`], so a [`Preprocessor`] never sees
/// validation or test rows while fitting.
pub struct TrainRows<'a> {
    schema: &'a Schema,
    rows: Vec<&'a [Cell]>,
}

impl RawStatic {
    pub fn train_rows(&self, splits: &Splits) -> TrainRows<'_> {
        TrainRows {
            schema: &self.schema,
            rows: splits.train.iter().map(|&i| self.rows[i].as_slice()).collect(),
        }
    }
}

impl RawDynamic {
    /// Every observation row of the training subjects.
    pub fn train_rows(&self, splits: &Splits) -> TrainRows<'_> {
        TrainRows {
            schema: &self.schema,
            rows: splits
                .train
                .iter()
                .flat_map(|&i| self.subjects[i].rows.iter().map(Vec::as_slice))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Transform {
    Numeric { mean: f64 },
    /// Sorted vocabulary; `mode` is `None` when the column is entirely
    /// missing in training, in which case missing cells become all zeros.
    Categorical { vocabulary: Vec<String>, mode: Option<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    names: Vec<String>,
    transforms: Vec<Transform>,
}

impl Preprocessor {
    pub fn fit(train: TrainRows<'_>) -> Result<Self> {
        let mut names = Vec::new();
        let mut transforms = Vec::new();
        for (j, column) in train.schema.columns.iter().enumerate() {
            match column.kind {
                ColumnKind::Numeric => {
                    let values: Vec<f64> = train
                        .rows
                        .iter()
                        .filter_map(|r| match r[j] {
                            Cell::Number(v) => Some(v),
                            _ => None,
                        })
                        .collect();
                    if values.is_empty() {
                        return Err(Error::data(0, format!("numeric column `{}` is entirely missing in training", column.name)));
                    }
                    names.push(column.name.clone());
                    transforms.push(Transform::Numeric {
                        mean: values.iter().sum::<f64>() / values.len() as f64,
                    });
                }
                ColumnKind::Categorical => {
                    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
                    for r in &train.rows {
                        match &r[j] {
                            Cell::Text(s) => *counts.entry(s.clone()).or_default() += 1,
                            Cell::Number(v) => *counts.entry(v.to_string()).or_default() += 1,
                            Cell::Missing => {}
                        }
                    }
                    // most frequent, earliest in sorted order on ties
                    let mode = counts
                        .iter()
                        .fold(None::<(&String, usize)>, |best, (k, &c)| match best {
                            Some((_, bc)) if bc >= c => best,
                            _ => Some((k, c)),
                        })
                        .map(|(k, _)| k.clone());
                    let vocabulary: Vec<String> = counts.into_keys().collect();
                    names.extend(vocabulary.iter().map(|v| format!("{}={v}", column.name)));
                    transforms.push(Transform::Categorical { vocabulary, mode });
                }
            }
        }
        Ok(Self { names, transforms })
    }

    /// Output feature names, one per numeric column and one per category.
    pub fn feature_names(&self) -> &[String] {
        &self.names
    }

    pub fn width(&self) -> usize {
        self.names.len()
    }

    pub fn transform_row(&self, row: &[Cell]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.width());
        for (cell, t) in row.iter().zip(&self.transforms) {
            match t {
                Transform::Numeric { mean } => out.push(match cell {
                    Cell::Number(v) => *v,
                    _ => *mean,
                }),
                Transform::Categorical { vocabulary, mode } => {
                    let value = match cell {
                        Cell::Text(s) => Some(s.clone()),
                        Cell::Number(v) => Some(v.to_string()),
                        Cell::Missing => mode.clone(),
                    };
                    out.extend(vocabulary.iter().map(|v| (value.as_ref() == Some(v)) as u8 as f64));
                }
            }
        }
        out
    }

    pub fn apply_static(&self, data: &RawStatic, indices: &[usize]) -> Result<Vec<StaticRecord>> {
        indices
            .iter()
            .map(|&i| {
                let r = StaticRecord::new(self.transform_row(&data.rows[i]), data.times[i], data.events[i])
                    .map_err(|e| Error::data(i + 1, e.to_string()))?;
                match data.censor_times[i] {
                    Some(c) => r.with_censor_time(c).map_err(|e| Error::data(i + 1, e.to_string())),
                    None => Ok(r),
                }
            })
            .collect()
    }

    pub fn apply_dynamic(&self, data: &RawDynamic, indices: &[usize]) -> Result<Vec<DynamicRecord>> {
        indices
            .iter()
            .map(|&i| {
                let s = &data.subjects[i];
                let observations = s
                    .obs_times
                    .iter()
                    .zip(&s.rows)
                    .map(|(&time, row)| Observation {
                        time,
                        covariates: self.transform_row(row),
                    })
                    .collect();
                let wrap = |e: Error| Error::Data {
                    row: 0,
                    message: format!("subject {}: {e}", s.id),
                };
                let r = DynamicRecord::new(s.id.clone(), observations, s.time, s.event).map_err(wrap)?;
                match s.censor_time {
                    Some(c) => r.with_censor_time(c).map_err(wrap),
                    None => Ok(r),
                }
            })
            .collect()
    }
}

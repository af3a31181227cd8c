//! Survival evaluation: Kaplan-Meier estimators, IPCW concordance, AUC and
//! Brier scores (static and landmark), and model ranking.

mod ipcw;
mod km;
mod ranking;

pub use ipcw::{
    auc_at_time, auc_from, brier_at_time, brier_from, cindex_from, cindex_ipcw, dynamic_metrics,
    integrated_auc, integrated_auc_from, integrated_brier, static_metrics, MetricConfig,
    SurvivalMetrics, TIE_CREDIT,
};
pub use km::{censoring_km, conditional_censoring, kaplan_meier, StepFunction};
pub use ranking::{average_rank, elo_arena, elo_ratings, expected_score, EloConfig, ScoreTable};

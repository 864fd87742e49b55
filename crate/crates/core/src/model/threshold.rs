use serde::{Deserialize, Serialize};

use super::TaskType;

/// Quantile of the standard normal that puts 95% of the mass below `v_max`.
const SPEED_QUANTILE: f64 = 1.96;

/// Delay thresholds per task class.
///
/// HPA deadlines follow a one-tailed normal curve in vehicle speed,
/// normalized so the deadline equals `thr2_s` at the road speed limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdModel {
    pub thr1_s: f64,
    pub thr2_s: f64,
    pub thr3_s: f64,
    pub v_max_mps: f64,
}

impl ThresholdModel {
    pub fn new(thr1_s: f64, thr2_s: f64, thr3_s: f64, v_max_mps: f64) -> Self {
        Self {
            thr1_s,
            thr2_s,
            thr3_s,
            v_max_mps,
        }
    }

    /// Standard deviation of the speed curve, `v_max / 1.96`.
    pub fn alpha_mps(&self) -> f64 {
        self.v_max_mps / SPEED_QUANTILE
    }

    pub fn is_valid(&self) -> bool {
        self.thr1_s > 0.0 && self.thr2_s > 0.0 && self.thr3_s > 0.0 && self.v_max_mps > 0.0
    }
}

/// Deadline in seconds for a task of `task_type` on a vehicle moving at `speed_mps`.
pub fn delay_threshold(task_type: TaskType, speed_mps: f64, model: &ThresholdModel) -> f64 {
    match task_type {
        TaskType::Ca => model.thr1_s,
        TaskType::Lpa => model.thr3_s,
        TaskType::Hpa => {
            let alpha = model.alpha_mps();
            let exponent = -(speed_mps * speed_mps - model.v_max_mps * model.v_max_mps)
                / (2.0 * alpha * alpha);
            model.thr2_s * exponent.exp()
        }
    }
}

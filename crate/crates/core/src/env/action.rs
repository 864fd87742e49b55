use serde::{Deserialize, Serialize};

use crate::model::Placement;

/// Binarization threshold for every score in an action vector.
pub const DECISION_THRESHOLD: f64 = 0.5;

/// Raw continuous action of one agent, every component in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionVector {
    pub hold_score: f64,
    pub vec_score: f64,
    pub cpu_share_request: f64,
    pub uplink_scores: Vec<f64>,
    pub downlink_scores: Vec<f64>,
}

impl ActionVector {
    pub fn dim(n_uplink: usize, n_downlink: usize) -> usize {
        3 + n_uplink + n_downlink
    }

    /// Action that decodes to local execution and requests nothing.
    pub fn noop(n_uplink: usize, n_downlink: usize) -> Self {
        Self {
            hold_score: 0.0,
            vec_score: 0.0,
            cpu_share_request: 0.0,
            uplink_scores: vec![0.0; n_uplink],
            downlink_scores: vec![0.0; n_downlink],
        }
    }

    /// # Panics
    /// If `raw` is not exactly `3 + n_uplink + n_downlink` long.
    pub fn from_slice(raw: &[f64], n_uplink: usize, n_downlink: usize) -> Self {
        assert_eq!(raw.len(), Self::dim(n_uplink, n_downlink), "action length");
        Self {
            hold_score: raw[0],
            vec_score: raw[1],
            cpu_share_request: raw[2],
            uplink_scores: raw[3..3 + n_uplink].to_vec(),
            downlink_scores: raw[3 + n_uplink..].to_vec(),
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(3 + self.uplink_scores.len() + self.downlink_scores.len());
        v.extend([self.hold_score, self.vec_score, self.cpu_share_request]);
        v.extend(&self.uplink_scores);
        v.extend(&self.downlink_scores);
        v
    }

    /// Binarizes the scores. Never fails: an action with both the hold and
    /// the offload flag set decodes as such and is penalized later.
    pub fn decode(&self) -> Decision {
        let picks = |scores: &[f64]| -> Vec<usize> {
            scores
                .iter()
                .enumerate()
                .filter(|(_, s)| **s > DECISION_THRESHOLD)
                .map(|(n, _)| n)
                .collect()
        };
        Decision {
            hold: self.hold_score > DECISION_THRESHOLD,
            offload: self.vec_score > DECISION_THRESHOLD,
            cpu_share: self.cpu_share_request.clamp(0.0, 1.0),
            uplink: picks(&self.uplink_scores),
            downlink: picks(&self.downlink_scores),
        }
    }
}

/// Binary decision of one vehicle: the hold / offload indicators, the
/// requested VEC cpu share and the requested channel indices.
///
/// `hold = offload = false` means local execution. Resource requests only
/// matter when `offload` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub hold: bool,
    pub offload: bool,
    pub cpu_share: f64,
    pub uplink: Vec<usize>,
    pub downlink: Vec<usize>,
}

impl Decision {
    pub fn hold() -> Self {
        Self {
            hold: true,
            offload: false,
            cpu_share: 0.0,
            uplink: Vec::new(),
            downlink: Vec::new(),
        }
    }

    pub fn local() -> Self {
        Self {
            hold: false,
            offload: false,
            cpu_share: 0.0,
            uplink: Vec::new(),
            downlink: Vec::new(),
        }
    }

    pub fn offload(cpu_share: f64, uplink: Vec<usize>, downlink: Vec<usize>) -> Self {
        Self {
            hold: false,
            offload: true,
            cpu_share,
            uplink,
            downlink,
        }
    }

    /// `None` when both indicators are set.
    pub fn placement(&self) -> Option<Placement> {
        match (self.hold, self.offload) {
            (true, true) => None,
            (true, false) => Some(Placement::Hold),
            (false, true) => Some(Placement::Vec),
            (false, false) => Some(Placement::Local),
        }
    }

    pub fn label(&self) -> &'static str {
        self.placement().map_or("conflict", Placement::as_str)
    }

    /// Channels and share are only claimed by offloading decisions.
    pub fn claims_resources(&self) -> bool {
        self.offload
    }
}

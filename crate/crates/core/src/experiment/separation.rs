//! Held-out labels stay sealed until the decision threshold is frozen.
//!
//! [`SealedLabels::open`] needs a [`FrozenThreshold`], and the only way
//! to obtain one is to fix the threshold on a trained model. A
//! [`LabelProbe`] observes both events, which lets tests audit the order.

use crate::classifiers::TrainedModel;
use crate::dataset::Dataset;
use crate::error::Result;

pub trait LabelProbe: Sync {
    fn threshold_frozen(&self, _threshold: f64) {}
    fn labels_opened(&self, _set: &str) {}
}

/// Probe that records nothing.
pub struct NoProbe;

impl LabelProbe for NoProbe {}

/// Proof that a model's decision threshold has been fixed.
#[derive(Debug)]
pub struct FrozenThreshold {
    value: f64,
}

impl FrozenThreshold {
    pub(crate) fn freeze(model: &mut TrainedModel, threshold: f64, probe: &dyn LabelProbe) -> Result<Self> {
        model.set_threshold(threshold)?;
        probe.threshold_frozen(threshold);
        Ok(Self { value: threshold })
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

/// Labels of an evaluation set, read lazily from the dataset.
pub struct SealedLabels<'a> {
    set: String,
    ds: &'a Dataset,
    rows: Vec<usize>,
}

impl<'a> SealedLabels<'a> {
    pub(crate) fn seal(set: impl Into<String>, ds: &'a Dataset, rows: Vec<usize>) -> Self {
        Self {
            set: set.into(),
            ds,
            rows,
        }
    }

    pub fn set(&self) -> &str {
        &self.set
    }

    pub fn open(&self, _token: &FrozenThreshold, probe: &dyn LabelProbe) -> Vec<u8> {
        probe.labels_opened(&self.set);
        self.rows.iter().map(|&r| self.ds.rows()[r].label).collect()
    }
}

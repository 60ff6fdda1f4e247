use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub rms_decay: f64,
    pub rms_epsilon: f64,
    pub validation_fraction: f64,
    pub seed: u64,
    /// Split each class separately so both parts keep the class mix.
    pub stratified: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 4,
            batch_size: 10,
            learning_rate: 1e-3,
            rms_decay: 0.9,
            rms_epsilon: 1e-7,
            validation_fraction: 0.10,
            seed: 42,
            stratified: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.batch_size < 1 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(Error::Config(format!(
                "validation fraction must lie strictly between 0 and 1, got {}",
                self.validation_fraction
            )));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate {} is not a finite non-negative number",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.rms_decay) {
            return Err(Error::Config(format!(
                "RMSProp decay must lie in [0, 1), got {}",
                self.rms_decay
            )));
        }
        if !(self.rms_epsilon > 0.0) {
            return Err(Error::Config("RMSProp epsilon must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        TrainConfig::default().validate().unwrap();
    }

    #[test]
    fn invariants_enforced() {
        let bad = [
            TrainConfig {
                epochs: 0,
                ..Default::default()
            },
            TrainConfig {
                batch_size: 0,
                ..Default::default()
            },
            TrainConfig {
                validation_fraction: 0.0,
                ..Default::default()
            },
            TrainConfig {
                validation_fraction: 1.0,
                ..Default::default()
            },
            TrainConfig {
                learning_rate: f64::NAN,
                ..Default::default()
            },
            TrainConfig {
                rms_epsilon: 0.0,
                ..Default::default()
            },
        ];
        for c in bad {
            let err = c.validate().unwrap_err();
            assert_eq!(err.category(), crate::ErrorCategory::Config, "{c:?}");
        }
    }
}

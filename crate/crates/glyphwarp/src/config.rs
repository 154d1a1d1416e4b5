//! Line-oriented `key = value` configuration files. `#` starts a comment.

use std::collections::BTreeMap;
use std::str::FromStr;

use glyphwarp_core::nnet::{TrainConfig, LEARNING_RATES};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {value:?} ({reason})")]
    Value { key: String, value: String, reason: String },
}

/// Parsed pairs; values are consumed by [`KeyValues::take`] and any key
/// left over is reported by [`KeyValues::finish`].
#[derive(Debug, Default)]
pub struct KeyValues {
    map: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: i + 1, text: raw.to_string() })?;
            let key = k.trim().to_string();
            if key.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1, text: raw.to_string() });
            }
            if map.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(ConfigError::Duplicate { line: i + 1, key });
            }
        }
        Ok(KeyValues { map })
    }

    pub fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.map.remove(key) {
            None => Ok(None),
            Some(value) => value.parse().map(Some).map_err(|e: T::Err| ConfigError::Value {
                key: key.to_string(),
                reason: e.to_string(),
                value,
            }),
        }
    }

    pub fn take_list<T: FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        let Some(value) = self.map.remove(key) else { return Ok(None) };
        value
            .split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse().map_err(|e: T::Err| ConfigError::Value {
                    key: key.to_string(),
                    value: value.clone(),
                    reason: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn finish(self) -> Result<(), ConfigError> {
        match self.map.into_keys().next() {
            Some(k) => Err(ConfigError::UnknownKey(k)),
            None => Ok(()),
        }
    }
}

pub fn bad_value(key: &str, value: impl ToString, reason: &str) -> ConfigError {
    ConfigError::Value { key: key.to_string(), value: value.to_string(), reason: reason.to_string() }
}

pub fn check_rate(key: &str, lr: f64) -> Result<f64, ConfigError> {
    if LEARNING_RATES.contains(&lr) {
        Ok(lr)
    } else {
        Err(bad_value(key, lr, "not one of 0.001, 0.01, 0.025, 0.075, 0.1, 0.5"))
    }
}

/// Training settings for `glyphwarp train`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub train: TrainConfig,
    pub hidden: usize,
    pub corruption: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { train: TrainConfig::default(), hidden: 64, corruption: 0.2 }
    }
}

impl ModelConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut kv = KeyValues::parse(text)?;
        let mut c = ModelConfig::default();
        read_train(&mut kv, &mut c.train)?;
        c.hidden = kv.take("hidden")?.unwrap_or(c.hidden);
        c.corruption = kv.take("corruption")?.unwrap_or(c.corruption);
        kv.finish()?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.hidden == 0 {
            return Err(bad_value("hidden", 0, "must be positive"));
        }
        if !(0.0..1.0).contains(&self.corruption) {
            return Err(bad_value("corruption", self.corruption, "must lie in [0, 1)"));
        }
        if self.train.minibatch == 0 {
            return Err(bad_value("minibatch", 0, "must be positive"));
        }
        Ok(())
    }
}

/// Reads the shared training keys into `cfg`.
pub fn read_train(kv: &mut KeyValues, cfg: &mut TrainConfig) -> Result<(), ConfigError> {
    if let Some(lr) = kv.take("learning_rate")? {
        cfg.learning_rate = check_rate("learning_rate", lr)?;
    }
    if let Some(lr) = kv.take("pretrain_learning_rate")? {
        cfg.pretrain_learning_rate = check_rate("pretrain_learning_rate", lr)?;
    }
    cfg.minibatch = kv.take("minibatch")?.unwrap_or(cfg.minibatch);
    cfg.epochs = kv.take("epochs")?.unwrap_or(cfg.epochs);
    cfg.pretrain_epochs = kv.take("pretrain_epochs")?.unwrap_or(cfg.pretrain_epochs);
    if let Some(p) = kv.take::<usize>("patience")? {
        cfg.patience = (p > 0).then_some(p);
    }
    cfg.seed = kv.take("seed")?.unwrap_or(cfg.seed);
    Ok(())
}

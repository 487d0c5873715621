use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Training hyperparameters. Loaded from flat `key = value` text; every key is
/// optional and falls back to the default below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub lr_decay: f64,
    pub momentum: f64,
    pub l1_weight_penalty: f64,
    pub k_order: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Weight of the KL term; `0` trains a plain (non-variational) autoencoder.
    pub w_kld: f64,
    pub z_dim: usize,
    /// Epochs over which the KL weight ramps linearly from 0 up to `w_kld`.
    /// `0` applies the full weight from the first step.
    #[serde(default)]
    pub kl_warmup_epochs: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 300,
            learning_rate: 8e-3,
            lr_decay: 0.99,
            momentum: 0.9,
            l1_weight_penalty: 5e-4,
            k_order: 6,
            batch_size: 16,
            seed: 0,
            w_kld: 0.001,
            z_dim: 8,
            kl_warmup_epochs: 0,
        }
    }
}

impl TrainConfig {
    pub fn variational(&self) -> bool {
        self.w_kld > 0.0
    }

    /// KL weight used during `epoch` (0-based).
    pub fn kl_weight_at(&self, epoch: usize) -> f64 {
        if epoch >= self.kl_warmup_epochs {
            self.w_kld
        } else {
            self.w_kld * epoch as f64 / self.kl_warmup_epochs as f64
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::arg(msg.to_string())) };
        check(self.epochs >= 1, "epochs must be at least 1")?;
        check(
            (0.0..=1.0).contains(&self.learning_rate),
            "learning_rate must be in [0, 1]",
        )?;
        check(
            self.lr_decay > 0.0 && self.lr_decay <= 1.0,
            "lr_decay must be in (0, 1]",
        )?;
        check((0.0..1.0).contains(&self.momentum), "momentum must be in [0, 1)")?;
        check(
            self.l1_weight_penalty >= 0.0 && self.l1_weight_penalty.is_finite(),
            "l1_weight_penalty must be non-negative",
        )?;
        check(self.k_order >= 1, "k_order must be at least 1")?;
        check(self.batch_size >= 1, "batch_size must be at least 1")?;
        check(
            self.w_kld >= 0.0 && self.w_kld.is_finite(),
            "w_kld must be non-negative",
        )?;
        check(self.z_dim >= 1, "z_dim must be at least 1")?;
        Ok(())
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(origin, i + 1, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: String| Error::parse(origin, i + 1, format!("{key}: {e}"));
            macro_rules! set {
                ($field:ident) => {
                    cfg.$field = value.parse().map_err(|e| bad(format!("{e}")))?
                };
            }
            match key {
                "epochs" => set!(epochs),
                "learning_rate" => set!(learning_rate),
                "lr_decay" => set!(lr_decay),
                "momentum" => set!(momentum),
                "l1_weight_penalty" => set!(l1_weight_penalty),
                "k_order" => set!(k_order),
                "batch_size" => set!(batch_size),
                "seed" => set!(seed),
                "w_kld" => set!(w_kld),
                "z_dim" => set!(z_dim),
                "kl_warmup_epochs" => set!(kl_warmup_epochs),
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, path)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "epochs = {}", self.epochs);
        let _ = writeln!(s, "learning_rate = {}", self.learning_rate);
        let _ = writeln!(s, "lr_decay = {}", self.lr_decay);
        let _ = writeln!(s, "momentum = {}", self.momentum);
        let _ = writeln!(s, "l1_weight_penalty = {}", self.l1_weight_penalty);
        let _ = writeln!(s, "k_order = {}", self.k_order);
        let _ = writeln!(s, "batch_size = {}", self.batch_size);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "w_kld = {}", self.w_kld);
        let _ = writeln!(s, "z_dim = {}", self.z_dim);
        let _ = writeln!(s, "kl_warmup_epochs = {}", self.kl_warmup_epochs);
        s
    }
}

//! Experiment configuration: a flat `key = value` text file, overridable
//! from the command line, fully validated before any compute. Unknown keys
//! are rejected, and the resolved config is echoed into the output
//! directory for provenance.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Regress,
    Classify,
    Autoencode,
}

impl TaskKind {
    fn as_str(self) -> &'static str {
        match self {
            TaskKind::Regress => "regress",
            TaskKind::Classify => "classify",
            TaskKind::Autoencode => "autoencode",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataKind {
    Lowrank,
    SShapes,
    Curve1d,
    Csv,
    Idx,
}

impl DataKind {
    fn as_str(self) -> &'static str {
        match self {
            DataKind::Lowrank => "lowrank",
            DataKind::SShapes => "sshapes",
            DataKind::Curve1d => "curve1d",
            DataKind::Csv => "csv",
            DataKind::Idx => "idx",
        }
    }
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub task: TaskKind,
    pub seed: u64,
    pub out: PathBuf,

    pub data_kind: DataKind,
    pub data_n: usize,
    pub data_d_in: usize,
    pub data_d_out: usize,
    pub data_latent: usize,
    pub data_rank: usize,
    pub data_gen_width: usize,
    pub data_classes: usize,
    pub data_per_class: usize,
    pub data_jitter: f64,
    pub data_path: Option<PathBuf>,
    pub data_labels_path: Option<PathBuf>,

    pub arch_depth: usize,
    pub arch_width: usize,
    pub arch_slope: f64,

    pub train_lambda: f64,
    pub train_lr: f64,
    pub train_steps: usize,
    pub train_beta1: f64,
    pub train_beta2: f64,
    pub train_gd_steps: usize,
    pub train_gd_lr: f64,
    /// 0 means full batch.
    pub train_batch: usize,

    pub analysis_probes: usize,
    pub analysis_rel_tol: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            task: TaskKind::Regress,
            seed: 0,
            out: PathBuf::from("out"),
            data_kind: DataKind::Lowrank,
            data_n: 200,
            data_d_in: 10,
            data_d_out: 10,
            data_latent: 5,
            data_rank: 2,
            data_gen_width: 100,
            data_classes: 4,
            data_per_class: 100,
            data_jitter: rankscope_core::datagen::S_SHAPE_DEFAULT_JITTER,
            data_path: None,
            data_labels_path: None,
            arch_depth: 8,
            arch_width: 40,
            arch_slope: 0.0,
            train_lambda: 0.05 / 8.0,
            train_lr: 1e-3,
            train_steps: 4000,
            train_beta1: 0.9,
            train_beta2: 0.999,
            train_gd_steps: 500,
            train_gd_lr: 1e-4,
            train_batch: 0,
            analysis_probes: 1000,
            analysis_rel_tol: 1e-3,
        }
    }
}

fn parse_kv_text(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("line {}: expected `key = value`, got `{raw}`", lineno + 1))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if map.insert(key.clone(), value).is_some() {
            return Err(CliError::Config(format!("duplicate key `{key}`")));
        }
    }
    Ok(map)
}

impl ExperimentConfig {
    /// Loads a config file, then applies `key=value` overrides in order.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> CliResult<Self> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let map = parse_kv_text(&text)?;
            for (k, v) in &map {
                cfg.apply(k, v)?;
            }
        }
        for (k, v) in overrides {
            cfg.apply(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, key: &str, value: &str) -> CliResult<()> {
        let bad = |what: &str| CliError::Config(format!("key `{key}`: invalid {what} `{value}`"));
        macro_rules! num {
            ($ty:ty, $what:expr) => {
                value.parse::<$ty>().map_err(|_| bad($what))?
            };
        }
        match key {
            "task" => {
                self.task = match value {
                    "regress" => TaskKind::Regress,
                    "classify" => TaskKind::Classify,
                    "autoencode" => TaskKind::Autoencode,
                    _ => return Err(bad("task (regress|classify|autoencode)")),
                }
            }
            "seed" => self.seed = num!(u64, "integer"),
            "out" => self.out = PathBuf::from(value),
            "data.kind" => {
                self.data_kind = match value {
                    "lowrank" => DataKind::Lowrank,
                    "sshapes" => DataKind::SShapes,
                    "curve1d" => DataKind::Curve1d,
                    "csv" => DataKind::Csv,
                    "idx" => DataKind::Idx,
                    _ => return Err(bad("data kind (lowrank|sshapes|curve1d|csv|idx)")),
                }
            }
            "data.n" => self.data_n = num!(usize, "count"),
            "data.d_in" => self.data_d_in = num!(usize, "count"),
            "data.d_out" => self.data_d_out = num!(usize, "count"),
            "data.latent" => self.data_latent = num!(usize, "count"),
            "data.rank" => self.data_rank = num!(usize, "count"),
            "data.gen_width" => self.data_gen_width = num!(usize, "count"),
            "data.classes" => self.data_classes = num!(usize, "count"),
            "data.per_class" => self.data_per_class = num!(usize, "count"),
            "data.jitter" => self.data_jitter = num!(f64, "number"),
            "data.path" => self.data_path = Some(PathBuf::from(value)),
            "data.labels_path" => self.data_labels_path = Some(PathBuf::from(value)),
            "arch.depth" => self.arch_depth = num!(usize, "count"),
            "arch.width" => self.arch_width = num!(usize, "count"),
            "arch.slope" => self.arch_slope = num!(f64, "number"),
            "train.lambda" => self.train_lambda = num!(f64, "number"),
            "train.lr" => self.train_lr = num!(f64, "number"),
            "train.steps" => self.train_steps = num!(usize, "count"),
            "train.beta1" => self.train_beta1 = num!(f64, "number"),
            "train.beta2" => self.train_beta2 = num!(f64, "number"),
            "train.gd_steps" => self.train_gd_steps = num!(usize, "count"),
            "train.gd_lr" => self.train_gd_lr = num!(f64, "number"),
            "train.batch" => self.train_batch = num!(usize, "count"),
            "analysis.probes" => self.analysis_probes = num!(usize, "count"),
            "analysis.rel_tol" => self.analysis_rel_tol = num!(f64, "number"),
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        let err = |msg: String| Err(CliError::Config(msg));
        if self.arch_depth < 2 {
            return err(format!("arch.depth must be >= 2, got {}", self.arch_depth));
        }
        if self.arch_width == 0 {
            return err("arch.width must be positive".into());
        }
        if !(-1.0 < self.arch_slope && self.arch_slope < 1.0) {
            return err(format!("arch.slope must lie in (-1, 1), got {}", self.arch_slope));
        }
        if self.train_lambda < 0.0 || !self.train_lambda.is_finite() {
            return err(format!("train.lambda must be >= 0, got {}", self.train_lambda));
        }
        if !(self.train_lr > 0.0) || !(self.train_gd_lr > 0.0) {
            return err("train.lr and train.gd_lr must be positive".into());
        }
        for (name, b) in [("train.beta1", self.train_beta1), ("train.beta2", self.train_beta2)] {
            if !(0.0..1.0).contains(&b) {
                return err(format!("{name} must lie in [0, 1), got {b}"));
            }
        }
        if !(self.analysis_rel_tol > 0.0 && self.analysis_rel_tol < 1.0) {
            return err(format!(
                "analysis.rel_tol must lie in (0, 1), got {}",
                self.analysis_rel_tol
            ));
        }
        if self.analysis_probes == 0 {
            return err("analysis.probes must be positive".into());
        }
        match self.data_kind {
            DataKind::Lowrank => {
                if self.data_rank == 0
                    || self.data_rank > self.data_latent
                    || self.data_latent > self.data_d_in
                    || self.data_rank > self.data_d_out
                {
                    return err(format!(
                        "lowrank data needs 1 <= rank <= latent <= d_in and rank <= d_out, got rank={}, latent={}, d_in={}, d_out={}",
                        self.data_rank, self.data_latent, self.data_d_in, self.data_d_out
                    ));
                }
                if self.data_n == 0 || self.data_gen_width == 0 {
                    return err("data.n and data.gen_width must be positive".into());
                }
            }
            DataKind::SShapes => {
                if self.data_classes < 2 || self.data_per_class == 0 {
                    return err("sshapes data needs >= 2 classes and >= 1 point per class".into());
                }
                if self.data_jitter < 0.0 {
                    return err("data.jitter must be nonnegative".into());
                }
                if self.task != TaskKind::Classify {
                    return err("sshapes data is labeled; use task = classify".into());
                }
            }
            DataKind::Curve1d => {
                if self.data_n == 0 {
                    return err("data.n must be positive".into());
                }
            }
            DataKind::Csv | DataKind::Idx => {
                if self.data_path.is_none() {
                    return err(format!(
                        "data.kind = {} needs data.path",
                        self.data_kind.as_str()
                    ));
                }
            }
        }
        if self.task == TaskKind::Classify
            && matches!(self.data_kind, DataKind::Lowrank | DataKind::Curve1d)
        {
            return err("classify task needs labeled data (sshapes, csv, or idx)".into());
        }
        Ok(())
    }

    /// Canonical echo of the resolved configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "task = {}", self.task.as_str());
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "out = {}", self.out.display());
        let _ = writeln!(s, "data.kind = {}", self.data_kind.as_str());
        let _ = writeln!(s, "data.n = {}", self.data_n);
        let _ = writeln!(s, "data.d_in = {}", self.data_d_in);
        let _ = writeln!(s, "data.d_out = {}", self.data_d_out);
        let _ = writeln!(s, "data.latent = {}", self.data_latent);
        let _ = writeln!(s, "data.rank = {}", self.data_rank);
        let _ = writeln!(s, "data.gen_width = {}", self.data_gen_width);
        let _ = writeln!(s, "data.classes = {}", self.data_classes);
        let _ = writeln!(s, "data.per_class = {}", self.data_per_class);
        let _ = writeln!(s, "data.jitter = {}", self.data_jitter);
        if let Some(p) = &self.data_path {
            let _ = writeln!(s, "data.path = {}", p.display());
        }
        if let Some(p) = &self.data_labels_path {
            let _ = writeln!(s, "data.labels_path = {}", p.display());
        }
        let _ = writeln!(s, "arch.depth = {}", self.arch_depth);
        let _ = writeln!(s, "arch.width = {}", self.arch_width);
        let _ = writeln!(s, "arch.slope = {}", self.arch_slope);
        let _ = writeln!(s, "train.lambda = {}", self.train_lambda);
        let _ = writeln!(s, "train.lr = {}", self.train_lr);
        let _ = writeln!(s, "train.steps = {}", self.train_steps);
        let _ = writeln!(s, "train.beta1 = {}", self.train_beta1);
        let _ = writeln!(s, "train.beta2 = {}", self.train_beta2);
        let _ = writeln!(s, "train.gd_steps = {}", self.train_gd_steps);
        let _ = writeln!(s, "train.gd_lr = {}", self.train_gd_lr);
        let _ = writeln!(s, "train.batch = {}", self.train_batch);
        let _ = writeln!(s, "analysis.probes = {}", self.analysis_probes);
        let _ = writeln!(s, "analysis.rel_tol = {}", self.analysis_rel_tol);
        s
    }
}

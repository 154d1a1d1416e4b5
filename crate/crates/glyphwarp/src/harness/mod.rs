//! The model × training-set grid: MLP0–2 and SDA0–2 trained on clean,
//! NISTP-style and P07-style data, evaluated on every set and task, plus
//! single-task models for the multi-task comparison.

pub mod report;
pub mod table;

use std::collections::BTreeMap;

use glyphwarp_core::dataset::{ClassSet, CLASS_COUNT};
use glyphwarp_core::imgcore::PIXELS;
use glyphwarp_core::metrics::stderr_of_rate;
use glyphwarp_core::nnet::{
    evaluate_tally, finetune, pretrain, MlpModel, NnetError, SdaModel, TrainConfig, LEARNING_RATES,
};
use glyphwarp_core::pipeline::{PipelineError, PipelineSpec, SourceMix};
use glyphwarp_core::{GreyImage, LabeledDataset, RngStream, Split};
use rayon::prelude::*;

use crate::checkpoint::Model;
use crate::config::{bad_value, check_rate, ConfigError, KeyValues};
use crate::generate::generate;
use table::{ResultRow, ResultTable, Status};

/// Training-set names by model index: `MLP1` trains on `nistp`.
pub const TRAIN_SETS: [&str; 3] = ["clean", "nistp", "p07"];
/// Set whose validation split picks the learning rate of each family.
pub const SELECTION_SET: &str = "nistp";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Mlp,
    Sda,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Mlp => "MLP",
            Family::Sda => "SDA",
        }
    }
}

/// `MLP0` → (MLP, 0).
pub fn parse_model_name(name: &str) -> Option<(Family, usize)> {
    let (family, index) = name.split_at(name.len().checked_sub(1)?);
    let family = match family {
        "MLP" => Family::Mlp,
        "SDA" => Family::Sda,
        _ => return None,
    };
    let index: usize = index.parse().ok()?;
    (index < TRAIN_SETS.len()).then_some((family, index))
}

#[derive(Debug, thiserror::Error)]
pub enum GridError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("learning-rate selection failed: {0}")]
    Selection(NnetError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub seed: u64,
    pub train: usize,
    pub valid: usize,
    pub test: usize,
    pub hidden: usize,
    pub sda_width: usize,
    pub corruption: f64,
    pub epochs: usize,
    pub pretrain_epochs: usize,
    pub patience: Option<usize>,
    pub minibatch: usize,
    /// Candidates tried on the selection set; one value skips selection.
    pub learning_rates: Vec<f64>,
    pub pretrain_learning_rate: f64,
    /// Epoch budget of each selection run.
    pub select_epochs: usize,
    pub models: Vec<String>,
    pub eval_sets: Vec<String>,
    pub tasks: Vec<ClassSet>,
    /// Also train one model per character family on clean data.
    pub single_task: bool,
    /// Source mix of the perturbed sets.
    pub mix: SourceMix,
    /// Source of the clean set.
    pub clean_source: String,
}

impl Default for GridConfig {
    /// Desk scale: minutes on one core.
    fn default() -> Self {
        GridConfig {
            seed: 1,
            train: 5000,
            valid: 1000,
            test: 1000,
            hidden: 64,
            sda_width: 64,
            corruption: 0.2,
            epochs: 50,
            pretrain_epochs: 10,
            patience: Some(10),
            minibatch: 20,
            learning_rates: LEARNING_RATES.to_vec(),
            pretrain_learning_rate: 0.01,
            select_epochs: 10,
            models: ["MLP0", "MLP1", "MLP2", "SDA0", "SDA1", "SDA2"].map(String::from).to_vec(),
            eval_sets: TRAIN_SETS.map(String::from).to_vec(),
            tasks: vec![ClassSet::All, ClassSet::Digits, ClassSet::Upper, ClassSet::Lower],
            single_task: true,
            mix: SourceMix::paper(),
            clean_source: "nist".into(),
        }
    }
}

impl GridConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut kv = KeyValues::parse(text)?;
        let mut c = GridConfig::default();
        macro_rules! read {
            ($($field:ident),*) => {$(
                if let Some(v) = kv.take(stringify!($field))? {
                    c.$field = v;
                }
            )*};
        }
        read!(seed, train, valid, test, hidden, sda_width, corruption, epochs, pretrain_epochs, minibatch);
        read!(select_epochs, single_task, mix, clean_source);
        if let Some(p) = kv.take::<usize>("patience")? {
            c.patience = (p > 0).then_some(p);
        }
        if let Some(lr) = kv.take("pretrain_learning_rate")? {
            c.pretrain_learning_rate = check_rate("pretrain_learning_rate", lr)?;
        }
        if let Some(lrs) = kv.take_list::<f64>("learning_rates")? {
            c.learning_rates = lrs
                .into_iter()
                .map(|lr| check_rate("learning_rates", lr))
                .collect::<Result<_, _>>()?;
        }
        if let Some(models) = kv.take_list("models")? {
            c.models = models;
        }
        if let Some(sets) = kv.take_list("eval_sets")? {
            c.eval_sets = sets;
        }
        if let Some(tasks) = kv.take_list("tasks")? {
            c.tasks = tasks;
        }
        kv.finish()?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (key, v) in [("train", self.train), ("hidden", self.hidden), ("sda_width", self.sda_width), ("minibatch", self.minibatch)] {
            if v == 0 {
                return Err(bad_value(key, v, "must be positive"));
            }
        }
        if !(0.0..1.0).contains(&self.corruption) {
            return Err(bad_value("corruption", self.corruption, "must lie in [0, 1)"));
        }
        if self.learning_rates.is_empty() {
            return Err(bad_value("learning_rates", "", "needs at least one rate"));
        }
        if let Some(m) = self.models.iter().find(|m| parse_model_name(m).is_none()) {
            return Err(bad_value("models", m, "expected MLP0..MLP2 or SDA0..SDA2"));
        }
        if let Some(s) = self.eval_sets.iter().find(|s| !TRAIN_SETS.contains(&s.as_str())) {
            return Err(bad_value("eval_sets", s, "expected clean, nistp or p07"));
        }
        Ok(())
    }

    fn train_config(&self, learning_rate: f64, epochs: usize, patience: Option<usize>, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate,
            pretrain_learning_rate: self.pretrain_learning_rate,
            minibatch: self.minibatch,
            epochs,
            pretrain_epochs: self.pretrain_epochs,
            patience,
            seed,
        }
    }

    fn families(&self) -> Vec<Family> {
        let mut f: Vec<Family> = self.models.iter().filter_map(|m| parse_model_name(m)).map(|(f, _)| f).collect();
        f.sort();
        f.dedup();
        f
    }
}

/// Train, validation and test splits of one generated set.
#[derive(Clone, Debug)]
pub struct SetSplits {
    pub train: LabeledDataset,
    pub valid: LabeledDataset,
    pub test: LabeledDataset,
}

/// Generates the named set with the grid's sizes. Each set has its own
/// seed derived from the grid seed.
pub fn make_set(cfg: &GridConfig, name: &str) -> Result<SetSplits, GridError> {
    let index = TRAIN_SETS.iter().position(|s| *s == name).expect("validated set name") as u64;
    let seed = RngStream::new(cfg.seed).substream(10 + index).seed();
    let (mix, spec) = match name {
        "clean" => (SourceMix::single(&cfg.clean_source), PipelineSpec::raw()),
        other => (cfg.mix.clone(), PipelineSpec::preset(other)?),
    };
    let n = cfg.train + cfg.valid + cfg.test;
    let ds = generate(n, &mix, &spec, seed)?;
    let (train, valid, test) = Split::new(cfg.train, cfg.valid, cfg.test, n).expect("sizes add up").apply(&ds);
    Ok(SetSplits { train, valid, test })
}

fn name_seed(base: u64, name: &str) -> u64 {
    let h = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    RngStream::new(base).substream(h).seed()
}

fn images(ds: &LabeledDataset) -> Vec<GreyImage> {
    ds.items.iter().map(|s| s.image.clone()).collect()
}

/// A freshly initialized model; SDAs come back pretrained on `train`.
fn init_model(
    cfg: &GridConfig,
    family: Family,
    labels: &[u8],
    train: &LabeledDataset,
    seed: u64,
) -> Result<Model, NnetError> {
    let mut rng = RngStream::new(seed);
    Ok(match family {
        Family::Mlp => Model::Mlp(MlpModel::new(PIXELS, cfg.hidden, labels, &mut rng)),
        Family::Sda => {
            let mut sda = SdaModel::new(PIXELS, cfg.sda_width, labels, cfg.corruption, false, &mut rng);
            pretrain(&mut sda, &images(train), &cfg.train_config(0.0, 0, None, seed))?;
            Model::Sda(sda)
        }
    })
}

/// Picks the learning rate with the lowest validation error on the
/// selection set; ties go to the earlier candidate.
pub fn select_learning_rate(cfg: &GridConfig, family: Family, set: &SetSplits) -> Result<f64, NnetError> {
    if cfg.learning_rates.len() == 1 {
        return Ok(cfg.learning_rates[0]);
    }
    let all: Vec<u8> = (0..CLASS_COUNT as u8).collect();
    let seed = name_seed(cfg.seed, &format!("select-{}", family.name()));
    let start = init_model(cfg, family, &all, &set.train, seed)?;
    let errors = cfg
        .learning_rates
        .par_iter()
        .map(|&lr| {
            let mut m = start.clone();
            let report = finetune(&mut m, &set.train, &set.valid, &cfg.train_config(lr, cfg.select_epochs, None, seed))?;
            Ok(report.best_valid_error().unwrap_or(f64::INFINITY))
        })
        .collect::<Result<Vec<f64>, NnetError>>()?;
    let best = (0..errors.len()).fold(0, |b, i| if errors[i] < errors[b] { i } else { b });
    Ok(cfg.learning_rates[best])
}

/// One trained cell of the grid.
#[derive(Clone, Debug)]
pub struct Job {
    pub name: String,
    pub family: Family,
    pub train_set: &'static str,
    /// `Some` for single-task models.
    pub task: Option<ClassSet>,
}

pub fn jobs(cfg: &GridConfig) -> Vec<Job> {
    let mut out: Vec<Job> = cfg
        .models
        .iter()
        .map(|m| {
            let (family, index) = parse_model_name(m).expect("validated");
            Job { name: m.clone(), family, train_set: TRAIN_SETS[index], task: None }
        })
        .collect();
    if cfg.single_task {
        for family in cfg.families() {
            for task in [ClassSet::Digits, ClassSet::Lower, ClassSet::Upper] {
                out.push(Job {
                    name: format!("{}-{}", family.name(), task.name()),
                    family,
                    train_set: "clean",
                    task: Some(task),
                });
            }
        }
    }
    out
}

fn train_job(cfg: &GridConfig, job: &Job, set: &SetSplits, lr: f64) -> Result<Model, NnetError> {
    let (labels, train, valid) = match job.task {
        None => ((0..CLASS_COUNT as u8).collect(), set.train.clone(), set.valid.clone()),
        Some(t) => (t.labels(), set.train.restrict(t), set.valid.restrict(t)),
    };
    let seed = name_seed(cfg.seed, &job.name);
    let mut model = init_model(cfg, job.family, &labels, &train, seed)?;
    finetune(&mut model, &train, &valid, &cfg.train_config(lr, cfg.epochs, cfg.patience, seed))?;
    Ok(model)
}

fn eval_row(model: &Model, job: &Job, eval: &str, test: &LabeledDataset, task: ClassSet) -> ResultRow {
    let subset = (task != ClassSet::All).then_some(task);
    let mut row = ResultRow {
        model: job.name.clone(),
        eval: eval.to_string(),
        task: task.name().to_string(),
        n: None,
        error: None,
        stderr: None,
        status: Status::Ok,
    };
    match evaluate_tally(model, test, subset) {
        Ok(t) => {
            row.n = Some(t.total);
            row.error = Some(t.rate());
            row.stderr = stderr_of_rate(t.rate(), t.total).ok();
        }
        Err(e) => row.status = Status::Failed(e.to_string()),
    }
    row
}

/// Everything a grid run produces.
#[derive(Clone, Debug)]
pub struct GridOutcome {
    pub table: ResultTable,
    pub learning_rates: BTreeMap<&'static str, f64>,
    pub models: Vec<(String, Option<Model>)>,
}

/// Runs the grid. Cells train in parallel; each owns a seed derived from
/// its name, so the table does not depend on scheduling. A cell whose
/// training diverges is reported as failed and the grid carries on.
pub fn run_grid(cfg: &GridConfig, progress: &(dyn Fn(&str) + Sync)) -> Result<GridOutcome, GridError> {
    cfg.validate()?;
    let jobs = jobs(cfg);
    let mut needed: Vec<&str> = jobs.iter().map(|j| j.train_set).collect();
    needed.extend(cfg.eval_sets.iter().map(String::as_str));
    if cfg.learning_rates.len() > 1 {
        needed.push(SELECTION_SET);
    }
    let mut sets: BTreeMap<&str, SetSplits> = BTreeMap::new();
    for name in TRAIN_SETS.into_iter().filter(|s| needed.contains(s)) {
        progress(&format!("generating {name}"));
        sets.insert(name, make_set(cfg, name)?);
    }

    let mut rates = BTreeMap::new();
    for family in cfg.families() {
        let lr = match sets.get(SELECTION_SET) {
            Some(set) => select_learning_rate(cfg, family, set).map_err(GridError::Selection)?,
            None => cfg.learning_rates[0],
        };
        progress(&format!("{} learning rate {lr}", family.name()));
        rates.insert(family.name(), lr);
    }

    let trained: Vec<Result<Model, NnetError>> = jobs
        .par_iter()
        .map(|job| {
            let r = train_job(cfg, job, &sets[job.train_set], rates[job.family.name()]);
            progress(&format!("trained {}{}", job.name, if r.is_err() { " (failed)" } else { "" }));
            r
        })
        .collect();

    let mut table = ResultTable::default();
    let mut models = Vec::with_capacity(jobs.len());
    for (job, result) in jobs.iter().zip(trained) {
        let cells: Vec<(&str, ClassSet)> = match job.task {
            None => cfg
                .eval_sets
                .iter()
                .flat_map(|e| cfg.tasks.iter().map(move |&t| (e.as_str(), t)))
                .collect(),
            Some(t) => vec![("clean", t)],
        };
        match &result {
            Ok(model) => {
                for (eval, task) in cells {
                    let test = &sets.get(eval).expect("eval sets are generated").test;
                    table.push(eval_row(model, job, eval, test, task));
                }
            }
            Err(e) => {
                for (eval, task) in cells {
                    table.push(ResultRow {
                        model: job.name.clone(),
                        eval: eval.to_string(),
                        task: task.name().to_string(),
                        n: None,
                        error: None,
                        stderr: None,
                        status: Status::Failed(e.to_string()),
                    });
                }
            }
        }
        models.push((job.name.clone(), result.ok()));
    }
    Ok(GridOutcome { table, learning_rates: rates, models })
}

use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use glyphwarp::cds::{read_cds, write_cds};
use glyphwarp::checkpoint::{self, Model};
use glyphwarp::config::ModelConfig;
use glyphwarp::generate::generate_parallel;
use glyphwarp::harness::report::report;
use glyphwarp::harness::table::ResultTable;
use glyphwarp::harness::{run_grid, GridConfig};
use glyphwarp::sheet::export_contact_sheet;
use glyphwarp_core::dataset::CLASS_COUNT;
use glyphwarp_core::imgcore::PIXELS;
use glyphwarp_core::metrics::stderr_of_rate;
use glyphwarp_core::nnet::{evaluate_tally, finetune, pretrain, MlpModel, SdaModel};
use glyphwarp_core::pipeline::{Generator, Pipeline, PipelineSpec, SourceMix, SourceRegistry};
use glyphwarp_core::{ClassSet, GreyImage, RngStream};

type Result<T> = std::result::Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "glyphwarp", version, about = "Perturbed character datasets and the MLP/SDA experiment grid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Raw,
    Nistp,
    P07,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Mlp,
    Sda,
}

#[derive(Clone, Copy, ValueEnum)]
enum Classes {
    All,
    Digits,
    Upper,
    Lower,
}

impl From<Classes> for ClassSet {
    fn from(c: Classes) -> Self {
        match c {
            Classes::All => ClassSet::All,
            Classes::Digits => ClassSet::Digits,
            Classes::Upper => ClassSet::Upper,
            Classes::Lower => ClassSet::Lower,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a CDS dataset.
    Gen {
        #[arg(long, value_enum, default_value = "raw")]
        preset: PresetArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `paper`, a source name, or `name=weight,...`.
        #[arg(long, default_value = "paper")]
        mix: SourceMix,
        #[arg(long)]
        out: PathBuf,
        /// Generate on one thread.
        #[arg(long)]
        serial: bool,
    },
    /// Write a P5 contact sheet of the first rows × cols images.
    Show {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 8)]
        rows: usize,
        #[arg(long, default_value_t = 8)]
        cols: usize,
        /// Defaults to the data path with a `.pgm` extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a model and save a CNM1 checkpoint.
    Train {
        #[arg(long, value_enum)]
        model: ModelKind,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        valid: PathBuf,
        /// `key = value` training settings.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Error rate of a checkpoint on a dataset.
    Eval {
        #[arg(long)]
        model_file: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        classes: Classes,
    },
    /// Run the model × training-set grid.
    Experiment {
        /// `key = value` grid settings; desk defaults otherwise.
        #[arg(long)]
        grid_config: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write a checkpoint per trained model.
        #[arg(long)]
        save_models: bool,
    },
    /// Print the appendix-style tables for a results TSV.
    Report {
        #[arg(long)]
        results: PathBuf,
    },
}

fn spec_of(p: PresetArg) -> PipelineSpec {
    match p {
        PresetArg::Raw => PipelineSpec::raw(),
        PresetArg::Nistp => PipelineSpec::nistp(),
        PresetArg::P07 => PipelineSpec::p07(),
    }
}

fn images(ds: &glyphwarp_core::LabeledDataset) -> Vec<GreyImage> {
    ds.items.iter().map(|s| s.image.clone()).collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { preset, n, seed, mix, out, serial } => {
            let gen = Generator::new(Pipeline::new(), &SourceRegistry::standard(), &mix, &spec_of(preset), seed)?;
            let ds = if serial { gen.dataset(n) } else { generate_parallel(&gen, n) };
            write_cds(&ds, &out)?;
            println!("wrote {n} items to {}", out.display());
        }
        Command::Show { data, rows, cols, out } => {
            let ds = read_cds(&data)?;
            let out = out.unwrap_or_else(|| data.with_extension("pgm"));
            export_contact_sheet(&ds, rows, cols, &out)?;
            println!("wrote {rows}x{cols} sheet to {}", out.display());
        }
        Command::Train { model, train, valid, config, seed, out } => {
            let mut cfg = match config {
                Some(p) => ModelConfig::parse(&fs::read_to_string(p)?)?,
                None => ModelConfig::default(),
            };
            if let Some(s) = seed {
                cfg.train.seed = s;
            }
            let (train, valid) = (read_cds(&train)?, read_cds(&valid)?);
            let labels: Vec<u8> = (0..CLASS_COUNT as u8).collect();
            let mut rng = RngStream::new(cfg.train.seed);
            let mut m = match model {
                ModelKind::Mlp => Model::Mlp(MlpModel::new(PIXELS, cfg.hidden, &labels, &mut rng)),
                ModelKind::Sda => {
                    let mut sda = SdaModel::new(PIXELS, cfg.hidden, &labels, cfg.corruption, false, &mut rng);
                    let losses = pretrain(&mut sda, &images(&train), &cfg.train)?;
                    for (k, l) in losses.iter().enumerate() {
                        eprintln!("layer {} reconstruction {:.3} -> {:.3}", k + 1, l.first().unwrap_or(&f64::NAN), l.last().unwrap_or(&f64::NAN));
                    }
                    Model::Sda(sda)
                }
            };
            let report = finetune(&mut m, &train, &valid, &cfg.train)?;
            if let Some(e) = report.best_valid_error() {
                println!("best validation error {e:.4} at epoch {}", report.best_epoch);
            }
            checkpoint::save(&m, &out)?;
            println!("wrote {} checkpoint to {}", m.kind_name(), out.display());
        }
        Command::Eval { model_file, data, classes } => {
            let model = checkpoint::load(&model_file)?;
            let ds = read_cds(&data)?;
            let subset = ClassSet::from(classes);
            let tally = evaluate_tally(&model, &ds, (subset != ClassSet::All).then_some(subset))?;
            let se = stderr_of_rate(tally.rate(), tally.total)?;
            println!("error {:.4} ± {:.4} on {} items ({})", tally.rate(), se, tally.total, subset.name());
        }
        Command::Experiment { grid_config, out_dir, seed, save_models } => {
            let mut cfg = match grid_config {
                Some(p) => GridConfig::parse(&fs::read_to_string(p)?)?,
                None => GridConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            fs::create_dir_all(&out_dir)?;
            let outcome = run_grid(&cfg, &|msg| eprintln!("{msg}"))?;
            let text = report(&outcome.table);
            fs::write(out_dir.join("results.tsv"), outcome.table.to_tsv())?;
            fs::write(out_dir.join("report.txt"), &text)?;
            if save_models {
                for (name, model) in &outcome.models {
                    if let Some(m) = model {
                        checkpoint::save(m, &out_dir.join(format!("{name}.cnm")))?;
                    }
                }
            }
            for (family, lr) in &outcome.learning_rates {
                println!("{family} learning rate {lr}");
            }
            print!("{text}");
        }
        Command::Report { results } => {
            print!("{}", report(&read_results(&results)?));
        }
    }
    Ok(())
}

fn read_results(path: &Path) -> Result<ResultTable> {
    Ok(ResultTable::from_tsv(&fs::read_to_string(path)?)?)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dqbench::accuracy::QuartileMethod;
use dqbench::classifier::{DiscretizationMethod, NoiseParams, TreeParams};
use dqbench::fisma::{fisma_score, Rubric};
use dqbench::manifest::{parse_manifest, validate_manifest, ParsedManifest};
use dqbench::provenance::Strictness;
use dqbench::report::{
    assemble_report, load_dataset, render, render_matrix_csv, render_matrix_json,
    render_matrix_markdown, run_corpus, AssessParams, CorpusConfig, Format,
};
use dqbench::{Error, Result};

#[derive(Parser)]
#[command(name = "dqbench", version, about = "Data-quality assessment for effort estimation datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiscretizationArg {
    EqualFrequency,
    EqualWidth,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuartileArg {
    Linear,
    Hinges,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrictnessArg {
    Minimal,
    Standard,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Markdown,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixArg {
    Csv,
    Json,
    Markdown,
}

#[derive(clap::Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 4)]
    classes: usize,
    #[arg(long, env = "DQBENCH_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value = "equal-frequency")]
    discretization: DiscretizationArg,
    #[arg(long, value_enum, default_value = "linear")]
    quartiles: QuartileArg,
    #[arg(long, value_enum, default_value = "standard")]
    strictness: StrictnessArg,
    #[arg(long, default_value_t = 2)]
    min_leaf: usize,
    #[arg(long, default_value_t = 0.25)]
    prune_confidence: f64,
    /// Grow the tree without pessimistic pruning.
    #[arg(long)]
    no_prune: bool,
    /// Also score against a FiSMA rubric (JSON); `default` uses the bundled one.
    #[arg(long)]
    rubric: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Assess one dataset.
    Assess {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        target: Option<String>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a manifest, optionally against its data file.
    ValidateManifest {
        manifest: PathBuf,
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Score a manifest against a FiSMA rubric.
    Fisma {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        rubric: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Assess every dataset in a corpus config and write the matrix.
    Corpus {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        matrix: MatrixArg,
        #[command(flatten)]
        model: ModelArgs,
    },
}

fn load_rubric(spec: Option<&str>) -> Result<Rubric> {
    match spec {
        None | Some("default") => Ok(Rubric::default()),
        Some(p) => Rubric::from_path(Path::new(p)),
    }
}

fn params(m: &ModelArgs) -> Result<AssessParams> {
    if !m.no_prune && !(m.prune_confidence > 0.0 && m.prune_confidence <= 0.5) {
        return Err(Error::Usage(format!(
            "--prune-confidence must be in (0, 0.5], got {}",
            m.prune_confidence
        )));
    }
    if m.min_leaf == 0 {
        return Err(Error::Usage("--min-leaf must be at least 1".into()));
    }
    Ok(AssessParams {
        noise: NoiseParams {
            folds: m.folds,
            classes: m.classes,
            method: match m.discretization {
                DiscretizationArg::EqualFrequency => DiscretizationMethod::EqualFrequency,
                DiscretizationArg::EqualWidth => DiscretizationMethod::EqualWidth,
            },
            seed: m.seed,
            tree: TreeParams {
                min_leaf: m.min_leaf,
                prune_confidence: (!m.no_prune).then_some(m.prune_confidence),
            },
        },
        quartiles: match m.quartiles {
            QuartileArg::Linear => QuartileMethod::Linear,
            QuartileArg::Hinges => QuartileMethod::Hinges,
        },
        strictness: match m.strictness {
            StrictnessArg::Minimal => Strictness::Minimal,
            StrictnessArg::Standard => Strictness::Standard,
            StrictnessArg::Full => Strictness::Full,
        },
        amount: Default::default(),
        rubric: m.rubric.as_deref().map(|r| load_rubric(Some(r))).transpose()?,
    })
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn warn_all(ws: &[String]) {
    for w in ws {
        eprintln!("warning: {w}");
    }
}

fn read_manifest(p: &Path) -> Result<ParsedManifest> {
    let parsed = parse_manifest(p)?;
    warn_all(&parsed.warnings);
    Ok(parsed)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Assess { data, manifest, target, model, format, out } => {
            let params = params(&model)?;
            let manifest = manifest.as_deref().map(read_manifest).transpose()?.map(|p| p.manifest);
            let target = target.as_deref().or_else(|| manifest.as_ref().and_then(|m| m.target()));
            let ds = load_dataset(&data, manifest.as_ref(), target)?;
            let report = assemble_report(&ds, manifest.as_ref(), &params);
            warn_all(&report.warnings);
            let format = match format {
                FormatArg::Json => Format::Json,
                FormatArg::Markdown => Format::Markdown,
                FormatArg::Csv => Format::CsvRow,
            };
            emit(&render(&report, format), out.as_deref())?;
        }
        Command::ValidateManifest { manifest, data } => {
            let parsed = read_manifest(&manifest)?;
            let ds = match &data {
                Some(d) => Some(load_dataset(d, Some(&parsed.manifest), parsed.manifest.target())?),
                None => None,
            };
            let report = validate_manifest(&parsed.manifest, ds.as_ref());
            warn_all(&report.warnings);
            for e in &report.errors {
                eprintln!("error: {e}");
            }
            println!(
                "completeness: {}/{} ({:.1}%)",
                report.populated,
                report.total,
                report.completeness * 100.0
            );
            if !report.errors.is_empty() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Fisma { manifest, rubric, data } => {
            let parsed = read_manifest(&manifest)?;
            let rubric = match rubric {
                Some(p) => Rubric::from_path(&p)?,
                None => Rubric::default(),
            };
            let ds = match &data {
                Some(d) => Some(load_dataset(d, Some(&parsed.manifest), parsed.manifest.target())?),
                None => None,
            };
            let score = fisma_score(&parsed.manifest, ds.as_ref(), &rubric)?;
            let mut text = serde_json::to_string_pretty(&score).expect("score serializes");
            text.push('\n');
            emit(&text, None)?;
        }
        Command::Corpus { config, out, matrix, model } => {
            let params = params(&model)?;
            let cfg = CorpusConfig::from_path(&config)?;
            let result = run_corpus(&cfg, &params);
            for (name, r) in result.names.iter().zip(&result.reports) {
                if let Err(e) = r {
                    eprintln!("error: {name}: {e}");
                }
            }
            let doc = result.matrix();
            let text = match matrix {
                MatrixArg::Csv => render_matrix_csv(&doc),
                MatrixArg::Json => render_matrix_json(&doc),
                MatrixArg::Markdown => render_matrix_markdown(&doc),
            };
            emit(&text, out.as_deref())?;
            match doc.records_noise_spearman {
                Some(r) => eprintln!("spearman(records, noise) = {r:.3}"),
                None => eprintln!("spearman(records, noise) = n/a"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

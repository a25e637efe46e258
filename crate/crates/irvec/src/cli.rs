//! Argument parsing and drivers for the `irvec` and `irvec-eval`
//! binaries. The binaries stay thin: everything here delegates to the
//! library modules.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::encoder::{self, EncodingConfig, Mode, VectorLevel};
use crate::error::{Error, Result};
use crate::flow;
use crate::gbdt;
use crate::inspect;
use crate::ir;
use crate::transe::{self, Distance, TrainConfig};
use crate::triplet;
use crate::vocab::SeedVocabulary;

/// Program embeddings for the LLVM-IR subset: triplet extraction, seed
/// embedding training, symbolic / flow-aware encoding and diagnostics.
#[derive(Parser, Debug)]
#[command(name = "irvec", version, about)]
pub struct IrvecCli {
    #[command(subcommand)]
    pub command: IrvecCommand,
}

#[derive(Subcommand, Debug)]
pub enum IrvecCommand {
    /// Extract <head, relation, tail> triplets from .ll files.
    Extract(ExtractArgs),
    /// Train a seed embedding vocabulary from a triplet file.
    Train(TrainArgs),
    /// Encode a .ll file into vectors at the chosen granularity.
    Encode(EncodeArgs),
    /// Print reaching definitions of one function (debug aid).
    Rd(RdArgs),
    /// Vocabulary diagnostics.
    #[command(subcommand)]
    Inspect(InspectCommand),
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    /// Input .ll files, processed in order.
    #[arg(long, num_args = 1.., required = true)]
    pub input: Vec<PathBuf>,
    /// Output triplet file (tab-separated); `-` for stdout.
    #[arg(long, default_value = "-")]
    pub output: String,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub triplets: PathBuf,
    #[arg(long, default_value_t = 300)]
    pub dim: usize,
    #[arg(long, default_value_t = 1500)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1.0)]
    pub margin: f64,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Distance norm: l1 or l2.
    #[arg(long, default_value = "l2")]
    pub distance: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Print the mean loss every N epochs (0 silences the log).
    #[arg(long, default_value_t = 100)]
    pub log_every: usize,
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[arg(long)]
    pub vocab: PathBuf,
    /// symbolic or flow-aware.
    #[arg(long, default_value = "flow-aware")]
    pub mode: String,
    /// inst, bb, func or prog.
    #[arg(long, default_value = "prog")]
    pub level: String,
    #[arg(long, default_value_t = 1.0)]
    pub wo: f64,
    #[arg(long, default_value_t = 0.5)]
    pub wt: f64,
    #[arg(long, default_value_t = 0.2)]
    pub wa: f64,
    #[arg(long)]
    pub input: PathBuf,
    /// Output vector file; `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Args, Debug)]
pub struct RdArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub function: String,
}

#[derive(Subcommand, Debug)]
pub enum InspectCommand {
    /// Nearest entities to a query entity, by L2 distance.
    Neighbors(NeighborsArgs),
    /// Project all entity embeddings onto their top two principal
    /// components and write name,x,y rows.
    Pca(PcaArgs),
    /// Mean intra-group vs inter-group distances for entity groups.
    Separation(SeparationArgs),
}

#[derive(Args, Debug)]
pub struct NeighborsArgs {
    #[arg(long)]
    pub vocab: PathBuf,
    #[arg(long)]
    pub entity: String,
    #[arg(short, default_value_t = 5)]
    pub k: usize,
}

#[derive(Args, Debug)]
pub struct PcaArgs {
    #[arg(long)]
    pub vocab: PathBuf,
    /// Output CSV (`name,x,y`); `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Args, Debug)]
pub struct SeparationArgs {
    #[arg(long)]
    pub vocab: PathBuf,
    /// TOML file with a `[groups]` table: group name -> entity list.
    #[arg(long)]
    pub groups: PathBuf,
}

pub fn run_irvec(cli: IrvecCli) -> Result<()> {
    match cli.command {
        IrvecCommand::Extract(args) => cmd_extract(args),
        IrvecCommand::Train(args) => cmd_train(args),
        IrvecCommand::Encode(args) => cmd_encode(args),
        IrvecCommand::Rd(args) => cmd_rd(args),
        IrvecCommand::Inspect(cmd) => match cmd {
            InspectCommand::Neighbors(args) => cmd_neighbors(args),
            InspectCommand::Pca(args) => cmd_pca(args),
            InspectCommand::Separation(args) => cmd_separation(args),
        },
    }
}

/// Write a line to stdout; a closed pipe (e.g. `| head`) ends the
/// program quietly instead of panicking.
fn emit(args: std::fmt::Arguments) -> Result<()> {
    use std::io::Write as _;
    let mut out = std::io::stdout().lock();
    match out.write_fmt(args) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        r => Ok(r?),
    }
}

macro_rules! outln {
    ($($arg:tt)*) => { emit(format_args!("{}\n", format_args!($($arg)*)))? };
}

fn write_output(target: &str, content: &str) -> Result<()> {
    if target == "-" {
        emit(format_args!("{}", content))
    } else {
        std::fs::write(target, content)?;
        Ok(())
    }
}

fn cmd_extract(args: ExtractArgs) -> Result<()> {
    let mut all = Vec::new();
    for path in &args.input {
        let text = std::fs::read_to_string(path)?;
        let name = path.file_name().map(|s| s.to_string_lossy().to_string());
        let module = ir::parse_module_named(&text, name.as_deref().unwrap_or("module"))?;
        all.extend(triplet::extract_triplets(&module));
    }
    let (entities, relations, total) = triplet::triplet_stats(&all);
    let mut buf = Vec::new();
    triplet::write_triplets(&mut buf, &all)?;
    write_output(&args.output, std::str::from_utf8(&buf).expect("utf8"))?;
    eprintln!("{} triplets, {} entities, {} relations", total, entities, relations);
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.triplets)?;
    let triplets = triplet::read_triplets(&text)?;
    let distance = match args.distance.as_str() {
        "l1" => Distance::L1,
        "l2" => Distance::L2,
        other => return Err(Error::InvalidConfig(format!("unknown distance `{}`", other))),
    };
    let config = TrainConfig {
        dimension: args.dim,
        epochs: args.epochs,
        margin: args.margin,
        learning_rate: args.lr,
        batch_size: args.batch_size,
        rng_seed: args.seed,
        distance,
    };
    let log_every = args.log_every;
    let vocab = transe::train_with_report(&triplets, &config, |r| {
        if log_every > 0 && (r.epoch % log_every == 0 || r.epoch + 1 == config.epochs) {
            eprintln!("epoch {:>5}  mean loss {:.6}", r.epoch, r.mean_loss);
        }
    })?;
    vocab.save(&args.out)?;
    eprintln!(
        "trained {} entities, {} relations (dim {}) -> {}",
        vocab.entities.len(),
        vocab.relations.len(),
        vocab.dimension,
        args.out.display()
    );
    Ok(())
}

fn cmd_encode(args: EncodeArgs) -> Result<()> {
    let vocab = SeedVocabulary::load(&args.vocab)?;
    let mode = match args.mode.as_str() {
        "symbolic" => Mode::Symbolic,
        "flow-aware" => Mode::FlowAware,
        other => return Err(Error::InvalidConfig(format!("unknown mode `{}`", other))),
    };
    let level = match args.level.as_str() {
        "inst" => VectorLevel::Instruction,
        "bb" => VectorLevel::Block,
        "func" => VectorLevel::Function,
        "prog" => VectorLevel::Program,
        other => return Err(Error::InvalidConfig(format!("unknown level `{}`", other))),
    };
    let text = std::fs::read_to_string(&args.input)?;
    let file_name = args
        .input
        .file_name()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "module".to_string());
    let module = ir::parse_module_named(&text, &file_name)?;
    let config = EncodingConfig::new(mode, vocab.dimension).with_weights(args.wo, args.wt, args.wa);
    let vectors = encoder::encode(&module, &vocab, config)?;
    write_output(&args.out, &vectors.format_level(level, &file_name))?;
    Ok(())
}

fn cmd_rd(args: RdArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.input)?;
    let module = ir::parse_module(&text)?;
    let func = module
        .function(&args.function)
        .filter(|f| f.is_definition)
        .ok_or_else(|| Error::UnknownFunction(args.function.clone()))?;
    let rd = flow::reaching_definitions(func);
    for ((instr, operand), sites) in &rd.uses {
        let ids: Vec<String> = sites.iter().map(|d| d.instr.to_string()).collect();
        outln!("{}.{}: {{{}}}", instr, operand, ids.join(", "));
    }
    Ok(())
}

fn cmd_neighbors(args: NeighborsArgs) -> Result<()> {
    let vocab = SeedVocabulary::load(&args.vocab)?;
    for (name, dist) in inspect::nearest_neighbors(&vocab, &args.entity, args.k)? {
        outln!("{}\t{:.6}", name, dist);
    }
    Ok(())
}

fn cmd_pca(args: PcaArgs) -> Result<()> {
    let vocab = SeedVocabulary::load(&args.vocab)?;
    let proj = inspect::pca2(&vocab.entities)?;
    let mut out = String::from("name,x,y\n");
    for (name, (x, y)) in &proj.points {
        out.push_str(&format!("{},{},{}\n", name, x, y));
    }
    write_output(&args.out, &out)?;
    eprintln!(
        "explained variance: {:.4} + {:.4}",
        proj.explained_variance.0, proj.explained_variance.1
    );
    Ok(())
}

fn cmd_separation(args: SeparationArgs) -> Result<()> {
    let vocab = SeedVocabulary::load(&args.vocab)?;
    let text = std::fs::read_to_string(&args.groups)?;
    let groups = parse_groups_toml(&text)?;
    let (intra, inter) = inspect::cluster_separation(&vocab, &groups)?;
    outln!("mean_intra\t{:.6}", intra);
    outln!("mean_inter\t{:.6}", inter);
    Ok(())
}

/// Parse `[groups]` from a TOML file: each key maps to an entity array.
pub fn parse_groups_toml(text: &str) -> Result<BTreeMap<String, Vec<String>>> {
    let table: toml::Table =
        text.parse().map_err(|e| Error::Format(format!("groups file: {}", e)))?;
    let groups = table
        .get("groups")
        .and_then(|v| v.as_table())
        .ok_or_else(|| Error::Format("missing [groups] table".into()))?;
    let mut out = BTreeMap::new();
    for (name, value) in groups {
        let arr = value
            .as_array()
            .ok_or_else(|| Error::Format(format!("group `{}` must be an array", name)))?;
        let mut members = Vec::new();
        for item in arr {
            members.push(
                item.as_str()
                    .ok_or_else(|| {
                        Error::Format(format!("group `{}` has a non-string member", name))
                    })?
                    .to_string(),
            );
        }
        out.insert(name.clone(), members);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// irvec-eval
// ---------------------------------------------------------------------------

/// Gradient-boosted tree evaluation over program vectors.
#[derive(Parser, Debug)]
#[command(name = "irvec-eval", version, about)]
pub struct EvalCli {
    #[command(subcommand)]
    pub command: EvalCommand,
}

#[derive(Subcommand, Debug)]
pub enum EvalCommand {
    /// Stratified k-fold cross-validation on a labeled vector dataset.
    Cv(CvArgs),
}

#[derive(Args, Debug)]
pub struct CvArgs {
    /// CSV with header `label,f1,...,fd`.
    #[arg(long)]
    pub data: PathBuf,
    /// Optional CSV of auxiliary numeric columns appended by row index.
    #[arg(long)]
    pub aux: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub lr: f64,
    #[arg(long, default_value_t = 70)]
    pub trees: usize,
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

pub fn run_eval(cli: EvalCli) -> Result<()> {
    match cli.command {
        EvalCommand::Cv(args) => cmd_cv(args),
    }
}

fn cmd_cv(args: CvArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.data)?;
    let mut dataset = gbdt::Dataset::from_csv(&text)?;
    if let Some(aux) = &args.aux {
        let aux_text = std::fs::read_to_string(aux)?;
        dataset.append_aux_csv(&aux_text)?;
    }
    let config = gbdt::GbdtConfig {
        learning_rate: args.lr,
        n_estimators: args.trees,
        max_depth: args.depth,
        n_folds: args.folds,
        rng_seed: args.seed,
    };
    let (accs, mean) = gbdt::cross_validate(&dataset, &config)?;
    for (i, acc) in accs.iter().enumerate() {
        outln!("fold {}\t{:.4}", i, acc);
    }
    outln!("mean\t{:.4}", mean);
    Ok(())
}

//! `wtopo`: witness-complex topological features for graphs.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array2;
use serde_json::json;
use tempfile::NamedTempFile;

use wtopo::complexes::{sandwich_check, vr_filtration};
use wtopo::encodings::{
    broadcast_local, global_diagram, local_diagrams, topo_loss, topo_loss_grad, witness_diagram, EncodingConfig,
    NodeFeatureMatrix, TopoLossConfig,
};
use wtopo::graph::{build_knn_graph, diameter, geodesics, read_edge_list, write_edge_list, Graph};
use wtopo::landmarks::{build_cover, select_landmarks};
use wtopo::persistence::{
    compute_persistence, diagram_distance_with, Algorithm, DistanceMode, EssentialMatching, PersistenceDiagram,
};
use wtopo::robustness::{budget_from_rate, perturb, stability_sweep, PerturbMode, PerturbSpec, SweepConfig};
use wtopo::vectorize::{persistence_image, EssentialPolicy, PIConfig};

#[derive(Parser)]
#[command(name = "wtopo", version, about = "Witness-complex topological features for graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select degree-ranked landmarks (JSON)
    Landmarks(LandmarksArgs),
    /// Build the landmark cover (JSON)
    Cover(LandmarksArgs),
    /// Persistence diagram of a witness or Vietoris-Rips complex (JSON)
    Diagram(DiagramArgs),
    /// Persistence image of a diagram (CSV)
    Image(ImageArgs),
    /// Per-node local witness features (CSV or binary)
    LocalFeatures(FeatureArgs),
    /// Global witness image broadcast to every node (CSV or binary)
    GlobalFeatures(FeatureArgs),
    /// Topological loss of a diagram
    Loss(LossArgs),
    /// Bottleneck or Wasserstein distance between two diagrams
    Distance(DistanceArgs),
    /// Flip node pairs of a graph (edge list)
    Perturb(PerturbArgs),
    /// Stability sweep over perturbation budgets (CSV)
    Sweep(SweepArgs),
    /// Check the Vietoris-Rips / witness containment on a graph (JSON)
    Sandwich(SandwichArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list (`u v [w]` per line); with --knn, a CSV of node features
    #[arg(short, long)]
    input: PathBuf,
    /// Build a cosine kNN graph with this many neighbours from a feature CSV
    /// [default: off, input is an edge list]
    #[arg(long)]
    knn: Option<usize>,
}

#[derive(Args)]
struct OutputArg {
    /// Output path, `-` for standard output
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
}

#[derive(Args)]
struct ComplexArgs {
    /// Share of nodes used as landmarks
    #[arg(long, default_value_t = 0.05)]
    fraction: f64,
    /// Highest homology dimension reported (0 or 1)
    #[arg(long, default_value_t = 0)]
    max_dim: usize,
    /// Largest filtration scale kept
    #[arg(long, default_value_t = f64::INFINITY)]
    max_scale: f64,
    /// Lazy-witness relaxation
    #[arg(long, default_value_t = 0)]
    nu: usize,
    /// Persistence algorithm
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Reduction)]
    algorithm: AlgorithmArg,
}

#[derive(Args)]
struct ImageOptions {
    /// Pixels per image side
    #[arg(long, default_value_t = PIConfig::DEFAULT_RESOLUTION)]
    grid: usize,
    /// Standard deviation of the Gaussian kernel
    #[arg(long, default_value_t = PIConfig::DEFAULT_SIGMA)]
    sigma: f64,
    /// Birth and persistence range `LO,HI` [default: 0,diameter]
    #[arg(long, value_name = "LO,HI", value_parser = parse_range)]
    range: Option<(f64, f64)>,
    /// What to do with classes that never die
    #[arg(long, value_enum, default_value_t = EssentialArg::Cap)]
    essential_policy: EssentialArg,
    /// Death assigned to essential classes under `cap` [default: diameter + 1]
    #[arg(long)]
    cap: Option<f64>,
}

impl ImageOptions {
    /// `scale` is the graph diameter, or the largest finite death for a
    /// bare diagram.
    fn config(&self, scale: f64) -> PIConfig {
        let mut cfg = PIConfig::for_diameter(scale);
        cfg.resolution = self.grid;
        cfg.sigma = self.sigma;
        if let Some(r) = self.range {
            cfg.birth_range = r;
            cfg.persistence_range = r;
        }
        cfg.essential = match self.essential_policy {
            EssentialArg::Drop => EssentialPolicy::Drop,
            EssentialArg::Cap => EssentialPolicy::Cap(self.cap.unwrap_or(scale + 1.0)),
        };
        cfg
    }

    fn needs_scale(&self) -> bool {
        self.range.is_none() || (self.essential_policy == EssentialArg::Cap && self.cap.is_none())
    }
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((num(lo)?, num(hi)?))
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Reduction,
    UnionFind,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Reduction => Algorithm::Reduction,
            AlgorithmArg::UnionFind => Algorithm::UnionFind,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EssentialArg {
    Cap,
    Drop,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EssentialMatchArg {
    Match,
    Drop,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ComplexArg {
    Witness,
    Vr,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Binary,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Bottleneck,
    Wasserstein,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Random,
    Targeted,
}

#[derive(Args)]
struct LandmarksArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Share of nodes used as landmarks
    #[arg(long, default_value_t = 0.05)]
    fraction: f64,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args)]
struct DiagramArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Complex built on the landmarks
    #[arg(long, value_enum, default_value_t = ComplexArg::Witness)]
    complex: ComplexArg,
    #[command(flatten)]
    complex_args: ComplexArgs,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args)]
struct ImageArgs {
    /// Diagram JSON
    #[arg(short, long)]
    input: PathBuf,
    /// Homology dimension to vectorize
    #[arg(long, default_value_t = 0)]
    dim: usize,
    #[command(flatten)]
    image: ImageOptions,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args)]
struct FeatureArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    complex_args: ComplexArgs,
    #[command(flatten)]
    image: ImageOptions,
    /// Matrix encoding: CSV rows, or little-endian `u64 rows, u64 cols, f64...`
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args)]
struct LossOptions {
    /// Persistence exponent
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Midlife exponent
    #[arg(long, default_value_t = 0.0)]
    q: f64,
}

#[derive(Args)]
struct LossArgs {
    /// Diagram JSON
    #[arg(short, long)]
    input: PathBuf,
    /// Homology dimension
    #[arg(long, default_value_t = 0)]
    dim: usize,
    #[command(flatten)]
    loss: LossOptions,
    /// Write per-point gradients as CSV instead of the loss value [default: off]
    #[arg(long, default_value_t = false)]
    grad: bool,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args)]
struct DistanceArgs {
    /// First diagram JSON
    first: PathBuf,
    /// Second diagram JSON
    second: PathBuf,
    /// Diagram distance
    #[arg(long, value_enum, default_value_t = MetricArg::Bottleneck)]
    metric: MetricArg,
    /// Wasserstein exponent
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Homology dimension
    #[arg(long, default_value_t = 0)]
    dim: usize,
    /// Essential classes: `match` pairs them by sorted birth (unequal counts
    /// give inf), `drop` ignores them
    #[arg(long, value_enum, default_value_t = EssentialMatchArg::Match)]
    essential_policy: EssentialMatchArg,
}

#[derive(Args)]
struct PerturbOptions {
    /// Which pairs may be flipped
    #[arg(long, value_enum, default_value_t = ModeArg::Random)]
    mode: ModeArg,
    /// Random seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl PerturbOptions {
    fn mode(&self, fraction: f64) -> PerturbMode {
        match self.mode {
            ModeArg::Random => PerturbMode::Random,
            ModeArg::Targeted => PerturbMode::LandmarkTargeted { fraction },
        }
    }
}

#[derive(Args)]
struct PerturbArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Number of node pairs to flip
    #[arg(long, default_value_t = 0, conflicts_with = "rate")]
    budget: usize,
    /// Flip `round(rate * edges)` pairs instead of --budget [default: unset]
    #[arg(long)]
    rate: Option<f64>,
    /// Landmark share for the targeted mode
    #[arg(long, default_value_t = 0.05)]
    fraction: f64,
    #[command(flatten)]
    perturb: PerturbOptions,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Ascending flip budgets
    #[arg(long, alias = "budget", value_delimiter = ',', default_value = "0,1,2,4,8", conflicts_with = "rates")]
    budgets: Vec<usize>,
    /// Ascending flip rates, converted with `round(rate * edges)` [default: unset]
    #[arg(long, alias = "rate", value_delimiter = ',')]
    rates: Option<Vec<f64>>,
    /// Trials per budget; trial `t` uses seed `seed + t`
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[command(flatten)]
    complex_args: ComplexArgs,
    #[command(flatten)]
    image: ImageOptions,
    #[command(flatten)]
    loss: LossOptions,
    /// Exponent of the Wasserstein distance between local diagrams
    #[arg(long, default_value_t = 1.0)]
    wasserstein_p: f64,
    /// Keep the clean graph's landmarks on perturbed graphs [default: off]
    #[arg(long, default_value_t = false)]
    freeze_landmarks: bool,
    #[command(flatten)]
    perturb: PerturbOptions,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args)]
struct SandwichArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Share of nodes used as landmarks
    #[arg(long, default_value_t = 0.05)]
    fraction: f64,
    /// Scale to test [default: 2 * cover radius + 1]
    #[arg(long)]
    alpha: Option<f64>,
    /// Highest homology dimension whose simplices are compared
    #[arg(long, default_value_t = 1)]
    max_dim: usize,
    /// Lazy-witness relaxation
    #[arg(long, default_value_t = 0)]
    nu: usize,
    #[command(flatten)]
    out: OutputArg,
}

fn read_features(path: &Path) -> Result<Array2<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .with_context(|| format!("{}:{}: invalid number", path.display(), i + 1))?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                bail!("{}:{}: expected {} columns, found {}", path.display(), i + 1, first.len(), row.len());
            }
        }
        rows.push(row);
    }
    let cols = rows.first().map_or(0, Vec::len);
    Ok(Array2::from_shape_vec((rows.len(), cols), rows.concat())?)
}

fn load_graph(args: &GraphArgs) -> Result<Graph> {
    match args.knn {
        Some(k) => Ok(build_knn_graph(&read_features(&args.input)?, k)?),
        None => read_edge_list(&args.input).with_context(|| format!("loading {}", args.input.display())),
    }
}

fn load_diagram(path: &Path) -> Result<PersistenceDiagram> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    PersistenceDiagram::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Writes to stdout, or to a temporary file next to `path` that is renamed
/// into place once complete.
fn emit(path: &Path, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    if path == Path::new("-") {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        write(&mut lock)?;
        lock.flush()?;
        return Ok(());
    }
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        write(&mut w)?;
        w.flush()?;
    }
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit_text(path: &Path, text: &str) -> Result<()> {
    emit(path, |w| Ok(writeln!(w, "{text}")?))
}

fn encoding_config(g: &Graph, c: &ComplexArgs, image: &ImageOptions) -> EncodingConfig {
    let scale = if image.needs_scale() { diameter(g) } else { 0.0 };
    let mut cfg = EncodingConfig::new(c.fraction, image.config(scale));
    cfg.homology_dim = c.max_dim;
    cfg.nu = c.nu;
    cfg.max_scale = c.max_scale;
    cfg.algorithm = c.algorithm.into();
    cfg
}

fn write_matrix(m: &NodeFeatureMatrix, format: FormatArg, path: &Path) -> Result<()> {
    emit(path, |w| {
        match format {
            FormatArg::Csv => m.write_csv(w)?,
            FormatArg::Binary => m.write_binary(w)?,
        }
        Ok(())
    })
}

fn landmarks(a: LandmarksArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let ls = select_landmarks(&g, a.fraction)?;
    emit_text(&a.out.output, &serde_json::to_string_pretty(&ls)?)
}

fn cover(a: LandmarksArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let cover = build_cover(&g, &select_landmarks(&g, a.fraction)?)?;
    emit_text(&a.out.output, &cover.to_json()?)
}

fn diagram(a: DiagramArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let c = &a.complex_args;
    if c.max_dim > 1 {
        bail!(wtopo::Error::Argument("--max-dim must be 0 or 1".into()));
    }
    let ls = select_landmarks(&g, c.fraction)?;
    let d = match a.complex {
        ComplexArg::Witness => {
            let mut cfg = EncodingConfig::new(c.fraction, PIConfig::for_diameter(1.0));
            cfg.homology_dim = c.max_dim;
            cfg.nu = c.nu;
            cfg.max_scale = c.max_scale;
            cfg.algorithm = c.algorithm.into();
            witness_diagram(&g, &ls.landmarks, &cfg)?
        }
        ComplexArg::Vr => {
            let land = geodesics(&g, &ls.landmarks)?.columns(&ls.landmarks);
            let f = vr_filtration(&land, c.max_dim + 1, c.max_scale)?;
            compute_persistence(&f, c.algorithm.into())?.truncated(c.max_dim)
        }
    };
    emit_text(&a.out.output, &d.to_json()?)
}

fn image(a: ImageArgs) -> Result<()> {
    let d = load_diagram(&a.input)?;
    let top = d.finite(a.dim).iter().map(|p| p.1).fold(0.0, f64::max);
    let pi = persistence_image(&d, &a.image.config(top), a.dim)?;
    emit(&a.out.output, |w| Ok(pi.write_csv(w)?))
}

fn local_features(a: FeatureArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let cfg = encoding_config(&g, &a.complex_args, &a.image);
    let m = broadcast_local(&local_diagrams(&g, &cfg)?, g.num_nodes(), &cfg)?;
    write_matrix(&m, a.format, &a.out.output)
}

fn global_features(a: FeatureArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let cfg = encoding_config(&g, &a.complex_args, &a.image);
    let (_, d) = global_diagram(&g, &cfg)?;
    let pi = persistence_image(&d, &cfg.image, cfg.homology_dim)?;
    write_matrix(&NodeFeatureMatrix::broadcast_global(&pi, g.num_nodes()), a.format, &a.out.output)
}

fn loss(a: LossArgs) -> Result<()> {
    let d = load_diagram(&a.input)?;
    let cfg = TopoLossConfig::new(a.loss.p, a.loss.q)?;
    if !a.grad {
        return emit_text(&a.out.output, &topo_loss(&d, &cfg, a.dim).to_string());
    }
    let grads = topo_loss_grad(&d, &cfg, a.dim);
    emit(&a.out.output, |w| {
        writeln!(w, "birth,death,d_birth,d_death")?;
        for ((b, de), g) in d.finite(a.dim).into_iter().zip(grads) {
            writeln!(w, "{b},{de},{},{}", g.d_birth, g.d_death)?;
        }
        Ok(())
    })
}

fn distance(a: DistanceArgs) -> Result<()> {
    let (d1, d2) = (load_diagram(&a.first)?, load_diagram(&a.second)?);
    let mode = match a.metric {
        MetricArg::Bottleneck => DistanceMode::Bottleneck,
        MetricArg::Wasserstein => DistanceMode::Wasserstein(a.p),
    };
    let essential = match a.essential_policy {
        EssentialMatchArg::Match => EssentialMatching::Match,
        EssentialMatchArg::Drop => EssentialMatching::Drop,
    };
    println!("{}", diagram_distance_with(&d1, &d2, mode, a.dim, essential)?);
    Ok(())
}

fn perturb_cmd(a: PerturbArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let budget = match a.rate {
        Some(r) => budget_from_rate(&g, r)?,
        None => a.budget,
    };
    eprintln!("seed: {}", a.perturb.seed);
    let spec = PerturbSpec {
        budget,
        mode: a.perturb.mode(a.fraction),
        seed: a.perturb.seed,
    };
    let h = perturb(&g, &spec)?;
    emit(&a.out.output, |w| Ok(write_edge_list(&h, w)?))
}

fn sweep(a: SweepArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let budgets = match &a.rates {
        Some(rates) => rates.iter().map(|&r| budget_from_rate(&g, r)).collect::<wtopo::Result<Vec<_>>>()?,
        None => a.budgets.clone(),
    };
    let mut cfg = SweepConfig::new(budgets, a.trials, encoding_config(&g, &a.complex_args, &a.image));
    cfg.loss = TopoLossConfig::new(a.loss.p, a.loss.q)?;
    cfg.mode = a.perturb.mode(a.complex_args.fraction);
    cfg.base_seed = a.perturb.seed;
    cfg.wasserstein_p = a.wasserstein_p;
    cfg.freeze_landmarks = a.freeze_landmarks;
    eprintln!("seed: {}", a.perturb.seed);
    let report = stability_sweep(&g, &cfg)?;
    emit(&a.out.output, |w| Ok(report.write_csv(w)?))
}

fn sandwich(a: SandwichArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let ls = select_landmarks(&g, a.fraction)?;
    let cover = build_cover(&g, &ls)?;
    let epsilon = cover.cover_radius;
    let alpha = a.alpha.unwrap_or(2.0 * epsilon + 1.0);
    let dists = geodesics(&g, &ls.landmarks)?;
    let verdict = sandwich_check(
        &dists.columns(&ls.landmarks),
        &dists.as_array().t().to_owned(),
        alpha,
        epsilon,
        a.max_dim + 1,
        a.nu.min(ls.len()),
    )?;
    let out = json!({
        "landmarks": ls.len(),
        "alpha": alpha,
        "epsilon": epsilon,
        "epsilon_pairwise": cover.epsilon_pairwise,
        "result": verdict,
    });
    emit_text(&a.out.output, &serde_json::to_string_pretty(&out)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Landmarks(a) => landmarks(a),
        Command::Cover(a) => cover(a),
        Command::Diagram(a) => diagram(a),
        Command::Image(a) => image(a),
        Command::LocalFeatures(a) => local_features(a),
        Command::GlobalFeatures(a) => global_features(a),
        Command::Loss(a) => loss(a),
        Command::Distance(a) => distance(a),
        Command::Perturb(a) => perturb_cmd(a),
        Command::Sweep(a) => sweep(a),
        Command::Sandwich(a) => sandwich(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            // bad option values that only the library can judge are usage errors
            match e.downcast_ref::<wtopo::Error>() {
                Some(wtopo::Error::Argument(_)) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

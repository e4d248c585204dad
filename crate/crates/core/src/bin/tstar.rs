use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand, ValueEnum};

use tstar::app::experiment::{self, ExperimentConfig};
use tstar::app::format::{
    parse_certificate, parse_graph, parse_targets, write_certificate, write_graph, write_orientation,
};
use tstar::app::generate::{generate, GenSpec};
use tstar::app::verify::verify_decomposition;
use tstar::graph::{bipartition, edge_connectivity, girth, is_k_edge_connected, MultiGraph, Side};
use tstar::orientation::{orient_mod, OrientError, ResidueTarget};
use tstar::splitter::{connected_fractional_split, SplitConfig, SplitError};
use tstar::treedecomp::bounds::bound_by_name;
use tstar::treedecomp::{decompose, DecompError, DecomposeOptions, Kind};

/// Tree decompositions of edge-connected bipartite multigraphs, with
/// independently checkable certificates.
#[derive(Parser)]
#[command(name = "tstar", version)]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Hom,
    Iso,
}

impl From<ModeArg> for Kind {
    fn from(m: ModeArg) -> Kind {
        match m {
            ModeArg::Hom => Kind::Homomorphic,
            ModeArg::Iso => Kind::Isomorphic,
        }
    }
}

#[derive(Args)]
struct Strictness {
    /// Refuse inputs below the proven connectivity thresholds.
    #[arg(long, conflicts_with = "attempt")]
    strict: bool,
    /// Run below the thresholds and rely on verification (default).
    #[arg(long)]
    attempt: bool,
}

impl Strictness {
    fn config(&self, seed: u64) -> SplitConfig {
        if self.strict {
            SplitConfig::strict(seed)
        } else {
            SplitConfig::attempt(seed)
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Print size, sides, degrees, connectivity and girth of a graph.
    Analyze { graph: PathBuf },
    /// Decompose a graph into copies of a tree and write the certificate.
    Decompose {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, value_enum, default_value = "hom")]
        mode: ModeArg,
        #[command(flatten)]
        strictness: Strictness,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge connectivity asked of intermediate parts.
        #[arg(long)]
        lambda: Option<usize>,
        /// Seeds tried per part in attempt mode.
        #[arg(long, default_value_t = 3)]
        attempts: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a certificate against a graph and a tree.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        cert: PathBuf,
        #[arg(long, value_enum, default_value = "hom")]
        require: ModeArg,
    },
    /// Orient a graph with outdegrees prescribed modulo `k`.
    Orient {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long = "mod")]
        modulus: u64,
        #[arg(long)]
        targets: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split off a connected part holding 2/m of every class-A degree with
    /// class-B degrees prescribed modulo `k`.
    Split {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        lambda: usize,
        /// Residues for class B; by default all zero except a correction at
        /// the lowest class-B vertex.
        #[arg(long)]
        targets: Option<PathBuf>,
        #[command(flatten)]
        strictness: Strictness,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the split-off part.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the remainder.
        #[arg(long)]
        rest: Option<PathBuf>,
    },
    /// Evaluate a connectivity bound exactly.
    Bounds {
        #[arg(long)]
        kind: String,
        #[arg(long, num_args = 0.., value_delimiter = ',')]
        params: Vec<u64>,
    },
    /// Write a generated instance: bipartite, regular, even-simple, bundle,
    /// or one of the fixtures c4, c8, k4, k33, k44.
    Gen {
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
        #[arg(long)]
        connectivity: Option<usize>,
        #[arg(long, default_value_t = 0)]
        noise: usize,
        #[arg(long)]
        divisible_by: Option<usize>,
        #[arg(long, default_value_t = 4)]
        min_degree: usize,
    },
    /// Run a batch of seeded trials and write one CSV row per trial.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// A failed command: exit 1 for a rejected or failed run, 2 for bad input.
struct Fail {
    code: u8,
    err: anyhow::Error,
}

fn bad_input(err: impl Into<anyhow::Error>) -> Fail {
    Fail { code: 2, err: err.into() }
}

fn rejected(err: impl Into<anyhow::Error>) -> Fail {
    Fail { code: 1, err: err.into() }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(bad_input)
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(rejected)
}

fn load_graph(path: &Path) -> Result<MultiGraph, Fail> {
    parse_graph(&read(path)?)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(bad_input)
}

fn is_precondition(e: &DecompError) -> bool {
    match e {
        DecompError::NotATree
        | DecompError::NotBipartite
        | DecompError::NotDivisible { .. }
        | DecompError::SizeNotDivisible { .. }
        | DecompError::GirthTooSmall { .. }
        | DecompError::PreconditionViolated(_) => true,
        DecompError::Split(s) => split_precondition(s),
        _ => false,
    }
}

fn split_precondition(e: &SplitError) -> bool {
    matches!(
        e,
        SplitError::InvalidBipartition
            | SplitError::NotDivisible { .. }
            | SplitError::SizeNotDivisible { .. }
            | SplitError::InfeasibleTarget
            | SplitError::BelowThreshold { .. }
            | SplitError::InvalidRequest(_)
            | SplitError::Orient(OrientError::SumConditionViolated { .. })
    )
}

fn analyze(path: &Path) -> Result<(), Fail> {
    let g = load_graph(path)?;
    println!("vertices {}", g.vertex_count());
    println!("edges {}", g.edge_count());
    println!("simple {}", g.is_simple());
    println!("connectivity {}", edge_connectivity(&g));
    println!("girth {}", girth(&g));
    match bipartition(&g) {
        Some(bip) => {
            for side in [Side::A, Side::B] {
                let class = bip.class(side);
                let degs: Vec<usize> = class.iter().map(|&v| g.degree(v)).collect();
                let gcd = degs.iter().fold(0, |a, &d| num_gcd(a, d));
                println!(
                    "class {side:?} size {} min-degree {} max-degree {} degree-gcd {gcd}",
                    class.len(),
                    degs.iter().min().unwrap_or(&0),
                    degs.iter().max().unwrap_or(&0),
                );
            }
        }
        None => println!("bipartite false"),
    }
    Ok(())
}

fn num_gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

fn run(cmd: Cmd) -> Result<(), Fail> {
    match cmd {
        Cmd::Analyze { graph } => analyze(&graph),
        Cmd::Decompose {
            graph,
            tree,
            mode,
            strictness,
            seed,
            lambda,
            attempts,
            out,
        } => {
            let g = load_graph(&graph)?;
            let t = load_graph(&tree)?;
            let opts = DecomposeOptions {
                mode: mode.into(),
                config: strictness.config(seed),
                lambda,
                attempts,
            };
            let report = decompose(&g, &t, &opts).map_err(|e| {
                if is_precondition(&e) {
                    bad_input(e)
                } else {
                    rejected(e)
                }
            })?;
            let d = &report.decomposition;
            write(&out, &write_certificate(d, t.edge_count()))?;
            println!("kind {}", d.kind);
            println!("copies {}", d.copies.len());
            println!("routes {:?}", report.routes);
            if let Some(s) = &report.repair {
                println!(
                    "conflicts {} -> {} switches {}",
                    s.conflicts_before, s.conflicts_after, s.switches
                );
            }
            Ok(())
        }
        Cmd::Verify {
            graph,
            tree,
            cert,
            require,
        } => {
            let g = load_graph(&graph)?;
            let t = load_graph(&tree)?;
            let (d, m) = parse_certificate(&read(&cert)?)
                .with_context(|| format!("parsing {}", cert.display()))
                .map_err(bad_input)?;
            if m != t.edge_count() {
                return Err(bad_input(anyhow::anyhow!(
                    "certificate is for a tree with {m} edges, the tree has {}",
                    t.edge_count()
                )));
            }
            let r = verify_decomposition(&g, &t, &d, require.into());
            println!("partition {}", if r.partition_ok { "ok" } else { "broken" });
            println!("copies {}", r.per_copy.len());
            println!("girth {} tree-diameter {}", r.girth, r.tree_diameter);
            match r.kind {
                Some(k) => println!("kind {k}"),
                None => println!("kind none"),
            }
            if r.accepted() {
                println!("accepted");
                Ok(())
            } else {
                for f in &r.failures {
                    println!("failure {:?}: {f}", f.class());
                }
                Err(rejected(anyhow::anyhow!("certificate rejected")))
            }
        }
        Cmd::Orient {
            graph,
            modulus,
            targets,
            seed,
            out,
        } => {
            let g = load_graph(&graph)?;
            if modulus == 0 {
                return Err(bad_input(anyhow::anyhow!("modulus must be positive")));
            }
            let t = parse_targets(&read(&targets)?, modulus).map_err(bad_input)?;
            let o = orient_mod(&g, &t, seed).map_err(|e| match e {
                OrientError::SumConditionViolated { .. } => bad_input(e),
                _ => rejected(e),
            })?;
            let text = write_orientation(&g, &o);
            match out {
                Some(p) => write(&p, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Cmd::Split {
            graph,
            m,
            k,
            lambda,
            targets,
            strictness,
            seed,
            out,
            rest,
        } => {
            let g = load_graph(&graph)?;
            let bip = bipartition(&g).ok_or_else(|| bad_input(anyhow::anyhow!("graph is not bipartite")))?;
            if k == 0 || m == 0 {
                return Err(bad_input(anyhow::anyhow!("m and k must be positive")));
            }
            let p = match targets {
                Some(path) => parse_targets(&read(&path)?, k).map_err(bad_input)?,
                None => {
                    let mut p = ResidueTarget::zero(k);
                    if let Some(&b) = bip.class_b.first() {
                        p.set_signed(b, (g.edge_count() / m) as i64);
                    }
                    p
                }
            };
            let (g1, g2) =
                connected_fractional_split(&g, &bip, m, lambda, &p, &strictness.config(seed)).map_err(|e| {
                    if split_precondition(&e) {
                        bad_input(e)
                    } else {
                        rejected(e)
                    }
                })?;
            for (name, h) in [("part", &g1), ("rest", &g2)] {
                println!(
                    "{name} edges {} connectivity {} {}-connected {}",
                    h.edge_count(),
                    edge_connectivity(h),
                    lambda,
                    is_k_edge_connected(h, lambda)
                );
            }
            if let Some(p) = out {
                write(&p, &write_graph(&g1))?;
            }
            if let Some(p) = rest {
                write(&p, &write_graph(&g2))?;
            }
            Ok(())
        }
        Cmd::Bounds { kind, params } => {
            let v = bound_by_name(&kind, &params).map_err(bad_input)?;
            println!("{v}");
            Ok(())
        }
        Cmd::Gen {
            kind,
            seed,
            out,
            n,
            k,
            a,
            b,
            connectivity,
            noise,
            divisible_by,
            min_degree,
        } => {
            let need = |v: Option<usize>, flag: &str| {
                v.ok_or_else(|| bad_input(anyhow::anyhow!("`{kind}` needs --{flag}")))
            };
            let spec = match kind.as_str() {
                "bipartite" => GenSpec::Bipartite {
                    a: need(a, "a")?,
                    b: need(b, "b")?,
                    connectivity: need(connectivity, "connectivity")?,
                    noise,
                    divisible_by,
                },
                "regular" => GenSpec::Regular {
                    n: need(n, "n")?,
                    k: need(k, "k")?,
                },
                "even-simple" => GenSpec::EvenSimple {
                    a: need(a, "a")?,
                    b: need(b, "b")?,
                    min_degree,
                },
                "bundle" => GenSpec::Bundle { n: need(n, "n")? },
                name => GenSpec::Fixture { name: name.to_string() },
            };
            let g = generate(&spec, seed).map_err(bad_input)?;
            write(&out, &write_graph(&g))
        }
        Cmd::Experiment { config, out } => {
            let cfg = ExperimentConfig::from_toml(&read(&config)?).map_err(bad_input)?;
            let rows = experiment::run(&cfg).map_err(bad_input)?;
            let file = fs::File::create(&out)
                .with_context(|| format!("writing {}", out.display()))
                .map_err(rejected)?;
            experiment::write_csv(&rows, file).map_err(rejected)?;
            let ok = rows.iter().filter(|r| r.success).count();
            println!("trials {} succeeded {ok}", rows.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}


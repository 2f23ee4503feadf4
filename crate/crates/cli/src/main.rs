mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use config::Config;
use tranche_core::decomposition::Projection;
use tranche_core::depth::{DepthModel, XinfOptions};
use tranche_core::dynamics::{entropy_lower_bound, exactness_witness, EntropyOptions};
use tranche_core::gallery::{circle_spiral, comb_pair, star4_good, star4_route, warsaw_circle};
use tranche_core::hilbert::{hausdorff, Cloud};
use tranche_core::mahavier::{build_x_n, build_xhat, fiber, rational_to_f64, tranche_bases, OrbitOptions, OrbitParams, ProductOptions};
use tranche_core::symbolic::{order_and_depth, quotient, reduce, validate, QuasiGraphSpec};
use tranche_core::verify::{all_pass, run, Suite, VerifyOptions};
use tranche_core::{init_thread_pool, Cloud64};

#[derive(Parser)]
#[command(name = "tranche-lab", version, about = "Build, compare and verify sampled tranched continua")]
struct Cli {
    /// Defaults file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Common {
    /// Seed for randomized sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample budget for curves and gallery spaces.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Truncation dimension or level.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Covering radius for the tent-relation products.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a space and write its cloud as JSON.
    Build {
        space: Space,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hausdorff distance between two cloud files.
    Hausdorff { a: PathBuf, b: PathBuf },
    /// Run a verification suite and print its JSON report.
    Verify { suite: SuiteArg },
    /// Write the CSV panels of a figure.
    Figure {
        name: FigureName,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Work with quasi-graph specs.
    Spec { action: SpecAction, file: PathBuf },
    /// Shift dynamics on the tent-relation product.
    #[command(subcommand)]
    Dynamics(Dynamics),
}

#[derive(Subcommand)]
enum Dynamics {
    /// Lower bound on topological entropy from separated orbits.
    Entropy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 256)]
        budget: usize,
    },
    /// Shifts needed to spread a tranche over the whole space.
    Exact {
        #[arg(long)]
        tranche_level: usize,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Warsaw,
    #[value(name = "star4_route")]
    Star4Route,
    #[value(name = "star4_good")]
    Star4Good,
    #[value(name = "circle_spiral")]
    CircleSpiral,
    #[value(name = "comb_x")]
    CombX,
    #[value(name = "comb_x1")]
    CombX1,
    /// `A_n` with `n = --dim`.
    #[value(name = "A_n")]
    An,
    /// `X_n` with `n = --dim`.
    #[value(name = "X_n")]
    Xn,
    /// `X^` truncated to `--dim + 1` coordinates.
    #[value(name = "xhat")]
    Xhat,
    /// The infinite-depth space at level `--dim`.
    #[value(name = "x_depth")]
    XDepth,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Metric,
    Mahavier,
    Depth,
    Gallery,
    Decomposition,
    Symbolic,
    Dynamics,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureName {
    #[value(name = "warsaw")]
    Warsaw,
    #[value(name = "A-projections")]
    AProjections,
    #[value(name = "X2-projection")]
    X2Projection,
    #[value(name = "X1-depth")]
    X1Depth,
    #[value(name = "comb")]
    Comb,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpecAction {
    Validate,
    Quotient,
    Depth,
    Reduce,
}

enum Failure {
    /// Bad input the parser could not catch: exit 2.
    Usage(String),
    /// A computation or check failed: exit 1.
    Failed(String),
}

impl From<tranche_core::Error> for Failure {
    fn from(e: tranche_core::Error) -> Self {
        Failure::Failed(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

struct Settings {
    seed: u64,
    samples: usize,
    dim: Option<usize>,
    tol: Option<f64>,
    pairs: usize,
    max_points: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_thread_pool();
    let file = match &cli.config {
        Some(p) => match Config::load(p) {
            Ok(c) => c,
            Err(e) => return usage(&e),
        },
        None => Config::default(),
    };
    let flags = Config { seed: cli.common.seed, samples: cli.common.samples, dim: cli.common.dim, tol: cli.common.tol, ..Default::default() };
    let c = file.merge(flags);
    let v = VerifyOptions::default();
    let s = Settings {
        seed: c.seed.unwrap_or(v.seed),
        samples: c.samples.unwrap_or(v.samples),
        dim: c.dim,
        tol: c.tol,
        pairs: c.pairs.unwrap_or(v.pairs),
        max_points: c.max_points.unwrap_or(v.max_points),
    };
    match dispatch(cli.command, &s) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => usage(&m),
        Err(Failure::Failed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn usage(m: &str) -> ExitCode {
    eprintln!("usage error: {m}");
    ExitCode::from(2)
}

fn dispatch(cmd: Command, s: &Settings) -> Outcome {
    match cmd {
        Command::Build { space, out } => {
            let c = build(space, s)?;
            emit(&c.to_json(), out.as_deref())
        }
        Command::Hausdorff { a, b } => {
            let (a, b) = (read_cloud(&a)?, read_cloud(&b)?);
            let d = hausdorff(&a, &b)?;
            println!("{}", json!({ "distance": d, "mesh": [a.mesh(), b.mesh()], "labels": [a.label(), b.label()] }));
            Ok(true)
        }
        Command::Verify { suite } => verify(suite, s),
        Command::Figure { name, out_dir } => figure(name, &out_dir, s),
        Command::Spec { action, file } => spec(action, &file),
        Command::Dynamics(d) => dynamics(d, s),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Failed(format!("{}: {e}", p.display())))?,
        None => println!("{text}"),
    }
    Ok(true)
}

fn read_cloud(p: &Path) -> Result<Cloud64, Failure> {
    let text = std::fs::read_to_string(p).map_err(|e| Failure::Failed(format!("{}: {e}", p.display())))?;
    Ok(Cloud::from_json(&text)?)
}

fn product_opts(s: &Settings, default_tol: f64) -> ProductOptions {
    ProductOptions { tol: s.tol.unwrap_or(default_tol), ..Default::default() }
}

fn build(space: Space, s: &Settings) -> Result<Cloud64, Failure> {
    let n = s.samples;
    let dim = s.dim.unwrap_or(2);
    Ok(match space {
        Space::Warsaw => warsaw_circle(n)?,
        Space::Star4Route => star4_route(n, [0, 1, 2, 3])?,
        Space::Star4Good => star4_good(n)?,
        Space::CircleSpiral => circle_spiral(n)?,
        Space::CombX => comb_pair(n)?.1,
        Space::CombX1 => comb_pair(n)?.0,
        Space::An => OrbitParams::new(OrbitOptions { budget: n, ..Default::default() })?.build_a_n(dim)?,
        Space::Xn => build_x_n(dim, product_opts(s, 0.1))?,
        Space::Xhat => build_xhat(dim, product_opts(s, 0.1))?,
        Space::XDepth => DepthModel::<f64>::new(8, dim.max(1), 80)?.build_xinf(dim, XinfOptions::default())?,
    })
}

fn verify(suite: SuiteArg, s: &Settings) -> Outcome {
    let suites: Vec<Suite> = match suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Metric => vec![Suite::Metric],
        SuiteArg::Mahavier => vec![Suite::Mahavier],
        SuiteArg::Depth => vec![Suite::Depth],
        SuiteArg::Gallery => vec![Suite::Gallery],
        SuiteArg::Decomposition => vec![Suite::Decomposition],
        SuiteArg::Symbolic => vec![Suite::Symbolic],
        SuiteArg::Dynamics => vec![Suite::Dynamics],
    };
    let opts = VerifyOptions { seed: s.seed, samples: s.samples, pairs: s.pairs, max_points: s.max_points };
    let mut ok = true;
    let mut reports = Vec::new();
    for suite in suites {
        let checks = run(suite, &opts)?;
        let pass = all_pass(&checks);
        ok &= pass;
        reports.push(json!({ "suite": suite.name(), "status": if pass { "pass" } else { "fail" }, "checks": checks }));
    }
    let body = if reports.len() == 1 { reports.pop().unwrap() } else { json!(reports) };
    println!("{}", serde_json::to_string_pretty(&body).expect("reports serialize"));
    Ok(ok)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    let p = dir.join(name);
    std::fs::write(&p, text).map_err(|e| Failure::Failed(format!("{}: {e}", p.display())))?;
    println!("{}", p.display());
    Ok(())
}

fn figure(name: FigureName, dir: &Path, s: &Settings) -> Outcome {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Failed(format!("{}: {e}", dir.display())))?;
    match name {
        FigureName::Warsaw => {
            let c = warsaw_circle(s.samples)?;
            write(dir, "warsaw.csv", &c.to_csv(&[0, 1]))?;
            write(dir, "warsaw_quotient.csv", &quotient_csv(&c)?)?;
        }
        FigureName::AProjections => {
            let p = OrbitParams::new(OrbitOptions { budget: s.samples, ..Default::default() })?;
            for n in 0..3 {
                write(dir, &format!("A{n}.csv"), &p.build_a_n(n)?.to_csv(&[0, 1, 2]))?;
            }
        }
        FigureName::X2Projection => {
            let x = build_x_n(2, product_opts(s, 0.02))?;
            write(dir, "X2.csv", &x.to_csv(&[0, 1, 2]))?;
        }
        FigureName::X1Depth => {
            let x = DepthModel::<f64>::new(8, 1, 80)?.build_xinf(1, XinfOptions::default())?;
            write(dir, "X1_depth.csv", &x.to_csv(&[0, 1, 2]))?;
        }
        FigureName::Comb => {
            let (x1, x) = comb_pair(s.samples)?;
            write(dir, "comb_X1.csv", &x1.to_csv(&[0, 1]))?;
            write(dir, "comb_X.csv", &x.to_csv(&[0, 1, 2]))?;
        }
    }
    Ok(true)
}

/// `base,tag` rows: the image of every sample in the quotient, with the
/// sample's own tag.
fn quotient_csv(c: &Cloud64) -> Result<String, Failure> {
    let base = Projection::Base.values(c)?;
    let meta = c.meta();
    let mut out = String::from("base,tag\n");
    for (i, b) in base.into_iter().enumerate() {
        let tag = meta.tags.as_ref().and_then(|t| meta.tag_names.get(t[i] as usize)).map(String::as_str).unwrap_or("");
        out.push_str(&format!("{b},{tag}\n"));
    }
    Ok(out)
}

fn spec(action: SpecAction, file: &Path) -> Outcome {
    let text = std::fs::read_to_string(file).map_err(|e| Failure::Failed(format!("{}: {e}", file.display())))?;
    let spec = QuasiGraphSpec::from_json(&text)?;
    let (body, ok) = match action {
        SpecAction::Validate => {
            let v = validate(&spec);
            (json!({ "valid": v.is_empty(), "violations": v }), v.is_empty())
        }
        SpecAction::Quotient => (json!(quotient(&spec)?), true),
        SpecAction::Depth => (json!(order_and_depth(&spec)?), true),
        SpecAction::Reduce => (json!(reduce(&spec)?), true),
    };
    println!("{}", serde_json::to_string_pretty(&body).expect("reports serialize"));
    Ok(ok)
}

fn dynamics(d: Dynamics, s: &Settings) -> Outcome {
    match d {
        Dynamics::Entropy { n, eps, budget } => {
            let opts = EntropyOptions { dim: s.dim.unwrap_or(16), budget, seed: s.seed };
            println!("{}", serde_json::to_string_pretty(&entropy_lower_bound(n, eps, opts)?).expect("reports serialize"));
            Ok(true)
        }
        Dynamics::Exact { tranche_level, max_n } => {
            if tranche_level == 0 {
                return Err(Failure::Usage("tranche levels start at 1".into()));
            }
            // the first base new at this level; level 1 is the fiber over 0
            let older: Vec<f64> = if tranche_level > 1 { tranche_bases(tranche_level - 1)?.iter().map(rational_to_f64).collect() } else { vec![] };
            let y = tranche_bases(tranche_level)?.iter().map(rational_to_f64).find(|b| !older.contains(b)).unwrap_or(0.0);
            let x = build_xhat(s.dim.unwrap_or(8), product_opts(s, 0.06))?;
            let w = exactness_witness(&fiber(&x, y, 1e-9)?, &x, max_n)?;
            let body = json!({ "level": tranche_level, "base": y, "mesh": x.mesh(), "witness": w });
            println!("{}", serde_json::to_string_pretty(&body).expect("reports serialize"));
            Ok(w.n.is_some())
        }
    }
}

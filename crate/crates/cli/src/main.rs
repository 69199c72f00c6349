//! `zonolimit` command-line front end.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zonolimit::arith::{parse_rational, Rational};
use zonolimit::cap::solve_cap;
use zonolimit::cone::PolyhedralCone;
use zonolimit::count::{count_partitions, enumerate_partitions, growth_sequence};
use zonolimit::error::Error;
use zonolimit::faces::{a_r_cells, face_counts, face_statistics_experiment, hull_oracle, HULL_ORACLE_LIMIT};
use zonolimit::gibbs::{moments, sample_uniform, GibbsModel, ModelOptions};
use zonolimit::latt::{cubature_check, primitive_density, random_lattice_polytope, TestFunction};
use zonolimit::multiset::GeneratorMultiset;
use zonolimit::rng::Stream;
use zonolimit::shape::{direction_net, limit_shape_experiment, ExperimentOptions, LimitZonoid, SamplingLaw};
use zonolimit::verify;

use output::{Cell, Format, Table};

#[derive(Parser, Debug)]
#[command(name = "zonolimit", version, about = "Integral zonotopes in convex cones")]
struct Cli {
    /// Base seed of every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; the format defaults to CSV when set.
    #[arg(long, global = true, alias = "csv")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimal cap of a cone for a target vector.
    Cap {
        #[command(flatten)]
        cone: ConeArg,
        /// Target `a` in the interior of the cone, e.g. `1,1` or `1/2,3`.
        #[arg(long, default_value = "1,1")]
        a: String,
    },
    /// Exact partition counts `p(C, k)`.
    Count {
        #[command(flatten)]
        cone: ConeArg,
        #[arg(long, default_value = "1,1")]
        k: String,
        /// Emit the sequence along `n k` for `n = 1..=n_max`.
        #[arg(long)]
        n_max: Option<u64>,
        /// Allow non-primitive parts.
        #[arg(long)]
        non_strict: bool,
    },
    /// Lattice-point estimates.
    Latt {
        #[command(subcommand)]
        command: LattCommand,
    },
    /// Boltzmann model of random zonotopes.
    Gibbs {
        #[command(subcommand)]
        command: GibbsCommand,
    },
    /// Limit shape and convergence.
    Shape {
        #[command(subcommand)]
        command: ShapeCommand,
    },
    /// Face counts by arrangement duality.
    Faces {
        #[command(subcommand)]
        command: FacesCommand,
    },
    /// Run the acceptance suite.
    Verify {
        /// Run only these criteria (1-12).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Args, Debug)]
struct ConeArg {
    /// Preset (`orthant2`, `orthant3`, `circ3:<facets>`, `wedge:(1,0),(1,2)`) or JSON file.
    #[arg(long, default_value = "orthant2")]
    cone: String,
}

#[derive(Subcommand, Debug)]
enum LattCommand {
    /// Density of primitive points in `[1, N]^d`.
    Density {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long = "N", alias = "n-max", default_value_t = 1000)]
        n: u64,
    },
    /// Cubature inequality on random lattice polytopes.
    Cubature {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Box side `L`.
        #[arg(long, default_value_t = 12)]
        l: i64,
    },
}

#[derive(Subcommand, Debug)]
enum GibbsCommand {
    /// Moments of the endpoint and of `|G(T)|` over independent replicas.
    Sample {
        #[command(flatten)]
        cone: ConeArg,
        #[arg(long, default_value = "1,1")]
        k: String,
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 10_000)]
        replicas: usize,
        /// Lattice-point budget of the model support.
        #[arg(long)]
        point_budget: Option<u128>,
    },
    /// Uniform sampling of zonotopes with a given endpoint by rejection.
    Uniform {
        #[command(flatten)]
        cone: ConeArg,
        #[arg(long, default_value = "2,2")]
        nk: String,
        #[arg(long, default_value_t = 10_000)]
        accepted: u64,
        /// Attempt budget per accepted sample.
        #[arg(long, default_value_t = 100_000_000)]
        max_attempts: u64,
    },
}

#[derive(Subcommand, Debug)]
enum ShapeCommand {
    /// Support function and boundary point of `T₀` on a direction net.
    T0 {
        #[command(flatten)]
        cone: ConeArg,
        #[arg(long, default_value = "1,1")]
        k: String,
        #[arg(long, default_value_t = 4096)]
        net: usize,
    },
    /// Hausdorff distance between `T/n` and `T₀`.
    Converge {
        #[command(flatten)]
        cone: ConeArg,
        #[arg(long, default_value = "1,1")]
        k: String,
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
        n: Vec<u64>,
        #[arg(long, default_value_t = 200)]
        replicas: usize,
        /// `uniform` conditions on the endpoint; `boltzmann` does not.
        #[arg(long, value_enum, default_value_t = Law::Uniform)]
        law: Law,
        #[arg(long)]
        net: Option<usize>,
        #[arg(long, default_value_t = 100_000_000)]
        max_attempts: u64,
    },
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum Law {
    Uniform,
    Boltzmann,
}

#[derive(Subcommand, Debug)]
enum FacesCommand {
    /// Face vector of a zonotope given by a generator file.
    Count {
        #[arg(long)]
        generators: PathBuf,
    },
    /// Cells of the arrangement `A_r`.
    Ar {
        #[arg(long, default_value_t = 3)]
        r: u32,
    },
    /// `f_0(T) / n^(d(d-1)/(d+1))` under the Boltzmann model.
    Experiment {
        #[command(flatten)]
        cone: ConeArg,
        #[arg(long)]
        k: Option<String>,
        #[arg(long, value_delimiter = ',', default_value = "100,1000")]
        n: Vec<u64>,
        #[arg(long, default_value_t = 100)]
        replicas: usize,
    },
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Config(String),
    Budget(String),
    Assertion(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Assertion(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Budget(m) | Failure::Assertion(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget { .. } | Error::Timeout { .. } => Failure::Budget(e.to_string()),
            Error::NoConvergence { .. } => Failure::Assertion(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

type Outcome = Result<Table, Failure>;

fn load_cone(arg: &str) -> Result<PolyhedralCone, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        return Ok(PolyhedralCone::from_json(&text)?);
    }
    Ok(PolyhedralCone::preset(arg)?)
}

fn parse_ints(s: &str) -> Result<Vec<i64>, Failure> {
    s.split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|_| Failure::Config(format!("not an integer vector: {s:?}"))))
        .collect()
}

fn parse_rationals(s: &str) -> Result<Vec<Rational>, Failure> {
    s.split(',')
        .map(|p| parse_rational(p.trim()).ok_or_else(|| Failure::Config(format!("not a rational vector: {s:?}"))))
        .collect()
}

fn vector_text<T: std::fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn indexed(prefix: &str, d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("{prefix}{i}")).collect()
}

fn cap(cone: &str, a: &str) -> Outcome {
    let cone = load_cone(cone)?;
    let a = parse_rationals(a)?;
    let s = solve_cap(&cone, &a)?;
    let d = s.d;
    let mut cols = indexed("u", d);
    cols.extend(["u_exact", "lambda", "vol_unit", "q"].map(String::from));
    let mut t = Table::new(cols);
    let mut row: Vec<Cell> = s.u.iter().map(|&x| x.into()).collect();
    row.push(s.u_exact.as_ref().map_or_else(|| "".into(), |u| vector_text(u)).into());
    row.extend([s.lambda.into(), s.vol_unit.into(), s.q.into()]);
    t.push(row);
    Ok(t)
}

fn count(cone: &str, k: &str, n_max: Option<u64>, non_strict: bool) -> Outcome {
    let cone = load_cone(cone)?;
    let k = parse_ints(k)?;
    let strict = !non_strict;
    match n_max {
        None => {
            let c = count_partitions(&cone, &k, strict)?;
            let mut t = Table::new(["k", "strict", "count"]);
            t.push(vec![vector_text(&k).into(), strict.into(), Cell::Big(c.count.to_string())]);
            Ok(t)
        }
        Some(n_max) => {
            let seq = growth_sequence(&cone, &k, n_max, strict)?;
            let mut t = Table::new(["n", "count", "a_n", "limit"]);
            for r in &seq.rows {
                t.push(vec![r.n.into(), Cell::Big(r.count.to_string()), r.a_n.into(), seq.limit.into()]);
            }
            Ok(t)
        }
    }
}

fn latt(cmd: &LattCommand, seed: u64) -> Outcome {
    match *cmd {
        LattCommand::Density { d, n } => {
            if !(2..=4).contains(&d) || n == 0 {
                return Err(Failure::Config("density needs d in 2..=4 and N >= 1".into()));
            }
            let p = primitive_density(n, d);
            let target = 1.0 / zonolimit::zeta::zeta(d as u32);
            let mut t = Table::new(["d", "N", "density", "inverse_zeta", "gap"]);
            t.push(vec![d.into(), n.into(), p.into(), target.into(), (p - target).abs().into()]);
            Ok(t)
        }
        LattCommand::Cubature { trials, l } => {
            let mut rng = Stream::new(seed);
            let fs = [TestFunction::Constant(1), TestFunction::Coordinate(0), TestFunction::Norm];
            let mut t = Table::new(["trial", "d", "function", "points", "lhs", "bound", "pass"]);
            let mut failed = 0;
            for i in 0..trials {
                let d = 2 + i % 2;
                let verts = random_lattice_polytope(d, l, &mut rng);
                let f = fs[i % 3];
                let r = cubature_check(&verts, f, f.lipschitz(), l as f64)?;
                failed += usize::from(!r.pass);
                t.push(vec![
                    i.into(),
                    d.into(),
                    format!("{f:?}").into(),
                    r.points.into(),
                    r.lhs.into(),
                    r.bound.into(),
                    r.pass.into(),
                ]);
            }
            if failed > 0 {
                eprintln!("cubature inequality violated on {failed} of {trials} polytopes");
            }
            Ok(t)
        }
    }
}

fn gibbs(cmd: &GibbsCommand, seed: u64) -> Outcome {
    match cmd {
        GibbsCommand::Sample {
            cone,
            k,
            n,
            replicas,
            point_budget,
        } => {
            let cone = load_cone(&cone.cone)?;
            let k = parse_ints(k)?;
            let mut opts = ModelOptions::default();
            if let Some(b) = point_budget {
                opts.point_budget = *b;
            }
            let model = GibbsModel::with_options(&cone, &k, *n, &opts)?;
            let r = moments(&model, *replicas, seed)?;
            let mut t = Table::new(["quantity", "i", "j", "estimate", "se", "reference", "exact_truncated"]);
            let d = k.len();
            for i in 0..d {
                t.push(vec![
                    "mean".into(),
                    (i + 1).into(),
                    Cell::Text(String::new()),
                    r.mean[i].into(),
                    r.mean_se[i].into(),
                    r.mean_ref[i].into(),
                    r.mean_exact[i].into(),
                ]);
            }
            for i in 0..d {
                for j in 0..d {
                    t.push(vec![
                        "cov".into(),
                        (i + 1).into(),
                        (j + 1).into(),
                        r.cov[i][j].into(),
                        r.cov_se[i][j].into(),
                        r.cov_ref[i][j].into(),
                        r.cov_exact[i][j].into(),
                    ]);
                }
            }
            t.push(vec![
                "generators".into(),
                Cell::Text(String::new()),
                Cell::Text(String::new()),
                r.gen_count_mean.into(),
                r.gen_count_se.into(),
                r.gen_ref.into(),
                r.gen_exact.into(),
            ]);
            Ok(t)
        }
        GibbsCommand::Uniform {
            cone,
            nk,
            accepted,
            max_attempts,
        } => {
            let cone = load_cone(&cone.cone)?;
            let nk = parse_ints(nk)?;
            let support = enumerate_partitions(&cone, &nk, true)?;
            let model = GibbsModel::new(&cone, &nk, 1)?;
            let draws: Vec<Result<usize, Failure>> = {
                use rayon::prelude::*;
                (0..*accepted)
                    .into_par_iter()
                    .map(|i| {
                        let s = sample_uniform(&model, *max_attempts, seed.wrapping_add(i))?;
                        support
                            .iter()
                            .position(|w| *w == s.w)
                            .ok_or_else(|| Failure::Assertion("sample outside the enumerated support".into()))
                    })
                    .collect()
            };
            let mut hits = vec![0u64; support.len()];
            for d in draws {
                hits[d?] += 1;
            }
            let mut t = Table::new(["zonotope", "hits", "frequency", "uniform"]);
            for (w, h) in support.iter().zip(&hits) {
                t.push(vec![
                    w.to_json().into(),
                    (*h).into(),
                    (*h as f64 / *accepted as f64).into(),
                    (1.0 / support.len() as f64).into(),
                ]);
            }
            Ok(t)
        }
    }
}

fn shape(cmd: &ShapeCommand, seed: u64) -> Outcome {
    match cmd {
        ShapeCommand::T0 { cone, k, net } => {
            let cone = load_cone(&cone.cone)?;
            let k = parse_rationals(k)?;
            let cap = solve_cap(&cone, &k)?;
            let z = LimitZonoid::from_solution(&cap);
            let d = cone.dim();
            let mut cols = indexed("v", d);
            cols.push("h".into());
            cols.extend(indexed("t", d));
            let mut t = Table::new(cols);
            for v in direction_net(d, *net)? {
                let b = z.boundary(&v);
                let mut row: Vec<Cell> = v.iter().map(|&x| x.into()).collect();
                row.push(z.support(&v).into());
                row.extend(b.iter().map(|&x| x.into()));
                t.push(row);
            }
            Ok(t)
        }
        ShapeCommand::Converge {
            cone,
            k,
            n,
            replicas,
            law,
            net,
            max_attempts,
        } => {
            let cone = load_cone(&cone.cone)?;
            let k = parse_ints(k)?;
            let mut ns = n.clone();
            ns.sort_unstable();
            let mut opts = ExperimentOptions::new(cone.dim());
            opts.law = match law {
                Law::Uniform => SamplingLaw::Uniform,
                Law::Boltzmann => SamplingLaw::Boltzmann,
            };
            opts.max_attempts = *max_attempts;
            if let Some(m) = net {
                opts.net_size = *m;
            }
            let rows = limit_shape_experiment(&cone, &k, &ns, *replicas, seed, &opts)?;
            let mut t = Table::new([
                "n",
                "replicas",
                "median",
                "q90",
                "resolution",
                "probe_limit",
                "probe_mean",
                "probe_se",
                "probe_exceed",
                "mean_attempts",
            ]);
            for r in rows {
                t.push(vec![
                    r.n.into(),
                    r.replicas.into(),
                    r.median.into(),
                    r.q90.into(),
                    r.resolution.into(),
                    r.probe_limit.into(),
                    r.probe_mean.into(),
                    r.probe_se.into(),
                    r.probe_exceed.into(),
                    r.mean_attempts.into(),
                ]);
            }
            Ok(t)
        }
    }
}

fn faces(cmd: &FacesCommand, seed: u64) -> Outcome {
    match cmd {
        FacesCommand::Count { generators } => {
            let text = std::fs::read_to_string(generators)?;
            let w = GeneratorMultiset::from_json(&text)?;
            let f = face_counts(&w)?;
            let d = w.dim();
            let mut cols: Vec<String> = (0..d).map(|i| format!("f{i}")).collect();
            cols.extend(["towers", "method", "hull_agrees"].map(String::from));
            let mut t = Table::new(cols);
            let mut row: Vec<Cell> = f.f.iter().map(|&x| x.into()).collect();
            row.push(f.towers.into());
            row.push(format!("{:?}", f.method).into());
            if w.support_size() <= HULL_ORACLE_LIMIT {
                let h = hull_oracle(&w)?;
                row.push((h.f == f.f && h.towers == f.towers).into());
            } else {
                row.push(Cell::Text(String::new()));
            }
            t.push(row);
            Ok(t)
        }
        FacesCommand::Ar { r } => {
            let c = a_r_cells(*r)?.counts;
            let mut t = Table::new(["r", "planes", "rays", "two_cells", "chambers", "towers"]);
            t.push(vec![
                (*r as u64).into(),
                c.m.into(),
                c.rays.into(),
                c.two_cells.into(),
                c.chambers.into(),
                c.towers.into(),
            ]);
            Ok(t)
        }
        FacesCommand::Experiment { cone, k, n, replicas } => {
            let cone = load_cone(&cone.cone)?;
            let k = match k {
                Some(s) => parse_ints(s)?,
                None => vec![1; cone.dim()],
            };
            let mut ns = n.clone();
            ns.sort_unstable();
            let rows = face_statistics_experiment(&cone, &k, &ns, *replicas, seed)?;
            let mut t = Table::new([
                "n",
                "replicas",
                "scale",
                "f0_mean",
                "ratio_mean",
                "ratio_min",
                "ratio_max",
                "generators_mean",
            ]);
            for r in rows {
                t.push(vec![
                    r.n.into(),
                    r.replicas.into(),
                    r.scale.into(),
                    r.f0_mean.into(),
                    r.ratio_mean.into(),
                    r.ratio_min.into(),
                    r.ratio_max.into(),
                    r.generators_mean.into(),
                ]);
            }
            Ok(t)
        }
    }
}

fn run_verify(only: &[u8]) -> Result<(Table, Option<Failure>), Failure> {
    let mut t = Table::new(["criterion", "name", "result", "seconds"]);
    let mut failed = Vec::new();
    for (i, f) in verify::CRITERIA.iter().enumerate() {
        let id = i as u8 + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let r = f();
        eprintln!("{}", r.line());
        if !r.passed {
            failed.push(id);
        }
        t.push(vec![
            (id as u64).into(),
            r.name.into(),
            if r.passed { "PASS" } else { "FAIL" }.into(),
            r.seconds.into(),
        ]);
    }
    let failure = (!failed.is_empty()).then(|| Failure::Assertion(format!("criteria failed: {failed:?}")));
    Ok((t, failure))
}

fn execute(cli: &Cli) -> Result<(Table, Option<Failure>), Failure> {
    let table = match &cli.command {
        Command::Cap { cone, a } => cap(&cone.cone, a),
        Command::Count {
            cone,
            k,
            n_max,
            non_strict,
        } => count(&cone.cone, k, *n_max, *non_strict),
        Command::Latt { command } => latt(command, cli.seed),
        Command::Gibbs { command } => gibbs(command, cli.seed),
        Command::Shape { command } => shape(command, cli.seed),
        Command::Faces { command } => faces(command, cli.seed),
        Command::Verify { only } => return run_verify(only),
    }?;
    Ok((table, None))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let format = if cli.json {
        Format::Json
    } else {
        cli.format.unwrap_or(if cli.out.is_some() { Format::Csv } else { Format::Text })
    };
    let invocation = std::env::args().collect::<Vec<_>>().join(" ");
    let (table, failure) = match execute(&cli) {
        Ok(x) => x,
        Err(f) => {
            eprintln!("error: {}", f.message());
            return ExitCode::from(f.code());
        }
    };
    if let Err(e) = table.emit(format, cli.out.as_deref(), &invocation) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match failure {
        Some(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
        None => ExitCode::SUCCESS,
    }
}

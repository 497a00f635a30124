mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use packcover::bounds::{chain_report, lp_step1_check, minkowski_type_check, named_gamma, MinkowskiGrid, NamedSpace};
use packcover::dispersion::{dispersion_sweep, DispersionBudget};
use packcover::lattice::{gamma_star_of_lattice, optimize_lattice, CoveringOptions};
use packcover::moduli::{delta, delta_table, t_x, tangential, tangential_table, uniform_grid, EvalBudget};
use packcover::norms::{dual_eval, duality_functional, eval_norm};
use packcover::subgroup::{
    build, default_theta, gamma_star_upper_from_build, integer_ball_targets, product, verify, DirectionOracle,
    SubgroupResult,
};
use packcover::suptiling::{round_even_zero_dim, sup_distance, SimpleFunction};
use packcover::{acceptance, Lattice, Space};

use manifest::Recorder;

#[derive(Parser)]
#[command(name = "packcover", version, about = "Packing and covering constants of normed spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every randomized step of this run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Work cap; its unit depends on the command.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Manifest path; defaults to `<out>.manifest.json`, or stderr without `--out`.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Norm, dual norm and supporting functional of a point.
    Norm {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
    },
    /// Sampled moduli of convexity and the tangential modulus.
    Modulus(ModulusArgs),
    /// Best-found maximal separation of m points in the unit ball.
    Dispersion {
        #[arg(long)]
        space: PathBuf,
        /// One or more point counts.
        #[arg(short, long = "m", value_delimiter = ',', required = true)]
        m: Vec<usize>,
    },
    /// Certified packing, covering and gamma* of a given lattice.
    GammaStar {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        mesh: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Search for a lattice with small gamma*.
    Optimize {
        #[arg(long)]
        space: PathBuf,
    },
    #[command(subcommand)]
    Subgroup(SubgroupCmd),
    #[command(subcommand)]
    Tile(TileCmd),
    #[command(subcommand)]
    Report(ReportCmd),
    /// Run the acceptance battery.
    Suite {
        #[arg(long)]
        quick: bool,
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModulusKind {
    Delta,
    Tangential,
    DeltaTable,
    TangentialTable,
    #[value(name = "t-x")]
    TX,
}

#[derive(Args)]
struct ModulusArgs {
    #[arg(long)]
    space: PathBuf,
    #[arg(long, value_enum, default_value = "delta")]
    kind: ModulusKind,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Grid points on [0, 2] for tables.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, default_value_t = 64)]
    starts: usize,
}

#[derive(Subcommand)]
enum SubgroupCmd {
    /// Greedy construction over a target list.
    Build {
        #[arg(long)]
        space: PathBuf,
        /// JSON array of points.
        #[arg(long, conflicts_with = "random_targets")]
        targets: Option<PathBuf>,
        /// Draw this many integer points of the l_p ball of `--radius` instead.
        #[arg(long)]
        random_targets: Option<usize>,
        #[arg(long, default_value_t = 5.0)]
        radius: f64,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// JSON direction oracle; fresh coordinates by default.
        #[arg(long)]
        oracle: Option<PathBuf>,
    },
    /// Enumerate the subgroup within a radius and attach the certificate.
    Verify {
        #[arg(long)]
        result: PathBuf,
        #[arg(long)]
        radius: f64,
    },
    /// Direct sum of two verified results.
    Product {
        #[arg(long)]
        result: PathBuf,
        #[arg(long)]
        other: PathBuf,
    },
}

#[derive(Subcommand)]
enum TileCmd {
    /// Round a simple function to even integers.
    Round {
        #[arg(long)]
        input: PathBuf,
        /// Oscillation of the underlying function on each cell.
        #[arg(long, default_value_t = 0.0)]
        osc: f64,
    },
    /// Sup distance on the common refinement.
    Distance {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        other: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Lp,
    FunctionLp,
    Octahedral,
    C0,
    Linf,
}

#[derive(Subcommand)]
enum ReportCmd {
    /// Sampled moduli and the inequalities between them.
    Chain {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p_outer: f64,
        #[arg(long, default_value_t = 32)]
        starts: usize,
    },
    /// Closed-form values for a named family.
    Named {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Outer exponent; `inf` allowed.
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long)]
        gamma_star_y: Option<f64>,
        /// For `c0`: the compact set is extremally disconnected.
        #[arg(long)]
        extremal: bool,
    },
    /// Lower-bound ladder 2/2^{1/M}.
    Gamma2 {
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, value_delimiter = ',')]
        pk: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        ms: Vec<f64>,
    },
    /// Two-term Minkowski-type inequality on the standard grid.
    Minkowski,
    /// Least n with (1 - 2^{-n})^{1/p} - 2^{-n/p} >= 1 - eps.
    Step1 {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        eps: f64,
    },
}

enum Failure {
    Invalid(String),
    Acceptance(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 3,
            Failure::Acceptance(_) => 4,
        }
    }
}

impl From<packcover::Error> for Failure {
    fn from(e: packcover::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Invalid(format!("json: {e}"))
    }
}

/// A command's result: the JSON document and its plain-text rendering.
struct Output {
    json: Value,
    table: String,
}

impl Output {
    fn of<T: Serialize>(v: &T) -> Result<Output, Failure> {
        let json = serde_json::to_value(v)?;
        let table = flat_table(&json);
        Ok(Output { json, table })
    }
}

fn read_file(rec: &mut Recorder, path: &Path) -> Result<String, Failure> {
    rec.read(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(rec: &mut Recorder, path: &Path) -> Result<T, Failure> {
    let s = read_file(rec, path)?;
    serde_json::from_str(&s).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn read_space(rec: &mut Recorder, path: &Path) -> Result<Space, Failure> {
    let s = read_file(rec, path)?;
    Space::from_json(&s).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn eval_budget(cli: &Cli, rec: &mut Recorder, starts: usize) -> EvalBudget {
    let mut b = EvalBudget::with_starts(starts);
    if let Some(n) = cli.budget {
        b.max_norm_evals = n;
    }
    rec.budget("starts", starts as f64);
    rec.budget("max_norm_evals", b.max_norm_evals as f64);
    b
}

fn execute(cli: &Cli, rec: &mut Recorder) -> Result<Output, Failure> {
    match &cli.command {
        Command::Norm { space, x } => {
            let s = read_space(rec, space)?;
            let norm = eval_norm(&s, x)?;
            let dual = dual_eval(&s, x)?;
            // the functional is taken at x/|x|; null when it is not unique
            let functional = if norm > 0.0 {
                let unit: Vec<f64> = x.iter().map(|v| v / norm).collect();
                duality_functional(&s, &unit).ok()
            } else {
                None
            };
            Output::of(&json!({ "space": s.descriptor().label(), "x": x, "norm": norm, "dual_norm": dual, "functional": functional }))
        }
        Command::Modulus(a) => {
            let s = read_space(rec, &a.space)?;
            let b = eval_budget(cli, rec, a.starts);
            let seed = rec.seed("modulus", cli.seed);
            match a.kind {
                ModulusKind::Delta => Output::of(&delta(&s, a.t, &b, seed)?),
                ModulusKind::Tangential => Output::of(&tangential(&s, a.t, &b, seed)?),
                ModulusKind::TX => Output::of(&t_x(&s, &b, seed)?),
                ModulusKind::DeltaTable | ModulusKind::TangentialTable => {
                    if a.grid < 2 {
                        return Err(Failure::Invalid("a table needs at least 2 grid points".into()));
                    }
                    let grid = uniform_grid(2.0, a.grid);
                    let table = match a.kind {
                        ModulusKind::DeltaTable => delta_table(&s, &grid, &b, seed)?,
                        _ => tangential_table(&s, &grid, &b, seed)?,
                    };
                    let json = serde_json::to_value(&table)?;
                    let mut text = String::new();
                    for (t, iv) in grid.iter().zip(&table.intervals) {
                        text.push_str(&format!("{t:>10.6}  [{:.9}, {:.9}]  {}\n", iv.lo, iv.hi, iv.method));
                    }
                    Ok(Output { json, table: text })
                }
            }
        }
        Command::Dispersion { space, m } => {
            let s = read_space(rec, space)?;
            let mut budget = DispersionBudget::default();
            if let Some(n) = cli.budget {
                budget.sweeps = n as usize;
            }
            rec.budget("sweeps", budget.sweeps as f64);
            rec.budget("random_starts", budget.random_starts as f64);
            let seed = rec.seed("dispersion", cli.seed);
            let rs = dispersion_sweep(&s, m, &budget, seed)?;
            let docs: Vec<Value> = m
                .iter()
                .zip(&rs)
                .map(|(m, r)| json!({ "m": m, "points": r.points, "min_separation": r.min_separation, "method": r.method }))
                .collect();
            let table = m.iter().zip(&rs).map(|(m, r)| format!("m={m:<5} separation={:.9}\n", r.min_separation)).collect();
            Ok(Output { json: if docs.len() == 1 { docs[0].clone() } else { Value::Array(docs) }, table })
        }
        Command::GammaStar { space, lattice, mesh, tol } => {
            let s = read_space(rec, space)?;
            let lat: Lattice = read_json(rec, lattice)?;
            let mut opts = CoveringOptions::default();
            if mesh.is_some() {
                opts = CoveringOptions::mesh(mesh.unwrap());
            }
            if tol.is_some() {
                opts.tol = *tol;
            }
            if let Some(n) = cli.budget {
                opts.max_evals = n;
            }
            rec.budget("max_evals", opts.max_evals as f64);
            let e = gamma_star_of_lattice(&s, &lat, &opts)?;
            Output::of(&e)
        }
        Command::Optimize { space } => {
            let s = read_space(rec, space)?;
            let budget = cli.budget.unwrap_or(200_000);
            rec.budget("proposals", budget as f64);
            let seed = rec.seed("optimize", cli.seed);
            Output::of(&optimize_lattice(&s, s.dim(), budget, seed)?)
        }
        Command::Subgroup(cmd) => subgroup(cli, rec, cmd),
        Command::Tile(TileCmd::Round { input, osc }) => {
            let f: SimpleFunction = read_json(rec, input)?;
            f.validate()?;
            let (g, dist) = round_even_zero_dim(&f, *osc)?;
            let exact = sup_distance(&f, &g)?;
            Output::of(&json!({ "rounded": g, "distance_bound": dist, "cell_distance": exact }))
        }
        Command::Tile(TileCmd::Distance { input, other }) => {
            let f: SimpleFunction = read_json(rec, input)?;
            let g: SimpleFunction = read_json(rec, other)?;
            Output::of(&json!({ "sup_distance": sup_distance(&f, &g)? }))
        }
        Command::Report(cmd) => report(cli, rec, cmd),
        Command::Suite { quick, only } => {
            let ids: Vec<u8> = if !only.is_empty() {
                only.clone()
            } else if *quick {
                acceptance::QUICK.to_vec()
            } else {
                acceptance::ALL.to_vec()
            };
            if let Some(bad) = ids.iter().find(|id| !acceptance::ALL.contains(id)) {
                return Err(Failure::Invalid(format!("no criterion {bad}")));
            }
            let mut outcomes = Vec::new();
            for id in ids {
                let o = acceptance::run_criterion(id);
                if cli.out.is_some() || cli.format == Some(Format::Json) {
                    // stdout gets the lines only at the end
                    eprintln!("{}", o.line());
                }
                outcomes.push(o);
            }
            let table = outcomes.iter().map(|o| o.line() + "\n").collect();
            let json = serde_json::to_value(&outcomes)?;
            let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
            let out = Output { json, table };
            if failed.is_empty() {
                Ok(out)
            } else {
                // still write the outcomes before failing
                emit(cli, rec, &out, Format::Table).map_err(Failure::Invalid)?;
                Err(Failure::Acceptance(format!("failed criteria {failed:?}")))
            }
        }
    }
}

fn subgroup(cli: &Cli, rec: &mut Recorder, cmd: &SubgroupCmd) -> Result<Output, Failure> {
    match cmd {
        SubgroupCmd::Build { space, targets, random_targets, radius, theta, eps, oracle } => {
            let s = read_space(rec, space)?;
            let targets: Vec<Vec<f64>> = match (targets, random_targets) {
                (Some(path), _) => read_json(rec, path)?,
                (None, Some(count)) => {
                    let p = s
                        .lp_exponent()
                        .ok_or_else(|| Failure::Invalid("random targets need an l_p space".into()))?;
                    let seed = rec.seed("targets", cli.seed);
                    integer_ball_targets(p, s.dim(), *count, *radius, seed)?
                }
                (None, None) => return Err(Failure::Invalid("give --targets or --random-targets".into())),
            };
            let oracle = match oracle {
                Some(path) => read_json(rec, path)?,
                None => DirectionOracle::FreshCoordinate { n: s.dim() },
            };
            let theta = match theta {
                Some(t) => *t,
                None => default_theta(&s, *eps)?,
            };
            let r = build(&s, &targets, &oracle, theta, *eps)?;
            let json = serde_json::to_value(&r)?;
            let table = format!(
                "targets     {}\ngenerators  {}\ntheta       {theta}\neps         {eps}\nheuristic   {}\n",
                r.targets.len(),
                r.generator_count(),
                r.coverage_heuristic
            );
            Ok(Output { json, table })
        }
        SubgroupCmd::Verify { result, radius } => {
            let mut r = load_result(rec, result)?;
            let s = Space::new(r.space.clone())?;
            r.verified = None;
            let cert = verify(&s, &r, *radius)?;
            r.verified = Some(cert);
            let upper = gamma_star_upper_from_build(&r)?;
            let mut json = serde_json::to_value(&r)?;
            json["gamma_star_upper"] = json!(upper);
            let c = r.verified.as_ref().expect("just set");
            let table = format!(
                "radius            {}\nenumerated        {}\nmin nonzero norm  {}\ngamma* upper      {upper:.9}\n",
                c.radius,
                c.enumerated_count,
                c.min_nonzero_norm.map_or("none".into(), |v| format!("{v:.9}"))
            );
            Ok(Output { json, table })
        }
        SubgroupCmd::Product { result, other } => {
            let a = load_result(rec, result)?;
            let b = load_result(rec, other)?;
            Output::of(&product(&a, &b)?)
        }
    }
}

/// Accepts a result document with or without the extra `gamma_star_upper`.
fn load_result(rec: &mut Recorder, path: &Path) -> Result<SubgroupResult, Failure> {
    let mut v: Value = read_json(rec, path)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("gamma_star_upper");
    }
    Ok(serde_json::from_value(v)?)
}

fn report(cli: &Cli, rec: &mut Recorder, cmd: &ReportCmd) -> Result<Output, Failure> {
    let rep = match cmd {
        ReportCmd::Chain { space, p_outer, starts } => {
            let s = read_space(rec, space)?;
            let b = eval_budget(cli, rec, *starts);
            let seed = rec.seed("chain", cli.seed);
            chain_report(&s, *p_outer, &b, seed)?
        }
        ReportCmd::Named { family, p, r, gamma_star_y, extremal } => {
            let gamma_star_y = *gamma_star_y;
            let name = match family {
                Family::Lp => NamedSpace::SequenceLp { p: *p, r: *r, gamma_star_y },
                Family::FunctionLp => NamedSpace::FunctionLp { p: *p, r: *r, gamma_star_y },
                Family::Octahedral => NamedSpace::SeparableOctahedral,
                Family::C0 => NamedSpace::ContinuousZeroDim { extremally_disconnected: *extremal },
                Family::Linf => NamedSpace::LInfinity,
            };
            named_gamma(&name)?
        }
        ReportCmd::Gamma2 { p, pk, ms } => named_gamma(&NamedSpace::GammaTwo { p: *p, pk: pk.clone(), ms: ms.clone() })?,
        ReportCmd::Minkowski => {
            let r = minkowski_type_check(&MinkowskiGrid::standard())?;
            let table = format!("nodes {}\nviolations {}\nall hold {}\n", r.nodes, r.violations.len(), r.all_hold);
            return Ok(Output { json: serde_json::to_value(&r)?, table });
        }
        ReportCmd::Step1 { p, eps } => {
            let n = lp_step1_check(*p, *eps)?;
            return Ok(Output { json: json!({ "p": p, "eps": eps, "n": n }), table: format!("n {n}\n") });
        }
    };
    Ok(Output { json: serde_json::to_value(&rep)?, table: rep.to_table() })
}

/// `key  value` lines for the scalar leaves of a JSON document; numeric
/// arrays stay on one line.
fn flat_table(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, rows);
                }
            }
            Value::Array(a) if a.iter().any(|x| x.is_object()) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, rows);
                }
            }
            other => rows.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut rows = Vec::new();
    walk("", v, &mut rows);
    let w = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    rows.iter().map(|(k, x)| format!("{k:<w$}  {x}\n")).collect()
}

fn emit(cli: &Cli, rec: &mut Recorder, out: &Output, default: Format) -> Result<(), String> {
    let text = match cli.format.unwrap_or(default) {
        Format::Json => serde_json::to_string_pretty(&out.json).map_err(|e| e.to_string())? + "\n",
        Format::Table => out.table.clone(),
    };
    match &cli.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
            rec.output(path.display().to_string(), text.as_bytes());
        }
        None => {
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string())?;
            rec.output("<stdout>".into(), text.as_bytes());
        }
    }
    Ok(())
}

fn write_manifest(cli: &Cli, rec: Recorder, code: u8) {
    let m = rec.finish(code as i32);
    let text = serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n";
    let path = cli.manifest.clone().or_else(|| cli.out.as_deref().map(manifest::default_path));
    match path {
        Some(p) => {
            if let Err(e) = std::fs::write(&p, text) {
                eprintln!("error: {}: {e}", p.display());
            }
        }
        None => eprint!("{text}"),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut rec = Recorder::new(argv);
    rec.seed("run", cli.seed);
    if let Some(b) = cli.budget {
        rec.budget("budget", b as f64);
    }
    let default = if matches!(cli.command, Command::Suite { .. }) { Format::Table } else { Format::Json };
    let code = match execute(&cli, &mut rec) {
        Ok(out) => match emit(&cli, &mut rec, &out, default) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                3
            }
        },
        Err(f) => {
            match &f {
                Failure::Invalid(m) => eprintln!("error: {m}"),
                Failure::Acceptance(m) => eprintln!("acceptance failure: {m}"),
            }
            f.code()
        }
    };
    write_manifest(&cli, rec, code);
    ExitCode::from(code)
}

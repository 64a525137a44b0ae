use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gaudin_core::flow::{self, Trajectory};
use gaudin_core::gaudin::{
    family_f, family_f_sampled, family_g, CasimirSet, GaudinModel, GaudinSpec, IntegralFamily, ModelKind, Provenance,
};
use gaudin_core::golden;
use gaudin_core::liealg::{LieAlgebra, SAMPLE_BOUND};
use gaudin_core::polyring::Poly;
use gaudin_core::rat::{fmt_q, parse_list, parse_q, random_vec, Q};
use gaudin_core::verify::{self, Certificate};
use gaudin_core::PencilDirection;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gaudin", version, about = "Build and certify Gaudin bi-Poisson pencils")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lie algebra utilities.
    Algebra {
        #[command(subcommand)]
        cmd: AlgebraCmd,
    },
    /// Write the pencil and the families F and G as JSON.
    Build(BuildArgs),
    /// Run certificates at a seeded random point (or base points from --model-file).
    Verify {
        #[arg(value_enum)]
        which: Which,
        #[command(flatten)]
        args: VerifyArgs,
    },
    /// Integrate a family member and monitor conservation.
    Flow {
        #[command(subcommand)]
        cmd: FlowCmd,
    },
    /// Closed-form checks for the sl2 model on R^{2N}.
    Golden {
        #[command(subcommand)]
        cmd: GoldenCmd,
    },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Check the Jacobi identity of a catalog algebra or a JSON file.
    Check {
        #[arg(long)]
        algebra: String,
    },
}

#[derive(Subcommand)]
enum FlowCmd {
    Run(FlowArgs),
}

#[derive(Subcommand)]
enum GoldenCmd {
    #[command(name = "sl2-example")]
    Sl2Example(GoldenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Involutivity,
    Independence,
    Admissibility,
    Kronecker,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    /// (g*)^N with Lie-Poisson blocks.
    Product,
    /// R^{2N} with canonical blocks and the sl2 moment map.
    Canonical,
}

#[derive(Args)]
struct ModelArgs {
    /// Catalog name (sl2, so3, sl3, gl2, abelianN) or path to an algebra JSON file.
    #[arg(long, default_value = "sl2")]
    algebra: String,
    #[arg(long, value_enum, default_value = "product")]
    model: ModelArg,
    #[arg(long)]
    sites: Option<usize>,
    /// Comma-separated distinct rationals; defaults to 0,1,...,N-1.
    #[arg(long)]
    weights: Option<String>,
    /// Semicolon-separated Casimir candidates in z1..zn (required outside the catalog).
    #[arg(long)]
    casimirs: Option<String>,
    /// JSON file with algebra, sites, weights and optional base_points.
    #[arg(long)]
    model_file: Option<PathBuf>,
    /// Pencil direction t0 as "t1,t2".
    #[arg(long, default_value = "1,0")]
    t0: String,
    /// Argument-translation direction; a seeded regular element by default.
    #[arg(long)]
    shift: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Check this family file instead of the generated G.
    #[arg(long)]
    family: Option<PathBuf>,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Index of the family member used as hamiltonian.
    #[arg(long)]
    member: Option<usize>,
    /// Comma-separated start point.
    #[arg(long)]
    start: Option<String>,
    /// CSV sampling stride.
    #[arg(long, default_value_t = 100)]
    stride: usize,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GoldenArgs {
    #[arg(long, default_value_t = 3)]
    sites: usize,
    #[arg(long)]
    weights: Option<String>,
    /// Shift z0 of the member z0_1 sum pq + z0_2 sum p^2 + z0_3 sum q^2.
    #[arg(long, default_value = "1,2,3")]
    shift: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
struct ModelFile {
    algebra: String,
    sites: Option<usize>,
    weights: Option<Vec<String>>,
    base_points: Option<Vec<Vec<String>>>,
}

struct Setup {
    model: GaudinModel,
    t0: PencilDirection,
    shift: Vec<Q>,
    base_point: Option<Vec<Q>>,
    rng: ChaCha8Rng,
    config: Value,
}

fn load_algebra(source: &str) -> Result<LieAlgebra> {
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {source}"))?;
        return Ok(LieAlgebra::from_json(&text)?);
    }
    Ok(LieAlgebra::catalog(source)?)
}

fn parse_direction(text: &str) -> Result<PencilDirection> {
    match parse_list(text)?.as_slice() {
        [t1, t2] => Ok(PencilDirection::new(t1.clone(), t2.clone())?),
        _ => bail!("a direction needs two components, got {text:?}"),
    }
}

fn texts(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

fn setup(args: &ModelArgs) -> Result<Setup> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (source, mut sites, mut weights, mut base) = (args.algebra.clone(), args.sites, None, None);
    let source = if let Some(path) = &args.model_file {
        let file: ModelFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        sites = file.sites.or(sites);
        weights = file
            .weights
            .map(|w| w.iter().map(|s| parse_q(s)).collect::<gaudin_core::Result<Vec<Q>>>())
            .transpose()?;
        base = file.base_points;
        file.algebra
    } else {
        source
    };
    if let Some(w) = &args.weights {
        weights = Some(parse_list(w)?);
    }
    let weights = match (weights, sites) {
        (Some(w), Some(n)) if w.len() != n => bail!("{} weights for {n} sites", w.len()),
        (Some(w), _) => w,
        (None, n) => (0..n.unwrap_or(3) as i64).map(|k| Q::from_integer(k.into())).collect(),
    };
    let model = match args.model {
        ModelArg::Canonical => {
            if base.is_some() {
                bail!("base points are only used with the product model");
            }
            GaudinModel::sl2_canonical(weights)?
        }
        ModelArg::Product => {
            let algebra = load_algebra(&source)?;
            let base_points = base
                .as_ref()
                .map(|b| {
                    b.iter()
                        .map(|x| x.iter().map(|s| parse_q(s)).collect())
                        .collect::<gaudin_core::Result<Vec<_>>>()
                })
                .transpose()?;
            let spec = GaudinSpec::new(algebra, weights, base_points)?;
            match &args.casimirs {
                Some(text) => {
                    let names: Vec<String> = (1..=spec.algebra.dim()).map(|k| format!("z{k}")).collect();
                    let polys = text
                        .split(';')
                        .map(|p| Poly::parse(p.trim(), &names))
                        .collect::<gaudin_core::Result<_>>()?;
                    GaudinModel::product_with(&spec, CasimirSet::certify(&spec.algebra, polys)?)?
                }
                None => GaudinModel::product(&spec)?,
            }
        }
    };
    let base_point = match base {
        Some(b) if args.model == ModelArg::Product => Some(
            b.iter()
                .flatten()
                .map(|s| parse_q(s))
                .collect::<gaudin_core::Result<Vec<Q>>>()?,
        ),
        _ => None,
    };
    let t0 = parse_direction(&args.t0)?;
    let g = model.algebra();
    let shift = match &args.shift {
        Some(s) => parse_list(s)?,
        None => {
            let generic = g.generic_orbit_dim(&mut rng)?;
            let mut found = None;
            for _ in 0..20 {
                let a = random_vec(&mut rng, g.dim(), SAMPLE_BOUND);
                if g.orbit_dim(&a)? == generic {
                    found = Some(a);
                    break;
                }
            }
            found.ok_or_else(|| anyhow!("no regular shift direction found"))?
        }
    };
    let config = json!({
        "algebra": g.name(),
        "model": match model.kind() { ModelKind::Product => "product", ModelKind::Sl2Canonical => "canonical" },
        "weights": texts(model.weights()),
        "t0": [fmt_q(&t0.t1), fmt_q(&t0.t2)],
        "shift": texts(&shift),
        "seed": args.seed,
    });
    Ok(Setup {
        model,
        t0,
        shift,
        base_point,
        rng,
        config,
    })
}

fn emit(report: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    if let Err(e) = writeln!(std::io::stdout().lock(), "{text}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            return Err(e.into());
        }
    }
    if let Some(path) = out {
        std::fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cert_value(c: &Certificate) -> Value {
    serde_json::to_value(c).expect("serializable")
}

fn cmd_algebra_check(source: &str) -> Result<bool> {
    let g = load_algebra(source)?;
    let report = g.verify_jacobi();
    emit(
        &json!({ "command": "algebra check", "algebra": g.name(), "dim": g.dim(), "jacobi": report }),
        None,
    )?;
    Ok(report.pass)
}

fn cmd_build(args: &BuildArgs) -> Result<bool> {
    let mut s = setup(&args.model)?;
    let names = s.model.names().to_vec();
    let pencil = s.model.pencil();
    let pencil_json = json!({
        "variables": names,
        "eta1": serde_json::from_str::<Value>(&pencil.eta1.to_json(&names))?,
        "eta2": serde_json::from_str::<Value>(&pencil.eta2.to_json(&names))?,
        "exceptional": pencil.exceptional().iter().map(|t| t.label()).collect::<Vec<_>>(),
    });
    let f = family_f(&s.model)?;
    let g = family_g(&s.model, &s.t0, &s.shift, &mut s.rng)?;
    std::fs::create_dir_all(&args.out)?;
    let write = |name: &str, text: String| -> Result<PathBuf> {
        let path = args.out.join(name);
        std::fs::write(&path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    };
    let files = [
        write("pencil.json", serde_json::to_string_pretty(&pencil_json)?)?,
        write("family_F.json", f.to_json())?,
        write("family_G.json", g.to_json())?,
    ];
    emit(
        &json!({
            "command": "build",
            "config": s.config,
            "family_F": f.len(),
            "family_G": g.len(),
            "files": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        }),
        None,
    )?;
    Ok(true)
}

fn load_family(path: &Path, model: &GaudinModel) -> Result<IntegralFamily> {
    let fam = IntegralFamily::from_json(&std::fs::read_to_string(path)?)?;
    if fam.names() != model.names() {
        bail!(
            "family variables {:?} do not match the model's {:?}",
            fam.names(),
            model.names()
        );
    }
    Ok(fam)
}

fn cmd_verify(which: Which, args: &VerifyArgs) -> Result<bool> {
    let mut s = setup(&args.model)?;
    let model = &s.model;
    let point = match &s.base_point {
        Some(p) => p.clone(),
        None => verify::sample_point(model, &mut s.rng)?,
    };
    let family = match &args.family {
        Some(path) => load_family(path, model)?,
        None => family_g(model, &s.t0, &s.shift, &mut s.rng)?,
    };
    let product = model.kind() == ModelKind::Product;
    let (inv, ind, adm, kro) = match which {
        Which::Involutivity => (true, false, false, false),
        Which::Independence => (false, true, false, false),
        Which::Admissibility => (false, false, true, false),
        Which::Kronecker => (false, false, false, true),
        Which::All => (true, true, product, product),
    };
    let mut certs: Vec<(String, Certificate)> = Vec::new();
    if inv {
        let eta = model.pencil().at(&s.t0);
        certs.push((
            format!("family against eta^{}", s.t0.label()),
            verify::involutivity(&eta, &family)?,
        ));
        if args.family.is_none() {
            let f = family_f(model)?;
            certs.push(("F against eta1".into(), verify::involutivity(&model.pencil().eta1, &f)?));
            certs.push(("F against eta2".into(), verify::involutivity(&model.pencil().eta2, &f)?));
        }
    }
    if ind {
        certs.push(("independence".into(), verify::completeness(model, &family, &point)?));
    }
    if adm {
        certs.push((
            "admissibility".into(),
            verify::admissibility(model, &point, &mut s.rng)?,
        ));
    }
    if kro {
        let ts = verify::default_directions(model, 3);
        certs.push((
            "kronecker".into(),
            verify::kronecker_certificate(model, &point, &ts, &mut s.rng)?,
        ));
    }
    let pass = certs.iter().all(|(_, c)| c.passed());
    let report = json!({
        "command": "verify",
        "config": s.config,
        "point": texts(&point),
        "certificates": certs.iter().map(|(name, c)| json!({ "name": name, "certificate": cert_value(c) })).collect::<Vec<_>>(),
        "pass": pass,
    });
    emit(&report, args.out.as_deref())?;
    Ok(pass)
}

fn cmd_flow(args: &FlowArgs) -> Result<bool> {
    let mut s = setup(&args.model)?;
    let model = &s.model;
    let mut fam = family_g(model, &s.t0, &s.shift, &mut s.rng)?;
    for m in family_f_sampled(model, &verify::default_directions(model, 3))?.members() {
        fam.push_distinct(m.poly.clone(), m.provenance.clone())?;
    }
    let index = match args.member {
        Some(i) if i < fam.len() => i,
        Some(i) => bail!("member {i} out of range (family has {})", fam.len()),
        None => fam
            .members()
            .iter()
            .position(|m| matches!(m.provenance, Provenance::Pole { order: -1, .. }))
            .unwrap_or(0),
    };
    let h = fam.members()[index].poly.clone();
    let start = match &args.start {
        Some(text) => parse_list(text)?,
        None if model.kind() == ModelKind::Product && model.algebra().name() == "sl2" => {
            flow::elliptic_sl2_start(model.sites(), &mut s.rng)
        }
        None => verify::sample_point(model, &mut s.rng)?,
    };
    let eta = model.pencil().at(&s.t0);
    let traj = flow::integrate(&eta, &h, &flow::to_floats(&start), args.dt, args.steps)?;
    let report = flow::conservation_report(&traj, &fam)?;
    if let Some(path) = &args.out {
        if args.stride == 0 {
            bail!("stride must be at least 1");
        }
        let keep = |i: &usize| i.is_multiple_of(args.stride) || *i == traj.states.len() - 1;
        let sampled = Trajectory {
            times: traj
                .times
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(i))
                .map(|(_, t)| *t)
                .collect(),
            states: traj
                .states
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(i))
                .map(|(_, x)| x.clone())
                .collect(),
            hamiltonian: h.clone(),
        };
        let file = std::fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
        flow::write_csv(&sampled, &fam, file)?;
    }
    let max = report.max_drift();
    let pass = max <= args.tolerance;
    emit(
        &json!({
            "command": "flow run",
            "config": s.config,
            "hamiltonian": { "index": index, "poly": h.to_text(fam.names()) },
            "start": texts(&start),
            "dt": args.dt,
            "steps": args.steps,
            "tolerance": args.tolerance,
            "drift": report.members,
            "max_drift": max,
            "pass": pass,
        }),
        None,
    )?;
    Ok(pass)
}

fn cmd_golden(args: &GoldenArgs) -> Result<bool> {
    let weights = match &args.weights {
        Some(w) => parse_list(w)?,
        None => (0..args.sites as i64).map(|k| Q::from_integer(k.into())).collect(),
    };
    if weights.len() != args.sites {
        bail!("{} weights for {} sites", weights.len(), args.sites);
    }
    let z0 = parse_list(&args.shift)?;
    if z0.len() != 3 {
        bail!("the shift needs three components");
    }
    let top = weights.iter().max().cloned().unwrap_or_default();
    let ts = [
        PencilDirection::new(Q::from_integer(1.into()), Q::from_integer(1.into()))?,
        PencilDirection::affine(top + Q::new(7.into(), 2.into())),
    ];
    let ts: Vec<PencilDirection> = ts
        .into_iter()
        .filter(|t| weights.iter().all(|a| &t.t1 + a * &t.t2 != Q::default()))
        .collect();
    let report = golden::sl2_example(&weights, &z0, &ts, &mut ChaCha8Rng::seed_from_u64(args.seed))?;
    let mut value = serde_json::to_value(&report)?;
    value["command"] = json!("golden sl2-example");
    value["seed"] = json!(args.seed);
    emit(&value, args.out.as_deref())?;
    Ok(report.pass)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Algebra {
            cmd: AlgebraCmd::Check { algebra },
        } => cmd_algebra_check(&algebra),
        Command::Build(args) => cmd_build(&args),
        Command::Verify { which, args } => cmd_verify(which, &args),
        Command::Flow {
            cmd: FlowCmd::Run(args),
        } => cmd_flow(&args),
        Command::Golden {
            cmd: GoldenCmd::Sl2Example(args),
        } => cmd_golden(&args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

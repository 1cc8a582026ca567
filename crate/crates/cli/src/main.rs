mod config;

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use skyrme_core::holonomy::{build_atlas, develop_cube, holonomy_rep, CubicalCover, HolonomyOptions};
use skyrme_core::invariants::{invariant_of_connection, ReferenceMaps, SectorInvariants, DEFAULT_SECTOR_TOLERANCE};
use skyrme_core::lattice::{
    log_derivative, make_hedgehog, make_random, make_winding, plaquette_residual, read_field, read_one_form, skyrme_energy_connection,
    skyrme_energy_map, write_field, write_one_form, RandomOptions,
};
use skyrme_core::lie::{certificate_line, CoverKind};
use skyrme_core::minimizer::{minimize_connection, minimize_map, MinimizeOptions, MinimizeTrace};
use skyrme_core::{Algebra, AlgebraSpec, Error, Field, Lattice, OneForm};

use config::{Config, List};

const EXIT_CODES: &str = "\
Exit codes:
  0   success
  2   command-line usage error
  3   configuration error (unreadable file, missing or malformed parameter)
  10  unsupported algebra
  11  internal consistency error
  12  partial bracket: ad undefined
  13  non-integral Killing trace
  14  log out of range
  15  field too rough for this lattice
  16  axis does not close
  17  invalid lattice
  18  invalid argument
  19  no lift table for group
  20  lattice too coarse to resolve sector
  21  not in the same holonomy stratum
  22  connection not flat on cube
  23  overlap constancy violated
  24  holonomies differ
  25  atlas inconsistent
  26  sector drift
  27  stalled
  28  no seed field for sector
  29  format error
  30  io error";

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnsupportedAlgebra(_) => 10,
        Error::Consistency(_) => 11,
        Error::PartialBracket => 12,
        Error::NonIntegralTrace(_) => 13,
        Error::LogOutOfRange(_) => 14,
        Error::FieldTooRough => 15,
        Error::AxisDoesNotClose => 16,
        Error::InvalidLattice(_) => 17,
        Error::InvalidArgument(_) => 18,
        Error::NoLiftTable(_) => 19,
        Error::UnresolvedSector(_) => 20,
        Error::HolonomyStratum => 21,
        Error::NotFlat(_) => 22,
        Error::OverlapConstancy(_) => 23,
        Error::HolonomiesDiffer(_) => 24,
        Error::AtlasInconsistent(_) => 25,
        Error::SectorDrift(_) => 26,
        Error::Stalled(_) => 27,
        Error::NoSeed => 28,
        Error::Format(_) => 29,
        Error::Io(_) => 30,
    }
}

#[derive(Parser)]
#[command(name = "skyrme", version, about = "Generalized Skyrme model on a lattice 3-torus", after_help = EXIT_CODES)]
struct Cli {
    /// Run file with `key = value` lines; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified normalizing constants.
    Constants(ConstantsArgs),
    /// Generate a field file.
    Gen(GenArgs),
    /// Skyrme energy of a field or potential file.
    Energy(InputArgs),
    /// Sector invariants of a field, or of a potential relative to a reference.
    Invariants(InvariantsArgs),
    /// Holonomy representation of a flat potential.
    Holonomy(HolonomyArgs),
    /// Developing map of a flat potential on a box.
    Develop(DevelopArgs),
    /// Sector-preserving energy descent.
    Minimize(MinimizeArgs),
}

#[derive(Args)]
struct ConstantsArgs {
    /// Algebra, e.g. `su(3)`; all certifiable algebras when omitted.
    #[arg(long)]
    group: Option<String>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    group: Option<String>,
    /// Sites per axis: `N` or `N1,N2,N3`.
    #[arg(long)]
    n: Option<List<usize>>,
    /// Torus side lengths: `L` or `L1,L2,L3` (default 1).
    #[arg(long)]
    lengths: Option<List<f64>>,
    /// hedgehog | winding | random
    #[arg(long)]
    kind: Option<String>,
    /// Hedgehog profile radius.
    #[arg(long)]
    radius: Option<f64>,
    /// Winding numbers `m1,m2,m3`.
    #[arg(long)]
    winding: Option<List<i64>>,
    /// Winding direction as algebra coordinates (default: a primitive closed
    /// one-parameter subgroup).
    #[arg(long)]
    axis: Option<List<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    modes: Option<usize>,
    /// Write the flat potential `u⁻¹du` instead of the field `u`.
    #[arg(long)]
    potential: bool,
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct InvariantsArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Reference potential for potential inputs (default: zero).
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Cover spacing in sites (default: a quarter of each axis).
    #[arg(long)]
    spacing: Option<List<usize>>,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct HolonomyArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    spacing: Option<List<usize>>,
}

#[derive(Args)]
struct DevelopArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Box corner `i,j,k` (default origin).
    #[arg(long)]
    origin: Option<List<isize>>,
    /// Box size in sites (default: the whole lattice).
    #[arg(long)]
    extents: Option<List<usize>>,
    /// Plaquette defect gate (default `10·max h`).
    #[arg(long)]
    gate: Option<f64>,
}

#[derive(Args)]
struct MinimizeArgs {
    /// Field file for map-side descent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Flat reference potential for connection-side descent.
    #[arg(long)]
    connection: Option<PathBuf>,
    /// Target class `a1,a2,a3` for connection-side descent.
    #[arg(long)]
    alpha: Option<List<i64>>,
    /// Target charges, one per simple factor.
    #[arg(long)]
    charges: Option<List<i64>>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    grad_tol: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    shrink: Option<f64>,
    #[arg(long)]
    decrease: Option<f64>,
    #[arg(long)]
    sector_interval: Option<usize>,
    /// CSV trace output (default: `<out>.csv`).
    #[arg(long)]
    trace: Option<PathBuf>,
}

enum Failure {
    Core(Error),
    Config(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Config(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

type Run<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(Error::Io(e))) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Run {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(w) = cfg.pick(cli.workers, "workers")? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global()
            .map_err(|e| format!("worker pool: {e}"))?;
    }
    let out: Option<PathBuf> = cfg.pick(cli.out.clone(), "out")?;
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Constants(a) => constants(&cfg, a, &mut stdout),
        Command::Gen(a) => gen(&cfg, a, out, &mut stdout),
        Command::Energy(a) => energy(&cfg, a, &mut stdout),
        Command::Invariants(a) => invariants(&cfg, a, &mut stdout),
        Command::Holonomy(a) => holonomy(&cfg, a, &mut stdout),
        Command::Develop(a) => develop(&cfg, a, out, &mut stdout),
        Command::Minimize(a) => minimize(&cfg, a, out, &mut stdout),
    }
}

fn algebra(cfg: &Config, group: Option<String>) -> Run<Arc<Algebra>> {
    let name: String = cfg.require(group, "group")?;
    let spec: AlgebraSpec = name.parse()?;
    Ok(Arc::new(Algebra::build(spec)?))
}

fn constants(cfg: &Config, a: ConstantsArgs, w: &mut impl Write) -> Run {
    let specs = match cfg.pick(a.group, "group")? {
        Some(g) if g != "all" => vec![g.parse::<AlgebraSpec>()?],
        _ => AlgebraSpec::certifiable(),
    };
    for spec in specs {
        let alg = Algebra::build(spec)?;
        writeln!(w, "{}", certificate_line(&alg)?)?;
    }
    Ok(())
}

fn lattice(cfg: &Config, n: Option<List<usize>>, lengths: Option<List<f64>>) -> Run<Lattice> {
    let dims = cfg.require(n, "n")?.triple("n")?;
    let l = cfg.or(lengths, "lengths", List(vec![1.0]))?.triple("lengths")?;
    Ok(Lattice::new(dims, l)?)
}

fn create(path: &Path) -> Run<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn require_out(out: Option<PathBuf>) -> Run<PathBuf> {
    out.ok_or_else(|| Failure::Config("missing parameter out".into()))
}

fn gen(cfg: &Config, a: GenArgs, out: Option<PathBuf>, w: &mut impl Write) -> Run {
    let alg = algebra(cfg, a.group)?;
    let lat = lattice(cfg, a.n, a.lengths)?;
    let out = require_out(out)?;
    let kind: String = cfg.require(a.kind, "kind")?;
    let u = match kind.as_str() {
        "hedgehog" => make_hedgehog(lat, alg, cfg.or(a.radius, "radius", 0.45)?)?,
        "winding" => {
            let m = cfg.or(a.winding, "winding", List(vec![0]))?.triple("winding")?;
            let axis = match cfg.pick(a.axis, "axis")? {
                Some(List(v)) => v,
                None => match (alg.spec().cover(), alg.factors().first()) {
                    (CoverKind::So3, _) => alg.unit(2),
                    (_, Some(f)) => f.embedding.image_of_v().to_vec(),
                    (_, None) => alg.unit(0),
                },
            };
            make_winding(lat, alg, m, &axis)?
        }
        "random" => {
            let opts = RandomOptions {
                seed: cfg.or(a.seed, "seed", 0)?,
                amplitude: cfg.or(a.amplitude, "amplitude", 1.0)?,
                modes: cfg.or(a.modes, "modes", 2)?,
            };
            make_random(lat, alg, opts)?
        }
        other => return Err(Failure::Config(format!("unknown kind {other:?} (hedgehog, winding, random)"))),
    };
    let potential = a.potential || cfg.or(None, "potential", false)?;
    let mut f = create(&out)?;
    if potential {
        write_one_form(&mut f, &log_derivative(&u)?)?;
    } else {
        write_field(&mut f, &u)?;
    }
    f.flush()?;
    writeln!(w, "wrote={} sites={} group={}", out.display(), u.lattice().sites(), u.algebra().name())?;
    Ok(())
}

enum Loaded {
    Field(Field),
    Form(OneForm),
}

fn load(path: &Path) -> Run<Loaded> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    match bytes.get(..8) {
        Some(b"SKYF0001") => Ok(Loaded::Field(read_field(&mut bytes.as_slice(), None)?)),
        Some(b"SKYA0001") => Ok(Loaded::Form(read_one_form(&mut bytes.as_slice(), None)?)),
        _ => Err(Error::Format(format!("{} is neither a field nor a potential file", path.display())).into()),
    }
}

fn load_form(path: &Path) -> Run<OneForm> {
    match load(path)? {
        Loaded::Form(a) => Ok(a),
        Loaded::Field(_) => Err(Error::Format(format!("{} holds a field, expected a potential", path.display())).into()),
    }
}

fn energy(cfg: &Config, a: InputArgs, w: &mut impl Write) -> Run {
    let path: PathBuf = cfg.require(a.input, "input")?;
    match load(&path)? {
        Loaded::Field(u) => writeln!(w, "energy={:.15e}", skyrme_energy_map(&u)?)?,
        Loaded::Form(f) => writeln!(
            w,
            "energy={:.15e} plaquette_defect={:.3e}",
            skyrme_energy_connection(&f),
            plaquette_residual(&f)
        )?,
    }
    Ok(())
}

fn cover(cfg: &Config, spacing: Option<List<usize>>, lat: &Lattice) -> Run<CubicalCover> {
    Ok(match cfg.pick(spacing, "spacing")? {
        Some(s) => CubicalCover::new(lat.dims(), s.triple("spacing")?)?,
        None => CubicalCover::default_for(lat)?,
    })
}

fn invariants(cfg: &Config, a: InvariantsArgs, w: &mut impl Write) -> Run {
    let path: PathBuf = cfg.require(a.input, "input")?;
    let tol = cfg.or(a.tolerance, "tolerance", DEFAULT_SECTOR_TOLERANCE)?;
    let refs = ReferenceMaps::new();
    let sector = match load(&path)? {
        Loaded::Field(u) => refs.sector_of(&u, tol)?,
        Loaded::Form(f) => {
            let b = match cfg.pick(a.reference, "reference")? {
                Some(p) => load_form(&p)?,
                None => OneForm::zeros(*f.lattice(), f.algebra().clone()),
            };
            let cover = cover(cfg, a.spacing, f.lattice())?;
            invariant_of_connection(&f, &b, &cover, &HolonomyOptions::default(), &refs, tol)?
        }
    };
    writeln!(w, "{}", sector.report())?;
    Ok(())
}

fn holonomy(cfg: &Config, a: HolonomyArgs, w: &mut impl Write) -> Run {
    let path: PathBuf = cfg.require(a.input, "input")?;
    let f = load_form(&path)?;
    let cover = cover(cfg, a.spacing, f.lattice())?;
    let opts = HolonomyOptions::default();
    let rep = holonomy_rep(&f, &cover, &opts)?;
    let atlas = build_atlas(&f, &cover, &opts)?;
    for line in rep.report() {
        writeln!(w, "{line}")?;
    }
    if let Some(lifted) = &rep.lifted {
        for (l, g) in lifted.iter().enumerate() {
            let t = g.trace();
            writeln!(w, "lifted loop={} trace={:.12}{:+.12}i", l + 1, t.re, t.im)?;
        }
    }
    writeln!(
        w,
        "commutation_defect={:.3e} overlap_score={:.3e}",
        rep.commutation_defect(),
        atlas.max_score()
    )?;
    Ok(())
}

fn develop(cfg: &Config, a: DevelopArgs, out: Option<PathBuf>, w: &mut impl Write) -> Run {
    let path: PathBuf = cfg.require(a.input, "input")?;
    let out = require_out(out)?;
    let f = load_form(&path)?;
    let lat = *f.lattice();
    let origin = cfg.or(a.origin, "origin", List(vec![0]))?.triple("origin")?;
    let extents = match cfg.pick(a.extents, "extents")? {
        Some(e) => e.triple("extents")?,
        None => lat.dims(),
    };
    let h = lat.spacings();
    let gate = cfg.or(a.gate, "gate", 10.0 * h[0].max(h[1]).max(h[2]))?;
    let cube = develop_cube(&f, origin, extents, gate)?;
    let u = cube.to_field(&lat, f.algebra().clone())?;
    let mut file = create(&out)?;
    write_field(&mut file, &u)?;
    file.flush()?;
    writeln!(w, "wrote={} extents={:?}", out.display(), extents)?;
    Ok(())
}

fn minimize(cfg: &Config, a: MinimizeArgs, out: Option<PathBuf>, w: &mut impl Write) -> Run {
    let defaults = MinimizeOptions::<f64>::default();
    let opts = MinimizeOptions {
        max_iters: cfg.or(a.max_iters, "max-iters", defaults.max_iters)?,
        grad_tol: cfg.or(a.grad_tol, "grad-tol", defaults.grad_tol)?,
        initial_step: cfg.pick(a.step, "step")?,
        shrink: cfg.or(a.shrink, "shrink", defaults.shrink)?,
        decrease: cfg.or(a.decrease, "decrease", defaults.decrease)?,
        sector_interval: cfg.or(a.sector_interval, "sector-interval", defaults.sector_interval)?,
        ..defaults
    };
    let out = require_out(out)?;
    let trace_path = cfg
        .pick(a.trace, "trace")?
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", out.display())));
    let trace: MinimizeTrace<f64> = match cfg.pick(a.connection, "connection")? {
        Some(p) => {
            let b = load_form(&p)?;
            let alpha = cfg.or(a.alpha, "alpha", List(vec![0]))?.triple("alpha")?;
            let charges = cfg.or(a.charges, "charges", List(vec![]))?.0;
            let (modulus, width) = match b.algebra().spec().cover() {
                CoverKind::So3 => (2, 1),
                CoverKind::Torus(k) => (0, k),
                _ => (1, 1),
            };
            if width != 1 {
                return Err(Failure::Config("alpha for multi-coordinate tori is not accepted on the command line".into()));
            }
            let sector = SectorInvariants {
                alpha: alpha.map(|x| vec![x]),
                modulus,
                charges_raw: charges.iter().map(|c| *c as f64).collect(),
                residuals: vec![0.0; charges.len()],
                charges,
            };
            let (form, _, trace) = minimize_connection(&b, &sector, &opts)?;
            let mut f = create(&out)?;
            write_one_form(&mut f, &form)?;
            f.flush()?;
            trace
        }
        None => {
            let path: PathBuf = cfg.require(a.input, "input")?;
            let u = match load(&path)? {
                Loaded::Field(u) => u,
                Loaded::Form(_) => return Err(Failure::Config("map-side descent needs a field file; use --connection for potentials".into())),
            };
            let (v, trace) = minimize_map(&u, &opts)?;
            let mut f = create(&out)?;
            write_field(&mut f, &v)?;
            f.flush()?;
            trace
        }
    };
    let mut csv = create(&trace_path)?;
    trace.write_csv(&mut csv)?;
    csv.flush()?;
    writeln!(
        w,
        "iterations={} energy={:.15e} termination={:?} {}",
        trace.iterations(),
        trace.final_energy(),
        trace.termination,
        trace.initial_sector.report()
    )?;
    Ok(())
}

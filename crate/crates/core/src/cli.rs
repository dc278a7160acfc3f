//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::calculus::{derivatives, ricci_density, FdConfig};
use crate::error::{Error, Result};
use crate::fields::{check_gmu_stability, check_perp_injectivity, invariant_fields, PolyVectorField};
use crate::futaki::{
    certified_volume, diagonal_comparison, futaki_report, volume_independence_check, IntegralEstimate,
    IntegrationConfig, SamplingMethod, DEFAULT_SAMPLES,
};
use crate::io::{field_json, parse_manifold_file, parse_point, Json, ManifoldFile};
use crate::normal_form::{NormalFormMap, SphereSamplerConfig};
use crate::resonance::{gmu_basis, resonance_table, RESONANCE_TOL};
use crate::volume::{EquivariantVolume, DEFAULT_C, DEFAULT_OUTER_RADIUS};

pub const SEED_ENV: &str = "HOPF_FUTAKI_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_VANISHING: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hopf-futaki", version, about = "Futaki invariants of Hopf manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ManifoldArgs {
    /// Manifold definition (JSON).
    #[arg(long)]
    pub manifold: PathBuf,
    /// Report file; stdout when omitted.
    #[arg(long, visible_alias = "out")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ShellArgs {
    /// Inner radius of the shell where the volume cut-off varies.
    #[arg(long, default_value_t = DEFAULT_C)]
    pub c: f64,
    /// Outer radius of the fundamental domain.
    #[arg(long = "R", visible_alias = "outer-radius", default_value_t = DEFAULT_OUTER_RADIUS)]
    pub outer_radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Mc,
    Qmc,
}

impl From<MethodArg> for SamplingMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Mc => SamplingMethod::Mc,
            MethodArg::Qmc => SamplingMethod::Qmc,
        }
    }
}

#[derive(Debug, Args)]
pub struct IntegrationArgs {
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
    /// Overridden by HOPF_FUTAKI_SEED when set.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::Qmc)]
    pub method: MethodArg,
    /// Finite-difference step in each real coordinate.
    #[arg(long, default_value_t = crate::calculus::DEFAULT_STEP)]
    pub step: f64,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SphereArgs {
    /// Sphere samples for the sup estimate.
    #[arg(long, default_value_t = 4096)]
    pub samples: usize,
    /// Overridden by HOPF_FUTAKI_SEED when set.
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the normal-form conditions.
    Validate {
        #[command(flatten)]
        io: ManifoldArgs,
    },
    /// List resonant multi-indices.
    Resonances {
        #[command(flatten)]
        io: ManifoldArgs,
    },
    /// Monomial basis of the resonant fields.
    GmuBasis {
        #[command(flatten)]
        io: ManifoldArgs,
    },
    /// Basis of γ-invariant polynomial fields with algebra checks.
    InvariantFields {
        #[command(flatten)]
        io: ManifoldArgs,
        /// Degree for the injectivity check on non-resonant fields.
        #[arg(long, default_value_t = crate::fields::DEFAULT_PERP_DEGREE)]
        degree: u32,
    },
    /// Conjugate by d_t and write the resulting manifold.
    Conjugate {
        #[command(flatten)]
        io: ManifoldArgs,
        #[arg(long)]
        t: f64,
    },
    /// Smallest grid value of t certifying the shell.
    AutotuneT {
        #[command(flatten)]
        io: ManifoldArgs,
        #[command(flatten)]
        shell: ShellArgs,
        #[command(flatten)]
        sphere: SphereArgs,
    },
    /// Estimate sup |γ(z)| over a sphere.
    ContractionSup {
        #[command(flatten)]
        io: ManifoldArgs,
        #[arg(long, default_value_t = DEFAULT_OUTER_RADIUS)]
        radius: f64,
        #[command(flatten)]
        sphere: SphereArgs,
    },
    /// Evaluate the equivariant volume density at a point.
    VolumeEval {
        #[command(flatten)]
        io: ManifoldArgs,
        #[command(flatten)]
        shell: ShellArgs,
        /// JSON array of {"re", "im"}.
        #[arg(long)]
        point: String,
    },
    /// Hessian of log f at a point.
    Hessian {
        #[command(flatten)]
        io: ManifoldArgs,
        #[command(flatten)]
        shell: ShellArgs,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = crate::calculus::DEFAULT_STEP)]
        step: f64,
    },
    /// Estimate the Futaki invariant of invariant fields.
    Futaki {
        #[command(flatten)]
        io: ManifoldArgs,
        #[command(flatten)]
        shell: ShellArgs,
        #[command(flatten)]
        integration: IntegrationArgs,
        /// 1-based index into the invariant fields, or "all".
        #[arg(long, default_value = "all")]
        field: String,
    },
    /// Compare estimates across volume forms.
    Independence {
        #[command(flatten)]
        io: ManifoldArgs,
        #[command(flatten)]
        integration: IntegrationArgs,
        #[arg(long, default_value_t = 1)]
        field: usize,
        #[arg(long = "c-values", value_delimiter = ',', default_values_t = [0.8, 0.9])]
        c_values: Vec<f64>,
        /// Amplitude of the non-radial perturbation.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long = "R", visible_alias = "outer-radius", default_value_t = DEFAULT_OUTER_RADIUS)]
        outer_radius: f64,
    },
    /// Compare integrands of γ and its diagonal part.
    CompareDiagonal {
        #[command(flatten)]
        io: ManifoldArgs,
        #[command(flatten)]
        shell: ShellArgs,
        #[command(flatten)]
        integration: IntegrationArgs,
        #[arg(long, default_value_t = 1)]
        field: usize,
        /// Shell points for the pointwise comparison.
        #[arg(long, default_value_t = 10_000)]
        pointwise: u64,
    },
}

/// Parses arguments, runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidEigenvalues(_)
        | Error::Validation(_)
        | Error::Parse(_)
        | Error::InvalidParameter(_)
        | Error::DimensionMismatch { .. } => EXIT_INVALID,
        _ => EXIT_FAILURE,
    }
}

fn seed_override(seed: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("{SEED_ENV} is not an unsigned integer: {s:?}"))),
        Err(_) => Ok(seed),
    }
}

fn read_manifold(path: &Path) -> Result<(ManifoldFile, NormalFormMap)> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let file = parse_manifold_file(&text)?;
    let map = file.to_map()?;
    Ok((file, map))
}

fn emit(path: &Option<PathBuf>, json: &Json) -> Result<()> {
    let text = json.to_pretty();
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn base_config(name: &str, io: &ManifoldArgs) -> Json {
    Json::object()
        .with("subcommand", Json::Str(name.to_string()))
        .with("manifold", Json::Str(io.manifold.display().to_string()))
}

fn shell_config(cfg: Json, shell: &ShellArgs) -> Json {
    cfg.with("c", Json::Real(shell.c)).with("R", Json::Real(shell.outer_radius))
}

fn integration_config(cfg: Json, args: &IntegrationArgs, seed: u64) -> Json {
    cfg.with("samples", Json::Int(args.samples as i64))
        .with("seed", Json::Int(seed as i64))
        .with("method", Json::Str(SamplingMethod::from(args.method).to_string()))
        .with("step", Json::Real(args.step))
}

fn integration(args: &IntegrationArgs) -> Result<IntegrationConfig> {
    if !(args.step > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {}", args.step)));
    }
    Ok(IntegrationConfig {
        samples: args.samples,
        seed: seed_override(args.seed)?,
        method: args.method.into(),
        fd: FdConfig {
            step: args.step,
            richardson: true,
        },
    })
}

fn sphere(args: &SphereArgs) -> Result<SphereSamplerConfig> {
    Ok(SphereSamplerConfig {
        samples: args.samples,
        seed: seed_override(args.seed)?,
        ..SphereSamplerConfig::default()
    })
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(f),
    }
}

fn fields_json(fields: &[PolyVectorField]) -> Json {
    Json::Array(fields.iter().map(field_json).collect())
}

fn estimate_json(obj: Json, e: &IntegralEstimate) -> Json {
    obj.with("value", Json::complex(e.value))
        .with("stderr", Json::Real(e.stderr))
        .with("samples", Json::Int(e.samples as i64))
        .with("seed", Json::Int(e.seed as i64))
        .with("method", Json::Str(e.method.to_string()))
        .with("scale", Json::Real(e.scale))
        .with("relative_resolution", Json::Real(e.relative_resolution()))
        .with("convention_constant", Json::Real(e.convention_constant))
}

fn select_field(fields: &[PolyVectorField], index: usize) -> Result<PolyVectorField> {
    if index == 0 || index > fields.len() {
        return Err(Error::InvalidParameter(format!(
            "field index {index} outside 1..={}",
            fields.len()
        )));
    }
    Ok(fields[index - 1].clone())
}

fn point_arg(text: &str, n: usize) -> Result<Vec<Complex64>> {
    let z = parse_point(text)?;
    if z.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.len(),
        });
    }
    Ok(z)
}

fn execute(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Validate { io } => validate(io),
        Command::Resonances { io } => {
            let (_, map) = read_manifold(&io.manifold)?;
            let table = resonance_table(map.eigenvalues(), RESONANCE_TOL);
            let entries = table
                .entries
                .iter()
                .map(|(s, m)| {
                    Json::object()
                        .with("target", Json::Int(*s as i64 + 1))
                        .with("exponents", Json::Array(m.as_slice().iter().map(|&e| Json::Int(e as i64)).collect()))
                })
                .collect();
            let out = Json::object()
                .with("config", base_config("resonances", io))
                .with("degree_bound", Json::Int(table.degree_bound as i64))
                .with("entries", Json::Array(entries));
            emit(&io.report, &out)?;
            Ok(EXIT_OK)
        }
        Command::GmuBasis { io } => {
            let (_, map) = read_manifold(&io.manifold)?;
            let basis = gmu_basis(map.eigenvalues(), RESONANCE_TOL);
            let out = Json::object()
                .with("config", base_config("gmu-basis", io))
                .with("fields", fields_json(&basis));
            emit(&io.report, &out)?;
            Ok(EXIT_OK)
        }
        Command::InvariantFields { io, degree } => {
            let (_, map) = read_manifold(&io.manifold)?;
            let fields = invariant_fields(&map, RESONANCE_TOL)?;
            let stability = check_gmu_stability(&map, RESONANCE_TOL)?;
            let inj = check_perp_injectivity(&map, *degree, RESONANCE_TOL)?;
            let out = Json::object()
                .with(
                    "config",
                    base_config("invariant-fields", io).with("degree", Json::Int(*degree as i64)),
                )
                .with("fields", fields_json(&fields))
                .with(
                    "stability",
                    Json::object()
                        .with("passed", Json::Bool(stability.passed()))
                        .with("violations", Json::Int(stability.violations.len() as i64)),
                )
                .with(
                    "injectivity",
                    Json::object()
                        .with("degree", Json::Int(inj.degree as i64))
                        .with("columns", Json::Int(inj.columns() as i64))
                        .with("rank", Json::Int(inj.rank.rank as i64))
                        .with("sigma_min", Json::Real(inj.rank.sigma_min()))
                        .with("passed", Json::Bool(inj.passed())),
                );
            emit(&io.report, &out)?;
            Ok(EXIT_OK)
        }
        Command::Conjugate { io, t } => {
            if !(*t > 0.0) {
                return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
            }
            let (_, map) = read_manifold(&io.manifold)?;
            let conj = map.conjugate_dt(*t)?;
            emit(&io.report, &ManifoldFile::from_map(&conj).to_json())?;
            Ok(EXIT_OK)
        }
        Command::AutotuneT { io, shell, sphere: sp } => {
            let (_, map) = read_manifold(&io.manifold)?;
            let cfg = sphere(sp)?;
            let res = map.autotune_t(shell.c, shell.outer_radius, &cfg)?;
            let config = shell_config(base_config("autotune-t", io), shell)
                .with("sphere_samples", Json::Int(cfg.samples as i64))
                .with("seed", Json::Int(cfg.seed as i64));
            let out = Json::object()
                .with("config", config)
                .with("t", Json::Real(res.t))
                .with("sup_estimate", Json::Real(res.certificate.sup_estimate))
                .with("target", Json::Real(shell.c * (1.0 - crate::normal_form::AUTOTUNE_MARGIN)))
                .with("manifold", ManifoldFile::from_map(&res.map).to_json());
            emit(&io.report, &out)?;
            Ok(EXIT_OK)
        }
        Command::ContractionSup { io, radius, sphere: sp } => {
            if !(*radius > 0.0) {
                return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
            }
            let (_, map) = read_manifold(&io.manifold)?;
            let cfg = sphere(sp)?;
            let cert = map.contraction_sup(*radius, &cfg);
            let config = base_config("contraction-sup", io)
                .with("radius", Json::Real(*radius))
                .with("sphere_samples", Json::Int(cfg.samples as i64))
                .with("seed", Json::Int(cfg.seed as i64));
            let out = Json::object()
                .with("config", config)
                .with("radius", Json::Real(cert.radius))
                .with("sup_estimate", Json::Real(cert.sup_estimate))
                .with("samples", Json::Int(cert.samples as i64))
                .with("refined", Json::Bool(cert.refined))
                .with("argmax", Json::complexes(&cert.argmax));
            emit(&io.report, &out)?;
            Ok(EXIT_OK)
        }
        Command::VolumeEval { io, shell, point } => {
            let (_, map) = read_manifold(&io.manifold)?;
            let z = point_arg(point, map.dim())?;
            let vol = EquivariantVolume::new(&map, shell.c, shell.outer_radius)?;
            let (value, k) = vol.eval(&z)?;
            let config = shell_config(base_config("volume-eval", io), shell).with("point", Json::complexes(&z));
            let out = Json::object()
                .with("config", config)
                .with("value", Json::Real(value))
                .with("orbit_index", Json::Int(k));
            emit(&io.report, &out)?;
            Ok(EXIT_OK)
        }
        Command::Hessian {
            io,
            shell,
            point,
            step,
        } => {
            if !(*step > 0.0) {
                return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
            }
            let (_, map) = read_manifold(&io.manifold)?;
            let z = point_arg(point, map.dim())?;
            let vol = EquivariantVolume::new(&map, shell.c, shell.outer_radius)?;
            let fd = FdConfig {
                step: *step,
                richardson: true,
            };
            let d = derivatives(&vol, &z, &fd)?;
            let n = vol.dim();
            let rows = (0..n)
                .map(|i| Json::Array((0..n).map(|j| Json::complex(d.hessian.entries[(i, j)])).collect()))
                .collect();
            let config = shell_config(base_config("hessian", io), shell)
                .with("point", Json::complexes(&z))
                .with("step", Json::Real(*step));
            let out = Json::object()
                .with("config", config)
                .with("log_density", Json::Real(d.log_density))
                .with("gradient", Json::complexes(&d.gradient))
                .with("hessian", Json::Array(rows))
                .with("ricci_density", Json::Real(ricci_density(&d.hessian).value));
            emit(&io.report, &out)?;
            Ok(EXIT_OK)
        }
        Command::Futaki {
            io,
            shell,
            integration: ia,
            field,
        } => futaki(io, shell, ia, field),
        Command::Independence {
            io,
            integration: ia,
            field,
            c_values,
            eps,
            outer_radius,
        } => independence(io, ia, *field, c_values, *eps, *outer_radius),
        Command::CompareDiagonal {
            io,
            shell,
            integration: ia,
            field,
            pointwise,
        } => compare_diagonal(io, shell, ia, *field, *pointwise),
    }
}

fn validate(io: &ManifoldArgs) -> Result<i32> {
    let text = fs::read_to_string(&io.manifold).map_err(|e| Error::Parse(format!("{}: {e}", io.manifold.display())))?;
    let file = parse_manifold_file(&text)?;
    let (eigenvalues, terms) = file.to_parts()?;
    let map = NormalFormMap::new_unchecked(eigenvalues, terms);
    let report = map.validate(RESONANCE_TOL);
    let violations = report
        .violations
        .iter()
        .map(|v| {
            Json::object()
                .with("term", Json::Int(v.term as i64 + 1))
                .with("rule", Json::Str(format!("{:?}", v.rule).to_lowercase()))
                .with("message", Json::Str(v.message.clone()))
        })
        .collect();
    let out = Json::object()
        .with("config", base_config("validate", io))
        .with("valid", Json::Bool(report.is_empty()))
        .with("violations", Json::Array(violations));
    emit(&io.report, &out)?;
    if report.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprint!("{}", Error::Validation(report));
        Ok(EXIT_INVALID)
    }
}

fn futaki(io: &ManifoldArgs, shell: &ShellArgs, ia: &IntegrationArgs, field: &str) -> Result<i32> {
    let (file, map) = read_manifold(&io.manifold)?;
    let cfg = integration(ia)?;
    let selection: Option<usize> = match field.trim() {
        "all" => None,
        s => Some(
            s.parse()
                .map_err(|_| Error::InvalidParameter(format!("--field must be an index or \"all\", got {s:?}")))?,
        ),
    };
    let report = with_threads(ia.threads, || {
        let chosen = match selection {
            None => None,
            Some(k) => {
                let (used, _, _) = certified_volume(&map, shell.c, shell.outer_radius)?;
                Some(vec![select_field(&invariant_fields(&used, RESONANCE_TOL)?, k)?])
            }
        };
        futaki_report(&map, chosen.as_deref(), shell.c, shell.outer_radius, &cfg)
    })?;
    let config = integration_config(shell_config(base_config("futaki", io), shell), ia, cfg.seed)
        .with("field", Json::Str(field.to_string()));
    let entries = report
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let index = selection.unwrap_or(i + 1);
            let obj = Json::object()
                .with("index", Json::Int(index as i64))
                .with("field", Json::object().with("terms", field_json(&e.field)))
                .with("invariant", Json::Bool(e.invariant));
            estimate_json(obj, &e.estimate).with("vanishing", Json::Bool(e.vanishing))
        })
        .collect();
    let out = Json::object()
        .with("config", config)
        .with("manifold", file.to_json())
        .with("conjugation_t", Json::Real(report.conjugation_t))
        .with("integrated_manifold", ManifoldFile::from_map(&report.map).to_json())
        .with("fields", Json::Array(entries))
        .with("all_vanishing", Json::Bool(report.all_vanishing()));
    emit(&io.report, &out)?;
    Ok(if report.all_vanishing() { EXIT_OK } else { EXIT_NOT_VANISHING })
}

fn independence(
    io: &ManifoldArgs,
    ia: &IntegrationArgs,
    field: usize,
    c_values: &[f64],
    eps: f64,
    outer_radius: f64,
) -> Result<i32> {
    let (file, map) = read_manifold(&io.manifold)?;
    let cfg = integration(ia)?;
    let c_min = c_values.iter().copied().fold(f64::INFINITY, f64::min);
    if c_values.is_empty() || !(c_min > 0.0) {
        return Err(Error::InvalidParameter("--c-values needs values in (0,1)".into()));
    }
    let (used, t, report) = with_threads(ia.threads, || {
        let (used, t, _) = certified_volume(&map, c_min, outer_radius)?;
        let v = select_field(&invariant_fields(&used, RESONANCE_TOL)?, field)?;
        let report = volume_independence_check(&used, &v, c_values, eps, outer_radius, &cfg)?;
        Ok((used, t, report))
    })?;
    let config = integration_config(base_config("independence", io), ia, cfg.seed)
        .with("field", Json::Int(field as i64))
        .with("c_values", Json::reals(c_values))
        .with("eps", Json::Real(eps))
        .with("R", Json::Real(outer_radius));
    let variants = report
        .variants
        .iter()
        .map(|v| {
            let obj = Json::object()
                .with("label", Json::Str(v.label.clone()))
                .with("c", Json::Real(v.c))
                .with("amplitude", Json::Real(v.amplitude));
            estimate_json(obj, &v.estimate).with("vanishing", Json::Bool(v.estimate.is_vanishing()))
        })
        .collect();
    let v = select_field(&invariant_fields(&used, RESONANCE_TOL)?, field)?;
    let out = Json::object()
        .with("config", config)
        .with("manifold", file.to_json())
        .with("conjugation_t", Json::Real(t))
        .with("field", Json::object().with("terms", field_json(&v)))
        .with("variants", Json::Array(variants))
        .with("consistent", Json::Bool(report.consistent()))
        .with("all_vanishing", Json::Bool(report.all_vanishing()));
    emit(&io.report, &out)?;
    Ok(if report.consistent() { EXIT_OK } else { EXIT_NOT_VANISHING })
}

/// Pointwise agreement required of the two integrands, relative to the
/// largest integrand magnitude (at least 1).
pub const DIAGONAL_AGREEMENT_TOL: f64 = 1e-10;

fn compare_diagonal(io: &ManifoldArgs, shell: &ShellArgs, ia: &IntegrationArgs, field: usize, pointwise: u64) -> Result<i32> {
    let (file, map) = read_manifold(&io.manifold)?;
    let cfg = integration(ia)?;
    let (t, v, cmp) = with_threads(ia.threads, || {
        let (used, t, _) = certified_volume(&map, shell.c, shell.outer_radius)?;
        let v = select_field(&invariant_fields(&used, RESONANCE_TOL)?, field)?;
        let cmp = diagonal_comparison(&used, &v, shell.c, shell.outer_radius, &cfg, pointwise)?;
        Ok((t, v, cmp))
    })?;
    let agrees = cmp.max_pointwise_diff <= DIAGONAL_AGREEMENT_TOL * cmp.max_pointwise_abs.max(1.0);
    let config = integration_config(shell_config(base_config("compare-diagonal", io), shell), ia, cfg.seed)
        .with("field", Json::Int(field as i64))
        .with("pointwise", Json::Int(pointwise as i64));
    let out = Json::object()
        .with("config", config)
        .with("manifold", file.to_json())
        .with("conjugation_t", Json::Real(t))
        .with("field", Json::object().with("terms", field_json(&v)))
        .with("max_pointwise_diff", Json::Real(cmp.max_pointwise_diff))
        .with("max_pointwise_abs", Json::Real(cmp.max_pointwise_abs))
        .with("pointwise_agrees", Json::Bool(agrees))
        .with("gamma", estimate_json(Json::object(), &cmp.gamma))
        .with("diagonal", estimate_json(Json::object(), &cmp.diagonal));
    emit(&io.report, &out)?;
    Ok(if agrees { EXIT_OK } else { EXIT_NOT_VANISHING })
}

//! Command line front end: loads regions, lattices, and tuples from JSON,
//! dispatches into the library, and emits certificates and reports.
//!
//! Exit codes: 0 success, 1 input error, 2 mathematical infeasibility
//! (non-tiling, impossible converse, degenerate approximation), 3 search or
//! tolerance exhaustion.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use lca_tiling::approx::{interpolation_set, sampling_set, CosetRole, CosetUnion, SynthesisParams};
use lca_tiling::error::Error as LibError;
use lca_tiling::json::{
    CertificateDto, ConfigDto, CosetUnionDto, DensityDto, KernelDto, ProfileDto, RegionDto,
    SynthesisDto, TupleDto, TupleResultDto,
};
use lca_tiling::lift::lift_basis;
use lca_tiling::oracle::{counterexample_profile, oracle_batch, Gap};
use lca_tiling::rat::parse_rat;
use lca_tiling::riesz::{
    converse_check, riesz_bounds, sample_universal_tuple, UniversalityProblem, Verdict,
};
use lca_tiling::tiling::{configurations, decompose_tiles, multiplicity_profile};

#[derive(Parser)]
#[command(name = "lca-tiling", version, about = "Exact multi-tiling, Riesz bases of characters, and near-critical sampling sets on elemental LCA groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the region is an exact k-tiling of the lattice
    VerifyTiling {
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a k-tiling into k disjoint 1-tilings
    Decompose {
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the fiber configurations of a k-tiling
    Configurations {
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Riesz bounds of the exponent system E(Ω,Λ,a)
    FrameBounds {
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Random search for a tuple universal for a family of k-tilings
    FindTuple {
        #[arg(long)]
        lattice: PathBuf,
        /// one or more k-tiling regions (repeat the flag)
        #[arg(long, required = true)]
        region: Vec<PathBuf>,
        #[arg(short)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        max_tries: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Can k exponentials over this region ever form a Riesz basis?
    Converse {
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        lattice: PathBuf,
        #[arg(short)]
        k: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lift a quotient exponent system along a finite kernel
    Lift {
        /// region in the quotient group
        #[arg(long)]
        region: PathBuf,
        /// base characters (dual of the quotient, or dual of the ambient)
        #[arg(long)]
        tuple: PathBuf,
        /// kernel description with the ambient signature
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sampling set from an outer dyadic cube cover
    BuildSamplingSet {
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        epsilon: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        max_tries: u32,
        #[arg(long)]
        kernel: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interpolation set from an inner dyadic cube pack
    BuildInterpolationSet {
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        epsilon: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        max_tries: u32,
        #[arg(long)]
        kernel: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact density of a coset union J = ⋃ (a_j + H)
    Density {
        /// lattice H
        #[arg(long)]
        lattice: PathBuf,
        /// shifts a_j
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long, default_value = "sampling")]
        role: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized batch comparison of fiber bounds against the Gram oracle
    OracleCheck {
        #[arg(long, default_value_t = 200)]
        count: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        max_modulus: u64,
        #[arg(long, default_value_t = 4)]
        max_k: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decay profile of the 2-tiling whose fibers degenerate
    Counterexample {
        #[arg(long)]
        nmax: u64,
        /// exponent gap a₂−a₁, as "p/q" or a float
        #[arg(long)]
        gap: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

/// Everything needed to reproduce a run; echoed into every artifact.
#[derive(Serialize)]
struct RunManifest {
    subcommand: String,
    inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_tries: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<String>,
    version: String,
}

impl RunManifest {
    fn new(subcommand: &str, inputs: &[&Path]) -> Self {
        RunManifest {
            subcommand: subcommand.into(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            seed: None,
            epsilon: None,
            tol: None,
            max_tries: None,
            out: None,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

enum CliError {
    Input(String),
    Lib(LibError),
}

impl From<LibError> for CliError {
    fn from(e: LibError) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Input(_) => 1,
        CliError::Lib(err) => match err {
            LibError::TupleSearchExhausted { .. } => 3,
            LibError::NotAKTiling(_)
            | LibError::DegenerateApproximation(_)
            | LibError::DuplicateShifts
            | LibError::CharacterNotInAnnihilator => 2,
            _ => 1,
        },
    }
}

type CliResult<T> = Result<T, CliError>;

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed JSON in {}: {e}", path.display())))
}

fn load_region(path: &Path) -> CliResult<lca_tiling::Region> {
    let dto: RegionDto = load_json(path)?;
    Ok(dto.to_region()?)
}

fn load_lattice(path: &Path) -> CliResult<lca_tiling::Lattice> {
    let dto: lca_tiling::json::LatticeDto = load_json(path)?;
    Ok(dto.to_lattice()?)
}

fn load_tuple(path: &Path) -> CliResult<Vec<lca_tiling::GroupElement>> {
    let dto: TupleDto = load_json(path)?;
    Ok(dto.to_points()?)
}

/// Write the artifact (with the manifest embedded) to `out`, or to stdout
/// when no output path is given.
fn emit_json(manifest: &RunManifest, result: serde_json::Value, out: &Option<PathBuf>) -> CliResult<()> {
    let doc = json!({ "manifest": manifest, "result": result });
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::Input(format!("serialization failed: {e}")))?;
    write_artifact(&text, out)
}

fn emit_csv(manifest: &RunManifest, header: &str, rows: &[String], out: &Option<PathBuf>) -> CliResult<()> {
    let manifest_line = serde_json::to_string(manifest)
        .map_err(|e| CliError::Input(format!("serialization failed: {e}")))?;
    let mut text = format!("# manifest: {manifest_line}\n{header}\n");
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    write_artifact(&text, out)
}

fn write_artifact(text: &str, out: &Option<PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn parse_epsilon(s: &str) -> CliResult<lca_tiling::Rat> {
    parse_rat(s).map_err(|_| CliError::Input(format!("invalid epsilon {s:?}; expected p/q")))
}

/// Compact human-readable rendering of a cell for CSV rows.
fn cell_str(c: &ConfigDto) -> String {
    let mut parts = Vec::new();
    for [a, b] in &c.cell.real {
        parts.push(format!("[{a},{b})"));
    }
    for v in &c.cell.int {
        parts.push(v.to_string());
    }
    for [a, b] in &c.cell.torus {
        parts.push(format!("[{a},{b})"));
    }
    for v in &c.cell.finite {
        parts.push(v.to_string());
    }
    parts.join(" ")
}

fn offsets_str(c: &ConfigDto) -> String {
    c.offsets
        .iter()
        .map(|e| {
            let mut coords = Vec::new();
            coords.extend(e.real.iter().cloned());
            coords.extend(e.int.iter().map(|v| v.to_string()));
            coords.extend(e.torus.iter().cloned());
            coords.extend(e.finite.iter().map(|v| v.to_string()));
            format!("({})", coords.join(" "))
        })
        .collect::<Vec<_>>()
        .join("|")
}

fn config_csv(configs: &[ConfigDto]) -> (String, Vec<String>) {
    let header = "cell,offsets,sigma_min_sq,sigma_max_sq".to_string();
    let rows = configs
        .iter()
        .map(|c| {
            format!(
                "\"{}\",\"{}\",{},{}",
                cell_str(c),
                offsets_str(c),
                c.sigma_min_sq.map(|v| v.to_string()).unwrap_or_default(),
                c.sigma_max_sq.map(|v| v.to_string()).unwrap_or_default(),
            )
        })
        .collect();
    (header, rows)
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::VerifyTiling { region, lattice, out } => {
            let omega = load_region(&region)?;
            let lam = load_lattice(&lattice)?;
            let mut manifest = RunManifest::new("verify-tiling", &[&region, &lattice]);
            manifest.out = out.as_ref().map(|p| p.display().to_string());
            let profile = multiplicity_profile(&omega, &lam)?;
            let dto = ProfileDto::from_profile(&profile);
            let code = match profile.as_uniform() {
                Some(k) => {
                    println!("k={k}");
                    0
                }
                None => {
                    println!("not a k-tiling; profile:");
                    for (m, v) in &profile.entries {
                        println!("  multiplicity {m}: measure {v}");
                    }
                    2
                }
            };
            if out.is_some() {
                emit_json(&manifest, serde_json::to_value(dto).unwrap(), &out)?;
            }
            Ok(code)
        }
        Command::Decompose { region, lattice, out } => {
            let omega = load_region(&region)?;
            let lam = load_lattice(&lattice)?;
            let mut manifest = RunManifest::new("decompose", &[&region, &lattice]);
            manifest.out = out.as_ref().map(|p| p.display().to_string());
            let tiles = decompose_tiles(&omega, &lam)?;
            println!("decomposed into {} tiles", tiles.len());
            let dtos: Vec<RegionDto> = tiles
                .iter()
                .map(RegionDto::from_region)
                .collect::<Result<_, _>>()?;
            emit_json(
                &manifest,
                json!({ "k": tiles.len(), "tiles": dtos }),
                &out,
            )?;
            Ok(0)
        }
        Command::Configurations { region, lattice, out, format } => {
            let omega = load_region(&region)?;
            let lam = load_lattice(&lattice)?;
            let mut manifest = RunManifest::new("configurations", &[&region, &lattice]);
            manifest.out = out.as_ref().map(|p| p.display().to_string());
            let configs = configurations(&omega, &lam)?;
            println!("{} configurations", configs.len());
            let dtos: Vec<ConfigDto> = configs
                .iter()
                .map(ConfigDto::from_config)
                .collect::<Result<_, _>>()?;
            match format {
                Format::Json => emit_json(&manifest, serde_json::to_value(dtos).unwrap(), &out)?,
                Format::Csv => {
                    let (header, rows) = config_csv(&dtos);
                    emit_csv(&manifest, &header, &rows, &out)?;
                }
            }
            Ok(0)
        }
        Command::FrameBounds { region, lattice, tuple, out, format } => {
            let omega = load_region(&region)?;
            let lam = load_lattice(&lattice)?;
            let points = load_tuple(&tuple)?;
            let mut manifest = RunManifest::new("frame-bounds", &[&region, &lattice, &tuple]);
            manifest.out = out.as_ref().map(|p| p.display().to_string());
            let cert = riesz_bounds(&omega, &lam, &points)?;
            println!("A={:.17e} B={:.17e}", cert.lower, cert.upper);
            let dto = CertificateDto::from_certificate(&cert)?;
            match format {
                Format::Json => emit_json(&manifest, serde_json::to_value(&dto).unwrap(), &out)?,
                Format::Csv => {
                    let (header, rows) = config_csv(&dto.configs);
                    emit_csv(&manifest, &header, &rows, &out)?;
                }
            }
            Ok(0)
        }
        Command::FindTuple { lattice, region, k, tol, seed, max_tries, out } => {
            let lam = load_lattice(&lattice)?;
            let mut problems = Vec::new();
            let mut inputs: Vec<&Path> = vec![&lattice];
            for r in &region {
                inputs.push(r);
                let omega = load_region(r)?;
                problems.push(UniversalityProblem::new(&omega, &lam)?);
            }
            let k = k.unwrap_or(problems[0].k);
            let mut manifest = RunManifest::new("find-tuple", &inputs);
            manifest.seed = Some(seed);
            manifest.tol = Some(tol);
            manifest.max_tries = Some(max_tries);
            manifest.out = out.as_ref().map(|p| p.display().to_string());
            let tuple = sample_universal_tuple(&lam, k, &problems, tol, max_tries, seed)?;
            println!(
                "found a universal {k}-tuple in {} tries (min lower bound {:.17e})",
                tuple.tries, tuple.min_lower
            );
            let dto = TupleResultDto::from_tuple(&tuple)?;
            emit_json(&manifest, serde_json::to_value(dto).unwrap(), &out)?;
            Ok(0)
        }
        Command::Converse { region, lattice, k, out } => {
            let omega = load_region(&region)?;
            let lam = load_lattice(&lattice)?;
            let mut manifest = RunManifest::new("converse", &[&region, &lattice]);
            manifest.out = out.as_ref().map(|p| p.display().to_string());
            match converse_check(&omega, &lam, k)? {
                Verdict::Possible { k } => {
                    println!("possible: the region {k}-tiles the lattice");
                    if out.is_some() {
                        emit_json(&manifest, json!({ "verdict": "possible", "k": k }), &out)?;
                    }
                    Ok(0)
                }
                Verdict::Impossible { expected, profile } => {
                    println!("impossible: no {expected}-tuple yields a Riesz basis; profile:");
                    for (m, v) in &profile.entries {
                        println!("  multiplicity {m}: measure {v}");
                    }
                    let dto = ProfileDto::from_profile(&profile);
                    if out.is_some() {
                        emit_json(
                            &manifest,
                            json!({ "verdict": "impossible", "k": expected, "profile": dto }),
                            &out,
                        )?;
                    }
                    Ok(2)
                }
            }
        }
        Command::Lift { region, tuple, kernel, out } => {
            let kernel_dto: KernelDto = load_json(&kernel)?;
            let (ambient, spec) = kernel_dto.to_kernel()?;
            let quotient = load_region(&region)?;
            let base = load_tuple(&tuple)?;
            let mut manifest = RunManifest::new("lift", &[&region, &tuple, &kernel]);
            manifest.out = out.as_ref().map(|p| p.display().to_string());
            let (lifted, points) = lift_basis(&quotient, &base, &spec, &ambient)?;
            println!(
                "lifted {} base characters to {} characters over a region of measure {}",
                base.len(),
                points.len(),
                lifted.measure()
            );
            let result = json!({
                "region": RegionDto::from_region(&lifted)?,
                "points": TupleDto::from_points(&points)?,
            });
            emit_json(&manifest, result, &out)?;
            Ok(0)
        }
        Command::BuildSamplingSet { region, epsilon, tol, seed, max_tries, kernel, out } => {
            build_set(region, epsilon, tol, seed, max_tries, kernel, out, CosetRole::Sampling)
        }
        Command::BuildInterpolationSet { region, epsilon, tol, seed, max_tries, kernel, out } => {
            build_set(region, epsilon, tol, seed, max_tries, kernel, out, CosetRole::Interpolation)
        }
        Command::Density { lattice, tuple, role, out } => {
            let lam = load_lattice(&lattice)?;
            let points = load_tuple(&tuple)?;
            let mut manifest = RunManifest::new("density", &[&lattice, &tuple]);
            manifest.out = out.as_ref().map(|p| p.display().to_string());
            let role = match role.as_str() {
                "interpolation" => CosetRole::Interpolation,
                _ => CosetRole::Sampling,
            };
            let j = CosetUnion { lattice: lam, shifts: points, role };
            let report = lca_tiling::approx::density(&j)?;
            println!("density = {}", report.value);
            let dto = DensityDto::from_report(&j, &report);
            emit_json(&manifest, serde_json::to_value(dto).unwrap(), &out)?;
            Ok(0)
        }
        Command::OracleCheck { count, seed, max_modulus, max_k, out } => {
            let mut manifest = RunManifest::new("oracle-check", &[]);
            manifest.seed = Some(seed);
            manifest.out = out.as_ref().map(|p| p.display().to_string());
            let worst = oracle_batch(count, seed, max_modulus, max_k)?;
            println!("worst deviation over {count} instances: {worst:.3e}");
            let pass = worst <= 1e-9;
            emit_json(
                &manifest,
                json!({ "count": count, "seed": seed, "worst_deviation": worst, "pass": pass }),
                &out,
            )?;
            Ok(if pass { 0 } else { 2 })
        }
        Command::Counterexample { nmax, gap, out, format } => {
            let gap_val = match parse_rat(&gap) {
                Ok(r) => Gap::Rational(r),
                Err(_) => Gap::Irrational(gap.parse::<f64>().map_err(|_| {
                    CliError::Input(format!("invalid gap {gap:?}; expected p/q or a float"))
                })?),
            };
            let mut manifest = RunManifest::new("counterexample", &[]);
            manifest.out = out.as_ref().map(|p| p.display().to_string());
            let profile = counterexample_profile(
                nmax,
                &Gap::Rational(lca_tiling::rat::rat(0, 1)),
                &gap_val,
            )?;
            let min = profile.running_min().last().copied().unwrap_or(f64::INFINITY);
            println!("running minimum of sigma_min_sq: {min:.3e}");
            match format {
                Format::Csv => {
                    let rows: Vec<String> = profile
                        .rows
                        .iter()
                        .map(|r| format!("{},{}", r.n, r.sigma_min_sq))
                        .collect();
                    emit_csv(&manifest, "n,sigma_min_sq", &rows, &out)?;
                }
                Format::Json => {
                    let rows: Vec<serde_json::Value> = profile
                        .rows
                        .iter()
                        .map(|r| {
                            json!({ "n": r.n, "offsets": [r.offsets.0, r.offsets.1], "sigma_min_sq": r.sigma_min_sq })
                        })
                        .collect();
                    emit_json(&manifest, json!({ "rows": rows }), &out)?;
                }
            }
            Ok(0)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn build_set(
    region: PathBuf,
    epsilon: String,
    tol: f64,
    seed: u64,
    max_tries: u32,
    kernel: Option<PathBuf>,
    out: Option<PathBuf>,
    role: CosetRole,
) -> CliResult<u8> {
    let omega = load_region(&region)?;
    let name = match role {
        CosetRole::Sampling => "build-sampling-set",
        CosetRole::Interpolation => "build-interpolation-set",
    };
    let mut inputs: Vec<&Path> = vec![&region];
    let kernel_spec = match &kernel {
        Some(path) => {
            inputs.push(path);
            let dto: KernelDto = load_json(path)?;
            let (ambient, spec) = dto.to_kernel()?;
            if &ambient != omega.sig() {
                return Err(CliError::Input(
                    "the kernel's ambient signature does not match the region".into(),
                ));
            }
            Some(spec)
        }
        None => None,
    };
    let mut manifest = RunManifest::new(name, &inputs);
    manifest.epsilon = Some(epsilon.clone());
    manifest.tol = Some(tol);
    manifest.seed = Some(seed);
    manifest.max_tries = Some(max_tries);
    manifest.out = out.as_ref().map(|p| p.display().to_string());
    let params = SynthesisParams {
        epsilon: parse_epsilon(&epsilon)?,
        tol,
        max_tries,
        seed,
        kernel: kernel_spec,
    };
    let result = match role {
        CosetRole::Sampling => sampling_set(&omega, &params)?,
        CosetRole::Interpolation => interpolation_set(&omega, &params)?,
    };
    println!(
        "density = {} (generation {}, {} shifts, A={:.17e})",
        result.density.value,
        result.approximation.generation,
        result.coset_union.shifts.len(),
        result.certificate.lower
    );
    // the coset union itself, round-trippable through the schema
    let j_dto = CosetUnionDto::from_coset_union(&result.coset_union)?;
    let dto = SynthesisDto::from_result(&result)?;
    let mut value = serde_json::to_value(dto).unwrap();
    value["coset_union"] = serde_json::to_value(j_dto).unwrap();
    emit_json(&manifest, value, &out)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

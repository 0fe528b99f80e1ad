//! Riesz bounds for exponent systems E(Ω,Λ,a) = {e^{2πi(a_j+λ)·x} χ_Ω}
//! built from a k-tiling Ω of Λ and a tuple a = (a_1,…,a_k) of points of
//! the dual group.
//!
//! On each fiber configuration the system reduces to the k×k unit-modulus
//! matrix E[r][c] = (a_c, λ_r) over the covering offsets λ_r, and the Riesz
//! constants are A = min σ_min²(E), B = max σ_max²(E) over the finitely
//! many configurations (squared singular values, normalized so that a
//! k-tiling with an orthogonal tuple gives A = B = k).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{pairing, GroupElement, Lattice};
use crate::rat::Rat;
use crate::region::Region;
use crate::spectrum::squared_singular_range;
use crate::tiling::{configurations, multiplicity_profile, FiberConfiguration, MultiplicityProfile};

/// The k×k fiber matrix of a configuration against a k-tuple of dual
/// points: rows run over the covering offsets, columns over the tuple.
pub fn fiber_matrix(
    config: &FiberConfiguration,
    points: &[GroupElement],
) -> Result<DMatrix<Complex64>> {
    let k = config.offsets.len();
    if points.len() != k {
        return Err(Error::ArityMismatch { expected: k, got: points.len() });
    }
    let mut entries = Vec::with_capacity(k * k);
    for lam in &config.offsets {
        for a in points {
            entries.push(pairing(a, lam)?);
        }
    }
    Ok(DMatrix::from_row_slice(k, k, &entries))
}

/// Per-configuration extreme squared singular values.
#[derive(Debug, Clone)]
pub struct ConfigBound {
    pub config: FiberConfiguration,
    pub sigma_min_sq: f64,
    pub sigma_max_sq: f64,
}

/// Riesz constants of E(Ω,Λ,a) together with the witnessing configuration
/// spectra.
#[derive(Debug, Clone)]
pub struct RieszCertificate {
    /// lower Riesz bound A
    pub lower: f64,
    /// upper Riesz bound B
    pub upper: f64,
    pub config_bounds: Vec<ConfigBound>,
}

/// Riesz constants from precomputed configurations.
pub fn bounds_from_configs(
    configs: &[FiberConfiguration],
    points: &[GroupElement],
) -> Result<RieszCertificate> {
    if configs.is_empty() {
        return Err(Error::InvalidRegion("no configurations: the region is empty".into()));
    }
    let mut config_bounds = Vec::with_capacity(configs.len());
    let mut lower = f64::INFINITY;
    let mut upper = 0.0f64;
    for config in configs {
        let e = fiber_matrix(config, points)?;
        let (lo, hi) = squared_singular_range(&e);
        lower = lower.min(lo);
        upper = upper.max(hi);
        config_bounds.push(ConfigBound { config: config.clone(), sigma_min_sq: lo, sigma_max_sq: hi });
    }
    Ok(RieszCertificate { lower, upper, config_bounds })
}

/// Riesz constants of E(Ω,Λ,a); Ω must k-tile Λ with k = |a|.
pub fn riesz_bounds(
    omega: &Region,
    lambda: &Lattice,
    points: &[GroupElement],
) -> Result<RieszCertificate> {
    let configs = configurations(omega, lambda)?;
    if configs[0].offsets.len() != points.len() {
        return Err(Error::ArityMismatch {
            expected: configs[0].offsets.len(),
            got: points.len(),
        });
    }
    bounds_from_configs(&configs, points)
}

/// One k-tiling instance with its configurations precomputed, so that many
/// candidate tuples can be tested against it cheaply.
#[derive(Debug, Clone)]
pub struct UniversalityProblem {
    pub configs: Vec<FiberConfiguration>,
    pub k: usize,
}

impl UniversalityProblem {
    pub fn new(omega: &Region, lambda: &Lattice) -> Result<Self> {
        let configs = configurations(omega, lambda)?;
        let k = configs[0].offsets.len();
        Ok(UniversalityProblem { configs, k })
    }
}

/// Outcome of testing one tuple against a family of k-tiling instances.
#[derive(Debug, Clone)]
pub struct UniversalityOutcome {
    pub ok: bool,
    /// smallest lower Riesz bound across the family
    pub min_lower: f64,
    pub certificates: Vec<RieszCertificate>,
}

/// Does the tuple give a Riesz basis (lower bound ≥ tol) simultaneously for
/// every instance of the family?
pub fn is_universal_for(
    points: &[GroupElement],
    family: &[UniversalityProblem],
    tol: f64,
) -> Result<UniversalityOutcome> {
    let mut certificates = Vec::with_capacity(family.len());
    let mut min_lower = f64::INFINITY;
    for problem in family {
        if problem.k != points.len() {
            return Err(Error::ArityMismatch { expected: problem.k, got: points.len() });
        }
        let cert = bounds_from_configs(&problem.configs, points)?;
        min_lower = min_lower.min(cert.lower);
        certificates.push(cert);
    }
    Ok(UniversalityOutcome { ok: min_lower >= tol, min_lower, certificates })
}

/// A tuple found by random search, with the certificates that witnessed
/// universality.
#[derive(Debug, Clone)]
pub struct UniversalTuple {
    pub points: Vec<GroupElement>,
    pub certificates: Vec<RieszCertificate>,
    pub min_lower: f64,
    pub tries: u32,
}

const DYADIC_BITS: u32 = 53;

/// Draw random k-tuples from a fundamental domain of Λ^⊥ ⊂ G (dyadic
/// rationals with 53 fractional bits on the continuous axes) until one is
/// universal for the whole family, or the try budget runs out. Almost every
/// tuple works, so this terminates quickly in practice; the search is
/// deterministic in the seed.
pub fn sample_universal_tuple(
    lambda: &Lattice,
    k: usize,
    family: &[UniversalityProblem],
    tol: f64,
    max_tries: u32,
    seed: u64,
) -> Result<UniversalTuple> {
    for problem in family {
        if problem.k != k {
            return Err(Error::ArityMismatch { expected: k, got: problem.k });
        }
    }
    let domain = lambda.annihilator()?.fundamental_domain()?;
    let cells = domain.cells();
    let sig = domain.sig().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let denom = num_bigint::BigInt::from(1u64 << DYADIC_BITS);
    let mut worst = 0.0f64;
    for tries in 1..=max_tries {
        let mut points = Vec::with_capacity(k);
        for _ in 0..k {
            let cell = &cells[rng.gen_range(0..cells.len())];
            let draw_coord = |rng: &mut ChaCha8Rng, a: &Rat, b: &Rat| -> Rat {
                let u = rng.gen_range(0..(1u64 << DYADIC_BITS));
                a + (b - a) * Rat::new(num_bigint::BigInt::from(u), denom.clone())
            };
            let real = cell
                .real
                .iter()
                .map(|(a, b)| draw_coord(&mut rng, a, b))
                .collect();
            let torus = cell
                .torus
                .iter()
                .map(|(a, b)| draw_coord(&mut rng, a, b))
                .collect();
            points.push(GroupElement::new(
                sig.clone(),
                real,
                cell.int.clone(),
                torus,
                cell.finite.clone(),
            )?);
        }
        let outcome = is_universal_for(&points, family, tol)?;
        if outcome.ok {
            return Ok(UniversalTuple {
                points,
                certificates: outcome.certificates,
                min_lower: outcome.min_lower,
                tries,
            });
        }
        worst = worst.max(outcome.min_lower);
    }
    Err(Error::TupleSearchExhausted { tries: max_tries, worst })
}

/// Converse direction: a Riesz basis of k exponentials over Ω forces Ω to
/// k-tile Λ; a non-uniform profile rules every k-tuple out at once.
#[derive(Debug, Clone)]
pub enum Verdict {
    /// the profile is consistent with a k-point Riesz basis
    Possible { k: u64 },
    /// no k-tuple can work; the profile is the obstruction
    Impossible { expected: u64, profile: MultiplicityProfile },
}

pub fn converse_check(omega: &Region, lambda: &Lattice, k: u64) -> Result<Verdict> {
    let profile = multiplicity_profile(omega, lambda)?;
    match profile.as_uniform() {
        Some(j) if j == k => Ok(Verdict::Possible { k }),
        _ => Ok(Verdict::Impossible { expected: k, profile }),
    }
}

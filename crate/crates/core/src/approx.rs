//! Near-critical sampling and interpolation sets: approximate a region by
//! unions of dyadic cubes, turn the cube union (an automatic k-tiling of
//! the dyadic lattice Λ_n) into a simultaneous Riesz basis of exponentials,
//! and read the resulting coset union and its density off the construction.
//!
//! Outer covers give sampling sets with density m(Ω_ε) ↓ m(Ω); inner packs
//! give interpolation sets with density m(Ω_ε) ↑ m(Ω). Both constructions
//! optionally run in a quotient X/K and lift back, which keeps the coset
//! union inside the annihilator of the kernel.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::group::{dyadic_cube, dyadic_lattice, GroupElement, Lattice};
use crate::lift::{
    embed_dual_lattice, embed_dual_point, kernel_dual_transversal, lift_region, project_region,
    KernelSpec,
};
use crate::rat::Rat;
use crate::region::Region;
use crate::riesz::{sample_universal_tuple, RieszCertificate, UniversalTuple, UniversalityProblem};
use crate::tiling::is_k_tiling;

/// Union of generation-n dyadic cubes approximating a region.
#[derive(Debug, Clone)]
pub struct CubeApproximation {
    /// generation n of the dyadic lattice Λ_n
    pub generation: u32,
    /// cube centers, points of Λ_n (in the quotient group when a kernel is
    /// in play)
    pub centers: Vec<GroupElement>,
    /// the approximating set in the ambient group
    pub region: Region,
    /// the cube union in the quotient group; equals `region` for a trivial
    /// kernel
    pub quotient_region: Region,
    /// measure gap: m(region) − m(target) for covers, m(target) − m(region)
    /// for packs; always ≤ the requested tolerance
    pub defect: Rat,
    pub warning: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Outer,
    Inner,
}

const MAX_GENERATION: u32 = 32;
const MAX_CANDIDATES: u64 = 1_000_000;

/// Smallest-generation union of dyadic cubes containing `target` with
/// excess measure ≤ ε.
pub fn outer_cube_cover(target: &Region, epsilon: &Rat) -> Result<CubeApproximation> {
    cube_approximation(target, epsilon, Mode::Outer, &KernelSpec::trivial(target.sig()))
}

/// Smallest-generation union of dyadic cubes inside `target` with deficit
/// measure ≤ ε. May legitimately be empty (with a warning) when the target
/// itself has measure ≤ ε.
pub fn inner_cube_pack(target: &Region, epsilon: &Rat) -> Result<CubeApproximation> {
    cube_approximation(target, epsilon, Mode::Inner, &KernelSpec::trivial(target.sig()))
}

/// Kernel-aware variants: cubes live in X/K and their preimages are
/// compared against the target, which must be invariant under K.
pub fn outer_cube_cover_with_kernel(
    target: &Region,
    epsilon: &Rat,
    kernel: &KernelSpec,
) -> Result<CubeApproximation> {
    cube_approximation(target, epsilon, Mode::Outer, kernel)
}

pub fn inner_cube_pack_with_kernel(
    target: &Region,
    epsilon: &Rat,
    kernel: &KernelSpec,
) -> Result<CubeApproximation> {
    cube_approximation(target, epsilon, Mode::Inner, kernel)
}

fn cube_approximation(
    target: &Region,
    epsilon: &Rat,
    mode: Mode,
    kernel: &KernelSpec,
) -> Result<CubeApproximation> {
    if epsilon <= &Rat::zero() {
        return Err(Error::DegenerateApproximation("tolerance must be positive".into()));
    }
    let ambient = target.sig().clone();
    kernel.validate(&ambient)?;
    let trivial = kernel.is_trivial();
    let qsig = kernel.quotient_signature(&ambient)?;
    let projected = if trivial {
        target.clone()
    } else {
        let proj = project_region(target, kernel)?;
        // the construction only converges for kernel-invariant targets
        if &lift_region(&proj, kernel, &ambient)? != target {
            return Err(Error::Unsupported(
                "kernel approximation",
                "the region is not invariant under the kernel".into(),
            ));
        }
        proj
    };
    if projected.is_empty() {
        return Ok(CubeApproximation {
            generation: 0,
            centers: vec![],
            region: Region::empty(ambient),
            quotient_region: Region::empty(qsig),
            defect: Rat::zero(),
            warning: Some("the target region is empty".into()),
        });
    }
    let extent = projected.real_extent().unwrap();
    let int_sets = projected.int_values();
    let int_ranges: Vec<(BigInt, BigInt)> = int_sets
        .iter()
        .map(|s| {
            (
                s.iter().next().unwrap().clone(),
                s.iter().last().unwrap().clone(),
            )
        })
        .collect();
    let target_measure = target.measure();
    for n in 0..=MAX_GENERATION {
        let lattice = dyadic_lattice(n, &qsig)?;
        check_candidate_budget(n, &qsig, &extent)?;
        let half = Rat::new(BigInt::from(1), BigInt::from(2u64).pow(n + 1));
        let real_ranges: Vec<(Rat, Rat)> = extent
            .iter()
            .map(|(lo, hi)| (lo - &half, hi + &half))
            .collect();
        let mut centers = Vec::new();
        let mut region = Region::empty(ambient.clone());
        let mut quotient_region = Region::empty(qsig.clone());
        for lam in lattice.points_in_window(&real_ranges, &int_ranges)? {
            let cube_q = dyadic_cube(n, &lam)?;
            let cube_ambient = if trivial {
                cube_q.clone()
            } else {
                lift_region(&cube_q, kernel, &ambient)?
            };
            let include = match mode {
                Mode::Outer => cube_ambient.intersects(target)?,
                Mode::Inner => cube_ambient.is_subset(target)?,
            };
            if include {
                centers.push(lam);
                region = region.union(&cube_ambient)?;
                quotient_region = quotient_region.union(&cube_q)?;
            }
        }
        let defect = match mode {
            Mode::Outer => region.measure() - &target_measure,
            Mode::Inner => &target_measure - region.measure(),
        };
        if defect <= *epsilon {
            let warning = if centers.is_empty() {
                Some("no cube fits; the approximation is empty".into())
            } else {
                None
            };
            centers.sort();
            return Ok(CubeApproximation {
                generation: n,
                centers,
                region,
                quotient_region,
                defect,
                warning,
            });
        }
    }
    Err(Error::DegenerateApproximation(
        "no dyadic generation reaches the requested tolerance".into(),
    ))
}

fn check_candidate_budget(
    n: u32,
    qsig: &crate::group::GroupSignature,
    extent: &[(Rat, Rat)],
) -> Result<()> {
    let mut budget: f64 = 1.0;
    for (lo, hi) in extent {
        let width = crate::rat::rat_to_f64(&(hi - lo));
        budget *= width * 2f64.powi(n as i32) + 2.0;
    }
    budget *= 2f64.powi((n as i32) * (qsig.torus as i32));
    budget *= qsig.finite_order() as f64;
    if budget > MAX_CANDIDATES as f64 {
        return Err(Error::DegenerateApproximation(
            "cube enumeration exceeds the search budget".into(),
        ));
    }
    Ok(())
}

/// Whether a coset union is meant to sample or to interpolate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosetRole {
    Sampling,
    Interpolation,
}

/// J = ⋃_j (a_j + H): finitely many shifted copies of a uniform lattice
/// H ⊂ G.
#[derive(Debug, Clone)]
pub struct CosetUnion {
    pub lattice: Lattice,
    pub shifts: Vec<GroupElement>,
    pub role: CosetRole,
}

/// Uniform (Beurling) density of a coset union, exact: k / covol(H). The
/// normalization makes D(ℤ^d × ℤ^m × {0} × {e}) = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityReport {
    pub value: Rat,
}

pub fn density(j: &CosetUnion) -> Result<DensityReport> {
    let mut reduced = std::collections::BTreeSet::new();
    for s in &j.shifts {
        if !reduced.insert(j.lattice.reduce(s)?) {
            return Err(Error::DuplicateShifts);
        }
    }
    let k = BigInt::from(j.shifts.len() as u64);
    Ok(DensityReport { value: Rat::from(k) / j.lattice.covolume() })
}

/// Everything produced by one sampling/interpolation synthesis run.
#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub approximation: CubeApproximation,
    pub tuple: UniversalTuple,
    /// Riesz certificate of the exponent system over the cube union (in
    /// the quotient group when a kernel is in play)
    pub certificate: RieszCertificate,
    pub coset_union: CosetUnion,
    pub density: DensityReport,
}

/// Knobs for the synthesis: measure tolerance ε, spectral tolerance for
/// the lower Riesz bound, the random-search budget, and an optional
/// quotient kernel.
#[derive(Debug, Clone)]
pub struct SynthesisParams {
    pub epsilon: Rat,
    pub tol: f64,
    pub max_tries: u32,
    pub seed: u64,
    pub kernel: Option<KernelSpec>,
}

impl SynthesisParams {
    pub fn new(epsilon: Rat) -> Self {
        SynthesisParams { epsilon, tol: 1e-9, max_tries: 1000, seed: 0, kernel: None }
    }
}

/// Sampling set of density m(Ω_ε) ≥ m(Ω) from an outer cube cover.
pub fn sampling_set(omega: &Region, params: &SynthesisParams) -> Result<SynthesisResult> {
    synthesize(omega, params, Mode::Outer)
}

/// Interpolation set of density m(Ω_ε) ≤ m(Ω) from an inner cube pack.
pub fn interpolation_set(omega: &Region, params: &SynthesisParams) -> Result<SynthesisResult> {
    synthesize(omega, params, Mode::Inner)
}

fn synthesize(omega: &Region, params: &SynthesisParams, mode: Mode) -> Result<SynthesisResult> {
    let ambient = omega.sig().clone();
    let kernel = params
        .kernel
        .clone()
        .unwrap_or_else(|| KernelSpec::trivial(&ambient));
    let approximation = cube_approximation(omega, &params.epsilon, mode, &kernel)?;
    let k = approximation.centers.len();
    if k == 0 {
        return Err(Error::DegenerateApproximation(
            "the approximation is empty; no exponent system exists".into(),
        ));
    }
    let qsig = kernel.quotient_signature(&ambient)?;
    let lattice_n = dyadic_lattice(approximation.generation, &qsig)?;
    // a union of k distinct dyadic cubes k-tiles Λ_n by construction
    debug_assert_eq!(
        is_k_tiling(&approximation.quotient_region, &lattice_n)?,
        Some(k as u64)
    );
    let problem = UniversalityProblem::new(&approximation.quotient_region, &lattice_n)?;
    let tuple = sample_universal_tuple(
        &lattice_n,
        k,
        std::slice::from_ref(&problem),
        params.tol,
        params.max_tries,
        params.seed,
    )?;
    let certificate = tuple.certificates[0].clone();
    let h_q = lattice_n.annihilator()?;
    let (lattice, shifts) = if kernel.is_trivial() {
        (h_q, tuple.points.clone())
    } else {
        let h = embed_dual_lattice(&h_q, &kernel, &ambient)?;
        let kappa = kernel_dual_transversal(&kernel, &ambient)?;
        let mut shifts = Vec::with_capacity(k * kappa.len());
        for p in &tuple.points {
            let embedded = embed_dual_point(p, &kernel, &ambient)?;
            for kap in &kappa {
                shifts.push(embedded.add(kap)?);
            }
        }
        (h, shifts)
    };
    let role = match mode {
        Mode::Outer => CosetRole::Sampling,
        Mode::Inner => CosetRole::Interpolation,
    };
    let coset_union = CosetUnion { lattice, shifts, role };
    let density = density(&coset_union)?;
    // exact density identity: D(J) = m(Ω_ε)
    debug_assert_eq!(density.value, approximation.region.measure());
    Ok(SynthesisResult { approximation, tuple, certificate, coset_union, density })
}

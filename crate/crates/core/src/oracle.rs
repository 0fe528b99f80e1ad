//! Independent brute-force verification. Finite cyclic groups ℤ_N carry
//! the entire theory verbatim, so exhaustive Gram eigen-solves on random
//! ℤ_N instances cross-check the fiber machinery; Riemann-sum Gram
//! estimates give advisory trend checks for continuous instances; and the
//! decay profiler exhibits the 2-tiling whose exponent systems are never
//! uniformly bounded below.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approx::CosetUnion;
use crate::error::{Error, Result};
use crate::group::{pairing, GroupElement, GroupSignature, Lattice};
use crate::rat::{rat, rat_fract, rat_to_f64, Rat, IntMat, RatMat};
use crate::region::{Cell, Region};
use crate::spectrum::squared_singular_range;

/// A complete instance of the theory over Ĝ = ℤ_N: a subset Ω, the
/// subgroup lattice Λ = qℤ_N, and a tuple of shifts in the dual ℤ_N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteInstance {
    pub modulus: u64,
    pub omega: Vec<u64>,
    /// Λ = lattice_gen · ℤ_N
    pub lattice_gen: u64,
    pub shifts: Vec<u64>,
}

impl FiniteInstance {
    pub fn validate(&self) -> Result<()> {
        let n = self.modulus;
        if n == 0 || self.lattice_gen == 0 || n % self.lattice_gen != 0 {
            return Err(Error::InvalidLattice(
                "the lattice generator must divide the modulus".into(),
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &w in &self.omega {
            if w >= n || !seen.insert(w) {
                return Err(Error::InvalidRegion(
                    "omega must be a subset of {0..N-1} without repeats".into(),
                ));
            }
        }
        if self.shifts.iter().any(|&a| a >= n) {
            return Err(Error::InvalidElement("shifts must lie in {0..N-1}".into()));
        }
        Ok(())
    }

    /// The signature of Ĝ = ℤ_N under the dual-side normalization.
    pub fn signature(&self) -> GroupSignature {
        GroupSignature {
            real: 0,
            int: 0,
            torus: 0,
            finite: vec![self.modulus],
            normalized_finite: true,
        }
    }

    pub fn region(&self) -> Result<Region> {
        let sig = self.signature();
        let cells = self
            .omega
            .iter()
            .map(|&w| Cell::new(&sig, vec![], vec![], vec![], vec![w]))
            .collect::<Result<_>>()?;
        Region::from_cells(sig, cells)
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(
            self.signature(),
            RatMat::identity(0),
            IntMat::identity(0),
            vec![],
            vec![vec![self.lattice_gen]],
        )
    }

    pub fn shift_points(&self) -> Result<Vec<GroupElement>> {
        let dual = self.signature().dual();
        self.shifts
            .iter()
            .map(|&a| GroupElement::new(dual.clone(), vec![], vec![], vec![], vec![a]))
            .collect()
    }
}

fn phase(num: u64, den: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (num % den) as f64 / den as f64)
}

/// Extreme squared singular values of a possibly wide synthesis matrix: a
/// wide matrix never has full column rank, so the lower bound is 0.
fn synthesis_range(s: DMatrix<Complex64>) -> (f64, f64) {
    if s.nrows() >= s.ncols() {
        squared_singular_range(&s)
    } else {
        let (_, hi) = squared_singular_range(&s.adjoint());
        (0.0, hi)
    }
}

/// Extreme eigenvalues of the Gram matrix of {e_{a_j+h} χ_Ω : h ∈ Λ^⊥, j},
/// computed by direct summation over ℤ_N and normalized so a k-tiling with
/// an orthogonal tuple yields A = B = k (i.e. divided by covol(Λ) = q/N).
/// This is the trust anchor the fiber machinery is checked against.
pub fn gram_bounds(instance: &FiniteInstance) -> Result<(f64, f64)> {
    instance.validate()?;
    let n = instance.modulus;
    let q = instance.lattice_gen;
    // H = Λ^⊥ = (N/q)ℤ_N, of size q
    let h_gen = n / q;
    let h: Vec<u64> = (0..q).map(|t| t * h_gen).collect();
    let rows = instance.omega.len();
    let cols = instance.shifts.len() * h.len();
    let scale = 1.0 / (n as f64).sqrt();
    let mut entries = Vec::with_capacity(rows * cols);
    for &w in &instance.omega {
        for &a in &instance.shifts {
            for &hh in &h {
                entries.push(phase((a + hh) * w, n) * scale);
            }
        }
    }
    let s = DMatrix::from_row_slice(rows, cols, &entries);
    let (lo, hi) = synthesis_range(s);
    let covol = q as f64 / n as f64;
    Ok((lo / covol, hi / covol))
}

/// Raw Gram-spectrum bounds of a character system over a purely discrete
/// region: extreme eigenvalues of the Gram of {(γ_u, ·) χ_R} under the
/// region's own Haar mass, with no lattice normalization. Used to compare
/// a system against its lift, which preserves exactly this quantity.
pub fn character_gram_bounds(region: &Region, points: &[GroupElement]) -> Result<(f64, f64)> {
    if points.is_empty() {
        return Err(Error::ArityMismatch { expected: 1, got: 0 });
    }
    let xs = region.discrete_points()?;
    let mass = rat_to_f64(&region.sig().finite_point_mass()).sqrt();
    let mut entries = Vec::with_capacity(xs.len() * points.len());
    for x in &xs {
        for p in points {
            entries.push(pairing(x, p)? * mass);
        }
    }
    let s = DMatrix::from_row_slice(xs.len(), points.len(), &entries);
    Ok(synthesis_range(s))
}

/// Riemann-sum estimate of the Riesz bounds of the exponentials
/// {e^{2πi(a+h)x} χ_Ω : a ∈ shifts, h ∈ H, |h| ≤ window·covol(H)} for a
/// 1-d real region. Advisory only: the truncation can only lower A and
/// raise B, and the quadrature error is O(1/grid).
pub fn truncated_gram_estimate(
    omega: &Region,
    j: &CosetUnion,
    grid: u32,
    window: u32,
) -> Result<(f64, f64)> {
    let sig = omega.sig();
    if sig.real != 1 || sig.int != 0 || sig.torus != 0 || !sig.finite.is_empty() {
        return Err(Error::Unsupported(
            "truncated Gram estimate",
            "only 1-d real regions are supported".into(),
        ));
    }
    if !j.lattice.sig.is_dual_of(sig) {
        return Err(Error::SignatureMismatch(
            "the coset union must live in the dual group".into(),
        ));
    }
    let alpha = rat_to_f64(&j.lattice.real_gens.rows[0][0]);
    let mut freqs = Vec::new();
    for s in &j.shifts {
        let base = rat_to_f64(&s.real[0]);
        for t in -(window as i64)..=(window as i64) {
            freqs.push(base + alpha * t as f64);
        }
    }
    let mut samples = Vec::new();
    for cell in omega.cells() {
        let (a, b) = &cell.real[0];
        let (a, b) = (rat_to_f64(a), rat_to_f64(b));
        let count = (((b - a) * grid as f64).ceil() as usize).max(1);
        let dx = (b - a) / count as f64;
        for i in 0..count {
            samples.push((a + (i as f64 + 0.5) * dx, dx));
        }
    }
    if samples.len() < freqs.len() {
        return Err(Error::WindowTooSmall { rows: samples.len(), cols: freqs.len() });
    }
    let mut entries = Vec::with_capacity(samples.len() * freqs.len());
    for &(x, dx) in &samples {
        let w = dx.sqrt();
        for &f in &freqs {
            entries.push(Complex64::from_polar(w, 2.0 * std::f64::consts::PI * f * x));
        }
    }
    let s = DMatrix::from_row_slice(samples.len(), freqs.len(), &entries);
    Ok(synthesis_range(s))
}

/// Exponent gap for the decay profiler: exact rational or floating point.
#[derive(Debug, Clone)]
pub enum Gap {
    Rational(Rat),
    Irrational(f64),
}

/// One row of the decay profile: the fiber with offsets (0, n) has
/// σ_min² = 2 − |1 + e^{2πi·gap·n}|.
#[derive(Debug, Clone)]
pub struct DecayRow {
    pub n: u64,
    pub offsets: (u64, u64),
    pub sigma_min_sq: f64,
}

#[derive(Debug, Clone)]
pub struct DecayProfile {
    pub rows: Vec<DecayRow>,
}

impl DecayProfile {
    /// Running minimum of σ_min² up to each n; monotone by construction.
    pub fn running_min(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows.len());
        let mut m = f64::INFINITY;
        for r in &self.rows {
            m = m.min(r.sigma_min_sq);
            out.push(m);
        }
        out
    }
}

/// σ_min² of [[1,1],[1,e^{2πi(a₂−a₁)n}]] for n = 1..N_max. A rational gap
/// p/q hits an exact 0 at every multiple of q; an irrational gap never
/// does, but the running minimum still decays to 0.
pub fn counterexample_profile(n_max: u64, a1: &Gap, a2: &Gap) -> Result<DecayProfile> {
    // only the gap a₂ − a₁ matters
    enum GapVal {
        Rational(Rat),
        Irrational(f64),
    }
    let gap = match (a1, a2) {
        (Gap::Rational(x), Gap::Rational(y)) => GapVal::Rational(y - x),
        (Gap::Irrational(x), Gap::Irrational(y)) => GapVal::Irrational(y - x),
        (Gap::Rational(x), Gap::Irrational(y)) => GapVal::Irrational(y - rat_to_f64(x)),
        (Gap::Irrational(x), Gap::Rational(y)) => GapVal::Irrational(rat_to_f64(y) - x),
    };
    match &gap {
        GapVal::Rational(g) if g.is_integer() => {
            return Err(Error::InvalidElement("the two exponents coincide modulo 1".into()));
        }
        GapVal::Irrational(g) if g.fract() == 0.0 => {
            return Err(Error::InvalidElement("the two exponents coincide modulo 1".into()));
        }
        _ => {}
    }
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let sigma_min_sq = match &gap {
            GapVal::Rational(g) => {
                let gn = g * Rat::from(BigInt::from(n));
                if gn.is_integer() {
                    0.0
                } else {
                    let theta = rat_to_f64(&rat_fract(&gn));
                    2.0 - 2.0 * (std::f64::consts::PI * theta).cos().abs()
                }
            }
            GapVal::Irrational(g) => {
                let theta = (g * n as f64).rem_euclid(1.0);
                2.0 - 2.0 * (std::f64::consts::PI * theta).cos().abs()
            }
        };
        rows.push(DecayRow { n, offsets: (0, n), sigma_min_sq });
    }
    Ok(DecayProfile { rows })
}

/// Truncation at level N of the 2-tiling Ω₀ of ℤ:
/// [0,1) ∪ ⋃_{n=2}^{N} [n − 2^{−(n−2)}, n − 2^{−(n−1)}).
pub fn omega0_truncated(n_max: u32) -> Result<Region> {
    let mut region = Region::interval(rat(0, 1), rat(1, 1))?;
    for n in 2..=n_max {
        let n_r = Rat::from(BigInt::from(n));
        let lo = &n_r - Rat::new(BigInt::from(1), BigInt::from(2u64).pow(n - 2));
        let hi = &n_r - Rat::new(BigInt::from(1), BigInt::from(2u64).pow(n - 1));
        region = region.union(&Region::interval(lo, hi)?)?;
    }
    Ok(region)
}

/// Draw a random k-tiling instance over ℤ_N (N ≤ max_modulus, k ≤ max_k):
/// Ω takes exactly k elements from each coset of Λ = qℤ_N, which k-tiles
/// by construction.
pub fn random_instance(rng: &mut ChaCha8Rng, max_modulus: u64, max_k: u64) -> FiniteInstance {
    loop {
        let n = rng.gen_range(4..=max_modulus);
        let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
        let q = divisors[rng.gen_range(0..divisors.len())];
        let coset_size = n / q;
        let k_cap = max_k.min(coset_size);
        if k_cap == 0 {
            continue;
        }
        let k = rng.gen_range(1..=k_cap);
        let mut omega = Vec::new();
        for c in 0..q {
            // k distinct multiples of q inside the coset c + qℤ_N
            let mut picks = std::collections::BTreeSet::new();
            while (picks.len() as u64) < k {
                picks.insert(rng.gen_range(0..coset_size));
            }
            for t in picks {
                omega.push(c + q * t);
            }
        }
        omega.sort_unstable();
        let shifts = (0..k).map(|_| rng.gen_range(0..n)).collect();
        return FiniteInstance { modulus: n, omega, lattice_gen: q, shifts };
    }
}

/// Largest componentwise deviation between the exhaustive Gram oracle and
/// the fiber-based bounds over a seeded batch of random instances.
pub fn oracle_batch(count: u32, seed: u64, max_modulus: u64, max_k: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let inst = random_instance(&mut rng, max_modulus, max_k);
        let (a_oracle, b_oracle) = gram_bounds(&inst)?;
        let cert = crate::riesz::riesz_bounds(
            &inst.region()?,
            &inst.lattice()?,
            &inst.shift_points()?,
        )?;
        worst = worst.max((a_oracle - cert.lower).abs());
        worst = worst.max((b_oracle - cert.upper).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;
    use crate::tiling::{decompose_tiles, is_k_tiling, multiplicity_profile};

    #[test]
    fn gram_matches_fiber_on_closed_forms() {
        // N=8, Ω={0..7}, Λ=4ℤ₈: the offsets are {0,4}, so a=(0,1) makes the
        // fiber rows orthogonal (e^{2πi·1·4/8} = −1), the analog of (0,1/2)
        let inst = FiniteInstance {
            modulus: 8,
            omega: (0..8).collect(),
            lattice_gen: 4,
            shifts: vec![0, 1],
        };
        let (a, b) = gram_bounds(&inst).unwrap();
        assert!((a - 2.0).abs() < 1e-12);
        assert!((b - 2.0).abs() < 1e-12);
        let cert = crate::riesz::riesz_bounds(
            &inst.region().unwrap(),
            &inst.lattice().unwrap(),
            &inst.shift_points().unwrap(),
        )
        .unwrap();
        assert!((cert.lower - a).abs() < 1e-9);
        assert!((cert.upper - b).abs() < 1e-9);
    }

    #[test]
    fn one_point_instance_is_orthonormal() {
        // k=1: Ω a fundamental domain of Λ, any single shift → A=B=1
        let inst = FiniteInstance {
            modulus: 12,
            omega: (0..4).collect(),
            lattice_gen: 4,
            shifts: vec![5],
        };
        let (a, b) = gram_bounds(&inst).unwrap();
        assert!((a - 1.0).abs() < 1e-12);
        assert!((b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_oracle_batch_agrees() {
        let worst = oracle_batch(25, 42, 32, 3).unwrap();
        assert!(worst <= 1e-9, "worst deviation {worst}");
    }

    #[test]
    fn decompose_hits_every_coset_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let inst = random_instance(&mut rng, 24, 3);
            let omega = inst.region().unwrap();
            let lambda = inst.lattice().unwrap();
            let k = is_k_tiling(&omega, &lambda).unwrap().unwrap();
            let tiles = decompose_tiles(&omega, &lambda).unwrap();
            assert_eq!(tiles.len() as u64, k);
            let q = inst.lattice_gen;
            for tile in &tiles {
                let pts = tile.discrete_points().unwrap();
                // exactly one point in each of the q cosets of Λ
                let residues: std::collections::BTreeSet<u64> =
                    pts.iter().map(|p| p.finite[0] % q).collect();
                assert_eq!(pts.len() as u64, q);
                assert_eq!(residues.len() as u64, q);
            }
        }
    }

    #[test]
    fn omega0_profile() {
        // truncation at N: profile {2 ↦ 1−2^{1−N}, 1 ↦ 2^{1−N}}
        let lambda = Lattice::scaled_integers(rat_int(1)).unwrap();
        for n_max in [5u32, 8] {
            let omega = omega0_truncated(n_max).unwrap();
            let profile = multiplicity_profile(&omega, &lambda).unwrap();
            let thin = Rat::new(BigInt::from(1), BigInt::from(2u64).pow(n_max - 1));
            assert_eq!(profile.entries[&1], thin);
            assert_eq!(profile.entries[&2], rat_int(1) - thin);
        }
    }

    #[test]
    fn rational_gap_hits_zero() {
        let profile =
            counterexample_profile(6, &Gap::Rational(rat(0, 1)), &Gap::Rational(rat(1, 2)))
                .unwrap();
        assert_eq!(profile.rows[1].sigma_min_sq, 0.0); // n = 2
        assert!(profile.rows[0].sigma_min_sq > 0.5); // n = 1: σ² = 2
        let third =
            counterexample_profile(6, &Gap::Rational(rat(0, 1)), &Gap::Rational(rat(1, 3)))
                .unwrap();
        assert_eq!(third.rows[2].sigma_min_sq, 0.0); // n = 3
        assert!(third.rows[0].sigma_min_sq > 0.0);
        assert!(third.rows[1].sigma_min_sq > 0.0);
    }

    #[test]
    fn equal_exponents_rejected() {
        assert!(counterexample_profile(
            5,
            &Gap::Rational(rat(1, 4)),
            &Gap::Rational(rat(5, 4))
        )
        .is_err());
        assert!(counterexample_profile(5, &Gap::Irrational(0.5), &Gap::Irrational(0.5)).is_err());
    }

    #[test]
    fn truncated_estimate_converges() {
        // Ω = [0,1), J = ℤ → orthonormal, estimates near 1
        let omega = Region::interval(rat_int(0), rat_int(1)).unwrap();
        let j = CosetUnion {
            lattice: Lattice::scaled_integers(rat_int(1)).unwrap(),
            shifts: vec![GroupElement::real_scalar(rat_int(0))],
            role: crate::approx::CosetRole::Sampling,
        };
        let (a, b) = truncated_gram_estimate(&omega, &j, 1 << 12, 64).unwrap();
        assert!(a > 0.9 && a <= 1.01, "A_est = {a}");
        assert!(b < 1.1 && b >= 0.99, "B_est = {b}");

        // window too small
        assert!(matches!(
            truncated_gram_estimate(&omega, &j, 4, 64),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn truncated_estimate_two_shifts() {
        // Ω = [0,2), J = ℤ ∪ (1/2 + ℤ) → tight with A = B = 2
        let omega = Region::interval(rat_int(0), rat_int(2)).unwrap();
        let j = CosetUnion {
            lattice: Lattice::scaled_integers(rat_int(1)).unwrap(),
            shifts: vec![
                GroupElement::real_scalar(rat_int(0)),
                GroupElement::real_scalar(rat(1, 2)),
            ],
            role: crate::approx::CosetRole::Sampling,
        };
        let (a, b) = truncated_gram_estimate(&omega, &j, 1 << 11, 32).unwrap();
        assert!((a - 2.0).abs() < 0.1, "A_est = {a}");
        assert!((b - 2.0).abs() < 0.1, "B_est = {b}");
    }
}

//! Elemental LCA groups ℝ^d × ℤ^m × 𝕋^ℓ × F, their duals, character
//! pairings, uniform lattices with annihilators and fundamental domains,
//! and the dyadic lattice/cube family used for approximation.
//!
//! All coordinates are exact rationals. The only transcendental step in the
//! whole crate is the final `exp(2πi·phase)` inside [`pairing`].

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::{rat, rat_floor, rat_fract, rat_to_f64, IntMat, Rat, RatMat};
use crate::region::{Cell, Region};

/// Signature of an elemental group ℝ^d × ℤ^m × 𝕋^ℓ × F with
/// F = ℤ_{q_1} × … × ℤ_{q_r}.
///
/// Haar normalization is fixed: Lebesgue on ℝ, counting on ℤ, total mass 1
/// on 𝕋. A finite factor of order q carries counting measure on one side of
/// the duality and mass 1/q per point on the other; `normalized_finite`
/// records which side this instance is on, and taking duals flips it. With
/// these choices the inversion formula holds on every factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupSignature {
    /// number of real factors (d)
    pub real: usize,
    /// number of integer factors (m)
    pub int: usize,
    /// number of torus factors (ℓ)
    pub torus: usize,
    /// cyclic orders of the finite part
    pub finite: Vec<u64>,
    /// finite factors carry mass 1/q per point instead of counting measure
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub normalized_finite: bool,
}

impl GroupSignature {
    pub fn new(real: usize, int: usize, torus: usize, finite: Vec<u64>) -> Result<Self> {
        if finite.iter().any(|&q| q == 0) {
            return Err(Error::SignatureMismatch("cyclic order must be >= 1".into()));
        }
        Ok(GroupSignature { real, int, torus, finite, normalized_finite: false })
    }

    pub fn with_normalized_finite(mut self, flag: bool) -> Self {
        self.normalized_finite = flag;
        self
    }

    /// Dual signature: ℝ̂=ℝ, ℤ̂=𝕋, 𝕋̂=ℤ, F̂≅F. Involutive.
    pub fn dual(&self) -> GroupSignature {
        GroupSignature {
            real: self.real,
            int: self.torus,
            torus: self.int,
            finite: self.finite.clone(),
            normalized_finite: !self.normalized_finite,
        }
    }

    /// Structural duality check (the measure-side flag is ignored).
    pub fn is_dual_of(&self, other: &GroupSignature) -> bool {
        self.real == other.real
            && self.int == other.torus
            && self.torus == other.int
            && self.finite == other.finite
    }

    pub fn same_structure(&self, other: &GroupSignature) -> bool {
        self.real == other.real
            && self.int == other.int
            && self.torus == other.torus
            && self.finite == other.finite
    }

    /// Mass of a single point of the finite part.
    pub fn finite_point_mass(&self) -> Rat {
        if self.normalized_finite {
            let order: BigInt = self.finite.iter().map(|&q| BigInt::from(q)).product();
            Rat::new(BigInt::one(), order)
        } else {
            Rat::one()
        }
    }

    pub fn finite_order(&self) -> u64 {
        self.finite.iter().product()
    }
}

/// Spec-level alias for [`GroupSignature::dual`].
pub fn dual_signature(sig: &GroupSignature) -> GroupSignature {
    sig.dual()
}

/// A point of an elemental group, stored in canonical reduced form:
/// torus coordinates in [0,1), finite coordinates reduced mod their order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupElement {
    pub sig: GroupSignature,
    pub real: Vec<Rat>,
    pub int: Vec<BigInt>,
    pub torus: Vec<Rat>,
    pub finite: Vec<u64>,
}

impl GroupElement {
    pub fn new(
        sig: GroupSignature,
        real: Vec<Rat>,
        int: Vec<BigInt>,
        torus: Vec<Rat>,
        finite: Vec<u64>,
    ) -> Result<Self> {
        if real.len() != sig.real
            || int.len() != sig.int
            || torus.len() != sig.torus
            || finite.len() != sig.finite.len()
        {
            return Err(Error::InvalidElement("coordinate counts do not match the signature".into()));
        }
        let torus = torus.into_iter().map(|t| rat_fract(&t)).collect();
        let finite = finite
            .iter()
            .zip(&sig.finite)
            .map(|(&a, &q)| a % q)
            .collect();
        Ok(GroupElement { sig, real, int, torus, finite })
    }

    pub fn zero(sig: &GroupSignature) -> Self {
        GroupElement {
            sig: sig.clone(),
            real: vec![Rat::zero(); sig.real],
            int: vec![BigInt::zero(); sig.int],
            torus: vec![Rat::zero(); sig.torus],
            finite: vec![0; sig.finite.len()],
        }
    }

    /// 1-d real group point; convenience for tests and examples.
    pub fn real_scalar(x: Rat) -> Self {
        GroupElement {
            sig: GroupSignature { real: 1, int: 0, torus: 0, finite: vec![], normalized_finite: false },
            real: vec![x],
            int: vec![],
            torus: vec![],
            finite: vec![],
        }
    }

    pub fn add(&self, other: &GroupElement) -> Result<GroupElement> {
        if !self.sig.same_structure(&other.sig) {
            return Err(Error::SignatureMismatch("cannot add points of different groups".into()));
        }
        GroupElement::new(
            self.sig.clone(),
            self.real.iter().zip(&other.real).map(|(a, b)| a + b).collect(),
            self.int.iter().zip(&other.int).map(|(a, b)| a + b).collect(),
            self.torus.iter().zip(&other.torus).map(|(a, b)| a + b).collect(),
            self.finite
                .iter()
                .zip(&other.finite)
                .zip(&self.sig.finite)
                .map(|((&a, &b), &q)| (a + b) % q)
                .collect(),
        )
    }

    pub fn neg(&self) -> GroupElement {
        GroupElement {
            sig: self.sig.clone(),
            real: self.real.iter().map(|a| -a).collect(),
            int: self.int.iter().map(|a| -a).collect(),
            torus: self.torus.iter().map(|a| rat_fract(&-a)).collect(),
            finite: self
                .finite
                .iter()
                .zip(&self.sig.finite)
                .map(|(&a, &q)| (q - a % q) % q)
                .collect(),
        }
    }

    pub fn sub(&self, other: &GroupElement) -> Result<GroupElement> {
        self.add(&other.neg())
    }
}

/// Exact phase of the character pairing: `(x, γ) = e^{2πi·phase}` with the
/// phase reduced into [0,1). `x` and `gamma` must live in mutually dual
/// groups.
pub fn pairing_phase(x: &GroupElement, gamma: &GroupElement) -> Result<Rat> {
    if !x.sig.is_dual_of(&gamma.sig) {
        return Err(Error::SignatureMismatch("pairing needs mutually dual signatures".into()));
    }
    let mut phase = Rat::zero();
    for (a, b) in x.real.iter().zip(&gamma.real) {
        phase += a * b;
    }
    // ℤ factors of x pair with 𝕋 factors of gamma and vice versa
    for (n, t) in x.int.iter().zip(&gamma.torus) {
        phase += Rat::from(n.clone()) * t;
    }
    for (t, n) in x.torus.iter().zip(&gamma.int) {
        phase += t * Rat::from(n.clone());
    }
    for ((&a, &b), &q) in x.finite.iter().zip(&gamma.finite).zip(&x.sig.finite) {
        phase += Rat::new(BigInt::from(a) * BigInt::from(b), BigInt::from(q));
    }
    Ok(rat_fract(&phase))
}

/// Character pairing as a unit-modulus complex number.
pub fn pairing(x: &GroupElement, gamma: &GroupElement) -> Result<Complex64> {
    let phase = pairing_phase(x, gamma)?;
    Ok(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * rat_to_f64(&phase)))
}

/// A uniform lattice presented factor by factor: a full-rank rational
/// lattice on the real part, a full-rank sublattice of ℤ^m, a finite
/// subgroup of 𝕋^ℓ, and a subgroup of F.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    pub sig: GroupSignature,
    /// columns generate the real part (d×d, invertible)
    pub real_gens: RatMat,
    /// columns generate the integer part (m×m, full rank)
    pub int_index: IntMat,
    /// generators of the finite torus subgroup, points of [0,1)^ℓ
    pub torus_gens: Vec<Vec<Rat>>,
    /// generators of the finite-part subgroup
    pub finite_gens: Vec<Vec<u64>>,
}

const ENUM_CAP: u64 = 10_000_000;

impl Lattice {
    pub fn new(
        sig: GroupSignature,
        real_gens: RatMat,
        int_index: IntMat,
        torus_gens: Vec<Vec<Rat>>,
        finite_gens: Vec<Vec<u64>>,
    ) -> Result<Self> {
        if real_gens.n != sig.real || int_index.n != sig.int {
            return Err(Error::InvalidLattice("generator matrix dimensions do not match the signature".into()));
        }
        if sig.real > 0 && real_gens.det().is_zero() {
            return Err(Error::InvalidLattice("real generators are singular; the lattice is not co-compact".into()));
        }
        if sig.int > 0 && int_index.det().is_zero() {
            return Err(Error::InvalidLattice("integer part is not full rank; the lattice is not co-compact".into()));
        }
        for g in &torus_gens {
            if g.len() != sig.torus {
                return Err(Error::InvalidLattice("torus generator length mismatch".into()));
            }
        }
        let torus_gens = torus_gens
            .into_iter()
            .map(|g| g.into_iter().map(|t| rat_fract(&t)).collect())
            .collect();
        for g in &finite_gens {
            if g.len() != sig.finite.len() {
                return Err(Error::InvalidLattice("finite generator length mismatch".into()));
            }
        }
        let finite_gens = finite_gens
            .into_iter()
            .map(|g: Vec<u64>| g.iter().zip(&sig.finite).map(|(&a, &q)| a % q).collect())
            .collect();
        Ok(Lattice { sig, real_gens, int_index, torus_gens, finite_gens })
    }

    /// The standard lattice ℤ^d × ℤ^m × {0} × {0}.
    pub fn standard(sig: &GroupSignature) -> Result<Self> {
        Lattice::new(
            sig.clone(),
            RatMat::identity(sig.real),
            IntMat::identity(sig.int),
            vec![],
            vec![],
        )
    }

    /// αℤ inside a 1-d real group.
    pub fn scaled_integers(alpha: Rat) -> Result<Self> {
        let sig = GroupSignature::new(1, 0, 0, vec![])?;
        Lattice::new(sig, RatMat::diagonal(&[alpha]), IntMat::identity(0), vec![], vec![])
    }

    /// All elements of the finite torus subgroup, by closure.
    pub fn torus_subgroup(&self) -> Vec<Vec<Rat>> {
        subgroup_closure(
            vec![Rat::zero(); self.sig.torus],
            &self.torus_gens,
            |a, b| a.iter().zip(b).map(|(x, y)| rat_fract(&(x + y))).collect(),
        )
    }

    /// All elements of the finite-part subgroup, by closure.
    pub fn finite_subgroup(&self) -> Vec<Vec<u64>> {
        subgroup_closure(
            vec![0u64; self.sig.finite.len()],
            &self.finite_gens,
            |a, b| {
                a.iter()
                    .zip(b)
                    .zip(&self.sig.finite)
                    .map(|((x, y), &q)| (x + y) % q)
                    .collect()
            },
        )
    }

    /// Covolume: the Haar measure of a fundamental domain, under the fixed
    /// normalization of the signature. Always a positive rational.
    pub fn covolume(&self) -> Rat {
        let real = self.real_gens.det().abs();
        let int = Rat::from(self.int_index.det().abs());
        let torus_order = self.torus_subgroup().len();
        let finite_sub = self.finite_subgroup().len();
        let finite_reps = Rat::new(
            BigInt::from(self.sig.finite_order()),
            BigInt::from(finite_sub as u64),
        );
        real * int * rat(1, torus_order as i64) * finite_reps * self.sig.finite_point_mass()
    }

    /// The annihilator Λ = {γ ∈ Ĝ : (h,γ)=1 ∀h∈H}, itself a uniform
    /// lattice of the dual group. Involutive, and covol(H)·covol(H^⊥) = 1.
    pub fn annihilator(&self) -> Result<Lattice> {
        let dual_sig = self.sig.dual();
        // real: inverse transpose
        let real_gens = if self.sig.real > 0 {
            self.real_gens.inverse()?.transpose()
        } else {
            RatMat::identity(0)
        };
        // integer part Mℤ^m annihilates to the subgroup of 𝕋^m generated by
        // the columns of M^{-T}
        let mut torus_gens = Vec::new();
        if self.sig.int > 0 {
            let minv_t = self.int_index.to_rat().inverse()?.transpose();
            for c in 0..self.sig.int {
                let col: Vec<Rat> = (0..self.sig.int)
                    .map(|r| rat_fract(&minv_t.rows[r][c]))
                    .collect();
                torus_gens.push(col);
            }
        }
        // torus subgroup T ⊂ 𝕋^ℓ annihilates to {z ∈ ℤ^ℓ : z·t ∈ ℤ ∀t∈T}
        let int_index = self.torus_annihilator_basis()?;
        // finite subgroup: direct check over all of F̂
        let finite_gens = self.finite_annihilator_elements()?;
        Lattice::new(dual_sig, real_gens, int_index, torus_gens, finite_gens)
    }

    fn torus_annihilator_basis(&self) -> Result<IntMat> {
        let l = self.sig.torus;
        if l == 0 {
            return Ok(IntMat::identity(0));
        }
        // common denominator of all generator coordinates
        let mut q = BigInt::one();
        for g in &self.torus_gens {
            for t in g {
                q = num_integer::Integer::lcm(&q, t.denom());
            }
        }
        let qi = q
            .to_i64()
            .ok_or_else(|| Error::Unsupported("torus annihilator", "denominator too large".into()))?;
        let count = (qi as u64).checked_pow(l as u32).filter(|&c| c < ENUM_CAP).ok_or_else(|| {
            Error::Unsupported("torus annihilator", "search space too large".into())
        })?;
        let _ = count;
        // solutions of z·g ∈ ℤ for all generators, with z taken mod q
        let mut gens: Vec<Vec<BigInt>> = Vec::new();
        let mut idx = vec![0i64; l];
        'outer: loop {
            let z: Vec<Rat> = idx.iter().map(|&v| Rat::from(BigInt::from(v))).collect();
            let ok = self.torus_gens.iter().all(|g| {
                let dot: Rat = g.iter().zip(&z).map(|(a, b)| a * b).sum();
                dot.is_integer()
            });
            if ok && idx.iter().any(|&v| v != 0) {
                gens.push(idx.iter().map(|&v| BigInt::from(v)).collect());
            }
            for j in 0..l {
                idx[j] += 1;
                if idx[j] < qi {
                    continue 'outer;
                }
                idx[j] = 0;
            }
            break;
        }
        for j in 0..l {
            let mut e = vec![BigInt::zero(); l];
            e[j] = q.clone();
            gens.push(e);
        }
        crate::rat::hnf_basis(l, &gens)
    }

    fn finite_annihilator_elements(&self) -> Result<Vec<Vec<u64>>> {
        let orders = &self.sig.finite;
        if orders.is_empty() {
            return Ok(vec![]);
        }
        let total: u64 = orders.iter().product();
        if total >= ENUM_CAP {
            return Err(Error::Unsupported("finite annihilator", "finite part too large".into()));
        }
        let gens = if self.finite_gens.is_empty() {
            vec![vec![0u64; orders.len()]]
        } else {
            self.finite_gens.clone()
        };
        let mut out = Vec::new();
        for flat in 0..total {
            let b = unflatten(flat, orders);
            let ok = gens.iter().all(|a| {
                let phase: Rat = a
                    .iter()
                    .zip(&b)
                    .zip(orders)
                    .map(|((&x, &y), &q)| Rat::new(BigInt::from(x) * BigInt::from(y), BigInt::from(q)))
                    .sum();
                phase.is_integer()
            });
            if ok {
                out.push(b);
            }
        }
        Ok(out)
    }

    /// Canonical fundamental domain: the half-open box of the real
    /// generators × integer coset representatives × per-factor torus arcs ×
    /// finite coset representatives. Requires axis-aligned real generators
    /// and a torus subgroup that splits as a product of per-factor cyclic
    /// groups.
    pub fn fundamental_domain(&self) -> Result<Region> {
        if self.sig.real > 0 && !self.real_gens.is_diagonal() {
            return Err(Error::Unsupported(
                "fundamental domain",
                "real generators must be axis-aligned (diagonal matrix)".into(),
            ));
        }
        let real_box: Vec<(Rat, Rat)> = (0..self.sig.real)
            .map(|i| {
                let a = self.real_gens.rows[i][i].abs();
                (Rat::zero(), a)
            })
            .collect();
        let torus_orders = self.torus_factor_orders()?;
        let torus_box: Vec<(Rat, Rat)> = torus_orders
            .iter()
            .map(|&t| (Rat::zero(), rat(1, t as i64)))
            .collect();
        let int_reps = self.int_coset_reps()?;
        let finite_reps = self.finite_coset_reps()?;
        let mut cells = Vec::new();
        for ir in &int_reps {
            for fr in &finite_reps {
                cells.push(Cell::new(
                    &self.sig,
                    real_box.clone(),
                    ir.clone(),
                    torus_box.clone(),
                    fr.clone(),
                )?);
            }
        }
        Region::from_cells(self.sig.clone(), cells)
    }

    /// Per-factor cyclic orders of the torus subgroup; errors if the
    /// subgroup is not a product of per-factor cyclic groups.
    pub fn torus_factor_orders(&self) -> Result<Vec<u64>> {
        let l = self.sig.torus;
        let elems = self.torus_subgroup();
        let mut orders = vec![1u64; l];
        for i in 0..l {
            let proj: BTreeSet<Rat> = elems.iter().map(|e| e[i].clone()).collect();
            // the projection is itself a finite subgroup of 𝕋, hence cyclic
            orders[i] = proj.len() as u64;
        }
        let product: u64 = orders.iter().product();
        if product as usize != elems.len() {
            return Err(Error::Unsupported(
                "fundamental domain",
                "torus subgroup does not split as a product of per-factor cyclic groups".into(),
            ));
        }
        Ok(orders)
    }

    fn int_coset_reps(&self) -> Result<Vec<Vec<BigInt>>> {
        let m = self.sig.int;
        if m == 0 {
            return Ok(vec![vec![]]);
        }
        let cols: Vec<Vec<BigInt>> = (0..m)
            .map(|c| (0..m).map(|r| self.int_index.rows[r][c].clone()).collect())
            .collect();
        let hnf = crate::rat::hnf_basis(m, &cols)?;
        let diag: Vec<i64> = (0..m)
            .map(|i| {
                hnf.rows[i][i]
                    .to_i64()
                    .ok_or_else(|| Error::Unsupported("coset enumeration", "index too large".into()))
            })
            .collect::<Result<_>>()?;
        let count: i64 = diag.iter().product();
        if count as u64 >= ENUM_CAP {
            return Err(Error::Unsupported("coset enumeration", "too many cosets".into()));
        }
        let mut reps = Vec::with_capacity(count as usize);
        let mut idx = vec![0i64; m];
        loop {
            reps.push(idx.iter().map(|&v| BigInt::from(v)).collect());
            let mut j = 0;
            loop {
                if j == m {
                    return Ok(reps);
                }
                idx[j] += 1;
                if idx[j] < diag[j] {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
        }
    }

    fn finite_coset_reps(&self) -> Result<Vec<Vec<u64>>> {
        let orders = &self.sig.finite;
        if orders.is_empty() {
            return Ok(vec![vec![]]);
        }
        let sub: BTreeSet<Vec<u64>> = self.finite_subgroup().into_iter().collect();
        let total: u64 = orders.iter().product();
        let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
        let mut reps = Vec::new();
        for flat in 0..total {
            let x = unflatten(flat, orders);
            if seen.contains(&x) {
                continue;
            }
            for s in &sub {
                let y: Vec<u64> = x
                    .iter()
                    .zip(s)
                    .zip(orders)
                    .map(|((&a, &b), &q)| (a + b) % q)
                    .collect();
                seen.insert(y);
            }
            reps.push(x);
        }
        Ok(reps)
    }

    /// Exact membership test.
    pub fn contains(&self, x: &GroupElement) -> Result<bool> {
        if !x.sig.same_structure(&self.sig) {
            return Err(Error::SignatureMismatch("membership test across different groups".into()));
        }
        if self.sig.real > 0 {
            let z = self.real_gens.inverse()?.apply(&x.real);
            if z.iter().any(|v| !v.is_integer()) {
                return Ok(false);
            }
        }
        if self.sig.int > 0 {
            let xr: Vec<Rat> = x.int.iter().map(|v| Rat::from(v.clone())).collect();
            let z = self.int_index.to_rat().inverse()?.apply(&xr);
            if z.iter().any(|v| !v.is_integer()) {
                return Ok(false);
            }
        }
        if self.sig.torus > 0 && !self.torus_subgroup().contains(&x.torus) {
            return Ok(false);
        }
        if !self.sig.finite.is_empty() && !self.finite_subgroup().contains(&x.finite) {
            return Ok(false);
        }
        Ok(true)
    }

    /// Canonical representative of `x` modulo this lattice.
    pub fn reduce(&self, x: &GroupElement) -> Result<GroupElement> {
        if !x.sig.same_structure(&self.sig) {
            return Err(Error::SignatureMismatch("reduction across different groups".into()));
        }
        let real = if self.sig.real > 0 {
            let t = self.real_gens.inverse()?.apply(&x.real);
            let frac: Vec<Rat> = t.iter().map(rat_fract).collect();
            self.real_gens.apply(&frac)
        } else {
            vec![]
        };
        let int = self.reduce_int(&x.int)?;
        let torus = if self.sig.torus > 0 {
            // smallest representative of the coset modulo the torus subgroup
            self.torus_subgroup()
                .iter()
                .map(|t| {
                    x.torus
                        .iter()
                        .zip(t)
                        .map(|(a, b)| rat_fract(&(a - b)))
                        .collect::<Vec<Rat>>()
                })
                .min()
                .unwrap()
        } else {
            vec![]
        };
        let finite = if !self.sig.finite.is_empty() {
            self.finite_subgroup()
                .iter()
                .map(|s| {
                    x.finite
                        .iter()
                        .zip(s)
                        .zip(&self.sig.finite)
                        .map(|((&a, &b), &q)| (a + q - b) % q)
                        .collect::<Vec<u64>>()
                })
                .min()
                .unwrap()
        } else {
            vec![]
        };
        GroupElement::new(self.sig.clone(), real, int, torus, finite)
    }

    fn reduce_int(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        let m = self.sig.int;
        if m == 0 {
            return Ok(vec![]);
        }
        let cols: Vec<Vec<BigInt>> = (0..m)
            .map(|c| (0..m).map(|r| self.int_index.rows[r][c].clone()).collect())
            .collect();
        let hnf = crate::rat::hnf_basis(m, &cols)?;
        let mut v = x.to_vec();
        for j in 0..m {
            let pivot = &hnf.rows[j][j];
            let q = div_floor_big(&v[j], pivot);
            for r in 0..m {
                let sub = &q * &hnf.rows[r][j];
                v[r] -= sub;
            }
        }
        Ok(v)
    }

    /// All lattice elements whose real coordinates lie in the given closed
    /// boxes and whose integer coordinates lie in the given closed ranges,
    /// crossed with the full torus and finite subgroups.
    pub fn points_in_window(
        &self,
        real_ranges: &[(Rat, Rat)],
        int_ranges: &[(BigInt, BigInt)],
    ) -> Result<Vec<GroupElement>> {
        let reals = enumerate_lattice_box(&self.real_gens, real_ranges)?;
        let int_mat = self.int_index.to_rat();
        let int_ranges_r: Vec<(Rat, Rat)> = int_ranges
            .iter()
            .map(|(a, b)| (Rat::from(a.clone()), Rat::from(b.clone())))
            .collect();
        let ints_r = enumerate_lattice_box(&int_mat, &int_ranges_r)?;
        let ints: Vec<Vec<BigInt>> = ints_r
            .into_iter()
            .map(|v| v.into_iter().map(|r| r.to_integer()).collect())
            .collect();
        let torus = self.torus_subgroup();
        let finite = self.finite_subgroup();
        let mut out = Vec::new();
        for r in &reals {
            for i in &ints {
                for t in &torus {
                    for f in &finite {
                        out.push(GroupElement {
                            sig: self.sig.clone(),
                            real: r.clone(),
                            int: i.clone(),
                            torus: t.clone(),
                            finite: f.clone(),
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

fn div_floor_big(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::div_floor(a, b)
}

fn unflatten(mut flat: u64, orders: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(orders.len());
    for &q in orders {
        out.push(flat % q);
        flat /= q;
    }
    out
}

fn subgroup_closure<T: Ord + Clone>(zero: T, gens: &[T], add: impl Fn(&T, &T) -> T) -> Vec<T> {
    let mut elems: BTreeSet<T> = BTreeSet::new();
    elems.insert(zero.clone());
    let mut frontier = vec![zero];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = add(&x, g);
            if elems.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    elems.into_iter().collect()
}

/// All points A·z (z ∈ ℤ^n) inside the closed box ∏[lo_i, hi_i].
fn enumerate_lattice_box(gens: &RatMat, ranges: &[(Rat, Rat)]) -> Result<Vec<Vec<Rat>>> {
    let n = gens.n;
    if n == 0 {
        return Ok(vec![vec![]]);
    }
    if ranges.len() != n {
        return Err(Error::InvalidRegion("window dimension mismatch".into()));
    }
    let inv = gens.inverse()?;
    // interval arithmetic bound for z = A^{-1} x over the box
    let mut lo = vec![Rat::zero(); n];
    let mut hi = vec![Rat::zero(); n];
    for j in 0..n {
        for i in 0..n {
            let c = &inv.rows[j][i];
            let (a, b) = (&ranges[i].0 * c, &ranges[i].1 * c);
            if a <= b {
                lo[j] += a;
                hi[j] += b;
            } else {
                lo[j] += b;
                hi[j] += a;
            }
        }
    }
    let lo_i: Vec<BigInt> = lo.iter().map(|r| r.ceil().to_integer()).collect();
    let hi_i: Vec<BigInt> = hi.iter().map(|r| rat_floor(r)).collect();
    let mut count = BigInt::one();
    for j in 0..n {
        let w: BigInt = &hi_i[j] - &lo_i[j] + 1;
        if w.is_negative() || w.is_zero() {
            return Ok(vec![]);
        }
        count *= w;
    }
    if count >= BigInt::from(ENUM_CAP) {
        return Err(Error::Unsupported("lattice enumeration", "window too large".into()));
    }
    let mut out = Vec::new();
    let mut idx = lo_i.clone();
    'outer: loop {
        let z: Vec<Rat> = idx.iter().map(|v| Rat::from(v.clone())).collect();
        let x = gens.apply(&z);
        let inside = x
            .iter()
            .zip(ranges)
            .all(|(v, (a, b))| v >= a && v <= b);
        if inside {
            out.push(x);
        }
        for j in 0..n {
            idx[j] += 1;
            if idx[j] <= hi_i[j] {
                continue 'outer;
            }
            idx[j] = lo_i[j].clone();
        }
        break;
    }
    Ok(out)
}

/// Haar measure of a region under the fixed normalization.
pub fn haar_measure(region: &Region) -> Rat {
    region.measure()
}

/// The dyadic lattice Λ_n = (2^{-n}ℤ)^d × ℤ^m × ℤ_{2^n}^ℓ × F.
pub fn dyadic_lattice(n: u32, sig: &GroupSignature) -> Result<Lattice> {
    let scale = Rat::new(BigInt::one(), BigInt::from(2u64).pow(n));
    let real_gens = RatMat::diagonal(&vec![scale.clone(); sig.real]);
    let int_index = IntMat::identity(sig.int);
    let torus_gens: Vec<Vec<Rat>> = (0..sig.torus)
        .map(|i| {
            let mut g = vec![Rat::zero(); sig.torus];
            g[i] = scale.clone();
            g
        })
        .collect();
    let finite_gens: Vec<Vec<u64>> = (0..sig.finite.len())
        .map(|i| {
            let mut g = vec![0u64; sig.finite.len()];
            g[i] = 1;
            g
        })
        .collect();
    Lattice::new(sig.clone(), real_gens, int_index, torus_gens, finite_gens)
}

/// The generation-n cube λ + 𝒬₀⁽ⁿ⁾ with
/// 𝒬₀⁽ⁿ⁾ = [−2^{−n−1},2^{−n−1})^d × {0} × [−2^{−n−1},2^{−n−1})^ℓ × {e}.
pub fn dyadic_cube(n: u32, lambda: &GroupElement) -> Result<Region> {
    let two_n = BigInt::from(2u64).pow(n);
    let half = Rat::new(BigInt::one(), BigInt::from(2u64).pow(n + 1));
    let width = Rat::new(BigInt::one(), two_n.clone());
    // membership in Λ_n: real and torus coordinates have denominator 2^n
    let in_lambda = lambda
        .real
        .iter()
        .chain(lambda.torus.iter())
        .all(|c| (c * Rat::from(two_n.clone())).is_integer());
    if !in_lambda {
        return Err(Error::NotInDyadicLattice(n));
    }
    let real_box: Vec<(Rat, Rat)> = lambda
        .real
        .iter()
        .map(|c| (c - &half, c + &half))
        .collect();
    // per-factor torus arcs, wrap-split as needed
    let mut torus_alternatives: Vec<Vec<(Rat, Rat)>> = vec![vec![]];
    for c in &lambda.torus {
        let arcs = torus_arc(&rat_fract(&(c - &half)), &width);
        let mut next = Vec::new();
        for prefix in &torus_alternatives {
            for arc in &arcs {
                let mut p = prefix.clone();
                p.push(arc.clone());
                next.push(p);
            }
        }
        torus_alternatives = next;
    }
    let mut cells = Vec::new();
    for t in torus_alternatives {
        cells.push(Cell::new(
            &lambda.sig,
            real_box.clone(),
            lambda.int.clone(),
            t,
            lambda.finite.clone(),
        )?);
    }
    Region::from_cells(lambda.sig.clone(), cells)
}

/// Arc of the given width starting at `start ∈ [0,1)`, split at the wrap
/// point. A width of 1 is the full circle.
pub(crate) fn torus_arc(start: &Rat, width: &Rat) -> Vec<(Rat, Rat)> {
    if width >= &Rat::one() {
        return vec![(Rat::zero(), Rat::one())];
    }
    let end = start + width;
    if end <= Rat::one() {
        vec![(start.clone(), end)]
    } else {
        vec![
            (start.clone(), Rat::one()),
            (Rat::zero(), end - Rat::one()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    fn r_sig() -> GroupSignature {
        GroupSignature::new(1, 0, 0, vec![]).unwrap()
    }

    #[test]
    fn dual_signature_cases() {
        let s = r_sig();
        assert_eq!(s.dual().real, 1);
        let z = GroupSignature::new(0, 1, 0, vec![]).unwrap();
        let zd = z.dual();
        assert_eq!((zd.real, zd.int, zd.torus), (0, 0, 1));
        let f = GroupSignature::new(0, 0, 0, vec![4]).unwrap();
        let fd = f.dual();
        assert_eq!(fd.finite, vec![4]);
        assert_eq!(f.dual().dual(), f);
    }

    #[test]
    fn pairing_examples() {
        // x = 1/2 ∈ ℝ, γ = 2 ∈ ℝ̂ → e^{2πi} = 1
        let x = GroupElement::real_scalar(rat(1, 2));
        let g = GroupElement::real_scalar(rat_int(2));
        assert_eq!(pairing_phase(&x, &g).unwrap(), Rat::zero());

        // x = 1/4 ∈ 𝕋, γ = 2 ∈ ℤ → e^{πi} = −1
        let ts = GroupSignature::new(0, 0, 1, vec![]).unwrap();
        let x = GroupElement::new(ts.clone(), vec![], vec![], vec![rat(1, 4)], vec![]).unwrap();
        let g = GroupElement::new(ts.dual(), vec![], vec![BigInt::from(2)], vec![], vec![]).unwrap();
        assert_eq!(pairing_phase(&x, &g).unwrap(), rat(1, 2));

        // x = 1 ∈ ℤ₄, γ = 1 ∈ ℤ̂₄ → e^{πi/2} = i
        let fs = GroupSignature::new(0, 0, 0, vec![4]).unwrap();
        let x = GroupElement::new(fs.clone(), vec![], vec![], vec![], vec![1]).unwrap();
        let g = GroupElement::new(fs.dual(), vec![], vec![], vec![], vec![1]).unwrap();
        assert_eq!(pairing_phase(&x, &g).unwrap(), rat(1, 4));
    }

    #[test]
    fn annihilator_of_scaled_integers() {
        // H = 2^{-3}ℤ ⊂ ℝ → Λ = 2³ℤ
        let h = Lattice::scaled_integers(rat(1, 8)).unwrap();
        let ann = h.annihilator().unwrap();
        assert_eq!(ann.real_gens.rows[0][0], rat_int(8));
        assert_eq!(h.covolume() * ann.covolume(), Rat::one());
        let back = ann.annihilator().unwrap();
        assert_eq!(back.real_gens.rows[0][0].abs(), rat(1, 8));
    }

    #[test]
    fn annihilator_in_z4() {
        // H = {0,2} ⊂ ℤ₄ → Λ = {0,2}
        let sig = GroupSignature::new(0, 0, 0, vec![4]).unwrap();
        let h = Lattice::new(sig, RatMat::identity(0), IntMat::identity(0), vec![], vec![vec![2]]).unwrap();
        let ann = h.annihilator().unwrap();
        let elems = ann.finite_subgroup();
        assert_eq!(elems, vec![vec![0], vec![2]]);
        assert_eq!(h.covolume() * ann.covolume(), Rat::one());
    }

    #[test]
    fn annihilator_int_torus_roundtrip() {
        // H = Mℤ² ⊂ ℤ² with a non-diagonal index matrix
        let sig = GroupSignature::new(0, 2, 0, vec![]).unwrap();
        let m = IntMat::from_i64(vec![vec![1, 1], vec![0, 2]]).unwrap();
        let h = Lattice::new(sig, RatMat::identity(0), m, vec![], vec![]).unwrap();
        let ann = h.annihilator().unwrap();
        assert_eq!(ann.torus_subgroup().len(), 2);
        assert_eq!(h.covolume() * ann.covolume(), Rat::one());
        let back = ann.annihilator().unwrap();
        assert_eq!(back.covolume(), h.covolume());
        // same lattice: the columns (1,0),(1,2) generate {(x,y): y even}
        let x = GroupElement::new(
            back.sig.clone(),
            vec![],
            vec![BigInt::from(1), BigInt::from(0)],
            vec![],
            vec![],
        )
        .unwrap();
        assert!(back.contains(&x).unwrap());
        let y = GroupElement::new(
            back.sig.clone(),
            vec![],
            vec![BigInt::from(1), BigInt::from(1)],
            vec![],
            vec![],
        )
        .unwrap();
        assert!(!back.contains(&y).unwrap());
    }

    #[test]
    fn fundamental_domain_examples() {
        let h = Lattice::scaled_integers(rat_int(2)).unwrap();
        let d = h.fundamental_domain().unwrap();
        assert_eq!(d.measure(), rat_int(2));

        let sig = GroupSignature::new(0, 0, 0, vec![4]).unwrap();
        let h = Lattice::new(sig, RatMat::identity(0), IntMat::identity(0), vec![], vec![vec![2]]).unwrap();
        let d = h.fundamental_domain().unwrap();
        let pts = d.discrete_points().unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].finite, vec![0]);
        assert_eq!(pts[1].finite, vec![1]);
    }

    #[test]
    fn dyadic_lattice_and_cube() {
        let sig = r_sig();
        let l0 = dyadic_lattice(0, &sig).unwrap();
        assert_eq!(l0.real_gens.rows[0][0], rat_int(1));
        let l3 = dyadic_lattice(3, &sig).unwrap();
        assert_eq!(l3.real_gens.rows[0][0], rat(1, 8));

        let ts = GroupSignature::new(0, 0, 1, vec![]).unwrap();
        let l1 = dyadic_lattice(1, &ts).unwrap();
        assert_eq!(l1.torus_subgroup().len(), 2);

        // n=2, λ=1/4 → [1/8, 3/8)
        let lam = GroupElement::real_scalar(rat(1, 4));
        let cube = dyadic_cube(2, &lam).unwrap();
        assert_eq!(cube.measure(), rat(1, 4));
        let cells = cube.cells();
        assert_eq!(cells[0].real[0], (rat(1, 8), rat(3, 8)));

        // generation-3 cubes have measure 1/8
        let lam = GroupElement::real_scalar(rat(3, 8));
        assert_eq!(dyadic_cube(3, &lam).unwrap().measure(), rat(1, 8));

        // λ ∉ Λ_n is rejected
        assert!(dyadic_cube(1, &GroupElement::real_scalar(rat(1, 3))).is_err());
    }

    #[test]
    fn window_enumeration() {
        let h = Lattice::scaled_integers(rat(1, 2)).unwrap();
        let pts = h
            .points_in_window(&[(rat_int(0), rat_int(1))], &[])
            .unwrap();
        assert_eq!(pts.len(), 3); // 0, 1/2, 1
    }
}

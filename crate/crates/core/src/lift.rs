//! Lifting along a quotient by a finite kernel K: regions, characters, and
//! exponent systems move between X/K and X, preserving Haar measure and the
//! character pairing.
//!
//! The kernel is restricted to products of per-factor cyclic groups: order
//! t_i inside the i-th torus factor (the subgroup {j/t_i}), and order s_i
//! inside the i-th finite factor (the subgroup generated by q_i/s_i). The
//! projection is then coordinatewise — t·x mod 1 on a torus factor and
//! x mod (q/s) on a finite factor — and the dual embedding X̂/K ≅ K^⊥ ⊂ X̂
//! multiplies the matching dual coordinate by the kernel order.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::group::{pairing_phase, torus_arc, GroupElement, GroupSignature, Lattice};
use crate::rat::{rat_fract, Rat};
use crate::region::{Cell, Region};

/// A finite kernel K acting coordinatewise on the torus and finite factors
/// of an ambient group. Order 1 on a factor means the kernel is trivial
/// there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelSpec {
    pub torus_orders: Vec<u64>,
    pub finite_orders: Vec<u64>,
}

impl KernelSpec {
    pub fn trivial(ambient: &GroupSignature) -> Self {
        KernelSpec {
            torus_orders: vec![1; ambient.torus],
            finite_orders: vec![1; ambient.finite.len()],
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.torus_orders.iter().all(|&t| t == 1) && self.finite_orders.iter().all(|&s| s == 1)
    }

    pub fn order(&self) -> u64 {
        self.torus_orders.iter().product::<u64>() * self.finite_orders.iter().product::<u64>()
    }

    pub fn validate(&self, ambient: &GroupSignature) -> Result<()> {
        if self.torus_orders.len() != ambient.torus
            || self.finite_orders.len() != ambient.finite.len()
        {
            return Err(Error::SignatureMismatch(
                "kernel factor counts do not match the ambient signature".into(),
            ));
        }
        if self.torus_orders.iter().any(|&t| t == 0) {
            return Err(Error::KernelOrderMismatch { order: 0, factor: 1 });
        }
        for (&s, &q) in self.finite_orders.iter().zip(&ambient.finite) {
            if s == 0 || q % s != 0 {
                return Err(Error::KernelOrderMismatch { order: s, factor: q });
            }
        }
        Ok(())
    }

    /// Signature of X/K: torus factors stay tori, the i-th finite factor
    /// drops from order q_i to q_i/s_i. The measure-side flag is inherited.
    pub fn quotient_signature(&self, ambient: &GroupSignature) -> Result<GroupSignature> {
        self.validate(ambient)?;
        let finite = ambient
            .finite
            .iter()
            .zip(&self.finite_orders)
            .map(|(&q, &s)| q / s)
            .collect();
        Ok(GroupSignature {
            real: ambient.real,
            int: ambient.int,
            torus: ambient.torus,
            finite,
            normalized_finite: ambient.normalized_finite,
        })
    }

    /// Generators of K as elements of the ambient group.
    pub fn kernel_generators(&self, ambient: &GroupSignature) -> Result<Vec<GroupElement>> {
        self.validate(ambient)?;
        let mut gens = Vec::new();
        for (i, &t) in self.torus_orders.iter().enumerate() {
            if t > 1 {
                let mut g = GroupElement::zero(ambient);
                g.torus[i] = Rat::new(BigInt::one(), BigInt::from(t));
                gens.push(g);
            }
        }
        for (i, (&s, &q)) in self.finite_orders.iter().zip(&ambient.finite).enumerate() {
            if s > 1 {
                let mut g = GroupElement::zero(ambient);
                g.finite[i] = q / s;
                gens.push(g);
            }
        }
        Ok(gens)
    }
}

/// Image π(R) ⊆ X/K of an ambient region. Projected cells may overlap, so
/// the result is accumulated as a union.
pub fn project_region(region: &Region, kernel: &KernelSpec) -> Result<Region> {
    let ambient = region.sig();
    let qsig = kernel.quotient_signature(ambient)?;
    let mut out = Region::empty(qsig.clone());
    for c in region.cells() {
        let finite: Vec<u64> = c
            .finite
            .iter()
            .zip(&qsig.finite)
            .map(|(&v, &cq)| v % cq)
            .collect();
        let mut torus_alts: Vec<Vec<(Rat, Rat)>> = vec![vec![]];
        for ((a, b), &t) in c.torus.iter().zip(&kernel.torus_orders) {
            let t_r = Rat::from(BigInt::from(t));
            let width = (b - a) * &t_r;
            let arcs = torus_arc(&rat_fract(&(a * &t_r)), &width);
            let mut next = Vec::new();
            for prefix in &torus_alts {
                for arc in &arcs {
                    let mut p = prefix.clone();
                    p.push(arc.clone());
                    next.push(p);
                }
            }
            torus_alts = next;
        }
        for t in torus_alts {
            let cell = Cell::new(&qsig, c.real.clone(), c.int.clone(), t, finite.clone())?;
            let piece = Region::from_cells(qsig.clone(), vec![cell])?;
            out = out.union(&piece)?;
        }
    }
    Ok(out)
}

/// Preimage π^{-1}(Q) ⊆ X of a quotient region; |K| disjoint copies, so
/// Haar measure is preserved under the inherited normalization.
pub fn lift_region(
    quotient: &Region,
    kernel: &KernelSpec,
    ambient: &GroupSignature,
) -> Result<Region> {
    let qsig = kernel.quotient_signature(ambient)?;
    if quotient.sig() != &qsig {
        return Err(Error::SignatureMismatch("region does not live in the quotient group".into()));
    }
    let mut cells = Vec::new();
    for c in quotient.cells() {
        // per-axis alternatives: torus arcs shrink by t and replicate t
        // times; finite coordinates replicate s times
        let mut torus_alts: Vec<Vec<(Rat, Rat)>> = vec![vec![]];
        for ((a, b), &t) in c.torus.iter().zip(&kernel.torus_orders) {
            let t_r = Rat::from(BigInt::from(t));
            let mut next = Vec::new();
            for j in 0..t {
                let j_r = Rat::from(BigInt::from(j));
                let lo = (a + &j_r) / &t_r;
                let hi = (b + &j_r) / &t_r;
                for prefix in &torus_alts {
                    let mut p = prefix.clone();
                    p.push((lo.clone(), hi.clone()));
                    next.push(p);
                }
            }
            torus_alts = next;
        }
        let mut finite_alts: Vec<Vec<u64>> = vec![vec![]];
        for ((&v, &s), &q) in c.finite.iter().zip(&kernel.finite_orders).zip(&ambient.finite) {
            let step = q / s;
            let mut next = Vec::new();
            for j in 0..s {
                for prefix in &finite_alts {
                    let mut p = prefix.clone();
                    p.push(v + j * step);
                    next.push(p);
                }
            }
            finite_alts = next;
        }
        for t in &torus_alts {
            for f in &finite_alts {
                cells.push(Cell::new(
                    ambient,
                    c.real.clone(),
                    c.int.clone(),
                    t.clone(),
                    f.clone(),
                )?);
            }
        }
    }
    Region::from_cells(ambient.clone(), cells)
}

/// Embed a character of X/K into X̂ via the isomorphism (X/K)^ ≅ K^⊥.
pub fn embed_dual_point(
    p: &GroupElement,
    kernel: &KernelSpec,
    ambient: &GroupSignature,
) -> Result<GroupElement> {
    let qdual = kernel.quotient_signature(ambient)?.dual();
    if !p.sig.same_structure(&qdual) {
        return Err(Error::SignatureMismatch(
            "point does not live in the dual of the quotient group".into(),
        ));
    }
    let adual = ambient.dual();
    // X's torus factors pair with the dual's integer coordinates
    let int: Vec<BigInt> = p
        .int
        .iter()
        .zip(&kernel.torus_orders)
        .map(|(n, &t)| n * BigInt::from(t))
        .collect();
    let finite: Vec<u64> = p
        .finite
        .iter()
        .zip(&kernel.finite_orders)
        .map(|(&b, &s)| b * s)
        .collect();
    GroupElement::new(adual, p.real.clone(), int, p.torus.clone(), finite)
}

/// Coset representatives κ_1,…,κ_{|K|} of X̂ / K^⊥ ≅ K̂, sorted.
pub fn kernel_dual_transversal(
    kernel: &KernelSpec,
    ambient: &GroupSignature,
) -> Result<Vec<GroupElement>> {
    kernel.validate(ambient)?;
    let adual = ambient.dual();
    let mut out = vec![GroupElement::zero(&adual)];
    for (i, &t) in kernel.torus_orders.iter().enumerate() {
        let mut next = Vec::new();
        for j in 0..t {
            for base in &out {
                let mut g = base.clone();
                g.int[i] = BigInt::from(j);
                next.push(g);
            }
        }
        out = next;
    }
    for (i, &s) in kernel.finite_orders.iter().enumerate() {
        let mut next = Vec::new();
        for j in 0..s {
            for base in &out {
                let mut g = base.clone();
                g.finite[i] = j;
                next.push(g);
            }
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

/// Embed a uniform lattice of (X/K)^ into X̂ through K^⊥.
pub fn embed_dual_lattice(
    h: &Lattice,
    kernel: &KernelSpec,
    ambient: &GroupSignature,
) -> Result<Lattice> {
    let qdual = kernel.quotient_signature(ambient)?.dual();
    if !h.sig.same_structure(&qdual) {
        return Err(Error::SignatureMismatch(
            "lattice does not live in the dual of the quotient group".into(),
        ));
    }
    let adual = ambient.dual();
    // scale row i of the integer basis by the i-th torus kernel order
    let mut int_rows = h.int_index.rows.clone();
    for (i, &t) in kernel.torus_orders.iter().enumerate() {
        for v in int_rows[i].iter_mut() {
            *v *= BigInt::from(t);
        }
    }
    let finite_gens: Vec<Vec<u64>> = h
        .finite_gens
        .iter()
        .map(|g| {
            g.iter()
                .zip(&kernel.finite_orders)
                .map(|(&b, &s)| b * s)
                .collect()
        })
        .collect();
    Lattice::new(
        adual,
        h.real_gens.clone(),
        crate::rat::IntMat::new(int_rows)?,
        h.torus_gens.clone(),
        finite_gens,
    )
}

/// Lift a quotient exponent system to the ambient group: the region becomes
/// π^{-1}(Q) and each base character γ splits into the |K| characters
/// embed(γ) + κ over the transversal κ of X̂/K^⊥.
///
/// Base points may be given either in the dual of the quotient (and are
/// embedded) or directly in the dual of the ambient group (and must then
/// annihilate the kernel).
pub fn lift_basis(
    quotient_region: &Region,
    base_points: &[GroupElement],
    kernel: &KernelSpec,
    ambient: &GroupSignature,
) -> Result<(Region, Vec<GroupElement>)> {
    let lifted_region = lift_region(quotient_region, kernel, ambient)?;
    let qdual = kernel.quotient_signature(ambient)?.dual();
    let adual = ambient.dual();
    let kappa = kernel_dual_transversal(kernel, ambient)?;
    let kernel_gens = kernel.kernel_generators(ambient)?;
    let mut points = Vec::with_capacity(base_points.len() * kappa.len());
    for p in base_points {
        let embedded = if p.sig.same_structure(&qdual) {
            embed_dual_point(p, kernel, ambient)?
        } else if p.sig.same_structure(&adual) {
            for g in &kernel_gens {
                if !pairing_phase(g, p)?.is_zero() {
                    return Err(Error::CharacterNotInAnnihilator);
                }
            }
            p.clone()
        } else {
            return Err(Error::SignatureMismatch(
                "base point lives in neither the quotient dual nor the ambient dual".into(),
            ));
        };
        for k in &kappa {
            points.push(embedded.add(k)?);
        }
    }
    Ok((lifted_region, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::pairing;
    use crate::rat::{rat, rat_int, IntMat, RatMat};

    fn torus_sig() -> GroupSignature {
        GroupSignature::new(0, 0, 1, vec![]).unwrap()
    }

    #[test]
    fn torus_lift_and_project() {
        let ambient = torus_sig();
        let kernel = KernelSpec { torus_orders: vec![2], finite_orders: vec![] };
        let qsig = kernel.quotient_signature(&ambient).unwrap();
        let arc = Region::from_cells(
            qsig.clone(),
            vec![Cell::new(&qsig, vec![], vec![], vec![(rat_int(0), rat(1, 2))], vec![]).unwrap()],
        )
        .unwrap();
        let lifted = lift_region(&arc, &kernel, &ambient).unwrap();
        assert_eq!(lifted.measure(), rat(1, 2));
        assert_eq!(lifted.cells().len(), 2);
        assert_eq!(lifted.cells()[0].torus[0], (rat_int(0), rat(1, 4)));
        assert_eq!(lifted.cells()[1].torus[0], (rat(1, 2), rat(3, 4)));
        // projecting back recovers the arc
        assert_eq!(project_region(&lifted, &kernel).unwrap(), arc);
    }

    #[test]
    fn finite_lift() {
        // ℤ₄ → ℤ₂ with kernel {0,2}
        let ambient = GroupSignature::new(0, 0, 0, vec![4]).unwrap().with_normalized_finite(true);
        let kernel = KernelSpec { torus_orders: vec![], finite_orders: vec![2] };
        let qsig = kernel.quotient_signature(&ambient).unwrap();
        assert_eq!(qsig.finite, vec![2]);
        let zero = Region::from_cells(
            qsig.clone(),
            vec![Cell::new(&qsig, vec![], vec![], vec![], vec![0]).unwrap()],
        )
        .unwrap();
        let lifted = lift_region(&zero, &kernel, &ambient).unwrap();
        let pts = lifted.discrete_points().unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].finite, vec![0]);
        assert_eq!(pts[1].finite, vec![2]);
        // measure preserved: 1/2 both sides
        assert_eq!(zero.measure(), rat(1, 2));
        assert_eq!(lifted.measure(), rat(1, 2));
    }

    #[test]
    fn embedding_respects_pairing() {
        // (π(x), p) = (x, embed(p)) on 𝕋 with a 3-fold kernel
        let ambient = torus_sig();
        let kernel = KernelSpec { torus_orders: vec![3], finite_orders: vec![] };
        let qdual = kernel.quotient_signature(&ambient).unwrap().dual();
        let p = GroupElement::new(qdual, vec![], vec![BigInt::from(2)], vec![], vec![]).unwrap();
        let embedded = embed_dual_point(&p, &kernel, &ambient).unwrap();
        assert_eq!(embedded.int, vec![BigInt::from(6)]);
        let x = GroupElement::new(ambient.clone(), vec![], vec![], vec![rat(1, 5)], vec![]).unwrap();
        // π(1/5) = 3/5
        let px = GroupElement::new(
            kernel.quotient_signature(&ambient).unwrap(),
            vec![],
            vec![],
            vec![rat(3, 5)],
            vec![],
        )
        .unwrap();
        let lhs = pairing(&px, &p).unwrap();
        let rhs = pairing(&x, &embedded).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn transversal_and_lifted_points() {
        let ambient = GroupSignature::new(0, 0, 0, vec![4]).unwrap().with_normalized_finite(true);
        let kernel = KernelSpec { torus_orders: vec![], finite_orders: vec![2] };
        let kappa = kernel_dual_transversal(&kernel, &ambient).unwrap();
        assert_eq!(kappa.len(), 2);
        assert_eq!(kappa[0].finite, vec![0]);
        assert_eq!(kappa[1].finite, vec![1]);

        let qsig = kernel.quotient_signature(&ambient).unwrap();
        let region = Region::from_cells(
            qsig.clone(),
            vec![Cell::new(&qsig, vec![], vec![], vec![], vec![0]).unwrap()],
        )
        .unwrap();
        let qdual = qsig.dual();
        let base = vec![GroupElement::zero(&qdual)];
        let (lifted, points) = lift_basis(&region, &base, &kernel, &ambient).unwrap();
        assert_eq!(lifted.measure(), rat(1, 2));
        assert_eq!(points.len(), 2);
        assert_eq!(points[0].finite, vec![0]);
        assert_eq!(points[1].finite, vec![1]);

        // ambient-dual points outside K^⊥ are rejected
        let adual = ambient.dual();
        let bad = GroupElement::new(adual, vec![], vec![], vec![], vec![1]).unwrap();
        assert!(matches!(
            lift_basis(&region, &[bad], &kernel, &ambient),
            Err(Error::CharacterNotInAnnihilator)
        ));
    }

    #[test]
    fn embedded_lattice_covolume() {
        // H = ℤ ⊂ ℤ = (𝕋)^ dual of the quotient, kernel order 2 on 𝕋
        let ambient = torus_sig();
        let kernel = KernelSpec { torus_orders: vec![2], finite_orders: vec![] };
        let qdual = kernel.quotient_signature(&ambient).unwrap().dual();
        let h = Lattice::new(qdual, RatMat::identity(0), IntMat::identity(1), vec![], vec![]).unwrap();
        let embedded = embed_dual_lattice(&h, &kernel, &ambient).unwrap();
        assert_eq!(embedded.covolume(), rat_int(2));
    }
}

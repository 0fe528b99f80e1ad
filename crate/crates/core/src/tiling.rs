//! Multi-tiling certification: multiplicity profiles, exact k-tiling tests,
//! decomposition of a k-tiling into k disjoint 1-tilings, and the fiber
//! configurations that drive the spectral bounds.
//!
//! A region Ω k-tiles a lattice Λ when Σ_{λ∈Λ} χ_Ω(x+λ) = k for a.e. x.
//! Everything here is decided exactly: Ω is cut against a fundamental
//! domain D of Λ into atomic cells, and the covering multiplicity is
//! constant on each atom.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::group::{GroupElement, Lattice};
use crate::rat::Rat;
use crate::region::{merge_cells, refine_breakpoints, Cell, Region};

/// Measure of the set where the covering multiplicity takes each value.
/// The measures always sum to covol(Λ); the value 0 appears only when it
/// occurs on positive measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityProfile {
    pub entries: BTreeMap<u64, Rat>,
}

impl MultiplicityProfile {
    /// Some(k) iff the profile is concentrated on one multiplicity k ≥ 1.
    pub fn as_uniform(&self) -> Option<u64> {
        if self.entries.len() == 1 {
            let (&k, _) = self.entries.iter().next().unwrap();
            if k >= 1 {
                return Some(k);
            }
        }
        None
    }

    pub fn total(&self) -> Rat {
        self.entries.values().sum()
    }
}

/// Lattice points λ with (λ + D) ∩ Ω ≠ ∅, sorted lexicographically. These
/// are the only translates that can meet the fundamental domain `domain`.
pub fn relevant_offsets(
    omega: &Region,
    lambda: &Lattice,
    domain: &Region,
) -> Result<Vec<GroupElement>> {
    if omega.sig() != &lambda.sig || domain.sig() != &lambda.sig {
        return Err(Error::SignatureMismatch(
            "region, lattice, and domain must live in the same group".into(),
        ));
    }
    if omega.is_empty() {
        return Ok(vec![]);
    }
    let o_ext = omega.real_extent().unwrap();
    let d_ext = domain
        .real_extent()
        .ok_or_else(|| Error::InvalidRegion("empty fundamental domain".into()))?;
    let real_ranges: Vec<(Rat, Rat)> = o_ext
        .iter()
        .zip(&d_ext)
        .map(|((ol, oh), (dl, dh))| (ol - dh, oh - dl))
        .collect();
    let o_ints = omega.int_values();
    let d_ints = domain.int_values();
    let int_ranges: Vec<(BigInt, BigInt)> = o_ints
        .iter()
        .zip(&d_ints)
        .map(|(o, d)| {
            let (ol, oh) = (o.iter().next().unwrap(), o.iter().last().unwrap());
            let (dl, dh) = (d.iter().next().unwrap(), d.iter().last().unwrap());
            (ol - dh, oh - dl)
        })
        .collect();
    let mut out = Vec::new();
    for lam in lambda.points_in_window(&real_ranges, &int_ranges)? {
        let piece = omega.translate(&lam.neg())?.intersect(domain)?;
        if !piece.is_empty() {
            out.push(lam);
        }
    }
    out.sort();
    Ok(out)
}

/// Atoms of a fundamental domain of Λ, each tagged with the sorted list of
/// offsets λ whose translate Ω−λ covers it. Shared by the profile, the
/// decomposition, and the configuration list.
fn tagged_atoms(
    omega: &Region,
    lambda: &Lattice,
) -> Result<(Region, Vec<(Cell, Vec<GroupElement>)>)> {
    let domain = lambda.fundamental_domain()?;
    let offsets = relevant_offsets(omega, lambda, &domain)?;
    let mut pieces = Vec::with_capacity(offsets.len());
    for lam in &offsets {
        pieces.push(omega.translate(&lam.neg())?.intersect(&domain)?);
    }
    let mut all: Vec<&Region> = vec![&domain];
    all.extend(pieces.iter());
    let mut atom_sets = refine_breakpoints(&all)?;
    let domain_atoms = atom_sets.remove(0);
    let mut tagged = Vec::with_capacity(domain_atoms.len());
    for cell in domain_atoms {
        let tags: Vec<GroupElement> = offsets
            .iter()
            .zip(&atom_sets)
            .filter(|(_, set)| set.contains(&cell))
            .map(|(lam, _)| lam.clone())
            .collect();
        tagged.push((cell, tags));
    }
    Ok((domain, tagged))
}

/// The multiplicity profile Δ_Ω of Ω with respect to Λ. The measures sum
/// to covol(Λ).
pub fn multiplicity_profile(omega: &Region, lambda: &Lattice) -> Result<MultiplicityProfile> {
    let (domain, tagged) = tagged_atoms(omega, lambda)?;
    let mut entries: BTreeMap<u64, Rat> = BTreeMap::new();
    for (cell, tags) in &tagged {
        let m = cell.measure(domain.sig());
        *entries.entry(tags.len() as u64).or_insert_with(Rat::zero) += m;
    }
    let profile = MultiplicityProfile { entries };
    debug_assert_eq!(profile.total(), lambda.covolume());
    Ok(profile)
}

/// Some(k) iff Ω is an exact k-tiling of Λ.
pub fn is_k_tiling(omega: &Region, lambda: &Lattice) -> Result<Option<u64>> {
    Ok(multiplicity_profile(omega, lambda)?.as_uniform())
}

/// A maximal cell of the fundamental domain together with the sorted
/// offsets λ_1 < … < λ_k for which cell + λ_j ⊆ Ω.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberConfiguration {
    pub cell: Cell,
    pub offsets: Vec<GroupElement>,
}

/// The finitely many fiber configurations of a k-tiling: a partition of the
/// fundamental domain into maximal cells on which the set of covering
/// offsets is constant. Errors when Ω is not a k-tiling.
pub fn configurations(omega: &Region, lambda: &Lattice) -> Result<Vec<FiberConfiguration>> {
    let (_, tagged) = tagged_atoms(omega, lambda)?;
    let counts: std::collections::BTreeSet<usize> =
        tagged.iter().map(|(_, tags)| tags.len()).collect();
    if counts.len() != 1 || counts.contains(&0) {
        return Err(Error::NotAKTiling(counts.len()));
    }
    let mut groups: BTreeMap<Vec<GroupElement>, Vec<Cell>> = BTreeMap::new();
    for (cell, tags) in tagged {
        groups.entry(tags).or_default().push(cell);
    }
    let mut out = Vec::new();
    for (offsets, cells) in groups {
        for cell in merge_cells(cells) {
            out.push(FiberConfiguration { cell, offsets: offsets.clone() });
        }
    }
    out.sort_by(|a, b| a.cell.cmp(&b.cell));
    Ok(out)
}

/// Split a k-tiling Ω into k disjoint regions Ω_1,…,Ω_k, each of which
/// tiles Λ exactly once: Ω_j collects, over every configuration cell, the
/// translate by the j-th smallest covering offset.
pub fn decompose_tiles(omega: &Region, lambda: &Lattice) -> Result<Vec<Region>> {
    let configs = configurations(omega, lambda)?;
    let k = configs[0].offsets.len();
    let mut tiles = vec![Region::empty(omega.sig().clone()); k];
    for config in &configs {
        let base = Region::from_cells(omega.sig().clone(), vec![config.cell.clone()])?;
        for (j, lam) in config.offsets.iter().enumerate() {
            let translated = base.translate(lam)?;
            tiles[j] = tiles[j].union(&translated)?;
        }
    }
    Ok(tiles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSignature;
    use crate::rat::{rat, rat_int, IntMat, RatMat};

    #[test]
    fn interval_two_tiling() {
        let omega = Region::interval(rat_int(0), rat_int(2)).unwrap();
        let lambda = Lattice::scaled_integers(rat_int(1)).unwrap();
        let profile = multiplicity_profile(&omega, &lambda).unwrap();
        assert_eq!(profile.entries.len(), 1);
        assert_eq!(profile.entries[&2], rat_int(1));
        assert_eq!(is_k_tiling(&omega, &lambda).unwrap(), Some(2));

        let tiles = decompose_tiles(&omega, &lambda).unwrap();
        assert_eq!(tiles.len(), 2);
        for t in &tiles {
            assert_eq!(is_k_tiling(t, &lambda).unwrap(), Some(1));
        }
        // the tiles partition Ω
        assert!(tiles[0].intersect(&tiles[1]).unwrap().is_empty());
        assert_eq!(tiles[0].union(&tiles[1]).unwrap(), omega);
    }

    #[test]
    fn split_two_tiling_configurations() {
        // Ω = [0,1) ∪ [5/4,9/4) 2-tiles ℤ with two configurations
        let omega = Region::interval(rat_int(0), rat_int(1))
            .unwrap()
            .union(&Region::interval(rat(5, 4), rat(9, 4)).unwrap())
            .unwrap();
        let lambda = Lattice::scaled_integers(rat_int(1)).unwrap();
        assert_eq!(is_k_tiling(&omega, &lambda).unwrap(), Some(2));
        let configs = configurations(&omega, &lambda).unwrap();
        assert_eq!(configs.len(), 2);
        // [0,1/4) covered by Ω and Ω−2; [1/4,1) by Ω and Ω−1
        assert_eq!(configs[0].cell.real[0], (rat_int(0), rat(1, 4)));
        let offs0: Vec<Rat> = configs[0].offsets.iter().map(|g| g.real[0].clone()).collect();
        assert_eq!(offs0, vec![rat_int(0), rat_int(2)]);
        assert_eq!(configs[1].cell.real[0], (rat(1, 4), rat_int(1)));
        let offs1: Vec<Rat> = configs[1].offsets.iter().map(|g| g.real[0].clone()).collect();
        assert_eq!(offs1, vec![rat_int(0), rat_int(1)]);
    }

    #[test]
    fn non_tiling_detected() {
        let omega = Region::interval(rat_int(0), rat(3, 2)).unwrap();
        let lambda = Lattice::scaled_integers(rat_int(1)).unwrap();
        let profile = multiplicity_profile(&omega, &lambda).unwrap();
        assert_eq!(profile.entries[&1], rat(1, 2));
        assert_eq!(profile.entries[&2], rat(1, 2));
        assert_eq!(is_k_tiling(&omega, &lambda).unwrap(), None);
        assert!(configurations(&omega, &lambda).is_err());
    }

    #[test]
    fn fundamental_domain_is_one_tiling() {
        let lattices = vec![
            Lattice::scaled_integers(rat(3, 2)).unwrap(),
            Lattice::new(
                GroupSignature::new(0, 0, 0, vec![6]).unwrap().with_normalized_finite(true),
                RatMat::identity(0),
                IntMat::identity(0),
                vec![],
                vec![vec![3]],
            )
            .unwrap(),
            Lattice::new(
                GroupSignature::new(1, 0, 1, vec![]).unwrap(),
                RatMat::diagonal(&[rat(1, 2)]),
                IntMat::identity(0),
                vec![vec![rat(1, 4)]],
                vec![],
            )
            .unwrap(),
        ];
        for lambda in lattices {
            let d = lambda.fundamental_domain().unwrap();
            let profile = multiplicity_profile(&d, &lambda).unwrap();
            assert_eq!(profile.entries.len(), 1, "profile {:?}", profile);
            assert_eq!(profile.entries[&1], lambda.covolume());
        }
    }

    #[test]
    fn finite_group_tiling() {
        // Ω = {0,1} ⊂ ℤ̂₄ tiles Λ = {0,2} once
        let sig = GroupSignature::new(0, 0, 0, vec![4]).unwrap().with_normalized_finite(true);
        let lambda = Lattice::new(
            sig.clone(),
            RatMat::identity(0),
            IntMat::identity(0),
            vec![],
            vec![vec![2]],
        )
        .unwrap();
        let cells = vec![
            Cell::new(&sig, vec![], vec![], vec![], vec![0]).unwrap(),
            Cell::new(&sig, vec![], vec![], vec![], vec![1]).unwrap(),
        ];
        let omega = Region::from_cells(sig.clone(), cells).unwrap();
        assert_eq!(is_k_tiling(&omega, &lambda).unwrap(), Some(1));

        // the whole group 2-tiles Λ
        let all = Region::from_cells(
            sig.clone(),
            (0..4)
                .map(|v| Cell::new(&sig, vec![], vec![], vec![], vec![v]).unwrap())
                .collect(),
        )
        .unwrap();
        assert_eq!(is_k_tiling(&all, &lambda).unwrap(), Some(2));
    }
}

//! Finite unions of half-open boxes ("cells") in an elemental group, with
//! exact boolean operations, translation, and Haar measure.
//!
//! A cell is a product of half-open rational intervals [a,b) on the real
//! and torus axes and single points on the integer and finite axes. Boolean
//! operations refine the operands to a common atomic arrangement (splitting
//! every interval at every endpoint that occurs), operate on the atoms as
//! sets, and then merge adjacent atoms back into maximal cells.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::group::{torus_arc, GroupElement, GroupSignature};
use crate::rat::{rat_fract, Rat};

/// One half-open box: intervals on the continuous axes, points on the
/// discrete axes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    pub real: Vec<(Rat, Rat)>,
    pub int: Vec<BigInt>,
    pub torus: Vec<(Rat, Rat)>,
    pub finite: Vec<u64>,
}

impl Cell {
    pub fn new(
        sig: &GroupSignature,
        real: Vec<(Rat, Rat)>,
        int: Vec<BigInt>,
        torus: Vec<(Rat, Rat)>,
        finite: Vec<u64>,
    ) -> Result<Self> {
        if real.len() != sig.real
            || int.len() != sig.int
            || torus.len() != sig.torus
            || finite.len() != sig.finite.len()
        {
            return Err(Error::InvalidRegion("cell axis counts do not match the signature".into()));
        }
        for (a, b) in &real {
            if a >= b {
                return Err(Error::InvalidRegion("empty or reversed interval".into()));
            }
        }
        for (a, b) in &torus {
            if a >= b || a < &Rat::zero() || b > &Rat::one() {
                return Err(Error::InvalidRegion("torus interval must satisfy 0 <= a < b <= 1".into()));
            }
        }
        let finite = finite
            .iter()
            .zip(&sig.finite)
            .map(|(&v, &q)| v % q)
            .collect();
        Ok(Cell { real, int, torus, finite })
    }

    pub(crate) fn measure(&self, sig: &GroupSignature) -> Rat {
        let mut m = sig.finite_point_mass();
        for (a, b) in self.real.iter().chain(self.torus.iter()) {
            m *= b - a;
        }
        m
    }

    fn intersects(&self, other: &Cell) -> bool {
        if self.int != other.int || self.finite != other.finite {
            return false;
        }
        self.real
            .iter()
            .chain(self.torus.iter())
            .zip(other.real.iter().chain(other.torus.iter()))
            .all(|((a1, b1), (a2, b2))| a1 < b2 && a2 < b1)
    }

    fn contains_point(&self, x: &GroupElement) -> bool {
        if self.int != x.int || self.finite != x.finite {
            return false;
        }
        self.real
            .iter()
            .zip(&x.real)
            .chain(self.torus.iter().zip(&x.torus))
            .all(|((a, b), v)| a <= v && v < b)
    }
}

/// A finite disjoint union of cells, kept in canonical (merged, sorted)
/// form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    sig: GroupSignature,
    cells: Vec<Cell>,
}

impl Region {
    pub fn empty(sig: GroupSignature) -> Self {
        Region { sig, cells: vec![] }
    }

    /// Build from pairwise-disjoint cells; overlapping cells are rejected.
    pub fn from_cells(sig: GroupSignature, cells: Vec<Cell>) -> Result<Self> {
        for c in &cells {
            // re-validate axis counts against the signature
            Cell::new(&sig, c.real.clone(), c.int.clone(), c.torus.clone(), c.finite.clone())?;
        }
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                if cells[i].intersects(&cells[j]) {
                    return Err(Error::InvalidRegion("cells overlap".into()));
                }
            }
        }
        Ok(Region { sig, cells }.canonicalize())
    }

    /// The half-open interval [a,b) in the 1-d real group.
    pub fn interval(a: Rat, b: Rat) -> Result<Self> {
        let sig = GroupSignature::new(1, 0, 0, vec![])?;
        let cell = Cell::new(&sig, vec![(a, b)], vec![], vec![], vec![])?;
        Region::from_cells(sig, vec![cell])
    }

    pub fn sig(&self) -> &GroupSignature {
        &self.sig
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn measure(&self) -> Rat {
        self.cells.iter().map(|c| c.measure(&self.sig)).sum()
    }

    pub fn contains_point(&self, x: &GroupElement) -> Result<bool> {
        if !x.sig.same_structure(&self.sig) {
            return Err(Error::SignatureMismatch("point and region live in different groups".into()));
        }
        Ok(self.cells.iter().any(|c| c.contains_point(x)))
    }

    pub fn union(&self, other: &Region) -> Result<Region> {
        self.boolean_op(other, |a, b| a.union(b).cloned().collect())
    }

    pub fn intersect(&self, other: &Region) -> Result<Region> {
        self.boolean_op(other, |a, b| a.intersection(b).cloned().collect())
    }

    pub fn subtract(&self, other: &Region) -> Result<Region> {
        self.boolean_op(other, |a, b| a.difference(b).cloned().collect())
    }

    pub fn is_subset(&self, other: &Region) -> Result<bool> {
        Ok(self.subtract(other)?.is_empty())
    }

    pub fn intersects(&self, other: &Region) -> Result<bool> {
        Ok(!self.intersect(other)?.is_empty())
    }

    fn boolean_op(
        &self,
        other: &Region,
        op: impl Fn(&BTreeSet<Cell>, &BTreeSet<Cell>) -> BTreeSet<Cell>,
    ) -> Result<Region> {
        if self.sig != other.sig {
            return Err(Error::SignatureMismatch("regions live in different groups".into()));
        }
        let bps = Breakpoints::collect(&self.sig, &[self, other]);
        let a = atoms(self, &bps);
        let b = atoms(other, &bps);
        Ok(Region { sig: self.sig.clone(), cells: merge_cells(op(&a, &b).into_iter().collect()) })
    }

    /// Translate by a group element; torus intervals wrap and split.
    pub fn translate(&self, g: &GroupElement) -> Result<Region> {
        if !g.sig.same_structure(&self.sig) {
            return Err(Error::SignatureMismatch("translation vector lives in a different group".into()));
        }
        let mut cells = Vec::new();
        for c in &self.cells {
            let real: Vec<(Rat, Rat)> = c
                .real
                .iter()
                .zip(&g.real)
                .map(|((a, b), t)| (a + t, b + t))
                .collect();
            let int: Vec<BigInt> = c.int.iter().zip(&g.int).map(|(a, b)| a + b).collect();
            let finite: Vec<u64> = c
                .finite
                .iter()
                .zip(&g.finite)
                .zip(&self.sig.finite)
                .map(|((&a, &b), &q)| (a + b) % q)
                .collect();
            // each torus axis may split at the wrap point
            let mut torus_alts: Vec<Vec<(Rat, Rat)>> = vec![vec![]];
            for ((a, b), t) in c.torus.iter().zip(&g.torus) {
                let width = b - a;
                let arcs = torus_arc(&rat_fract(&(a + t)), &width);
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
                cells.push(Cell {
                    real: real.clone(),
                    int: int.clone(),
                    torus: t,
                    finite: finite.clone(),
                });
            }
        }
        Ok(Region { sig: self.sig.clone(), cells }.canonicalize())
    }

    /// Merge adjacent cells into maximal ones; idempotent.
    pub fn canonicalize(&self) -> Region {
        let bps = Breakpoints::collect(&self.sig, &[self]);
        let a: Vec<Cell> = atoms(self, &bps).into_iter().collect();
        Region { sig: self.sig.clone(), cells: merge_cells(a) }
    }

    /// Closed bounding ranges of the real axes; `None` when empty.
    pub fn real_extent(&self) -> Option<Vec<(Rat, Rat)>> {
        if self.cells.is_empty() {
            return None;
        }
        let mut ext: Vec<(Rat, Rat)> = self.cells[0].real.clone();
        for c in &self.cells[1..] {
            for (e, (a, b)) in ext.iter_mut().zip(&c.real) {
                if a < &e.0 {
                    e.0 = a.clone();
                }
                if b > &e.1 {
                    e.1 = b.clone();
                }
            }
        }
        Some(ext)
    }

    /// Distinct values on each integer axis.
    pub fn int_values(&self) -> Vec<BTreeSet<BigInt>> {
        let mut out = vec![BTreeSet::new(); self.sig.int];
        for c in &self.cells {
            for (set, v) in out.iter_mut().zip(&c.int) {
                set.insert(v.clone());
            }
        }
        out
    }

    /// All points of a purely discrete region (no real or torus axes),
    /// sorted.
    pub fn discrete_points(&self) -> Result<Vec<GroupElement>> {
        if self.sig.real > 0 || self.sig.torus > 0 {
            return Err(Error::Unsupported(
                "discrete enumeration",
                "the group has continuous factors".into(),
            ));
        }
        let mut out: Vec<GroupElement> = self
            .cells
            .iter()
            .map(|c| GroupElement {
                sig: self.sig.clone(),
                real: vec![],
                int: c.int.clone(),
                torus: vec![],
                finite: c.finite.clone(),
            })
            .collect();
        out.sort();
        Ok(out)
    }
}

/// Refine a family of regions (all over the same signature) to a common
/// atomic arrangement. Returns, for each input region in order, its set of
/// atoms; atoms from any two of the regions are either equal or disjoint.
pub fn refine_breakpoints(regions: &[&Region]) -> Result<Vec<BTreeSet<Cell>>> {
    let Some(first) = regions.first() else {
        return Ok(vec![]);
    };
    for r in regions {
        if r.sig != first.sig {
            return Err(Error::SignatureMismatch("regions live in different groups".into()));
        }
    }
    let bps = Breakpoints::collect(&first.sig, regions);
    Ok(regions.iter().map(|r| atoms(r, &bps)).collect())
}

/// Interval endpoints occurring on each continuous axis across a family of
/// regions. Splitting every cell at every breakpoint yields a common
/// arrangement: two atoms from any of the regions are either equal or
/// disjoint.
struct Breakpoints {
    real: Vec<BTreeSet<Rat>>,
    torus: Vec<BTreeSet<Rat>>,
}

impl Breakpoints {
    fn collect(sig: &GroupSignature, regions: &[&Region]) -> Breakpoints {
        let mut real = vec![BTreeSet::new(); sig.real];
        let mut torus = vec![BTreeSet::new(); sig.torus];
        for region in regions {
            for c in &region.cells {
                for (set, (a, b)) in real.iter_mut().zip(&c.real) {
                    set.insert(a.clone());
                    set.insert(b.clone());
                }
                for (set, (a, b)) in torus.iter_mut().zip(&c.torus) {
                    set.insert(a.clone());
                    set.insert(b.clone());
                }
            }
        }
        Breakpoints { real, torus }
    }
}

fn split_interval(interval: &(Rat, Rat), bps: &BTreeSet<Rat>) -> Vec<(Rat, Rat)> {
    let (a, b) = interval;
    let mut points: Vec<&Rat> = vec![a];
    points.extend(bps.range((
        std::ops::Bound::Excluded(a.clone()),
        std::ops::Bound::Excluded(b.clone()),
    )));
    points.push(b);
    points
        .windows(2)
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect()
}

fn atoms(region: &Region, bps: &Breakpoints) -> BTreeSet<Cell> {
    let mut out = BTreeSet::new();
    for c in &region.cells {
        // cartesian product of the per-axis splits
        let mut parts: Vec<Cell> = vec![Cell {
            real: vec![],
            int: c.int.clone(),
            torus: vec![],
            finite: c.finite.clone(),
        }];
        for (interval, set) in c.real.iter().zip(&bps.real) {
            let pieces = split_interval(interval, set);
            parts = parts
                .into_iter()
                .flat_map(|p| {
                    pieces.iter().map(move |piece| {
                        let mut q = p.clone();
                        q.real.push(piece.clone());
                        q
                    })
                })
                .collect();
        }
        for (interval, set) in c.torus.iter().zip(&bps.torus) {
            let pieces = split_interval(interval, set);
            parts = parts
                .into_iter()
                .flat_map(|p| {
                    pieces.iter().map(move |piece| {
                        let mut q = p.clone();
                        q.torus.push(piece.clone());
                        q
                    })
                })
                .collect();
        }
        out.extend(parts);
    }
    out
}

/// Merge cells that are adjacent along one axis and identical elsewhere,
/// repeating across axes until stable.
pub(crate) fn merge_cells(mut cells: Vec<Cell>) -> Vec<Cell> {
    if cells.is_empty() {
        return cells;
    }
    let n_real = cells[0].real.len();
    let n_torus = cells[0].torus.len();
    loop {
        let mut changed = false;
        for axis in 0..n_real + n_torus {
            let mut groups: BTreeMap<Cell, Vec<(Rat, Rat)>> = BTreeMap::new();
            for c in cells.drain(..) {
                let mut key = c.clone();
                let interval = if axis < n_real {
                    std::mem::replace(&mut key.real[axis], (Rat::zero(), Rat::one()))
                } else {
                    std::mem::replace(&mut key.torus[axis - n_real], (Rat::zero(), Rat::one()))
                };
                groups.entry(key).or_default().push(interval);
            }
            for (key, mut intervals) in groups {
                intervals.sort();
                let mut merged: Vec<(Rat, Rat)> = Vec::new();
                for iv in intervals {
                    match merged.last_mut() {
                        Some(last) if last.1 == iv.0 => {
                            last.1 = iv.1;
                            changed = true;
                        }
                        _ => merged.push(iv),
                    }
                }
                for iv in merged {
                    let mut c = key.clone();
                    if axis < n_real {
                        c.real[axis] = iv;
                    } else {
                        c.torus[axis - n_real] = iv;
                    }
                    cells.push(c);
                }
            }
        }
        if !changed {
            break;
        }
    }
    cells.sort();
    cells
}

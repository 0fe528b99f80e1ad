//! Property-based invariants of the exact region algebra, the duality
//! machinery, and the fiber spectra.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lca_tiling::group::{pairing_phase, GroupElement, GroupSignature, Lattice};
use lca_tiling::oracle::random_instance;
use lca_tiling::rat::{rat, rat_fract, rat_int, Rat};
use lca_tiling::region::Region;
use lca_tiling::riesz::riesz_bounds;
use lca_tiling::tiling::multiplicity_profile;

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-16i64..16, 1i64..8).prop_map(|(p, q)| rat(p, q))
}

fn arb_pos_rat() -> impl Strategy<Value = Rat> {
    (1i64..16, 1i64..8).prop_map(|(p, q)| rat(p, q))
}

/// A 1-d real region built as a union of up to three rational intervals.
fn arb_region() -> impl Strategy<Value = Region> {
    prop::collection::vec((arb_rat(), 1i64..8), 1..4).prop_map(|ivs| {
        let mut r = Region::empty(GroupSignature::new(1, 0, 0, vec![]).unwrap());
        for (a, len) in ivs {
            let b = &a + rat(len, 4);
            r = r.union(&Region::interval(a, b).unwrap()).unwrap();
        }
        r
    })
}

fn real_pt(x: Rat) -> GroupElement {
    GroupElement::real_scalar(x)
}

proptest! {
    /// (x + y, γ) = (x, γ)(y, γ): the pairing phase is additive mod 1.
    #[test]
    fn pairing_is_multiplicative(x in arb_rat(), y in arb_rat(), g in arb_rat(), fx in 0u64..6, fy in 0u64..6, fg in 0u64..6) {
        let sig = GroupSignature::new(1, 0, 0, vec![6]).unwrap();
        let dual = sig.dual();
        let a = GroupElement::new(sig.clone(), vec![x], vec![], vec![], vec![fx]).unwrap();
        let b = GroupElement::new(sig, vec![y], vec![], vec![], vec![fy]).unwrap();
        let gamma = GroupElement::new(dual, vec![g], vec![], vec![], vec![fg]).unwrap();
        let lhs = pairing_phase(&a.add(&b).unwrap(), &gamma).unwrap();
        let rhs = rat_fract(&(pairing_phase(&a, &gamma).unwrap() + pairing_phase(&b, &gamma).unwrap()));
        prop_assert_eq!(lhs, rhs);
    }

    /// m(A ∪ B) + m(A ∩ B) = m(A) + m(B), exactly.
    #[test]
    fn measure_is_modular(a in arb_region(), b in arb_region()) {
        let lhs = a.union(&b).unwrap().measure() + a.intersect(&b).unwrap().measure();
        prop_assert_eq!(lhs, a.measure() + b.measure());
    }

    /// Haar measure is translation invariant.
    #[test]
    fn measure_is_translation_invariant(a in arb_region(), t in arb_rat()) {
        prop_assert_eq!(a.translate(&real_pt(t)).unwrap().measure(), a.measure());
    }

    /// (A − B) ⊔ (A ∩ B) = A and (A − B) ∩ B = ∅.
    #[test]
    fn subtract_complements_intersection(a in arb_region(), b in arb_region()) {
        let diff = a.subtract(&b).unwrap();
        prop_assert!(!diff.intersects(&b).unwrap());
        prop_assert_eq!(diff.union(&a.intersect(&b).unwrap()).unwrap(), a.canonicalize());
    }

    /// Canonicalization is idempotent and measure preserving.
    #[test]
    fn canonicalize_is_idempotent(a in arb_region()) {
        let c = a.canonicalize();
        prop_assert_eq!(c.canonicalize(), c.clone());
        prop_assert_eq!(c.measure(), a.measure());
    }

    /// (Λ^⊥)^⊥ = Λ and covol(Λ) · covol(Λ^⊥) = 1 for scaled integer lattices.
    #[test]
    fn annihilator_is_an_involution(alpha in arb_pos_rat()) {
        let lambda = Lattice::scaled_integers(alpha).unwrap();
        let ann = lambda.annihilator().unwrap();
        prop_assert_eq!(lambda.covolume() * ann.covolume(), rat_int(1));
        let back = ann.annihilator().unwrap();
        prop_assert_eq!(back.covolume(), lambda.covolume());
        prop_assert_eq!(back.real_gens.rows, lambda.real_gens.rows);
    }

    /// The multiplicity profile is a partition of a fundamental domain:
    /// its total measure is covol(Λ), whatever the region.
    #[test]
    fn profile_total_is_covolume(a in arb_region(), alpha in arb_pos_rat()) {
        let lambda = Lattice::scaled_integers(alpha).unwrap();
        let profile = multiplicity_profile(&a, &lambda).unwrap();
        prop_assert_eq!(profile.total(), lambda.covolume());
    }

    /// Riesz bounds are invariant under permuting the shift tuple.
    #[test]
    fn bounds_ignore_shift_order(seed in 0u64..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, 32, 3);
        let omega = inst.region().unwrap();
        let lambda = inst.lattice().unwrap();
        let shifts = inst.shift_points().unwrap();
        let mut reversed = shifts.clone();
        reversed.reverse();
        let a = riesz_bounds(&omega, &lambda, &shifts).unwrap();
        let b = riesz_bounds(&omega, &lambda, &reversed).unwrap();
        prop_assert!((a.lower - b.lower).abs() <= 1e-12);
        prop_assert!((a.upper - b.upper).abs() <= 1e-12);
    }
}

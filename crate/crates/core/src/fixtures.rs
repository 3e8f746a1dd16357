//! Hand-built space models shared by tests across modules.

use crate::algebra::{Domain, Generator, Poly, RingPresentation};
use crate::conjugation::SpaceModel;
use std::collections::BTreeMap;

/// A point with the trivial involution, carried up to the given degree cap.
pub(crate) fn point(cap: u32) -> SpaceModel {
    let integral = RingPresentation::free(Domain::Int, &[], cap).unwrap();
    let fixed = RingPresentation::free(Domain::Mod2, &[], cap / 2).unwrap();
    SpaceModel::new("point", integral, fixed, Vec::new(), BTreeMap::new(), true).unwrap()
}

/// The sphere S^{2m} with the conjugation action (fixed set S^m): one
/// integral class of degree 2m squaring to zero, one fixed class of degree m
/// with all middle squares zero.  The cap sits well above the dimension —
/// the relation h² makes the presentation exact in all degrees, and group
/// queries are legitimate up to the cap.
pub(crate) fn sphere(two_m: u32) -> SpaceModel {
    assert!(two_m >= 2 && two_m % 2 == 0);
    let m = two_m / 2;
    let cap = 12.max(two_m);
    let integral = RingPresentation::new(
        Domain::Int,
        vec![Generator {
            name: "h".into(),
            degree: two_m,
        }],
        cap,
        vec![vec![2]],
    )
    .unwrap();
    let fixed = RingPresentation::new(
        Domain::Mod2,
        vec![Generator {
            name: "e".into(),
            degree: m,
        }],
        cap / 2,
        vec![vec![2]],
    )
    .unwrap();
    let kappa = vec![Poly::generator(&fixed, 0)];
    let mut declared = BTreeMap::new();
    if m > 2 {
        declared.insert(0usize, (1..m).map(|i| (i, Poly::zero(&fixed))).collect());
    }
    SpaceModel::new(format!("S{}", two_m), integral, fixed, kappa, declared, false).unwrap()
}

pub(crate) fn sphere2() -> SpaceModel {
    sphere(2)
}

/// Complex projective n-space with complex conjugation (fixed set RP^n).
pub(crate) fn cpn(n: u16) -> SpaceModel {
    let integral = RingPresentation::new(
        Domain::Int,
        vec![Generator {
            name: "h".into(),
            degree: 2,
        }],
        2 * n as u32,
        vec![vec![n + 1]],
    )
    .unwrap();
    let fixed = RingPresentation::new(
        Domain::Mod2,
        vec![Generator {
            name: "t".into(),
            degree: 1,
        }],
        n as u32,
        vec![vec![n + 1]],
    )
    .unwrap();
    let kappa = vec![Poly::generator(&fixed, 0)];
    SpaceModel::new(format!("CP{}", n), integral, fixed, kappa, BTreeMap::new(), false).unwrap()
}

/// A truncated classifying-space model with classes c1..cn of degrees
/// 2..2n, capped at `cap`; the fixed side carries w1..wn capped at cap/2.
pub(crate) fn bu(n: u16, cap: u32) -> SpaceModel {
    let int_gens: Vec<(String, u32)> = (1..=n)
        .map(|i| (format!("c{}", i), 2 * i as u32))
        .collect();
    let fixed_gens: Vec<(String, u32)> = (1..=n)
        .map(|i| (format!("w{}", i), i as u32))
        .collect();
    let int_refs: Vec<(&str, u32)> = int_gens.iter().map(|(s, d)| (s.as_str(), *d)).collect();
    let fixed_refs: Vec<(&str, u32)> = fixed_gens.iter().map(|(s, d)| (s.as_str(), *d)).collect();
    let integral = RingPresentation::free(Domain::Int, &int_refs, cap).unwrap();
    let fixed = RingPresentation::free(Domain::Mod2, &fixed_refs, cap / 2).unwrap();
    let kappa = (0..n as usize).map(|i| Poly::generator(&fixed, i)).collect();
    SpaceModel::new(format!("BU{}", n), integral, fixed, kappa, BTreeMap::new(), false).unwrap()
}

pub(crate) fn bu4() -> SpaceModel {
    bu(4, 12)
}

/// A trivial-involution base: one even class s with κ(s̄) = w1, so the fixed
/// ring is a truncated line F2[w1] standing for the space's own mod-2
/// cohomology.
pub(crate) fn kahn_line(cap: u32) -> SpaceModel {
    let integral = RingPresentation::free(Domain::Int, &[("s", 2)], cap).unwrap();
    let fixed = RingPresentation::free(Domain::Mod2, &[("w1", 1)], cap / 2).unwrap();
    let kappa = vec![Poly::generator(&fixed, 0)];
    SpaceModel::new("kahn_line", integral, fixed, kappa, BTreeMap::new(), true).unwrap()
}

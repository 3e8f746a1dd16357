//! Twisted-coefficient Borel cohomology of spaces with even-cell conjugation
//! models, and the bigraded algebra of classes in its tensor coordinates.
//!
//! Groups: the spectral sequence for the Borel fibration degenerates and the
//! twisted groups assemble degreewise from the Betti numbers, with the twist
//! of a contribution shifted by half the cell degree.  Classes: the algebra
//! is Z[a]/(2a) ⊗ H*(X;Z) via r ⊗ x ↦ r·σ̃(x), so an element is one integral
//! component (the a⁰ part) plus mod-2 components for each positive a-power.
//! The class a has degree 2; a component piece of cell degree 2m carries
//! bidegree (2m + 2k, m mod 2) at a-power k.

use crate::algebra::{reduce_mod2, IntPoly, Mod2Poly, Poly};
use crate::conjugation::{SpaceModel, UPoly};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum EquivError {
    #[error("degree {degree} exceeds the model truncation {cap}")]
    DegreeOverflow { degree: u32, cap: u32 },
    #[error("classes live over different spaces")]
    SpaceMismatch,
    #[error("class does not belong to the space's {0} ring")]
    ForeignClass(&'static str),
    #[error("odd power u^{0} present: not in the twisted even algebra")]
    OddUPower(u32),
    #[error("no integral lift: u^0-coefficient is {got}, mod-2 reduction is {want}")]
    IncompatiblePair { got: String, want: String },
}

/// The shape of one twisted equivariant cohomology group: a free part and a
/// number of order-two summands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwistedGroup {
    pub free_rank: usize,
    pub two_torsion: usize,
}

impl TwistedGroup {
    pub fn trivial() -> TwistedGroup {
        TwistedGroup {
            free_rank: 0,
            two_torsion: 0,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.two_torsion == 0
    }
}

impl fmt::Display for TwistedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{}", r)),
        }
        match self.two_torsion {
            0 => {}
            1 => parts.push("Z/2".to_string()),
            t => parts.push(format!("(Z/2)^{}", t)),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// H^k of the Borel construction with coefficients twisted by `eps`,
/// assembled degreewise: the even cell degree q = 2m contributes its Betti
/// number b_q at column p = k − q with effective twist (eps + m) mod 2 —
/// a free summand at p = 0 when untwisted, two-torsion at even p > 0 when
/// untwisted and at odd p when twisted.
pub fn twisted_group(space: &SpaceModel, k: u32, eps: u8) -> Result<TwistedGroup, EquivError> {
    if k > space.degree_cap() {
        return Err(EquivError::DegreeOverflow {
            degree: k,
            cap: space.degree_cap(),
        });
    }
    let mut group = TwistedGroup::trivial();
    let mut q = 0;
    while q <= k {
        let m = q / 2;
        let b = space.betti(q);
        let p = k - q;
        let twisted = (u32::from(eps) + m) % 2 == 1;
        if p == 0 {
            if !twisted {
                group.free_rank += b;
            }
        } else if p % 2 == 0 {
            if !twisted {
                group.two_torsion += b;
            }
        } else if twisted {
            group.two_torsion += b;
        }
        q += 2;
    }
    Ok(group)
}

/// An element of the twisted equivariant algebra in tensor coordinates:
/// a-power 0 carries an integral class, each a-power k ≥ 1 a mod-2 class
/// (2a = 0 kills integral information there).
#[derive(Clone, Debug)]
pub struct EquivClass {
    space: Arc<SpaceModel>,
    integral: IntPoly,
    torsion: BTreeMap<u32, Mod2Poly>,
}

impl PartialEq for EquivClass {
    fn eq(&self, other: &EquivClass) -> bool {
        Arc::ptr_eq(&self.space, &other.space)
            && self.integral == other.integral
            && self.torsion == other.torsion
    }
}

impl Eq for EquivClass {}

impl EquivClass {
    pub fn zero(space: &Arc<SpaceModel>) -> EquivClass {
        EquivClass {
            space: space.clone(),
            integral: Poly::zero(space.integral_ring()),
            torsion: BTreeMap::new(),
        }
    }

    /// The canonical integral section σ̃ applied to an integral class.
    pub fn sigma_tilde(space: &Arc<SpaceModel>, x: &IntPoly) -> Result<EquivClass, EquivError> {
        if x.ring() != space.integral_ring() {
            return Err(EquivError::ForeignClass("integral"));
        }
        let mut z = EquivClass::zero(space);
        z.integral = x.clone();
        Ok(z)
    }

    /// The degree-2 torsion class a (the Euler class of the twist).
    pub fn a_class(space: &Arc<SpaceModel>) -> EquivClass {
        let mut z = EquivClass::zero(space);
        z.set_component(1, Poly::one(space.mod2_ring()));
        z
    }

    pub fn space(&self) -> &Arc<SpaceModel> {
        &self.space
    }

    /// Insert one a-power component, truncating pieces whose total degree
    /// 2k + deg exceeds the model cap.
    pub fn set_component(&mut self, k: u32, value: Mod2Poly) {
        assert!(k >= 1, "component 0 is the integral part");
        let cap = self.space.degree_cap();
        if 2 * k > cap {
            return;
        }
        let kept = value.truncate_above(cap - 2 * k);
        if kept.is_zero() {
            self.torsion.remove(&k);
        } else {
            self.torsion.insert(k, kept);
        }
    }

    pub fn component(&self, k: u32) -> Mod2Poly {
        self.torsion
            .get(&k)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.space.mod2_ring()))
    }

    pub fn a_powers(&self) -> impl Iterator<Item = (&u32, &Mod2Poly)> {
        self.torsion.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.integral.is_zero() && self.torsion.is_empty()
    }

    /// The image under the forgetful map to ordinary integral cohomology:
    /// all positive a-powers die on the fiber.
    pub fn forget(&self) -> IntPoly {
        self.integral.clone()
    }

    fn check_space(&self, other: &EquivClass) -> Result<(), EquivError> {
        if Arc::ptr_eq(&self.space, &other.space) {
            Ok(())
        } else {
            Err(EquivError::SpaceMismatch)
        }
    }

    pub fn add_ref(&self, other: &EquivClass) -> Result<EquivClass, EquivError> {
        self.check_space(other)?;
        let mut out = self.clone();
        out.integral = out.integral.add_ref(&other.integral);
        for (k, c) in &other.torsion {
            let sum = out.component(*k).add_ref(c);
            out.set_component(*k, sum);
        }
        Ok(out)
    }

    pub fn neg(&self) -> EquivClass {
        let mut out = self.clone();
        out.integral = out.integral.neg();
        out
    }

    /// Product in the tensor coordinates: a-powers add, and any product
    /// touching a positive a-power happens mod 2.
    pub fn mul_ref(&self, other: &EquivClass) -> Result<EquivClass, EquivError> {
        self.check_space(other)?;
        let mod2 = self.space.mod2_ring();
        let red = |p: &IntPoly| reduce_mod2(p, mod2);
        let mut out = EquivClass::zero(&self.space);
        out.integral = self.integral.mul_ref(&other.integral);
        let self_red = red(&self.integral);
        let other_red = red(&other.integral);
        for (k, c) in &other.torsion {
            if !self_red.is_zero() {
                let sum = out.component(*k).add_ref(&self_red.mul_ref(c));
                out.set_component(*k, sum);
            }
        }
        for (j, c) in &self.torsion {
            if !other_red.is_zero() {
                let sum = out.component(*j).add_ref(&c.mul_ref(&other_red));
                out.set_component(*j, sum);
            }
            for (k, d) in &other.torsion {
                let sum = out.component(j + k).add_ref(&c.mul_ref(d));
                out.set_component(j + k, sum);
            }
        }
        Ok(out)
    }

    /// Reduction to the mod-2 Borel ring H*(X;F₂)[u]: a becomes u² and the
    /// integral part reduces mod 2.
    pub fn reduce_equiv_mod2(&self) -> UPoly {
        let mod2 = self.space.mod2_ring();
        let mut out = UPoly::term(&reduce_mod2(&self.integral, mod2), 0, self.space.degree_cap());
        for (k, c) in &self.torsion {
            out = out.add_ref(&UPoly::term(c, 2 * k, self.space.degree_cap()));
        }
        out
    }

    /// Rebuild the unique class with the given forgetful image and mod-2
    /// reduction; the pair must be compatible and the reduction must live in
    /// even u-powers.
    pub fn integral_lift(
        space: &Arc<SpaceModel>,
        x: &IntPoly,
        y: &UPoly,
    ) -> Result<EquivClass, EquivError> {
        if x.ring() != space.integral_ring() {
            return Err(EquivError::ForeignClass("integral"));
        }
        if y.ring() != space.mod2_ring() {
            return Err(EquivError::ForeignClass("mod-2"));
        }
        let reduced = reduce_mod2(x, space.mod2_ring());
        if y.coefficient(0) != reduced {
            return Err(EquivError::IncompatiblePair {
                got: y.coefficient(0).to_string(),
                want: reduced.to_string(),
            });
        }
        let mut z = EquivClass::zero(space);
        z.integral = x.clone();
        for (p, c) in y.u_powers() {
            if *p == 0 {
                continue;
            }
            if *p % 2 == 1 {
                return Err(EquivError::OddUPower(*p));
            }
            z.set_component(*p / 2, z.component(*p / 2).add_ref(c));
        }
        Ok(z)
    }

    /// Restriction to the fixed-point ring with u adjoined: the integral
    /// part goes through the section formula after mod-2 reduction, and each
    /// a-power contributes a factor u².
    pub fn restrict_fixed(&self) -> Result<UPoly, crate::conjugation::ConjugationError> {
        let mod2 = self.space.mod2_ring();
        let mut out = self
            .space
            .restrict_section(&reduce_mod2(&self.integral, mod2))?;
        for (k, c) in &self.torsion {
            out = out.add_ref(&self.space.restrict_section(c)?.shift(2 * k));
        }
        Ok(out)
    }

    /// `Some((degree, twist))` when every piece sits in one bidegree.
    pub fn bidegree(&self) -> Option<(u32, u8)> {
        let mut seen: Option<(u32, u32)> = None;
        let mut absorb = |degree: u32, twist: u32| -> bool {
            match seen {
                None => {
                    seen = Some((degree, twist));
                    true
                }
                Some(s) => s == (degree, twist),
            }
        };
        for d in self.integral.support_degrees() {
            if !absorb(d, (d / 2) % 2) {
                return None;
            }
        }
        for (k, c) in &self.torsion {
            for d in c.support_degrees() {
                if !absorb(d + 2 * k, (d / 2) % 2) {
                    return None;
                }
            }
        }
        seen.map(|(d, t)| (d, t as u8))
    }
}

impl fmt::Display for EquivClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if !self.integral.is_zero() {
            parts.push(format!("a^0: {}", self.integral));
        }
        for (k, c) in &self.torsion {
            parts.push(format!("a^{}: {}", k, c));
        }
        write!(f, "{{{}}}", parts.join("; "))
    }
}

/// One degree/twist line of the reconciliation between the spectral-sequence
/// group and the count of tensor-coordinate monomials.
#[derive(Clone, Debug)]
pub struct RankRow {
    pub degree: u32,
    pub twist: u8,
    pub group: TwistedGroup,
    pub monomial_free: usize,
    pub monomial_torsion: usize,
}

impl RankRow {
    pub fn matched(&self) -> bool {
        self.group.free_rank == self.monomial_free
            && self.group.two_torsion == self.monomial_torsion
    }
}

#[derive(Clone, Debug)]
pub struct RankReport {
    pub rows: Vec<RankRow>,
}

impl RankReport {
    pub fn mismatches(&self) -> usize {
        self.rows.iter().filter(|r| !r.matched()).count()
    }
}

/// Compare, for every degree k ≤ up_to and both twists, the assembled group
/// with the monomial count in the tensor coordinates: in even total degree
/// the free part is spanned by plain basis monomials of that degree and the
/// torsion by a^j (j ≥ 1) times lower basis monomials of matching twist; in
/// odd total degree everything is torsion spanned by the odd-degree
/// generator of the point algebra times a-powers times basis monomials of
/// the opposite twist.
pub fn rank_reconciliation(space: &SpaceModel, up_to: u32) -> Result<RankReport, EquivError> {
    if up_to > space.degree_cap() {
        return Err(EquivError::DegreeOverflow {
            degree: up_to,
            cap: space.degree_cap(),
        });
    }
    let mut rows = Vec::new();
    for k in 0..=up_to {
        for twist in [0u8, 1u8] {
            let group = twisted_group(space, k, twist)?;
            let mut monomial_free = 0;
            let mut monomial_torsion = 0;
            if k % 2 == 0 {
                if (k / 2) % 2 == u32::from(twist) {
                    monomial_free = space.betti(k);
                }
                let mut two_m = 0;
                while two_m + 2 <= k {
                    if (two_m / 2) % 2 == u32::from(twist) {
                        monomial_torsion += space.betti(two_m);
                    }
                    two_m += 2;
                }
            } else {
                let mut two_m = 0;
                while two_m + 1 <= k {
                    if (two_m / 2) % 2 != u32::from(twist) {
                        monomial_torsion += space.betti(two_m);
                    }
                    two_m += 2;
                }
            }
            rows.push(RankRow {
                degree: k,
                twist,
                group,
                monomial_free,
                monomial_torsion,
            });
        }
    }
    Ok(RankReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, OverflowPolicy};
    use crate::fixtures::{bu, bu4, cpn, point, sphere, sphere2};
    use proptest::prelude::*;

    fn arc(s: SpaceModel) -> Arc<SpaceModel> {
        Arc::new(s)
    }

    fn ip(text: &str, s: &Arc<SpaceModel>) -> IntPoly {
        parse_poly(text, s.integral_ring(), OverflowPolicy::Error).unwrap()
    }

    #[test]
    fn sphere_groups_match_the_known_values() {
        let s2 = sphere2();
        let expect = |k: u32, f: usize, t: usize| {
            assert_eq!(
                twisted_group(&s2, k, 0).unwrap(),
                TwistedGroup {
                    free_rank: f,
                    two_torsion: t
                },
                "degree {}",
                k
            );
        };
        expect(0, 1, 0);
        expect(1, 0, 0);
        expect(2, 0, 1);

        let s4 = sphere(4);
        let g4 = twisted_group(&s4, 4, 0).unwrap();
        assert_eq!(
            g4,
            TwistedGroup {
                free_rank: 1,
                two_torsion: 1
            }
        );
        assert_eq!(g4.to_string(), "Z + Z/2");
    }

    #[test]
    fn odd_degree_groups_come_from_the_twisted_column() {
        let s2 = sphere2();
        assert_eq!(
            twisted_group(&s2, 3, 0).unwrap(),
            TwistedGroup {
                free_rank: 0,
                two_torsion: 1
            }
        );
        // In the twisted theory the degree-3 torsion comes from the bottom
        // cell instead (the degree-2 cell shifts its twist by one).
        assert_eq!(twisted_group(&s2, 3, 1).unwrap().two_torsion, 1);
        assert_eq!(twisted_group(&s2, 1, 1).unwrap().two_torsion, 1);
    }

    #[test]
    fn point_groups_alternate_between_twists() {
        let p = point(12);
        for k in 0..=12u32 {
            let untwisted = twisted_group(&p, k, 0).unwrap();
            let twisted = twisted_group(&p, k, 1).unwrap();
            if k == 0 {
                assert_eq!(untwisted.to_string(), "Z");
                assert!(twisted.is_trivial());
            } else if k % 2 == 0 {
                assert_eq!(untwisted.to_string(), "Z/2");
                assert!(twisted.is_trivial());
            } else {
                assert!(untwisted.is_trivial());
                assert_eq!(twisted.to_string(), "Z/2");
            }
        }
    }

    #[test]
    fn group_queries_beyond_the_cap_are_rejected() {
        let s2 = sphere2();
        assert!(matches!(
            twisted_group(&s2, 3, 0),
            Ok(TwistedGroup { .. })
        ));
        assert!(matches!(
            twisted_group(&s2, 99, 0),
            Err(EquivError::DegreeOverflow { degree: 99, .. })
        ));
    }

    #[test]
    fn reconciliation_is_clean_on_all_fixture_models() {
        for model in [sphere2(), sphere(4), cpn(4), bu4(), point(12)] {
            let report = rank_reconciliation(&model, model.degree_cap()).unwrap();
            assert_eq!(report.mismatches(), 0, "model {}", model.name());
            // Two rows per degree, both twists.
            assert_eq!(
                report.rows.len() as u32,
                2 * (model.degree_cap() + 1),
                "model {}",
                model.name()
            );
        }
    }

    #[test]
    fn reconciliation_counts_the_classifying_model_by_hand() {
        // Degree 4, twist 0 on the BU truncation: free from c2 and c1^2,
        // torsion from a^2 alone (a ⊗ c1 has twist 1).
        let model = bu(4, 8);
        let report = rank_reconciliation(&model, 8).unwrap();
        let row = report
            .rows
            .iter()
            .find(|r| r.degree == 4 && r.twist == 0)
            .unwrap();
        assert_eq!(row.monomial_free, 2);
        assert_eq!(row.monomial_torsion, 1);
        assert!(row.matched());
        let row = report
            .rows
            .iter()
            .find(|r| r.degree == 4 && r.twist == 1)
            .unwrap();
        assert_eq!(row.monomial_free, 0);
        assert_eq!(row.monomial_torsion, 1, "a abs c1");
        assert!(row.matched());
    }

    #[test]
    fn section_and_forgetful_laws() {
        let s = arc(cpn(3));
        let x = ip("h + 2*h^2", &s);
        let z = EquivClass::sigma_tilde(&s, &x).unwrap();
        assert_eq!(z.forget(), x);
        assert_eq!(EquivClass::a_class(&s).forget().to_string(), "0");
    }

    #[test]
    fn products_collect_a_powers_and_reduce_mod_two() {
        let s = arc(bu4());
        let a = EquivClass::a_class(&s);
        let a2 = a.mul_ref(&a).unwrap();
        assert_eq!(a2.component(2).to_string(), "1");
        assert!(a2.forget().is_zero());

        let c1 = EquivClass::sigma_tilde(&s, &ip("c1", &s)).unwrap();
        let two_c1 = EquivClass::sigma_tilde(&s, &ip("2*c1", &s)).unwrap();
        // 2·c1 times a dies: the torsion components live mod 2.
        let prod = two_c1.mul_ref(&a).unwrap();
        assert!(prod.component(1).is_zero());
        assert_eq!(prod.forget().to_string(), "0");
        // σ̃ is multiplicative in these coordinates by definition.
        let sq = c1.mul_ref(&c1).unwrap();
        assert_eq!(sq.forget(), ip("c1^2", &s));
        assert!(sq.a_powers().next().is_none());
    }

    #[test]
    fn display_uses_tensor_coordinates() {
        let s = arc(sphere2());
        let z = EquivClass::sigma_tilde(&s, &ip("h", &s))
            .unwrap()
            .add_ref(&EquivClass::a_class(&s))
            .unwrap();
        assert_eq!(z.to_string(), "{a^0: h; a^1: 1}");
        assert_eq!(EquivClass::zero(&s).to_string(), "0");
    }

    #[test]
    fn bidegrees_follow_the_bookkeeping() {
        let s = arc(bu4());
        let c2 = EquivClass::sigma_tilde(&s, &ip("c2", &s)).unwrap();
        assert_eq!(c2.bidegree(), Some((4, 0)));
        let a = EquivClass::a_class(&s);
        assert_eq!(a.bidegree(), Some((2, 0)));
        // a·σ̃(c1): degree 4, twist from the cell part only.
        let mixed = a.mul_ref(&EquivClass::sigma_tilde(&s, &ip("c1", &s)).unwrap()).unwrap();
        assert_eq!(mixed.bidegree(), Some((4, 1)));
        let sum = c2.add_ref(&a).unwrap();
        assert_eq!(sum.bidegree(), None);
    }

    #[test]
    fn reduction_sends_a_to_u_squared() {
        let s = arc(sphere2());
        let a = EquivClass::a_class(&s);
        assert_eq!(a.reduce_equiv_mod2().to_string(), "u^2");
        let z = EquivClass::sigma_tilde(&s, &ip("h", &s)).unwrap();
        assert_eq!(z.reduce_equiv_mod2().to_string(), "h");
        let two = EquivClass::sigma_tilde(&s, &ip("2*h", &s)).unwrap();
        assert!(two.reduce_equiv_mod2().is_zero());
    }

    #[test]
    fn restriction_extends_the_section_formula_with_u_squared() {
        let s = arc(sphere2());
        let a = EquivClass::a_class(&s);
        assert_eq!(a.restrict_fixed().unwrap().to_string(), "u^2");
        let h = EquivClass::sigma_tilde(&s, &ip("h", &s)).unwrap();
        assert_eq!(h.restrict_fixed().unwrap().to_string(), "e*u");
        let mixed = h.add_ref(&a).unwrap();
        assert_eq!(mixed.restrict_fixed().unwrap().to_string(), "u^2 + e*u");
        // Ring map: r̄(a·σ̃(h)) = u²·e·u.
        let prod = a.mul_ref(&h).unwrap();
        assert_eq!(prod.restrict_fixed().unwrap().to_string(), "e*u^3");
    }

    #[test]
    fn integral_lift_inverts_the_pair_of_reductions() {
        let s = arc(bu4());
        let a = EquivClass::a_class(&s);
        let z = EquivClass::sigma_tilde(&s, &ip("c1 + 3*c2", &s))
            .unwrap()
            .add_ref(&a.mul_ref(&a).unwrap())
            .unwrap();
        let lifted =
            EquivClass::integral_lift(&s, &z.forget(), &z.reduce_equiv_mod2()).unwrap();
        assert_eq!(lifted, z);
    }

    #[test]
    fn integral_lift_rejects_bad_pairs() {
        let s = arc(sphere2());
        let x = ip("h", &s);
        let zero_u = UPoly::zero(s.mod2_ring(), 2);
        let err = EquivClass::integral_lift(&s, &x, &zero_u).unwrap_err();
        assert!(matches!(err, EquivError::IncompatiblePair { .. }));

        let odd = UPoly::term(&Poly::one(s.mod2_ring()), 1, 2)
            .add_ref(&UPoly::term(&reduce_mod2(&x, s.mod2_ring()), 0, 2));
        let err = EquivClass::integral_lift(&s, &x, &odd).unwrap_err();
        assert!(matches!(err, EquivError::OddUPower(1)));
    }

    fn arb_class(s: Arc<SpaceModel>) -> impl Strategy<Value = EquivClass> {
        let cap = s.degree_cap();
        let int_basis: Vec<_> = (0..=cap)
            .flat_map(|d| s.integral_ring().monomial_basis(d))
            .collect();
        let n = int_basis.len();
        let max_k = cap / 2;
        (
            proptest::collection::vec(-3i64..=3, n),
            proptest::collection::vec(proptest::bits::u64::ANY, max_k as usize),
        )
            .prop_map(move |(coeffs, masks)| {
                let mut z = EquivClass::zero(&s);
                let mut x = Poly::zero(s.integral_ring());
                for (mono, c) in int_basis.iter().zip(&coeffs) {
                    if *c != 0 {
                        let term = Poly::monomial(s.integral_ring(), mono.clone())
                            .mul_ref(&Poly::constant(s.integral_ring(), (*c).into()));
                        x = x.add_ref(&term);
                    }
                }
                z.integral = x;
                for (k0, mask) in masks.iter().enumerate() {
                    let k = k0 as u32 + 1;
                    if 2 * k > cap {
                        break;
                    }
                    let basis: Vec<_> = (0..=(cap - 2 * k))
                        .flat_map(|d| s.mod2_ring().monomial_basis(d))
                        .collect();
                    let mut c = Poly::zero(s.mod2_ring());
                    for (i, mono) in basis.iter().enumerate() {
                        if mask >> (i % 64) & 1 == 1 && i % 3 == k0 % 3 {
                            c = c.add_ref(&Poly::monomial(s.mod2_ring(), mono.clone()));
                        }
                    }
                    z.set_component(k, c);
                }
                z
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn forget_and_reduce_are_ring_maps(
            (z1, z2) in Just(Arc::new(cpn(4))).prop_flat_map(|s| {
                (arb_class(s.clone()), arb_class(s))
            })
        ) {
            let prod = z1.mul_ref(&z2).unwrap();
            prop_assert_eq!(prod.forget(), z1.forget().mul_ref(&z2.forget()));
            prop_assert_eq!(
                prod.reduce_equiv_mod2(),
                z1.reduce_equiv_mod2().mul_ref(&z2.reduce_equiv_mod2())
            );
            let sum = z1.add_ref(&z2).unwrap();
            prop_assert_eq!(sum.forget(), z1.forget().add_ref(&z2.forget()));
            prop_assert_eq!(
                sum.reduce_equiv_mod2(),
                z1.reduce_equiv_mod2().add_ref(&z2.reduce_equiv_mod2())
            );
        }

        #[test]
        fn lift_of_the_two_reductions_is_the_identity(
            z in Just(Arc::new(bu(3, 10))).prop_flat_map(arb_class)
        ) {
            let lifted = EquivClass::integral_lift(
                z.space(),
                &z.forget(),
                &z.reduce_equiv_mod2(),
            ).unwrap();
            prop_assert_eq!(lifted, z);
        }
    }
}

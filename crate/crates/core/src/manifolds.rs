//! Closed-manifold models over conjugation spaces: Wu classes, the
//! fundamental-class pairing, Stiefel–Whitney numbers, and the transfer of
//! both along κ between a 2n-manifold M and its n-dimensional fixed set N.
//!
//! A model designates the total Stiefel–Whitney class on each side and the
//! top-degree monomial that evaluates to 1 against the fundamental class.
//! Wu classes are recovered from Sq(v) = w; `wu_duality_check` then verifies
//! the defining pairing ⟨v_k ∪ x⟩ = ⟨Sq^k(x)⟩ independently, and
//! `kappa_transfer_check` the identities κ(w^M_{2k}) = w^N_k and
//! κ(v^M_{2k}) = v^N_k.

use crate::algebra::{Coefficient, Mod2Poly, Monomial, Poly};
use crate::conjugation::{embedding_images, ConjugationError, SpaceModel};
use crate::report::CheckResult;
use crate::steenrod::{invert_total_sq, SteenrodError};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum ManifoldError {
    #[error("manifold dimension must be even, got {0}")]
    OddDimension(u32),
    #[error("dimension {dim} exceeds the {side} truncation {cap}")]
    DimensionBeyondCap { side: Side, dim: u32, cap: u32 },
    #[error("{part} must live in the space's {ring} ring")]
    ForeignPart { part: &'static str, ring: &'static str },
    #[error("{part} must have constant term 1")]
    ConstantTermNotOne { part: &'static str },
    #[error("side {side} has rank {rank} in top degree {degree}, expected 1")]
    TopRankNotOne { side: Side, degree: u32, rank: usize },
    #[error("the {side} fundamental monomial must be the top-degree basis monomial")]
    WrongFundamental { side: Side },
    #[error("dimensions differ: {0} vs {1}")]
    DimensionMismatch(u32, u32),
    #[error(transparent)]
    Conjugation(#[from] ConjugationError),
    #[error(transparent)]
    Steenrod(#[from] SteenrodError),
}

/// Which side of a conjugation manifold: the ambient M or its fixed set N.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    M,
    N,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::M => write!(f, "M"),
            Side::N => write!(f, "N"),
        }
    }
}

/// Stiefel–Whitney numbers: one bit per partition of the dimension, keyed
/// by the partition with non-increasing parts.
pub type SWNumbers = BTreeMap<Vec<u32>, bool>;

/// Render a partition as the monomial it indexes: [2,2,1] -> "w2^2*w1".
pub fn partition_label(partition: &[u32]) -> String {
    if partition.is_empty() {
        return "1".to_string();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < partition.len() {
        let p = partition[i];
        let count = partition[i..].iter().take_while(|q| **q == p).count();
        if count == 1 {
            parts.push(format!("w{}", p));
        } else {
            parts.push(format!("w{}^{}", p, count));
        }
        i += count;
    }
    parts.join("*")
}

#[derive(Clone, Debug)]
pub struct ManifoldModel {
    name: String,
    space: Arc<SpaceModel>,
    dimension: u32,
    total_sw: Mod2Poly,
    fixed_total_sw: Mod2Poly,
    fundamental: Monomial,
    fixed_fundamental: Monomial,
}

impl ManifoldModel {
    pub fn new(
        name: impl Into<String>,
        space: &Arc<SpaceModel>,
        dimension: u32,
        total_sw: Mod2Poly,
        fixed_total_sw: Mod2Poly,
        fundamental: Monomial,
        fixed_fundamental: Monomial,
    ) -> Result<ManifoldModel, ManifoldError> {
        if dimension % 2 != 0 {
            return Err(ManifoldError::OddDimension(dimension));
        }
        if dimension > space.degree_cap() {
            return Err(ManifoldError::DimensionBeyondCap {
                side: Side::M,
                dim: dimension,
                cap: space.degree_cap(),
            });
        }
        if dimension / 2 > space.fixed_ring().truncation() {
            return Err(ManifoldError::DimensionBeyondCap {
                side: Side::N,
                dim: dimension / 2,
                cap: space.fixed_ring().truncation(),
            });
        }
        if total_sw.ring() != space.mod2_ring() {
            return Err(ManifoldError::ForeignPart {
                part: "total_sw",
                ring: "mod-2",
            });
        }
        if fixed_total_sw.ring() != space.fixed_ring() {
            return Err(ManifoldError::ForeignPart {
                part: "fixed_total_sw",
                ring: "fixed",
            });
        }
        if total_sw.homogeneous_part(0) != Poly::one(space.mod2_ring()) {
            return Err(ManifoldError::ConstantTermNotOne { part: "total_sw" });
        }
        if fixed_total_sw.homogeneous_part(0) != Poly::one(space.fixed_ring()) {
            return Err(ManifoldError::ConstantTermNotOne {
                part: "fixed_total_sw",
            });
        }
        for (side, ring, degree, fund) in [
            (Side::M, space.mod2_ring(), dimension, &fundamental),
            (
                Side::N,
                space.fixed_ring(),
                dimension / 2,
                &fixed_fundamental,
            ),
        ] {
            let basis = ring.monomial_basis(degree);
            if basis.len() != 1 {
                return Err(ManifoldError::TopRankNotOne {
                    side,
                    degree,
                    rank: basis.len(),
                });
            }
            if basis[0] != *fund {
                return Err(ManifoldError::WrongFundamental { side });
            }
        }
        Ok(ManifoldModel {
            name: name.into(),
            space: space.clone(),
            dimension,
            total_sw,
            fixed_total_sw,
            fundamental,
            fixed_fundamental,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &Arc<SpaceModel> {
        &self.space
    }

    /// Dimension of the chosen side (M carries 2n, N carries n).
    pub fn dimension(&self, side: Side) -> u32 {
        match side {
            Side::M => self.dimension,
            Side::N => self.dimension / 2,
        }
    }

    pub fn total_sw(&self, side: Side) -> &Mod2Poly {
        match side {
            Side::M => &self.total_sw,
            Side::N => &self.fixed_total_sw,
        }
    }

    fn sq_action(&self, side: Side) -> Result<&crate::steenrod::SqAction, ConjugationError> {
        match side {
            Side::M => self.space.even_sq(),
            Side::N => self.space.fixed_sq(),
        }
    }

    /// ⟨x⟩: the coefficient of the designated top monomial.
    pub fn eval(&self, side: Side, x: &Mod2Poly) -> bool {
        let fund = match side {
            Side::M => &self.fundamental,
            Side::N => &self.fixed_fundamental,
        };
        !x.coefficient(fund).is_zero()
    }

    /// The total Wu class of the chosen side, from Sq(v) = w.
    pub fn wu_classes(&self, side: Side) -> Result<Mod2Poly, ManifoldError> {
        let action = self.sq_action(side)?;
        Ok(invert_total_sq(action, self.total_sw(side))?)
    }

    /// Check the defining property of the Wu class against the pairing:
    /// ⟨v_k ∪ x⟩ = ⟨Sq^k(x)⟩ for every basis monomial of complementary
    /// degree.
    pub fn wu_duality_check(&self, side: Side) -> Result<CheckResult, ManifoldError> {
        let dim = self.dimension(side);
        let ring = self.total_sw(side).ring().clone();
        let action = self.sq_action(side)?;
        let v = self.wu_classes(side)?;
        let mut failures = Vec::new();
        let mut checked = 0;
        for k in 0..=dim {
            let v_k = v.homogeneous_part(k);
            for mono in ring.monomial_basis(dim - k) {
                let x = Poly::monomial(&ring, mono.clone());
                let lhs = self.eval(side, &v_k.mul_ref(&x));
                let rhs = self.eval(side, &action.sq(k, &x));
                checked += 1;
                if lhs != rhs {
                    failures.push(format!("k={} x={}", k, mono.display(&ring)));
                }
            }
        }
        let subject = format!("{}/{}", self.name, side);
        Ok(if failures.is_empty() {
            CheckResult::pass(
                "wu-duality",
                subject,
                format!("{} pairings in dimension {}", checked, dim),
            )
        } else {
            CheckResult::fail("wu-duality", subject, failures.join("; "))
        })
    }

    /// The Stiefel–Whitney and Wu transfer along κ: κ(w^M_{2k}) = w^N_k and
    /// κ(v^M_{2k}) = v^N_k, reported per k.
    pub fn kappa_transfer_check(&self) -> Result<Vec<CheckResult>, ManifoldError> {
        let n = self.dimension / 2;
        let v_m = self.wu_classes(Side::M)?;
        let v_n = self.wu_classes(Side::N)?;
        let mut out = Vec::new();
        for k in 0..=n {
            let w_pair = (
                self.space.kappa_apply(&self.total_sw.homogeneous_part(2 * k))?,
                self.fixed_total_sw.homogeneous_part(k),
            );
            let v_pair = (
                self.space.kappa_apply(&v_m.homogeneous_part(2 * k))?,
                v_n.homogeneous_part(k),
            );
            let mut failures = Vec::new();
            if w_pair.0 != w_pair.1 {
                failures.push(format!(
                    "kappa(w_{}) = {} but fixed side has {}",
                    2 * k,
                    w_pair.0,
                    w_pair.1
                ));
            }
            if v_pair.0 != v_pair.1 {
                failures.push(format!(
                    "kappa(v_{}) = {} but fixed side has {}",
                    2 * k,
                    v_pair.0,
                    v_pair.1
                ));
            }
            let subject = format!("{} k={}", self.name, k);
            out.push(if failures.is_empty() {
                CheckResult::pass("kappa-transfer", subject, "w and v agree")
            } else {
                CheckResult::fail("kappa-transfer", subject, failures.join("; "))
            });
        }
        Ok(out)
    }

    /// All Stiefel–Whitney numbers of the chosen side, one per partition of
    /// its dimension.
    pub fn sw_numbers(&self, side: Side) -> SWNumbers {
        let dim = self.dimension(side);
        let w = self.total_sw(side);
        let ring = w.ring().clone();
        let mut numbers = SWNumbers::new();
        for partition in partitions(dim) {
            let product = partition.iter().fold(Poly::one(&ring), |acc, part| {
                acc.mul_ref(&w.homogeneous_part(*part))
            });
            numbers.insert(partition, self.eval(side, &product));
        }
        numbers
    }

    /// Compare the characteristic numbers of two models on both sides; by
    /// the transfer theorem the two comparisons must agree.
    pub fn cobordism_compare(
        &self,
        other: &ManifoldModel,
    ) -> Result<CobordismReport, ManifoldError> {
        if self.dimension != other.dimension {
            return Err(ManifoldError::DimensionMismatch(
                self.dimension,
                other.dimension,
            ));
        }
        let mut report = CobordismReport {
            m_equal: true,
            n_equal: true,
            differing: Vec::new(),
        };
        for side in [Side::M, Side::N] {
            let a = self.sw_numbers(side);
            let b = other.sw_numbers(side);
            for (partition, bit) in &a {
                if b.get(partition) != Some(bit) {
                    match side {
                        Side::M => report.m_equal = false,
                        Side::N => report.n_equal = false,
                    }
                    report
                        .differing
                        .push(format!("{}[{}]", partition_label(partition), side));
                }
            }
        }
        Ok(report)
    }

    /// Product model: tensored space, added dimensions, multiplied total
    /// classes, concatenated fundamental monomials.
    pub fn product(
        name: impl Into<String>,
        left: &ManifoldModel,
        right: &ManifoldModel,
    ) -> Result<ManifoldModel, ManifoldError> {
        let space = Arc::new(SpaceModel::product(
            format!("{}x{}", left.space.name(), right.space.name()),
            &left.space,
            &right.space,
        )?);
        let embed = |p: &Mod2Poly, side: Side, from_left: bool| -> Mod2Poly {
            let (ring, offset) = match (side, from_left) {
                (Side::M, true) => (space.mod2_ring(), 0),
                (Side::M, false) => (
                    space.mod2_ring(),
                    left.space.mod2_ring().generators().len(),
                ),
                (Side::N, true) => (space.fixed_ring(), 0),
                (Side::N, false) => (
                    space.fixed_ring(),
                    left.space.fixed_ring().generators().len(),
                ),
            };
            p.substitute(ring, &embedding_images(p.ring(), ring, offset))
        };
        let total_sw = embed(&left.total_sw, Side::M, true)
            .mul_ref(&embed(&right.total_sw, Side::M, false));
        let fixed_total_sw = embed(&left.fixed_total_sw, Side::N, true)
            .mul_ref(&embed(&right.fixed_total_sw, Side::N, false));
        let fundamental = Monomial::from_exps(
            space.mod2_ring(),
            left.fundamental
                .exps()
                .iter()
                .chain(right.fundamental.exps())
                .copied()
                .collect(),
        );
        let fixed_fundamental = Monomial::from_exps(
            space.fixed_ring(),
            left.fixed_fundamental
                .exps()
                .iter()
                .chain(right.fixed_fundamental.exps())
                .copied()
                .collect(),
        );
        ManifoldModel::new(
            name,
            &space,
            left.dimension + right.dimension,
            total_sw,
            fixed_total_sw,
            fundamental,
            fixed_fundamental,
        )
    }
}

#[derive(Clone, Debug)]
pub struct CobordismReport {
    pub m_equal: bool,
    pub n_equal: bool,
    /// Labels of numbers that differ, tagged with the side.
    pub differing: Vec<String>,
}

impl CobordismReport {
    /// The transfer theorem demands the two sides agree on cobordance.
    pub fn consistent(&self) -> bool {
        self.m_equal == self.n_equal
    }
}

/// All partitions of `d` with non-increasing parts, in lexicographically
/// descending order of part sequences.
pub fn partitions(d: u32) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        let mut part = remaining.min(max_part);
        while part >= 1 {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
            part -= 1;
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::cpn;

    /// CP^n as a conjugation manifold: w(M) = (1+h)^{n+1} mod 2 over the
    /// even ring, w(N) = (1+t)^{n+1} over the fixed RP^n ring.
    pub(crate) fn manifold_cpn(n: u16) -> ManifoldModel {
        let space = Arc::new(cpn(n));
        let mod2 = space.mod2_ring();
        let fixed = space.fixed_ring();
        let one_plus_h: Mod2Poly =
            Poly::one(mod2).add_ref(&Poly::generator(mod2, 0));
        let one_plus_t: Mod2Poly =
            Poly::one(fixed).add_ref(&Poly::generator(fixed, 0));
        let fundamental = Monomial::from_exps(mod2, vec![n]);
        let fixed_fundamental = Monomial::from_exps(fixed, vec![n]);
        ManifoldModel::new(
            format!("CP{}", n),
            &space,
            2 * n as u32,
            one_plus_h.pow(u32::from(n) + 1),
            one_plus_t.pow(u32::from(n) + 1),
            fundamental,
            fixed_fundamental,
        )
        .unwrap()
    }

    #[test]
    fn wu_class_of_the_projective_plane() {
        let m = manifold_cpn(2);
        assert_eq!(m.wu_classes(Side::M).unwrap().to_string(), "1 + h");
        assert_eq!(m.wu_classes(Side::N).unwrap().to_string(), "1 + t");
        // Round trip: Sq(v) = w on both sides.
        for side in [Side::M, Side::N] {
            let v = m.wu_classes(side).unwrap();
            let action = match side {
                Side::M => m.space().even_sq().unwrap(),
                Side::N => m.space().fixed_sq().unwrap(),
            };
            assert_eq!(&action.total_sq(&v), m.total_sw(side));
        }
    }

    #[test]
    fn wu_duality_holds_on_projective_spaces() {
        for n in 1..=8u16 {
            let m = manifold_cpn(n);
            for side in [Side::M, Side::N] {
                let check = m.wu_duality_check(side).unwrap();
                assert!(check.pass, "CP{} side {}: {}", n, side, check.detail);
            }
        }
    }

    #[test]
    fn kappa_transfer_holds_on_projective_spaces() {
        for n in 1..=8u16 {
            let m = manifold_cpn(n);
            for check in m.kappa_transfer_check().unwrap() {
                assert!(check.pass, "CP{}: {} {}", n, check.subject, check.detail);
            }
        }
    }

    #[test]
    fn projective_plane_characteristic_numbers() {
        let m = manifold_cpn(2);
        let numbers_m = m.sw_numbers(Side::M);
        // Partitions of 4; w_2 = h, w_4 = h^2 (odd classes vanish).
        assert_eq!(numbers_m.get(&vec![2, 2]), Some(&true));
        assert_eq!(numbers_m.get(&vec![4]), Some(&true));
        assert_eq!(numbers_m.get(&vec![2, 1, 1]), Some(&false));
        assert_eq!(numbers_m.get(&vec![1, 1, 1, 1]), Some(&false));
        let numbers_n = m.sw_numbers(Side::N);
        // The fixed projective plane: w = 1 + t + t^2.
        assert_eq!(numbers_n.get(&vec![1, 1]), Some(&true));
        assert_eq!(numbers_n.get(&vec![2]), Some(&true));
    }

    #[test]
    fn nullcobordant_shape_has_no_numbers() {
        // CP^1: w(M) = (1+h)^2 = 1 mod 2, w(N) = (1+t)^2 = 1 in RP^1.
        let m = manifold_cpn(1);
        assert!(m.sw_numbers(Side::M).values().all(|b| !b));
        assert!(m.sw_numbers(Side::N).values().all(|b| !b));
    }

    #[test]
    fn cobordism_comparison_is_consistent_on_products() {
        let cp2 = manifold_cpn(2);
        let cp1 = manifold_cpn(1);
        let prod = ManifoldModel::product("CP1xCP1", &cp1, &cp1).unwrap();
        let report = cp2.cobordism_compare(&prod).unwrap();
        // CP1xCP1 is nullcobordant-shaped, CP2 is not -- both sides see it.
        assert!(!report.m_equal);
        assert!(!report.n_equal);
        assert!(report.consistent());
        let self_report = cp2.cobordism_compare(&cp2).unwrap();
        assert!(self_report.m_equal && self_report.n_equal);
        assert!(matches!(
            cp2.cobordism_compare(&manifold_cpn(3)),
            Err(ManifoldError::DimensionMismatch(4, 6))
        ));
    }

    #[test]
    fn product_models_transfer_and_pair_like_the_factors() {
        let cp1 = manifold_cpn(1);
        let cp2 = manifold_cpn(2);
        let prod = ManifoldModel::product("CP1xCP2", &cp1, &cp2).unwrap();
        assert_eq!(prod.dimension(Side::M), 6);
        for check in prod.kappa_transfer_check().unwrap() {
            assert!(check.pass, "{} {}", check.subject, check.detail);
        }
        for side in [Side::M, Side::N] {
            let check = prod.wu_duality_check(side).unwrap();
            assert!(check.pass, "{}", check.detail);
        }
    }

    #[test]
    fn product_numbers_match_a_hand_assembled_model() {
        use crate::algebra::{Domain, Generator, RingPresentation};
        use std::collections::BTreeMap as Map;

        let prod = ManifoldModel::product("CP2xCP2", &manifold_cpn(2), &manifold_cpn(2)).unwrap();

        // Hand-build the same product: two degree-2 classes cubing to zero.
        let integral = RingPresentation::new(
            Domain::Int,
            vec![
                Generator {
                    name: "x".into(),
                    degree: 2,
                },
                Generator {
                    name: "y".into(),
                    degree: 2,
                },
            ],
            8,
            vec![vec![3, 0], vec![0, 3]],
        )
        .unwrap();
        let fixed = RingPresentation::new(
            Domain::Mod2,
            vec![
                Generator {
                    name: "s".into(),
                    degree: 1,
                },
                Generator {
                    name: "t".into(),
                    degree: 1,
                },
            ],
            4,
            vec![vec![3, 0], vec![0, 3]],
        )
        .unwrap();
        let kappa = vec![Poly::generator(&fixed, 0), Poly::generator(&fixed, 1)];
        let space = Arc::new(
            SpaceModel::new("byhand", integral, fixed, kappa, Map::new(), false).unwrap(),
        );
        let mod2 = space.mod2_ring();
        let fixed = space.fixed_ring();
        let w_m = Poly::one(mod2)
            .add_ref(&Poly::generator(mod2, 0))
            .pow(3)
            .mul_ref(&Poly::one(mod2).add_ref(&Poly::generator(mod2, 1)).pow(3));
        let w_n = Poly::one(fixed)
            .add_ref(&Poly::generator(fixed, 0))
            .pow(3)
            .mul_ref(&Poly::one(fixed).add_ref(&Poly::generator(fixed, 1)).pow(3));
        let by_hand = ManifoldModel::new(
            "byhand",
            &space,
            8,
            w_m,
            w_n,
            Monomial::from_exps(mod2, vec![2, 2]),
            Monomial::from_exps(fixed, vec![2, 2]),
        )
        .unwrap();

        assert_eq!(prod.sw_numbers(Side::M), by_hand.sw_numbers(Side::M));
        assert_eq!(prod.sw_numbers(Side::N), by_hand.sw_numbers(Side::N));
        let report = prod.cobordism_compare(&by_hand).unwrap();
        assert!(report.m_equal && report.n_equal);
    }

    #[test]
    fn corrupted_fixed_data_is_reported() {
        let good = manifold_cpn(2);
        let space = good.space().clone();
        let fixed = space.fixed_ring();
        let crooked = ManifoldModel::new(
            "CP2bad",
            &space,
            4,
            good.total_sw(Side::M).clone(),
            Poly::one(fixed)
                .add_ref(&Poly::generator(fixed, 0).mul_ref(&Poly::generator(fixed, 0))),
            Monomial::from_exps(space.mod2_ring(), vec![2]),
            Monomial::from_exps(fixed, vec![2]),
        )
        .unwrap();
        let checks = crooked.kappa_transfer_check().unwrap();
        assert!(checks.iter().any(|c| !c.pass));
    }

    #[test]
    fn partition_enumeration_and_labels() {
        assert_eq!(partitions(0), vec![Vec::<u32>::new()]);
        assert_eq!(
            partitions(4),
            vec![
                vec![4],
                vec![3, 1],
                vec![2, 2],
                vec![2, 1, 1],
                vec![1, 1, 1, 1]
            ]
        );
        assert_eq!(partition_label(&[2, 2]), "w2^2");
        assert_eq!(partition_label(&[4]), "w4");
        assert_eq!(partition_label(&[2, 1, 1]), "w2*w1^2");
        assert_eq!(partition_label(&[]), "1");
    }

    #[test]
    fn construction_screens_shape() {
        let space = Arc::new(cpn(2));
        let mod2 = space.mod2_ring();
        let fixed = space.fixed_ring();
        let err = ManifoldModel::new(
            "odd",
            &space,
            3,
            Poly::one(mod2),
            Poly::one(fixed),
            Monomial::from_exps(mod2, vec![1]),
            Monomial::from_exps(fixed, vec![1]),
        )
        .unwrap_err();
        assert!(matches!(err, ManifoldError::OddDimension(3)));
        let err = ManifoldModel::new(
            "wrongfund",
            &space,
            4,
            Poly::one(mod2),
            Poly::one(fixed),
            Monomial::from_exps(mod2, vec![1]),
            Monomial::from_exps(fixed, vec![2]),
        )
        .unwrap_err();
        assert!(matches!(err, ManifoldError::WrongFundamental { side: Side::M }));
    }
}

//! Real bundles over conjugation-space models and their equivariant Chern
//! classes.
//!
//! A bundle is carried entirely by its characteristic data: the total Chern
//! class over the base's integral ring and the total Stiefel–Whitney class
//! of the fixed real bundle over the fixed ring.  The two are tied together
//! by the frame — κ(red(total_chern)) must equal total_sw_fixed — but that
//! compatibility is a semantic check (`validate`), so corrupted models load
//! and fail verification instead of failing to parse.
//!
//! The equivariant Chern class c̃_n is σ̃ of the ordinary class; it forgets
//! to c_n and restricts to Σ_{i=0}^{n} Sq^i(w_n) u^{n-i} over the fixed
//! points.  `restrict_chern` computes the restriction along both routes
//! (section formula on the Chern side, direct square expansion on the
//! Stiefel–Whitney side) and insists they agree.

use crate::algebra::{reduce_mod2, IntPoly, MapError, Mod2Poly, Poly};
use crate::conjugation::{ConjugationError, SpaceModel, UPoly};
use crate::equivariant::{twisted_group, EquivClass, EquivError};
use crate::report::CheckResult;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum ChernError {
    #[error("{part} must live over the base's {ring} ring")]
    ForeignPart { part: &'static str, ring: &'static str },
    #[error("{part} must have constant term 1")]
    ConstantTermNotOne { part: &'static str },
    #[error("total Chern class has a nonzero odd-degree part")]
    OddChernPart,
    #[error("bundles live over different bases")]
    BaseMismatch,
    #[error("Chern degree {degree} exceeds the base truncation {cap}")]
    DegreeOverflow { degree: u32, cap: u32 },
    #[error("base is not flagged with a trivial involution")]
    NotTrivialInvolution,
    #[error(
        "restriction routes disagree in c_{n}: section formula gives {via_section}, \
         square expansion gives {via_squares}"
    )]
    RestrictionMismatch {
        n: u32,
        via_section: String,
        via_squares: String,
    },
    #[error("Hopf model required")]
    HopfRequired,
    #[error("map image of `{gen}` must be zero or homogeneous of degree {expected}")]
    MapImageDegree { gen: String, expected: u32 },
    #[error("expected {expected} map images, got {got}")]
    MapImageCount { expected: usize, got: usize },
    #[error("map target truncation {target_cap} exceeds source truncation {source_cap}")]
    MapCapOrder { source_cap: u32, target_cap: u32 },
    #[error("kappa preimage missing for a fixed class of `{0}`")]
    KappaPreimageMissing(String),
    #[error(transparent)]
    Conjugation(#[from] ConjugationError),
    #[error(transparent)]
    Equivariant(#[from] EquivError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A Real bundle presented by its characteristic classes.
#[derive(Clone, Debug)]
pub struct RealBundleModel {
    name: String,
    base: Arc<SpaceModel>,
    total_chern: IntPoly,
    total_sw_fixed: Mod2Poly,
}

impl RealBundleModel {
    pub fn new(
        name: impl Into<String>,
        base: &Arc<SpaceModel>,
        total_chern: IntPoly,
        total_sw_fixed: Mod2Poly,
    ) -> Result<RealBundleModel, ChernError> {
        if total_chern.ring() != base.integral_ring() {
            return Err(ChernError::ForeignPart {
                part: "total Chern class",
                ring: "integral",
            });
        }
        if total_sw_fixed.ring() != base.fixed_ring() {
            return Err(ChernError::ForeignPart {
                part: "fixed Stiefel-Whitney class",
                ring: "fixed",
            });
        }
        if total_chern.homogeneous_part(0) != Poly::one(base.integral_ring()) {
            return Err(ChernError::ConstantTermNotOne {
                part: "total Chern class",
            });
        }
        if total_sw_fixed.homogeneous_part(0) != Poly::one(base.fixed_ring()) {
            return Err(ChernError::ConstantTermNotOne {
                part: "fixed Stiefel-Whitney class",
            });
        }
        if total_chern.support_degrees().iter().any(|d| d % 2 != 0) {
            return Err(ChernError::OddChernPart);
        }
        Ok(RealBundleModel {
            name: name.into(),
            base: base.clone(),
            total_chern,
            total_sw_fixed,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> &Arc<SpaceModel> {
        &self.base
    }

    pub fn total_chern(&self) -> &IntPoly {
        &self.total_chern
    }

    pub fn total_sw_fixed(&self) -> &Mod2Poly {
        &self.total_sw_fixed
    }

    /// c_n: the degree-2n part of the total Chern class.
    pub fn chern_class(&self, n: u32) -> IntPoly {
        self.total_chern.homogeneous_part(2 * n)
    }

    /// w_n of the fixed bundle.
    pub fn sw_fixed_class(&self, n: u32) -> Mod2Poly {
        self.total_sw_fixed.homogeneous_part(n)
    }

    /// Largest n with c_n possibly nonzero under the base truncation.
    pub fn top_chern_degree(&self) -> u32 {
        self.base.degree_cap() / 2
    }

    /// Semantic compatibility: the frame must carry the reduced Chern data
    /// onto the declared fixed Stiefel–Whitney data.
    pub fn validate(&self) -> Vec<CheckResult> {
        let reduced = reduce_mod2(&self.total_chern, self.base.mod2_ring());
        let through_kappa = match self.base.kappa_apply(&reduced) {
            Ok(v) => v,
            Err(e) => {
                return vec![CheckResult::fail(
                    "bundle-compat",
                    &self.name,
                    format!("kappa failed: {}", e),
                )]
            }
        };
        // The fixed ring may truncate lower than the Chern data reaches.
        let cap = self.base.fixed_ring().truncation();
        let declared = self.total_sw_fixed.truncate_above(cap);
        let result = if through_kappa == declared {
            CheckResult::pass(
                "bundle-compat",
                &self.name,
                format!("kappa carries the Chern data onto {}", declared),
            )
        } else {
            CheckResult::fail(
                "bundle-compat",
                &self.name,
                format!(
                    "kappa(red(total_chern)) = {} but declared {}",
                    through_kappa, declared
                ),
            )
        };
        vec![result]
    }

    /// The equivariant Chern class c̃_n = σ̃(c_n).
    pub fn equivariant_chern(&self, n: u32) -> Result<EquivClass, ChernError> {
        if 2 * n > self.base.degree_cap() {
            return Err(ChernError::DegreeOverflow {
                degree: 2 * n,
                cap: self.base.degree_cap(),
            });
        }
        Ok(EquivClass::sigma_tilde(&self.base, &self.chern_class(n))?)
    }

    /// The total equivariant class Σ c̃_n = σ̃(total_chern).
    pub fn total_equivariant_chern(&self) -> Result<EquivClass, ChernError> {
        Ok(EquivClass::sigma_tilde(&self.base, &self.total_chern)?)
    }

    /// Forgetful image of c̃_n, which is c_n again.
    pub fn forget_chern(&self, n: u32) -> Result<IntPoly, ChernError> {
        Ok(self.equivariant_chern(n)?.forget())
    }

    /// Fixed-point restriction of c̃_n, computed two ways and compared:
    /// through the section formula on κ(red c_n), and directly as
    /// Σ_{i=0}^{n} Sq^i(w_n) u^{n-i} from the declared fixed data.
    pub fn restrict_chern(&self, n: u32) -> Result<UPoly, ChernError> {
        let via_section = self.equivariant_chern(n)?.restrict_fixed()?;
        let sq = self.base.fixed_sq()?;
        let w_n = self.sw_fixed_class(n);
        let cap = self.base.degree_cap();
        let mut via_squares = UPoly::zero(self.base.fixed_ring(), cap);
        for i in 0..=n {
            via_squares = via_squares.add_ref(&UPoly::term(&sq.sq(i, &w_n), n - i, cap));
        }
        if via_section != via_squares {
            return Err(ChernError::RestrictionMismatch {
                n,
                via_section: via_section.to_string(),
                via_squares: via_squares.to_string(),
            });
        }
        Ok(via_section)
    }

    /// Over a trivial involution the fixed data is the bundle's own real
    /// Stiefel–Whitney data, and the u^n-leading coefficient of the
    /// restriction recovers w_n.
    pub fn kahn_reduction(&self, n: u32) -> Result<Mod2Poly, ChernError> {
        if !self.base.trivial_involution() {
            return Err(ChernError::NotTrivialInvolution);
        }
        Ok(self.restrict_chern(n)?.coefficient(n))
    }

    /// Whitney sum: both total classes multiply.
    pub fn whitney_sum(&self, other: &RealBundleModel) -> Result<RealBundleModel, ChernError> {
        if !Arc::ptr_eq(&self.base, &other.base) {
            return Err(ChernError::BaseMismatch);
        }
        RealBundleModel::new(
            format!("{}(+){}", self.name, other.name),
            &self.base,
            self.total_chern.mul_ref(&other.total_chern),
            self.total_sw_fixed.mul_ref(&other.total_sw_fixed),
        )
    }
}

/// A declared map between space models, given on cohomology: generator
/// images of the source's integral ring inside the target's.  (The
/// geometric arrow runs the other way.)
#[derive(Clone, Debug)]
pub struct MapModel {
    name: String,
    source: Arc<SpaceModel>,
    target: Arc<SpaceModel>,
    images: Vec<IntPoly>,
}

impl MapModel {
    pub fn new(
        name: impl Into<String>,
        source: &Arc<SpaceModel>,
        target: &Arc<SpaceModel>,
        images: Vec<IntPoly>,
    ) -> Result<MapModel, ChernError> {
        let gens = source.integral_ring().generators();
        if images.len() != gens.len() {
            return Err(ChernError::MapImageCount {
                expected: gens.len(),
                got: images.len(),
            });
        }
        for (g, image) in gens.iter().zip(&images) {
            if image.ring() != target.integral_ring() {
                return Err(ChernError::ForeignPart {
                    part: "map image",
                    ring: "integral",
                });
            }
            if !image.is_zero() && image.homogeneous_degree() != Some(g.degree) {
                return Err(ChernError::MapImageDegree {
                    gen: g.name.clone(),
                    expected: g.degree,
                });
            }
        }
        // Pulled-back data is only trustworthy where the source data is
        // complete, so the target may not see further than the source.
        if target.degree_cap() > source.degree_cap() {
            return Err(ChernError::MapCapOrder {
                source_cap: source.degree_cap(),
                target_cap: target.degree_cap(),
            });
        }
        Ok(MapModel {
            name: name.into(),
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Arc<SpaceModel> {
        &self.source
    }

    pub fn target(&self) -> &Arc<SpaceModel> {
        &self.target
    }

    pub fn apply_integral(&self, x: &IntPoly) -> Result<IntPoly, ChernError> {
        if x.ring() != self.source.integral_ring() {
            return Err(ChernError::ForeignPart {
                part: "map argument",
                ring: "integral",
            });
        }
        Ok(x.substitute(self.target.integral_ring(), &self.images))
    }

    pub fn apply_mod2(&self, x: &Mod2Poly) -> Result<Mod2Poly, ChernError> {
        if x.ring() != self.source.mod2_ring() {
            return Err(ChernError::ForeignPart {
                part: "map argument",
                ring: "mod-2",
            });
        }
        let images: Vec<Mod2Poly> = self
            .images
            .iter()
            .map(|p| reduce_mod2(p, self.target.mod2_ring()))
            .collect();
        Ok(x.substitute(self.target.mod2_ring(), &images))
    }

    /// The induced map on fixed rings, forced by naturality of the frames:
    /// each fixed generator w is carried to κ_target(f(κ_source^{-1}(w))).
    pub fn fixed_images(&self) -> Result<Vec<Mod2Poly>, ChernError> {
        let mut images = Vec::new();
        for (i, _g) in self.source.fixed_ring().generators().iter().enumerate() {
            let w: Mod2Poly = Poly::generator(self.source.fixed_ring(), i);
            let preimage = self
                .source
                .kappa_preimage(&w)?
                .ok_or_else(|| ChernError::KappaPreimageMissing(self.source.name().into()))?;
            images.push(self.target.kappa_apply(&self.apply_mod2(&preimage)?)?);
        }
        Ok(images)
    }

    pub fn apply_fixed(&self, w: &Mod2Poly) -> Result<Mod2Poly, ChernError> {
        if w.ring() != self.source.fixed_ring() {
            return Err(ChernError::ForeignPart {
                part: "map argument",
                ring: "fixed",
            });
        }
        Ok(w.substitute(self.target.fixed_ring(), &self.fixed_images()?))
    }

    /// Semantic validation: source relations must map to zero.
    pub fn validate(&self) -> Vec<CheckResult> {
        let ring = self.source.integral_ring();
        let mut bad = Vec::new();
        for rel in ring.relations() {
            let mono = crate::algebra::Monomial::from_exps(ring, rel.clone());
            if ring.degree_of_exps(rel) > ring.truncation() {
                continue;
            }
            let image: IntPoly = self
                .images
                .iter()
                .zip(rel)
                .filter(|(_, e)| **e > 0)
                .fold(Poly::one(self.target.integral_ring()), |acc, (img, e)| {
                    acc.mul_ref(&img.pow(u32::from(*e)))
                });
            if !image.is_zero() {
                bad.push(format!("{} maps to {}", mono.display(ring), image));
            }
        }
        let result = if bad.is_empty() {
            CheckResult::pass("map-relations", &self.name, "all relations map to zero")
        } else {
            CheckResult::fail("map-relations", &self.name, bad.join("; "))
        };
        vec![result]
    }

    /// Pull a bundle over the map's source back to its target, deriving the
    /// fixed data through the frames.
    pub fn pullback_bundle(&self, b: &RealBundleModel) -> Result<RealBundleModel, ChernError> {
        if !Arc::ptr_eq(b.base(), &self.source) {
            return Err(ChernError::BaseMismatch);
        }
        let chern = self.apply_integral(&b.total_chern)?;
        let sw = self.apply_fixed(&b.total_sw_fixed)?;
        RealBundleModel::new(
            format!("{}^*({})", self.name, b.name),
            &self.target,
            chern,
            sw,
        )
    }
}

/// Run the axiom suite over a collection of bundles and declared maps.
/// Produces one record per (axiom, subject); a Hopf model over a two-sphere
/// base (bundle named "hopf") anchors the normalization axiom.
pub fn verify_axioms(
    bundles: &[&RealBundleModel],
    maps: &[&MapModel],
) -> Result<Vec<CheckResult>, ChernError> {
    let hopf = bundles
        .iter()
        .find(|b| b.name() == "hopf")
        .ok_or(ChernError::HopfRequired)?;
    let mut out = Vec::new();

    // Axiom I: classes live in the right twisted groups, with unit c̃₀.
    for b in bundles {
        let mut detail = Vec::new();
        let mut pass = true;
        match b.equivariant_chern(0) {
            Ok(c0) => {
                if c0.forget() != Poly::one(b.base().integral_ring()) {
                    pass = false;
                    detail.push("c~0 is not the unit".to_string());
                }
            }
            Err(e) => {
                pass = false;
                detail.push(format!("c~0 failed: {}", e));
            }
        }
        for n in 1..=b.top_chern_degree() {
            let class = b.equivariant_chern(n)?;
            if class.is_zero() {
                continue;
            }
            match class.bidegree() {
                Some((degree, twist)) if degree == 2 * n && u32::from(twist) == n % 2 => {
                    let group = twisted_group(b.base(), degree, twist)?;
                    if group.is_trivial() {
                        pass = false;
                        detail.push(format!("c~{} lands in a trivial group", n));
                    }
                }
                got => {
                    pass = false;
                    detail.push(format!(
                        "c~{} has bidegree {:?}, expected ({}, {})",
                        n,
                        got,
                        2 * n,
                        n % 2
                    ));
                }
            }
        }
        if pass {
            detail.push(format!(
                "degrees up to {} carry the right (degree, twist)",
                2 * b.top_chern_degree()
            ));
        }
        out.push(CheckResult::of("axiom-I", b.name(), pass, detail.join("; ")));
    }

    // Axiom II: naturality along each declared map, on every bundle over
    // the map's source: the pulled-back bundle must be frame-compatible and
    // its classes must be the mapped classes.
    for f in maps {
        let mut detail = Vec::new();
        let mut pass = true;
        let mut tested = 0;
        for b in bundles {
            if !Arc::ptr_eq(b.base(), f.source()) {
                continue;
            }
            tested += 1;
            let pulled = f.pullback_bundle(b)?;
            for check in pulled.validate() {
                if !check.pass {
                    pass = false;
                    detail.push(format!("{}: {}", pulled.name(), check.detail));
                }
            }
            for n in 0..=pulled.top_chern_degree() {
                let lhs = pulled.equivariant_chern(n)?.forget();
                let rhs = f.apply_integral(&b.chern_class(n))?;
                if lhs != rhs {
                    pass = false;
                    detail.push(format!("c~{} of {} does not pull back", n, b.name()));
                }
            }
            if let Err(e) = pulled.restrict_chern(1) {
                pass = false;
                detail.push(format!("{}: {}", pulled.name(), e));
            }
        }
        if tested == 0 {
            pass = false;
            detail.push("no bundle over the map source".to_string());
        } else if pass {
            detail.push(format!("{} bundle(s) pulled back cleanly", tested));
        }
        out.push(CheckResult::of("axiom-II", f.name(), pass, detail.join("; ")));
    }

    // Axiom III: Whitney multiplicativity on every same-base pair, both
    // sides through independent routes.
    for (i, b1) in bundles.iter().enumerate() {
        for b2 in bundles.iter().skip(i) {
            if !Arc::ptr_eq(b1.base(), b2.base()) {
                continue;
            }
            let subject = format!("{} (+) {}", b1.name(), b2.name());
            let sum = b1.whitney_sum(b2)?;
            let lhs = sum.total_equivariant_chern()?;
            let rhs = b1
                .total_equivariant_chern()?
                .mul_ref(&b2.total_equivariant_chern()?)?;
            let sw_ok = sum.total_sw_fixed()
                == &b1.total_sw_fixed.mul_ref(&b2.total_sw_fixed);
            let pass = lhs == rhs && sw_ok;
            let detail = if pass {
                "total classes multiply".to_string()
            } else {
                format!("sum gives {}, product gives {}", lhs, rhs)
            };
            out.push(CheckResult::of("axiom-III", subject, pass, detail));
        }
    }

    // Axiom IV': normalization on the Hopf bundle — total class 1 + h̃,
    // restricting over the fixed circle to 1 + e·u.
    {
        let base = hopf.base();
        let h: IntPoly = match base.integral_ring().generators().len() {
            1 => Poly::generator(base.integral_ring(), 0),
            _ => Poly::zero(base.integral_ring()),
        };
        let expected = Poly::one(base.integral_ring()).add_ref(&h);
        let mut pass = !h.is_zero() && hopf.total_chern() == &expected;
        let mut detail = if pass {
            "total Chern class is 1 + h".to_string()
        } else {
            format!("total Chern class is {}, expected 1 + h", hopf.total_chern())
        };
        if pass {
            match hopf.restrict_chern(1) {
                Ok(r) => {
                    let e_u = UPoly::term(
                        &base.kappa_apply(&reduce_mod2(&h, base.mod2_ring()))
                            .map_err(ChernError::from)?,
                        1,
                        base.degree_cap(),
                    );
                    if r != e_u {
                        pass = false;
                        detail = format!("c~1 restricts to {}, expected {}", r, e_u);
                    } else {
                        detail = format!("{}; c~1 restricts to {}", detail, r);
                    }
                }
                Err(e) => {
                    pass = false;
                    detail = format!("restriction failed: {}", e);
                }
            }
        }
        out.push(CheckResult::of("axiom-IV'", hopf.name(), pass, detail));
    }

    Ok(out)
}

/// Build the standard bundle suite over the given catalogue of spaces: used
/// by tests; the CLI assembles the same shape from definition files.
pub fn standard_pairs(bundles: &[&RealBundleModel]) -> Vec<(String, String)> {
    let mut pairs = Vec::new();
    for (i, b1) in bundles.iter().enumerate() {
        for b2 in bundles.iter().skip(i) {
            if Arc::ptr_eq(b1.base(), b2.base()) {
                pairs.push((b1.name().to_string(), b2.name().to_string()));
            }
        }
    }
    pairs
}

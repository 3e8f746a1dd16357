//! Spaces with involution carrying a cohomology frame: a degree-halving ring
//! isomorphism κ from the even mod-2 cohomology onto the cohomology of the
//! fixed-point set, together with the restriction map r̄ into the fixed-point
//! ring with a formal degree-1 variable u adjoined.
//!
//! A `SpaceModel` packages the truncated integral ring (even generators
//! only), its mod-2 companion, the fixed-point ring with a Steenrod action,
//! and κ as generator images.  Everything is validated structurally at
//! construction; the degreewise bijectivity of κ is a semantic property
//! surfaced by `validate`, so that deliberately corrupted model files load
//! and then fail verification rather than failing to parse.
//!
//! The restriction of a section class is computed by the fixed-point formula
//!
//! ```text
//! r̄(σx) = Σ_m Σ_{i=0}^{m} Sq^i(κ(x_{2m})) · u^{m-i}
//! ```
//!
//! with u outside the Steenrod square (degree bookkeeping forces this
//! reading), and the class a of the Borel construction restricts to u².

use crate::algebra::{Coefficient, Domain, Mod2Poly, Poly, Ring, RingPresentation};
use crate::report::CheckResult;
use crate::steenrod::{default_rule_row, wu_action, SqAction, SteenrodError};
use std::collections::BTreeMap;
use std::fmt;

/// The name reserved for the formal restriction variable.  Fixed rings may
/// not declare a generator with this name: printed restrictions would be
/// ambiguous.
pub const U_NAME: &str = "u";

#[derive(Debug, thiserror::Error)]
pub enum ConjugationError {
    #[error("the base ring must have integer coefficients")]
    BaseNotIntegral,
    #[error("the fixed-point ring must have F2 coefficients")]
    FixedNotMod2,
    #[error("generator `{U_NAME}` in the fixed ring collides with the restriction variable")]
    ReservedFixedName,
    #[error("expected {expected} kappa images, got {got}")]
    KappaImageCount { expected: usize, got: usize },
    #[error("kappa image of `{gen}` must live in the fixed ring")]
    KappaImageForeign { gen: String },
    #[error("kappa image of `{gen}` must be zero or homogeneous of degree {expected}")]
    KappaImageDegree { gen: String, expected: u32 },
    #[error("declared Sq index {i} for `{gen}` is out of range 1..={degree}")]
    SqIndexRange { gen: String, i: u32, degree: u32 },
    #[error("declared Sq rules are invalid: {0}")]
    BadSqRules(#[from] SteenrodError),
    #[error("no Steenrod rules on {ring}: {reason}")]
    MissingSqRules { ring: String, reason: String },
    #[error("class does not belong to this space's {0} ring")]
    ForeignClass(&'static str),
}

/// A polynomial in the formal variable u with coefficients in a fixed mod-2
/// ring, truncated by total degree (coefficient degree plus u-exponent).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    ring: Ring,
    cap: u32,
    terms: BTreeMap<u32, Mod2Poly>,
}

impl UPoly {
    pub fn zero(ring: &Ring, cap: u32) -> UPoly {
        assert_eq!(ring.domain(), Domain::Mod2);
        UPoly {
            ring: ring.clone(),
            cap,
            terms: BTreeMap::new(),
        }
    }

    /// A coefficient times u^k.
    pub fn term(coeff: &Mod2Poly, k: u32, cap: u32) -> UPoly {
        let mut p = UPoly::zero(coeff.ring(), cap);
        p.add_term(coeff, k);
        p
    }

    pub fn one(ring: &Ring, cap: u32) -> UPoly {
        UPoly::term(&Poly::one(ring), 0, cap)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    fn add_term(&mut self, coeff: &Mod2Poly, k: u32) {
        if k > self.cap {
            return;
        }
        let kept = coeff.truncate_above(self.cap - k);
        if kept.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(k)
            .or_insert_with(|| Poly::zero(&self.ring));
        *entry = entry.add_ref(&kept);
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add_ref(&self, other: &UPoly) -> UPoly {
        assert!(self.ring == other.ring, "u-series over different rings");
        let mut out = self.clone();
        out.cap = self.cap.min(other.cap);
        // Re-truncate the copied terms to the tighter cap.
        out.terms = BTreeMap::new();
        for (k, c) in &self.terms {
            out.add_term(c, *k);
        }
        for (k, c) in &other.terms {
            out.add_term(c, *k);
        }
        out
    }

    pub fn mul_ref(&self, other: &UPoly) -> UPoly {
        assert!(self.ring == other.ring, "u-series over different rings");
        let mut out = UPoly::zero(&self.ring, self.cap.min(other.cap));
        for (j, c) in &self.terms {
            for (k, d) in &other.terms {
                out.add_term(&c.mul_ref(d), j + k);
            }
        }
        out
    }

    /// Multiply by u^k.
    pub fn shift(&self, k: u32) -> UPoly {
        let mut out = UPoly::zero(&self.ring, self.cap);
        for (j, c) in &self.terms {
            out.add_term(c, j + k);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of u^k.
    pub fn coefficient(&self, k: u32) -> Mod2Poly {
        self.terms
            .get(&k)
            .cloned()
            .unwrap_or_else(|| Poly::zero(&self.ring))
    }

    /// Largest u-exponent with a nonzero coefficient.
    pub fn max_u_power(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn u_powers(&self) -> impl Iterator<Item = (&u32, &Mod2Poly)> {
        self.terms.iter()
    }

    /// Evaluation at u = 0.
    pub fn eval_u_zero(&self) -> Mod2Poly {
        self.coefficient(0)
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (k, c) in self.terms.iter().rev() {
            if *k == 0 {
                parts.push(format!("{}", c));
                continue;
            }
            let u = if *k == 1 {
                U_NAME.to_string()
            } else {
                format!("{}^{}", U_NAME, k)
            };
            if c.is_one() {
                parts.push(u);
            } else if c.num_terms() == 1 {
                parts.push(format!("{}*{}", c, u));
            } else {
                parts.push(format!("({})*{}", c, u));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Report of the conjugation-equation check for one homogeneous class.
#[derive(Clone, Debug)]
pub struct ConjugationEquationReport {
    pub degree: u32,
    pub pass: bool,
    /// The observed u^m-coefficient.
    pub leading: Mod2Poly,
    /// κ of the class, the required leading coefficient.
    pub expected: Mod2Poly,
    /// Whatever sits below u^m.
    pub lower_terms: UPoly,
}

/// A space with involution presented through its cohomology frame.
pub struct SpaceModel {
    name: String,
    integral_ring: Ring,
    mod2_ring: Ring,
    fixed_ring: Ring,
    kappa_images: Vec<Mod2Poly>,
    fixed_sq: Result<SqAction, String>,
    even_sq: Result<SqAction, String>,
    trivial_involution: bool,
}

impl fmt::Debug for SpaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceModel").field("name", &self.name).finish()
    }
}

/// Assemble a Steenrod rule table for `ring`: declared rules take precedence
/// per generator (undeclared inner squares default to zero, the top square
/// to the ring square); otherwise ladder rings get the binomial rule and
/// degree ≤ 2 generators their forced/default rows.  Returns `Err(reason)`
/// when some generator has no source of rules — a deferred condition, since
/// many operations never need the action.
fn resolve_sq_action(
    ring: &Ring,
    declared: &BTreeMap<usize, BTreeMap<u32, Mod2Poly>>,
) -> Result<Result<SqAction, String>, ConjugationError> {
    let auto = wu_action(ring).ok();
    let mut rows: Vec<Vec<Mod2Poly>> = Vec::with_capacity(ring.generators().len());
    let mut missing: Vec<String> = Vec::new();
    for (g, generator) in ring.generators().iter().enumerate() {
        let d = generator.degree;
        if let Some(rules) = declared.get(&g) {
            let gen_poly: Mod2Poly = Poly::generator(ring, g);
            let square = gen_poly.mul_ref(&gen_poly);
            let mut row: Vec<Mod2Poly> = (0..=d)
                .map(|i| {
                    if i == 0 {
                        gen_poly.clone()
                    } else {
                        Poly::zero(ring)
                    }
                })
                .collect();
            row[d as usize] = square;
            for (&i, image) in rules {
                if i == 0 || i > d {
                    return Err(ConjugationError::SqIndexRange {
                        gen: generator.name.clone(),
                        i,
                        degree: d,
                    });
                }
                row[i as usize] = image.clone();
            }
            rows.push(row);
        } else if let Some(a) = &auto {
            rows.push((0..=d).map(|i| a.rule(g, i)).collect());
        } else if let Some(row) = default_rule_row(ring, g) {
            rows.push(row);
        } else {
            missing.push(format!("{} (degree {})", generator.name, d));
            rows.push(Vec::new());
        }
    }
    if !missing.is_empty() {
        return Ok(Err(format!(
            "no rules for generator(s) {}; declare `sq` rules",
            missing.join(", ")
        )));
    }
    // Declared rules can violate the table axioms; that is a hard input
    // error, unlike the absence of rules.
    SqAction::new(ring, rows)
        .map_err(ConjugationError::BadSqRules)
        .map(Ok)
}

impl SpaceModel {
    /// Validate structure and build a model.  `declared_sq` maps fixed-ring
    /// generator indices to declared squares (index i ≥ 1 to the image).
    pub fn new(
        name: impl Into<String>,
        integral_ring: Ring,
        fixed_ring: Ring,
        kappa_images: Vec<Mod2Poly>,
        declared_sq: BTreeMap<usize, BTreeMap<u32, Mod2Poly>>,
        trivial_involution: bool,
    ) -> Result<SpaceModel, ConjugationError> {
        if integral_ring.domain() != Domain::Int {
            return Err(ConjugationError::BaseNotIntegral);
        }
        if fixed_ring.domain() != Domain::Mod2 {
            return Err(ConjugationError::FixedNotMod2);
        }
        if fixed_ring.gen_index(U_NAME).is_some() {
            return Err(ConjugationError::ReservedFixedName);
        }
        let mod2_ring = integral_ring.mod2_companion();
        let gens = integral_ring.generators();
        if kappa_images.len() != gens.len() {
            return Err(ConjugationError::KappaImageCount {
                expected: gens.len(),
                got: kappa_images.len(),
            });
        }
        for (g, image) in gens.iter().zip(&kappa_images) {
            if image.ring() != &fixed_ring {
                return Err(ConjugationError::KappaImageForeign {
                    gen: g.name.clone(),
                });
            }
            let expected = g.degree / 2;
            if !image.is_zero() && image.homogeneous_degree() != Some(expected) {
                return Err(ConjugationError::KappaImageDegree {
                    gen: g.name.clone(),
                    expected,
                });
            }
        }
        let fixed_sq = resolve_sq_action(&fixed_ring, &declared_sq)?;
        let even_sq = resolve_sq_action(&mod2_ring, &BTreeMap::new())?;
        Ok(SpaceModel {
            name: name.into(),
            integral_ring,
            mod2_ring,
            fixed_ring,
            kappa_images,
            fixed_sq,
            even_sq,
            trivial_involution,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn integral_ring(&self) -> &Ring {
        &self.integral_ring
    }

    pub fn mod2_ring(&self) -> &Ring {
        &self.mod2_ring
    }

    pub fn fixed_ring(&self) -> &Ring {
        &self.fixed_ring
    }

    /// The degree cap D of the model.
    pub fn degree_cap(&self) -> u32 {
        self.integral_ring.truncation()
    }

    pub fn trivial_involution(&self) -> bool {
        self.trivial_involution
    }

    /// Rank of the degree-q integral cohomology (zero in odd degrees by the
    /// even-generator constraint).
    pub fn betti(&self, q: u32) -> usize {
        self.integral_ring.rank(q)
    }

    pub fn fixed_sq(&self) -> Result<&SqAction, ConjugationError> {
        self.fixed_sq
            .as_ref()
            .map_err(|reason| ConjugationError::MissingSqRules {
                ring: format!("the fixed ring of {}", self.name),
                reason: reason.clone(),
            })
    }

    /// The Steenrod action on the even mod-2 ring, when one can be derived.
    pub fn even_sq(&self) -> Result<&SqAction, ConjugationError> {
        self.even_sq
            .as_ref()
            .map_err(|reason| ConjugationError::MissingSqRules {
                ring: format!("the even ring of {}", self.name),
                reason: reason.clone(),
            })
    }

    pub fn kappa_images(&self) -> &[Mod2Poly] {
        &self.kappa_images
    }

    /// The degree-halving ring map on a mod-2 class (all monomials have even
    /// degree because every generator does).
    pub fn kappa_apply(&self, x: &Mod2Poly) -> Result<Mod2Poly, ConjugationError> {
        if x.ring() != &self.mod2_ring {
            return Err(ConjugationError::ForeignClass("mod-2"));
        }
        Ok(x.substitute(&self.fixed_ring, &self.kappa_images))
    }

    /// Matrix of κ on the degree-2m monomial basis, as bit rows over the
    /// fixed degree-m basis, for the bijectivity check.
    fn kappa_degree_matrix(&self, two_m: u32) -> (usize, usize, Vec<Vec<u64>>) {
        let source = self.mod2_ring.monomial_basis(two_m);
        let target = self.fixed_ring.monomial_basis(two_m / 2);
        let index: BTreeMap<_, _> = target
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let words = target.len().div_ceil(64);
        let rows = source
            .iter()
            .map(|m| {
                let image = self
                    .kappa_apply(&Poly::monomial(&self.mod2_ring, m.clone()))
                    .expect("basis monomial is in the mod-2 ring");
                let mut bits = vec![0u64; words];
                for (mono, c) in image.terms() {
                    if !c.is_zero() {
                        let i = index[mono];
                        bits[i / 64] |= 1 << (i % 64);
                    }
                }
                bits
            })
            .collect();
        (source.len(), target.len(), rows)
    }

    /// Semantic model checks: κ must be a degreewise bijection up to the
    /// degree cap.  Returns one record for the whole model.
    pub fn validate(&self) -> Vec<CheckResult> {
        let mut failures = Vec::new();
        let mut checked = 0;
        let mut two_m = 0;
        while two_m <= self.degree_cap() {
            let (ns, nt, rows) = self.kappa_degree_matrix(two_m);
            if ns != nt {
                failures.push(format!("degree {}: rank {} vs {}", two_m, ns, nt));
            } else if f2_rank(rows, nt) != ns {
                failures.push(format!("degree {}: kappa not injective", two_m));
            }
            checked += 1;
            two_m += 2;
        }
        let result = if failures.is_empty() {
            CheckResult::pass(
                "kappa-bijective",
                &self.name,
                format!("{} even degrees up to {}", checked, self.degree_cap()),
            )
        } else {
            CheckResult::fail("kappa-bijective", &self.name, failures.join("; "))
        };
        vec![result]
    }

    /// Solve κ(x) = w for a homogeneous w, if a preimage exists.
    pub fn kappa_preimage(&self, w: &Mod2Poly) -> Result<Option<Mod2Poly>, ConjugationError> {
        if w.ring() != &self.fixed_ring {
            return Err(ConjugationError::ForeignClass("fixed"));
        }
        if w.is_zero() {
            return Ok(Some(Poly::zero(&self.mod2_ring)));
        }
        let m = match w.homogeneous_degree() {
            Some(m) => m,
            None => {
                // Solve componentwise.
                let mut acc = Poly::zero(&self.mod2_ring);
                for d in w.support_degrees() {
                    match self.kappa_preimage(&w.homogeneous_part(d))? {
                        Some(part) => acc = acc.add_ref(&part),
                        None => return Ok(None),
                    }
                }
                return Ok(Some(acc));
            }
        };
        let source = self.mod2_ring.monomial_basis(2 * m);
        let target = self.fixed_ring.monomial_basis(m);
        let index: BTreeMap<_, _> = target
            .iter()
            .enumerate()
            .map(|(i, mo)| (mo.clone(), i))
            .collect();
        // Augmented system over the target basis: one equation per target
        // monomial, one column per source monomial plus the constant column.
        let ncols = source.len() + 1;
        let words = ncols.div_ceil(64);
        let mut rows = vec![vec![0u64; words]; target.len()];
        for (j, mono) in source.iter().enumerate() {
            let image = self.kappa_apply(&Poly::monomial(&self.mod2_ring, mono.clone()))?;
            for (t, c) in image.terms() {
                if !c.is_zero() {
                    let i = index[t];
                    rows[i][j / 64] |= 1 << (j % 64);
                }
            }
        }
        for (t, c) in w.terms() {
            if !c.is_zero() {
                let i = match index.get(t) {
                    Some(i) => *i,
                    None => return Ok(None),
                };
                let j = source.len();
                rows[i][j / 64] |= 1 << (j % 64);
            }
        }
        match f2_solve(rows, source.len()) {
            Some(solution) => {
                let mut x = Poly::zero(&self.mod2_ring);
                for (j, mono) in source.iter().enumerate() {
                    if solution[j] {
                        x = x.add_ref(&Poly::monomial(&self.mod2_ring, mono.clone()));
                    }
                }
                Ok(Some(x))
            }
            None => Ok(None),
        }
    }

    /// The restriction of the section of a mod-2 class to the fixed-point
    /// ring with u adjoined:
    /// r̄(σ y) = Σ_m Σ_{i=0}^{m} Sq^i(κ(y_{2m})) u^{m-i}.
    pub fn restrict_section(&self, y: &Mod2Poly) -> Result<UPoly, ConjugationError> {
        if y.ring() != &self.mod2_ring {
            return Err(ConjugationError::ForeignClass("mod-2"));
        }
        let sq = self.fixed_sq()?;
        let mut out = UPoly::zero(&self.fixed_ring, self.degree_cap());
        for two_m in y.support_degrees() {
            let m = two_m / 2;
            let kappa_part = self.kappa_apply(&y.homogeneous_part(two_m))?;
            for i in 0..=m {
                out = out.add_ref(&UPoly::term(&sq.sq(i, &kappa_part), m - i, self.degree_cap()));
            }
        }
        Ok(out)
    }

    /// Check the conjugation equation on one homogeneous class of degree 2m:
    /// the restriction of its section must have u-leading term κ(x) u^m.
    pub fn conjugation_equation_check(
        &self,
        x: &Mod2Poly,
    ) -> Result<ConjugationEquationReport, ConjugationError> {
        let degree = x.homogeneous_degree().unwrap_or(0);
        let m = degree / 2;
        let restricted = self.restrict_section(x)?;
        let expected = self.kappa_apply(x)?;
        let leading = restricted.coefficient(m);
        let overshoot = restricted.max_u_power().is_some_and(|k| k > m);
        let mut lower_terms = restricted.clone();
        lower_terms = lower_terms.add_ref(&UPoly::term(&leading, m, restricted.cap()));
        let pass = !overshoot && leading == expected && (!x.is_zero() || restricted.is_zero());
        Ok(ConjugationEquationReport {
            degree,
            pass,
            leading,
            expected,
            lower_terms,
        })
    }

    /// Tensor two models: generators are renamed `<name>_1` / `<name>_2`,
    /// relations are imported, degree caps add, Steenrod rules and κ are the
    /// tensors of the factors'.
    pub fn product(
        name: impl Into<String>,
        left: &SpaceModel,
        right: &SpaceModel,
    ) -> Result<SpaceModel, ConjugationError> {
        let integral_ring = tensor_rings(&left.integral_ring, &right.integral_ring);
        let fixed_ring = tensor_rings(&left.fixed_ring, &right.fixed_ring);
        let mod2_ring = integral_ring.mod2_companion();

        let n_left_int = left.integral_ring.generators().len();
        let n_left_fixed = left.fixed_ring.generators().len();
        let embed_fixed_left = embedding_images(&left.fixed_ring, &fixed_ring, 0);
        let embed_fixed_right = embedding_images(&right.fixed_ring, &fixed_ring, n_left_fixed);
        let embed_mod2_left = embedding_images(&left.mod2_ring, &mod2_ring, 0);
        let embed_mod2_right = embedding_images(&right.mod2_ring, &mod2_ring, n_left_int);

        let mut kappa_images = Vec::new();
        for img in &left.kappa_images {
            kappa_images.push(img.substitute(&fixed_ring, &embed_fixed_left));
        }
        for img in &right.kappa_images {
            kappa_images.push(img.substitute(&fixed_ring, &embed_fixed_right));
        }

        let fixed_sq = tensor_actions(
            &fixed_ring,
            &left.fixed_sq,
            &embed_fixed_left,
            &right.fixed_sq,
            &embed_fixed_right,
        )?;
        let even_sq = tensor_actions(
            &mod2_ring,
            &left.even_sq,
            &embed_mod2_left,
            &right.even_sq,
            &embed_mod2_right,
        )?;

        Ok(SpaceModel {
            name: name.into(),
            integral_ring,
            mod2_ring,
            fixed_ring,
            kappa_images,
            fixed_sq,
            even_sq,
            trivial_involution: left.trivial_involution && right.trivial_involution,
        })
    }
}

/// Union of two presentations with `_1` / `_2` suffixes and added caps.
fn tensor_rings(a: &Ring, b: &Ring) -> Ring {
    let mut gens: Vec<(String, u32)> = Vec::new();
    for g in a.generators() {
        gens.push((format!("{}_1", g.name), g.degree));
    }
    for g in b.generators() {
        gens.push((format!("{}_2", g.name), g.degree));
    }
    let refs: Vec<(&str, u32)> = gens.iter().map(|(n, d)| (n.as_str(), *d)).collect();
    let na = a.generators().len();
    let nb = b.generators().len();
    let mut relations = Vec::new();
    for r in a.relations() {
        let mut exps = r.clone();
        exps.resize(na + nb, 0);
        relations.push(exps);
    }
    for r in b.relations() {
        let mut exps = vec![0u16; na];
        exps.extend_from_slice(r);
        relations.push(exps);
    }
    let ring = RingPresentation::free(a.domain(), &refs, a.truncation() + b.truncation())
        .expect("tensor generators are valid");
    RingPresentation::new(
        ring.domain(),
        ring.generators().to_vec(),
        ring.truncation(),
        relations,
    )
    .expect("tensor relations are valid")
}

/// Generator images realizing `source` inside `target`, starting at the
/// given generator offset.
pub(crate) fn embedding_images<C: Coefficient>(
    source: &Ring,
    target: &Ring,
    offset: usize,
) -> Vec<Poly<C>> {
    (0..source.generators().len())
        .map(|i| Poly::generator(target, offset + i))
        .collect()
}

/// Tensor two rule tables along embeddings; missing rules on either side
/// leave the product missing too.
fn tensor_actions(
    ring: &Ring,
    left: &Result<SqAction, String>,
    embed_left: &[Mod2Poly],
    right: &Result<SqAction, String>,
    embed_right: &[Mod2Poly],
) -> Result<Result<SqAction, String>, ConjugationError> {
    let (a, b) = match (left, right) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Ok(Err(format!("factor has no rules: {}", e))),
    };
    let mut rows = Vec::new();
    for (g, generator) in a.ring().generators().iter().enumerate() {
        let _ = generator;
        let d = a.ring().generators()[g].degree;
        rows.push(
            (0..=d)
                .map(|i| a.rule(g, i).substitute(ring, embed_left))
                .collect(),
        );
    }
    for (g, generator) in b.ring().generators().iter().enumerate() {
        let _ = generator;
        let d = b.ring().generators()[g].degree;
        rows.push(
            (0..=d)
                .map(|i| b.rule(g, i).substitute(ring, embed_right))
                .collect(),
        );
    }
    SqAction::new(ring, rows)
        .map_err(ConjugationError::BadSqRules)
        .map(Ok)
}

/// Rank of a bit matrix with `ncols` columns, rows as u64 words.
fn f2_rank(mut rows: Vec<Vec<u64>>, ncols: usize) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        let (w, b) = (col / 64, col % 64);
        let pivot = (rank..rows.len()).find(|&r| rows[r][w] >> b & 1 == 1);
        if let Some(p) = pivot {
            rows.swap(rank, p);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[w] >> b & 1 == 1 {
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Solve the augmented system (columns 0..ncols unknowns, column ncols the
/// right-hand side).  Returns an assignment or None if inconsistent.
fn f2_solve(mut rows: Vec<Vec<u64>>, ncols: usize) -> Option<Vec<bool>> {
    let get = |row: &Vec<u64>, c: usize| row[c / 64] >> (c % 64) & 1 == 1;
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut rank = 0;
    for col in 0..ncols {
        let pivot = (rank..rows.len()).find(|&r| get(&rows[r], col));
        if let Some(p) = pivot {
            rows.swap(rank, p);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && get(row, col) {
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        *x ^= y;
                    }
                }
            }
            pivot_of_col[col] = Some(rank);
            rank += 1;
        }
    }
    // Inconsistent if any zero row has rhs 1.
    for row in rows.iter().skip(rank) {
        if get(row, ncols) {
            return None;
        }
    }
    let mut solution = vec![false; ncols];
    for (col, p) in pivot_of_col.iter().enumerate() {
        if let Some(r) = p {
            solution[col] = get(&rows[*r], ncols);
        }
    }
    Some(solution)
}

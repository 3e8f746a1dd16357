//! Truncated graded polynomial rings with monomial relations, over the
//! integers or over F2.
//!
//! A ring presentation lists named generators with positive degrees, a hard
//! truncation degree `D` (everything above `D` is identically zero), and a
//! set of monomial relations (each listed monomial, and hence every multiple
//! of it, is zero).  Elements are kept in a canonical sparse form: a sorted
//! term map from monomials to nonzero coefficients, with relation multiples
//! and over-degree monomials already removed.  All arithmetic is exact;
//! integer coefficients are arbitrary precision.

mod parse;

pub use parse::{parse_poly, parse_poly_at, OverflowPolicy, ParseError, ParseErrorKind, Pos};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum RingError {
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("generator `{0}` has degree 0; generators must have positive degree")]
    ZeroDegreeGenerator(String),
    #[error("generator `{0}` has odd degree {1}; integral rings allow only even degrees")]
    OddIntegralGenerator(String, u32),
    #[error("invalid generator name `{0}`")]
    BadGeneratorName(String),
}

/// Coefficient domain of a ring presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Int,
    Mod2,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Int => write!(f, "Z"),
            Domain::Mod2 => write!(f, "F2"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

/// A truncated graded polynomial ring presentation.
///
/// Invariants: generator names are unique and nonempty; degrees are positive;
/// integral presentations have even-degree generators only (so that graded
/// commutativity carries no signs).  Relation monomials of degree above the
/// truncation are tolerated: they are redundant for reduction but still mark
/// their multiples as killed by a relation rather than by the degree cap,
/// which the expression parser distinguishes.
#[derive(Debug, PartialEq, Eq)]
pub struct RingPresentation {
    domain: Domain,
    generators: Vec<Generator>,
    truncation: u32,
    relations: Vec<Vec<u16>>,
}

pub type Ring = Arc<RingPresentation>;

impl RingPresentation {
    pub fn new(
        domain: Domain,
        generators: Vec<Generator>,
        truncation: u32,
        relations: Vec<Vec<u16>>,
    ) -> Result<Ring, RingError> {
        for (i, g) in generators.iter().enumerate() {
            if g.name.is_empty()
                || !g.name.chars().next().unwrap().is_ascii_alphabetic()
                || !g.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(RingError::BadGeneratorName(g.name.clone()));
            }
            if g.degree == 0 {
                return Err(RingError::ZeroDegreeGenerator(g.name.clone()));
            }
            if domain == Domain::Int && g.degree % 2 != 0 {
                return Err(RingError::OddIntegralGenerator(g.name.clone(), g.degree));
            }
            if generators[..i].iter().any(|h| h.name == g.name) {
                return Err(RingError::DuplicateGenerator(g.name.clone()));
            }
        }
        let n = generators.len();
        let mut relations: Vec<Vec<u16>> = relations
            .into_iter()
            .map(|mut r| {
                r.resize(n, 0);
                r
            })
            .collect();
        relations.sort();
        relations.dedup();
        Ok(Arc::new(RingPresentation {
            domain,
            generators,
            truncation,
            relations,
        }))
    }

    /// Convenience constructor: `(name, degree)` pairs, no relations.
    pub fn free(domain: Domain, gens: &[(&str, u32)], truncation: u32) -> Result<Ring, RingError> {
        let generators = gens
            .iter()
            .map(|(n, d)| Generator {
                name: n.to_string(),
                degree: *d,
            })
            .collect();
        RingPresentation::new(domain, generators, truncation, Vec::new())
    }

    /// The same presentation with F2 coefficients.
    pub fn mod2_companion(&self) -> Ring {
        Arc::new(RingPresentation {
            domain: Domain::Mod2,
            generators: self.generators.clone(),
            truncation: self.truncation,
            relations: self.relations.clone(),
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn relations(&self) -> &[Vec<u16>] {
        &self.relations
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn degree_of_exps(&self, exps: &[u16]) -> u32 {
        exps.iter()
            .zip(&self.generators)
            .map(|(e, g)| *e as u32 * g.degree)
            .sum()
    }

    fn killed_by_relation(&self, exps: &[u16]) -> bool {
        self.relations
            .iter()
            .any(|r| r.iter().zip(exps).all(|(a, b)| a <= b))
    }

    /// Whether the monomial is zero in this ring, and why.  `None` means it
    /// survives reduction.
    fn kill_reason(&self, exps: &[u16]) -> Option<KillReason> {
        if self.killed_by_relation(exps) {
            Some(KillReason::Relation)
        } else if self.degree_of_exps(exps) > self.truncation {
            Some(KillReason::Truncation)
        } else {
            None
        }
    }

    /// All surviving monomials of the given degree, in canonical term order.
    pub fn monomial_basis(self: &Ring, degree: u32) -> Vec<Monomial> {
        if degree > self.truncation {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut exps = vec![0u16; self.generators.len()];
        self.basis_rec(0, degree, &mut exps, &mut out);
        out.sort();
        out
    }

    fn basis_rec(self: &Ring, idx: usize, remaining: u32, exps: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if remaining == 0 {
            if !self.killed_by_relation(exps) {
                out.push(Monomial::from_exps(self, exps.clone()));
            }
            return;
        }
        if idx == self.generators.len() {
            return;
        }
        let d = self.generators[idx].degree;
        let max_e = remaining / d;
        for e in 0..=max_e {
            exps[idx] = e as u16;
            self.basis_rec(idx + 1, remaining - e * d, exps, out);
        }
        exps[idx] = 0;
    }

    /// Rank of the degree-`d` piece of the underlying graded module.
    pub fn rank(self: &Ring, degree: u32) -> usize {
        self.monomial_basis(degree).len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum KillReason {
    Relation,
    Truncation,
}

/// A monomial in a fixed ring presentation: a dense exponent vector indexed
/// by generator position, with the weighted degree cached so the term order
/// (degree first, then reverse-lexicographic on exponents) needs no ring
/// lookup.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    degree: u32,
    exps: Vec<u16>,
}

impl Monomial {
    pub fn unit(ring: &Ring) -> Monomial {
        Monomial {
            degree: 0,
            exps: vec![0; ring.generators().len()],
        }
    }

    pub fn from_exps(ring: &Ring, exps: Vec<u16>) -> Monomial {
        assert_eq!(exps.len(), ring.generators().len(), "exponent vector length");
        let degree = ring.degree_of_exps(&exps);
        Monomial { degree, exps }
    }

    pub fn generator(ring: &Ring, idx: usize) -> Monomial {
        let mut exps = vec![0; ring.generators().len()];
        exps[idx] = 1;
        Monomial::from_exps(ring, exps)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn is_unit(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn exponent_of(&self, idx: usize) -> u16 {
        self.exps[idx]
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let exps: Vec<u16> = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
            .collect();
        Monomial {
            degree: self.degree + other.degree,
            exps,
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    pub fn display(&self, ring: &RingPresentation) -> String {
        if self.is_unit() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 1 {
                parts.push(ring.generators()[i].name.clone());
            } else if e > 1 {
                parts.push(format!("{}^{}", ring.generators()[i].name, e));
            }
        }
        parts.join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Coefficient arithmetic shared by the two supported domains.
pub trait Coefficient: Clone + PartialEq + Eq + std::fmt::Debug {
    const DOMAIN: Domain;
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn from_bigint(n: &BigInt) -> Self;
    /// Sign and absolute value as printed.
    fn render(&self) -> (bool, String);
}

impl Coefficient for BigInt {
    const DOMAIN: Domain = Domain::Int;
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn one() -> Self {
        <BigInt as One>::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_bigint(n: &BigInt) -> Self {
        n.clone()
    }
    fn render(&self) -> (bool, String) {
        (self.is_negative(), self.abs().to_string())
    }
}

/// The field with two elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct F2(pub bool);

impl Coefficient for F2 {
    const DOMAIN: Domain = Domain::Mod2;
    fn zero() -> Self {
        F2(false)
    }
    fn one() -> Self {
        F2(true)
    }
    fn add(&self, other: &Self) -> Self {
        F2(self.0 ^ other.0)
    }
    fn neg(&self) -> Self {
        *self
    }
    fn mul(&self, other: &Self) -> Self {
        F2(self.0 & other.0)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
    fn from_bigint(n: &BigInt) -> Self {
        F2(n.bit(0))
    }
    fn render(&self) -> (bool, String) {
        (false, "1".to_string())
    }
}

/// An element of a truncated graded polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly<C: Coefficient> {
    ring: Ring,
    terms: BTreeMap<Monomial, C>,
}

pub type IntPoly = Poly<BigInt>;
pub type Mod2Poly = Poly<F2>;

fn same_ring(a: &Ring, b: &Ring) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl<C: Coefficient> Poly<C> {
    pub fn zero(ring: &Ring) -> Poly<C> {
        assert_eq!(
            ring.domain(),
            C::DOMAIN,
            "coefficient type does not match ring domain"
        );
        Poly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Ring, c: C) -> Poly<C> {
        let mut p = Poly::zero(ring);
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(ring), c);
        }
        p
    }

    pub fn one(ring: &Ring) -> Poly<C> {
        Poly::constant(ring, C::one())
    }

    pub fn generator(ring: &Ring, idx: usize) -> Poly<C> {
        let mut p = Poly::zero(ring);
        let m = Monomial::generator(ring, idx);
        if ring.kill_reason(m.exps()).is_none() {
            p.terms.insert(m, C::one());
        }
        p
    }

    pub fn generator_by_name(ring: &Ring, name: &str) -> Option<Poly<C>> {
        ring.gen_index(name).map(|i| Poly::generator(ring, i))
    }

    pub fn monomial(ring: &Ring, m: Monomial) -> Poly<C> {
        let mut p = Poly::zero(ring);
        if ring.kill_reason(m.exps()).is_none() {
            p.terms.insert(m, C::one());
        }
        p
    }

    pub fn from_terms(ring: &Ring, terms: impl IntoIterator<Item = (Monomial, C)>) -> Poly<C> {
        let mut p = Poly::zero(ring);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() || self.ring.kill_reason(m.exps()).is_some() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(m, c)| m.is_unit() && *c == C::one())
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.terms
            .iter()
            .next()
            .filter(|(m, _)| m.is_unit())
            .map(|(_, c)| c.clone())
            .unwrap_or_else(C::zero)
    }

    /// Largest degree carrying a term; zero for the zero element.
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().next_back().map_or(0, |m| m.degree())
    }

    /// `Some(d)` if the element is nonzero and concentrated in degree `d`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let first = it.next()?.degree();
        if self.terms.keys().next_back().unwrap().degree() == first {
            Some(first)
        } else {
            None
        }
    }

    pub fn homogeneous_part(&self, degree: u32) -> Poly<C> {
        let mut p = Poly::zero(&self.ring);
        for (m, c) in &self.terms {
            if m.degree() == degree {
                p.terms.insert(m.clone(), c.clone());
            }
        }
        p
    }

    /// Drop all terms of degree strictly above `degree`.
    pub fn truncate_above(&self, degree: u32) -> Poly<C> {
        let mut p = Poly::zero(&self.ring);
        for (m, c) in &self.terms {
            if m.degree() <= degree {
                p.terms.insert(m.clone(), c.clone());
            }
        }
        p
    }

    /// The degrees that carry terms, ascending.
    pub fn support_degrees(&self) -> Vec<u32> {
        let mut ds: Vec<u32> = self.terms.keys().map(|m| m.degree()).collect();
        ds.dedup();
        ds
    }

    pub fn neg(&self) -> Poly<C> {
        let mut p = Poly::zero(&self.ring);
        for (m, c) in &self.terms {
            p.terms.insert(m.clone(), c.neg());
        }
        p
    }

    pub fn add_ref(&self, other: &Poly<C>) -> Poly<C> {
        assert!(
            same_ring(&self.ring, &other.ring),
            "ring mismatch in addition"
        );
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    pub fn sub_ref(&self, other: &Poly<C>) -> Poly<C> {
        self.add_ref(&other.neg())
    }

    /// Multiplication; the flag reports whether any product monomial was
    /// discarded purely by the truncation degree (relation kills stay
    /// silent, matching the ring's defining quotient).
    pub fn mul_tracked(&self, other: &Poly<C>) -> (Poly<C>, bool) {
        assert!(
            same_ring(&self.ring, &other.ring),
            "ring mismatch in multiplication"
        );
        let mut p = Poly::zero(&self.ring);
        let mut truncated = false;
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c = c1.mul(c2);
                if c.is_zero() {
                    continue;
                }
                let m = m1.mul(m2);
                match self.ring.kill_reason(m.exps()) {
                    Some(KillReason::Relation) => {}
                    Some(KillReason::Truncation) => truncated = true,
                    None => p.add_term(m, c),
                }
            }
        }
        (p, truncated)
    }

    pub fn mul_ref(&self, other: &Poly<C>) -> Poly<C> {
        self.mul_tracked(other).0
    }

    pub fn pow_tracked(&self, e: u32) -> (Poly<C>, bool) {
        let mut result = Poly::one(&self.ring);
        let mut truncated = false;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                let (r, t) = result.mul_tracked(&base);
                result = r;
                truncated |= t;
            }
            e >>= 1;
            if e > 0 {
                let (b, t) = base.mul_tracked(&base);
                base = b;
                truncated |= t;
            }
        }
        (result, truncated)
    }

    pub fn pow(&self, e: u32) -> Poly<C> {
        self.pow_tracked(e).0
    }

    /// Substitute each generator by the corresponding image polynomial.
    /// Purely structural: no degree constraint is imposed here, so callers
    /// can realize degree-halving maps as well as degree-preserving ones.
    pub fn substitute(&self, target: &Ring, images: &[Poly<C>]) -> Poly<C> {
        assert_eq!(
            images.len(),
            self.ring.generators().len(),
            "one image per generator required"
        );
        for img in images {
            assert!(same_ring(img.ring(), target), "image outside target ring");
        }
        // Power table per generator, built lazily up to the needed exponent.
        let mut powers: Vec<Vec<Poly<C>>> = images
            .iter()
            .map(|img| vec![Poly::one(target), img.clone()])
            .collect();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul_ref(&images[i]);
                    powers[i].push(next);
                }
                term = term.mul_ref(&powers[i][e as usize]);
                if term.is_zero() {
                    break;
                }
            }
            out = out.add_ref(&term);
        }
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MapError {
    #[error("no image given for generator `{0}`")]
    MissingImage(String),
    #[error("image of `{gen}` is not homogeneous of degree {expected}")]
    DegreeMismatch { gen: String, expected: u32 },
}

/// Apply a degree-preserving ring map given by generator images.  Each image
/// must be zero or homogeneous of the generator's degree.
pub fn apply_ring_map<C: Coefficient>(
    p: &Poly<C>,
    target: &Ring,
    images: &[Poly<C>],
) -> Result<Poly<C>, MapError> {
    let gens = p.ring().generators();
    if images.len() != gens.len() {
        let missing = gens
            .get(images.len())
            .map(|g| g.name.clone())
            .unwrap_or_default();
        return Err(MapError::MissingImage(missing));
    }
    for (g, img) in gens.iter().zip(images) {
        if !img.is_zero() && img.homogeneous_degree() != Some(g.degree) {
            return Err(MapError::DegreeMismatch {
                gen: g.name.clone(),
                expected: g.degree,
            });
        }
    }
    Ok(p.substitute(target, images))
}

/// Reduce an integral element modulo 2.  The target must present the same
/// graded ring with F2 coefficients.
pub fn reduce_mod2(p: &IntPoly, target: &Ring) -> Mod2Poly {
    assert_eq!(target.domain(), Domain::Mod2, "target must be an F2 ring");
    assert_eq!(
        p.ring().generators(),
        target.generators(),
        "mod-2 companion must share generators"
    );
    assert_eq!(p.ring().truncation(), target.truncation());
    assert_eq!(p.ring().relations(), target.relations());
    let mut out = Poly::zero(target);
    for (m, c) in p.terms() {
        if c.bit(0) {
            out.add_term(Monomial::from_exps(target, m.exps().to_vec()), F2(true));
        }
    }
    out
}

impl<C: Coefficient> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let (sign_neg, abs) = c.render();
            if first {
                if sign_neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if sign_neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_unit() {
                write!(f, "{}", abs)?;
            } else if abs == "1" {
                write!(f, "{}", m.display(&self.ring))?;
            } else {
                write!(f, "{}*{}", abs, m.display(&self.ring))?;
            }
        }
        Ok(())
    }
}

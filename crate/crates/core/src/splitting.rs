//! Splitting-principle computation of Steenrod squares on symmetric classes.
//!
//! The j-th generator of a variable ring (degrees d, 2d, ..., kd with d = 1
//! or 2) is sent to the elementary symmetric polynomial e_j in `n_vars`
//! variables of degree d.  On a variable t the total square is t + t^2, so on
//! a monomial prod t_j^(a_j) the component Sq^(d*s) collects exponent bumps
//! s_j summing to s whose binomials C(a_j, s_j) are odd.  The image of a
//! symmetric polynomial is symmetric again and is rewritten in elementary
//! symmetric polynomials by repeatedly eliminating the lexicographically
//! leading partition; the rewrite is exact because e^mu has the monomial of
//! its defining partition as lex-leading term with coefficient one.
//!
//! Everything here works with mod-2 monomial sets and toggle (XOR) merges,
//! which keeps the binomial-coefficient collapse of Frobenius powers: the
//! expansion of e_j^(2^b) has one term per j-element subset of the variables.
//!
//! This module deliberately shares no code with the tabulated Steenrod rules
//! in `steenrod`; the two are compared against each other in tests.

use crate::algebra::{Domain, Mod2Poly, Monomial, Poly, Ring, RingPresentation};
use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::rc::Rc;

#[derive(Debug, thiserror::Error)]
pub enum SplitError {
    #[error("input ring must have generator degrees d, 2d, ..., kd with d = 1 or 2")]
    BadInputRing,
    #[error("input needs {0} symmetric generators but the oracle has only {1} variables")]
    TooFewVariables(usize, usize),
    #[error("Sq^{i} of a degree-{d} input exceeds the oracle degree cap {cap}")]
    DegreeCap { i: u32, d: u32, cap: u32 },
    #[error("rewrite failure: intermediate polynomial is not symmetric (implementation bug)")]
    RewriteFailure,
}

type TMono = Vec<u16>;
type TSet = HashSet<TMono>;

fn toggle(set: &mut TSet, m: TMono) {
    if !set.remove(&m) {
        set.insert(m);
    }
}

fn mul_sets(a: &TSet, b: &TSet) -> TSet {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut out = TSet::new();
    for x in small {
        for y in large {
            let m: TMono = x.iter().zip(y).map(|(p, q)| p + q).collect();
            toggle(&mut out, m);
        }
    }
    out
}

/// Splitting-principle Steenrod oracle over a fixed number of variables.
pub struct SplittingOracle {
    n_vars: usize,
    var_degree: u32,
    max_degree: u32,
    result_ring: Ring,
    expansions: RefCell<HashMap<TMono, Rc<TSet>>>,
}

impl SplittingOracle {
    /// `max_degree` caps the (actual, weighted) degree of any result; the
    /// oracle refuses queries beyond it rather than truncating.
    pub fn new(n_vars: usize, var_degree: u32, max_degree: u32) -> SplittingOracle {
        assert!(var_degree == 1 || var_degree == 2);
        assert!(n_vars > 0);
        let gens: Vec<(String, u32)> = (1..=n_vars)
            .map(|j| (format!("w{}", j), var_degree * j as u32))
            .collect();
        let gen_refs: Vec<(&str, u32)> = gens.iter().map(|(n, d)| (n.as_str(), *d)).collect();
        let result_ring =
            RingPresentation::free(Domain::Mod2, &gen_refs, max_degree).expect("oracle ring");
        SplittingOracle {
            n_vars,
            var_degree,
            max_degree,
            result_ring,
            expansions: RefCell::new(HashMap::new()),
        }
    }

    /// The ring the results live in: generators of degrees d, 2d, ..., nd.
    pub fn ring(&self) -> &Ring {
        &self.result_ring
    }

    /// Expansion of the product of elementary symmetric polynomials with
    /// exponent vector `mu` (entry j-1 is the exponent of e_j).
    fn expand(&self, mu: &[u16]) -> Rc<TSet> {
        if let Some(hit) = self.expansions.borrow().get(mu) {
            return hit.clone();
        }
        let mut acc: TSet = TSet::new();
        acc.insert(vec![0u16; self.n_vars]);
        for (idx, &e) in mu.iter().enumerate() {
            let j = idx + 1;
            let mut bit = 0u32;
            let mut rem = e;
            while rem > 0 {
                if rem & 1 == 1 {
                    acc = mul_sets(&acc, &self.elementary_power_of_two(j, bit));
                }
                rem >>= 1;
                bit += 1;
            }
        }
        let rc = Rc::new(acc);
        self.expansions
            .borrow_mut()
            .insert(mu.to_vec(), rc.clone());
        rc
    }

    /// e_j^(2^bit): one term per j-subset, every chosen variable raised to
    /// 2^bit.
    fn elementary_power_of_two(&self, j: usize, bit: u32) -> TSet {
        let mut out = TSet::new();
        let mut subset: Vec<usize> = (0..j).collect();
        loop {
            let mut m = vec![0u16; self.n_vars];
            for &v in &subset {
                m[v] = 1u16 << bit;
            }
            out.insert(m);
            // Next j-subset of {0..n_vars-1} in lexicographic order.
            let mut i = j;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if subset[i] < self.n_vars - (j - i) {
                    subset[i] += 1;
                    for k in i + 1..j {
                        subset[k] = subset[k - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// Sq^(var_degree * sigma) on a set of variable monomials.
    fn sq_set(&self, set: &TSet, sigma: u32) -> TSet {
        let mut out = TSet::new();
        let mut scratch = Vec::with_capacity(self.n_vars);
        for alpha in set {
            self.sq_monomial_rec(alpha, 0, sigma, &mut scratch, &mut out);
            scratch.clear();
        }
        out
    }

    /// DFS over exponent bumps: at each coordinate pick a submask s of the
    /// exponent's bits (so C(a, s) is odd), spending s from the budget.
    fn sq_monomial_rec(
        &self,
        alpha: &[u16],
        idx: usize,
        budget: u32,
        picked: &mut Vec<u16>,
        out: &mut TSet,
    ) {
        if idx == alpha.len() {
            if budget == 0 {
                let m: TMono = alpha.iter().zip(picked.iter()).map(|(a, s)| a + s).collect();
                toggle(out, m);
            }
            return;
        }
        let remaining: u32 = alpha[idx..].iter().map(|&a| a as u32).sum();
        if budget > remaining {
            return;
        }
        let a = alpha[idx];
        // Enumerate submasks of a, including 0.
        let mut s = a;
        loop {
            if (s as u32) <= budget {
                picked.push(s);
                self.sq_monomial_rec(alpha, idx + 1, budget - s as u32, picked, out);
                picked.pop();
            }
            if s == 0 {
                break;
            }
            s = (s - 1) & a;
        }
    }

    /// Rewrite a symmetric monomial set as exponent vectors over the
    /// elementary symmetric polynomials.
    fn rewrite(&self, mut f: TSet) -> Result<Vec<TMono>, SplitError> {
        let mut result = Vec::new();
        while !f.is_empty() {
            let lambda = f.iter().max().unwrap().clone();
            if lambda.windows(2).any(|w| w[0] < w[1]) {
                return Err(SplitError::RewriteFailure);
            }
            let mut mu = vec![0u16; self.n_vars];
            for j in 0..self.n_vars {
                let next = if j + 1 < self.n_vars { lambda[j + 1] } else { 0 };
                mu[j] = lambda[j] - next;
            }
            let expansion = self.expand(&mu);
            debug_assert!(expansion.contains(&lambda));
            for m in expansion.iter() {
                toggle(&mut f, m.clone());
            }
            result.push(mu);
        }
        Ok(result)
    }

    /// Sq^i of `p`, computed through the variable ring.  `p` must live in a
    /// ring whose generator degrees are exactly d, 2d, ..., kd for this
    /// oracle's variable degree d; generator k maps to e_k.  The result lives
    /// in this oracle's ring, with e_j = 0 for j > n_vars built in.
    pub fn sq(&self, i: u32, p: &Mod2Poly) -> Result<Mod2Poly, SplitError> {
        let order = symmetric_generator_order(p.ring(), self.var_degree)
            .ok_or(SplitError::BadInputRing)?;
        if order.len() > self.n_vars {
            return Err(SplitError::TooFewVariables(order.len(), self.n_vars));
        }
        let d = p.max_degree();
        if !p.is_zero() && d + i > self.max_degree {
            return Err(SplitError::DegreeCap {
                i,
                d,
                cap: self.max_degree,
            });
        }
        if i % self.var_degree != 0 {
            // Odd squares vanish on classes built from even-degree variables.
            return Ok(Poly::zero(&self.result_ring));
        }
        let sigma = i / self.var_degree;
        let mut image = TSet::new();
        for (m, _) in p.terms() {
            let mut mu = vec![0u16; self.n_vars];
            for (pos, &gen_idx) in order.iter().enumerate() {
                mu[pos] = m.exponent_of(gen_idx);
            }
            let expansion = self.expand(&mu);
            for t in expansion.iter() {
                toggle(&mut image, t.clone());
            }
        }
        let squared = self.sq_set(&image, sigma);
        let rewritten = self.rewrite(squared)?;
        let terms = rewritten.into_iter().map(|mu| {
            (
                Monomial::from_exps(&self.result_ring, mu),
                crate::algebra::F2(true),
            )
        });
        Ok(Poly::from_terms(&self.result_ring, terms))
    }
}

/// If the ring's generator degrees are exactly d, 2d, ..., kd, return the
/// generator indices sorted by degree (position j-1 holds the degree-jd
/// generator).
pub fn symmetric_generator_order(ring: &Ring, var_degree: u32) -> Option<Vec<usize>> {
    let gens = ring.generators();
    if gens.is_empty() {
        return None;
    }
    let mut order: Vec<usize> = (0..gens.len()).collect();
    order.sort_by_key(|&i| gens[i].degree);
    for (pos, &i) in order.iter().enumerate() {
        if gens[i].degree != var_degree * (pos as u32 + 1) {
            return None;
        }
    }
    Some(order)
}

/// Sq^i of a polynomial in Stiefel-Whitney-type generators (degrees
/// 1, 2, ..., k), computed by the splitting principle with `n_vars`
/// degree-one variables.  The result lives in a fresh ring with `n_vars`
/// generators, where classes beyond the variable count vanish identically.
pub fn oracle_sq(i: u32, p: &Mod2Poly, n_vars: usize) -> Result<Mod2Poly, SplitError> {
    let oracle = SplittingOracle::new(n_vars, 1, p.max_degree() + i);
    oracle.sq(i, p)
}

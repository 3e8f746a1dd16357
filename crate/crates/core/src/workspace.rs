//! Semantic assembly of definition files into live models.
//!
//! Items are processed in declaration order; a block may reference any name
//! declared earlier, in the same file or a previously loaded one.  Loading
//! performs only structural construction — the deferred semantic checks
//! (kappa bijectivity, bundle compatibility, map relations, manifold
//! transfer) stay with the `verify` suites, so a file carrying wrong
//! mathematics still loads and is then *reported* as wrong rather than
//! rejected as unreadable.

use crate::algebra::{
    parse_poly_at, Generator, Domain, IntPoly, Mod2Poly, Monomial, OverflowPolicy, ParseError,
    Pos, Ring, RingPresentation,
};
use crate::chern::{MapModel, RealBundleModel};
use crate::conjugation::SpaceModel;
use crate::deffile::{
    parse_file, BundleBlock, Expr, FixedBlock, Item, KappaDecl, ManifoldBlock, MapBlock,
    RawMonomial, SpaceBlock,
};
use crate::manifolds::ManifoldModel;
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

/// The Borel-class name reserved in every fixed ring (restrictions are
/// polynomials in it).
const RESERVED_FIXED: &str = crate::conjugation::U_NAME;

#[derive(Clone, Copy, Debug)]
pub struct LoadOptions {
    /// Truncation degree for spaces without an explicit `truncate`.
    pub default_cap: u32,
    /// Whether expressions may silently lose terms to the truncation.
    pub overflow: OverflowPolicy,
}

impl Default for LoadOptions {
    fn default() -> LoadOptions {
        LoadOptions {
            default_cap: 16,
            overflow: OverflowPolicy::Error,
        }
    }
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
#[error("{file}:{line}:{col}: error[{code}]: {message}")]
pub struct WorkspaceError {
    pub file: String,
    pub line: u32,
    pub col: u32,
    /// Stable machine-matchable code, e.g. `unknown-reference`.
    pub code: &'static str,
    pub message: String,
}

impl WorkspaceError {
    fn new(file: &str, pos: Pos, code: &'static str, message: impl Into<String>) -> WorkspaceError {
        WorkspaceError {
            file: file.to_string(),
            line: pos.line,
            col: pos.col,
            code,
            message: message.into(),
        }
    }

    fn from_parse(file: &str, e: ParseError) -> WorkspaceError {
        WorkspaceError {
            file: file.to_string(),
            line: e.line,
            col: e.col,
            code: e.kind.code(),
            message: e.message,
        }
    }
}

/// Everything the command-line front end can name: spaces, bundles,
/// manifolds, and maps, with names unique across all four kinds.
#[derive(Debug, Default)]
pub struct Workspace {
    spaces: BTreeMap<String, Arc<SpaceModel>>,
    bundles: BTreeMap<String, RealBundleModel>,
    manifolds: BTreeMap<String, ManifoldModel>,
    maps: BTreeMap<String, MapModel>,
}

/// The catalogue of models shipped with the tool.
pub const CATALOG_SOURCE: &str = include_str!("catalog.defs");

pub fn standard_catalogue(opts: &LoadOptions) -> Result<Workspace, WorkspaceError> {
    let mut ws = Workspace::default();
    ws.load_str("catalog.defs", CATALOG_SOURCE, opts)?;
    Ok(ws)
}

impl Workspace {
    pub fn new() -> Workspace {
        Workspace::default()
    }

    pub fn spaces(&self) -> &BTreeMap<String, Arc<SpaceModel>> {
        &self.spaces
    }

    pub fn bundles(&self) -> &BTreeMap<String, RealBundleModel> {
        &self.bundles
    }

    pub fn manifolds(&self) -> &BTreeMap<String, ManifoldModel> {
        &self.manifolds
    }

    pub fn maps(&self) -> &BTreeMap<String, MapModel> {
        &self.maps
    }

    pub fn space(&self, name: &str) -> Option<&Arc<SpaceModel>> {
        self.spaces.get(name)
    }

    pub fn bundle(&self, name: &str) -> Option<&RealBundleModel> {
        self.bundles.get(name)
    }

    pub fn manifold(&self, name: &str) -> Option<&ManifoldModel> {
        self.manifolds.get(name)
    }

    pub fn map_model(&self, name: &str) -> Option<&MapModel> {
        self.maps.get(name)
    }

    pub fn load_path(&mut self, path: &Path, opts: &LoadOptions) -> Result<(), WorkspaceError> {
        let file = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| {
            WorkspaceError::new(
                &file,
                Pos { line: 1, col: 1 },
                "io",
                format!("cannot read file: {}", e),
            )
        })?;
        self.load_str(&file, &text, opts)
    }

    pub fn load_str(
        &mut self,
        file: &str,
        text: &str,
        opts: &LoadOptions,
    ) -> Result<(), WorkspaceError> {
        let items = parse_file(text)
            .map_err(|e| WorkspaceError::new(file, e.pos, "syntax", e.message))?;
        for item in items {
            let name = item.name().to_string();
            if let Some(kind) = self.kind_of(&name) {
                return Err(WorkspaceError::new(
                    file,
                    item.pos(),
                    "duplicate-name",
                    format!("'{}' is already declared as a {}", name, kind),
                ));
            }
            match item {
                Item::Space(block) => {
                    let space = build_space(file, &block, opts)?;
                    self.spaces.insert(name, Arc::new(space));
                }
                Item::Bundle(block) => {
                    let bundle = self.build_bundle(file, &block, opts)?;
                    self.bundles.insert(name, bundle);
                }
                Item::Manifold(block) => {
                    let manifold = self.build_manifold(file, &block, opts)?;
                    self.manifolds.insert(name, manifold);
                }
                Item::Map(block) => {
                    let map = self.build_map(file, &block, opts)?;
                    self.maps.insert(name, map);
                }
            }
        }
        Ok(())
    }

    fn kind_of(&self, name: &str) -> Option<&'static str> {
        if self.spaces.contains_key(name) {
            Some("space")
        } else if self.bundles.contains_key(name) {
            Some("bundle")
        } else if self.manifolds.contains_key(name) {
            Some("manifold")
        } else if self.maps.contains_key(name) {
            Some("map")
        } else {
            None
        }
    }

    fn resolve_space(
        &self,
        file: &str,
        named: &Option<(String, Pos)>,
        owner: &str,
        field: &str,
        pos: Pos,
    ) -> Result<&Arc<SpaceModel>, WorkspaceError> {
        let (name, npos) = named.as_ref().ok_or_else(|| {
            WorkspaceError::new(
                file,
                pos,
                "missing-field",
                format!("{} must declare '{}'", owner, field),
            )
        })?;
        self.spaces.get(name).ok_or_else(|| {
            WorkspaceError::new(
                file,
                *npos,
                "unknown-reference",
                format!("unknown space '{}'", name),
            )
        })
    }

    fn build_bundle(
        &self,
        file: &str,
        block: &BundleBlock,
        opts: &LoadOptions,
    ) -> Result<RealBundleModel, WorkspaceError> {
        let owner = format!("bundle '{}'", block.name);
        let base = self.resolve_space(file, &block.base, &owner, "base", block.pos)?;
        let chern_expr = require(file, &block.chern, &owner, "chern", block.pos)?;
        let sw_expr = require(file, &block.sw_fixed, &owner, "sw_fixed", block.pos)?;
        let total_chern: IntPoly = parse_expr(file, chern_expr, base.integral_ring(), opts)?;
        let total_sw_fixed: Mod2Poly = parse_expr(file, sw_expr, base.fixed_ring(), opts)?;
        RealBundleModel::new(&block.name, base, total_chern, total_sw_fixed)
            .map_err(|e| WorkspaceError::new(file, block.pos, "bad-model", e.to_string()))
    }

    fn build_manifold(
        &self,
        file: &str,
        block: &ManifoldBlock,
        opts: &LoadOptions,
    ) -> Result<ManifoldModel, WorkspaceError> {
        let owner = format!("manifold '{}'", block.name);
        let space = self.resolve_space(file, &block.space, &owner, "space", block.pos)?;
        let (dimension, _) = *block.dimension.as_ref().ok_or_else(|| {
            WorkspaceError::new(
                file,
                block.pos,
                "missing-field",
                format!("{} must declare 'dimension'", owner),
            )
        })?;
        let total_sw: Mod2Poly = parse_expr(
            file,
            require(file, &block.total_sw, &owner, "total_sw", block.pos)?,
            space.mod2_ring(),
            opts,
        )?;
        let fixed_total_sw: Mod2Poly = parse_expr(
            file,
            require(file, &block.fixed_total_sw, &owner, "fixed_total_sw", block.pos)?,
            space.fixed_ring(),
            opts,
        )?;
        let fundamental = resolve_monomial(
            file,
            require(file, &block.fundamental, &owner, "fundamental", block.pos)?,
            space.mod2_ring(),
        )?;
        let fixed_fundamental = resolve_monomial(
            file,
            require(
                file,
                &block.fixed_fundamental,
                &owner,
                "fixed_fundamental",
                block.pos,
            )?,
            space.fixed_ring(),
        )?;
        ManifoldModel::new(
            &block.name,
            space,
            dimension,
            total_sw,
            fixed_total_sw,
            fundamental,
            fixed_fundamental,
        )
        .map_err(|e| WorkspaceError::new(file, block.pos, "bad-model", e.to_string()))
    }

    fn build_map(
        &self,
        file: &str,
        block: &MapBlock,
        opts: &LoadOptions,
    ) -> Result<MapModel, WorkspaceError> {
        let owner = format!("map '{}'", block.name);
        let source = self.resolve_space(file, &block.source, &owner, "source", block.pos)?;
        let target = self.resolve_space(file, &block.target, &owner, "target", block.pos)?;
        let images = gather_images(
            file,
            &block.images,
            source.integral_ring(),
            target.integral_ring(),
            &owner,
            block.pos,
            opts,
        )?;
        MapModel::new(&block.name, source, target, images)
            .map_err(|e| WorkspaceError::new(file, block.pos, "bad-model", e.to_string()))
    }
}

fn require<'a, T>(
    file: &str,
    field: &'a Option<T>,
    owner: &str,
    name: &str,
    pos: Pos,
) -> Result<&'a T, WorkspaceError> {
    field.as_ref().ok_or_else(|| {
        WorkspaceError::new(
            file,
            pos,
            "missing-field",
            format!("{} must declare '{}'", owner, name),
        )
    })
}

fn parse_expr<C: crate::algebra::Coefficient>(
    file: &str,
    expr: &Expr,
    ring: &Ring,
    opts: &LoadOptions,
) -> Result<crate::algebra::Poly<C>, WorkspaceError> {
    parse_poly_at(&expr.text, ring, opts.overflow, expr.pos)
        .map_err(|e| WorkspaceError::from_parse(file, e))
}

/// Turn a declared monomial into an exponent vector over `names`.
fn monomial_exps(
    file: &str,
    m: &RawMonomial,
    names: &[&str],
    context: &str,
) -> Result<Vec<u16>, WorkspaceError> {
    let mut exps = vec![0u16; names.len()];
    for factor in &m.factors {
        let idx = names.iter().position(|n| *n == factor.name).ok_or_else(|| {
            WorkspaceError::new(
                file,
                factor.pos,
                "unknown-generator",
                format!("unknown generator '{}' in {}", factor.name, context),
            )
        })?;
        exps[idx] = exps[idx].checked_add(factor.exponent).ok_or_else(|| {
            WorkspaceError::new(
                file,
                factor.pos,
                "number",
                format!("exponent of '{}' out of range", factor.name),
            )
        })?;
    }
    Ok(exps)
}

fn resolve_monomial(
    file: &str,
    m: &RawMonomial,
    ring: &Ring,
) -> Result<Monomial, WorkspaceError> {
    let names: Vec<&str> = ring.generators().iter().map(|g| g.name.as_str()).collect();
    let exps = monomial_exps(file, m, &names, "the fundamental class")?;
    Ok(Monomial::from_exps(ring, exps))
}

fn build_ring(
    file: &str,
    domain: Domain,
    generators: &[crate::deffile::GeneratorDecl],
    relations: &[RawMonomial],
    truncation: u32,
) -> Result<Ring, WorkspaceError> {
    let names: Vec<&str> = generators.iter().map(|g| g.name.as_str()).collect();
    let mut rels = Vec::new();
    for r in relations {
        rels.push(monomial_exps(file, r, &names, "the relation")?);
    }
    let gens: Vec<Generator> = generators
        .iter()
        .map(|g| Generator {
            name: g.name.clone(),
            degree: g.degree,
        })
        .collect();
    RingPresentation::new(domain, gens, truncation, rels).map_err(|e| {
        let pos = generators.first().map_or(Pos { line: 1, col: 1 }, |g| g.pos);
        WorkspaceError::new(file, pos, "bad-ring", e.to_string())
    })
}

/// Collect `name -> expr` declarations into a per-source-generator image
/// vector, rejecting unknown names, duplicates, and gaps.
fn gather_images<C: crate::algebra::Coefficient>(
    file: &str,
    decls: &[KappaDecl],
    source: &Ring,
    image_ring: &Ring,
    owner: &str,
    pos: Pos,
    opts: &LoadOptions,
) -> Result<Vec<crate::algebra::Poly<C>>, WorkspaceError> {
    let gens = source.generators();
    let mut images: Vec<Option<crate::algebra::Poly<C>>> = vec![None; gens.len()];
    for decl in decls {
        let idx = source.gen_index(&decl.generator).ok_or_else(|| {
            WorkspaceError::new(
                file,
                decl.pos,
                "unknown-generator",
                format!("unknown generator '{}'", decl.generator),
            )
        })?;
        if images[idx].is_some() {
            return Err(WorkspaceError::new(
                file,
                decl.pos,
                "duplicate-rule",
                format!("'{}' already has an image", decl.generator),
            ));
        }
        images[idx] = Some(parse_expr(file, &decl.image, image_ring, opts)?);
    }
    images
        .into_iter()
        .enumerate()
        .map(|(i, image)| {
            image.ok_or_else(|| {
                WorkspaceError::new(
                    file,
                    pos,
                    "missing-field",
                    format!("{} gives no image for '{}'", owner, gens[i].name),
                )
            })
        })
        .collect()
}

fn build_space(
    file: &str,
    block: &SpaceBlock,
    opts: &LoadOptions,
) -> Result<SpaceModel, WorkspaceError> {
    let cap = block.truncate.unwrap_or(opts.default_cap);
    let integral = build_ring(file, Domain::Int, &block.generators, &block.relations, cap)?;
    let fixed = build_fixed_ring(file, &block.fixed, cap / 2)?;
    let owner = format!("space '{}'", block.name);
    let kappa_images = gather_images(
        file,
        &block.kappa,
        &integral,
        &fixed,
        &owner,
        block.pos,
        opts,
    )?;
    let declared_sq = gather_sq_rules(file, &block.fixed, &fixed, opts)?;
    SpaceModel::new(
        &block.name,
        integral,
        fixed,
        kappa_images,
        declared_sq,
        block.trivial_involution,
    )
    .map_err(|e| WorkspaceError::new(file, block.pos, "bad-model", e.to_string()))
}

fn build_fixed_ring(
    file: &str,
    fixed: &FixedBlock,
    truncation: u32,
) -> Result<Ring, WorkspaceError> {
    for g in &fixed.generators {
        if g.name == RESERVED_FIXED {
            return Err(WorkspaceError::new(
                file,
                g.pos,
                "reserved-name",
                format!(
                    "'{}' is reserved for the Borel class; pick another fixed generator name",
                    RESERVED_FIXED
                ),
            ));
        }
    }
    build_ring(file, Domain::Mod2, &fixed.generators, &fixed.relations, truncation)
}

fn gather_sq_rules(
    file: &str,
    fixed: &FixedBlock,
    ring: &Ring,
    opts: &LoadOptions,
) -> Result<BTreeMap<usize, BTreeMap<u32, Mod2Poly>>, WorkspaceError> {
    let mut rules: BTreeMap<usize, BTreeMap<u32, Mod2Poly>> = BTreeMap::new();
    for decl in &fixed.sq_rules {
        let idx = ring.gen_index(&decl.generator).ok_or_else(|| {
            WorkspaceError::new(
                file,
                decl.pos,
                "unknown-generator",
                format!("unknown generator '{}' in sq rule", decl.generator),
            )
        })?;
        let rule: Mod2Poly = parse_expr(file, &decl.rule, ring, opts)?;
        if rules.entry(idx).or_default().insert(decl.index, rule).is_some() {
            return Err(WorkspaceError::new(
                file,
                decl.pos,
                "duplicate-rule",
                format!("duplicate sq rule for '{}' index {}", decl.generator, decl.index),
            ));
        }
    }
    Ok(rules)
}

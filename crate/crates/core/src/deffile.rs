//! Syntax for the declarative definition files: `space`, `bundle`,
//! `manifold`, and `map` blocks.
//!
//! This module is purely syntactic — it produces a positioned AST and never
//! builds rings.  Polynomial expressions are kept as raw text slices with
//! their file position, so the semantic layer (`workspace`) can hand them to
//! the ring-aware expression parser and still report errors at the original
//! location.  Relations and fundamental classes, which must be plain
//! monomials, are tokenized here into name/exponent factor lists.
//!
//! Grammar (whitespace-insensitive; `#` starts a line comment):
//!
//! ```text
//! file     := item*
//! item     := space | bundle | manifold | map
//! space    := 'space' name '{' spaceItem* '}'
//! spaceItem:= 'generator' name ':' nat ';'
//!           | 'relation' monomial ';'
//!           | 'truncate' nat ';'
//!           | 'trivial_involution' ';'
//!           | 'fixed' '{' fixedItem* '}'
//!           | 'kappa' name '->' expr ';'
//! fixedItem:= 'generator' name ':' nat ';'
//!           | 'relation' monomial ';'
//!           | 'sq' name nat '=' expr ';'
//! bundle   := 'bundle' name '{' bundleItem* '}'
//! bundleItem := 'base' name ';' | 'chern' '=' expr ';' | 'sw_fixed' '=' expr ';'
//! manifold := 'manifold' name '{' manifoldItem* '}'
//! manifoldItem := 'space' name ';' | 'dimension' nat ';'
//!           | 'total_sw' '=' expr ';' | 'fixed_total_sw' '=' expr ';'
//!           | 'fundamental' monomial ';' | 'fixed_fundamental' monomial ';'
//! map      := 'map' name '{' mapItem* '}'
//! mapItem  := 'source' name ';' | 'target' name ';' | 'send' name '->' expr ';'
//! monomial := factor ('*' factor)* ; factor := name ('^' nat)?
//! name     := [A-Za-z][A-Za-z0-9_]* ; nat := [0-9]+
//! expr     := anything up to the closing ';' (expression grammar)
//! ```

use crate::algebra::Pos;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: error[syntax]: {}",
            self.pos.line, self.pos.col, self.message
        )
    }
}

impl std::error::Error for SyntaxError {}

fn err(pos: Pos, message: impl Into<String>) -> SyntaxError {
    SyntaxError {
        pos,
        message: message.into(),
    }
}

/// A raw polynomial expression slice, parsed later against a ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub text: String,
    pub pos: Pos,
}

/// One factor of a declared monomial: generator name and exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialFactor {
    pub name: String,
    pub exponent: u16,
    pub pos: Pos,
}

/// A declared monomial (relation or fundamental class), as factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawMonomial {
    pub pos: Pos,
    pub factors: Vec<MonomialFactor>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDecl {
    pub name: String,
    pub degree: u32,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaDecl {
    pub generator: String,
    pub image: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqDecl {
    pub generator: String,
    pub index: u32,
    pub rule: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FixedBlock {
    pub generators: Vec<GeneratorDecl>,
    pub relations: Vec<RawMonomial>,
    pub sq_rules: Vec<SqDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceBlock {
    pub name: String,
    pub pos: Pos,
    pub generators: Vec<GeneratorDecl>,
    pub relations: Vec<RawMonomial>,
    pub truncate: Option<u32>,
    pub trivial_involution: bool,
    pub fixed: FixedBlock,
    pub kappa: Vec<KappaDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleBlock {
    pub name: String,
    pub pos: Pos,
    pub base: Option<(String, Pos)>,
    pub chern: Option<Expr>,
    pub sw_fixed: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldBlock {
    pub name: String,
    pub pos: Pos,
    pub space: Option<(String, Pos)>,
    pub dimension: Option<(u32, Pos)>,
    pub total_sw: Option<Expr>,
    pub fixed_total_sw: Option<Expr>,
    pub fundamental: Option<RawMonomial>,
    pub fixed_fundamental: Option<RawMonomial>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapBlock {
    pub name: String,
    pub pos: Pos,
    pub source: Option<(String, Pos)>,
    pub target: Option<(String, Pos)>,
    pub images: Vec<KappaDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Space(SpaceBlock),
    Bundle(BundleBlock),
    Manifold(ManifoldBlock),
    Map(MapBlock),
}

impl Item {
    pub fn name(&self) -> &str {
        match self {
            Item::Space(b) => &b.name,
            Item::Bundle(b) => &b.name,
            Item::Manifold(b) => &b.name,
            Item::Map(b) => &b.name,
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            Item::Space(b) => b.pos,
            Item::Bundle(b) => b.pos,
            Item::Manifold(b) => b.pos,
            Item::Map(b) => b.pos,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Item::Space(_) => "space",
            Item::Bundle(_) => "bundle",
            Item::Manifold(_) => "manifold",
            Item::Map(_) => "map",
        }
    }
}

pub fn parse_file(input: &str) -> Result<Vec<Item>, SyntaxError> {
    let mut scanner = Scanner::new(input);
    let mut items = Vec::new();
    loop {
        scanner.skip_trivia();
        if scanner.at_end() {
            return Ok(items);
        }
        let pos = scanner.pos();
        let keyword = scanner.ident().ok_or_else(|| {
            err(pos, "expected 'space', 'bundle', 'manifold', or 'map'")
        })?;
        let item = match keyword.as_str() {
            "space" => Item::Space(parse_space(&mut scanner, pos)?),
            "bundle" => Item::Bundle(parse_bundle(&mut scanner, pos)?),
            "manifold" => Item::Manifold(parse_manifold(&mut scanner, pos)?),
            "map" => Item::Map(parse_map(&mut scanner, pos)?),
            other => {
                return Err(err(
                    pos,
                    format!(
                        "unknown block kind '{}', expected 'space', 'bundle', 'manifold', or 'map'",
                        other
                    ),
                ))
            }
        };
        items.push(item);
    }
}

struct Scanner<'a> {
    src: &'a [u8],
    i: usize,
    line: u32,
    col: u32,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Scanner<'a> {
        Scanner {
            src: src.as_bytes(),
            i: 0,
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn at_end(&self) -> bool {
        self.i >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.i).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.i += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    /// Skip whitespace and `#` line comments.
    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'#') => {
                    while let Some(b) = self.peek() {
                        if b == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_trivia();
        match self.peek() {
            Some(b) if b.is_ascii_alphabetic() => {}
            _ => return None,
        }
        let mut s = String::new();
        while let Some(b) = self.peek() {
            if b.is_ascii_alphanumeric() || b == b'_' {
                s.push(b as char);
                self.bump();
            } else {
                break;
            }
        }
        Some(s)
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Pos), SyntaxError> {
        self.skip_trivia();
        let pos = self.pos();
        self.ident()
            .map(|name| (name, pos))
            .ok_or_else(|| err(pos, format!("expected {}", what)))
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, SyntaxError> {
        self.skip_trivia();
        let pos = self.pos();
        let mut digits = String::new();
        while let Some(b) = self.peek() {
            if b.is_ascii_digit() {
                digits.push(b as char);
                self.bump();
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return Err(err(pos, format!("expected {}", what)));
        }
        digits
            .parse()
            .map_err(|_| err(pos, format!("{} '{}' out of range", what, digits)))
    }

    fn expect(&mut self, token: &str) -> Result<(), SyntaxError> {
        self.skip_trivia();
        let pos = self.pos();
        for &b in token.as_bytes() {
            if self.peek() == Some(b) {
                self.bump();
            } else {
                return Err(err(pos, format!("expected '{}'", token)));
            }
        }
        Ok(())
    }

    fn eat(&mut self, byte: u8) -> bool {
        self.skip_trivia();
        if self.peek() == Some(byte) {
            self.bump();
            return true;
        }
        false
    }

    /// Capture raw expression text up to (not including) the next `;`, then
    /// consume the `;`.  Comments inside the slice are stripped.
    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        self.skip_trivia();
        let pos = self.pos();
        let mut text = String::new();
        loop {
            match self.peek() {
                None => return Err(err(pos, "unterminated expression, expected ';'")),
                Some(b';') => {
                    self.bump();
                    break;
                }
                Some(b'}') => {
                    return Err(err(self.pos(), "unterminated expression, expected ';'"))
                }
                // Strip the comment but keep the newline, so positions
                // inside multi-line expressions stay honest.
                Some(b'#') => {
                    while let Some(b) = self.peek() {
                        if b == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some(b) => {
                    text.push(b as char);
                    self.bump();
                }
            }
        }
        let text = text.trim().to_string();
        if text.is_empty() {
            return Err(err(pos, "empty expression"));
        }
        Ok(Expr { text, pos })
    }

    /// A declared monomial: `name ('^' nat)? ('*' name ('^' nat)?)* ';'`.
    fn monomial(&mut self) -> Result<RawMonomial, SyntaxError> {
        self.skip_trivia();
        let pos = self.pos();
        let mut factors = Vec::new();
        loop {
            let (name, fpos) = self.expect_ident("a generator name in the monomial")?;
            let exponent = if self.eat(b'^') {
                self.number::<u16>("an exponent")?
            } else {
                1
            };
            factors.push(MonomialFactor {
                name,
                exponent,
                pos: fpos,
            });
            if self.eat(b';') {
                return Ok(RawMonomial { pos, factors });
            }
            if !self.eat(b'*') {
                return Err(err(self.pos(), "expected '*' or ';' in the monomial"));
            }
        }
    }
}

/// Reject a second occurrence of a single-valued field.
fn set_once<T>(slot: &mut Option<T>, value: T, field: &str, pos: Pos) -> Result<(), SyntaxError> {
    if slot.is_some() {
        return Err(err(pos, format!("duplicate '{}'", field)));
    }
    *slot = Some(value);
    Ok(())
}

fn parse_generator(scanner: &mut Scanner) -> Result<GeneratorDecl, SyntaxError> {
    let (name, pos) = scanner.expect_ident("a generator name")?;
    scanner.expect(":")?;
    let degree = scanner.number::<u32>("a degree")?;
    scanner.expect(";")?;
    Ok(GeneratorDecl { name, degree, pos })
}

fn parse_space(scanner: &mut Scanner, pos: Pos) -> Result<SpaceBlock, SyntaxError> {
    let (name, _) = scanner.expect_ident("a space name")?;
    scanner.expect("{")?;
    let mut block = SpaceBlock {
        name,
        pos,
        generators: Vec::new(),
        relations: Vec::new(),
        truncate: None,
        trivial_involution: false,
        fixed: FixedBlock::default(),
        kappa: Vec::new(),
    };
    let mut fixed_seen = false;
    loop {
        if scanner.eat(b'}') {
            return Ok(block);
        }
        let kpos = scanner.pos();
        let keyword = scanner
            .ident()
            .ok_or_else(|| err(kpos, "expected a space item or '}'"))?;
        match keyword.as_str() {
            "generator" => block.generators.push(parse_generator(scanner)?),
            "relation" => block.relations.push(scanner.monomial()?),
            "truncate" => {
                let n = scanner.number::<u32>("a truncation degree")?;
                scanner.expect(";")?;
                set_once(&mut block.truncate, n, "truncate", kpos).map(|_| ())?;
            }
            "trivial_involution" => {
                scanner.expect(";")?;
                if block.trivial_involution {
                    return Err(err(kpos, "duplicate 'trivial_involution'"));
                }
                block.trivial_involution = true;
            }
            "fixed" => {
                if fixed_seen {
                    return Err(err(kpos, "duplicate 'fixed' block"));
                }
                fixed_seen = true;
                block.fixed = parse_fixed(scanner)?;
            }
            "kappa" => {
                let (generator, _) = scanner.expect_ident("a generator name after 'kappa'")?;
                scanner.expect("->")?;
                let image = scanner.expr()?;
                block.kappa.push(KappaDecl {
                    generator,
                    image,
                    pos: kpos,
                });
            }
            other => {
                return Err(err(
                    kpos,
                    format!(
                        "unknown space item '{}', expected generator, relation, truncate, \
                         trivial_involution, fixed, or kappa",
                        other
                    ),
                ))
            }
        }
    }
}

fn parse_fixed(scanner: &mut Scanner) -> Result<FixedBlock, SyntaxError> {
    scanner.expect("{")?;
    let mut block = FixedBlock::default();
    loop {
        if scanner.eat(b'}') {
            return Ok(block);
        }
        let kpos = scanner.pos();
        let keyword = scanner
            .ident()
            .ok_or_else(|| err(kpos, "expected a fixed item or '}'"))?;
        match keyword.as_str() {
            "generator" => block.generators.push(parse_generator(scanner)?),
            "relation" => block.relations.push(scanner.monomial()?),
            "sq" => {
                let (generator, _) = scanner.expect_ident("a generator name after 'sq'")?;
                let index = scanner.number::<u32>("a square index")?;
                scanner.expect("=")?;
                let rule = scanner.expr()?;
                block.sq_rules.push(SqDecl {
                    generator,
                    index,
                    rule,
                    pos: kpos,
                });
            }
            other => {
                return Err(err(
                    kpos,
                    format!(
                        "unknown fixed item '{}', expected generator, relation, or sq",
                        other
                    ),
                ))
            }
        }
    }
}

fn parse_bundle(scanner: &mut Scanner, pos: Pos) -> Result<BundleBlock, SyntaxError> {
    let (name, _) = scanner.expect_ident("a bundle name")?;
    scanner.expect("{")?;
    let mut block = BundleBlock {
        name,
        pos,
        base: None,
        chern: None,
        sw_fixed: None,
    };
    loop {
        if scanner.eat(b'}') {
            return Ok(block);
        }
        let kpos = scanner.pos();
        let keyword = scanner
            .ident()
            .ok_or_else(|| err(kpos, "expected a bundle item or '}'"))?;
        match keyword.as_str() {
            "base" => {
                let named = scanner.expect_ident("a space name after 'base'")?;
                scanner.expect(";")?;
                set_once(&mut block.base, named, "base", kpos)?;
            }
            "chern" => {
                scanner.expect("=")?;
                let expr = scanner.expr()?;
                set_once(&mut block.chern, expr, "chern", kpos)?;
            }
            "sw_fixed" => {
                scanner.expect("=")?;
                let expr = scanner.expr()?;
                set_once(&mut block.sw_fixed, expr, "sw_fixed", kpos)?;
            }
            other => {
                return Err(err(
                    kpos,
                    format!(
                        "unknown bundle item '{}', expected base, chern, or sw_fixed",
                        other
                    ),
                ))
            }
        }
    }
}

fn parse_manifold(scanner: &mut Scanner, pos: Pos) -> Result<ManifoldBlock, SyntaxError> {
    let (name, _) = scanner.expect_ident("a manifold name")?;
    scanner.expect("{")?;
    let mut block = ManifoldBlock {
        name,
        pos,
        space: None,
        dimension: None,
        total_sw: None,
        fixed_total_sw: None,
        fundamental: None,
        fixed_fundamental: None,
    };
    loop {
        if scanner.eat(b'}') {
            return Ok(block);
        }
        let kpos = scanner.pos();
        let keyword = scanner
            .ident()
            .ok_or_else(|| err(kpos, "expected a manifold item or '}'"))?;
        match keyword.as_str() {
            "space" => {
                let named = scanner.expect_ident("a space name after 'space'")?;
                scanner.expect(";")?;
                set_once(&mut block.space, named, "space", kpos)?;
            }
            "dimension" => {
                let n = scanner.number::<u32>("a dimension")?;
                scanner.expect(";")?;
                set_once(&mut block.dimension, (n, kpos), "dimension", kpos)?;
            }
            "total_sw" => {
                scanner.expect("=")?;
                let expr = scanner.expr()?;
                set_once(&mut block.total_sw, expr, "total_sw", kpos)?;
            }
            "fixed_total_sw" => {
                scanner.expect("=")?;
                let expr = scanner.expr()?;
                set_once(&mut block.fixed_total_sw, expr, "fixed_total_sw", kpos)?;
            }
            "fundamental" => {
                let m = scanner.monomial()?;
                set_once(&mut block.fundamental, m, "fundamental", kpos)?;
            }
            "fixed_fundamental" => {
                let m = scanner.monomial()?;
                set_once(&mut block.fixed_fundamental, m, "fixed_fundamental", kpos)?;
            }
            other => {
                return Err(err(
                    kpos,
                    format!(
                        "unknown manifold item '{}', expected space, dimension, total_sw, \
                         fixed_total_sw, fundamental, or fixed_fundamental",
                        other
                    ),
                ))
            }
        }
    }
}

fn parse_map(scanner: &mut Scanner, pos: Pos) -> Result<MapBlock, SyntaxError> {
    let (name, _) = scanner.expect_ident("a map name")?;
    scanner.expect("{")?;
    let mut block = MapBlock {
        name,
        pos,
        source: None,
        target: None,
        images: Vec::new(),
    };
    loop {
        if scanner.eat(b'}') {
            return Ok(block);
        }
        let kpos = scanner.pos();
        let keyword = scanner
            .ident()
            .ok_or_else(|| err(kpos, "expected a map item or '}'"))?;
        match keyword.as_str() {
            "source" => {
                let named = scanner.expect_ident("a space name after 'source'")?;
                scanner.expect(";")?;
                set_once(&mut block.source, named, "source", kpos)?;
            }
            "target" => {
                let named = scanner.expect_ident("a space name after 'target'")?;
                scanner.expect(";")?;
                set_once(&mut block.target, named, "target", kpos)?;
            }
            "send" => {
                let (generator, _) = scanner.expect_ident("a generator name after 'send'")?;
                scanner.expect("->")?;
                let image = scanner.expr()?;
                block.images.push(KappaDecl {
                    generator,
                    image,
                    pos: kpos,
                });
            }
            other => {
                return Err(err(
                    kpos,
                    format!(
                        "unknown map item '{}', expected source, target, or send",
                        other
                    ),
                ))
            }
        }
    }
}

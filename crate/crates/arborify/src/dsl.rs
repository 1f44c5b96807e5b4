//! Textual surface syntax for trees, words and pairings.
//!
//! Tree files: an expression in the grammar below, preceded by optional
//! `freq NAME = (…)` bindings and followed by optional `pair1:`/`pair2:`
//! stanzas resolving leaf tags. `//` starts a comment.
//!
//! ```text
//! expr    := term ('+' term)*
//! term    := coeff? factor+              // juxtaposition = tree product
//! factor  := edge | '(' expr ')'
//! edge    := ('I'|'Ihat') '[' kind ',' conj ']' '(' freq (';' factor+)? ')' tag?
//! kind    := 't1' | 't2'      conj := '0' | '1'
//! freq    := '(' int (',' int)* ')' | int | ident
//! tag     := '#' ident
//! coeff   := rational ('i')? ('mu^' int)?
//! ```
//!
//! Words use star-letter literals `S[slot …]` (`G[…]` pins the letter to
//! time 0), with slots `(conj, hat?, freq)` and a per-word pairing block
//! `{pair1: (a,b) …; pair2: …}` over slot tags.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

use crate::coeff::ExactCoeff;
use crate::error::AlgebraError;
use crate::freq::Frequency;
use crate::pairing::{Model, Pairing};
use crate::tree::{DecoratedTree, EdgeDecoration, EdgeKind, RawNode, TreePoly};
use crate::word::{Letter, Slot, Word, WordPoly};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct SourceSpan {
    pub begin: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseError {
    #[error("{message} at line {}, column {}", span.line, span.col)]
    Syntax { span: SourceSpan, message: String },
    #[error("algebra error: {0}")]
    Algebra(#[from] AlgebraError),
}

type PResult<T> = Result<T, ParseError>;

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Punct(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn lex(text: &str) -> PResult<Vec<Token>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;
    let span_at = |i: usize, line: u32, col: u32| SourceSpan {
        begin: i,
        end: i + 1,
        line,
        col,
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && i + 1 < bytes.len() && bytes[i + 1] == '/' {
            while i < bytes.len() && bytes[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            let start_col = col;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
                col += 1;
            }
            let s: String = bytes[start..i].iter().collect();
            let v: i64 = s.parse().map_err(|_| ParseError::Syntax {
                span: span_at(start, line, start_col),
                message: format!("integer literal {s} out of range"),
            })?;
            out.push(Token {
                tok: Tok::Int(v),
                span: SourceSpan {
                    begin: start,
                    end: i,
                    line,
                    col: start_col,
                },
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            let start_col = col;
            while i < bytes.len() && (bytes[i].is_alphanumeric() || bytes[i] == '_') {
                i += 1;
                col += 1;
            }
            out.push(Token {
                tok: Tok::Ident(bytes[start..i].iter().collect()),
                span: SourceSpan {
                    begin: start,
                    end: i,
                    line,
                    col: start_col,
                },
            });
            continue;
        }
        if "[](),;#+-/^={}:".contains(c) {
            out.push(Token {
                tok: Tok::Punct(c),
                span: span_at(i, line, col),
            });
            i += 1;
            col += 1;
            continue;
        }
        return Err(ParseError::Syntax {
            span: span_at(i, line, col),
            message: format!("unexpected character {c:?}"),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser core
// ---------------------------------------------------------------------------

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    bindings: BTreeMap<String, Frequency>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn span(&self) -> SourceSpan {
        self.tokens
            .get(self.pos.min(self.tokens.len().saturating_sub(1)))
            .map(|t| t.span)
            .unwrap_or_default()
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax {
            span: self.span(),
            message: message.into(),
        })
    }

    fn expect_punct(&mut self, c: char) -> PResult<()> {
        match self.peek() {
            Some(Tok::Punct(p)) if *p == c => {
                self.bump();
                Ok(())
            }
            other => self.err(format!("expected {c:?}, found {other:?}")),
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(p)) if *p == c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.bump() {
                Some(Tok::Ident(s)) => Ok(s),
                _ => unreachable!(),
            },
            other => self.err(format!("expected identifier, found {other:?}")),
        }
    }

    fn expect_int(&mut self) -> PResult<i64> {
        let neg = self.eat_punct('-');
        match self.peek() {
            Some(Tok::Int(_)) => match self.bump() {
                Some(Tok::Int(v)) => Ok(if neg { -v } else { v }),
                _ => unreachable!(),
            },
            other => self.err(format!("expected integer, found {other:?}")),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    /// `freq := '(' … ')' | int | ident`
    fn freq(&mut self) -> PResult<Frequency> {
        if self.eat_punct('(') {
            // Either an ident alias or an integer tuple.
            if let Some(Tok::Ident(_)) = self.peek() {
                let name = self.expect_ident()?;
                self.expect_punct(')')?;
                return self.lookup(&name);
            }
            let mut comps = vec![self.expect_int()?];
            while self.eat_punct(',') {
                comps.push(self.expect_int()?);
            }
            self.expect_punct(')')?;
            return Ok(Frequency::new(comps));
        }
        if let Some(Tok::Ident(_)) = self.peek() {
            let name = self.expect_ident()?;
            return self.lookup(&name);
        }
        let v = self.expect_int()?;
        Ok(Frequency::new(vec![v]))
    }

    fn lookup(&self, name: &str) -> PResult<Frequency> {
        self.bindings.get(name).cloned().ok_or_else(|| ParseError::Syntax {
            span: self.span(),
            message: format!("unbound frequency name {name}"),
        })
    }

    /// `coeff := rational ('i')? ('mu^' int)?` — also accepts a bare `i`.
    /// Returns `None` when the upcoming tokens are not a coefficient.
    fn coeff_opt(&mut self) -> PResult<Option<ExactCoeff>> {
        let starts = matches!(self.peek(), Some(Tok::Int(_)) | Some(Tok::Punct('-')))
            || matches!(self.peek(), Some(Tok::Ident(s)) if s == "i" || s == "mu");
        if !starts {
            return Ok(None);
        }
        let mut neg = false;
        let mut num: Option<BigRational> = None;
        if matches!(self.peek(), Some(Tok::Punct('-'))) {
            self.bump();
            neg = true;
        }
        if let Some(Tok::Int(_)) = self.peek() {
            let n = match self.bump() {
                Some(Tok::Int(v)) => v,
                _ => unreachable!(),
            };
            let mut r = BigRational::from_integer(BigInt::from(n));
            if self.eat_punct('/') {
                let d = self.expect_int()?;
                if d == 0 {
                    return self.err("zero denominator");
                }
                r /= BigRational::from_integer(BigInt::from(d));
            }
            num = Some(r);
        }
        let mut imaginary = false;
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "i") {
            self.bump();
            imaginary = true;
        }
        let mut mu2 = 0u32;
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "mu") {
            self.bump();
            self.expect_punct('^')?;
            let e = self.expect_int()?;
            if e < 0 || e % 2 != 0 {
                return self.err("mu exponent must be a nonnegative even integer");
            }
            mu2 = (e / 2) as u32;
        }
        if num.is_none() && !imaginary && mu2 == 0 {
            return self.err("empty coefficient");
        }
        let mut r = num.unwrap_or_else(BigRational::one);
        if neg {
            r = -r;
        }
        let coeff = if imaginary {
            ExactCoeff::new(BigRational::zero(), r, mu2)
        } else {
            ExactCoeff::new(r, BigRational::zero(), mu2)
        };
        Ok(Some(coeff))
    }
}

// ---------------------------------------------------------------------------
// Tree expressions
// ---------------------------------------------------------------------------

/// Result of parsing a tree file: a tree polynomial plus the pairing
/// resolved against the single-term tree (empty when no stanzas appear).
#[derive(Clone, Debug)]
pub struct ParsedTree {
    pub poly: TreePoly,
    pub pairing: Pairing,
}

struct RawTerm {
    coeff: ExactCoeff,
    roots: Vec<RawNode>,
}

fn tree_expr(p: &mut Parser) -> PResult<Vec<RawTerm>> {
    let mut terms = tree_term(p)?;
    while p.eat_punct('+') {
        terms.extend(tree_term(p)?);
    }
    Ok(terms)
}

fn tree_term(p: &mut Parser) -> PResult<Vec<RawTerm>> {
    let coeff = p.coeff_opt()?.unwrap_or_else(ExactCoeff::one);
    // product of factors; a parenthesized factor may be a polynomial, so a
    // term expands to a list of raw terms.
    let mut acc: Vec<RawTerm> = vec![RawTerm {
        coeff,
        roots: Vec::new(),
    }];
    let mut any = false;
    loop {
        let factor: Vec<RawTerm> = match p.peek() {
            Some(Tok::Ident(s)) if s == "I" || s == "Ihat" => {
                let node = tree_edge(p)?;
                vec![RawTerm {
                    coeff: ExactCoeff::one(),
                    roots: vec![node],
                }]
            }
            Some(Tok::Punct('(')) => {
                p.bump();
                let inner = tree_expr(p)?;
                p.expect_punct(')')?;
                inner
            }
            _ => break,
        };
        any = true;
        let mut next = Vec::new();
        for a in &acc {
            for b in &factor {
                let mut roots = a.roots.clone();
                roots.extend(b.roots.iter().cloned());
                next.push(RawTerm {
                    coeff: a.coeff.mul(&b.coeff),
                    roots,
                });
            }
        }
        acc = next;
    }
    if !any {
        return p.err("expected a tree factor");
    }
    Ok(acc)
}

fn tree_edge(p: &mut Parser) -> PResult<RawNode> {
    let head = p.expect_ident()?;
    let hat = match head.as_str() {
        "I" => false,
        "Ihat" => true,
        other => return p.err(format!("expected I or Ihat, found {other}")),
    };
    p.expect_punct('[')?;
    let kind = match p.expect_ident()?.as_str() {
        "t1" => EdgeKind::T1,
        "t2" => EdgeKind::T2,
        other => return p.err(format!("expected t1 or t2, found {other}")),
    };
    p.expect_punct(',')?;
    let conj = match p.expect_int()? {
        0 => false,
        1 => true,
        other => return p.err(format!("conjugation bit must be 0 or 1, found {other}")),
    };
    p.expect_punct(']')?;
    p.expect_punct('(')?;
    let freq = p.freq()?;
    let mut children = Vec::new();
    if p.eat_punct(';') {
        loop {
            match p.peek() {
                Some(Tok::Ident(s)) if s == "I" || s == "Ihat" => {
                    children.push(tree_edge(p)?);
                }
                _ => break,
            }
        }
        if children.is_empty() {
            return p.err("expected child edges after ';'");
        }
    }
    p.expect_punct(')')?;
    let mut node = RawNode {
        decor: EdgeDecoration { kind, conj, hat },
        freq,
        children,
        tag: None,
    };
    if p.eat_punct('#') {
        node.tag = Some(p.expect_ident()?);
    }
    Ok(node)
}

struct Stanzas {
    bindings: BTreeMap<String, Frequency>,
    expression: String,
    pair1: Vec<(String, String)>,
    pair2: Vec<(String, String)>,
}

fn split_stanzas(text: &str) -> PResult<Stanzas> {
    let mut bindings = BTreeMap::new();
    let mut expression = String::new();
    let mut pair1 = Vec::new();
    let mut pair2 = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find("//") {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("freq ") {
            let mut toks = Parser {
                tokens: lex(rest)?,
                pos: 0,
                bindings: bindings.clone(),
            };
            let name = toks.expect_ident()?;
            toks.expect_punct('=')?;
            let f = toks.freq()?;
            if !toks.at_end() {
                return Err(ParseError::Syntax {
                    span: toks.span(),
                    message: format!("trailing tokens in freq binding on line {}", lineno + 1),
                });
            }
            bindings.insert(name, f);
            continue;
        }
        if let Some(rest) = trimmed
            .strip_prefix("pair1:")
            .map(|r| (r, true))
            .or_else(|| trimmed.strip_prefix("pair2:").map(|r| (r, false)))
        {
            let (body, class1) = rest;
            let mut toks = Parser {
                tokens: lex(body)?,
                pos: 0,
                bindings: BTreeMap::new(),
            };
            while !toks.at_end() {
                toks.expect_punct('(')?;
                let a = toks.expect_ident()?;
                toks.expect_punct(',')?;
                let b = toks.expect_ident()?;
                toks.expect_punct(')')?;
                if class1 {
                    pair1.push((a, b));
                } else {
                    pair2.push((a, b));
                }
            }
            continue;
        }
        expression.push_str(trimmed);
        expression.push(' ');
    }
    Ok(Stanzas {
        bindings,
        expression,
        pair1,
        pair2,
    })
}

/// Parse a tree file (validating construction: Kirchhoff violations and
/// malformed decorations are reported with their offending node).
pub fn parse_tree(text: &str) -> PResult<ParsedTree> {
    let stanzas = split_stanzas(text)?;
    let mut p = Parser {
        tokens: lex(&stanzas.expression)?,
        pos: 0,
        bindings: stanzas.bindings,
    };
    let terms = tree_expr(&mut p)?;
    if !p.at_end() {
        return p.err("trailing tokens after expression");
    }
    let want_pairing = !(stanzas.pair1.is_empty() && stanzas.pair2.is_empty());
    if want_pairing && terms.len() != 1 {
        return Err(ParseError::Syntax {
            span: SourceSpan::default(),
            message: "pairing stanzas require a single-term expression".into(),
        });
    }
    let mut poly = TreePoly::zero();
    let mut pairing = Pairing::empty();
    for term in terms {
        let (tree, tags) = DecoratedTree::canonicalize(term.roots)?;
        if want_pairing {
            let resolve = |name: &String| -> PResult<u32> {
                tags.get(name).copied().ok_or_else(|| ParseError::Syntax {
                    span: SourceSpan::default(),
                    message: format!("unknown leaf tag #{name}"),
                })
            };
            for (a, b) in &stanzas.pair1 {
                pairing.insert_class1(resolve(a)?, resolve(b)?);
            }
            for (a, b) in &stanzas.pair2 {
                pairing.insert_class2(resolve(a)?, resolve(b)?);
            }
        }
        poly.add_term(crate::tree::Forest::from_tree(tree), term.coeff)?;
    }
    Ok(ParsedTree { poly, pairing })
}

// ---------------------------------------------------------------------------
// Word expressions
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ParsedWords {
    pub poly: WordPoly,
}

/// Parse a word-polynomial file for the given model. `allow_wide` admits the
/// enlarged alphabet (merged boundary letters).
pub fn parse_word(text: &str, model: Model, allow_wide: bool) -> PResult<ParsedWords> {
    let stanzas = split_stanzas(text)?;
    if !(stanzas.pair1.is_empty() && stanzas.pair2.is_empty()) {
        return Err(ParseError::Syntax {
            span: SourceSpan::default(),
            message: "word pairings are written inline: { pair1: … ; pair2: … }".into(),
        });
    }
    let mut p = Parser {
        tokens: lex(&stanzas.expression)?,
        pos: 0,
        bindings: stanzas.bindings,
    };
    let mut poly = WordPoly::zero();
    word_term(&mut p, model, allow_wide, &mut poly)?;
    while p.eat_punct('+') {
        word_term(&mut p, model, allow_wide, &mut poly)?;
    }
    if !p.at_end() {
        return p.err("trailing tokens after word expression");
    }
    Ok(ParsedWords { poly })
}

fn word_term(
    p: &mut Parser,
    model: Model,
    allow_wide: bool,
    poly: &mut WordPoly,
) -> PResult<()> {
    let explicit_coeff = p.coeff_opt()?;
    let coeff = explicit_coeff.clone().unwrap_or_else(ExactCoeff::one);
    let mut letters: Vec<Letter> = Vec::new();
    let mut tag_to_flat: BTreeMap<String, u32> = BTreeMap::new();
    let mut offset = 0u32;
    loop {
        let green_node = match p.peek() {
            Some(Tok::Ident(s)) if s == "S" => false,
            Some(Tok::Ident(s)) if s == "G" => true,
            _ => break,
        };
        p.bump();
        p.expect_punct('[')?;
        let mut slots = Vec::new();
        let mut tags: Vec<Option<String>> = Vec::new();
        while matches!(p.peek(), Some(Tok::Punct('('))) {
            p.expect_punct('(')?;
            let conj = match p.expect_int()? {
                0 => false,
                1 => true,
                other => return p.err(format!("conjugation bit must be 0 or 1, found {other}")),
            };
            p.expect_punct(',')?;
            let hat = if matches!(p.peek(), Some(Tok::Ident(s)) if s == "hat") {
                p.bump();
                p.expect_punct(',')?;
                true
            } else {
                false
            };
            let freq = p.freq()?;
            p.expect_punct(')')?;
            let tag = if p.eat_punct('#') {
                Some(p.expect_ident()?)
            } else {
                None
            };
            slots.push(Slot::new(conj, hat, freq));
            tags.push(tag);
        }
        p.expect_punct(']')?;
        if slots.is_empty() {
            return p.err("letter with no slots");
        }
        let (letter, perm) = if allow_wide {
            Letter::new_wide(model, slots, green_node)?
        } else {
            Letter::new(model, slots, green_node)?
        };
        for (i, tag) in tags.into_iter().enumerate() {
            if let Some(t) = tag {
                if tag_to_flat
                    .insert(t.clone(), offset + perm[i] as u32)
                    .is_some()
                {
                    return p.err(format!("duplicate slot tag #{t}"));
                }
            }
        }
        offset += letter.arity() as u32;
        letters.push(letter);
    }
    if letters.is_empty() {
        // a bare coefficient denotes a multiple of the empty word
        if explicit_coeff.is_some() {
            poly.add_term(Word::empty(model), coeff)?;
            return Ok(());
        }
        return p.err("expected letters");
    }
    let mut pairing = Pairing::empty();
    if p.eat_punct('{') {
        loop {
            let klass = p.expect_ident()?;
            let class1 = match klass.as_str() {
                "pair1" => true,
                "pair2" => false,
                other => return p.err(format!("expected pair1 or pair2, found {other}")),
            };
            p.expect_punct(':')?;
            while matches!(p.peek(), Some(Tok::Punct('('))) {
                p.expect_punct('(')?;
                let a = p.expect_ident()?;
                p.expect_punct(',')?;
                let b = p.expect_ident()?;
                p.expect_punct(')')?;
                let ra = *tag_to_flat
                    .get(&a)
                    .ok_or_else(|| ParseError::Syntax {
                        span: p.span(),
                        message: format!("unknown slot tag #{a}"),
                    })?;
                let rb = *tag_to_flat
                    .get(&b)
                    .ok_or_else(|| ParseError::Syntax {
                        span: p.span(),
                        message: format!("unknown slot tag #{b}"),
                    })?;
                if class1 {
                    pairing.insert_class1(ra, rb);
                } else {
                    pairing.insert_class2(ra, rb);
                }
            }
            if !p.eat_punct(';') {
                break;
            }
        }
        p.expect_punct('}')?;
    }
    let word = Word::new(model, letters, pairing)?;
    poly.add_term(word, coeff)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Printers
// ---------------------------------------------------------------------------

fn print_freq(f: &Frequency) -> String {
    format!("{f}")
}

fn print_node(n: &crate::tree::TreeNode, out: &mut String) {
    out.push_str(if n.decor.hat { "Ihat" } else { "I" });
    out.push('[');
    out.push_str(match n.decor.kind {
        EdgeKind::T1 => "t1",
        EdgeKind::T2 => "t2",
    });
    out.push(',');
    out.push_str(if n.decor.conj { "1" } else { "0" });
    out.push(']');
    out.push('(');
    out.push_str(&print_freq(&n.freq));
    if !n.children.is_empty() {
        out.push_str("; ");
        for (i, c) in n.children.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            print_node(c, out);
        }
    }
    out.push(')');
}

/// Canonical text for a tree (no coefficient, no pairing).
pub fn print_tree(tree: &DecoratedTree) -> String {
    if tree.is_empty() {
        return "1".to_string();
    }
    let mut out = String::new();
    for (i, c) in tree.root_children().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        print_node(c, &mut out);
    }
    out
}

fn coeff_prefixes(c: &ExactCoeff) -> Vec<String> {
    // A general Gaussian rational needs one term per nonzero part.
    let mut parts = Vec::new();
    let mu = if c.mu2 > 0 {
        format!(" mu^{}", 2 * c.mu2)
    } else {
        String::new()
    };
    if !c.re.is_zero() {
        if c.re.is_one() && mu.is_empty() {
            parts.push(String::new());
        } else {
            parts.push(format!("{}{} ", c.re, mu));
        }
    }
    if !c.im.is_zero() {
        parts.push(format!("{}i{} ", c.im, mu));
    }
    if parts.is_empty() {
        parts.push("0 ".to_string());
    }
    parts
}

/// Canonical text for a tree with leaf tags on paired leaves and trailing
/// pairing stanzas.
pub fn print_tree_with_pairing(tree: &DecoratedTree, pairing: &Pairing) -> String {
    if pairing.is_empty() {
        return print_tree(tree);
    }
    let paired = pairing.paired_ids();
    let mut out = String::new();
    let mut leaf_idx = 0u32;
    fn walk(
        n: &crate::tree::TreeNode,
        out: &mut String,
        leaf_idx: &mut u32,
        paired: &std::collections::BTreeSet<u32>,
    ) {
        out.push_str(if n.decor.hat { "Ihat" } else { "I" });
        out.push('[');
        out.push_str(match n.decor.kind {
            EdgeKind::T1 => "t1",
            EdgeKind::T2 => "t2",
        });
        out.push(',');
        out.push_str(if n.decor.conj { "1" } else { "0" });
        out.push_str("](");
        out.push_str(&print_freq(&n.freq));
        if !n.children.is_empty() {
            out.push_str("; ");
            for (i, c) in n.children.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                walk(c, out, leaf_idx, paired);
            }
        }
        out.push(')');
        if n.is_leaf() {
            if paired.contains(leaf_idx) {
                out.push_str(&format!("#l{leaf_idx}"));
            }
            *leaf_idx += 1;
        }
    }
    for (i, c) in tree.root_children().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        walk(c, &mut out, &mut leaf_idx, &paired);
    }
    if !pairing.class1.is_empty() {
        out.push_str("\npair1:");
        for (a, b) in &pairing.class1 {
            out.push_str(&format!(" (l{a},l{b})"));
        }
    }
    if !pairing.class2.is_empty() {
        out.push_str("\npair2:");
        for (a, b) in &pairing.class2 {
            out.push_str(&format!(" (l{a},l{b})"));
        }
    }
    out
}

/// Canonical text for a tree polynomial (single-term pairing form when a
/// pairing is supplied).
pub fn print_tree_poly(poly: &TreePoly, pairing: Option<&Pairing>) -> String {
    if poly.is_zero() {
        return "0".to_string();
    }
    if let Some(p) = pairing {
        if !p.is_empty() {
            let mut terms = poly.terms();
            let (forest, coeff) = terms.next().expect("nonzero");
            assert!(terms.next().is_none(), "pairing requires a single term");
            let tree = forest
                .trees()
                .iter()
                .fold(DecoratedTree::unit(), |acc, t| acc.product(t));
            let prefixes = coeff_prefixes(coeff);
            let body = print_tree_with_pairing(&tree, p);
            // split expression line from stanzas
            let (expr, stanzas) = match body.find('\n') {
                Some(i) => (&body[..i], &body[i..]),
                None => (body.as_str(), ""),
            };
            let terms: Vec<String> = prefixes.iter().map(|pre| format!("{pre}{expr}")).collect();
            return format!("{}{}", terms.join(" + "), stanzas);
        }
    }
    let mut rendered = Vec::new();
    for (forest, coeff) in poly.terms() {
        let tree = forest
            .trees()
            .iter()
            .fold(DecoratedTree::unit(), |acc, t| acc.product(t));
        let body = print_tree(&tree);
        for pre in coeff_prefixes(coeff) {
            rendered.push(format!("{pre}{body}"));
        }
    }
    rendered.join(" + ")
}

/// Canonical text for a word: slot tags are emitted for paired slots and a
/// trailing inline pairing block records the classes.
pub fn print_word(word: &Word) -> String {
    if word.is_empty() {
        return "1".to_string();
    }
    let paired = word.pairing().paired_ids();
    let mut out = String::new();
    let mut flat = 0u32;
    for (i, l) in word.letters().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push(if l.green_node() { 'G' } else { 'S' });
        out.push('[');
        for (j, s) in l.slots().iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            out.push('(');
            out.push(if s.conj { '1' } else { '0' });
            out.push(',');
            if s.hat {
                out.push_str("hat,");
            }
            out.push_str(&print_freq(&s.freq));
            out.push(')');
            if paired.contains(&flat) {
                out.push_str(&format!("#s{flat}"));
            }
            flat += 1;
        }
        out.push(']');
    }
    if !word.pairing().is_empty() {
        out.push('{');
        let mut first = true;
        if !word.pairing().class1.is_empty() {
            out.push_str("pair1:");
            for (a, b) in &word.pairing().class1 {
                out.push_str(&format!(" (s{a},s{b})"));
            }
            first = false;
        }
        if !word.pairing().class2.is_empty() {
            if !first {
                out.push_str("; ");
            }
            out.push_str("pair2:");
            for (a, b) in &word.pairing().class2 {
                out.push_str(&format!(" (s{a},s{b})"));
            }
        }
        out.push('}');
    }
    out
}

/// Canonical text for a word polynomial.
pub fn print_word_poly(poly: &WordPoly) -> String {
    if poly.is_zero() {
        return "0".to_string();
    }
    let mut rendered = Vec::new();
    for (word, coeff) in poly.terms() {
        if word.is_empty() {
            // bare coefficients stand for multiples of the empty word
            for pre in coeff_prefixes(coeff) {
                let pre = pre.trim_end();
                rendered.push(if pre.is_empty() { "1".to_string() } else { pre.to_string() });
            }
            continue;
        }
        let body = print_word(word);
        for pre in coeff_prefixes(coeff) {
            rendered.push(format!("{pre}{body}"));
        }
    }
    rendered.join(" + ")
}

impl fmt::Display for WordPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_word_poly(self))
    }
}

impl fmt::Display for TreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_tree_poly(self, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_t4_expression() {
        let text = "I[t2,0]((5); I[t1,1]((1)) I[t1,0]((2)) I[t1,0]((4)))";
        let parsed = parse_tree(text).unwrap();
        assert_eq!(parsed.poly.len(), 1);
        let (forest, coeff) = parsed.poly.terms().next().unwrap();
        assert_eq!(*coeff, ExactCoeff::one());
        assert_eq!(forest.trees()[0].t2_edge_count(), 1);
    }

    #[test]
    fn freq_bindings_resolve() {
        let text = "freq k1 = (1,0)\nI[t1,1]((k1))";
        let parsed = parse_tree(text).unwrap();
        let (forest, _) = parsed.poly.terms().next().unwrap();
        let leaves = forest.trees()[0].leaves();
        assert_eq!(leaves[0].1, Frequency::new(vec![1, 0]));
    }

    #[test]
    fn kirchhoff_violation_reports_error() {
        let text = "I[t2,0]((17); I[t1,1]((1)) I[t1,0]((2)) I[t1,0]((4)))";
        assert!(matches!(
            parse_tree(text),
            Err(ParseError::Algebra(AlgebraError::Kirchhoff { .. }))
        ));
    }

    #[test]
    fn syntax_error_carries_span() {
        let err = parse_tree("I[t9,0]((1))").unwrap_err();
        match err {
            ParseError::Syntax { span, .. } => assert!(span.line >= 1),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn pairing_stanza_resolves_tags() {
        let text = "I[t1,0]((3))#a I[t1,1]((3))#b I[t1,0]((9))\npair2: (a,b)";
        let parsed = parse_tree(text).unwrap();
        assert_eq!(parsed.pairing.class2.len(), 1);
    }

    #[test]
    fn tree_roundtrip_through_printer() {
        let text = "1/2 I[t2,1]((5); I[t1,1]((1)) I[t1,1]((2)) I[t1,0]((-2))) + 3i I[t1,0]((7))";
        let parsed = parse_tree(text).unwrap();
        let printed = print_tree_poly(&parsed.poly, None);
        let reparsed = parse_tree(&printed).unwrap();
        assert_eq!(parsed.poly, reparsed.poly);
        // and printing is stable
        assert_eq!(printed, print_tree_poly(&reparsed.poly, None));
    }

    #[test]
    fn word_roundtrip_through_printer() {
        let text = "-1i S[(0,hat,(3))#a (1,(5)) (0,(5))] S[(1,hat,(3))#b (0,(2)) (0,(9))]{pair1: (a,b)}";
        let parsed = parse_word(text, Model::Nls, false).unwrap();
        assert_eq!(parsed.poly.len(), 1);
        let printed = print_word_poly(&parsed.poly);
        let reparsed = parse_word(&printed, Model::Nls, false).unwrap();
        assert_eq!(parsed.poly, reparsed.poly);
        assert_eq!(printed, print_word_poly(&reparsed.poly));
    }

    #[test]
    fn empty_word_prints_and_reparses() {
        let w = Word::empty(Model::Nls);
        assert_eq!(print_word(&w), "1");
        let mut poly = WordPoly::zero();
        poly.add_term(w, ExactCoeff::from_int(2)).unwrap();
        let text = print_word_poly(&poly);
        assert_eq!(text, "2");
        let back = parse_word(&text, Model::Nls, false).unwrap();
        assert_eq!(back.poly, poly);
        // JSON too
        let json = crate::json::wordpoly_to_json(&poly, Model::Nls);
        let (jback, _) = crate::json::wordpoly_from_json(&json).unwrap();
        assert_eq!(jback, poly);
    }

    #[test]
    fn wide_letters_need_the_flag() {
        let slots: Vec<String> = (0..6).map(|i| format!("(0,({i}))")).collect();
        let text = format!("S[{}] S[(0,(1)) (0,(-1))]", slots.join(" "));
        assert!(parse_word(&text, Model::Wave, false).is_err());
        assert!(parse_word(&text, Model::Wave, true).is_ok());
    }
}

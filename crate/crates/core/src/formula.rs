//! The bimodal language: knowledge `K`, effort `[]`, and Boolean structure.
//!
//! Surface syntax has `|`, `->`, `L` and `<>` as well, but they are removed
//! while parsing, so every [`Formula`] is built from the seven core
//! constructors only. The printer puts the sugar back where it recognises it.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{ParseError, ParseErrorKind};

/// Words that can never be atom names.
pub const RESERVED: [&str; 4] = ["K", "L", "top", "bot"];

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Top,
    Bot,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// `K φ`: φ holds at every point of the current open.
    Knows(Box<Formula>),
    /// `[] φ`: φ survives every refinement of the current open around the point.
    Effort(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn knows(f: Formula) -> Formula {
        Formula::Knows(Box::new(f))
    }

    pub fn effort(f: Formula) -> Formula {
        Formula::Effort(Box::new(f))
    }

    /// `a | b`, stored as `~(~a & ~b)`.
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// `a -> b`, stored as `~(a & ~b)`.
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    /// `L φ`, stored as `~K~φ`.
    pub fn possible(f: Formula) -> Formula {
        Formula::not(Formula::knows(Formula::not(f)))
    }

    /// `<> φ`, stored as `~[]~φ`.
    pub fn diamond(f: Formula) -> Formula {
        Formula::not(Formula::effort(Formula::not(f)))
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => vec![],
            Formula::Not(a) | Formula::Knows(a) | Formula::Effort(a) => vec![a],
            Formula::And(a, b) => vec![a, b],
        }
    }

    /// Nesting depth; leaves have depth 0.
    pub fn depth(&self) -> usize {
        self.children()
            .into_iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Formula::size)
            .sum::<usize>()
    }

    /// Post-order list of distinct subformulas, `self` last. Every child of a
    /// listed node appears before it.
    pub fn subformulas(&self) -> Vec<Formula> {
        fn walk(f: &Formula, seen: &mut HashSet<Formula>, out: &mut Vec<Formula>) {
            if seen.contains(f) {
                return;
            }
            for c in f.children() {
                walk(c, seen, out);
            }
            seen.insert(f.clone());
            out.push(f.clone());
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        walk(self, &mut seen, &mut out);
        out
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        if let Formula::Atom(a) = self {
            out.insert(a.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    /// Replace atoms by formulas. Atoms without an entry are left alone.
    pub fn substitute(&self, lookup: &dyn Fn(&str) -> Option<Formula>) -> Formula {
        match self {
            Formula::Atom(a) => lookup(a).unwrap_or_else(|| self.clone()),
            Formula::Top | Formula::Bot => self.clone(),
            Formula::Not(a) => Formula::not(a.substitute(lookup)),
            Formula::And(a, b) => Formula::and(a.substitute(lookup), b.substitute(lookup)),
            Formula::Knows(a) => Formula::knows(a.substitute(lookup)),
            Formula::Effort(a) => Formula::effort(a.substitute(lookup)),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let f = parser.implies()?;
    match parser.peek() {
        None => Ok(f),
        Some((Tok::RParen, at)) => Err(ParseError {
            position: at,
            kind: ParseErrorKind::UnbalancedParen,
        }),
        Some((Tok::Ident(w), at)) if RESERVED.contains(&w.as_str()) => Err(ParseError {
            position: at,
            kind: ParseErrorKind::ReservedWord(w),
        }),
        Some((Tok::Know, at)) => Err(ParseError {
            position: at,
            kind: ParseErrorKind::ReservedWord("K".into()),
        }),
        Some((Tok::Possible, at)) => Err(ParseError {
            position: at,
            kind: ParseErrorKind::ReservedWord("L".into()),
        }),
        Some((t, at)) => Err(ParseError {
            position: at,
            kind: ParseErrorKind::UnexpectedToken(t.to_string()),
        }),
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Neg,
    Know,
    Possible,
    BoxOp,
    DiamondOp,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
    Top,
    Bot,
    Ident(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Neg => "~",
            Tok::Know => "K",
            Tok::Possible => "L",
            Tok::BoxOp => "[]",
            Tok::DiamondOp => "<>",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Arrow => "->",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Top => "top",
            Tok::Bot => "bot",
            Tok::Ident(s) => s,
        };
        f.write_str(s)
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let two = |i: usize, s: &str| text.get(i..i + 2) == Some(s);
    while i < bytes.len() {
        let c = text[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let (tok, len) = match c {
            '~' => (Tok::Neg, 1),
            '&' => (Tok::And, 1),
            '|' => (Tok::Or, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '-' if two(i, "->") => (Tok::Arrow, 2),
            '[' if two(i, "[]") => (Tok::BoxOp, 2),
            '<' if two(i, "<>") => (Tok::DiamondOp, 2),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let len = text[i..]
                    .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                    .unwrap_or(text.len() - i);
                let word = &text[i..i + len];
                let tok = match word {
                    "K" => Tok::Know,
                    "L" => Tok::Possible,
                    "top" => Tok::Top,
                    "bot" => Tok::Bot,
                    _ => Tok::Ident(word.to_string()),
                };
                (tok, len)
            }
            other => {
                return Err(ParseError {
                    position: i,
                    kind: ParseErrorKind::UnexpectedChar(other),
                })
            }
        };
        out.push((tok, i));
        i += len;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<(Tok, usize)> {
        self.tokens.get(self.pos).cloned()
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if matches!(self.tokens.get(self.pos), Some((t, _)) if t == tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.and()?;
        if self.eat(&Tok::Or) {
            let rhs = self.or()?;
            return Ok(Formula::or(lhs, rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::And) {
            let rhs = self.and()?;
            return Ok(Formula::and(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let Some((tok, at)) = self.peek() else {
            return Err(ParseError {
                position: self.end,
                kind: ParseErrorKind::UnexpectedEnd,
            });
        };
        self.pos += 1;
        let wrap: fn(Formula) -> Formula = match tok {
            Tok::Neg => Formula::not,
            Tok::Know => Formula::knows,
            Tok::Possible => Formula::possible,
            Tok::BoxOp => Formula::effort,
            Tok::DiamondOp => Formula::diamond,
            Tok::LParen => {
                let inner = self.implies()?;
                if !self.eat(&Tok::RParen) {
                    return Err(ParseError {
                        position: at,
                        kind: ParseErrorKind::UnbalancedParen,
                    });
                }
                return Ok(inner);
            }
            Tok::Top => return Ok(Formula::Top),
            Tok::Bot => return Ok(Formula::Bot),
            Tok::Ident(name) => return Ok(Formula::Atom(name)),
            Tok::RParen => {
                return Err(ParseError {
                    position: at,
                    kind: ParseErrorKind::UnbalancedParen,
                })
            }
            other => {
                return Err(ParseError {
                    position: at,
                    kind: ParseErrorKind::UnexpectedToken(other.to_string()),
                })
            }
        };
        // A prefix operator must be followed by something that can start an operand.
        match self.peek() {
            None | Some((Tok::RParen | Tok::And | Tok::Or | Tok::Arrow, _)) => Err(ParseError {
                position: at,
                kind: ParseErrorKind::DanglingOperator(tok.to_string()),
            }),
            _ => Ok(wrap(self.unary()?)),
        }
    }
}

// Printer precedence levels, loosest first.
const P_IMPLIES: u8 = 0;
const P_OR: u8 = 1;
const P_AND: u8 = 2;
const P_UNARY: u8 = 3;

enum View<'a> {
    Implies(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    Possible(&'a Formula),
    Diamond(&'a Formula),
    Core,
}

fn view(f: &Formula) -> View<'_> {
    let Formula::Not(inner) = f else {
        return View::Core;
    };
    match inner.as_ref() {
        Formula::And(a, b) => match (a.as_ref(), b.as_ref()) {
            (Formula::Not(x), Formula::Not(y)) if matches!(view(a), View::Core) => View::Or(x, y),
            (_, Formula::Not(y)) => View::Implies(a, y),
            _ => View::Core,
        },
        Formula::Knows(k) => match k.as_ref() {
            Formula::Not(x) => View::Possible(x),
            _ => View::Core,
        },
        Formula::Effort(k) => match k.as_ref() {
            Formula::Not(x) => View::Diamond(x),
            _ => View::Core,
        },
        _ => View::Core,
    }
}

fn level(f: &Formula) -> u8 {
    match view(f) {
        View::Implies(..) => P_IMPLIES,
        View::Or(..) => P_OR,
        View::Possible(_) | View::Diamond(_) => P_UNARY,
        View::Core => match f {
            Formula::And(..) => P_AND,
            _ => P_UNARY,
        },
    }
}

fn write_at(f: &Formula, min: u8, out: &mut String) {
    if level(f) < min {
        out.push('(');
        write_formula(f, out);
        out.push(')');
    } else {
        write_formula(f, out);
    }
}

fn write_prefix(op: &str, arg: &Formula, out: &mut String) {
    out.push_str(op);
    write_at(arg, P_UNARY, out);
}

fn write_formula(f: &Formula, out: &mut String) {
    match view(f) {
        View::Implies(a, b) => {
            write_at(a, P_OR, out);
            out.push_str(" -> ");
            write_at(b, P_IMPLIES, out);
        }
        View::Or(a, b) => {
            write_at(a, P_AND, out);
            out.push_str(" | ");
            write_at(b, P_OR, out);
        }
        View::Possible(a) => write_prefix("L ", a, out),
        View::Diamond(a) => write_prefix("<> ", a, out),
        View::Core => match f {
            Formula::Atom(a) => out.push_str(a),
            Formula::Top => out.push_str("top"),
            Formula::Bot => out.push_str("bot"),
            Formula::Not(a) => write_prefix("~", a, out),
            Formula::And(a, b) => {
                write_at(a, P_UNARY, out);
                out.push_str(" & ");
                write_at(b, P_AND, out);
            }
            Formula::Knows(a) => write_prefix("K ", a, out),
            Formula::Effort(a) => write_prefix("[] ", a, out),
        },
    }
}

pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

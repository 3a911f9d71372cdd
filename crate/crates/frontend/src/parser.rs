//! Recursive-descent parser.

use std::collections::BTreeSet;
use std::fmt;

use catt_core::Tree;

use crate::ast::*;
use crate::lexer::{lex, Pos, Tok, Token};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pos: Pos,
    pub expected: BTreeSet<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exp: Vec<&str> = self.expected.iter().map(String::as_str).collect();
        match exp.len() {
            0 => write!(f, "unexpected {}", self.found),
            1 => write!(f, "expected {}, found {}", exp[0], self.found),
            _ => write!(f, "expected one of {}, found {}", exp.join(", "), self.found),
        }
    }
}

impl std::error::Error for ParseError {}

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Pos> {
        if *self.peek() == tok {
            Ok(self.bump().pos)
        } else {
            Err(self.error(&[&tok.describe()]))
        }
    }

    fn name(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(text) => {
                let pos = self.bump().pos;
                Ok(Name { text, pos })
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn file(&mut self) -> PResult<Vec<Decl>> {
        let mut out = Vec::new();
        while *self.peek() != Tok::Eof {
            out.push(self.decl()?);
        }
        Ok(out)
    }

    fn decl(&mut self) -> PResult<Decl> {
        let pos = self.pos();
        match self.peek() {
            Tok::Coh => {
                self.bump();
                let name = self.name()?;
                let ps = self.ps()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                Ok(Decl::Coh { name, ps, ty, pos })
            }
            Tok::Def => {
                self.bump();
                let name = self.name()?;
                let ctx = self.ctx()?;
                self.expect(Tok::Define)?;
                let body = self.tm()?;
                Ok(Decl::Def { name, ctx, body, pos })
            }
            Tok::Normalize => {
                self.bump();
                let ctx = self.ctx()?;
                self.expect(Tok::Bar)?;
                let tm = self.tm()?;
                Ok(Decl::Normalize { ctx, tm, pos })
            }
            Tok::AssertEq => {
                self.bump();
                let ctx = self.ctx()?;
                self.expect(Tok::Bar)?;
                let lhs = self.tm()?;
                self.expect(Tok::Equals)?;
                let rhs = self.tm()?;
                Ok(Decl::AssertEq { ctx, lhs, rhs, pos })
            }
            _ => Err(self.error(&["`coh`", "`def`", "`normalize`", "`asserteq`"])),
        }
    }

    fn ps(&mut self) -> PResult<PsExpr> {
        match self.peek() {
            Tok::LBracket => Ok(PsExpr::Tree(self.bracket_tree()?)),
            Tok::LParen => {
                self.bump();
                let node = self.ps_node()?;
                self.expect(Tok::RParen)?;
                Ok(PsExpr::Named(node))
            }
            _ => Err(self.error(&["`(`", "`[`"])),
        }
    }

    fn ps_node(&mut self) -> PResult<PsNode> {
        let mut labels = vec![self.name()?];
        let mut children = Vec::new();
        while *self.peek() == Tok::LParen {
            self.bump();
            children.push(self.ps_node()?);
            self.expect(Tok::RParen)?;
            labels.push(self.name()?);
        }
        Ok(PsNode { labels, children })
    }

    fn bracket_tree(&mut self) -> PResult<Tree> {
        self.expect(Tok::LBracket)?;
        let mut children = Vec::new();
        if *self.peek() != Tok::RBracket {
            children.push(self.bracket_tree()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                children.push(self.bracket_tree()?);
            }
        }
        if *self.peek() != Tok::RBracket {
            return Err(self.error(&["`,`", "`]`"]));
        }
        self.bump();
        Ok(Tree::new(children))
    }

    fn ctx(&mut self) -> PResult<CtxExpr> {
        let pos = self.pos();
        let binder = *self.peek() == Tok::LParen
            && matches!(self.peek_at(1), Tok::Ident(_))
            && *self.peek_at(2) == Tok::Colon;
        if !binder {
            return Ok(CtxExpr::Ps(self.ps()?, pos));
        }
        let mut out = Vec::new();
        while *self.peek() == Tok::LParen {
            self.bump();
            let name = self.name()?;
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            self.expect(Tok::RParen)?;
            out.push(Binder { name, ty });
        }
        Ok(CtxExpr::Binders(out))
    }

    fn ty(&mut self) -> PResult<TyExpr> {
        let pos = self.pos();
        if *self.peek() == Tok::Star {
            self.bump();
            return Ok(TyExpr::Star(pos));
        }
        let src = match self.tm() {
            Ok(t) => t,
            Err(mut e) => {
                e.expected.insert(Tok::Star.describe());
                return Err(e);
            }
        };
        self.expect(Tok::Arrow)?;
        let base = if *self.peek() == Tok::LBracket {
            self.bump();
            let b = self.ty()?;
            self.expect(Tok::RBracket)?;
            Some(Box::new(b))
        } else {
            None
        };
        let tgt = self.tm()?;
        Ok(TyExpr::Arrow { src, base, tgt, pos })
    }

    fn starts_arg(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen | Tok::LBrace | Tok::Lt)
    }

    fn inline(&mut self) -> PResult<Head> {
        let pos = self.expect(Tok::Lt)?;
        let ps = self.ps()?;
        self.expect(Tok::Colon)?;
        let ty = self.ty()?;
        self.expect(Tok::Gt)?;
        Ok(Head::Inline { ps, ty: Box::new(ty), pos })
    }

    fn tm(&mut self) -> PResult<TmExpr> {
        let head = match self.peek() {
            Tok::Ident(_) => Head::Name(self.name()?),
            Tok::Lt => self.inline()?,
            Tok::LParen => {
                self.bump();
                let inner = self.tm()?;
                self.expect(Tok::RParen)?;
                if !inner.args.is_empty() {
                    return Ok(inner);
                }
                inner.head
            }
            _ => return Err(self.error(&["identifier", "`(`", "`<`"])),
        };
        let mut args = Vec::new();
        while self.starts_arg() {
            args.push(self.arg()?);
        }
        Ok(TmExpr { head, args })
    }

    fn arg(&mut self) -> PResult<Arg> {
        let tm = match self.peek() {
            Tok::Ident(_) => TmExpr { head: Head::Name(self.name()?), args: Vec::new() },
            Tok::Lt => TmExpr { head: self.inline()?, args: Vec::new() },
            Tok::LParen => {
                self.bump();
                let t = self.tm()?;
                self.expect(Tok::RParen)?;
                t
            }
            Tok::LBrace => {
                self.bump();
                let t = self.tm()?;
                self.expect(Tok::RBrace)?;
                return Ok(Arg { tm: t, braced: true });
            }
            _ => return Err(self.error(&["identifier", "`(`", "`{`", "`<`"])),
        };
        Ok(Arg { tm, braced: false })
    }
}

fn parser(src: &str) -> PResult<Parser> {
    let toks = lex(src).map_err(|e| ParseError {
        pos: e.pos,
        expected: BTreeSet::new(),
        found: format!("character `{}`", e.found),
    })?;
    Ok(Parser { toks, i: 0 })
}

pub fn parse(src: &str) -> PResult<Vec<Decl>> {
    parser(src)?.file()
}

pub fn parse_term(src: &str) -> PResult<TmExpr> {
    let mut p = parser(src)?;
    let t = p.tm()?;
    p.expect(Tok::Eof)?;
    Ok(t)
}

pub fn parse_type(src: &str) -> PResult<TyExpr> {
    let mut p = parser(src)?;
    let t = p.ty()?;
    p.expect(Tok::Eof)?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coh_declaration() {
        let ds = parse("coh comp (x(f)y(g)z) : x -> z").unwrap();
        let Decl::Coh { name, ps: PsExpr::Named(node), ty, .. } = &ds[0] else { panic!() };
        assert_eq!(name.text, "comp");
        assert_eq!(node.labels.len(), 3);
        assert_eq!(node.children.len(), 2);
        assert!(matches!(ty, TyExpr::Arrow { base: None, .. }));
    }

    #[test]
    fn commands() {
        let ds = parse("normalize (x(f)y) | comp f (id y)\nasserteq [[]] | a = b").unwrap();
        let Decl::Normalize { tm, .. } = &ds[0] else { panic!() };
        assert_eq!(tm.args.len(), 2);
        assert_eq!(tm.args[1].tm.args.len(), 1);
        let Decl::AssertEq { ctx: CtxExpr::Ps(PsExpr::Tree(t), _), .. } = &ds[1] else { panic!() };
        assert_eq!(t.to_string(), "[[]]");
    }

    #[test]
    fn binders_and_braces() {
        let ds = parse("def twice (x : *) (f : x -> x) := comp {x} {x} f {x} f").unwrap();
        let Decl::Def { ctx: CtxExpr::Binders(bs), body, .. } = &ds[0] else { panic!() };
        assert_eq!(bs.len(), 2);
        assert_eq!(body.args.iter().filter(|a| a.braced).count(), 3);
    }

    #[test]
    fn explicit_base_and_inline_heads() {
        let t = parse_type("<(x(f)y) : x -> y> {a} {b} g ->[a -> b] h").unwrap();
        let TyExpr::Arrow { src, base: Some(_), .. } = t else { panic!() };
        assert!(matches!(src.head, Head::Inline { .. }));
    }

    #[test]
    fn errors_carry_position_and_expected_set() {
        let e = parse("coh comp (x(f)y : x -> y").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 17 });
        assert!(e.expected.contains("`)`"));
        let e = parse("normalize (x) f").unwrap_err();
        assert_eq!(e.to_string(), "expected `|`, found identifier `f`");
    }
}

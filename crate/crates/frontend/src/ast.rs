//! Surface syntax with source positions.

use catt_core::Tree;

use crate::lexer::Pos;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub pos: Pos,
}

/// One node of the paren notation: `x(f)y(g)z` has labels `x y z` and two
/// children, each a single-label node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsNode {
    pub labels: Vec<Name>,
    pub children: Vec<PsNode>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsExpr {
    Named(PsNode),
    /// Bracket notation; variables get canonical names.
    Tree(Tree),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binder {
    pub name: Name,
    pub ty: TyExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CtxExpr {
    Ps(PsExpr, Pos),
    Binders(Vec<Binder>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TyExpr {
    Star(Pos),
    Arrow { src: TmExpr, base: Option<Box<TyExpr>>, tgt: TmExpr, pos: Pos },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Head {
    Name(Name),
    Inline { ps: PsExpr, ty: Box<TyExpr>, pos: Pos },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arg {
    pub tm: TmExpr,
    pub braced: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmExpr {
    pub head: Head,
    pub args: Vec<Arg>,
}

impl TmExpr {
    pub fn pos(&self) -> Pos {
        match &self.head {
            Head::Name(n) => n.pos,
            Head::Inline { pos, .. } => *pos,
        }
    }
}

impl TyExpr {
    pub fn pos(&self) -> Pos {
        match self {
            TyExpr::Star(p) | TyExpr::Arrow { pos: p, .. } => *p,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Coh { name: Name, ps: PsExpr, ty: TyExpr, pos: Pos },
    Def { name: Name, ctx: CtxExpr, body: TmExpr, pos: Pos },
    Normalize { ctx: CtxExpr, tm: TmExpr, pos: Pos },
    AssertEq { ctx: CtxExpr, lhs: TmExpr, rhs: TmExpr, pos: Pos },
}

impl Decl {
    pub fn pos(&self) -> Pos {
        match self {
            Decl::Coh { pos, .. }
            | Decl::Def { pos, .. }
            | Decl::Normalize { pos, .. }
            | Decl::AssertEq { pos, .. } => *pos,
        }
    }
}

//! Elaboration of surface declarations into kernel terms.

use std::fmt;

use indexmap::IndexMap;

use catt_core::print::{print_ps, Printer};
use catt_core::rewrite::{Normalizer, ReductionStep, RuleSet, DEFAULT_STEP_BUDGET};
use catt_core::{tree_to_ctx, Checker, Ctx, Sub, Term, Tree, Type, TypingError};

use crate::ast::*;
use crate::lexer::Pos;
use crate::parser::{parse, ParseError};

pub const PRELUDE: &str = include_str!("prelude.catt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Global {
    Coh { tree: Tree, ctx: Ctx, ty: Type },
    Def { ctx: Ctx, body: Term, ty: Type },
}

impl Global {
    pub fn params(&self) -> &Ctx {
        match self {
            Global::Coh { ctx, .. } | Global::Def { ctx, .. } => ctx,
        }
    }

    fn instantiate(&self, sub: &Sub) -> Term {
        match self {
            Global::Coh { tree, ty, .. } => Term::coh(tree.clone(), ty.clone(), sub.clone()),
            Global::Def { body, .. } => body.subst(sub),
        }
    }
}

/// Variables not occurring in the type of any other variable.
pub fn maximal_vars(ctx: &Ctx) -> Vec<usize> {
    let mut used = vec![false; ctx.len()];
    for e in ctx.entries() {
        for v in e.ty.free_vars().iter() {
            used[v] = true;
        }
    }
    (0..ctx.len()).filter(|&i| !used[i]).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Parse(ParseError),
    UnknownName(String),
    DuplicateName(String),
    DuplicateVariable(String),
    NotAFunction(String),
    Arity { expected: usize, found: usize, detail: String },
    InferenceFailure { var: String, first: String, second: String },
    Uninferable(String),
    TypeMismatch(String),
    Typing(TypingError),
    AssertionFailed { lhs: String, rhs: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElabError {
    pub pos: Pos,
    pub kind: ErrorKind,
}

impl ElabError {
    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            ErrorKind::Parse(_) => "ParseError",
            ErrorKind::UnknownName(_) => "UnknownName",
            ErrorKind::DuplicateName(_) => "DuplicateName",
            ErrorKind::DuplicateVariable(_) => "DuplicateVariable",
            ErrorKind::NotAFunction(_) => "NotAFunction",
            ErrorKind::Arity { .. } => "ArityMismatch",
            ErrorKind::InferenceFailure { .. } | ErrorKind::Uninferable(_) => "InferenceFailure",
            ErrorKind::TypeMismatch(_) => "TypeMismatch",
            ErrorKind::Typing(e) => e.kind.name(),
            ErrorKind::AssertionFailed { .. } => "AssertionFailed",
        }
    }

    pub fn detail(&self) -> String {
        match &self.kind {
            ErrorKind::Parse(e) => e.to_string(),
            ErrorKind::UnknownName(n) => format!("`{n}` is not defined"),
            ErrorKind::DuplicateName(n) => format!("`{n}` is already defined"),
            ErrorKind::DuplicateVariable(n) => format!("variable `{n}` is bound twice"),
            ErrorKind::NotAFunction(n) => format!("variable `{n}` cannot take arguments"),
            ErrorKind::Arity { expected, found, detail } => {
                format!("expected {expected} arguments, found {found}{detail}")
            }
            ErrorKind::InferenceFailure { var, first, second } => {
                format!("`{var}` is both `{first}` and `{second}`")
            }
            ErrorKind::Uninferable(var) => format!("cannot infer `{var}`"),
            ErrorKind::TypeMismatch(d) => d.clone(),
            ErrorKind::Typing(e) => e.detail(),
            ErrorKind::AssertionFailed { lhs, rhs } => format!("normal forms differ: {lhs} vs {rhs}"),
        }
    }

    /// `file:line:col: kind: detail`.
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{}: {}: {}", self.pos, self.kind_name(), self.detail())
    }
}

impl fmt::Display for ElabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.pos, self.kind_name(), self.detail())
    }
}

impl std::error::Error for ElabError {}

type EResult<T> = Result<T, ElabError>;

fn err<T>(pos: Pos, kind: ErrorKind) -> EResult<T> {
    Err(ElabError { pos, kind })
}

fn typing(pos: Pos) -> impl Fn(TypingError) -> ElabError {
    move |e| ElabError { pos, kind: ErrorKind::Typing(e) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Check,
    Normalize,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub rules: RuleSet,
    pub budget: usize,
    pub trace: bool,
    pub mode: Mode,
}

impl Default for Config {
    fn default() -> Self {
        Config { rules: RuleSet::sua(), budget: DEFAULT_STEP_BUDGET, trace: false, mode: Mode::Eq }
    }
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Declared(String),
    Normalized { pos: Pos, ctx: Ctx, term: Term, normal: Option<Term>, trace: Vec<ReductionStep> },
    Compared { pos: Pos, ctx: Ctx, lhs: Term, rhs: Term, equal: Option<bool> },
}

pub struct Session {
    env: IndexMap<String, Global>,
    checker: Checker,
    config: Config,
}

impl Session {
    /// A session with the prelude loaded.
    pub fn new(config: Config) -> Session {
        let mut s = Session::empty(config);
        for r in s.load(PRELUDE) {
            r.expect("prelude elaborates");
        }
        s
    }

    pub fn empty(config: Config) -> Session {
        let checker = Checker::with_rules(config.rules, config.budget);
        Session { env: IndexMap::new(), checker, config }
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn checker(&mut self) -> &mut Checker {
        &mut self.checker
    }

    pub fn env(&self) -> &IndexMap<String, Global> {
        &self.env
    }

    pub fn get(&self, name: &str) -> Option<&Global> {
        self.env.get(name)
    }

    /// Elaborates every declaration in order. A parse error ends the file;
    /// elaboration errors skip the offending declaration.
    pub fn load(&mut self, src: &str) -> Vec<EResult<Outcome>> {
        match parse(src) {
            Err(e) => vec![err(e.pos, ErrorKind::Parse(e))],
            Ok(decls) => decls.iter().map(|d| self.decl(d)).collect(),
        }
    }

    pub fn decl(&mut self, d: &Decl) -> EResult<Outcome> {
        match d {
            Decl::Coh { name, ps, ty, .. } => {
                self.fresh(name)?;
                let (tree, ctx) = self.ps(ps)?;
                let a = self.ty(&ctx, ty)?;
                self.checker.check_coh_head(&tree, &a).map_err(typing(name.pos))?;
                self.env.insert(name.text.clone(), Global::Coh { tree, ctx, ty: a });
                Ok(Outcome::Declared(name.text.clone()))
            }
            Decl::Def { name, ctx, body, .. } => {
                self.fresh(name)?;
                let ctx = self.ctx(ctx)?;
                let (body, ty) = self.tm(&ctx, body)?;
                self.env.insert(name.text.clone(), Global::Def { ctx, body, ty });
                Ok(Outcome::Declared(name.text.clone()))
            }
            Decl::Normalize { ctx, tm, pos } => {
                let ctx = self.ctx(ctx)?;
                let (term, _) = self.tm(&ctx, tm)?;
                let (normal, trace) = if self.config.mode == Mode::Normalize {
                    let (n, t) = self.normalize_traced(&term).map_err(typing(*pos))?;
                    (Some(n), t)
                } else {
                    (None, Vec::new())
                };
                Ok(Outcome::Normalized { pos: *pos, ctx, term, normal, trace })
            }
            Decl::AssertEq { ctx, lhs, rhs, pos } => {
                let ctx = self.ctx(ctx)?;
                let (l, la) = self.tm(&ctx, lhs)?;
                let (r, ra) = self.tm(&ctx, rhs)?;
                if !self.checker.def_eq_type(&la, &ra).map_err(typing(*pos))? {
                    let names = ctx.names();
                    return err(
                        rhs.pos(),
                        ErrorKind::TypeMismatch(format!(
                            "sides have types `{}` and `{}`",
                            Printer::short().ty(&la, &names),
                            Printer::short().ty(&ra, &names)
                        )),
                    );
                }
                let equal = if self.config.mode == Mode::Eq {
                    let eq = self.checker.def_eq(&l, &r).map_err(typing(*pos))?;
                    if !eq {
                        let names = ctx.names();
                        let mut n = |t: &Term| -> EResult<String> {
                            let nf = self.checker.normalizer().term(t).map_err(|e| typing(*pos)(e.into()))?;
                            Ok(Printer::short().term(&nf, &names))
                        };
                        let (lhs, rhs) = (n(&l)?, n(&r)?);
                        return err(*pos, ErrorKind::AssertionFailed { lhs, rhs });
                    }
                    Some(true)
                } else {
                    None
                };
                Ok(Outcome::Compared { pos: *pos, ctx, lhs: l, rhs: r, equal })
            }
        }
    }

    fn normalize_traced(&mut self, t: &Term) -> Result<(Term, Vec<ReductionStep>), TypingError> {
        if !self.config.trace {
            return Ok((self.checker.normalizer().term(t)?, Vec::new()));
        }
        let mut n = Normalizer::new(self.config.rules, self.config.budget).with_trace();
        let nf = n.term(t)?;
        Ok((nf, n.take_trace()))
    }

    fn fresh(&self, name: &Name) -> EResult<()> {
        if self.env.contains_key(&name.text) {
            return err(name.pos, ErrorKind::DuplicateName(name.text.clone()));
        }
        Ok(())
    }

    /// The head tree and its context under the user's names.
    fn ps(&mut self, ps: &PsExpr) -> EResult<(Tree, Ctx)> {
        match ps {
            PsExpr::Tree(tree) => Ok((tree.clone(), tree_to_ctx(tree).as_ref().clone())),
            PsExpr::Named(node) => {
                fn shape(n: &PsNode) -> Tree {
                    Tree::new(n.children.iter().map(shape).collect())
                }
                fn names<'a>(n: &'a PsNode, out: &mut Vec<&'a Name>) {
                    out.push(&n.labels[0]);
                    for (c, l) in n.children.iter().zip(&n.labels[1..]) {
                        out.push(l);
                        names(c, out);
                    }
                }
                let tree = shape(node);
                let mut ns = Vec::new();
                names(node, &mut ns);
                for (i, n) in ns.iter().enumerate() {
                    if ns[..i].iter().any(|m| m.text == n.text) {
                        return err(n.pos, ErrorKind::DuplicateVariable(n.text.clone()));
                    }
                }
                let texts: Vec<String> = ns.iter().map(|n| n.text.clone()).collect();
                let ctx = tree_to_ctx(&tree).as_ref().clone().with_names(&texts);
                Ok((tree, ctx))
            }
        }
    }

    pub fn ctx(&mut self, c: &CtxExpr) -> EResult<Ctx> {
        match c {
            CtxExpr::Ps(ps, _) => Ok(self.ps(ps)?.1),
            CtxExpr::Binders(bs) => {
                let mut ctx = Ctx::new();
                for b in bs {
                    if ctx.lookup(&b.name.text).is_some() {
                        return err(b.name.pos, ErrorKind::DuplicateVariable(b.name.text.clone()));
                    }
                    let ty = self.ty(&ctx, &b.ty)?;
                    ctx.push(b.name.text.clone(), ty);
                }
                Ok(ctx)
            }
        }
    }

    pub fn ty(&mut self, ctx: &Ctx, e: &TyExpr) -> EResult<Type> {
        let TyExpr::Arrow { src, base, tgt, pos } = e else { return Ok(Type::Star) };
        let (s, sa) = self.tm(ctx, src)?;
        let (t, ta) = self.tm(ctx, tgt)?;
        let names = ctx.names();
        let show = |a: &Type| Printer::short().ty(a, &names);
        let base = match base {
            Some(b) => {
                let b = self.ty(ctx, b)?;
                for (side, got, p) in [("source", &sa, src.pos()), ("target", &ta, tgt.pos())] {
                    if !self.checker.def_eq_type(got, &b).map_err(typing(p))? {
                        return err(
                            p,
                            ErrorKind::TypeMismatch(format!(
                                "{side} has type `{}`, expected `{}`",
                                show(got),
                                show(&b)
                            )),
                        );
                    }
                }
                b
            }
            None => {
                if !self.checker.def_eq_type(&sa, &ta).map_err(typing(*pos))? {
                    return err(
                        *pos,
                        ErrorKind::TypeMismatch(format!(
                            "source has type `{}` but target has type `{}`",
                            show(&sa),
                            show(&ta)
                        )),
                    );
                }
                sa
            }
        };
        Ok(Type::arr(s, base, t))
    }

    /// A term together with its inferred type.
    pub fn tm(&mut self, ctx: &Ctx, e: &TmExpr) -> EResult<(Term, Type)> {
        let pos = e.pos();
        let callee = match &e.head {
            Head::Name(n) => {
                if let Some(i) = ctx.lookup(&n.text) {
                    if !e.args.is_empty() {
                        return err(pos, ErrorKind::NotAFunction(n.text.clone()));
                    }
                    return Ok((Term::Var(i), ctx.ty(i).clone()));
                }
                match self.env.get(&n.text) {
                    Some(g) => g.clone(),
                    None => return err(pos, ErrorKind::UnknownName(n.text.clone())),
                }
            }
            Head::Inline { ps, ty, pos } => {
                let (tree, params) = self.ps(ps)?;
                let a = self.ty(&params, ty)?;
                self.checker.check_coh_head(&tree, &a).map_err(typing(*pos))?;
                Global::Coh { tree, ctx: params, ty: a }
            }
        };
        let mut args = Vec::with_capacity(e.args.len());
        for a in &e.args {
            let (t, ty) = self.tm(ctx, &a.tm)?;
            args.push((t, ty, a.braced, a.tm.pos()));
        }
        let sub = self.infer_sub(ctx, callee.params(), &args, pos)?;
        self.checker.check_sub(ctx, &sub, callee.params()).map_err(typing(pos))?;
        let term = callee.instantiate(&sub);
        let ty = self.checker.infer_term(ctx, &term).map_err(typing(pos))?;
        Ok((term, ty))
    }

    fn infer_sub(
        &mut self,
        ctx: &Ctx,
        params: &Ctx,
        args: &[(Term, Type, bool, Pos)],
        pos: Pos,
    ) -> EResult<Sub> {
        let maximal = maximal_vars(params);
        let arity = |detail: String| {
            err(pos, ErrorKind::Arity { expected: maximal.len(), found: args.len(), detail })
        };
        if args.iter().any(|a| a.2) {
            if args.len() != params.len() {
                return err(
                    pos,
                    ErrorKind::Arity {
                        expected: params.len(),
                        found: args.len(),
                        detail: " (braced arguments require the full list)".into(),
                    },
                );
            }
            for (i, a) in args.iter().enumerate() {
                if a.2 == maximal.contains(&i) {
                    let what = if a.2 { "must not" } else { "must" };
                    return arity(format!(" (argument {} {what} be braced)", i + 1));
                }
            }
            return Ok(args.iter().map(|a| a.0.clone()).collect());
        }
        if args.len() != maximal.len() {
            return arity(String::new());
        }
        let mut assign: Vec<Option<Term>> = vec![None; params.len()];
        for (&v, (t, ty, _, p)) in maximal.iter().zip(args) {
            assign[v] = Some(t.clone());
            let pat = params.ty(v);
            if pat.dim() != ty.dim() {
                let names = ctx.names();
                return err(
                    *p,
                    ErrorKind::TypeMismatch(format!(
                        "argument for `{}` has dimension {}, expected {}",
                        params.name(v),
                        ty.dim(),
                        pat.dim()
                    ) + &format!(" (its type is `{}`)", Printer::short().ty(ty, &names))),
                );
            }
            self.unify(ctx, params, pat, ty, &mut assign, *p)?;
        }
        let mut out = Vec::with_capacity(params.len());
        for (i, a) in assign.into_iter().enumerate() {
            match a {
                Some(t) => out.push(t),
                None => return err(pos, ErrorKind::Uninferable(params.name(i).to_string())),
            }
        }
        Ok(Sub::new(out))
    }

    fn unify(
        &mut self,
        ctx: &Ctx,
        params: &Ctx,
        pat: &Type,
        actual: &Type,
        assign: &mut [Option<Term>],
        pos: Pos,
    ) -> EResult<()> {
        let (Type::Arr(p), Type::Arr(a)) = (pat, actual) else { return Ok(()) };
        for (pt, at) in [(&p.src, &a.src), (&p.tgt, &a.tgt)] {
            let Term::Var(j) = pt else { continue };
            match &assign[*j] {
                None => assign[*j] = Some(at.clone()),
                Some(prev) => {
                    if !self.checker.def_eq(prev, at).map_err(typing(pos))? {
                        let names = ctx.names();
                        return err(
                            pos,
                            ErrorKind::InferenceFailure {
                                var: params.name(*j).to_string(),
                                first: Printer::short().term(prev, &names),
                                second: Printer::short().term(at, &names),
                            },
                        );
                    }
                }
            }
        }
        self.unify(ctx, params, &p.base, &a.base, assign, pos)
    }

    /// Canonical source text for a global; parses back to the same value.
    pub fn print_global(&self, name: &str) -> Option<String> {
        let p = Printer::canonical();
        Some(match self.env.get(name)? {
            Global::Coh { tree, ctx, ty } => {
                format!("coh {name} {} : {}", print_ps(tree, &ctx.names()), p.ty(ty, &ctx.names()))
            }
            Global::Def { ctx, body, .. } => {
                format!("def {name} {} := {}", p.ctx(ctx), p.term(body, &ctx.names()))
            }
        })
    }
}

impl Default for Session {
    fn default() -> Self {
        Session::new(Config::default())
    }
}

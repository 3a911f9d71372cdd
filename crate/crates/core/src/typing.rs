//! Type checking with the two coherence support conditions and conversion by
//! normalization.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::pasting::{tree_inc_sub, tree_to_ctx, NotPasting, Side};
use crate::rewrite::{render_path, NormalizeError, Normalizer, PathElem, RuleSet};
use crate::syntax::{Ctx, Sub, Term, Type, VarSet};
use crate::tree::Tree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErrorKind {
    UnknownVariable(usize),
    NotPasting(NotPasting),
    SupportMismatch { side: Side, expected: VarSet, actual: VarSet },
    TypeMismatch { expected: Type, actual: Type },
    ArityMismatch { expected: usize, found: usize },
    /// A coherence whose type is ⋆.
    StarCoherence,
    Normalize(NormalizeError),
}

impl ErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            ErrorKind::UnknownVariable(_) => "UnknownVariable",
            ErrorKind::NotPasting(_) => "NotPasting",
            ErrorKind::SupportMismatch { .. } => "SupportMismatch",
            ErrorKind::TypeMismatch { .. } => "TypeMismatch",
            ErrorKind::ArityMismatch { .. } => "ArityMismatch",
            ErrorKind::StarCoherence => "StarCoherence",
            ErrorKind::Normalize(_) => "StepBudgetExceeded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct TypingError {
    pub kind: ErrorKind,
    pub path: Vec<PathElem>,
}

impl TypingError {
    fn new(kind: ErrorKind) -> TypingError {
        TypingError { kind, path: Vec::new() }
    }

    fn at(mut self, elem: PathElem) -> TypingError {
        self.path.insert(0, elem);
        self
    }

    /// One-line description without the kind name.
    pub fn detail(&self) -> String {
        let what = match &self.kind {
            ErrorKind::UnknownVariable(i) => format!("variable #{i} is not in scope"),
            ErrorKind::NotPasting(np) => np.to_string(),
            ErrorKind::SupportMismatch { side, expected, actual } => {
                let s = match side {
                    Side::Src => "source",
                    Side::Tgt => "target",
                };
                format!("{s} has support {actual}, expected {expected}")
            }
            ErrorKind::TypeMismatch { expected, actual } => format!(
                "expected a term of dimension-{} type, found dimension-{} type{}",
                expected.dim(),
                actual.dim(),
                if expected.dim() == actual.dim() { " with different boundary" } else { "" }
            ),
            ErrorKind::ArityMismatch { expected, found } => {
                format!("expected {expected} arguments, found {found}")
            }
            ErrorKind::StarCoherence => "a coherence must have an arrow type".to_string(),
            ErrorKind::Normalize(e) => e.to_string(),
        };
        format!("{what} at {}", render_path(&self.path))
    }
}

impl fmt::Display for TypingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.name(), self.detail())
    }
}

impl From<NormalizeError> for TypingError {
    fn from(e: NormalizeError) -> Self {
        TypingError::new(ErrorKind::Normalize(e))
    }
}

/// A checking session. Holds a normal-form cache and memoizes coherence
/// heads and inferred types.
#[derive(Debug)]
pub struct Checker {
    norm: Normalizer,
    heads: HashMap<(Tree, Type), Result<(), TypingError>>,
    inferred: HashMap<(u64, Term), Type>,
}

impl Default for Checker {
    fn default() -> Self {
        Checker::new(Normalizer::default())
    }
}

fn fingerprint(ctx: &Ctx) -> u64 {
    let mut h = DefaultHasher::new();
    for e in ctx.entries() {
        e.ty.hash(&mut h);
    }
    ctx.len().hash(&mut h);
    h.finish()
}

impl Checker {
    pub fn new(norm: Normalizer) -> Checker {
        Checker { norm, heads: HashMap::new(), inferred: HashMap::new() }
    }

    pub fn with_rules(rules: RuleSet, budget: usize) -> Checker {
        Checker::new(Normalizer::new(rules, budget))
    }

    pub fn normalizer(&mut self) -> &mut Normalizer {
        &mut self.norm
    }

    pub fn def_eq(&mut self, a: &Term, b: &Term) -> Result<bool, TypingError> {
        Ok(a == b || self.norm.term(a)? == self.norm.term(b)?)
    }

    pub fn def_eq_type(&mut self, a: &Type, b: &Type) -> Result<bool, TypingError> {
        Ok(a == b || self.norm.ty(a)? == self.norm.ty(b)?)
    }

    pub fn check_ctx(&mut self, ctx: &Ctx) -> Result<(), TypingError> {
        for (i, e) in ctx.entries().iter().enumerate() {
            if let Some(m) = e.ty.max_var().filter(|&m| m >= i) {
                return Err(TypingError::new(ErrorKind::UnknownVariable(m)).at(PathElem::Arg(i)));
            }
            self.check_type(ctx, &e.ty).map_err(|err| err.at(PathElem::Arg(i)))?;
        }
        Ok(())
    }

    pub fn check_type(&mut self, ctx: &Ctx, a: &Type) -> Result<(), TypingError> {
        let Type::Arr(arr) = a else { return Ok(()) };
        self.check_type(ctx, &arr.base).map_err(|e| e.at(PathElem::Base))?;
        for (t, elem) in [(&arr.src, PathElem::Src), (&arr.tgt, PathElem::Tgt)] {
            let got = self.infer_term(ctx, t).map_err(|e| e.at(elem.clone()))?;
            if !self.def_eq_type(&got, &arr.base)? {
                return Err(TypingError::new(ErrorKind::TypeMismatch {
                    expected: arr.base.clone(),
                    actual: got,
                })
                .at(elem));
            }
        }
        Ok(())
    }

    pub fn infer_term(&mut self, ctx: &Ctx, t: &Term) -> Result<Type, TypingError> {
        match t {
            Term::Var(i) if *i < ctx.len() => Ok(ctx.ty(*i).clone()),
            Term::Var(i) => Err(TypingError::new(ErrorKind::UnknownVariable(*i))),
            Term::Coh(c) => {
                let key = (fingerprint(ctx), t.clone());
                if let Some(ty) = self.inferred.get(&key) {
                    return Ok(ty.clone());
                }
                self.check_coh_head(&c.tree, &c.ty).map_err(|e| e.at(PathElem::Cell))?;
                self.check_sub(ctx, &c.args, &tree_to_ctx(&c.tree))?;
                let ty = c.ty.subst(&c.args);
                self.inferred.insert(key, ty.clone());
                Ok(ty)
            }
        }
    }

    pub fn check_term(&mut self, ctx: &Ctx, t: &Term, a: &Type) -> Result<(), TypingError> {
        let got = self.infer_term(ctx, t)?;
        if self.def_eq_type(&got, a)? {
            Ok(())
        } else {
            Err(TypingError::new(ErrorKind::TypeMismatch { expected: a.clone(), actual: got }))
        }
    }

    /// `σ : Δ → Γ`, with `ctx = Γ`. Error paths point at the offending entry.
    pub fn check_sub(&mut self, ctx: &Ctx, s: &Sub, delta: &Ctx) -> Result<(), TypingError> {
        if s.len() != delta.len() {
            return Err(TypingError::new(ErrorKind::ArityMismatch {
                expected: delta.len(),
                found: s.len(),
            }));
        }
        for (i, t) in s.iter().enumerate() {
            let got = self.infer_term(ctx, t).map_err(|e| e.at(PathElem::Arg(i)))?;
            let expected = delta.ty(i).subst(s);
            if !self.def_eq_type(&got, &expected)? {
                return Err(TypingError::new(ErrorKind::TypeMismatch { expected, actual: got })
                    .at(PathElem::Arg(i)));
            }
        }
        Ok(())
    }

    /// Validity of `A` as the type of a coherence over `T`.
    pub fn check_coh_head(&mut self, tree: &Tree, a: &Type) -> Result<(), TypingError> {
        let key = (tree.clone(), a.clone());
        if let Some(r) = self.heads.get(&key) {
            return r.clone();
        }
        let r = self.check_coh_head_uncached(tree, a);
        self.heads.insert(key, r.clone());
        r
    }

    fn check_coh_head_uncached(&mut self, tree: &Tree, a: &Type) -> Result<(), TypingError> {
        let Type::Arr(arr) = a else {
            return Err(TypingError::new(ErrorKind::StarCoherence));
        };
        let delta = tree_to_ctx(tree);
        if let Some(m) = a.max_var().filter(|&m| m >= delta.len()) {
            return Err(TypingError::new(ErrorKind::UnknownVariable(m)));
        }
        self.check_type(&delta, a)?;
        let supp_s = arr.src.support(&delta);
        let supp_t = arr.tgt.support(&delta);
        let all = delta.all_vars();
        if supp_s == all && supp_t == all {
            return Ok(());
        }
        let d = tree.dim();
        if d >= 1 {
            let bd_s = tree_inc_sub(Side::Src, d - 1, tree).support(&delta);
            let bd_t = tree_inc_sub(Side::Tgt, d - 1, tree).support(&delta);
            if supp_s == bd_s && supp_t == bd_t {
                return Ok(());
            }
            let err = if supp_s == all {
                ErrorKind::SupportMismatch { side: Side::Tgt, expected: all, actual: supp_t }
            } else if supp_s != bd_s {
                ErrorKind::SupportMismatch { side: Side::Src, expected: bd_s, actual: supp_s }
            } else {
                ErrorKind::SupportMismatch { side: Side::Tgt, expected: bd_t, actual: supp_t }
            };
            return Err(TypingError::new(err));
        }
        let (side, actual) = if supp_s != all { (Side::Src, supp_s) } else { (Side::Tgt, supp_t) };
        Err(TypingError::new(ErrorKind::SupportMismatch { side, expected: all, actual }))
    }

    pub fn decide_eq(&mut self, ctx: &Ctx, a: &Term, b: &Term) -> Result<bool, TypingError> {
        self.infer_term(ctx, a)?;
        self.infer_term(ctx, b)?;
        self.def_eq(a, b)
    }
}

pub fn check_ctx(ctx: &Ctx) -> Result<(), TypingError> {
    Checker::default().check_ctx(ctx)
}

pub fn check_type(ctx: &Ctx, a: &Type) -> Result<(), TypingError> {
    Checker::default().check_type(ctx, a)
}

pub fn infer_term(ctx: &Ctx, t: &Term) -> Result<Type, TypingError> {
    Checker::default().infer_term(ctx, t)
}

pub fn check_sub(ctx: &Ctx, s: &Sub, delta: &Ctx) -> Result<(), TypingError> {
    Checker::default().check_sub(ctx, s, delta)
}

pub fn decide_eq(ctx: &Ctx, a: &Term, b: &Term) -> Result<bool, TypingError> {
    Checker::default().decide_eq(ctx, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unbiased::{identity_term, unbiased_coh};

    fn t(s: &str) -> Tree {
        s.parse().unwrap()
    }

    #[test]
    fn binary_composite_has_type_x_to_z() {
        let two = t("[[],[]]");
        let ctx = tree_to_ctx(&two);
        let ty = infer_term(&ctx, &unbiased_coh(1, &two)).unwrap();
        assert_eq!(ty, Type::arr(Term::Var(0), Type::Star, Term::Var(3)));
    }

    #[test]
    fn identity_on_point() {
        let mut ctx = Ctx::new();
        ctx.push("t", Type::Star);
        let ty = infer_term(&ctx, &identity_term(&Type::Star, &Term::Var(0))).unwrap();
        assert_eq!(ty, Type::arr(Term::Var(0), Type::Star, Term::Var(0)));
    }

    #[test]
    fn wrong_target_support() {
        let two = t("[[],[]]");
        let ctx = tree_to_ctx(&two);
        let bad = Term::coh(two.clone(), Type::arr(Term::Var(0), Type::Star, Term::Var(1)), Sub::identity(5));
        let err = infer_term(&ctx, &bad).unwrap_err();
        assert_eq!(
            err.kind,
            ErrorKind::SupportMismatch {
                side: Side::Tgt,
                expected: [3].into_iter().collect(),
                actual: [1].into_iter().collect(),
            }
        );
        assert_eq!(err.path, vec![PathElem::Cell]);
    }

    #[test]
    fn endo_on_point_is_rejected_unless_full() {
        let d1 = Tree::disc(1);
        let ctx = tree_to_ctx(&d1);
        let bad = Term::coh(d1.clone(), Type::arr(Term::Var(0), Type::Star, Term::Var(0)), Sub::identity(3));
        assert!(matches!(infer_term(&ctx, &bad).unwrap_err().kind, ErrorKind::SupportMismatch { .. }));
    }

    #[test]
    fn ill_typed_argument() {
        let two = t("[[],[]]");
        let ctx = tree_to_ctx(&two);
        // f · f where f : x → y
        let ff = unbiased_coh(1, &two).subst(&Sub::new(vec![
            Term::Var(0),
            Term::Var(1),
            Term::Var(2),
            Term::Var(1),
            Term::Var(2),
        ]));
        let err = infer_term(&ctx, &ff).unwrap_err();
        assert!(matches!(err.kind, ErrorKind::TypeMismatch { .. }));
        assert_eq!(err.path, vec![PathElem::Arg(4)]);
    }

    #[test]
    fn star_coherence_rejected() {
        let ctx = tree_to_ctx(&Tree::leaf());
        let bad = Term::coh(Tree::leaf(), Type::Star, Sub::identity(1));
        assert_eq!(infer_term(&ctx, &bad).unwrap_err().kind, ErrorKind::StarCoherence);
    }

    #[test]
    fn decide_eq_distinguishes_variables() {
        let two = t("[[],[]]");
        let ctx = tree_to_ctx(&two);
        assert!(!decide_eq(&ctx, &Term::Var(2), &Term::Var(4)).unwrap());
        assert!(decide_eq(&ctx, &Term::Var(2), &Term::Var(2)).unwrap());
    }
}

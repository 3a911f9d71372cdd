//! Terms, types, contexts and substitutions of Catt.
//!
//! Variables are positional: `Var(i)` is the `i`-th entry of the context the
//! term lives in. Names are kept on contexts only, for printing.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::tree::Tree;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Var(usize),
    Coh(Arc<Coh>),
}

/// `Coh T A σ`: `A` lives over the tree context of `T`, `σ` maps into the
/// ambient context.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Coh {
    pub tree: Tree,
    pub ty: Type,
    pub args: Sub,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Type {
    Star,
    Arr(Arc<Arrow>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Arrow {
    pub src: Term,
    pub base: Type,
    pub tgt: Term,
}

/// A substitution out of a context of length `len()`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Sub {
    terms: Vec<Term>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CtxEntry {
    pub name: String,
    pub ty: Type,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Ctx {
    entries: Vec<CtxEntry>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct VarSet(BTreeSet<usize>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructuralError {
    #[error("arity mismatch: expected {expected} entries, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("variable {index} out of scope for context of length {len}")]
    OutOfScope { index: usize, len: usize },
    #[error("labelling does not match tree shape")]
    ShapeMismatch,
    #[error("wedge precondition violated: {0}")]
    Wedge(&'static str),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn coh(tree: Tree, ty: Type, args: Sub) -> Term {
        Term::Coh(Arc::new(Coh { tree, ty, args }))
    }

    pub fn as_var(&self) -> Option<usize> {
        match self {
            Term::Var(i) => Some(*i),
            Term::Coh(_) => None,
        }
    }

    pub fn as_coh(&self) -> Option<&Coh> {
        match self {
            Term::Var(_) => None,
            Term::Coh(c) => Some(c),
        }
    }

    pub fn subst(&self, s: &Sub) -> Term {
        match self {
            Term::Var(i) => s.terms[*i].clone(),
            Term::Coh(c) => Term::coh(c.tree.clone(), c.ty.clone(), c.args.subst(s)),
        }
    }

    /// Checked form of [`Term::subst`].
    pub fn try_subst(&self, s: &Sub) -> Result<Term, StructuralError> {
        check_scope(self.max_var(), s.len())?;
        Ok(self.subst(s))
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Term::Var(i) => Some(*i),
            Term::Coh(c) => c.args.max_var(),
        }
    }

    /// Dimension, reading variable types from `ctx`.
    pub fn dim(&self, ctx: &Ctx) -> usize {
        match self {
            Term::Var(i) => ctx.ty(*i).dim(),
            Term::Coh(c) => c.ty.dim(),
        }
    }

    pub fn free_vars(&self) -> VarSet {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        VarSet(out)
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Term::Var(i) => {
                out.insert(*i);
            }
            Term::Coh(c) => c.args.collect_vars(out),
        }
    }

    pub fn support(&self, ctx: &Ctx) -> VarSet {
        ctx.close(self.free_vars())
    }

    /// Number of nested coherence constructors along the deepest argument chain.
    pub fn nesting(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Coh(c) => 1 + c.args.iter().map(Term::nesting).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Coh(c) => 1 + c.ty.size() + c.args.iter().map(Term::size).sum::<usize>(),
        }
    }
}

impl Type {
    pub fn arr(src: Term, base: Type, tgt: Term) -> Type {
        Type::Arr(Arc::new(Arrow { src, base, tgt }))
    }

    pub fn as_arrow(&self) -> Option<&Arrow> {
        match self {
            Type::Star => None,
            Type::Arr(a) => Some(a),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Type::Star => 0,
            Type::Arr(a) => 1 + a.base.dim(),
        }
    }

    pub fn subst(&self, s: &Sub) -> Type {
        match self {
            Type::Star => Type::Star,
            Type::Arr(a) => Type::arr(a.src.subst(s), a.base.subst(s), a.tgt.subst(s)),
        }
    }

    pub fn try_subst(&self, s: &Sub) -> Result<Type, StructuralError> {
        check_scope(self.max_var(), s.len())?;
        Ok(self.subst(s))
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Type::Star => None,
            Type::Arr(a) => [a.src.max_var(), a.base.max_var(), a.tgt.max_var()]
                .into_iter()
                .flatten()
                .max(),
        }
    }

    pub fn free_vars(&self) -> VarSet {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        VarSet(out)
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        if let Type::Arr(a) = self {
            a.src.collect_vars(out);
            a.base.collect_vars(out);
            a.tgt.collect_vars(out);
        }
    }

    pub fn support(&self, ctx: &Ctx) -> VarSet {
        ctx.close(self.free_vars())
    }

    pub fn size(&self) -> usize {
        match self {
            Type::Star => 1,
            Type::Arr(a) => 1 + a.src.size() + a.base.size() + a.tgt.size(),
        }
    }

    /// The `k`-dimensional source and target pairs, lowest dimension first.
    pub fn boundary_chain(&self) -> Vec<(Term, Term)> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Type::Arr(a) = cur {
            out.push((a.src.clone(), a.tgt.clone()));
            cur = &a.base;
        }
        out.reverse();
        out
    }
}

impl Sub {
    pub fn new(terms: Vec<Term>) -> Sub {
        Sub { terms }
    }

    pub fn identity(n: usize) -> Sub {
        Sub { terms: (0..n).map(Term::Var).collect() }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Term> {
        self.terms.get(i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Term> {
        self.terms.iter()
    }

    pub fn as_slice(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_vec(self) -> Vec<Term> {
        self.terms
    }

    pub fn last(&self) -> Option<&Term> {
        self.terms.last()
    }

    /// `self ∘ s`: apply `s` to every entry.
    pub fn subst(&self, s: &Sub) -> Sub {
        Sub { terms: self.terms.iter().map(|t| t.subst(s)).collect() }
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.iter().filter_map(Term::max_var).max()
    }

    pub fn free_vars(&self) -> VarSet {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        VarSet(out)
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        for t in &self.terms {
            t.collect_vars(out);
        }
    }

    pub fn support(&self, ctx: &Ctx) -> VarSet {
        ctx.close(self.free_vars())
    }

    pub fn with(&self, i: usize, t: Term) -> Sub {
        let mut terms = self.terms.clone();
        terms[i] = t;
        Sub { terms }
    }
}

impl std::ops::Index<usize> for Sub {
    type Output = Term;
    fn index(&self, i: usize) -> &Term {
        &self.terms[i]
    }
}

impl FromIterator<Term> for Sub {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        Sub { terms: iter.into_iter().collect() }
    }
}

impl<'a> IntoIterator for &'a Sub {
    type Item = &'a Term;
    type IntoIter = std::slice::Iter<'a, Term>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}

fn check_scope(max: Option<usize>, len: usize) -> Result<(), StructuralError> {
    match max {
        Some(i) if i >= len => Err(StructuralError::OutOfScope { index: i, len }),
        _ => Ok(()),
    }
}

pub fn apply_sub_term(t: &Term, s: &Sub) -> Result<Term, StructuralError> {
    t.try_subst(s)
}

pub fn apply_sub_type(a: &Type, s: &Sub) -> Result<Type, StructuralError> {
    a.try_subst(s)
}

/// `τ ∘ σ` for `τ : Θ → Δ` and `σ : Δ → Γ`.
pub fn compose(tau: &Sub, sigma: &Sub) -> Result<Sub, StructuralError> {
    check_scope(tau.max_var(), sigma.len())?;
    Ok(tau.subst(sigma))
}

impl Ctx {
    pub fn new() -> Ctx {
        Ctx::default()
    }

    pub fn from_entries(entries: Vec<CtxEntry>) -> Ctx {
        Ctx { entries }
    }

    pub fn push(&mut self, name: impl Into<String>, ty: Type) -> usize {
        self.entries.push(CtxEntry { name: name.into(), ty });
        self.entries.len() - 1
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ty(&self, i: usize) -> &Type {
        &self.entries[i].ty
    }

    pub fn name(&self, i: usize) -> &str {
        &self.entries[i].name
    }

    pub fn entries(&self) -> &[CtxEntry] {
        &self.entries
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.entries.iter().rposition(|e| e.name == name)
    }

    pub fn dim(&self) -> usize {
        self.entries.iter().map(|e| e.ty.dim()).max().unwrap_or(0)
    }

    pub fn all_vars(&self) -> VarSet {
        VarSet((0..self.len()).collect())
    }

    pub fn with_names(mut self, names: &[String]) -> Ctx {
        for (e, n) in self.entries.iter_mut().zip(names) {
            e.name = n.clone();
        }
        self
    }

    /// Downward closure of `set`. Types only mention earlier entries, so one
    /// descending sweep suffices.
    pub fn close(&self, set: VarSet) -> VarSet {
        let mut out = set.0;
        let mut i = out.iter().next_back().copied();
        while let Some(k) = i {
            self.entries[k].ty.collect_vars(&mut out);
            i = out.range(..k).next_back().copied();
        }
        VarSet(out)
    }

    /// Last variable of type ⋆, the gluing point of a wedge sum.
    pub fn last_star(&self) -> Option<usize> {
        self.entries.iter().rposition(|e| e.ty == Type::Star)
    }
}

impl VarSet {
    pub fn new() -> VarSet {
        VarSet::default()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn insert(&mut self, i: usize) {
        self.0.insert(i);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.union(&other.0).copied().collect())
    }

    pub fn is_downward_closed(&self, ctx: &Ctx) -> bool {
        self.0.iter().all(|&i| ctx.ty(i).free_vars().0.is_subset(&self.0))
    }
}

impl FromIterator<usize> for VarSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VarSet(iter.into_iter().collect())
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

pub fn dim_type(a: &Type) -> usize {
    a.dim()
}

pub fn dim_term(t: &Term, ctx: &Ctx) -> usize {
    t.dim(ctx)
}

pub fn dim_ctx(ctx: &Ctx) -> usize {
    ctx.dim()
}

/// Positional variables carry no names, so derived equality is α-equality.
pub fn alpha_eq<T: PartialEq>(a: &T, b: &T) -> bool {
    a == b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_arrows() -> Ctx {
        let mut c = Ctx::new();
        c.push("x", Type::Star);
        c.push("y", Type::Star);
        c.push("f", Type::arr(Term::Var(0), Type::Star, Term::Var(1)));
        c
    }

    #[test]
    fn free_vars_and_support_of_arrow() {
        let c = two_arrows();
        let f = Term::Var(2);
        assert_eq!(f.free_vars().iter().collect::<Vec<_>>(), vec![2]);
        assert_eq!(f.support(&c).iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(Term::Var(0).support(&c).iter().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn dims() {
        assert_eq!(Type::Star.dim(), 0);
        assert_eq!(Type::arr(Term::Var(0), Type::Star, Term::Var(1)).dim(), 1);
        assert_eq!(two_arrows().dim(), 1);
    }

    #[test]
    fn checked_substitution_rejects_short_sub() {
        let err = Term::Var(3).try_subst(&Sub::identity(2)).unwrap_err();
        assert_eq!(err, StructuralError::OutOfScope { index: 3, len: 2 });
        assert!(compose(&Sub::identity(3), &Sub::identity(2)).is_err());
    }

    #[test]
    fn identity_substitution_is_neutral() {
        let a = Type::arr(Term::Var(0), Type::Star, Term::Var(1));
        assert_eq!(a.subst(&Sub::identity(2)), a);
    }
}

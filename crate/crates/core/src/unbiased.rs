//! Unbiased types, terms and coherences, disc substitutions and identities.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::pasting::{tree_inc_sub, Side};
use crate::syntax::{Sub, Term, Type};
use crate::tree::Tree;

thread_local! {
    static TYPE_MEMO: RefCell<HashMap<(Tree, usize), Type>> = RefCell::new(HashMap::new());
}

/// `𝒰ⁿ_T`.
pub fn unbiased_type(n: usize, tree: &Tree) -> Type {
    if n == 0 {
        return Type::Star;
    }
    let key = (tree.clone(), n);
    if let Some(ty) = TYPE_MEMO.with(|m| m.borrow().get(&key).cloned()) {
        return ty;
    }
    let m = n - 1;
    let core = unbiased_term(m, &tree.boundary(m));
    let src = core.subst(&tree_inc_sub(Side::Src, m, tree));
    let tgt = core.subst(&tree_inc_sub(Side::Tgt, m, tree));
    let ty = Type::arr(src, unbiased_type(m, tree), tgt);
    TYPE_MEMO.with(|memo| memo.borrow_mut().insert(key, ty.clone()));
    ty
}

/// `𝒯ⁿ_T`: the top variable when `T` is the `n`-disc, `𝒞ⁿ_T` otherwise.
pub fn unbiased_term(n: usize, tree: &Tree) -> Term {
    if tree.is_linear() && tree.dim() == n {
        Term::Var(tree.var_count() - 1)
    } else {
        unbiased_coh(n, tree)
    }
}

/// `𝒞ⁿ_T = Coh T 𝒰ⁿ_T [id]`.
pub fn unbiased_coh(n: usize, tree: &Tree) -> Term {
    Term::coh(tree.clone(), unbiased_type(n, tree), Sub::identity(tree.var_count()))
}

/// `{A, t} : D^{dim A} → Γ`.
pub fn disc_sub(a: &Type, t: &Term) -> Sub {
    let mut terms = Vec::with_capacity(2 * a.dim() + 1);
    for (s, u) in a.boundary_chain() {
        terms.push(s);
        terms.push(u);
    }
    terms.push(t.clone());
    Sub::new(terms)
}

/// Inverse of [`disc_sub`]; `None` unless the length is odd.
pub fn match_disc_sub(s: &Sub) -> Option<(Type, Term)> {
    if s.len() % 2 == 0 {
        return None;
    }
    let n = s.len() / 2;
    let mut a = Type::Star;
    for k in 0..n {
        a = Type::arr(s[2 * k].clone(), a, s[2 * k + 1].clone());
    }
    Some((a, s[2 * n].clone()))
}

/// `𝟙⟦{A, s}⟧`.
pub fn identity_term(a: &Type, s: &Term) -> Term {
    let n = a.dim();
    let d = Tree::disc(n);
    Term::coh(d.clone(), unbiased_type(n + 1, &d), disc_sub(a, s))
}

#[derive(Clone, Copy, Debug)]
pub struct UnbiasedMatch<'a> {
    pub n: usize,
    pub tree: &'a Tree,
    pub args: &'a Sub,
}

impl UnbiasedMatch<'_> {
    pub fn is_composite(&self) -> bool {
        self.n == self.tree.dim()
    }

    pub fn is_identity(&self) -> bool {
        self.tree.is_linear() && self.n == self.tree.dim() + 1
    }
}

/// Matches `Coh T 𝒰ⁿ_T [τ]` syntactically.
pub fn is_unbiased_coh(t: &Term) -> Option<UnbiasedMatch<'_>> {
    let c = t.as_coh()?;
    let n = c.ty.dim();
    (c.ty == unbiased_type(n, &c.tree)).then_some(UnbiasedMatch { n, tree: &c.tree, args: &c.args })
}

pub fn is_identity(t: &Term) -> bool {
    match t.as_coh() {
        Some(c) if c.tree.is_linear() && c.ty.dim() == c.tree.dim() + 1 => {
            is_unbiased_coh(t).is_some()
        }
        _ => false,
    }
}

pub fn is_unbiased_composite(t: &Term) -> bool {
    is_unbiased_coh(t).is_some_and(|m| m.is_composite())
}

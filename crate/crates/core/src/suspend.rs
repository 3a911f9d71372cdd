//! Suspension: adds two fresh 0-cells `N`, `S` in front and raises every
//! cell by one dimension.

use crate::syntax::{Ctx, Sub, Term, Type};

pub fn suspend_term(t: &Term) -> Term {
    match t {
        Term::Var(i) => Term::Var(i + 2),
        Term::Coh(c) => Term::coh(c.tree.suspend(), suspend_type(&c.ty), suspend_sub(&c.args)),
    }
}

pub fn suspend_type(a: &Type) -> Type {
    match a {
        Type::Star => Type::arr(Term::Var(0), Type::Star, Term::Var(1)),
        Type::Arr(arr) => {
            Type::arr(suspend_term(&arr.src), suspend_type(&arr.base), suspend_term(&arr.tgt))
        }
    }
}

pub fn suspend_sub(s: &Sub) -> Sub {
    let mut terms = vec![Term::Var(0), Term::Var(1)];
    terms.extend(s.iter().map(suspend_term));
    Sub::new(terms)
}

pub fn suspend_ctx(ctx: &Ctx) -> Ctx {
    let mut out = Ctx::new();
    out.push("N", Type::Star);
    out.push("S", Type::Star);
    for e in ctx.entries() {
        out.push(e.name.clone(), suspend_type(&e.ty));
    }
    out
}

pub fn suspend_tree(t: &crate::tree::Tree) -> crate::tree::Tree {
    t.suspend()
}

/// `Σᵏ` on terms.
pub fn suspend_term_n(t: &Term, k: usize) -> Term {
    (0..k).fold(t.clone(), |acc, _| suspend_term(&acc))
}

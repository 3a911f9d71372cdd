//! Reference implementations that share no helpers with the kernel beyond
//! the raw syntax types.

use std::collections::BTreeSet;

use catt_core::{Ctx, Sub, Term, Type};

fn var(t: &Term) -> Option<usize> {
    match t {
        Term::Var(i) => Some(*i),
        Term::Coh(_) => None,
    }
}

/// Derivability of `Γ ⊢ps`: start from `x : ⋆`, extend by a fresh target
/// and a fresh arrow, step down from an arrow to its target, finish at `⋆`.
pub fn pasting_oracle(ctx: &Ctx) -> bool {
    let n = ctx.len();
    if n == 0 || *ctx.ty(0) != Type::Star || n % 2 == 0 {
        return false;
    }
    // Current judgement `Γ ⊢ps cur : cur_ty`.
    let (mut cur, mut cur_ty) = (0usize, Type::Star);
    let mut i = 1;
    while i < n {
        let (y_ty, f_ty) = (ctx.ty(i), ctx.ty(i + 1));
        while cur_ty != *y_ty {
            let Type::Arr(a) = &cur_ty else { return false };
            let Some(t) = var(&a.tgt) else { return false };
            let base = a.base.clone();
            cur = t;
            cur_ty = base;
        }
        let expected = Type::arr(Term::Var(cur), y_ty.clone(), Term::Var(i));
        if *f_ty != expected {
            return false;
        }
        cur = i + 1;
        cur_ty = f_ty.clone();
        i += 2;
    }
    true
}

fn dims(ctx: &Ctx) -> Vec<usize> {
    (0..ctx.len()).map(|i| ctx.ty(i).dim()).collect()
}

/// Source (`src = true`) or target `n`-boundary of a pasting context, as a
/// set of variables: everything below `n`, plus the `n`-cells that are not
/// the target (resp. source) of an `(n+1)`-cell.
pub fn boundary_oracle(ctx: &Ctx, n: usize, src: bool) -> BTreeSet<usize> {
    let d = dims(ctx);
    let mut hit = BTreeSet::new();
    for i in 0..ctx.len() {
        if d[i] == n + 1 {
            if let Type::Arr(a) = ctx.ty(i) {
                let end = if src { &a.tgt } else { &a.src };
                hit.extend(var(end));
            }
        }
    }
    (0..ctx.len()).filter(|&i| d[i] < n || (d[i] == n && !hit.contains(&i))).collect()
}

/// Variables that occur in no other variable's type.
pub fn maximal_oracle(ctx: &Ctx) -> Vec<usize> {
    fn collect_ty(a: &Type, out: &mut BTreeSet<usize>) {
        if let Type::Arr(arr) = a {
            collect_tm(&arr.src, out);
            collect_tm(&arr.tgt, out);
            collect_ty(&arr.base, out);
        }
    }
    fn collect_tm(t: &Term, out: &mut BTreeSet<usize>) {
        match t {
            Term::Var(i) => {
                out.insert(*i);
            }
            Term::Coh(c) => c.args.iter().for_each(|a| collect_tm(a, out)),
        }
    }
    let mut used = BTreeSet::new();
    for i in 0..ctx.len() {
        collect_ty(ctx.ty(i), &mut used);
    }
    (0..ctx.len()).filter(|i| !used.contains(i)).collect()
}

/// `σ ≡ᵐᵃˣ τ` over `ctx`: syntactic agreement on the locally maximal variables.
pub fn eq_max_syntactic(sigma: &Sub, tau: &Sub, ctx: &Ctx) -> bool {
    sigma.len() == ctx.len()
        && tau.len() == ctx.len()
        && maximal_oracle(ctx).into_iter().all(|i| sigma[i] == tau[i])
}

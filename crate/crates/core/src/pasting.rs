//! Trees as pasting contexts: the context `⌊T⌋`, its inverse, wedge sums,
//! boundary inclusions and labellings.
//!
//! Variable order in `⌊T⌋` for `T = [T₀..Tₙ₋₁]` with root labels `t₀..tₙ`
//! is `t₀, t₁, ⌊T₀⌋, t₂, ⌊T₁⌋, …`, which is what iterated suspension
//! followed by wedge sum produces.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::suspend::suspend_ctx;
use crate::syntax::{Ctx, StructuralError, Sub, Term, Type};
use crate::tree::Tree;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Labelling {
    pub labels: Vec<Term>,
    pub children: Vec<Labelling>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a pasting context at variable {position}: {reason}")]
pub struct NotPasting {
    pub position: usize,
    pub reason: String,
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum Side {
    Src,
    Tgt,
}

impl Labelling {
    pub fn leaf(t: Term) -> Labelling {
        Labelling { labels: vec![t], children: Vec::new() }
    }

    pub fn shape(&self) -> Tree {
        Tree::new(self.children.iter().map(Labelling::shape).collect())
    }

    pub fn identity(tree: &Tree) -> Labelling {
        let mut next = 0;
        Labelling::number(tree, &mut next)
    }

    fn number(tree: &Tree, next: &mut usize) -> Labelling {
        let mut labels = vec![Term::Var(*next)];
        *next += 1;
        let mut children = Vec::new();
        for c in tree.children() {
            labels.push(Term::Var(*next));
            *next += 1;
            children.push(Labelling::number(c, next));
        }
        Labelling { labels, children }
    }

    pub fn from_sub(tree: &Tree, sub: &Sub) -> Result<Labelling, StructuralError> {
        if sub.len() != tree.var_count() {
            return Err(StructuralError::ArityMismatch {
                expected: tree.var_count(),
                found: sub.len(),
            });
        }
        let mut it = sub.iter().cloned();
        Ok(Labelling::consume(tree, &mut it))
    }

    fn consume(tree: &Tree, it: &mut impl Iterator<Item = Term>) -> Labelling {
        let mut labels = vec![it.next().expect("length checked")];
        let mut children = Vec::new();
        for c in tree.children() {
            labels.push(it.next().expect("length checked"));
            children.push(Labelling::consume(c, it));
        }
        Labelling { labels, children }
    }

    pub fn to_sub(&self) -> Sub {
        let mut out = Vec::new();
        self.flatten_into(&mut out);
        Sub::new(out)
    }

    fn flatten_into(&self, out: &mut Vec<Term>) {
        out.push(self.labels[0].clone());
        for (l, c) in self.labels[1..].iter().zip(&self.children) {
            out.push(l.clone());
            c.flatten_into(out);
        }
    }

    pub fn node(&self, path: &[usize]) -> Option<&Labelling> {
        match path.split_first() {
            None => Some(self),
            Some((&k, rest)) => self.children.get(k)?.node(rest),
        }
    }

    pub fn map(&self, f: &impl Fn(&Term) -> Term) -> Labelling {
        Labelling {
            labels: self.labels.iter().map(f).collect(),
            children: self.children.iter().map(|c| c.map(f)).collect(),
        }
    }

    fn is_well_shaped(&self) -> bool {
        self.labels.len() == self.children.len() + 1
            && self.children.iter().all(Labelling::is_well_shaped)
    }
}

pub fn identity_labelling(tree: &Tree) -> Labelling {
    Labelling::identity(tree)
}

pub fn labelling_to_sub(l: &Labelling, tree: &Tree) -> Result<Sub, StructuralError> {
    if !l.is_well_shaped() || &l.shape() != tree {
        return Err(StructuralError::ShapeMismatch);
    }
    Ok(l.to_sub())
}

thread_local! {
    static CTX_MEMO: RefCell<HashMap<Tree, Arc<Ctx>>> = RefCell::new(HashMap::new());
}

/// `⌊T⌋`, with canonical display names.
pub fn tree_to_ctx(tree: &Tree) -> Arc<Ctx> {
    if let Some(c) = CTX_MEMO.with(|m| m.borrow().get(tree).cloned()) {
        return c;
    }
    let ctx = Arc::new(build_ctx(tree).with_names(&tree_var_names(tree)));
    CTX_MEMO.with(|m| m.borrow_mut().insert(tree.clone(), ctx.clone()));
    ctx
}

fn build_ctx(tree: &Tree) -> Ctx {
    if tree.is_leaf() {
        let mut c = Ctx::new();
        c.push("x", Type::Star);
        return c;
    }
    tree.children()
        .iter()
        .map(|c| suspend_ctx(&build_ctx(c)))
        .reduce(|a, b| wedge(&a, &b).expect("suspensions are wedgeable"))
        .expect("non-empty")
}

/// Renaming of `Δ`'s variables into `Γ ∨ Δ`.
fn wedge_renaming(gamma: &Ctx, glue: usize, delta_len: usize) -> Sub {
    let mut terms = vec![Term::Var(glue)];
    terms.extend((1..delta_len).map(|j| Term::Var(gamma.len() + j - 1)));
    Sub::new(terms)
}

/// `Γ ∨ Δ`: identifies the last 0-cell of `Γ` with the first variable of `Δ`.
pub fn wedge(gamma: &Ctx, delta: &Ctx) -> Result<Ctx, StructuralError> {
    let glue = gamma.last_star().ok_or(StructuralError::Wedge("left operand has no 0-cell"))?;
    if delta.is_empty() || delta.ty(0) != &Type::Star {
        return Err(StructuralError::Wedge("right operand must start with a 0-cell"));
    }
    let r = wedge_renaming(gamma, glue, delta.len());
    let mut out = gamma.clone();
    for e in &delta.entries()[1..] {
        out.push(e.name.clone(), e.ty.subst(&r));
    }
    Ok(out)
}

/// `σ ∨ τ : Γ ∨ Δ → Γ′ ∨ Δ′` for `σ : Γ → Γ′` and `τ : Δ → Δ′`.
pub fn wedge_sub(
    gamma: &Ctx,
    sigma: &Sub,
    gamma_t: &Ctx,
    tau: &Sub,
) -> Result<Sub, StructuralError> {
    let glue = gamma.last_star().ok_or(StructuralError::Wedge("left source has no 0-cell"))?;
    let glue_t = gamma_t.last_star().ok_or(StructuralError::Wedge("left target has no 0-cell"))?;
    if sigma.len() != gamma.len() {
        return Err(StructuralError::ArityMismatch { expected: gamma.len(), found: sigma.len() });
    }
    if sigma[glue] != Term::Var(glue_t) {
        return Err(StructuralError::Wedge("left substitution must preserve the last 0-cell"));
    }
    if tau.get(0) != Some(&Term::Var(0)) {
        return Err(StructuralError::Wedge("right substitution must preserve the first variable"));
    }
    let delta_t_len = tau.max_var().map_or(1, |m| m + 1);
    let r = wedge_renaming(gamma_t, glue_t, delta_t_len);
    let mut terms = sigma.as_slice().to_vec();
    terms.extend(tau.as_slice()[1..].iter().map(|t| t.subst(&r)));
    Ok(Sub::new(terms))
}

/// Parses a context as a pasting diagram.
pub fn ctx_to_tree(ctx: &Ctx) -> Result<Tree, NotPasting> {
    struct Node {
        children: Vec<Tree>,
        last: usize,
    }
    fn close(stack: &mut Vec<Node>) {
        let node = stack.pop().expect("non-empty");
        stack.last_mut().expect("root stays").children.push(Tree::new(node.children));
    }
    let fail = |position: usize, reason: String| Err(NotPasting { position, reason });

    if ctx.is_empty() {
        return fail(0, "empty context".into());
    }
    if ctx.ty(0) != &Type::Star {
        return fail(0, format!("`{}` must be a 0-cell", ctx.name(0)));
    }
    let mut stack = vec![Node { children: Vec::new(), last: 0 }];
    let mut i = 1;
    while i < ctx.len() {
        let d = ctx.ty(i).dim();
        if d >= stack.len() {
            return fail(
                i,
                format!("`{}` has dimension {d} but no open cell of dimension {d} precedes it", ctx.name(i)),
            );
        }
        while stack.len() > d + 1 {
            close(&mut stack);
        }
        let cur = stack.last().expect("non-empty").last;
        if ctx.ty(i) != ctx.ty(cur) {
            return fail(i, format!("`{}` must have the same type as `{}`", ctx.name(i), ctx.name(cur)));
        }
        if i + 1 >= ctx.len() {
            return fail(i, format!("`{}` is not the target of any cell", ctx.name(i)));
        }
        let expected = Type::arr(Term::Var(cur), ctx.ty(cur).clone(), Term::Var(i));
        if ctx.ty(i + 1) != &expected {
            return fail(
                i + 1,
                format!("`{}` must be a cell from `{}` to `{}`", ctx.name(i + 1), ctx.name(cur), ctx.name(i)),
            );
        }
        stack.last_mut().expect("non-empty").last = i;
        stack.push(Node { children: Vec::new(), last: i + 1 });
        i += 2;
    }
    while stack.len() > 1 {
        close(&mut stack);
    }
    Ok(Tree::new(stack.pop().expect("root").children))
}

/// `δ^ε_n : ∂ₙT → ⌊T⌋` as a labelling.
pub fn tree_inc(side: Side, n: usize, tree: &Tree) -> Labelling {
    boundary_of(&Labelling::identity(tree), side, n)
}

/// Restricts a labelling of `T` along `δ^ε_n`, giving a labelling of `∂ₙT`.
pub fn boundary_of(l: &Labelling, side: Side, n: usize) -> Labelling {
    if n == 0 {
        let t = match side {
            Side::Src => l.labels[0].clone(),
            Side::Tgt => l.labels[l.labels.len() - 1].clone(),
        };
        Labelling::leaf(t)
    } else {
        Labelling {
            labels: l.labels.clone(),
            children: l.children.iter().map(|c| boundary_of(c, side, n - 1)).collect(),
        }
    }
}

pub fn tree_inc_sub(side: Side, n: usize, tree: &Tree) -> Sub {
    tree_inc(side, n, tree).to_sub()
}

/// Dimension of each variable of `⌊T⌋`, in context order.
pub fn var_dims(tree: &Tree) -> Vec<usize> {
    fn go(t: &Tree, d: usize, out: &mut Vec<usize>) {
        out.push(d);
        for c in t.children() {
            out.push(d);
            go(c, d + 1, out);
        }
    }
    let mut out = Vec::new();
    go(tree, 0, &mut out);
    out
}

/// Canonical names: `x0, x1, …` for 0-cells, `f0, …` for 1-cells, `a0, …`
/// for 2-cells, `p0, …` for 3-cells and `c4_0, …` above.
pub fn tree_var_names(tree: &Tree) -> Vec<String> {
    let mut counters: Vec<usize> = Vec::new();
    var_dims(tree)
        .into_iter()
        .map(|d| {
            if counters.len() <= d {
                counters.resize(d + 1, 0);
            }
            let k = counters[d];
            counters[d] += 1;
            match d {
                0 => format!("x{k}"),
                1 => format!("f{k}"),
                2 => format!("a{k}"),
                3 => format!("p{k}"),
                _ => format!("c{d}_{k}"),
            }
        })
        .collect()
}

/// Flat indices of the locally maximal variables (the leaves), left to right.
pub fn locally_maximal(tree: &Tree) -> Vec<usize> {
    let id = Labelling::identity(tree);
    tree.leaf_paths()
        .iter()
        .map(|p| id.node(p).expect("leaf path").labels[0].as_var().expect("identity"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        s.parse().unwrap()
    }

    fn arr(s: usize, base: Type, t: usize) -> Type {
        Type::arr(Term::Var(s), base, Term::Var(t))
    }

    #[test]
    fn two_arrow_context() {
        let c = tree_to_ctx(&t("[[],[]]"));
        let expected = vec![Type::Star, Type::Star, arr(0, Type::Star, 1), Type::Star, arr(1, Type::Star, 3)];
        let got: Vec<Type> = c.entries().iter().map(|e| e.ty.clone()).collect();
        assert_eq!(got, expected);
        assert_eq!(c.names(), vec!["x0", "x1", "f0", "x2", "f1"]);
    }

    #[test]
    fn figure_five_context() {
        // x, y, f, g, α : f → g, h, β : g → h
        let c = tree_to_ctx(&t("[[[],[]]]"));
        let xy = arr(0, Type::Star, 1);
        let expected = vec![
            Type::Star,
            Type::Star,
            xy.clone(),
            xy.clone(),
            arr(2, xy.clone(), 3),
            xy.clone(),
            arr(3, xy.clone(), 5),
        ];
        let got: Vec<Type> = c.entries().iter().map(|e| e.ty.clone()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn disc_three_variables() {
        let c = tree_to_ctx(&Tree::disc(3));
        assert_eq!(c.len(), 7);
        assert_eq!(c.dim(), 3);
        assert_eq!(var_dims(&Tree::disc(3)), vec![0, 0, 1, 1, 2, 2, 3]);
    }

    #[test]
    fn wedge_of_two_arrows() {
        let d1 = tree_to_ctx(&Tree::disc(1));
        let w = wedge(&d1, &d1).unwrap();
        assert_eq!(
            w.entries().iter().map(|e| &e.ty).collect::<Vec<_>>(),
            tree_to_ctx(&t("[[],[]]")).entries().iter().map(|e| &e.ty).collect::<Vec<_>>()
        );
    }

    #[test]
    fn wedge_of_two_discs() {
        let d2 = tree_to_ctx(&Tree::disc(2));
        let w = wedge(&d2, &d2).unwrap();
        assert_eq!(ctx_to_tree(&w).unwrap(), t("[[[]],[[]]]"));
    }

    #[test]
    fn disconnected_points_are_not_pasting() {
        let mut c = Ctx::new();
        c.push("x", Type::Star);
        c.push("y", Type::Star);
        let err = ctx_to_tree(&c).unwrap_err();
        assert_eq!(err.position, 1);
    }

    #[test]
    fn boundary_inclusions_by_hand() {
        let two = t("[[],[]]");
        assert_eq!(tree_inc_sub(Side::Src, 0, &two), Sub::new(vec![Term::Var(0)]));
        assert_eq!(tree_inc_sub(Side::Tgt, 0, &two), Sub::new(vec![Term::Var(3)]));
        let fig5 = t("[[[],[]]]");
        assert_eq!(tree_inc_sub(Side::Src, 1, &fig5).as_slice(), &[Term::Var(0), Term::Var(1), Term::Var(2)]);
        assert_eq!(tree_inc_sub(Side::Tgt, 1, &fig5).as_slice(), &[Term::Var(0), Term::Var(1), Term::Var(5)]);
    }

    #[test]
    fn identity_labelling_is_identity_sub() {
        let tr = t("[[[],[]],[]]");
        assert_eq!(labelling_to_sub(&Labelling::identity(&tr), &tr).unwrap(), Sub::identity(tr.var_count()));
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let l = Labelling::identity(&t("[[]]"));
        assert_eq!(labelling_to_sub(&l, &t("[[],[]]")), Err(StructuralError::ShapeMismatch));
    }

    #[test]
    fn locally_maximal_of_fig5() {
        assert_eq!(locally_maximal(&t("[[[],[]]]")), vec![4, 6]);
        assert_eq!(locally_maximal(&t("[]")), vec![0]);
    }
}

use catt_core::complexity::{natural_sum, OrdinalPoly};
use catt_core::insertion::{
    branches, exterior_sub, inserted_labelling, inserted_tree, interior_sub, Branch,
};
use catt_core::pasting::{
    ctx_to_tree, labelling_to_sub, tree_inc_sub, tree_to_ctx, var_dims, Labelling, Side,
};
use catt_core::rewrite::{one_step_term, RuleSet};
use catt_core::suspend::{suspend_ctx, suspend_sub, suspend_term, suspend_type};
use catt_core::syntax::{Sub, Term};
use catt_core::tree::Tree;
use catt_core::unbiased::{unbiased_coh, unbiased_term, unbiased_type};
use proptest::prelude::*;

fn arb_tree() -> impl Strategy<Value = Tree> {
    Just(Tree::leaf()).prop_recursive(4, 12, 3, |inner| {
        prop::collection::vec(inner, 0..=3).prop_map(Tree::new)
    })
}

fn arb_nonempty_tree() -> impl Strategy<Value = Tree> {
    arb_tree().prop_filter("needs a branch", |t| !t.is_leaf())
}

/// Well-scoped but not necessarily well-typed terms over `n` variables.
fn arb_term(n: usize) -> impl Strategy<Value = Term> {
    let leaf = (0..n).prop_map(Term::Var);
    leaf.prop_recursive(3, 24, 4, move |inner| {
        (prop::sample::select(vec!["[[]]", "[[],[]]", "[[[]]]", "[[[],[]]]"]), 0usize..3)
            .prop_flat_map(move |(shape, extra)| {
                let tree: Tree = shape.parse().unwrap();
                let n = tree.dim() + extra.min(1);
                let len = tree.var_count();
                prop::collection::vec(inner.clone(), len)
                    .prop_map(move |args| Term::coh(tree.clone(), unbiased_type(n, &tree), Sub::new(args)))
            })
    })
}

fn arb_sub(len: usize, over: usize) -> impl Strategy<Value = Sub> {
    prop::collection::vec(arb_term(over), len).prop_map(Sub::new)
}

fn arb_ordinal() -> impl Strategy<Value = OrdinalPoly> {
    prop::collection::vec((0usize..4, 1u64..5), 0..4).prop_map(|ms| {
        ms.into_iter()
            .fold(OrdinalPoly::zero(), |acc, (e, c)| acc.natural_sum(&OrdinalPoly::monomial(e, c)))
    })
}

fn tree_with_branch() -> impl Strategy<Value = (Tree, Branch)> {
    arb_nonempty_tree().prop_flat_map(|s| {
        let bs = branches(&s);
        (Just(s), prop::sample::select(bs))
    })
}

/// An insertion point with `lh(P) ≥ dim T`.
fn insertion_point() -> impl Strategy<Value = (Tree, Branch, Tree)> {
    (tree_with_branch(), arb_tree()).prop_filter_map("not an insertion point", |((s, p), t)| {
        let t = (0..p.bh()).fold(t, |acc, _| acc.suspend());
        (t.trunk_height() >= p.bh() && p.lh(&s) >= t.dim()).then_some((s, p, t))
    })
}

proptest! {
    #[test]
    fn substitution_is_associative_and_unital(
        t in arb_term(3), tau in arb_sub(3, 4), sigma in arb_sub(4, 2)
    ) {
        prop_assert_eq!(t.subst(&tau.subst(&sigma)), t.subst(&tau).subst(&sigma));
        prop_assert_eq!(t.subst(&Sub::identity(3)), t.clone());
        prop_assert_eq!(tau.subst(&Sub::identity(4)), tau.clone());
        prop_assert_eq!(Sub::identity(3).subst(&tau), tau);
    }

    #[test]
    fn support_is_closed_and_idempotent(tree in arb_tree(), picks in prop::collection::vec(0usize..64, 1..4)) {
        let ctx = tree_to_ctx(&tree);
        let vars: Sub = picks.iter().map(|p| Term::Var(p % ctx.len())).collect();
        let s = vars.support(&ctx);
        prop_assert!(s.is_downward_closed(&ctx));
        prop_assert_eq!(ctx.close(s.clone()), s);
    }

    #[test]
    fn tree_context_roundtrip(tree in arb_tree()) {
        prop_assert_eq!(ctx_to_tree(&tree_to_ctx(&tree)), Ok(tree.clone()));
        prop_assert!(tree.trunk_height() <= tree.dim());
        prop_assert_eq!(tree_to_ctx(&tree).len(), tree.var_count());
    }

    #[test]
    fn suspension_commutes_with_tree_context(tree in arb_tree()) {
        let lhs = suspend_ctx(&tree_to_ctx(&tree));
        let rhs = tree_to_ctx(&tree.suspend());
        let types = |c: &catt_core::Ctx| c.entries().iter().map(|e| e.ty.clone()).collect::<Vec<_>>();
        prop_assert_eq!(types(&lhs), types(&rhs));
    }

    #[test]
    fn suspension_is_functorial(t in arb_term(3), sigma in arb_sub(3, 3)) {
        prop_assert_eq!(suspend_term(&t.subst(&sigma)), suspend_term(&t).subst(&suspend_sub(&sigma)));
    }

    #[test]
    fn boundary_supports_are_truncations(tree in arb_tree(), n in 0usize..4) {
        let ctx = tree_to_ctx(&tree);
        let src = tree_inc_sub(Side::Src, n, &tree).support(&ctx);
        let tgt = tree_inc_sub(Side::Tgt, n, &tree).support(&ctx);
        prop_assert!(src.is_downward_closed(&ctx) && tgt.is_downward_closed(&ctx));
        // Everything below dimension n lies in both boundaries, nothing above n in either.
        for (i, d) in var_dims(&tree).into_iter().enumerate() {
            if d < n {
                prop_assert!(src.contains(i) && tgt.contains(i), "variable {} of dim {}", i, d);
            }
            if d > n {
                prop_assert!(!src.contains(i) && !tgt.contains(i), "variable {} of dim {}", i, d);
            }
        }
    }

    #[test]
    fn labelling_roundtrip(tree in arb_tree(), seed in 0usize..100) {
        let sub: Sub = (0..tree.var_count()).map(|i| Term::Var((i * 7 + seed) % 11)).collect();
        let l = Labelling::from_sub(&tree, &sub).unwrap();
        prop_assert_eq!(l.shape(), tree.clone());
        prop_assert_eq!(labelling_to_sub(&l, &tree).unwrap(), sub);
    }

    #[test]
    fn unbiased_suspension_laws(tree in arb_tree(), n in 0usize..5) {
        prop_assert_eq!(suspend_type(&unbiased_type(n, &tree)), unbiased_type(n + 1, &tree.suspend()));
        prop_assert_eq!(suspend_term(&unbiased_term(n, &tree)), unbiased_term(n + 1, &tree.suspend()));
        prop_assert_eq!(suspend_term(&unbiased_coh(n, &tree)), unbiased_coh(n + 1, &tree.suspend()));
    }

    #[test]
    fn unbiased_coh_reaches_unbiased_term(tree in arb_tree()) {
        for n in 1..=tree.dim() + 1 {
            let c = unbiased_coh(n, &tree);
            let target = unbiased_term(n, &tree);
            let reachable = c == target
                || one_step_term(&c, RuleSet::sua()).iter().any(|r| r.result == target);
            prop_assert!(reachable, "n = {}", n);
        }
    }

    #[test]
    fn branch_heights(pair in tree_with_branch()) {
        let (s, p) = pair;
        prop_assert!(p.bh() + 1 <= p.lh(&s));
        prop_assert_eq!(p.lh(&s), p.path().len() + s.subtree(p.path()).unwrap().dim());
    }

    #[test]
    fn exterior_sends_branch_to_unbiased_coherence(pt in insertion_point()) {
        let (s, p, t) = pt;
        let kappa = exterior_sub(&s, &p, &t).unwrap();
        let iota = interior_sub(&s, &p, &t).unwrap();
        prop_assert_eq!(&kappa[p.leaf_var(&s)], &unbiased_coh(p.lh(&s), &t).subst(&iota));
    }

    #[test]
    fn exterior_interior_insertion_is_identity(pt in insertion_point()) {
        let (s, p, t) = pt;
        let ins = inserted_tree(&s, &p, &t).unwrap();
        let kappa = Labelling::from_sub(&s, &exterior_sub(&s, &p, &t).unwrap()).unwrap();
        let iota = Labelling::from_sub(&t, &interior_sub(&s, &p, &t).unwrap()).unwrap();
        prop_assert_eq!(inserted_labelling(&kappa, p.path(), &iota).to_sub(), Sub::identity(ins.var_count()));
    }

    #[test]
    fn insertion_suspends(pt in insertion_point()) {
        let (s, p, t) = pt;
        let sp = Branch::new(&s.suspend(), [vec![0], p.path().to_vec()].concat()).unwrap();
        prop_assert_eq!(inserted_tree(&s.suspend(), &sp, &t.suspend()).unwrap(), inserted_tree(&s, &p, &t).unwrap().suspend());
        let kappa = exterior_sub(&s, &p, &t).unwrap();
        prop_assert_eq!(suspend_sub(&kappa), exterior_sub(&s.suspend(), &sp, &t.suspend()).unwrap());
    }

    #[test]
    fn disc_degeneracies(pt in insertion_point()) {
        let (s, p, t) = pt;
        // Inserting the disc of the branch's own height changes nothing.
        let d = Tree::disc(p.lh(&s));
        prop_assert_eq!(inserted_tree(&s, &p, &d).unwrap(), s.clone());
        // Inserting into a disc gives back the inserted tree.
        let n = t.dim().max(1);
        let disc = Tree::disc(n);
        let dp = Branch::new(&disc, vec![0]).unwrap();
        if dp.bh() <= t.trunk_height() && dp.lh(&disc) >= t.dim() {
            prop_assert_eq!(inserted_tree(&disc, &dp, &t).unwrap(), t.clone());
            prop_assert_eq!(interior_sub(&disc, &dp, &t).unwrap(), Sub::identity(t.var_count()));
        }
    }

    #[test]
    fn natural_sum_laws(a in arb_ordinal(), b in arb_ordinal(), c in arb_ordinal()) {
        prop_assert_eq!(natural_sum(&a, &natural_sum(&b, &c)), natural_sum(&natural_sum(&a, &b), &c));
        prop_assert_eq!(natural_sum(&a, &b), natural_sum(&b, &a));
        if a < b {
            prop_assert!(natural_sum(&a, &c) < natural_sum(&b, &c));
        }
        let lt = [a < b, a == b, b < a];
        prop_assert_eq!(lt.iter().filter(|x| **x).count(), 1);
    }
}

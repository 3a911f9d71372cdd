//! Insertion of an argument's pasting tree into the head tree of a coherence.

use std::fmt;

use thiserror::Error;

use crate::pasting::Labelling;
use crate::suspend::suspend_sub;
use crate::syntax::{Sub, Term, Type};
use crate::tree::Tree;
use crate::unbiased::{disc_sub, is_identity, is_unbiased_coh, unbiased_coh, unbiased_type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InsertionError {
    #[error("branch height {bh} exceeds trunk height {th} of the inserted tree")]
    HeightMismatch { bh: usize, th: usize },
    #[error("{0:?} is not a branch of the tree")]
    NotBranch(Vec<usize>),
    #[error("not an insertion redex: {0}")]
    NotRedex(String),
}

/// A non-empty path to a linear subtree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Branch {
    path: Vec<usize>,
}

impl Branch {
    pub fn new(tree: &Tree, path: Vec<usize>) -> Result<Branch, InsertionError> {
        match tree.subtree(&path) {
            Some(sub) if !path.is_empty() && sub.is_linear() => Ok(Branch { path }),
            _ => Err(InsertionError::NotBranch(path)),
        }
    }

    pub fn path(&self) -> &[usize] {
        &self.path
    }

    pub fn bh(&self) -> usize {
        self.path.len() - 1
    }

    pub fn lh(&self, tree: &Tree) -> usize {
        self.path.len() + self.subtree(tree).dim()
    }

    fn subtree<'a>(&self, tree: &'a Tree) -> &'a Tree {
        tree.subtree(&self.path).expect("branch of this tree")
    }

    /// Path to the leaf at the top of the linear subtree.
    pub fn leaf_path(&self, tree: &Tree) -> Vec<usize> {
        let mut p = self.path.clone();
        p.extend(std::iter::repeat(0).take(self.subtree(tree).dim()));
        p
    }

    /// Index of `⌊P⌋` in `⌊S⌋`.
    pub fn leaf_var(&self, tree: &Tree) -> usize {
        let id = Labelling::identity(tree);
        id.node(&self.leaf_path(tree)).expect("leaf").labels[0].as_var().expect("identity")
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.path)
    }
}

/// Every branch of `tree`, in lexicographic order.
pub fn branches(tree: &Tree) -> Vec<Branch> {
    fn go(t: &Tree, prefix: &mut Vec<usize>, out: &mut Vec<Branch>) {
        for (k, c) in t.children().iter().enumerate() {
            prefix.push(k);
            if c.is_linear() {
                out.push(Branch { path: prefix.clone() });
            }
            go(c, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(tree, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// One branch per locally maximal variable: the shortest one, whose subtree
/// is the largest linear subtree containing the leaf.
pub fn canonical_branches(tree: &Tree) -> Vec<Branch> {
    let mut out: Vec<Branch> = tree
        .leaf_paths()
        .into_iter()
        .filter(|q| !q.is_empty())
        .map(|q| {
            let j = (1..=q.len())
                .find(|&j| tree.subtree(&q[..j]).is_some_and(Tree::is_linear))
                .expect("the leaf itself is linear");
            Branch { path: q[..j].to_vec() }
        })
        .collect();
    out.sort();
    out
}

fn check_point(p: &Branch, t: &Tree) -> Result<(), InsertionError> {
    let th = t.trunk_height();
    if p.bh() > th {
        Err(InsertionError::HeightMismatch { bh: p.bh(), th })
    } else {
        Ok(())
    }
}

/// `S ≪_P T`.
pub fn inserted_tree(s: &Tree, p: &Branch, t: &Tree) -> Result<Tree, InsertionError> {
    check_point(p, t)?;
    Ok(insert_tree(s, &p.path, t))
}

fn insert_tree(s: &Tree, path: &[usize], t: &Tree) -> Tree {
    let k = path[0];
    let sc = s.children();
    let mut children: Vec<Tree> = sc[..k].to_vec();
    if path.len() == 1 {
        children.extend(t.children().iter().cloned());
    } else {
        children.push(insert_tree(&sc[k], &path[1..], &t.children()[0]));
    }
    children.extend(sc[k + 1..].iter().cloned());
    Tree::new(children)
}

/// `ι : ⌊T⌋ → ⌊S ≪_P T⌋`.
pub fn interior_sub(s: &Tree, p: &Branch, t: &Tree) -> Result<Sub, InsertionError> {
    let ins = inserted_tree(s, p, t)?;
    Ok(interior_labelling(&p.path, t, &Labelling::identity(&ins)).to_sub())
}

/// `ι`, reading the variables of the inserted tree off `target`.
fn interior_labelling(path: &[usize], t: &Tree, target: &Labelling) -> Labelling {
    let k = path[0];
    if path.len() == 1 {
        let m = t.children().len();
        Labelling {
            labels: target.labels[k..=k + m].to_vec(),
            children: target.children[k..k + m].to_vec(),
        }
    } else {
        Labelling {
            labels: target.labels[k..=k + 1].to_vec(),
            children: vec![interior_labelling(&path[1..], &t.children()[0], &target.children[k])],
        }
    }
}

/// `κ : ⌊S⌋ → ⌊S ≪_P T⌋`.
pub fn exterior_sub(s: &Tree, p: &Branch, t: &Tree) -> Result<Sub, InsertionError> {
    check_point(p, t)?;
    Ok(exterior(s, &p.path, t))
}

fn exterior(s: &Tree, path: &[usize], t: &Tree) -> Sub {
    let target = Labelling::identity(&insert_tree(s, path, t));
    let k = path[0];
    let sk = &s.children()[k];
    let mut labels: Vec<Term> = Vec::with_capacity(s.children().len() + 1);
    let mut children: Vec<Labelling> = Vec::with_capacity(s.children().len());
    if path.len() == 1 {
        let m = t.children().len();
        let lh = 1 + sk.dim();
        let iota = interior_labelling(path, t, &target).to_sub();
        let disc = disc_sub(&unbiased_type(lh, t), &unbiased_coh(lh, t)).subst(&iota);
        let child = Labelling::from_sub(sk, &Sub::new(disc.as_slice()[2..].to_vec()))
            .expect("disc matches linear subtree");
        for i in 0..=s.children().len() {
            labels.push(target.labels[if i <= k { i } else { i + m - 1 }].clone());
        }
        for i in 0..s.children().len() {
            children.push(match i.cmp(&k) {
                std::cmp::Ordering::Less => target.children[i].clone(),
                std::cmp::Ordering::Equal => child.clone(),
                std::cmp::Ordering::Greater => target.children[i + m - 1].clone(),
            });
        }
    } else {
        let inner = exterior(sk, &path[1..], &t.children()[0]);
        let mut incl = vec![target.labels[k].clone(), target.labels[k + 1].clone()];
        incl.extend(target.children[k].to_sub().into_vec());
        let lifted = suspend_sub(&inner).subst(&Sub::new(incl));
        let child = Labelling::from_sub(sk, &Sub::new(lifted.as_slice()[2..].to_vec()))
            .expect("suspension preserves shape");
        labels = target.labels.clone();
        children = target.children.clone();
        children[k] = child;
    }
    Labelling { labels, children }.to_sub()
}

/// `L ≪_P M` on labellings; no redex condition is checked.
pub fn inserted_labelling(l: &Labelling, path: &[usize], m: &Labelling) -> Labelling {
    let k = path[0];
    let mut labels: Vec<Term> = l.labels[..k].to_vec();
    let mut children: Vec<Labelling> = l.children[..k].to_vec();
    if path.len() == 1 {
        labels.extend(m.labels.iter().cloned());
        children.extend(m.children.iter().cloned());
    } else {
        labels.extend(m.labels[..2].iter().cloned());
        children.push(inserted_labelling(&l.children[k], &path[1..], &m.children[0]));
    }
    labels.extend(l.labels[k + 2..].iter().cloned());
    children.extend(l.children[k + 1..].iter().cloned());
    Labelling { labels, children }
}

/// `σ ≪_P τ`, after checking `⌊P⌋⟦σ⟧ ≡ 𝒞^{lh P}_T⟦τ⟧`.
pub fn inserted_sub(
    s: &Tree,
    p: &Branch,
    t: &Tree,
    sigma: &Sub,
    tau: &Sub,
) -> Result<Sub, InsertionError> {
    check_point(p, t)?;
    let lsig = Labelling::from_sub(s, sigma).map_err(|e| InsertionError::NotRedex(e.to_string()))?;
    let ltau = Labelling::from_sub(t, tau).map_err(|e| InsertionError::NotRedex(e.to_string()))?;
    let expected = unbiased_coh(p.lh(s), t).subst(tau);
    if sigma[p.leaf_var(s)] != expected {
        return Err(InsertionError::NotRedex(format!(
            "argument at branch {p} is not the unbiased coherence over {t}"
        )));
    }
    Ok(inserted_labelling(&lsig, &p.path, &ltau).to_sub())
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InsertionRedex {
    pub outer: Tree,
    pub branch: Branch,
    pub inner: Tree,
    pub sigma: Sub,
    pub tau: Sub,
}

impl InsertionRedex {
    pub fn result_tree(&self) -> Tree {
        insert_tree(&self.outer, &self.branch.path, &self.inner)
    }

    pub fn kappa(&self) -> Sub {
        exterior(&self.outer, &self.branch.path, &self.inner)
    }

    pub fn iota(&self) -> Sub {
        let target = Labelling::identity(&self.result_tree());
        interior_labelling(&self.branch.path, &self.inner, &target).to_sub()
    }

    pub fn inserted(&self) -> Sub {
        let l = Labelling::from_sub(&self.outer, &self.sigma).expect("arity");
        let m = Labelling::from_sub(&self.inner, &self.tau).expect("arity");
        inserted_labelling(&l, &self.branch.path, &m).to_sub()
    }

    /// `Coh (S ≪ T) A⟦κ⟧ (σ ≪ τ)` for a coherence of type `ty` over `S`.
    pub fn reduct(&self, ty: &Type) -> Term {
        Term::coh(self.result_tree(), ty.subst(&self.kappa()), self.inserted())
    }
}

/// All insertion redexes of a coherence term, one per locally maximal
/// argument, in lexicographic branch order.
pub fn find_redexes(term: &Term) -> Vec<InsertionRedex> {
    let Some(c) = term.as_coh() else { return Vec::new() };
    if is_identity(term) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for p in canonical_branches(&c.tree) {
        let arg = &c.args[p.leaf_var(&c.tree)];
        let Some(m) = is_unbiased_coh(arg) else { continue };
        if m.n != p.lh(&c.tree) || !(m.is_composite() || m.is_identity()) {
            continue;
        }
        if p.bh() > m.tree.trunk_height() {
            continue;
        }
        out.push(InsertionRedex {
            outer: c.tree.clone(),
            branch: p,
            inner: m.tree.clone(),
            sigma: c.args.clone(),
            tau: m.args.clone(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unbiased::identity_term;

    fn t(s: &str) -> Tree {
        s.parse().unwrap()
    }

    fn br(tree: &Tree, p: &[usize]) -> Branch {
        Branch::new(tree, p.to_vec()).unwrap()
    }

    #[test]
    fn figure_one() {
        let s = t("[[[],[]],[]]");
        let p = br(&s, &[0, 0]);
        assert_eq!(inserted_tree(&s, &p, &t("[[[],[]]]")).unwrap(), t("[[[],[],[]],[]]"));
        assert_eq!(inserted_tree(&s, &p, &t("[[]]")).unwrap(), t("[[[]],[]]"));
        assert_eq!(
            inserted_tree(&s, &p, &t("[[],[]]")),
            Err(InsertionError::HeightMismatch { bh: 1, th: 0 })
        );
    }

    #[test]
    fn figure_four_tree() {
        let s = t("[[],[]]");
        assert_eq!(inserted_tree(&s, &br(&s, &[1]), &s).unwrap(), t("[[],[],[]]"));
    }

    #[test]
    fn branch_statistics() {
        let s = t("[[[],[]],[]]");
        let p = br(&s, &[0, 0]);
        assert_eq!((p.bh(), p.lh(&s)), (1, 2));
        assert_eq!(p.leaf_var(&s), 4);
        assert!(Branch::new(&s, vec![0]).is_err());
        assert!(Branch::new(&s, vec![]).is_err());
        let d = Tree::disc(3);
        assert_eq!(canonical_branches(&d), vec![br(&d, &[0])]);
        assert_eq!(branches(&d).len(), 3);
    }

    #[test]
    fn interior_of_figure_four() {
        let s = t("[[],[]]");
        // ⌊[[],[],[]]⌋ = x0 x1 f0 x2 f1 x3 f2; the inserted copy is x1 x2 f1 x3 f2
        let iota = interior_sub(&s, &br(&s, &[1]), &s).unwrap();
        assert_eq!(iota, Sub::new(vec![Term::Var(1), Term::Var(3), Term::Var(4), Term::Var(5), Term::Var(6)]));
    }

    #[test]
    fn exterior_of_figure_four() {
        let s = t("[[],[]]");
        let kappa = exterior_sub(&s, &br(&s, &[1]), &s).unwrap();
        let iota = interior_sub(&s, &br(&s, &[1]), &s).unwrap();
        assert_eq!(kappa[0], Term::Var(0));
        assert_eq!(kappa[1], Term::Var(1));
        assert_eq!(kappa[2], Term::Var(2));
        assert_eq!(kappa[3], Term::Var(5));
        assert_eq!(kappa[4], unbiased_coh(1, &s).subst(&iota));
    }

    #[test]
    fn composite_into_composite() {
        let s = t("[[],[]]");
        // f · (g · h) over x y f z g w h
        let gh = unbiased_coh(1, &s).subst(&Sub::new(vec![
            Term::Var(1),
            Term::Var(3),
            Term::Var(4),
            Term::Var(5),
            Term::Var(6),
        ]));
        let term = unbiased_coh(1, &s).subst(&Sub::new(vec![
            Term::Var(0),
            Term::Var(1),
            Term::Var(2),
            Term::Var(5),
            gh,
        ]));
        let redexes = find_redexes(&term);
        assert_eq!(redexes.len(), 1);
        assert_eq!(redexes[0].branch.path(), &[1]);
        let c = term.as_coh().unwrap();
        let out = redexes[0].reduct(&c.ty);
        assert_eq!(out, unbiased_coh(1, &t("[[],[],[]]")));
    }

    #[test]
    fn identity_argument_is_a_redex() {
        let s = t("[[],[]]");
        let id_y = identity_term(&Type::Star, &Term::Var(1));
        let term = unbiased_coh(1, &s).subst(&Sub::new(vec![
            Term::Var(0),
            Term::Var(1),
            Term::Var(2),
            Term::Var(1),
            id_y,
        ]));
        let r = find_redexes(&term);
        assert_eq!(r.len(), 1);
        let out = r[0].reduct(&term.as_coh().unwrap().ty);
        assert_eq!(out, unbiased_coh(1, &Tree::disc(1)));
    }

    #[test]
    fn variable_arguments_have_no_redex() {
        assert!(find_redexes(&unbiased_coh(1, &t("[[],[]]"))).is_empty());
    }

    #[test]
    fn inserted_sub_rejects_non_redex() {
        let s = t("[[],[]]");
        let p = br(&s, &[1]);
        let err = inserted_sub(&s, &p, &s, &Sub::identity(5), &Sub::identity(5)).unwrap_err();
        assert!(matches!(err, InsertionError::NotRedex(_)));
    }
}

//! Seeded generators for trees, branches and well-typed terms.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use catt_core::insertion::{canonical_branches, Branch};
use catt_core::pasting::Labelling;
use catt_core::unbiased::{identity_term, unbiased_coh, unbiased_type};
use catt_core::{tree_to_ctx, Checker, Ctx, Term, Tree, Type};
use catt_frontend::{Global, Session};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenConfig {
    /// Tree depth, i.e. dimension of generated pasting contexts.
    pub max_depth: usize,
    pub max_children: usize,
    /// Coherence nesting of generated terms.
    pub max_nesting: usize,
    /// Dimension of generated terms.
    pub max_dim: usize,
    pub max_nodes: Option<usize>,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_depth: 3, max_children: 3, max_nesting: 3, max_dim: 3, max_nodes: Some(7), seed: 0 }
    }
}

impl GenConfig {
    pub fn with_seed(&self, seed: u64) -> GenConfig {
        GenConfig { seed, ..self.clone() }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn is_valid(&self) -> bool {
        self.max_depth >= 1
            && self.max_children >= 1
            && self.max_nesting >= 1
            && self.max_dim >= 1
            && self.max_nodes.map_or(true, |n| n >= 1)
    }

    pub fn admits(&self, t: &Tree) -> bool {
        fn ok(t: &Tree, d: usize, cfg: &GenConfig) -> bool {
            (t.is_leaf() || d < cfg.max_depth)
                && t.children().len() <= cfg.max_children
                && t.children().iter().all(|c| ok(c, d + 1, cfg))
        }
        ok(t, 0, self) && self.max_nodes.map_or(true, |n| t.node_count() <= n)
    }
}

/// Every tree within the caps, in a fixed order.
pub fn shapes(cfg: &GenConfig) -> Vec<Tree> {
    fn go(depth: usize, width: usize) -> Vec<Tree> {
        if depth == 0 {
            return vec![Tree::leaf()];
        }
        let sub = go(depth - 1, width);
        let mut out = vec![Vec::new()];
        let mut all = vec![Tree::leaf()];
        for _ in 0..width {
            let mut next = Vec::new();
            for prefix in &out {
                for s in &sub {
                    let mut p: Vec<Tree> = prefix.clone();
                    p.push(s.clone());
                    next.push(p);
                }
            }
            all.extend(next.iter().cloned().map(Tree::new));
            out = next;
        }
        all
    }
    let mut all: Vec<Tree> = go(cfg.max_depth, cfg.max_children).into_iter().filter(|t| cfg.admits(t)).collect();
    all.sort();
    all.dedup();
    all
}

pub fn gen_tree(cfg: &GenConfig, rng: &mut impl Rng) -> Tree {
    fn go(cfg: &GenConfig, rng: &mut impl Rng, depth: usize, budget: &mut usize) -> Tree {
        let mut children = Vec::new();
        if depth < cfg.max_depth {
            let k = rng.gen_range(0..=cfg.max_children);
            for _ in 0..k {
                if *budget == 0 {
                    break;
                }
                *budget -= 1;
                children.push(go(cfg, rng, depth + 1, budget));
            }
        }
        Tree::new(children)
    }
    let mut budget = cfg.max_nodes.unwrap_or(usize::MAX).saturating_sub(1);
    go(cfg, rng, 0, &mut budget)
}

/// A maximal branch, uniformly.
pub fn gen_branch(tree: &Tree, rng: &mut impl Rng) -> Option<Branch> {
    canonical_branches(tree).choose(rng).cloned()
}

/// Builds well-typed terms over `⌊T⌋` bottom-up. Every emitted term has
/// been accepted by `infer_term`.
pub struct TermGen {
    pub cfg: GenConfig,
    rng: ChaCha8Rng,
    pub tree: Tree,
    pub ctx: Arc<Ctx>,
    pool: Vec<(Term, Type)>,
    heads: Vec<(Tree, Type)>,
    checker: Checker,
}

fn prelude_heads() -> Vec<(Tree, Type)> {
    Session::default()
        .env()
        .values()
        .filter_map(|g| match g {
            Global::Coh { tree, ty, .. } => Some((tree.clone(), ty.clone())),
            Global::Def { .. } => None,
        })
        .collect()
}

impl TermGen {
    pub fn new(cfg: &GenConfig) -> TermGen {
        let mut rng = cfg.rng();
        let tree = gen_tree(cfg, &mut rng);
        TermGen::over(cfg, tree, rng)
    }

    pub fn over(cfg: &GenConfig, tree: Tree, rng: ChaCha8Rng) -> TermGen {
        let ctx = tree_to_ctx(&tree);
        let pool = (0..ctx.len()).map(|i| (Term::Var(i), ctx.ty(i).clone())).collect();
        let heads = prelude_heads().into_iter().filter(|(_, ty)| ty.dim() <= cfg.max_dim).collect();
        TermGen { cfg: cfg.clone(), rng, tree, ctx, pool, heads, checker: Checker::default() }
    }

    pub fn pool(&self) -> &[(Term, Type)] {
        &self.pool
    }

    fn random_head(&mut self) -> (Tree, Type) {
        let r: f64 = self.rng.gen();
        if r < 0.25 && !self.heads.is_empty() {
            return self.heads.choose(&mut self.rng).unwrap().clone();
        }
        let cap = GenConfig {
            max_depth: self.cfg.max_dim.min(self.cfg.max_depth),
            max_nodes: Some(self.cfg.max_nodes.unwrap_or(6).min(6)),
            ..self.cfg.clone()
        };
        loop {
            let s = gen_tree(&cap, &mut self.rng);
            let d = s.dim();
            if r < 0.35 && d >= 1 && !s.is_linear() && d < self.cfg.max_dim {
                // An endo-coherence on the composite.
                let c = unbiased_coh(d, &s);
                let ty = Type::arr(c.clone(), unbiased_type(d, &s), c);
                return (s, ty);
            }
            let n = d + usize::from(self.rng.gen_bool(0.3));
            if n >= 1 && n <= self.cfg.max_dim {
                return (s.clone(), unbiased_type(n, &s));
            }
        }
    }

    /// A term of type `src →_B ?`, from the pool or an identity.
    fn arrow_from(&mut self, src: &Term, base: &Type) -> (Term, Term) {
        let limit = self.cfg.max_nesting;
        let candidates: Vec<usize> = (0..self.pool.len())
            .filter(|&i| {
                let (t, ty) = &self.pool[i];
                t.nesting() < limit
                    && ty.as_arrow().is_some_and(|a| &a.src == src && &a.base == base)
            })
            .collect();
        if candidates.is_empty() || self.rng.gen_bool(0.15) {
            return (identity_term(base, src), src.clone());
        }
        let i = *candidates.choose(&mut self.rng).unwrap();
        let (t, ty) = &self.pool[i];
        (t.clone(), ty.as_arrow().unwrap().tgt.clone())
    }

    fn fill(&mut self, shape: &Tree, base: &Type, first: Term) -> Labelling {
        let mut labels = vec![first.clone()];
        let mut children = Vec::new();
        let mut cur = first;
        for c in shape.children() {
            let (f, next) = self.arrow_from(&cur, base);
            let hom = Type::arr(cur.clone(), base.clone(), next.clone());
            children.push(self.fill(c, &hom, f));
            labels.push(next.clone());
            cur = next;
        }
        Labelling { labels, children }
    }

    /// A fresh coherence term; also added to the pool.
    pub fn term(&mut self) -> Term {
        for _ in 0..64 {
            let (s, ty) = self.random_head();
            let zeros: Vec<usize> = (0..self.ctx.len()).filter(|&i| self.ctx.ty(i).dim() == 0).collect();
            let x0 = Term::Var(*zeros.choose(&mut self.rng).unwrap());
            let sub = self.fill(&s, &Type::Star, x0).to_sub();
            let t = Term::coh(s, ty, sub);
            if t.nesting() > self.cfg.max_nesting {
                continue;
            }
            let ty = match self.checker.infer_term(&self.ctx, &t) {
                Ok(ty) => ty,
                Err(e) => panic!("generator emitted an ill-typed term (seed {}): {e}", self.cfg.seed),
            };
            self.pool.push((t.clone(), ty));
            return t;
        }
        let i = self.rng.gen_range(0..self.pool.len());
        self.pool[i].0.clone()
    }
}

/// `count` terms from consecutive seeds starting at `cfg.seed`, each with
/// its context.
pub fn population(cfg: &GenConfig, count: usize, per_ctx: usize) -> Vec<(Arc<Ctx>, Term, u64)> {
    let mut out = Vec::with_capacity(count);
    let mut seed = cfg.seed;
    while out.len() < count {
        let mut g = TermGen::new(&cfg.with_seed(seed));
        for _ in 0..per_ctx.min(count - out.len()) {
            let t = g.term();
            out.push((g.ctx.clone(), t, seed));
        }
        seed += 1;
    }
    out
}

pub fn gen_welltyped_term(cfg: &GenConfig) -> (Arc<Ctx>, Term) {
    let mut g = TermGen::new(cfg);
    let t = g.term();
    (g.ctx.clone(), t)
}

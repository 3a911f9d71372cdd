//! The metatheory battery: each check returns a [`Tally`] and never panics on
//! a counterexample.

use std::collections::BTreeMap;
use std::fmt;

use catt_core::complexity::{syntactic_complexity, OrdinalPoly};
use catt_core::insertion::{
    branches, exterior_sub, find_redexes, inserted_tree, interior_sub, Branch, InsertionRedex,
};
use catt_core::pasting::{locally_maximal, tree_inc_sub, Side};
use catt_core::rewrite::{
    normalize_outermost, one_step_term, Normalizer, Rule, RuleSet, DEFAULT_STEP_BUDGET,
};
use catt_core::print::Printer;
use catt_core::suspend::suspend_term;
use catt_core::unbiased::{unbiased_coh, unbiased_type};
use catt_core::{ctx_to_tree, tree_to_ctx, Checker, Ctx, Sub, Term, Tree, Type};
use rand::Rng;

use crate::gen::{gen_tree, GenConfig, TermGen};
use crate::graph::reduction_graph;
use crate::oracle::{boundary_oracle, eq_max_syntactic, maximal_oracle, pasting_oracle};

pub const GRAPH_BUDGET: usize = 10_000;

#[derive(Clone, Debug)]
pub struct Failure {
    pub property: &'static str,
    pub seed: u64,
    pub config: Option<GenConfig>,
    pub detail: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} failed (seed {})", self.property, self.seed)?;
        if let Some(c) = &self.config {
            write!(
                f,
                " [minimized: depth {} children {} nodes {:?} nesting {} dim {}]",
                c.max_depth, c.max_children, c.max_nodes, c.max_nesting, c.max_dim
            )?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Tally {
    pub instances: usize,
    pub checks: usize,
    pub failures: Vec<Failure>,
    pub rule_counts: BTreeMap<&'static str, usize>,
    pub cell_steps: usize,
    /// Cell steps that lower `sc` by turning a coherence into an identity.
    pub cell_drops: Vec<String>,
    pub max_sc: OrdinalPoly,
    pub max_graph: usize,
    pub over_budget: usize,
}

impl Tally {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, property: &'static str, seed: u64, detail: String) {
        self.failures.push(Failure { property, seed, config: None, detail });
    }

    fn check(&mut self, cond: bool, property: &'static str, seed: u64, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !cond {
            self.fail(property, seed, detail());
        }
    }
}

fn rule_tag(r: &Rule) -> &'static str {
    match r {
        Rule::DiscRemoval => "dr",
        Rule::EndoCoherenceRemoval => "ecr",
        Rule::Insertion { .. } => "ins",
    }
}

/// Greedily lowers tree size, then nesting, while `fails` keeps holding.
pub fn shrink(cfg: &GenConfig, fails: impl Fn(&GenConfig) -> bool) -> GenConfig {
    let mut best = cfg.clone();
    loop {
        let b = &best;
        let nodes = b.max_nodes.unwrap_or(16);
        let candidates = [
            GenConfig { max_nodes: Some(nodes.saturating_sub(1)), ..b.clone() },
            GenConfig { max_children: b.max_children.saturating_sub(1), ..b.clone() },
            GenConfig { max_depth: b.max_depth.saturating_sub(1), ..b.clone() },
            GenConfig { max_nesting: b.max_nesting.saturating_sub(1), ..b.clone() },
            GenConfig { max_dim: b.max_dim.saturating_sub(1), ..b.clone() },
        ];
        match candidates.into_iter().find(|c| c.is_valid() && c != b && fails(c)) {
            Some(c) => best = c,
            None => return best,
        }
    }
}

/// A property of one generated term in its context.
pub type TermProperty = fn(&mut Session, &Ctx, &Term, u64, &mut Tally);

pub struct Session {
    pub checker: Checker,
    pub norm: Normalizer,
}

impl Default for Session {
    fn default() -> Self {
        Session { checker: Checker::default(), norm: Normalizer::default() }
    }
}

/// Runs `prop` over `count` generated terms, `per_ctx` per seed. Failing
/// seeds are re-run under shrunk configurations.
pub fn run_population(cfg: &GenConfig, count: usize, per_ctx: usize, prop: TermProperty) -> Tally {
    let mut tally = Tally::default();
    let mut s = Session::default();
    let mut seed = cfg.seed;
    while tally.instances < count {
        let c = cfg.with_seed(seed);
        let mut g = TermGen::new(&c);
        let before = tally.failures.len();
        for _ in 0..per_ctx.min(count - tally.instances) {
            let t = g.term();
            prop(&mut s, &g.ctx, &t, seed, &mut tally);
            tally.instances += 1;
        }
        if tally.failures.len() > before {
            let fails = |c: &GenConfig| {
                let mut g = TermGen::new(c);
                let mut t2 = Tally::default();
                let mut s2 = Session::default();
                for _ in 0..per_ctx {
                    let t = g.term();
                    prop(&mut s2, &g.ctx, &t, c.seed, &mut t2);
                }
                !t2.ok()
            };
            let small = shrink(&c, fails);
            for f in &mut tally.failures[before..] {
                f.config = Some(small.clone());
            }
        }
        seed += 1;
    }
    tally
}

/// Every non-Cell edge of the reduction graph lowers `sc` and no Cell edge
/// raises it; the term normalizes within the default budget.
pub fn termination_measure(_s: &mut Session, ctx: &Ctx, t: &Term, seed: u64, tally: &mut Tally) {
    let sc = syntactic_complexity(t);
    if sc > tally.max_sc {
        tally.max_sc = sc;
    }
    let budget = Normalizer::new(RuleSet::sua(), DEFAULT_STEP_BUDGET).term(t).is_ok();
    tally.check(budget, "step budget", seed, || format!("{t:?}"));
    let g = match reduction_graph(t, RuleSet::sua(), GRAPH_BUDGET) {
        Ok(g) => g,
        Err(_) => {
            tally.over_budget += 1;
            let reducts = one_step_term(t, RuleSet::sua());
            for r in reducts {
                audit_edge(tally, ctx, &r.step.rule, r.step.via_cell(), t, &r.result, seed);
            }
            return;
        }
    };
    tally.max_graph = tally.max_graph.max(g.nodes.len());
    for e in &g.edges {
        audit_edge(tally, ctx, &e.rule, e.via_cell, &g.nodes[e.from], &g.nodes[e.to], seed);
    }
}

fn audit_edge(tally: &mut Tally, ctx: &Ctx, rule: &Rule, via_cell: bool, a: &Term, b: &Term, seed: u64) {
    let (sa, sb) = (syntactic_complexity(a), syntactic_complexity(b));
    let show = || {
        let (p, names) = (Printer::canonical(), ctx.names());
        format!("{sa} to {sb} by {rule}: {} ==> {}", p.term(a, &names), p.term(b, &names))
    };
    if via_cell {
        tally.cell_steps += 1;
        tally.check(sb <= sa, "sc never raised by cell steps", seed, show);
        if sb < sa {
            tally.cell_drops.push(format!("seed {seed}: {}", show()));
        }
    } else {
        *tally.rule_counts.entry(rule_tag(rule)).or_default() += 1;
        tally.check(sb < sa, "sc decreases", seed, show);
    }
}

/// Every pair of one-step reducts rejoins; the reduction graph has a single
/// sink, equal to the normal form.
pub fn confluence(s: &mut Session, _ctx: &Ctx, t: &Term, seed: u64, tally: &mut Tally) {
    let Ok(nf) = s.norm.term(t) else {
        tally.fail("normalization", seed, format!("{t:?}"));
        return;
    };
    for r in one_step_term(t, RuleSet::sua()) {
        let joined = s.norm.term(&r.result).ok();
        tally.check(joined.as_ref() == Some(&nf), "local confluence", seed, || {
            format!("reduct by {} at {:?} does not rejoin", r.step.rule, r.step.path)
        });
    }
    match reduction_graph(t, RuleSet::sua(), GRAPH_BUDGET) {
        Ok(g) => {
            tally.max_graph = tally.max_graph.max(g.nodes.len());
            let sinks = g.sinks();
            tally.check(sinks.len() == 1, "unique sink", seed, || format!("{} sinks", sinks.len()));
            tally.check(sinks.first().map(|&i| &g.nodes[i]) == Some(&nf), "sink is the normal form", seed, || {
                "normalizer disagrees with the graph".into()
            });
        }
        Err(_) => tally.over_budget += 1,
    }
}

/// Reducts keep their type up to conversion and their support exactly.
pub fn subject_reduction(s: &mut Session, ctx: &Ctx, t: &Term, seed: u64, tally: &mut Tally) {
    let Ok(a) = s.checker.infer_term(ctx, t) else {
        tally.fail("generated term types", seed, format!("{t:?}"));
        return;
    };
    let supp = t.support(ctx);
    for r in one_step_term(t, RuleSet::sua()) {
        let typed = match s.checker.infer_term(ctx, &r.result) {
            Ok(b) => s.checker.def_eq_type(&a, &b).unwrap_or(false),
            Err(_) => false,
        };
        tally.check(typed, "subject reduction", seed, || format!("{} at {:?}", r.step.rule, r.step.path));
        tally.check(r.result.support(ctx) == supp, "support preservation", seed, || {
            format!("{} at {:?}", r.step.rule, r.step.path)
        });
    }
}

/// Innermost and outermost strategies reach the same normal form.
pub fn strategy_independence(s: &mut Session, _ctx: &Ctx, t: &Term, seed: u64, tally: &mut Tally) {
    let inner = s.norm.term(t).ok();
    let outer = normalize_outermost(t, RuleSet::sua(), DEFAULT_STEP_BUDGET).ok();
    tally.check(inner.is_some() && inner == outer, "strategy independence", seed, || format!("{t:?}"));
}

/// Insertion redexes anywhere inside `t`.
pub fn redexes_within(t: &Term, out: &mut Vec<InsertionRedex>) {
    let Term::Coh(c) = t else { return };
    out.extend(find_redexes(t));
    for a in c.args.iter() {
        redexes_within(a, out);
    }
    if let Type::Arr(arr) = &c.ty {
        redexes_within(&arr.src, out);
        redexes_within(&arr.tgt, out);
    }
}

/// `ι ∘ (σ≪τ) ≡ τ` and `κ ∘ (σ≪τ) ≡ᵐᵃˣ σ` on redexes found in generated terms.
pub fn pushout_laws_random(cfg: &GenConfig, min_redexes: usize) -> Tally {
    let mut tally = Tally::default();
    let mut seed = cfg.seed;
    while tally.instances < min_redexes {
        let mut g = TermGen::new(&cfg.with_seed(seed));
        for _ in 0..12 {
            let t = g.term();
            let mut rs = Vec::new();
            redexes_within(&t, &mut rs);
            for r in rs {
                tally.instances += 1;
                let ins = r.inserted();
                let (kappa, iota) = (r.kappa(), r.iota());
                tally.check(iota.subst(&ins) == r.tau, "interior law", seed, || format!("{r:?}"));
                let outer = tree_to_ctx(&r.outer);
                tally.check(eq_max_syntactic(&kappa.subst(&ins), &r.sigma, &outer), "exterior law", seed, || {
                    format!("{r:?}")
                });
            }
        }
        seed += 1;
    }
    tally
}

/// All insertion points `(S, P, T)` with both trees of at most `max_nodes`
/// nodes and `lh(P) ≥ dim T`.
pub fn insertion_points(max_nodes: usize) -> Vec<(Tree, Branch, Tree)> {
    let trees = Tree::enumerate(max_nodes);
    let mut out = Vec::new();
    for s in &trees {
        for p in branches(s) {
            for t in &trees {
                if t.trunk_height() >= p.bh() && p.lh(s) >= t.dim() {
                    out.push((s.clone(), p.clone(), t.clone()));
                }
            }
        }
    }
    out
}

/// On the generic redex `(κ, ι)`, `σ≪τ` satisfies both laws and every
/// single-variable perturbation breaks one of them up to conversion.
pub fn pushout_uniqueness(max_nodes: usize) -> Tally {
    let mut tally = Tally::default();
    let mut norm = Normalizer::default();
    for (s, p, t) in insertion_points(max_nodes) {
        tally.instances += 1;
        let st = inserted_tree(&s, &p, &t).expect("insertion point");
        let kappa = exterior_sub(&s, &p, &t).expect("insertion point");
        let iota = interior_sub(&s, &p, &t).expect("insertion point");
        let ctx = tree_to_ctx(&st);
        let ins = Sub::identity(ctx.len());
        let laws = |mu: &Sub, norm: &mut Normalizer| -> bool {
            iota.subst(mu) == iota
                && kappa.subst(mu).iter().zip(kappa.iter()).all(|(a, b)| {
                    a == b || matches!((norm.term(a), norm.term(b)), (Ok(x), Ok(y)) if x == y)
                })
        };
        let label = || format!("S={s} P={:?} T={t}", p.path());
        tally.check(laws(&ins, &mut norm), "pushout laws", 0, label);
        let covered = (0..ctx.len()).all(|v| iota.iter().chain(kappa.iter()).any(|e| e == &Term::Var(v)));
        tally.check(covered, "pushout joint cover", 0, label);
        let dims: Vec<usize> = (0..ctx.len()).map(|i| ctx.ty(i).dim()).collect();
        for v in 0..ctx.len() {
            for w in (0..ctx.len()).filter(|&w| w != v && dims[w] == dims[v]) {
                let mu = ins.with(v, Term::Var(w));
                tally.check(!laws(&mu, &mut norm), "pushout uniqueness", 0, || {
                    format!("{} with x{v} := x{w}", label())
                });
            }
        }
    }
    tally
}

/// `𝒰ⁿ_S⟦κ⟧` and `𝒰ⁿ_{S≪T}` share a normal form for
/// `dim T ≤ n ≤ dim S + extra`, and so do the coherences over them.
pub fn unbiased_insert(max_nodes: usize, extra: usize) -> Tally {
    let mut tally = Tally::default();
    let mut norm = Normalizer::default();
    for (s, p, t) in insertion_points(max_nodes) {
        let st = inserted_tree(&s, &p, &t).expect("insertion point");
        let kappa = exterior_sub(&s, &p, &t).expect("insertion point");
        let id = Sub::identity(st.var_count());
        for n in t.dim().max(1)..=s.dim() + extra {
            tally.instances += 1;
            let label = || format!("S={s} P={:?} T={t} n={n}", p.path());
            let inserted = unbiased_type(n, &s).subst(&kappa);
            let direct = unbiased_type(n, &st);
            let types = matches!((norm.ty(&inserted), norm.ty(&direct)), (Ok(a), Ok(b)) if a == b);
            tally.check(types, "unbiased insert", 0, label);
            let lhs = Term::coh(st.clone(), inserted, id.clone());
            let rhs = unbiased_coh(n, &st);
            let terms = matches!((norm.term(&lhs), norm.term(&rhs)), (Ok(a), Ok(b)) if a == b);
            tally.check(terms, "unbiased insert on coherences", 0, label);
        }
    }
    tally
}

/// Inserting any unbiased coherence, not just composites and identities,
/// is sound: `Coh S 𝒰ⁿ_S κ = Coh (S≪T) 𝒰ⁿ_S⟦κ⟧ id`.
pub fn all_inserts(max_nodes: usize) -> Tally {
    let mut tally = Tally::default();
    let mut checker = Checker::default();
    for (s, p, t) in insertion_points(max_nodes) {
        let st = inserted_tree(&s, &p, &t).expect("insertion point");
        let kappa = exterior_sub(&s, &p, &t).expect("insertion point");
        let ctx = tree_to_ctx(&st);
        for n in s.dim().max(1)..=s.dim() + 1 {
            tally.instances += 1;
            let a = unbiased_type(n, &s);
            let lhs = Term::coh(s.clone(), a.clone(), kappa.clone());
            let rhs = Term::coh(st.clone(), a.subst(&kappa), Sub::identity(ctx.len()));
            let label = || format!("S={s} P={:?} T={t} n={n}", p.path());
            let typed = checker.infer_term(&ctx, &lhs).is_ok();
            tally.check(typed, "all-inserts typing", 0, label);
            tally.check(checker.def_eq(&lhs, &rhs).unwrap_or(false), "all-inserts", 0, label);
        }
    }
    tally
}

fn iso_checks(tree: &Tree, seed: u64, tally: &mut Tally) {
    tally.instances += 1;
    let ctx = tree_to_ctx(tree);
    tally.check(ctx_to_tree(&ctx).as_ref() == Ok(tree), "tree roundtrip", seed, || tree.to_string());
    tally.check(pasting_oracle(&ctx), "pasting oracle", seed, || tree.to_string());
    tally.check(maximal_oracle(&ctx) == locally_maximal(tree), "maximal oracle", seed, || tree.to_string());
    for n in 0..=tree.dim() {
        for (side, src) in [(Side::Src, true), (Side::Tgt, false)] {
            let got: Vec<usize> = tree_inc_sub(side, n, tree).support(&ctx).iter().collect();
            let want: Vec<usize> = boundary_oracle(&ctx, n, src).into_iter().collect();
            tally.check(got == want, "boundary oracle", seed, || format!("{tree} n={n} {side:?}"));
        }
    }
}

/// Mutations of a pasting context; the oracle and the parser must agree.
fn mutants(ctx: &Ctx, rng: &mut impl Rng) -> Vec<Ctx> {
    let e = ctx.entries();
    let mut out = Vec::new();
    if e.len() >= 3 {
        out.push(Ctx::from_entries(e[..e.len() - 2].to_vec()));
        out.push(Ctx::from_entries(e[..e.len() - 1].to_vec()));
        let i = rng.gen_range(1..e.len());
        let j = rng.gen_range(1..e.len());
        let mut swapped = e.to_vec();
        let ti = swapped[i].ty.clone();
        swapped[i].ty = swapped[j].ty.clone();
        swapped[j].ty = ti;
        out.push(Ctx::from_entries(swapped));
        let mut retyped = e.to_vec();
        let k = rng.gen_range(0..e.len());
        retyped[k].ty = if k > 0 && rng.gen_bool(0.5) { ctx.ty(k - 1).clone() } else { Type::Star };
        out.push(Ctx::from_entries(retyped));
    }
    let mut extra = ctx.clone();
    extra.push("z", Type::Star);
    out.push(extra);
    out
}

/// Exhaustive agreement on trees up to `max_nodes`, then `random` larger
/// trees, then mutated contexts.
pub fn tree_iso(max_nodes: usize, random: usize, seed: u64) -> Tally {
    let mut tally = Tally::default();
    for t in Tree::enumerate(max_nodes) {
        iso_checks(&t, 0, &mut tally);
    }
    let cfg = GenConfig { max_depth: 6, max_children: 4, max_nodes: Some(40), seed, ..GenConfig::default() };
    let mut rng = cfg.rng();
    let mut done = 0;
    while done < random {
        let t = gen_tree(&cfg, &mut rng);
        if t.node_count() <= max_nodes {
            continue;
        }
        iso_checks(&t, seed, &mut tally);
        for m in mutants(&tree_to_ctx(&t), &mut rng) {
            tally.check(pasting_oracle(&m) == ctx_to_tree(&m).is_ok(), "oracle agreement on mutants", seed, || {
                format!("{m:?}")
            });
        }
        done += 1;
    }
    tally
}

/// `ΣDⁿ ≡ Dⁿ⁺¹` and `Σ𝒞ⁿ_T ≡ 𝒞ⁿ⁺¹_{ΣT}` for every tree up to `max_nodes`.
pub fn suspension_laws(max_nodes: usize) -> Tally {
    let mut tally = Tally::default();
    for n in 0..=max_nodes {
        tally.instances += 1;
        let d = Tree::disc(n);
        tally.check(d.suspend() == Tree::disc(n + 1), "disc suspension", 0, || n.to_string());
        let sc = catt_core::suspend::suspend_ctx(&tree_to_ctx(&d));
        let dc = tree_to_ctx(&Tree::disc(n + 1));
        let same = sc.entries().iter().zip(dc.entries()).all(|(a, b)| a.ty == b.ty) && sc.len() == dc.len();
        tally.check(same, "disc context suspension", 0, || n.to_string());
    }
    for t in Tree::enumerate(max_nodes) {
        for n in 0..=t.dim() + 1 {
            tally.instances += 1;
            tally.check(
                suspend_term(&unbiased_coh(n, &t)) == unbiased_coh(n + 1, &t.suspend()),
                "unbiased suspension",
                0,
                || format!("{t} n={n}"),
            );
        }
    }
    tally
}

#[cfg(test)]
mod tests {
    use super::*;
    use catt_core::unbiased::{identity_term, is_identity};

    #[test]
    fn shrink_finds_the_smallest_failing_size() {
        let cfg = GenConfig { max_nodes: Some(12), max_depth: 4, max_children: 3, ..GenConfig::default() };
        let fails = |c: &GenConfig| (0..20).any(|k| gen_tree(c, &mut c.with_seed(k).rng()).node_count() >= 3);
        let small = shrink(&cfg, fails);
        assert_eq!(small.max_nodes, Some(3));
        assert!(fails(&small));
    }

    #[test]
    fn a_cell_step_can_create_an_identity() {
        let d1 = tree_to_ctx(&Tree::disc(1));
        let ty = Type::arr(unbiased_coh(1, &Tree::disc(1)), d1.ty(2).clone(), Term::Var(2));
        let x = Term::Var(0);
        let t = Term::coh(Tree::disc(1), ty, Sub::new(vec![x.clone(), x.clone(), identity_term(&Type::Star, &x)]));
        let mut ctx = Ctx::new();
        ctx.push("x", Type::Star);
        Checker::default().infer_term(&ctx, &t).unwrap();
        let steps = one_step_term(&t, RuleSet::sua());
        let cell = steps.iter().find(|r| r.step.via_cell()).unwrap();
        assert!(is_identity(&cell.result));
        assert!(syntactic_complexity(&cell.result) < syntactic_complexity(&t));
    }

    #[test]
    fn small_batteries_pass() {
        let cfg = GenConfig { seed: 99, ..GenConfig::default() };
        for prop in [termination_measure, confluence, subject_reduction, strategy_independence] {
            let t = run_population(&cfg, 20, 10, prop);
            assert!(t.ok(), "{}", t.failures[0]);
        }
        assert!(suspension_laws(4).ok());
        assert!(tree_iso(5, 20, 1).ok());
    }
}

//! The reduction rules, the congruence-closed one-step relation and the
//! normalizer.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::insertion::find_redexes;
use crate::syntax::{Sub, Term, Type};
use crate::tree::Tree;
use crate::unbiased::{identity_term, is_identity, is_unbiased_coh};

pub const DEFAULT_STEP_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RuleSet {
    pub disc_removal: bool,
    pub endo_coherence_removal: bool,
    pub insertion: bool,
}

impl RuleSet {
    pub fn sua() -> RuleSet {
        RuleSet { disc_removal: true, endo_coherence_removal: true, insertion: true }
    }

    pub fn is_sua(&self) -> bool {
        *self == RuleSet::sua()
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::sua()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PathElem {
    Arg(usize),
    Cell,
    Src,
    Base,
    Tgt,
}

impl fmt::Display for PathElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathElem::Arg(i) => write!(f, "arg{i}"),
            PathElem::Cell => write!(f, "cell"),
            PathElem::Src => write!(f, "src"),
            PathElem::Base => write!(f, "base"),
            PathElem::Tgt => write!(f, "tgt"),
        }
    }
}

pub fn render_path(path: &[PathElem]) -> String {
    if path.is_empty() {
        return "/".to_string();
    }
    path.iter().map(|p| format!("/{p}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    DiscRemoval,
    EndoCoherenceRemoval,
    Insertion { outer: Tree, branch: Vec<usize>, inner: Tree, result: Tree },
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::DiscRemoval => write!(f, "dr"),
            Rule::EndoCoherenceRemoval => write!(f, "ecr"),
            Rule::Insertion { outer, branch, inner, result } => {
                write!(f, "ins(S={outer} P={branch:?} T={inner} -> {result})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: Rule,
    pub path: Vec<PathElem>,
    /// Head tree of the innermost enclosing coherence type, if the step
    /// happens inside one; `None` means the ambient context.
    pub scope: Option<Tree>,
    pub before: Term,
    pub after: Term,
}

impl ReductionStep {
    pub fn via_cell(&self) -> bool {
        self.path.contains(&PathElem::Cell)
    }
}

#[derive(Clone, Debug)]
pub struct Reduct<T> {
    pub step: ReductionStep,
    pub result: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("step budget of {budget} exceeded")]
    StepBudgetExceeded { budget: usize },
}

/// `Coh Dⁿ 𝒰ⁿ {A, s} ↝ s` for `n ≥ 1`.
pub fn disc_removal(t: &Term) -> Option<Term> {
    let m = is_unbiased_coh(t)?;
    (m.n >= 1 && m.tree.is_linear() && m.n == m.tree.dim()).then(|| m.args[m.args.len() - 1].clone())
}

/// `Coh Δ (s →_A s) σ ↝ 𝟙⟦{A⟦σ⟧, s⟦σ⟧}⟧` unless already an identity.
pub fn endo_coherence_removal(t: &Term) -> Option<Term> {
    let c = t.as_coh()?;
    let a = c.ty.as_arrow()?;
    if a.src != a.tgt || is_identity(t) {
        return None;
    }
    Some(identity_term(&a.base.subst(&c.args), &a.src.subst(&c.args)))
}

/// Reduces along the first insertion redex.
pub fn insertion_step(t: &Term) -> Option<Term> {
    let r = find_redexes(t).into_iter().next()?;
    Some(r.reduct(&t.as_coh()?.ty))
}

fn head_reducts(t: &Term, rules: RuleSet, all: bool) -> Vec<(Rule, Term)> {
    let mut out = Vec::new();
    if rules.disc_removal {
        if let Some(r) = disc_removal(t) {
            out.push((Rule::DiscRemoval, r));
            if !all {
                return out;
            }
        }
    }
    if rules.endo_coherence_removal {
        if let Some(r) = endo_coherence_removal(t) {
            out.push((Rule::EndoCoherenceRemoval, r));
            if !all {
                return out;
            }
        }
    }
    if rules.insertion {
        let ty = match t.as_coh() {
            Some(c) => &c.ty,
            None => return out,
        };
        for r in find_redexes(t) {
            let rule = Rule::Insertion {
                outer: r.outer.clone(),
                branch: r.branch.path().to_vec(),
                inner: r.inner.clone(),
                result: r.result_tree(),
            };
            out.push((rule, r.reduct(ty)));
            if !all {
                return out;
            }
        }
    }
    out
}

fn prefixed<T>(mut r: Reduct<T>, elem: PathElem, cell_tree: Option<&Tree>) -> ReductionStep {
    r.step.path.insert(0, elem);
    if r.step.scope.is_none() {
        r.step.scope = cell_tree.cloned();
    }
    r.step
}

/// Every single-step reduct, head steps first, then steps inside the type,
/// then steps inside the arguments.
pub fn one_step_term(t: &Term, rules: RuleSet) -> Vec<Reduct<Term>> {
    let Term::Coh(c) = t else { return Vec::new() };
    let mut out: Vec<Reduct<Term>> = head_reducts(t, rules, true)
        .into_iter()
        .map(|(rule, after)| Reduct {
            step: ReductionStep {
                rule,
                path: Vec::new(),
                scope: None,
                before: t.clone(),
                after: after.clone(),
            },
            result: after,
        })
        .collect();
    for r in one_step_type(&c.ty, rules) {
        let result = Term::coh(c.tree.clone(), r.result.clone(), c.args.clone());
        out.push(Reduct { step: prefixed(r, PathElem::Cell, Some(&c.tree)), result });
    }
    for r in one_step_sub(&c.args, rules) {
        let result = Term::coh(c.tree.clone(), c.ty.clone(), r.result.clone());
        // Sub steps are already prefixed with their entry index.
        out.push(Reduct { step: r.step, result });
    }
    out
}

pub fn one_step_type(a: &Type, rules: RuleSet) -> Vec<Reduct<Type>> {
    let Type::Arr(arr) = a else { return Vec::new() };
    let mut out = Vec::new();
    for r in one_step_term(&arr.src, rules) {
        let result = Type::arr(r.result.clone(), arr.base.clone(), arr.tgt.clone());
        out.push(Reduct { step: prefixed(r, PathElem::Src, None), result });
    }
    for r in one_step_type(&arr.base, rules) {
        let result = Type::arr(arr.src.clone(), r.result.clone(), arr.tgt.clone());
        out.push(Reduct { step: prefixed(r, PathElem::Base, None), result });
    }
    for r in one_step_term(&arr.tgt, rules) {
        let result = Type::arr(arr.src.clone(), arr.base.clone(), r.result.clone());
        out.push(Reduct { step: prefixed(r, PathElem::Tgt, None), result });
    }
    out
}

pub fn one_step_sub(s: &Sub, rules: RuleSet) -> Vec<Reduct<Sub>> {
    let mut out = Vec::new();
    for (i, t) in s.iter().enumerate() {
        for r in one_step_term(t, rules) {
            let result = s.with(i, r.result.clone());
            out.push(Reduct { step: prefixed(r, PathElem::Arg(i), None), result });
        }
    }
    out
}

/// Innermost-first normalizer with rule priority dr > ecr > ins.
#[derive(Debug)]
pub struct Normalizer {
    rules: RuleSet,
    budget: usize,
    steps: usize,
    trace: Option<Vec<ReductionStep>>,
    cache: HashMap<Term, Term>,
}

impl Default for Normalizer {
    fn default() -> Self {
        Normalizer::new(RuleSet::sua(), DEFAULT_STEP_BUDGET)
    }
}

impl Normalizer {
    pub fn new(rules: RuleSet, budget: usize) -> Normalizer {
        Normalizer { rules, budget, steps: 0, trace: None, cache: HashMap::new() }
    }

    /// Records every step; disables the result cache so traces are complete.
    pub fn with_trace(mut self) -> Normalizer {
        self.trace = Some(Vec::new());
        self
    }

    pub fn rules(&self) -> RuleSet {
        self.rules
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn take_trace(&mut self) -> Vec<ReductionStep> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn term(&mut self, t: &Term) -> Result<Term, NormalizeError> {
        self.steps = 0;
        self.norm_term(t, &mut Vec::new(), None)
    }

    pub fn ty(&mut self, a: &Type) -> Result<Type, NormalizeError> {
        self.steps = 0;
        self.norm_type(a, &mut Vec::new(), None)
    }

    pub fn sub(&mut self, s: &Sub) -> Result<Sub, NormalizeError> {
        self.steps = 0;
        self.norm_sub(s, &mut Vec::new(), None)
    }

    fn norm_sub(
        &mut self,
        s: &Sub,
        path: &mut Vec<PathElem>,
        scope: Option<&Tree>,
    ) -> Result<Sub, NormalizeError> {
        let mut out = Vec::with_capacity(s.len());
        for (i, t) in s.iter().enumerate() {
            path.push(PathElem::Arg(i));
            out.push(self.norm_term(t, path, scope)?);
            path.pop();
        }
        Ok(Sub::new(out))
    }

    fn norm_type(
        &mut self,
        a: &Type,
        path: &mut Vec<PathElem>,
        scope: Option<&Tree>,
    ) -> Result<Type, NormalizeError> {
        let Type::Arr(arr) = a else { return Ok(Type::Star) };
        path.push(PathElem::Src);
        let src = self.norm_term(&arr.src, path, scope)?;
        path.pop();
        path.push(PathElem::Base);
        let base = self.norm_type(&arr.base, path, scope)?;
        path.pop();
        path.push(PathElem::Tgt);
        let tgt = self.norm_term(&arr.tgt, path, scope)?;
        path.pop();
        Ok(Type::arr(src, base, tgt))
    }

    fn norm_term(
        &mut self,
        t: &Term,
        path: &mut Vec<PathElem>,
        scope: Option<&Tree>,
    ) -> Result<Term, NormalizeError> {
        if t.as_var().is_some() {
            return Ok(t.clone());
        }
        let caching = self.trace.is_none();
        if caching {
            if let Some(n) = self.cache.get(t) {
                return Ok(n.clone());
            }
        }
        let mut cur = t.clone();
        loop {
            let Term::Coh(c) = &cur else { break };
            let args = self.norm_sub(&c.args, path, scope)?;
            path.push(PathElem::Cell);
            let ty = self.norm_type(&c.ty, path, Some(&c.tree))?;
            path.pop();
            let inner = Term::coh(c.tree.clone(), ty, args);
            match head_reducts(&inner, self.rules, false).into_iter().next() {
                None => {
                    cur = inner;
                    break;
                }
                Some((rule, next)) => {
                    self.steps += 1;
                    if self.steps > self.budget {
                        return Err(NormalizeError::StepBudgetExceeded { budget: self.budget });
                    }
                    if let Some(trace) = self.trace.as_mut() {
                        trace.push(ReductionStep {
                            rule,
                            path: path.clone(),
                            scope: scope.cloned(),
                            before: inner,
                            after: next.clone(),
                        });
                    }
                    cur = next;
                }
            }
        }
        if caching {
            self.cache.insert(t.clone(), cur.clone());
        }
        Ok(cur)
    }
}

pub fn normalize(t: &Term) -> Result<Term, NormalizeError> {
    Normalizer::default().term(t)
}

pub fn normalize_type(a: &Type) -> Result<Type, NormalizeError> {
    Normalizer::default().ty(a)
}

pub fn normalize_sub(s: &Sub) -> Result<Sub, NormalizeError> {
    Normalizer::default().sub(s)
}

/// Repeatedly takes the first reduct offered by [`one_step_term`].
pub fn normalize_outermost(t: &Term, rules: RuleSet, budget: usize) -> Result<Term, NormalizeError> {
    let mut cur = t.clone();
    for _ in 0..=budget {
        match one_step_term(&cur, rules).into_iter().next() {
            None => return Ok(cur),
            Some(r) => cur = r.result,
        }
    }
    Err(NormalizeError::StepBudgetExceeded { budget })
}

pub fn def_eq(a: &Term, b: &Term) -> Result<bool, NormalizeError> {
    let mut n = Normalizer::default();
    Ok(n.term(a)? == n.term(b)?)
}

pub fn def_eq_type(a: &Type, b: &Type) -> Result<bool, NormalizeError> {
    let mut n = Normalizer::default();
    Ok(n.ty(a)? == n.ty(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unbiased::unbiased_coh;

    fn t(s: &str) -> Tree {
        s.parse().unwrap()
    }

    fn comp(args: [Term; 5]) -> Term {
        unbiased_coh(1, &t("[[],[]]")).subst(&Sub::new(args.to_vec()))
    }

    fn v(i: usize) -> Term {
        Term::Var(i)
    }

    #[test]
    fn disc_removal_on_unary_composite() {
        let unary = unbiased_coh(1, &Tree::disc(1)).subst(&Sub::new(vec![v(0), v(1), v(2)]));
        assert_eq!(disc_removal(&unary), Some(v(2)));
        assert_eq!(disc_removal(&comp([v(0), v(1), v(2), v(3), v(4)])), None);
        let twice = unbiased_coh(1, &Tree::disc(1)).subst(&Sub::new(vec![v(0), v(1), unary]));
        assert_eq!(normalize(&twice).unwrap(), v(2));
    }

    #[test]
    fn endo_coherence_on_arrow() {
        // Over the 1-disc, f → f is the identity itself and is left alone.
        let d1 = Tree::disc(1);
        let a = Type::arr(v(0), Type::Star, v(1));
        let on_disc = Term::coh(d1, Type::arr(v(2), a.clone(), v(2)), Sub::identity(3));
        assert_eq!(on_disc, identity_term(&a, &v(2)));
        assert_eq!(endo_coherence_removal(&on_disc), None);

        let two = t("[[],[]]");
        let fg = unbiased_coh(1, &two);
        let xz = Type::arr(v(0), Type::Star, v(3));
        let endo = Term::coh(two, Type::arr(fg.clone(), xz.clone(), fg.clone()), Sub::identity(5));
        assert_eq!(endo_coherence_removal(&endo), Some(identity_term(&xz, &fg)));
        assert_eq!(endo_coherence_removal(&identity_term(&Type::Star, &v(0))), None);
    }

    #[test]
    fn associativity_is_strict() {
        // x y f z g w h
        let left = comp([v(0), v(3), comp([v(0), v(1), v(2), v(3), v(4)]), v(5), v(6)]);
        let right = comp([v(0), v(1), v(2), v(5), comp([v(1), v(3), v(4), v(5), v(6)])]);
        let ternary = unbiased_coh(1, &t("[[],[],[]]"));
        assert_eq!(normalize(&left).unwrap(), ternary);
        assert_eq!(normalize(&right).unwrap(), ternary);
        assert!(def_eq(&left, &right).unwrap());
    }

    #[test]
    fn unit_law_is_strict() {
        let id_y = identity_term(&Type::Star, &v(1));
        let fid = comp([v(0), v(1), v(2), v(1), id_y]);
        assert_eq!(normalize(&fid).unwrap(), v(2));
        assert!(def_eq(&fid, &v(2)).unwrap());
    }

    #[test]
    fn one_step_reports_head_and_argument_steps() {
        let inner = comp([v(1), v(3), v(4), v(5), v(6)]);
        let term = comp([v(0), v(1), v(2), v(5), inner]);
        let steps = one_step_term(&term, RuleSet::sua());
        assert!(steps.iter().any(|r| matches!(r.step.rule, Rule::Insertion { .. }) && r.step.path.is_empty()));
        assert!(one_step_term(&v(0), RuleSet::sua()).is_empty());
    }

    #[test]
    fn outermost_agrees_with_innermost() {
        let left = comp([v(0), v(3), comp([v(0), v(1), v(2), v(3), v(4)]), v(5), v(6)]);
        assert_eq!(
            normalize_outermost(&left, RuleSet::sua(), 1000).unwrap(),
            normalize(&left).unwrap()
        );
    }

    #[test]
    fn budget_trips() {
        let left = comp([v(0), v(3), comp([v(0), v(1), v(2), v(3), v(4)]), v(5), v(6)]);
        let err = Normalizer::new(RuleSet::sua(), 0).term(&left).unwrap_err();
        assert_eq!(err, NormalizeError::StepBudgetExceeded { budget: 0 });
    }

    #[test]
    fn trace_records_paths() {
        let id_y = identity_term(&Type::Star, &v(1));
        let fid = comp([v(0), v(1), v(2), v(1), id_y]);
        let mut n = Normalizer::default().with_trace();
        n.term(&fid).unwrap();
        let trace = n.take_trace();
        assert!(matches!(trace[0].rule, Rule::Insertion { .. }));
        assert_eq!(trace.last().unwrap().rule, Rule::DiscRemoval);
    }
}

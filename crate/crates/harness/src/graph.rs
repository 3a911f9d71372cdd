//! Exhaustive multi-step reduction graphs.

use std::collections::HashMap;

use catt_core::rewrite::{one_step_term, Rule, RuleSet};
use catt_core::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub rule: Rule,
    pub via_cell: bool,
}

#[derive(Clone, Debug)]
pub struct Graph {
    pub nodes: Vec<Term>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BudgetExceeded {
    pub budget: usize,
}

impl Graph {
    pub fn sinks(&self) -> Vec<usize> {
        let mut has_out = vec![false; self.nodes.len()];
        for e in &self.edges {
            has_out[e.from] = true;
        }
        (0..self.nodes.len()).filter(|&i| !has_out[i]).collect()
    }
}

/// Closure of `t` under single steps, breadth first. Node 0 is `t`.
pub fn reduction_graph(t: &Term, rules: RuleSet, budget: usize) -> Result<Graph, BudgetExceeded> {
    let mut index: HashMap<Term, usize> = HashMap::from([(t.clone(), 0)]);
    let mut g = Graph { nodes: vec![t.clone()], edges: Vec::new() };
    let mut next = 0;
    while next < g.nodes.len() {
        let cur = g.nodes[next].clone();
        for r in one_step_term(&cur, rules) {
            let to = match index.get(&r.result) {
                Some(&i) => i,
                None => {
                    if g.nodes.len() >= budget {
                        return Err(BudgetExceeded { budget });
                    }
                    index.insert(r.result.clone(), g.nodes.len());
                    g.nodes.push(r.result);
                    g.nodes.len() - 1
                }
            };
            let via_cell = r.step.via_cell();
            g.edges.push(Edge { from: next, to, rule: r.step.rule, via_cell });
        }
        next += 1;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use catt_core::unbiased::unbiased_coh;
    use catt_core::{Sub, Tree};

    fn comp(args: [Term; 5]) -> Term {
        unbiased_coh(1, &"[[],[]]".parse::<Tree>().unwrap()).subst(&Sub::new(args.to_vec()))
    }

    #[test]
    fn associator_sides_share_the_sink() {
        let v = Term::Var;
        let right = comp([v(0), v(1), v(2), v(5), comp([v(1), v(3), v(4), v(5), v(6)])]);
        let left = comp([v(0), v(3), comp([v(0), v(1), v(2), v(3), v(4)]), v(5), v(6)]);
        let ternary = unbiased_coh(1, &"[[],[],[]]".parse().unwrap());
        for t in [right, left] {
            let g = reduction_graph(&t, RuleSet::sua(), 100).unwrap();
            let sinks = g.sinks();
            assert_eq!(sinks.len(), 1);
            assert_eq!(g.nodes[sinks[0]], ternary);
        }
    }

    #[test]
    fn variables_are_single_nodes() {
        let g = reduction_graph(&Term::Var(3), RuleSet::sua(), 10).unwrap();
        assert_eq!(g.nodes.len(), 1);
        assert_eq!(g.sinks(), vec![0]);
    }
}

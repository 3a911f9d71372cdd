//! Planar rooted trees, the shapes of pasting contexts.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Tree {
    children: Vec<Tree>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad tree syntax at offset {offset}: {reason}")]
pub struct TreeParseError {
    pub offset: usize,
    pub reason: &'static str,
}

impl Tree {
    pub fn leaf() -> Tree {
        Tree::default()
    }

    pub fn new(children: Vec<Tree>) -> Tree {
        Tree { children }
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn disc(n: usize) -> Tree {
        (0..n).fold(Tree::leaf(), |t, _| t.suspend())
    }

    pub fn suspend(&self) -> Tree {
        Tree { children: vec![self.clone()] }
    }

    /// Wedge sum on trees: concatenation of child lists.
    pub fn wedge(&self, other: &Tree) -> Tree {
        let mut children = self.children.clone();
        children.extend(other.children.iter().cloned());
        Tree { children }
    }

    pub fn dim(&self) -> usize {
        self.children.iter().map(|c| 1 + c.dim()).max().unwrap_or(0)
    }

    pub fn trunk_height(&self) -> usize {
        match self.children.as_slice() {
            [only] => 1 + only.trunk_height(),
            _ => 0,
        }
    }

    pub fn is_linear(&self) -> bool {
        self.trunk_height() == self.dim()
    }

    /// Number of nodes, counting the root.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Tree::node_count).sum::<usize>()
    }

    /// Number of variables of the generated context.
    pub fn var_count(&self) -> usize {
        2 * self.node_count() - 1
    }

    pub fn subtree(&self, path: &[usize]) -> Option<&Tree> {
        match path.split_first() {
            None => Some(self),
            Some((&k, rest)) => self.children.get(k)?.subtree(rest),
        }
    }

    /// `∂ₙT`: truncation at depth `n`.
    pub fn boundary(&self, n: usize) -> Tree {
        if n == 0 {
            Tree::leaf()
        } else {
            Tree { children: self.children.iter().map(|c| c.boundary(n - 1)).collect() }
        }
    }

    /// Paths to every leaf, in left-to-right order. The root of `[]` is
    /// reported as the empty path.
    pub fn leaf_paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.collect_leaves(&mut Vec::new(), &mut out);
        out
    }

    fn collect_leaves(&self, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if self.children.is_empty() {
            out.push(prefix.clone());
        }
        for (k, c) in self.children.iter().enumerate() {
            prefix.push(k);
            c.collect_leaves(prefix, out);
            prefix.pop();
        }
    }

    /// All trees with at most `max_nodes` nodes, smallest first.
    pub fn enumerate(max_nodes: usize) -> Vec<Tree> {
        let mut by_size: Vec<Vec<Tree>> = vec![Vec::new()];
        for n in 1..=max_nodes {
            // A tree of n nodes is a root over a forest of n - 1 nodes.
            let forests = forests(n - 1, &by_size);
            by_size.push(forests.into_iter().map(Tree::new).collect());
        }
        by_size.into_iter().flatten().collect()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tree {\n  node [shape=point];\n  n0;\n");
        let mut next = 1;
        self.dot_edges(0, &mut next, &mut out);
        out.push_str("}\n");
        out
    }

    fn dot_edges(&self, id: usize, next: &mut usize, out: &mut String) {
        for c in &self.children {
            let cid = *next;
            *next += 1;
            out.push_str(&format!("  n{cid};\n  n{id} -> n{cid};\n"));
            c.dot_edges(cid, next, out);
        }
    }
}

fn forests(nodes: usize, by_size: &[Vec<Tree>]) -> Vec<Vec<Tree>> {
    if nodes == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=nodes {
        for head in &by_size[first] {
            for mut rest in forests(nodes - first, by_size) {
                rest.insert(0, head.clone());
                out.push(rest);
            }
        }
    }
    out
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for Tree {
    type Err = TreeParseError;

    fn from_str(s: &str) -> Result<Tree, TreeParseError> {
        let bytes: Vec<(usize, u8)> =
            s.bytes().enumerate().filter(|(_, b)| !b.is_ascii_whitespace() && *b != b',').collect();
        let mut pos = 0;
        let tree = parse_node(&bytes, &mut pos)?;
        if let Some(&(offset, _)) = bytes.get(pos) {
            return Err(TreeParseError { offset, reason: "trailing input" });
        }
        Ok(tree)
    }
}

fn parse_node(bytes: &[(usize, u8)], pos: &mut usize) -> Result<Tree, TreeParseError> {
    let end = bytes.last().map(|(o, _)| o + 1).unwrap_or(0);
    match bytes.get(*pos) {
        Some((_, b'[')) => *pos += 1,
        Some(&(offset, _)) => return Err(TreeParseError { offset, reason: "expected '['" }),
        None => return Err(TreeParseError { offset: end, reason: "unexpected end" }),
    }
    let mut children = Vec::new();
    loop {
        match bytes.get(*pos) {
            Some((_, b']')) => {
                *pos += 1;
                return Ok(Tree { children });
            }
            Some(_) => children.push(parse_node(bytes, pos)?),
            None => return Err(TreeParseError { offset: end, reason: "unclosed '['" }),
        }
    }
}

pub fn tree_dim(t: &Tree) -> usize {
    t.dim()
}

pub fn trunk_height(t: &Tree) -> usize {
    t.trunk_height()
}

pub fn is_linear(t: &Tree) -> bool {
    t.is_linear()
}

pub fn disc(n: usize) -> Tree {
    Tree::disc(n)
}

pub fn tree_bd(n: usize, t: &Tree) -> Tree {
    t.boundary(n)
}

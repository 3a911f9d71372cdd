//! Canonical printing in the surface syntax.
//!
//! A raw coherence prints as `<ps : ty> args`, where `ps` names the head
//! tree's variables canonically and `args` lists the substitution with
//! non-maximal entries in braces.

use crate::pasting::{ctx_to_tree, locally_maximal, tree_var_names, Labelling};
use crate::syntax::{Ctx, Term, Type};
use crate::tree::Tree;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Printer {
    /// Print implicit arguments in braces.
    pub full_args: bool,
    /// Print arrow bases as `s ->[A] t` when `A` is not ⋆.
    pub explicit_bases: bool,
}

impl Printer {
    /// Output that parses back to the identical term.
    pub fn canonical() -> Printer {
        Printer { full_args: true, explicit_bases: true }
    }

    /// Locally maximal arguments only, bases omitted.
    pub fn short() -> Printer {
        Printer { full_args: false, explicit_bases: false }
    }

    pub fn term(&self, t: &Term, names: &[String]) -> String {
        match t {
            Term::Var(i) => var_name(names, *i),
            Term::Coh(c) => {
                let inner = tree_var_names(&c.tree);
                let mut out = format!(
                    "<{} : {}>",
                    print_ps(&c.tree, &inner),
                    self.ty(&c.ty, &inner)
                );
                let maximal = locally_maximal(&c.tree);
                for (i, a) in c.args.iter().enumerate() {
                    if maximal.contains(&i) {
                        out.push(' ');
                        out.push_str(&self.atom(a, names));
                    } else if self.full_args {
                        out.push_str(&format!(" {{{}}}", self.term(a, names)));
                    }
                }
                out
            }
        }
    }

    fn atom(&self, t: &Term, names: &[String]) -> String {
        match t {
            Term::Var(_) => self.term(t, names),
            Term::Coh(_) => format!("({})", self.term(t, names)),
        }
    }

    pub fn ty(&self, a: &Type, names: &[String]) -> String {
        match a {
            Type::Star => "*".to_string(),
            Type::Arr(arr) => {
                let s = self.term(&arr.src, names);
                let t = self.term(&arr.tgt, names);
                if self.explicit_bases && arr.base != Type::Star {
                    format!("{s} ->[{}] {t}", self.ty(&arr.base, names))
                } else {
                    format!("{s} -> {t}")
                }
            }
        }
    }

    /// A context in paren notation when it is pasting, binder notation otherwise.
    pub fn ctx(&self, ctx: &Ctx) -> String {
        let names = ctx.names();
        if let Ok(tree) = ctx_to_tree(ctx) {
            return print_ps(&tree, &names);
        }
        ctx.entries()
            .iter()
            .enumerate()
            .map(|(i, e)| format!("({} : {})", e.name, self.ty(&e.ty, &names[..i])))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn var_name(names: &[String], i: usize) -> String {
    names.get(i).cloned().unwrap_or_else(|| format!("#{i}"))
}

/// Paren notation, e.g. `(x(f)y(g)z)`, with `names` in context order.
pub fn print_ps(tree: &Tree, names: &[String]) -> String {
    fn node(l: &Labelling, names: &[String], out: &mut String) {
        let name = |t: &Term| var_name(names, t.as_var().expect("identity labelling"));
        out.push_str(&name(&l.labels[0]));
        for (c, lab) in l.children.iter().zip(&l.labels[1..]) {
            out.push('(');
            node(c, names, out);
            out.push(')');
            out.push_str(&name(lab));
        }
    }
    let mut out = String::from("(");
    node(&Labelling::identity(tree), names, &mut out);
    out.push(')');
    out
}

pub fn print_term(t: &Term, names: &[String]) -> String {
    Printer::canonical().term(t, names)
}

pub fn print_type(a: &Type, names: &[String]) -> String {
    Printer::canonical().ty(a, names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pasting::tree_to_ctx;
    use crate::unbiased::unbiased_coh;

    #[test]
    fn composite_prints_with_braced_implicits() {
        let two: Tree = "[[],[]]".parse().unwrap();
        let names = tree_to_ctx(&two).names();
        assert_eq!(
            print_term(&unbiased_coh(1, &two), &names),
            "<(x0(f0)x1(f1)x2) : x0 -> x2> {x0} {x1} f0 {x2} f1"
        );
        assert_eq!(Printer::short().term(&unbiased_coh(1, &two), &names), "<(x0(f0)x1(f1)x2) : x0 -> x2> f0 f1");
    }

    #[test]
    fn nested_ps() {
        let t: Tree = "[[[]]]".parse().unwrap();
        let names: Vec<String> = ["x", "y", "f", "g", "a"].iter().map(|s| s.to_string()).collect();
        assert_eq!(print_ps(&t, &names), "(x(f(a)g)y)");
    }
}

//! Ordinals below ω^ω and the syntactic complexity measure.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{Sub, Term};
use crate::unbiased::is_identity;

/// `Σ cᵢ·ω^{eᵢ}` stored as exponent ↦ non-zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct OrdinalPoly(BTreeMap<usize, u64>);

impl OrdinalPoly {
    pub fn zero() -> OrdinalPoly {
        OrdinalPoly::default()
    }

    /// `c·ω^e`.
    pub fn monomial(e: usize, c: u64) -> OrdinalPoly {
        let mut m = BTreeMap::new();
        if c > 0 {
            m.insert(e, c);
        }
        OrdinalPoly(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coefficient(&self, e: usize) -> u64 {
        self.0.get(&e).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.0.iter().map(|(e, c)| (*e, *c))
    }

    /// Natural (Hessenberg) sum.
    pub fn natural_sum(&self, other: &OrdinalPoly) -> OrdinalPoly {
        let mut m = self.0.clone();
        for (e, c) in &other.0 {
            *m.entry(*e).or_insert(0) += c;
        }
        OrdinalPoly(m)
    }
}

impl Ord for OrdinalPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.0.iter().rev();
        let mut b = other.0.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((ea, ca)), Some((eb, cb))) => {
                    let o = ea.cmp(eb).then(ca.cmp(cb));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
            }
        }
    }
}

impl PartialOrd for OrdinalPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for OrdinalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .rev()
            .map(|(&e, &c)| {
                let base = match e {
                    0 => return c.to_string(),
                    1 => "ω".to_string(),
                    _ => format!("ω^{e}"),
                };
                if c == 1 {
                    base
                } else {
                    format!("{c}·{base}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn natural_sum(a: &OrdinalPoly, b: &OrdinalPoly) -> OrdinalPoly {
    a.natural_sum(b)
}

pub fn ord_lt(a: &OrdinalPoly, b: &OrdinalPoly) -> bool {
    a < b
}

pub fn syntactic_complexity(t: &Term) -> OrdinalPoly {
    match t {
        Term::Var(_) => OrdinalPoly::zero(),
        Term::Coh(c) => {
            let weight = if is_identity(t) { 1 } else { 2 };
            OrdinalPoly::monomial(c.ty.dim(), weight).natural_sum(&sub_complexity(&c.args))
        }
    }
}

pub fn sub_complexity(s: &Sub) -> OrdinalPoly {
    s.iter().fold(OrdinalPoly::zero(), |acc, t| acc.natural_sum(&syntactic_complexity(t)))
}

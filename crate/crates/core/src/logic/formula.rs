use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::structures::Vocabulary;

/// First-order formula over a relational vocabulary.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom { symbol: String, args: Vec<String> },
    Eq(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    pub fn atom(symbol: &str, args: &[&str]) -> Formula {
        Formula::Atom {
            symbol: symbol.to_string(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }

    pub fn eq(a: &str, b: &str) -> Formula {
        Formula::Eq(a.to_string(), b.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    pub fn forall(v: &str, body: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(body))
    }

    /// Left-nested conjunction; `True` for an empty list.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `False` for an empty list.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom { .. } | Formula::Eq(..) => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_depth(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut see = |v: &String, bound: &Vec<String>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom { args, .. } => args.iter().for_each(|a| see(a, bound)),
            Formula::Eq(a, b) => {
                see(a, bound);
                see(b, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// All variable names occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v.to_string());
        });
        out
    }

    fn visit_vars(&self, f: &mut impl FnMut(&str)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom { args, .. } => args.iter().for_each(|a| f(a)),
            Formula::Eq(a, b) => {
                f(a);
                f(b);
            }
            Formula::Not(g) => g.visit_vars(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                f(v);
                g.visit_vars(f);
            }
        }
    }

    /// Check every atom against `vocab`: the symbol exists and the arity
    /// matches.
    pub fn check_vocab(&self, vocab: &Vocabulary) -> Result<()> {
        match self {
            Formula::True | Formula::False | Formula::Eq(..) => Ok(()),
            Formula::Atom { symbol, args } => match vocab.index_of(symbol) {
                None => Err(Error::invalid(format!("unknown relation symbol {symbol}"))),
                Some(i) if vocab.symbols()[i].arity != args.len() => Err(Error::Arity {
                    symbol: symbol.clone(),
                    expected: vocab.symbols()[i].arity,
                    found: args.len(),
                }),
                Some(_) => Ok(()),
            },
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.check_vocab(vocab),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.check_vocab(vocab)?;
                b.check_vocab(vocab)
            }
        }
    }

    /// Replace free occurrences of `var` by `by`, renaming bound variables
    /// that would capture `by`.
    pub fn substitute(&self, var: &str, by: &str) -> Formula {
        let mut taken = self.all_vars();
        taken.insert(by.to_string());
        taken.insert(var.to_string());
        self.subst(var, by, &mut taken)
    }

    fn subst(&self, var: &str, by: &str, taken: &mut BTreeSet<String>) -> Formula {
        let r = |x: &String| if x == var { by.to_string() } else { x.clone() };
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom { symbol, args } => Formula::Atom {
                symbol: symbol.clone(),
                args: args.iter().map(r).collect(),
            },
            Formula::Eq(a, b) => Formula::Eq(r(a), r(b)),
            Formula::Not(f) => Formula::not(f.subst(var, by, taken)),
            Formula::And(a, b) => Formula::and(a.subst(var, by, taken), b.subst(var, by, taken)),
            Formula::Or(a, b) => Formula::or(a.subst(var, by, taken), b.subst(var, by, taken)),
            Formula::Implies(a, b) => {
                Formula::implies(a.subst(var, by, taken), b.subst(var, by, taken))
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let exists = matches!(self, Formula::Exists(..));
                let wrap = |v: &str, body: Formula| {
                    if exists {
                        Formula::exists(v, body)
                    } else {
                        Formula::forall(v, body)
                    }
                };
                if v == var || !f.free_vars().contains(var) {
                    return self.clone();
                }
                if v == by {
                    let fresh = fresh_var(taken);
                    let renamed = f.subst(v, &fresh, taken);
                    wrap(&fresh, renamed.subst(var, by, taken))
                } else {
                    wrap(v, f.subst(var, by, taken))
                }
            }
        }
    }
}

/// A variable name not in `taken`; it is added to `taken`.
pub(crate) fn fresh_var(taken: &mut BTreeSet<String>) -> String {
    let mut i = 0usize;
    loop {
        let name = format!("v{i}");
        if taken.insert(name.clone()) {
            return name;
        }
        i += 1;
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom { symbol, args } => write!(f, "{symbol}({})", args.join(",")),
            Formula::Eq(a, b) => write!(f, "{a}={b}"),
            Formula::Not(g) => write!(f, "!{g}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Exists(v, g) => write!(f, "exists {v}. {g}"),
            Formula::Forall(v, g) => write!(f, "forall {v}. {g}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depths() {
        assert_eq!(Formula::atom("E", &["x", "y"]).quantifier_depth(), 0);
        assert_eq!(Formula::exists("x", Formula::atom("E", &["x", "y"])).quantifier_depth(), 1);
        let f = Formula::forall("x", Formula::exists("y", Formula::atom("E", &["x", "y"])));
        assert_eq!(f.quantifier_depth(), 2);
        let g = Formula::and(f.clone(), Formula::exists("z", Formula::eq("z", "z")));
        assert_eq!(g.quantifier_depth(), 2);
    }

    #[test]
    fn free_variables() {
        let f = Formula::exists("x", Formula::and(Formula::atom("E", &["x", "y"]), Formula::eq("z", "x")));
        assert_eq!(f.free_vars(), ["y", "z"].iter().map(|s| s.to_string()).collect());
        assert!(!f.is_sentence());
    }

    #[test]
    fn substitution_avoids_capture() {
        // exists y. E(x,y) with x := y must not become exists y. E(y,y).
        let f = Formula::exists("y", Formula::atom("E", &["x", "y"]));
        let g = f.substitute("x", "y");
        assert_eq!(g.free_vars(), ["y"].iter().map(|s| s.to_string()).collect());
        match &g {
            Formula::Exists(v, body) => {
                assert_ne!(v, "y");
                assert_eq!(**body, Formula::atom("E", &["y", v]));
            }
            other => panic!("unexpected {other}"),
        }
        // Bound occurrences are left alone.
        let h = Formula::forall("x", Formula::eq("x", "x"));
        assert_eq!(h.substitute("x", "z"), h);
    }

    #[test]
    fn printing() {
        let f = Formula::forall(
            "x",
            Formula::implies(Formula::atom("E", &["x", "x"]), Formula::eq("x", "x")),
        );
        assert_eq!(f.to_string(), "forall x. (E(x,x) -> x=x)");
        assert_eq!(Formula::not(Formula::eq("a", "b")).to_string(), "!a=b");
    }
}

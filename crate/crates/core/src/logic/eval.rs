//! Satisfaction of formulas in finite structures.
//!
//! [`evaluate_naive`] is a direct recursive definition and serves as the
//! reference. [`Evaluator`] compiles a formula to slot-indexed nodes,
//! memoises quantifier subformulas on the values of their free variables,
//! and, for binary vocabularies on at most 64 vertices, tries only one
//! representative of each class of interchangeable unassigned vertices.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use super::Formula;
use crate::error::{Error, Result};
use crate::structures::{Structure, Vertex};

pub type Assignment = BTreeMap<String, Vertex>;

fn check_assignment(m: &Structure, phi: &Formula, asg: &Assignment) -> Result<()> {
    for v in phi.free_vars() {
        match asg.get(&v) {
            None => return Err(Error::invalid(format!("free variable {v} is unassigned"))),
            Some(&x) if !m.contains(x) => {
                return Err(Error::invalid(format!("{v} is assigned {x}, outside the universe")))
            }
            Some(_) => {}
        }
    }
    phi.check_vocab(m.vocab())
}

/// Reference evaluator.
pub fn evaluate_naive(m: &Structure, phi: &Formula, asg: &Assignment) -> Result<bool> {
    check_assignment(m, phi, asg)?;
    let mut env = asg.clone();
    Ok(naive(m, phi, &mut env))
}

fn naive(m: &Structure, phi: &Formula, env: &mut Assignment) -> bool {
    match phi {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom { symbol, args } => {
            let s = m.vocab().index_of(symbol).expect("checked symbol");
            let t: Vec<Vertex> = args.iter().map(|a| env[a]).collect();
            m.holds(s, &t)
        }
        Formula::Eq(a, b) => env[a] == env[b],
        Formula::Not(f) => !naive(m, f, env),
        Formula::And(a, b) => naive(m, a, env) && naive(m, b, env),
        Formula::Or(a, b) => naive(m, a, env) || naive(m, b, env),
        Formula::Implies(a, b) => !naive(m, a, env) || naive(m, b, env),
        Formula::Exists(v, f) | Formula::Forall(v, f) => {
            let want = matches!(phi, Formula::Exists(..));
            let saved = env.get(v).copied();
            let mut result = !want;
            for x in m.vertices() {
                env.insert(v.clone(), x);
                if naive(m, f, env) == want {
                    result = want;
                    break;
                }
            }
            match saved {
                Some(x) => env.insert(v.clone(), x),
                None => env.remove(v),
            };
            result
        }
    }
}

/// Fast evaluator; agrees with [`evaluate_naive`].
pub fn evaluate(m: &Structure, phi: &Formula, asg: &Assignment) -> Result<bool> {
    Evaluator::new(m).eval(phi, asg)
}

/// Truth of a sentence.
pub fn holds_sentence(m: &Structure, phi: &Formula) -> Result<bool> {
    if !phi.is_sentence() {
        return Err(Error::invalid(format!(
            "formula has free variables {:?}",
            phi.free_vars()
        )));
    }
    evaluate(m, phi, &Assignment::new())
}

const TWIN_LIMIT: usize = 64;

/// Reusable evaluator bound to one structure.
pub struct Evaluator<'m> {
    m: &'m Structure,
    // Class id per vertex (index v - 1) when twin pruning applies.
    class: Option<Vec<u8>>,
}

impl<'m> Evaluator<'m> {
    pub fn new(m: &'m Structure) -> Self {
        let binary = m.vocab().symbols().iter().all(|s| s.arity == 2);
        let class = (binary && m.n() <= TWIN_LIMIT).then(|| twin_classes(m));
        Evaluator { m, class }
    }

    pub fn eval(&self, phi: &Formula, asg: &Assignment) -> Result<bool> {
        check_assignment(self.m, phi, asg)?;
        let free: Vec<String> = phi.free_vars().into_iter().collect();
        let prog = Program::compile(phi, &free, self.m);
        let mut env = vec![0 as Vertex; prog.slots];
        for (i, v) in free.iter().enumerate() {
            env[i] = asg[v];
        }
        let memo = RefCell::new(vec![HashMap::new(); prog.nodes.len()]);
        Ok(self.run(&prog, prog.root, &mut env, &memo))
    }

    fn run(
        &self,
        prog: &Program,
        id: usize,
        env: &mut Vec<Vertex>,
        memo: &RefCell<Vec<HashMap<u128, bool>>>,
    ) -> bool {
        match &prog.nodes[id] {
            Node::Const(b) => *b,
            Node::Atom2(s, a, b) => self.m.holds2(*s, env[*a], env[*b]),
            Node::Atom(s, args) => {
                let t: Vec<Vertex> = args.iter().map(|&a| env[a]).collect();
                self.m.holds(*s, &t)
            }
            Node::Eq(a, b) => env[*a] == env[*b],
            Node::Not(f) => !self.run(prog, *f, env, memo),
            Node::And(a, b) => self.run(prog, *a, env, memo) && self.run(prog, *b, env, memo),
            Node::Or(a, b) => self.run(prog, *a, env, memo) || self.run(prog, *b, env, memo),
            Node::Implies(a, b) => !self.run(prog, *a, env, memo) || self.run(prog, *b, env, memo),
            Node::Quant {
                exists,
                slot,
                body,
                key_slots,
                scope,
            } => {
                let key = key_slots.as_ref().map(|ks| {
                    ks.iter()
                        .fold(0u128, |acc, &s| acc << 16 | env[s] as u128)
                });
                if let Some(k) = key {
                    if let Some(&v) = memo.borrow()[id].get(&k) {
                        return v;
                    }
                }
                let want = *exists;
                let mut result = !want;
                let assigned: u64 = match &self.class {
                    Some(_) => scope.iter().fold(0u64, |acc, &s| acc | 1u64 << (env[s] - 1)),
                    None => 0,
                };
                let mut seen: u64 = 0;
                for x in self.m.vertices() {
                    if let Some(class) = &self.class {
                        if assigned >> (x - 1) & 1 == 0 {
                            let c = class[x as usize - 1];
                            if seen >> c & 1 == 1 {
                                continue;
                            }
                            seen |= 1 << c;
                        }
                    }
                    env[*slot] = x;
                    if self.run(prog, *body, env, memo) == want {
                        result = want;
                        break;
                    }
                }
                if let Some(k) = key {
                    memo.borrow_mut()[id].insert(k, result);
                }
                result
            }
        }
    }
}

// Vertices u, v are in one class when swapping them is an automorphism.
// The relation is an equivalence; class ids are dense from 0.
fn twin_classes(m: &Structure) -> Vec<u8> {
    let n = m.n();
    let syms = m.vocab().len();
    let mut class = vec![u8::MAX; n];
    let mut next = 0u8;
    for u in 1..=n as Vertex {
        if class[u as usize - 1] != u8::MAX {
            continue;
        }
        class[u as usize - 1] = next;
        for v in (u + 1)..=n as Vertex {
            if class[v as usize - 1] != u8::MAX {
                continue;
            }
            let swap_ok = (0..syms).all(|s| {
                m.holds2(s, u, u) == m.holds2(s, v, v)
                    && m.holds2(s, u, v) == m.holds2(s, v, u)
                    && m.vertices().filter(|&w| w != u && w != v).all(|w| {
                        m.holds2(s, u, w) == m.holds2(s, v, w) && m.holds2(s, w, u) == m.holds2(s, w, v)
                    })
            });
            if swap_ok {
                class[v as usize - 1] = next;
            }
        }
        next += 1;
    }
    class
}

enum Node {
    Const(bool),
    Atom2(usize, usize, usize),
    Atom(usize, Vec<usize>),
    Eq(usize, usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Quant {
        exists: bool,
        slot: usize,
        body: usize,
        // Slots of the free variables when memoisation applies.
        key_slots: Option<Vec<usize>>,
        // Slots bound at this point (free variables and enclosing binders).
        scope: Vec<usize>,
    },
}

struct Program {
    nodes: Vec<Node>,
    root: usize,
    slots: usize,
}

impl Program {
    fn compile(phi: &Formula, free: &[String], m: &Structure) -> Program {
        let mut p = Program {
            nodes: Vec::new(),
            root: 0,
            slots: free.len(),
        };
        let mut scope: Vec<(String, usize)> =
            free.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        p.root = p.build(phi, &mut scope, m);
        p
    }

    fn lookup(scope: &[(String, usize)], v: &str) -> usize {
        scope.iter().rev().find(|(n, _)| n == v).expect("bound variable").1
    }

    fn build(&mut self, phi: &Formula, scope: &mut Vec<(String, usize)>, m: &Structure) -> usize {
        let node = match phi {
            Formula::True => Node::Const(true),
            Formula::False => Node::Const(false),
            Formula::Atom { symbol, args } => {
                let s = m.vocab().index_of(symbol).expect("checked symbol");
                let slots: Vec<usize> = args.iter().map(|a| Self::lookup(scope, a)).collect();
                if slots.len() == 2 && m.is_binary(s) {
                    Node::Atom2(s, slots[0], slots[1])
                } else {
                    Node::Atom(s, slots)
                }
            }
            Formula::Eq(a, b) => Node::Eq(Self::lookup(scope, a), Self::lookup(scope, b)),
            Formula::Not(f) => Node::Not(self.build(f, scope, m)),
            Formula::And(a, b) => {
                let (a, b) = (self.build(a, scope, m), self.build(b, scope, m));
                Node::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.build(a, scope, m), self.build(b, scope, m));
                Node::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.build(a, scope, m), self.build(b, scope, m));
                Node::Implies(a, b)
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let visible: Vec<usize> = visible_slots(scope);
                let free_slots: Vec<usize> = {
                    let mut s: Vec<usize> = phi
                        .free_vars()
                        .iter()
                        .map(|x| Self::lookup(scope, x))
                        .collect();
                    s.sort_unstable();
                    s
                };
                let key_slots = (free_slots.len() < visible.len()
                    && free_slots.len() <= 8
                    && m.n() < 1 << 16)
                    .then_some(free_slots);
                let slot = self.slots;
                self.slots += 1;
                scope.push((v.clone(), slot));
                let body = self.build(f, scope, m);
                scope.pop();
                Node::Quant {
                    exists: matches!(phi, Formula::Exists(..)),
                    slot,
                    body,
                    key_slots,
                    scope: visible,
                }
            }
        };
        self.nodes.push(node);
        self.nodes.len() - 1
    }
}

// Slots whose variables are currently visible (shadowed ones excluded).
fn visible_slots(scope: &[(String, usize)]) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, (name, slot)) in scope.iter().enumerate() {
        if !scope[i + 1..].iter().any(|(n, _)| n == name) {
            out.push(*slot);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse_graph_formula;
    use super::*;

    fn both(m: &Structure, text: &str) -> bool {
        let f = parse_graph_formula(text).unwrap();
        let a = evaluate_naive(m, &f, &Assignment::new()).unwrap();
        let b = evaluate(m, &f, &Assignment::new()).unwrap();
        assert_eq!(a, b, "{text}");
        a
    }

    #[test]
    fn examples() {
        assert!(both(&Structure::complete_graph(3), "forall x. forall y. (!x=y -> E(x,y))"));
        assert!(both(
            &Structure::path_graph(3),
            "exists x. exists y. exists z. (E(x,y) & E(y,z) & !E(x,z) & !x=z)"
        ));
        assert!(!both(&Structure::complete_graph(1), "exists x. exists y. !x=y"));
    }

    #[test]
    fn empty_structure() {
        let e = Structure::graph(0, &[]).unwrap();
        assert!(!both(&e, "exists x. x=x"));
        assert!(both(&e, "forall x. !x=x"));
    }

    #[test]
    fn free_variables_need_values() {
        let m = Structure::path_graph(3);
        let f = parse_graph_formula("exists y. E(x,y)").unwrap();
        assert!(evaluate(&m, &f, &Assignment::new()).is_err());
        assert!(holds_sentence(&m, &f).is_err());
        let asg: Assignment = [("x".to_string(), 2)].into_iter().collect();
        assert!(evaluate(&m, &f, &asg).unwrap());
        let bad: Assignment = [("x".to_string(), 9)].into_iter().collect();
        assert!(evaluate(&m, &f, &bad).is_err());
    }

    #[test]
    fn successor_symbol_needs_vocabulary() {
        let m = Structure::path_graph(3);
        let f = parse_graph_formula("exists x. exists y. S(x,y)").unwrap();
        assert!(holds_sentence(&m, &f).is_err());
        let s = Structure::graph_with_successor(3, &[]).unwrap();
        assert!(holds_sentence(&s, &f).unwrap());
    }

    #[test]
    fn shadowing() {
        let m = Structure::path_graph(3);
        // Inner x shadows the outer one.
        assert!(both(&m, "exists x. (E(x,x) | exists x. exists y. E(x,y))"));
        assert!(!both(&m, "forall x. exists y. (E(x,y) & forall x. E(x,y))"));
    }

    #[test]
    fn twin_classes_of_star() {
        let star = Structure::graph(4, &[(1, 2), (1, 3), (1, 4)]).unwrap();
        let c = twin_classes(&star);
        assert_eq!(c[1], c[2]);
        assert_eq!(c[2], c[3]);
        assert_ne!(c[0], c[1]);
    }
}

//! A brute-force equality oracle on a first-order fragment, independent of
//! the normalizer. Equality is decided as joinability under a
//! contraction-only rewrite closure; exhausting the search budget is
//! reported as a distinct outcome, never as a boolean.

use std::collections::{HashSet, VecDeque};

use crate::prop::Prop;
use crate::term::{Declaration, Signature, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    Distinct,
    /// The budget ran out before both closures were exhausted.
    Inconclusive,
}

pub struct Oracle<'a> {
    sig: &'a Signature,
    budget: usize,
}

impl<'a> Oracle<'a> {
    pub fn new(sig: &'a Signature) -> Oracle<'a> {
        Oracle { sig, budget: 10_000 }
    }

    pub fn with_budget(sig: &'a Signature, budget: usize) -> Oracle<'a> {
        Oracle { sig, budget }
    }

    /// The boundary of a fully applied constant: peel the constant's
    /// declared telescope against the spine, substituting term arguments
    /// into the final extension boundary.
    fn boundary_of(&self, p: &Prop, t: &Term) -> Option<Term> {
        // collect the spine under the out
        let mut spine = Vec::new();
        let mut head = t;
        loop {
            match head {
                Term::App(f, a) => {
                    spine.push(SpineItem::Term((**a).clone()));
                    head = f;
                }
                Term::PropApp(f, _) => {
                    spine.push(SpineItem::Prop);
                    head = f;
                }
                Term::Const(c) => {
                    spine.reverse();
                    return self.boundary_of_const(c, &spine, p);
                }
                _ => return None,
            }
        }
    }

    fn boundary_of_const(
        &self,
        name: &str,
        spine: &[SpineItem],
        p: &Prop,
    ) -> Option<Term> {
        let mut ty = self.sig.decls.iter().find_map(|d| match d {
            Declaration::Const { name: n, ty } if n == name => Some(ty.clone()),
            _ => None,
        })?;
        let mut args: Vec<Term> = Vec::new();
        let mut i = 0;
        loop {
            match (&ty, spine.get(i)) {
                (Term::Ext(_, q, m), None) if q == p => {
                    // substitute the collected arguments, innermost first
                    let mut body = (**m).clone();
                    for a in args.iter().rev() {
                        body = body.subst(0, a);
                    }
                    return Some(body);
                }
                (Term::Pi(_, b), Some(SpineItem::Term(a))) => {
                    args.push(a.clone());
                    ty = (**b).clone();
                    i += 1;
                }
                (Term::PropPi(_, b), Some(SpineItem::Prop)) => {
                    ty = (**b).clone();
                    i += 1;
                }
                _ => return None,
            }
        }
    }

    /// All single-step contractions of `t` at any position, under `hyps`.
    pub fn rewrite_step(&self, hyps: &Prop, t: &Term) -> Vec<Term> {
        let mut out = Vec::new();
        self.root_steps(hyps, t, &mut out);
        // congruence: rewrite inside each child of the fragment formers
        match t {
            Term::Suc(a) => {
                for a2 in self.rewrite_step(hyps, a) {
                    out.push(Term::Suc(Box::new(a2)));
                }
            }
            Term::Lam(b) => {
                for b2 in self.rewrite_step(hyps, b) {
                    out.push(Term::Lam(Box::new(b2)));
                }
            }
            Term::App(f, a) => {
                for f2 in self.rewrite_step(hyps, f) {
                    out.push(Term::App(Box::new(f2), a.clone()));
                }
                for a2 in self.rewrite_step(hyps, a) {
                    out.push(Term::App(f.clone(), Box::new(a2)));
                }
            }
            Term::NatElim(c, b, s, tgt) => {
                for b2 in self.rewrite_step(hyps, b) {
                    out.push(Term::NatElim(c.clone(), Box::new(b2), s.clone(), tgt.clone()));
                }
                for s2 in self.rewrite_step(hyps, s) {
                    out.push(Term::NatElim(c.clone(), b.clone(), Box::new(s2), tgt.clone()));
                }
                for t2 in self.rewrite_step(hyps, tgt) {
                    out.push(Term::NatElim(c.clone(), b.clone(), s.clone(), Box::new(t2)));
                }
            }
            Term::Out(p, a) => {
                for a2 in self.rewrite_step(hyps, a) {
                    out.push(Term::Out(p.clone(), Box::new(a2)));
                }
            }
            Term::In(p, a) => {
                for a2 in self.rewrite_step(hyps, a) {
                    out.push(Term::In(p.clone(), Box::new(a2)));
                }
            }
            Term::PropApp(f, p) => {
                for f2 in self.rewrite_step(hyps, f) {
                    out.push(Term::PropApp(Box::new(f2), p.clone()));
                }
            }
            Term::PropLam(p, m) => {
                for m2 in self.rewrite_step(hyps, m) {
                    out.push(Term::PropLam(p.clone(), Box::new(m2)));
                }
            }
            _ => {}
        }
        out
    }

    fn root_steps(&self, hyps: &Prop, t: &Term, out: &mut Vec<Term>) {
        match t {
            Term::App(f, a) => {
                if let Term::Lam(body) = &**f {
                    out.push(body.subst(0, a));
                }
            }
            Term::NatElim(_, b, _, tgt) if matches!(**tgt, Term::Zero) => {
                out.push((**b).clone());
            }
            Term::NatElim(c, b, s, tgt) => {
                if let Term::Suc(n) = &**tgt {
                    let rec = Term::NatElim(c.clone(), b.clone(), s.clone(), n.clone());
                    out.push(s.subst(1, n).subst(0, &rec));
                }
            }
            Term::Out(p, a) => {
                if let Term::In(q, inner) = &**a {
                    if p == q {
                        out.push((**inner).clone());
                    }
                }
                if hyps.entails(p) {
                    if let Some(body) = self.boundary_of(p, a) {
                        out.push(body);
                    }
                }
            }
            Term::In(p, a) => {
                if let Term::Out(q, inner) = &**a {
                    if p == q {
                        out.push((**inner).clone());
                    }
                }
            }
            Term::PropApp(f, p) => {
                if let Term::PropLam(q, m) = &**f {
                    if p == q && hyps.entails(p) {
                        out.push((**m).clone());
                    }
                }
            }
            Term::PropLam(p, m) => {
                if let Term::PropApp(inner, q) = &**m {
                    if p == q {
                        out.push((**inner).clone());
                    }
                }
            }
            _ => {}
        }
    }

    fn closure(&self, hyps: &Prop, t: &Term, budget: usize) -> (HashSet<Term>, bool) {
        let mut seen: HashSet<Term> = HashSet::new();
        let mut queue: VecDeque<Term> = VecDeque::new();
        seen.insert(t.clone());
        queue.push_back(t.clone());
        while let Some(cur) = queue.pop_front() {
            if seen.len() >= budget {
                return (seen, false);
            }
            for next in self.rewrite_step(hyps, &cur) {
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        (seen, true)
    }

    /// Joinability: do the rewrite closures of the two terms intersect?
    pub fn conv(&self, hyps: &Prop, t1: &Term, t2: &Term) -> Verdict {
        let half = self.budget / 2;
        let (c1, done1) = self.closure(hyps, t1, half.max(1));
        let (c2, done2) = self.closure(hyps, t2, half.max(1));
        if c1.intersection(&c2).next().is_some() {
            Verdict::Equal
        } else if done1 && done2 {
            Verdict::Distinct
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone)]
enum SpineItem {
    Term(Term),
    Prop,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prop::PropTable;

    fn plus_sig() -> (Signature, PropTable) {
        // const (+) : {Nat -> Nat -> Nat | plus ↪ δ}, δ by recursion on the
        // first argument
        let mut table = PropTable::new();
        let p = table.extend_le("plus", &Prop::top()).unwrap();
        let delta = Term::Lam(Box::new(Term::Lam(Box::new(Term::NatElim(
            Box::new(Term::Nat),
            Box::new(Term::Var(0)),
            Box::new(Term::Suc(Box::new(Term::Var(0)))),
            Box::new(Term::Var(1)),
        )))));
        let ty = Term::Ext(
            Box::new(Term::Pi(
                Box::new(Term::Nat),
                Box::new(Term::Pi(Box::new(Term::Nat), Box::new(Term::Nat))),
            )),
            p,
            Box::new(delta),
        );
        let mut sig = Signature::new();
        sig.push(Declaration::PropLe {
            name: "plus".into(),
            rhs: vec![],
        });
        sig.push(Declaration::Const {
            name: "(+)".into(),
            ty,
        });
        (sig, table)
    }

    fn out_plus(args: &[Term]) -> Term {
        let p = {
            let (_, table) = plus_sig();
            table.lookup("plus").unwrap().clone()
        };
        let mut t = Term::Out(p, Box::new(Term::Const("(+)".into())));
        for a in args {
            t = Term::App(Box::new(t), Box::new(a.clone()));
        }
        t
    }

    #[test]
    fn out_in_cancels() {
        let (sig, _) = plus_sig();
        let oracle = Oracle::new(&sig);
        let mut table = PropTable::new();
        let p = table.extend_le("p", &Prop::top()).unwrap();
        let t = Term::Out(p.clone(), Box::new(Term::In(p, Box::new(Term::Zero))));
        assert!(oracle.rewrite_step(&Prop::top(), &t).contains(&Term::Zero));
    }

    #[test]
    fn zero_is_normal() {
        let (sig, _) = plus_sig();
        let oracle = Oracle::new(&sig);
        assert!(oracle.rewrite_step(&Prop::top(), &Term::Zero).is_empty());
    }

    #[test]
    fn plus_collapses_under_hypothesis() {
        let (sig, table) = plus_sig();
        let p = table.lookup("plus").unwrap().clone();
        let oracle = Oracle::new(&sig);
        let t = out_plus(&[Term::nat_lit(1), Term::nat_lit(1)]);
        assert_eq!(oracle.conv(&p, &t, &Term::nat_lit(2)), Verdict::Equal);
        assert_eq!(
            oracle.conv(&Prop::top(), &t, &Term::nat_lit(2)),
            Verdict::Distinct
        );
    }

    #[test]
    fn reflexivity() {
        let (sig, _) = plus_sig();
        let oracle = Oracle::new(&sig);
        let t = Term::Suc(Box::new(Term::Zero));
        assert_eq!(oracle.conv(&Prop::top(), &t, &t), Verdict::Equal);
    }
}

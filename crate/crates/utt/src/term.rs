//! Core syntax: terms, telescopes, declarations, and signatures.
//!
//! Terms use de Bruijn indices counting term variables only; propositional
//! hypotheses occupy telescope slots but bind no term variable.

use crate::prop::{meet_all, Prop};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Const(String),
    /// Dependent product; the codomain is under one binder.
    Pi(Box<Term>, Box<Term>),
    Lam(Box<Term>),
    App(Box<Term>, Box<Term>),
    Nat,
    Zero,
    Suc(Box<Term>),
    /// motive (1 binder), base, step (2 binders: predecessor, ih), target.
    NatElim(Box<Term>, Box<Term>, Box<Term>, Box<Term>),
    Id(Box<Term>, Box<Term>, Box<Term>),
    Refl(Box<Term>),
    /// motive (2 binders: endpoint, equation), refl case, target.
    J(Box<Term>, Box<Term>, Box<Term>),
    Univ,
    El(Box<Term>),
    /// Codes of the Tarski universe, mirroring the large formers.
    PiCode(Box<Term>, Box<Term>),
    NatCode,
    IdCode(Box<Term>, Box<Term>, Box<Term>),
    /// `{A | p ↪ a}` as a code; the boundary is under the hypothesis `p`.
    ExtCode(Box<Term>, Prop, Box<Term>),
    PropPiCode(Prop, Box<Term>),
    /// `{p} A`; the body is under the hypothesis `p` (no term binder).
    PropPi(Prop, Box<Term>),
    /// `gl{p} M`.
    PropLam(Prop, Box<Term>),
    /// `M @ p`.
    PropApp(Box<Term>, Prop),
    /// `{A | p ↪ a}`; the boundary is under the hypothesis `p`.
    Ext(Box<Term>, Prop, Box<Term>),
    In(Prop, Box<Term>),
    Out(Prop, Box<Term>),
}

impl Term {
    /// Shift free indices `>= cutoff` by `amount`.
    pub fn shift(&self, amount: isize, cutoff: usize) -> Term {
        use Term::*;
        let go = |t: &Term| Box::new(t.shift(amount, cutoff));
        let go1 = |t: &Term| Box::new(t.shift(amount, cutoff + 1));
        let go2 = |t: &Term| Box::new(t.shift(amount, cutoff + 2));
        match self {
            Var(i) => {
                if *i >= cutoff {
                    Var((*i as isize + amount) as usize)
                } else {
                    Var(*i)
                }
            }
            Const(c) => Const(c.clone()),
            Pi(a, b) => Pi(go(a), go1(b)),
            Lam(b) => Lam(go1(b)),
            App(f, a) => App(go(f), go(a)),
            Nat => Nat,
            Zero => Zero,
            Suc(n) => Suc(go(n)),
            NatElim(c, b, s, t) => NatElim(go1(c), go(b), go2(s), go(t)),
            Id(a, x, y) => Id(go(a), go(x), go(y)),
            Refl(x) => Refl(go(x)),
            J(c, r, t) => J(go2(c), go(r), go(t)),
            Univ => Univ,
            El(c) => El(go(c)),
            PiCode(a, b) => PiCode(go(a), go1(b)),
            NatCode => NatCode,
            IdCode(a, x, y) => IdCode(go(a), go(x), go(y)),
            ExtCode(a, p, m) => ExtCode(go(a), p.clone(), go(m)),
            PropPiCode(p, b) => PropPiCode(p.clone(), go(b)),
            PropPi(p, b) => PropPi(p.clone(), go(b)),
            PropLam(p, b) => PropLam(p.clone(), go(b)),
            PropApp(f, p) => PropApp(go(f), p.clone()),
            Ext(a, p, m) => Ext(go(a), p.clone(), go(m)),
            In(p, a) => In(p.clone(), go(a)),
            Out(p, a) => Out(p.clone(), go(a)),
        }
    }

    /// Substitute `sub` for index `depth`, lowering the indices above it.
    pub fn subst(&self, depth: usize, sub: &Term) -> Term {
        use Term::*;
        let go = |t: &Term| Box::new(t.subst(depth, sub));
        let go1 = |t: &Term| Box::new(t.subst(depth + 1, sub));
        let go2 = |t: &Term| Box::new(t.subst(depth + 2, sub));
        match self {
            Var(i) => {
                if *i == depth {
                    sub.shift(depth as isize, 0)
                } else if *i > depth {
                    Var(i - 1)
                } else {
                    Var(*i)
                }
            }
            Const(c) => Const(c.clone()),
            Pi(a, b) => Pi(go(a), go1(b)),
            Lam(b) => Lam(go1(b)),
            App(f, a) => App(go(f), go(a)),
            Nat => Nat,
            Zero => Zero,
            Suc(n) => Suc(go(n)),
            NatElim(c, b, s, t) => NatElim(go1(c), go(b), go2(s), go(t)),
            Id(a, x, y) => Id(go(a), go(x), go(y)),
            Refl(x) => Refl(go(x)),
            J(c, r, t) => J(go2(c), go(r), go(t)),
            Univ => Univ,
            El(c) => El(go(c)),
            PiCode(a, b) => PiCode(go(a), go1(b)),
            NatCode => NatCode,
            IdCode(a, x, y) => IdCode(go(a), go(x), go(y)),
            ExtCode(a, p, m) => ExtCode(go(a), p.clone(), go(m)),
            PropPiCode(p, b) => PropPiCode(p.clone(), go(b)),
            PropPi(p, b) => PropPi(p.clone(), go(b)),
            PropLam(p, b) => PropLam(p.clone(), go(b)),
            PropApp(f, p) => PropApp(go(f), p.clone()),
            Ext(a, p, m) => Ext(go(a), p.clone(), go(m)),
            In(p, a) => In(p.clone(), go(a)),
            Out(p, a) => Out(p.clone(), go(a)),
        }
    }

    /// Nat literal as iterated successors.
    pub fn nat_lit(n: u64) -> Term {
        let mut t = Term::Zero;
        for _ in 0..n {
            t = Term::Suc(Box::new(t));
        }
        t
    }

    pub fn depth(&self) -> usize {
        use Term::*;
        let d = |t: &Term| t.depth();
        1 + match self {
            Var(_) | Const(_) | Nat | Zero | Univ | NatCode => 0,
            Suc(a) | Refl(a) | El(a) | Lam(a) | In(_, a) | Out(_, a) | PropApp(a, _)
            | PropPi(_, a) | PropLam(_, a) | PropPiCode(_, a) => d(a),
            Pi(a, b) | App(a, b) | PiCode(a, b) => d(a).max(d(b)),
            Ext(a, _, b) | ExtCode(a, _, b) => d(a).max(d(b)),
            Id(a, x, y) | IdCode(a, x, y) => d(a).max(d(x)).max(d(y)),
            J(a, x, y) => d(a).max(d(x)).max(d(y)),
            NatElim(c, b, s, t) => d(c).max(d(b)).max(d(s)).max(d(t)),
        }
    }
}

/// An entry of a telescope: a term variable with its type, or a
/// propositional hypothesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TeleEntry {
    TermVar { name: String, ty: Term },
    PropHyp(Prop),
}

/// A context mixing term variables and assumed-true propositions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Telescope {
    entries: Vec<TeleEntry>,
}

impl Telescope {
    pub fn new() -> Telescope {
        Telescope::default()
    }

    pub fn entries(&self) -> &[TeleEntry] {
        &self.entries
    }

    pub fn push_var(&mut self, name: impl Into<String>, ty: Term) {
        self.entries.push(TeleEntry::TermVar {
            name: name.into(),
            ty,
        });
    }

    pub fn push_hyp(&mut self, p: Prop) {
        self.entries.push(TeleEntry::PropHyp(p));
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    /// Number of term variables in scope.
    pub fn num_vars(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e, TeleEntry::TermVar { .. }))
            .count()
    }

    /// The conjunction of all propositional hypotheses.
    pub fn hyps(&self) -> Prop {
        meet_all(self.entries.iter().filter_map(|e| match e {
            TeleEntry::PropHyp(p) => Some(p),
            _ => None,
        }))
    }

    /// Type of the variable with de Bruijn index `idx` (0 = innermost),
    /// shifted into the current scope.
    pub fn var_type(&self, idx: usize) -> Option<Term> {
        let mut seen = 0;
        for e in self.entries.iter().rev() {
            if let TeleEntry::TermVar { ty, .. } = e {
                if seen == idx {
                    // the type was formed under the prefix missing idx+1 vars
                    return Some(ty.shift(idx as isize + 1, 0));
                }
                seen += 1;
            }
        }
        None
    }

    pub fn var_name(&self, idx: usize) -> Option<&str> {
        let mut seen = 0;
        for e in self.entries.iter().rev() {
            if let TeleEntry::TermVar { name, .. } = e {
                if seen == idx {
                    return Some(name);
                }
                seen += 1;
            }
        }
        None
    }

    /// Name of the variable at level `lvl` (0 = outermost term variable).
    pub fn level_name(&self, lvl: usize) -> Option<&str> {
        let idx = self.num_vars().checked_sub(lvl + 1)?;
        self.var_name(idx)
    }
}

/// Right-hand side of a `prop` declaration: a conjunction of previously
/// declared proposition names (empty meaning top).
pub type PropRhs = Vec<String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Declaration {
    Const { name: String, ty: Term },
    PropLe { name: String, rhs: PropRhs },
    PropEq { name: String, rhs: PropRhs },
}

impl Declaration {
    pub fn name(&self) -> &str {
        match self {
            Declaration::Const { name, .. }
            | Declaration::PropLe { name, .. }
            | Declaration::PropEq { name, .. } => name,
        }
    }
}

/// An ordered sequence of declarations; every prefix of a well-formed
/// signature is well-formed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub decls: Vec<Declaration>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn push(&mut self, d: Declaration) {
        self.decls.push(d);
    }

    pub fn const_type(&self, name: &str) -> Option<&Term> {
        self.decls.iter().find_map(|d| match d {
            Declaration::Const { name: n, ty } if n == name => Some(ty),
            _ => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_subst_roundtrip() {
        use Term::*;
        // (λ. 0 1) [x := c]  at depth 0
        let t = Lam(Box::new(App(Box::new(Var(0)), Box::new(Var(1)))));
        let s = t.subst(0, &Const("c".into()));
        assert_eq!(
            s,
            Lam(Box::new(App(Box::new(Var(0)), Box::new(Const("c".into())))))
        );
    }

    #[test]
    fn telescope_var_types_shift() {
        let mut tele = Telescope::new();
        tele.push_var("a", Term::Nat);
        tele.push_var("b", Term::Id(Box::new(Term::Nat), Box::new(Term::Var(0)), Box::new(Term::Zero)));
        // var 0 is b; its type mentions a as Var(0) in its own scope,
        // which is Var(1) in the full scope.
        assert_eq!(
            tele.var_type(0).unwrap(),
            Term::Id(Box::new(Term::Nat), Box::new(Term::Var(1)), Box::new(Term::Zero))
        );
        assert_eq!(tele.var_type(1).unwrap(), Term::Nat);
        assert_eq!(tele.var_name(0), Some("b"));
        assert_eq!(tele.level_name(0), Some("a"));
    }
}

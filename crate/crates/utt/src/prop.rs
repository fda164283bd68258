//! The free bounded meet semilattice of unfolding propositions.
//!
//! Every named proposition denotes a finite set of atoms; `prop p <= q`
//! allocates one fresh atom conjoined with the atoms of `q`, and
//! `prop p = q` reuses the atoms of `q`. Entailment is then a set
//! inclusion check.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;

use crate::error::PropError;

/// A generator of the proposition semilattice. Atom ids are allocated by a
/// monotone counter owned by the [`PropTable`] and are never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(pub u32);

/// A finite conjunction of atoms. The empty conjunction is the true
/// proposition.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prop {
    atoms: BTreeSet<Atom>,
}

impl Prop {
    /// The true proposition, unit of the meet.
    pub fn top() -> Prop {
        Prop::default()
    }

    pub fn atom(a: Atom) -> Prop {
        Prop {
            atoms: BTreeSet::from([a]),
        }
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Prop {
        Prop {
            atoms: atoms.into_iter().collect(),
        }
    }

    pub fn is_top(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.atoms.iter().copied()
    }

    /// Conjunction: the union of the two atom sets.
    pub fn meet(&self, other: &Prop) -> Prop {
        Prop {
            atoms: self.atoms.union(&other.atoms).copied().collect(),
        }
    }

    /// `self` entails `other` iff the atoms of `other` are contained in
    /// those of `self`.
    pub fn entails(&self, other: &Prop) -> bool {
        other.atoms.is_subset(&self.atoms)
    }
}

/// The meet of an arbitrary family of propositions; empty families give top.
pub fn meet_all<'a>(props: impl IntoIterator<Item = &'a Prop>) -> Prop {
    props
        .into_iter()
        .fold(Prop::top(), |acc, p| acc.meet(p))
}

/// The ambient proposition table of an elaboration session: a map from
/// proposition names to their atom-set denotations, together with the set of
/// atoms belonging to `abstract` definitions.
#[derive(Debug, Clone, Default)]
pub struct PropTable {
    entries: IndexMap<String, Prop>,
    hidden: BTreeSet<Atom>,
    next_atom: u32,
}

impl PropTable {
    pub fn new() -> PropTable {
        PropTable::default()
    }

    fn fresh_atom(&mut self) -> Atom {
        let a = Atom(self.next_atom);
        self.next_atom += 1;
        a
    }

    /// `prop name <= q`: allocate a fresh atom `a` and bind
    /// `name` to `{a} ∪ atoms(q)`.
    pub fn extend_le(&mut self, name: &str, q: &Prop) -> Result<Prop, PropError> {
        if self.entries.contains_key(name) {
            return Err(PropError::DuplicateProp(name.to_owned()));
        }
        let a = self.fresh_atom();
        let p = Prop::atom(a).meet(q);
        self.entries.insert(name.to_owned(), p.clone());
        Ok(p)
    }

    /// `prop name = q`: bind `name` to the atoms of `q`, with no fresh atom.
    pub fn extend_eq(&mut self, name: &str, q: &Prop) -> Result<Prop, PropError> {
        if self.entries.contains_key(name) {
            return Err(PropError::DuplicateProp(name.to_owned()));
        }
        self.entries.insert(name.to_owned(), q.clone());
        Ok(q.clone())
    }

    /// Mark every atom of `p` proper to an `abstract` definition as hidden.
    pub fn hide(&mut self, p: &Prop) {
        self.hidden.extend(p.atoms());
    }

    pub fn is_hidden_name(&self, name: &str) -> bool {
        match self.entries.get(name) {
            Some(p) => p.atoms().any(|a| self.hidden.contains(&a)),
            None => false,
        }
    }

    /// Lookup of an undeclared name is an error, never top.
    pub fn lookup(&self, name: &str) -> Result<&Prop, PropError> {
        self.entries
            .get(name)
            .ok_or_else(|| PropError::UnknownProp(name.to_owned()))
    }

    /// Does every atom of `p` come from this table's allocator?
    pub fn owns(&self, p: &Prop) -> bool {
        p.atoms().all(|a| a.0 < self.next_atom)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }

    /// Render a closed proposition using declared names: the exact name when
    /// one denotes precisely this atom set, otherwise a conjunction of the
    /// names owning each atom.
    pub fn display(&self, p: &Prop) -> String {
        if p.is_top() {
            return "⊤".to_owned();
        }
        for (name, q) in &self.entries {
            if q == p {
                return name.clone();
            }
        }
        // Fall back to the meet of the owners of each atom. The owner of an
        // atom is the (unique) entry whose extend_le allocated it, i.e. the
        // first entry containing it.
        let mut parts: Vec<&str> = Vec::new();
        for a in p.atoms() {
            if let Some((name, _)) = self.entries.iter().find(|(_, q)| q.atoms().any(|b| b == a)) {
                if !parts.contains(&name.as_str()) {
                    parts.push(name);
                }
            }
        }
        if parts.is_empty() {
            // Atoms with no named owner cannot arise from well-formed
            // signatures; print them raw for diagnostics.
            return p
                .atoms()
                .map(|a| format!("#{}", a.0))
                .collect::<Vec<_>>()
                .join(" ∧ ");
        }
        parts.join(" ∧ ")
    }
}

/// A finite disjunction of propositions in canonical antichain form; the
/// empty disjunction is false. This is the frontier of instability carried
/// by stuck neutrals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Frontier {
    disjuncts: Vec<Prop>,
}

impl Frontier {
    /// The false frontier: stable neutrals (variable heads, no outs).
    pub fn bottom() -> Frontier {
        Frontier::default()
    }

    pub fn is_bottom(&self) -> bool {
        self.disjuncts.is_empty()
    }

    pub fn disjuncts(&self) -> &[Prop] {
        &self.disjuncts
    }

    /// Add `p` as a disjunct, re-canonicalizing the antichain: a disjunct
    /// entailed by an existing one is absorbed, and existing disjuncts
    /// entailing the new one are dropped. Ties are broken by atom order.
    pub fn or(&self, p: &Prop) -> Frontier {
        if self.disjuncts.iter().any(|d| p.entails(d)) {
            return self.clone();
        }
        let mut disjuncts: Vec<Prop> = self
            .disjuncts
            .iter()
            .filter(|d| !d.entails(p))
            .cloned()
            .collect();
        disjuncts.push(p.clone());
        disjuncts.sort();
        Frontier { disjuncts }
    }

    pub fn or_frontier(&self, other: &Frontier) -> Frontier {
        other
            .disjuncts
            .iter()
            .fold(self.clone(), |acc, d| acc.or(d))
    }

    /// True under `hyps` iff some disjunct is entailed by `hyps`.
    pub fn is_true(&self, hyps: &Prop) -> bool {
        self.disjuncts.iter().any(|d| hyps.entails(d))
    }
}

impl fmt::Display for Frontier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.disjuncts.is_empty() {
            return write!(f, "⊥");
        }
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                write!(f, " ∨ ")?;
            }
            let atoms: Vec<String> = d.atoms().map(|a| format!("#{}", a.0)).collect();
            if atoms.is_empty() {
                write!(f, "⊤")?;
            } else {
                write!(f, "{}", atoms.join(" ∧ "))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table3() -> (PropTable, Prop, Prop, Prop) {
        let mut t = PropTable::new();
        let p = t.extend_le("p", &Prop::top()).unwrap();
        let q = t.extend_le("q", &Prop::top()).unwrap();
        let r = t.extend_le("r", &p).unwrap();
        (t, p, q, r)
    }

    #[test]
    fn top_is_unit() {
        let (_, p, _, _) = table3();
        assert_eq!(p.meet(&Prop::top()), p);
        assert!(Prop::top().entails(&Prop::top()));
        assert_eq!(Prop::top(), Prop::top().meet(&Prop::top()));
    }

    #[test]
    fn meet_laws() {
        let (_, p, q, r) = table3();
        assert_eq!(p.meet(&q), q.meet(&p));
        assert_eq!(p.meet(&q).meet(&r), p.meet(&q.meet(&r)));
        assert_eq!(p.meet(&p), p);
        assert!(p.meet(&q).entails(&p));
        assert!(p.meet(&q).entails(&q));
    }

    #[test]
    fn entails_iff_meet_absorbs() {
        let (_, p, q, r) = table3();
        for a in [&p, &q, &r] {
            for b in [&p, &q, &r] {
                assert_eq!(a.entails(b), &a.meet(b) == a);
            }
        }
    }

    #[test]
    fn extend_le_orders() {
        let (_, p, q, r) = table3();
        assert!(r.entails(&p));
        assert!(!p.entails(&r));
        assert!(!q.entails(&p));
    }

    #[test]
    fn extend_eq_bidirectional() {
        let mut t = PropTable::new();
        let p = t.extend_le("p", &Prop::top()).unwrap();
        let q = t.extend_le("q", &Prop::top()).unwrap();
        let pq = t.extend_eq("pq", &p.meet(&q)).unwrap();
        assert!(pq.entails(&p.meet(&q)));
        assert!(p.meet(&q).entails(&pq));
    }

    #[test]
    fn duplicate_prop_rejected() {
        let mut t = PropTable::new();
        t.extend_le("p", &Prop::top()).unwrap();
        assert!(matches!(
            t.extend_le("p", &Prop::top()),
            Err(PropError::DuplicateProp(_))
        ));
        assert!(matches!(
            t.extend_eq("p", &Prop::top()),
            Err(PropError::DuplicateProp(_))
        ));
    }

    #[test]
    fn lookup_undeclared_is_error() {
        let t = PropTable::new();
        assert!(t.lookup("nope").is_err());
    }

    #[test]
    fn frontier_absorption() {
        let (_, p, q, _) = table3();
        let f = Frontier::bottom().or(&p);
        assert_eq!(f.or(&p.meet(&q)), f);
        let g = f.or(&q);
        assert_eq!(g.disjuncts().len(), 2);
        // adding a weaker disjunct drops the stronger one
        let h = Frontier::bottom().or(&p.meet(&q)).or(&p);
        assert_eq!(h.disjuncts(), &[p.clone()]);
    }

    #[test]
    fn frontier_truth() {
        let (_, p, q, r) = table3();
        assert!(!Frontier::bottom().is_true(&p));
        let f = Frontier::bottom().or(&p);
        assert!(f.is_true(&p));
        assert!(f.is_true(&r)); // r <= p
        assert!(!f.is_true(&q));
        assert!(!f.is_true(&Prop::top()));
    }
}

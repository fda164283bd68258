//! Deterministic printer for core terms and signatures.
//!
//! Extension types print as `{A | p ↪ M}` and prop products as `{p} A`;
//! universe codes mirror the large formers with a trailing tick.

use crate::prop::{Prop, PropTable};
use crate::term::{Declaration, Signature, TeleEntry, Telescope, Term};

const PREC_ARROW: u8 = 0;
const PREC_APP: u8 = 1;
const PREC_ATOM: u8 = 2;

pub struct Printer<'a> {
    table: &'a PropTable,
}

impl<'a> Printer<'a> {
    pub fn new(table: &'a PropTable) -> Printer<'a> {
        Printer { table }
    }

    fn prop(&self, p: &Prop) -> String {
        self.table.display(p)
    }

    fn fresh(&self, names: &[String]) -> String {
        format!("x{}", names.len())
    }

    /// Print with `names` the binder names in scope, outermost first.
    pub fn term(&self, names: &[String], t: &Term) -> String {
        self.go(names, t, PREC_ARROW)
    }

    fn go(&self, names: &[String], t: &Term, prec: u8) -> String {
        let mut names = names.to_vec();
        match t {
            Term::Var(i) => {
                let n = names.len();
                names
                    .get(n.wrapping_sub(i + 1))
                    .cloned()
                    .unwrap_or_else(|| format!("!{i}"))
            }
            Term::Const(c) => c.clone(),
            Term::Pi(a, b) => {
                let x = self.fresh(&names);
                let dom = self.go(&names, a, PREC_APP);
                let head = if mentions_var0(b) {
                    format!("({} : {})", x, self.go(&names, a, PREC_ARROW))
                } else {
                    dom
                };
                names.push(x);
                let s = format!("{} -> {}", head, self.go(&names, b, PREC_ARROW));
                paren(prec > PREC_ARROW, s)
            }
            Term::Lam(b) => {
                let x = self.fresh(&names);
                names.push(x.clone());
                let s = format!("λ {}. {}", x, self.go(&names, b, PREC_ARROW));
                paren(prec > PREC_ARROW, s)
            }
            Term::App(f, a) => {
                let s = format!(
                    "{} {}",
                    self.go(&names, f, PREC_APP),
                    self.go(&names, a, PREC_ATOM)
                );
                paren(prec > PREC_APP, s)
            }
            Term::Nat => "Nat".into(),
            Term::Zero => "ze".into(),
            Term::Suc(n) => {
                // print literal chains as numerals
                if let Some(k) = nat_literal(t) {
                    return k.to_string();
                }
                let s = format!("su {}", self.go(&names, n, PREC_ATOM));
                paren(prec > PREC_APP, s)
            }
            Term::NatElim(c, b, s, tgt) => {
                let x = self.fresh(&names);
                let mut names_c = names.clone();
                names_c.push(x.clone());
                let k = x.clone();
                let mut names_s = names.clone();
                names_s.push(format!("{k}"));
                names_s.push(format!("ih{}", names.len()));
                let out = format!(
                    "natelim ({}. {}) {} ({} {}. {}) {}",
                    x,
                    self.go(&names_c, c, PREC_ARROW),
                    self.go(&names, b, PREC_ATOM),
                    names_s[names_s.len() - 2],
                    names_s[names_s.len() - 1],
                    self.go(&names_s, s, PREC_ARROW),
                    self.go(&names, tgt, PREC_ATOM)
                );
                paren(prec > PREC_APP, out)
            }
            Term::Id(a, x, y) => {
                let s = format!(
                    "Id {} {} {}",
                    self.go(&names, a, PREC_ATOM),
                    self.go(&names, x, PREC_ATOM),
                    self.go(&names, y, PREC_ATOM)
                );
                paren(prec > PREC_APP, s)
            }
            Term::Refl(x) => {
                let s = format!("refl {}", self.go(&names, x, PREC_ATOM));
                paren(prec > PREC_APP, s)
            }
            Term::J(c, r, tgt) => {
                let y = self.fresh(&names);
                let mut names_c = names.clone();
                names_c.push(y.clone());
                let e = format!("e{}", names.len());
                names_c.push(e.clone());
                let s = format!(
                    "j ({} {}. {}) {} {}",
                    y,
                    e,
                    self.go(&names_c, c, PREC_ARROW),
                    self.go(&names, r, PREC_ATOM),
                    self.go(&names, tgt, PREC_ATOM)
                );
                paren(prec > PREC_APP, s)
            }
            Term::Univ => "U".into(),
            Term::El(c) => {
                let s = format!("El {}", self.go(&names, c, PREC_ATOM));
                paren(prec > PREC_APP, s)
            }
            Term::PiCode(a, b) => {
                let x = self.fresh(&names);
                let head = if mentions_var0(b) {
                    format!("({} : {})", x, self.go(&names, a, PREC_ARROW))
                } else {
                    self.go(&names, a, PREC_APP)
                };
                names.push(x);
                let s = format!("{} ->' {}", head, self.go(&names, b, PREC_ARROW));
                paren(prec > PREC_ARROW, s)
            }
            Term::NatCode => "Nat'".into(),
            Term::IdCode(a, x, y) => {
                let s = format!(
                    "Id' {} {} {}",
                    self.go(&names, a, PREC_ATOM),
                    self.go(&names, x, PREC_ATOM),
                    self.go(&names, y, PREC_ATOM)
                );
                paren(prec > PREC_APP, s)
            }
            Term::ExtCode(a, p, m) => format!(
                "{{{} | {} ↪ {}}}'",
                self.go(&names, a, PREC_ARROW),
                self.prop(p),
                self.go(&names, m, PREC_ARROW)
            ),
            Term::PropPiCode(p, b) => {
                let s = format!("{{{}}}' {}", self.prop(p), self.go(&names, b, PREC_APP));
                paren(prec > PREC_APP, s)
            }
            Term::PropPi(p, b) => {
                let s = format!("{{{}}} {}", self.prop(p), self.go(&names, b, PREC_APP));
                paren(prec > PREC_APP, s)
            }
            Term::PropLam(p, b) => {
                let s = format!("gl[{}] {}", self.prop(p), self.go(&names, b, PREC_ATOM));
                paren(prec > PREC_APP, s)
            }
            Term::PropApp(f, p) => {
                let s = format!("{} @[{}]", self.go(&names, f, PREC_APP), self.prop(p));
                paren(prec > PREC_APP, s)
            }
            Term::Ext(a, p, m) => format!(
                "{{{} | {} ↪ {}}}",
                self.go(&names, a, PREC_ARROW),
                self.prop(p),
                self.go(&names, m, PREC_ARROW)
            ),
            Term::In(p, a) => {
                let s = format!("in[{}] {}", self.prop(p), self.go(&names, a, PREC_ATOM));
                paren(prec > PREC_APP, s)
            }
            Term::Out(p, a) => {
                let s = format!("out[{}] {}", self.prop(p), self.go(&names, a, PREC_ATOM));
                paren(prec > PREC_APP, s)
            }
        }
    }

    pub fn telescope_names(&self, tele: &Telescope) -> Vec<String> {
        tele.entries()
            .iter()
            .filter_map(|e| match e {
                TeleEntry::TermVar { name, .. } => Some(name.clone()),
                TeleEntry::PropHyp(_) => None,
            })
            .collect()
    }

    pub fn telescope(&self, tele: &Telescope) -> String {
        let mut parts = Vec::new();
        let mut names: Vec<String> = Vec::new();
        for e in tele.entries() {
            match e {
                TeleEntry::TermVar { name, ty } => {
                    parts.push(format!("{} : {}", name, self.term(&names, ty)));
                    names.push(name.clone());
                }
                TeleEntry::PropHyp(p) => parts.push(self.prop(p)),
            }
        }
        parts.join(", ")
    }

    pub fn declaration(&self, d: &Declaration) -> String {
        match d {
            Declaration::Const { name, ty } => {
                format!("const {} : {}", name, self.term(&[], ty))
            }
            Declaration::PropLe { name, rhs } => {
                format!("prop {} ≤ {}", name, rhs_str(rhs))
            }
            Declaration::PropEq { name, rhs } => {
                format!("prop {} = {}", name, rhs_str(rhs))
            }
        }
    }

    pub fn signature(&self, sig: &Signature) -> String {
        let mut out = String::new();
        for d in &sig.decls {
            out.push_str(&self.declaration(d));
            out.push('\n');
        }
        out
    }
}

fn rhs_str(rhs: &[String]) -> String {
    if rhs.is_empty() {
        "⊤".to_owned()
    } else {
        rhs.join(" ∧ ")
    }
}

fn paren(cond: bool, s: String) -> String {
    if cond {
        format!("({s})")
    } else {
        s
    }
}

fn nat_literal(t: &Term) -> Option<u64> {
    match t {
        Term::Zero => Some(0),
        Term::Suc(n) => nat_literal(n).map(|k| k + 1),
        _ => None,
    }
}

/// Does the body of a binder mention the bound variable (index 0)?
fn mentions_var0(t: &Term) -> bool {
    fn go(t: &Term, depth: usize) -> bool {
        use Term::*;
        match t {
            Var(i) => *i == depth,
            Const(_) | Nat | Zero | Univ | NatCode => false,
            Suc(a) | Refl(a) | El(a) | In(_, a) | Out(_, a) | PropApp(a, _) => go(a, depth),
            PropPi(_, a) | PropLam(_, a) | PropPiCode(_, a) => go(a, depth),
            Lam(a) => go(a, depth + 1),
            Pi(a, b) | PiCode(a, b) => go(a, depth) || go(b, depth + 1),
            App(a, b) => go(a, depth) || go(b, depth),
            Ext(a, _, b) | ExtCode(a, _, b) => go(a, depth) || go(b, depth),
            Id(a, x, y) | IdCode(a, x, y) => go(a, depth) || go(x, depth) || go(y, depth),
            J(c, r, t) => go(c, depth + 2) || go(r, depth) || go(t, depth),
            NatElim(c, b, s, t) => {
                go(c, depth + 1) || go(b, depth) || go(s, depth + 2) || go(t, depth)
            }
        }
    }
    go(t, 0)
}

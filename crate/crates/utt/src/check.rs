//! The trusted kernel: signature well-formedness and bidirectional checking
//! of core terms, with all equality side conditions decided by NbE.

use std::rc::Rc;

use crate::error::TypeError;
use crate::nbe::{
    self, conv, conv_type, eval, force, fresh_var, readback, readback_type, Env, ReadbackCx,
    SigEnv, Value,
};
use crate::pretty::Printer;
use crate::prop::{Prop, PropTable};
use crate::term::{Declaration, Signature, Telescope, Term};

/// Checking context: the semantic types of the term variables in scope
/// (outermost first) and the evaluation environment of fresh variables.
#[derive(Clone)]
pub struct Cx {
    tys: Vec<Rc<Value>>,
    pub env: Env,
}

impl Cx {
    pub fn empty() -> Cx {
        Cx {
            tys: Vec::new(),
            env: Env::new(Prop::top()),
        }
    }

    pub fn from_telescope(sig: &SigEnv, tele: &Telescope) -> Cx {
        let mut cx = Cx::empty();
        for entry in tele.entries() {
            match entry {
                crate::term::TeleEntry::TermVar { ty, .. } => {
                    let tyv = eval(sig, &cx.env, ty);
                    cx = cx.bind_var(tyv);
                }
                crate::term::TeleEntry::PropHyp(p) => {
                    cx = cx.bind_hyp(p);
                }
            }
        }
        cx
    }

    pub fn size(&self) -> usize {
        self.env.len()
    }

    pub fn hyps(&self) -> &Prop {
        &self.env.hyps
    }

    pub fn bind_var(&self, ty: Rc<Value>) -> Cx {
        let mut cx = self.clone();
        let v = fresh_var(cx.env.len(), ty.clone());
        cx.tys.push(ty);
        cx.env = cx.env.extended(v);
        cx
    }

    pub fn bind_hyp(&self, p: &Prop) -> Cx {
        let mut cx = self.clone();
        cx.env = cx.env.with_hyp(p);
        cx
    }

    fn var_type(&self, idx: usize) -> Option<&Rc<Value>> {
        let n = self.tys.len();
        self.tys.get(n.checked_sub(idx + 1)?)
    }
}

pub struct Checker<'a> {
    pub table: &'a PropTable,
    pub sig: &'a SigEnv,
}

impl<'a> Checker<'a> {
    pub fn new(table: &'a PropTable, sig: &'a SigEnv) -> Checker<'a> {
        Checker { table, sig }
    }

    fn rbcx(&self, cx: &Cx) -> ReadbackCx<'_> {
        ReadbackCx::new(self.sig, cx.size(), cx.hyps().clone())
    }

    fn show_ty(&self, cx: &Cx, ty: &Rc<Value>) -> String {
        let t = readback_type(&self.rbcx(cx), ty);
        Printer::new(self.table).term(&placeholder_names(cx.size()), &t)
    }

    fn show_tm(&self, cx: &Cx, ty: &Rc<Value>, v: &Rc<Value>) -> String {
        let t = readback(&self.rbcx(cx), ty, v);
        Printer::new(self.table).term(&placeholder_names(cx.size()), &t)
    }

    /// Is `a` a well-formed type in `cx`?
    pub fn check_type(&self, cx: &Cx, a: &Term) -> Result<(), TypeError> {
        match a {
            Term::Nat | Term::Univ => Ok(()),
            Term::Pi(dom, cod) => {
                self.check_type(cx, dom)?;
                let domv = eval(self.sig, &cx.env, dom);
                self.check_type(&cx.bind_var(domv), cod)
            }
            Term::Id(ty, x, y) => {
                self.check_type(cx, ty)?;
                let tyv = eval(self.sig, &cx.env, ty);
                self.check(cx, x, &tyv)?;
                self.check(cx, y, &tyv)
            }
            Term::El(code) => self.check(cx, code, &Rc::new(Value::Univ)),
            Term::PropPi(p, body) => self.check_type(&cx.bind_hyp(p), body),
            Term::Ext(ty, p, boundary) => {
                self.check_type(cx, ty)?;
                let tyv = eval(self.sig, &cx.env, ty);
                self.check(&cx.bind_hyp(p), boundary, &tyv)
            }
            _ => Err(TypeError::NotAType(
                Printer::new(self.table).term(&placeholder_names(cx.size()), a),
            )),
        }
    }

    /// Synthesize a type for `m`.
    pub fn infer(&self, cx: &Cx, m: &Term) -> Result<Rc<Value>, TypeError> {
        match m {
            Term::Var(i) => cx
                .var_type(*i)
                .cloned()
                .ok_or(TypeError::UnboundVariable),
            Term::Const(c) => self
                .sig
                .get(c)
                .cloned()
                .ok_or_else(|| TypeError::UnknownConst(c.clone())),
            Term::App(f, a) => {
                let fty = force(self.sig, cx.hyps(), &self.infer(cx, f)?);
                match &*fty {
                    Value::Pi(dom, cod) => {
                        self.check(cx, a, dom)?;
                        let av = eval(self.sig, &cx.env, a);
                        Ok(cod.apply(self.sig, av))
                    }
                    _ => Err(TypeError::TypeMismatch {
                        expected: "a function type".into(),
                        found: self.show_ty(cx, &fty),
                    }),
                }
            }
            Term::Zero => Ok(Rc::new(Value::Nat)),
            Term::Suc(n) => {
                self.check(cx, n, &Rc::new(Value::Nat))?;
                Ok(Rc::new(Value::Nat))
            }
            Term::NatElim(motive, base, step, target) => {
                self.check(cx, target, &Rc::new(Value::Nat))?;
                let cx_n = cx.bind_var(Rc::new(Value::Nat));
                self.check_type(&cx_n, motive)?;
                let mot = nbe::Closure {
                    env: cx.env.clone(),
                    body: (**motive).clone(),
                };
                self.check(cx, base, &mot.apply(self.sig, Rc::new(Value::Zero)))?;
                let k = fresh_var(cx.size(), Rc::new(Value::Nat));
                let cx_k = cx.bind_var(Rc::new(Value::Nat));
                let cx_kih = cx_k.bind_var(mot.apply(self.sig, k.clone()));
                self.check(
                    &cx_kih,
                    step,
                    &mot.apply(self.sig, Rc::new(Value::Suc(k))),
                )?;
                let tv = eval(self.sig, &cx.env, target);
                Ok(mot.apply(self.sig, tv))
            }
            Term::Refl(x) => {
                let ty = self.infer(cx, x)?;
                let xv = eval(self.sig, &cx.env, x);
                Ok(Rc::new(Value::Id(ty, xv.clone(), xv)))
            }
            Term::J(motive, refl_case, target) => {
                let tty = force(self.sig, cx.hyps(), &self.infer(cx, target)?);
                let Value::Id(a, x, y) = &*tty else {
                    return Err(TypeError::TypeMismatch {
                        expected: "an identity type".into(),
                        found: self.show_ty(cx, &tty),
                    });
                };
                let cx_y = cx.bind_var(a.clone());
                let yv = fresh_var(cx.size(), a.clone());
                let cx_ye =
                    cx_y.bind_var(Rc::new(Value::Id(a.clone(), x.clone(), yv)));
                self.check_type(&cx_ye, motive)?;
                let mot = nbe::Closure2 {
                    env: cx.env.clone(),
                    body: (**motive).clone(),
                };
                let refl_ty =
                    mot.apply(self.sig, x.clone(), Rc::new(Value::Refl(x.clone())));
                self.check(cx, refl_case, &refl_ty)?;
                let tv = eval(self.sig, &cx.env, target);
                Ok(mot.apply(self.sig, y.clone(), tv))
            }
            Term::PropApp(f, p) => {
                let fty = force(self.sig, cx.hyps(), &self.infer(cx, f)?);
                match &*fty {
                    Value::PropPi(q, cod) => {
                        if p != q {
                            return Err(TypeError::TypeMismatch {
                                expected: format!("{{{}}} _", self.table.display(q)),
                                found: format!("_ @[{}]", self.table.display(p)),
                            });
                        }
                        if !cx.hyps().entails(p) {
                            return Err(TypeError::PropNotTrue(self.table.display(p)));
                        }
                        Ok(cod.force(self.sig, cx.hyps()))
                    }
                    _ => Err(TypeError::TypeMismatch {
                        expected: "a prop-product type".into(),
                        found: self.show_ty(cx, &fty),
                    }),
                }
            }
            Term::Out(p, a) => {
                let aty = force(self.sig, cx.hyps(), &self.infer(cx, a)?);
                match &*aty {
                    Value::Ext(inner, q, _) if p == q => Ok(inner.clone()),
                    _ => Err(TypeError::TypeMismatch {
                        expected: format!("an extension type along {}", self.table.display(p)),
                        found: self.show_ty(cx, &aty),
                    }),
                }
            }
            Term::PiCode(a, b) => {
                let univ = Rc::new(Value::Univ);
                self.check(cx, a, &univ)?;
                let av = eval(self.sig, &cx.env, a);
                let dom = nbe::do_el(self.sig, cx.hyps(), &av);
                self.check(&cx.bind_var(dom), b, &univ)?;
                Ok(univ)
            }
            Term::NatCode => Ok(Rc::new(Value::Univ)),
            Term::IdCode(a, x, y) => {
                let univ = Rc::new(Value::Univ);
                self.check(cx, a, &univ)?;
                let av = eval(self.sig, &cx.env, a);
                let ela = nbe::do_el(self.sig, cx.hyps(), &av);
                self.check(cx, x, &ela)?;
                self.check(cx, y, &ela)?;
                Ok(univ)
            }
            Term::ExtCode(a, p, boundary) => {
                let univ = Rc::new(Value::Univ);
                self.check(cx, a, &univ)?;
                let av = eval(self.sig, &cx.env, a);
                let cx2 = cx.bind_hyp(p);
                let ela = nbe::do_el(self.sig, cx2.hyps(), &av);
                self.check(&cx2, boundary, &ela)?;
                Ok(univ)
            }
            Term::PropPiCode(p, b) => {
                let univ = Rc::new(Value::Univ);
                self.check(&cx.bind_hyp(p), b, &univ)?;
                Ok(univ)
            }
            _ => Err(TypeError::CannotInfer),
        }
    }

    /// Check `m` against the type value `ty`.
    pub fn check(&self, cx: &Cx, m: &Term, ty: &Rc<Value>) -> Result<(), TypeError> {
        let ty = force(self.sig, cx.hyps(), ty);
        match (m, &*ty) {
            (Term::Lam(body), Value::Pi(dom, cod)) => {
                let x = fresh_var(cx.size(), dom.clone());
                let cx2 = cx.bind_var(dom.clone());
                self.check(&cx2, body, &cod.apply(self.sig, x))
            }
            (Term::PropLam(p, body), Value::PropPi(q, cod)) => {
                if p != q {
                    return Err(TypeError::TypeMismatch {
                        expected: self.show_ty(cx, &ty),
                        found: format!("gl[{}] _", self.table.display(p)),
                    });
                }
                let cx2 = cx.bind_hyp(p);
                self.check(&cx2, body, &cod.force(self.sig, cx2.hyps()))
            }
            (Term::In(p, a), Value::Ext(inner, q, boundary)) => {
                if p != q {
                    return Err(TypeError::TypeMismatch {
                        expected: self.show_ty(cx, &ty),
                        found: format!("in[{}] _", self.table.display(p)),
                    });
                }
                self.check(cx, a, inner)?;
                // the boundary condition: under p, the term equals the boundary
                let cx2 = cx.bind_hyp(p);
                let av = eval(self.sig, &cx2.env, a);
                let bv = boundary.force(self.sig, cx2.hyps());
                if !conv(&self.rbcx(&cx2), inner, &av, &bv) {
                    return Err(TypeError::BoundaryMismatch {
                        lhs: self.show_tm(&cx2, inner, &av),
                        rhs: self.show_tm(&cx2, inner, &bv),
                    });
                }
                Ok(())
            }
            (Term::Refl(x), Value::Id(a, l, r)) => {
                self.check(cx, x, a)?;
                let xv = eval(self.sig, &cx.env, x);
                if !conv(&self.rbcx(cx), a, &xv, l) || !conv(&self.rbcx(cx), a, &xv, r) {
                    return Err(TypeError::TypeMismatch {
                        expected: self.show_ty(cx, &ty),
                        found: format!("refl {}", self.show_tm(cx, a, &xv)),
                    });
                }
                Ok(())
            }
            _ => {
                let inferred = self.infer(cx, m)?;
                if conv_type(&self.rbcx(cx), &inferred, &ty) {
                    Ok(())
                } else {
                    Err(TypeError::TypeMismatch {
                        expected: self.show_ty(cx, &ty),
                        found: self.show_ty(cx, &inferred),
                    })
                }
            }
        }
    }
}

fn placeholder_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// Check a signature left to right, producing the proposition table, the
/// context of constants, and the evaluated signature.
pub fn check_signature(
    signature: &Signature,
) -> Result<(PropTable, Telescope, SigEnv), TypeError> {
    let mut table = PropTable::new();
    let mut tele = Telescope::new();
    let mut sigenv = SigEnv::new();
    for decl in &signature.decls {
        check_declaration(decl, &mut table, &mut tele, &mut sigenv)?;
    }
    Ok((table, tele, sigenv))
}

/// Check one declaration against the accumulated state, extending it.
pub fn check_declaration(
    decl: &Declaration,
    table: &mut PropTable,
    tele: &mut Telescope,
    sigenv: &mut SigEnv,
) -> Result<(), TypeError> {
    match decl {
        Declaration::Const { name, ty } => {
            if sigenv.get(name).is_some() {
                return Err(TypeError::DuplicateConst(name.clone()));
            }
            if !props_in_scope(ty, table) {
                return Err(TypeError::IllTypedDecl {
                    name: name.clone(),
                    reason: "type mentions an undeclared proposition".into(),
                });
            }
            let checker = Checker::new(table, sigenv);
            checker
                .check_type(&Cx::empty(), ty)
                .map_err(|e| TypeError::IllTypedDecl {
                    name: name.clone(),
                    reason: e.to_string(),
                })?;
            let tyv = eval(sigenv, &Env::new(Prop::top()), ty);
            sigenv.insert(name, tyv);
            tele.push_var(name.clone(), ty.clone());
        }
        Declaration::PropLe { name, rhs } => {
            let q = resolve_rhs(table, rhs).map_err(|reason| TypeError::IllTypedDecl {
                name: name.clone(),
                reason,
            })?;
            table.extend_le(name, &q)?;
        }
        Declaration::PropEq { name, rhs } => {
            let q = resolve_rhs(table, rhs).map_err(|reason| TypeError::IllTypedDecl {
                name: name.clone(),
                reason,
            })?;
            table.extend_eq(name, &q)?;
        }
    }
    Ok(())
}

fn resolve_rhs(table: &PropTable, rhs: &[String]) -> Result<Prop, String> {
    let mut p = Prop::top();
    for name in rhs {
        let q = table
            .lookup(name)
            .map_err(|_| format!("unknown proposition `{name}`"))?;
        p = p.meet(q);
    }
    Ok(p)
}

/// Every atom embedded in the term must already be allocated by the table.
fn props_in_scope(t: &Term, table: &PropTable) -> bool {
    let mut ok = true;
    visit_props(t, &mut |p| {
        if !table.owns(p) {
            ok = false;
        }
    });
    ok
}

fn visit_props(t: &Term, f: &mut impl FnMut(&Prop)) {
    use Term::*;
    match t {
        Var(_) | Const(_) | Nat | Zero | Univ | NatCode => {}
        Suc(a) | Refl(a) | El(a) | Lam(a) => visit_props(a, f),
        Pi(a, b) | App(a, b) | PiCode(a, b) => {
            visit_props(a, f);
            visit_props(b, f);
        }
        NatElim(a, b, c, d) => {
            visit_props(a, f);
            visit_props(b, f);
            visit_props(c, f);
            visit_props(d, f);
        }
        Id(a, b, c) | IdCode(a, b, c) | J(a, b, c) => {
            visit_props(a, f);
            visit_props(b, f);
            visit_props(c, f);
        }
        ExtCode(a, p, b) | Ext(a, p, b) => {
            f(p);
            visit_props(a, f);
            visit_props(b, f);
        }
        PropPiCode(p, a) | PropPi(p, a) | PropLam(p, a) => {
            f(p);
            visit_props(a, f);
        }
        PropApp(a, p) => {
            f(p);
            visit_props(a, f);
        }
        In(p, a) | Out(p, a) => {
            f(p);
            visit_props(a, f);
        }
    }
}

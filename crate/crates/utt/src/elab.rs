//! Elaboration of surface programs into core signatures.
//!
//! Each definition contributes a proposition declaration and an
//! extension-typed constant whose boundary is the definition's body. A
//! `def t unfolds k1 .. kn` elaborates its body under the hypothesis that
//! every `ki` unfolds; `abbreviation` identifies the new proposition with
//! that conjunction, and `abstract` names it by a gensym that surface
//! programs cannot mention. `unfold .. in e` hoists a fresh constant
//! closed over the local telescope and projects it at the use site.

use std::rc::Rc;

use indexmap::IndexMap;

use crate::check::check_declaration;
use crate::error::{ElabError, Span, TypeError};
use crate::nbe::{
    self, eval, fresh_var, readback, readback_type, Closure, Closure2, Env, ReadbackCx, SigEnv,
    Value,
};
use crate::pretty::Printer;
use crate::prop::{Prop, PropTable};
use crate::surface::{Def, Expr, ExprKind, Program};
use crate::term::{Declaration, Signature, TeleEntry, Telescope, Term};

/// A hole recorded during elaboration.
#[derive(Debug, Clone)]
pub struct Goal {
    /// Display index, in source order.
    pub index: usize,
    /// The postulated constant standing in for this hole.
    pub const_name: String,
    pub span: Span,
    /// The local telescope at the hole.
    pub tele: Telescope,
    /// Expected type, normalized relative to the telescope's hypotheses.
    pub ty: Term,
    /// Expected type without applying the hypotheses' collapses.
    pub raw_ty: Term,
}

#[derive(Debug, Clone)]
enum Target {
    /// A public definition: the name of its unfolding proposition.
    Prop(String),
    /// An abstract definition; its proposition is unmentionable.
    Hidden,
}

/// Local elaboration context: one entry per surface binder, plus the
/// hypotheses in scope.
#[derive(Clone)]
struct LocalCx {
    names: Vec<String>,
    var_tys: Vec<Rc<Value>>,
    tele: Telescope,
    env: Env,
}

impl LocalCx {
    fn empty() -> LocalCx {
        LocalCx {
            names: Vec::new(),
            var_tys: Vec::new(),
            tele: Telescope::new(),
            env: Env::new(Prop::top()),
        }
    }

    fn hyps(&self) -> &Prop {
        &self.env.hyps
    }

    fn size(&self) -> usize {
        self.env.len()
    }

    fn bind_var(&self, name: &str, ty_tm: Term, ty_v: Rc<Value>) -> LocalCx {
        let mut cx = self.clone();
        let v = fresh_var(cx.env.len(), ty_v.clone());
        cx.names.push(name.to_owned());
        cx.var_tys.push(ty_v);
        cx.tele.push_var(name, ty_tm);
        cx.env = cx.env.extended(v);
        cx
    }

    fn bind_hyp(&self, p: &Prop) -> LocalCx {
        let mut cx = self.clone();
        cx.tele.push_hyp(p.clone());
        cx.env = cx.env.with_hyp(p);
        cx
    }

    fn lookup(&self, name: &str) -> Option<(usize, Rc<Value>)> {
        let pos = self.names.iter().rposition(|n| n == name)?;
        let idx = self.names.len() - 1 - pos;
        Some((idx, self.var_tys[pos].clone()))
    }
}

#[derive(Debug)]
pub struct Elaborator {
    pub signature: Signature,
    pub table: PropTable,
    pub consts: Telescope,
    pub sig_env: SigEnv,
    pub goals: Vec<Goal>,
    targets: IndexMap<String, Target>,
    next_unfold: u32,
    next_abs: u32,
    next_hole: u32,
}

impl Default for Elaborator {
    fn default() -> Elaborator {
        Elaborator::new()
    }
}

impl Elaborator {
    pub fn new() -> Elaborator {
        Elaborator {
            signature: Signature::new(),
            table: PropTable::new(),
            consts: Telescope::new(),
            sig_env: SigEnv::new(),
            goals: Vec::new(),
            targets: IndexMap::new(),
            next_unfold: 0,
            next_abs: 0,
            next_hole: 0,
        }
    }

    pub fn elab_program(&mut self, prog: &Program) -> Result<(), ElabError> {
        for d in &prog.defs {
            self.elab_def(d)?;
        }
        Ok(())
    }

    pub fn goals(&self) -> &[Goal] {
        &self.goals
    }

    /// The unfolding proposition of a public definition.
    pub fn prop_of_def(&self, name: &str) -> Option<&Prop> {
        match self.targets.get(name)? {
            Target::Prop(pname) => self.table.lookup(pname).ok(),
            Target::Hidden => None,
        }
    }

    fn push_decl(&mut self, d: Declaration, span: Span) -> Result<(), ElabError> {
        check_declaration(&d, &mut self.table, &mut self.consts, &mut self.sig_env)
            .map_err(|err| ElabError::Kernel { err, span })?;
        self.signature.push(d);
        Ok(())
    }

    fn resolve_unfolds(
        &self,
        names: &[(String, Span)],
    ) -> Result<(Prop, Vec<String>), ElabError> {
        let mut r = Prop::top();
        let mut rhs = Vec::new();
        for (k, span) in names {
            match self.targets.get(k) {
                None => {
                    return Err(ElabError::UnknownUnfoldTarget {
                        name: k.clone(),
                        span: *span,
                    })
                }
                Some(Target::Hidden) => {
                    return Err(ElabError::AbstractUnfoldTarget {
                        name: k.clone(),
                        span: *span,
                    })
                }
                Some(Target::Prop(pname)) => {
                    r = r.meet(self.table.lookup(pname).expect("target prop declared"));
                    if !rhs.contains(pname) {
                        rhs.push(pname.clone());
                    }
                }
            }
        }
        Ok((r, rhs))
    }

    pub fn elab_def(&mut self, d: &Def) -> Result<(), ElabError> {
        if d.is_abbreviation && d.is_abstract {
            return Err(ElabError::AbbrvAbstractConflict { span: d.span });
        }
        if self.targets.contains_key(&d.name) || self.sig_env.get(&d.name).is_some() {
            return Err(ElabError::DuplicateDef {
                name: d.name.clone(),
                span: d.name_span,
            });
        }
        let (r, rhs) = self.resolve_unfolds(&d.unfolds)?;
        let cx0 = LocalCx::empty();
        let ty_tm = self.elab_type(&cx0, &d.ty)?;
        let ty_v = eval(&self.sig_env, &Env::new(Prop::top()), &ty_tm);
        let cxb = if r.is_top() { cx0 } else { cx0.bind_hyp(&r) };
        let body_tm = self.check_expr(&cxb, &d.body, &ty_v)?;
        let pname = if d.is_abstract {
            let n = self.next_abs;
            self.next_abs += 1;
            format!("%abs.{n}")
        } else {
            d.name.clone()
        };
        let pdecl = if d.is_abbreviation {
            Declaration::PropEq {
                name: pname.clone(),
                rhs,
            }
        } else {
            Declaration::PropLe {
                name: pname.clone(),
                rhs,
            }
        };
        self.push_decl(pdecl, d.span)?;
        let p = self
            .table
            .lookup(&pname)
            .expect("prop just declared")
            .clone();
        if d.is_abstract {
            // hide only the freshly allocated atom, not the atoms inherited
            // from the unfolds list
            let inherited: std::collections::BTreeSet<_> = r.atoms().collect();
            let fresh = Prop::from_atoms(p.atoms().filter(|a| !inherited.contains(a)));
            self.table.hide(&fresh);
            self.targets.insert(d.name.clone(), Target::Hidden);
        } else {
            self.targets.insert(d.name.clone(), Target::Prop(pname));
        }
        let cdecl = Declaration::Const {
            name: d.name.clone(),
            ty: Term::Ext(Box::new(ty_tm), p, Box::new(body_tm)),
        };
        self.push_decl(cdecl, d.span)
    }

    fn rbcx(&self, cx: &LocalCx) -> ReadbackCx<'_> {
        ReadbackCx::new(&self.sig_env, cx.size(), cx.hyps().clone())
    }

    fn show_ty(&self, cx: &LocalCx, ty: &Rc<Value>) -> String {
        let t = readback_type(&self.rbcx(cx), ty);
        Printer::new(&self.table).term(&cx.names, &t)
    }

    fn show_tm(&self, cx: &LocalCx, ty: &Rc<Value>, v: &Rc<Value>) -> String {
        let t = readback(&self.rbcx(cx), ty, v);
        Printer::new(&self.table).term(&cx.names, &t)
    }

    fn eval_local(&self, cx: &LocalCx, t: &Term) -> Rc<Value> {
        eval(&self.sig_env, &cx.env, t)
    }

    /// Elaborate a surface expression as a type.
    fn elab_type(&mut self, cx: &LocalCx, e: &Expr) -> Result<Term, ElabError> {
        match &e.kind {
            ExprKind::Nat => Ok(Term::Nat),
            ExprKind::Univ => Ok(Term::Univ),
            ExprKind::Pi(x, a, b) => {
                let a_tm = self.elab_type(cx, a)?;
                let a_v = self.eval_local(cx, &a_tm);
                let cx2 = cx.bind_var(x, a_tm.clone(), a_v);
                let b_tm = self.elab_type(&cx2, b)?;
                Ok(Term::Pi(Box::new(a_tm), Box::new(b_tm)))
            }
            ExprKind::Arrow(a, b) => {
                let a_tm = self.elab_type(cx, a)?;
                let a_v = self.eval_local(cx, &a_tm);
                let cx2 = cx.bind_var("_", a_tm.clone(), a_v);
                let b_tm = self.elab_type(&cx2, b)?;
                Ok(Term::Pi(Box::new(a_tm), Box::new(b_tm)))
            }
            ExprKind::App(..) => {
                let (head, args) = spine(e);
                match (&head.kind, args.as_slice()) {
                    (ExprKind::IdKw, [a, x, y]) => {
                        let a_tm = self.elab_type(cx, a)?;
                        let a_v = self.eval_local(cx, &a_tm);
                        let x_tm = self.check_expr(cx, x, &a_v)?;
                        let y_tm = self.check_expr(cx, y, &a_v)?;
                        Ok(Term::Id(Box::new(a_tm), Box::new(x_tm), Box::new(y_tm)))
                    }
                    (ExprKind::ElKw, [c]) => {
                        let c_tm = self.check_expr(cx, c, &Rc::new(Value::Univ))?;
                        Ok(Term::El(Box::new(c_tm)))
                    }
                    _ => self.type_via_code(cx, e),
                }
            }
            _ => self.type_via_code(cx, e),
        }
    }

    /// A type given by an element of the universe.
    fn type_via_code(&mut self, cx: &LocalCx, e: &Expr) -> Result<Term, ElabError> {
        let c = self.check_expr(cx, e, &Rc::new(Value::Univ))?;
        Ok(Term::El(Box::new(c)))
    }

    fn check_expr(
        &mut self,
        cx: &LocalCx,
        e: &Expr,
        expected: &Rc<Value>,
    ) -> Result<Term, ElabError> {
        let expected = nbe::force(&self.sig_env, cx.hyps(), expected);
        match (&e.kind, &*expected) {
            (ExprKind::Hole, _) => self.elab_hole(cx, e.span, &expected),
            (ExprKind::Unfold(names, body), _) => {
                self.elab_unfold(cx, names, body, &expected, e.span)
            }
            (ExprKind::Fun(params, body), _) => {
                let mut cx = cx.clone();
                let mut expected = expected.clone();
                for (x, xsp) in params {
                    let exp = nbe::force(&self.sig_env, cx.hyps(), &expected);
                    let Value::Pi(dom, cod) = &*exp else {
                        return Err(ElabError::ConvMismatch {
                            expected: self.show_ty(&cx, &exp),
                            found: "a function".into(),
                            span: *xsp,
                        });
                    };
                    let dom_tm = readback_type(&self.rbcx(&cx), dom);
                    let v = fresh_var(cx.size(), dom.clone());
                    expected = cod.apply(&self.sig_env, v);
                    cx = cx.bind_var(x, dom_tm, dom.clone());
                }
                let mut body_tm = self.check_expr(&cx, body, &expected)?;
                for _ in params {
                    body_tm = Term::Lam(Box::new(body_tm));
                }
                Ok(body_tm)
            }
            (ExprKind::ReflKw, Value::Id(a, l, r)) => {
                if nbe::conv(&self.rbcx(cx), a, l, r) {
                    Ok(Term::Refl(Box::new(readback(&self.rbcx(cx), a, l))))
                } else {
                    Err(ElabError::ConvMismatch {
                        expected: self.show_tm(cx, a, r),
                        found: self.show_tm(cx, a, l),
                        span: e.span,
                    })
                }
            }
            (ExprKind::Nat, Value::Univ) => Ok(Term::NatCode),
            (ExprKind::Univ, Value::Univ) => {
                Err(ElabError::UniverseInUniverse { span: e.span })
            }
            (ExprKind::Pi(x, a, b), Value::Univ) => self.pi_code(cx, Some(x), a, b),
            (ExprKind::Arrow(a, b), Value::Univ) => self.pi_code(cx, None, a, b),
            (ExprKind::App(..), Value::Univ)
                if matches!(spine(e).0.kind, ExprKind::IdKw) && spine(e).1.len() == 3 =>
            {
                let (_, args) = spine(e);
                let univ = Rc::new(Value::Univ);
                let a_tm = self.check_expr(cx, args[0], &univ)?;
                let a_v = self.eval_local(cx, &a_tm);
                let el_a = nbe::do_el(&self.sig_env, cx.hyps(), &a_v);
                let x_tm = self.check_expr(cx, args[1], &el_a)?;
                let y_tm = self.check_expr(cx, args[2], &el_a)?;
                Ok(Term::IdCode(Box::new(a_tm), Box::new(x_tm), Box::new(y_tm)))
            }
            _ => {
                let (tm, ty) = self.synth_expr(cx, e)?;
                if nbe::conv_type(&self.rbcx(cx), &ty, &expected) {
                    Ok(tm)
                } else {
                    Err(ElabError::ConvMismatch {
                        expected: self.show_ty(cx, &expected),
                        found: self.show_ty(cx, &ty),
                        span: e.span,
                    })
                }
            }
        }
    }

    fn pi_code(
        &mut self,
        cx: &LocalCx,
        x: Option<&str>,
        a: &Expr,
        b: &Expr,
    ) -> Result<Term, ElabError> {
        let univ = Rc::new(Value::Univ);
        let a_tm = self.check_expr(cx, a, &univ)?;
        let a_v = self.eval_local(cx, &a_tm);
        let el_a = nbe::do_el(&self.sig_env, cx.hyps(), &a_v);
        let cx2 = cx.bind_var(x.unwrap_or("_"), Term::El(Box::new(a_tm.clone())), el_a);
        let b_tm = self.check_expr(&cx2, b, &univ)?;
        Ok(Term::PiCode(Box::new(a_tm), Box::new(b_tm)))
    }

    fn synth_expr(
        &mut self,
        cx: &LocalCx,
        e: &Expr,
    ) -> Result<(Term, Rc<Value>), ElabError> {
        match &e.kind {
            ExprKind::Var(name) => {
                if let Some((idx, ty)) = cx.lookup(name) {
                    return Ok((Term::Var(idx), ty));
                }
                match self.sig_env.get(name) {
                    // a defined constant is used through its boundary
                    Some(tyv) => match &**tyv {
                        Value::Ext(a, p, _) => Ok((
                            Term::Out(p.clone(), Box::new(Term::Const(name.clone()))),
                            a.clone(),
                        )),
                        _ => Ok((Term::Const(name.clone()), tyv.clone())),
                    },
                    None => Err(ElabError::UnboundName {
                        name: name.clone(),
                        span: e.span,
                    }),
                }
            }
            ExprKind::Zero => Ok((Term::Zero, Rc::new(Value::Nat))),
            ExprKind::Lit(n) => Ok((Term::nat_lit(*n), Rc::new(Value::Nat))),
            ExprKind::SuKw => Ok((
                Term::Lam(Box::new(Term::Suc(Box::new(Term::Var(0))))),
                Rc::new(Value::Pi(
                    Rc::new(Value::Nat),
                    Closure {
                        env: Env::new(Prop::top()),
                        body: Term::Nat,
                    },
                )),
            )),
            ExprKind::App(..) => {
                let (head, args) = spine(e);
                match (&head.kind, args.as_slice()) {
                    (ExprKind::SuKw, [a]) => {
                        let a_tm = self.check_expr(cx, a, &Rc::new(Value::Nat))?;
                        Ok((Term::Suc(Box::new(a_tm)), Rc::new(Value::Nat)))
                    }
                    (ExprKind::ReflKw, [x]) => {
                        let (x_tm, x_ty) = self.synth_expr(cx, x)?;
                        let xv = self.eval_local(cx, &x_tm);
                        Ok((
                            Term::Refl(Box::new(x_tm)),
                            Rc::new(Value::Id(x_ty, xv.clone(), xv)),
                        ))
                    }
                    _ => {
                        let ExprKind::App(f, a) = &e.kind else { unreachable!() };
                        let (f_tm, f_ty) = self.synth_expr(cx, f)?;
                        let f_ty = nbe::force(&self.sig_env, cx.hyps(), &f_ty);
                        let Value::Pi(dom, cod) = &*f_ty else {
                            return Err(ElabError::Kernel {
                                err: TypeError::TypeMismatch {
                                    expected: "a function type".into(),
                                    found: self.show_ty(cx, &f_ty),
                                },
                                span: f.span,
                            });
                        };
                        let a_tm = self.check_expr(cx, a, dom)?;
                        let av = self.eval_local(cx, &a_tm);
                        Ok((
                            Term::App(Box::new(f_tm), Box::new(a_tm)),
                            cod.apply(&self.sig_env, av),
                        ))
                    }
                }
            }
            ExprKind::NatElim {
                motive_var,
                motive,
                base,
                step_vars,
                step,
                target,
            } => {
                let nat = Rc::new(Value::Nat);
                let target_tm = self.check_expr(cx, target, &nat)?;
                let cx_m = cx.bind_var(motive_var, Term::Nat, nat.clone());
                let motive_tm = self.elab_type(&cx_m, motive)?;
                let mot = Closure {
                    env: cx.env.clone(),
                    body: motive_tm.clone(),
                };
                let base_tm =
                    self.check_expr(cx, base, &mot.apply(&self.sig_env, Rc::new(Value::Zero)))?;
                let kv = fresh_var(cx.size(), nat.clone());
                let cx_k = cx.bind_var(&step_vars.0, Term::Nat, nat.clone());
                let ih_ty = mot.apply(&self.sig_env, kv.clone());
                let cx_kih = cx_k.bind_var(&step_vars.1, motive_tm.clone(), ih_ty);
                let step_tm = self.check_expr(
                    &cx_kih,
                    step,
                    &mot.apply(&self.sig_env, Rc::new(Value::Suc(kv))),
                )?;
                let tv = self.eval_local(cx, &target_tm);
                Ok((
                    Term::NatElim(
                        Box::new(motive_tm),
                        Box::new(base_tm),
                        Box::new(step_tm),
                        Box::new(target_tm),
                    ),
                    mot.apply(&self.sig_env, tv),
                ))
            }
            ExprKind::J {
                motive_vars,
                motive,
                refl_case,
                target,
            } => {
                let (t_tm, t_ty) = self.synth_expr(cx, target)?;
                let t_ty = nbe::force(&self.sig_env, cx.hyps(), &t_ty);
                let Value::Id(a, x, y) = &*t_ty else {
                    return Err(ElabError::Kernel {
                        err: TypeError::TypeMismatch {
                            expected: "an identity type".into(),
                            found: self.show_ty(cx, &t_ty),
                        },
                        span: target.span,
                    });
                };
                let a_tm = readback_type(&self.rbcx(cx), a);
                let x_tm = readback(&self.rbcx(cx), a, x);
                let cx_y = cx.bind_var(&motive_vars.0, a_tm.clone(), a.clone());
                let yv = fresh_var(cx.size(), a.clone());
                let e_ty_tm = Term::Id(
                    Box::new(a_tm.shift(1, 0)),
                    Box::new(x_tm.shift(1, 0)),
                    Box::new(Term::Var(0)),
                );
                let e_ty_v = Rc::new(Value::Id(a.clone(), x.clone(), yv));
                let cx_ye = cx_y.bind_var(&motive_vars.1, e_ty_tm, e_ty_v);
                let motive_tm = self.elab_type(&cx_ye, motive)?;
                let mot = Closure2 {
                    env: cx.env.clone(),
                    body: motive_tm.clone(),
                };
                let refl_ty =
                    mot.apply(&self.sig_env, x.clone(), Rc::new(Value::Refl(x.clone())));
                let refl_tm = self.check_expr(cx, refl_case, &refl_ty)?;
                let tv = self.eval_local(cx, &t_tm);
                Ok((
                    Term::J(Box::new(motive_tm), Box::new(refl_tm), Box::new(t_tm)),
                    mot.apply(&self.sig_env, y.clone(), tv),
                ))
            }
            _ => Err(ElabError::CannotInfer { span: e.span }),
        }
    }

    /// Close a type over the local telescope, interleaving term and
    /// proposition binders in telescope order.
    fn close_over(tele: &Telescope, ty: Term) -> Term {
        let mut acc = ty;
        for entry in tele.entries().iter().rev() {
            acc = match entry {
                TeleEntry::TermVar { ty, .. } => {
                    Term::Pi(Box::new(ty.clone()), Box::new(acc))
                }
                TeleEntry::PropHyp(p) => Term::PropPi(p.clone(), Box::new(acc)),
            };
        }
        acc
    }

    /// Apply a closed constant to the local telescope's variables and
    /// hypotheses, in order.
    fn apply_over(tele: &Telescope, head: Term) -> Term {
        let total_vars = tele.num_vars();
        let mut seen_vars = 0;
        let mut acc = head;
        for entry in tele.entries() {
            acc = match entry {
                TeleEntry::TermVar { .. } => {
                    let idx = total_vars - 1 - seen_vars;
                    seen_vars += 1;
                    Term::App(Box::new(acc), Box::new(Term::Var(idx)))
                }
                TeleEntry::PropHyp(p) => Term::PropApp(Box::new(acc), p.clone()),
            };
        }
        acc
    }

    fn elab_hole(
        &mut self,
        cx: &LocalCx,
        span: Span,
        expected: &Rc<Value>,
    ) -> Result<Term, ElabError> {
        let index = self.next_hole as usize;
        self.next_hole += 1;
        let const_name = format!("%hole.{index}");
        let ty_nf = readback_type(&self.rbcx(cx), expected);
        let raw_cx = ReadbackCx::new(&self.sig_env, cx.size(), Prop::top());
        let raw_ty = readback_type(&raw_cx, expected);
        let closed = Self::close_over(&cx.tele, ty_nf.clone());
        self.push_decl(
            Declaration::Const {
                name: const_name.clone(),
                ty: closed,
            },
            span,
        )?;
        self.goals.push(Goal {
            index,
            const_name: const_name.clone(),
            span,
            tele: cx.tele.clone(),
            ty: ty_nf,
            raw_ty,
        });
        Ok(Self::apply_over(&cx.tele, Term::Const(const_name)))
    }

    fn elab_unfold(
        &mut self,
        cx: &LocalCx,
        names: &[(String, Span)],
        body: &Expr,
        expected: &Rc<Value>,
        span: Span,
    ) -> Result<Term, ElabError> {
        let (u, _) = self.resolve_unfolds(names)?;
        let cx2 = cx.bind_hyp(&u);
        let body_tm = self.check_expr(&cx2, body, expected)?;
        // the goal type must be quoted outside the unfolding hypothesis
        let a_tm = readback_type(&self.rbcx(cx), expected);
        let inner = Term::Ext(Box::new(a_tm), u.clone(), Box::new(body_tm));
        let closed = Self::close_over(&cx.tele, inner);
        let n = self.next_unfold;
        self.next_unfold += 1;
        let const_name = format!("%unfold.{n}");
        self.push_decl(
            Declaration::Const {
                name: const_name.clone(),
                ty: closed,
            },
            span,
        )?;
        let applied = Self::apply_over(&cx.tele, Term::Const(const_name));
        Ok(Term::Out(u, Box::new(applied)))
    }
}

fn spine(e: &Expr) -> (&Expr, Vec<&Expr>) {
    let mut head = e;
    let mut args = Vec::new();
    while let ExprKind::App(f, a) = &head.kind {
        args.push(&**a);
        head = f;
    }
    args.reverse();
    (head, args)
}

/// Elaborate a whole program from scratch.
pub fn elaborate(prog: &Program) -> Result<Elaborator, ElabError> {
    let mut el = Elaborator::new();
    el.elab_program(prog)?;
    Ok(el)
}

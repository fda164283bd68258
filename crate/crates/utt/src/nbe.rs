//! Normalization by evaluation with stabilized neutrals.
//!
//! Values are evaluated relative to the conjunction of propositional
//! hypotheses in scope (`Env::hyps`); `out` projections on extension-typed
//! values collapse to their boundary as soon as the hypotheses entail the
//! boundary proposition. Stuck `out`s accumulate a frontier of instability
//! on the neutral; readback is context-relative and replays any neutral
//! whose frontier has become true, so no unstable neutral ever reaches a
//! normal form.

use std::rc::Rc;

use indexmap::IndexMap;

use crate::prop::{Frontier, Prop};
use crate::term::{TeleEntry, Telescope, Term};

/// Evaluated signature: the type value of every constant in scope.
#[derive(Debug, Clone, Default)]
pub struct SigEnv {
    consts: IndexMap<String, Rc<Value>>,
}

impl SigEnv {
    pub fn new() -> SigEnv {
        SigEnv::default()
    }

    pub fn insert(&mut self, name: &str, ty: Rc<Value>) {
        self.consts.insert(name.to_owned(), ty);
    }

    pub fn get(&self, name: &str) -> Option<&Rc<Value>> {
        self.consts.get(name)
    }
}

/// Evaluation environment: one value per term variable in scope, plus the
/// conjunction of the propositional hypotheses.
#[derive(Debug, Clone, Default)]
pub struct Env {
    values: Vec<Rc<Value>>,
    pub hyps: Prop,
}

impl Env {
    pub fn new(hyps: Prop) -> Env {
        Env {
            values: Vec::new(),
            hyps,
        }
    }

    pub fn lookup(&self, idx: usize) -> &Rc<Value> {
        &self.values[self.values.len() - 1 - idx]
    }

    pub fn extended(&self, v: Rc<Value>) -> Env {
        let mut e = self.clone();
        e.values.push(v);
        e
    }

    pub fn with_hyp(&self, p: &Prop) -> Env {
        let mut e = self.clone();
        e.hyps = e.hyps.meet(p);
        e
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Defunctionalized closure binding one term variable.
#[derive(Debug, Clone)]
pub struct Closure {
    pub env: Env,
    pub body: Term,
}

impl Closure {
    pub fn apply(&self, sig: &SigEnv, v: Rc<Value>) -> Rc<Value> {
        eval(sig, &self.env.extended(v), &self.body)
    }
}

/// Closure binding two term variables.
#[derive(Debug, Clone)]
pub struct Closure2 {
    pub env: Env,
    pub body: Term,
}

impl Closure2 {
    pub fn apply(&self, sig: &SigEnv, v1: Rc<Value>, v2: Rc<Value>) -> Rc<Value> {
        eval(sig, &self.env.extended(v1).extended(v2), &self.body)
    }
}

/// Closure whose body lives under a propositional hypothesis. Forcing is
/// lazy: the body is evaluated only when the hypothesis is justified.
#[derive(Debug, Clone)]
pub struct PropClosure {
    pub env: Env,
    pub prop: Prop,
    pub body: Term,
}

impl PropClosure {
    /// Evaluate the body under the stated hypothesis, conjoined with any
    /// ambient hypotheses at the force site.
    pub fn force(&self, sig: &SigEnv, ambient: &Prop) -> Rc<Value> {
        let mut env = self.env.clone();
        env.hyps = env.hyps.meet(&self.prop).meet(ambient);
        eval(sig, &env, &self.body)
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    Pi(Rc<Value>, Closure),
    Lam(Closure),
    Nat,
    Zero,
    Suc(Rc<Value>),
    Id(Rc<Value>, Rc<Value>, Rc<Value>),
    Refl(Rc<Value>),
    Univ,
    PiCode(Rc<Value>, Closure),
    NatCode,
    IdCode(Rc<Value>, Rc<Value>, Rc<Value>),
    ExtCode(Rc<Value>, Prop, PropClosure),
    PropPiCode(Prop, PropClosure),
    PropPi(Prop, PropClosure),
    PropLam(Prop, PropClosure),
    Ext(Rc<Value>, Prop, PropClosure),
    In(Prop, Rc<Value>),
    /// A stuck value, carrying its type so that collapses can be replayed.
    Neutral(Rc<Value>, Neutral),
}

#[derive(Debug, Clone)]
pub enum Head {
    Var { level: usize, ty: Rc<Value> },
    Const { name: String, ty: Rc<Value> },
}

#[derive(Debug, Clone)]
pub enum Elim {
    App(Rc<Value>),
    NatElim {
        motive: Closure,
        base: Rc<Value>,
        step: Closure2,
    },
    J {
        motive: Closure2,
        refl_case: Rc<Value>,
    },
    PropApp(Prop),
    Out(Prop),
    El,
}

/// A neutral: a head, a spine of eliminations, and the frontier of
/// instability under which the whole spine collapses to its boundary.
#[derive(Debug, Clone)]
pub struct Neutral {
    pub head: Head,
    pub spine: Vec<Elim>,
    pub frontier: Frontier,
}

impl Neutral {
    pub fn var(level: usize, ty: Rc<Value>) -> Neutral {
        Neutral {
            head: Head::Var { level, ty },
            spine: Vec::new(),
            frontier: Frontier::bottom(),
        }
    }

    pub fn constant(name: &str, ty: Rc<Value>) -> Neutral {
        Neutral {
            head: Head::Const {
                name: name.to_owned(),
                ty,
            },
            spine: Vec::new(),
            frontier: Frontier::bottom(),
        }
    }

    fn extend(&self, e: Elim) -> Neutral {
        let mut n = self.clone();
        n.spine.push(e);
        n
    }

    fn extend_out(&self, p: &Prop) -> Neutral {
        let mut n = self.extend(Elim::Out(p.clone()));
        n.frontier = n.frontier.or(p);
        n
    }
}

pub fn fresh_var(level: usize, ty: Rc<Value>) -> Rc<Value> {
    Rc::new(Value::Neutral(ty.clone(), Neutral::var(level, ty)))
}

pub fn eval(sig: &SigEnv, env: &Env, t: &Term) -> Rc<Value> {
    match t {
        Term::Var(i) => env.lookup(*i).clone(),
        Term::Const(c) => {
            let ty = sig
                .get(c)
                .unwrap_or_else(|| panic!("eval: unknown constant `{c}`"))
                .clone();
            Rc::new(Value::Neutral(ty.clone(), Neutral::constant(c, ty)))
        }
        Term::Pi(a, b) => Rc::new(Value::Pi(
            eval(sig, env, a),
            Closure {
                env: env.clone(),
                body: (**b).clone(),
            },
        )),
        Term::Lam(b) => Rc::new(Value::Lam(Closure {
            env: env.clone(),
            body: (**b).clone(),
        })),
        Term::App(f, a) => {
            let fv = eval(sig, env, f);
            let av = eval(sig, env, a);
            do_app(sig, &env.hyps, &fv, av)
        }
        Term::Nat => Rc::new(Value::Nat),
        Term::Zero => Rc::new(Value::Zero),
        Term::Suc(n) => Rc::new(Value::Suc(eval(sig, env, n))),
        Term::NatElim(c, b, s, tgt) => {
            let motive = Closure {
                env: env.clone(),
                body: (**c).clone(),
            };
            let base = eval(sig, env, b);
            let step = Closure2 {
                env: env.clone(),
                body: (**s).clone(),
            };
            let target = eval(sig, env, tgt);
            do_natelim(sig, &env.hyps, &motive, &base, &step, &target)
        }
        Term::Id(a, x, y) => Rc::new(Value::Id(
            eval(sig, env, a),
            eval(sig, env, x),
            eval(sig, env, y),
        )),
        Term::Refl(x) => Rc::new(Value::Refl(eval(sig, env, x))),
        Term::J(c, r, tgt) => {
            let motive = Closure2 {
                env: env.clone(),
                body: (**c).clone(),
            };
            let refl_case = eval(sig, env, r);
            let target = eval(sig, env, tgt);
            do_j(sig, &env.hyps, &motive, &refl_case, &target)
        }
        Term::Univ => Rc::new(Value::Univ),
        Term::El(c) => {
            let cv = eval(sig, env, c);
            do_el(sig, &env.hyps, &cv)
        }
        Term::PiCode(a, b) => Rc::new(Value::PiCode(
            eval(sig, env, a),
            Closure {
                env: env.clone(),
                body: (**b).clone(),
            },
        )),
        Term::NatCode => Rc::new(Value::NatCode),
        Term::IdCode(a, x, y) => Rc::new(Value::IdCode(
            eval(sig, env, a),
            eval(sig, env, x),
            eval(sig, env, y),
        )),
        Term::ExtCode(a, p, m) => Rc::new(Value::ExtCode(
            eval(sig, env, a),
            p.clone(),
            PropClosure {
                env: env.clone(),
                prop: p.clone(),
                body: (**m).clone(),
            },
        )),
        Term::PropPiCode(p, b) => Rc::new(Value::PropPiCode(
            p.clone(),
            PropClosure {
                env: env.clone(),
                prop: p.clone(),
                body: (**b).clone(),
            },
        )),
        Term::PropPi(p, b) => Rc::new(Value::PropPi(
            p.clone(),
            PropClosure {
                env: env.clone(),
                prop: p.clone(),
                body: (**b).clone(),
            },
        )),
        Term::PropLam(p, b) => Rc::new(Value::PropLam(
            p.clone(),
            PropClosure {
                env: env.clone(),
                prop: p.clone(),
                body: (**b).clone(),
            },
        )),
        Term::PropApp(f, p) => {
            let fv = eval(sig, env, f);
            do_propapp(sig, &env.hyps, &fv, p)
        }
        Term::Ext(a, p, m) => Rc::new(Value::Ext(
            eval(sig, env, a),
            p.clone(),
            PropClosure {
                env: env.clone(),
                prop: p.clone(),
                body: (**m).clone(),
            },
        )),
        Term::In(p, a) => Rc::new(Value::In(p.clone(), eval(sig, env, a))),
        Term::Out(p, a) => {
            let av = eval(sig, env, a);
            do_out(sig, &env.hyps, &av, p)
        }
    }
}

pub fn do_app(sig: &SigEnv, hyps: &Prop, f: &Rc<Value>, a: Rc<Value>) -> Rc<Value> {
    match &**f {
        Value::Lam(cl) => cl.apply(sig, a),
        Value::Neutral(ty, ne) => match &**ty {
            Value::Pi(_, cod) => {
                let rty = cod.apply(sig, a.clone());
                Rc::new(Value::Neutral(rty, ne.extend(Elim::App(a))))
            }
            _ => panic!("do_app: neutral head is not of Pi type"),
        },
        _ => {
            let _ = hyps;
            panic!("do_app: not a function value")
        }
    }
}

pub fn do_natelim(
    sig: &SigEnv,
    hyps: &Prop,
    motive: &Closure,
    base: &Rc<Value>,
    step: &Closure2,
    target: &Rc<Value>,
) -> Rc<Value> {
    match &**target {
        Value::Zero => base.clone(),
        Value::Suc(n) => {
            let rec = do_natelim(sig, hyps, motive, base, step, n);
            step.apply(sig, n.clone(), rec)
        }
        Value::Neutral(_, ne) => {
            let rty = motive.apply(sig, target.clone());
            Rc::new(Value::Neutral(
                rty,
                ne.extend(Elim::NatElim {
                    motive: motive.clone(),
                    base: base.clone(),
                    step: step.clone(),
                }),
            ))
        }
        _ => panic!("do_natelim: target is not a natural number value"),
    }
}

pub fn do_j(
    sig: &SigEnv,
    _hyps: &Prop,
    motive: &Closure2,
    refl_case: &Rc<Value>,
    target: &Rc<Value>,
) -> Rc<Value> {
    match &**target {
        Value::Refl(_) => refl_case.clone(),
        Value::Neutral(ty, ne) => match &**ty {
            Value::Id(_, _, y) => {
                let rty = motive.apply(sig, y.clone(), target.clone());
                Rc::new(Value::Neutral(
                    rty,
                    ne.extend(Elim::J {
                        motive: motive.clone(),
                        refl_case: refl_case.clone(),
                    }),
                ))
            }
            _ => panic!("do_j: neutral target is not of Id type"),
        },
        _ => panic!("do_j: target is not an identity proof"),
    }
}

pub fn do_propapp(sig: &SigEnv, hyps: &Prop, f: &Rc<Value>, p: &Prop) -> Rc<Value> {
    match &**f {
        Value::PropLam(_, cl) => cl.force(sig, hyps),
        Value::Neutral(ty, ne) => match &**ty {
            Value::PropPi(_, cod) => {
                let rty = cod.force(sig, hyps);
                Rc::new(Value::Neutral(rty, ne.extend(Elim::PropApp(p.clone()))))
            }
            _ => panic!("do_propapp: neutral head is not of prop-product type"),
        },
        _ => panic!("do_propapp: not a prop-function value"),
    }
}

/// Strict Tarski decoding: `El` commutes with the chosen codes.
pub fn do_el(sig: &SigEnv, hyps: &Prop, c: &Rc<Value>) -> Rc<Value> {
    match &**c {
        Value::PiCode(a, b) => Rc::new(Value::Pi(
            do_el(sig, hyps, a),
            Closure {
                env: b.env.clone(),
                body: Term::El(Box::new(b.body.clone())),
            },
        )),
        Value::NatCode => Rc::new(Value::Nat),
        Value::IdCode(a, x, y) => Rc::new(Value::Id(
            do_el(sig, hyps, a),
            x.clone(),
            y.clone(),
        )),
        Value::ExtCode(a, p, m) => Rc::new(Value::Ext(do_el(sig, hyps, a), p.clone(), m.clone())),
        Value::PropPiCode(p, b) => Rc::new(Value::PropPi(
            p.clone(),
            PropClosure {
                env: b.env.clone(),
                prop: b.prop.clone(),
                body: Term::El(Box::new(b.body.clone())),
            },
        )),
        Value::Neutral(_, ne) => Rc::new(Value::Neutral(
            Rc::new(Value::Univ),
            ne.extend(Elim::El),
        )),
        _ => panic!("do_el: not a code value"),
    }
}

pub fn do_out(sig: &SigEnv, hyps: &Prop, v: &Rc<Value>, p: &Prop) -> Rc<Value> {
    match &**v {
        Value::In(_, a) => a.clone(),
        Value::Neutral(ty, ne) => match &**ty {
            Value::Ext(aty, q, boundary) => {
                if hyps.entails(q) {
                    boundary.force(sig, hyps)
                } else {
                    let _ = p;
                    Rc::new(Value::Neutral(aty.clone(), ne.extend_out(q)))
                }
            }
            _ => panic!("do_out: neutral is not of extension type"),
        },
        _ => panic!("do_out: not an extension-type value"),
    }
}

fn do_elim(sig: &SigEnv, hyps: &Prop, v: Rc<Value>, e: &Elim) -> Rc<Value> {
    match e {
        Elim::App(a) => do_app(sig, hyps, &v, a.clone()),
        Elim::NatElim { motive, base, step } => do_natelim(sig, hyps, motive, base, step, &v),
        Elim::J { motive, refl_case } => do_j(sig, hyps, motive, refl_case, &v),
        Elim::PropApp(p) => do_propapp(sig, hyps, &v, p),
        Elim::Out(p) => do_out(sig, hyps, &v, p),
        Elim::El => do_el(sig, hyps, &v),
    }
}

/// Re-run a neutral's spine from its head under the current hypotheses.
/// Used to collapse a neutral whose frontier has become true.
pub fn replay(sig: &SigEnv, hyps: &Prop, ne: &Neutral) -> Rc<Value> {
    let mut v = match &ne.head {
        Head::Var { level, ty } => fresh_var(*level, ty.clone()),
        Head::Const { name, ty } => Rc::new(Value::Neutral(
            ty.clone(),
            Neutral::constant(name, ty.clone()),
        )),
    };
    for e in &ne.spine {
        v = do_elim(sig, hyps, v, e);
    }
    v
}

/// Collapse `v` if it is a neutral whose frontier is true under `hyps`.
pub fn force(sig: &SigEnv, hyps: &Prop, v: &Rc<Value>) -> Rc<Value> {
    match &**v {
        Value::Neutral(_, ne) if ne.frontier.is_true(hyps) => replay(sig, hyps, ne),
        _ => v.clone(),
    }
}

/// A term in beta-normal, eta-long form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalForm(pub Term);

/// Readback context: the number of term variables in scope and the
/// conjunction of propositional hypotheses. Readback is context-relative:
/// the same value reads back differently under different hypotheses.
#[derive(Clone)]
pub struct ReadbackCx<'a> {
    pub sig: &'a SigEnv,
    pub size: usize,
    pub hyps: Prop,
}

impl<'a> ReadbackCx<'a> {
    pub fn new(sig: &'a SigEnv, size: usize, hyps: Prop) -> ReadbackCx<'a> {
        ReadbackCx { sig, size, hyps }
    }

    fn bind_var(&self) -> ReadbackCx<'a> {
        ReadbackCx {
            sig: self.sig,
            size: self.size + 1,
            hyps: self.hyps.clone(),
        }
    }

    fn bind_hyp(&self, p: &Prop) -> ReadbackCx<'a> {
        ReadbackCx {
            sig: self.sig,
            size: self.size,
            hyps: self.hyps.meet(p),
        }
    }
}

/// Type-directed, eta-long quotation of a value.
pub fn readback(cx: &ReadbackCx<'_>, ty: &Rc<Value>, v: &Rc<Value>) -> Term {
    let ty = force(cx.sig, &cx.hyps, ty);
    match &*ty {
        Value::Pi(dom, cod) => {
            let x = fresh_var(cx.size, dom.clone());
            let body = do_app(cx.sig, &cx.hyps, v, x.clone());
            let body_ty = cod.apply(cx.sig, x);
            Term::Lam(Box::new(readback(&cx.bind_var(), &body_ty, &body)))
        }
        Value::PropPi(p, cod) => {
            let cx2 = cx.bind_hyp(p);
            let body = do_propapp(cx.sig, &cx2.hyps, v, p);
            let body_ty = cod.force(cx.sig, &cx2.hyps);
            Term::PropLam(p.clone(), Box::new(readback(&cx2, &body_ty, &body)))
        }
        Value::Ext(aty, p, _) => {
            // eta for extension types: quote through in/out.
            let inner = do_out(cx.sig, &cx.hyps, v, p);
            Term::In(p.clone(), Box::new(readback(cx, aty, &inner)))
        }
        Value::Nat => {
            let v = force(cx.sig, &cx.hyps, v);
            match &*v {
                Value::Zero => Term::Zero,
                Value::Suc(n) => Term::Suc(Box::new(readback(cx, &ty, n))),
                Value::Neutral(_, ne) => readback_neutral(cx, ne).0,
                _ => panic!("readback: expected a natural number value"),
            }
        }
        Value::Id(a, _, _) => {
            let v = force(cx.sig, &cx.hyps, v);
            match &*v {
                Value::Refl(x) => Term::Refl(Box::new(readback(cx, a, x))),
                Value::Neutral(_, ne) => readback_neutral(cx, ne).0,
                _ => panic!("readback: expected an identity proof"),
            }
        }
        Value::Univ => {
            let v = force(cx.sig, &cx.hyps, v);
            readback_code(cx, &v)
        }
        Value::Neutral(..) => {
            // stuck type (El of a neutral code): no eta laws apply.
            let v = force(cx.sig, &cx.hyps, v);
            match &*v {
                Value::Neutral(_, ne) => readback_neutral(cx, ne).0,
                _ => panic!("readback: non-neutral value at a stuck type"),
            }
        }
        _ => panic!("readback: not a type value"),
    }
}

fn readback_code(cx: &ReadbackCx<'_>, v: &Rc<Value>) -> Term {
    match &**v {
        Value::PiCode(a, b) => {
            let dom = do_el(cx.sig, &cx.hyps, a);
            let x = fresh_var(cx.size, dom);
            let bx = b.apply(cx.sig, x);
            Term::PiCode(
                Box::new(readback_code_at_univ(cx, a)),
                Box::new(readback(&cx.bind_var(), &Rc::new(Value::Univ), &bx)),
            )
        }
        Value::NatCode => Term::NatCode,
        Value::IdCode(a, x, y) => {
            let ela = do_el(cx.sig, &cx.hyps, a);
            Term::IdCode(
                Box::new(readback_code_at_univ(cx, a)),
                Box::new(readback(cx, &ela, x)),
                Box::new(readback(cx, &ela, y)),
            )
        }
        Value::ExtCode(a, p, m) => {
            let cx2 = cx.bind_hyp(p);
            let ela = do_el(cx.sig, &cx2.hyps, a);
            let mv = m.force(cx.sig, &cx2.hyps);
            Term::ExtCode(
                Box::new(readback_code_at_univ(cx, a)),
                p.clone(),
                Box::new(readback(&cx2, &ela, &mv)),
            )
        }
        Value::PropPiCode(p, b) => {
            let cx2 = cx.bind_hyp(p);
            let bv = b.force(cx.sig, &cx2.hyps);
            Term::PropPiCode(
                p.clone(),
                Box::new(readback(&cx2, &Rc::new(Value::Univ), &bv)),
            )
        }
        Value::Neutral(_, ne) => readback_neutral(cx, ne).0,
        _ => panic!("readback: not a code value"),
    }
}

fn readback_code_at_univ(cx: &ReadbackCx<'_>, a: &Rc<Value>) -> Term {
    readback(cx, &Rc::new(Value::Univ), a)
}

/// Quote a stable neutral, tracking the type along the spine. Panics if the
/// frontier is true: callers must force first, so a trip here with a true
/// frontier means an unstable neutral leaked to emission.
fn readback_neutral(cx: &ReadbackCx<'_>, ne: &Neutral) -> (Term, Rc<Value>) {
    assert!(
        !ne.frontier.is_true(&cx.hyps),
        "internal error: unstable neutral (frontier {}) survived to readback",
        ne.frontier
    );
    let (mut tm, mut ty, head) = match &ne.head {
        Head::Var { level, ty } => (
            Term::Var(cx.size - 1 - level),
            ty.clone(),
            Head::Var {
                level: *level,
                ty: ty.clone(),
            },
        ),
        Head::Const { name, ty } => (
            Term::Const(name.clone()),
            ty.clone(),
            Head::Const {
                name: name.clone(),
                ty: ty.clone(),
            },
        ),
    };
    // the value of the spine prefix, reconstructed on demand for motive
    // instantiation.
    let mut prefix = Neutral {
        head,
        spine: Vec::new(),
        frontier: Frontier::bottom(),
    };
    for e in &ne.spine {
        let target = Rc::new(Value::Neutral(ty.clone(), prefix.clone()));
        match e {
            Elim::App(a) => {
                let tyf = force(cx.sig, &cx.hyps, &ty);
                let Value::Pi(dom, cod) = &*tyf else {
                    panic!("readback: spine application at non-Pi type")
                };
                tm = Term::App(Box::new(tm), Box::new(readback(cx, dom, a)));
                ty = cod.apply(cx.sig, a.clone());
            }
            Elim::NatElim { motive, base, step } => {
                let nat = Rc::new(Value::Nat);
                let n = fresh_var(cx.size, nat.clone());
                let motive_tm = readback_type(&cx.bind_var(), &motive.apply(cx.sig, n));
                let base_ty = motive.apply(cx.sig, Rc::new(Value::Zero));
                let base_tm = readback(cx, &base_ty, base);
                let k = fresh_var(cx.size, nat.clone());
                let ih = fresh_var(cx.size + 1, motive.apply(cx.sig, k.clone()));
                let step_ty = motive.apply(cx.sig, Rc::new(Value::Suc(k.clone())));
                let step_v = step.apply(cx.sig, k, ih);
                let step_tm = readback(&cx.bind_var().bind_var(), &step_ty, &step_v);
                tm = Term::NatElim(
                    Box::new(motive_tm),
                    Box::new(base_tm),
                    Box::new(step_tm),
                    Box::new(tm),
                );
                ty = motive.apply(cx.sig, target.clone());
            }
            Elim::J { motive, refl_case } => {
                let tyf = force(cx.sig, &cx.hyps, &ty);
                let Value::Id(a, x, y) = &*tyf else {
                    panic!("readback: J at non-Id type")
                };
                let yv = fresh_var(cx.size, a.clone());
                let ev = fresh_var(
                    cx.size + 1,
                    Rc::new(Value::Id(a.clone(), x.clone(), yv.clone())),
                );
                let motive_tm =
                    readback_type(&cx.bind_var().bind_var(), &motive.apply(cx.sig, yv, ev));
                let refl_ty = motive.apply(cx.sig, x.clone(), Rc::new(Value::Refl(x.clone())));
                let refl_tm = readback(cx, &refl_ty, refl_case);
                tm = Term::J(Box::new(motive_tm), Box::new(refl_tm), Box::new(tm));
                ty = motive.apply(cx.sig, y.clone(), target.clone());
            }
            Elim::PropApp(p) => {
                let tyf = force(cx.sig, &cx.hyps, &ty);
                let Value::PropPi(_, cod) = &*tyf else {
                    panic!("readback: prop application at non-prop-product type")
                };
                tm = Term::PropApp(Box::new(tm), p.clone());
                ty = cod.force(cx.sig, &cx.hyps);
            }
            Elim::Out(p) => {
                let tyf = force(cx.sig, &cx.hyps, &ty);
                let Value::Ext(aty, _, _) = &*tyf else {
                    panic!("readback: out at non-extension type")
                };
                tm = Term::Out(p.clone(), Box::new(tm));
                ty = aty.clone();
            }
            Elim::El => {
                tm = Term::El(Box::new(tm));
                ty = Rc::new(Value::Univ);
            }
        }
        prefix = prefix.extend(e.clone());
        if let Elim::Out(p) = e {
            prefix.frontier = prefix.frontier.or(p);
        }
    }
    (tm, ty)
}

/// Quote a type value to an eta-long normal type.
pub fn readback_type(cx: &ReadbackCx<'_>, ty: &Rc<Value>) -> Term {
    let ty = force(cx.sig, &cx.hyps, ty);
    match &*ty {
        Value::Pi(dom, cod) => {
            let x = fresh_var(cx.size, dom.clone());
            Term::Pi(
                Box::new(readback_type(cx, dom)),
                Box::new(readback_type(&cx.bind_var(), &cod.apply(cx.sig, x))),
            )
        }
        Value::Nat => Term::Nat,
        Value::Id(a, x, y) => Term::Id(
            Box::new(readback_type(cx, a)),
            Box::new(readback(cx, a, x)),
            Box::new(readback(cx, a, y)),
        ),
        Value::Univ => Term::Univ,
        Value::PropPi(p, cod) => {
            let cx2 = cx.bind_hyp(p);
            Term::PropPi(
                p.clone(),
                Box::new(readback_type(&cx2, &cod.force(cx.sig, &cx2.hyps))),
            )
        }
        Value::Ext(a, p, m) => {
            let cx2 = cx.bind_hyp(p);
            let mv = m.force(cx.sig, &cx2.hyps);
            Term::Ext(
                Box::new(readback_type(cx, a)),
                p.clone(),
                Box::new(readback(&cx2, a, &mv)),
            )
        }
        Value::Neutral(_, ne) => readback_neutral(cx, ne).0,
        _ => panic!("readback_type: not a type value"),
    }
}

/// Decide definitional equality of two values of the same type by comparing
/// eta-long readbacks.
pub fn conv(cx: &ReadbackCx<'_>, ty: &Rc<Value>, v1: &Rc<Value>, v2: &Rc<Value>) -> bool {
    readback(cx, ty, v1) == readback(cx, ty, v2)
}

/// Definitional equality of two type values.
pub fn conv_type(cx: &ReadbackCx<'_>, t1: &Rc<Value>, t2: &Rc<Value>) -> bool {
    readback_type(cx, t1) == readback_type(cx, t2)
}

/// Build the evaluation environment of a telescope: a fresh variable per
/// term variable and the meet of the propositional hypotheses.
pub fn env_of_telescope(sig: &SigEnv, tele: &Telescope) -> Env {
    let mut env = Env::new(Prop::top());
    for entry in tele.entries() {
        match entry {
            TeleEntry::TermVar { ty, .. } => {
                let tyv = eval(sig, &env, ty);
                let v = fresh_var(env.len(), tyv);
                env = env.extended(v);
            }
            TeleEntry::PropHyp(p) => {
                env = env.with_hyp(p);
            }
        }
    }
    env
}

/// Normalize `m` at type `ty` in the given telescope: evaluate, then read
/// back eta-long and beta-normal.
pub fn normalize(sig: &SigEnv, tele: &Telescope, ty: &Term, m: &Term) -> NormalForm {
    let env = env_of_telescope(sig, tele);
    let tyv = eval(sig, &env, ty);
    let v = eval(sig, &env, m);
    let cx = ReadbackCx::new(sig, env.len(), env.hyps.clone());
    NormalForm(readback(&cx, &tyv, &v))
}

/// Normalize a type in the given telescope.
pub fn normalize_type(sig: &SigEnv, tele: &Telescope, ty: &Term) -> NormalForm {
    let env = env_of_telescope(sig, tele);
    let tyv = eval(sig, &env, ty);
    let cx = ReadbackCx::new(sig, env.len(), env.hyps.clone());
    NormalForm(readback_type(&cx, &tyv))
}

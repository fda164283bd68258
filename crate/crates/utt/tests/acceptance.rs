//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::rc::Rc;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use utt::check::{check_signature, Checker, Cx};
use utt::elab::elaborate;
use utt::error::ElabError;
use utt::nbe::{self, normalize, Env, ReadbackCx, SigEnv, Value};
use utt::oracle::{Oracle, Verdict};
use utt::pretty::Printer;
use utt::prop::{Prop, PropTable};
use utt::surface::parse_program;
use utt::term::{Signature, Telescope, Term};

fn corpus_path(name: &str) -> String {
    format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn read_corpus(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap()
}

fn elab_corpus(name: &str) -> Result<utt::elab::Elaborator, ElabError> {
    let prog = parse_program(&read_corpus(name)).unwrap();
    let el = elaborate(&prog)?;
    check_signature(&el.signature).expect("kernel re-check");
    Ok(el)
}

#[test]
fn criterion_1_corpus() {
    let t0 = Instant::now();

    // (a) the addition example elaborates to the golden signature
    let el = elab_corpus("plus.utt").unwrap();
    let printed = Printer::new(&el.table).signature(&el.signature);
    let golden = read_corpus("golden/plus.sig.golden");
    assert_eq!(printed, golden);

    // (b) the unit law checks with unfolds and fails without, showing the
    // sealed neutral on the found side
    elab_corpus("zero-plus.utt").unwrap();
    match elab_corpus("zero-plus-stuck.utt").unwrap_err() {
        ElabError::ConvMismatch { found, .. } => assert!(found.contains("out[")),
        e => panic!("expected a conversion mismatch, got {e}"),
    }

    // (c) abbreviations check with refl and no explicit unfolding
    elab_corpus("abbreviation.utt").unwrap();

    // (d) both statement styles check, and the hole progression matches
    // the goldens
    elab_corpus("left-unit.utt").unwrap();
    elab_corpus("left-unit-unfold-in.utt").unwrap();
    for (file, golden, sealed) in [
        ("left-unit-hole1.utt", "hole1.goal.golden", true),
        ("left-unit-hole2.utt", "hole2.goal.golden", false),
    ] {
        let el = elab_corpus(file).unwrap();
        assert_eq!(el.goals.len(), 1);
        let g = Printer::new(&el.table).term(&[], &el.goals[0].ty);
        assert_eq!(g, read_corpus(&format!("golden/{golden}")));
        assert_eq!(g.contains("out["), sealed);
    }
    let el = elab_corpus("left-unit-hole3.utt").unwrap();
    let g = Printer::new(&el.table).term(&["n".into()], &el.goals[0].ty);
    assert_eq!(g, read_corpus("golden/hole3.goal.golden"));

    // (e) two / thm / thm-is-refl'
    elab_corpus("two.utt").unwrap();

    // (f) both unit laws, with a J-derived congruence
    elab_corpus("plus-zero.utt").unwrap();

    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 5.0, "corpus took {dt:?}");
    println!("criterion 1 (example corpus, {dt:?}): pass");
}

fn random_table(rng: &mut ChaCha8Rng) -> (PropTable, Vec<Prop>) {
    let mut table = PropTable::new();
    let mut props = Vec::new();
    let n = rng.gen_range(1..=30);
    for i in 0..n {
        let mut rhs = Prop::top();
        for p in &props {
            if rng.gen_bool(0.2) {
                rhs = rhs.meet(p);
            }
        }
        let name = format!("p{i}");
        let p = if rng.gen_bool(0.25) && !props.is_empty() {
            table.extend_eq(&name, &rhs).unwrap()
        } else {
            table.extend_le(&name, &rhs).unwrap()
        };
        props.push(p);
    }
    (table, props)
}

#[test]
fn criterion_2_semilattice_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let (_, props) = random_table(&mut rng);
        let pick = |rng: &mut ChaCha8Rng| props[rng.gen_range(0..props.len())].clone();
        let (p, q, r) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        assert_eq!(p.meet(&q), q.meet(&p));
        assert_eq!(p.meet(&q).meet(&r), p.meet(&q.meet(&r)));
        assert_eq!(p.meet(&p), p);
        assert_eq!(p.meet(&Prop::top()), p);
        assert!(p.meet(&q).entails(&p));
        assert!(p.meet(&q).entails(&q));
        assert_eq!(p.entails(&q), p.meet(&q) == p);
    }
    println!("criterion 2 (semilattice laws, 10000 tables): pass");
}

/// A random dependency DAG rendered as a surface program of trivial
/// definitions.
fn random_dag_program(
    rng: &mut ChaCha8Rng,
) -> (String, Vec<Vec<usize>>, Vec<bool>) {
    let n = rng.gen_range(2..=8);
    let mut src = String::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut abbrevs = Vec::new();
    for i in 0..n {
        let mut deps = Vec::new();
        for j in 0..i {
            if rng.gen_bool(0.4) {
                deps.push(j);
            }
        }
        let abbrv = rng.gen_bool(0.3);
        if abbrv {
            src.push_str("abbreviation ");
        }
        src.push_str(&format!("def d{i}"));
        if !deps.is_empty() {
            src.push_str(" unfolds");
            for j in &deps {
                src.push_str(&format!(" d{j}"));
            }
        }
        src.push_str(" : Nat := ze\n");
        edges.push(deps);
        abbrevs.push(abbrv);
    }
    (src, edges, abbrevs)
}

#[test]
fn criterion_3_transitivity_and_abbreviation_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1_000 {
        let (src, edges, abbrevs) = random_dag_program(&mut rng);
        let prog = parse_program(&src).unwrap();
        let el = elaborate(&prog).unwrap();
        check_signature(&el.signature).expect("kernel re-check");
        let n = edges.len();
        let prop =
            |i: usize| el.prop_of_def(&format!("d{i}")).expect("public prop").clone();
        // reachability by transitive closure over the edges
        let mut reach = vec![vec![false; n]; n];
        for i in 0..n {
            for &j in &edges[i] {
                reach[i][j] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if reach[i][j] {
                    assert!(
                        prop(i).entails(&prop(j)),
                        "path d{i} -> d{j} must entail"
                    );
                }
            }
        }
        for i in 0..n {
            if abbrevs[i] {
                let mut meet = Prop::top();
                for &j in &edges[i] {
                    meet = meet.meet(&prop(j));
                }
                assert!(prop(i).entails(&meet) && meet.entails(&prop(i)));
            }
        }
    }
    println!("criterion 3 (transitivity and abbreviation laws, 1000 DAGs): pass");
}

/// The fixed signature for differential testing: a two-step proposition
/// chain, two sealed numerals, and sealed addition.
fn fragment_sig() -> (Signature, PropTable, SigEnv, Prop, Prop) {
    let src = "\
def base : Nat := 1
def step unfolds base : Nat := su base
def add : Nat -> Nat -> Nat := fun m n => natelim (x => Nat) n (k ih => su ih) m
";
    let prog = parse_program(src).unwrap();
    let el = elaborate(&prog).unwrap();
    let pb = el.prop_of_def("base").unwrap().clone();
    let pa = el.prop_of_def("step").unwrap().clone();
    (el.signature, el.table, el.sig_env, pa, pb)
}

fn gen_fragment(rng: &mut ChaCha8Rng, hyps: &Prop, pa: &Prop, pb: &Prop, depth: usize) -> Term {
    let leaf = depth == 0;
    loop {
        match rng.gen_range(0..8) {
            0 => return Term::Zero,
            1 => {
                return Term::Out(pb.clone(), Box::new(Term::Const("base".into())));
            }
            2 => {
                return Term::Out(pa.clone(), Box::new(Term::Const("step".into())));
            }
            3 if !leaf => {
                return Term::Suc(Box::new(gen_fragment(rng, hyps, pa, pb, depth - 1)))
            }
            4 if !leaf => {
                let f = Term::Out(pb.clone(), Box::new(Term::Const("add".into())));
                let x = gen_fragment(rng, hyps, pa, pb, depth - 1);
                let y = gen_fragment(rng, hyps, pa, pb, depth - 1);
                return Term::App(
                    Box::new(Term::App(Box::new(f), Box::new(x))),
                    Box::new(y),
                );
            }
            5 if !leaf => {
                let t = gen_fragment(rng, hyps, pa, pb, depth - 1);
                return Term::Out(pa.clone(), Box::new(Term::In(pa.clone(), Box::new(t))));
            }
            6 if !leaf => {
                let base = gen_fragment(rng, hyps, pa, pb, depth - 1);
                let tgt = gen_fragment(rng, hyps, pa, pb, depth - 1);
                return Term::NatElim(
                    Box::new(Term::Nat),
                    Box::new(base),
                    Box::new(Term::Suc(Box::new(Term::Var(0)))),
                    Box::new(tgt),
                );
            }
            7 if !leaf && hyps.entails(pa) => {
                let t = gen_fragment(rng, hyps, pa, pb, depth - 1);
                return Term::PropApp(
                    Box::new(Term::PropLam(pa.clone(), Box::new(t))),
                    pa.clone(),
                );
            }
            _ => continue,
        }
    }
}

fn nbe_conv_nat(sig_env: &SigEnv, hyps: &Prop, t1: &Term, t2: &Term) -> bool {
    let mut tele = Telescope::new();
    tele.push_hyp(hyps.clone());
    normalize(sig_env, &tele, &Term::Nat, t1) == normalize(sig_env, &tele, &Term::Nat, t2)
}

#[test]
fn criterion_4_nbe_vs_oracle() {
    let t0 = Instant::now();
    let (sig, _, sig_env, pa, pb) = fragment_sig();
    let oracle = Oracle::new(&sig);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let settings = [Prop::top(), pb.clone(), pa.clone()];
    let mut conclusive = 0usize;
    for hyps in &settings {
        for _ in 0..1_000 {
            let d1 = rng.gen_range(0..=5);
            let d2 = rng.gen_range(0..=5);
            let t1 = gen_fragment(&mut rng, hyps, &pa, &pb, d1);
            let t2 = gen_fragment(&mut rng, hyps, &pa, &pb, d2);
            let nbe_eq = nbe_conv_nat(&sig_env, hyps, &t1, &t2);
            match oracle.conv(hyps, &t1, &t2) {
                Verdict::Equal => {
                    conclusive += 1;
                    assert!(nbe_eq, "oracle says equal, nbe disagrees: {t1:?} vs {t2:?}");
                }
                Verdict::Distinct => {
                    conclusive += 1;
                    assert!(
                        !nbe_eq,
                        "oracle says distinct, nbe disagrees: {t1:?} vs {t2:?}"
                    );
                }
                Verdict::Inconclusive => {}
            }
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs() < 60, "differential run took {dt:?}");
    println!(
        "criterion 4 (nbe vs oracle, 3000 pairs, {conclusive} conclusive, {dt:?}): pass"
    );
}

#[test]
fn criterion_5_normal_form_properties() {
    let (_, _, sig_env, pa, pb) = fragment_sig();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let settings = [Prop::top(), pb.clone(), pa.clone()];
    for i in 0..1_000 {
        let hyps = settings[i % settings.len()].clone();
        let d = rng.gen_range(0..=5);
        let t = gen_fragment(&mut rng, &hyps, &pa, &pb, d);
        let mut tele = Telescope::new();
        tele.push_hyp(hyps.clone());
        // idempotence; normalization also must not leak unstable neutrals
        // (the readback assertion would abort)
        let nf = normalize(&sig_env, &tele, &Term::Nat, &t);
        let nf2 = normalize(&sig_env, &tele, &Term::Nat, &nf.0);
        assert_eq!(nf, nf2, "normalize must be idempotent");
        // hypothesis strengthening preserves equality
        let d2 = rng.gen_range(0..=5);
        let t2 = gen_fragment(&mut rng, &hyps, &pa, &pb, d2);
        if normalize(&sig_env, &tele, &Term::Nat, &t2) == nf {
            let mut tele2 = Telescope::new();
            tele2.push_hyp(hyps.meet(&pa));
            assert_eq!(
                normalize(&sig_env, &tele2, &Term::Nat, &t),
                normalize(&sig_env, &tele2, &Term::Nat, &t2),
                "strengthening the hypotheses must preserve equality"
            );
        }
    }
    // eta for extension types: v = in (out v) at every sealed constant
    for (name, hyps) in [("base", Prop::top()), ("step", pb.clone()), ("base", pa.clone())] {
        let ty = sig_env.get(name).unwrap().clone();
        let env = Env::new(hyps.clone());
        let v = nbe::eval(&sig_env, &env, &Term::Const(name.into()));
        let Value::Ext(_, p, _) = &*ty else { panic!("sealed constant") };
        let roundtrip = Term::In(
            p.clone(),
            Box::new(Term::Out(p.clone(), Box::new(Term::Const(name.into())))),
        );
        let rv = nbe::eval(&sig_env, &env, &roundtrip);
        let cx = ReadbackCx::new(&sig_env, 0, hyps);
        assert!(nbe::conv(&cx, &ty, &v, &rv), "eta law for {name}");
    }
    println!("criterion 5 (normal-form properties, 1000 terms): pass");
}

#[test]
fn criterion_6_kernel_elaborator_agreement() {
    // every corpus signature re-checks; generated programs are covered in
    // the DAG criterion, which re-checks each one
    for file in [
        "plus.utt",
        "zero-plus.utt",
        "abbreviation.utt",
        "left-unit.utt",
        "left-unit-unfold-in.utt",
        "left-unit-hole1.utt",
        "left-unit-hole2.utt",
        "left-unit-hole3.utt",
        "two.utt",
        "plus-zero.utt",
        "abstract.utt",
    ] {
        let el = elab_corpus(file).unwrap();
        check_signature(&el.signature)
            .unwrap_or_else(|e| panic!("{file} fails kernel re-check: {e}"));
    }
    println!("criterion 6 (kernel re-checks all elaborated signatures): pass");
}

fn gen_type(rng: &mut ChaCha8Rng, depth: usize) -> Term {
    match if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..3) } {
        0 => Term::Nat,
        1 => Term::Id(
            Box::new(Term::Nat),
            Box::new(Term::nat_lit(rng.gen_range(0..4))),
            Box::new(Term::nat_lit(rng.gen_range(0..4))),
        ),
        _ => Term::Pi(
            Box::new(gen_type(rng, depth - 1)),
            Box::new(gen_type(rng, depth - 1)),
        ),
    }
}

#[test]
fn criterion_7_pi_injectivity() {
    let sig_env = SigEnv::new();
    let table = PropTable::new();
    let checker = Checker::new(&table, &sig_env);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    while done < 500 {
        let dom = gen_type(&mut rng, 2);
        let cod = gen_type(&mut rng, 2);
        let pi = Term::Pi(Box::new(dom.clone()), Box::new(cod.clone()));
        // mutate exactly one component
        let mutate_dom = rng.gen_bool(0.5);
        let replacement = gen_type(&mut rng, 2);
        let other = if mutate_dom {
            if replacement == dom {
                continue;
            }
            Term::Pi(Box::new(replacement), Box::new(cod.clone()))
        } else {
            if replacement == cod {
                continue;
            }
            Term::Pi(Box::new(dom.clone()), Box::new(replacement))
        };
        let cx = Cx::empty();
        checker.check_type(&cx, &pi).unwrap();
        checker.check_type(&cx, &other).unwrap();
        let env = Env::new(Prop::top());
        let rb = ReadbackCx::new(&sig_env, 0, Prop::top());
        let v1: Rc<Value> = nbe::eval(&sig_env, &env, &pi);
        let v2: Rc<Value> = nbe::eval(&sig_env, &env, &other);
        assert!(
            !nbe::conv_type(&rb, &v1, &v2),
            "distinct components must not convert: {pi:?} vs {other:?}"
        );
        let v1b = nbe::eval(&sig_env, &env, &pi.clone());
        assert!(nbe::conv_type(&rb, &v1, &v1b));
        done += 1;
    }
    println!("criterion 7 (pi injectivity, 500 pairs): pass");
}

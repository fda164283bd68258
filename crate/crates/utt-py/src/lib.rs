//! Python bindings: check source text, inspect goals and propositions,
//! print the elaborated signature, and normalize definitions under
//! assumed unfoldings.

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

use utt::check::check_signature;
use utt::elab::{elaborate, Elaborator};
use utt::nbe::normalize;
use utt::oracle::{Oracle, Verdict};
use utt::pretty::Printer;
use utt::prop::Prop;
use utt::surface::parse_program;
use utt::term::{TeleEntry, Telescope, Term};

/// A remaining goal: its number, generated constant name, source span, and
/// its type both with and without the hypotheses in scope applied.
#[pyclass(get_all, frozen, skip_from_py_object)]
#[derive(Clone)]
struct Goal {
    index: usize,
    hole_name: String,
    start: usize,
    end: usize,
    context: String,
    ty: String,
    raw_ty: String,
}

#[pymethods]
impl Goal {
    fn __repr__(&self) -> String {
        format!("?{} : {}", self.index, self.ty)
    }
}

/// The result of checking a source file.
#[pyclass(unsendable)]
struct Module {
    el: Elaborator,
}

impl Module {
    fn hyps_from(&self, assume: Vec<String>) -> PyResult<Prop> {
        let mut hyps = Prop::top();
        for name in &assume {
            if self.el.table.is_hidden_name(name) {
                return Err(PyValueError::new_err(format!(
                    "proposition `{name}` belongs to an abstract definition"
                )));
            }
            match self.el.table.lookup(name) {
                Ok(q) => hyps = hyps.meet(q),
                Err(_) => {
                    return Err(PyKeyError::new_err(format!("unknown proposition `{name}`")))
                }
            }
        }
        Ok(hyps)
    }

    fn sealed_body(&self, name: &str) -> PyResult<(&Term, &Prop)> {
        match self.el.signature.const_type(name) {
            Some(Term::Ext(a, p, _)) => Ok((a, p)),
            _ => Err(PyKeyError::new_err(format!(
                "`{name}` does not name a definition"
            ))),
        }
    }
}

#[pymethods]
impl Module {
    /// The elaborated core signature, pretty-printed.
    fn signature(&self) -> String {
        Printer::new(&self.el.table).signature(&self.el.signature)
    }

    /// The names of the checked definitions, in order.
    fn defs(&self) -> Vec<String> {
        self.el
            .signature
            .decls
            .iter()
            .filter_map(|d| match d {
                utt::term::Declaration::Const { name, .. } => Some(name.clone()),
                _ => None,
            })
            .collect()
    }

    /// The remaining goals.
    fn goals(&self) -> Vec<Goal> {
        let printer = Printer::new(&self.el.table);
        self.el
            .goals
            .iter()
            .map(|g| {
                let names: Vec<String> = g
                    .tele
                    .entries()
                    .iter()
                    .filter_map(|e| match e {
                        TeleEntry::TermVar { name, .. } => Some(name.clone()),
                        TeleEntry::PropHyp(_) => None,
                    })
                    .collect();
                Goal {
                    index: g.index,
                    hole_name: g.const_name.clone(),
                    start: g.span.start,
                    end: g.span.end,
                    context: printer.telescope(&g.tele),
                    ty: printer.term(&names, &g.ty),
                    raw_ty: printer.term(&names, &g.raw_ty),
                }
            })
            .collect()
    }

    /// The unfolding proposition of a definition, pretty-printed as a
    /// meet of definition names. Raises KeyError for abstract
    /// definitions, whose propositions are not nameable.
    fn unfolding_prop(&self, name: &str) -> PyResult<String> {
        self.sealed_body(name)?;
        match self.el.prop_of_def(name) {
            Some(p) => Ok(self.el.table.display(p)),
            None => Err(PyKeyError::new_err(format!("`{name}` is abstract"))),
        }
    }

    /// Whether unfolding `left` also licenses unfolding `right`.
    fn entails(&self, left: &str, right: &str) -> PyResult<bool> {
        let get = |name: &str| {
            self.el
                .prop_of_def(name)
                .ok_or_else(|| PyKeyError::new_err(format!("no proposition for `{name}`")))
        };
        Ok(get(left)?.entails(get(right)?))
    }

    /// Normalize a definition's body under the assumed unfoldings and
    /// pretty-print the result.
    #[pyo3(signature = (name, assume = Vec::new()))]
    fn normalize_def(&self, name: &str, assume: Vec<String>) -> PyResult<String> {
        let hyps = self.hyps_from(assume)?;
        let (a, p) = self.sealed_body(name)?;
        let (a, p) = (a.clone(), p.clone());
        let mut tele = Telescope::new();
        tele.push_hyp(hyps);
        let body = Term::Out(p, Box::new(Term::Const(name.to_owned())));
        let nf = normalize(&self.el.sig_env, &tele, &a, &body);
        Ok(Printer::new(&self.el.table).term(&[], &nf.0))
    }

    /// Ask the rewriting oracle whether two definitions' bodies are
    /// joinable under the assumed unfoldings. Returns "equal",
    /// "distinct", or "inconclusive".
    #[pyo3(signature = (left, right, assume = Vec::new()))]
    fn oracle_conv(&self, left: &str, right: &str, assume: Vec<String>) -> PyResult<String> {
        let hyps = self.hyps_from(assume)?;
        let (_, pl) = self.sealed_body(left)?;
        let (_, pr) = self.sealed_body(right)?;
        let tl = Term::Out(pl.clone(), Box::new(Term::Const(left.to_owned())));
        let tr = Term::Out(pr.clone(), Box::new(Term::Const(right.to_owned())));
        let oracle = Oracle::new(&self.el.signature);
        Ok(match oracle.conv(&hyps, &tl, &tr) {
            Verdict::Equal => "equal",
            Verdict::Distinct => "distinct",
            Verdict::Inconclusive => "inconclusive",
        }
        .to_owned())
    }

    fn __repr__(&self) -> String {
        format!(
            "<Module: {} definitions, {} goals>",
            self.defs().len(),
            self.el.goals.len()
        )
    }
}

/// Parse and check a program, returning a Module.
#[pyfunction]
fn check(source: &str) -> PyResult<Module> {
    let prog =
        parse_program(source).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let el = elaborate(&prog).map_err(|e| PyValueError::new_err(e.to_string()))?;
    check_signature(&el.signature)
        .map_err(|e| PyValueError::new_err(format!("kernel re-check failed: {e}")))?;
    Ok(Module { el })
}

#[pymodule]
fn utt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Module>()?;
    m.add_class::<Goal>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    Ok(())
}

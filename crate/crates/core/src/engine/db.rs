use std::collections::{HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use super::builtins::is_protected;
use crate::error::EngineError;
use crate::reader::{parse_program, Program};
use crate::term::{Clause, Sym, Term};
use crate::write::term_to_string;

const LIBRARY: &str = include_str!("library.pl");

pub type PredKey = (Sym, usize);

/// Indexed clause store. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct Database {
    preds: HashMap<PredKey, Arc<[Clause]>>,
    /// Predicates declared `dynamic` with no clauses; calls to them fail.
    declared: HashSet<PredKey>,
    user: Vec<PredKey>,
    warnings: Vec<String>,
}

fn library() -> &'static Program {
    static LIB: OnceLock<Program> = OnceLock::new();
    LIB.get_or_init(|| parse_program(LIBRARY).expect("library source parses"))
}

/// A bare variable in a body is `call(X)`, so cuts it is bound to stay local.
fn wrap_var_goals(mut c: Clause) -> Clause {
    for g in &mut c.body {
        if let Term::Var(_) = g {
            *g = Term::compound("call", vec![g.clone()]);
        }
    }
    c
}

fn group(clauses: &[Clause]) -> Vec<(PredKey, Vec<Clause>)> {
    let mut order: Vec<PredKey> = Vec::new();
    let mut map: HashMap<PredKey, Vec<Clause>> = HashMap::new();
    for c in clauses {
        let key = c.head.key().expect("callable head");
        if !map.contains_key(&key) {
            order.push(key);
        }
        map.entry(key).or_default().push(wrap_var_goals(c.clone()));
    }
    order
        .into_iter()
        .map(|k| {
            let cs = map.remove(&k).unwrap();
            (k, cs)
        })
        .collect()
}

/// Loads a program on top of the built-in library. A user definition of a
/// library predicate replaces the library version.
pub fn consult(program: &Program) -> Result<Database, EngineError> {
    let mut db = Database::default();
    for (key, clauses) in group(&library().clauses) {
        db.preds.insert(key, clauses.into());
    }
    for (key, clauses) in group(&program.clauses) {
        if is_protected(key.0.as_str(), key.1) {
            return Err(EngineError::BuiltinRedefinition {
                name: key.0.as_str().to_owned(),
                arity: key.1,
            });
        }
        if db.preds.contains_key(&key) {
            log::debug!("user definition replaces library {}/{}", key.0, key.1);
        }
        db.user.push(key);
        db.preds.insert(key, clauses.into());
    }
    for d in &program.directives {
        db.directive(d);
    }
    Ok(db)
}

impl Database {
    pub fn new() -> Database {
        consult(&Program::default()).expect("empty program consults")
    }

    fn directive(&mut self, d: &Term) {
        if d.is_functor("dynamic", 1) || d.is_functor("discontiguous", 1) {
            let mut specs = Vec::new();
            crate::reader::flatten_conjunction(&d.args()[0], &mut specs);
            for s in specs {
                let items: Vec<Term> = if s.is_proper_list() {
                    s.list_items().0.into_iter().cloned().collect()
                } else {
                    vec![s]
                };
                for spec in items {
                    if let (true, Term::Atom(n), Term::Int(a)) = (
                        spec.is_functor("/", 2),
                        &spec.args().first().cloned().unwrap_or(Term::nil()),
                        &spec.args().get(1).cloned().unwrap_or(Term::nil()),
                    ) {
                        if let Ok(a) = usize::try_from(a) {
                            if d.is_functor("dynamic", 1) {
                                self.declared.insert((*n, a));
                            }
                            continue;
                        }
                    }
                    self.warnings
                        .push(format!("ignored declaration {}", term_to_string(&spec)));
                }
            }
            return;
        }
        if d.is_functor("use_module", 1) || d.is_functor("use_module", 2) || d.is_functor("set_prolog_flag", 2) {
            return;
        }
        self.warnings.push(format!("directive ignored: {}", term_to_string(d)));
    }

    pub fn clauses(&self, name: Sym, arity: usize) -> Option<&Arc<[Clause]>> {
        self.preds.get(&(name, arity))
    }

    pub fn is_declared(&self, name: Sym, arity: usize) -> bool {
        self.declared.contains(&(name, arity))
    }

    /// Number of clauses for `name/arity`, zero when undefined.
    pub fn clause_count(&self, name: &str, arity: usize) -> usize {
        self.clauses(Sym::new(name), arity).map_or(0, |c| c.len())
    }

    /// Predicates defined by the consulted program, in source order.
    pub fn user_predicates(&self) -> Vec<(&'static str, usize)> {
        self.user.iter().map(|(n, a)| (n.as_str(), *a)).collect()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

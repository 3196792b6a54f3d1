//! Canonical term printing.
//!
//! Operators use the default operator table, lists print as `[a,b|T]`,
//! non-integral rationals as `N rdiv D`, and unbound variables as `_N`
//! (or by name when a name map is supplied).

use std::collections::HashMap;
use std::fmt::Write as _;

use num_traits::Signed;

use crate::ops::{OpTable, OpType};
use crate::reader::lexer::{is_alnum, is_symbol_char};
use crate::term::{Term, VarId};

pub fn format_float(x: f64) -> String {
    if x.is_finite() && x == x.trunc() && x.abs() < 1e15 {
        format!("{x:.1}")
    } else {
        format!("{x}")
    }
}

/// Whether an atom can be written without quotes.
fn atom_is_plain(name: &str) -> bool {
    if matches!(name, "[]" | "{}" | "!" | ";" | ",") {
        return name != ",";
    }
    let mut chars = name.chars();
    match chars.next() {
        None => false,
        Some(c) if c.is_lowercase() => name.chars().all(is_alnum),
        Some(_) => name.chars().all(is_symbol_char),
    }
}

pub fn quote_atom(name: &str) -> String {
    if atom_is_plain(name) {
        return name.to_owned();
    }
    let mut out = String::from("'");
    for c in name.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

pub struct Writer<'a> {
    ops: &'a OpTable,
    names: Option<&'a HashMap<VarId, String>>,
    quoted: bool,
}

impl<'a> Writer<'a> {
    pub fn new(ops: &'a OpTable) -> Self {
        Writer {
            ops,
            names: None,
            quoted: true,
        }
    }

    /// Atoms are written without quotes, as `write/1` does.
    pub fn unquoted(mut self) -> Self {
        self.quoted = false;
        self
    }

    fn atom(&self, name: &str) -> String {
        if self.quoted {
            quote_atom(name)
        } else {
            name.to_owned()
        }
    }

    pub fn with_names(mut self, names: &'a HashMap<VarId, String>) -> Self {
        self.names = Some(names);
        self
    }

    pub fn write(&self, t: &Term) -> String {
        let mut out = String::new();
        self.term(t, 1200, &mut out);
        out
    }

    fn term(&self, t: &Term, max: u16, out: &mut String) {
        match t {
            Term::Var(v) => match self.names.and_then(|n| n.get(v)) {
                Some(name) => out.push_str(name),
                None => {
                    let _ = write!(out, "_{}", v.0);
                }
            },
            Term::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Term::Float(x) => out.push_str(&format_float(*x)),
            Term::Rat(r) => {
                let wrap = max < 400;
                if wrap {
                    out.push('(');
                }
                let _ = write!(out, "{} rdiv {}", r.numer(), r.denom());
                if wrap {
                    out.push(')');
                }
            }
            Term::Atom(s) => {
                let name = s.as_str();
                let is_op = self.ops.is_op(name);
                if is_op && max < 1200 && !matches!(name, "[]" | "{}" | "!" | ";") {
                    // bare operator atoms are safe only as whole arguments
                    if max >= 999 {
                        out.push_str(&self.atom(name));
                    } else {
                        out.push('(');
                        out.push_str(&self.atom(name));
                        out.push(')');
                    }
                } else {
                    out.push_str(&self.atom(name));
                }
            }
            Term::Compound(f, args) => {
                let name = f.as_str();
                if name == "." && args.len() == 2 {
                    self.list(t, out);
                    return;
                }
                if name == "{}" && args.len() == 1 {
                    out.push('{');
                    self.term(&args[0], 1200, out);
                    out.push('}');
                    return;
                }
                if args.len() == 2 {
                    if let Some(def) = self.ops.infix(name) {
                        let wrap = def.priority > max;
                        if wrap {
                            out.push('(');
                        }
                        let mut left = String::new();
                        self.operand(&args[0], def.left_max(), &mut left);
                        let mut right = String::new();
                        self.operand(&args[1], def.right_max(), &mut right);
                        out.push_str(&left);
                        let op = if name == "," { "," } else { name };
                        let alpha = op.chars().next().is_some_and(|c| c.is_alphabetic());
                        let pad_left = alpha
                            || (left.chars().last().is_some_and(is_symbol_char)
                                && op.chars().next().is_some_and(is_symbol_char));
                        let pad_right = alpha
                            || (right.chars().next().is_some_and(is_symbol_char)
                                && op.chars().last().is_some_and(is_symbol_char))
                            || (op.chars().all(is_symbol_char) && is_negative_literal_start(&args[1]));
                        if pad_left {
                            out.push(' ');
                        }
                        out.push_str(&self.op_atom(op));
                        if pad_right {
                            out.push(' ');
                        }
                        out.push_str(&right);
                        if wrap {
                            out.push(')');
                        }
                        return;
                    }
                }
                if args.len() == 1 {
                    if let Some(def) = self.ops.prefix(name) {
                        if name != "-" && name != "+" || !args[0].is_number() {
                            let wrap = def.priority > max;
                            if wrap {
                                out.push('(');
                            }
                            let mut arg = String::new();
                            let arg_max = if def.kind == OpType::Fy {
                                def.priority
                            } else {
                                def.priority - 1
                            };
                            // an operator atom as operand would be read as an operator
                            self.operand(&args[0], arg_max, &mut arg);
                            out.push_str(&self.atom(name));
                            let glue = arg.starts_with('(')
                                || (name.chars().all(is_symbol_char)
                                    && arg.chars().next().is_some_and(|c| !c.is_alphanumeric() && c != '_'))
                                || name.chars().next().is_some_and(|c| c.is_alphabetic())
                                // a sign glued to a digit reads back as a literal
                                || (name == "-" || name == "+") && arg.starts_with(|c: char| c.is_ascii_digit());
                            if glue {
                                out.push(' ');
                            }
                            out.push_str(&arg);
                            if wrap {
                                out.push(')');
                            }
                            return;
                        }
                    }
                }
                out.push_str(&self.atom(name));
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.term(a, 999, out);
                }
                out.push(')');
            }
        }
    }

    /// Operand of an operator; operator atoms are bracketed so they are not
    /// read back as operators.
    fn operand(&self, t: &Term, max: u16, out: &mut String) {
        match t {
            Term::Atom(a) if self.ops.is_op(a.as_str()) || a.as_str() == ";" => {
                out.push('(');
                out.push_str(&self.atom(a.as_str()));
                out.push(')');
            }
            _ => self.term(t, max, out),
        }
    }

    fn op_atom(&self, op: &str) -> String {
        if self.quoted {
            quote_atom_op(op)
        } else {
            op.to_owned()
        }
    }

    fn list(&self, t: &Term, out: &mut String) {
        let (items, tail) = t.list_items();
        out.push('[');
        for (i, item) in items.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            self.term(item, 999, out);
        }
        if !tail.is_nil() {
            out.push('|');
            self.term(tail, 999, out);
        }
        out.push(']');
    }
}

fn quote_atom_op(op: &str) -> String {
    if op == "," {
        ",".to_owned()
    } else if op == "|" {
        "'|'".to_owned()
    } else {
        quote_atom(op)
    }
}

fn is_negative_literal_start(t: &Term) -> bool {
    match t {
        Term::Int(i) => i.is_negative(),
        Term::Rat(r) => r.is_negative(),
        Term::Float(f) => *f < 0.0,
        _ => false,
    }
}

/// Writes a term with the default operator table.
pub fn term_to_string(t: &Term) -> String {
    thread_local! {
        static OPS: OpTable = OpTable::default();
    }
    OPS.with(|ops| Writer::new(ops).write(t))
}

/// Writes a term without quoting atoms.
pub fn term_to_string_unquoted(t: &Term) -> String {
    let ops = OpTable::default();
    Writer::new(&ops).unquoted().write(t)
}

/// Writes a term naming variables from `names`.
pub fn term_to_string_named(t: &Term, names: &HashMap<VarId, String>) -> String {
    let ops = OpTable::default();
    Writer::new(&ops).with_names(names).write(t)
}

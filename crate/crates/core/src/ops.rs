//! Operator table shared by the reader and the term writer.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpType {
    Xfx,
    Xfy,
    Yfx,
    Fy,
    Fx,
    Xf,
    Yf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fixity {
    Prefix,
    Infix,
    Postfix,
}

impl OpType {
    pub fn fixity(self) -> Fixity {
        match self {
            OpType::Xfx | OpType::Xfy | OpType::Yfx => Fixity::Infix,
            OpType::Fy | OpType::Fx => Fixity::Prefix,
            OpType::Xf | OpType::Yf => Fixity::Postfix,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpDef {
    pub priority: u16,
    pub kind: OpType,
}

impl OpDef {
    /// Maximum priority allowed for the left argument.
    pub fn left_max(self) -> u16 {
        match self.kind {
            OpType::Yfx | OpType::Yf => self.priority,
            _ => self.priority - 1,
        }
    }

    /// Maximum priority allowed for the right (or only prefix) argument.
    pub fn right_max(self) -> u16 {
        match self.kind {
            OpType::Xfy | OpType::Fy => self.priority,
            _ => self.priority - 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OpTable {
    entries: HashMap<(String, Fixity), OpDef>,
}

impl Default for OpTable {
    fn default() -> Self {
        use OpType::*;
        let mut t = OpTable {
            entries: HashMap::new(),
        };
        t.add(1200, Xfx, &[":-", "-->"]);
        t.add(1200, Fx, &[":-", "?-"]);
        t.add(1150, Fx, &["dynamic", "discontiguous"]);
        t.add(1100, Xfy, &[";", "|"]);
        t.add(1050, Xfy, &["->"]);
        t.add(1000, Xfy, &[","]);
        t.add(900, Fy, &["\\+"]);
        t.add(
            700,
            Xfx,
            &[
                "=", "\\=", "==", "\\==", "@<", "@>", "@=<", "@>=", "=..", "is", "=:=", "=\\=", "<", ">", "=<", ">=",
                "#=", "#\\=", "#<", "#>", "#=<", "#>=", "in", "ins",
            ],
        );
        t.add(500, Yfx, &["+", "-", "/\\", "\\/", "xor"]);
        t.add(450, Xfx, &[".."]);
        t.add(400, Yfx, &["*", "/", "//", "mod", "rem", "rdiv", "div", "<<", ">>"]);
        t.add(200, Xfx, &["**"]);
        t.add(200, Xfy, &["^"]);
        t.add(200, Fy, &["-", "+", "\\"]);
        t
    }
}

impl OpTable {
    pub fn empty() -> OpTable {
        OpTable {
            entries: HashMap::new(),
        }
    }

    pub fn add(&mut self, priority: u16, kind: OpType, names: &[&str]) {
        assert!((1..=1200).contains(&priority));
        for name in names {
            self.entries
                .insert((name.to_string(), kind.fixity()), OpDef { priority, kind });
        }
    }

    pub fn get(&self, name: &str, fixity: Fixity) -> Option<OpDef> {
        self.entries.get(&(name.to_string(), fixity)).copied()
    }

    pub fn infix(&self, name: &str) -> Option<OpDef> {
        self.get(name, Fixity::Infix)
    }

    pub fn prefix(&self, name: &str) -> Option<OpDef> {
        self.get(name, Fixity::Prefix)
    }

    pub fn postfix(&self, name: &str) -> Option<OpDef> {
        self.get(name, Fixity::Postfix)
    }

    pub fn is_op(&self, name: &str) -> bool {
        self.infix(name).is_some() || self.prefix(name).is_some() || self.postfix(name).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, OpDef)> {
        self.entries.iter().map(|((n, _), d)| (n.as_str(), *d))
    }
}

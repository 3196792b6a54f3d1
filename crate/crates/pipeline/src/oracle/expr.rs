//! Infix expression language shared by the CSP and linear oracles.
//!
//! Precedence, loosest first: `or`/`||`, `and`/`&&`, `not`/`!`, relations
//! (`= == != <> < <= > >=`), `+ -`, `* / mod %`, unary minus. Calls are
//! `abs(e)`, `min(a, b)` and `max(a, b)`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::OracleError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigRational),
    Var(String),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

impl Expr {
    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Expr::Neg(e) | Expr::Not(e) => e.vars(out),
            Expr::Bin(_, a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Sym(&'static str),
}

const SYMBOLS: [&str; 16] = [
    "==", "!=", "<>", "<=", ">=", "&&", "||", "+", "-", "*", "/", "%", "(", ")", ",", "=",
];
const SINGLE: [&str; 3] = ["<", ">", "!"];

fn tokenize(src: &str) -> Result<Vec<Tok>, OracleError> {
    let mut out = Vec::new();
    let b = src.as_bytes();
    let mut i = 0;
    'outer: while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let mut digits = src[start..i].to_owned();
            let mut scale = 0u32;
            if i + 1 < b.len() && b[i] == b'.' && b[i + 1].is_ascii_digit() {
                i += 1;
                let fs = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                digits.push_str(&src[fs..i]);
                scale = (i - fs) as u32;
            }
            let n: BigInt = digits
                .parse()
                .map_err(|_| OracleError::Parse(format!("bad number in `{src}`")))?;
            out.push(Tok::Num(BigRational::new(n, BigInt::from(10).pow(scale))));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push(Tok::Ident(src[start..i].to_owned()));
            continue;
        }
        for s in SYMBOLS.iter().chain(SINGLE.iter()) {
            if src[i..].starts_with(s) {
                out.push(Tok::Sym(s));
                i += s.len();
                continue 'outer;
            }
        }
        return Err(OracleError::Parse(format!("unexpected `{c}` in `{src}`")));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(t)) if *t == s)
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(t)) if t == w)
    }

    fn err(&self, what: &str) -> OracleError {
        OracleError::Parse(format!("{what} at token {} in `{}`", self.pos, self.src))
    }

    fn expect(&mut self, s: &str) -> Result<(), OracleError> {
        if self.at_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{s}`")))
        }
    }

    fn or(&mut self) -> Result<Expr, OracleError> {
        let mut e = self.and()?;
        while self.at_sym("||") || self.at_word("or") {
            self.pos += 1;
            e = Expr::Bin(BinOp::Or, Box::new(e), Box::new(self.and()?));
        }
        Ok(e)
    }

    fn and(&mut self) -> Result<Expr, OracleError> {
        let mut e = self.not()?;
        while self.at_sym("&&") || self.at_word("and") {
            self.pos += 1;
            e = Expr::Bin(BinOp::And, Box::new(e), Box::new(self.not()?));
        }
        Ok(e)
    }

    fn not(&mut self) -> Result<Expr, OracleError> {
        if self.at_sym("!") || self.at_word("not") {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.not()?)));
        }
        self.relation()
    }

    fn relation(&mut self) -> Result<Expr, OracleError> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Some(Tok::Sym("=" | "==")) => BinOp::Eq,
            Some(Tok::Sym("!=" | "<>")) => BinOp::Ne,
            Some(Tok::Sym("<")) => BinOp::Lt,
            Some(Tok::Sym("<=")) => BinOp::Le,
            Some(Tok::Sym(">")) => BinOp::Gt,
            Some(Tok::Sym(">=")) => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.sum()?;
        Ok(Expr::Bin(op, Box::new(lhs), Box::new(rhs)))
    }

    fn sum(&mut self) -> Result<Expr, OracleError> {
        let mut e = self.product()?;
        loop {
            let op = if self.at_sym("+") {
                BinOp::Add
            } else if self.at_sym("-") {
                BinOp::Sub
            } else {
                return Ok(e);
            };
            self.pos += 1;
            e = Expr::Bin(op, Box::new(e), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Expr, OracleError> {
        let mut e = self.unary()?;
        loop {
            let op = if self.at_sym("*") {
                BinOp::Mul
            } else if self.at_sym("/") {
                BinOp::Div
            } else if self.at_sym("%") || self.at_word("mod") {
                BinOp::Mod
            } else {
                return Ok(e);
            };
            self.pos += 1;
            e = Expr::Bin(op, Box::new(e), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, OracleError> {
        if self.at_sym("-") {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, OracleError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(name)) if !matches!(name.as_str(), "and" | "or" | "not" | "mod") => {
                self.pos += 1;
                if !self.at_sym("(") {
                    return Ok(Expr::Var(name));
                }
                self.pos += 1;
                let mut args = vec![self.or()?];
                while self.at_sym(",") {
                    self.pos += 1;
                    args.push(self.or()?);
                }
                self.expect(")")?;
                let arity_ok = match name.as_str() {
                    "abs" => args.len() == 1,
                    "min" | "max" => args.len() == 2,
                    _ => return Err(self.err(&format!("unknown function `{name}`"))),
                };
                if !arity_ok {
                    return Err(self.err(&format!("wrong number of arguments to `{name}`")));
                }
                Ok(Expr::Call(name, args))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let e = self.or()?;
                self.expect(")")?;
                Ok(e)
            }
            _ => Err(self.err("expected an operand")),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, OracleError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        src,
    };
    let e = p.or()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

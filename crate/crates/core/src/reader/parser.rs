use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::lexer::{tokenize, Token, TokenKind};
use crate::error::{Pos, SyntaxError};
use crate::ops::OpTable;
use crate::term::{Clause, Term, VarId};

/// A consulted source file: clauses in source order plus directives.
#[derive(Debug, Clone, Default)]
pub struct Program {
    pub clauses: Vec<Clause>,
    pub directives: Vec<Term>,
    /// Comment text found in the source, in order. Never affects semantics.
    pub comments: Vec<String>,
}

/// A parsed query with its named variables numbered from zero.
#[derive(Debug, Clone)]
pub struct Query {
    pub goal: Term,
    pub var_names: Vec<(String, VarId)>,
    pub nvars: u32,
}

impl Query {
    pub fn var(&self, name: &str) -> Option<VarId> {
        self.var_names.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

struct Parser<'a> {
    toks: &'a [Token],
    i: usize,
    ops: &'a OpTable,
    vars: Vec<(String, VarId)>,
    nvars: u32,
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [Token], ops: &'a OpTable) -> Self {
        Parser {
            toks,
            i: 0,
            ops,
            vars: Vec::new(),
            nvars: 0,
        }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.i.min(self.toks.len() - 1)]
    }

    fn peek_at(&self, k: usize) -> Option<&Token> {
        self.toks.get(self.i + k)
    }

    fn advance(&mut self) -> &Token {
        let t = &self.toks[self.i.min(self.toks.len() - 1)];
        if self.i < self.toks.len() - 1 {
            self.i += 1;
        }
        t
    }

    fn expected(&self, what: &str) -> SyntaxError {
        SyntaxError::Parse {
            pos: self.peek().pos,
            expected: what.to_owned(),
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        let t = self.peek();
        t.kind == TokenKind::Punct && t.text == p
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), SyntaxError> {
        if self.is_punct(p) {
            self.advance();
            Ok(())
        } else {
            Err(self.expected(&format!("'{p}'")))
        }
    }

    fn reset_vars(&mut self) {
        self.vars.clear();
        self.nvars = 0;
    }

    fn var(&mut self, name: &str) -> Term {
        if name == "_" {
            let v = VarId(self.nvars);
            self.nvars += 1;
            return Term::Var(v);
        }
        if let Some((_, v)) = self.vars.iter().find(|(n, _)| n == name) {
            return Term::Var(*v);
        }
        let v = VarId(self.nvars);
        self.nvars += 1;
        self.vars.push((name.to_owned(), v));
        Term::Var(v)
    }

    /// Name of an operator-capable token at the cursor, if any.
    fn op_name(tok: &Token) -> Option<&str> {
        match tok.kind {
            TokenKind::Atom | TokenKind::Symbol => Some(&tok.text),
            TokenKind::Punct if tok.text == "," || tok.text == "|" => Some(&tok.text),
            _ => None,
        }
    }

    fn check_hash_symbol(&self, tok: &Token) -> Result<(), SyntaxError> {
        if tok.kind == TokenKind::Symbol && tok.text.starts_with('#') && !self.ops.is_op(&tok.text) {
            return Err(SyntaxError::Parse {
                pos: tok.pos,
                expected: format!("known operator (found unknown {})", tok.text),
            });
        }
        Ok(())
    }

    fn parse(&mut self, max: u16) -> Result<(Term, u16), SyntaxError> {
        let (mut left, mut left_pri) = self.primary(max)?;
        loop {
            let tok = self.peek().clone();
            let Some(name) = Self::op_name(&tok) else {
                break;
            };
            self.check_hash_symbol(&tok)?;
            if let Some(def) = self.ops.infix(name) {
                if def.priority > max {
                    break;
                }
                if left_pri > def.left_max() {
                    return Err(SyntaxError::OperatorClash {
                        pos: tok.pos,
                        message: format!(
                            "left operand of {} has priority {} > {}",
                            name,
                            left_pri,
                            def.left_max()
                        ),
                    });
                }
                self.advance();
                let (right, _) = self.parse(def.right_max())?;
                let functor = if name == "|" { ";" } else { name };
                left = build_compound(functor, vec![left, right]);
                left_pri = def.priority;
                continue;
            }
            if let Some(def) = self.ops.postfix(name) {
                if def.priority > max || left_pri > def.left_max() {
                    break;
                }
                self.advance();
                left = build_compound(name, vec![left]);
                left_pri = def.priority;
                continue;
            }
            break;
        }
        Ok((left, left_pri))
    }

    /// Whether the token after a prefix operator can begin its operand.
    fn starts_operand(&self, tok: &Token) -> bool {
        match tok.kind {
            TokenKind::Integer | TokenKind::Decimal | TokenKind::Variable => true,
            TokenKind::Atom => true,
            TokenKind::Punct => matches!(tok.text.as_str(), "(" | "[" | "{"),
            TokenKind::Symbol => {
                let infix_only = self.ops.infix(&tok.text).is_some() && self.ops.prefix(&tok.text).is_none();
                !infix_only
            }
            TokenKind::End | TokenKind::EndOfInput => false,
        }
    }

    fn arg_list(&mut self) -> Result<Vec<Term>, SyntaxError> {
        let mut args = vec![self.parse(999)?.0];
        while self.is_punct(",") {
            self.advance();
            args.push(self.parse(999)?.0);
        }
        self.expect_punct(")")?;
        Ok(args)
    }

    fn primary(&mut self, max: u16) -> Result<(Term, u16), SyntaxError> {
        let tok = self.advance().clone();
        match tok.kind {
            TokenKind::Integer => Ok((Term::Int(parse_int(&tok)?), 0)),
            TokenKind::Decimal => Ok((Term::rational(parse_decimal(&tok)?), 0)),
            TokenKind::Variable => Ok((self.var(&tok.text), 0)),
            TokenKind::Punct => match tok.text.as_str() {
                "(" => {
                    let (t, _) = self.parse(1200)?;
                    self.expect_punct(")")?;
                    Ok((t, 0))
                }
                "[" => {
                    if self.is_punct("]") {
                        self.advance();
                        return self.name_term("[]", &tok, max);
                    }
                    let mut items = vec![self.parse(999)?.0];
                    while self.is_punct(",") {
                        self.advance();
                        items.push(self.parse(999)?.0);
                    }
                    let tail = if self.is_punct("|") {
                        self.advance();
                        self.parse(999)?.0
                    } else {
                        Term::nil()
                    };
                    self.expect_punct("]")?;
                    Ok((Term::list_with_tail(items, tail), 0))
                }
                "{" => {
                    if self.is_punct("}") {
                        self.advance();
                        return self.name_term("{}", &tok, max);
                    }
                    let (t, _) = self.parse(1200)?;
                    self.expect_punct("}")?;
                    Ok((Term::compound("{}", vec![t]), 0))
                }
                _ => Err(SyntaxError::Parse {
                    pos: tok.pos,
                    expected: format!("term (found '{}')", tok.text),
                }),
            },
            TokenKind::Atom | TokenKind::Symbol => {
                self.check_hash_symbol(&tok)?;
                self.name_term(&tok.text.clone(), &tok, max)
            }
            TokenKind::End | TokenKind::EndOfInput => Err(SyntaxError::Parse {
                pos: tok.pos,
                expected: "term".to_owned(),
            }),
        }
    }

    /// Continues after a name token: functional notation, negative
    /// literal, prefix operator application, or plain atom.
    fn name_term(&mut self, name: &str, tok: &Token, max: u16) -> Result<(Term, u16), SyntaxError> {
        let next = self.peek().clone();
        if next.kind == TokenKind::Punct && next.text == "(" && !next.layout_before {
            self.advance();
            let args = self.arg_list()?;
            return Ok((build_compound(name, args), 0));
        }
        if name == "-"
            && tok.kind == TokenKind::Symbol
            && !next.layout_before
            && matches!(next.kind, TokenKind::Integer | TokenKind::Decimal)
        {
            self.advance();
            let t = match next.kind {
                TokenKind::Integer => Term::Int(-parse_int(&next)?),
                _ => Term::rational(-parse_decimal(&next)?),
            };
            return Ok((t, 0));
        }
        if let Some(def) = self.ops.prefix(name) {
            // an infix operator following the name means the name is an operand
            let functional = matches!(next.kind, TokenKind::Atom | TokenKind::Symbol)
                && self.peek_at(1).is_some_and(|t| t.text == "(" && !t.layout_before);
            let next_is_infix = Self::op_name(&next).is_some_and(|n| self.ops.infix(n).is_some()) && !functional;
            if functional || self.starts_operand(&next) && !(next_is_infix && self.ops.prefix(&next.text).is_none()) {
                let pri = def.priority.min(max);
                let arg_max = def.right_max().min(pri);
                let (arg, _) = self.parse(arg_max)?;
                return Ok((build_compound(name, vec![arg]), pri));
            }
            return Ok((Term::atom(name), 0));
        }
        Ok((Term::atom(name), 0))
    }
}

fn parse_int(tok: &Token) -> Result<BigInt, SyntaxError> {
    tok.text.parse::<BigInt>().map_err(|_| SyntaxError::Parse {
        pos: tok.pos,
        expected: "integer".to_owned(),
    })
}

/// Converts decimal notation to an exact rational.
fn parse_decimal(tok: &Token) -> Result<BigRational, SyntaxError> {
    let bad = || SyntaxError::Parse {
        pos: tok.pos,
        expected: "decimal number".to_owned(),
    };
    let (mantissa, exp) = match tok.text.find('e') {
        Some(i) => (&tok.text[..i], tok.text[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (tok.text.as_str(), 0),
    };
    let (whole, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

/// Builds a compound, folding canonical `N rdiv D` into an exact rational.
fn build_compound(name: &str, args: Vec<Term>) -> Term {
    if name == "rdiv" && args.len() == 2 {
        if let (Term::Int(n), Term::Int(d)) = (&args[0], &args[1]) {
            if d.is_positive() && !d.is_one() && n.gcd(d).is_one() && !n.is_zero() {
                return Term::Rat(BigRational::new(n.clone(), d.clone()));
            }
        }
    }
    Term::compound(name, args)
}

/// Parses one term from a token slice, numbering variables from zero.
pub fn parse_term(tokens: &[Token], ops: &OpTable, max_priority: u16) -> Result<Term, SyntaxError> {
    if tokens.is_empty() {
        return Err(SyntaxError::Parse {
            pos: Pos::default(),
            expected: "term".to_owned(),
        });
    }
    let mut p = Parser::new(tokens, ops);
    let (t, _) = p.parse(max_priority)?;
    let tok = p.peek();
    if !matches!(tok.kind, TokenKind::End | TokenKind::EndOfInput) {
        return Err(p.expected("operator or end of term"));
    }
    Ok(t)
}

/// Convenience wrapper: tokenize and parse a single term with the default
/// operator table.
pub fn read_term(source: &str) -> Result<Term, SyntaxError> {
    let toks = tokenize(source)?;
    parse_term(&toks, &OpTable::default(), 1200)
}

/// Parses a query such as `problem(N)` or `?- member(X, L).`
pub fn parse_query(source: &str) -> Result<Query, SyntaxError> {
    parse_query_with(source, &OpTable::default())
}

pub fn parse_query_with(source: &str, ops: &OpTable) -> Result<Query, SyntaxError> {
    let toks = tokenize(source)?;
    let mut p = Parser::new(&toks, ops);
    let (mut goal, _) = p.parse(1200)?;
    if goal.is_functor("?-", 1) {
        goal = goal.args()[0].clone();
    }
    if p.peek().kind == TokenKind::End {
        p.advance();
    }
    if p.peek().kind != TokenKind::EndOfInput {
        return Err(p.expected("end of query"));
    }
    Ok(Query {
        goal,
        var_names: p.vars.clone(),
        nvars: p.nvars,
    })
}

/// Splits a comma conjunction into its goals.
pub fn flatten_conjunction(t: &Term, out: &mut Vec<Term>) {
    if t.is_functor(",", 2) {
        flatten_conjunction(&t.args()[0], out);
        flatten_conjunction(&t.args()[1], out);
    } else {
        out.push(t.clone());
    }
}

pub fn parse_program(source: &str) -> Result<Program, SyntaxError> {
    parse_program_with(source, &OpTable::default())
}

pub fn parse_program_with(source: &str, ops: &OpTable) -> Result<Program, SyntaxError> {
    let toks = tokenize(source)?;
    let mut program = Program::default();
    for t in &toks {
        program.comments.extend(t.comments.iter().cloned());
    }
    let mut p = Parser::new(&toks, ops);
    while p.peek().kind != TokenKind::EndOfInput {
        p.reset_vars();
        let start = p.peek().pos;
        let (term, _) = p.parse(1200)?;
        if p.peek().kind != TokenKind::End {
            return Err(p.expected("operator or '.'"));
        }
        p.advance();
        if term.is_functor(":-", 1) {
            program.directives.push(term.args()[0].clone());
            continue;
        }
        let (head, body) = if term.is_functor(":-", 2) {
            let mut goals = Vec::new();
            flatten_conjunction(&term.args()[1], &mut goals);
            (term.args()[0].clone(), goals)
        } else {
            (term, Vec::new())
        };
        if !head.is_callable() {
            return Err(SyntaxError::Parse {
                pos: start,
                expected: "callable clause head".to_owned(),
            });
        }
        let body = body.into_iter().filter(|g| !g.is_functor("true", 0)).collect();
        program.clauses.push(Clause {
            head,
            body,
            nvars: p.nvars,
        });
    }
    Ok(program)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::write::term_to_string;

    fn show(src: &str) -> String {
        term_to_string(&read_term(src).unwrap())
    }

    #[test]
    fn priorities_and_associativity() {
        let t = read_term("1000 * Digit4 + 100 * Digit3").unwrap();
        let expect = Term::compound(
            "+",
            vec![
                Term::compound("*", vec![Term::int(1000), Term::Var(VarId(0))]),
                Term::compound("*", vec![Term::int(100), Term::Var(VarId(1))]),
            ],
        );
        assert_eq!(t, expect);
        let t = read_term("a - b - c").unwrap();
        assert!(t.is_functor("-", 2));
        assert!(t.args()[0].is_functor("-", 2));
    }

    #[test]
    fn atom_and_disjunction() {
        assert_eq!(read_term("a").unwrap(), Term::atom("a"));
        let t = read_term("(4 * Digit1 #= Digit2; 4 * Digit1 #= Digit3; 4 * Digit1 #= Digit4)").unwrap();
        assert!(t.is_functor(";", 2));
        assert!(t.args()[0].is_functor("#=", 2));
        // right-associated
        assert!(t.args()[1].is_functor(";", 2));
    }

    #[test]
    fn negative_numbers_and_prefix_minus() {
        assert_eq!(read_term("-3").unwrap(), Term::int(-3));
        assert!(read_term("- 3").unwrap().is_functor("-", 1));
        assert!(read_term("-X").unwrap().is_functor("-", 1));
        assert_eq!(show("[1,-2,3]"), "[1,-2,3]");
        assert_eq!(show("a - -1"), "a- -1");
        assert_eq!(show("f(-)"), "f(-)");
    }

    #[test]
    fn decimals_become_rationals() {
        assert_eq!(show("0.5"), "1 rdiv 2");
        assert_eq!(read_term("2.0").unwrap(), Term::int(2));
        assert_eq!(read_term("1.5e1").unwrap(), Term::int(15));
    }

    #[test]
    fn operator_clash() {
        assert!(matches!(read_term("a = b = c"), Err(SyntaxError::OperatorClash { .. })));
    }

    #[test]
    fn unknown_hash_operator() {
        assert!(matches!(read_term("X #<==> Y"), Err(SyntaxError::Parse { .. })));
    }

    #[test]
    fn braces_and_lists() {
        let t = read_term("{X = Y + 1}").unwrap();
        assert!(t.is_functor("{}", 1));
        assert_eq!(show("[a,b|T]"), "[a,b|_0]");
        assert_eq!(show("'hello world'"), "'hello world'");
        assert_eq!(show("\"str\""), "str");
    }

    #[test]
    fn programs() {
        let p = parse_program("f(a). f(b).").unwrap();
        assert_eq!(p.clauses.len(), 2);
        assert_eq!(p.clauses[0].head, Term::compound("f", vec![Term::atom("a")]));
        assert_eq!(p.clauses[1].head, Term::compound("f", vec![Term::atom("b")]));
        let err = parse_program("p :- q").unwrap_err();
        assert!(matches!(
            err,
            SyntaxError::Parse {
                pos: Pos { line: 1, col: 7 },
                ..
            }
        ));
        let p = parse_program(":- use_module(library(clpfd)).\np(X) :- q(X), r.").unwrap();
        assert_eq!(p.directives.len(), 1);
        assert_eq!(p.clauses[0].body.len(), 2);
        assert_eq!(p.clauses[0].nvars, 1);
    }

    #[test]
    fn queries() {
        let q = parse_query("?- member(X, [1,2]), Y = X.").unwrap();
        assert_eq!(q.var_names.len(), 2);
        assert_eq!(q.var("Y"), Some(VarId(1)));
        let q = parse_query("problem(N)").unwrap();
        assert_eq!(q.nvars, 1);
    }

    #[test]
    fn head_must_be_callable() {
        assert!(parse_program("X :- true.").is_err());
        assert!(parse_program("3.").is_err());
    }
}

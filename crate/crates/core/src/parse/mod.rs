//! Reader and printer for the rule language, plus the JSON encoding.
//!
//! ```text
//! person(tim).
//! person(X) -> exists Y. fatherOf(Y,X).
//! ? person(X), fatherOf(X,tim) | person(john).
//! ```
//!
//! Lowercase identifiers are predicates or constants, uppercase ones are
//! variables. Numerals only appear inside canonical shapes such as
//! `f_[1,c1]`. Nulls (`_:n3`) are accepted by [`parse_instance`] only.

pub mod json;
mod lexer;

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use lexer::{Tok, Token};

use crate::logic::{Atom, Database, Instance, Label, Ontology, Predicate, Program, Query, Rule, Shape, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(text, false)?;
    let mut facts = Vec::new();
    let mut rules = Vec::new();
    let mut queries = Vec::new();
    while !p.at_end() {
        match p.statement(rules.len() + 1)? {
            Statement::Fact(a) => facts.push(a),
            Statement::Rule(r) => rules.push(r),
            Statement::Query(q) => queries.push(q),
        }
    }
    let database = Database::new(facts).expect("facts checked ground by the parser");
    Ok(Program {
        database,
        ontology: Ontology::normalized(rules),
        queries,
    })
}

/// Reads a list of ground facts that may mention nulls.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut p = Parser::new(text, true)?;
    let mut inst = Instance::new();
    while !p.at_end() {
        let (line, column) = p.here();
        match p.statement(1)? {
            Statement::Fact(a) => {
                inst.insert(a);
            }
            _ => return Err(ParseError::new(line, column, "only facts are allowed in an instance")),
        }
    }
    Ok(inst)
}

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for a in p.database.iter() {
        let _ = writeln!(out, "{a}.");
    }
    if !p.ontology.is_empty() {
        if !out.is_empty() {
            out.push('\n');
        }
        for r in &p.ontology.rules {
            let _ = writeln!(out, "{r}");
        }
    }
    if !p.queries.is_empty() {
        if !out.is_empty() {
            out.push('\n');
        }
        for q in &p.queries {
            let _ = writeln!(out, "{q}");
        }
    }
    out
}

enum Statement {
    Fact(Atom),
    Rule(Rule),
    Query(Query),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    allow_nulls: bool,
    arities: HashMap<Predicate, usize>,
    end: (usize, usize),
}

impl Parser {
    fn new(text: &str, allow_nulls: bool) -> Result<Self, ParseError> {
        let toks = lexer::tokenize(text)?;
        let lines = text.split('\n').count().max(1);
        let last = text.rsplit('\n').next().unwrap_or("");
        Ok(Parser {
            toks,
            pos: 0,
            allow_nulls,
            arities: HashMap::new(),
            end: (lines, last.chars().count() + 1),
        })
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.column)).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (l, c) = self.here();
        Err(ParseError::new(l, c, msg))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.tok)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn statement(&mut self, rule_index: usize) -> Result<Statement, ParseError> {
        if self.eat(&Tok::Question) {
            return self.query().map(Statement::Query);
        }
        let (line, column) = self.here();
        let atoms = self.conjunction()?;
        if self.eat(&Tok::Arrow) {
            return self.rule_tail(atoms, rule_index, line, column).map(Statement::Rule);
        }
        if atoms.len() != 1 {
            return self.err("expected '->' after rule body");
        }
        self.expect(&Tok::Dot, "'.' after fact")?;
        let fact = atoms.into_iter().next().unwrap();
        if fact.args.iter().any(Term::is_variable) {
            return Err(ParseError::new(
                line,
                column,
                format!("fact {fact} mentions a variable"),
            ));
        }
        Ok(Statement::Fact(fact))
    }

    fn rule_tail(&mut self, body: Vec<Atom>, index: usize, line: usize, column: usize) -> Result<Rule, ParseError> {
        let mut declared = Vec::new();
        if matches!(self.peek(), Some(Tok::Ident(w)) if w == "exists") && matches!(self.peek2(), Some(Tok::Var(_))) {
            self.pos += 1;
            loop {
                match self.peek().cloned() {
                    Some(Tok::Var(v)) => {
                        self.pos += 1;
                        declared.push(Term::variable(&v));
                    }
                    _ => return self.err("expected a variable after 'exists'"),
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::Dot, "'.' after the existential variables")?;
        }
        let head = self.atom()?;
        self.expect(&Tok::Dot, "'.' after rule head")?;

        let body_vars: BTreeSet<&Term> = body.iter().flat_map(|a| a.variables()).collect();
        let head_only: BTreeSet<&Term> = head.variables().filter(|v| !body_vars.contains(v)).collect();
        let declared_set: BTreeSet<&Term> = declared.iter().collect();
        if let Some(v) = declared_set.iter().find(|v| body_vars.contains(*v)) {
            return Err(ParseError::new(
                line,
                column,
                format!("existential variable {v} also occurs in the body"),
            ));
        }
        if let Some(v) = head_only.iter().find(|v| !declared_set.contains(*v)) {
            return Err(ParseError::new(
                line,
                column,
                format!("head variable {v} is neither in the body nor declared existential"),
            ));
        }
        if let Some(v) = declared_set.iter().find(|v| !head_only.contains(*v)) {
            return Err(ParseError::new(
                line,
                column,
                format!("existential variable {v} does not occur in the head"),
            ));
        }
        Rule::new(&format!("r{index}"), body, head).map_err(|e| ParseError::new(line, column, e.to_string()))
    }

    fn query(&mut self) -> Result<Query, ParseError> {
        let mut disjuncts = vec![self.conjunction()?];
        while self.eat(&Tok::Bar) {
            disjuncts.push(self.conjunction()?);
        }
        self.expect(&Tok::Dot, "'.' after query")?;
        Query::new(disjuncts).map_err(|e| {
            let (l, c) = self.here();
            ParseError::new(l, c, e.to_string())
        })
    }

    fn conjunction(&mut self) -> Result<Vec<Atom>, ParseError> {
        let mut atoms = vec![self.atom()?];
        while self.eat(&Tok::Comma) {
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let (line, column) = self.here();
        let predicate = match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Predicate::new(&name)
            }
            Some(Tok::ShapedIdent(name)) => {
                self.pos += 1;
                let shape = self.shape()?;
                Predicate::shaped(&name, shape)
            }
            Some(Tok::Var(v)) => return self.err(format!("expected a predicate, found variable {v}")),
            _ => return self.err("expected an atom"),
        };
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            loop {
                args.push(self.term()?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(&Tok::Comma, "',' or ')'")?;
            }
        }
        if let Some(shape) = &predicate.shape {
            if shape.companion_arity() != args.len() {
                return Err(ParseError::new(
                    line,
                    column,
                    format!(
                        "{predicate} needs {} arguments, got {}",
                        shape.companion_arity(),
                        args.len()
                    ),
                ));
            }
        }
        match self.arities.get(&predicate) {
            Some(&n) if n != args.len() => {
                return Err(ParseError::new(
                    line,
                    column,
                    format!("{predicate} used with arity {} but earlier with arity {n}", args.len()),
                ))
            }
            Some(_) => {}
            None => {
                self.arities.insert(predicate.clone(), args.len());
            }
        }
        Ok(Atom::new(predicate, args))
    }

    fn shape(&mut self) -> Result<Shape, ParseError> {
        let mut labels = Vec::new();
        loop {
            match self.peek().cloned() {
                Some(Tok::Number(n)) => {
                    let i: u32 = n
                        .parse()
                        .map_err(|_| ParseError::new(self.here().0, self.here().1, "label too large"))?;
                    self.pos += 1;
                    labels.push(Label::Index(i));
                }
                Some(Tok::Ident(c)) => {
                    self.pos += 1;
                    labels.push(Label::Const(c.as_str().into()));
                }
                _ => return self.err("expected a shape label"),
            }
            if self.eat(&Tok::RBracket) {
                break;
            }
            self.expect(&Tok::Comma, "',' or ']' in shape")?;
        }
        let shape = Shape::new(labels);
        if !shape.is_well_formed() {
            return self.err(format!(
                "shape {shape} must number its classes 1, 2, ... in order of first use"
            ));
        }
        Ok(shape)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(c)) => {
                self.pos += 1;
                Ok(Term::constant(&c))
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Ok(Term::variable(&v))
            }
            Some(Tok::Null(n)) if self.allow_nulls => {
                self.pos += 1;
                Ok(Term::null(n))
            }
            Some(Tok::Null(_)) => self.err("labelled nulls are not allowed here"),
            Some(Tok::Number(n)) => self.err(format!(
                "numeral {n} is not a term; constants are lowercase identifiers"
            )),
            _ => self.err("expected a term"),
        }
    }
}

#[cfg(test)]
mod test {
    use super::*;

    const FATHER: &str = "
        person(tim). person(john). fatherOf(tim,john).
        person(X) -> exists Y. fatherOf(Y,X).
        fatherOf(X,Y) -> person(X).
        ? person(X), fatherOf(X,tim).
    ";

    #[test]
    fn father_program() {
        let p = parse_program(FATHER).unwrap();
        assert_eq!(p.database.len(), 3);
        assert_eq!(p.ontology.len(), 2);
        assert_eq!(p.queries.len(), 1);
        assert_eq!(&*p.ontology.rules[1].id, "r2");
        assert_eq!(p.ontology.rules[1].body[0].args[0], Term::variable("X#2"));
    }

    #[test]
    fn numeral_is_syntax_error() {
        let e = parse_program("p(X,2) -> q(X).").unwrap_err();
        assert_eq!((e.line, e.column), (1, 5));
    }

    #[test]
    fn propositional_forms_agree() {
        let p = parse_program("p. p() -> q.").unwrap();
        assert_eq!(p.database.iter().next().unwrap().arity(), 0);
        assert_eq!(p.ontology.rules[0].body[0].arity(), 0);
    }

    #[test]
    fn arity_clash() {
        let e = parse_program("p(a).\np(a,b).").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("arity"));
    }

    #[test]
    fn undeclared_existential() {
        assert!(parse_program("p(X) -> q(X,Y).").is_err());
        assert!(parse_program("p(X) -> exists X. q(X).").is_err());
        assert!(parse_program("p(X) -> exists Y,Z. q(X,Y).").is_err());
    }

    #[test]
    fn fact_with_variable() {
        assert!(parse_program("p(X).").is_err());
    }

    #[test]
    fn shaped_atoms() {
        let p = parse_program("f_[c1,c2]. f_[1,c1](Y) -> p_[1](Y). p_[1](X) -> exists Y. f_[1,2](Y,X).").unwrap();
        assert_eq!(p.database.iter().next().unwrap().to_string(), "f_[c1,c2]");
        assert!(parse_program("f_[1,2](X) -> p.").is_err());
        assert!(parse_program("f_[2](X) -> p.").is_err());
    }

    #[test]
    fn union_query() {
        let p = parse_program("? p(X), q(X,a) | r.").unwrap();
        assert_eq!(p.queries[0].disjuncts.len(), 2);
        assert_eq!(p.queries[0].to_string(), "? p(X), q(X,a) | r.");
    }

    #[test]
    fn instance_with_nulls() {
        let i = parse_instance("p(_:n1, c). q.").unwrap();
        assert_eq!(i.len(), 2);
        assert!(parse_program("p(_:n1).").is_err());
        assert!(parse_instance("p(X) -> q(X).").is_err());
    }

    #[test]
    fn print_is_stable() {
        let p = parse_program(FATHER).unwrap();
        let once = print_program(&p);
        let again = print_program(&parse_program(&once).unwrap());
        assert_eq!(once, again);
        assert_eq!(parse_program(&once).unwrap(), p);
        assert!(once.contains("person(X) -> exists Y. fatherOf(Y,X)."));
    }

    #[test]
    fn error_at_end_of_input() {
        let e = parse_program("p(a)").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(e.message.contains("'.'"));
    }
}

use crate::chor::{Channel, Direction, Endpoint, Port, Service, ServiceGraph};
use crate::solver::{ConstraintSet, Origin, SeniorityConstraint};
use crate::term::{Alternative, Collection, Element, Guard, Term};

use super::lexer::{lex, Tok};
use super::{SourceSpan, TextError};

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    file: Option<String>,
}

type PResult<T> = Result<T, TextError>;

impl Parser {
    fn new(src: &str, file: Option<&str>) -> PResult<Self> {
        Ok(Parser { toks: lex(src, file)?, pos: 0, file: file.map(str::to_string) })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(TextError::Parse {
            file: self.file.clone(),
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.error(&[&format!("`{}`", t.text())])
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error(&[what]),
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn sort_error<T>(&self, span: SourceSpan, message: String) -> PResult<T> {
        Err(TextError::Sort { file: self.file.clone(), span, message })
    }

    fn term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Term::Symbol(s))
            }
            Tok::DownVar(v) => {
                self.bump();
                Ok(Term::DownVar(v))
            }
            Tok::UpVar(v) => {
                self.bump();
                Ok(Term::UpVar(v))
            }
            Tok::LParen => {
                self.bump();
                let mut items = vec![self.term()?];
                while self.eat(&Tok::Comma) {
                    items.push(self.term()?);
                }
                self.expect(Tok::RParen)?;
                Ok(Term::Tuple(items))
            }
            Tok::LBrace => {
                self.bump();
                let c = self.collection(Tok::RBrace, true)?;
                Ok(Term::Record(c))
            }
            Tok::ChoiceOpen => {
                self.bump();
                let c = self.collection(Tok::ChoiceClose, false)?;
                Ok(Term::Choice(c))
            }
            Tok::Lt => {
                self.bump();
                let mut alts = vec![self.alternative()?];
                while self.eat(&Tok::Comma) {
                    alts.push(self.alternative()?);
                }
                self.expect(Tok::Gt)?;
                Ok(Term::Switch(alts))
            }
            _ => self.error(&["a term"]),
        }
    }

    fn alternative(&mut self) -> PResult<Alternative> {
        let guard = self.guard()?;
        self.expect(Tok::Colon)?;
        Ok(Alternative { guard, term: self.term()? })
    }

    fn collection(&mut self, close: Tok, record: bool) -> PResult<Collection> {
        let mut elements = Vec::new();
        if matches!(self.peek(), Tok::Ident(_)) {
            elements.push(self.element()?);
            while self.eat(&Tok::Comma) {
                elements.push(self.element()?);
            }
        }
        let mut tail = None;
        if self.eat(&Tok::Pipe) {
            let span = self.span();
            match (self.peek().clone(), record) {
                (Tok::DownVar(v), true) | (Tok::UpVar(v), false) => {
                    self.bump();
                    tail = Some(v);
                }
                (Tok::UpVar(v), true) => {
                    return self.sort_error(span, format!("record tail `^{v}` must be a down-coerced variable"))
                }
                (Tok::DownVar(v), false) => {
                    return self.sort_error(span, format!("choice tail `${v}` must be an up-coerced variable"))
                }
                _ => {
                    return self.error(&[if record { "$variable" } else { "^variable" }]);
                }
            }
        }
        if !self.eat(&close) {
            let mut expected = vec![format!("`{}`", close.text())];
            if tail.is_none() {
                expected.insert(0, "`|`".into());
                expected.insert(0, if elements.is_empty() { "a label" } else { "`,`" }.into());
            }
            let refs: Vec<&str> = expected.iter().map(String::as_str).collect();
            return self.error(&refs);
        }
        Ok(Collection { elements, tail })
    }

    fn element(&mut self) -> PResult<Element> {
        let label = self.ident("a label")?;
        let guard = if self.eat(&Tok::LParen) {
            let g = self.guard()?;
            self.expect(Tok::RParen)?;
            g
        } else {
            Guard::Const(true)
        };
        self.expect(Tok::Colon)?;
        Ok(Element { label, guard, term: self.term()? })
    }

    fn guard(&mut self) -> PResult<Guard> {
        let lhs = self.guard_or()?;
        if self.eat(&Tok::Arrow) {
            Ok(Guard::implies(lhs, self.guard()?))
        } else {
            Ok(lhs)
        }
    }

    fn guard_or(&mut self) -> PResult<Guard> {
        let mut g = self.guard_and()?;
        while self.eat(&Tok::OrOr) {
            g = Guard::or(g, self.guard_and()?);
        }
        Ok(g)
    }

    fn guard_and(&mut self) -> PResult<Guard> {
        let mut g = self.guard_unary()?;
        while self.eat(&Tok::AndAnd) {
            g = Guard::and(g, self.guard_unary()?);
        }
        Ok(g)
    }

    fn guard_unary(&mut self) -> PResult<Guard> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Guard::not(self.guard_unary()?))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(match s.as_str() {
                    "true" => Guard::Const(true),
                    "false" => Guard::Const(false),
                    _ => Guard::Var(s),
                })
            }
            Tok::LParen => {
                self.bump();
                let g = self.guard()?;
                self.expect(Tok::RParen)?;
                Ok(g)
            }
            _ => self.error(&["a guard"]),
        }
    }

    fn constraint(&mut self) -> PResult<SeniorityConstraint> {
        let start = self.span();
        let lhs = self.term()?;
        self.expect(Tok::Le)?;
        let rhs = self.term()?;
        self.expect(Tok::Semi)?;
        let span = start.to(self.prev_span());
        let c = SeniorityConstraint::new(lhs, rhs)
            .with_origin(Origin { label: None, file: self.file.clone(), span: Some(span) });
        if let Err(message) = c.check_sorts() {
            return self.sort_error(span, message);
        }
        Ok(c)
    }

    fn end(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error(&["end of input"])
        }
    }

    fn endpoint(&mut self) -> PResult<Endpoint> {
        let service = self.ident("a service name")?;
        self.expect(Tok::Dot)?;
        let port = self.ident("a port name")?;
        Ok(Endpoint { service, port })
    }

    fn chor_item(&mut self, g: &mut ServiceGraph) -> PResult<()> {
        let start = self.span();
        if self.keyword("service") {
            let name = self.ident("a service name")?;
            self.expect(Tok::LBrace)?;
            let mut ports = Vec::new();
            while !self.eat(&Tok::RBrace) {
                let pstart = self.span();
                let direction = if self.keyword("in") {
                    Direction::In
                } else if self.keyword("out") {
                    Direction::Out
                } else {
                    return self.error(&["`in`", "`out`", "`}`"]);
                };
                let pname = self.ident("a port name")?;
                self.expect(Tok::Colon)?;
                let term = self.term()?;
                self.expect(Tok::Semi)?;
                ports.push(Port { name: pname, direction, term, span: Some(pstart.to(self.prev_span())) });
            }
            g.services.push(Service { name, ports, span: Some(start.to(self.prev_span())) });
            Ok(())
        } else if self.keyword("channel") {
            let from = self.endpoint()?;
            self.expect(Tok::Arrow)?;
            let to = self.endpoint()?;
            self.expect(Tok::Semi)?;
            g.channels.push(Channel { from, to, span: Some(start.to(self.prev_span())) });
            Ok(())
        } else {
            self.error(&["`service`", "`channel`"])
        }
    }
}

/// Parses a single term (surrounding whitespace and comments allowed).
pub fn parse_term(src: &str) -> Result<Term, TextError> {
    let mut p = Parser::new(src, None)?;
    let t = p.term()?;
    p.end()?;
    Ok(t)
}

pub fn parse_guard(src: &str) -> Result<Guard, TextError> {
    let mut p = Parser::new(src, None)?;
    let g = p.guard()?;
    p.end()?;
    Ok(g)
}

/// Parses a `.mdlc` document. `file` only labels spans.
pub fn parse_constraints(src: &str, file: Option<&str>) -> Result<ConstraintSet, TextError> {
    let mut p = Parser::new(src, file)?;
    let mut cs = ConstraintSet::default();
    while *p.peek() != Tok::Eof {
        cs.push(p.constraint()?);
    }
    Ok(cs)
}

/// Parses a `.chor` document.
pub fn parse_chor(src: &str, file: Option<&str>) -> Result<ServiceGraph, TextError> {
    let mut p = Parser::new(src, file)?;
    let mut g = ServiceGraph { file: file.map(str::to_string), ..ServiceGraph::default() };
    while *p.peek() != Tok::Eof {
        p.chor_item(&mut g)?;
    }
    Ok(g)
}

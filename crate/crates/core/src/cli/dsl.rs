//! Text format for Pfaffian systems.
//!
//! ```text
//! chart x1 x2 x3 x4 x5;
//! form w1 = d(x1) + x4*d(x5);   # or dx1 + x4*dx5
//! form w2 = dx2;
//! form w3 = dx3;
//! system A = [w1, w2, w3];
//! point origin = (0, 0, 0, 0, 0);
//! seed tilted = [(-x4, 0, 0, 0, 1)];
//! ```
//!
//! Expressions may combine coordinates, rational constants, earlier forms,
//! `dNAME` for a coordinate `NAME`, and `d(EXPR)`, with `+ - * /` and `^`
//! (non-negative integer powers of functions). `*` is the wedge product.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::exactalg::{Polynomial, Rational};
use crate::exterior::DifferentialForm;
use crate::pfaffian::{PfaffianError, PfaffianSystem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DocumentError {
    #[error("no system named {0}")]
    UnknownSystem(String),
    #[error("no point named {0}")]
    UnknownPoint(String),
    #[error("no seed named {0}")]
    UnknownSeed(String),
    #[error("document declares no system")]
    NoSystem,
    #[error("seed {name}: {message}")]
    BadSeed { name: String, message: String },
    #[error(transparent)]
    System(#[from] PfaffianError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormDef {
    pub name: String,
    pub form: DifferentialForm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemDef {
    pub name: String,
    pub forms: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointDef {
    pub name: String,
    pub coords: Vec<Rational>,
}

/// Seed vectors whose components are polynomials in the chart coordinates,
/// evaluated at the analysis point.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedDef {
    pub name: String,
    pub vectors: Vec<Vec<Polynomial>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemDocument {
    pub chart: Vec<String>,
    pub forms: Vec<FormDef>,
    pub systems: Vec<SystemDef>,
    pub points: Vec<PointDef>,
    pub seeds: Vec<SeedDef>,
}

impl SystemDocument {
    pub fn form(&self, name: &str) -> Option<&DifferentialForm> {
        self.forms.iter().find(|f| f.name == name).map(|f| &f.form)
    }

    /// The named system, or the first one declared.
    pub fn system(&self, name: Option<&str>) -> Result<(String, PfaffianSystem), DocumentError> {
        let def = match name {
            Some(n) => self
                .systems
                .iter()
                .find(|s| s.name == n)
                .ok_or_else(|| DocumentError::UnknownSystem(n.to_string()))?,
            None => self.systems.first().ok_or(DocumentError::NoSystem)?,
        };
        let generators = def
            .forms
            .iter()
            .map(|f| self.form(f).expect("checked when parsing").clone())
            .collect();
        let system = PfaffianSystem::with_names(self.chart.clone(), def.forms.clone(), generators)?;
        Ok((def.name.clone(), system))
    }

    pub fn point(&self, name: &str) -> Result<&[Rational], DocumentError> {
        self.points
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.coords.as_slice())
            .ok_or_else(|| DocumentError::UnknownPoint(name.to_string()))
    }

    /// Seed vectors of `name` evaluated at `p`.
    pub fn seed_at(&self, name: &str, p: &[Rational]) -> Result<Vec<Vec<Rational>>, DocumentError> {
        let def = self
            .seeds
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| DocumentError::UnknownSeed(name.to_string()))?;
        def.vectors
            .iter()
            .map(|v| {
                v.iter()
                    .map(|c| c.evaluate(p))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| DocumentError::BadSeed {
                        name: name.to_string(),
                        message: e.to_string(),
                    })
            })
            .collect()
    }

    /// Canonical text; parsing it gives back an equal document.
    pub fn render(&self) -> String {
        let mut out = format!("chart {};\n", self.chart.join(" "));
        for f in &self.forms {
            out.push_str(&format!("form {} = {};\n", f.name, f.form.to_text(&self.chart)));
        }
        for s in &self.systems {
            out.push_str(&format!("system {} = [{}];\n", s.name, s.forms.join(", ")));
        }
        for p in &self.points {
            let coords: Vec<String> = p.coords.iter().map(|q| q.to_string()).collect();
            out.push_str(&format!("point {} = ({});\n", p.name, coords.join(", ")));
        }
        for s in &self.seeds {
            let vectors: Vec<String> = s
                .vectors
                .iter()
                .map(|v| {
                    let c: Vec<String> = v.iter().map(|q| q.to_text(&self.chart)).collect();
                    format!("({})", c.join(", "))
                })
                .collect();
            out.push_str(&format!("seed {} = [{}];\n", s.name, vectors.join(", ")));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(BigInt),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(n) => write!(f, "`{n}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut advance = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().expect("peeked");
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            advance(&mut chars);
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                advance(&mut chars);
            }
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                s.push(advance(&mut chars));
            }
            out.push(Token {
                tok: Tok::Number(s.parse().expect("digits")),
                line: l,
                column: col,
            });
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while chars.peek().is_some_and(|c| c.is_alphanumeric() || *c == '_') {
                s.push(advance(&mut chars));
            }
            out.push(Token {
                tok: Tok::Ident(s),
                line: l,
                column: col,
            });
        } else if ";=,()[]+-*/^∧".contains(c) {
            advance(&mut chars);
            out.push(Token {
                tok: Tok::Sym(if c == '∧' { '*' } else { c }),
                line: l,
                column: col,
            });
        } else {
            return Err(ParseError {
                line: l,
                column: col,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

const KEYWORDS: [&str; 6] = ["chart", "form", "system", "point", "seed", "d"];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    doc: SystemDocument,
    names: HashSet<String>,
}

pub fn parse_document(text: &str) -> Result<SystemDocument, ParseError> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
        doc: SystemDocument {
            chart: Vec::new(),
            forms: Vec::new(),
            systems: Vec::new(),
            points: Vec::new(),
            seeds: Vec::new(),
        },
        names: HashSet::new(),
    };
    p.document()?;
    Ok(p.doc)
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at<T>(&self, t: &Token, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn expect_sym(&mut self, c: char) -> Result<Token, ParseError> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(t)
        } else {
            self.error_at(&t, format!("expected `{c}`, found {}", t.tok))
        }
    }

    fn at_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn ident(&mut self) -> Result<(String, Token), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            other => self.error_at(&t, format!("expected a name, found {other}")),
        }
    }

    fn declare(&mut self, name: &str, at: &Token) -> Result<(), ParseError> {
        if KEYWORDS.contains(&name) {
            return self.error_at(at, format!("`{name}` is reserved"));
        }
        if !self.names.insert(name.to_string()) {
            return self.error_at(at, format!("duplicate name `{name}`"));
        }
        Ok(())
    }

    fn document(&mut self) -> Result<(), ParseError> {
        loop {
            let t = self.peek().clone();
            let keyword = match &t.tok {
                Tok::End => break,
                Tok::Ident(k) => k.clone(),
                other => return self.error_at(&t, format!("expected a statement, found {other}")),
            };
            if keyword != "chart" && self.doc.chart.is_empty() {
                return self.error_at(&t, "the document must start with `chart`");
            }
            self.next();
            match keyword.as_str() {
                "chart" => self.chart(&t)?,
                "form" => self.form()?,
                "system" => self.system()?,
                "point" => self.point()?,
                "seed" => self.seed()?,
                other => return self.error_at(&t, format!("unknown statement `{other}`")),
            }
            self.expect_sym(';')?;
        }
        if self.doc.chart.is_empty() {
            let t = self.peek().clone();
            return self.error_at(&t, "missing `chart` statement");
        }
        Ok(())
    }

    fn chart(&mut self, start: &Token) -> Result<(), ParseError> {
        if !self.doc.chart.is_empty() {
            return self.error_at(start, "chart declared twice");
        }
        while let Tok::Ident(_) = self.peek().tok {
            let (name, t) = self.ident()?;
            self.declare(&name, &t)?;
            self.doc.chart.push(name);
        }
        if self.doc.chart.is_empty() {
            return self.error_at(start, "chart needs at least one coordinate");
        }
        for name in &self.doc.chart {
            if let Some(rest) = name.strip_prefix('d') {
                if self.doc.chart.iter().any(|c| c == rest) {
                    return self.error_at(start, format!("coordinate `{name}` clashes with the differential of `{rest}`"));
                }
            }
        }
        Ok(())
    }

    fn form(&mut self) -> Result<(), ParseError> {
        let (name, t) = self.ident()?;
        self.declare(&name, &t)?;
        self.expect_sym('=')?;
        let start = self.peek().clone();
        let form = self.expr()?;
        if form.degree() != 1 {
            return self.error_at(
                &start,
                format!("form `{name}` has degree {}, expected a 1-form", form.degree()),
            );
        }
        self.doc.forms.push(FormDef { name, form });
        Ok(())
    }

    fn system(&mut self) -> Result<(), ParseError> {
        let (name, t) = self.ident()?;
        self.declare(&name, &t)?;
        self.expect_sym('=')?;
        self.expect_sym('[')?;
        let mut forms = Vec::new();
        if !self.at_sym(']') {
            loop {
                let (f, ft) = self.ident()?;
                if self.doc.form(&f).is_none() {
                    return self.error_at(&ft, format!("unknown form `{f}`"));
                }
                forms.push(f);
                if self.at_sym(',') {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect_sym(']')?;
        self.doc.systems.push(SystemDef { name, forms });
        Ok(())
    }

    fn tuple(&mut self) -> Result<Vec<(Polynomial, Token)>, ParseError> {
        let open = self.expect_sym('(')?;
        let mut out = Vec::new();
        loop {
            let t = self.peek().clone();
            let e = self.expr()?;
            if e.degree() != 0 {
                return self.error_at(&t, "expected a function, found a form");
            }
            out.push((e.coefficient(&[]), t));
            if self.at_sym(',') {
                self.next();
            } else {
                break;
            }
        }
        self.expect_sym(')')?;
        if out.len() != self.doc.chart.len() {
            return self.error_at(
                &open,
                format!("expected {} components, found {}", self.doc.chart.len(), out.len()),
            );
        }
        Ok(out)
    }

    fn point(&mut self) -> Result<(), ParseError> {
        let (name, t) = self.ident()?;
        self.declare(&name, &t)?;
        self.expect_sym('=')?;
        let mut coords = Vec::new();
        for (p, at) in self.tuple()? {
            match p.constant_value() {
                Some(q) => coords.push(q),
                None => return self.error_at(&at, "point coordinates must be rational constants"),
            }
        }
        self.doc.points.push(PointDef { name, coords });
        Ok(())
    }

    fn seed(&mut self) -> Result<(), ParseError> {
        let (name, t) = self.ident()?;
        self.declare(&name, &t)?;
        self.expect_sym('=')?;
        self.expect_sym('[')?;
        let mut vectors = Vec::new();
        if !self.at_sym(']') {
            loop {
                vectors.push(self.tuple()?.into_iter().map(|(p, _)| p).collect());
                if self.at_sym(',') {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect_sym(']')?;
        self.doc.seeds.push(SeedDef { name, vectors });
        Ok(())
    }

    fn n(&self) -> usize {
        self.doc.chart.len()
    }

    fn expr(&mut self) -> Result<DifferentialForm, ParseError> {
        let mut acc = self.term()?;
        while self.at_sym('+') || self.at_sym('-') {
            let op = self.next();
            let rhs = self.term()?;
            if rhs.degree() != acc.degree() {
                return self.error_at(
                    &op,
                    format!("cannot add forms of degree {} and {}", acc.degree(), rhs.degree()),
                );
            }
            acc = if op.tok == Tok::Sym('+') { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<DifferentialForm, ParseError> {
        let mut acc = self.unary()?;
        while self.at_sym('*') || self.at_sym('/') {
            let op = self.next();
            let rhs = self.unary()?;
            if op.tok == Tok::Sym('*') {
                acc = acc.wedge(&rhs).expect("same chart");
            } else {
                let c = match (rhs.degree(), rhs.coefficient(&[]).constant_value()) {
                    (0, Some(c)) if !c.is_zero() => c,
                    _ => return self.error_at(&op, "can only divide by a nonzero constant"),
                };
                acc = acc.scale(&Polynomial::constant(self.n(), c.recip()));
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<DifferentialForm, ParseError> {
        if self.at_sym('-') {
            self.next();
            let v = self.unary()?;
            return Ok(-&v);
        }
        if self.at_sym('+') {
            self.next();
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<DifferentialForm, ParseError> {
        let base = self.atom()?;
        if !self.at_sym('^') {
            return Ok(base);
        }
        let op = self.next();
        let t = self.next();
        let e = match &t.tok {
            Tok::Number(n) => match n.to_u32() {
                Some(e) => e,
                None => return self.error_at(&t, "exponent too large"),
            },
            other => return self.error_at(&t, format!("expected an integer exponent, found {other}")),
        };
        if base.degree() != 0 {
            return self.error_at(&op, "only functions can be raised to a power");
        }
        Ok(DifferentialForm::function(base.coefficient(&[]).pow(e)))
    }

    fn atom(&mut self) -> Result<DifferentialForm, ParseError> {
        let n = self.n();
        let t = self.next();
        match &t.tok {
            Tok::Number(v) => Ok(DifferentialForm::function(Polynomial::constant(
                n,
                Rational::from_integer(v.clone()),
            ))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Ident(name) if name == "d" => {
                self.expect_sym('(')?;
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e.exterior_derivative())
            }
            Tok::Ident(name) => {
                if let Some(i) = self.doc.chart.iter().position(|c| c == name) {
                    return Ok(DifferentialForm::function(Polynomial::var(n, i)));
                }
                if let Some(f) = self.doc.form(name) {
                    return Ok(f.clone());
                }
                if let Some(rest) = name.strip_prefix('d') {
                    if let Some(i) = self.doc.chart.iter().position(|c| c == rest) {
                        return Ok(DifferentialForm::dx(n, i));
                    }
                }
                self.error_at(&t, format!("unknown identifier `{name}`"))
            }
            other => self.error_at(&t, format!("expected an expression, found {other}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{rat, ratio};

    const A: &str = "chart x1 x2 x3 x4 x5; form w1 = d(x1) + x4*d(x5); form w2 = d(x2); form w3 = d(x3); system A = [w1,w2,w3];";

    #[test]
    fn parses_example() {
        let doc = parse_document(A).unwrap();
        assert_eq!(doc.chart.len(), 5);
        let (name, s) = doc.system(None).unwrap();
        assert_eq!(name, "A");
        assert_eq!(s.to_string(), "[dx1 + x4*dx5, dx2, dx3]");
        assert_eq!(s.labels(), &["w1", "w2", "w3"]);
    }

    #[test]
    fn alternative_spellings_agree() {
        let doc = parse_document(
            "chart x1 x2 x3 x4 x5;\n# comment\nform w1 = dx1 + x4 * dx5; form g = w1 + x2*dx3; form h = 2*(x1 - x2)^2*dx1/4;",
        )
        .unwrap();
        let a = parse_document(A).unwrap();
        assert_eq!(doc.form("w1"), a.form("w1"));
        assert_eq!(doc.form("g").unwrap().to_string(), "dx1 + x2*dx3 + x4*dx5");
        assert_eq!(
            doc.form("h").unwrap().to_string(),
            "(1/2*x1^2 - x1*x2 + 1/2*x2^2)*dx1"
        );
    }

    #[test]
    fn degree_errors() {
        let err = parse_document("chart x1 x2; form bad = x1*x2;").unwrap_err();
        assert!(err.message.contains("degree 0"), "{err}");
        assert_eq!((err.line, err.column), (1, 25));
        let err = parse_document("chart x1 x2; form bad = dx1*dx2;").unwrap_err();
        assert!(err.message.contains("degree 2"));
        let err = parse_document("chart x1 x2; form bad = dx1 + x2;").unwrap_err();
        assert!(err.message.contains("cannot add"));
    }

    #[test]
    fn name_errors() {
        let err = parse_document("chart x y;\nform w = dz;").unwrap_err();
        assert_eq!((err.line, err.column), (2, 10));
        assert!(err.message.contains("unknown identifier `dz`"));
        let err = parse_document("chart x y; form w = dx; form w = dy;").unwrap_err();
        assert!(err.message.contains("duplicate"));
        let err = parse_document("chart x y; system S = [w];").unwrap_err();
        assert!(err.message.contains("unknown form"));
        let err = parse_document("form w = dx;").unwrap_err();
        assert!(err.message.contains("chart"));
        let err = parse_document("chart x y; form w = dx").unwrap_err();
        assert!(err.message.contains("expected `;`"));
        let err = parse_document("chart x y; point p = (1, x);").unwrap_err();
        assert!(err.message.contains("rational constants"));
        let err = parse_document("chart x y; point p = (1);").unwrap_err();
        assert!(err.message.contains("2 components"));
        assert!(parse_document("chart x y; form w = $;").is_err());
    }

    #[test]
    fn points_and_seeds() {
        let doc = parse_document(
            "chart x1 x2 x3; form w = dx1 + x2*dx3; system S = [w]; point p = (1/2, -3, 0); seed s = [(-x2, 0, 1)];",
        )
        .unwrap();
        let p = doc.point("p").unwrap();
        assert_eq!(p, &[ratio(1, 2), rat(-3), rat(0)]);
        assert_eq!(doc.seed_at("s", p).unwrap(), vec![vec![rat(3), rat(0), rat(1)]]);
        assert!(doc.point("q").is_err());
    }

    #[test]
    fn round_trip() {
        let text = "chart x1 x2 x3 x4 x5; form w1 = d(x1) + x4*d(x5); form g = d(x2)*(x1 + 1/3*x5^2) - w1; \
                    system A = [w1, g]; point o = (0, 0, 0, 0, -1/2); seed s = [(x4, 0, 0, 1, 0), (0, 1, 0, 0, 0)];";
        let doc = parse_document(text).unwrap();
        let again = parse_document(&doc.render()).unwrap();
        assert_eq!(doc, again);
        assert_eq!(again.render(), doc.render());
    }
}

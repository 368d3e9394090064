use std::fmt;

use thiserror::Error;

/// A finite, nonempty, duplicate-free, ordered set of labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelSet(Vec<String>);

impl LabelSet {
    pub fn new<I, S>(labels: I) -> Result<Self, FunctorError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(FunctorError::EmptyLabelSet { pos: 0 });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(FunctorError::DuplicateLabel { pos: 0, label: l.clone() });
            }
        }
        Ok(Self(labels))
    }

    /// `{0, 1, ..., n-1}` rendered as decimal strings.
    pub fn numbered(n: usize) -> Self {
        Self((0..n).map(|i| i.to_string()).collect())
    }

    pub fn labels(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.0.iter().position(|l| l == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }
}

/// A polynomial-style functor expression over one state placeholder `X`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FunctorExpr {
    Identity,
    Const(LabelSet),
    Product(Vec<FunctorExpr>),
    Coproduct(Vec<FunctorExpr>),
    /// `base ^ {labels}`: a product indexed by `labels`, whose values are
    /// written as label-keyed functions.
    Exponent { base: Box<FunctorExpr>, index: LabelSet },
    Powerset(Box<FunctorExpr>),
    Distribution(Box<FunctorExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctorError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("empty label set at {pos}")]
    EmptyLabelSet { pos: usize },
    #[error("duplicate label {label:?} at {pos}")]
    DuplicateLabel { pos: usize, label: String },
}

/// Letters `a, b, c, …` for small alphabets, `a0, a1, …` otherwise.
pub fn alphabet_labels(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n).map(|i| char::from(b'a' + i as u8).to_string()).collect()
    } else {
        (0..n).map(|i| format!("a{i}")).collect()
    }
}

impl FunctorExpr {
    /// `{0,1} * (X ^ Σ)`
    pub fn dfa(alphabet: LabelSet) -> Self {
        Self::Product(vec![
            Self::Const(LabelSet::numbered(2)),
            Self::Exponent { base: Box::new(Self::Identity), index: alphabet },
        ])
    }

    /// `{0,1} * (P X) ^ Σ`
    pub fn nfa(alphabet: LabelSet) -> Self {
        Self::Product(vec![
            Self::Const(LabelSet::numbered(2)),
            Self::Exponent { base: Box::new(Self::Powerset(Box::new(Self::Identity))), index: alphabet },
        ])
    }

    /// `P (A * X)`
    pub fn lts(actions: LabelSet) -> Self {
        Self::Powerset(Box::new(Self::Product(vec![Self::Const(actions), Self::Identity])))
    }

    /// `D X`
    pub fn markov_chain() -> Self {
        Self::Distribution(Box::new(Self::Identity))
    }

    /// `P (D X)`
    pub fn mdp() -> Self {
        Self::Powerset(Box::new(Self::markov_chain()))
    }

    /// `{0, …, n-1} * inner`
    pub fn labelled(n: usize, inner: Self) -> Self {
        Self::Product(vec![Self::Const(LabelSet::numbered(n)), inner])
    }

    pub fn parse(text: &str) -> Result<Self, FunctorError> {
        let mut p = Parser { src: text, pos: 0 };
        let expr = p.sum()?;
        p.skip_ws();
        if p.pos < text.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(expr)
    }

    pub fn depth(&self) -> usize {
        match self {
            Self::Identity | Self::Const(_) => 1,
            Self::Product(fs) | Self::Coproduct(fs) => 1 + fs.iter().map(Self::depth).max().unwrap_or(0),
            Self::Exponent { base, .. } | Self::Powerset(base) | Self::Distribution(base) => 1 + base.depth(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Self::Coproduct(_) => 0,
            Self::Product(_) => 1,
            Self::Powerset(_) | Self::Distribution(_) => 2,
            Self::Exponent { .. } => 3,
            Self::Identity | Self::Const(_) => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let parens = self.precedence() < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            Self::Identity => f.write_str("X")?,
            Self::Const(labels) => write_labels(f, labels)?,
            Self::Product(fs) | Self::Coproduct(fs) => {
                let (sep, child_min) = if matches!(self, Self::Product(_)) { (" * ", 2) } else { (" + ", 1) };
                if fs.is_empty() {
                    f.write_str("()")?;
                }
                for (i, factor) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    factor.fmt_at(f, child_min)?;
                }
            }
            Self::Exponent { base, index } => {
                base.fmt_at(f, 4)?;
                f.write_str(" ^ ")?;
                write_labels(f, index)?;
            }
            Self::Powerset(inner) => {
                f.write_str("P ")?;
                inner.fmt_at(f, 2)?;
            }
            Self::Distribution(inner) => {
                f.write_str("D ")?;
                inner.fmt_at(f, 2)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl std::str::FromStr for FunctorExpr {
    type Err = FunctorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

fn is_bare_label_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '\'' | '-')
}

fn write_labels(f: &mut fmt::Formatter<'_>, labels: &LabelSet) -> fmt::Result {
    f.write_str("{")?;
    for (i, l) in labels.labels().iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        if !l.is_empty() && l.chars().all(is_bare_label_char) {
            f.write_str(l)?;
        } else {
            write!(f, "\"{}\"", l.replace('\\', "\\\\").replace('"', "\\\""))?;
        }
    }
    f.write_str("}")
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> FunctorError {
        FunctorError::Syntax { pos: self.pos, message: message.into() }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> Option<(usize, &str)> {
        self.skip_ws();
        let start = self.pos;
        let len = self.rest().find(|c: char| !is_bare_label_char(c)).unwrap_or(self.rest().len());
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some((start, &self.src[start..start + len]))
    }

    fn sum(&mut self) -> Result<FunctorExpr, FunctorError> {
        let mut parts = vec![self.product()?];
        while self.eat('+') {
            parts.push(self.product()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { FunctorExpr::Coproduct(parts) })
    }

    fn product(&mut self) -> Result<FunctorExpr, FunctorError> {
        let mut parts = vec![self.prefix()?];
        while self.eat('*') {
            parts.push(self.prefix()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { FunctorExpr::Product(parts) })
    }

    fn prefix(&mut self) -> Result<FunctorExpr, FunctorError> {
        self.skip_ws();
        let save = self.pos;
        match self.word() {
            Some((_, "P")) => return Ok(FunctorExpr::Powerset(Box::new(self.prefix()?))),
            Some((_, "D")) => return Ok(FunctorExpr::Distribution(Box::new(self.prefix()?))),
            _ => self.pos = save,
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<FunctorExpr, FunctorError> {
        let mut base = self.atom()?;
        while self.eat('^') {
            let index = self.label_set()?;
            base = FunctorExpr::Exponent { base: Box::new(base), index };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<FunctorExpr, FunctorError> {
        self.skip_ws();
        if self.rest().starts_with('{') {
            return Ok(FunctorExpr::Const(self.label_set()?));
        }
        if self.eat('(') {
            let inner = self.sum()?;
            if !self.eat(')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(inner);
        }
        let save = self.pos;
        match self.word() {
            Some((_, "X" | "Id")) => Ok(FunctorExpr::Identity),
            Some((start, w)) => {
                let message = format!("unexpected {w:?}; expected X, P, D, '{{' or '('");
                self.pos = start;
                Err(self.error(message))
            }
            None => {
                self.pos = save;
                Err(self.error(if self.rest().is_empty() { "unexpected end of input" } else { "unexpected character" }))
            }
        }
    }

    fn quoted(&mut self) -> Result<String, FunctorError> {
        let mut out = String::new();
        let mut chars = self.rest().char_indices();
        chars.next();
        let mut escaped = false;
        for (i, c) in chars {
            if escaped {
                out.push(c);
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                self.pos += i + 1;
                return Ok(out);
            } else {
                out.push(c);
            }
        }
        Err(self.error("unterminated quoted label"))
    }

    fn label_set(&mut self) -> Result<LabelSet, FunctorError> {
        self.skip_ws();
        let open = self.pos;
        if !self.eat('{') {
            return Err(self.error("expected '{'"));
        }
        if self.eat('}') {
            return Err(FunctorError::EmptyLabelSet { pos: open });
        }
        let mut labels: Vec<String> = Vec::new();
        loop {
            self.skip_ws();
            let at = self.pos;
            let label = if self.rest().starts_with('"') {
                self.quoted()?
            } else {
                match self.word() {
                    Some((_, w)) => w.to_string(),
                    None => return Err(self.error("expected a label")),
                }
            };
            if labels.contains(&label) {
                return Err(FunctorError::DuplicateLabel { pos: at, label });
            }
            labels.push(label);
            if self.eat('}') {
                return Ok(LabelSet(labels));
            }
            if !self.eat(',') {
                return Err(self.error("expected ',' or '}'"));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls(labels: &[&str]) -> LabelSet {
        LabelSet::new(labels.iter().copied()).unwrap()
    }

    #[test]
    fn parses_table_rows() {
        assert_eq!(FunctorExpr::parse("{0,1} * (X ^ {a,b})").unwrap(), FunctorExpr::dfa(ls(&["a", "b"])));
        assert_eq!(FunctorExpr::parse("P ({a,b} * X)").unwrap(), FunctorExpr::lts(ls(&["a", "b"])));
        assert_eq!(FunctorExpr::parse("X").unwrap(), FunctorExpr::Identity);
        assert_eq!(FunctorExpr::parse("D X").unwrap(), FunctorExpr::markov_chain());
        assert_eq!(FunctorExpr::parse("P D X").unwrap(), FunctorExpr::mdp());
        assert_eq!(FunctorExpr::parse("{0,1} * (P X) ^ {a,b}").unwrap(), FunctorExpr::nfa(ls(&["a", "b"])));
    }

    #[test]
    fn precedence() {
        let e = FunctorExpr::parse("{a} + X * X").unwrap();
        assert_eq!(
            e,
            FunctorExpr::Coproduct(vec![
                FunctorExpr::Const(ls(&["a"])),
                FunctorExpr::Product(vec![FunctorExpr::Identity, FunctorExpr::Identity]),
            ])
        );
        // `^` binds tighter than the prefix operators.
        let e = FunctorExpr::parse("P X ^ {a}").unwrap();
        assert!(matches!(e, FunctorExpr::Powerset(ref inner) if matches!(**inner, FunctorExpr::Exponent { .. })));
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "{0,1} * X ^ {a,b}",
            "P ({a,b} * X)",
            "{0,1} * (P X) ^ {a,b}",
            "(X + {u}) * D (X * X)",
            "(X * X) * X",
            "X + (X + X)",
            "P P D X",
            "{\"hello world\",\"q\\\"x\"} * X",
            "(D X) ^ {a}",
        ] {
            let e = FunctorExpr::parse(text).unwrap();
            let shown = e.to_string();
            assert_eq!(FunctorExpr::parse(&shown).unwrap(), e, "{text} -> {shown}");
        }
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(FunctorExpr::parse("X * {}"), Err(FunctorError::EmptyLabelSet { pos: 4 }));
        assert_eq!(
            FunctorExpr::parse("{a,b,a}"),
            Err(FunctorError::DuplicateLabel { pos: 5, label: "a".into() })
        );
        assert!(matches!(FunctorExpr::parse("X +"), Err(FunctorError::Syntax { pos: 3, .. })));
        assert!(matches!(FunctorExpr::parse("Y"), Err(FunctorError::Syntax { pos: 0, .. })));
        assert!(matches!(FunctorExpr::parse("(X"), Err(FunctorError::Syntax { .. })));
        assert!(matches!(FunctorExpr::parse("X X"), Err(FunctorError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn label_set_rules() {
        assert!(LabelSet::new(Vec::<String>::new()).is_err());
        assert!(LabelSet::new(["a", "a"]).is_err());
        assert_eq!(ls(&["x", "y"]).position("y"), Some(1));
        assert_eq!(alphabet_labels(3), vec!["a", "b", "c"]);
        assert_eq!(alphabet_labels(27)[26], "a26");
    }
}

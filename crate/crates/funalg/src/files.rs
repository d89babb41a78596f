//! Line-oriented text formats for algebras, quotients, morphisms, and
//! posets. `#` starts a comment, blank lines are skipped, every file ends
//! with `end`. Emission is canonical (sorted), so emit ∘ parse is the
//! identity on canonical files — which keeps counterexample artifacts
//! diffable.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::AbstractAlgebra;
use crate::compat_poset::{CompatibilityPoset, PosetError};
use crate::concrete::{ConcreteAlgebra, ConcreteError};
use crate::operators::{OperatorError, OperatorTable, QuotientRelation};
use crate::pfun::PartialFunction;
use crate::setq::{
    validate_morphism, MorphismError, QuotientError, QuotientMorphism, SetQuotient,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FileError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Concrete(#[from] ConcreteError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

fn perr(line: usize, message: impl Into<String>) -> FileError {
    FileError::Parse {
        line,
        message: message.into(),
    }
}

/// Meaningful lines of a file: comment-stripped, trimmed, nonempty, with
/// their original 1-based line numbers.
struct Cursor {
    lines: Vec<(usize, String)>,
    pos: usize,
}

impl Cursor {
    fn new(text: &str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                let s = raw.split('#').next().unwrap_or("").trim();
                (!s.is_empty()).then(|| (i + 1, s.to_string()))
            })
            .collect();
        Cursor { lines, pos: 0 }
    }

    fn peek(&self) -> Option<(usize, String)> {
        self.lines.get(self.pos).cloned()
    }

    fn next(&mut self) -> Result<(usize, String), FileError> {
        let item = self
            .lines
            .get(self.pos)
            .cloned()
            .ok_or_else(|| perr(self.last_line() + 1, "unexpected end of file"))?;
        self.pos += 1;
        Ok(item)
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(0, |&(n, _)| n)
    }

    fn expect(&mut self, want: &str) -> Result<usize, FileError> {
        let (line, text) = self.next()?;
        if text != want {
            return Err(perr(line, format!("expected {want:?}, got {text:?}")));
        }
        Ok(line)
    }

    /// Consumes a line that must start with the given keyword, returning
    /// its line number and remainder.
    fn keyword_line(&mut self, word: &str) -> Result<(usize, String), FileError> {
        let (line, text) = self.next()?;
        match keyword(&text, word) {
            Some(rest) => Ok((line, rest.to_string())),
            None => Err(perr(line, format!("expected {word}, got {text:?}"))),
        }
    }

    /// Consumes the `end` line and requires it to be the last.
    fn finish(&mut self) -> Result<(), FileError> {
        self.expect("end")?;
        if let Some((line, text)) = self.peek() {
            return Err(perr(line, format!("content after end: {text:?}")));
        }
        Ok(())
    }
}

fn parse_usize(line: usize, token: &str) -> Result<usize, FileError> {
    token
        .parse()
        .map_err(|_| perr(line, format!("expected a number, got {token:?}")))
}

fn parse_ints(line: usize, text: &str) -> Result<Vec<usize>, FileError> {
    text.split_whitespace()
        .map(|t| parse_usize(line, t))
        .collect()
}

fn parse_point_pair(line: usize, text: &str, what: &str) -> Result<(usize, usize), FileError> {
    let pair = parse_ints(line, text)?;
    let [p, q] = pair[..] else {
        return Err(perr(line, format!("{what} takes exactly two points")));
    };
    Ok((p, q))
}

/// Splits a keyword off the front of a line, returning the rest. The
/// keyword must be followed by a space or end the line.
fn keyword<'a>(text: &'a str, word: &str) -> Option<&'a str> {
    let rest = text.strip_prefix(word)?;
    if rest.is_empty() {
        Some("")
    } else {
        rest.strip_prefix(' ').map(str::trim)
    }
}

fn read_table_rows(cursor: &mut Cursor, rows: usize, cols: usize) -> Result<Vec<usize>, FileError> {
    let mut table = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (line, text) = cursor.next()?;
        let row = parse_ints(line, &text)?;
        if row.len() != cols {
            return Err(perr(
                line,
                format!("expected {cols} entries in this row, got {}", row.len()),
            ));
        }
        table.extend(row);
    }
    Ok(table)
}

/// Parses a `sigma <name> <arity>` header line.
fn sigma_header(line: usize, rest: &str) -> Result<(String, usize), FileError> {
    let mut parts = rest.split_whitespace();
    let name = parts
        .next()
        .ok_or_else(|| perr(line, "sigma needs a name and an arity"))?
        .to_string();
    let arity = parse_usize(
        line,
        parts
            .next()
            .ok_or_else(|| perr(line, "sigma needs an arity"))?,
    )?;
    if parts.next().is_some() {
        return Err(perr(line, "sigma takes exactly a name and an arity"));
    }
    Ok((name, arity))
}

/// Reads `sigma` sections into operator tables of the given algebra size,
/// until the cursor no longer points at one.
fn read_sigma_tables(cursor: &mut Cursor, size: usize) -> Result<Vec<OperatorTable>, FileError> {
    let mut operators: Vec<OperatorTable> = Vec::new();
    while let Some((line, text)) = cursor.peek() {
        let Some(rest) = keyword(&text, "sigma") else {
            break;
        };
        cursor.next()?;
        let (name, arity) = sigma_header(line, rest)?;
        if operators.iter().any(|op| op.name == name) {
            return Err(perr(line, format!("duplicate sigma name {name:?}")));
        }
        let want = size
            .checked_pow(arity as u32)
            .filter(|&w| w <= 1 << 24)
            .ok_or_else(|| perr(line, format!("sigma table of arity {arity} is too large")))?;
        let mut table = Vec::with_capacity(want);
        while table.len() < want {
            let (line, text) = cursor.next()?;
            let row = parse_ints(line, &text)?;
            if table.len() + row.len() > want {
                return Err(perr(line, format!("sigma table has more than {want} entries")));
            }
            table.extend(row);
        }
        let op = OperatorTable { name, arity, table };
        op.validate(size)?;
        operators.push(op);
    }
    operators.sort_by(|x, y| x.name.cmp(&y.name));
    Ok(operators)
}

fn emit_sigma_tables(out: &mut String, size: usize, operators: &[OperatorTable]) {
    for op in operators {
        out.push_str(&format!("sigma {} {}\n", op.name, op.arity));
        for chunk in op.table.chunks(size.max(1)) {
            let words: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
            out.push_str(&words.join(" "));
            out.push('\n');
        }
    }
}

/// An algebra as read from a file: always the abstract tables, plus the
/// concrete elements when the file was given concretely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraFile {
    pub concrete: Option<ConcreteAlgebra>,
    pub algebra: AbstractAlgebra,
    pub operators: Vec<OperatorTable>,
}

impl AlgebraFile {
    pub fn from_algebra(algebra: AbstractAlgebra) -> Self {
        AlgebraFile {
            concrete: None,
            algebra,
            operators: Vec::new(),
        }
    }

    pub fn from_concrete(concrete: ConcreteAlgebra) -> Self {
        AlgebraFile {
            algebra: concrete.to_abstract(),
            concrete: Some(concrete),
            operators: Vec::new(),
        }
    }

    pub fn with_operators(mut self, mut operators: Vec<OperatorTable>) -> Self {
        operators.sort_by(|x, y| x.name.cmp(&y.name));
        self.operators = operators;
        self
    }
}

pub fn parse_algebra(text: &str) -> Result<AlgebraFile, FileError> {
    let mut cursor = Cursor::new(text);
    cursor.expect("algebra v1")?;
    let (line, first) = cursor.next()?;
    let file = if let Some(rest) = keyword(&first, "size") {
        let size = parse_usize(line, rest)?;
        cursor.expect("minus")?;
        let minus = read_table_rows(&mut cursor, size, size)?;
        cursor.expect("restrict")?;
        let restrict = read_table_rows(&mut cursor, size, size)?;
        let algebra = AbstractAlgebra::from_tables(size, minus, restrict)
            .map_err(|e| perr(line, e.to_string()))?;
        let operators = read_sigma_tables(&mut cursor, size)?;
        AlgebraFile {
            concrete: None,
            algebra,
            operators,
        }
    } else if let Some(rest) = keyword(&first, "base") {
        let base = parse_usize(line, rest)?;
        let mut elements = Vec::new();
        while let Some((line, text)) = cursor.peek() {
            let Some(rest) = keyword(&text, "element") else {
                break;
            };
            cursor.next()?;
            elements.push(PartialFunction::parse(base, rest).map_err(|m| perr(line, m))?);
        }
        let concrete = ConcreteAlgebra::from_closed_elements(base, elements)?;
        let operators = read_sigma_tables(&mut cursor, concrete.len())?;
        AlgebraFile {
            algebra: concrete.to_abstract(),
            concrete: Some(concrete),
            operators,
        }
    } else {
        return Err(perr(line, format!("expected size or base, got {first:?}")));
    };
    cursor.finish()?;
    Ok(file)
}

pub fn emit_algebra(file: &AlgebraFile) -> String {
    let mut out = String::from("algebra v1\n");
    match &file.concrete {
        Some(concrete) => {
            out.push_str(&format!("base {}\n", concrete.base_size()));
            for f in concrete.elements() {
                out.push_str(&format!("element {f}\n"));
            }
        }
        None => {
            let n = file.algebra.size();
            out.push_str(&format!("size {n}\n"));
            for (label, table) in [
                ("minus", file.algebra.minus_table()),
                ("restrict", file.algebra.restrict_table()),
            ] {
                out.push_str(label);
                out.push('\n');
                for row in table.chunks(n) {
                    let words: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                    out.push_str(&words.join(" "));
                    out.push('\n');
                }
            }
        }
    }
    emit_sigma_tables(&mut out, file.algebra.size(), &file.operators);
    out.push_str("end\n");
    out
}

/// A quotient as read from a file, with any named relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientFile {
    pub quotient: SetQuotient,
    pub relations: Vec<QuotientRelation>,
}

impl QuotientFile {
    pub fn from_quotient(quotient: SetQuotient) -> Self {
        QuotientFile {
            quotient,
            relations: Vec::new(),
        }
    }

    pub fn with_relations(mut self, mut relations: Vec<QuotientRelation>) -> Self {
        relations.sort_by(|x, y| x.name.cmp(&y.name));
        self.relations = relations;
        self
    }
}

pub fn parse_quotient(text: &str) -> Result<QuotientFile, FileError> {
    let mut cursor = Cursor::new(text);
    cursor.expect("quotient v1")?;
    let (line, rest) = cursor.keyword_line("carrier")?;
    let carrier = parse_usize(line, &rest)?;
    let (line, rest) = cursor.keyword_line("projection")?;
    let projection = parse_ints(line, &rest)?;
    if projection.len() != carrier {
        return Err(perr(
            line,
            format!(
                "projection lists {} points but the carrier has {carrier}",
                projection.len()
            ),
        ));
    }
    let quotient = SetQuotient::new(projection)?;

    let mut relations: Vec<QuotientRelation> = Vec::new();
    while let Some((line, text)) = cursor.peek() {
        let Some(rest) = keyword(&text, "sigma") else {
            break;
        };
        cursor.next()?;
        let (name, arity) = sigma_header(line, rest)?;
        if relations.iter().any(|r| r.name == name) {
            return Err(perr(line, format!("duplicate sigma name {name:?}")));
        }
        let mut tuples = BTreeSet::new();
        while let Some((tline, ttext)) = cursor.peek() {
            if ttext == "end" || keyword(&ttext, "sigma").is_some() {
                break;
            }
            cursor.next()?;
            let tuple = parse_ints(tline, &ttext)?;
            if tuple.len() != arity {
                return Err(perr(
                    tline,
                    format!("tuple has {} entries, expected {arity}", tuple.len()),
                ));
            }
            tuples.insert(tuple);
        }
        let relation = QuotientRelation { name, arity, tuples };
        relation.validate(quotient.carrier())?;
        relations.push(relation);
    }
    relations.sort_by(|x, y| x.name.cmp(&y.name));
    cursor.finish()?;
    Ok(QuotientFile {
        quotient,
        relations,
    })
}

pub fn emit_quotient(file: &QuotientFile) -> String {
    let mut out = String::from("quotient v1\n");
    out.push_str(&format!("carrier {}\n", file.quotient.carrier()));
    let words: Vec<String> = file
        .quotient
        .projection()
        .iter()
        .map(|c| c.to_string())
        .collect();
    out.push_str(&format!("projection {}\n", words.join(" ")));
    for rel in &file.relations {
        out.push_str(&format!("sigma {} {}\n", rel.name, rel.arity));
        for tuple in &rel.tuples {
            let words: Vec<String> = tuple.iter().map(|p| p.to_string()).collect();
            out.push_str(&words.join(" "));
            out.push('\n');
        }
    }
    out.push_str("end\n");
    out
}

pub fn parse_morphism(text: &str) -> Result<QuotientMorphism, FileError> {
    let mut cursor = Cursor::new(text);
    cursor.expect("morphism v1")?;
    let (line, rest) = cursor.keyword_line("source")?;
    let source = SetQuotient::new(parse_ints(line, &rest)?)?;
    let (line, rest) = cursor.keyword_line("target")?;
    let target = SetQuotient::new(parse_ints(line, &rest)?)?;
    let mut map = Vec::new();
    while let Some((line, text)) = cursor.peek() {
        let Some(rest) = keyword(&text, "map") else {
            break;
        };
        cursor.next()?;
        map.push(parse_point_pair(line, rest, "map")?);
    }
    cursor.finish()?;
    Ok(validate_morphism(&source, &target, map)?)
}

pub fn emit_morphism(phi: &QuotientMorphism) -> String {
    let mut out = String::from("morphism v1\n");
    for (word, q) in [("source", phi.source()), ("target", phi.target())] {
        let words: Vec<String> = q.projection().iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("{word} {}\n", words.join(" ")));
    }
    for (&x, &y) in phi.map() {
        out.push_str(&format!("map {x} {y}\n"));
    }
    out.push_str("end\n");
    out
}

pub fn parse_poset(text: &str) -> Result<CompatibilityPoset, FileError> {
    let mut cursor = Cursor::new(text);
    cursor.expect("poset v1")?;
    let (line, rest) = cursor.keyword_line("points")?;
    let size = parse_usize(line, &rest)?;
    let mut le_pairs = Vec::new();
    let mut incompatible = BTreeSet::new();
    while let Some((line, text)) = cursor.peek() {
        if let Some(rest) = keyword(&text, "le") {
            cursor.next()?;
            le_pairs.push(parse_point_pair(line, rest, "le")?);
        } else if let Some(rest) = keyword(&text, "incompatible") {
            cursor.next()?;
            let (p, q) = parse_point_pair(line, rest, "incompatible")?;
            incompatible.insert((p.min(q), p.max(q)));
        } else {
            break;
        }
    }
    cursor.finish()?;
    for &(p, q) in &incompatible {
        if q >= size {
            return Err(PosetError::PairOutOfRange(p, q, size).into());
        }
    }
    let mut compat_pairs = Vec::new();
    for p in 0..size {
        for q in p + 1..size {
            if !incompatible.contains(&(p, q)) {
                compat_pairs.push((p, q));
            }
        }
    }
    Ok(CompatibilityPoset::new(size, &le_pairs, &compat_pairs)?)
}

pub fn emit_poset(poset: &CompatibilityPoset) -> String {
    let mut out = String::from("poset v1\n");
    out.push_str(&format!("points {}\n", poset.size()));
    for p in 0..poset.size() {
        for q in 0..poset.size() {
            if p != q && poset.leq(p, q) {
                out.push_str(&format!("le {p} {q}\n"));
            }
        }
    }
    for p in 0..poset.size() {
        for q in p + 1..poset.size() {
            if !poset.compatible(p, q) {
                out.push_str(&format!("incompatible {p} {q}\n"));
            }
        }
    }
    out.push_str("end\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_algebra_round_trips_with_sigma() {
        let alg = crate::concrete::tests::disjoint_singletons().to_abstract();
        let op = OperatorTable {
            name: "domain".into(),
            arity: 1,
            table: vec![0, 1, 2],
        };
        let file = AlgebraFile::from_algebra(alg).with_operators(vec![op]);
        let text = emit_algebra(&file);
        let parsed = parse_algebra(&text).unwrap();
        assert_eq!(parsed, file);
        assert_eq!(emit_algebra(&parsed), text);
    }

    #[test]
    fn concrete_algebra_round_trips() {
        let conc = crate::concrete::tests::disjoint_singletons();
        let file = AlgebraFile::from_concrete(conc);
        let text = emit_algebra(&file);
        assert!(text.contains("element [(1,1)]"));
        let parsed = parse_algebra(&text).unwrap();
        assert_eq!(parsed, file);
        assert_eq!(emit_algebra(&parsed), text);
    }

    #[test]
    fn quotient_round_trips_with_relation() {
        let quotient = SetQuotient::new(vec![0, 0, 1]).unwrap();
        let rel = QuotientRelation {
            name: "r".into(),
            arity: 2,
            tuples: BTreeSet::from([vec![0, 1], vec![2, 2]]),
        };
        let file = QuotientFile::from_quotient(quotient).with_relations(vec![rel]);
        let text = emit_quotient(&file);
        let parsed = parse_quotient(&text).unwrap();
        assert_eq!(parsed, file);
        assert_eq!(emit_quotient(&parsed), text);
    }

    #[test]
    fn morphism_round_trips() {
        let source = SetQuotient::new(vec![0, 0, 1]).unwrap();
        let target = SetQuotient::new(vec![0, 1]).unwrap();
        let phi = validate_morphism(&source, &target, [(0, 0), (2, 1)]).unwrap();
        let text = emit_morphism(&phi);
        let parsed = parse_morphism(&text).unwrap();
        assert_eq!(parsed, phi);
        assert_eq!(emit_morphism(&parsed), text);
    }

    #[test]
    fn poset_round_trips() {
        // a two-chain plus an isolated point incompatible with both
        let poset = CompatibilityPoset::new(3, &[(0, 1)], &[(0, 1)]).unwrap();
        let text = emit_poset(&poset);
        assert!(text.contains("incompatible 0 2"));
        assert!(text.contains("incompatible 1 2"));
        let parsed = parse_poset(&text).unwrap();
        assert_eq!(parsed, poset);
        assert_eq!(emit_poset(&parsed), text);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_algebra("algebra v2\nend\n").unwrap_err();
        assert_eq!(
            err,
            FileError::Parse {
                line: 1,
                message: "expected \"algebra v1\", got \"algebra v2\"".into()
            }
        );
        let err = parse_algebra("algebra v1\nsize 2\nminus\n0 0\n0 x\n").unwrap_err();
        assert!(matches!(err, FileError::Parse { line: 5, .. }));
        let err = parse_quotient("quotient v1\ncarrier 2\nprojection 0\nend\n").unwrap_err();
        assert!(matches!(err, FileError::Parse { line: 3, .. }));
        let err =
            parse_quotient("quotient v1\ncarrier 2\nprojection 0 0\nend\nstray\n").unwrap_err();
        assert!(matches!(err, FileError::Parse { line: 5, .. }));
        let err = parse_algebra("algebra v1\nsize 1\nminus\n0\n").unwrap_err();
        assert!(matches!(err, FileError::Parse { line: 5, .. }));
    }

    #[test]
    fn validation_errors_surface() {
        // projection that skips a class
        let err = parse_quotient("quotient v1\ncarrier 2\nprojection 0 2\nend\n").unwrap_err();
        assert_eq!(err, FileError::Quotient(QuotientError::MissingClass(2, 1)));
        // a closed list with the empty function dropped
        let dropped = "algebra v1\nbase 3\nelement [(1,1)]\nelement [(2,2)]\nend\n";
        let err = parse_algebra(dropped).unwrap_err();
        assert_eq!(
            err,
            FileError::Concrete(ConcreteError::NotClosed {
                op: "-",
                f: "[(1,1)]".into(),
                g: "[(1,1)]".into(),
                result: "[]".into(),
            })
        );
        // an element off the declared base
        let err =
            parse_algebra("algebra v1\nbase 1\nelement []\nelement [(1,1)]\nend\n").unwrap_err();
        assert!(matches!(err, FileError::Parse { line: 4, .. }));
    }

    #[test]
    fn sigma_tables_are_validated_and_sorted() {
        let text = "algebra v1\nsize 2\nminus\n0 0\n1 0\nrestrict\n0 0\n0 1\n\
                    sigma z 1\n0 0\nsigma a 0\n1\nend\n";
        let parsed = parse_algebra(text).unwrap();
        let names: Vec<&str> = parsed.operators.iter().map(|o| o.name.as_str()).collect();
        assert_eq!(names, ["a", "z"]);
        let bad = "algebra v1\nsize 2\nminus\n0 0\n1 0\nrestrict\n0 0\n0 1\n\
                   sigma z 1\n0 0 1\nend\n";
        assert!(matches!(
            parse_algebra(bad).unwrap_err(),
            FileError::Parse { line: 10, .. }
        ));
        let bad = "algebra v1\nsize 2\nminus\n0 0\n1 0\nrestrict\n0 0\n0 1\n\
                   sigma z 1\n0 5\nend\n";
        assert!(matches!(
            parse_algebra(bad).unwrap_err(),
            FileError::Operator(OperatorError::TableRange { .. })
        ));
    }

    #[test]
    fn comment_and_whitespace_tolerance() {
        let text =
            "# leading note\nalgebra v1\n\n  size 1   # tiny\nminus\n0\nrestrict\n0\nend\n";
        let parsed = parse_algebra(text).unwrap();
        assert_eq!(parsed.algebra.size(), 1);
    }
}

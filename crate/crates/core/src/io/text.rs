use std::collections::BTreeSet;

use crate::scalar::Probability;
use crate::sysmodel::{alphabet_labels, Coalgebra, FValue, FunctorExpr, LabelSet, StateId};

use super::IoError;

/// Nonblank lines that are not `#` comments, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn number(line: usize, field: &str, what: &str) -> Result<usize, IoError> {
    field.parse().map_err(|_| IoError::at(line, format!("expected {what}, found {field:?}")))
}

fn invalid(e: impl std::fmt::Display) -> IoError {
    IoError::Invalid(e.to_string())
}

/// `dfa n k`, then one line per state: `accept succ_1 ... succ_k`.
pub fn parse_dfa_text<P: Probability>(text: &str) -> Result<Coalgebra<P>, IoError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| IoError::at(1, "missing `dfa n k` header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "dfa" {
        return Err(IoError::at(hline, "expected header `dfa n k`"));
    }
    let n = number(hline, fields[1], "a state count")?;
    let k = number(hline, fields[2], "an alphabet size")?;
    if n == 0 || k == 0 {
        return Err(IoError::at(hline, "state count and alphabet size must be positive"));
    }
    let mut values = Vec::with_capacity(n);
    for (line, row) in lines {
        if values.len() == n {
            return Err(IoError::at(line, format!("more than {n} state lines")));
        }
        let fields: Vec<&str> = row.split_whitespace().collect();
        if fields.len() != k + 1 {
            return Err(IoError::at(line, format!("expected an acceptance bit and {k} successors")));
        }
        if fields[0] != "0" && fields[0] != "1" {
            return Err(IoError::at(line, format!("acceptance must be 0 or 1, found {:?}", fields[0])));
        }
        let mut succ = Vec::with_capacity(k);
        for f in &fields[1..] {
            let s = number(line, f, "a successor state")?;
            if s >= n {
                return Err(IoError::at(line, format!("successor {s} is out of range for {n} states")));
            }
            succ.push(FValue::State(s));
        }
        values.push(FValue::Tuple(vec![FValue::label(fields[0]), FValue::Fun(succ)]));
    }
    if values.len() != n {
        return Err(IoError::at(text.lines().count().max(1), format!("expected {n} state lines, found {}", values.len())));
    }
    let f = FunctorExpr::dfa(LabelSet::new(alphabet_labels(k)).map_err(invalid)?);
    Coalgebra::new(f, values).map_err(invalid)
}

/// Splits the comma-separated inside of `( ... )`, honouring double quotes.
fn tuple_fields(line: usize, row: &str) -> Result<Vec<String>, IoError> {
    let inner = row
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| IoError::at(line, "expected a parenthesised tuple"))?;
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = inner.chars();
    while let Some(ch) = chars.next() {
        match ch {
            '"' => quoted = !quoted,
            '\\' if quoted => match chars.next() {
                Some(c) => cur.push(c),
                None => return Err(IoError::at(line, "dangling escape")),
            },
            ',' if !quoted => fields.push(std::mem::take(&mut cur)),
            c => cur.push(c),
        }
    }
    if quoted {
        return Err(IoError::at(line, "unterminated quoted label"));
    }
    fields.push(cur);
    Ok(fields.into_iter().map(|f| f.trim().to_string()).collect())
}

/// Label used when an `aut` file has no transitions at all.
const IDLE_LABEL: &str = "i";

/// Aldebaran `des (first, m, n)` followed by `m` lines `(src, "label", dst)`.
pub fn parse_aut<P: Probability>(text: &str) -> Result<Coalgebra<P>, IoError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| IoError::at(1, "missing `des` header"))?;
    let rest = header.strip_prefix("des").ok_or_else(|| IoError::at(hline, "expected `des (first, m, n)`"))?;
    let h = tuple_fields(hline, rest.trim())?;
    if h.len() != 3 {
        return Err(IoError::at(hline, "expected `des (first, m, n)`"));
    }
    let first = number(hline, &h[0], "an initial state")?;
    let m = number(hline, &h[1], "a transition count")?;
    let n = number(hline, &h[2], "a state count")?;
    if n == 0 || first >= n {
        return Err(IoError::at(hline, "need at least one state and an initial state in range"));
    }
    let mut transitions: Vec<(StateId, String, StateId)> = Vec::with_capacity(m);
    for (line, row) in lines {
        let t = tuple_fields(line, row)?;
        if t.len() != 3 {
            return Err(IoError::at(line, "expected `(src, label, dst)`"));
        }
        let src = number(line, &t[0], "a source state")?;
        let dst = number(line, &t[2], "a target state")?;
        if src >= n || dst >= n {
            return Err(IoError::at(line, format!("state out of range for {n} states")));
        }
        transitions.push((src, t[1].clone(), dst));
    }
    if transitions.len() != m {
        return Err(IoError::at(hline, format!("header declares {m} transitions, found {}", transitions.len())));
    }
    let labels: BTreeSet<&str> = transitions.iter().map(|t| t.1.as_str()).collect();
    let labels = if labels.is_empty() { LabelSet::new([IDLE_LABEL]) } else { LabelSet::new(labels) }.map_err(invalid)?;
    let mut succ: Vec<Vec<FValue<P>>> = vec![Vec::new(); n];
    for (src, label, dst) in transitions {
        succ[src].push(FValue::Tuple(vec![FValue::Label(label), FValue::State(dst)]));
    }
    let values = succ.into_iter().map(FValue::set).collect();
    Coalgebra::new(FunctorExpr::lts(labels), values).map_err(invalid)
}

/// Rows `src dst num/den`; every state must carry a distribution summing to 1.
pub fn parse_mc_tsv<P: Probability>(text: &str) -> Result<Coalgebra<P>, IoError> {
    let mut rows: Vec<(usize, StateId, StateId, P)> = Vec::new();
    for (line, row) in content_lines(text) {
        let fields: Vec<&str> = row.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(IoError::at(line, "expected `src dst num/den`"));
        }
        let src = number(line, fields[0], "a source state")?;
        let dst = number(line, fields[1], "a target state")?;
        let p = P::parse(fields[2])
            .filter(|p| *p > P::zero() && *p <= P::one())
            .ok_or_else(|| IoError::at(line, format!("expected a probability in (0, 1], found {:?}", fields[2])))?;
        rows.push((line, src, dst, p));
    }
    let n = rows.iter().map(|r| r.1.max(r.2) + 1).max().ok_or_else(|| IoError::at(1, "no transitions"))?;
    let mut entries: Vec<Vec<(FValue<P>, P)>> = vec![Vec::new(); n];
    let mut totals: Vec<(P, usize)> = vec![(P::zero(), 0); n];
    for (line, src, dst, p) in rows {
        let t = &mut totals[src];
        t.0 = t.0.checked_sum(&p).ok_or_else(|| IoError::at(line, "probability overflow"))?;
        t.1 = line;
        entries[src].push((FValue::State(dst), p));
    }
    for (s, (total, line)) in totals.iter().enumerate() {
        if entries[s].is_empty() {
            return Err(IoError::Invalid(format!("state {s} has no outgoing distribution")));
        }
        if *total != P::one() {
            return Err(IoError::at(*line, format!("probabilities of state {s} sum to {}, expected 1", total.to_fraction_string())));
        }
    }
    let values = entries.into_iter().map(FValue::dist).collect::<Result<_, _>>().map_err(invalid)?;
    Coalgebra::new(FunctorExpr::markov_chain(), values).map_err(invalid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{refine_naive, Partition};
    use crate::Prob;

    #[test]
    fn dfa_two_loops() {
        let c: Coalgebra<Prob> = parse_dfa_text("dfa 2 1\n1 0\n1 1\n").unwrap();
        assert_eq!(c.n_states(), 2);
        assert_eq!(refine_naive(&c).partition, Partition::trivial(2));
    }

    #[test]
    fn dfa_errors_carry_lines() {
        let e = parse_dfa_text::<Prob>("dfa 2 1\n1 0\n# note\n1 5\n").unwrap_err();
        assert!(matches!(e, IoError::Parse { line: 4, .. }), "{e}");
        assert!(matches!(parse_dfa_text::<Prob>("nfa 2 1\n"), Err(IoError::Parse { line: 1, .. })));
        assert!(matches!(parse_dfa_text::<Prob>("dfa 2 1\n1 0\n"), Err(IoError::Parse { .. })));
        assert!(matches!(parse_dfa_text::<Prob>("dfa 1 1\n2 0\n"), Err(IoError::Parse { line: 2, .. })));
    }

    #[test]
    fn aut_without_transitions() {
        let c: Coalgebra<Prob> = parse_aut("des (0, 0, 3)\n").unwrap();
        assert!(c.values().iter().all(|v| *v == FValue::set(vec![])));
        assert_eq!(refine_naive(&c).partition, Partition::trivial(3));
    }

    #[test]
    fn aut_labels_quoted_and_bare() {
        let text = "des (0, 3, 3)\n(0, \"a, b\", 1)\n(1, tau, 2)\n(2,\"tau\",2)\n";
        let c: Coalgebra<Prob> = parse_aut(text).unwrap();
        assert_eq!(c.functor().to_string(), FunctorExpr::lts(LabelSet::new(["a, b", "tau"]).unwrap()).to_string());
        assert_eq!(c.value(0), &FValue::set(vec![FValue::Tuple(vec![FValue::label("a, b"), FValue::State(1)])]));
        assert!(matches!(parse_aut::<Prob>("des (0, 2, 3)\n(0, a, 1)\n"), Err(IoError::Parse { line: 1, .. })));
        assert!(matches!(parse_aut::<Prob>("des (0, 1, 3)\n(0, a, 7)\n"), Err(IoError::Parse { line: 2, .. })));
    }

    #[test]
    fn mc_rows() {
        let c: Coalgebra<Prob> = parse_mc_tsv("0\t1\t1/2\n0\t0\t1/2\n1\t1\t1\n").unwrap();
        assert_eq!(c.n_states(), 2);
        let e = parse_mc_tsv::<Prob>("0 1 1/2\n0 0 1/3\n1 1 1\n").unwrap_err();
        assert!(matches!(e, IoError::Parse { line: 2, .. }), "{e}");
        assert!(parse_mc_tsv::<Prob>("0 1 1\n").is_err());
        assert!(matches!(parse_mc_tsv::<Prob>("0 1 x\n"), Err(IoError::Parse { line: 1, .. })));
    }
}

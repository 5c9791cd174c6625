//! Text and JSON encodings of programs.
//!
//! ```text
//! tm n=2 a=2
//! q1 0 -> q2 1 R
//! q1 1 -> H 0 L
//! q2 0 -> q1 1 L
//! q2 1 -> q2 0 R
//! ```
//!
//! Serialization is canonical: entries are sorted by state, then symbol.
//! Parsing accepts entries in any order, blank lines and `#` comments.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{MachineError, Move, Program, State, Symbol, Target, Transition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing header `tm n=<states> a=<symbols>`")]
    MissingHeader,
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("malformed entry: {0}")]
    Malformed(String),
    #[error("state out of range: q{state} (program has {states} states)")]
    StateOutOfRange { state: u64, states: State },
    #[error("symbol out of range: {symbol} (alphabet has {alphabet} symbols)")]
    SymbolOutOfRange { symbol: u64, alphabet: u32 },
    #[error("duplicate entry for (q{0}, {1})")]
    DuplicateEntry(State, Symbol),
    #[error("incomplete table: missing entry (q{0}, {1})")]
    IncompleteTable(State, Symbol),
    #[error(transparent)]
    Invalid(#[from] MachineError),
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tm n={} a={}", self.states(), self.alphabet())?;
        for ((q, s), t) in self.entries() {
            let dir = match t.dir {
                Move::Left => 'L',
                Move::Right => 'R',
            };
            writeln!(f, "q{q} {s} -> {} {} {dir}", t.target, t.write)?;
        }
        Ok(())
    }
}

impl Program {
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        text.parse()
    }

    pub fn to_json(&self) -> ProgramJson {
        ProgramJson::from(self)
    }
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn parse_header(line: usize, text: &str) -> Result<(State, u32), ParseError> {
    let bad = |why: &str| err(line, ParseErrorKind::BadHeader(why.to_string()));
    let mut words = text.split_whitespace();
    if words.next() != Some("tm") {
        return Err(err(line, ParseErrorKind::MissingHeader));
    }
    let mut n = None;
    let mut a = None;
    for word in words {
        let (key, value) = word.split_once('=').ok_or_else(|| bad(word))?;
        let value: u32 = value.parse().map_err(|_| bad(word))?;
        match key {
            "n" if n.is_none() => n = Some(value),
            "a" if a.is_none() => a = Some(value),
            _ => return Err(bad(word)),
        }
    }
    let n = n.ok_or_else(|| bad("missing n="))?;
    let a = a.ok_or_else(|| bad("missing a="))?;
    if n == 0 {
        return Err(err(line, MachineError::NoStates.into()));
    }
    if !(2..=256).contains(&a) {
        return Err(err(line, MachineError::BadAlphabet(a).into()));
    }
    Ok((n, a))
}

fn parse_state(line: usize, word: &str, states: State) -> Result<State, ParseError> {
    let digits = word.strip_prefix('q').ok_or_else(|| {
        err(
            line,
            ParseErrorKind::Malformed(format!("expected a state, found `{word}`")),
        )
    })?;
    let q: u64 = digits
        .parse()
        .map_err(|_| err(line, ParseErrorKind::Malformed(format!("bad state `{word}`"))))?;
    if q == 0 || q > u64::from(states) {
        return Err(err(line, ParseErrorKind::StateOutOfRange { state: q, states }));
    }
    Ok(q as State)
}

fn parse_symbol(line: usize, word: &str, alphabet: u32) -> Result<Symbol, ParseError> {
    let s: u64 = word
        .parse()
        .map_err(|_| err(line, ParseErrorKind::Malformed(format!("bad symbol `{word}`"))))?;
    if s >= u64::from(alphabet) {
        return Err(err(line, ParseErrorKind::SymbolOutOfRange { symbol: s, alphabet }));
    }
    Ok(s as Symbol)
}

impl FromStr for Program {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (header_line, header) = lines.next().ok_or_else(|| err(1, ParseErrorKind::MissingHeader))?;
        let (states, alphabet) = parse_header(header_line, header)?;
        let a = alphabet as usize;
        let mut table: Vec<Option<Transition>> = vec![None; states as usize * a];

        let mut last_line = header_line;
        for (line, entry) in lines {
            last_line = line;
            let words: Vec<&str> = entry.split_whitespace().collect();
            let [state, symbol, "->", target, write, dir] = words[..] else {
                return Err(err(
                    line,
                    ParseErrorKind::Malformed("expected `q<i> <symbol> -> <target> <write> <L|R>`".into()),
                ));
            };
            let state = parse_state(line, state, states)?;
            let symbol = parse_symbol(line, symbol, alphabet)?;
            let target = match target {
                "H" => Target::Halt,
                other => Target::State(parse_state(line, other, states)?),
            };
            let write = parse_symbol(line, write, alphabet)?;
            let dir = match dir {
                "L" => Move::Left,
                "R" => Move::Right,
                other => return Err(err(line, ParseErrorKind::Malformed(format!("bad direction `{other}`")))),
            };
            let slot = &mut table[(state as usize - 1) * a + symbol as usize];
            if slot.is_some() {
                return Err(err(line, ParseErrorKind::DuplicateEntry(state, symbol)));
            }
            *slot = Some(Transition { target, write, dir });
        }

        let mut full = Vec::with_capacity(table.len());
        for (i, t) in table.into_iter().enumerate() {
            let t = t.ok_or_else(|| {
                err(
                    last_line,
                    ParseErrorKind::IncompleteTable((i / a) as State + 1, (i % a) as Symbol),
                )
            })?;
            full.push(t);
        }
        Program::new(states, alphabet, full).map_err(|e| err(last_line, e.into()))
    }
}

/// JSON mirror of the text format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramJson {
    pub n: State,
    pub a: u32,
    pub table: Vec<TransitionJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionJson {
    pub state: State,
    pub symbol: Symbol,
    /// `q<j>` or `H`.
    pub target: String,
    pub write: Symbol,
    #[serde(rename = "move")]
    pub dir: Move,
}

impl From<&Program> for ProgramJson {
    fn from(p: &Program) -> Self {
        Self {
            n: p.states(),
            a: p.alphabet(),
            table: p
                .entries()
                .map(|((state, symbol), t)| TransitionJson {
                    state,
                    symbol,
                    target: t.target.to_string(),
                    write: t.write,
                    dir: t.dir,
                })
                .collect(),
        }
    }
}

impl TryFrom<ProgramJson> for Program {
    type Error = ParseError;

    /// Errors carry the 1-based position of the offending table entry in
    /// place of a line number.
    fn try_from(json: ProgramJson) -> Result<Self, ParseError> {
        let mut text = format!("tm n={} a={}\n", json.n, json.a);
        for e in &json.table {
            let dir = match e.dir {
                Move::Left => 'L',
                Move::Right => 'R',
            };
            text.push_str(&format!(
                "q{} {} -> {} {} {dir}\n",
                e.state, e.symbol, e.target, e.write
            ));
        }
        // Line k + 1 of the rendered text is entry k.
        text.parse::<Program>().map_err(|e| ParseError {
            line: e.line.saturating_sub(1),
            kind: e.kind,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn halter() -> Program {
        Program::new(
            1,
            2,
            vec![Transition::halt(0, Move::Right), Transition::goto(1, 1, Move::Left)],
        )
        .unwrap()
    }

    #[test]
    fn serializes_canonically() {
        let text = halter().to_text();
        assert_eq!(text, "tm n=1 a=2\nq1 0 -> H 0 R\nq1 1 -> q1 1 L\n");
        assert!(text.lines().any(|l| l == "q1 0 -> H 0 R"));
        assert_eq!(Program::parse(&text).unwrap(), halter());
    }

    #[test]
    fn accepts_any_entry_order_and_comments() {
        let text = "# a halter\n\ntm n=1 a=2\nq1 1 -> q1 1 L\n  q1 0 -> H 0 R  \n";
        assert_eq!(Program::parse(text).unwrap(), halter());
    }

    #[test]
    fn reports_incomplete_table() {
        let e = Program::parse("tm n=1 a=2\nq1 0 -> H 0 R\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::IncompleteTable(1, 1));
        assert!(e.to_string().contains("incomplete table"));
    }

    #[test]
    fn reports_state_out_of_range_with_line() {
        let text = "tm n=2 a=2\nq1 0 -> H 0 R\nq1 1 -> q3 0 R\nq2 0 -> H 0 R\nq2 1 -> H 0 R\n";
        let e = Program::parse(text).unwrap_err();
        assert_eq!(e.line, 3);
        assert_eq!(e.kind, ParseErrorKind::StateOutOfRange { state: 3, states: 2 });
        assert!(e.to_string().contains("state out of range"));
    }

    #[test]
    fn reports_duplicates_and_garbage() {
        let e = Program::parse("tm n=1 a=2\nq1 0 -> H 0 R\nq1 0 -> H 0 L\n").unwrap_err();
        assert_eq!((e.line, e.kind), (3, ParseErrorKind::DuplicateEntry(1, 0)));

        let e = Program::parse("tm n=1 a=2\nq1 0 => H 0 R\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(matches!(e.kind, ParseErrorKind::Malformed(_)));

        let e = Program::parse("tm n=1 a=2\nq1 2 -> H 0 R\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::SymbolOutOfRange { symbol: 2, alphabet: 2 });

        let e = Program::parse("tm n=1 a=2\nq1 0 -> H 0 U\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Malformed(_)));
    }

    #[test]
    fn reports_header_problems() {
        assert_eq!(Program::parse("").unwrap_err().kind, ParseErrorKind::MissingHeader);
        assert_eq!(
            Program::parse("q1 0 -> H 0 R").unwrap_err().kind,
            ParseErrorKind::MissingHeader
        );
        assert!(matches!(
            Program::parse("tm n=1").unwrap_err().kind,
            ParseErrorKind::BadHeader(_)
        ));
        assert_eq!(
            Program::parse("tm n=0 a=2").unwrap_err().kind,
            ParseErrorKind::Invalid(MachineError::NoStates)
        );
        assert_eq!(
            Program::parse("tm n=1 a=1").unwrap_err().kind,
            ParseErrorKind::Invalid(MachineError::BadAlphabet(1))
        );
    }

    #[test]
    fn json_mirrors_text() {
        let json = serde_json::to_value(halter().to_json()).unwrap();
        assert_eq!(json["n"], 1);
        assert_eq!(json["table"][0]["target"], "H");
        assert_eq!(json["table"][1]["move"], "L");
        let back: ProgramJson = serde_json::from_value(json).unwrap();
        assert_eq!(Program::try_from(back).unwrap(), halter());
    }

    #[test]
    fn json_errors_name_the_entry() {
        let mut json = halter().to_json();
        json.table[1].target = "q9".into();
        let e = Program::try_from(json).unwrap_err();
        assert_eq!(e.line, 2);
    }
}

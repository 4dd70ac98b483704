//! ACT/PRE commands and the textual trace format.
//!
//! ```text
//! # comment
//! PRE gap=13750
//! ACT 12 gap=35000
//! ```
//!
//! Gaps are integer picoseconds to the next command. Emission is canonical:
//! one command per line, single spaces, no comments.

use std::fmt;
use std::str::FromStr;

use crate::config::Picos;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CommandKind {
    Act(usize),
    Pre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Command {
    pub kind: CommandKind,
    /// Time until the next command is issued.
    pub gap_after: Picos,
}

impl Command {
    pub fn act(row: usize, gap_after: Picos) -> Self {
        Command {
            kind: CommandKind::Act(row),
            gap_after,
        }
    }

    pub fn pre(gap_after: Picos) -> Self {
        Command {
            kind: CommandKind::Pre,
            gap_after,
        }
    }

    pub fn is_act(&self) -> bool {
        matches!(self.kind, CommandKind::Act(_))
    }

    pub fn row(&self) -> Option<usize> {
        match self.kind {
            CommandKind::Act(r) => Some(r),
            CommandKind::Pre => None,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CommandKind::Act(r) => write!(f, "ACT {r} gap={}", self.gap_after),
            CommandKind::Pre => write!(f, "PRE gap={}", self.gap_after),
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut toks = s.split_whitespace();
        let op = toks.next().ok_or("empty command")?;
        let parse_gap = |tok: Option<&str>| -> std::result::Result<Picos, String> {
            let tok = tok.ok_or("missing gap=<int>")?;
            let v = tok
                .strip_prefix("gap=")
                .ok_or_else(|| format!("expected gap=<int>, got {tok:?}"))?;
            if v.starts_with('-') {
                return Err(format!("negative gap {v}"));
            }
            v.parse::<Picos>().map_err(|_| format!("invalid gap {v:?}"))
        };
        let cmd = match op {
            "ACT" => {
                let row_tok = toks.next().ok_or("ACT requires a row")?;
                let row = row_tok
                    .parse::<usize>()
                    .map_err(|_| format!("invalid row {row_tok:?}"))?;
                Command::act(row, parse_gap(toks.next())?)
            }
            "PRE" => Command::pre(parse_gap(toks.next())?),
            other => return Err(format!("unknown command {other:?}")),
        };
        if let Some(extra) = toks.next() {
            return Err(format!("trailing token {extra:?}"));
        }
        Ok(cmd)
    }
}

/// An ordered command sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub commands: Vec<Command>,
}

impl Trace {
    pub fn new() -> Self {
        Trace::default()
    }

    pub fn push(&mut self, cmd: Command) {
        self.commands.push(cmd);
    }

    pub fn extend(&mut self, other: impl IntoIterator<Item = Command>) {
        self.commands.extend(other);
    }

    pub fn len(&self) -> usize {
        self.commands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Command> {
        self.commands.iter()
    }

    /// Sum of all gaps.
    pub fn duration(&self) -> Picos {
        self.commands.iter().map(|c| c.gap_after).sum()
    }

    /// Rows opened by ACT commands, in issue order.
    pub fn activated_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.commands.iter().filter_map(Command::row)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut trace = Trace::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cmd = line
                .parse::<Command>()
                .map_err(|msg| Error::Parse { line: idx + 1, msg })?;
            trace.push(cmd);
        }
        Ok(trace)
    }

    pub fn emit(&self) -> String {
        let mut s = String::with_capacity(self.commands.len() * 16);
        for c in &self.commands {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        s
    }
}

impl From<Vec<Command>> for Trace {
    fn from(commands: Vec<Command>) -> Self {
        Trace { commands }
    }
}

impl IntoIterator for Trace {
    type Item = Command;
    type IntoIter = std::vec::IntoIter<Command>;

    fn into_iter(self) -> Self::IntoIter {
        self.commands.into_iter()
    }
}

impl<'a> IntoIterator for &'a Trace {
    type Item = &'a Command;
    type IntoIter = std::slice::Iter<'a, Command>;

    fn into_iter(self) -> Self::IntoIter {
        self.commands.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let t = Trace::parse("# header\n\nPRE gap=13750\nACT 5 gap=35000 # open\n").unwrap();
        assert_eq!(t.commands, vec![Command::pre(13_750), Command::act(5, 35_000)]);
        assert_eq!(t.emit(), "PRE gap=13750\nACT 5 gap=35000\n");
    }

    #[test]
    fn rejects_malformed_lines() {
        for bad in [
            "ACT gap=1",
            "ACT 3",
            "PRE gap=-4",
            "PRE gap=x",
            "NOP gap=1",
            "ACT 3 gap=1 extra",
            "PRE 10",
        ] {
            let err = Trace::parse(bad).unwrap_err();
            assert!(matches!(err, Error::Parse { line: 1, .. }), "{bad}: {err:?}");
        }
    }

    fn arb_command() -> impl Strategy<Value = Command> {
        prop_oneof![
            (0usize..100_000, any::<u32>()).prop_map(|(r, g)| Command::act(r, g as u64)),
            any::<u32>().prop_map(|g| Command::pre(g as u64)),
        ]
    }

    proptest! {
        #[test]
        fn text_roundtrip_is_bit_exact(cmds in prop::collection::vec(arb_command(), 0..64)) {
            let trace = Trace::from(cmds);
            let text = trace.emit();
            let back = Trace::parse(&text).unwrap();
            prop_assert_eq!(&back, &trace);
            prop_assert_eq!(back.emit(), text);
        }
    }
}

//! File formats: group files, pattern-group files, automaton files.
//!
//! All portraits use the text encoding of [`crate::tree::Element`]
//! (levels joined by `|`); words use `0`/`1` strings with `e` for the
//! empty word.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::groups::GroupSet;
use crate::patterns::{ConstraintPatternGroup, Pattern};
use crate::tree::{Element, LevelSet, Word};
use crate::automata::{Automaton, State};

/// Group file: `depth=<d>`, a `generators:` section, and an optional
/// `elements:` section, one portrait per line.
pub fn parse_group_file(text: &str, depth_cap: usize, order_cap: usize) -> Result<GroupSet> {
    let mut depth = None;
    let mut generators: Vec<Element> = Vec::new();
    let mut elements: Vec<Element> = Vec::new();
    let mut section = "";
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(d) = line.strip_prefix("depth=") {
            depth = Some(d.trim().parse::<usize>().map_err(|e| {
                Error::Parse(format!("bad depth: {e}"))
            })?);
            continue;
        }
        match line {
            "generators:" => section = "generators",
            "elements:" => section = "elements",
            _ => {
                let e = Element::parse(line)?;
                match section {
                    "generators" => generators.push(e),
                    "elements" => elements.push(e),
                    _ => return Err(Error::Parse(format!("portrait outside a section: {line}"))),
                }
            }
        }
    }
    let depth = depth.ok_or_else(|| Error::Parse("missing depth= header".into()))?;
    if depth > depth_cap {
        return Err(Error::ResourceCap {
            what: "group file depth",
            needed: depth as u128,
            cap: depth_cap as u128,
        });
    }
    for e in generators.iter().chain(&elements) {
        if e.depth() != depth {
            return Err(Error::DepthMismatch {
                left: depth,
                right: e.depth(),
            });
        }
    }
    if !elements.is_empty() {
        if generators.is_empty() {
            generators = elements.clone();
        }
        GroupSet::from_closed_elements(depth, elements, generators, true)
    } else {
        GroupSet::close(&generators, order_cap)
    }
}

pub fn write_group_file(g: &GroupSet, include_elements: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "depth={}", g.depth());
    let _ = writeln!(out, "generators:");
    for e in g.generators() {
        let _ = writeln!(out, "{e}");
    }
    if include_elements {
        let _ = writeln!(out, "elements:");
        for e in g.elements() {
            let _ = writeln!(out, "{e}");
        }
    }
    out
}

/// Pattern-group file: `depth=<d>` then `constraint=<word,word,...>` lines.
pub fn parse_pattern_file(text: &str, depth_cap: usize) -> Result<ConstraintPatternGroup> {
    let mut depth = None;
    let mut constraints: Vec<Vec<Word>> = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(d) = line.strip_prefix("depth=") {
            depth = Some(d.trim().parse::<usize>().map_err(|e| {
                Error::Parse(format!("bad depth: {e}"))
            })?);
        } else if let Some(c) = line.strip_prefix("constraint=") {
            let words = c
                .split(',')
                .map(Word::parse)
                .collect::<Result<Vec<_>>>()?;
            constraints.push(words);
        } else {
            return Err(Error::Parse(format!("unrecognized line: {line}")));
        }
    }
    let depth = depth.ok_or_else(|| Error::Parse("missing depth= header".into()))?;
    if depth > depth_cap {
        return Err(Error::ResourceCap {
            what: "pattern file depth",
            needed: depth as u128,
            cap: depth_cap as u128,
        });
    }
    let sets = constraints
        .into_iter()
        .map(|ws| LevelSet::new(depth, ws))
        .collect::<Result<Vec<_>>>()?;
    if sets.is_empty() {
        return Err(Error::Parse("pattern file has no constraints".into()));
    }
    ConstraintPatternGroup::new(depth, sets)
}

pub fn write_pattern_file(c: &ConstraintPatternGroup) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "depth={}", c.depth());
    for s in c.constraints() {
        let _ = writeln!(out, "constraint={s}");
    }
    out
}

/// Loads either file format: `constraint=` lines mean a pattern file,
/// otherwise a group file (an explicitly listed pattern group).
pub fn parse_pattern_auto(text: &str, depth_cap: usize, order_cap: usize) -> Result<Pattern> {
    if text.lines().any(|l| l.trim_start().starts_with("constraint=")) {
        Ok(Pattern::Constraint(parse_pattern_file(text, depth_cap)?))
    } else {
        Ok(Pattern::Explicit(parse_group_file(
            text, depth_cap, order_cap,
        )?))
    }
}

/// Automaton file: lines `state <name> <activity-bit> <succ0> <succ1>`.
/// The trivial state is the inactive self-looping one.
pub fn parse_automaton_file(text: &str) -> Result<Automaton> {
    let mut names: Vec<(String, bool, String, String)> = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 5 || parts[0] != "state" {
            return Err(Error::Parse(format!("bad automaton line: {line}")));
        }
        let active = match parts[2] {
            "0" => false,
            "1" => true,
            other => return Err(Error::Parse(format!("bad activity bit {other:?}"))),
        };
        names.push((
            parts[1].to_string(),
            active,
            parts[3].to_string(),
            parts[4].to_string(),
        ));
    }
    let index_of = |n: &str| -> Result<usize> {
        names
            .iter()
            .position(|(name, _, _, _)| name == n)
            .ok_or_else(|| Error::Parse(format!("unknown successor state {n:?}")))
    };
    let mut states = Vec::new();
    for (name, active, s0, s1) in &names {
        states.push(State {
            name: name.clone(),
            active: *active,
            succ: [index_of(s0)?, index_of(s1)?],
        });
    }
    let trivial = states
        .iter()
        .enumerate()
        .position(|(i, s)| !s.active && s.succ == [i, i])
        .ok_or_else(|| Error::Parse("no trivial state in automaton file".into()))?;
    Automaton::new(states, trivial)
}

pub fn write_automaton_file(aut: &Automaton) -> String {
    let mut out = String::new();
    for s in aut.states() {
        let _ = writeln!(
            out,
            "state {} {} {} {}",
            s.name,
            s.active as u8,
            aut.states()[s.succ[0]].name,
            aut.states()[s.succ[1]].name
        );
    }
    out
}

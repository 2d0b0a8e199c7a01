//! Line format shared by Büchi automata, DFAs and NFAs:
//!
//! ```text
//! alphabet a b c        # optional
//! states q0 q1
//! initial q0
//! accepting q1
//! trans q0 a q1
//! ```

use std::collections::HashMap;

use crate::alphabet::strip_comment;
use crate::{parse_err, Error, Result};

pub(crate) struct RawAutomaton {
    pub letters: Vec<String>,
    pub states: Vec<String>,
    pub initial: usize,
    pub accepting: Vec<usize>,
    pub trans: Vec<(usize, usize, usize)>,
}

pub(crate) fn parse(text: &str, letters: Option<&[String]>) -> Result<RawAutomaton> {
    let mut declared_letters: Option<Vec<String>> = None;
    let mut states: Vec<String> = Vec::new();
    let mut state_ix: HashMap<String, usize> = HashMap::new();
    let mut initial: Option<String> = None;
    let mut accepting: Vec<(usize, String)> = Vec::new();
    let mut trans: Vec<(usize, String, String, String)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw);
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some((&head, rest)) = toks.split_first() else {
            continue;
        };
        match head {
            "alphabet" => {
                if declared_letters.is_some() {
                    return Err(parse_err(line_no, "duplicate `alphabet` line"));
                }
                let mut seen = Vec::new();
                for t in rest {
                    if seen.contains(&t.to_string()) {
                        return Err(parse_err(line_no, format!("duplicate letter `{t}`")));
                    }
                    seen.push(t.to_string());
                }
                declared_letters = Some(seen);
            }
            "states" => {
                for t in rest {
                    if state_ix.contains_key(*t) {
                        return Err(parse_err(line_no, format!("duplicate state `{t}`")));
                    }
                    state_ix.insert(t.to_string(), states.len());
                    states.push(t.to_string());
                }
            }
            "initial" => {
                if initial.is_some() || rest.len() != 1 {
                    return Err(parse_err(line_no, "exactly one initial state expected"));
                }
                initial = Some(rest[0].to_string());
            }
            "accepting" => {
                accepting.extend(rest.iter().map(|t| (line_no, t.to_string())));
            }
            "trans" => {
                if rest.len() != 3 {
                    return Err(parse_err(line_no, "expected `trans <from> <letter> <to>`"));
                }
                trans.push((
                    line_no,
                    rest[0].to_string(),
                    rest[1].to_string(),
                    rest[2].to_string(),
                ));
            }
            other => {
                return Err(parse_err(line_no, format!("unexpected keyword `{other}`")));
            }
        }
    }

    let letters: Vec<String> = match (letters, declared_letters) {
        (Some(ext), Some(decl)) => {
            let mut a = ext.to_vec();
            let mut b = decl;
            a.sort();
            b.sort();
            if a != b {
                return Err(Error::AlphabetMismatch);
            }
            ext.to_vec()
        }
        (Some(ext), None) => ext.to_vec(),
        (None, Some(decl)) => decl,
        (None, None) => {
            let mut inferred: Vec<String> = Vec::new();
            for (_, _, a, _) in &trans {
                if !inferred.contains(a) {
                    inferred.push(a.clone());
                }
            }
            inferred
        }
    };
    let letter_ix: HashMap<&str, usize> = letters
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();

    let lookup = |line: usize, name: &str| -> Result<usize> {
        state_ix
            .get(name)
            .copied()
            .ok_or_else(|| parse_err(line, format!("unknown state `{name}`")))
    };
    let initial_name = initial.ok_or_else(|| parse_err(0, "missing `initial` line"))?;
    let initial = lookup(0, &initial_name)?;
    let accepting = accepting
        .iter()
        .map(|(l, s)| lookup(*l, s))
        .collect::<Result<Vec<_>>>()?;
    let trans = trans
        .iter()
        .map(|(l, p, a, q)| {
            let a_ix = *letter_ix
                .get(a.as_str())
                .ok_or_else(|| parse_err(*l, format!("unknown letter `{a}`")))?;
            Ok((lookup(*l, p)?, a_ix, lookup(*l, q)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RawAutomaton {
        letters,
        states,
        initial,
        accepting,
        trans,
    })
}

pub(crate) fn write(
    letters: &[String],
    states: &[String],
    initial: usize,
    accepting: impl Iterator<Item = usize>,
    trans: impl Iterator<Item = (usize, usize, usize)>,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("alphabet {}\n", letters.join(" ")));
    out.push_str(&format!("states {}\n", states.join(" ")));
    out.push_str(&format!("initial {}\n", states[initial]));
    let acc: Vec<&str> = accepting.map(|q| states[q].as_str()).collect();
    if !acc.is_empty() {
        out.push_str(&format!("accepting {}\n", acc.join(" ")));
    }
    for (p, a, q) in trans {
        out.push_str(&format!(
            "trans {} {} {}\n",
            states[p], letters[a], states[q]
        ));
    }
    out
}

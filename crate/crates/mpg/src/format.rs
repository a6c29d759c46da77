//! Line-oriented game file format and DOT export.
//!
//! ```text
//! game fig1
//! states q0 q1 q2 q3
//! initial q0
//! actions a b
//! obs o0 = q0
//! trans q0 a q1 -1
//! ```

use std::collections::HashMap;
use std::fmt::Write;

use crate::error::{MpgError, Result};
use crate::game::{Game, Transition};

fn perr(line: usize, msg: impl Into<String>) -> MpgError {
    MpgError::Parse { line, msg: msg.into() }
}

pub fn load_game(text: &str) -> Result<Game> {
    let mut name: Option<String> = None;
    let mut states: Vec<String> = Vec::new();
    let mut actions: Vec<String> = Vec::new();
    let mut initial: Option<(usize, String)> = None;
    let mut obs: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut trans: Vec<(usize, String, String, String, i64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let kw = toks.next().unwrap();
        let rest: Vec<&str> = toks.collect();
        match kw {
            "game" => {
                if rest.len() != 1 {
                    return Err(perr(line_no, "expected `game <name>`"));
                }
                name = Some(rest[0].to_string());
            }
            "states" => states.extend(rest.iter().map(|s| s.to_string())),
            "actions" => actions.extend(rest.iter().map(|s| s.to_string())),
            "initial" => {
                if rest.len() != 1 {
                    return Err(perr(line_no, "expected `initial <state>`"));
                }
                initial = Some((line_no, rest[0].to_string()));
            }
            "obs" => {
                if rest.len() < 3 || rest[1] != "=" {
                    return Err(perr(line_no, "expected `obs <name> = <state>...`"));
                }
                obs.push((line_no, rest[0].to_string(), rest[2..].iter().map(|s| s.to_string()).collect()));
            }
            "trans" => {
                if rest.len() != 4 {
                    return Err(perr(line_no, "expected `trans <src> <action> <dst> <weight>`"));
                }
                let w: i64 = rest[3]
                    .parse()
                    .map_err(|_| perr(line_no, format!("bad weight `{}`", rest[3])))?;
                trans.push((line_no, rest[0].into(), rest[1].into(), rest[2].into(), w));
            }
            other => return Err(perr(line_no, format!("unknown keyword `{other}`"))),
        }
    }

    let sidx: HashMap<&str, usize> = states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let aidx: HashMap<&str, usize> = actions.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let state = |line: usize, s: &str| {
        sidx.get(s).copied().ok_or_else(|| perr(line, format!("unknown state `{s}`")))
    };
    let (iline, iname) = initial.ok_or_else(|| perr(0, "missing `initial` line"))?;
    let init = state(iline, &iname)?;
    let mut observations = Vec::new();
    for (line, oname, members) in &obs {
        let ids = members.iter().map(|m| state(*line, m)).collect::<Result<Vec<_>>>()?;
        observations.push((oname.clone(), ids));
    }
    let mut transitions = Vec::new();
    for (line, src, act, dst, w) in &trans {
        let action = aidx
            .get(act.as_str())
            .copied()
            .ok_or_else(|| perr(*line, format!("unknown action `{act}`")))?;
        transitions.push(Transition { src: state(*line, src)?, action, dst: state(*line, dst)?, weight: *w });
    }
    Game::new(name.unwrap_or_else(|| "game".into()), states, actions, observations, init, transitions)
}

pub fn render_game(g: &Game) -> String {
    let mut s = String::new();
    writeln!(s, "game {}", g.name()).unwrap();
    writeln!(s, "states {}", g.state_names().join(" ")).unwrap();
    writeln!(s, "initial {}", g.state_name(g.initial())).unwrap();
    writeln!(s, "actions {}", g.action_names().join(" ")).unwrap();
    for o in 0..g.num_obs() {
        let members: Vec<&str> = g.observation(o).iter().map(|&q| g.state_name(q)).collect();
        writeln!(s, "obs {} = {}", g.obs_name(o), members.join(" ")).unwrap();
    }
    for t in g.transitions() {
        writeln!(
            s,
            "trans {} {} {} {}",
            g.state_name(t.src),
            g.action_name(t.action),
            g.state_name(t.dst),
            t.weight
        )
        .unwrap();
    }
    s
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering: observations become dashed clusters, edges carry `σ,w`.
pub fn to_dot(g: &Game) -> String {
    let mut s = String::new();
    writeln!(s, "digraph \"{}\" {{", dot_escape(g.name())).unwrap();
    writeln!(s, "  rankdir=LR;").unwrap();
    for o in 0..g.num_obs() {
        writeln!(s, "  subgraph cluster_{o} {{").unwrap();
        writeln!(s, "    style=dashed;").unwrap();
        writeln!(s, "    label=\"{}\";", dot_escape(g.obs_name(o))).unwrap();
        for &q in g.observation(o) {
            let shape = if q == g.initial() { "doublecircle" } else { "circle" };
            writeln!(s, "    s{q} [label=\"{}\", shape={shape}];", dot_escape(g.state_name(q))).unwrap();
        }
        writeln!(s, "  }}").unwrap();
    }
    for t in g.transitions() {
        writeln!(
            s,
            "  s{} -> s{} [label=\"{},{}\"];",
            t.src,
            t.dst,
            dot_escape(g.action_name(t.action)),
            t.weight
        )
        .unwrap();
    }
    writeln!(s, "}}").unwrap();
    s
}

//! Line-oriented text formats for tangles and certificates.
//!
//! ```text
//! tangle v1 legs=6
//! leg 1 in
//! leg 2 out
//! ...
//! x 1
//! e b1 c1.0
//! e c1.2 b4
//! ```
//!
//! ```text
//! cert v1
//! basis r2-par-over-expand ... r3-a-dn r3-a-up
//! start
//! tangle v1 legs=6
//! ...
//! step 1 move r2-anti-over-expand
//! tangle v1 legs=6
//! ...
//! end
//! ```
//!
//! `#` starts a comment; blank lines are ignored. Output is UTF-8 with LF
//! line endings, legs ascending, crossings by id, edges sorted by source
//! port (legs before crossing slots).

use std::fmt::Write as _;

use thiserror::Error;

use crate::diagram::{DiagramError, Edge, LegFlag, Port, TangleDiagram};
use crate::moves::{MoveName, MoveSet};
use crate::search::{Certificate, Step};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: header error: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}: unknown port {port}")]
    UnknownPort { line: usize, port: String },
    #[error("line {line}: duplicate use of port {port}")]
    DuplicatePort { line: usize, port: String },
    #[error("line {line}: step-index gap: expected {expected}, found {found}")]
    StepGap {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("diagram starting at line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: DiagramError,
    },
}

pub fn serialize_tangle(d: &TangleDiagram) -> String {
    let mut s = String::new();
    write_tangle(&mut s, d);
    s
}

fn write_tangle(s: &mut String, d: &TangleDiagram) {
    let _ = writeln!(s, "tangle v1 legs={}", d.leg_count());
    for (i, f) in d.legs().iter().enumerate() {
        let f = match f {
            LegFlag::In => "in",
            LegFlag::Out => "out",
        };
        let _ = writeln!(s, "leg {} {}", i + 1, f);
    }
    for c in d.crossings() {
        let _ = writeln!(s, "x {c}");
    }
    for e in d.edges() {
        let _ = writeln!(s, "e {} {}", e.from, e.to);
    }
}

/// Meaningful lines with their 1-based numbers.
fn lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("").trim();
            (!l.is_empty()).then_some((i + 1, l))
        })
        .collect()
}

fn parse_port(tok: &str, line: usize) -> Result<Port, CodecError> {
    let bad = || CodecError::Syntax {
        line,
        msg: format!("bad port syntax {tok:?}"),
    };
    if let Some(n) = tok.strip_prefix('b') {
        return n.parse().map(Port::Leg).map_err(|_| bad());
    }
    let rest = tok.strip_prefix('c').ok_or_else(bad)?;
    let (c, s) = rest.split_once('.').ok_or_else(bad)?;
    let c: u32 = c.parse().map_err(|_| bad())?;
    let s: u8 = s.parse().map_err(|_| bad())?;
    if s > 3 {
        return Err(CodecError::UnknownPort {
            line,
            port: tok.to_string(),
        });
    }
    Ok(Port::Slot(c, s))
}

/// Parses one tangle block starting at `lines[0]`; returns the diagram and
/// the number of lines consumed. Stops before `step`/`end` lines.
fn parse_tangle_block(lines: &[(usize, &str)]) -> Result<(TangleDiagram, usize), CodecError> {
    let Some(&(hline, header)) = lines.first() else {
        return Err(CodecError::Header {
            line: 0,
            msg: "missing tangle header".into(),
        });
    };
    let n: usize = header
        .strip_prefix("tangle v1 legs=")
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| CodecError::Header {
            line: hline,
            msg: format!("expected `tangle v1 legs=<2n>`, found {header:?}"),
        })?;
    if !n.is_multiple_of(2) {
        return Err(CodecError::Header {
            line: hline,
            msg: format!("leg count {n} is odd"),
        });
    }
    let mut legs: Vec<Option<LegFlag>> = vec![None; n];
    let mut crossings = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut used = std::collections::HashSet::new();
    let mut consumed = 1;
    for &(line, text) in &lines[1..] {
        let toks: Vec<&str> = text.split_whitespace().collect();
        match toks.as_slice() {
            ["leg", i, flag] => {
                let i: usize = i.parse().map_err(|_| CodecError::Syntax {
                    line,
                    msg: format!("bad leg number {i:?}"),
                })?;
                if i == 0 || i > n {
                    return Err(CodecError::UnknownPort {
                        line,
                        port: format!("b{i}"),
                    });
                }
                let f = match *flag {
                    "in" => LegFlag::In,
                    "out" => LegFlag::Out,
                    _ => {
                        return Err(CodecError::Syntax {
                            line,
                            msg: format!("leg flag must be in|out, found {flag:?}"),
                        })
                    }
                };
                if legs[i - 1].replace(f).is_some() {
                    return Err(CodecError::Syntax {
                        line,
                        msg: format!("leg {i} declared twice"),
                    });
                }
            }
            ["x", id] => {
                let id: u32 = id.parse().map_err(|_| CodecError::Syntax {
                    line,
                    msg: format!("bad crossing id {id:?}"),
                })?;
                crossings.push(id);
            }
            ["e", a, b] => {
                let pa = parse_port(a, line)?;
                let pb = parse_port(b, line)?;
                for (p, tok) in [(pa, a), (pb, b)] {
                    let known = match p {
                        Port::Leg(i) => i >= 1 && (i as usize) <= n,
                        Port::Slot(c, _) => crossings.contains(&c),
                    };
                    if !known {
                        return Err(CodecError::UnknownPort {
                            line,
                            port: tok.to_string(),
                        });
                    }
                    if !used.insert(p) {
                        return Err(CodecError::DuplicatePort {
                            line,
                            port: tok.to_string(),
                        });
                    }
                }
                edges.push(Edge::new(pa, pb));
            }
            [first, ..] if *first == "step" || *first == "end" || *first == "tangle" => break,
            _ => {
                return Err(CodecError::Syntax {
                    line,
                    msg: format!("unexpected line {text:?}"),
                })
            }
        }
        consumed += 1;
    }
    let legs = legs
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            f.ok_or(CodecError::Syntax {
                line: hline,
                msg: format!("leg {} not declared", i + 1),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let d = TangleDiagram::new(legs, crossings, edges)
        .map_err(|source| CodecError::Invalid { line: hline, source })?;
    Ok((d, consumed))
}

/// Parses and validates a tangle document.
pub fn parse_tangle(text: &str) -> Result<TangleDiagram, CodecError> {
    let ls = lines(text);
    let (d, used) = parse_tangle_block(&ls)?;
    if let Some(&(line, rest)) = ls.get(used) {
        return Err(CodecError::Syntax {
            line,
            msg: format!("trailing content {rest:?}"),
        });
    }
    Ok(d)
}

pub fn serialize_certificate(c: &Certificate) -> String {
    let mut s = String::from("cert v1\nbasis");
    for m in &c.basis {
        let _ = write!(s, " {m}");
    }
    s.push_str("\nstart\n");
    write_tangle(&mut s, &c.start);
    for (k, step) in c.steps.iter().enumerate() {
        let _ = writeln!(s, "step {} move {}", k + 1, step.name);
        write_tangle(&mut s, &step.result);
    }
    s.push_str("end\n");
    s
}

pub fn parse_certificate(text: &str) -> Result<Certificate, CodecError> {
    let ls = lines(text);
    let expect = |i: usize, what: &str| -> Result<(usize, &str), CodecError> {
        ls.get(i).copied().ok_or(CodecError::Syntax {
            line: ls.last().map_or(0, |l| l.0),
            msg: format!("unexpected end of input, expected {what}"),
        })
    };
    let (line, header) = expect(0, "cert header")?;
    if header != "cert v1" {
        return Err(CodecError::Header {
            line,
            msg: format!("expected `cert v1`, found {header:?}"),
        });
    }
    let (line, basis_line) = expect(1, "basis line")?;
    let names = basis_line.strip_prefix("basis").ok_or(CodecError::Syntax {
        line,
        msg: "expected basis line".into(),
    })?;
    let mut basis = MoveSet::new();
    for tok in names.split_whitespace() {
        let m: MoveName = tok.parse().map_err(|e: crate::moves::UnknownMove| CodecError::Syntax {
            line,
            msg: e.to_string(),
        })?;
        basis.insert(m);
    }
    let (line, start_kw) = expect(2, "start")?;
    if start_kw != "start" {
        return Err(CodecError::Syntax {
            line,
            msg: format!("expected `start`, found {start_kw:?}"),
        });
    }
    let mut i = 3;
    let (start, used) = parse_tangle_block(&ls[i.min(ls.len())..])?;
    i += used;
    let mut steps = Vec::new();
    loop {
        let (line, text) = expect(i, "step or end")?;
        if text == "end" {
            if let Some(&(line, rest)) = ls.get(i + 1) {
                return Err(CodecError::Syntax {
                    line,
                    msg: format!("trailing content {rest:?}"),
                });
            }
            break;
        }
        let toks: Vec<&str> = text.split_whitespace().collect();
        let ["step", k, "move", name] = toks.as_slice() else {
            return Err(CodecError::Syntax {
                line,
                msg: format!("expected `step <k> move <name>`, found {text:?}"),
            });
        };
        let k: usize = k.parse().map_err(|_| CodecError::Syntax {
            line,
            msg: format!("bad step index {k:?}"),
        })?;
        if k != steps.len() + 1 {
            return Err(CodecError::StepGap {
                line,
                expected: steps.len() + 1,
                found: k,
            });
        }
        let name: MoveName = name.parse().map_err(|e: crate::moves::UnknownMove| CodecError::Syntax {
            line,
            msg: e.to_string(),
        })?;
        i += 1;
        let (result, used) = parse_tangle_block(&ls[i.min(ls.len())..])?;
        i += used;
        steps.push(Step { name, result });
    }
    Ok(Certificate {
        basis,
        start,
        steps,
    })
}

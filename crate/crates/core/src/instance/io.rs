//! Instance file format and its JSON counterpart.
//!
//! The text format is line oriented, fields separated by single spaces:
//!
//! ```text
//! swapfl-instance 1
//! n <nodes> m <edges>
//! generator <name>
//! seed <u64>
//! param <key> <value>        (zero or more, sorted by key)
//! nodes
//! <id> <x> <y> <demand>      (n lines, ids 0..n-1 in order)
//! edges
//! <u> <v> <length>           (m lines)
//! end
//! ```
//!
//! Reals are written with Rust's shortest round-trip formatting, so
//! `load(save(x))` reproduces coordinates, demand and lengths bit for bit.
//! The distance matrix is never stored; it is rebuilt on load.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Edge, Graph, Instance, InstanceError, InstanceMeta, Point};

pub const FORMAT_NAME: &str = "swapfl-instance";
pub const FORMAT_VERSION: u32 = 1;

fn check_token(what: &str, s: &str) -> Result<(), InstanceError> {
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        return Err(InstanceError::Parse {
            line: 0,
            message: format!("{what} {s:?} must be a non-empty token without whitespace"),
        });
    }
    Ok(())
}

pub fn to_text(instance: &Instance) -> Result<String, InstanceError> {
    let meta = instance.meta();
    let generator = if meta.generator.is_empty() {
        "unknown"
    } else {
        meta.generator.as_str()
    };
    check_token("generator", generator)?;
    let g = instance.graph();
    let mut s = String::new();
    let _ = writeln!(s, "{FORMAT_NAME} {FORMAT_VERSION}");
    let _ = writeln!(s, "n {} m {}", g.len(), g.edges().len());
    let _ = writeln!(s, "generator {generator}");
    let _ = writeln!(s, "seed {}", meta.seed);
    for (k, v) in &meta.params {
        check_token("param key", k)?;
        check_token("param value", v)?;
        let _ = writeln!(s, "param {k} {v}");
    }
    s.push_str("nodes\n");
    for (i, (p, w)) in g.nodes().iter().zip(instance.demand()).enumerate() {
        let _ = writeln!(s, "{i} {} {} {w}", p.x, p.y);
    }
    s.push_str("edges\n");
    for e in g.edges() {
        let _ = writeln!(s, "{} {} {}", e.u, e.v, e.length);
    }
    s.push_str("end\n");
    Ok(s)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<Vec<&'a str>, InstanceError> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l.split_whitespace().collect())
            }
            None => Err(self.err("unexpected end of file")),
        }
    }

    fn err(&self, message: impl Into<String>) -> InstanceError {
        InstanceError::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn parse<T: FromStr>(&self, tok: &str, what: &str) -> Result<T, InstanceError> {
        tok.parse()
            .map_err(|_| self.err(format!("invalid {what} {tok:?}")))
    }

    fn expect(&mut self, head: &str, arity: usize) -> Result<Vec<&'a str>, InstanceError> {
        let toks = self.next()?;
        if toks.first() != Some(&head) || toks.len() != arity {
            return Err(self.err(format!("expected `{head}` line with {arity} fields")));
        }
        Ok(toks)
    }
}

pub fn from_text(text: &str) -> Result<Instance, InstanceError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    let header = lines.expect(FORMAT_NAME, 2)?;
    let version: u32 = lines.parse(header[1], "format version")?;
    if version != FORMAT_VERSION {
        return Err(lines.err(format!("unsupported format version {version}")));
    }
    let sizes = lines.next()?;
    if sizes.len() != 4 || sizes[0] != "n" || sizes[2] != "m" {
        return Err(lines.err("expected `n <nodes> m <edges>`"));
    }
    let n: usize = lines.parse(sizes[1], "node count")?;
    let m: usize = lines.parse(sizes[3], "edge count")?;
    let generator = lines.expect("generator", 2)?[1].to_string();
    let seed = lines.expect("seed", 2)?;
    let seed: u64 = lines.parse(seed[1], "seed")?;
    let mut meta = InstanceMeta {
        generator,
        seed,
        ..Default::default()
    };
    loop {
        let toks = lines.next()?;
        match toks.as_slice() {
            ["param", k, v] => {
                meta.params.insert(k.to_string(), v.to_string());
            }
            ["nodes"] => break,
            _ => return Err(lines.err("expected `param` or `nodes`")),
        }
    }
    let mut nodes = Vec::with_capacity(n);
    let mut demand = Vec::with_capacity(n);
    for i in 0..n {
        let toks = lines.next()?;
        if toks.len() != 4 {
            return Err(lines.err("node line needs `id x y demand`"));
        }
        let id: usize = lines.parse(toks[0], "node id")?;
        if id != i {
            return Err(lines.err(format!("node ids must be sequential, expected {i}")));
        }
        nodes.push(Point::new(
            lines.parse(toks[1], "x")?,
            lines.parse(toks[2], "y")?,
        ));
        demand.push(lines.parse(toks[3], "demand")?);
    }
    lines.expect("edges", 1)?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let toks = lines.next()?;
        if toks.len() != 3 {
            return Err(lines.err("edge line needs `u v length`"));
        }
        edges.push(Edge {
            u: lines.parse(toks[0], "edge endpoint")?,
            v: lines.parse(toks[1], "edge endpoint")?,
            length: lines.parse(toks[2], "edge length")?,
        });
    }
    lines.expect("end", 1)?;
    let graph = Graph::new(nodes, edges)?;
    Instance::new(graph, demand, meta)
}

pub fn save(instance: &Instance, path: impl AsRef<Path>) -> Result<(), InstanceError> {
    fs::write(path, to_text(instance)?)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Instance, InstanceError> {
    from_text(&fs::read_to_string(path)?)
}

/// JSON form of an instance used on the wire and in trajectory files.
/// `nodes` rows are `[x, y, demand]`, `edges` rows are `[u, v, length]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    #[serde(default)]
    pub meta: InstanceMeta,
    pub nodes: Vec<(f64, f64, f64)>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl InstanceDoc {
    pub fn from_instance(instance: &Instance) -> Self {
        let g = instance.graph();
        InstanceDoc {
            meta: instance.meta().clone(),
            nodes: g
                .nodes()
                .iter()
                .zip(instance.demand())
                .map(|(p, &w)| (p.x, p.y, w))
                .collect(),
            edges: g.edges().iter().map(|e| (e.u, e.v, e.length)).collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance, InstanceError> {
        let nodes = self
            .nodes
            .iter()
            .map(|&(x, y, _)| Point::new(x, y))
            .collect();
        let demand = self.nodes.iter().map(|&(_, _, w)| w).collect();
        let edges = self
            .edges
            .iter()
            .map(|&(u, v, length)| Edge { u, v, length })
            .collect();
        Instance::new(Graph::new(nodes, edges)?, demand, self.meta.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::path4;

    #[test]
    fn text_round_trip() {
        let mut inst = path4(vec![0.1, 1.0 / 3.0, 2.5e-7, 12345.678]);
        inst.meta.generator = "path".into();
        inst.meta.params.insert("w".into(), "4".into());
        let text = to_text(&inst).unwrap();
        let back = from_text(&text).unwrap();
        assert_eq!(back.graph(), inst.graph());
        assert_eq!(back.demand(), inst.demand());
        assert_eq!(back.meta(), inst.meta());
        assert_eq!(to_text(&back).unwrap(), text);
    }

    #[test]
    fn rejects_bad_header_and_disconnected() {
        assert!(matches!(
            from_text("nope 1\n"),
            Err(InstanceError::Parse { line: 1, .. })
        ));
        let text = "swapfl-instance 1\nn 3 m 1\ngenerator x\nseed 0\nnodes\n0 0 0 1\n1 1 0 1\n2 2 0 1\nedges\n0 1 1\nend\n";
        assert!(matches!(
            from_text(text),
            Err(InstanceError::Disconnected { from: 0, to: 2 })
        ));
        let text = "swapfl-instance 2\n";
        assert!(matches!(from_text(text), Err(InstanceError::Parse { .. })));
    }

    #[test]
    fn doc_round_trip() {
        let inst = path4(vec![1.0, 2.0, 3.0, 4.0]);
        let doc = InstanceDoc::from_instance(&inst);
        let json = serde_json::to_string(&doc).unwrap();
        let back: InstanceDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_instance().unwrap().graph(), inst.graph());
    }
}

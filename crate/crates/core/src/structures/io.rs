//! Graph interchange: JSON objects and plain edge lists.

use serde::{Deserialize, Serialize};

use super::{Structure, Vertex, Vocabulary};
use crate::error::{Error, Result};

/// `{"n": 3, "edges": [[1, 2], [2, 3]], "successor": false}`. Edge pairs are
/// written sorted with `i < j`. An optional `meta` object is carried through
/// but ignored when building the structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[Vertex; 2]>,
    #[serde(default)]
    pub successor: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

impl GraphJson {
    pub fn from_structure(m: &Structure) -> Result<Self> {
        let v = m.vocab();
        if *v != Vocabulary::graph() && *v != Vocabulary::graph_with_successor() {
            return Err(Error::invalid("graph JSON needs the {E} or {E, S} vocabulary"));
        }
        if v.has_successor() && !m.has_exact_successor() {
            return Err(Error::invalid("S is not the full successor relation"));
        }
        Ok(GraphJson {
            n: m.n(),
            edges: m.edges().into_iter().map(|(a, b)| [a, b]).collect(),
            successor: v.has_successor(),
            meta: None,
        })
    }

    pub fn to_structure(&self) -> Result<Structure> {
        let edges: Vec<(Vertex, Vertex)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        if self.successor {
            Structure::graph_with_successor(self.n, &edges)
        } else {
            Structure::graph(self.n, &edges)
        }
    }
}

pub fn to_json_string(m: &Structure) -> Result<String> {
    let g = GraphJson::from_structure(m)?;
    Ok(serde_json::to_string(&g).expect("graph JSON serialises"))
}

pub fn from_json_str(text: &str) -> Result<Structure> {
    let g: GraphJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    g.to_structure()
}

/// Parse an edge list: one `i j` pair per line, `#` starts a comment, and an
/// optional `n N` line fixes the universe size (otherwise the largest label).
pub fn parse_edge_list(text: &str) -> Result<Structure> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let fields: Vec<(usize, &str)> = tokens(line);
        if fields.is_empty() {
            continue;
        }
        let err = |col: usize, msg: String| Error::Parse {
            line: idx + 1,
            column: col + 1,
            message: msg,
        };
        let num = |(col, tok): (usize, &str)| -> Result<u64> {
            tok.parse::<u64>()
                .map_err(|_| err(col, format!("expected a number, found {tok:?}")))
        };
        if fields[0].1 == "n" {
            if fields.len() != 2 {
                return Err(err(fields[0].0, "expected `n <size>`".into()));
            }
            n = Some(num(fields[1])? as usize);
            continue;
        }
        if fields.len() != 2 {
            return Err(err(fields[0].0, format!("expected 2 fields, found {}", fields.len())));
        }
        let a = num(fields[0])?;
        let b = num(fields[1])?;
        if a == 0 || b == 0 || a > u32::MAX as u64 || b > u32::MAX as u64 {
            return Err(err(fields[0].0, "vertex labels start at 1".into()));
        }
        if a == b {
            return Err(err(fields[0].0, format!("self-loop on {a}")));
        }
        edges.push((a as Vertex, b as Vertex));
    }
    let max = edges.iter().map(|&(a, b)| a.max(b) as usize).max().unwrap_or(0);
    let n = n.unwrap_or(max);
    if max > n {
        return Err(Error::invalid(format!("edge endpoint {max} exceeds n = {n}")));
    }
    Structure::graph(n, &edges)
}

pub fn write_edge_list(m: &Structure) -> String {
    let mut out = format!("n {}\n", m.n());
    for (a, b) in m.edges() {
        out.push_str(&format!("{a} {b}\n"));
    }
    out
}

fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let g = Structure::graph(4, &[(3, 1), (2, 4)]).unwrap();
        let s = to_json_string(&g).unwrap();
        assert_eq!(s, r#"{"n":4,"edges":[[1,3],[2,4]],"successor":false}"#);
        assert_eq!(from_json_str(&s).unwrap(), g);
    }

    #[test]
    fn json_with_successor_and_meta() {
        let s = r#"{"n":3,"edges":[],"successor":true,"meta":{"seed":1}}"#;
        let g = from_json_str(s).unwrap();
        assert!(g.has_exact_successor());
    }

    #[test]
    fn edge_list_parsing() {
        let g = parse_edge_list("# triangle\nn 4\n1 2\n2 3 # middle\n1 3\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
        assert_eq!(parse_edge_list("").unwrap().n(), 0);
    }

    #[test]
    fn edge_list_errors_have_positions() {
        match parse_edge_list("1 2\n1 x\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_edge_list("n 2\n1 3\n").is_err());
        assert!(parse_edge_list("2 2\n").is_err());
    }
}

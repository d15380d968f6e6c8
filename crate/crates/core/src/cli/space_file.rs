//! TOML space files.
//!
//! ```toml
//! base_point = "2"
//! absorbing = ["0", "4"]
//! vertices = [{ id = "0" }, { id = "1" }, { id = "2" }, { id = "3" }, { id = "4" }]
//! edges = [
//!     { from = "0", to = "1", weight = 1.0 },
//!     { from = "1", to = "2", weight = 1.0, directed = true },
//! ]
//!
//! [killing]
//! "3" = 0.1
//! ```
//!
//! Edges are undirected unless `directed = true`; repeated edges add up.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::space::{HarmonicSpace, SpaceBuilder};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    vertices: Vec<Spanned<VertexRecord>>,
    edges: Vec<Spanned<EdgeRecord>>,
    absorbing: Vec<Spanned<String>>,
    base_point: Spanned<String>,
    #[serde(default)]
    killing: BTreeMap<String, Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    from: String,
    to: String,
    weight: f64,
    #[serde(default)]
    directed: bool,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn schema<T>(text: &str, item: &Spanned<T>, message: String) -> Error {
    Error::Schema {
        line: line_of(text, item.span().start),
        message,
    }
}

/// Parses a space file held in memory.
pub fn parse_space_str(text: &str) -> Result<HarmonicSpace> {
    let doc: Document = toml::from_str(text).map_err(|e| Error::Schema {
        line: e.span().map_or(0, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let mut index = HashMap::new();
    let mut ids = Vec::with_capacity(doc.vertices.len());
    for v in &doc.vertices {
        let id = &v.get_ref().id;
        if index.insert(id.clone(), ids.len()).is_some() {
            return Err(schema(text, v, format!("duplicate vertex id {id:?}")));
        }
        ids.push(id.clone());
    }
    let lookup = |item: &Spanned<String>, field: &str| -> Result<usize> {
        index
            .get(item.get_ref())
            .copied()
            .ok_or_else(|| schema(text, item, format!("{field} names unknown vertex {:?}", item.get_ref())))
    };
    let mut b = SpaceBuilder::new(ids);
    for e in &doc.edges {
        let r = e.get_ref();
        let name = format!("edge {:?} -> {:?}", r.from, r.to);
        let find = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| schema(text, e, format!("{name} names unknown vertex {id:?}")))
        };
        let (a, c) = (find(&r.from)?, find(&r.to)?);
        if !(r.weight.is_finite() && r.weight >= 0.0) {
            return Err(schema(text, e, format!("{name} has invalid weight {}", r.weight)));
        }
        if r.directed {
            b.directed_edge(a, c, r.weight);
        } else {
            b.edge(a, c, r.weight);
        }
    }
    for a in &doc.absorbing {
        b.absorbing(lookup(a, "absorbing")?);
    }
    b.base_point(lookup(&doc.base_point, "base_point")?);
    for (id, p) in &doc.killing {
        let v = index
            .get(id)
            .copied()
            .ok_or_else(|| schema(text, p, format!("killing names unknown vertex {id:?}")))?;
        let q = *p.get_ref();
        if !(0.0..1.0).contains(&q) {
            return Err(schema(text, p, format!("killing probability {q} at {id:?} outside [0, 1)")));
        }
        b.killing(v, q);
    }
    b.build()
}

pub fn parse_space_file(path: &Path) -> Result<HarmonicSpace> {
    parse_space_str(&std::fs::read_to_string(path)?)
}

fn quoted(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn weight(w: f64) -> String {
    let s = format!("{w:?}");
    if s.contains(['.', 'e', 'i', 'N']) {
        s
    } else {
        format!("{s}.0")
    }
}

/// Writes a space in the file format; [`parse_space_str`] inverts it.
pub fn serialize_space(space: &HarmonicSpace) -> String {
    let mut out = String::new();
    let q = |v: usize| quoted(space.id(v));
    writeln!(out, "base_point = {}", q(space.base_point())).unwrap();
    let absorbing: Vec<String> = space.absorbing_vertices().into_iter().map(q).collect();
    writeln!(out, "absorbing = [{}]", absorbing.join(", ")).unwrap();
    out.push_str("vertices = [\n");
    for v in 0..space.len() {
        writeln!(out, "    {{ id = {} }},", q(v)).unwrap();
    }
    out.push_str("]\nedges = [\n");
    let lookup = |a: usize, b: usize| {
        space
            .conductances(a)
            .binary_search_by_key(&b, |&(j, _)| j)
            .ok()
            .map(|k| space.conductances(a)[k].1)
    };
    for x in 0..space.len() {
        for &(y, w) in space.conductances(x) {
            let back = lookup(y, x);
            if x != y && back == Some(w) {
                if x < y {
                    writeln!(out, "    {{ from = {}, to = {}, weight = {} }},", q(x), q(y), weight(w)).unwrap();
                }
            } else {
                writeln!(
                    out,
                    "    {{ from = {}, to = {}, weight = {}, directed = true }},",
                    q(x),
                    q(y),
                    weight(w)
                )
                .unwrap();
            }
        }
    }
    out.push_str("]\n");
    let killed: Vec<usize> = (0..space.len()).filter(|&v| space.killing(v) > 0.0).collect();
    if !killed.is_empty() {
        out.push_str("\n[killing]\n");
        for v in killed {
            writeln!(out, "{} = {}", q(v), weight(space.killing(v))).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let s = parse_space_str(
            "base_point = \"a\"\nabsorbing = [\"b\"]\nvertices = [{ id = \"a\" }, { id = \"b\" }]\nedges = [{ from = \"a\", to = \"b\", weight = 2.0 }]\n",
        )
        .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.kernel_entry(0, 1), 1.0);
    }

    #[test]
    fn negative_weight_names_the_edge() {
        let text = "base_point = \"a\"\nabsorbing = [\"b\"]\nvertices = [{ id = \"a\" }, { id = \"b\" }]\nedges = [\n  { from = \"a\", to = \"b\", weight = -1.0 },\n]\n";
        match parse_space_str(text) {
            Err(Error::Schema { line, message }) => {
                assert_eq!(line, 5);
                assert!(message.contains("\"a\" -> \"b\""), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_and_unknown_fields_carry_lines() {
        let err = parse_space_str("base_point = \"a\"\nabsorbing = [\nvertices = 3\n").unwrap_err();
        assert!(matches!(err, Error::Schema { line, .. } if line >= 2));
        let err = parse_space_str("base_point = \"a\"\ncolour = 1\n").unwrap_err();
        assert!(matches!(err, Error::Schema { .. }));
    }

    #[test]
    fn duplicate_edges_add_and_isolated_vertices_fail() {
        let s = parse_space_str(
            "base_point = \"a\"\nabsorbing = [\"b\", \"c\"]\nvertices = [{ id = \"a\" }, { id = \"b\" }, { id = \"c\" }]\nedges = [{ from = \"a\", to = \"b\", weight = 1.0 }, { from = \"a\", to = \"b\", weight = 1.0 }, { from = \"a\", to = \"c\", weight = 2.0 }]\n",
        )
        .unwrap();
        assert_eq!(s.kernel_entry(0, 1), 0.5);
        let err = parse_space_str(
            "base_point = \"a\"\nabsorbing = [\"b\"]\nvertices = [{ id = \"a\" }, { id = \"b\" }, { id = \"c\" }]\nedges = [{ from = \"a\", to = \"b\", weight = 1.0 }]\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("isolated vertex \"c\""));
    }

    #[test]
    fn recurrent_component_is_named() {
        let err = parse_space_str(
            "base_point = \"a\"\nabsorbing = [\"z\"]\nvertices = [{ id = \"a\" }, { id = \"b\" }, { id = \"z\" }]\nedges = [{ from = \"a\", to = \"b\", weight = 1.0 }, { from = \"z\", to = \"a\", weight = 1.0, directed = true }]\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidSpace(_)), "{err}");
    }
}

//! DOT and JSON rendering of certificates and assembled systems.

use std::fmt::Write;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::Error;
use crate::prover::{FactorizationSystem, ProofTree};
use crate::series::Monomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Dot,
    Json,
}

fn edge_label(m: Monomial) -> String {
    m.to_string().replace('*', " ")
}

fn write_tree(out: &mut String, tree: &ProofTree, prefix: &str, next: &mut usize) -> String {
    let id = format!("{prefix}n{next}");
    *next += 1;
    let shape = if tree.is_leaf() { "box" } else { "ellipse" };
    let _ = writeln!(out, "  {id} [label=\"H{}\", shape={shape}];", tree.beta);
    if let Some(e) = &tree.expansion {
        let l = write_tree(out, &e.left, prefix, next);
        let r = write_tree(out, &e.right, prefix, next);
        let _ = writeln!(out, "  {id} -> {l} [label=\"1\"];");
        let _ = writeln!(out, "  {id} -> {r} [label=\"{}\", taillabel=\"r={}\"];", edge_label(e.weight), e.coordinate + 1);
    }
    id
}

/// A `digraph` with one node per tree node; edges carry their weights.
pub fn tree_to_dot(tree: &ProofTree) -> String {
    let mut out = String::from("digraph certificate {\n");
    write_tree(&mut out, tree, "", &mut 0);
    out.push_str("}\n");
    out
}

/// One cluster per certificate, plus the diagonal weights as a comment.
pub fn system_to_dot(sys: &FactorizationSystem) -> String {
    let mut out = String::from("digraph system {\n");
    let v: Vec<String> = sys.v.iter().map(Monomial::to_string).collect();
    let _ = writeln!(out, "  // S = {}, V = diag({})", sys.shift, v.join(", "));
    for (i, t) in sys.certificates.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{i} {{");
        let _ = writeln!(out, "  label=\"H{}\";", t.beta);
        write_tree(&mut out, t, &format!("c{i}_"), &mut 0);
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

pub fn from_json<T: DeserializeOwned>(text: &str, path: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| Error::Format {
        path: path.to_string(),
        message: e.to_string(),
    })
}

pub fn render_tree(tree: &ProofTree, format: Format) -> String {
    match format {
        Format::Dot => tree_to_dot(tree),
        Format::Json => to_json(tree),
    }
}

pub fn render_system(sys: &FactorizationSystem, format: Format) -> String {
    match format {
        Format::Dot => system_to_dot(sys),
        Format::Json => to_json(sys),
    }
}

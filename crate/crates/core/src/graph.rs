//! Immutable simple undirected graphs with file ingestion and basic statistics.
//!
//! Vertex ids are dense `0..n`. Neighborhoods are open (a vertex is not its own
//! neighbor), sorted, and symmetric. Self-loops and duplicate edges are rejected
//! or collapsed at construction time, so `m == Σ deg / 2` holds exactly.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Immutable simple undirected graph: sorted adjacency sets plus edge count.
///
/// Edge weights are optional and default to 1; they only influence modularity
/// and other weighted metrics, never the Jaccard distance (which is set-based).
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    weights: Option<Vec<Vec<f64>>>,
    m: usize,
}

impl Graph {
    /// Build a graph from undirected edges; `n = 1 + max vertex id`.
    ///
    /// Duplicate edges (in either orientation) collapse to one. Self-loops are
    /// rejected.
    pub fn from_edges(edges: &[(u32, u32)]) -> Result<Graph> {
        let n = edges
            .iter()
            .map(|&(u, v)| u.max(v) as usize + 1)
            .max()
            .unwrap_or(0);
        Self::from_edges_with_n(n, edges)
    }

    /// Build a graph over exactly `n` vertices; ids `>= n` are an error.
    pub fn from_edges_with_n(n: usize, edges: &[(u32, u32)]) -> Result<Graph> {
        let mut set = BTreeMap::new();
        for &(u, v) in edges {
            set.insert(normalize(u, v)?, 1.0f64);
        }
        Self::assemble(n, set, false)
    }

    /// Weighted variant; a repeated edge keeps the last weight seen.
    pub fn from_weighted_edges_with_n(n: usize, edges: &[(u32, u32, f64)]) -> Result<Graph> {
        let mut set = BTreeMap::new();
        for &(u, v, w) in edges {
            set.insert(normalize(u, v)?, w);
        }
        Self::assemble(n, set, true)
    }

    fn assemble(n: usize, set: BTreeMap<(u32, u32), f64>, weighted: bool) -> Result<Graph> {
        let mut adj = vec![Vec::new(); n];
        let mut wadj = weighted.then(|| vec![Vec::new(); n]);
        let m = set.len();
        for (&(u, v), &w) in &set {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Config(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
            if let Some(wadj) = wadj.as_mut() {
                wadj[u as usize].push(w);
                wadj[v as usize].push(w);
            }
        }
        // BTreeMap iteration inserts neighbors of each vertex in ascending order
        // only for the first endpoint; sort both lists together.
        if let Some(wadj) = wadj.as_mut() {
            for (nbrs, ws) in adj.iter_mut().zip(wadj.iter_mut()) {
                let mut pairs: Vec<(u32, f64)> =
                    nbrs.iter().copied().zip(ws.iter().copied()).collect();
                pairs.sort_by_key(|&(v, _)| v);
                *nbrs = pairs.iter().map(|&(v, _)| v).collect();
                *ws = pairs.iter().map(|&(_, w)| w).collect();
            }
        } else {
            for nbrs in adj.iter_mut() {
                nbrs.sort_unstable();
            }
        }
        Ok(Graph {
            adj,
            weights: wadj,
            m,
        })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    /// Open neighborhood of `v`, sorted ascending.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Weight of edge `(u, v)`; 1 for unweighted graphs, 0 if absent.
    pub fn edge_weight(&self, u: u32, v: u32) -> f64 {
        match self.adj[u as usize].binary_search(&v) {
            Err(_) => 0.0,
            Ok(idx) => match &self.weights {
                Some(w) => w[u as usize][idx],
                None => 1.0,
            },
        }
    }

    /// Weighted degree of `v` (equals `degree` when unweighted).
    pub fn strength(&self, v: u32) -> f64 {
        match &self.weights {
            Some(w) => w[v as usize].iter().sum(),
            None => self.degree(v) as f64,
        }
    }

    /// Total edge weight (equals `m` when unweighted).
    pub fn total_weight(&self) -> f64 {
        match &self.weights {
            Some(w) => w.iter().flatten().sum::<f64>() / 2.0,
            None => self.m as f64,
        }
    }

    /// Iterate undirected edges once each, `u < v`, with weights.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.adj.iter().enumerate().flat_map(move |(u, nbrs)| {
            nbrs.iter().enumerate().filter_map(move |(idx, &v)| {
                ((u as u32) < v).then(|| {
                    let w = match &self.weights {
                        Some(w) => w[u][idx],
                        None => 1.0,
                    };
                    (u as u32, v, w)
                })
            })
        })
    }

    /// Overall density `|E| / (0.5 · N · (N − 1))`, the empirical edge probability.
    pub fn density(&self) -> Result<f64> {
        let n = self.n();
        if n < 2 {
            return Err(Error::Degenerate(format!(
                "density needs at least 2 vertices, got {n}"
            )));
        }
        Ok(self.m as f64 / (0.5 * n as f64 * (n as f64 - 1.0)))
    }

    /// Write the edge-list format (`u v` or `u v w` per line).
    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        for (u, v, w) in self.edges() {
            if self.is_weighted() {
                out.push_str(&format!("{u} {v} {w}\n"));
            } else {
                out.push_str(&format!("{u} {v}\n"));
            }
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

fn normalize(u: u32, v: u32) -> Result<(u32, u32)> {
    if u == v {
        return Err(Error::Config(format!("self-loop at vertex {u}")));
    }
    Ok((u.min(v), u.max(v)))
}

/// Load the edge-list format: one `u v [w]` per line, `#` comment lines,
/// whitespace (space or tab) separated. `n = 1 + max vertex id`.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let (graph, _) = read_edge_list(path, false)?;
    Ok(graph)
}

/// Like [`load_edge_list`] but remaps arbitrary vertex ids to dense `0..n` in
/// first-appearance order; returns the mapping `new id -> original id`.
pub fn load_edge_list_remapped(path: impl AsRef<Path>) -> Result<(Graph, Vec<u64>)> {
    let (graph, mapping) = read_edge_list(path, true)?;
    Ok((graph, mapping.expect("remap requested")))
}

fn read_edge_list(path: impl AsRef<Path>, remap: bool) -> Result<(Graph, Option<Vec<u64>>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;

    let mut mapping: Vec<u64> = Vec::new();
    let mut index: BTreeMap<u64, u32> = BTreeMap::new();
    let mut plain: Vec<(u32, u32)> = Vec::new();
    let mut weighted: Vec<(u32, u32, f64)> = Vec::new();
    let mut any_weight = false;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected `u v [w]`, got {} fields", fields.len()),
            ));
        }
        let u: u64 = fields[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad vertex id `{}`", fields[0])))?;
        let v: u64 = fields[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad vertex id `{}`", fields[1])))?;
        if u == v {
            return Err(Error::parse(path, lineno, format!("self-loop at vertex {u}")));
        }
        let (u, v) = if remap {
            (intern(u, &mut index, &mut mapping), intern(v, &mut index, &mut mapping))
        } else {
            let narrow = |x: u64| -> Result<u32> {
                u32::try_from(x)
                    .map_err(|_| Error::parse(path, lineno, format!("vertex id {x} too large")))
            };
            (narrow(u)?, narrow(v)?)
        };
        if fields.len() == 3 {
            let w: f64 = fields[2].parse().map_err(|_| {
                Error::parse(path, lineno, format!("bad edge weight `{}`", fields[2]))
            })?;
            any_weight = true;
            weighted.push((u, v, w));
        } else {
            weighted.push((u, v, 1.0));
            plain.push((u, v));
        }
    }

    if plain.is_empty() && weighted.is_empty() {
        return Err(Error::NoEdges { path: path.into() });
    }

    let n = if remap {
        mapping.len()
    } else {
        weighted
            .iter()
            .map(|&(u, v, _)| u.max(v) as usize + 1)
            .max()
            .unwrap_or(0)
    };
    let graph = if any_weight {
        Graph::from_weighted_edges_with_n(n, &weighted)?
    } else {
        Graph::from_edges_with_n(n, &plain)?
    };
    Ok((graph, remap.then_some(mapping)))
}

fn intern(id: u64, index: &mut BTreeMap<u64, u32>, mapping: &mut Vec<u64>) -> u32 {
    *index.entry(id).or_insert_with(|| {
        mapping.push(id);
        (mapping.len() - 1) as u32
    })
}

/// Result of loading the GML subset: the graph, ground-truth labels when every
/// node carries a `value` key, and a flag for partial labeling.
#[derive(Debug)]
pub struct GmlGraph {
    pub graph: Graph,
    /// Per-vertex ground-truth label; present only when all nodes have `value`.
    pub labels: Option<Vec<u32>>,
    /// True when only some nodes carried a `value` key (labels dropped).
    pub partial_labels: bool,
}

/// Load the GML subset used by the benchmark datasets: a `graph [ ... ]` block
/// with `node [ id .. value .. ]` and `edge [ source .. target .. ]` entries.
/// Unknown keys are skipped. Node ids may be arbitrary; they are remapped to
/// dense ids in order of appearance.
pub fn load_gml_subset(path: impl AsRef<Path>) -> Result<GmlGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let tokens = gml_tokens(&text);
    let mut pos = 0;

    // Skip top-level keys (Creator, Version, ...) until the graph block.
    while pos < tokens.len() && tokens[pos] != "graph" {
        pos += 1;
    }
    if pos >= tokens.len() {
        return Err(Error::parse(path, 0, "no `graph [ ... ]` block"));
    }
    pos += 1;
    if tokens.get(pos).map(String::as_str) != Some("[") {
        return Err(Error::parse(path, 0, "expected `[` after `graph`"));
    }
    pos += 1;

    struct Node {
        id: i64,
        value: Option<i64>,
    }
    let mut nodes: Vec<Node> = Vec::new();
    let mut edge_refs: Vec<(i64, i64)> = Vec::new();

    while pos < tokens.len() && tokens[pos] != "]" {
        match tokens[pos].as_str() {
            "node" => {
                let block = gml_block(&tokens, &mut pos, path)?;
                let id = block
                    .get("id")
                    .and_then(|v| v.parse::<i64>().ok())
                    .ok_or_else(|| Error::parse(path, 0, "node without integer `id`"))?;
                let value = block.get("value").and_then(|v| v.parse::<i64>().ok());
                nodes.push(Node { id, value });
            }
            "edge" => {
                let block = gml_block(&tokens, &mut pos, path)?;
                let source = block
                    .get("source")
                    .and_then(|v| v.parse::<i64>().ok())
                    .ok_or_else(|| Error::parse(path, 0, "edge without `source`"))?;
                let target = block
                    .get("target")
                    .and_then(|v| v.parse::<i64>().ok())
                    .ok_or_else(|| Error::parse(path, 0, "edge without `target`"))?;
                edge_refs.push((source, target));
            }
            _ => {
                // key value (or key [block]) we do not care about
                pos += 1;
                if tokens.get(pos).map(String::as_str) == Some("[") {
                    skip_block(&tokens, &mut pos);
                } else {
                    pos += 1;
                }
            }
        }
    }

    let mut dense: BTreeMap<i64, u32> = BTreeMap::new();
    for (i, node) in nodes.iter().enumerate() {
        if dense.insert(node.id, i as u32).is_some() {
            return Err(Error::parse(path, 0, format!("duplicate node id {}", node.id)));
        }
    }
    let mut edges = Vec::with_capacity(edge_refs.len());
    for (s, t) in edge_refs {
        let lookup = |id: i64| {
            dense
                .get(&id)
                .copied()
                .ok_or_else(|| Error::parse(path, 0, format!("edge references unknown node {id}")))
        };
        edges.push((lookup(s)?, lookup(t)?));
    }
    let graph = Graph::from_edges_with_n(nodes.len(), &edges)?;

    let labeled = nodes.iter().filter(|n| n.value.is_some()).count();
    let (labels, partial) = if labeled == nodes.len() && !nodes.is_empty() {
        let labels = nodes
            .iter()
            .map(|n| n.value.unwrap() as u32)
            .collect::<Vec<_>>();
        (Some(labels), false)
    } else {
        (None, labeled > 0)
    };

    Ok(GmlGraph {
        graph,
        labels,
        partial_labels: partial,
    })
}

fn gml_tokens(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut s = String::new();
            for c in chars.by_ref() {
                if c == '"' {
                    break;
                }
                s.push(c);
            }
            tokens.push(format!("\"{s}"));
        } else if c == '[' || c == ']' {
            chars.next();
            tokens.push(c.to_string());
        } else {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() || c == '[' || c == ']' {
                    break;
                }
                s.push(c);
                chars.next();
            }
            tokens.push(s);
        }
    }
    tokens
}

/// Parse `name [ key value ... ]` starting at `pos` (pointing at the name);
/// returns the key/value pairs and leaves `pos` after the closing bracket.
fn gml_block(
    tokens: &[String],
    pos: &mut usize,
    path: &Path,
) -> Result<BTreeMap<String, String>> {
    let name = tokens[*pos].clone();
    *pos += 1;
    if tokens.get(*pos).map(String::as_str) != Some("[") {
        return Err(Error::parse(path, 0, format!("expected `[` after `{name}`")));
    }
    *pos += 1;
    let mut map = BTreeMap::new();
    while *pos < tokens.len() && tokens[*pos] != "]" {
        let key = tokens[*pos].clone();
        *pos += 1;
        if tokens.get(*pos).map(String::as_str) == Some("[") {
            skip_block(tokens, pos);
            continue;
        }
        let value = tokens
            .get(*pos)
            .cloned()
            .ok_or_else(|| Error::parse(path, 0, format!("dangling key `{key}`")))?;
        *pos += 1;
        map.insert(key, value.trim_start_matches('"').to_string());
    }
    *pos += 1; // closing bracket
    Ok(map)
}

fn skip_block(tokens: &[String], pos: &mut usize) {
    // pos points at `[`
    let mut depth = 0;
    while *pos < tokens.len() {
        match tokens[*pos].as_str() {
            "[" => depth += 1,
            "]" => {
                depth -= 1;
                if depth == 0 {
                    *pos += 1;
                    return;
                }
            }
            _ => {}
        }
        *pos += 1;
    }
}

/// Load a labels file: one `vertex<TAB>label` per line (any whitespace works),
/// `#` comments. Every vertex in `0..n` must appear exactly once, where `n` is
/// one past the largest vertex id in the file.
pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<u32>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::parse(path, lineno, "expected `vertex<TAB>label`"));
        }
        let v: u32 = fields[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad vertex id `{}`", fields[0])))?;
        let l: u32 = fields[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad label `{}`", fields[1])))?;
        pairs.push((v, l));
    }
    if pairs.is_empty() {
        return Err(Error::parse(path, 0, "empty labels file"));
    }
    let n = pairs.iter().map(|&(v, _)| v as usize + 1).max().unwrap();
    let mut labels = vec![u32::MAX; n];
    for (v, l) in pairs {
        if labels[v as usize] != u32::MAX {
            return Err(Error::parse(path, 0, format!("vertex {v} labeled twice")));
        }
        labels[v as usize] = l;
    }
    if let Some(v) = labels.iter().position(|&l| l == u32::MAX) {
        return Err(Error::parse(path, 0, format!("vertex {v} has no label")));
    }
    Ok(labels)
}

/// Write a labels file, one `vertex<TAB>label` per line.
pub fn write_labels(labels: &[u32], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::with_capacity(labels.len() * 8);
    for (v, l) in labels.iter().enumerate() {
        writeln!(out, "{v}\t{l}").expect("write to vec");
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

//! Undirected weighted graphs in compressed sparse row form.
//!
//! [`CsrGraph`] is the only graph representation used by the solver: a flat
//! `offsets`/`edges`/`weights` triple storing both directions of every
//! undirected edge (self-loops stored once). Graphs are built from an
//! [`EdgeList`], which in turn comes from the Matrix Market or plain
//! edge-list loaders.
//!
//! Conventions, fixed once here and relied on everywhere else:
//!
//! * a self-loop entry counts **twice** in a vertex's weighted degree and
//!   twice in `2m`, so that `sum(K_i) == 2m` holds identically;
//! * duplicate `(u, v)` entries merge by weight summation;
//! * adjacency slices are sorted by neighbor index (canonical form, so
//!   equal graphs compare bit-for-bit).

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

/// Errors raised while loading or parsing graph files.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
}

impl GraphError {
    fn parse(path: &Path, line: usize, message: impl Into<String>) -> Self {
        GraphError::Parse {
            path: path.display().to_string(),
            line,
            message: message.into(),
        }
    }
}

/// A list of undirected edge entries plus the declared vertex count.
///
/// Entries are stored exactly once, in file order; mirroring of `u != v`
/// entries happens in [`build_csr`]. Indices are zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    order: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl EdgeList {
    /// Creates an empty edge list over `order` vertices.
    pub fn new(order: usize) -> Self {
        EdgeList {
            order,
            entries: Vec::new(),
        }
    }

    /// Creates an edge list from `(u, v, w)` entries.
    ///
    /// Panics if an index is out of range or a weight is negative or
    /// non-finite; file loaders report those as [`GraphError`] instead.
    pub fn from_entries(
        order: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let mut list = EdgeList::new(order);
        for (u, v, w) in entries {
            list.push(u, v, w);
        }
        list
    }

    /// Appends one entry. Panics on out-of-range indices or invalid weights.
    pub fn push(&mut self, u: usize, v: usize, w: f64) {
        assert!(
            u < self.order && v < self.order,
            "edge ({u}, {v}) out of range for order {}",
            self.order
        );
        assert!(
            w >= 0.0 && w.is_finite(),
            "edge ({u}, {v}) has invalid weight {w}"
        );
        self.entries.push((u, v, w));
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Symmetric weighted graph in compressed sparse row form.
///
/// `offsets` has length `order + 1`; vertex `i`'s adjacency is
/// `edges[offsets[i]..offsets[i + 1]]` with parallel `weights`. Both
/// directions of every undirected edge are stored; a self-loop is stored
/// once. Immutable after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrGraph {
    order: usize,
    offsets: Vec<usize>,
    edges: Vec<usize>,
    weights: Vec<f64>,
    total_weight: f64,
}

impl CsrGraph {
    /// Assembles a graph from already-canonical CSR arrays (mirrored,
    /// merged, sorted); the total weight is derived from the entries.
    pub(crate) fn from_parts(
        order: usize,
        offsets: Vec<usize>,
        edges: Vec<usize>,
        weights: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(offsets.len(), order + 1);
        debug_assert_eq!(edges.len(), weights.len());
        let mut twice_total = 0.0;
        for v in 0..order {
            for (&j, &w) in edges[offsets[v]..offsets[v + 1]]
                .iter()
                .zip(&weights[offsets[v]..offsets[v + 1]])
            {
                twice_total += if j == v { 2.0 * w } else { w };
            }
        }
        CsrGraph {
            order,
            offsets,
            edges,
            weights,
            total_weight: twice_total / 2.0,
        }
    }

    /// Number of vertices `N`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of stored (directed) adjacency entries.
    pub fn entry_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of undirected edges, counting a self-loop as one edge.
    pub fn undirected_edge_count(&self) -> usize {
        let loops = (0..self.order)
            .filter(|&i| self.adjacency(i).0.contains(&i))
            .count();
        (self.edges.len() - loops) / 2 + loops
    }

    /// Sum of edge weights `m`, with a self-loop's weight counted in full.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Neighbor indices and weights of vertex `i`, sorted by neighbor.
    pub fn adjacency(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.offsets[i];
        let hi = self.offsets[i + 1];
        (&self.edges[lo..hi], &self.weights[lo..hi])
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Weighted degree `K_i`; a self-loop's weight counts twice.
    pub fn weighted_degree(&self, i: usize) -> f64 {
        let (targets, weights) = self.adjacency(i);
        let mut k = 0.0;
        for (&j, &w) in targets.iter().zip(weights) {
            k += if j == i { 2.0 * w } else { w };
        }
        k
    }

    /// Extracts the unique undirected entries (`u <= v`) back into an
    /// [`EdgeList`]; rebuilding it reproduces this graph exactly.
    pub fn to_edge_list(&self) -> EdgeList {
        let mut list = EdgeList::new(self.order);
        for u in 0..self.order {
            let (targets, weights) = self.adjacency(u);
            for (&v, &w) in targets.iter().zip(weights) {
                if u <= v {
                    list.push(u, v, w);
                }
            }
        }
        list
    }
}

/// Builds the canonical CSR form of an edge list.
///
/// Every `u != v` entry is mirrored, duplicates (including mirrored
/// duplicates) merge by weight summation, self-loops are kept as single
/// entries, and each adjacency slice is sorted by neighbor index.
pub fn build_csr(list: &EdgeList) -> CsrGraph {
    let n = list.order();

    let mut counts = vec![0usize; n + 1];
    for &(u, v, _) in list.entries() {
        counts[u] += 1;
        if u != v {
            counts[v] += 1;
        }
    }
    let mut starts = vec![0usize; n + 1];
    for i in 0..n {
        starts[i + 1] = starts[i] + counts[i];
    }
    let total = starts[n];

    // Scatter mirrored entries, then sort and merge each adjacency run.
    let mut scratch: Vec<(usize, f64)> = vec![(0, 0.0); total];
    let mut cursor = starts.clone();
    for &(u, v, w) in list.entries() {
        scratch[cursor[u]] = (v, w);
        cursor[u] += 1;
        if u != v {
            scratch[cursor[v]] = (u, w);
            cursor[v] += 1;
        }
    }

    let mut offsets = vec![0usize; n + 1];
    let mut edges = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut twice_total = 0.0;
    for u in 0..n {
        let run = &mut scratch[starts[u]..starts[u] + counts[u]];
        run.sort_unstable_by_key(|&(v, _)| v);
        let mut it = run.iter().copied().peekable();
        while let Some((v, mut w)) = it.next() {
            while it.peek().is_some_and(|&(v2, _)| v2 == v) {
                w += it.next().unwrap().1;
            }
            edges.push(v);
            weights.push(w);
            twice_total += if v == u { 2.0 * w } else { w };
        }
        offsets[u + 1] = edges.len();
    }

    CsrGraph {
        order: n,
        offsets,
        edges,
        weights,
        total_weight: twice_total / 2.0,
    }
}

/// Loads a Matrix Market coordinate file.
///
/// Accepts `matrix coordinate {real|integer|pattern} {general|symmetric}`
/// headers. Pattern entries get unit weight; symmetric-header entries are
/// emitted once (mirroring happens in [`build_csr`]); indices are rebased
/// to zero-based.
pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<EdgeList, GraphError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| GraphError::parse(path, 1, "empty file"))?;
    let header = header.map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(GraphError::parse(path, 1, "malformed Matrix Market header"));
    }
    if tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(GraphError::parse(
            path,
            1,
            format!(
                "unsupported object '{} {}', expected 'matrix coordinate'",
                tokens[1], tokens[2]
            ),
        ));
    }
    let pattern = match tokens[3].as_str() {
        "pattern" => true,
        "real" | "integer" => false,
        other => {
            return Err(GraphError::parse(
                path,
                1,
                format!("unsupported field '{other}'"),
            ))
        }
    };
    match tokens[4].as_str() {
        "general" | "symmetric" => {}
        other => {
            return Err(GraphError::parse(
                path,
                1,
                format!("unsupported symmetry '{other}'"),
            ))
        }
    }

    let mut list: Option<EdgeList> = None;
    let mut declared = 0usize;
    let mut seen = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(|source| GraphError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();

        let Some(list) = list.as_mut() else {
            // Size line: rows cols nnz.
            if fields.len() != 3 {
                return Err(GraphError::parse(
                    path,
                    lineno,
                    "expected size line 'rows cols nnz'",
                ));
            }
            let rows: usize = parse_field(path, lineno, fields[0])?;
            let cols: usize = parse_field(path, lineno, fields[1])?;
            declared = parse_field(path, lineno, fields[2])?;
            if rows != cols {
                return Err(GraphError::parse(
                    path,
                    lineno,
                    format!("matrix must be square, got {rows}x{cols}"),
                ));
            }
            list = Some(EdgeList::new(rows));
            continue;
        };

        if seen == declared {
            return Err(GraphError::parse(
                path,
                lineno,
                format!("more than the declared {declared} entries"),
            ));
        }
        let expected = if pattern { 2 } else { 3 };
        if fields.len() != expected {
            return Err(GraphError::parse(
                path,
                lineno,
                format!("expected {expected} fields, got {}", fields.len()),
            ));
        }
        let u: usize = parse_field(path, lineno, fields[0])?;
        let v: usize = parse_field(path, lineno, fields[1])?;
        let w: f64 = if pattern {
            1.0
        } else {
            parse_field(path, lineno, fields[2])?
        };
        let order = list.order();
        if u == 0 || v == 0 || u > order || v > order {
            return Err(GraphError::parse(
                path,
                lineno,
                format!("index ({u}, {v}) out of range for order {order}"),
            ));
        }
        if w < 0.0 || !w.is_finite() {
            return Err(GraphError::parse(
                path,
                lineno,
                format!("negative or non-finite weight {w}"),
            ));
        }
        list.push(u - 1, v - 1, w);
        seen += 1;
    }

    let list = list.ok_or_else(|| GraphError::parse(path, 1, "missing size line"))?;
    if seen != declared {
        return Err(GraphError::parse(
            path,
            0,
            format!("expected {declared} entries, found {seen}"),
        ));
    }
    Ok(list)
}

/// Loads a whitespace-separated `u v [w]` edge-list file.
///
/// Lines starting with `#` or `%` are skipped. The vertex count is one past
/// the largest index observed. The optional third column is used as the
/// weight only when `weighted` is true; otherwise every edge gets weight 1.
pub fn load_edge_list(path: impl AsRef<Path>, weighted: bool) -> Result<EdgeList, GraphError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut raw: Vec<(usize, usize, f64)> = Vec::new();
    let mut order = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|source| GraphError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(GraphError::parse(
                path,
                lineno,
                format!("expected 'u v [w]', got {} fields", fields.len()),
            ));
        }
        let u: usize = parse_field(path, lineno, fields[0])?;
        let v: usize = parse_field(path, lineno, fields[1])?;
        let w = if weighted && fields.len() == 3 {
            let w: f64 = parse_field(path, lineno, fields[2])?;
            if w < 0.0 || !w.is_finite() {
                return Err(GraphError::parse(
                    path,
                    lineno,
                    format!("negative or non-finite weight {w}"),
                ));
            }
            w
        } else {
            1.0
        };
        order = order.max(u + 1).max(v + 1);
        raw.push((u, v, w));
    }

    Ok(EdgeList::from_entries(order, raw))
}

fn parse_field<T: std::str::FromStr>(
    path: &Path,
    line: usize,
    field: &str,
) -> Result<T, GraphError> {
    field
        .parse()
        .map_err(|_| GraphError::parse(path, line, format!("invalid token '{field}'")))
}

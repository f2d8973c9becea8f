//! Graph ingestion from Matrix Market coordinate files and plain edge lists.
//!
//! Vertex ids in both formats are 1-based. Matrix Market input may hold an
//! adjacency matrix or a Laplacian; the latter is recognised by negative
//! off-diagonal entries and negated back into edge weights.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};
use crate::laplacian::EdgeList;

/// Relative tolerance for the two stored triangles of one undirected edge to agree.
const MIRROR_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    MatrixMarket,
    EdgeList,
}

impl GraphFormat {
    /// Guesses the format from the file extension, falling back to the first line.
    pub fn detect(path: &Path) -> Result<Self> {
        if let Some(ext) = path.extension().and_then(|e| e.to_str()) {
            if ext.eq_ignore_ascii_case("mtx") || ext.eq_ignore_ascii_case("mm") {
                return Ok(Self::MatrixMarket);
            }
        }
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut first = String::new();
        BufReader::new(file)
            .read_line(&mut first)
            .map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
        if first.trim_start().starts_with("%%MatrixMarket") {
            Ok(Self::MatrixMarket)
        } else {
            Ok(Self::EdgeList)
        }
    }
}

impl std::str::FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "matrix-market" | "mtx" | "mm" => Ok(Self::MatrixMarket),
            "edge-list" | "edges" => Ok(Self::EdgeList),
            other => Err(format!("unknown graph format '{other}'")),
        }
    }
}

/// What the loader had to clean up.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadDiagnostics {
    pub self_loops_dropped: usize,
    pub mirrored_pairs_collapsed: usize,
    pub parallel_edges_merged: usize,
    pub laplacian_input: bool,
}

/// Loads a graph, logging a warning for any dropped self-loops.
pub fn load_graph(path: &Path, format: GraphFormat) -> Result<EdgeList> {
    let (g, diag) = load_graph_with_diagnostics(path, format)?;
    if diag.self_loops_dropped > 0 {
        log::warn!(
            "{}: dropped {} self-loop(s)",
            path.display(),
            diag.self_loops_dropped
        );
    }
    Ok(g)
}

pub fn load_graph_with_diagnostics(
    path: &Path,
    format: GraphFormat,
) -> Result<(EdgeList, LoadDiagnostics)> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);
    match format {
        GraphFormat::MatrixMarket => read_matrix_market(reader),
        GraphFormat::EdgeList => read_edge_list(reader),
    }
}

struct Entry {
    i: usize,
    j: usize,
    w: f64,
    line: usize,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn io_err(source: std::io::Error) -> Error {
    Error::Io {
        path: "<stream>".into(),
        source,
    }
}

fn parse_index(tok: Option<&str>, line: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(line, "missing vertex index"))?;
    let v: usize = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid vertex index '{tok}'")))?;
    if v == 0 {
        return Err(parse_err(line, "vertex ids are 1-based"));
    }
    Ok(v - 1)
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid value '{tok}'")))
}

/// Reads a Matrix Market coordinate file (`real`, `integer` or `pattern`,
/// `symmetric` or `general`).
pub fn read_matrix_market<R: Read>(reader: R) -> Result<(EdgeList, LoadDiagnostics)> {
    let mut lines = BufReader::new(reader).lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header.map_err(io_err)?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() < 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(
            1,
            "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'",
        ));
    }
    if tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(parse_err(1, "only 'matrix coordinate' files are supported"));
    }
    let pattern = match tokens[3].as_str() {
        "real" | "integer" | "double" => false,
        "pattern" => true,
        other => return Err(parse_err(1, format!("unsupported field '{other}'"))),
    };
    match tokens[4].as_str() {
        "symmetric" | "general" => {}
        other => return Err(parse_err(1, format!("unsupported symmetry '{other}'"))),
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut entries = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(io_err)?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut it = t.split_whitespace();
        if size.is_none() {
            let mut dim = |what: &str| -> Result<usize> {
                it.next()
                    .ok_or_else(|| parse_err(lineno, format!("missing {what} in size line")))?
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("invalid {what} in size line")))
            };
            let rows = dim("row count")?;
            let cols = dim("column count")?;
            let nnz = dim("entry count")?;
            if rows != cols {
                return Err(Error::NotSquare { rows, cols });
            }
            if rows == 0 {
                return Err(Error::Empty);
            }
            size = Some((rows, cols, nnz));
            entries.reserve(nnz);
            continue;
        }
        let n = size.unwrap().0;
        let i = parse_index(it.next(), lineno)?;
        let j = parse_index(it.next(), lineno)?;
        if i >= n || j >= n {
            return Err(parse_err(lineno, format!("index out of range for n = {n}")));
        }
        let w = if pattern {
            1.0
        } else {
            let tok = it
                .next()
                .ok_or_else(|| parse_err(lineno, "missing value"))?;
            parse_value(tok, lineno)?
        };
        entries.push(Entry {
            i,
            j,
            w,
            line: lineno,
        });
    }
    let (n, _, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if entries.len() != nnz {
        log::warn!(
            "size line announces {nnz} entries but {} were read",
            entries.len()
        );
    }

    let mut diag = LoadDiagnostics::default();
    let laplacian = entries.iter().any(|e| e.i != e.j && e.w < 0.0);
    diag.laplacian_input = laplacian;
    let mut kept = Vec::with_capacity(entries.len());
    for mut e in entries {
        if e.i == e.j {
            // a Laplacian's diagonal is implied by its off-diagonals
            if !laplacian {
                diag.self_loops_dropped += 1;
            }
            continue;
        }
        if laplacian {
            e.w = -e.w;
        }
        kept.push(e);
    }
    let g = undirect(n, kept, &mut diag)?;
    Ok((g, diag))
}

/// Reads whitespace-separated `i j [w]` lines with an optional `# n=<count>` header.
pub fn read_edge_list<R: Read>(reader: R) -> Result<(EdgeList, LoadDiagnostics)> {
    let mut declared_n: Option<usize> = None;
    let mut entries = Vec::new();
    let mut max_id = 0usize;
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(io_err)?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#').or_else(|| t.strip_prefix('%')) {
            if let Some(v) = rest.trim().strip_prefix("n=") {
                let n = v
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("invalid vertex count '{v}'")))?;
                declared_n = Some(n);
            }
            continue;
        }
        let mut it = t.split_whitespace();
        let i = parse_index(it.next(), lineno)?;
        let j = parse_index(it.next(), lineno)?;
        let w = match it.next() {
            Some(tok) => parse_value(tok, lineno)?,
            None => 1.0,
        };
        if it.next().is_some() {
            return Err(parse_err(lineno, "expected 'i j [w]'"));
        }
        max_id = max_id.max(i + 1).max(j + 1);
        entries.push(Entry {
            i,
            j,
            w,
            line: lineno,
        });
    }
    let n = match declared_n {
        Some(n) if n < max_id => {
            return Err(parse_err(
                1,
                format!("header declares n={n} but vertex {max_id} appears"),
            ))
        }
        Some(n) => n,
        None => max_id,
    };
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut diag = LoadDiagnostics::default();
    let before = entries.len();
    entries.retain(|e| e.i != e.j);
    diag.self_loops_dropped = before - entries.len();
    let g = undirect(n, entries, &mut diag)?;
    Ok((g, diag))
}

/// Turns directed entries into undirected edges: an entry and its mirror
/// collapse to one edge (their values must agree); repeats of the same
/// directed entry are parallel edges and sum.
fn undirect(n: usize, entries: Vec<Entry>, diag: &mut LoadDiagnostics) -> Result<EdgeList> {
    for e in &entries {
        if !(e.w.is_finite() && e.w > 0.0) {
            return Err(parse_err(
                e.line,
                format!("edge weight must be positive, got {}", e.w),
            ));
        }
    }
    let mut keyed: Vec<(usize, usize, bool, f64, usize)> = entries
        .into_iter()
        .map(|e| (e.i.min(e.j), e.i.max(e.j), e.i < e.j, e.w, e.line))
        .collect();
    keyed.sort_by_key(|a| (a.0, a.1, a.2));

    let mut edges = Vec::with_capacity(keyed.len());
    let mut k = 0;
    while k < keyed.len() {
        let (lo, hi) = (keyed[k].0, keyed[k].1);
        let mut sums = [0.0f64; 2];
        let mut seen = [false; 2];
        let mut line = keyed[k].4;
        let mut count = 0;
        while k < keyed.len() && keyed[k].0 == lo && keyed[k].1 == hi {
            let dir = keyed[k].2 as usize;
            sums[dir] += keyed[k].3;
            seen[dir] = true;
            line = keyed[k].4;
            count += 1;
            k += 1;
        }
        let w = match seen {
            [true, true] => {
                let (a, b) = (sums[0], sums[1]);
                if (a - b).abs() > MIRROR_RTOL * a.abs().max(b.abs()) {
                    return Err(parse_err(
                        line,
                        format!(
                            "entries ({}, {}) = {b} and ({}, {}) = {a} disagree",
                            lo + 1,
                            hi + 1,
                            hi + 1,
                            lo + 1
                        ),
                    ));
                }
                diag.mirrored_pairs_collapsed += 1;
                b
            }
            [true, false] => sums[0],
            _ => sums[1],
        };
        let distinct_dirs = seen.iter().filter(|s| **s).count();
        diag.parallel_edges_merged += count - distinct_dirs;
        edges.push((lo, hi, w));
    }
    EdgeList::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mm(body: &str) -> Result<(EdgeList, LoadDiagnostics)> {
        read_matrix_market(body.as_bytes())
    }

    fn el(body: &str) -> Result<(EdgeList, LoadDiagnostics)> {
        read_edge_list(body.as_bytes())
    }

    #[test]
    fn single_edge() {
        let (g, _) = el("1 2 1.0\n").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edges(), &[(0, 1, 1.0)]);
        let (g, _) =
            mm("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 1.0\n").unwrap();
        assert_eq!(g.edges(), &[(0, 1, 1.0)]);
    }

    #[test]
    fn mirrored_entries_collapse() {
        let (g, d) = el("1 2 1.0\n2 1 1.0\n").unwrap();
        assert_eq!(g.edges(), &[(0, 1, 1.0)]);
        assert_eq!(d.mirrored_pairs_collapsed, 1);
        let (g, _) =
            mm("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 2.5\n2 1 2.5\n").unwrap();
        assert_eq!(g.edges(), &[(0, 1, 2.5)]);
        let err = mm("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 2.5\n2 1 3.0\n");
        assert!(matches!(err, Err(Error::Parse { .. })));
    }

    #[test]
    fn repeated_entries_sum() {
        let (g, d) = el("1 2 1.0\n1 2 2.0\n").unwrap();
        assert_eq!(g.edges(), &[(0, 1, 3.0)]);
        assert_eq!(d.parallel_edges_merged, 1);
    }

    #[test]
    fn self_loop_dropped() {
        let (g, d) = el("1 2 1.0\n2 3 1.0\n3 3 2.0\n").unwrap();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(d.self_loops_dropped, 1);
        let (_, d) =
            mm("%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n2 1 1\n3 2 1\n3 3 2.0\n")
                .unwrap();
        assert_eq!(d.self_loops_dropped, 1);
    }

    #[test]
    fn pattern_and_header() {
        let (g, _) =
            mm("%%MatrixMarket matrix coordinate pattern symmetric\n% comment\n3 3 2\n2 1\n3 2\n")
                .unwrap();
        assert_eq!(g.edges(), &[(0, 1, 1.0), (1, 2, 1.0)]);
        let (g, _) = el("# n=5\n1 2\n").unwrap();
        assert_eq!(g.n(), 5);
    }

    #[test]
    fn laplacian_input_is_negated() {
        let body = "%%MatrixMarket matrix coordinate real symmetric\n3 3 5\n1 1 1\n2 1 -1\n2 2 3\n3 2 -2\n3 3 2\n";
        let (g, d) = mm(body).unwrap();
        assert!(d.laplacian_input);
        assert_eq!(d.self_loops_dropped, 0);
        assert_eq!(g.edges(), &[(0, 1, 1.0), (1, 2, 2.0)]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            mm("%%MatrixMarket matrix coordinate real general\n2 3 1\n1 2 1\n"),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
        assert!(matches!(
            mm("%%MatrixMarket matrix coordinate real general\n0 0 0\n"),
            Err(Error::Empty)
        ));
        match mm("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(el("1 2 0.0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(el("1 2 -1\n"), Err(Error::Parse { .. })));
        assert!(matches!(el("0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(el(""), Err(Error::Empty)));
        assert!(mm("%%MatrixMarket matrix array real general\n").is_err());
    }

    #[test]
    fn format_detection() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("g.mtx");
        std::fs::write(&a, "x").unwrap();
        assert_eq!(GraphFormat::detect(&a).unwrap(), GraphFormat::MatrixMarket);
        let b = dir.path().join("g.txt");
        std::fs::write(&b, "%%MatrixMarket matrix coordinate real general\n").unwrap();
        assert_eq!(GraphFormat::detect(&b).unwrap(), GraphFormat::MatrixMarket);
        let c = dir.path().join("g.edges");
        std::fs::write(&c, "1 2\n").unwrap();
        assert_eq!(GraphFormat::detect(&c).unwrap(), GraphFormat::EdgeList);
        let g = load_graph(&c, GraphFormat::EdgeList).unwrap();
        assert_eq!(g.n(), 2);
        assert!(matches!(
            load_graph(&dir.path().join("missing"), GraphFormat::EdgeList),
            Err(Error::Io { .. })
        ));
    }
}

//! The `PSYNC 1` text format for problems and solutions.
//!
//! ```text
//! PSYNC 1
//! <n> <m>
//! TRUTH                  (optional; n map lines follow)
//! EDGES
//! <i> <j> [<b>]          (b = 1 for a corrupted edge; present on all or none)
//! <m images>             (the block X̃_ij as a row-image map)
//! ...
//! ```
//!
//! Solutions use `SOLUTION` followed by `n` map lines. Indices are 0-based.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::sync::Arc;

use super::ProblemInstance;
use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::measurement::BlockMeasurement;
use crate::perm::Permutation;

const MAGIC: &str = "PSYNC";
const VERSION: &str = "1";

fn write_map(out: &mut String, p: &Permutation) {
    let _ = writeln!(out, "{p}");
}

pub fn problem_to_string(inst: &ProblemInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "{} {}", inst.n(), inst.m());
    if let Some(truth) = inst.truth() {
        out.push_str("TRUTH\n");
        for p in truth {
            write_map(&mut out, p);
        }
    }
    out.push_str("EDGES\n");
    let bad = inst.bad_edges();
    for (e, &(i, j)) in inst.topology().edges().iter().enumerate() {
        match bad {
            Some(b) => {
                let _ = writeln!(out, "{i} {j} {}", b[e] as u8);
            }
            None => {
                let _ = writeln!(out, "{i} {j}");
            }
        }
        write_map(&mut out, inst.measurement().edge_block(e));
    }
    out
}

pub fn write_problem(path: impl AsRef<Path>, inst: &ProblemInstance) -> Result<()> {
    fs::write(path, problem_to_string(inst))?;
    Ok(())
}

pub fn read_problem(path: impl AsRef<Path>) -> Result<ProblemInstance> {
    parse_problem(BufReader::new(fs::File::open(path)?))
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Lines {
            inner: r.lines(),
            line: 0,
        }
    }

    /// Next non-blank line with its 1-based number.
    fn next(&mut self) -> Result<Option<(usize, String)>> {
        for l in self.inner.by_ref() {
            self.line += 1;
            let l = l?;
            let t = l.trim_end_matches('\r');
            if !t.trim().is_empty() {
                return Ok(Some((self.line, t.to_string())));
            }
        }
        Ok(None)
    }

    fn expect(&mut self, what: &str) -> Result<(usize, String)> {
        self.next()?
            .ok_or_else(|| Error::parse(self.line + 1, format!("unexpected end of input, expected {what}")))
    }
}

fn numbers(line: usize, text: &str) -> Result<Vec<usize>> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::parse(line, format!("`{t}` is not a nonnegative integer")))
        })
        .collect()
}

fn parse_map(line: usize, text: &str, m: usize) -> Result<Permutation> {
    let map = numbers(line, text)?;
    if map.len() != m {
        return Err(Error::parse(line, format!("expected {m} images, found {}", map.len())));
    }
    Permutation::from_map(map).map_err(|e| Error::parse(line, e.to_string()))
}

fn parse_header<R: BufRead>(lines: &mut Lines<R>) -> Result<(usize, usize)> {
    let (ln, magic) = lines.expect("header")?;
    let mut parts = magic.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(Error::parse(ln, "missing `PSYNC` header"));
    }
    match (parts.next(), parts.next()) {
        (Some(VERSION), None) => {}
        (Some(v), None) => return Err(Error::parse(ln, format!("unsupported version `{v}`"))),
        _ => return Err(Error::parse(ln, "malformed header")),
    }
    let (ln, dims) = lines.expect("`n m`")?;
    match numbers(ln, &dims)?[..] {
        [n, m] if n >= 1 && m >= 1 => Ok((n, m)),
        _ => Err(Error::parse(ln, "expected two positive integers `n m`")),
    }
}

pub fn parse_problem(reader: impl BufRead) -> Result<ProblemInstance> {
    let mut lines = Lines::new(reader);
    let (n, m) = parse_header(&mut lines)?;

    let (mut ln, mut section) = lines.expect("`TRUTH` or `EDGES`")?;
    let mut truth = None;
    if section.trim() == "TRUTH" {
        let mut t = Vec::with_capacity(n);
        for _ in 0..n {
            let (l, text) = lines.expect("truth map")?;
            t.push(parse_map(l, &text, m)?);
        }
        truth = Some(t);
        (ln, section) = lines.expect("`EDGES`")?;
    }
    if section.trim() != "EDGES" {
        return Err(Error::parse(ln, format!("expected `EDGES`, found `{}`", section.trim())));
    }

    // Keyed by (min, max); the block is stored for that orientation.
    let mut edges: HashMap<(usize, usize), (Permutation, Option<bool>)> = HashMap::new();
    let mut flagged: Option<bool> = None;
    while let Some((l, head)) = lines.next()? {
        let nums = numbers(l, &head)?;
        let (i, j, b) = match nums[..] {
            [i, j] => (i, j, None),
            [i, j, b @ (0 | 1)] => (i, j, Some(b == 1)),
            [_, _, b] => return Err(Error::parse(l, format!("edge flag must be 0 or 1, got {b}"))),
            _ => return Err(Error::parse(l, "expected `i j [b]`")),
        };
        if i >= n || j >= n || i == j {
            return Err(Error::parse(l, format!("invalid edge ({i}, {j}) for n = {n}")));
        }
        if *flagged.get_or_insert(b.is_some()) != b.is_some() {
            return Err(Error::parse(l, "edge flags must be given on all edges or none"));
        }
        let (ml, mtext) = lines.expect("edge map")?;
        let block = parse_map(ml, &mtext, m)?;
        let (key, block) = if i < j {
            ((i, j), block)
        } else {
            ((j, i), block.transpose())
        };
        match edges.get(&key) {
            Some((prev, pb)) if *prev == block && *pb == b => {}
            Some(_) => {
                return Err(Error::parse(l, format!("edge ({i}, {j}) repeated with a conflicting block")))
            }
            None => {
                edges.insert(key, (block, b));
            }
        }
    }
    if edges.is_empty() {
        return Err(Error::EmptyEdgeSet);
    }

    let mut sorted: Vec<_> = edges.into_iter().collect();
    sorted.sort_unstable_by_key(|(k, _)| *k);
    let topo = Arc::new(Topology::new(n, sorted.iter().map(|(k, _)| *k))?);
    let bad = (flagged == Some(true)).then(|| sorted.iter().map(|(_, (_, b))| b.unwrap()).collect());
    let blocks = sorted.into_iter().map(|(_, (p, _))| p).collect();
    let meas = BlockMeasurement::new(topo, m, blocks)?;
    ProblemInstance::new(meas, truth, bad)
}

pub fn parse_problem_str(text: &str) -> Result<ProblemInstance> {
    parse_problem(text.as_bytes())
}

pub fn solution_to_string(estimate: &[Permutation]) -> String {
    let mut out = String::new();
    let m = estimate.first().map_or(0, Permutation::size);
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "{} {m}", estimate.len());
    out.push_str("SOLUTION\n");
    for p in estimate {
        write_map(&mut out, p);
    }
    out
}

pub fn write_solution(path: impl AsRef<Path>, estimate: &[Permutation]) -> Result<()> {
    fs::write(path, solution_to_string(estimate))?;
    Ok(())
}

pub fn parse_solution(reader: impl Read) -> Result<Vec<Permutation>> {
    let mut lines = Lines::new(BufReader::new(reader));
    let (n, m) = parse_header(&mut lines)?;
    let (ln, section) = lines.expect("`SOLUTION`")?;
    if section.trim() != "SOLUTION" {
        return Err(Error::parse(ln, "expected `SOLUTION`"));
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let (l, text) = lines.expect("solution map")?;
        out.push(parse_map(l, &text, m)?);
    }
    if let Some((l, _)) = lines.next()? {
        return Err(Error::parse(l, "trailing content after solution"));
    }
    Ok(out)
}

pub fn read_solution(path: impl AsRef<Path>) -> Result<Vec<Permutation>> {
    parse_solution(fs::File::open(path)?)
}

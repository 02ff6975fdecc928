//! Text formats for maps, system prefixes and simplicial systems.
//!
//! ```text
//! # W
//! plmap
//! -1/1 -1/1
//! 0/1 0/1
//! 1/2 1/1
//! 1/1 -1/2
//! ```
//!
//! A system starts with `system N` followed by `N` map blocks. A simplicial
//! system adds one `S <n>: x₁ x₂ …` line per level.

use zigzag::plmap::PlMap;
use zigzag::simplicial::SimplicialSystem;
use zigzag::{Error, Result, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document<T: Scalar> {
    Map(PlMap<T>),
    System(Vec<PlMap<T>>),
    Simplicial(SimplicialSystem<T>),
}

impl<T: Scalar> Document<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Map(_) => "map",
            Document::System(_) => "system",
            Document::Simplicial(_) => "simplicial system",
        }
    }
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Lines { inner: it.peekable() }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        self.inner.next()
    }

    fn peek(&mut self) -> Option<(usize, &'a str)> {
        self.inner.peek().copied()
    }
}

fn number<T: Scalar>(tok: &str, line: usize) -> Result<T> {
    if let Some((_, d)) = tok.split_once('/') {
        if d.trim().trim_start_matches(['+', '-']).chars().all(|c| c == '0') && !d.trim().is_empty() {
            return Err(Error::Format(format!("line {line}: zero denominator in `{tok}`")));
        }
    }
    T::parse_frac(tok).ok_or_else(|| Error::Parse { line, msg: format!("`{tok}` is not a rational number") })
}

fn map_block<T: Scalar>(lines: &mut Lines<'_>) -> Result<PlMap<T>> {
    let (line, head) = lines.next().ok_or_else(|| Error::Parse { line: 0, msg: "expected `plmap`, found end of input".into() })?;
    if head != "plmap" {
        return Err(Error::Parse { line, msg: format!("expected `plmap`, found `{head}`") });
    }
    let mut pts: Vec<(T, T)> = Vec::new();
    while let Some((n, l)) = lines.peek() {
        if l == "plmap" || l.starts_with("system") || l.starts_with("S ") {
            break;
        }
        lines.next();
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::Parse { line: n, msg: format!("expected `<x> <y>`, found `{l}`") });
        }
        let (x, y) = (number::<T>(toks[0], n)?, number::<T>(toks[1], n)?);
        if let Some((px, _)) = pts.last() {
            if *px >= x {
                return Err(Error::Format(format!("line {n}: x-coordinates must increase ({px} then {x})")));
            }
        }
        pts.push((x, y));
    }
    PlMap::new(pts).map_err(|e| Error::Format(format!("map starting at line {line}: {e}")))
}

/// Parses any of the three formats, telling them apart by the header.
pub fn parse_document<T: Scalar>(text: &str) -> Result<Document<T>> {
    let mut lines = Lines::new(text);
    let Some((line, head)) = lines.peek() else {
        return Err(Error::Parse { line: 0, msg: "empty input".into() });
    };
    if head == "plmap" {
        let m = map_block(&mut lines)?;
        if let Some((n, l)) = lines.next() {
            return Err(Error::Parse { line: n, msg: format!("unexpected `{l}` after the map") });
        }
        return Ok(Document::Map(m));
    }
    let count = head
        .strip_prefix("system")
        .map(str::trim)
        .and_then(|c| c.parse::<usize>().ok())
        .ok_or_else(|| Error::Parse { line, msg: format!("expected `plmap` or `system N`, found `{head}`") })?;
    lines.next();
    let maps = (0..count).map(|_| map_block(&mut lines)).collect::<Result<Vec<_>>>()?;
    let mut sets: Vec<Option<Vec<T>>> = vec![None; count + 1];
    let mut any_sets = false;
    while let Some((n, l)) = lines.next() {
        let Some(rest) = l.strip_prefix("S ") else {
            return Err(Error::Parse { line: n, msg: format!("unexpected `{l}`") });
        };
        let (idx, vals) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse { line: n, msg: "expected `S <n>: x₁ x₂ …`".into() })?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|_| Error::Parse { line: n, msg: format!("bad level `{}`", idx.trim()) })?;
        if idx == 0 || idx > count + 1 {
            return Err(Error::Parse { line: n, msg: format!("level {idx} is outside 1..={}", count + 1) });
        }
        if sets[idx - 1].is_some() {
            return Err(Error::Parse { line: n, msg: format!("S {idx} given twice") });
        }
        let vals = vals.split_whitespace().map(|t| number::<T>(t, n)).collect::<Result<Vec<_>>>()?;
        sets[idx - 1] = Some(vals);
        any_sets = true;
    }
    if !any_sets {
        return Ok(Document::System(maps));
    }
    let sets = sets
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| Error::Format(format!("missing vertex set S {}", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Document::Simplicial(SimplicialSystem::new(maps, sets)?))
}

pub fn serialize_map<T: Scalar>(f: &PlMap<T>) -> String {
    let mut out = String::from("plmap\n");
    for (x, y) in f.points() {
        out.push_str(&format!("{} {}\n", x.to_frac_string(), y.to_frac_string()));
    }
    out
}

pub fn serialize_system<T: Scalar>(maps: &[PlMap<T>]) -> String {
    let mut out = format!("system {}\n", maps.len());
    for f in maps {
        out.push_str(&serialize_map(f));
    }
    out
}

pub fn serialize_simplicial<T: Scalar>(sys: &SimplicialSystem<T>) -> String {
    let mut out = serialize_system(sys.maps());
    for (i, s) in sys.sets().iter().enumerate() {
        let vals: Vec<String> = s.iter().map(|v| v.to_frac_string()).collect();
        out.push_str(&format!("S {}: {}\n", i + 1, vals.join(" ")));
    }
    out
}

pub fn serialize_document<T: Scalar>(doc: &Document<T>) -> String {
    match doc {
        Document::Map(m) => serialize_map(m),
        Document::System(ms) => serialize_system(ms),
        Document::Simplicial(s) => serialize_simplicial(s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use zigzag::fixtures::*;
    use zigzag::Q;

    #[test]
    fn map_round_trip() {
        let text = serialize_map(&w());
        assert_eq!(text, "plmap\n-1/1 -1/1\n0/1 0/1\n1/2 1/1\n1/1 -1/2\n");
        assert_eq!(parse_document::<Q>(&text).unwrap(), Document::Map(w()));
        let loose = "# W, written by hand\nplmap\n  -1 -1\n0 0\n\n1/2   1\n1 -1/2\n";
        assert_eq!(parse_document::<Q>(loose).unwrap(), Document::Map(w()));
    }

    #[test]
    fn errors_carry_lines() {
        assert!(matches!(parse_document::<Q>("plmap\n0 0\n1/0 1\n"), Err(Error::Format(m)) if m.contains("line 3")));
        assert!(matches!(parse_document::<Q>("plmap\n0 0\nx 1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_document::<Q>("plmap\n0 0\n-1 1\n"), Err(Error::Format(m)) if m.contains("line 3")));
        assert!(matches!(parse_document::<Q>("plmap\n0 0 0\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn system_and_simplicial_round_trip() {
        let maps: Vec<_> = ex4().iter().map(|f| f.map().clone()).collect();
        let text = serialize_system(&maps);
        let doc = parse_document::<Q>(&text).unwrap();
        assert_eq!(serialize_document(&doc), text);
        let sys = zigzag::simplicial::markov_refine(&tent(), &[Q::int(-1), Q::int(0), Q::int(1)], 2).unwrap();
        let text = serialize_simplicial(&sys);
        assert!(text.contains("S 2: -1/1 -1/2 0/1 1/2 1/1\n"));
        let doc = parse_document::<Q>(&text).unwrap();
        assert_eq!(doc, Document::Simplicial(sys));
        assert_eq!(serialize_document(&doc), text);
    }
}

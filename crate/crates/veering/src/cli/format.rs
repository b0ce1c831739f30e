//! Line-oriented text format for triangulations, with a JSON mirror.
//!
//! ```text
//! format 1
//! genus 1
//! marked 1
//! triangle c- a+ b-
//! triangle c+ a- b+
//! colours a=B b=R c=R
//! geometry
//! a: 3.0000000000000000e-1 -5.0000000000000000e-1
//! b: 6.9999999999999996e-1 2.1666666666666665e0
//! c: 1.0000000000000000e0 1.6666666666666667e0
//! ```
//!
//! Triangles list their sides anticlockwise; `+` marks the slot where the label runs
//! in its reference direction. The colour line declares the labels and fixes their
//! order. Lines starting with `#` and blank lines are ignored. The geometry block is
//! optional and gives each label's edge vector.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{SurfaceState, Vec2};
use crate::triangulation::{Colour, ColouredTriangulation, Slot, TriangulationParts};

pub const FORMAT_VERSION: u32 = 1;

/// A triangulation with optional edge vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub triangulation: ColouredTriangulation,
    pub vectors: Option<Vec<Vec2>>,
}

impl Document {
    pub fn combinatorial(t: ColouredTriangulation) -> Document {
        Document { triangulation: t, vectors: None }
    }

    pub fn from_state(s: &SurfaceState) -> Document {
        Document { triangulation: s.triangulation().clone(), vectors: Some(s.vectors().to_vec()) }
    }

    pub fn state(&self) -> Option<Result<SurfaceState>> {
        self.vectors.as_ref().map(|v| SurfaceState::new(self.triangulation.clone(), v.clone()))
    }
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token { text: &line[s..i], column: s + 1 });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    out
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn number<T: std::str::FromStr>(tok: Option<&Token<'_>>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| err(line, 1, format!("missing {what}")))?;
    tok.text.parse().map_err(|_| err(line, tok.column, format!("invalid {what} `{}`", tok.text)))
}

// (label, forward, column) for a triangle side; (label, colour, column) for a colour entry.
type SideToken = (String, bool, usize);
type ColourToken = (String, Colour, usize);

/// Parses the text format.
pub fn parse_text(text: &str) -> Result<Document> {
    let mut version = None;
    let mut genus = None;
    let mut marked = None;
    let mut triangle_lines: Vec<(usize, Vec<SideToken>)> = Vec::new();
    let mut seen_triangles = HashSet::new();
    let mut colours: Option<(usize, Vec<ColourToken>)> = None;
    let mut geometry: Option<Vec<(usize, String, Vec2)>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let toks = tokens(raw);
        if let Some(g) = geometry.as_mut() {
            let name = toks[0].text.strip_suffix(':').ok_or_else(|| err(ln, toks[0].column, "expected `label:`"))?;
            if toks.len() != 3 {
                return Err(err(ln, toks[0].column, "geometry line needs a label and two numbers"));
            }
            let dx: f64 = number(toks.get(1), ln, "dx")?;
            let dy: f64 = number(toks.get(2), ln, "dy")?;
            g.push((ln, name.to_string(), Vec2::new(dx, dy)));
            continue;
        }
        match toks[0].text {
            "format" => {
                let v: u32 = number(toks.get(1), ln, "format version")?;
                if v != FORMAT_VERSION {
                    return Err(err(ln, toks[1].column, format!("unsupported format version {v}")));
                }
                version = Some(v);
            }
            "genus" => genus = Some(number::<usize>(toks.get(1), ln, "genus")?),
            "marked" => marked = Some(number::<usize>(toks.get(1), ln, "marked point count")?),
            "triangle" => {
                if toks.len() != 4 {
                    return Err(err(ln, toks[0].column, "a triangle has exactly three sides"));
                }
                let key: Vec<&str> = toks[1..].iter().map(|t| t.text).collect();
                if !seen_triangles.insert(key.join(" ")) {
                    return Err(err(ln, toks[0].column, "duplicate triangle"));
                }
                let mut sides = Vec::with_capacity(3);
                for t in &toks[1..] {
                    let (name, forward) = if let Some(n) = t.text.strip_suffix('+') {
                        (n, true)
                    } else if let Some(n) = t.text.strip_suffix('-') {
                        (n, false)
                    } else {
                        return Err(err(ln, t.column, "side must end with + or -"));
                    };
                    if !valid_name(name) {
                        return Err(err(ln, t.column, format!("invalid label `{name}`")));
                    }
                    sides.push((name.to_string(), forward, t.column));
                }
                triangle_lines.push((ln, sides));
            }
            "colours" => {
                if colours.is_some() {
                    return Err(err(ln, toks[0].column, "duplicate colour line"));
                }
                let mut list = Vec::new();
                for t in &toks[1..] {
                    let (name, c) =
                        t.text.split_once('=').ok_or_else(|| err(ln, t.column, "expected `label=R` or `label=B`"))?;
                    let colour = match c {
                        "R" => Colour::Red,
                        "B" => Colour::Blue,
                        _ => return Err(err(ln, t.column + name.len() + 1, "colour must be R or B")),
                    };
                    if !valid_name(name) {
                        return Err(err(ln, t.column, format!("invalid label `{name}`")));
                    }
                    if list.iter().any(|(n, _, _): &ColourToken| n == name) {
                        return Err(err(ln, t.column, format!("label `{name}` coloured twice")));
                    }
                    list.push((name.to_string(), colour, t.column));
                }
                colours = Some((ln, list));
            }
            "geometry" => {
                if toks.len() != 1 {
                    return Err(err(ln, toks[1].column, "unexpected text after `geometry`"));
                }
                geometry = Some(Vec::new());
            }
            other => return Err(err(ln, toks[0].column, format!("unknown keyword `{other}`"))),
        }
    }

    let last = text.lines().count().max(1);
    version.ok_or_else(|| err(1, 1, "missing `format` line"))?;
    let genus = genus.ok_or_else(|| err(last, 1, "missing `genus` line"))?;
    let marked = marked.ok_or_else(|| err(last, 1, "missing `marked` line"))?;
    let (_, colour_list) = colours.ok_or_else(|| err(last, 1, "missing `colours` line"))?;
    let index: HashMap<&str, usize> = colour_list.iter().enumerate().map(|(i, (n, _, _))| (n.as_str(), i)).collect();
    let mut triangles = Vec::with_capacity(triangle_lines.len());
    for (ln, sides) in &triangle_lines {
        let mut tri = [Slot::new(0, true); 3];
        for (k, (name, forward, col)) in sides.iter().enumerate() {
            let &l = index.get(name.as_str()).ok_or_else(|| err(*ln, *col, format!("label `{name}` has no colour")))?;
            tri[k] = Slot::new(l, *forward);
        }
        triangles.push(tri);
    }
    let parts = TriangulationParts {
        names: colour_list.iter().map(|(n, _, _)| n.clone()).collect(),
        triangles,
        colours: colour_list.iter().map(|(_, c, _)| *c).collect(),
        genus,
        marked,
    };
    let triangulation = ColouredTriangulation::new(parts)?;
    let vectors = match geometry {
        None => None,
        Some(lines) => {
            let mut v: Vec<Option<Vec2>> = vec![None; index.len()];
            for (ln, name, vec) in lines {
                let &l = index.get(name.as_str()).ok_or_else(|| err(ln, 1, format!("unknown label `{name}`")))?;
                if v[l].replace(vec).is_some() {
                    return Err(err(ln, 1, format!("label `{name}` has two vectors")));
                }
            }
            let missing: Vec<&str> =
                v.iter().zip(&colour_list).filter(|(x, _)| x.is_none()).map(|(_, (n, _, _))| n.as_str()).collect();
            if !missing.is_empty() {
                return Err(err(last, 1, format!("geometry missing for {}", missing.join(", "))));
            }
            Some(v.into_iter().map(|x| x.expect("checked")).collect())
        }
    };
    let doc = Document { triangulation, vectors };
    if let Some(s) = doc.state() {
        s?;
    }
    Ok(doc)
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serialises to the text format; numbers carry 17 significant digits.
pub fn to_text(doc: &Document) -> String {
    let t = &doc.triangulation;
    let mut out = format!("format {FORMAT_VERSION}\ngenus {}\nmarked {}\n", t.genus(), t.marked());
    for tri in t.triangles() {
        let sides: Vec<String> =
            tri.iter().map(|s| format!("{}{}", t.name(s.label), if s.forward { '+' } else { '-' })).collect();
        out.push_str(&format!("triangle {}\n", sides.join(" ")));
    }
    let colours: Vec<String> = t.labels().map(|l| format!("{}={}", t.name(l), t.colour(l).letter())).collect();
    out.push_str(&format!("colours {}\n", colours.join(" ")));
    if let Some(v) = &doc.vectors {
        out.push_str("geometry\n");
        for l in t.labels() {
            out.push_str(&format!("{}: {} {}\n", t.name(l), float(v[l.0].dx), float(v[l.0].dy)));
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct JsonDocument {
    format: u32,
    genus: usize,
    marked: usize,
    labels: Vec<String>,
    colours: Vec<String>,
    triangles: Vec<[String; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    geometry: Option<Vec<[f64; 2]>>,
}

pub fn to_json(doc: &Document) -> Result<String> {
    let t = &doc.triangulation;
    let j = JsonDocument {
        format: FORMAT_VERSION,
        genus: t.genus(),
        marked: t.marked(),
        labels: t.names().to_vec(),
        colours: t.labels().map(|l| t.colour(l).letter().to_string()).collect(),
        triangles: t
            .triangles()
            .iter()
            .map(|tri| tri.map(|s| format!("{}{}", t.name(s.label), if s.forward { '+' } else { '-' })))
            .collect(),
        geometry: doc.vectors.as_ref().map(|v| v.iter().map(|w| [w.dx, w.dy]).collect()),
    };
    Ok(serde_json::to_string_pretty(&j)?)
}

/// Parses the JSON mirror by rewriting it as text, so both share one set of checks.
pub fn parse_json(text: &str) -> Result<Document> {
    let j: JsonDocument = serde_json::from_str(text)?;
    if j.colours.len() != j.labels.len() {
        return Err(err(1, 1, "labels and colours differ in length"));
    }
    let mut out = format!("format {}\ngenus {}\nmarked {}\n", j.format, j.genus, j.marked);
    for tri in &j.triangles {
        out.push_str(&format!("triangle {}\n", tri.join(" ")));
    }
    let colours: Vec<String> = j.labels.iter().zip(&j.colours).map(|(l, c)| format!("{l}={c}")).collect();
    out.push_str(&format!("colours {}\n", colours.join(" ")));
    if let Some(g) = &j.geometry {
        if g.len() != j.labels.len() {
            return Err(err(1, 1, "geometry and labels differ in length"));
        }
        out.push_str("geometry\n");
        for (l, [dx, dy]) in j.labels.iter().zip(g) {
            out.push_str(&format!("{l}: {} {}\n", float(*dx), float(*dy)));
        }
    }
    parse_text(&out)
}

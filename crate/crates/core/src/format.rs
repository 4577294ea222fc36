//! Line-oriented text formats: instances, labelings and label-space files.
//!
//! All formats are UTF-8, whitespace separated, with `#` starting a comment.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{check_score, Edge, FrameInfo, Instance, Labeling, Node, NodeLabel, Thetas};
use crate::label_space::{LabelSpace, BACKGROUND, NONE_ACTION};

pub const INSTANCE_MAGIC: &str = "a2dcrf";
pub const LABELING_MAGIC: &str = "a2dlabeling";
pub const LABELS_MAGIC: &str = "a2dlabels";

/// Formats a float with 9 significant digits, trailing zeros trimmed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.8e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mant.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Non-empty lines with comments stripped, tagged with 1-based line numbers.
fn tokenized(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("");
        let toks: Vec<&str> = line.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn parse_usize(line: usize, tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("expected a nonnegative integer, got '{tok}'")))
}

fn parse_f64(line: usize, tok: &str) -> Result<f64> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(line, format!("expected a finite number, got '{tok}'"))),
    }
}

fn parse_scores(line: usize, toks: &[&str], expected: usize, what: &str) -> Result<Vec<f64>> {
    if toks.len() != expected {
        return Err(Error::parse(
            line,
            format!(
                "{what}: length mismatch, expected {expected} scores, got {}",
                toks.len()
            ),
        ));
    }
    toks.iter()
        .map(|t| {
            let v = parse_f64(line, t)?;
            if check_score(v) {
                Ok(v)
            } else {
                Err(Error::parse(line, format!("{what}: score out of range (0,1]: {t}")))
            }
        })
        .collect()
}

fn check_header(first: Option<&(usize, Vec<&str>)>, magic: &str) -> Result<()> {
    match first {
        None => Err(Error::parse(0, format!("empty input, expected '{magic} 1' header"))),
        Some((line, toks)) if toks.first() == Some(&magic) => {
            if toks.len() == 2 && toks[1] == "1" {
                Ok(())
            } else {
                Err(Error::parse(*line, format!("version mismatch: expected '{magic} 1'")))
            }
        }
        Some((line, _)) => Err(Error::parse(*line, format!("missing '{magic} 1' header"))),
    }
}

fn counted_names(line: usize, toks: &[&str], what: &str) -> Result<Vec<String>> {
    let k = parse_usize(line, toks.get(1).copied().unwrap_or(""))?;
    if toks.len() != k + 2 {
        return Err(Error::parse(
            line,
            format!("{what}: declared {k} names, found {}", toks.len().saturating_sub(2)),
        ));
    }
    Ok(toks[2..].iter().map(|s| s.to_string()).collect())
}

/// Shared state for the `actors` / `actions` / `valid` sections.
#[derive(Default)]
struct SpaceSections {
    actors: Option<Vec<String>>,
    actions: Option<Vec<String>>,
    valid_expected: Option<usize>,
    valid: Vec<(String, String)>,
    valid_line: usize,
    space: Option<LabelSpace>,
}

impl SpaceSections {
    /// Returns true if the line was consumed.
    fn feed(&mut self, line: usize, toks: &[&str]) -> Result<bool> {
        if let Some(m) = self.valid_expected {
            if self.valid.len() < m {
                if toks.len() != 2 {
                    return Err(Error::parse(line, "valid pair line must be '<actor> <action>'"));
                }
                self.valid.push((toks[0].to_string(), toks[1].to_string()));
                if self.valid.len() == m {
                    self.finish(line)?;
                }
                return Ok(true);
            }
        }
        match toks[0] {
            "actors" => {
                dup(line, self.actors.is_some(), "actors")?;
                self.actors = Some(counted_names(line, toks, "actors")?);
            }
            "actions" => {
                dup(line, self.actions.is_some(), "actions")?;
                self.actions = Some(counted_names(line, toks, "actions")?);
            }
            "valid" => {
                dup(line, self.valid_expected.is_some(), "valid")?;
                if self.actors.is_none() || self.actions.is_none() {
                    return Err(Error::parse(line, "valid section before actors/actions"));
                }
                if toks.len() != 2 {
                    return Err(Error::parse(line, "expected 'valid <m>'"));
                }
                let m = parse_usize(line, toks[1])?;
                self.valid_expected = Some(m);
                self.valid_line = line;
                if m == 0 {
                    self.finish(line)?;
                }
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn finish(&mut self, line: usize) -> Result<()> {
        let actors = self.actors.as_deref().unwrap_or_default();
        let actions = self.actions.as_deref().unwrap_or_default();
        let space = LabelSpace::new(actors, actions, &self.valid).map_err(|e| Error::parse(line, e.to_string()))?;
        self.space = Some(space);
        Ok(())
    }

    fn space(&self, line: usize) -> Result<&LabelSpace> {
        self.space
            .as_ref()
            .ok_or_else(|| Error::parse(line, "label space (actors/actions/valid) not declared yet"))
    }
}

fn dup(line: usize, seen: bool, what: &str) -> Result<()> {
    if seen {
        Err(Error::parse(line, format!("duplicate section '{what}'")))
    } else {
        Ok(())
    }
}

#[derive(Default, Clone)]
struct PartialNode {
    tables: [Option<Vec<f64>>; 5],
    pixels: BTreeMap<usize, Vec<(u32, u32)>>,
}

const TABLES: [&str; 5] = [
    "unary_actor",
    "unary_action",
    "unary_joint",
    "cond_action",
    "cond_actor",
];

/// Parses and validates an instance file.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let lines: Vec<(usize, Vec<&str>)> = tokenized(text).collect();
    check_header(lines.first(), INSTANCE_MAGIC)?;

    let mut sp = SpaceSections::default();
    let mut thetas: Option<Thetas> = None;
    let mut nodes: Option<Vec<PartialNode>> = None;
    let mut edges_expected: Option<usize> = None;
    let mut edges: Vec<Edge> = Vec::new();
    let mut edge_set = HashSet::new();
    let mut video: Option<Vec<f64>> = None;
    let mut frames: Option<FrameInfo> = None;
    let mut gt: Option<Vec<Option<usize>>> = None;
    let mut last_line = 0;

    for (line, toks) in lines.iter().skip(1) {
        let (line, toks) = (*line, toks.as_slice());
        last_line = line;
        if sp.feed(line, toks)? {
            continue;
        }
        if let Some(e) = edges_expected {
            if edges.len() < e && toks[0] != "edge" {
                return Err(Error::parse(
                    line,
                    format!("expected {e} edge lines, found {}", edges.len()),
                ));
            }
        }
        let key = toks[0];
        match key {
            "theta" => {
                dup(line, thetas.is_some(), "theta")?;
                if toks.len() != 4 {
                    return Err(Error::parse(line, "expected 'theta <actor> <action> <joint>'"));
                }
                let v: Vec<f64> = toks[1..].iter().map(|t| parse_f64(line, t)).collect::<Result<_>>()?;
                if v.iter().any(|t| *t <= 0.0) {
                    return Err(Error::parse(line, "theta values must be positive"));
                }
                thetas = Some(Thetas {
                    actor: v[0],
                    action: v[1],
                    joint: v[2],
                });
            }
            "nodes" => {
                dup(line, nodes.is_some(), "nodes")?;
                if toks.len() != 2 {
                    return Err(Error::parse(line, "expected 'nodes <n>'"));
                }
                nodes = Some(vec![PartialNode::default(); parse_usize(line, toks[1])?]);
            }
            k if TABLES.contains(&k) => {
                let space = sp.space(line)?;
                let nodes = nodes
                    .as_mut()
                    .ok_or_else(|| Error::parse(line, "node table before 'nodes'"))?;
                let id = parse_usize(line, toks.get(1).copied().unwrap_or(""))?;
                let node = nodes
                    .get_mut(id)
                    .ok_or_else(|| Error::parse(line, format!("node id {id} out of range")))?;
                let slot = TABLES.iter().position(|t| *t == k).expect("known table");
                let len = [
                    space.num_actors(),
                    space.num_actions(),
                    space.num_tuples(),
                    space.num_valid(),
                    space.num_valid(),
                ][slot];
                if node.tables[slot].is_some() {
                    return Err(Error::parse(line, format!("duplicate section '{k}' for node {id}")));
                }
                node.tables[slot] = Some(parse_scores(line, &toks[2..], len, k)?);
            }
            "edges" => {
                dup(line, edges_expected.is_some(), "edges")?;
                if nodes.is_none() {
                    return Err(Error::parse(line, "edges before 'nodes'"));
                }
                if toks.len() != 2 {
                    return Err(Error::parse(line, "expected 'edges <e>'"));
                }
                edges_expected = Some(parse_usize(line, toks[1])?);
            }
            "edge" => {
                let expected = edges_expected.ok_or_else(|| Error::parse(line, "edge line before 'edges'"))?;
                if edges.len() >= expected {
                    return Err(Error::parse(
                        line,
                        format!("more edge lines than the declared {expected}"),
                    ));
                }
                if toks.len() != 4 {
                    return Err(Error::parse(line, "expected 'edge <i> <j> <chi2>'"));
                }
                let n = nodes.as_ref().map_or(0, Vec::len);
                let i = parse_usize(line, toks[1])?;
                let j = parse_usize(line, toks[2])?;
                let chi2 = parse_f64(line, toks[3])?;
                if i >= n || j >= n {
                    return Err(Error::parse(line, format!("dangling edge {i}-{j}")));
                }
                if i == j {
                    return Err(Error::parse(line, format!("self loop on node {i}")));
                }
                if chi2 < 0.0 {
                    return Err(Error::parse(line, "chi2 must be nonnegative"));
                }
                if !edge_set.insert((i.min(j), i.max(j))) {
                    return Err(Error::parse(line, format!("duplicate edge {i}-{j}")));
                }
                edges.push(Edge { i, j, chi2 });
            }
            "videoscores" => {
                dup(line, video.is_some(), "videoscores")?;
                let space = sp.space(line)?;
                video = Some(parse_scores(line, &toks[1..], space.num_tuples(), "videoscores")?);
            }
            "frames" => {
                dup(line, frames.is_some(), "frames")?;
                if toks.len() != 4 {
                    return Err(Error::parse(line, "expected 'frames <count> <W> <H>'"));
                }
                frames = Some(FrameInfo {
                    count: parse_usize(line, toks[1])?,
                    width: parse_usize(line, toks[2])? as u32,
                    height: parse_usize(line, toks[3])? as u32,
                });
            }
            "pixels" => {
                let f = frames.ok_or_else(|| Error::parse(line, "pixels before 'frames'"))?;
                let nodes = nodes
                    .as_mut()
                    .ok_or_else(|| Error::parse(line, "pixels before 'nodes'"))?;
                if toks.len() < 4 {
                    return Err(Error::parse(line, "expected 'pixels <id> <frame> <p> <x y>...'"));
                }
                let id = parse_usize(line, toks[1])?;
                let frame = parse_usize(line, toks[2])?;
                let p = parse_usize(line, toks[3])?;
                if toks.len() != 4 + 2 * p {
                    return Err(Error::parse(
                        line,
                        format!("pixels: declared {p} pixels, found {} coordinates", toks.len() - 4),
                    ));
                }
                if frame >= f.count {
                    return Err(Error::parse(line, format!("frame {frame} out of range")));
                }
                let node = nodes
                    .get_mut(id)
                    .ok_or_else(|| Error::parse(line, format!("node id {id} out of range")))?;
                let list = node.pixels.entry(frame).or_default();
                for xy in toks[4..].chunks(2) {
                    let x = parse_usize(line, xy[0])?;
                    let y = parse_usize(line, xy[1])?;
                    if x >= f.width as usize || y >= f.height as usize {
                        return Err(Error::parse(line, format!("pixel ({x}, {y}) outside the frame")));
                    }
                    list.push((x as u32, y as u32));
                }
            }
            "gt" => {
                let space = sp.space(line)?;
                let n = nodes
                    .as_ref()
                    .ok_or_else(|| Error::parse(line, "gt before 'nodes'"))?
                    .len();
                if toks.len() != 4 {
                    return Err(Error::parse(line, "expected 'gt <id> <actor> <action>'"));
                }
                let id = parse_usize(line, toks[1])?;
                if id >= n {
                    return Err(Error::parse(line, format!("node id {id} out of range")));
                }
                let label = if toks[2] == "-" && toks[3] == "-" {
                    None
                } else {
                    Some(
                        space
                            .tuple_index(toks[2], toks[3])
                            .map_err(|e| Error::parse(line, e.to_string()))?,
                    )
                };
                let gt = gt.get_or_insert_with(|| vec![None; n]);
                gt[id] = label;
            }
            other => return Err(Error::parse(line, format!("unknown section '{other}'"))),
        }
    }

    if sp.valid_expected.is_some_and(|m| sp.valid.len() < m) {
        return Err(Error::parse(sp.valid_line, "valid section truncated"));
    }
    let space = sp.space(last_line)?.clone();
    let thetas = thetas.ok_or_else(|| Error::parse(last_line, "missing 'theta' section"))?;
    let partial = nodes.ok_or_else(|| Error::parse(last_line, "missing 'nodes' section"))?;
    if let Some(e) = edges_expected {
        if edges.len() != e {
            return Err(Error::parse(
                last_line,
                format!("expected {e} edge lines, found {}", edges.len()),
            ));
        }
    }
    let mut out = Vec::with_capacity(partial.len());
    for (id, p) in partial.into_iter().enumerate() {
        let [a, y, j, ca, cy] = p.tables;
        let missing = |k: &str| Error::parse(last_line, format!("node {id}: missing '{k}'"));
        out.push(Node {
            unary_actor: a.ok_or_else(|| missing("unary_actor"))?,
            unary_action: y.ok_or_else(|| missing("unary_action"))?,
            unary_joint: j.ok_or_else(|| missing("unary_joint"))?,
            cond_action: ca.ok_or_else(|| missing("cond_action"))?,
            cond_actor: cy.ok_or_else(|| missing("cond_actor"))?,
            pixels: p.pixels,
        });
    }
    let inst = Instance {
        space,
        nodes: out,
        edges,
        thetas,
        video_scores: video,
        gt,
        frames,
    };
    inst.validate().map_err(|e| Error::parse(last_line, e.to_string()))?;
    Ok(inst)
}

fn push_scores(out: &mut String, key: &str, id: Option<usize>, v: &[f64]) {
    out.push_str(key);
    if let Some(id) = id {
        let _ = write!(out, " {id}");
    }
    for s in v {
        out.push(' ');
        out.push_str(&fmt_num(*s));
    }
    out.push('\n');
}

fn push_space(out: &mut String, space: &LabelSpace) {
    let _ = writeln!(out, "actors {} {}", space.num_actors(), space.actors().join(" "));
    let _ = writeln!(out, "actions {} {}", space.num_actions(), space.actions().join(" "));
    let _ = writeln!(out, "valid {}", space.num_valid());
    for &(a, y) in space.valid_pairs() {
        let _ = writeln!(out, "{} {}", space.actors()[a], space.actions()[y]);
    }
}

/// Canonical text form; optional sections are omitted when absent.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{INSTANCE_MAGIC} 1");
    push_space(&mut out, &inst.space);
    let t = inst.thetas;
    let _ = writeln!(
        out,
        "theta {} {} {}",
        fmt_num(t.actor),
        fmt_num(t.action),
        fmt_num(t.joint)
    );
    let _ = writeln!(out, "nodes {}", inst.nodes.len());
    for (id, n) in inst.nodes.iter().enumerate() {
        push_scores(&mut out, "unary_actor", Some(id), &n.unary_actor);
        push_scores(&mut out, "unary_action", Some(id), &n.unary_action);
        push_scores(&mut out, "unary_joint", Some(id), &n.unary_joint);
        push_scores(&mut out, "cond_action", Some(id), &n.cond_action);
        push_scores(&mut out, "cond_actor", Some(id), &n.cond_actor);
    }
    let _ = writeln!(out, "edges {}", inst.edges.len());
    for e in &inst.edges {
        let _ = writeln!(out, "edge {} {} {}", e.i, e.j, fmt_num(e.chi2));
    }
    if let Some(v) = &inst.video_scores {
        push_scores(&mut out, "videoscores", None, v);
    }
    if let Some(f) = inst.frames {
        let _ = writeln!(out, "frames {} {} {}", f.count, f.width, f.height);
    }
    for (id, n) in inst.nodes.iter().enumerate() {
        for (frame, px) in &n.pixels {
            let _ = write!(out, "pixels {id} {frame} {}", px.len());
            for (x, y) in px {
                let _ = write!(out, " {x} {y}");
            }
            out.push('\n');
        }
    }
    if let Some(gt) = &inst.gt {
        for (id, g) in gt.iter().enumerate() {
            let (a, y) = g.map_or(("-", "-"), |t| inst.space.tuple_names(t));
            let _ = writeln!(out, "gt {id} {a} {y}");
        }
    }
    out
}

/// Parses a standalone label-space file (`a2dlabels 1` followed by the
/// `actors`, `actions` and `valid` sections of the instance format).
pub fn parse_label_space(text: &str) -> Result<LabelSpace> {
    let lines: Vec<(usize, Vec<&str>)> = tokenized(text).collect();
    check_header(lines.first(), LABELS_MAGIC)?;
    let mut sp = SpaceSections::default();
    let mut last = 0;
    for (line, toks) in lines.iter().skip(1) {
        last = *line;
        if !sp.feed(*line, toks)? {
            return Err(Error::parse(*line, format!("unknown section '{}'", toks[0])));
        }
    }
    if sp.valid_expected.is_some_and(|m| sp.valid.len() < m) {
        return Err(Error::parse(sp.valid_line, "valid section truncated"));
    }
    sp.space(last).cloned()
}

pub fn serialize_label_space(space: &LabelSpace) -> String {
    let mut out = format!("{LABELS_MAGIC} 1\n");
    push_space(&mut out, space);
    out
}

/// Labeling file: `a2dlabeling 1` then `<node_id> <actor> <action>` lines.
pub fn serialize_labeling(space: &LabelSpace, labeling: &Labeling) -> String {
    let mut out = format!("{LABELING_MAGIC} 1\n");
    for (id, l) in labeling.labels.iter().enumerate() {
        let (a, y) = match *l {
            NodeLabel::Tuple(t) => space.tuple_names(t),
            NodeLabel::Pair { actor, action } => (space.actor_name(actor), space.action_name(action)),
        };
        let _ = writeln!(out, "{id} {a} {y}");
    }
    out
}

/// Parses a labeling for `num_nodes` nodes; every node must appear exactly once.
pub fn parse_labeling(text: &str, space: &LabelSpace, num_nodes: usize) -> Result<Labeling> {
    let lines: Vec<(usize, Vec<&str>)> = tokenized(text).collect();
    check_header(lines.first(), LABELING_MAGIC)?;
    let mut labels: Vec<Option<NodeLabel>> = vec![None; num_nodes];
    let mut last = 0;
    for (line, toks) in lines.iter().skip(1) {
        let line = *line;
        last = line;
        if toks.len() != 3 {
            return Err(Error::parse(line, "expected '<node_id> <actor> <action>'"));
        }
        let id = parse_usize(line, toks[0])?;
        let slot = labels
            .get_mut(id)
            .ok_or_else(|| Error::parse(line, format!("node id {id} out of range")))?;
        if slot.is_some() {
            return Err(Error::parse(line, format!("node {id} labeled twice")));
        }
        let actor = if toks[1] == BACKGROUND {
            Some(space.num_actors())
        } else {
            space.actor_index(toks[1])
        };
        let action = if toks[2] == BACKGROUND || (toks[1] == BACKGROUND && toks[2] == NONE_ACTION) {
            Some(space.num_actions())
        } else {
            space.action_index(toks[2])
        };
        let (Some(a), Some(y)) = (actor, action) else {
            return Err(Error::parse(line, format!("unknown label {}-{}", toks[1], toks[2])));
        };
        *slot = Some(NodeLabel::from_pair(space, a, y));
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(id, l)| l.ok_or_else(|| Error::parse(last, format!("node {id} has no label"))))
        .collect::<Result<_>>()?;
    Ok(Labeling { labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "a2dcrf 1
actors 1 person
actions 1 none
valid 1
person none
theta 1 1 1
nodes 1
unary_actor 0 1
unary_action 0 0.5
unary_joint 0 0.25 1
cond_action 0 1
cond_actor 0 1
edges 0
";

    #[test]
    fn minimal_file_parses() {
        let i = parse_instance(MINIMAL).unwrap();
        assert_eq!(i.num_nodes(), 1);
        assert!(i.edges.is_empty());
        assert_eq!(i.nodes[0].unary_joint, vec![0.25, 1.0]);
        assert_eq!(serialize_instance(&i), MINIMAL);
    }

    #[test]
    fn zero_score_is_rejected_with_line_number() {
        let bad = MINIMAL.replace("unary_action 0 0.5", "unary_action 0 0.0");
        let e = parse_instance(&bad).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 9, .. }), "{e}");
        assert!(e.to_string().contains("score out of range"), "{e}");
    }

    #[test]
    fn structural_errors_report_lines() {
        let e = parse_instance(&MINIMAL.replace("a2dcrf 1", "a2dcrf 2")).unwrap_err();
        assert!(e.to_string().contains("version mismatch"), "{e}");
        let e = parse_instance(&MINIMAL.replace("unary_joint 0 0.25 1", "unary_joint 0 0.25")).unwrap_err();
        assert!(e.to_string().contains("length mismatch"), "{e}");
        let e = parse_instance(&MINIMAL.replace("theta 1 1 1", "theta 1 1 1\ntheta 1 1 1")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 7, .. }), "{e}");
        assert!(e.to_string().contains("duplicate section"), "{e}");
        let e = parse_instance(&MINIMAL.replace("edges 0", "edges 1\nedge 0 3 0.5")).unwrap_err();
        assert!(e.to_string().contains("dangling edge"), "{e}");
        let e = parse_instance(&MINIMAL.replace("cond_actor 0 1\n", "")).unwrap_err();
        assert!(e.to_string().contains("missing 'cond_actor'"), "{e}");
    }

    #[test]
    fn comments_and_optional_sections() {
        let text = format!(
            "# leading comment\n{MINIMAL}videoscores 0.5 1 # trailing\nframes 2 4 3\npixels 0 1 2 0 0 3 2\ngt 0 person none\n"
        );
        let i = parse_instance(&text).unwrap();
        assert_eq!(i.video_scores, Some(vec![0.5, 1.0]));
        assert_eq!(i.nodes[0].pixels[&1], vec![(0, 0), (3, 2)]);
        assert_eq!(i.gt, Some(vec![Some(0)]));
        let again = parse_instance(&serialize_instance(&i)).unwrap();
        assert_eq!(again, i);

        let e = parse_instance(&text.replace("pixels 0 1 2 0 0 3 2", "pixels 0 1 1 4 0")).unwrap_err();
        assert!(e.to_string().contains("outside the frame"), "{e}");
    }

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_num(1e-5), "0.00001");
        assert_eq!(fmt_num(1e-6), "1e-6");
        assert_eq!(fmt_num(2.5e-7), "2.5e-7");
        assert_eq!(fmt_num(123456789.0), "123456789");
        assert_eq!(fmt_num(1e9), "1e9");
        assert_eq!(fmt_num(0.999999999999), "1");
    }

    #[test]
    fn labeling_round_trip_keeps_invalid_pairs() {
        let s = LabelSpace::a2d();
        let adult = s.actor_index("adult").unwrap();
        let flying = s.action_index("flying").unwrap();
        let lab = Labeling {
            labels: vec![
                NodeLabel::Tuple(0),
                NodeLabel::Pair {
                    actor: adult,
                    action: flying,
                },
                NodeLabel::Tuple(s.background()),
                NodeLabel::Pair {
                    actor: s.num_actors(),
                    action: 0,
                },
                NodeLabel::Pair {
                    actor: 1,
                    action: s.num_actions(),
                },
            ],
        };
        let text = serialize_labeling(&s, &lab);
        assert!(text.contains("1 adult flying\n"));
        assert!(text.contains("2 background none\n"));
        assert_eq!(parse_labeling(&text, &s, 5).unwrap(), lab);
        assert!(parse_labeling(&text, &s, 6).is_err());
        assert!(parse_labeling("a2dlabeling 1\n0 adult zooming\n", &s, 1).is_err());
    }

    #[test]
    fn label_space_file_round_trip() {
        let s = LabelSpace::a2d();
        assert_eq!(parse_label_space(&serialize_label_space(&s)).unwrap(), s);
    }
}

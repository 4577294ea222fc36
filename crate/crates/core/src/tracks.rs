//! Actor-action tracks: one tuple label held over a contiguous frame range,
//! with one bounding box per frame.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::label_space::LabelSpace;

pub const TRACKS_MAGIC: &str = "a2dtracks";

/// Axis-aligned box, inclusive on all edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoxRect {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl BoxRect {
    pub fn contains(&self, x: u32, y: u32) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Track {
    pub id: usize,
    /// Tuple index.
    pub label: usize,
    pub start: usize,
    pub finish: usize,
    /// `boxes[k]` is the box on frame `start + k`.
    pub boxes: Vec<BoxRect>,
}

impl Track {
    pub fn len(&self) -> usize {
        self.finish - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn frames(&self) -> impl Iterator<Item = (usize, &BoxRect)> {
        (self.start..=self.finish).zip(self.boxes.iter())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackSet {
    pub frame_count: usize,
    pub width: u32,
    pub height: u32,
    pub tracks: Vec<Track>,
}

impl TrackSet {
    pub fn validate(&self, space: &LabelSpace) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        let mut ids = std::collections::HashSet::new();
        for t in &self.tracks {
            if !ids.insert(t.id) {
                return bad(format!("duplicate track id {}", t.id));
            }
            if t.label >= space.num_tuples() {
                return bad(format!("track {}: label out of range", t.id));
            }
            if t.start > t.finish || t.finish >= self.frame_count {
                return bad(format!("track {}: frame range {}..{} invalid", t.id, t.start, t.finish));
            }
            if t.boxes.len() != t.len() {
                return bad(format!(
                    "track {}: {} boxes for {} frames",
                    t.id,
                    t.boxes.len(),
                    t.len()
                ));
            }
            for (f, b) in t.frames() {
                if b.x0 > b.x1 || b.y0 > b.y1 || b.x1 >= self.width || b.y1 >= self.height {
                    return bad(format!("track {}: box on frame {f} outside the frame", t.id));
                }
            }
        }
        Ok(())
    }
}

fn num(line: usize, tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("expected a nonnegative integer, got '{tok}'")))
}

struct Pending {
    line: usize,
    id: usize,
    label: usize,
    start: usize,
    finish: usize,
    boxes: BTreeMap<usize, (usize, BoxRect)>,
}

pub fn parse_tracks(text: &str, space: &LabelSpace) -> Result<TrackSet> {
    let mut frames: Option<(usize, u32, u32)> = None;
    let mut tracks: BTreeMap<usize, Pending> = BTreeMap::new();
    let mut order = Vec::new();
    let mut header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if !header {
            if toks[0] != TRACKS_MAGIC {
                return Err(Error::parse(line, format!("missing '{TRACKS_MAGIC} 1' header")));
            }
            if toks.len() != 2 || toks[1] != "1" {
                return Err(Error::parse(
                    line,
                    format!("version mismatch: expected '{TRACKS_MAGIC} 1'"),
                ));
            }
            header = true;
            continue;
        }
        match toks[0] {
            "frames" => {
                if frames.is_some() {
                    return Err(Error::parse(line, "duplicate section 'frames'"));
                }
                if toks.len() != 4 {
                    return Err(Error::parse(line, "expected 'frames <count> <W> <H>'"));
                }
                frames = Some((
                    num(line, toks[1])?,
                    num(line, toks[2])? as u32,
                    num(line, toks[3])? as u32,
                ));
            }
            "track" => {
                let (count, _, _) = frames.ok_or_else(|| Error::parse(line, "track before 'frames'"))?;
                if toks.len() != 6 {
                    return Err(Error::parse(line, "expected 'track <tid> <actor> <action> <t1> <tm>'"));
                }
                let id = num(line, toks[1])?;
                let label = space
                    .tuple_index(toks[2], toks[3])
                    .map_err(|e| Error::parse(line, e.to_string()))?;
                let start = num(line, toks[4])?;
                let finish = num(line, toks[5])?;
                if start > finish || finish >= count {
                    return Err(Error::parse(
                        line,
                        format!("track {id}: frame range {start}..{finish} invalid"),
                    ));
                }
                if tracks.contains_key(&id) {
                    return Err(Error::parse(line, format!("duplicate track id {id}")));
                }
                order.push(id);
                tracks.insert(
                    id,
                    Pending {
                        line,
                        id,
                        label,
                        start,
                        finish,
                        boxes: BTreeMap::new(),
                    },
                );
            }
            "box" => {
                let (_, w, h) = frames.ok_or_else(|| Error::parse(line, "box before 'frames'"))?;
                if toks.len() != 7 {
                    return Err(Error::parse(line, "expected 'box <tid> <t> <x0> <y0> <x1> <y1>'"));
                }
                let id = num(line, toks[1])?;
                let t = num(line, toks[2])?;
                let c: Vec<u32> = toks[3..]
                    .iter()
                    .map(|s| num(line, s).map(|v| v as u32))
                    .collect::<Result<_>>()?;
                let b = BoxRect {
                    x0: c[0],
                    y0: c[1],
                    x1: c[2],
                    y1: c[3],
                };
                if b.x0 > b.x1 || b.y0 > b.y1 || b.x1 >= w || b.y1 >= h {
                    return Err(Error::parse(line, "box outside the frame"));
                }
                let p = tracks
                    .get_mut(&id)
                    .ok_or_else(|| Error::parse(line, format!("box for unknown track {id}")))?;
                if t < p.start || t > p.finish {
                    return Err(Error::parse(line, format!("box on frame {t} outside track {id}")));
                }
                if p.boxes.insert(t, (line, b)).is_some() {
                    return Err(Error::parse(line, format!("duplicate box for track {id} frame {t}")));
                }
            }
            other => return Err(Error::parse(line, format!("unknown section '{other}'"))),
        }
    }
    if !header {
        return Err(Error::parse(
            0,
            format!("empty input, expected '{TRACKS_MAGIC} 1' header"),
        ));
    }
    let (frame_count, width, height) = frames.ok_or_else(|| Error::parse(0, "missing 'frames' section"))?;
    let mut out = Vec::with_capacity(order.len());
    for id in order {
        let p = tracks.remove(&id).expect("recorded id");
        let mut boxes = Vec::with_capacity(p.finish - p.start + 1);
        for t in p.start..=p.finish {
            let (_, b) = p
                .boxes
                .get(&t)
                .ok_or_else(|| Error::parse(p.line, format!("track {}: missing box for frame {t}", p.id)))?;
            boxes.push(*b);
        }
        out.push(Track {
            id: p.id,
            label: p.label,
            start: p.start,
            finish: p.finish,
            boxes,
        });
    }
    Ok(TrackSet {
        frame_count,
        width,
        height,
        tracks: out,
    })
}

pub fn serialize_tracks(set: &TrackSet, space: &LabelSpace) -> String {
    let mut out = format!(
        "{TRACKS_MAGIC} 1\nframes {} {} {}\n",
        set.frame_count, set.width, set.height
    );
    for t in &set.tracks {
        let (a, y) = space.tuple_names(t.label);
        let _ = writeln!(out, "track {} {a} {y} {} {}", t.id, t.start, t.finish);
        for (f, b) in t.frames() {
            let _ = writeln!(out, "box {} {f} {} {} {} {}", t.id, b.x0, b.y0, b.x1, b.y1);
        }
    }
    out
}

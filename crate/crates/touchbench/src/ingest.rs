//! Raw touch-event parsing and stroke segmentation.
//!
//! The raw log format is a CSV with header
//! `user_id,phone_id,doc_id,time_ms,action,phone_orientation,x,y,pressure,area,finger_orientation`.
//! Columns are matched by name, not position. Lines starting with `#` are
//! treated as comments.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Touch phase of a raw event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Down,
    Move,
    Up,
}

impl Action {
    /// Accepts the integer phase codes used by public touch datasets
    /// (0=down, 1=up, 2=move) as well as lowercase words.
    pub fn parse(s: &str) -> Option<Action> {
        match s.trim() {
            "0" | "down" => Some(Action::Down),
            "1" | "up" => Some(Action::Up),
            "2" | "move" => Some(Action::Move),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Action::Down => 0,
            Action::Up => 1,
            Action::Move => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhoneOrientation {
    Portrait,
    Landscape,
}

impl PhoneOrientation {
    pub fn parse(s: &str) -> Option<PhoneOrientation> {
        match s.trim() {
            "0" | "portrait" => Some(PhoneOrientation::Portrait),
            "1" | "landscape" => Some(PhoneOrientation::Landscape),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            PhoneOrientation::Portrait => 0,
            PhoneOrientation::Landscape => 1,
        }
    }
}

/// One raw touchscreen sample (the 11-column raw schema).
#[derive(Debug, Clone, PartialEq)]
pub struct TouchEvent {
    pub user_id: u32,
    pub phone_id: u32,
    pub doc_id: u32,
    pub time_ms: u64,
    pub action: Action,
    pub phone_orientation: PhoneOrientation,
    pub x: f64,
    pub y: f64,
    pub pressure: f64,
    pub area: f64,
    pub finger_orientation: f64,
}

/// One sampled point of a stroke, in event order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrokePoint {
    pub time_ms: u64,
    pub x: f64,
    pub y: f64,
    pub pressure: f64,
    pub area: f64,
    pub finger_orientation: f64,
}

/// A down..up finger trajectory for one user/doc/phone.
///
/// Invariants: at least 2 points, timestamps strictly increasing
/// (duplicate timestamps are collapsed keeping the last sample).
#[derive(Debug, Clone, PartialEq)]
pub struct Stroke {
    pub user_id: u32,
    pub phone_id: u32,
    pub doc_id: u32,
    pub phone_orientation: PhoneOrientation,
    pub points: Vec<StrokePoint>,
}

impl Stroke {
    pub fn duration_ms(&self) -> u64 {
        self.points.last().unwrap().time_ms - self.points[0].time_ms
    }
}

pub const RAW_COLUMNS: [&str; 11] = [
    "user_id",
    "phone_id",
    "doc_id",
    "time_ms",
    "action",
    "phone_orientation",
    "x",
    "y",
    "pressure",
    "area",
    "finger_orientation",
];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("missing column `{0}` in header")]
    MissingColumn(String),
    #[error("line {line}: {message}")]
    BadValue { line: usize, message: String },
    #[error("input contains no data rows")]
    EmptyInput,
}

fn bad(line: usize, message: impl Into<String>) -> IngestError {
    IngestError::BadValue {
        line,
        message: message.into(),
    }
}

/// Parse a raw touch-event log. Rows are returned in file order.
pub fn parse_raw_events(text: &str) -> Result<Vec<TouchEvent>, IngestError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));

    let (header_line, header) = lines.next().ok_or(IngestError::EmptyInput)?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, name) in names.iter().enumerate() {
        index.entry(name).or_insert(i);
    }
    let mut cols = [0usize; 11];
    for (slot, want) in cols.iter_mut().zip(RAW_COLUMNS) {
        *slot = *index
            .get(want)
            .ok_or_else(|| IngestError::MissingColumn(want.to_string()))?;
    }

    let mut events = Vec::new();
    for (lineno, line) in lines {
        let line_1 = lineno + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < names.len() {
            return Err(bad(
                line_1,
                format!("expected {} fields, found {}", names.len(), fields.len()),
            ));
        }
        let get = |slot: usize| fields[cols[slot]];
        let int = |slot: usize| -> Result<u64, IngestError> {
            get(slot).parse::<u64>().map_err(|_| {
                bad(
                    line_1,
                    format!("non-integer value `{}` in `{}`", get(slot), RAW_COLUMNS[slot]),
                )
            })
        };
        let real = |slot: usize| -> Result<f64, IngestError> {
            let v = get(slot).parse::<f64>().map_err(|_| {
                bad(
                    line_1,
                    format!("non-numeric value `{}` in `{}`", get(slot), RAW_COLUMNS[slot]),
                )
            })?;
            if !v.is_finite() {
                return Err(bad(line_1, format!("non-finite value in `{}`", RAW_COLUMNS[slot])));
            }
            Ok(v)
        };
        let action = Action::parse(get(4))
            .ok_or_else(|| bad(line_1, format!("unknown action code `{}`", get(4))))?;
        let orientation = PhoneOrientation::parse(get(5))
            .ok_or_else(|| bad(line_1, format!("unknown phone_orientation `{}`", get(5))))?;
        events.push(TouchEvent {
            user_id: int(0)? as u32,
            phone_id: int(1)? as u32,
            doc_id: int(2)? as u32,
            time_ms: int(3)?,
            action,
            phone_orientation: orientation,
            x: real(6)?,
            y: real(7)?,
            pressure: real(8)?,
            area: real(9)?,
            finger_orientation: real(10)?,
        });
    }
    let _ = header_line;
    if events.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    Ok(events)
}

/// Serialize events back to the raw CSV format. Floats use the shortest
/// round-tripping decimal form, so parse(write(parse(x))) == parse(x).
pub fn write_raw_events(events: &[TouchEvent], out: &mut String) {
    out.push_str(&RAW_COLUMNS.join(","));
    out.push('\n');
    for e in events {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            e.user_id,
            e.phone_id,
            e.doc_id,
            e.time_ms,
            e.action.code(),
            e.phone_orientation.code(),
            e.x,
            e.y,
            e.pressure,
            e.area,
            e.finger_orientation
        ));
    }
}

/// Per-group segmentation counters. A group is one (user_id, doc_id, phone_id).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSummary {
    pub user_id: u32,
    pub doc_id: u32,
    pub phone_id: u32,
    pub strokes: usize,
    pub dropped_events: usize,
}

/// Counters describing what happened to every input event.
///
/// `points_in_strokes + dropped_events()` always equals the number of
/// input events.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SegmentationReport {
    pub strokes: usize,
    pub points_in_strokes: usize,
    /// Up without an open stroke, Move outside a stroke, or events of an
    /// unterminated / restarted Down span.
    pub orphan_events: usize,
    /// Samples collapsed by the duplicate-timestamp rule.
    pub duplicate_samples: usize,
    /// Events of down..up spans left with fewer than 2 distinct timestamps.
    pub short_stroke_events: usize,
    pub groups: Vec<GroupSummary>,
}

impl SegmentationReport {
    pub fn dropped_events(&self) -> usize {
        self.orphan_events + self.duplicate_samples + self.short_stroke_events
    }
}

impl fmt::Display for SegmentationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "segmentation: {} strokes ({} points), {} events dropped \
             ({} orphans, {} duplicate timestamps, {} in short spans)",
            self.strokes,
            self.points_in_strokes,
            self.dropped_events(),
            self.orphan_events,
            self.duplicate_samples,
            self.short_stroke_events
        )?;
        for g in &self.groups {
            writeln!(
                f,
                "  user {} doc {} phone {}: {} strokes, {} dropped",
                g.user_id, g.doc_id, g.phone_id, g.strokes, g.dropped_events
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct GroupKey {
    user_id: u32,
    doc_id: u32,
    phone_id: u32,
}

struct OpenStroke {
    orientation: PhoneOrientation,
    points: Vec<StrokePoint>,
}

fn point_of(e: &TouchEvent) -> StrokePoint {
    StrokePoint {
        time_ms: e.time_ms,
        x: e.x,
        y: e.y,
        pressure: e.pressure,
        area: e.area,
        finger_orientation: e.finger_orientation,
    }
}

/// Segment events into strokes.
///
/// Each Down..Up span becomes one stroke; orphan events (Up without Down,
/// Move outside a span, unterminated Down spans) are dropped and counted.
/// Duplicate timestamps inside a span keep the last sample; spans left with
/// fewer than 2 distinct timestamps are discarded. Strokes are emitted in
/// source order of their Up event, so inter-stroke timing stays computable.
pub fn segment_strokes(events: &[TouchEvent]) -> (Vec<Stroke>, SegmentationReport) {
    let mut report = SegmentationReport::default();
    let mut open: HashMap<GroupKey, OpenStroke> = HashMap::new();
    let mut group_order: Vec<GroupKey> = Vec::new();
    let mut group_stats: HashMap<GroupKey, (usize, usize)> = HashMap::new();
    let mut strokes = Vec::new();

    let touch_group = |key: GroupKey,
                           order: &mut Vec<GroupKey>,
                           stats: &mut HashMap<GroupKey, (usize, usize)>|
     -> () {
        if !stats.contains_key(&key) {
            order.push(key);
            stats.insert(key, (0, 0));
        }
    };

    let close_span = |key: GroupKey,
                          span: OpenStroke,
                          strokes: &mut Vec<Stroke>,
                          report: &mut SegmentationReport,
                          stats: &mut HashMap<GroupKey, (usize, usize)>| {
        let raw_len = span.points.len();
        // keep the last sample for each repeated timestamp
        let mut points: Vec<StrokePoint> = Vec::with_capacity(raw_len);
        for p in span.points {
            if points.last().map(|q: &StrokePoint| q.time_ms) == Some(p.time_ms) {
                *points.last_mut().unwrap() = p;
            } else {
                points.push(p);
            }
        }
        let dupes = raw_len - points.len();
        let stat = stats.get_mut(&key).unwrap();
        if points.len() >= 2 {
            report.duplicate_samples += dupes;
            report.points_in_strokes += points.len();
            report.strokes += 1;
            stat.0 += 1;
            stat.1 += dupes;
            strokes.push(Stroke {
                user_id: key.user_id,
                phone_id: key.phone_id,
                doc_id: key.doc_id,
                phone_orientation: span.orientation,
                points,
            });
        } else {
            report.short_stroke_events += raw_len;
            stat.1 += raw_len;
        }
    };

    for e in events {
        let key = GroupKey {
            user_id: e.user_id,
            doc_id: e.doc_id,
            phone_id: e.phone_id,
        };
        touch_group(key, &mut group_order, &mut group_stats);
        match e.action {
            Action::Down => {
                if let Some(stale) = open.remove(&key) {
                    // restarted span: the accumulated points are orphans
                    report.orphan_events += stale.points.len();
                    group_stats.get_mut(&key).unwrap().1 += stale.points.len();
                }
                open.insert(
                    key,
                    OpenStroke {
                        orientation: e.phone_orientation,
                        points: vec![point_of(e)],
                    },
                );
            }
            Action::Move => match open.get_mut(&key) {
                Some(span) => span.points.push(point_of(e)),
                None => {
                    report.orphan_events += 1;
                    group_stats.get_mut(&key).unwrap().1 += 1;
                }
            },
            Action::Up => match open.remove(&key) {
                Some(mut span) => {
                    span.points.push(point_of(e));
                    close_span(key, span, &mut strokes, &mut report, &mut group_stats);
                }
                None => {
                    report.orphan_events += 1;
                    group_stats.get_mut(&key).unwrap().1 += 1;
                }
            },
        }
    }

    // unterminated spans are orphans
    for key in &group_order {
        if let Some(stale) = open.remove(key) {
            report.orphan_events += stale.points.len();
            group_stats.get_mut(key).unwrap().1 += stale.points.len();
        }
    }

    report.groups = group_order
        .iter()
        .map(|k| {
            let (s, d) = group_stats[k];
            GroupSummary {
                user_id: k.user_id,
                doc_id: k.doc_id,
                phone_id: k.phone_id,
                strokes: s,
                dropped_events: d,
            }
        })
        .collect();

    (strokes, report)
}

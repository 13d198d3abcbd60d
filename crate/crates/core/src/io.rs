//! File formats shared by the CLI and the FFI layer.
//!
//! Documents are JSON. Reals are written with 17 significant digits so that
//! every `f64` survives a write/read cycle bit for bit; non-finite values are
//! written as `null`.

use std::fs;
use std::path::Path as FsPath;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{AbstractSwissCheese, Disk};
use crate::jets::RationalFunction;
use crate::paths::{Path, Segment};
use crate::sequences::{NormSequence, PositiveSequence};

/// Real number written with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(format_real(self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Option::<f64>::deserialize(d).map(|v| Num(v.unwrap_or(f64::NAN)))
    }
}

/// Serde helper: 17-digit real, or `null` when not finite.
pub fn finite_or_null<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    Num(*x).serialize(s)
}

pub fn point(z: Complex64) -> [Num; 2] {
    [Num(z.re), Num(z.im)]
}

/// Serde helper: complex number as `[re, im]`.
pub fn serialize_point<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    point(*z).serialize(s)
}

fn to_complex(p: [Num; 2]) -> Complex64 {
    Complex64::new(p[0].0, p[1].0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiskDoc {
    pub center: [Num; 2],
    pub radius: Num,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheeseDoc {
    pub outer: DiskDoc,
    pub holes: Vec<DiskDoc>,
    #[serde(default = "zero")]
    pub tail_bound: Num,
}

fn zero() -> Num {
    Num(0.0)
}

impl From<&Disk> for DiskDoc {
    fn from(d: &Disk) -> Self {
        DiskDoc {
            center: point(d.center),
            radius: Num(d.radius),
        }
    }
}

impl From<&AbstractSwissCheese> for CheeseDoc {
    fn from(c: &AbstractSwissCheese) -> Self {
        CheeseDoc {
            outer: (&c.outer).into(),
            holes: c.holes.iter().map(DiskDoc::from).collect(),
            tail_bound: Num(c.tail_bound),
        }
    }
}

impl TryFrom<CheeseDoc> for AbstractSwissCheese {
    type Error = Error;

    fn try_from(doc: CheeseDoc) -> Result<Self> {
        let disk = |d: DiskDoc| Disk::new(to_complex(d.center), d.radius.0);
        AbstractSwissCheese::new(
            disk(doc.outer),
            doc.holes.into_iter().map(disk).collect(),
            doc.tail_bound.0,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SegmentDoc {
    Line {
        start: [Num; 2],
        end: [Num; 2],
    },
    Arc {
        center: [Num; 2],
        radius: Num,
        angle_start: Num,
        angle_end: Num,
        orientation: i8,
    },
    Polyline {
        points: Vec<[Num; 2]>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathDoc {
    pub segments: Vec<SegmentDoc>,
    /// Parameter break points; defaults to `0, 1, ..., n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breaks: Option<Vec<Num>>,
}

impl From<&Path> for PathDoc {
    fn from(p: &Path) -> Self {
        let segments = p
            .segments()
            .iter()
            .map(|s| match s {
                Segment::Line { start, end } => SegmentDoc::Line {
                    start: point(*start),
                    end: point(*end),
                },
                Segment::Arc {
                    center,
                    radius,
                    angle_start,
                    angle_end,
                    orientation,
                } => SegmentDoc::Arc {
                    center: point(*center),
                    radius: Num(*radius),
                    angle_start: Num(*angle_start),
                    angle_end: Num(*angle_end),
                    orientation: *orientation,
                },
                Segment::Polyline { points } => SegmentDoc::Polyline {
                    points: points.iter().map(|z| point(*z)).collect(),
                },
            })
            .collect();
        PathDoc {
            segments,
            breaks: Some(p.breaks().iter().map(|b| Num(*b)).collect()),
        }
    }
}

impl TryFrom<PathDoc> for Path {
    type Error = Error;

    fn try_from(doc: PathDoc) -> Result<Self> {
        let segments: Vec<Segment> = doc
            .segments
            .into_iter()
            .map(|s| match s {
                SegmentDoc::Line { start, end } => Segment::line(to_complex(start), to_complex(end)),
                SegmentDoc::Arc {
                    center,
                    radius,
                    angle_start,
                    angle_end,
                    orientation,
                } => Segment::Arc {
                    center: to_complex(center),
                    radius: radius.0,
                    angle_start: angle_start.0,
                    angle_end: angle_end.0,
                    orientation,
                },
                SegmentDoc::Polyline { points } => {
                    Segment::polyline(points.into_iter().map(to_complex).collect())
                }
            })
            .collect();
        match doc.breaks {
            Some(b) => Path::with_breaks(segments, b.into_iter().map(|n| n.0).collect()),
            None => Path::new(segments),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalDoc {
    pub num: Vec<[Num; 2]>,
    pub den: Vec<[Num; 2]>,
}

impl From<&RationalFunction> for RationalDoc {
    fn from(f: &RationalFunction) -> Self {
        RationalDoc {
            num: f.numerator().iter().map(|z| point(*z)).collect(),
            den: f.denominator().iter().map(|z| point(*z)).collect(),
        }
    }
}

impl TryFrom<RationalDoc> for RationalFunction {
    type Error = Error;

    fn try_from(doc: RationalDoc) -> Result<Self> {
        RationalFunction::new(
            doc.num.into_iter().map(to_complex).collect(),
            doc.den.into_iter().map(to_complex).collect(),
        )
    }
}

/// Sequence entries as decimal strings (plain JSON numbers are accepted too).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceDoc {
    pub values: Vec<DecimalEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecimalEntry {
    Text(String),
    Number(f64),
}

/// Natural log of a positive decimal string such as `"3628800"`, `"1.5e-3"`
/// or a several-thousand-digit integer.
pub fn log_of_decimal(s: &str) -> Result<f64> {
    let bad = || Error::Malformed(format!("`{s}` is not a decimal number"));
    let t = s.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    if t.starts_with('-') {
        return Err(bad());
    }
    if let Ok(x) = t.parse::<f64>() {
        if x.is_normal() && x > 0.0 {
            return Ok(x.ln());
        }
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: String = format!("{int_part}{frac_part}");
    let lead = digits.trim_start_matches('0');
    if lead.is_empty() {
        return Err(bad());
    }
    // value = 0.lead * 10^(decimal exponent of its first digit)
    let skipped = digits.len() - lead.len();
    let point_pos = int_part.len() as i64 - skipped as i64;
    let head: String = lead.chars().take(18).collect();
    let head_val: f64 = format!("0.{head}").parse().map_err(|_| bad())?;
    Ok(head_val.ln() + (point_pos + exp) as f64 * std::f64::consts::LN_10)
}

impl SequenceDoc {
    pub fn to_sequence(&self) -> Result<PositiveSequence> {
        let logs = self
            .values
            .iter()
            .enumerate()
            .map(|(index, v)| match v {
                DecimalEntry::Text(s) => log_of_decimal(s).map_err(|e| match e {
                    Error::Malformed(_) if s.trim().trim_start_matches(['0', '.']).is_empty() => {
                        Error::NonPositiveEntry { index }
                    }
                    other => other,
                }),
                DecimalEntry::Number(x) if *x > 0.0 && x.is_finite() => Ok(x.ln()),
                DecimalEntry::Number(_) => Err(Error::NonPositiveEntry { index }),
            })
            .collect::<Result<Vec<_>>>()?;
        PositiveSequence::from_logs(logs)
    }

    /// Sup-norm data, where exact zeros are allowed.
    pub fn to_norms(&self) -> Result<NormSequence> {
        let logs = self
            .values
            .iter()
            .enumerate()
            .map(|(index, v)| match v {
                DecimalEntry::Text(s) if s.trim().trim_start_matches(['0', '.']).is_empty() => {
                    Ok(f64::NEG_INFINITY)
                }
                DecimalEntry::Text(s) => log_of_decimal(s),
                DecimalEntry::Number(x) if *x >= 0.0 && x.is_finite() => Ok(x.ln()),
                DecimalEntry::Number(_) => Err(Error::NonPositiveEntry { index }),
            })
            .collect::<Result<Vec<_>>>()?;
        NormSequence::from_logs(logs)
    }

    pub fn from_sequence(seq: &PositiveSequence) -> Self {
        SequenceDoc {
            values: seq.logs().iter().map(|l| DecimalEntry::Text(decimal_from_log(*l))).collect(),
        }
    }
}

/// Decimal string with 17 significant digits for `exp(l)`, beyond `f64` range
/// if necessary.
pub fn decimal_from_log(l: f64) -> String {
    let e10 = l / std::f64::consts::LN_10;
    let mut exp = e10.floor();
    let mut mant = 10f64.powf(e10 - exp);
    if mant >= 10.0 {
        mant /= 10.0;
        exp += 1.0;
    }
    format!("{mant:.16}e{}", exp as i64)
}

/// Hex SHA-256 of the log values, used to tie certificates to their input.
pub fn sequence_digest(seq: &PositiveSequence) -> String {
    let mut h = Sha256::new();
    for l in seq.logs() {
        h.update(l.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_doc<T: DeserializeOwned>(path: &FsPath) -> Result<T> {
    from_json(&fs::read_to_string(path)?)
}

pub fn write_doc<T: Serialize>(path: &FsPath, value: &T) -> Result<()> {
    let mut text = to_json(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn cheese_to_json(c: &AbstractSwissCheese) -> Result<String> {
    to_json(&CheeseDoc::from(c))
}

pub fn cheese_from_json(text: &str) -> Result<AbstractSwissCheese> {
    from_json::<CheeseDoc>(text)?.try_into()
}

pub fn read_cheese(path: &FsPath) -> Result<AbstractSwissCheese> {
    read_doc::<CheeseDoc>(path)?.try_into()
}

pub fn read_path(path: &FsPath) -> Result<Path> {
    read_doc::<PathDoc>(path)?.try_into()
}

pub fn read_rational(path: &FsPath) -> Result<RationalFunction> {
    read_doc::<RationalDoc>(path)?.try_into()
}

pub fn read_sequence(path: &FsPath) -> Result<PositiveSequence> {
    read_doc::<SequenceDoc>(path)?.to_sequence()
}

pub fn read_norms(path: &FsPath) -> Result<NormSequence> {
    read_doc::<SequenceDoc>(path)?.to_norms()
}

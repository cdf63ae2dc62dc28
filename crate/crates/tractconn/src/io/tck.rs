//! MRtrix TCK tractogram codec, bit-exact for files this module writes.
//!
//! Layout: an ASCII header whose first line is exactly `mrtrix tracks`,
//! then `key: value` lines (unknown keys are preserved in order), a
//! `file: . <offset>` line giving the byte offset of the binary body, and
//! the terminator line `END`. The body is IEEE-754 32-bit little-endian
//! coordinate triplets; a triplet of three NaNs ends a streamline and a
//! triplet of three +infinities ends the file.

use std::path::Path;

use thiserror::Error;

use crate::geometry::Point3;

pub const TCK_MAGIC: &str = "mrtrix tracks";
pub const TCK_DATATYPE: &str = "Float32LE";

// Canonical quiet-NaN bit pattern so written separators are reproducible.
const NAN_BITS: u32 = 0x7FC0_0000;

#[derive(Debug, Error)]
pub enum TckError {
    #[error("bad magic line: expected {TCK_MAGIC:?}")]
    BadMagic,
    #[error("unsupported datatype {0:?} (only Float32LE)")]
    UnsupportedDatatype(String),
    #[error("truncated data: body ended before the infinity terminator")]
    TruncatedData,
    #[error("header count {header} does not match decoded streamline count {decoded}")]
    CountMismatch { header: usize, decoded: usize },
    #[error("non-finite coordinate outside a NaN/Inf marker triplet")]
    NonFinitePoint,
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("streamline {index} has {len} points; at least 2 are required")]
    ShortStreamline { index: usize, len: usize },
    #[error("unexpected bytes after the infinity terminator")]
    TrailingData,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parsed TCK header: the ordered `key: value` fields (excluding the
/// `file` line) and the byte offset where the binary body starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TckHeader {
    pub fields: Vec<(String, String)>,
    pub data_offset: usize,
}

impl TckHeader {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn count(&self) -> Option<usize> {
        self.get("count").and_then(|v| v.trim().parse().ok())
    }
}

/// An ordered 3D point sequence; always at least 2 finite points.
#[derive(Debug, Clone, PartialEq)]
pub struct Streamline {
    pub points: Vec<Point3>,
}

impl Streamline {
    pub fn new(points: Vec<Point3>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A whole-brain set of streamlines, in file order. File order is the
/// join key between a tractogram and its assignment list.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tractogram {
    pub streamlines: Vec<Streamline>,
}

impl Tractogram {
    pub fn new(streamlines: Vec<Streamline>) -> Self {
        Self { streamlines }
    }

    pub fn len(&self) -> usize {
        self.streamlines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.streamlines.is_empty()
    }
}

fn f32_triplet(bytes: &[u8]) -> [f32; 3] {
    let g = |i: usize| f32::from_le_bytes([bytes[i], bytes[i + 1], bytes[i + 2], bytes[i + 3]]);
    [g(0), g(4), g(8)]
}

/// Decode a TCK byte stream.
pub fn read_tck(bytes: &[u8]) -> Result<(TckHeader, Tractogram), TckError> {
    // Header: ASCII lines until "END".
    let mut pos = 0usize;
    let mut next_line = |pos: &mut usize| -> Result<String, TckError> {
        let start = *pos;
        let rel = bytes[start..]
            .iter()
            .position(|&b| b == b'\n')
            .ok_or(TckError::TruncatedData)?;
        *pos = start + rel + 1;
        String::from_utf8(bytes[start..start + rel].to_vec())
            .map_err(|_| TckError::MalformedHeader("non-UTF8 header line".into()))
    };

    if bytes.is_empty() || next_line(&mut pos)? != TCK_MAGIC {
        return Err(TckError::BadMagic);
    }

    let mut fields: Vec<(String, String)> = Vec::new();
    let mut data_offset: Option<usize> = None;
    loop {
        let line = next_line(&mut pos)?;
        if line == "END" {
            break;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| TckError::MalformedHeader(format!("not a key:value line: {line:?}")))?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if key == "file" {
            // Only the single-file layout "file: . <offset>" is supported.
            let offset = value
                .strip_prefix(". ")
                .and_then(|v| v.trim().parse::<usize>().ok())
                .ok_or_else(|| {
                    TckError::MalformedHeader(format!("unsupported file field {value:?}"))
                })?;
            data_offset = Some(offset);
        } else {
            fields.push((key, value));
        }
    }

    match fields.iter().find(|(k, _)| k == "datatype") {
        Some((_, v)) if v == TCK_DATATYPE => {}
        Some((_, v)) => return Err(TckError::UnsupportedDatatype(v.clone())),
        None => return Err(TckError::UnsupportedDatatype("<missing>".into())),
    }
    let data_offset =
        data_offset.ok_or_else(|| TckError::MalformedHeader("missing file field".into()))?;
    if data_offset < pos || data_offset > bytes.len() {
        return Err(TckError::MalformedHeader(format!(
            "file offset {data_offset} outside the stream"
        )));
    }
    let header = TckHeader {
        fields,
        data_offset,
    };

    // Body: f32 LE triplets; NaN triplet ends a streamline, Inf ends the file.
    let mut streamlines = Vec::new();
    let mut current: Vec<Point3> = Vec::new();
    let mut cursor = data_offset;
    let mut terminated = false;
    while !terminated {
        if cursor + 12 > bytes.len() {
            return Err(TckError::TruncatedData);
        }
        let [x, y, z] = f32_triplet(&bytes[cursor..cursor + 12]);
        cursor += 12;
        if x.is_nan() && y.is_nan() && z.is_nan() {
            finish_streamline(&mut streamlines, &mut current)?;
        } else if x == f32::INFINITY && y == f32::INFINITY && z == f32::INFINITY {
            // Tolerate a final streamline without its NaN separator.
            if !current.is_empty() {
                finish_streamline(&mut streamlines, &mut current)?;
            }
            terminated = true;
        } else if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(TckError::NonFinitePoint);
        } else {
            current.push(Point3::new(x as f64, y as f64, z as f64));
        }
    }
    if cursor != bytes.len() {
        return Err(TckError::TrailingData);
    }
    if let Some(expected) = header.count() {
        if expected != streamlines.len() {
            return Err(TckError::CountMismatch {
                header: expected,
                decoded: streamlines.len(),
            });
        }
    }
    Ok((header, Tractogram::new(streamlines)))
}

fn finish_streamline(
    streamlines: &mut Vec<Streamline>,
    current: &mut Vec<Point3>,
) -> Result<(), TckError> {
    if current.len() < 2 {
        return Err(TckError::ShortStreamline {
            index: streamlines.len(),
            len: current.len(),
        });
    }
    streamlines.push(Streamline::new(std::mem::take(current)));
    Ok(())
}

/// Encode a tractogram. `header_fields` are emitted in order; `datatype`
/// is forced to Float32LE (prepended when absent), `count` is set to the
/// true streamline count (appended when absent), and the `file` offset is
/// recomputed.
pub fn write_tck(
    tractogram: &Tractogram,
    header_fields: &[(String, String)],
) -> Result<Vec<u8>, TckError> {
    for (index, s) in tractogram.streamlines.iter().enumerate() {
        if s.len() < 2 {
            return Err(TckError::ShortStreamline {
                index,
                len: s.len(),
            });
        }
        for p in &s.points {
            let ok = p.is_finite()
                && (p.x as f32).is_finite()
                && (p.y as f32).is_finite()
                && (p.z as f32).is_finite();
            if !ok {
                return Err(TckError::NonFinitePoint);
            }
        }
    }

    let mut fields: Vec<(String, String)> = header_fields
        .iter()
        .filter(|(k, _)| k != "file")
        .cloned()
        .collect();
    let count = tractogram.len().to_string();
    match fields.iter_mut().find(|(k, _)| k == "datatype") {
        Some(f) => f.1 = TCK_DATATYPE.to_string(),
        None => fields.insert(0, ("datatype".to_string(), TCK_DATATYPE.to_string())),
    }
    match fields.iter_mut().find(|(k, _)| k == "count") {
        Some(f) => f.1 = count,
        None => fields.push(("count".to_string(), count)),
    }

    let mut head = String::new();
    head.push_str(TCK_MAGIC);
    head.push('\n');
    for (k, v) in &fields {
        head.push_str(&format!("{k}: {v}\n"));
    }
    // The offset line's own width feeds back into the offset; iterate to a
    // fixed point (two rounds suffice for any digit-count change).
    let mut offset = head.len() + "file: . \nEND\n".len() + 1;
    loop {
        let candidate = head.len() + format!("file: . {offset}\nEND\n").len();
        if candidate == offset {
            break;
        }
        offset = candidate;
    }
    let mut out = Vec::with_capacity(offset + 12 * (tractogram.len() + 1));
    out.extend_from_slice(head.as_bytes());
    out.extend_from_slice(format!("file: . {offset}\nEND\n").as_bytes());
    debug_assert_eq!(out.len(), offset);

    let mut push_triplet = |buf: &mut Vec<u8>, bits: [u32; 3]| {
        for b in bits {
            buf.extend_from_slice(&b.to_le_bytes());
        }
    };
    for s in &tractogram.streamlines {
        for p in &s.points {
            push_triplet(
                &mut out,
                [
                    (p.x as f32).to_bits(),
                    (p.y as f32).to_bits(),
                    (p.z as f32).to_bits(),
                ],
            );
        }
        push_triplet(&mut out, [NAN_BITS; 3]);
    }
    push_triplet(&mut out, [f32::INFINITY.to_bits(); 3]);
    Ok(out)
}

pub fn read_tck_file(path: &Path) -> Result<(TckHeader, Tractogram), TckError> {
    let bytes = std::fs::read(path)?;
    read_tck(&bytes)
}

pub fn write_tck_file(
    path: &Path,
    tractogram: &Tractogram,
    header_fields: &[(String, String)],
) -> Result<(), TckError> {
    let bytes = write_tck(tractogram, header_fields)?;
    std::fs::write(path, bytes)?;
    Ok(())
}

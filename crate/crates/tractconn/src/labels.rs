//! Region-pair ↔ streamline-class codec.
//!
//! Every unordered pair of gray-matter regions `(a, b)` with
//! `1 <= a <= b <= n` gets one class label, ordered lexicographically, and
//! class 0 is reserved for streamlines with an unassigned endpoint. The
//! class count for a scheme with `n` regions is `n(n+1)/2 + 1`.
//!
//! Encode and decode are closed-form (no lookup tables), so both are O(1)
//! and the codec works unchanged for any region count.

use std::fmt;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabelError {
    #[error("node index {node} out of range for scheme with {n_regions} regions")]
    NodeOutOfRange { node: u32, n_regions: u32 },
    #[error("class {class} out of range for scheme with {n_classes} classes")]
    ClassOutOfRange { class: u32, n_classes: u32 },
    #[error("scheme file: {0}")]
    SchemeParse(String),
    #[error("scheme file: expected {expected} region names, found {found}")]
    RegionNameCount { expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A gray-matter parcellation: a region count plus optional region names.
///
/// Region indices run from 1 to `n_regions`; index 0 means "unassigned".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParcellationScheme {
    pub n_regions: u32,
    pub name: String,
    pub region_names: Option<Vec<String>>,
}

impl ParcellationScheme {
    pub fn new(name: impl Into<String>, n_regions: u32) -> Self {
        assert!(n_regions >= 1, "a scheme needs at least one region");
        Self {
            n_regions,
            name: name.into(),
            region_names: None,
        }
    }

    /// Total number of streamline classes: `n(n+1)/2 + 1` (the +1 is the
    /// unknown class 0).
    pub fn num_classes(&self) -> u32 {
        num_classes(self.n_regions)
    }

    /// Parse a scheme definition file: first non-blank line is the region
    /// count, optional subsequent lines are one region name each (either
    /// none or exactly `n_regions` of them).
    pub fn from_file(path: &Path) -> Result<Self, LabelError> {
        let text = std::fs::read_to_string(path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scheme".to_string());
        Self::parse(&text, name)
    }

    pub fn parse(text: &str, name: impl Into<String>) -> Result<Self, LabelError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let first = lines
            .next()
            .ok_or_else(|| LabelError::SchemeParse("empty scheme file".into()))?;
        let n_regions: u32 = first
            .parse()
            .map_err(|_| LabelError::SchemeParse(format!("bad region count {first:?}")))?;
        if n_regions == 0 {
            return Err(LabelError::SchemeParse("region count must be >= 1".into()));
        }
        let names: Vec<String> = lines.map(str::to_string).collect();
        let region_names = if names.is_empty() {
            None
        } else if names.len() == n_regions as usize {
            Some(names)
        } else {
            return Err(LabelError::RegionNameCount {
                expected: n_regions as usize,
                found: names.len(),
            });
        };
        Ok(Self {
            n_regions,
            name: name.into(),
            region_names,
        })
    }

    /// Serialize in the same format `parse` accepts.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n_regions);
        if let Some(names) = &self.region_names {
            for n in names {
                out.push_str(n);
                out.push('\n');
            }
        }
        out
    }
}

/// An unordered node pair, stored canonically with `a <= b`.
/// Node 0 denotes an unassigned endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodePair {
    a: u32,
    b: u32,
}

impl NodePair {
    pub fn new(a: u32, b: u32) -> Self {
        if a <= b {
            Self { a, b }
        } else {
            Self { a: b, b: a }
        }
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    /// True when either endpoint is unassigned.
    pub fn is_unassigned(&self) -> bool {
        self.a == 0 || self.b == 0
    }
}

impl fmt::Display for NodePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// A streamline class label in `0..num_classes(scheme)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StreamlineClass(pub u32);

impl StreamlineClass {
    pub const UNKNOWN: StreamlineClass = StreamlineClass(0);

    pub fn value(&self) -> u32 {
        self.0
    }
}

/// `n(n+1)/2 + 1` classes for an `n`-region scheme.
pub fn num_classes(n_regions: u32) -> u32 {
    let n = n_regions as u64;
    (n * (n + 1) / 2 + 1) as u32
}

// 0-based rank of the first pair with left node `a` (1-based), i.e. the
// number of canonical pairs lexicographically before (a, a).
fn row_offset(a: u64, n: u64) -> u64 {
    (a - 1) * (2 * n - a + 2) / 2
}

/// Map an unordered node pair to its class label.
///
/// A pair with either endpoint unassigned (node 0) maps to class 0. The
/// two orders of the same pair always encode identically.
pub fn encode(pair: NodePair, scheme: &ParcellationScheme) -> Result<StreamlineClass, LabelError> {
    let n = scheme.n_regions;
    for node in [pair.a, pair.b] {
        if node > n {
            return Err(LabelError::NodeOutOfRange {
                node,
                n_regions: n,
            });
        }
    }
    if pair.is_unassigned() {
        return Ok(StreamlineClass::UNKNOWN);
    }
    let (a, b, n) = (pair.a as u64, pair.b as u64, n as u64);
    let class = row_offset(a, n) + (b - a) + 1;
    Ok(StreamlineClass(class as u32))
}

/// Inverse of [`encode`]: class 0 maps to the unassigned pair (0, 0).
pub fn decode(class: StreamlineClass, scheme: &ParcellationScheme) -> Result<NodePair, LabelError> {
    let n_classes = scheme.num_classes();
    if class.0 >= n_classes {
        return Err(LabelError::ClassOutOfRange {
            class: class.0,
            n_classes,
        });
    }
    if class.0 == 0 {
        return Ok(NodePair::new(0, 0));
    }
    let n = scheme.n_regions as u64;
    let m = class.0 as u64 - 1; // 0-based rank among canonical pairs

    // Invert the row offset: `a` is the largest value with row_offset(a) <= m.
    // Solve a^2 - (2n+3)a + (2n+2+2m) >= 0 for the smaller root, then fix up
    // any floating-point slack exactly.
    let p = (2 * n + 3) as f64;
    let disc = (p * p - 4.0 * (2 * n + 2 + 2 * m) as f64).max(0.0);
    let mut a = ((p - disc.sqrt()) / 2.0).floor() as u64;
    a = a.clamp(1, n);
    while a < n && row_offset(a + 1, n) <= m {
        a += 1;
    }
    while a > 1 && row_offset(a, n) > m {
        a -= 1;
    }
    let b = a + (m - row_offset(a, n));
    debug_assert!(b <= n);
    Ok(NodePair::new(a as u32, b as u32))
}

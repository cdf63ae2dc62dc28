//! Streamline geometry: arc-length resampling to a fixed point count,
//! bounding-box normalization, and orientation flips.
//!
//! The network consumes [`FixedStreamline`]s: exactly `P` points (15 by
//! default) evenly spaced by arc length along the raw trajectory, with the
//! raw endpoints preserved exactly.

use thiserror::Error;

/// Default number of resampled points per streamline.
pub const DEFAULT_POINTS: usize = 15;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("streamline has {0} points; at least 2 are required")]
    TooFewPoints(usize),
    #[error("resample target {0} is below the 2-point minimum")]
    BadTargetCount(usize),
    #[error("degenerate streamline: total arc length is zero")]
    DegenerateStreamline,
    #[error("bounding box has zero extent on axis {axis}")]
    ZeroExtentBounds { axis: usize },
}

/// A 3D point in millimeters (or normalized units after [`normalize`]).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn scale(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dist(self, o: Point3) -> f64 {
        self.sub(o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Linear interpolation `self + t * (other - self)`.
    pub fn lerp(self, other: Point3, t: f64) -> Point3 {
        self.add(other.sub(self).scale(t))
    }
}

/// An axis-aligned box with positive extent on every axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Point3,
    pub max: Point3,
}

impl BoundingBox {
    pub fn new(min: Point3, max: Point3) -> Result<Self, GeometryError> {
        let b = Self { min, max };
        for (axis, (lo, hi)) in [
            (min.x, max.x),
            (min.y, max.y),
            (min.z, max.z),
        ]
        .into_iter()
        .enumerate()
        {
            if !(hi > lo) {
                return Err(GeometryError::ZeroExtentBounds { axis });
            }
        }
        Ok(b)
    }

    /// The MNI152 brain bounding box in millimeters. Inputs registered to
    /// MNI space land inside this box, so it is the default normalization
    /// anchor; a model is only valid with the bounds it was trained with.
    pub fn mni152() -> Self {
        Self {
            min: Point3::new(-90.0, -126.0, -72.0),
            max: Point3::new(90.0, 90.0, 108.0),
        }
    }

    /// The affine map sending this box to [-1, 1]^3, applied to one point.
    pub fn normalize_point(&self, p: Point3) -> Point3 {
        let map = |v: f64, lo: f64, hi: f64| 2.0 * (v - lo) / (hi - lo) - 1.0;
        Point3::new(
            map(p.x, self.min.x, self.max.x),
            map(p.y, self.min.y, self.max.y),
            map(p.z, self.min.z, self.max.z),
        )
    }
}

/// Exactly `P` points, evenly spaced by arc length along the source
/// streamline, endpoints preserved.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedStreamline {
    points: Vec<Point3>,
}

impl FixedStreamline {
    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Flatten to `[x0, y0, z0, x1, ...]` for the network input buffer.
    pub fn write_flat(&self, out: &mut Vec<f64>) {
        for p in &self.points {
            out.extend_from_slice(&[p.x, p.y, p.z]);
        }
    }
}

/// Resample a polyline to `target` points at arc lengths `k * L / (target-1)`
/// by linear interpolation, `k = 0..target-1`. Endpoints are copied exactly.
pub fn resample(points: &[Point3], target: usize) -> Result<FixedStreamline, GeometryError> {
    if points.len() < 2 {
        return Err(GeometryError::TooFewPoints(points.len()));
    }
    if target < 2 {
        return Err(GeometryError::BadTargetCount(target));
    }
    // Cumulative arc length at every input vertex.
    let mut cum = Vec::with_capacity(points.len());
    cum.push(0.0);
    let mut total = 0.0;
    for w in points.windows(2) {
        total += w[0].dist(w[1]);
        cum.push(total);
    }
    if total == 0.0 {
        return Err(GeometryError::DegenerateStreamline);
    }

    let mut out = Vec::with_capacity(target);
    out.push(points[0]);
    let mut seg = 0usize;
    for k in 1..target - 1 {
        let t = total * k as f64 / (target - 1) as f64;
        while seg + 2 < points.len() && cum[seg + 1] < t {
            seg += 1;
        }
        let seg_len = cum[seg + 1] - cum[seg];
        let frac = if seg_len > 0.0 { (t - cum[seg]) / seg_len } else { 0.0 };
        out.push(points[seg].lerp(points[seg + 1], frac));
    }
    out.push(points[points.len() - 1]);
    Ok(FixedStreamline { points: out })
}

/// Apply the box-to-[-1,1]^3 affine map to every point. The map depends
/// only on `bounds`, so it is identical for all streamlines of a run.
pub fn normalize(fixed: &FixedStreamline, bounds: &BoundingBox) -> FixedStreamline {
    FixedStreamline {
        points: fixed
            .points
            .iter()
            .map(|p| bounds.normalize_point(*p))
            .collect(),
    }
}

/// Reverse point order when `coin` is true; used as a training-time
/// augmentation since the connectome target is orientation-symmetric.
pub fn maybe_flip(fixed: &FixedStreamline, coin: bool) -> FixedStreamline {
    if coin {
        let mut points = fixed.points.clone();
        points.reverse();
        FixedStreamline { points }
    } else {
        fixed.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line_x(n: usize, step: f64) -> Vec<Point3> {
        (0..n).map(|i| Point3::new(i as f64 * step, 0.0, 0.0)).collect()
    }

    #[test]
    fn straight_line_resamples_to_unit_steps() {
        let pts = vec![Point3::new(0.0, 0.0, 0.0), Point3::new(14.0, 0.0, 0.0)];
        let fixed = resample(&pts, 15).unwrap();
        for (k, p) in fixed.points().iter().enumerate() {
            assert!((p.x - k as f64).abs() < 1e-12);
            assert_eq!((p.y, p.z), (0.0, 0.0));
        }
    }

    #[test]
    fn uniform_input_is_fixed_point() {
        let pts = line_x(15, 2.5);
        let fixed = resample(&pts, 15).unwrap();
        for (p, q) in fixed.points().iter().zip(&pts) {
            assert!(p.dist(*q) < 1e-9);
        }
        // Endpoints are bit-exact copies.
        assert_eq!(fixed.points()[0], pts[0]);
        assert_eq!(fixed.points()[14], pts[14]);
    }

    #[test]
    fn dense_semicircle_oracle() {
        // Radius-1 semicircle sampled at 10k points; the resampled points
        // must land within 1e-3 of the analytically even angles k*pi/14.
        let dense: Vec<Point3> = (0..10_000)
            .map(|i| {
                let theta = std::f64::consts::PI * i as f64 / 9_999.0;
                Point3::new(theta.cos(), theta.sin(), 0.0)
            })
            .collect();
        let fixed = resample(&dense, 15).unwrap();
        for (k, p) in fixed.points().iter().enumerate() {
            let theta = std::f64::consts::PI * k as f64 / 14.0;
            let target = Point3::new(theta.cos(), theta.sin(), 0.0);
            assert!(p.dist(target) < 1e-3, "point {k} off by {}", p.dist(target));
        }
    }

    #[test]
    fn arc_length_gaps_are_even_on_a_helix() {
        let helix: Vec<Point3> = (0..800)
            .map(|i| {
                let t = i as f64 * 0.02;
                Point3::new(t.cos(), t.sin(), 0.25 * t)
            })
            .collect();
        let fixed = resample(&helix, 15).unwrap();
        // Recover each output point's arc position by projecting onto the
        // source polyline, then check the gaps are equal to within 1e-6 * L.
        let mut cum = vec![0.0];
        for w in helix.windows(2) {
            cum.push(cum.last().unwrap() + w[0].dist(w[1]));
        }
        let total = *cum.last().unwrap();
        let arc_of = |p: Point3| -> f64 {
            let mut best = (f64::INFINITY, 0.0);
            for (i, w) in helix.windows(2).enumerate() {
                let d = w[1].sub(w[0]);
                let len2 = d.x * d.x + d.y * d.y + d.z * d.z;
                let t = if len2 > 0.0 {
                    ((p.sub(w[0]).x * d.x + p.sub(w[0]).y * d.y + p.sub(w[0]).z * d.z) / len2)
                        .clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let proj = w[0].lerp(w[1], t);
                let dist = p.dist(proj);
                if dist < best.0 {
                    best = (dist, cum[i] + t * w[0].dist(w[1]));
                }
            }
            best.1
        };
        let arcs: Vec<f64> = fixed.points().iter().map(|p| arc_of(*p)).collect();
        let gaps: Vec<f64> = arcs.windows(2).map(|w| w[1] - w[0]).collect();
        let (min, max) = gaps
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| {
                (lo.min(*g), hi.max(*g))
            });
        assert!(max - min < 1e-6 * total, "gap spread {}", max - min);
    }

    #[test]
    fn degenerate_and_short_inputs_error() {
        let same = vec![Point3::new(1.0, 2.0, 3.0); 4];
        assert!(matches!(
            resample(&same, 15),
            Err(GeometryError::DegenerateStreamline)
        ));
        assert!(matches!(
            resample(&same[..1], 15),
            Err(GeometryError::TooFewPoints(1))
        ));
        assert!(matches!(
            resample(&line_x(3, 1.0), 1),
            Err(GeometryError::BadTargetCount(1))
        ));
    }

    #[test]
    fn normalize_examples() {
        let unit = BoundingBox::new(Point3::new(-1.0, -1.0, -1.0), Point3::new(1.0, 1.0, 1.0))
            .unwrap();
        let p = Point3::new(0.25, -0.5, 0.75);
        let q = unit.normalize_point(p);
        assert!(p.dist(q) < 1e-15);

        let box100 = BoundingBox::new(Point3::new(0.0, 0.0, 0.0), Point3::new(100.0, 100.0, 100.0))
            .unwrap();
        let center = box100.normalize_point(Point3::new(50.0, 50.0, 50.0));
        assert_eq!((center.x, center.y, center.z), (0.0, 0.0, 0.0));
        let corner = box100.normalize_point(Point3::new(100.0, 50.0, 0.0));
        assert_eq!((corner.x, corner.y, corner.z), (1.0, 0.0, -1.0));

        assert!(matches!(
            BoundingBox::new(Point3::new(0.0, 0.0, 5.0), Point3::new(10.0, 10.0, 5.0)),
            Err(GeometryError::ZeroExtentBounds { axis: 2 })
        ));
    }

    #[test]
    fn flip_behaviour() {
        let fixed = resample(&line_x(15, 1.0), 15).unwrap();
        let flipped = maybe_flip(&fixed, true);
        for (k, p) in flipped.points().iter().enumerate() {
            assert!((p.x - (14 - k) as f64).abs() < 1e-12);
        }
        assert_eq!(maybe_flip(&flipped, true), fixed);
        assert_eq!(maybe_flip(&fixed, false), fixed);

        // A palindromic streamline is unchanged either way.
        let pal: Vec<Point3> = (0..7)
            .map(|i| Point3::new((i as f64 - 3.0).abs(), 0.0, 0.0))
            .collect();
        let f = resample(&pal, 7).unwrap();
        assert_eq!(maybe_flip(&f, true), f);
    }

    proptest! {
        /// Subdividing input segments must not move the resampled points.
        #[test]
        fn densification_invariance(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..12);
            let pts: Vec<Point3> = (0..n)
                .map(|_| Point3::new(
                    rng.gen_range(-50.0..50.0),
                    rng.gen_range(-50.0..50.0),
                    rng.gen_range(-50.0..50.0),
                ))
                .collect();
            // Skip degenerate draws (all points identical is measure zero,
            // but duplicate consecutive points do occur after rounding).
            let total: f64 = pts.windows(2).map(|w| w[0].dist(w[1])).sum();
            prop_assume!(total > 1e-6);

            let base = resample(&pts, 15).unwrap();
            let mut dense = Vec::new();
            for w in pts.windows(2) {
                dense.push(w[0]);
                for s in 1..8 {
                    dense.push(w[0].lerp(w[1], s as f64 / 8.0));
                }
            }
            dense.push(pts[n - 1]);
            let refined = resample(&dense, 15).unwrap();
            for (p, q) in base.points().iter().zip(refined.points()) {
                prop_assert!(p.dist(*q) < 1e-9);
            }
        }

        /// Normalization is affine, so collinear points stay collinear.
        #[test]
        fn normalize_preserves_straightness(
            ax in -80.0f64..80.0, ay in -80.0f64..80.0, az in -60.0f64..60.0,
            bx in -80.0f64..80.0, by in -80.0f64..80.0, bz in -60.0f64..60.0,
            t in 0.0f64..1.0,
        ) {
            let a = Point3::new(ax, ay, az);
            let b = Point3::new(bx, by, bz);
            prop_assume!(a.dist(b) > 1e-3);
            let mid = a.lerp(b, t);
            let fixed = FixedStreamline { points: vec![a, mid, b] };
            let bounds = BoundingBox::mni152();
            let norm = normalize(&fixed, &bounds);
            let (na, nm, nb) = (norm.points()[0], norm.points()[1], norm.points()[2]);
            // nm must equal na.lerp(nb, s) for the arc fraction s implied by t.
            let expected = na.lerp(nb, t);
            prop_assert!(nm.dist(expected) < 1e-9);
        }
    }
}

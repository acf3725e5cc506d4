//! Fresnel-zone geometry engine: zone construction from the path-length
//! excess over the line of sight, the odd/even phase-shift model of a single
//! body reflection, and the boundary-distance look-up used to place a
//! transceiver pair so a gesture lands in a signal-enhancing zone.
//!
//! Geometry is planar: the ellipsoidal zones reduce to ellipses in the plane
//! containing the transmitter, the receiver, and the subject.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest zone index scanned by [`recommend_odd_zone`].
pub const MAX_LOOKUP_ZONE: u32 = 99;

/// A point in the deployment plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Transmitter/receiver positions and the carrier wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransceiverGeometry {
    tx: Point2,
    rx: Point2,
    wavelength: f64,
}

impl TransceiverGeometry {
    pub fn new(tx: Point2, rx: Point2, wavelength: f64) -> Result<Self> {
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(Error::InvalidArgument("wavelength must be > 0".into()));
        }
        if tx == rx {
            return Err(Error::InvalidArgument(
                "tx and rx must not coincide".into(),
            ));
        }
        Ok(Self { tx, rx, wavelength })
    }

    /// Places the pair symmetrically about the origin along the x axis.
    pub fn from_separation(separation: f64, wavelength: f64) -> Result<Self> {
        if !(separation > 0.0) || !separation.is_finite() {
            return Err(Error::InvalidArgument("separation must be > 0".into()));
        }
        Self::new(
            Point2::new(-separation / 2.0, 0.0),
            Point2::new(separation / 2.0, 0.0),
            wavelength,
        )
    }

    pub fn tx(&self) -> Point2 {
        self.tx
    }

    pub fn rx(&self) -> Point2 {
        self.rx
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Line-of-sight length `l`.
    pub fn separation(&self) -> f64 {
        self.tx.distance(self.rx)
    }

    /// Midpoint `O` of the transceiver pair.
    pub fn midpoint(&self) -> Point2 {
        Point2::new((self.tx.x + self.rx.x) / 2.0, (self.tx.y + self.rx.y) / 2.0)
    }

    /// The point at `distance` from the midpoint along the perpendicular
    /// bisector of the pair (positive side).
    pub fn bisector_point(&self, distance: f64) -> Point2 {
        let mid = self.midpoint();
        let l = self.separation();
        // unit normal to the tx->rx direction
        let nx = -(self.rx.y - self.tx.y) / l;
        let ny = (self.rx.x - self.tx.x) / l;
        Point2::new(mid.x + distance * nx, mid.y + distance * ny)
    }
}

/// Path-length excess of the reflected route through `point` over the line
/// of sight: `|Tx->P| + |P->Rx| - |Tx->Rx|`. Non-negative by the triangle
/// inequality.
pub fn path_difference(point: Point2, geom: &TransceiverGeometry) -> f64 {
    let d = geom.tx.distance(point) + point.distance(geom.rx) - geom.separation();
    d.max(0.0)
}

/// Index of the zone containing `point`: the smallest `n` with
/// `path_difference <= n * wavelength / 2`. Boundary membership is closed on
/// the right, so a point exactly on boundary `n` belongs to zone `n`; a
/// 1e-9 tolerance on the half-wavelength ratio absorbs the floating-point
/// noise of reconstructing boundary points from coordinates.
pub fn zone_index(point: Point2, geom: &TransceiverGeometry) -> u32 {
    let ratio = 2.0 * path_difference(point, geom) / geom.wavelength;
    let nearest = ratio.round();
    if (ratio - nearest).abs() < 1e-9 {
        nearest as u32
    } else {
        ratio.ceil() as u32
    }
}

/// Distance from the pair midpoint to the `n`-th zone boundary on the
/// perpendicular bisector: `sqrt(n^2 w^2 / 16 + n w l / 4)`, zero for `n = 0`.
pub fn zone_boundary_distance(n: u32, wavelength: f64, separation: f64) -> Result<f64> {
    if !(wavelength > 0.0) || !wavelength.is_finite() {
        return Err(Error::InvalidArgument("wavelength must be > 0".into()));
    }
    if !(separation > 0.0) || !separation.is_finite() {
        return Err(Error::InvalidArgument("separation must be > 0".into()));
    }
    let n = n as f64;
    Ok((n * n * wavelength * wavelength / 16.0 + n * wavelength * separation / 4.0).sqrt())
}

/// One row of the boundary-distance table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneBoundary {
    pub zone: u32,
    /// `|Q_n O|`, meters.
    pub distance: f64,
}

/// The zone-index to boundary-distance table for one deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct FresnelLookupTable {
    pub wavelength: f64,
    pub separation: f64,
    rows: Vec<ZoneBoundary>,
}

impl FresnelLookupTable {
    pub fn rows(&self) -> &[ZoneBoundary] {
        &self.rows
    }

    /// Renders the table as an aligned plain-text block.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "Fresnel zone boundaries (wavelength {} m, tx-rx distance {} m)\n",
            self.wavelength, self.separation
        ));
        out.push_str("  n    |QnO| (m)\n");
        for row in &self.rows {
            out.push_str(&format!("{:>3}    {:.4}\n", row.zone, row.distance));
        }
        out
    }

    /// Renders the table as machine-readable tab-separated rows.
    pub fn to_rows(&self) -> String {
        let mut out = String::from("zone\tdistance_m\n");
        for row in &self.rows {
            out.push_str(&format!("{}\t{}\n", row.zone, row.distance));
        }
        out
    }
}

/// Builds the boundary table for zones `0..=n_max`.
pub fn build_lookup_table(
    wavelength: f64,
    separation: f64,
    n_max: u32,
) -> Result<FresnelLookupTable> {
    let rows = (0..=n_max)
        .map(|n| {
            Ok(ZoneBoundary {
                zone: n,
                distance: zone_boundary_distance(n, wavelength, separation)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FresnelLookupTable {
        wavelength,
        separation,
        rows,
    })
}

/// Combined phase shift at the receiver for a reflector on the `n`-th zone
/// boundary: the path-excess shift (0 for even `n`, pi for odd) plus the pi
/// incurred by the reflection itself. 2*pi for odd zones (constructive), pi
/// for even zones (destructive).
pub fn combined_phase_shift(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "zone 0 is the line of sight; no reflected geometry".into(),
        ));
    }
    if n % 2 == 1 {
        Ok(2.0 * PI)
    } else {
        Ok(PI)
    }
}

/// An odd-zone placement suggestion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OddZonePlacement {
    pub zone: u32,
    /// Boundary distance of that zone from the pair midpoint, meters.
    pub boundary_distance: f64,
    /// True when the target lay beyond the scanned table and the result was
    /// clamped to the largest odd zone.
    pub clamped: bool,
}

/// Picks the odd zone whose boundary distance is closest to
/// `target_distance`, ties broken toward the smaller zone. Gestures in odd
/// zones add constructively to the line of sight, so aligning the subject
/// with an odd boundary strengthens the motion fingerprint.
///
/// The scan covers zones up to [`MAX_LOOKUP_ZONE`]; targets beyond that
/// range are clamped to the largest odd zone scanned.
pub fn recommend_odd_zone(
    target_distance: f64,
    wavelength: f64,
    separation: f64,
) -> Result<OddZonePlacement> {
    if !(target_distance >= 0.0) {
        return Err(Error::InvalidArgument(
            "target_distance must be >= 0".into(),
        ));
    }
    let mut best: Option<OddZonePlacement> = None;
    for n in (1..=MAX_LOOKUP_ZONE).step_by(2) {
        let d = zone_boundary_distance(n, wavelength, separation)?;
        let gap = (d - target_distance).abs();
        let better = match best {
            None => true,
            // strict improvement only: ties keep the smaller zone
            Some(b) => gap < (b.boundary_distance - target_distance).abs(),
        };
        if better {
            best = Some(OddZonePlacement {
                zone: n,
                boundary_distance: d,
                clamped: false,
            });
        }
    }
    let mut placement = best.expect("scan is non-empty");
    let last_odd = MAX_LOOKUP_ZONE - (1 - MAX_LOOKUP_ZONE % 2);
    if placement.zone == last_odd
        && target_distance > zone_boundary_distance(last_odd, wavelength, separation)?
    {
        placement.clamped = true;
    }
    Ok(placement)
}

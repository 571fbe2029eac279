//! Local area elements: PCA tangent planes and projected Voronoi cell areas.
//!
//! For each point the neighbourhood within `r` gives a tangent plane by PCA
//! about the neighbourhood mean. The neighbours within `delta` are projected
//! onto that plane and the point's 2D Voronoi cell is intersected with a disk
//! of radius `clip` (by default `delta / 2`) centred on the point, which keeps
//! cells on the rim of the neighbourhood bounded.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::scalar::{cross3, dot3, norm3, scale3, sub3, Real};
use crate::spatial_index::NeighborIndex;

/// Orthonormal frame of an estimated tangent plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentFrame<T = f64> {
    pub origin: [T; 3],
    /// Direction of largest neighbourhood variance.
    pub basis_u: [T; 3],
    pub basis_v: [T; 3],
    /// `basis_u x basis_v`; the direction of least variance.
    pub normal: [T; 3],
}

impl<T: Real> TangentFrame<T> {
    /// 2D coordinates of `p` in the plane, relative to the origin.
    pub fn project(&self, p: [T; 3]) -> [T; 2] {
        let d = sub3(p, self.origin);
        [dot3(d, self.basis_u), dot3(d, self.basis_v)]
    }
}

/// Per-point area elements, one per point of the cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaWeights<T = f64> {
    pub areas: Vec<T>,
}

impl<T: Real> AreaWeights<T> {
    pub fn total(&self) -> T {
        self.areas.iter().copied().sum()
    }
}

/// Fits the tangent plane at point `i` from its `r`-neighbourhood.
pub fn estimate_tangent_plane<T: Real>(
    cloud: &PointCloud<T>,
    index: &NeighborIndex<T>,
    i: usize,
    r: T,
) -> Result<TangentFrame<T>> {
    let p = cloud.points()[i];
    let nbrs = index.radius_query(p, r);
    if nbrs.len() < 3 {
        return Err(Error::InsufficientNeighbors {
            index: i,
            found: nbrs.len(),
            required: 3,
        });
    }
    let pts: Vec<[T; 3]> = nbrs.iter().map(|&j| cloud.points()[j]).collect();
    frame_from_neighbors(p, &pts).ok_or(Error::DegenerateNeighborhood { index: i })
}

/// PCA plane fit; `None` when the neighbourhood is (numerically) collinear.
fn frame_from_neighbors<T: Real>(origin: [T; 3], pts: &[[T; 3]]) -> Option<TangentFrame<T>> {
    let n = T::from_usize_lossy(pts.len());
    let mut mean = [T::zero(); 3];
    for q in pts {
        for a in 0..3 {
            mean[a] = mean[a] + q[a];
        }
    }
    mean = scale3(mean, T::one() / n);
    let mut cov = Array2::<T>::zeros((3, 3));
    for q in pts {
        let d = sub3(*q, mean);
        for a in 0..3 {
            for b in 0..3 {
                cov[[a, b]] = cov[[a, b]] + d[a] * d[b];
            }
        }
    }
    let eig = symmetric_eigen(&cov).ok()?;
    let largest = eig.values[2];
    let tiny = T::lit(1e-12) * largest;
    if !(largest > T::zero()) || (eig.values[0] <= tiny && eig.values[1] <= tiny) {
        return None;
    }
    let col = |k: usize| {
        [
            eig.vectors[[0, k]],
            eig.vectors[[1, k]],
            eig.vectors[[2, k]],
        ]
    };
    let u = col(2);
    let u = scale3(u, T::one() / norm3(u));
    let v = col(1);
    let v = sub3(v, scale3(u, dot3(u, v)));
    let v = scale3(v, T::one() / norm3(v));
    let normal = cross3(u, v);
    Some(TangentFrame {
        origin,
        basis_u: u,
        basis_v: v,
        normal,
    })
}

/// Area of point `i`'s projected Voronoi cell, clipped to a disk of radius `delta / 2`.
pub fn voronoi_cell_area<T: Real>(
    cloud: &PointCloud<T>,
    index: &NeighborIndex<T>,
    i: usize,
    frame: &TangentFrame<T>,
    delta: T,
) -> Result<T> {
    voronoi_cell_area_clipped(cloud, index, i, frame, delta, delta * T::lit(0.5))
}

/// Like [`voronoi_cell_area`] with an explicit clip radius.
pub fn voronoi_cell_area_clipped<T: Real>(
    cloud: &PointCloud<T>,
    index: &NeighborIndex<T>,
    i: usize,
    frame: &TangentFrame<T>,
    delta: T,
    clip: T,
) -> Result<T> {
    if !(delta > T::zero()) || !(clip > T::zero()) {
        return Err(Error::InvalidArgument(
            "delta and clip radius must be positive".into(),
        ));
    }
    let p = cloud.points()[i];
    let nbrs = index.radius_query(p, delta);
    if nbrs.len() < 4 {
        return Err(Error::InsufficientNeighbors {
            index: i,
            found: nbrs.len(),
            required: 4,
        });
    }
    let center = frame.project(p);
    let dup_tol = T::lit(1e-12) * delta;
    let mut sites = Vec::with_capacity(nbrs.len());
    for &j in &nbrs {
        if j == i {
            continue;
        }
        let q = frame.project(cloud.points()[j]);
        let mut s = [q[0] - center[0], q[1] - center[1]];
        if (s[0] * s[0] + s[1] * s[1]).sqrt() <= dup_tol {
            s = jitter(i, j, delta);
            if (s[0] * s[0] + s[1] * s[1]).sqrt() <= dup_tol {
                return Err(Error::DegenerateCell { index: i });
            }
        }
        sites.push(s);
    }
    let area = clipped_cell_area(&sites, clip);
    if !(area > T::zero()) || !area.is_finite() {
        return Err(Error::DegenerateCell { index: i });
    }
    Ok(area)
}

/// Deterministic displacement of magnitude `1e-9 * delta` for a coincident projection.
fn jitter<T: Real>(i: usize, j: usize, delta: T) -> [T; 2] {
    let seed = (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (j as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angle = T::lit(rng.gen_range(0.0..std::f64::consts::TAU));
    let m = T::lit(1e-9) * delta;
    [m * angle.cos(), m * angle.sin()]
}

/// Area of the Voronoi cell of the origin among `sites`, intersected with the
/// disk of radius `clip` about the origin.
pub(crate) fn clipped_cell_area<T: Real>(sites: &[[T; 2]], clip: T) -> T {
    let half = T::lit(0.5);
    // Square circumscribing the clip disk; every cell is bounded after clipping to it.
    let mut poly = vec![[-clip, -clip], [clip, -clip], [clip, clip], [-clip, clip]];
    for s in sites {
        // Half-plane { x : x.s <= |s|^2 / 2 }.
        let bound = (s[0] * s[0] + s[1] * s[1]) * half;
        poly = clip_half_plane(&poly, *s, bound);
        if poly.len() < 3 {
            return T::zero();
        }
    }
    let mut area = T::zero();
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        area = area + triangle_disk_area(a, b, clip);
    }
    area.abs()
}

fn clip_half_plane<T: Real>(poly: &[[T; 2]], normal: [T; 2], bound: T) -> Vec<[T; 2]> {
    let side = |p: [T; 2]| p[0] * normal[0] + p[1] * normal[1] - bound;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        let sa = side(a);
        let sb = side(b);
        if sa <= T::zero() {
            out.push(a);
        }
        if (sa < T::zero() && sb > T::zero()) || (sa > T::zero() && sb < T::zero()) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

#[inline]
fn cross2<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    a[0] * b[1] - a[1] * b[0]
}

/// Signed angle from `a` to `b`.
#[inline]
fn angle2<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    cross2(a, b).atan2(a[0] * b[0] + a[1] * b[1])
}

/// Signed area of (triangle origin-a-b) intersected with the disk of radius `r` at the origin.
fn triangle_disk_area<T: Real>(a: [T; 2], b: [T; 2], r: T) -> T {
    let half = T::lit(0.5);
    let r2 = r * r;
    let la = a[0] * a[0] + a[1] * a[1];
    let lb = b[0] * b[0] + b[1] * b[1];
    let sector = |u: [T; 2], v: [T; 2]| half * r2 * angle2(u, v);
    let tri = |u: [T; 2], v: [T; 2]| half * cross2(u, v);
    if la <= r2 && lb <= r2 {
        return tri(a, b);
    }
    // |a + t (b - a)|^2 = r^2
    let d = [b[0] - a[0], b[1] - a[1]];
    let qa = d[0] * d[0] + d[1] * d[1];
    if qa == T::zero() {
        return T::zero();
    }
    let qb = a[0] * d[0] + a[1] * d[1];
    let qc = la - r2;
    let disc = qb * qb - qa * qc;
    let at = |t: T| [a[0] + t * d[0], a[1] + t * d[1]];
    if disc <= T::zero() {
        return sector(a, b);
    }
    let sq = disc.sqrt();
    let t1 = (-qb - sq) / qa;
    let t2 = (-qb + sq) / qa;
    if la <= r2 {
        let p = at(t2);
        return tri(a, p) + sector(p, b);
    }
    if lb <= r2 {
        let p = at(t1);
        return sector(a, p) + tri(p, b);
    }
    if t1 > T::zero() && t2 < T::one() {
        let p1 = at(t1);
        let p2 = at(t2);
        return sector(a, p1) + tri(p1, p2) + sector(p2, b);
    }
    sector(a, b)
}

/// Area weights for every point, each computed in its own tangent frame.
///
/// Exact duplicate positions are rejected up front since their cells are undefined.
pub fn all_area_weights<T: Real>(
    cloud: &PointCloud<T>,
    index: &NeighborIndex<T>,
    r: T,
    delta: T,
) -> Result<AreaWeights<T>> {
    all_area_weights_clipped(cloud, index, r, delta, delta * T::lit(0.5))
}

pub fn all_area_weights_clipped<T: Real>(
    cloud: &PointCloud<T>,
    index: &NeighborIndex<T>,
    r: T,
    delta: T,
    clip: T,
) -> Result<AreaWeights<T>> {
    if !(r > T::zero()) || !(delta > T::zero()) {
        return Err(Error::InvalidArgument(
            "r and delta must be positive".into(),
        ));
    }
    for i in 0..cloud.len() {
        if let Some((j, d)) = index.nearest_other(i) {
            if d == T::zero() {
                return Err(Error::DuplicatePoint {
                    index: i.max(j),
                    duplicate_of: i.min(j),
                });
            }
        }
    }
    let areas = (0..cloud.len())
        .map(|i| {
            let frame = estimate_tangent_plane(cloud, index, i, r)?;
            voronoi_cell_area_clipped(cloud, index, i, &frame, delta, clip)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(AreaWeights { areas })
}

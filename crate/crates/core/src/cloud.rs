use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Unstructured samples of a surface, with optional per-vertex attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T = f64> {
    points: Vec<[T; 3]>,
    colors: Option<Vec<[u8; 3]>>,
    scalars: BTreeMap<String, Vec<T>>,
}

impl<T: Real> PointCloud<T> {
    /// Creates a cloud from positions. Fails on an empty set or non-finite coordinates.
    pub fn new(points: Vec<[T; 3]>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidCloud(
                "a point cloud needs at least one point".into(),
            ));
        }
        if let Some(i) = points.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidCloud(format!(
                "point {i} has a non-finite coordinate"
            )));
        }
        Ok(Self {
            points,
            colors: None,
            scalars: BTreeMap::new(),
        })
    }

    pub fn with_colors(mut self, colors: Vec<[u8; 3]>) -> Result<Self> {
        if colors.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                expected: self.points.len(),
                found: colors.len(),
            });
        }
        self.colors = Some(colors);
        Ok(self)
    }

    pub fn with_scalar(mut self, name: impl Into<String>, values: Vec<T>) -> Result<Self> {
        if values.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                expected: self.points.len(),
                found: values.len(),
            });
        }
        self.scalars.insert(name.into(), values);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: a valid cloud has at least one point.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[T; 3]] {
        &self.points
    }

    pub fn colors(&self) -> Option<&[[u8; 3]]> {
        self.colors.as_deref()
    }

    pub fn scalars(&self) -> &BTreeMap<String, Vec<T>> {
        &self.scalars
    }

    /// Coordinate channel `axis` (0 = x, 1 = y, 2 = z) as a vector.
    pub fn coordinate(&self, axis: usize) -> Vec<T> {
        self.points.iter().map(|p| p[axis]).collect()
    }

    /// The three coordinate channels x, y, z.
    pub fn coordinate_channels(&self) -> Vec<Vec<T>> {
        (0..3).map(|a| self.coordinate(a)).collect()
    }

    /// Replaces positions from three coordinate channels, keeping attributes.
    pub fn with_coordinate_channels(&self, channels: &[Vec<T>]) -> Result<Self> {
        if channels.len() != 3 {
            return Err(Error::LengthMismatch {
                expected: 3,
                found: channels.len(),
            });
        }
        for c in channels {
            if c.len() != self.len() {
                return Err(Error::LengthMismatch {
                    expected: self.len(),
                    found: c.len(),
                });
            }
        }
        let points = (0..self.len())
            .map(|i| [channels[0][i], channels[1][i], channels[2][i]])
            .collect();
        let mut out = Self::new(points)?;
        out.colors = self.colors.clone();
        out.scalars = self.scalars.clone();
        Ok(out)
    }

    pub fn centroid(&self) -> [T; 3] {
        let n = T::from_usize_lossy(self.len());
        let mut c = [T::zero(); 3];
        for p in &self.points {
            for k in 0..3 {
                c[k] = c[k] + p[k];
            }
        }
        [c[0] / n, c[1] / n, c[2] / n]
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bounding_box(&self) -> ([T; 3], [T; 3]) {
        let mut lo = self.points[0];
        let mut hi = self.points[0];
        for p in &self.points {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    pub fn bounding_box_diagonal(&self) -> T {
        let (lo, hi) = self.bounding_box();
        crate::scalar::norm3(crate::scalar::sub3(hi, lo))
    }

    /// Sub-cloud made of the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let points = indices.iter().map(|&i| self.points[i]).collect();
        let mut out = Self::new(points)?;
        out.colors = self
            .colors
            .as_ref()
            .map(|c| indices.iter().map(|&i| c[i]).collect());
        out.scalars = self
            .scalars
            .iter()
            .map(|(k, v)| (k.clone(), indices.iter().map(|&i| v[i]).collect()))
            .collect();
        Ok(out)
    }

    /// Converts to another scalar precision.
    pub fn cast<U: Real>(&self) -> PointCloud<U> {
        let conv = |x: T| U::lit(x.to_f64_lossy());
        PointCloud {
            points: self
                .points
                .iter()
                .map(|p| [conv(p[0]), conv(p[1]), conv(p[2])])
                .collect(),
            colors: self.colors.clone(),
            scalars: self
                .scalars
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|&x| conv(x)).collect()))
                .collect(),
        }
    }
}

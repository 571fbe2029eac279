//! Static kd-tree over a point cloud with exact fixed-radius and k-nearest queries.

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::scalar::{dist2, Real};

const LEAF_SIZE: usize = 12;

#[derive(Debug, Clone)]
enum Node<T> {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: T,
        left: usize,
        right: usize,
    },
}

/// Immutable spatial search structure over the points of a cloud.
#[derive(Debug, Clone)]
pub struct NeighborIndex<T = f64> {
    points: Vec<[T; 3]>,
    /// Point indices permuted so every leaf owns a contiguous range.
    perm: Vec<usize>,
    nodes: Vec<Node<T>>,
    bbox: ([T; 3], [T; 3]),
}

/// Sampling density of a cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingEstimate<T = f64> {
    /// Mean nearest-neighbour distance.
    pub epsilon: T,
    /// Distance from each point to its nearest other point.
    pub per_point_nn: Vec<T>,
}

impl<T: Real> NeighborIndex<T> {
    pub fn build(cloud: &PointCloud<T>) -> Self {
        let points = cloud.points().to_vec();
        let mut perm: Vec<usize> = (0..points.len()).collect();
        let mut nodes = Vec::new();
        build_node(&points, &mut perm, 0, points.len(), &mut nodes);
        Self {
            points,
            perm,
            nodes,
            bbox: cloud.bounding_box(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bounding_box(&self) -> ([T; 3], [T; 3]) {
        self.bbox
    }

    pub fn point(&self, i: usize) -> [T; 3] {
        self.points[i]
    }

    /// All indices `j` with `|p_j - center| <= radius`, ascending.
    pub fn radius_query(&self, center: [T; 3], radius: T) -> Vec<usize> {
        let mut out = Vec::new();
        if radius < T::zero() || self.points.is_empty() {
            return out;
        }
        let r2 = radius * radius;
        self.radius_rec(0, center, r2, &mut out);
        out.sort_unstable();
        out
    }

    fn radius_rec(&self, node: usize, c: [T; 3], r2: T, out: &mut Vec<usize>) {
        match &self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.perm[*start..*end] {
                    if dist2(self.points[i], c) <= r2 {
                        out.push(i);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = c[*axis] - *value;
                let (near, far) = if diff <= T::zero() {
                    (*left, *right)
                } else {
                    (*right, *left)
                };
                self.radius_rec(near, c, r2, out);
                if diff * diff <= r2 {
                    self.radius_rec(far, c, r2, out);
                }
            }
        }
    }

    /// The `k` nearest points to `center` as `(index, distance)`, nearest first.
    /// Equal distances are ordered by index.
    pub fn knn(&self, center: [T; 3], k: usize) -> Vec<(usize, T)> {
        let mut best: Vec<(T, usize)> = Vec::with_capacity(k + 1);
        if k > 0 && !self.points.is_empty() {
            self.knn_rec(0, center, k, None, &mut best);
        }
        best.into_iter().map(|(d2, i)| (i, d2.sqrt())).collect()
    }

    /// Nearest point to `points[i]` other than `i` itself.
    pub fn nearest_other(&self, i: usize) -> Option<(usize, T)> {
        let mut best = Vec::with_capacity(2);
        self.knn_rec(0, self.points[i], 1, Some(i), &mut best);
        best.first().map(|&(d2, j)| (j, d2.sqrt()))
    }

    fn knn_rec(
        &self,
        node: usize,
        c: [T; 3],
        k: usize,
        exclude: Option<usize>,
        best: &mut Vec<(T, usize)>,
    ) {
        match &self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.perm[*start..*end] {
                    if Some(i) == exclude {
                        continue;
                    }
                    let d = dist2(self.points[i], c);
                    let key = (d, i);
                    if best.len() < k || lex_less(key, best[best.len() - 1]) {
                        let pos = best.partition_point(|&e| lex_less(e, key));
                        best.insert(pos, key);
                        best.truncate(k);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = c[*axis] - *value;
                let (near, far) = if diff <= T::zero() {
                    (*left, *right)
                } else {
                    (*right, *left)
                };
                self.knn_rec(near, c, k, exclude, best);
                if best.len() < k || diff * diff <= best[best.len() - 1].0 {
                    self.knn_rec(far, c, k, exclude, best);
                }
            }
        }
    }
}

fn lex_less<T: Real>(a: (T, usize), b: (T, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

fn build_node<T: Real>(
    points: &[[T; 3]],
    perm: &mut [usize],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node<T>>,
) -> usize {
    let id = nodes.len();
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf { start, end });
        return id;
    }
    let slice = &mut perm[start..end];
    let mut lo = points[slice[0]];
    let mut hi = lo;
    for &i in slice.iter() {
        for a in 0..3 {
            lo[a] = lo[a].min(points[i][a]);
            hi[a] = hi[a].max(points[i][a]);
        }
    }
    let axis = (0..3)
        .max_by(|&a, &b| {
            (hi[a] - lo[a])
                .partial_cmp(&(hi[b] - lo[b]))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(0);
    if hi[axis] == lo[axis] {
        // All coincident: no useful split.
        nodes.push(Node::Leaf { start, end });
        return id;
    }
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        points[a][axis]
            .partial_cmp(&points[b][axis])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let value = points[slice[mid]][axis];
    // Points left of `mid` are <= value, right of it >= value.
    nodes.push(Node::Leaf { start, end });
    let left = build_node(points, perm, start, start + mid, nodes);
    let right = build_node(points, perm, start + mid, end, nodes);
    nodes[id] = Node::Split {
        axis,
        value,
        left,
        right,
    };
    id
}

/// Builds the index for a cloud.
pub fn build_index<T: Real>(cloud: &PointCloud<T>) -> NeighborIndex<T> {
    NeighborIndex::build(cloud)
}

/// Mean distance from each point to its nearest other point.
pub fn estimate_epsilon<T: Real>(index: &NeighborIndex<T>) -> Result<SamplingEstimate<T>> {
    let n = index.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "epsilon estimation needs at least two points".into(),
        ));
    }
    let per_point_nn: Vec<T> = (0..n)
        .map(|i| index.nearest_other(i).map(|(_, d)| d).unwrap_or(T::zero()))
        .collect();
    let sum: T = per_point_nn.iter().copied().sum();
    let epsilon = sum / T::from_usize_lossy(n);
    if !(epsilon > T::zero()) {
        return Err(Error::DegenerateSampling);
    }
    Ok(SamplingEstimate {
        epsilon,
        per_point_nn,
    })
}

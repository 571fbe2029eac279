//! Discrete Laplace-Beltrami operator `L = B^-1 Q` on a point cloud.
//!
//! Off-diagonal stiffness entries are heat-kernel weights scaled by the area
//! elements of both endpoints,
//!
//! ```text
//! q_ij = a_i a_j / (4 pi t^2) * exp(-|p_i - p_j|^2 / (4 t)),   |p_i - p_j| <= delta
//! q_ii = -sum_{j != i} q_ij
//! b_ii = a_i
//! ```
//!
//! so `(L f)_i = sum_j a_j / (4 pi t^2) exp(..) (f_j - f_i)`.

use std::io::Write;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::scalar::{dist2, Real};
use crate::spatial_index::NeighborIndex;
use crate::tangent_voronoi::AreaWeights;

/// Default margin `m` in the heat parameter schedule `t = eps^(1/2 + m)`.
pub const DEFAULT_EXPONENT_MARGIN: f64 = 0.5;

/// Stiffness and mass matrices of the discrete operator.
#[derive(Debug, Clone)]
pub struct LboPair<T = f64> {
    /// Symmetric stiffness matrix with zero row sums.
    pub q: SparseMatrix<T>,
    /// Diagonal of the mass matrix.
    pub b: Vec<T>,
    /// Heat parameter.
    pub t: T,
    /// Neighbourhood radius used for truncation.
    pub delta: T,
}

impl<T: Real> LboPair<T> {
    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    /// Writes `Q` and `B` (as a diagonal sparse matrix) in Matrix Market format.
    pub fn write_matrix_market<W1: Write, W2: Write>(&self, q: W1, b: W2) -> std::io::Result<()> {
        self.q.write_matrix_market(q)?;
        let diag = SparseMatrix::from_triplets(
            self.len(),
            self.len(),
            self.b.iter().enumerate().map(|(i, &v)| (i, i, v)).collect(),
        )
        .expect("diagonal indices in range");
        diag.write_matrix_market(b)
    }
}

/// Heat parameter `t = epsilon^(1/2 + exponent_margin)`.
pub fn default_t<T: Real>(epsilon: T, exponent_margin: T) -> Result<T> {
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if !(exponent_margin > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "exponent margin must be positive, got {exponent_margin}"
        )));
    }
    Ok(epsilon.powf(T::lit(0.5) + exponent_margin))
}

/// Assembles `Q` and `B` from area weights.
pub fn assemble_lbo<T: Real>(
    cloud: &PointCloud<T>,
    index: &NeighborIndex<T>,
    weights: &AreaWeights<T>,
    t: T,
    delta: T,
) -> Result<LboPair<T>> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "t must be positive, got {t}"
        )));
    }
    if !(delta > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let n = cloud.len();
    if weights.areas.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: weights.areas.len(),
        });
    }
    if let Some(i) = weights
        .areas
        .iter()
        .position(|a| !a.is_finite() || *a <= T::zero())
    {
        return Err(Error::NonPositiveMass { index: i });
    }

    let areas = &weights.areas;
    let prefactor = T::one() / (T::lit(4.0) * T::PI() * t * t);
    let inv_4t = T::one() / (T::lit(4.0) * t);
    let pts = cloud.points();
    let mut triplets = Vec::new();
    let mut diag = vec![T::zero(); n];
    for i in 0..n {
        for j in index.radius_query(pts[i], delta) {
            // Each unordered pair once, mirrored.
            if j <= i {
                continue;
            }
            let w = areas[i] * areas[j] * prefactor * (-dist2(pts[i], pts[j]) * inv_4t).exp();
            triplets.push((i, j, w));
            triplets.push((j, i, w));
            diag[i] = diag[i] - w;
            diag[j] = diag[j] - w;
        }
    }
    triplets.extend(diag.into_iter().enumerate().map(|(i, d)| (i, i, d)));
    let q = SparseMatrix::from_triplets(n, n, triplets)?;
    Ok(LboPair {
        q,
        b: areas.clone(),
        t,
        delta,
    })
}

/// Applies `L f = B^-1 Q f`.
pub fn apply_lbo<T: Real>(pair: &LboPair<T>, f: &[T]) -> Result<Vec<T>> {
    let qf = pair.q.mul_vec(f)?;
    Ok(qf.into_iter().zip(&pair.b).map(|(x, &b)| x / b).collect())
}

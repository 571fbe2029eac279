//! Stages shared by the commands: load, downsample, sample, assemble, solve.

use std::time::Instant;

use fracharm_core::{
    all_area_weights_clipped, assemble_lbo, build_index, decompose_fourier_matrix_with_limit,
    default_t, downsample, estimate_epsilon, manifold_fourier_matrix, parse_ply,
    solve_harmonic_basis_with_limit, Error, FractionalOperator, HarmonicBasis, LboPair,
    NeighborIndex, PointCloud,
};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::PipelineArgs;
use crate::error::CliError;

/// A loaded cloud with its resolved sampling parameters.
pub struct Prepared {
    pub cloud: PointCloud,
    /// Point count before downsampling.
    pub input_points: usize,
    pub input_sha256: String,
    pub index: NeighborIndex,
    pub epsilon: f64,
    pub epsilon_estimated: bool,
    pub r: f64,
    pub delta: f64,
    pub clip: f64,
    pub t: f64,
    pub dense_limit: usize,
}

pub struct Spectral {
    pub pair: LboPair,
    pub basis: HarmonicBasis,
}

fn timed<R>(stage: &str, f: impl FnOnce() -> R) -> R {
    let start = Instant::now();
    let r = f();
    log::info!("{stage}: {:.3} s", start.elapsed().as_secs_f64());
    r
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl Prepared {
    pub fn load(args: &PipelineArgs) -> Result<Self, CliError> {
        let bytes = std::fs::read(&args.input).map_err(|source| CliError::Stage {
            stage: "read",
            source: Error::Io {
                path: args.input.clone(),
                source,
            },
        })?;
        let input_sha256 = hex(&Sha256::digest(&bytes));
        let raw = timed("read", || parse_ply(&bytes)).map_err(CliError::stage("read"))?;
        let input_points = raw.len();
        let cloud = match args.target_points {
            Some(n) => timed("downsample", || downsample(&raw, n, args.seed))
                .map_err(CliError::stage("downsample"))?,
            None => raw,
        };
        let index = build_index(&cloud);
        let (epsilon, epsilon_estimated) = match args.epsilon {
            Some(e) => (e, false),
            None => {
                let est = estimate_epsilon(&index).map_err(CliError::stage("sampling"))?;
                (est.epsilon, true)
            }
        };
        let t = match args.t {
            Some(t) => t,
            None => {
                default_t(epsilon, args.t_exponent).map_err(CliError::stage("heat parameter"))?
            }
        };
        let delta = args.delta_scale * epsilon;
        Ok(Prepared {
            cloud,
            input_points,
            input_sha256,
            index,
            epsilon,
            epsilon_estimated,
            r: args.r_scale * epsilon,
            delta,
            clip: args.clip_scale * delta,
            t,
            dense_limit: args.dense_limit,
        })
    }

    pub fn len(&self) -> usize {
        self.cloud.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }

    pub fn feasible(&self) -> bool {
        self.len() <= self.dense_limit
    }

    pub fn resolved(&self) -> Value {
        json!({
            "N": self.len(),
            "epsilon": self.epsilon,
            "epsilon_estimated": self.epsilon_estimated,
            "r": self.r,
            "delta": self.delta,
            "clip": self.clip,
            "t": self.t,
        })
    }

    pub fn spectral(&self) -> Result<Spectral, CliError> {
        let weights = timed("area weights", || {
            all_area_weights_clipped(&self.cloud, &self.index, self.r, self.delta, self.clip)
        })
        .map_err(CliError::stage("area weights"))?;
        let pair = timed("operator assembly", || {
            assemble_lbo(&self.cloud, &self.index, &weights, self.t, self.delta)
        })
        .map_err(CliError::stage("operator assembly"))?;
        let basis = timed("eigensolve", || {
            solve_harmonic_basis_with_limit(&pair, self.dense_limit)
        })
        .map_err(CliError::stage("eigensolve"))?;
        Ok(Spectral { pair, basis })
    }

    /// Signals named by `names`: coordinates `x`, `y`, `z` or scalar attributes.
    pub fn channels(&self, names: &[String]) -> Result<Vec<Vec<f64>>, CliError> {
        names
            .iter()
            .map(|name| match name.as_str() {
                "x" => Ok(self.cloud.coordinate(0)),
                "y" => Ok(self.cloud.coordinate(1)),
                "z" => Ok(self.cloud.coordinate(2)),
                other => self.cloud.scalars().get(other).cloned().ok_or_else(|| {
                    let known: Vec<&str> = ["x", "y", "z"]
                        .into_iter()
                        .chain(self.cloud.scalars().keys().map(String::as_str))
                        .collect();
                    CliError::Config(format!(
                        "unknown channel `{other}`; available: {}",
                        known.join(", ")
                    ))
                }),
            })
            .collect()
    }

    /// The cloud with the named channels replaced by `values`.
    pub fn with_channels(
        &self,
        names: &[String],
        values: &[Vec<f64>],
    ) -> Result<PointCloud, CliError> {
        let mut coords = self.cloud.coordinate_channels();
        let mut scalars = Vec::new();
        for (name, v) in names.iter().zip(values) {
            match name.as_str() {
                "x" => coords[0] = v.clone(),
                "y" => coords[1] = v.clone(),
                "z" => coords[2] = v.clone(),
                other => scalars.push((other.to_string(), v.clone())),
            }
        }
        let mut cloud = self
            .cloud
            .with_coordinate_channels(&coords)
            .map_err(CliError::stage("filtered output"))?;
        for (name, v) in scalars {
            cloud = cloud
                .with_scalar(name, v)
                .map_err(CliError::stage("filtered output"))?;
        }
        Ok(cloud)
    }
}

impl Spectral {
    pub fn operator(&self, cond_limit: f64) -> Result<FractionalOperator, CliError> {
        let fm = manifold_fourier_matrix(&self.basis);
        timed("fractional decomposition", || {
            decompose_fourier_matrix_with_limit(&fm, cond_limit)
        })
        .map_err(CliError::stage("fractional decomposition"))
    }

    pub fn summary(&self) -> Value {
        let l = &self.basis.lambdas;
        json!({
            "basis_id": format!("{:016x}", self.basis.id().0),
            "orthonormality_error": self.basis.orthonormality_error(),
            "lambda_min": l.first(),
            "lambda_max": l.last(),
            "q_nonzeros": self.pair.q.nnz(),
        })
    }
}

pub fn operator_summary(op: &FractionalOperator) -> Value {
    json!({
        "cond_p": op.cond_p(),
        "reconstruction_error": op.reconstruction_error(),
    })
}

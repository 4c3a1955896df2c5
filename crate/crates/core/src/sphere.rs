//! Quadrature and seeded sampling over the sphere of measurement directions.
//!
//! Integrals use the measure `dΩ = sinθ dθ dφ`. The product grid places
//! Gauss–Legendre nodes in `cosθ` and equally spaced nodes in `φ`, so an
//! `(n_polar, n_azimuthal)` grid integrates spherical polynomials up to degree
//! `min(2·n_polar − 1, n_azimuthal − 1)` exactly.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qm::Direction;

pub const DEFAULT_POLAR: usize = 8;
pub const DEFAULT_AZIMUTHAL: usize = 16;

/// Samples generated per ChaCha stream.
pub const BLOCK_SIZE: u64 = 1 << 16;

/// Recorded in report metadata so runs can be reproduced elsewhere.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9); one stream per 65536-sample block; splitmix64-derived substream seeds";

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's estimate of the i-th largest root, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridNode {
    pub direction: Direction,
    /// Steradians.
    pub weight: f64,
}

/// Immutable product quadrature rule on the unit sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalGrid {
    n_polar: usize,
    n_azimuthal: usize,
    nodes: Vec<GridNode>,
}

impl SphericalGrid {
    pub fn n_polar(&self) -> usize {
        self.n_polar
    }

    pub fn n_azimuthal(&self) -> usize {
        self.n_azimuthal
    }

    /// Polar-major order: all azimuths of the first `cosθ` node, then the next.
    pub fn nodes(&self) -> &[GridNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// Highest total degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        (2 * self.n_polar - 1).min(self.n_azimuthal - 1)
    }
}

impl Default for SphericalGrid {
    fn default() -> Self {
        product_gauss_grid(DEFAULT_POLAR, DEFAULT_AZIMUTHAL).expect("default grid is valid")
    }
}

/// Gauss–Legendre in `cosθ` × trapezoid in `φ`.
pub fn product_gauss_grid(n_polar: usize, n_azimuthal: usize) -> Result<SphericalGrid> {
    if n_polar < 2 {
        return Err(Error::InvalidArgument(format!(
            "n_polar must be at least 2, got {n_polar}"
        )));
    }
    if n_azimuthal < 5 {
        return Err(Error::InvalidArgument(format!(
            "n_azimuthal must be at least 5, got {n_azimuthal}"
        )));
    }
    let (xs, ws) = gauss_legendre(n_polar);
    let dphi = TAU / n_azimuthal as f64;
    let mut nodes = Vec::with_capacity(n_polar * n_azimuthal);
    for (x, w) in xs.iter().zip(&ws) {
        let theta = x.clamp(-1.0, 1.0).acos();
        for j in 0..n_azimuthal {
            let direction = Direction::new(theta, j as f64 * dphi)?;
            nodes.push(GridNode {
                direction,
                weight: w * dphi,
            });
        }
    }
    Ok(SphericalGrid {
        n_polar,
        n_azimuthal,
        nodes,
    })
}

/// Weighted sum of per-node values, reduced in node order.
pub fn integrate_values(grid: &SphericalGrid, values: &[f64]) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "{} values supplied for {} grid nodes",
            values.len(),
            grid.len()
        )));
    }
    let mut sum = 0.0;
    for (i, (node, v)) in grid.nodes.iter().zip(values).enumerate() {
        if !v.is_finite() {
            return Err(Error::NumericFailure {
                value: *v,
                location: format!(
                    "grid node {i} (theta={}, phi={})",
                    node.direction.theta(),
                    node.direction.phi()
                ),
            });
        }
        sum += node.weight * v;
    }
    Ok(sum)
}

/// `Σ weight·f(node)`. Nodes are evaluated in parallel; the sum is taken in
/// node order, so the result does not depend on the worker count.
pub fn integrate<F>(f: F, grid: &SphericalGrid) -> Result<f64>
where
    F: Fn(&Direction) -> f64 + Sync,
{
    let values: Vec<f64> = grid.nodes.par_iter().map(|n| f(&n.direction)).collect();
    integrate_values(grid, &values)
}

/// Entry `(α, β)` is `∫ c^α c^β dΩ`.
pub fn orthogonality_table(grid: &SphericalGrid) -> Result<[[f64; 3]; 3]> {
    let mut table = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            table[a][b] = integrate(
                |n| {
                    let c = n.cartesian();
                    c[a] * c[b]
                },
                grid,
            )?;
        }
    }
    Ok(table)
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A reproducible stream of uniformly distributed directions.
///
/// Sample `i` lives in block `i / BLOCK_SIZE`, drawn from the ChaCha stream
/// with that block index, so the sequence is fixed by `(seed, count)` and a
/// longer stream extends a shorter one with the same seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleStream {
    seed: u64,
    count: u64,
}

impl SampleStream {
    pub fn new(seed: u64, count: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument(
                "sample count must be positive".into(),
            ));
        }
        Ok(Self { seed, count })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn with_count(&self, count: u64) -> Result<Self> {
        Self::new(self.seed, count)
    }

    /// Independent stream for worker or task `index`.
    pub fn substream(&self, index: u64) -> Self {
        Self {
            seed: splitmix64(self.seed ^ splitmix64(index.wrapping_add(1))),
            count: self.count,
        }
    }

    fn block_count(&self) -> u64 {
        self.count.div_ceil(BLOCK_SIZE)
    }

    /// `(cosθ, φ)` pairs of one block.
    fn block_pairs(&self, block: u64) -> Vec<(f64, f64)> {
        let start = block * BLOCK_SIZE;
        let len = (self.count - start).min(BLOCK_SIZE) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(block);
        (0..len)
            .map(|_| {
                let u = 2.0 * rng.random::<f64>() - 1.0;
                let mut phi = TAU * rng.random::<f64>();
                if phi >= TAU {
                    phi -= TAU;
                }
                (u, phi)
            })
            .collect()
    }

    /// Applies `f` to the unit vectors of each block in parallel and returns
    /// the per-block results in block order.
    pub fn map_blocks<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&[[f64; 3]]) -> T + Sync,
    {
        (0..self.block_count())
            .into_par_iter()
            .map(|b| {
                let vectors: Vec<[f64; 3]> = self
                    .block_pairs(b)
                    .into_iter()
                    .map(|(u, phi)| unit_vector(u, phi))
                    .collect();
                f(&vectors)
            })
            .collect()
    }

    pub fn unit_vectors(&self) -> Vec<[f64; 3]> {
        self.map_blocks(|v| v.to_vec()).concat()
    }
}

fn unit_vector(u: f64, phi: f64) -> [f64; 3] {
    let s = (1.0 - u * u).max(0.0).sqrt();
    let (sp, cp) = phi.sin_cos();
    [s * cp, s * sp, u]
}

/// Uniform directions: `cosθ` uniform on `[-1, 1]`, `φ` uniform on `[0, 2π)`.
pub fn sample_directions(stream: &SampleStream) -> Vec<Direction> {
    (0..stream.block_count())
        .into_par_iter()
        .map(|b| {
            stream
                .block_pairs(b)
                .into_iter()
                .map(|(u, phi)| Direction::new(u.clamp(-1.0, 1.0).acos(), phi))
                .collect::<Result<Vec<_>>>()
                .expect("sampled angles are in range")
        })
        .collect::<Vec<_>>()
        .concat()
}

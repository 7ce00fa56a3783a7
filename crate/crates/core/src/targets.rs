//! Benchmark target states.
//!
//! A target is a real function sampled on a regular grid and normalized to a
//! unit vector. Basis index `i` of an `n`-qubit register is read as the binary
//! fraction `0.b1 b2 ... bn`, with qubit 0 holding the most significant bit, so
//! the grid over `[lo, hi)` never contains `hi`.
//!
//! Amplitudes are the (signed) function values themselves, not their square
//! roots. For 2D grids the first half of the qubits indexes the x axis and the
//! second half the y axis (row-major flattening).

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense real state vector over `n_qubits` qubits, qubit 0 most significant.
///
/// Builders in this crate always return unit-norm vectors; the one exception
/// is contraction of a truncated MPS, which may be sub-normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<f64>,
}

impl Statevector {
    pub fn new(n_qubits: usize, amplitudes: Vec<f64>) -> Result<Self> {
        let expected = 1usize << n_qubits;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Scale `raw` to unit norm.
    pub fn normalized(n_qubits: usize, raw: Vec<f64>) -> Result<Self> {
        let mut sv = Self::new(n_qubits, raw)?;
        let norm = sv.norm();
        if norm == 0.0 {
            return Err(Error::DegenerateTarget);
        }
        sv.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(sv)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![0.0; 1 << n_qubits];
        amplitudes[index] = 1.0;
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [f64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<f64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Regular grid over `[lo, hi)` (per axis for 2D).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_qubits: usize,
    pub lo: f64,
    pub hi: f64,
    pub dims: usize,
}

impl GridSpec {
    pub fn line(n_qubits: usize, lo: f64, hi: f64) -> Self {
        Self {
            n_qubits,
            lo,
            hi,
            dims: 1,
        }
    }

    pub fn square(n_qubits: usize, lo: f64, hi: f64) -> Self {
        Self {
            n_qubits,
            lo,
            hi,
            dims: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::InvalidGrid("n_qubits must be positive".into()));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::InvalidGrid(format!(
                "interval [{}, {}) is empty or not finite",
                self.lo, self.hi
            )));
        }
        match self.dims {
            1 => Ok(()),
            2 if self.n_qubits.is_multiple_of(2) => Ok(()),
            2 => Err(Error::InvalidGrid(format!(
                "2D grid needs an even qubit count, got {}",
                self.n_qubits
            ))),
            d => Err(Error::InvalidGrid(format!("dims must be 1 or 2, got {d}"))),
        }
    }

    fn axis(&self, bits: usize) -> Vec<f64> {
        let count = 1usize << bits;
        let step = (self.hi - self.lo) / count as f64;
        (0..count).map(|i| self.lo + step * i as f64).collect()
    }
}

/// Coordinates of every basis index, in basis order.
#[derive(Clone, Debug, PartialEq)]
pub enum GridPoints {
    Line(Vec<f64>),
    Square(Vec<(f64, f64)>),
}

impl GridPoints {
    pub fn len(&self) -> usize {
        match self {
            GridPoints::Line(p) => p.len(),
            GridPoints::Square(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn grid_points(spec: &GridSpec) -> Result<GridPoints> {
    spec.validate()?;
    if spec.dims == 1 {
        return Ok(GridPoints::Line(spec.axis(spec.n_qubits)));
    }
    let half = spec.n_qubits / 2;
    let axis = spec.axis(half);
    let mut pts = Vec::with_capacity(1 << spec.n_qubits);
    for &x in &axis {
        for &y in &axis {
            pts.push((x, y));
        }
    }
    Ok(GridPoints::Square(pts))
}

/// The five benchmark families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Normal1d { mu: f64, sigma: f64 },
    Normal2d { mu: [f64; 2], cov: [[f64; 2]; 2] },
    Ricker1d { sigma: f64 },
    Ricker2d { sigma: f64 },
    Sparse { d: usize, seed: u64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Normal1d { .. } => "normal1d",
            Family::Normal2d { .. } => "normal2d",
            Family::Ricker1d { .. } => "ricker1d",
            Family::Ricker2d { .. } => "ricker2d",
            Family::Sparse { .. } => "sparse",
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Family::Sparse { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    #[serde(flatten)]
    pub family: Family,
    pub grid: GridSpec,
}

impl TargetSpec {
    /// 1D normal density on `[0, 1)`.
    pub fn normal1d(n_qubits: usize, mu: f64, sigma: f64) -> Self {
        Self {
            family: Family::Normal1d { mu, sigma },
            grid: GridSpec::line(n_qubits, 0.0, 1.0),
        }
    }

    /// 2D normal density on `[0, 1)²` with covariance `cov`.
    pub fn normal2d(n_qubits: usize, mu: [f64; 2], cov: [[f64; 2]; 2]) -> Self {
        Self {
            family: Family::Normal2d { mu, cov },
            grid: GridSpec::square(n_qubits, 0.0, 1.0),
        }
    }

    /// The 2D normal used throughout the benchmark tables.
    pub fn normal2d_benchmark(n_qubits: usize) -> Self {
        Self::normal2d(n_qubits, [0.5, 0.5], [[0.1, 0.01], [0.01, 0.1]])
    }

    /// 1D Ricker wavelet on `[-1, 1)`.
    pub fn ricker1d(n_qubits: usize, sigma: f64) -> Self {
        Self {
            family: Family::Ricker1d { sigma },
            grid: GridSpec::line(n_qubits, -1.0, 1.0),
        }
    }

    /// 2D Ricker wavelet on `[-1, 1)²`.
    pub fn ricker2d(n_qubits: usize, sigma: f64) -> Self {
        Self {
            family: Family::Ricker2d { sigma },
            grid: GridSpec::square(n_qubits, -1.0, 1.0),
        }
    }

    pub fn sparse(n_qubits: usize, d: usize, seed: u64) -> Self {
        Self {
            family: Family::Sparse { d, seed },
            grid: GridSpec::line(n_qubits, 0.0, 1.0),
        }
    }

    /// `family` on its benchmark grid: `[0, 1)` for normals and sparse
    /// states, `[-1, 1)` for wavelets, square for the 2D families.
    pub fn with_default_grid(family: Family, n_qubits: usize) -> Self {
        let grid = match family {
            Family::Normal1d { .. } | Family::Sparse { .. } => GridSpec::line(n_qubits, 0.0, 1.0),
            Family::Normal2d { .. } => GridSpec::square(n_qubits, 0.0, 1.0),
            Family::Ricker1d { .. } => GridSpec::line(n_qubits, -1.0, 1.0),
            Family::Ricker2d { .. } => GridSpec::square(n_qubits, -1.0, 1.0),
        };
        Self { family, grid }
    }

    pub fn n_qubits(&self) -> usize {
        self.grid.n_qubits
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        let bad = |msg: String| Err(Error::InvalidTarget(msg));
        match &self.family {
            Family::Normal1d { sigma, .. }
            | Family::Ricker1d { sigma }
            | Family::Ricker2d { sigma } => {
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return bad(format!("sigma must be positive, got {sigma}"));
                }
            }
            Family::Normal2d { cov, .. } => {
                let [[a, b], [c, d]] = *cov;
                if (b - c).abs() > 1e-12 {
                    return bad("covariance must be symmetric".into());
                }
                if !(a > 0.0 && a * d - b * c > 0.0) {
                    return bad("covariance must be positive definite".into());
                }
            }
            Family::Sparse { d, .. } => {
                let dim = 1usize << self.grid.n_qubits;
                if *d < 1 || *d > dim {
                    return bad(format!("sparsity d must lie in 1..={dim}, got {d}"));
                }
            }
        }
        let needs_2d = matches!(self.family, Family::Normal2d { .. } | Family::Ricker2d { .. });
        if needs_2d != (self.grid.dims == 2) {
            return bad(format!(
                "{} requires a {}D grid",
                self.family.name(),
                if needs_2d { 2 } else { 1 }
            ));
        }
        Ok(())
    }
}

/// Sample the target function on its grid and normalize.
pub fn build_target(spec: &TargetSpec) -> Result<Statevector> {
    spec.validate()?;
    let n = spec.grid.n_qubits;
    let raw = match &spec.family {
        Family::Normal1d { mu, sigma } => line(spec, |x| {
            let z = (x - mu) / sigma;
            (-0.5 * z * z).exp()
        })?,
        Family::Ricker1d { sigma } => line(spec, |t| {
            let z2 = (t / sigma).powi(2);
            (1.0 - z2) * (-0.5 * z2).exp()
        })?,
        Family::Normal2d { mu, cov } => {
            let [[a, b], [_, d]] = *cov;
            let det = a * d - b * b;
            let (ia, ib, id) = (d / det, -b / det, a / det);
            square(spec, |x, y| {
                let (dx, dy) = (x - mu[0], y - mu[1]);
                let q = ia * dx * dx + 2.0 * ib * dx * dy + id * dy * dy;
                (-0.5 * q).exp()
            })?
        }
        Family::Ricker2d { sigma } => square(spec, |x, y| {
            let r2 = (x * x + y * y) / (sigma * sigma);
            (1.0 - 0.5 * r2) * (-0.5 * r2).exp()
        })?,
        Family::Sparse { d, seed } => sparse_amplitudes(n, *d, *seed),
    };
    Statevector::normalized(n, raw)
}

fn line(spec: &TargetSpec, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    match grid_points(&spec.grid)? {
        GridPoints::Line(xs) => Ok(xs.into_iter().map(f).collect()),
        GridPoints::Square(_) => unreachable!("validated as 1D"),
    }
}

fn square(spec: &TargetSpec, f: impl Fn(f64, f64) -> f64) -> Result<Vec<f64>> {
    match grid_points(&spec.grid)? {
        GridPoints::Square(pts) => Ok(pts.into_iter().map(|(x, y)| f(x, y)).collect()),
        GridPoints::Line(_) => unreachable!("validated as 2D"),
    }
}

/// `d` distinct indices with values uniform on `[-1, -0.1] ∪ [0.1, 1]`.
fn sparse_amplitudes(n: usize, d: usize, seed: u64) -> Vec<f64> {
    let dim = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps = vec![0.0; dim];
    let mut picked = sample(&mut rng, dim, d).into_vec();
    picked.sort_unstable();
    for idx in picked {
        let magnitude = rng.random_range(0.1..=1.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        amps[idx] = sign * magnitude;
    }
    amps
}

/// Plot-ready text: `x psi` for 1D grids, `x y psi` for 2D grids and
/// `index psi` for sparse states.
pub fn export_target(spec: &TargetSpec, state: &Statevector) -> Result<String> {
    export_states(spec, &[("psi", state)])
}

/// Like [`export_target`] with one amplitude column per named state.
pub fn export_states(spec: &TargetSpec, columns: &[(&str, &Statevector)]) -> Result<String> {
    let dim = 1usize << spec.n_qubits();
    for (_, s) in columns {
        if s.amplitudes().len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: s.amplitudes().len(),
            });
        }
    }
    let (mut out, coords): (String, Vec<String>) = match grid_points(&spec.grid)? {
        _ if spec.family.is_sparse() => ("index".into(), (0..dim).map(|i| i.to_string()).collect()),
        GridPoints::Line(xs) => ("x".into(), xs.iter().map(|x| x.to_string()).collect()),
        GridPoints::Square(pts) => ("x y".into(), pts.iter().map(|(x, y)| format!("{x} {y}")).collect()),
    };
    for (name, _) in columns {
        out.push(' ');
        out.push_str(name);
    }
    out.push('\n');
    for (i, c) in coords.iter().enumerate() {
        out.push_str(c);
        for (_, s) in columns {
            out.push_str(&format!(" {:e}", s.amplitudes()[i]));
        }
        out.push('\n');
    }
    Ok(out)
}

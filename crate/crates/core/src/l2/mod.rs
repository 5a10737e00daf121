//! Operators on `l^2` that act on finitely many basis coordinates, and the three
//! projection families used to separate the operator topologies.
//!
//! Coordinates are named by basis index. `Example3` lives on `e_0, e_1`, the
//! others on `e_1, e_2, ...`.

pub mod examples;
pub mod squeeze;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{eig_sym, HermitianMatrix, Matrix, NumericsError};

pub use examples::{example3_contradiction, example5_lower_bound_check, ContradictionCheck, LowerBoundCheck};
pub use squeeze::{squeeze_sot_check, vigier_check, SqueezeFamily};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum L2Error {
    #[error("family index must be at least 1 (got {0})")]
    IndexOutOfDomain(usize),
    #[error("parameter {name} = {value} is outside {domain}")]
    ParameterOutOfDomain { name: &'static str, value: f64, domain: &'static str },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A finitely supported vector in `l^2`. Explicit zeros may be stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVector {
    entries: BTreeMap<usize, Complex64>,
}

impl SparseVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(k: usize) -> Self {
        Self::from_pairs([(k, Complex64::new(1.0, 0.0))])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Complex64)>) -> Self {
        let mut entries = BTreeMap::new();
        for (k, v) in pairs {
            *entries.entry(k).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        Self { entries }
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.entries.get(&k).copied().unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    /// Largest stored coordinate, if any.
    pub fn max_coordinate(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    pub fn norm(&self) -> f64 {
        self.entries.values().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(self, other)`, summed over the common support.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.entries.iter().filter_map(|(k, a)| other.entries.get(k).map(|b| a * b.conj())).sum()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, &v) in &other.entries {
            *out.entries.entry(k).or_insert(Complex64::new(0.0, 0.0)) -= v;
        }
        out
    }
}

/// `block` acting on the listed coordinates, zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator {
    coords: Vec<usize>,
    block: Matrix,
}

impl BlockOperator {
    pub fn new(coords: Vec<usize>, block: Matrix) -> Self {
        assert_eq!(coords.len(), block.dim(), "one coordinate per block row");
        Self { coords, block }
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn block(&self) -> &Matrix {
        &self.block
    }

    pub fn apply(&self, x: &SparseVector) -> SparseVector {
        let local: Vec<Complex64> = self.coords.iter().map(|&k| x.get(k)).collect();
        let y = self.block.mul_vec(&local);
        SparseVector::from_pairs(self.coords.iter().copied().zip(y))
    }

    /// This operator as a matrix on `coords`, which must contain its own coordinates.
    pub fn embed(&self, coords: &[usize]) -> Matrix {
        let pos: Vec<usize> = self
            .coords
            .iter()
            .map(|k| coords.iter().position(|c| c == k).expect("coordinate present in joint support"))
            .collect();
        let mut m = Matrix::zeros(coords.len());
        for (i, &pi) in pos.iter().enumerate() {
            for (j, &pj) in pos.iter().enumerate() {
                m[(pi, pj)] = self.block[(i, j)];
            }
        }
        m
    }
}

/// Sorted union of the coordinates of two operators.
pub fn joint_coords(a: &BlockOperator, b: &BlockOperator) -> Vec<usize> {
    let mut c: Vec<usize> = a.coords.iter().chain(&b.coords).copied().collect();
    c.sort_unstable();
    c.dedup();
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorFamily {
    /// `P_n` projects onto `(cos 1/n, sin 1/n, 0, ...)`; `P_0` onto `e_0`. Converges in norm.
    Example3,
    /// `P_n` projects onto `(e_1 + e_n) / sqrt 2`; `P_0 = e_1 e_1* / 2`. Converges weakly, not strongly.
    Example4,
    /// The `Example3` rotation moved to `e_1, e_2`; `P_0 = e_1 e_1*`.
    Example5,
}

impl OperatorFamily {
    pub const ALL: [OperatorFamily; 3] = [Self::Example3, Self::Example4, Self::Example5];

    pub fn name(self) -> &'static str {
        match self {
            Self::Example3 => "example3",
            Self::Example4 => "example4",
            Self::Example5 => "example5",
        }
    }

    pub fn limit_label(self) -> &'static str {
        match self {
            Self::Example3 => "P0 = projection onto e0",
            Self::Example4 => "P0 = (1/2) e1 e1*",
            Self::Example5 => "P0 = projection onto e1",
        }
    }

    /// `P_n` for `n >= 1`.
    pub fn operator(self, n: usize) -> Result<BlockOperator, L2Error> {
        if n == 0 {
            return Err(L2Error::IndexOutOfDomain(n));
        }
        Ok(match self {
            Self::Example3 => BlockOperator::new(vec![0, 1], rotated_rank_one(1.0 / n as f64)),
            Self::Example5 => BlockOperator::new(vec![1, 2], rotated_rank_one(1.0 / n as f64)),
            // (e_1 + e_1)/|.| = e_1, so P_1 is the projection onto e_1
            Self::Example4 if n == 1 => BlockOperator::new(vec![1], Matrix::identity(1)),
            Self::Example4 => {
                BlockOperator::new(vec![1, n], Matrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).expect("square"))
            }
        })
    }

    pub fn limit(self) -> BlockOperator {
        match self {
            Self::Example3 => BlockOperator::new(vec![0], Matrix::identity(1)),
            Self::Example4 => BlockOperator::new(vec![1], Matrix::from_diagonal(&[0.5])),
            Self::Example5 => BlockOperator::new(vec![1], Matrix::identity(1)),
        }
    }

    pub fn apply(self, n: usize, x: &SparseVector) -> Result<SparseVector, L2Error> {
        Ok(self.operator(n)?.apply(x))
    }

    pub fn limit_apply(self, x: &SparseVector) -> SparseVector {
        self.limit().apply(x)
    }
}

impl std::str::FromStr for OperatorFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "3" | "example3" => Ok(Self::Example3),
            "4" | "example4" => Ok(Self::Example4),
            "5" | "example5" => Ok(Self::Example5),
            other => Err(format!("unknown family `{other}` (expected 3, 4 or 5)")),
        }
    }
}

/// `[[cos^2 t, sin t cos t], [sin t cos t, sin^2 t]]`.
pub fn rotated_rank_one(theta: f64) -> Matrix {
    let (s, c) = theta.sin_cos();
    Matrix::from_real_rows(&[&[c * c, s * c], &[s * c, s * s]]).expect("square")
}

/// `|(P_n x, y) - (P_0 x, y)|`.
pub fn wot_residual(fam: OperatorFamily, n: usize, x: &SparseVector, y: &SparseVector) -> Result<f64, L2Error> {
    let pn = fam.apply(n, x)?.inner(y);
    let p0 = fam.limit_apply(x).inner(y);
    Ok((pn - p0).norm())
}

/// `||P_n x - P_0 x||`.
pub fn sot_residual(fam: OperatorFamily, n: usize, x: &SparseVector) -> Result<f64, L2Error> {
    Ok(fam.apply(n, x)?.sub(&fam.limit_apply(x)).norm())
}

/// `||P_n - P_0||`, the spectral radius of the difference on the joint block.
pub fn norm_distance(fam: OperatorFamily, n: usize) -> Result<f64, L2Error> {
    let pn = fam.operator(n)?;
    let p0 = fam.limit();
    let coords = joint_coords(&pn, &p0);
    let diff = HermitianMatrix::hermitized(&pn.embed(&coords) - &p0.embed(&coords));
    let eig = eig_sym(&diff)?;
    Ok(eig.min().abs().max(eig.max().abs()))
}

pub const CORPUS_MAX_COORDINATE: usize = 8;
pub const CORPUS_RANDOM_VECTORS: usize = 16;

/// Basis vectors `e_0 ... e_8` followed by 16 seeded random vectors supported in `0..=8`.
pub fn test_vectors(seed: u64) -> Vec<SparseVector> {
    let mut out: Vec<SparseVector> = (0..=CORPUS_MAX_COORDINATE).map(SparseVector::basis).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..CORPUS_RANDOM_VECTORS {
        let terms = rng.gen_range(1..=4);
        let pairs: Vec<(usize, Complex64)> = (0..terms)
            .map(|_| {
                let k = rng.gen_range(0..=CORPUS_MAX_COORDINATE);
                (k, crate::numerics::random::complex(&mut rng))
            })
            .collect();
        out.push(SparseVector::from_pairs(pairs));
    }
    out
}

//! Seeded random matrices for property checks.

use num_complex::Complex64;
use rand::Rng;

use super::{inner, Effect, HermitianMatrix, Matrix, Projection};

pub fn complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    (0..dim).map(|_| complex(rng)).collect()
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    loop {
        let v = vector(rng, dim);
        let n = super::norm(&v);
        if n > 1e-3 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Columns from Gram-Schmidt on random vectors.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v = vector(rng, dim);
        for c in &cols {
            let proj = inner(&v, c);
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= proj * ci;
            }
        }
        let n = super::norm(&v);
        if n > 1e-6 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    let mut u = Matrix::zeros(dim);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..dim {
            u[(i, j)] = c[i];
        }
    }
    u
}

/// `U diag(values) U*`.
pub fn with_spectrum(u: &Matrix, values: &[f64]) -> HermitianMatrix {
    let d = Matrix::from_diagonal(values);
    HermitianMatrix::hermitized(&(u * &d) * &u.adjoint())
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianMatrix {
    let mut m = Matrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = complex(rng);
        }
    }
    HermitianMatrix::hermitized(m)
}

/// Spectrum uniform in `[0, 1]`, eigenbasis random.
pub fn effect<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Effect {
    let u = unitary(rng, dim);
    let values: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..=1.0)).collect();
    Effect::trusted(with_spectrum(&u, &values))
}

/// Rank drawn uniformly from `0..=dim`.
pub fn projection<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Projection {
    let rank = rng.gen_range(0..=dim);
    projection_of_rank(rng, dim, rank)
}

pub fn projection_of_rank<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Projection {
    let u = unitary(rng, dim);
    let values: Vec<f64> = (0..dim).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    Projection::trusted(with_spectrum(&u, &values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in 1..8 {
            let u = unitary(&mut rng, dim);
            let err = (&(&u.adjoint() * &u) - &Matrix::identity(dim)).frobenius_norm();
            assert!(err < 1e-12, "dim {dim}: {err}");
        }
    }

    #[test]
    fn projections_are_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let tol = super::super::Tolerances::default();
        for _ in 0..20 {
            let p = projection(&mut rng, 5);
            assert!(super::super::is_projection(p.as_effect(), &tol));
        }
    }
}

//! Dense complex linear algebra used by the operator modules.

use nalgebra::DMatrix;

use crate::fourier::{C64, I};

pub type CMatrix = DMatrix<C64>;

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// `sigma_max / sigma_min`; infinite for singular input.
pub fn condition_number(m: &CMatrix) -> f64 {
    let s = singular_values(m);
    let hi = s.iter().copied().fold(0.0, f64::max);
    let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Solves `X M = rhs` for `X` through the transposed LU system.
pub fn right_solve(m: &CMatrix, rhs: &CMatrix) -> Option<CMatrix> {
    let mt = m.transpose();
    mt.lu().solve(&rhs.transpose()).map(|x| x.transpose())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn hermitian_min_eigenvalue(m: &CMatrix) -> f64 {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    sym.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Orthonormal basis of the column span (thin QR).
pub fn orthonormal_basis(m: &CMatrix) -> CMatrix {
    m.clone().qr().q()
}

/// Sine of the largest principal angle between two column spans of equal
/// dimension: `||(I - Q_a Q_a^*) Q_b||_2`.
pub fn subspace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let qa = orthonormal_basis(a);
    let qb = orthonormal_basis(b);
    let residual = &qb - &qa * (qa.adjoint() * &qb);
    spectral_norm(&residual)
}

/// Matrix of the symplectic form in the basis `(e_1..e_N, conj e_1..conj e_N)`:
/// `S(x, y) = x^T S y` with `S(e_p, conj e_q) = -i delta_pq`.
pub fn form_matrix(n: usize) -> CMatrix {
    let mut s = CMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        s[(k, n + k)] = -I;
        s[(n + k, k)] = I;
    }
    s
}

/// The standard complex structure `diag(-i, ..., +i, ...)`.
pub fn standard_structure(n: usize) -> CMatrix {
    let mut j = CMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, k)] = -I;
        j[(n + k, n + k)] = I;
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_of_equal_spans_is_zero() {
        let a = CMatrix::from_fn(4, 2, |i, j| C64::new((i + 2 * j) as f64, (i * j) as f64));
        let b = &a * CMatrix::from_fn(2, 2, |i, j| C64::new(1.0 + i as f64, j as f64 - 0.5));
        assert!(subspace_distance(&a, &b) < 1e-12);
    }

    #[test]
    fn distance_of_orthogonal_lines_is_one() {
        let a = CMatrix::from_fn(2, 1, |i, _| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0));
        let b = CMatrix::from_fn(2, 1, |i, _| C64::new(if i == 1 { 1.0 } else { 0.0 }, 0.0));
        assert!((subspace_distance(&a, &b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn right_solve_inverts() {
        let m = CMatrix::from_fn(3, 3, |i, j| {
            C64::new(if i == j { 2.0 } else { 0.3 }, (i as f64) - (j as f64))
        });
        let x = CMatrix::from_fn(2, 3, |i, j| C64::new(i as f64, j as f64));
        let rhs = &x * &m;
        let back = right_solve(&m, &rhs).unwrap();
        assert!(max_abs(&(back - x)) < 1e-12);
    }

    #[test]
    fn form_and_structure_square_correctly() {
        let s = form_matrix(3);
        let j = standard_structure(3);
        let id = CMatrix::identity(6, 6);
        assert!(max_abs(&(&s * &s - &id)) == 0.0);
        assert!(max_abs(&(&j * &j + &id)) == 0.0);
    }
}

//! Dense Hermitian eigendecomposition used by the basis builders and the oracle.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Imaginary parts below this are treated as zero when choosing the real path.
const REAL_TOL: f64 = 1e-14;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors, in the same order as `values`.
    pub vectors: DMatrix<Complex64>,
}

/// Diagonalizes a Hermitian matrix. Only the lower triangle is read.
///
/// Matrices whose entries are all real go through the real symmetric solver,
/// which is several times faster at oracle sizes.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> HermitianEigen {
    let n = m.nrows();
    let is_real = m.iter().all(|z| z.im.abs() <= REAL_TOL);
    let (values, vectors) = if is_real {
        let re = m.map(|z| z.re);
        let eig = re.symmetric_eigen();
        (
            eig.eigenvalues.iter().copied().collect::<Vec<_>>(),
            eig.eigenvectors.map(|x| Complex64::new(x, 0.0)),
        )
    } else {
        let eig = m.clone().symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = DMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    HermitianEigen {
        values: sorted_values,
        vectors: sorted_vectors,
    }
}

/// Largest `|m − m†|` entry.
pub fn hermiticity_error(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest `|m†m − 1|` entry for a matrix whose columns should be orthonormal.
pub fn orthonormality_error(m: &DMatrix<Complex64>) -> f64 {
    let gram = m.adjoint() * m;
    max_deviation_from_identity(&gram)
}

pub fn max_deviation_from_identity(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for ((i, j), z) in m.iter().enumerate().map(|(k, z)| ((k % m.nrows(), k / m.nrows()), z)) {
        let target = if i == j { 1.0 } else { 0.0 };
        worst = worst.max((z - target).norm());
    }
    worst
}

use std::ops::Range;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::tolerance::Tolerance;
use crate::error::{Error, Result};

/// Spectral data of a self-adjoint matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `values`.
    pub vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    /// `Σ λ_k v_k v_k*`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors.nrows();
        let mut out = DMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let v = self.vectors.column(k);
            out += (&v * v.adjoint()) * Complex64::new(lambda, 0.0);
        }
        ComplexMatrix::from_inner(out)
    }

    /// Eigenvector columns for the given index range.
    pub fn columns(&self, range: Range<usize>) -> DMatrix<Complex64> {
        self.vectors.columns(range.start, range.len()).into_owned()
    }

    /// Projector onto the span of the eigenvectors in `range`.
    pub fn spectral_projector(&self, range: Range<usize>) -> ComplexMatrix {
        ComplexMatrix::range_projector(&self.columns(range))
    }
}

/// Eigendecomposition of a self-adjoint matrix.
pub fn hermitian_eig(m: &ComplexMatrix, tol: &Tolerance) -> Result<HermitianEigen> {
    let deviation = m.hermitian_deviation();
    if deviation > tol.eq_tol {
        return Err(Error::NotHermitian { deviation });
    }
    eig_unchecked(&m.hermitian_part())
}

/// Eigendecomposition of a matrix already known to be self-adjoint.
pub(crate) fn eig_unchecked(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let eig = SymmetricEigen::try_new(m.as_matrix().clone(), f64::EPSILON, 0)
        .ok_or(Error::DecompositionFailed("hermitian eigendecomposition"))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = m.dim();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// `‖m‖ = sqrt(max Sp(m*m))`
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    let gram = m.adjoint() * m;
    match eig_unchecked(&gram.hermitian_part()) {
        Ok(eig) => eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt(),
        // The Frobenius norm bounds the operator norm from above.
        Err(_) => m.hs_norm(),
    }
}

/// Singular values (descending) and a full set of right singular vectors
/// (columns, aligned) of an arbitrary `rows × cols` matrix.
pub(crate) fn right_singular(a: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let (rows, cols) = a.shape();
    if cols == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let square = if rows > cols {
        // Same singular values and right vectors as the tall original.
        a.clone().qr().r()
    } else if rows < cols {
        let mut padded = DMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(a);
        padded
    } else {
        a.clone()
    };
    right_singular_square(square)
}

/// Sweeps of the one-sided Jacobi iteration before giving up.
const JACOBI_SWEEPS: usize = 80;
/// Column pairs whose cosine is below this many units of roundoff per row
/// count as orthogonal.
const JACOBI_THRESHOLD: f64 = 2.0 * f64::EPSILON;

/// One-sided (Hestenes) Jacobi: rotate column pairs of `A V` until they are
/// mutually orthogonal; the column norms are then the singular values.
/// The library SVD is not used because its complex path returns inaccurate
/// singular values for rank-deficient input.
fn right_singular_square(square: DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = square.ncols();
    let mut u = square;
    let mut v = DMatrix::<Complex64>::identity(n, n);
    let mut converged = n < 2;
    let threshold = JACOBI_THRESHOLD * u.nrows() as f64;
    // Columns at roundoff level of the whole matrix are already null; rotating
    // them against each other only churns noise.
    let negligible = (f64::EPSILON * u.norm()).powi(2);
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = u.column(p).norm_squared();
                let beta = u.column(q).norm_squared();
                let gamma: Complex64 = u.column(p).iter().zip(u.column(q).iter()).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if alpha.min(beta) <= negligible || g <= threshold * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut u, &mut v] {
                    for r in 0..m.nrows() {
                        let (xp, xq) = (m[(r, p)], m[(r, q)] * phase);
                        m[(r, p)] = xp * c - xq * s;
                        m[(r, q)] = xp * s + xq * c;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::DecompositionFailed("singular value decomposition"));
    }
    let norms: Vec<f64> = (0..n).map(|k| u.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let values = order.iter().map(|&k| norms[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((values, vectors))
}

fn rank_from_values(values: &[f64], tol: &Tolerance) -> usize {
    rank_with_floor(values, 0.0, tol)
}

/// Singular values above `rank_tol · max(σ_max, floor)`; a positive `floor`
/// keeps roundoff-level matrices from being promoted to full rank.
fn rank_with_floor(values: &[f64], floor: f64, tol: &Tolerance) -> usize {
    let cutoff = tol.rank_tol * values.first().copied().unwrap_or(0.0).max(floor);
    values.iter().filter(|&&s| s > cutoff).count()
}

/// Numerical rank of an arbitrary rectangular matrix.
pub fn rank_of_rect(a: &DMatrix<Complex64>, tol: &Tolerance) -> Result<usize> {
    let (values, _) = right_singular(a)?;
    Ok(rank_from_values(&values, tol))
}

/// Rank with singular values measured against `max(σ_max, scale)`, for
/// matrices whose natural norm is known (projectors have `scale = 1`).
pub fn rank_with_scale(m: &ComplexMatrix, scale: f64, tol: &Tolerance) -> usize {
    match right_singular(m.as_matrix()) {
        Ok((values, _)) => rank_with_floor(&values, scale, tol),
        Err(_) => rank_of(m, tol),
    }
}

/// Kernel with singular values measured against `max(σ_max, scale)`.
pub fn null_space_scaled(a: &DMatrix<Complex64>, scale: f64, tol: &Tolerance) -> Result<DMatrix<Complex64>> {
    let cols = a.ncols();
    let (values, vectors) = right_singular(a)?;
    let rank = rank_with_floor(&values, scale, tol);
    Ok(vectors.columns(rank, cols - rank).into_owned())
}

/// Number of singular values above `rank_tol` times the largest one.
pub fn rank_of(m: &ComplexMatrix, tol: &Tolerance) -> usize {
    rank_of_rect(m.as_matrix(), tol).unwrap_or_else(|_| {
        // SVD failure is not expected for finite input; fall back to the
        // spectrum of m*m.
        let gram = (m.adjoint() * m).hermitian_part();
        let eig = eig_unchecked(&gram).expect("eigendecomposition of a Gram matrix");
        let values: Vec<f64> = eig.values.iter().map(|v| v.max(0.0).sqrt()).collect();
        rank_from_values(&values, tol)
    })
}

/// Orthonormal basis (columns) of the kernel of an arbitrary matrix.
pub fn null_space_rect(a: &DMatrix<Complex64>, tol: &Tolerance) -> Result<DMatrix<Complex64>> {
    let cols = a.ncols();
    let (values, vectors) = right_singular(a)?;
    let rank = rank_from_values(&values, tol);
    Ok(vectors.columns(rank, cols - rank).into_owned())
}

/// Kernel of the vertical stack of `blocks`, each with `cols` columns.
///
/// The stack is never materialised: an upper-triangular factor with the same
/// kernel and singular values is accumulated block by block.
///
/// `scale` is an a-priori bound on the operator norm of the stack; singular
/// values below `rank_tol · max(σ_max, scale)` count as zero.
pub fn null_space_stacked<I>(
    blocks: I,
    cols: usize,
    scale: f64,
    tol: &Tolerance,
) -> Result<DMatrix<Complex64>>
where
    I: IntoIterator<Item = DMatrix<Complex64>>,
{
    let mut reduced: Option<DMatrix<Complex64>> = None;
    for block in blocks {
        assert_eq!(block.ncols(), cols, "stacked blocks must share a column count");
        let stacked = match reduced.take() {
            None => block,
            Some(r) => {
                let mut s = DMatrix::zeros(r.nrows() + block.nrows(), cols);
                s.view_mut((0, 0), (r.nrows(), cols)).copy_from(&r);
                s.view_mut((r.nrows(), 0), (block.nrows(), cols)).copy_from(&block);
                s
            }
        };
        reduced = Some(if stacked.nrows() > cols {
            stacked.qr().r()
        } else {
            stacked
        });
    }
    match reduced {
        None => Ok(DMatrix::identity(cols, cols)),
        Some(r) => {
            let (values, vectors) = right_singular(&r)?;
            let rank = rank_with_floor(&values, scale, tol);
            Ok(vectors.columns(rank, cols - rank).into_owned())
        }
    }
}

/// Orthonormal kernel basis of a square matrix; `rank_of(m) + ncols = dim`.
pub fn null_space(m: &ComplexMatrix, tol: &Tolerance) -> DMatrix<Complex64> {
    null_space_rect(m.as_matrix(), tol).unwrap_or_else(|_| {
        let gram = (m.adjoint() * m).hermitian_part();
        let eig = eig_unchecked(&gram).expect("eigendecomposition of a Gram matrix");
        let values: Vec<f64> = eig.values.iter().map(|v| v.max(0.0).sqrt()).collect();
        let rank = rank_from_values(&values, tol);
        eig.columns(rank..m.dim())
    })
}

/// Groups a descending sequence into clusters separated by gaps above `gap`.
pub fn cluster_descending(values: &[f64], gap: f64) -> Vec<Range<usize>> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k - 1] - values[k] > gap {
            if k > start {
                clusters.push(start..k);
            }
            start = k;
        }
    }
    clusters
}

/// Smallest gap between consecutive descending values that exceeds `gap`,
/// together with the largest gap that does not. Used to judge how cleanly a
/// spectrum separates into clusters.
pub(crate) fn gap_margins(values: &[f64], gap: f64) -> (f64, f64) {
    let mut smallest_open = f64::INFINITY;
    let mut largest_closed = 0.0f64;
    for w in values.windows(2) {
        let g = w[0] - w[1];
        if g > gap {
            smallest_open = smallest_open.min(g);
        } else {
            largest_closed = largest_closed.max(g);
        }
    }
    (smallest_open, largest_closed)
}

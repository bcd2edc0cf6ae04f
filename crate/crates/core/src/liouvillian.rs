//! Superoperator assembly under column-major vectorization:
//! vec(ρ)[i + j·d] = ρ[i, j], so vec(AρB) = (Bᵀ ⊗ A) vec(ρ).

use alloc::vec::Vec;
use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::generators::{ChannelTag, JumpChannel};
use crate::{CMatrix, C64};

/// Audit record for one assembled channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSummary {
    pub tag: ChannelTag,
    pub rate: f64,
    /// Frobenius norm of the jump operator.
    pub operator_norm: f64,
}

/// Compressed-row copy of a square matrix for fast products.
#[derive(Debug, Clone)]
pub struct SparseOperator<T = C64> {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<T>,
}

impl<T: nalgebra::Scalar + Copy + num_traits::Zero + core::ops::Mul<Output = T> + core::ops::AddAssign> SparseOperator<T> {
    pub fn from_dense(m: &nalgebra::DMatrix<T>) -> Self {
        let dim = m.nrows();
        let mut row_start = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_start.push(0);
        for i in 0..dim {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if !v.is_zero() {
                    cols.push(j);
                    values.push(v);
                }
            }
            row_start.push(cols.len());
        }
        Self {
            dim,
            row_start,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// out = self · x
    pub fn apply(&self, x: &[T], out: &mut [T]) {
        for (i, o) in out.iter_mut().enumerate() {
            let (lo, hi) = (self.row_start[i], self.row_start[i + 1]);
            let mut acc = T::zero();
            for (c, v) in self.cols[lo..hi].iter().zip(&self.values[lo..hi]) {
                acc += *v * x[*c];
            }
            *o = acc;
        }
    }
}

/// Generator of ρ̇ = −i[H, ρ] + Σ_k g_k (A_k ρ A_k† − ½{A_k†A_k, ρ}).
#[derive(Debug, Clone)]
pub struct Liouvillian {
    hilbert_dim: usize,
    matrix: CMatrix,
    sparse: SparseOperator,
    real_matrix: nalgebra::DMatrix<f64>,
    real: SparseOperator<f64>,
    manifest: Vec<ChannelSummary>,
}

#[inline]
pub fn vec_index(row: usize, col: usize, dim: usize) -> usize {
    row + col * dim
}

pub fn vectorize(rho: &CMatrix) -> DVector<C64> {
    DVector::from_column_slice(rho.as_slice())
}

pub fn unvectorize(v: &[C64], dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v)
}

/// Real coordinates of a Hermitian matrix on the vectorized index grid:
/// x[i + j·d] is Re ρ_ij for i ≤ j and Im ρ_ji for i > j.
pub fn hermitian_coordinates(rho: &CMatrix) -> Vec<f64> {
    let d = rho.nrows();
    let mut x = alloc::vec![0.0; d * d];
    for j in 0..d {
        for i in 0..d {
            x[vec_index(i, j, d)] = if i <= j { rho[(i, j)].re } else { rho[(j, i)].im };
        }
    }
    x
}

/// Inverse of [`hermitian_coordinates`]; the result is Hermitian by construction.
pub fn from_hermitian_coordinates(x: &[f64], dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(x[vec_index(i, i, dim)], 0.0)
        } else if i < j {
            C64::new(x[vec_index(i, j, dim)], x[vec_index(j, i, dim)])
        } else {
            C64::new(x[vec_index(j, i, dim)], -x[vec_index(i, j, dim)])
        }
    })
}

/// The generator acting on Hermitian coordinates. Column b holds the
/// coordinates of L applied to the basis matrix of coordinate b.
fn real_generator(matrix: &CMatrix, d: usize) -> nalgebra::DMatrix<f64> {
    let n = d * d;
    let mut out = nalgebra::DMatrix::<f64>::zeros(n, n);
    let mut image = CMatrix::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            let b = vec_index(i, j, d);
            image.fill(C64::new(0.0, 0.0));
            let basis: [(usize, C64); 2] = if i == j {
                [(b, C64::new(1.0, 0.0)), (b, C64::new(0.0, 0.0))]
            } else if i < j {
                [(b, C64::new(1.0, 0.0)), (vec_index(j, i, d), C64::new(1.0, 0.0))]
            } else {
                // i|j⟩⟨i| − i|i⟩⟨j| for the upper element (j, i)
                [(vec_index(j, i, d), C64::new(0.0, 1.0)), (b, C64::new(0.0, -1.0))]
            };
            for (k, c) in basis {
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                for r in 0..n {
                    image[(r % d, r / d)] += matrix[(r, k)] * c;
                }
            }
            let coords = hermitian_coordinates(&image);
            out.set_column(b, &nalgebra::DVector::from_vec(coords));
        }
    }
    out
}

pub fn assemble_liouvillian(h: &CMatrix, channels: &[JumpChannel]) -> Result<Liouvillian> {
    let d = h.nrows();
    if h.ncols() != d {
        return Err(Error::DimensionMismatch {
            what: "hamiltonian columns",
            expected: d,
            found: h.ncols(),
        });
    }
    let identity = CMatrix::identity(d, d);
    let minus_i = C64::new(0.0, -1.0);
    let mut matrix = (identity.kronecker(h) - h.transpose().kronecker(&identity)) * minus_i;

    let mut decay = CMatrix::zeros(d, d);
    let mut manifest = Vec::with_capacity(channels.len());
    for (index, ch) in channels.iter().enumerate() {
        if !(ch.rate >= 0.0 && ch.rate.is_finite()) {
            return Err(Error::InvalidRate { index, rate: ch.rate });
        }
        if ch.operator.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                what: "jump operator",
                expected: d,
                found: ch.operator.nrows(),
            });
        }
        manifest.push(ChannelSummary {
            tag: ch.tag,
            rate: ch.rate,
            operator_norm: ch.operator.norm(),
        });
        if ch.rate == 0.0 {
            continue;
        }
        let g = C64::new(ch.rate, 0.0);
        let a = &ch.operator;
        matrix += a.conjugate().kronecker(a) * g;
        decay += a.adjoint() * a * g;
    }
    let half = C64::new(0.5, 0.0);
    matrix -= (identity.kronecker(&decay) + decay.transpose().kronecker(&identity)) * half;

    let sparse = SparseOperator::from_dense(&matrix);
    let real_matrix = real_generator(&matrix, d);
    let real = SparseOperator::from_dense(&real_matrix);
    Ok(Liouvillian {
        hilbert_dim: d,
        matrix,
        sparse,
        real_matrix,
        real,
        manifest,
    })
}

impl Liouvillian {
    /// Dimension of the underlying Hilbert space (N + 1).
    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    /// (N + 1)².
    pub fn dimension(&self) -> usize {
        self.hilbert_dim * self.hilbert_dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn sparse(&self) -> &SparseOperator {
        &self.sparse
    }

    /// The generator on Hermitian coordinates, see [`hermitian_coordinates`].
    pub fn real_matrix(&self) -> &nalgebra::DMatrix<f64> {
        &self.real_matrix
    }

    pub fn real_sparse(&self) -> &SparseOperator<f64> {
        &self.real
    }

    pub fn manifest(&self) -> &[ChannelSummary] {
        &self.manifest
    }

    /// L(ρ) as a matrix.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let x = vectorize(rho);
        let mut y = alloc::vec![C64::new(0.0, 0.0); self.dimension()];
        self.sparse.apply(x.as_slice(), &mut y);
        unvectorize(&y, self.hilbert_dim)
    }

    /// Vectorized indices of the excited block ρ_mn, m, n ≥ 1.
    pub fn excited_indices(&self) -> Vec<usize> {
        let d = self.hilbert_dim;
        let mut idx = Vec::with_capacity((d - 1) * (d - 1));
        for col in 1..d {
            for row in 1..d {
                idx.push(vec_index(row, col, d));
            }
        }
        idx
    }

    /// Restriction of L to the excited block, which evolves autonomously.
    pub fn excited_block(&self) -> CMatrix {
        let idx = self.excited_indices();
        CMatrix::from_fn(idx.len(), idx.len(), |i, j| self.matrix[(idx[i], idx[j])])
    }

    /// max_j |Σ_i L[(i,i), j]|: deviation of the trace functional from a left null vector.
    pub fn trace_defect(&self) -> f64 {
        let d = self.hilbert_dim;
        (0..self.dimension())
            .map(|j| {
                (0..d)
                    .map(|i| self.matrix[(vec_index(i, i, d), j)])
                    .fold(C64::new(0.0, 0.0), |a, b| a + b)
                    .norm()
            })
            .fold(0.0, f64::max)
    }
}

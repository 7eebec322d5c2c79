//! Dimension-generic dense complex tensor algebra: Kronecker products,
//! two-site embeddings, partial traces, Pauli two-body unitaries, matrix
//! powers, small-matrix spectra and the trace distance.
//!
//! Tensor factors are always ordered "system first, then ancillas in
//! ascending label"; the first factor is the most significant digit of a
//! basis index. Every multi-site operation takes an explicit
//! [`SubsystemLayout`] so that slot order is never implicit.

use crate::{CcmError, Result, C64, HERMITICITY_TOL, TRACE_TOL};
use nalgebra::DMatrix;

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from row-major entries. Panics if the entry count is
    /// inconsistent with the dimensions.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(rows * cols, data.len(), "entry count must equal rows*cols");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// 2x2 convenience constructor.
    pub fn two_by_two(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self::from_row_major(2, 2, vec![a, b, c, d])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let lhs_row = i * rhs.cols;
                let rhs_row = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[lhs_row + j] += a * rhs.data[rhs_row + j];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        let data = self.data.iter().map(|a| a * s).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> ComplexMatrix {
        let data = self.data.iter().map(|a| a.conj()).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, rhs: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Equality up to an explicit absolute tolerance on every entry.
    pub fn approx_eq(&self, rhs: &ComplexMatrix, tol: f64) -> bool {
        (self.rows, self.cols) == (rhs.rows, rhs.cols) && self.max_abs_diff(rhs) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for r in 0..self.rows {
            for c in r..self.cols {
                if (self.get(r, c) - self.get(c, r).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub(crate) fn to_dmatrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

/// Kronecker product; dimensions multiply.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a.get(i, j);
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out.set(i * br + k, j * bc + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// `m^n` by exponentiation by squaring; `m^0` is the identity.
pub fn matrix_power(m: &ComplexMatrix, n: usize) -> ComplexMatrix {
    assert!(m.is_square(), "matrix_power requires a square matrix");
    let mut result = ComplexMatrix::identity(m.rows());
    let mut base = m.clone();
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            result = result.mul(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.mul(&base);
        }
    }
    result
}

/// Ordered list of local dimensions of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
}

impl SubsystemLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(CcmError::InvalidLayout("no sites".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(CcmError::InvalidLayout(format!("local dimension {d} < 2")));
        }
        Ok(Self { dims })
    }

    /// Layout of `n` qubits.
    pub fn qubits(n: usize) -> Self {
        Self { dims: vec![2; n] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Stride of a site in the row-major basis index (product of the
    /// dimensions of all later sites).
    pub fn stride(&self, site: usize) -> usize {
        self.dims[site + 1..].iter().product()
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_sites() {
            return Err(CcmError::SiteOutOfRange { site, n_sites: self.n_sites() });
        }
        Ok(())
    }
}

/// Density matrix together with the tensor layout of the space it lives on.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    layout: SubsystemLayout,
}

impl DensityMatrix {
    /// Validates squareness, layout consistency, Hermiticity and unit trace.
    /// Positivity is checked separately by [`DensityMatrix::min_eigenvalue`]
    /// (an eigendecomposition is too expensive to run on every intermediate
    /// chain state).
    pub fn new(matrix: ComplexMatrix, layout: SubsystemLayout) -> Result<Self> {
        if !matrix.is_square() {
            return Err(CcmError::InvalidDensity("matrix is not square".into()));
        }
        if matrix.rows() != layout.total_dim() {
            return Err(CcmError::DimensionMismatch(format!(
                "matrix dim {} != layout dim {}",
                matrix.rows(),
                layout.total_dim()
            )));
        }
        if !matrix.is_hermitian(HERMITICITY_TOL) {
            return Err(CcmError::InvalidDensity("not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(CcmError::InvalidDensity(format!("trace {} != 1", tr)));
        }
        Ok(Self { matrix, layout })
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix, layout: SubsystemLayout) -> Self {
        debug_assert_eq!(matrix.rows(), layout.total_dim());
        Self { matrix, layout }
    }

    /// Single-qubit state from a Bloch vector.
    pub fn qubit_from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let r2 = x * x + y * y + z * z;
        if r2 > 1.0 + 1e-12 {
            return Err(CcmError::InvalidBloch(format!("|r|^2 = {r2} > 1")));
        }
        let m = ComplexMatrix::two_by_two(
            C64::new(0.5 * (1.0 + z), 0.0),
            C64::new(0.5 * x, -0.5 * y),
            C64::new(0.5 * x, 0.5 * y),
            C64::new(0.5 * (1.0 - z), 0.0),
        );
        Ok(Self { matrix: m, layout: SubsystemLayout::qubits(1) })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Purity Tr[rho^2]; equals 1 for pure states.
    pub fn purity(&self) -> f64 {
        self.matrix.mul(&self.matrix).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }
}

const SX: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];

/// Pauli axis label for the two-body collision unitaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// The Pauli matrix for an axis.
pub fn pauli(axis: Axis) -> ComplexMatrix {
    let o = C64::new(0.0, 0.0);
    match axis {
        Axis::X => ComplexMatrix::from_fn(2, 2, |r, c| C64::new(SX[r][c], 0.0)),
        Axis::Y => ComplexMatrix::two_by_two(o, C64::new(0.0, -1.0), C64::new(0.0, 1.0), o),
        Axis::Z => ComplexMatrix::two_by_two(C64::new(1.0, 0.0), o, o, C64::new(-1.0, 0.0)),
    }
}

/// exp(-i angle sigma_a (x) sigma_b). Exact: since (sigma_a (x) sigma_b)^2 = I,
/// the exponential is cos(angle) I - i sin(angle) sigma_a (x) sigma_b.
pub fn pauli_two_body_unitary(axis_a: Axis, axis_b: Axis, angle: f64) -> ComplexMatrix {
    let p = kron(&pauli(axis_a), &pauli(axis_b));
    let cos = ComplexMatrix::identity(4).scale(C64::new(angle.cos(), 0.0));
    cos.sub(&p.scale(C64::new(0.0, angle.sin())))
}

/// Embeds a 4x4 operator acting on qubit sites `(site_i, site_j)` (in that
/// order) into the full space, identity on all other sites.
pub fn embed_two_site(
    op: &ComplexMatrix,
    layout: &SubsystemLayout,
    site_i: usize,
    site_j: usize,
) -> Result<ComplexMatrix> {
    check_two_qubit_sites(op, layout, site_i, site_j)?;
    let n = layout.total_dim();
    let si = layout.stride(site_i);
    let sj = layout.stride(site_j);
    let mut out = ComplexMatrix::zeros(n, n);
    for base in base_indices(layout, site_i, site_j) {
        for a in 0..2usize {
            for b in 0..2usize {
                let row = base + a * si + b * sj;
                for ap in 0..2usize {
                    for bp in 0..2usize {
                        let col = base + ap * si + bp * sj;
                        out.set(row, col, op.get(2 * a + b, 2 * ap + bp));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn check_two_qubit_sites(
    op: &ComplexMatrix,
    layout: &SubsystemLayout,
    site_i: usize,
    site_j: usize,
) -> Result<()> {
    if op.rows() != 4 || op.cols() != 4 {
        return Err(CcmError::DimensionMismatch("two-site operator must be 4x4".into()));
    }
    layout.check_site(site_i)?;
    layout.check_site(site_j)?;
    if site_i == site_j {
        return Err(CcmError::InvalidLayout("two-site operation on identical sites".into()));
    }
    for s in [site_i, site_j] {
        if layout.dims()[s] != 2 {
            return Err(CcmError::NonQubitSite(s));
        }
    }
    Ok(())
}

/// All basis indices whose digits at `site_i` and `site_j` are zero.
fn base_indices(layout: &SubsystemLayout, site_i: usize, site_j: usize) -> Vec<usize> {
    let n = layout.total_dim();
    let si = layout.stride(site_i);
    let sj = layout.stride(site_j);
    let di = layout.dims()[site_i];
    let dj = layout.dims()[site_j];
    let mut out = Vec::with_capacity(n / (di * dj));
    for idx in 0..n {
        if (idx / si) % di == 0 && (idx / sj) % dj == 0 {
            out.push(idx);
        }
    }
    out
}

/// Applies `U rho U^dag` for a 4x4 unitary acting on qubit sites
/// `(site_i, site_j)` without materializing the embedded operator.
pub fn apply_two_site_unitary(
    rho: &mut ComplexMatrix,
    layout: &SubsystemLayout,
    gate: &ComplexMatrix,
    site_i: usize,
    site_j: usize,
) -> Result<()> {
    check_two_qubit_sites(gate, layout, site_i, site_j)?;
    if rho.rows() != layout.total_dim() || !rho.is_square() {
        return Err(CcmError::DimensionMismatch("state dim does not match layout".into()));
    }
    let n = layout.total_dim();
    let si = layout.stride(site_i);
    let sj = layout.stride(site_j);
    let bases = base_indices(layout, site_i, site_j);
    let offs = [0, sj, si, si + sj];
    let mut g = [[C64::new(0.0, 0.0); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            g[r][c] = gate.get(r, c);
        }
    }
    // Left action U rho: mixes the four row indices of each gather group.
    let mut scratch = [C64::new(0.0, 0.0); 4];
    for &base in &bases {
        for col in 0..n {
            for (k, &o) in offs.iter().enumerate() {
                scratch[k] = rho.get(base + o, col);
            }
            for (r, row) in g.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (k, &s) in scratch.iter().enumerate() {
                    acc += row[k] * s;
                }
                rho.set(base + offs[r], col, acc);
            }
        }
    }
    // Right action (.) U^dag: mixes the four column indices.
    for &base in &bases {
        for row in 0..n {
            for (k, &o) in offs.iter().enumerate() {
                scratch[k] = rho.get(row, base + o);
            }
            for (c, gc) in g.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (k, &s) in scratch.iter().enumerate() {
                    acc += s * gc[k].conj();
                }
                rho.set(row, base + offs[c], acc);
            }
        }
    }
    Ok(())
}

/// Applies a 4x4 gate to qubit sites `(site_i, site_j)` of a state vector.
pub fn apply_two_site_to_vector(
    amps: &mut [C64],
    layout: &SubsystemLayout,
    gate: &ComplexMatrix,
    site_i: usize,
    site_j: usize,
) -> Result<()> {
    check_two_qubit_sites(gate, layout, site_i, site_j)?;
    if amps.len() != layout.total_dim() {
        return Err(CcmError::DimensionMismatch("state vector does not match layout".into()));
    }
    let si = layout.stride(site_i);
    let sj = layout.stride(site_j);
    let offs = [0, sj, si, si + sj];
    for base in base_indices(layout, site_i, site_j) {
        let x: Vec<C64> = offs.iter().map(|&o| amps[base + o]).collect();
        for (r, &o) in offs.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..4 {
                acc += gate.get(r, k) * x[k];
            }
            amps[base + o] = acc;
        }
    }
    Ok(())
}

/// Partial trace over all sites not in `keep`, raw-matrix version. The kept
/// sites stay in their original relative order.
pub fn partial_trace_raw(
    m: &ComplexMatrix,
    layout: &SubsystemLayout,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    if keep.is_empty() {
        return Err(CcmError::InvalidKeepSet);
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    for &s in &keep {
        layout.check_site(s).map_err(|_| CcmError::InvalidKeepSet)?;
    }
    if m.rows() != layout.total_dim() || !m.is_square() {
        return Err(CcmError::DimensionMismatch("matrix dim does not match layout".into()));
    }
    let traced: Vec<usize> = (0..layout.n_sites()).filter(|s| !keep.contains(s)).collect();
    let dk: usize = keep.iter().map(|&s| layout.dims()[s]).product();
    let dt: usize = traced.iter().map(|&s| layout.dims()[s]).product();
    let keep_strides: Vec<usize> = keep.iter().map(|&s| layout.stride(s)).collect();
    let traced_strides: Vec<usize> = traced.iter().map(|&s| layout.stride(s)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&s| layout.dims()[s]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&s| layout.dims()[s]).collect();

    // Full-space offset for the mixed-radix expansion of a compact index.
    let expand = |mut idx: usize, dims: &[usize], strides: &[usize]| -> usize {
        let mut off = 0;
        for k in (0..dims.len()).rev() {
            off += (idx % dims[k]) * strides[k];
            idx /= dims[k];
        }
        off
    };

    let traced_offsets: Vec<usize> =
        (0..dt).map(|t| expand(t, &traced_dims, &traced_strides)).collect();
    let keep_offsets: Vec<usize> = (0..dk).map(|k| expand(k, &keep_dims, &keep_strides)).collect();

    let mut out = ComplexMatrix::zeros(dk, dk);
    for (r, &ro) in keep_offsets.iter().enumerate() {
        for (c, &co) in keep_offsets.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &to in &traced_offsets {
                acc += m.get(ro + to, co + to);
            }
            out.set(r, c, acc);
        }
    }
    Ok(out)
}

/// Reduced density matrix on the kept sites; trace is preserved.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let reduced = partial_trace_raw(rho.matrix(), rho.layout(), keep)?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    let dims: Vec<usize> = keep.iter().map(|&s| rho.layout().dims()[s]).collect();
    // Partial tracing preserves Hermiticity, trace and positivity exactly.
    Ok(DensityMatrix::new_unchecked(reduced, SubsystemLayout::new(dims)?))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    assert!(m.is_square());
    let mut ev: Vec<f64> = m.to_dmatrix().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Eigenvalues of a general complex matrix (values only, unordered).
pub fn general_eigenvalues(m: &ComplexMatrix) -> Vec<C64> {
    assert!(m.is_square());
    m.to_dmatrix()
        .eigenvalues()
        .expect("complex Schur iteration failed to converge")
        .iter()
        .copied()
        .collect()
}

/// Trace distance (1/2)||r1 - r2||_1 via the spectrum of the Hermitian
/// difference.
pub fn trace_distance(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    if r1.dim() != r2.dim() {
        return Err(CcmError::DimensionMismatch(format!(
            "trace distance between dim {} and {}",
            r1.dim(),
            r2.dim()
        )));
    }
    let diff = r1.matrix().sub(r2.matrix());
    Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>())
}

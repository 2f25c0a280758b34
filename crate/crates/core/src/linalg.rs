//! Dense complex linear-algebra helpers: residual norms, nullspaces,
//! subspace comparison and commutants.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::scalar::{cabs, creal, czero, Cx, CMat, CVec, Real};

/// Largest entrywise modulus.
pub fn max_abs<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| {
        let a = cabs(*z);
        if a > acc {
            a
        } else {
            acc
        }
    })
}

pub fn max_abs_diff<T: Real>(a: &CMat<T>, b: &CMat<T>) -> T {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in residual");
    max_abs(&(a - b))
}

pub fn max_abs_vec<T: Real>(v: &CVec<T>) -> T {
    v.iter().fold(T::zero(), |acc, z| {
        let a = cabs(*z);
        if a > acc {
            a
        } else {
            acc
        }
    })
}

/// Frobenius norm.
pub fn frob<T: Real>(m: &CMat<T>) -> T {
    m.iter()
        .fold(T::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt()
}

pub fn vec_norm<T: Real>(v: &CVec<T>) -> T {
    v.iter()
        .fold(T::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt()
}

pub fn commutator<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a * b - b * a
}

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    DMatrix::identity(n, n)
}

/// Column-major vectorisation.
pub fn vectorize<T: Real>(m: &CMat<T>) -> CVec<T> {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvectorize<T: Real>(v: &CVec<T>, rows: usize) -> CMat<T> {
    let cols = v.len() / rows;
    DMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// Singular values, largest first.
pub fn singular_values<T: Real>(m: &CMat<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let (values, _) = dilation_eigen(m);
    values.into_iter().take(m.nrows().min(m.ncols())).map(|s| if s > T::zero() { s } else { T::zero() }).collect()
}

/// Eigenpairs of the Hermitian dilation `[[0, M], [M^†, 0]]`, eigenvalues
/// descending. A pair `±s` with vector `(u, ±v) / sqrt 2` carries the
/// singular triple `M v = s u`.
///
/// nalgebra's SVD (real or complex) can return wrong factors for
/// structured matrices, while its Hermitian eigensolver is reliable, so
/// every decomposition here goes through this form.
fn dilation_eigen<T: Real>(m: &CMat<T>) -> (Vec<T>, CMat<T>) {
    let (r, c) = m.shape();
    let mut w = zeros::<T>(r + c, r + c);
    w.view_mut((0, r), (r, c)).copy_from(m);
    w.view_mut((r, 0), (c, r)).copy_from(&m.adjoint());
    hermitian_eigen(w)
}

/// Eigenvalues (descending) and matching eigenvector columns.
fn hermitian_eigen<T: Real>(h: CMat<T>) -> (Vec<T>, CMat<T>) {
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    (values, eig.eigenvectors.select_columns(&order))
}

/// Orthonormal basis of the complement of the span of orthonormal columns.
fn complement<T: Real>(v: &CMat<T>) -> CMat<T> {
    let n = v.nrows();
    if v.ncols() == 0 {
        return identity(n);
    }
    let (values, vectors) = hermitian_eigen(identity::<T>(n) - v * v.adjoint());
    let keep: Vec<usize> = (0..n).filter(|&k| values[k] > T::lit(0.5)).collect();
    vectors.select_columns(&keep)
}

/// Columns `k` of the dilation eigenvectors with eigenvalue above `cut`,
/// restricted to rows `rows` and rescaled to unit norm.
fn singular_vectors<T: Real>(values: &[T], vectors: &CMat<T>, cut: T, rows: std::ops::Range<usize>) -> CMat<T> {
    let keep: Vec<usize> = (0..values.len()).filter(|&k| values[k] > cut).collect();
    let scale = creal(T::lit(std::f64::consts::SQRT_2));
    vectors.select_columns(&keep).rows(rows.start, rows.len()).into_owned() * scale
}

pub fn spectral_norm<T: Real>(m: &CMat<T>) -> T {
    singular_values(m)
        .into_iter()
        .fold(T::zero(), |a, s| if s > a { s } else { a })
}

fn cutoff_for<T: Real>(sigma: &[T]) -> T {
    let smax = sigma
        .iter()
        .copied()
        .fold(T::zero(), |a, s| if s > a { s } else { a });
    T::nullspace_cutoff() * if smax > T::one() { smax } else { T::one() }
}

/// Numerical rank with the global relative cutoff.
pub fn rank<T: Real>(m: &CMat<T>) -> usize {
    let s = singular_values(m);
    let cut = cutoff_for(&s);
    s.into_iter().filter(|&x| x > cut).count()
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn range_basis<T: Real>(m: &CMat<T>) -> CMat<T> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let (values, vectors) = dilation_eigen(m);
    let cut = cutoff_for(&values);
    singular_vectors(&values, &vectors, cut, 0..m.nrows())
}

pub fn columns_to_matrix<T: Real>(rows: usize, cols: &[CVec<T>]) -> CMat<T> {
    let mut out = DMatrix::zeros(rows, cols.len());
    for (k, c) in cols.iter().enumerate() {
        out.set_column(k, c);
    }
    out
}

/// Orthonormal basis (as columns) of the kernel of `m`.
pub fn nullspace<T: Real>(m: &CMat<T>) -> CMat<T> {
    let mut acc = StackedNullspace::new(m.ncols());
    acc.push(m);
    acc.finish()
}

/// Kernel of a tall stack of linear maps, accumulated block by block.
///
/// Each pushed block is folded into a square triangular factor, so memory
/// stays at `cols x cols` no matter how many constraints are stacked.
pub struct StackedNullspace<T: Real> {
    cols: usize,
    r: Option<CMat<T>>,
}

impl<T: Real> StackedNullspace<T> {
    pub fn new(cols: usize) -> Self {
        Self { cols, r: None }
    }

    pub fn push(&mut self, block: &CMat<T>) {
        assert_eq!(block.ncols(), self.cols, "constraint width mismatch");
        let stacked = match self.r.take() {
            None => block.clone(),
            Some(r) => {
                let mut s = DMatrix::zeros(r.nrows() + block.nrows(), self.cols);
                s.rows_mut(0, r.nrows()).copy_from(&r);
                s.rows_mut(r.nrows(), block.nrows()).copy_from(block);
                s
            }
        };
        self.r = Some(if stacked.nrows() > self.cols {
            stacked.qr().r()
        } else {
            stacked
        });
    }

    /// Singular values of the full stack.
    pub fn singular_values(&self) -> Vec<T> {
        match &self.r {
            None => vec![T::zero(); self.cols],
            Some(r) => {
                let mut s = singular_values(&pad_square(r, self.cols));
                s.resize(self.cols.max(s.len()), T::zero());
                s
            }
        }
    }

    /// Orthonormal kernel basis, one vector per column.
    pub fn finish(self) -> CMat<T> {
        let n = self.cols;
        let r = match self.r {
            None => return DMatrix::identity(n, n),
            Some(r) => pad_square(&r, n),
        };
        let (values, vectors) = dilation_eigen(&r);
        let cut = cutoff_for(&values);
        complement(&singular_vectors(&values, &vectors, cut, r.nrows()..r.nrows() + n))
    }
}

fn pad_square<T: Real>(r: &CMat<T>, n: usize) -> CMat<T> {
    if r.nrows() >= n {
        return r.clone();
    }
    let mut p = DMatrix::zeros(n, n);
    p.rows_mut(0, r.nrows()).copy_from(r);
    p
}

/// Basis of `{X : XA = AX for all A in action}`, orthonormal under the
/// trace inner product.
pub fn commutant<T: Real>(action: &[CMat<T>], dim: usize) -> Vec<CMat<T>> {
    let id = identity::<T>(dim);
    let mut acc = StackedNullspace::new(dim * dim);
    for a in action {
        assert_eq!(a.shape(), (dim, dim), "action matrix has wrong size");
        // vec(AX - XA) = (I (x) A - A^T (x) I) vec(X)
        let m = id.kronecker(a) - a.transpose().kronecker(&id);
        acc.push(&m);
    }
    let basis = acc.finish();
    (0..basis.ncols())
        .map(|k| unvectorize(&basis.column(k).into_owned(), dim))
        .collect()
}

/// Largest pairwise commutator norm of a family, relative to the largest
/// generator norm.
pub fn max_relative_commutator<T: Real>(family: &[CMat<T>]) -> T {
    let scale = family
        .iter()
        .map(frob)
        .fold(T::zero(), |a, s| if s > a { s } else { a });
    if scale == T::zero() {
        return T::zero();
    }
    let mut worst = T::zero();
    for (k, a) in family.iter().enumerate() {
        for b in &family[k + 1..] {
            let c = frob(&commutator(a, b)) / (scale * scale);
            if c > worst {
                worst = c;
            }
        }
    }
    worst
}

/// Dimension of the span of a family of equally sized matrices.
pub fn span_dim<T: Real>(family: &[CMat<T>]) -> usize {
    if family.is_empty() {
        return 0;
    }
    let cols: Vec<CVec<T>> = family.iter().map(vectorize).collect();
    rank(&columns_to_matrix(cols[0].len(), &cols))
}

/// `sin` of the largest principal angle between two subspaces given by
/// orthonormal column bases; `None` when the dimensions differ.
pub fn subspace_gap<T: Real>(a: &CMat<T>, b: &CMat<T>) -> Option<T> {
    if a.ncols() != b.ncols() || a.nrows() != b.nrows() {
        return None;
    }
    if a.ncols() == 0 {
        return Some(T::zero());
    }
    let ra = a - b * (b.adjoint() * a);
    let rb = b - a * (a.adjoint() * b);
    let ga = spectral_norm(&ra);
    let gb = spectral_norm(&rb);
    Some(if ga > gb { ga } else { gb })
}

/// Orthogonal projector onto the span of orthonormal columns.
pub fn projector_onto<T: Real>(basis: &CMat<T>) -> CMat<T> {
    basis * basis.adjoint()
}

/// `exp(-i H t)` for Hermitian `H`, via the spectral decomposition.
pub fn unitary_propagator<T: Real>(h: &CMat<T>, t: T) -> CMat<T> {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases = DVector::from_iterator(
        h.nrows(),
        eig.eigenvalues
            .iter()
            .map(|&lambda| {
                let theta = -(lambda * t);
                Complex::new(theta.cos(), theta.sin())
            }),
    );
    v * DMatrix::from_diagonal(&phases) * v.adjoint()
}

/// Hermitian part `(M + M^†) / 2`.
pub fn hermitian_part<T: Real>(m: &CMat<T>) -> CMat<T> {
    (m + m.adjoint()) * Complex::new(T::lit(0.5), T::zero())
}

/// Gram–Schmidt extension: appends `v` to the orthonormal set if it adds a
/// direction above the cutoff. Returns whether it did.
pub fn extend_orthonormal<T: Real>(basis: &mut Vec<CVec<T>>, v: &CVec<T>) -> bool {
    let mut w = v.clone();
    let norm0 = vec_norm(&w);
    if norm0 == T::zero() {
        return false;
    }
    // two passes for stability
    for _ in 0..2 {
        for b in basis.iter() {
            let c = b.dotc(&w);
            w -= b * c;
        }
    }
    let n = vec_norm(&w);
    if n <= T::lit(1e-7) * norm0 || n <= T::nullspace_cutoff() {
        return false;
    }
    w /= Complex::new(n, T::zero());
    basis.push(w);
    true
}

pub fn zeros<T: Real>(r: usize, c: usize) -> CMat<T> {
    DMatrix::from_element(r, c, czero())
}

/// Entrywise complex conjugate.
pub fn conj<T: Real>(m: &CMat<T>) -> CMat<T> {
    m.map(|z: Cx<T>| z.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn decompositions_reconstruct() {
        let m = DMatrix::from_fn(4, 3, |i, j| cx::<f64>((i * j) as f64 - 1.0, (i + 2 * j) as f64 * 0.5));
        let mut s = singular_values(&m);
        let r = range_basis(&m);
        assert_eq!(r.ncols(), rank(&m));
        assert!(max_abs_diff(&(&r * (r.adjoint() * &m)), &m) < 1e-12);
        let k = nullspace(&m.adjoint());
        assert_eq!(k.ncols(), 4 - r.ncols());
        assert!(max_abs(&(m.adjoint() * &k)) < 1e-12);
        s.retain(|&x| x > 1e-9);
        let gram_trace: f64 = (m.adjoint() * &m).trace().re;
        assert!((s.iter().map(|x| x * x).sum::<f64>() - gram_trace).abs() < 1e-10);
    }

    #[test]
    fn commutant_of_identity_is_everything() {
        let c = commutant::<f64>(&[identity(3)], 3);
        assert_eq!(c.len(), 9);
    }

    #[test]
    fn commutant_of_diagonal_is_diagonal() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![
            cx::<f64>(1.0, 0.0),
            cx(2.0, 0.0),
            cx(3.0, 0.0),
        ]));
        let c = commutant(&[d], 3);
        assert_eq!(c.len(), 3);
        for x in &c {
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        assert!(cabs(x[(i, j)]) < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn stacked_nullspace_matches_single_shot() {
        let a = DMatrix::from_fn(7, 5, |i, j| cx::<f64>((i * 5 + j) as f64 % 3.0, (i + 2 * j) as f64 % 2.0));
        let mut acc = StackedNullspace::new(5);
        acc.push(&a.rows(0, 3).into_owned());
        acc.push(&a.rows(3, 4).into_owned());
        let n1 = acc.finish();
        let n2 = nullspace(&a);
        assert_eq!(n1.ncols(), n2.ncols());
        assert!(max_abs(&(&a * &n1)) < 1e-10);
    }

    #[test]
    fn propagator_is_unitary_and_composes() {
        let h = DMatrix::from_fn(4, 4, |i, j| cx::<f64>((i + j) as f64, i as f64 - j as f64));
        let u1 = unitary_propagator(&h, 0.3);
        let u2 = unitary_propagator(&h, 0.4);
        let u = unitary_propagator(&h, 0.7);
        assert!(max_abs_diff(&(&u1 * u1.adjoint()), &identity(4)) < 1e-12);
        assert!(max_abs_diff(&(&u1 * &u2), &u) < 1e-12);
    }

    #[test]
    fn subspace_gap_detects_rotation() {
        let a = DMatrix::from_fn(3, 1, |i, _| if i == 0 { cx::<f64>(1.0, 0.0) } else { czero() });
        let b = DMatrix::from_fn(3, 1, |i, _| if i == 1 { cx::<f64>(1.0, 0.0) } else { czero() });
        assert!((subspace_gap(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        assert!(subspace_gap(&a, &a).unwrap() < 1e-12);
    }
}

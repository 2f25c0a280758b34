//! Test-side oracles, written directly from the definitions and kept free of
//! the library's own algebra routines.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use sectorium::FiniteGroup;

pub type C = Complex<f64>;
pub type M = DMatrix<C>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// `(v w)(x) = sum_h v(x h^-1) w(h)`
pub fn convolve(g: &FiniteGroup, v: &[C], w: &[C]) -> Vec<C> {
    g.elements()
        .map(|x| g.elements().map(|h| v[g.mul(x, g.inv(h))] * w[h]).sum())
        .collect()
}

/// Matrix of `w -> v w` on coefficient vectors.
pub fn left_regular(g: &FiniteGroup, v: &[C]) -> M {
    let n = g.order();
    let mut m = M::zeros(n, n);
    for (k, col) in (0..n).map(|k| (k, delta(n, k))) {
        for (x, z) in convolve(g, v, &col).into_iter().enumerate() {
            m[(x, k)] = z;
        }
    }
    m
}

/// Matrix of `w -> w v` on coefficient vectors.
pub fn right_regular(g: &FiniteGroup, v: &[C]) -> M {
    let n = g.order();
    let mut m = M::zeros(n, n);
    for k in 0..n {
        for (x, z) in convolve(g, &delta(n, k), v).into_iter().enumerate() {
            m[(x, k)] = z;
        }
    }
    m
}

pub fn delta(n: usize, k: usize) -> Vec<C> {
    let mut v = vec![c(0.0, 0.0); n];
    v[k] = c(1.0, 0.0);
    v
}

pub fn center(g: &FiniteGroup) -> Vec<usize> {
    g.elements().filter(|&z| g.elements().all(|x| g.mul(z, x) == g.mul(x, z))).collect()
}

/// Conjugacy classes by orbit enumeration.
pub fn class_count(g: &FiniteGroup) -> usize {
    let mut seen = vec![false; g.order()];
    let mut count = 0;
    for x in g.elements() {
        if seen[x] {
            continue;
        }
        count += 1;
        for h in g.elements() {
            seen[g.mul(g.mul(h, x), g.inv(h))] = true;
        }
    }
    count
}

/// Dimension of the common kernel of the stacked matrices.
pub fn nullity(blocks: &[M], cols: usize) -> usize {
    kernel(blocks, cols).ncols()
}

/// Orthonormal kernel basis of the stacked matrices from the Gram matrix
/// `sum_b b^† b`, whose eigenvalues are squared singular values.
pub fn kernel(blocks: &[M], cols: usize) -> M {
    let gram = blocks.iter().fold(M::zeros(cols, cols), |acc, b| acc + b.adjoint() * b);
    let eig = gram.symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(1.0, f64::max);
    let keep: Vec<usize> = (0..cols).filter(|&k| eig.eigenvalues[k] <= 1e-16 * top * cols as f64).collect();
    eig.eigenvectors.select_columns(&keep)
}

pub fn max_abs(m: &M) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn random_coeffs(rng: &mut impl Rng, n: usize) -> Vec<C> {
    (0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

pub fn random_matrix(rng: &mut impl Rng, r: usize, k: usize) -> M {
    M::from_fn(r, k, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Rank as the number of columns minus the kernel dimension.
pub fn rank(m: &M) -> usize {
    m.ncols() - nullity(std::slice::from_ref(m), m.ncols())
}

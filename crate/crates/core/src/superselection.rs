//! Finite toy model `H = ⊕_mu C^{n_mu} ⊗ C^{n_mu}` with the group algebra
//! acting from both sides: observables from the left, gauge transformations
//! from the right.
//!
//! Coordinates are `sqrt(lambda^mu) v^mu_ij`, flattened as `(mu, i, j)` with
//! `j` fastest, so the embedding of the group algebra is isometric. Blocks
//! follow the order of the irrep set.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{rank_one_blocks, AlgebraElement, GroupAlgebra};
use crate::linalg;
use crate::rep::{IrrepSet, RepError};
use crate::scalar::{cabs, cone, creal, czero, CMat, CVec, Cx, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToyError {
    #[error("ZeroVector: state has zero norm")]
    ZeroVector,
    #[error("state has length {got}, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("NonUnitVector: amplitude vector has norm {0}")]
    NonUnitVector(f64),
    #[error(transparent)]
    Rep(#[from] RepError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateClass<T: Real> {
    /// One sector, rank-one block `left right^T` (both unit vectors).
    Pure { mu: usize, left: CVec<T>, right: CVec<T> },
    /// One sector, block of rank two or more.
    Mixed { mu: usize },
    /// Support in several sectors.
    CrossSector { sectors: Vec<usize> },
}

impl<T: Real> StateClass<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            StateClass::Pure { .. } => "pure",
            StateClass::Mixed { .. } => "mixed",
            StateClass::CrossSector { .. } => "cross-sector",
        }
    }
}

/// Result of a commutant computation on one space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WightmanCheck {
    pub commutant_dim: usize,
    pub abelian: bool,
    pub max_relative_commutator: f64,
}

/// The multiplicity-free subspace `⊕_mu L^mu(e_1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSpace<T: Real> {
    pub dims: Vec<usize>,
    /// Isometry `H_tr -> H`, one column per `(mu, i)`.
    pub embedding: CMat<T>,
}

impl<T: Real> TruncatedSpace<T> {
    pub fn dim(&self) -> usize {
        self.embedding.ncols()
    }

    pub fn projector(&self) -> CMat<T> {
        linalg::projector_onto(&self.embedding)
    }

    /// `E^† X E`
    pub fn restrict(&self, x: &CMat<T>) -> CMat<T> {
        self.embedding.adjoint() * x * &self.embedding
    }
}

/// Scalar action of `C^mu` on the truncated sector.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualGauge<T: Real> {
    pub mu: usize,
    /// `(g, eta)` with `g` acting as `eta * 1` on `H^mu_tr`.
    pub action: Vec<(usize, Cx<T>)>,
    /// Largest deviation from a scalar, from leaving `H^mu_tr`, or from
    /// commuting with the block observables.
    pub residual: T,
}

#[derive(Debug, Clone)]
pub struct ToyModel<T: Real> {
    algebra: GroupAlgebra<T>,
    offsets: Vec<usize>,
}

impl<T: Real> ToyModel<T> {
    pub fn new(set: IrrepSet<T>) -> Self {
        let mut offsets = Vec::with_capacity(set.count());
        let mut acc = 0;
        for d in set.dims() {
            offsets.push(acc);
            acc += d * d;
        }
        Self { algebra: GroupAlgebra::new(set), offsets }
    }

    pub fn irreps(&self) -> &IrrepSet<T> {
        self.algebra.irreps()
    }

    pub fn algebra(&self) -> &GroupAlgebra<T> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.irreps().dims().iter().map(|d| d * d).sum()
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.irreps().dims()
    }

    pub fn index(&self, mu: usize, i: usize, j: usize) -> usize {
        self.offsets[mu] + i * self.irreps().dim(mu) + j
    }

    /// `v -> (sqrt(lambda^mu) v^mu_ij)`
    pub fn embed(&self, v: &AlgebraElement<T>) -> CVec<T> {
        let c = self.algebra.to_sectors(v).expect("element of this group");
        let mut out = CVec::zeros(self.dim());
        for (mu, b) in c.blocks.iter().enumerate() {
            let s = creal(self.algebra.lambda(mu).sqrt());
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    out[self.index(mu, i, j)] = b[(i, j)] * s;
                }
            }
        }
        out
    }

    pub fn blocks(&self, psi: &CVec<T>) -> Vec<CMat<T>> {
        (0..self.irreps().count())
            .map(|mu| {
                let d = self.irreps().dim(mu);
                DMatrix::from_fn(d, d, |i, j| psi[self.index(mu, i, j)])
            })
            .collect()
    }

    fn block_operator(&self, f: impl Fn(usize) -> CMat<T>) -> CMat<T> {
        let mut out = linalg::zeros(self.dim(), self.dim());
        for mu in 0..self.irreps().count() {
            let d = self.irreps().dim(mu);
            out.view_mut((self.offsets[mu], self.offsets[mu]), (d * d, d * d)).copy_from(&f(mu));
        }
        out
    }

    /// Left multiplication `x -> w^mu x` (observable side).
    pub fn left_operator(&self, w: &AlgebraElement<T>) -> CMat<T> {
        let c = self.algebra.to_sectors(w).expect("element of this group");
        self.block_operator(|mu| c.blocks[mu].kronecker(&linalg::identity(self.irreps().dim(mu))))
    }

    /// Right multiplication `x -> x v^mu` (gauge side).
    pub fn right_operator(&self, v: &AlgebraElement<T>) -> CMat<T> {
        let c = self.algebra.to_sectors(v).expect("element of this group");
        self.block_operator(|mu| linalg::identity::<T>(self.irreps().dim(mu)).kronecker(&c.blocks[mu].transpose()))
    }

    pub fn gauge_operators(&self) -> Vec<CMat<T>> {
        self.irreps().group().elements().map(|g| self.right_operator(&self.algebra.basis_element(g))).collect()
    }

    /// Basis of the observable algebra, the commutant of the gauge action.
    pub fn observable_algebra(&self) -> Vec<CMat<T>> {
        linalg::commutant(&self.gauge_operators(), self.dim())
    }

    pub fn wightman_full(&self) -> WightmanCheck {
        wightman(&self.observable_algebra(), self.dim())
    }

    pub fn truncate(&self) -> TruncatedSpace<T> {
        let dims = self.block_dims();
        let mut e = linalg::zeros(self.dim(), dims.iter().sum());
        let mut col = 0;
        for (mu, &d) in dims.iter().enumerate() {
            for i in 0..d {
                e[(self.index(mu, i, 0), col)] = cone();
                col += 1;
            }
        }
        TruncatedSpace { dims, embedding: e }
    }

    /// Orthonormal basis of `L^mu(a) = { x a^T }`.
    pub fn left_ideal_basis(&self, mu: usize, a: &CVec<T>) -> Result<CMat<T>, ToyError> {
        let d = self.irreps().dim(mu);
        check_unit(a)?;
        let mut out = linalg::zeros(self.dim(), d);
        for i in 0..d {
            for j in 0..d {
                out[(self.index(mu, i, j), i)] = a[j];
            }
        }
        Ok(out)
    }

    /// `T^mu(a)`: right multiplication by the element with block `conj(a) a^T`.
    pub fn sector_projector(&self, mu: usize, a: &CVec<T>) -> Result<CMat<T>, ToyError> {
        check_unit(a)?;
        let p = a.map(|z| z.conj()) * a.transpose();
        let d = self.irreps().dim(mu);
        Ok(self.block_operator(|nu| {
            if nu == mu {
                linalg::identity::<T>(d).kronecker(&p)
            } else {
                linalg::zeros(self.irreps().dim(nu).pow(2), self.irreps().dim(nu).pow(2))
            }
        }))
    }

    /// Observables restricted to the truncated space.
    pub fn truncated_observables(&self, tr: &TruncatedSpace<T>) -> Vec<CMat<T>> {
        self.observable_algebra().iter().map(|x| tr.restrict(x)).collect()
    }

    pub fn wightman_truncated(&self, tr: &TruncatedSpace<T>) -> WightmanCheck {
        wightman(&self.truncated_observables(tr), tr.dim())
    }

    /// The algebra spanned by rank-one sector projectors on `H_tr` is its
    /// own commutant and lies inside the restricted observables.
    pub fn jauch_maximal(&self, tr: &TruncatedSpace<T>) -> bool {
        let k = tr.dim();
        let projectors: Vec<CMat<T>> = (0..k)
            .map(|c| {
                let mut p = linalg::zeros(k, k);
                p[(c, c)] = cone();
                p
            })
            .collect();
        let comm = linalg::commutant(&projectors, k);
        let mut both = projectors.clone();
        both.extend(comm.iter().cloned());
        let own = comm.len() == k && linalg::span_dim(&both) == k;
        let obs = self.truncated_observables(tr);
        let mut with = obs.clone();
        with.extend(projectors);
        own && linalg::span_dim(&with) == linalg::span_dim(&obs)
    }

    pub fn classify_state(&self, psi: &CVec<T>) -> Result<StateClass<T>, ToyError> {
        if psi.len() != self.dim() {
            return Err(ToyError::WrongLength { got: psi.len(), expected: self.dim() });
        }
        if linalg::vec_norm(psi) == T::zero() {
            return Err(ToyError::ZeroVector);
        }
        let r = rank_one_blocks(&self.blocks(psi));
        Ok(match (r.mu, r.irreducible_member) {
            (Some(mu), true) => {
                let a = r.a.unwrap();
                let b = r.b.unwrap();
                let na = creal(linalg::vec_norm(&a));
                let nb = creal(linalg::vec_norm(&b));
                StateClass::Pure { mu, left: a / na, right: b / nb }
            }
            (Some(mu), false) => StateClass::Mixed { mu },
            (None, _) => StateClass::CrossSector { sectors: r.nonzero_sectors },
        })
    }

    /// Right multiplication by `g` in `C^mu`, restricted to `H^mu_tr`.
    pub fn residual_gauge_action(&self, tr: &TruncatedSpace<T>, mu: usize) -> Result<ResidualGauge<T>, ToyError> {
        let group = self.irreps().group();
        let c_mu = group.centralizing_subgroup(self.irreps().irrep(mu))?;
        let d = self.irreps().dim(mu);
        let start: usize = tr.dims[..mu].iter().sum();
        let e_mu = tr.embedding.columns(start, d).into_owned();
        let p_mu = linalg::projector_onto(&e_mu);
        let block_obs: Vec<CMat<T>> = self.observable_algebra().iter().map(|x| e_mu.adjoint() * x * &e_mu).collect();
        let mut residual = T::zero();
        let mut action = Vec::new();
        for g in c_mu {
            let r = self.right_operator(&self.algebra.basis_element(g));
            let leak = linalg::max_abs(&((linalg::identity(self.dim()) - &p_mu) * &r * &p_mu));
            let m = e_mu.adjoint() * &r * &e_mu;
            let eta = m[(0, 0)];
            let scalar = linalg::max_abs_diff(&m, &(linalg::identity::<T>(d) * eta));
            let comm = block_obs.iter().map(|o| linalg::max_abs(&linalg::commutator(o, &m))).fold(T::zero(), max);
            residual = max(max(residual, leak), max(scalar, comm));
            action.push((g, eta));
        }
        Ok(ResidualGauge { mu, action, residual })
    }

    pub fn summary(&self) -> Result<ToySummary, ToyError> {
        let tr = self.truncate();
        let group = self.irreps().group();
        let residual_gauge = (0..self.irreps().count())
            .map(|mu| {
                let r = self.residual_gauge_action(&tr, mu)?;
                Ok(GaugeSummary {
                    mu,
                    label: self.irreps().irrep(mu).label().to_string(),
                    elements: r.action.iter().map(|(g, _)| group.label(*g).to_string()).collect(),
                    phases: r.action.iter().map(|(_, z)| [z.re.as_f64(), z.im.as_f64()]).collect(),
                    residual: r.residual.as_f64(),
                })
            })
            .collect::<Result<Vec<_>, ToyError>>()?;
        let full = self.wightman_full();
        Ok(ToySummary {
            block_dims: self.block_dims(),
            dim: self.dim(),
            observable_dim: self.observable_algebra().len(),
            truncated_dim: tr.dim(),
            commutant_full: full,
            commutant_truncated: self.wightman_truncated(&tr),
            jauch_maximal: self.jauch_maximal(&tr),
            residual_gauge,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeSummary {
    pub mu: usize,
    pub label: String,
    pub elements: Vec<String>,
    pub phases: Vec<[f64; 2]>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToySummary {
    pub block_dims: Vec<usize>,
    pub dim: usize,
    pub observable_dim: usize,
    pub truncated_dim: usize,
    pub commutant_full: WightmanCheck,
    pub commutant_truncated: WightmanCheck,
    pub jauch_maximal: bool,
    pub residual_gauge: Vec<GaugeSummary>,
}

fn max<T: Real>(a: T, b: T) -> T {
    if b > a { b } else { a }
}

fn check_unit<T: Real>(a: &CVec<T>) -> Result<(), ToyError> {
    let n = linalg::vec_norm(a);
    if (n - T::one()).abs() > T::validation_tol() * T::lit(100.0) {
        return Err(ToyError::NonUnitVector(n.as_f64()));
    }
    Ok(())
}

fn wightman<T: Real>(algebra: &[CMat<T>], dim: usize) -> WightmanCheck {
    let comm = linalg::commutant(algebra, dim);
    let rel = linalg::max_relative_commutator(&comm);
    WightmanCheck { commutant_dim: comm.len(), abelian: rel < T::lit(1e-9), max_relative_commutator: rel.as_f64() }
}

/// Amplitude vector with a one in slot `k`.
pub fn unit_vector<T: Real>(d: usize, k: usize) -> CVec<T> {
    let mut v = CVec::from_element(d, czero());
    v[k] = cone();
    v
}

/// Sum of squared moduli per sector.
pub fn sector_weights<T: Real>(blocks: &[CMat<T>]) -> Vec<T> {
    blocks.iter().map(|b| b.iter().fold(T::zero(), |a, z| a + cabs(*z) * cabs(*z))).collect()
}

//! Functions on a finite cover `Q̄ = Q × G` with the free right action
//! `(q, h) g = (q, h g)`.
//!
//! Operators on `H = C^{Q̄}` are dense matrices acting on value vectors with
//! the counting measure; point `(q, h)` has index `q n + h`. Algebra-valued
//! functions live in `Ĥ = C^{Q̄ × G}` with index `(q n + h) n + g` for the
//! coefficient of `ĝ`, and carry the fiber inner product `(1/n) sum`.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraElement, GroupAlgebra};
use crate::group::FiniteGroup;
use crate::linalg::{self, StackedNullspace};
use crate::rep::{IrrepSet, RepError};
use crate::scalar::{cabs, cone, creal, czero, CMat, CVec, Cx, Real};

pub mod holonomy;

pub use holonomy::{holonomy_identity_failures, Step};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error("malformed cover description: {0}")]
    Malformed(String),
    #[error("NotEquivariant: residual {0:.3e}")]
    NotEquivariant(f64),
    #[error("NotInvariant: kernel invariance residual {0:.3e}")]
    NotInvariant(f64),
    #[error("NonUnitVector: amplitude vector has norm {0}")]
    NonUnitVector(f64),
    #[error("NotInCMu: element {element} does not centralize irrep {mu}")]
    NotInCMu { element: String, mu: usize },
    #[error("UnknownEdge: edge {0} does not exist")]
    UnknownEdge(usize),
    #[error("NotALoop: step {step} starts at vertex {found}, expected {expected}")]
    NotALoop { step: usize, expected: usize, found: usize },
    #[error("base subset contains vertex {0} outside the base")]
    BadRegion(usize),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// Base edge with its voltage, lifted as `(from, h) -> (to, voltage h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub voltage: usize,
}

/// Serialized cover: `{"base_size", "group", "edges": [{"from", "to", "voltage"}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSpec {
    pub base_size: usize,
    pub group: String,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: usize,
    pub to: usize,
    pub voltage: String,
}

#[derive(Debug, Clone)]
pub struct DiscreteCover<T: Real> {
    base_size: usize,
    algebra: GroupAlgebra<T>,
    edges: Vec<Edge>,
}

impl<T: Real> DiscreteCover<T> {
    pub fn new(base_size: usize, set: IrrepSet<T>) -> Self {
        Self { base_size, algebra: GroupAlgebra::new(set), edges: Vec::new() }
    }

    pub fn with_edges(mut self, edges: Vec<Edge>) -> Result<Self, CoverError> {
        for (k, e) in edges.iter().enumerate() {
            if e.from >= self.base_size || e.to >= self.base_size || e.voltage >= self.group().order() {
                return Err(CoverError::Malformed(format!("edges[{k}] refers to a missing vertex or element")));
            }
        }
        self.edges = edges;
        Ok(self)
    }

    pub fn from_spec(spec: &CoverSpec, set: IrrepSet<T>) -> Result<Self, CoverError> {
        if spec.base_size == 0 {
            return Err(CoverError::Malformed("base_size: must be positive".into()));
        }
        let g = set.group().clone();
        let edges = spec
            .edges
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let voltage = g.index_of(&e.voltage).ok_or_else(|| {
                    CoverError::Malformed(format!("edges[{k}].voltage: unknown element {:?}", e.voltage))
                })?;
                Ok(Edge { from: e.from, to: e.to, voltage })
            })
            .collect::<Result<Vec<_>, CoverError>>()?;
        Self::new(spec.base_size, set).with_edges(edges)
    }

    pub fn group(&self) -> &FiniteGroup {
        self.algebra.irreps().group()
    }

    pub fn irreps(&self) -> &IrrepSet<T> {
        self.algebra.irreps()
    }

    pub fn algebra(&self) -> &GroupAlgebra<T> {
        &self.algebra
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    fn n(&self) -> usize {
        self.group().order()
    }

    /// `|Q̄|`
    pub fn dim(&self) -> usize {
        self.base_size * self.n()
    }

    pub fn hat_dim(&self) -> usize {
        self.dim() * self.n()
    }

    pub fn point(&self, q: usize, h: usize) -> usize {
        q * self.n() + h
    }

    /// `(q, h) -> q`
    pub fn project(&self, x: usize) -> usize {
        x / self.n()
    }

    /// `x g`
    pub fn act(&self, x: usize, g: usize) -> usize {
        let (q, h) = (x / self.n(), x % self.n());
        self.point(q, self.group().mul(h, g))
    }

    /// `psi -> psi ∘ R_g`
    pub fn translation(&self, g: usize) -> CMat<T> {
        let mut m = linalg::zeros(self.dim(), self.dim());
        for x in 0..self.dim() {
            m[(x, self.act(x, g))] = cone();
        }
        m
    }

    /// `T_v psi = sum_g v(g) psi ∘ R_{g^-1}`
    pub fn right_action(&self, v: &AlgebraElement<T>) -> CMat<T> {
        let g = self.group();
        v.coeffs()
            .iter()
            .enumerate()
            .fold(linalg::zeros(self.dim(), self.dim()), |acc, (x, c)| acc + self.translation(g.inv(x)) * *c)
    }

    /// `T^mu(a) psi = (n_mu/n) sum_g a^T D^mu(g) conj(a) psi ∘ R_g`
    pub fn sector_projector(&self, mu: usize, a: &CVec<T>) -> Result<CMat<T>, CoverError> {
        check_unit(a)?;
        let c = sector_coefficients(self.irreps(), mu, a);
        Ok(self.group().elements().fold(linalg::zeros(self.dim(), self.dim()), |acc, g| acc + self.translation(g) * c[g]))
    }

    pub fn sector_projector_index(&self, mu: usize, i: usize) -> CMat<T> {
        let a = crate::superselection::unit_vector(self.irreps().dim(mu), i);
        self.sector_projector(mu, &a).expect("unit vector")
    }

    /// `T^mu = sum_i T^mu_i`
    pub fn isotypic_projector(&self, mu: usize) -> CMat<T> {
        (0..self.irreps().dim(mu)).fold(linalg::zeros(self.dim(), self.dim()), |acc, i| acc + self.sector_projector_index(mu, i))
    }

    /// `F(psi)(x) = sum_h h^ psi(x h)`
    pub fn lift_map(&self) -> CMat<T> {
        let n = self.n();
        let mut f = linalg::zeros(self.hat_dim(), self.dim());
        for x in 0..self.dim() {
            for h in 0..n {
                f[(x * n + h, self.act(x, h))] = cone();
            }
        }
        f
    }

    /// `E(psihat)(x) = psihat(x)(e)`
    pub fn eval_map(&self) -> CMat<T> {
        let n = self.n();
        let e = self.group().identity();
        let mut m = linalg::zeros(self.dim(), self.hat_dim());
        for x in 0..self.dim() {
            m[(x, x * n + e)] = cone();
        }
        m
    }

    pub fn lift(&self, psi: &CVec<T>) -> CVec<T> {
        self.lift_map() * psi
    }

    /// `E`, refusing inputs that are not equivariant.
    pub fn eval(&self, psihat: &CVec<T>) -> Result<CVec<T>, CoverError> {
        let r = self.equivariance_residual(psihat);
        let scale = linalg::max_abs_vec(psihat);
        if r > T::validation_tol() * (T::one() + scale) {
            return Err(CoverError::NotEquivariant(r.as_f64()));
        }
        Ok(self.eval_map() * psihat)
    }

    /// Pointwise `psihat(x) -> u psihat(x)`.
    pub fn hat_left(&self, u: &AlgebraElement<T>) -> CMat<T> {
        linalg::identity::<T>(self.dim()).kronecker(&self.algebra.left_matrix(u))
    }

    /// Pointwise `psihat(x) -> psihat(x) v`.
    pub fn hat_right(&self, v: &AlgebraElement<T>) -> CMat<T> {
        linalg::identity::<T>(self.dim()).kronecker(&self.algebra.right_matrix(v))
    }

    /// `psihat -> psihat ∘ R_g`
    pub fn hat_translation(&self, g: usize) -> CMat<T> {
        self.translation(g).kronecker(&linalg::identity(self.n()))
    }

    /// `max_g |psihat ∘ R_g - g^-1 psihat|`
    pub fn equivariance_residual(&self, psihat: &CVec<T>) -> T {
        let g = self.group();
        g.elements()
            .map(|x| {
                let lhs = self.hat_translation(x) * psihat;
                let rhs = self.hat_left(&self.algebra.basis_element(g.inv(x))) * psihat;
                linalg::max_abs_vec(&(lhs - rhs))
            })
            .fold(T::zero(), max)
    }

    /// Fiber inner product on `Ĥ`.
    pub fn hat_inner(&self, a: &CVec<T>, b: &CVec<T>) -> Cx<T> {
        a.dotc(b) / creal(T::from_usize(self.n()).unwrap())
    }

    fn region_mask(&self, region: &[usize]) -> Result<Vec<bool>, CoverError> {
        let mut mask = vec![false; self.base_size];
        for &q in region {
            if q >= self.base_size {
                return Err(CoverError::BadRegion(q));
            }
            mask[q] = true;
        }
        Ok(mask)
    }

    /// Operator `psihat -> sum_g u_g (chi_Ū psihat) ∘ R_g` on `Ĥ`, where
    /// `u_g` acts by left multiplication. For `x = (q, h)` only `g = h^-1`
    /// reaches the sheet `Ū = U × {e}`, so each block row has one block.
    fn sheet_operator(&self, region: &[usize], u: impl Fn(usize) -> CMat<T>) -> Result<CMat<T>, CoverError> {
        let mask = self.region_mask(region)?;
        let n = self.n();
        let g = self.group();
        let mut m = linalg::zeros(self.hat_dim(), self.hat_dim());
        for x in 0..self.dim() {
            let (q, h) = (x / n, x % n);
            if !mask[q] {
                continue;
            }
            let hi = g.inv(h);
            let y = self.act(x, hi);
            m.view_mut((x * n, y * n), (n, n)).copy_from(&u(hi));
        }
        Ok(m)
    }

    /// `P_U psihat = sum_g g^ (chi_Ū psihat) ∘ R_g` on `Ĥ`.
    pub fn localize_hat(&self, region: &[usize]) -> Result<CMat<T>, CoverError> {
        self.sheet_operator(region, |g| self.algebra.left_matrix(&self.algebra.basis_element(g)))
    }

    /// Multiplication by the indicator of `τ^-1(U)` on `H`.
    pub fn localize(&self, region: &[usize]) -> Result<CMat<T>, CoverError> {
        let mask = self.region_mask(region)?;
        let mut p = linalg::zeros(self.dim(), self.dim());
        for x in 0..self.dim() {
            if mask[self.project(x)] {
                p[(x, x)] = cone();
            }
        }
        Ok(p)
    }

    /// `gamma_v psihat = sum_h v(h) sum_g g^ h^ (chi_Ū psihat) ∘ R_g` on `Ĥ`.
    pub fn gamma_hat(&self, v: &AlgebraElement<T>, region: &[usize]) -> Result<CMat<T>, CoverError> {
        let lv = self.algebra.left_matrix(v);
        self.sheet_operator(region, |g| self.algebra.left_matrix(&self.algebra.basis_element(g)) * &lv)
    }

    /// `O_v = gamma_v ∘ P_U` on `Ĥ`.
    pub fn localized_left_hat(&self, v: &AlgebraElement<T>, region: &[usize]) -> Result<CMat<T>, CoverError> {
        Ok(self.gamma_hat(v, region)? * self.localize_hat(region)?)
    }

    /// `O_v` transported to `H` as `E O_v F`.
    pub fn localized_left(&self, v: &AlgebraElement<T>, region: &[usize]) -> Result<CMat<T>, CoverError> {
        Ok(self.eval_map() * self.localized_left_hat(v, region)? * self.lift_map())
    }

    /// `max_g |K(xg, yg) - K(x, y)|`
    pub fn invariance_residual(&self, k: &CMat<T>) -> T {
        self.group()
            .elements()
            .map(|g| {
                let p = self.translation(g);
                linalg::max_abs_diff(&(&p * k * p.transpose()), k)
            })
            .fold(T::zero(), max)
    }

    /// `(1/n) sum_g K(xg, yg)`
    pub fn average_kernel(&self, k: &CMat<T>) -> CMat<T> {
        let n = creal(T::from_usize(self.n()).unwrap());
        self.group()
            .elements()
            .fold(linalg::zeros(self.dim(), self.dim()), |acc, g| {
                let p = self.translation(g);
                acc + &p * k * p.transpose()
            })
            / n
    }

    /// Indicators of the `G`-orbits on `Q̄ × Q̄`, a basis of invariant kernels.
    pub fn invariant_kernel_basis(&self) -> Vec<CMat<T>> {
        let e = self.group().identity();
        let mut out = Vec::new();
        for q in 0..self.base_size {
            let x = self.point(q, e);
            for y in 0..self.dim() {
                let mut k = linalg::zeros(self.dim(), self.dim());
                for g in self.group().elements() {
                    k[(self.act(x, g), self.act(y, g))] = cone();
                }
                out.push(k);
            }
        }
        out
    }

    pub fn random_invariant_hermitian(&self, rng: &mut impl Rng) -> CMat<T> {
        let raw = random_matrix::<T>(self.dim(), rng);
        self.average_kernel(&linalg::hermitian_part(&raw))
    }

    /// `K^mu_i(x', x) = (n_mu/n) sum_g D^mu_ii(g) K(x' g, x)`
    pub fn project_kernel(&self, k: &CMat<T>, mu: usize, i: usize) -> Result<CMat<T>, CoverError> {
        let r = self.invariance_residual(k);
        if r > T::validation_tol() * (T::one() + linalg::max_abs(k)) {
            return Err(CoverError::NotInvariant(r.as_f64()));
        }
        Ok(self.sector_projector_index(mu, i) * k)
    }

    /// Right translation by `c` on each fiber, for every `c` commuting with
    /// the whole group.
    pub fn gauge_transformations(&self) -> GaugeTransformations {
        let g = self.group();
        let mut central = Vec::new();
        let mut rejected = Vec::new();
        for c in g.elements() {
            let f = self.translation(c);
            let commutes = g.elements().all(|x| {
                let r = self.translation(x);
                linalg::max_abs_diff(&(&f * &r), &(&r * &f)) == T::zero()
            });
            let fiberwise = (0..self.dim()).all(|x| self.project(self.act(x, c)) == self.project(x));
            if commutes && fiberwise {
                central.push(c);
            } else {
                rejected.push(c);
            }
        }
        GaugeTransformations { central, rejected }
    }

    /// Translation action of `g ∈ C^mu` on `D^mu`-equivariant vector
    /// functions, `(gamma_g sigma)(x) = sigma(x g^-1)`. Returns the operator on
    /// the `n_mu |Q̄|` dimensional space of all vector functions (index
    /// `x n_mu + i`) and the equivariant subspace basis.
    pub fn c_mu_action(&self, mu: usize, g: usize) -> Result<CMuAction<T>, CoverError> {
        let group = self.group().clone();
        let c_mu = group.centralizing_subgroup(self.irreps().irrep(mu))?;
        if !c_mu.contains(&g) {
            return Err(CoverError::NotInCMu { element: group.label(g).to_string(), mu });
        }
        let d = self.irreps().dim(mu);
        let op = self.translation(group.inv(g)).kronecker(&linalg::identity(d));
        // sigma(q, h) = D(h^-1) s(q), one basis vector per (q, k)
        let mut basis = linalg::zeros(self.dim() * d, self.base_size * d);
        for q in 0..self.base_size {
            for k in 0..d {
                for h in group.elements() {
                    let m = self.irreps().d(mu, group.inv(h));
                    for i in 0..d {
                        basis[(self.point(q, h) * d + i, q * d + k)] = m[(i, k)];
                    }
                }
            }
        }
        let scale = creal(T::from_usize(self.n()).unwrap().sqrt());
        let basis = basis / scale;
        let global = linalg::identity::<T>(self.dim()).kronecker(self.irreps().d(mu, g));
        let agree = linalg::max_abs_diff(&(&op * &basis), &(&global * &basis));
        let eq_res = self.vector_equivariance_residual(mu, &(&op * &basis));
        Ok(CMuAction { operator: op, equivariant_basis: basis, global, agreement_residual: agree, equivariance_residual: eq_res })
    }

    /// `max |sigma(x g) - D(g^-1) sigma(x)|` over the columns of `sigmas`.
    pub fn vector_equivariance_residual(&self, mu: usize, sigmas: &CMat<T>) -> T {
        let d = self.irreps().dim(mu);
        let g = self.group();
        let mut worst = T::zero();
        for x in g.elements() {
            let lhs = self.translation(x).kronecker(&linalg::identity(d)) * sigmas;
            let rhs = linalg::identity::<T>(self.dim()).kronecker(self.irreps().d(mu, g.inv(x))) * sigmas;
            worst = max(worst, linalg::max_abs_diff(&lhs, &rhs));
        }
        worst
    }

    /// Complex conjugation maps the image of `T^mu(a)` onto the image of
    /// `T^lambda(conj(U a))` with `lambda` the conjugate partner. Returns the
    /// sine of the largest principal angle.
    pub fn time_reversal_gap(&self, mu: usize, a: &CVec<T>) -> Result<Option<T>, CoverError> {
        let p = self.irreps().conjugate_partner(mu);
        let u = match p.witness {
            Some(u) => u,
            None => return Ok(None),
        };
        let b = (&u * a).map(|z| z.conj());
        let img = linalg::range_basis(&self.sector_projector(mu, a)?);
        let conj_img = linalg::conj(&img);
        let target = linalg::range_basis(&self.sector_projector(p.partner, &b)?);
        Ok(linalg::subspace_gap(&conj_img, &target))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaugeTransformations {
    pub central: Vec<usize>,
    pub rejected: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct CMuAction<T: Real> {
    pub operator: CMat<T>,
    /// Orthonormal columns spanning the `D^mu`-equivariant functions.
    pub equivariant_basis: CMat<T>,
    /// Pointwise multiplication by `D^mu(g)`.
    pub global: CMat<T>,
    pub agreement_residual: T,
    pub equivariance_residual: T,
}

/// `c(g) = (n_mu/n) a^T D^mu(g) conj(a)`, so that `T^mu(a) = sum_g c(g) R_g`
/// for any right translation representation `R`.
pub fn sector_coefficients<T: Real>(set: &IrrepSet<T>, mu: usize, a: &CVec<T>) -> Vec<Cx<T>> {
    let g = set.group();
    let w = creal(T::from_usize(set.dim(mu)).unwrap() / T::from_usize(g.order()).unwrap());
    let abar = a.map(|z| z.conj());
    g.elements().map(|x| (a.transpose() * set.d(mu, x) * &abar)[(0, 0)] * w).collect()
}

pub(crate) fn max<T: Real>(a: T, b: T) -> T {
    if b > a { b } else { a }
}

pub(crate) fn check_unit<T: Real>(a: &CVec<T>) -> Result<(), CoverError> {
    let n = linalg::vec_norm(a);
    if (n - T::one()).abs() > T::validation_tol() * T::lit(100.0) {
        return Err(CoverError::NonUnitVector(n.as_f64()));
    }
    Ok(())
}

pub fn random_matrix<T: Real>(n: usize, rng: &mut impl Rng) -> CMat<T> {
    DMatrix::from_fn(n, n, |_, _| Complex::new(T::lit(rng.random_range(-1.0..1.0)), T::lit(rng.random_range(-1.0..1.0))))
}

pub fn random_vector<T: Real>(n: usize, rng: &mut impl Rng) -> CVec<T> {
    CVec::from_fn(n, |_, _| Complex::new(T::lit(rng.random_range(-1.0..1.0)), T::lit(rng.random_range(-1.0..1.0))))
}

pub fn random_unit_vector<T: Real>(n: usize, rng: &mut impl Rng) -> CVec<T> {
    let v = random_vector::<T>(n, rng);
    let s = creal(linalg::vec_norm(&v));
    v / s
}

/// Theorem checks on the sector decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremChecks {
    /// Commutant dimension of the observables restricted to each `T^mu_i` image.
    pub image_commutant_dims: Vec<Vec<usize>>,
    /// Dimension of the joint commutant of observables and right action.
    pub joint_commutant_dim: usize,
    /// Gap between the closure of a random vector and the selected sectors.
    pub reduction_gap: f64,
    pub reduction_sectors: Vec<usize>,
    /// Leakage of each `T^mu_0` image under right translations.
    pub right_action_leakage: Vec<f64>,
    pub right_action_invariant: Vec<bool>,
    pub abelian: Vec<bool>,
}

impl TheoremChecks {
    pub fn irreducible(&self) -> bool {
        self.image_commutant_dims.iter().flatten().all(|&d| d == 1)
    }

    pub fn abelian_iff_invariant(&self) -> bool {
        self.right_action_invariant == self.abelian
    }
}

impl<T: Real> DiscreteCover<T> {
    /// Checks that each `T^mu_i` image is irreducible for the invariant
    /// kernels, that jointly invariant subspaces are sums of whole sectors,
    /// and that right translations preserve a `T^mu_i` image only for
    /// one-dimensional `mu`.
    pub fn theorem_checks(&self, rng: &mut impl Rng) -> TheoremChecks {
        let m = self.irreps().count();
        let kernels = self.invariant_kernel_basis();
        let image_commutant_dims = (0..m)
            .map(|mu| {
                (0..self.irreps().dim(mu))
                    .map(|i| {
                        let b = linalg::range_basis(&self.sector_projector_index(mu, i));
                        let restricted: Vec<CMat<T>> = kernels.iter().map(|k| b.adjoint() * k * &b).collect();
                        linalg::commutant(&restricted, b.ncols()).len()
                    })
                    .collect()
            })
            .collect();

        // joint commutant, solved inside the invariant-kernel span (which is
        // the commutant of the right action); two generic kernels generate
        // the observable algebra
        let gens: Vec<CMat<T>> = (0..2).map(|_| self.random_invariant_hermitian(rng)).collect();
        let mut acc = StackedNullspace::new(kernels.len());
        for r in &gens {
            let cols: Vec<CVec<T>> = kernels.iter().map(|k| linalg::vectorize(&linalg::commutator(r, k))).collect();
            acc.push(&linalg::columns_to_matrix(self.dim() * self.dim(), &cols));
        }
        let joint_commutant_dim = acc.finish().ncols();

        let reduction_sectors: Vec<usize> = (0..m).filter(|mu| mu % 2 == 0).collect();
        let start = reduction_sectors.iter().fold(CVec::zeros(self.dim()), |acc, &mu| {
            acc + self.isotypic_projector(mu) * random_vector::<T>(self.dim(), rng)
        });
        let mut ops: Vec<CMat<T>> = gens;
        ops.extend(self.group().elements().map(|g| self.translation(g)));
        let closure = krylov_closure(&ops, &start);
        let target = linalg::range_basis(
            &reduction_sectors.iter().fold(linalg::zeros(self.dim(), self.dim()), |acc, &mu| acc + self.isotypic_projector(mu)),
        );
        let reduction_gap = linalg::subspace_gap(&closure, &target).map(|t| t.as_f64()).unwrap_or(f64::INFINITY);

        let mut right_action_leakage = Vec::new();
        for mu in 0..m {
            let p = self.sector_projector_index(mu, 0);
            let q = linalg::identity::<T>(self.dim()) - &p;
            let leak = self.group().elements().map(|g| linalg::max_abs(&(&q * self.translation(g) * &p))).fold(T::zero(), max);
            right_action_leakage.push(leak.as_f64());
        }
        let tol = T::validation_tol().as_f64();
        TheoremChecks {
            image_commutant_dims,
            joint_commutant_dim,
            reduction_gap,
            reduction_sectors,
            right_action_invariant: right_action_leakage.iter().map(|&l| l < tol).collect(),
            right_action_leakage,
            abelian: self.irreps().dims().iter().map(|&d| d == 1).collect(),
        }
    }
}

/// Orthonormal basis of the smallest subspace containing `v` and invariant
/// under every operator in `ops`.
pub fn krylov_closure<T: Real>(ops: &[CMat<T>], v: &CVec<T>) -> CMat<T> {
    let mut basis: Vec<CVec<T>> = Vec::new();
    if !linalg::extend_orthonormal(&mut basis, v) {
        return linalg::zeros(v.len(), 0);
    }
    let mut next = 0;
    while next < basis.len() {
        let b = basis[next].clone();
        for op in ops {
            let w = op * &b;
            linalg::extend_orthonormal(&mut basis, &w);
        }
        next += 1;
    }
    linalg::columns_to_matrix(v.len(), &basis)
}

/// Max modulus of `a - b` over vectors.
pub fn vec_diff<T: Real>(a: &CVec<T>, b: &CVec<T>) -> T {
    a.iter().zip(b.iter()).fold(T::zero(), |acc, (x, y)| max(acc, cabs(x - y)))
}

pub fn zero_vec<T: Real>(n: usize) -> CVec<T> {
    CVec::from_element(n, czero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::superselection::unit_vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cover(name: &str, q: usize) -> DiscreteCover<f64> {
        DiscreteCover::new(q, fixtures::builtin::<f64>(name).unwrap().1)
    }

    fn rank(m: &CMat<f64>) -> usize {
        linalg::rank(m)
    }

    #[test]
    fn action_is_free_and_fiber_preserving() {
        let c = cover("s3", 3);
        for x in 0..c.dim() {
            for g in c.group().elements() {
                assert_eq!(c.project(c.act(x, g)), c.project(x));
                assert_eq!(c.act(x, g) == x, g == c.group().identity());
            }
        }
    }

    #[test]
    fn lift_of_delta_is_supported_on_its_fiber() {
        let c = cover("s3", 2);
        let mut psi = zero_vec::<f64>(c.dim());
        let x0 = c.point(1, 3);
        psi[x0] = Complex::new(1.0, 0.0);
        let hat = c.lift(&psi);
        let n = 6;
        for x in 0..c.dim() {
            let nz = (0..n).filter(|&h| hat[x * n + h] != Complex::new(0.0, 0.0)).count();
            assert_eq!(nz, usize::from(c.project(x) == 1), "point {x}");
        }
        assert!(c.equivariance_residual(&hat) == 0.0);
    }

    #[test]
    fn e_after_f_and_isometry() {
        let c = cover("s3", 5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let psi = random_vector::<f64>(c.dim(), &mut rng);
            let hat = c.lift(&psi);
            assert!(vec_diff(&c.eval(&hat).unwrap(), &psi) < 1e-15);
            let lhs = c.hat_inner(&hat, &hat).re.sqrt();
            assert!((lhs - linalg::vec_norm(&psi)).abs() < 1e-12);
        }
        let f = c.lift_map();
        let e = c.eval_map();
        assert!(linalg::max_abs_diff(&(&f * &e * &f), &f) < 1e-15);
    }

    #[test]
    fn eval_rejects_non_equivariant() {
        let c = cover("z3", 2);
        let mut hat = zero_vec::<f64>(c.hat_dim());
        hat[0] = Complex::new(1.0, 0.0);
        assert!(matches!(c.eval(&hat), Err(CoverError::NotEquivariant(_))));
    }

    #[test]
    fn right_action_is_pointwise_right_multiplication() {
        let c = cover("d8star", 4);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = crate::algebra::random_element::<f64>(8, &mut rng);
        let f = c.lift_map();
        let lhs = &f * c.right_action(&v);
        let rhs = c.hat_right(&v) * &f;
        assert!(linalg::max_abs_diff(&lhs, &rhs) < 1e-12);
        let unit = c.right_action(&c.algebra().unit());
        assert_eq!(unit, linalg::identity(c.dim()));
    }

    #[test]
    fn composition_rule() {
        let c = cover("s3", 2);
        let b = c.algebra().adapted_basis();
        for (mu, i, j, x) in b.all() {
            for (nu, k, l, y) in b.all() {
                let p = c.right_action(x) * c.right_action(y);
                let expect = if mu == nu && j == k { c.right_action(b.unit(mu, i, l)) } else { linalg::zeros(c.dim(), c.dim()) };
                assert!(linalg::max_abs_diff(&p, &expect) < 1e-12);
            }
        }
    }

    #[test]
    fn sector_projectors() {
        let c = cover("s3", 5);
        let t0 = c.sector_projector_index(0, 0);
        assert_eq!(rank(&t0), 5);
        let avg = c.group().elements().fold(linalg::zeros::<f64>(30, 30), |acc, g| acc + c.translation(g)) / Complex::new(6.0, 0.0);
        assert!(linalg::max_abs_diff(&t0, &avg) < 1e-15);
        let t = c.sector_projector(2, &unit_vector(2, 0)).unwrap();
        assert_eq!(rank(&t), 10);
        assert!(linalg::max_abs_diff(&(&t * &t), &t) < 1e-12);
        assert!(linalg::max_abs_diff(&t.adjoint(), &t) < 1e-12);
        assert_eq!(rank(&c.isotypic_projector(2)), 20);
        let sum = (0..3).fold(linalg::zeros::<f64>(30, 30), |acc, mu| acc + c.isotypic_projector(mu));
        assert!(linalg::max_abs_diff(&sum, &linalg::identity(30)) < 1e-12);
        let bad = unit_vector::<f64>(2, 0) * Complex::new(0.5, 0.0);
        assert!(matches!(c.sector_projector(2, &bad), Err(CoverError::NonUnitVector(_))));
    }

    #[test]
    fn abelian_projector_uses_characters() {
        let c = cover("z4", 2);
        let chi = c.irreps().irrep(1).character();
        let direct = c.group().elements().fold(linalg::zeros::<f64>(8, 8), |acc, g| acc + c.translation(g) * chi[g]) / Complex::new(4.0, 0.0);
        assert!(linalg::max_abs_diff(&c.sector_projector_index(1, 0), &direct) < 1e-15);
    }

    #[test]
    fn kernels_and_propagators() {
        let c = cover("s3", 4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(c.project_kernel(&linalg::identity(24), 2, 1).unwrap(), c.sector_projector_index(2, 1));
        let h = c.random_invariant_hermitian(&mut rng);
        assert!(c.invariance_residual(&h) < 1e-14);
        let k = |t: f64| linalg::unitary_propagator(&h, t);
        for (mu, i) in [(0, 0), (1, 0), (2, 0), (2, 1)] {
            let t = c.sector_projector_index(mu, i);
            assert!(linalg::max_abs(&linalg::commutator(&t, &k(0.7))) < 1e-12);
            let a = c.project_kernel(&k(0.3), mu, i).unwrap();
            let b = c.project_kernel(&k(0.45), mu, i).unwrap();
            let ab = c.project_kernel(&k(0.75), mu, i).unwrap();
            assert!(linalg::max_abs_diff(&(&a * &b), &ab) < 1e-9);
        }
        let raw = random_matrix::<f64>(24, &mut rng);
        assert!(matches!(c.project_kernel(&raw, 0, 0), Err(CoverError::NotInvariant(_))));
    }

    #[test]
    fn invariant_kernel_basis_is_the_commutant() {
        let c = cover("s3", 2);
        let basis = c.invariant_kernel_basis();
        assert_eq!(basis.len(), 2 * 12);
        let gens: Vec<CMat<f64>> = c.group().elements().map(|g| c.translation(g)).collect();
        assert_eq!(linalg::commutant(&gens, 12).len(), basis.len());
        assert!(basis.iter().all(|k| c.invariance_residual(k) == 0.0));
    }

    #[test]
    fn localization() {
        let c = cover("s3", 4);
        let region = [0, 2];
        let ph = c.localize_hat(&region).unwrap();
        let f = c.lift_map();
        let p = c.localize(&region).unwrap();
        assert!(linalg::max_abs_diff(&(&ph * &f), &(&f * &p)) < 1e-15);
        assert!(linalg::max_abs_diff(&(c.eval_map() * &ph * &f), &p) < 1e-15);
        assert_eq!(c.localize(&[0, 1, 2, 3]).unwrap(), linalg::identity(24));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = crate::algebra::random_element::<f64>(6, &mut rng);
        assert!(linalg::max_abs(&linalg::commutator(&p, &c.right_action(&v))) < 1e-12);
        let o = c.localized_left(&c.algebra().unit(), &region).unwrap();
        assert!(linalg::max_abs_diff(&o, &p) < 1e-12);
        assert!(matches!(c.localize(&[7]), Err(CoverError::BadRegion(7))));
    }

    #[test]
    fn sheet_operators_match_literal_sums() {
        let c = cover("s3", 3);
        let region = [0, 2];
        let a = c.algebra();
        let n = 6;
        let mut chi = linalg::zeros::<f64>(c.hat_dim(), c.hat_dim());
        for q in region {
            let x = c.point(q, 0);
            for k in 0..n {
                chi[(x * n + k, x * n + k)] = Complex::new(1.0, 0.0);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let v = crate::algebra::random_element::<f64>(n, &mut rng);
        let (mut p, mut gam) = (linalg::zeros::<f64>(c.hat_dim(), c.hat_dim()), linalg::zeros::<f64>(c.hat_dim(), c.hat_dim()));
        for g in c.group().elements() {
            let lg = c.hat_left(&a.basis_element(g));
            p += &lg * c.hat_translation(g) * &chi;
            gam += &lg * c.hat_left(&v) * c.hat_translation(g) * &chi;
        }
        assert!(linalg::max_abs_diff(&c.localize_hat(&region).unwrap(), &p) < 1e-15);
        assert!(linalg::max_abs_diff(&c.gamma_hat(&v, &region).unwrap(), &gam) < 1e-13);
    }

    #[test]
    fn localized_left_action_matches_direct_formula() {
        let c = cover("s3", 3);
        let g = c.group().clone();
        let region = [1];
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let v = crate::algebra::random_element::<f64>(6, &mut rng);
        let o = c.localized_left(&v, &region).unwrap();
        // (O psi)(q, k) = [q in U] sum_h v(h) psi(q, h^-1 k)
        let mut direct = linalg::zeros::<f64>(18, 18);
        for k in g.elements() {
            for h in g.elements() {
                direct[(c.point(1, k), c.point(1, g.mul(g.inv(h), k)))] += v.coeffs()[h];
            }
        }
        assert!(linalg::max_abs_diff(&o, &direct) < 1e-12);
    }

    #[test]
    fn gamma_is_a_group_action_on_localized_states() {
        let c = cover("s3", 2);
        let region = [0];
        let g = c.group().clone();
        let a = c.algebra();
        let p = c.localize_hat(&region).unwrap();
        for x in g.elements() {
            for y in g.elements() {
                let lhs = c.gamma_hat(&a.basis_element(x), &region).unwrap() * c.gamma_hat(&a.basis_element(y), &region).unwrap() * &p;
                let rhs = c.gamma_hat(&a.basis_element(g.mul(x, y)), &region).unwrap() * &p;
                assert!(linalg::max_abs_diff(&lhs, &rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn self_adjoint_examples() {
        let c = cover("s3", 2);
        let a = c.algebra();
        let g = c.group().clone();
        let x = g.index_of("(012)").unwrap();
        let v = a.basis_element(x).add(&a.basis_element(g.inv(x))).unwrap();
        let o = c.localized_left(&v, &[0]).unwrap();
        assert!(linalg::max_abs_diff(&o, &o.adjoint()) < 1e-14);
        let o = c.localized_left(&a.basis_element(x), &[0]).unwrap();
        assert!(linalg::max_abs_diff(&o, &o.adjoint()) > 0.5);
    }

    #[test]
    fn gauge_counts() {
        assert_eq!(cover("z5", 2).gauge_transformations().central.len(), 5);
        let d = cover("d8star", 2);
        let gt = d.gauge_transformations();
        let labels: Vec<&str> = gt.central.iter().map(|&c| d.group().label(c)).collect();
        assert_eq!(labels, vec!["1", "-1"]);
        assert_eq!(cover("s3", 2).gauge_transformations().central, vec![0]);
    }

    #[test]
    fn c_mu_examples() {
        let c = cover("d8star", 2);
        let g = c.group().clone();
        let minus = g.index_of("-1").unwrap();
        let act = c.c_mu_action(4, minus).unwrap();
        assert!(act.agreement_residual < 1e-14);
        assert!(act.equivariance_residual < 1e-14);
        let restricted = act.equivariant_basis.adjoint() * &act.operator * &act.equivariant_basis;
        assert!(linalg::max_abs_diff(&restricted, &(-linalg::identity::<f64>(4))) < 1e-12);
        let e = c.c_mu_action(4, g.identity()).unwrap();
        assert!(linalg::max_abs_diff(&(e.equivariant_basis.adjoint() * &e.operator * &e.equivariant_basis), &linalg::identity(4)) < 1e-12);
        assert!(matches!(c.c_mu_action(4, g.index_of("i").unwrap()), Err(CoverError::NotInCMu { .. })));
        let k = g.index_of("k").unwrap();
        let one = c.c_mu_action(1, k).unwrap();
        let phase = c.irreps().d(1, k)[(0, 0)];
        let restricted = one.equivariant_basis.adjoint() * &one.operator * &one.equivariant_basis;
        assert!(linalg::max_abs_diff(&restricted, &(linalg::identity::<f64>(2) * phase)) < 1e-12);
    }

    #[test]
    fn theorem_on_small_cover() {
        let c = cover("s3", 2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = c.theorem_checks(&mut rng);
        assert!(t.irreducible(), "{:?}", t.image_commutant_dims);
        assert_eq!(t.joint_commutant_dim, 3);
        assert!(t.reduction_gap < 1e-8, "{}", t.reduction_gap);
        assert_eq!(t.right_action_invariant, vec![true, true, false]);
        assert!(t.abelian_iff_invariant());
    }

    #[test]
    fn time_reversal_maps_sectors() {
        let c = cover("z3", 2);
        let a = unit_vector::<f64>(1, 0);
        assert!(c.time_reversal_gap(1, &a).unwrap().unwrap() < 1e-10);
        let d = cover("d8star", 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_unit_vector::<f64>(2, &mut rng);
        assert!(d.time_reversal_gap(4, &a).unwrap().unwrap() < 1e-10);
    }

    #[test]
    fn projector_ranges_on_cyclic_cover() {
        // circulant projectors with many exact zeros; a plain SVD got these wrong
        let c = cover("z6", 3);
        for mu in 0..6 {
            let p = c.sector_projector_index(mu, 0);
            let r = linalg::range_basis(&p);
            assert_eq!(r.ncols(), 3);
            assert!(linalg::max_abs_diff(&(&p * &r), &r) < 1e-12);
            assert!(c.time_reversal_gap(mu, &unit_vector(1, 0)).unwrap().unwrap() < 1e-10);
        }
    }

    #[test]
    fn spec_round_trip() {
        let (_, set) = fixtures::builtin::<f64>("d8star").unwrap();
        let spec: CoverSpec = serde_json::from_str(
            r#"{"base_size": 2, "group": "d8star", "edges": [{"from": 0, "to": 1, "voltage": "i"}]}"#,
        )
        .unwrap();
        let c = DiscreteCover::from_spec(&spec, set.clone()).unwrap();
        assert_eq!(c.edges()[0].voltage, 2);
        let bad = CoverSpec { edges: vec![EdgeSpec { from: 0, to: 1, voltage: "q".into() }], ..spec };
        assert!(matches!(DiscreteCover::from_spec(&bad, set), Err(CoverError::Malformed(_))));
    }
}

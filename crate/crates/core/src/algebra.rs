//! The group algebra: convolution, sector components, the adapted basis of
//! matrix units, subalgebra dimensions, the invariant inner product and the
//! star involution.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, StackedNullspace};
use crate::rep::IrrepSet;
use crate::scalar::{cabs, cone, creal, czero, CMat, CVec, Cx, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("GroupMismatch: element of length {left} combined with element of length {right}")]
    GroupMismatch { left: usize, right: usize },
    #[error("element has non-finite coefficient at index {0}")]
    NonFinite(usize),
    #[error("sector components have the wrong shape: {0}")]
    BadComponents(String),
}

/// Coefficient vector `v(g)` over the group elements.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement<T: Real> {
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> AlgebraElement<T> {
    pub fn new(coeffs: Vec<Cx<T>>) -> Result<Self, AlgebraError> {
        if let Some(k) = coeffs.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(AlgebraError::NonFinite(k));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![czero(); order] }
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn to_vector(&self) -> CVec<T> {
        DVector::from_column_slice(&self.coeffs)
    }

    pub fn from_vector(v: &CVec<T>) -> Self {
        Self { coeffs: v.iter().copied().collect() }
    }

    pub fn scale(&self, c: Cx<T>) -> Self {
        Self { coeffs: self.coeffs.iter().map(|z| z * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_group(other)?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_group(other)?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() })
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(T::zero(), |acc, (a, b)| {
                let d = cabs(a - b);
                if d > acc { d } else { acc }
            })
    }

    fn same_group(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.order() != other.order() {
            return Err(AlgebraError::GroupMismatch { left: self.order(), right: other.order() });
        }
        Ok(())
    }
}

/// Sector blocks `v^mu_ij = sum_g v(g) D^mu_ij(g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorComponents<T: Real> {
    pub blocks: Vec<CMat<T>>,
}

/// Matrix units `e^mu_ij`, indexed `[mu][i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedBasis<T: Real> {
    pub units: Vec<Vec<Vec<AlgebraElement<T>>>>,
}

impl<T: Real> AdaptedBasis<T> {
    pub fn unit(&self, mu: usize, i: usize, j: usize) -> &AlgebraElement<T> {
        &self.units[mu][i][j]
    }

    /// `e^mu_i = e^mu_ii`
    pub fn idempotent(&self, mu: usize, i: usize) -> &AlgebraElement<T> {
        &self.units[mu][i][i]
    }

    /// `e^mu = sum_i e^mu_ii`, the central idempotent of sector `mu`.
    pub fn central(&self, mu: usize) -> AlgebraElement<T> {
        let n = self.units[mu][0][0].order();
        (0..self.units[mu].len()).fold(AlgebraElement::zero(n), |acc, i| acc.add(self.idempotent(mu, i)).unwrap())
    }

    pub fn sector_count(&self) -> usize {
        self.units.len()
    }

    pub fn dim(&self, mu: usize) -> usize {
        self.units[mu].len()
    }

    /// `e'_ij = sum_kl U_ik e_kl (U^†)_lj` within sector `mu`.
    pub fn rotated(&self, mu: usize, u: &CMat<T>) -> Self {
        let d = self.dim(mu);
        let n = self.units[mu][0][0].order();
        let ud = u.adjoint();
        let mut out = self.clone();
        for i in 0..d {
            for j in 0..d {
                let mut acc = AlgebraElement::zero(n);
                for k in 0..d {
                    for l in 0..d {
                        acc = acc.add(&self.units[mu][k][l].scale(u[(i, k)] * ud[(l, j)])).unwrap();
                    }
                }
                out.units[mu][i][j] = acc;
            }
        }
        out
    }

    pub fn all(&self) -> impl Iterator<Item = (usize, usize, usize, &AlgebraElement<T>)> {
        self.units.iter().enumerate().flat_map(|(mu, rows)| {
            rows.iter()
                .enumerate()
                .flat_map(move |(i, row)| row.iter().enumerate().map(move |(j, e)| (mu, i, j, e)))
        })
    }
}

/// Dimensions found by nullspace computations, next to the closed forms
/// they should match.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubalgebraDims {
    pub center: usize,
    pub center_expected: usize,
    pub maximal_abelian: usize,
    pub maximal_abelian_expected: usize,
    /// Whether the commutant of `A` is `A` itself.
    pub maximal_abelian_is_maximal: bool,
    pub centralizers: Vec<usize>,
    pub centralizers_expected: Vec<usize>,
}

impl SubalgebraDims {
    pub fn all_match(&self) -> bool {
        self.center == self.center_expected
            && self.maximal_abelian == self.maximal_abelian_expected
            && self.maximal_abelian_is_maximal
            && self.centralizers == self.centralizers_expected
    }
}

/// Outcome of the rank-one test on sector components.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOne<T: Real> {
    pub irreducible_member: bool,
    pub mu: Option<usize>,
    /// `block = a b^T` when `irreducible_member` holds.
    pub a: Option<CVec<T>>,
    pub b: Option<CVec<T>>,
    pub nonzero_sectors: Vec<usize>,
    pub singular_ratio: T,
}

/// Group algebra over a validated irrep set.
#[derive(Debug, Clone)]
pub struct GroupAlgebra<T: Real> {
    set: IrrepSet<T>,
}

impl<T: Real> GroupAlgebra<T> {
    pub fn new(set: IrrepSet<T>) -> Self {
        Self { set }
    }

    pub fn irreps(&self) -> &IrrepSet<T> {
        &self.set
    }

    pub fn order(&self) -> usize {
        self.set.group().order()
    }

    fn n(&self) -> T {
        T::from_usize(self.order()).unwrap()
    }

    /// `g^`
    pub fn basis_element(&self, g: usize) -> AlgebraElement<T> {
        let mut c = vec![czero(); self.order()];
        c[g] = cone();
        AlgebraElement { coeffs: c }
    }

    pub fn unit(&self) -> AlgebraElement<T> {
        self.basis_element(self.set.group().identity())
    }

    fn check(&self, v: &AlgebraElement<T>) -> Result<(), AlgebraError> {
        if v.order() != self.order() {
            return Err(AlgebraError::GroupMismatch { left: self.order(), right: v.order() });
        }
        Ok(())
    }

    /// `(v w)(g) = sum_h v(g h^-1) w(h)`
    pub fn multiply(&self, v: &AlgebraElement<T>, w: &AlgebraElement<T>) -> Result<AlgebraElement<T>, AlgebraError> {
        v.same_group(w)?;
        self.check(v)?;
        let g = self.set.group();
        let mut out = vec![czero(); self.order()];
        for (h, wh) in w.coeffs.iter().enumerate() {
            if *wh == czero() {
                continue;
            }
            for (k, vk) in v.coeffs.iter().enumerate() {
                // k = g h^-1  =>  g = k h
                out[g.mul(k, h)] += vk * wh;
            }
        }
        Ok(AlgebraElement { coeffs: out })
    }

    pub fn to_sectors(&self, v: &AlgebraElement<T>) -> Result<SectorComponents<T>, AlgebraError> {
        self.check(v)?;
        let blocks = (0..self.set.count())
            .map(|mu| {
                let d = self.set.dim(mu);
                v.coeffs
                    .iter()
                    .enumerate()
                    .fold(linalg::zeros(d, d), |acc, (g, c)| acc + self.set.d(mu, g) * *c)
            })
            .collect();
        Ok(SectorComponents { blocks })
    }

    /// `v(g) = sum_{mu,i,j} (n_mu/n) v^mu_ij D^mu_ji(g^-1)`
    pub fn from_sectors(&self, c: &SectorComponents<T>) -> Result<AlgebraElement<T>, AlgebraError> {
        if c.blocks.len() != self.set.count()
            || c.blocks.iter().enumerate().any(|(mu, b)| b.shape() != (self.set.dim(mu), self.set.dim(mu)))
        {
            return Err(AlgebraError::BadComponents(format!("expected block dims {:?}", self.set.dims())));
        }
        let g = self.set.group();
        let coeffs = g
            .elements()
            .map(|x| {
                let xi = g.inv(x);
                c.blocks.iter().enumerate().fold(czero(), |acc, (mu, b)| {
                    let w = creal(T::from_usize(self.set.dim(mu)).unwrap() / self.n());
                    // sum_ij b_ij D_ji = tr(b D)
                    acc + (b * self.set.d(mu, xi)).trace() * w
                })
            })
            .collect();
        Ok(AlgebraElement { coeffs })
    }

    /// `e^mu_ij = (n_mu/n) sum_g D^mu_ij(g^-1) g^`
    pub fn adapted_basis(&self) -> AdaptedBasis<T> {
        let g = self.set.group();
        let units = (0..self.set.count())
            .map(|mu| {
                let d = self.set.dim(mu);
                let w = creal(T::from_usize(d).unwrap() / self.n());
                (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| AlgebraElement {
                                coeffs: g.elements().map(|x| self.set.d(mu, g.inv(x))[(i, j)] * w).collect(),
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        AdaptedBasis { units }
    }

    /// `lambda^mu = n_mu / n^2`
    pub fn lambda(&self, mu: usize) -> T {
        let n = self.n();
        T::from_usize(self.set.dim(mu)).unwrap() / (n * n)
    }

    /// `<v|w> = (1/n) sum_g conj(v(g)) w(g)`, antilinear in `v`.
    pub fn inner_product(&self, v: &AlgebraElement<T>, w: &AlgebraElement<T>) -> Result<Cx<T>, AlgebraError> {
        v.same_group(w)?;
        self.check(v)?;
        let s = v.coeffs.iter().zip(&w.coeffs).fold(czero::<T>(), |acc, (a, b)| acc + a.conj() * b);
        Ok(s / creal(self.n()))
    }

    /// The same inner product evaluated on sector components.
    pub fn inner_product_sectors(&self, v: &AlgebraElement<T>, w: &AlgebraElement<T>) -> Result<Cx<T>, AlgebraError> {
        v.same_group(w)?;
        let a = self.to_sectors(v)?;
        let b = self.to_sectors(w)?;
        Ok((0..self.set.count()).fold(czero(), |acc, mu| {
            acc + a.blocks[mu].dotc(&b.blocks[mu]) * creal(self.lambda(mu))
        }))
    }

    /// `v*(g) = conj(v(g^-1))`
    pub fn star(&self, v: &AlgebraElement<T>) -> Result<AlgebraElement<T>, AlgebraError> {
        self.check(v)?;
        let g = self.set.group();
        Ok(AlgebraElement { coeffs: g.elements().map(|x| v.coeffs[g.inv(x)].conj()).collect() })
    }

    /// Matrix of `v -> u v` on coefficient vectors.
    pub fn left_matrix(&self, u: &AlgebraElement<T>) -> CMat<T> {
        let g = self.set.group();
        DMatrix::from_fn(self.order(), self.order(), |x, h| u.coeffs[g.mul(x, g.inv(h))])
    }

    /// Matrix of `v -> v u` on coefficient vectors.
    pub fn right_matrix(&self, u: &AlgebraElement<T>) -> CMat<T> {
        let g = self.set.group();
        DMatrix::from_fn(self.order(), self.order(), |x, k| u.coeffs[g.mul(g.inv(k), x)])
    }

    fn centralizer_dim(&self, family: &[AlgebraElement<T>]) -> (usize, CMat<T>) {
        let mut acc = StackedNullspace::new(self.order());
        for u in family {
            acc.push(&(self.left_matrix(u) - self.right_matrix(u)));
        }
        let basis = acc.finish();
        (basis.ncols(), basis)
    }

    /// Center, maximal abelian subalgebra and sector centralizers, each
    /// found by solving the commutation equations.
    pub fn subalgebra_dims(&self) -> SubalgebraDims {
        let basis = self.adapted_basis();
        let everything: Vec<_> = self.set.group().elements().map(|g| self.basis_element(g)).collect();
        let (center, _) = self.centralizer_dim(&everything);

        let diag: Vec<_> = (0..basis.sector_count())
            .flat_map(|mu| (0..basis.dim(mu)).map(move |i| (mu, i)))
            .map(|(mu, i)| basis.idempotent(mu, i).clone())
            .collect();
        let a_cols: Vec<CVec<T>> = diag.iter().map(AlgebraElement::to_vector).collect();
        let a_span = linalg::range_basis(&linalg::columns_to_matrix(self.order(), &a_cols));
        let (comm_dim, comm) = self.centralizer_dim(&diag);
        let contains = linalg::subspace_gap(&a_span, &comm).map(|gap| gap < T::lit(1e-8)).unwrap_or(false);

        let centralizers = (0..basis.sector_count())
            .map(|mu| {
                let fam: Vec<_> = basis.all().filter(|t| t.0 == mu).map(|t| t.3.clone()).collect();
                self.centralizer_dim(&fam).0
            })
            .collect();
        let dims = self.set.dims();
        SubalgebraDims {
            center,
            center_expected: dims.len(),
            maximal_abelian: a_span.ncols(),
            maximal_abelian_expected: dims.iter().sum(),
            maximal_abelian_is_maximal: comm_dim == a_span.ncols() && contains,
            centralizers,
            centralizers_expected: dims.iter().map(|d| self.order() - d * d + 1).collect(),
        }
    }

    /// Lemma test: a vector lies in a left-irreducible subspace iff exactly
    /// one sector block is nonzero and that block has rank one.
    pub fn rank_one_test(&self, v: &AlgebraElement<T>) -> Result<RankOne<T>, AlgebraError> {
        let c = self.to_sectors(v)?;
        Ok(rank_one_blocks(&c.blocks))
    }

    /// Recovers `o` from an operator commuting with all right multiplications.
    pub fn element_from_right_invariant(&self, op: &CMat<T>) -> AlgebraElement<T> {
        let basis = self.adapted_basis();
        let mut out = AlgebraElement::zero(self.order());
        for mu in 0..basis.sector_count() {
            let d = basis.dim(mu);
            let inv_lambda = creal(T::one() / self.lambda(mu));
            for i in 0..d {
                for k in 0..d {
                    // O^mu_ik = (1/n_mu) sum_r <e_ri | O e_rk>
                    let mut o = czero::<T>();
                    for r in 0..d {
                        let lhs = basis.unit(mu, r, i);
                        let rhs = AlgebraElement::from_vector(&(op * basis.unit(mu, r, k).to_vector()));
                        o += self.inner_product(lhs, &rhs).unwrap();
                    }
                    o /= creal(T::from_usize(d).unwrap());
                    out = out.add(&basis.unit(mu, k, i).scale(o * inv_lambda)).unwrap();
                }
            }
        }
        out
    }
}

/// Rank-one decision on a list of sector blocks.
pub fn rank_one_blocks<T: Real>(blocks: &[CMat<T>]) -> RankOne<T> {
    let norms: Vec<T> = blocks.iter().map(linalg::frob).collect();
    let top = norms.iter().copied().fold(T::zero(), |a, b| if b > a { b } else { a });
    let cut = T::rank_ratio_tol() * top;
    let nonzero: Vec<usize> = (0..blocks.len()).filter(|&mu| top > T::zero() && norms[mu] > cut).collect();
    let mut out = RankOne {
        irreducible_member: false,
        mu: None,
        a: None,
        b: None,
        nonzero_sectors: nonzero.clone(),
        singular_ratio: T::zero(),
    };
    if nonzero.len() != 1 {
        return out;
    }
    let mu = nonzero[0];
    out.mu = Some(mu);
    let block = &blocks[mu];
    let s = linalg::singular_values(block);
    let s1 = s[0];
    let s2 = s.get(1).copied().unwrap_or(T::zero());
    out.singular_ratio = s2 / s1;
    if out.singular_ratio < T::rank_ratio_tol() {
        // for a rank-one block the largest column fixes the left factor:
        // block = u (u^† block) = a b^T with |b| = 1
        let col = (0..block.ncols())
            .map(|j| block.column(j).into_owned())
            .fold(CVec::<T>::zeros(block.nrows()), |acc, c| if c.norm() > acc.norm() { c } else { acc });
        let u = col.normalize();
        let bt = u.adjoint() * block;
        let scale = bt.norm();
        out.a = Some(u * creal(scale));
        out.b = Some(bt.transpose() / creal(scale));
        out.irreducible_member = true;
    }
    out
}

pub fn random_element<T: Real>(order: usize, rng: &mut impl rand::Rng) -> AlgebraElement<T> {
    AlgebraElement {
        coeffs: (0..order)
            .map(|_| Complex::new(T::lit(rng.random_range(-1.0..1.0)), T::lit(rng.random_range(-1.0..1.0))))
            .collect(),
    }
}

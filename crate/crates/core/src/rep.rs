//! Complete sets of unitary irreducible representations: validation,
//! characters, multiplicities and complex-conjugate partners.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::FiniteGroup;
use crate::linalg::{self, max_abs_diff, StackedNullspace};
use crate::scalar::{cabs, czero, from_c64, to_c64, CMat, Cx, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("malformed irrep data: {0}")]
    Malformed(String),
    #[error("NotAnIrrep: {label}: {reason} (residual {residual:.3e})")]
    NotAnIrrep { label: String, reason: String, residual: f64 },
    #[error("NonUnitary: {label} at element {element} (residual {residual:.3e})")]
    NonUnitary { label: String, element: usize, residual: f64 },
    #[error("OrthogonalityViolation: residual {residual:.3e} at mu={mu}, nu={nu}, (i,j,k,l)=({i},{j},{k},{l})")]
    OrthogonalityViolation { residual: f64, mu: usize, nu: usize, i: usize, j: usize, k: usize, l: usize },
    #[error("IncompleteSet: {detail} (residual {residual:.3e})")]
    IncompleteSet { detail: String, residual: f64 },
    #[error("NonIntegralMultiplicity: {value} is {residual:.3e} away from an integer")]
    NonIntegralMultiplicity { value: f64, residual: f64 },
}

impl RepError {
    pub fn kind(&self) -> &'static str {
        match self {
            RepError::Malformed(_) => "MalformedInput",
            RepError::NotAnIrrep { .. } => "NotAnIrrep",
            RepError::NonUnitary { .. } => "NonUnitary",
            RepError::OrthogonalityViolation { .. } => "OrthogonalityViolation",
            RepError::IncompleteSet { .. } => "IncompleteSet",
            RepError::NonIntegralMultiplicity { .. } => "NonIntegralMultiplicity",
        }
    }
}

/// Unitary irreducible representation, one matrix per group element.
#[derive(Debug, Clone, PartialEq)]
pub struct Irrep<T: Real> {
    label: String,
    dim: usize,
    matrices: Vec<CMat<T>>,
}

impl<T: Real> Irrep<T> {
    pub fn new(label: impl Into<String>, matrices: Vec<CMat<T>>) -> Result<Self, RepError> {
        let label = label.into();
        let dim = matrices.first().map(|m| m.nrows()).unwrap_or(0);
        if dim == 0 {
            return Err(RepError::Malformed(format!("{label}: no matrices")));
        }
        if let Some(g) = matrices.iter().position(|m| m.shape() != (dim, dim)) {
            return Err(RepError::Malformed(format!("{label}: matrix for element {g} is not {dim}x{dim}")));
        }
        if matrices.iter().any(|m| m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
            return Err(RepError::Malformed(format!("{label}: non-finite matrix entry")));
        }
        Ok(Self { label, dim, matrices })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &CMat<T> {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[CMat<T>] {
        &self.matrices
    }

    pub fn character(&self) -> Vec<Cx<T>> {
        self.matrices.iter().map(|m| m.trace()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.dim == 1
    }

    /// Maximal deviation of `D(g)D(h)` from `D(gh)`.
    pub fn homomorphism_residual(&self, group: &FiniteGroup) -> T {
        let mut worst = T::zero();
        for g in group.elements() {
            for h in group.elements() {
                let r = max_abs_diff(&(&self.matrices[g] * &self.matrices[h]), &self.matrices[group.mul(g, h)]);
                if r > worst {
                    worst = r;
                }
            }
        }
        worst
    }

    /// Worst unitarity residual and the element where it occurs.
    pub fn unitarity_residual(&self) -> (T, usize) {
        let id = linalg::identity::<T>(self.dim);
        let mut worst = (T::zero(), 0);
        for (g, m) in self.matrices.iter().enumerate() {
            let r = max_abs_diff(&(m * m.adjoint()), &id);
            if r > worst.0 {
                worst = (r, g);
            }
        }
        worst
    }

    /// `|sum_g |chi(g)|^2 - n|`
    pub fn character_norm_residual(&self) -> T {
        let n = T::from_usize(self.matrices.len()).unwrap();
        let s = self.character().iter().fold(T::zero(), |a, c| a + c.norm_sqr());
        (s - n).abs()
    }

    /// Checks homomorphism, unitarity and irreducibility against `group`.
    pub fn check(&self, group: &FiniteGroup) -> Result<(), RepError> {
        let tol = T::validation_tol();
        if self.matrices.len() != group.order() {
            return Err(RepError::Malformed(format!(
                "{}: {} matrices for a group of order {}",
                self.label,
                self.matrices.len(),
                group.order()
            )));
        }
        let hom = self.homomorphism_residual(group);
        if !(hom < tol) {
            return Err(RepError::NotAnIrrep {
                label: self.label.clone(),
                reason: "not a homomorphism".into(),
                residual: hom.as_f64(),
            });
        }
        let (u, g) = self.unitarity_residual();
        if !(u < tol) {
            return Err(RepError::NonUnitary { label: self.label.clone(), element: g, residual: u.as_f64() });
        }
        let c = self.character_norm_residual();
        if !(c < tol * T::from_usize(group.order()).unwrap()) {
            return Err(RepError::NotAnIrrep {
                label: self.label.clone(),
                reason: "character norm differs from group order (reducible)".into(),
                residual: c.as_f64(),
            });
        }
        Ok(())
    }

    fn conjugated(&self, u: &CMat<T>) -> Self {
        Self {
            label: self.label.clone(),
            dim: self.dim,
            matrices: self.matrices.iter().map(|m| u * m * u.adjoint()).collect(),
        }
    }
}

/// All residuals reported by irrep-set validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IrrepResiduals {
    pub homomorphism: f64,
    pub unitarity: f64,
    pub character_norm: f64,
    pub dimension_sum: f64,
    pub inequivalence: f64,
    pub grand_orthogonality: f64,
    pub completeness: f64,
}

/// A validated complete set of inequivalent unitary irreps.
#[derive(Debug, Clone, PartialEq)]
pub struct IrrepSet<T: Real> {
    group: FiniteGroup,
    irreps: Vec<Irrep<T>>,
}

impl<T: Real> IrrepSet<T> {
    /// Validates every irrep and the set-level orthogonality and
    /// completeness relations.
    pub fn validate(group: &FiniteGroup, irreps: Vec<Irrep<T>>) -> Result<Self, RepError> {
        let tol = T::validation_tol();
        for ir in &irreps {
            ir.check(group)?;
        }
        let dim_sum: usize = irreps.iter().map(|ir| ir.dim() * ir.dim()).sum();
        if dim_sum != group.order() {
            return Err(RepError::IncompleteSet {
                detail: format!("sum of squared dimensions is {dim_sum}, group order is {}", group.order()),
                residual: (dim_sum as f64 - group.order() as f64).abs(),
            });
        }
        let set = Self { group: group.clone(), irreps };
        let (r, at) = set.grand_orthogonality_worst();
        if !(r < tol) {
            let (mu, nu, i, j, k, l) = at;
            return Err(RepError::OrthogonalityViolation { residual: r.as_f64(), mu, nu, i, j, k, l });
        }
        let (c, (g, h)) = set.completeness_worst();
        if !(c < tol) {
            return Err(RepError::IncompleteSet {
                detail: format!("completeness relation fails at elements ({g}, {h})"),
                residual: c.as_f64(),
            });
        }
        Ok(set)
    }

    /// Residuals of every validation relation, without failing.
    pub fn residuals_of(group: &FiniteGroup, irreps: &[Irrep<T>]) -> IrrepResiduals {
        let max = |it: &mut dyn Iterator<Item = T>| it.fold(T::zero(), |a, b| if b > a { b } else { a });
        let homomorphism = max(&mut irreps.iter().map(|ir| ir.homomorphism_residual(group))).as_f64();
        let unitarity = max(&mut irreps.iter().map(|ir| ir.unitarity_residual().0)).as_f64();
        let character_norm = max(&mut irreps.iter().map(|ir| ir.character_norm_residual())).as_f64();
        let dim_sum: usize = irreps.iter().map(|ir| ir.dim() * ir.dim()).sum();
        let set = Self { group: group.clone(), irreps: irreps.to_vec() };
        let n = T::from_usize(group.order()).unwrap();
        let mut inequivalence = T::zero();
        for mu in 0..irreps.len() {
            for nu in 0..irreps.len() {
                if mu != nu {
                    let s = set.character_inner(mu, nu);
                    let r = cabs(s) / n;
                    if r > inequivalence {
                        inequivalence = r;
                    }
                }
            }
        }
        IrrepResiduals {
            homomorphism,
            unitarity,
            character_norm,
            dimension_sum: (dim_sum as f64 - group.order() as f64).abs(),
            inequivalence: inequivalence.as_f64(),
            grand_orthogonality: set.grand_orthogonality_worst().0.as_f64(),
            completeness: if dim_sum == group.order() { set.completeness_worst().0.as_f64() } else { f64::INFINITY },
        }
    }

    pub fn residuals(&self) -> IrrepResiduals {
        Self::residuals_of(&self.group, &self.irreps)
    }

    /// `sum_g chi_mu(g) conj(chi_nu(g))`
    fn character_inner(&self, mu: usize, nu: usize) -> Cx<T> {
        let a = self.irreps[mu].character();
        let b = self.irreps[nu].character();
        a.iter().zip(&b).fold(czero(), |acc, (x, y)| acc + x * y.conj())
    }

    fn grand_orthogonality_worst(&self) -> (T, (usize, usize, usize, usize, usize, usize)) {
        let g = &self.group;
        let n = T::from_usize(g.order()).unwrap();
        let mut worst = (T::zero(), (0, 0, 0, 0, 0, 0));
        for (mu, a) in self.irreps.iter().enumerate() {
            let w = T::from_usize(a.dim()).unwrap() / n;
            for (nu, b) in self.irreps.iter().enumerate() {
                for i in 0..a.dim() {
                    for j in 0..a.dim() {
                        for k in 0..b.dim() {
                            for l in 0..b.dim() {
                                let s = g.elements().fold(czero::<T>(), |acc, x| {
                                    acc + a.matrix(g.inv(x))[(i, j)] * b.matrix(x)[(k, l)]
                                }) * Complex::new(w, T::zero());
                                let expect = if mu == nu && i == l && j == k { T::one() } else { T::zero() };
                                let r = cabs(s - Complex::new(expect, T::zero()));
                                if r > worst.0 {
                                    worst = (r, (mu, nu, i, j, k, l));
                                }
                            }
                        }
                    }
                }
            }
        }
        worst
    }

    fn completeness_worst(&self) -> (T, (usize, usize)) {
        let g = &self.group;
        let n = T::from_usize(g.order()).unwrap();
        let mut worst = (T::zero(), (0, 0));
        for x in g.elements() {
            for y in g.elements() {
                let mut s = czero::<T>();
                for ir in &self.irreps {
                    let w = Complex::new(T::from_usize(ir.dim()).unwrap() / n, T::zero());
                    let a = ir.matrix(g.inv(x));
                    let b = ir.matrix(y);
                    for i in 0..ir.dim() {
                        for j in 0..ir.dim() {
                            s += w * a[(i, j)] * b[(j, i)];
                        }
                    }
                }
                let expect = if x == y { T::one() } else { T::zero() };
                let r = cabs(s - Complex::new(expect, T::zero()));
                if r > worst.0 {
                    worst = (r, (x, y));
                }
            }
        }
        worst
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    /// Number of irreps `m`.
    pub fn count(&self) -> usize {
        self.irreps.len()
    }

    pub fn irreps(&self) -> &[Irrep<T>] {
        &self.irreps
    }

    pub fn irrep(&self, mu: usize) -> &Irrep<T> {
        &self.irreps[mu]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(Irrep::dim).collect()
    }

    pub fn dim(&self, mu: usize) -> usize {
        self.irreps[mu].dim()
    }

    /// `D^mu(g)`
    pub fn d(&self, mu: usize, g: usize) -> &CMat<T> {
        self.irreps[mu].matrix(g)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.irreps.iter().position(|ir| ir.label() == label)
    }

    pub fn character_table(&self) -> CharacterTable<T> {
        let cs = self.group.conjugacy_structure();
        let values = DMatrix::from_fn(self.count(), cs.class_count(), |mu, c| {
            self.irreps[mu].matrix(cs.classes[c][0]).trace()
        });
        CharacterTable { values, class_sizes: cs.class_sizes(), order: self.group.order() }
    }

    /// Number of times irrep `mu` occurs in a representation with the given
    /// character (one value per group element).
    pub fn multiplicity(&self, chi: &[Cx<T>], mu: usize) -> Result<usize, RepError> {
        if chi.len() != self.group.order() {
            return Err(RepError::Malformed(format!(
                "character has {} values, group order is {}",
                chi.len(),
                self.group.order()
            )));
        }
        let n = T::from_usize(self.group.order()).unwrap();
        let own = self.irreps[mu].character();
        let s = own.iter().zip(chi).fold(czero::<T>(), |acc, (a, b)| acc + a.conj() * b) / Complex::new(n, T::zero());
        let rounded = s.re.round();
        let residual = cabs(s - Complex::new(rounded, T::zero()));
        let tol = T::validation_tol() * T::lit(100.0);
        if !(residual < tol) || rounded < T::zero() {
            return Err(RepError::NonIntegralMultiplicity { value: s.re.as_f64(), residual: residual.as_f64() });
        }
        Ok(rounded.to_usize().unwrap_or(0))
    }

    /// The irrep equivalent to the complex conjugate of `mu`, with a unitary
    /// `U` such that `conj(D^mu(g)) = U^† D^partner(g) U` for all `g` when it
    /// can be found.
    pub fn conjugate_partner(&self, mu: usize) -> ConjugatePartner<T> {
        let tol = T::validation_tol() * T::from_usize(self.group.order()).unwrap();
        let target: Vec<Cx<T>> = self.irreps[mu].character().iter().map(|c| c.conj()).collect();
        let partner = (0..self.count())
            .find(|&nu| {
                self.irreps[nu]
                    .character()
                    .iter()
                    .zip(&target)
                    .all(|(a, b)| cabs(a - b) < tol)
            })
            .expect("conjugate of an irrep is an irrep of a complete set");
        let witness = self.intertwiner(mu, partner);
        ConjugatePartner { partner, witness }
    }

    /// Unitary `U` with `D^nu(g) U = U conj(D^mu(g))`.
    fn intertwiner(&self, mu: usize, nu: usize) -> Option<CMat<T>> {
        let left: Vec<CMat<T>> = self.group.elements().map(|g| self.d(nu, g).clone()).collect();
        let right: Vec<CMat<T>> = self.group.elements().map(|g| linalg::conj(self.d(mu, g))).collect();
        intertwiner(&left, &right)
    }

    /// Replaces `D^mu` by `U D^mu U^†`.
    pub fn with_basis_change(&self, mu: usize, u: &CMat<T>) -> Self {
        let mut out = self.clone();
        out.irreps[mu] = self.irreps[mu].conjugated(u);
        out
    }

    pub fn from_file(group: &FiniteGroup, file: &IrrepFile) -> Result<Self, RepError> {
        Self::validate(group, file.to_irreps(group)?)
    }

    pub fn to_file(&self) -> IrrepFile {
        IrrepFile {
            group: self.group.name().to_string(),
            irreps: self
                .irreps
                .iter()
                .map(|ir| IrrepEntry {
                    label: ir.label().to_string(),
                    dim: ir.dim(),
                    matrices: self
                        .group
                        .elements()
                        .map(|g| (self.group.label(g).to_string(), matrix_to_json(ir.matrix(g))))
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugatePartner<T: Real> {
    pub partner: usize,
    pub witness: Option<CMat<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable<T: Real> {
    /// `values[(mu, class)]`
    pub values: CMat<T>,
    pub class_sizes: Vec<usize>,
    pub order: usize,
}

impl<T: Real> CharacterTable<T> {
    /// Largest deviation of `(1/n) sum_g conj(chi^mu) chi^nu` from `delta`.
    pub fn orthonormality_residual(&self) -> T {
        let n = T::from_usize(self.order).unwrap();
        let m = self.values.nrows();
        let mut worst = T::zero();
        for a in 0..m {
            for b in 0..m {
                let mut s = czero::<T>();
                for (c, &size) in self.class_sizes.iter().enumerate() {
                    s += self.values[(a, c)].conj() * self.values[(b, c)] * Complex::new(T::from_usize(size).unwrap(), T::zero());
                }
                s /= Complex::new(n, T::zero());
                let expect = if a == b { T::one() } else { T::zero() };
                let r = cabs(s - Complex::new(expect, T::zero()));
                if r > worst {
                    worst = r;
                }
            }
        }
        worst
    }
}

/// Serialized irrep set; complex entries are `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrrepFile {
    pub group: String,
    pub irreps: Vec<IrrepEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrrepEntry {
    pub label: String,
    pub dim: usize,
    pub matrices: BTreeMap<String, Vec<Vec<[f64; 2]>>>,
}

impl IrrepFile {
    pub fn from_json(text: &str) -> Result<Self, RepError> {
        serde_json::from_str(text).map_err(|e| RepError::Malformed(e.to_string()))
    }

    /// Unvalidated irreps, element order taken from `group`.
    pub fn to_irreps<T: Real>(&self, group: &FiniteGroup) -> Result<Vec<Irrep<T>>, RepError> {
        self.irreps
            .iter()
            .enumerate()
            .map(|(k, entry)| {
                for key in entry.matrices.keys() {
                    if group.index_of(key).is_none() {
                        return Err(RepError::Malformed(format!(
                            "irreps[{k}].matrices: unknown element label {key:?}"
                        )));
                    }
                }
                let mats = group
                    .elements()
                    .map(|g| {
                        let label = group.label(g);
                        let rows = entry.matrices.get(label).ok_or_else(|| {
                            RepError::Malformed(format!("irreps[{k}].matrices: missing element {label:?}"))
                        })?;
                        matrix_from_json(rows, entry.dim)
                            .map_err(|e| RepError::Malformed(format!("irreps[{k}].matrices.{label}: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Irrep::new(entry.label.clone(), mats)
            })
            .collect()
    }
}

pub fn matrix_to_json<T: Real>(m: &CMat<T>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| {
                    let z = to_c64(m[(i, j)]);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

pub fn matrix_from_json<T: Real>(rows: &[Vec<[f64; 2]>], dim: usize) -> Result<CMat<T>, String> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(format!("expected a {dim}x{dim} matrix"));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| {
        let [re, im] = rows[i][j];
        from_c64(Complex::new(re, im))
    }))
}

/// Character of the regular representation: `n` at the identity, zero elsewhere.
pub fn regular_character<T: Real>(group: &FiniteGroup) -> Vec<Cx<T>> {
    group
        .elements()
        .map(|g| {
            if g == group.identity() {
                Complex::new(T::from_usize(group.order()).unwrap(), T::zero())
            } else {
                czero()
            }
        })
        .collect()
}

/// Unitary `U` with `left[k] U = U right[k]` for every `k`, unique up to
/// phase when both families are irreducible and equivalent. The phase is
/// fixed so the largest entry is real positive.
pub fn intertwiner<T: Real>(left: &[CMat<T>], right: &[CMat<T>]) -> Option<CMat<T>> {
    let d = left.first()?.nrows();
    if left.len() != right.len() || right.iter().chain(left).any(|m| m.shape() != (d, d)) {
        return None;
    }
    let id = linalg::identity::<T>(d);
    let mut acc = StackedNullspace::new(d * d);
    for (a, b) in left.iter().zip(right) {
        acc.push(&(id.kronecker(a) - b.transpose().kronecker(&id)));
    }
    let ns = acc.finish();
    if ns.ncols() != 1 {
        return None;
    }
    let x = linalg::unvectorize(&ns.column(0).into_owned(), d);
    let c = (x.adjoint() * &x).trace().re / T::from_usize(d).unwrap();
    if !(c > T::zero()) {
        return None;
    }
    let mut u = x / Complex::new(c.sqrt(), T::zero());
    let (mut best, mut phase) = (T::zero(), Complex::new(T::one(), T::zero()));
    for z in u.iter() {
        if cabs(*z) > best + T::validation_tol() {
            best = cabs(*z);
            phase = z.conj() / Complex::new(best, T::zero());
        }
    }
    u *= phase;
    let ok = linalg::max_abs_diff(&(&u * u.adjoint()), &id) < T::validation_tol() * T::lit(10.0);
    ok.then_some(u)
}

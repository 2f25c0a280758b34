//! The asymmetric rotor: Wigner blocks `R^Λ` restricted to the quaternion
//! group, its sector projectors, symmetry-adapted bases and time reversal.
//!
//! Half-integers are carried doubled (`two_lambda = 2Λ`, `two_n = 2N`). The
//! span of the matrix-entry functions `R^Λ_MN` has coordinates `(M, N)` with
//! index `m (2Λ+1) + n`, where `m, n` enumerate `M, N` ascending. Right
//! translation by `g` sends `R^Λ` to `R^Λ R^Λ(g)`, so a sector projector acts
//! on each row `M` as a matrix `P` on the `N` coordinates.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::cover::{check_unit, sector_coefficients, CoverError};
use crate::fixtures;
use crate::group::FiniteGroup;
use crate::linalg;
use crate::rep::{self, IrrepSet};
use crate::scalar::{cone, creal, cx, czero, CMat, CVec, Cx, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RotorError {
    #[error("OddHalfInteger: the one-dimensional sectors need integer Λ, got 2Λ = {0}")]
    OddHalfInteger(u32),
    #[error("IntegerLambda: the two-dimensional sector needs half-odd Λ, got 2Λ = {0}")]
    IntegerLambda(u32),
    #[error("NonUnitVector: amplitude vector has norm {0}")]
    NonUnitVector(f64),
}

impl From<CoverError> for RotorError {
    fn from(e: CoverError) -> Self {
        match e {
            CoverError::NonUnitVector(n) => RotorError::NonUnitVector(n),
            other => unreachable!("unexpected error from coefficient check: {other}"),
        }
    }
}

/// `i^k`, exact.
pub fn ipow<T: Real>(k: i64) -> Cx<T> {
    match k.rem_euclid(4) {
        0 => cone(),
        1 => cx(0.0, 1.0),
        2 => cx(-1.0, 0.0),
        _ => cx(0.0, -1.0),
    }
}

/// `(-1)^k` for integer `k`.
fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 { 1 } else { -1 }
}

/// `(r2, r3)` for each one-dimensional irrep of the quaternion group.
pub const ABELIAN_SIGNS: [(i32, i32); 4] = [(1, 1), (-1, -1), (1, -1), (-1, 1)];

/// The `2Λ+1` dimensional representation at the eight quaternion units.
#[derive(Debug, Clone)]
pub struct RotorBlock<T: Real> {
    two_lambda: u32,
    group: FiniteGroup,
    mats: Vec<CMat<T>>,
}

impl<T: Real> RotorBlock<T> {
    pub fn new(two_lambda: u32) -> Self {
        let group = fixtures::d8star();
        let d = two_lambda as usize + 1;
        let tl = i64::from(two_lambda);
        let mut rj = linalg::zeros::<T>(d, d);
        let mut rk = linalg::zeros::<T>(d, d);
        for n in 0..d {
            let two_n = 2 * n as i64 - tl;
            // (-1)^(Λ+N) delta_{M,-N}
            rj[(d - 1 - n, n)] = creal(T::from_i64(sign((tl + two_n) / 2)).unwrap());
            // exp(iπN) = i^(2N)
            rk[(n, n)] = ipow(two_n);
        }
        let ri = &rj * &rk;
        let parity = creal(T::from_i64(sign(tl)).unwrap());
        let id = linalg::identity::<T>(d);
        let mats = fixtures::D8STAR_LABELS
            .iter()
            .map(|label| {
                let (neg, unit) = match label.strip_prefix('-') {
                    Some(u) => (true, u),
                    None => (false, *label),
                };
                let m = match unit {
                    "1" => id.clone(),
                    "i" => ri.clone(),
                    "j" => rj.clone(),
                    _ => rk.clone(),
                };
                if neg { m * parity } else { m }
            })
            .collect();
        Self { two_lambda, group, mats }
    }

    pub fn two_lambda(&self) -> u32 {
        self.two_lambda
    }

    pub fn dim(&self) -> usize {
        self.two_lambda as usize + 1
    }

    pub fn is_integer(&self) -> bool {
        self.two_lambda.is_multiple_of(2)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn matrices(&self) -> &[CMat<T>] {
        &self.mats
    }

    pub fn matrix(&self, label: &str) -> &CMat<T> {
        &self.mats[self.group.index_of(label).expect("quaternion unit label")]
    }

    /// `2M` for coordinate index `m`.
    pub fn twice(&self, m: usize) -> i64 {
        2 * m as i64 - i64::from(self.two_lambda)
    }

    /// Coordinate index of `2M`.
    pub fn index(&self, two_m: i64) -> usize {
        ((two_m + i64::from(self.two_lambda)) / 2) as usize
    }

    pub fn homomorphism_residual(&self) -> T {
        let g = &self.group;
        let mut worst = T::zero();
        for a in g.elements() {
            for b in g.elements() {
                let r = linalg::max_abs_diff(&(&self.mats[a] * &self.mats[b]), &self.mats[g.mul(a, b)]);
                worst = crate::cover::max(worst, r);
            }
        }
        worst
    }

    pub fn unitarity_residual(&self) -> T {
        let id = linalg::identity::<T>(self.dim());
        self.mats.iter().map(|m| linalg::max_abs_diff(&(m * m.adjoint()), &id)).fold(T::zero(), crate::cover::max)
    }

    /// Character via `sum_M e^{iMα}`, with rotation angle 0 at `1`, `2π` at
    /// `-1` and `π` elsewhere.
    pub fn character(&self) -> Vec<Cx<T>> {
        self.group
            .labels()
            .iter()
            .map(|label| {
                let turns = match label.as_str() {
                    "1" => 0,
                    "-1" => 2,
                    _ => 1,
                };
                // e^{iMα} = i^(2M α/π)
                (0..self.dim()).fold(czero(), |acc, m| acc + ipow::<T>(self.twice(m) * turns))
            })
            .collect()
    }

    /// `max |conj(R(g))_MN - (-1)^(M-N) R(g)_{-M,-N}|`
    pub fn conjugation_residual(&self) -> T {
        let d = self.dim();
        let mut worst = T::zero();
        for m in &self.mats {
            for a in 0..d {
                for b in 0..d {
                    let s = T::from_i64(sign((self.twice(a) - self.twice(b)) / 2)).unwrap();
                    let r = (m[(a, b)].conj() - m[(d - 1 - a, d - 1 - b)] * creal(s)).norm_sqr().sqrt();
                    worst = crate::cover::max(worst, r);
                }
            }
        }
        worst
    }

    /// `(n_mu/n) sum_g a^T D^mu(g) conj(a) R(g)`
    pub fn generic_projector(&self, set: &IrrepSet<T>, mu: usize, a: &CVec<T>) -> CMat<T> {
        let c = sector_coefficients(set, mu, a);
        self.group.elements().fold(linalg::zeros(self.dim(), self.dim()), |acc, g| acc + &self.mats[g] * c[g])
    }

    /// `½(1 + r2 R(j)) ½(1 + r3 R(k))`
    pub fn abelian_projector(&self, r2: i32, r3: i32) -> Result<CMat<T>, RotorError> {
        if !self.is_integer() {
            return Err(RotorError::OddHalfInteger(self.two_lambda));
        }
        let id = linalg::identity::<T>(self.dim());
        let half = creal(T::lit(0.5));
        let pj = (&id + self.matrix("j") * creal(T::from_i32(r2).unwrap())) * half;
        let pk = (&id + self.matrix("k") * creal(T::from_i32(r3).unwrap())) * half;
        Ok(pj * pk)
    }

    /// The two-dimensional sector projector written in terms of `R(i)`,
    /// `R(j)`, `R(k)` and the amplitudes `a`.
    pub fn spinor_projector(&self, a: &CVec<T>) -> Result<CMat<T>, RotorError> {
        if self.is_integer() {
            return Err(RotorError::IntegerLambda(self.two_lambda));
        }
        check_unit(a)?;
        let (a1, a2) = (a[0], a[1]);
        let i = cx::<T>(0.0, 1.0);
        let id = linalg::identity::<T>(self.dim());
        let (ri, rj, rk) = (self.matrix("i"), self.matrix("j"), self.matrix("k"));
        let p = (&id - rk * i) * creal(a1.norm_sqr())
            + (&id + rk * i) * creal(a2.norm_sqr())
            + (-(ri * i) - rj) * (a1 * a2.conj())
            + (-(ri * i) + rj) * (a1.conj() * a2);
        Ok(p * creal(T::lit(0.5)))
    }

    /// `B_MN = R_MN + r2 (-1)^(Λ+N) R_{M,-N}` for `N >= 0` even (`r3 = 1`) or
    /// odd (`r3 = -1`), skipping the `N = 0` member when it cancels.
    pub fn abelian_sector_basis(&self, r2: i32, r3: i32) -> Result<SectorBasis<T>, RotorError> {
        if !self.is_integer() {
            return Err(RotorError::OddHalfInteger(self.two_lambda));
        }
        let tl = i64::from(self.two_lambda);
        let wanted = if r3 == 1 { 0 } else { 1 };
        let mut columns = Vec::new();
        let mut vanishing = Vec::new();
        for n in 0..self.dim() {
            let two_n = self.twice(n);
            if two_n < 0 || (two_n / 2).rem_euclid(2) != wanted {
                continue;
            }
            let s = i64::from(r2) * sign((tl + two_n) / 2);
            if two_n == 0 && s == -1 {
                vanishing.push(two_n);
                continue;
            }
            columns.push(BasisColumn { two_n, own: cone(), partner: creal(T::from_i64(s).unwrap()) });
        }
        Ok(SectorBasis { two_lambda: self.two_lambda, columns, vanishing })
    }

    /// `B_MN(a) = a1 R_MN + (-1)^(Λ+N) a2 R_{M,-N}` for `2N = 1 mod 4`.
    pub fn spinor_sector_basis(&self, a: &CVec<T>) -> Result<SectorBasis<T>, RotorError> {
        if self.is_integer() {
            return Err(RotorError::IntegerLambda(self.two_lambda));
        }
        let tl = i64::from(self.two_lambda);
        let columns = (0..self.dim())
            .map(|n| self.twice(n))
            .filter(|two_n| two_n.rem_euclid(4) == 1)
            .map(|two_n| BasisColumn { two_n, own: a[0], partner: a[1] * creal(T::from_i64(sign((tl + two_n) / 2)).unwrap()) })
            .collect();
        Ok(SectorBasis { two_lambda: self.two_lambda, columns, vanishing: Vec::new() })
    }

    /// Complex conjugation on the function span: `conj(c)` followed by the
    /// permutation `(M, N) -> (-M, -N)` with sign `(-1)^(M-N)`.
    pub fn conjugate_function(&self, c: &CVec<T>) -> CVec<T> {
        let d = self.dim();
        let mut out = CVec::from_element(d * d, czero());
        for m in 0..d {
            for n in 0..d {
                let s = T::from_i64(sign((self.twice(m) - self.twice(n)) / 2)).unwrap();
                out[(d - 1 - m) * d + (d - 1 - n)] = c[m * d + n].conj() * creal(s);
            }
        }
        out
    }
}

/// One column pattern `own R_{M,N} + partner R_{M,-N}`, repeated for every `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisColumn<T: Real> {
    pub two_n: i64,
    pub own: Cx<T>,
    pub partner: Cx<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis<T: Real> {
    pub two_lambda: u32,
    pub columns: Vec<BasisColumn<T>>,
    /// `2N` values whose basis function is identically zero.
    pub vanishing: Vec<i64>,
}

impl<T: Real> SectorBasis<T> {
    fn dim(&self) -> usize {
        self.two_lambda as usize + 1
    }

    pub fn family_size(&self) -> usize {
        self.dim() * self.columns.len()
    }

    /// `B_MN` restricted to row `M`, as a vector in `N` coordinates.
    pub fn row_vector(&self, col: &BasisColumn<T>) -> CVec<T> {
        let d = self.dim();
        let tl = i64::from(self.two_lambda);
        let idx = |two_n: i64| ((two_n + tl) / 2) as usize;
        let mut v = CVec::from_element(d, czero());
        v[idx(col.two_n)] += col.own;
        v[idx(-col.two_n)] += col.partner;
        v
    }

    /// `B_MN` in the full function span.
    pub fn function(&self, two_m: i64, two_n: i64) -> Option<CVec<T>> {
        let d = self.dim();
        let col = self.columns.iter().find(|c| c.two_n == two_n)?;
        let m = ((two_m + i64::from(self.two_lambda)) / 2) as usize;
        let mut out = CVec::from_element(d * d, czero());
        out.rows_mut(m * d, d).copy_from(&self.row_vector(col));
        Some(out)
    }

    /// Row patterns as columns of a `(2Λ+1) x k` matrix.
    pub fn row_matrix(&self) -> CMat<T> {
        let cols: Vec<CVec<T>> = self.columns.iter().map(|c| self.row_vector(c)).collect();
        linalg::columns_to_matrix(self.dim(), &cols)
    }

    /// Rank of the whole family; rows `M` are independent, so this is
    /// `(2Λ+1)` times the rank of one row.
    pub fn rank(&self) -> usize {
        if self.columns.is_empty() { 0 } else { self.dim() * linalg::rank(&self.row_matrix()) }
    }

    /// Largest distance of a family member from the image of `P`.
    pub fn projection_residual(&self, p: &CMat<T>) -> T {
        let m = self.row_matrix();
        if m.ncols() == 0 {
            return T::zero();
        }
        linalg::max_abs_diff(&(p * &m), &m)
    }
}

/// Antilinear map given on a basis by `B_k -> sum_j t[(j, k)] B_j`; returns
/// the deviation of `T^2` from `target` times the identity.
pub fn antilinear_square_residual<T: Real>(t: &CMat<T>, target: T) -> T {
    let sq = t * linalg::conj(t);
    linalg::max_abs_diff(&sq, &(linalg::identity::<T>(t.nrows()) * creal(target)))
}

/// Time reversal `B_MN -> (-1)^(Λ+M) B_{-M,N}` on a family indexed as
/// `(M, column)` with `M` slowest.
pub fn time_reversal_matrix<T: Real>(basis: &SectorBasis<T>) -> CMat<T> {
    let d = basis.two_lambda as usize + 1;
    let k = basis.columns.len();
    let tl = i64::from(basis.two_lambda);
    let mut t = linalg::zeros::<T>(d * k, d * k);
    for m in 0..d {
        let two_m = 2 * m as i64 - tl;
        for c in 0..k {
            t[((d - 1 - m) * k + c, m * k + c)] = creal(T::from_i64(sign((tl + two_m) / 2)).unwrap());
        }
    }
    t
}

/// Per-Λ outcome of the rotor analysis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotorRow {
    pub two_lambda: u32,
    /// Dimension of each sector image in the `(2Λ+1)^2` function span.
    pub sector_dims: Vec<usize>,
    pub multiplicities: Vec<usize>,
    pub row_sum: usize,
    pub spinor_family_size: usize,
    pub bases: Vec<BasisTable>,
    pub residuals: RowResiduals,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisTable {
    pub mu: usize,
    pub two_n: Vec<i64>,
    /// `[re, im]` coefficients of `R_{M,N}` and `R_{M,-N}` per entry of `two_n`.
    pub own: Vec<[f64; 2]>,
    pub partner: Vec<[f64; 2]>,
    pub vanishing: Vec<i64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RowResiduals {
    pub homomorphism: f64,
    pub unitarity: f64,
    pub idempotence: f64,
    /// Closed-form projectors against the group sum.
    pub projector_match: f64,
    /// Basis members against the projector image.
    pub basis_in_image: f64,
    /// Projector ranks divided by `n_mu` against character multiplicities.
    pub multiplicity_mismatch: f64,
    /// Basis rank against projector rank.
    pub rank_mismatch: f64,
    pub conjugation: f64,
    /// Entrywise conjugation identity of the basis functions.
    pub time_reversal: f64,
    /// `T^2 - (-1)^(2Λ)`
    pub time_reversal_square: f64,
}

impl RowResiduals {
    pub fn worst(&self) -> f64 {
        [
            self.homomorphism,
            self.unitarity,
            self.idempotence,
            self.projector_match,
            self.basis_in_image,
            self.multiplicity_mismatch,
            self.rank_mismatch,
            self.conjugation,
            self.time_reversal,
            self.time_reversal_square,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotorReport {
    pub two_lambda_max: u32,
    pub amplitude: [[f64; 2]; 2],
    pub sector_labels: Vec<String>,
    pub rows: Vec<RotorRow>,
}

impl RotorReport {
    pub fn worst_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residuals.worst()).fold(0.0, f64::max)
    }

    /// Every row sums to `(2Λ+1)^2`.
    pub fn complete(&self) -> bool {
        self.rows.iter().all(|r| r.row_sum == (r.two_lambda as usize + 1).pow(2))
    }
}

/// Runs the full analysis for `2Λ = 0..=two_lambda_max` with amplitude `a`
/// for the two-dimensional sector.
pub fn rotor_report<T: Real>(two_lambda_max: u32, a: &CVec<T>) -> Result<RotorReport, RotorError> {
    check_unit(a)?;
    let set = fixtures::builtin::<T>("d8star").expect("bundled quaternion fixture").1;
    let rows = (0..=two_lambda_max).map(|tl| rotor_row(tl, &set, a)).collect::<Result<Vec<_>, _>>()?;
    Ok(RotorReport {
        two_lambda_max,
        amplitude: [to_pair(a[0]), to_pair(a[1])],
        sector_labels: set.irreps().iter().map(|ir| ir.label().to_string()).collect(),
        rows,
    })
}

fn to_pair<T: Real>(z: Cx<T>) -> [f64; 2] {
    [z.re.as_f64(), z.im.as_f64()]
}

fn table<T: Real>(mu: usize, b: &SectorBasis<T>) -> BasisTable {
    BasisTable {
        mu,
        two_n: b.columns.iter().map(|c| c.two_n).collect(),
        own: b.columns.iter().map(|c| to_pair(c.own)).collect(),
        partner: b.columns.iter().map(|c| to_pair(c.partner)).collect(),
        vanishing: b.vanishing.clone(),
    }
}

/// Entrywise deviation of `conj(B_MN)` from `sign(M) B'_{-M,N}` over the
/// family, where `other` supplies `B'`.
fn conjugation_identity<T: Real>(
    block: &RotorBlock<T>,
    b: &SectorBasis<T>,
    other: &SectorBasis<T>,
    sign_of: impl Fn(i64) -> T,
) -> T {
    let mut worst = T::zero();
    for m in 0..block.dim() {
        let two_m = block.twice(m);
        for c in &b.columns {
            let lhs = block.conjugate_function(&b.function(two_m, c.two_n).expect("member"));
            let rhs = match other.function(-two_m, c.two_n) {
                Some(v) => v * creal(sign_of(two_m)),
                None => return T::lit(f64::INFINITY),
            };
            let r = lhs.iter().zip(rhs.iter()).fold(T::zero(), |acc, (x, y)| crate::cover::max(acc, (x - y).norm_sqr().sqrt()));
            worst = crate::cover::max(worst, r);
        }
    }
    worst
}

fn rotor_row<T: Real>(tl: u32, set: &IrrepSet<T>, a: &CVec<T>) -> Result<RotorRow, RotorError> {
    let block = RotorBlock::<T>::new(tl);
    let d = block.dim();
    let lam = i64::from(tl);
    let chi = block.character();
    let mut res = RowResiduals {
        homomorphism: block.homomorphism_residual().as_f64(),
        unitarity: block.unitarity_residual().as_f64(),
        conjugation: block.conjugation_residual().as_f64(),
        ..RowResiduals::default()
    };
    let mut sector_dims = Vec::new();
    let mut multiplicities = Vec::new();
    let mut bases = Vec::new();
    let mut spinor_family_size = 0;
    let bump = |slot: &mut f64, v: f64| *slot = slot.max(v);
    for mu in 0..set.count() {
        let n_mu = set.dim(mu);
        let mult = set.multiplicity(&chi, mu).expect("rotor characters decompose");
        multiplicities.push(mult);
        // isotypic projector from the group sum
        let iso = (0..n_mu).fold(linalg::zeros::<T>(d, d), |acc, i| {
            acc + block.generic_projector(set, mu, &crate::superselection::unit_vector(n_mu, i))
        });
        let rank = linalg::rank(&iso);
        sector_dims.push(d * rank);
        bump(&mut res.multiplicity_mismatch, (rank as f64 / n_mu as f64 - mult as f64).abs());
        if n_mu == 1 {
            let (r2, r3) = (set.d(mu, block.group().index_of("j").unwrap())[(0, 0)].re, set.d(mu, block.group().index_of("k").unwrap())[(0, 0)].re);
            let (r2, r3) = (r2.to_i32().unwrap(), r3.to_i32().unwrap());
            if block.is_integer() {
                let p = block.abelian_projector(r2, r3)?;
                bump(&mut res.projector_match, linalg::max_abs_diff(&p, &iso).as_f64());
                bump(&mut res.idempotence, linalg::max_abs_diff(&(&p * &p), &p).as_f64());
                let b = block.abelian_sector_basis(r2, r3)?;
                bump(&mut res.basis_in_image, b.projection_residual(&p).as_f64());
                bump(&mut res.rank_mismatch, (b.rank() as f64 - (d * rank) as f64).abs());
                let r2f = T::from_i32(r2).unwrap();
                let tr = conjugation_identity(&block, &b, &b, |two_m| r2f * T::from_i64(sign((lam + two_m) / 2)).unwrap());
                bump(&mut res.time_reversal, tr.as_f64());
                let t = time_reversal_matrix(&b);
                bump(&mut res.time_reversal_square, antilinear_square_residual(&t, T::one()).as_f64());
                bases.push(table(mu, &b));
            }
        } else if !block.is_integer() {
            let p = block.spinor_projector(a)?;
            bump(&mut res.projector_match, linalg::max_abs_diff(&p, &block.generic_projector(set, mu, a)).as_f64());
            bump(&mut res.idempotence, linalg::max_abs_diff(&(&p * &p), &p).as_f64());
            bump(&mut res.idempotence, linalg::max_abs_diff(&p.adjoint(), &p).as_f64());
            let b = block.spinor_sector_basis(a)?;
            spinor_family_size = b.family_size();
            bump(&mut res.basis_in_image, b.projection_residual(&p).as_f64());
            bump(&mut res.rank_mismatch, (b.rank() as f64 - (d * linalg::rank(&p)) as f64).abs());
            // conj B(a) = -(-1)^(Λ+M) B_{-M,N}(i τ2 conj(a))
            let flipped = CVec::from_vec(vec![a[1].conj(), -a[0].conj()]);
            let other = block.spinor_sector_basis(&flipped)?;
            let tr = conjugation_identity(&block, &b, &other, |two_m| -T::from_i64(sign((lam + two_m) / 2)).unwrap());
            bump(&mut res.time_reversal, tr.as_f64());
            let t = time_reversal_matrix(&b);
            bump(&mut res.time_reversal_square, antilinear_square_residual(&t, -T::one()).as_f64());
            bases.push(table(mu, &b));
        }
    }
    let row_sum = sector_dims.iter().sum();
    Ok(RotorRow { two_lambda: tl, sector_dims, multiplicities, row_sum, spinor_family_size, bases, residuals: res })
}

/// Unitary `U` with `D^4(g) U = U R^{1/2}(g)`.
pub fn spin_half_intertwiner<T: Real>(set: &IrrepSet<T>) -> Option<CMat<T>> {
    let block = RotorBlock::<T>::new(1);
    let mu = set.dims().iter().position(|&d| d == 2)?;
    let left: Vec<CMat<T>> = set.group().elements().map(|g| set.d(mu, g).clone()).collect();
    rep::intertwiner(&left, block.matrices())
}

/// Expected multiplicities for `2Λ`, one per sector `D^0..D^4`.
pub fn closed_form_multiplicities(two_lambda: u32) -> [usize; 5] {
    let tl = two_lambda as usize;
    if tl % 2 == 1 {
        return [0, 0, 0, 0, tl.div_ceil(2)];
    }
    let l = tl / 2;
    if l.is_multiple_of(2) { [l / 2 + 1, l / 2, l / 2, l / 2, 0] } else { [(l - 1) / 2, l.div_ceil(2), l.div_ceil(2), l.div_ceil(2), 0] }
}

pub fn unit_amplitude<T: Real>(re1: f64, im1: f64, re2: f64, im2: f64) -> CVec<T> {
    CVec::from_vec(vec![cx(re1, im1), cx(re2, im2)])
}

/// Builds a dense matrix from a closed-form entry rule over `(2M, 2N)`.
pub fn from_rule<T: Real>(two_lambda: u32, f: impl Fn(i64, i64) -> Cx<T>) -> CMat<T> {
    let d = two_lambda as usize + 1;
    let tl = i64::from(two_lambda);
    DMatrix::from_fn(d, d, |m, n| f(2 * m as i64 - tl, 2 * n as i64 - tl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    type C = Complex<f64>;

    fn e(k: usize) -> CVec<f64> {
        crate::superselection::unit_vector(2, k)
    }

    fn d8() -> IrrepSet<f64> {
        fixtures::builtin::<f64>("d8star").unwrap().1
    }

    // independent evaluation of the closed forms with floating-point phases
    fn phase(two_n: i64) -> C {
        C::from_polar(1.0, std::f64::consts::FRAC_PI_2 * two_n as f64)
    }

    fn parity(k: i64) -> f64 {
        if k % 2 == 0 { 1.0 } else { -1.0 }
    }

    #[test]
    fn closed_forms() {
        for tl in 0..8u32 {
            let b = RotorBlock::<f64>::new(tl);
            let l = i64::from(tl);
            let rj = from_rule::<f64>(tl, |m, n| if m == -n { C::new(parity((l + n) / 2), 0.0) } else { C::new(0.0, 0.0) });
            let rk = from_rule::<f64>(tl, |m, n| if m == n { phase(n) } else { C::new(0.0, 0.0) });
            let ri = from_rule::<f64>(tl, |m, n| if m == -n { phase(n) * parity((l + n) / 2) } else { C::new(0.0, 0.0) });
            assert!(linalg::max_abs_diff(b.matrix("j"), &rj) < 1e-15);
            assert!(linalg::max_abs_diff(b.matrix("k"), &rk) < 1e-15);
            assert!(linalg::max_abs_diff(b.matrix("i"), &ri) < 1e-15);
            if tl % 2 == 1 {
                // half-odd specializations
                let ri2 = from_rule::<f64>(tl, |m, n| if m == -n { C::new(0.0, parity((l + 1) / 2)) } else { C::new(0.0, 0.0) });
                let rk2 = from_rule::<f64>(tl, |m, n| if m == n { C::new(0.0, -parity((n + 1) / 2)) } else { C::new(0.0, 0.0) });
                assert!(linalg::max_abs_diff(b.matrix("i"), &ri2) < 1e-15);
                assert!(linalg::max_abs_diff(b.matrix("k"), &rk2) < 1e-15);
            }
            let pm = if tl % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(b.matrix("-1"), &(linalg::identity::<f64>(tl as usize + 1) * C::new(pm, 0.0)));
            assert_eq!(b.homomorphism_residual(), 0.0);
            assert_eq!(b.unitarity_residual(), 0.0);
            assert_eq!(b.conjugation_residual(), 0.0);
        }
    }

    #[test]
    fn trivial_block_and_spin_half() {
        let b = RotorBlock::<f64>::new(0);
        assert!(b.matrices().iter().all(|m| m == &linalg::identity::<f64>(1)));
        let h = RotorBlock::<f64>::new(1);
        let i = C::new(0.0, 1.0);
        for (k, l) in [(1, "i"), (2, "j"), (3, "k")] {
            assert!(linalg::max_abs_diff(h.matrix(l), &(fixtures::pauli(k) * -i)) < 1e-15);
        }
        let u = spin_half_intertwiner(&d8()).unwrap();
        assert!(linalg::max_abs_diff(&(&u * u.adjoint()), &linalg::identity(2)) < 1e-12);
        let two = RotorBlock::<f64>::new(4);
        assert!(linalg::max_abs_diff(&(two.matrix("j") * two.matrix("k")), two.matrix("i")) < 1e-12);
    }

    #[test]
    fn character_matches_trace() {
        for tl in 0..12 {
            let b = RotorBlock::<f64>::new(tl);
            for (g, c) in b.character().iter().enumerate() {
                assert!((c - b.matrices()[g].trace()).norm() < 1e-12, "2Λ={tl}");
            }
        }
    }

    #[test]
    fn multiplicity_table() {
        let set = d8();
        for tl in 0..=20 {
            let chi = RotorBlock::<f64>::new(tl).character();
            let got: Vec<usize> = (0..5).map(|mu| set.multiplicity(&chi, mu).unwrap()).collect();
            assert_eq!(got, closed_form_multiplicities(tl).to_vec(), "2Λ={tl}");
        }
        assert_eq!(closed_form_multiplicities(4), [2, 1, 1, 1, 0]);
        assert_eq!(closed_form_multiplicities(2), [0, 1, 1, 1, 0]);
        assert_eq!(closed_form_multiplicities(3), [0, 0, 0, 0, 2]);
    }

    #[test]
    fn abelian_projectors() {
        let b = RotorBlock::<f64>::new(0);
        for (r2, r3) in ABELIAN_SIGNS {
            let p = b.abelian_projector(r2, r3).unwrap();
            let want = if (r2, r3) == (1, 1) { 1.0 } else { 0.0 };
            assert_eq!(p[(0, 0)], C::new(want, 0.0));
        }
        let b = RotorBlock::<f64>::new(4);
        assert_eq!(linalg::rank(&b.abelian_projector(1, 1).unwrap()), 2);
        let b = RotorBlock::<f64>::new(2);
        let ranks: Vec<usize> = ABELIAN_SIGNS.iter().map(|&(r2, r3)| linalg::rank(&b.abelian_projector(r2, r3).unwrap())).collect();
        assert_eq!(ranks, vec![0, 1, 1, 1]);
        assert_eq!(RotorBlock::<f64>::new(3).abelian_projector(1, 1), Err(RotorError::OddHalfInteger(3)));
    }

    #[test]
    fn abelian_signs_match_fixture() {
        let set = d8();
        let g = set.group();
        for (mu, (r2, r3)) in ABELIAN_SIGNS.iter().enumerate() {
            assert_eq!(set.d(mu, g.index_of("j").unwrap())[(0, 0)], C::new(f64::from(*r2), 0.0));
            assert_eq!(set.d(mu, g.index_of("-k").unwrap())[(0, 0)], C::new(f64::from(*r3), 0.0));
        }
    }

    #[test]
    fn abelian_bases() {
        let b = RotorBlock::<f64>::new(4);
        let s0 = b.abelian_sector_basis(1, 1).unwrap();
        assert_eq!(s0.columns.iter().map(|c| c.two_n).collect::<Vec<_>>(), vec![0, 4]);
        assert_eq!(s0.rank(), 10);
        let s3 = b.abelian_sector_basis(-1, 1).unwrap();
        assert_eq!(s3.vanishing, vec![0]);
        assert_eq!(s3.rank(), 5);
        // T^mu R_MN = ¼(1 + r3(-1)^N) B_MN, read off column N of P
        for (r2, r3) in ABELIAN_SIGNS {
            let p = b.abelian_projector(r2, r3).unwrap();
            let basis = b.abelian_sector_basis(r2, r3).unwrap();
            for c in &basis.columns {
                let col = p.column(b.index(c.two_n)).into_owned();
                let expect = basis.row_vector(c) * C::new(0.25 * (1.0 + f64::from(r3) * parity(c.two_n / 2)), 0.0);
                assert!(crate::cover::vec_diff(&col, &expect) < 1e-15);
            }
        }
    }

    #[test]
    fn spinor_projector_properties() {
        let set = d8();
        let h = RotorBlock::<f64>::new(1);
        assert_eq!(linalg::rank(&h.spinor_projector(&e(0)).unwrap()), 1);
        let b = RotorBlock::<f64>::new(3);
        let a = unit_amplitude::<f64>(0.6, 0.0, 0.0, 0.8);
        let p = b.spinor_projector(&a).unwrap();
        assert_eq!(linalg::rank(&p), 2);
        assert!(linalg::max_abs_diff(&p, &b.generic_projector(&set, 4, &a)) < 1e-12);
        let p1 = b.spinor_projector(&e(0)).unwrap();
        let p2 = b.spinor_projector(&e(1)).unwrap();
        assert!(linalg::max_abs(&(&p1 * &p2)) < 1e-15);
        assert_eq!(b.spinor_projector(&(e(0) * C::new(2.0, 0.0))), Err(RotorError::NonUnitVector(2.0)));
        assert_eq!(RotorBlock::<f64>::new(2).spinor_projector(&e(0)), Err(RotorError::IntegerLambda(2)));
    }

    #[test]
    fn spinor_bases() {
        let b = RotorBlock::<f64>::new(3);
        let s = b.spinor_sector_basis(&e(0)).unwrap();
        assert_eq!(s.columns.iter().map(|c| c.two_n).collect::<Vec<_>>(), vec![-3, 1]);
        assert_eq!(s.family_size(), 8);
        assert_eq!(s.rank(), 8);
        assert!(s.columns.iter().all(|c| c.partner == C::new(0.0, 0.0)));
        let h = RotorBlock::<f64>::new(1).spinor_sector_basis(&e(1)).unwrap();
        assert_eq!(h.family_size(), 2);
    }

    #[test]
    fn report_rows() {
        let a = unit_amplitude::<f64>(0.6, 0.0, 0.0, 0.8);
        let r = rotor_report(4, &a).unwrap();
        assert!(r.complete());
        assert!(r.worst_residual() < 1e-10, "{:?}", r.rows.iter().map(|x| &x.residuals).collect::<Vec<_>>());
        assert_eq!(r.rows[0].sector_dims, vec![1, 0, 0, 0, 0]);
        assert_eq!(r.rows[3].sector_dims, vec![0, 0, 0, 0, 16]);
        assert_eq!(r.rows[3].spinor_family_size, 8);
        assert_eq!(r.rows[4].sector_dims, vec![10, 5, 5, 5, 0]);
        assert!(rotor_report(2, &(e(0) * C::new(0.5, 0.0))).is_err());
    }

    #[test]
    fn single_precision_block() {
        let b = RotorBlock::<f32>::new(5);
        assert_eq!(b.homomorphism_residual(), 0.0);
        let a = unit_amplitude::<f32>(0.0, 0.6, 0.8, 0.0);
        let p = b.spinor_projector(&a).unwrap();
        assert!(linalg::max_abs_diff(&(&p * &p), &p) < 1e-5);
    }
}

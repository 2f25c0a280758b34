//! Bundled groups and irrep sets.
//!
//! The builders here construct each group from a concrete model
//! (residues, permutations, quaternions, 2x2 matrices) and serve as the
//! source for the JSON files under `fixtures/`. Loading goes through the
//! JSON, optionally from a directory named by `SECTORIUM_FIXTURES`.

use std::f64::consts::PI;
use std::path::PathBuf;

use nalgebra::DMatrix;
use num_complex::Complex;
use thiserror::Error;

use crate::group::{FiniteGroup, GroupError};
use crate::rep::{Irrep, IrrepFile, IrrepSet, RepError};
use crate::scalar::{from_c64, CMat, Real};

pub const FIXTURE_ENV: &str = "SECTORIUM_FIXTURES";

pub const BUILTIN_NAMES: [&str; 15] = [
    "z1", "z2", "z3", "z4", "z5", "z6", "z7", "z8", "z9", "z10", "z11", "z12", "s3", "q8", "d8star",
];

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unknown group {0:?}")]
    Unknown(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Group { path: String, source: GroupError },
    #[error("{path}: {source}")]
    Rep { path: String, source: RepError },
}

macro_rules! embedded {
    ($($name:literal),* $(,)?) => {
        fn embedded(name: &str) -> Option<(&'static str, &'static str)> {
            match name {
                $($name => Some((
                    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/", $name, ".group.json")),
                    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/", $name, ".irreps.json")),
                )),)*
                _ => None,
            }
        }
    };
}

embedded!("z1", "z2", "z3", "z4", "z5", "z6", "z7", "z8", "z9", "z10", "z11", "z12", "s3", "q8", "d8star");

fn fixture_texts(name: &str) -> Result<(String, String, String), FixtureError> {
    if let Some(dir) = std::env::var_os(FIXTURE_ENV) {
        let dir = PathBuf::from(dir);
        let gp = dir.join(format!("{name}.group.json"));
        let ip = dir.join(format!("{name}.irreps.json"));
        if gp.exists() {
            let read = |p: &PathBuf| {
                std::fs::read_to_string(p).map_err(|source| FixtureError::Io { path: p.display().to_string(), source })
            };
            return Ok((read(&gp)?, read(&ip)?, dir.display().to_string()));
        }
    }
    let (g, i) = embedded(name).ok_or_else(|| FixtureError::Unknown(name.to_string()))?;
    Ok((g.to_string(), i.to_string(), "<bundled>".to_string()))
}

/// Loads a bundled group and its validated irrep set.
pub fn builtin<T: Real>(name: &str) -> Result<(FiniteGroup, IrrepSet<T>), FixtureError> {
    let (gtext, itext, origin) = fixture_texts(name)?;
    let gpath = format!("{origin}/{name}.group.json");
    let ipath = format!("{origin}/{name}.irreps.json");
    let group = FiniteGroup::from_json(&gtext).map_err(|source| FixtureError::Group { path: gpath, source })?;
    let file = IrrepFile::from_json(&itext).map_err(|source| FixtureError::Rep { path: ipath.clone(), source })?;
    let set = IrrepSet::from_file(&group, &file).map_err(|source| FixtureError::Rep { path: ipath, source })?;
    Ok((group, set))
}

pub fn builtin_group(name: &str) -> Result<FiniteGroup, FixtureError> {
    let (gtext, _, origin) = fixture_texts(name)?;
    FiniteGroup::from_json(&gtext)
        .map_err(|source| FixtureError::Group { path: format!("{origin}/{name}.group.json"), source })
}

/// Every bundled group, built directly (no JSON).
pub fn all_groups() -> Vec<FiniteGroup> {
    BUILTIN_NAMES.iter().map(|n| build(n).unwrap().0).collect()
}

/// Direct construction of a bundled group and raw irreps.
pub fn build(name: &str) -> Option<(FiniteGroup, Vec<Irrep<f64>>)> {
    match name {
        "s3" => Some((symmetric3(), symmetric3_irreps())),
        "q8" => Some((q8(), q8_irreps())),
        "d8star" => Some((d8star(), d8star_irreps())),
        _ => {
            let n: usize = name.strip_prefix('z')?.parse().ok()?;
            (1..=12).contains(&n).then(|| (cyclic(n), cyclic_irreps(n)))
        }
    }
}

fn table_from<E: PartialEq>(elems: &[E], mul: impl Fn(&E, &E) -> E) -> Vec<Vec<usize>> {
    elems
        .iter()
        .map(|a| {
            elems
                .iter()
                .map(|b| {
                    let p = mul(a, b);
                    elems.iter().position(|x| *x == p).expect("closed under multiplication")
                })
                .collect()
        })
        .collect()
}

fn scalar_irrep(label: &str, values: Vec<Complex<f64>>) -> Irrep<f64> {
    Irrep::new(label, values.into_iter().map(|z| DMatrix::from_element(1, 1, z)).collect()).unwrap()
}

pub fn cyclic(n: usize) -> FiniteGroup {
    let labels = (0..n).map(|k| k.to_string()).collect();
    let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    FiniteGroup::from_table(format!("z{n}"), labels, table, 0).unwrap()
}

pub fn cyclic_irreps(n: usize) -> Vec<Irrep<f64>> {
    (0..n)
        .map(|k| {
            let vals = (0..n)
                .map(|g| {
                    // exact values at the real and imaginary axes keep the fixtures clean
                    let r = (k * g) % n;
                    if (4 * r).is_multiple_of(n) {
                        [Complex::new(1.0, 0.0), Complex::new(0.0, 1.0), Complex::new(-1.0, 0.0), Complex::new(0.0, -1.0)]
                            [4 * r / n]
                    } else {
                        Complex::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
                    }
                })
                .collect();
            scalar_irrep(&format!("chi{k}"), vals)
        })
        .collect()
}

const S3_PERMS: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
const S3_LABELS: [&str; 6] = ["e", "(01)", "(02)", "(12)", "(012)", "(021)"];

/// `(a*b)(x) = a(b(x))`
fn compose(a: &[usize; 3], b: &[usize; 3]) -> [usize; 3] {
    [a[b[0]], a[b[1]], a[b[2]]]
}

pub fn symmetric3() -> FiniteGroup {
    let table = table_from(&S3_PERMS, compose);
    FiniteGroup::from_table("s3", S3_LABELS.iter().map(|s| s.to_string()).collect(), table, 0).unwrap()
}

pub fn symmetric3_irreps() -> Vec<Irrep<f64>> {
    let sign = |p: &[usize; 3]| {
        let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        if inversions % 2 == 0 { 1.0 } else { -1.0 }
    };
    // symmetries of a triangle: the permutation action restricted to the
    // plane orthogonal to (1,1,1)
    let basis = DMatrix::from_row_slice(3, 2, &[
        1.0 / 2f64.sqrt(), 1.0 / 6f64.sqrt(),
        -1.0 / 2f64.sqrt(), 1.0 / 6f64.sqrt(),
        0.0, -2.0 / 6f64.sqrt(),
    ]);
    let standard = S3_PERMS
        .iter()
        .map(|p| {
            let perm = DMatrix::from_fn(3, 3, |r, c| if p[c] == r { 1.0 } else { 0.0 });
            let d = basis.transpose() * perm * &basis;
            d.map(|x| Complex::new(clean(x), 0.0))
        })
        .collect();
    vec![
        scalar_irrep("trivial", vec![Complex::new(1.0, 0.0); 6]),
        scalar_irrep("sign", S3_PERMS.iter().map(|p| Complex::new(sign(p), 0.0)).collect()),
        Irrep::new("standard", standard).unwrap(),
    ]
}

fn clean(x: f64) -> f64 {
    for exact in [0.0, 0.5, -0.5, 1.0, -1.0] {
        if (x - exact).abs() < 1e-14 {
            return exact;
        }
    }
    let h = 3f64.sqrt() / 2.0;
    for exact in [h, -h] {
        if (x - exact).abs() < 1e-14 {
            return exact;
        }
    }
    x
}

type Quat = [i32; 4];

fn qmul(a: &Quat, b: &Quat) -> Quat {
    let [a0, a1, a2, a3] = *a;
    let [b0, b1, b2, b3] = *b;
    [
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ]
}

pub const D8STAR_LABELS: [&str; 8] = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"];

fn d8star_units() -> [Quat; 8] {
    [[1, 0, 0, 0], [-1, 0, 0, 0], [0, 1, 0, 0], [0, -1, 0, 0], [0, 0, 1, 0], [0, 0, -1, 0], [0, 0, 0, 1], [0, 0, 0, -1]]
}

/// Binary dihedral group of order eight, as quaternion units.
pub fn d8star() -> FiniteGroup {
    let units = d8star_units();
    let table = table_from(&units, qmul);
    FiniteGroup::from_table("d8star", D8STAR_LABELS.iter().map(|s| s.to_string()).collect(), table, 0).unwrap()
}

/// Signs `(r1, r2, r3)` of the one-dimensional irreps on `±i`, `±j`, `±k`.
pub const D8STAR_SIGNS: [(i32, i32, i32); 4] = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)];

pub fn pauli(k: usize) -> CMat<f64> {
    let z = Complex::new(0.0, 0.0);
    let o = Complex::new(1.0, 0.0);
    let i = Complex::new(0.0, 1.0);
    match k {
        1 => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        2 => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        3 => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => DMatrix::identity(2, 2),
    }
}

pub fn d8star_irreps() -> Vec<Irrep<f64>> {
    let units = d8star_units();
    let mut out: Vec<Irrep<f64>> = D8STAR_SIGNS
        .iter()
        .enumerate()
        .map(|(mu, &(r1, r2, r3))| {
            let vals = units
                .iter()
                .map(|q| {
                    let v = match (q[1] != 0, q[2] != 0, q[3] != 0) {
                        (true, _, _) => r1,
                        (_, true, _) => r2,
                        (_, _, true) => r3,
                        _ => 1,
                    };
                    Complex::new(v as f64, 0.0)
                })
                .collect();
            scalar_irrep(&format!("D{mu}"), vals)
        })
        .collect();
    // q = w + x i + y j + z k  ->  w 1 - i (x t1 + y t2 + z t3)
    let mi = Complex::new(0.0, -1.0);
    let spinor = units
        .iter()
        .map(|q| {
            pauli(0) * Complex::new(q[0] as f64, 0.0)
                + (pauli(1) * Complex::new(q[1] as f64, 0.0)
                    + pauli(2) * Complex::new(q[2] as f64, 0.0)
                    + pauli(3) * Complex::new(q[3] as f64, 0.0))
                    * mi
        })
        .collect();
    out.push(Irrep::new("D4", spinor).unwrap());
    out
}

const Q8_LABELS: [&str; 8] = ["e", "a", "a2", "a3", "b", "ab", "a2b", "a3b"];

fn q8_generators() -> (CMat<f64>, CMat<f64>) {
    let z = Complex::new(0.0, 0.0);
    let o = Complex::new(1.0, 0.0);
    let i = Complex::new(0.0, 1.0);
    (
        DMatrix::from_row_slice(2, 2, &[i, z, z, -i]),
        DMatrix::from_row_slice(2, 2, &[z, -o, o, z]),
    )
}

/// `a^k b^l` in the listed order.
fn q8_matrices() -> Vec<CMat<f64>> {
    let (a, b) = q8_generators();
    let mut out = Vec::new();
    for l in 0..2 {
        for k in 0..4 {
            let mut m = DMatrix::identity(2, 2);
            for _ in 0..k {
                m = &m * &a;
            }
            if l == 1 {
                m = &m * &b;
            }
            out.push(m);
        }
    }
    out
}

/// Quaternion group with the presentation `a^4 = e, b^2 = a^2, b a b^-1 = a^-1`.
pub fn q8() -> FiniteGroup {
    let mats = q8_matrices();
    let close = |x: &CMat<f64>, y: &CMat<f64>| (x - y).iter().all(|z| z.norm() < 1e-12);
    let table = mats
        .iter()
        .map(|x| {
            mats.iter()
                .map(|y| {
                    let p = x * y;
                    mats.iter().position(|m| close(m, &p)).expect("closed")
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_table("q8", Q8_LABELS.iter().map(|s| s.to_string()).collect(), table, 0).unwrap()
}

pub fn q8_irreps() -> Vec<Irrep<f64>> {
    let mut out = Vec::new();
    out.push(Irrep::new("E", q8_matrices()).unwrap());
    for (label, sa, sb) in [("A1", 1.0, 1.0), ("A2", 1.0, -1.0), ("B1", -1.0, 1.0), ("B2", -1.0, -1.0)] {
        let vals = (0..8)
            .map(|idx| {
                let (k, l) = (idx % 4, idx / 4);
                Complex::new(f64::powi(sa, k) * f64::powi(sb, l), 0.0)
            })
            .collect();
        out.push(scalar_irrep(label, vals));
    }
    out
}

/// Converts builder irreps to another scalar type.
pub fn cast_irreps<T: Real>(irreps: &[Irrep<f64>]) -> Vec<Irrep<T>> {
    irreps
        .iter()
        .map(|ir| Irrep::new(ir.label(), ir.matrices().iter().map(|m| m.map(from_c64)).collect()).unwrap())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_json_matches_builders() {
        for name in BUILTIN_NAMES {
            let (g, irreps) = build(name).unwrap();
            let (lg, ls) = builtin::<f64>(name).unwrap();
            assert_eq!(lg, g, "{name}");
            let direct = IrrepSet::validate(&g, irreps).unwrap();
            assert_eq!(ls.count(), direct.count());
            for mu in 0..ls.count() {
                for x in g.elements() {
                    assert!(crate::linalg::max_abs_diff(ls.d(mu, x), direct.d(mu, x)) < 1e-15, "{name}");
                }
            }
        }
    }

    #[test]
    fn d8star_relations() {
        let g = d8star();
        let e = |s: &str| g.index_of(s).unwrap();
        assert_eq!(g.mul(e("i"), e("j")), e("k"));
        assert_eq!(g.mul(e("j"), e("k")), e("i"));
        assert_eq!(g.mul(e("k"), e("i")), e("j"));
        assert_eq!(g.mul(e("i"), e("i")), e("-1"));
        assert_eq!(g.order(), 8);
        assert_eq!(g.identity(), e("1"));
    }

    #[test]
    fn d8star_spinor_matches_pauli_table() {
        let g = d8star();
        let d = &d8star_irreps()[4];
        let mi = Complex::new(0.0, -1.0);
        for (label, k) in [("i", 1), ("j", 2), ("k", 3)] {
            assert_eq!(d.matrix(g.index_of(label).unwrap()), &(pauli(k) * mi));
        }
        assert_eq!(d.matrix(g.index_of("-1").unwrap()), &(-pauli(0)));
    }

    #[test]
    fn s3_is_nonabelian_and_q8_differs_from_d8star_only_by_labels() {
        assert!(!symmetric3().is_abelian());
        let q = q8();
        let d = d8star();
        assert_eq!(q.conjugacy_structure().class_sizes().len(), d.conjugacy_structure().class_sizes().len());
        assert_eq!(q.conjugacy_structure().center.len(), 2);
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(builtin::<f64>("a5"), Err(FixtureError::Unknown(_))));
    }
}

//! Randomized invariants over the bundled fixtures.

mod common;

use common::*;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sectorium::cover::Edge;
use sectorium::fixtures::{self, BUILTIN_NAMES};
use sectorium::{linalg, AlgebraElement, DiscreteCover, GroupAlgebra, RotorBlock};

fn algebra(k: usize) -> GroupAlgebra {
    GroupAlgebra::new(fixtures::builtin::<f64>(BUILTIN_NAMES[k]).unwrap().1)
}

fn element(coeffs: &[(f64, f64)], n: usize) -> AlgebraElement {
    AlgebraElement::new((0..n).map(|g| {
        let (re, im) = coeffs[g % coeffs.len()];
        c(re + g as f64 * 0.01, im)
    }).collect())
    .unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_matches_convolution_and_blocks(k in 0..BUILTIN_NAMES.len(), a in coeffs(), b in coeffs()) {
        let alg = algebra(k);
        let n = alg.order();
        let (v, w) = (element(&a, n), element(&b, n));
        let p = alg.multiply(&v, &w).unwrap();
        let oracle = convolve(alg.irreps().group(), v.coeffs(), w.coeffs());
        let err = p.coeffs().iter().zip(&oracle).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
        let (sv, sw, sp) = (alg.to_sectors(&v).unwrap(), alg.to_sectors(&w).unwrap(), alg.to_sectors(&p).unwrap());
        for mu in 0..sv.blocks.len() {
            prop_assert!(max_abs(&(&sv.blocks[mu] * &sw.blocks[mu] - &sp.blocks[mu])) < 1e-11);
        }
        let back = alg.from_sectors(&sp).unwrap();
        prop_assert!(back.max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn star_is_an_antilinear_anti_involution(k in 0..BUILTIN_NAMES.len(), a in coeffs(), b in coeffs()) {
        let alg = algebra(k);
        let n = alg.order();
        let (v, w) = (element(&a, n), element(&b, n));
        let sv = alg.star(&v).unwrap();
        prop_assert!(alg.star(&sv).unwrap().max_abs_diff(&v) < 1e-15);
        // (v w)* = w* v*
        let lhs = alg.star(&alg.multiply(&v, &w).unwrap()).unwrap();
        let rhs = alg.multiply(&alg.star(&w).unwrap(), &sv).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        let blocks = alg.to_sectors(&v).unwrap();
        let star_blocks = alg.to_sectors(&sv).unwrap();
        for (x, y) in blocks.blocks.iter().zip(&star_blocks.blocks) {
            prop_assert!(max_abs(&(x.adjoint() - y)) < 1e-12);
        }
    }

    #[test]
    fn rank_one_blocks_are_recognised(k in 0..BUILTIN_NAMES.len(), seed in any::<u64>()) {
        let alg = algebra(k);
        let set = alg.irreps();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = (seed as usize) % set.count();
        let d = set.dim(mu);
        let block = random_matrix(&mut rng, d, 1) * random_matrix(&mut rng, 1, d);
        let mut components = alg.to_sectors(&AlgebraElement::zero(alg.order())).unwrap();
        components.blocks[mu] = block.clone();
        let v = alg.from_sectors(&components).unwrap();
        let r = alg.rank_one_test(&v).unwrap();
        prop_assert!(r.irreducible_member);
        prop_assert_eq!(r.mu, Some(mu));
        let (a, b) = (r.a.unwrap(), r.b.unwrap());
        prop_assert!(max_abs(&(a * b.transpose() - block)) < 1e-10);
    }

    #[test]
    fn sector_projectors_are_orthogonal_projections(k in 0..BUILTIN_NAMES.len(), seed in any::<u64>()) {
        let (_, set) = fixtures::builtin::<f64>(BUILTIN_NAMES[k]).unwrap();
        let cover = DiscreteCover::new(2, set.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = (seed as usize) % set.count();
        let a = sectorium::cover::random_unit_vector::<f64>(set.dim(mu), &mut rng);
        let p = cover.sector_projector(mu, &a).unwrap();
        prop_assert!(max_abs(&(&p * &p - &p)) < 1e-12);
        prop_assert!(max_abs(&(p.adjoint() - &p)) < 1e-12);
        prop_assert_eq!(rank(&p), 2 * set.dim(mu));
    }

    #[test]
    fn holonomy_reverses_concatenation(seed in any::<u64>(), va in 0..8usize, vb in 0..8usize) {
        let (_, set) = fixtures::builtin::<f64>("d8star").unwrap();
        let cover = DiscreteCover::new(2, set)
            .with_edges(vec![
                Edge { from: 0, to: 1, voltage: va },
                Edge { from: 1, to: 0, voltage: vb },
                Edge { from: 1, to: 1, voltage: 2 },
            ])
            .unwrap();
        let g = cover.group().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = cover.random_loop(0, 4, &mut rng);
        let b = cover.random_loop(0, 3, &mut rng);
        let ab: Vec<_> = a.iter().chain(&b).copied().collect();
        for h in g.elements() {
            let (ia, ib) = (cover.holonomy(0, &a, h).unwrap(), cover.holonomy(0, &b, h).unwrap());
            prop_assert_eq!(cover.holonomy(0, &ab, h).unwrap(), g.mul(ib, ia));
        }
    }

    #[test]
    fn rotor_blocks_represent_the_quaternion_group(two_lambda in 0u32..=30) {
        let block = RotorBlock::new(two_lambda);
        prop_assert!(block.homomorphism_residual() < 1e-12);
        prop_assert!(block.unitarity_residual() < 1e-12);
        prop_assert!(block.conjugation_residual() < 1e-12);
        // -1 acts as the parity of 2Λ
        let minus = block.matrix("-1");
        let sign = if two_lambda % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(max_abs(&(minus - M::identity(block.dim(), block.dim()) * c(sign, 0.0))) < 1e-15);
    }

    #[test]
    fn range_and_kernel_of_low_rank_matrices(seed in any::<u64>(), r in 1usize..6, k in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, r + 3, k + 1) * random_matrix(&mut rng, k + 1, r + 2);
        let true_rank = (k + 1).min(r + 2);
        let range = linalg::range_basis(&m);
        prop_assert_eq!(range.ncols(), true_rank);
        prop_assert!(max_abs(&(&range * (range.adjoint() * &m) - &m)) < 1e-10);
        let kernel = linalg::nullspace(&m);
        prop_assert_eq!(kernel.ncols(), r + 2 - true_rank);
        prop_assert!(max_abs(&(&m * &kernel)) < 1e-10);
    }

    #[test]
    fn single_precision_round_trip(k in 0..BUILTIN_NAMES.len(), a in coeffs()) {
        let (_, set) = fixtures::builtin::<f32>(BUILTIN_NAMES[k]).unwrap();
        let alg = sectorium::algebra::GroupAlgebra::new(set);
        let n = alg.order();
        let v = sectorium::algebra::AlgebraElement::<f32>::new(
            (0..n).map(|g| { let (re, im) = a[g % a.len()]; num_complex::Complex::new(re as f32, im as f32) }).collect(),
        ).unwrap();
        let back = alg.from_sectors(&alg.to_sectors(&v).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&v) < 1e-5);
    }
}

#[test]
fn unit_vector_projector_agrees_with_index_form() {
    let (_, set) = fixtures::builtin::<f64>("s3").unwrap();
    let cover = DiscreteCover::new(2, set);
    let e = DVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
    let p = cover.sector_projector(2, &e).unwrap();
    assert!(max_abs(&(p - cover.sector_projector_index(2, 1))) < 1e-15);
}

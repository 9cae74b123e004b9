//! Engine results against small independent computations.

use std::sync::Arc;

use hopf_cyclic::catalog::{cyclic_group_algebra, element, sign_character, sweedler};
use hopf_cyclic::cocyclic::{build_hopf_complex, check_cocyclic};
use hopf_cyclic::cohomology::{compute_cohomology, connes_B, cyclic_dims};
use hopf_cyclic::cupprod::shuffle_set;
use hopf_cyclic::hopf::{validate_hopf, ModularPair};
use hopf_cyclic::linalg::image_rank;
use hopf_cyclic::symmetry::{mpi_coefficients, validate_sayd};
use hopf_cyclic::SparseMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

/// Row reduction over big rationals, dense and unoptimized.
fn dense_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                for k in 0..cols {
                    let d = &f * &m[rank][k];
                    m[r][k] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    proptest::collection::vec(proptest::collection::vec(-3i64..=3, cols), rows)
}

fn group_label(k: usize) -> String {
    match k {
        0 => "e".into(),
        1 => "g".into(),
        _ => format!("g{k}"),
    }
}

proptest! {
    #[test]
    fn rank_matches_dense_elimination(rows in (1usize..6, 1usize..6).prop_flat_map(|(r, c)| matrix(r, c))) {
        prop_assert_eq!(image_rank(&SparseMatrix::from_dense(&rows)), dense_rank(&rows));
    }

    #[test]
    fn products_match_schoolbook(a in matrix(3, 4), b in matrix(4, 2)) {
        let naive: Vec<Vec<i64>> = (0..3)
            .map(|i| (0..2).map(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect();
        let got = SparseMatrix::from_dense(&a).compose(&SparseMatrix::from_dense(&b)).unwrap();
        prop_assert_eq!(got, SparseMatrix::from_dense(&naive));
    }

    #[test]
    fn shuffles_are_block_monotone_with_inversion_parity(q in 0usize..5, p in 0usize..5) {
        let all = shuffle_set(q, p);
        let mut seen = std::collections::BTreeSet::new();
        for s in &all {
            prop_assert_eq!(s.perm.len(), p + q);
            prop_assert!(s.perm[..q].windows(2).all(|w| w[0] < w[1]));
            prop_assert!(s.perm[q..].windows(2).all(|w| w[0] < w[1]));
            let inversions = (0..p + q)
                .flat_map(|i| (i + 1..p + q).map(move |j| (i, j)))
                .filter(|&(i, j)| s.perm[i] > s.perm[j])
                .count();
            prop_assert_eq!(s.sign, if inversions % 2 == 0 { 1 } else { -1 });
            prop_assert!(seen.insert(s.perm.clone()));
        }
        // binomial(p+q, q) by Pascal's rule
        let mut row = vec![1usize];
        for _ in 0..p + q {
            let mut next = vec![1usize; row.len() + 1];
            for k in 1..row.len() {
                next[k] = row[k - 1] + row[k];
            }
            row = next;
        }
        prop_assert_eq!(all.len(), row[q]);
    }

    #[test]
    fn group_likes_give_cocyclic_hopf_complexes(n in 1usize..5, k in 0usize..4) {
        let k = k % n;
        let h = Arc::new(cyclic_group_algebra(n));
        let sigma = element(&h, &group_label(k));
        let mp = ModularPair::new(h.clone(), h.counit_vec().clone(), sigma);
        prop_assert!(validate_sayd(&mpi_coefficients(&mp)).is_valid());
        let hc = build_hopf_complex(&mp, 2).unwrap();
        prop_assert!(check_cocyclic(&hc.coalgebra).is_valid());
        prop_assert!(check_cocyclic(&hc.ans).is_valid());
    }
}

#[test]
fn group_algebras_have_periodic_cyclic_cohomology() {
    // HC^p(kG) = sum over i of H^{p-2i}(G, Q), and H^j vanishes for j > 0
    for n in 1..=4 {
        let mp = ModularPair::trivial(Arc::new(cyclic_group_algebra(n)));
        let c = build_hopf_complex(&mp, 4).unwrap().coalgebra;
        let r = compute_cohomology(&c).unwrap();
        let connes = cyclic_dims(&c, &connes_B(&c).unwrap());
        for p in (0..=4).filter(|&p| r.trusted(p)) {
            let expected = usize::from(p % 2 == 0);
            assert_eq!(r.hc[p], expected, "Z/{n} HC^{p}");
            assert_eq!(connes[p], expected, "Z/{n} Connes complex degree {p}");
            assert_eq!(r.hh[p], usize::from(p == 0), "Z/{n} HH^{p}");
        }
    }
}

#[test]
fn sweedler_antipode_has_order_four() {
    let h = sweedler();
    assert!(validate_hopf(&h).is_valid());
    let id = SparseMatrix::identity(4);
    assert_ne!(h.antipode.pow(2), id);
    assert_eq!(h.antipode.pow(4), id);
}

#[test]
fn sweedler_modular_pairs() {
    let h = Arc::new(sweedler());
    let one = element(&h, "1");
    let g = element(&h, "g");
    let eps = h.counit_vec().clone();
    let sign = sign_character(&h);
    let is_mpi = |d: &hopf_cyclic::SparseVec, s: &hopf_cyclic::SparseVec| {
        validate_sayd(&mpi_coefficients(&ModularPair::new(h.clone(), d.clone(), s.clone()))).is_valid()
    };
    assert!(is_mpi(&sign, &one));
    assert!(is_mpi(&eps, &g));
    // S^2 is not the identity, so the trivial pair fails
    assert!(!is_mpi(&eps, &one));
    assert!(!is_mpi(&sign, &g));
}

//! Refined factorization in dimension 2 fails exactly on the elements for
//! which no anti-unitary involution with det(h1) = -1 factors g.

use gufactor::forms::DEFAULT_BUDGET;
use gufactor::verify::oracle_factorizations;
use gufactor::{
    factor_det_refined, oracle_involution_set, Error, Ext, HermitianSpace, Kind, Matrix, Tower,
};

#[test]
fn refined_failures_match_brute_force() {
    for p in [3u64, 5, 7] {
        let f = Tower::new(p, 1, Ext::Trivial, None).unwrap();
        for kind in [Kind::OrthogonalPlus, Kind::OrthogonalMinus] {
            let space = HermitianSpace::standard(&f, 2, kind).unwrap();
            let involutions = oracle_involution_set(&space, DEFAULT_BUDGET).unwrap();
            let minus_one = f.from_int(-1);
            for b in 1..p as i64 {
                let beta = f.from_int(b);
                for g in space.group_enumerate(beta, DEFAULT_BUDGET).unwrap() {
                    let attainable = oracle_factorizations(&space, &involutions, &g)
                        .any(|h| h.mat.det(&f).unwrap() == minus_one);
                    let squares_to_beta = g.g.mul(&g.g, &f) == Matrix::scalar(2, beta);
                    assert_eq!(
                        attainable,
                        f.is_square(beta) || !squares_to_beta,
                        "q={p} {kind:?} beta={b}"
                    );
                    match factor_det_refined(&space, &g) {
                        Ok(cert) => {
                            assert!(attainable);
                            assert_eq!(cert.h1.mat.det(&f).unwrap(), minus_one);
                        }
                        Err(Error::Invariant { identity, .. }) => {
                            assert!(!attainable, "q={p} {kind:?} beta={b}");
                            assert_eq!(identity, "det(h1) = (-1)^m");
                        }
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }
}

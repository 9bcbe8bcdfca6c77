//! Jordan chains checked against exact rational arithmetic.
//!
//! The Jacobians here are strictly lower triangular after the shift, so the
//! chain equations `N X_k = X_(k-1)` can be solved by forward substitution in
//! exact arithmetic, independently of the library's elimination.

use fdsj::{build_chain, chain_determinant, ModelKind, State, SystemModel};
use num_rational::Ratio;

type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Exact chain of the 4x4 system at `(u, v, w, z)`; `params[k]` is the
/// coefficient of `X_1` in `X_(k+2)`.
fn exact_chain4(v: Q, w: Q, z: Q, params: [Q; 3]) -> Vec<[Q; 4]> {
    let zero = q(0, 1);
    let mut chain = vec![[zero, zero, zero, q(1, 1)]];
    for t in params {
        let y = *chain.last().unwrap();
        assert_eq!(y[0], zero);
        let x0 = y[1] / v;
        let x1 = (y[2] - w * x0) / (q(2, 1) * v);
        let x2 = (y[3] - z * x0 - q(3, 1) * w * x1) / (q(3, 1) * v);
        chain.push([x0, x1, x2, t]);
    }
    chain
}

fn jacobian4(u: Q, v: Q, w: Q, z: Q) -> [[Q; 4]; 4] {
    let zero = q(0, 1);
    [
        [u, zero, zero, zero],
        [v, u, zero, zero],
        [w, q(2, 1) * v, u, zero],
        [z, q(3, 1) * w, q(3, 1) * v, u],
    ]
}

fn det4(m: [[Q; 4]; 4]) -> Q {
    // Laplace expansion along the first row.
    fn det3(m: [[Q; 3]; 3]) -> Q {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
    let mut total = q(0, 1);
    for c in 0..4 {
        let mut minor = [[q(0, 1); 3]; 3];
        for i in 1..4 {
            let mut k = 0;
            for j in 0..4 {
                if j != c {
                    minor[i - 1][k] = m[i][j];
                    k += 1;
                }
            }
        }
        let sign = if c % 2 == 0 { q(1, 1) } else { q(-1, 1) };
        total += sign * m[0][c] * det3(minor);
    }
    total
}

fn columns(chain: &[[Q; 4]]) -> [[Q; 4]; 4] {
    let mut p = [[q(0, 1); 4]; 4];
    for (c, x) in chain.iter().enumerate() {
        for r in 0..4 {
            p[r][c] = x[r];
        }
    }
    p
}

fn library_chain4(u: f64, v: f64, w: f64, z: f64, params: &[f64]) -> fdsj::Chain {
    let model = ModelKind::FurtherModifiedBurgers;
    let s = State::from_slice(&[u, v, w, z]);
    let a = model.jacobian(&s).unwrap();
    build_chain(&a, u, 4, params, 1e-10).unwrap()
}

#[test]
fn exact_chain_satisfies_jordan_relations() {
    let (u, v, w, z) = (q(1, 2), q(3, 2), q(-2, 3), q(5, 7));
    let a = jacobian4(u, v, w, z);
    let chain = exact_chain4(v, w, z, [q(1, 3), q(-2, 1), q(4, 5)]);
    for k in 0..4 {
        for r in 0..4 {
            let ax: Q = (0..4).map(|c| a[r][c] * chain[k][c]).sum();
            let expected = u * chain[k][r] + if k > 0 { chain[k - 1][r] } else { q(0, 1) };
            assert_eq!(ax, expected);
        }
    }
}

#[test]
fn unit_state_chain_vectors() {
    let one = q(1, 1);
    let exact = exact_chain4(one, one, one, [q(0, 1); 3]);
    assert_eq!(exact[1], [q(0, 1), q(0, 1), q(1, 3), q(0, 1)]);
    assert_eq!(exact[2], [q(0, 1), q(1, 6), q(-1, 6), q(0, 1)]);
    // The last vector has nonzero second and third entries from the
    // w- and z-couplings.
    assert_eq!(exact[3], [q(1, 6), q(-1, 6), q(1, 9), q(0, 1)]);

    let chain = library_chain4(1.0, 1.0, 1.0, 1.0, &[]);
    for (x, e) in chain.vectors.iter().zip(&exact) {
        for (a, b) in x.iter().zip(e) {
            assert!((a - to_f64(*b)).abs() < 1e-13, "{x:?} vs {e:?}");
        }
    }
}

#[test]
fn library_matches_exact_chain_with_free_params() {
    let cases = [
        ((q(1, 2), q(3, 2), q(-2, 3), q(5, 7)), [q(1, 3), q(-2, 1), q(4, 5)]),
        ((q(-3, 1), q(1, 5), q(2, 1), q(-1, 4)), [q(0, 1), q(0, 1), q(0, 1)]),
        ((q(0, 1), q(-5, 1), q(7, 3), q(9, 2)), [q(-1, 2), q(1, 8), q(3, 1)]),
    ];
    for ((u, v, w, z), params) in cases {
        let exact = exact_chain4(v, w, z, params);
        let chain = library_chain4(
            to_f64(u),
            to_f64(v),
            to_f64(w),
            to_f64(z),
            &params.map(to_f64),
        );
        for (x, e) in chain.vectors.iter().zip(&exact) {
            for (a, b) in x.iter().zip(e) {
                let b = to_f64(*b);
                assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{x:?} vs {e:?}");
            }
        }
    }
}

#[test]
fn determinant_formula() {
    for v in [q(1, 5), q(1, 1), q(2, 1), q(5, 1)] {
        let expected = q(1, 108) / (v * v * v * v * v * v);
        for (w, z) in [(q(1, 1), q(1, 1)), (q(-3, 2), q(2, 7))] {
            for params in [[q(0, 1); 3], [q(2, 1), q(-1, 3), q(5, 4)]] {
                // Exact: the determinant does not depend on w, z or the free
                // parameters.
                assert_eq!(det4(columns(&exact_chain4(v, w, z, params))), expected);
            }
            let chain = library_chain4(0.3, to_f64(v), to_f64(w), to_f64(z), &[]);
            let det = chain_determinant(&chain).unwrap();
            let e = to_f64(expected);
            assert!(((det - e) / e).abs() <= 1e-9, "v = {v}: {det} vs {e}");
        }
    }
}

#[test]
fn two_by_two_chains() {
    // Modified Burgers: X_1 = e_2, X_2 = (1/v, t).
    let model = ModelKind::ModifiedBurgers;
    for (u, v, t) in [(0.5, 2.0, 0.0), (-1.0, -0.25, 3.0)] {
        let a = model.jacobian(&State::from_slice(&[u, v])).unwrap();
        let chain = build_chain(&a, u, 2, &[t], 1e-10).unwrap();
        assert_eq!(chain.vectors[0], vec![0.0, 1.0]);
        assert!((chain.vectors[1][0] - 1.0 / v).abs() < 1e-14);
        assert!((chain.vectors[1][1] - t).abs() < 1e-14);
        assert!((chain_determinant(&chain).unwrap() + 1.0 / v).abs() < 1e-13);
    }
    // Pressureless: X_1 = (1, u), X_2 = (0, 1) + t (1, u), det = 1.
    let model = ModelKind::Pressureless;
    for (rho, u, t) in [(1.0, 1.5, 0.0), (0.2, -3.0, 0.5)] {
        let a = model.jacobian(&State::from_slice(&[rho, rho * u])).unwrap();
        let chain = build_chain(&a, u, 2, &[t], 1e-10).unwrap();
        let expect = [[1.0, u], [t, 1.0 + t * u]];
        for (x, e) in chain.vectors.iter().zip(expect) {
            assert!((x[0] - e[0]).abs() < 1e-12 && (x[1] - e[1]).abs() < 1e-12, "{x:?} vs {e:?}");
        }
        assert!((chain_determinant(&chain).unwrap() - 1.0).abs() < 1e-12);
    }
}

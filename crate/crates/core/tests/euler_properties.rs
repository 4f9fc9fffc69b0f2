use hfvs::physics::{
    build_split_jacobian, steger_warming_flux_pair, Axis, ConservedVector, EosParams, Euler1d, Euler2d,
    Matrix, Physics, PrimitiveVector,
};
use proptest::prelude::*;

const TOL: f64 = 1e-11;

fn scaled_error<const M: usize>(a: &Matrix<M>, b: &Matrix<M>) -> f64 {
    (a - b).abs().max() / (1.0 + b.abs().max())
}

fn vector_error<const M: usize>(a: &ConservedVector<M>, b: &ConservedVector<M>) -> f64 {
    (a - b).abs().max() / (1.0 + b.abs().max())
}

/// Central differences of the flux, step scaled per component.
fn fd_jacobian<P: Physics<M>, const M: usize>(p: &P, w: &ConservedVector<M>, axis: Axis) -> Matrix<M> {
    let mut j = Matrix::<M>::zeros();
    for c in 0..M {
        let h = 1e-6 * w[c].abs().max(1e-3);
        let mut up = *w;
        let mut down = *w;
        up[c] += h;
        down[c] -= h;
        let col = (p.flux(&up, axis).unwrap() - p.flux(&down, axis).unwrap()) / (2.0 * h);
        j.set_column(c, &col);
    }
    j
}

fn check_state<P: Physics<M>, const M: usize>(p: &P, w: &ConservedVector<M>, axis: Axis) {
    let s = build_split_jacobian(p, w, axis).unwrap();
    let r = s.right_eigenvectors;
    let l = s.left_eigenvectors;
    let lam = Matrix::<M>::from_diagonal(&s.eigenvalues);

    assert!(scaled_error(&(s.a_plus + s.a_minus), &s.a) < TOL, "A+ + A- != A");
    assert!(scaled_error(&(r * lam * l), &s.a) < TOL, "R Lambda L != A");
    assert!(scaled_error(&(l * r), &Matrix::<M>::identity()) < TOL, "L R != I");

    let (fp, fm) = steger_warming_flux_pair(p, w, axis).unwrap();
    assert!(vector_error(&(fp + fm), &p.flux(w, axis).unwrap()) < TOL, "F+ + F- != F");

    let fd = fd_jacobian(p, w, axis);
    assert!(scaled_error(&s.a, &fd) < 1e-6, "analytic vs finite-difference Jacobian");
}

fn eos() -> EosParams {
    EosParams::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn euler_1d_splitting_identities(
        rho in 0.05f64..20.0,
        u in -10.0f64..10.0,
        p in 0.01f64..1000.0,
    ) {
        let e = Euler1d::new(eos());
        let w = e.conserved_from_primitive(&PrimitiveVector::new_1d(rho, u, p));
        check_state(&e, &w, Axis::X);
    }

    #[test]
    fn euler_2d_splitting_identities(
        rho in 0.05f64..20.0,
        u in -10.0f64..10.0,
        v in -10.0f64..10.0,
        p in 0.01f64..1000.0,
        along_y in any::<bool>(),
    ) {
        let e = Euler2d::new(eos());
        let w = e.conserved_from_primitive(&PrimitiveVector::new_2d(rho, u, v, p));
        let axis = if along_y { Axis::Y } else { Axis::X };
        check_state(&e, &w, axis);
    }

    #[test]
    fn split_eigenvalue_signs(
        rho in 0.05f64..20.0,
        u in -10.0f64..10.0,
        p in 0.01f64..1000.0,
    ) {
        let e = Euler1d::new(eos());
        let w = e.conserved_from_primitive(&PrimitiveVector::new_1d(rho, u, p));
        let s = build_split_jacobian(&e, &w, Axis::X).unwrap();
        // L A^± R is diagonal with the clipped eigenvalues.
        let plus = s.left_eigenvectors * s.a_plus * s.right_eigenvectors;
        let minus = s.left_eigenvectors * s.a_minus * s.right_eigenvectors;
        // Round-off grows with |L||A||R|, which is large at high Mach number.
        let size = s.left_eigenvectors.abs().max() * s.a.abs().max().max(1.0) * s.right_eigenvectors.abs().max();
        let tol = TOL * (1.0 + size);
        for i in 0..3 {
            for j in 0..3 {
                let lam = s.eigenvalues[i];
                let (ep, em) = if i == j { (lam.max(0.0), lam.min(0.0)) } else { (0.0, 0.0) };
                prop_assert!((plus[(i, j)] - ep).abs() < tol);
                prop_assert!((minus[(i, j)] - em).abs() < tol);
            }
        }
    }
}

#[test]
fn one_dimensional_rows_match_the_x_direction_of_2d() {
    let e1 = Euler1d::new(eos());
    let e2 = Euler2d::new(eos());
    let w1 = e1.conserved_from_primitive(&PrimitiveVector::new_1d(1.3, -0.7, 2.1));
    let w2 = e2.conserved_from_primitive(&PrimitiveVector::new_2d(1.3, -0.7, 0.0, 2.1));
    let f1 = e1.flux(&w1, Axis::X).unwrap();
    let f2 = e2.flux(&w2, Axis::X).unwrap();
    for (a, b) in [(0, 0), (1, 1), (2, 3)] {
        approx::assert_relative_eq!(f1[a], f2[b], max_relative = 1e-14);
    }
}

use kdec::hermitian::{basis_label, make_space};
use kdec::maps::{decompose, sigma, split_ricci, split_ricci_as, theta, traces, ComponentLabel};
use kdec::rational::{int, Q};
use kdec::spaces::{basis_bilinear_family, BilinearFamily};
use kdec::tensor::{Bilinear, Tensor4};
use kdec::KdecError;

/// `J` as a dense matrix: column `z` holds the coordinates of `J b_z`.
fn j_matrix(m: usize) -> Vec<Vec<i64>> {
    let mut j = vec![vec![0; m]; m];
    for p in 0..m / 2 {
        j[2 * p + 1][2 * p] = 1;
        j[2 * p][2 * p + 1] = -1;
    }
    j
}

/// Direct evaluation of the splitting maps on basis vectors.
fn sigma_oracle(k: u8, phi: &Bilinear) -> Tensor4 {
    let m = phi.m();
    let j = j_matrix(m);
    let g = |a: usize, b: usize| if a == b { int(1) } else { int(0) };
    let phi_j = |a: usize, b: usize| (0..m).fold(int(0), |acc, c| acc + phi.get(a, c) * int(j[c][b]));
    let jg = |a: usize, b: usize| int(j[b][a]);
    Tensor4::from_fn(m, |x, y, z, w| {
        let mut v = phi.get(x, z) * g(y, w) - phi.get(y, z) * g(x, w) - phi_j(x, z) * jg(y, w) + phi_j(y, z) * jg(x, w);
        if k == 1 || k == 4 {
            v -= int(2) * phi_j(x, y) * jg(z, w);
        }
        if k == 3 || k == 4 {
            v += int(2) * phi.get(x, y) * g(z, w);
        }
        v
    })
}

fn tau_oracle(a: &Tensor4) -> (Q, Q) {
    let m = a.m();
    let j = j_matrix(m);
    let mut tau = int(0);
    let mut tau_j = int(0);
    for i in 0..m {
        for jj in 0..m {
            tau += a.get(i, jj, jj, i);
            for k in 0..m {
                tau_j += a.get(i, k, jj, i) * int(j[k][jj]);
            }
        }
    }
    (tau, tau_j)
}

fn ix(label: &str) -> usize {
    (0..8).find(|&i| basis_label(i) == label).unwrap()
}

#[test]
fn sigma_one_of_the_metric() {
    for n in [2, 3] {
        let m = 2 * n;
        let g = Bilinear::metric(m);
        let a = sigma(1, &g).unwrap();
        assert_eq!(a, sigma_oracle(1, &g));
        assert_eq!(*a.get(ix("e1"), ix("f1"), ix("f1"), ix("e1")), int(-4));
        let mi = m as i64;
        assert_eq!(traces(&a).0, int(-mi * (mi + 2)));
    }
}

#[test]
fn sigma_matches_oracle_on_family_bases() {
    let space = make_space(2).unwrap();
    for (k, fam) in [
        (1, BilinearFamily::SymPlus),
        (2, BilinearFamily::SymMinus),
        (3, BilinearFamily::AltPlus),
        (4, BilinearFamily::AltMinus),
    ] {
        for phi in basis_bilinear_family(&space, fam).elements::<Bilinear>().unwrap() {
            assert_eq!(sigma(k, &phi).unwrap(), sigma_oracle(k, &phi), "sigma{k}");
        }
    }
}

#[test]
fn chi_trace_of_sigma_three() {
    let om = Bilinear::kaehler_form(4);
    let a = sigma(3, &om).unwrap();
    assert_eq!(traces(&a), tau_oracle(&a));
    assert_ne!(traces(&a).1, int(0));
    let b = sigma(1, &Bilinear::metric(4)).unwrap();
    assert_eq!(traces(&b), tau_oracle(&b));
}

#[test]
fn sigma_rejects_wrong_family() {
    assert!(matches!(sigma(1, &Bilinear::kaehler_form(4)), Err(KdecError::WrongParity(_))));
    assert!(matches!(sigma(3, &Bilinear::metric(4)), Err(KdecError::WrongParity(_))));
    assert!(sigma(5, &Bilinear::metric(4)).is_err());
}

#[test]
fn theta_of_zero_and_bad_input() {
    assert!(theta(&Bilinear::zeros(6)).unwrap().is_zero());
    // The metric carries trace, so it is outside the domain.
    assert!(theta(&Bilinear::metric(6)).is_err());
}

#[test]
fn split_ricci_recovers_the_trace_parts() {
    let m = 4;
    let a = sigma(1, &Bilinear::metric(m)).unwrap();
    let s = split_ricci(&a).unwrap();
    assert_eq!(s.parity, 1);
    assert!(s.remainder.is_zero());
    let real = s.parts.iter().find(|p| p.label == ComponentLabel::RealTrace).unwrap();
    assert_eq!(real.preimage, a);
    assert!(s.parts.iter().filter(|p| p.label != ComponentLabel::RealTrace).all(|p| p.preimage.is_zero()));

    let space = make_space(2).unwrap();
    let phi: Bilinear = basis_bilinear_family(&space, BilinearFamily::SymMinus).element(0).unwrap();
    let b = sigma(2, &phi).unwrap();
    let s = split_ricci(&b).unwrap();
    assert_eq!(s.parity, -1);
    assert!(s.remainder.is_zero());
    assert_eq!(split_ricci_as(&b, -1).unwrap(), s);
    assert!(split_ricci_as(&b, 1).is_err());
    assert_eq!(decompose(&b).unwrap().nonzero_labels(), vec![ComponentLabel::SymMinusViaRicci]);
}

#[test]
fn two_dimensional_minus_part_is_degenerate() {
    let space = make_space(1).unwrap();
    let phi: Bilinear = basis_bilinear_family(&space, BilinearFamily::SymMinus).element(0).unwrap();
    let b = sigma(2, &phi).unwrap();
    // The minus summand is trivial here, so only the zero tensor lives in it.
    assert!(b.is_zero());
    assert!(matches!(split_ricci_as(&b, -1), Err(KdecError::DegenerateDimension(2))));
    assert_eq!(split_ricci(&b).unwrap().parity, 1);
    assert!(matches!(decompose(&b), Err(KdecError::DimensionTooSmall { required: 4, actual: 2 })));
}

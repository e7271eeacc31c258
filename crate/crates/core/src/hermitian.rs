//! The ambient Hermitian vector space and the groups GL*_C and U*.
//!
//! Basis index `2p` is `e_{p+1}` and `2p + 1` is `f_{p+1}`; J sends
//! `e -> f` and `f -> -e`, and the metric is the identity.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{KdecError, Result};
use crate::linalg::Matrix;
use crate::rational::{int, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianSpace {
    n: usize,
    j: Matrix,
    metric: Matrix,
    omega: Matrix,
}

/// Builds the space of complex dimension `n`.
pub fn make_space(n: usize) -> Result<HermitianSpace> {
    HermitianSpace::new(n)
}

impl HermitianSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(KdecError::ZeroDimension);
        }
        let m = 2 * n;
        let mut j = Matrix::zeros(m, m);
        for p in 0..n {
            j[(2 * p + 1, 2 * p)] = Q::one();
            j[(2 * p, 2 * p + 1)] = -Q::one();
        }
        let metric = Matrix::identity(m);
        // Omega(x, y) = <x, Jy>, so its matrix is metric * J.
        let omega = metric.mul(&j);
        Ok(HermitianSpace { n, j, metric, omega })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        2 * self.n
    }

    pub fn j(&self) -> &Matrix {
        &self.j
    }

    pub fn metric(&self) -> &Matrix {
        &self.metric
    }

    pub fn omega(&self) -> &Matrix {
        &self.omega
    }

    /// Zero-based index of `e_p` (p is one-based).
    pub fn e(&self, p: usize) -> usize {
        assert!(p >= 1 && p <= self.n, "e_{p} outside complex dimension {}", self.n);
        2 * (p - 1)
    }

    /// Zero-based index of `f_p` (p is one-based).
    pub fn f(&self, p: usize) -> usize {
        assert!(p >= 1 && p <= self.n, "f_{p} outside complex dimension {}", self.n);
        2 * (p - 1) + 1
    }

    /// Human label such as `e1` or `f3` for a basis index.
    pub fn label(&self, i: usize) -> String {
        basis_label(i)
    }
}

pub fn basis_label(i: usize) -> String {
    format!("{}{}", if i % 2 == 0 { 'e' } else { 'f' }, i / 2 + 1)
}

/// `J e_i = sign * e_k`; returns `(k, sign)`.
#[inline]
pub fn jidx(i: usize) -> (usize, i32) {
    if i % 2 == 0 {
        (i + 1, 1)
    } else {
        (i - 1, -1)
    }
}

/// Commutation sign of a group element: `Xi J = chi J Xi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chi {
    Plus,
    Minus,
}

impl Chi {
    pub fn sign(self) -> i32 {
        match self {
            Chi::Plus => 1,
            Chi::Minus => -1,
        }
    }

    pub fn mul(self, other: Chi) -> Chi {
        if self == other { Chi::Plus } else { Chi::Minus }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    matrix: Matrix,
    inverse: Matrix,
    chi: Chi,
    unitary: bool,
}

/// Validates `matrix` as an element of GL*_C over `space`.
pub fn make_group_element(space: &HermitianSpace, matrix: Matrix) -> Result<GroupElement> {
    let m = space.m();
    if matrix.rows() != m || matrix.cols() != m {
        return Err(KdecError::BadMatrixShape { expected: m, rows: matrix.rows(), cols: matrix.cols() });
    }
    let inverse = matrix.inverse().ok_or(KdecError::NotInvertible)?;
    let xj = matrix.mul(space.j());
    let jx = space.j().mul(&matrix);
    let chi = if xj == jx {
        Chi::Plus
    } else if xj.add(&jx).is_zero() {
        Chi::Minus
    } else {
        return Err(KdecError::NotInGroup);
    };
    let unitary = matrix.transpose().mul(space.metric()).mul(&matrix) == *space.metric();
    Ok(GroupElement { matrix, inverse, chi, unitary })
}

impl GroupElement {
    pub fn identity(space: &HermitianSpace) -> Self {
        let id = Matrix::identity(space.m());
        GroupElement { matrix: id.clone(), inverse: id, chi: Chi::Plus, unitary: true }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn inverse_matrix(&self) -> &Matrix {
        &self.inverse
    }

    pub fn chi(&self) -> Chi {
        self.chi
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn m(&self) -> usize {
        self.matrix.rows()
    }

    /// Matrix product `self * other`; chi signs multiply.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            matrix: self.matrix.mul(&other.matrix),
            inverse: other.inverse.mul(&self.inverse),
            chi: self.chi.mul(other.chi),
            unitary: self.unitary && other.unitary,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            matrix: self.inverse.clone(),
            inverse: self.matrix.clone(),
            chi: self.chi,
            unitary: self.unitary,
        }
    }
}

/// The conjugation `e_i -> e_i`, `f_i -> -f_i`: unitary with chi = -1.
pub fn conjugation(space: &HermitianSpace) -> GroupElement {
    let m = space.m();
    let mat = Matrix::from_fn(m, m, |i, j| {
        if i != j {
            Q::zero()
        } else if i % 2 == 0 {
            Q::one()
        } else {
            -Q::one()
        }
    });
    GroupElement { matrix: mat.clone(), inverse: mat, chi: Chi::Minus, unitary: true }
}

/// Real form of the complex n x n matrix `a + i b`, in the e/f basis.
pub fn complex_block_matrix(n: usize, a: &[Vec<Q>], b: &[Vec<Q>]) -> Matrix {
    let mut out = Matrix::zeros(2 * n, 2 * n);
    for p in 0..n {
        for q in 0..n {
            out[(2 * p, 2 * q)] = a[p][q].clone();
            out[(2 * p + 1, 2 * q + 1)] = a[p][q].clone();
            out[(2 * p + 1, 2 * q)] = b[p][q].clone();
            out[(2 * p, 2 * q + 1)] = -b[p][q].clone();
        }
    }
    out
}

/// Cayley transform `(I - S)(I + S)^-1`; `None` if `I + S` is singular.
pub fn cayley(s: &Matrix) -> Option<Matrix> {
    let id = Matrix::identity(s.rows());
    let inv = id.add(s).inverse()?;
    Some(id.sub(s).mul(&inv))
}

fn small_entry(rng: &mut ChaCha8Rng) -> Q {
    // Mostly zero so that the Cayley denominators stay small.
    match rng.gen_range(0..6) {
        0 => int(1),
        1 => int(-1),
        2 => int(2),
        _ => Q::zero(),
    }
}

/// Random element of U* with chi = +1, deterministic in `seed`.
pub fn random_unitary_star(seed: u64, space: &HermitianSpace) -> GroupElement {
    random_unitary(seed, space, Chi::Plus)
}

/// Random element of U* with the requested chi sign.
///
/// The chi = +1 part is the Cayley transform of a skew-Hermitian matrix
/// written in real form; chi = -1 composes it with [`conjugation`].
pub fn random_unitary(seed: u64, space: &HermitianSpace, chi: Chi) -> GroupElement {
    let n = space.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut a = vec![vec![Q::zero(); n]; n];
        let mut b = vec![vec![Q::zero(); n]; n];
        for p in 0..n {
            b[p][p] = small_entry(&mut rng);
            for q in p + 1..n {
                let x = small_entry(&mut rng);
                a[q][p] = -x.clone();
                a[p][q] = x;
                let y = small_entry(&mut rng);
                b[q][p] = y.clone();
                b[p][q] = y;
            }
        }
        let s = complex_block_matrix(n, &a, &b);
        let Some(c) = cayley(&s) else { continue };
        let g = make_group_element(space, c).expect("Cayley transform lies in U*");
        return match chi {
            Chi::Plus => g,
            Chi::Minus => g.compose(&conjugation(space)),
        };
    }
}

/// Random non-unitary element of GL*_C with the requested chi sign.
pub fn random_gl_star(seed: u64, space: &HermitianSpace, chi: Chi) -> GroupElement {
    let n = space.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    loop {
        let mut a = vec![vec![Q::zero(); n]; n];
        let mut b = vec![vec![Q::zero(); n]; n];
        for p in 0..n {
            for q in 0..n {
                a[p][q] = int(rng.gen_range(-2..=2));
                b[p][q] = if rng.gen_bool(0.5) { int(rng.gen_range(-1..=1)) } else { Q::zero() };
            }
        }
        let mat = complex_block_matrix(n, &a, &b);
        match make_group_element(space, mat) {
            Ok(g) if !g.is_unitary() => {
                return match chi {
                    Chi::Plus => g,
                    Chi::Minus => g.compose(&conjugation(space)),
                };
            }
            _ => continue,
        }
    }
}

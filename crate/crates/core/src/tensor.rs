//! Dense exact bilinear forms and lowered 4-tensors.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{KdecError, Result};
use crate::hermitian::{basis_label, jidx, GroupElement};
use crate::linalg::Matrix;
use num_bigint::BigInt;

use crate::rational::{common_denominator, format_q, Q};

/// Lowered tensor `A_{ijkl} = <A(e_i, e_j) e_k, e_l>`, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Tensor4 {
    m: usize,
    data: Vec<Q>,
}

/// Bilinear form `phi_{ij} = phi(e_i, e_j)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Bilinear {
    m: usize,
    data: Vec<Q>,
}

#[inline]
pub fn idx4(m: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * m + j) * m + k) * m + l
}

#[inline]
pub fn unidx4(m: usize, mut t: usize) -> [usize; 4] {
    let l = t % m;
    t /= m;
    let k = t % m;
    t /= m;
    let j = t % m;
    [t / m, j, k, l]
}

fn label_tuple(ix: &[usize]) -> String {
    let parts: Vec<String> = ix.iter().map(|&i| basis_label(i)).collect();
    format!("({})", parts.join(","))
}

impl Tensor4 {
    pub fn zeros(m: usize) -> Self {
        Tensor4 { m, data: vec![Q::zero(); m * m * m * m] }
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize, usize, usize) -> Q) -> Self {
        let mut data = Vec::with_capacity(m * m * m * m);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        data.push(f(i, j, k, l));
                    }
                }
            }
        }
        Tensor4 { m, data }
    }

    /// Wraps a flat row-major vector of length `m^4`.
    pub fn from_vec(m: usize, data: Vec<Q>) -> Self {
        assert_eq!(data.len(), m * m * m * m, "flat tensor has the wrong length");
        Tensor4 { m, data }
    }

    /// Sets the listed components and their first-pair antisymmetric partners.
    pub fn from_antisymmetric_entries(m: usize, entries: &[([usize; 4], Q)]) -> Self {
        let mut t = Tensor4::zeros(m);
        for ([i, j, k, l], v) in entries {
            t.set(*i, *j, *k, *l, v.clone());
            t.set(*j, *i, *k, *l, -v.clone());
        }
        t
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn data(&self) -> &[Q] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Q> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &Q {
        &self.data[idx4(self.m, i, j, k, l)]
    }

    pub fn at(&self, ix: [usize; 4]) -> &Q {
        self.get(ix[0], ix[1], ix[2], ix[3])
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: Q) {
        let m = self.m;
        self.data[idx4(m, i, j, k, l)] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, k: usize, l: usize, v: &Q) {
        let m = self.m;
        self.data[idx4(m, i, j, k, l)] += v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &Q) -> Tensor4 {
        if s.is_zero() {
            return Tensor4::zeros(self.m);
        }
        Tensor4 {
            m: self.m,
            data: self.data.iter().map(|v| if v.is_zero() { Q::zero() } else { v * s }).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: &Q, other: &Tensor4) {
        assert_eq!(self.m, other.m);
        if s.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a += s * b;
            }
        }
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = ([usize; 4], &Q)> + '_ {
        let m = self.m;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(t, v)| (unidx4(m, t), v))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|v| !v.is_zero()).count()
    }

    /// Permutes slots: `out(x_0, x_1, x_2, x_3) = self(x_{p[0]}, x_{p[1]}, x_{p[2]}, x_{p[3]})`.
    pub fn permute(&self, p: [usize; 4]) -> Tensor4 {
        Tensor4::from_fn(self.m, |i, j, k, l| {
            let x = [i, j, k, l];
            self.get(x[p[0]], x[p[1]], x[p[2]], x[p[3]]).clone()
        })
    }

    /// Feeds J into the listed slots: e.g. `[2, 3]` gives `A(x, y, Jz, Jw)`.
    pub fn with_j(&self, slots: &[usize]) -> Tensor4 {
        let m = self.m;
        let mut out = Tensor4::zeros(m);
        for (t, v) in self.data.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            // out[.., a, ..] = s * self[.., b, ..] where J e_a = s e_b.
            let mut ix = unidx4(m, t);
            let mut sign = 1;
            for &s in slots {
                let (a, sg) = jinv(ix[s]);
                ix[s] = a;
                sign *= sg;
            }
            let val = if sign > 0 { v.clone() } else { -v.clone() };
            out.data[idx4(m, ix[0], ix[1], ix[2], ix[3])] = val;
        }
        out
    }

    /// Transforms one slot by a matrix: `out[.., i, ..] = sum_a mat[a][i] * self[.., a, ..]`.
    pub fn transform_slot(&self, slot: usize, mat: &Matrix) -> Tensor4 {
        let m = self.m;
        let cols: Vec<Vec<(usize, &Q)>> = (0..m)
            .map(|i| (0..m).filter(|&a| !mat[(a, i)].is_zero()).map(|a| (a, &mat[(a, i)])).collect())
            .collect();
        let stride = m.pow(3 - slot as u32);
        let mut out = Tensor4::zeros(m);
        for t in 0..self.data.len() {
            let cur = (t / stride) % m;
            if cur != 0 {
                continue;
            }
            // t is the base offset with this slot at 0.
            if (0..m).all(|a| self.data[t + a * stride].is_zero()) {
                continue;
            }
            for (i, col) in cols.iter().enumerate() {
                let mut acc = Q::zero();
                for &(a, c) in col {
                    let v = &self.data[t + a * stride];
                    if !v.is_zero() {
                        acc += c * v;
                    }
                }
                out.data[t + i * stride] = acc;
            }
        }
        out
    }
}

/// `J e_a = s e_b` for the returned `(a, s)` given `b`.
#[inline]
fn jinv(b: usize) -> (usize, i32) {
    if b % 2 == 0 {
        (b + 1, -1)
    } else {
        (b - 1, 1)
    }
}

impl Bilinear {
    pub fn zeros(m: usize) -> Self {
        Bilinear { m, data: vec![Q::zero(); m * m] }
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let mut data = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                data.push(f(i, j));
            }
        }
        Bilinear { m, data }
    }

    pub fn from_vec(m: usize, data: Vec<Q>) -> Self {
        assert_eq!(data.len(), m * m, "flat bilinear form has the wrong length");
        Bilinear { m, data }
    }

    pub fn from_matrix(mat: &Matrix) -> Self {
        assert!(mat.is_square());
        Bilinear { m: mat.rows(), data: mat.as_slice().to_vec() }
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.m, self.m, |i, j| self.get(i, j).clone())
    }

    pub fn metric(m: usize) -> Self {
        Bilinear::from_fn(m, |i, j| if i == j { Q::one() } else { Q::zero() })
    }

    /// Kähler form `Omega(x, y) = <x, Jy>`.
    pub fn kaehler_form(m: usize) -> Self {
        let mut out = Bilinear::zeros(m);
        for y in 0..m {
            let (x, s) = jidx(y);
            out.set(x, y, Q::from_integer(s.into()));
        }
        out
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn data(&self) -> &[Q] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Q> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.m + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.m + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &Q) -> Bilinear {
        Bilinear { m: self.m, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn transpose(&self) -> Bilinear {
        Bilinear::from_fn(self.m, |i, j| self.get(j, i).clone())
    }

    /// `phi(Jx, Jy)`.
    pub fn j_twisted(&self) -> Bilinear {
        Bilinear::from_fn(self.m, |x, y| {
            let (a, s) = jidx(x);
            let (b, t) = jidx(y);
            let v = self.get(a, b).clone();
            if s * t > 0 { v } else { -v }
        })
    }

    /// `phi(x, Jy)`; the conjugate operator on bilinear forms.
    pub fn conjugate(&self) -> Bilinear {
        Bilinear::from_fn(self.m, |x, y| {
            let (b, t) = jidx(y);
            let v = self.get(x, b).clone();
            if t > 0 { v } else { -v }
        })
    }

    pub fn trace(&self) -> Q {
        (0..self.m).fold(Q::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn is_antisymmetric(&self) -> bool {
        *self == -&self.transpose()
    }

    /// `phi(Jx, Jy) = sign * phi(x, y)`.
    pub fn has_j_parity(&self, sign: i32) -> bool {
        let tw = self.j_twisted();
        if sign > 0 { tw == *self } else { tw == -self }
    }
}

macro_rules! impl_linear_ops {
    ($t:ident) => {
        impl Add for &$t {
            type Output = $t;
            fn add(self, rhs: &$t) -> $t {
                assert_eq!(self.m, rhs.m, "adding elements of different spaces");
                $t { m: self.m, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
            }
        }
        impl Sub for &$t {
            type Output = $t;
            fn sub(self, rhs: &$t) -> $t {
                assert_eq!(self.m, rhs.m, "subtracting elements of different spaces");
                $t { m: self.m, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
            }
        }
        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                $t { m: self.m, data: self.data.iter().map(|a| -a).collect() }
            }
        }
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

impl_linear_ops!(Tensor4);
impl_linear_ops!(Bilinear);

impl fmt::Debug for Tensor4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tensor4(m={}) {{", self.m)?;
        for (ix, v) in self.nonzero_entries() {
            write!(f, " {}={}", label_tuple(&ix), format_q(v))?;
        }
        write!(f, " }}")
    }
}

impl fmt::Debug for Bilinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bilinear(m={}) {{", self.m)?;
        for i in 0..self.m {
            for j in 0..self.m {
                let v = self.get(i, j);
                if !v.is_zero() {
                    write!(f, " {}={}", label_tuple(&[i, j]), format_q(v))?;
                }
            }
        }
        write!(f, " }}")
    }
}

fn same_space(a: usize, b: usize) -> Result<()> {
    if a == b { Ok(()) } else { Err(KdecError::SpaceMismatch(a, b)) }
}

/// Component-sum inner product in the fixed orthonormal basis.
pub fn inner_product(a: &Tensor4, b: &Tensor4) -> Result<Q> {
    same_space(a.m, b.m)?;
    Ok(dot(&a.data, &b.data))
}

pub fn bilinear_inner_product(a: &Bilinear, b: &Bilinear) -> Result<Q> {
    same_space(a.m, b.m)?;
    Ok(dot(&a.data, &b.data))
}

pub(crate) fn dot(a: &[Q], b: &[Q]) -> Q {
    let mut acc = Q::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Right action on the operator form: `(Xi.A)(x, y)z = Xi^-1 A(Xi x, Xi y) Xi z`.
///
/// The first three lowered slots transform by `Xi`, the fourth by `Xi^-T`.
pub fn pullback_tensor(xi: &GroupElement, a: &Tensor4) -> Result<Tensor4> {
    same_space(xi.m(), a.m)?;
    let m = a.m;
    // Integer arithmetic throughout, one normalization per entry at the end.
    let den_a = common_denominator(a.data.iter());
    let mut data: Vec<BigInt> = a.data.iter().map(|v| v.numer() * (&den_a / v.denom())).collect();
    let (fwd, den_f) = integer_matrix(xi.matrix());
    let (inv, den_i) = integer_matrix(&xi.inverse_matrix().transpose());
    for slot in 0..3 {
        data = transform_slot_int(&data, m, slot, &fwd);
    }
    data = transform_slot_int(&data, m, 3, &inv);
    let den: BigInt = den_a * &den_f * &den_f * &den_f * den_i;
    let data = data.into_iter().map(|v| Q::new(v, den.clone())).collect();
    Ok(Tensor4 { m, data })
}

fn integer_matrix(mat: &Matrix) -> (Vec<Vec<BigInt>>, BigInt) {
    let den = common_denominator(mat.as_slice().iter());
    let rows = (0..mat.rows())
        .map(|r| (0..mat.cols()).map(|c| mat[(r, c)].numer() * (&den / mat[(r, c)].denom())).collect())
        .collect();
    (rows, den)
}

/// Integer version of [`Tensor4::transform_slot`].
fn transform_slot_int(data: &[BigInt], m: usize, slot: usize, mat: &[Vec<BigInt>]) -> Vec<BigInt> {
    let cols: Vec<Vec<(usize, &BigInt)>> = (0..m)
        .map(|i| (0..m).filter(|&a| !mat[a][i].is_zero()).map(|a| (a, &mat[a][i])).collect())
        .collect();
    let stride = m.pow(3 - slot as u32);
    let mut out = vec![BigInt::zero(); data.len()];
    for t in 0..data.len() {
        if (t / stride) % m != 0 || (0..m).all(|a| data[t + a * stride].is_zero()) {
            continue;
        }
        for (i, col) in cols.iter().enumerate() {
            let mut acc = BigInt::zero();
            for &(a, c) in col {
                let v = &data[t + a * stride];
                if !v.is_zero() {
                    acc += c * v;
                }
            }
            out[t + i * stride] = acc;
        }
    }
    out
}

/// `(Xi.phi)(x, y) = phi(Xi x, Xi y)`.
pub fn pullback_bilinear(xi: &GroupElement, phi: &Bilinear) -> Result<Bilinear> {
    same_space(xi.m(), phi.m)?;
    let x = xi.matrix();
    Ok(Bilinear::from_matrix(&x.transpose().mul(&phi.to_matrix()).mul(x)))
}

/// The four parity parts of a bilinear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearParts {
    pub sym_plus: Bilinear,
    pub sym_minus: Bilinear,
    pub alt_plus: Bilinear,
    pub alt_minus: Bilinear,
}

/// Splits `phi` into its components in S2+, S2-, L2+, L2-.
pub fn split_bilinear(phi: &Bilinear) -> BilinearParts {
    let half = Q::new(1.into(), 2.into());
    let t = phi.transpose();
    let sym = (phi + &t).scale(&half);
    let alt = (phi - &t).scale(&half);
    let j_part = |b: &Bilinear, sign: i32| {
        let tw = b.j_twisted();
        let s = if sign > 0 { b + &tw } else { b - &tw };
        s.scale(&half)
    };
    BilinearParts {
        sym_plus: j_part(&sym, 1),
        sym_minus: j_part(&sym, -1),
        alt_plus: j_part(&alt, 1),
        alt_minus: j_part(&alt, -1),
    }
}

/// Defining relations that a curvature tensor may violate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `A(x, y, z, w) = -A(y, x, z, w)`
    FirstPairAntisymmetry,
    /// `A(x, y, z, w) + A(y, z, x, w) + A(z, x, y, w) = 0`
    Bianchi,
    /// `A(x, y, z, w) = A(x, y, Jz, Jw)`
    Kaehler,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::FirstPairAntisymmetry => "A(x,y,z,w) = -A(y,x,z,w)",
            Relation::Bianchi => "A(x,y,z,w) + A(y,z,x,w) + A(z,x,y,w) = 0",
            Relation::Kaehler => "A(x,y,z,w) = A(x,y,Jz,Jw)",
        })
    }
}

/// A concrete failure of a [`Relation`] at one index tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub relation: Relation,
    pub indices: [usize; 4],
    pub defect: Q,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} fails at (x,y,z,w) = {} with defect {}",
            self.relation,
            label_tuple(&self.indices),
            format_q(&self.defect)
        )
    }
}

/// First index tuple (row-major order) at which `relation` fails.
pub fn find_violation(a: &Tensor4, relation: Relation) -> Option<Violation> {
    let m = a.m;
    let jj = matches!(relation, Relation::Kaehler).then(|| a.with_j(&[2, 3]));
    for t in 0..a.data.len() {
        let [i, j, k, l] = unidx4(m, t);
        let defect = match relation {
            Relation::FirstPairAntisymmetry => a.get(i, j, k, l) + a.get(j, i, k, l),
            Relation::Bianchi => a.get(i, j, k, l) + a.get(j, k, i, l) + a.get(k, i, j, l),
            Relation::Kaehler => a.get(i, j, k, l) - jj.as_ref().unwrap().get(i, j, k, l),
        };
        if !defect.is_zero() {
            return Some(Violation { relation, indices: [i, j, k, l], defect });
        }
    }
    None
}

pub fn is_affine_curvature(a: &Tensor4) -> bool {
    find_violation(a, Relation::FirstPairAntisymmetry).is_none() && find_violation(a, Relation::Bianchi).is_none()
}

pub fn is_kaehler_curvature(a: &Tensor4) -> bool {
    is_affine_curvature(a) && find_violation(a, Relation::Kaehler).is_none()
}

/// First relation violated by `a` among those defining the Kähler curvature tensors.
pub fn kaehler_violation(a: &Tensor4) -> Option<Violation> {
    [Relation::FirstPairAntisymmetry, Relation::Bianchi, Relation::Kaehler]
        .into_iter()
        .find_map(|r| find_violation(a, r))
}

/// `A(Jx, Jy, z, w) = sign * A(x, y, z, w)`.
pub fn has_first_pair_parity(a: &Tensor4, sign: i32) -> bool {
    let tw = a.with_j(&[0, 1]);
    if sign > 0 { tw == *a } else { tw == -a }
}

/// `A(x, y, z, w) = sign * A(x, y, w, z)`.
pub fn has_last_pair_symmetry(a: &Tensor4, sign: i32) -> bool {
    let sw = a.permute([0, 1, 3, 2]);
    if sign > 0 { sw == *a } else { sw == -a }
}

/// Splits a Kähler curvature tensor by the parity of its first pair.
pub fn parity_split_tensor(a: &Tensor4) -> Result<(Tensor4, Tensor4)> {
    if let Some(v) = kaehler_violation(a) {
        return Err(KdecError::NotKaehler(v.to_string()));
    }
    Ok(parity_parts(a))
}

pub(crate) fn parity_parts(a: &Tensor4) -> (Tensor4, Tensor4) {
    let half = Q::new(1.into(), 2.into());
    let tw = a.with_j(&[0, 1]);
    ((a + &tw).scale(&half), (a - &tw).scale(&half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{make_group_element, make_space, random_gl_star, random_unitary, Chi};
    use crate::rational::{frac, int};

    fn brute_with_j(a: &Tensor4, slots: &[usize], j: &Matrix) -> Tensor4 {
        let mut t = a.clone();
        for &s in slots {
            t = t.transform_slot(s, j);
        }
        t
    }

    fn sample(m: usize, seed: u64) -> Tensor4 {
        let mut x = seed;
        Tensor4::from_fn(m, |_, _, _, _| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            int(((x >> 33) % 7) as i64 - 3)
        })
    }

    #[test]
    fn j_insertion_matches_matrix_transform() {
        let s = make_space(2).unwrap();
        let a = sample(4, 3);
        for slots in [vec![0], vec![3], vec![2, 3], vec![0, 1]] {
            assert_eq!(a.with_j(&slots), brute_with_j(&a, &slots, s.j()));
        }
    }

    #[test]
    fn pullback_identity_and_composition() {
        let s = make_space(2).unwrap();
        let a = sample(4, 11);
        let id = GroupElement::identity(&s);
        assert_eq!(pullback_tensor(&id, &a).unwrap(), a);
        let g1 = random_gl_star(1, &s, Chi::Plus);
        let g2 = random_unitary(2, &s, Chi::Minus);
        let lhs = pullback_tensor(&g2, &pullback_tensor(&g1, &a).unwrap()).unwrap();
        let rhs = pullback_tensor(&g1.compose(&g2), &a).unwrap();
        assert_eq!(lhs, rhs);
        let phi = Bilinear::from_fn(4, |i, j| int((i * 3 + j) as i64 % 5));
        let lhs = pullback_bilinear(&g2, &pullback_bilinear(&g1, &phi).unwrap()).unwrap();
        assert_eq!(lhs, pullback_bilinear(&g1.compose(&g2), &phi).unwrap());
    }

    #[test]
    fn unitary_pullback_is_isometry() {
        let s = make_space(2).unwrap();
        let a = sample(4, 5);
        let b = sample(4, 6);
        let g = random_unitary(9, &s, Chi::Minus);
        let ga = pullback_tensor(&g, &a).unwrap();
        let gb = pullback_tensor(&g, &b).unwrap();
        assert_eq!(inner_product(&ga, &gb).unwrap(), inner_product(&a, &b).unwrap());
    }

    #[test]
    fn scaling_weight() {
        // diag(eps, eps, 1, 1): weight = (# of first three slots in pair 1) - (# of fourth)
        let s = make_space(2).unwrap();
        let eps = frac(1, 2);
        let mut mat = Matrix::identity(4);
        mat[(0, 0)] = eps.clone();
        mat[(1, 1)] = eps.clone();
        let g = make_group_element(&s, mat).unwrap();
        let a = sample(4, 7);
        let ga = pullback_tensor(&g, &a).unwrap();
        for t in 0..256 {
            let ix = unidx4(4, t);
            let w = ix[..3].iter().filter(|&&i| i < 2).count() as i32 - i32::from(ix[3] < 2);
            let factor = if w >= 0 {
                eps.pow(w)
            } else {
                Q::one() / eps.pow(-w)
            };
            assert_eq!(*ga.at(ix), a.at(ix) * factor);
        }
    }

    #[test]
    fn split_bilinear_examples() {
        let m = 4;
        let g = Bilinear::metric(m);
        let parts = split_bilinear(&g);
        assert_eq!(parts.sym_plus, g);
        let om = Bilinear::kaehler_form(m);
        assert_eq!(split_bilinear(&om).alt_plus, om);
        let mut phi = Bilinear::zeros(m);
        phi.set(0, 0, int(1));
        phi.set(1, 1, int(-1));
        assert_eq!(split_bilinear(&phi).sym_minus, phi);
        let x = Bilinear::from_fn(m, |i, j| int((i * 7 + j * 3) as i64 % 5 - 2));
        let p = split_bilinear(&x);
        let sum = &(&p.sym_plus + &p.sym_minus) + &(&p.alt_plus + &p.alt_minus);
        assert_eq!(sum, x);
        assert!(p.sym_plus.is_symmetric() && p.sym_plus.has_j_parity(1));
        assert!(p.sym_minus.is_symmetric() && p.sym_minus.has_j_parity(-1));
        assert!(p.alt_plus.is_antisymmetric() && p.alt_plus.has_j_parity(1));
        assert!(p.alt_minus.is_antisymmetric() && p.alt_minus.has_j_parity(-1));
        let all = [&p.sym_plus, &p.sym_minus, &p.alt_plus, &p.alt_minus];
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(bilinear_inner_product(all[i], all[j]).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn mismatched_spaces() {
        let a = Tensor4::zeros(2);
        let b = Tensor4::zeros(4);
        assert_eq!(inner_product(&a, &b), Err(KdecError::SpaceMismatch(2, 4)));
        assert!(inner_product(&a, &Tensor4::zeros(2)).unwrap().is_zero());
    }

    #[test]
    fn violations_are_located() {
        let mut a = Tensor4::zeros(4);
        a.set(0, 1, 2, 3, int(1));
        let v = kaehler_violation(&a).unwrap();
        assert_eq!(v.relation, Relation::FirstPairAntisymmetry);
        assert!(parity_split_tensor(&a).is_err());
        assert!(parity_split_tensor(&Tensor4::zeros(4)).is_ok());
    }
}

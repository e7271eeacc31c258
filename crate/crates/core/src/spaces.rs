//! Constrained tensor spaces as exact subspaces, and subspace arithmetic.
//!
//! Every basis is built in two stages. Relations of the form
//! `A[t] = ±A[t']` (first-pair antisymmetry, the Kähler identity, parity)
//! glue index tuples into signed orbits; the remaining sparse linear rows
//! (Bianchi) are then eliminated block by block in orbit variables. Global
//! functionals such as the Ricci contractions are imposed afterwards on the
//! coordinates of the stage-one basis.
//!
//! A basis always satisfies `basis[i][pivots[j]] = δ_ij`, so the coordinates
//! of a member are read off at the pivots.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{KdecError, Result};
use crate::hermitian::{jidx, HermitianSpace};
use crate::linalg::{nullspace, rref, sparse_nullspace, Matrix, SparseRow};
use crate::maps;
use crate::rational::{make_primitive, Q};
use crate::tensor::{idx4, unidx4, Bilinear, Tensor4};

pub type SparseVec = Vec<(usize, Q)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Bilinear,
    Tensor4,
}

impl ElementKind {
    pub fn len(self, m: usize) -> usize {
        match self {
            ElementKind::Bilinear => m * m,
            ElementKind::Tensor4 => m * m * m * m,
        }
    }
}

/// Bilinear forms and 4-tensors seen as flat coordinate vectors.
pub trait Element: Sized {
    const KIND: ElementKind;
    fn m(&self) -> usize;
    fn coords(&self) -> &[Q];
    fn from_coords(m: usize, v: Vec<Q>) -> Self;
}

impl Element for Tensor4 {
    const KIND: ElementKind = ElementKind::Tensor4;
    fn m(&self) -> usize {
        Tensor4::m(self)
    }
    fn coords(&self) -> &[Q] {
        self.data()
    }
    fn from_coords(m: usize, v: Vec<Q>) -> Self {
        Tensor4::from_vec(m, v)
    }
}

impl Element for Bilinear {
    const KIND: ElementKind = ElementKind::Bilinear;
    fn m(&self) -> usize {
        Bilinear::m(self)
    }
    fn coords(&self) -> &[Q] {
        self.data()
    }
    fn from_coords(m: usize, v: Vec<Q>) -> Self {
        Bilinear::from_vec(m, v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    m: usize,
    kind: ElementKind,
    basis: Vec<SparseVec>,
    pivots: Vec<usize>,
    gram: Matrix,
}

fn sparse_dot(a: &SparseVec, b: &SparseVec) -> Q {
    let (mut i, mut j) = (0, 0);
    let mut acc = Q::zero();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += &a[i].1 * &b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

fn sparse_dense_dot(a: &SparseVec, v: &[Q]) -> Q {
    let mut acc = Q::zero();
    for (i, x) in a {
        let y = &v[*i];
        if !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

fn sparsify(v: Vec<Q>) -> SparseVec {
    v.into_iter().enumerate().filter(|(_, q)| !q.is_zero()).collect()
}

impl Subspace {
    /// Wraps a basis that already satisfies the pivot property.
    fn from_parts(m: usize, kind: ElementKind, basis: Vec<SparseVec>, pivots: Vec<usize>) -> Self {
        debug_assert_eq!(basis.len(), pivots.len());
        let d = basis.len();
        let mut gram = Matrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let v = sparse_dot(&basis[i], &basis[j]);
                gram[(j, i)] = v.clone();
                gram[(i, j)] = v;
            }
        }
        Subspace { m, kind, basis, pivots, gram }
    }

    pub fn zero(m: usize, kind: ElementKind) -> Self {
        Subspace::from_parts(m, kind, Vec::new(), Vec::new())
    }

    /// Exact span of arbitrary coordinate vectors, in reduced echelon form.
    pub fn span(m: usize, kind: ElementKind, vectors: &[Vec<Q>]) -> Self {
        let len = kind.len(m);
        let (rows, pivots) = rref(vectors, len);
        Subspace::from_parts(m, kind, rows.into_iter().map(sparsify).collect(), pivots)
    }

    pub fn span_of<E: Element>(m: usize, elements: &[E]) -> Self {
        let vecs: Vec<Vec<Q>> = elements.iter().map(|e| e.coords().to_vec()).collect();
        Subspace::span(m, E::KIND, &vecs)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn sparse_basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn dense(&self, i: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.kind.len(self.m)];
        for (k, x) in &self.basis[i] {
            v[*k] = x.clone();
        }
        v
    }

    pub fn element<E: Element>(&self, i: usize) -> Result<E> {
        self.check_kind(E::KIND)?;
        Ok(E::from_coords(self.m, self.dense(i)))
    }

    pub fn elements<E: Element>(&self) -> Result<Vec<E>> {
        (0..self.dim()).map(|i| self.element(i)).collect()
    }

    /// Dense `sum_i coeffs[i] * basis[i]`.
    pub fn combine(&self, coeffs: &[Q]) -> Vec<Q> {
        assert_eq!(coeffs.len(), self.dim());
        let mut v = vec![Q::zero(); self.kind.len(self.m)];
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (k, x) in b {
                v[*k] += c * x;
            }
        }
        v
    }

    pub fn combine_element<E: Element>(&self, coeffs: &[Q]) -> Result<E> {
        self.check_kind(E::KIND)?;
        Ok(E::from_coords(self.m, self.combine(coeffs)))
    }

    fn check_kind(&self, kind: ElementKind) -> Result<()> {
        if self.kind == kind { Ok(()) } else { Err(KdecError::KindMismatch) }
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.m != other.m {
            return Err(KdecError::SpaceMismatch(self.m, other.m));
        }
        self.check_kind(other.kind)
    }

    fn check_element<E: Element>(&self, e: &E) -> Result<()> {
        if self.m != e.m() {
            return Err(KdecError::SpaceMismatch(self.m, e.m()));
        }
        self.check_kind(E::KIND)
    }

    /// Coordinates of `v` if it is a member, `None` otherwise.
    pub fn coordinates_of(&self, v: &[Q]) -> Option<Vec<Q>> {
        let coeffs: Vec<Q> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let back = self.combine(&coeffs);
        (back == v).then_some(coeffs)
    }

    pub fn coordinates<E: Element>(&self, e: &E) -> Result<Option<Vec<Q>>> {
        self.check_element(e)?;
        Ok(self.coordinates_of(e.coords()))
    }

    pub fn contains_vec(&self, v: &[Q]) -> bool {
        self.coordinates_of(v).is_some()
    }

    pub fn contains<E: Element>(&self, e: &E) -> Result<bool> {
        Ok(self.coordinates(e)?.is_some())
    }

    pub fn projector(&self) -> Projector<'_> {
        let gram_inv = self.gram.inverse().expect("basis vectors are linearly independent");
        Projector { space: self, gram_inv }
    }

    /// Orthogonal projection of `e` onto this subspace (Gram solve).
    pub fn project<E: Element>(&self, e: &E) -> Result<E> {
        self.check_element(e)?;
        Ok(E::from_coords(self.m, self.projector().project_vec(e.coords())))
    }

    /// Subspace of members whose images under `f` vanish.
    pub fn restrict(&self, f: impl Fn(&[Q]) -> Vec<Q>) -> Subspace {
        let d = self.dim();
        let images: Vec<Vec<Q>> = (0..d).map(|i| f(&self.dense(i))).collect();
        let r = images.first().map_or(0, Vec::len);
        let rows: Vec<Vec<Q>> = (0..r).map(|k| images.iter().map(|im| im[k].clone()).collect()).collect();
        self.restrict_by_rows(&rows)
    }

    /// Keeps the combinations `sum_i c_i basis_i` with `rows * c = 0`.
    fn restrict_by_rows(&self, rows: &[Vec<Q>]) -> Subspace {
        let d = self.dim();
        let nonzero: Vec<Vec<Q>> = rows.iter().filter(|r| r.iter().any(|v| !v.is_zero())).cloned().collect();
        let (coeffs, free) = nullspace(&nonzero, d);
        let basis = coeffs.iter().map(|c| sparsify(self.combine(c))).collect();
        let pivots = free.iter().map(|&f| self.pivots[f]).collect();
        Subspace::from_parts(self.m, self.kind, basis, pivots)
    }

    /// Span of `vectors`, all of which must be members of `self`.
    pub fn span_within(&self, vectors: &[Vec<Q>]) -> Result<Subspace> {
        let mut coords = Vec::with_capacity(vectors.len());
        for v in vectors {
            let c = self
                .coordinates_of(v)
                .ok_or_else(|| KdecError::DomainViolation("spanning vector outside the ambient subspace".into()))?;
            coords.push(c);
        }
        let (rows, piv) = rref(&coords, self.dim());
        let basis = rows.iter().map(|c| sparsify(self.combine(c))).collect();
        let pivots = piv.iter().map(|&p| self.pivots[p]).collect();
        Ok(Subspace::from_parts(self.m, self.kind, basis, pivots))
    }

    /// `{t in target : t ⊥ self}`.
    pub fn complement_within(&self, target: &Subspace) -> Result<Subspace> {
        self.check_compatible(target)?;
        let rows: Vec<Vec<Q>> = self
            .basis
            .iter()
            .map(|s| target.basis.iter().map(|t| sparse_dot(s, t)).collect())
            .collect();
        Ok(target.restrict_by_rows(&rows))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        // t lies in self iff its residual against self's pivots vanishes.
        let residuals: Vec<Vec<Q>> = (0..other.dim())
            .map(|j| {
                let v = other.dense(j);
                let c: Vec<Q> = self.pivots.iter().map(|&p| v[p].clone()).collect();
                let back = self.combine(&c);
                v.iter().zip(&back).map(|(a, b)| a - b).collect()
            })
            .collect();
        let len = self.kind.len(self.m);
        let rows: Vec<Vec<Q>> = (0..len)
            .filter(|&k| residuals.iter().any(|r| !r[k].is_zero()))
            .map(|k| residuals.iter().map(|r| r[k].clone()).collect())
            .collect();
        Ok(other.restrict_by_rows(&rows))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let vecs: Vec<Vec<Q>> = (0..self.dim()).map(|i| self.dense(i)).chain((0..other.dim()).map(|j| other.dense(j))).collect();
        Ok(Subspace::span(self.m, self.kind, &vecs))
    }

    pub fn is_orthogonal_to(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|a| other.basis.iter().all(|b| sparse_dot(a, b).is_zero()))
    }

    /// Same underlying subspace (order and normalization of bases may differ).
    pub fn same_as(&self, other: &Subspace) -> bool {
        self.m == other.m
            && self.kind == other.kind
            && self.dim() == other.dim()
            && (0..other.dim()).all(|j| self.contains_vec(&other.dense(j)))
    }
}

pub fn dim(s: &Subspace) -> usize {
    s.dim()
}

pub fn contains<E: Element>(s: &Subspace, e: &E) -> Result<bool> {
    s.contains(e)
}

pub fn project<E: Element>(s: &Subspace, e: &E) -> Result<E> {
    s.project(e)
}

pub fn complement_within(s: &Subspace, t: &Subspace) -> Result<Subspace> {
    s.complement_within(t)
}

pub fn intersect(s: &Subspace, t: &Subspace) -> Result<Subspace> {
    s.intersect(t)
}

pub fn sum(s: &Subspace, t: &Subspace) -> Result<Subspace> {
    s.sum(t)
}

/// Orthogonal projection with the inverse Gram matrix precomputed.
pub struct Projector<'a> {
    space: &'a Subspace,
    gram_inv: Matrix,
}

impl Projector<'_> {
    pub fn coefficients(&self, v: &[Q]) -> Vec<Q> {
        let rhs: Vec<Q> = self.space.basis.iter().map(|b| sparse_dense_dot(b, v)).collect();
        self.gram_inv.mul_vec(&rhs)
    }

    pub fn project_vec(&self, v: &[Q]) -> Vec<Q> {
        self.space.combine(&self.coefficients(v))
    }

    pub fn project<E: Element>(&self, e: &E) -> E {
        E::from_coords(e.m(), self.project_vec(e.coords()))
    }
}

/// A relation `x[t] = sign * x[t']` between coordinates.
type SignedMap<'a> = &'a dyn Fn(usize) -> (usize, i32);

/// Null space of signed identifications plus sparse integer rows.
fn solve_symmetric(
    m: usize,
    kind: ElementKind,
    generators: &[SignedMap<'_>],
    rows: &[Vec<(usize, i64)>],
) -> Subspace {
    let len = kind.len(m);
    const UNSEEN: usize = usize::MAX;
    let mut orbit = vec![UNSEEN; len];
    let mut sign = vec![0i32; len];
    let mut orbit_dead: Vec<bool> = Vec::new();
    let mut orbit_members: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..len {
        if orbit[start] != UNSEEN {
            continue;
        }
        let id = orbit_members.len();
        let mut members = vec![start];
        let mut dead = false;
        orbit[start] = id;
        sign[start] = 1;
        queue.push_back(start);
        while let Some(t) = queue.pop_front() {
            for g in generators {
                let (u, s) = g(t);
                let want = s * sign[t];
                if orbit[u] == UNSEEN {
                    orbit[u] = id;
                    sign[u] = want;
                    members.push(u);
                    queue.push_back(u);
                } else if sign[u] != want {
                    dead = true;
                }
            }
        }
        orbit_dead.push(dead);
        orbit_members.push(members);
    }
    // Live orbits become variables, numbered by their smallest member.
    let mut var_of_orbit = vec![usize::MAX; orbit_members.len()];
    let mut reps = Vec::new();
    for (id, dead) in orbit_dead.iter().enumerate() {
        if !dead {
            var_of_orbit[id] = reps.len();
            reps.push(id);
        }
    }
    let mut seen_rows: HashSet<Vec<(usize, BigInt)>> = HashSet::new();
    let mut sparse_rows: Vec<SparseRow> = Vec::new();
    for row in rows {
        let mut acc: Vec<(usize, BigInt)> = Vec::new();
        for &(t, c) in row {
            let var = var_of_orbit[orbit[t]];
            if var == usize::MAX {
                continue;
            }
            let c = BigInt::from(c * i64::from(sign[t]));
            match acc.iter_mut().find(|(v, _)| *v == var) {
                Some(entry) => entry.1 += c,
                None => acc.push((var, c)),
            }
        }
        acc.retain(|(_, c)| !c.is_zero());
        if acc.is_empty() {
            continue;
        }
        acc.sort_by_key(|(v, _)| *v);
        let mut coeffs: Vec<BigInt> = acc.iter().map(|(_, c)| c.clone()).collect();
        make_primitive(&mut coeffs);
        if coeffs[0].is_negative() {
            coeffs.iter_mut().for_each(|c| *c = -&*c);
        }
        let normalized: Vec<(usize, BigInt)> = acc.iter().map(|(v, _)| *v).zip(coeffs).collect();
        if seen_rows.insert(normalized.clone()) {
            sparse_rows.push(normalized);
        }
    }
    let null = sparse_nullspace(reps.len(), &sparse_rows);
    let mut basis = Vec::with_capacity(null.len());
    let mut pivots = Vec::with_capacity(null.len());
    for (free, vec) in null {
        let mut dense: Vec<(usize, Q)> = Vec::new();
        for (var, val) in vec {
            for &t in &orbit_members[reps[var]] {
                let v = if sign[t] > 0 { val.clone() } else { -val.clone() };
                dense.push((t, v));
            }
        }
        dense.sort_by_key(|(t, _)| *t);
        basis.push(dense);
        pivots.push(orbit_members[reps[free]][0]);
    }
    Subspace::from_parts(m, kind, basis, pivots)
}

fn first_pair_antisymmetry(m: usize) -> impl Fn(usize) -> (usize, i32) {
    move |t| {
        let [i, j, k, l] = unidx4(m, t);
        (idx4(m, j, i, k, l), -1)
    }
}

fn kaehler_identity(m: usize) -> impl Fn(usize) -> (usize, i32) {
    move |t| {
        let [i, j, k, l] = unidx4(m, t);
        let (k2, sk) = jidx(k);
        let (l2, sl) = jidx(l);
        (idx4(m, i, j, k2, l2), sk * sl)
    }
}

fn first_pair_parity(m: usize, parity: i32) -> impl Fn(usize) -> (usize, i32) {
    move |t| {
        let [i, j, k, l] = unidx4(m, t);
        let (i2, si) = jidx(i);
        let (j2, sj) = jidx(j);
        (idx4(m, i2, j2, k, l), parity * si * sj)
    }
}

fn last_pair_swap(m: usize, parity: i32) -> impl Fn(usize) -> (usize, i32) {
    move |t| {
        let [i, j, k, l] = unidx4(m, t);
        (idx4(m, i, j, l, k), parity)
    }
}

fn bianchi_rows(m: usize) -> Vec<Vec<(usize, i64)>> {
    // With first-pair antisymmetry imposed, strictly increasing i < j < k suffice.
    let mut rows = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                for l in 0..m {
                    rows.push(vec![(idx4(m, i, j, k, l), 1), (idx4(m, j, k, i, l), 1), (idx4(m, k, i, j, l), 1)]);
                }
            }
        }
    }
    rows
}

/// Extra signed relations on top of the Kähler ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct KaehlerOptions {
    parity: Option<i32>,
    last_pair: Option<i32>,
}

fn kaehler_family(m: usize, opts: KaehlerOptions) -> Subspace {
    let anti = first_pair_antisymmetry(m);
    let kah = kaehler_identity(m);
    let par = first_pair_parity(m, opts.parity.unwrap_or(1));
    let swap = last_pair_swap(m, opts.last_pair.unwrap_or(1));
    let mut gens: Vec<SignedMap<'_>> = vec![&anti, &kah];
    if opts.parity.is_some() {
        gens.push(&par);
    }
    if opts.last_pair.is_some() {
        gens.push(&swap);
    }
    solve_symmetric(m, ElementKind::Tensor4, &gens, &bianchi_rows(m))
}

/// Affine curvature tensors: first-pair antisymmetric with the Bianchi identity.
pub fn basis_affine(space: &HermitianSpace) -> Subspace {
    let m = space.m();
    let anti = first_pair_antisymmetry(m);
    solve_symmetric(m, ElementKind::Tensor4, &[&anti], &bianchi_rows(m))
}

/// Affine Kähler curvature tensors.
pub fn basis_kahler(space: &HermitianSpace) -> Subspace {
    kaehler_family(space.m(), KaehlerOptions { parity: None, last_pair: None })
}

/// The parity summand with `A(Jx, Jy, z, w) = sign * A(x, y, z, w)`.
pub fn basis_kahler_pm(space: &HermitianSpace, sign: i32) -> Subspace {
    kaehler_family(space.m(), KaehlerOptions { parity: Some(sign.signum()), last_pair: None })
}

fn ricci_rows(v: &[Q], m: usize) -> Vec<Q> {
    maps::ricci(&Tensor4::from_vec(m, v.to_vec())).into_vec()
}

fn ricci13_rows(v: &[Q], m: usize) -> Vec<Q> {
    maps::ricci13(&Tensor4::from_vec(m, v.to_vec())).into_vec()
}

/// `K_sign ∩ ker ρ`.
pub fn kahler_ricci_flat(space: &HermitianSpace, sign: i32) -> Subspace {
    let m = space.m();
    basis_kahler_pm(space, sign).restrict(|v| ricci_rows(v, m))
}

/// `K_+ ∩ ker ρ ∩ ker ρ13`.
pub fn kahler_doubly_ricci_flat(space: &HermitianSpace) -> Subspace {
    let m = space.m();
    kahler_ricci_flat(space, 1).restrict(|v| ricci13_rows(v, m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BilinearFamily {
    SymPlus,
    SymMinus,
    AltPlus,
    AltMinus,
    SymPlusTraceFree,
    AltPlusTraceFree,
}

impl BilinearFamily {
    pub const ALL: [BilinearFamily; 6] = [
        BilinearFamily::SymPlus,
        BilinearFamily::SymMinus,
        BilinearFamily::AltPlus,
        BilinearFamily::AltMinus,
        BilinearFamily::SymPlusTraceFree,
        BilinearFamily::AltPlusTraceFree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BilinearFamily::SymPlus => "S2+",
            BilinearFamily::SymMinus => "S2-",
            BilinearFamily::AltPlus => "L2+",
            BilinearFamily::AltMinus => "L2-",
            BilinearFamily::SymPlusTraceFree => "S2_0+",
            BilinearFamily::AltPlusTraceFree => "L2_0+",
        }
    }

    /// Whether `phi` lies in this family.
    pub fn contains(self, phi: &Bilinear) -> bool {
        let m = phi.m();
        match self {
            BilinearFamily::SymPlus => phi.is_symmetric() && phi.has_j_parity(1),
            BilinearFamily::SymMinus => phi.is_symmetric() && phi.has_j_parity(-1),
            BilinearFamily::AltPlus => phi.is_antisymmetric() && phi.has_j_parity(1),
            BilinearFamily::AltMinus => phi.is_antisymmetric() && phi.has_j_parity(-1),
            BilinearFamily::SymPlusTraceFree => BilinearFamily::SymPlus.contains(phi) && phi.trace().is_zero(),
            BilinearFamily::AltPlusTraceFree => {
                BilinearFamily::AltPlus.contains(phi)
                    && crate::tensor::bilinear_inner_product(phi, &Bilinear::kaehler_form(m)).unwrap().is_zero()
            }
        }
    }
}

impl fmt::Display for BilinearFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BilinearFamily {
    type Err = KdecError;
    fn from_str(s: &str) -> Result<Self> {
        BilinearFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| KdecError::UnknownFamily(s.to_string()))
    }
}

pub fn basis_bilinear_family(space: &HermitianSpace, which: BilinearFamily) -> Subspace {
    let m = space.m();
    let (sym, par) = match which {
        BilinearFamily::SymPlus | BilinearFamily::SymPlusTraceFree => (1, 1),
        BilinearFamily::SymMinus => (1, -1),
        BilinearFamily::AltPlus | BilinearFamily::AltPlusTraceFree => (-1, 1),
        BilinearFamily::AltMinus => (-1, -1),
    };
    let swap = move |t: usize| (t % m * m + t / m, sym);
    let jpar = move |t: usize| {
        let (a, sa) = jidx(t / m);
        let (b, sb) = jidx(t % m);
        (a * m + b, par * sa * sb)
    };
    let base = solve_symmetric(m, ElementKind::Bilinear, &[&swap, &jpar], &[]);
    match which {
        BilinearFamily::SymPlusTraceFree => base.restrict(|v| vec![(0..m).fold(Q::zero(), |acc, i| acc + &v[i * m + i])]),
        BilinearFamily::AltPlusTraceFree => {
            let omega = Bilinear::kaehler_form(m);
            base.restrict(|v| vec![crate::tensor::dot(v, omega.data())])
        }
        _ => base,
    }
}

/// Looks up a family by name (`S2+`, `S2-`, `L2+`, `L2-`, `S2_0+`, `L2_0+`).
pub fn basis_bilinear_family_named(space: &HermitianSpace, name: &str) -> Result<Subspace> {
    Ok(basis_bilinear_family(space, name.parse()?))
}

/// Every space the decomposition refers to, built once for one `m`.
#[derive(Clone, Debug)]
pub struct SpaceCatalog {
    pub space: HermitianSpace,
    pub kahler_plus: Subspace,
    pub kahler_minus: Subspace,
    /// `K_+ ∩ ker ρ`
    pub kplus_flat: Subspace,
    /// `K_+ ∩ ker ρ ∩ ker ρ13`
    pub kplus_doubly_flat: Subspace,
    pub w7: Subspace,
    pub w8: Subspace,
    pub w9: Subspace,
    pub w10: Subspace,
    pub w11: Subspace,
    pub w12: Subspace,
}

impl SpaceCatalog {
    pub fn new(space: &HermitianSpace) -> Result<Self> {
        let m = space.m();
        if m < 4 {
            return Err(KdecError::DimensionTooSmall { required: 4, actual: m });
        }
        let kahler_plus = basis_kahler_pm(space, 1);
        let kahler_minus = basis_kahler_pm(space, -1);
        let kplus_flat = kahler_plus.restrict(|v| ricci_rows(v, m));
        let kplus_doubly_flat = kplus_flat.restrict(|v| ricci13_rows(v, m));
        let w9 = w9_or_w10(space, -1);
        let w10 = w9_or_w10(space, 1);
        let w11 = w9.sum(&w10)?.complement_within(&kplus_doubly_flat)?;
        let w7 = pi_image(&kplus_flat, maps::pi7)?;
        let w8 = pi_image(&kplus_flat, maps::pi8)?;
        let w12 = kahler_minus.restrict(|v| ricci_rows(v, m));
        Ok(SpaceCatalog {
            space: space.clone(),
            kahler_plus,
            kahler_minus,
            kplus_flat,
            kplus_doubly_flat,
            w7,
            w8,
            w9,
            w10,
            w11,
            w12,
        })
    }

    pub fn m(&self) -> usize {
        self.space.m()
    }

    pub fn w(&self, index: u8) -> Result<&Subspace> {
        Ok(match index {
            7 => &self.w7,
            8 => &self.w8,
            9 => &self.w9,
            10 => &self.w10,
            11 => &self.w11,
            12 => &self.w12,
            _ => return Err(KdecError::UnknownWSpace(index)),
        })
    }
}

fn w9_or_w10(space: &HermitianSpace, last_pair: i32) -> Subspace {
    let m = space.m();
    kaehler_family(m, KaehlerOptions { parity: Some(1), last_pair: Some(last_pair) }).restrict(|v| ricci_rows(v, m))
}

fn pi_image(domain: &Subspace, pi: fn(&Tensor4) -> Result<Tensor4>) -> Result<Subspace> {
    let images: Vec<Vec<Q>> = domain
        .elements::<Tensor4>()?
        .iter()
        .map(|a| pi(a).map(Tensor4::into_vec))
        .collect::<Result<_>>()?;
    domain.span_within(&images)
}

/// One of the irreducible summands `W_7, ..., W_12`.
pub fn w_space(space: &HermitianSpace, index: u8) -> Result<Subspace> {
    let m = space.m();
    if m < 4 {
        return Err(KdecError::DimensionTooSmall { required: 4, actual: m });
    }
    match index {
        9 => Ok(w9_or_w10(space, -1)),
        10 => Ok(w9_or_w10(space, 1)),
        12 => Ok(kahler_ricci_flat(space, -1)),
        11 => {
            let w9 = w9_or_w10(space, -1);
            let w10 = w9_or_w10(space, 1);
            w9.sum(&w10)?.complement_within(&kahler_doubly_ricci_flat(space))
        }
        7 => pi_image(&kahler_ricci_flat(space, 1), maps::pi7),
        8 => pi_image(&kahler_ricci_flat(space, 1), maps::pi8),
        _ => Err(KdecError::UnknownWSpace(index)),
    }
}

/// `W_7` (sign +1) or `W_8` (sign -1) by its second description: members of
/// `K_+ ∩ ker ρ` orthogonal to `W_9 ⊕ W_10 ⊕ W_11` whose ρ13 lies in the
/// symmetric (resp. antisymmetric) trace-free family.
pub fn w7_w8_by_ricci13(catalog: &SpaceCatalog, sign: i32) -> Result<Subspace> {
    let m = catalog.m();
    let rest = catalog.w9.sum(&catalog.w10)?.sum(&catalog.w11)?;
    let perp = rest.complement_within(&catalog.kplus_flat)?;
    Ok(perp.restrict(|v| {
        let r = maps::ricci13(&Tensor4::from_vec(m, v.to_vec()));
        let other = if sign > 0 { &r - &r.transpose() } else { &r + &r.transpose() };
        other.into_vec()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::make_space;
    use crate::rational::int;

    #[test]
    fn affine_dimensions() {
        for n in 1..=2 {
            let s = make_space(n).unwrap();
            let m = s.m();
            assert_eq!(basis_affine(&s).dim(), m * m * (m * m - 1) / 3);
        }
    }

    #[test]
    fn pivot_property() {
        let s = make_space(2).unwrap();
        let k = basis_kahler(&s);
        for (i, b) in (0..k.dim()).map(|i| (i, k.dense(i))) {
            for (j, &p) in k.pivots().iter().enumerate() {
                assert_eq!(b[p], if i == j { int(1) } else { int(0) });
            }
        }
    }

    #[test]
    fn bilinear_family_dims_m4() {
        let s = make_space(2).unwrap();
        let dims: Vec<usize> = BilinearFamily::ALL.iter().map(|&f| basis_bilinear_family(&s, f).dim()).collect();
        assert_eq!(dims, vec![4, 6, 4, 2, 3, 3]);
        assert!(matches!("S3".parse::<BilinearFamily>(), Err(KdecError::UnknownFamily(_))));
        let om = Bilinear::kaehler_form(4);
        assert!(basis_bilinear_family(&s, BilinearFamily::AltPlus).contains(&om).unwrap());
        assert!(!basis_bilinear_family(&s, BilinearFamily::AltPlusTraceFree).contains(&om).unwrap());
    }

    #[test]
    fn kaehler_dims_m4() {
        let s = make_space(2).unwrap();
        let k = basis_kahler(&s);
        let kp = basis_kahler_pm(&s, 1);
        let km = basis_kahler_pm(&s, -1);
        assert_eq!((k.dim(), kp.dim(), km.dim()), (32, 24, 8));
        assert_eq!(kp.intersect(&km).unwrap().dim(), 0);
        assert!(k.same_as(&kp.sum(&km).unwrap()));
    }

    #[test]
    fn subspace_errors() {
        let s = make_space(2).unwrap();
        let k = basis_kahler(&s);
        let b = basis_bilinear_family(&s, BilinearFamily::SymPlus);
        assert_eq!(k.sum(&b), Err(KdecError::KindMismatch));
        let k6 = basis_affine(&make_space(1).unwrap());
        assert_eq!(k.sum(&k6), Err(KdecError::SpaceMismatch(4, 2)));
        assert_eq!(k.contains(&Bilinear::zeros(4)), Err(KdecError::KindMismatch));
    }
}

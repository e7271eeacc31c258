//! Witness tensors, Laurent families of group elements, coefficient
//! extraction, and end-to-end replays of the irreducibility computations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{KdecError, Result};
use crate::hermitian::{make_group_element, GroupElement, HermitianSpace};
use crate::linalg::Matrix;
use crate::maps::{
    conjugate, kplus_flat_projections, pi10_formula, pi7, pi8, pi9_formula, ricci, ricci13, sigma_unchecked,
    theta_unchecked, ComponentLabel,
};
use crate::rational::{format_q, frac, int, Q};
use crate::spaces::{kahler_ricci_flat, w_space, BilinearFamily, Subspace};
use crate::tensor::{pullback_bilinear, pullback_tensor, Bilinear, Tensor4};

/// Parses a basis label such as `e1` or `f3` into a zero-based index.
pub fn basis_index(space: &HermitianSpace, label: &str) -> usize {
    let (kind, p) = label.split_at(1);
    let p: usize = p.parse().expect("basis label needs a pair number");
    match kind {
        "e" => space.e(p),
        "f" => space.f(p),
        _ => panic!("basis label `{label}` must start with e or f"),
    }
}

fn tuple(space: &HermitianSpace, labels: &str) -> [usize; 4] {
    let v: Vec<usize> = labels.split_whitespace().map(|l| basis_index(space, l)).collect();
    [v[0], v[1], v[2], v[3]]
}

/// Tensor from `(labels, value)` rows, completed by first-pair antisymmetry.
pub fn tensor_from_table(space: &HermitianSpace, rows: &[(&str, i64)]) -> Tensor4 {
    let entries: Vec<([usize; 4], Q)> = rows.iter().map(|(l, v)| (tuple(space, l), int(*v))).collect();
    Tensor4::from_antisymmetric_entries(space.m(), &entries)
}

const W9_TABLE: [(&str, i64); 16] = [
    ("e1 f1 e1 f2", -1),
    ("e1 f1 f1 e2", 1),
    ("e1 f1 e2 f1", -1),
    ("e1 f1 f2 e1", 1),
    ("e1 f2 e1 f1", -1),
    ("e1 f2 f1 e1", 1),
    ("e1 f2 e2 f2", 1),
    ("e1 f2 f2 e2", -1),
    ("f1 e2 e1 f1", 1),
    ("f1 e2 f1 e1", -1),
    ("f1 e2 e2 f2", -1),
    ("f1 e2 f2 e2", 1),
    ("e2 f2 e1 f2", 1),
    ("e2 f2 f1 e2", -1),
    ("e2 f2 e2 f1", 1),
    ("e2 f2 f2 e1", -1),
];

const W11_TABLE: [(&str, i64); 16] = [
    ("e1 e2 e1 e3", 1),
    ("e1 e2 f1 f3", 1),
    ("e1 f2 e1 f3", -1),
    ("e1 f2 f1 e3", 1),
    ("e1 e3 e1 e2", -1),
    ("e1 e3 f1 f2", -1),
    ("e1 f3 e1 f2", 1),
    ("e1 f3 f1 e2", -1),
    ("f1 e2 e1 f3", 1),
    ("f1 e2 f1 e3", -1),
    ("f1 f2 e1 e3", 1),
    ("f1 f2 f1 f3", 1),
    ("f1 e3 e1 f2", -1),
    ("f1 e3 f1 e2", 1),
    ("f1 f3 e1 e2", -1),
    ("f1 f3 f1 f2", -1),
];

const W11_DUAL_TABLE: [(&str, i64); 16] = [
    ("e1 e2 e1 f3", -1),
    ("e1 e2 f1 e3", 1),
    ("e1 f2 e1 e3", -1),
    ("e1 f2 f1 f3", -1),
    ("e1 e3 e1 f2", 1),
    ("e1 e3 f1 e2", -1),
    ("e1 f3 e1 e2", 1),
    ("e1 f3 f1 f2", 1),
    ("f1 e2 e1 e3", 1),
    ("f1 e2 f1 f3", 1),
    ("f1 f2 e1 f3", -1),
    ("f1 f2 f1 e3", 1),
    ("f1 e3 e1 e2", -1),
    ("f1 e3 f1 f2", -1),
    ("f1 f3 e1 f2", 1),
    ("f1 f3 f1 e2", -1),
];

fn require_m(space: &HermitianSpace, required: usize) -> Result<()> {
    if space.m() < required {
        Err(KdecError::DimensionTooSmall { required, actual: space.m() })
    } else {
        Ok(())
    }
}

/// The sixteen-entry element of `W_9` built on the first two complex lines.
pub fn witness_w9(space: &HermitianSpace) -> Result<Tensor4> {
    require_m(space, 4)?;
    Ok(tensor_from_table(space, &W9_TABLE))
}

/// The sixteen-entry element of `W_11` built on the first three complex lines.
pub fn witness_w11(space: &HermitianSpace) -> Result<Tensor4> {
    require_m(space, 6)?;
    Ok(tensor_from_table(space, &W11_TABLE))
}

/// Laurent polynomial with matrix coefficients in one or more parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentMatrix {
    m: usize,
    terms: BTreeMap<Vec<i32>, Matrix>,
}

impl LaurentMatrix {
    pub fn new(m: usize, terms: impl IntoIterator<Item = (Vec<i32>, Matrix)>) -> Self {
        let terms = terms.into_iter().filter(|(_, mat)| !mat.is_zero()).collect();
        LaurentMatrix { m, terms }
    }

    pub fn params(&self) -> usize {
        self.terms.keys().next().map_or(0, Vec::len)
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i32>, Matrix> {
        &self.terms
    }

    /// Per-parameter `(lowest, highest)` exponent.
    pub fn exponent_range(&self) -> Vec<(i32, i32)> {
        (0..self.params())
            .map(|p| {
                let lo = self.terms.keys().map(|k| k[p]).min().unwrap();
                let hi = self.terms.keys().map(|k| k[p]).max().unwrap();
                (lo, hi)
            })
            .collect()
    }

    pub fn eval(&self, eps: &[Q]) -> Matrix {
        let mut out = Matrix::zeros(self.m, self.m);
        for (k, mat) in &self.terms {
            let mut c = Q::one();
            for (e, &p) in eps.iter().zip(k) {
                c *= pow(e, p);
            }
            out = out.add(&mat.scale(&c));
        }
        out
    }

    pub fn mul(&self, other: &LaurentMatrix) -> LaurentMatrix {
        let mut terms: BTreeMap<Vec<i32>, Matrix> = BTreeMap::new();
        for (ka, a) in &self.terms {
            for (kb, b) in &other.terms {
                let k: Vec<i32> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
                let prod = a.mul(b);
                let slot = terms.entry(k).or_insert_with(|| Matrix::zeros(self.m, self.m));
                *slot = slot.add(&prod);
            }
        }
        LaurentMatrix::new(self.m, terms)
    }
}

fn pow(e: &Q, p: i32) -> Q {
    if p >= 0 { e.pow(p) } else { Q::one() / e.pow(-p) }
}

/// A Laurent family `ε ↦ g(ε)` in GL*_C with its inverse family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialFamily {
    space: HermitianSpace,
    forward: LaurentMatrix,
    inverse: LaurentMatrix,
    chi: crate::hermitian::Chi,
    /// Per-parameter exponent of each basis vector, for diagonal monomial families.
    weights: Option<Vec<Vec<i32>>>,
}

impl PolynomialFamily {
    /// Validates `forward * inverse = I` identically and that every
    /// coefficient has the same commutation sign with J.
    pub fn new(space: &HermitianSpace, forward: LaurentMatrix, inverse: LaurentMatrix) -> Result<Self> {
        if forward.params() != inverse.params() || forward.params() == 0 {
            return Err(KdecError::InvalidFamily("parameter counts differ or are zero".into()));
        }
        let params = forward.params();
        let prod = forward.mul(&inverse);
        let identity_ok = prod.terms.len() == 1
            && prod.terms.get(&vec![0; params]).is_some_and(Matrix::is_identity);
        if !identity_ok {
            return Err(KdecError::InvalidFamily("inverse family does not invert the family".into()));
        }
        let j = space.j();
        let mut chi = None;
        for mat in forward.terms.values() {
            let xj = mat.mul(j);
            let jx = j.mul(mat);
            let c = if xj == jx {
                crate::hermitian::Chi::Plus
            } else if xj.add(&jx).is_zero() {
                crate::hermitian::Chi::Minus
            } else {
                return Err(KdecError::NotInGroup);
            };
            if chi.is_some_and(|prev| prev != c) {
                return Err(KdecError::InvalidFamily("commutation sign varies with the parameter".into()));
            }
            chi = Some(c);
        }
        Ok(PolynomialFamily {
            space: space.clone(),
            forward,
            inverse,
            chi: chi.unwrap_or(crate::hermitian::Chi::Plus),
            weights: None,
        })
    }

    pub fn params(&self) -> usize {
        self.forward.params()
    }

    pub fn chi(&self) -> crate::hermitian::Chi {
        self.chi
    }

    pub fn weights(&self) -> Option<&[Vec<i32>]> {
        self.weights.as_deref()
    }

    pub fn at(&self, eps: &[Q]) -> Result<GroupElement> {
        make_group_element(&self.space, self.forward.eval(eps))
    }

    /// Per-parameter exponent range of the pulled-back tensor's components.
    pub fn pullback_range(&self) -> Vec<(i32, i32)> {
        self.forward
            .exponent_range()
            .into_iter()
            .zip(self.inverse.exponent_range())
            .map(|((flo, fhi), (ilo, ihi))| (3 * flo + ilo, 3 * fhi + ihi))
            .collect()
    }
}

fn pair_projector(m: usize, pair: usize) -> Matrix {
    let mut p = Matrix::zeros(m, m);
    p[(2 * pair - 2, 2 * pair - 2)] = Q::one();
    p[(2 * pair - 1, 2 * pair - 1)] = Q::one();
    p
}

/// Scales each listed complex line by its own parameter: `e_p, f_p ↦ ε e_p, ε f_p`.
pub fn scaling_family(space: &HermitianSpace, pairs: &[usize]) -> Result<PolynomialFamily> {
    let m = space.m();
    if pairs.iter().any(|&p| p == 0 || p > space.n()) {
        return Err(KdecError::InvalidFamily(format!("pairs {pairs:?} outside 1..={}", space.n())));
    }
    let k = pairs.len();
    let mut rest = Matrix::identity(m);
    let mut fwd = Vec::new();
    let mut inv = Vec::new();
    let mut weights = vec![vec![0; m]; k];
    for (slot, &p) in pairs.iter().enumerate() {
        let proj = pair_projector(m, p);
        rest = rest.sub(&proj);
        let mut up = vec![0; k];
        up[slot] = 1;
        let mut down = vec![0; k];
        down[slot] = -1;
        fwd.push((up, proj.clone()));
        inv.push((down, proj));
        weights[slot][2 * p - 2] = 1;
        weights[slot][2 * p - 1] = 1;
    }
    fwd.push((vec![0; k], rest.clone()));
    inv.push((vec![0; k], rest));
    let mut fam = PolynomialFamily::new(space, LaurentMatrix::new(m, fwd), LaurentMatrix::new(m, inv))?;
    fam.weights = Some(weights);
    Ok(fam)
}

/// The shear `e_1 ↦ e_1 - ε e_3`, `f_1 ↦ f_1 - ε f_3`, other vectors fixed.
pub fn shear_family(space: &HermitianSpace) -> Result<PolynomialFamily> {
    require_m(space, 6)?;
    let m = space.m();
    let mut nil = Matrix::zeros(m, m);
    nil[(space.e(3), space.e(1))] = Q::one();
    nil[(space.f(3), space.f(1))] = Q::one();
    let id = Matrix::identity(m);
    let fwd = LaurentMatrix::new(m, [(vec![0], id.clone()), (vec![1], nil.scale(&int(-1)))]);
    let inv = LaurentMatrix::new(m, [(vec![0], id), (vec![1], nil)]);
    PolynomialFamily::new(space, fwd, inv)
}

fn vandermonde_inverse(points: &[Q]) -> Matrix {
    let n = points.len();
    let v = Matrix::from_fn(n, n, |a, b| points[a].pow(b as i32));
    v.inverse().expect("distinct interpolation nodes")
}

/// Every nonzero coefficient of the Laurent expansion of `g(ε)·A`.
///
/// The expansion is recovered by tensor-product interpolation at integer
/// nodes and then checked at one further node in every parameter.
pub fn laurent_expansion(family: &PolynomialFamily, a: &Tensor4) -> Result<BTreeMap<Vec<i32>, Tensor4>> {
    let m = a.m();
    if m != family.space.m() {
        return Err(KdecError::SpaceMismatch(family.space.m(), m));
    }
    let ranges = family.pullback_range();
    let sizes: Vec<usize> = ranges.iter().map(|(lo, hi)| (hi - lo + 1) as usize).collect();
    let nodes: Vec<Vec<Q>> = sizes.iter().map(|&s| (1..=s as i64).map(int).collect()).collect();
    let vinv: Vec<Matrix> = nodes.iter().map(|n| vandermonde_inverse(n)).collect();
    // Samples of ε^{-lo} g(ε)·A on the grid, which is a polynomial.
    let grid = grid_points(&sizes);
    let mut samples = Vec::with_capacity(grid.len());
    for point in &grid {
        let eps: Vec<Q> = point.iter().zip(&nodes).map(|(&i, n)| n[i].clone()).collect();
        samples.push(shifted_pullback(family, a, &eps, &ranges)?);
    }
    let mut coeffs: BTreeMap<Vec<i32>, Tensor4> = BTreeMap::new();
    for target in &grid {
        let mut c = Tensor4::zeros(m);
        for (point, sample) in grid.iter().zip(&samples) {
            let mut w = Q::one();
            for p in 0..sizes.len() {
                w *= &vinv[p][(target[p], point[p])];
            }
            c.axpy(&w, sample);
        }
        let exps: Vec<i32> = target.iter().zip(&ranges).map(|(&t, (lo, _))| t as i32 + lo).collect();
        coeffs.insert(exps, c);
    }
    // Check the interpolant at a node outside the grid.
    let check: Vec<Q> = sizes.iter().map(|&s| int(s as i64 + 1)).collect();
    let actual = pullback_tensor(&family.at(&check)?, a)?;
    let mut predicted = Tensor4::zeros(m);
    for (exps, c) in &coeffs {
        let mut w = Q::one();
        for (e, &p) in check.iter().zip(exps) {
            w *= pow(e, p);
        }
        predicted.axpy(&w, c);
    }
    if predicted != actual {
        return Err(KdecError::DegreeBoundExceeded(format!("{ranges:?}")));
    }
    coeffs.retain(|_, c| !c.is_zero());
    Ok(coeffs)
}

fn grid_points(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..s).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

fn shifted_pullback(family: &PolynomialFamily, a: &Tensor4, eps: &[Q], ranges: &[(i32, i32)]) -> Result<Tensor4> {
    let g = family.at(eps)?;
    let mut shift = Q::one();
    for (e, (lo, _)) in eps.iter().zip(ranges) {
        shift *= pow(e, -lo);
    }
    Ok(pullback_tensor(&g, a)?.scale(&shift))
}

/// Coefficient of `ε^k` (one entry of `k` per parameter) in `g(ε)·A`.
pub fn laurent_coefficient(family: &PolynomialFamily, a: &Tensor4, k: &[i32]) -> Result<Tensor4> {
    if k.len() != family.params() {
        return Err(KdecError::InvalidFamily(format!("expected {} exponents", family.params())));
    }
    let mut all = laurent_expansion(family, a)?;
    Ok(all.remove(k).unwrap_or_else(|| Tensor4::zeros(a.m())))
}

/// Same coefficient for a diagonal family, by filtering components on their
/// weight `w_i + w_j + w_k - w_l`.
pub fn coefficient_by_weight(family: &PolynomialFamily, a: &Tensor4, k: &[i32]) -> Result<Tensor4> {
    let weights = family
        .weights()
        .ok_or_else(|| KdecError::InvalidFamily("family is not diagonal".into()))?;
    let m = a.m();
    let mut out = Tensor4::zeros(m);
    for (ix, v) in a.nonzero_entries() {
        let hit = weights.iter().zip(k).all(|(w, &target)| w[ix[0]] + w[ix[1]] + w[ix[2]] - w[ix[3]] == target);
        if hit {
            out.set(ix[0], ix[1], ix[2], ix[3], v.clone());
        }
    }
    Ok(out)
}

/// Isometry swapping the complex lines `p` and `q`.
pub fn line_swap(space: &HermitianSpace, p: usize, q: usize) -> GroupElement {
    let m = space.m();
    let mut mat = Matrix::zeros(m, m);
    let target = |i: usize| {
        let line = i / 2 + 1;
        let to = if line == p { q } else if line == q { p } else { line };
        2 * (to - 1) + i % 2
    };
    for i in 0..m {
        mat[(target(i), i)] = Q::one();
    }
    make_group_element(space, mat).expect("line swap is unitary")
}

/// `e_1, f_1 ↦ -e_1, -f_1`, other vectors fixed.
pub fn first_line_reflection(space: &HermitianSpace) -> GroupElement {
    let mut mat = Matrix::identity(space.m());
    mat[(0, 0)] = int(-1);
    mat[(1, 1)] = int(-1);
    make_group_element(space, mat).expect("reflection is unitary")
}

/// The symmetric J-invariant form `e¹e² + e²e¹ + f¹f² + f²f¹`.
pub fn mixing_form(space: &HermitianSpace) -> Bilinear {
    let mut phi = Bilinear::zeros(space.m());
    for (a, b) in [("e1", "e2"), ("e2", "e1"), ("f1", "f2"), ("f2", "f1")] {
        phi.set(basis_index(space, a), basis_index(space, b), Q::one());
    }
    phi
}

/// The `W_7` element with Ricci-13 contraction equal to `φ`.
pub fn w7_preimage(phi: &Bilinear) -> Tensor4 {
    let m = phi.m() as i64;
    let t = &sigma_unchecked(1, phi).scale(&int(2)) + &theta_unchecked(phi).scale(&int(m + 2));
    t.scale(&(-Q::one() / int(m * (m + 4))))
}

/// `c_2 = A(e_2, f_2, e_2, f_1)` for the `W_7` preimage of [`mixing_form`].
pub fn c2(space: &HermitianSpace) -> Result<Q> {
    require_m(space, 4)?;
    let a = w7_preimage(&mixing_form(space));
    Ok(a.at(tuple(space, "e2 f2 e2 f1")).clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Section {
    #[serde(rename = "5.1")]
    S1,
    #[serde(rename = "5.2")]
    S2,
    #[serde(rename = "5.3")]
    S3,
    #[serde(rename = "5.4")]
    S4,
    #[serde(rename = "5.5")]
    S5,
}

impl Section {
    pub const ALL: [Section; 5] = [Section::S1, Section::S2, Section::S3, Section::S4, Section::S5];

    pub fn label(self) -> &'static str {
        match self {
            Section::S1 => "5.1",
            Section::S2 => "5.2",
            Section::S3 => "5.3",
            Section::S4 => "5.4",
            Section::S5 => "5.5",
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Section {
    type Err = KdecError;
    fn from_str(s: &str) -> Result<Self> {
        Section::ALL
            .into_iter()
            .find(|x| x.label() == s)
            .ok_or_else(|| KdecError::UnknownSection(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
    Info,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessCheck {
    pub section: Section,
    pub name: String,
    pub value: String,
    pub expected: String,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub section: Section,
    pub m: usize,
    pub checks: Vec<WitnessCheck>,
}

impl WitnessReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &WitnessCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn value(&self, name: &str) -> Option<&str> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.value.as_str())
    }
}

struct Recorder {
    section: Section,
    checks: Vec<WitnessCheck>,
}

impl Recorder {
    fn push(&mut self, name: impl Into<String>, value: String, expected: String, status: CheckStatus) {
        self.checks.push(WitnessCheck { section: self.section, name: name.into(), value, expected, status });
    }

    fn equal(&mut self, name: impl Into<String>, value: &Q, expected: &Q) {
        let status = if value == expected { CheckStatus::Pass } else { CheckStatus::Fail };
        self.push(name, format_q(value), format_q(expected), status);
    }

    fn truth(&mut self, name: impl Into<String>, value: bool) {
        let status = if value { CheckStatus::Pass } else { CheckStatus::Fail };
        self.push(name, value.to_string(), "true".into(), status);
    }

    fn info(&mut self, name: impl Into<String>, value: String) {
        self.push(name, value, String::new(), CheckStatus::Info);
    }

    fn skip(&mut self, name: impl Into<String>, why: &str) {
        self.push(name, String::new(), why.to_string(), CheckStatus::Skipped);
    }

    /// Every component of `t` equals the table (with antisymmetric partners).
    fn table(&mut self, name: &str, space: &HermitianSpace, t: &Tensor4, rows: &[(&str, Q)]) {
        let entries: Vec<([usize; 4], Q)> = rows.iter().map(|(l, v)| (tuple(space, l), v.clone())).collect();
        let want = Tensor4::from_antisymmetric_entries(space.m(), &entries);
        for (l, v) in rows {
            self.equal(format!("{name}({})", l.replace(' ', ",")), t.at(tuple(space, l)), v);
        }
        self.truth(format!("{name} has no other nonzero components"), *t == want);
    }

    fn bilinear_values(&mut self, name: &str, space: &HermitianSpace, b: &Bilinear, rows: &[(&str, Q)]) {
        let mut want = Bilinear::zeros(space.m());
        for (l, v) in rows {
            let ix: Vec<usize> = l.split_whitespace().map(|x| basis_index(space, x)).collect();
            want.set(ix[0], ix[1], v.clone());
            self.equal(format!("{name}({})", l.replace(' ', ",")), b.get(ix[0], ix[1]), v);
        }
        self.truth(format!("{name} has no other nonzero entries"), *b == want);
    }
}

fn q(v: i64) -> Q {
    int(v)
}

/// Re-runs the construction of one section and checks every quoted value.
pub fn replay_section(section: Section, space: &HermitianSpace) -> Result<WitnessReport> {
    require_m(space, if section == Section::S3 { 6 } else { 4 })?;
    let mut rec = Recorder { section, checks: Vec::new() };
    match section {
        Section::S1 => replay_w9(space, &mut rec)?,
        Section::S2 => replay_w7(space, &mut rec)?,
        Section::S3 => replay_w11(space, &mut rec)?,
        Section::S4 => replay_duality(space, &mut rec, 10, 9)?,
        Section::S5 => replay_duality(space, &mut rec, 8, 7)?,
    }
    Ok(WitnessReport { section, m: space.m(), checks: rec.checks })
}

fn replay_w9(space: &HermitianSpace, rec: &mut Recorder) -> Result<()> {
    let a = witness_w9(space)?;
    rec.truth("A in W9", ComponentLabel::W9.is_member(&a));
    let g1 = scaling_family(space, &[1])?;
    let b1 = laurent_coefficient(&g1, &a, &[-1])?;
    rec.truth("B1 by interpolation equals B1 by weight", b1 == coefficient_by_weight(&g1, &a, &[-1])?);
    let below = laurent_expansion(&g1, &a)?.keys().all(|k| k[0] >= -1);
    rec.truth("limit of eps g1*A exists", below);
    rec.table("B1", space, &b1, &[("e2 f2 e2 f1", q(1)), ("e2 f2 f2 e1", q(-1))]);
    rec.bilinear_values("rho13(B1)", space, &ricci13(&b1), &[("e2 e1", q(1)), ("f2 f1", q(1))]);
    let swap = line_swap(space, 1, 2);
    let b2 = pullback_tensor(&swap, &b1)?;
    rec.table("B2", space, &b2, &[("e1 f1 e1 f2", q(1)), ("e1 f1 f1 e2", q(-1))]);
    rec.bilinear_values("rho13(B2)", space, &ricci13(&b2), &[("e1 e2", q(1)), ("f1 f2", q(1))]);
    let flat = |t: &Tensor4| crate::maps::kplus_flat_projections(t).is_ok();
    rec.truth("B1, B2 in K+ ∩ ker rho", flat(&b1) && flat(&b2));
    rec.truth("pi7(B1 + B2) != 0", !pi7(&(&b1 + &b2))?.is_zero());
    rec.truth("pi8(B1 - B2) != 0", !pi8(&(&b1 - &b2))?.is_zero());
    let bstar = &conjugate(&b1) + &conjugate(&b2);
    rec.table(
        "B1* + B2*",
        space,
        &bstar,
        &[("e1 f1 e1 e2", q(1)), ("e1 f1 f1 f2", q(1)), ("e2 f2 e2 e1", q(1)), ("e2 f2 f2 f1", q(1))],
    );
    let r = ricci13(&bstar);
    rec.bilinear_values(
        "rho13(B1* + B2*)",
        space,
        &r,
        &[("f1 e2", q(1)), ("e2 f1", q(-1)), ("f2 e1", q(1)), ("e1 f2", q(-1))],
    );
    rec.truth("rho13(B1* + B2*) in L2_0+", BilinearFamily::AltPlusTraceFree.contains(&r));
    let at = tuple(space, "e1 f1 e1 e2");
    rec.equal("pi9(B1* + B2*)(e1,f1,e1,e2) by formula", pi9_formula(&bstar).at(at), &frac(1, 4));
    rec.equal("pi9(B1* + B2*)(e1,f1,e1,e2) by projector", kplus_flat_projections(&bstar)?[2].at(at), &frac(1, 4));
    rec.truth("pi10(B1 + B2) != 0", !kplus_flat_projections(&(&b1 + &b2))?[3].is_zero());
    if space.m() < 6 {
        rec.skip("B3 and pi11(B3)", "requires m >= 6");
        return Ok(());
    }
    let g2 = shear_family(space)?;
    let b3 = laurent_coefficient(&g2, &a, &[1])?;
    rec.table(
        "B3",
        space,
        &b3,
        &[
            ("e1 f1 e2 f3", q(-1)),
            ("e1 f1 f2 e3", q(1)),
            ("e1 f2 e1 f3", q(-1)),
            ("e1 f2 f1 e3", q(1)),
            ("f1 e2 e1 f3", q(1)),
            ("f1 e2 f1 e3", q(-1)),
            ("e2 f2 e2 f3", q(1)),
            ("e2 f2 f2 e3", q(-1)),
        ],
    );
    rec.truth("B3 in ker rho13", ricci13(&b3).is_zero());
    let [_, _, p9, p10, p11] = kplus_flat_projections(&b3)?;
    let at = tuple(space, "e1 f1 e2 f3");
    let quarter = frac(1, 4);
    let half = frac(1, 2);
    let le = |v: &Q, bound: &Q| v.abs() <= *bound;
    rec.truth(format!("|pi9(B3)(e1,f1,e2,f3)| = {} <= 1/4", format_q(p9.at(at))), le(p9.at(at), &quarter));
    rec.truth(format!("|pi10(B3)(e1,f1,e2,f3)| = {} <= 1/4", format_q(p10.at(at))), le(p10.at(at), &quarter));
    rec.truth(format!("|pi11(B3)(e1,f1,e2,f3)| = {} >= 1/2", format_q(p11.at(at))), p11.at(at).abs() >= half);
    let literal = tuple(space, "e1 f1 e2 e3");
    rec.info(
        "(pi9, pi10, pi11)(B3) at (e1,f1,e2,e3)",
        format!("{}, {}, {}", format_q(p9.at(literal)), format_q(p10.at(literal)), format_q(p11.at(literal))),
    );
    rec.truth("pi11(B3) != 0", !p11.is_zero());
    Ok(())
}

fn replay_w7(space: &HermitianSpace, rec: &mut Recorder) -> Result<()> {
    let phi = mixing_form(space);
    rec.truth("phi in S2_0+", BilinearFamily::SymPlusTraceFree.contains(&phi));
    let a = w7_preimage(&phi);
    rec.truth("A in W7", ComponentLabel::W7.is_member(&a));
    rec.truth("rho13(A) = phi", ricci13(&a) == phi);
    rec.truth("rho(A) = 0", ricci(&a).is_zero());
    let s1 = sigma_unchecked(1, &phi);
    rec.equal("sigma1(phi)(e2,f2,e2,e1)", s1.at(tuple(space, "e2 f2 e2 e1")), &q(0));
    rec.equal("sigma1(phi)(e2,f2,e2,f1)", s1.at(tuple(space, "e2 f2 e2 f1")), &q(0));
    let th = theta_unchecked(&phi);
    rec.equal("theta(phi)(e2,f2,e2,e1)", th.at(tuple(space, "e2 f2 e2 e1")), &q(0));
    rec.equal("theta(phi)(e2,f2,e2,f1)", th.at(tuple(space, "e2 f2 e2 f1")), &q(-4));
    let c1 = a.at(tuple(space, "e2 f2 e2 e1")).clone();
    let c2v = a.at(tuple(space, "e2 f2 e2 f1")).clone();
    rec.equal("c1", &c1, &q(0));
    rec.truth(format!("c2 = {} != 0", format_q(&c2v)), !c2v.is_zero());
    rec.info("c2", format_q(&c2v));
    let refl = first_line_reflection(space);
    rec.truth("Phi*phi = -phi", pullback_bilinear(&refl, &phi)? == -&phi);
    rec.truth("Phi*A = -A", pullback_tensor(&refl, &a)? == -&a);
    let fam = scaling_family(space, &[1, 2])?;
    let b = laurent_coefficient(&fam, &a, &[-1, 3])?;
    rec.truth("B by interpolation equals B by weight", b == coefficient_by_weight(&fam, &a, &[-1, 3])?);
    rec.table(
        "B",
        space,
        &b,
        &[
            ("e2 f2 e2 e1", q(0)),
            ("e2 f2 e2 f1", c2v.clone()),
            ("e2 f2 f2 e1", -c2v.clone()),
            ("e2 f2 f2 f1", q(0)),
        ],
    );
    rec.bilinear_values("rho13(B)", space, &ricci13(&b), &[("e2 e1", c2v.clone()), ("f2 f1", c2v.clone())]);
    let swap = line_swap(space, 1, 2);
    rec.truth("line swap preserves phi", pullback_bilinear(&swap, &phi)? == phi);
    let bt = pullback_tensor(&swap, &b)?;
    rec.table("B~", space, &bt, &[("e1 f1 f1 e2", -c2v.clone()), ("e1 f1 e1 f2", c2v.clone())]);
    rec.bilinear_values("rho13(B~)", space, &ricci13(&bt), &[("e1 e2", c2v.clone()), ("f1 f2", c2v.clone())]);
    let diff = &b - &bt;
    let r = ricci13(&diff);
    rec.truth("rho13(B - B~) is antisymmetric", r.is_antisymmetric());
    let at = tuple(space, "e2 f2 e2 f1");
    let want = &c2v / int(4);
    rec.equal("pi9(B - B~)(e2,f2,e2,f1) by formula", pi9_formula(&diff).at(at), &want);
    rec.equal("pi9(B - B~)(e2,f2,e2,f1) by projector", kplus_flat_projections(&diff)?[2].at(at), &want);
    Ok(())
}

fn replay_w11(space: &HermitianSpace, rec: &mut Recorder) -> Result<()> {
    let a = witness_w11(space)?;
    rec.truth("A in K+ ∩ ker rho ∩ ker rho13", kplus_flat_projections(&a).is_ok() && ricci13(&a).is_zero());
    rec.truth("pi9(A) = 0", pi9_formula(&a).is_zero());
    rec.truth("pi10(A) = 0", pi10_formula(&a).is_zero());
    rec.truth("A in W11", ComponentLabel::W11.is_member(&a));
    let dual = tensor_from_table(space, &W11_DUAL_TABLE);
    rec.truth("A* matches its table", conjugate(&a) == dual);
    rec.equal("A*(e1,e2,e1,f3)", conjugate(&a).at(tuple(space, "e1 e2 e1 f3")), &q(-1));
    rec.truth("pi9(A*) = 0", pi9_formula(&dual).is_zero());
    let fam = scaling_family(space, &[3])?;
    let b = laurent_coefficient(&fam, &a, &[-1])?;
    rec.truth("B by interpolation equals B by weight", b == coefficient_by_weight(&fam, &a, &[-1])?);
    rec.table(
        "B",
        space,
        &b,
        &[
            ("e1 e2 e1 e3", q(1)),
            ("e1 e2 f1 f3", q(1)),
            ("e1 f2 e1 f3", q(-1)),
            ("e1 f2 f1 e3", q(1)),
            ("f1 e2 e1 f3", q(1)),
            ("f1 e2 f1 e3", q(-1)),
            ("f1 f2 e1 e3", q(1)),
            ("f1 f2 f1 f3", q(1)),
        ],
    );
    rec.truth("rho(B) = 0", ricci(&b).is_zero());
    rec.truth("rho13(B) = 0", ricci13(&b).is_zero());
    let at = tuple(space, "e1 e2 e1 e3");
    let [_, _, p9, p10, _] = kplus_flat_projections(&b)?;
    rec.equal("pi9(B)(e1,e2,e1,e3)", p9.at(at), &frac(1, 4));
    rec.equal("pi10(B)(e1,e2,e1,e3)", p10.at(at), &frac(1, 4));
    let via_dual = -pi9_formula(&conjugate(&b)).at(tuple(space, "e1 e2 e1 f3")).clone();
    rec.equal("-pi9(B*)(e1,e2,e1,f3)", &via_dual, p10.at(at));
    Ok(())
}

fn replay_duality(space: &HermitianSpace, rec: &mut Recorder, from: u8, to: u8) -> Result<()> {
    for (src, dst) in [(from, to), (to, from)] {
        let s = w_space(space, src)?;
        let d = w_space(space, dst)?;
        let images: Vec<Tensor4> = s.elements::<Tensor4>()?.iter().map(conjugate).collect();
        let inside = images.iter().map(|t| d.contains(t)).collect::<Result<Vec<_>>>()?.into_iter().all(|x| x);
        rec.truth(format!("T(W{src}) ⊂ W{dst}"), inside);
        rec.truth(format!("dim W{src} = dim W{dst}"), s.dim() == d.dim());
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitSpanReport {
    pub generated_dim: usize,
    pub target_dim: usize,
    pub reaches_target: bool,
    /// Summands of the target not contained in the generated span.
    pub missed: Vec<String>,
}

/// Whether the span of `seeds` and all `g·s` equals `target`.
pub fn orbit_span_check(seeds: &[Tensor4], elements: &[GroupElement], target: &Subspace) -> Result<bool> {
    Ok(orbit_span(seeds, elements, target)?.dim() == target.dim())
}

/// The span of the seeds and their images, as a subspace of `target`
/// (`None` entries outside the target make the check fail outright).
fn orbit_span(seeds: &[Tensor4], elements: &[GroupElement], target: &Subspace) -> Result<Subspace> {
    let m = target.m();
    let mut vecs = Vec::new();
    for s in seeds {
        if s.m() != m {
            return Err(KdecError::SpaceMismatch(m, s.m()));
        }
        vecs.push(s.data().to_vec());
        for g in elements {
            if g.m() != m {
                return Err(KdecError::SpaceMismatch(m, g.m()));
            }
            vecs.push(pullback_tensor(g, s)?.into_vec());
        }
    }
    if vecs.iter().all(|v| target.contains_vec(v)) {
        target.span_within(&vecs)
    } else {
        Ok(Subspace::span(m, crate::spaces::ElementKind::Tensor4, &vecs))
    }
}

/// Like [`orbit_span_check`], naming every summand the span fails to contain.
pub fn orbit_span_report(
    seeds: &[Tensor4],
    elements: &[GroupElement],
    target: &Subspace,
    summands: &[(String, &Subspace)],
) -> Result<OrbitSpanReport> {
    let span = orbit_span(seeds, elements, target)?;
    let reaches = span.dim() == target.dim() && target.same_as(&span);
    let mut missed = Vec::new();
    for (name, w) in summands {
        if span.intersect(w)?.dim() < w.dim() {
            missed.push(name.clone());
        }
    }
    Ok(OrbitSpanReport { generated_dim: span.dim(), target_dim: target.dim(), reaches_target: reaches, missed })
}

/// The seeds of the `W_9` chain: the witness and its descendants.
pub fn w9_descendants(space: &HermitianSpace) -> Result<Vec<Tensor4>> {
    let a = witness_w9(space)?;
    let b1 = laurent_coefficient(&scaling_family(space, &[1])?, &a, &[-1])?;
    let b2 = pullback_tensor(&line_swap(space, 1, 2), &b1)?;
    let bstar = &conjugate(&b1) + &conjugate(&b2);
    let mut out = vec![a.clone(), b1, b2, bstar];
    if space.m() >= 6 {
        out.push(laurent_coefficient(&shear_family(space)?, &a, &[1])?);
    }
    Ok(out)
}

/// `K_+ ∩ ker ρ`, the module the orbit checks aim for.
pub fn orbit_target(space: &HermitianSpace) -> Subspace {
    kahler_ricci_flat(space, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::make_space;
    use crate::tensor::inner_product;

    #[test]
    fn witness_basics() {
        let s = make_space(2).unwrap();
        let a = witness_w9(&s).unwrap();
        assert_eq!(*a.at(tuple(&s, "e1 f2 e2 f2")), int(1));
        assert_eq!(inner_product(&a, &a).unwrap(), int(32));
        assert!(witness_w11(&s).is_err());
        assert_eq!(conjugate(&a).at(tuple(&s, "e1 f1 e1 e2")), &int(-1));
        assert_eq!(conjugate(&conjugate(&a)), -&a);
    }

    #[test]
    fn families_validate() {
        let s = make_space(3).unwrap();
        let g = scaling_family(&s, &[1]).unwrap();
        assert_eq!(g.pullback_range(), vec![(-1, 3)]);
        assert!(shear_family(&s).is_ok());
        let m = s.m();
        let bad = PolynomialFamily::new(
            &s,
            LaurentMatrix::new(m, [(vec![0], Matrix::identity(m)), (vec![1], Matrix::identity(m))]),
            LaurentMatrix::new(m, [(vec![0], Matrix::identity(m))]),
        );
        assert!(matches!(bad, Err(KdecError::InvalidFamily(_))));
    }

    #[test]
    fn coefficient_below_range_is_zero() {
        let s = make_space(2).unwrap();
        let a = witness_w9(&s).unwrap();
        let g = scaling_family(&s, &[1]).unwrap();
        assert!(laurent_coefficient(&g, &a, &[-5]).unwrap().is_zero());
        for k in -2..=4 {
            assert_eq!(laurent_coefficient(&g, &a, &[k]).unwrap(), coefficient_by_weight(&g, &a, &[k]).unwrap());
        }
    }

    #[test]
    fn c2_closed_form() {
        for n in 2..=4 {
            let m = (2 * n) as i64;
            let s = make_space(n).unwrap();
            assert_eq!(c2(&s).unwrap(), Q::new((4 * (m + 2)).into(), (m * (m + 4)).into()));
        }
    }

    #[test]
    fn replays_pass() {
        for n in [2, 3] {
            let s = make_space(n).unwrap();
            for sec in Section::ALL {
                if sec == Section::S3 && n < 3 {
                    assert!(replay_section(sec, &s).is_err());
                    continue;
                }
                let r = replay_section(sec, &s).unwrap();
                for c in &r.checks {
                    eprintln!("{} m={} {:?} {} = {} [{}]", sec, s.m(), c.status, c.name, c.value, c.expected);
                }
                assert!(r.passed(), "{sec} m={}", s.m());
            }
        }
    }
}

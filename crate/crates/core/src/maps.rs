//! Contractions, splitting maps, the conjugate operator, projectors and the
//! full twelve-component decomposition.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{KdecError, Result};
use crate::hermitian::jidx;
use crate::rational::{int, Q};
use crate::spaces::BilinearFamily;
use crate::tensor::{
    bilinear_inner_product, has_first_pair_parity, has_last_pair_symmetry, kaehler_violation, parity_parts,
    split_bilinear, Bilinear, Tensor4,
};

/// `ρ(A)(x, y) = Σ_i A(e_i, x, y, e_i)`.
pub fn ricci(a: &Tensor4) -> Bilinear {
    let m = a.m();
    Bilinear::from_fn(m, |x, y| (0..m).fold(Q::zero(), |acc, i| acc + a.get(i, x, y, i)))
}

/// `ρ13(A)(x, y) = Σ_i A(e_i, x, e_i, y)`.
pub fn ricci13(a: &Tensor4) -> Bilinear {
    let m = a.m();
    Bilinear::from_fn(m, |x, y| (0..m).fold(Q::zero(), |acc, i| acc + a.get(i, x, i, y)))
}

/// `(τ, τ_J)` with `τ = Σ A(e_i, e_j, e_j, e_i)` and `τ_J = Σ A(e_i, Je_j, e_j, e_i)`.
pub fn traces(a: &Tensor4) -> (Q, Q) {
    let m = a.m();
    let mut tau = Q::zero();
    let mut tau_j = Q::zero();
    for i in 0..m {
        for j in 0..m {
            tau += a.get(i, j, j, i);
            let (jj, s) = jidx(j);
            let v = a.get(i, jj, j, i);
            if s > 0 {
                tau_j += v;
            } else {
                tau_j -= v;
            }
        }
    }
    (tau, tau_j)
}

/// The parity family each splitting map expects.
pub fn sigma_family(k: u8) -> BilinearFamily {
    match k {
        1 => BilinearFamily::SymPlus,
        2 => BilinearFamily::SymMinus,
        3 => BilinearFamily::AltPlus,
        4 => BilinearFamily::AltMinus,
        _ => panic!("sigma index {k} outside 1..=4"),
    }
}

/// The splitting map `σ_k`, lowered; rejects `φ` outside its parity family.
pub fn sigma(k: u8, phi: &Bilinear) -> Result<Tensor4> {
    if !(1..=4).contains(&k) {
        return Err(KdecError::DomainViolation(format!("sigma index {k} outside 1..=4")));
    }
    let fam = sigma_family(k);
    if !fam.contains(phi) {
        return Err(KdecError::WrongParity(fam.name()));
    }
    Ok(sigma_unchecked(k, phi))
}

/// `σ_k φ` without the parity check; every term is a Kronecker delta in `w`.
pub fn sigma_unchecked(k: u8, phi: &Bilinear) -> Tensor4 {
    let m = phi.m();
    let mut out = Tensor4::zeros(m);
    let two = int(2);
    let signed = |v: &Q, s: i32| if s > 0 { v.clone() } else { -v.clone() };
    for x in 0..m {
        let (xj, sx) = jidx(x);
        for y in 0..m {
            let (yj, sy) = jidx(y);
            for z in 0..m {
                let (zj, sz) = jidx(z);
                // φ(x,z)<y,w> - φ(y,z)<x,w> - φ(x,Jz)<Jy,w> + φ(y,Jz)<Jx,w>
                out.add_at(x, y, z, y, phi.get(x, z));
                out.add_at(x, y, z, x, &-phi.get(y, z));
                out.add_at(x, y, z, yj, &signed(phi.get(x, zj), -sy * sz));
                out.add_at(x, y, z, xj, &signed(phi.get(y, zj), sx * sz));
                if k == 1 || k == 4 {
                    // -2 φ(x,Jy) <Jz,w>
                    out.add_at(x, y, z, zj, &signed(&(&two * phi.get(x, yj)), -sz * sy));
                }
                if k == 3 || k == 4 {
                    // +2 φ(x,y) <z,w>
                    out.add_at(x, y, z, z, &(&two * phi.get(x, y)));
                }
            }
        }
    }
    out
}

/// Whether `φ` lies in `S2_0+ ⊕ L2_0+`.
pub fn in_theta_domain(phi: &Bilinear) -> bool {
    let m = phi.m();
    phi.has_j_parity(1)
        && phi.trace().is_zero()
        && bilinear_inner_product(phi, &Bilinear::kaehler_form(m)).unwrap().is_zero()
}

/// `ϑ(φ)(x,y,z,w) = φ(x,w)<y,z> - φ(y,w)<x,z> + φ(x,Jw)<y,Jz> - φ(y,Jw)<x,Jz> - 2φ(z,Jw)<x,Jy>`.
pub fn theta(phi: &Bilinear) -> Result<Tensor4> {
    if !in_theta_domain(phi) {
        return Err(KdecError::WrongParity("S2_0+ + L2_0+"));
    }
    Ok(theta_unchecked(phi))
}

pub fn theta_unchecked(phi: &Bilinear) -> Tensor4 {
    let m = phi.m();
    let mut out = Tensor4::zeros(m);
    let two = int(2);
    let signed = |v: &Q, s: i32| if s > 0 { v.clone() } else { -v.clone() };
    for a in 0..m {
        let (aj, sa) = jidx(a);
        for b in 0..m {
            for w in 0..m {
                let (wj, sw) = jidx(w);
                // (x, y=b, z=b): φ(x,w)
                out.add_at(a, b, b, w, phi.get(a, w));
                // (x=b, y=a, z=b): -φ(y,w)
                out.add_at(b, a, b, w, &-phi.get(a, w));
                // z = a, <y,Jz> = sa [y = aj]: φ(x=b,Jw)
                out.add_at(b, aj, a, w, &signed(phi.get(b, wj), sa * sw));
                // z = a, <x,Jz> = sa [x = aj]: -φ(y=b,Jw)
                out.add_at(aj, b, a, w, &signed(phi.get(b, wj), -sa * sw));
                // y = a, <x,Jy> = sa [x = aj]: -2φ(z=b,Jw)
                out.add_at(aj, a, b, w, &signed(&(&two * phi.get(b, wj)), -sa * sw));
            }
        }
    }
    out
}

/// The conjugate tensor `A*(x, y, z, w) = A(x, y, z, Jw)`.
pub fn conjugate(a: &Tensor4) -> Tensor4 {
    a.with_j(&[3])
}

/// `T ψ(x, y) = ψ(x, Jy)`.
pub fn conjugate_bilinear(phi: &Bilinear) -> Bilinear {
    phi.conjugate()
}

/// Component of `φ` in `S2_0+`.
pub fn sym_trace_free_part(phi: &Bilinear) -> Bilinear {
    let m = phi.m();
    let s = split_bilinear(phi).sym_plus;
    let c = s.trace() / int(m as i64);
    &s - &Bilinear::metric(m).scale(&c)
}

/// Component of `φ` in `L2_0+`.
pub fn alt_trace_free_part(phi: &Bilinear) -> Bilinear {
    let m = phi.m();
    let a = split_bilinear(phi).alt_plus;
    let om = Bilinear::kaehler_form(m);
    let c = bilinear_inner_product(&a, &om).unwrap() / int(m as i64);
    &a - &om.scale(&c)
}

fn check_kplus_flat(a: &Tensor4) -> Result<()> {
    if let Some(v) = kaehler_violation(a) {
        return Err(KdecError::DomainViolation(v.to_string()));
    }
    if !has_first_pair_parity(a, 1) {
        return Err(KdecError::DomainViolation("tensor is not in the positive parity summand".into()));
    }
    if !ricci(a).is_zero() {
        return Err(KdecError::DomainViolation("Ricci contraction is nonzero".into()));
    }
    Ok(())
}

fn pi_scale(m: usize) -> Q {
    let m = m as i64;
    -Q::one() / int(m * (m + 4))
}

pub(crate) fn pi7_unchecked(a: &Tensor4) -> Tensor4 {
    let m = a.m();
    let phi = sym_trace_free_part(&ricci13(a));
    let t = &sigma_unchecked(1, &phi).scale(&int(2)) + &theta_unchecked(&phi).scale(&int(m as i64 + 2));
    t.scale(&pi_scale(m))
}

pub(crate) fn pi8_unchecked(a: &Tensor4) -> Tensor4 {
    let m = a.m();
    let psi = alt_trace_free_part(&ricci13(a));
    let t = &sigma_unchecked(3, &psi).scale(&int(-2)) + &theta_unchecked(&psi).scale(&int(m as i64 + 2));
    t.scale(&pi_scale(m))
}

/// `π7 = -1/(m(m+4)) (2σ1 + (m+2)ϑ) ρ13,s` on `K_+ ∩ ker ρ`.
pub fn pi7(a: &Tensor4) -> Result<Tensor4> {
    check_kplus_flat(a)?;
    Ok(pi7_unchecked(a))
}

/// `π8 = -1/(m(m+4)) (-2σ3 + (m+2)ϑ) ρ13,a` on `K_+ ∩ ker ρ`.
pub fn pi8(a: &Tensor4) -> Result<Tensor4> {
    check_kplus_flat(a)?;
    Ok(pi8_unchecked(a))
}

/// Klein-group average `¼{A(x,y,z,w) + A(y,x,w,z) + A(z,w,x,y) + A(w,z,y,x)}`.
///
/// Equals the projection onto `W_9` when `ρ13(A)` is antisymmetric.
pub fn pi9_formula(a: &Tensor4) -> Tensor4 {
    let quarter = Q::new(1.into(), 4.into());
    let sum = &(&(a + &a.permute([1, 0, 3, 2])) + &a.permute([2, 3, 0, 1])) + &a.permute([3, 2, 1, 0]);
    sum.scale(&quarter)
}

/// `-T π9 T`, the projection onto `W_10` when `ρ13(A)` is symmetric.
pub fn pi10_formula(a: &Tensor4) -> Tensor4 {
    -conjugate(&pi9_formula(&conjugate(a)))
}

/// The printed closed form
/// `-¼{A(x,y,z,JJw) + A(y,x,Jw,Jz) + A(z,Jw,x,Jy) + A(Jw,z,y,Jx)}`.
pub fn pi10_printed(a: &Tensor4) -> Tensor4 {
    let quarter = Q::new((-1).into(), 4.into());
    let m = a.m();
    let t1 = a.with_j(&[3, 3]);
    // A(y,x,Jw,Jz): permute then insert J in the last two slots
    let t2 = a.with_j(&[2, 3]).permute([1, 0, 3, 2]);
    // A(z,Jw,x,Jy)
    let t3 = a.with_j(&[1, 3]).permute([2, 3, 0, 1]);
    // A(Jw,z,y,Jx)
    let t4 = a.with_j(&[0, 3]).permute([3, 2, 1, 0]);
    debug_assert_eq!(t1.m(), m);
    (&(&(&t1 + &t2) + &t3) + &t4).scale(&quarter)
}

/// Projections of `A ∈ K_+ ∩ ker ρ` onto `W_7, ..., W_11`, in that order.
///
/// The closed formulas for `π9` and `π10` are applied after the `W_7 ⊕ W_8`
/// part has been removed, where their hypotheses hold.
pub fn kplus_flat_projections(a: &Tensor4) -> Result<[Tensor4; 5]> {
    check_kplus_flat(a)?;
    Ok(kplus_flat_projections_unchecked(a))
}

pub(crate) fn kplus_flat_projections_unchecked(a: &Tensor4) -> [Tensor4; 5] {
    let p7 = pi7_unchecked(a);
    let p8 = pi8_unchecked(a);
    let rest = &(a - &p7) - &p8;
    let p9 = pi9_formula(&rest);
    let p10 = pi10_formula(&rest);
    let p11 = &(&rest - &p9) - &p10;
    [p7, p8, p9, p10, p11]
}

pub fn pi9(a: &Tensor4) -> Result<Tensor4> {
    Ok(kplus_flat_projections(a)?[2].clone())
}

pub fn pi10(a: &Tensor4) -> Result<Tensor4> {
    Ok(kplus_flat_projections(a)?[3].clone())
}

pub fn pi11(a: &Tensor4) -> Result<Tensor4> {
    Ok(kplus_flat_projections(a)?[4].clone())
}

/// The twelve summands, in the order they are reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentLabel {
    RealTrace,
    ChiTrace,
    SymPlusViaRicci,
    AltPlusViaRicci,
    W7,
    W8,
    W9,
    W10,
    W11,
    AltMinusViaRicci,
    SymMinusViaRicci,
    W12,
}

impl ComponentLabel {
    pub const ALL: [ComponentLabel; 12] = [
        ComponentLabel::RealTrace,
        ComponentLabel::ChiTrace,
        ComponentLabel::SymPlusViaRicci,
        ComponentLabel::AltPlusViaRicci,
        ComponentLabel::W7,
        ComponentLabel::W8,
        ComponentLabel::W9,
        ComponentLabel::W10,
        ComponentLabel::W11,
        ComponentLabel::AltMinusViaRicci,
        ComponentLabel::SymMinusViaRicci,
        ComponentLabel::W12,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ComponentLabel::RealTrace => "R-trace",
            ComponentLabel::ChiTrace => "chi-trace",
            ComponentLabel::SymPlusViaRicci => "S2_0+-via-rho",
            ComponentLabel::AltPlusViaRicci => "L2_0+-via-rho",
            ComponentLabel::W7 => "W7",
            ComponentLabel::W8 => "W8",
            ComponentLabel::W9 => "W9",
            ComponentLabel::W10 => "W10",
            ComponentLabel::W11 => "W11",
            ComponentLabel::AltMinusViaRicci => "L2--via-rho",
            ComponentLabel::SymMinusViaRicci => "S2--via-rho",
            ComponentLabel::W12 => "W12",
        }
    }

    /// Predicate-level membership test for this label's summand.
    pub fn is_member(self, a: &Tensor4) -> bool {
        if a.is_zero() {
            return true;
        }
        let m = a.m() as i64;
        let inv = |q: i64| Q::one() / int(q);
        let via = |k: u8, scale: Q, fam: BilinearFamily| {
            let phi = ricci(a).scale(&scale);
            fam.contains(&phi) && sigma_unchecked(k, &phi) == *a
        };
        let kplus_flat = || check_kplus_flat(a).is_ok();
        match self {
            ComponentLabel::RealTrace => {
                let phi = ricci(a).scale(&-inv(m + 2));
                let c = phi.trace() / int(m);
                phi == Bilinear::metric(a.m()).scale(&c) && sigma_unchecked(1, &phi) == *a
            }
            ComponentLabel::ChiTrace => {
                let phi = ricci(a).scale(&-inv(m + 2));
                let om = Bilinear::kaehler_form(a.m());
                let c = bilinear_inner_product(&phi, &om).unwrap() / int(m);
                phi == om.scale(&c) && sigma_unchecked(3, &phi) == *a
            }
            ComponentLabel::SymPlusViaRicci => via(1, -inv(m + 2), BilinearFamily::SymPlusTraceFree),
            ComponentLabel::AltPlusViaRicci => via(3, -inv(m + 2), BilinearFamily::AltPlusTraceFree),
            ComponentLabel::SymMinusViaRicci => m != 2 && via(2, inv(2 - m), BilinearFamily::SymMinus),
            ComponentLabel::AltMinusViaRicci => via(4, -inv(m + 2), BilinearFamily::AltMinus),
            ComponentLabel::W7 => kplus_flat() && pi7_unchecked(a) == *a,
            ComponentLabel::W8 => kplus_flat() && pi8_unchecked(a) == *a,
            ComponentLabel::W9 => kplus_flat() && has_last_pair_symmetry(a, -1),
            ComponentLabel::W10 => kplus_flat() && has_last_pair_symmetry(a, 1),
            ComponentLabel::W11 => {
                kplus_flat()
                    && ricci13(a).is_zero()
                    && pi9_formula(a).is_zero()
                    && pi10_formula(a).is_zero()
            }
            ComponentLabel::W12 => {
                kaehler_violation(a).is_none() && has_first_pair_parity(a, -1) && ricci(a).is_zero()
            }
        }
    }
}

impl fmt::Display for ComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ComponentLabel {
    type Err = KdecError;
    fn from_str(s: &str) -> Result<Self> {
        ComponentLabel::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| KdecError::Document(format!("unknown component label `{s}`")))
    }
}

/// One Ricci-derived piece: the bilinear form and its σ-preimage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RicciPart {
    pub label: ComponentLabel,
    pub form: Bilinear,
    pub preimage: Tensor4,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RicciSplit {
    /// +1 for `K_+`, -1 for `K_-`.
    pub parity: i32,
    pub ricci: Bilinear,
    pub parts: Vec<RicciPart>,
    /// `A` minus all preimages; lies in `ker ρ`.
    pub remainder: Tensor4,
}

/// Splits `ρ(A)` for `A ∈ K_±` and subtracts the σ-preimages.
pub fn split_ricci(a: &Tensor4) -> Result<RicciSplit> {
    if let Some(v) = kaehler_violation(a) {
        return Err(KdecError::DomainViolation(v.to_string()));
    }
    let parity = if has_first_pair_parity(a, 1) {
        1
    } else if has_first_pair_parity(a, -1) {
        -1
    } else {
        return Err(KdecError::DomainViolation("tensor mixes both parity summands".into()));
    };
    split_ricci_unchecked(a, parity)
}

/// Like [`split_ricci`] with the summand fixed by the caller (+1 or -1), so
/// tensors in both (only zero) can be pushed through either branch.
pub fn split_ricci_as(a: &Tensor4, parity: i32) -> Result<RicciSplit> {
    if parity != 1 && parity != -1 {
        return Err(KdecError::DomainViolation(format!("parity {parity} is not +1 or -1")));
    }
    if let Some(v) = kaehler_violation(a) {
        return Err(KdecError::DomainViolation(v.to_string()));
    }
    if !has_first_pair_parity(a, parity) {
        return Err(KdecError::DomainViolation("tensor is outside the requested parity summand".into()));
    }
    split_ricci_unchecked(a, parity)
}

fn split_ricci_unchecked(a: &Tensor4, parity: i32) -> Result<RicciSplit> {
    let m = a.m();
    let mi = m as i64;
    let r = ricci(a);
    let parts_of = split_bilinear(&r);
    let mut parts = Vec::new();
    if parity > 0 {
        if !(parts_of.sym_minus.is_zero() && parts_of.alt_minus.is_zero()) {
            return Err(KdecError::DomainViolation("Ricci tensor has the wrong parity".into()));
        }
        let g = Bilinear::metric(m);
        let om = Bilinear::kaehler_form(m);
        let c = parts_of.sym_plus.trace() / int(mi);
        let cj = bilinear_inner_product(&parts_of.alt_plus, &om)? / int(mi);
        let trace = g.scale(&c);
        let trace_j = om.scale(&cj);
        let phi0 = &parts_of.sym_plus - &trace;
        let psi0 = &parts_of.alt_plus - &trace_j;
        let s = -Q::one() / int(mi + 2);
        for (label, k, form) in [
            (ComponentLabel::RealTrace, 1, trace),
            (ComponentLabel::ChiTrace, 3, trace_j),
            (ComponentLabel::SymPlusViaRicci, 1, phi0),
            (ComponentLabel::AltPlusViaRicci, 3, psi0),
        ] {
            let preimage = sigma_unchecked(k, &form).scale(&s);
            parts.push(RicciPart { label, form, preimage });
        }
    } else {
        if !(parts_of.sym_plus.is_zero() && parts_of.alt_plus.is_zero()) {
            return Err(KdecError::DomainViolation("Ricci tensor has the wrong parity".into()));
        }
        if m == 2 {
            return Err(KdecError::DegenerateDimension(m));
        }
        let phi2 = parts_of.sym_minus;
        let psi4 = parts_of.alt_minus;
        let pre4 = sigma_unchecked(4, &psi4).scale(&(-Q::one() / int(mi + 2)));
        let pre2 = sigma_unchecked(2, &phi2).scale(&(Q::one() / int(2 - mi)));
        parts.push(RicciPart { label: ComponentLabel::AltMinusViaRicci, form: psi4, preimage: pre4 });
        parts.push(RicciPart { label: ComponentLabel::SymMinusViaRicci, form: phi2, preimage: pre2 });
    }
    let mut remainder = a.clone();
    for p in &parts {
        remainder = &remainder - &p.preimage;
    }
    debug_assert!(ricci(&remainder).is_zero());
    Ok(RicciSplit { parity, ricci: r, parts, remainder })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub input: Tensor4,
    pub components: Vec<(ComponentLabel, Tensor4)>,
    /// `input - Σ components`; always zero.
    pub residual: Tensor4,
}

impl Decomposition {
    pub fn component(&self, label: ComponentLabel) -> &Tensor4 {
        &self.components.iter().find(|(l, _)| *l == label).expect("all labels present").1
    }

    pub fn nonzero_labels(&self) -> Vec<ComponentLabel> {
        self.components.iter().filter(|(_, t)| !t.is_zero()).map(|(l, _)| *l).collect()
    }
}

/// Decomposes `A ∈ K` (m ≥ 4) into its twelve orthogonal summands.
pub fn decompose(a: &Tensor4) -> Result<Decomposition> {
    let m = a.m();
    if m < 4 {
        return Err(KdecError::DimensionTooSmall { required: 4, actual: m });
    }
    if let Some(v) = kaehler_violation(a) {
        return Err(KdecError::NotKaehler(v.to_string()));
    }
    let (plus, minus) = parity_parts(a);
    let sp = split_ricci_unchecked(&plus, 1)?;
    let sm = split_ricci_unchecked(&minus, -1)?;
    let [p7, p8, p9, p10, p11] = kplus_flat_projections_unchecked(&sp.remainder);
    let mut components: Vec<(ComponentLabel, Tensor4)> = Vec::with_capacity(12);
    for part in sp.parts.into_iter().chain(sm.parts) {
        components.push((part.label, part.preimage));
    }
    components.extend([
        (ComponentLabel::W7, p7),
        (ComponentLabel::W8, p8),
        (ComponentLabel::W9, p9),
        (ComponentLabel::W10, p10),
        (ComponentLabel::W11, p11),
        (ComponentLabel::W12, sm.remainder),
    ]);
    components.sort_by_key(|(l, _)| *l);
    let mut residual = a.clone();
    for (_, c) in &components {
        residual = &residual - c;
    }
    Ok(Decomposition { input: a.clone(), components, residual })
}

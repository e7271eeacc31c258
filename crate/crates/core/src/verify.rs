//! Randomized exact property suites, one per group of identities.
//!
//! Every suite is driven by a single seed; reports are deterministic.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{KdecError, Result};
use crate::hermitian::{random_gl_star, random_unitary, Chi, GroupElement, HermitianSpace};
use crate::maps::{
    conjugate, decompose, kplus_flat_projections, pi10_formula, pi10_printed, pi7, pi8, ricci, ricci13,
    sigma, sigma_family, split_ricci, sym_trace_free_part, alt_trace_free_part, theta, traces,
};
use crate::rational::{format_q, int, Q};
use crate::spaces::{
    basis_affine, basis_bilinear_family, basis_kahler, basis_kahler_pm, kahler_ricci_flat, BilinearFamily,
    SpaceCatalog, Subspace,
};
use crate::tensor::{
    has_first_pair_parity, inner_product, is_kaehler_curvature, pullback_bilinear, pullback_tensor, Bilinear,
    Tensor4,
};
use crate::witness::{replay_section, CheckStatus, Section};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Lemma22,
    Lemma31,
    Lemma32,
    Lemma41,
    Lemma43,
    Theorem15,
    Section5,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Lemma22,
        Suite::Lemma31,
        Suite::Lemma32,
        Suite::Lemma41,
        Suite::Lemma43,
        Suite::Theorem15,
        Suite::Section5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma22 => "lemma2.2",
            Suite::Lemma31 => "lemma3.1",
            Suite::Lemma32 => "lemma3.2",
            Suite::Lemma41 => "lemma4.1",
            Suite::Lemma43 => "lemma4.3",
            Suite::Theorem15 => "theorem1.5",
            Suite::Section5 => "section5",
            Suite::All => "all",
        }
    }

    /// Smallest real dimension the suite accepts.
    pub fn min_m(self) -> usize {
        match self {
            Suite::Lemma22 | Suite::Lemma31 => 2,
            _ => 4,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = KdecError;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| KdecError::UnknownSuite(s.to_string()))
    }
}

/// Sample counts for the randomized checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Random forms per family, random tensors per property.
    pub samples: usize,
    /// Random group elements per equivariance property.
    pub group_elements: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: 8, group_elements: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyResult {
    pub suite: &'static str,
    pub name: String,
    pub cases: usize,
    pub passed: bool,
    /// First failing case, empty on success.
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub suite: &'static str,
    pub m: usize,
    pub seed: u64,
    pub passed: bool,
    pub properties: Vec<PropertyResult>,
}

struct Run<'a> {
    suite: &'static str,
    space: &'a HermitianSpace,
    rng: ChaCha8Rng,
    opts: VerifyOptions,
    out: Vec<PropertyResult>,
}

impl Run<'_> {
    /// Records a property from its per-case outcomes; `Err(msg)` marks a failing case.
    fn prop(&mut self, name: impl Into<String>, cases: Vec<std::result::Result<(), String>>) {
        let detail = cases.iter().find_map(|c| c.clone().err()).unwrap_or_default();
        self.out.push(PropertyResult {
            suite: self.suite,
            name: name.into(),
            cases: cases.len(),
            passed: cases.iter().all(|c| c.is_ok()),
            detail,
        });
    }

    fn next_seed(&mut self) -> u64 {
        self.rng.gen()
    }

    fn forms(&mut self, family: BilinearFamily) -> Vec<Bilinear> {
        let basis = basis_bilinear_family(self.space, family);
        (0..self.opts.samples).map(|_| random_element(&basis, &mut self.rng)).collect()
    }

    fn tensors(&mut self, s: &Subspace) -> Vec<Tensor4> {
        (0..self.opts.samples).map(|_| random_element(s, &mut self.rng)).collect()
    }

    fn gl_elements(&mut self) -> Vec<GroupElement> {
        let space = self.space;
        (0..self.opts.group_elements)
            .map(|i| {
                let chi = if i % 2 == 0 { Chi::Plus } else { Chi::Minus };
                random_gl_star(self.next_seed(), space, chi)
            })
            .collect()
    }

    fn unitary_elements(&mut self) -> Vec<GroupElement> {
        let space = self.space;
        (0..self.opts.group_elements)
            .map(|i| {
                let chi = if i % 2 == 0 { Chi::Plus } else { Chi::Minus };
                random_unitary(self.next_seed(), space, chi)
            })
            .collect()
    }
}

/// Random combination of the basis with small integer coefficients.
pub fn random_element<E: crate::spaces::Element>(s: &Subspace, rng: &mut impl Rng) -> E {
    let coeffs: Vec<Q> = (0..s.dim()).map(|_| int(rng.gen_range(-3..=3))).collect();
    s.combine_element(&coeffs).expect("element kind matches its subspace")
}

fn ok_if(cond: bool, why: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond { Ok(()) } else { Err(why()) }
}

fn eq_case<T: PartialEq>(lhs: &T, rhs: &T, what: &str) -> std::result::Result<(), String> {
    ok_if(lhs == rhs, || format!("{what}: sides differ"))
}

/// Runs one suite (or all of them, concatenated) at the given space.
pub fn run_suite(suite: Suite, space: &HermitianSpace, seed: u64, opts: VerifyOptions) -> Result<VerifyReport> {
    let required = if suite == Suite::All { 4 } else { suite.min_m() };
    if space.m() < required {
        return Err(KdecError::DimensionTooSmall { required, actual: space.m() });
    }
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut properties = Vec::new();
    for s in suites {
        let mut run = Run {
            suite: s.name(),
            space,
            rng: ChaCha8Rng::seed_from_u64(seed),
            opts,
            out: Vec::new(),
        };
        match s {
            Suite::Lemma22 => lemma22(&mut run)?,
            Suite::Lemma31 => lemma31(&mut run)?,
            Suite::Lemma32 => lemma32(&mut run)?,
            Suite::Lemma41 => lemma41(&mut run)?,
            Suite::Lemma43 => lemma43(&mut run)?,
            Suite::Theorem15 => theorem15(&mut run)?,
            Suite::Section5 => section5(&mut run)?,
            Suite::All => unreachable!(),
        }
        properties.extend(run.out);
    }
    let passed = properties.iter().all(|p| p.passed);
    Ok(VerifyReport { suite: suite.name(), m: space.m(), seed, passed, properties })
}

fn lemma22(run: &mut Run) -> Result<()> {
    let m = run.space.m() as i64;
    let eigen = [-(m + 2), 2 - m, -(m + 2), -(2 + m)];
    for k in 1..=4u8 {
        let family = sigma_family(k);
        let forms = run.forms(family);
        let images = forms.iter().map(|phi| sigma(k, phi)).collect::<Result<Vec<_>>>()?;
        let parity = if k % 2 == 1 { 1 } else { -1 };
        run.prop(
            format!("sigma{k} lands in K{}", if parity > 0 { "+" } else { "-" }),
            images
                .iter()
                .map(|a| ok_if(is_kaehler_curvature(a) && has_first_pair_parity(a, parity), || "not in K".into()))
                .collect(),
        );
        let lambda = int(eigen[k as usize - 1]);
        run.prop(
            format!("rho sigma{k} phi = {} phi", eigen[k as usize - 1]),
            forms.iter().zip(&images).map(|(phi, a)| eq_case(&ricci(a), &phi.scale(&lambda), "rho")).collect(),
        );
        let gs = run.gl_elements();
        let mut cases = Vec::new();
        for g in &gs {
            for phi in forms.iter().take(2) {
                let lhs = pullback_tensor(g, &sigma(k, phi)?)?;
                let rhs = sigma(k, &pullback_bilinear(g, phi)?)?;
                cases.push(eq_case(&lhs, &rhs, "sigma equivariance"));
                let lhs = pullback_bilinear(g, &ricci(&sigma(k, phi)?))?;
                cases.push(eq_case(&lhs, &ricci(&pullback_tensor(g, &sigma(k, phi)?)?), "rho equivariance"));
            }
        }
        run.prop(format!("sigma{k} and rho commute with GL* pullbacks"), cases);
        let wrong = sigma_family(if k == 1 { 3 } else { 1 });
        let bad = random_element::<Bilinear>(&basis_bilinear_family(run.space, wrong), &mut run.rng);
        let rejected = bad.is_zero() || matches!(sigma(k, &bad), Err(KdecError::WrongParity(_)));
        run.prop(format!("sigma{k} rejects {}", wrong.name()), vec![ok_if(rejected, || "accepted".into())]);
    }
    let forms = run.forms(BilinearFamily::SymPlus);
    run.prop(
        "tau = tr rho",
        forms
            .iter()
            .map(|phi| {
                let a = sigma(1, phi).unwrap();
                eq_case(&traces(&a).0, &ricci(&a).trace(), "tau")
            })
            .collect(),
    );
    Ok(())
}

fn lemma31(run: &mut Run) -> Result<()> {
    let m = run.space.m() as i64;
    let s = run.forms(BilinearFamily::SymPlusTraceFree);
    let a = run.forms(BilinearFamily::AltPlusTraceFree);
    let two = int(2);
    let mut cases = Vec::new();
    for phi in &s {
        cases.push(eq_case(&ricci13(&sigma(1, phi)?), &phi.scale(&two), "rho13 sigma1"));
    }
    run.prop("rho13 sigma1 phi1 = 2 phi1", cases);
    let mut cases = Vec::new();
    for phi in &a {
        cases.push(eq_case(&ricci13(&sigma(3, phi)?), &phi.scale(&-two.clone()), "rho13 sigma3"));
    }
    run.prop("rho13 sigma3 phi3 = -2 phi3", cases);
    let mut cases = Vec::new();
    for phi in &s {
        cases.push(eq_case(&ricci(&theta(phi)?), &phi.scale(&two), "rho theta"));
    }
    run.prop("rho theta phi1 = 2 phi1", cases);
    let mut cases = Vec::new();
    for phi in &a {
        cases.push(eq_case(&ricci(&theta(phi)?), &phi.scale(&-two.clone()), "rho theta"));
    }
    run.prop("rho theta phi3 = -2 phi3", cases);
    let mut cases = Vec::new();
    let mut member = Vec::new();
    for phi in s.iter().chain(&a) {
        let t = theta(phi)?;
        cases.push(eq_case(&ricci13(&t), &phi.scale(&int(-(m + 2))), "rho13 theta"));
        member.push(ok_if(is_kaehler_curvature(&t) && has_first_pair_parity(&t, 1), || "not in K+".into()));
    }
    run.prop(format!("rho13 theta phi = {} phi", -(m + 2)), cases);
    run.prop("theta lands in K+", member);
    let bad = random_element::<Bilinear>(&basis_bilinear_family(run.space, BilinearFamily::SymMinus), &mut run.rng);
    let rejected = bad.is_zero() || matches!(theta(&bad), Err(KdecError::WrongParity(_)));
    run.prop("theta rejects S2-", vec![ok_if(rejected, || "accepted".into())]);
    // rho13 is not GL*-equivariant: one explicit witness suffices.
    if run.space.m() >= 4 {
        let basis = kahler_ricci_flat(run.space, 1);
        let found = (0..16).any(|_| {
            let t: Tensor4 = random_element(&basis, &mut run.rng);
            let g = random_gl_star(run.rng.gen(), run.space, Chi::Plus);
            let lhs = ricci13(&pullback_tensor(&g, &t).unwrap());
            let rhs = pullback_bilinear(&g, &ricci13(&t)).unwrap();
            lhs != rhs
        });
        run.prop("rho13 fails GL* equivariance for some element", vec![ok_if(found, || "no witness".into())]);
    }
    Ok(())
}

fn catalog_projection(s: &Subspace, a: &Tensor4) -> Tensor4 {
    s.project(a).expect("tensor subspace")
}

fn lemma32(run: &mut Run) -> Result<()> {
    let flat = kahler_ricci_flat(run.space, 1);
    let w7 = crate::spaces::w_space(run.space, 7)?;
    let w8 = crate::spaces::w_space(run.space, 8)?;
    let samples = run.tensors(&flat);
    let mut ricci_cases = Vec::new();
    let mut idem = Vec::new();
    let mut gram = Vec::new();
    let mut member = Vec::new();
    for a in &samples {
        let p7 = pi7(a)?;
        let p8 = pi8(a)?;
        let r = ricci13(a);
        ricci_cases.push(eq_case(&ricci13(&p7), &sym_trace_free_part(&r), "rho13 pi7"));
        ricci_cases.push(eq_case(&ricci13(&p8), &alt_trace_free_part(&r), "rho13 pi8"));
        ricci_cases.push(ok_if(ricci(&p7).is_zero() && ricci(&p8).is_zero(), || "rho nonzero".into()));
        idem.push(eq_case(&pi7(&p7)?, &p7, "pi7 idempotent"));
        idem.push(eq_case(&pi8(&p8)?, &p8, "pi8 idempotent"));
        gram.push(eq_case(&p7, &catalog_projection(&w7, a), "pi7 vs Gram"));
        gram.push(eq_case(&p8, &catalog_projection(&w8, a), "pi8 vs Gram"));
        member.push(ok_if(w7.contains(&p7)? && w8.contains(&p8)?, || "image outside W".into()));
    }
    run.prop("rho13 pi7 = sym part, rho13 pi8 = alt part, rho pi = 0", ricci_cases);
    run.prop("pi7, pi8 idempotent", idem);
    run.prop("pi7, pi8 equal Gram projections onto W7, W8", gram);
    run.prop("pi7, pi8 land in W7, W8", member);
    let outside: Tensor4 = random_element(&basis_kahler_pm(run.space, -1), &mut run.rng);
    let rejected = outside.is_zero() || matches!(pi7(&outside), Err(KdecError::DomainViolation(_)));
    run.prop("pi7 rejects K-", vec![ok_if(rejected, || "accepted".into())]);
    Ok(())
}

fn lemma41(run: &mut Run) -> Result<()> {
    let flat = kahler_ricci_flat(run.space, 1);
    let anything: Vec<Tensor4> = (0..run.opts.samples)
        .map(|_| Tensor4::from_fn(run.space.m(), |_, _, _, _| int(run.rng.gen_range(-2..=2))))
        .collect();
    run.prop(
        "T^2 = -id",
        anything.iter().map(|a| eq_case(&conjugate(&conjugate(a)), &-a, "T^2")).collect(),
    );
    let samples = run.tensors(&flat);
    let mut iso = Vec::new();
    for (a, b) in samples.iter().zip(samples.iter().skip(1)) {
        iso.push(eq_case(&inner_product(&conjugate(a), &conjugate(b))?, &inner_product(a, b)?, "isometry"));
    }
    run.prop("T is an isometry", iso);
    run.prop(
        "T preserves K+ ∩ ker rho",
        samples.iter().map(|a| ok_if(flat.contains(&conjugate(a)).unwrap(), || "left".into())).collect(),
    );
    run.prop(
        "rho13 T = T rho13",
        samples.iter().map(|a| eq_case(&ricci13(&conjugate(a)), &ricci13(a).conjugate(), "rho13")).collect(),
    );
    let gs = run.gl_elements();
    let mut cases = Vec::new();
    for g in &gs {
        let chi = int(g.chi().sign() as i64);
        for a in samples.iter().take(2) {
            let lhs = conjugate(&pullback_tensor(g, a)?);
            let rhs = pullback_tensor(g, &conjugate(a))?.scale(&chi);
            cases.push(eq_case(&lhs, &rhs, "T intertwining"));
        }
    }
    run.prop("T(g.A) = chi(g) g.(TA)", cases);
    for (src, dst) in [(9u8, 10u8), (10, 9), (7, 8), (8, 7), (11, 11)] {
        let s = crate::spaces::w_space(run.space, src)?;
        let d = crate::spaces::w_space(run.space, dst)?;
        let cases = s
            .elements::<Tensor4>()?
            .iter()
            .map(|b| ok_if(d.contains(&conjugate(b)).unwrap(), || format!("T(W{src}) not in W{dst}")))
            .collect();
        run.prop(format!("T maps W{src} into W{dst}"), cases);
    }
    Ok(())
}

fn lemma43(run: &mut Run) -> Result<()> {
    let flat = kahler_ricci_flat(run.space, 1);
    let ws: Vec<Subspace> = (7..=11).map(|i| crate::spaces::w_space(run.space, i)).collect::<Result<_>>()?;
    let samples = run.tensors(&flat);
    let mut sums = Vec::new();
    let mut gram = Vec::new();
    let mut idem = Vec::new();
    let mut printed = Vec::new();
    for a in &samples {
        let parts = kplus_flat_projections(a)?;
        let mut total = Tensor4::zeros(a.m());
        for p in &parts {
            total = &total + p;
        }
        sums.push(eq_case(&total, a, "sum of projections"));
        for (i, (p, w)) in parts.iter().zip(&ws).enumerate() {
            gram.push(eq_case(p, &catalog_projection(w, a), &format!("pi{} vs Gram", i + 7)));
            let again = kplus_flat_projections(p)?;
            for (j, q) in again.iter().enumerate() {
                let want = if i == j { p.clone() } else { Tensor4::zeros(a.m()) };
                idem.push(eq_case(q, &want, &format!("pi{} pi{}", j + 7, i + 7)));
            }
        }
        printed.push(eq_case(&pi10_printed(a), &pi10_formula(a), "printed pi10"));
        let t = conjugate(a);
        printed.push(eq_case(&pi10_formula(a), &-conjugate(&crate::maps::pi9_formula(&t)), "-T pi9 T"));
    }
    run.prop("pi7 + ... + pi11 = id", sums);
    run.prop("projections equal Gram projections onto W7..W11", gram);
    run.prop("projections idempotent and pairwise annihilating", idem);
    run.prop("printed pi10 formula equals -T pi9 T", printed);
    // Closed pi9 formula on its stated domain: rho13 in L2_0+.
    let mut domain = Vec::new();
    for a in &samples {
        let b = a - &pi7(a)?;
        if BilinearFamily::AltPlusTraceFree.contains(&ricci13(&b)) {
            domain.push(eq_case(&crate::maps::pi9_formula(&b), &catalog_projection(&ws[2], &b), "pi9 formula"));
        }
    }
    run.prop("closed pi9 formula is the W9 projection when rho13 is alternating", domain);
    Ok(())
}

fn theorem15(run: &mut Run) -> Result<()> {
    let space = run.space;
    let n = space.n();
    let m = space.m();
    let cat = SpaceCatalog::new(space)?;
    let dims: Vec<usize> = (7..=12).map(|i| cat.w(i).map(Subspace::dim)).collect::<Result<_>>()?;
    let fam = |f| basis_bilinear_family(space, f).dim();
    let flat = dims[..5].iter().sum::<usize>();
    let kminus = fam(BilinearFamily::AltMinus) + fam(BilinearFamily::SymMinus) + dims[5];
    run.prop(
        "dim K+ ∩ ker rho = sum of W7..W11",
        vec![eq_case(&cat.kplus_flat.dim(), &flat, "dims")],
    );
    run.prop("dim K- = dim L2- + dim S2- + dim W12", vec![eq_case(&cat.kahler_minus.dim(), &kminus, "dims")]);
    let plus = 1 + 1 + fam(BilinearFamily::SymPlusTraceFree) + fam(BilinearFamily::AltPlusTraceFree) + flat;
    run.prop("dim K+ = 2 + dim S2_0+ + dim L2_0+ + dim K+ ∩ ker rho", vec![eq_case(&cat.kahler_plus.dim(), &plus, "dims")]);
    run.prop(
        "dim A = m^2(m^2-1)/3",
        vec![eq_case(&basis_affine(space).dim(), &(m * m * (m * m - 1) / 3), "dims")],
    );
    run.prop(
        "family dimensions (n^2, n(n+1), n^2, n(n-1))",
        vec![eq_case(
            &[
                fam(BilinearFamily::SymPlus),
                fam(BilinearFamily::SymMinus),
                fam(BilinearFamily::AltPlus),
                fam(BilinearFamily::AltMinus),
            ],
            &[n * n, n * (n + 1), n * n, n * (n - 1)],
            "dims",
        )],
    );
    let kahler = basis_kahler(space);
    let samples = run.tensors(&kahler);
    let us = run.unitary_elements();
    let mut round = Vec::new();
    let mut orth = Vec::new();
    let mut member = Vec::new();
    let mut equiv = Vec::new();
    let mut ricci_split = Vec::new();
    for a in &samples {
        let d = decompose(a)?;
        let mut total = Tensor4::zeros(m);
        for (_, c) in &d.components {
            total = &total + c;
        }
        round.push(ok_if(total == *a && d.residual.is_zero(), || "components do not re-sum".into()));
        for (i, (li, ci)) in d.components.iter().enumerate() {
            member.push(ok_if(li.is_member(ci), || format!("{li} component fails membership")));
            for (lj, cj) in &d.components[i + 1..] {
                let ip = inner_product(ci, cj)?;
                orth.push(ok_if(num_traits::Zero::is_zero(&ip), || format!("<{li},{lj}> = {}", format_q(&ip))));
            }
        }
        for g in &us {
            let dg = decompose(&pullback_tensor(g, a)?)?;
            for ((l, c), (_, cg)) in d.components.iter().zip(&dg.components) {
                equiv.push(eq_case(cg, &pullback_tensor(g, c)?, &format!("{l} equivariance")));
            }
        }
        let (plus, minus) = crate::tensor::parity_split_tensor(a)?;
        for part in [plus, minus] {
            let s = split_ricci(&part)?;
            ricci_split.push(ok_if(ricci(&s.remainder).is_zero(), || "remainder has Ricci".into()));
        }
    }
    run.prop("components sum to the input, residual zero", round);
    run.prop("components pairwise orthogonal", orth);
    run.prop("components pass membership predicates", member);
    run.prop("decomposition commutes with unitary pullbacks", equiv);
    run.prop("Ricci split leaves a Ricci-flat remainder", ricci_split);
    let w12 = cat.w(12)?;
    let minus_flat = kahler_ricci_flat(space, -1);
    run.prop("K- ∩ ker rho = W12", vec![ok_if(minus_flat.same_as(w12), || "differ".into())]);
    Ok(())
}

fn section5(run: &mut Run) -> Result<()> {
    for section in Section::ALL {
        if section == Section::S3 && run.space.m() < 6 {
            run.prop(format!("{section} replay (skipped, needs m >= 6)"), Vec::new());
            continue;
        }
        let report = replay_section(section, run.space)?;
        let cases = report
            .checks
            .iter()
            .filter(|c| c.status == CheckStatus::Pass || c.status == CheckStatus::Fail)
            .map(|c| {
                ok_if(c.status == CheckStatus::Pass, || format!("{}: got {}, expected {}", c.name, c.value, c.expected))
            })
            .collect();
        run.prop(format!("{section} replay"), cases);
    }
    Ok(())
}

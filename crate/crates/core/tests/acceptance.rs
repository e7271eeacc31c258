//! Acceptance criteria AC1-AC8. Prints one `[PASS]`/`[FAIL]` line per criterion.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use kdec::hermitian::{conjugation, make_group_element, make_space, random_gl_star, random_unitary, Chi, HermitianSpace};
use kdec::linalg::Matrix;
use kdec::maps::{conjugate, decompose, kplus_flat_projections, ricci13};
use kdec::rational::{format_q, int, parse_q, Q};
use kdec::spaces::{
    basis_affine, basis_bilinear_family, kahler_ricci_flat, BilinearFamily, SpaceCatalog, Subspace,
};
use kdec::tensor::{inner_product, Relation, pullback_bilinear, pullback_tensor, Bilinear, Tensor4};
use kdec::verify::{random_element, run_suite, Suite, VerifyOptions};
use kdec::witness::{c2, replay_section, witness_w9, Section};
use kdec::KdecError;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn space(n: usize) -> HermitianSpace {
    make_space(n).unwrap()
}

fn suite_passes(suite: Suite, n: usize, opts: VerifyOptions) -> Result<(), String> {
    let r = run_suite(suite, &space(n), 2024, opts).map_err(|e| e.to_string())?;
    match r.properties.iter().find(|p| !p.passed) {
        None => Ok(()),
        Some(p) => Err(format!("{suite} m={}: {} ({})", 2 * n, p.name, p.detail)),
    }
}

fn ac1() -> Outcome {
    let opts = VerifyOptions { samples: 50, group_elements: 2 };
    for n in [2, 3, 4] {
        suite_passes(Suite::Lemma22, n, opts)?;
        suite_passes(Suite::Lemma31, n, opts)?;
    }
    Ok("nine identities, 50 forms per family, m = 4, 6, 8".into())
}

/// Matrix of a linear map on `s` in the coordinates of its basis.
fn matrix_of(s: &Subspace, f: impl Fn(&Tensor4) -> Tensor4) -> Result<Matrix, String> {
    let basis: Vec<Tensor4> = s.elements().unwrap();
    let mut cols = Vec::new();
    for b in &basis {
        let c = s.coordinates(&f(b)).unwrap().ok_or("image leaves the subspace")?;
        cols.push(c);
    }
    let d = s.dim();
    Ok(Matrix::from_fn(d, d, |r, c| cols[c][r].clone()))
}

fn ac2() -> Outcome {
    for n in [2, 3] {
        let sp = space(n);
        let flat = kahler_ricci_flat(&sp, 1);
        let cat = SpaceCatalog::new(&sp).unwrap();
        let d = flat.dim();
        let mats: Vec<Matrix> = (0..5)
            .map(|i| matrix_of(&flat, |a| kplus_flat_projections(a).unwrap()[i].clone()))
            .collect::<Result<_, _>>()?;
        let mut total = Matrix::zeros(d, d);
        for (i, p) in mats.iter().enumerate() {
            total = total.add(p);
            ensure(p.mul(p) == *p, || format!("pi{} not idempotent at m={}", i + 7, 2 * n))?;
            for (j, q) in mats.iter().enumerate() {
                ensure(i == j || p.mul(q).is_zero(), || format!("pi{} pi{} != 0", i + 7, j + 7))?;
            }
            let w = cat.w(i as u8 + 7).unwrap();
            let gram = matrix_of(&flat, |a| w.project(a).unwrap())?;
            ensure(gram == *p, || format!("pi{} differs from Gram projection at m={}", i + 7, 2 * n))?;
        }
        ensure(total.is_identity(), || format!("projections do not sum to id at m={}", 2 * n))?;
    }
    Ok("full bases of dimension 16 and 90".into())
}

fn ac3() -> Outcome {
    let mut elements = 0;
    for n in [2, 3] {
        let sp = space(n);
        let flat = kahler_ricci_flat(&sp, 1);
        let basis: Vec<Tensor4> = flat.elements().unwrap();
        for b in &basis {
            ensure(conjugate(&conjugate(b)) == -b, || "T^2 != -id".into())?;
        }
        let tb: Vec<Tensor4> = basis.iter().map(conjugate).collect();
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate().skip(i) {
                let lhs = inner_product(&tb[i], &tb[j]).unwrap();
                ensure(lhs == inner_product(x, y).unwrap(), || "T is not an isometry".into())?;
            }
        }
        let cat = SpaceCatalog::new(&sp).unwrap();
        for (src, dst) in [(9u8, 10u8), (10, 9), (7, 8), (8, 7), (11, 11)] {
            for b in cat.w(src).unwrap().elements::<Tensor4>().unwrap() {
                ensure(cat.w(dst).unwrap().contains(&conjugate(&b)).unwrap(), || {
                    format!("T(W{src}) not in W{dst} at m={}", 2 * n)
                })?;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut minus = 0;
        for k in 0..20u64 {
            let chi = if k % 2 == 0 { Chi::Plus } else { Chi::Minus };
            let g = if k < 14 { random_gl_star(100 + k, &sp, chi) } else { random_unitary(100 + k, &sp, chi) };
            minus += usize::from(g.chi() == Chi::Minus);
            let a: Tensor4 = random_element(&flat, &mut rng);
            let lhs = conjugate(&pullback_tensor(&g, &a).unwrap());
            let rhs = pullback_tensor(&g, &conjugate(&a)).unwrap().scale(&int(g.chi().sign() as i64));
            ensure(lhs == rhs, || format!("intertwining fails for element {k} at m={}", 2 * n))?;
            elements += 1;
        }
        ensure(minus >= 1, || "no chi = -1 element".into())?;
    }
    Ok(format!("{elements} group elements, both chi signs"))
}

fn ac4() -> Outcome {
    let mut count = 0;
    for n in [2, 3] {
        let sp = space(n);
        let k = kdec::spaces::basis_kahler(&sp);
        let mut rng = ChaCha8Rng::seed_from_u64(4 + n as u64);
        for t in 0..100u64 {
            let a: Tensor4 = random_element(&k, &mut rng);
            let d = decompose(&a).map_err(|e| e.to_string())?;
            let mut total = Tensor4::zeros(sp.m());
            for (i, (l, c)) in d.components.iter().enumerate() {
                total = &total + c;
                ensure(l.is_member(c), || format!("{l} membership fails"))?;
                for (l2, c2) in &d.components[i + 1..] {
                    ensure(inner_product(c, c2).unwrap().is_zero(), || format!("{l} not orthogonal to {l2}"))?;
                }
            }
            ensure(total == a && d.residual.is_zero(), || "components do not sum to input".into())?;
            for u in 0..10u64 {
                let chi = if u % 3 == 2 { Chi::Minus } else { Chi::Plus };
                let g = random_unitary(1000 * t + u + 17 * n as u64, &sp, chi);
                let dg = decompose(&pullback_tensor(&g, &a).unwrap()).unwrap();
                for ((l, c), (_, cg)) in d.components.iter().zip(&dg.components) {
                    ensure(*cg == pullback_tensor(&g, c).unwrap(), || format!("{l} not equivariant"))?;
                }
            }
            count += 1;
        }
    }
    Ok(format!("{count} tensors, 10 unitary pullbacks each"))
}

/// Independent dimension of the affine curvature space: unknowns `A_ijkl`
/// with `i < j`, Bianchi rows, rank modulo a large prime.
fn affine_dim_oracle(m: usize) -> usize {
    const P: u64 = 2_147_483_647;
    let mut var = BTreeMap::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in 0..m {
                for l in 0..m {
                    let next = var.len();
                    var.insert((i, j, k, l), next);
                }
            }
        }
    }
    let coef = |i: usize, j: usize, k: usize, l: usize| -> Option<(usize, u64)> {
        if i == j {
            None
        } else if i < j {
            Some((var[&(i, j, k, l)], 1))
        } else {
            Some((var[&(j, i, k, l)], P - 1))
        }
    };
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                for l in 0..m {
                    let mut row = vec![0u64; var.len()];
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        if let Some((v, s)) = coef(a, b, c, l) {
                            row[v] = (row[v] + s) % P;
                        }
                    }
                    rows.push(row);
                }
            }
        }
    }
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % P;
            }
            b = b * b % P;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for col in 0..var.len() {
        let Some(pr) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else { continue };
        rows.swap(rank, pr);
        let inv = pow(rows[rank][col], P - 2);
        let pivot = rows[rank].clone();
        for r in rank + 1..rows.len() {
            let f = rows[r][col] * inv % P;
            if f != 0 {
                for (x, p) in rows[r].iter_mut().zip(&pivot) {
                    *x = (*x + P - f * p % P) % P;
                }
            }
        }
        rank += 1;
    }
    var.len() - rank
}

fn ac5() -> Outcome {
    for n in [1, 2, 3] {
        let m = 2 * n;
        let dim = basis_affine(&space(n)).dim();
        ensure(dim == m * m * (m * m - 1) / 3, || format!("dim A = {dim} at m={m}"))?;
        ensure(dim == affine_dim_oracle(m), || format!("dim A disagrees with the rank oracle at m={m}"))?;
    }
    for n in 1..=4 {
        let sp = space(n);
        let fam = |f| basis_bilinear_family(&sp, f).dim();
        let got = [
            fam(BilinearFamily::SymPlus),
            fam(BilinearFamily::SymMinus),
            fam(BilinearFamily::AltPlus),
            fam(BilinearFamily::AltMinus),
        ];
        ensure(got == [n * n, n * (n + 1), n * n, n * (n - 1)], || format!("family dims {got:?} at n={n}"))?;
    }
    for n in [2, 3, 4] {
        let sp = space(n);
        let cat = SpaceCatalog::new(&sp).unwrap();
        let w: Vec<usize> = (7..=12).map(|i| cat.w(i).unwrap().dim()).collect();
        let fam = |f| basis_bilinear_family(&sp, f).dim();
        ensure(cat.kplus_flat.dim() == w[..5].iter().sum::<usize>(), || format!("K+ ∩ ker rho sum at n={n}"))?;
        let minus = fam(BilinearFamily::AltMinus) + fam(BilinearFamily::SymMinus) + w[5];
        ensure(cat.kahler_minus.dim() == minus, || format!("K- sum at n={n}"))?;
        let plus = 2 + fam(BilinearFamily::SymPlusTraceFree) + fam(BilinearFamily::AltPlusTraceFree) + cat.kplus_flat.dim();
        ensure(cat.kahler_plus.dim() == plus, || format!("K+ sum at n={n}"))?;
        ensure(w[0] == fam(BilinearFamily::SymPlusTraceFree) && w[1] == fam(BilinearFamily::AltPlusTraceFree), || {
            "W7, W8 dimensions".into()
        })?;
        if n == 2 {
            ensure(w[4] == 0 && w[5] == 0, || format!("W11, W12 = {}, {} at m=4", w[4], w[5]))?;
        }
    }
    Ok("dims and sum identities at m = 2..8".into())
}

/// `c_2` evaluated straight from the defining formulas with explicit vectors.
fn c2_oracle(n: usize) -> Q {
    let m = 2 * n;
    let jm = |v: &[Q]| -> Vec<Q> {
        let mut out = vec![Q::zero(); m];
        for p in 0..n {
            out[2 * p + 1] = v[2 * p].clone();
            out[2 * p] = -v[2 * p + 1].clone();
        }
        out
    };
    let unit = |i: usize| -> Vec<Q> { (0..m).map(|k| if k == i { Q::one() } else { Q::zero() }).collect() };
    let ip = |a: &[Q], b: &[Q]| a.iter().zip(b).fold(Q::zero(), |s, (x, y)| s + x * y);
    let mut phi = vec![vec![Q::zero(); m]; m];
    for (a, b) in [(0, 2), (2, 0), (1, 3), (3, 1)] {
        phi[a][b] = Q::one();
    }
    let f = |a: &[Q], b: &[Q]| {
        let mut s = Q::zero();
        for i in 0..m {
            for j in 0..m {
                s += &a[i] * &phi[i][j] * &b[j];
            }
        }
        s
    };
    let (x, y, z, w) = (unit(2), unit(3), unit(2), unit(1));
    let two = int(2);
    let sigma1 = f(&x, &z) * ip(&y, &w) - f(&y, &z) * ip(&x, &w) - f(&x, &jm(&z)) * ip(&jm(&y), &w)
        + f(&y, &jm(&z)) * ip(&jm(&x), &w)
        - &two * f(&x, &jm(&y)) * ip(&jm(&z), &w);
    let theta = f(&x, &w) * ip(&y, &z) - f(&y, &w) * ip(&x, &z) + f(&x, &jm(&w)) * ip(&y, &jm(&z))
        - f(&y, &jm(&w)) * ip(&x, &jm(&z))
        - &two * f(&z, &jm(&w)) * ip(&x, &jm(&y));
    let mm = m as i64;
    -(two * sigma1 + int(mm + 2) * theta) / int(mm * (mm + 4))
}

fn ac6() -> Outcome {
    let golden: BTreeMap<String, String> =
        serde_json::from_str(include_str!("golden/c2.json")).map_err(|e| e.to_string())?;
    for n in [2, 3, 4] {
        let want = parse_q(&golden[&(2 * n).to_string()]).unwrap();
        ensure(c2_oracle(n) == want, || format!("oracle c2 disagrees with golden at m={}", 2 * n))?;
        ensure(c2(&space(n)).unwrap() == want, || format!("library c2 disagrees with golden at m={}", 2 * n))?;
    }
    let mut checks = 0;
    for n in [2, 3] {
        for section in Section::ALL {
            if section == Section::S3 && n < 3 {
                continue;
            }
            let r = replay_section(section, &space(n)).map_err(|e| e.to_string())?;
            if let Some(c) = r.failures().next() {
                return Err(format!("{section} m={}: {} = {} (want {})", 2 * n, c.name, c.value, c.expected));
            }
            checks += r.checks.len();
        }
    }
    let r = replay_section(Section::S2, &space(2)).unwrap();
    ensure(r.value("c2") == Some("3/4"), || "c2 at m=4".into())?;
    Ok(format!("{checks} replayed checks, c2 golden at m = 4, 6, 8"))
}

fn ac7() -> Outcome {
    let sp = space(2);
    let a = witness_w9(&sp).unwrap();
    let mut mat = Matrix::identity(4);
    mat[(0, 0)] = int(2);
    mat[(1, 1)] = int(2);
    let g = make_group_element(&sp, mat).unwrap();
    ensure(!g.is_unitary(), || "element is unitary".into())?;
    let lhs = ricci13(&pullback_tensor(&g, &a).unwrap());
    let rhs = pullback_bilinear(&g, &ricci13(&a)).unwrap();
    ensure(lhs != rhs, || "rho13 commuted with the scaling".into())?;
    let affine = basis_affine(&sp);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bad: Tensor4 = random_element(&affine, &mut rng);
    match decompose(&bad) {
        Err(KdecError::NotKaehler(msg)) => {
            let rel = Relation::Kaehler.to_string();
            ensure(msg.contains(&rel), || format!("violation not identified: {msg}"))?;
            Ok(format!("rho13 vs diag(2,2,1,1); rejected: {msg}"))
        }
        other => Err(format!("non-Kähler tensor accepted: {:?}", other.map(|_| ()))),
    }
}

fn ac8() -> Outcome {
    let sp = space(3);
    let fam = |f| basis_bilinear_family(&sp, f);
    let dims = [
        ("K+ ∩ ker rho", kahler_ricci_flat(&sp, 1).dim()),
        ("K- ∩ ker rho", kahler_ricci_flat(&sp, -1).dim()),
        ("S2+", fam(BilinearFamily::SymPlus).dim()),
        ("S2-", fam(BilinearFamily::SymMinus).dim()),
        ("L2+", fam(BilinearFamily::AltPlus).dim()),
        ("L2-", fam(BilinearFamily::AltMinus).dim()),
    ];
    for (i, (a, da)) in dims.iter().enumerate() {
        for (b, db) in &dims[i + 1..] {
            let exempt = (*a, *b) == ("S2+", "L2+");
            ensure(exempt || da != db, || format!("dim {a} = dim {b} = {da}"))?;
        }
    }
    // S2+ and L2+ share a dimension; the conjugation has opposite traces on them.
    let kappa = conjugation(&sp);
    let trace = |s: &Subspace| -> Q {
        let basis: Vec<Bilinear> = s.elements().unwrap();
        basis
            .iter()
            .enumerate()
            .map(|(i, b)| s.coordinates(&pullback_bilinear(&kappa, b).unwrap()).unwrap().unwrap()[i].clone())
            .fold(Q::zero(), |x, y| x + y)
    };
    let (ts, ta) = (trace(&fam(BilinearFamily::SymPlus)), trace(&fam(BilinearFamily::AltPlus)));
    ensure(ts != ta, || "conjugation does not separate S2+ and L2+".into())?;
    Ok(format!("{dims:?}; conjugation traces {} vs {}", format_q(&ts), format_q(&ta)))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] =
        [("AC1", ac1), ("AC2", ac2), ("AC3", ac3), ("AC4", ac4), ("AC5", ac5), ("AC6", ac6), ("AC7", ac7), ("AC8", ac8)];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("[PASS] {name} ({secs:.1}s) {msg}"),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] {name} ({secs:.1}s) {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

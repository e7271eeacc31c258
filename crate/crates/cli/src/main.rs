//! `kdec` command-line front end.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use kdec::document::{DocumentKind, TensorDocument};
use kdec::hermitian::{basis_label, make_space};
use kdec::maps::{decompose, ricci, ricci13, traces, Decomposition};
use kdec::rational::format_q;
use kdec::spaces::{basis_affine, basis_bilinear_family, basis_kahler, basis_kahler_pm, BilinearFamily, SpaceCatalog};
use kdec::tensor::{inner_product, Bilinear, Tensor4};
use kdec::verify::{run_suite, Suite, VerifyOptions};
use kdec::witness::{replay_section, CheckStatus, Section};
use kdec::KdecError;

const DEFAULT_MAX_M: usize = 8;

#[derive(Parser)]
#[command(name = "kdec", version, about = "Exact decomposition of affine Kähler curvature tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension table of every module, with the sum checks
    Dims {
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
    /// Run a property suite
    Verify {
        /// lemma2.2, lemma3.1, lemma3.2, lemma4.1, lemma4.3, theorem1.5, section5 or all
        suite: String,
        /// Complex dimension
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random samples per property
        #[arg(long, default_value_t = VerifyOptions::default().samples)]
        samples: usize,
        /// Print the JSON report on stdout (summary goes to stderr)
        #[arg(long)]
        json: bool,
    },
    /// Split a Kähler curvature tensor into its twelve components
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Replay one witness construction (5.1 to 5.5)
    Witness {
        section: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
}

/// Failure carrying its exit code.
struct Exit(u8, String);

impl Exit {
    fn usage(msg: impl Into<String>) -> Self {
        Exit(2, msg.into())
    }
}

fn max_m() -> Result<usize, Exit> {
    match std::env::var("KDEC_MAX_M") {
        Err(_) => Ok(DEFAULT_MAX_M),
        Ok(v) => v.trim().parse().map_err(|_| Exit::usage(format!("KDEC_MAX_M=`{v}` is not a number"))),
    }
}

fn check_cap(m: usize) -> Result<(), Exit> {
    let cap = max_m()?;
    if m > cap {
        return Err(Exit::usage(format!("m = {m} exceeds the cap {cap} (raise KDEC_MAX_M)")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Dims { n_min, n_max } => cmd_dims(n_min, n_max),
        Command::Verify { suite, n, seed, samples, json } => cmd_verify(&suite, n, seed, samples, json),
        Command::Decompose { input, output } => cmd_decompose(&input, &output),
        Command::Witness { section, n, json } => cmd_witness(&section, n, json),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn cmd_dims(n_min: usize, n_max: usize) -> Result<u8, Exit> {
    if n_min < 1 || n_max < n_min {
        return Err(Exit::usage(format!("bad range n = {n_min}..={n_max}")));
    }
    check_cap(2 * n_max)?;
    let mut all_ok = true;
    for n in n_min..=n_max {
        let space = make_space(n).map_err(|e| Exit::usage(e.to_string()))?;
        let m = space.m();
        let fam = |f| basis_bilinear_family(&space, f).dim();
        println!("n = {n}, m = {m}");
        println!("  {:<14} {}", "A", basis_affine(&space).dim());
        for f in BilinearFamily::ALL {
            println!("  {:<14} {}", f.name(), fam(f));
        }
        if m < 4 {
            for name in ["K", "K+", "K-", "W7..W12"] {
                println!("  {name:<14} below theorem range (m < 4)");
            }
            println!();
            continue;
        }
        let cat = SpaceCatalog::new(&space).map_err(|e| Exit(1, e.to_string()))?;
        let k = basis_kahler(&space).dim();
        let kp = basis_kahler_pm(&space, 1).dim();
        let km = basis_kahler_pm(&space, -1).dim();
        println!("  {:<14} {k}", "K");
        println!("  {:<14} {kp}", "K+");
        println!("  {:<14} {km}", "K-");
        println!("  {:<14} {}", "K+ ∩ ker rho", cat.kplus_flat.dim());
        let w: Vec<usize> = (7..=12).map(|i| cat.w(i).map(|s| s.dim()).unwrap_or(0)).collect();
        for (i, d) in w.iter().enumerate() {
            println!("  {:<14} {d}", format!("W{}", i + 7));
        }
        let s0 = fam(BilinearFamily::SymPlusTraceFree);
        let l0 = fam(BilinearFamily::AltPlusTraceFree);
        let sm = fam(BilinearFamily::SymMinus);
        let lm = fam(BilinearFamily::AltMinus);
        let flat: usize = w[..5].iter().sum();
        let checks = [
            ("K = K+ + K-", k, kp + km),
            ("K+ ∩ ker rho = W7 + ... + W11", cat.kplus_flat.dim(), flat),
            ("K+ = 2 + S2_0+ + L2_0+ + K+ ∩ ker rho", kp, 2 + s0 + l0 + cat.kplus_flat.dim()),
            ("K- = L2- + S2- + W12", km, lm + sm + w[5]),
            ("W7 = S2_0+", w[0], s0),
            ("W8 = L2_0+", w[1], l0),
            ("K = 2 + 2 S2_0+ + 2 L2_0+ + L2- + S2- + W9..W12", k, 2 + 2 * s0 + 2 * l0 + lm + sm + w[2..].iter().sum::<usize>()),
        ];
        for (name, lhs, rhs) in checks {
            let ok = lhs == rhs;
            all_ok &= ok;
            println!("  [{}] {name}: {lhs} = {rhs}", if ok { "ok" } else { "FAIL" });
        }
        println!();
    }
    Ok(if all_ok { 0 } else { 1 })
}

fn cmd_verify(suite: &str, n: usize, seed: u64, samples: usize, json: bool) -> Result<u8, Exit> {
    let suite: Suite = suite.parse().map_err(|e: KdecError| Exit::usage(e.to_string()))?;
    if n == 0 {
        return Err(Exit::usage("n must be at least 1"));
    }
    check_cap(2 * n)?;
    let space = make_space(n).map_err(|e| Exit::usage(e.to_string()))?;
    let opts = VerifyOptions { samples, ..VerifyOptions::default() };
    let report = run_suite(suite, &space, seed, opts).map_err(|e| match e {
        KdecError::DimensionTooSmall { .. } => Exit::usage(e.to_string()),
        other => Exit(1, other.to_string()),
    })?;
    let mut summary = String::new();
    for p in &report.properties {
        let mark = if p.passed { "PASS" } else { "FAIL" };
        summary.push_str(&format!("[{mark}] {} :: {} ({} cases)", p.suite, p.name, p.cases));
        if !p.passed {
            summary.push_str(&format!(" {}", p.detail));
        }
        summary.push('\n');
    }
    let failed = report.properties.iter().filter(|p| !p.passed).count();
    summary.push_str(&format!(
        "{}: {} properties, {failed} failed (m = {}, seed = {seed})\n",
        report.suite,
        report.properties.len(),
        report.m
    ));
    if json {
        eprint!("{summary}");
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{summary}");
    }
    Ok(if report.passed { 0 } else { 1 })
}

fn bilinear_json(phi: &Bilinear) -> Value {
    let m = phi.m();
    Value::Array((0..m).map(|i| Value::Array((0..m).map(|j| json!(format_q(phi.get(i, j)))).collect())).collect())
}

fn entries_json(a: &Tensor4) -> Value {
    Value::Array(a.nonzero_entries().map(|(ix, v)| json!([ix, format_q(v)])).collect())
}

fn norm2(a: &Tensor4) -> String {
    format_q(&inner_product(a, a).expect("same space"))
}

fn decomposition_json(doc: &TensorDocument, d: &Decomposition) -> Value {
    let (tau, tau_j) = traces(&d.input);
    let components: Vec<Value> = d
        .components
        .iter()
        .map(|(l, c)| json!({"label": l.name(), "norm2": norm2(c), "entries": entries_json(c)}))
        .collect();
    json!({
        "m": d.input.m(),
        "basis": (0..d.input.m()).map(basis_label).collect::<Vec<_>>(),
        "metadata": doc.metadata(),
        "tau": format_q(&tau),
        "tau_J": format_q(&tau_j),
        "rho": bilinear_json(&ricci(&d.input)),
        "rho13": bilinear_json(&ricci13(&d.input)),
        "components": components,
        "residual": {"norm2": norm2(&d.residual), "entries": entries_json(&d.residual)},
    })
}

fn cmd_decompose(input: &PathBuf, output: &PathBuf) -> Result<u8, Exit> {
    let text = fs::read_to_string(input).map_err(|e| Exit::usage(format!("{}: {e}", input.display())))?;
    let doc = TensorDocument::parse(&text).map_err(|e| Exit::usage(e.to_string()))?;
    if doc.kind() != DocumentKind::Tensor4 {
        return Err(Exit::usage("decompose needs a tensor4 document"));
    }
    check_cap(doc.m())?;
    let a = doc.to_tensor().map_err(|e| Exit::usage(e.to_string()))?;
    let d = decompose(&a).map_err(|e| match e {
        KdecError::NotKaehler(_) => Exit(3, e.to_string()),
        other => Exit::usage(other.to_string()),
    })?;
    let out = serde_json::to_string_pretty(&decomposition_json(&doc, &d)).expect("report serializes");
    fs::write(output, out + "\n").map_err(|e| Exit(1, format!("{}: {e}", output.display())))?;
    for (l, c) in &d.components {
        println!("{:<14} {}", l.name(), norm2(c));
    }
    println!("{:<14} {}", "residual", norm2(&d.residual));
    Ok(0)
}

fn cmd_witness(section: &str, n: usize, json: bool) -> Result<u8, Exit> {
    let section: Section = section.parse().map_err(|e: KdecError| Exit::usage(e.to_string()))?;
    if n == 0 {
        return Err(Exit::usage("n must be at least 1"));
    }
    check_cap(2 * n)?;
    let space = make_space(n).map_err(|e| Exit::usage(e.to_string()))?;
    let report = replay_section(section, &space).map_err(|e| Exit::usage(e.to_string()))?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        for c in &report.checks {
            let mark = match c.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skipped => "SKIP",
                CheckStatus::Info => "INFO",
            };
            let expected = if c.expected.is_empty() { String::new() } else { format!(" (expected {})", c.expected) };
            println!("[{mark}] {} {} = {}{expected}", c.section, c.name, c.value);
        }
    }
    Ok(if report.passed() { 0 } else { 1 })
}

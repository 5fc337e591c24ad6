//! `grushin` — batch verification jobs and tables for the grushin-core
//! library, with machine-readable (JSON/CSV) reports.
//!
//! Exit codes: 0 all pass-criteria hold, 1 usage error, 2 a verified bound
//! failed, 3 internal error.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use grushin_core::carleman::{
    carleman_ratio, eigenrelation_residual, exponents, TestFamily,
};
use grushin_core::estimates::{
    bernstein_check, growth_fit, iin_check, j_asymptotic_check, kl1_check,
    projector_weighted_norm, unit_bound_check, BoundReport,
};
use grushin_core::fischer::{
    fischer_decompose, sl2_commutator_check, sl2_pointwise_residual, verify_proj_identity,
};
use grushin_core::harmonics::{
    addition_formula_residual, admissible_pairs, build_basis, build_basis_element, dims,
    enumerate_indices, kernel_g, HarmonicIndex,
};
use grushin_core::quadrature::{omega_inner_product, OmegaPoint};
use grushin_core::ratpoly::{apply_grushin, delta_degree, rat};
use grushin_core::{GrushinConfig, RationalPolynomial};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "grushin", version, about = "Grushin-space harmonic analysis verification jobs")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification job and report pass/fail.
    Verify {
        #[command(subcommand)]
        job: VerifyJob,
    },
    /// Emit a reference table.
    Table {
        #[command(subcommand)]
        table: TableJob,
    },
}

#[derive(Subcommand)]
enum VerifyJob {
    /// Exact Grushin-harmonicity of every basis element.
    Basis(JobArgs),
    /// Triple agreement of harmonic-space dimensions (enumeration, closed form, exact rank).
    Dims(JobArgs),
    /// Reproducing kernel vs. direct basis sum at seeded points.
    Kernel(JobArgs),
    /// Gegenbauer product/addition decomposition residuals.
    Addition(JobArgs),
    /// Orthonormality of the L²(Ω) basis within and across degrees.
    Norms(JobArgs),
    /// Orthogonal-polynomial bound suites.
    Bounds(BoundsArgs),
    /// Weighted projector norm growth in the degree.
    Projector(JobArgs),
    /// Shell decomposition of polynomial restrictions.
    Fischer(JobArgs),
    /// Exact spectral projector identities and commutators.
    Sl2(JobArgs),
    /// Eigenrelation residuals and two-sided weighted-norm ratios.
    Carleman(JobArgs),
}

#[derive(Subcommand)]
enum TableJob {
    /// Exact (p, q, r) exponent rows of the two-sided estimate.
    Exponents(ExponentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct JobArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    alpha: u32,
    /// Largest degree k in the sweep (job-specific default).
    #[arg(long)]
    kmax: Option<u32>,
    #[arg(long, default_value_t = 0)]
    kmin: u32,
    /// Weight exponent for the projector job.
    #[arg(long)]
    beta: Option<f64>,
    /// ψ-weight exponent for the carleman job.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Single s override for the carleman job (default grid 100.5, 150.5, 200.5).
    #[arg(long)]
    s: Option<f64>,
    /// Tolerance override (job-specific default).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    /// Report destination (stdout if omitted).
    #[arg(long)]
    output: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundName {
    Bernstein,
    Unit,
    Kl1,
    Dxsa1,
    Iin,
    Jasym,
    All,
}

#[derive(Args, Clone)]
struct BoundsArgs {
    #[command(flatten)]
    common: JobArgs,
    #[arg(long, value_enum, default_value = "all")]
    bound: BoundName,
    #[arg(long, default_value_t = 200)]
    nmax: u32,
    /// Chebyshev sample count per parameter axis.
    #[arg(long, default_value_t = 400)]
    grid: usize,
}

#[derive(Args, Clone)]
struct ExponentArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    alpha: u32,
    /// Sweep every covered configuration with n ≤ 6, m ≤ 4, α ≤ 4.
    #[arg(long)]
    all: bool,
    #[arg(long)]
    output: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

/// A finished job: the pass verdict, a one-line summary, and both renderings.
struct Outcome {
    pass: bool,
    summary: String,
    json: serde_json::Value,
    csv_header: Vec<String>,
    csv_rows: Vec<Vec<String>>,
}

type JobResult = Result<Outcome, Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap help/version requests are not usage errors
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let (result, args) = match cli.cmd {
        Command::Verify { job } => run_verify(job),
        Command::Table { table } => run_table(table),
    };
    match result {
        Ok(outcome) => {
            if let Err(e) = emit(&outcome, &args) {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
            eprintln!("{}", outcome.summary);
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn run_verify(job: VerifyJob) -> (JobResult, JobArgs) {
    let args = match &job {
        VerifyJob::Basis(a)
        | VerifyJob::Dims(a)
        | VerifyJob::Kernel(a)
        | VerifyJob::Addition(a)
        | VerifyJob::Norms(a)
        | VerifyJob::Projector(a)
        | VerifyJob::Fischer(a)
        | VerifyJob::Sl2(a)
        | VerifyJob::Carleman(a) => a.clone(),
        VerifyJob::Bounds(b) => b.common.clone(),
    };
    if let Some(t) = args.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = match job {
        VerifyJob::Basis(a) => job_basis(&a),
        VerifyJob::Dims(a) => job_dims(&a),
        VerifyJob::Kernel(a) => job_kernel(&a),
        VerifyJob::Addition(a) => job_addition(&a),
        VerifyJob::Norms(a) => job_norms(&a),
        VerifyJob::Bounds(b) => job_bounds(&b),
        VerifyJob::Projector(a) => job_projector(&a),
        VerifyJob::Fischer(a) => job_fischer(&a),
        VerifyJob::Sl2(a) => job_sl2(&a),
        VerifyJob::Carleman(a) => job_carleman(&a),
    };
    (result, args)
}

fn run_table(table: TableJob) -> (JobResult, JobArgs) {
    let TableJob::Exponents(a) = table;
    let args = JobArgs {
        n: a.n,
        m: a.m,
        alpha: a.alpha,
        kmax: None,
        kmin: 0,
        beta: None,
        epsilon: None,
        s: None,
        tol: None,
        seed: 0,
        threads: None,
        output: a.output.clone(),
        format: a.format,
    };
    (job_exponents(&a), args)
}

fn emit(outcome: &Outcome, args: &JobArgs) -> Result<(), Box<dyn std::error::Error>> {
    let text = match args.format {
        Format::Json => format!("{:#}\n", outcome.json),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&outcome.csv_header)?;
            for row in &outcome.csv_rows {
                w.write_record(row)?;
            }
            let data = String::from_utf8(w.into_inner().map_err(|e| {
                std::io::Error::new(std::io::ErrorKind::Other, e.to_string())
            })?)
            .expect("csv output is utf-8");
            format!("# schema_version={SCHEMA_VERSION}\n{data}")
        }
    };
    match &args.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cfg_of(a: &JobArgs) -> GrushinConfig {
    GrushinConfig::new(a.n, a.m, a.alpha)
}

fn cfg_json(cfg: GrushinConfig) -> serde_json::Value {
    json!({"n": cfg.n, "m": cfg.m, "alpha": cfg.alpha})
}

fn unit_sphere(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![if rng.gen::<bool>() { 1.0 } else { -1.0 }];
    }
    loop {
        // Box–Muller gaussians, normalized
        let v: Vec<f64> = (0..n)
            .map(|_| {
                let (u1, u2): (f64, f64) = (rng.gen_range(1e-12..1.0), rng.gen());
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

fn omega_sample(rng: &mut ChaCha8Rng, cfg: GrushinConfig) -> OmegaPoint {
    let upper = if cfg.m == 1 {
        std::f64::consts::PI
    } else {
        std::f64::consts::FRAC_PI_2
    };
    OmegaPoint {
        phi: rng.gen_range(0.05..upper - 0.05),
        omega1: unit_sphere(rng, cfg.n),
        omega2: if cfg.m == 1 {
            vec![1.0]
        } else {
            unit_sphere(rng, cfg.m)
        },
    }
}

fn job_basis(a: &JobArgs) -> JobResult {
    let cfg = cfg_of(a);
    let kmax = a.kmax.unwrap_or(12);
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut pass = true;
    for k in a.kmin..=kmax {
        for idx in enumerate_indices(cfg, k) {
            let elem = build_basis_element(cfg, idx)?;
            let harmonic = apply_grushin(&elem.cartesian, cfg).is_zero();
            let degree_ok = delta_degree(&elem.cartesian, cfg)? == k as u64;
            let ok = harmonic && degree_ok;
            pass &= ok;
            entries.push(json!({
                "k": idx.k, "ell": idx.ell, "j": idx.j, "p": idx.p, "q": idx.q,
                "harmonic": harmonic, "degree_ok": degree_ok,
            }));
            rows.push(vec![
                idx.k.to_string(),
                idx.ell.to_string(),
                idx.j.to_string(),
                idx.p.to_string(),
                idx.q.to_string(),
                harmonic.to_string(),
                degree_ok.to_string(),
            ]);
        }
    }
    Ok(Outcome {
        pass,
        summary: format!(
            "basis {cfg}: {} elements k ≤ {kmax}, exact harmonicity {}",
            entries.len(),
            if pass { "PASS" } else { "FAIL" }
        ),
        json: json!({
            "schema_version": SCHEMA_VERSION, "job": "basis", "config": cfg_json(cfg),
            "kmin": a.kmin, "kmax": kmax, "pass": pass, "elements": entries,
        }),
        csv_header: str_vec(&["k", "ell", "j", "p", "q", "harmonic", "degree_ok"]),
        csv_rows: rows,
    })
}

fn job_dims(a: &JobArgs) -> JobResult {
    let cfg = cfg_of(a);
    let kmax = a.kmax.unwrap_or(12);
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut pass = true;
    for k in a.kmin..=kmax {
        let count = enumerate_indices(cfg, k).len() as u64;
        let (dp, dh) = dims(cfg, k);
        let rank = grushin_core::ratpoly::grushin_rank(cfg, k as u64) as u64;
        let by_rank = dp - rank;
        let ok = count == dh && dh == by_rank;
        pass &= ok;
        entries.push(json!({
            "k": k, "enumerated": count, "closed_form": dh, "by_rank": by_rank, "pass": ok,
        }));
        rows.push(vec![
            k.to_string(),
            count.to_string(),
            dh.to_string(),
            by_rank.to_string(),
            ok.to_string(),
        ]);
    }
    Ok(Outcome {
        pass,
        summary: format!(
            "dims {cfg}: triple agreement k ≤ {kmax} {}",
            if pass { "PASS" } else { "FAIL" }
        ),
        json: json!({
            "schema_version": SCHEMA_VERSION, "job": "dims", "config": cfg_json(cfg),
            "pass": pass, "rows": entries,
        }),
        csv_header: str_vec(&["k", "enumerated", "closed_form", "by_rank", "pass"]),
        csv_rows: rows,
    })
}

fn job_kernel(a: &JobArgs) -> JobResult {
    let cfg = cfg_of(a);
    let kmax = a.kmax.unwrap_or(8);
    let tol = a.tol.unwrap_or(1e-8);
    let npts = 20;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut pass = true;
    for k in a.kmin..=kmax {
        let basis = build_basis(cfg, k)?;
        let mut worst = 0.0f64;
        for _ in 0..npts {
            let p1 = omega_sample(&mut rng, cfg);
            let p2 = omega_sample(&mut rng, cfg);
            let gk = kernel_g(cfg, k, &p1, &p2)?;
            let direct: f64 = basis
                .iter()
                .map(|e| e.eval_normalized(&p1) * e.eval_normalized(&p2))
                .sum();
            worst = worst.max((gk - direct).abs());
        }
        let ok = worst < tol;
        pass &= ok;
        entries.push(json!({"k": k, "max_deviation": worst, "pass": ok}));
        rows.push(vec![k.to_string(), format!("{worst:.3e}"), ok.to_string()]);
    }
    Ok(Outcome {
        pass,
        summary: format!(
            "kernel {cfg}: kernel vs basis sum at {npts} seeded pairs per k ≤ {kmax}, tol {tol:.0e} {}",
            if pass { "PASS" } else { "FAIL" }
        ),
        json: json!({
            "schema_version": SCHEMA_VERSION, "job": "kernel", "config": cfg_json(cfg),
            "seed": a.seed, "tolerance": tol, "pass": pass, "rows": entries,
        }),
        csv_header: str_vec(&["k", "max_deviation", "pass"]),
        csv_rows: rows,
    })
}

fn job_addition(a: &JobArgs) -> JobResult {
    let kmax = a.kmax.unwrap_or(20);
    let tol = a.tol.unwrap_or(1e-9);
    let npts = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut pass = true;
    for (u, v) in [(3.0f64, 3.0f64), (4.0, 3.0), (5.0, 4.0)] {
        for k in 0..=kmax {
            let mut worst = 0.0f64;
            for _ in 0..npts {
                let half = std::f64::consts::FRAC_PI_2;
                let r = addition_formula_residual(
                    u,
                    v,
                    k,
                    rng.gen_range(0.01..half - 0.01),
                    rng.gen_range(0.01..half - 0.01),
                    rng.gen_range(0.0..std::f64::consts::PI),
                    rng.gen_range(0.0..std::f64::consts::PI),
                )?;
                worst = worst.max(r);
            }
            let ok = worst < tol;
            pass &= ok;
            entries.push(json!({"u": u, "v": v, "k": k, "max_residual": worst, "pass": ok}));
            rows.push(vec![
                u.to_string(),
                v.to_string(),
                k.to_string(),
                format!("{worst:.3e}"),
                ok.to_string(),
            ]);
        }
    }
    Ok(Outcome {
        pass,
        summary: format!(
            "addition: {npts} seeded points per (u,v,k), k ≤ {kmax}, tol {tol:.0e} {}",
            if pass { "PASS" } else { "FAIL" }
        ),
        json: json!({
            "schema_version": SCHEMA_VERSION, "job": "addition", "seed": a.seed,
            "tolerance": tol, "pass": pass, "rows": entries,
        }),
        csv_header: str_vec(&["u", "v", "k", "max_residual", "pass"]),
        csv_rows: rows,
    })
}

fn job_norms(a: &JobArgs) -> JobResult {
    let cfg = cfg_of(a);
    let kmax = a.kmax.unwrap_or(10);
    let tol = a.tol.unwrap_or(1e-10);
    let resolution = kmax + 8;
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut pass = true;
    let mut prev: Vec<grushin_core::quadrature::OmegaFunction> = Vec::new();
    for k in a.kmin..=kmax {
        let fns: Vec<_> = build_basis(cfg, k)?
            .iter()
            .map(|e| e.omega_function(true))
            .collect();
        let mut gram_dev = 0.0f64;
        for (i, f) in fns.iter().enumerate() {
            for (l, g) in fns.iter().enumerate() {
                let ip = omega_inner_product(f, g, 0.0, cfg, resolution)?;
                let want = if i == l { 1.0 } else { 0.0 };
                gram_dev = gram_dev.max((ip - want).abs());
            }
        }
        let mut cross_dev = 0.0f64;
        for f in &fns {
            for g in &prev {
                cross_dev = cross_dev.max(omega_inner_product(f, g, 0.0, cfg, resolution)?.abs());
            }
        }
        let ok = gram_dev < tol && cross_dev < tol;
        pass &= ok;
        entries.push(json!({
            "k": k, "gram_deviation": gram_dev, "cross_degree_deviation": cross_dev, "pass": ok,
        }));
        rows.push(vec![
            k.to_string(),
            format!("{gram_dev:.3e}"),
            format!("{cross_dev:.3e}"),
            ok.to_string(),
        ]);
        prev = fns;
    }
    Ok(Outcome {
        pass,
        summary: format!(
            "norms {cfg}: orthonormality k ≤ {kmax}, tol {tol:.0e} {}",
            if pass { "PASS" } else { "FAIL" }
        ),
        json: json!({
            "schema_version": SCHEMA_VERSION, "job": "norms", "config": cfg_json(cfg),
            "tolerance": tol, "pass": pass, "rows": entries,
        }),
        csv_header: str_vec(&["k", "gram_deviation", "cross_degree_deviation", "pass"]),
        csv_rows: rows,
    })
}

fn job_bounds(b: &BoundsArgs) -> JobResult {
    let mut reports: Vec<BoundReport> = Vec::new();
    let want = |name: BoundName| matches!(b.bound, BoundName::All) || {
        matches!(
            (b.bound, name),
            (BoundName::Bernstein, BoundName::Bernstein)
                | (BoundName::Unit, BoundName::Unit)
                | (BoundName::Kl1, BoundName::Kl1)
                | (BoundName::Dxsa1, BoundName::Dxsa1)
                | (BoundName::Iin, BoundName::Iin)
                | (BoundName::Jasym, BoundName::Jasym)
        )
    };
    if want(BoundName::Bernstein) {
        reports.push(bernstein_check(20.0, 20.0, b.nmax, b.grid));
    }
    if want(BoundName::Unit) {
        reports.push(unit_bound_check(b.nmax.min(60)));
    }
    if want(BoundName::Kl1) {
        for beta in [0.0, 1.0, 2.5] {
            reports.push(kl1_check(3.0, beta, b.nmax.min(100))?);
        }
    }
    if want(BoundName::Dxsa1) {
        reports.push(grushin_core::estimates::dxsa1_check(3, 1, 2.5, 0.1, b.nmax)?);
    }
    if want(BoundName::Iin) {
        reports.push(iin_check(2.0, 1.5, 60, 20)?);
    }
    if want(BoundName::Jasym) {
        reports.push(j_asymptotic_check(2.0, 1.0, b.nmax.max(200))?);
        reports.push(j_asymptotic_check(1.5, 2.0, b.nmax.max(200))?);
    }
    let pass = reports.iter().all(|r| r.pass);
    let mut rows = Vec::new();
    for r in &reports {
        for row in &r.rows {
            rows.push(vec![
                r.bound_name.clone(),
                row.params.clone(),
                row.k.to_string(),
                format!("{:.12e}", row.lhs),
                format!("{:.12e}", row.rhs),
                format!("{:.12e}", row.ratio),
                row.pass.to_string(),
            ]);
        }
    }
    let mut summary = String::from("bounds:");
    for r in &reports {
        let _ = write!(
            summary,
            " {}={} (worst {:.4})",
            r.bound_name,
            if r.pass { "PASS" } else { "FAIL" },
            r.worst_ratio
        );
    }
    Ok(Outcome {
        pass,
        summary,
        json: json!({
            "schema_version": SCHEMA_VERSION, "job": "bounds", "pass": pass,
            "reports": reports,
        }),
        csv_header: str_vec(&["bound_name", "params", "k", "lhs", "rhs", "ratio", "pass"]),
        csv_rows: rows,
    })
}

fn job_projector(a: &JobArgs) -> JobResult {
    let cfg = cfg_of(a);
    let kmax = a.kmax.unwrap_or(12);
    let beta = a.beta.unwrap_or(0.3);
    let resolution = kmax + 12;
    let mut series = Vec::new();
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for k in a.kmin.max(1)..=kmax {
        let w = projector_weighted_norm(cfg, k, beta, resolution)?;
        series.push((k, w));
        entries.push(json!({"k": k, "weighted_norm": w}));
        rows.push(vec![k.to_string(), format!("{w:.12e}")]);
    }
    let (slope, _, r2) = growth_fit(&series)?;
    let cap = 2.0 * cfg.alpha as f64 / cfg.step() as f64 + 0.35;
    let mut pass = slope <= cap;
    let mut ident_fail = 0usize;
    for k in a.kmin..=kmax.min(10) {
        ident_fail += verify_proj_identity(cfg, k).len();
    }
    pass &= ident_fail == 0;
    Ok(Outcome {
        pass,
        summary: format!(
            "projector {cfg}: beta={beta}, fitted growth exponent {slope:.4} (cap {cap:.4}, r²={r2:.4}), identity failures {ident_fail} {}",
            if pass { "PASS" } else { "FAIL" }
        ),
        json: json!({
            "schema_version": SCHEMA_VERSION, "job": "projector", "config": cfg_json(cfg),
            "beta": beta, "fitted_exponent": slope, "exponent_cap": cap,
            "identity_failures": ident_fail, "pass": pass, "rows": entries,
        }),
        csv_header: str_vec(&["k", "weighted_norm"]),
        csv_rows: rows,
    })
}

fn job_fischer(a: &JobArgs) -> JobResult {
    let cfg = cfg_of(a);
    let k_cut = a.kmax.unwrap_or(6);
    let resolution = k_cut + 10;
    let f = RationalPolynomial::x_norm_sq(cfg.n, cfg.m);
    let rep1 = fischer_decompose(cfg, &f, k_cut, resolution)?;
    let rep2 = fischer_decompose(cfg, &f, k_cut, resolution)?;
    let deterministic = serde_json::to_string(&rep1)? == serde_json::to_string(&rep2)?;
    let parseval = rep1
        .shells
        .iter()
        .map(|(_, mass)| mass)
        .sum::<f64>()
        <= rep1.total_norm_sq * (1.0 + 1e-10);
    // classical case: restriction of a polynomial is exactly a finite shell sum
    let classical_ok = if cfg.alpha == 0 {
        rep1.residual_norm <= a.tol.unwrap_or(1e-10)
    } else {
        true
    };
    let pass = deterministic && parseval && classical_ok;
    let rows = rep1
        .shells
        .iter()
        .map(|(k, mass)| vec![k.to_string(), format!("{mass:.12e}")])
        .collect();
    Ok(Outcome {
        pass,
        summary: format!(
            "fischer {cfg}: |x|² decomposition, residual {:.3e}, deterministic={deterministic} {}",
            rep1.residual_norm,
            if pass { "PASS" } else { "FAIL" }
        ),
        json: json!({
            "schema_version": SCHEMA_VERSION, "job": "fischer", "config": cfg_json(cfg),
            "deterministic": deterministic, "parseval_bounded": parseval, "pass": pass,
            "report": rep1,
        }),
        csv_header: str_vec(&["degree", "mass"]),
        csv_rows: rows,
    })
}

fn job_sl2(a: &JobArgs) -> JobResult {
    let cfg = cfg_of(a);
    let kmax = a.kmax.unwrap_or(10);
    let tol = a.tol.unwrap_or(1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut ident_fail = 0usize;
    for k in a.kmin..=kmax {
        ident_fail += verify_proj_identity(cfg, k).len();
    }
    let mut comm_fail = 0usize;
    for _ in 0..50 {
        let av = rat(rng.gen_range(-20..20), rng.gen_range(1..10));
        let k = rng.gen_range(0..=kmax);
        let (r1, r2, r3) = sl2_commutator_check(cfg, &av, k);
        if !(r1 == rat(0, 1) && r2 == rat(0, 1) && r3 == rat(0, 1)) {
            comm_fail += 1;
        }
    }
    let mut worst_pointwise = 0.0f64;
    for k in (a.kmin..=kmax.min(6)).step_by(2) {
        for idx in enumerate_indices(cfg, k).into_iter().take(3) {
            let elem = build_basis_element(cfg, idx)?;
            for _ in 0..5 {
                let x: Vec<f64> = (0..cfg.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let y: Vec<f64> = (0..cfg.m).map(|_| rng.gen_range(-1.0..1.0)).collect();
                if x.iter().map(|v| v * v).sum::<f64>() < 1e-2 {
                    continue;
                }
                worst_pointwise =
                    worst_pointwise.max(sl2_pointwise_residual(cfg, &elem.cartesian, k, &x, &y));
            }
        }
    }
    let pass = ident_fail == 0 && comm_fail == 0 && worst_pointwise < tol;
    Ok(Outcome {
        pass,
        summary: format!(
            "sl2 {cfg}: identity failures {ident_fail}, commutator failures {comm_fail}/50, pointwise residual {worst_pointwise:.3e} {}",
            if pass { "PASS" } else { "FAIL" }
        ),
        json: json!({
            "schema_version": SCHEMA_VERSION, "job": "sl2", "config": cfg_json(cfg),
            "seed": a.seed, "identity_failures": ident_fail, "commutator_failures": comm_fail,
            "max_pointwise_residual": worst_pointwise, "pass": pass,
        }),
        csv_header: str_vec(&["identity_failures", "commutator_failures", "max_pointwise_residual", "pass"]),
        csv_rows: vec![vec![
            ident_fail.to_string(),
            comm_fail.to_string(),
            format!("{worst_pointwise:.3e}"),
            pass.to_string(),
        ]],
    })
}

fn job_carleman(a: &JobArgs) -> JobResult {
    let cfg = cfg_of(a);
    let kmax = a.kmax.unwrap_or(8);
    let tol = a.tol.unwrap_or(1e-8);
    let epsilon = a.epsilon.unwrap_or(0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut worst_eigen = 0.0f64;
    for k in a.kmin..=kmax {
        for (ell, j, _) in admissible_pairs(cfg, k) {
            let idx = HarmonicIndex { k, ell, j, p: 1, q: 1 };
            let s = rng.gen_range(0.0..10.0);
            let eta = rng.gen_range(-10.0..10.0);
            worst_eigen = worst_eigen.max(eigenrelation_residual(cfg, idx, s, eta, 20)?);
            worst_eigen =
                worst_eigen.max(eigenrelation_residual(cfg, idx, k as f64, 0.0, 20)?);
        }
    }
    let family = TestFamily::bump(0.5, 2.0);
    let family_label = "bump[0.5,2]";
    let s_grid: Vec<f64> = match a.s {
        Some(s) => vec![s],
        // growth_fit needs >= 4 points
        None => vec![100.5, 125.5, 150.5, 200.5],
    };
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut series = Vec::new();
    for &s in &s_grid {
        let (lhs, rhs, ratio) = carleman_ratio(cfg, s, epsilon, family)?;
        series.push((s.round() as u32, ratio));
        entries.push(json!({"s": s, "lhs": lhs, "rhs": rhs, "ratio": ratio}));
        rows.push(vec![
            cfg.n.to_string(),
            cfg.m.to_string(),
            cfg.alpha.to_string(),
            s.to_string(),
            epsilon.to_string(),
            family_label.to_string(),
            format!("{lhs:.12e}"),
            format!("{rhs:.12e}"),
            format!("{ratio:.12e}"),
        ]);
    }
    let slope = if series.len() >= 3 {
        growth_fit(&series)?.0
    } else {
        0.0
    };
    let (_, _, r1) = carleman_ratio(cfg, s_grid[0], epsilon, family)?;
    let (_, _, r2) = carleman_ratio(
        cfg,
        s_grid[0],
        epsilon,
        TestFamily { amplitude: 3.5, ..family },
    )?;
    let scaling_ok = (r1 - r2).abs() <= 1e-10 * r1.abs();
    let pass = worst_eigen < tol && slope <= 0.1 && scaling_ok;
    Ok(Outcome {
        pass,
        summary: format!(
            "carleman {cfg}: eigenrelation residual {worst_eigen:.3e} (k ≤ {kmax}), ratio slope {slope:.4}, scaling invariance {scaling_ok} {}",
            if pass { "PASS" } else { "FAIL" }
        ),
        json: json!({
            "schema_version": SCHEMA_VERSION, "job": "carleman", "config": cfg_json(cfg),
            "seed": a.seed, "epsilon": epsilon, "max_eigen_residual": worst_eigen,
            "ratio_slope": slope, "scaling_invariant": scaling_ok, "pass": pass,
            "ratios": entries,
        }),
        csv_header: str_vec(&["n", "m", "alpha", "s", "epsilon", "family", "lhs", "rhs", "ratio"]),
        csv_rows: rows,
    })
}

fn job_exponents(a: &ExponentArgs) -> JobResult {
    let configs: Vec<GrushinConfig> = if a.all {
        let mut v = Vec::new();
        for n in 2..=6 {
            for m in 1..=4 {
                for alpha in 1..=4 {
                    v.push(GrushinConfig::new(n, m, alpha));
                }
            }
        }
        v
    } else {
        vec![GrushinConfig::new(a.n, a.m, a.alpha)]
    };
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for cfg in configs {
        match exponents(cfg) {
            Ok(row) => {
                rows.push(vec![
                    row.n.to_string(),
                    row.m.to_string(),
                    row.alpha.to_string(),
                    row.p.to_string(),
                    row.q.to_string(),
                    row.r_threshold.to_string(),
                    row.branch.clone(),
                ]);
                entries.push(serde_json::to_value(&row)?);
            }
            Err(_) if a.all => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Outcome {
        pass: true,
        summary: format!("exponents: {} covered rows", rows.len()),
        json: json!({
            "schema_version": SCHEMA_VERSION, "job": "exponents", "rows": entries,
        }),
        csv_header: str_vec(&["n", "m", "alpha", "p", "q", "r_threshold", "branch"]),
        csv_rows: rows,
    })
}

fn str_vec(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

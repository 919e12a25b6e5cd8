//! `anomint` command-line entry point.
//!
//! Every subcommand prints one JSON report (see [`anomint::io::RunReport`]).
//! Exit status: 0 when all checks pass, 1 when a check fails, 2 on bad input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use anomint::algebra::{printed_anomaly_residuals, rational_to_f64, verify_identity_suite};
use anomint::canonical::{canonicalize, DEFAULT_RECON_TOL, DEFAULT_SINGULAR_TOL};
use anomint::dynamics::{anomaly_demo, exact_flow, rk4_flow, symbolic_generator, time_series};
use anomint::fock::{canonical_hamiltonian_matrix, commutant_multiplicity_check, diagonalize, TruncationConfig};
use anomint::io::{input_digest, ChargeFile, RunReport, Timing};
use anomint::spectrum::{best_rational, enumerate_levels, mode_quanta, Normalization};
use anomint::weyl::{verify_spectrum_invariance, GroupKind};

#[derive(Parser)]
#[command(name = "anomint", version, about = "Anomalous-integrability toolkit: exact algebra, spectra, dynamics")]
struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Orthogonal congruence of the charge matrix to Cartan block form.
    Canonicalize {
        #[arg(long)]
        alpha_file: PathBuf,
        /// Singularity threshold relative to max |α_ij|.
        #[arg(long, default_value_t = DEFAULT_SINGULAR_TOL)]
        tol: f64,
    },
    /// Exact commutator identity suite.
    VerifyAlgebra {
        #[arg(long)]
        alpha_file: PathBuf,
    },
    /// Exact level table with arithmetic degeneracies.
    Spectrum(SpectrumArgs),
    /// Weyl-group invariance of the spectrum.
    WeylCheck {
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, default_value = "oracle")]
        normalization: Normalization,
        #[arg(long)]
        emax: String,
        #[arg(long, default_value = "D")]
        group: GroupKind,
    },
    /// Truncated Fock-space residuals and eigenvalues.
    FockCheck {
        #[arg(long)]
        alpha_file: PathBuf,
        /// Expected mode count (must equal n/2 when given).
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, default_value_t = 20)]
        nmax: usize,
        #[arg(long, default_value_t = 4)]
        margin: usize,
        #[arg(long, default_value_t = 6)]
        k_lowest: usize,
    },
    /// Heisenberg flow: closed form against RK4, plus the anomaly demo.
    Evolve {
        #[arg(long)]
        alpha_file: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Time-series CSV for plotting.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long, conflicts_with = "beta", required_unless_present = "beta")]
    alpha_file: Option<PathBuf>,
    /// Comma-separated exact frequencies, e.g. `1,3/2`.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, default_value = "oracle")]
    normalization: Normalization,
    #[arg(long)]
    emax: String,
    /// Denominator bound for rationalizing frequencies from --alpha-file.
    #[arg(long)]
    rationalize: Option<u64>,
    #[arg(long)]
    tsv: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Input problems map to exit status 2.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.into())
    }
}

type Outcome = std::result::Result<(RunReport, Vec<(PathBuf, String)>), InputError>;

struct Draft {
    subcommand: &'static str,
    digest: String,
    parameters: Value,
}

impl Draft {
    fn new(subcommand: &'static str, input: &[u8], parameters: Value) -> Self {
        Draft { subcommand, digest: input_digest(input, &parameters), parameters }
    }

    fn finish(self, results: Value, residuals: Value, checks: Vec<(String, bool)>, start: Instant) -> RunReport {
        RunReport {
            subcommand: self.subcommand,
            input_digest: self.digest,
            parameters: self.parameters,
            results,
            residuals,
            pass: checks.iter().all(|(_, ok)| *ok),
            checks,
            timing: Timing { wall_clock_s: start.elapsed().as_secs_f64() },
        }
    }
}

/// Exact rational from `p/q`, an integer, or a finite decimal.
fn parse_exact(text: &str) -> anyhow::Result<BigRational> {
    let t = text.trim();
    if let Some((whole, frac)) = t.split_once('.') {
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let num: BigInt = digits.parse().map_err(|_| anyhow!("bad decimal `{t}`"))?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    Ok(anomint::algebra::parse_rational(t)?)
}

fn parse_list(text: &str) -> anyhow::Result<Vec<BigRational>> {
    let v: Vec<BigRational> = text.split(',').map(parse_exact).collect::<anyhow::Result<_>>()?;
    if v.is_empty() {
        bail!("empty frequency list");
    }
    Ok(v)
}

fn read_charges(path: &Path) -> anyhow::Result<(ChargeFile, Vec<u8>)> {
    ChargeFile::read(path).with_context(|| format!("reading charge file {}", path.display()))
}

fn run_canonicalize(path: &Path, tol: f64) -> Outcome {
    let start = Instant::now();
    let (file, bytes) = read_charges(path)?;
    let draft = Draft::new("canonicalize", &bytes, json!({ "tol": tol }));
    let a = file.to_f64();
    let form = canonicalize(&file.charges, tol)?;
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let ortho = form.orthogonality_defect();
    let recon = form.reconstruction_defect(&a);
    let checks = vec![
        ("orthogonality".to_string(), ortho <= DEFAULT_RECON_TOL),
        ("reconstruction".to_string(), recon <= DEFAULT_RECON_TOL * scale),
    ];
    let residuals = json!({ "orthogonality": ortho, "reconstruction": recon, "round_trip": form.round_trip_defect(&a) });
    Ok((draft.finish(serde_json::to_value(&form)?, residuals, checks, start), Vec::new()))
}

fn run_verify_algebra(path: &Path) -> Outcome {
    let start = Instant::now();
    let (file, bytes) = read_charges(path)?;
    let draft = Draft::new("verify-algebra", &bytes, json!({}));
    let report = verify_identity_suite(&file.charges)?;
    let printed = printed_anomaly_residuals(&file.charges)?;
    let checks = report.checks.iter().map(|c| (c.name.to_string(), c.is_zero())).collect();
    let results = json!({
        "n": report.n,
        "exact_input": file.exact,
        "identities": report.checks.iter().map(|c| json!({
            "name": c.name,
            "identity": c.identity,
            "all_zero": c.is_zero(),
        })).collect::<Vec<_>>(),
        // the anomaly with a `+i` prefactor; nonzero unless α = 0
        "printed_sign_anomaly": {
            "identity": "[H_0, F_ai] - i a_ij P_j",
            "all_zero": printed.iter().all(|r| r.residual.is_zero()),
            "residuals": printed,
        },
    });
    let residuals = serde_json::to_value(&report.checks)?;
    Ok((draft.finish(results, residuals, checks, start), Vec::new()))
}

fn run_spectrum(args: &SpectrumArgs) -> Outcome {
    let start = Instant::now();
    let e_max = parse_exact(&args.emax)?;
    let (beta, input, rationalization) = match (&args.alpha_file, &args.beta) {
        (Some(path), _) => {
            let (file, bytes) = read_charges(path)?;
            let bound = args
                .rationalize
                .ok_or_else(|| anyhow!("--alpha-file frequencies are floating point; pass --rationalize DENOM_BOUND"))?;
            let form = canonicalize(&file.charges, DEFAULT_SINGULAR_TOL)?;
            let mut beta = Vec::new();
            let mut notes = Vec::new();
            for &b in &form.beta {
                let r = best_rational(b, bound)?;
                notes.push(json!({ "beta": b, "rational": r.to_string(), "abs_error": (rational_to_f64(&r) - b).abs() }));
                beta.push(r);
            }
            (beta, bytes, Some(notes))
        }
        (None, Some(text)) => (parse_list(text)?, text.as_bytes().to_vec(), None),
        (None, None) => return Err(anyhow!("one of --alpha-file or --beta is required").into()),
    };
    let parameters = json!({
        "normalization": args.normalization,
        "emax": e_max.to_string(),
        "rationalize": args.rationalize,
    });
    let draft = Draft::new("spectrum", &input, parameters);
    let quanta = mode_quanta(&beta, args.normalization)?;
    let table = enumerate_levels(&quanta, &e_max)?;
    let consistent = table.levels.iter().all(|lv| {
        lv.degeneracy == lv.tuples.len() && lv.tuples.iter().all(|t| quanta.energy(t) == lv.energy)
    });
    let checks = vec![("tuples_consistent".to_string(), consistent)];
    let mut results = serde_json::to_value(&table)?;
    results["beta"] = json!(beta.iter().map(ToString::to_string).collect::<Vec<_>>());
    if let Some(notes) = rationalization {
        results["rationalization"] = Value::Array(notes);
    }
    let mut files = Vec::new();
    if let Some(p) = &args.tsv {
        files.push((p.clone(), table.to_tsv()));
    }
    if let Some(p) = &args.csv {
        files.push((p.clone(), table.to_csv()));
    }
    Ok((draft.finish(results, Value::Null, checks, start), files))
}

fn run_weyl(beta: &str, normalization: Normalization, emax: &str, group: GroupKind) -> Outcome {
    let start = Instant::now();
    let beta = parse_list(beta)?;
    let e_max = parse_exact(emax)?;
    let parameters = json!({
        "beta": beta.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "normalization": normalization,
        "emax": e_max.to_string(),
        "group": group,
    });
    let draft = Draft::new("weyl-check", &[], parameters);
    let report = verify_spectrum_invariance(&beta, normalization, &e_max, group)?;
    let checks = vec![
        ("group_order".to_string(), report.order as u64 == group.order(report.l)),
        ("spectrum_invariant".to_string(), report.elements.iter().all(|e| e.invariant)),
        ("orbits_closed".to_string(), report.orbits.iter().all(|o| o.closed)),
    ];
    Ok((draft.finish(serde_json::to_value(&report)?, Value::Null, checks, start), Vec::new()))
}

/// Full `H_α` matrices are built only up to this dimension.
const FULL_SPACE_LIMIT: usize = 1024;

/// The `k` smallest values of `Σ_k ε_k (ν_k + ½)`, with multiplicity.
fn lowest_levels(eps: &[f64], k: usize) -> Vec<f64> {
    let l = eps.len();
    let mut out = Vec::new();
    let mut nu = vec![0usize; l];
    loop {
        out.push(eps.iter().zip(&nu).map(|(e, &v)| e * (v as f64 + 0.5)).sum());
        let mut i = 0;
        loop {
            if i == l {
                out.sort_by(f64::total_cmp);
                out.truncate(k);
                return out;
            }
            if nu[i] < k {
                nu[i] += 1;
                break;
            }
            nu[i] = 0;
            i += 1;
        }
    }
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn run_fock(path: &Path, l: Option<usize>, nmax: usize, margin: usize, k_lowest: usize) -> Outcome {
    let start = Instant::now();
    let (file, bytes) = read_charges(path)?;
    let n = file.n();
    if let Some(l) = l {
        if 2 * l != n {
            return Err(anyhow!("--l {l} does not match n = {n}").into());
        }
    }
    if k_lowest == 0 {
        return Err(anyhow!("--k-lowest must be positive").into());
    }
    let parameters = json!({ "l": n / 2, "nmax": nmax, "margin": margin, "k_lowest": k_lowest });
    let draft = Draft::new("fock-check", &bytes, parameters);
    let form = canonicalize(&file.charges, DEFAULT_SINGULAR_TOL)?;
    let canon_cfg = TruncationConfig::new(form.l(), nmax, margin)?;
    let numeric = diagonalize(&canonical_hamiltonian_matrix(&form.beta, &canon_cfg)?, k_lowest)?;
    let oracle_eps: Vec<f64> = form.beta.iter().map(|b| 2.0 * b.abs()).collect();
    let paper_eps: Vec<f64> = form.beta.iter().map(|b| b * b).collect();
    let oracle = lowest_levels(&oracle_eps, k_lowest);
    let paper = lowest_levels(&paper_eps, k_lowest);
    let (dev_oracle, dev_paper) = (max_dev(&numeric, &oracle), max_dev(&numeric, &paper));
    let level_scale = oracle.last().copied().unwrap_or(1.0).max(1.0);
    let matches = |d: f64| d <= 1e-6 * level_scale;
    let normalization = json!({
        "numeric": numeric,
        "oracle": oracle,
        "paper": paper,
        "oracle_max_deviation": dev_oracle,
        "paper_max_deviation": dev_paper,
        "oracle_matches": matches(dev_oracle),
        "paper_matches": matches(dev_paper),
    });
    let mut checks = vec![("canonical_spectrum_matches_oracle".to_string(), matches(dev_oracle))];

    let alpha_scale = file.to_f64().amax().max(1.0);
    let full_dim = (nmax + 1).checked_pow(n as u32).unwrap_or(usize::MAX);
    let (full, residuals) = if full_dim <= FULL_SPACE_LIMIT {
        let cfg = TruncationConfig::new(n, nmax, margin)?;
        let report = commutant_multiplicity_check(&file.charges, &cfg, k_lowest)?;
        let worst = report.conservation_residuals.iter().copied().fold(0.0, f64::max);
        checks.push(("conservation_interior".to_string(), worst <= 1e-8 * alpha_scale * alpha_scale));
        let residuals = json!({ "conservation": report.conservation_residuals });
        (serde_json::to_value(&report)?, residuals)
    } else {
        let reason = format!("full space has {full_dim} states (> {FULL_SPACE_LIMIT}); reduce --nmax");
        (json!({ "skipped": reason }), Value::Null)
    };
    let results = json!({ "beta": form.beta, "canonical_oscillator": normalization, "full_hamiltonian": full });
    Ok((draft.finish(results, residuals, checks, start), Vec::new()))
}

fn run_evolve(path: &Path, t: f64, steps: usize, csv: Option<&Path>, samples: usize) -> Outcome {
    let start = Instant::now();
    let (file, bytes) = read_charges(path)?;
    if !t.is_finite() {
        return Err(anyhow!("--t must be finite").into());
    }
    if steps == 0 {
        return Err(anyhow!("--steps must be at least 1").into());
    }
    let draft = Draft::new("evolve", &bytes, json!({ "t": t, "steps": steps }));
    let exact = exact_flow(&file.charges, t)?;
    let rk4 = rk4_flow(&file.charges, t, steps)?;
    let (k, v) = symbolic_generator(&file.charges)?;
    let h = 1e-5;
    let plus = exact_flow(&file.charges, h)?;
    let minus = exact_flow(&file.charges, -h)?;
    let fd_f = (&plus.fprime_coeffs - &minus.fprime_coeffs) / (2.0 * h);
    let fd_q = (&plus.q_offsets - &minus.q_offsets) / (2.0 * h);
    let rel = |fd: &DMatrix<f64>, sym: &DMatrix<f64>| (fd - sym).amax() / sym.amax().max(f64::MIN_POSITIVE);
    let (deriv_f, deriv_q) = (rel(&fd_f, &k), rel(&fd_q, &v));
    let demo = anomaly_demo(&file.charges, t)?;
    let checks = vec![
        ("exact_orthogonality".to_string(), exact.orthogonality_defect() < 1e-12),
        ("derivative_matches_symbolic".to_string(), deriv_f < 1e-6 && deriv_q < 1e-6),
        ("anomalous_flow_conserves_f".to_string(), demo.anomalous.max_change < 1e-12),
    ];
    let residuals = json!({
        "rk4_vs_exact": exact.distance(&rk4),
        "exact_orthogonality": exact.orthogonality_defect(),
        "rk4_orthogonality": rk4.orthogonality_defect(),
        "derivative_relative_error": { "fprime": deriv_f, "q": deriv_q },
    });
    let results = json!({ "exact": exact, "rk4": rk4, "anomaly": demo });
    let mut files = Vec::new();
    if let Some(p) = csv {
        files.push((p.to_path_buf(), time_series(&file.charges, t, samples.max(1), steps)?));
    }
    Ok((draft.finish(results, residuals, checks, start), files))
}

fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Canonicalize { alpha_file, tol } => run_canonicalize(alpha_file, *tol),
        Command::VerifyAlgebra { alpha_file } => run_verify_algebra(alpha_file),
        Command::Spectrum(args) => run_spectrum(args),
        Command::WeylCheck { beta, normalization, emax, group } => run_weyl(beta, *normalization, emax, *group),
        Command::FockCheck { alpha_file, l, nmax, margin, k_lowest } => {
            run_fock(alpha_file, *l, *nmax, *margin, *k_lowest)
        }
        Command::Evolve { alpha_file, t, steps, csv, samples } => {
            run_evolve(alpha_file, *t, *steps, csv.as_deref(), *samples)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, files) = match execute(&cli) {
        Ok(v) => v,
        Err(InputError(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    let mut writes: Vec<(PathBuf, String)> = files;
    match &cli.out {
        Some(p) => writes.push((p.clone(), text)),
        None => print!("{text}"),
    }
    for (path, body) in writes {
        if let Err(e) = std::fs::write(&path, body) {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

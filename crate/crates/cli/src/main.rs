//! `canon` — command-line front end for the canonical-system solvers.
//!
//! Subcommands:
//!
//! - `direct`   integrate the transfer matrix of a Hamiltonian over a
//!   (t, z) grid and emit `t,re_z,im_z,A,B,C,D,det_err` CSV,
//! - `inverse`  recover (h11, h12, h22) from a spectral measure and emit
//!   `t,h11,h12,h22` CSV plus a JSON discrepancy summary,
//! - `rh`       solve the constant-jump Riemann–Hilbert problem for a
//!   homogeneous measure and emit the boundary density ψ,
//! - `toeplitz` solve the truncated Toeplitz equation by collocation,
//! - `validate` run the full validation suite and emit a JSON report.
//!
//! All output is deterministic: identical arguments produce byte-identical
//! CSV and JSON. Curves go to `--out` (default stdout); structured
//! summaries go to stdout when the curve has been redirected, otherwise to
//! stderr, so either stream stays machine-readable on its own.

use std::fs;
use std::io::Write as _;
use std::process::ExitCode;

use canon_core::canon::{transfer_matrix_grid, HamiltonianSpec};
use canon_core::isp::{assemble_hamiltonian, recover_h11, recover_offdiagonal};
use canon_core::measure::{MeasureClass, SpectralMeasureModel};
use canon_core::rh::{h11_from_rh, h11_paper_display, solve_constant_rh, RHProblem};
use canon_core::toeplitz::solve_truncated;
use canon_core::validate::run_all;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

#[derive(Parser)]
#[command(name = "canon", version, about = "Direct and inverse spectral problems for 2x2 canonical systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the transfer matrix over a (t, z) grid
    Direct(DirectArgs),
    /// Recover the Hamiltonian from a spectral measure
    Inverse(InverseArgs),
    /// Solve the constant-jump Riemann-Hilbert problem on [-t, t]
    Rh(RhArgs),
    /// Solve the truncated Toeplitz equation by collocation
    Toeplitz(ToeplitzArgs),
    /// Run the validation suite and emit a JSON report
    Validate(ValidateArgs),
}

#[derive(Args)]
struct DirectArgs {
    /// Hamiltonian as inline JSON or a path to a JSON file
    #[arg(long)]
    hamiltonian: String,
    /// Comma-separated list of right endpoints t > 0
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<f64>,
    /// Comma-separated spectral points, each `re` or `re:im`
    #[arg(long = "z-grid", value_delimiter = ',', required = true)]
    z_grid: Vec<String>,
    /// Integration tolerance (1e-12 ..= 1e-4)
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// CSV output path (stdout if omitted)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct InverseArgs {
    /// Spectral measure as inline JSON or a path to a JSON file
    #[arg(long)]
    measure: String,
    #[arg(long, default_value_t = 0.5)]
    tmin: f64,
    #[arg(long, default_value_t = 4.0)]
    tmax: f64,
    /// Number of grid points on [tmin, tmax]
    #[arg(long, default_value_t = 8)]
    steps: usize,
    /// Collocation size for the Toeplitz solves
    #[arg(long = "N", default_value_t = 256)]
    n: usize,
    /// CSV output path for the recovered Hamiltonian (stdout if omitted)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct RhArgs {
    #[arg(long)]
    c1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c2: f64,
    #[arg(long)]
    t: f64,
    /// Number of boundary sample points for the psi curve
    #[arg(long, default_value_t = 200)]
    grid: usize,
    /// CSV output path (stdout if omitted)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ToeplitzArgs {
    /// Spectral measure as inline JSON or a path to a JSON file
    #[arg(long)]
    measure: String,
    #[arg(long)]
    t: f64,
    /// Collocation size
    #[arg(long = "N", default_value_t = 256)]
    n: usize,
    /// CSV output path (stdout if omitted)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Override every check tolerance (e.g. 1e-15 forces failure)
    #[arg(long)]
    strict: Option<f64>,
    /// JSON report path (stdout if omitted)
    #[arg(long)]
    out: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Direct(args) => run_direct(&args),
        Command::Inverse(args) => run_inverse(&args),
        Command::Rh(args) => run_rh(&args),
        Command::Toeplitz(args) => run_toeplitz(&args),
        Command::Validate(args) => run_validate(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("canon: error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Inline JSON (starts with '{') or the contents of a file at the path.
fn json_arg(arg: &str) -> Result<String, String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).map_err(|e| format!("cannot read {arg}: {e}"))
    }
}

fn parse_z(s: &str) -> Result<Complex64, String> {
    let (re, im) = match s.split_once(':') {
        Some((r, i)) => (r, i),
        None => (s, "0"),
    };
    let re: f64 = re.parse().map_err(|_| format!("bad z component {re:?}"))?;
    let im: f64 = im.parse().map_err(|_| format!("bad z component {im:?}"))?;
    Ok(Complex64::new(re, im))
}

/// Write the curve to `--out` if given, else stdout. Returns true when the
/// curve went to a file (so the summary may take over stdout).
fn emit_curve(out: &Option<String>, body: &str) -> Result<bool, String> {
    match out {
        Some(path) => {
            fs::write(path, body).map_err(|e| format!("cannot write {path}: {e}"))?;
            Ok(true)
        }
        None => {
            print!("{body}");
            Ok(false)
        }
    }
}

fn emit_summary(curve_in_file: bool, json: &serde_json::Value) {
    let text = serde_json::to_string_pretty(json).expect("summary serialization");
    if curve_in_file {
        println!("{text}");
    } else {
        let _ = writeln!(std::io::stderr(), "{text}");
    }
}

fn run_direct(args: &DirectArgs) -> Result<ExitCode, String> {
    let h = HamiltonianSpec::from_json_str(&json_arg(&args.hamiltonian)?)
        .map_err(|e| e.to_string())?;
    let zs: Vec<Complex64> =
        args.z_grid.iter().map(|s| parse_z(s)).collect::<Result<_, _>>()?;
    let samples = transfer_matrix_grid(&h, &args.t, &zs, args.tol).map_err(|e| e.to_string())?;
    let mut body = String::from("t,re_z,im_z,A,B,C,D,det_err\n");
    for s in &samples {
        body.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.3e}\n",
            s.t,
            s.z.re,
            s.z.im,
            s.a.re,
            s.b.re,
            s.c.re,
            s.d.re,
            s.det_err()
        ));
    }
    emit_curve(&args.out, &body)?;
    Ok(ExitCode::SUCCESS)
}

fn run_inverse(args: &InverseArgs) -> Result<ExitCode, String> {
    if !(args.tmax > args.tmin && args.tmin > 0.0) {
        return Err("require 0 < tmin < tmax".into());
    }
    if args.steps < 2 {
        return Err("require steps >= 2".into());
    }
    let m = SpectralMeasureModel::from_json_str(&json_arg(&args.measure)?)
        .map_err(|e| e.to_string())?;
    let dt = (args.tmax - args.tmin) / (args.steps - 1) as f64;
    let t_grid: Vec<f64> = (0..args.steps).map(|i| args.tmin + i as f64 * dt).collect();
    let h11 = recover_h11(&m, &t_grid, args.n).map_err(|e| e.to_string())?;
    let h12 = recover_offdiagonal(&m, &t_grid, args.n).map_err(|e| e.to_string())?;
    let rec = assemble_hamiltonian(&h11, &h12, &t_grid).map_err(|e| e.to_string())?;
    let curve_in_file = emit_curve(&args.out, &rec.to_csv())?;

    let h11_mean = rec.h11.iter().sum::<f64>() / rec.h11.len() as f64;
    let class = match m.classify() {
        MeasureClass::Homogeneous => "homogeneous".to_string(),
        MeasureClass::QuasiHomogeneous { nu } => format!("quasi_homogeneous(nu={nu})"),
        _ => "general".to_string(),
    };
    let summary = serde_json::json!({
        "measure_class": class,
        "t_grid": t_grid,
        "collocation_size": args.n,
        "h11_mean_repo": h11_mean,
        "h11_mean_paper_display": (2.0 * std::f64::consts::PI).sqrt() * h11_mean,
        "det_defect": rec.det_defect(),
    });
    emit_summary(curve_in_file, &summary);
    Ok(ExitCode::SUCCESS)
}

fn run_rh(args: &RhArgs) -> Result<ExitCode, String> {
    if args.grid == 0 {
        return Err("require grid >= 1".into());
    }
    let p = RHProblem::from_homogeneous(args.c1, args.c2, args.t).map_err(|e| e.to_string())?;
    let sol = solve_constant_rh(p).map_err(|e| e.to_string())?;
    let mut body = String::from("s,re_psi,im_psi\n");
    for j in 0..args.grid {
        let s = -args.t + (j as f64 + 0.5) * 2.0 * args.t / args.grid as f64;
        let psi = sol.psi(s).map_err(|e| e.to_string())?;
        body.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", s, psi.re, psi.im));
    }
    let curve_in_file = emit_curve(&args.out, &body)?;
    let summary = serde_json::json!({
        "t": args.t,
        "jump_G": p.big_g,
        "log_jump_D": p.d,
        "integral_psi_re": sol.integral_psi.re,
        "integral_psi_im": sol.integral_psi.im,
        "k0": sol.k0(),
        "h11_repo": h11_from_rh(args.c1, args.c2),
        "h11_paper_display": h11_paper_display(args.c1, args.c2),
    });
    emit_summary(curve_in_file, &summary);
    Ok(ExitCode::SUCCESS)
}

fn run_toeplitz(args: &ToeplitzArgs) -> Result<ExitCode, String> {
    let m = SpectralMeasureModel::from_json_str(&json_arg(&args.measure)?)
        .map_err(|e| e.to_string())?;
    let sol = solve_truncated(&m, args.t, args.n).map_err(|e| e.to_string())?;
    let mut body = String::from("node,weight,re_psi,im_psi\n");
    for j in 0..sol.grid.nodes.len() {
        body.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            sol.grid.nodes[j], sol.grid.weights[j], sol.values[j].re, sol.values[j].im
        ));
    }
    let curve_in_file = emit_curve(&args.out, &body)?;
    let summary = serde_json::json!({
        "t": args.t,
        "collocation_size": args.n,
        "k0": sol.k0,
        "k0_imag_residual": sol.k0_imag_residual,
        "residual": sol.residual,
        "cond_estimate": sol.cond_estimate,
    });
    emit_summary(curve_in_file, &summary);
    Ok(ExitCode::SUCCESS)
}

fn run_validate(args: &ValidateArgs) -> Result<ExitCode, String> {
    if let Some(tol) = args.strict {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err("strict tolerance must be positive and finite".into());
        }
    }
    let results = run_all(args.strict).map_err(|e| e.to_string())?;
    let all_pass = results.iter().all(|r| r.pass);
    for r in &results {
        eprintln!(
            "criterion {:>2} [{}] {}",
            r.index,
            if r.pass { "PASS" } else { "FAIL" },
            r.name
        );
    }
    let report = serde_json::json!({
        "strict": args.strict,
        "pass": all_pass,
        "criteria": results,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serialization");
    match &args.out {
        Some(path) => {
            fs::write(path, format!("{text}\n")).map_err(|e| format!("cannot write {path}: {e}"))?
        }
        None => println!("{text}"),
    }
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

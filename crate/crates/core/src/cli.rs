//! Command-line experiment driver: each subcommand runs a set of checks and
//! writes a JSON (or CSV) report.

use crate::analytic::{
    functional_eq_residual, gamma_ratio_zero_check, hurwitz_zeta, l_value, zero_free_certificate, zero_scan,
    ScanRegion, SeriesExtent,
};
use crate::arith::{is_square_free, pow_rational};
use crate::chars::{enumerate_characters, generalized_bernoulli, DirichletCharacter, Parity};
use crate::cyclo::CycloNumber;
use crate::error::{Error, Result};
use crate::io;
use crate::lift::{
    identity_record, master_identity_residual, remark_variant_residual, shimura_a, IdentityResidual, LiftParams,
};
use crate::qseries::{block, hecke_eigenvalue, theta_series, CoefficientBlock};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use serde_json::{json, Value};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "halfint", version, about = "Periodic coefficient blocks, Shimura lifts and L-series checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Commands,
}

#[derive(Subcommand, Debug)]
pub enum Commands {
    /// Theta series blocks and their detected period.
    ThetaDemo(RunArgs),
    /// Shimura lift coefficients A(n) of a coefficient block.
    Lift(RunArgs),
    /// Exact residual of the L-series identity for an unscaled block.
    IdentityCheck(RunArgs),
    /// The same identity for a block of a(dn^2)/n^i, i >= 1.
    RemarkCheck(RunArgs),
    /// Functional equations, special values and trivial zeros.
    AnalyticCheck(RunArgs),
    /// Zero-free half-plane certificate and grid scan for a Dirichlet series.
    LemmaCheck(RunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long, default_value_t = 1)]
    pub k: u64,
    #[arg(long, default_value_t = 1)]
    pub d: u64,
    /// Block period; detected from the data when omitted.
    #[arg(long)]
    pub l: Option<u64>,
    /// Scaling exponent of the block a(dn^2)/n^i.
    #[arg(long)]
    pub i: Option<u32>,
    #[arg(long, default_value_t = 2000)]
    pub nmax: usize,
    #[arg(long, default_value_t = 1)]
    pub psi_modulus: u64,
    /// Enumeration index; defaults to the first primitive character.
    #[arg(long)]
    pub psi_index: Option<usize>,
    /// CSV `n,value` or `n,value_re,value_im` holding a(dn^2) for n >= 1.
    #[arg(long)]
    pub block_file: Option<PathBuf>,
    /// CSV `n,value` or `n,value_re,value_im` holding B(n) for n >= 1.
    #[arg(long)]
    pub coeff_file: Option<PathBuf>,
    /// Growth constant: |B(n)| <= C n^lambda.
    #[arg(long = "C")]
    pub c_bound: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Last index covered by the explicit part of the certificate.
    #[arg(long)]
    pub n1: Option<usize>,
    /// Treat the coefficient file as the complete series.
    #[arg(long)]
    pub finite: bool,
    /// Use the weight 3/2 theta series sum psi(n) n q^{dn^2}.
    #[arg(long)]
    pub three_halves: bool,
    #[arg(long, default_value_t = 20)]
    pub max_modulus: u64,
    #[arg(long, default_value_t = 2.0)]
    pub sigma_span: f64,
    #[arg(long, default_value_t = 20.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.25)]
    pub step: f64,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Exact cyclotomic coefficients in dumps.
    #[arg(long)]
    pub exact: bool,
    /// Coefficient dump (q-expansion for theta-demo, A(n) for lift).
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    ThetaDemo,
    Lift,
    IdentityCheck,
    RemarkCheck,
    AnalyticCheck,
    LemmaCheck,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::ThetaDemo => "theta-demo",
            CommandKind::Lift => "lift",
            CommandKind::IdentityCheck => "identity-check",
            CommandKind::RemarkCheck => "remark-check",
            CommandKind::AnalyticCheck => "analytic-check",
            CommandKind::LemmaCheck => "lemma-check",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub k: u64,
    pub d: u64,
    pub l: Option<u64>,
    pub i: Option<u32>,
    pub nmax: usize,
    pub psi_modulus: u64,
    pub psi_index: Option<usize>,
    pub input_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub exact: bool,
    pub c_bound: Option<f64>,
    pub lambda: Option<f64>,
    pub n1: Option<usize>,
    pub finite: bool,
    pub three_halves: bool,
    pub max_modulus: u64,
    pub sigma_span: f64,
    pub t_max: f64,
    pub step: f64,
    pub dump_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(command: CommandKind, args: RunArgs) -> Self {
        ExperimentConfig {
            command,
            k: args.k,
            d: args.d,
            l: args.l,
            i: args.i,
            nmax: args.nmax,
            psi_modulus: args.psi_modulus,
            psi_index: args.psi_index,
            input_path: args.block_file.or(args.coeff_file),
            output_path: args.output,
            format: args.format,
            exact: args.exact,
            c_bound: args.c_bound,
            lambda: args.lambda,
            n1: args.n1,
            finite: args.finite,
            three_halves: args.three_halves,
            max_modulus: args.max_modulus,
            sigma_span: args.sigma_span,
            t_max: args.t_max,
            step: args.step,
            dump_path: args.dump,
        }
    }

    pub fn from_cli(cli: Cli) -> Self {
        match cli.command {
            Commands::ThetaDemo(a) => Self::new(CommandKind::ThetaDemo, a),
            Commands::Lift(a) => Self::new(CommandKind::Lift, a),
            Commands::IdentityCheck(a) => Self::new(CommandKind::IdentityCheck, a),
            Commands::RemarkCheck(a) => Self::new(CommandKind::RemarkCheck, a),
            Commands::AnalyticCheck(a) => Self::new(CommandKind::AnalyticCheck, a),
            Commands::LemmaCheck(a) => Self::new(CommandKind::LemmaCheck, a),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nmax < 16 {
            return Err(Error::Domain(format!("nmax must be at least 16, got {}", self.nmax)));
        }
        if !is_square_free(self.d) {
            return Err(Error::NotSquareFree(self.d));
        }
        if self.psi_modulus == 0 {
            return Err(Error::Domain("psi modulus must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

impl Check {
    fn new(name: &str, pass: bool, detail: Value) -> Self {
        Check {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub params: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip)]
    pub periodicity_violation: bool,
}

impl Report {
    fn new(config: &ExperimentConfig, checks: Vec<Check>, periodicity_violation: bool) -> Self {
        Report {
            command: config.command.name().to_string(),
            params: serde_json::to_value(config).expect("serializable config"),
            pass: checks.iter().all(|c| c.pass),
            checks,
            periodicity_violation,
        }
    }

    /// 0 when every check passes, 2 on a periodicity violation, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.periodicity_violation {
            2
        } else if self.pass {
            0
        } else {
            1
        }
    }

    pub fn write<W: Write>(&self, mut w: W, format: Format) -> Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, self).map_err(|e| Error::Io(e.to_string()))?;
                writeln!(w)?;
            }
            Format::Csv => {
                let mut cw = csv::Writer::from_writer(w);
                cw.write_record(["name", "pass", "detail"])?;
                for c in &self.checks {
                    cw.write_record([c.name.as_str(), &c.pass.to_string(), &c.detail.to_string()])?;
                }
                cw.flush()?;
            }
        }
        Ok(())
    }
}

/// Smallest p such that values[n] = values[n + p] throughout and the sample
/// covers at least three full periods. None for samples shorter than 16.
pub fn detect_period<T: PartialEq>(values: &[T]) -> Option<u64> {
    let len = values.len();
    if len < 16 {
        return None;
    }
    (1..=len / 3)
        .find(|&p| (0..len - p).all(|n| values[n] == values[n + p]))
        .map(|p| p as u64)
}

/// Runs the configured checks, writes the report, and returns the exit code.
pub fn run(config: &ExperimentConfig) -> Result<i32> {
    let report = execute(config)?;
    match &config.output_path {
        Some(path) => report.write(BufWriter::new(File::create(path)?), config.format)?,
        None => report.write(std::io::stdout().lock(), config.format)?,
    }
    Ok(report.exit_code())
}

pub fn execute(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    match config.command {
        CommandKind::ThetaDemo => theta_demo(config),
        CommandKind::Lift => lift(config),
        CommandKind::IdentityCheck | CommandKind::RemarkCheck => identity_check(config),
        CommandKind::AnalyticCheck => analytic_check(config),
        CommandKind::LemmaCheck => lemma_check(config),
    }
}

pub fn select_character(modulus: u64, index: Option<usize>) -> Result<DirichletCharacter> {
    let chars = enumerate_characters(modulus);
    match index {
        Some(i) => chars.get(i).cloned().ok_or_else(|| {
            Error::Domain(format!("modulus {} has {} characters, index {} requested", modulus, chars.len(), i))
        }),
        None => Ok(chars
            .iter()
            .find(|c| c.is_primitive())
            .unwrap_or(&chars[0])
            .clone()),
    }
}

fn int_pow(n: u64, e: u32) -> CycloNumber {
    CycloNumber::from_rational(pow_rational(&BigRational::from_integer(BigInt::from(n)), e))
}

fn inv_pow(n: u64, e: u32) -> CycloNumber {
    CycloNumber::from_rational(BigRational::one() / pow_rational(&BigRational::from_integer(BigInt::from(n)), e))
}

fn preview(values: &[CycloNumber], count: usize) -> Vec<String> {
    values.iter().take(count).map(io::value_string).collect()
}

fn dump(config: &ExperimentConfig, coeffs: &[CycloNumber], start: usize) -> Result<()> {
    if let Some(path) = &config.dump_path {
        let w = BufWriter::new(File::create(path)?);
        if config.exact {
            io::write_exact(w, coeffs, start)?;
        } else {
            io::write_complex(w, coeffs, start)?;
        }
    }
    Ok(())
}

fn theta_demo(config: &ExperimentConfig) -> Result<Report> {
    let psi = select_character(config.psi_modulus, config.psi_index)?;
    let w = u32::from(config.three_halves);
    let i = config.i.unwrap_or(w);
    let f = theta_series(&psi, config.d, config.three_halves, config.nmax)?;
    if let Some(path) = &config.dump_path {
        let out = BufWriter::new(File::create(path)?);
        if config.exact {
            io::write_qexpansion(out, &f)?;
        } else {
            io::write_complex(out, f.coeffs(), 0)?;
        }
    }
    let blk = block(&f, config.d, i)?;
    let mismatch = (1..=blk.len()).find(|&n| {
        let m = n as u64;
        let expected = if w >= i {
            psi.eval(m as i64) * int_pow(m, w - i)
        } else {
            psi.eval(m as i64) * inv_pow(m, i - w)
        };
        *blk.value(n) != expected
    });
    let mut checks = vec![Check::new(
        "block_matches_theta",
        mismatch.is_none(),
        json!({
            "block_length": blk.len(),
            "first_values": preview(blk.values(), 12),
            "mismatch_index": mismatch,
        }),
    )];
    let period = detect_period(blk.values());
    let periodic_expected = w == i;
    let pass = match period {
        Some(p) => periodic_expected && psi.modulus() % p == 0,
        None => !periodic_expected,
    };
    let status = match period {
        Some(_) => "detected",
        None => "inconclusive",
    };
    checks.push(Check::new(
        "period_detection",
        pass,
        json!({
            "period": period,
            "status": status,
            "psi_modulus": psi.modulus(),
            "periodic_expected": periodic_expected,
        }),
    ));
    if psi.parity() == Parity::Even || config.three_halves {
        let neben = f.character().clone();
        let bad = 2 * config.d * psi.modulus();
        if let Some(p) = (3..).filter(|&p| crate::arith::is_prime(p) && bad % p != 0).next() {
            if (config.nmax as u64 - 1) / (p * p) >= 16 {
                let lambda = hecke_eigenvalue(&f, p, &neben)?;
                let expected = if config.three_halves {
                    psi.eval(p as i64) * CycloNumber::from_integer(p + 1)
                } else {
                    psi.eval(p as i64) * CycloNumber::from_ratio(p as i64 + 1, p as i64)
                };
                checks.push(Check::new(
                    "hecke_eigenform",
                    lambda.as_ref() == Some(&expected),
                    json!({
                        "p": p,
                        "eigenvalue": lambda.as_ref().map(io::value_string),
                        "expected": io::value_string(&expected),
                    }),
                ));
            }
        }
    }
    Ok(Report::new(config, checks, false))
}

/// Block of a(dn^2)/n^i from the input file, or from a(dn^2) = psi(n) n^i.
fn load_block(config: &ExperimentConfig, psi: &DirichletCharacter, i: u32, len: usize) -> Result<CoefficientBlock> {
    let values = match &config.input_path {
        Some(path) => {
            let raw = io::read_exact_values(File::open(path)?)?;
            raw.into_iter()
                .enumerate()
                .map(|(j, v)| v * inv_pow(j as u64 + 1, i))
                .collect()
        }
        None => (1..=len as u64).map(|n| psi.eval(n as i64)).collect(),
    };
    CoefficientBlock::from_values(config.d, i, values)
}

fn resolve_period(config: &ExperimentConfig, blk: &CoefficientBlock) -> Result<u64> {
    match config.l {
        Some(l) => Ok(l),
        None => detect_period(blk.values())
            .ok_or_else(|| Error::Domain("no period given with --l and none detected in the block".into())),
    }
}

fn lift(config: &ExperimentConfig) -> Result<Report> {
    let psi = select_character(config.psi_modulus, config.psi_index)?;
    let i = config.i.unwrap_or(0);
    let blk = load_block(config, &psi, i, config.nmax)?;
    let period = config.l.or_else(|| detect_period(blk.values())).unwrap_or(1);
    let params = LiftParams::new(config.k, config.d, psi, period)?;
    let unscaled = CoefficientBlock::from_values(
        config.d,
        0,
        (1..=blk.len()).map(|n| blk.coefficient(n)).collect(),
    )?;
    let a = shimura_a(&unscaled, &params, config.nmax)?;
    dump(config, a.coeffs(), 1)?;
    let mut checks = vec![Check::new(
        "lift_computed",
        true,
        json!({
            "nmax": config.nmax,
            "psi_d": params.psi_d().dump_line(),
            "psi_odd": params.psi_is_odd(),
            "first_coefficients": preview(a.coeffs(), 12),
        }),
    )];
    let mut violation = false;
    if config.l.is_some() || detect_period(blk.values()).is_some() {
        let residual = if i == 0 {
            master_identity_residual(&blk, &params, config.nmax)?
        } else {
            remark_variant_residual(&blk, &params, config.nmax)?
        };
        violation = residual.periodicity_violation.is_some();
        checks.extend(identity_checks(&params, i, config.nmax, &residual));
    }
    Ok(Report::new(config, checks, violation))
}

fn identity_checks(params: &LiftParams, i: u32, nmax: usize, residual: &IdentityResidual) -> Vec<Check> {
    let check = if i == 0 { "master_identity" } else { "scaled_identity" };
    let mut record = identity_record(check, params, i, nmax, residual);
    record["shift_equals_weight"] = json!(residual.shift_equals_weight);
    record["psi_odd"] = json!(params.psi_is_odd());
    vec![
        Check::new(
            "periodicity",
            residual.periodicity_violation.is_none(),
            json!({
                "period": params.period(),
                "witness_index": residual.periodicity_violation.map(|v| v.0),
                "reference_index": residual.periodicity_violation.map(|v| v.1),
            }),
        ),
        Check::new(check, residual.exact_zero(), record),
    ]
}

fn identity_check(config: &ExperimentConfig) -> Result<Report> {
    let psi = select_character(config.psi_modulus, config.psi_index)?;
    let scaled = config.command == CommandKind::RemarkCheck;
    let i = config.i.unwrap_or(u32::from(scaled));
    if scaled && i == 0 {
        return Err(Error::Domain("remark-check needs --i >= 1".into()));
    }
    if !scaled && i != 0 {
        return Err(Error::Domain("identity-check takes an unscaled block; use remark-check for i >= 1".into()));
    }
    let blk = load_block(config, &psi, i, config.nmax)?;
    let period = resolve_period(config, &blk)?;
    let params = LiftParams::new(config.k, config.d, psi, period)?;
    let residual = if scaled {
        remark_variant_residual(&blk, &params, config.nmax)?
    } else {
        master_identity_residual(&blk, &params, config.nmax)?
    };
    let checks = identity_checks(&params, i, config.nmax, &residual);
    Ok(Report::new(config, checks, residual.periodicity_violation.is_some()))
}

const FE_TOLERANCE: f64 = 1e-8;
const VALUE_TOLERANCE: f64 = 1e-10;
const ZERO_TOLERANCE: f64 = 1e-12;

/// Twenty evaluation points away from the poles of Lambda.
pub fn fe_grid() -> Vec<Complex64> {
    let sigmas = [-1.5, -0.5, 0.25, 0.75, 1.5];
    let ts = [0.5, 2.0, 5.0, 9.0];
    sigmas
        .iter()
        .flat_map(|&x| ts.iter().map(move |&t| Complex64::new(x, t)))
        .collect()
}

fn analytic_check(config: &ExperimentConfig) -> Result<Report> {
    let mut checks = Vec::new();

    let grid = fe_grid();
    let mut worst = (0.0f64, String::new(), [0.0, 0.0]);
    let mut count = 0;
    for m in 1..=config.max_modulus {
        for chi in enumerate_characters(m).into_iter().filter(|c| c.is_primitive()) {
            for &s in &grid {
                let r = functional_eq_residual(&chi, s)?;
                count += 1;
                if !(r <= worst.0) {
                    worst = (r, chi.dump_line(), [s.re, s.im]);
                }
            }
        }
    }
    checks.push(Check::new(
        "functional_equation",
        worst.0 < FE_TOLERANCE,
        json!({
            "max_modulus": config.max_modulus,
            "evaluations": count,
            "max_residual": worst.0,
            "worst_character": worst.1,
            "worst_s": worst.2,
            "tolerance": FE_TOLERANCE,
        }),
    ));

    let chi4 = DirichletCharacter::from_exponents(4, vec![1])?;
    let l0 = l_value(&chi4, Complex64::new(0.0, 0.0))?;
    let b1 = generalized_bernoulli(&chi4, 1)?;
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    checks.push(Check::new(
        "l_value_chi4_at_0",
        (l0 - 0.5).norm() < VALUE_TOLERANCE && -b1.clone() == CycloNumber::from_rational(half),
        json!({
            "value": [l0.re, l0.im],
            "minus_b1": io::value_string(&-b1),
            "tolerance": VALUE_TOLERANCE,
        }),
    ));

    let z2 = hurwitz_zeta(Complex64::new(2.0, 0.0), 1.0)?;
    let zm1 = hurwitz_zeta(Complex64::new(-1.0, 0.0), 1.0)?;
    let e2 = (z2 - std::f64::consts::PI.powi(2) / 6.0).norm();
    let em1 = (zm1 + 1.0 / 12.0).norm();
    checks.push(Check::new(
        "hurwitz_oracles",
        e2 < VALUE_TOLERANCE && em1 < VALUE_TOLERANCE,
        json!({ "zeta_2_error": e2, "zeta_minus_1_error": em1, "tolerance": VALUE_TOLERANCE }),
    ));

    let mut failures = Vec::new();
    for k in 1..=6u64 {
        let delta = (k % 2) as u32;
        let start = k as i64 - 1 - delta as i64;
        let points: Vec<Complex64> = (1..)
            .map(|j| -(2 * j - 1) as f64)
            .filter(|&x| x < -(start as f64))
            .take(10)
            .map(|x| Complex64::new(x, 0.0))
            .collect();
        for (s, v) in points.iter().zip(gamma_ratio_zero_check(k, delta, &points)?) {
            if !v.is_zero_within(ZERO_TOLERANCE) {
                failures.push(json!({ "k": k, "delta": delta, "s": s.re }));
            }
        }
        let evens: Vec<Complex64> = (0..10).map(|j| Complex64::new(-2.0 * j as f64, 0.0)).collect();
        for (s, v) in evens.iter().zip(gamma_ratio_zero_check(k, delta, &evens)?) {
            if v.is_zero_within(ZERO_TOLERANCE) {
                failures.push(json!({ "k": k, "delta": delta, "s": s.re, "unexpected_zero": true }));
            }
        }
    }
    checks.push(Check::new(
        "trivial_zeros",
        failures.is_empty(),
        json!({ "failures": failures, "tolerance": ZERO_TOLERANCE }),
    ));
    Ok(Report::new(config, checks, false))
}

fn lemma_check(config: &ExperimentConfig) -> Result<Report> {
    let path = config
        .input_path
        .as_deref()
        .ok_or_else(|| Error::Domain("lemma-check needs --coeff-file".into()))?;
    let coeffs = read_coefficients(path)?;
    let c_bound = config.c_bound.ok_or_else(|| Error::Domain("lemma-check needs --C".into()))?;
    let lambda = config.lambda.ok_or_else(|| Error::Domain("lemma-check needs --lambda".into()))?;
    let extent = if config.finite {
        SeriesExtent::Exact
    } else {
        SeriesExtent::Truncated
    };
    let n1 = config.n1.unwrap_or(coeffs.len());
    let cert = zero_free_certificate(&coeffs, c_bound, lambda, n1, extent)?;
    let mut checks = vec![Check::new(
        "certificate",
        cert.tail_bound_at_sigma0 < cert.lead_abs,
        serde_json::to_value(&cert).expect("serializable certificate"),
    )];
    let sigma_min = if cert.sigma0.is_finite() { cert.sigma0 } else { 0.0 };
    let region = ScanRegion {
        sigma_min,
        sigma_max: sigma_min + config.sigma_span,
        t_max: config.t_max,
        step: config.step,
    };
    let suspects = zero_scan(&coeffs, c_bound, lambda, extent, region)?;
    checks.push(Check::new(
        "scan_certified_region",
        suspects.is_empty(),
        json!({ "region": region, "suspected_zeros": suspects }),
    ));
    Ok(Report::new(config, checks, false))
}

fn read_coefficients(path: &Path) -> Result<Vec<Complex64>> {
    io::read_complex_values(File::open(path)?)
}

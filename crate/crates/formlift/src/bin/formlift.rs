//! Command-line front end: classification, structure validation, torsion
//! analysis, product-lift verification, closed-form families, and flow
//! integration, with plain-text reports and CSV side files.
//!
//! Exit codes: 0 all checks passed, 1 a check failed with finite residuals,
//! 2 input, parse, or configuration error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use formlift::exterior::{wedge, Form, MultiIndex};
use formlift::flow::{self, FlowConfig, FlowMode, FlowState, Termination};
use formlift::g2;
use formlift::hitchin::{self, StableClass};
use formlift::io;
use formlift::lie_model::LieAlgebra;
use formlift::solutions::{self, FamilyKind};
use formlift::su3::{self, Su3Error};

#[derive(Parser)]
#[command(
    name = "formlift",
    version = formlift::VERSION,
    about = "Stable-form calculus on left-invariant 6- and 7-dimensional geometries"
)]
struct Cli {
    /// Print the file formats and CSV column layouts, then exit.
    #[arg(long)]
    help_formats: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one form file by its open-orbit type
    Classify(ClassifyArgs),
    /// Check the structure conditions for an (omega, phi) pair
    #[command(name = "validate-su3")]
    ValidateSu3(ValidateArgs),
    /// Determine the torsion class of a validated pair on an algebra
    Torsion(TorsionArgs),
    /// Verify the product lift of a pair against d psi = lambda (star psi)
    #[command(name = "lift-verify")]
    LiftVerify(LiftVerifyArgs),
    /// Integrate an evolution flow and write the trajectory as CSV
    Evolve(EvolveArgs),
    /// Sample a closed-form family and verify it at every grid point
    #[command(name = "exact-family")]
    ExactFamily(ExactFamilyArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    /// Form file to classify
    form: PathBuf,
    /// Stability tolerance (relative to coefficient norm)
    #[arg(long, default_value_t = hitchin::DEFAULT_STABILITY_TOL)]
    tol: f64,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    omega: PathBuf,
    #[arg(long)]
    phi: PathBuf,
    /// Tolerance for positivity, compatibility, and volume matching
    #[arg(long, default_value_t = su3::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct TorsionArgs {
    #[arg(long)]
    algebra: PathBuf,
    #[arg(long)]
    omega: PathBuf,
    #[arg(long)]
    phi: PathBuf,
    /// Residual acceptance tolerance
    #[arg(long, default_value_t = su3::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct LiftVerifyArgs {
    #[arg(long)]
    algebra: PathBuf,
    #[arg(long)]
    omega: PathBuf,
    #[arg(long)]
    phi: PathBuf,
    /// Constant of d psi = lambda (star psi); 0 verifies a parallel lift
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// CSV output path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    NearlyParallel,
    HalfFlat,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct EvolveArgs {
    #[arg(long)]
    algebra: PathBuf,
    /// Initial 3-form
    #[arg(long)]
    phi: PathBuf,
    /// Initial 2-form (half-flat mode only; the 4-form state starts at omega^2/2)
    #[arg(long)]
    omega: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Constant of d psi = lambda (star psi) (nearly-parallel mode only)
    #[arg(long)]
    lambda: Option<f64>,
    /// Fixed step size (positive; direction follows from --t1)
    #[arg(long)]
    step: f64,
    #[arg(long)]
    t0: f64,
    #[arg(long)]
    t1: f64,
    /// Record a trajectory point every N accepted steps
    #[arg(long, default_value_t = 10)]
    monitor: usize,
    /// CSV output path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Cone,
    SineCone,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ExactFamilyArgs {
    /// Which closed-form family to sample
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Left end of the sample window (default: family-specific interior span)
    #[arg(long)]
    t0: Option<f64>,
    /// Right end of the sample window
    #[arg(long)]
    t1: Option<f64>,
    /// Number of samples
    #[arg(long, default_value_t = 50)]
    grid: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// CSV output path
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.help_formats {
        print!("{FORMATS_PAGE}");
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (see --help or --help-formats)");
        return ExitCode::from(2);
    };
    let run = match command {
        Command::Classify(a) => run_classify(a),
        Command::ValidateSu3(a) => run_validate(a),
        Command::Torsion(a) => run_torsion(a),
        Command::LiftVerify(a) => run_lift_verify(a),
        Command::Evolve(a) => run_evolve(a),
        Command::ExactFamily(a) => run_exact_family(a),
    };
    match run {
        Ok(Outcome::Pass) => {
            println!("result: PASS");
            ExitCode::SUCCESS
        }
        Ok(Outcome::Fail) => {
            println!("result: FAIL");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Shortest decimal that parses back to the same f64.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn header(command: &str, inputs: &[(&str, String)]) {
    println!("formlift {}", formlift::VERSION);
    println!("command: {command}");
    for (k, v) in inputs {
        println!("  {k}: {v}");
    }
}

struct Report {
    failed: bool,
}

impl Report {
    fn new() -> Self {
        Report { failed: false }
    }

    fn check(&mut self, name: &str, detail: &str, pass: bool) {
        println!("check {name}: {detail}  [{}]", if pass { "pass" } else { "FAIL" });
        if !pass {
            self.failed = true;
        }
    }

    fn skip(&self, name: &str, why: &str) {
        println!("check {name}: skipped ({why})");
    }

    fn outcome(self) -> Outcome {
        if self.failed {
            Outcome::Fail
        } else {
            Outcome::Pass
        }
    }
}

fn write_csv(path: &Path, columns: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::new();
    text.push_str(&format!("# generated {}\n", chrono::Utc::now().to_rfc3339()));
    text.push_str(&format!("# formlift {}\n", formlift::VERSION));
    text.push_str(&columns.join(","));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    println!("csv: {}", path.display());
    Ok(())
}

fn load_form(path: &Path) -> Result<Form> {
    Ok(io::read_form(path)?)
}

fn load_algebra(path: &Path) -> Result<LieAlgebra> {
    Ok(io::read_algebra(path)?)
}

fn run_classify(args: ClassifyArgs) -> Result<Outcome> {
    let form = load_form(&args.form)?;
    header(
        "classify",
        &[
            ("form", args.form.display().to_string()),
            ("degree", form.degree().to_string()),
            ("dimension", form.dim().to_string()),
            ("tol", num(args.tol)),
        ],
    );
    let class = hitchin::classify_with_tol(&form, args.tol)
        .with_context(|| format!("classifying {}", args.form.display()))?;
    let mut rep = Report::new();
    rep.check(
        "stable",
        &format!("class = {class}"),
        class != StableClass::NotStable,
    );
    match form.degree() {
        3 => {
            let lambda = hitchin::lambda3(&form)?;
            println!("quantity lambda: {}", num(lambda));
        }
        4 => {
            let lambda = hitchin::lambda4(&form)?;
            println!("quantity lambda: {}", num(lambda));
        }
        _ => {}
    }
    if class != StableClass::NotStable {
        let eps = hitchin::epsilon(&form)?;
        println!("quantity epsilon: {}", num(eps.value));
    }
    Ok(rep.outcome())
}

fn run_validate(args: ValidateArgs) -> Result<Outcome> {
    let omega = load_form(&args.omega)?;
    let phi = load_form(&args.phi)?;
    header(
        "validate-su3",
        &[
            ("omega", args.omega.display().to_string()),
            ("phi", args.phi.display().to_string()),
            ("tol", num(args.tol)),
        ],
    );
    let mut rep = Report::new();
    report_structure_conditions(&mut rep, &omega, &phi, args.tol)?;
    // authoritative verdict must agree with the per-condition lines
    match su3::validate(&omega, &phi, args.tol) {
        Ok(_) => {}
        Err(e @ Su3Error::WrongShape { .. }) => bail!(e),
        Err(_) => rep.failed = true,
    }
    Ok(rep.outcome())
}

/// Prints one check line per structure condition, in validation order.
fn report_structure_conditions(
    rep: &mut Report,
    omega: &Form,
    phi: &Form,
    tol: f64,
) -> Result<()> {
    if omega.dim() != 6 || omega.degree() != 2 {
        bail!(
            "omega must be a 2-form in dimension 6, got degree {} in dimension {}",
            omega.degree(),
            omega.dim()
        );
    }
    if phi.dim() != 6 || phi.degree() != 3 {
        bail!(
            "phi must be a 3-form in dimension 6, got degree {} in dimension {}",
            phi.degree(),
            phi.dim()
        );
    }
    let co = hitchin::classify(omega)?;
    rep.check(
        "omega-stable",
        &format!("class = {co}"),
        co == StableClass::Symplectic2,
    );
    let cp = hitchin::classify(phi)?;
    rep.check(
        "phi-stable",
        &format!("class = {cp}"),
        cp == StableClass::Positive3,
    );
    if co != StableClass::Symplectic2 || cp != StableClass::Positive3 {
        rep.skip("metric-positivity", "stability failed");
        rep.skip("compatibility", "stability failed");
        rep.skip("volume-match", "stability failed");
        return Ok(());
    }
    let pairing = su3::induced_pairing(omega, phi)?;
    let sym = (&pairing + &pairing.transpose()) * 0.5;
    let min_eig = sym.clone().symmetric_eigen().eigenvalues.min();
    let threshold = tol * sym.norm();
    rep.check(
        "metric-positivity",
        &format!("min_eig = {}, threshold = {}", num(min_eig), num(threshold)),
        min_eig > threshold,
    );
    let compat = wedge(omega, phi)?.norm();
    rep.check(
        "compatibility",
        &format!("norm(omega wedge phi) = {}, tol = {}", num(compat), num(tol)),
        compat <= tol,
    );
    let eps_omega = hitchin::eps2(omega)?.value;
    let eps_phi = hitchin::eps3(phi)?.value;
    let bound = tol * eps_omega.abs();
    rep.check(
        "volume-match",
        &format!(
            "eps_phi = {}, eps_omega = {}, bound = {}",
            num(eps_phi),
            num(eps_omega),
            num(bound)
        ),
        (eps_phi - eps_omega).abs() <= bound,
    );
    Ok(())
}

fn run_torsion(args: TorsionArgs) -> Result<Outcome> {
    let algebra = load_algebra(&args.algebra)?;
    let omega = load_form(&args.omega)?;
    let phi = load_form(&args.phi)?;
    header(
        "torsion",
        &[
            ("algebra", format!("{} ({})", args.algebra.display(), algebra.to_salamon())),
            ("omega", args.omega.display().to_string()),
            ("phi", args.phi.display().to_string()),
            ("tol", num(args.tol)),
        ],
    );
    let mut rep = Report::new();
    let s = match su3::validate(&omega, &phi, args.tol) {
        Ok(s) => s,
        Err(e @ Su3Error::WrongShape { .. }) => bail!(e),
        Err(e) => {
            rep.check("structure-valid", &e.to_string(), false);
            return Ok(rep.outcome());
        }
    };
    rep.check("structure-valid", "conditions hold", true);
    let tc = su3::classify_torsion(&algebra, &s, args.tol);
    let r = tc.residuals;
    println!("residual nearly-kaehler-domega: {}", num(r.nearly_kaehler_domega));
    println!("residual nearly-kaehler-dphihat: {}", num(r.nearly_kaehler_dphihat));
    println!("residual half-flat-dphi: {}", num(r.half_flat_dphi));
    println!("residual half-flat-domega2: {}", num(r.half_flat_domega2));
    println!(
        "residual nearly-half-flat: {} (lambda_fit = {})",
        num(r.nearly_half_flat),
        num(r.lambda_fit)
    );
    println!("threshold: {}", num(r.scale * args.tol));
    println!("class: {}", tc.tag);
    if let Some(lg) = tc.lambda_g2() {
        println!("quantity lambda-g2: {}", num(lg));
    }
    Ok(rep.outcome())
}

fn run_lift_verify(args: LiftVerifyArgs) -> Result<Outcome> {
    let algebra = load_algebra(&args.algebra)?;
    let omega = load_form(&args.omega)?;
    let phi = load_form(&args.phi)?;
    header(
        "lift-verify",
        &[
            ("algebra", format!("{} ({})", args.algebra.display(), algebra.to_salamon())),
            ("omega", args.omega.display().to_string()),
            ("phi", args.phi.display().to_string()),
            ("lambda", num(args.lambda)),
            ("tol", num(args.tol)),
        ],
    );
    let mut rep = Report::new();
    let s = match su3::validate(&omega, &phi, su3::DEFAULT_TOL) {
        Ok(s) => s,
        Err(e @ Su3Error::WrongShape { .. }) => bail!(e),
        Err(e) => {
            rep.check("structure-valid", &e.to_string(), false);
            return Ok(rep.outcome());
        }
    };
    rep.check("structure-valid", "conditions hold", true);

    // static lift: the pair is held constant in t, so both time derivatives
    // vanish and the defining equation reduces to the two constraint norms
    let phidot = Form::zero(6, 3)?;
    let omegadot = Form::zero(6, 2)?;
    let starpsi = g2::star_psi(&s);
    let scale = 1.0 + starpsi.norm();
    let residual = g2::nearly_parallel_residual(&algebra, &s, &phidot, args.lambda)?;
    let dpsi_norm = g2::d7_psi(&algebra, s.omega(), s.phi(), &phidot)?.norm();
    let dstarpsi_norm = g2::d7_star_psi(&algebra, &s, &omegadot)?.norm();
    let omega2 = wedge(s.omega(), s.omega())?;
    let c_phi = (&algebra.d_ce(s.phi())? + &omega2.scaled(args.lambda / 2.0)).norm();
    let c_omega = (&algebra.d_ce(s.omega())? + &s.phihat().scaled(args.lambda)).norm();
    let eps_phi = hitchin::eps3(s.phi())?.value;
    let eps_omega = hitchin::eps2(s.omega())?.value;

    rep.check(
        "nearly-parallel",
        &format!(
            "residual = {}, bound = {}",
            num(residual),
            num(args.tol * scale)
        ),
        residual <= args.tol * scale,
    );
    println!("quantity dpsi-norm: {}", num(dpsi_norm));
    println!("quantity dstarpsi-norm: {}", num(dstarpsi_norm));
    println!("quantity constraint-dphi: {}", num(c_phi));
    println!("quantity constraint-domega: {}", num(c_omega));
    println!("quantity eps-phi: {}", num(eps_phi));
    println!("quantity eps-omega: {}", num(eps_omega));

    if let Some(out) = &args.out {
        let columns: Vec<String> = [
            "t",
            "residual",
            "dpsi_norm",
            "dstarpsi_norm",
            "constraint_dphi",
            "constraint_domega",
            "eps_phi",
            "eps_omega",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let row = vec![
            num(0.0),
            num(residual),
            num(dpsi_norm),
            num(dstarpsi_norm),
            num(c_phi),
            num(c_omega),
            num(eps_phi),
            num(eps_omega),
        ];
        write_csv(out, &columns, &[row])?;
    }
    Ok(rep.outcome())
}

fn run_evolve(args: EvolveArgs) -> Result<Outcome> {
    let algebra = load_algebra(&args.algebra)?;
    let phi = load_form(&args.phi)?;
    let mode = match args.mode {
        ModeArg::NearlyParallel => FlowMode::NearlyParallel,
        ModeArg::HalfFlat => FlowMode::HalfFlat,
    };
    let (lambda, sigma) = match mode {
        FlowMode::NearlyParallel => {
            if args.omega.is_some() {
                bail!("--omega applies to half-flat mode only; the nearly-parallel state is phi alone");
            }
            let lambda = args
                .lambda
                .context("nearly-parallel mode requires --lambda")?;
            (lambda, None)
        }
        FlowMode::HalfFlat => {
            if args.lambda.is_some() {
                bail!("--lambda applies to nearly-parallel mode only");
            }
            let omega_path = args
                .omega
                .as_ref()
                .context("half-flat mode requires --omega (the 4-form state starts at omega^2/2)")?;
            let omega = load_form(omega_path)?;
            if omega.dim() != 6 || omega.degree() != 2 {
                bail!(
                    "omega must be a 2-form in dimension 6, got degree {} in dimension {}",
                    omega.degree(),
                    omega.dim()
                );
            }
            (0.0, Some(wedge(&omega, &omega)?.scaled(0.5)))
        }
    };
    header(
        "evolve",
        &[
            ("algebra", format!("{} ({})", args.algebra.display(), algebra.to_salamon())),
            ("phi", args.phi.display().to_string()),
            (
                "mode",
                match mode {
                    FlowMode::NearlyParallel => "nearly-parallel".to_string(),
                    FlowMode::HalfFlat => "half-flat".to_string(),
                },
            ),
            ("lambda", num(lambda)),
            ("step", num(args.step)),
            ("t0", num(args.t0)),
            ("t1", num(args.t1)),
            ("monitor", args.monitor.to_string()),
        ],
    );
    let state0 = FlowState {
        t: args.t0,
        phi,
        sigma,
    };
    let config = FlowConfig {
        lambda,
        step: args.step,
        t_end: args.t1,
        mode,
        monitor_every: args.monitor,
    };
    let trajectory = flow::integrate(&algebra, &state0, &config)?;

    let mut columns = vec!["t".to_string()];
    for rank in 0..20 {
        let mi = MultiIndex::from_rank(6, 3, rank)?;
        let name: String = mi.indices().iter().map(|i| i.to_string()).collect();
        columns.push(format!("phi_{name}"));
    }
    columns.extend(
        ["c1", "c2", "c3", "eps_phi", "hamiltonian"]
            .iter()
            .map(|s| s.to_string()),
    );
    let rows: Vec<Vec<String>> = trajectory
        .points()
        .iter()
        .map(|p| {
            let mut row = vec![num(p.state.t)];
            row.extend(p.state.phi.coeffs().iter().map(|&c| num(c)));
            let d = &p.diagnostics;
            row.push(num(d.c1));
            row.push(num(d.c2));
            row.push(num(d.c3));
            row.push(num(d.eps_phi));
            row.push(d.hamiltonian.map(num).unwrap_or_default());
            row
        })
        .collect();
    write_csv(&args.out, &columns, &rows)?;

    let mut rep = Report::new();
    let term = trajectory.termination();
    let last = trajectory.final_point();
    rep.check(
        "completed",
        &format!(
            "termination = {term}, points = {}, final t = {}",
            trajectory.points().len(),
            num(last.state.t)
        ),
        term == Termination::Completed,
    );
    println!("quantity final-c1: {}", num(last.diagnostics.c1));
    println!("quantity final-c2: {}", num(last.diagnostics.c2));
    println!("quantity final-c3: {}", num(last.diagnostics.c3));
    println!("quantity final-eps-phi: {}", num(last.diagnostics.eps_phi));
    if let Some(h) = last.diagnostics.hamiltonian {
        println!("quantity final-hamiltonian: {}", num(h));
    }
    Ok(rep.outcome())
}

fn run_exact_family(args: ExactFamilyArgs) -> Result<Outcome> {
    let (algebra, base) = solutions::nearly_kahler_su2su2();
    let family = match args.family {
        FamilyArg::Cone => solutions::cone_family(&algebra, &base)?,
        FamilyArg::SineCone => solutions::sine_cone_family(&algebra, &base)?,
    };
    let (t0, t1) = match family.kind() {
        FamilyKind::Cone => (args.t0.unwrap_or(0.5), args.t1.unwrap_or(3.0)),
        FamilyKind::SineCone => (
            args.t0.unwrap_or(0.2),
            args.t1.unwrap_or(std::f64::consts::PI - 0.2),
        ),
    };
    if args.grid < 2 {
        bail!("--grid must be at least 2");
    }
    header(
        "exact-family",
        &[
            ("family", family.kind().to_string()),
            ("algebra", algebra.to_salamon()),
            ("t0", num(t0)),
            ("t1", num(t1)),
            ("grid", args.grid.to_string()),
            ("lambda", num(family.lambda())),
            ("tol", num(args.tol)),
        ],
    );
    let grid = family.sample_grid(t0, t1, args.grid)?;

    let mut rep = Report::new();
    let mut rows = Vec::with_capacity(grid.len());
    let mut max_residual: f64 = 0.0;
    let mut max_dstarpsi: f64 = 0.0;
    let mut all_within = true;
    for sample in grid.samples() {
        let s = su3::validate(&sample.omega, &sample.phi, su3::DEFAULT_TOL)?;
        let starpsi = g2::star_psi(&s);
        let scale = 1.0 + starpsi.norm();
        let residual =
            g2::nearly_parallel_residual(&algebra, &s, &sample.phidot, family.lambda())?;
        let dpsi_norm = g2::d7_psi(&algebra, &sample.omega, &sample.phi, &sample.phidot)?.norm();
        let dstarpsi_norm = g2::d7_star_psi(&algebra, &s, &sample.omegadot)?.norm();
        let eps_phi = hitchin::eps3(&sample.phi)?.value;
        let eps_omega = hitchin::eps2(&sample.omega)?.value;
        let metric_scale = s.metric().det().powf(1.0 / 6.0);
        max_residual = max_residual.max(residual / scale);
        // a parallel lift must be closed and coclosed; the nearly parallel
        // equation already ties d(star psi) to d(d psi) = 0
        let within = residual <= args.tol * scale
            && (family.kind() != FamilyKind::Cone || dstarpsi_norm <= args.tol * scale);
        max_dstarpsi = max_dstarpsi.max(dstarpsi_norm / scale);
        all_within &= within;
        rows.push(vec![
            num(sample.t),
            num(residual),
            num(dpsi_norm),
            num(dstarpsi_norm),
            num(eps_phi),
            num(eps_omega),
            num(metric_scale),
        ]);
    }
    rep.check(
        "defining-equation",
        &format!(
            "max scaled residual = {}, tol = {}",
            num(max_residual),
            num(args.tol)
        ),
        all_within,
    );
    println!("quantity max-scaled-dstarpsi-norm: {}", num(max_dstarpsi));

    if let Some(out) = &args.out {
        let columns: Vec<String> = [
            "t",
            "residual",
            "dpsi_norm",
            "dstarpsi_norm",
            "eps_phi",
            "eps_omega",
            "metric_scale",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        write_csv(out, &columns, &rows)?;
    }
    Ok(rep.outcome())
}

const FORMATS_PAGE: &str = r##"FILE FORMATS

Form file (JSON):
  {
    "dimension": 6,          spaces of dimension 6 and 7 are supported
    "degree": 3,
    "terms": [
      {"indices": [1, 2, 3], "coeff": 1.0},
      ...
    ]
  }
  Indices are 1-based and must be strictly increasing within each term;
  every term must carry exactly `degree` indices. Omitted basis monomials
  are zero. Unknown fields are rejected.

Lie algebra file (JSON), one of two shapes:
  {"salamon": "(23,31,12,56,64,45)"}
    Compact notation: entry k lists d(e^k) as signed two-digit index pairs,
    e.g. "23" for e^2 wedge e^3, 0 for a closed covector.
  {"differentials": [
      {"k": 5, "terms": [{"i": 1, "j": 2, "coeff": 1.0}]},
      ...
  ]}
    Explicit coefficients of d(e^k); pairs require i < j; covectors not
    listed are closed. Both shapes are checked against d^2 = 0 (Jacobi).

CSV CONVENTIONS
  Line 1: "# generated <UTC timestamp, RFC 3339>" (the only
          non-deterministic line).
  Line 2: "# formlift <version>".
  Line 3: the column header. Numbers use the shortest decimal that parses
  back to the identical binary value.

CSV COLUMNS
  lift-verify:
    t               fixed 0 (the lifted pair is t-independent)
    residual        | d psi - lambda (star psi) | for the static lift
    dpsi_norm       | d psi |
    dstarpsi_norm   | d (star psi) |
    constraint_dphi    | d phi + (lambda/2) omega^2 |
    constraint_domega  | d omega + lambda (hat phi) |
    eps_phi, eps_omega  volume functionals of the pair

  evolve:
    t               sample time
    phi_ijk         20 coefficient columns of phi, indices in increasing
                    lexicographic order (phi_123 ... phi_456)
    c1              | d phi + (lambda/2) omega^2 |  (lambda = 0 in
                    half-flat mode)
    c2              | omega wedge phi |
    c3              | eps(phi) - eps(omega) |
    eps_phi         volume functional of phi
    hamiltonian     energy 2 lambda (eps(phi) - eps(pi(phi))); empty when
                    not recorded (half-flat mode or non-unimodular algebra)

  exact-family:
    t               sample time
    residual        | d psi - lambda (star psi) | with the family constant
    dpsi_norm       | d psi |
    dstarpsi_norm   | d (star psi) |
    eps_phi, eps_omega  volume functionals at the sample
    metric_scale    det(g)^(1/6) of the induced 6-dimensional metric

EXIT CODES
  0  all checks passed
  1  a check failed with finite residuals
  2  input, parse, or configuration error
"##;

//! Command-line front end.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::decompose;
use crate::error::{Error, Result};
use crate::model::{self, CoverModel};
use crate::multicurve::{self, Multicurve, DEFAULT_CAP};
use crate::rational::Q;
use crate::reduction;
use crate::spectral::{self, NonnegMatrix};
use crate::weights;

pub const LOG_ENV: &str = "OBSTRUCTION_FORGE_LOG";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Text,
    Structured,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "obstruction-forge", version, about = "Curve-system analysis of branched covers with rotation annuli")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Tolerance for floating spectral estimates.
    #[arg(long, global = true, default_value = "1e-9")]
    pub tol: f64,

    /// Largest curve universe enumerated exhaustively.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: usize,

    #[arg(long, global = true, value_enum, default_value = "text")]
    pub output: Output,

    /// Same as `--output dot`.
    #[arg(long, global = true)]
    pub dot: bool,

    /// Grötzsch constant used for annular pieces the model does not list.
    #[arg(long, global = true, value_name = "RATIONAL")]
    pub grotzsch_default: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the static consistency checks.
    Validate { model: PathBuf },
    /// Generated curves, their transition matrix and contraction vector.
    Gamma { model: PathBuf },
    /// Enumerate stable multicurves and look for an obstruction.
    Obstruction { model: PathBuf },
    /// Piece dynamics, boundary classes and renormalizations.
    Decompose { model: PathBuf },
    /// Check the eigenvalue reduction for a comma-separated multicurve.
    Reduce { model: PathBuf, multicurve: String },
    /// Compare the global verdict with the per-cycle verdicts.
    Combine { model: PathBuf },
    /// Side weights, parameter threshold and Grötzsch certificate.
    Certify { model: PathBuf },
}

impl Command {
    fn model_path(&self) -> &PathBuf {
        match self {
            Command::Validate { model }
            | Command::Gamma { model }
            | Command::Obstruction { model }
            | Command::Decompose { model }
            | Command::Reduce { model, .. }
            | Command::Combine { model }
            | Command::Certify { model } => model,
        }
    }
}

/// Rendered report and whether every check passed.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

fn structured<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn matrix_text(w: &NonnegMatrix) -> String {
    if w.rows() == 0 {
        "  (empty)\n".to_string()
    } else {
        w.to_string().lines().map(|l| format!("  {l}\n")).collect()
    }
}

fn load(path: &PathBuf) -> Result<CoverModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    model::parse_model(&text)
}

#[derive(Serialize)]
struct GammaReport {
    gamma: Multicurve,
    layers: Vec<Vec<String>>,
    matrix: NonnegMatrix,
    lambda: f64,
    contracting: bool,
    contraction_vector: Option<Vec<Q>>,
}

fn constants(cli: &Cli, m: &CoverModel) -> Result<BTreeMap<String, Q>> {
    let mut c = m.grotzsch_constants.clone();
    if let Some(d) = &cli.grotzsch_default {
        c.insert("default".into(), Q::parse(d)?);
    }
    Ok(c)
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Error::Argument(format!("--tol must be positive, got {}", cli.tol)));
    }
    if cli.cap == 0 {
        return Err(Error::Argument("--cap must be at least 1".into()));
    }
    let output = if cli.dot { Output::Dot } else { cli.output };
    if output == Output::Dot && !matches!(cli.command, Command::Decompose { .. }) {
        return Err(Error::Argument("DOT output is only available for `decompose`".into()));
    }
    let m = load(cli.command.model_path())?;
    log::info!("loaded model with {} curves and {} pieces", m.curves.len(), m.pieces.len());
    let mut t = String::new();
    let (text, passed) = match &cli.command {
        Command::Validate { .. } => {
            let r = model::validate_model(&m, cli.cap);
            for c in &r.checks {
                let _ = writeln!(t, "{} {} [{}] {}", verdict(c.passed), c.name, c.location, c.detail);
            }
            let _ = writeln!(t, "{} of {} checks passed", r.checks.iter().filter(|c| c.passed).count(), r.checks.len());
            (if output == Output::Structured { structured(&r) } else { t }, r.passed())
        }
        Command::Gamma { .. } => {
            let gamma = multicurve::generate_gamma(&m)?;
            let matrix = multicurve::transition_matrix(&m, &gamma)?;
            let contracting = spectral::is_contracting(&matrix)?;
            let r = GammaReport {
                layers: multicurve::gamma_layers(&m)?,
                lambda: spectral::power_lambda(&matrix, cli.tol)?,
                contraction_vector: if contracting { Some(spectral::contraction_vector(&matrix)?) } else { None },
                gamma,
                matrix,
                contracting,
            };
            let _ = writeln!(t, "generated curves: {}", r.gamma);
            for (k, layer) in r.layers.iter().enumerate() {
                let _ = writeln!(t, "  layer {}: {}", k + 1, layer.join(", "));
            }
            let _ = writeln!(t, "transition matrix:");
            t.push_str(&matrix_text(&r.matrix));
            let _ = writeln!(t, "leading eigenvalue ~ {:.12}", r.lambda);
            let _ = writeln!(t, "contracting: {}", if r.contracting { "yes" } else { "no" });
            if let Some(v) = &r.contraction_vector {
                let parts: Vec<String> = r.gamma.ids().iter().zip(v).map(|(c, x)| format!("{c}={x}")).collect();
                let _ = writeln!(t, "contraction vector: {}", parts.join(", "));
            }
            (if output == Output::Structured { structured(&r) } else { t }, r.contracting)
        }
        Command::Obstruction { .. } => {
            let r = reduction::obstruction(&m, cli.cap, cli.tol)?;
            if !r.obstructed {
                if r.stable.len() == 1 && r.stable[0].multicurve.is_empty() {
                    let _ = writeln!(t, "unobstructed; only stable multicurve is ∅");
                } else {
                    let _ = writeln!(t, "unobstructed; {} stable multicurves, all contracting", r.stable.len());
                }
            } else {
                let _ = writeln!(t, "obstructed; {} of {} stable multicurves are not contracting", r.witnesses.len(), r.stable.len());
                for w in &r.witnesses {
                    let _ = writeln!(t, "  witness {w}");
                }
            }
            (if output == Output::Structured { structured(&r) } else { t }, !r.obstructed)
        }
        Command::Decompose { .. } => {
            let r = decompose::classify(&m)?;
            let text = match output {
                Output::Dot => decompose::to_dot(&m, &r.dynamics),
                Output::Structured => structured(&r),
                Output::Text => {
                    for c in &r.dynamics.cycles {
                        let _ = writeln!(t, "cycle {} (period {}): {}", c.representative, c.period, c.members.join(" -> "));
                    }
                    for tail in &r.dynamics.tails {
                        let _ = writeln!(t, "tail {} (depth {})", tail.piece, tail.depth);
                    }
                    for b in &r.dynamics.boundary {
                        let _ = writeln!(t, "boundary {} of {}: {:?}", b.curve, b.piece, b.class);
                    }
                    for rn in &r.renormalizations {
                        let _ = writeln!(
                            t,
                            "renormalization at {}: {:?}, degree {}, {} curves",
                            rn.cycle.representative,
                            rn.kind,
                            rn.degree,
                            rn.curve_universe.len()
                        );
                    }
                    let _ = writeln!(
                        t,
                        "siegel {}, thurston {}, homeomorphism {}",
                        r.siegel_count, r.thurston_count, r.homeomorphism_count
                    );
                    for c in &r.checks {
                        let _ = writeln!(t, "{} {} [{}] {}", verdict(c.passed), c.name, c.location, c.detail);
                    }
                    t
                }
            };
            (text, r.passed())
        }
        Command::Reduce { multicurve: list, .. } => {
            let c = Multicurve::parse(&m, list)?;
            let r = reduction::verify_reduction_identity(&m, &c, cli.tol)?;
            let _ = writeln!(
                t,
                "split: generated {}, tail {}, cycles {}",
                r.split.c_gamma,
                r.split.c_s,
                r.split
                    .sigma
                    .iter()
                    .map(|p| format!("{}:{}", p.representative, p.base()))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            let _ = writeln!(t, "{} block triangular", verdict(r.block_triangular()));
            let _ = writeln!(t, "{} reordering keeps the eigenvalue", verdict(r.reorder_invariant));
            let _ = writeln!(t, "{} tail block nilpotent (size {})", verdict(r.tail_nilpotent), r.tail_block_size);
            for cy in &r.cycles {
                let ok = cy.renormalized_matches && cy.power_block_diagonal && cy.cyclic.agree;
                let _ = writeln!(
                    t,
                    "{} cycle {} period {}: step product equals renormalized matrix, eigenvalue ~ {:.12}, contribution ~ {:.12}",
                    verdict(ok),
                    cy.representative,
                    cy.period,
                    cy.lambda_renormalized,
                    cy.contribution
                );
            }
            let _ = writeln!(
                t,
                "{} eigenvalue ~ {:.12} vs max formula ~ {:.12} (generated part ~ {:.12})",
                verdict(r.identity_holds),
                r.lambda,
                r.lambda_max_formula,
                r.lambda_gamma
            );
            (if output == Output::Structured { structured(&r) } else { t }, r.passed())
        }
        Command::Combine { .. } => {
            let r = reduction::check_combination(&m, cli.cap, cli.tol)?;
            let side = |o: bool| if o { "obstructed" } else { "unobstructed" };
            let _ = writeln!(t, "whole model: {} ({} stable multicurves)", side(r.lhs_obstructed), r.stable_count);
            if let Some(w) = &r.lhs_witness {
                let _ = writeln!(t, "  witness {w}");
            }
            if let Some(p) = &r.lhs_projection {
                let _ = writeln!(t, "  obstructs through {p}");
            }
            let _ = writeln!(
                t,
                "generated curves {}: {}",
                r.gamma,
                if r.gamma_contracting { "contracting" } else { "not contracting" }
            );
            for c in &r.cycles {
                let _ = writeln!(t, "cycle {} ({:?}): {}", c.representative, c.kind, side(c.obstructed));
                if let (Some(w), Some(l)) = (&c.witness, &c.lifted) {
                    let _ = writeln!(t, "  witness {w}, lifted {l}");
                }
            }
            let _ = writeln!(t, "{} verdicts agree", verdict(r.agree));
            (if output == Output::Structured { structured(&r) } else { t }, r.agree)
        }
        Command::Certify { .. } => {
            let r = weights::certify(&m, &constants(cli, &m)?)?;
            for e in r.rho.entries.values() {
                let _ = writeln!(t, "rho {} (level {}): + {}, - {}", e.curve, e.level, e.plus, e.minus);
            }
            for e in &r.sigma.entries {
                let _ = writeln!(t, "sigma {} {} ({:?} in {}): {}", e.curve, e.side, e.class, e.piece, e.form);
            }
            let th = &r.threshold;
            let _ = writeln!(t, "threshold t* = {} ({} inequalities)", th.t_star, th.inequalities.len());
            let _ = writeln!(t, "{} all inequalities at t = {}", verdict(th.certified), th.certified_at);
            for g in &r.grotzsch.checks {
                let _ = writeln!(
                    t,
                    "{} {} {} in {}: modulus {} > embedded {}",
                    verdict(g.passed),
                    g.curve,
                    g.side,
                    g.piece,
                    g.modulus,
                    g.embedded
                );
            }
            (if output == Output::Structured { structured(&r) } else { t }, r.passed())
        }
    };
    Ok(Outcome { text, passed })
}

/// Runs a parsed command line, writing the report to `out` and errors to
/// `err`. Returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli) {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            if o.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_input() {
                2
            } else {
                1
            }
        }
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(err, "{}", e.render());
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn models_dir() -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models")
    }

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["obstruction-forge".to_string()];
        full.extend(args.iter().map(|a| a.to_string()));
        let code = main_with_args(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn model(name: &str) -> String {
        models_dir().join(name).display().to_string()
    }

    #[test]
    fn shi_is_unobstructed() {
        let (code, out, _) = run_args(&["obstruction", &model("shi.json")]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "unobstructed; only stable multicurve is ∅");
    }

    #[test]
    fn shi_dot_has_two_self_loops() {
        let (code, out, _) = run_args(&["decompose", &model("shi.json"), "--dot"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("digraph"));
        assert_eq!(out.matches("\"inner\" -> \"inner\"").count() + out.matches("\"outer\" -> \"outer\"").count(), 2);
    }

    #[test]
    fn reduce_two_ring() {
        let (code, out, _) = run_args(&["reduce", &model("two_ring.json"), "g1,g2,u"]);
        assert_eq!(code, 0, "{out}");
        assert!(!out.contains("FAIL"));
    }

    #[test]
    fn bad_multicurve_is_input_error() {
        let (code, _, err) = run_args(&["reduce", &model("two_ring.json"), "g1,nope"]);
        assert_eq!(code, 2);
        assert!(err.contains("nope"));
    }

    #[test]
    fn missing_file_and_unknown_subcommand() {
        assert_eq!(run_args(&["validate", "/nonexistent/model.json"]).0, 2);
        assert_eq!(run_args(&["frobnicate", &model("shi.json")]).0, 2);
        assert_eq!(run_args(&["gamma", &model("shi.json"), "--tol", "0"]).0, 2);
    }
}

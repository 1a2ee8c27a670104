mod svg;

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use opval_core::algebra::{fmt_scalar, real, AlgElem, Automorphism, TraceFunctional};
use opval_core::circular::{alternating_moment, check_circular_trace, Start};
use opval_core::cumulants::{check_selfadjoint, check_trace_condition, CheckReport, DEFAULT_MAX_ORDER};
use opval_core::io::{self, elem_to_json, family_to_json, parse_rational, resolve_model, scalar_to_json, Model};
use opval_core::ncpart::enumerate_nc;
use opval_core::rdiag::{
    check_polar_obstruction, check_rdiag_cumulants, check_rdiag_words, check_theta_twist, m2_freeness_check,
    RdiagReport, DEFAULT_M2_BUDGET,
};
use opval_core::series::solve_fg;
use opval_core::spectral::appendix::{appendix_component_series, gpoly, h_to_g_curve, hpoly, verify_h_quartic};
use opval_core::spectral::density::{
    default_grid, density, discriminant_roots, moments, operator_norm, DEFAULT_EPS, DEFAULT_POINTS,
};

#[derive(Parser)]
#[command(name = "opval", version, about = "Operator-valued free probability toolkit")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the primary artifact to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "OPVAL_THREADS")]
    threads: Option<usize>,
    /// Maximal word length for family-valued computations.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ORDER)]
    max_order: usize,
    /// Distance to the real axis for Stieltjes inversion.
    #[arg(long, global = true, default_value_t = DEFAULT_EPS)]
    eps: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Noncrossing partitions.
    #[command(subcommand)]
    Nc(NcCmd),
    /// Moment and cumulant families.
    #[command(subcommand)]
    Cumulants(CumulantsCmd),
    /// R-diagonality certificates.
    #[command(subcommand)]
    Rdiag(RdiagCmd),
    /// Operator-valued circular elements.
    #[command(subcommand)]
    Circular(CircularCmd),
    /// B-valued generating series.
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Spectral density of a*a for the two-point example.
    #[command(subcommand)]
    Spectral(SpectralCmd),
}

#[derive(Subcommand)]
enum NcCmd {
    /// List NC(n) in lexicographic order of block lists.
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=14))]
        n: u8,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Moments,
    Cumulants,
}

#[derive(Subcommand)]
enum CumulantsCmd {
    /// Convert a family file between moments and cumulants.
    Convert {
        #[arg(long = "in")]
        input: String,
        #[arg(long, value_enum)]
        to: KindArg,
    },
    /// Trace condition for the cumulants of a model, up to `--max-order`.
    CheckTrace {
        #[arg(long)]
        model: String,
        /// Trace weights, e.g. `1/2,1/2`.
        #[arg(long)]
        tau: String,
    },
    /// Self-adjointness under `a ↔ a*`, up to `--max-order`.
    CheckSelfadjoint {
        #[arg(long)]
        model: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RdiagMode {
    Cumulant,
    Word,
    M2,
}

#[derive(Subcommand)]
enum RdiagCmd {
    /// Certify R-diagonality or report a witness.
    Check {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, value_enum, default_value = "word")]
        mode: RdiagMode,
        /// Degree bound of the R-side monomials in `m2` mode.
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
        #[arg(long, default_value_t = DEFAULT_M2_BUDGET)]
        budget: usize,
    },
    /// θ-twist identity between the alternating cumulants.
    Twist {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 3)]
        max_k: usize,
        /// Automorphism as a 0-indexed permutation; default reverses coordinates.
        #[arg(long)]
        theta: Option<String>,
    },
    /// Cumulant-side obstruction to a free polar decomposition.
    Polar {
        #[arg(long)]
        model: String,
    },
}

#[derive(Subcommand)]
enum CircularCmd {
    /// `E((aa*)^k)` and `E((a*a)^k)` for `k ≤ order`.
    Moments {
        #[arg(long)]
        model: String,
        #[arg(long)]
        order: usize,
    },
    /// Traciality of a circular model.
    CheckTrace {
        #[arg(long)]
        model: String,
        #[arg(long)]
        tau: String,
    },
}

#[derive(Subcommand)]
enum SeriesCmd {
    /// Coefficients of F and G with `b_1 = b_2 = 1` unless given.
    Fg {
        #[arg(long)]
        model: String,
        #[arg(long)]
        order: usize,
        /// Apply the trace (default uniform weights).
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        tau: Option<String>,
        /// Coordinates of b_1, e.g. `1,2`.
        #[arg(long)]
        b1: Option<String>,
        #[arg(long)]
        b2: Option<String>,
    },
}

#[derive(Subcommand)]
enum SpectralCmd {
    /// Exact h-series and its quartic identity.
    VerifyAppendix {
        #[arg(long, default_value_t = 30)]
        order: usize,
    },
    /// Density samples as CSV (`t,density`).
    Density {
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Report the raw ε-smoothed density.
        #[arg(long)]
        no_richardson: bool,
    },
    /// Operator norm from the discriminant.
    Norm,
}

/// Result of one command: a report and whether it certifies.
struct Outcome {
    report: Value,
    text: String,
    ok: bool,
}

impl Outcome {
    fn new(report: Value, text: String, ok: bool) -> Self {
        Self { report, text, ok }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) => match emit(&cli.global, &out) {
            Ok(()) => ExitCode::from(if out.ok { 0 } else { 1 }),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(g: &Global, out: &Outcome) -> anyhow::Result<()> {
    let body = if g.json {
        format!("{}\n", serde_json::to_string_pretty(&out.report)?)
    } else {
        out.text.clone()
    };
    std::io::stdout().write_all(body.as_bytes())?;
    Ok(())
}

fn write_artifact(path: &Option<PathBuf>, body: &str) -> anyhow::Result<Option<String>> {
    match path {
        Some(p) => {
            fs::write(p, body).with_context(|| format!("writing {}", p.display()))?;
            Ok(Some(p.display().to_string()))
        }
        None => Ok(None),
    }
}

fn model(spec: &str) -> anyhow::Result<Model> {
    Ok(resolve_model(spec)?)
}

fn tau_from(s: &str, dim: usize) -> anyhow::Result<TraceFunctional> {
    let w = s.split(',').map(parse_rational).collect::<Result<Vec<_>, _>>()?;
    if w.len() != dim {
        bail!("trace needs {dim} weights, got {}", w.len());
    }
    Ok(TraceFunctional::new(w)?)
}

fn elem_from(s: &str, dim: usize) -> anyhow::Result<AlgElem> {
    let c = s.split(',').map(|x| parse_rational(x).map(real)).collect::<Result<Vec<_>, _>>()?;
    if c.len() != dim {
        bail!("element needs {dim} coordinates, got {}", c.len());
    }
    Ok(AlgElem::new(c))
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Nc(NcCmd::Enumerate { n }) => nc_enumerate(g, usize::from(*n)),
        Command::Cumulants(c) => cumulants_cmd(g, c),
        Command::Rdiag(c) => rdiag_cmd(c),
        Command::Circular(c) => circular_cmd(c),
        Command::Series(SeriesCmd::Fg { model: m, order, trace, tau, b1, b2 }) => {
            series_fg(g, m, *order, *trace, tau.as_deref(), b1.as_deref(), b2.as_deref())
        }
        Command::Spectral(c) => spectral_cmd(g, c),
    }
}

fn nc_enumerate(g: &Global, n: usize) -> anyhow::Result<Outcome> {
    let parts = enumerate_nc(n)?;
    let blocks: Vec<Vec<Vec<usize>>> = parts.iter().map(|p| p.blocks()).collect();
    let mut text: String = parts.iter().map(|p| format!("{p}\n")).collect();
    if let Some(path) = write_artifact(&g.out, &text)? {
        text = format!("{} partitions written to {path}\n", parts.len());
    }
    Ok(Outcome::new(json!(blocks), text, true))
}

fn check_json(r: &CheckReport) -> Value {
    json!({
        "holds": r.holds,
        "checked": r.checked,
        "counterexample": r.counterexample.as_ref().map(|v| json!({
            "word": v.word,
            "tuple": v.tuple,
            "lhs": elem_to_json(&v.lhs),
            "rhs": elem_to_json(&v.rhs),
        })),
    })
}

fn check_text(name: &str, r: &CheckReport) -> String {
    match &r.counterexample {
        None => format!("{name}: holds ({} checks)\n", r.checked),
        Some(v) => format!(
            "{name}: violated at word {:?}, basis tuple {:?}: {} != {}\n",
            v.word, v.tuple, v.lhs, v.rhs
        ),
    }
}

fn check_outcome(command: &str, params: Value, name: &str, r: &CheckReport) -> Outcome {
    let report = json!({ "command": command, "parameters": params, "report": check_json(r) });
    Outcome::new(report, check_text(name, r), r.holds)
}

fn cumulants_cmd(g: &Global, c: &CumulantsCmd) -> anyhow::Result<Outcome> {
    match c {
        CumulantsCmd::Convert { input, to } => {
            let doc = io::read_json_file(input.as_ref())?;
            let fam = io::family_from_json(&doc, None, None, "")?;
            let m = Model::Family(fam);
            let out = match to {
                KindArg::Moments => m.moments(g.max_order)?,
                KindArg::Cumulants => m.cumulants(g.max_order)?,
            };
            let body = format!("{}\n", serde_json::to_string_pretty(&family_to_json(&out))?);
            let text = match write_artifact(&g.out, &body)? {
                Some(p) => format!("{} family of order {} written to {p}\n", out.kind(), out.max_order()),
                None => body,
            };
            Ok(Outcome::new(family_to_json(&out), text, true))
        }
        CumulantsCmd::CheckTrace { model: spec, tau } => {
            let m = model(spec)?;
            let tau_f = tau_from(tau, m.dim())?;
            let fam = m.cumulants(g.max_order)?;
            let r = check_trace_condition(&fam, &tau_f, g.max_order)?;
            let params = json!({ "model": spec, "tau": tau, "max_order": g.max_order });
            Ok(check_outcome("cumulants check-trace", params, "trace condition", &r))
        }
        CumulantsCmd::CheckSelfadjoint { model: spec } => {
            let fam = model(spec)?.cumulants(g.max_order)?;
            let r = check_selfadjoint(&fam, &[1, 0], g.max_order)?;
            let params = json!({ "model": spec, "max_order": g.max_order });
            Ok(check_outcome("cumulants check-selfadjoint", params, "self-adjointness", &r))
        }
    }
}

fn rdiag_json(r: &RdiagReport) -> Value {
    json!({
        "holds": r.holds,
        "checked": r.checked,
        "witness": r.witness.as_ref().map(|w| json!({
            "description": w.description,
            "value": elem_to_json(&w.value),
        })),
    })
}

fn rdiag_cmd(c: &RdiagCmd) -> anyhow::Result<Outcome> {
    match c {
        RdiagCmd::Check { model: spec, max_len, mode, max_degree, budget } => {
            let m = model(spec)?;
            let (name, r) = match mode {
                RdiagMode::Cumulant => ("cumulant", check_rdiag_cumulants(&m.cumulants(*max_len)?, max_len / 2)?),
                RdiagMode::Word => ("word", check_rdiag_words(&m.moments(*max_len)?, *max_len)?),
                RdiagMode::M2 => {
                    let moments = m.moments((max_len * max_degree).max(1))?;
                    ("m2", m2_freeness_check(&moments, *max_len, *max_degree, *budget)?)
                }
            };
            let params = json!({ "model": spec, "max_len": max_len, "mode": name });
            let report = json!({ "command": "rdiag check", "parameters": params, "report": rdiag_json(&r) });
            let text = match &r.witness {
                None => format!("R-diagonal ({name} certificate, {} checks)\n", r.checked),
                Some(w) => format!("not R-diagonal ({name}): {} = {}\n", w.description, w.value),
            };
            Ok(Outcome::new(report, text, r.holds))
        }
        RdiagCmd::Twist { model: spec, max_k, theta } => {
            let m = model(spec)?;
            let theta = match theta {
                Some(s) => Automorphism::new(
                    s.split(',').map(|x| x.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>()?,
                )?,
                None => Automorphism::flip(m.dim()),
            };
            let r = check_theta_twist(&m.rdiag(*max_k)?, &theta)?;
            let ce = r.counterexample.as_ref().map(|(k, ks, l, rr)| {
                json!({ "k": k, "tuple": ks, "lhs": elem_to_json(l), "rhs": elem_to_json(rr) })
            });
            let report = json!({
                "command": "rdiag twist",
                "parameters": { "model": spec, "max_k": max_k, "theta": theta.perm() },
                "report": { "holds": r.holds, "checked": r.checked, "counterexample": ce },
            });
            let text = match &r.counterexample {
                None => format!("θ-twist holds ({} checks)\n", r.checked),
                Some((k, ks, l, rr)) => format!("θ-twist fails at k = {k}, tuple {ks:?}: {l} != {rr}\n"),
            };
            Ok(Outcome::new(report, text, r.holds))
        }
        RdiagCmd::Polar { model: spec } => {
            let r = check_polar_obstruction(&model(spec)?.moments(2)?)?;
            let report = json!({
                "command": "rdiag polar",
                "parameters": { "model": spec },
                "report": {
                    "verdict": r.verdict.name(),
                    "E(a*a)": elem_to_json(&r.e_astar_a),
                    "E(aa*)": elem_to_json(&r.e_a_astar),
                },
            });
            let text = format!("{}\nE(a*a) = {}\nE(aa*) = {}\n", r.verdict.name(), r.e_astar_a, r.e_a_astar);
            Ok(Outcome::new(report, text, true))
        }
    }
}

fn circular_cmd(c: &CircularCmd) -> anyhow::Result<Outcome> {
    let spec = match c {
        CircularCmd::Moments { model, .. } | CircularCmd::CheckTrace { model, .. } => model,
    };
    let m = model(spec)?;
    let circ = m.circular().context("not a circular model (expected covariances eta1, eta2)")?;
    match c {
        CircularCmd::Moments { order, .. } => {
            let d = circ.dim();
            let tau = TraceFunctional::uniform(d);
            let mut rows = Vec::new();
            let mut text = String::from("k,E((aa*)^k),E((a*a)^k),tau(E((aa*)^k))\n");
            for k in 0..=*order {
                let args = vec![AlgElem::unit(d); 2 * k];
                let m1 = alternating_moment(circ, Start::A, &args)?;
                let m2 = alternating_moment(circ, Start::AStar, &args)?;
                let t = tau.apply(&m1);
                text.push_str(&format!("{k},{m1},{m2},{}\n", fmt_scalar(&t)));
                rows.push(json!({
                    "k": k,
                    "aa*": elem_to_json(&m1),
                    "a*a": elem_to_json(&m2),
                    "trace": scalar_to_json(&t),
                }));
            }
            let report = json!({
                "command": "circular moments",
                "parameters": { "model": spec, "order": order },
                "moments": rows,
            });
            Ok(Outcome::new(report, text, true))
        }
        CircularCmd::CheckTrace { tau, .. } => {
            let r = check_circular_trace(circ, &tau_from(tau, circ.dim())?)?;
            let params = json!({ "model": spec, "tau": tau });
            Ok(check_outcome("circular check-trace", params, "circular trace condition", &r))
        }
    }
}

fn series_fg(
    g: &Global,
    spec: &str,
    order: usize,
    trace: bool,
    tau: Option<&str>,
    b1: Option<&str>,
    b2: Option<&str>,
) -> anyhow::Result<Outcome> {
    let m = model(spec)?;
    let circ = m.circular().context("series fg needs a circular model")?;
    let d = circ.dim();
    let b1 = b1.map_or_else(|| Ok(AlgElem::unit(d)), |s| elem_from(s, d))?;
    let b2 = b2.map_or_else(|| Ok(AlgElem::unit(d)), |s| elem_from(s, d))?;
    let (f, gs) = solve_fg(circ, &b1, &b2, order)?;
    let params = json!({ "model": spec, "order": order, "trace": trace });
    let (report, body) = if trace || tau.is_some() {
        let tau = tau.map_or_else(|| Ok(TraceFunctional::uniform(d)), |s| tau_from(s, d))?;
        let (tf, tg) = (f.trace(&tau)?, gs.trace(&tau)?);
        let mut csv = String::from("n,F,G\n");
        for n in 0..=order {
            csv.push_str(&format!("{n},{},{}\n", fmt_scalar(&tf[n]), fmt_scalar(&tg[n])));
        }
        let report = json!({
            "command": "series fg",
            "parameters": params,
            "F": tf.iter().map(scalar_to_json).collect::<Vec<_>>(),
            "G": tg.iter().map(scalar_to_json).collect::<Vec<_>>(),
        });
        (report, csv)
    } else {
        let mut csv = String::from("n,F,G\n");
        for n in 0..=order {
            csv.push_str(&format!("{n},\"{}\",\"{}\"\n", f.coeff(n), gs.coeff(n)));
        }
        let report = json!({
            "command": "series fg",
            "parameters": params,
            "F": f.coeffs().iter().map(elem_to_json).collect::<Vec<_>>(),
            "G": gs.coeffs().iter().map(elem_to_json).collect::<Vec<_>>(),
        });
        (report, csv)
    };
    let text = match write_artifact(&g.out, &body)? {
        Some(p) => format!("coefficients to order {order} written to {p}\n"),
        None => body,
    };
    Ok(Outcome::new(report, text, true))
}

fn spectral_cmd(g: &Global, c: &SpectralCmd) -> anyhow::Result<Outcome> {
    match c {
        SpectralCmd::VerifyAppendix { order } => {
            let s = appendix_component_series(*order);
            let quartic = verify_h_quartic(*order);
            let curve = h_to_g_curve() == gpoly();
            let hs: Vec<String> = s.h.iter().map(|q| q.to_string()).collect();
            let mut text = format!("h coefficients: {}\n", hs.join(", "));
            text.push_str(&format!("h(z) annihilator: {}\n", hpoly().display_with("h", "z")));
            text.push_str(&if quartic {
                format!("quartic identity holds to order {order}\n")
            } else {
                format!("quartic identity FAILS below order {order}\n")
            });
            text.push_str(if curve {
                "G-curve matches\n"
            } else {
                "G-curve MISMATCH\n"
            });
            let report = json!({
                "command": "spectral verify-appendix",
                "parameters": { "order": order },
                "h": hs,
                "quartic_identity": quartic,
                "g_curve": curve,
            });
            Ok(Outcome::new(report, text, quartic && curve))
        }
        SpectralCmd::Density { points, svg, no_richardson } => {
            if *points < 2 {
                bail!("need at least 2 points");
            }
            let s = density(&default_grid(*points), g.eps, !no_richardson)?;
            let mut csv = format!("# eps={:e} richardson={}\nt,density\n", s.eps, s.richardson);
            for (t, r) in s.t.iter().zip(&s.rho) {
                csv.push_str(&format!("{t:.11e},{r:.11e}\n"));
            }
            let mom = moments(&s, 2);
            let written = write_artifact(&g.out, &csv)?;
            if let Some(p) = svg {
                fs::write(p, svg::abs_density_plot(&s)).with_context(|| format!("writing {}", p.display()))?;
            }
            let report = json!({
                "command": "spectral density",
                "parameters": { "points": points, "eps": s.eps, "richardson": s.richardson },
                "mass": mom[0],
                "first_moment": mom[1],
                "second_moment": mom[2],
            });
            let text = match written {
                Some(p) => format!(
                    "{points} samples written to {p}\nmass {:.6}, first moment {:.6}, second moment {:.6}\n",
                    mom[0], mom[1], mom[2]
                ),
                None => csv,
            };
            Ok(Outcome::new(report, text, true))
        }
        SpectralCmd::Norm => {
            let d = discriminant_roots()?;
            let n = operator_norm()?;
            let report = json!({
                "command": "spectral norm",
                "norm": n.norm,
                "norm_squared": n.norm_squared,
                "residual": n.residual,
                "discriminant_real_roots": d.real_roots,
            });
            let text = format!(
                "discriminant: {}\nreal roots: {:?}\n‖a‖ = {:.10}\n‖a‖² = {:.10}\noctic residual {:.3e}\n",
                d.discriminant.display_with("w"),
                d.real_roots,
                n.norm,
                n.norm_squared,
                n.residual
            );
            Ok(Outcome::new(report, text, true))
        }
    }
}

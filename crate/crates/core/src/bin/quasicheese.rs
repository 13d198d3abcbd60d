use std::fmt::Write as _;
use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use quasicheese::cohen::{b_table, propagate_vanishing_bound, verify_cohen_bounds};
use quasicheese::construction::{assemble_construction, quasianalyticity_certificate, ConstructionResult};
use quasicheese::geometry::AbstractSwissCheese;
use quasicheese::io::{
    cheese_to_json, format_real, read_cheese, read_norms, read_path, read_rational, read_sequence,
    to_json, SequenceDoc, DecimalEntry,
};
use quasicheese::paths::{contour_integral, DEFAULT_QUAD_TOL};
use quasicheese::render::{render_svg, RenderOptions};
use quasicheese::sequences::{
    classify_divergence, dales_davie_norm, dc_partial_sums, f_analytic_statistic,
    is_algebra_sequence, log_convex_minorant, Family, NormSequence, PositiveSequence,
};
use quasicheese::{Complex64, Error};

const EXIT_IO: u8 = 1;
const EXIT_FAILED: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_MALFORMED: u8 = 65;

#[derive(Parser)]
#[command(name = "quasicheese", version, about = "Swiss cheese constructions and quasianalyticity certificates")]
struct Cli {
    /// Output format for reports.
    #[arg(long, value_enum, global = true, default_value = "table")]
    format: Format,

    /// Omit timestamps so repeated runs are byte-identical.
    #[arg(long, global = true)]
    reproducible: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Doc,
    Table,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Build, check and draw cheeses.
    #[command(subcommand)]
    Cheese(CheeseCmd),
    /// Sequence diagnostics.
    #[command(subcommand)]
    Seq(SeqCmd),
    /// B tables, the Cohen constants and bound propagation.
    #[command(subcommand)]
    Cohen(CohenCmd),
    /// End-to-end certificate for a rational function on the construction.
    Certify(CertifyArgs),
    /// Contour integrals and path data.
    #[command(subcommand)]
    Path(PathCmd),
}

#[derive(Args, Clone)]
struct ConstructionArgs {
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Largest k for which the gamma display is enforced.
    #[arg(long = "k-probe", default_value_t = 20)]
    k_probe: usize,
}

#[derive(Subcommand)]
enum CheeseCmd {
    /// Run the annulus construction and write the cheese file.
    Build {
        #[command(flatten)]
        params: ConstructionArgs,
        /// Cheese file to write.
        #[arg(long)]
        out: PathBuf,
        /// Verification report file; printed to stdout when absent.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Classicality margins of a cheese file.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a cheese file as SVG.
    Render {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 800)]
        width: u32,
        /// Dashed circle of this radius around the outer center, e.g. C_r.
        #[arg(long)]
        overlay: Vec<f64>,
        /// Draw holes at least this many pixels wide.
        #[arg(long = "min-hole-px", default_value_t = 0.0)]
        min_hole_px: f64,
    },
}

#[derive(Args, Clone)]
struct SeqSource {
    /// Named family: factorial, factorialP, geometric:c, constant:c, power:nn.
    #[arg(long)]
    family: Option<Family>,
    /// Sequence file `{"values": [...]}`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated entries M_0,M_1,...
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<String>>,
    /// Horizon for generated families.
    #[arg(long = "N", default_value_t = 1000)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SeqCmd {
    /// Log-convex minorant and principal indices.
    Minorant(SeqSource),
    /// Partial sums of M_n^{-1/n} and of the minorant ratios.
    Dc(SeqSource),
    /// Algebra sequence test.
    Algebra(SeqSource),
    /// Weighted norm sum over a file of sup-norms.
    Ddnorm {
        #[command(flatten)]
        weights: SeqSource,
        /// Sup-norm file (zeros allowed).
        #[arg(long)]
        norms: PathBuf,
    },
    /// The (|f^(k)|/k!)^{1/k} statistic over a file of sup-norms.
    Analytic {
        #[arg(long)]
        norms: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CohenCmd {
    /// Print B_{j,k} for 0 <= j <= k <= K.
    Table {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check max B < 1/2 and the sums below 2.
    Verify {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bound propagation certificate for vanishing data on a path of length s.
    Certify {
        #[command(flatten)]
        source: SeqSource,
        #[arg(long)]
        s: f64,
        /// Order; snapped down to a principal index.
        #[arg(long = "n")]
        order: usize,
    },
}

#[derive(Args)]
struct CertifyArgs {
    /// Rational function file `{"num": [...], "den": [...]}`.
    #[arg(long)]
    rational: PathBuf,
    /// Cheese file to certify against; must equal the construction built
    /// from the given parameters.
    #[arg(long)]
    cheese: Option<PathBuf>,
    #[command(flatten)]
    params: ConstructionArgs,
    #[arg(long = "K", default_value_t = 20)]
    k: usize,
    #[arg(long = "J", default_value_t = 64)]
    j: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PathCmd {
    /// Integral of a rational function along a path file.
    Integrate {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Length, endpoints and parameter interval.
    Info {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn failed(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_FAILED,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => EXIT_IO,
            Error::Precondition(_) => EXIT_USAGE,
            Error::Malformed(_)
            | Error::NonPositiveEntry { .. }
            | Error::ZeroDenominator
            | Error::InvalidSegment { .. }
            | Error::Discontinuous { .. }
            | Error::ConstantPath => EXIT_MALFORMED,
            _ => EXIT_FAILED,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// What a command produced: a document, its table rendering and a verdict.
struct Outcome {
    command: &'static str,
    doc: Value,
    table: String,
    passed: bool,
    out: Option<PathBuf>,
}

fn to_value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| Failure::from(Error::from(e)))
}

fn write_out(path: Option<&FsPath>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure {
            code: EXIT_IO,
            message: format!("{}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(cli: &Cli, o: Outcome) -> CliResult<()> {
    let text = match cli.format {
        Format::Doc => {
            let mut envelope = json!({ "command": o.command, "passed": o.passed });
            if !cli.reproducible {
                let secs = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                envelope["generated_unix"] = json!(secs);
            }
            envelope["result"] = o.doc;
            let mut t = to_json(&envelope)?;
            t.push('\n');
            t
        }
        Format::Table | Format::Svg => o.table,
    };
    write_out(o.out.as_deref(), &text)?;
    if o.passed {
        Ok(())
    } else {
        Err(Failure::failed(format!("{}: FAIL", o.command)))
    }
}

fn load_sequence(src: &SeqSource) -> CliResult<PositiveSequence> {
    match (&src.family, &src.input, &src.values) {
        (Some(f), None, None) => Ok(f.generate(src.n)?),
        (None, Some(p), None) => Ok(read_sequence(p)?),
        (None, None, Some(v)) => Ok(SequenceDoc {
            values: v.iter().map(|s| DecimalEntry::Text(s.clone())).collect(),
        }
        .to_sequence()?),
        _ => Err(Failure::usage("give exactly one of --family, --input, --values")),
    }
}

fn positive(name: &str, x: f64) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Failure::usage(format!("--{name} must be positive, got {x}")))
    }
}

fn check_construction_args(p: &ConstructionArgs) -> CliResult<()> {
    if !(p.r > 0.0 && p.r < 1.0) {
        return Err(Failure::usage(format!("--r must lie in (0, 1), got {}", p.r)));
    }
    positive("eps", p.eps)?;
    if !(p.delta > 0.0 && p.delta < 1.0) {
        return Err(Failure::usage(format!("--delta must lie in (0, 1), got {}", p.delta)));
    }
    if p.k_probe < 20 {
        return Err(Failure::usage("--k-probe must be at least 20"));
    }
    Ok(())
}

fn construction_doc(res: &ConstructionResult) -> CliResult<Value> {
    let mut doc = to_value(res)?;
    doc["holes"] = json!(res.cheese.holes.len());
    doc["rho"] = json!(res.cheese.rho());
    Ok(doc)
}

fn construction_table(res: &ConstructionResult) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "r = {}  n0 = {}  levels = {}  holes = {}", res.r, res.n0, res.levels_built, res.cheese.holes.len());
    let _ = writeln!(t, "rho = {}  tail = {}", format_real(res.cheese.rho()), format_real(res.cheese.tail_bound));
    for a in &res.annuli {
        let _ = writeln!(
            t,
            "{:<4} [{:.10}, {:.10}]  holes {:>6}  radius sum {}",
            a.label(),
            a.spec.lambda1,
            a.spec.lambda0,
            a.holes.len(),
            format_real(a.radius_sum)
        );
    }
    for c in &res.verification.clauses {
        let _ = writeln!(
            t,
            "{} {:<28} measured {}  threshold {}  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            format_real(c.measured),
            format_real(c.threshold),
            c.detail
        );
    }
    t
}

fn cheese_build(cli: &Cli, params: &ConstructionArgs, out: &FsPath, report: Option<&FsPath>) -> CliResult<()> {
    check_construction_args(params)?;
    let res = assemble_construction(params.r, params.eps, params.delta, params.k_probe)?;
    let mut text = cheese_to_json(&res.cheese)?;
    text.push('\n');
    write_out(Some(out), &text)?;
    emit(
        cli,
        Outcome {
            command: "cheese build",
            doc: construction_doc(&res)?,
            table: construction_table(&res),
            passed: res.verification.passed,
            out: report.map(FsPath::to_path_buf),
        },
    )
}

fn cheese_check(cli: &Cli, file: &FsPath, tol: f64, out: Option<PathBuf>) -> CliResult<()> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Failure::usage("--tol must be nonnegative"));
    }
    let cheese = read_cheese(file)?;
    let rep = cheese.is_classical(tol);
    let mut t = String::new();
    let _ = writeln!(t, "holes {}", cheese.holes.len());
    let _ = writeln!(t, "rho {}", format_real(cheese.rho()));
    let _ = writeln!(t, "containment margin {}", format_real(rep.worst_containment_margin));
    let _ = writeln!(t, "separation margin {}", format_real(rep.worst_separation_margin));
    if !rep.violating_indices.is_empty() {
        let list: Vec<String> = rep.violating_indices.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(t, "violating holes {}", list.join(" "));
    }
    let _ = writeln!(t, "{}", if rep.is_classical { "classical" } else { "not classical" });
    let mut doc = to_value(&rep)?;
    doc["holes"] = json!(cheese.holes.len());
    doc["rho"] = json!(cheese.rho());
    emit(
        cli,
        Outcome {
            command: "cheese check",
            doc,
            table: t,
            passed: rep.is_classical,
            out,
        },
    )
}

fn cheese_render(file: &FsPath, out: Option<&FsPath>, width: u32, overlay: &[f64], min_hole_px: f64) -> CliResult<()> {
    if width == 0 {
        return Err(Failure::usage("--width must be positive"));
    }
    for &r in overlay {
        positive("overlay", r)?;
    }
    let cheese: AbstractSwissCheese = read_cheese(file)?;
    let opts = RenderOptions {
        width_px: width,
        overlays: overlay.iter().map(|&r| (cheese.outer.center, r)).collect(),
        min_hole_px,
    };
    write_out(out, &render_svg(&cheese, &opts))
}

fn seq_minorant(cli: &Cli, src: &SeqSource) -> CliResult<()> {
    let m = load_sequence(src)?;
    let res = log_convex_minorant(&m);
    let mut t = String::new();
    let idx: Vec<String> = res.principal_indices.iter().map(|i| i.to_string()).collect();
    let _ = writeln!(t, "principal {}", idx.join(" "));
    let _ = writeln!(t, "{:>6}  {:>24}  {:>24}", "n", "log M_n", "log M^c_n");
    for n in 0..=m.horizon() {
        let _ = writeln!(t, "{:>6}  {:>24}  {:>24}", n, format_real(m.log(n)), format_real(res.minorant.log(n)));
    }
    let doc = json!({
        "principal_indices": res.principal_indices,
        "minorant": SequenceDoc::from_sequence(&res.minorant),
        "root_at_horizon": res.root_at_horizon,
    });
    emit(cli, Outcome { command: "seq minorant", doc, table: t, passed: true, out: src.out.clone() })
}

fn seq_dc(cli: &Cli, src: &SeqSource) -> CliResult<()> {
    let m = load_sequence(src)?;
    let n = m.horizon();
    let sums = dc_partial_sums(&m, n)?;
    let class = if n >= 32 { Some(classify_divergence(&m)?) } else { None };
    let mut t = String::new();
    let _ = writeln!(t, "{:>8}  {:>24}  {:>24}", "n", "sum M_k^(-1/k)", "sum M^c_k/M^c_(k+1)");
    let mut k = 1;
    while k <= n {
        let ratio = sums.ratio_sums.get(k - 1).copied().unwrap_or(f64::NAN);
        let _ = writeln!(t, "{:>8}  {:>24}  {:>24}", k, format_real(sums.root_sums[k - 1]), format_real(ratio));
        if k == n {
            break;
        }
        k = (2 * k).min(n);
    }
    if let Some(c) = &class {
        let _ = writeln!(t, "{}  slope {}", c.label, format_real(c.slope));
    }
    let doc = json!({
        "horizon": n,
        "root_sum": sums.root_sums.last(),
        "ratio_sum": sums.ratio_sums.last(),
        "classification": class,
        "sums": sums,
    });
    emit(cli, Outcome { command: "seq dc", doc, table: t, passed: true, out: src.out.clone() })
}

fn seq_algebra(cli: &Cli, src: &SeqSource) -> CliResult<()> {
    let m = load_sequence(src)?;
    let res = is_algebra_sequence(&m);
    let mut t = String::new();
    match (&res.first_violation, &res.reason) {
        (Some((j, k)), reason) => {
            let _ = writeln!(t, "FAIL at (j, k) = ({j}, {k}) {}", reason.clone().unwrap_or_default());
        }
        (None, Some(reason)) => {
            let _ = writeln!(t, "FAIL {reason}");
        }
        (None, None) => {
            let _ = writeln!(t, "PASS");
        }
    }
    emit(cli, Outcome { command: "seq algebra", doc: to_value(&res)?, table: t, passed: res.holds, out: src.out.clone() })
}

fn seq_ddnorm(cli: &Cli, weights: &SeqSource, norms: &FsPath) -> CliResult<()> {
    let norms = read_norms(norms)?;
    let m = match (&weights.family, &weights.input, &weights.values) {
        (Some(f), None, None) => f.generate(norms.len().saturating_sub(1))?,
        _ => load_sequence(weights)?,
    };
    let res = dales_davie_norm(&norms, &m)?;
    let mut t = String::new();
    let _ = writeln!(t, "partial sum {}", format_real(res.partial_sum));
    let _ = writeln!(t, "terms {}", res.terms.len());
    if res.tail_diverging {
        let _ = writeln!(t, "tail non-decreasing: series taken as infinite");
    }
    emit(cli, Outcome { command: "seq ddnorm", doc: to_value(&res)?, table: t, passed: true, out: weights.out.clone() })
}

fn seq_analytic(cli: &Cli, norms: &FsPath, out: Option<PathBuf>) -> CliResult<()> {
    let norms: NormSequence = read_norms(norms)?;
    let res = f_analytic_statistic(&norms);
    let mut t = String::new();
    for (i, v) in res.values.iter().enumerate() {
        let _ = writeln!(t, "{:>6}  {}", i + 1, format_real(*v));
    }
    let _ = writeln!(t, "slope {}  {}", format_real(res.slope), if res.unbounded { "unbounded" } else { "bounded" });
    emit(cli, Outcome { command: "seq analytic", doc: to_value(&res)?, table: t, passed: true, out })
}

fn cohen_table(cli: &Cli, alpha: f64, k: usize, out: Option<PathBuf>) -> CliResult<()> {
    let table = b_table(alpha, k)?;
    let mut t = String::new();
    let mut rows = Vec::new();
    for j in 0..=k {
        for kk in j..=k {
            let b = table.get(j, kk);
            let _ = writeln!(t, "B_{{{j},{kk}}} = {}", format_real(b));
            rows.push(json!({ "j": j, "k": kk, "value": b }));
        }
    }
    let doc = json!({ "alpha": alpha, "K": k, "entries": rows });
    emit(cli, Outcome { command: "cohen table", doc, table: t, passed: true, out })
}

fn cohen_verify(cli: &Cli, alpha: f64, k: usize, out: Option<PathBuf>) -> CliResult<()> {
    let v = verify_cohen_bounds(alpha, k)?;
    let worst_sum = v.sums.iter().copied().fold(0.0, f64::max);
    let mut t = String::new();
    let _ = writeln!(t, "max B = {}  (K_est = {})", format_real(v.max_b), format_real(v.k_est));
    let _ = writeln!(t, "max sum = {}", format_real(worst_sum));
    let _ = writeln!(t, "monotone in j: {}", v.monotone_ok);
    let _ = writeln!(t, "{}", if v.passed { "PASS" } else { "FAIL" });
    emit(cli, Outcome { command: "cohen verify", doc: to_value(&v)?, table: t, passed: v.passed, out })
}

fn cohen_certify(cli: &Cli, source: &SeqSource, s: f64, n: usize) -> CliResult<()> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Failure::usage("--s must be finite and nonnegative"));
    }
    let mut src = source.clone();
    if src.family.is_some() {
        src.n = src.n.max(n + 1);
    }
    let m = load_sequence(&src)?;
    let cert = propagate_vanishing_bound(&m, s, n)?;
    let mut t = String::new();
    let _ = writeln!(t, "n = {} (requested {}{})", cert.n, cert.requested_n, if cert.snapped { ", snapped" } else { "" });
    let _ = writeln!(t, "alpha = {}", format_real(cert.alpha));
    let _ = writeln!(t, "ratio sum = {}", format_real(cert.ratio_sum));
    let _ = writeln!(t, "max B = {} + {}", format_real(cert.max_b), format_real(cert.max_b_truncation));
    let _ = writeln!(t, "final bound = {}", format_real(cert.final_bound));
    let _ = writeln!(t, "replay {:?}: {}", cert.replay.mode, if cert.replay.holds { "holds" } else { "FAILS" });
    let passed = cert.replay.holds;
    emit(cli, Outcome { command: "cohen certify", doc: to_value(&cert)?, table: t, passed, out: src.out.clone() })
}

fn certify(cli: &Cli, a: &CertifyArgs) -> CliResult<()> {
    check_construction_args(&a.params)?;
    if a.j < 1 {
        return Err(Failure::usage("--J must be at least 1"));
    }
    let f = read_rational(&a.rational)?;
    let p = &a.params;
    let res = assemble_construction(p.r, p.eps, p.delta, p.k_probe)?;
    if let Some(path) = &a.cheese {
        let given = read_cheese(path)?;
        if given != res.cheese {
            return Err(Failure::failed(format!(
                "{} is not the construction for r = {}, eps = {}, delta = {}",
                path.display(),
                p.r,
                p.eps,
                p.delta
            )));
        }
    }
    let rep = quasianalyticity_certificate(&res, &f, a.k, a.j)?;
    let mut t = construction_table(&res);
    let _ = writeln!(t, "|f|_X ~ {}", format_real(rep.sup_f.value));
    let _ = writeln!(t, "{:>4}  {:>24}  {:>24}", "k", "|f^(k)|_{C_r}", "display bound");
    for d in &rep.display {
        let _ = writeln!(t, "{:>4}  {:>24}  {:>24}", d.k, format_real(d.exact), format_real(d.bound));
    }
    let _ = writeln!(t, "{} display bound", if rep.display_ok { "PASS" } else { "FAIL" });
    let _ = writeln!(
        t,
        "{} pointwise estimate (min relative slack {})",
        if rep.pointwise.passed { "PASS" } else { "FAIL" },
        format_real(rep.pointwise.min_relative_slack)
    );
    if let Some(k) = rep.vanishing_from {
        let _ = writeln!(t, "|f^({k})|_{{C_r}} = 0: series is +inf by convention");
    }
    if let Some(last) = rep.series.last() {
        let _ = writeln!(
            t,
            "{} series from j = {}: sum {} >= comparison {}",
            if rep.series_dominated { "PASS" } else { "FAIL" },
            rep.start_index,
            format_real(last.partial_sum),
            format_real(last.comparison_sum)
        );
    }
    if let Some(c) = &rep.divergence {
        let _ = writeln!(t, "{} (slope {})", c.label, format_real(c.slope));
    }
    if let Some(p) = &rep.propagation {
        let _ = writeln!(
            t,
            "propagation over {} arcs of length {}: n = {}, bound {}",
            p.arcs,
            format_real(p.arc_length),
            p.certificate.n,
            format_real(p.certificate.final_bound)
        );
    }
    let passed = rep.passed && res.verification.passed;
    let _ = writeln!(t, "{}", if passed { "PASS" } else { "FAIL" });
    let doc = json!({
        "construction": construction_doc(&res)?,
        "certificate": to_value(&rep)?,
    });
    emit(cli, Outcome { command: "certify", doc, table: t, passed, out: a.out.clone() })
}

fn path_integrate(cli: &Cli, path: &FsPath, f: &FsPath, tol: f64, out: Option<PathBuf>) -> CliResult<()> {
    positive("tol", tol)?;
    let p = read_path(path)?;
    let f = read_rational(f)?;
    if let Some(z) = f.poles().into_iter().find(|z| p.sample(64).iter().any(|w| (w - z).norm() < 1e-12)) {
        return Err(Failure::failed(format!("pole {z} on the path")));
    }
    let q = contour_integral(|z: Complex64| f.eval(z).unwrap_or(Complex64::new(f64::NAN, f64::NAN)), &p, tol)?;
    let mut t = String::new();
    let _ = writeln!(t, "integral {} {}", format_real(q.value.re), format_real(q.value.im));
    let _ = writeln!(t, "error estimate {}", format_real(q.error_estimate));
    let doc = json!({
        "value": [q.value.re, q.value.im],
        "error_estimate": q.error_estimate,
        "subdivisions": q.subdivisions,
    });
    emit(cli, Outcome { command: "path integrate", doc, table: t, passed: true, out })
}

fn path_info(cli: &Cli, path: &FsPath, out: Option<PathBuf>) -> CliResult<()> {
    let p = read_path(path)?;
    let (a, b) = p.interval();
    let mut t = String::new();
    let _ = writeln!(t, "segments {}", p.segments().len());
    let _ = writeln!(t, "interval [{}, {}]", format_real(a), format_real(b));
    let _ = writeln!(t, "length {}", format_real(p.length()));
    let _ = writeln!(t, "start {} {}", format_real(p.start().re), format_real(p.start().im));
    let _ = writeln!(t, "end {} {}", format_real(p.end().re), format_real(p.end().im));
    let doc = json!({
        "segments": p.segments().len(),
        "interval": [a, b],
        "length": p.length(),
        "start": [p.start().re, p.start().im],
        "end": [p.end().re, p.end().im],
    });
    emit(cli, Outcome { command: "path info", doc, table: t, passed: true, out })
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Cheese(CheeseCmd::Build { params, out, report }) => {
            cheese_build(cli, params, out, report.as_deref())
        }
        Command::Cheese(CheeseCmd::Check { file, tol, out }) => cheese_check(cli, file, *tol, out.clone()),
        Command::Cheese(CheeseCmd::Render {
            file,
            out,
            width,
            overlay,
            min_hole_px,
        }) => cheese_render(file, out.as_deref(), *width, overlay, *min_hole_px),
        Command::Seq(SeqCmd::Minorant(src)) => seq_minorant(cli, src),
        Command::Seq(SeqCmd::Dc(src)) => seq_dc(cli, src),
        Command::Seq(SeqCmd::Algebra(src)) => seq_algebra(cli, src),
        Command::Seq(SeqCmd::Ddnorm { weights, norms }) => seq_ddnorm(cli, weights, norms),
        Command::Seq(SeqCmd::Analytic { norms, out }) => seq_analytic(cli, norms, out.clone()),
        Command::Cohen(CohenCmd::Table { alpha, k, out }) => cohen_table(cli, *alpha, *k, out.clone()),
        Command::Cohen(CohenCmd::Verify { alpha, k, out }) => cohen_verify(cli, *alpha, *k, out.clone()),
        Command::Cohen(CohenCmd::Certify { source, s, order }) => cohen_certify(cli, source, *s, *order),
        Command::Certify(args) => certify(cli, args),
        Command::Path(PathCmd::Integrate { path, f, tol, out }) => {
            path_integrate(cli, path, f, *tol, out.clone())
        }
        Command::Path(PathCmd::Info { path, out }) => path_info(cli, path, out.clone()),
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("QUASICHEESE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("QUASICHEESE_THREADS must be a positive integer, got `{v}`")))?;
    // a pool that is already configured is fine
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match configure_threads().and_then(|_| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("quasicheese: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

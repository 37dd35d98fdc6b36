//! `etajump`: batch front-end for the eta-jump library.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use etajump::blanchfield::{self, Xi};
use etajump::corpus::{generate_families, CorpusSpec};
use etajump::error::{Error, Result};
use etajump::family::HermitianFamily;
use etajump::germ::Germ;
use etajump::io;
use etajump::linkform::{Route, SignatureProfile, TorsionForm};
use etajump::localsys::{circle_complex, circle_operator_family, det_order, GermComplex, MonodromyDeformation};
use etajump::monodromy::Monodromy;
use etajump::scalar::{Cyclo, GaussRat, Scalar, Tol};
use etajump::verify::verify_families;

#[derive(Parser, Debug)]
#[command(name = "etajump", version, about = "Eta-invariant jumps of Hermitian families via linking forms")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Also write the report as JSON to this path (`-` for stdout instead of text).
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Backend::Exact)]
    backend: Backend,
    /// Rank tolerance of the float backend.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Germ truncation order, or `auto`.
    #[arg(long, global = true, default_value = "auto")]
    truncation: String,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Backend {
    Exact,
    Float,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Signature jumps of a Hermitian family.
    Jumps { family: PathBuf },
    /// Signature profile of a torsion linking form.
    Linkform { form: PathBuf },
    /// Twisted cohomology of the circle and its linking form.
    Circle {
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value = "exp(2*pi*i*t)")]
        monodromy: String,
    },
    /// Blanchfield pairing of a knot at points of the unit circle.
    Blanchfield {
        seifert: PathBuf,
        /// `p/q` for exp(2 pi i p/q), or `angle:<radians>`; all circle roots if omitted.
        #[arg(long)]
        xi: Option<String>,
    },
    /// Torsion cohomology and linking form of a germ complex.
    Complex { complex: PathBuf },
    /// Property checks over a seeded corpus.
    Verify {
        /// `default`, a JSON object, or a path to a JSON file.
        #[arg(long, default_value = "default")]
        corpus: String,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

#[derive(Serialize)]
struct Report {
    command: Vec<String>,
    input_digest: Option<String>,
    backend: Backend,
    ok: bool,
    result: Value,
    warnings: Vec<String>,
}

struct Outcome {
    ok: bool,
    result: Value,
    text: Vec<(String, String)>,
    warnings: Vec<String>,
}

impl Outcome {
    fn new(ok: bool, result: Value) -> Self {
        Outcome { ok, result, text: Vec::new(), warnings: Vec::new() }
    }

    fn row(&mut self, k: &str, v: impl ToString) {
        self.text.push((k.to_string(), v.to_string()));
    }
}

fn read_input(path: &Path) -> Result<(String, String)> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let digest = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    Ok((text, digest))
}

fn truncation(opts: &Opts, auto: usize) -> Result<usize> {
    match opts.truncation.as_str() {
        "auto" => Ok(auto),
        s => s.parse().map_err(|_| Error::Input(format!("--truncation expects N or auto, got {s:?}"))),
    }
}

fn tol(opts: &Opts) -> Tol {
    Tol(opts.tolerance)
}

fn profile_text(p: &SignatureProfile) -> String {
    format!("sigma {:?}  n+ {:?}  n- {:?}", p.sigma, p.n_plus, p.n_minus)
}

fn jumps<F: Scalar>(text: &str, opts: &Opts) -> Result<Outcome> {
    let tol = tol(opts);
    let f: HermitianFamily<F> = io::family_from_json(&io::parse_json(text)?, tol)?;
    let r = f.jumps(tol)?;
    let ks = f.kernel_sequence(tol)?;
    let branches = f.branch_profile().ok();
    let branch_agreement = branches.as_ref().map(|b| b.profile() == r.profile);
    let mut out = Outcome::new(
        r.oracle_agreement && branch_agreement != Some(false),
        json!({
            "dim": f.dim(),
            "degree": f.degree(),
            "report": r,
            "w_dims": ks.w_dims(),
            "sigma_dim": ks.sigma_dim,
            "null_branches": ks.null_branches,
            "branches": branches,
            "branch_agreement": branch_agreement,
        }),
    );
    out.row("profile", profile_text(&r.profile));
    out.row("eta0", r.eta0);
    out.row("jump_plus", r.jump_plus);
    out.row("jump_minus", r.jump_minus);
    out.row("spectral_flow", r.flow);
    out.row("oracle", format!("jumps {:+} / {:+} at eps = 1e-{}", r.oracle.jump_plus, r.oracle.jump_minus, r.oracle.k));
    out.row("oracle_agreement", r.oracle_agreement);
    if let Some(b) = branch_agreement {
        out.row("branch_agreement", b);
    }
    Ok(out)
}

fn linkform<F: Scalar>(text: &str, opts: &Opts) -> Result<Outcome> {
    let tol = tol(opts);
    let form: TorsionForm<F> = io::form_from_json(&io::parse_json(text)?, tol)?;
    let normalized = form.normalized();
    let v = normalized.signature_profile(Route::V, tol)?;
    let w = normalized.signature_profile(Route::W, tol)?;
    let mut out = Outcome::new(
        v == w,
        json!({
            "dim": form.dim(),
            "parity": form.parity(),
            "nilpotency_index": form.nilpotency_index(tol),
            "profile": v,
            "route_agreement": v == w,
            "jump_plus": v.jump_plus(),
            "jump_minus": v.jump_minus(),
        }),
    );
    out.row("dim", form.dim());
    out.row("parity", format!("{:?}", form.parity()));
    out.row("profile", profile_text(&v));
    out.row("route_agreement", v == w);
    Ok(out)
}

fn circle<F: Scalar>(rank: usize, spec: &str, opts: &Opts) -> Result<Outcome> {
    let tol = tol(opts);
    let order = truncation(opts, rank + 3)?;
    let factors = Monodromy::parse(spec)?.factors(rank)?;
    let rho = MonodromyDeformation::<F>::circle(&factors, order)?;
    let c = circle_complex(&rho, tol)?;
    let h = c.torsion_cohomology(tol);
    let link = c.homological_linking(tol)?;
    let det = det_order(&rho, tol);
    let model = circle_operator_family::<F>(&factors, tol)?.jumps(tol)?;
    let unitary = rho.is_unitary(tol);
    // i {e_j, e_j} residues for the basis cocycles that are t-torsion
    let residues: Vec<Option<(String, String)>> = (0..rank)
        .map(|j| {
            let e: Vec<Germ<F>> =
                (0..rank).map(|r| if r == j { Germ::one(order) } else { Germ::zero(order) }).collect();
            c.bockstein(&e, &e, 1, None, tol).ok().map(|l| (l.residue() * F::imag_unit()).to_pair())
        })
        .collect();
    let profile = link.profile.clone();
    let model_agreement = profile.as_ref().map(|p| *p == model.profile);
    let dim_identity = det == Some(h[1].torsion_dim()) || (det.is_none() && h[1].free_rank > 0);
    let mut out = Outcome::new(
        model_agreement != Some(false) && dim_identity,
        json!({
            "rank": rank,
            "factors": factors,
            "truncation": order,
            "time_scale": if F::pi().is_some() { "t" } else { "pi*t" },
            "unitary": unitary,
            "cohomology": h,
            "det_order": det,
            "dim_identity": dim_identity,
            "parity": link.parity,
            "symmetric": link.symmetric,
            "profile": profile,
            "jump_plus": profile.as_ref().map(|p| p.jump_plus()),
            "jump_minus": profile.as_ref().map(|p| p.jump_minus()),
            "operator_model": model,
            "model_agreement": model_agreement,
            "residues": residues,
        }),
    );
    out.warnings = link.warnings.clone();
    if !unitary {
        out.warnings.push("monodromy is not unitary".into());
    }
    for d in &h {
        out.row(&format!("H^{}", d.degree), format!("free {}  torsion {:?}", d.free_rank, d.torsion_orders));
    }
    out.row("ord det(rho - I)", det.map_or("inf".into(), |d| d.to_string()));
    if let Some(p) = &profile {
        out.row("profile", profile_text(p));
        out.row("jump_plus", p.jump_plus());
        out.row("jump_minus", p.jump_minus());
    }
    out.row("model_agreement", model_agreement.map_or("n/a".into(), |b| b.to_string()));
    for (j, r) in residues.iter().enumerate() {
        if let Some((re, im)) = r {
            out.row(&format!("i*res{{e{j},e{j}}}"), format!("{re} + {im}i"));
        }
    }
    Ok(out)
}

fn blanchfield_cmd(text: &str, xi: Option<&str>, opts: &Opts) -> Result<Outcome> {
    let tol = tol(opts);
    let v = io::seifert_from_json(&io::parse_json(text)?)?;
    let m = blanchfield::alexander_module(&v)?;
    let delta = m.alexander_polynomial();
    let mut checks = blanchfield::check_seifert(&v, tol)?;
    if let Some(s) = xi {
        let xi = io::xi_from_str(s)?;
        let order = truncation(opts, v.rows() + 2)?;
        let known = checks.iter().position(|c| (c.xi.angle() - xi.angle()).abs() < 1e-9);
        match known {
            Some(k) => checks = vec![checks.swap_remove(k)],
            None => {
                // not a root: the local module is zero
                let (dim, profile) = match (&xi, opts.backend) {
                    (Xi::RootOfUnity(..), Backend::Exact) => blanchfield::pushforward_profile(&m, &xi, order, tol)?,
                    _ => blanchfield::pushforward_profile(&m, &Xi::Angle(xi.angle()), order, tol)?,
                };
                let lt = blanchfield::levine_tristram(&v, &xi.to_complex(), Tol(1e-9)).ok();
                let mut out = Outcome::new(
                    dim == 0,
                    json!({"alexander": delta.to_string(), "xi": xi, "local_dimension": dim, "profile": profile, "levine_tristram": lt}),
                );
                out.row("alexander", &delta);
                out.row("xi", &xi);
                out.row("local_dimension", dim);
                out.row("profile", profile_text(&profile));
                return Ok(out);
            }
        }
    }
    let ok = checks.iter().all(|c| c.agrees);
    let mut out = Outcome::new(ok, json!({"alexander": delta.to_string(), "jump_sign": blanchfield::JUMP_SIGN, "roots": checks}));
    out.row("alexander", &delta);
    for c in &checks {
        out.row(
            &format!("xi = {}", c.xi),
            format!(
                "dim {}  {}  LT {} -> {}  jump {}  2*sign*odd {}  {}",
                c.local_dimension,
                profile_text(&c.profile),
                c.lt_before,
                c.lt_after,
                c.lt_jump,
                c.predicted_jump,
                if c.agrees { "ok" } else { "MISMATCH" }
            ),
        );
    }
    if checks.is_empty() {
        out.row("roots on the unit circle", "none");
    }
    Ok(out)
}

fn complex<F: Scalar>(text: &str, opts: &Opts) -> Result<Outcome> {
    let tol = tol(opts);
    let c: GermComplex<F> = io::complex_from_json(&io::parse_json(text)?, truncation(opts, 4)?, tol)?;
    let h = c.torsion_cohomology(tol);
    let link = c.homological_linking(tol).ok();
    let mut out = Outcome::new(
        true,
        json!({
            "degrees": c.dims(),
            "truncation": c.order(),
            "cohomology": h,
            "parity": link.as_ref().map(|l| l.parity),
            "symmetric": link.as_ref().map(|l| l.symmetric),
            "profile": link.as_ref().and_then(|l| l.profile.clone()),
        }),
    );
    for d in &h {
        out.row(&format!("H^{}", d.degree), format!("free {}  torsion {:?}", d.free_rank, d.torsion_orders));
    }
    if let Some(l) = &link {
        out.warnings = l.warnings.clone();
        out.row("symmetric", l.symmetric);
        if let Some(p) = &l.profile {
            out.row("profile", profile_text(p));
        }
    }
    Ok(out)
}

fn verify(corpus: &str, count: usize, opts: &Opts) -> Result<(Outcome, Option<String>)> {
    let (text, digest) = if Path::new(corpus).is_file() {
        let (t, d) = read_input(Path::new(corpus))?;
        (t, Some(d))
    } else {
        (corpus.to_string(), None)
    };
    let spec = CorpusSpec::parse(&text)?;
    let fams = generate_families(&spec, opts.seed, count, Tol::default());
    let r = verify_families(&fams, Tol::default());
    let mut out = Outcome::new(r.all_passed(), serde_json::to_value(&r).expect("serializable"));
    out.row("instances", r.count);
    out.row("passed", r.passed);
    out.row("oracle_agreements", format!("{}/{}", r.oracle_agreements, r.count));
    out.row("flow identity", format!("{}/{}", r.flow_identity, r.count));
    out.row("even identity", format!("{}/{}", r.even_identity, r.count));
    out.row("first form", format!("{}/{}", r.first_form, r.count));
    out.row("time reversal", format!("{}/{}", r.time_reversal, r.count));
    out.row("rescaling", format!("{}/{}", r.rescaling, r.count));
    out.row("planted recovered", format!("{}/{}", r.planted_recovered, r.planted_total));
    for c in r.instances.iter().filter(|c| !c.passed()).take(10) {
        out.row(&format!("FAILED #{}", c.index), c.error.clone().unwrap_or_else(|| format!("{c:?}")));
    }
    Ok((out, digest))
}

macro_rules! by_backend {
    ($opts:expr, $exact:ty, $f:ident ( $($arg:expr),* )) => {
        match $opts.backend {
            Backend::Exact => $f::<$exact>($($arg),*),
            Backend::Float => $f::<Complex64>($($arg),*),
        }
    };
}

fn run(cli: &Cli) -> Result<(Outcome, Option<String>)> {
    let opts = &cli.opts;
    if !(opts.tolerance > 0.0 && opts.tolerance < 1.0) {
        return Err(Error::Input("--tolerance must lie in (0, 1)".into()));
    }
    match &cli.cmd {
        Cmd::Jumps { family } => {
            let (text, d) = read_input(family)?;
            Ok((by_backend!(opts, GaussRat, jumps(&text, opts))?, Some(d)))
        }
        Cmd::Linkform { form } => {
            let (text, d) = read_input(form)?;
            Ok((by_backend!(opts, GaussRat, linkform(&text, opts))?, Some(d)))
        }
        Cmd::Circle { rank, monodromy } => {
            let d = Sha256::digest(monodromy.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
            Ok((by_backend!(opts, Cyclo, circle(*rank, monodromy, opts))?, Some(d)))
        }
        Cmd::Blanchfield { seifert, xi } => {
            let (text, d) = read_input(seifert)?;
            Ok((blanchfield_cmd(&text, xi.as_deref(), opts)?, Some(d)))
        }
        Cmd::Complex { complex: path } => {
            let (text, d) = read_input(path)?;
            Ok((by_backend!(opts, Cyclo, complex(&text, opts))?, Some(d)))
        }
        Cmd::Verify { corpus, count } => verify(corpus, *count, opts),
    }
}

fn print_table(rows: &[(String, String)]) {
    let w = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    for (k, v) in rows {
        println!("{k:<w$}  {v}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let command: Vec<String> = std::env::args().skip(1).collect();
    let (out, digest) = match run(&cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            return ExitCode::from(if e.is_input_error() { 2 } else { 1 });
        }
    };
    let report = Report {
        command,
        input_digest: digest,
        backend: cli.opts.backend,
        ok: out.ok,
        result: out.result,
        warnings: out.warnings.clone(),
    };
    let json = serde_json::to_string_pretty(&report).expect("serializable report");
    let to_stdout = cli.opts.json.as_deref() == Some(Path::new("-"));
    if to_stdout {
        // a closed pipe is the reader's choice, not an error
        let _ = writeln!(std::io::stdout().lock(), "{json}");
    } else {
        print_table(&out.text);
        for w in &out.warnings {
            println!("warning: {w}");
        }
        println!("status: {}  ({:.2?})", if out.ok { "ok" } else { "FAILED" }, start.elapsed());
        if let Some(path) = &cli.opts.json {
            if let Err(e) = fs::write(path, json + "\n") {
                eprintln!("error[Input]: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
    }
    ExitCode::from(if out.ok { 0 } else { 1 })
}

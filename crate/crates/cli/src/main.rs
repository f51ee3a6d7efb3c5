//! `l1bar`: command-line front end.
//!
//! Exit codes: 0 on success, 1 when a mathematical check fails (an axiom,
//! an infeasible filling, a rejected certificate), 2 on input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use l1bar::fill::{fill_min, ubc_kappa_exact, KappaOptions, KappaValue, SupportPolicy};
use l1bar::homology::{betti, BoundaryMatrix};
use l1bar::io::{
    self, chain_to_records, cochain_to_records, load_chain, load_cochain, load_group, Certificate, CertificateFile,
    MitosisFile, PipelineFile,
};
use l1bar::mitosis::{self, mitosis_of_finite_abelian, verify_mitosis, Pipeline, PipelineConfig, Verdict};
use l1bar::products::{cross_chain, cup, pair_compat_check};
use l1bar::rational::{self, Q};
use l1bar::{Chain, Error, Group, Homomorphism, Result};

#[derive(Parser)]
#[command(name = "l1bar", version, about = "Exact l1 computations in the bar complex of groups")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Print the machine-readable record instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    /// Where to write the result. Commands that produce a certificate write
    /// it here; the others write their report.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest number of basis tuples any single computation may enumerate.
    #[arg(long, global = true, env = "L1BAR_SIZE_CAP", default_value_t = 100_000)]
    cap: u128,
}

#[derive(Subcommand)]
enum Command {
    /// Group files.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Boundary of a chain, or the boundary matrix as sparse triplets.
    Boundary {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, required_unless_present = "matrix")]
        chain: Option<PathBuf>,
        #[arg(long)]
        degree: Option<usize>,
        /// Print `∂_degree` as `row col value` triplets.
        #[arg(long, requires = "degree")]
        matrix: bool,
    },
    /// Rational Betti number of a finite group.
    Homology {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        degree: usize,
    },
    /// l1-minimal filling of a boundary.
    Fill {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        degree: Option<usize>,
        /// Starting word-length radius of the support (infinite groups).
        #[arg(long)]
        radius: Option<usize>,
    },
    /// UBC constant of a finite group in one degree.
    Kappa {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cross product of two chains.
    Cross {
        #[arg(long)]
        left_group: PathBuf,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right_group: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Cup product of two cochains.
    Cup {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// `⟨f × g, c × d⟩ = ±⟨f, c⟩⟨g, d⟩` for cocycles and cycles.
    Pair {
        #[arg(long)]
        left_group: PathBuf,
        #[arg(long)]
        right_group: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        c: PathBuf,
        #[arg(long)]
        d: PathBuf,
    },
    /// Mitosis files.
    #[command(subcommand)]
    Mitosis(MitosisCmd),
    /// Bounded primitives through a mitosis, for a batch of boundaries.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
    },
    /// The tower of UBC constants over degrees.
    Tower {
        #[arg(long)]
        q_max: usize,
        /// Filling ratio of the Alexander-Whitney defect, per degree; the
        /// last value is repeated.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        xi: Vec<String>,
    },
    /// Re-check a certificate without solving anything.
    Verify { certificate: PathBuf },
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Load a group and check the group axioms.
    Check {
        #[arg(long)]
        group: PathBuf,
    },
}

#[derive(Subcommand)]
enum MitosisCmd {
    /// Check the three mitosis axioms.
    Verify {
        #[arg(long)]
        mitosis: PathBuf,
    },
    /// `(G × G) ⋊ ⟨φ, ψ⟩` for a finite abelian group.
    BuildAbelian {
        #[arg(long)]
        group: PathBuf,
    },
}

/// Result of one command: the text report, the JSON record, an optional
/// certificate and whether the mathematical check passed.
struct Report {
    text: String,
    record: Value,
    certificate: Option<String>,
    ok: bool,
}

impl Report {
    fn ok(text: String, record: Value) -> Self {
        Report {
            text,
            record,
            certificate: None,
            ok: true,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(&cli) {
        Ok(report) => match emit(&cli, report, started) {
            Ok(code) => code,
            Err(e) => fail(&e),
        },
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_mathematical() { 1 } else { 2 })
}

fn emit(cli: &Cli, report: Report, started: Instant) -> Result<ExitCode> {
    let g = &cli.global;
    let body = if g.json {
        let mut v = json!({
            "tool": io::TOOL,
            "version": io::VERSION,
            "command": command_name(&cli.command),
            "ok": report.ok,
            "result": report.record,
        });
        v["elapsed_ms"] = json!(started.elapsed().as_millis() as u64);
        format!("{}\n", serde_json::to_string_pretty(&v)?)
    } else {
        format!("{}\n", report.text.trim_end())
    };
    match (&g.out, &report.certificate) {
        (Some(path), Some(cert)) => {
            std::fs::write(path, cert)?;
            print!("{body}");
        }
        (Some(path), None) => std::fs::write(path, body)?,
        (None, _) => print!("{body}"),
    }
    Ok(if report.ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Group(GroupCmd::Check { .. }) => "group check",
        Command::Boundary { .. } => "boundary",
        Command::Homology { .. } => "homology",
        Command::Fill { .. } => "fill",
        Command::Kappa { .. } => "kappa",
        Command::Cross { .. } => "cross",
        Command::Cup { .. } => "cup",
        Command::Pair { .. } => "pair",
        Command::Mitosis(MitosisCmd::Verify { .. }) => "mitosis verify",
        Command::Mitosis(MitosisCmd::BuildAbelian { .. }) => "mitosis build-abelian",
        Command::Pipeline { .. } => "pipeline",
        Command::Tower { .. } => "tower",
        Command::Verify { .. } => "verify",
    }
}

fn policy(g: &Group, cap: u128, radius: Option<usize>) -> SupportPolicy {
    match radius {
        Some(r) => SupportPolicy::Ball {
            radius: r,
            max_radius: r.max(24),
        },
        None if g.is_finite() => SupportPolicy::Full { cap },
        None => SupportPolicy::ball(),
    }
}

fn r(q: &Q) -> String {
    rational::render(q)
}

fn run(cli: &Cli) -> Result<Report> {
    let cap = cli.global.cap;
    match &cli.command {
        Command::Group(GroupCmd::Check { group }) => {
            let g = load_group(group)?;
            g.check_axioms()?;
            let order = g.order().map_or("infinite".to_string(), |n| n.to_string());
            let abelian = g.is_abelian();
            Ok(Report::ok(
                format!("{}: order {order}, axioms ok", g.label()),
                json!({"label": g.label(), "order": order, "abelian": abelian, "axioms": true}),
            ))
        }
        Command::Boundary {
            group,
            chain,
            degree,
            matrix,
        } => {
            let g = load_group(group)?;
            if *matrix {
                let k = degree.expect("clap enforces --degree");
                let m = BoundaryMatrix::new(&g, k, cap)?;
                let text = m.to_triplets();
                return Ok(Report::ok(text.clone(), json!({"degree": k, "triplets": text})));
            }
            let c = load_chain(chain.as_ref().expect("clap enforces --chain"), &g, *degree)?;
            let b = c.boundary()?;
            Ok(Report::ok(
                format!("∂c = {b}\n‖c‖₁ = {}, ‖∂c‖₁ = {}", r(&c.l1_norm()), r(&b.l1_norm())),
                json!({"degree": b.degree(), "chain": chain_to_records(&b)}),
            ))
        }
        Command::Homology { group, degree } => {
            let g = load_group(group)?;
            let b = betti(&g, *degree, cap)?;
            Ok(Report::ok(format!("H_{degree} rank: {b}"), json!({"degree": degree, "rank": b})))
        }
        Command::Fill {
            group,
            chain,
            degree,
            radius,
        } => {
            let g = load_group(group)?;
            let z = load_chain(chain, &g, *degree)?;
            let cert = fill_min(&z, &policy(&g, cap, *radius))?;
            let file = CertificateFile::new(Certificate::fill(&cert));
            Ok(Report {
                text: format!(
                    "c = {}\n‖c‖₁ = {}, ratio = {} (support {}, {})",
                    cert.primitive,
                    r(&cert.primitive.l1_norm()),
                    r(&cert.ratio),
                    cert.support,
                    cert.method
                ),
                record: serde_json::to_value(&file)?,
                certificate: Some(file.to_json()),
                ok: true,
            })
        }
        Command::Kappa {
            group,
            degree,
            samples,
            seed,
        } => {
            let g = load_group(group)?;
            let opts = KappaOptions {
                size_cap: cap,
                samples: *samples,
                seed: *seed,
                ..KappaOptions::default()
            };
            let k = ubc_kappa_exact(&g, *degree, &opts)?;
            let text = match &k.value {
                KappaValue::Exact(v) => format!("kappa = {} (exact, {})", r(v), k.method.tag()),
                KappaValue::Bounds { lower, upper } => {
                    format!("kappa in [{}, {}] (bounds, {})", r(lower), r(upper), k.method.tag())
                }
            };
            let file = CertificateFile::new(Certificate::kappa(&k));
            Ok(Report {
                text,
                record: serde_json::to_value(&file)?,
                certificate: Some(file.to_json()),
                ok: true,
            })
        }
        Command::Cross {
            left_group,
            left,
            right_group,
            right,
        } => {
            let (g, h) = (load_group(left_group)?, load_group(right_group)?);
            let x = cross_chain(&load_chain(left, &g, None)?, &load_chain(right, &h, None)?);
            Ok(Report::ok(
                format!("a × b = {x}"),
                json!({"degree": x.degree(), "chain": chain_to_records(&x)}),
            ))
        }
        Command::Cup { group, left, right } => {
            let g = load_group(group)?;
            let f = cup(&load_cochain(left, &g, None)?, &load_cochain(right, &g, None)?)?;
            let recs = cochain_to_records(&f)?;
            let lines: Vec<String> = recs
                .iter()
                .map(|c| format!("({}) ↦ {}", c.tuple.join(", "), c.value))
                .collect();
            Ok(Report::ok(
                format!("f ∪ g, degree {}, {} nonzero values\n{}", f.degree(), recs.len(), lines.join("\n")),
                json!({"degree": f.degree(), "cochain": recs}),
            ))
        }
        Command::Pair {
            left_group,
            right_group,
            f,
            g,
            c,
            d,
        } => {
            let (a, b) = (load_group(left_group)?, load_group(right_group)?);
            let rep = pair_compat_check(
                &load_cochain(f, &a, None)?,
                &load_cochain(g, &b, None)?,
                &load_chain(c, &a, None)?,
                &load_chain(d, &b, None)?,
            )?;
            Ok(Report {
                text: format!(
                    "bidegree ({}, {}): ⟨f×g, c×d⟩ = {}, ±⟨f,c⟩⟨g,d⟩ = {}: {}",
                    rep.p,
                    rep.q,
                    r(&rep.lhs),
                    r(&rep.rhs),
                    if rep.holds { "equal" } else { "DIFFERENT" }
                ),
                record: json!({"p": rep.p, "q": rep.q, "lhs": r(&rep.lhs), "rhs": r(&rep.rhs), "holds": rep.holds}),
                certificate: None,
                ok: rep.holds,
            })
        }
        Command::Mitosis(MitosisCmd::Verify { mitosis }) => {
            let m = MitosisFile::load(mitosis)?;
            let rep = verify_mitosis(&m)?;
            let line = |name: &str, v: &Verdict| {
                format!(
                    "{name}: {} ({} checked, {}){}",
                    if v.holds { "ok" } else { "FAILS" },
                    v.checked,
                    if v.exhaustive { "exhaustive" } else { "sampled" },
                    v.witness.as_deref().map(|w| format!(", witness {w}")).unwrap_or_default()
                )
            };
            let verdict = |v: &Verdict| json!({"holds": v.holds, "checked": v.checked, "exhaustive": v.exhaustive, "witness": v.witness});
            Ok(Report {
                text: [
                    line("injectivity", &rep.injective),
                    line("axiom 1, generation", &rep.generation),
                    line("axiom 2, i(g)^d = i(g) i(g)^s", &rep.conjugation),
                    line("axiom 3, [i(g'), i(g)^s] = 1", &rep.commuting),
                ]
                .join("\n"),
                record: json!({
                    "injective": verdict(&rep.injective),
                    "generation": verdict(&rep.generation),
                    "conjugation": verdict(&rep.conjugation),
                    "commuting": verdict(&rep.commuting),
                }),
                certificate: None,
                ok: rep.passed(),
            })
        }
        Command::Mitosis(MitosisCmd::BuildAbelian { group }) => {
            let g = load_group(group)?;
            let m = mitosis_of_finite_abelian(&g)?;
            let file = MitosisFile::from_data(&m)?;
            let order = m.ambient.order().expect("finite ambient group");
            Ok(Report {
                text: format!(
                    "M = (G × G) ⋊ ⟨phi, psi⟩ of order {order}; s = {}, d = {}; all axioms hold exhaustively",
                    file.s, file.d
                ),
                record: json!({"order": order, "s": file.s, "d": file.d}),
                certificate: Some(format!("{}\n", serde_json::to_string_pretty(&file)?)),
                ok: true,
            })
        }
        Command::Pipeline { config } => pipeline(config),
        Command::Tower { q_max, xi } => {
            if *q_max == 0 {
                return Err(Error::Parse("--q-max must be at least 1".into()));
            }
            let xis = xi.iter().map(|s| rational::parse(s)).collect::<Result<Vec<Q>>>()?;
            let t = mitosis::tower(*q_max, |q| xis[(q - 1).min(xis.len() - 1)].clone());
            let mut text = String::from("q  n_q  kappa_{q-1}  xi_q  E-bound  kappa_q\n");
            for row in &t.rows[1..] {
                text.push_str(&format!(
                    "{}  {}  {}  {}  {}  {}\n",
                    row.q,
                    row.n,
                    r(&row.kappa_prev),
                    r(&row.xi),
                    r(&row.e_bound),
                    r(&row.kappa)
                ));
            }
            let file = CertificateFile::new(Certificate::tower(&t));
            Ok(Report {
                text,
                record: serde_json::to_value(&file)?,
                certificate: Some(file.to_json()),
                ok: true,
            })
        }
        Command::Verify { certificate } => {
            let file = CertificateFile::load(certificate)?;
            let summary = io::verify_certificate(&file)?;
            Ok(Report::ok(summary.clone(), json!({"verified": true, "summary": summary})))
        }
    }
}

fn pipeline(config: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(config).map_err(|e| Error::Parse(format!("{}: {e}", config.display())))?;
    let file: PipelineFile =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", config.display())))?;
    let base = config.parent().unwrap_or(Path::new("."));
    let h = file.h.load(base)?;
    let h1 = file.h_prime.load(base)?;
    let k = file.k.load(base)?;
    let g = file.g.load(base)?;
    let m = match &file.mitosis {
        Some(p) => MitosisFile::load(&base.join(p))?,
        None => mitosis_of_finite_abelian(&g)?,
    };
    let cfg = PipelineConfig {
        degree: file.degree,
        phi: Homomorphism::from_spec(&file.phi, &h, &h1)?,
        phi_prime: Homomorphism::from_spec(&file.phi_prime, &h1, &k)?,
        psi: Homomorphism::from_spec(&file.psi, &k, &g)?,
        mitosis: m,
        policy: None,
    };
    let zs: Vec<Chain> = match &file.chains {
        Some(p) => {
            let path = base.join(p);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            let lists: Vec<Vec<io::ChainRecord>> =
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            lists
                .iter()
                .map(|recs| io::chain_from_records(&h, Some(file.degree), recs))
                .collect::<Result<_>>()?
        }
        None => mitosis::sample_boundaries(&h, file.degree, file.samples, file.max_terms, file.seed)?,
    };
    let mut p = Pipeline::new(cfg)?;
    let runs = mitosis::run_batch(&mut p, &zs)?;
    let cert = Certificate::pipeline(p.push_map(), file.degree, &runs);
    let tower = match &cert {
        Certificate::Pipeline { tower, .. } => tower.clone(),
        _ => unreachable!(),
    };
    let worst = runs.iter().map(|r| r.ratio.clone()).max().unwrap_or_default();
    let file = CertificateFile::new(cert);
    Ok(Report {
        text: format!(
            "{} runs, all ∂c' = (i∘f)_* z exactly\nlargest ratio {}, kappa {}, xi {}, constant {}",
            runs.len(),
            r(&worst),
            tower.kappa,
            tower.xi,
            tower.constant
        ),
        record: serde_json::to_value(&file)?,
        certificate: Some(file.to_json()),
        ok: true,
    })
}

//! `cobarkit` — command-line access to every operation of the library:
//! Adem normalization, Milnor bases, coproducts/antipodes, Thom comodule
//! coactions and the MSU splitting, cobar differentials, Cotor dimension
//! tables, and the Adams E2 bookkeeping for MSU.
//!
//! Results are JSON on standard output (or `--output FILE`; `--format
//! table` renders a plain-text view). Expensive results are cached under a
//! content-derived key; `--no-cache` disables the cache, and outputs are
//! byte-identical with the cache hot, cold, or off.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use cobarkit::adams;
use cobarkit::cobar::{self, CobarComodule, CobarElement, CotorLimits};
use cobarkit::dual::{self, Ambient, DualElement};
use cobarkit::fp::Prime;
use cobarkit::steenrod::{self, AdmissibleMonomial};
use cobarkit::thom::{self, ComodulePoly};

#[derive(Parser)]
#[command(
    name = "cobarkit",
    version,
    about = "Exact mod-p computations around the Steenrod algebra, MSU, and its Adams E2-term"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Write the result to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output rendering.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cache directory (default: $COBARKIT_CACHE, else ~/.cache/cobarkit).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Compute without reading or writing the cache.
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Cmd {
    /// Normalize a word in the Steenrod algebra to the admissible basis.
    Adem {
        #[arg(long)]
        prime: u32,
        /// e.g. "Sq2 Sq2" (p = 2) or "P1 b P1" (odd p).
        #[arg(long)]
        word: String,
    },
    /// Admissible basis of the Steenrod algebra, degree by degree.
    Basis {
        #[arg(long)]
        prime: u32,
        #[arg(long)]
        tmax: u64,
    },
    /// Milnor basis of the dual Steenrod algebra or a quotient.
    MilnorBasis {
        #[arg(long)]
        prime: u32,
        #[arg(long)]
        tmax: u64,
        /// full | A_prime | A_mod_A_prime | Lambda_tau0.
        #[arg(long, default_value = "full")]
        ambient: String,
    },
    /// Coproduct of a dual element (JSON file).
    Coproduct {
        #[arg(long)]
        input: PathBuf,
    },
    /// Antipode of a dual element (JSON file, full dual only).
    Antipode {
        #[arg(long)]
        input: PathBuf,
    },
    /// Degree-t component of xibar^k (xibar = conjugate xi series).
    Xibar {
        #[arg(long)]
        prime: u32,
        /// Integer exponent, possibly negative.
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long)]
        t: u64,
    },
    /// Coaction of a comodule-algebra polynomial (JSON file).
    Coaction {
        #[arg(long)]
        input: PathBuf,
    },
    /// Monomial basis of PH (the primitive generators of H_*(MSU)).
    Primitives {
        #[arg(long)]
        prime: u32,
        #[arg(long)]
        tmax: u64,
    },
    /// Apply the splitting G: H_*(MSU) -> A' (x) PH.
    SplitG {
        #[arg(long)]
        input: PathBuf,
    },
    /// Verify degreewise that G is an isomorphism of comodule algebras.
    VerifyG {
        #[arg(long)]
        prime: u32,
        #[arg(long)]
        tmax: u64,
    },
    /// Apply the standard map H_*(MSU) -> H_*(MU).
    IncludeMu {
        #[arg(long)]
        input: PathBuf,
    },
    /// Decide membership of an H_*(MU) class in the image of H_*(MSU).
    MemberMsu {
        #[arg(long)]
        input: PathBuf,
    },
    /// Cobar differential of an element (JSON file).
    CobarD {
        #[arg(long)]
        input: PathBuf,
    },
    /// The 1-cocycle Q_t representing q_t.
    ClassQ {
        #[arg(long)]
        prime: u32,
        #[arg(long)]
        t: u32,
    },
    /// Cotor dimension table from the cobar complex.
    Cotor {
        #[arg(long)]
        prime: u32,
        /// full | A_prime | A_mod_A_prime | Lambda_tau0 (kebab accepted).
        #[arg(long, default_value = "full")]
        coalgebra: String,
        /// trivial | MSU | MU | APrime_tensor_PH | extended.
        #[arg(long, default_value = "trivial")]
        comodule: String,
        #[arg(long)]
        smax: u32,
        #[arg(long)]
        tmax: u64,
        /// Cap on any single enumerated basis (exit 3 when exceeded).
        #[arg(long)]
        max_basis: Option<usize>,
    },
    /// Change of rings: Cotor_A(F_p, MSU) vs Cotor_{A//A'}(F_p, F_p) (x) PH.
    ChangeOfRings {
        #[arg(long)]
        prime: u32,
        #[arg(long)]
        smax: u32,
        #[arg(long)]
        tmax: u64,
        #[arg(long)]
        max_basis: Option<usize>,
    },
    /// Adams E2-term for MSU: direct cobar computation vs the q/PH model.
    E2 {
        #[arg(long)]
        prime: u32,
        #[arg(long)]
        smax: u32,
        #[arg(long)]
        tmax: u64,
        /// Emit only the polynomial-model dimensions (cheap).
        #[arg(long)]
        model_only: bool,
        #[arg(long)]
        max_basis: Option<usize>,
    },
    /// Check E2^{s,t} = 0 for odd t - s on the direct computation.
    OddVanishing {
        #[arg(long)]
        prime: u32,
        #[arg(long)]
        smax: u32,
        #[arg(long)]
        tmax: u64,
        #[arg(long)]
        max_basis: Option<usize>,
    },
    /// Rank of pi_{2n}(MSU) away from 2, with E2 stabilization checks.
    PiRank {
        #[arg(long)]
        n: u64,
    },
    /// lambda_n: q if n+1 is a power of the prime q, else 1.
    Lambda {
        #[arg(long)]
        n: u64,
    },
    /// Divisibility bookkeeping for the degree-2n generator.
    SnReport {
        #[arg(long)]
        n: u64,
    },
    /// Image of Q_t in the Lambda[tau_0] cobar complex.
    QImage {
        #[arg(long)]
        prime: u32,
        #[arg(long)]
        t: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ErrorKind {
    Validation,
    Resource,
    Internal,
}

struct CliError {
    kind: ErrorKind,
    message: String,
}

impl From<cobarkit::Error> for CliError {
    fn from(e: cobarkit::Error) -> CliError {
        let kind = match e {
            cobarkit::Error::ResourceLimit { .. } => ErrorKind::Resource,
            _ => ErrorKind::Validation,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

fn internal(message: impl Into<String>) -> CliError {
    CliError {
        kind: ErrorKind::Internal,
        message: message.into(),
    }
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError {
        kind: ErrorKind::Validation,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = match e.kind {
                ErrorKind::Validation => "validation",
                ErrorKind::Resource => "resource",
                ErrorKind::Internal => "internal",
            };
            eprintln!(
                "{}",
                json!({ "error": { "code": code, "message": e.message } })
            );
            ExitCode::from(match e.kind {
                ErrorKind::Validation => 2,
                ErrorKind::Resource => 3,
                ErrorKind::Internal => 1,
            })
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let payload = match cache_location(cli) {
        Some(dir) => {
            let key = cache_key(&cli.cmd)?;
            cache_get_or_compute(&dir, &key, || Ok(execute(&cli.cmd)?.to_string()))?
        }
        None => execute(&cli.cmd)?.to_string(),
    };
    let bytes = match cli.format {
        Format::Json => {
            let mut b = payload.into_bytes();
            b.push(b'\n');
            b
        }
        Format::Table => {
            let v: Value = serde_json::from_str(&payload)
                .map_err(|e| internal(format!("cached payload is not JSON: {e}")))?;
            render_table(&v).into_bytes()
        }
    };
    match &cli.output {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| internal(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| internal(format!("cannot write to standard output: {e}"))),
    }
}

// ---------------------------------------------------------------------------
// Dispatch

fn read_input(path: &PathBuf) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| invalid(format!("{} is not valid JSON: {e}", path.display())))
}

fn limits(max_basis: Option<usize>) -> CotorLimits {
    match max_basis {
        Some(max_basis) => CotorLimits { max_basis },
        None => CotorLimits::default(),
    }
}

fn execute(cmd: &Cmd) -> Result<Value, CliError> {
    Ok(match cmd {
        Cmd::Adem { prime, word } => {
            let p = Prime::new(*prime)?;
            let letters = steenrod::parse_word(word)?;
            steenrod::adem_normalize(p, &[(letters, 1)])?.to_json()
        }
        Cmd::Basis { prime, tmax } => {
            let p = Prime::new(*prime)?;
            let by_degree: Vec<Value> = (0..=*tmax)
                .map(|t| {
                    let basis = steenrod::admissible_basis(p, t);
                    json!({
                        "t": t,
                        "dim": basis.len(),
                        "monomials": basis.iter().map(|m| match m {
                            AdmissibleMonomial::Sq(ks) => json!({ "sq": ks }),
                            AdmissibleMonomial::OddP { eps, pows } => {
                                json!({ "eps": eps, "pows": pows })
                            }
                        }).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json!({ "p": p.get(), "by_degree": by_degree })
        }
        Cmd::MilnorBasis {
            prime,
            tmax,
            ambient,
        } => {
            let p = Prime::new(*prime)?;
            let ambient = Ambient::parse(ambient)?;
            let mut by_degree = Vec::new();
            for t in 0..=*tmax {
                let basis = dual::milnor_basis(p, t, ambient)?;
                by_degree.push(json!({
                    "t": t,
                    "dim": basis.len(),
                    "monomials": basis.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
                }));
            }
            json!({ "p": p.get(), "ambient": ambient.as_str(), "by_degree": by_degree })
        }
        Cmd::Coproduct { input } => {
            let x = DualElement::from_json(&read_input(input)?)?;
            dual::coproduct(&x).to_json()
        }
        Cmd::Antipode { input } => {
            let x = DualElement::from_json(&read_input(input)?)?;
            dual::antipode(&x)?.to_json()
        }
        Cmd::Xibar { prime, k, t } => {
            let p = Prime::new(*prime)?;
            dual::xibar_power_component(p, *k, *t)?.to_json()
        }
        Cmd::Coaction { input } => {
            let x = ComodulePoly::from_json(&read_input(input)?)?;
            thom::coaction(&x)?.to_json()
        }
        Cmd::Primitives { prime, tmax } => {
            let p = Prime::new(*prime)?;
            let mut by_degree = Vec::new();
            for t in 0..=*tmax {
                let basis = thom::monomial_basis(p, thom::ThomAlgebra::PhMsu, t)?;
                by_degree.push(json!({
                    "t": t,
                    "dim": basis.len(),
                    "monomials": basis.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
                }));
            }
            json!({ "p": p.get(), "by_degree": by_degree })
        }
        Cmd::SplitG { input } => {
            let x = ComodulePoly::from_json(&read_input(input)?)?;
            thom::splitting_g(&x)?.to_json()
        }
        Cmd::VerifyG { prime, tmax } => {
            let p = Prime::new(*prime)?;
            thom::verify_g_iso(p, *tmax)?.to_json()
        }
        Cmd::IncludeMu { input } => {
            let x = ComodulePoly::from_json(&read_input(input)?)?;
            thom::mu_inclusion(&x)?.to_json()
        }
        Cmd::MemberMsu { input } => {
            let x = ComodulePoly::from_json(&read_input(input)?)?;
            let (member, witness) = thom::is_in_msu(&x)?;
            json!({
                "member": member,
                "witness": witness.map(|w| w.to_json()),
            })
        }
        Cmd::CobarD { input } => {
            let x = CobarElement::from_json(&read_input(input)?)?;
            cobar::cobar_d(&x)?.to_json()
        }
        Cmd::ClassQ { prime, t } => {
            let p = Prime::new(*prime)?;
            cobar::class_q(p, *t)?.to_json()
        }
        Cmd::Cotor {
            prime,
            coalgebra,
            comodule,
            smax,
            tmax,
            max_basis,
        } => {
            let p = Prime::new(*prime)?;
            let coalgebra = Ambient::parse(coalgebra)?;
            let comodule = CobarComodule::parse(comodule)?;
            let dims = cobar::cotor_dims(p, coalgebra, comodule, *smax, *tmax, limits(*max_basis))?;
            json!({
                "p": p.get(),
                "coalgebra": coalgebra.as_str(),
                "comodule": comodule.as_str(),
                "s_max": smax,
                "t_max": tmax,
                "dims": cobar::dims_to_json(&dims),
            })
        }
        Cmd::ChangeOfRings {
            prime,
            smax,
            tmax,
            max_basis,
        } => {
            let p = Prime::new(*prime)?;
            cobar::change_of_rings_check(p, *smax, *tmax, limits(*max_basis))?.to_json()
        }
        Cmd::E2 {
            prime,
            smax,
            tmax,
            model_only,
            max_basis,
        } => {
            let p = Prime::new(*prime)?;
            if *model_only {
                let model = adams::e2_model_dims(p, *smax, *tmax)?;
                json!({
                    "p": p.get(),
                    "s_max": smax,
                    "t_max": tmax,
                    "model": cobar::dims_to_json(&model),
                })
            } else {
                adams::e2_direct_vs_model(p, *smax, *tmax, limits(*max_basis))?.to_json()
            }
        }
        Cmd::OddVanishing {
            prime,
            smax,
            tmax,
            max_basis,
        } => {
            let p = Prime::new(*prime)?;
            adams::odd_vanishing(p, *smax, *tmax, limits(*max_basis))?.to_json()
        }
        Cmd::PiRank { n } => adams::pi_rank_verified(*n)?.to_json(),
        Cmd::Lambda { n } => json!({ "n": n, "lambda": adams::lambda(*n) }),
        Cmd::SnReport { n } => adams::sn_report(*n),
        Cmd::QImage { prime, t } => {
            let p = Prime::new(*prime)?;
            adams::q_image_check(p, *t)?.to_json()
        }
    })
}

// ---------------------------------------------------------------------------
// Cache

fn cache_location(cli: &Cli) -> Option<PathBuf> {
    if cli.no_cache {
        return None;
    }
    if let Some(dir) = &cli.cache_dir {
        return Some(dir.clone());
    }
    if let Ok(dir) = std::env::var("COBARKIT_CACHE") {
        if !dir.is_empty() {
            return Some(PathBuf::from(dir));
        }
    }
    std::env::var_os("HOME").map(|home| PathBuf::from(home).join(".cache").join("cobarkit"))
}

/// Content-derived cache key: tool version, subcommand, canonicalized
/// arguments, and the contents (not paths) of any input file.
fn cache_key(cmd: &Cmd) -> Result<String, CliError> {
    let input_content = |path: &PathBuf| -> Result<Value, CliError> {
        // Canonicalize through parsed JSON so formatting differences of the
        // same element share a key; unreadable input fails here, exactly as
        // it would at compute time.
        read_input(path)
    };
    let descr = match cmd {
        Cmd::Adem { prime, word } => json!({ "cmd": "adem", "prime": prime, "word": word }),
        Cmd::Basis { prime, tmax } => json!({ "cmd": "basis", "prime": prime, "tmax": tmax }),
        Cmd::MilnorBasis {
            prime,
            tmax,
            ambient,
        } => json!({ "cmd": "milnor-basis", "prime": prime, "tmax": tmax, "ambient": ambient }),
        Cmd::Coproduct { input } => json!({ "cmd": "coproduct", "input": input_content(input)? }),
        Cmd::Antipode { input } => json!({ "cmd": "antipode", "input": input_content(input)? }),
        Cmd::Xibar { prime, k, t } => json!({ "cmd": "xibar", "prime": prime, "k": k, "t": t }),
        Cmd::Coaction { input } => json!({ "cmd": "coaction", "input": input_content(input)? }),
        Cmd::Primitives { prime, tmax } => {
            json!({ "cmd": "primitives", "prime": prime, "tmax": tmax })
        }
        Cmd::SplitG { input } => json!({ "cmd": "split-g", "input": input_content(input)? }),
        Cmd::VerifyG { prime, tmax } => {
            json!({ "cmd": "verify-g", "prime": prime, "tmax": tmax })
        }
        Cmd::IncludeMu { input } => json!({ "cmd": "include-mu", "input": input_content(input)? }),
        Cmd::MemberMsu { input } => json!({ "cmd": "member-msu", "input": input_content(input)? }),
        Cmd::CobarD { input } => json!({ "cmd": "cobar-d", "input": input_content(input)? }),
        Cmd::ClassQ { prime, t } => json!({ "cmd": "class-q", "prime": prime, "t": t }),
        Cmd::Cotor {
            prime,
            coalgebra,
            comodule,
            smax,
            tmax,
            max_basis,
        } => json!({
            "cmd": "cotor", "prime": prime, "coalgebra": coalgebra, "comodule": comodule,
            "smax": smax, "tmax": tmax, "max_basis": max_basis,
        }),
        Cmd::ChangeOfRings {
            prime,
            smax,
            tmax,
            max_basis,
        } => json!({
            "cmd": "change-of-rings", "prime": prime, "smax": smax, "tmax": tmax,
            "max_basis": max_basis,
        }),
        Cmd::E2 {
            prime,
            smax,
            tmax,
            model_only,
            max_basis,
        } => json!({
            "cmd": "e2", "prime": prime, "smax": smax, "tmax": tmax,
            "model_only": model_only, "max_basis": max_basis,
        }),
        Cmd::OddVanishing {
            prime,
            smax,
            tmax,
            max_basis,
        } => json!({
            "cmd": "odd-vanishing", "prime": prime, "smax": smax, "tmax": tmax,
            "max_basis": max_basis,
        }),
        Cmd::PiRank { n } => json!({ "cmd": "pi-rank", "n": n }),
        Cmd::Lambda { n } => json!({ "cmd": "lambda", "n": n }),
        Cmd::SnReport { n } => json!({ "cmd": "sn-report", "n": n }),
        Cmd::QImage { prime, t } => json!({ "cmd": "q-image", "prime": prime, "t": t }),
    };
    let key_src = json!({
        "tool": "cobarkit",
        "version": env!("CARGO_PKG_VERSION"),
        "job": descr,
    });
    let mut hasher = Sha256::new();
    hasher.update(key_src.to_string().as_bytes());
    Ok(format!("{:x}", hasher.finalize()))
}

/// Reads the cached payload for `key`, or computes, stores (atomic
/// temp-file rename), and returns it. Cache trouble — unreadable entries,
/// unwritable directories — silently degrades to plain computation.
fn cache_get_or_compute(
    dir: &std::path::Path,
    key: &str,
    producer: impl FnOnce() -> Result<String, CliError>,
) -> Result<String, CliError> {
    let bucket = dir.join(&key[..2]).join(&key[2..4]);
    let path = bucket.join(format!("{key}.json"));
    if let Ok(text) = std::fs::read_to_string(&path) {
        if serde_json::from_str::<Value>(&text).is_ok() {
            return Ok(text);
        }
        // Corrupt entry: fall through and overwrite with a fresh value.
    }
    let payload = producer()?;
    if std::fs::create_dir_all(&bucket).is_ok() {
        let tmp = bucket.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_nanos())
                .unwrap_or(0)
        ));
        if std::fs::write(&tmp, &payload).is_ok() {
            let _ = std::fs::rename(&tmp, &path);
        }
    }
    Ok(payload)
}

// ---------------------------------------------------------------------------
// Table rendering

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn cell(v: &Value) -> String {
    scalar(v).unwrap_or_else(|| v.to_string())
}

/// Renders an array of objects as an aligned table, one row per object,
/// columns the sorted union of keys.
fn render_rows(rows: &[Value], indent: usize, out: &mut String) {
    let mut columns: Vec<String> = Vec::new();
    for row in rows {
        if let Value::Object(map) = row {
            for k in map.keys() {
                if !columns.contains(k) {
                    columns.push(k.clone());
                }
            }
        }
    }
    columns.sort();
    if columns.is_empty() {
        for row in rows {
            out.push_str(&" ".repeat(indent));
            out.push_str(&cell(row));
            out.push('\n');
        }
        return;
    }
    let mut grid: Vec<Vec<String>> = vec![columns.clone()];
    for row in rows {
        let map = row.as_object();
        grid.push(
            columns
                .iter()
                .map(|c| {
                    map.and_then(|m| m.get(c))
                        .map(cell)
                        .unwrap_or_else(|| "-".into())
                })
                .collect(),
        );
    }
    let widths: Vec<usize> = (0..columns.len())
        .map(|i| grid.iter().map(|r| r[i].len()).max().unwrap_or(0))
        .collect();
    for row in &grid {
        out.push_str(&" ".repeat(indent));
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
}

fn render_value(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match scalar(val) {
                    Some(s) => {
                        out.push_str(&" ".repeat(indent));
                        out.push_str(&format!("{k}: {s}\n"));
                    }
                    None => {
                        out.push_str(&" ".repeat(indent));
                        out.push_str(&format!("{k}:\n"));
                        render_value(val, indent + 2, out);
                    }
                }
            }
        }
        Value::Array(rows) => render_rows(rows, indent, out),
        other => {
            out.push_str(&" ".repeat(indent));
            out.push_str(&cell(other));
            out.push('\n');
        }
    }
}

fn render_table(v: &Value) -> String {
    let mut out = String::new();
    render_value(v, 0, &mut out);
    out
}

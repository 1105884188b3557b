//! `etfforge`: build, verify, screen and export polyphase BIBD frames.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use etfforge_core::verify::{compare_reference_screen, phased_bibd_dimension};
use etfforge_core::*;

#[derive(Parser)]
#[command(
    name = "etfforge",
    version,
    about = "Polyphase BIBD equiangular tight frames"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a polyphase matrix and write it with a JSON manifest.
    Construct {
        #[arg(long, value_enum)]
        family: Family,
        /// Prime power for the affine and brouwer families.
        #[arg(long)]
        q: Option<u64>,
        /// Number of points for the simplex family.
        #[arg(long)]
        v: Option<usize>,
        /// Output directory.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run the applicable checks on a POLYPHASE or incidence file.
    Verify {
        file: PathBuf,
        /// Comma-separated subset of bibd, combinatorial, algebraic, etf,
        /// drackn, gq, srg. Defaults to everything applicable except srg.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<CheckKind>>,
        /// trivial, index:K, real or all-nontrivial.
        #[arg(long, default_value = "all-nontrivial")]
        character: String,
        #[arg(long)]
        json: bool,
    },
    /// List BIBD parameters meeting the phased BIBD ETF conditions.
    Screen {
        #[arg(long)]
        kmin: u64,
        #[arg(long)]
        kmax: u64,
        /// Compare against the embedded reference table.
        #[arg(long = "check-table1")]
        check_table1: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Convert a polyphase matrix to another representation.
    Export {
        input: PathBuf,
        #[arg(long, value_enum)]
        to: ExportFormat,
        /// trivial, index:K or real; defaults to the first nontrivial character.
        #[arg(long)]
        character: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
        /// Allow conversions that lose information.
        #[arg(long)]
        force: bool,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Family {
    Simplex,
    Example933,
    Affine,
    Brouwer,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Bibd,
    Combinatorial,
    Algebraic,
    Etf,
    Drackn,
    Gq,
    Srg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    PolyphaseText,
    Json,
    CsvComplex,
    Incidence,
    Lift,
    Gram,
    Gq,
}

enum Selector {
    Trivial,
    Index(usize),
    Real,
    AllNontrivial,
}

fn parse_selector(s: &str) -> Result<Selector> {
    Ok(match s {
        "trivial" => Selector::Trivial,
        "real" => Selector::Real,
        "all-nontrivial" => Selector::AllNontrivial,
        _ => match s.strip_prefix("index:") {
            Some(k) => Selector::Index(
                k.parse()
                    .with_context(|| format!("bad character index {k:?}"))?,
            ),
            None => bail!("unknown character selector {s:?}"),
        },
    })
}

fn select_characters(group: &AbelianGroup, sel: &Selector) -> Result<Vec<Character>> {
    let all = characters_of(group);
    Ok(match sel {
        Selector::Trivial => vec![all[0].clone()],
        Selector::Index(k) => vec![all
            .get(*k)
            .cloned()
            .ok_or_else(|| anyhow!("character index {k} out of range for {group}"))?],
        Selector::Real => vec![group
            .real_character()
            .ok_or_else(|| anyhow!("{group} has odd order, so no real nontrivial character"))?],
        Selector::AllNontrivial => all.into_iter().skip(1).collect(),
    })
}

/// Writes via a sibling temporary file so readers never see partial output.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).with_context(|| format!("cannot write {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

#[derive(Serialize)]
struct Expected {
    d: u64,
    n: u64,
}

#[derive(Serialize)]
struct Manifest {
    family: Family,
    params: serde_json::Value,
    group: String,
    rows: usize,
    cols: usize,
    bibd: BibdParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    gq: Option<GqParams>,
    drackn: Option<DracknParams>,
    expected: Expected,
}

fn manifest(family: Family, params: serde_json::Value, m: &PolyphaseMatrix) -> Result<Manifest> {
    let bibd = BibdParams::from_incidence(&m.modulus_squared())
        .ok_or_else(|| anyhow!("support is not a BIBD"))?;
    let f = m.group().order() as u64;
    let d = phased_bibd_dimension(&bibd)
        .ok_or_else(|| anyhow!("dimension vr/(r+k-1) is not integral"))?;
    Ok(Manifest {
        family,
        params,
        group: m.group().to_string(),
        rows: m.rows(),
        cols: m.cols(),
        bibd,
        gq: (f == bibd.k).then(|| GqParams::new(bibd.k - 1, bibd.r)),
        drackn: DracknParams::from_bibd(&bibd, f),
        expected: Expected { d, n: bibd.v },
    })
}

fn cmd_construct(family: Family, q: Option<u64>, v: Option<usize>, out: &Path) -> Result<ExitCode> {
    let need_q = || q.ok_or_else(|| anyhow!("--q is required for this family"));
    let (stem, params, m) = match family {
        Family::Simplex => {
            let v = v.ok_or_else(|| anyhow!("--v is required for the simplex family"))?;
            (
                format!("simplex-v{v}"),
                serde_json::json!({ "v": v }),
                simplex_phased(v)?,
            )
        }
        Family::Example933 => (
            "example933".to_string(),
            serde_json::json!({}),
            example_9_3_3(),
        ),
        Family::Affine => {
            let q = need_q()?;
            (
                format!("affine-q{q}"),
                serde_json::json!({ "q": q }),
                affine_polyphase(q)?,
            )
        }
        Family::Brouwer => {
            let q = need_q()?;
            (
                format!("brouwer-q{q}"),
                serde_json::json!({ "q": q }),
                brouwer_polyphase(q)?,
            )
        }
    };
    let man = manifest(family, params, &m)?;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let matrix_path = out.join(format!("{stem}.polyphase"));
    let manifest_path = out.join(format!("{stem}.json"));
    write_atomic(&matrix_path, m.to_text().as_bytes())?;
    let mut json = serde_json::to_string_pretty(&man)?;
    json.push('\n');
    write_atomic(&manifest_path, json.as_bytes())?;
    println!(
        "wrote {} ({}x{} over {}), d={}, n={}",
        matrix_path.display(),
        m.rows(),
        m.cols(),
        m.group(),
        man.expected.d,
        man.expected.n
    );
    Ok(ExitCode::SUCCESS)
}

enum Input {
    Polyphase(PolyphaseMatrix),
    Incidence(IncidenceMatrix),
}

fn read_input(path: &Path) -> Result<Input> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let ctx = || format!("cannot parse {}", path.display());
    if text.starts_with("POLYPHASE") {
        Ok(Input::Polyphase(
            PolyphaseMatrix::parse_text(&text).with_context(ctx)?,
        ))
    } else if text.trim_start().starts_with('{') {
        Ok(Input::Polyphase(
            serde_json::from_str(&text).with_context(ctx)?,
        ))
    } else {
        Ok(Input::Incidence(
            IncidenceMatrix::parse_text(&text).with_context(ctx)?,
        ))
    }
}

fn verify_polyphase(
    m: &PolyphaseMatrix,
    checks: Option<&[CheckKind]>,
    sel: &Selector,
) -> Result<VerificationReport> {
    let wants = |c: CheckKind| checks.map_or(c != CheckKind::Srg, |cs| cs.contains(&c));
    let mut rep = VerificationReport::new(format!(
        "{}x{} polyphase matrix over {}",
        m.rows(),
        m.cols(),
        m.group()
    ));
    let x = m.modulus_squared();
    let bibd = BibdParams::from_incidence(&x);
    let f = m.group().order();
    if wants(CheckKind::Bibd) {
        let k = x.row_sums().first().copied().unwrap_or(0);
        rep.absorb(verify_bibd(&x, m.cols(), k));
    }
    let mut exact = None;
    if wants(CheckKind::Combinatorial) {
        let c = verify_polyphase_combinatorial(m);
        exact = Some(c.passed());
        rep.absorb(c);
    }
    if wants(CheckKind::Algebraic) {
        let a = verify_polyphase_algebraic(m);
        if let Some(c) = exact {
            if c != a.passed() {
                rep.push(Check::fail_at(
                    "exact verifiers agree",
                    vec![],
                    "combinatorial and algebraic disagree",
                ));
            }
        }
        exact = Some(a.passed());
        rep.absorb(a);
    }
    if wants(CheckKind::Etf) {
        let want_d = bibd.as_ref().and_then(phased_bibd_dimension);
        let mut numeric_ok = true;
        for gamma in select_characters(m.group(), sel)? {
            let phi = m.evaluate(&gamma)?;
            let (mut r, num) = verify_etf_numeric(&phi)?;
            r.subject = format!("ETF at {gamma}");
            if let Some(d) = want_d {
                r.push(if gamma.is_trivial() || num.d as u64 == d {
                    Check::pass(format!("rank = vr/(r+k-1) = {d}"))
                        .with_detail(format!("measured {}", num.d))
                } else {
                    Check::fail_at(
                        format!("rank = vr/(r+k-1) = {d}"),
                        vec![num.d],
                        "numeric rank differs",
                    )
                });
            }
            numeric_ok &= r.passed();
            rep.absorb(r);
        }
        // at the trivial character the frame is not an ETF, so agreement is only meaningful otherwise
        if let (Some(e), Selector::AllNontrivial) = (exact, sel) {
            rep.push(if e == numeric_ok {
                Check::pass("exact and numeric checks agree")
            } else {
                Check::fail_at(
                    "exact and numeric checks agree",
                    vec![],
                    format!("exact {e}, numeric {numeric_ok}"),
                )
            });
        }
    }
    if wants(CheckKind::Drackn) {
        match bibd
            .as_ref()
            .and_then(|b| DracknParams::from_bibd(b, f as u64).map(|d| (b, d)))
        {
            Some((b, d)) => {
                let gram = m.adjoint().to_group_ring().matmul(&m.to_group_ring())?;
                let a = gram.sub(&GroupRingMatrix::scalar_diagonal(
                    m.cols(),
                    m.group(),
                    b.r as i64,
                ))?;
                rep.absorb(verify_drackn(&a, d.n as usize, d.f as usize, d.c as usize));
            }
            None => rep.push(Check::fail_at(
                "DRACKN parameters",
                vec![f],
                "k(r-1)/f is not an integer",
            )),
        }
    }
    let gq_params = bibd
        .filter(|b| b.k == f as u64)
        .map(|b| (b.k as usize - 1, b.r as usize));
    if wants(CheckKind::Gq) || wants(CheckKind::Srg) {
        match gq_params {
            Some((s, t)) => {
                let z = gq_from_polyphase(m)?;
                if wants(CheckKind::Gq) {
                    rep.absorb(verify_gq_axioms(&z, s, t, true));
                }
                if wants(CheckKind::Srg) {
                    rep.absorb(verify_srg_collinearity(&z, s, t));
                }
            }
            // the GQ only exists when f = k; skip silently unless asked for
            None if checks.is_some() => rep.push(Check::fail_at(
                "GQ applicable",
                vec![f],
                "group order differs from block size",
            )),
            None => {}
        }
    }
    Ok(rep)
}

fn verify_incidence(
    z: &IncidenceMatrix,
    checks: Option<&[CheckKind]>,
) -> Result<VerificationReport> {
    let wants = |c: CheckKind| checks.map_or(c == CheckKind::Gq, |cs| cs.contains(&c));
    let mut rep = VerificationReport::new(format!("{}x{} incidence matrix", z.rows(), z.cols()));
    let rows = z.row_sums();
    let cols = z.col_sums();
    let (s, t) = match (rows.first(), cols.first()) {
        (Some(&a), Some(&b)) if a > 0 && b > 0 => (a - 1, b - 1),
        _ => bail!("empty incidence matrix"),
    };
    if wants(CheckKind::Bibd) {
        rep.absorb(verify_bibd(z, z.cols(), s + 1));
    }
    if wants(CheckKind::Gq) {
        rep.absorb(verify_gq_axioms(z, s, t, false));
    }
    if wants(CheckKind::Srg) {
        rep.absorb(verify_srg_collinearity(z, s, t));
    }
    for c in [
        CheckKind::Combinatorial,
        CheckKind::Algebraic,
        CheckKind::Etf,
        CheckKind::Drackn,
    ] {
        if checks.is_some_and(|cs| cs.contains(&c)) {
            bail!("this check needs a POLYPHASE input");
        }
    }
    Ok(rep)
}

fn cmd_verify(
    file: &Path,
    checks: Option<Vec<CheckKind>>,
    character: &str,
    json: bool,
) -> Result<ExitCode> {
    let sel = parse_selector(character)?;
    let rep = match read_input(file)? {
        Input::Polyphase(m) => verify_polyphase(&m, checks.as_deref(), &sel)?,
        Input::Incidence(z) => verify_incidence(&z, checks.as_deref())?,
    };
    let mut out = std::io::stdout().lock();
    if json {
        serde_json::to_writer_pretty(&mut out, &rep)?;
        writeln!(out)?;
    } else {
        write!(out, "{rep}")?;
    }
    Ok(if rep.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_screen(kmin: u64, kmax: u64, check: bool, csv: bool) -> Result<ExitCode> {
    let rows = screen_parameters(kmin, kmax)?;
    let mut out = std::io::stdout().lock();
    if kmin <= 2 {
        writeln!(
            out,
            "# k=2: u=0 for every v, so no rows are screened; every BIBD(v,2,1) is phased by the simplex family"
        )?;
    }
    if csv {
        writeln!(out, "v,k,r,b,u,d,v-d,real_feasible")?;
        for r in &rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.v,
                r.k,
                r.r,
                r.b,
                r.u,
                r.d,
                r.v - r.d,
                r.real_feasible
            )?;
        }
    } else {
        writeln!(
            out,
            "{:>6} {:>6} {:>6} {:>8} {:>4} {:>6} {:>6}  real",
            "v", "k", "r", "b", "u", "d", "v-d"
        )?;
        for r in &rows {
            writeln!(
                out,
                "{:>6} {:>6} {:>6} {:>8} {:>4} {:>6} {:>6}  {}",
                r.v,
                r.k,
                r.r,
                r.b,
                r.u,
                r.d,
                r.v - r.d,
                if r.real_feasible { "yes" } else { "no" }
            )?;
        }
    }
    if check {
        let rep = compare_reference_screen(&rows, kmin, kmax);
        write!(out, "{rep}")?;
        if !rep.passed() {
            return Ok(ExitCode::FAILURE);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_export(
    input: &Path,
    to: ExportFormat,
    character: Option<&str>,
    output: &Path,
    force: bool,
) -> Result<ExitCode> {
    let m = match read_input(input)? {
        Input::Polyphase(m) => m,
        Input::Incidence(_) => bail!("export needs a POLYPHASE or JSON polyphase input"),
    };
    let lossy = |what: &str| -> Result<()> {
        if force {
            Ok(())
        } else {
            bail!("{what} loses information; pass --force to write it anyway")
        }
    };
    let bytes = match to {
        ExportFormat::PolyphaseText => m.to_text(),
        ExportFormat::Json => serde_json::to_string_pretty(&m)? + "\n",
        ExportFormat::CsvComplex => {
            let sel = match character {
                Some(c) => parse_selector(c)?,
                None => Selector::Index(1.min(m.group().order() - 1)),
            };
            if matches!(sel, Selector::AllNontrivial) {
                bail!("export evaluates at a single character");
            }
            let gamma = select_characters(m.group(), &sel)?.remove(0);
            m.evaluate(&gamma)?.to_csv()
        }
        ExportFormat::Incidence => {
            lossy("the modulus-squared incidence")?;
            m.modulus_squared().to_text()
        }
        ExportFormat::Lift => m.filter_bank_lift().to_text(),
        ExportFormat::Gram => {
            lossy("the Gram matrix")?;
            m.adjoint()
                .to_group_ring()
                .matmul(&m.to_group_ring())?
                .to_string()
        }
        ExportFormat::Gq => gq_from_polyphase(&m)?.to_text(),
    };
    write_atomic(output, bytes.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("ETFFORGE_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("ETFFORGE_THREADS={v:?} is not a number"))?;
        if n > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads()?;
    match cli.command {
        Command::Construct {
            family,
            q,
            v,
            output,
        } => cmd_construct(family, q, v, &output),
        Command::Verify {
            file,
            checks,
            character,
            json,
        } => cmd_verify(&file, checks, &character, json),
        Command::Screen {
            kmin,
            kmax,
            check_table1,
            csv,
        } => cmd_screen(kmin, kmax, check_table1, csv),
        Command::Export {
            input,
            to,
            character,
            output,
            force,
        } => cmd_export(&input, to, character.as_deref(), &output, force),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

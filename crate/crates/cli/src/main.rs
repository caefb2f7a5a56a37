use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use prime_borcherds::borcherds::{
    self, integrality_normalize, product_expansion, standard_chamber, weyl_chamber_of, weyl_vector,
};
use prime_borcherds::character::{self, DiscriminantFormInfo};
use prime_borcherds::gamma0::{self, PrincipalPart, ScalarForm};
use prime_borcherds::quadfield::{QFieldElem, QFieldRepr};
use prime_borcherds::rational::to_text as text;
use prime_borcherds::weil::{self, VectorForm};
use prime_borcherds::{verify, Error};

const DEFAULT_EXTRA: i64 = 25;

#[derive(Parser)]
#[command(
    name = "prime-borcherds",
    version,
    about = "Exact modular forms and Borcherds products for prime discriminant"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// The weight 0 plus-space form f_m with principal part q^-m.
    Fm {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        m: i64,
        /// Truncation order (default: m + 25).
        #[arg(long)]
        prec: Option<i64>,
        /// JSON array of seed forms (required unless p = 5).
        #[arg(long)]
        seeds: Option<PathBuf>,
        /// JSON array of cusp forms for the obstruction test.
        #[arg(long)]
        basis: Option<PathBuf>,
    },
    /// The Eisenstein series E_kappa^delta for Gamma_0(p) with character chi_p.
    Eisenstein {
        #[arg(long)]
        kappa: u32,
        #[arg(long, allow_hyphen_values = true)]
        delta: i32,
        #[arg(long)]
        p: i64,
        #[arg(long, default_value_t = DEFAULT_EXTRA)]
        prec: i64,
    },
    /// Lift a scalar form file to a vector-valued form.
    Lift {
        input: PathBuf,
        /// Generator of the discriminant form (default: canonical for the form's sign).
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<i64>,
    },
    /// Project a vector-valued form file back to a scalar form.
    Project { input: PathBuf },
    /// Weyl vector of f_m (or of --input) for the chamber containing a point.
    WeylVector {
        #[arg(long, required_unless_present = "input")]
        p: Option<i64>,
        #[arg(long, required_unless_present = "input")]
        m: Option<i64>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        prec: Option<i64>,
        /// First coordinate of the base point, as `u,v` meaning u + v sqrt p.
        #[arg(long, allow_hyphen_values = true, requires = "y2")]
        y1: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "y1")]
        y2: Option<String>,
    },
    /// Product expansion of the Borcherds lift of f_m (or of --input).
    Borcherds {
        #[arg(long, required_unless_present = "input")]
        p: Option<i64>,
        #[arg(long, required_unless_present = "input")]
        m: Option<i64>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        prec: Option<i64>,
        #[arg(long, default_value_t = 10)]
        trace_bound: i64,
        #[arg(long, allow_hyphen_values = true, requires = "y2")]
        y1: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "y1")]
        y2: Option<String>,
        /// Grading direction `u,v`; must be totally positive and in the chamber.
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
        /// Scale to integral coefficients and report the gcd.
        #[arg(long)]
        normalize: bool,
    },
    /// Test a principal part against the cusp forms of the dual weight.
    Obstructions {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        pp: PathBuf,
        #[arg(long)]
        basis: Option<PathBuf>,
    },
    /// r mod 8 for each type of the discriminant form F_p.
    SignatureTable,
    /// Quadratic Gauss sum sum_x e(alpha x^2 / p) against its closed form.
    GaussSum {
        #[arg(long)]
        p: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        alpha: i64,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(default_value = "acceptance")]
        suite: String,
    },
}

enum Failure {
    Math(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Math(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let result = run(&cli).and_then(|text| emit(&cli, &text));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("PRIME_BORCHERDS_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| {
        format!("PRIME_BORCHERDS_THREADS must be a non-negative integer, got {v:?}")
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.output {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

fn parse_elem(p: i64, s: &str) -> CliResult<QFieldElem> {
    let (u, v) = s
        .split_once(',')
        .ok_or_else(|| Failure::Math(format!("expected `u,v`, got {s:?}")))?;
    let repr = QFieldRepr {
        u: u.trim().to_string(),
        v: v.trim().to_string(),
    };
    Ok(QFieldElem::from_repr(p, &repr)?)
}

fn run(cli: &Cli) -> CliResult<String> {
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Fm {
            p,
            m,
            prec,
            seeds,
            basis,
        } => {
            let f = fm(*p, *m, *prec, seeds.as_deref(), basis.as_deref())?;
            if json {
                to_json(&f)
            } else {
                Ok(form_table(&f))
            }
        }
        Command::Eisenstein {
            kappa,
            delta,
            p,
            prec,
        } => {
            let f = gamma0::eisenstein_e_delta(*kappa, *delta, *p, *prec)?;
            if json {
                to_json(&f)
            } else {
                Ok(form_table(&f))
            }
        }
        Command::Lift { input, alpha } => {
            let f: ScalarForm = read_json(input)?;
            let info = match alpha {
                Some(a) => DiscriminantFormInfo::new(f.p(), *a)?,
                None => DiscriminantFormInfo::canonical(f.p(), f.sign().as_i32())?,
            };
            let v = weil::lift_scalar_to_vector(&f, &info)?;
            if json {
                to_json(&v)
            } else {
                Ok(vector_table(&v))
            }
        }
        Command::Project { input } => {
            let v: VectorForm = read_json(input)?;
            let f = weil::project_vector_to_scalar(&v)?;
            if json {
                to_json(&f)
            } else {
                Ok(form_table(&f))
            }
        }
        Command::WeylVector {
            p,
            m,
            input,
            prec,
            y1,
            y2,
        } => {
            let f = source_form(*p, *m, input.as_deref(), *prec)?;
            let w = chamber(&f, y1.as_deref(), y2.as_deref())?;
            let rho = weyl_vector(&f, &w)?;
            if json {
                to_json(&serde_json::json!({
                    "p": f.p(),
                    "rho": rho.rho.repr(),
                    "rho_conj": rho.rho_conj().repr(),
                }))
            } else {
                Ok(format!("rho  = {}\nrho' = {}\n", rho.rho, rho.rho_conj()))
            }
        }
        Command::Borcherds {
            p,
            m,
            input,
            prec,
            trace_bound,
            y1,
            y2,
            direction,
            normalize,
        } => {
            let mut extra = DEFAULT_EXTRA;
            loop {
                let f = source_form(
                    *p,
                    *m,
                    input.as_deref(),
                    prec.or_else(|| m.map(|m| m + extra)),
                )?;
                let w = chamber(&f, y1.as_deref(), y2.as_deref())?;
                let d = direction
                    .as_deref()
                    .map(|s| parse_elem(f.p(), s))
                    .transpose()?;
                match product_expansion(&f, &w, d.as_ref(), *trace_bound) {
                    Ok(e) => {
                        return if *normalize {
                            borcherds_output(&integrality_normalize(&e), json)
                        } else {
                            if json {
                                to_json(&e)
                            } else {
                                Ok(expansion_table(&e))
                            }
                        };
                    }
                    // only f_m built here can be extended
                    Err(Error::InsufficientPrecision { .. })
                        if prec.is_none() && input.is_none() && extra < 5000 =>
                    {
                        extra = 2 * extra + 5;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Command::Obstructions { p, pp, basis } => {
            let pp: PrincipalPart = read_json(pp)?;
            if pp.p() != *p {
                return Err(Failure::Math(format!(
                    "principal part is for p = {}, not {p}",
                    pp.p()
                )));
            }
            let basis: Vec<ScalarForm> = match basis {
                Some(path) => read_json(path)?,
                None => {
                    let kappa = 2 - pp.weight();
                    if kappa == 2 && gamma0::dim_s2(*p)? > 0 {
                        return Err(Failure::Math(format!(
                            "S_2(Gamma_0({p}), chi_{p}) is nonzero; supply --basis"
                        )));
                    }
                    Vec::new()
                }
            };
            let report = borcherds::obstruction_check(&pp, &basis)?;
            let pairings: Vec<String> = report.pairings.iter().map(text).collect();
            if json {
                to_json(&serde_json::json!({
                    "ok": report.ok,
                    "a0": text(&report.a0),
                    "pairings": pairings,
                }))
            } else {
                let mut s = format!(
                    "{}\na0 = {}\n",
                    if report.ok { "ok" } else { "obstructed" },
                    text(&report.a0)
                );
                for (i, x) in pairings.iter().enumerate() {
                    s += &format!("pairing[{i}] = {x}\n");
                }
                Ok(s)
            }
        }
        Command::SignatureTable => {
            let rows: Vec<(i64, i32, u8)> = [(1, 1), (3, 1), (1, -1), (3, -1)]
                .into_iter()
                .map(|(pm4, eps)| (pm4, eps, character::signature_mod8(pm4, eps)))
                .collect();
            if json {
                let rows: Vec<_> = rows
                    .iter()
                    .map(|(pm4, eps, r)| {
                        serde_json::json!({"p_mod4": pm4, "epsilon": eps, "r_mod8": r})
                    })
                    .collect();
                to_json(&rows)
            } else {
                let mut s = String::from("p mod 4  epsilon  r mod 8\n");
                for (pm4, eps, r) in rows {
                    s += &format!("{pm4:>7}  {eps:>+7}  {r:>7}\n");
                }
                Ok(s)
            }
        }
        Command::GaussSum { p, alpha } => {
            let g = character::quadratic_gauss_sum(*alpha, *p)?;
            let cf = g.closed_form;
            let eps = match cf.eps_p {
                character::EpsP::One => "1",
                character::EpsP::I => "i",
            };
            if json {
                to_json(&serde_json::json!({
                    "p": p,
                    "alpha": alpha,
                    "sign": cf.sign,
                    "eps_p": eps,
                    "numeric": [g.numeric.re, g.numeric.im],
                    "agrees": g.agrees(),
                }))
            } else {
                Ok(format!(
                    "closed form: {}{}*sqrt({})\nnumeric:     {:.12} {:+.12}i\nagrees:      {}\n",
                    if cf.sign < 0 { "-" } else { "" },
                    eps,
                    p,
                    g.numeric.re,
                    g.numeric.im,
                    g.agrees()
                ))
            }
        }
        Command::Verify { suite } => {
            if suite != "acceptance" {
                return Err(Failure::Math(format!("unknown suite {suite:?}")));
            }
            let results = verify::run_acceptance();
            let failed = results.iter().filter(|r| !r.passed).count();
            let mut s = String::new();
            for r in &results {
                s += &format!("{r}\n");
            }
            s += &format!("{} passed, {failed} failed\n", results.len() - failed);
            if failed > 0 {
                print!("{s}");
                return Err(Failure::Math(format!("{failed} criteria failed")));
            }
            Ok(s)
        }
    }
}

fn fm(
    p: i64,
    m: i64,
    prec: Option<i64>,
    seeds: Option<&Path>,
    basis: Option<&Path>,
) -> CliResult<ScalarForm> {
    let prec = prec.unwrap_or(m + DEFAULT_EXTRA);
    let seeds: Option<Vec<ScalarForm>> = seeds.map(read_json).transpose()?;
    let basis: Option<Vec<ScalarForm>> = basis.map(read_json).transpose()?;
    Ok(gamma0::construct_fm(
        p,
        m,
        prec,
        seeds.as_deref(),
        basis.as_deref(),
    )?)
}

fn source_form(
    p: Option<i64>,
    m: Option<i64>,
    input: Option<&Path>,
    prec: Option<i64>,
) -> CliResult<ScalarForm> {
    match (input, p, m) {
        (Some(path), _, _) => read_json(path),
        (None, Some(p), Some(m)) => fm(p, m, prec, None, None),
        _ => Err(Failure::Math("need --p and --m, or --input".into())),
    }
}

fn chamber(
    f: &ScalarForm,
    y1: Option<&str>,
    y2: Option<&str>,
) -> CliResult<borcherds::WeylChamber> {
    Ok(match (y1, y2) {
        (Some(a), Some(b)) => weyl_chamber_of(f, &parse_elem(f.p(), a)?, &parse_elem(f.p(), b)?)?,
        _ => standard_chamber(f)?,
    })
}

fn form_table(f: &ScalarForm) -> String {
    let mut s = format!(
        "p = {}, weight = {}, sign = {:+}, {:?}\n",
        f.p(),
        f.weight(),
        f.sign().as_i32(),
        f.holomorphy()
    );
    s += &format!("{}\n", f.series());
    s
}

fn vector_table(v: &VectorForm) -> String {
    let info = v.info();
    let mut s = format!(
        "p = {}, alpha = {}, epsilon = {:+}, r mod 8 = {}, weight = {}\n",
        info.p,
        info.alpha,
        info.epsilon,
        info.r_mod8,
        v.weight()
    );
    for (gamma, c) in v.components().iter().enumerate() {
        s += &format!("F_{gamma} = {c}\n");
    }
    s
}

fn expansion_table(e: &borcherds::HilbertExpansion) -> String {
    let mut s = format!(
        "p = {}\nrho = {}\ngrading direction = {}, bound = {}\n",
        e.p, e.rho, e.grading_direction, e.grading_bound
    );
    if !e.caveats.is_empty() {
        s += &format!("caveats: {}\n", e.caveats.join(", "));
    }
    s += &format!("{:>8}  {:<28}  {}\n", "tr(nu d)", "nu", "c");
    s += &format!("{:>8}  {:<28}  {}\n", 0, "0", text(&e.constant));
    for (nu, c) in e.sorted_terms() {
        s += &format!(
            "{:>8}  {:<28}  {}\n",
            text(&e.pairing(&nu)),
            nu.to_string(),
            text(c)
        );
    }
    s
}

fn borcherds_output(n: &borcherds::product::Normalization, json: bool) -> CliResult<String> {
    if json {
        to_json(&serde_json::json!({
            "c": n.c.to_string(),
            "gcd": n.gcd.to_string(),
            "expansion": n.expansion,
        }))
    } else {
        Ok(format!(
            "scaled by c = {}, gcd = {}\n{}",
            n.c,
            n.gcd,
            expansion_table(&n.expansion)
        ))
    }
}

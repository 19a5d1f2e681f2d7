//! `eis`: Fourier coefficients of degree-two Siegel Eisenstein series with primitive
//! nebentypus, their local factors, and the acceptance suites.

use std::io::{self, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use eis_core::arith::is_prime;
use eis_core::characters::{DirichletCharacter, LocalCharacterData};
use eis_core::error::{Error, Result};
use eis_core::form::HalfIntegralForm;
use eis_core::fourier::{coefficient, expand, CoefficientOptions, CoefficientRecord, EisensteinSpec, OraclePolicy};
use eis_core::localfactors::{
    curve_count_ap, k_closed_form, ramified_local_factor, unramified_local_factor, volume_r_closed_form,
    GoodPlaceInput, RamifiedPlaceInput,
};
use eis_core::oracle::ramified::{k_oracle, ramified_brute_force};
use eis_core::oracle::unramified::{brute_force_local_integral, window_for};
use eis_core::oracle::volume::{volume_r, volume_r_flat};
use eis_core::oracle::OracleEstimate;
use eis_core::scalar::{format_rational, rat_pow, Cyclo, Precision, RootOfUnity, Scalar};
use eis_core::tolerances::BOOTSTRAP_SEED;
use eis_core::verify::{run_criterion, CriterionReport, SUITES};

const PRECISION_ENV: &str = "EIS_PRECISION_BITS";

#[derive(Parser, Debug)]
#[command(name = "eis", version, about = "Fourier coefficients of Siegel Eisenstein series of degree two")]
struct Cli {
    /// Working precision in bits for numeric values.
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = Precision::default().bits)]
    precision: u32,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Jsonl)]
    format: Format,

    /// Worker threads for parallel evaluation; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One coefficient a(T) for T = (n, r, m).
    #[command(allow_negative_numbers = true)]
    Coeff {
        #[command(flatten)]
        spec: SpecArgs,
        n: i64,
        r: i64,
        m: i64,
    },
    /// All coefficients with n + m ≤ bound, preceded by a header record.
    Expand {
        #[command(flatten)]
        spec: SpecArgs,
        /// Trace bound on n + m.
        #[arg(short, long)]
        bound: u64,
        /// Also print coefficients that vanish.
        #[arg(long)]
        keep_zero: bool,
    },
    /// Local factors with optional independent oracle evaluation.
    #[command(subcommand)]
    Local(Local),
    /// Runs an acceptance suite by name, or `all`.
    Verify {
        #[arg(value_parser = suite_names())]
        suite: String,
    },
}

fn suite_names() -> clap::builder::PossibleValuesParser {
    let mut names: Vec<&'static str> = SUITES.to_vec();
    names.push("all");
    clap::builder::PossibleValuesParser::new(names)
}

#[derive(Args, Debug)]
struct SpecArgs {
    /// Weight k ≥ 4.
    #[arg(short, long)]
    k: i64,
    /// Nebentypus as "N:index" in Conrey labeling.
    #[arg(short = 'c', long = "character")]
    character: String,
    /// When the K-factor oracle may be used at ramified primes.
    #[arg(long, default_value_t = OraclePolicy::Allow)]
    oracle: OraclePolicy,
    /// Refinement depth of the K-factor oracle.
    #[arg(long, default_value_t = CoefficientOptions::default().oracle_depth)]
    oracle_depth: u32,
}

#[derive(Subcommand, Debug)]
enum Local {
    /// The local integral at p ∤ N with p^{e}, p^{f} and χ_D(p) = L.
    #[command(allow_negative_numbers = true)]
    Unramified {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        e: u32,
        #[arg(short)]
        f: u32,
        #[arg(short = 'L')]
        l: i64,
        #[arg(short)]
        s: i64,
        /// χ_p(p) as ±1 or a fraction a/b of a turn.
        #[arg(long, value_parser = parse_root, default_value = "1")]
        chip: RootOfUnity,
        /// A form with these invariants; enables the brute-force oracle.
        #[arg(short = 'T', value_parser = parse_form)]
        t: Option<HalfIntegralForm>,
    },
    /// The local integral at p | N, with K from the table.
    #[command(allow_negative_numbers = true)]
    Ramified {
        #[command(flatten)]
        place: RamifiedArgs,
        /// Also sum the section over representatives through this λ-denominator exponent.
        #[arg(long)]
        oracle_lw: Option<u32>,
    },
    /// The factor K(s, T, χ_p): table value and oracle value.
    #[command(name = "K", alias = "k", allow_negative_numbers = true)]
    K {
        #[command(flatten)]
        place: RamifiedArgs,
        /// Refinement depth of the oracle.
        #[arg(long, default_value_t = 20)]
        depth: u32,
    },
    /// The volume of R(i, j) for T = (n, 0, m).
    #[command(allow_negative_numbers = true)]
    Volume {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        i: i64,
        #[arg(short)]
        j: i64,
        #[arg(short = 'T', value_parser = parse_form)]
        t: HalfIntegralForm,
        /// Also count residues at this depth.
        #[arg(long)]
        depth: Option<u32>,
    },
    /// a_p of y² = x³ − D·x.
    #[command(allow_negative_numbers = true)]
    Ap {
        #[arg(short)]
        p: u64,
        #[arg(short = 'D')]
        d: i64,
    },
}

#[derive(Args, Debug)]
struct RamifiedArgs {
    #[arg(short)]
    p: u64,
    /// Conductor exponent of χ_p.
    #[arg(long, default_value_t = 1)]
    np: u32,
    /// `quad` for the Legendre character, or "N:index" to take the p-component.
    #[arg(long, default_value = "quad")]
    chi: String,
    /// χ_p(p) as ±1 or a fraction a/b of a turn.
    #[arg(long, value_parser = parse_root, default_value = "1")]
    chip: RootOfUnity,
    #[arg(short = 'T', value_parser = parse_form)]
    t: HalfIntegralForm,
    #[arg(short)]
    s: i64,
}

fn parse_form(s: &str) -> std::result::Result<HalfIntegralForm, String> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [n, r, m] => Ok(HalfIntegralForm::new(n, r, m)),
        _ => Err(format!("expected n,r,m, got `{s}`")),
    }
}

fn parse_root(s: &str) -> std::result::Result<RootOfUnity, String> {
    match s.split_once('/') {
        None => match s.trim().parse::<i64>() {
            Ok(1) => Ok(RootOfUnity::one()),
            Ok(-1) => Ok(RootOfUnity::minus_one()),
            _ => Err(format!("expected 1, -1 or a/b, got `{s}`")),
        },
        Some((a, b)) => {
            let a = a.trim().parse::<i64>().map_err(|e| e.to_string())?;
            let b = b.trim().parse::<u64>().map_err(|e| e.to_string())?;
            if b == 0 {
                return Err("zero denominator".into());
            }
            Ok(RootOfUnity::new(a, b))
        }
    }
}

impl RamifiedArgs {
    fn input(&self) -> Result<RamifiedPlaceInput> {
        if !is_prime(self.p) {
            return Err(Error::Domain(format!("{} is not prime", self.p)));
        }
        let chi = if self.chi == "quad" {
            if self.p == 2 || self.np != 1 {
                return Err(Error::UnsupportedPlace {
                    p: self.p,
                    reason: format!("the Legendre character needs odd p and n_p = 1, got n_p = {}", self.np),
                });
            }
            LocalCharacterData::quadratic(self.p, self.chip)
        } else {
            let eta = DirichletCharacter::from_label(&self.chi)?;
            let comp = eta
                .component(self.p)
                .ok_or_else(|| Error::Domain(format!("{} has no component at p = {}", self.chi, self.p)))?;
            let local = LocalCharacterData::from_dirichlet_component(comp, self.chip);
            if local.n_p != self.np {
                return Err(Error::Domain(format!("{} has conductor exponent {} at p = {}", self.chi, local.n_p, self.p)));
            }
            local
        };
        RamifiedPlaceInput::new(chi, self.t, self.s)
    }
}

impl SpecArgs {
    fn resolve(&self, precision: Precision) -> Result<(EisensteinSpec, CoefficientOptions)> {
        let spec = EisensteinSpec::from_label(self.k, &self.character)?;
        let opts = CoefficientOptions { precision, oracle: self.oracle, oracle_depth: self.oracle_depth };
        Ok((spec, opts))
    }
}

/// Stable output fields of a coefficient record, in column order.
const COLUMNS: [&str; 6] = ["n", "r", "m", "value", "mode", "notes"];

struct Output {
    format: Format,
    digits: usize,
    csv: Option<csv::Writer<io::Stdout>>,
}

impl Output {
    fn new(format: Format, precision: Precision) -> Self {
        let csv = (format == Format::Csv).then(|| csv::Writer::from_writer(io::stdout()));
        Output { format, digits: precision.decimal_digits(), csv }
    }

    fn json_line(&self, v: &Value) -> io::Result<()> {
        let mut out = io::stdout().lock();
        writeln!(out, "{v}")
    }

    fn comment(&mut self, v: &Value) -> io::Result<()> {
        match self.format {
            Format::Jsonl => self.json_line(v),
            Format::Csv => {
                if let Some(w) = self.csv.as_mut() {
                    w.flush()?;
                }
                writeln!(io::stdout().lock(), "# {v}")
            }
        }
    }

    fn value_json(&self, value: &Scalar) -> Value {
        match value {
            Scalar::Exact(c) => Value::String(c.to_string()),
            Scalar::Numeric(z) => json!([z.re.to_decimal(self.digits), z.im.to_decimal(self.digits)]),
        }
    }

    fn coefficient_header(&mut self) -> io::Result<()> {
        if let Some(w) = self.csv.as_mut() {
            w.write_record(COLUMNS)?;
        }
        Ok(())
    }

    fn coefficient(&mut self, rec: &CoefficientRecord) -> io::Result<()> {
        let mut notes = rec.notes.clone();
        notes.extend(rec.k_provenance.iter().map(|(p, how)| format!("K at p={p}: {how}")));
        match self.format {
            Format::Jsonl => self.json_line(&json!({
                "n": rec.t.n,
                "r": rec.t.r,
                "m": rec.t.m,
                "value": self.value_json(&rec.value),
                "mode": rec.mode(),
                "notes": notes,
            })),
            Format::Csv => {
                let value = rec.value.render(self.digits);
                let w = self.csv.as_mut().expect("csv writer");
                w.write_record([
                    rec.t.n.to_string(),
                    rec.t.r.to_string(),
                    rec.t.m.to_string(),
                    value,
                    rec.mode().to_string(),
                    notes.join("; "),
                ])
            }
            .map_err(io::Error::from),
        }
    }

    fn fields(&mut self, fields: &Map<String, Value>) -> io::Result<()> {
        match self.format {
            Format::Jsonl => self.json_line(&Value::Object(fields.clone())),
            Format::Csv => {
                let w = self.csv.as_mut().expect("csv writer");
                w.write_record(fields.keys())?;
                w.write_record(fields.values().map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                }))?;
                Ok(())
            }
        }
    }

    fn report(&mut self, r: &CriterionReport) -> io::Result<()> {
        eprintln!("{r}");
        let mut fields = Map::new();
        fields.insert("id".into(), json!(r.id));
        fields.insert("suite".into(), json!(r.name));
        fields.insert("passed".into(), json!(r.passed));
        fields.insert("seconds".into(), json!(r.elapsed.as_secs_f64()));
        fields.insert("detail".into(), json!(r.detail));
        match self.format {
            Format::Jsonl => self.json_line(&Value::Object(fields)),
            Format::Csv => {
                let w = self.csv.as_mut().expect("csv writer");
                w.write_record(fields.values().map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                }))?;
                Ok(())
            }
        }
    }

    fn finish(&mut self) -> io::Result<()> {
        if let Some(w) = self.csv.as_mut() {
            w.flush()?;
        }
        io::stdout().flush()
    }
}

enum Failure {
    Math(Error),
    Io(io::Error),
    Suites(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Math(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn estimate_fields(fields: &mut Map<String, Value>, closed: &Cyclo, est: &OracleEstimate) {
    fields.insert("oracle".into(), json!(est.value.to_string()));
    fields.insert("tail".into(), json!(format!("{:.3e}", est.tail_f64())));
    fields.insert("difference".into(), json!((&est.value - closed).to_string()));
    fields.insert("agrees".into(), json!(est.contains(closed)));
}

fn run_local(cmd: &Local, out: &mut Output) -> std::result::Result<(), Failure> {
    let mut f = Map::new();
    match cmd {
        Local::Unramified { p, e, f: fp, l, s, chip, t } => {
            let input = GoodPlaceInput::new(*p, *chip, *l, *e, *fp, *s)?;
            let closed = unramified_local_factor(&input)?;
            f.insert("which".into(), json!("unramified"));
            f.insert("p".into(), json!(p));
            f.insert("e".into(), json!(e));
            f.insert("f".into(), json!(fp));
            f.insert("L".into(), json!(l));
            f.insert("s".into(), json!(s));
            f.insert("chip".into(), json!(chip.to_string()));
            f.insert("value".into(), json!(closed.to_string()));
            if let Some(t) = t {
                let from_t = GoodPlaceInput::from_form(t, *p, *chip, *s)?;
                if (from_t.e_p, from_t.f_p, from_t.l) != (*e, *fp, *l) {
                    return Err(Error::Domain(format!(
                        "T = {t} has e = {}, f = {}, L = {} at p = {p}",
                        from_t.e_p, from_t.f_p, from_t.l
                    ))
                    .into());
                }
                let window = window_for(*p, *s, &rat_pow(*p, -10))?;
                let est = brute_force_local_integral(t, *p, *chip, *s, &window)?;
                f.insert("T".into(), json!(t.to_string()));
                estimate_fields(&mut f, &closed, &est);
            }
        }
        Local::Ramified { place, oracle_lw } => {
            let input = place.input()?;
            let k = k_closed_form(&input)?;
            let kval = k.value.clone().ok_or_else(|| Error::UnsupportedPlace {
                p: place.p,
                reason: "K has no closed form here (needs-oracle)".into(),
            })?;
            let closed = ramified_local_factor(&input, &kval)?;
            ramified_fields(&mut f, "ramified", place);
            f.insert("K".into(), json!(kval.to_string()));
            f.insert("K_provenance".into(), json!(k.provenance.to_string()));
            f.insert("value".into(), json!(closed.to_string()));
            if let Some(lw) = oracle_lw {
                let mut est = ramified_brute_force(&input.t, &input.chi, input.s, *lw)?;
                est.tail += rat_pow(place.p, -40);
                estimate_fields(&mut f, &closed, &est);
            }
        }
        Local::K { place, depth } => {
            let input = place.input()?;
            let k = k_closed_form(&input)?;
            let est = k_oracle(&input, *depth)?;
            ramified_fields(&mut f, "K", place);
            f.insert("K_provenance".into(), json!(k.provenance.to_string()));
            match k.value {
                Some(v) => {
                    f.insert("value".into(), json!(v.to_string()));
                    estimate_fields(&mut f, &v, &est);
                }
                None => {
                    f.insert("value".into(), Value::Null);
                    f.insert("oracle".into(), json!(est.value.to_string()));
                    f.insert("tail".into(), json!(format!("{:.3e}", est.tail_f64())));
                }
            }
        }
        Local::Volume { p, i, j, t, depth } => {
            if t.r != 0 {
                return Err(Error::Domain(format!("the volume table needs r = 0, got T = {t}")).into());
            }
            let closed = volume_r_closed_form(*i, *j, t.n, t.m, *p)?;
            f.insert("which".into(), json!("volume"));
            f.insert("p".into(), json!(p));
            f.insert("i".into(), json!(i));
            f.insert("j".into(), json!(j));
            f.insert("T".into(), json!(t.to_string()));
            f.insert("value".into(), json!(format_rational(&closed)));
            let count = match depth {
                Some(b) => volume_r_flat(*i, *j, t, *p, *b)?,
                None => volume_r(*i, *j, t, *p)?,
            };
            f.insert("oracle".into(), json!(format_rational(&count)));
            f.insert("difference".into(), json!(format_rational(&(&count - &closed))));
            f.insert("agrees".into(), json!(count == closed));
        }
        Local::Ap { p, d } => {
            if !is_prime(*p) || *p == 2 {
                return Err(Error::Domain(format!("{p} is not an odd prime")).into());
            }
            f.insert("which".into(), json!("ap"));
            f.insert("p".into(), json!(p));
            f.insert("D".into(), json!(d));
            f.insert("value".into(), json!(curve_count_ap(*d, *p)));
        }
    }
    out.fields(&f)?;
    Ok(())
}

fn ramified_fields(f: &mut Map<String, Value>, which: &str, place: &RamifiedArgs) {
    f.insert("which".into(), json!(which));
    f.insert("p".into(), json!(place.p));
    f.insert("np".into(), json!(place.np));
    f.insert("chi".into(), json!(place.chi));
    f.insert("chip".into(), json!(place.chip.to_string()));
    f.insert("T".into(), json!(place.t.to_string()));
    f.insert("s".into(), json!(place.s));
}

fn run(cli: &Cli) -> std::result::Result<(), Failure> {
    let precision = Precision::new(cli.precision);
    let mut out = Output::new(cli.format, precision);
    match &cli.command {
        Command::Coeff { spec, n, r, m } => {
            let (spec, opts) = spec.resolve(precision)?;
            let rec = coefficient(&spec, &HalfIntegralForm::new(*n, *r, *m), &opts)?;
            out.coefficient_header()?;
            out.coefficient(&rec)?;
        }
        Command::Expand { spec, bound, keep_zero } => {
            let (spec, opts) = spec.resolve(precision)?;
            let records = expand(&spec, *bound, &opts, *keep_zero)?;
            out.comment(&json!({
                "header": true,
                "k": spec.k,
                "character": spec.eta.label(),
                "bound": bound,
                "precision_bits": precision.bits,
                "oracle": opts.oracle.to_string(),
                "version": env!("CARGO_PKG_VERSION"),
            }))?;
            out.coefficient_header()?;
            for rec in &records {
                out.coefficient(rec)?;
            }
        }
        Command::Local(cmd) => run_local(cmd, &mut out)?,
        Command::Verify { suite } => {
            let ids: Vec<u8> = if suite == "all" {
                (1..=10).collect()
            } else {
                vec![SUITES.iter().position(|s| s == suite).expect("validated by clap") as u8 + 1]
            };
            if ids.contains(&10) {
                eprintln!("seed: {BOOTSTRAP_SEED}");
            }
            if let Some(w) = out.csv.as_mut() {
                w.write_record(["id", "suite", "passed", "seconds", "detail"]).map_err(io::Error::from)?;
            }
            let start = Instant::now();
            let mut failed = 0;
            for id in ids {
                let r = run_criterion(id);
                failed += usize::from(!r.passed);
                out.report(&r)?;
            }
            eprintln!("{failed} failed in {:.2}s", start.elapsed().as_secs_f64());
            out.finish()?;
            if failed > 0 {
                return Err(Failure::Suites(failed));
            }
        }
    }
    out.finish()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("eis: cannot start worker threads: {e}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Math(e)) => {
            eprintln!("eis: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("eis: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Suites(n)) => {
            eprintln!("eis: {n} suite(s) failed");
            ExitCode::from(1)
        }
    }
}

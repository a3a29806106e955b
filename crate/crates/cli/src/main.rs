use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use spectral_tiles::classification::{classify_small, fuglede_zn, match_n4, N4Match};
use spectral_tiles::continuum::{
    indicator, trajectory_rows, write_trajectory_csv, ContinuumGroup, SampledFunction,
    TrajectoryFrame, DEFAULT_RESOLUTION,
};
use spectral_tiles::io::{
    certificate_from_json, certificate_to_json, complex_matrix_to_json, matrix_from_json,
    root_table_to_json, set_from_json, spectrum_from_json, spectrum_strings,
};
use spectral_tiles::local::{
    eigencheck, local_group, local_group_exact, local_translation_matrix, rescale,
    spectrum_from_matrix, verify_local_translation, LocalTranslationMatrix,
};
use spectral_tiles::numeric::{
    format_rational, parse_rational, AnyMatrix, Mode, Rational, DEFAULT_TOL,
};
use spectral_tiles::spectra::{
    find_spectrum, first_nonorthogonal, is_spectrum, search_spectra, IntSet, Spectrum,
};
use spectral_tiles::tiling::{
    period_check, theta_set, tiling_complements, verify_tiling, TilingCertificate,
};

#[derive(Parser, Debug)]
#[command(
    name = "spectral-tiles",
    version,
    about = "Spectral sets, local translations and tilings of the integers"
)]
struct Cli {
    /// Output format; trajectories and translates default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    output: Option<Format>,

    /// Worker threads for the parallel searches.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Tolerance for float comparisons.
    #[arg(long, global = true, env = "SPECTRAL_TILES_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Args, Debug, Clone)]
struct Source {
    /// JSON input: inline text, a file path, or `-` for stdin.
    #[arg(long)]
    input: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct PairArgs {
    /// Integer set, e.g. `0,1,4,5`.
    #[arg(long)]
    set: Option<String>,
    /// Rational frequencies, e.g. `0,1/8,1/2,5/8`; prefix with `raw:` to keep representatives.
    #[arg(long, allow_hyphen_values = true)]
    spectrum: Option<String>,
    #[command(flatten)]
    source: Source,
}

#[derive(Args, Debug, Clone)]
struct FunctionArgs {
    /// Indicator `branch:[lo,hi)` on `branch + [lo, hi)`; repeat to sum several.
    #[arg(long = "indicator", required = true)]
    indicators: Vec<String>,
    /// Samples per unit interval.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check whether the spectrum is a spectrum for the set (exit 0 yes, 1 no).
    Verify {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
    },
    /// Local translation matrix B.
    Ltm {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// U(t) for rational `p/q` (exact) or decimal (float) t.
    Group {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Residues of the obstruction set Θ_B.
    Theta {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Tiling complements modulo the lattice denominator.
    Complements {
        #[command(flatten)]
        pair: PairArgs,
        /// Keep every translate instead of normalizing to contain 0.
        #[arg(long)]
        all_translates: bool,
    },
    /// Check a tiling certificate `{"A", "T", "d"}` (exit 0 yes, 1 no).
    VerifyTiling {
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        tile: Option<String>,
        #[arg(long)]
        modulus: Option<u64>,
        #[command(flatten)]
        source: Source,
    },
    /// Whether B^d = I (exit 0 yes, 1 no); d defaults to the denominator lcm.
    Period {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        d: Option<u64>,
    },
    /// Spectra inside (1/r)Z, or the first spectrum with denominator up to max-r.
    Search {
        #[arg(long)]
        set: Option<String>,
        #[arg(long, conflicts_with = "max_r")]
        r: Option<u64>,
        #[arg(long)]
        max_r: Option<u64>,
        #[command(flatten)]
        source: Source,
    },
    /// Spectrality of a set of size 2, 3 or 5 (exit 0 spectral, 1 not).
    Classify {
        #[arg(long)]
        set: Option<String>,
        #[command(flatten)]
        source: Source,
    },
    /// Size-4 Hadamard pair parametrization (exit 0 match, 1 no match).
    MatchN4 {
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        l: Option<String>,
        #[arg(long)]
        r: Option<i64>,
        #[command(flatten)]
        source: Source,
    },
    /// Tiles versus spectral sets of Z_n (exit 0 when they agree).
    Fuglede {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        max_size: Option<usize>,
    },
    /// U(t) applied to a sampled function.
    Translate {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Frames of U(t)f at evenly spaced t.
    Trajectory {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, allow_hyphen_values = true)]
        t1: f64,
        #[arg(long, default_value_t = 2)]
        steps: usize,
    },
    /// Spectrum recovered from a local translation matrix.
    Recover {
        #[arg(long)]
        set: Option<String>,
        #[command(flatten)]
        source: Source,
    },
    /// Check B^{x-x'} δ_x = δ_x' for a matrix (exit 0 yes, 1 no).
    VerifyLtm {
        #[arg(long)]
        set: Option<String>,
        #[command(flatten)]
        source: Source,
    },
    /// Local translation matrix of (dA, Γ/d).
    Rescale {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        d: i64,
    },
    /// Whether each exponential is an eigenvector of B (exit 0 when all are).
    Eigencheck {
        #[command(flatten)]
        pair: PairArgs,
    },
}

#[derive(Debug)]
struct Failure {
    code: String,
    detail: String,
}

impl Failure {
    fn new(code: &str, detail: impl Into<String>) -> Self {
        Failure {
            code: code.into(),
            detail: detail.into(),
        }
    }
}

impl From<spectral_tiles::Error> for Failure {
    fn from(e: spectral_tiles::Error) -> Self {
        Failure::new(e.code(), e.to_string())
    }
}

type Outcome = Result<(Output, bool), Failure>;

enum Output {
    Json(Value),
    Csv(Vec<u8>),
}

fn read_source(src: &Source) -> Result<Value, Failure> {
    let Some(arg) = &src.input else {
        return Ok(Value::Null);
    };
    let text = if arg == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::new("io", e.to_string()))?;
        s
    } else if arg.trim_start().starts_with(['{', '[']) {
        arg.clone()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::new("io", format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::new("json", e.to_string()))
}

fn field<'a>(v: &'a Value, keys: &[&str]) -> Option<&'a Value> {
    keys.iter().find_map(|k| v.get(*k))
}

fn resolve_set(flag: &Option<String>, input: &Value, keys: &[&str]) -> Result<IntSet, Failure> {
    if let Some(s) = flag {
        return Ok(s.parse()?);
    }
    match field(input, keys) {
        Some(v) => Ok(set_from_json(v)?),
        None => Err(Failure::new("usage", format!("missing --{}", keys[0]))),
    }
}

fn resolve_pair(p: &PairArgs) -> Result<(IntSet, Spectrum, Value), Failure> {
    let input = read_source(&p.source)?;
    let a = resolve_set(&p.set, &input, &["set", "A"])?;
    let g = match &p.spectrum {
        Some(s) => s.parse()?,
        None if input.get("spectrum").is_some() => spectrum_from_json(&input)?,
        None => return Err(Failure::new("usage", "missing --spectrum")),
    };
    Ok((a, g, input))
}

fn pair_json(a: &IntSet, g: &Spectrum) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("set".into(), json!(a.elements()));
    m.insert("spectrum".into(), json!(spectrum_strings(g)));
    if !g.is_canonical() {
        m.insert("raw".into(), json!(true));
    }
    m
}

fn with(mut m: serde_json::Map<String, Value>, extra: Value) -> Value {
    if let Value::Object(e) = extra {
        m.extend(e);
    }
    Value::Object(m)
}

fn ltm_json(b: &LocalTranslationMatrix) -> Value {
    let matrix = match b.table() {
        Some(t) => root_table_to_json(t),
        None => complex_matrix_to_json(&b.matrix().to_complex()),
    };
    match b.gamma() {
        Some(g) => with(pair_json(b.set(), g), json!({ "matrix": matrix })),
        None => json!({ "set": b.set().elements(), "matrix": matrix }),
    }
}

fn resolve_matrix(set: &Option<String>, source: &Source) -> Result<(IntSet, AnyMatrix), Failure> {
    let input = read_source(source)?;
    let a = resolve_set(set, &input, &["set", "A"])?;
    let m = match input.get("matrix") {
        Some(m) => matrix_from_json(m)?,
        None if input.get("entries").is_some() => matrix_from_json(&input)?,
        None => return Err(Failure::new("usage", "the input carries no matrix")),
    };
    Ok((a, m))
}

fn parse_indicator(s: &str) -> Result<(i64, Rational, Rational), Failure> {
    let bad = || {
        Failure::new(
            "invalid_argument",
            format!("cannot parse indicator {s:?}; expected branch:[lo,hi)"),
        )
    };
    let (branch, interval) = s.split_once(':').ok_or_else(bad)?;
    let branch: i64 = branch.trim().parse().map_err(|_| bad())?;
    let body = interval
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(bad)?;
    let (lo, hi) = body.split_once(',').ok_or_else(bad)?;
    Ok((
        branch,
        parse_rational(lo).map_err(|_| bad())?,
        parse_rational(hi).map_err(|_| bad())?,
    ))
}

fn build_function(a: &IntSet, f: &FunctionArgs) -> Result<SampledFunction, Failure> {
    let mut values = vec![vec![Complex64::new(0.0, 0.0); f.resolution]; a.len()];
    for piece_arg in &f.indicators {
        let (branch, lo, hi) = parse_indicator(piece_arg)?;
        let piece = indicator(a, f.resolution, branch, lo, hi)?;
        for (acc, row) in values.iter_mut().zip(piece.values()) {
            for (x, y) in acc.iter_mut().zip(row) {
                *x += y;
            }
        }
    }
    Ok(SampledFunction::new(a.clone(), f.resolution, values)?)
}

fn frames_output(frames: &[TrajectoryFrame], format: Format) -> Result<Output, Failure> {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_trajectory_csv(frames, &mut buf)?;
            Ok(Output::Csv(buf))
        }
        Format::Json => Ok(Output::Json(json!(trajectory_rows(frames)))),
    }
}

fn json_only(format: Option<Format>) -> Result<(), Failure> {
    if format == Some(Format::Csv) {
        return Err(Failure::new(
            "usage",
            "csv output is only available for translate and trajectory",
        ));
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| Failure::new("internal", e.to_string()))?;
    }
    let tol = cli.tol;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure::new(
            "invalid_argument",
            format!("tolerance {tol} must be positive"),
        ));
    }
    match &cli.command {
        Command::Translate { .. } | Command::Trajectory { .. } => {}
        _ => json_only(cli.output)?,
    }
    match cli.command {
        Command::Verify { pair, mode } => {
            let (a, g, _) = resolve_pair(&pair)?;
            if a.len() != g.len() {
                return Err(spectral_tiles::Error::SizeMismatch {
                    set: a.len(),
                    spectrum: g.len(),
                }
                .into());
            }
            let (spectral, mode_name) = match mode {
                ModeArg::Exact => (is_spectrum(&a, &g, Mode::Exact), "exact"),
                ModeArg::Float => (is_spectrum(&a, &g, Mode::Float { tol }), "float"),
            };
            let witness = first_nonorthogonal(&a, g.elements())
                .map(|(x, y)| json!([format_rational(&x), format_rational(&y)]));
            let out = with(
                pair_json(&a, &g),
                json!({ "mode": mode_name, "spectral": spectral, "nonorthogonal": witness }),
            );
            Ok((Output::Json(out), spectral))
        }
        Command::Ltm { pair } => {
            let (a, g, _) = resolve_pair(&pair)?;
            let b = local_translation_matrix(&a, &g)?;
            Ok((Output::Json(ltm_json(&b)), true))
        }
        Command::Group { pair, t } => {
            let (a, g, _) = resolve_pair(&pair)?;
            let matrix = match parse_rational(&t) {
                Ok(q) => root_table_to_json(&local_group_exact(&a, &g, &q)?),
                Err(_) => {
                    let x: f64 = t.trim().parse().map_err(|_| {
                        Failure::new("invalid_argument", format!("cannot parse t = {t:?}"))
                    })?;
                    complex_matrix_to_json(&local_group(&a, &g, x)?)
                }
            };
            Ok((
                Output::Json(with(pair_json(&a, &g), json!({ "t": t, "matrix": matrix }))),
                true,
            ))
        }
        Command::Theta { pair } => {
            let (a, g, _) = resolve_pair(&pair)?;
            let theta = theta_set(&a, &g)?;
            let out = with(
                pair_json(&a, &g),
                json!({
                    "modulus": theta.modulus,
                    "residues": theta.residues,
                    "everything": theta.is_everything(),
                }),
            );
            Ok((Output::Json(out), true))
        }
        Command::Complements {
            pair,
            all_translates,
        } => {
            let (a, g, _) = resolve_pair(&pair)?;
            let found = tiling_complements(&a, &g, all_translates)?;
            let d = spectral_tiles::tiling::lattice_of_spectrum(&g)?.d as u64;
            let certs: Vec<Value> = found
                .into_iter()
                .map(|t| certificate_to_json(&TilingCertificate { a: a.clone(), t, d }))
                .collect();
            let any = !certs.is_empty();
            let out = with(pair_json(&a, &g), json!({ "d": d, "complements": certs }));
            Ok((Output::Json(out), any))
        }
        Command::VerifyTiling {
            set,
            tile,
            modulus,
            source,
        } => {
            let input = read_source(&source)?;
            let cert = match (set, tile, modulus) {
                (Some(a), Some(t), Some(d)) => {
                    if d == 0 {
                        return Err(Failure::new("invalid_argument", "modulus must be positive"));
                    }
                    TilingCertificate {
                        a: a.parse()?,
                        t: t.parse()?,
                        d,
                    }
                }
                (None, None, None) if !input.is_null() => certificate_from_json(&input)?,
                _ => {
                    return Err(Failure::new(
                        "usage",
                        "give --set, --tile and --modulus, or --input",
                    ))
                }
            };
            let ok = verify_tiling(&cert);
            Ok((Output::Json(certificate_to_json(&cert)), ok))
        }
        Command::Period { pair, d } => {
            let (a, g, _) = resolve_pair(&pair)?;
            let d = d.unwrap_or(g.denominator_lcm() as u64);
            let identity = period_check(&a, &g, d)?;
            Ok((
                Output::Json(with(
                    pair_json(&a, &g),
                    json!({ "d": d, "identity": identity }),
                )),
                identity,
            ))
        }
        Command::Search {
            set,
            r,
            max_r,
            source,
        } => {
            let input = read_source(&source)?;
            let a = resolve_set(&set, &input, &["set", "A"])?;
            match (r, max_r) {
                (Some(r), _) => {
                    if r == 0 {
                        return Err(Failure::new("invalid_argument", "r must be positive"));
                    }
                    let found = search_spectra(&a, r);
                    let any = !found.is_empty();
                    let spectra: Vec<Vec<String>> = found.iter().map(spectrum_strings).collect();
                    Ok((
                        Output::Json(json!({ "set": a.elements(), "r": r, "spectra": spectra })),
                        any,
                    ))
                }
                (None, Some(max_r)) => match find_spectrum(&a, max_r) {
                    Some((r, g)) => Ok((
                        Output::Json(with(pair_json(&a, &g), json!({ "r": r }))),
                        true,
                    )),
                    None => Ok((
                        Output::Json(
                            json!({ "set": a.elements(), "max_r": max_r, "spectrum": null }),
                        ),
                        false,
                    )),
                },
                (None, None) => Err(Failure::new("usage", "give --r or --max-r")),
            }
        }
        Command::Classify { set, source } => {
            let input = read_source(&source)?;
            let a = resolve_set(&set, &input, &["set", "A"])?;
            let v = classify_small(&a)?;
            let out = json!({
                "set": a.elements(),
                "spectral": v.spectral,
                "k": v.k,
                "reduced": v.reduced.elements(),
                "witness": v.witness.as_ref().map(spectrum_strings),
                "sweep_bound": v.sweep_bound,
                "note": if v.spectral {
                    "witness verified exactly".to_string()
                } else {
                    format!("no spectrum with denominator <= {}", v.sweep_bound)
                },
            });
            Ok((Output::Json(out), v.spectral))
        }
        Command::MatchN4 { set, l, r, source } => {
            let input = read_source(&source)?;
            let a = resolve_set(&set, &input, &["set", "A"])?;
            let l = resolve_set(&l, &input, &["l", "L"])?;
            let r = match r.or_else(|| field(&input, &["r", "R"]).and_then(Value::as_i64)) {
                Some(r) => r,
                None => return Err(Failure::new("usage", "missing --r")),
            };
            let verdict = match_n4(&a, &l, r)?;
            let direct = spectral_tiles::classification::is_hadamard_pair(&a, &l, r);
            let mut out = serde_json::to_value(verdict)
                .map_err(|e| Failure::new("internal", e.to_string()))?;
            if let Value::Object(m) = &mut out {
                m.insert("A".into(), json!(a.elements()));
                m.insert("L".into(), json!(l.elements()));
                m.insert("R".into(), json!(r));
                m.insert("direct".into(), json!(direct));
            }
            Ok((Output::Json(out), matches!(verdict, N4Match::Match(_))))
        }
        Command::Fuglede { n, max_size } => {
            let report = fuglede_zn(n, max_size.unwrap_or(n as usize))?;
            let agree = report.discrepancies.is_empty();
            let out = serde_json::to_value(&report)
                .map_err(|e| Failure::new("internal", e.to_string()))?;
            Ok((Output::Json(out), agree))
        }
        Command::Translate { pair, function, t } => {
            let (a, g, _) = resolve_pair(&pair)?;
            let f = build_function(&a, &function)?;
            let samples = ContinuumGroup::new(&a, &g)?.translate(&f, t)?;
            let frame = TrajectoryFrame {
                t,
                norm_sq: samples.norm_sq(),
                samples,
            };
            Ok((
                frames_output(&[frame], cli.output.unwrap_or(Format::Csv))?,
                true,
            ))
        }
        Command::Trajectory {
            pair,
            function,
            t0,
            t1,
            steps,
        } => {
            let (a, g, _) = resolve_pair(&pair)?;
            let f = build_function(&a, &function)?;
            let frames = ContinuumGroup::new(&a, &g)?.trajectory(&f, t0, t1, steps)?;
            Ok((
                frames_output(&frames, cli.output.unwrap_or(Format::Csv))?,
                true,
            ))
        }
        Command::Recover { set, source } => {
            let (a, m) = resolve_matrix(&set, &source)?;
            let g = spectrum_from_matrix(&m, &a)?;
            Ok((Output::Json(Value::Object(pair_json(&a, &g))), true))
        }
        Command::VerifyLtm { set, source } => {
            let (a, m) = resolve_matrix(&set, &source)?;
            let b = LocalTranslationMatrix::from_matrix(a.clone(), m, tol)?;
            let check = verify_local_translation(&b);
            let out = json!({
                "set": a.elements(),
                "holds": check.holds,
                "witness": check.witness.map(|(x, y)| json!([x, y])),
            });
            Ok((Output::Json(out), check.holds))
        }
        Command::Rescale { pair, d } => {
            let (a, g, _) = resolve_pair(&pair)?;
            let b = rescale(&local_translation_matrix(&a, &g)?, d)?;
            Ok((Output::Json(ltm_json(&b)), true))
        }
        Command::Eigencheck { pair } => {
            let (a, g, _) = resolve_pair(&pair)?;
            let b = local_translation_matrix(&a, &g)?;
            let checks = eigencheck(&b)?;
            let all = checks.iter().all(|(_, ok)| *ok);
            let rows: Vec<Value> = checks
                .iter()
                .map(|(l, ok)| json!({ "lambda": format_rational(l), "eigenvector": ok }))
                .collect();
            Ok((
                Output::Json(with(pair_json(&a, &g), json!({ "eigenvectors": rows }))),
                all,
            ))
        }
    }
}

fn emit(out: &Output) -> io::Result<()> {
    let mut stdout = io::stdout().lock();
    match out {
        Output::Json(v) => {
            serde_json::to_writer_pretty(&mut stdout, v)?;
            writeln!(stdout)?;
        }
        Output::Csv(bytes) => stdout.write_all(bytes)?,
    }
    stdout.flush()
}

fn fail(f: &Failure) -> ExitCode {
    let v = json!({ "error": f.code, "detail": f.detail });
    println!("{}", serde_json::to_string_pretty(&v).expect("plain json"));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return fail(&Failure::new("usage", e.to_string().trim()));
        }
    };
    match run(cli) {
        Ok((out, verdict)) => {
            if let Err(e) = emit(&out) {
                if e.kind() == io::ErrorKind::BrokenPipe {
                    return ExitCode::SUCCESS;
                }
                return fail(&Failure::new("io", e.to_string()));
            }
            if verdict {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => fail(&f),
    }
}

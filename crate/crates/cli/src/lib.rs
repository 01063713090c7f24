//! Command-line front end: argument parsing, text and JSON rendering, and
//! exit-code mapping for every library pipeline.
//!
//! JSON output is a stable envelope (command, version, inputs, result,
//! warnings) in which every number is a decimal string, so consumers never
//! face 64-bit overflow.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use sha_predict::arith::quad::ExactReal;
use sha_predict::latmac::{ideal_class_matrices, similar_over_z, IntMatrix, MonicIntPolynomial};
use sha_predict::lmfdb::{compare_report, CachePolicy, Client, ClientConfig, PredictedSha};
use sha_predict::minkowski::{question_mark_exact, scale_embedding};
use sha_predict::orders::{class_number_order, QuadOrder, DEFAULT_CONDUCTOR_BOUND};
use sha_predict::qforms::{class_group_definite, class_numbers_indefinite, AbelianGroupStructure};
use sha_predict::sha::{
    companion_fr, companion_l, satisfies_hasse_bound, sha_cm_curve_bounded, sha_from_class_group,
    ShaPrediction,
};
use sha_predict::{Error, Result};

#[derive(Parser)]
#[command(
    name = "sha-predict",
    version,
    about = "Class groups of quadratic orders, exact question-mark arithmetic, and predicted Sha orders for CM curves"
)]
struct Cli {
    /// Emit a JSON envelope instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Print only the primary result line; suppress detail and warnings.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Class group of a negative discriminant, or narrow/wide class numbers
    /// of a positive one.
    Classgroup {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
    },
    /// Class number of the quadratic order with given fundamental
    /// discriminant and conductor.
    OrderH {
        #[arg(long, allow_hyphen_values = true)]
        dk: i64,
        #[arg(long)]
        f: i64,
    },
    /// Ideal class matrices of a monic quadratic polynomial, with a pairwise
    /// similarity summary.
    Latmac {
        #[arg(long)]
        poly: String,
    },
    /// Exact question-mark image of a rational or quadratic irrational.
    Minkowski {
        #[arg(long)]
        value: String,
    },
    /// Lattice points m + n*theta in [0, 1] with their question-mark images.
    Scale {
        #[arg(long)]
        theta: String,
        #[arg(long)]
        bound: i64,
    },
    /// Full CM pipeline: class group, twin real conductor, predicted Sha.
    ShaCm {
        #[arg(long = "D")]
        d: i64,
        #[arg(long)]
        f: i64,
        /// Search bound for the real-side conductor.
        #[arg(long, default_value_t = DEFAULT_CONDUCTOR_BOUND)]
        bound: i64,
    },
    /// Predicted Sha from an abelian group given by its divisor chain.
    ShaFromCl {
        #[arg(long, value_delimiter = ',')]
        divisors: Vec<u64>,
    },
    /// Companion matrix of either shape, with its characteristic polynomial.
    Companion {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Vec<i64>,
        #[arg(long)]
        p: i64,
        /// Matrix shape: L (unsigned) or Fr (signed Frobenius).
        #[arg(long)]
        kind: String,
    },
    /// Compare predicted Sha orders against cached analytic data.
    LmfdbCompare {
        #[arg(long = "D-list", value_delimiter = ',')]
        d_list: Vec<i64>,
        /// Serve only the local cache; never touch the network.
        #[arg(long)]
        offline: bool,
        /// Cache directory override (otherwise configuration/environment).
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
}

/// One command's payload before rendering.
struct Output {
    command: &'static str,
    inputs: Value,
    result: Value,
    warnings: Vec<String>,
    primary: String,
    detail: Vec<String>,
}

/// Runs the CLI against argv, writing to the given streams; returns the
/// process exit code: 0 success, 2 input error, 3 search or bound
/// exhaustion, 4 network or fetch error.
pub fn run(argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                return 2;
            }
            let _ = write!(stdout, "{rendered}");
            return 0;
        }
    };
    match dispatch(&cli.command) {
        Ok(out) => {
            if cli.json {
                let envelope = json!({
                    "command": out.command,
                    "version": env!("CARGO_PKG_VERSION"),
                    "inputs": out.inputs,
                    "result": out.result,
                    "warnings": out.warnings,
                });
                let text = serde_json::to_string_pretty(&envelope).expect("envelope serializes");
                let _ = writeln!(stdout, "{text}");
            } else {
                let _ = writeln!(stdout, "{}", out.primary);
                if !cli.quiet {
                    for line in &out.detail {
                        let _ = writeln!(stdout, "{line}");
                    }
                    for w in &out.warnings {
                        let _ = writeln!(stderr, "warning: {w}");
                    }
                }
            }
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SearchExhausted { .. } | Error::BoundExceeded { .. } => 3,
        Error::Network(_)
        | Error::HttpStatus { .. }
        | Error::MalformedResponse { .. }
        | Error::FetchUnavailable { .. } => 4,
        _ => 2,
    }
}

fn s(v: impl ToString) -> Value {
    Value::String(v.to_string())
}

fn group_json(g: &AbelianGroupStructure) -> Value {
    let divisors: Vec<Value> = g.elementary_divisors().iter().map(s).collect();
    json!({ "elementary_divisors": divisors, "order": s(g.order()) })
}

fn order_json(o: &QuadOrder) -> Value {
    json!({
        "fundamental_discriminant": s(o.fundamental_discriminant()),
        "conductor": s(o.conductor()),
        "discriminant": s(o.discriminant()),
    })
}

fn sha_json(p: &ShaPrediction) -> Value {
    json!({
        "input_class_group": group_json(&p.input_class_group),
        "k": s(p.k),
        "parity": s(p.parity),
        "result": group_json(&p.result),
        "order": s(p.order),
    })
}

fn matrix_json(m: &IntMatrix) -> Value {
    let rows: Vec<Value> = m
        .rows()
        .iter()
        .map(|r| Value::Array(r.iter().map(s).collect()))
        .collect();
    Value::Array(rows)
}

fn matrix_text(m: &IntMatrix) -> String {
    let rows: Vec<String> = m
        .rows()
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|e| e.to_string()).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Renders descending coefficients of a monic polynomial, e.g.
/// ["1", "-1", "2"] into "x^2 - x + 2".
fn poly_text(coeffs: &[String]) -> String {
    let degree = coeffs.len() - 1;
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        let power = degree - i;
        let (negative, abs) = match c.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, c.as_str()),
        };
        if abs == "0" {
            continue;
        }
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let show_coeff = abs != "1" || power == 0;
        if show_coeff {
            out.push_str(abs);
        }
        match power {
            0 => {}
            1 => out.push('x'),
            _ => {
                out.push_str("x^");
                out.push_str(&power.to_string());
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn parse_monic_quadratic(input: &str) -> Result<(i64, i64)> {
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = |msg: &str| Error::invalid_input(format!("cannot parse `{input}`: {msg}"));
    let rest = compact
        .strip_prefix("x^2")
        .ok_or_else(|| bad("expected a monic quadratic starting with x^2"))?;
    let (mut c1, mut c0) = (0i64, 0i64);
    let mut chars = rest.chars().peekable();
    while let Some(sign_ch) = chars.next() {
        let sign: i64 = match sign_ch {
            '+' => 1,
            '-' => -1,
            _ => return Err(bad("terms must be joined by + or -")),
        };
        let mut digits = String::new();
        while let Some(&c) = chars.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                chars.next();
            } else {
                break;
            }
        }
        if matches!(chars.peek(), Some('x')) {
            chars.next();
            let coeff: i64 = if digits.is_empty() {
                1
            } else {
                digits.parse().map_err(|_| bad("linear coefficient overflows"))?
            };
            c1 += sign * coeff;
        } else if digits.is_empty() {
            return Err(bad("expected digits after the sign"));
        } else {
            let coeff: i64 = digits.parse().map_err(|_| bad("constant term overflows"))?;
            c0 += sign * coeff;
        }
    }
    Ok((c1, c0))
}

fn dispatch(command: &Command) -> Result<Output> {
    match command {
        Command::Classgroup { disc } => cmd_classgroup(*disc),
        Command::OrderH { dk, f } => cmd_order_h(*dk, *f),
        Command::Latmac { poly } => cmd_latmac(poly),
        Command::Minkowski { value } => cmd_minkowski(value),
        Command::Scale { theta, bound } => cmd_scale(theta, *bound),
        Command::ShaCm { d, f, bound } => cmd_sha_cm(*d, *f, *bound),
        Command::ShaFromCl { divisors } => cmd_sha_from_cl(divisors),
        Command::Companion { coeffs, p, kind } => cmd_companion(coeffs, *p, kind),
        Command::LmfdbCompare {
            d_list,
            offline,
            cache_dir,
        } => cmd_lmfdb_compare(d_list, *offline, cache_dir.as_deref()),
    }
}

fn cmd_classgroup(disc: i64) -> Result<Output> {
    let inputs = json!({ "disc": s(disc) });
    if disc < 0 {
        let g = class_group_definite(disc)?;
        Ok(Output {
            command: "classgroup",
            inputs,
            result: json!({ "kind": "definite", "class_group": group_json(&g) }),
            warnings: vec![],
            primary: format!("class group of discriminant {disc}: {g} (order {})", g.order()),
            detail: vec![],
        })
    } else {
        let (narrow, wide) = class_numbers_indefinite(disc)?;
        Ok(Output {
            command: "classgroup",
            inputs,
            result: json!({
                "kind": "indefinite",
                "h_narrow": s(narrow),
                "h_wide": s(wide),
            }),
            warnings: vec![],
            primary: format!("discriminant {disc}: h_narrow = {narrow}, h_wide = {wide}"),
            detail: vec![],
        })
    }
}

fn cmd_order_h(dk: i64, f: i64) -> Result<Output> {
    let o = QuadOrder::new(dk, f)?;
    let h = class_number_order(&o)?;
    Ok(Output {
        command: "order-h",
        inputs: json!({ "dk": s(dk), "f": s(f) }),
        result: json!({ "order": order_json(&o), "class_number": s(h) }),
        warnings: vec![],
        primary: format!(
            "h = {h} for the order of discriminant {} (d_K = {dk}, f = {f})",
            o.discriminant()
        ),
        detail: vec![],
    })
}

const SIMILARITY_CHECK_BOUND: i64 = 8;
const SIMILARITY_CHECK_MAX_CLASSES: usize = 8;

fn cmd_latmac(poly: &str) -> Result<Output> {
    let (c1, c0) = parse_monic_quadratic(poly)?;
    let p = MonicIntPolynomial::new(c1, c0)?;
    let matrices = ideal_class_matrices(&p)?;
    let mut warnings = vec![];
    let mut cross_checked = false;
    if matrices.len() <= SIMILARITY_CHECK_MAX_CLASSES {
        cross_checked = true;
        for i in 0..matrices.len() {
            for j in i + 1..matrices.len() {
                if similar_over_z(&matrices[i], &matrices[j], SIMILARITY_CHECK_BOUND)?.is_some() {
                    return Err(Error::Inconsistency(format!(
                        "representatives {i} and {j} are similar over Z"
                    )));
                }
            }
        }
    } else {
        warnings.push(format!(
            "pairwise similarity cross-check skipped for {} classes",
            matrices.len()
        ));
    }
    let coeffs: Vec<String> = [1, c1, c0].iter().map(|c| c.to_string()).collect();
    let mut detail: Vec<String> = matrices
        .iter()
        .map(|m| format!("  {}", matrix_text(m)))
        .collect();
    if cross_checked {
        detail.push(format!(
            "pairwise non-similarity verified with conjugator entries up to {SIMILARITY_CHECK_BOUND}"
        ));
    }
    Ok(Output {
        command: "latmac",
        inputs: json!({ "poly": poly }),
        result: json!({
            "char_poly": poly_text(&coeffs),
            "discriminant": s(p.discriminant()),
            "class_count": s(matrices.len()),
            "matrices": matrices.iter().map(matrix_json).collect::<Vec<_>>(),
            "pairwise_similarity_checked": cross_checked,
        }),
        warnings,
        primary: format!(
            "{} ideal class matrices for {} (discriminant {})",
            matrices.len(),
            poly_text(&coeffs),
            p.discriminant()
        ),
        detail,
    })
}

fn cmd_minkowski(value: &str) -> Result<Output> {
    let x = ExactReal::parse_literal(value)?;
    let image = question_mark_exact(&x)?;
    Ok(Output {
        command: "minkowski",
        inputs: json!({ "value": value }),
        result: json!({
            "input": s(&x),
            "image": s(&image),
            "dyadic": image.is_dyadic(),
        }),
        warnings: vec![],
        primary: format!("?({x}) = {image}"),
        detail: vec![format!("dyadic: {}", image.is_dyadic())],
    })
}

fn cmd_scale(theta_literal: &str, bound: i64) -> Result<Output> {
    let theta = match ExactReal::parse_literal(theta_literal)? {
        ExactReal::Quadratic(q) => q,
        ExactReal::Rational(_) => {
            return Err(Error::invalid_input(
                "theta must be a quadratic irrational, not a rational",
            ))
        }
    };
    let rows = scale_embedding(&theta, bound)?;
    let points: Vec<Value> = rows
        .iter()
        .map(|((m, n), image)| {
            json!({ "m": s(m), "n": s(n), "image": s(image) })
        })
        .collect();
    let detail: Vec<String> = rows
        .iter()
        .map(|((m, n), image)| format!("  (m, n) = ({m}, {n}) -> {image}"))
        .collect();
    Ok(Output {
        command: "scale",
        inputs: json!({ "theta": theta_literal, "bound": s(bound) }),
        result: json!({ "theta": s(&theta), "points": points }),
        warnings: vec![],
        primary: format!(
            "{} lattice points in [0, 1] for theta = {theta}, bound {bound}",
            rows.len()
        ),
        detail,
    })
}

fn cmd_sha_cm(d: i64, f: i64, bound: i64) -> Result<Output> {
    let r = sha_cm_curve_bounded(d, f, bound)?;
    let mut warnings = vec![];
    if r.sha.k % 2 == 1 {
        warnings.push(format!(
            "class number {} has odd 2-adic valuation {}; the doubled assembly is reported",
            r.class_group.order(),
            r.sha.k
        ));
    }
    Ok(Output {
        command: "sha-cm",
        inputs: json!({ "D": s(d), "f": s(f), "bound": s(bound) }),
        result: json!({
            "imaginary_order": order_json(&r.imaginary_order),
            "class_group": group_json(&r.class_group),
            "twin_conductor": s(r.twin_conductor),
            "real_order": order_json(&r.real_order),
            "sha": sha_json(&r.sha),
        }),
        warnings,
        primary: format!(
            "predicted Sha: {} (order {})",
            r.sha.result, r.sha.order
        ),
        detail: vec![
            format!(
                "imaginary order: discriminant {} (d_K = {}, f = {})",
                r.imaginary_order.discriminant(),
                r.imaginary_order.fundamental_discriminant(),
                r.imaginary_order.conductor()
            ),
            format!(
                "class group: {} (order {})",
                r.class_group,
                r.class_group.order()
            ),
            format!("twin real conductor: f' = {}", r.twin_conductor),
            format!(
                "real order: discriminant {} (d_K = {}, f = {})",
                r.real_order.discriminant(),
                r.real_order.fundamental_discriminant(),
                r.real_order.conductor()
            ),
            format!("2-adic valuation k = {}; assembly branch: {}", r.sha.k, r.sha.parity),
        ],
    })
}

fn cmd_sha_from_cl(divisors: &[u64]) -> Result<Output> {
    let chain: Vec<u64> = divisors.iter().copied().filter(|&d| d != 1).collect();
    let g = AbelianGroupStructure::new(chain)?;
    let p = sha_from_class_group(&g)?;
    Ok(Output {
        command: "sha-from-cl",
        inputs: json!({
            "divisors": divisors.iter().map(s).collect::<Vec<_>>(),
        }),
        result: sha_json(&p),
        warnings: vec![],
        primary: format!("predicted Sha: {} (order {})", p.result, p.order),
        detail: vec![
            format!("input class group: {} (order {})", g, g.order()),
            format!("k = {} ({})", p.k, p.parity),
        ],
    })
}

fn cmd_companion(coeffs: &[i64], p: i64, kind: &str) -> Result<Output> {
    let (matrix, hasse) = match kind {
        "L" => (companion_l(coeffs, p)?, None),
        "Fr" => (
            companion_fr(coeffs, p)?,
            Some(satisfies_hasse_bound(coeffs, p)?),
        ),
        other => {
            return Err(Error::invalid_input(format!(
                "kind must be L or Fr, got `{other}`"
            )))
        }
    };
    let char_coeffs: Vec<String> = matrix.char_poly().iter().map(|c| c.to_string()).collect();
    let rendered_poly = poly_text(&char_coeffs);
    let mut warnings = vec![];
    if hasse == Some(false) {
        warnings.push(format!(
            "leading coefficient {} violates the Hasse bound for p = {p}",
            coeffs[0]
        ));
    }
    let mut result = json!({
        "kind": kind,
        "matrix": matrix_json(&matrix),
        "char_poly": rendered_poly,
        "char_poly_coefficients": char_coeffs.iter().map(s).collect::<Vec<_>>(),
        "determinant": s(matrix.det()),
    });
    if let Some(h) = hasse {
        result["hasse_bound_satisfied"] = Value::Bool(h);
    }
    Ok(Output {
        command: "companion",
        inputs: json!({
            "coeffs": coeffs.iter().map(s).collect::<Vec<_>>(),
            "p": s(p),
            "kind": kind,
        }),
        result,
        warnings,
        primary: format!("char poly: {rendered_poly}"),
        detail: vec![
            format!("matrix: {}", matrix_text(&matrix)),
            format!("determinant: {}", matrix.det()),
        ],
    })
}

fn cmd_lmfdb_compare(d_list: &[i64], offline: bool, cache_dir: Option<&std::path::Path>) -> Result<Output> {
    if d_list.is_empty() {
        return Err(Error::invalid_input("--D-list must name at least one D"));
    }
    let mut config = ClientConfig::load(None)?;
    if let Some(dir) = cache_dir {
        config.cache_dir = dir.to_path_buf();
    }
    let client = if offline {
        Client::offline(config)
    } else {
        Client::with_http(config)?
    };
    let mut predictions = Vec::new();
    let mut records = Vec::new();
    for &d in d_list {
        let p = PredictedSha::for_cm_input(d, 1)?;
        records.extend(client.fetch_cm_curves(p.cm_discriminant, CachePolicy::PreferCache)?);
        predictions.push(p);
    }
    let report = compare_report(&predictions, &records);
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "label": r.label.as_deref().map(Value::from).unwrap_or(Value::Null),
                "D": s(r.d),
                "f": s(r.f),
                "predicted_order": s(r.predicted_order),
                "analytic_order": r.analytic_order.map(s).unwrap_or(Value::Null),
                "match": s(r.outcome),
            })
        })
        .collect();
    let detail: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            format!(
                "  {:<10} D = {:<4} f = {:<3} predicted {:<6} analytic {:<8} {}",
                r.label.as_deref().unwrap_or("(none)"),
                r.d,
                r.f,
                r.predicted_order,
                r.analytic_order
                    .map(|a| a.to_string())
                    .unwrap_or_else(|| "-".into()),
                r.outcome
            )
        })
        .collect();
    Ok(Output {
        command: "lmfdb-compare",
        inputs: json!({
            "D-list": d_list.iter().map(s).collect::<Vec<_>>(),
            "offline": offline,
        }),
        result: json!({
            "rows": rows,
            "matched": s(report.matched),
            "mismatched": s(report.mismatched),
            "unknown": s(report.unknown),
        }),
        warnings: vec![],
        primary: format!(
            "matched {}, mismatched {}, unknown {} ({} rows)",
            report.matched,
            report.mismatched,
            report.unknown,
            report.rows.len()
        ),
        detail,
    })
}

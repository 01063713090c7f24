//! Client for the LMFDB elliptic-curve API with a local response cache, and
//! informational comparison of predicted against analytic Sha orders.
//!
//! The transport is injected so tests and offline runs never touch the
//! network; every successful response is cached as one JSON document per
//! canonical query, and comparisons are pure functions over fetched records.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orders::{order_from_cm_input, QuadFieldSign};
use crate::qforms::class_group_definite;
use crate::sha::CMCurveReport;

/// One curve row from the database.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub label: String,
    /// Discriminant of the CM order; always negative.
    pub cm_discriminant: i64,
    /// Analytic Sha order as recorded upstream, when present.
    pub analytic_sha: Option<u64>,
    pub source_url: String,
    pub fetched_at: String,
}

/// Predicted Sha order attached to the CM input it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictedSha {
    pub d: i64,
    pub f: i64,
    pub cm_discriminant: i64,
    pub predicted_order: u128,
}

impl PredictedSha {
    /// Prediction from the imaginary side alone: |Cl(R)| squared. This needs
    /// no real-side conductor search, so it succeeds for every valid input.
    pub fn for_cm_input(d: i64, f: i64) -> Result<Self> {
        let r = order_from_cm_input(d, f, QuadFieldSign::Imaginary)?;
        let h = class_group_definite(r.discriminant())?.order();
        Ok(PredictedSha {
            d,
            f,
            cm_discriminant: r.discriminant(),
            predicted_order: h * h,
        })
    }

    pub fn from_report(r: &CMCurveReport) -> Self {
        PredictedSha {
            d: r.d,
            f: r.f,
            cm_discriminant: r.imaginary_order.discriminant(),
            predicted_order: r.sha.order,
        }
    }
}

/// Agreement status of one comparison row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchStatus {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for MatchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchStatus::Yes => write!(f, "yes"),
            MatchStatus::No => write!(f, "no"),
            MatchStatus::Unknown => write!(f, "unknown"),
        }
    }
}

/// One line of the predicted-versus-analytic report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonRow {
    /// Curve label, absent when no record joined the prediction.
    pub label: Option<String>,
    pub d: i64,
    pub f: i64,
    pub predicted_order: u128,
    pub analytic_order: Option<u64>,
    #[serde(rename = "match")]
    pub outcome: MatchStatus,
}

/// Comparison rows with their summary counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub matched: usize,
    pub mismatched: usize,
    pub unknown: usize,
}

/// Joins predictions to records on the CM discriminant. Every prediction
/// yields at least one row; missing analytic data yields `unknown`, and
/// disagreement is reported, never suppressed. Rows sort by |D|, then f,
/// then label.
pub fn compare_report(predictions: &[PredictedSha], records: &[CurveRecord]) -> ComparisonReport {
    let mut rows = Vec::new();
    for p in predictions {
        let joined: Vec<&CurveRecord> = records
            .iter()
            .filter(|r| r.cm_discriminant == p.cm_discriminant)
            .collect();
        if joined.is_empty() {
            rows.push(ComparisonRow {
                label: None,
                d: p.d,
                f: p.f,
                predicted_order: p.predicted_order,
                analytic_order: None,
                outcome: MatchStatus::Unknown,
            });
            continue;
        }
        for r in joined {
            let outcome = match r.analytic_sha {
                None => MatchStatus::Unknown,
                Some(a) => {
                    if u128::from(a) == p.predicted_order {
                        MatchStatus::Yes
                    } else {
                        MatchStatus::No
                    }
                }
            };
            rows.push(ComparisonRow {
                label: Some(r.label.clone()),
                d: p.d,
                f: p.f,
                predicted_order: p.predicted_order,
                analytic_order: r.analytic_sha,
                outcome,
            });
        }
    }
    rows.sort_by(|a, b| {
        (a.d.abs(), a.f, &a.label)
            .cmp(&(b.d.abs(), b.f, &b.label))
    });
    let count = |s: MatchStatus| rows.iter().filter(|r| r.outcome == s).count();
    ComparisonReport {
        matched: count(MatchStatus::Yes),
        mismatched: count(MatchStatus::No),
        unknown: count(MatchStatus::Unknown),
        rows,
    }
}

/// Fetch behavior: serve a cached response when present, or force a refetch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CachePolicy {
    PreferCache,
    Refresh,
}

/// Abstraction over HTTP so tests and offline mode inject their own source.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<String>;
}

/// Real HTTP transport over a blocking client.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new() -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .user_agent(concat!("sha-predict/", env!("CARGO_PKG_VERSION")))
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| Error::Network(e.to_string()))?;
        Ok(HttpTransport { client })
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<String> {
        let resp = self
            .client
            .get(url)
            .send()
            .map_err(|e| Error::Network(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            return Err(Error::HttpStatus {
                status: status.as_u16(),
                url: url.to_string(),
            });
        }
        resp.text().map_err(|e| Error::Network(e.to_string()))
    }
}

/// Canned responses keyed by full URL, for tests and fixtures.
#[derive(Default)]
pub struct FixtureTransport {
    bodies: BTreeMap<String, String>,
}

impl FixtureTransport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, url: impl Into<String>, body: impl Into<String>) {
        self.bodies.insert(url.into(), body.into());
    }
}

impl Transport for FixtureTransport {
    fn get(&self, url: &str) -> Result<String> {
        self.bodies
            .get(url)
            .cloned()
            .ok_or_else(|| Error::Network(format!("no fixture for {url}")))
    }
}

/// Client configuration; the environment variables LMFDB_BASE_URL and
/// SHA_PREDICT_CACHE_DIR override file and default values.
#[derive(Debug, Clone)]
pub struct ClientConfig {
    pub base_url: String,
    pub cache_dir: PathBuf,
    pub min_request_interval: Duration,
    /// When set, only the cache is consulted; the transport is never called.
    pub offline: bool,
}

pub const DEFAULT_BASE_URL: &str = "https://www.lmfdb.org";

fn default_cache_dir() -> PathBuf {
    let base = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
        .unwrap_or_else(std::env::temp_dir);
    base.join("sha-predict")
}

/// Optional keys of the TOML configuration file.
#[derive(Debug, Default, Deserialize)]
struct ConfigFile {
    base_url: Option<String>,
    cache_dir: Option<PathBuf>,
    min_request_interval_ms: Option<u64>,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            base_url: DEFAULT_BASE_URL.to_string(),
            cache_dir: default_cache_dir(),
            min_request_interval: Duration::from_secs(1),
            offline: false,
        }
    }
}

impl ClientConfig {
    /// Defaults, overlaid by the TOML file when given, then the environment.
    pub fn load(config_path: Option<&Path>) -> Result<Self> {
        let mut cfg = ClientConfig::default();
        if let Some(path) = config_path {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Cache {
                path: path.display().to_string(),
                source: e,
            })?;
            let file: ConfigFile = toml::from_str(&text)
                .map_err(|e| Error::invalid_input(format!("config {}: {e}", path.display())))?;
            cfg.apply_file(file);
        }
        cfg.apply_env(
            std::env::var("LMFDB_BASE_URL").ok(),
            std::env::var("SHA_PREDICT_CACHE_DIR").ok(),
        );
        Ok(cfg)
    }

    fn apply_file(&mut self, file: ConfigFile) {
        if let Some(b) = file.base_url {
            self.base_url = b;
        }
        if let Some(d) = file.cache_dir {
            self.cache_dir = d;
        }
        if let Some(ms) = file.min_request_interval_ms {
            self.min_request_interval = Duration::from_millis(ms);
        }
    }

    fn apply_env(&mut self, base_url: Option<String>, cache_dir: Option<String>) {
        if let Some(b) = base_url {
            self.base_url = b;
        }
        if let Some(d) = cache_dir {
            self.cache_dir = PathBuf::from(d);
        }
    }
}

/// Builds the API query URL for one CM discriminant.
pub(crate) fn query_url(base_url: &str, cm: i64) -> String {
    let base = base_url.trim_end_matches('/');
    format!("{base}/api/ec_curvedata/?_format=json&_fields=lmfdb_label,cm,sha_an&cm={cm}")
}

fn canonical_query(cm: i64) -> String {
    format!("cm={cm}")
}

fn excerpt(s: &str) -> String {
    s.chars().take(160).collect()
}

fn now_stamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn parse_analytic_sha(v: &serde_json::Value, body: &str) -> Result<Option<u64>> {
    let malformed = |context: &str| Error::MalformedResponse {
        context: context.to_string(),
        excerpt: excerpt(body),
    };
    match v {
        serde_json::Value::Null => Ok(None),
        serde_json::Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                if u == 0 {
                    return Err(malformed("analytic Sha order must be positive"));
                }
                return Ok(Some(u));
            }
            let f = n
                .as_f64()
                .ok_or_else(|| malformed("analytic Sha order is not a number"))?;
            if f <= 0.0 || f.fract() != 0.0 || f > u64::MAX as f64 {
                return Err(malformed("analytic Sha order must be a positive integer"));
            }
            Ok(Some(f as u64))
        }
        _ => Err(malformed("analytic Sha order has a non-numeric type")),
    }
}

fn parse_response(body: &str, cm: i64, url: &str) -> Result<Vec<CurveRecord>> {
    let malformed = |context: String| Error::MalformedResponse {
        context,
        excerpt: excerpt(body),
    };
    let v: serde_json::Value =
        serde_json::from_str(body).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
    let data = v
        .get("data")
        .and_then(|d| d.as_array())
        .ok_or_else(|| malformed("missing `data` array".into()))?;
    let fetched_at = now_stamp();
    let mut records = Vec::with_capacity(data.len());
    for item in data {
        let label = item
            .get("lmfdb_label")
            .and_then(|l| l.as_str())
            .ok_or_else(|| malformed("record without string `lmfdb_label`".into()))?;
        let cm_field = item
            .get("cm")
            .and_then(|c| c.as_i64())
            .ok_or_else(|| malformed("record without integer `cm`".into()))?;
        if cm_field != cm {
            return Err(malformed(format!(
                "record CM discriminant {cm_field} does not match query {cm}"
            )));
        }
        let analytic_sha = match item.get("sha_an") {
            None => None,
            Some(v) => parse_analytic_sha(v, body)?,
        };
        records.push(CurveRecord {
            label: label.to_string(),
            cm_discriminant: cm_field,
            analytic_sha,
            source_url: url.to_string(),
            fetched_at: fetched_at.clone(),
        });
    }
    Ok(records)
}

fn validate_records(records: &[CurveRecord], path: &Path) -> Result<()> {
    for r in records {
        let bad = r.cm_discriminant >= 0 || r.analytic_sha == Some(0);
        if bad {
            return Err(Error::Cache {
                path: path.display().to_string(),
                source: std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("cached record {} violates invariants", r.label),
                ),
            });
        }
    }
    Ok(())
}

pub(crate) fn render_cache(records: &[CurveRecord]) -> String {
    let mut s = serde_json::to_string_pretty(records).expect("records serialize");
    s.push('\n');
    s
}

/// LMFDB client: injected transport, rate-limited fetches, JSON file cache.
pub struct Client {
    config: ClientConfig,
    transport: Option<Box<dyn Transport>>,
    last_request: Mutex<Option<Instant>>,
}

impl Client {
    pub fn new(config: ClientConfig, transport: Box<dyn Transport>) -> Self {
        Client {
            config,
            transport: Some(transport),
            last_request: Mutex::new(None),
        }
    }

    /// Client over the real HTTP transport.
    pub fn with_http(config: ClientConfig) -> Result<Self> {
        let t = HttpTransport::new()?;
        Ok(Client::new(config, Box::new(t)))
    }

    /// Cache-only client holding no transport at all.
    pub fn offline(mut config: ClientConfig) -> Self {
        config.offline = true;
        Client {
            config,
            transport: None,
            last_request: Mutex::new(None),
        }
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    fn cache_path(&self, canonical: &str) -> PathBuf {
        let name = canonical.replace(['=', '&'], "_");
        self.config.cache_dir.join(format!("{name}.json"))
    }

    fn read_cache(&self, path: &Path) -> Result<Option<Vec<CurveRecord>>> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => {
                return Err(Error::Cache {
                    path: path.display().to_string(),
                    source: e,
                })
            }
        };
        let records: Vec<CurveRecord> = serde_json::from_str(&text).map_err(|e| Error::Cache {
            path: path.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()),
        })?;
        validate_records(&records, path)?;
        Ok(Some(records))
    }

    fn write_cache(&self, path: &Path, records: &[CurveRecord]) -> Result<()> {
        let as_cache_error = |e: std::io::Error| Error::Cache {
            path: path.display().to_string(),
            source: e,
        };
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(as_cache_error)?;
        }
        std::fs::write(path, render_cache(records)).map_err(as_cache_error)
    }

    fn rate_limited_get(&self, url: &str) -> Result<String> {
        let transport = self.transport.as_ref().ok_or_else(|| Error::Network(
            "client constructed without a transport".into(),
        ))?;
        let mut last = self.last_request.lock().expect("rate limiter lock");
        if let Some(t) = *last {
            let elapsed = t.elapsed();
            if elapsed < self.config.min_request_interval {
                std::thread::sleep(self.config.min_request_interval - elapsed);
            }
        }
        *last = Some(Instant::now());
        transport.get(url)
    }

    /// Records for one CM discriminant, from cache or the network per the
    /// policy; every successful network response is written to the cache.
    pub fn fetch_cm_curves(&self, cm: i64, policy: CachePolicy) -> Result<Vec<CurveRecord>> {
        if cm >= 0 {
            return Err(Error::invalid_input(format!(
                "CM discriminant must be negative, got {cm}"
            )));
        }
        let canonical = canonical_query(cm);
        let path = self.cache_path(&canonical);
        if policy == CachePolicy::PreferCache {
            if let Some(records) = self.read_cache(&path)? {
                return Ok(records);
            }
        }
        if self.config.offline {
            return Err(Error::FetchUnavailable {
                query: canonical,
                reason: "offline mode and no cached response".into(),
            });
        }
        let url = query_url(&self.config.base_url, cm);
        let body = self.rate_limited_get(&url)?;
        let records = parse_response(&body, cm, &url)?;
        self.write_cache(&path, &records)?;
        Ok(records)
    }
}

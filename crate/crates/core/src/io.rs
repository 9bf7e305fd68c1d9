//! Run configuration, field checkpoints and result tables.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::diagnostics::NormSeries;
use crate::dynamics::{EmState, LinState, MhdState};
use crate::error::{Error, Result};
use crate::experiments::{fmt_p, Family, FamilyKind, RateRow, Sweep, SweepPlan, SweepRow, C0};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::timestepping::stepper::DEFAULT_DT_MAX;
use crate::timestepping::Scheme;

/// Flat run configuration. Parsed from a TOML document whose keys are
/// those in [`RunConfig::KEYS`]; absent keys take their defaults.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub cfl: f64,
    pub dt_max: f64,
    pub scheme: Scheme,
    pub c: Vec<f64>,
    pub c0: f64,
    pub family: String,
    pub beta: f64,
    pub alpha: f64,
    pub seed: u64,
    pub amplitude: f64,
    pub decay: f64,
    pub p: Vec<f64>,
    pub s: Vec<f64>,
    pub t_star: f64,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 32,
            t_end: 0.5,
            cfl: 0.5,
            dt_max: DEFAULT_DT_MAX,
            scheme: Scheme::Etd2,
            c: vec![4.0, 8.0, 16.0, 32.0],
            c0: C0,
            family: "F1".into(),
            beta: 0.5,
            alpha: 1.0,
            seed: 7,
            amplitude: crate::experiments::DEFAULT_AMPLITUDE,
            decay: crate::experiments::DEFAULT_DECAY,
            p: vec![1.0, 2.0, 4.0, f64::INFINITY],
            s: vec![0.0, 1.0],
            t_star: 0.25,
            output: PathBuf::from("out"),
        }
    }
}

fn number(key: &str, v: &toml::Value) -> Result<f64> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        toml::Value::String(s) if s.eq_ignore_ascii_case("inf") => Ok(f64::INFINITY),
        _ => Err(Error::config(key, format!("expected a number, found `{v}`"))),
    }
}

fn positive(key: &str, v: &toml::Value) -> Result<f64> {
    let x = number(key, v)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::config(key, format!("{x} must be finite and > 0")))
    }
}

fn list(key: &str, v: &toml::Value) -> Result<Vec<f64>> {
    match v {
        toml::Value::Array(a) => a.iter().map(|x| number(key, x)).collect(),
        other => Ok(vec![number(key, other)?]),
    }
}

fn string(key: &str, v: &toml::Value) -> Result<String> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| Error::config(key, format!("expected a string, found `{v}`")))
}

fn integer(key: &str, v: &toml::Value) -> Result<i64> {
    v.as_integer()
        .ok_or_else(|| Error::config(key, format!("expected an integer, found `{v}`")))
}

impl RunConfig {
    pub const KEYS: [&'static str; 17] = [
        "n", "T", "cfl", "dt_max", "scheme", "c", "c0", "family", "beta", "alpha", "seed",
        "amplitude", "decay", "p", "s", "t_star", "output",
    ];

    pub fn family(&self) -> Result<Family> {
        let kind = match self.family.to_ascii_uppercase().as_str() {
            "F1" => FamilyKind::FixedE,
            "F2" => FamilyKind::DecayingE { beta: self.beta },
            "F3" => FamilyKind::WellPrepared,
            "F4" => FamilyKind::PerturbedFluid { alpha: self.alpha },
            other => {
                return Err(Error::config(
                    "family",
                    format!("`{other}` is not one of F1, F2, F3, F4"),
                ))
            }
        };
        let f = Family {
            kind,
            seed: self.seed,
            amplitude: self.amplitude,
            decay: self.decay,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn plan(&self) -> Result<SweepPlan> {
        let plan = SweepPlan {
            family: self.family()?,
            cs: self.c.clone(),
            ps: self.p.clone(),
            ss: self.s.clone(),
            n: self.n,
            t_end: self.t_end,
            cfl: self.cfl,
            dt_max: self.dt_max,
            scheme: self.scheme,
            t_star: self.t_star,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if GridSpec::new(self.n).is_err() {
            return Err(Error::config("n", format!("{} must be even and >= 4", self.n)));
        }
        if self.c.is_empty() {
            return Err(Error::config("c", "list is empty"));
        }
        if self.c.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("c", "values must be strictly increasing"));
        }
        if let Some(c) = self.c.iter().find(|&&c| !(c >= self.c0) || !c.is_finite()) {
            return Err(Error::config("c", format!("{c} is below c0 = {}", self.c0)));
        }
        if self.p.is_empty() || self.p.iter().any(|&p| !(p >= 1.0)) {
            return Err(Error::config("p", "values must be >= 1 (or inf)"));
        }
        if self.s.iter().any(|&s| !(s >= 0.0) || !s.is_finite()) {
            return Err(Error::config("s", "values must be finite and >= 0"));
        }
        if !(self.t_star <= self.t_end) {
            return Err(Error::config("t_star", format!("{} must lie in (0, T]", self.t_star)));
        }
        self.family()?;
        Ok(())
    }
}

fn parse_table(text: &str, what: &str) -> Result<toml::Table> {
    text.parse()
        .map_err(|e: toml::de::Error| Error::config(what, e.message().trim().to_string()))
}

/// Parses and validates a flat TOML run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &[])
}

/// Like [`parse_config`], with `key=value` overrides applied on top.
pub fn parse_config_with(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut table = parse_table(text, "<document>")?;
    for o in overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Error::config(o.as_str(), "override must look like key=value"))?;
        let k = k.trim();
        let v = v.trim();
        let parsed = parse_table(&format!("{k} = {v}"), k)
            .or_else(|_| parse_table(&format!("{k} = \"{v}\""), k))?;
        table.extend(parsed);
    }
    let mut cfg = RunConfig::default();
    for (key, v) in &table {
        let k = key.as_str();
        match k {
            "n" => {
                let n = integer(k, v)?;
                if n < 4 || n % 2 != 0 {
                    return Err(Error::config(k, format!("{n} must be even and >= 4")));
                }
                cfg.n = n as usize;
            }
            "T" => cfg.t_end = positive(k, v)?,
            "cfl" => cfg.cfl = positive(k, v)?,
            "dt_max" => cfg.dt_max = positive(k, v)?,
            "scheme" => cfg.scheme = string(k, v)?.parse()?,
            "c" => cfg.c = list(k, v)?,
            "c0" => cfg.c0 = positive(k, v)?,
            "family" => cfg.family = string(k, v)?,
            "beta" => cfg.beta = number(k, v)?,
            "alpha" => cfg.alpha = number(k, v)?,
            "seed" => {
                let s = integer(k, v)?;
                cfg.seed = u64::try_from(s).map_err(|_| Error::config(k, format!("{s} must be >= 0")))?;
            }
            "amplitude" => cfg.amplitude = number(k, v)?,
            "decay" => cfg.decay = number(k, v)?,
            "p" => cfg.p = list(k, v)?,
            "s" => cfg.s = list(k, v)?,
            "t_star" => cfg.t_star = positive(k, v)?,
            "output" => cfg.output = PathBuf::from(string(k, v)?),
            _ => return Err(Error::config(k, "unknown key")),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub const CHECKPOINT_VERSION: u32 = 1;
const CHECKPOINT_MAGIC: &str = "emlimit-checkpoint";
/// Width of the zero-padded header length, so the header can state its own size.
const HEADER_LEN_DIGITS: usize = 10;

/// Labelled spectral fields at one time, with the run parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub n: usize,
    /// f64::INFINITY for the MHD limit
    pub c: f64,
    pub t: f64,
    pub seed: u64,
    pub fields: Vec<(String, SpectralField)>,
}

impl Checkpoint {
    pub fn from_em(s: &EmState, seed: u64) -> Self {
        Checkpoint {
            n: s.u.grid().n(),
            c: s.c,
            t: s.t,
            seed,
            fields: vec![("u".into(), s.u.clone()), ("E".into(), s.e.clone()), ("B".into(), s.b.clone())],
        }
    }

    pub fn from_mhd(s: &MhdState, seed: u64) -> Self {
        Checkpoint {
            n: s.u.grid().n(),
            c: f64::INFINITY,
            t: s.t,
            seed,
            fields: vec![("u".into(), s.u.clone()), ("B".into(), s.b.clone())],
        }
    }

    pub fn from_linear(s: &LinState, seed: u64) -> Self {
        Checkpoint {
            n: s.e.grid().n(),
            c: s.c,
            t: s.t,
            seed,
            fields: vec![("E_L".into(), s.e.clone()), ("B_L".into(), s.b.clone())],
        }
    }

    pub fn field(&self, label: &str) -> Result<&SpectralField> {
        self.fields
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::CheckpointFormat(format!("no field `{label}`")))
    }

    pub fn to_em(&self) -> Result<EmState> {
        EmState::new(
            self.t,
            self.c,
            self.field("u")?.clone(),
            self.field("E")?.clone(),
            self.field("B")?.clone(),
        )
    }

    pub fn to_mhd(&self) -> Result<MhdState> {
        MhdState::new(self.t, self.field("u")?.clone(), self.field("B")?.clone())
    }

    fn header(&self, len: usize) -> String {
        let labels: Vec<&str> = self.fields.iter().map(|(l, _)| l.as_str()).collect();
        format!(
            "{CHECKPOINT_MAGIC}\nversion = {CHECKPOINT_VERSION}\nheader_bytes = {len:0width$}\n\
             n = {}\nc = {:?}\nt = {:?}\nseed = {}\nfields = {}\nendianness = little\nend\n",
            self.n,
            self.c,
            self.t,
            self.seed,
            labels.join(","),
            width = HEADER_LEN_DIGITS
        )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let len = self.header(0).len();
        let mut out = self.header(len).into_bytes();
        debug_assert_eq!(out.len(), len);
        for (_, f) in &self.fields {
            for comp in f.components() {
                for z in comp {
                    out.extend_from_slice(&z.re.to_le_bytes());
                    out.extend_from_slice(&z.im.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::CheckpointFormat(m.to_string());
        let end = bytes
            .windows(5)
            .position(|w| w == b"\nend\n")
            .ok_or_else(|| bad("header terminator not found"))?
            + 5;
        let head = std::str::from_utf8(&bytes[..end]).map_err(|_| bad("header is not UTF-8"))?;
        let mut lines = head.lines();
        if lines.next() != Some(CHECKPOINT_MAGIC) {
            return Err(bad("missing magic line"));
        }
        let mut kv = std::collections::HashMap::new();
        for line in lines.filter(|l| *l != "end") {
            let (k, v) = line.split_once(" = ").ok_or_else(|| bad("malformed header line"))?;
            kv.insert(k, v);
        }
        let get = |k: &str| kv.get(k).copied().ok_or_else(|| bad(&format!("missing `{k}`")));
        let version = get("version")?;
        if version != CHECKPOINT_VERSION.to_string() {
            return Err(Error::CheckpointVersion {
                found: version.to_string(),
                expected: CHECKPOINT_VERSION.to_string(),
            });
        }
        if get("endianness")? != "little" {
            return Err(bad("unsupported endianness"));
        }
        let header_bytes: usize = get("header_bytes")?.parse().map_err(|_| bad("bad header_bytes"))?;
        if header_bytes != end {
            return Err(bad("header length does not match"));
        }
        let n: usize = get("n")?.parse().map_err(|_| bad("bad n"))?;
        let grid = GridSpec::new(n)?;
        let c: f64 = get("c")?.parse().map_err(|_| bad("bad c"))?;
        let t: f64 = get("t")?.parse().map_err(|_| bad("bad t"))?;
        let seed: u64 = get("seed")?.parse().map_err(|_| bad("bad seed"))?;
        let labels: Vec<String> = get("fields")?.split(',').map(str::to_string).collect();
        let per_field = 2 * 3 * grid.len() * 8;
        let payload = &bytes[end..];
        let expected = per_field * labels.len();
        if payload.len() != expected {
            return Err(Error::CheckpointTruncated {
                expected,
                found: payload.len(),
            });
        }
        let mut words = payload
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")));
        let mut fields = Vec::with_capacity(labels.len());
        for label in labels {
            let mut comps: [Vec<Complex64>; 3] = Default::default();
            for comp in &mut comps {
                *comp = (0..grid.len())
                    .map(|_| {
                        let re = words.next().expect("length checked");
                        let im = words.next().expect("length checked");
                        Complex64::new(re, im)
                    })
                    .collect();
            }
            fields.push((label, SpectralField::from_components(grid, comps)?));
        }
        Ok(Checkpoint {
            n,
            c,
            t,
            seed,
            fields,
        })
    }
}

pub fn write_checkpoint(ck: &Checkpoint, path: &Path) -> Result<()> {
    fs::write(path, ck.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Checkpoint::from_bytes(&bytes)
}

/// Everything `write_tables` persists.
#[derive(Clone, Debug, Default)]
pub struct Tables {
    pub series: Vec<NormSeries>,
    pub sweep: Vec<SweepRow>,
    pub rates: Vec<RateRow>,
}

impl Tables {
    /// Rows and fits of the sweeps, plus every time series under
    /// "<family> c=<c> <quantity>".
    pub fn from_sweeps(sweeps: &[Sweep]) -> Result<Self> {
        let mut t = Tables::default();
        for s in sweeps {
            t.sweep.extend(s.rows()?);
            t.rates.extend(s.fits()?);
            for r in &s.results {
                let prefix = format!("{} c={}", r.family, r.c);
                for (q, ser) in &r.series {
                    t.series.push(relabel(ser, format!("{prefix} {q}")));
                }
                for (q, l) in &r.layered {
                    t.series.push(relabel(&l.full(), format!("{prefix} {q}")));
                    t.series.push(relabel(&l.remainder(), format!("{prefix} {q}_remainder")));
                }
            }
        }
        t.sort();
        Ok(t)
    }

    /// Row order (family, quantity, p, c); series by label.
    pub fn sort(&mut self) {
        let pk = |p: Option<f64>| p.unwrap_or(f64::NEG_INFINITY);
        self.sweep.sort_by(|a, b| {
            (a.family.as_str(), a.quantity.as_str())
                .cmp(&(b.family.as_str(), b.quantity.as_str()))
                .then(pk(a.p).total_cmp(&pk(b.p)))
                .then(a.c.total_cmp(&b.c))
        });
        self.rates.sort_by(|a, b| {
            (a.family.as_str(), a.quantity.as_str())
                .cmp(&(b.family.as_str(), b.quantity.as_str()))
                .then(pk(a.p).total_cmp(&pk(b.p)))
        });
        self.series.sort_by(|a, b| a.label.cmp(&b.label));
    }
}

fn relabel(s: &NormSeries, label: String) -> NormSeries {
    let mut out = s.clone();
    out.label = label;
    out
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

#[derive(Serialize)]
struct RateJson<'a> {
    family: &'a str,
    quantity: &'a str,
    p: String,
    slope: f64,
    stderr: f64,
    r2: f64,
    predicted: Option<f64>,
    verdict: String,
    #[serde(rename = "match")]
    matched: Option<bool>,
}

fn csv_writer(path: &Path, header: &[&str]) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    Ok(w)
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e.to_string()))
}

/// Writes series.csv, sweep.csv, rates.csv and summary.json into `dir`
/// and returns their paths.
pub fn write_tables(tables: &Tables, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let series_path = dir.join("series.csv");
    let mut w = csv_writer(&series_path, &["t", "label", "value"])?;
    for s in &tables.series {
        for (t, v) in s.times.iter().zip(&s.values) {
            w.write_record([format!("{t:e}"), s.label.clone(), format!("{v:e}")])
                .map_err(|e| csv_err(&series_path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(&series_path, e))?;

    let sweep_path = dir.join("sweep.csv");
    let mut w = csv_writer(&sweep_path, &["family", "c", "p", "quantity", "value"])?;
    for r in &tables.sweep {
        w.write_record([
            r.family.clone(),
            format!("{}", r.c),
            fmt_p(r.p),
            r.quantity.clone(),
            format!("{:e}", r.value),
        ])
        .map_err(|e| csv_err(&sweep_path, e))?;
    }
    w.flush().map_err(|e| Error::io(&sweep_path, e))?;

    let rates_path = dir.join("rates.csv");
    let mut w = csv_writer(
        &rates_path,
        &["family", "quantity", "p", "slope", "stderr", "r2", "predicted", "verdict", "match"],
    )?;
    for r in &tables.rates {
        w.write_record([
            r.family.clone(),
            r.quantity.clone(),
            fmt_p(r.p),
            format!("{:e}", r.slope),
            format!("{:e}", r.stderr),
            format!("{:e}", r.r2),
            fmt_opt(r.predicted),
            r.verdict.to_string(),
            r.matched.map(|m| m.to_string()).unwrap_or_default(),
        ])
        .map_err(|e| csv_err(&rates_path, e))?;
    }
    w.flush().map_err(|e| Error::io(&rates_path, e))?;

    let json_path = dir.join("summary.json");
    let rows: Vec<RateJson> = tables
        .rates
        .iter()
        .map(|r| RateJson {
            family: &r.family,
            quantity: &r.quantity,
            p: fmt_p(r.p),
            slope: r.slope,
            stderr: r.stderr,
            r2: r.r2,
            predicted: r.predicted,
            verdict: r.verdict.to_string(),
            matched: r.matched,
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&rows)
        .map_err(|e| Error::io(&json_path, std::io::Error::other(e.to_string())))?;
    text.push('\n');
    let mut f = fs::File::create(&json_path).map_err(|e| Error::io(&json_path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(&json_path, e))?;
    Ok(vec![series_path, sweep_path, rates_path, json_path])
}

fn parse_p(text: &str) -> Option<Option<f64>> {
    match text {
        "-" => Some(None),
        "inf" => Some(Some(f64::INFINITY)),
        t => t.parse().ok().map(Some),
    }
}

/// Reads the rows of a sweep.csv written by [`write_tables`].
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let bad = |line: usize, what: &str| Error::InvalidArgument(format!("{}: row {line}: bad {what}", path.display()));
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        if rec.len() != 5 {
            return Err(bad(i + 1, "column count"));
        }
        rows.push(SweepRow {
            family: rec[0].to_string(),
            c: rec[1].parse().map_err(|_| bad(i + 1, "c"))?,
            p: parse_p(&rec[2]).ok_or_else(|| bad(i + 1, "p"))?,
            quantity: rec[3].to_string(),
            value: rec[4].parse().map_err(|_| bad(i + 1, "value"))?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::random_divfree_field;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
    }

    #[test]
    fn config_errors_name_the_key() {
        let key = |text: &str| match parse_config(text) {
            Err(Error::Config { key, .. }) => key,
            other => panic!("expected a config error, got {other:?}"),
        };
        assert_eq!(key("bogus = 1"), "bogus");
        assert_eq!(key("n = 7"), "n");
        assert_eq!(key("c = [8, 4]"), "c");
        assert_eq!(key("c = [0.5, 4]"), "c");
        assert_eq!(key("cfl = -1"), "cfl");
        assert_eq!(key("family = \"F9\""), "family");
        assert_eq!(key("p = [0.5]"), "p");
    }

    #[test]
    fn overrides_replace_document_values() {
        let cfg = parse_config_with("n = 16\n", &["n=8".into(), "family=F3".into(), "c=[2,3,5]".into()]).unwrap();
        assert_eq!(cfg.n, 8);
        assert_eq!(cfg.family, "F3");
        assert_eq!(cfg.c, vec![2.0, 3.0, 5.0]);
        assert!(parse_config_with("", &["n".into()]).is_err());
    }

    #[test]
    fn config_values_are_read() {
        let cfg = parse_config(
            "n = 16\nT = 0.25\nc = [2, 4, 8]\np = [2, \"inf\"]\nfamily = \"F2\"\nbeta = 0.25\nscheme = \"ETD-RK4-Lawson\"\n",
        )
        .unwrap();
        assert_eq!(cfg.n, 16);
        assert_eq!(cfg.p, vec![2.0, f64::INFINITY]);
        assert_eq!(cfg.scheme, Scheme::EtdRk4Lawson);
        assert_eq!(cfg.family().unwrap().kind, FamilyKind::DecayingE { beta: 0.25 });
        assert_eq!(cfg.plan().unwrap().cs, vec![2.0, 4.0, 8.0]);
    }

    fn sample() -> Checkpoint {
        let g = GridSpec::new(8).unwrap();
        let s = EmState {
            t: 0.1 + 0.2,
            c: 8.0,
            u: random_divfree_field(g, 1, 1.0, 4.0).unwrap(),
            e: random_divfree_field(g, 2, 1.0, 4.0).unwrap(),
            b: random_divfree_field(g, 3, 1.0, 4.0).unwrap(),
        };
        Checkpoint::from_em(&s, 42)
    }

    #[test]
    fn checkpoint_round_trip() {
        let ck = sample();
        let bytes = ck.to_bytes();
        assert_eq!(bytes.len() - bytes.windows(5).position(|w| w == b"\nend\n").unwrap() - 5, 3 * 2 * 3 * 512 * 8);
        let back = Checkpoint::from_bytes(&bytes).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.t.to_bits(), ck.t.to_bits());
        assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn checkpoint_errors() {
        let bytes = sample().to_bytes();
        assert!(matches!(
            Checkpoint::from_bytes(&bytes[..bytes.len() - 8]),
            Err(Error::CheckpointTruncated { .. })
        ));
        let text = String::from_utf8_lossy(&bytes[..200]).replace("version = 1", "version = 9");
        let mut foreign = text.into_bytes();
        foreign.extend_from_slice(&bytes[200..]);
        assert!(matches!(
            Checkpoint::from_bytes(&foreign),
            Err(Error::CheckpointVersion { found, .. }) if found == "9"
        ));
    }

    #[test]
    fn sweep_rows_round_trip_through_csv() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Tables::default();
        for (c, p) in [(4.0, None), (8.0, Some(2.0)), (16.0, Some(f64::INFINITY))] {
            t.sweep.push(SweepRow {
                family: "F2(beta=0.5)".into(),
                c,
                p,
                quantity: "q".into(),
                value: 0.1 + c,
            });
        }
        write_tables(&t, dir.path()).unwrap();
        assert_eq!(read_sweep_csv(&dir.path().join("sweep.csv")).unwrap(), t.sweep);
    }

    #[test]
    fn empty_tables_are_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        let files = write_tables(&Tables::default(), dir.path()).unwrap();
        assert_eq!(files.len(), 4);
        let rates = fs::read_to_string(dir.path().join("rates.csv")).unwrap();
        assert_eq!(rates, "family,quantity,p,slope,stderr,r2,predicted,verdict,match\n");
        assert_eq!(fs::read_to_string(dir.path().join("summary.json")).unwrap(), "[]\n");
    }
}

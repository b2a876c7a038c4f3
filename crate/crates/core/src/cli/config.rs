use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spin::{Bond, BondKind, PlaquetteGeometry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format '{other}' (csv|json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Built-in geometry name or a path to a bond-list file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum GeometrySource {
    Named(String),
    File(PathBuf),
}

pub const SWAPPED_CONTROL_NAME: &str = "swapped-control";

impl GeometrySource {
    pub fn parse(s: &str) -> Self {
        match s {
            PlaquetteGeometry::DEFAULT_NAME | SWAPPED_CONTROL_NAME => GeometrySource::Named(s.into()),
            path => GeometrySource::File(PathBuf::from(path)),
        }
    }

    /// Bonds with `D = d` and `J = 0`; J is set per grid point.
    pub fn load(&self, d: f64) -> Result<PlaquetteGeometry> {
        match self {
            GeometrySource::Named(n) if n == PlaquetteGeometry::DEFAULT_NAME => {
                Ok(PlaquetteGeometry::paper_default(d, 0.0))
            }
            GeometrySource::Named(n) if n == SWAPPED_CONTROL_NAME => {
                Ok(PlaquetteGeometry::swapped_control(d, 0.0))
            }
            GeometrySource::Named(n) => Err(Error::Config(format!("unknown geometry '{n}'"))),
            GeometrySource::File(p) => load_geometry_file(p, d),
        }
    }
}

impl fmt::Display for GeometrySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometrySource::Named(n) => f.write_str(n),
            GeometrySource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Parses `kind from to strength` records; `#` starts a comment.
pub fn parse_geometry(text: &str, d: f64) -> Result<PlaquetteGeometry> {
    let mut bonds = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let err = |message: String| Error::Parse { line, message };
        if fields.len() != 4 {
            return Err(err(format!(
                "expected 'kind from to strength', got {} fields",
                fields.len()
            )));
        }
        let kind = BondKind::parse(fields[0]).ok_or_else(|| err(format!("unknown bond kind '{}'", fields[0])))?;
        let site = |s: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(v) if (1..=4).contains(&v) => Ok(v),
                _ => Err(err(format!("site '{s}' is not in 1..4"))),
            }
        };
        let (from, to) = (site(fields[1])?, site(fields[2])?);
        let strength: f64 = fields[3]
            .parse()
            .map_err(|_| err(format!("strength '{}' is not a number", fields[3])))?;
        let bond = Bond::new(kind, from, to, strength);
        let mut trial = bonds.clone();
        trial.push(bond);
        PlaquetteGeometry::new(trial, d, 0.0).map_err(|e| err(e.to_string()))?;
        bonds.push(bond);
    }
    if bonds.is_empty() {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: "no bonds".into(),
        });
    }
    PlaquetteGeometry::new(bonds, d, 0.0)
}

pub fn load_geometry_file(path: &Path, d: f64) -> Result<PlaquetteGeometry> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_geometry(&text, d)
}

/// `kind from to strength` text for a geometry.
pub fn format_geometry(g: &PlaquetteGeometry) -> String {
    g.bonds
        .iter()
        .map(|b| format!("{} {} {} {}\n", b.kind, b.from, b.to, b.strength))
        .collect()
}

/// A real number, optionally in units of π: `1.5`, `pi`, `-2pi`, `3pi/4`,
/// `0.5*pi`, `1/3`.
pub fn parse_scalar(s: &str) -> Result<f64> {
    let bad = || Error::Config(format!("cannot parse number '{s}'"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let den = match den {
        Some(d) => d.parse::<f64>().map_err(|_| bad())?,
        None => 1.0,
    };
    let lower = num.to_ascii_lowercase();
    let value = match lower.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim().trim_end_matches('*').trim();
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            c * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let v = value / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// `min:max:steps`.
pub fn parse_range(s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!("range '{s}' is not min:max:steps")));
    }
    let steps = parts[2]
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("range '{s}': steps must be a non-negative integer")))?;
    Ok((parse_scalar(parts[0])?, parse_scalar(parts[1])?, steps))
}

/// Inclusive uniform grid.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![min],
        n => (0..n)
            .map(|k| {
                if k + 1 == n {
                    max
                } else {
                    min + (max - min) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub t_steps: usize,
    pub j_min: f64,
    pub j_max: f64,
    pub j_steps: usize,
    pub d: f64,
    pub geometry: GeometrySource,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threshold: f64,
    pub max_m: u32,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            t_min: 0.0,
            t_max: 4.0 * PI,
            t_steps: 129,
            j_min: 0.0,
            j_max: 2.0,
            j_steps: 65,
            d: 1.0,
            geometry: GeometrySource::Named(PlaquetteGeometry::DEFAULT_NAME.into()),
            out: None,
            format: Format::Csv,
            threshold: 1e-3,
            max_m: 7,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.t_steps < 2 || self.j_steps < 2 {
            return fail(format!(
                "t_steps = {}, j_steps = {}: both must be at least 2",
                self.t_steps, self.j_steps
            ));
        }
        let finite = [self.t_min, self.t_max, self.j_min, self.j_max, self.d, self.threshold]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return fail("non-finite numeric setting".into());
        }
        if !(self.t_min < self.t_max) {
            return fail(format!("t_min = {} must be below t_max = {}", self.t_min, self.t_max));
        }
        if !(self.j_min < self.j_max) {
            return fail(format!("j_min = {} must be below j_max = {}", self.j_min, self.j_max));
        }
        if !(self.d > 0.0) {
            return fail(format!("d = {} must be positive", self.d));
        }
        if !(self.threshold > 0.0) {
            return fail(format!("threshold = {} must be positive", self.threshold));
        }
        if self.max_m == 0 {
            return fail("max_m must be at least 1".into());
        }
        Ok(())
    }

    pub fn t_grid(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.t_steps)
    }

    pub fn j_grid(&self) -> Vec<f64> {
        linspace(self.j_min, self.j_max, self.j_steps)
    }

    pub fn load_geometry(&self) -> Result<PlaquetteGeometry> {
        self.geometry.load(self.d)
    }

    /// Flat `key = value` text; floats use the shortest round-trip form.
    pub fn to_kv(&self) -> String {
        let out = self
            .out
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_default();
        format!(
            "t_min = {:?}\nt_max = {:?}\nt_steps = {}\nj_min = {:?}\nj_max = {:?}\nj_steps = {}\n\
             d = {:?}\ngeometry = {}\nout = {}\nformat = {}\nthreshold = {:?}\nmax_m = {}\n",
            self.t_min,
            self.t_max,
            self.t_steps,
            self.j_min,
            self.j_max,
            self.j_steps,
            self.d,
            self.geometry,
            out,
            self.format,
            self.threshold,
            self.max_m
        )
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let int = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::Config(format!("{key}: '{v}' is not a non-negative integer")))
        };
        match key {
            "t_min" => self.t_min = parse_scalar(value)?,
            "t_max" => self.t_max = parse_scalar(value)?,
            "t_steps" => self.t_steps = int(value)?,
            "j_min" => self.j_min = parse_scalar(value)?,
            "j_max" => self.j_max = parse_scalar(value)?,
            "j_steps" => self.j_steps = int(value)?,
            "t_range" => (self.t_min, self.t_max, self.t_steps) = parse_range(value)?,
            "j_range" => (self.j_min, self.j_max, self.j_steps) = parse_range(value)?,
            "d" => self.d = parse_scalar(value)?,
            "geometry" => self.geometry = GeometrySource::parse(value),
            "out" => self.out = (!value.is_empty()).then(|| PathBuf::from(value)),
            "format" => self.format = Format::parse(value)?,
            "threshold" => self.threshold = parse_scalar(value)?,
            "max_m" => {
                self.max_m = u32::try_from(int(value)?)
                    .map_err(|_| Error::Config(format!("max_m '{value}' out of range")))?
            }
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Defaults overridden by every `key = value` line of `text`. Not
    /// validated, so command-line flags can still fix things up.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected key = value, got '{body}'"),
            })?;
            cfg.set(k.trim(), v.trim()).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_kv(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar("pi").unwrap(), PI);
        assert_eq!(parse_scalar("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_scalar("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_scalar("-3*pi/4").unwrap(), -3.0 * PI / 4.0);
        assert_eq!(parse_scalar("1/3").unwrap(), 1.0 / 3.0);
        assert_eq!(parse_scalar(" 0.25 ").unwrap(), 0.25);
        assert!(parse_scalar("tau").is_err());
        assert!(parse_scalar("1/0").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:2pi:129").unwrap(), (0.0, 2.0 * PI, 129));
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("0:1:x").is_err());
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let g = linspace(0.0, 4.0 * PI, 129);
        assert_eq!(g.len(), 129);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[128], 4.0 * PI);
        assert_eq!(g[32], PI);
    }

    #[test]
    fn default_is_valid_and_rejections() {
        SweepConfig::default().validate().unwrap();
        let mut c = SweepConfig::default();
        c.t_steps = 1;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = SweepConfig::default();
        c.j_min = 2.0;
        assert!(c.validate().is_err());
        let mut c = SweepConfig::default();
        c.max_m = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn kv_errors_carry_line_numbers() {
        match SweepConfig::from_kv("t_min = 0\n\nbogus = 1\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        match SweepConfig::from_kv("t_min 0\n") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn geometry_text_round_trip() {
        let g = PlaquetteGeometry::paper_default(1.0, 0.0);
        let parsed = parse_geometry(&format_geometry(&g), 1.0).unwrap();
        assert_eq!(parsed, g);
    }

    #[test]
    fn geometry_errors_carry_line_numbers() {
        let text = "# ring\nDM_Z 1 2 1\nDM_Z 2 3\n";
        match parse_geometry(text, 1.0) {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_geometry("DM_Z 1 2 1\nDM_Z 1 5 1\n", 1.0) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_geometry("DM_Z 1 2 1\nDM_Z 2 1 1\n", 1.0) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_geometry("# nothing\n", 1.0).is_err());
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e6..1e6f64, any::<f64>().prop_filter("finite", |v| v.is_finite())]
    }

    proptest! {
        #[test]
        fn kv_round_trip(
            t_min in finite(), t_max in finite(), t_steps in 0usize..100_000,
            j_min in finite(), j_max in finite(), j_steps in 0usize..100_000,
            d in finite(), threshold in finite(), max_m in 0u32..1000,
            geometry in prop_oneof![
                Just(PlaquetteGeometry::DEFAULT_NAME.to_string()),
                Just(SWAPPED_CONTROL_NAME.to_string()),
                "[a-z][a-z0-9_]{0,8}\\.geom",
            ],
            out in proptest::option::of("[a-z][a-z0-9_]{0,8}\\.csv"),
            json in any::<bool>(),
        ) {
            let cfg = SweepConfig {
                t_min, t_max, t_steps, j_min, j_max, j_steps, d,
                geometry: GeometrySource::parse(&geometry),
                out: out.map(PathBuf::from),
                format: if json { Format::Json } else { Format::Csv },
                threshold,
                max_m,
            };
            prop_assert_eq!(SweepConfig::from_kv(&cfg.to_kv()).unwrap(), cfg);
        }
    }
}

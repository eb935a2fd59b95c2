//! Flat `key = value` run configuration.
//!
//! Angles accept `pi` forms such as `-pi/6` or `0.5*pi`. Ranges are written
//! `lo:hi:n`. Later assignments override earlier ones, so command-line
//! overrides are applied with [`RunConfig::set`] after loading a file.

use crate::dynamics::InitialStateRule;
use crate::error::{Error, Result};
use crate::floquet::{Band, EffectiveBloch};
use crate::model::{KPoint, ModelPreset, QuenchProtocol};
use crate::su2::Spinor;
use crate::topology::phase_diagram::TRange;
use crate::topology::texture::AxisChoice;
use crate::vec3::Vec3;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Lattice,
    Swa,
    Dwa,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lattice" => Ok(Method::Lattice),
            "swa" => Ok(Method::Swa),
            "dwa" => Ok(Method::Dwa),
            _ => Err(Error::invalid("method", format!("expected lattice|swa|dwa, got {s:?}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Lattice => "lattice",
            Method::Swa => "swa",
            Method::Dwa => "dwa",
        })
    }
}

/// Initial state of the dynamic runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    /// `|0⟩` at every k.
    Ground,
    /// Independent random pure state per k.
    Random,
    /// `init_weight` on the selected band with a random relative phase.
    Weighted,
}

impl FromStr for InitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ground" | "zero" | "0" => Ok(InitKind::Ground),
            "random" => Ok(InitKind::Random),
            "weighted" => Ok(InitKind::Weighted),
            _ => Err(Error::invalid(
                "init",
                format!("expected ground|random|weighted, got {s:?}"),
            )),
        }
    }
}

impl fmt::Display for InitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitKind::Ground => "ground",
            InitKind::Random => "random",
            InitKind::Weighted => "weighted",
        })
    }
}

/// Rectangle `[k1_lo, k1_hi] × [k2_lo, k2_hi]` in k-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KRect {
    pub k1_lo: f64,
    pub k1_hi: f64,
    pub k2_lo: f64,
    pub k2_hi: f64,
}

impl KRect {
    pub const FULL: KRect = KRect {
        k1_lo: -PI,
        k1_hi: PI,
        k2_lo: -PI,
        k2_hi: PI,
    };

    /// Square of half-width `half` centred on `(k1, k2)`.
    pub fn around(k1: f64, k2: f64, half: f64) -> Self {
        KRect {
            k1_lo: k1 - half,
            k1_hi: k1 + half,
            k2_lo: k2 - half,
            k2_hi: k2 + half,
        }
    }

    pub fn contains(&self, k: KPoint) -> bool {
        let inside = |x: f64, lo: f64, hi: f64| {
            let x = lo + (x - lo).rem_euclid(2.0 * PI);
            x <= hi
        };
        inside(k.k1, self.k1_lo, self.k1_hi) && inside(k.k2, self.k2_lo, self.k2_hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: ModelPreset,
    pub t1_duration: f64,
    pub t2_duration: f64,
    /// k-grid for spectra and Chern numbers.
    pub grid: usize,
    /// k-grid for texture maps.
    pub texture_grid: usize,
    /// Largest k-grid reached by adaptive refinement.
    pub grid_cap: usize,
    pub band: Band,
    pub method: Method,
    pub periods: usize,
    pub axes: AxisChoice,
    pub init: InitKind,
    pub init_weight: f64,
    pub weight_gap_threshold: f64,
    pub degeneracy_tol: f64,
    pub t1_range: TRange,
    pub t2_range: TRange,
    /// Window of texture maps.
    pub region: KRect,
    /// Clockwise square loop for loop profiles.
    pub loop_rect: KRect,
    pub loop_samples: usize,
    pub k: KPoint,
    /// Effective Bloch vector for eigenstate preparation.
    pub d: Vec3,
    /// Rabi frequency; `None` picks the largest value within the detuning cap.
    pub rabi: Option<f64>,
    pub detuning_cap: f64,
    pub max_rabi: f64,
    pub shots: usize,
    pub calibration: Option<PathBuf>,
    pub compare: bool,
    pub seed: u64,
    pub out: PathBuf,
    /// Worker threads; `0` uses all cores. Not echoed in output headers.
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: ModelPreset::STANDARD,
            t1_duration: 0.9,
            t2_duration: 0.8,
            grid: 120,
            texture_grid: 48,
            grid_cap: 960,
            band: Band::FILLED,
            method: Method::Lattice,
            periods: 64,
            axes: AxisChoice::ZXY,
            init: InitKind::Ground,
            init_weight: 0.85,
            weight_gap_threshold: crate::dynamics::DEFAULT_WEIGHT_GAP_THRESHOLD,
            degeneracy_tol: crate::floquet::DEFAULT_DEGENERACY_TOL,
            t1_range: TRange::new(0.05, 2.0, 30),
            t2_range: TRange::new(0.05, 2.0, 30),
            region: KRect::FULL,
            loop_rect: KRect::around(-2.523, -0.831, 0.4),
            loop_samples: 400,
            k: KPoint::new(0.3, 0.5),
            d: Vec3::new(0.0, 0.0, 1.0),
            rabi: None,
            detuning_cap: crate::pulse::DEFAULT_DETUNING_CAP,
            max_rabi: crate::pulse::DEFAULT_MAX_RABI,
            shots: 0,
            calibration: None,
            compare: false,
            seed: 0,
            out: PathBuf::from("out"),
            threads: 0,
        }
    }
}

/// Parses a real number, allowing `pi`, `-pi/6`, `2*pi/3`, `0.5pi`.
pub fn parse_real(field: &str, s: &str) -> Result<f64> {
    let bad = || Error::invalid(field, format!("not a number: {s:?}"));
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        return if v.is_finite() { Ok(v) } else { Err(bad()) };
    }
    let lower = t.to_ascii_lowercase();
    let Some(pos) = lower.find("pi") else {
        return Err(bad());
    };
    let (head, tail) = (&lower[..pos], &lower[pos + 2..]);
    let head = head.trim_end_matches('*').trim();
    let coef = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let den = match tail.trim() {
        "" => 1.0,
        t => t
            .strip_prefix('/')
            .ok_or_else(bad)?
            .trim()
            .parse::<f64>()
            .map_err(|_| bad())?,
    };
    if den == 0.0 {
        return Err(bad());
    }
    Ok(coef * PI / den)
}

fn parse_usize(field: &str, s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::invalid(field, format!("not a non-negative integer: {s:?}")))
}

fn parse_reals(field: &str, s: &str, n: usize) -> Result<Vec<f64>> {
    let v = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .map(|p| parse_real(field, p))
        .collect::<Result<Vec<_>>>()?;
    if v.len() != n {
        return Err(Error::invalid(
            field,
            format!("expected {n} comma-separated numbers, got {s:?}"),
        ));
    }
    Ok(v)
}

fn parse_range(field: &str, s: &str) -> Result<TRange> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::invalid(field, format!("expected lo:hi:n, got {s:?}")));
    }
    Ok(TRange::new(
        parse_real(field, parts[0])?,
        parse_real(field, parts[1])?,
        parse_usize(field, parts[2])?,
    ))
}

fn parse_bool(field: &str, s: &str) -> Result<bool> {
    match s.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::invalid(field, format!("expected true|false, got {s:?}"))),
    }
}

fn rect_from(field: &str, s: &str) -> Result<KRect> {
    let v = parse_reals(field, s, 4)?;
    Ok(KRect {
        k1_lo: v[0],
        k1_hi: v[1],
        k2_lo: v[2],
        k2_hi: v[3],
    })
}

/// Every accepted key, in header order.
pub const KEYS: &[&str] = &[
    "t1",
    "t2",
    "t3_a",
    "phi_a",
    "t3_b",
    "phi_b",
    "T1",
    "T2",
    "grid",
    "texture_grid",
    "grid_cap",
    "band",
    "method",
    "periods",
    "axes",
    "init",
    "init_weight",
    "weight_gap_threshold",
    "degeneracy_tol",
    "T1_range",
    "T2_range",
    "region",
    "loop",
    "loop_samples",
    "k",
    "d",
    "rabi",
    "detuning_cap",
    "max_rabi",
    "shots",
    "calibration",
    "compare",
    "seed",
    "out",
    "threads",
];

impl RunConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "t1" => self.preset.t1 = parse_real(key, v)?,
            "t2" => self.preset.t2 = parse_real(key, v)?,
            "t3_a" => self.preset.t3_a = parse_real(key, v)?,
            "phi_a" => self.preset.phi_a = parse_real(key, v)?,
            "t3_b" => self.preset.t3_b = parse_real(key, v)?,
            "phi_b" => self.preset.phi_b = parse_real(key, v)?,
            "T1" => self.t1_duration = parse_real(key, v)?,
            "T2" => self.t2_duration = parse_real(key, v)?,
            "grid" => self.grid = parse_usize(key, v)?,
            "texture_grid" => self.texture_grid = parse_usize(key, v)?,
            "grid_cap" => self.grid_cap = parse_usize(key, v)?,
            "band" => self.band = v.parse()?,
            "method" => self.method = v.parse()?,
            "periods" => self.periods = parse_usize(key, v)?,
            "axes" => self.axes = v.parse()?,
            "init" => self.init = v.parse()?,
            "init_weight" => self.init_weight = parse_real(key, v)?,
            "weight_gap_threshold" => self.weight_gap_threshold = parse_real(key, v)?,
            "degeneracy_tol" => self.degeneracy_tol = parse_real(key, v)?,
            "T1_range" => self.t1_range = parse_range(key, v)?,
            "T2_range" => self.t2_range = parse_range(key, v)?,
            "region" => self.region = rect_from(key, v)?,
            "loop" => self.loop_rect = rect_from(key, v)?,
            "loop_samples" => self.loop_samples = parse_usize(key, v)?,
            "k" => {
                let p = parse_reals(key, v, 2)?;
                self.k = KPoint::new(p[0], p[1]);
            }
            "d" => {
                let p = parse_reals(key, v, 3)?;
                self.d = Vec3::new(p[0], p[1], p[2]);
            }
            "rabi" => {
                self.rabi = match v {
                    "auto" => None,
                    _ => Some(parse_real(key, v)?),
                }
            }
            "detuning_cap" => self.detuning_cap = parse_real(key, v)?,
            "max_rabi" => self.max_rabi = parse_real(key, v)?,
            "shots" => self.shots = parse_usize(key, v)?,
            "calibration" => self.calibration = (!v.is_empty()).then(|| PathBuf::from(v)),
            "compare" => self.compare = parse_bool(key, v)?,
            "seed" => {
                self.seed = v
                    .parse()
                    .map_err(|_| Error::invalid(key, format!("not a non-negative integer: {v:?}")))?
            }
            "out" => self.out = PathBuf::from(v),
            "threads" => self.threads = parse_usize(key, v)?,
            other => return Err(Error::invalid(other, "unknown configuration key")),
        }
        Ok(())
    }

    /// Applies a `key=value` override string.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::invalid(pair, "expected key=value"))?;
        self.set(k, v)
    }

    /// Applies every assignment of a configuration file body.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::invalid(
                    format!("line {}", no + 1),
                    format!("expected key = value, got {line:?}"),
                )
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = Self::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn protocol(&self) -> Result<QuenchProtocol> {
        self.preset.protocol(self.t1_duration, self.t2_duration)
    }

    /// Checks the fields every command depends on.
    pub fn validate(&self) -> Result<()> {
        let p = &self.preset;
        for (name, v) in [
            ("t1", p.t1),
            ("t2", p.t2),
            ("t3_a", p.t3_a),
            ("phi_a", p.phi_a),
            ("t3_b", p.t3_b),
            ("phi_b", p.phi_b),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        for (name, v) in [("T1", self.t1_duration), ("T2", self.t2_duration)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("duration must be positive, got {v}")));
            }
        }
        if self.grid < 4 {
            return Err(Error::invalid("grid", "must be at least 4"));
        }
        if self.texture_grid < 4 {
            return Err(Error::invalid("texture_grid", "must be at least 4"));
        }
        if self.grid_cap < self.grid.max(self.texture_grid) {
            return Err(Error::invalid("grid_cap", "must be at least grid and texture_grid"));
        }
        if self.periods == 0 {
            return Err(Error::invalid("periods", "must be at least 1"));
        }
        if !(self.init_weight > 0.5 && self.init_weight <= 1.0) {
            return Err(Error::invalid("init_weight", "must lie in (0.5, 1]"));
        }
        if !(self.weight_gap_threshold >= 0.0 && self.weight_gap_threshold < 1.0) {
            return Err(Error::invalid("weight_gap_threshold", "must lie in [0, 1)"));
        }
        if !(self.degeneracy_tol > 0.0 && self.degeneracy_tol < 1.0) {
            return Err(Error::invalid("degeneracy_tol", "must lie in (0, 1)"));
        }
        for (name, r) in [("region", self.region), ("loop", self.loop_rect)] {
            if !(r.k1_lo < r.k1_hi && r.k2_lo < r.k2_hi) {
                return Err(Error::invalid(name, "bounds must satisfy lo < hi"));
            }
        }
        if self.loop_samples < 8 {
            return Err(Error::invalid("loop_samples", "must be at least 8"));
        }
        if let Some(r) = self.rabi {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::invalid("rabi", "must be positive"));
            }
        }
        if !(self.detuning_cap > 0.0 && self.max_rabi > 0.0) {
            return Err(Error::invalid(
                "detuning_cap",
                "detuning_cap and max_rabi must be positive",
            ));
        }
        Ok(())
    }

    pub fn validate_ranges(&self) -> Result<()> {
        self.t1_range.validate("T1_range")?;
        self.t2_range.validate("T2_range")
    }

    pub fn initial_state_rule(&self) -> InitialStateRule {
        match self.init {
            InitKind::Ground => InitialStateRule::Fixed(Spinor::zero()),
            InitKind::Random => InitialStateRule::Randomized { seed: self.seed },
            InitKind::Weighted => InitialStateRule::BandWeighted {
                band: self.band,
                weight: self.init_weight,
                seed: self.seed,
            },
        }
    }

    pub fn effective_bloch(&self) -> EffectiveBloch {
        EffectiveBloch::new(self.d)
    }

    /// `key = value` lines of the resolved configuration, in [`KEYS`] order.
    /// `threads` is left out so outputs do not depend on it.
    pub fn resolved_lines(&self) -> Vec<String> {
        let r = |x: f64| crate::io::fmt_num(x);
        let range = |t: &TRange| format!("{}:{}:{}", r(t.lo), r(t.hi), t.n);
        let rect = |k: &KRect| format!("{},{},{},{}", r(k.k1_lo), r(k.k1_hi), r(k.k2_lo), r(k.k2_hi));
        let p = &self.preset;
        KEYS.iter()
            .filter(|k| **k != "threads")
            .map(|&key| {
                let value = match key {
                    "t1" => r(p.t1),
                    "t2" => r(p.t2),
                    "t3_a" => r(p.t3_a),
                    "phi_a" => r(p.phi_a),
                    "t3_b" => r(p.t3_b),
                    "phi_b" => r(p.phi_b),
                    "T1" => r(self.t1_duration),
                    "T2" => r(self.t2_duration),
                    "grid" => self.grid.to_string(),
                    "texture_grid" => self.texture_grid.to_string(),
                    "grid_cap" => self.grid_cap.to_string(),
                    "band" => self.band.name().to_string(),
                    "method" => self.method.to_string(),
                    "periods" => self.periods.to_string(),
                    "axes" => self.axes.to_string(),
                    "init" => self.init.to_string(),
                    "init_weight" => r(self.init_weight),
                    "weight_gap_threshold" => r(self.weight_gap_threshold),
                    "degeneracy_tol" => r(self.degeneracy_tol),
                    "T1_range" => range(&self.t1_range),
                    "T2_range" => range(&self.t2_range),
                    "region" => rect(&self.region),
                    "loop" => rect(&self.loop_rect),
                    "loop_samples" => self.loop_samples.to_string(),
                    "k" => format!("{},{}", r(self.k.k1), r(self.k.k2)),
                    "d" => format!("{},{},{}", r(self.d.x), r(self.d.y), r(self.d.z)),
                    "rabi" => self.rabi.map_or("auto".to_string(), r),
                    "detuning_cap" => r(self.detuning_cap),
                    "max_rabi" => r(self.max_rabi),
                    "shots" => self.shots.to_string(),
                    "calibration" => self
                        .calibration
                        .as_ref()
                        .map_or(String::new(), |p| p.display().to_string()),
                    "compare" => self.compare.to_string(),
                    "seed" => self.seed.to_string(),
                    "out" => self.out.display().to_string(),
                    _ => unreachable!("key list and match agree"),
                };
                format!("{key} = {value}")
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_forms() {
        assert_eq!(parse_real("x", "pi").unwrap(), PI);
        assert_eq!(parse_real("x", "-pi/6").unwrap(), -PI / 6.0);
        assert_eq!(parse_real("x", "2*pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_real("x", "0.5pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_real("x", "1e-3").unwrap(), 1e-3);
        assert!(parse_real("x", "pi/0").is_err());
        assert!(parse_real("x", "nan").is_err());
        assert!(parse_real("x", "tau").is_err());
    }

    #[test]
    fn file_then_override() {
        let mut c = RunConfig::from_text("# run\nT1 = 0.3\nT2=0.3\nmethod = swa # inline\n").unwrap();
        assert_eq!((c.t1_duration, c.t2_duration, c.method), (0.3, 0.3, Method::Swa));
        c.set_pair("T1=pi/6").unwrap();
        assert_eq!(c.t1_duration, PI / 6.0);
        c.validate().unwrap();
    }

    #[test]
    fn validation_names_the_field() {
        let mut c = RunConfig::default();
        c.set("T1", "-1").unwrap();
        match c.validate() {
            Err(Error::Invalid { field, .. }) => assert_eq!(field, "T1"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(c.set("bogus", "1"), Err(Error::Invalid { field, .. }) if field == "bogus"));
        assert!(RunConfig::from_text("T1 0.3\n").is_err());
    }

    #[test]
    fn resolved_lines_round_trip() {
        let mut c = RunConfig::default();
        c.set("phi_a", "-pi/7").unwrap();
        c.set("rabi", "3.5").unwrap();
        c.set("calibration", "cal.txt").unwrap();
        let text = c.resolved_lines().join("\n");
        let back = RunConfig::from_text(&text).unwrap();
        assert_eq!(back.resolved_lines(), c.resolved_lines());
        assert!(!text.contains("threads"));
    }

    #[test]
    fn rect_contains_wraps() {
        let r = KRect::around(3.0, 0.0, 0.3);
        assert!(r.contains(KPoint::new(-3.1, 0.1)));
        assert!(!r.contains(KPoint::new(0.0, 0.0)));
    }
}

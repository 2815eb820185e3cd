//! Experiment configuration: a sectioned `key = value` text format with `#`
//! comments.
//!
//! ```text
//! plant = pendulum          # pendulum | chain | oracle
//! variant = fxt-m4
//!
//! [controller]
//! k = 2, 4                  # one value per level; a single value broadcasts
//! r = 5/3
//! ```
//!
//! Parsing runs in two stages: [`RawConfig`] keeps every entry with its line
//! number, then [`ExperimentConfig::from_raw`] applies defaults, validates,
//! and rejects any key it did not consume.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::approximator::RbfNetwork;
use crate::controller::{Controller, ControllerVariant, FilterGains, GainSet};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::math::{SwitchBoundaries, SwitchForm};
use crate::plant::{Disturbance, PendulumParams, PlantKind, PlantModel, ReferenceSignal};

const SECTIONS: [&str; 11] = [
    "plant",
    "reference",
    "controller",
    "learning",
    "observer",
    "filter",
    "switching",
    "network",
    "sim",
    "ablation",
    "output",
];

/// Top-level keys (outside any section).
const TOP_KEYS: [&str; 3] = ["plant", "variant", "reference"];

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq)]
pub struct RawEntry {
    pub value: String,
    pub line: usize,
}

/// Entries keyed by `section.key` (or bare `key` at top level), before
/// defaults and validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, RawEntry>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        let mut section: Option<String> = None;
        for (idx, full) in text.lines().enumerate() {
            let line = idx + 1;
            let body = full.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Parse { line, message: format!("malformed section header `{body}`") })?
                    .trim()
                    .to_ascii_lowercase();
                if !SECTIONS.contains(&name.as_str()) {
                    return Err(Error::Parse { line, message: format!("unknown section [{name}]") });
                }
                section = Some(name);
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, message: format!("expected `key = value`, got `{body}`") })?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(Error::Parse { line, message: "missing key before `=`".into() });
            }
            if value.is_empty() {
                return Err(Error::Parse { line, message: format!("missing value for `{key}`") });
            }
            let full_key = match &section {
                Some(s) => format!("{s}.{key}"),
                None => key,
            };
            raw.insert(full_key, value, line)?;
        }
        Ok(raw)
    }

    fn insert(&mut self, key: String, value: String, line: usize) -> Result<()> {
        if let Some(prev) = self.entries.get(&key) {
            return Err(Error::Parse { line, message: format!("duplicate key `{key}` (first set on line {})", prev.line) });
        }
        self.entries.insert(key, RawEntry { value, line });
        Ok(())
    }

    /// Replaces (or adds) `key`, given as `section.key` or a top-level name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().to_ascii_lowercase();
        match key.split_once('.') {
            Some((sec, _)) if !SECTIONS.contains(&sec) => {
                return Err(Error::Config(format!("unknown section in `{key}`")));
            }
            None if !TOP_KEYS.contains(&key.as_str()) => {
                return Err(Error::Config(format!("`{key}` is not a top-level key; use section.key")));
            }
            _ => {}
        }
        let line = self.entries.get(&key).map_or(0, |e| e.line);
        self.entries.insert(key, RawEntry { value: value.trim().to_string(), line });
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&RawEntry> {
        self.entries.get(key)
    }

    pub fn remove(&mut self, key: &str) -> Option<RawEntry> {
        self.entries.remove(key)
    }
}

/// Gaussian grid shared by every level: level `i` gets `points^i` centers on
/// `[lo, hi]^i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkSpec {
    pub points: usize,
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchSpec {
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    pub order: u32,
    pub form: SwitchForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub dt: f64,
    pub horizon: f64,
    /// Log every `decimation`-th integration step.
    pub decimation: usize,
    /// Settling band on `|ζ_1|`.
    pub band: f64,
    /// Metrics window `[start, end]`.
    pub window: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ablation {
    /// Feed prediction errors into the neural law (`false` forces `β_z = 0`).
    pub composite: bool,
    /// Force `w ≡ 1`.
    pub switching_frozen_on: bool,
}

/// A fully resolved, validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub plant: PlantModel,
    pub initial: Vec<f64>,
    pub reference: ReferenceSignal,
    pub variant: ControllerVariant,
    pub gains: GainSet,
    pub bounds: Vec<Expr>,
    pub network: NetworkSpec,
    pub switching: SwitchSpec,
    pub sim: SimSettings,
    pub ablation: Ablation,
    /// File stem of this run's artifacts.
    pub name: String,
    defaulted: BTreeSet<String>,
}

/// Equality of settings; which keys were defaulted is ignored.
impl PartialEq for ExperimentConfig {
    fn eq(&self, o: &Self) -> bool {
        self.plant == o.plant
            && self.initial == o.initial
            && self.reference == o.reference
            && self.variant == o.variant
            && self.gains == o.gains
            && self.bounds == o.bounds
            && self.network == o.network
            && self.switching == o.switching
            && self.sim == o.sim
            && self.ablation == o.ablation
            && self.name == o.name
    }
}

struct Resolver {
    raw: RawConfig,
    used: BTreeSet<String>,
    defaulted: BTreeSet<String>,
}

impl Resolver {
    fn take(&mut self, key: &str) -> Option<RawEntry> {
        self.used.insert(key.to_string());
        let e = self.raw.entries.get(key).cloned();
        if e.is_none() {
            self.defaulted.insert(key.to_string());
        }
        e
    }

    fn string(&mut self, key: &str, default: &str) -> String {
        self.take(key).map_or_else(|| default.to_string(), |e| e.value)
    }

    fn scalar(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.take(key) {
            None => Ok(default),
            Some(e) => parse_number(&e.value).map_err(|m| Error::Parse { line: e.line, message: format!("{key}: {m}") }),
        }
    }

    fn count(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.take(key) {
            None => Ok(default),
            Some(e) => e
                .value
                .parse::<usize>()
                .map_err(|_| Error::Parse { line: e.line, message: format!("{key}: expected a non-negative integer, got `{}`", e.value) }),
        }
    }

    fn flag(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.take(key) {
            None => Ok(default),
            Some(e) => match e.value.to_ascii_lowercase().as_str() {
                "true" | "on" | "yes" | "1" => Ok(true),
                "false" | "off" | "no" | "0" => Ok(false),
                _ => Err(Error::Parse { line: e.line, message: format!("{key}: expected true or false, got `{}`", e.value) }),
            },
        }
    }

    /// Comma-separated list of length `n`; a single value broadcasts.
    fn list(&mut self, key: &str, n: usize, default: &[f64]) -> Result<Vec<f64>> {
        match self.take(key) {
            None => Ok(default.to_vec()),
            Some(e) => {
                let vals = e
                    .value
                    .split(',')
                    .map(|v| parse_number(v.trim()))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|m| Error::Parse { line: e.line, message: format!("{key}: {m}") })?;
                broadcast(vals, n).ok_or_else(|| Error::Parse {
                    line: e.line,
                    message: format!("{key}: expected 1 or {n} values, got {}", e.value.split(',').count()),
                })
            }
        }
    }

    fn exprs(&mut self, key: &str, n: usize) -> Result<Vec<Expr>> {
        match self.take(key) {
            None => Ok(vec![Expr::constant(1.0); n]),
            Some(e) => {
                let vals = e
                    .value
                    .split(',')
                    .map(Expr::parse)
                    .collect::<Result<Vec<_>>>()
                    .map_err(|err| Error::Parse { line: e.line, message: format!("{key}: {err}") })?;
                broadcast(vals, n).ok_or_else(|| Error::Parse {
                    line: e.line,
                    message: format!("{key}: expected 1 or {n} expressions"),
                })
            }
        }
    }

    fn finish(self) -> Result<BTreeSet<String>> {
        for (key, e) in &self.raw.entries {
            if !self.used.contains(key) {
                return Err(Error::Parse { line: e.line, message: format!("unknown key `{key}`") });
            }
        }
        Ok(self.defaulted)
    }
}

fn broadcast<T: Clone>(vals: Vec<T>, n: usize) -> Option<Vec<T>> {
    match vals.len() {
        1 => Some(vec![vals[0].clone(); n]),
        k if k == n => Some(vals),
        _ => None,
    }
}

/// Number or ratio `a/b`.
fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let bad = || format!("expected a number, got `{s}`");
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            a / b
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

macro_rules! per_level {
    ($res:expr, $gains:expr, $n:expr, $sec:literal, [$($field:ident),*]) => {
        $(
            let defaults: Vec<f64> = $gains.subsystems.iter().map(|s| s.$field).collect();
            let v = $res.list(concat!($sec, ".", stringify!($field)), $n, &defaults)?;
            for (s, x) in $gains.subsystems.iter_mut().zip(v) {
                s.$field = x;
            }
        )*
    };
    (learning $res:expr, $gains:expr, $n:expr, [$($field:ident),*]) => {
        $(
            let defaults: Vec<f64> = $gains.subsystems.iter().map(|s| s.learning.$field).collect();
            let v = $res.list(concat!("learning.", stringify!($field)), $n, &defaults)?;
            for (s, x) in $gains.subsystems.iter_mut().zip(v) {
                s.learning.$field = x;
            }
        )*
    };
}

macro_rules! learning_fields {
    ($m:ident!($($args:tt)*)) => {
        $m!($($args)* [
            beta_h, beta_z, beta_1, beta_2, delta_1, delta_2, delta_3, delta_1n, delta_2n, delta_3n,
            q_1, q_2, q_3, q_1n, q_2n, q_3n, eta, eta_d, eta_n, eta_dn, eta_theta, eta_theta_n
        ])
    };
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_raw(RawConfig::parse(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let mut res = Resolver { raw, used: BTreeSet::new(), defaulted: BTreeSet::new() };

        let variant: ControllerVariant = res.string("variant", "fnt-m1").parse()?;
        let timing = variant.timing;

        let plant_name = res.string("plant", "pendulum").to_ascii_lowercase();
        let n = match plant_name.as_str() {
            "pendulum" | "oracle" => 2,
            "chain" => {
                let n = res.count("plant.order", 2)?;
                if n == 0 {
                    return Err(Error::Config("plant.order must be at least 1".into()));
                }
                n
            }
            other => return Err(Error::Config(format!("unknown plant `{other}` (pendulum, chain, oracle)"))),
        };
        let default_amp: Vec<f64> = if plant_name == "pendulum" { vec![0.0, 0.1] } else { vec![0.0; n] };
        let amp = res.list("plant.d_amplitude", n, &default_amp)?;
        let freq = res.list("plant.d_frequency", n, &vec![2.0; n])?;
        let disturbances: Vec<Disturbance> = amp
            .iter()
            .zip(&freq)
            .map(|(&amplitude, &frequency)| {
                if amplitude == 0.0 {
                    Disturbance::Zero
                } else {
                    Disturbance::Sine { amplitude, frequency }
                }
            })
            .collect();
        let default_initial: Vec<f64> = if plant_name == "pendulum" {
            let mut v = vec![0.0; n];
            v[0] = -0.1;
            v
        } else {
            vec![0.0; n]
        };
        let initial = res.list("plant.initial", n, &default_initial)?;
        let plant = match plant_name.as_str() {
            "pendulum" => {
                let d = PendulumParams::default();
                let params = PendulumParams {
                    g_e: res.scalar("plant.g_e", d.g_e)?,
                    m_c: res.scalar("plant.m_c", d.m_c)?,
                    m_a: res.scalar("plant.m_a", d.m_a)?,
                    l_a: res.scalar("plant.l_a", d.l_a)?,
                };
                if amp[0] != 0.0 {
                    return Err(Error::Config("plant.d_amplitude: the pendulum angle equation has no disturbance".into()));
                }
                PlantModel::pendulum(params, disturbances[1])?
            }
            "chain" => PlantModel::integrator_chain(n, disturbances)?,
            _ => PlantModel::oracle(disturbances)?,
        };

        let ref_name = res.string("reference", "sine").to_ascii_lowercase();
        let reference = match ref_name.as_str() {
            "sine" => ReferenceSignal::Sine {
                amplitude: res.scalar("reference.amplitude", 0.2)?,
                frequency: res.scalar("reference.frequency", 1.0)?,
            },
            "constant" => ReferenceSignal::Constant(res.scalar("reference.value", 0.0)?),
            other => return Err(Error::Config(format!("unknown reference `{other}` (sine, constant)"))),
        };

        let mut gains = GainSet::defaults(n, timing);
        gains.m = res.scalar("controller.m", gains.m)?;
        gains.r = res.scalar("controller.r", gains.r)?;
        gains.g_floor = res.scalar("controller.g_floor", gains.g_floor)?;
        per_level!(res, gains, n, "controller", [k, p, gamma, k1, k2, a, mu, kappa]);
        per_level!(res, gains, n, "observer", [r1, r2]);
        learning_fields!(per_level!(learning res, gains, n,));
        let bounds = res.exprs("controller.bound", n)?;
        let fd = FilterGains::default_for(timing);
        gains.filter = FilterGains {
            omega: res.scalar("filter.omega", fd.omega)?,
            l1: res.scalar("filter.l1", fd.l1)?,
            l2: res.scalar("filter.l2", fd.l2)?,
            m_f: res.scalar("filter.m_f", fd.m_f)?,
            r_f: res.scalar("filter.r_f", fd.r_f)?,
        };

        let switching = SwitchSpec {
            c1: res.list("switching.c1", n, &vec![0.25; n])?,
            c2: res.list("switching.c2", n, &vec![0.35; n])?,
            order: res.count("switching.order", n)? as u32,
            form: res.string("switching.form", SwitchForm::Squared.as_str()).parse()?,
        };
        let network = NetworkSpec {
            points: res.count("network.points", 11)?,
            lo: res.scalar("network.lo", -0.25)?,
            hi: res.scalar("network.hi", 0.25)?,
            width: res.scalar("network.width", 2.0)?,
        };
        let horizon = res.scalar("sim.horizon", 20.0)?;
        let sim = SimSettings {
            dt: res.scalar("sim.dt", 1e-3)?,
            horizon,
            decimation: res.count("sim.decimation", 10)?,
            band: res.scalar("sim.band", 0.05)?,
            window: (res.scalar("sim.window_start", 5.0)?, res.scalar("sim.window_end", horizon.min(20.0))?),
        };
        let ablation = Ablation {
            composite: res.flag("ablation.composite", true)?,
            switching_frozen_on: res.flag("ablation.switching_frozen_on", false)?,
        };
        let name = res.string("output.name", &variant.name());
        let defaulted = res.finish()?;

        let cfg = Self { plant, initial, reference, variant, gains, bounds, network, switching, sim, ablation, name, defaulted };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every cross-field rule; `from_raw` already calls this.
    pub fn validate(&self) -> Result<()> {
        self.gains.validate(self.variant.timing)?;
        let s = &self.sim;
        if !(s.dt > 0.0) {
            return Err(Error::Config("sim.dt must be positive".into()));
        }
        if !(s.horizon >= s.dt) {
            return Err(Error::Config("sim.horizon must be at least one step".into()));
        }
        if s.decimation == 0 {
            return Err(Error::Config("sim.decimation must be at least 1".into()));
        }
        if !(s.band > 0.0) {
            return Err(Error::Config("sim.band must be positive".into()));
        }
        let (a, b) = s.window;
        if !(a >= 0.0 && a < b && b <= s.horizon + 0.5 * s.dt) {
            return Err(Error::Config(format!("sim window [{a}, {b}] must lie inside [0, {}] with start < end", s.horizon)));
        }
        if self.network.points == 0 {
            return Err(Error::Config("network.points must be at least 1".into()));
        }
        if !(self.network.hi > self.network.lo) {
            return Err(Error::Config("network.hi must exceed network.lo".into()));
        }
        if !(self.network.width > 0.0) {
            return Err(Error::Config("network.width must be positive".into()));
        }
        if !(self.switching.order >= 1) {
            return Err(Error::Config("switching.order must be at least 1".into()));
        }
        self.switch_boundaries()?;
        if let ReferenceSignal::Sine { frequency, .. } = self.reference {
            if !(frequency >= 0.0) {
                return Err(Error::Config("reference.frequency must be non-negative".into()));
            }
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::Config("output.name must be a plain file stem".into()));
        }
        // Builds the networks and checks the bound shapes.
        self.controller().map(|_| ())
    }

    pub fn order(&self) -> usize {
        self.plant.order()
    }

    /// Keys that were not present in the source and took their defaults.
    pub fn defaulted(&self) -> &BTreeSet<String> {
        &self.defaulted
    }

    pub fn switch_boundaries(&self) -> Result<Vec<SwitchBoundaries>> {
        let sw = &self.switching;
        sw.c1
            .iter()
            .zip(&sw.c2)
            .enumerate()
            .map(|(k, (&c1, &c2))| {
                SwitchBoundaries::new(c1, c2, sw.order, sw.form)
                    .map_err(|e| Error::Config(format!("switching level {}: {e}", k + 1)))
            })
            .collect()
    }

    pub fn networks(&self) -> Result<Vec<RbfNetwork>> {
        let s = &self.network;
        (1..=self.order()).map(|d| RbfNetwork::grid(d, s.points, s.lo, s.hi, s.width)).collect()
    }

    pub fn controller(&self) -> Result<Controller> {
        Ok(Controller::new(self.variant, self.gains.clone(), self.networks()?, self.switch_boundaries()?, self.bounds.clone())?
            .with_composite(self.ablation.composite)
            .with_switching_frozen_on(self.ablation.switching_frozen_on))
    }

    /// Copy with one key replaced, re-validated.
    pub fn with_override(&self, key: &str, value: &str) -> Result<Self> {
        let mut raw = RawConfig::parse(&self.to_text())?;
        // A defaulted name follows the variant.
        if self.defaulted.contains("output.name") {
            raw.remove("output.name");
        }
        raw.set(key, value)?;
        let mut out = Self::from_raw(raw)?;
        out.defaulted = self.defaulted.clone();
        out.defaulted.remove(&key.trim().to_ascii_lowercase());
        Ok(out)
    }

    /// Canonical text form; parses back to an equal config.
    pub fn to_text(&self) -> String {
        self.render(false)
    }

    /// The canonical text as `#` comment lines, with defaulted values marked.
    /// [`ExperimentConfig::parse_echo`] inverts it.
    pub fn echo_header(&self) -> String {
        let mut out = String::from("# # resolved configuration; `# default` marks values not set in the source\n");
        for line in self.render(true).lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    /// Recovers a config from the leading `#` lines of a run artifact.
    pub fn parse_echo(text: &str) -> Result<Self> {
        let body: String = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .map(|l| {
                let l = &l[1..];
                format!("{}\n", l.strip_prefix(' ').unwrap_or(l))
            })
            .collect();
        Self::parse(&body)
    }

    fn render(&self, mark_defaults: bool) -> String {
        let mut w = Writer { out: String::new(), mark: mark_defaults, defaulted: &self.defaulted };
        w.kv("variant", self.variant.name());
        match self.plant.kind() {
            PlantKind::Pendulum(_) => w.kv("plant", "pendulum"),
            PlantKind::IntegratorChain { .. } => w.kv("plant", "chain"),
            PlantKind::Oracle => w.kv("plant", "oracle"),
        }
        match self.reference {
            ReferenceSignal::Sine { .. } => w.kv("reference", "sine"),
            ReferenceSignal::Constant(_) => w.kv("reference", "constant"),
        }

        w.section("plant");
        match self.plant.kind() {
            PlantKind::Pendulum(p) => {
                w.kv("plant.g_e", p.g_e);
                w.kv("plant.m_c", p.m_c);
                w.kv("plant.m_a", p.m_a);
                w.kv("plant.l_a", p.l_a);
            }
            PlantKind::IntegratorChain { order } => w.kv("plant.order", order),
            PlantKind::Oracle => {}
        }
        w.kv("plant.initial", join(&self.initial));
        let (amp, freq): (Vec<f64>, Vec<f64>) = self
            .plant
            .disturbances()
            .iter()
            .map(|d| match *d {
                Disturbance::Zero => (0.0, 2.0),
                Disturbance::Sine { amplitude, frequency } => (amplitude, frequency),
            })
            .unzip();
        w.kv("plant.d_amplitude", join(&amp));
        w.kv("plant.d_frequency", join(&freq));

        w.section("reference");
        match self.reference {
            ReferenceSignal::Sine { amplitude, frequency } => {
                w.kv("reference.amplitude", amplitude);
                w.kv("reference.frequency", frequency);
            }
            ReferenceSignal::Constant(v) => w.kv("reference.value", v),
        }

        let g = &self.gains;
        let col = |f: &dyn Fn(&crate::controller::SubsystemGains) -> f64| join(&g.subsystems.iter().map(f).collect::<Vec<_>>());
        w.section("controller");
        w.kv("controller.m", g.m);
        w.kv("controller.r", g.r);
        w.kv("controller.g_floor", g.g_floor);
        macro_rules! emit {
            ($sec:literal, [$($field:ident),*]) => {
                $( w.kv(concat!($sec, ".", stringify!($field)), col(&|s| s.$field)); )*
            };
            (learning [$($field:ident),*]) => {
                $( w.kv(concat!("learning.", stringify!($field)), col(&|s| s.learning.$field)); )*
            };
        }
        emit!("controller", [k, p, gamma, k1, k2, a, mu, kappa]);
        w.kv(
            "controller.bound",
            self.bounds.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", "),
        );
        w.section("learning");
        learning_fields!(emit!(learning));
        w.section("observer");
        emit!("observer", [r1, r2]);

        w.section("filter");
        w.kv("filter.omega", g.filter.omega);
        w.kv("filter.l1", g.filter.l1);
        w.kv("filter.l2", g.filter.l2);
        w.kv("filter.m_f", g.filter.m_f);
        w.kv("filter.r_f", g.filter.r_f);

        w.section("switching");
        w.kv("switching.c1", join(&self.switching.c1));
        w.kv("switching.c2", join(&self.switching.c2));
        w.kv("switching.order", self.switching.order);
        w.kv("switching.form", self.switching.form.as_str());

        w.section("network");
        w.kv("network.points", self.network.points);
        w.kv("network.lo", self.network.lo);
        w.kv("network.hi", self.network.hi);
        w.kv("network.width", self.network.width);

        w.section("sim");
        w.kv("sim.dt", self.sim.dt);
        w.kv("sim.horizon", self.sim.horizon);
        w.kv("sim.decimation", self.sim.decimation);
        w.kv("sim.band", self.sim.band);
        w.kv("sim.window_start", self.sim.window.0);
        w.kv("sim.window_end", self.sim.window.1);

        w.section("ablation");
        w.kv("ablation.composite", self.ablation.composite);
        w.kv("ablation.switching_frozen_on", self.ablation.switching_frozen_on);

        w.section("output");
        w.kv("output.name", &self.name);
        w.out
    }
}

struct Writer<'a> {
    out: String,
    mark: bool,
    defaulted: &'a BTreeSet<String>,
}

impl Writer<'_> {
    fn section(&mut self, name: &str) {
        let _ = write!(self.out, "\n[{name}]\n");
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let short = key.rsplit('.').next().unwrap_or(key);
        let _ = write!(self.out, "{short} = {value}");
        if self.mark && self.defaulted.contains(key) {
            self.out.push_str("  # default");
        }
        self.out.push('\n');
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl std::str::FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

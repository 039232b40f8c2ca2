//! Scenario configuration: strict JSON parsing and physical validation.
//!
//! Parsing runs in two passes. The envelope (`scenario`, `params`,
//! `outputs`, `formats`) is read first; `params` is then decoded into the
//! struct of the selected scenario. Both passes reject unknown keys and
//! report JSON paths. Physical checks run last, still before any compute.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    KdvTransport,
    KdvCertify,
    TodaN3,
    TodaSoliton,
    SpinSpectrum,
    SpinTransfer,
    InverseEngineering,
    Nonisospectral,
    VerifyAll,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::KdvTransport => "kdv_transport",
            ScenarioKind::KdvCertify => "kdv_certify",
            ScenarioKind::TodaN3 => "toda_n3",
            ScenarioKind::TodaSoliton => "toda_soliton",
            ScenarioKind::SpinSpectrum => "spin_spectrum",
            ScenarioKind::SpinTransfer => "spin_transfer",
            ScenarioKind::InverseEngineering => "inverse_engineering",
            ScenarioKind::Nonisospectral => "nonisospectral",
            ScenarioKind::VerifyAll => "verify_all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// One violation, addressed by a JSON path such as `$.params.grid.n_points`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub path: String,
    /// `syntax`, `schema`, `physics` or `io`.
    pub kind: &'static str,
    pub message: String,
}

#[derive(Default)]
pub struct Diagnostics(Vec<Diagnostic>);

impl Diagnostics {
    pub fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(Diagnostic { path: path.into(), kind: "physics", message: message.into() });
    }

    fn positive(&mut self, path: &str, v: f64) {
        if !(v > 0.0 && v.is_finite()) {
            self.push(path, format!("must be a positive finite number, got {v}"));
        }
    }

    fn finite(&mut self, path: &str, v: f64) {
        if !v.is_finite() {
            self.push(path, format!("must be finite, got {v}"));
        }
    }

    fn window(&mut self, path: &str, t0: f64, t1: f64) {
        if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
            self.push(path, format!("time window needs t_start < t_end, got [{t0}, {t1}]"));
        }
    }

    pub fn into_vec(self) -> Vec<Diagnostic> {
        self.0
    }
}

// ---------------------------------------------------------------- params

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl GridParams {
    fn new(x_min: f64, x_max: f64, n_points: usize) -> Self {
        Self { x_min, x_max, n_points }
    }

    fn validate(&self, path: &str, d: &mut Diagnostics) {
        if !(self.x_max > self.x_min) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            d.push(format!("{path}.x_max"), format!("needs x_min < x_max, got [{}, {}]", self.x_min, self.x_max));
        }
        if self.n_points < 16 || !self.n_points.is_power_of_two() {
            d.push(format!("{path}.n_points"), format!("must be a power of two ≥ 16, got {}", self.n_points));
        }
    }
}

pub type Tolerances = BTreeMap<String, f64>;

fn validate_solitons(kappas: &[f64], amps: &[f64], path: &str, d: &mut Diagnostics) {
    if kappas.is_empty() || kappas.len() > 2 {
        d.push(format!("{path}.kappas"), "one or two decay rates required");
        return;
    }
    if kappas.len() != amps.len() {
        d.push(format!("{path}.amps"), format!("{} amplitudes for {} decay rates", amps.len(), kappas.len()));
        return;
    }
    for (i, &k) in kappas.iter().enumerate() {
        d.positive(&format!("{path}.kappas[{i}]"), k);
    }
    for (i, &a) in amps.iter().enumerate() {
        d.positive(&format!("{path}.amps[{i}]"), a);
    }
    if kappas.len() == 2 && kappas[0] == kappas[1] {
        d.push(format!("{path}.kappas"), format!("degenerate soliton: κ1 = κ2 = {}", kappas[0]));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KdvTransportParams {
    pub kappas: Vec<f64>,
    pub amps: Vec<f64>,
    pub grid: GridParams,
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    pub snapshots: usize,
    /// `vanishing` or `offset`.
    pub convention: String,
    pub drop_constants: bool,
    /// Also propagate in the operator frame and compare densities.
    pub operator_frame: bool,
    pub operator_dt: f64,
    pub tolerances: Tolerances,
}

impl Default for KdvTransportParams {
    fn default() -> Self {
        Self {
            kappas: vec![1.2, 1.0],
            amps: vec![3.0, 3.0],
            grid: GridParams::new(-40.0, 40.0, 1024),
            t_start: -2.0,
            t_end: 2.0,
            dt: 1e-3,
            snapshots: 5,
            convention: "vanishing".into(),
            drop_constants: false,
            operator_frame: true,
            operator_dt: 5e-4,
            tolerances: Tolerances::new(),
        }
    }
}

impl KdvTransportParams {
    fn validate(&self, d: &mut Diagnostics) {
        validate_solitons(&self.kappas, &self.amps, "$.params", d);
        if self.kappas.len() != 2 {
            d.push("$.params.kappas", "transport with V_cd needs a two-soliton potential");
        }
        self.grid.validate("$.params.grid", d);
        d.window("$.params.t_end", self.t_start, self.t_end);
        d.positive("$.params.dt", self.dt);
        d.positive("$.params.operator_dt", self.operator_dt);
        if self.snapshots < 2 {
            d.push("$.params.snapshots", "at least two snapshots (start and end)");
        }
        if !["vanishing", "offset"].contains(&self.convention.as_str()) {
            d.push("$.params.convention", format!("expected `vanishing` or `offset`, got `{}`", self.convention));
        } else if self.convention == "vanishing" && self.drop_constants {
            d.push("$.params.drop_constants", "the vanishing convention already removes the constants");
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KdvCertifyParams {
    pub kappas: Vec<f64>,
    pub amps: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub x_range: [f64; 2],
    pub t_range: [f64; 2],
    pub grid: GridParams,
    pub t_certify: f64,
    pub fifth_kappas: Vec<f64>,
    /// Time of the exported field snapshot.
    pub export_t: f64,
    pub export_grid: GridParams,
    pub tolerances: Tolerances,
}

impl Default for KdvCertifyParams {
    fn default() -> Self {
        Self {
            kappas: vec![1.2, 1.0],
            amps: vec![3.0, 3.0],
            samples: 10_000,
            seed: 2024,
            x_range: [-10.0, 10.0],
            t_range: [-2.0, 2.0],
            grid: GridParams::new(-20.0, 20.0, 512),
            t_certify: 0.3,
            fifth_kappas: vec![0.5, 1.0, 1.3],
            export_t: 0.0,
            export_grid: GridParams::new(-20.0, 20.0, 256),
            tolerances: Tolerances::new(),
        }
    }
}

impl KdvCertifyParams {
    fn validate(&self, d: &mut Diagnostics) {
        validate_solitons(&self.kappas, &self.amps, "$.params", d);
        if self.samples == 0 {
            d.push("$.params.samples", "at least one sample point");
        }
        d.window("$.params.x_range", self.x_range[0], self.x_range[1]);
        d.window("$.params.t_range", self.t_range[0], self.t_range[1]);
        self.grid.validate("$.params.grid", d);
        self.export_grid.validate("$.params.export_grid", d);
        d.finite("$.params.t_certify", self.t_certify);
        d.finite("$.params.export_t", self.export_t);
        for (i, &k) in self.fifth_kappas.iter().enumerate() {
            d.positive(&format!("$.params.fifth_kappas[{i}]"), k);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TodaN3Params {
    pub v1: f64,
    pub v2: f64,
    /// Trace window; `t_end` defaults to 20/v when absent.
    pub t_end: Option<f64>,
    pub dt: f64,
    pub record_every: usize,
    pub moser_instances: usize,
    pub moser_seed: u64,
    pub tolerances: Tolerances,
}

impl Default for TodaN3Params {
    fn default() -> Self {
        Self {
            v1: 1.0,
            v2: 2.0,
            t_end: None,
            dt: 1e-3,
            record_every: 100,
            moser_instances: 8,
            moser_seed: 17,
            tolerances: Tolerances::new(),
        }
    }
}

impl TodaN3Params {
    fn validate(&self, d: &mut Diagnostics) {
        d.positive("$.params.v1", self.v1);
        d.positive("$.params.v2", self.v2);
        if let Some(t) = self.t_end {
            d.positive("$.params.t_end", t);
        }
        d.positive("$.params.dt", self.dt);
        if self.record_every == 0 {
            d.push("$.params.record_every", "must be ≥ 1");
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TodaSolitonSpec {
    pub kappa: f64,
    /// `ln c0`; the soliton sits near site `ln c0 / κ` at t = 0.
    pub log_c0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TodaSolitonParams {
    pub sites: usize,
    pub solitons: Vec<TodaSolitonSpec>,
    pub t_end: f64,
    pub dt: f64,
    pub record_every: usize,
    pub tolerances: Tolerances,
}

impl Default for TodaSolitonParams {
    fn default() -> Self {
        Self {
            sites: 50,
            solitons: vec![TodaSolitonSpec { kappa: 1.0, log_c0: 15.0 }],
            t_end: 4.0,
            dt: 1e-3,
            record_every: 100,
            tolerances: Tolerances::new(),
        }
    }
}

impl TodaSolitonParams {
    fn validate(&self, d: &mut Diagnostics) {
        if self.sites < 3 {
            d.push("$.params.sites", format!("need at least 3 sites, got {}", self.sites));
        }
        if self.solitons.is_empty() || self.solitons.len() > 2 {
            d.push("$.params.solitons", "one or two solitons");
        }
        for (i, s) in self.solitons.iter().enumerate() {
            d.positive(&format!("$.params.solitons[{i}].kappa"), s.kappa);
            d.finite(&format!("$.params.solitons[{i}].log_c0"), s.log_c0);
        }
        d.positive("$.params.t_end", self.t_end);
        d.positive("$.params.dt", self.dt);
        if self.record_every == 0 {
            d.push("$.params.record_every", "must be ≥ 1");
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpinSpectrumParams {
    pub kappa: f64,
    pub sites: usize,
    pub log_c0: f64,
    pub times: Vec<f64>,
    pub band_gap: f64,
    /// Chain length of the pairwise-sum cross-check against the dense lift.
    pub pairwise_sites: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for SpinSpectrumParams {
    fn default() -> Self {
        Self {
            kappa: 2.0,
            sites: 100,
            log_c0: 90.0,
            times: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            band_gap: 0.1,
            pairwise_sites: 10,
            seed: 5,
            tolerances: Tolerances::new(),
        }
    }
}

impl SpinSpectrumParams {
    fn validate(&self, d: &mut Diagnostics) {
        d.positive("$.params.kappa", self.kappa);
        if self.sites < 3 || self.sites > 400 {
            d.push("$.params.sites", format!("supported range 3..=400, got {}", self.sites));
        }
        d.finite("$.params.log_c0", self.log_c0);
        if self.times.len() < 2 {
            d.push("$.params.times", "at least two times to measure drift");
        }
        for (i, &t) in self.times.iter().enumerate() {
            d.finite(&format!("$.params.times[{i}]"), t);
        }
        d.positive("$.params.band_gap", self.band_gap);
        if !(2..=12).contains(&self.pairwise_sites) {
            d.push("$.params.pairwise_sites", "dense cross-check supports 2..=12 sites");
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpinTransferParams {
    pub kappa: f64,
    pub sites: usize,
    pub log_c0: f64,
    pub t_end: f64,
    pub dt: f64,
    /// Time compression of the no-CD control run.
    pub compression: f64,
    pub record_every: usize,
    pub tolerances: Tolerances,
}

impl Default for SpinTransferParams {
    fn default() -> Self {
        Self {
            kappa: 1.0,
            sites: 60,
            log_c0: 15.0,
            t_end: 20.0,
            dt: 0.02,
            compression: 10.0,
            record_every: 10,
            tolerances: Tolerances::new(),
        }
    }
}

impl SpinTransferParams {
    fn validate(&self, d: &mut Diagnostics) {
        d.positive("$.params.kappa", self.kappa);
        if self.sites < 3 {
            d.push("$.params.sites", "need at least 3 sites");
        }
        d.finite("$.params.log_c0", self.log_c0);
        d.positive("$.params.t_end", self.t_end);
        d.positive("$.params.dt", self.dt);
        if !(self.compression >= 1.0) {
            d.push("$.params.compression", "compression factor must be ≥ 1");
        }
        if self.record_every == 0 {
            d.push("$.params.record_every", "must be ≥ 1");
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaFixtureParams {
    pub a0: Vec<f64>,
    pub c0: Vec<f64>,
    pub g0: f64,
    pub tau: f64,
    pub steps: usize,
    pub samples: usize,
}

impl Default for AlphaFixtureParams {
    fn default() -> Self {
        Self {
            a0: vec![0.8, 1.1, 0.6, 0.9],
            c0: vec![0.5, -0.2, 0.1, 0.7, -0.4],
            g0: 0.7,
            tau: 2.0,
            steps: 2000,
            samples: 11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InverseEngineeringParams {
    pub v1: f64,
    pub v2: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    pub alpha_fixture: AlphaFixtureParams,
    pub tolerances: Tolerances,
}

impl Default for InverseEngineeringParams {
    fn default() -> Self {
        Self {
            v1: 1.0,
            v2: 0.7,
            t_start: -2.0,
            t_end: 3.0,
            samples: 21,
            alpha_fixture: AlphaFixtureParams::default(),
            tolerances: Tolerances::new(),
        }
    }
}

impl InverseEngineeringParams {
    fn validate(&self, d: &mut Diagnostics) {
        d.positive("$.params.v1", self.v1);
        d.positive("$.params.v2", self.v2);
        d.window("$.params.t_end", self.t_start, self.t_end);
        if self.samples < 2 {
            d.push("$.params.samples", "at least two samples");
        }
        let f = &self.alpha_fixture;
        if f.c0.len() < 2 || f.a0.len() + 1 != f.c0.len() {
            d.push("$.params.alpha_fixture.a0", "need N − 1 couplings for N fields (N ≥ 2)");
        }
        for (i, &a) in f.a0.iter().enumerate() {
            d.positive(&format!("$.params.alpha_fixture.a0[{i}]"), a);
        }
        d.finite("$.params.alpha_fixture.g0", f.g0);
        d.positive("$.params.alpha_fixture.tau", f.tau);
        if f.steps == 0 {
            d.push("$.params.alpha_fixture.steps", "must be ≥ 1");
        }
        if f.samples < 2 {
            d.push("$.params.alpha_fixture.samples", "at least two samples");
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaParams {
    /// `constant`, `linear` (γ = g0 + rate·t) or `exponential` (γ = g0·e^{rate·t}).
    pub profile: String,
    pub g0: f64,
    pub rate: f64,
}

impl GammaParams {
    fn validate(&self, path: &str, d: &mut Diagnostics) {
        if !["constant", "linear", "exponential"].contains(&self.profile.as_str()) {
            d.push(format!("{path}.profile"), format!("unknown profile `{}`", self.profile));
        }
        d.positive(&format!("{path}.g0"), self.g0);
        d.finite(&format!("{path}.rate"), self.rate);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonisospectralParams {
    pub gamma: GammaParams,
    pub omega: f64,
    pub grid: GridParams,
    pub times: Vec<f64>,
    pub levels: usize,
    /// `ε(t)` hook: constant shift of the CD term (invisible in the residual).
    pub epsilon: f64,
    pub soliton_kappas: Vec<f64>,
    pub soliton_amps: Vec<f64>,
    pub soliton_gamma: GammaParams,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for NonisospectralParams {
    fn default() -> Self {
        Self {
            gamma: GammaParams { profile: "linear".into(), g0: 1.0, rate: 0.1 },
            omega: 1.0,
            grid: GridParams::new(-20.0, 20.0, 256),
            times: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            levels: 4,
            epsilon: 0.0,
            soliton_kappas: vec![1.2, 1.0],
            soliton_amps: vec![3.0, 3.0],
            soliton_gamma: GammaParams { profile: "exponential".into(), g0: 1.0, rate: 0.1 },
            samples: 500,
            seed: 31,
            tolerances: Tolerances::new(),
        }
    }
}

impl NonisospectralParams {
    fn validate(&self, d: &mut Diagnostics) {
        self.gamma.validate("$.params.gamma", d);
        self.soliton_gamma.validate("$.params.soliton_gamma", d);
        d.positive("$.params.omega", self.omega);
        self.grid.validate("$.params.grid", d);
        if self.times.len() < 2 {
            d.push("$.params.times", "at least two times");
        }
        for (i, &t) in self.times.iter().enumerate() {
            d.finite(&format!("$.params.times[{i}]"), t);
            let g = gamma_at(&self.gamma, t);
            if !(g > 0.0) {
                d.push(format!("$.params.times[{i}]"), format!("γ({t}) = {g} is not positive"));
            }
        }
        if self.levels == 0 {
            d.push("$.params.levels", "must be ≥ 1");
        }
        d.finite("$.params.epsilon", self.epsilon);
        validate_solitons(&self.soliton_kappas, &self.soliton_amps, "$.params.soliton", d);
        if self.samples == 0 {
            d.push("$.params.samples", "at least one sample");
        }
    }
}

pub fn gamma_at(g: &GammaParams, t: f64) -> f64 {
    match g.profile.as_str() {
        "linear" => g.g0 + g.rate * t,
        "exponential" => g.g0 * (g.rate * t).exp(),
        _ => g.g0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyAllParams {
    /// Skip the operator-frame transport comparison (the slowest suite).
    pub skip_operator_frame: bool,
    pub tolerances: Tolerances,
}

impl Default for VerifyAllParams {
    fn default() -> Self {
        Self { skip_operator_frame: false, tolerances: Tolerances::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    KdvTransport(KdvTransportParams),
    KdvCertify(KdvCertifyParams),
    TodaN3(TodaN3Params),
    TodaSoliton(TodaSolitonParams),
    SpinSpectrum(SpinSpectrumParams),
    SpinTransfer(SpinTransferParams),
    InverseEngineering(InverseEngineeringParams),
    Nonisospectral(NonisospectralParams),
    VerifyAll(VerifyAllParams),
}

impl Params {
    pub fn tolerances(&self) -> &Tolerances {
        match self {
            Params::KdvTransport(p) => &p.tolerances,
            Params::KdvCertify(p) => &p.tolerances,
            Params::TodaN3(p) => &p.tolerances,
            Params::TodaSoliton(p) => &p.tolerances,
            Params::SpinSpectrum(p) => &p.tolerances,
            Params::SpinTransfer(p) => &p.tolerances,
            Params::InverseEngineering(p) => &p.tolerances,
            Params::Nonisospectral(p) => &p.tolerances,
            Params::VerifyAll(p) => &p.tolerances,
        }
    }

    fn validate(&self, d: &mut Diagnostics) {
        match self {
            Params::KdvTransport(p) => p.validate(d),
            Params::KdvCertify(p) => p.validate(d),
            Params::TodaN3(p) => p.validate(d),
            Params::TodaSoliton(p) => p.validate(d),
            Params::SpinSpectrum(p) => p.validate(d),
            Params::SpinTransfer(p) => p.validate(d),
            Params::InverseEngineering(p) => p.validate(d),
            Params::Nonisospectral(p) => p.validate(d),
            Params::VerifyAll(_) => {}
        }
        for (name, &v) in self.tolerances() {
            if !(v >= 0.0 && v.is_finite()) {
                d.push(format!("$.params.tolerances.{name}"), format!("tolerance must be finite and ≥ 0, got {v}"));
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    scenario: ScenarioKind,
    #[serde(default)]
    params: Option<Value>,
    #[serde(default)]
    outputs: Option<PathBuf>,
    #[serde(default)]
    formats: Option<Vec<Format>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub params: Params,
    pub outputs: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl ScenarioConfig {
    pub fn format(&self) -> Format {
        let (mut csv, mut json) = (false, false);
        for f in &self.formats {
            csv |= f.csv();
            json |= f.json();
        }
        match (csv, json) {
            (true, false) => Format::Csv,
            (false, true) => Format::Json,
            _ => Format::Both,
        }
    }
}

fn schema_error<E: std::fmt::Display>(prefix: &str, err: serde_path_to_error::Error<E>) -> Diagnostic {
    let inner = err.path().to_string();
    let path = match (prefix, inner.as_str()) {
        (p, ".") => p.to_string(),
        (p, i) => format!("{p}.{i}"),
    };
    Diagnostic { path, kind: "schema", message: err.into_inner().to_string() }
}

fn decode<P: DeserializeOwned>(v: Value) -> Result<P, Diagnostic> {
    serde_path_to_error::deserialize(v).map_err(|e| schema_error("$.params", e))
}

/// Parses and validates a configuration. Returns every violation found.
pub fn parse(text: &str) -> Result<ScenarioConfig, Vec<Diagnostic>> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        vec![Diagnostic {
            path: "$".into(),
            kind: "syntax",
            message: format!("{e}"),
        }]
    })?;
    let env: Envelope = serde_path_to_error::deserialize(value).map_err(|e| vec![schema_error("$", e)])?;
    let params_value = match env.params {
        None | Some(Value::Null) => Value::Object(Default::default()),
        Some(v) => v,
    };
    let params = match env.scenario {
        ScenarioKind::KdvTransport => decode(params_value).map(Params::KdvTransport),
        ScenarioKind::KdvCertify => decode(params_value).map(Params::KdvCertify),
        ScenarioKind::TodaN3 => decode(params_value).map(Params::TodaN3),
        ScenarioKind::TodaSoliton => decode(params_value).map(Params::TodaSoliton),
        ScenarioKind::SpinSpectrum => decode(params_value).map(Params::SpinSpectrum),
        ScenarioKind::SpinTransfer => decode(params_value).map(Params::SpinTransfer),
        ScenarioKind::InverseEngineering => decode(params_value).map(Params::InverseEngineering),
        ScenarioKind::Nonisospectral => decode(params_value).map(Params::Nonisospectral),
        ScenarioKind::VerifyAll => decode(params_value).map(Params::VerifyAll),
    }
    .map_err(|d| vec![d])?;
    let mut diags = Diagnostics::default();
    params.validate(&mut diags);
    let known = crate::scenarios::check_names(env.scenario);
    for name in params.tolerances().keys() {
        if !known.iter().any(|k| k == name) {
            diags.0.push(Diagnostic {
                path: format!("$.params.tolerances.{name}"),
                kind: "schema",
                message: format!("unknown check `{name}`; known: {}", known.join(", ")),
            });
        }
    }
    let diags = diags.into_vec();
    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(ScenarioConfig {
        scenario: env.scenario,
        params,
        outputs: env.outputs,
        formats: env.formats.unwrap_or_else(|| vec![Format::Both]),
    })
}

pub fn load(path: &Path) -> Result<ScenarioConfig, Vec<Diagnostic>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        vec![Diagnostic {
            path: "$".into(),
            kind: "io",
            message: format!("cannot read {}: {e}", path.display()),
        }]
    })?;
    parse(&text)
}

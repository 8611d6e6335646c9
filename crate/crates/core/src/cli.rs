//! Configuration, the registry of checks, and reports for the `sklyanin`
//! binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::geometry::{
    branch_cross_ratio_check, gamma_act, singular_quadric_report, translation_evidence, CurveE, GeometryError,
};
use crate::ncalg::{NcTensor, QuadAlgebra};
use crate::pointscheme::{
    build_point_family, four_quadrics_independence, minors_check, sigma, verify_point_scheme, PointFamily,
};
use crate::repmodules::{
    degree_one_annihilation, expected_theta_constants, fat_point_span_check, line_forms_q, line_forms_qtilde,
    line_module_dims, point_module_witness, qtilde_forms, random_forms, theta_constant, verify_equivariant_table,
    verify_line_module, Unit4,
};
use crate::scalars::{FieldElem, Rat};
use crate::sklyanin::{
    central_elements, derived_constants, make_params, q_relations, qtilde_relations, CentralElement, Params,
    SklyaninError,
};
use crate::twist::{
    cocycle_from_matrix_basis, mu2_cohomology, quaternion_basis, torsor_report, twist_algebra, twist_element,
    CharacterAssignment, Cocycle2, GradingGroup, SWAP_ACTION, SIGN_COCYCLE,
};

pub const MAX_DEGREE_LIMIT: usize = 5;
pub const MAX_TORSOR_N: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown configuration key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}")]
    InvalidValue { key: String, value: String },
    #[error("max_degree must be at most {MAX_DEGREE_LIMIT}, got {0}")]
    MaxDegree(usize),
    #[error("samples must be at least 1")]
    Samples,
    #[error("torsor order must lie in 2..={MAX_TORSOR_N}, got {0}")]
    TorsorOrder(usize),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error(transparent)]
    Params(#[from] SklyaninError),
    #[error("curve construction failed: {0}")]
    Curve(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Markdown,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Markdown),
            _ => Err(format!("unknown format {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub alpha: Rat,
    pub beta: Rat,
    pub max_degree: usize,
    pub samples: usize,
    /// Explicit `x_0` values for sampling `E`; chosen automatically if empty.
    pub seeds: Vec<Rat>,
    /// Seed of the generator for random points and forms.
    pub rng_seed: u64,
    pub format: Format,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            alpha: Rat::from_int(2),
            beta: Rat::from_int(3),
            max_degree: 4,
            samples: 5,
            seeds: Vec::new(),
            rng_seed: 7,
            format: Format::Json,
        }
    }
}

fn invalid(key: &str, value: &str) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
    }
}

impl Config {
    /// Parse `key = value` lines; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut c = Config::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: n + 1,
                text: raw.to_string(),
            })?;
            c.set(k.trim(), v.trim())?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let rat = |v: &str| v.parse::<Rat>().map_err(|_| invalid(key, v));
        let nat = |v: &str| v.parse::<usize>().map_err(|_| invalid(key, v));
        match key {
            "alpha" => self.alpha = rat(value)?,
            "beta" => self.beta = rat(value)?,
            "max_degree" => self.max_degree = nat(value)?,
            "samples" => self.samples = nat(value)?,
            "seed" => self.rng_seed = value.parse().map_err(|_| invalid(key, value))?,
            "format" => self.format = value.parse().map_err(|_| invalid(key, value))?,
            "seeds" => {
                self.seeds = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(rat)
                    .collect::<Result<_, _>>()?
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.max_degree > MAX_DEGREE_LIMIT {
            return Err(ConfigError::MaxDegree(self.max_degree));
        }
        if self.samples == 0 {
            return Err(ConfigError::Samples);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HilbertTarget {
    Q,
    Qtilde,
    Btilde,
    KoszulDual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Command {
    Params,
    Hilbert(HilbertTarget),
    Center,
    Twist,
    Points,
    Curve,
    Lines,
    Fatpoints,
    Cohomology,
    Torsor(usize),
    VerifyAll,
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Params => "params".into(),
            Command::Hilbert(t) => format!(
                "hilbert {}",
                match t {
                    HilbertTarget::Q => "q",
                    HilbertTarget::Qtilde => "qtilde",
                    HilbertTarget::Btilde => "btilde",
                    HilbertTarget::KoszulDual => "koszul-dual",
                }
            ),
            Command::Center => "center".into(),
            Command::Twist => "twist".into(),
            Command::Points => "points".into(),
            Command::Curve => "curve".into(),
            Command::Lines => "lines".into(),
            Command::Fatpoints => "fatpoints".into(),
            Command::Cohomology => "cohomology".into(),
            Command::Torsor(n) => format!("torsor --n {n}"),
            Command::VerifyAll => "verify-all".into(),
        }
    }
}

/// A registered check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckId {
    Params,
    HilbertQ,
    HilbertQtilde,
    HilbertBtilde,
    BtildeZeroSquares,
    KoszulQ,
    KoszulQtilde,
    CenterQ,
    CenterQtilde,
    TwistCocycle,
    TwistRelations,
    TwistDouble,
    TwistCentral,
    PointScheme,
    PointMinors,
    PointModules,
    ThetaConstants,
    FourQuadrics,
    CurveSamples,
    CurveQuadrics,
    CurveTranslation,
    CurveSigma,
    CrossRatio,
    Lines(usize),
    LinesRandom,
    Equivariant,
    FatPoints,
    Cohomology,
    Torsor(usize),
}

impl CheckId {
    pub fn key(&self) -> String {
        match self {
            CheckId::Params => "params".into(),
            CheckId::HilbertQ => "hilbert.q".into(),
            CheckId::HilbertQtilde => "hilbert.qtilde".into(),
            CheckId::HilbertBtilde => "hilbert.btilde".into(),
            CheckId::BtildeZeroSquares => "btilde.zero-squares".into(),
            CheckId::KoszulQ => "koszul.q".into(),
            CheckId::KoszulQtilde => "koszul.qtilde".into(),
            CheckId::CenterQ => "center.q".into(),
            CheckId::CenterQtilde => "center.qtilde".into(),
            CheckId::TwistCocycle => "twist.cocycle".into(),
            CheckId::TwistRelations => "twist.relations".into(),
            CheckId::TwistDouble => "twist.double".into(),
            CheckId::TwistCentral => "twist.central".into(),
            CheckId::PointScheme => "points.scheme".into(),
            CheckId::PointMinors => "points.minors".into(),
            CheckId::PointModules => "points.modules".into(),
            CheckId::ThetaConstants => "points.theta-constants".into(),
            CheckId::FourQuadrics => "points.four-quadrics".into(),
            CheckId::CurveSamples => "curve.samples".into(),
            CheckId::CurveQuadrics => "curve.quadrics".into(),
            CheckId::CurveTranslation => "curve.translation".into(),
            CheckId::CurveSigma => "curve.sigma".into(),
            CheckId::CrossRatio => "curve.cross-ratio".into(),
            CheckId::Lines(i) => format!("lines.xi{i}"),
            CheckId::LinesRandom => "lines.random".into(),
            CheckId::Equivariant => "lines.equivariant".into(),
            CheckId::FatPoints => "fatpoints".into(),
            CheckId::Cohomology => "cohomology".into(),
            CheckId::Torsor(n) => format!("torsor.n{n}"),
        }
    }

    pub fn claim(&self) -> String {
        match self {
            CheckId::Params => "α + β + γ + αβγ = 0 with α, β, γ ∉ {0, ±1}; μ, ν, λ well defined".into(),
            CheckId::HilbertQ => "dim Q_n = (n+3 choose 3)".into(),
            CheckId::HilbertQtilde => "dim Q̃_n = (n+3 choose 3)".into(),
            CheckId::HilbertBtilde => "dim B̃_n = 1, 4, 8, 12, 16, ...".into(),
            CheckId::BtildeZeroSquares => "(y0 - y1 - y2 - y3)² and its Γ-translates vanish in B̃, so B̃ is not a domain".into(),
            CheckId::KoszulQ => "dim Q^!_n = 1, 4, 6, 4, 1, 0 and the Koszul convolution identity".into(),
            CheckId::KoszulQtilde => "dim Q̃^!_n = 1, 4, 6, 4, 1, 0 and the Koszul convolution identity".into(),
            CheckId::CenterQ => "Ω and Ω' are central in Q".into(),
            CheckId::CenterQtilde => "Θ and Θ' are central in Q̃".into(),
            CheckId::TwistCocycle => "the quaternion basis gives a normalized 2-cocycle on the Klein group".into(),
            CheckId::TwistRelations => "twisting the relations of Q gives the relations of Q̃".into(),
            CheckId::TwistDouble => "twisting Q̃ by the same cocycle recovers Q".into(),
            CheckId::TwistCentral => "Ω ↦ -Θ and Ω' ↦ -Θ' under the twist".into(),
            CheckId::PointScheme => "M(u) has rank 3 with kernel θ(u) on the 20 points, rank 4 elsewhere".into(),
            CheckId::PointMinors => "the 15 maximal minors vanish on the family and span the factored list".into(),
            CheckId::PointModules => "θ^n(u) defines a point module at each of the 20 points".into(),
            CheckId::ThetaConstants => "Θ acts on the point modules by 1, 4, (β-1)(γ+1), (α+1)(γ-1), (α-1)(β+1)".into(),
            CheckId::FourQuadrics => "the four quadrics cutting out the family are independent".into(),
            CheckId::CurveSamples => "sampled points lie on E with at most one vanishing coordinate".into(),
            CheckId::CurveQuadrics => "the four singular quadrics lie in the pencil with vertices e_i".into(),
            CheckId::CurveTranslation => "the line through ⊖p and γ_i(p) lies on Q_i and four translates are coplanar".into(),
            CheckId::CurveSigma => "σ maps E to E and commutes with Γ".into(),
            CheckId::CrossRatio => "the branch points of the projection have the cross-ratio orbit of λ".into(),
            CheckId::Lines(i) => format!("the ξ_{i} forms over Q̃ define line modules"),
            CheckId::LinesRandom => "random pairs of forms do not define line modules".into(),
            CheckId::Equivariant => "the frame φ_1, φ_2, φ_3 is Γ-equivariant and a Klein four-group".into(),
            CheckId::FatPoints => "x_j(p_n) q_j v span k² along the σ-orbit".into(),
            CheckId::Cohomology => "|Z¹| = 4, |B¹| = 2, |H¹| = 2 and f is a non-trivial class".into(),
            CheckId::Torsor(n) => format!("M_{n}(k) is strongly graded by the clock and shift matrices"),
        }
    }

    pub fn for_command(cmd: Command) -> Vec<CheckId> {
        use CheckId::*;
        match cmd {
            Command::Params => vec![Params],
            Command::Hilbert(HilbertTarget::Q) => vec![HilbertQ],
            Command::Hilbert(HilbertTarget::Qtilde) => vec![HilbertQtilde],
            Command::Hilbert(HilbertTarget::Btilde) => vec![HilbertBtilde, BtildeZeroSquares],
            Command::Hilbert(HilbertTarget::KoszulDual) => vec![KoszulQ, KoszulQtilde],
            Command::Center => vec![CenterQ, CenterQtilde],
            Command::Twist => vec![TwistCocycle, TwistRelations, TwistDouble, TwistCentral],
            Command::Points => vec![PointScheme, PointMinors, PointModules, ThetaConstants, FourQuadrics],
            Command::Curve => vec![CurveSamples, CurveQuadrics, CurveTranslation, CurveSigma, CrossRatio],
            Command::Lines => vec![Lines(1), Lines(2), Lines(3), LinesRandom, Equivariant],
            Command::Fatpoints => vec![FatPoints],
            Command::Cohomology => vec![Cohomology],
            Command::Torsor(n) => vec![Torsor(n)],
            Command::VerifyAll => {
                let mut all = Vec::new();
                for c in [
                    Command::Params,
                    Command::Hilbert(HilbertTarget::Q),
                    Command::Hilbert(HilbertTarget::Qtilde),
                    Command::Hilbert(HilbertTarget::Btilde),
                    Command::Hilbert(HilbertTarget::KoszulDual),
                    Command::Center,
                    Command::Twist,
                    Command::Points,
                    Command::Curve,
                    Command::Lines,
                    Command::Fatpoints,
                    Command::Cohomology,
                    Command::Torsor(2),
                    Command::Torsor(3),
                ] {
                    all.extend(CheckId::for_command(c));
                }
                all
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub claim: String,
    pub status: Status,
    pub witness: Value,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub alpha: Rat,
    pub beta: Rat,
    pub gamma: Rat,
    pub max_degree: usize,
    pub samples: usize,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// The report with timings zeroed, for comparing runs.
    pub fn without_timings(&self) -> Report {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.elapsed_ms = 0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Report> {
        serde_json::from_str(s)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# sklyanin {}\n", self.command);
        let _ = writeln!(
            s,
            "α = {}, β = {}, γ = {}, max degree {}, {} samples\n",
            self.alpha, self.beta, self.gamma, self.max_degree, self.samples
        );
        let _ = writeln!(s, "| check | status | claim | ms |");
        let _ = writeln!(s, "|---|---|---|---|");
        for c in &self.checks {
            let st = match c.status {
                Status::Pass => "pass",
                Status::Fail => "**FAIL**",
                Status::Skip => "skip",
            };
            let _ = writeln!(s, "| `{}` | {} | {} | {} |", c.id, st, c.claim.replace('|', "\\|"), c.elapsed_ms);
        }
        for c in self.checks.iter().filter(|c| c.status != Status::Pass) {
            let _ = writeln!(s, "\n## {}\n\n```json\n{}\n```", c.id, serde_json::to_string_pretty(&c.witness).unwrap_or_default());
        }
        s
    }

    pub fn render(&self, f: Format) -> String {
        match f {
            Format::Json => self.to_json(),
            Format::Markdown => self.to_markdown(),
        }
    }
}

/// A field element as its surd expression and coefficients over the tower basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactValue {
    pub expr: String,
    pub tower: Vec<String>,
    pub coeffs: Vec<Rat>,
}

impl ExactValue {
    pub fn of(x: &FieldElem) -> ExactValue {
        ExactValue {
            expr: x.to_expr(),
            tower: x.tower().labels().to_vec(),
            coeffs: x.coeffs(),
        }
    }
}

/// Everything the checks share, built once per run.
pub struct Context {
    pub config: Config,
    pub params: Params,
    pub q: QuadAlgebra,
    pub qt: QuadAlgebra,
    pub curve: CurveE,
    pub family: PointFamily,
    pub seeds: Vec<Rat>,
}

impl Context {
    pub fn new(config: &Config) -> Result<Context, ConfigError> {
        config.validate()?;
        let params = make_params(config.alpha.clone(), config.beta.clone())?;
        let curve = CurveE::new(&params).map_err(|e| ConfigError::Curve(e.to_string()))?;
        let seeds = if config.seeds.is_empty() {
            curve.default_seeds(config.samples)
        } else {
            config.seeds.clone()
        };
        Ok(Context {
            config: config.clone(),
            q: q_relations(&params),
            qt: qtilde_relations(&params),
            family: build_point_family(&params),
            curve,
            params,
            seeds,
        })
    }

    fn mu(&self) -> Result<Cocycle2, String> {
        cocycle_from_matrix_basis(&quaternion_basis(&self.params.i)).map_err(|e| e.to_string())
    }
}

enum Outcome {
    Done(bool, Value),
    Skipped(String),
}

type CheckResult = Result<Outcome, String>;

fn done(ok: bool, w: Value) -> CheckResult {
    Ok(Outcome::Done(ok, w))
}

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

fn binomial3(n: usize) -> usize {
    (n + 1) * (n + 2) * (n + 3) / 6
}

fn check_hilbert(a: &QuadAlgebra, nmax: usize, expected: impl Fn(usize) -> usize) -> CheckResult {
    let dims = a.hilbert_dims(nmax);
    let want: Vec<usize> = (0..=nmax).map(expected).collect();
    done(dims == want, json!({ "dims": dims, "expected": want }))
}

fn check_koszul(a: &QuadAlgebra, nmax: usize) -> CheckResult {
    let dual = a.koszul_dual();
    let top = (nmax + 1).min(MAX_DEGREE_LIMIT);
    let dims = dual.hilbert_dims(top);
    let want: Vec<usize> = [1, 4, 6, 4, 1, 0][..=top].to_vec();
    let h = a.hilbert_dims(nmax);
    let sums: Vec<i64> = (1..=nmax)
        .map(|n| {
            (0..=n)
                .map(|k| {
                    let s = if k % 2 == 0 { 1 } else { -1 };
                    s * h[k] as i64 * dims[n - k] as i64
                })
                .sum()
        })
        .collect();
    let ok = dims == want && sums.iter().all(|&s| s == 0);
    done(ok, json!({ "dual_dims": dims, "expected": want, "convolution": sums }))
}

fn check_central(a: &QuadAlgebra, p: &Params, which: [CentralElement; 2]) -> CheckResult {
    let mut w = BTreeMap::new();
    for c in which {
        let z = central_elements(p, c).map_err(err)?;
        let nonzero = !a.is_zero_in_quotient(&z, &[]).map_err(err)?;
        w.insert(format!("{c:?}"), json!({ "central": a.is_central(&z, &[]), "nonzero": nonzero }));
    }
    let ok = w.values().all(|v| v["central"] == json!(true) && v["nonzero"] == json!(true));
    done(ok, json!(w))
}

fn signed_square(p: &Params, signs: [i64; 3]) -> NcTensor {
    let t = &p.tower;
    let coeffs = [1, signs[0], signs[1], signs[2]].map(|s| t.from_int(s));
    let l = NcTensor::linear(&coeffs);
    l.tensor(&l)
}

fn sample_all(ctx: &Context) -> Result<Vec<crate::geometry::ProjPoint>, GeometryError> {
    ctx.seeds.iter().map(|s| ctx.curve.sample_point(s).map(|(p, _)| p)).collect()
}

fn run_check(id: CheckId, ctx: &Context) -> CheckResult {
    let p = &ctx.params;
    let nmax = ctx.config.max_degree;
    match id {
        CheckId::Params => {
            let d = derived_constants(p).map_err(err)?;
            done(
                p.constraint_holds(),
                json!({
                    "alpha": p.alpha, "beta": p.beta, "gamma": p.gamma,
                    "mu": d.mu, "nu": d.nu, "lambda": d.lambda,
                    "tower": p.tower.labels(), "tower_dim": p.tower.dim(),
                }),
            )
        }
        CheckId::HilbertQ => check_hilbert(&ctx.q, nmax, binomial3),
        CheckId::HilbertQtilde => check_hilbert(&ctx.qt, nmax, binomial3),
        CheckId::HilbertBtilde => {
            let z = [CentralElement::Theta, CentralElement::ThetaPrime]
                .map(|c| central_elements(p, c))
                .into_iter()
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?;
            let dims = ctx.qt.two_sided_quotient_dims(&z, nmax).map_err(err)?;
            let want: Vec<usize> = (0..=nmax).map(|n| if n == 0 { 1 } else { 4 * n }).collect();
            done(dims == want, json!({ "dims": dims, "expected": want }))
        }
        CheckId::BtildeZeroSquares => {
            let z = [CentralElement::Theta, CentralElement::ThetaPrime]
                .map(|c| central_elements(p, c))
                .into_iter()
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?;
            let mut w = Vec::new();
            let mut ok = true;
            // the Γ-orbit of y0 - y1 - y2 - y3, then a control outside it
            for signs in [[-1, -1, -1], [-1, 1, 1], [1, -1, 1], [1, 1, -1], [1, 1, 1]] {
                let in_orbit = signs.iter().product::<i64>() == -1;
                let zero = ctx.qt.is_zero_in_quotient(&signed_square(p, signs), &z).map_err(err)?;
                ok &= zero == in_orbit;
                w.push(json!({ "signs": signs, "in_orbit": in_orbit, "zero": zero }));
            }
            done(ok, json!(w))
        }
        CheckId::KoszulQ => check_koszul(&ctx.q, nmax),
        CheckId::KoszulQtilde => check_koszul(&ctx.qt, nmax),
        CheckId::CenterQ => check_central(&ctx.q, p, [CentralElement::Omega, CentralElement::OmegaPrime]),
        CheckId::CenterQtilde => check_central(&ctx.qt, p, [CentralElement::Theta, CentralElement::ThetaPrime]),
        CheckId::TwistCocycle => {
            let mu = ctx.mu()?;
            let table: Vec<Vec<String>> = (0..4).map(|g| (0..4).map(|h| mu.value(g, h).to_expr()).collect()).collect();
            done(
                mu.is_normalized() && mu.satisfies_cocycle_identity(),
                json!({ "table": table }),
            )
        }
        CheckId::TwistRelations => {
            let t = twist_algebra(&ctx.q, &CharacterAssignment::sklyanin(), &ctx.mu()?).map_err(err)?;
            done(t.same_relations(&ctx.qt), json!({ "relations": t.relation_span().dim() }))
        }
        CheckId::TwistDouble => {
            let chars = CharacterAssignment::sklyanin();
            let mu = ctx.mu()?;
            let t = twist_algebra(&ctx.q, &chars, &mu).map_err(err)?;
            let tt = twist_algebra(&t, &chars, &mu).map_err(err)?;
            let inv = twist_algebra(&ctx.qt, &chars, &mu.pointwise_inverse()).map_err(err)?;
            done(
                tt.same_relations(&ctx.q) && inv.same_relations(&ctx.q),
                json!({ "double_twist": tt.same_relations(&ctx.q), "inverse_twist": inv.same_relations(&ctx.q) }),
            )
        }
        CheckId::TwistCentral => {
            let chars = CharacterAssignment::sklyanin();
            let mu = ctx.mu()?;
            let mut w = BTreeMap::new();
            for (src, dst) in [
                (CentralElement::Omega, CentralElement::Theta),
                (CentralElement::OmegaPrime, CentralElement::ThetaPrime),
            ] {
                let z = central_elements(p, src).map_err(err)?;
                let image = twist_element(&z, &chars, &mu).map_err(err)?;
                let target = central_elements(p, dst).map_err(err)?.neg();
                w.insert(format!("{src:?}"), json!(image == target));
            }
            done(w.values().all(|v| *v == json!(true)), json!(w))
        }
        CheckId::PointScheme => {
            let rep = verify_point_scheme(&ctx.qt, &ctx.family, 20, ctx.config.rng_seed);
            done(rep.passed(), serde_json::to_value(&rep).map_err(err)?)
        }
        CheckId::PointMinors => {
            let rep = minors_check(&ctx.qt, p, &ctx.family);
            done(rep.passed(), serde_json::to_value(&rep).map_err(err)?)
        }
        CheckId::PointModules => {
            let w: Vec<Value> = (0..ctx.family.len())
                .into_par_iter()
                .map(|k| match point_module_witness(&ctx.qt, &ctx.family, k, 6) {
                    Ok(m) => json!({ "family": m.family.name(), "row": m.row, "ok": true, "period": m.period() }),
                    Err(e) => json!({ "point": k, "ok": false, "error": e.to_string() }),
                })
                .collect();
            done(w.iter().all(|v| v["ok"] == json!(true)), json!(w))
        }
        CheckId::ThetaConstants => {
            let exp = expected_theta_constants(p);
            let w: Vec<Value> = (0..ctx.family.len())
                .map(|k| {
                    let kappa = theta_constant(&ctx.family, k);
                    let e = &exp[k / 4];
                    json!({
                        "family": ctx.family.points[k].label.name(),
                        "row": ctx.family.points[k].row,
                        "kappa": ExactValue::of(&kappa),
                        "expected": e,
                        "ok": kappa == p.rat(e) && !kappa.is_zero(),
                    })
                })
                .collect();
            done(w.iter().all(|v| v["ok"] == json!(true)), json!(w))
        }
        CheckId::FourQuadrics => {
            let rep = four_quadrics_independence(p);
            done(rep.passed(), serde_json::to_value(&rep).map_err(err)?)
        }
        CheckId::CurveSamples => {
            let pts = sample_all(ctx).map_err(err)?;
            let w: Vec<Value> = pts
                .iter()
                .zip(&ctx.seeds)
                .map(|(pt, s)| {
                    json!({
                        "seed": s,
                        "point": pt.to_strings(),
                        "on_curve": ctx.curve.on_curve(pt),
                        "zero_coordinates": pt.zero_count(),
                    })
                })
                .collect();
            let ok = w.iter().all(|v| v["on_curve"] == json!(true) && v["zero_coordinates"].as_u64() <= Some(1));
            done(ok, json!(w))
        }
        CheckId::CurveQuadrics => {
            let rep = singular_quadric_report(&ctx.curve).map_err(err)?;
            done(rep.iter().all(|c| c.passed()), serde_json::to_value(&rep).map_err(err)?)
        }
        CheckId::CurveTranslation => {
            let n = ctx.seeds.len();
            if n < 2 {
                return Ok(Outcome::Skipped("needs at least two samples".into()));
            }
            let w: Vec<Value> = (0..n)
                .into_par_iter()
                .map(|k| {
                    let pair = [ctx.seeds[k].clone(), ctx.seeds[(k + 1) % n].clone()];
                    let res = ctx
                        .curve
                        .sample_points(&pair)
                        .and_then(|(pts, _)| translation_evidence(&ctx.curve, &pts[0], &pts[1]));
                    match res {
                        Ok(ev) => json!({ "seeds": pair, "per_xi": ev, "ok": ev.iter().all(|b| *b) }),
                        Err(e) => json!({ "seeds": pair, "ok": false, "error": e.to_string() }),
                    }
                })
                .collect();
            done(w.iter().all(|v| v["ok"] == json!(true)), json!(w))
        }
        CheckId::CurveSigma => {
            let pts = sample_all(ctx).map_err(err)?;
            let w: Vec<Value> = pts
                .par_iter()
                .map(|pt| match sigma(&ctx.q, pt) {
                    Ok(s) => {
                        let on = ctx.curve.on_curve(&s);
                        let comm = (1..4).all(|g| sigma(&ctx.q, &gamma_act(g, pt)).is_ok_and(|x| x == gamma_act(g, &s)));
                        json!({ "point": pt.to_strings(), "on_curve": on, "commutes": comm, "ok": on && comm })
                    }
                    Err(e) => json!({ "point": pt.to_strings(), "ok": false, "error": e.to_string() }),
                })
                .collect();
            done(w.iter().all(|v| v["ok"] == json!(true)), json!(w))
        }
        CheckId::CrossRatio => {
            let rep = branch_cross_ratio_check(&ctx.curve).map_err(err)?;
            done(rep.passed(), serde_json::to_value(&rep).map_err(err)?)
        }
        CheckId::Lines(i) => {
            let seeds: Vec<Rat> = ctx.seeds.iter().take(3).cloned().collect();
            let w: Vec<Value> = seeds
                .par_iter()
                .map(|s| line_witness(ctx, s, i, nmax).unwrap_or_else(|e| json!({ "seed": s, "ok": false, "error": e })))
                .collect();
            done(w.iter().all(|v| v["ok"] == json!(true)), json!(w))
        }
        CheckId::LinesRandom => {
            let deg = nmax.min(2);
            if deg < 2 {
                return Ok(Outcome::Skipped("needs max_degree ≥ 2".into()));
            }
            let w: Vec<Value> = (0..5u64)
                .into_par_iter()
                .map(|k| {
                    let seed = ctx.config.rng_seed.wrapping_add(k);
                    let forms = random_forms(seed);
                    match line_module_dims(&ctx.qt, &forms, 2) {
                        Ok(d) => json!({ "seed": seed, "dims": d, "ok": d[2] != 3 }),
                        Err(e) => json!({ "seed": seed, "ok": false, "error": e.to_string() }),
                    }
                })
                .collect();
            done(w.iter().all(|v| v["ok"] == json!(true)), json!(w))
        }
        CheckId::Equivariant => {
            let rep = verify_equivariant_table(p);
            done(rep.passed(), serde_json::to_value(&rep).map_err(err)?)
        }
        CheckId::FatPoints => {
            let t = &p.tower;
            let vs = [[t.one(), t.zero()], [t.zero(), t.one()], [t.one(), p.i.clone()]];
            let w: Vec<Value> = ctx
                .seeds
                .par_iter()
                .map(|s| {
                    let res = ctx.curve.sample_point(s).map_err(err).and_then(|(pt, _)| {
                        vs.iter()
                            .map(|v| fat_point_span_check(&ctx.q, p, &pt, 3, v).map_err(err))
                            .collect::<Result<Vec<bool>, String>>()
                    });
                    match res {
                        Ok(r) => json!({ "seed": s, "spans": r, "ok": r.iter().all(|b| *b) }),
                        Err(e) => json!({ "seed": s, "ok": false, "error": e }),
                    }
                })
                .collect();
            done(w.iter().all(|v| v["ok"] == json!(true)), json!(w))
        }
        CheckId::Cohomology => {
            let rep = mu2_cohomology(&GradingGroup::klein(), SWAP_ACTION, Some(&SIGN_COCYCLE)).map_err(err)?;
            let ok = (rep.z1_size, rep.b1_size, rep.h1_size) == (4, 2, 2)
                && rep.is_cocycle == Some(true)
                && rep.is_coboundary == Some(false);
            done(ok, serde_json::to_value(&rep).map_err(err)?)
        }
        CheckId::Torsor(n) => {
            if !(2..=MAX_TORSOR_N).contains(&n) {
                return Err(ConfigError::TorsorOrder(n).to_string());
            }
            let rep = torsor_report(n).map_err(err)?;
            done(rep.passed(), serde_json::to_value(&rep).map_err(err)?)
        }
    }
}

fn line_witness(ctx: &Context, s: &Rat, i: usize, nmax: usize) -> Result<Value, String> {
    let p = &ctx.params;
    let (pt, _) = ctx.curve.sample_point(s).map_err(err)?;
    let lf = line_forms_qtilde(&ctx.qt, p, &pt, i, nmax).map_err(err)?;
    let dims = line_module_dims(&ctx.qt, &lf.forms, nmax).map_err(err)?;
    let conj = qtilde_forms(&pt, i, lf.pattern.map(Unit4::conj), p).map_err(err)?;
    let conj_ok = verify_line_module(&ctx.qt, &conj, nmax).map_err(err)?;
    let moved = qtilde_forms(&gamma_act(2, &pt), i, lf.pattern, p).map_err(err)?;
    let moved_ok = verify_line_module(&ctx.qt, &moved, nmax).map_err(err)?;
    let mut q_side = true;
    for flipped in [false, true] {
        let forms = line_forms_q(&pt, i, flipped).map_err(err)?;
        q_side &= verify_line_module(&ctx.q, &forms, nmax).map_err(err)?;
    }
    let degree_one = if i == 1 {
        Some(degree_one_annihilation(p, &pt, &lf).map_err(err)?)
    } else {
        None
    };
    let ok = conj_ok && moved_ok && q_side && degree_one != Some(false);
    Ok(json!({
        "seed": s,
        "point": pt.to_strings(),
        "pattern": lf.pattern,
        "dims": dims,
        "conjugate_passes": conj_ok,
        "translate_passes": moved_ok,
        "q_side_passes": q_side,
        "degree_one_annihilation": degree_one,
        "ok": ok,
    }))
}

fn record(id: CheckId, ctx: &Context) -> CheckRecord {
    let start = Instant::now();
    let (status, witness) = match run_check(id, ctx) {
        Ok(Outcome::Done(true, w)) => (Status::Pass, w),
        Ok(Outcome::Done(false, w)) => (Status::Fail, w),
        Ok(Outcome::Skipped(why)) => (Status::Skip, json!({ "reason": why })),
        Err(e) => (Status::Fail, json!({ "error": e })),
    };
    CheckRecord {
        id: id.key(),
        claim: id.claim(),
        status,
        witness,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

/// Run every check registered for `cmd`, in parallel, in registry order.
pub fn run(cmd: Command, config: &Config) -> Result<Report, ConfigError> {
    if let Command::Torsor(n) = cmd {
        if !(2..=MAX_TORSOR_N).contains(&n) {
            return Err(ConfigError::TorsorOrder(n));
        }
    }
    let ctx = Context::new(config)?;
    let checks: Vec<CheckRecord> = CheckId::for_command(cmd).into_par_iter().map(|id| record(id, &ctx)).collect();
    Ok(Report {
        command: cmd.name(),
        alpha: ctx.params.alpha.clone(),
        beta: ctx.params.beta.clone(),
        gamma: ctx.params.gamma.clone(),
        max_degree: config.max_degree,
        samples: ctx.seeds.len(),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_value_files() {
        let c = Config::parse("# preset\nalpha = 3\nbeta=5\n\nmax_degree = 3 # short\nseeds = 1, 7/3\nformat = md\n").unwrap();
        assert_eq!(c.alpha, Rat::from_int(3));
        assert_eq!(c.max_degree, 3);
        assert_eq!(c.seeds, vec![Rat::one(), Rat::new(7, 3)]);
        assert_eq!(c.format, Format::Markdown);
        assert_eq!(c.samples, 5);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(Config::parse("alpha 3"), Err(ConfigError::Syntax { line: 1, .. })));
        assert_eq!(Config::parse("colour = red"), Err(ConfigError::UnknownKey("colour".into())));
        assert_eq!(Config::parse("max_degree = 6"), Err(ConfigError::MaxDegree(6)));
        assert_eq!(Config::parse("samples = 0"), Err(ConfigError::Samples));
        assert!(matches!(Config::parse("beta = x"), Err(ConfigError::InvalidValue { .. })));
        let c = Config {
            alpha: Rat::one(),
            ..Config::default()
        };
        assert!(matches!(run(Command::Params, &c), Err(ConfigError::Params(_))));
        assert_eq!(run(Command::Torsor(1), &Config::default()).unwrap_err(), ConfigError::TorsorOrder(1));
    }

    #[test]
    fn every_check_appears_once_in_verify_all() {
        let all: Vec<String> = CheckId::for_command(Command::VerifyAll).iter().map(CheckId::key).collect();
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
        assert!(all.contains(&"torsor.n3".to_string()));
    }

    #[test]
    fn small_commands_pass_and_round_trip() {
        let c = Config {
            max_degree: 3,
            ..Config::default()
        };
        for cmd in [Command::Params, Command::Hilbert(HilbertTarget::Qtilde), Command::Cohomology] {
            let r = run(cmd, &c).unwrap();
            assert!(r.passed(), "{}", r.to_json());
            assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
            assert!(r.to_markdown().contains("| pass |"));
        }
    }
}

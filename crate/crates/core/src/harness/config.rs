use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tdn::LifetimePolicy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    SieveAdn,
    BasicReduction,
    HistApprox,
    /// HistApprox answering from a refined copy of its head.
    HistApproxExact,
    Greedy,
    LazyGreedy,
    Random,
    BruteForce,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::SieveAdn,
        Algorithm::BasicReduction,
        Algorithm::HistApprox,
        Algorithm::HistApproxExact,
        Algorithm::Greedy,
        Algorithm::LazyGreedy,
        Algorithm::Random,
        Algorithm::BruteForce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SieveAdn => "sieve-adn",
            Algorithm::BasicReduction => "basic-reduction",
            Algorithm::HistApprox => "hist-approx",
            Algorithm::HistApproxExact => "hist-approx-exact",
            Algorithm::Greedy => "greedy",
            Algorithm::LazyGreedy => "lazy-greedy",
            Algorithm::Random => "random",
            Algorithm::BruteForce => "brute-force",
        }
    }

    fn needs_finite_lifetimes(self) -> bool {
        matches!(
            self,
            Algorithm::BasicReduction | Algorithm::HistApprox | Algorithm::HistApproxExact
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                Error::Config(format!("unknown algorithm {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// Textual lifetime policy: `infinite`, `const:W`, `geom:p` or `column`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LifetimeSpec {
    Infinite,
    Constant(u32),
    Geometric(f64),
    Column,
}

impl LifetimeSpec {
    /// The policy to assign with, truncating geometric draws at `max`.
    pub fn policy(self, max: Option<u32>) -> LifetimePolicy {
        match self {
            LifetimeSpec::Infinite => LifetimePolicy::Infinite,
            LifetimeSpec::Constant(w) => LifetimePolicy::Constant(w),
            LifetimeSpec::Geometric(p) => LifetimePolicy::Geometric { p, max },
            LifetimeSpec::Column => LifetimePolicy::FromColumn,
        }
    }
}

impl fmt::Display for LifetimeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LifetimeSpec::Infinite => f.write_str("infinite"),
            LifetimeSpec::Constant(w) => write!(f, "const:{w}"),
            LifetimeSpec::Geometric(p) => write!(f, "geom:{p}"),
            LifetimeSpec::Column => f.write_str("column"),
        }
    }
}

impl FromStr for LifetimeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad lifetime spec {s:?}; expected infinite, const:W, geom:p or column"));
        let spec = match s.split_once(':') {
            None if s == "infinite" => LifetimeSpec::Infinite,
            None if s == "column" => LifetimeSpec::Column,
            Some(("const", w)) => LifetimeSpec::Constant(w.parse().map_err(|_| bad())?),
            Some(("geom", p)) => LifetimeSpec::Geometric(p.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        spec.policy(None).validate()?;
        Ok(spec)
    }
}

impl TryFrom<String> for LifetimeSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<LifetimeSpec> for String {
    fn from(spec: LifetimeSpec) -> String {
        spec.to_string()
    }
}

/// Synthetic stream shape `n,m,T,bias`: `n` nodes, `m` interactions per
/// step, `T` steps, and the source attachment bias.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SyntheticSpec {
    pub nodes: u64,
    pub edges_per_step: usize,
    pub steps: u64,
    pub bias: f64,
}

impl fmt::Display for SyntheticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.nodes, self.edges_per_step, self.steps, self.bias)
    }
}

impl FromStr for SyntheticSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Config(format!("bad synthetic spec {s:?}: {why}"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [n, m, t, bias] = parts.as_slice() else {
            return Err(bad("expected n,m,T,bias"));
        };
        let spec = SyntheticSpec {
            nodes: n.parse().map_err(|_| bad("n is not an integer"))?,
            edges_per_step: m.parse().map_err(|_| bad("m is not an integer"))?,
            steps: t.parse().map_err(|_| bad("T is not an integer"))?,
            bias: bias.parse().map_err(|_| bad("bias is not a number"))?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::Config("synthetic streams need at least 2 nodes".into()));
        }
        if self.edges_per_step < 1 {
            return Err(Error::Config("synthetic streams need m >= 1".into()));
        }
        if !(self.bias >= 0.0 && self.bias.is_finite()) {
            return Err(Error::Config(format!("bias must be a non-negative number, got {}", self.bias)));
        }
        Ok(())
    }
}

impl TryFrom<String> for SyntheticSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SyntheticSpec> for String {
    fn from(spec: SyntheticSpec) -> String {
        spec.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Algorithms run side by side on the same annotated stream.
    pub algorithms: Vec<Algorithm>,
    pub k: usize,
    pub epsilon: f64,
    pub lifetime: LifetimeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_lifetime: Option<u32>,
    /// Query every this many steps; defaults by stream length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query_every: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Malformed or out-of-order input is fatal instead of skipped.
    #[serde(default)]
    pub strict: bool,
    /// One interaction per step instead of one timestamp per step.
    #[serde(default)]
    pub single: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            algorithms: vec![Algorithm::HistApprox],
            k: 10,
            epsilon: 0.2,
            lifetime: LifetimeSpec::Infinite,
            max_lifetime: None,
            query_every: None,
            steps: None,
            seed: 0,
            input: None,
            synthetic: None,
            out: None,
            strict: false,
            single: false,
        }
    }
}

/// Streams longer than this are queried every tenth step by default.
pub const DENSE_QUERY_LIMIT: u64 = 10_000;

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The lifetime bound in force: the configured one, or `W` for a
    /// constant policy.
    pub fn effective_max_lifetime(&self) -> Option<u32> {
        self.max_lifetime.or(match self.lifetime {
            LifetimeSpec::Constant(w) => Some(w),
            _ => None,
        })
    }

    pub fn policy(&self) -> LifetimePolicy {
        self.lifetime.policy(self.effective_max_lifetime())
    }

    /// Query cadence for a stream of `steps` steps.
    pub fn query_cadence(&self, steps: u64) -> u64 {
        self.query_every
            .unwrap_or(if steps <= DENSE_QUERY_LIMIT { 1 } else { 10 })
    }

    /// Rejects inconsistent settings before any data is touched.
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithm selected".into()));
        }
        if self.k < 1 {
            return Err(Error::Config("budget k must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.max_lifetime == Some(0) {
            return Err(Error::Config("maximum lifetime must be at least 1".into()));
        }
        if self.query_every == Some(0) {
            return Err(Error::Config("query cadence must be at least 1".into()));
        }
        self.policy().validate()?;
        if let (LifetimeSpec::Constant(w), Some(max)) = (self.lifetime, self.max_lifetime) {
            if w > max {
                return Err(Error::Config(format!(
                    "constant lifetime {w} exceeds the maximum lifetime {max}"
                )));
            }
        }
        match (&self.input, &self.synthetic) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give either an input file or a synthetic spec, not both".into()))
            }
            (None, None) => return Err(Error::Config("no input file or synthetic spec given".into())),
            (None, Some(spec)) => spec.validate()?,
            (Some(_), None) => {}
        }
        if self.synthetic.is_some() && self.lifetime == LifetimeSpec::Column {
            return Err(Error::Config("synthetic streams carry no lifetime column".into()));
        }
        for &a in &self.algorithms {
            if a == Algorithm::SieveAdn && self.lifetime != LifetimeSpec::Infinite {
                return Err(Error::Config(
                    "sieve-adn requires infinite lifetimes (an addition-only network); \
                     use --lifetime infinite or a reduction algorithm"
                        .into(),
                ));
            }
            if a.needs_finite_lifetimes() {
                if self.lifetime == LifetimeSpec::Infinite {
                    return Err(Error::Config(format!(
                        "{a} requires finite lifetimes; use sieve-adn for addition-only networks"
                    )));
                }
                if self.effective_max_lifetime().is_none() {
                    return Err(Error::Config(format!("{a} requires a maximum lifetime (--max-lifetime)")));
                }
            }
        }
        Ok(())
    }
}

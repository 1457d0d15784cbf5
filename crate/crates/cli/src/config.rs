use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use fakb_core::qbaf::{
    semantics_by_name, IterationOptions, ModularSemantics, DEFAULT_EPSILON, DEFAULT_MAX_ITER, SEMANTICS_NAMES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Tsv,
}

/// Engine settings shared by all commands. Each flag can also be set
/// through the `FAKB_`-prefixed variable named in its help.
#[derive(Debug, Clone, Args)]
pub struct EngineConfig {
    /// Convergence tolerance of the iterative strength evaluation.
    #[arg(long, global = true, env = "FAKB_EPSILON", default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,

    /// Round limit of the iterative strength evaluation.
    #[arg(long, global = true, env = "FAKB_MAX_ITER", default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,

    /// Relations are kept only when their margin is strictly above this.
    #[arg(long, global = true, env = "FAKB_THETA", default_value_t = 0.0)]
    pub theta: f64,

    /// Gradual semantics for argument strengths.
    #[arg(long, global = true, env = "FAKB_SEMANTICS", default_value = "quadratic-energy")]
    pub semantics: String,

    /// Output format.
    #[arg(long, global = true, env = "FAKB_FORMAT", value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Also write the FABox as a node/edge JSON graph to this file.
    #[arg(long, global = true, env = "FAKB_EXPORT_GRAPH", value_name = "PATH")]
    pub export_graph: Option<std::path::PathBuf>,
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            bail!("--epsilon must be positive, got {}", self.epsilon);
        }
        if self.max_iter == 0 {
            bail!("--max-iter must be positive");
        }
        if !(0.0..=1.0).contains(&self.theta) {
            bail!("--theta must lie in [0, 1], got {}", self.theta);
        }
        if semantics_by_name(&self.semantics).is_none() {
            bail!(
                "unknown semantics `{}` (known: {})",
                self.semantics,
                SEMANTICS_NAMES.join(", ")
            );
        }
        Ok(())
    }

    pub fn semantics(&self) -> Box<dyn ModularSemantics> {
        semantics_by_name(&self.semantics).expect("validated at startup")
    }

    pub fn iteration(&self) -> IterationOptions {
        IterationOptions {
            epsilon: self.epsilon,
            max_iter: self.max_iter,
        }
    }
}

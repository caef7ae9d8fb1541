//! `lifted-sde hermite ...`: inspect expansions from the command line.

use std::path::PathBuf;

use clap::{Subcommand, ValueEnum};

use lifted_sde::hermite::{hermite_eval, translate, ExpansionDocument, ExpansionVector, MultiIndex, QuadratureRule};

use crate::CliError;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Function {
    /// `exp(-|x|^2 / 2)`
    Gaussian,
    /// `prod_i sech(x_i)`
    Sech,
    /// `1 / (1 + |x|^2)`
    Lorentzian,
}

impl Function {
    fn eval(self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match self {
            Function::Gaussian => (-0.5 * r2).exp(),
            Function::Sech => x.iter().map(|v| 1.0 / v.cosh()).product(),
            Function::Lorentzian => 1.0 / (1.0 + r2),
        }
    }
}

#[derive(Subcommand)]
pub enum HermiteCommand {
    /// Value of `h_n(x)` or of an expansion at `x`.
    Eval {
        /// Multi-index, comma separated.
        #[arg(long, value_delimiter = ',', conflicts_with = "input")]
        n: Option<Vec<u32>>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
    },
    /// Hermite coefficients of a named function.
    Project {
        #[arg(long, value_enum)]
        function: Function,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        cutoff: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        p: f64,
    },
    /// `||y||_p` of an expansion.
    Norm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
    },
    /// `τ_z y` of an expansion.
    Translate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        z: Vec<f64>,
    },
    /// The truncated `δ_0`.
    Delta0 {
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        cutoff: usize,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        p: f64,
    },
}

fn read(path: &PathBuf) -> Result<ExpansionVector, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let doc: ExpansionDocument =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(ExpansionVector::try_from(doc)?)
}

fn print(v: ExpansionVector) {
    let doc = ExpansionDocument::from(v);
    println!("{}", serde_json::to_string_pretty(&doc).expect("documents serialize"));
}

pub fn run(cmd: &HermiteCommand) -> Result<(), CliError> {
    match cmd {
        HermiteCommand::Eval { n, input, x } => {
            let value = match (n, input) {
                (Some(n), None) => {
                    let n = MultiIndex::new(n.clone());
                    if n.dim() != x.len() {
                        return Err(lifted_sde::Error::DimensionMismatch {
                            expected: n.dim(),
                            found: x.len(),
                        }
                        .into());
                    }
                    hermite_eval(&n, x)
                }
                (None, Some(path)) => {
                    let y = read(path)?;
                    if y.dim() != x.len() {
                        return Err(lifted_sde::Error::DimensionMismatch {
                            expected: y.dim(),
                            found: x.len(),
                        }
                        .into());
                    }
                    y.evaluate(x)
                }
                _ => {
                    return Err(CliError::Invalid {
                        field: "--n/--input".into(),
                        message: "give exactly one".into(),
                    })
                }
            };
            println!("{value}");
        }
        HermiteCommand::Project { function, dim, cutoff, p } => {
            let f = *function;
            let rule = QuadratureRule::for_cutoff(*cutoff);
            print(ExpansionVector::project(|x| f.eval(x), *dim, *cutoff, &rule)?.with_regularity(*p));
        }
        HermiteCommand::Norm { input, p } => println!("{}", read(input)?.norm(*p)),
        HermiteCommand::Translate { input, z } => print(translate(&read(input)?, z)?),
        HermiteCommand::Delta0 { dim, cutoff, p } => print(ExpansionVector::delta0(*dim, *cutoff, *p)),
    }
    Ok(())
}

use std::fmt;
use std::path::{Path, PathBuf};

use chainforge::dsl::{self, Diagnostics};
use chainforge::model::{Expr, Model, Property};

/// A model with its property suite and the `I`/`F` state sets.
pub struct Problem {
    pub model: Model,
    pub props: Vec<Property>,
    pub init: Expr,
    pub fin: Expr,
    pub init_text: String,
    pub fin_text: String,
}

#[derive(Debug)]
pub enum LoadError {
    Io { path: PathBuf, error: std::io::Error },
    Parse(Diagnostics),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io { path, error } => write!(f, "cannot read {}: {error}", path.display()),
            LoadError::Parse(d) => write!(f, "{d}"),
        }
    }
}

pub fn read(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|error| LoadError::Io { path: path.to_path_buf(), error })
}

/// Parses the model and property files. `init` defaults to the model's
/// declared initial values and `fin` to `init`.
pub fn load(model_path: &Path, props_path: &Path, init: Option<&str>, fin: Option<&str>) -> Result<Problem, LoadError> {
    let model_name = model_path.display().to_string();
    let model = dsl::parse_model(&read(model_path)?).map_err(|d| LoadError::Parse(d.with_file(&model_name)))?;
    let props_name = props_path.display().to_string();
    let props =
        dsl::parse_properties(&model, &read(props_path)?).map_err(|d| LoadError::Parse(d.with_file(&props_name)))?;
    let init_text = match init {
        Some(t) => t.to_string(),
        None => dsl::print_expr(&model, &model.init_expr()),
    };
    let fin_text = fin.map_or_else(|| init_text.clone(), str::to_string);
    let init = dsl::parse_state_set(&model, &init_text).map_err(|d| LoadError::Parse(d.with_file("--init")))?;
    let fin = dsl::parse_state_set(&model, &fin_text).map_err(|d| LoadError::Parse(d.with_file("--final")))?;
    Ok(Problem { model, props, init, fin, init_text, fin_text })
}

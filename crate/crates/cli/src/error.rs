use std::fmt;

use serde_json::json;

/// Failure of a command, tagged with a machine-readable category.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Model(surfnoise::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Model(_) => "model",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Model(_) => 4,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({ "category": self.category(), "message": self.to_string() });
        if let CliError::Model(e) = self {
            let kind = format!("{e:?}");
            let kind = kind.split(['(', ' ']).next().unwrap_or_default().to_string();
            v["kind"] = json!(kind);
        }
        json!({ "error": v })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Io(m) => f.write_str(m),
            CliError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<surfnoise::Error> for CliError {
    fn from(e: surfnoise::Error) -> Self {
        CliError::Model(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

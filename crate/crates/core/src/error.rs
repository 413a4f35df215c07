use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// Which NOMA user a quantity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum User {
    /// Indoor user, served by refraction through the STAR-RIS (strong user).
    Indoor,
    /// Outdoor user, served by STAR-RIS reflection and the conventional RIS (weak user).
    Outdoor,
}

impl fmt::Display for User {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            User::Indoor => f.write_str("indoor"),
            User::Outdoor => f.write_str("outdoor"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain ({constraint})")]
    Domain {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Every propagation path to the user is switched off (no elements or zero gain).
    #[error("{user} channel is identically zero (no contributing path)")]
    ZeroChannel { user: User },

    #[error("degenerate Gamma fit for the {user} channel (mean {mean}, variance {variance})")]
    DegenerateFit {
        user: User,
        mean: f64,
        variance: f64,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_domain(
    ok: bool,
    name: &'static str,
    value: f64,
    constraint: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            constraint,
        })
    }
}

use std::io;

/// Errors produced anywhere in the codec. Every variant carries the module that
/// raised it so the CLI can report where a failure originated.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("[{module}] validation error: {msg}")]
    Validation { module: &'static str, msg: String },

    #[error("[{module}] I/O error: {msg}")]
    Io {
        module: &'static str,
        msg: String,
        #[source]
        source: Option<io::Error>,
    },

    #[error("[bitstream] {msg} (byte offset {offset})")]
    Bitstream { offset: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Validation {
            module,
            msg: msg.into(),
        }
    }

    pub fn io(module: &'static str, msg: impl Into<String>, source: io::Error) -> Self {
        Error::Io {
            module,
            msg: msg.into(),
            source: Some(source),
        }
    }

    pub fn bitstream(offset: usize, msg: impl Into<String>) -> Self {
        Error::Bitstream {
            offset,
            msg: msg.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation { .. } => 2,
            Error::Io { .. } => 3,
            Error::Bitstream { .. } => 4,
        }
    }
}

macro_rules! ensure {
    ($cond:expr, $module:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::validation($module, format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;

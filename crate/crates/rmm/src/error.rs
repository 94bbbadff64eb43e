use std::fmt;

/// Where in the run an error happened. Every field is optional because the
/// low level kernels only know the cell; the loops above them fill in the rest.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Location {
    pub step: Option<usize>,
    pub stage: Option<usize>,
    pub cell: Option<(usize, usize)>,
    pub time: Option<f64>,
    pub tau: Option<f64>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(s) = self.step {
            parts.push(format!("step {}", s));
        }
        if let Some(s) = self.stage {
            parts.push(format!("stage {}", s));
        }
        if let Some((i, j)) = self.cell {
            parts.push(format!("cell ({}, {})", i, j));
        }
        if let Some(t) = self.time {
            parts.push(format!("t = {:.6e}", t));
        }
        if let Some(t) = self.tau {
            parts.push(format!("tau = {:.6e}", t));
        }
        if parts.is_empty() {
            write!(f, "unknown location")
        } else {
            write!(f, "{}", parts.join(", "))
        }
    }
}

#[derive(thiserror::Error, Debug, Clone)]
pub enum Error {
    #[error("irregular cell ({reason}) at {at}")]
    Regularity { reason: String, at: Location },

    #[error("singular reconstruction stencil at {at}")]
    SingularStencil { at: Location },

    #[error("unsupported moment degree s = {s}, r = {r}")]
    UnsupportedDegree { s: usize, r: usize },

    #[error("non-physical state ({reason}) at {at}")]
    State { reason: String, at: Location },

    #[error("non-positive evolved volume {volume:.4e} at {at}")]
    NegativeVolume { volume: f64, at: Location },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn location_mut(&mut self) -> Option<&mut Location> {
        match self {
            Error::Regularity { at, .. }
            | Error::SingularStencil { at }
            | Error::State { at, .. }
            | Error::NegativeVolume { at, .. } => Some(at),
            _ => None,
        }
    }

    /// Fill in any location fields that are still unknown.
    pub fn within(mut self, outer: &Location) -> Self {
        if let Some(at) = self.location_mut() {
            at.step = at.step.or(outer.step);
            at.stage = at.stage.or(outer.stage);
            at.cell = at.cell.or(outer.cell);
            at.time = at.time.or(outer.time);
            at.tau = at.tau.or(outer.tau);
        }
        self
    }

    pub fn at_cell(self, i: usize, j: usize) -> Self {
        self.within(&Location {
            cell: Some((i, j)),
            ..Default::default()
        })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

//! Process exit codes and the error type that carries them.

use std::fmt;
use std::path::Path;

use mdcvrp_core::dynamic::DynamicError;
use mdcvrp_core::io::FormatError;
use mdcvrp_core::layout::LayoutError;
use mdcvrp_core::render::RenderError;
use mdcvrp_core::solver::SolverError;
use mdcvrp_core::{CompileError, InstanceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    /// Bad flags or arguments.
    Usage = 1,
    /// A file could not be read or written.
    Io = 2,
    /// An input document is malformed or inconsistent.
    Schema = 3,
    /// The instance parses but admits no feasible plan.
    Instance = 4,
    /// The solver's best sample does not decode to a valid plan.
    Infeasible = 5,
    /// The model exceeds a size cap.
    Size = 6,
}

#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(exit: Exit, error: impl Into<anyhow::Error>) -> Self {
        Self {
            exit,
            error: error.into(),
        }
    }

    pub fn msg(exit: Exit, message: impl fmt::Display) -> Self {
        Self::new(exit, anyhow::anyhow!("{message}"))
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;

pub trait OrExit<T> {
    fn or_exit(self, exit: Exit) -> Outcome<T>;
}

impl<T, E: Into<anyhow::Error>> OrExit<T> for Result<T, E> {
    fn or_exit(self, exit: Exit) -> Outcome<T> {
        self.map_err(|e| Failure::new(exit, e))
    }
}

pub fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::msg(Exit::Io, format!("cannot read {}: {e}", path.display())))
}

pub fn write(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text)
        .map_err(|e| Failure::msg(Exit::Io, format!("cannot write {}: {e}", path.display())))
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        let exit = match e {
            InstanceError::ScaleOverflow => Exit::Instance,
            _ => Exit::Schema,
        };
        Failure::new(exit, e)
    }
}

impl From<LayoutError> for Failure {
    fn from(e: LayoutError) -> Self {
        Failure::new(Exit::Size, e)
    }
}

impl From<CompileError> for Failure {
    fn from(e: CompileError) -> Self {
        match e {
            CompileError::Layout(e) => e.into(),
            CompileError::NegativePenalty(_) => Failure::new(Exit::Usage, e),
        }
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        let exit = match e {
            SolverError::DimensionTooLarge { .. } => Exit::Size,
            SolverError::InvalidSchedule(_) => Exit::Usage,
        };
        Failure::new(exit, e)
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::new(Exit::Schema, e)
    }
}

impl From<RenderError> for Failure {
    fn from(e: RenderError) -> Self {
        let exit = match e {
            RenderError::NoPositions => Exit::Instance,
            RenderError::Unknown { .. } => Exit::Schema,
        };
        Failure::new(exit, e)
    }
}

impl From<DynamicError> for Failure {
    fn from(e: DynamicError) -> Self {
        match e {
            DynamicError::Instance(e) => e.into(),
            DynamicError::Compile(e) => e.into(),
            DynamicError::NothingPending | DynamicError::InfeasibleFleet(_) => {
                Failure::new(Exit::Instance, e)
            }
            _ => Failure::new(Exit::Schema, e),
        }
    }
}

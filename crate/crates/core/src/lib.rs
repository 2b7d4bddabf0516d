//! Bifurcation curves of a Kirchhoff-type nonlocal logistic eigenvalue
//! problem, computed through its reduction to a local problem.

pub mod asymptotics;
pub mod curves;
pub mod error;
pub mod local;
pub mod nonlocal;
pub mod numerics;
pub mod params;
pub mod shooting;
pub mod table;
pub mod verify;

pub use asymptotics::{compute_c1, AsymptoticModel, Expansion};
pub use error::{Error, Result};
pub use local::{LocalProblem, LocalSolution, PlateauGap};
pub use nonlocal::{NonlocalPoint, NonlocalProblem, Threshold};
pub use params::{LocalParams, ProblemParams, Tolerances};
pub use table::{CurveKind, CurveTable};
pub use verify::{Level, VerifyReport};

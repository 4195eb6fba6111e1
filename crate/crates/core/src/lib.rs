//! Branching random walks, their intensity transforms, the associated
//! random walk and weighted renewal functions.

pub mod brw;
pub mod error;
pub mod laplace;
pub mod law;
pub mod mc;
pub mod numeric;
pub mod offspring;
pub mod renewal;
pub mod seed;
pub mod stats;
pub mod walk;

pub use brw::{MartingaleTrace, Population, SimOptions, TraceRow, W1Tail};
pub use error::{Error, Result};
pub use laplace::{check_rate_conditions, ConditionReport, LaplaceProfile, MomentStatus, SilentReason, Verdict};
pub use law::{CountLaw, RealLaw, SignStructure, SupportKind, WalkLattice};
pub use mc::{McOptions, McOutcome};
pub use offspring::{ExtendedEstimate, LatticeEntry, OffspringKind, OffspringModel, PointConfiguration};
pub use renewal::{Classification, EstimateOptions, FinitenessCase, RenewalEstimate};
pub use seed::{Seed, SimRng};
pub use walk::{associated_step, StepLaw};

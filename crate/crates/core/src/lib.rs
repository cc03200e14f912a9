//! Curriculum teachers for continuously parameterized task spaces.
//!
//! A teacher repeatedly proposes a task parameter from a bounded
//! [`ParameterSpace`] and observes the episodic reward a black-box student
//! obtained on it. The strategies in [`teachers`] steer sampling toward
//! regions where the student's competence is changing fastest:
//!
//! - [`teachers::AlpGmm`]: Gaussian mixture over parameters and absolute
//!   learning progress.
//! - [`teachers::CovarGmm`]: Gaussian mixture over parameters, reward, and
//!   time; sampling follows positive time/reward covariance.
//! - [`teachers::Riac`]: recursive hyperbox splitting by learning progress.
//! - [`teachers::Oracle`]: expert sliding window.
//! - [`teachers::RandomTeacher`]: uniform baseline.
//!
//! [`toyenv`] provides a deterministic hypercube student for benchmarking.

pub mod error;
pub mod history;
pub mod space;
pub mod stats;
pub mod teacher;
pub mod teachers;
pub mod toyenv;

pub use error::{CoreError, Result};
pub use history::{History, SampleRecord};
pub use space::{ParameterSpace, ParameterVector};
pub use teacher::{ProposalSource, RunConfig, Teacher, TeacherSession};
pub use teachers::{build_teacher, TeacherKind, TeacherParams};

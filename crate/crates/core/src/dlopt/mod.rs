//! Optimization and normalization building blocks used by the inner-loop
//! trainer and available standalone.

mod batchnorm;
mod dropout;
mod momentum;
mod normalize;
mod schedule;

pub use batchnorm::{batchnorm_backward, batchnorm_forward, BatchNormState, BnCache, BnMode};
pub use dropout::{dropout_infer, dropout_train};
pub use momentum::{MomentumState, OptimizerKind};
pub use normalize::{lcn, whiten, Whitening};
pub use schedule::LrSchedule;

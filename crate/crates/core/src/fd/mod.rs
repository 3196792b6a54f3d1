//! Finite-domain integer constraints: interval domains, bounds-consistency
//! propagators and labeling.

mod domain;
mod post;
mod store;

pub use domain::{FdDomain, FD_LIMIT, INF, SUP};
pub use post::{fd_in, fd_post, is_fd_relation, parse_domain};
pub use store::{FdConstraint, FdMark, FdStore, Inconsistent, LabelStrategy, Labeling, ValueOrder, VarSelect};

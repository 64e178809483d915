//! Free volume of subgroups of free groups relative to cyclic splittings.

pub mod filling;
pub mod pingpong;
pub mod splittings;
pub mod stallings;
pub mod twisting;
pub mod volume;
pub mod words;

//! Instance files, reports, generators and the differential campaign
//! behind the `mcontrol` command.

pub mod campaign;
pub mod doc;
pub mod gen;
pub mod report;

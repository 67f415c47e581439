//! User-centric ultra-dense network snapshot simulator.
//!
//! A snapshot draws Poisson deployments of DBSs and UEs, optionally displaces
//! true positions around the reported ones, schedules UEs into disjoint
//! Szones on *perceived* positions and evaluates SINR on *actual* positions.

mod channel;
mod cop;
mod geometry;
mod kpi;
mod schedule;

pub use channel::{dbm_to_mw, dbm_to_w, path_loss_db, PowerModelParams, RadioParams, SPEED_OF_LIGHT};
pub use cop::{CopBounds, CopPoint, Range};
pub use geometry::{inject_position_error, sample_ppp, uniform_disk_offset, Node, Point2D};
pub use kpi::{average_kpis, snapshot_kpis, snapshot_report, Deployment, Flavor, KpiSample, SimParams, SnapshotReport};
pub use schedule::{schedule_and_associate, schedule_and_associate_with, schedule_in_order, ScheduleResult};

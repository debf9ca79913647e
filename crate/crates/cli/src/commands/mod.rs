pub mod analyze;
pub mod classify;
pub mod region;
pub mod sweep;
pub mod verify;

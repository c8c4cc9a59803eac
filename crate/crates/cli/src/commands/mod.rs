pub mod diagnose;
pub mod gen;
pub mod profile;
pub mod run;

//! Map-spec files and report documents for the `lightcone` command.

pub mod mapfile;
pub mod report;

pub use mapfile::{LoadedMap, MapFile, MapSpec, SchemaError, TableRow, TableRows};

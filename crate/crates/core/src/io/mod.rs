//! Config text, trajectory container and JSON/CSV reports.

pub mod config;
pub mod report;
pub mod trajectory;

pub use config::{dump_config, load_config, parse_config, GridSpec, PartitionOverride, SimulationConfig};
pub use report::{to_json_string, write_density_csv, write_json, SCHEMA_VERSION};
pub use trajectory::{load_trajectory, read_trajectory, save_trajectory, write_trajectory, FORMAT_VERSION, MAGIC};

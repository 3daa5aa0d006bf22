//! File formats and command-line front end for `specnorm-core`.

pub mod app;
pub mod io;
pub mod report;

pub use app::{run, CliConfig, CliError};
pub use io::{read_dense_csv, read_matrix, read_matrix_market, write_matrix_market, Format, ReadError};
pub use report::JsonReport;

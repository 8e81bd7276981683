//! Text and binary file formats: operator and part-map files, inequality
//! run files and the `KMSF`/`KMSM` dumps.

pub mod binary;
pub mod config;
pub mod spec;

pub use binary::{
    decode_field, decode_multiplier, encode_field, encode_multiplier, fnv1a64, read_file, write_file,
    MultiplierDump,
};
pub use config::{parse_run_file, read_input, InputFile, RunSpec};
pub use spec::{
    operator_alias, parse_operator_file, parse_partmap_file, CoefficientEntry, OperatorSource, PartMapSource,
};

pub mod analysis;
pub mod cli;
pub mod cluster;
pub mod error;
pub mod fluents;
pub mod lingua;
pub mod machine;
pub mod memory;
pub mod menagerie;

//! One module per subcommand.

pub mod audit;
pub mod bench;
pub mod build;
pub mod distexp;
pub mod iterate;
pub mod search;

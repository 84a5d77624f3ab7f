pub mod commands;
pub mod experiment;
pub mod formats;

pub mod expand;
pub mod pattern;
pub mod simulate;
pub mod synthesize;

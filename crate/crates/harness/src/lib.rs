pub mod battery;
pub mod gen;
pub mod graph;
pub mod oracle;

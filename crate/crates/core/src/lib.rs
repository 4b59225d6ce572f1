pub mod cli;
pub mod exec;
pub mod formula;
pub mod program;
pub mod prover;
pub mod syntax;
pub mod trace;
pub mod wf;

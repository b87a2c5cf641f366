//! Planning with action costs in the action language K^c.

pub mod background;
pub mod engine;
pub mod grounder;
pub mod planner;
pub mod rewriter;
pub mod syntax;
pub mod transition;
pub mod translator;

//! Language on top of the machines: tenses placed on timescales, a chart
//! parser whose patterns are chain machines, and activation networks of
//! synapse nodes.

pub mod activation;
pub mod parser;
pub mod tense;

pub use activation::{ActivationNetwork, Link, NetworkDoc, StepRecord};
pub use parser::{
    disambiguate, parse, parse_with, AgendaOrder, Context, ContextRule, Grammar, GrammarDoc, ParseItem,
    ParseResult, Pattern, Reading,
};
pub use tense::{tense_locate, Direction, TenseMap};

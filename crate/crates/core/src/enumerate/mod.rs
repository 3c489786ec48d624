//! Subset sweeps and theory enumeration.

mod checkpoint;
mod screen;
mod sweep;
mod theories;

pub use checkpoint::Checkpoint;
pub use sweep::{
    first_with_popcount, good_sets, next_same_popcount, sample_masks, sweep, verify_exactly_two, Progress,
    Scope, SweepOptions, SweepPolicy, SweepReport, TwoReport, DEFAULT_CHECKPOINT_INTERVAL,
};
pub use theories::{count_theories, enumerate_theories, extend_block, Mode, TheoryList, ORACLE_LIMIT};

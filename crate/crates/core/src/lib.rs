//! Supercharacter theories from character tables: exact cyclotomic
//! arithmetic, Wedderburn sums and their filtrations, the good/bad test for
//! character sets, and enumeration of theories.

pub mod chartab;
pub mod cyclotomic;
pub mod enumerate;
pub mod error;
pub mod fixtures;
pub mod modular;
pub mod partition;
pub mod theory;

pub use chartab::{parse_ctbl, CharacterTable, ClassFunction};
pub use cyclotomic::Cyclotomic;
pub use error::{Error, Result};
pub use partition::{refines, ClassPartition, IndexSet, IrrPartition, IrrSubset};
pub use theory::{
    class_partition_from, conjugation_partition, filtration, galois_partition, is_good, is_supertheory,
    max_theory, min_theory, table_rationality, wedderburn_sum, Rationality, Rejection, SuperTheory, Verdict,
    Witness,
};

//! Character tables bundled with the crate.

use crate::chartab::{parse_ctbl, CharacterTable};

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        const TABLES: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../../../tables/", $name, ".ctbl")))),*
        ];
    };
}

bundled!("trivial", "z2", "z3", "z4", "z5", "z6", "s3", "d4", "q8", "a4", "s4", "a5", "s7", "sp6_2",);

/// Names of the bundled tables, smallest first.
pub fn names() -> impl Iterator<Item = &'static str> {
    TABLES.iter().map(|(name, _)| *name)
}

/// Raw `.ctbl` text of a bundled table.
pub fn text(name: &str) -> Option<&'static str> {
    TABLES.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Parse a bundled table. Panics on an unknown name.
pub fn load(name: &str) -> CharacterTable {
    let text = text(name).unwrap_or_else(|| panic!("no bundled table named {name}"));
    parse_ctbl(text).expect("bundled tables are valid")
}

pub fn all() -> Vec<CharacterTable> {
    names().map(load).collect()
}

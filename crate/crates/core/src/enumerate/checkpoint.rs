//! Resumable progress for range sweeps. The file has three lines:
//!
//! ```text
//! <sha-256 of the table>
//! <last completed mask, decimal>
//! <tested> <bad> <good>[ goods=<mask>,<mask>,…]
//! ```
//!
//! Masks are in sweep coordinates (bit `b` is character `b+1`).

use std::fs;
use std::io::ErrorKind;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub digest: String,
    pub last: u64,
    pub tested: u64,
    pub bad: u64,
    pub goods: Vec<u64>,
}

fn field<T: std::str::FromStr>(s: Option<&str>, what: &str) -> Result<T> {
    s.and_then(|v| v.parse().ok()).ok_or_else(|| Error::Checkpoint(format!("missing or malformed {what}")))
}

impl Checkpoint {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let digest = lines
            .next()
            .filter(|d| d.len() == 64 && d.bytes().all(|b| b.is_ascii_hexdigit()))
            .ok_or_else(|| Error::Checkpoint("missing or malformed table hash".into()))?
            .to_string();
        let last = field(lines.next(), "cursor")?;
        let counters = lines.next().unwrap_or("");
        let mut parts = counters.split_whitespace();
        let tested: u64 = field(parts.next(), "tested count")?;
        let bad: u64 = field(parts.next(), "bad count")?;
        let good: u64 = field(parts.next(), "good count")?;
        let goods = match parts.next() {
            None => Vec::new(),
            Some(list) => list
                .strip_prefix("goods=")
                .ok_or_else(|| Error::Checkpoint("malformed good-set list".into()))?
                .split(',')
                .map(|m| field(Some(m), "good-set mask"))
                .collect::<Result<_>>()?,
        };
        if parts.next().is_some() || lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::Checkpoint("trailing data".into()));
        }
        if tested != bad + good || goods.len() as u64 != good {
            return Err(Error::Checkpoint("inconsistent counters".into()));
        }
        Ok(Checkpoint { digest, last, tested, bad, goods })
    }

    pub fn read(path: &Path) -> Result<Option<Self>> {
        match fs::read_to_string(path) {
            Ok(text) => Self::parse(&text).map(Some),
            Err(e) if e.kind() == ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    pub fn render(&self) -> String {
        let mut counters = format!("{} {} {}", self.tested, self.bad, self.goods.len());
        if !self.goods.is_empty() {
            let list: Vec<String> = self.goods.iter().map(u64::to_string).collect();
            counters.push_str(" goods=");
            counters.push_str(&list.join(","));
        }
        format!("{}\n{}\n{}\n", self.digest, self.last, counters)
    }

    /// Write through a temporary file so an interrupted write never leaves
    /// a truncated checkpoint behind.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        fs::write(&tmp, self.render())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

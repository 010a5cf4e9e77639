//! Memoization of volumes by canonical key.
//!
//! Each algorithm writes to its own namespace so the cross-checking routes
//! stay independent: a value computed by one method is never served to
//! another. Entries are deterministic functions of the key, so writes are
//! idempotent; concurrent workers may insert the same entry freely.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use crate::arith::Rational;
use crate::canonical::CanonicalKey;

/// One namespace per computation route.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CacheKind {
    QSplitting,
    QEdgeCover,
    RDefinition,
    RSplitting,
    PInclusionExclusion,
    PRecursive,
}

impl CacheKind {
    pub const ALL: [CacheKind; 6] = [
        CacheKind::QSplitting,
        CacheKind::QEdgeCover,
        CacheKind::RDefinition,
        CacheKind::RSplitting,
        CacheKind::PInclusionExclusion,
        CacheKind::PRecursive,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            CacheKind::QSplitting => "q",
            CacheKind::QEdgeCover => "qcover",
            CacheKind::RDefinition => "r",
            CacheKind::RSplitting => "rsplit",
            CacheKind::PInclusionExclusion => "p_ie",
            CacheKind::PRecursive => "p_rec",
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }

    fn index(self) -> usize {
        match self {
            CacheKind::QSplitting => 0,
            CacheKind::QEdgeCover => 1,
            CacheKind::RDefinition => 2,
            CacheKind::RSplitting => 3,
            CacheKind::PInclusionExclusion => 4,
            CacheKind::PRecursive => 5,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub entries: usize,
    pub hits: u64,
    pub misses: u64,
}

/// Canonical-key-indexed store of exact volumes.
#[derive(Default)]
pub struct VolumeCache {
    maps: [RwLock<HashMap<CanonicalKey, Rational>>; 6],
    hits: [AtomicU64; 6],
    misses: [AtomicU64; 6],
}

impl VolumeCache {
    pub fn new() -> Self {
        VolumeCache::default()
    }

    pub fn lookup(&self, kind: CacheKind, key: &CanonicalKey) -> Option<Rational> {
        let found = self.maps[kind.index()].read().unwrap().get(key).cloned();
        let counter = if found.is_some() {
            &self.hits
        } else {
            &self.misses
        };
        counter[kind.index()].fetch_add(1, Ordering::Relaxed);
        found
    }

    /// Idempotent insert: re-storing a key must carry the same value.
    pub fn store(&self, kind: CacheKind, key: CanonicalKey, value: Rational) {
        let mut map = self.maps[kind.index()].write().unwrap();
        if let Some(previous) = map.insert(key, value.clone()) {
            debug_assert_eq!(previous, value, "cache entries are write-once");
        }
    }

    pub fn stats(&self, kind: CacheKind) -> CacheStats {
        CacheStats {
            entries: self.maps[kind.index()].read().unwrap().len(),
            hits: self.hits[kind.index()].load(Ordering::Relaxed),
            misses: self.misses[kind.index()].load(Ordering::Relaxed),
        }
    }

    /// Writes every entry as a `tag|key<TAB>num/den` line.
    pub fn save(&self, mut out: impl Write) -> io::Result<()> {
        for kind in CacheKind::ALL {
            let map = self.maps[kind.index()].read().unwrap();
            let mut entries: Vec<(&CanonicalKey, &Rational)> = map.iter().collect();
            entries.sort_by_key(|(k, _)| (*k).clone());
            for (key, value) in entries {
                writeln!(out, "{}|{}\t{}", kind.tag(), key, value)?;
            }
        }
        Ok(())
    }

    /// Reads lines produced by [`VolumeCache::save`].
    pub fn load(&self, input: impl BufRead) -> io::Result<()> {
        for (number, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = || {
                io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("cache line {}", number + 1),
                )
            };
            let (head, value) = line.split_once('\t').ok_or_else(bad)?;
            let (tag, key) = head.split_once('|').ok_or_else(bad)?;
            let kind = CacheKind::from_tag(tag).ok_or_else(bad)?;
            let value = Rational::from_str(value).map_err(|_| bad())?;
            self.store(kind, CanonicalKey::from_raw(key.to_string()), value);
        }
        Ok(())
    }

    pub fn total_entries(&self) -> usize {
        CacheKind::ALL.iter().map(|&k| self.stats(k).entries).sum()
    }
}

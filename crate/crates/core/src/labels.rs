//! Sets of input-mesh indices.

use std::fmt;

use smallvec::SmallVec;

/// Largest number of input meshes a single evaluation accepts.
pub const MAX_LABELS: usize = 1024;

/// Bitset over input mesh indices. Trailing zero words are never stored,
/// so structural equality is set equality.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelSet(SmallVec<[u64; 2]>);

impl LabelSet {
    pub fn new() -> LabelSet {
        LabelSet(SmallVec::new())
    }

    pub fn single(i: usize) -> LabelSet {
        let mut s = LabelSet::new();
        s.insert(i);
        s
    }

    pub fn from_indices(it: impl IntoIterator<Item = usize>) -> LabelSet {
        let mut s = LabelSet::new();
        for i in it {
            s.insert(i);
        }
        s
    }

    fn trim(&mut self) {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    pub fn insert(&mut self, i: usize) {
        let (w, b) = (i / 64, i % 64);
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1u64 << b;
    }

    pub fn remove(&mut self, i: usize) {
        let (w, b) = (i / 64, i % 64);
        if w < self.0.len() {
            self.0[w] &= !(1u64 << b);
            self.trim();
        }
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        w < self.0.len() && self.0[w] & (1u64 << b) != 0
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, o: &LabelSet) {
        if self.0.len() < o.0.len() {
            self.0.resize(o.0.len(), 0);
        }
        for (a, b) in self.0.iter_mut().zip(o.0.iter()) {
            *a |= *b;
        }
    }

    pub fn union(&self, o: &LabelSet) -> LabelSet {
        let mut s = self.clone();
        s.union_with(o);
        s
    }

    pub fn intersection(&self, o: &LabelSet) -> LabelSet {
        let mut s = LabelSet(self.0.iter().zip(o.0.iter()).map(|(a, b)| a & b).collect());
        s.trim();
        s
    }

    /// Symmetric difference.
    pub fn toggle(&mut self, o: &LabelSet) {
        if self.0.len() < o.0.len() {
            self.0.resize(o.0.len(), 0);
        }
        for (a, b) in self.0.iter_mut().zip(o.0.iter()) {
            *a ^= *b;
        }
        self.trim();
    }

    pub fn intersects(&self, o: &LabelSet) -> bool {
        self.0.iter().zip(o.0.iter()).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, o: &LabelSet) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, a)| a & !o.0.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + b)
            })
        })
    }

    /// Lowercase hexadecimal, most significant digit first, `0` when empty.
    pub fn to_hex(&self) -> String {
        if self.0.is_empty() {
            return "0".to_string();
        }
        let mut s = format!("{:x}", self.0[self.0.len() - 1]);
        for w in self.0.iter().rev().skip(1) {
            s.push_str(&format!("{w:016x}"));
        }
        s
    }

    pub fn from_hex(s: &str) -> Option<LabelSet> {
        let s = s.trim();
        let s = s.strip_prefix("0x").unwrap_or(s);
        if s.is_empty() || !s.bytes().all(|c| c.is_ascii_hexdigit()) {
            return None;
        }
        let mut words = SmallVec::new();
        let bytes = s.as_bytes();
        let mut end = bytes.len();
        while end > 0 {
            let start = end.saturating_sub(16);
            let chunk = std::str::from_utf8(&bytes[start..end]).ok()?;
            words.push(u64::from_str_radix(chunk, 16).ok()?);
            end = start;
        }
        let mut set = LabelSet(words);
        set.trim();
        Some(set)
    }

    /// Low byte of the bitmask, used where a compact tag is enough.
    pub fn low_byte(&self) -> u8 {
        self.0.first().map(|w| (*w & 0xff) as u8).unwrap_or(0)
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for LabelSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> LabelSet {
        LabelSet::from_indices(it)
    }
}

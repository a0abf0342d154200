//! Fixed-length bit vector backed by `u64` words.
//!
//! Bits past `len` in the last word are always zero; every mutating method
//! restores that before returning, so `count_ones` and word-wise equality
//! are exact.

use std::fmt;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![!0; len.div_ceil(WORD)],
        };
        v.trim();
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] &= !(1 << (i % WORD));
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn none(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn all(&self) -> bool {
        self.count_ones() == self.len
    }

    pub fn or_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn and_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn and_not_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn not(&self) -> Self {
        let mut v = Self {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        v.trim();
        v
    }

    /// Popcount of `self & other` without allocating.
    pub fn and_count(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Iterates set bits in ascending order.
    pub fn ones_iter(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            idx: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }

    /// ORs `self` rotated left by `shift` (bit `x` lands on `(x + shift) mod len`)
    /// into `dst`.
    pub fn or_rotated_into(&self, shift: usize, dst: &mut Self) {
        debug_assert_eq!(self.len, dst.len);
        let n = self.len;
        if n == 0 {
            return;
        }
        let shift = shift % n;
        // [0, n - shift) -> [shift, n)
        self.or_range_into(0, n - shift, shift, dst);
        // [n - shift, n) -> [0, shift)
        if shift > 0 {
            self.or_range_into(n - shift, shift, 0, dst);
        }
    }

    /// ORs bits `[src, src + count)` of `self` into `dst` starting at `dst_start`.
    fn or_range_into(&self, src: usize, count: usize, dst_start: usize, dst: &mut Self) {
        let mut done = 0;
        while done < count {
            let d = dst_start + done;
            let offset = d % WORD;
            let take = (WORD - offset).min(count - done);
            let chunk = self.read_bits(src + done, take);
            dst.words[d / WORD] |= chunk << offset;
            done += take;
        }
    }

    /// Reads `count <= 64` bits starting at bit `pos`, low bit first.
    fn read_bits(&self, pos: usize, count: usize) -> u64 {
        debug_assert!((1..=WORD).contains(&count));
        let w = pos / WORD;
        let off = pos % WORD;
        let mut v = self.words[w] >> off;
        if off != 0 && w + 1 < self.words.len() {
            v |= self.words[w + 1] << (WORD - off);
        }
        if count < WORD {
            v &= (1u64 << count) - 1;
        }
        v
    }

    fn trim(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ones_iter()).finish()
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let tz = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * WORD + tz);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

//! Packed GF(2) vectors and row-reduced spans.
//!
//! Everything that is linear algebra in the crate (constraint spans,
//! filtration layers, additivity ranks, canonical forms) goes through
//! [`Bits`] and [`Basis`]. Row reduction is deterministic: the pivot of a
//! row is its lowest set bit and rows are kept fully reduced and ordered by
//! pivot, so equal spans produce identical bases.

use std::cmp::Ordering;
use std::fmt;

/// Bit vector over GF(2), packed into 64-bit limbs.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    limbs: Vec<u64>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits {
            len,
            limbs: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Bits::zeros(len);
        for i in indices {
            b.set(i, true);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.limbs[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let (w, b) = (i / 64, i % 64);
        if v {
            self.limbs[w] |= 1 << b;
        } else {
            self.limbs[w] &= !(1 << b);
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.limbs[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        let mut r = self.clone();
        r.xor_assign(other);
        r
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.limbs.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn lowest_set(&self) -> Option<usize> {
        for (i, &w) in self.limbs.iter().enumerate() {
            if w != 0 {
                return Some(i * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> Ones<'_> {
        Ones {
            bits: self,
            limb: 0,
            cur: self.limbs.first().copied().unwrap_or(0),
        }
    }

    /// Parity of the AND with `other` (GF(2) inner product).
    pub fn dot(&self, other: &Bits) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.limbs.iter().zip(&other.limbs) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    /// Image under a coordinate permutation: bit `i` moves to `perm(i)`.
    pub fn permute(&self, perm: impl Fn(usize) -> usize) -> Bits {
        let mut out = Bits::zeros(self.len);
        for i in self.ones() {
            out.set(perm(i), true);
        }
        out
    }

    /// Order matching the textual bit-string order (index 0 compared first).
    pub fn lex_cmp(&self, other: &Bits) -> Ordering {
        for (a, b) in self.limbs.iter().zip(&other.limbs) {
            let ord = a.reverse_bits().cmp(&b.reverse_bits());
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for Bits {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bits {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.lex_cmp(other))
    }
}

pub struct Ones<'a> {
    bits: &'a Bits,
    limb: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let b = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.limb * 64 + b);
            }
            self.limb += 1;
            if self.limb >= self.bits.limbs.len() {
                return None;
            }
            self.cur = self.bits.limbs[self.limb];
        }
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Row-reduced GF(2) span. Rows are fully reduced, pivots strictly
/// increasing, so two bases are equal iff they span the same space.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Basis {
    width: usize,
    rows: Vec<Bits>,
}

impl Basis {
    pub fn new(width: usize) -> Self {
        Basis { width, rows: Vec::new() }
    }

    pub fn from_rows<'a>(width: usize, rows: impl IntoIterator<Item = &'a Bits>) -> Self {
        let mut b = Basis::new(width);
        for r in rows {
            b.insert(r);
        }
        b
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Bits] {
        &self.rows
    }

    pub fn reduce(&self, v: &Bits) -> Bits {
        let mut v = v.clone();
        for row in &self.rows {
            let p = row.lowest_set().expect("basis rows are nonzero");
            if v.get(p) {
                v.xor_assign(row);
            }
        }
        v
    }

    pub fn contains(&self, v: &Bits) -> bool {
        self.reduce(v).is_zero()
    }

    /// Add a vector to the span. Returns false if it was already spanned.
    pub fn insert(&mut self, v: &Bits) -> bool {
        debug_assert_eq!(v.len(), self.width);
        let r = self.reduce(v);
        let Some(p) = r.lowest_set() else {
            return false;
        };
        for row in &mut self.rows {
            if row.get(p) {
                row.xor_assign(&r);
            }
        }
        let pos = self
            .rows
            .partition_point(|row| row.lowest_set().unwrap() < p);
        self.rows.insert(pos, r);
        true
    }

    /// Basis of the solution space of `row · x = 0` for all rows.
    pub fn kernel(&self) -> Basis {
        let pivots: Vec<usize> = self.rows.iter().map(|r| r.lowest_set().unwrap()).collect();
        let mut out = Basis::new(self.width);
        for f in 0..self.width {
            if pivots.contains(&f) {
                continue;
            }
            let mut v = Bits::zeros(self.width);
            v.set(f, true);
            for (row, &p) in self.rows.iter().zip(&pivots) {
                if row.get(f) {
                    v.set(p, true);
                }
            }
            out.insert(&v);
        }
        out
    }

    /// All vectors in the span. Guarded: only sensible for small dimension.
    pub fn enumerate(&self) -> Vec<Bits> {
        assert!(self.dim() <= 26, "span too large to enumerate");
        let mut out = Vec::with_capacity(1 << self.dim());
        out.push(Bits::zeros(self.width));
        for row in &self.rows {
            let mut next = Vec::with_capacity(out.len() * 2);
            for v in &out {
                next.push(v.clone());
                next.push(v.xor(row));
            }
            out = next;
        }
        out
    }
}

//! Words over {0,1}, finite tree automorphisms as portraits, and word sets.
//!
//! A depth-`d` automorphism is stored as its portrait: one activity bit per
//! word of length `< d`, in level order. Within a level the position of a
//! word is its value read as binary, leftmost letter most significant. The
//! all-zero portrait is the identity and the portrait map is the identity
//! representation at finite depth.
//!
//! Composition is fixed as `(gh)(w) = g(h(w))`, equivalently
//! `(gh)_(w) = g_(h(w)) + h_(w)` on labels; the wreath identities in the
//! tests pin this convention.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::Bits;

/// Structural limit on tree depth (word values fit in u16).
pub const DEPTH_LIMIT: usize = 14;
/// Default depth cap used by the CLI and file loaders (portraits <= 4095 bits).
pub const DEFAULT_DEPTH_CAP: usize = 12;
/// Default cap on materialized group order.
pub const DEFAULT_ORDER_CAP: usize = 1 << 24;

fn check_depth(depth: usize) -> Result<()> {
    if depth == 0 || depth > DEPTH_LIMIT {
        return Err(Error::DepthRange {
            depth,
            max: DEPTH_LIMIT,
        });
    }
    Ok(())
}

#[inline]
fn level_offset(level: usize) -> usize {
    (1 << level) - 1
}

/// A finite word over {0,1}; the empty word is the tree root.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    len: u8,
    value: u16,
}

impl Word {
    pub const EPSILON: Word = Word { len: 0, value: 0 };

    pub fn new(len: usize, value: usize) -> Result<Word> {
        if len > DEPTH_LIMIT {
            return Err(Error::WordLength {
                what: "word",
                len,
            });
        }
        if value >= 1usize << len {
            return Err(Error::IndexRange {
                what: "word value",
                index: value,
            });
        }
        Ok(Word {
            len: len as u8,
            value: value as u16,
        })
    }

    pub fn from_letters(letters: &[u8]) -> Result<Word> {
        let mut value = 0usize;
        for &l in letters {
            debug_assert!(l <= 1);
            value = value << 1 | l as usize;
        }
        Word::new(letters.len(), value)
    }

    /// `x^n`: the letter `x` repeated `n` times.
    pub fn repeated(letter: u8, n: usize) -> Result<Word> {
        let value = if letter == 0 { 0 } else { (1usize << n) - 1 };
        Word::new(n, value)
    }

    /// Parses "0"/"1" strings; "e" or the empty string is the empty word.
    pub fn parse(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "e" {
            return Ok(Word::EPSILON);
        }
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => letters.push(0),
                '1' => letters.push(1),
                _ => return Err(Error::Parse(format!("bad word character {c:?} in {s:?}"))),
            }
        }
        Word::from_letters(&letters)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self) -> usize {
        self.value as usize
    }

    /// Letter at position `i` (0 = leftmost).
    pub fn letter(&self, i: usize) -> u8 {
        debug_assert!(i < self.len());
        (self.value >> (self.len() - 1 - i) & 1) as u8
    }

    pub fn concat(&self, tail: Word) -> Result<Word> {
        Word::new(
            self.len() + tail.len(),
            self.value() << tail.len() | tail.value(),
        )
    }

    pub fn child(&self, letter: u8) -> Result<Word> {
        Word::new(self.len() + 1, self.value() << 1 | letter as usize)
    }

    pub fn prefix(&self, n: usize) -> Word {
        debug_assert!(n <= self.len());
        Word {
            len: n as u8,
            value: (self.value() >> (self.len() - n)) as u16,
        }
    }

    /// Position of this word in the level-order portrait layout.
    pub fn node_index(&self) -> usize {
        level_offset(self.len()) + self.value()
    }

    pub fn all_of_length(n: usize) -> impl Iterator<Item = Word> {
        (0..1usize << n).map(move |v| Word {
            len: n as u8,
            value: v as u16,
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "e");
        }
        for i in 0..self.len() {
            write!(f, "{}", self.letter(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A depth-`d` binary tree automorphism, stored as its portrait.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Element {
    depth: u8,
    labels: Bits,
}

impl Element {
    pub fn identity(depth: usize) -> Result<Element> {
        check_depth(depth)?;
        Ok(Element {
            depth: depth as u8,
            labels: Bits::zeros(level_offset(depth)),
        })
    }

    /// The standard generator `a_i`: single nonzero label at `0^i`, swapping
    /// the subtrees below it. Requires `0 <= i <= depth-1`.
    pub fn standard_generator(depth: usize, i: usize) -> Result<Element> {
        check_depth(depth)?;
        if i >= depth {
            return Err(Error::IndexRange {
                what: "generator level",
                index: i,
            });
        }
        let mut e = Element::identity(depth)?;
        e.labels.set(Word::repeated(0, i)?.node_index(), true);
        Ok(e)
    }

    pub fn standard_generators(depth: usize) -> Result<Vec<Element>> {
        (0..depth)
            .map(|i| Element::standard_generator(depth, i))
            .collect()
    }

    pub fn from_label_bits(depth: usize, labels: Bits) -> Result<Element> {
        check_depth(depth)?;
        if labels.len() != level_offset(depth) {
            return Err(Error::Parse(format!(
                "label vector has {} bits, depth {} needs {}",
                labels.len(),
                depth,
                level_offset(depth)
            )));
        }
        Ok(Element {
            depth: depth as u8,
            labels,
        })
    }

    pub fn from_support(depth: usize, words: impl IntoIterator<Item = Word>) -> Result<Element> {
        let mut e = Element::identity(depth)?;
        for w in words {
            if w.len() >= depth {
                return Err(Error::WordLength {
                    what: "support word",
                    len: w.len(),
                });
            }
            e.labels.set(w.node_index(), true);
        }
        Ok(e)
    }

    pub fn depth(&self) -> usize {
        self.depth as usize
    }

    pub fn label_bits(&self) -> &Bits {
        &self.labels
    }

    /// Activity label at `w` (`|w| < depth`).
    pub fn label(&self, w: Word) -> bool {
        debug_assert!(w.len() < self.depth());
        self.labels.get(w.node_index())
    }

    pub fn is_identity(&self) -> bool {
        self.labels.is_zero()
    }

    /// Words carrying a nonzero label.
    pub fn support(&self) -> Vec<Word> {
        let mut out = Vec::new();
        for level in 0..self.depth() {
            for v in 0..1usize << level {
                if self.labels.get(level_offset(level) + v) {
                    out.push(Word::new(level, v).unwrap());
                }
            }
        }
        out
    }

    fn check_same_depth(&self, other: &Element) -> Result<()> {
        if self.depth != other.depth {
            return Err(Error::DepthMismatch {
                left: self.depth(),
                right: other.depth(),
            });
        }
        Ok(())
    }

    /// Per-node image values under this automorphism: `img[w] = value of
    /// self(w)` within its level, for every node of the portrait.
    fn images(&self) -> Vec<u32> {
        let d = self.depth();
        let mut img = vec![0u32; level_offset(d)];
        for level in 0..d.saturating_sub(1) {
            let off = level_offset(level);
            let child_off = level_offset(level + 1);
            for v in 0..1usize << level {
                let iv = img[off + v] as usize;
                let swap = self.labels.get(off + v) as usize;
                img[child_off + 2 * v] = (2 * iv + swap) as u32;
                img[child_off + 2 * v + 1] = (2 * iv + (1 - swap)) as u32;
            }
        }
        img
    }

    /// Group product under `(gh)(w) = g(h(w))`.
    pub fn compose(&self, h: &Element) -> Result<Element> {
        self.check_same_depth(h)?;
        let d = self.depth();
        let img = h.images();
        let mut labels = Bits::zeros(level_offset(d));
        for level in 0..d {
            let off = level_offset(level);
            for v in 0..1usize << level {
                let moved = self.labels.get(off + img[off + v] as usize);
                if moved ^ h.labels.get(off + v) {
                    labels.set(off + v, true);
                }
            }
        }
        Ok(Element {
            depth: self.depth,
            labels,
        })
    }

    pub fn inverse(&self) -> Element {
        // g^{-1} must undo at g(w) what g does at w.
        let d = self.depth();
        let img = self.images();
        let mut labels = Bits::zeros(level_offset(d));
        for level in 0..d {
            let off = level_offset(level);
            for v in 0..1usize << level {
                if self.labels.get(off + v) {
                    labels.set(off + img[off + v] as usize, true);
                }
            }
        }
        Element {
            depth: self.depth,
            labels,
        }
    }

    /// `g^h = h^{-1} g h`.
    pub fn conjugate_by(&self, h: &Element) -> Result<Element> {
        h.inverse().compose(self)?.compose(h)
    }

    /// `[a, b] = a^{-1} b^{-1} a b`.
    pub fn commutator(a: &Element, b: &Element) -> Result<Element> {
        a.inverse().compose(&b.inverse())?.compose(a)?.compose(b)
    }

    /// Image of a word (length at most `depth`).
    pub fn act(&self, w: Word) -> Result<Word> {
        if w.len() > self.depth() {
            return Err(Error::WordLength {
                what: "act",
                len: w.len(),
            });
        }
        let mut prefix = 0usize;
        let mut out = 0usize;
        for i in 0..w.len() {
            let letter = w.letter(i) as usize;
            let label = self.labels.get(level_offset(i) + prefix) as usize;
            out = out << 1 | (letter ^ label);
            prefix = prefix << 1 | letter;
        }
        Word::new(w.len(), out)
    }

    /// Section at `w`: the automorphism of the subtree below `w`,
    /// transported to the root. Requires `|w| < depth`.
    pub fn section(&self, w: Word) -> Result<Element> {
        if w.len() >= self.depth() {
            return Err(Error::WordLength {
                what: "section",
                len: w.len(),
            });
        }
        let out_depth = self.depth() - w.len();
        let mut labels = Bits::zeros(level_offset(out_depth));
        for level in 0..out_depth {
            let src_off = level_offset(level + w.len()) + (w.value() << level);
            let dst_off = level_offset(level);
            for v in 0..1usize << level {
                if self.labels.get(src_off + v) {
                    labels.set(dst_off + v, true);
                }
            }
        }
        Ok(Element {
            depth: out_depth as u8,
            labels,
        })
    }

    /// Restriction homomorphism onto the depth-`k` quotient.
    pub fn project(&self, k: usize) -> Result<Element> {
        if k == 0 || k > self.depth() {
            return Err(Error::IndexRange {
                what: "projection depth",
                index: k,
            });
        }
        let mut labels = Bits::zeros(level_offset(k));
        for i in 0..level_offset(k) {
            if self.labels.get(i) {
                labels.set(i, true);
            }
        }
        Ok(Element {
            depth: k as u8,
            labels,
        })
    }

    /// Pointwise label sum. This is the full-shift group operation on
    /// portraits and is generally different from `compose`.
    pub fn xor(&self, other: &Element) -> Result<Element> {
        self.check_same_depth(other)?;
        Ok(Element {
            depth: self.depth,
            labels: self.labels.xor(&other.labels),
        })
    }

    /// Assembles `sigma^active (left, right)` from two depth-`m` sections.
    pub fn wreath(active: bool, left: &Element, right: &Element) -> Result<Element> {
        left.check_same_depth(right)?;
        let m = left.depth();
        check_depth(m + 1)?;
        let mut labels = Bits::zeros(level_offset(m + 1));
        labels.set(0, active);
        for level in 0..m {
            let src_off = level_offset(level);
            let dst_off = level_offset(level + 1);
            let half = 1usize << level;
            for v in 0..half {
                if left.labels.get(src_off + v) {
                    labels.set(dst_off + v, true);
                }
                if right.labels.get(src_off + v) {
                    labels.set(dst_off + half + v, true);
                }
            }
        }
        Ok(Element {
            depth: (m + 1) as u8,
            labels,
        })
    }

    /// Finite truncation of the branch `delta_w(h)`: acts as `h` below `w`,
    /// trivially elsewhere. Requires `|w| + depth(h) <= depth`.
    pub fn branch(depth: usize, w: Word, h: &Element) -> Result<Element> {
        check_depth(depth)?;
        if w.len() + h.depth() > depth {
            return Err(Error::WordLength {
                what: "branch",
                len: w.len() + h.depth(),
            });
        }
        let mut e = Element::identity(depth)?;
        for level in 0..h.depth() {
            let src_off = level_offset(level);
            let dst_off = level_offset(level + w.len()) + (w.value() << level);
            for v in 0..1usize << level {
                if h.labels.get(src_off + v) {
                    e.labels.set(dst_off + v, true);
                }
            }
        }
        Ok(e)
    }

    /// XOR of labels over a word set.
    pub fn alpha_sum(&self, s: &LevelSet) -> Result<bool> {
        if s.depth() > self.depth() {
            return Err(Error::DepthMismatch {
                left: s.depth(),
                right: self.depth(),
            });
        }
        let mut acc = false;
        for w in s.iter() {
            acc ^= self.label(w);
        }
        Ok(acc)
    }

    /// XOR of all labels on level `k`.
    pub fn alpha_level(&self, k: usize) -> Result<bool> {
        if k >= self.depth() {
            return Err(Error::IndexRange {
                what: "level",
                index: k,
            });
        }
        let off = level_offset(k);
        let mut acc = false;
        for v in 0..1usize << k {
            acc ^= self.labels.get(off + v);
        }
        Ok(acc)
    }

    /// XOR of level parities over a set of levels.
    pub fn alpha_levels(&self, levels: impl IntoIterator<Item = usize>) -> Result<bool> {
        let mut acc = false;
        for k in levels {
            acc ^= self.alpha_level(k)?;
        }
        Ok(acc)
    }

    /// Elementwise image of a word set; always a bijection.
    pub fn act_on_set(&self, s: &LevelSet) -> Result<LevelSet> {
        if s.depth() > self.depth() {
            return Err(Error::DepthMismatch {
                left: s.depth(),
                right: self.depth(),
            });
        }
        let words = s
            .iter()
            .map(|w| self.act(w))
            .collect::<Result<BTreeSet<_>>>()?;
        LevelSet::new(s.depth(), words)
    }

    /// Least `n >= 1` with different depth-`n` quotients; `None` if equal.
    /// This integer represents the profinite distance `1/|G(n)|`.
    pub fn first_disagreement(&self, other: &Element) -> Result<Option<usize>> {
        self.check_same_depth(other)?;
        for level in 0..self.depth() {
            let off = level_offset(level);
            for v in 0..1usize << level {
                if self.labels.get(off + v) != other.labels.get(off + v) {
                    return Ok(Some(level + 1));
                }
            }
        }
        Ok(None)
    }

    /// Parses the portrait text encoding, e.g. `0|10|0000`.
    pub fn parse(s: &str) -> Result<Element> {
        let segments: Vec<&str> = s.trim().split('|').collect();
        let depth = segments.len();
        check_depth(depth)?;
        let mut labels = Bits::zeros(level_offset(depth));
        for (level, seg) in segments.iter().enumerate() {
            if seg.len() != 1 << level {
                return Err(Error::Parse(format!(
                    "portrait level {level} has {} characters, expected {}",
                    seg.len(),
                    1 << level
                )));
            }
            for (v, c) in seg.chars().enumerate() {
                match c {
                    '0' => {}
                    '1' => labels.set(level_offset(level) + v, true),
                    _ => {
                        return Err(Error::Parse(format!("bad portrait character {c:?}")));
                    }
                }
            }
        }
        Ok(Element {
            depth: depth as u8,
            labels,
        })
    }

    /// Deterministic order matching the portrait string order.
    pub fn lex_cmp(&self, other: &Element) -> std::cmp::Ordering {
        self.labels.lex_cmp(&other.labels)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for level in 0..self.depth() {
            if level > 0 {
                write!(f, "|")?;
            }
            let off = level_offset(level);
            for v in 0..1usize << level {
                write!(f, "{}", if self.labels.get(off + v) { '1' } else { '0' })?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A finite set of words, all of length `< depth`, with set semantics.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LevelSet {
    depth: u8,
    words: BTreeSet<Word>,
}

impl LevelSet {
    pub fn new(depth: usize, words: impl IntoIterator<Item = Word>) -> Result<LevelSet> {
        check_depth(depth)?;
        let words: BTreeSet<Word> = words.into_iter().collect();
        for w in &words {
            if w.len() >= depth {
                return Err(Error::WordLength {
                    what: "level-set word",
                    len: w.len(),
                });
            }
        }
        Ok(LevelSet {
            depth: depth as u8,
            words,
        })
    }

    pub fn empty(depth: usize) -> Result<LevelSet> {
        LevelSet::new(depth, [])
    }

    /// `X^k`: all words of length `k`.
    pub fn full_level(depth: usize, k: usize) -> Result<LevelSet> {
        if k >= depth {
            return Err(Error::IndexRange {
                what: "level",
                index: k,
            });
        }
        LevelSet::new(depth, Word::all_of_length(k))
    }

    /// `X^J`: union of full levels.
    pub fn levels(depth: usize, ks: impl IntoIterator<Item = usize>) -> Result<LevelSet> {
        let mut words = BTreeSet::new();
        for k in ks {
            if k >= depth {
                return Err(Error::IndexRange {
                    what: "level",
                    index: k,
                });
            }
            words.extend(Word::all_of_length(k));
        }
        LevelSet::new(depth, words)
    }

    /// `xX^{j-1}`: the half of level `j` below the first-level vertex `x`.
    pub fn half_level(depth: usize, j: usize, first_letter: u8) -> Result<LevelSet> {
        if j == 0 || j >= depth {
            return Err(Error::IndexRange {
                what: "half level",
                index: j,
            });
        }
        let prefix = Word::new(1, first_letter as usize)?;
        LevelSet::prefixed_levels(depth, prefix, [j - 1])
    }

    /// `prefix . X^K`: words `prefix u` with `|u| in ks`.
    pub fn prefixed_levels(
        depth: usize,
        prefix: Word,
        ks: impl IntoIterator<Item = usize>,
    ) -> Result<LevelSet> {
        let mut words = BTreeSet::new();
        for k in ks {
            for u in Word::all_of_length(k) {
                words.insert(prefix.concat(u)?);
            }
        }
        LevelSet::new(depth, words)
    }

    pub fn depth(&self) -> usize {
        self.depth as usize
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: Word) -> bool {
        self.words.contains(&w)
    }

    pub fn iter(&self) -> impl Iterator<Item = Word> + '_ {
        self.words.iter().copied()
    }

    pub fn sym_diff(&self, other: &LevelSet) -> Result<LevelSet> {
        if self.depth != other.depth {
            return Err(Error::DepthMismatch {
                left: self.depth(),
                right: other.depth(),
            });
        }
        LevelSet::new(
            self.depth(),
            self.words
                .symmetric_difference(&other.words)
                .copied()
                .collect::<Vec<_>>(),
        )
    }

    pub fn union(&self, other: &LevelSet) -> Result<LevelSet> {
        if self.depth != other.depth {
            return Err(Error::DepthMismatch {
                left: self.depth(),
                right: other.depth(),
            });
        }
        LevelSet::new(
            self.depth(),
            self.words.union(&other.words).copied().collect::<Vec<_>>(),
        )
    }

    /// Indicator vector over portrait coordinates (width `2^depth - 1`).
    pub fn indicator(&self) -> Bits {
        Bits::from_indices(
            level_offset(self.depth()),
            self.words.iter().map(|w| w.node_index()),
        )
    }

    pub fn from_indicator(depth: usize, bits: &Bits) -> Result<LevelSet> {
        check_depth(depth)?;
        let mut words = BTreeSet::new();
        for i in bits.ones() {
            let level = (i + 1).ilog2() as usize;
            words.insert(Word::new(level, i - level_offset(level))?);
        }
        LevelSet::new(depth, words)
    }
}

impl fmt::Display for LevelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for w in &self.words {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: an automorphism as the permutation of all words
    /// of length <= d it induces, composed with plain function composition.
    pub(crate) fn as_permutation(g: &Element) -> Vec<Vec<usize>> {
        (0..=g.depth())
            .map(|n| {
                Word::all_of_length(n)
                    .map(|w| g.act(w).unwrap().value())
                    .collect()
            })
            .collect()
    }

    fn compose_perms(g: &[Vec<usize>], h: &[Vec<usize>]) -> Vec<Vec<usize>> {
        // (gh)(w) = g(h(w))
        g.iter()
            .zip(h)
            .map(|(gl, hl)| hl.iter().map(|&v| gl[v]).collect())
            .collect()
    }

    fn all_elements(d: usize) -> Vec<Element> {
        let n = level_offset(d);
        (0..1usize << n)
            .map(|mask| {
                Element::from_label_bits(d, Bits::from_indices(n, (0..n).filter(|i| mask >> i & 1 == 1)))
                    .unwrap()
            })
            .collect()
    }

    #[test]
    fn standard_generator_portraits() {
        assert_eq!(Element::standard_generator(2, 0).unwrap().to_string(), "1|00");
        assert_eq!(Element::standard_generator(2, 1).unwrap().to_string(), "0|10");
        assert_eq!(
            Element::standard_generator(3, 2).unwrap().to_string(),
            "0|00|1000"
        );
    }

    #[test]
    fn generators_are_involutions() {
        for d in 1..=6 {
            for i in 0..d {
                let a = Element::standard_generator(d, i).unwrap();
                assert!(a.compose(&a).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn composition_convention_examples() {
        let a0 = Element::standard_generator(2, 0).unwrap();
        let a1 = Element::standard_generator(2, 1).unwrap();
        assert!(a0.compose(&a0).unwrap().is_identity());
        // (a1 a0) = sigma(id, sigma), (a0 a1) = sigma(sigma, id)
        assert_eq!(a1.compose(&a0).unwrap().to_string(), "1|01");
        assert_eq!(a0.compose(&a1).unwrap().to_string(), "1|10");
    }

    #[test]
    fn compose_matches_permutation_oracle_exhaustively() {
        for d in 1..=3 {
            let elems = all_elements(d);
            for g in &elems {
                for h in &elems {
                    let composed = g.compose(h).unwrap();
                    let expect = compose_perms(&as_permutation(g), &as_permutation(h));
                    assert_eq!(as_permutation(&composed), expect, "g={g} h={h}");
                }
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let a0 = Element::standard_generator(2, 0).unwrap();
        let a1 = Element::standard_generator(2, 1).unwrap();
        assert!(Element::identity(3).unwrap().inverse().is_identity());
        assert_eq!(a1.inverse(), a1);
        let g = a1.compose(&a0).unwrap();
        assert_eq!(g.inverse(), a0.compose(&a1).unwrap());
        assert!(g.compose(&g.inverse()).unwrap().is_identity());
    }

    #[test]
    fn act_examples() {
        let a0 = Element::standard_generator(3, 0).unwrap();
        assert_eq!(a0.act(Word::parse("01").unwrap()).unwrap().to_string(), "11");
        let a1 = Element::standard_generator(2, 1).unwrap();
        assert_eq!(a1.act(Word::parse("00").unwrap()).unwrap().to_string(), "01");
        let id = Element::identity(3).unwrap();
        for w in Word::all_of_length(3) {
            assert_eq!(id.act(w).unwrap(), w);
        }
    }

    #[test]
    fn section_examples() {
        let a1 = Element::standard_generator(2, 1).unwrap();
        let a0d1 = Element::standard_generator(1, 0).unwrap();
        assert_eq!(a1.section(Word::parse("0").unwrap()).unwrap(), a0d1);
        let g = a1
            .compose(&Element::standard_generator(2, 0).unwrap())
            .unwrap(); // "1|01"
        assert_eq!(g.section(Word::parse("1").unwrap()).unwrap(), a0d1);
        let id = Element::identity(4).unwrap();
        assert!(id.section(Word::parse("101").unwrap()).unwrap().is_identity());
    }

    #[test]
    fn section_cocycle_exhaustive_small() {
        // (gh)_w = g_{h(w)} h_w for every word
        for d in 2..=3 {
            let elems = all_elements(d);
            for g in elems.iter().step_by(3) {
                for h in elems.iter().step_by(5) {
                    let gh = g.compose(h).unwrap();
                    for len in 1..d {
                        for w in Word::all_of_length(len) {
                            let lhs = gh.section(w).unwrap();
                            let rhs = g
                                .section(h.act(w).unwrap())
                                .unwrap()
                                .compose(&h.section(w).unwrap())
                                .unwrap();
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn branch_examples() {
        let sigma = Element::standard_generator(1, 0).unwrap();
        let a1 = Element::standard_generator(2, 1).unwrap();
        assert_eq!(
            Element::branch(2, Word::parse("0").unwrap(), &sigma).unwrap(),
            a1
        );
        let g = Element::parse("1|01|0010").unwrap();
        assert_eq!(Element::branch(3, Word::EPSILON, &g).unwrap(), g);
    }

    #[test]
    fn branch_conjugation_moves_branches() {
        // delta_1(h) conjugated by a_0 equals delta_0(h)
        let h = Element::standard_generator(1, 0).unwrap();
        let a0 = Element::standard_generator(3, 0).unwrap();
        let left = Element::branch(3, Word::parse("1").unwrap(), &h)
            .unwrap()
            .conjugate_by(&a0)
            .unwrap();
        let right = Element::branch(3, Word::parse("0").unwrap(), &h).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn project_examples() {
        let a1 = Element::standard_generator(2, 1).unwrap();
        assert!(a1.project(1).unwrap().is_identity());
        let a0 = Element::standard_generator(3, 0).unwrap();
        assert_eq!(a0.project(1).unwrap().to_string(), "1");
        let g = Element::parse("1|01|0010").unwrap();
        assert_eq!(g.project(3).unwrap(), g);
    }

    #[test]
    fn projection_is_homomorphism() {
        let elems = all_elements(3);
        for g in elems.iter().step_by(7) {
            for h in elems.iter().step_by(11) {
                let lhs = g.compose(h).unwrap().project(2).unwrap();
                let rhs = g.project(2).unwrap().compose(&h.project(2).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn alpha_sum_examples() {
        let d = 3;
        for j in 0..d {
            let aj = Element::standard_generator(d, j).unwrap();
            for mask in 1..1usize << d {
                let levels: Vec<usize> = (0..d).filter(|k| mask >> k & 1 == 1).collect();
                let s = LevelSet::levels(d, levels.iter().copied()).unwrap();
                assert_eq!(aj.alpha_sum(&s).unwrap(), levels.contains(&j));
            }
        }
        let g = Element::parse("1|01").unwrap();
        assert!(g.alpha_sum(&LevelSet::full_level(2, 1).unwrap()).unwrap());
    }

    #[test]
    fn alpha_on_level_unions_is_homomorphism() {
        // exhaustive over all pairs and all level unions for d <= 3
        for d in 2..=3 {
            let elems = all_elements(d);
            for mask in 1..1usize << d {
                let s = LevelSet::levels(d, (0..d).filter(|k| mask >> k & 1 == 1)).unwrap();
                for g in &elems {
                    for h in &elems {
                        let lhs = g.compose(h).unwrap().alpha_sum(&s).unwrap();
                        let rhs = g.alpha_sum(&s).unwrap() ^ h.alpha_sum(&s).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn xor_differs_from_compose() {
        let a0 = Element::standard_generator(2, 0).unwrap();
        let a1 = Element::standard_generator(2, 1).unwrap();
        assert_eq!(a0.xor(&a1).unwrap().to_string(), "1|10");
        assert_eq!(a1.xor(&a0).unwrap().to_string(), "1|10");
        assert_ne!(a1.xor(&a0).unwrap(), a1.compose(&a0).unwrap());
        let g = Element::parse("1|01|0010").unwrap();
        assert!(g.xor(&g).unwrap().is_identity());
    }

    #[test]
    fn act_on_set_examples() {
        let a0 = Element::standard_generator(3, 0).unwrap();
        let s = LevelSet::new(3, [Word::parse("00").unwrap(), Word::parse("01").unwrap()]).unwrap();
        let img = a0.act_on_set(&s).unwrap();
        let expect =
            LevelSet::new(3, [Word::parse("10").unwrap(), Word::parse("11").unwrap()]).unwrap();
        assert_eq!(img, expect);
        // X^J sets are fixed by every element
        let xj = LevelSet::levels(3, [1, 2]).unwrap();
        for e in all_elements(3).iter().step_by(13) {
            assert_eq!(e.act_on_set(&xj).unwrap(), xj);
        }
    }

    #[test]
    fn support_empty_iff_identity() {
        for e in all_elements(2) {
            assert_eq!(e.support().is_empty(), e.is_identity());
        }
    }

    #[test]
    fn first_disagreement_is_projection_metric() {
        let g = Element::parse("1|01|0010").unwrap();
        let h = Element::parse("1|01|0110").unwrap();
        assert_eq!(g.first_disagreement(&h).unwrap(), Some(3));
        assert_eq!(g.first_disagreement(&g).unwrap(), None);
        // agreement through level n-1 <=> equal depth-n projections
        for n in 1..=3 {
            let same = g.first_disagreement(&h).unwrap().is_none_or(|m| m > n);
            assert_eq!(same, g.project(n).unwrap() == h.project(n).unwrap());
        }
    }

    #[test]
    fn portrait_text_roundtrip() {
        for s in ["0", "1", "0|10", "1|00|0000", "0|10|0110|10011000"] {
            assert_eq!(Element::parse(s).unwrap().to_string(), s);
        }
        assert!(Element::parse("0|1").is_err());
        assert!(Element::parse("2|00").is_err());
    }

    #[test]
    fn depth_cap_refused() {
        assert!(Element::identity(0).is_err());
        assert!(Element::identity(DEPTH_LIMIT + 1).is_err());
        assert!(Word::new(DEPTH_LIMIT + 1, 0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_element(d: usize) -> impl Strategy<Value = Element> {
            let n = level_offset(d);
            proptest::collection::vec(any::<bool>(), n).prop_map(move |bits| {
                Element::from_label_bits(
                    d,
                    Bits::from_indices(n, bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)),
                )
                .unwrap()
            })
        }

        proptest! {
            #[test]
            fn associativity_and_group_laws((d, seed) in (1usize..=6, any::<u64>())) {
                let mut rng = seed;
                let mut next = move || {
                    rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    rng
                };
                let n = level_offset(d);
                let mut mk = || {
                    let mut bits = Bits::zeros(n);
                    for i in 0..n {
                        if next() & 1 == 1 { bits.set(i, true); }
                    }
                    Element::from_label_bits(d, bits).unwrap()
                };
                let (g, h, k) = (mk(), mk(), mk());
                let lhs = g.compose(&h).unwrap().compose(&k).unwrap();
                let rhs = g.compose(&h.compose(&k).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
                let id = Element::identity(d).unwrap();
                prop_assert_eq!(g.compose(&id).unwrap(), g.clone());
                prop_assert_eq!(id.compose(&g).unwrap(), g.clone());
                prop_assert!(g.compose(&g.inverse()).unwrap().is_identity());
                prop_assert!(g.inverse().compose(&g).unwrap().is_identity());
            }

            #[test]
            fn act_preserves_length_and_prefixes(g in arb_element(5), value in 0usize..32) {
                let w = Word::new(5, value).unwrap();
                let img = g.act(w).unwrap();
                prop_assert_eq!(img.len(), w.len());
                for n in 0..=w.len() {
                    prop_assert_eq!(g.act(w.prefix(n)).unwrap(), img.prefix(n));
                }
            }

            #[test]
            fn section_cocycle_sampled(g in arb_element(5), h in arb_element(5), value in 0usize..16) {
                let w = Word::new(4, value).unwrap();
                let lhs = g.compose(&h).unwrap().section(w).unwrap();
                let rhs = g
                    .section(h.act(w).unwrap())
                    .unwrap()
                    .compose(&h.section(w).unwrap())
                    .unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn portrait_roundtrip(g in arb_element(6)) {
                prop_assert_eq!(Element::parse(&g.to_string()).unwrap(), g);
            }
        }
    }
}

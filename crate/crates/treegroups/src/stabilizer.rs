//! The top-level stabilizer of `G(d)` as a GF(2) space: conjugation action,
//! filtrations, uniseriality, element heights, and the four coset classes
//! of the second filtration layer.

use crate::error::{Error, Result};
use crate::gf2::{Basis, Bits};
use crate::tree::{Element, Word};

/// A vector in the level-(d-1) stabilizer of `G(d)`: one bit per word of
/// length `d-1`, indexed by the word value. In bijection with the elements
/// whose labels vanish off the top level.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct StabVector {
    depth: usize,
    bits: Bits,
}

impl StabVector {
    pub fn new(depth: usize, bits: Bits) -> Result<StabVector> {
        if depth == 0 || depth > crate::tree::DEPTH_LIMIT {
            return Err(Error::DepthRange {
                depth,
                max: crate::tree::DEPTH_LIMIT,
            });
        }
        if bits.len() != 1 << (depth - 1) {
            return Err(Error::Parse(format!(
                "stabilizer vector needs {} bits at depth {depth}, got {}",
                1 << (depth - 1),
                bits.len()
            )));
        }
        Ok(StabVector { depth, bits })
    }

    pub fn zero(depth: usize) -> Result<StabVector> {
        StabVector::new(depth, Bits::zeros(1 << (depth - 1)))
    }

    /// Reads the top-level row of an element whose other labels vanish.
    pub fn from_element(e: &Element) -> Result<StabVector> {
        let d = e.depth();
        let mut bits = Bits::zeros(1 << (d - 1));
        for w in e.support() {
            if w.len() != d - 1 {
                return Err(Error::Verification(format!(
                    "element has a label off the top level at {w}"
                )));
            }
            bits.set(w.value(), true);
        }
        StabVector::new(d, bits)
    }

    pub fn to_element(&self) -> Element {
        let words = self
            .bits
            .ones()
            .map(|v| Word::new(self.depth - 1, v).unwrap());
        Element::from_support(self.depth, words).unwrap()
    }

    /// Parses a row of `2^{d-1}` characters over 0/1.
    pub fn parse(depth: usize, s: &str) -> Result<StabVector> {
        let s = s.trim();
        if depth == 0 || s.len() != 1 << (depth - 1) {
            return Err(Error::Parse(format!(
                "expected {} bits for depth {depth}",
                1usize << depth.saturating_sub(1)
            )));
        }
        let mut bits = Bits::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits.set(i, true),
                _ => return Err(Error::Parse(format!("bad vector character {c:?}"))),
            }
        }
        StabVector::new(depth, bits)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    /// Conjugate `v^g`: the bit at `w` is `v`'s bit at `g(w)`.
    pub fn conjugate(&self, g: &Element) -> Result<StabVector> {
        if g.depth() != self.depth {
            return Err(Error::DepthMismatch {
                left: self.depth,
                right: g.depth(),
            });
        }
        let mut bits = Bits::zeros(self.bits.len());
        for v in 0..self.bits.len() {
            let img = g.act(Word::new(self.depth - 1, v)?)?;
            if self.bits.get(img.value()) {
                bits.set(v, true);
            }
        }
        StabVector::new(self.depth, bits)
    }

    /// Label parity over the half of the top level below first-level
    /// vertex `x`.
    pub fn half_parity(&self, x: u8) -> bool {
        let half = self.bits.len() / 2;
        let range = if x == 0 { 0..half } else { half..self.bits.len() };
        let mut acc = false;
        for i in range {
            acc ^= self.bits.get(i);
        }
        acc
    }
}

impl std::fmt::Display for StabVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.bits.len() {
            write!(f, "{}", if self.bits.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// The chain `V^(0) >= V^(1) >= ...` of subspaces of the top-level
/// stabilizer, where each step is the commutator `[P, V^(i)]` computed as
/// the span of `b + b^s` over basis vectors and generators.
#[derive(Clone, Debug)]
pub struct Filtration {
    depth: usize,
    bases: Vec<Basis>,
}

impl Filtration {
    pub fn compute(depth: usize, generators: &[Element]) -> Result<Filtration> {
        if depth == 0 || depth > crate::tree::DEPTH_LIMIT {
            return Err(Error::DepthRange {
                depth,
                max: crate::tree::DEPTH_LIMIT,
            });
        }
        for g in generators {
            if g.depth() != depth {
                return Err(Error::DepthMismatch {
                    left: depth,
                    right: g.depth(),
                });
            }
        }
        let width = 1usize << (depth - 1);
        let mut full = Basis::new(width);
        for i in 0..width {
            full.insert(&Bits::from_indices(width, [i]));
        }
        let mut bases = vec![full];
        loop {
            let cur = bases.last().unwrap();
            if cur.dim() == 0 {
                break;
            }
            let mut next = Basis::new(width);
            for row in cur.rows() {
                let v = StabVector::new(depth, row.clone())?;
                for s in generators {
                    let moved = v.conjugate(s)?;
                    next.insert(&moved.bits.xor(row));
                }
            }
            // A finite 2-group acts unipotently, so the chain drops strictly.
            assert!(next.dim() < cur.dim(), "filtration stalled");
            bases.push(next);
        }
        Ok(Filtration { depth, bases })
    }

    /// Filtration of the full group `G(d)` under its standard generators.
    pub fn full(depth: usize) -> Result<Filtration> {
        Filtration::compute(depth, &Element::standard_generators(depth)?)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.dim()).collect()
    }

    /// `V^(i)`; indices past the end of the chain are the zero space.
    pub fn layer(&self, i: usize) -> &Basis {
        let last = self.bases.len() - 1;
        &self.bases[i.min(last)]
    }

    pub fn chain_len(&self) -> usize {
        self.bases.len()
    }

    /// Every step has index exactly 2 down to the zero space.
    pub fn is_uniserial(&self) -> bool {
        let full = 1usize << (self.depth - 1);
        self.bases.len() == full + 1
            && self
                .bases
                .iter()
                .enumerate()
                .all(|(i, b)| b.dim() == full - i)
    }

    /// Largest `k` with `v` in `V^(k)`.
    pub fn deepest_layer_containing(&self, v: &StabVector) -> usize {
        for k in (0..self.bases.len()).rev() {
            if self.bases[k].contains(v.bits()) {
                return k;
            }
        }
        unreachable!("layer 0 is the full space")
    }
}

/// Uniseriality criterion on generators: the action is uniserial iff every
/// level `0 <= k <= d-2` carries an odd-activity generator. Decidable on
/// generators because level parities are homomorphisms.
pub fn is_uniserial_on_generators(depth: usize, generators: &[Element]) -> Result<bool> {
    for g in generators {
        if g.depth() != depth {
            return Err(Error::DepthMismatch {
                left: depth,
                right: g.depth(),
            });
        }
    }
    for k in 0..depth.saturating_sub(1) {
        let mut hit = false;
        for g in generators {
            if g.alpha_level(k)? {
                hit = true;
                break;
            }
        }
        if !hit {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Height from the recursive half-vector formula. The zero vector is a
/// special case fixed at 0; the equal-heights branch would yield -1 there.
pub fn height_recursive(v: &StabVector) -> u32 {
    fn go(bits: &Bits, offset: usize, len: usize) -> u32 {
        if len == 1 {
            return bits.get(offset) as u32;
        }
        let half = len / 2;
        let h0 = go(bits, offset, half);
        let h1 = go(bits, offset + half, half);
        if h0 != h1 {
            2 * h0.max(h1)
        } else if h0 == 0 {
            0
        } else {
            2 * h0 - 1
        }
    }
    go(v.bits(), 0, v.bits().len())
}

/// Height read off the filtration of the full group: `2^{d-1}` minus the
/// deepest layer containing the vector.
pub fn height_oracle(v: &StabVector, full_filtration: &Filtration) -> u32 {
    debug_assert_eq!(v.depth(), full_filtration.depth());
    let top = 1u32 << (v.depth() - 1);
    top - full_filtration.deepest_layer_containing(v) as u32
}

/// Coset of `V^(2)` in the top-level stabilizer, keyed by the two
/// half-level parities.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CosetClass {
    /// both parities trivial: membership in `V^(2)`
    Z0,
    /// left half odd
    Z1,
    /// right half odd
    Z2,
    /// both halves odd
    Z3,
}

impl CosetClass {
    pub fn name(self) -> &'static str {
        match self {
            CosetClass::Z0 => "z0",
            CosetClass::Z1 => "z1",
            CosetClass::Z2 => "z2",
            CosetClass::Z3 => "z3",
        }
    }
}

pub fn coset_class(v: &StabVector) -> Result<CosetClass> {
    if v.depth() < 2 {
        return Err(Error::DepthRange {
            depth: v.depth(),
            max: crate::tree::DEPTH_LIMIT,
        });
    }
    Ok(match (v.half_parity(0), v.half_parity(1)) {
        (false, false) => CosetClass::Z0,
        (true, false) => CosetClass::Z1,
        (false, true) => CosetClass::Z2,
        (true, true) => CosetClass::Z3,
    })
}

/// The four standard coset representatives of `V^(2)` as elements:
/// identity, `a_{d-1}`, its conjugate by `a_0`, and `[a_0, a_{d-1}]`.
pub fn coset_representatives(depth: usize) -> Result<[Element; 4]> {
    let a0 = Element::standard_generator(depth, 0)?;
    let top = Element::standard_generator(depth, depth - 1)?;
    Ok([
        Element::identity(depth)?,
        top.clone(),
        top.conjugate_by(&a0)?,
        Element::commutator(&a0, &top)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::LevelSet;

    fn gens(d: usize) -> Vec<Element> {
        Element::standard_generators(d).unwrap()
    }

    fn all_vectors(d: usize) -> Vec<StabVector> {
        let n = 1usize << (d - 1);
        (0..1usize << n)
            .map(|mask| {
                StabVector::new(
                    d,
                    Bits::from_indices(n, (0..n).filter(|i| mask >> i & 1 == 1)),
                )
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn conjugate_matches_compose_based_conjugation() {
        for d in 2..=4 {
            let generators = gens(d);
            for v in all_vectors(d).iter().step_by(5) {
                for g in &generators {
                    let fast = v.conjugate(g).unwrap();
                    let slow = v.to_element().conjugate_by(g).unwrap();
                    assert_eq!(fast.to_element(), slow);
                }
            }
        }
    }

    #[test]
    fn conjugate_example_d2() {
        let v = StabVector::parse(2, "10").unwrap();
        let a0 = Element::standard_generator(2, 0).unwrap();
        assert_eq!(v.conjugate(&a0).unwrap().to_string(), "01");
        let id = Element::identity(2).unwrap();
        assert_eq!(v.conjugate(&id).unwrap(), v);
    }

    #[test]
    fn full_filtration_small_layers() {
        let f2 = Filtration::full(2).unwrap();
        assert_eq!(f2.dims(), vec![2, 1, 0]);
        assert!(f2.is_uniserial());
        // V^(1) at d=2 is {00, 11}
        assert!(f2.layer(1).contains(&Bits::from_indices(2, [0, 1])));
        assert!(!f2.layer(1).contains(&Bits::from_indices(2, [0])));

        let f3 = Filtration::full(3).unwrap();
        assert_eq!(f3.dims(), vec![4, 3, 2, 1, 0]);
        assert!(f3.is_uniserial());
    }

    #[test]
    fn layer_descriptions_match_parity_kernels() {
        // V^(1) = even total parity, V^(2) = even parity on each half
        for d in 2..=5 {
            let f = Filtration::full(d).unwrap();
            let width = 1usize << (d - 1);
            let all = Bits::from_indices(width, 0..width);
            let mut v1 = Basis::new(width);
            v1.insert(&all);
            assert_eq!(f.layer(1), &v1.kernel());
            let half0 = Bits::from_indices(width, 0..width / 2);
            let half1 = Bits::from_indices(width, width / 2..width);
            let mut v2 = Basis::new(width);
            v2.insert(&half0);
            v2.insert(&half1);
            assert_eq!(f.layer(2), &v2.kernel());
        }
    }

    #[test]
    fn trivial_group_filtration_is_not_uniserial() {
        let id = Element::identity(3).unwrap();
        let f = Filtration::compute(3, &[id]).unwrap();
        assert_eq!(f.dims(), vec![4, 0]);
        assert!(!f.is_uniserial());
    }

    #[test]
    fn uniseriality_criterion_matches_filtration() {
        for d in 2..=6 {
            assert!(is_uniserial_on_generators(d, &gens(d)).unwrap());
        }
        for d in 2..=4 {
            assert!(Filtration::full(d).unwrap().is_uniserial());
        }
        // alpha_1 identically trivial on {a_0, a_2} at depth 3
        let p = vec![
            Element::standard_generator(3, 0).unwrap(),
            Element::standard_generator(3, 2).unwrap(),
        ];
        assert!(!is_uniserial_on_generators(3, &p).unwrap());
        assert!(!Filtration::compute(3, &p).unwrap().is_uniserial());
        // the split-extension generator sets are uniserial
        for d in 2..=5 {
            let lower: Vec<Element> = (0..d - 1)
                .map(|i| Element::standard_generator(d, i).unwrap())
                .collect();
            assert!(is_uniserial_on_generators(d, &lower).unwrap());
        }
    }

    #[test]
    fn uniserial_subgroup_filtration_equals_full() {
        // uniserial P gives the same chain as G(d), termwise
        for d in 2..=4 {
            let full = Filtration::full(d).unwrap();
            let lower: Vec<Element> = (0..d - 1)
                .map(|i| Element::standard_generator(d, i).unwrap())
                .collect();
            let f = Filtration::compute(d, &lower).unwrap();
            assert!(f.is_uniserial());
            for i in 0..full.chain_len() {
                assert_eq!(f.layer(i), full.layer(i), "d={d} layer {i}");
            }
        }
    }

    #[test]
    fn heights_agree_exhaustively_small() {
        for d in 2..=4 {
            let f = Filtration::full(d).unwrap();
            for v in all_vectors(d) {
                assert_eq!(height_recursive(&v), height_oracle(&v, &f), "v={v}");
            }
        }
    }

    #[test]
    fn height_examples() {
        assert_eq!(height_recursive(&StabVector::zero(4).unwrap()), 0);
        // single bit at 00 at depth 3 has height 4
        let v = StabVector::parse(3, "1000").unwrap();
        assert_eq!(height_recursive(&v), 4);
        assert_eq!(height_oracle(&v, &Filtration::full(3).unwrap()), 4);
        // the two large-height commutators
        for d in 2..=6 {
            let a0 = Element::standard_generator(d, 0).unwrap();
            let a1 = Element::standard_generator(d, 1).unwrap();
            let top = Element::standard_generator(d, d - 1).unwrap();
            let c0 = StabVector::from_element(&Element::commutator(&a0, &top).unwrap()).unwrap();
            let c1 = StabVector::from_element(&Element::commutator(&a1, &top).unwrap()).unwrap();
            let half = 1u32 << (d - 1);
            assert_eq!(height_recursive(&c0), half - 1);
            assert_eq!(height_recursive(&c1), half - 2);
        }
    }

    #[test]
    fn height_is_conjugation_invariant() {
        for d in 2..=4 {
            let generators = gens(d);
            for v in all_vectors(d) {
                let h = height_recursive(&v);
                for g in &generators {
                    assert_eq!(height_recursive(&v.conjugate(g).unwrap()), h);
                }
            }
        }
    }

    #[test]
    fn normal_closure_of_high_vector_spans_layer() {
        // a stabilizer vector of height 2^{d-1}-k normally generates V^(k)
        for d in 2..=4 {
            let f = Filtration::full(d).unwrap();
            let generators = gens(d);
            for v in all_vectors(d).iter().filter(|v| !v.is_zero()).step_by(3) {
                let k = (1usize << (d - 1)) - height_recursive(v) as usize;
                let width = 1 << (d - 1);
                let mut span = Basis::new(width);
                span.insert(v.bits());
                loop {
                    let mut grew = false;
                    for row in span.rows().to_vec() {
                        let rv = StabVector::new(d, row.clone()).unwrap();
                        for g in &generators {
                            if span.insert(rv.conjugate(g).unwrap().bits()) {
                                grew = true;
                            }
                        }
                    }
                    if !grew {
                        break;
                    }
                }
                assert_eq!(&span, f.layer(k), "closure of {v} is V^({k})");
            }
        }
    }

    #[test]
    fn coset_classes() {
        for d in 2..=4 {
            let reps = coset_representatives(d).unwrap();
            let classes: Vec<CosetClass> = reps
                .iter()
                .map(|e| coset_class(&StabVector::from_element(e).unwrap()).unwrap())
                .collect();
            assert_eq!(
                classes,
                vec![CosetClass::Z0, CosetClass::Z1, CosetClass::Z2, CosetClass::Z3]
            );
        }
        assert_eq!(
            coset_class(&StabVector::zero(3).unwrap()).unwrap(),
            CosetClass::Z0
        );
    }

    #[test]
    fn layer_sizes_under_uniseriality() {
        let d = 4;
        let f = Filtration::full(d).unwrap();
        for (i, dim) in f.dims().iter().enumerate() {
            assert_eq!(*dim, (1 << (d - 1)) - i);
        }
        // half-level parities describe V^(2) membership
        for v in all_vectors(d) {
            let in_v2 = f.layer(2).contains(v.bits());
            let s0 = LevelSet::half_level(d, d - 1, 0).unwrap();
            let s1 = LevelSet::half_level(d, d - 1, 1).unwrap();
            let e = v.to_element();
            assert_eq!(
                in_v2,
                !e.alpha_sum(&s0).unwrap() && !e.alpha_sum(&s1).unwrap()
            );
        }
    }
}

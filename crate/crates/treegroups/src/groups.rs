//! Explicit finite-subgroup machinery: generated closures, derived and
//! Frattini subgroups, maximal subgroups via the elementary abelian
//! quotient, level stabilizers, and essentiality tests.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::gf2::Bits;
use crate::tree::{Element, Word};

/// An explicitly enumerated subgroup of `G(d)`.
///
/// Elements are stored in deterministic construction order (breadth-first
/// from the generators) and closure is certified when the group is built.
#[derive(Clone)]
pub struct GroupSet {
    depth: usize,
    generators: Vec<Element>,
    elements: Vec<Element>,
    index: HashSet<Bits>,
}

/// Incremental breadth-first closure under right multiplication by
/// generators. Adding a generator reprocesses the current elements, so the
/// set stays closed after every step.
struct Closure {
    depth: usize,
    gens: Vec<Element>,
    elements: Vec<Element>,
    index: HashSet<Bits>,
}

impl Closure {
    fn trivial(depth: usize) -> Result<Closure> {
        let id = Element::identity(depth)?;
        let mut index = HashSet::new();
        index.insert(id.label_bits().clone());
        Ok(Closure {
            depth,
            gens: Vec::new(),
            elements: vec![id],
            index,
        })
    }

    fn contains(&self, e: &Element) -> bool {
        self.index.contains(e.label_bits())
    }

    fn add_generator(&mut self, g: &Element, cap: usize) -> Result<()> {
        if g.depth() != self.depth {
            return Err(Error::DepthMismatch {
                left: self.depth,
                right: g.depth(),
            });
        }
        self.gens.push(g.clone());
        let mut cursor = 0;
        // Existing elements were closed under the old generators; every
        // element must now be multiplied by the full generator list again.
        while cursor < self.elements.len() {
            let cur = self.elements[cursor].clone();
            for s in &self.gens {
                let p = cur.compose(s)?;
                if self.index.insert(p.label_bits().clone()) {
                    if self.elements.len() + 1 > cap {
                        return Err(Error::ResourceCap {
                            what: "group closure",
                            needed: self.elements.len() as u128 + 1,
                            cap: cap as u128,
                        });
                    }
                    self.elements.push(p);
                }
            }
            cursor += 1;
        }
        Ok(())
    }
}

impl GroupSet {
    /// Subgroup generated by `generators`, by breadth-first product closure.
    /// Fails cleanly if the order would exceed `cap`.
    pub fn close(generators: &[Element], cap: usize) -> Result<GroupSet> {
        let Some(first) = generators.first() else {
            return Err(Error::EmptyGenerators);
        };
        let depth = first.depth();
        let mut clo = Closure::trivial(depth)?;
        for g in generators {
            clo.add_generator(g, cap)?;
        }
        Ok(GroupSet {
            depth,
            generators: generators.to_vec(),
            elements: clo.elements,
            index: clo.index,
        })
    }

    pub fn trivial(depth: usize) -> Result<GroupSet> {
        let id = Element::identity(depth)?;
        GroupSet::close(&[id], 1)
    }

    /// The full group `G(d)`, generated by the standard generators.
    pub fn full_group(depth: usize, cap: usize) -> Result<GroupSet> {
        GroupSet::close(&Element::standard_generators(depth)?, cap)
    }

    /// Wraps an element set that is known to be closed (e.g. a kernel or a
    /// stabilizer of a certified group). When `verify` is set, the closure
    /// of `generators` is recomputed and must reproduce the set exactly.
    pub fn from_closed_elements(
        depth: usize,
        elements: Vec<Element>,
        generators: Vec<Element>,
        verify: bool,
    ) -> Result<GroupSet> {
        let mut index = HashSet::with_capacity(elements.len());
        for e in &elements {
            if e.depth() != depth {
                return Err(Error::DepthMismatch {
                    left: depth,
                    right: e.depth(),
                });
            }
            if !index.insert(e.label_bits().clone()) {
                return Err(Error::Verification("duplicate element in group set".into()));
            }
        }
        if !index.contains(Element::identity(depth)?.label_bits()) {
            return Err(Error::Verification("group set misses the identity".into()));
        }
        let gs = GroupSet {
            depth,
            generators,
            elements,
            index,
        };
        if verify {
            let regen = GroupSet::close(&gs.generators, gs.order())?;
            if regen.order() != gs.order() || !regen.elements.iter().all(|e| gs.contains(e)) {
                return Err(Error::Verification(
                    "generators do not regenerate the stated element set".into(),
                ));
            }
        }
        Ok(gs)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn contains(&self, e: &Element) -> bool {
        e.depth() == self.depth && self.index.contains(e.label_bits())
    }

    /// Set equality. Once the orders match, mutual membership of the
    /// generators decides it.
    pub fn same_group(&self, other: &GroupSet) -> bool {
        self.depth == other.depth
            && self.order() == other.order()
            && other.generators.iter().all(|g| self.contains(g))
            && self.generators.iter().all(|g| other.contains(g))
    }

    /// Canonical key: sorted element bit vectors.
    pub fn sorted_key(&self) -> Vec<Bits> {
        let mut key: Vec<Bits> = self.elements.iter().map(|e| e.label_bits().clone()).collect();
        key.sort();
        key
    }

    /// Image under the depth-`k` restriction.
    pub fn project(&self, k: usize) -> Result<GroupSet> {
        let mut elements = Vec::new();
        let mut index = HashSet::new();
        for e in &self.elements {
            let p = e.project(k)?;
            if index.insert(p.label_bits().clone()) {
                elements.push(p);
            }
        }
        let generators = self
            .generators
            .iter()
            .map(|g| g.project(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupSet {
            depth: k,
            generators,
            elements,
            index,
        })
    }

    /// Subgroup of elements whose labels vanish on levels `0..k`.
    pub fn level_stabilizer(&self, k: usize) -> Result<GroupSet> {
        if k == 0 || k > self.depth {
            return Err(Error::IndexRange {
                what: "stabilizer level",
                index: k,
            });
        }
        let fixes_levels = |e: &Element| -> bool {
            e.support().iter().all(|w| w.len() >= k)
        };
        let elements: Vec<Element> = self
            .elements
            .iter()
            .filter(|e| fixes_levels(e))
            .cloned()
            .collect();
        // Kernel of the depth-k restriction, hence closed.
        let gens = elements.clone();
        GroupSet::from_closed_elements(self.depth, elements, gens, false)
    }

    /// Derived subgroup `[G, G]`: normal closure of the commutators of the
    /// generators.
    pub fn derived_subgroup(&self, cap: usize) -> Result<GroupSet> {
        let mut clo = Closure::trivial(self.depth)?;
        let mut seeds = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            for h in &self.generators[i + 1..] {
                seeds.push(Element::commutator(g, h)?);
            }
        }
        for s in &seeds {
            if !clo.contains(s) {
                clo.add_generator(s, cap)?;
            }
        }
        // Close under conjugation by the group's generators.
        loop {
            let mut grew = false;
            let snapshot = clo.elements.clone();
            for x in &snapshot {
                for g in &self.generators {
                    let c = x.conjugate_by(g)?;
                    if !clo.contains(&c) {
                        clo.add_generator(&c, cap)?;
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let gens = clo.gens.clone();
        GroupSet::from_closed_elements(self.depth, clo.elements, gens, false)
    }

    /// Frattini subgroup: generated by the squares of all elements together
    /// with the generator commutators (2-group case).
    pub fn frattini(&self, cap: usize) -> Result<GroupSet> {
        let mut clo = Closure::trivial(self.depth)?;
        for e in &self.elements {
            let sq = e.compose(e)?;
            if !clo.contains(&sq) {
                clo.add_generator(&sq, cap)?;
            }
        }
        for (i, g) in self.generators.iter().enumerate() {
            for h in &self.generators[i + 1..] {
                let c = Element::commutator(g, h)?;
                if !clo.contains(&c) {
                    clo.add_generator(&c, cap)?;
                }
            }
        }
        let gens = clo.gens.clone();
        GroupSet::from_closed_elements(self.depth, clo.elements, gens, false)
    }

    /// Coordinates on the elementary abelian quotient `G / Phi(G)`.
    pub fn abelianization(&self, cap: usize) -> Result<AbelianizationCoords> {
        let phi = self.frattini(cap)?;
        let mut clo = Closure::trivial(self.depth)?;
        for g in phi.generators() {
            if !clo.contains(g) {
                clo.add_generator(g, cap)?;
            }
        }
        let mut basis: Vec<Element> = Vec::new();
        for e in &self.elements {
            if !clo.contains(e) {
                basis.push(e.clone());
                clo.add_generator(e, cap)?;
            }
        }
        if clo.elements.len() != self.order() {
            return Err(Error::Verification(
                "abelianization basis does not span the group".into(),
            ));
        }
        let rank = basis.len();
        let mut coords = HashMap::with_capacity(self.order());
        for mask in 0..1u32 << rank {
            let mut rep = Element::identity(self.depth)?;
            for (i, b) in basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    rep = rep.compose(b)?;
                }
            }
            for f in phi.elements() {
                coords.insert(rep.compose(f)?.label_bits().clone(), mask);
            }
        }
        if coords.len() != self.order() {
            return Err(Error::Verification(
                "coset labeling did not cover the group".into(),
            ));
        }
        Ok(AbelianizationCoords { phi, basis, coords })
    }

    /// All index-2 subgroups, as kernels of the nonzero functionals on
    /// `G / Phi(G)`, materialized by coset labeling.
    pub fn maximal_subgroups(&self, cap: usize) -> Result<Vec<GroupSet>> {
        let ab = self.abelianization(cap)?;
        let rank = ab.rank();
        let mut out = Vec::with_capacity((1usize << rank) - 1);
        for f in 1..1u32 << rank {
            let elements: Vec<Element> = self
                .elements
                .iter()
                .filter(|e| (ab.coords(e).unwrap() & f).count_ones() % 2 == 0)
                .cloned()
                .collect();
            // Hyperplane generating set: Phi generators, the basis elements
            // with functional value 0, and paired products of the others.
            let mut gens: Vec<Element> = ab.phi.generators().to_vec();
            let ones: Vec<usize> = (0..rank).filter(|i| f >> i & 1 == 1).collect();
            for (i, b) in ab.basis.iter().enumerate() {
                if f >> i & 1 == 0 {
                    gens.push(b.clone());
                }
            }
            for &j in &ones[1..] {
                gens.push(ab.basis[ones[0]].compose(&ab.basis[j])?);
            }
            if gens.is_empty() {
                gens.push(Element::identity(self.depth)?);
            }
            out.push(GroupSet::from_closed_elements(
                self.depth, elements, gens, true,
            )?);
        }
        Ok(out)
    }

    /// Essentiality: every first-level section of every element must be the
    /// depth-(d-1) restriction of some element. On failure the offending
    /// element and side are returned.
    pub fn essential_witness(&self) -> Result<Option<(Element, u8)>> {
        if self.depth < 2 {
            return Err(Error::DepthRange {
                depth: self.depth,
                max: crate::tree::DEPTH_LIMIT,
            });
        }
        let mut projected = HashSet::with_capacity(self.order());
        for e in &self.elements {
            projected.insert(e.project(self.depth - 1)?.label_bits().clone());
        }
        for e in &self.elements {
            for x in 0..2u8 {
                let sec = e.section(Word::new(1, x as usize)?)?;
                if !projected.contains(sec.label_bits()) {
                    return Ok(Some((e.clone(), x)));
                }
            }
        }
        Ok(None)
    }

    pub fn is_essential(&self) -> Result<bool> {
        Ok(self.essential_witness()?.is_none())
    }
}

/// The homomorphism onto the largest elementary abelian quotient, as a
/// coordinate map with kernel equal to the Frattini subgroup.
pub struct AbelianizationCoords {
    phi: GroupSet,
    basis: Vec<Element>,
    coords: HashMap<Bits, u32>,
}

impl AbelianizationCoords {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn frattini(&self) -> &GroupSet {
        &self.phi
    }

    pub fn coords(&self, e: &Element) -> Option<u32> {
        self.coords.get(e.label_bits()).copied()
    }
}

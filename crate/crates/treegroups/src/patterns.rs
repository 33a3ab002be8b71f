//! Constraint-defined pattern groups: kernels of level-parity functionals,
//! the index-4 groups cut out by a decomposition subordinate to a level
//! union, and the enumeration of all nearly-maximal pattern groups with an
//! independent brute-force oracle.
//!
//! A constraint group is the set of portraits annihilated by a span of
//! indicator functionals on portrait coordinates. Every labeling of the
//! finite tree is an automorphism, so the solution set of the span *is* the
//! subset of `G(d)`, and two groups are equal iff their row-reduced spans
//! are equal. Closure under composition holds whenever the span is
//! invariant under the coordinate action of `G(d)`; that invariance is
//! certified on the standard generators at construction.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::gf2::{Basis, Bits};
use crate::groups::GroupSet;
use crate::stabilizer::{coset_representatives, Filtration};
use crate::tree::{Element, LevelSet, Word};

/// Depth cap for the constructive enumeration.
pub const ENUMERATION_DEPTH_CAP: usize = 10;
/// Depth cap for the brute-force subgroup descent.
pub const SCAN_DEPTH_CAP: usize = 4;

fn node_word(index: usize) -> Word {
    let level = (index + 1).ilog2() as usize;
    Word::new(level, index - ((1 << level) - 1)).unwrap()
}

/// Image of an indicator vector under the coordinate action of `g`.
fn permute_indicator(row: &Bits, g: &Element) -> Result<Bits> {
    let mut out = Bits::zeros(row.len());
    for i in row.ones() {
        out.set(g.act(node_word(i))?.node_index(), true);
    }
    Ok(out)
}

/// A pair `(S, T)` subordinate to the level union `X^J`: the symmetric
/// difference is `X^J` and every automorphism maps `S` to `S` or to `T`.
#[derive(Clone, Debug)]
pub struct SubordinateDecomposition {
    depth: usize,
    j: BTreeSet<usize>,
    s: LevelSet,
    t: LevelSet,
}

impl SubordinateDecomposition {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn level_union(&self) -> &BTreeSet<usize> {
        &self.j
    }

    pub fn s(&self) -> &LevelSet {
        &self.s
    }

    pub fn t(&self) -> &LevelSet {
        &self.t
    }

    /// Checks the defining conditions on the standard generators; their
    /// `{S,T}`-invariance propagates to the whole group because `T` differs
    /// from `S` by the fixed set `X^J`. Returns the violating generator on
    /// failure.
    pub fn validate(&self) -> Result<std::result::Result<(), usize>> {
        let xj = LevelSet::levels(self.depth, self.j.iter().copied())?;
        if self.s.sym_diff(&self.t)? != xj {
            return Err(Error::Decomposition(
                "S and T do not differ by the stated level union".into(),
            ));
        }
        for i in 0..self.depth {
            let g = Element::standard_generator(self.depth, i)?;
            let img = g.act_on_set(&self.s)?;
            if img != self.s && img != self.t {
                return Ok(Err(i));
            }
        }
        Ok(Ok(()))
    }
}

/// Builds the decomposition from one half-level choice per `j` in `J` and
/// one include/exclude choice per level outside `J`.
///
/// `half_choices[k]` picks the `0`- or `1`-side of level `j_k` (ascending
/// order of `J`); `level_choices[k]` includes the full level for the k-th
/// level outside `J` (ascending). Requires `d-1` in `J` and `0` not in `J`
/// (the root level cannot be halved).
pub fn build_decomposition(
    depth: usize,
    j: &BTreeSet<usize>,
    half_choices: &[u8],
    level_choices: &[bool],
) -> Result<SubordinateDecomposition> {
    if !j.contains(&(depth - 1)) {
        return Err(Error::Decomposition(format!(
            "level union must contain the top level {}",
            depth - 1
        )));
    }
    if j.contains(&0) {
        return Err(Error::Decomposition(
            "the root level cannot be halved".into(),
        ));
    }
    if j.iter().any(|&x| x >= depth) {
        return Err(Error::Decomposition("level out of range".into()));
    }
    let others: Vec<usize> = (0..depth).filter(|k| !j.contains(k)).collect();
    if half_choices.len() != j.len() || level_choices.len() != others.len() {
        return Err(Error::Decomposition(format!(
            "expected {} half choices and {} level choices",
            j.len(),
            others.len()
        )));
    }
    let mut s = LevelSet::empty(depth)?;
    for (&jj, &side) in j.iter().zip(half_choices) {
        if side > 1 {
            return Err(Error::Decomposition("half choice must be 0 or 1".into()));
        }
        s = s.union(&LevelSet::half_level(depth, jj, side)?)?;
    }
    for (&k, &take) in others.iter().zip(level_choices) {
        if take {
            s = s.union(&LevelSet::full_level(depth, k)?)?;
        }
    }
    let xj = LevelSet::levels(depth, j.iter().copied())?;
    let t = s.sym_diff(&xj)?;
    let dec = SubordinateDecomposition {
        depth,
        j: j.clone(),
        s,
        t,
    };
    match dec.validate()? {
        Ok(()) => Ok(dec),
        Err(g) => Err(Error::Decomposition(format!(
            "built decomposition moved by generator {g}"
        ))),
    }
}

/// Decomposition with `S` a union of full levels (the only shape available
/// once the root level sits in `J`); always valid, never nearly-maximal.
pub fn fixed_set_decomposition(
    depth: usize,
    j: &BTreeSet<usize>,
    k_levels: &BTreeSet<usize>,
) -> Result<SubordinateDecomposition> {
    if !j.contains(&(depth - 1)) {
        return Err(Error::Decomposition(format!(
            "level union must contain the top level {}",
            depth - 1
        )));
    }
    let s = LevelSet::levels(depth, k_levels.iter().copied().filter(|&k| k < depth))?;
    let xj = LevelSet::levels(depth, j.iter().copied())?;
    let t = s.sym_diff(&xj)?;
    Ok(SubordinateDecomposition {
        depth,
        j: j.clone(),
        s,
        t,
    })
}

/// Verdict on essentiality of a constraint group.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Essentiality {
    /// Projection onto `G(d-1)` is surjective, so every section is realized.
    Certified,
    Verified(bool),
    Undecided,
}

impl Essentiality {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Essentiality::Certified => Some(true),
            Essentiality::Verified(b) => Some(b),
            Essentiality::Undecided => None,
        }
    }
}

/// A subgroup of `G(d)` cut out by GF(2) linear functionals on portrait
/// coordinates, stored with its row-reduced canonical span.
#[derive(Clone, Debug)]
pub struct ConstraintPatternGroup {
    depth: usize,
    constraints: Vec<LevelSet>,
    span: Basis,
    top_block: Basis,
    essential: Essentiality,
}

impl ConstraintPatternGroup {
    /// Builds the group and certifies closure: the span must be invariant
    /// under every standard generator of `G(d)`.
    pub fn new(depth: usize, constraints: Vec<LevelSet>) -> Result<ConstraintPatternGroup> {
        if depth == 0 || depth > crate::tree::DEPTH_LIMIT {
            return Err(Error::DepthRange {
                depth,
                max: crate::tree::DEPTH_LIMIT,
            });
        }
        let width = (1usize << depth) - 1;
        let mut span = Basis::new(width);
        for c in &constraints {
            if c.depth() != depth {
                return Err(Error::DepthMismatch {
                    left: depth,
                    right: c.depth(),
                });
            }
            span.insert(&c.indicator());
        }
        for i in 0..depth {
            let g = Element::standard_generator(depth, i)?;
            for row in span.rows() {
                if !span.contains(&permute_indicator(row, &g)?) {
                    return Err(Error::Constraint(format!(
                        "span not invariant under generator {i}; the constrained set \
                         would not be closed under composition"
                    )));
                }
            }
        }
        let top_width = 1usize << (depth - 1);
        let top_off = top_width - 1;
        let mut top_block = Basis::new(top_width);
        for row in span.rows() {
            let mut t = Bits::zeros(top_width);
            for i in row.ones() {
                if i >= top_off {
                    t.set(i - top_off, true);
                }
            }
            top_block.insert(&t);
        }
        let mut cpg = ConstraintPatternGroup {
            depth,
            constraints,
            span,
            top_block,
            essential: Essentiality::Undecided,
        };
        cpg.essential = cpg.decide_essentiality()?;
        Ok(cpg)
    }

    fn decide_essentiality(&self) -> Result<Essentiality> {
        if self.projects_onto_previous() {
            return Ok(Essentiality::Certified);
        }
        let free = self.span.width() - self.span.dim();
        if free <= 16 {
            let group = self.materialize(1 << 17)?;
            return Ok(Essentiality::Verified(group.is_essential()?));
        }
        Ok(Essentiality::Undecided)
    }

    /// `ker alpha_J`: the index-2 subgroup annihilated by the parity over
    /// the level union `X^J`.
    pub fn ker_alpha(depth: usize, j: impl IntoIterator<Item = usize>) -> Result<Self> {
        let j: BTreeSet<usize> = j.into_iter().collect();
        if j.is_empty() {
            return Err(Error::Constraint("empty level union".into()));
        }
        ConstraintPatternGroup::new(depth, vec![LevelSet::levels(depth, j)?])
    }

    /// `P_{S,T}` from a subordinate decomposition, verified to be a
    /// nearly-maximal pattern group: index 4, contained in `ker alpha_J`,
    /// projecting onto `G(d-1)` (hence essential), with stabilizer equal to
    /// the second filtration layer.
    pub fn from_decomposition(dec: &SubordinateDecomposition) -> Result<Self> {
        if dec.validate()?.is_err() {
            return Err(Error::Decomposition("invalid decomposition".into()));
        }
        let cpg =
            ConstraintPatternGroup::new(dec.depth, vec![dec.s.clone(), dec.t.clone()])?;
        if cpg.rank() != 2 {
            return Err(Error::Constraint(format!(
                "expected index 4, span has rank {}",
                cpg.rank()
            )));
        }
        let xj = LevelSet::levels(dec.depth, dec.j.iter().copied())?;
        if !cpg.span.contains(&xj.indicator()) {
            return Err(Error::Constraint(
                "group is not contained in the expected parity kernel".into(),
            ));
        }
        if !cpg.projects_onto_previous() {
            return Err(Error::Constraint(
                "group does not project onto the previous depth".into(),
            ));
        }
        if !cpg.stabilizer_is_second_layer() {
            return Err(Error::Constraint(
                "stabilizer is not the second filtration layer".into(),
            ));
        }
        Ok(cpg)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn constraints(&self) -> &[LevelSet] {
        &self.constraints
    }

    /// Canonical form: the row-reduced span. Equal spans, equal groups.
    pub fn span(&self) -> &Basis {
        &self.span
    }

    /// Canonical key for deduplication and deterministic ordering.
    pub fn canonical_key(&self) -> Vec<Bits> {
        self.span.rows().to_vec()
    }

    /// log2 of the index in `G(d)`.
    pub fn index_log2(&self) -> usize {
        self.span.dim()
    }

    pub fn rank(&self) -> usize {
        self.span.dim()
    }

    /// log2 of the group order.
    pub fn order_log2(&self) -> usize {
        self.span.width() - self.span.dim()
    }

    /// Restriction of the span to top-level coordinates.
    pub fn top_block(&self) -> &Basis {
        &self.top_block
    }

    /// True iff no nonzero constraint combination is supported on levels
    /// below the top one, i.e. the depth-(d-1) restriction is onto.
    pub fn projects_onto_previous(&self) -> bool {
        self.top_block.dim() == self.span.dim()
    }

    /// log2 of the order of the level-(d-1) stabilizer.
    pub fn stabilizer_order_log2(&self) -> usize {
        (1usize << (self.depth - 1)) - self.top_block.dim()
    }

    /// The stabilizer as a subspace of the top level (kernel of the
    /// restricted constraints).
    pub fn stabilizer_space(&self) -> Basis {
        self.top_block.kernel()
    }

    /// Stabilizer equals `V^(2)`: the restricted span must be exactly the
    /// two half-level parities.
    pub fn stabilizer_is_second_layer(&self) -> bool {
        let w = 1usize << (self.depth - 1);
        let mut expect = Basis::new(w);
        expect.insert(&Bits::from_indices(w, 0..w / 2));
        expect.insert(&Bits::from_indices(w, w / 2..w));
        self.top_block == expect
    }

    pub fn essentiality(&self) -> Essentiality {
        self.essential
    }

    pub fn is_essential(&self) -> Result<bool> {
        self.essential
            .as_bool()
            .ok_or(Error::EssentialityUndecided)
    }

    /// Membership. At depth `d` this is constraint evaluation; deeper
    /// elements are accepted iff every depth-`d` window section satisfies
    /// the constraints (configuration membership in the associated shift).
    pub fn member(&self, g: &Element) -> Result<bool> {
        if g.depth() < self.depth {
            return Err(Error::DepthMismatch {
                left: self.depth,
                right: g.depth(),
            });
        }
        if g.depth() == self.depth {
            return Ok(self.span.rows().iter().all(|r| !r.dot(g.label_bits())));
        }
        for len in 0..=g.depth() - self.depth {
            for w in Word::all_of_length(len) {
                let window = g.section(w)?.project(self.depth)?;
                if !self.span.rows().iter().all(|r| !r.dot(window.label_bits())) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Materializes the full element set (the kernel of the span).
    pub fn materialize(&self, cap: usize) -> Result<GroupSet> {
        let free = self.order_log2();
        if free > 26 || 1usize << free > cap {
            return Err(Error::ResourceCap {
                what: "constraint group materialization",
                needed: 1u128 << free.min(127),
                cap: cap as u128,
            });
        }
        let mut elements: Vec<Element> = self
            .span
            .kernel()
            .enumerate()
            .into_iter()
            .map(|bits| Element::from_label_bits(self.depth, bits))
            .collect::<Result<Vec<_>>>()?;
        elements.sort_by(|a, b| a.lex_cmp(b));
        let gens = elements.clone();
        GroupSet::from_closed_elements(self.depth, elements, gens, false)
    }
}

/// All nearly-maximal pattern groups at pattern size `d`, built from
/// subordinate decompositions and deduplicated by canonical span. The
/// candidate space deliberately includes the degenerate full-level
/// decompositions (the only ones available when the root level lies in the
/// level union); they all fail the nearly-maximal verification, which
/// settles that they contribute nothing new.
pub fn enumerate_nearly_maximal(depth: usize) -> Result<Vec<ConstraintPatternGroup>> {
    if depth < 2 {
        return Err(Error::DepthRange { depth, max: ENUMERATION_DEPTH_CAP });
    }
    if depth > ENUMERATION_DEPTH_CAP {
        return Err(Error::ResourceCap {
            what: "nearly-maximal enumeration depth",
            needed: depth as u128,
            cap: ENUMERATION_DEPTH_CAP as u128,
        });
    }
    let mut found: BTreeMap<Vec<Bits>, ConstraintPatternGroup> = BTreeMap::new();
    // Half-level decompositions: J over subsets of {1..d-1} containing d-1.
    for mask in 0..1usize << (depth - 2) {
        let mut j: BTreeSet<usize> = BTreeSet::from([depth - 1]);
        j.extend((1..depth - 1).filter(|&k| mask >> (k - 1) & 1 == 1));
        let others = depth - j.len();
        for halves in 0..1usize << j.len() {
            let half_choices: Vec<u8> =
                (0..j.len()).map(|i| (halves >> i & 1) as u8).collect();
            for lvls in 0..1usize << others {
                let level_choices: Vec<bool> =
                    (0..others).map(|i| lvls >> i & 1 == 1).collect();
                let dec = build_decomposition(depth, &j, &half_choices, &level_choices)?;
                if let Ok(cpg) = ConstraintPatternGroup::from_decomposition(&dec) {
                    found.entry(cpg.canonical_key()).or_insert(cpg);
                }
            }
        }
    }
    // Full-level decompositions for every admissible J (including 0 in J).
    for jmask in 0..1usize << (depth - 1) {
        let mut j: BTreeSet<usize> = BTreeSet::from([depth - 1]);
        j.extend((0..depth - 1).filter(|&k| jmask >> k & 1 == 1));
        for kmask in 1..1usize << depth {
            let k: BTreeSet<usize> = (0..depth).filter(|&x| kmask >> x & 1 == 1).collect();
            let dec = fixed_set_decomposition(depth, &j, &k)?;
            if let Ok(cpg) = ConstraintPatternGroup::from_decomposition(&dec) {
                found.entry(cpg.canonical_key()).or_insert(cpg);
            }
        }
    }
    let expected = 1usize << (2 * depth - 3);
    if found.len() != expected {
        return Err(Error::Verification(format!(
            "nearly-maximal enumeration at depth {depth} produced {} groups, expected {expected}",
            found.len()
        )));
    }
    Ok(found.into_values().collect())
}

/// Independent oracle for the count theorem: descends `G(d)` through
/// maximal subgroups of maximal subgroups and keeps the index-4 groups that
/// are essential, project onto `G(d-1)`, and stabilize exactly the second
/// filtration layer.
pub fn exhaustive_scan(depth: usize, cap: usize) -> Result<Vec<GroupSet>> {
    if !(2..=SCAN_DEPTH_CAP).contains(&depth) {
        return Err(Error::ResourceCap {
            what: "exhaustive scan depth",
            needed: depth as u128,
            cap: SCAN_DEPTH_CAP as u128,
        });
    }
    let full = GroupSet::full_group(depth, cap)?;
    let prev_order = 1usize << ((1 << (depth - 1)) - 1);
    let second_layer = Filtration::full(depth)?.layer(2).clone();
    let mut found: BTreeMap<Vec<Bits>, GroupSet> = BTreeMap::new();
    for m in full.maximal_subgroups(cap)? {
        for p in m.maximal_subgroups(cap)? {
            if p.project(depth - 1)?.order() != prev_order {
                continue;
            }
            let stab = p.level_stabilizer(depth - 1)?;
            if stab.order() != 1usize << second_layer.dim() {
                continue;
            }
            let width = 1usize << (depth - 1);
            let mut span = Basis::new(width);
            for e in stab.elements() {
                span.insert(crate::stabilizer::StabVector::from_element(e)?.bits());
            }
            if span != second_layer {
                continue;
            }
            if !p.is_essential()? {
                continue;
            }
            found.entry(p.sorted_key()).or_insert(p);
        }
    }
    Ok(found.into_values().collect())
}

/// The split extension `<a_0..a_{d-2}> V^(i)`: an essential pattern group
/// with full previous-depth image and stabilizer exactly `V^(i)`.
pub fn split_extension_group(depth: usize, i: usize, cap: usize) -> Result<GroupSet> {
    if depth < 2 {
        return Err(Error::DepthRange { depth, max: crate::tree::DEPTH_LIMIT });
    }
    if i >= 1 << (depth - 1) {
        return Err(Error::IndexRange {
            what: "filtration layer",
            index: i,
        });
    }
    let lower: Vec<Element> = (0..depth - 1)
        .map(|k| Element::standard_generator(depth, k))
        .collect::<Result<Vec<_>>>()?;
    let complement = GroupSet::close(&lower, cap)?;
    let layer = Filtration::full(depth)?.layer(i).clone();
    let order = complement
        .order()
        .checked_shl(layer.dim() as u32)
        .filter(|&n| n <= cap)
        .ok_or(Error::ResourceCap {
            what: "split extension order",
            needed: complement.order() as u128 * (1u128 << layer.dim()),
            cap: cap as u128,
        })?;
    let mut elements = Vec::with_capacity(order);
    for k in complement.elements() {
        for v in layer.enumerate() {
            // top-level vectors fix all portrait words, so the product is
            // the label union
            let top = Element::from_label_bits(depth, {
                let mut bits = Bits::zeros((1 << depth) - 1);
                for idx in v.ones() {
                    bits.set((1 << (depth - 1)) - 1 + idx, true);
                }
                bits
            })?;
            elements.push(k.xor(&top)?);
        }
    }
    let mut gens = lower;
    for row in layer.rows() {
        gens.push(crate::stabilizer::StabVector::new(depth, row.clone())?.to_element());
    }
    GroupSet::from_closed_elements(depth, elements, gens, true)
}

/// A pattern group in either representation.
#[derive(Clone)]
pub enum Pattern {
    Constraint(ConstraintPatternGroup),
    Explicit(GroupSet),
}

impl Pattern {
    pub fn depth(&self) -> usize {
        match self {
            Pattern::Constraint(c) => c.depth(),
            Pattern::Explicit(g) => g.depth(),
        }
    }

    /// Window membership: at the pattern depth, direct evaluation; deeper,
    /// every depth-`d` window section must belong to the pattern group.
    pub fn member(&self, g: &Element) -> Result<bool> {
        match self {
            Pattern::Constraint(c) => c.member(g),
            Pattern::Explicit(p) => {
                let d = p.depth();
                if g.depth() < d {
                    return Err(Error::DepthMismatch {
                        left: d,
                        right: g.depth(),
                    });
                }
                if g.depth() == d {
                    return Ok(p.contains(g));
                }
                for len in 0..=g.depth() - d {
                    for w in Word::all_of_length(len) {
                        if !p.contains(&g.section(w)?.project(d)?) {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
        }
    }

    pub fn order_log2(&self) -> usize {
        match self {
            Pattern::Constraint(c) => c.order_log2(),
            Pattern::Explicit(g) => g.order().trailing_zeros() as usize,
        }
    }

    pub fn stabilizer_order_log2(&self) -> Result<usize> {
        match self {
            Pattern::Constraint(c) => Ok(c.stabilizer_order_log2()),
            Pattern::Explicit(g) => {
                let n = g.level_stabilizer(g.depth() - 1)?.order();
                debug_assert!(n.is_power_of_two());
                Ok(n.trailing_zeros() as usize)
            }
        }
    }

    pub fn is_essential(&self) -> Result<bool> {
        match self {
            Pattern::Constraint(c) => c.is_essential(),
            Pattern::Explicit(g) => g.is_essential(),
        }
    }

    pub fn elements(&self, cap: usize) -> Result<Vec<Element>> {
        match self {
            Pattern::Constraint(c) => Ok(c.materialize(cap)?.elements().to_vec()),
            Pattern::Explicit(g) => Ok(g.elements().to_vec()),
        }
    }
}

/// Normal-form generating set `{a_i z_{k_i}} + [a_1, a_{d-1}]` for a
/// nearly-maximal constraint group; also reports the coset indices.
pub fn normal_form_generators(
    p: &ConstraintPatternGroup,
) -> Result<(Vec<Element>, Vec<usize>)> {
    let d = p.depth();
    let reps = coset_representatives(d)?;
    let mut gens = Vec::new();
    let mut indices = Vec::new();
    for i in 0..d - 1 {
        let ai = Element::standard_generator(d, i)?;
        let mut hit = None;
        for (k, z) in reps.iter().enumerate() {
            let candidate = ai.compose(z)?;
            if p.member(&candidate)? {
                hit = Some((candidate, k));
                break;
            }
        }
        let (candidate, k) = hit.ok_or_else(|| {
            Error::Verification(format!("no coset representative completes generator {i}"))
        })?;
        gens.push(candidate);
        indices.push(k);
    }
    if d >= 3 {
        let c = Element::commutator(
            &Element::standard_generator(d, 1)?,
            &Element::standard_generator(d, d - 1)?,
        )?;
        if !p.member(&c)? {
            return Err(Error::Verification(
                "group misses the required commutator".into(),
            ));
        }
        gens.push(c);
    }
    Ok((gens, indices))
}

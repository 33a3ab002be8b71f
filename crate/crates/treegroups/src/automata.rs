//! Wreath-recursion automata: the Grigorchuk machine, the k-parameterized
//! generating family, finite quotients of automaton words, sections,
//! supports, and the computational verification of the family's defining
//! properties.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::gf2::Basis;
use crate::groups::GroupSet;
use crate::patterns::{build_decomposition, ConstraintPatternGroup};
use crate::report::Report;
use crate::stabilizer::{height_recursive, StabVector};
use crate::tree::{Element, LevelSet, Word};

/// Depth used for relation and branch-identity verification.
pub const RELATION_DEPTH: usize = 8;

#[derive(Clone, Debug)]
pub struct State {
    pub name: String,
    pub active: bool,
    pub succ: [usize; 2],
}

/// A finite set of wreath-recursion states closed under sections. The
/// distinguished trivial state is inactive and self-looping; every state is
/// verified to be an involution up to [`RELATION_DEPTH`].
#[derive(Clone, Debug)]
pub struct Automaton {
    states: Vec<State>,
    by_name: HashMap<String, usize>,
    trivial: usize,
}

impl Automaton {
    pub fn new(states: Vec<State>, trivial: usize) -> Result<Automaton> {
        if trivial >= states.len() {
            return Err(Error::IndexRange {
                what: "trivial state",
                index: trivial,
            });
        }
        let t = &states[trivial];
        if t.active || t.succ != [trivial, trivial] {
            return Err(Error::Verification(
                "trivial state must be inactive and self-looping".into(),
            ));
        }
        let mut by_name = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if s.succ[0] >= states.len() || s.succ[1] >= states.len() {
                return Err(Error::Verification(format!(
                    "state {} has dangling successors",
                    s.name
                )));
            }
            if by_name.insert(s.name.clone(), i).is_some() {
                return Err(Error::Parse(format!("duplicate state name {}", s.name)));
            }
        }
        let aut = Automaton {
            states,
            by_name,
            trivial,
        };
        for i in 0..aut.states.len() {
            let e = aut.state_quotient(i, RELATION_DEPTH)?;
            if !e.compose(&e)?.is_identity() {
                return Err(Error::Verification(format!(
                    "state {} is not an involution to depth {RELATION_DEPTH}",
                    aut.states[i].name
                )));
            }
        }
        Ok(aut)
    }

    /// The five-state Grigorchuk machine.
    pub fn grigorchuk() -> Automaton {
        // e, a = sigma(e,e), b = (a,c), c = (a,d), d = (e,b)
        let states = vec![
            State { name: "e".into(), active: false, succ: [0, 0] },
            State { name: "a".into(), active: true, succ: [0, 0] },
            State { name: "b".into(), active: false, succ: [1, 3] },
            State { name: "c".into(), active: false, succ: [1, 4] },
            State { name: "d".into(), active: false, succ: [0, 2] },
        ];
        Automaton::new(states, 0).expect("grigorchuk machine is valid")
    }

    /// The k-parameterized family: `r_0 = sigma(e,e)`, `r_i = (r_{i-1}, e)`,
    /// `b_0 = (r_k, b_1)`, `b_1 = (r_k, b_2)`, `b_2 = (e, b_0)`.
    pub fn family(k: usize) -> Result<Automaton> {
        if k < 1 {
            return Err(Error::IndexRange {
                what: "family parameter",
                index: k,
            });
        }
        let mut states = vec![State { name: "e".into(), active: false, succ: [0, 0] }];
        for i in 0..=k {
            let succ0 = if i == 0 { 0 } else { i }; // r_{i-1} sits at index i
            states.push(State {
                name: format!("r{i}"),
                active: i == 0,
                succ: [succ0, 0],
            });
        }
        let rk = k + 1;
        let b0 = k + 2;
        states.push(State { name: "b0".into(), active: false, succ: [rk, b0 + 1] });
        states.push(State { name: "b1".into(), active: false, succ: [rk, b0 + 2] });
        states.push(State { name: "b2".into(), active: false, succ: [0, b0] });
        Automaton::new(states, 0)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn trivial(&self) -> usize {
        self.trivial
    }

    pub fn state(&self, name: &str) -> Result<usize> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown state {name:?}")))
    }

    /// Names of the generator states (everything except the trivial state).
    pub fn generator_names(&self) -> Vec<String> {
        self.states
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.trivial)
            .map(|(_, s)| s.name.clone())
            .collect()
    }

    /// Depth-`n` quotient of a single state, by unfolding the recursion
    /// with a per-call memo on (state, depth).
    pub fn state_quotient(&self, state: usize, n: usize) -> Result<Element> {
        let mut memo: HashMap<(usize, usize), Element> = HashMap::new();
        self.quotient_memo(state, n, &mut memo)
    }

    fn quotient_memo(
        &self,
        state: usize,
        n: usize,
        memo: &mut HashMap<(usize, usize), Element>,
    ) -> Result<Element> {
        if let Some(e) = memo.get(&(state, n)) {
            return Ok(e.clone());
        }
        let s = &self.states[state];
        let e = if n == 1 {
            let mut e = Element::identity(1)?;
            if s.active {
                e = Element::standard_generator(1, 0)?;
            }
            e
        } else {
            let left = self.quotient_memo(s.succ[0], n - 1, memo)?;
            let right = self.quotient_memo(s.succ[1], n - 1, memo)?;
            Element::wreath(s.active, &left, &right)?
        };
        memo.insert((state, n), e.clone());
        Ok(e)
    }

    /// Parses a word over state names: whitespace/comma separated tokens,
    /// or one character per state for single-letter alphabets.
    pub fn parse_word(&self, s: &str) -> Result<GroupWord> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(GroupWord { letters: vec![] });
        }
        let tokens: Vec<&str> = if s.contains(|c: char| c.is_whitespace() || c == ',') {
            s.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .collect()
        } else if self.by_name.contains_key(s) {
            vec![s]
        } else {
            return s
                .chars()
                .map(|c| {
                    let name = c.to_string();
                    self.state(&name).map(|_| ())?;
                    Ok(GroupWord { letters: vec![] })
                })
                .collect::<Result<Vec<_>>>()
                .map(|_| GroupWord {
                    letters: s
                        .chars()
                        .map(|c| self.by_name[&c.to_string()])
                        .collect(),
                });
        };
        let letters = tokens
            .iter()
            .map(|t| self.state(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupWord { letters })
    }

    pub fn word(&self, names: &[&str]) -> Result<GroupWord> {
        let letters = names
            .iter()
            .map(|n| self.state(n))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupWord { letters })
    }

    /// Depth-`n` quotient of a word's product.
    pub fn word_to_element(&self, word: &GroupWord, n: usize) -> Result<Element> {
        let mut memo: HashMap<(usize, usize), Element> = HashMap::new();
        let mut acc = Element::identity(n)?;
        for &s in &word.letters {
            acc = acc.compose(&self.quotient_memo(s, n, &mut memo)?)?;
        }
        Ok(acc)
    }

    /// Section of a word at `w`, computed letterwise by the product rule
    /// `(gh)_x = g_{h(x)} h_x`. Trivial letters are dropped.
    pub fn word_section(&self, word: &GroupWord, w: Word) -> GroupWord {
        let mut letters = word.letters.clone();
        for i in 0..w.len() {
            letters = self.section_one(&letters, w.letter(i));
        }
        GroupWord { letters }
    }

    fn section_one(&self, letters: &[usize], x: u8) -> Vec<usize> {
        let mut cur = x as usize;
        let mut out = vec![0usize; letters.len()];
        for i in (0..letters.len()).rev() {
            let s = &self.states[letters[i]];
            out[i] = s.succ[cur];
            if s.active {
                cur ^= 1;
            }
        }
        out.retain(|&s| s != self.trivial);
        out
    }

    /// All words of length `< n` where the state's section is active.
    pub fn support_to_depth(&self, state: usize, n: usize) -> Result<LevelSet> {
        let mut words = Vec::new();
        let mut stack = vec![(state, Word::EPSILON)];
        while let Some((s, prefix)) = stack.pop() {
            if self.states[s].active {
                words.push(prefix);
            }
            if prefix.len() + 1 < n {
                for x in 0..2u8 {
                    stack.push((self.states[s].succ[x as usize], prefix.child(x)?));
                }
            }
        }
        LevelSet::new(n, words)
    }

    /// Conjugate of a state word by `r_0`-style involutions: `u^v = v u v`.
    pub fn conjugate_word(&self, inner: &GroupWord, by: &GroupWord) -> GroupWord {
        let mut letters = by.letters.clone();
        letters.extend(&inner.letters);
        letters.extend(&by.letters);
        GroupWord { letters }
    }

    /// Commutator word `[u, v] = u v u v` (all built-in states are
    /// involutions, so formal inverses are unnecessary).
    pub fn commutator_word(&self, u: &GroupWord, v: &GroupWord) -> GroupWord {
        let mut letters = u.letters.clone();
        letters.extend(&v.letters);
        letters.extend(&u.letters);
        letters.extend(&v.letters);
        GroupWord { letters }
    }
}

/// A word over automaton states; the empty word is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupWord {
    letters: Vec<usize>,
}

impl GroupWord {
    pub fn empty() -> GroupWord {
        GroupWord { letters: vec![] }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn names(&self, aut: &Automaton) -> Vec<String> {
        self.letters
            .iter()
            .map(|&i| aut.states()[i].name.clone())
            .collect()
    }
}

/// Full verification report for the family automaton at parameter `k`
/// (pattern size `d = k + 4`).
pub fn family_report(k: usize, cap: usize) -> Result<Report> {
    let aut = Automaton::family(k)?;
    let d = k + 4;
    if d > crate::tree::DEFAULT_DEPTH_CAP {
        return Err(Error::DepthRange {
            depth: d,
            max: crate::tree::DEFAULT_DEPTH_CAP,
        });
    }
    let prev_order: u128 = 1u128 << ((1u32 << (d - 1)) - 1);
    if prev_order > cap as u128 {
        return Err(Error::ResourceCap {
            what: "closure of the previous-depth quotients",
            needed: prev_order,
            cap: cap as u128,
        });
    }
    let mut report = Report::new(format!("family k={k}"));
    let n_rel = RELATION_DEPTH;

    let r: Vec<GroupWord> = (0..=k)
        .map(|i| aut.word(&[&format!("r{i}")]))
        .collect::<Result<Vec<_>>>()?;
    let b: Vec<GroupWord> = (0..3)
        .map(|t| aut.word(&[&format!("b{t}")]))
        .collect::<Result<Vec<_>>>()?;
    let r0 = r[0].clone();
    let gen_words: Vec<GroupWord> = r.iter().chain(b.iter()).cloned().collect();

    // (a) previous-depth quotients generate the full group, with the stated
    // generator images
    report.check("closure-previous-depth", || {
        let gens: Vec<Element> = gen_words
            .iter()
            .map(|w| aut.word_to_element(w, d - 1))
            .collect::<Result<Vec<_>>>()?;
        let h = GroupSet::close(&gens, cap)?;
        let ok = h.order() as u128 == prev_order;
        Ok((ok, Some(format!("order={}", h.order()))))
    });
    report.check("generator-images", || {
        let mut ok = true;
        for (i, ri) in r.iter().enumerate() {
            ok &= aut.word_to_element(ri, d - 1)?
                == Element::standard_generator(d - 1, i)?;
        }
        ok &= aut.word_to_element(&b[1], d - 1)? == Element::standard_generator(d - 1, d - 3)?;
        let b2r0 = aut.conjugate_word(&b[2], &r0);
        ok &= aut.word_to_element(&b2r0, d - 1)? == Element::standard_generator(d - 1, d - 2)?;
        Ok((ok, None))
    });

    // (b) the parity over the top three levels annihilates every generator
    report.check("level-union-parity", || {
        let mut ok = true;
        for w in &gen_words {
            let e = aut.word_to_element(w, d)?;
            ok &= !e.alpha_levels([d - 3, d - 2, d - 1])?;
        }
        Ok((ok, None))
    });

    // (c) the commutator witness: [r_1^{r_0}, b_1] = delta_1([r_0, b_2]),
    // and its r_0-conjugate [r_1, b_1^{r_0}] equals [a_1, a_{d-1}] exactly
    let comm = aut.commutator_word(&r[1], &aut.conjugate_word(&b[1], &r0));
    report.check("commutator-image", || {
        let shifted = aut.commutator_word(&aut.conjugate_word(&r[1], &r0), &b[1]);
        let lhs = aut.word_to_element(&shifted, d)?;
        let inner = aut.commutator_word(&r0, &b[2]);
        let branch = Element::branch(d, Word::parse("1")?, &aut.word_to_element(&inner, d - 1)?)?;
        let mut ok = lhs == branch;
        let rhs = Element::commutator(
            &Element::standard_generator(d, 1)?,
            &Element::standard_generator(d, d - 1)?,
        )?;
        ok &= aut.word_to_element(&comm, d)? == rhs;
        Ok((ok, Some(format!("value={}", aut.word_to_element(&comm, d)?))))
    });

    // (d) the half-level functional beta annihilates every generator; its
    // defining pair is a valid decomposition subordinate to the level union
    let beta_set = LevelSet::half_level(d, d - 3, 0)?
        .union(&LevelSet::half_level(d, d - 2, 1)?)?
        .union(&LevelSet::half_level(d, d - 1, 1)?)?;
    report.check("half-level-functional", || {
        let mut ok = true;
        for w in &gen_words {
            let e = aut.word_to_element(w, d)?;
            ok &= !e.alpha_sum(&beta_set)?;
        }
        Ok((ok, None))
    });
    let j: std::collections::BTreeSet<usize> = [d - 3, d - 2, d - 1].into();
    let dec = build_decomposition(
        d,
        &j,
        &[0, 1, 1],
        &vec![false; d - 3],
    )?;
    report.check("functional-pair-is-subordinate", || {
        Ok((dec.validate()?.is_ok(), None))
    });

    // (e) index conclusion: the two functionals cut out an index-4 group
    // with stabilizer V^(2); the generators lie in it and the commutator
    // witness has the height that forces equality
    report.check("index-and-dimension", || {
        let q = ConstraintPatternGroup::from_decomposition(&dec)?;
        let mut ok = q.index_log2() == 2 && q.stabilizer_is_second_layer();
        for w in &gen_words {
            ok &= q.member(&aut.word_to_element(w, d)?)?;
        }
        let v = StabVector::from_element(&aut.word_to_element(&comm, d)?)?;
        ok &= height_recursive(&v) == (1u32 << (d - 1)) - 2;
        let hdim = crate::analysis::HdimResult {
            numerator: (1usize << (d - 1)) - 2,
            depth: d,
        };
        let (num, den) = hdim.reduced();
        Ok((ok, Some(format!("hdim={hdim} reduced={num}/{den}"))))
    });

    // (f) B-relations: squares and commutators of the b-states are trivial
    report.check("b-relations", || {
        let mut ok = true;
        for bt in &b {
            let mut two = bt.clone();
            two.letters.extend(&bt.letters);
            ok &= aut.word_to_element(&two, n_rel)?.is_identity();
        }
        for i in 0..3 {
            for jj in 0..3 {
                let c = aut.commutator_word(&b[i], &b[jj]);
                ok &= aut.word_to_element(&c, n_rel)?.is_identity();
            }
        }
        Ok((ok, None))
    });

    // (g) branch identities
    report.check("branch-identities", || {
        let mut ok = true;
        let zero = Word::parse("0")?;
        let one = Word::parse("1")?;
        let branch_eq = |word: &GroupWord, side: Word, inner: &GroupWord| -> Result<bool> {
            let lhs = aut.word_to_element(word, n_rel)?;
            let rhs = Element::branch(
                n_rel,
                side,
                &aut.word_to_element(inner, n_rel - 1)?,
            )?;
            Ok(lhs == rhs)
        };
        for i in 0..k {
            for jj in 0..k {
                let lhs = aut.commutator_word(&r[i + 1], &r[jj + 1]);
                let inner = aut.commutator_word(&r[i], &r[jj]);
                ok &= branch_eq(&lhs, zero, &inner)?;
            }
            let lhs = aut.commutator_word(&r[i + 1], &b[0]);
            let inner = aut.commutator_word(&r[i], &r[k]);
            ok &= branch_eq(&lhs, zero, &inner)?;
            for t in 0..3 {
                let lhs = aut.commutator_word(&aut.conjugate_word(&r[i + 1], &r0), &b[t]);
                let inner = aut.commutator_word(&r[i], &b[(t + 1) % 3]);
                ok &= branch_eq(&lhs, one, &inner)?;
            }
        }
        let c0 = aut.commutator_word(&r[k], &b[0]);
        let c1 = aut.commutator_word(&r[k], &b[1]);
        ok &= aut.word_to_element(&c0, n_rel)? == aut.word_to_element(&c1, n_rel)?;
        let c2 = aut.commutator_word(&r[k], &b[2]);
        ok &= aut.word_to_element(&c2, n_rel)?.is_identity();
        let key = aut.commutator_word(&b[1], &aut.conjugate_word(&b[0], &r0));
        ok &= branch_eq(&key, zero, &c1)?;
        Ok((ok, None))
    });

    // (h) self-replication witnesses: every generator appears as a first-
    // level section of a root-inactive word, on both sides
    report.check("self-replication", || {
        let mut ok = true;
        let mut pairs: Vec<(GroupWord, GroupWord, GroupWord)> = Vec::new();
        for i in 0..k {
            pairs.push((
                r[i].clone(),
                r[i + 1].clone(),
                aut.conjugate_word(&r[i + 1], &r0),
            ));
        }
        pairs.push((r[k].clone(), b[1].clone(), aut.conjugate_word(&b[1], &r0)));
        for t in 0..3 {
            pairs.push((
                b[t].clone(),
                aut.conjugate_word(&b[(t + 2) % 3], &r0),
                b[(t + 2) % 3].clone(),
            ));
        }
        for (target, left_witness, right_witness) in &pairs {
            let lw = aut.word_to_element(left_witness, n_rel)?;
            let rw = aut.word_to_element(right_witness, n_rel)?;
            ok &= !lw.label(Word::EPSILON) && !rw.label(Word::EPSILON);
            let want = aut.word_to_element(target, n_rel - 1)?;
            let ls = aut.word_section(left_witness, Word::parse("0")?);
            let rs = aut.word_section(right_witness, Word::parse("1")?);
            ok &= aut.word_to_element(&ls, n_rel - 1)? == want;
            ok &= aut.word_to_element(&rs, n_rel - 1)? == want;
        }
        Ok((ok, None))
    });

    Ok(report)
}

/// Depth-`n` pattern group of an automaton: the closure of the generator
/// quotients inside `G(n)`.
pub fn quotient_group(aut: &Automaton, n: usize, cap: usize) -> Result<GroupSet> {
    let gens: Vec<Element> = aut
        .generator_names()
        .iter()
        .map(|name| aut.state_quotient(aut.state(name)?, n))
        .collect::<Result<Vec<_>>>()?;
    GroupSet::close(&gens, cap)
}

/// Supports of the family generators follow the stated closed forms.
pub fn family_support_formula(k: usize, t: usize, n: usize) -> Result<LevelSet> {
    let residues: [u32; 2] = match t {
        0 => [0, 1],
        1 => [0, 2],
        _ => [1, 2],
    };
    let mut words = Vec::new();
    let mut m = 0usize;
    while m + k + 1 < n {
        if residues.contains(&((m % 3) as u32)) {
            words.push(Word::repeated(1, m)?.concat(Word::repeated(0, k + 1)?)?);
        }
        m += 1;
    }
    LevelSet::new(n, words)
}

/// Stabilizer span of an explicit group, as a top-level subspace.
pub fn stabilizer_span(g: &GroupSet) -> Result<Basis> {
    let d = g.depth();
    let stab = g.level_stabilizer(d - 1)?;
    let mut span = Basis::new(1 << (d - 1));
    for e in stab.elements() {
        span.insert(StabVector::from_element(e)?.bits());
    }
    Ok(span)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_state_counts() {
        assert_eq!(Automaton::grigorchuk().state_count(), 5);
        assert_eq!(Automaton::family(1).unwrap().state_count(), 6);
        for k in 1..=3 {
            assert_eq!(Automaton::family(k).unwrap().state_count(), k + 5);
        }
        assert!(Automaton::family(0).is_err());
    }

    #[test]
    fn grigorchuk_wreath_identities() {
        let aut = Automaton::grigorchuk();
        for n in 2..=8 {
            // abc = sigma(id, cd)
            let abc = aut.word_to_element(&aut.parse_word("abc").unwrap(), n).unwrap();
            let cd = aut
                .word_to_element(&aut.parse_word("cd").unwrap(), n - 1)
                .unwrap();
            let expect = Element::wreath(true, &Element::identity(n - 1).unwrap(), &cd).unwrap();
            assert_eq!(abc, expect, "abc at depth {n}");
            // abad = (c, ab)
            let abad = aut.word_to_element(&aut.parse_word("abad").unwrap(), n).unwrap();
            let c = aut.word_to_element(&aut.parse_word("c").unwrap(), n - 1).unwrap();
            let ab = aut.word_to_element(&aut.parse_word("ab").unwrap(), n - 1).unwrap();
            let expect = Element::wreath(false, &c, &ab).unwrap();
            assert_eq!(abad, expect, "abad at depth {n}");
            // abac = (ca, ad) by the same calculus
            let abac = aut.word_to_element(&aut.parse_word("abac").unwrap(), n).unwrap();
            let ca = aut.word_to_element(&aut.parse_word("ca").unwrap(), n - 1).unwrap();
            let ad = aut.word_to_element(&aut.parse_word("ad").unwrap(), n - 1).unwrap();
            let expect = Element::wreath(false, &ca, &ad).unwrap();
            assert_eq!(abac, expect, "abac at depth {n}");
        }
    }

    #[test]
    fn word_sections() {
        let aut = Automaton::grigorchuk();
        let abc = aut.parse_word("abc").unwrap();
        let sec = aut.word_section(&abc, Word::parse("1").unwrap());
        assert_eq!(sec.names(&aut), vec!["c", "d"]);
        let b = aut.parse_word("b").unwrap();
        assert_eq!(
            aut.word_section(&b, Word::parse("0").unwrap()).names(&aut),
            vec!["a"]
        );
        assert!(aut.word_section(&GroupWord::empty(), Word::parse("01").unwrap()).is_empty());
    }

    #[test]
    fn word_section_consistency_with_tree_sections() {
        let cases = [
            (Automaton::grigorchuk(), vec!["a", "b", "ab", "abc", "abac", "bcda"]),
            (
                Automaton::family(1).unwrap(),
                vec!["r0", "b1", "r0 r1", "r0 b2 r0", "b0 r1 b1 r0"],
            ),
        ];
        for (aut, words) in &cases {
            for word in words {
                let w = aut.parse_word(word).unwrap();
                for n in 2..=6 {
                    for len in 1..n.min(3) {
                        for v in Word::all_of_length(len) {
                            let whole = aut.word_to_element(&w, n).unwrap();
                            let lhs = whole.section(v).unwrap();
                            let rhs = aut
                                .word_to_element(&aut.word_section(&w, v), n - len)
                                .unwrap();
                            assert_eq!(lhs, rhs, "word {word} section {v} depth {n}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn quotients_are_projection_compatible() {
        let aut = Automaton::family(1).unwrap();
        let w = aut.parse_word("r0 b0 r1 b2").unwrap();
        let deep = aut.word_to_element(&w, 7).unwrap();
        for m in 1..7 {
            assert_eq!(deep.project(m).unwrap(), aut.word_to_element(&w, m).unwrap());
        }
    }

    #[test]
    fn family_quotient_patterns() {
        let aut = Automaton::family(1).unwrap();
        let b1 = aut.parse_word("b1").unwrap();
        assert_eq!(
            aut.word_to_element(&b1, 4).unwrap(),
            Element::standard_generator(4, 2).unwrap()
        );
        let w = aut.parse_word("r0 b2 r0").unwrap();
        assert_eq!(
            aut.word_to_element(&w, 4).unwrap(),
            Element::standard_generator(4, 3).unwrap()
        );
    }

    #[test]
    fn supports() {
        let aut = Automaton::family(1).unwrap();
        for i in 0..=1 {
            let s = aut
                .support_to_depth(aut.state(&format!("r{i}")).unwrap(), 6)
                .unwrap();
            assert_eq!(s.len(), 1);
            assert!(s.contains(Word::repeated(0, i).unwrap()));
        }
        let b0 = aut.support_to_depth(aut.state("b0").unwrap(), 9).unwrap();
        let names: Vec<String> = b0.iter().map(|w| w.to_string()).collect();
        assert_eq!(names, vec!["00", "100", "11100", "111100", "11111100"]);
        let trivial = aut.support_to_depth(aut.trivial(), 9).unwrap();
        assert!(trivial.is_empty());
        // closed-form supports for every generator
        for t in 0..3 {
            let s = aut
                .support_to_depth(aut.state(&format!("b{t}")).unwrap(), 9)
                .unwrap();
            assert_eq!(s, family_support_formula(1, t, 9).unwrap());
        }
    }

    #[test]
    fn grigorchuk_depth4_closure_has_dimension_five_eighths() {
        let aut = Automaton::grigorchuk();
        let g = quotient_group(&aut, 4, 1 << 16).unwrap();
        assert_eq!(g.order(), 1 << 12);
        assert_eq!(g.level_stabilizer(3).unwrap().order(), 1 << 5);
        assert!(g.is_essential().unwrap());
    }

    #[test]
    fn family_report_k1_passes() {
        let report = family_report(1, 1 << 16).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.to_json().contains("\"status\": \"pass\""));
    }
}

//! Straight-line programs over a signed edge alphabet.
//!
//! A program is a list of assignments. Each is either a single signed letter
//! or a sequence of signed references to strictly earlier assignments, where a
//! negative reference stands for the inverse word. The last assignment named
//! by `root` is the word the program generates.
//!
//! Expanded lengths can be astronomically large (the power operation doubles
//! per assignment), so lengths and counts are arbitrary-precision integers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A signed edge letter, encoded as `±(edge id + 1)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct Letter(i32);

impl Letter {
    /// Decodes `±(id+1)`; zero has no meaning.
    pub fn from_code(code: i32) -> Option<Letter> {
        (code != 0 && code != i32::MIN).then_some(Letter(code))
    }

    pub fn new(edge: usize, positive: bool) -> Letter {
        let c = i32::try_from(edge + 1).expect("edge id exceeds the letter range");
        Letter(if positive { c } else { -c })
    }

    pub fn pos(edge: usize) -> Letter {
        Letter::new(edge, true)
    }

    pub fn neg(edge: usize) -> Letter {
        Letter::new(edge, false)
    }

    pub fn code(self) -> i32 {
        self.0
    }

    pub fn edge(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    /// +1 for a positive letter, -1 otherwise.
    pub fn sign(self) -> i32 {
        self.0.signum()
    }
}

impl TryFrom<i32> for Letter {
    type Error = String;
    fn try_from(code: i32) -> std::result::Result<Self, String> {
        Letter::from_code(code).ok_or_else(|| format!("invalid letter code {code}"))
    }
}

impl From<Letter> for i32 {
    fn from(l: Letter) -> i32 {
        l.0
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "e{}", self.edge())
        } else {
            write!(f, "e{}^-1", self.edge())
        }
    }
}

/// A reference to an earlier assignment, possibly inverted. Encoded `±(index+1)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ref(i32);

impl Ref {
    pub fn new(index: usize, inverse: bool) -> Ref {
        let c = i32::try_from(index + 1).expect("assignment index exceeds the reference range");
        Ref(if inverse { -c } else { c })
    }

    pub fn from_code(code: i32) -> Option<Ref> {
        (code != 0 && code != i32::MIN).then_some(Ref(code))
    }

    pub fn code(self) -> i32 {
        self.0
    }

    pub fn index(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverted(self) -> Ref {
        Ref(-self.0)
    }

    /// Composes an inversion flag onto this reference.
    fn xor(self, inverse: bool) -> Ref {
        if inverse {
            self.inverted()
        } else {
            self
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Node {
    Sym(Letter),
    Refs { start: u32, len: u32 },
}

/// Borrowed view of one assignment.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Assignment<'a> {
    Simple(Letter),
    Proper(&'a [Ref]),
}

/// A straight-line program. Immutable once built; every operation returns a new value.
#[derive(Clone, Debug)]
pub struct Slp {
    nodes: Vec<Node>,
    refs: Vec<Ref>,
    root: usize,
    complexity: usize,
    lengths: OnceLock<Vec<BigUint>>,
}

impl PartialEq for Slp {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
            && self.nodes.len() == other.nodes.len()
            && (0..self.nodes.len()).all(|i| self.assignment(i) == other.assignment(i))
    }
}

impl Eq for Slp {}

/// Incremental builder; references are checked to point backwards.
#[derive(Default)]
struct Builder {
    nodes: Vec<Node>,
    refs: Vec<Ref>,
    complexity: usize,
}

impl Builder {
    fn sym(&mut self, l: Letter) -> usize {
        self.nodes.push(Node::Sym(l));
        self.complexity += 1;
        self.nodes.len() - 1
    }

    fn proper(&mut self, children: &[Ref]) -> usize {
        debug_assert!(children.iter().all(|r| r.index() < self.nodes.len()));
        let start = self.refs.len() as u32;
        self.refs.extend_from_slice(children);
        self.nodes.push(Node::Refs { start, len: children.len() as u32 });
        self.complexity += children.len();
        self.nodes.len() - 1
    }

    /// Copies every assignment of `w`, returning the reference to its root.
    fn append(&mut self, w: &Slp) -> Ref {
        let offset = self.nodes.len();
        for node in &w.nodes {
            match *node {
                Node::Sym(l) => self.nodes.push(Node::Sym(l)),
                Node::Refs { start, len } => {
                    let s = self.refs.len() as u32;
                    let src = &w.refs[start as usize..(start + len) as usize];
                    self.refs.extend(src.iter().map(|r| Ref::new(r.index() + offset, r.is_inverse())));
                    self.nodes.push(Node::Refs { start: s, len });
                }
            }
        }
        self.complexity += w.complexity;
        Ref::new(w.root + offset, false)
    }

    fn finish(self, root: usize) -> Slp {
        Slp { nodes: self.nodes, refs: self.refs, root, complexity: self.complexity, lengths: OnceLock::new() }
    }
}

impl Slp {
    /// Builds from explicit assignments, validating acyclicity.
    pub fn from_assignments(assignments: &[(Option<Letter>, Vec<Ref>)], root: usize) -> Result<Slp> {
        if root >= assignments.len() {
            return Err(Error::InvalidArgument(format!("root {root} out of range")));
        }
        let mut b = Builder::default();
        for (i, (sym, children)) in assignments.iter().enumerate() {
            match sym {
                Some(l) => {
                    b.sym(*l);
                }
                None => {
                    if let Some(bad) = children.iter().find(|r| r.index() >= i) {
                        return Err(Error::InvalidArgument(format!(
                            "assignment {i} references {} which is not earlier",
                            bad.index()
                        )));
                    }
                    b.proper(children);
                }
            }
        }
        Ok(b.finish(root))
    }

    /// The SLP of the empty word.
    pub fn empty() -> Slp {
        let mut b = Builder::default();
        let r = b.proper(&[]);
        b.finish(r)
    }

    /// A single letter.
    pub fn letter(l: Letter) -> Slp {
        let mut b = Builder::default();
        let r = b.sym(l);
        b.finish(r)
    }

    /// Trivial program of complexity at most `2·|word|`.
    pub fn trivial(word: &[Letter]) -> Slp {
        match word {
            [] => Slp::empty(),
            [l] => Slp::letter(*l),
            _ => {
                let mut b = Builder::default();
                let mut seen: BTreeMap<Letter, usize> = BTreeMap::new();
                for &l in word {
                    seen.entry(l).or_insert_with(|| {
                        
                        b.sym(l)
                    });
                }
                let children: Vec<Ref> = word.iter().map(|l| Ref::new(seen[l], false)).collect();
                let r = b.proper(&children);
                b.finish(r)
            }
        }
    }

    /// Like [`Slp::trivial`] but rejects letters whose edge id is not below `num_edges`.
    pub fn trivial_checked(word: &[Letter], num_edges: usize) -> Result<Slp> {
        if let Some(l) = word.iter().find(|l| l.edge() >= num_edges) {
            return Err(Error::Alphabet(l.code() as i64));
        }
        Ok(Slp::trivial(word))
    }

    pub fn num_assignments(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn assignment(&self, i: usize) -> Assignment<'_> {
        match self.nodes[i] {
            Node::Sym(l) => Assignment::Simple(l),
            Node::Refs { start, len } => Assignment::Proper(&self.refs[start as usize..(start + len) as usize]),
        }
    }

    /// The stored complexity counter `Σ|EXPR_i|`.
    pub fn complexity(&self) -> usize {
        self.complexity
    }

    /// Recomputes `Σ|EXPR_i|` from the assignments.
    pub fn recompute_complexity(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| match n {
                Node::Sym(_) => 1,
                Node::Refs { len, .. } => *len as usize,
            })
            .sum()
    }

    fn children(&self, i: usize) -> &[Ref] {
        match self.nodes[i] {
            Node::Sym(_) => &[],
            Node::Refs { start, len } => &self.refs[start as usize..(start + len) as usize],
        }
    }

    /// Expanded length of every assignment, computed once and cached.
    pub fn lengths(&self) -> &[BigUint] {
        self.lengths.get_or_init(|| {
            let mut out: Vec<BigUint> = Vec::with_capacity(self.nodes.len());
            for i in 0..self.nodes.len() {
                let l = match self.nodes[i] {
                    Node::Sym(_) => BigUint::one(),
                    Node::Refs { .. } => {
                        let mut acc = BigUint::zero();
                        for r in self.children(i) {
                            acc += &out[r.index()];
                        }
                        acc
                    }
                };
                out.push(l);
            }
            out
        })
    }

    /// Expanded length of the generated word.
    pub fn len(&self) -> BigUint {
        self.lengths()[self.root].clone()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths()[self.root].is_zero()
    }

    /// Letters occurring anywhere in the program (reachable or not).
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Sym(l) => Some(*l),
            Node::Refs { .. } => None,
        })
    }

    /// The inverse word; adds one assignment.
    pub fn inverse(&self) -> Slp {
        let mut b = Builder { nodes: self.nodes.clone(), refs: self.refs.clone(), complexity: self.complexity };
        let r = b.proper(&[Ref::new(self.root, true)]);
        b.finish(r)
    }

    /// `w^k` by binary doubling; negative `k` goes through the inverse.
    pub fn power(&self, k: &BigInt) -> Slp {
        if k.is_zero() {
            return Slp::empty();
        }
        let mut b = Builder { nodes: self.nodes.clone(), refs: self.refs.clone(), complexity: self.complexity };
        let base = Ref::new(self.root, k.is_negative());
        let mag = k.magnitude();
        let bits = mag.bits();
        let mut square = base;
        let mut picked: Vec<Ref> = Vec::new();
        for bit in 0..bits {
            if mag.bit(bit) {
                picked.push(square);
            }
            if bit + 1 < bits {
                let s = b.proper(&[square, square]);
                square = Ref::new(s, false);
            }
        }
        let r = if picked.len() == 1 && !picked[0].is_inverse() {
            picked[0].index()
        } else {
            b.proper(&picked)
        };
        b.finish(r)
    }

    /// Concatenation of the listed words, each inverted when its flag is set.
    pub fn concat(parts: &[(&Slp, bool)]) -> Slp {
        let mut b = Builder::default();
        let roots: Vec<Ref> = parts.iter().map(|(w, inv)| b.append(w).xor(*inv)).collect();
        let r = b.proper(&roots);
        b.finish(r)
    }

    /// Number of occurrences of the signed letter in the expansion.
    pub fn count(&self, letter: Letter) -> BigUint {
        let mut pos: Vec<BigUint> = Vec::with_capacity(self.nodes.len());
        let mut neg: Vec<BigUint> = Vec::with_capacity(self.nodes.len());
        for i in 0..self.nodes.len() {
            let (p, n) = match self.nodes[i] {
                Node::Sym(l) => (
                    if l == letter { BigUint::one() } else { BigUint::zero() },
                    if l == letter.inverse() { BigUint::one() } else { BigUint::zero() },
                ),
                Node::Refs { .. } => {
                    let mut p = BigUint::zero();
                    let mut n = BigUint::zero();
                    for r in self.children(i) {
                        let j = r.index();
                        if r.is_inverse() {
                            p += &neg[j];
                            n += &pos[j];
                        } else {
                            p += &pos[j];
                            n += &neg[j];
                        }
                    }
                    (p, n)
                }
            };
            pos.push(p);
            neg.push(n);
        }
        pos.swap_remove(self.root)
    }

    /// `count(e) − count(e⁻¹)` for the positive letter of `edge`, in one pass.
    pub fn signed_count(&self, edge: usize) -> BigInt {
        let e = Letter::pos(edge);
        let mut val: Vec<BigInt> = Vec::with_capacity(self.nodes.len());
        for i in 0..self.nodes.len() {
            let v = match self.nodes[i] {
                Node::Sym(l) if l == e => BigInt::one(),
                Node::Sym(l) if l == e.inverse() => -BigInt::one(),
                Node::Sym(_) => BigInt::zero(),
                Node::Refs { .. } => {
                    let mut acc = BigInt::zero();
                    for r in self.children(i) {
                        if r.is_inverse() {
                            acc -= &val[r.index()];
                        } else {
                            acc += &val[r.index()];
                        }
                    }
                    acc
                }
            };
            val.push(v);
        }
        val.swap_remove(self.root)
    }

    /// Homomorphic image under `rules`. A letter `e⁻¹` without its own rule is
    /// replaced by the inverse of `e`'s rule. Letters without rules are kept.
    pub fn substitute(&self, rules: &BTreeMap<Letter, Slp>) -> Result<Slp> {
        for (l, w) in rules {
            if let Some(other) = rules.get(&l.inverse()) {
                if l.is_positive() && !mutually_inverse(w, other) {
                    return Err(Error::RuleConsistency(l.code() as i64));
                }
            }
        }
        let mut b = Builder::default();
        let mut rule_root: BTreeMap<Letter, Ref> = BTreeMap::new();
        for (l, w) in rules {
            let r = b.append(w);
            rule_root.insert(*l, r);
        }
        let mut remap: Vec<Ref> = Vec::with_capacity(self.nodes.len());
        let mut scratch: Vec<Ref> = Vec::new();
        for i in 0..self.nodes.len() {
            match self.nodes[i] {
                Node::Sym(l) => {
                    if let Some(r) = rule_root.get(&l) {
                        remap.push(*r);
                    } else if let Some(r) = rule_root.get(&l.inverse()) {
                        remap.push(r.inverted());
                    } else {
                        remap.push(Ref::new(b.sym(l), false));
                    }
                }
                Node::Refs { .. } => {
                    scratch.clear();
                    scratch.extend(self.children(i).iter().map(|r| remap[r.index()].xor(r.is_inverse())));
                    remap.push(Ref::new(b.proper(&scratch), false));
                }
            }
        }
        let root = remap[self.root];
        let r = if root.is_inverse() { b.proper(&[root]) } else { root.index() };
        Ok(b.finish(r))
    }

    /// Cyclic rotation of the expansion: the first `offset` letters move to the end.
    pub fn rotate(&self, offset: &BigUint) -> Result<Slp> {
        let len = self.len();
        if offset.is_zero() {
            return Ok(self.clone());
        }
        if offset >= &len {
            return Err(Error::OffsetOutOfRange { offset: offset.clone(), length: len });
        }
        let mut b = Builder { nodes: self.nodes.clone(), refs: self.refs.clone(), complexity: self.complexity };
        let lengths = self.lengths();
        let mut tail = Vec::new();
        self.slice_into(&mut b, lengths, Ref::new(self.root, false), offset, &len, &mut tail);
        let mut head = Vec::new();
        self.slice_into(&mut b, lengths, Ref::new(self.root, false), &BigUint::zero(), offset, &mut head);
        tail.extend(head);
        let r = b.proper(&tail);
        Ok(b.finish(r))
    }

    /// Appends to `out` references whose concatenation expands to letters
    /// `[lo, hi)` of the word referenced by `r`. Only nodes of `self` are read.
    fn slice_into(&self, b: &mut Builder, lengths: &[BigUint], r: Ref, lo: &BigUint, hi: &BigUint, out: &mut Vec<Ref>) {
        let n = &lengths[r.index()];
        if lo >= hi {
            return;
        }
        if lo.is_zero() && hi == n {
            out.push(r);
            return;
        }
        if r.is_inverse() {
            // Letters [lo,hi) of w⁻¹ are the inverse of letters [n−hi, n−lo) of w.
            let mut inner = Vec::new();
            self.slice_into(b, lengths, r.inverted(), &(n - hi), &(n - lo), &mut inner);
            out.extend(inner.into_iter().rev().map(Ref::inverted));
            return;
        }
        let mut start = BigUint::zero();
        for &c in self.children(r.index()) {
            let cl = &lengths[c.index()];
            let end = &start + cl;
            if &end > lo && &start < hi {
                let a = if lo > &start { lo - &start } else { BigUint::zero() };
                let z = if hi < &end { hi - &start } else { cl.clone() };
                self.slice_into(b, lengths, c, &a, &z, out);
            }
            if &end >= hi {
                break;
            }
            start = end;
        }
    }

    /// Explicit expansion, refused when longer than `guard`.
    pub fn expand(&self, guard: u64) -> Result<Vec<Letter>> {
        let len = self.len();
        match len.to_u64() {
            Some(n) if n <= guard => {}
            _ => return Err(Error::guard(len, guard)),
        }
        let mut out = Vec::with_capacity(len.to_usize().unwrap_or(0));
        // Each frame: node, inverted, next child position.
        let mut stack: Vec<(usize, bool, usize)> = vec![(self.root, false, 0)];
        while let Some(top) = stack.last_mut() {
            let (i, inv, pos) = *top;
            match self.nodes[i] {
                Node::Sym(l) => {
                    out.push(if inv { l.inverse() } else { l });
                    stack.pop();
                }
                Node::Refs { len, .. } => {
                    if pos == len as usize {
                        stack.pop();
                        continue;
                    }
                    top.2 += 1;
                    let ch = self.children(i);
                    let c = if inv { ch[len as usize - 1 - pos] } else { ch[pos] };
                    stack.push((c.index(), inv ^ c.is_inverse(), 0));
                }
            }
        }
        Ok(out)
    }

    /// Drops assignments unreachable from the root.
    pub fn compact(&self) -> Slp {
        let mut live = vec![false; self.nodes.len()];
        live[self.root] = true;
        for i in (0..self.nodes.len()).rev() {
            if live[i] {
                for r in self.children(i) {
                    live[r.index()] = true;
                }
            }
        }
        let mut b = Builder::default();
        let mut remap = vec![usize::MAX; self.nodes.len()];
        for i in 0..self.nodes.len() {
            if !live[i] {
                continue;
            }
            remap[i] = match self.nodes[i] {
                Node::Sym(l) => b.sym(l),
                Node::Refs { .. } => {
                    let ch: Vec<Ref> =
                        self.children(i).iter().map(|r| Ref::new(remap[r.index()], r.is_inverse())).collect();
                    b.proper(&ch)
                }
            };
        }
        b.finish(remap[self.root])
    }

    /// Renames letters; `f` must map into letters, and inverses are respected.
    pub fn map_letters(&self, mut f: impl FnMut(Letter) -> Letter) -> Slp {
        let mut out = self.clone();
        out.lengths = OnceLock::new();
        for n in &mut out.nodes {
            if let Node::Sym(l) = n {
                *l = f(*l);
            }
        }
        out
    }

    /// Replaces letters by a possibly empty word of letters (`None` erases).
    pub fn erase_letters(&self, mut keep: impl FnMut(Letter) -> Option<Letter>) -> Slp {
        let mut b = Builder::default();
        let mut remap: Vec<Ref> = Vec::with_capacity(self.nodes.len());
        let mut scratch = Vec::new();
        for i in 0..self.nodes.len() {
            let r = match self.nodes[i] {
                Node::Sym(l) => match keep(l) {
                    Some(m) => b.sym(m),
                    None => b.proper(&[]),
                },
                Node::Refs { .. } => {
                    scratch.clear();
                    scratch.extend(self.children(i).iter().map(|r| remap[r.index()].xor(r.is_inverse())));
                    b.proper(&scratch)
                }
            };
            remap.push(Ref::new(r, false));
        }
        let root = remap[self.root].index();
        b.finish(root)
    }

    pub fn to_json(&self) -> SlpJson {
        let assignments = (0..self.nodes.len())
            .map(|i| match self.assignment(i) {
                Assignment::Simple(l) => AssignmentJson::Sym(l.code()),
                Assignment::Proper(rs) => AssignmentJson::Refs(rs.iter().map(|r| r.code()).collect()),
            })
            .collect();
        SlpJson { assignments, root: self.root }
    }

    pub fn from_json(j: &SlpJson) -> Result<Slp> {
        let mut parts = Vec::with_capacity(j.assignments.len());
        for a in &j.assignments {
            parts.push(match a {
                AssignmentJson::Sym(c) => {
                    let l = Letter::from_code(*c).ok_or(Error::Alphabet(*c as i64))?;
                    (Some(l), Vec::new())
                }
                AssignmentJson::Refs(cs) => {
                    let rs = cs
                        .iter()
                        .map(|c| Ref::from_code(*c).ok_or_else(|| Error::InvalidArgument(format!("bad reference {c}"))))
                        .collect::<Result<Vec<_>>>()?;
                    (None, rs)
                }
            });
        }
        Slp::from_assignments(&parts, j.root)
    }
}

fn mutually_inverse(a: &Slp, b: &Slp) -> bool {
    const GUARD: u64 = 1 << 20;
    match (a.expand(GUARD), b.inverse().expand(GUARD)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

/// Wire form of an SLP.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlpJson {
    pub assignments: Vec<AssignmentJson>,
    pub root: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssignmentJson {
    Sym(i32),
    Refs(Vec<i32>),
}

impl Serialize for Slp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Slp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SlpJson::deserialize(d)?;
        Slp::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// Free and cyclic reduction of an explicit word.
pub fn cyclic_reduce(word: &[Letter]) -> Vec<Letter> {
    let mut v = free_reduce(word);
    let mut lo = 0;
    let mut hi = v.len();
    while hi - lo >= 2 && v[lo] == v[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    v.truncate(hi);
    v.drain(..lo);
    v
}

/// Removes adjacent `xx⁻¹` pairs.
pub fn free_reduce(word: &[Letter]) -> Vec<Letter> {
    let mut v: Vec<Letter> = Vec::with_capacity(word.len());
    for &l in word {
        if v.last() == Some(&l.inverse()) {
            v.pop();
        } else {
            v.push(l);
        }
    }
    v
}

/// True when no cyclically adjacent pair cancels.
pub fn is_cyclically_reduced(word: &[Letter]) -> bool {
    let n = word.len();
    if n < 2 {
        return true;
    }
    (0..n).all(|i| word[i] != word[(i + 1) % n].inverse())
}

/// Inverse of an explicit word.
pub fn invert_word(word: &[Letter]) -> Vec<Letter> {
    word.iter().rev().map(|l| l.inverse()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(codes: &[i32]) -> Vec<Letter> {
        codes.iter().map(|&c| Letter::from_code(c).unwrap()).collect()
    }

    fn naive(s: &Slp) -> Vec<Letter> {
        fn go(s: &Slp, i: usize, inv: bool, out: &mut Vec<Letter>) {
            match s.assignment(i) {
                Assignment::Simple(l) => out.push(if inv { l.inverse() } else { l }),
                Assignment::Proper(rs) => {
                    let mut v: Vec<Ref> = rs.to_vec();
                    if inv {
                        v.reverse();
                    }
                    for r in v {
                        go(s, r.index(), inv ^ r.is_inverse(), out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        go(s, s.root(), false, &mut out);
        out
    }

    #[test]
    fn trivial_words() {
        let b = Slp::trivial(&w(&[2]));
        assert_eq!(b.expand(10).unwrap(), w(&[2]));
        assert!(b.complexity() <= 2);
        let ab = Slp::trivial(&w(&[-1, 2]));
        assert_eq!(ab.expand(10).unwrap(), w(&[-1, 2]));
        assert!(ab.complexity() <= 4);
        let e = Slp::trivial(&[]);
        assert!(e.expand(10).unwrap().is_empty());
        assert!(e.is_empty());
    }

    #[test]
    fn inverse_cases() {
        let ab = Slp::trivial(&w(&[1, 2]));
        assert_eq!(ab.inverse().expand(10).unwrap(), w(&[-2, -1]));
        assert_eq!(ab.inverse().inverse().expand(10).unwrap(), w(&[1, 2]));
        assert_eq!(Slp::trivial(&w(&[-1])).inverse().expand(10).unwrap(), w(&[1]));
        assert_eq!(ab.inverse().complexity(), ab.complexity() + 1);
    }

    #[test]
    fn power_cases() {
        let ab = Slp::trivial(&w(&[1, 2]));
        assert_eq!(ab.power(&4.into()).expand(100).unwrap(), w(&[1, 2, 1, 2, 1, 2, 1, 2]));
        assert!(ab.power(&0.into()).expand(100).unwrap().is_empty());
        assert_eq!(ab.power(&(-1).into()).expand(100).unwrap(), ab.inverse().expand(100).unwrap());
        assert_eq!(ab.power(&3.into()).expand(10).unwrap(), w(&[1, 2, 1, 2, 1, 2]));
    }

    #[test]
    fn power_guard_reports_true_length() {
        let ab = Slp::trivial(&w(&[1, 2]));
        let big = ab.power(&(BigInt::one() << 40));
        match big.expand(1_000_000) {
            Err(Error::SizeGuard { length, .. }) => assert_eq!(length, BigUint::one() << 41),
            other => panic!("expected guard error, got {other:?}"),
        }
        assert!(big.complexity() < ab.complexity() + 3 * 41);
    }

    #[test]
    fn concat_cases() {
        let a = Slp::trivial(&w(&[1]));
        let b = Slp::trivial(&w(&[2]));
        assert_eq!(Slp::concat(&[(&a, false), (&b, false)]).expand(10).unwrap(), w(&[1, 2]));
        let x = Slp::trivial(&w(&[1, -2, 3]));
        let xx = Slp::concat(&[(&x, false), (&x, true)]);
        assert!(cyclic_reduce(&xx.expand(10).unwrap()).is_empty());
    }

    #[test]
    fn count_cases() {
        let s = Slp::trivial(&w(&[-1, 2]));
        assert_eq!(s.count(Letter::neg(0)), BigUint::one());
        assert_eq!(s.count(Letter::pos(0)), BigUint::zero());
        assert_eq!(Slp::trivial(&w(&[2])).signed_count(0), BigInt::zero());
        assert_eq!(s.signed_count(0), -BigInt::one());
    }

    #[test]
    fn substitute_cases() {
        let b = Slp::trivial(&w(&[2]));
        let mut rules = BTreeMap::new();
        rules.insert(Letter::pos(1), Slp::trivial(&w(&[-1, 2])));
        assert_eq!(b.substitute(&rules).unwrap().expand(10).unwrap(), w(&[-1, 2]));
        assert_eq!(b.substitute(&BTreeMap::new()).unwrap().expand(10).unwrap(), w(&[2]));
        let bb = Slp::trivial(&w(&[2, -2, 1]));
        assert_eq!(bb.substitute(&rules).unwrap().expand(10).unwrap(), w(&[-1, 2, -2, 1, 1]));
        rules.insert(Letter::neg(1), Slp::trivial(&w(&[3])));
        assert!(matches!(b.substitute(&rules), Err(Error::RuleConsistency(_))));
    }

    #[test]
    fn rotate_cases() {
        let xyz = Slp::trivial(&w(&[1, 2, 3]));
        assert_eq!(xyz.rotate(&1u32.into()).unwrap().expand(10).unwrap(), w(&[2, 3, 1]));
        assert_eq!(xyz.rotate(&0u32.into()).unwrap().expand(10).unwrap(), w(&[1, 2, 3]));
        let back = xyz.rotate(&1u32.into()).unwrap().rotate(&2u32.into()).unwrap();
        assert_eq!(back.expand(10).unwrap(), w(&[1, 2, 3]));
        assert!(xyz.rotate(&3u32.into()).is_err());
    }

    #[test]
    fn reduce_cases() {
        assert_eq!(cyclic_reduce(&w(&[1, -1, 2])), w(&[2]));
        assert_eq!(cyclic_reduce(&w(&[2, 1, 3, -1])), w(&[2, 1, 3, -1]));
        assert_eq!(cyclic_reduce(&w(&[-1, 2, 3, 1])), w(&[2, 3]));
        assert_eq!(cyclic_reduce(&w(&[-3, 1])), w(&[-3, 1]));
    }

    #[test]
    fn json_round_trip() {
        let s = Slp::trivial(&w(&[1, -2, 1])).power(&5.into()).inverse();
        let text = serde_json::to_string(&s).unwrap();
        let back: Slp = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        assert!(serde_json::from_str::<Slp>(r#"{"assignments":[{"refs":[1]}],"root":0}"#).is_err());
        assert!(serde_json::from_str::<Slp>(r#"{"assignments":[{"sym":0}],"root":0}"#).is_err());
    }

    fn arb_slp() -> impl Strategy<Value = Slp> {
        let leaf = prop::collection::vec((1i32..4).prop_flat_map(|c| prop_oneof![Just(c), Just(-c)]), 0..6)
            .prop_map(|v| Slp::trivial(&v.into_iter().map(|c| Letter::from_code(c).unwrap()).collect::<Vec<_>>()));
        leaf.prop_recursive(4, 32, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|s| s.inverse()),
                (inner.clone(), 0i64..5).prop_map(|(s, k)| s.power(&k.into())),
                (inner.clone(), inner.clone(), any::<bool>()).prop_map(|(a, b, f)| Slp::concat(&[(&a, f), (&b, false)])),
                (inner.clone(), inner).prop_map(|(a, b)| {
                    let mut rules = BTreeMap::new();
                    rules.insert(Letter::pos(0), b);
                    a.substitute(&rules).unwrap()
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn expand_matches_naive(s in arb_slp()) {
            prop_assume!(s.len() <= BigUint::from(10_000u32));
            let e = s.expand(10_000).unwrap();
            prop_assert_eq!(&e, &naive(&s));
            prop_assert_eq!(BigUint::from(e.len()), s.len());
            prop_assert_eq!(s.complexity(), s.recompute_complexity());
            for c in [1i32, -1, 2, -2, 3, -3] {
                let l = Letter::from_code(c).unwrap();
                prop_assert_eq!(s.count(l), BigUint::from(e.iter().filter(|&&x| x == l).count()));
            }
            let compacted = s.compact();
            prop_assert_eq!(compacted.expand(10_000).unwrap(), e);
        }

        #[test]
        fn rotation_matches(s in arb_slp(), k in 0usize..50) {
            prop_assume!(s.len() <= BigUint::from(2_000u32));
            let e = s.expand(2_000).unwrap();
            prop_assume!(!e.is_empty());
            let k = k % e.len();
            let r = s.rotate(&BigUint::from(k)).unwrap();
            let mut expect = e[k..].to_vec();
            expect.extend_from_slice(&e[..k]);
            prop_assert_eq!(r.expand(2_000).unwrap(), expect);
        }

        #[test]
        fn reduction_is_idempotent(v in prop::collection::vec((1i32..4).prop_flat_map(|c| prop_oneof![Just(c), Just(-c)]), 0..40)) {
            let word: Vec<Letter> = v.into_iter().map(|c| Letter::from_code(c).unwrap()).collect();
            let r = cyclic_reduce(&word);
            prop_assert!(is_cyclically_reduced(&r));
            prop_assert_eq!(cyclic_reduce(&r), r);
        }
    }
}

//! Curve encodings on a cellular surface: edge lists, intersection sequences
//! and normal coordinates, and the conversions between them.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::slp::{cyclic_reduce, is_cyclically_reduced, Letter, Slp};
use crate::surface::{CellularSurface, Dart, Side};

/// A closed curve running along edges, stored as the darts it traverses.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgedCurve {
    darts: Vec<Dart>,
}

impl EdgedCurve {
    pub fn new(darts: Vec<Dart>) -> Self {
        EdgedCurve { darts }
    }

    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.darts.iter().map(|d| d.edge())
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    /// Closed, simple (no repeated edge or vertex) and inside the edge range.
    pub fn validate(&self, s: &CellularSurface) -> Result<()> {
        let n = self.darts.len();
        if n == 0 {
            return Err(Error::InvalidCurve("empty edge list".into()));
        }
        if let Some(d) = self.darts.iter().find(|d| d.edge() >= s.num_edges()) {
            return Err(Error::Alphabet(d.code() as i64));
        }
        for i in 0..n {
            let (a, b) = (self.darts[i], self.darts[(i + 1) % n]);
            if s.head(a) != s.tail(b) {
                return Err(Error::InvalidCurve(format!("edge list is not closed at position {i}")));
            }
        }
        let mut edges: Vec<usize> = self.edges().collect();
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidCurve("an edge repeats within one component".into()));
        }
        let mut verts: Vec<usize> = self.darts.iter().map(|&d| s.tail(d)).collect();
        verts.sort_unstable();
        if verts.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidCurve("a vertex repeats within one component".into()));
        }
        Ok(())
    }

    pub fn to_codes(&self) -> Vec<i32> {
        self.darts.iter().map(|d| d.code()).collect()
    }

    pub fn from_codes(codes: &[i32]) -> Result<Self> {
        let darts = codes
            .iter()
            .map(|&c| Letter::from_code(c).ok_or(Error::Alphabet(c as i64)))
            .collect::<Result<Vec<_>>>()?;
        Ok(EdgedCurve { darts })
    }
}

/// Components must be valid and pairwise edge-disjoint.
pub fn validate_multicurve(s: &CellularSurface, curves: &[EdgedCurve]) -> Result<()> {
    let mut owner = vec![usize::MAX; s.num_edges()];
    for (i, c) in curves.iter().enumerate() {
        c.validate(s)?;
        for e in c.edges() {
            if owner[e] != usize::MAX {
                return Err(Error::InvalidCurve(format!("components {} and {i} share edge {e}", owner[e])));
            }
            owner[e] = i;
        }
    }
    Ok(())
}

/// Letters crossed by a parallel copy of a curve while it turns around the
/// vertex between `incoming` and `outgoing`, on the given side.
pub fn sweep(s: &CellularSurface, incoming: Dart, outgoing: Dart, side: Side) -> Vec<Letter> {
    let back = incoming.inverse();
    let mut out = Vec::new();
    match side {
        Side::Left => {
            let mut x = s.sigma_inv(back);
            while x != outgoing {
                out.push(x);
                x = s.sigma_inv(x);
            }
        }
        Side::Right => {
            let mut x = s.sigma(back);
            while x != outgoing {
                out.push(x.inverse());
                x = s.sigma(x);
            }
        }
    }
    out
}

/// Intersection sequence of a parallel copy of an edged curve, starting
/// alongside its first dart. Returns the sequence and the offset at which the
/// copy starts alongside each dart.
pub fn push_off(s: &CellularSurface, darts: &[Dart], side: Side) -> (Vec<Letter>, Vec<usize>) {
    let n = darts.len();
    let mut seq = Vec::new();
    let mut offsets = Vec::with_capacity(n);
    for i in 0..n {
        offsets.push(seq.len());
        seq.extend(sweep(s, darts[i], darts[(i + 1) % n], side));
    }
    (seq, offsets)
}

/// The shorter of the two parallel copies; ties go left.
pub fn shortest_side(s: &CellularSurface, darts: &[Dart]) -> Side {
    let l = push_off(s, darts, Side::Left).0.len();
    let r = push_off(s, darts, Side::Right).0.len();
    if r < l {
        Side::Right
    } else {
        Side::Left
    }
}

/// Components as straight-line programs, one per component.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SequenceMulticurve {
    pub components: Vec<Slp>,
}

impl SequenceMulticurve {
    pub fn new(components: Vec<Slp>) -> Self {
        SequenceMulticurve { components }
    }

    pub fn from_words(words: &[Vec<Letter>]) -> Self {
        SequenceMulticurve { components: words.iter().map(|w| Slp::trivial(w)).collect() }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `‖I_T(γ)‖`, the sum of component complexities.
    pub fn complexity(&self) -> usize {
        self.components.iter().map(Slp::complexity).sum()
    }

    /// Expands every component, refusing when the total exceeds `guard`.
    pub fn expand(&self, guard: u64) -> Result<Vec<Vec<Letter>>> {
        let total: BigUint = self.components.iter().map(|c| c.len()).sum();
        if total > BigUint::from(guard) {
            return Err(Error::guard(total, guard));
        }
        self.components.iter().map(|c| c.expand(guard)).collect()
    }

    /// Expand, cyclically reduce and recompress each component.
    pub fn normalize(&self, guard: u64) -> Result<SequenceMulticurve> {
        let words = self.expand(guard)?;
        Ok(SequenceMulticurve::from_words(&words.iter().map(|w| cyclic_reduce(w)).collect::<Vec<_>>()))
    }
}

/// Per-component crossing counts, indexed by edge id.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NormalCoordinates {
    pub components: Vec<Vec<BigUint>>,
}

impl NormalCoordinates {
    pub fn new(components: Vec<Vec<BigUint>>) -> Self {
        NormalCoordinates { components }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Sum over components.
    pub fn total(&self, num_edges: usize) -> Vec<BigUint> {
        let mut t = vec![BigUint::zero(); num_edges];
        for c in &self.components {
            for (x, y) in t.iter_mut().zip(c) {
                *x += y;
            }
        }
        t
    }

    /// `‖N_T(γ)‖ = Σ lg e(c)` over nonzero entries.
    pub fn complexity(&self) -> u64 {
        self.components.iter().flatten().filter(|x| !x.is_zero()).map(|x| x.bits()).sum()
    }

    /// Every component must satisfy the parity and triangle conditions in every face.
    pub fn validate(&self, s: &CellularSurface) -> Result<()> {
        s.require_triangulation()?;
        for (i, c) in self.components.iter().enumerate() {
            if c.len() != s.num_edges() {
                return Err(Error::NotNormal(format!("component {i} has {} entries for {} edges", c.len(), s.num_edges())));
            }
            for face in s.faces() {
                let [a, b, d] = [face[0], face[1], face[2]].map(|x| &c[x.edge()]);
                crate::surface::corner_coordinates(a, b, d)?;
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Vec<Vec<String>> {
        self.components.iter().map(|c| c.iter().map(|x| x.to_string()).collect()).collect()
    }

    pub fn from_json(j: &[Vec<String>]) -> Result<Self> {
        let components = j
            .iter()
            .map(|c| {
                c.iter()
                    .map(|x| x.parse::<BigUint>().map_err(|_| Error::NotNormal(format!("bad count {x:?}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NormalCoordinates { components })
    }
}

impl Serialize for NormalCoordinates {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormalCoordinates {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = Vec::<Vec<String>>::deserialize(d)?;
        NormalCoordinates::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// Left parallel copies of the components, cyclically reduced.
///
/// On a triangulation the result is normal. Vertex-sharing components produce
/// copies that may cross near the shared vertex; those crossings bound
/// vertex-free bigons, and reducing each component separately removes them,
/// so the summed coordinates describe a disjoint multicurve.
pub fn edged_to_sequences(s: &CellularSurface, curves: &[EdgedCurve]) -> Result<SequenceMulticurve> {
    let sides = vec![Side::Left; curves.len()];
    edged_to_sequences_with_sides(s, curves, &sides)
}

pub fn edged_to_sequences_with_sides(s: &CellularSurface, curves: &[EdgedCurve], sides: &[Side]) -> Result<SequenceMulticurve> {
    validate_multicurve(s, curves)?;
    let words: Vec<Vec<Letter>> =
        curves.iter().zip(sides).map(|(c, &side)| cyclic_reduce(&push_off(s, c.darts(), side).0)).collect();
    Ok(SequenceMulticurve::from_words(&words))
}

/// Crossing counts `count(e) + count(e⁻¹)` per edge, for each component.
///
/// Components whose expansion fits in `guard` are checked for cyclic
/// reducedness; longer ones are trusted.
pub fn sequences_to_normal_coords(s: &CellularSurface, seq: &SequenceMulticurve, guard: u64) -> Result<NormalCoordinates> {
    let mut components = Vec::with_capacity(seq.len());
    for (i, c) in seq.components.iter().enumerate() {
        if let Some(n) = c.len().to_u64() {
            if n <= guard && !is_cyclically_reduced(&c.expand(guard)?) {
                return Err(Error::NormalizationRequired(i));
            }
        }
        components.push(edge_counts(c, s.num_edges()));
    }
    Ok(NormalCoordinates { components })
}

/// Unsigned crossing count of every edge.
pub fn edge_counts(w: &Slp, num_edges: usize) -> Vec<BigUint> {
    (0..num_edges).map(|e| w.count(Letter::pos(e)) + w.count(Letter::neg(e))).collect()
}

/// Algebraic intersection number of `b` with the edged curve `a`.
///
/// Each dart of `a` contributes `count(e) − count(e⁻¹)` with the dart's sign,
/// so the result is independent of how the edges themselves are oriented.
pub fn algebraic_intersection(b: &Slp, a: &EdgedCurve) -> BigInt {
    a.darts()
        .iter()
        .map(|d| {
            let c = b.signed_count(d.edge());
            if d.is_positive() {
                c
            } else {
                -c
            }
        })
        .sum()
}

/// Crossings of `b` with the edges of `a`; an upper bound on geometric intersection.
pub fn geometric_count(b: &Slp, a: &EdgedCurve) -> BigUint {
    a.edges().map(|e| b.count(Letter::pos(e)) + b.count(Letter::neg(e))).sum()
}

/// [`geometric_count`] read off normal coordinates.
pub fn geometric_count_normal(coords: &[BigUint], a: &EdgedCurve) -> BigUint {
    a.edges().map(|e| coords[e].clone()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::MarkedSurface;

    fn word(ms: &MarkedSurface, text: &str) -> Vec<Letter> {
        ms.surface.parse_letters(text).unwrap()
    }

    #[test]
    fn torus_alpha_sequence() {
        let ms = MarkedSurface::build(1).unwrap();
        let seq = edged_to_sequences(&ms.surface, &[ms.alpha[0].curve.clone()]).unwrap();
        assert_eq!(seq.components[0].expand(10).unwrap(), word(&ms, "b"));
    }

    #[test]
    fn genus_two_alpha_sequences() {
        let ms = MarkedSurface::build(2).unwrap();
        let curves: Vec<EdgedCurve> = ms.alpha.iter().map(|g| g.curve.clone()).collect();
        let sides: Vec<Side> = ms.alpha.iter().map(|g| g.side).collect();
        let seq = edged_to_sequences_with_sides(&ms.surface, &curves, &sides).unwrap();
        assert_eq!(seq.components[0].expand(10).unwrap(), word(&ms, "b"));
        assert_eq!(seq.components[1].expand(10).unwrap(), word(&ms, "d^-1"));
    }

    #[test]
    fn normal_coordinates_of_words() {
        let ms = MarkedSurface::build(1).unwrap();
        let s = &ms.surface;
        let n = sequences_to_normal_coords(s, &SequenceMulticurve::from_words(&[word(&ms, "b")]), 100).unwrap();
        assert_eq!(n.components[0], vec![BigUint::from(0u32), BigUint::from(1u32)]);
        let n = sequences_to_normal_coords(s, &SequenceMulticurve::from_words(&[vec![]]), 100).unwrap();
        assert!(n.components[0].iter().all(Zero::is_zero));
        let n = sequences_to_normal_coords(s, &SequenceMulticurve::from_words(&[word(&ms, "a^-1 b")]), 100).unwrap();
        assert_eq!(n.components[0], vec![BigUint::from(1u32), BigUint::from(1u32)]);
        let bad = SequenceMulticurve::from_words(&[word(&ms, "a a^-1 b")]);
        assert!(matches!(sequences_to_normal_coords(s, &bad, 100), Err(Error::NormalizationRequired(0))));
    }

    #[test]
    fn intersection_numbers() {
        let ms = MarkedSurface::build(1).unwrap();
        let a = &ms.alpha[0].curve;
        let b = Slp::trivial(&word(&ms, "b"));
        assert_eq!(algebraic_intersection(&b, a), BigInt::zero());
        let ab = Slp::trivial(&word(&ms, "a^-1 b"));
        assert_eq!(algebraic_intersection(&ab, a), BigInt::from(-1));
        assert_eq!(algebraic_intersection(&ab.inverse(), a), BigInt::from(1));
        assert_eq!(geometric_count(&ab, a), BigUint::from(1u32));
        assert_eq!(geometric_count(&b, a), BigUint::zero());
        let w1 = Slp::trivial(&word(&ms, "a a b"));
        let w2 = Slp::trivial(&word(&ms, "a^-1 b a^-1 a^-1"));
        let both = Slp::concat(&[(&w1, false), (&w2, false)]);
        assert_eq!(algebraic_intersection(&both, a), algebraic_intersection(&w1, a) + algebraic_intersection(&w2, a));
        for w in [&w1, &w2, &both] {
            assert!(BigInt::from(geometric_count(w, a)) >= algebraic_intersection(w, a).magnitude().clone().into());
        }
    }

    #[test]
    fn rejects_malformed_curves() {
        let ms = MarkedSurface::build(2).unwrap();
        let s = &ms.surface;
        let a = EdgedCurve::new(vec![Letter::pos(0)]);
        assert!(validate_multicurve(s, &[a.clone(), a.clone()]).is_err());
        assert!(EdgedCurve::new(vec![]).validate(s).is_err());
        assert!(EdgedCurve::new(vec![Letter::pos(0), Letter::neg(0)]).validate(s).is_err());
    }
}

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{HeegaardDiagram, StreetComplex};
use crate::curves::{edge_counts, NormalCoordinates, SequenceMulticurve};
use crate::error::{Error, Result};
use crate::slp::{Letter, Slp};
use crate::surface::Side;

/// Shape of one complementary piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceSummary {
    pub euler: i64,
    pub boundaries: usize,
}

/// Outcome of [`check_diagram`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub valid: bool,
    pub genus: u32,
    pub components: usize,
    pub pieces: Vec<PieceSummary>,
}

fn counts(s: &crate::surface::CellularSurface, w: &[Letter]) -> Vec<BigUint> {
    edge_counts(&Slp::trivial(w), s.num_edges())
}

/// Accepts iff the complement of β is one `2g`-punctured sphere and `#β = g`.
pub fn check_diagram(d: &HeegaardDiagram, guard: u64) -> Result<Census> {
    let g = d.genus();
    let n = d.normal(guard)?;
    let sc = StreetComplex::trace(&d.surface, &n.components, &[], guard)?;
    let pieces: Vec<PieceSummary> =
        sc.pieces().iter().map(|p| PieceSummary { euler: p.euler, boundaries: p.boundaries.len() }).collect();
    let valid = n.len() == g as usize
        && pieces.len() == 1
        && pieces[0].euler == 2 - 2 * g as i64
        && pieces[0].boundaries == 2 * g as usize;
    Ok(Census { valid, genus: g, components: n.len(), pieces })
}

/// Replaces β with explicit reduced words, keeping both encodings coherent.
fn with_beta(d: &HeegaardDiagram, words: &[Vec<Letter>]) -> Result<HeegaardDiagram> {
    let normal = NormalCoordinates::new(words.iter().map(|w| counts(&d.surface, w)).collect());
    let out = HeegaardDiagram {
        surface: d.surface.clone(),
        alpha: d.alpha.clone(),
        alpha_extra: d.alpha_extra.clone(),
        beta_sequences: Some(SequenceMulticurve::from_words(words)),
        beta_normal: Some(normal),
    };
    out.validate()?;
    Ok(out)
}

/// Slides `β_i` over `β_j`: `β_i` becomes their band sum along a shortest
/// dual path in the complement of β.
pub fn disk_slide(d: &HeegaardDiagram, i: usize, j: usize, guard: u64) -> Result<HeegaardDiagram> {
    let nb = d.num_beta();
    if i == j || i >= nb || j >= nb {
        return Err(Error::InvalidArgument(format!("disk slide needs two distinct components below {nb}, got {i} and {j}")));
    }
    let n = d.normal(guard)?;
    let sc = StreetComplex::trace(&d.surface, &n.components, &[], guard)?;
    let mut words = sc.sequences().to_vec();
    words[i] = sc.band_sum((i, None), (j, None))?;
    with_beta(d, &words)
}

/// True when the complement is `#comp − g + 1` planar pieces.
fn is_generalized_system(sc: &StreetComplex, components: usize, g: usize) -> bool {
    sc.pieces().iter().all(|p| p.is_planar()) && sc.pieces().len() + g == components + 1
}

fn separating_component(sc: &StreetComplex, components: usize) -> Option<usize> {
    (0..components).rev().find(|&c| sc.piece_of_side(c, Side::Left) != sc.piece_of_side(c, Side::Right))
}

/// Drops components of β (and all extra α curves) until both systems are minimal.
pub fn reduce_to_minimal(d: &HeegaardDiagram, guard: u64) -> Result<HeegaardDiagram> {
    let g = d.genus() as usize;
    let mut comps = d.normal(guard)?.components;
    loop {
        let sc = StreetComplex::trace(&d.surface, &comps, &[], guard)?;
        if !is_generalized_system(&sc, comps.len(), g) {
            return Err(Error::NotASystem(format!(
                "{} curves cut the surface into {} pieces, not all planar",
                comps.len(),
                sc.pieces().len()
            )));
        }
        if comps.len() == g {
            let words = sc.sequences().to_vec();
            let mut out = with_beta(d, &words)?;
            out.alpha_extra.clear();
            return Ok(out);
        }
        let c = separating_component(&sc, comps.len()).expect("a disconnected planar complement has a separating curve");
        comps.remove(c);
    }
}

/// Grows a system of curves to a pants decomposition by band sums of
/// boundary circles of a piece with more than three of them.
fn extend_curves(d: &HeegaardDiagram, mut comps: Vec<Vec<BigUint>>, guard: u64) -> Result<Vec<Vec<Letter>>> {
    let g = d.genus() as usize;
    loop {
        let sc = StreetComplex::trace(&d.surface, &comps, &[], guard)?;
        if !is_generalized_system(&sc, comps.len(), g) {
            return Err(Error::NotASystem("curves do not form a generalized system".into()));
        }
        if comps.len() >= 3 * g - 3 {
            return Ok(sc.sequences().to_vec());
        }
        let piece = sc.pieces().iter().find(|p| p.boundaries.len() > 3).expect("fewer than 3g − 3 curves leave a big piece");
        let side = |b: usize| {
            let (c, s) = sc.boundaries()[b].curves[0];
            (c, Some(s))
        };
        let w = sc.band_sum(side(piece.boundaries[0]), side(piece.boundaries[1]))?;
        comps.push(counts(&d.surface, &w));
    }
}

/// Extends both systems to `3g − 3` curves cutting the surface into pairs of pants.
pub fn extend_to_maximal(d: &HeegaardDiagram, guard: u64) -> Result<HeegaardDiagram> {
    let g = d.genus() as usize;
    if g < 2 {
        return Err(Error::InvalidGenus(g as i64));
    }
    let beta = extend_curves(d, d.normal(guard)?.components, guard)?;
    let alpha = extend_curves(d, d.alpha_normals()?, guard)?;
    let mut out = with_beta(d, &beta)?;
    out.alpha_extra = alpha[g..].iter().map(|w| counts(&d.surface, w)).collect();
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::street::DEFAULT_GUARD;
    use crate::word::parse_word;

    fn diagram(g: u32, w: &str) -> HeegaardDiagram {
        HeegaardDiagram::from_word(&parse_word(g, w).unwrap(), true).unwrap()
    }

    #[test]
    fn canonical_systems_pass() {
        for g in 1..=3 {
            let c = check_diagram(&HeegaardDiagram::alpha_parallel(g).unwrap(), DEFAULT_GUARD).unwrap();
            assert!(c.valid, "{c:?}");
            assert_eq!(c.pieces, vec![PieceSummary { euler: 2 - 2 * g as i64, boundaries: 2 * g as usize }]);
        }
    }

    #[test]
    fn wrong_cardinality_fails() {
        let d = HeegaardDiagram::alpha_parallel(2).unwrap();
        let n = d.normal(DEFAULT_GUARD).unwrap();
        let short = HeegaardDiagram { beta_sequences: None, beta_normal: Some(NormalCoordinates::new(vec![n.components[0].clone()])), ..d };
        let c = check_diagram(&short, DEFAULT_GUARD).unwrap();
        assert!(!c.valid);
        assert_eq!(c.pieces, vec![PieceSummary { euler: -2, boundaries: 2 }]);
    }

    #[test]
    fn slides_keep_a_system() {
        let d = diagram(2, "b c^2 a^-1 d");
        let s = disk_slide(&d, 1, 0, DEFAULT_GUARD).unwrap();
        assert!(check_diagram(&s, DEFAULT_GUARD).unwrap().valid);
        assert!(disk_slide(&d, 1, 1, DEFAULT_GUARD).is_err());
    }

    #[test]
    fn extend_then_reduce() {
        for g in 2..=3 {
            let d = diagram(g, if g == 2 { "b c a^-1" } else { "b1 c1 a2^-1 c2" });
            let m = extend_to_maximal(&d, DEFAULT_GUARD).unwrap();
            let k = 3 * g as usize - 3;
            assert_eq!(m.num_beta(), k);
            assert_eq!(m.alpha_extra.len(), k - g as usize);
            let n = m.normal(DEFAULT_GUARD).unwrap();
            let sc = StreetComplex::trace(&m.surface, &n.components, &[], DEFAULT_GUARD).unwrap();
            assert!(sc.pieces().iter().all(|p| p.euler == -1 && p.boundaries.len() == 3));
            let mut a = m.alpha_normals().unwrap();
            a.truncate(k);
            let sa = StreetComplex::trace(&m.surface, &a, &[], DEFAULT_GUARD).unwrap();
            assert_eq!(sa.pieces().len(), 2 * g as usize - 2);
            let r = reduce_to_minimal(&m, DEFAULT_GUARD).unwrap();
            assert_eq!(r.num_beta(), g as usize);
            assert!(check_diagram(&r, DEFAULT_GUARD).unwrap().valid);
            assert_eq!(reduce_to_minimal(&r, DEFAULT_GUARD).unwrap().normal(DEFAULT_GUARD).unwrap(), r.normal(DEFAULT_GUARD).unwrap());
        }
    }
}

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{HeegaardDiagram, StreetComplex};
use crate::curves::{edge_counts, geometric_count_normal};
use crate::error::Result;
use crate::slp::Slp;

/// Certificate returned by [`detect_reduction`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Reduction {
    /// `a_alpha` and `b_beta` cobound an annulus.
    IsotopicPair { alpha: usize, beta: usize },
    /// An essential separating curve missing α and β.
    SeparatingCurve { curve: Slp },
    NoneFound,
}

/// Looks for a β component parallel to an α curve, then for an essential
/// separating curve inside a non-disk piece of the complement of `α ∪ β`.
/// The pair is assumed to be in efficient position.
pub fn detect_reduction(d: &HeegaardDiagram, guard: u64) -> Result<Reduction> {
    let s = &d.surface;
    let beta = d.normal(guard)?.components;
    for (j, b) in beta.iter().enumerate() {
        if !d.alpha.iter().all(|a| geometric_count_normal(b, a).is_zero()) {
            continue;
        }
        for (i, a) in d.alpha.iter().enumerate() {
            let sc = StreetComplex::trace(s, std::slice::from_ref(b), std::slice::from_ref(a), guard)?;
            let annulus = sc.pieces().iter().any(|p| {
                let bs: Vec<_> = p.boundaries.iter().map(|&k| &sc.boundaries()[k]).collect();
                p.euler == 0
                    && bs.len() == 2
                    && bs.iter().any(|x| x.curves.is_empty() && !x.blockers.is_empty())
                    && bs.iter().any(|x| x.blockers.is_empty() && !x.curves.is_empty())
            });
            if annulus {
                return Ok(Reduction::IsotopicPair { alpha: i, beta: j });
            }
        }
    }
    let sc = StreetComplex::trace(s, &beta, &d.alpha, guard)?;
    for p in sc.pieces().iter().filter(|p| !p.is_disk()) {
        for &k in &p.boundaries {
            let w = &sc.boundaries()[k].letters;
            if w.is_empty() {
                continue;
            }
            let slp = Slp::trivial(w);
            let coords = edge_counts(&slp, s.num_edges());
            let alone = StreetComplex::trace(s, &[coords], &[], guard)?;
            if alone.pieces().len() == 2 && alone.pieces().iter().all(|q| q.euler <= -1) {
                return Ok(Reduction::SeparatingCurve { curve: slp });
            }
        }
    }
    Ok(Reduction::NoneFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::street::{connected_sum, DEFAULT_GUARD};
    use crate::word::parse_word;

    fn diagram(g: u32, w: &str) -> HeegaardDiagram {
        HeegaardDiagram::from_word(&parse_word(g, w).unwrap(), true).unwrap()
    }

    #[test]
    fn finds_common_component() {
        let d = diagram(2, "b");
        assert_eq!(detect_reduction(&d, DEFAULT_GUARD).unwrap(), Reduction::IsotopicPair { alpha: 1, beta: 1 });
    }

    #[test]
    fn finds_connected_sum_sphere() {
        let t = diagram(1, "l a^-1 l");
        let sum = connected_sum(&t, &t, DEFAULT_GUARD).unwrap();
        match detect_reduction(&sum, DEFAULT_GUARD).unwrap() {
            Reduction::SeparatingCurve { curve } => assert!(!curve.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sphere_is_irreducible() {
        assert_eq!(detect_reduction(&diagram(1, "l"), DEFAULT_GUARD).unwrap(), Reduction::NoneFound);
    }

    #[test]
    fn verdict_json() {
        let j = serde_json::to_string(&Reduction::IsotopicPair { alpha: 0, beta: 2 }).unwrap();
        assert_eq!(j, r#"{"verdict":"isotopic-pair","alpha":0,"beta":2}"#);
        assert_eq!(serde_json::to_string(&Reduction::NoneFound).unwrap(), r#"{"verdict":"none-found"}"#);
    }
}

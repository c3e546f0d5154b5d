//! Heegaard words in power notation and their compilation into β-sequences.
//!
//! Text is read left to right in order of application: `"l a^-1"` applies
//! `τ_ℓ` first, so it denotes `τ_a⁻¹ ∘ τ_ℓ`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::curves::SequenceMulticurve;
use crate::error::{Error, Result};
use crate::slp::{Letter, Slp};
use crate::surface::{generator_names, MarkedSurface, Side};

/// `τ_{s_n}^{k_n} ∘ … ∘ τ_{s_1}^{k_1}`, stored in application order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeegaardWord {
    pub genus: u32,
    /// `(generator index, exponent)`; no zero exponents, no equal neighbours.
    pub factors: Vec<(usize, BigInt)>,
}

impl HeegaardWord {
    pub fn identity(genus: u32) -> Self {
        HeegaardWord { genus, factors: Vec::new() }
    }

    /// Builds a word, merging equal neighbours and dropping zero exponents.
    pub fn from_factors(genus: u32, factors: impl IntoIterator<Item = (usize, BigInt)>) -> Self {
        let mut out: Vec<(usize, BigInt)> = Vec::new();
        for (s, k) in factors {
            if k.is_zero() {
                continue;
            }
            match out.last_mut() {
                Some((t, e)) if *t == s => {
                    *e += k;
                    if e.is_zero() {
                        out.pop();
                    }
                }
                _ => out.push((s, k)),
            }
        }
        HeegaardWord { genus, factors: out }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// `Σ lg|k_i|`, rounded up per factor.
    pub fn log_size(&self) -> u64 {
        self.factors.iter().map(|(_, k)| k.abs().bits()).sum()
    }

    /// `Σ |k_i|`.
    pub fn total_exponent(&self) -> BigInt {
        self.factors.iter().map(|(_, k)| k.abs()).sum()
    }

    /// `w` followed by `other`.
    pub fn then(&self, other: &HeegaardWord) -> HeegaardWord {
        HeegaardWord::from_factors(self.genus, self.factors.iter().chain(&other.factors).cloned())
    }

    pub fn names(&self) -> Vec<String> {
        generator_names(self.genus)
    }
}

impl fmt::Display for HeegaardWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.names();
        for (i, (s, k)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if *k == BigInt::from(1) {
                write!(f, "{}", names[*s])?;
            } else {
                write!(f, "{}^{}", names[*s], k)?;
            }
        }
        Ok(())
    }
}

fn generator_index(genus: u32, name: &str) -> Option<usize> {
    let name = if genus == 1 && name == "ℓ" { "l" } else { name };
    generator_names(genus).iter().position(|n| n == name)
}

/// Parses whitespace-separated `name^exp` tokens.
pub fn parse_word(genus: u32, text: &str) -> Result<HeegaardWord> {
    if genus == 0 {
        return Err(Error::InvalidGenus(0));
    }
    let mut factors = Vec::new();
    for tok in text.split_whitespace() {
        let (name, exp) = match tok.split_once('^') {
            Some((n, e)) => (n, Some(e)),
            None => (tok, None),
        };
        let s = generator_index(genus, name).ok_or_else(|| Error::ParseWord(format!("unknown generator `{name}`")))?;
        let k = match exp {
            None => BigInt::from(1),
            Some(e) => {
                let e = e.strip_prefix('+').unwrap_or(e);
                let valid = !e.is_empty() && e.trim_start_matches('-').chars().all(|c| c.is_ascii_digit());
                if !valid {
                    return Err(Error::ParseWord(format!("malformed exponent in `{tok}`")));
                }
                let k: BigInt = e.parse().map_err(|_| Error::ParseWord(format!("malformed exponent in `{tok}`")))?;
                if k.is_zero() {
                    return Err(Error::ParseWord(format!("zero exponent in `{tok}`")));
                }
                k
            }
        };
        factors.push((s, k));
    }
    Ok(HeegaardWord::from_factors(genus, factors))
}

/// Run-length compaction of an uncompressed word of `(generator, inverted)` letters.
pub fn compact_to_power_notation(genus: u32, letters: &[(usize, bool)]) -> HeegaardWord {
    HeegaardWord::from_factors(genus, letters.iter().map(|&(s, inv)| (s, BigInt::from(if inv { -1 } else { 1 }))))
}

/// Substitution rules realising `τ_s^k`: every crossing of an edge of `s`
/// picks up `k` turns around the parallel copy started there.
pub fn twist_rules(ms: &MarkedSurface, s: usize, k: &BigInt) -> BTreeMap<Letter, Slp> {
    let g = &ms.generators[s];
    let mut rules = BTreeMap::new();
    for (j, &d) in g.curve.darts().iter().enumerate() {
        let loop_k = Slp::trivial(&g.rotated(j)).power(k);
        let loop_inv = loop_k.inverse();
        let e = Slp::letter(Letter::pos(d.edge()));
        // The crossing letter keeps its place; the detour goes on the side
        // where β meets the copy.
        let img = match (g.side, d.is_positive()) {
            (Side::Left, true) => Slp::concat(&[(&loop_k, false), (&e, false)]),
            (Side::Left, false) => Slp::concat(&[(&e, false), (&loop_inv, false)]),
            (Side::Right, true) => Slp::concat(&[(&e, false), (&loop_k, false)]),
            (Side::Right, false) => Slp::concat(&[(&loop_inv, false), (&e, false)]),
        };
        rules.insert(Letter::pos(d.edge()), img);
    }
    rules
}

/// `τ_s^k(β)` by substitution.
pub fn apply_single_twist(ms: &MarkedSurface, s: usize, k: &BigInt, beta: &SequenceMulticurve) -> Result<SequenceMulticurve> {
    if s >= ms.generators.len() {
        return Err(Error::ParseWord(format!("generator index {s} out of range")));
    }
    if k.is_zero() {
        return Ok(beta.clone());
    }
    let rules = twist_rules(ms, s, k);
    let components = beta.components.iter().map(|c| c.substitute(&rules)).collect::<Result<Vec<_>>>()?;
    Ok(SequenceMulticurve::new(components))
}

/// `I_T(φ(α))`, starting from the parallel copies of α.
pub fn apply_word(w: &HeegaardWord, ms: &MarkedSurface) -> Result<SequenceMulticurve> {
    if w.genus != ms.genus() {
        return Err(Error::GenusMismatch { word: w.genus, surface: ms.genus() });
    }
    let start = SequenceMulticurve::from_words(&ms.alpha.iter().map(|a| a.base.clone()).collect::<Vec<_>>());
    apply_to(w, ms, &start)
}

/// Applies every factor of `w` to an arbitrary β.
pub fn apply_to(w: &HeegaardWord, ms: &MarkedSurface, beta: &SequenceMulticurve) -> Result<SequenceMulticurve> {
    let mut cur = beta.clone();
    for (s, k) in &w.factors {
        cur = apply_single_twist(ms, *s, k, &cur)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::algebraic_intersection;
    use crate::slp::cyclic_reduce;

    fn word(ms: &MarkedSurface, w: &SequenceMulticurve, i: usize) -> String {
        ms.surface.format_word(&cyclic_reduce(&w.components[i].expand(1 << 20).unwrap()))
    }

    #[test]
    fn parse_examples() {
        let w = parse_word(1, "l a^-1").unwrap();
        assert_eq!(w.factors, vec![(1, BigInt::from(1)), (0, BigInt::from(-1))]);
        assert_eq!(parse_word(2, "b b b").unwrap().factors, vec![(1, BigInt::from(3))]);
        assert!(parse_word(1, "a^0 l").is_err());
        assert!(parse_word(1, "q").is_err());
        assert!(parse_word(1, "a^x").is_err());
        assert!(parse_word(1, "a^").is_err());
        assert_eq!(parse_word(1, "ℓ^123456789012345678901234567890").unwrap().to_string(), "l^123456789012345678901234567890");
    }

    #[test]
    fn compaction() {
        assert_eq!(compact_to_power_notation(1, &[(0, false), (0, false), (0, true)]).factors, vec![(0, BigInt::from(1))]);
        let w = compact_to_power_notation(1, &[(1, false), (0, true), (1, false), (0, true)]);
        assert_eq!(w.len(), 4);
        assert_eq!(w.to_string(), "l a^-1 l a^-1");
    }

    #[test]
    fn single_twists() {
        let t1 = MarkedSurface::build(1).unwrap();
        let b = apply_word(&parse_word(1, "l").unwrap(), &t1).unwrap();
        assert_eq!(word(&t1, &b, 0), "a^-1 b");
        let id = apply_word(&HeegaardWord::identity(1), &t1).unwrap();
        assert_eq!(word(&t1, &id, 0), "b");

        let t2 = MarkedSurface::build(2).unwrap();
        let b = apply_word(&parse_word(2, "b").unwrap(), &t2).unwrap();
        assert_eq!(word(&t2, &b, 0), "c^-1 a b");
        assert_eq!(word(&t2, &b, 1), "d^-1");
    }

    #[test]
    fn twist_and_untwist() {
        for g in 1..=3 {
            let ms = MarkedSurface::build(g).unwrap();
            let n = ms.generators.len();
            let base = apply_word(&HeegaardWord::from_factors(g as u32, (0..n).map(|s| (s, BigInt::from(1)))), &ms).unwrap();
            for s in 0..n {
                for k in [1, 2, -3] {
                    let k = BigInt::from(k);
                    let there = apply_single_twist(&ms, s, &k, &base).unwrap();
                    let back = apply_single_twist(&ms, s, &-k, &there).unwrap();
                    assert_eq!(back.normalize(1 << 20).unwrap(), base.normalize(1 << 20).unwrap());
                }
            }
        }
    }

    /// On homology a twist is a transvection `x ↦ x + ε·î(x, s)·s` with a
    /// single sign `ε` for every generator. Classes are compared through
    /// their intersection numbers with all generator curves.
    #[test]
    fn twists_act_as_transvections() {
        for g in 1..=4 {
            let ms = MarkedSurface::build(g).unwrap();
            let n = ms.generators.len();
            let curves: Vec<_> = ms.generators.iter().map(|x| x.curve.clone()).collect();
            let profile = |w: &Slp| curves.iter().map(|c| algebraic_intersection(w, c)).collect::<Vec<_>>();
            let mut sign: Option<BigInt> = None;
            let probes = apply_word(&HeegaardWord::from_factors(g as u32, (0..n).rev().map(|s| (s, BigInt::from(2)))), &ms).unwrap();
            let mut probe_words: Vec<Slp> = probes.components.clone();
            probe_words.extend(ms.generators.iter().map(|x| Slp::trivial(&x.base)));
            for s in 0..n {
                let sp = profile(&Slp::trivial(&ms.generators[s].base));
                for x in &probe_words {
                    let before = profile(x);
                    let i = algebraic_intersection(x, &ms.generators[s].curve);
                    let after = profile(&apply_single_twist(&ms, s, &BigInt::from(1), &SequenceMulticurve::new(vec![x.clone()])).unwrap().components[0]);
                    let diff: Vec<BigInt> = after.iter().zip(&before).map(|(a, b)| a - b).collect();
                    if i.is_zero() {
                        assert!(diff.iter().all(Zero::is_zero), "g={g} s={s}");
                        continue;
                    }
                    let k = sp.iter().zip(&diff).find(|(p, _)| !p.is_zero()).map(|(p, d)| d / (p * &i)).unwrap();
                    for (p, d) in sp.iter().zip(&diff) {
                        assert_eq!(&(p * &i * &k), d, "g={g} s={s}");
                    }
                    assert!(k.abs() == BigInt::from(1));
                    match &sign {
                        None => sign = Some(k),
                        Some(e) => assert_eq!(e, &k, "g={g} s={s}"),
                    }
                }
            }
        }
    }
}

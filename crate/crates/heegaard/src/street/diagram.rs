use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{StreetComplex, DEFAULT_GUARD};
use crate::curves::{edge_counts, edged_to_sequences, validate_multicurve, EdgedCurve, NormalCoordinates, SequenceMulticurve};
use crate::error::{Error, Result};
use crate::slp::{cyclic_reduce, Slp};
use crate::surface::{CellularSurface, MarkedSurface, SurfaceJson};
use crate::word::{apply_word, HeegaardWord};

/// `(T, E_T(α), N_T(β))`, with β held as sequences, normal coordinates or both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeegaardDiagram {
    pub surface: CellularSurface,
    pub alpha: Vec<EdgedCurve>,
    /// Extra α curves beyond the first `g`, as normal coordinates.
    pub alpha_extra: Vec<Vec<BigUint>>,
    pub beta_sequences: Option<SequenceMulticurve>,
    pub beta_normal: Option<NormalCoordinates>,
}

impl HeegaardDiagram {
    pub fn from_sequences(surface: CellularSurface, alpha: Vec<EdgedCurve>, beta: SequenceMulticurve) -> Result<Self> {
        let d = HeegaardDiagram { surface, alpha, alpha_extra: Vec::new(), beta_sequences: Some(beta), beta_normal: None };
        d.validate()?;
        Ok(d)
    }

    pub fn from_normal(surface: CellularSurface, alpha: Vec<EdgedCurve>, beta: NormalCoordinates) -> Result<Self> {
        let d = HeegaardDiagram { surface, alpha, alpha_extra: Vec::new(), beta_sequences: None, beta_normal: Some(beta) };
        d.validate()?;
        Ok(d)
    }

    /// `(T_g, α, φ(α))`, on `T_g` itself or on its barycentric subdivision.
    pub fn from_word(w: &HeegaardWord, refine: bool) -> Result<Self> {
        let mut ms = MarkedSurface::build(w.genus as i64)?;
        if refine {
            ms = ms.refine()?;
        }
        let beta = apply_word(w, &ms)?;
        let alpha = ms.alpha_curves();
        Self::from_sequences(ms.surface, alpha, beta)
    }

    /// The canonical α-system of `T_g'` with its own parallel copy as β.
    pub fn alpha_parallel(g: u32) -> Result<Self> {
        Self::from_word(&HeegaardWord::identity(g), true)?.normalized(DEFAULT_GUARD)
    }

    pub fn genus(&self) -> u32 {
        self.surface.genus()
    }

    pub fn num_beta(&self) -> usize {
        match (&self.beta_sequences, &self.beta_normal) {
            (Some(s), _) => s.len(),
            (None, Some(n)) => n.len(),
            (None, None) => 0,
        }
    }

    /// `#α = g`, α edged and disjoint, β letters in range, coordinates normal,
    /// and both encodings describing the same counts when reduced.
    pub fn validate(&self) -> Result<()> {
        let g = self.genus() as usize;
        if self.alpha.len() != g {
            return Err(Error::InvalidDiagram(format!("{} α curves on genus {g}", self.alpha.len())));
        }
        validate_multicurve(&self.surface, &self.alpha)?;
        let ne = self.surface.num_edges();
        if self.beta_sequences.is_none() && self.beta_normal.is_none() {
            return Err(Error::InvalidDiagram("β is missing".into()));
        }
        if let Some(seq) = &self.beta_sequences {
            for c in &seq.components {
                if let Some(l) = c.letters().find(|l| l.edge() >= ne) {
                    return Err(Error::Alphabet(l.code() as i64));
                }
            }
        }
        if let Some(n) = &self.beta_normal {
            n.validate(&self.surface)?;
        }
        if !self.alpha_extra.is_empty() {
            NormalCoordinates::new(self.alpha_extra.clone()).validate(&self.surface)?;
        }
        if let (Some(seq), Some(n)) = (&self.beta_sequences, &self.beta_normal) {
            if seq.len() != n.len() {
                return Err(Error::InvalidDiagram("β encodings disagree on the number of components".into()));
            }
            for (c, v) in seq.components.iter().zip(&n.components) {
                if &edge_counts(c, ne) != v {
                    return Err(Error::InvalidDiagram("β encodings disagree".into()));
                }
            }
        }
        Ok(())
    }

    /// β as sequences, tracing the normal coordinates when needed.
    pub fn sequences(&self, guard: u64) -> Result<SequenceMulticurve> {
        if let Some(s) = &self.beta_sequences {
            return Ok(s.clone());
        }
        let n = self.beta_normal.as_ref().unwrap();
        let sc = StreetComplex::trace(&self.surface, &n.components, &[], guard)?;
        Ok(SequenceMulticurve::from_words(sc.sequences()))
    }

    /// β as normal coordinates; sequences are expanded and cyclically
    /// reduced under `guard` when they are the only encoding.
    pub fn normal(&self, guard: u64) -> Result<NormalCoordinates> {
        if let Some(n) = &self.beta_normal {
            return Ok(n.clone());
        }
        self.surface.require_triangulation()?;
        let seq = self.beta_sequences.as_ref().unwrap().normalize(guard)?;
        let ne = self.surface.num_edges();
        Ok(NormalCoordinates::new(seq.components.iter().map(|c| edge_counts(c, ne)).collect()))
    }

    /// The same diagram with β reduced and held in both encodings.
    pub fn normalized(&self, guard: u64) -> Result<Self> {
        self.surface.require_triangulation()?;
        let seq = match (&self.beta_sequences, &self.beta_normal) {
            (Some(s), _) => s.normalize(guard)?,
            (None, Some(_)) => self.sequences(guard)?,
            (None, None) => unreachable!(),
        };
        let ne = self.surface.num_edges();
        let normal = NormalCoordinates::new(seq.components.iter().map(|c| edge_counts(c, ne)).collect());
        let d = HeegaardDiagram { beta_sequences: Some(seq), beta_normal: Some(normal), ..self.clone() };
        d.validate()?;
        Ok(d)
    }

    /// Keeps only the normal encoding.
    pub fn normal_only(&self, guard: u64) -> Result<Self> {
        let n = self.normal(guard)?;
        Ok(HeegaardDiagram { beta_sequences: None, beta_normal: Some(n), ..self.clone() })
    }

    /// Normal copies of α, each pushed off to its left.
    pub fn alpha_normals(&self) -> Result<Vec<Vec<BigUint>>> {
        let seq = edged_to_sequences(&self.surface, &self.alpha)?;
        let ne = self.surface.num_edges();
        let mut out: Vec<Vec<BigUint>> = seq.components.iter().map(|c| edge_counts(c, ne)).collect();
        out.extend(self.alpha_extra.iter().cloned());
        Ok(out)
    }

    /// Complexity `|T| + Σ|E_T(α_i)| + ‖β‖`, using the normal-coordinate
    /// norm when present and SLP complexity otherwise.
    pub fn complexity(&self) -> u64 {
        let alpha: usize = self.alpha.iter().map(EdgedCurve::len).sum();
        let beta = match (&self.beta_normal, &self.beta_sequences) {
            (Some(n), _) => n.complexity(),
            (None, Some(s)) => s.complexity() as u64,
            (None, None) => 0,
        };
        self.surface.size() as u64 + alpha as u64 + beta
    }

    pub fn to_json(&self) -> DiagramJson {
        let beta = match (&self.beta_sequences, &self.beta_normal) {
            (Some(s), n) => BetaJson::Slp {
                components: s.components.iter().map(Slp::to_json).collect(),
                normal: n.as_ref().map(NormalCoordinates::to_json),
            },
            (None, Some(n)) => BetaJson::Normal { components: n.to_json() },
            (None, None) => unreachable!(),
        };
        DiagramJson {
            surface: self.surface.to_json(),
            alpha: self.alpha.iter().map(EdgedCurve::to_codes).collect(),
            alpha_extra: NormalCoordinates::new(self.alpha_extra.clone()).to_json(),
            beta,
        }
    }

    pub fn from_json(j: &DiagramJson) -> Result<Self> {
        let surface = CellularSurface::from_json(&j.surface)?;
        let alpha = j.alpha.iter().map(|c| EdgedCurve::from_codes(c)).collect::<Result<Vec<_>>>()?;
        let alpha_extra = NormalCoordinates::from_json(&j.alpha_extra)?.components;
        let (beta_sequences, beta_normal) = match &j.beta {
            BetaJson::Slp { components, normal } => (
                Some(SequenceMulticurve::new(components.iter().map(Slp::from_json).collect::<Result<Vec<_>>>()?)),
                normal.as_ref().map(|n| NormalCoordinates::from_json(n)).transpose()?,
            ),
            BetaJson::Normal { components } => (None, Some(NormalCoordinates::from_json(components)?)),
        };
        let d = HeegaardDiagram { surface, alpha, alpha_extra, beta_sequences, beta_normal };
        d.validate()?;
        Ok(d)
    }

    /// Cyclically reduced explicit β words.
    pub fn reduced_words(&self, guard: u64) -> Result<Vec<Vec<crate::slp::Letter>>> {
        Ok(self.sequences(guard)?.expand(guard)?.iter().map(|w| cyclic_reduce(w)).collect())
    }
}

impl Serialize for HeegaardDiagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for HeegaardDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DiagramJson::deserialize(d)?;
        HeegaardDiagram::from_json(&j).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramJson {
    pub surface: SurfaceJson,
    pub alpha: Vec<Vec<i32>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alpha_extra: Vec<Vec<String>>,
    pub beta: BetaJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "encoding", rename_all = "lowercase", deny_unknown_fields)]
pub enum BetaJson {
    Slp {
        components: Vec<crate::slp::SlpJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normal: Option<Vec<Vec<String>>>,
    },
    Normal {
        components: Vec<Vec<String>>,
    },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::parse_word;

    #[test]
    fn json_round_trip_both_encodings() {
        let w = parse_word(2, "b c^2 a^-1").unwrap();
        let d = HeegaardDiagram::from_word(&w, true).unwrap();
        for x in [d.clone(), d.normalized(DEFAULT_GUARD).unwrap(), d.normal_only(DEFAULT_GUARD).unwrap()] {
            let text = serde_json::to_string(&x).unwrap();
            let back: HeegaardDiagram = serde_json::from_str(&text).unwrap();
            assert_eq!(back, x);
            assert_eq!(serde_json::to_string(&back).unwrap(), text);
        }
    }

    #[test]
    fn tracing_recovers_counts() {
        let w = parse_word(2, "b c^2 a^-1 d").unwrap();
        let d = HeegaardDiagram::from_word(&w, true).unwrap().normal_only(DEFAULT_GUARD).unwrap();
        let seq = d.sequences(DEFAULT_GUARD).unwrap();
        let back = HeegaardDiagram { beta_sequences: Some(seq), ..d.clone() };
        back.validate().unwrap();
    }

    #[test]
    fn rejects_inconsistent_encodings() {
        let d = HeegaardDiagram::alpha_parallel(1).unwrap();
        let mut j = d.to_json();
        if let BetaJson::Slp { normal: Some(n), .. } = &mut j.beta {
            n[0][0] = "7".into();
        }
        assert!(HeegaardDiagram::from_json(&j).is_err());
    }
}

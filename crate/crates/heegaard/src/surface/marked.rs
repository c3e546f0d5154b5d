use serde::{Deserialize, Serialize};

use super::{barycentric_subdivision, CellularSurface, Dart, SurfaceJson};
use crate::curves::{push_off, shortest_side, validate_multicurve, EdgedCurve};
use crate::error::{Error, Result};
use crate::slp::Letter;

/// Which side of an edged curve its parallel copy runs on.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// An edged twist curve with its parallel-copy sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub curve: EdgedCurve,
    pub side: Side,
    /// Crossings of the parallel copy, starting alongside the first dart.
    pub base: Vec<Letter>,
    /// `offsets[j]`: where the copy starts alongside dart `j`.
    pub offsets: Vec<usize>,
}

impl Generator {
    pub fn new(s: &CellularSurface, name: &str, darts: Vec<Dart>, side: Option<Side>) -> Result<Self> {
        let curve = EdgedCurve::new(darts);
        curve.validate(s)?;
        let side = side.unwrap_or_else(|| shortest_side(s, curve.darts()));
        let (base, offsets) = push_off(s, curve.darts(), side);
        Ok(Generator { name: name.to_string(), curve, side, base, offsets })
    }

    /// The copy's sequence read from alongside dart `j`.
    pub fn rotated(&self, j: usize) -> Vec<Letter> {
        let k = self.offsets[j];
        let mut w = self.base[k..].to_vec();
        w.extend_from_slice(&self.base[..k]);
        w
    }
}

/// A surface with a canonical α-system and the Lickorish twist curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedSurface {
    pub surface: CellularSurface,
    pub alpha: Vec<Generator>,
    pub generators: Vec<Generator>,
}

/// Generator names for genus `g`, in the order used by [`MarkedSurface::build`].
pub fn generator_names(g: u32) -> Vec<String> {
    match g {
        1 => vec!["a".into(), "l".into()],
        2 => ["a", "b", "c", "d", "e"].iter().map(|s| s.to_string()).collect(),
        _ => {
            let mut v: Vec<String> = (1..=g).map(|i| format!("a{i}")).collect();
            v.extend((1..=g).map(|i| format!("b{i}")));
            v.extend((1..g).map(|i| format!("c{i}")));
            v
        }
    }
}

impl MarkedSurface {
    /// The canonical one-vertex marked surface `T_g`.
    pub fn build(g: i64) -> Result<Self> {
        if !(1..=10_000).contains(&g) {
            return Err(Error::InvalidGenus(g));
        }
        let g = g as u32;
        let p = Letter::pos;
        let n = Letter::neg;
        let (surface, gens, alpha_names): (CellularSurface, Vec<(&str, Dart)>, Vec<String>) = match g {
            1 => {
                let s = CellularSurface::from_faces(vec![vec![p(0), p(1), n(0), n(1)]], Some(vec!["a".into(), "b".into()]))?;
                (s, vec![("a", p(0)), ("l", p(1))], vec!["a".into()])
            }
            2 => {
                let labels: Vec<String> = ["a", "b", "c", "d", "e"].iter().map(|s| s.to_string()).collect();
                let rot = vec![p(0), n(2), n(1), n(3), p(2), p(4), p(3), n(4), n(0), p(1)];
                let s = CellularSurface::from_rotations(&[rot], Some(labels))?;
                (
                    s,
                    vec![("a", n(0)), ("b", p(1)), ("c", p(2)), ("d", p(3)), ("e", n(4))],
                    vec!["a".into(), "e".into()],
                )
            }
            _ => return Self::build_chain(g),
        };
        let generators = gens
            .iter()
            .map(|(name, d)| Generator::new(&surface, name, vec![*d], None))
            .collect::<Result<Vec<_>>>()?;
        let alpha = alpha_names.iter().map(|a| generators.iter().find(|x| &x.name == a).unwrap().clone()).collect();
        let ms = MarkedSurface { surface, alpha, generators };
        ms.validate()?;
        Ok(ms)
    }

    /// One vertex, `3g−1` loops. The chain `b1 c1 b2 … bg` is a sequence of
    /// chords each interleaving only its neighbours, and `a_i` straddles the
    /// first end of `b_i`.
    fn build_chain(g: u32) -> Result<Self> {
        let g = g as usize;
        let a = |i: usize| i - 1;
        let b = |i: usize| g + i - 1;
        let c = |i: usize| 2 * g + i - 1;
        let chain = |m: usize| if m % 2 == 1 { b(m.div_ceil(2)) } else { c(m / 2) };
        // Slot p of the chain line holds the end of chord m at 2m−2 or 2m+1.
        let mut slots: Vec<Option<usize>> = vec![None; 4 * g];
        for m in 1..=2 * g - 1 {
            slots[2 * m - 2] = Some(chain(m));
            slots[2 * m + 1] = Some(chain(m));
        }
        let mut order: Vec<usize> = Vec::with_capacity(6 * g - 2);
        for (pos, slot) in slots.iter().enumerate() {
            let leaf = (pos % 4 == 0).then(|| a(pos / 4 + 1));
            if let Some(l) = leaf {
                order.push(l);
            }
            if let Some(e) = slot {
                order.push(*e);
            }
            if let Some(l) = leaf {
                order.push(l);
            }
        }
        let mut seen = vec![false; 3 * g - 1];
        let rot: Vec<Dart> = order
            .iter()
            .map(|&e| {
                let first = !seen[e];
                seen[e] = true;
                Letter::new(e, first)
            })
            .collect();
        let labels = generator_names(g as u32);
        let surface = CellularSurface::from_rotations(&[rot], Some(labels.clone()))?;
        if surface.genus() as usize != g {
            return Err(Error::InvalidSurface(format!("chain construction produced genus {}", surface.genus())));
        }
        let generators = labels
            .iter()
            .enumerate()
            .map(|(e, name)| Generator::new(&surface, name, vec![Letter::pos(e)], None))
            .collect::<Result<Vec<_>>>()?;
        let alpha = generators[..g].to_vec();
        let ms = MarkedSurface { surface, alpha, generators };
        ms.validate()?;
        Ok(ms)
    }

    pub fn genus(&self) -> u32 {
        self.surface.genus()
    }

    pub fn generator(&self, name: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.name == name)
    }

    pub fn alpha_curves(&self) -> Vec<EdgedCurve> {
        self.alpha.iter().map(|g| g.curve.clone()).collect()
    }

    /// α has `g` edge-disjoint components and every stored copy matches its curve.
    pub fn validate(&self) -> Result<()> {
        if self.alpha.len() != self.genus() as usize {
            return Err(Error::InvalidSurface(format!("{} α curves on genus {}", self.alpha.len(), self.genus())));
        }
        validate_multicurve(&self.surface, &self.alpha_curves())?;
        for g in self.alpha.iter().chain(&self.generators) {
            g.curve.validate(&self.surface)?;
            let (base, offsets) = push_off(&self.surface, g.curve.darts(), g.side);
            if base != g.base || offsets != g.offsets {
                return Err(Error::InvalidSurface(format!("stored sequence of {} disagrees with its curve", g.name)));
            }
        }
        Ok(())
    }

    /// The same marking on the barycentric subdivision, keeping each copy's side.
    pub fn refine(&self) -> Result<MarkedSurface> {
        let sub = barycentric_subdivision(&self.surface)?;
        let lift = |g: &Generator| Generator::new(&sub.surface, &g.name, sub.map_darts(g.curve.darts()), Some(g.side));
        let alpha = self.alpha.iter().map(lift).collect::<Result<Vec<_>>>()?;
        let generators = self.generators.iter().map(lift).collect::<Result<Vec<_>>>()?;
        Ok(MarkedSurface { surface: sub.surface, alpha, generators })
    }

    pub fn to_json(&self) -> MarkedSurfaceJson {
        let gj = |g: &Generator| GeneratorJson {
            name: g.name.clone(),
            edge_list: g.curve.to_codes(),
            side: g.side,
            base_sequence: g.base.iter().map(|l| l.code()).collect(),
            offsets: g.offsets.clone(),
        };
        let s = self.surface.to_json();
        MarkedSurfaceJson {
            genus: s.genus,
            edges: s.edges,
            faces: s.faces,
            alpha: self.alpha.iter().map(gj).collect(),
            generators: self.generators.iter().map(gj).collect(),
        }
    }

    pub fn from_json(j: &MarkedSurfaceJson) -> Result<Self> {
        let surface =
            CellularSurface::from_json(&SurfaceJson { genus: j.genus, edges: j.edges.clone(), faces: j.faces.clone() })?;
        let gen = |x: &GeneratorJson| -> Result<Generator> {
            let curve = EdgedCurve::from_codes(&x.edge_list)?;
            let base = x
                .base_sequence
                .iter()
                .map(|&c| Letter::from_code(c).ok_or(Error::Alphabet(c as i64)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Generator { name: x.name.clone(), curve, side: x.side, base, offsets: x.offsets.clone() })
        };
        let alpha = j.alpha.iter().map(gen).collect::<Result<Vec<_>>>()?;
        let generators = j.generators.iter().map(gen).collect::<Result<Vec<_>>>()?;
        let ms = MarkedSurface { surface, alpha, generators };
        ms.validate()?;
        Ok(ms)
    }
}

impl Serialize for MarkedSurface {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkedSurface {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MarkedSurfaceJson::deserialize(d)?;
        MarkedSurface::from_json(&j).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkedSurfaceJson {
    pub genus: u32,
    pub edges: Vec<super::EdgeJson>,
    pub faces: Vec<Vec<i32>>,
    pub alpha: Vec<GeneratorJson>,
    pub generators: Vec<GeneratorJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorJson {
    pub name: String,
    pub edge_list: Vec<i32>,
    pub side: Side,
    pub base_sequence: Vec<i32>,
    pub offsets: Vec<usize>,
}

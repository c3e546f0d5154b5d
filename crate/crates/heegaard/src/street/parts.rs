use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::Zero;

use super::HeegaardDiagram;
use crate::curves::{EdgedCurve, NormalCoordinates};
use crate::error::Result;
use crate::surface::{CellularSurface, Dart};

/// A diagram taken apart into face lists, for cut-and-paste surgery.
pub(crate) struct Parts {
    pub faces: Vec<Vec<Dart>>,
    pub labels: Vec<String>,
    pub alpha: Vec<EdgedCurve>,
    pub beta: Vec<Vec<BigUint>>,
}

impl Parts {
    pub fn new(d: &HeegaardDiagram, guard: u64) -> Result<Self> {
        d.surface.require_triangulation()?;
        Ok(Parts {
            faces: d.surface.faces().to_vec(),
            labels: d.surface.labels().to_vec(),
            alpha: d.alpha.clone(),
            beta: d.normal(guard)?.components,
        })
    }

    pub fn num_edges(&self) -> usize {
        self.labels.len()
    }

    pub fn add_edge(&mut self, label: String) -> usize {
        let taken: HashSet<&str> = self.labels.iter().map(String::as_str).collect();
        let mut name = label;
        while taken.contains(name.as_str()) {
            name.push('\'');
        }
        self.labels.push(name);
        for b in &mut self.beta {
            b.push(BigUint::zero());
        }
        self.labels.len() - 1
    }

    pub fn finish(self) -> Result<HeegaardDiagram> {
        let surface = CellularSurface::from_faces(self.faces, Some(self.labels))?;
        HeegaardDiagram::from_normal(surface, self.alpha, NormalCoordinates::new(self.beta))
    }

    /// Deletes edges no face refers to any more and renumbers the rest.
    pub fn remove_edges(&mut self, dead: &[usize]) {
        let mut map = vec![usize::MAX; self.num_edges()];
        let mut next = 0;
        for (e, slot) in map.iter_mut().enumerate() {
            if !dead.contains(&e) {
                *slot = next;
                next += 1;
            }
        }
        let m = |d: Dart| Dart::new(map[d.edge()], d.is_positive());
        for f in &mut self.faces {
            for d in f.iter_mut() {
                *d = m(*d);
            }
        }
        for a in &mut self.alpha {
            *a = EdgedCurve::new(a.darts().iter().map(|&d| m(d)).collect());
        }
        fn keep<T: Clone>(v: &[T], dead: &[usize]) -> Vec<T> {
            v.iter().enumerate().filter(|(e, _)| !dead.contains(e)).map(|(_, x)| x.clone()).collect()
        }
        self.labels = keep(&self.labels, dead);
        for b in &mut self.beta {
            *b = keep(b, dead);
        }
    }
}

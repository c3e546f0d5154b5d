use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::parts::Parts;
use super::HeegaardDiagram;
use crate::curves::{geometric_count, geometric_count_normal, EdgedCurve, NormalCoordinates};
use crate::error::{Error, Result};
use crate::slp::Letter;
use crate::surface::{corner_coordinates, CellularSurface, Dart};

const BLOCK_JSON: &str = include_str!("../../data/torus_block.json");

/// Face of the torus block that is removed when gluing.
pub const BLOCK_FACE: usize = 11;

impl Parts {
    /// Splits face `f` around an inner triangle that no curve enters and
    /// returns the index of that triangle.
    fn split_face(&mut self, f: usize) -> Result<usize> {
        let [d0, d1, d2]: [Dart; 3] = self.faces.get(f).and_then(|x| x.as_slice().try_into().ok()).ok_or_else(|| {
            Error::InvalidArgument(format!("face {f} is not a triangle of this surface"))
        })?;
        let base = self.num_edges();
        let names = ["sA", "sB", "sC", "tA", "tB", "tC", "iAB", "iBC", "iCA"];
        for n in names {
            self.add_edge(n.to_string());
        }
        let e = |k: usize| Letter::pos(base + k);
        let r = |k: usize| Letter::neg(base + k);
        for b in &mut self.beta {
            let (cb, cc, ca) = corner_coordinates(&b[d0.edge()], &b[d1.edge()], &b[d2.edge()])?;
            for (k, c) in [ca.clone(), cb.clone(), cc.clone(), ca, cb, cc].into_iter().enumerate() {
                b[base + k] = c;
            }
        }
        self.faces[f] = vec![d0, e(1), r(3)];
        self.faces.push(vec![e(3), r(6), r(0)]);
        self.faces.push(vec![d1, e(2), r(4)]);
        self.faces.push(vec![e(4), r(7), r(1)]);
        self.faces.push(vec![d2, e(0), r(5)]);
        self.faces.push(vec![e(5), r(8), r(2)]);
        self.faces.push(vec![e(6), e(7), e(8)]);
        Ok(self.faces.len() - 1)
    }

    /// Removes face `f` here and face `h` of `other`, and identifies their
    /// boundaries. Neither face may meet a β curve.
    fn glue(mut self, f: usize, other: Parts, h: usize) -> Result<Parts> {
        let empty = |p: &Parts, f: usize| p.faces[f].iter().all(|d| p.beta.iter().all(|b| b[d.edge()].is_zero()));
        if !empty(&self, f) || !empty(&other, h) || self.faces[f].len() != 3 || other.faces[h].len() != 3 {
            return Err(Error::InvalidArgument("glued faces must be triangles missed by β".into()));
        }
        let y = self.faces.remove(f);
        let x = &other.faces[h];
        let mut map: Vec<Option<Dart>> = vec![None; other.num_edges()];
        for (xi, yi) in [(x[0], y[0]), (x[2], y[1]), (x[1], y[2])] {
            let img = if xi.is_positive() { yi.inverse() } else { yi };
            map[xi.edge()] = Some(img);
        }
        let own_beta = self.beta.len();
        for e in 0..other.num_edges() {
            if map[e].is_none() {
                let id = self.add_edge(other.labels[e].clone());
                map[e] = Some(Letter::pos(id));
            }
        }
        let m = |d: Dart| {
            let img = map[d.edge()].unwrap();
            if d.is_positive() {
                img
            } else {
                img.inverse()
            }
        };
        for (k, face) in other.faces.iter().enumerate() {
            if k != h {
                self.faces.push(face.iter().map(|&d| m(d)).collect());
            }
        }
        self.alpha.extend(other.alpha.iter().map(|a| EdgedCurve::new(a.darts().iter().map(|&d| m(d)).collect())));
        let ne = self.num_edges();
        for b in &other.beta {
            let mut v = vec![BigUint::zero(); ne];
            for (e, x) in b.iter().enumerate() {
                v[map[e].unwrap().edge()] += x;
            }
            self.beta.push(v);
        }
        debug_assert_eq!(self.beta.len(), own_beta + other.beta.len());
        Ok(self)
    }
}

/// The genus-one diagram of `S³` on a 3×3 grid triangulation of the torus:
/// `a` is the bottom row of horizontal edges, `b` runs up the first column.
pub fn torus_block() -> HeegaardDiagram {
    serde_json::from_str(BLOCK_JSON).expect("frozen torus block is valid")
}

/// Rebuilds the torus block from its grid description.
pub fn build_torus_block() -> Result<HeegaardDiagram> {
    let h = |i: usize, j: usize| 3 * (j % 3) + i % 3;
    let v = |i: usize, j: usize| 9 + h(i, j);
    let g = |i: usize, j: usize| 18 + h(i, j);
    let (p, n) = (Letter::pos, Letter::neg);
    let mut faces = Vec::new();
    for j in 0..3 {
        for i in 0..3 {
            faces.push(vec![p(h(i, j)), p(v(i + 1, j)), n(g(i, j))]);
            faces.push(vec![p(g(i, j)), n(h(i, j + 1)), n(v(i, j))]);
        }
    }
    let mut labels = vec![String::new(); 27];
    for j in 0..3 {
        for i in 0..3 {
            labels[h(i, j)] = format!("h{i}{j}");
            labels[v(i, j)] = format!("v{i}{j}");
            labels[g(i, j)] = format!("g{i}{j}");
        }
    }
    let surface = CellularSurface::from_faces(faces, Some(labels))?;
    let alpha = vec![EdgedCurve::new((0..3).map(|i| p(h(i, 0))).collect())];
    let mut b = vec![BigUint::zero(); 27];
    for j in 0..3 {
        b[h(0, j)] = BigUint::one();
        b[g(0, j)] = BigUint::one();
    }
    HeegaardDiagram::from_normal(surface, alpha, NormalCoordinates::new(vec![b]))
}

/// Connected sum with the genus-one splitting of `S³`, performed inside face `face`.
/// The new pair is the last α and the last β component.
pub fn stabilize(d: &HeegaardDiagram, face: usize, guard: u64) -> Result<HeegaardDiagram> {
    let mut p = Parts::new(d, guard)?;
    let inner = p.split_face(face)?;
    let block = torus_block();
    p.glue(inner, Parts::new(&block, guard)?, BLOCK_FACE)?.finish()
}

/// Connected sum of two diagrams, joined inside their first faces.
pub fn connected_sum(d1: &HeegaardDiagram, d2: &HeegaardDiagram, guard: u64) -> Result<HeegaardDiagram> {
    let mut p1 = Parts::new(d1, guard)?;
    let mut p2 = Parts::new(d2, guard)?;
    let f1 = p1.split_face(0)?;
    let f2 = p2.split_face(0)?;
    p1.glue(f1, p2, f2)?.finish()
}

/// Geometric counts `|b_j ∩ E(a_i)|`, indexed `[j][i]`.
fn count_matrix(d: &HeegaardDiagram) -> Vec<Vec<BigUint>> {
    match (&d.beta_normal, &d.beta_sequences) {
        (Some(n), _) => n.components.iter().map(|b| d.alpha.iter().map(|a| geometric_count_normal(b, a)).collect()).collect(),
        (None, Some(s)) => s.components.iter().map(|b| d.alpha.iter().map(|a| geometric_count(b, a)).collect()).collect(),
        (None, None) => Vec::new(),
    }
}

fn is_trivial_pair(c: &[Vec<BigUint>], i: usize, j: usize) -> bool {
    c[j][i].is_one()
        && c[j].iter().enumerate().all(|(k, x)| k == i || x.is_zero())
        && c.iter().enumerate().all(|(l, row)| l == j || row[i].is_zero())
}

/// A pair `(i, j)` with `a_i` meeting `b_j` once and nothing else meeting
/// either. Higher indices are tried first, so a fresh stabilization is found.
pub fn find_trivial_stabilization(d: &HeegaardDiagram) -> Option<(usize, usize)> {
    let c = count_matrix(d);
    (0..d.alpha.len()).rev().flat_map(|i| (0..c.len()).rev().map(move |j| (i, j))).find(|&(i, j)| is_trivial_pair(&c, i, j))
}

/// Cuts along `a_i`, caps both holes with coned disks and drops `a_i`, `b_j`.
pub fn destabilize(d: &HeegaardDiagram, pair: (usize, usize), guard: u64) -> Result<HeegaardDiagram> {
    let (i, j) = pair;
    let mut p = Parts::new(d, guard)?;
    let c = count_matrix(&HeegaardDiagram { beta_sequences: None, beta_normal: Some(NormalCoordinates::new(p.beta.clone())), ..d.clone() });
    if i >= d.alpha.len() || j >= c.len() || !is_trivial_pair(&c, i, j) {
        return Err(Error::InvalidArgument(format!("({i}, {j}) is not a trivial stabilization pair")));
    }
    if d.genus() < 2 {
        return Err(Error::InvalidGenus(0));
    }
    let a = p.alpha.remove(i);
    p.beta.remove(j);
    let darts = a.darts().to_vec();
    let mut right = Vec::with_capacity(darts.len());
    for &x in &darts {
        let e2 = p.add_edge(format!("{}'", p.labels[x.edge()]));
        let x2 = Letter::new(e2, x.is_positive());
        let (f, pos) = d.surface.dart_location(x.inverse());
        p.faces[f][pos] = x2.inverse();
        right.push(x2);
    }
    let left: Vec<Dart> = darts.iter().rev().map(|x| x.inverse()).collect();
    for cap in [left, right] {
        let l = cap.len();
        let spokes: Vec<usize> = (0..l).map(|k| p.add_edge(format!("r{k}"))).collect();
        for k in 0..l {
            p.faces.push(vec![cap[k], Letter::pos(spokes[(k + 1) % l]), Letter::neg(spokes[k])]);
        }
    }
    p.finish()
}

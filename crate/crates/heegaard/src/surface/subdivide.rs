use super::{CellularSurface, Dart};
use crate::error::Result;
use crate::slp::Letter;

/// Index maps from a surface to its barycentric subdivision.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub surface: CellularSurface,
    /// For old edge `e`: the new edges `tail→mid` and `mid→head`.
    pub halves: Vec<[usize; 2]>,
}

impl Subdivision {
    /// The two new darts traversed when walking the old dart `d`.
    pub fn map_dart(&self, d: Dart) -> [Dart; 2] {
        let [h0, h1] = self.halves[d.edge()];
        if d.is_positive() {
            [Letter::pos(h0), Letter::pos(h1)]
        } else {
            [Letter::neg(h1), Letter::neg(h0)]
        }
    }

    pub fn map_darts(&self, ds: &[Dart]) -> Vec<Dart> {
        ds.iter().flat_map(|&d| self.map_dart(d)).collect()
    }
}

/// First barycentric subdivision: a vertex at every edge midpoint and face
/// centre, two triangles per dart. Labels of halves are `name.0` and `name.1`.
pub fn barycentric_subdivision(s: &CellularSurface) -> Result<Subdivision> {
    let ne = s.num_edges();
    let sides: usize = s.faces().iter().map(Vec::len).sum();
    let mut labels: Vec<String> = Vec::with_capacity(2 * ne + 2 * sides);
    for e in 0..ne {
        labels.push(format!("{}.0", s.label(e)));
        labels.push(format!("{}.1", s.label(e)));
    }
    let halves: Vec<[usize; 2]> = (0..ne).map(|e| [2 * e, 2 * e + 1]).collect();
    let corner_base = 2 * ne;
    let mid_base = corner_base + sides;
    for (f, face) in s.faces().iter().enumerate() {
        for i in 0..face.len() {
            labels.push(format!("f{f}c{i}"));
        }
    }
    for (f, face) in s.faces().iter().enumerate() {
        for i in 0..face.len() {
            labels.push(format!("f{f}m{i}"));
        }
    }
    let half_darts = |d: Dart| -> [Dart; 2] {
        let [h0, h1] = halves[d.edge()];
        if d.is_positive() {
            [Letter::pos(h0), Letter::pos(h1)]
        } else {
            [Letter::neg(h1), Letter::neg(h0)]
        }
    };
    let mut faces = Vec::with_capacity(2 * sides);
    let mut offset = 0;
    for face in s.faces() {
        let k = face.len();
        // corner spoke i: centre → tail(d_i); mid spoke i: centre → midpoint of d_i.
        for (i, &d) in face.iter().enumerate() {
            let [first, second] = half_darts(d);
            let corner_i = corner_base + offset + i;
            let corner_next = corner_base + offset + (i + 1) % k;
            let mid_i = mid_base + offset + i;
            faces.push(vec![first, Letter::neg(mid_i), Letter::pos(corner_i)]);
            faces.push(vec![second, Letter::neg(corner_next), Letter::pos(mid_i)]);
        }
        offset += k;
    }
    let surface = CellularSurface::from_faces(faces, Some(labels))?;
    debug_assert_eq!(surface.euler_characteristic(), s.euler_characteristic());
    Ok(Subdivision { surface, halves })
}

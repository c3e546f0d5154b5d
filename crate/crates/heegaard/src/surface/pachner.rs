use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{corner_coordinates, Dart};
use crate::curves::edge_counts;
use crate::error::{Error, Result};
use crate::slp::{cyclic_reduce, Slp};
use crate::street::parts::Parts;
use crate::street::{HeegaardDiagram, StreetComplex};

/// A local retriangulation.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "kebab-case")]
pub enum PachnerMove {
    /// Cone a face from a new central vertex.
    OneThree { face: usize },
    /// Remove a vertex of degree three.
    ThreeOne { vertex: usize },
    /// Flip an edge inside the quadrilateral formed by its two faces.
    TwoTwo { edge: usize },
}

/// Applies `mv` to the surface of `d` and recomputes the normal coordinates of β.
///
/// New edges are appended. A `3→1` move deletes the three spokes and
/// renumbers the remaining edges in order.
pub fn pachner_move(d: &HeegaardDiagram, mv: PachnerMove, guard: u64) -> Result<HeegaardDiagram> {
    if d.beta_normal.is_none() {
        return Err(Error::Encoding("Pachner moves need β in normal coordinates".into()));
    }
    let mut p = Parts::new(d, guard)?;
    match mv {
        PachnerMove::OneThree { face } => one_three(&mut p, face)?,
        PachnerMove::ThreeOne { vertex } => three_one(&mut p, d, vertex, guard)?,
        PachnerMove::TwoTwo { edge } => two_two(&mut p, d, edge)?,
    }
    let mut out = p.finish()?;
    out.alpha_extra = Vec::new();
    if d.beta_sequences.is_some() {
        out = out.normalized(guard)?;
    }
    Ok(out)
}

fn one_three(p: &mut Parts, f: usize) -> Result<()> {
    let [d0, d1, d2]: [Dart; 3] = p
        .faces
        .get(f)
        .and_then(|x| x.as_slice().try_into().ok())
        .ok_or_else(|| Error::InvalidArgument(format!("no face {f}")))?;
    let base = p.num_edges();
    for n in ["oA", "oB", "oC"] {
        p.add_edge(n.to_string());
    }
    for b in &mut p.beta {
        let (cb, cc, ca) = corner_coordinates(&b[d0.edge()], &b[d1.edge()], &b[d2.edge()])?;
        b[base] = ca;
        b[base + 1] = cb;
        b[base + 2] = cc;
    }
    let s = |k: usize| Dart::pos(base + k);
    let r = |k: usize| Dart::neg(base + k);
    p.faces[f] = vec![d0, s(1), r(0)];
    p.faces.push(vec![d1, s(2), r(1)]);
    p.faces.push(vec![d2, s(0), r(2)]);
    Ok(())
}

fn three_one(p: &mut Parts, d: &HeegaardDiagram, v: usize, guard: u64) -> Result<()> {
    let s = &d.surface;
    if v >= s.num_vertices() {
        return Err(Error::InvalidArgument(format!("no vertex {v}")));
    }
    let rot = s.rotation(v).to_vec();
    if rot.len() != 3 {
        return Err(Error::Degenerate(format!("vertex {v} has degree {}", rot.len())));
    }
    if d.alpha.iter().flat_map(|a| a.darts()).any(|&x| s.tail(x) == v) {
        return Err(Error::Refused(format!("vertex {v} lies on α")));
    }
    let mut faces = Vec::with_capacity(3);
    let mut outer = Vec::with_capacity(3);
    for k in 0..3 {
        let (f, pos) = s.dart_location(rot[k]);
        let face = s.face(f);
        if s.head(rot[k]) == v || face[(pos + 2) % 3] != rot[(k + 1) % 3].inverse() {
            return Err(Error::Degenerate(format!("the star of vertex {v} is not three triangles")));
        }
        faces.push(f);
        outer.push(face[(pos + 1) % 3]);
    }
    let dead: Vec<usize> = rot.iter().map(|x| x.edge()).collect();
    if faces[0] == faces[1] || faces[1] == faces[2] || faces[0] == faces[2] || dead[0] == dead[1] || dead[1] == dead[2] {
        return Err(Error::Degenerate(format!("the star of vertex {v} is not three triangles")));
    }
    // Arcs crossing the spokes may wind around the vertex; erase the spoke
    // crossings and reduce to find the normal representative.
    let n = d.normal(guard)?;
    let sc = StreetComplex::trace(s, &n.components, &[], guard)?;
    let words: Vec<Vec<Dart>> = sc.sequences().iter().map(|w| cyclic_reduce(&w.iter().copied().filter(|l| !dead.contains(&l.edge())).collect::<Vec<_>>())).collect();
    if words.iter().any(Vec::is_empty) {
        return Err(Error::Degenerate(format!("a β component only links vertex {v}")));
    }
    p.beta = words.iter().map(|w| edge_counts(&Slp::trivial(w), s.num_edges())).collect::<Vec<Vec<BigUint>>>();
    let mut fs = faces.clone();
    fs.sort_unstable();
    p.faces[fs[0]] = outer;
    p.faces.remove(fs[2]);
    p.faces.remove(fs[1]);
    p.remove_edges(&dead);
    Ok(())
}

fn two_two(p: &mut Parts, d: &HeegaardDiagram, e: usize) -> Result<()> {
    let s = &d.surface;
    if e >= s.num_edges() {
        return Err(Error::InvalidArgument(format!("no edge {e}")));
    }
    if d.alpha.iter().flat_map(|a| a.edges()).any(|x| x == e) {
        return Err(Error::Refused(format!("edge {e} belongs to α")));
    }
    let (fl, pl) = s.dart_location(Dart::pos(e));
    let (fr, pr) = s.dart_location(Dart::neg(e));
    if fl == fr {
        return Err(Error::Degenerate(format!("edge {e} borders one face twice")));
    }
    let l = s.face(fl);
    let r = s.face(fr);
    let (a, b) = (l[(pl + 1) % 3], l[(pl + 2) % 3]);
    let (c, dd) = (r[(pr + 1) % 3], r[(pr + 2) % 3]);
    let edges = [a.edge(), b.edge(), c.edge(), dd.edge()];
    if (0..4).any(|i| (i + 1..4).any(|j| edges[i] == edges[j])) {
        return Err(Error::Degenerate(format!("the faces at edge {e} share more than one edge")));
    }
    for x in &mut p.beta {
        let (na, nb, nc, nd) = (&x[a.edge()], &x[b.edge()], &x[c.edge()], &x[dd.edge()]);
        let m = (na + nc).max(nb + nd);
        x[e] = m - &x[e];
    }
    let f = Dart::pos(e);
    p.faces[fl] = vec![f, b, c];
    p.faces[fr] = vec![f.inverse(), dd, a];
    Ok(())
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;

    use super::*;
    use crate::street::{check_diagram, DEFAULT_GUARD};
    use crate::word::parse_word;

    fn diagram(g: u32, w: &str) -> HeegaardDiagram {
        HeegaardDiagram::from_word(&parse_word(g, w).unwrap(), true).unwrap().normal_only(DEFAULT_GUARD).unwrap()
    }

    #[test]
    fn one_three_uses_corner_counts() {
        let d = diagram(1, "l a^-1 l");
        let n = d.normal(DEFAULT_GUARD).unwrap();
        let f = (0..d.surface.num_faces()).find(|&f| d.surface.face(f).iter().any(|x| !n.components[0][x.edge()].is_zero())).unwrap();
        let face = d.surface.face(f).to_vec();
        let c = |k: usize| n.components[0][face[k].edge()].clone();
        let (cb, cc, ca) = corner_coordinates(&c(0), &c(1), &c(2)).unwrap();
        let m = pachner_move(&d, PachnerMove::OneThree { face: f }, DEFAULT_GUARD).unwrap();
        let ne = d.surface.num_edges();
        let nn = m.normal(DEFAULT_GUARD).unwrap();
        assert_eq!(nn.components[0][ne..].to_vec(), vec![ca, cb, cc]);
        assert!(check_diagram(&m, DEFAULT_GUARD).unwrap().valid);
    }

    #[test]
    fn one_three_then_three_one() {
        let d = diagram(2, "b c^-2 a d");
        let nv = d.surface.num_vertices();
        for f in [0, 5, 17] {
            let m = pachner_move(&d, PachnerMove::OneThree { face: f }, DEFAULT_GUARD).unwrap();
            assert_eq!(m.surface.num_vertices(), nv + 1);
            let v = (0..m.surface.num_vertices()).find(|&v| m.surface.rotation(v).iter().all(|x| x.edge() >= d.surface.num_edges())).unwrap();
            let back = pachner_move(&m, PachnerMove::ThreeOne { vertex: v }, DEFAULT_GUARD).unwrap();
            assert_eq!(back.normal(DEFAULT_GUARD).unwrap(), d.normal(DEFAULT_GUARD).unwrap());
            assert_eq!(back.surface.num_faces(), d.surface.num_faces());
        }
    }

    #[test]
    fn flips_are_involutions() {
        let d = diagram(1, "l^3 a^-1");
        let alpha: Vec<usize> = d.alpha.iter().flat_map(|a| a.edges()).collect();
        let mut flipped = 0;
        for e in 0..d.surface.num_edges() {
            if alpha.contains(&e) {
                assert!(matches!(pachner_move(&d, PachnerMove::TwoTwo { edge: e }, DEFAULT_GUARD), Err(Error::Refused(_))));
                continue;
            }
            let Ok(m) = pachner_move(&d, PachnerMove::TwoTwo { edge: e }, DEFAULT_GUARD) else { continue };
            flipped += 1;
            assert!(check_diagram(&m, DEFAULT_GUARD).unwrap().valid);
            let back = pachner_move(&m, PachnerMove::TwoTwo { edge: e }, DEFAULT_GUARD).unwrap();
            assert_eq!(back.normal(DEFAULT_GUARD).unwrap(), d.normal(DEFAULT_GUARD).unwrap());
        }
        assert!(flipped > 0);
    }

    #[test]
    fn needs_normal_encoding() {
        let d = HeegaardDiagram::from_word(&parse_word(1, "l").unwrap(), true).unwrap();
        assert!(matches!(pachner_move(&d, PachnerMove::OneThree { face: 0 }, DEFAULT_GUARD), Err(Error::Encoding(_))));
    }
}

//! Explicit overlay of normal curves on a triangulation.
//!
//! Each triangle is cut by the normal arcs into corner regions (next to a
//! vertex), strips (between two consecutive arcs of a corner) and one central
//! region. Regions are never materialised; their ids and boundary items are
//! computed from the corner counts of their face. Ports are the segments into
//! which the curve points divide an edge.
//!
//! Edged curves can be added as blockers. Their segments become boundary and
//! their vertices leave the interior. Where several blockers meet at one
//! vertex they are resolved as if pushed apart into their private sectors.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::curves::EdgedCurve;
use crate::error::{Error, Result};
use crate::slp::{cyclic_reduce, invert_word, Letter};
use crate::surface::{corner_coordinates, CellularSurface, Dart, Side};

/// Default cap on the number of curve points traced.
pub const DEFAULT_GUARD: u64 = 1_000_000;

/// One edge of a region boundary, listed counter-clockwise.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Item {
    /// Segment `q` of side `side`, counted from the tail of the side's dart.
    Port { face: u32, side: u8, q: u32 },
    /// Arc `k` of corner `corner`; `fwd` runs from side `corner` to the next side.
    Arc { face: u32, corner: u8, k: u32, fwd: bool },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum RegionKind {
    Central,
    Corner(u8),
    Strip(u8, u32),
}

#[derive(Copy, Clone, Debug)]
struct ArcInfo {
    comp: u32,
    t: u32,
    fwd: bool,
}

struct FaceData {
    darts: [Dart; 3],
    len: [u32; 3],
    corner: [u32; 3],
    base: usize,
    strip_base: [usize; 3],
    arcs: [Vec<ArcInfo>; 3],
}

/// A connected component of the complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub euler: i64,
    pub boundaries: Vec<usize>,
    pub regions: usize,
}

impl Piece {
    pub fn is_planar(&self) -> bool {
        self.euler == 2 - self.boundaries.len() as i64
    }

    pub fn is_disk(&self) -> bool {
        self.euler == 1 && self.boundaries.len() == 1
    }
}

/// A boundary circle of some piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Boundary {
    pub piece: usize,
    /// Sides of traced curves along this circle.
    pub curves: Vec<(usize, Side)>,
    /// Blocking curves along this circle.
    pub blockers: Vec<usize>,
    /// Crossings of a copy pushed slightly into the piece.
    pub letters: Vec<Letter>,
}

/// The traced overlay with its complement census.
pub struct StreetComplex<'a> {
    surface: &'a CellularSurface,
    n: Vec<u32>,
    faces: Vec<FaceData>,
    bases: Vec<usize>,
    num_region_ids: usize,
    live: Vec<bool>,
    blocked: Vec<Option<(u32, Dart)>>,
    sequences: Vec<Vec<Letter>>,
    piece_of: Vec<u32>,
    pieces: Vec<Piece>,
    boundaries: Vec<Boundary>,
    reroute: HashMap<(usize, usize), ((usize, usize), Vec<Letter>)>,
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n as u32).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] as usize != r {
            r = self.0[r] as usize;
        }
        let mut x = x;
        while self.0[x] as usize != r {
            let next = self.0[x] as usize;
            self.0[x] = r as u32;
            x = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b) as u32;
        }
    }
}

impl<'a> StreetComplex<'a> {
    /// Traces the normal curves `curves` (one coordinate vector per component)
    /// with the edged curves `blockers` cut out as well.
    pub fn trace(s: &'a CellularSurface, curves: &[Vec<BigUint>], blockers: &[EdgedCurve], guard: u64) -> Result<Self> {
        s.require_triangulation()?;
        let ne = s.num_edges();
        let mut total = vec![BigUint::default(); ne];
        for (i, c) in curves.iter().enumerate() {
            if c.len() != ne {
                return Err(Error::NotNormal(format!("component {i} has {} entries for {ne} edges", c.len())));
            }
            if c.iter().all(|x| x == &BigUint::default()) {
                return Err(Error::InvalidCurve(format!("component {i} is empty")));
            }
            for (t, x) in total.iter_mut().zip(c) {
                *t += x;
            }
        }
        let sum: BigUint = total.iter().sum();
        if sum > BigUint::from(guard) {
            return Err(Error::guard(sum, guard));
        }
        let n: Vec<u32> = total.iter().map(|x| x.to_u32().unwrap()).collect();

        let mut faces = Vec::with_capacity(s.num_faces());
        let mut bases = Vec::with_capacity(s.num_faces());
        let mut live = Vec::new();
        let mut next = 0usize;
        for face in s.faces() {
            let darts = [face[0], face[1], face[2]];
            let len = darts.map(|d| n[d.edge()]);
            let (c01, c12, c20) =
                corner_coordinates(&BigUint::from(len[0]), &BigUint::from(len[1]), &BigUint::from(len[2]))?;
            let corner = [c01, c12, c20].map(|x| x.to_u32().unwrap());
            let base = next;
            bases.push(base);
            live.push(true);
            for c in corner {
                live.push(c > 0);
            }
            let mut strip_base = [0; 3];
            let mut at = base + 4;
            for i in 0..3 {
                strip_base[i] = at;
                let k = corner[i].saturating_sub(1) as usize;
                live.extend(std::iter::repeat_n(true, k));
                at += k;
            }
            next = at;
            let arcs = corner.map(|c| vec![ArcInfo { comp: u32::MAX, t: 0, fwd: true }; c as usize]);
            faces.push(FaceData { darts, len, corner, base, strip_base, arcs });
        }
        let mut blocked = vec![None; ne];
        for (a, c) in blockers.iter().enumerate() {
            c.validate(s)?;
            for &d in c.darts() {
                if blocked[d.edge()].is_some() {
                    return Err(Error::InvalidCurve(format!("blocking curves share edge {}", d.edge())));
                }
                blocked[d.edge()] = Some((a as u32, d));
            }
        }
        let mut sc = StreetComplex {
            surface: s,
            n,
            faces,
            bases,
            num_region_ids: next,
            live,
            blocked,
            sequences: Vec::new(),
            piece_of: Vec::new(),
            pieces: Vec::new(),
            boundaries: Vec::new(),
            reroute: HashMap::new(),
        };
        sc.trace_curves(curves)?;
        sc.census(blockers)?;
        Ok(sc)
    }

    pub fn surface(&self) -> &CellularSurface {
        self.surface
    }

    /// Crossing sequence of each traced component.
    pub fn sequences(&self) -> &[Vec<Letter>] {
        &self.sequences
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn boundaries(&self) -> &[Boundary] {
        &self.boundaries
    }

    pub fn num_regions(&self) -> usize {
        self.live.iter().filter(|&&x| x).count()
    }

    /// Central regions, one per triangle.
    pub fn num_junctions(&self) -> usize {
        self.faces.len()
    }

    /// Connected unions of non-central regions.
    pub fn num_streets(&self) -> usize {
        let mut uf = UnionFind::new(self.num_region_ids);
        for r in self.live_regions() {
            if self.kind(r).1 == RegionKind::Central {
                continue;
            }
            let (items, len) = self.items(r);
            for (p, it) in items[..len].iter().enumerate() {
                if self.is_interior_port(*it) {
                    let (r2, _) = self.partner(r, p);
                    if self.kind(r2).1 != RegionKind::Central {
                        uf.union(r, r2);
                    }
                }
            }
        }
        self.live_regions().filter(|&r| self.kind(r).1 != RegionKind::Central && uf.find(r) == r).count()
    }

    /// Boundary circle along a given side of a traced component.
    pub fn boundary_of_side(&self, comp: usize, side: Side) -> Option<usize> {
        self.boundaries.iter().position(|b| b.curves.contains(&(comp, side)))
    }

    fn live_regions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_region_ids).filter(|&r| self.live[r])
    }

    fn corner_id(&self, f: usize, i: usize) -> usize {
        self.faces[f].base + 1 + i
    }

    fn strip_id(&self, f: usize, i: usize, k: u32) -> usize {
        self.faces[f].strip_base[i] + k as usize
    }

    fn kind(&self, r: usize) -> (usize, RegionKind) {
        let f = self.bases.partition_point(|&b| b <= r) - 1;
        let fd = &self.faces[f];
        let local = r - fd.base;
        match local {
            0 => (f, RegionKind::Central),
            1..=3 => (f, RegionKind::Corner(local as u8 - 1)),
            _ => {
                let i = (0..3).rev().find(|&i| fd.strip_base[i] <= r).unwrap();
                (f, RegionKind::Strip(i as u8, (r - fd.strip_base[i]) as u32))
            }
        }
    }

    fn port_region(&self, f: usize, i: usize, q: u32) -> usize {
        let fd = &self.faces[f];
        let l = fd.len[i];
        let prev = (i + 2) % 3;
        let cp = fd.corner[prev];
        if q == cp {
            fd.base
        } else if q == 0 {
            self.corner_id(f, prev)
        } else if q < cp {
            self.strip_id(f, prev, q - 1)
        } else if q < l {
            self.strip_id(f, i, l - 1 - q)
        } else {
            self.corner_id(f, i)
        }
    }

    fn items(&self, r: usize) -> ([Item; 6], usize) {
        let (f, kind) = self.kind(r);
        let fd = &self.faces[f];
        let fu = f as u32;
        let port = |i: usize, q: u32| Item::Port { face: fu, side: i as u8, q };
        let arc = |i: usize, k: u32, fwd: bool| Item::Arc { face: fu, corner: i as u8, k, fwd };
        let mut out = [port(0, 0); 6];
        let mut len = 0;
        let mut push = |it: Item| {
            out[len] = it;
            len += 1;
        };
        match kind {
            RegionKind::Corner(i) => {
                let i = i as usize;
                push(port(i, fd.len[i]));
                push(port((i + 1) % 3, 0));
                push(arc(i, 0, false));
            }
            RegionKind::Strip(i, k) => {
                let i = i as usize;
                push(port(i, fd.len[i] - 1 - k));
                push(arc(i, k, true));
                push(port((i + 1) % 3, k + 1));
                push(arc(i, k + 1, false));
            }
            RegionKind::Central => {
                for i in 0..3 {
                    push(port(i, fd.corner[(i + 2) % 3]));
                    if fd.corner[i] > 0 {
                        push(arc(i, fd.corner[i] - 1, true));
                    }
                }
            }
        }
        (out, len)
    }

    fn position(&self, r: usize, it: Item) -> usize {
        let (items, len) = self.items(r);
        items[..len].iter().position(|x| *x == it).expect("item belongs to region")
    }

    fn is_interior_port(&self, it: Item) -> bool {
        match it {
            Item::Port { face, side, .. } => {
                let d = self.faces[face as usize].darts[side as usize];
                self.blocked[d.edge()].is_none()
            }
            Item::Arc { .. } => false,
        }
    }

    fn port_letter(&self, it: Item) -> Letter {
        match it {
            Item::Port { face, side, .. } => self.faces[face as usize].darts[side as usize],
            Item::Arc { .. } => unreachable!(),
        }
    }

    /// The same segment seen from the other face.
    fn partner(&self, r: usize, p: usize) -> (usize, usize) {
        let (items, _) = self.items(r);
        let Item::Port { face, side, q } = items[p] else { unreachable!() };
        let d = self.faces[face as usize].darts[side as usize];
        let (f2, i2) = self.surface.dart_location(d.inverse());
        let q2 = self.n[d.edge()] - q;
        let r2 = self.port_region(f2, i2, q2);
        (r2, self.position(r2, Item::Port { face: f2 as u32, side: i2 as u8, q: q2 }))
    }

    fn arc_info(&self, it: Item) -> Option<(ArcInfo, Side)> {
        match it {
            Item::Arc { face, corner, k, fwd } => {
                let info = self.faces[face as usize].arcs[corner as usize][k as usize];
                Some((info, if info.fwd == fwd { Side::Left } else { Side::Right }))
            }
            Item::Port { .. } => None,
        }
    }

    fn trace_curves(&mut self, curves: &[Vec<BigUint>]) -> Result<()> {
        let s = self.surface;
        let ne = s.num_edges();
        let mut offset = vec![0usize; ne + 1];
        for e in 0..ne {
            offset[e + 1] = offset[e] + self.n[e] as usize;
        }
        let mut visited = vec![false; offset[ne]];
        let mut cycles: Vec<(Vec<Letter>, Vec<u64>)> = Vec::new();
        for e in 0..ne {
            for idx in 0..self.n[e] {
                if visited[offset[e] + idx as usize] {
                    continue;
                }
                let cyc = cycles.len() as u32;
                let mut letters = Vec::new();
                let mut counts = vec![0u64; ne];
                let (f0, i0) = s.dart_location(Letter::pos(e));
                let start = (f0, i0, idx);
                let mut cur = start;
                loop {
                    let (f, i, q) = cur;
                    let fd = &mut self.faces[f];
                    let prev = (i + 2) % 3;
                    let (j, pos, corner, k, fwd) = if q < fd.corner[prev] {
                        (prev, fd.len[prev] - 1 - q, prev, q, false)
                    } else {
                        let k = fd.len[i] - 1 - q;
                        ((i + 1) % 3, k, i, k, true)
                    };
                    let t = letters.len() as u32;
                    fd.arcs[corner][k as usize] = ArcInfo { comp: cyc, t, fwd };
                    let d = fd.darts[j];
                    let l = fd.len[j];
                    letters.push(d);
                    let edge_idx = if d.is_positive() { pos } else { l - 1 - pos };
                    visited[offset[d.edge()] + edge_idx as usize] = true;
                    counts[d.edge()] += 1;
                    let (f2, i2) = s.dart_location(d.inverse());
                    cur = (f2, i2, l - 1 - pos);
                    if cur == start {
                        break;
                    }
                }
                cycles.push((letters, counts));
            }
        }
        if cycles.len() != curves.len() {
            return Err(Error::InvalidCurve(format!(
                "{} input components trace to {} closed curves; components must be connected and disjoint",
                curves.len(),
                cycles.len()
            )));
        }
        let mut perm = vec![u32::MAX; cycles.len()];
        let mut sequences = vec![Vec::new(); curves.len()];
        for (i, c) in curves.iter().enumerate() {
            let want: Vec<u64> = c.iter().map(|x| x.to_u64().unwrap()).collect();
            let found = (0..cycles.len()).find(|&y| perm[y] == u32::MAX && cycles[y].1 == want);
            let Some(y) = found else {
                return Err(Error::InvalidCurve(format!("component {i} is not a connected curve disjoint from the others")));
            };
            perm[y] = i as u32;
            sequences[i] = std::mem::take(&mut cycles[y].0);
        }
        for fd in &mut self.faces {
            for arcs in &mut fd.arcs {
                for a in arcs.iter_mut() {
                    a.comp = perm[a.comp as usize];
                }
            }
        }
        self.sequences = sequences;
        Ok(())
    }

    fn census(&mut self, blockers: &[EdgedCurve]) -> Result<()> {
        let s = self.surface;
        let nr = self.num_region_ids;
        let mut uf = UnionFind::new(nr);
        let mut port_regions: Vec<usize> = Vec::new();
        for e in 0..s.num_edges() {
            if self.blocked[e].is_some() {
                continue;
            }
            let (fl, il) = s.dart_location(Letter::pos(e));
            for j in 0..=self.n[e] {
                let r = self.port_region(fl, il, j);
                let p = self.position(r, Item::Port { face: fl as u32, side: il as u8, q: j });
                let (r2, _) = self.partner(r, p);
                uf.union(r, r2);
                port_regions.push(r);
            }
        }
        // Vertices of blockers, and the rays each blocker uses there.
        let mut on_blocker = vec![false; s.num_vertices()];
        let mut ray_owner: HashMap<Dart, u32> = HashMap::new();
        for (a, c) in blockers.iter().enumerate() {
            let ds = c.darts();
            for k in 0..ds.len() {
                let (x, y) = (ds[k], ds[(k + 1) % ds.len()]);
                on_blocker[s.head(x)] = true;
                ray_owner.insert(x.inverse(), a as u32);
                ray_owner.insert(y, a as u32);
            }
        }
        let mut extra: Vec<(usize, i64)> = Vec::new();
        let mut interior_vertices: Vec<usize> = Vec::new();
        for v in 0..s.num_vertices() {
            let rot = s.rotation(v);
            if !on_blocker[v] {
                interior_vertices.push(self.region_ccw_of(rot[0]));
                continue;
            }
            let rays: Vec<(usize, u32)> =
                rot.iter().enumerate().filter_map(|(p, d)| ray_owner.get(d).map(|&a| (p, a))).collect();
            let mut comps: Vec<u32> = rays.iter().map(|r| r.1).collect();
            comps.sort_unstable();
            comps.dedup();
            let c = comps.len();
            if c < 2 {
                continue;
            }
            let m = rays.len();
            for a in &comps {
                let idx: Vec<usize> = (0..m).filter(|&k| rays[k].1 == *a).collect();
                let adjacent = idx.len() == 2 && (idx[1] == idx[0] + 1 || (idx[0] == 0 && idx[1] == m - 1));
                if !adjacent {
                    return Err(Error::InvalidDiagram(format!("α components cross or nest at vertex {v}")));
                }
            }
            // Sector k lies counter-clockwise of ray k.
            let mut first_central: Option<usize> = None;
            for k in 0..m {
                let (p_cw, a_cw) = rays[k];
                let (p_ccw, a_ccw) = rays[(k + 1) % m];
                if a_cw == a_ccw {
                    continue;
                }
                let reg = self.region_ccw_of(rot[p_cw]);
                match first_central {
                    None => first_central = Some(reg),
                    Some(r0) => uf.union(r0, reg),
                }
                // Entering along the counter-clockwise end, leave along the
                // other ray of the same component.
                let other = (k + 2) % m;
                debug_assert_eq!(rays[other].1, a_ccw);
                let p_other = rays[other].0;
                let into = rot[p_ccw].inverse();
                let (f_in, i_in) = s.dart_location(into);
                let q_in = self.n[into.edge()];
                let r_in = self.port_region(f_in, i_in, q_in);
                let key = (r_in, self.position(r_in, Item::Port { face: f_in as u32, side: i_in as u8, q: q_in }));
                let out = rot[p_other];
                let (f_out, i_out) = s.dart_location(out);
                let r_out = self.port_region(f_out, i_out, 0);
                let target = (r_out, self.position(r_out, Item::Port { face: f_out as u32, side: i_out as u8, q: 0 }));
                let mut letters = Vec::new();
                let mut p = p_ccw;
                loop {
                    letters.push(rot[p].inverse());
                    if p == p_other {
                        break;
                    }
                    p = (p + 1) % rot.len();
                }
                self.reroute.insert(key, (target, letters));
            }
            extra.push((first_central.unwrap(), 1 - c as i64));
        }

        let mut root_piece: HashMap<usize, usize> = HashMap::new();
        let mut piece_of = vec![u32::MAX; nr];
        let mut pieces: Vec<Piece> = Vec::new();
        for r in 0..nr {
            if !self.live[r] {
                continue;
            }
            let root = uf.find(r);
            let id = *root_piece.entry(root).or_insert_with(|| {
                pieces.push(Piece { euler: 0, boundaries: Vec::new(), regions: 0 });
                pieces.len() - 1
            });
            piece_of[r] = id as u32;
            pieces[id].regions += 1;
            pieces[id].euler += 1;
        }
        for r in port_regions {
            pieces[piece_of[r] as usize].euler -= 1;
        }
        for r in interior_vertices {
            pieces[piece_of[r] as usize].euler += 1;
        }
        for (r, x) in extra {
            pieces[piece_of[r] as usize].euler += x;
        }
        self.piece_of = piece_of;
        self.pieces = pieces;
        self.walk_boundaries();
        Ok(())
    }

    /// Region in the corner counter-clockwise of the outgoing dart `x`.
    fn region_ccw_of(&self, x: Dart) -> usize {
        let (f, i) = self.surface.dart_location(x);
        self.port_region(f, i, 0)
    }

    fn is_boundary(&self, it: Item) -> bool {
        !matches!(it, Item::Port { .. }) || !self.is_interior_port(it)
    }

    fn next_boundary(&self, r: usize, p: usize, letters: &mut Vec<Letter>) -> (usize, usize) {
        if let Some((target, ls)) = self.reroute.get(&(r, p)) {
            letters.extend_from_slice(ls);
            return *target;
        }
        let (mut r, mut p) = (r, p);
        loop {
            let (items, len) = self.items(r);
            p = (p + 1) % len;
            let it = items[p];
            if self.is_boundary(it) {
                return (r, p);
            }
            letters.push(self.port_letter(it));
            (r, p) = self.partner(r, p);
        }
    }

    fn walk_boundaries(&mut self) {
        let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
        let mut boundaries = Vec::new();
        for r in 0..self.num_region_ids {
            if !self.live[r] {
                continue;
            }
            let (items, len) = self.items(r);
            for p in 0..len {
                if !self.is_boundary(items[p]) || seen.contains_key(&(r, p)) {
                    continue;
                }
                let start = (r, p);
                let mut cur = start;
                let mut curves = Vec::new();
                let mut blockers = Vec::new();
                let mut letters = Vec::new();
                loop {
                    seen.insert(cur, ());
                    let (its, _) = self.items(cur.0);
                    let it = its[cur.1];
                    if let Some((info, side)) = self.arc_info(it) {
                        let key = (info.comp as usize, side);
                        if !curves.contains(&key) {
                            curves.push(key);
                        }
                    } else if let Item::Port { face, side, .. } = it {
                        let d = self.faces[face as usize].darts[side as usize];
                        let a = self.blocked[d.edge()].unwrap().0 as usize;
                        if !blockers.contains(&a) {
                            blockers.push(a);
                        }
                    }
                    cur = self.next_boundary(cur.0, cur.1, &mut letters);
                    if cur == start {
                        break;
                    }
                }
                let piece = self.piece_of[r] as usize;
                self.pieces[piece].boundaries.push(boundaries.len());
                boundaries.push(Boundary { piece, curves, blockers, letters: cyclic_reduce(&letters) });
            }
        }
        self.boundaries = boundaries;
    }

    /// Regions along one side of a traced component, ascending.
    fn side_regions(&self, comp: usize, side: Option<Side>) -> Vec<usize> {
        let mut out = Vec::new();
        for r in self.live_regions() {
            let (items, len) = self.items(r);
            if items[..len].iter().any(|it| matches!(self.arc_info(*it), Some((i, sd)) if i.comp as usize == comp && side.is_none_or(|x| x == sd))) {
                out.push(r);
            }
        }
        out
    }

    fn arc_in_region(&self, r: usize, comp: usize, side: Option<Side>) -> (u32, Side) {
        let (items, len) = self.items(r);
        items[..len]
            .iter()
            .find_map(|it| match self.arc_info(*it) {
                Some((i, sd)) if i.comp as usize == comp && side.is_none_or(|x| x == sd) => Some((i.t, sd)),
                _ => None,
            })
            .expect("region touches the component")
    }

    /// Shortest dual path through interior ports; lowest region ids first.
    fn dual_path(&self, sources: &[usize], targets: &[usize]) -> Option<(usize, usize, Vec<Letter>)> {
        let is_target: std::collections::HashSet<usize> = targets.iter().copied().collect();
        let mut parent: HashMap<usize, Option<(usize, Letter)>> = HashMap::new();
        let mut queue = VecDeque::new();
        for &r in sources {
            parent.insert(r, None);
            queue.push_back(r);
        }
        while let Some(r) = queue.pop_front() {
            if is_target.contains(&r) {
                let mut letters = Vec::new();
                let mut cur = r;
                while let Some(Some((prev, l))) = parent.get(&cur) {
                    letters.push(*l);
                    cur = *prev;
                }
                letters.reverse();
                return Some((cur, r, letters));
            }
            let (items, len) = self.items(r);
            for p in 0..len {
                if !self.is_interior_port(items[p]) {
                    continue;
                }
                let (r2, _) = self.partner(r, p);
                if let std::collections::hash_map::Entry::Vacant(v) = parent.entry(r2) {
                    v.insert(Some((r, self.port_letter(items[p]))));
                    queue.push_back(r2);
                }
            }
        }
        None
    }

    /// Band sum of two traced components along a shortest dual path, from
    /// the given sides (either side when `None`). Returns the cyclically
    /// reduced crossing sequence.
    pub fn band_sum(&self, c1: (usize, Option<Side>), c2: (usize, Option<Side>)) -> Result<Vec<Letter>> {
        let sources = self.side_regions(c1.0, c1.1);
        let targets = self.side_regions(c2.0, c2.1);
        let (rs, rt, path) = self
            .dual_path(&sources, &targets)
            .ok_or_else(|| Error::InvalidDiagram("no dual path joins the two curves".into()))?;
        let (t1, s1) = self.arc_in_region(rs, c1.0, c1.1);
        let (t2, s2) = self.arc_in_region(rt, c2.0, c2.1);
        let rot = |c: usize, t: u32| {
            let w = &self.sequences[c];
            let mut out = w[t as usize..].to_vec();
            out.extend_from_slice(&w[..t as usize]);
            out
        };
        let mut word = rot(c1.0, t1);
        word.extend_from_slice(&path);
        let x = rot(c2.0, t2);
        if s1 == s2 {
            word.extend(x);
        } else {
            word.extend(invert_word(&x));
        }
        word.extend(invert_word(&path));
        Ok(cyclic_reduce(&word))
    }

    /// Piece on a given side of a traced component.
    pub fn piece_of_side(&self, comp: usize, side: Side) -> Option<usize> {
        self.boundary_of_side(comp, side).map(|b| self.boundaries[b].piece)
    }
}

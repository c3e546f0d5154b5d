//! π₁ presentations, presentation matrices and first homology.
//!
//! Relators live over the letters `x_1 … x_g`, encoded like edge letters:
//! `±(j+1)` stands for `x_{j+1}^{±1}`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::curves::algebraic_intersection;
use crate::error::{Error, Result};
use crate::slp::{cyclic_reduce, Letter, Slp, SlpJson};
use crate::street::HeegaardDiagram;
use crate::word::HeegaardWord;

/// `⟨x_1, …, x_g | r_1, …, r_k⟩` with compressed relators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: usize,
    pub relators: Vec<Slp>,
}

impl GroupPresentation {
    /// Exponent sum of every generator in every relator.
    pub fn abelianized(&self) -> Vec<Vec<BigInt>> {
        self.relators.iter().map(|r| (0..self.generators).map(|j| r.signed_count(j)).collect()).collect()
    }

    /// Relators expanded and cyclically reduced; a free-reduction Tietze pass.
    pub fn reduced_relators(&self, guard: u64) -> Result<Vec<Vec<Letter>>> {
        self.relators.iter().map(|r| Ok(cyclic_reduce(&r.expand(guard)?))).collect()
    }

    /// Drops relators that reduce to the empty word.
    pub fn without_trivial_relators(&self, guard: u64) -> Result<GroupPresentation> {
        let words = self.reduced_relators(guard)?;
        Ok(GroupPresentation {
            generators: self.generators,
            relators: words.iter().filter(|w| !w.is_empty()).map(|w| Slp::trivial(w)).collect(),
        })
    }

    /// `< x1, x2 | x1 x2^-1, ... >`, expanding relators under `guard`.
    pub fn format(&self, guard: u64) -> Result<String> {
        let gens: Vec<String> = (1..=self.generators).map(|j| format!("x{j}")).collect();
        let rels = self
            .relators
            .iter()
            .map(|r| {
                let w = r.expand(guard)?;
                Ok(if w.is_empty() { "1".to_string() } else { format_relator(&w) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(format!("< {} | {} >", gens.join(", "), rels.join(", ")))
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson { generators: self.generators, relators: self.relators.iter().map(Slp::to_json).collect() }
    }
}

fn format_relator(w: &[Letter]) -> String {
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let mut j = i;
        while j < w.len() && w[j] == w[i] {
            j += 1;
        }
        let n = (j - i) as i64 * w[i].sign() as i64;
        let x = format!("x{}", w[i].edge() + 1);
        out.push(if n == 1 { x } else { format!("{x}^{n}") });
        i = j;
    }
    out.join(" ")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationJson {
    pub generators: usize,
    pub relators: Vec<SlpJson>,
}

/// Reads π₁ off the diagram: β letters on non-α edges are deleted and each
/// α edge becomes the generator of its curve, signed by its dart.
pub fn get_pi1(d: &HeegaardDiagram, guard: u64) -> Result<GroupPresentation> {
    let mut image: HashMap<usize, Letter> = HashMap::new();
    for (j, a) in d.alpha.iter().enumerate() {
        for &x in a.darts() {
            image.insert(x.edge(), Letter::new(j, x.is_positive()));
        }
    }
    let seq = d.sequences(guard)?;
    let relators = seq
        .components
        .iter()
        .map(|b| {
            b.erase_letters(|l| {
                image.get(&l.edge()).map(|&x| if l.is_positive() { x } else { x.inverse() })
            })
        })
        .collect();
    Ok(GroupPresentation { generators: d.alpha.len(), relators })
}

/// Integer matrix `[î(b_i, a_j)]`, one row per β component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationMatrix {
    pub rows: Vec<Vec<BigInt>>,
    pub cols: usize,
}

impl PresentationMatrix {
    pub fn new(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument(format!("matrix rows must all have {cols} entries")));
        }
        Ok(PresentationMatrix { rows, cols })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        PresentationMatrix { rows: rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(), cols }
    }

    /// Entries as decimal strings, for JSON output.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
    }
}

pub fn presentation_matrix(d: &HeegaardDiagram, guard: u64) -> Result<PresentationMatrix> {
    let seq = d.sequences(guard)?;
    let rows = seq.components.iter().map(|b| d.alpha.iter().map(|a| algebraic_intersection(b, a)).collect()).collect();
    PresentationMatrix::new(rows, d.alpha.len())
}

/// `H_1 ≅ Z^betti ⊕ ⨁ Z/d_i` with `d_1 | d_2 | …`; unit factors are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologySummary {
    pub factors: Vec<BigUint>,
    pub betti: usize,
}

impl HomologySummary {
    /// `|H_1|`, or `None` when it is infinite.
    pub fn order(&self) -> Option<BigUint> {
        (self.betti == 0).then(|| self.factors.iter().product())
    }

    /// Invariant factors larger than one.
    pub fn torsion(&self) -> Vec<BigUint> {
        self.factors.iter().filter(|x| !x.is_one()).cloned().collect()
    }

    /// Equality up to unit factors, i.e. isomorphism of the groups.
    pub fn same_group(&self, other: &HomologySummary) -> bool {
        self.betti == other.betti && self.torsion() == other.torsion()
    }
}

impl fmt::Display for HomologySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion().iter().map(|d| format!("Z/{d}")).collect();
        match self.betti {
            0 => {}
            1 => parts.push("Z".into()),
            b => parts.push(format!("Z^{b}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct HomologyJson {
    factors: Vec<String>,
    betti: usize,
}

impl Serialize for HomologySummary {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HomologyJson { factors: self.factors.iter().map(ToString::to_string).collect(), betti: self.betti }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HomologySummary {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = HomologyJson::deserialize(d)?;
        let factors = j
            .factors
            .iter()
            .map(|x| x.parse::<BigUint>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<_, _>>()?;
        Ok(HomologySummary { factors, betti: j.betti })
    }
}

/// Diagonal form `S = U·K·V` with `U`, `V` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// Diagonal of `S`, non-negative, each entry dividing the next nonzero one.
    pub diagonal: Vec<BigInt>,
    pub u: Option<Vec<Vec<BigInt>>>,
    pub v: Option<Vec<Vec<BigInt>>>,
}

impl SmithForm {
    /// The abelian group presented by the rows of the matrix.
    pub fn summary(&self, cols: usize) -> HomologySummary {
        let factors: Vec<BigUint> = self.diagonal.iter().filter(|x| !x.is_zero()).map(|x| x.magnitude().clone()).collect();
        HomologySummary { betti: cols - factors.len(), factors }
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// Row `dst += q · row src` on a dense matrix.
fn add_row(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    let (lo, hi) = if dst < src { m.split_at_mut(src) } else { m.split_at_mut(dst) };
    let (d, s) = if dst < src { (&mut lo[dst], &hi[0]) } else { (&mut hi[0], &lo[src]) };
    for (x, y) in d.iter_mut().zip(s) {
        *x += q * y;
    }
}

fn add_col(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let y = row[src].clone();
        row[dst] += q * y;
    }
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Smith normal form by pivoting on the smallest entry and reducing the
/// pivot row and column modulo it until they clear.
pub fn smith_normal_form(k: &PresentationMatrix, transforms: bool) -> SmithForm {
    let (m, n) = (k.rows.len(), k.cols);
    let mut s = k.rows.clone();
    let mut u = transforms.then(|| identity(m));
    let mut v = transforms.then(|| identity(n));
    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = (t..m)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| !s[i][j].is_zero())
                .min_by(|&(a, b), &(c, d)| s[a][b].magnitude().cmp(s[c][d].magnitude()))
            else {
                return finish(s, u, v, m, n);
            };
            s.swap(t, pi);
            if let Some(u) = &mut u {
                u.swap(t, pi);
            }
            swap_cols(&mut s, t, pj);
            if let Some(v) = &mut v {
                swap_cols(v, t, pj);
            }
            let mut clean = true;
            for i in t + 1..m {
                let q = -(&s[i][t] / &s[t][t]);
                if !q.is_zero() {
                    add_row(&mut s, i, t, &q);
                    if let Some(u) = &mut u {
                        add_row(u, i, t, &q);
                    }
                }
                clean &= s[i][t].is_zero();
            }
            for j in t + 1..n {
                let q = -(&s[t][j] / &s[t][t]);
                if !q.is_zero() {
                    add_col(&mut s, j, t, &q);
                    if let Some(v) = &mut v {
                        add_col(v, j, t, &q);
                    }
                }
                clean &= s[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !s[i][j].is_multiple_of(&s[t][t])));
            match bad {
                Some(i) => {
                    add_row(&mut s, t, i, &BigInt::one());
                    if let Some(u) = &mut u {
                        add_row(u, t, i, &BigInt::one());
                    }
                }
                None => break,
            }
        }
        if s[t][t].sign() == Sign::Minus {
            for x in s[t].iter_mut() {
                *x = -&*x;
            }
            if let Some(u) = &mut u {
                for x in u[t].iter_mut() {
                    *x = -&*x;
                }
            }
        }
    }
    finish(s, u, v, m, n)
}

fn finish(s: Vec<Vec<BigInt>>, u: Option<Vec<Vec<BigInt>>>, v: Option<Vec<Vec<BigInt>>>, m: usize, n: usize) -> SmithForm {
    SmithForm { diagonal: (0..m.min(n)).map(|i| s[i][i].abs()).collect(), u, v }
}

/// Rank by fraction-free Gaussian elimination.
pub fn rank(k: &PresentationMatrix) -> usize {
    let mut a = k.rows.clone();
    let (m, n) = (a.len(), k.cols);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..m {
            for j in c + 1..n {
                let x = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = x;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
        if r == m {
            break;
        }
    }
    r
}

/// First Betti number of the group presented by `k`: columns minus rank.
pub fn betti_number(k: &PresentationMatrix) -> usize {
    k.cols - rank(k)
}

/// `H_1` of the diagram via its presentation matrix.
pub fn homology(d: &HeegaardDiagram, guard: u64) -> Result<HomologySummary> {
    let k = presentation_matrix(d, guard)?;
    Ok(smith_normal_form(&k, false).summary(k.cols))
}

/// Genus-one oracle: `(p, q)` starts at `(1, 0)`; `τ_ℓ^k` sends it to
/// `(p, q − kp)` and `τ_a^k` to `(p + kq, q)`. The result is `Z/|q|`.
pub fn lens_matrix_oracle(w: &HeegaardWord) -> Result<HomologySummary> {
    if w.genus != 1 {
        return Err(Error::GenusMismatch { word: w.genus, surface: 1 });
    }
    let (mut p, mut q) = (BigInt::one(), BigInt::zero());
    for (s, k) in &w.factors {
        if *s == 1 {
            q -= k * &p;
        } else {
            p += k * &q;
        }
    }
    Ok(if q.is_zero() {
        HomologySummary { factors: Vec::new(), betti: 1 }
    } else {
        HomologySummary { factors: vec![q.magnitude().clone()], betti: 0 }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::street::DEFAULT_GUARD;
    use crate::word::parse_word;

    fn diagram(g: u32, w: &str) -> HeegaardDiagram {
        HeegaardDiagram::from_word(&parse_word(g, w).unwrap(), false).unwrap()
    }

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn pi1_examples() {
        let p = get_pi1(&diagram(1, "l"), DEFAULT_GUARD).unwrap();
        assert_eq!(p.format(DEFAULT_GUARD).unwrap(), "< x1 | x1^-1 >");
        let p = get_pi1(&diagram(1, ""), DEFAULT_GUARD).unwrap();
        assert_eq!(p.format(DEFAULT_GUARD).unwrap(), "< x1 | 1 >");
        assert!(p.without_trivial_relators(DEFAULT_GUARD).unwrap().relators.is_empty());
    }

    #[test]
    fn matrix_examples() {
        assert_eq!(presentation_matrix(&diagram(1, "l"), DEFAULT_GUARD).unwrap().rows, vec![vec![int(-1)]]);
        // α_1 on T_2 runs along a⁻¹, so the a-column is negated.
        let k = presentation_matrix(&diagram(2, "b"), DEFAULT_GUARD).unwrap();
        assert_eq!(k.rows, vec![vec![int(-1), int(0)], vec![int(0), int(0)]]);
        assert_eq!(homology(&diagram(2, "b"), DEFAULT_GUARD).unwrap(), HomologySummary { factors: vec![BigUint::one()], betti: 1 });
        let k = presentation_matrix(&diagram(3, ""), DEFAULT_GUARD).unwrap();
        assert!(k.rows.iter().flatten().all(Zero::is_zero));
    }

    #[test]
    fn abelianization_matches_matrix() {
        for (g, w) in [(1, "l a^-1 l^3"), (2, "b c^2 a^-1 d e"), (3, "b1 c1 a2^-1 c2 b3^4")] {
            let d = diagram(g, w);
            let p = get_pi1(&d, DEFAULT_GUARD).unwrap();
            assert_eq!(p.abelianized(), presentation_matrix(&d, DEFAULT_GUARD).unwrap().rows, "{w}");
        }
    }

    #[test]
    fn smith_examples() {
        let s = smith_normal_form(&PresentationMatrix::from_i64(&[vec![2, 0], vec![0, 3]]), false);
        assert_eq!(s.diagonal, vec![int(1), int(6)]);
        let s = smith_normal_form(&PresentationMatrix::from_i64(&[vec![1, 0], vec![0, 1]]), false).summary(2);
        assert_eq!(s, HomologySummary { factors: vec![BigUint::one(), BigUint::one()], betti: 0 });
        let z = PresentationMatrix::from_i64(&vec![vec![0, 0, 0]; 3]);
        assert_eq!(smith_normal_form(&z, false).summary(3).betti, 3);
        assert_eq!(betti_number(&z), 3);
        assert_eq!(betti_number(&PresentationMatrix::from_i64(&[vec![1, 0], vec![0, 0]])), 1);
    }

    #[test]
    fn oracle_examples() {
        let fib = |n: usize| {
            let w = parse_word(1, &vec!["l a^-1"; n].join(" ")).unwrap();
            lens_matrix_oracle(&w).unwrap().order().unwrap()
        };
        assert_eq!([fib(1), fib(2), fib(3)], [1u32, 3, 8].map(BigUint::from));
        assert_eq!(lens_matrix_oracle(&HeegaardWord::identity(1)).unwrap().betti, 1);
        assert!(lens_matrix_oracle(&HeegaardWord::identity(2)).is_err());
    }

    #[test]
    fn homology_json() {
        let h = HomologySummary { factors: vec![BigUint::one(), BigUint::from(6u32)], betti: 1 };
        let j = serde_json::to_string(&h).unwrap();
        assert_eq!(j, r#"{"factors":["1","6"],"betti":1}"#);
        assert_eq!(serde_json::from_str::<HomologySummary>(&j).unwrap(), h);
        assert_eq!(h.to_string(), "Z/6 + Z");
    }
}

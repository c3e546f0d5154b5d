//! Independent oracles shared by the integration targets: explicit word
//! expansion for SLPs, determinantal divisors for Smith forms.

#![allow(dead_code)]

use std::collections::BTreeMap;

use heegaard::slp::{Letter, Ref, Slp};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

pub type Assignments = Vec<(Option<Letter>, Vec<Ref>)>;

/// A random acyclic program over edges `0..edges` whose expansion has at
/// most `max_len` letters. The root is the last assignment, a copy of the
/// longest one.
pub fn random_program<R: Rng>(rng: &mut R, edges: usize, max_len: u64) -> Assignments {
    let mut a: Assignments = Vec::new();
    let mut len: Vec<u64> = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        a.push((Some(Letter::new(rng.gen_range(0..edges), rng.gen())), Vec::new()));
        len.push(1);
    }
    for _ in 0..rng.gen_range(0..=40) {
        let mut kids = Vec::new();
        let mut total = 0;
        let lo = if rng.gen_bool(0.1) { 0 } else { 2 };
        for _ in 0..rng.gen_range(lo..=3) {
            // Mostly recent nodes, so lengths compound.
            let n = a.len();
            let i = if rng.gen_bool(0.8) { rng.gen_range(n.saturating_sub(2)..n) } else { rng.gen_range(0..n) };
            if total + len[i] <= max_len {
                total += len[i];
                kids.push(Ref::new(i, rng.gen()));
            }
        }
        a.push((None, kids));
        len.push(total);
    }
    let longest = (0..a.len()).max_by_key(|&i| len[i]).unwrap();
    a.push((None, vec![Ref::new(longest, rng.gen())]));
    a
}

/// Expansion computed straight from the assignment list.
pub fn expand_program(a: &Assignments, i: usize, memo: &mut BTreeMap<usize, Vec<Letter>>) -> Vec<Letter> {
    if let Some(w) = memo.get(&i) {
        return w.clone();
    }
    let w = match &a[i] {
        (Some(l), _) => vec![*l],
        (None, kids) => {
            let mut w = Vec::new();
            for r in kids {
                let sub = expand_program(a, r.index(), memo);
                if r.is_inverse() {
                    w.extend(invert(&sub));
                } else {
                    w.extend(sub);
                }
            }
            w
        }
    };
    memo.insert(i, w.clone());
    w
}

pub fn invert(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|l| l.inverse()).collect()
}

pub fn build(a: &Assignments) -> (Slp, Vec<Letter>) {
    let root = a.len() - 1;
    let slp = Slp::from_assignments(a, root).unwrap();
    (slp, expand_program(a, root, &mut BTreeMap::new()))
}

/// Checks every SLP operation against the explicit word. Returns a
/// description of the first disagreement.
pub fn check_slp<R: Rng>(rng: &mut R, a: &Assignments, edges: usize) -> Result<(), String> {
    let (slp, w) = build(a);
    let guard = 1 << 20;
    let expanded = slp.expand(guard).map_err(|e| e.to_string())?;
    if expanded != w {
        return Err("expand".into());
    }
    if slp.len() != w.len().into() {
        return Err("len".into());
    }
    for e in 0..edges {
        for l in [Letter::pos(e), Letter::neg(e)] {
            if slp.count(l) != w.iter().filter(|&&x| x == l).count().into() {
                return Err(format!("count of {}", l.code()));
            }
        }
        let signed: i64 = w.iter().filter(|x| x.edge() == e).map(|x| i64::from(x.sign())).sum();
        if slp.signed_count(e) != signed.into() {
            return Err(format!("signed count of edge {e}"));
        }
    }
    if slp.inverse().expand(guard).map_err(|e| e.to_string())? != invert(&w) {
        return Err("inverse".into());
    }
    let k: i64 = rng.gen_range(-3..=3);
    let unit = if k < 0 { invert(&w) } else { w.clone() };
    let want: Vec<Letter> = (0..k.unsigned_abs()).flat_map(|_| unit.iter().copied()).collect();
    if slp.power(&k.into()).expand(guard).map_err(|e| e.to_string())? != want {
        return Err(format!("power {k}"));
    }
    let mut rules = BTreeMap::new();
    for e in 0..edges {
        if rng.gen_bool(0.5) {
            let img: Vec<Letter> = (0..rng.gen_range(0..=3)).map(|_| Letter::new(rng.gen_range(0..edges), rng.gen())).collect();
            rules.insert(Letter::pos(e), img);
        }
    }
    let image: Vec<Letter> = w
        .iter()
        .flat_map(|l| match (rules.get(l), rules.get(&l.inverse())) {
            (Some(r), _) => r.clone(),
            (None, Some(r)) => invert(r),
            (None, None) => vec![*l],
        })
        .collect();
    let slp_rules: BTreeMap<Letter, Slp> = rules.iter().map(|(l, r)| (*l, Slp::trivial(r))).collect();
    let sub = slp.substitute(&slp_rules).map_err(|e| e.to_string())?;
    if sub.expand(guard).map_err(|e| e.to_string())? != image {
        return Err("substitute".into());
    }
    if !w.is_empty() {
        let off = rng.gen_range(0..w.len());
        let rotated: Vec<Letter> = w[off..].iter().chain(&w[..off]).copied().collect();
        if slp.rotate(&off.into()).map_err(|e| e.to_string())?.expand(guard).map_err(|e| e.to_string())? != rotated {
            return Err(format!("rotate by {off}"));
        }
    }
    if slp.compact().expand(guard).map_err(|e| e.to_string())? != w {
        return Err("compact".into());
    }
    Ok(())
}

/// Determinant by cofactor expansion along the first row.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    match m.len() {
        0 => BigInt::one(),
        1 => m[0][0].clone(),
        n => (0..n)
            .filter(|&j| !m[0][j].is_zero())
            .map(|j| {
                let minor: Vec<Vec<BigInt>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect()).collect();
                let t = &m[0][j] * det(&minor);
                if j % 2 == 0 {
                    t
                } else {
                    -t
                }
            })
            .fold(BigInt::zero(), |a, b| a + b),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors `d_k / d_{k−1}`, where `d_k` is the gcd of all
/// `k × k` minors, listed up to the rank.
pub fn invariant_factors(m: &[Vec<BigInt>], cols: usize) -> Vec<BigInt> {
    let mut prev = BigInt::one();
    let mut out = Vec::new();
    for k in 1..=m.len().min(cols) {
        let mut g = BigInt::zero();
        for rs in subsets(m.len(), k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<BigInt>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c].clone()).collect()).collect();
                g = g.gcd(&det(&minor));
            }
        }
        if g.is_zero() {
            break;
        }
        out.push((&g / &prev).abs());
        prev = g;
    }
    out
}

pub fn random_matrix<R: Rng>(rng: &mut R) -> Vec<Vec<i64>> {
    let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
    // A share of low-rank inputs so the zero count is exercised.
    let low_rank = rng.gen_bool(0.25);
    let mut m: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-10..=10)).collect()).collect();
    if low_rank && r > 1 {
        let (a, b) = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        m[r - 1] = (0..c).map(|j| a * m[0][j] + b * m[r - 2][j]).collect();
    }
    m
}

pub fn to_big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter().map(|row| (0..cols).map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum()).collect()).collect()
}

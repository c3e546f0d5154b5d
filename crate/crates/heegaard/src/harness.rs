//! Experiments on random and structured Heegaard words.
//!
//! Every experiment is a pure function of its configuration. Wall-clock
//! columns are opt-in, so CSV output is byte-identical across runs unless
//! timing is requested.

use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{homology, lens_matrix_oracle, HomologySummary};
use crate::street::HeegaardDiagram;
use crate::surface::MarkedSurface;
use crate::word::{apply_word, compact_to_power_notation, HeegaardWord};

/// Name of the generator behind every seeded experiment, written to CSV output.
pub const RNG_NAME: &str = "ChaCha8";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` independent uniform draws from the `2(3g−1)` signed generators, in
/// power notation.
pub fn sample_word<R: Rng>(g: u32, n: usize, rng: &mut R) -> HeegaardWord {
    let k = 3 * g as usize - 1;
    let letters: Vec<(usize, bool)> = (0..n)
        .map(|_| {
            let x = rng.gen_range(0..2 * k);
            (x / 2, x % 2 == 0)
        })
        .collect();
    compact_to_power_notation(g, &letters)
}

/// `H_1` of `(T_g, α, φ(α))` on the unrefined surface.
pub fn word_homology(ms: &MarkedSurface, w: &HeegaardWord, guard: u64) -> Result<(HomologySummary, usize)> {
    let beta = apply_word(w, ms)?;
    let complexity = beta.complexity();
    let d = HeegaardDiagram::from_sequences(ms.surface.clone(), ms.alpha_curves(), beta)?;
    Ok((homology(&d, guard)?, complexity))
}

/// Runs `f(0..n)` on `jobs` threads; results come back in index order.
pub fn par_map<T: Send>(jobs: usize, n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let jobs = jobs.clamp(1, n.max(1));
    let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
    std::thread::scope(|s| {
        let chunk = n.div_ceil(jobs).max(1);
        for (c, slots) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            s.spawn(move || {
                for (k, slot) in slots.iter_mut().enumerate() {
                    *slot = Some(f(c * chunk + k));
                }
            });
        }
    });
    out.into_iter().map(Option::unwrap).collect()
}

fn fibonacci(m: usize) -> BigUint {
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for _ in 0..m {
        let c = &a + &b;
        a = b;
        b = c;
    }
    a
}

/// `(τ_a⁻¹ ∘ τ_ℓ)ⁿ` on the torus.
pub fn fibonacci_word(n: usize) -> HeegaardWord {
    HeegaardWord::from_factors(1, (0..n).flat_map(|_| [(1, BigInt::one()), (0, -BigInt::one())]))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibonacciRow {
    pub n: usize,
    pub order: String,
    pub expected: String,
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nanos: Option<u128>,
}

/// `|H_1|` of the Fibonacci family against `f_{2n}` for `n = 1..=n_max`.
pub fn run_fibonacci(n_max: usize, guard: u64, timing: bool, jobs: usize) -> Result<Vec<FibonacciRow>> {
    let ms = MarkedSurface::build(1)?;
    par_map(jobs, n_max, |i| {
        let n = i + 1;
        let start = Instant::now();
        let (h, _) = word_homology(&ms, &fibonacci_word(n), guard)?;
        let nanos = timing.then(|| start.elapsed().as_nanos());
        let order = h.order().map_or_else(|| "inf".to_string(), |o| o.to_string());
        let expected = fibonacci(2 * n).to_string();
        Ok(FibonacciRow { n, matches: order == expected, order, expected, nanos })
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub rng: String,
    pub seed: u64,
    pub genus: u32,
    pub n: usize,
    pub word: String,
    /// `|H_1|`, or `inf`.
    pub order: String,
    pub betti: usize,
    pub complexity: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nanos: Option<u128>,
}

fn trial_seed(seed: u64, n: usize, trial: usize) -> u64 {
    seed ^ ((n as u64) << 32) ^ trial as u64
}

/// `trials` uniform words of length `n` at genus `g`.
pub fn run_random(g: u32, n: usize, trials: usize, seed: u64, guard: u64, timing: bool, jobs: usize) -> Result<Vec<TrialRecord>> {
    let ms = MarkedSurface::build(g as i64)?;
    par_map(jobs, trials, |t| {
        let s = trial_seed(seed, n, t);
        let w = sample_word(g, n, &mut rng(s));
        let start = Instant::now();
        let (h, complexity) = word_homology(&ms, &w, guard)?;
        let nanos = timing.then(|| start.elapsed().as_nanos());
        Ok(TrialRecord {
            trial: t,
            rng: RNG_NAME.into(),
            seed: s,
            genus: g,
            n,
            word: w.to_string(),
            order: h.order().map_or_else(|| "inf".to_string(), |o| o.to_string()),
            betti: h.betti,
            complexity,
            nanos,
        })
    })
    .into_iter()
    .collect()
}

/// Recomputes `|H_1|` for every hundredth record (at least one) by an
/// independent route: the matrix oracle at genus one, otherwise the
/// subdivided surface. Returns how many were checked.
pub fn verify_records(records: &[TrialRecord], guard: u64) -> Result<usize> {
    let step = (records.len() / 100).max(1);
    let mut checked = 0;
    for r in records.iter().step_by(step) {
        let w = crate::word::parse_word(r.genus, &r.word)?;
        let h = if r.genus == 1 {
            lens_matrix_oracle(&w)?
        } else {
            homology(&HeegaardDiagram::from_word(&w, true)?, guard)?
        };
        let order = h.order().map_or_else(|| "inf".to_string(), |o| o.to_string());
        if order != r.order || h.betti != r.betti {
            return Err(Error::InvalidDiagram(format!("trial {} does not verify: {} vs {}", r.trial, order, r.order)));
        }
        checked += 1;
    }
    Ok(checked)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub k: u32,
    pub order: String,
    pub nanos: f64,
}

/// Number of calls of `f` that take at least a few milliseconds.
fn batch_size(f: &mut impl FnMut()) -> u32 {
    let mut inner = 1u32;
    loop {
        let t = Instant::now();
        for _ in 0..inner {
            f();
        }
        if t.elapsed() >= Duration::from_millis(5) || inner >= 1 << 20 {
            return inner;
        }
        inner *= 2;
    }
}

fn per_call(inner: u32, f: &mut impl FnMut()) -> Duration {
    let t = Instant::now();
    for _ in 0..inner {
        f();
    }
    t.elapsed() / inner
}

/// Median over `reps` batches of the per-call time of `f`, each batch long
/// enough to swamp timer resolution.
pub fn median_time(reps: usize, mut f: impl FnMut()) -> Duration {
    let inner = batch_size(&mut f);
    let mut samples: Vec<Duration> = (0..reps.max(1)).map(|_| per_call(inner, &mut f)).collect();
    samples.sort();
    samples[samples.len() / 2]
}

/// `(T², a, τ_ℓ^{2^k}(a))` for `k` in `ks`, timed from word to `H_1`.
///
/// Each of the five repetitions sweeps every `k` in turn, so slow drift in
/// machine speed lands on all rows alike; the row keeps the median.
pub fn run_power_family(ks: impl IntoIterator<Item = u32>, guard: u64) -> Result<Vec<PowerRow>> {
    let ms = MarkedSurface::build(1)?;
    let mut jobs = Vec::new();
    for k in ks {
        let w = HeegaardWord::from_factors(1, [(1, BigInt::one() << k)]);
        let (h, _) = word_homology(&ms, &w, guard)?;
        jobs.push((k, w, h, Vec::new()));
    }
    // One batch size for every row, sized on the most expensive word.
    let inner = match jobs.iter().max_by_key(|j| j.0) {
        Some((_, w, _, _)) => batch_size(&mut || {
            std::hint::black_box(word_homology(&ms, w, guard).unwrap());
        }),
        None => 1,
    };
    // The first sweep warms caches and is discarded.
    for sweep in 0..6 {
        for (_, w, _, samples) in &mut jobs {
            let t = per_call(inner, &mut || {
                std::hint::black_box(word_homology(&ms, w, guard).unwrap());
            });
            if sweep > 0 {
                samples.push(t);
            }
        }
    }
    Ok(jobs
        .into_iter()
        .map(|(k, _, h, mut samples)| {
            samples.sort();
            PowerRow { k, order: h.order().map_or_else(|| "inf".to_string(), |o| o.to_string()), nanos: samples[2].as_nanos() as f64 }
        })
        .collect())
}

/// Least-squares polynomial of degree `deg`; returns coefficients (constant
/// first) and `R²`.
pub fn polyfit(xs: &[f64], ys: &[f64], deg: usize) -> (Vec<f64>, f64) {
    let m = deg + 1;
    let mut a = vec![vec![0.0; m + 1]; m];
    for (&x, &y) in xs.iter().zip(ys) {
        let pw: Vec<f64> = (0..=2 * deg).map(|i| x.powi(i as i32)).collect();
        for i in 0..m {
            for j in 0..m {
                a[i][j] += pw[i + j];
            }
            a[i][m] += pw[i] * y;
        }
    }
    for c in 0..m {
        let p = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        for i in 0..m {
            if i != c && a[c][c] != 0.0 {
                let f = a[i][c] / a[c][c];
                for j in c..=m {
                    a[i][j] -= f * a[c][j];
                }
            }
        }
    }
    let coef: Vec<f64> = (0..m).map(|i| if a[i][i] == 0.0 { 0.0 } else { a[i][m] / a[i][i] }).collect();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let fx: f64 = coef.iter().enumerate().map(|(i, c)| c * x.powi(i as i32)).sum();
            (y - fx).powi(2)
        })
        .sum();
    let r2 = if tot == 0.0 { 1.0 } else { 1.0 - res / tot };
    (coef, r2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltRow {
    pub n: usize,
    /// Samples with finite `H_1`.
    pub finite: usize,
    pub trials: usize,
    /// Mean of `ln|H_1| / n`.
    pub mean: f64,
    /// Standard error of that mean; absent for a single sample.
    pub stderr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub rows: Vec<CltRow>,
    /// Slope of `n · mean` against `n`.
    pub lambda: f64,
    pub finite_fraction: f64,
}

/// Natural log of a big integer, via its leading bits.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Growth rate of `ln|H_1|` for uniform words at genus `g`.
pub fn run_clt(g: u32, ns: &[usize], trials: usize, seed: u64, guard: u64, jobs: usize) -> Result<CltReport> {
    let mut rows = Vec::with_capacity(ns.len());
    let (mut finite_total, mut total) = (0, 0);
    for &n in ns {
        let recs = run_random(g, n, trials, seed, guard, false, jobs)?;
        let logs: Vec<f64> = recs
            .iter()
            .filter(|r| r.order != "inf")
            .map(|r| ln_big(&r.order.parse::<BigUint>().unwrap()) / n as f64)
            .collect();
        let k = logs.len();
        let mean = if k == 0 { f64::NAN } else { logs.iter().sum::<f64>() / k as f64 };
        let stderr = (k > 1).then(|| {
            let var = logs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
            (var / k as f64).sqrt()
        });
        finite_total += k;
        total += trials;
        rows.push(CltRow { n, finite: k, trials, mean, stderr });
    }
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.finite > 0).map(|r| (r.n as f64, r.mean * r.n as f64)).collect();
    let lambda = if pts.len() < 2 {
        f64::NAN
    } else {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        polyfit(&xs, &ys, 1).0[1]
    };
    Ok(CltReport { rows, lambda, finite_fraction: finite_total as f64 / total.max(1) as f64 })
}

/// Writes serializable rows as CSV with a header.
pub fn write_csv<T: Serialize>(out: impl Write, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::street::DEFAULT_GUARD;

    #[test]
    fn sampler_conserves_length() {
        let mut r = rng(7);
        for n in [1, 5, 50] {
            for g in 1..=3 {
                let w = sample_word(g, n, &mut r);
                assert!(w.total_exponent().magnitude() <= &BigUint::from(n));
                let abs: BigInt = w.factors.iter().map(|(_, k)| BigInt::from(k.magnitude().clone())).sum();
                assert!(abs <= BigInt::from(n));
            }
        }
    }

    #[test]
    fn seeded_words_are_frozen() {
        let w = sample_word(1, 12, &mut rng(2024));
        assert_eq!(w, sample_word(1, 12, &mut rng(2024)));
        assert_eq!(w.to_string(), include_str!("../tests/data/sample_word_g1_n12_seed2024.txt").trim());
    }

    #[test]
    fn fibonacci_head() {
        let rows = run_fibonacci(6, DEFAULT_GUARD, false, 2).unwrap();
        let got: Vec<&str> = rows.iter().map(|r| r.order.as_str()).collect();
        assert_eq!(got, ["1", "3", "8", "21", "55", "144"]);
        assert!(rows.iter().all(|r| r.matches));
    }

    #[test]
    fn power_family_orders() {
        let rows = run_power_family([0, 3], DEFAULT_GUARD).unwrap();
        assert_eq!(rows[0].order, "1");
        assert_eq!(rows[1].order, "8");
    }

    #[test]
    fn polyfit_recovers_quadratic() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + 0.5 * x * x).collect();
        let (c, r2) = polyfit(&xs, &ys, 2);
        assert!((c[0] - 3.0).abs() < 1e-6 && (c[1] + 2.0).abs() < 1e-6 && (c[2] - 0.5).abs() < 1e-6);
        assert!((r2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn random_csv_is_deterministic() {
        let a = run_random(2, 20, 8, 11, DEFAULT_GUARD, false, 3).unwrap();
        let b = run_random(2, 20, 8, 11, DEFAULT_GUARD, false, 1).unwrap();
        let (mut x, mut y) = (Vec::new(), Vec::new());
        write_csv(&mut x, &a).unwrap();
        write_csv(&mut y, &b).unwrap();
        assert_eq!(x, y);
        assert!(String::from_utf8(x).unwrap().starts_with("trial,rng,seed,genus,n,word,order,betti,complexity\n"));
        assert_eq!(verify_records(&a, DEFAULT_GUARD).unwrap(), 8);
    }

    #[test]
    fn single_trial_clt() {
        let r = run_clt(2, &[10], 1, 3, DEFAULT_GUARD, 1).unwrap();
        assert_eq!(r.rows[0].trials, 1);
        assert!(r.rows[0].stderr.is_none());
    }

    #[test]
    fn ln_of_huge_numbers() {
        let x = BigUint::one() << 5000u32;
        assert!((ln_big(&x) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-6);
        assert!((ln_big(&BigUint::from(1000u32)) - 1000f64.ln()).abs() < 1e-12);
    }
}

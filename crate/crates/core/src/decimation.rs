//! Single-variable spectral decimation with `R(z) = z(5 - 4z)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::C64;
use crate::sg::{build_level_graph, SGLevelGraph, SpectrumMultiset};

/// `R'(0)`.
pub const C: f64 = 5.0;
/// Eigenvalues without a predecessor under `R`.
pub const FORBIDDEN: [f64; 3] = [0.5, 1.25, 1.5];
/// Closeness used to decide that a value is forbidden.
pub const FORBIDDEN_TOL: f64 = 1e-9;
/// Largest level served by the exact (oracle-free) multiplicity count.
pub const MAX_EXACT_LEVEL: usize = 6;
pub const MAX_ORACLE_LEVEL: usize = 4;
const MAX_LIMIT_ITERATIONS: usize = 10_000;

pub fn apply_r(z: C64) -> C64 {
    z * (5.0 - 4.0 * z)
}

pub fn apply_r_real(x: f64) -> f64 {
    x * (5.0 - 4.0 * x)
}

/// `(R_-(z), R_+(z))` with the principal square root.
///
/// `R_-` is evaluated as `2z / (5 + √(25-16z))`, which equals
/// `(5 - √(25-16z))/8` without the cancellation near `z = 0`.
pub fn inverse_branches(z: C64) -> (C64, C64) {
    let w = (25.0 - 16.0 * z).sqrt();
    (2.0 * z / (5.0 + w), (5.0 + w) / 8.0)
}

/// Real branches; both real for `x ≤ 25/16`.
pub fn inverse_branches_real(x: f64) -> (f64, f64) {
    let w = (25.0 - 16.0 * x).sqrt();
    (2.0 * x / (5.0 + w), (5.0 + w) / 8.0)
}

pub fn is_forbidden(x: f64) -> bool {
    FORBIDDEN.iter().any(|b| (x - b).abs() <= FORBIDDEN_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "initial")]
    Initial,
}

/// Sign sequence `ε_{m0}, ε_{m0+1}, …` followed by a constant tail.
///
/// Text form: a string of `+`/`-`, optionally ending in `*` to repeat the last
/// sign forever. Without `*` the tail is all minus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSequence {
    pub m0: usize,
    pub seed: f64,
    pub signs: Vec<i8>,
    pub plus_tail: bool,
}

impl EigenSequence {
    pub fn new(m0: usize, seed: f64, signs: &str) -> Result<Self> {
        let (body, repeat) = match signs.strip_suffix('*') {
            Some(b) => (b, true),
            None => (signs, false),
        };
        let signs = body
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(Error::InvalidArgument(format!("bad sign character {c:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        if repeat && signs.is_empty() {
            return Err(Error::InvalidArgument("'*' needs a sign to repeat".into()));
        }
        let plus_tail = repeat && *signs.last().unwrap() == 1;
        Ok(EigenSequence { m0, seed, signs, plus_tail })
    }
}

/// Iterates `R_-` from `lambda` at level `m` and returns `lim 5^k λ_k`.
pub fn refine_limit(lambda: f64, m: usize, tol: f64) -> Result<f64> {
    let mut lam = lambda;
    let mut level = m as i32;
    let mut prev = C.powi(level) * lam;
    let mut calm = 0;
    for _ in 0..MAX_LIMIT_ITERATIONS {
        lam = inverse_branches_real(lam).0;
        level += 1;
        let cur = C.powi(level) * lam;
        if !cur.is_finite() || lam == 0.0 {
            return Err(Error::DivergentSequence(format!("renormalized value left the finite range at level {level}")));
        }
        // Strict comparison so that tol = 0 can never be met by luck.
        if ((cur - prev) / cur).abs() < tol {
            calm += 1;
            if calm == 2 {
                return Ok(cur);
            }
        } else {
            calm = 0;
        }
        prev = cur;
    }
    Err(Error::DivergentSequence(format!("no convergence after {MAX_LIMIT_ITERATIONS} steps")))
}

/// `lim 5^m λ_m` along the sign sequence.
pub fn limit_eigenvalue(seq: &EigenSequence, tol: f64) -> Result<f64> {
    if !is_forbidden(seq.seed) {
        return Err(Error::InvalidSeed(seq.seed));
    }
    if seq.plus_tail {
        return Err(Error::DivergentSequence("infinitely many + signs".into()));
    }
    let mut lam = seq.seed;
    for &e in &seq.signs {
        let (lo, hi) = inverse_branches_real(lam);
        lam = if e > 0 { hi } else { lo };
    }
    refine_limit(lam, seq.m0 + seq.signs.len(), tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEntry {
    pub value: f64,
    pub multiplicity: usize,
    /// Index into the previous level, absent for initial entries.
    pub parent: Option<usize>,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecimationTree {
    pub levels: Vec<Vec<TreeEntry>>,
}

impl DecimationTree {
    pub fn spectrum(&self, level: usize) -> SpectrumMultiset {
        SpectrumMultiset { entries: self.levels[level].iter().map(|e| (e.value, e.multiplicity)).collect() }
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    /// `max |R(λ) - parent|` over all non-initial entries.
    pub fn max_parent_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for l in 1..self.levels.len() {
            for e in &self.levels[l] {
                if let Some(p) = e.parent {
                    worst = worst.max((apply_r_real(e.value) - self.levels[l - 1][p].value).abs());
                }
            }
        }
        worst
    }
}

/// How many times each forbidden value enters at a level.
fn forbidden_multiplicities(g: &SGLevelGraph, oracle: Option<&SpectrumMultiset>) -> [usize; 3] {
    match oracle {
        Some(s) => FORBIDDEN.map(|b| s.multiplicity_of(b, FORBIDDEN_TOL)),
        None => FORBIDDEN.map(|b| exact_nullity(g, b)),
    }
}

/// Decimation tree up to level `m`.
///
/// With `oracle` the forbidden-value multiplicities come from the dense
/// eigensolver and every level is compared against it. Without it they come
/// from an exact rank computation over prime fields.
pub fn generate_graph_spectrum(m: usize, oracle: bool) -> Result<DecimationTree> {
    let max = if oracle { MAX_ORACLE_LEVEL } else { MAX_EXACT_LEVEL };
    if m > max {
        return Err(Error::LevelTooLarge { level: m, max });
    }
    let mut levels = vec![vec![
        TreeEntry { value: 0.0, multiplicity: 1, parent: None, branch: Branch::Initial },
        TreeEntry { value: 1.5, multiplicity: 2, parent: None, branch: Branch::Initial },
    ]];
    for l in 1..=m {
        let g = build_level_graph(l)?;
        let dense = if oracle { Some(g.dense_spectrum()?) } else { None };
        let prev = levels.last().unwrap();
        let mut next = Vec::with_capacity(2 * prev.len() + 3);
        for (i, e) in prev.iter().enumerate() {
            let (lo, hi) = inverse_branches_real(e.value);
            for (v, branch) in [(lo, Branch::Minus), (hi, Branch::Plus)] {
                if !is_forbidden(v) {
                    next.push(TreeEntry { value: v, multiplicity: e.multiplicity, parent: Some(i), branch });
                }
            }
        }
        for (b, k) in FORBIDDEN.iter().zip(forbidden_multiplicities(&g, dense.as_ref())) {
            if k > 0 {
                next.push(TreeEntry { value: *b, multiplicity: k, parent: None, branch: Branch::Initial });
            }
        }
        next.sort_by(|a, b| a.value.total_cmp(&b.value));
        if let Some(d) = &dense {
            compare_spectra(l, &SpectrumMultiset { entries: next.iter().map(|e| (e.value, e.multiplicity)).collect() }, d)?;
        }
        levels.push(next);
    }
    Ok(DecimationTree { levels })
}

pub fn compare_spectra(level: usize, got: &SpectrumMultiset, want: &SpectrumMultiset) -> Result<()> {
    if got.entries.len() != want.entries.len() {
        return Err(Error::DecimationMismatch {
            level,
            detail: format!("{} distinct values vs {} from the oracle", got.entries.len(), want.entries.len()),
        });
    }
    for (g, w) in got.entries.iter().zip(&want.entries) {
        if (g.0 - w.0).abs() > 1e-9 || g.1 != w.1 {
            return Err(Error::DecimationMismatch {
                level,
                detail: format!("({}, x{}) vs oracle ({}, x{})", g.0, g.1, w.0, w.1),
            });
        }
    }
    Ok(())
}

/// Outcome of the restriction test between levels `m+1` and `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecimationReport {
    pub level: usize,
    pub checked: usize,
    pub skipped: usize,
    pub max_residual: f64,
}

/// Checks `-Δ_m (u|V_m) = R(λ) u|V_m` for every eigenpair of `-Δ_{m+1}` with
/// a non-forbidden eigenvalue. Residuals are relative to `‖u|V_m‖`.
pub fn verify_decimation_step(m: usize) -> Result<DecimationReport> {
    if m > 3 {
        return Err(Error::LevelTooLarge { level: m, max: 3 });
    }
    let coarse = build_level_graph(m)?;
    let fine = build_level_graph(m + 1)?;
    let n = coarse.vertex_count();
    let mut report = DecimationReport { level: m, checked: 0, skipped: 0, max_residual: 0.0 };
    for (lam, u) in fine.eigenpairs()? {
        if is_forbidden(lam) {
            continue;
        }
        let r = &u[..n];
        let norm_full = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-10 * norm_full {
            report.skipped += 1;
            continue;
        }
        let rl = apply_r_real(lam);
        let lr = coarse.apply_laplacian(r);
        let res = lr.iter().zip(r).map(|(a, b)| (a - rl * b).powi(2)).sum::<f64>().sqrt() / norm;
        report.checked += 1;
        report.max_residual = report.max_residual.max(res);
    }
    Ok(report)
}

const PRIMES: [u64; 2] = [2_147_483_647, 2_147_483_629];

/// `dim ker(-Δ_m - β)` for `β ∈ {1/2, 5/4, 3/2}`, exactly.
///
/// `4(-Δ_m - β)` has integer entries. Its rank over the rationals is the
/// largest rank modulo a prime, and two large primes make a wrong answer
/// practically impossible.
pub fn exact_nullity(g: &SGLevelGraph, beta: f64) -> usize {
    let diag = (4.0 * (1.0 - beta)).round() as i64;
    debug_assert!((4.0 * (1.0 - beta) - diag as f64).abs() < 1e-12);
    let n = g.vertex_count();
    let mut base = vec![0i64; n * n];
    for x in 0..n {
        base[x * n + x] = diag;
        let off = -4 / g.degree(x) as i64;
        for &y in g.neighbours(x) {
            base[x * n + y] += off;
        }
    }
    let rank = PRIMES.iter().map(|&p| rank_mod_p(&base, n, p)).max().unwrap();
    n - rank
}

fn rank_mod_p(entries: &[i64], n: usize, p: u64) -> usize {
    let mut a: Vec<u64> = entries.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..n).find(|&r| a[r * n + col] != 0) else { continue };
        if piv != rank {
            for k in 0..n {
                a.swap(piv * n + k, rank * n + k);
            }
        }
        let inv = pow_mod(a[rank * n + col], p - 2, p);
        for r in rank + 1..n {
            let f = a[r * n + col];
            if f == 0 {
                continue;
            }
            let f = f * inv % p;
            for k in col..n {
                let sub = f * a[rank * n + k] % p;
                a[r * n + k] = (a[r * n + k] + p - sub) % p;
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Minus => "-",
            Branch::Plus => "+",
            Branch::Initial => "initial",
        })
    }
}

impl FromStr for EigenSequence {
    type Err = Error;
    /// `m0:seed:signs`, mostly for tests and scripting.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.splitn(3, ':').collect();
        let [m0, seed, signs] = parts[..] else {
            return Err(Error::InvalidArgument(format!("expected m0:seed:signs, got {s:?}")));
        };
        let m0 = m0.parse().map_err(|_| Error::InvalidArgument(format!("bad m0 {m0:?}")))?;
        let seed = seed.parse().map_err(|_| Error::InvalidArgument(format!("bad seed {seed:?}")))?;
        EigenSequence::new(m0, seed, signs)
    }
}

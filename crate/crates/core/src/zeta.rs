//! Spectral zeta functions: preimage sums of `R`, the gasket factorization,
//! the Sturm-Liouville ladder sums, pole lattices and the Dirac delta
//! hyperfunction on the unit circle.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decimation::{apply_r_real, generate_graph_spectrum, inverse_branches_real, refine_limit};
use crate::error::{Error, Result};
use crate::numerics::{contour_integral, C64};
use crate::sl::{scan_roots, AtomTable, GeneratingSet, RenormalizationMap, SLParams};

pub const MAX_TREE_DEPTH: u32 = 28;
/// Distance to a pole of a geometric factor below which evaluation refuses.
pub const NEAR_POLE_TOL: f64 = 1e-8;
/// Required excess of `Re(s)` over `2 log 2 / log 5`.
pub const STRIP_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub s: C64,
    pub value: C64,
    pub error: f64,
    /// Depth of the preimage tree, or number of roots summed.
    pub count: usize,
}

fn ensure_finite(v: C64, what: &str) -> Result<C64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NumericOverflow(what.to_string()))
    }
}

/// `Re(s)` bound for convergence of the preimage sums.
pub fn zeta_r_abscissa() -> f64 {
    2.0 * LN_2 / 5f64.ln()
}

/// Sum of `(5^n z)^{-s/2}` over level `n` and level `n-1` of the subtree at `v`.
fn tree_sums(v: f64, level: u32, n: u32, s_half: C64, ln5: f64) -> (C64, C64) {
    let term = |lvl: u32, z: f64| (-s_half * (lvl as f64 * ln5 + z.ln())).exp();
    if level + 1 == n {
        let (lo, hi) = inverse_branches_real(v);
        return (term(n, lo) + term(n, hi), term(level, v));
    }
    let (lo, hi) = inverse_branches_real(v);
    let (a_n, a_p) = tree_sums(lo, level + 1, n, s_half, ln5);
    let (b_n, b_p) = tree_sums(hi, level + 1, n, s_half, ln5);
    (a_n + b_n, a_p + b_p)
}

/// Explicit preimage levels of a seed under `R`, for inspection at small depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreimageTree {
    pub z0: f64,
    /// `levels[n]` holds the `2^n` values of `R^{-n}(z0)`, children adjacent.
    pub levels: Vec<Vec<f64>>,
}

/// Largest depth [`PreimageTree::build`] will materialize.
pub const MAX_STORED_DEPTH: u32 = 20;

impl PreimageTree {
    pub fn build(z0: f64, depth: u32) -> Result<Self> {
        if !(z0 > 0.0 && z0 < 25.0 / 16.0) {
            return Err(Error::InvalidArgument(format!("z0 must lie in (0, 25/16), got {z0}")));
        }
        if depth > MAX_STORED_DEPTH {
            return Err(Error::DepthTooLarge { depth, max: MAX_STORED_DEPTH });
        }
        let mut levels = vec![vec![z0]];
        for _ in 0..depth {
            let next = levels
                .last()
                .unwrap()
                .iter()
                .flat_map(|&v| {
                    let (lo, hi) = inverse_branches_real(v);
                    [lo, hi]
                })
                .collect();
            levels.push(next);
        }
        Ok(PreimageTree { z0, levels })
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    /// Largest `|R(v) - parent|` over the tree.
    pub fn max_parent_residual(&self) -> f64 {
        self.levels
            .windows(2)
            .flat_map(|w| w[1].iter().enumerate().map(move |(i, &v)| (apply_r_real(v) - w[0][i / 2]).abs()))
            .fold(0.0, f64::max)
    }

    /// `Σ (5^n z)^{-s/2}` over one stored level.
    pub fn level_sum(&self, n: usize, s: C64) -> C64 {
        let scale = n as f64 * 5f64.ln();
        self.levels[n].iter().map(|&z| (-s / 2.0 * (scale + z.ln())).exp()).sum()
    }
}

/// Level at which the tree is split into independent subtrees.
const SPLIT: u32 = 6;

/// `Σ_{z ∈ R^{-n}(z0)} (5^n z)^{-s/2}`, with the change from level `n-1` as the error.
pub fn zeta_r(z0: f64, s: C64, depth: u32) -> Result<ZetaValue> {
    if s.re <= zeta_r_abscissa() + STRIP_MARGIN {
        return Err(Error::OutsideConvergenceStrip(s.to_string()));
    }
    if !(z0 > 0.0 && z0 < 25.0 / 16.0) {
        return Err(Error::InvalidArgument(format!("z0 must lie in (0, 25/16), got {z0}")));
    }
    if depth > MAX_TREE_DEPTH {
        return Err(Error::DepthTooLarge { depth, max: MAX_TREE_DEPTH });
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let s_half = s / 2.0;
    let ln5 = 5f64.ln();
    let (cur, prev) = if depth <= SPLIT + 1 {
        tree_sums(z0, 0, depth, s_half, ln5)
    } else {
        // Roots of the subtrees at level SPLIT, left to right.
        let mut tops = vec![z0];
        for _ in 0..SPLIT {
            tops = tops
                .iter()
                .flat_map(|&v| {
                    let (lo, hi) = inverse_branches_real(v);
                    [lo, hi]
                })
                .collect();
        }
        let parts: Vec<(C64, C64)> = tops.par_iter().map(|&v| tree_sums(v, SPLIT, depth, s_half, ln5)).collect();
        pairwise(&parts)
    };
    let value = ensure_finite(cur, "preimage sum")?;
    Ok(ZetaValue { s, value, error: (cur - prev).norm(), count: depth as usize })
}

fn pairwise(parts: &[(C64, C64)]) -> (C64, C64) {
    match parts.len() {
        1 => parts[0],
        n => {
            let (a, b) = (pairwise(&parts[..n / 2]), pairwise(&parts[n / 2..]));
            (a.0 + b.0, a.1 + b.1)
        }
    }
}

/// `1 / (1 - coefficient · base^{-s/2})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricFactor {
    pub base: f64,
    pub coefficient: f64,
}

impl GeometricFactor {
    pub fn new(base: f64, coefficient: f64) -> Result<Self> {
        if !(base > 0.0 && base != 1.0 && coefficient > 0.0) {
            return Err(Error::InvalidArgument(format!("need base > 0, base != 1, coefficient > 0 (got {base}, {coefficient})")));
        }
        Ok(GeometricFactor { base, coefficient })
    }

    pub fn denominator(&self, s: C64) -> C64 {
        1.0 - self.coefficient * (-s / 2.0 * self.base.ln()).exp()
    }

    pub fn eval(&self, s: C64) -> Result<C64> {
        let d = self.denominator(s);
        if d.norm() < NEAR_POLE_TOL {
            return Err(Error::NearPole(s.to_string()));
        }
        Ok(1.0 / d)
    }

    /// Real part shared by every pole.
    pub fn pole_real_part(&self) -> f64 {
        2.0 * self.coefficient.ln() / self.base.ln()
    }

    /// Spacing of the poles along the imaginary axis.
    pub fn pole_spacing(&self) -> f64 {
        4.0 * PI / self.base.ln()
    }
}

/// Axis-aligned rectangle in the s-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn symmetric_im(re_min: f64, re_max: f64, im_abs: f64) -> Self {
        Window { re_min, re_max, im_min: -im_abs, im_max: im_abs }
    }
}

/// A pole `s = (2 log c + 2π i n)/log base`; `n` is always even.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub s: C64,
    /// Multiple of `2πi / log base` in the imaginary part.
    pub n: i64,
}

pub fn pole_lattice(factor: &GeometricFactor, w: &Window) -> Vec<Pole> {
    let re = factor.pole_real_part();
    if !(w.re_min <= re && re <= w.re_max) || w.im_min > w.im_max {
        return Vec::new();
    }
    let step = factor.pole_spacing();
    let k_lo = (w.im_min / step).ceil() as i64;
    let k_hi = (w.im_max / step).floor() as i64;
    (k_lo..=k_hi).map(|k| Pole { s: C64::new(re, k as f64 * step), n: 2 * k }).collect()
}

/// Which family of the gasket pole set `{2πin/log5} ∪ {(log9 + 2πin)/log5}`
/// a pole of a base-5 factor belongs to, decided from the integer data.
pub fn sg_pole_family(factor: &GeometricFactor, pole: &Pole) -> Option<u8> {
    if factor.base != 5.0 {
        return None;
    }
    let family = if factor.coefficient == 1.0 {
        Some(0)
    } else if factor.coefficient == 3.0 {
        Some(1)
    } else {
        None
    };
    family.filter(|_| pole.n % 2 == 0)
}

/// Right-hand side of the gasket factorization through `ζ_{R,3/4}` and `ζ_{R,5/4}`.
pub fn zeta_sg(s: C64, depth: u32) -> Result<ZetaValue> {
    let f3 = GeometricFactor { base: 5.0, coefficient: 3.0 }.eval(s)?;
    let f1 = GeometricFactor { base: 5.0, coefficient: 1.0 }.eval(s)?;
    let x = (-s / 2.0 * 5f64.ln()).exp();
    let a = zeta_r(0.75, s, depth)?;
    let b = zeta_r(1.25, s, depth)?;
    let ca = x / 2.0 * (f3 + 3.0 * f1);
    let cb = x * x / 2.0 * (3.0 * f3 - f1);
    let value = ensure_finite(a.value * ca + b.value * cb, "gasket zeta")?;
    Ok(ZetaValue { s, value, error: a.error * ca.norm() + b.error * cb.norm(), count: depth as usize })
}

/// `Σ κ^{-s/2}` over the nonzero eigenvalues `κ = lim 5^k λ_k` continued from
/// the level-m graph spectrum, with multiplicities. A truncated stand-in for
/// the left-hand side of the gasket factorization.
pub fn sg_truncated_spectral_zeta(s: C64, m: usize) -> Result<ZetaValue> {
    let tree = generate_graph_spectrum(m, true)?;
    let mut value = C64::new(0.0, 0.0);
    let mut count = 0;
    for (lam, mult) in tree.spectrum(m).entries {
        if lam.abs() < 1e-12 {
            continue;
        }
        let kappa = refine_limit(lam, m, 1e-14)?;
        value += mult as f64 * (-s / 2.0 * kappa.ln()).exp();
        count += mult;
    }
    Ok(ZetaValue { s, value, error: f64::NAN, count })
}

/// Least-squares fit `λ_j ≈ C (j - 1/2)^β` on roots with `λ ≥ λ_J / 10`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub c: f64,
    pub beta: f64,
    /// Largest `|log λ_j - log fit_j|` on the fitted range.
    pub max_log_residual: f64,
    pub points: usize,
}

pub fn fit_tail(roots: &[f64]) -> Result<TailFit> {
    let last = *roots.last().ok_or_else(|| Error::CoverageError("no roots".into()))?;
    let pts: Vec<(f64, f64)> = roots
        .iter()
        .enumerate()
        .filter(|(_, &r)| r >= last / 10.0)
        .map(|(i, &r)| ((i as f64 + 0.5).ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::CoverageError("fewer than two roots in the last decade".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let beta = sxy / sxx;
    let lnc = my - beta * mx;
    let max_log_residual = pts.iter().map(|p| (p.1 - lnc - beta * p.0).abs()).fold(0.0, f64::max);
    Ok(TailFit { c: lnc.exp(), beta, max_log_residual, points: pts.len() })
}

/// Partial sum over `roots` and the fitted tail `∫_J^∞ (C x^β)^{-s/2} dx`,
/// each scaled by `scale`. Returns `(partial, tail, tail_error)`.
fn power_sum_with_tail(roots: &[f64], s: C64) -> Result<(C64, C64, f64)> {
    let partial: C64 = roots.iter().map(|&r| (-s / 2.0 * r.ln()).exp()).sum();
    let fit = fit_tail(roots)?;
    let e = fit.beta * s / 2.0;
    if e.re <= 1.0 {
        return Err(Error::CoverageError(format!("tail exponent β Re(s)/2 = {} does not exceed 1", e.re)));
    }
    let j = roots.len() as f64;
    // Σ_{j>J} f(j - 1/2) ≈ ∫_J^∞ f, the midpoint rule.
    let tail = (-s / 2.0 * fit.c.ln()).exp() * (-(e - 1.0) * j.ln()).exp() / (e - 1.0);
    // Midpoint-rule error |f'(J)|/24 plus the fit's own spread.
    let fj = (-s / 2.0 * fit.c.ln() - e * j.ln()).exp();
    let deriv = (fj * e / j).norm();
    let spread = tail.norm() * ((s / 2.0).norm() * fit.max_log_residual).exp_m1();
    Ok((partial, tail, deriv / 24.0 + spread))
}

/// `Σ_{λ ∈ S} λ^{-s/2}` with a power-law tail beyond the scanned range.
pub fn zeta_s(s: C64, set: &GeneratingSet) -> Result<ZetaValue> {
    if s.re <= 0.0 {
        return Err(Error::OutsideConvergenceStrip(s.to_string()));
    }
    if set.roots.is_empty() {
        return Err(Error::CoverageError("empty generating set".into()));
    }
    let (partial, tail, tail_err) = power_sum_with_tail(&set.roots, s)?;
    if tail.norm() > 0.1 * partial.norm() {
        return Err(Error::CoverageError(format!(
            "tail {} exceeds 10% of the partial sum {}; scan further",
            tail.norm(),
            partial.norm()
        )));
    }
    let value = ensure_finite(partial + tail, "generating-set zeta")?;
    Ok(ZetaValue { s, value, error: tail_err, count: set.roots.len() })
}

fn gamma_factor(params: &SLParams, s: C64) -> Result<C64> {
    GeometricFactor { base: params.gamma, coefficient: 1.0 }.eval(s)
}

/// `ζ_{H_<n>}(s) = γ^{ns/2} / (1 - γ^{-s/2}) · ζ_S(s)`.
pub fn zeta_h_n(params: &SLParams, s: C64, n: u32, set: &GeneratingSet) -> Result<ZetaValue> {
    let f = gamma_factor(params, s)?;
    let zs = zeta_s(s, set)?;
    let scale = (s / 2.0 * (n as f64) * params.gamma.ln()).exp() * f;
    Ok(ZetaValue { s, value: ensure_finite(zs.value * scale, "ladder zeta")?, error: zs.error * scale.norm(), count: zs.count })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RhoMode {
    /// Through `ζ_S / (1 - γ^{-s/2})`.
    Identity,
    /// Sum over the orbit condition for `p ≤ max_p`, scanning roots afresh.
    Direct { max_p: u32 },
}

/// Zeta function of the renormalization map.
pub fn zeta_rho(params: &SLParams, s: C64, set: &GeneratingSet, mode: RhoMode) -> Result<ZetaValue> {
    match mode {
        RhoMode::Identity => zeta_h_n(params, s, 0, set),
        RhoMode::Direct { max_p } => zeta_rho_direct(params, s, set, max_p),
    }
}

/// For each `p ≤ max_p`, finds the `λ ≤ λ_max` with `ρ^p(φ(γ^{-(p+1)}λ)) ∈ D`
/// and sums `(γ^p λ)^{-s/2}`. The error bound adds the fitted λ-tail of every
/// `p` and the geometric remainder over `p > max_p`.
fn zeta_rho_direct(params: &SLParams, s: C64, set: &GeneratingSet, max_p: u32) -> Result<ZetaValue> {
    if s.re <= 0.0 {
        return Err(Error::OutsideConvergenceStrip(s.to_string()));
    }
    let f = gamma_factor(params, s)?;
    let table = AtomTable::new(params, set.depth)?;
    let map = RenormalizationMap { delta: params.delta };
    let g = params.gamma;
    let mut value = C64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut count = 0;
    let mut first_sum = C64::new(0.0, 0.0);
    for p in 0..=max_p {
        let orbit = |lam: f64| {
            let [a, _, _, d] = table.propagate_real(lam * g.powi(-(p as i32 + 1)));
            let mut x = [C64::new(a, 0.0), C64::new(d, 0.0), C64::new(1.0, 0.0)];
            for _ in 0..p {
                x = map.apply_raw(x);
            }
            (x[0] + x[1] / params.delta).re
        };
        let (roots, _) = scan_roots(orbit, set.lambda_max, set.grid_points, 1e-12)?;
        if roots.is_empty() {
            return Err(Error::CoverageError(format!("no orbit roots for p = {p}")));
        }
        let (partial, tail, tail_err) = power_sum_with_tail(&roots, s)?;
        let shift = (-s / 2.0 * (p as f64) * g.ln()).exp();
        value += shift * partial;
        error += (shift * tail).norm() + shift.norm() * tail_err;
        if p == 0 {
            first_sum = partial + tail;
        }
        count += roots.len();
    }
    // Σ_{p > max_p} γ^{-ps/2} ζ_S = γ^{-(max_p+1)s/2} f ζ_S.
    let rest = (-s / 2.0 * (max_p as f64 + 1.0) * g.ln()).exp() * f * first_sum;
    error += rest.norm();
    Ok(ZetaValue { s, value: ensure_finite(value, "direct orbit sum")?, error, count })
}

/// Rational function given by ascending coefficient lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rational {
    pub num: Vec<C64>,
    pub den: Vec<C64>,
}

impl Rational {
    fn horner(c: &[C64], z: C64) -> C64 {
        c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    pub fn eval(&self, z: C64) -> C64 {
        Self::horner(&self.num, z) / Self::horner(&self.den, z)
    }
}

/// Inner part analytic on `|z| < 1`, outer part analytic on `|z| > 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperfunctionPair {
    pub inner: Rational,
    pub outer: Rational,
}

/// `[1/(1-z), 1/(z-1)]`.
pub fn delta_hyperfunction() -> HyperfunctionPair {
    let one = C64::new(1.0, 0.0);
    HyperfunctionPair {
        inner: Rational { num: vec![one], den: vec![one, -one] },
        outer: Rational { num: vec![one], den: vec![-one, one] },
    }
}

/// `∮_{r_out} f·outer - ∮_{r_in} f·inner`; equals `f(1)` for the delta.
pub fn pairing<F: Fn(C64) -> C64>(h: &HyperfunctionPair, f: F, r_in: f64, r_out: f64, nodes: usize) -> Result<C64> {
    if !(r_in > 0.0 && r_in < 1.0 && r_out > 1.0 && r_out.is_finite()) {
        return Err(Error::InvalidAnnulus { r_in, r_out });
    }
    let outer = contour_integral(|z| f(z) * h.outer.eval(z), r_out, nodes)?;
    let inner = contour_integral(|z| f(z) * h.inner.eval(z), r_in, nodes)?;
    Ok(outer - inner)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HyperBranch {
    Inner,
    Outer,
}

/// Hyperfunction evaluation of a two-sided geometric factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperReport {
    pub branch: HyperBranch,
    /// `ζ_{Δμ}(s)` or `ζ_S(s)`; absent when `s` is outside its convergence region.
    pub prefactor: Option<C64>,
    pub factor_value: C64,
    pub product: Option<C64>,
    /// `inner(w) + outer(w)` at `w = base^{-s/2}`; zero, which is why the
    /// naive two-sided sum vanishes.
    pub branch_sum: C64,
    pub note: Option<String>,
}

pub enum Unbounded<'a> {
    Gasket { depth: u32 },
    Interval { params: SLParams, set: &'a GeneratingSet },
}

pub fn zeta_unbounded(kind: &Unbounded<'_>, s: C64) -> Result<HyperReport> {
    if s.re == 0.0 {
        return Err(Error::OnCircleBoundary);
    }
    let base = match kind {
        Unbounded::Gasket { .. } => 5.0,
        Unbounded::Interval { params, .. } => {
            if params.alpha >= 0.5 {
                return Err(Error::UnsupportedAlpha(params.alpha));
            }
            params.gamma
        }
    };
    let h = delta_hyperfunction();
    let w = (-s / 2.0 * f64::ln(base)).exp();
    let (branch, factor_value) = if s.re > 0.0 { (HyperBranch::Inner, h.inner.eval(w)) } else { (HyperBranch::Outer, h.outer.eval(w)) };
    let branch_sum = h.inner.eval(w) + h.outer.eval(w);
    let pre = match kind {
        Unbounded::Gasket { depth } => zeta_sg(s, *depth),
        Unbounded::Interval { set, .. } => zeta_s(s, set),
    };
    let (prefactor, note) = match pre {
        Ok(z) => (Some(z.value), None),
        Err(e @ (Error::OutsideConvergenceStrip(_) | Error::CoverageError(_))) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(HyperReport { branch, prefactor, factor_value, product: prefactor.map(|p| p * factor_value), branch_sum, note })
}

/// Riemann zeta for real `s > 1` by Euler-Maclaurin with ten explicit terms.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if s <= 1.0 {
        return Err(Error::OutsideConvergenceStrip(s.to_string()));
    }
    const N: f64 = 10.0;
    // B_2k / (2k)!
    const B: [f64; 6] = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0, 1.0 / 47900160.0, -691.0 / 1307674368000.0];
    let mut sum: f64 = (1..N as usize).map(|k| (k as f64).powf(-s)).sum();
    sum += N.powf(1.0 - s) / (s - 1.0) + 0.5 * N.powf(-s);
    // Rising factorial s(s+1)...(s+2k-2) times N^{-s-2k+1}.
    let mut rising = s;
    let mut pow = N.powf(-s - 1.0);
    for (k, b) in B.iter().enumerate() {
        sum += b * rising * pow;
        let m = 2.0 * k as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        pow /= N * N;
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannCheck {
    pub s: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub error_estimate: f64,
}

/// Compares `ζ(s)` with `π^s ζ_ρ(s)` for the Lebesgue case `α = 1/2`.
pub fn riemann_check(s: f64, set: &GeneratingSet) -> Result<RiemannCheck> {
    if set.alpha != 0.5 {
        return Err(Error::UnsupportedAlpha(set.alpha));
    }
    let params = crate::sl::make_params(0.5)?;
    let z = zeta_rho(&params, C64::new(s, 0.0), set, RhoMode::Identity)?;
    let lhs = riemann_zeta(s)?;
    let rhs = PI.powf(s) * z.value.re;
    Ok(RiemannCheck { s, lhs, rhs, abs_err: (lhs - rhs).abs(), error_estimate: PI.powf(s) * z.error })
}

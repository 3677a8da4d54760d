//! Fractal Sturm-Liouville operators `-d/dm d/dx` on the interval and its
//! blow-ups, with the self-similar measure of weights `(b, 1-b)`.
//!
//! The measure at depth `n` is lumped into `2^n` atoms at the midpoints of
//! the cells `Ψ_w([0,1])`. Between atoms a solution is linear, so the
//! propagator is an exact product of translation and kick matrices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bisect_root, Mat2C, ProjPoint2, Tolerances, C64};

pub const MAX_DEPTH: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SLParams {
    pub alpha: f64,
    pub b: f64,
    pub delta: f64,
    pub gamma: f64,
}

pub fn make_params(alpha: f64) -> Result<SLParams> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::UnsupportedAlpha(alpha));
    }
    Ok(SLParams { alpha, b: 1.0 - alpha, delta: alpha / (1.0 - alpha), gamma: 1.0 / (alpha * (1.0 - alpha)) })
}

fn check_depth(n: u32) -> Result<()> {
    if n > MAX_DEPTH {
        return Err(Error::DepthTooLarge { depth: n, max: MAX_DEPTH });
    }
    Ok(())
}

/// Visits atoms left to right as `(position, mass)`.
fn for_each_atom(alpha: f64, b: f64, n: u32, f: &mut impl FnMut(f64, f64)) {
    fn go(lo: f64, width: f64, mass: f64, left: u32, alpha: f64, b: f64, f: &mut impl FnMut(f64, f64)) {
        if left == 0 {
            f(lo + 0.5 * width, mass);
            return;
        }
        let w1 = alpha * width;
        go(lo, w1, mass * b, left - 1, alpha, b, f);
        go(lo + w1, width - w1, mass * (1.0 - b), left - 1, alpha, b, f);
    }
    go(0.0, 1.0, 1.0, n, alpha, b, f);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedMeasure {
    pub depth: u32,
    pub atoms: Vec<(f64, f64)>,
}

pub fn discretize_measure(params: &SLParams, n: u32) -> Result<DiscretizedMeasure> {
    check_depth(n)?;
    let mut atoms = Vec::with_capacity(1 << n);
    for_each_atom(params.alpha, params.b, n, &mut |x, m| atoms.push((x, m)));
    Ok(DiscretizedMeasure { depth: n, atoms })
}

/// Consecutive gaps and masses at one depth, for repeated evaluation.
#[derive(Debug, Clone)]
pub struct AtomTable {
    gaps: Vec<f64>,
    masses: Vec<f64>,
    last_gap: f64,
}

impl AtomTable {
    pub fn new(params: &SLParams, n: u32) -> Result<Self> {
        check_depth(n)?;
        let mut gaps = Vec::with_capacity(1 << n);
        let mut masses = Vec::with_capacity(1 << n);
        let mut prev = 0.0;
        for_each_atom(params.alpha, params.b, n, &mut |x, m| {
            gaps.push(x - prev);
            masses.push(m);
            prev = x;
        });
        Ok(AtomTable { gaps, masses, last_gap: 1.0 - prev })
    }

    /// Propagator entries `(a, b, c, d)` for real `λ`.
    pub fn propagate_real(&self, lambda: f64) -> [f64; 4] {
        // Rows of the running product; translation then kick per atom.
        let (mut a, mut b, mut c, mut d) = (1.0, 0.0, 0.0, 1.0);
        for (g, m) in self.gaps.iter().zip(&self.masses) {
            a += g * c;
            b += g * d;
            let k = lambda * m;
            c -= k * a;
            d -= k * b;
        }
        a += self.last_gap * c;
        b += self.last_gap * d;
        [a, b, c, d]
    }

    pub fn propagate(&self, lambda: C64) -> Mat2C {
        let (mut a, mut b, mut c, mut d) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        for (g, m) in self.gaps.iter().zip(&self.masses) {
            a += c * g;
            b += d * g;
            let k = lambda * m;
            c -= k * a;
            d -= k * b;
        }
        a += c * self.last_gap;
        b += d * self.last_gap;
        Mat2C::new(a, b, c, d)
    }
}

/// Propagator of the depth-n problem at one `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Propagator {
    pub matrix: Mat2C,
    pub lambda: C64,
    pub depth: u32,
}

/// Transfer matrix from `(f, f')(0)` to `(f, f')(1)`.
pub fn propagator(params: &SLParams, lambda: C64, n: u32) -> Result<Propagator> {
    check_depth(n)?;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let (mut a, mut b, mut c, mut d) = (one, zero, zero, one);
    let mut prev = 0.0;
    for_each_atom(params.alpha, params.b, n, &mut |x, m| {
        let g = x - prev;
        prev = x;
        a += c * g;
        b += d * g;
        let k = lambda * m;
        c -= k * a;
        d -= k * b;
    });
    let g = 1.0 - prev;
    a += c * g;
    b += d * g;
    let matrix = Mat2C::new(a, b, c, d);
    if !matrix.is_finite() {
        return Err(Error::NumericOverflow(format!("propagator at lambda = {lambda}")));
    }
    Ok(Propagator { matrix, lambda, depth: n })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantCurvePoint {
    pub point: ProjPoint2,
    pub lambda: C64,
}

/// `φ(λ) = [a(λ), d(λ), 1]`.
pub fn phi(params: &SLParams, lambda: C64, n: u32) -> Result<InvariantCurvePoint> {
    let m = propagator(params, lambda, n)?.matrix;
    Ok(InvariantCurvePoint { point: ProjPoint2::new(m.a, m.d, C64::new(1.0, 0.0))?, lambda })
}

/// The quadratic map `ρ` on the projective plane, for any `δ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenormalizationMap {
    pub delta: f64,
}

impl RenormalizationMap {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
        }
        Ok(RenormalizationMap { delta })
    }

    /// Homogeneous image without normalization.
    pub fn apply_raw(&self, [x, y, z]: [C64; 3]) -> [C64; 3] {
        let dl = self.delta;
        let s = x + y / dl;
        let zz = z * z;
        [x * s - zz / dl, dl * y * s - dl * zz, zz]
    }

    pub fn apply(&self, p: &ProjPoint2) -> Result<ProjPoint2> {
        let img = self.apply_raw(p.normalized().coords());
        if img.iter().all(|w| w.norm() <= 1e-14) {
            return Err(Error::IndeterminacyPoint);
        }
        Ok(ProjPoint2::new(img[0], img[1], img[2])?.normalized())
    }

    /// The line `x + y/δ = 0`, parametrized as `[t, -δt, 1]` plus its point at infinity.
    pub fn d_point(&self, t: C64) -> ProjPoint2 {
        ProjPoint2::new(t, -self.delta * t, C64::new(1.0, 0.0)).expect("third coordinate is 1")
    }

    /// Iterates until within `tol` of `[0,1,0]`; returns the step count.
    pub fn steps_to_attractor(&self, p: &ProjPoint2, tol: f64, max_steps: usize) -> Result<Option<usize>> {
        let target = ProjPoint2::real(0.0, 1.0, 0.0)?;
        let mut q = p.normalized();
        for k in 0..=max_steps {
            if q.distance(&target) <= tol {
                return Ok(Some(k));
            }
            q = self.apply(&q)?;
        }
        Ok(None)
    }
}

pub fn rho_map(params: &SLParams, p: &ProjPoint2) -> Result<ProjPoint2> {
    RenormalizationMap { delta: params.delta }.apply(p)
}

/// `h(λ) = a(λ/γ) + d(λ/γ)/δ`, whose zeros make up the generating set.
pub(crate) fn h_value(params: &SLParams, table: &AtomTable, lambda: f64) -> f64 {
    let [a, _, _, d] = table.propagate_real(lambda / params.gamma);
    a + d / params.delta
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratingSet {
    pub alpha: f64,
    pub depth: u32,
    pub lambda_max: f64,
    pub grid_points: usize,
    pub roots: Vec<f64>,
}

/// Minimum grid cells between consecutive roots before they count as resolved.
const CELLS_PER_GAP: usize = 8;
const MAX_REFINEMENTS: usize = 3;

pub fn generating_set(params: &SLParams, lambda_max: f64, grid_points: usize, n: u32) -> Result<GeneratingSet> {
    generating_set_with(params, lambda_max, grid_points, n, &Tolerances::default())
}

pub fn generating_set_with(
    params: &SLParams,
    lambda_max: f64,
    grid_points: usize,
    n: u32,
    tol: &Tolerances,
) -> Result<GeneratingSet> {
    let table = AtomTable::new(params, n)?;
    let (roots, points) = scan_roots(|x| h_value(params, &table, x), lambda_max, grid_points, tol.root_tol)?;
    Ok(GeneratingSet { alpha: params.alpha, depth: n, lambda_max, grid_points: points, roots })
}

/// Sign changes of `f` on a geometric grid over `(1e-6 λ_max, λ_max]`,
/// bisected to relative width `root_tol`. The grid is refined until
/// consecutive roots are at least [`CELLS_PER_GAP`] cells apart.
///
/// Returns the roots and the number of grid points finally used.
pub fn scan_roots<F>(f: F, lambda_max: f64, grid_points: usize, root_tol: f64) -> Result<(Vec<f64>, usize)>
where
    F: Fn(f64) -> f64 + Sync,
{
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda_max must be positive, got {lambda_max}")));
    }
    if grid_points < 2 {
        return Err(Error::InvalidArgument("need at least 2 grid points".into()));
    }
    let lo = (1e-6 * lambda_max).max(1e-12);
    if f(lo) <= 0.0 {
        return Err(Error::CoverageError(format!("scanned function is not positive at the scan start {lo}")));
    }
    let mut points = grid_points;
    for _ in 0..=MAX_REFINEMENTS {
        let ratio = (lambda_max / lo).powf(1.0 / (points - 1) as f64);
        let grid: Vec<f64> = (0..points).map(|i| if i + 1 == points { lambda_max } else { lo * ratio.powi(i as i32) }).collect();
        let values: Vec<f64> = grid.par_iter().map(|&x| f(x)).collect();
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NumericOverflow(format!("scan value at lambda = {}", grid[i])));
        }
        let cells: Vec<usize> = (0..points - 1).filter(|&i| values[i] * values[i + 1] <= 0.0 && values[i] != 0.0).collect();
        if cells.windows(2).any(|w| w[1] - w[0] < CELLS_PER_GAP) {
            points *= 4;
            continue;
        }
        let roots = cells
            .par_iter()
            .map(|&i| {
                let (a, b) = (grid[i], grid[i + 1]);
                if values[i + 1] == 0.0 {
                    return Ok(b);
                }
                bisect_root(&f, a, b, root_tol * b)
            })
            .collect::<Result<Vec<f64>>>()?;
        return Ok((roots, points));
    }
    Err(Error::GridTooCoarse(format!("roots closer than {CELLS_PER_GAP} cells after {MAX_REFINEMENTS} refinements")))
}

impl GeneratingSet {
    /// `h` at each root, recomputed; used as the postcondition witness.
    pub fn residuals(&self, params: &SLParams) -> Result<Vec<f64>> {
        let table = AtomTable::new(params, self.depth)?;
        Ok(self.roots.iter().map(|&r| h_value(params, &table, r).abs()).collect())
    }

    /// Whether `h` changes sign across a relative window around each root.
    pub fn sign_change_certificates(&self, params: &SLParams, rel: f64) -> Result<Vec<bool>> {
        let table = AtomTable::new(params, self.depth)?;
        Ok(self
            .roots
            .iter()
            .map(|&r| h_value(params, &table, r * (1.0 - rel)) * h_value(params, &table, r * (1.0 + rel)) < 0.0)
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Blowup {
    Finite(u32),
    /// The whole half-line; values below `floor` are not listed.
    Infinite { floor: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub value: f64,
    /// 1-based index into the generating set.
    pub k: usize,
    pub p: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumLadder {
    pub entries: Vec<LadderEntry>,
}

/// Default lower cut-off of the half-line ladder, as a power of `1/γ` times `λ_1`.
pub const DEFAULT_FLOOR_POWER: i32 = 8;

/// Eigenvalues `γ^p λ_k ≤ lambda_max` of `H_<n>` (`p ≥ -n`) or of the half-line operator.
///
/// For the half-line only roots present in `s` are shifted, so the list is
/// the part of the spectrum reachable from the computed generating set.
pub fn ladder_spectrum(params: &SLParams, blowup: Blowup, lambda_max: f64, s: &GeneratingSet) -> Result<SpectrumLadder> {
    let g = params.gamma;
    let Some(&first) = s.roots.first() else {
        return Err(Error::CoverageError("empty generating set".into()));
    };
    let mut entries = Vec::new();
    match blowup {
        Blowup::Finite(n) => {
            let need = lambda_max * g.powi(n as i32);
            if s.lambda_max < need * (1.0 - 1e-12) {
                return Err(Error::CoverageError(format!("generating set scanned to {}, need {need}", s.lambda_max)));
            }
            for (k, &lam) in s.roots.iter().enumerate() {
                let mut p = -(n as i32);
                while lam * g.powi(p) <= lambda_max {
                    entries.push(LadderEntry { value: lam * g.powi(p), k: k + 1, p });
                    p += 1;
                }
            }
        }
        Blowup::Infinite { floor } => {
            if params.alpha == 0.5 {
                return Err(Error::UnsupportedAlpha(params.alpha));
            }
            if s.lambda_max < lambda_max {
                return Err(Error::CoverageError(format!("generating set scanned to {}, need {lambda_max}", s.lambda_max)));
            }
            let floor = floor.unwrap_or(first * g.powi(-DEFAULT_FLOOR_POWER));
            for (k, &lam) in s.roots.iter().enumerate() {
                let mut p = ((floor / lam).ln() / g.ln()).floor() as i32 - 1;
                while lam * g.powi(p) <= lambda_max {
                    let v = lam * g.powi(p);
                    if v >= floor {
                        entries.push(LadderEntry { value: v, k: k + 1, p });
                    }
                    p += 1;
                }
            }
        }
    }
    entries.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(SpectrumLadder { entries })
}

/// Solution of `-d/dm_<n> d/dx f = λ f`, `f(0)=0`, `f'(0)=1`, sampled at `0`,
/// at every atom and at the right end `α^{-n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionSamples {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    /// `|f(end)| / max |f|`.
    pub terminal_ratio: f64,
}

impl EigenfunctionSamples {
    /// Piecewise-linear interpolation, which is exact between atoms.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.xs.partition_point(|&t| t <= x);
        if i == 0 {
            return self.values[0];
        }
        if i == self.xs.len() {
            return *self.values.last().unwrap();
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
        self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
    }
}

pub const EIGENFUNCTION_CERT: f64 = 1e-6;

pub fn sl_eigenfunction(params: &SLParams, lambda: f64, n_blowup: u32, depth: u32) -> Result<EigenfunctionSamples> {
    check_depth(depth)?;
    let scale_x = params.alpha.powi(-(n_blowup as i32));
    let scale_m = (1.0 - params.alpha).powi(-(n_blowup as i32));
    let mut xs = Vec::with_capacity((1 << depth) + 2);
    let mut values = Vec::with_capacity((1 << depth) + 2);
    xs.push(0.0);
    values.push(0.0);
    let (mut f, mut df, mut prev) = (0.0f64, 1.0f64, 0.0f64);
    for_each_atom(params.alpha, params.b, depth, &mut |x, m| {
        let x = x * scale_x;
        f += (x - prev) * df;
        prev = x;
        xs.push(x);
        values.push(f);
        df -= lambda * m * scale_m * f;
    });
    f += (scale_x - prev) * df;
    xs.push(scale_x);
    values.push(f);
    let peak = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !peak.is_finite() {
        return Err(Error::NumericOverflow(format!("eigenfunction at lambda = {lambda}")));
    }
    let terminal_ratio = f.abs() / peak;
    if terminal_ratio > EIGENFUNCTION_CERT {
        return Err(Error::NotAnEigenvalue { lambda, ratio: terminal_ratio });
    }
    Ok(EigenfunctionSamples { xs, values, terminal_ratio })
}

/// Entrywise gap between `D_α Γ_{γλ} D_{1/α}` and `D_δ Γ_λ D_{1/δ} Γ_λ`.
pub fn propagator_selfsimilar_check(params: &SLParams, lambda: C64, depth: u32) -> Result<f64> {
    let big = propagator(params, lambda * params.gamma, depth)?.matrix;
    let small = propagator(params, lambda, depth)?.matrix;
    let lhs = Mat2C::dilation(params.alpha) * big * Mat2C::dilation(1.0 / params.alpha);
    let rhs = Mat2C::dilation(params.delta) * small * Mat2C::dilation(1.0 / params.delta) * small;
    Ok(lhs.max_abs_diff(&rhs))
}

/// Worst `d(ρ(φ(λ)), φ(γλ))` over a λ grid, both sides at the same depth.
pub fn functional_equation_residual(params: &SLParams, lambdas: &[f64], depth: u32) -> Result<f64> {
    let table = AtomTable::new(params, depth)?;
    let map = RenormalizationMap { delta: params.delta };
    let one = C64::new(1.0, 0.0);
    let mut worst = 0.0f64;
    for &l in lambdas {
        let m = table.propagate(C64::new(l, 0.0));
        let m2 = table.propagate(C64::new(params.gamma * l, 0.0));
        let lhs = map.apply(&ProjPoint2::new(m.a, m.d, one)?)?;
        let rhs = ProjPoint2::new(m2.a, m2.d, one)?;
        worst = worst.max(lhs.distance(&rhs));
    }
    Ok(worst)
}

/// 20 geometric points on `[0.01, 10]`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..20).map(|i| 0.01 * 1000f64.powf(i as f64 / 19.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn params_examples() {
        let p = make_params(0.5).unwrap();
        assert_eq!((p.b, p.delta, p.gamma), (0.5, 1.0, 4.0));
        let p = make_params(1.0 / 3.0).unwrap();
        assert!((p.b - 2.0 / 3.0).abs() < 1e-15 && (p.delta - 0.5).abs() < 1e-15 && (p.gamma - 4.5).abs() < 1e-14);
        assert_eq!(make_params(0.7).unwrap_err().name(), "UnsupportedAlpha");
        assert_eq!(make_params(0.0).unwrap_err().name(), "UnsupportedAlpha");
        for a in [0.1, 0.25, 0.4, 0.5] {
            let p = make_params(a).unwrap();
            assert!(p.gamma >= 4.0 && p.delta <= 1.0);
        }
    }

    #[test]
    fn measure_examples() {
        let m = discretize_measure(&make_params(0.5).unwrap(), 1).unwrap();
        assert_eq!(m.atoms, vec![(0.25, 0.5), (0.75, 0.5)]);
        let m = discretize_measure(&make_params(1.0 / 3.0).unwrap(), 1).unwrap();
        assert!((m.atoms[0].0 - 1.0 / 6.0).abs() < 1e-15 && (m.atoms[0].1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.atoms[1].0 - 2.0 / 3.0).abs() < 1e-15 && (m.atoms[1].1 - 1.0 / 3.0).abs() < 1e-15);
        for a in [0.2, 0.4] {
            let m = discretize_measure(&make_params(a).unwrap(), 12).unwrap();
            assert_eq!(m.atoms.len(), 4096);
            assert!((m.atoms.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(m.atoms.windows(2).all(|w| w[0].0 < w[1].0));
        }
        assert_eq!(discretize_measure(&make_params(0.5).unwrap(), 25).unwrap_err().name(), "DepthTooLarge");
    }

    #[test]
    fn propagator_at_zero() {
        for a in [0.3, 0.5] {
            let m = propagator(&make_params(a).unwrap(), re(0.0), 16).unwrap().matrix;
            assert!(m.max_abs_diff(&Mat2C::real(1.0, 1.0, 0.0, 1.0)) < 1e-12);
        }
    }

    #[test]
    fn lebesgue_closed_form() {
        let p = make_params(0.5).unwrap();
        let m = propagator(&p, re(PI * PI), 18).unwrap().matrix;
        assert!((m.a + 1.0).norm() < 1e-6);
        for lam in [1.0f64, 4.0, 10.0] {
            let m = propagator(&p, re(lam), 18).unwrap().matrix;
            let r = lam.sqrt();
            assert!((m.a - r.cos()).norm() < 1e-6);
            assert!((m.b - r.sin() / r).norm() < 1e-6);
            assert!((m.c + r * r.sin()).norm() < 1e-6);
            assert!((m.d - r.cos()).norm() < 1e-6);
        }
    }

    #[test]
    fn table_agrees_with_streaming() {
        let p = make_params(0.4).unwrap();
        let t = AtomTable::new(&p, 10).unwrap();
        let lam = C64::new(3.0, 1.5);
        let m = propagator(&p, lam, 10).unwrap().matrix;
        assert!(t.propagate(lam).max_abs_diff(&m) < 1e-13);
        let r = t.propagate_real(3.0);
        let mc = t.propagate(re(3.0));
        assert!((r[0] - mc.a.re).abs() < 1e-14 && (r[3] - mc.d.re).abs() < 1e-14);
    }

    #[test]
    fn phi_examples() {
        let p = make_params(0.5).unwrap();
        let one = ProjPoint2::real(1.0, 1.0, 1.0).unwrap();
        assert!(phi(&p, re(0.0), 12).unwrap().point.distance(&one) < 1e-12);
        let q = phi(&p, re(PI * PI / 4.0), 18).unwrap().point;
        assert!(q.distance(&ProjPoint2::real(0.0, 0.0, 1.0).unwrap()) < 1e-6);
        let p = make_params(0.4).unwrap();
        let lhs = rho_map(&p, &phi(&p, re(1.0), 18).unwrap().point).unwrap();
        let rhs = phi(&p, re(p.gamma), 18).unwrap().point;
        assert!(lhs.distance(&rhs) <= 1e-6);
    }

    #[test]
    fn rho_examples() {
        let p = make_params(0.3).unwrap();
        let fixed = ProjPoint2::real(1.0, 1.0, 1.0).unwrap();
        assert!(rho_map(&p, &fixed).unwrap().distance(&fixed) < 1e-15);
        let inf = ProjPoint2::real(0.0, 1.0, 0.0).unwrap();
        assert!(rho_map(&p, &inf).unwrap().distance(&inf) < 1e-15);
        let p = make_params(0.5).unwrap();
        let img = rho_map(&p, &ProjPoint2::real(1.0, -1.0, 1.0).unwrap()).unwrap();
        assert!(img.distance(&ProjPoint2::real(-1.0, -1.0, 1.0).unwrap()) < 1e-15);
        // [1, -δ, 0] is where every component vanishes.
        let bad = ProjPoint2::real(1.0, -1.0, 0.0).unwrap();
        assert_eq!(rho_map(&p, &bad).unwrap_err().name(), "IndeterminacyPoint");
    }

    #[test]
    fn functional_equation_grid() {
        for a in [0.3, 0.4, 0.5] {
            let r = functional_equation_residual(&make_params(a).unwrap(), &default_lambda_grid(), 18).unwrap();
            assert!(r <= 1e-6, "alpha={a}: {r}");
        }
    }

    #[test]
    fn basin_of_line_d() {
        for delta in [1.5, 2.0] {
            let map = RenormalizationMap::new(delta).unwrap();
            for t in [-3.0, -0.5, 0.1, 0.7, 2.0, 10.0] {
                let steps = map.steps_to_attractor(&map.d_point(re(t)), 1e-6, 100).unwrap();
                assert!(steps.is_some(), "delta={delta} t={t}");
            }
        }
    }

    #[test]
    fn generating_set_half() {
        let p = make_params(0.5).unwrap();
        let s = generating_set(&p, 500.0, 2000, 18).unwrap();
        let want: Vec<f64> = [1.0, 9.0, 25.0, 49.0].iter().map(|k| k * PI * PI).collect();
        assert_eq!(s.roots.len(), 4);
        for (r, w) in s.roots.iter().zip(&want) {
            assert!((r - w).abs() <= 1e-6 * w);
        }
    }

    #[test]
    fn generating_set_alpha_04() {
        let p = make_params(0.4).unwrap();
        let s = generating_set(&p, 2000.0, 2000, 16).unwrap();
        assert!(!s.roots.is_empty());
        assert!(s.roots.iter().all(|&r| r > 0.0));
        assert!(s.residuals(&p).unwrap().iter().all(|&h| h <= 1e-8));
        assert!(s.sign_change_certificates(&p, 1e-9).unwrap().iter().all(|&c| c));
    }

    #[test]
    fn coarse_grid_is_refined() {
        let p = make_params(0.5).unwrap();
        let s = generating_set(&p, 500.0, 10, 14).unwrap();
        assert!(s.grid_points > 10);
        assert_eq!(s.roots.len(), 4);
    }

    #[test]
    fn ladders() {
        let p = make_params(0.5).unwrap();
        let s = generating_set(&p, 500.0, 2000, 18).unwrap();
        let l0 = ladder_spectrum(&p, Blowup::Finite(0), 100.0, &s).unwrap();
        let v: Vec<f64> = l0.entries.iter().map(|e| e.value).collect();
        assert_eq!(v.len(), 3);
        for (j, x) in v.iter().enumerate() {
            let w = PI * PI * ((j + 1) * (j + 1)) as f64;
            assert!((x - w).abs() <= 1e-6 * w);
        }
        let l1 = ladder_spectrum(&p, Blowup::Finite(1), 100.0, &s).unwrap();
        for e in &l0.entries {
            assert!(l1.entries.iter().any(|f| (f.value - e.value).abs() < 1e-9 * e.value));
        }
        assert_eq!(ladder_spectrum(&p, Blowup::Finite(3), 100.0, &s).unwrap_err().name(), "CoverageError");
        assert_eq!(ladder_spectrum(&p, Blowup::Infinite { floor: None }, 100.0, &s).unwrap_err().name(), "UnsupportedAlpha");

        let p = make_params(0.4).unwrap();
        let s = generating_set(&p, 200.0, 2000, 16).unwrap();
        let inf = ladder_spectrum(&p, Blowup::Infinite { floor: None }, 100.0, &s).unwrap();
        let target = s.roots[0] * p.gamma.powi(-3);
        assert!(inf.entries.iter().any(|e| e.k == 1 && e.p == -3 && (e.value - target).abs() < 1e-15 * target.max(1.0)));
    }

    #[test]
    fn ladder_reproduces_squares() {
        let p = make_params(0.5).unwrap();
        let s = generating_set(&p, 1000.0, 2000, 18).unwrap();
        let l = ladder_spectrum(&p, Blowup::Finite(0), 100.0 * PI * PI * 1.01, &s).unwrap();
        assert_eq!(l.entries.len(), 10);
        for (j, e) in l.entries.iter().enumerate() {
            let w = PI * PI * ((j + 1) * (j + 1)) as f64;
            assert!((e.value - w).abs() <= 1e-6 * w);
        }
    }

    #[test]
    fn eigenfunction_sine() {
        let p = make_params(0.5).unwrap();
        let f = sl_eigenfunction(&p, PI * PI, 0, 16).unwrap();
        for (x, v) in f.xs.iter().zip(&f.values) {
            assert!((v - (PI * x).sin() / PI).abs() < 1e-6);
        }
        assert_eq!(sl_eigenfunction(&p, PI * PI * 1.05, 0, 16).unwrap_err().name(), "NotAnEigenvalue");
    }

    // The depth-d lumped problem on [0, 1/α] restricted to [0, α] is the
    // depth-(d-2) problem on [0, 1] rescaled, so the scaling holds exactly.
    #[test]
    fn eigenfunction_scaling() {
        for a in [0.5, 0.4] {
            let p = make_params(a).unwrap();
            let s = generating_set(&p, 30.0 * p.gamma, 2000, 12).unwrap();
            // S at depth 12 is exact for H_<0> at depth 13.
            let lam = s.roots[0];
            let g0 = sl_eigenfunction(&p, lam, 0, 13).unwrap();
            let g1 = sl_eigenfunction(&p, p.gamma * lam, 1, 15).unwrap();
            let peak = g0.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (y, v) in g0.xs.iter().zip(&g0.values) {
                let w = g1.eval(a * y) / a;
                assert!((w - v).abs() <= 1e-6 * peak, "alpha={a} y={y}: {w} vs {v}");
            }
        }
    }

    #[test]
    fn self_similarity() {
        let p = make_params(0.5).unwrap();
        assert!(propagator_selfsimilar_check(&p, re(0.0), 16).unwrap() <= 1e-12);
        assert!(propagator_selfsimilar_check(&p, re(1.0), 18).unwrap() <= 1e-6);
        let p = make_params(0.4).unwrap();
        let r18 = propagator_selfsimilar_check(&p, re(2.0), 18).unwrap();
        let r19 = propagator_selfsimilar_check(&p, re(2.0), 19).unwrap();
        assert!(r19 < r18, "{r19} vs {r18}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn unit_determinant(a in 0.05f64..0.5, lr in -10.0f64..10.0, li in -10.0f64..10.0) {
            let p = make_params(a).unwrap();
            let m = propagator(&p, C64::new(lr, li), 12).unwrap().matrix;
            prop_assert!((m.det() - 1.0).norm() <= 1e-12);
        }

        // ad - bc cancels catastrophically once the entries grow, so far from
        // the origin the bound is relative to the squared entry size.
        #[test]
        fn unit_determinant_scaled(a in 0.05f64..0.5, lr in -200.0f64..200.0, li in -50.0f64..50.0) {
            let p = make_params(a).unwrap();
            let m = propagator(&p, C64::new(lr, li), 12).unwrap().matrix;
            let size = [m.a, m.b, m.c, m.d].iter().map(|z| z.norm()).fold(1.0, f64::max);
            prop_assert!((m.det() - 1.0).norm() <= 1e-12 * size * size);
        }

        #[test]
        fn rho_homogeneous(
            x in (-3.0f64..3.0, -3.0f64..3.0), y in (-3.0f64..3.0, -3.0f64..3.0),
            z in (-3.0f64..3.0, -3.0f64..3.0), s in (0.1f64..5.0, -5.0f64..5.0), a in 0.1f64..0.5,
        ) {
            let pp = make_params(a).unwrap();
            let (x, y, z, s) = (C64::new(x.0, x.1), C64::new(y.0, y.1), C64::new(z.0, z.1), C64::new(s.0, s.1));
            let Ok(p) = ProjPoint2::new(x, y, z) else { return Ok(()) };
            let q = ProjPoint2::new(x * s, y * s, z * s).unwrap();
            match (rho_map(&pp, &p), rho_map(&pp, &q)) {
                (Ok(u), Ok(v)) => prop_assert!(u.distance(&v) <= 1e-12),
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "indeterminacy disagrees"),
            }
        }

        #[test]
        fn basin_random_points(delta in prop::sample::select(vec![1.5, 2.0]), t in -20.0f64..20.0, u in -20.0f64..20.0) {
            let map = RenormalizationMap::new(delta).unwrap();
            let p = map.d_point(C64::new(t, u));
            prop_assert!(map.steps_to_attractor(&p, 1e-6, 100).unwrap().is_some());
        }
    }
}

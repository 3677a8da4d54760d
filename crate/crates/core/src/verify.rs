//! Invariant suite over every module, as run by `verify all`.

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::decimation::{
    apply_r_real, compare_spectra, generate_graph_spectrum, inverse_branches_real, is_forbidden, limit_eigenvalue,
    verify_decimation_step, Branch, EigenSequence,
};
use crate::error::Result;
use crate::lattice::{conjugacy_checks, g_map, trace_form, trace_map_closed_form, SymGForm, CONJUGACY_POLES};
use crate::numerics::{contour_integral, ProjPoint1, ProjPoint2, C64};
use crate::sg::{build_level_graph, graph_energy, harmonic_extend};
use crate::sl::{
    default_lambda_grid, functional_equation_residual, generating_set, ladder_spectrum, make_params, propagator, rho_map,
    Blowup, RenormalizationMap,
};
use crate::zeta::{
    delta_hyperfunction, pairing, pole_lattice, sg_pole_family, zeta_h_n, zeta_r, zeta_rho, GeometricFactor, RhoMode,
    Window,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub module: String,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

/// Sizes used by the suite. `quick` caps graph levels at 2 and tree or
/// propagator depths at 12 wherever a stated tolerance survives the cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSize {
    pub max_level: usize,
    pub max_depth: u32,
}

impl SuiteSize {
    pub fn new(quick: bool) -> Self {
        if quick {
            SuiteSize { max_level: 2, max_depth: 12 }
        } else {
            SuiteSize { max_level: 4, max_depth: 16 }
        }
    }
}

type Check = (&'static str, &'static str, fn(SuiteSize, &mut StdRng) -> Result<(bool, String)>);

fn rc(rng: &mut StdRng, r: f64) -> C64 {
    C64::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn rp(rng: &mut StdRng) -> Result<ProjPoint2> {
    loop {
        if let Ok(p) = ProjPoint2::new(rc(rng, 10.0), rc(rng, 10.0), rc(rng, 10.0)) {
            return Ok(p);
        }
    }
}

fn normalize_idempotent(_: SuiteSize, rng: &mut StdRng) -> Result<(bool, String)> {
    let mut bad = 0;
    for _ in 0..1000 {
        let n = rp(rng)?.normalized();
        bad += usize::from(n.normalized().coords() != n.coords());
    }
    Ok((bad == 0, format!("{bad} of 1000 changed")))
}

fn triangle(_: SuiteSize, rng: &mut StdRng) -> Result<(bool, String)> {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let (p, q, r) = (rp(rng)?, rp(rng)?, rp(rng)?);
        worst = worst.max(p.distance(&r) - p.distance(&q) - q.distance(&r));
    }
    Ok((worst <= 1e-12, format!("max excess {worst:.2e}")))
}

fn contour_monomials(_: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for k in -3..=3 {
        let v = contour_integral(|z| z.powi(k), 1.0, 64)?;
        worst = worst.max((v - if k == -1 { 1.0 } else { 0.0 }).norm());
    }
    Ok((worst <= 1e-10, format!("max error {worst:.2e}")))
}

fn energy_invariance(sz: SuiteSize, rng: &mut StdRng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let b = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let e0 = graph_energy(&harmonic_extend(b, 0)?)?;
        for m in 1..=sz.max_level.min(3) {
            worst = worst.max((graph_energy(&harmonic_extend(b, m)?)? - e0).abs());
        }
    }
    Ok((worst <= 1e-10, format!("max |E_m - E_0| {worst:.2e}")))
}

fn spectral_bound_and_kernel(sz: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let mut ok = true;
    for m in 0..=sz.max_level {
        let s = build_level_graph(m)?.dense_spectrum()?;
        ok &= s.entries.iter().all(|&(v, _)| (-1e-12..=2.0 + 1e-12).contains(&v));
        ok &= s.multiplicity_of(0.0, 1e-8) == 1;
    }
    Ok((ok, format!("m = 0..{}", sz.max_level)))
}

fn half_localization(sz: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let mut ok = true;
    for m in 1..=sz.max_level {
        let g = build_level_graph(m)?;
        ok &= !g.dense_spectrum()?.contains(0.5, 1e-8);
        ok &= g.dirichlet_spectrum()?.contains(0.5, 1e-8) == (m == 1);
    }
    Ok((ok, "1/2 absent from the full graph, in the interior block only at m = 1".into()))
}

fn nesting(_: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let mut prev = build_level_graph(0)?.vertices();
    let mut worst = 0.0f64;
    for m in 1..=6 {
        let cur = build_level_graph(m)?.vertices();
        for (a, b) in prev.iter().zip(&cur) {
            worst = worst.max((a[0] - b[0]).abs().max((a[1] - b[1]).abs()));
        }
        prev = cur;
    }
    Ok((worst <= 1e-12, format!("V_(m-1) is a prefix of V_m, m <= 6, gap {worst:.1e}")))
}

fn branch_ordering(_: SuiteSize, rng: &mut StdRng) -> Result<(bool, String)> {
    let mut bad = 0;
    for _ in 0..1000 {
        let z = rng.gen_range(-10.0..25.0 / 16.0);
        let (lo, hi) = inverse_branches_real(z);
        bad += usize::from(!(lo <= 0.625 && 0.625 <= hi));
    }
    Ok((bad == 0, format!("{bad} of 1000 out of order")))
}

fn closure(sz: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let mut ok = true;
    for m in 0..sz.max_level.min(3) {
        let fine = build_level_graph(m + 1)?.dense_spectrum()?;
        let coarse = build_level_graph(m)?.dense_spectrum()?;
        ok &= fine.entries.iter().filter(|e| !is_forbidden(e.0)).all(|e| coarse.contains(apply_r_real(e.0), 1e-9));
    }
    Ok((ok, format!("m = 0..{}", sz.max_level.min(3) - 1)))
}

fn tree_matches_dense(sz: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let tree = generate_graph_spectrum(sz.max_level, false)?;
    for m in 1..=sz.max_level {
        compare_spectra(m, &tree.spectrum(m), &build_level_graph(m)?.dense_spectrum()?)?;
    }
    let initial_only = tree
        .levels
        .iter()
        .flatten()
        .filter(|e| is_forbidden(e.value))
        .all(|e| e.branch == Branch::Initial && e.parent.is_none());
    Ok((initial_only, format!("m <= {}; forbidden entries all initial: {initial_only}", sz.max_level)))
}

fn restriction(sz: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for m in 1..=sz.max_level.min(3) {
        worst = worst.max(verify_decimation_step(m)?.max_residual);
    }
    Ok((worst <= 1e-8, format!("max residual {worst:.2e}")))
}

fn limit_stability(_: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (m0, seed, signs) in [(0usize, 1.5, ""), (1, 1.25, "+-"), (2, 1.5, "-+")] {
        let base = limit_eigenvalue(&EigenSequence::new(m0, seed, signs)?, 1e-14)?;
        for extra in ["-", "---"] {
            let v = limit_eigenvalue(&EigenSequence::new(m0, seed, &format!("{signs}{extra}"))?, 1e-14)?;
            worst = worst.max((v - base).abs());
        }
    }
    Ok((worst <= 1e-10, format!("max drift {worst:.2e}")))
}

fn unit_determinant(sz: SuiteSize, rng: &mut StdRng) -> Result<(bool, String)> {
    let p = make_params(0.4)?;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let m = propagator(&p, rc(rng, 10.0), sz.max_depth)?.matrix;
        worst = worst.max((m.det() - 1.0).norm());
    }
    Ok((worst <= 1e-12, format!("max |det - 1| {worst:.2e}")))
}

fn functional_equation(_: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for alpha in [0.3, 0.4, 0.5] {
        worst = worst.max(functional_equation_residual(&make_params(alpha)?, &default_lambda_grid(), 18)?);
    }
    Ok((worst <= 1e-6, format!("depth 18, max distance {worst:.2e}")))
}

fn homogeneity(_: SuiteSize, rng: &mut StdRng) -> Result<(bool, String)> {
    let params = make_params(0.4)?;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = rp(rng)?;
        let b = rc(rng, 5.0);
        let [x, y, z] = p.coords();
        let Ok(scaled) = ProjPoint2::new(b * x, b * y, b * z) else { continue };
        let (Ok(u), Ok(v)) = (rho_map(&params, &p), rho_map(&params, &scaled)) else { continue };
        worst = worst.max(u.distance(&v));
    }
    Ok((worst <= 1e-12, format!("max distance {worst:.2e}")))
}

fn basin(_: SuiteSize, rng: &mut StdRng) -> Result<(bool, String)> {
    let mut worst = 0;
    for delta in [1.5, 2.0] {
        let map = RenormalizationMap::new(delta)?;
        for _ in 0..20 {
            match map.steps_to_attractor(&map.d_point(rc(rng, 20.0)), 1e-6, 100)? {
                Some(k) => worst = worst.max(k),
                None => return Ok((false, format!("δ = {delta}: no convergence in 100 steps"))),
            }
        }
    }
    Ok((true, format!("at most {worst} steps")))
}

fn ladder_and_certificates(_: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let p = make_params(0.5)?;
    let s = generating_set(&p, 1000.0, 500, 18)?;
    let ladder = ladder_spectrum(&p, Blowup::Finite(0), 1000.0, &s)?;
    let worst = (1..=10)
        .map(|j| {
            let want = (PI * j as f64).powi(2);
            ladder.entries.get(j - 1).map_or(f64::INFINITY, |e| (e.value - want).abs() / want)
        })
        .fold(0.0, f64::max);
    let certified = s.sign_change_certificates(&p, 1e-12)?.iter().all(|&c| c);
    Ok((worst <= 1e-6 && certified, format!("π²j² rel err {worst:.2e}, sign changes certified: {certified}")))
}

fn schur_oracle(_: SuiteSize, rng: &mut StdRng) -> Result<(bool, String)> {
    let (mut proj, mut u0e, mut inv) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let (u0, u1) = (rc(rng, 5.0), rc(rng, 5.0));
        let (Ok(t), Ok((a, _))) = (trace_form(&SymGForm::new(u0, u1)), trace_map_closed_form(u0, u1)) else { continue };
        let img = g_map(&ProjPoint1::new(u0, u1)?)?;
        proj = proj.max(img.distance(&ProjPoint1::new(t.coords.0, t.coords.1)?));
        u0e = u0e.max((t.coords.0 - a).norm() / a.norm().max(1.0));
        inv = inv.max(t.invariance_residual / (u0.norm() + u1.norm()));
    }
    let ok = proj <= 1e-10 && u0e <= 1e-12 && inv <= 1e-10;
    Ok((ok, format!("projective {proj:.2e}, u0' {u0e:.2e}, invariance {inv:.2e}")))
}

fn fixed_rays(_: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let a = ProjPoint1::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0))?;
    let b = ProjPoint1::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0))?;
    let d = g_map(&a)?.distance(&a).max(g_map(&b)?.distance(&b));
    Ok((d <= 1e-15, format!("[0:1], [1:1] moved by {d:.1e}")))
}

fn conjugacies(_: SuiteSize, rng: &mut StdRng) -> Result<(bool, String)> {
    let (mut r1, mut r2) = (0.0f64, 0.0f64);
    let mut n = 0;
    while n < 100 {
        let z = rc(rng, 2.0);
        if z.norm() > 2.0 || CONJUGACY_POLES.iter().any(|&p| (z - p).norm() <= 0.1) {
            continue;
        }
        let r = conjugacy_checks(z)?;
        r1 = r1.max(r.r1);
        r2 = r2.max(r.r2);
        n += 1;
    }
    Ok((r1 <= 1e-12 && r2 <= 1e-12, format!("M∘g = p∘M {r1:.2e}, p(-2z) = -2R(z) {r2:.2e}")))
}

// The 1e-6 budget on π^s ζ_ρ needs depth 16 even in quick mode.
fn riemann(_: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let p = make_params(0.5)?;
    let s = generating_set(&p, 2e5, 4000, 16)?;
    let mut worst = 0.0f64;
    for (x, z) in [(2.0, PI * PI / 6.0), (4.0, PI.powi(4) / 90.0), (6.0, PI.powi(6) / 945.0)] {
        let v = zeta_rho(&p, C64::new(x, 0.0), &s, RhoMode::Identity)?;
        worst = worst.max((PI.powf(x) * v.value.re - z).abs());
    }
    Ok((worst <= 1e-6, format!("max |π^s ζ_ρ - ζ| {worst:.2e}")))
}

fn factorization(sz: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let p = make_params(0.4)?;
    let s = generating_set(&p, 2e4, 4000, sz.max_depth)?;
    let mut worst = 0.0f64;
    for x in [C64::new(2.5, 0.0), C64::new(4.0, 0.0), C64::new(3.0, 2.0)] {
        let z0 = zeta_h_n(&p, x, 0, &s)?.value;
        for n in 1..=3u32 {
            let want = (x / 2.0 * n as f64 * p.gamma.ln()).exp();
            worst = worst.max((zeta_h_n(&p, x, n, &s)?.value / z0 - want).norm() / want.norm());
        }
    }
    Ok((worst <= 1e-12, format!("max relative deviation {worst:.2e}")))
}

fn zeta_r_positive(sz: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let mut ok = true;
    let mut prev = f64::INFINITY;
    for x in [1.0, 1.5, 2.0, 3.0, 4.0, 6.0] {
        let a = zeta_r(0.75, C64::new(x, 0.0), sz.max_depth)?.value;
        let b = zeta_r(1.25, C64::new(x, 0.0), sz.max_depth)?.value;
        ok &= a.re > 0.0 && a.im == 0.0 && b.re > 0.0 && b.im == 0.0 && b.re < prev;
        prev = b.re;
    }
    let c = zeta_r(0.75, C64::new(4.0, 0.0), sz.max_depth)?;
    let cauchy = c.error / c.value.norm();
    ok &= cauchy <= 1e-8;
    Ok((ok, format!("positive; z0 = 5/4 decreasing in s; depth {} step {cauchy:.2e}", sz.max_depth)))
}

fn poles(_: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let mut ok = true;
    let mut count = 0;
    for coeff in [1.0, 3.0] {
        let f = GeometricFactor::new(5.0, coeff)?;
        for p in pole_lattice(&f, &Window::symmetric_im(-10.0, 10.0, 20.0)) {
            ok &= sg_pole_family(&f, &p).is_some();
            count += 1;
        }
    }
    Ok((ok, format!("{count} poles")))
}

fn hyperfunction(_: SuiteSize, _: &mut StdRng) -> Result<(bool, String)> {
    let h = delta_hyperfunction();
    let mut worst = 0.0f64;
    for k in 0..=5 {
        worst = worst.max((pairing(&h, |z| z.powi(k), 0.8, 1.25, 4096)? - 1.0).norm());
    }
    Ok((worst <= 1e-8, format!("max error {worst:.2e}")))
}

const CHECKS: &[Check] = &[
    ("numerics-core", "normalization idempotent", normalize_idempotent),
    ("numerics-core", "triangle inequality", triangle),
    ("numerics-core", "contour integrals of monomials", contour_monomials),
    ("sg-graph", "energy invariance", energy_invariance),
    ("sg-graph", "spectral bound and kernel", spectral_bound_and_kernel),
    ("sg-graph", "1/2 localization", half_localization),
    ("sg-graph", "vertex nesting", nesting),
    ("sg-decimation", "branch ordering", branch_ordering),
    ("sg-decimation", "closure under R", closure),
    ("sg-decimation", "tree equals dense oracle", tree_matches_dense),
    ("sg-decimation", "eigenvector restriction", restriction),
    ("sg-decimation", "limit stability", limit_stability),
    ("sl-operator", "unit determinant", unit_determinant),
    ("sl-operator", "functional equation", functional_equation),
    ("sl-operator", "ρ homogeneity", homogeneity),
    ("sl-operator", "basin of [0,1,0]", basin),
    ("sl-operator", "ladder and root certificates", ladder_and_certificates),
    ("lattice-trace", "Schur complement against g", schur_oracle),
    ("lattice-trace", "fixed rays", fixed_rays),
    ("lattice-trace", "conjugacies", conjugacies),
    ("zeta-engine", "Riemann identity", riemann),
    ("zeta-engine", "ladder factorization", factorization),
    ("zeta-engine", "preimage sums", zeta_r_positive),
    ("zeta-engine", "pole lattice", poles),
    ("zeta-engine", "delta pairing", hyperfunction),
];

/// Runs every check with a fixed seed; errors become failed rows.
pub fn run_suite(quick: bool) -> Vec<CheckRow> {
    let size = SuiteSize::new(quick);
    let mut rng = StdRng::seed_from_u64(0x5eed);
    CHECKS
        .iter()
        .map(|(module, check, f)| {
            let (passed, detail) = f(size, &mut rng).unwrap_or_else(|e| (false, format!("{}: {e}", e.name())));
            CheckRow { module: module.to_string(), check: check.to_string(), passed, detail }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let rows = run_suite(true);
        let failed: Vec<_> = rows.iter().filter(|r| !r.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert_eq!(rows.len(), CHECKS.len());
    }
}

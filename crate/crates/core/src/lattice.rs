//! Blow-up graphs of the gasket, `G`-invariant quadratic forms on three
//! points, and the trace map obtained by Schur complement.

use serde::{Deserialize, Serialize};

use crate::decimation::apply_r;
use crate::error::{Error, Result};
use crate::numerics::{ProjPoint1, C64};
use crate::sg::build_level_graph;

pub const MAX_BLOWUP: usize = 6;

/// The form `u0 P_0 + u1 P_1`, with `P_0` the projection onto constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymGForm {
    pub u0: C64,
    pub u1: C64,
}

impl SymGForm {
    pub fn new(u0: C64, u1: C64) -> Self {
        SymGForm { u0, u1 }
    }

    /// `(diagonal, off-diagonal)` of `u1 I + (u0 - u1)/3 J`.
    pub fn entries(&self) -> (C64, C64) {
        ((self.u0 + 2.0 * self.u1) / 3.0, (self.u0 - self.u1) / 3.0)
    }

    pub fn matrix(&self) -> CMatrix {
        let (d, o) = self.entries();
        let mut m = CMatrix::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                m.set(i, j, if i == j { d } else { o });
            }
        }
        m
    }
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> CMatrix {
        assert_eq!(rows.len(), cols.len());
        let mut m = CMatrix::zeros(rows.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut w = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                w = w.max((self.get(i, j) - self.get(j, i)).norm());
            }
        }
        w
    }

    fn scale(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// LU factorization with partial pivoting of a square block.
struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    det: C64,
}

impl Lu {
    fn new(m: &CMatrix) -> Result<Self> {
        let n = m.n;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut det = C64::new(1.0, 0.0);
        let tiny = 1e-14 * m.scale().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let p = (k..n).max_by(|&a, &b| lu[a * n + k].norm().total_cmp(&lu[b * n + k].norm())).unwrap();
            if lu[p * n + k].norm() <= tiny {
                return Err(Error::SingularInterior);
            }
            if p != k {
                for j in 0..n {
                    lu.swap(p * n + j, k * n + j);
                }
                perm.swap(p, k);
                det = -det;
            }
            let piv = lu[k * n + k];
            det *= piv;
            for i in k + 1..n {
                let f = lu[i * n + k] / piv;
                lu[i * n + k] = f;
                for j in k + 1..n {
                    let v = lu[k * n + j];
                    lu[i * n + j] -= f * v;
                }
            }
        }
        Ok(Lu { n, lu, perm, det })
    }

    fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let v = self.lu[i * n + j] * x[j];
                x[i] -= v;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let v = self.lu[i * n + j] * x[j];
                x[i] -= v;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeGraph {
    pub level: usize,
    pub vertices: Vec<[f64; 2]>,
    pub edges: Vec<[usize; 2]>,
    pub boundary: [usize; 3],
    /// 1 on the boundary, 2 elsewhere.
    pub masses: Vec<f64>,
}

/// `F_<n>`: the level-n gasket graph scaled by `2^n`.
pub fn blowup_graph(n: usize) -> Result<LatticeGraph> {
    if n > MAX_BLOWUP {
        return Err(Error::LevelTooLarge { level: n, max: MAX_BLOWUP });
    }
    let g = build_level_graph(n)?;
    let s = (1u64 << n) as f64;
    let vertices = g.vertices().into_iter().map(|[x, y]| [s * x, s * y]).collect();
    let masses = (0..g.vertex_count()).map(|v| if v < 3 { 1.0 } else { 2.0 }).collect();
    Ok(LatticeGraph { level: n, vertices, edges: g.edges().to_vec(), boundary: g.boundary(), masses })
}

/// The three triangles of `F_<1>`; vertices 3, 4, 5 are the junctions
/// between corners (0,1), (1,2) and (2,0).
pub const F1_TRIANGLES: [[usize; 3]; 3] = [[0, 3, 5], [3, 1, 4], [5, 4, 2]];
pub const F1_BOUNDARY: [usize; 3] = [0, 1, 2];

/// `Q_<1>`: one copy of `q` on each triangle of `F_<1>`.
pub fn assemble_q1(q: &SymGForm) -> CMatrix {
    let local = q.matrix();
    let mut m = CMatrix::zeros(6);
    for tri in F1_TRIANGLES {
        for (a, &i) in tri.iter().enumerate() {
            for (b, &j) in tri.iter().enumerate() {
                m.set(i, j, m.get(i, j) + local.get(a, b));
            }
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceResult {
    pub schur: CMatrix,
    /// `(u0', u1')` read off as row sum and diagonal minus off-diagonal.
    pub coords: (C64, C64),
    /// Distance of the complement from the nearest `aI + bJ`; zero when it
    /// commutes with every corner permutation.
    pub invariance_residual: f64,
    /// Determinant of the interior block.
    pub interior_det: C64,
}

impl TraceResult {
    pub fn is_g_invariant(&self, tol: f64) -> bool {
        self.invariance_residual <= tol
    }
}

/// `Q_BB - Q_BI Q_II^{-1} Q_IB` for a 3-point boundary.
pub fn schur_trace(m: &CMatrix, boundary: [usize; 3]) -> Result<TraceResult> {
    let interior: Vec<usize> = (0..m.dim()).filter(|i| !boundary.contains(i)).collect();
    let lu = Lu::new(&m.submatrix(&interior, &interior))?;
    let mut s = m.submatrix(&boundary, &boundary);
    // Columns of Q_II^{-1} Q_IB, one per boundary vertex.
    let cols: Vec<Vec<C64>> = boundary
        .iter()
        .map(|&b| lu.solve(&interior.iter().map(|&i| m.get(i, b)).collect::<Vec<_>>()))
        .collect();
    for (a, &bi) in boundary.iter().enumerate() {
        for (c, col) in cols.iter().enumerate() {
            let corr: C64 = interior.iter().zip(col).map(|(&i, x)| m.get(bi, i) * x).sum();
            s.set(a, c, s.get(a, c) - corr);
        }
    }
    let diag = (s.get(0, 0) + s.get(1, 1) + s.get(2, 2)) / 3.0;
    let off = (s.get(0, 1) + s.get(0, 2) + s.get(1, 0) + s.get(1, 2) + s.get(2, 0) + s.get(2, 1)) / 6.0;
    let mut resid = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { diag } else { off };
            resid = resid.max((s.get(i, j) - want).norm());
        }
    }
    Ok(TraceResult { coords: (diag + 2.0 * off, diag - off), schur: s, invariance_residual: resid, interior_det: lu.det })
}

/// Trace of a `G`-invariant form through `F_<1>`.
pub fn trace_form(q: &SymGForm) -> Result<TraceResult> {
    schur_trace(&assemble_q1(q), F1_BOUNDARY)
}

fn chart_guard(den: C64, scale: f64) -> Result<()> {
    if den.norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::ProjectiveInfinity);
    }
    Ok(())
}

/// `(3u0u1/(2u0+u1), u1(u0+u1)/(5u1+u0))`, as printed in the literature.
pub fn trace_map_closed_form(u0: C64, u1: C64) -> Result<(C64, C64)> {
    let scale = u0.norm() + u1.norm();
    let d1 = 2.0 * u0 + u1;
    let d2 = 5.0 * u1 + u0;
    chart_guard(d1, scale)?;
    chart_guard(d2, scale)?;
    Ok((3.0 * u0 * u1 / d1, u1 * (u0 + u1) / d2))
}

/// `g([z0:z1]) = [z0(5z1+z0) : (2z0+z1)(z0+z1)]`.
pub fn g_map(p: &ProjPoint1) -> Result<ProjPoint1> {
    let [z0, z1] = p.normalized().coords();
    let w0 = z0 * (5.0 * z1 + z0);
    let w1 = (2.0 * z0 + z1) * (z0 + z1);
    if w0.norm() <= 1e-14 && w1.norm() <= 1e-14 {
        return Err(Error::IndeterminacyPoint);
    }
    Ok(ProjPoint1::new(w0, w1)?.normalized())
}

pub fn m_chart(z: C64) -> C64 {
    3.0 * z / (1.0 - z)
}

/// `g` in the affine chart `z = z0/z1`.
pub fn g_affine(z: C64) -> C64 {
    z * (5.0 + z) / ((2.0 * z + 1.0) * (z + 1.0))
}

/// `g` written in the coordinate `v = M(z)`.
pub fn big_g(v: C64) -> C64 {
    3.0 * v * (2.0 * v + 5.0) / ((3.0 * v + 3.0) * (2.0 * v + 3.0))
}

pub fn p_poly(v: C64) -> C64 {
    v * (2.0 * v + 5.0)
}

/// Poles of the maps composed in [`conjugacy_checks`].
pub const CONJUGACY_POLES: [f64; 3] = [1.0, -0.5, -1.0];
const POLE_TOL: f64 = 1e-8;

/// Residuals are `|lhs - rhs| / max(1, |lhs|, |rhs|)`, so values near the
/// poles are held to the accuracy their magnitude allows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyResiduals {
    /// `|M(g(z)) - p(M(z))|`: `M` conjugates `g` to `p(v) = v(2v+5)`.
    pub r1: f64,
    /// `|p(-2z) + 2R(z)|`: `p` and `R` are affinely conjugate.
    pub r2: f64,
    /// `|G(M(z)) - g(z)|`: `G` is `g` in the `v` coordinate.
    pub chart: f64,
    /// `|M(g(z)) - G(M(z))|`, which is not an identity and is reported for reference.
    pub literal: f64,
}

fn scaled_gap(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

pub fn conjugacy_checks(z: C64) -> Result<ConjugacyResiduals> {
    if CONJUGACY_POLES.iter().any(|&p| (z - p).norm() < POLE_TOL) {
        return Err(Error::PoleEncountered(z.to_string()));
    }
    let mz = m_chart(z);
    let gz = g_affine(z);
    let mgz = m_chart(gz);
    let gmz = big_g(mz);
    Ok(ConjugacyResiduals {
        r1: scaled_gap(mgz, p_poly(mz)),
        r2: scaled_gap(p_poly(-2.0 * z), -2.0 * apply_r(z)),
        chart: scaled_gap(gmz, gz),
        literal: scaled_gap(mgz, gmz),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn blowup_examples() {
        let g = blowup_graph(0).unwrap();
        assert_eq!((g.vertices.len(), g.masses.clone()), (3, vec![1.0; 3]));
        let g = blowup_graph(1).unwrap();
        assert_eq!(g.masses, vec![1.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
        assert_eq!(g.vertices[1], [2.0, 0.0]);
        assert_eq!(blowup_graph(2).unwrap().vertices.len(), 15);
        assert_eq!(blowup_graph(7).unwrap_err().name(), "LevelTooLarge");
    }

    #[test]
    fn f1_triangles_match_level_one_cells() {
        let g = build_level_graph(1).unwrap();
        assert_eq!(g.cells(1), &F1_TRIANGLES[..]);
    }

    #[test]
    fn assemble_examples() {
        let m = assemble_q1(&SymGForm::new(c(1.0, 0.0), c(1.0, 0.0)));
        for i in 0..6 {
            for j in 0..6 {
                let want = if i != j { 0.0 } else if i < 3 { 1.0 } else { 2.0 };
                assert_eq!(m.get(i, j), c(want, 0.0));
            }
        }
        let m = assemble_q1(&SymGForm::new(c(0.0, 0.0), c(3.0, 0.0)));
        let mut edges = 0;
        for i in 0..6 {
            assert_eq!(m.get(i, i), c(if i < 3 { 2.0 } else { 4.0 }, 0.0));
            for j in 0..6 {
                if i != j && m.get(i, j) != c(0.0, 0.0) {
                    assert_eq!(m.get(i, j), c(-1.0, 0.0));
                    edges += 1;
                }
            }
        }
        assert_eq!(edges, 18);
    }

    #[test]
    fn schur_examples() {
        let t = trace_form(&SymGForm::new(c(0.0, 0.0), c(3.0, 0.0))).unwrap();
        assert!(t.coords.0.norm() < 1e-14);
        assert!((t.coords.1 - 1.8).norm() < 1e-14);
        let t = trace_form(&SymGForm::new(c(1.0, 0.0), c(1.0, 0.0))).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(t.schur.get(i, j), c(if i == j { 1.0 } else { 0.0 }, 0.0));
            }
        }
        let e = trace_form(&SymGForm::new(c(0.0, 0.0), c(0.0, 0.0))).unwrap_err();
        assert_eq!(e, Error::SingularInterior);
    }

    #[test]
    fn closed_form_examples() {
        let (a, b) = trace_map_closed_form(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((a - 1.0).norm() < 1e-15 && (b - 1.0 / 3.0).norm() < 1e-15);
        let (a, b) = trace_map_closed_form(c(0.0, 0.0), c(3.0, 0.0)).unwrap();
        assert!(a.norm() < 1e-15 && (b - 0.6).norm() < 1e-15);
        assert_eq!(trace_map_closed_form(c(1.0, 0.0), c(-2.0, 0.0)).unwrap_err(), Error::ProjectiveInfinity);
    }

    #[test]
    fn g_examples() {
        let p = ProjPoint1::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(g_map(&p).unwrap().distance(&p) < 1e-15);
        let q = ProjPoint1::new(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(g_map(&q).unwrap().distance(&q) < 1e-15);
    }

    #[test]
    fn conjugacy_examples() {
        let r = conjugacy_checks(c(0.0, 0.0)).unwrap();
        assert_eq!((r.r1, r.r2), (0.0, 0.0));
        // z = 1 is a pole of M but r2 alone would vanish there.
        assert!((p_poly(c(-2.0, 0.0)) + 2.0 * apply_r(c(1.0, 0.0))).norm() == 0.0);
        assert_eq!(conjugacy_checks(c(1.0, 0.0)).unwrap_err().name(), "PoleEncountered");
        // The literal composition M∘g = G∘M fails away from 0.
        assert!(conjugacy_checks(c(0.3, 0.0)).unwrap().literal > 1e-3);
    }

    fn cplx(r: f64) -> impl Strategy<Value = C64> {
        (-r..r, -r..r).prop_map(|(a, b)| c(a, b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn schur_matches_g(u0 in cplx(5.0), u1 in cplx(5.0)) {
            let Ok(t) = trace_form(&SymGForm::new(u0, u1)) else { return Ok(()) };
            let Ok(src) = ProjPoint1::new(u0, u1) else { return Ok(()) };
            let img = g_map(&src).unwrap();
            let via_schur = ProjPoint1::new(t.coords.0, t.coords.1).unwrap();
            prop_assert!(img.distance(&via_schur) <= 1e-10);
            prop_assert!(t.is_g_invariant(1e-10 * (u0.norm() + u1.norm())));
            prop_assert!(t.schur.max_asymmetry() <= 1e-12 * (u0.norm() + u1.norm()));
            if let Ok((a, b)) = trace_map_closed_form(u0, u1) {
                prop_assert!((t.coords.0 - a).norm() <= 1e-12 * a.norm().max(1.0));
                prop_assert!((t.coords.1 - 3.0 * b).norm() <= 1e-12 * b.norm().max(1.0));
            }
        }

        #[test]
        fn assembled_matrix_symmetric_and_relabel_invariant(u0 in cplx(5.0), u1 in cplx(5.0)) {
            let m = assemble_q1(&SymGForm::new(u0, u1));
            prop_assert_eq!(m.max_asymmetry(), 0.0);
            // Rotating corners 0→1→2 sends junctions 3→4→5.
            let rot = [1, 2, 0, 4, 5, 3];
            for i in 0..6 {
                for j in 0..6 {
                    prop_assert_eq!(m.get(rot[i], rot[j]), m.get(i, j));
                }
            }
        }

        #[test]
        fn conjugacies_vanish(z in cplx(2.0)) {
            prop_assume!(z.norm() <= 2.0 && CONJUGACY_POLES.iter().all(|&p| (z - p).norm() > 0.1));
            let r = conjugacy_checks(z).unwrap();
            prop_assert!(r.r1 <= 1e-12, "r1 = {}", r.r1);
            prop_assert!(r.r2 <= 1e-12, "r2 = {}", r.r2);
            prop_assert!(r.chart <= 1e-12, "chart = {}", r.chart);
        }
    }
}

//! Projective points, 2x2 complex matrices, bisection and trapezoid contour
//! integration.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerances shared by the engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Projective equality threshold on [`proj_distance`].
    pub eq_tol: f64,
    /// Bracket width for [`bisect_root`].
    pub root_tol: f64,
    /// Series truncation threshold.
    pub sum_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eq_tol: 1e-9, root_tol: 1e-12, sum_tol: 1e-10 }
    }
}

impl Tolerances {
    pub fn new(eq_tol: f64, root_tol: f64, sum_tol: f64) -> Result<Self> {
        for (name, v) in [("eq_tol", eq_tol), ("root_tol", root_tol), ("sum_tol", sum_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Tolerances { eq_tol, root_tol, sum_tol })
    }
}

fn argmax_modulus(c: &[C64]) -> usize {
    // Strict comparison keeps the lowest index on ties.
    let mut best = 0;
    for i in 1..c.len() {
        if c[i].norm() > c[best].norm() {
            best = i;
        }
    }
    best
}

fn check_coords(c: &[C64]) -> Result<()> {
    if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidProjectivePoint);
    }
    if c.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::InvalidProjectivePoint);
    }
    Ok(())
}

fn normalize_coords<const N: usize>(c: [C64; N]) -> [C64; N] {
    let k = argmax_modulus(&c);
    let pivot = c[k];
    let mut out = c.map(|z| z / pivot);
    out[k] = C64::new(1.0, 0.0);
    out
}

/// sin of the Hermitian angle between two lines, from the wedge norm.
///
/// Inputs are rescaled to unit max-modulus first so that nothing overflows.
fn wedge_sine<const N: usize>(p: &[C64; N], q: &[C64; N]) -> f64 {
    let sp = p[argmax_modulus(p)].norm();
    let sq = q[argmax_modulus(q)].norm();
    let p = p.map(|z| z / sp);
    let q = q.map(|z| z / sq);
    let mut wedge = 0.0;
    for i in 0..N {
        for j in i + 1..N {
            wedge += (p[i] * q[j] - p[j] * q[i]).norm_sqr();
        }
    }
    let np: f64 = p.iter().map(|z| z.norm_sqr()).sum();
    let nq: f64 = q.iter().map(|z| z.norm_sqr()).sum();
    (wedge / (np * nq)).sqrt().min(1.0)
}

/// Point of the complex projective plane.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProjPoint2 {
    coords: [C64; 3],
}

impl ProjPoint2 {
    pub fn new(x: C64, y: C64, z: C64) -> Result<Self> {
        let coords = [x, y, z];
        check_coords(&coords)?;
        Ok(ProjPoint2 { coords })
    }

    pub fn real(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(C64::new(x, 0.0), C64::new(y, 0.0), C64::new(z, 0.0))
    }

    /// Raw homogeneous coordinates, as stored.
    pub fn coords(&self) -> [C64; 3] {
        self.coords
    }

    /// Representative whose largest-modulus coordinate is exactly 1.
    pub fn normalized(&self) -> Self {
        ProjPoint2 { coords: normalize_coords(self.coords) }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        wedge_sine(&self.coords, &other.coords)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.distance(other) <= tol
    }
}

impl PartialEq for ProjPoint2 {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, Tolerances::default().eq_tol)
    }
}

/// Point of the complex projective line.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProjPoint1 {
    coords: [C64; 2],
}

impl ProjPoint1 {
    pub fn new(z0: C64, z1: C64) -> Result<Self> {
        let coords = [z0, z1];
        check_coords(&coords)?;
        Ok(ProjPoint1 { coords })
    }

    pub fn coords(&self) -> [C64; 2] {
        self.coords
    }

    pub fn normalized(&self) -> Self {
        ProjPoint1 { coords: normalize_coords(self.coords) }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        wedge_sine(&self.coords, &other.coords)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.distance(other) <= tol
    }
}

impl PartialEq for ProjPoint1 {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, Tolerances::default().eq_tol)
    }
}

pub fn proj_normalize(p: &ProjPoint2) -> ProjPoint2 {
    p.normalized()
}

pub fn proj_distance(p: &ProjPoint2, q: &ProjPoint2) -> f64 {
    p.distance(q)
}

/// Row-major 2x2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2C {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mat2C {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2C { a, b, c, d }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2C::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Mat2C::real(1.0, 0.0, 0.0, 1.0)
    }

    /// `diag(1, t)`, the dilation acting on the derivative component.
    pub fn dilation(t: f64) -> Self {
        Mat2C::real(1.0, 0.0, 0.0, t)
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn max_abs_diff(&self, o: &Mat2C) -> f64 {
        [self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, r: Mat2C) -> Mat2C {
        Mat2C {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

/// Bisection on a sign change. Returns the midpoint of the final bracket.
pub fn bisect_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if (flo * fhi).partial_cmp(&0.0) != Some(std::cmp::Ordering::Less) {
        return Err(Error::NoBracket { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket is down to adjacent floats
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `(1/2πi)∮ f(z) dz` over `|z| = radius` by the trapezoid rule.
pub fn contour_integral<F: Fn(C64) -> C64>(f: F, radius: f64, nodes: usize) -> Result<C64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if nodes < 16 {
        return Err(Error::InvalidArgument(format!("need at least 16 nodes, got {nodes}")));
    }
    // With z = r e^{iθ}, dz = i z dθ, so the integral is the mean of f(z) z.
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..nodes {
        let z = C64::from_polar(radius, 2.0 * PI * k as f64 / nodes as f64);
        let v = f(z) * z;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NumericOverflow(format!("integrand not finite at z = {z}")));
        }
        acc += v;
    }
    Ok(acc / nodes as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn normalize_examples() {
        let p = ProjPoint2::real(2.0, 0.0, 0.0).unwrap().normalized();
        assert_eq!(p.coords(), [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let p = ProjPoint2::new(c(0.0, 0.0), c(0.0, 3.0), c(0.0, 0.0)).unwrap().normalized();
        assert_eq!(p.coords()[1], c(1.0, 0.0));
        assert_eq!(p.coords()[0].norm(), 0.0);
        let p = ProjPoint2::real(1.0, 1.0, 1.0).unwrap().normalized();
        assert_eq!(p.coords(), [c(1.0, 0.0); 3]);
        assert_eq!(ProjPoint2::real(0.0, 0.0, 0.0).unwrap_err(), Error::InvalidProjectivePoint);
    }

    #[test]
    fn tie_broken_at_lowest_index() {
        let p = ProjPoint2::new(c(0.0, 0.0), c(0.0, 2.0), c(-2.0, 0.0)).unwrap().normalized();
        assert_eq!(p.coords()[1], c(1.0, 0.0));
        assert!((p.coords()[2] - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn distance_examples() {
        let e1 = ProjPoint2::real(1.0, 0.0, 0.0).unwrap();
        assert_eq!(e1.distance(&ProjPoint2::real(2.0, 0.0, 0.0).unwrap()), 0.0);
        assert_eq!(e1.distance(&ProjPoint2::real(0.0, 1.0, 0.0).unwrap()), 1.0);
        let d = e1.distance(&ProjPoint2::real(1.0, 1.0, 0.0).unwrap());
        assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn distance_resolves_nearby_points() {
        // The Gram form would return 0 here because of cancellation.
        let p = ProjPoint2::real(1.0, 1.0, 1.0).unwrap();
        let q = ProjPoint2::real(1.0, 1.0 + 1e-12, 1.0).unwrap();
        let d = p.distance(&q);
        assert!(d > 1e-13 && d < 1e-12, "{d}");
    }

    #[test]
    fn bisect_examples() {
        let r = bisect_root(|x| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(bisect_root(|x| x, -1.0, 1.0, 1e-12).unwrap(), 0.0);
        assert!(matches!(bisect_root(|x| x * x + 1.0, 0.0, 1.0, 1e-12), Err(Error::NoBracket { .. })));
    }

    #[test]
    fn contour_examples() {
        let v = contour_integral(|z| 1.0 / z, 1.0, 64).unwrap();
        assert!((v - 1.0).norm() < 1e-12);
        for r in [0.3, 1.0, 7.0] {
            let v = contour_integral(|_| c(1.0, 0.0), r, 64).unwrap();
            assert!(v.norm() < 1e-12);
        }
        let v = contour_integral(|z| 1.0 / (z - 1.0), 2.0, 4096).unwrap();
        assert!((v - 1.0).norm() < 1e-8);
        assert!(matches!(contour_integral(|z| 1.0 / (z - 1.0), 1.0, 64), Err(Error::NumericOverflow(_))));
    }

    #[test]
    fn contour_monomials() {
        for k in -3i32..=3 {
            let v = contour_integral(|z| z.powi(k), 1.0, 64).unwrap();
            let want = if k == -1 { 1.0 } else { 0.0 };
            assert!((v - want).norm() < 1e-10, "k={k}: {v}");
        }
    }

    #[test]
    fn mat_product_and_det() {
        let t = Mat2C::real(1.0, 0.5, 0.0, 1.0);
        let k = Mat2C::real(1.0, 0.0, -3.0, 1.0);
        let m = t * k * t;
        assert!((m.det() - 1.0).norm() < 1e-15);
        assert_eq!(Mat2C::identity() * m, m);
    }

    fn cplx() -> impl Strategy<Value = C64> {
        (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(r, i)| c(r, i))
    }

    fn point() -> impl Strategy<Value = ProjPoint2> {
        (cplx(), cplx(), cplx())
            .prop_filter_map("zero point", |(x, y, z)| ProjPoint2::new(x, y, z).ok())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn normalize_idempotent(p in point()) {
            let n1 = p.normalized();
            let n2 = n1.normalized();
            prop_assert_eq!(n1.coords(), n2.coords());
            prop_assert!(n1.distance(&p) <= 1e-12);
        }

        #[test]
        fn distance_triangle(p in point(), q in point(), r in point()) {
            let (pq, qr, pr) = (p.distance(&q), q.distance(&r), p.distance(&r));
            prop_assert!(pr <= pq + qr + 1e-12);
            prop_assert!((pq - q.distance(&p)).abs() <= 1e-15);
            prop_assert!((0.0..=1.0).contains(&pq));
        }

        #[test]
        fn distance_scale_invariant(p in point(), s in cplx()) {
            prop_assume!(s.norm() > 1e-3);
            let [x, y, z] = p.coords();
            let q = ProjPoint2::new(x * s, y * s, z * s).unwrap();
            prop_assert!(p.distance(&q) <= 1e-12);
        }
    }
}

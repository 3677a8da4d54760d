//! Level-m graph approximations of the Sierpinski gasket.
//!
//! Vertices are stored in integer barycentric coordinates with denominator
//! `2^MAX_LEVEL`, so junction points merge exactly and no rounding grid is
//! needed. Vertices of `V_{m-1}` form a prefix of `V_m`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::{jacobi_eigen, SymMatrix};

pub const MAX_LEVEL: usize = 8;
/// Largest matrix the dense oracle accepts.
pub const MAX_DENSE_VERTICES: usize = 2000;
/// Eigenvalues closer than this are merged into one multiplicity.
pub const GROUP_TOL: f64 = 1e-8;

const DENOM: u32 = 1 << MAX_LEVEL;
const SQRT3_2: f64 = 0.866_025_403_784_438_6;

pub fn vertex_count(m: usize) -> usize {
    3 * (3usize.pow(m as u32) + 1) / 2
}

#[derive(Debug, Clone)]
pub struct SGLevelGraph {
    level: usize,
    bary: Vec<[u32; 3]>,
    edges: Vec<[usize; 2]>,
    neighbours: Vec<Vec<usize>>,
    /// `cells[l]` lists the level-l cells as corner triples (images of q1, q2, q3).
    cells: Vec<Vec<[usize; 3]>>,
}

pub fn build_level_graph(m: usize) -> Result<SGLevelGraph> {
    if m > MAX_LEVEL {
        return Err(Error::LevelTooLarge { level: m, max: MAX_LEVEL });
    }
    let mut bary = vec![[DENOM, 0, 0], [0, DENOM, 0], [0, 0, DENOM]];
    let mut cells = vec![vec![[0usize, 1, 2]]];
    for _ in 0..m {
        let mut index: HashMap<[u32; 3], usize> = HashMap::new();
        let mut next = Vec::with_capacity(cells.last().unwrap().len() * 3);
        for &[a, b, c] in cells.last().unwrap() {
            let mut mid = |i: usize, j: usize| -> usize {
                let p = [0, 1, 2].map(|k| (bary[i][k] + bary[j][k]) / 2);
                *index.entry(p).or_insert_with(|| {
                    bary.push(p);
                    bary.len() - 1
                })
            };
            let ab = mid(a, b);
            let bc = mid(b, c);
            let ca = mid(c, a);
            next.push([a, ab, ca]);
            next.push([ab, b, bc]);
            next.push([ca, bc, c]);
        }
        cells.push(next);
    }
    let mut edges = Vec::with_capacity(3usize.pow(m as u32 + 1));
    let mut neighbours = vec![Vec::new(); bary.len()];
    for &[a, b, c] in cells.last().unwrap() {
        for (i, j) in [(a, b), (b, c), (c, a)] {
            edges.push([i.min(j), i.max(j)]);
            neighbours[i].push(j);
            neighbours[j].push(i);
        }
    }
    for n in &mut neighbours {
        n.sort_unstable();
    }
    Ok(SGLevelGraph { level: m, bary, edges, neighbours, cells })
}

impl SGLevelGraph {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn vertex_count(&self) -> usize {
        self.bary.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn boundary(&self) -> [usize; 3] {
        [0, 1, 2]
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.neighbours[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbours[v].len()
    }

    /// Cells of level `l ≤ m`, as corner triples.
    pub fn cells(&self, l: usize) -> &[[usize; 3]] {
        &self.cells[l]
    }

    /// Planar coordinates with q1=(0,0), q2=(1,0), q3=(1/2, √3/2).
    pub fn vertices(&self) -> Vec<[f64; 2]> {
        let d = DENOM as f64;
        self.bary
            .iter()
            .map(|&[_, j, k]| {
                let (j, k) = (j as f64 / d, k as f64 / d);
                [j + 0.5 * k, SQRT3_2 * k]
            })
            .collect()
    }

    /// Symmetrized `I - D^{-1/2} A D^{-1/2}`; same spectrum as `I - D^{-1} A`.
    pub fn laplacian_matrix(&self) -> SymMatrix {
        let n = self.vertex_count();
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        for &[i, j] in &self.edges {
            let w = -1.0 / ((self.degree(i) * self.degree(j)) as f64).sqrt();
            m.set(i, j, m.get(i, j) + w);
            m.set(j, i, m.get(j, i) + w);
        }
        m
    }

    /// `(-Δ_m f)(x) = f(x) - mean of f over the neighbours of x`.
    pub fn apply_laplacian(&self, f: &[f64]) -> Vec<f64> {
        self.neighbours
            .iter()
            .enumerate()
            .map(|(x, nb)| f[x] - nb.iter().map(|&y| f[y]).sum::<f64>() / nb.len() as f64)
            .collect()
    }

    fn dense_guard(&self) -> Result<()> {
        if self.vertex_count() > MAX_DENSE_VERTICES {
            // Level 7 is the first one over the cap.
            return Err(Error::LevelTooLarge { level: self.level, max: 6 });
        }
        Ok(())
    }

    pub fn dense_spectrum(&self) -> Result<SpectrumMultiset> {
        self.dense_guard()?;
        let e = jacobi_eigen(&self.laplacian_matrix())?;
        Ok(SpectrumMultiset::group(&e.values, GROUP_TOL))
    }

    /// Eigenpairs of `-Δ_m` itself (not of the symmetrized matrix). Vectors are
    /// orthonormal in the degree inner product `Σ deg(x) f(x) g(x)`.
    pub fn eigenpairs(&self) -> Result<Vec<(f64, Vec<f64>)>> {
        self.dense_guard()?;
        let e = jacobi_eigen(&self.laplacian_matrix())?;
        let scale: Vec<f64> = (0..self.vertex_count()).map(|v| (self.degree(v) as f64).sqrt()).collect();
        Ok(e.values
            .into_iter()
            .zip(e.vectors)
            .map(|(lam, w)| (lam, w.iter().zip(&scale).map(|(x, s)| x / s).collect()))
            .collect())
    }

    /// Spectrum of the block on non-boundary vertices (Dirichlet conditions on V_0).
    pub fn dirichlet_spectrum(&self) -> Result<SpectrumMultiset> {
        self.dense_guard()?;
        let full = self.laplacian_matrix();
        let n = full.dim() - 3;
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, full.get(i + 3, j + 3));
            }
        }
        let e = jacobi_eigen(&m)?;
        Ok(SpectrumMultiset::group(&e.values, GROUP_TOL))
    }

    /// Harmonic extension of boundary values `(a, b, c)` to `V_m`.
    pub fn harmonic_extend(&self, boundary: [f64; 3]) -> VertexFunction {
        let mut values = vec![0.0; self.vertex_count()];
        values[..3].copy_from_slice(&boundary);
        // Child cell i of [a,b,c] is [a,ab,ca], [ab,b,bc], [ca,bc,c]; the
        // midpoint opposite a corner gets 1/5 of it plus 2/5 of each other corner.
        for l in 0..self.level {
            for (parent, kids) in self.cells[l].iter().zip(self.cells[l + 1].chunks(3)) {
                let [a, b, c] = parent.map(|v| values[v]);
                let (ab, bc, ca) = (kids[0][1], kids[1][2], kids[0][2]);
                values[bc] = a / 5.0 + 2.0 * b / 5.0 + 2.0 * c / 5.0;
                values[ca] = b / 5.0 + 2.0 * c / 5.0 + 2.0 * a / 5.0;
                values[ab] = c / 5.0 + 2.0 * a / 5.0 + 2.0 * b / 5.0;
            }
        }
        VertexFunction { level: self.level, values }
    }

    /// Renormalized graph energy `(5/3)^m Σ_{x~y} (u(x) - u(y))^2`.
    pub fn energy(&self, u: &VertexFunction) -> Result<f64> {
        if u.level != self.level || u.values.len() != self.vertex_count() {
            return Err(Error::InvalidArgument(format!(
                "function on level {} with {} values does not fit level {}",
                u.level,
                u.values.len(),
                self.level
            )));
        }
        let raw: f64 = self.edges.iter().map(|&[i, j]| (u.values[i] - u.values[j]).powi(2)).sum();
        Ok((5.0f64 / 3.0).powi(self.level as i32) * raw)
    }

    pub fn to_export(&self) -> GraphExport {
        GraphExport {
            level: self.level,
            vertices: self.vertices(),
            edges: self.edges.clone(),
            boundary: self.boundary(),
        }
    }
}

/// JSON shape of an exported graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphExport {
    pub level: usize,
    pub vertices: Vec<[f64; 2]>,
    pub edges: Vec<[usize; 2]>,
    pub boundary: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexFunction {
    pub level: usize,
    pub values: Vec<f64>,
}

/// Sorted eigenvalues with multiplicities.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectrumMultiset {
    pub entries: Vec<(f64, usize)>,
}

impl SpectrumMultiset {
    /// Groups sorted-or-not raw eigenvalues; each group's value is its mean.
    pub fn group(values: &[f64], tol: f64) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let mut entries: Vec<(f64, usize)> = Vec::new();
        let mut sum = 0.0;
        for x in v {
            match entries.last_mut() {
                Some((mean, k)) if (x - *mean).abs() <= tol => {
                    sum += x;
                    *k += 1;
                    *mean = sum / *k as f64;
                }
                _ => {
                    sum = x;
                    entries.push((x, 1));
                }
            }
        }
        SpectrumMultiset { entries }
    }

    pub fn dimension(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn multiplicity_of(&self, value: f64, tol: f64) -> usize {
        self.entries.iter().filter(|e| (e.0 - value).abs() <= tol).map(|e| e.1).sum()
    }

    pub fn contains(&self, value: f64, tol: f64) -> bool {
        self.multiplicity_of(value, tol) > 0
    }
}

pub fn laplacian_matrix(g: &SGLevelGraph) -> SymMatrix {
    g.laplacian_matrix()
}

pub fn dense_spectrum(g: &SGLevelGraph) -> Result<SpectrumMultiset> {
    g.dense_spectrum()
}

pub fn eigenpairs(g: &SGLevelGraph) -> Result<Vec<(f64, Vec<f64>)>> {
    g.eigenpairs()
}

pub fn harmonic_extend(boundary: [f64; 3], m: usize) -> Result<VertexFunction> {
    Ok(build_level_graph(m)?.harmonic_extend(boundary))
}

/// Energy of a function on the level graph it was built for.
pub fn graph_energy(u: &VertexFunction) -> Result<f64> {
    build_level_graph(u.level)?.energy(u)
}

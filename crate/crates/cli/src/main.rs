mod cache;
mod parse;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fractal_spectra::decimation::{generate_graph_spectrum, limit_eigenvalue, EigenSequence};
use fractal_spectra::export::{fmt_float, ladder_csv, spectrum_csv, to_json, zeta_csv, Csv};
use fractal_spectra::lattice::{conjugacy_checks, g_map, trace_form, trace_map_closed_form, SymGForm, CONJUGACY_POLES};
use fractal_spectra::sg::{build_level_graph, harmonic_extend, SpectrumMultiset};
use fractal_spectra::sl::{
    functional_equation_residual, generating_set_with, ladder_spectrum, make_params, propagator, Blowup, GeneratingSet,
    SLParams,
};
use fractal_spectra::verify::run_suite;
use fractal_spectra::zeta::{
    pole_lattice, riemann_check, zeta_h_n, zeta_r, zeta_sg, zeta_unbounded, GeometricFactor, HyperBranch, Unbounded,
    Window,
};
use fractal_spectra::{Error, ProjPoint1, Tolerances, C64};

use cache::Cache;
use parse::{BlowupArg, LambdaGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(name = "fractal-spectra", version, about = "Spectra and spectral zeta functions of self-similar fractals")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Defaults to JSON, or to a text table for `verify`.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Overrides $FRACTAL_SPECTRA_CACHE.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    no_cache: bool,
    /// Tolerance for functional-equation checks.
    #[arg(long, global = true)]
    eq_tol: Option<f64>,
    /// Tolerance for root refinement.
    #[arg(long, global = true)]
    root_tol: Option<f64>,
    /// Target error for truncated zeta sums.
    #[arg(long, global = true)]
    sum_tol: Option<f64>,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Write a JSON run report (command, wall time, warnings) to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sierpinski gasket graph approximations.
    #[command(subcommand)]
    Sg(SgCmd),
    /// Fractal Sturm-Liouville operators on the interval.
    #[command(subcommand)]
    Sl(SlCmd),
    /// Trace map on the Sierpinski lattice.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Spectral zeta functions.
    #[command(subcommand)]
    Zeta(ZetaCmd),
    /// Invariant suites.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Decimation,
    Dense,
    Both,
}

#[derive(Subcommand)]
enum SgCmd {
    /// Vertices and edges of the level-m graph.
    Graph {
        #[arg(long)]
        level: usize,
    },
    /// Eigenvalues with multiplicities of the level-m Laplacian.
    Spectrum {
        #[arg(long)]
        level: usize,
        #[arg(long, value_enum, default_value = "decimation")]
        method: Method,
    },
    /// Harmonic extension of boundary values.
    Harmonic {
        #[arg(long, value_parser = parse::triple, allow_hyphen_values = true)]
        boundary: [f64; 3],
        #[arg(long)]
        level: usize,
    },
    /// Renormalized limit of an eigenvalue sequence.
    FractalEigenvalue {
        #[arg(long)]
        seed: f64,
        #[arg(long)]
        m0: usize,
        /// `+`/`-` string; a trailing `*` repeats the last sign.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        signs: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

#[derive(Args, Clone, Copy)]
struct ScanArgs {
    /// Depth of the measure discretization.
    #[arg(long, default_value_t = 16)]
    depth: u32,
    /// Initial number of scan points.
    #[arg(long, default_value_t = 4000)]
    grid: usize,
}

#[derive(Subcommand)]
enum SlCmd {
    /// Derived parameters for a given α.
    Params {
        #[arg(long)]
        alpha: f64,
    },
    /// Transfer matrix across the unit interval.
    Propagator {
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        lambda: C64,
        #[arg(long, default_value_t = 18)]
        depth: u32,
    },
    /// Roots generating the spectrum (cached).
    GeneratingSet {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        lambda_max: f64,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Eigenvalue ladder of a blow-up.
    Spectrum {
        #[arg(long)]
        alpha: f64,
        /// Blow-up level, or `inf` for the half-line.
        #[arg(long, value_parser = parse::blowup)]
        blowup: BlowupArg,
        #[arg(long)]
        lambda_max: f64,
        /// Smallest value listed for `--blowup inf`.
        #[arg(long)]
        floor: Option<f64>,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Residual of the renormalization identity on a λ grid.
    CheckFunctionalEquation {
        #[arg(long)]
        alpha: f64,
        /// Comma-separated λ values, or `default`.
        #[arg(long, value_parser = parse::lambda_grid, default_value = "default")]
        lambda_grid: LambdaGrid,
        #[arg(long, default_value_t = 18)]
        depth: u32,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// One step of the trace map.
    Trace {
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        u0: C64,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        u1: C64,
    },
    /// The map g on projective coordinates.
    G {
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        z0: C64,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        z1: C64,
    },
    /// Residuals of the conjugacy relations at random points.
    Conjugacy {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ZetaCmd {
    /// Preimage zeta sum of the decimation map.
    R {
        #[arg(long)]
        z0: f64,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        s: C64,
        #[arg(long, default_value_t = 20)]
        depth: u32,
    },
    /// Spectral zeta function of the gasket.
    Sg {
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        s: C64,
        #[arg(long, default_value_t = 20)]
        depth: u32,
    },
    /// Spectral zeta function of an interval operator or its blow-up.
    Sl {
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        s: C64,
        #[arg(long, conflicts_with = "unbounded")]
        n: Option<u32>,
        #[arg(long)]
        unbounded: bool,
        #[arg(long, default_value_t = 2e4)]
        lambda_max: f64,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Poles of a geometric factor inside a window.
    Poles {
        /// `BASE,COEFFICIENT` of `1/(1 - c·base^{-s/2})`.
        #[arg(long, value_parser = parse::pair)]
        factor: (f64, f64),
        #[arg(long, value_parser = parse::window, allow_hyphen_values = true)]
        window: [f64; 4],
    },
    /// Compare the α = 1/2 zeta with the Riemann zeta function.
    RiemannCheck {
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 2e5)]
        lambda_max: f64,
        #[command(flatten)]
        scan: ScanArgs,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Run every invariant check.
    All {
        /// Smaller levels and depths.
        #[arg(long)]
        quick: bool,
    },
}

/// What a command produced.
struct Emitted {
    text: String,
    values: usize,
    /// Nonzero exit even though output was produced.
    failed: bool,
}

impl Emitted {
    fn ok(text: String, values: usize) -> Self {
        Emitted { text, values, failed: false }
    }
}

#[derive(Serialize)]
struct RunReport {
    command: Vec<String>,
    wall_time_s: f64,
    values_emitted: usize,
    warnings: Vec<String>,
    error: Option<String>,
}

struct Ctx {
    format: Format,
    table: bool,
    tol: Tolerances,
    cache: Cache,
    warnings: Vec<String>,
}

impl Ctx {
    fn json<T: Serialize + ?Sized>(&self, v: &T, values: usize) -> Result<Emitted, Error> {
        Ok(Emitted::ok(to_json(v)?, values))
    }

    fn generating_set(&mut self, params: &SLParams, lambda_max: f64, scan: ScanArgs) -> Result<GeneratingSet, Error> {
        let key = json!({
            "module": "sl.generating_set",
            "alpha": params.alpha,
            "depth": scan.depth,
            "lambda_max": lambda_max,
            "grid": scan.grid,
            "root_tol": self.tol.root_tol,
        });
        let tol = self.tol;
        let (set, _) = self.cache.get_or_compute(key, || generating_set_with(params, lambda_max, scan.grid, scan.depth, &tol))?;
        Ok(set)
    }
}

fn c_pair(z: C64) -> [String; 2] {
    [fmt_float(z.re), fmt_float(z.im)]
}

fn spectrum_rows(dec: &SpectrumMultiset, dense: &SpectrumMultiset, eq_tol: f64) -> (Csv, Vec<Value>, bool) {
    let mut csv = Csv::new(&["eigenvalue", "multiplicity", "dense_eigenvalue", "dense_multiplicity", "match"]);
    let mut rows = Vec::new();
    let mut all = dec.entries.len() == dense.entries.len();
    for i in 0..dec.entries.len().max(dense.entries.len()) {
        let d = dec.entries.get(i);
        let o = dense.entries.get(i);
        let m = matches!((d, o), (Some(a), Some(b)) if (a.0 - b.0).abs() <= eq_tol && a.1 == b.1);
        all &= m;
        let cell = |e: Option<&(f64, usize)>, f: fn(&(f64, usize)) -> String| e.map(f).unwrap_or_default();
        csv.row(&[
            cell(d, |e| fmt_float(e.0)),
            cell(d, |e| e.1.to_string()),
            cell(o, |e| fmt_float(e.0)),
            cell(o, |e| e.1.to_string()),
            m.to_string(),
        ]);
        rows.push(json!({
            "eigenvalue": d.map(|e| e.0), "multiplicity": d.map(|e| e.1),
            "dense_eigenvalue": o.map(|e| e.0), "dense_multiplicity": o.map(|e| e.1), "match": m,
        }));
    }
    (csv, rows, all)
}

fn run_sg(cmd: SgCmd, ctx: &mut Ctx) -> Result<Emitted, Error> {
    match cmd {
        SgCmd::Graph { level } => {
            let g = build_level_graph(level)?;
            match ctx.format {
                Format::Json => ctx.json(&g.to_export(), g.vertex_count()),
                Format::Csv => {
                    let mut csv = Csv::new(&["i", "j"]);
                    for e in g.edges() {
                        csv.row(&[e[0].to_string(), e[1].to_string()]);
                    }
                    Ok(Emitted::ok(csv.finish(), g.edges().len()))
                }
            }
        }
        SgCmd::Spectrum { level, method } => {
            let decimated = || generate_graph_spectrum(level, false);
            let dense = || -> Result<_, Error> { build_level_graph(level)?.dense_spectrum() };
            match method {
                Method::Decimation => {
                    let tree = decimated()?;
                    let s = tree.spectrum(level);
                    match ctx.format {
                        Format::Json => ctx.json(&tree, s.entries.len()),
                        Format::Csv => Ok(Emitted::ok(spectrum_csv(&s), s.entries.len())),
                    }
                }
                Method::Dense => {
                    let s = dense()?;
                    match ctx.format {
                        Format::Json => ctx.json(&s, s.entries.len()),
                        Format::Csv => Ok(Emitted::ok(spectrum_csv(&s), s.entries.len())),
                    }
                }
                Method::Both => {
                    let d = decimated()?.spectrum(level);
                    let o = dense()?;
                    let (csv, rows, all) = spectrum_rows(&d, &o, ctx.tol.eq_tol);
                    if !all {
                        ctx.warnings.push(format!("decimation and dense spectra differ at level {level}"));
                    }
                    let n = rows.len();
                    match ctx.format {
                        Format::Json => ctx.json(&json!({"level": level, "match": all, "rows": rows}), n),
                        Format::Csv => Ok(Emitted::ok(csv.finish(), n)),
                    }
                }
            }
        }
        SgCmd::Harmonic { boundary, level } => {
            let g = build_level_graph(level)?;
            let u = harmonic_extend(boundary, level)?;
            let energy = g.energy(&u)?;
            match ctx.format {
                Format::Json => ctx.json(&json!({"level": level, "boundary": boundary, "energy": energy, "values": u.values}), u.values.len()),
                Format::Csv => {
                    let mut csv = Csv::new(&["index", "x", "y", "value"]);
                    for (i, (p, v)) in g.vertices().iter().zip(&u.values).enumerate() {
                        csv.row(&[i.to_string(), fmt_float(p[0]), fmt_float(p[1]), fmt_float(*v)]);
                    }
                    Ok(Emitted::ok(csv.finish(), u.values.len()))
                }
            }
        }
        SgCmd::FractalEigenvalue { seed, m0, signs, tol } => {
            let seq = EigenSequence::new(m0, seed, &signs)?;
            let value = limit_eigenvalue(&seq, tol)?;
            match ctx.format {
                Format::Json => ctx.json(&json!({"m0": m0, "seed": seed, "signs": signs, "tol": tol, "value": value}), 1),
                Format::Csv => {
                    let mut csv = Csv::new(&["value"]);
                    csv.row(&[fmt_float(value)]);
                    Ok(Emitted::ok(csv.finish(), 1))
                }
            }
        }
    }
}

fn run_sl(cmd: SlCmd, ctx: &mut Ctx) -> Result<Emitted, Error> {
    match cmd {
        SlCmd::Params { alpha } => {
            let p = make_params(alpha)?;
            match ctx.format {
                Format::Json => ctx.json(&p, 4),
                Format::Csv => {
                    let mut csv = Csv::new(&["alpha", "b", "delta", "gamma"]);
                    csv.row(&[fmt_float(p.alpha), fmt_float(p.b), fmt_float(p.delta), fmt_float(p.gamma)]);
                    Ok(Emitted::ok(csv.finish(), 4))
                }
            }
        }
        SlCmd::Propagator { alpha, lambda, depth } => {
            let p = make_params(alpha)?;
            let m = propagator(&p, lambda, depth)?.matrix;
            let det = m.det();
            match ctx.format {
                Format::Json => ctx.json(&json!({"alpha": alpha, "lambda": lambda, "depth": depth, "a": m.a, "b": m.b, "c": m.c, "d": m.d, "det": det}), 5),
                Format::Csv => {
                    let mut csv = Csv::new(&["entry", "re", "im"]);
                    for (name, z) in [("a", m.a), ("b", m.b), ("c", m.c), ("d", m.d), ("det", det)] {
                        let [r, i] = c_pair(z);
                        csv.row(&[name.to_string(), r, i]);
                    }
                    Ok(Emitted::ok(csv.finish(), 5))
                }
            }
        }
        SlCmd::GeneratingSet { alpha, lambda_max, scan } => {
            let p = make_params(alpha)?;
            let s = ctx.generating_set(&p, lambda_max, scan)?;
            match ctx.format {
                Format::Json => ctx.json(
                    &json!({"alpha": s.alpha, "depth": s.depth, "lambda_max": s.lambda_max, "grid_points": s.grid_points, "roots": s.roots}),
                    s.roots.len(),
                ),
                Format::Csv => {
                    let mut csv = Csv::new(&["k", "root"]);
                    for (k, r) in s.roots.iter().enumerate() {
                        csv.row(&[(k + 1).to_string(), fmt_float(*r)]);
                    }
                    Ok(Emitted::ok(csv.finish(), s.roots.len()))
                }
            }
        }
        SlCmd::Spectrum { alpha, blowup, lambda_max, floor, scan } => {
            let p = make_params(alpha)?;
            let (blowup, need) = match blowup {
                BlowupArg::Finite(n) => (Blowup::Finite(n), lambda_max * p.gamma.powi(n as i32)),
                BlowupArg::Infinite => (Blowup::Infinite { floor }, lambda_max),
            };
            let s = ctx.generating_set(&p, need, scan)?;
            let ladder = ladder_spectrum(&p, blowup, lambda_max, &s)?;
            let n = ladder.entries.len();
            match ctx.format {
                Format::Json => ctx.json(&ladder, n),
                Format::Csv => Ok(Emitted::ok(ladder_csv(&ladder), n)),
            }
        }
        SlCmd::CheckFunctionalEquation { alpha, lambda_grid: LambdaGrid(lambda_grid), depth } => {
            let p = make_params(alpha)?;
            let dists = lambda_grid
                .iter()
                .map(|&l| functional_equation_residual(&p, &[l], depth))
                .collect::<Result<Vec<_>, _>>()?;
            let max = dists.iter().copied().fold(0.0, f64::max);
            let passed = max <= 1e-6;
            if !passed {
                ctx.warnings.push(format!("functional equation residual {max:e} exceeds 1e-6"));
            }
            match ctx.format {
                Format::Json => {
                    let rows: Vec<_> = lambda_grid.iter().zip(&dists).map(|(l, d)| json!({"lambda": l, "distance": d})).collect();
                    ctx.json(&json!({"alpha": alpha, "depth": depth, "max_distance": max, "passed": passed, "rows": rows}), dists.len())
                }
                Format::Csv => {
                    let mut csv = Csv::new(&["lambda", "distance"]);
                    for (l, d) in lambda_grid.iter().zip(&dists) {
                        csv.row(&[fmt_float(*l), fmt_float(*d)]);
                    }
                    Ok(Emitted::ok(csv.finish(), dists.len()))
                }
            }
        }
    }
}

fn run_lattice(cmd: LatticeCmd, ctx: &mut Ctx) -> Result<Emitted, Error> {
    match cmd {
        LatticeCmd::Trace { u0, u1 } => {
            let t = trace_form(&SymGForm::new(u0, u1))?;
            let (a, b) = t.coords;
            let closed = match trace_map_closed_form(u0, u1) {
                Ok(v) => Some(v),
                Err(e @ Error::ProjectiveInfinity) => {
                    ctx.warnings.push(format!("closed form: {}", e.name()));
                    None
                }
                Err(e) => return Err(e),
            };
            let image = ProjPoint1::new(a, b)?.normalized().coords();
            match ctx.format {
                Format::Json => ctx.json(
                    &json!({"u0": u0, "u1": u1, "u0p": a, "u1p": b, "closed_form": closed, "projective": image, "invariance_residual": t.invariance_residual}),
                    2,
                ),
                Format::Csv => {
                    let mut csv = Csv::new(&["u0_re", "u0_im", "u1_re", "u1_im", "u0p_re", "u0p_im", "u1p_re", "u1p_im"]);
                    csv.row(&[c_pair(u0), c_pair(u1), c_pair(a), c_pair(b)].concat());
                    Ok(Emitted::ok(csv.finish(), 2))
                }
            }
        }
        LatticeCmd::G { z0, z1 } => {
            let img = g_map(&ProjPoint1::new(z0, z1)?)?.coords();
            match ctx.format {
                Format::Json => ctx.json(&json!({"z0": img[0], "z1": img[1]}), 2),
                Format::Csv => {
                    let mut csv = Csv::new(&["z0_re", "z0_im", "z1_re", "z1_im"]);
                    csv.row(&[c_pair(img[0]), c_pair(img[1])].concat());
                    Ok(Emitted::ok(csv.finish(), 2))
                }
            }
        }
        LatticeCmd::Conjugacy { samples, seed } => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let mut rows = Vec::with_capacity(samples);
            while rows.len() < samples {
                let z = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                if z.norm() > 2.0 || CONJUGACY_POLES.iter().any(|&p| (z - p).norm() <= 0.1) {
                    continue;
                }
                rows.push((z, conjugacy_checks(z)?));
            }
            let worst = rows.iter().map(|(_, r)| r.r1.max(r.r2)).fold(0.0, f64::max);
            if worst > ctx.tol.eq_tol {
                ctx.warnings.push(format!("conjugacy residual {worst:e} exceeds eq_tol"));
            }
            match ctx.format {
                Format::Json => {
                    let v: Vec<_> = rows.iter().map(|(z, r)| json!({"z": z, "residuals": r})).collect();
                    ctx.json(&v, rows.len())
                }
                Format::Csv => {
                    let mut csv = Csv::new(&["z_re", "z_im", "r1", "r2", "chart", "literal"]);
                    for (z, r) in &rows {
                        let mut row = c_pair(*z).to_vec();
                        row.extend([r.r1, r.r2, r.chart, r.literal].map(fmt_float));
                        csv.row(&row);
                    }
                    Ok(Emitted::ok(csv.finish(), rows.len()))
                }
            }
        }
    }
}

fn zeta_out(ctx: &mut Ctx, z: fractal_spectra::zeta::ZetaValue) -> Result<Emitted, Error> {
    if z.error > ctx.tol.sum_tol * z.value.norm().max(1.0) {
        ctx.warnings.push(format!("truncation error estimate {:e} exceeds sum_tol", z.error));
    }
    match ctx.format {
        Format::Json => ctx.json(&z, 1),
        Format::Csv => Ok(Emitted::ok(zeta_csv(&[z]), 1)),
    }
}

fn run_zeta(cmd: ZetaCmd, ctx: &mut Ctx) -> Result<Emitted, Error> {
    match cmd {
        ZetaCmd::R { z0, s, depth } => zeta_out(ctx, zeta_r(z0, s, depth)?),
        ZetaCmd::Sg { s, depth } => zeta_out(ctx, zeta_sg(s, depth)?),
        ZetaCmd::Sl { alpha, s, n, unbounded, lambda_max, scan } => {
            let p = make_params(alpha)?;
            if unbounded {
                if alpha >= 0.5 {
                    return Err(Error::UnsupportedAlpha(alpha));
                }
                let set = ctx.generating_set(&p, lambda_max, scan)?;
                let r = zeta_unbounded(&Unbounded::Interval { params: p, set: &set }, s)?;
                if let Some(note) = &r.note {
                    ctx.warnings.push(note.clone());
                }
                match ctx.format {
                    Format::Json => ctx.json(&r, 1),
                    Format::Csv => {
                        let mut csv = Csv::new(&[
                            "branch", "prefactor_re", "prefactor_im", "factor_re", "factor_im", "product_re", "product_im",
                        ]);
                        let opt = |z: Option<C64>| z.map(c_pair).unwrap_or_default();
                        let branch = match r.branch {
                            HyperBranch::Inner => "inner",
                            HyperBranch::Outer => "outer",
                        };
                        csv.row(&[vec![branch.to_string()], opt(r.prefactor).to_vec(), c_pair(r.factor_value).to_vec(), opt(r.product).to_vec()].concat());
                        Ok(Emitted::ok(csv.finish(), 1))
                    }
                }
            } else {
                let set = ctx.generating_set(&p, lambda_max, scan)?;
                zeta_out(ctx, zeta_h_n(&p, s, n.unwrap_or(0), &set)?)
            }
        }
        ZetaCmd::Poles { factor, window } => {
            let f = GeometricFactor::new(factor.0, factor.1)?;
            let [re_min, re_max, im_min, im_max] = window;
            let poles = pole_lattice(&f, &Window { re_min, re_max, im_min, im_max });
            match ctx.format {
                Format::Json => {
                    let v: Vec<_> = poles.iter().map(|p| json!({"re": p.s.re, "im": p.s.im, "n": p.n})).collect();
                    ctx.json(&v, poles.len())
                }
                Format::Csv => {
                    let mut csv = Csv::new(&["s_re", "s_im", "n"]);
                    for p in &poles {
                        let [r, i] = c_pair(p.s);
                        csv.row(&[r, i, p.n.to_string()]);
                    }
                    Ok(Emitted::ok(csv.finish(), poles.len()))
                }
            }
        }
        ZetaCmd::RiemannCheck { s, lambda_max, scan } => {
            let p = make_params(0.5)?;
            let set = ctx.generating_set(&p, lambda_max, scan)?;
            let r = riemann_check(s, &set)?;
            match ctx.format {
                Format::Json => ctx.json(&r, 1),
                Format::Csv => {
                    let mut csv = Csv::new(&["s", "lhs", "rhs", "abs_err", "error_estimate"]);
                    csv.row(&[r.s, r.lhs, r.rhs, r.abs_err, r.error_estimate].map(fmt_float));
                    Ok(Emitted::ok(csv.finish(), 1))
                }
            }
        }
    }
}

fn run_verify(cmd: VerifyCmd, ctx: &mut Ctx) -> Result<Emitted, Error> {
    let VerifyCmd::All { quick } = cmd;
    let rows = run_suite(quick);
    let failed = rows.iter().any(|r| !r.passed);
    let n_fail = rows.iter().filter(|r| !r.passed).count();
    let text = if ctx.table {
        let w_mod = rows.iter().map(|r| r.module.len()).max().unwrap_or(0);
        let w_chk = rows.iter().map(|r| r.check.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for r in &rows {
            let pad = " ".repeat(w_chk - r.check.chars().count());
            let mark = if r.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{mark}  {:<w_mod$}  {}{pad}  {}\n", r.module, r.check, r.detail));
        }
        out.push_str(&format!("{} passed, {n_fail} failed\n", rows.len() - n_fail));
        out
    } else {
        match ctx.format {
            Format::Json => to_json(&rows)?,
            Format::Csv => {
                let mut csv = Csv::new(&["module", "check", "passed", "detail"]);
                for r in &rows {
                    let detail = format!("\"{}\"", r.detail.replace('"', "\"\""));
                    csv.row(&[r.module.clone(), r.check.clone(), r.passed.to_string(), detail]);
                }
                csv.finish()
            }
        }
    };
    Ok(Emitted { text, values: rows.len(), failed })
}

fn dispatch(command: Command, ctx: &mut Ctx) -> Result<Emitted, Error> {
    match command {
        Command::Sg(c) => run_sg(c, ctx),
        Command::Sl(c) => run_sl(c, ctx),
        Command::Lattice(c) => run_lattice(c, ctx),
        Command::Zeta(c) => run_zeta(c, ctx),
        Command::Verify(c) => run_verify(c, ctx),
    }
}

fn tolerances(g: &Global) -> Result<Tolerances, Error> {
    let d = Tolerances::default();
    Tolerances::new(g.eq_tol.unwrap_or(d.eq_tol), g.root_tol.unwrap_or(d.root_tol), g.sum_tol.unwrap_or(d.sum_tol))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let start = Instant::now();
    let g = cli.global;
    if g.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(g.jobs).build_global() {
            eprintln!("warning: cannot size thread pool: {e}");
        }
    }
    let mut warnings = Vec::new();
    let result = tolerances(&g).and_then(|tol| {
        let table = g.format.is_none() && matches!(cli.command, Command::Verify(_));
        let mut ctx = Ctx { format: g.format.unwrap_or(Format::Json), table, tol, cache: Cache::open(g.cache_dir.clone(), g.no_cache), warnings: Vec::new() };
        let r = dispatch(cli.command, &mut ctx);
        warnings.append(&mut ctx.cache.warnings);
        warnings.append(&mut ctx.warnings);
        r
    });
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let (code, values, error) = match &result {
        Ok(out) => {
            let written = match &g.output {
                Some(path) => std::fs::write(path, &out.text),
                None => std::io::stdout().write_all(out.text.as_bytes()),
            };
            match written {
                Ok(()) => (if out.failed { 1 } else { 0 }, out.values, None),
                Err(e) => {
                    eprintln!("error: cannot write output: {e}");
                    (1, 0, Some(e.to_string()))
                }
            }
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            (1, 0, Some(e.name().to_string()))
        }
    };
    if let Some(path) = &g.report {
        let report = RunReport { command: argv, wall_time_s: start.elapsed().as_secs_f64(), values_emitted: values, warnings, error };
        if let Err(e) = to_json(&report).map_err(|e| e.to_string()).and_then(|t| std::fs::write(path, t).map_err(|e| e.to_string())) {
            eprintln!("warning: cannot write report: {e}");
        }
    }
    ExitCode::from(code)
}

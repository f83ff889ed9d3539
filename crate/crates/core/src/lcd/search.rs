//! Branch-and-bound search for the LCD.
//!
//! Since `θ ↦ [v]ᵀθ` is an isometry for unit `v`, for a fixed lattice point
//! `p` the residual splits as `‖[v]ᵀθ − p‖² = ‖θ − θ_p‖² + d_p²` with
//! `θ_p = [v]p` and `d_p² = ‖p‖² − ‖θ_p‖²`. The set of `θ` feasible through
//! `p` is then the intersection of two disks centred on the ray through
//! `θ_p`, and its closest point to the origin lies on that ray in closed
//! form. The search covers `θ`-space by polar cells (one quadrant suffices,
//! the feasible set is invariant under rotation by 90°), prunes cells whose
//! residual lower bound exceeds `min(γr, α)`, and closes a cell as soon as
//! only a handful of roundings `p` can occur inside it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::{LcdParams, LcdResult, LcdValue};
use crate::error::{ensure_unit, Error, Result};
use crate::realify::bracket_transpose_into;
use crate::Complex64;

const MAX_COMBINATIONS: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub search_bound: f64,
    /// Cells whose diameter falls below this are no longer split.
    pub resolution: f64,
    pub max_cells: u64,
}

impl SearchOptions {
    pub fn new(search_bound: f64, resolution: f64) -> Self {
        Self {
            search_bound,
            resolution,
            max_cells: 20_000_000,
        }
    }

    /// Cap `10³·√n` and resolution `10⁻⁹`.
    pub fn for_dim(n: usize) -> Self {
        Self::new(1e3 * (n as f64).sqrt(), 1e-9)
    }

    fn validate(&self) -> Result<()> {
        if !(self.search_bound > 0.0 && self.search_bound.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "search bound {} must be positive and finite",
                self.search_bound
            )));
        }
        if self.resolution.is_nan() || self.resolution <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "resolution {} must be positive",
                self.resolution
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub residual: f64,
    pub nearest_p: Vec<i64>,
}

fn residual_to_rounding(y: &[f64]) -> (f64, Vec<i64>) {
    let p: Vec<i64> = y.iter().map(|x| x.round() as i64).collect();
    let r = y
        .iter()
        .zip(&p)
        .map(|(a, &b)| (a - b as f64).powi(2))
        .sum::<f64>()
        .sqrt();
    (r, p)
}

/// Rounds `[v]ᵀθ` entrywise and tests `residual < min(γ‖θ‖₂, α)`.
pub fn lcd_feasibility(v: &[Complex64], theta: [f64; 2], params: &LcdParams) -> Feasibility {
    let mut y = vec![0.0; 2 * v.len()];
    bracket_transpose_into(v, theta, &mut y);
    let (residual, nearest_p) = residual_to_rounding(&y);
    let norm = theta[0].hypot(theta[1]);
    Feasibility {
        feasible: residual < (params.gamma * norm).min(params.alpha),
        residual,
        nearest_p,
    }
}

fn real_feasibility(v: &[f64], t: f64, params: &LcdParams) -> Feasibility {
    let y: Vec<f64> = v.iter().map(|x| t * x).collect();
    let (residual, nearest_p) = residual_to_rounding(&y);
    Feasibility {
        feasible: residual < (params.gamma * t.abs()).min(params.alpha),
        residual,
        nearest_p,
    }
}

/// Norm range `(lo, hi)` of the points feasible through a lattice point whose
/// projection has norm `b = ‖θ_p‖` and whose orthogonal defect is `d2`.
fn feasible_range(b: f64, d2: f64, params: &LcdParams) -> Option<(f64, f64)> {
    let g2 = params.gamma * params.gamma;
    let denom = 1.0 - g2;
    let ra2 = (g2 * b * b - denom * d2) / (denom * denom);
    let rb2 = params.alpha * params.alpha - d2;
    if !(ra2 > 0.0 && rb2 > 0.0) {
        return None;
    }
    let (ra, rb) = (ra2.sqrt(), rb2.sqrt());
    let a = b / denom;
    let lo = (a - ra).max(b - rb).max(0.0);
    let hi = (a + ra).min(b + rb);
    (lo < hi).then_some((lo, hi))
}

struct Candidate {
    lo: f64,
    hi: f64,
    direction: [f64; 2],
    p: Vec<i64>,
}

fn better(best: &Option<Candidate>, lo: f64) -> bool {
    best.as_ref().is_none_or(|c| lo < c.lo)
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    r0: f64,
    r1: f64,
    a0: f64,
    a1: f64,
    seq: u64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    /// Reversed so that `BinaryHeap` pops the smallest `r0` first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.r0.total_cmp(&self.r0).then(other.seq.cmp(&self.seq))
    }
}

/// Range of `cos` over `[a, b]` with `b − a ≤ π`.
fn cos_range(a: f64, b: f64) -> (f64, f64) {
    let (ca, cb) = (a.cos(), b.cos());
    let mut lo = ca.min(cb);
    let mut hi = ca.max(cb);
    if TAU * (a / TAU).ceil() <= b {
        hi = 1.0;
    }
    if PI + TAU * ((a - PI) / TAU).ceil() <= b {
        lo = -1.0;
    }
    (lo, hi)
}

fn interval_dist_to_integers(lo: f64, hi: f64) -> f64 {
    if hi.floor() >= lo.ceil() {
        0.0
    } else {
        (lo - lo.floor()).min(hi.ceil() - hi)
    }
}

fn nearest_int(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

/// Coordinate ranges over a cell: lower bound on the residual and the
/// possible roundings of each coordinate.
struct CellScan {
    residual_lb: f64,
    options: Vec<(i64, i64)>,
    combinations: u64,
}

fn scan_ranges(ranges: impl Iterator<Item = (f64, f64)>) -> CellScan {
    let mut s2 = 0.0;
    let mut options = Vec::new();
    let mut combinations: u64 = 1;
    for (lo, hi) in ranges {
        let d = interval_dist_to_integers(lo, hi);
        s2 += d * d;
        let (a, b) = (nearest_int(lo), nearest_int(hi));
        combinations = combinations.saturating_mul((b - a + 1) as u64);
        options.push((a, b));
    }
    CellScan {
        residual_lb: s2.sqrt(),
        options,
        combinations,
    }
}

/// Calls `f` on every lattice point in the product of `options`.
fn for_each_combination(options: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    let mut p: Vec<i64> = options.iter().map(|o| o.0).collect();
    loop {
        f(&p);
        let mut j = 0;
        loop {
            if j == p.len() {
                return;
            }
            if p[j] < options[j].1 {
                p[j] += 1;
                break;
            }
            p[j] = options[j].0;
            j += 1;
        }
    }
}

struct ComplexProblem<'a> {
    v: &'a [Complex64],
    params: LcdParams,
    /// `|w_j|` and phase `ψ_j` of column `j` of `[v]`.
    mags: Vec<f64>,
    phases: Vec<f64>,
}

impl<'a> ComplexProblem<'a> {
    fn new(v: &'a [Complex64], params: LcdParams) -> Self {
        let n = v.len();
        let mut mags = vec![0.0; 2 * n];
        let mut phases = vec![0.0; 2 * n];
        for (k, z) in v.iter().enumerate() {
            let psi = z.im.atan2(z.re);
            mags[k] = z.norm();
            mags[n + k] = z.norm();
            phases[k] = psi;
            phases[n + k] = psi + FRAC_PI_2;
        }
        Self { v, params, mags, phases }
    }

    fn analyze(&self, p: &[i64]) -> Option<Candidate> {
        let n = self.v.len();
        let mut t1 = 0.0;
        let mut t2 = 0.0;
        let mut pp = 0.0;
        for (k, z) in self.v.iter().enumerate() {
            let (a, b) = (p[k] as f64, p[n + k] as f64);
            t1 += z.re * a - z.im * b;
            t2 += z.im * a + z.re * b;
            pp += a * a + b * b;
        }
        let b = t1.hypot(t2);
        if pp == 0.0 || b == 0.0 {
            return None;
        }
        let d2 = (pp - b * b).max(0.0);
        let (lo, hi) = feasible_range(b, d2, &self.params)?;
        Some(Candidate {
            lo,
            hi,
            direction: [t1 / b, t2 / b],
            p: p.to_vec(),
        })
    }

    fn scan(&self, c: &Cell) -> CellScan {
        scan_ranges(self.mags.iter().zip(&self.phases).map(|(&m, &psi)| {
            let (cl, ch) = cos_range(c.a0 - psi, c.a1 - psi);
            let lo = (c.r0 * m * cl).min(c.r1 * m * cl);
            let hi = (c.r0 * m * ch).max(c.r1 * m * ch);
            (lo, hi)
        }))
    }

    fn point(r: f64, a: f64) -> [f64; 2] {
        [r * a.cos(), r * a.sin()]
    }
}

fn witness_along(
    best: &Candidate,
    check: impl Fn(f64) -> (bool, f64),
) -> (f64, f64) {
    let span = best.hi - best.lo;
    let eta = 1e-12 * best.lo.max(1.0);
    let mut step = eta;
    while step < span / 2.0 {
        let s = best.lo + step;
        let (ok, res) = check(s);
        if ok {
            return (s, res);
        }
        step *= 10.0;
    }
    let s = best.lo + span / 2.0;
    (s, check(s).1)
}

/// Complex LCD with default cell cap.
pub fn complex_lcd(
    v: &[Complex64],
    params: &LcdParams,
    search_bound: f64,
    resolution: f64,
) -> Result<LcdResult> {
    complex_lcd_with(v, params, &SearchOptions::new(search_bound, resolution))
}

pub fn complex_lcd_with(v: &[Complex64], params: &LcdParams, opts: &SearchOptions) -> Result<LcdResult> {
    params.validate()?;
    opts.validate()?;
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    ensure_unit(norm)?;
    let v: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
    let problem = ComplexProblem::new(&v, *params);
    let bound = opts.search_bound;
    let (alpha, gamma) = (params.alpha, params.gamma);

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Cell { r0: 0.0, r1: bound, a0: 0.0, a1: FRAC_PI_2, seq });
    let mut best: Option<Candidate> = None;
    let mut unresolved = f64::INFINITY;
    let mut cells = 0u64;
    let mut y = vec![0.0; 2 * v.len()];
    let mut truncated = None;

    while let Some(cell) = heap.pop() {
        let upper = best.as_ref().map_or(f64::INFINITY, |c| c.lo).min(bound);
        if cell.r0 >= upper {
            break;
        }
        if cells == opts.max_cells {
            truncated = Some(cell.r0);
            break;
        }
        cells += 1;
        let scan = problem.scan(&cell);
        let (rc, ac) = ((cell.r0 + cell.r1) / 2.0, (cell.a0 + cell.a1) / 2.0);
        let cover = (cell.r1 - cell.r0) / 2.0 + cell.r1 * (cell.a1 - cell.a0) / 2.0;
        bracket_transpose_into(&v, ComplexProblem::point(rc, ac), &mut y);
        let center_res = residual_to_rounding(&y).0;
        let lb = scan.residual_lb.max(center_res - cover);
        if lb >= (gamma * cell.r1).min(alpha) {
            continue;
        }
        if scan.combinations <= MAX_COMBINATIONS {
            for_each_combination(&scan.options, |p| {
                if let Some(c) = problem.analyze(p) {
                    if better(&best, c.lo) {
                        best = Some(c);
                    }
                }
            });
            continue;
        }
        if 2.0 * cover <= opts.resolution {
            unresolved = unresolved.min(cell.r0);
            for (r, a) in [(rc, ac), (cell.r0, cell.a0), (cell.r0, cell.a1), (cell.r1, cell.a0), (cell.r1, cell.a1)] {
                bracket_transpose_into(&v, ComplexProblem::point(r, a), &mut y);
                let p = residual_to_rounding(&y).1;
                if let Some(c) = problem.analyze(&p) {
                    if better(&best, c.lo) {
                        best = Some(c);
                    }
                }
            }
            continue;
        }
        let radial = cell.r1 - cell.r0;
        let angular = cell.r1 * (cell.a1 - cell.a0);
        let children = if radial >= angular {
            let m = (cell.r0 + cell.r1) / 2.0;
            [(cell.r0, m, cell.a0, cell.a1), (m, cell.r1, cell.a0, cell.a1)]
        } else {
            let m = (cell.a0 + cell.a1) / 2.0;
            [(cell.r0, cell.r1, cell.a0, m), (cell.r0, cell.r1, m, cell.a1)]
        };
        for (r0, r1, a0, a1) in children {
            seq += 1;
            heap.push(Cell { r0, r1, a0, a1, seq });
        }
    }

    Ok(finish(best, unresolved, truncated, bound, cells, |c| {
        let (s, res) = witness_along(c, |s| {
            let f = lcd_feasibility(&v, [s * c.direction[0], s * c.direction[1]], params);
            (f.feasible, f.residual)
        });
        (vec![s * c.direction[0], s * c.direction[1]], s, res)
    }))
}

fn finish(
    best: Option<Candidate>,
    unresolved: f64,
    truncated: Option<f64>,
    bound: f64,
    cells: u64,
    witness: impl Fn(&Candidate) -> (Vec<f64>, f64, f64),
) -> LcdResult {
    let floor = unresolved.min(truncated.unwrap_or(f64::INFINITY));
    match best {
        Some(c) if c.lo <= bound && truncated.is_none_or(|t| t >= c.lo) => {
            let (theta, s, residual) = witness(&c);
            let lower = floor.min(c.lo);
            LcdResult {
                value: LcdValue::Finite(c.lo),
                witness_theta: Some(theta),
                witness_p: Some(c.p),
                residual: Some(residual),
                certified_resolution: (s - c.lo).max(c.lo - lower),
                cells_explored: cells,
            }
        }
        _ => LcdResult {
            value: LcdValue::AtLeast(floor.min(bound)),
            witness_theta: None,
            witness_p: None,
            residual: None,
            certified_resolution: 0.0,
            cells_explored: cells,
        },
    }
}

/// Real lcd with default cell cap.
pub fn real_lcd(v: &[f64], params: &LcdParams, search_bound: f64, resolution: f64) -> Result<LcdResult> {
    real_lcd_with(v, params, &SearchOptions::new(search_bound, resolution))
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    t0: f64,
    t1: f64,
    seq: u64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        other.t0.total_cmp(&self.t0).then(other.seq.cmp(&self.seq))
    }
}

pub fn real_lcd_with(v: &[f64], params: &LcdParams, opts: &SearchOptions) -> Result<LcdResult> {
    params.validate()?;
    opts.validate()?;
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    ensure_unit(norm)?;
    let v: Vec<f64> = v.iter().map(|x| x / norm).collect();
    let bound = opts.search_bound;
    let (alpha, gamma) = (params.alpha, params.gamma);

    let analyze = |p: &[i64]| -> Option<Candidate> {
        let tp: f64 = v.iter().zip(p).map(|(a, &b)| a * b as f64).sum();
        let pp: f64 = p.iter().map(|&b| (b * b) as f64).sum();
        if tp <= 0.0 {
            return None;
        }
        let d2 = (pp - tp * tp).max(0.0);
        let (lo, hi) = feasible_range(tp, d2, params)?;
        Some(Candidate {
            lo,
            hi,
            direction: [1.0, 0.0],
            p: p.to_vec(),
        })
    };

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Segment { t0: 0.0, t1: bound, seq });
    let mut best: Option<Candidate> = None;
    let mut unresolved = f64::INFINITY;
    let mut cells = 0u64;
    let mut truncated = None;

    while let Some(seg) = heap.pop() {
        let upper = best.as_ref().map_or(f64::INFINITY, |c| c.lo).min(bound);
        if seg.t0 >= upper {
            break;
        }
        if cells == opts.max_cells {
            truncated = Some(seg.t0);
            break;
        }
        cells += 1;
        let scan = scan_ranges(v.iter().map(|&x| {
            let (a, b) = (seg.t0 * x, seg.t1 * x);
            (a.min(b), a.max(b))
        }));
        let tc = (seg.t0 + seg.t1) / 2.0;
        let cover = (seg.t1 - seg.t0) / 2.0;
        let center_res = real_feasibility(&v, tc, params).residual;
        let lb = scan.residual_lb.max(center_res - cover);
        if lb >= (gamma * seg.t1).min(alpha) {
            continue;
        }
        if scan.combinations <= MAX_COMBINATIONS {
            for_each_combination(&scan.options, |p| {
                if let Some(c) = analyze(p) {
                    if better(&best, c.lo) {
                        best = Some(c);
                    }
                }
            });
            continue;
        }
        if 2.0 * cover <= opts.resolution {
            unresolved = unresolved.min(seg.t0);
            for t in [tc, seg.t0, seg.t1] {
                let p = real_feasibility(&v, t, params).nearest_p;
                if let Some(c) = analyze(&p) {
                    if better(&best, c.lo) {
                        best = Some(c);
                    }
                }
            }
            continue;
        }
        for (t0, t1) in [(seg.t0, tc), (tc, seg.t1)] {
            seq += 1;
            heap.push(Segment { t0, t1, seq });
        }
    }

    Ok(finish(best, unresolved, truncated, bound, cells, |c| {
        let (s, res) = witness_along(c, |t| {
            let f = real_feasibility(&v, t, params);
            (f.feasible, f.residual)
        });
        (vec![s], s, res)
    }))
}

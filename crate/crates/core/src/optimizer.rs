//! Minimal mean width at unit volume, per parallelohedron type.
//!
//! The general search runs over `v₁, v₂, v₃` (nine coordinates, `v₄ = −Σ`) and
//! square roots of the free weights of the type's zero pattern, minimizing the
//! scale-free ratio `w / vol^{1/3}`. The tetrahedron is renormalized at every
//! evaluation, so the objective is invariant under scaling the coordinates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{det3, Vector3};
use crate::isotropy::{beta_from_isotropy, width_from_f_zeta, OBTUSE_TOL};
use crate::nelder_mead::{Minimum, NelderMead};
use crate::pairs::{Pair, PairSet, PAIRS};
use crate::parallelohedron::{classify_default, measures_rep, BetaWeights, CenteredTetrahedron, ParallelohedronType};
use crate::sampling::{normalized_tetrahedron, obtuse_tetrahedron, simplex_point, sub_rng};
use crate::symfunc::{f_eval, f_grad, simplex_max, SimplexMaxResult, TauVector, ZeroCase};
use rand::Rng;

/// Objective value for infeasible points.
pub const PENALTY: f64 = 1e6;
/// Below this `|det(v₁, v₂, v₃)|` the raw tetrahedron counts as flat.
pub const MIN_DET: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimConfig {
    pub starts: usize,
    pub seed: u64,
    /// Objective evaluations per start.
    pub max_iters: usize,
    pub x_tol: f64,
    pub f_tol: f64,
    pub type_pattern: ParallelohedronType,
}

impl Default for OptimConfig {
    fn default() -> Self {
        OptimConfig {
            starts: 64,
            seed: 0,
            max_iters: 200_000,
            x_tol: 1e-10,
            f_tol: 1e-12,
            type_pattern: ParallelohedronType::Type5,
        }
    }
}

impl OptimConfig {
    pub fn for_type(t: ParallelohedronType) -> Self {
        OptimConfig { type_pattern: t, ..OptimConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::InvalidConfig("starts must be at least 1".into()));
        }
        if !(self.x_tol > 0.0 && self.f_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if self.type_pattern.zero_pattern().is_none() {
            return Err(Error::InvalidConfig("type_pattern must be one of the five types".into()));
        }
        Ok(())
    }

    fn search(&self) -> NelderMead {
        NelderMead { initial_step: 0.2, max_evals: self.max_iters, x_tol: self.x_tol, f_tol: self.f_tol * 1e-2, max_restarts: 30 }
    }

    fn free_pairs(&self) -> Vec<Pair> {
        self.type_pattern.zero_pattern().unwrap_or_default().complement().iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimResult {
    pub best_width: f64,
    pub tetrahedron: CenteredTetrahedron,
    pub betas: BetaWeights,
    pub converged: bool,
    /// Starts whose final objective lies within `f_tol` of the best.
    pub starts_agreeing: usize,
    /// Final objective of each start, in start order.
    pub history: Vec<f64>,
}

/// Renormalized vertices for raw coordinates `v₁, v₂, v₃`, or `None` if flat.
///
/// A negative orientation is fixed by `v ↦ −v`, which leaves every `v_i × v_j` unchanged.
pub fn decode_tetrahedron(x: &[f64]) -> Option<[Vector3; 4]> {
    let v1 = Vector3::new(x[0], x[1], x[2]);
    let v2 = Vector3::new(x[3], x[4], x[5]);
    let v3 = Vector3::new(x[6], x[7], x[8]);
    let d = det3(v1, v2, v3);
    if !(d.abs() >= MIN_DET) {
        return None;
    }
    let s = d.signum() * d.abs().cbrt().recip();
    let v = [v1 * s, v2 * s, v3 * s];
    Some([v[0], v[1], v[2], -(v[0] + v[1] + v[2])])
}

fn pair_lengths(v: &[Vector3; 4]) -> [f64; 6] {
    PAIRS.map(|p| {
        let (i, j) = p.indices();
        v[i].cross(v[j]).norm()
    })
}

fn decode_betas(x: &[f64], free: &[Pair]) -> [f64; 6] {
    let mut b = [0.0; 6];
    for (p, s) in free.iter().zip(&x[9..]) {
        b[p.slot()] = s * s;
    }
    b
}

/// `w / vol^{1/3}` of `Σ β_ij [o, v_i × v_j]` for the parameter vector `x`.
pub fn width_objective(x: &[f64], free: &[Pair]) -> f64 {
    let Some(v) = decode_tetrahedron(x) else {
        return PENALTY;
    };
    let b = decode_betas(x, free);
    let len = pair_lengths(&v);
    let width = 0.5 * b.iter().zip(&len).map(|(b, l)| b * l).sum::<f64>();
    let volume = f_eval(&TauVector(b));
    if !(volume > 0.0) || !width.is_finite() {
        return PENALTY;
    }
    width / volume.cbrt()
}

/// `−f(ζ)` on obtuse-centered tetrahedra; elsewhere the positive total `Σ max(0, −γ)`,
/// so every infeasible point ranks behind every feasible one.
pub fn isotropic_objective(x: &[f64]) -> f64 {
    let Some(v) = decode_tetrahedron(x) else {
        return PENALTY;
    };
    let len = pair_lengths(&v);
    let mut zeta = [0.0; 6];
    let mut violation = 0.0;
    for p in PAIRS {
        let (s, t) = p.complement().indices();
        let g = -v[s].dot(v[t]);
        zeta[p.slot()] = g * len[p.slot()];
        violation += (-g).max(0.0);
    }
    let value = if violation > 0.0 { violation } else { -f_eval(&TauVector(zeta)) };
    if value.is_finite() {
        value.min(PENALTY)
    } else {
        PENALTY
    }
}

fn start_point(seed: u64, index: usize, free: usize, obtuse: bool) -> Vec<f64> {
    let mut rng = sub_rng(seed, index as u64);
    let t = if obtuse { obtuse_tetrahedron(&mut rng) } else { None }.unwrap_or_else(|| normalized_tetrahedron(&mut rng));
    let mut x: Vec<f64> = t.vertices()[..3].iter().flat_map(|v| v.to_array()).collect();
    x.extend((0..free).map(|_| rng.random_range(0.5..1.5)));
    x
}

fn pick_best(runs: &[Minimum]) -> usize {
    (0..runs.len())
        .min_by(|&a, &b| runs[a].value.total_cmp(&runs[b].value).then(a.cmp(&b)))
        .expect("at least one start")
}

fn agreeing(history: &[f64], best: f64, tol: f64) -> usize {
    history.iter().filter(|&&h| (h - best).abs() <= tol).count()
}

fn multi_start<F>(cfg: &OptimConfig, free: usize, obtuse: bool, objective: F) -> Result<(Vec<Minimum>, usize)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    let search = cfg.search();
    let runs: Vec<Minimum> = (0..cfg.starts)
        .into_par_iter()
        .map(|i| search.minimize(&objective, &start_point(cfg.seed, i, free, obtuse)))
        .collect();
    let best = pick_best(&runs);
    if !(runs[best].value.abs() < PENALTY * 0.5) {
        return Err(Error::NoFeasibleStart);
    }
    Ok((runs, best))
}

/// Scales `b` so that `build(t, b)` has volume 1 for any normalized `t`.
fn unit_volume(b: &BetaWeights) -> Result<BetaWeights> {
    let vol = f_eval(&b.as_tau());
    if !(vol > 0.0) {
        return Err(Error::NoFeasibleStart);
    }
    b.scaled(vol.cbrt().recip())
}

/// Multi-start minimization of `w / vol^{1/3}` over bodies of `cfg.type_pattern`.
pub fn minimize_mean_width(cfg: &OptimConfig) -> Result<OptimResult> {
    let free = cfg.free_pairs();
    let (runs, best) = multi_start(cfg, free.len(), false, |x| width_objective(x, &free))?;
    let x = &runs[best].x;
    let vertices = decode_tetrahedron(x).ok_or(Error::NoFeasibleStart)?;
    let t = CenteredTetrahedron::new(vertices)?;
    let b = unit_volume(&BetaWeights::new(decode_betas(x, &free))?)?;
    let report = measures_rep(&t, &b);
    let history: Vec<f64> = runs.iter().map(|r| r.value).collect();
    Ok(OptimResult {
        best_width: report.mean_width,
        tetrahedron: t,
        betas: b,
        converged: runs[best].converged,
        starts_agreeing: agreeing(&history, runs[best].value, cfg.f_tol),
        history,
    })
}

/// Type-5 search over tetrahedron shape alone, with isotropic weights: maximizes `f(ζ)`.
pub fn minimize_width_isotropic_fastpath(cfg: &OptimConfig) -> Result<OptimResult> {
    if cfg.type_pattern != ParallelohedronType::Type5 {
        return Err(Error::InvalidConfig("the isotropic fast path applies to type 5 only".into()));
    }
    let (runs, best) = multi_start(cfg, 0, true, isotropic_objective)?;
    if runs[best].value >= 0.0 {
        return Err(Error::NoFeasibleStart);
    }
    let vertices = decode_tetrahedron(&runs[best].x).ok_or(Error::NoFeasibleStart)?;
    let t = CenteredTetrahedron::new(vertices)?;
    if t.gamma().0.iter().any(|&g| g < -OBTUSE_TOL) {
        return Err(Error::NotObtuseCentered);
    }
    let f_zeta = -runs[best].value;
    let b = unit_volume(&beta_from_isotropy(&t, width_from_f_zeta(f_zeta))?)?;
    let report = measures_rep(&t, &b);
    let history: Vec<f64> = runs
        .iter()
        .map(|r| if r.value < 0.0 { width_from_f_zeta(-r.value) } else { f64::INFINITY })
        .collect();
    Ok(OptimResult {
        best_width: report.mean_width,
        tetrahedron: t,
        betas: b,
        converged: runs[best].converged,
        starts_agreeing: agreeing(&history, history[best], cfg.f_tol),
        history,
    })
}

/// The closed-form minimal width at unit volume of each type; for type 4 a lower bound.
pub fn closed_form_width(t: ParallelohedronType) -> Option<f64> {
    match t {
        ParallelohedronType::Type1 => Some(1.5),
        ParallelohedronType::Type2 => Some(3f64.powf(7.0 / 6.0) / 2f64.powf(4.0 / 3.0)),
        ParallelohedronType::Type3 => Some(3f64.sqrt() / 2f64.cbrt()),
        ParallelohedronType::Type4 => Some(3f64.powf(4.0 / 3.0) / 2f64.powf(5.0 / 3.0)),
        ParallelohedronType::Type5 => Some(3.0 / 2f64.powf(7.0 / 6.0)),
        ParallelohedronType::Degenerate => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    #[serde(rename = "type")]
    pub type_number: u8,
    pub paper_value: f64,
    pub computed_value: f64,
    pub abs_error: f64,
    /// `false` for type 4, whose `paper_value` is only a lower bound.
    pub optimum_known: bool,
}

impl Table1Row {
    /// Known optima must be matched within `tol`; the type-4 bound must not be undercut by more than `bound_slack`.
    pub fn passes(&self, tol: f64, bound_slack: f64) -> bool {
        if self.optimum_known {
            self.abs_error <= tol
        } else {
            self.computed_value >= self.paper_value - bound_slack
        }
    }
}

/// Minimal widths of all five types with `starts` starts each.
pub fn table1(starts: usize, seed: u64) -> Result<Vec<Table1Row>> {
    ParallelohedronType::ALL
        .into_iter()
        .map(|t| {
            let cfg = OptimConfig { starts, seed, ..OptimConfig::for_type(t) };
            let r = minimize_mean_width(&cfg)?;
            let target = closed_form_width(t).expect("proper type");
            Ok(Table1Row {
                type_number: t.number().expect("proper type"),
                paper_value: target,
                computed_value: r.best_width,
                abs_error: (r.best_width - target).abs(),
                optimum_known: t != ParallelohedronType::Type4,
            })
        })
        .collect()
}

/// Euclidean projection of the free slots onto `{τ ≥ 0, Σ τ = budget}`.
fn project_simplex(y: &mut [f64; 6], free: &[usize], budget: f64) {
    let mut u: Vec<f64> = free.iter().map(|&i| y[i]).collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        acc += uk;
        let t = (acc - budget) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    for i in 0..6 {
        y[i] = if free.contains(&i) { (y[i] - theta).max(0.0) } else { 0.0 };
    }
}

fn ascend(start: [f64; 6], free: &[usize], budget: f64, max_iters: usize, x_tol: f64) -> [f64; 6] {
    let mut x = start;
    let mut fx = f_eval(&TauVector(x));
    let mut step = 1.0 / budget.max(f64::MIN_POSITIVE);
    for _ in 0..max_iters {
        let g = f_grad(&TauVector(x));
        let mut accepted = false;
        while step > 1e-300 {
            let mut y = x;
            for i in 0..6 {
                y[i] += step * g[PAIRS[i]];
            }
            project_simplex(&mut y, free, budget);
            let fy = f_eval(&TauVector(y));
            if fy > fx {
                let moved = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                x = y;
                fx = fy;
                step *= 2.0;
                accepted = moved > x_tol * budget;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    x
}

/// Maximum of `f` on `{τ ≥ 0, Σ τ = budget, τ = 0 on zeros}` by multi-start projected gradient ascent.
pub fn numeric_simplex_max(budget: f64, zeros: PairSet, cfg: &OptimConfig) -> Result<SimplexMaxResult> {
    if !(budget > 0.0) || !budget.is_finite() {
        return Err(Error::NonpositiveBudget(budget));
    }
    if zeros.len() == 6 {
        return simplex_max(budget, zeros);
    }
    cfg.validate()?;
    let free: Vec<usize> = zeros.complement().iter().map(|p| p.slot()).collect();
    let mut starts: Vec<[f64; 6]> = (0..cfg.starts)
        .map(|i| simplex_point(&mut sub_rng(cfg.seed, i as u64), budget, zeros))
        .collect();
    let mut centroid = [0.0; 6];
    for &i in &free {
        centroid[i] = budget / free.len() as f64;
    }
    starts.push(centroid);
    let ends: Vec<[f64; 6]> = starts
        .par_iter()
        .map(|&s| ascend(s, &free, budget, cfg.max_iters, cfg.x_tol))
        .collect();
    let argmax = ends
        .iter()
        .copied()
        .enumerate()
        .max_by(|(a, x), (b, y)| f_eval(&TauVector(*x)).total_cmp(&f_eval(&TauVector(*y))).then(b.cmp(a)))
        .map(|(_, x)| x)
        .expect("at least one start");
    Ok(SimplexMaxResult {
        max_value: f_eval(&TauVector(argmax)),
        argmax: TauVector(argmax),
        case_tag: ZeroCase::from_count(zeros.len()),
    })
}

/// Classification of an optimizer result with the default threshold.
pub fn result_type(r: &OptimResult) -> ParallelohedronType {
    classify_default(&r.betas)
}

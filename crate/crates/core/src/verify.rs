//! Seeded randomized sweeps over the identities and inequalities of the theory.
//!
//! Each suite reports the largest deviation seen per check and, on failure, the
//! first offending sample as a standalone replay document.

use clap::ValueEnum;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::geom::{cross_det_identity, Matrix3};
use crate::isotropy::{
    beta_from_isotropy, bound_chain, gram_distance_to_regular, isotropy_matrix, reduction_quantities, regular_tetrahedron,
};
use crate::optimizer::{numeric_simplex_max, OptimConfig};
use crate::pairs::{vertex_permutations, PairSet, PAIRS};
use crate::parallelohedron::{build, measures_rep, CenteredTetrahedron, ParallelohedronType};
use crate::sampling::{betas, gaussian_vector, well_shaped_points, normalized_tetrahedron, obtuse_tetrahedron, simplex_point};
use crate::symfunc::{f_eval, simplex_max, tetra_identities, TauVector};
use crate::zonotope::hull_measures;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identities,
    #[value(name = "lemma-max")]
    #[serde(rename = "lemma-max")]
    SimplexMax,
    Isotropy,
    BoundChain,
    CrossId,
    Representation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl Summary {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Tracker {
    checks: Vec<Check>,
    counterexample: Option<Value>,
}

impl Tracker {
    fn new(specs: &[(&str, f64)], tol: Option<f64>) -> Self {
        let checks = specs
            .iter()
            .map(|&(name, t)| Check { name: name.into(), max_deviation: 0.0, tolerance: tol.unwrap_or(t), passed: true })
            .collect();
        Tracker { checks, counterexample: None }
    }

    fn record(&mut self, check: usize, deviation: f64, trial: usize, sample: impl FnOnce() -> Value) {
        let c = &mut self.checks[check];
        if deviation > c.max_deviation || deviation.is_nan() {
            c.max_deviation = deviation;
        }
        if !(deviation <= c.tolerance) {
            c.passed = false;
            if self.counterexample.is_none() {
                self.counterexample =
                    Some(json!({ "check": c.name, "trial": trial, "deviation": deviation, "sample": sample() }));
            }
        }
    }

    fn finish(self, suite: Suite, trials: usize, seed: u64) -> Summary {
        let passed = self.checks.iter().all(|c| c.passed);
        let counterexample = self.counterexample.map(|mut v| {
            v["suite"] = json!(suite);
            v["seed"] = json!(seed);
            v
        });
        Summary { suite, trials, seed, passed, checks: self.checks, counterexample }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Runs `suite` with `trials` samples; `tol` overrides every check's default tolerance.
pub fn run(suite: Suite, trials: usize, seed: u64, tol: Option<f64>) -> Summary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tracker = match suite {
        Suite::Identities => identities(&mut rng, trials, tol),
        Suite::SimplexMax => simplex_maxima(&mut rng, trials, seed, tol),
        Suite::Isotropy => isotropy(&mut rng, trials, tol),
        Suite::BoundChain => bound_chain_sweep(&mut rng, trials, tol),
        Suite::CrossId => cross_id(&mut rng, trials, tol),
        Suite::Representation => representation(&mut rng, trials, tol),
    };
    tracker.finish(suite, trials, seed)
}

fn identities(rng: &mut ChaCha8Rng, trials: usize, tol: Option<f64>) -> Tracker {
    let mut tr = Tracker::new(
        &[("f_gamma", 1e-9), ("zeta_sum", 1e-9), ("normalized_f_gamma", 1e-9), ("normalized_tau_sum", 1e-9), ("zeta_squared", 1e-10)],
        tol,
    );
    for trial in 0..trials {
        let p = well_shaped_points(rng);
        let sample = || json!({ "points": p });
        match tetra_identities(&p) {
            Ok(id) => {
                tr.record(0, rel(id.f_gamma, id.expected_f), trial, sample);
                tr.record(1, rel(id.zeta_sum, id.expected_sum), trial, sample);
            }
            Err(_) => tr.record(0, f64::INFINITY, trial, sample),
        }
        let Ok(t) = CenteredTetrahedron::normalize(p) else { continue };
        let q = reduction_quantities(&t);
        tr.record(2, (f_eval(&q.gamma) - 1.0).abs(), trial, sample);
        tr.record(3, (q.tau.sum() - 3.0).abs() / 3.0, trial, sample);
        for pair in PAIRS {
            if q.gamma[pair] >= 0.0 {
                tr.record(4, rel(q.zeta[pair] * q.zeta[pair], q.gamma[pair] * q.tau[pair]), trial, sample);
            }
        }
    }
    tr
}

fn mask_set(mask: u8) -> PairSet {
    PAIRS.into_iter().filter(|p| mask & (1 << p.slot()) != 0).collect()
}

fn simplex_maxima(rng: &mut ChaCha8Rng, trials: usize, seed: u64, tol: Option<f64>) -> Tracker {
    let mut tr = Tracker::new(&[("numeric_vs_analytic", 1e-8), ("argmax_attains", 1e-12), ("sample_excess", 1e-12)], tol);
    let cfg = OptimConfig { starts: 8, seed, max_iters: 20_000, x_tol: 1e-14, ..OptimConfig::default() };
    for mask in 0u8..63 {
        let zeros = mask_set(mask);
        let sample = || json!({ "zeros": zeros.iter().map(|p| p.to_string()).collect::<Vec<_>>() });
        let Ok(exact) = simplex_max(1.0, zeros) else {
            tr.record(0, f64::INFINITY, mask as usize, sample);
            continue;
        };
        let numeric = numeric_simplex_max(1.0, zeros, &cfg).map(|r| r.max_value).unwrap_or(f64::NAN);
        tr.record(0, (numeric - exact.max_value).abs(), mask as usize, sample);
        tr.record(1, (f_eval(&exact.argmax) - exact.max_value).abs(), mask as usize, sample);
        for trial in 0..trials {
            let t = simplex_point(rng, 1.0, zeros);
            let excess = (f_eval(&TauVector(t)) - exact.max_value).max(0.0);
            tr.record(2, excess, trial, || json!({ "zeros": zeros.iter().map(|p| p.to_string()).collect::<Vec<_>>(), "tau": t }));
        }
    }
    tr
}

fn isotropy(rng: &mut ChaCha8Rng, trials: usize, tol: Option<f64>) -> Tracker {
    let mut tr = Tracker::new(&[("isotropy_matrix", 1e-9), ("mean_width", 1e-10), ("objective_identity", 1e-9)], tol);
    for trial in 0..trials {
        let Some(t) = obtuse_tetrahedron(rng) else { continue };
        let w = rng.random_range(0.1..5.0);
        let sample = || json!({ "tetrahedron": t, "width": w });
        let Ok(b) = beta_from_isotropy(&t, w) else {
            tr.record(0, f64::INFINITY, trial, sample);
            continue;
        };
        let dev = isotropy_matrix(&t, &b).map(|m| m.max_abs_diff(&Matrix3::identity())).unwrap_or(f64::INFINITY);
        tr.record(0, dev, trial, sample);
        let width = build(&t, &b).map(|z| z.mean_width()).unwrap_or(f64::NAN);
        tr.record(1, rel(width, w), trial, sample);
        let r = measures_rep(&t, &b);
        let objective = 27.0 * r.volume / (2.0 * r.mean_width).powi(3);
        let f_zeta = bound_chain(&t).map(|c| c.f_zeta).unwrap_or(f64::NAN);
        tr.record(2, rel(objective, f_zeta), trial, sample);
    }
    tr
}

fn perturbed_regular(rng: &mut ChaCha8Rng, size: f64) -> CenteredTetrahedron {
    let base = *regular_tetrahedron().vertices();
    loop {
        let p = base.map(|v| v + gaussian_vector(rng) * size);
        if let Ok(t) = CenteredTetrahedron::normalize(p) {
            return t;
        }
    }
}

fn bound_chain_sweep(rng: &mut ChaCha8Rng, trials: usize, tol: Option<f64>) -> Tracker {
    let mut tr = Tracker::new(
        &[
            ("cauchy_schwarz", 1e-12),
            ("global_bound", 1e-12),
            ("maximizer_is_regular", 1e-4),
            ("near_regular", 1e-6),
        ],
        tol,
    );
    let regular = regular_tetrahedron();
    let mut best = (bound_chain(&regular).map(|c| c.f_zeta).unwrap_or(f64::NAN), regular);
    for trial in 0..trials {
        let Some(t) = obtuse_tetrahedron(rng) else { continue };
        let sample = || json!({ "tetrahedron": t });
        let Ok(c) = bound_chain(&t) else {
            tr.record(0, f64::INFINITY, trial, sample);
            continue;
        };
        tr.record(0, (c.f_zeta - c.cs_bound).max(0.0), trial, sample);
        tr.record(1, (c.cs_bound - c.global_bound).max(0.0), trial, sample);
        if c.f_zeta > best.0 {
            best = (c.f_zeta, t);
        }
    }
    let t_best = best.1;
    tr.record(2, gram_distance_to_regular(&t_best), 0, || json!({ "tetrahedron": t_best, "f_zeta": best.0 }));
    for trial in 0..trials.min(100) {
        let t = perturbed_regular(rng, 1e-4);
        let f = bound_chain(&t).map(|c| c.f_zeta).unwrap_or(f64::NAN);
        let gap = std::f64::consts::SQRT_2 - f;
        tr.record(3, if gap >= -1e-12 { gap } else { f64::INFINITY }, trial, || json!({ "tetrahedron": t }));
    }
    tr
}

fn cross_id(rng: &mut ChaCha8Rng, trials: usize, tol: Option<f64>) -> Tracker {
    let mut tr = Tracker::new(&[("determinant_identity", 1e-9)], tol);
    let labels: Vec<(usize, usize)> =
        (1..=4).flat_map(|i| (1..=4).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    for trial in 0..trials {
        let v = [gaussian_vector(rng), gaussian_vector(rng), gaussian_vector(rng), gaussian_vector(rng)];
        let pairs = [*labels.choose(rng).unwrap(), *labels.choose(rng).unwrap(), *labels.choose(rng).unwrap()];
        let dev = cross_det_identity(&v, pairs).map(|(l, r)| (l - r).abs()).unwrap_or(f64::INFINITY);
        tr.record(0, dev, trial, || json!({ "vectors": v, "pairs": pairs }));
    }
    tr
}

fn representation(rng: &mut ChaCha8Rng, trials: usize, tol: Option<f64>) -> Tracker {
    let mut tr = Tracker::new(
        &[
            ("volume_generic", 1e-9),
            ("surface_generic", 1e-9),
            ("width_generic", 1e-9),
            ("volume_hull", 1e-9),
            ("surface_hull", 1e-9),
        ],
        tol,
    );
    let perms = vertex_permutations();
    for trial in 0..trials {
        let t = normalized_tetrahedron(rng);
        let ty = *ParallelohedronType::ALL.choose(rng).unwrap();
        let perm = *perms.choose(rng).unwrap();
        let zeros: PairSet = ty.zero_pattern().unwrap_or_default().iter().map(|p| p.permuted(perm)).collect();
        let b = betas(rng, zeros);
        let sample = || json!({ "tetrahedron": t, "betas": b });
        let rep = measures_rep(&t, &b);
        let Ok(z) = build(&t, &b) else {
            tr.record(0, f64::INFINITY, trial, sample);
            continue;
        };
        tr.record(0, rel(rep.volume, z.volume()), trial, sample);
        tr.record(1, rel(rep.surface_area, z.surface_area()), trial, sample);
        tr.record(2, rel(rep.mean_width, z.mean_width()), trial, sample);
        match hull_measures(&z) {
            Ok((vol, surf)) => {
                tr.record(3, rel(rep.volume, vol), trial, sample);
                tr.record(4, rel(rep.surface_area, surf), trial, sample);
            }
            Err(_) => tr.record(3, f64::INFINITY, trial, sample),
        }
    }
    tr
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_a_short_sweep() {
        for suite in Suite::value_variants() {
            let s = run(*suite, 40, 1, None);
            assert!(s.passed, "{suite:?}: {:?}", s.checks);
            assert!(s.counterexample.is_none());
        }
    }

    #[test]
    fn sweeps_are_reproducible() {
        let a = serde_json::to_string(&run(Suite::Identities, 30, 9, None)).unwrap();
        let b = serde_json::to_string(&run(Suite::Identities, 30, 9, None)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn an_impossible_tolerance_yields_a_counterexample() {
        let s = run(Suite::CrossId, 20, 3, Some(0.0));
        if !s.passed {
            let c = s.counterexample.unwrap();
            assert_eq!(c["suite"], "cross-id");
            assert!(c["sample"]["vectors"].is_array());
        }
        let s = run(Suite::Identities, 20, 3, Some(-1.0));
        assert!(!s.passed);
        let c = s.counterexample.unwrap();
        assert_eq!(c["check"], "f_gamma");
        assert_eq!(c["trial"], 0);
    }
}

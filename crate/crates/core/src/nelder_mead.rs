//! Nelder–Mead simplex search with dimension-adaptive coefficients.
//!
//! Reflection, expansion, contraction and shrink factors are `1`,
//! `1 + 2/n`, `3/4 − 1/(2n)` and `1 − 1/n`, which keeps the method effective
//! beyond a handful of variables. [`NelderMead::minimize`] restarts from the
//! incumbent with a fresh simplex until a restart no longer improves it.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMead {
    /// Edge length of the initial simplex, per coordinate.
    pub initial_step: f64,
    pub max_evals: usize,
    /// Stop when every vertex is within `x_tol` of the best one (max-norm)...
    pub x_tol: f64,
    /// ...and the objective spread across the simplex is below `f_tol`.
    pub f_tol: f64,
    pub max_restarts: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead { initial_step: 0.1, max_evals: 200_000, x_tol: 1e-10, f_tol: 1e-14, max_restarts: 20 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

struct Coefficients {
    reflect: f64,
    expand: f64,
    contract: f64,
    shrink: f64,
}

impl Coefficients {
    fn adaptive(n: usize) -> Self {
        let n = n as f64;
        Coefficients { reflect: 1.0, expand: 1.0 + 2.0 / n, contract: 0.75 - 0.5 / n, shrink: 1.0 - 1.0 / n }
    }
}

fn along(base: &[f64], dir_from: &[f64], t: f64) -> Vec<f64> {
    base.iter().zip(dir_from).map(|(c, w)| c + t * (c - w)).collect()
}

impl NelderMead {
    pub fn minimize<F>(&self, mut f: F, x0: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut best = Minimum { x: x0.to_vec(), value: f(x0), evals: 1, converged: false };
        let mut step = self.initial_step;
        for _ in 0..=self.max_restarts {
            let budget = self.max_evals.saturating_sub(best.evals);
            if budget == 0 {
                break;
            }
            let run = self.run(&mut f, &best.x, step, budget);
            let evals = best.evals + run.evals;
            let improved = best.value - run.value;
            if run.value <= best.value {
                best = Minimum { evals, ..run };
            } else {
                best.evals = evals;
            }
            if best.converged && improved <= self.f_tol {
                return best;
            }
            step = (step * 0.5).max(1e3 * self.x_tol);
        }
        best
    }

    fn run<F>(&self, f: &mut F, x0: &[f64], step: f64, budget: usize) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = x0.len();
        let c = Coefficients::adaptive(n.max(2));
        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        for i in 0..n {
            let mut v = x0.to_vec();
            v[i] += if v[i] == 0.0 { step } else { step * v[i].abs().max(1.0) };
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
        let mut evals = n + 1;
        let mut converged = false;

        while evals < budget {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let spread = values[n] - values[0];
            let size = simplex[1..]
                .iter()
                .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread <= self.f_tol && size <= self.x_tol {
                converged = true;
                break;
            }

            let mut centroid = vec![0.0; n];
            for v in &simplex[..n] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / n as f64;
                }
            }

            let xr = along(&centroid, &simplex[n], c.reflect);
            let fr = f(&xr);
            evals += 1;
            if fr < values[0] {
                let xe = along(&centroid, &simplex[n], c.reflect * c.expand);
                let fe = f(&xe);
                evals += 1;
                if fe < fr {
                    simplex[n] = xe;
                    values[n] = fe;
                } else {
                    simplex[n] = xr;
                    values[n] = fr;
                }
                continue;
            }
            if fr < values[n - 1] {
                simplex[n] = xr;
                values[n] = fr;
                continue;
            }
            let (xc, fc) = if fr < values[n] {
                let xc = along(&centroid, &simplex[n], c.reflect * c.contract);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(&centroid, &simplex[n], -c.contract);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < fr.min(values[n]) {
                simplex[n] = xc;
                values[n] = fc;
                continue;
            }
            for i in 1..=n {
                let best = simplex[0].clone();
                for (x, b) in simplex[i].iter_mut().zip(&best) {
                    *x = b + c.shrink * (*x - b);
                }
                values[i] = f(&simplex[i]);
            }
            evals += n;
        }

        let i = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b))).unwrap_or(0);
        Minimum { x: simplex[i].clone(), value: values[i], evals, converged }
    }
}

//! Derivative-free minimization with the Nelder–Mead simplex.
//!
//! Non-finite objective values (`+inf`, and `NaN`, which is mapped to
//! `+inf`) rank worse than every finite value, so an infinite penalty
//! expresses a constraint. A point is only ever accepted into the simplex
//! when it improves on the vertex it replaces, so a finite start never
//! yields an infinite minimum.

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOptions {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Convergence threshold on the spread of simplex values, relative to
    /// `max(1, |f_best|)`.
    pub f_tol: f64,
    /// Convergence threshold on the simplex diameter, relative to
    /// `max(1, |x_best|_inf)`.
    pub x_tol: f64,
    pub max_iterations: usize,
    /// Per-coordinate offsets of the initial simplex. `None` uses 5% of each
    /// start coordinate (0.00025 for zero coordinates).
    pub initial_step: Option<Vec<f64>>,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            f_tol: 1e-8,
            x_tol: 1e-8,
            max_iterations: 2000,
            initial_step: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub argmin: Vec<f64>,
    pub min: f64,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

pub fn nelder_mead(
    mut objective: impl FnMut(&[f64]) -> f64,
    start: &[f64],
    options: &NelderMeadOptions,
) -> NelderMeadResult {
    let dim = start.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], evaluations: &mut usize| {
        *evaluations += 1;
        sanitize(objective(x))
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for i in 0..dim {
        let mut v = start.to_vec();
        let step = match &options.initial_step {
            Some(steps) => steps[i],
            None if start[i] != 0.0 => 0.05 * start[i],
            None => 0.00025,
        };
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evaluations)).collect();

    let mut order: Vec<usize> = (0..=dim).collect();
    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; dim];
    let mut trial = vec![0.0; dim];
    let mut trial2 = vec![0.0; dim];

    loop {
        // Stable sort keeps the trajectory deterministic when values tie.
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim.saturating_sub(1)];

        if values[best].is_finite() && values[worst].is_finite() {
            let spread = values[worst] - values[best];
            let scale_x = simplex[best].iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            let diameter = order[1..]
                .iter()
                .map(|&i| {
                    simplex[i]
                        .iter()
                        .zip(&simplex[best])
                        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
                })
                .fold(0.0_f64, f64::max);
            if spread <= options.f_tol * values[best].abs().max(1.0)
                && diameter <= options.x_tol * scale_x
            {
                converged = true;
                break;
            }
        }
        if iterations >= options.max_iterations {
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..dim] {
            for (c, v) in centroid.iter_mut().zip(&simplex[i]) {
                *c += v;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= dim as f64);

        let along = |out: &mut Vec<f64>, coef: f64, from: &[f64], centroid: &[f64]| {
            for ((o, c), w) in out.iter_mut().zip(centroid).zip(from) {
                *o = c + coef * (c - w);
            }
        };

        along(&mut trial, options.reflection, &simplex[worst], &centroid);
        let f_reflect = eval(&trial, &mut evaluations);

        if f_reflect < values[best] {
            along(
                &mut trial2,
                options.reflection * options.expansion,
                &simplex[worst],
                &centroid,
            );
            let f_expand = eval(&trial2, &mut evaluations);
            if f_expand < f_reflect {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = f_expand;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = f_reflect;
            }
            continue;
        }
        if f_reflect < values[second_worst] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = f_reflect;
            continue;
        }
        if f_reflect < values[worst] {
            along(
                &mut trial2,
                options.reflection * options.contraction,
                &simplex[worst],
                &centroid,
            );
            let f_contract = eval(&trial2, &mut evaluations);
            if f_contract <= f_reflect {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = f_contract;
                continue;
            }
        } else {
            along(
                &mut trial2,
                -options.contraction,
                &simplex[worst],
                &centroid,
            );
            let f_contract = eval(&trial2, &mut evaluations);
            if f_contract < values[worst] {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = f_contract;
                continue;
            }
        }

        let anchor = simplex[best].clone();
        for &i in &order[1..] {
            for (v, a) in simplex[i].iter_mut().zip(&anchor) {
                *v = a + options.shrink * (*v - a);
            }
            values[i] = eval(&simplex[i], &mut evaluations);
        }
    }

    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let best = order[0];
    NelderMeadResult {
        argmin: simplex[best].clone(),
        min: values[best],
        converged,
        iterations,
        evaluations,
    }
}

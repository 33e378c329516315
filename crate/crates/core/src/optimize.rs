//! Bounded two-parameter maximisation: coarse grid, then Nelder-Mead.

/// Result of a Nelder-Mead run.
#[derive(Debug, Clone, Copy)]
pub struct SimplexOutcome {
    pub point: [f64; 2],
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Maximises `f` starting from `start` with initial steps `step`.
///
/// Non-finite values count as worse than any finite one, so `f` can signal
/// an infeasible point by returning `f64::NEG_INFINITY`. The returned value
/// never drops below `f(start)`.
pub fn nelder_mead_max<F>(mut f: F, start: [f64; 2], step: [f64; 2], max_evals: usize, rel_tol: f64) -> SimplexOutcome
where
    F: FnMut([f64; 2]) -> f64,
{
    let evals = std::cell::Cell::new(0usize);
    let mut eval = |x: [f64; 2]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        // minimise the negated objective
        if v.is_finite() {
            -v
        } else {
            f64::INFINITY
        }
    };

    let mut simplex = [start, [start[0] + step[0], start[1]], [start[0], start[1] + step[1]]];
    let mut values = [eval(simplex[0]), eval(simplex[1]), eval(simplex[2])];
    let mut converged = false;

    while evals.get() < max_evals {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = [simplex[order[0]], simplex[order[1]], simplex[order[2]]];
        values = [values[order[0]], values[order[1]], values[order[2]]];

        let (best, worst) = (values[0], values[2]);
        if best.is_finite() && (worst - best).abs() <= rel_tol * best.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }

        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |c: f64| {
            [
                centroid[0] + c * (simplex[2][0] - centroid[0]),
                centroid[1] + c * (simplex[2][1] - centroid[1]),
            ]
        };

        let reflected = along(-1.0);
        let fr = eval(reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = eval(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
            continue;
        }
        if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
            continue;
        }
        let contracted = if fr < values[2] { along(-0.5) } else { along(0.5) };
        let fc = eval(contracted);
        if fc < values[2].min(fr) {
            simplex[2] = contracted;
            values[2] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..3 {
            simplex[i] = [
                0.5 * (simplex[0][0] + simplex[i][0]),
                0.5 * (simplex[0][1] + simplex[i][1]),
            ];
            values[i] = eval(simplex[i]);
        }
    }

    let mut best = 0;
    for i in 1..3 {
        if values[i] < values[best] {
            best = i;
        }
    }
    SimplexOutcome {
        point: simplex[best],
        value: -values[best],
        evaluations: evals.get(),
        converged,
    }
}

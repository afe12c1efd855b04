//! Nelder-Mead simplex minimizer over a projected parameter box.
//!
//! Every candidate point is passed through the projection before evaluation,
//! so the simplex never leaves the feasible set and the objective can assume
//! valid parameters. Non-finite objective values are treated as infinitely
//! bad rather than poisoning comparisons.

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const SPREAD_TOL: f64 = 1e-12;

fn sanitize(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

/// Minimizes `f` starting from `init`, building the initial simplex by
/// stepping each coordinate by `steps[i]`. Returns the best projected point
/// and its objective value.
pub(crate) fn minimize<F, P>(
    f: &F,
    project: &P,
    init: &[f64],
    steps: &[f64],
    max_iters: usize,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    let dim = init.len();
    assert_eq!(steps.len(), dim, "one step per coordinate");

    let eval = |x: &mut Vec<f64>| -> f64 {
        project(x);
        sanitize(f(x))
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let mut base = init.to_vec();
    let fb = eval(&mut base);
    simplex.push((base.clone(), fb));
    for i in 0..dim {
        let mut p = base.clone();
        p[i] += steps[i];
        let fp = eval(&mut p);
        simplex.push((p, fp));
    }

    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("sanitized objective"));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if worst.is_finite() && worst - best <= SPREAD_TOL * (1.0 + best.abs()) {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (p, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v;
            }
        }
        for c in &mut centroid {
            *c /= dim as f64;
        }

        let blend = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let mut reflected = blend(REFLECT);
        let fr = eval(&mut reflected);
        if fr < simplex[0].1 {
            let mut expanded = blend(EXPAND);
            let fe = eval(&mut expanded);
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            // Inside contraction toward the centroid.
            let mut contracted = blend(-CONTRACT);
            let fc = eval(&mut contracted);
            if fc < simplex[dim].1 {
                simplex[dim] = (contracted, fc);
            } else {
                let anchor = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let mut shrunk: Vec<f64> = anchor
                        .iter()
                        .zip(&entry.0)
                        .map(|(a, p)| a + SHRINK * (p - a))
                        .collect();
                    let fs = eval(&mut shrunk);
                    *entry = (shrunk, fs);
                }
            }
        }
    }

    simplex
        .into_iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).expect("sanitized objective"))
        .expect("nonempty simplex")
}

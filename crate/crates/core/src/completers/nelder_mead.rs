//! Nelder-Mead simplex minimization with the standard Lagarias coefficients
//! (reflection 1, expansion 2, contraction 1/2, shrink 1/2) and the
//! fminsearch-style stopping rule on simplex diameter and value spread.

#[derive(Clone, Copy, Debug)]
pub struct NmOptions {
    /// Stop when all vertices sit within this distance of the best one.
    pub x_tol: f64,
    /// Stop when all vertex values sit within this of the best one.
    pub f_tol: f64,
    pub max_evals: usize,
}

impl Default for NmOptions {
    fn default() -> Self {
        Self { x_tol: 1e-12, f_tol: 1e-14, max_evals: 500 }
    }
}

#[derive(Clone, Debug)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimize `f` from `x0`, with the initial simplex offset by `step` along
/// each coordinate.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], step: &[f64], opts: &NmOptions) -> NmResult {
    let dim = x0.len();
    assert!(dim > 0 && step.len() == dim);
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += step[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evals)).collect();

    let mut converged = false;
    while evals < opts.max_evals {
        // order best..worst
        let mut idx: Vec<usize> = (0..=dim).collect();
        idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("objective returned NaN"));
        let reorder: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let revalue: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
        simplex = reorder;
        values = revalue;

        let spread_f = values[dim] - values[0];
        let spread_x = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max);
        if spread_f.abs() <= opts.f_tol && spread_x <= opts.x_tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|v| v[i]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let reflect: Vec<f64> = centroid.iter().zip(&worst).map(|(c, w)| 2.0 * c - w).collect();
        let f_reflect = eval(&reflect, &mut evals);

        if f_reflect < values[0] {
            let expand: Vec<f64> = centroid.iter().zip(&worst).map(|(c, w)| 3.0 * c - 2.0 * w).collect();
            let f_expand = eval(&expand, &mut evals);
            if f_expand < f_reflect {
                simplex[dim] = expand;
                values[dim] = f_expand;
            } else {
                simplex[dim] = reflect;
                values[dim] = f_reflect;
            }
        } else if f_reflect < values[dim - 1] {
            simplex[dim] = reflect;
            values[dim] = f_reflect;
        } else {
            // contract (outside toward the reflection when it improved)
            let (anchor, f_anchor) = if f_reflect < values[dim] {
                (&reflect, f_reflect)
            } else {
                (&worst, values[dim])
            };
            let contract: Vec<f64> = centroid.iter().zip(anchor).map(|(c, a)| 0.5 * (c + a)).collect();
            let f_contract = eval(&contract, &mut evals);
            if f_contract < f_anchor {
                simplex[dim] = contract;
                values[dim] = f_contract;
            } else {
                // shrink toward the best vertex
                for i in 1..=dim {
                    let shrunk: Vec<f64> = simplex[i]
                        .iter()
                        .zip(&simplex[0])
                        .map(|(v, b)| b + 0.5 * (v - b))
                        .collect();
                    values[i] = eval(&shrunk, &mut evals);
                    simplex[i] = shrunk;
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=dim {
        if values[i] < values[best] {
            best = i;
        }
    }
    NmResult { x: simplex[best].clone(), fx: values[best], evals, converged }
}

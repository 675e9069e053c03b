//! Nelder-Mead minimizer used by the three-parameter fits.

pub struct Outcome<const N: usize> {
    pub point: [f64; N],
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub fn minimize<const N: usize, F: Fn(&[f64; N]) -> f64>(
    f: F,
    start: [f64; N],
    steps: [f64; N],
    ftol: f64,
    max_iter: usize,
) -> Outcome<N> {
    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((start, f(&start)));
    for i in 0..N {
        let mut p = start;
        p[i] += steps[i];
        simplex.push((p, f(&p)));
    }

    let lerp = |a: &[f64; N], b: &[f64; N], t: f64| -> [f64; N] {
        let mut out = [0.0; N];
        for k in 0..N {
            out[k] = a[k] + t * (b[k] - a[k]);
        }
        out
    };

    for iter in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[N].1;
        if (worst - best).abs() <= ftol * (best.abs() + ftol) {
            let (point, value) = simplex[0];
            return Outcome { point, value, converged: true, iterations: iter };
        }

        let mut centroid = [0.0; N];
        for (p, _) in &simplex[..N] {
            for k in 0..N {
                centroid[k] += p[k] / N as f64;
            }
        }
        let worst_pt = simplex[N].0;
        let reflected = lerp(&centroid, &worst_pt, -1.0);
        let fr = f(&reflected);

        if fr < best {
            let expanded = lerp(&centroid, &worst_pt, -2.0);
            let fe = f(&expanded);
            simplex[N] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[N - 1].1 {
            simplex[N] = (reflected, fr);
        } else {
            let (target, ft) = if fr < worst { (reflected, fr) } else { (worst_pt, worst) };
            let contracted = lerp(&centroid, &target, 0.5);
            let fc = f(&contracted);
            if fc < ft {
                simplex[N] = (contracted, fc);
            } else {
                let best_pt = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    let p = lerp(&best_pt, &entry.0, 0.5);
                    *entry = (p, f(&p));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, value) = simplex[0];
    Outcome { point, value, converged: false, iterations: max_iter }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let out = minimize(
            |p: &[f64; 2]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2),
            [-1.2, 1.0],
            [0.5, 0.5],
            1e-16,
            10_000,
        );
        assert!(out.converged);
        assert!((out.point[0] - 1.0).abs() < 1e-4 && (out.point[1] - 1.0).abs() < 1e-4);
    }
}

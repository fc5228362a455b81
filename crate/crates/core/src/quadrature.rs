//! Gauss-Legendre rules.

use crate::scalar::Real;

/// An `order`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Builds the rule by Newton iteration on the Legendre polynomial, in `f64`.
    ///
    /// Panics if `order == 0`.
    pub fn new(order: usize) -> Self {
        assert!(order > 0, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre {
            nodes: nodes.into_iter().map(T::lit).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Integrates over `[a, b]` split at every breakpoint strictly inside it.
    pub fn integrate_split<F: FnMut(T) -> T>(&self, a: T, b: T, breaks: &[T], mut f: F) -> T {
        let cuts = panel_edges(a, b, breaks);
        cuts.windows(2)
            .map(|w| self.integrate(w[0], w[1], &mut f))
            .sum()
    }
}

/// Sorted panel edges `a = e0 < e1 < ... < ek = b` from the breakpoints inside `(a, b)`.
pub fn panel_edges<T: Real>(a: T, b: T, breaks: &[T]) -> Vec<T> {
    let mut edges = vec![a];
    let mut inner: Vec<T> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    inner.dedup();
    edges.extend(inner);
    edges.push(b);
    edges
}

// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_interval_length() {
        for order in [1, 2, 3, 7, 16, 32, 64] {
            let rule = GaussLegendre::<f64>::new(order);
            let total: f64 = rule.mapped(0.0, 3.0).map(|(_, w)| w).sum();
            assert_relative_eq!(total, 3.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn exact_for_degree_2n_minus_1() {
        let rule = GaussLegendre::<f64>::new(5);
        // x^9 on [0, 1] -> 1/10
        assert_relative_eq!(rule.integrate(0.0, 1.0, |x| x.powi(9)), 0.1, epsilon = 1e-14);
        let rule = GaussLegendre::<f64>::new(32);
        assert_relative_eq!(
            rule.integrate(-1.0, 2.0, |x| x.powi(63)),
            (2f64.powi(64) - 1.0) / 64.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn split_handles_kink() {
        let rule = GaussLegendre::<f64>::new(4);
        let v = rule.integrate_split(0.0, 1.0, &[0.5], |x| (x - 0.5).abs());
        assert_relative_eq!(v, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn f32_rule() {
        let rule = GaussLegendre::<f32>::new(8);
        assert!((rule.integrate(0.0f32, 1.0, |x| x * x) - 1.0 / 3.0).abs() < 1e-6);
    }
}

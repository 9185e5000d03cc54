//! Gauss–Legendre nodes and weights on [-1, 1].

/// Nodes and weights of the n-point Gauss–Legendre rule.
///
/// Newton iteration on the Legendre recurrence; accurate to machine
/// precision for the moderate n used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_and_derivative(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate `f` over `[a, b]` with one n-point Gauss–Legendre panel.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_low_degree_polynomials() {
        // n-point rule is exact through degree 2n-1
        let v = integrate(|x| x * x * x * x, -1.0, 1.0, 3);
        assert!((v - 0.4).abs() < 1e-14);
    }

    #[test]
    fn exponential_integral() {
        let v = integrate(f64::exp, -1.0, 1.0, 20);
        let exact = 1f64.exp() - (-1f64).exp();
        assert!((v - exact).abs() < 1e-14);
    }

    #[test]
    fn nodes_are_symmetric_and_weights_sum_to_two() {
        for n in [5, 16, 33, 64] {
            let (xs, ws) = gauss_legendre(n);
            let s: f64 = ws.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}: weight sum {s}");
            for i in 0..n {
                assert!((xs[i] + xs[n - 1 - i]).abs() < 1e-14);
            }
        }
    }
}

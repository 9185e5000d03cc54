//! Finite-difference weights on arbitrary nodes (Fornberg's algorithm).

/// Weights for the m-th derivative at `z` from samples at `nodes`.
///
/// Returns a table `w[d][j]` with the weight of node j for derivative order d,
/// for all d = 0..=m.
pub fn fd_weights(z: f64, nodes: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    assert!(n > m, "need more nodes than the derivative order");
    let mut w = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    w[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for d in (1..=mn).rev() {
                    w[d][i] = c1 * (d as f64 * w[d - 1][i - 1] - c5 * w[d][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for d in (1..=mn).rev() {
                w[d][j] = (c4 * w[d][j] - d as f64 * w[d - 1][j]) / c3;
            }
            w[0][j] = c4 * w[0][j] / c3;
        }
        c1 = c2;
    }
    w
}

/// Symmetric central stencil (half-width `r`) for the m-th derivative on a
/// uniform grid with spacing `h`, centered at 0.
pub fn central_weights(r: usize, h: f64, m: usize) -> Vec<f64> {
    let nodes: Vec<f64> = (-(r as i64)..=r as i64).map(|i| i as f64 * h).collect();
    fd_weights(0.0, &nodes, m).swap_remove(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_point_fourth_derivative_exact_on_quartics() {
        let h = 0.1;
        let w = central_weights(2, h, 4);
        // x^4 has fourth derivative 24 everywhere
        let v: f64 = (-2..=2)
            .map(|i| {
                let x = i as f64 * h;
                x * x * x * x
            })
            .zip(&w)
            .map(|(f, c)| f * c)
            .sum();
        assert!((v - 24.0).abs() < 1e-9, "{v}");
        // classical coefficients 1 -4 6 -4 1 over h^4
        assert!((w[0] * h.powi(4) - 1.0).abs() < 1e-10);
        assert!((w[2] * h.powi(4) - 6.0).abs() < 1e-10);
    }

    #[test]
    fn nine_point_fourth_derivative_is_order_six() {
        let f = |x: f64| (1.3 * x + 0.4).sin();
        let exact = 1.3f64.powi(4) * 0.4f64.sin();
        let mut errs = Vec::new();
        for h in [0.2, 0.1] {
            let w = central_weights(4, h, 4);
            let v: f64 = (-4..=4)
                .map(|i| f(i as f64 * h))
                .zip(&w)
                .map(|(fv, c)| fv * c)
                .sum();
            errs.push((v - exact).abs());
        }
        // halving h should cut the error by ~2^6
        assert!(errs[1] < errs[0] / 40.0, "{errs:?}");
    }

    #[test]
    fn second_derivative_stencils() {
        let h = 0.2;
        let w = central_weights(1, h, 2);
        assert!((w[0] * h * h - 1.0).abs() < 1e-12);
        assert!((w[1] * h * h + 2.0).abs() < 1e-12);
    }
}

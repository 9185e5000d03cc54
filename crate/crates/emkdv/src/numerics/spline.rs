//! Natural cubic spline interpolation on a sorted grid.

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots (natural boundary conditions).
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, String> {
        let n = x.len();
        if n < 3 {
            return Err("spline needs at least 3 knots".into());
        }
        if y.len() != n {
            return Err("x/y length mismatch".into());
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err("spline knots must be strictly increasing".into());
        }
        // Tridiagonal system for the natural second-derivative values.
        let mut m = vec![0.0; n];
        let mut c_diag = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let a = h0 / 6.0;
            let b = (h0 + h1) / 3.0;
            let c = h1 / 6.0;
            let d = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
            // Thomas sweep (first and last rows are identity: m = 0).
            let w = if i == 1 { b } else { b - a * c_diag[i - 1] };
            c_diag[i] = c / w;
            rhs[i] = (d - if i == 1 { 0.0 } else { a * rhs[i - 1] }) / w;
        }
        for i in (1..n - 1).rev() {
            m[i] = rhs[i] - c_diag[i] * m[i + 1];
        }
        Ok(CubicSpline { x, y, m })
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().unwrap()
    }

    fn segment(&self, x: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.clamp(1, self.x.len() - 1) - 1,
        }
    }

    /// Interpolated value; exact at the knots. Panics outside the hull only in
    /// debug builds; callers enforce range.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - x) / h;
        let b = (x - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    /// First derivative of the interpolant.
    pub fn deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - x) / h;
        let b = (x - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }
}

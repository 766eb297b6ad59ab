//! Closed forms of the model's expected profits when the foreign price is
//! exponential with the given mean.

/// Scalars of one game instance.
#[derive(Debug, Clone, Copy)]
pub struct Game {
    pub alpha: f64,
    pub value: f64,
    pub tau: f64,
    pub mean: f64,
}

impl Game {
    fn surv(&self, x: f64) -> f64 {
        (-x.max(0.0) / self.mean).exp()
    }

    /// `∫_lo^hi (p + k) dF(p)`.
    fn first_moment(&self, lo: f64, hi: f64, k: f64) -> f64 {
        let m = self.mean;
        (lo + k + m) * self.surv(lo) - (hi + k + m) * self.surv(hi)
    }

    /// `∫_lo^hi dF(p)`.
    fn mass(&self, lo: f64, hi: f64) -> f64 {
        self.surv(lo) - self.surv(hi)
    }

    fn cutoffs(&self, cost: f64) -> (f64, f64) {
        ((cost - self.tau).max(0.0), (self.value - self.tau).max(0.0))
    }

    pub fn seller(&self, cost: f64, e: f64) -> f64 {
        if cost >= self.value {
            return -e;
        }
        let (a, b) = self.cutoffs(cost);
        self.alpha * self.first_moment(a, b, self.tau - cost)
            + self.alpha * (self.value - cost) * self.surv(b)
            - e
    }

    pub fn buyer(&self, cost: f64) -> f64 {
        let (a, b) = self.cutoffs(cost);
        if cost >= self.value {
            return -self.first_moment(0.0, b, self.tau - self.value);
        }
        let v = self.value;
        -self.first_moment(0.0, a, self.tau - v) - self.alpha * self.first_moment(a, b, self.tau)
            + (v - (1.0 - self.alpha) * cost) * self.mass(a, b)
            + (1.0 - self.alpha) * (v - cost) * self.surv(b)
    }

    pub fn integrated(&self, cost: f64, e: f64) -> f64 {
        let (a, b) = self.cutoffs(cost);
        if cost >= self.value {
            return -self.first_moment(0.0, b, self.tau - self.value) - e;
        }
        -self.first_moment(0.0, a, self.tau - self.value) + (self.value - cost) * self.surv(a) - e
    }

    /// `E[max(V - min(c, p_f + τ), 0)]` by composite Simpson on `[0, V - τ]`
    /// split at the import cutoff; beyond `V - τ` the integrand is the
    /// constant `(V - c)^+`.
    pub fn joint_surplus_simpson(&self, cost: f64, panels: usize) -> f64 {
        let (v, tau, m) = (self.value, self.tau, self.mean);
        let g = |p: f64| (v - cost.min(p + tau)).max(0.0) * (-p / m).exp() / m;
        let (a, b) = self.cutoffs(cost);
        let a = a.min(b);
        simpson(g, 0.0, a, panels) + simpson(g, a, b, panels) + (v - cost).max(0.0) * self.surv(b)
    }
}

pub fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let n = 2 * panels.max(1);
    let h = (hi - lo) / n as f64;
    let mut sum = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(lo + h * i as f64);
    }
    sum * h / 3.0
}

//! Small numerical helpers shared across modules.

/// Neumaier-compensated accumulator. Keeps sums of |amplitude|^2 and of
/// distribution moments accurate to ~1 ulp even for a few hundred terms.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of an iterator of f64 terms.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = KahanSum::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// Bisect for the point where a decreasing function crosses `target`.
///
/// Requires `f(lo) >= target >= f(hi)`. Returns the abscissa to within
/// `tol`; panics only if the bracket is invalid, which callers rule out.
pub fn bisect_decreasing(
    mut lo: f64,
    mut hi: f64,
    target: f64,
    tol: f64,
    f: impl Fn(f64) -> f64,
) -> f64 {
    debug_assert!(lo < hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_cancellation() {
        // 1 + 1e-16 repeated: naive summation drops every increment.
        let mut acc = KahanSum::new();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(1e-16);
        }
        assert!((acc.total() - (1.0 + 1000.0 * 1e-16)).abs() < 1e-18);
    }

    #[test]
    fn bisect_finds_root_of_decreasing_function() {
        let x = bisect_decreasing(0.0, 10.0, 0.5, 1e-12, |t| (-t).exp());
        assert!((x - std::f64::consts::LN_2).abs() < 1e-10);
    }
}

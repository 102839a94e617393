//! Ion-field coupling constants: the exact matrix element of the cosine,
//! its Lamb-Dicke linearization, and the validity-ratio surface between
//! them.
//!
//! The exact coupling at vibrational level m is
//! `lambda(m) = e^{-eta²/2} L_m(eta²)` (Laguerre polynomial); the
//! Lamb-Dicke approximation keeps only the linear-in-m term,
//! `lambda_LD(m) = 1 - eta² (1 + 2m) / 2`. The ratio R = lambda/lambda_LD
//! maps out where the linearization holds.

use std::io::Write;

use crate::Result;

/// Flagged-cell threshold: where the Lamb-Dicke coupling falls to this
/// level the ratio R diverges and the grid emits `nan` instead.
pub const LD_DENOMINATOR_FLOOR: f64 = 1e-6;

/// Laguerre polynomial L_m(x) by the three-term recurrence
/// `(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}`.
///
/// For the small arguments used here (x = eta² « 1) the recurrence is
/// stable; the alternating binomial series is kept to test code.
pub fn laguerre(m: usize, x: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mut prev = 1.0; // L_0
    let mut curr = 1.0 - x; // L_1
    for k in 1..m {
        let next = ((2 * k + 1) as f64 - x) * curr - k as f64 * prev;
        prev = curr;
        curr = next / (k + 1) as f64;
    }
    curr
}

/// Exact carrier coupling `e^{-eta²/2} L_m(eta²)` at vibrational level m.
pub fn coupling_exact(eta: f64, m: usize) -> f64 {
    let x = eta * eta;
    (-0.5 * x).exp() * laguerre(m, x)
}

/// Lamb-Dicke coupling `1 - eta² (1 + 2m) / 2`.
pub fn coupling_ld(eta: f64, m: usize) -> f64 {
    1.0 - 0.5 * eta * eta * (1.0 + 2.0 * m as f64)
}

/// Which coupling law a computation uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingKind {
    Exact,
    LambDicke,
}

/// A coupling law bound to a Lamb-Dicke parameter, evaluable at any m.
#[derive(Clone, Copy, Debug)]
pub struct CouplingProfile {
    pub kind: CouplingKind,
    pub eta: f64,
}

impl CouplingProfile {
    pub fn exact(eta: f64) -> Self {
        Self {
            kind: CouplingKind::Exact,
            eta,
        }
    }

    pub fn lamb_dicke(eta: f64) -> Self {
        Self {
            kind: CouplingKind::LambDicke,
            eta,
        }
    }

    pub fn eval(&self, m: usize) -> f64 {
        match self.kind {
            CouplingKind::Exact => coupling_exact(self.eta, m),
            CouplingKind::LambDicke => coupling_ld(self.eta, m),
        }
    }
}

/// One cell of the validity surface. `ratio` is `None` where the
/// Lamb-Dicke denominator has fallen under [`LD_DENOMINATOR_FLOOR`].
#[derive(Clone, Copy, Debug)]
pub struct ValidityCell {
    pub eta: f64,
    pub m: usize,
    pub ratio: Option<f64>,
}

/// The ratio surface R(eta, m) = coupling_exact / coupling_ld on a grid.
#[derive(Clone, Debug)]
pub struct ValidityGrid {
    cells: Vec<ValidityCell>,
}

impl ValidityGrid {
    pub fn cells(&self) -> &[ValidityCell] {
        &self.cells
    }

    /// Cells whose ratio lies within `[lo, hi]` — the region where the
    /// Lamb-Dicke generation protocol is applicable.
    pub fn within(&self, lo: f64, hi: f64) -> impl Iterator<Item = &ValidityCell> {
        self.cells
            .iter()
            .filter(move |c| c.ratio.is_some_and(|r| r >= lo && r <= hi))
    }

    /// CSV rows `eta,m,R`; flagged cells emit `nan`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "eta,m,R")?;
        for cell in &self.cells {
            match cell.ratio {
                Some(r) => writeln!(w, "{},{},{}", cell.eta, cell.m, r)?,
                None => writeln!(w, "{},{},nan", cell.eta, cell.m)?,
            }
        }
        Ok(())
    }
}

/// Evaluate R(eta, m) over `eta_start..=eta_stop` (step `eta_step`) and
/// `m in 0..=m_max`. Grid points where the Lamb-Dicke coupling is at or
/// below [`LD_DENOMINATOR_FLOOR`] are flagged rather than divided through.
pub fn validity_grid(eta_start: f64, eta_stop: f64, eta_step: f64, m_max: usize) -> ValidityGrid {
    assert!(eta_step > 0.0 && eta_start > 0.0 && eta_stop >= eta_start);
    let n_eta = ((eta_stop - eta_start) / eta_step + 1.0 + 1e-9).floor() as usize;
    let mut cells = Vec::with_capacity(n_eta * (m_max + 1));
    for i in 0..n_eta {
        let eta = eta_start + i as f64 * eta_step;
        for m in 0..=m_max {
            let denom = coupling_ld(eta, m);
            let ratio = (denom > LD_DENOMINATOR_FLOOR).then(|| coupling_exact(eta, m) / denom);
            cells.push(ValidityCell { eta, m, ratio });
        }
    }
    ValidityGrid { cells }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force alternating series L_m(x) = Σ_k C(m,k) (-x)^k / k!,
    /// the independent oracle for the recurrence.
    fn laguerre_series(m: usize, x: f64) -> f64 {
        let mut total = 0.0;
        let mut term = 1.0; // C(m,0) (-x)^0 / 0!
        total += term;
        for k in 1..=m {
            // C(m,k)/C(m,k-1) = (m-k+1)/k, and the 1/k! adds another 1/k.
            term *= -(x) * (m - k + 1) as f64 / (k as f64 * k as f64);
            total += term;
        }
        total
    }

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre(0, 0.37), 1.0);
        assert_eq!(laguerre(0, -5.0), 1.0);
        assert!((laguerre(1, 0.0025) - 0.9975).abs() < 1e-15);
        // L_2(x) = 1 - 2x + x²/2 at x = 0.0025, exact value 0.995003125.
        assert!((laguerre(2, 0.0025) - 0.995003125).abs() < 1e-15);
    }

    #[test]
    fn laguerre_recurrence_matches_series() {
        for m in 0..=30 {
            for &x in &[1e-4, 0.0025, 0.01, 0.09, 0.25, 1.0] {
                let rec = laguerre(m, x);
                let series = laguerre_series(m, x);
                assert!(
                    (rec - series).abs() <= 1e-10 * series.abs().max(1e-30),
                    "m={m} x={x}: {rec} vs {series}"
                );
            }
        }
    }

    #[test]
    fn coupling_exact_values() {
        assert!((coupling_exact(0.05, 0) - (-0.00125_f64).exp()).abs() < 1e-15);
        assert!((coupling_exact(0.05, 0) - 0.9987508).abs() < 1e-7);
        let expected_m10 = (-0.00125_f64).exp() * laguerre_series(10, 0.0025);
        assert!((coupling_exact(0.05, 10) - expected_m10).abs() < 1e-13);
    }

    #[test]
    fn coupling_exact_limit_eta_to_zero() {
        for m in [0, 1, 10, 100] {
            assert!((coupling_exact(1e-8, m) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coupling_exact_is_a_cosine_matrix_element() {
        // |<m| cos(...) |m>| <= 1, with equality only in the eta -> 0 limit.
        for m in 0..=40 {
            for &eta in &[0.01, 0.05, 0.1, 0.3, 0.8, 2.0] {
                let lam = coupling_exact(eta, m);
                assert!(lam > -1.0 && lam <= 1.0, "eta={eta} m={m}: {lam}");
            }
        }
    }

    #[test]
    fn coupling_ld_values() {
        assert!((coupling_ld(0.05, 0) - 0.99875).abs() < 1e-15);
        assert!((coupling_ld(0.05, 4) - 0.98875).abs() < 1e-15);
        assert!((coupling_ld(1e-9, 7) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quartic_error_scaling_in_eta() {
        // |exact - LD| should scale like eta^4: the log-log slope between
        // successive eta halvings approaches 4.
        for m in [0, 3, 10, 20] {
            let err = |eta: f64| (coupling_exact(eta, m) - coupling_ld(eta, m)).abs();
            let slope = (err(0.2) / err(0.1)).log2();
            assert!(
                (slope - 4.0).abs() < 0.35,
                "m={m}: slope {slope}"
            );
            // and the constant stays moderate over the quoted range
            for &eta in &[0.05f64, 0.1, 0.2, 0.3] {
                let bound = 1.0 * eta.powi(4) * ((1 + m) as f64).powi(2);
                assert!(err(eta) <= bound, "m={m} eta={eta}: {} > {bound}", err(eta));
            }
        }
    }

    #[test]
    fn small_eta_grid_is_flat_at_one() {
        let grid = validity_grid(0.01, 0.01, 0.01, 10);
        for cell in grid.cells() {
            let r = cell.ratio.expect("no flagged cells at eta = 0.01");
            assert!((r - 1.0).abs() < 1e-6, "eta=0.01 m={}: R={r}", cell.m);
        }
    }

    #[test]
    fn default_figure_grid_has_valid_region_and_no_panic() {
        let grid = validity_grid(0.01, 0.5, 0.01, 30);
        assert_eq!(grid.cells().len(), 50 * 31);
        // the working point (paper uses eta = 0.05) is deep in the valid band
        assert!(grid
            .within(0.99, 1.01)
            .any(|c| (c.eta - 0.05).abs() < 1e-12 && c.m == 0));
        // large-eta, large-m corner: LD coupling crosses zero somewhere,
        // which must flag cells rather than crash.
        let flagged = grid.cells().iter().filter(|c| c.ratio.is_none()).count();
        let crossing = grid
            .cells()
            .iter()
            .filter(|c| c.ratio.is_some_and(|r| !(0.0..=2.0).contains(&r)))
            .count();
        assert!(flagged + crossing > 0, "expected a breakdown region");
    }

    #[test]
    fn csv_grid_format() {
        let grid = validity_grid(0.01, 0.02, 0.01, 1);
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("eta,m,R"));
        assert_eq!(text.lines().count(), 1 + 4);
        assert!(text.lines().skip(1).all(|l| l.split(',').count() == 3));
    }
}

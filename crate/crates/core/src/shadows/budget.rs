use crate::error::{Error, Result};

/// Constant in front of `3^l log(M) / eps^2`, fixed from failure-proportion
/// simulations.
pub const BUDGET_CONSTANT: f64 = 4.0;

/// Number of randomized Pauli snapshots for `m` observables of locality `l`
/// at additive error `epsilon`: `ceil(4 * 3^l * ln(m) / epsilon^2)`.
///
/// For `l = 2` this is `36 ln(m) / epsilon^2`.
pub fn snapshot_budget(m: usize, locality: u32, epsilon: f64) -> Result<usize> {
    if m < 2 {
        return Err(Error::BudgetTooFewObservables(m));
    }
    snapshot_budget_for_log(libm::log(m as f64), locality, epsilon)
}

/// [`snapshot_budget`] with `ln(m)` supplied directly.
pub fn snapshot_budget_for_log(ln_m: f64, locality: u32, epsilon: f64) -> Result<usize> {
    if locality == 0 {
        return Err(Error::InvalidParams("locality must be at least 1"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParams("epsilon must be positive"));
    }
    if !(ln_m > 0.0 && ln_m.is_finite()) {
        return Err(Error::InvalidParams("log of the observable count must be positive"));
    }
    let t = BUDGET_CONSTANT * libm::pow(3.0, locality as f64) * ln_m / (epsilon * epsilon);
    Ok(libm::ceil(t) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annni_and_ladder_budgets() {
        // 3600 ln 63 = 14915.28..., 3600 ln 30 = 12244.3...
        assert_eq!(snapshot_budget(63, 2, 0.1).unwrap(), 14916);
        assert_eq!(snapshot_budget(30, 2, 0.1).unwrap(), 12245);
    }

    #[test]
    fn unit_log() {
        assert_eq!(snapshot_budget_for_log(1.0, 1, 1.0).unwrap(), 12);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert_eq!(snapshot_budget(1, 2, 0.1), Err(Error::BudgetTooFewObservables(1)));
        assert_eq!(snapshot_budget(0, 2, 0.1), Err(Error::BudgetTooFewObservables(0)));
        assert!(snapshot_budget(10, 0, 0.1).is_err());
        assert!(snapshot_budget(10, 2, 0.0).is_err());
    }

    #[test]
    fn monotone_in_every_argument() {
        let base = snapshot_budget(20, 2, 0.1).unwrap();
        assert!(snapshot_budget(40, 2, 0.1).unwrap() > base);
        assert!(snapshot_budget(20, 3, 0.1).unwrap() > base);
        assert!(snapshot_budget(20, 2, 0.05).unwrap() > base);
    }
}

//! Compensated summation and trapezoid rules.
//!
//! Every reduction over modes in this crate goes through [`neumaier_sum`] so
//! results do not depend on how a caller chunks the work.

/// Neumaier's variant of Kahan summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Trapezoid rule on a uniform grid of spacing `dx`.
pub fn trapezoid_uniform(values: &[f64], dx: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner = neumaier_sum(values[1..n - 1].iter().copied());
            dx * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

/// Trapezoid rule on an arbitrary increasing abscissa.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "abscissa and ordinate lengths differ");
    neumaier_sum(
        x.windows(2)
            .zip(y.windows(2))
            .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1])),
    )
}

/// Trapezoid weights for a uniform grid (`dx/2` at the ends, `dx` inside).
pub fn trapezoid_weights(n: usize, dx: f64) -> Vec<f64> {
    let mut w = vec![dx; n];
    if n >= 1 {
        w[0] = 0.5 * dx;
        w[n - 1] = 0.5 * dx;
    }
    if n == 1 {
        w[0] = 0.0;
    }
    w
}

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderKind {
    /// Every error sits at or below the round-off floor.
    Exact,
    Measured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    pub kind: OrderKind,
    /// Least-squares slope of `log e` against `log h` over the points above
    /// the floor; `None` for [`OrderKind::Exact`].
    pub order: Option<f64>,
    /// Successive `log(e_i/e_{i+1}) / log(h_i/h_{i+1})`.
    pub local_orders: Vec<f64>,
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
}

/// Fits `e ≈ C·h^p`. Points with `e ≤ floor` are dropped; if fewer than two
/// remain the result is [`OrderKind::Exact`].
pub fn estimate_order(steps: &[f64], errors: &[f64], floor: f64) -> OrderEstimate {
    assert_eq!(steps.len(), errors.len(), "one error per step");
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .zip(errors)
        .filter(|(h, e)| **h > 0.0 && **e > floor && e.is_finite())
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    let base = OrderEstimate { kind: OrderKind::Exact, order: None, local_orders: Vec::new(), steps: steps.to_vec(), errors: errors.to_vec() };
    if pts.len() < 2 {
        return base;
    }
    let local_orders = pts.windows(2).map(|w| (w[0].1 - w[1].1) / (w[0].0 - w[1].0)).collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    OrderEstimate { kind: OrderKind::Measured, order: Some(sxy / sxx), local_orders, ..base }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn floor_gives_exact() {
        let e = estimate_order(&[0.1, 0.05, 0.025], &[1e-17, 0.0, 2e-17], 1e-14);
        assert_eq!(e.kind, OrderKind::Exact);
        assert!(e.order.is_none());
    }

    proptest! {
        #[test]
        fn recovers_power_laws(p in 0.5f64..4.0, c in 0.1f64..10.0) {
            let hs: Vec<f64> = (0..5).map(|k| 0.2 / 2f64.powi(k)).collect();
            let es: Vec<f64> = hs.iter().map(|h| c * h.powf(p)).collect();
            let e = estimate_order(&hs, &es, 0.0);
            prop_assert!((e.order.unwrap() - p).abs() < 1e-9);
            for l in e.local_orders {
                prop_assert!((l - p).abs() < 1e-9);
            }
        }
    }
}

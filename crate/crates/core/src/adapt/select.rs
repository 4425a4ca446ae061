use std::cmp::Ordering;

use crate::coarse::Which;
use crate::error::{Error, Result};

pub(crate) fn check_parameter(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} = {value} must lie in (0, 1]")))
    }
}

/// Descending by value; ties keep ascending position.
fn descending(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| match values[b].total_cmp(&values[a]) {
        Ordering::Equal => a.cmp(&b),
        o => o,
    });
    order
}

/// Smallest `k` with `param · Σ w ≤ Σ_{top k} w`, summing in sorted order.
fn smallest_prefix(sorted: &[f64], param: f64) -> usize {
    let total: f64 = sorted.iter().sum();
    if !(total > 0.0) {
        return 0;
    }
    let target = param * total;
    let mut acc = 0.0;
    for (k, w) in sorted.iter().enumerate() {
        acc += w;
        if acc >= target {
            return k + 1;
        }
    }
    sorted.len()
}

fn select_squares(r: &[f64], param: f64) -> Vec<usize> {
    let order = descending(r);
    let sq: Vec<f64> = order.iter().map(|&i| r[i] * r[i]).collect();
    let k = smallest_prefix(&sq, param);
    order[..k].to_vec()
}

/// Primal and dual selections of the standard strategy, each the smallest
/// set of largest indicators carrying a `θ` (resp. `γ`) share of `Σ r²`.
pub fn select_standard(r: &[f64], r_star: &[f64], theta: f64, gamma: f64) -> Result<(Vec<usize>, Vec<usize>)> {
    check_parameter("theta", theta)?;
    check_parameter("gamma", gamma)?;
    Ok((select_squares(r, theta), select_squares(r_star, gamma)))
}

/// Merged primal/dual selection; on exact ties the primal entry comes first.
pub fn select_combined(r: &[f64], r_star: &[f64], beta: f64) -> Result<Vec<(usize, Which)>> {
    check_parameter("beta", beta)?;
    if r.len() != r_star.len() {
        return Err(Error::DimensionMismatch {
            what: "dual indicators",
            expected: r.len(),
            got: r_star.len(),
        });
    }
    let n = r.len();
    // interleaving keeps (i, primal) before (i, dual) and both ordered by i
    let merged: Vec<f64> = (0..2 * n)
        .map(|k| if k % 2 == 0 { r[k / 2] } else { r_star[k / 2] })
        .collect();
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| match merged[b].total_cmp(&merged[a]) {
        Ordering::Equal => (a % 2, a / 2).cmp(&(b % 2, b / 2)),
        o => o,
    });
    let sq: Vec<f64> = order.iter().map(|&k| merged[k] * merged[k]).collect();
    let k = smallest_prefix(&sq, beta);
    Ok(order[..k]
        .iter()
        .map(|&k| (k / 2, if k % 2 == 0 { Which::Primal } else { Which::Dual }))
        .collect())
}

/// Product indicators `η_i = r_i r_i* / λ_{l_i+1}`.
pub fn product_indicators(r: &[f64], r_star: &[f64], lambda_next: &[f64]) -> Result<Vec<f64>> {
    if r.len() != r_star.len() || r.len() != lambda_next.len() {
        return Err(Error::DimensionMismatch {
            what: "product indicator inputs",
            expected: r.len(),
            got: r_star.len().min(lambda_next.len()),
        });
    }
    if let Some((i, &l)) = lambda_next.iter().enumerate().find(|(_, l)| !(**l > 0.0)) {
        return Err(Error::Config(format!(
            "neighborhood {i} has non-positive eigenvalue {l:e}; product indicator undefined"
        )));
    }
    Ok(r.iter()
        .zip(r_star)
        .zip(lambda_next)
        .map(|((a, b), l)| a * b / l)
        .collect())
}

/// Product strategy: smallest set of largest `η_i` carrying a `τ` share of
/// `Σ η` (no squares). Each selected neighborhood gets both representatives.
pub fn select_product(r: &[f64], r_star: &[f64], lambda_next: &[f64], tau: f64) -> Result<Vec<usize>> {
    check_parameter("tau", tau)?;
    let eta = product_indicators(r, r_star, lambda_next)?;
    let order = descending(&eta);
    let sorted: Vec<f64> = order.iter().map(|&i| eta[i]).collect();
    let k = smallest_prefix(&sorted, tau);
    Ok(order[..k].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_examples() {
        let (p, d) = select_standard(&[3.0, 2.0, 1.0], &[0.0, 0.0, 0.0], 0.6, 0.5).unwrap();
        assert_eq!(p, vec![0]);
        assert!(d.is_empty());
        assert_eq!(select_combined(&[2.0], &[1.0], 0.8).unwrap(), vec![(0, Which::Primal)]);
        assert_eq!(
            select_product(&[1.0, 1.0], &[2.0, 1.0], &[1.0, 1.0], 0.6).unwrap(),
            vec![0]
        );
    }

    #[test]
    fn uniform_selects_all_nonzero() {
        let (p, _) = select_standard(&[0.0, 1.0, 0.5, 0.0, 2.0], &[1.0; 5], 1.0, 1.0).unwrap();
        assert_eq!(p, vec![4, 1, 2]);
        let r = [1.0, 3.0, 2.0];
        let c = select_combined(&r, &r, 1.0).unwrap();
        assert_eq!(
            c,
            vec![
                (1, Which::Primal),
                (1, Which::Dual),
                (2, Which::Primal),
                (2, Which::Dual),
                (0, Which::Primal),
                (0, Which::Dual)
            ]
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(select_standard(&[1.0], &[1.0], 0.0, 0.5).is_err());
        assert!(select_combined(&[1.0], &[1.0], 1.5).is_err());
        assert!(select_product(&[1.0], &[1.0], &[0.0], 0.5).is_err());
        assert!(select_product(&[1.0], &[1.0], &[1.0], f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn removing_last_selected_violates_threshold(
            r in prop::collection::vec(0.0f64..10.0, 1..30),
            theta in 0.01f64..=1.0,
        ) {
            let (sel, _) = select_standard(&r, &r, theta, theta).unwrap();
            let total: f64 = r.iter().map(|x| x * x).sum();
            if let Some((_, rest)) = sel.split_last() {
                let part: f64 = rest.iter().map(|&i| r[i] * r[i]).sum();
                prop_assert!(part < theta * total * (1.0 + 1e-12));
            }
        }

        #[test]
        fn uniform_lambda_orders_by_product(
            pairs in prop::collection::vec((0.0f64..5.0, 0.0f64..5.0), 1..20),
            tau in 0.05f64..=1.0,
            lam in 0.5f64..50.0,
        ) {
            let r: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let rs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let a = select_product(&r, &rs, &vec![lam; r.len()], tau).unwrap();
            let b = select_product(&r, &rs, &vec![1.0; r.len()], tau).unwrap();
            let prods: Vec<f64> = r.iter().zip(&rs).map(|(x, y)| x * y).collect();
            for w in a.windows(2) {
                prop_assert!(prods[w[0]] >= prods[w[1]]);
            }
            prop_assert_eq!(&a[..a.len().min(b.len()).saturating_sub(1)], &b[..a.len().min(b.len()).saturating_sub(1)]);
        }
    }
}

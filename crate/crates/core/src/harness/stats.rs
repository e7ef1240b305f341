//! Agreement statistics between metric scores and observer ratings.

use super::HarnessError;

fn check_pair(scores: &[f64], ratings: &[f64]) -> Result<(), HarnessError> {
    if scores.len() != ratings.len() {
        return Err(HarnessError::Data(format!(
            "{} scores paired with {} ratings",
            scores.len(),
            ratings.len()
        )));
    }
    if scores.is_empty() {
        return Err(HarnessError::Data("no score/rating pairs".into()));
    }
    Ok(())
}

/// Mean absolute deviation from the identity line.
pub fn mae(scores: &[f64], ratings: &[f64]) -> Result<f64, HarnessError> {
    check_pair(scores, ratings)?;
    Ok(scores.iter().zip(ratings).map(|(s, r)| (s - r).abs()).sum::<f64>() / scores.len() as f64)
}

pub fn rmse(scores: &[f64], ratings: &[f64]) -> Result<f64, HarnessError> {
    check_pair(scores, ratings)?;
    let mse = scores.iter().zip(ratings).map(|(s, r)| (s - r).powi(2)).sum::<f64>() / scores.len() as f64;
    Ok(mse.sqrt())
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman correlation: Pearson correlation of average ranks. Constant
/// input leaves the coefficient undefined and is an error.
pub fn srocc(scores: &[f64], ratings: &[f64]) -> Result<f64, HarnessError> {
    check_pair(scores, ratings)?;
    let a = average_ranks(scores);
    let b = average_ranks(ratings);
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(&b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(HarnessError::Numerical("SROCC is undefined for constant input".into()));
    }
    Ok(sab / (saa * sbb).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_computed_values() {
        assert_eq!(mae(&[1.0, 3.0], &[2.0, 2.0]).unwrap(), 1.0);
        assert_eq!(mae(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[0.0, 0.0, 3.0], &[0.0, 0.0, 0.0]).unwrap(), 3f64.sqrt());
        assert_eq!(srocc(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(srocc(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_eq!(srocc(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap(), 0.5);
    }

    #[test]
    fn ties_get_average_ranks() {
        assert_eq!(average_ranks(&[5.0, 1.0, 5.0, 3.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn errors() {
        assert!(matches!(mae(&[1.0], &[1.0, 2.0]), Err(HarnessError::Data(_))));
        assert!(matches!(mae(&[], &[]), Err(HarnessError::Data(_))));
        assert!(matches!(
            srocc(&[1.0, 1.0], &[1.0, 2.0]),
            Err(HarnessError::Numerical(_))
        ));
    }

    proptest! {
        #[test]
        fn offset_gives_mae_of_offset(r in proptest::collection::vec(3.0f64..32.0, 1..50), d in 0.0f64..5.0) {
            let s: Vec<f64> = r.iter().map(|x| x + d).collect();
            prop_assert!((mae(&s, &r).unwrap() - d).abs() < 1e-9);
            prop_assert!((rmse(&s, &r).unwrap() - d).abs() < 1e-9);
            prop_assert!(mae(&s, &r).unwrap() <= rmse(&s, &r).unwrap() + 1e-12);
        }

        #[test]
        fn srocc_is_bounded_and_monotone_invariant(v in proptest::collection::vec(-10.0f64..10.0, 3..30)) {
            let w: Vec<f64> = v.iter().enumerate().map(|(i, x)| x * 0.3 + (i as f64).sin()).collect();
            if let Ok(r) = srocc(&v, &w) {
                prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&r));
                let e: Vec<f64> = v.iter().map(|x| x.exp()).collect();
                prop_assert!((srocc(&e, &w).unwrap() - r).abs() < 1e-12);
            }
        }
    }
}

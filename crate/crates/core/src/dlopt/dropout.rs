use rand::Rng;

use crate::error::{Error, Result};

fn check_rate(p: f64) -> Result<()> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("dropout rate {p} outside [0, 1)")))
    }
}

/// Zeroes each unit independently with probability `p`. Kept units are not
/// rescaled; the compensation happens at inference time. The mask marks kept
/// units with `true`.
pub fn dropout_train<R: Rng + ?Sized>(
    activations: &[f64],
    p: f64,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<bool>)> {
    check_rate(p)?;
    let mask: Vec<bool> = activations
        .iter()
        .map(|_| p == 0.0 || rng.random::<f64>() >= p)
        .collect();
    let out = activations
        .iter()
        .zip(&mask)
        .map(|(a, &keep)| if keep { *a } else { 0.0 })
        .collect();
    Ok((out, mask))
}

/// Scales the outgoing weights of a dropped-out layer by `1 - p`.
pub fn dropout_infer(weights: &[f64], p: f64) -> Result<Vec<f64>> {
    check_rate(p)?;
    Ok(weights.iter().map(|w| w * (1.0 - p)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn zero_rate_is_identity() {
        let a = [0.3, -1.0, 2.0];
        let (out, mask) = dropout_train(&a, 0.0, &mut seeded(1)).unwrap();
        assert_eq!(out, a);
        assert!(mask.iter().all(|&k| k));
        assert_eq!(dropout_infer(&a, 0.0).unwrap(), a);
    }

    #[test]
    fn reproducible_mask() {
        let a = vec![1.0; 64];
        let m1 = dropout_train(&a, 0.3, &mut seeded(9)).unwrap().1;
        let m2 = dropout_train(&a, 0.3, &mut seeded(9)).unwrap().1;
        assert_eq!(m1, m2);
    }

    #[test]
    fn rate_bounds() {
        assert!(dropout_train(&[1.0], 1.0, &mut seeded(0)).is_err());
        assert!(dropout_infer(&[1.0], 1.5).is_err());
    }

    #[test]
    fn inference_scaling_is_linear() {
        let w = [0.5, -2.0];
        let a = dropout_infer(&w, 0.25).unwrap();
        let b = dropout_infer(&[1.0, -4.0], 0.25).unwrap();
        assert_eq!(b, vec![2.0 * a[0], 2.0 * a[1]]);
    }
}

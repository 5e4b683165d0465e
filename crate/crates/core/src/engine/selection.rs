use rand::Rng;

use crate::error::{Error, Result};

/// Stochastic universal sampling: one spin, `n` equally spaced pointers.
/// Returns the selected indices in wheel order.
pub fn sus_select<R: Rng + ?Sized>(fitness: &[f64], n: usize, rng: &mut R) -> Result<Vec<usize>> {
    let offset = rng.gen::<f64>();
    sus_with_offset(fitness, n, offset)
}

/// SUS with the spin fixed: the first pointer sits at `offset` (a fraction
/// of the pointer spacing, in `[0, 1)`).
pub fn sus_with_offset(fitness: &[f64], n: usize, offset: f64) -> Result<Vec<usize>> {
    if fitness.is_empty() {
        return Err(Error::Selection("empty population".into()));
    }
    if let Some(f) = fitness.iter().find(|f| !(**f > 0.0 && f.is_finite())) {
        return Err(Error::Selection(format!("fitness {f} is not positive")));
    }
    if !(0.0..1.0).contains(&offset) {
        return Err(Error::Selection(format!("offset {offset} outside [0, 1)")));
    }
    let total: f64 = fitness.iter().sum();
    let step = total / n as f64;
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    let mut upper = fitness[0];
    for k in 0..n {
        let pointer = (offset + k as f64) * step;
        while pointer >= upper && i + 1 < fitness.len() {
            i += 1;
            upper += fitness[i];
        }
        out.push(i);
    }
    Ok(out)
}

/// How often each index occurs in a selection.
pub fn counts(selection: &[usize], len: usize) -> Vec<usize> {
    let mut c = vec![0; len];
    for &i in selection {
        c[i] += 1;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hand_simulated_wheel() {
        let sel = sus_with_offset(&[0.5, 0.25, 0.25], 4, 0.0).unwrap();
        assert_eq!(counts(&sel, 3), vec![2, 1, 1]);
    }

    #[test]
    fn uniform_picks_everyone_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sel = sus_select(&[0.3; 7], 7, &mut rng).unwrap();
        assert_eq!(counts(&sel, 7), vec![1; 7]);
    }

    #[test]
    fn dominant_individual_takes_all() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sel = sus_select(&[1e-300, 1.0, 1e-300], 5, &mut rng).unwrap();
        assert_eq!(counts(&sel, 3), vec![0, 5, 0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(sus_with_offset(&[], 3, 0.0).is_err());
        assert!(sus_with_offset(&[0.0, 1.0], 3, 0.0).is_err());
    }
}

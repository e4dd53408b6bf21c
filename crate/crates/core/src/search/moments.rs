//! Exact monomial moments over the unit sphere.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::scalar::Rational;

/// Mean of `x^alpha` over the unit sphere in `R^n`, as an exact rational:
/// zero if any exponent is odd, otherwise
/// `prod_i (alpha_i - 1)!! / (n (n + 2) ... (n + |alpha| - 2))`.
pub fn sphere_moment(alpha: &[u32], n: usize) -> Rational {
    assert!(n >= 1 && alpha.len() == n, "exponent length must equal n");
    if alpha.iter().any(|e| e % 2 == 1) {
        return Rational::zero();
    }
    let mut num = BigInt::one();
    for &e in alpha {
        num *= double_factorial(e.saturating_sub(1));
    }
    let total: u32 = alpha.iter().sum();
    let mut den = BigInt::one();
    let mut k = 0;
    while k < total {
        den *= BigInt::from(n as u64 + k as u64);
        k += 2;
    }
    Rational::new(num, den)
}

fn double_factorial(m: u32) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = m;
    while k > 1 {
        acc *= BigInt::from(k);
        k -= 2;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn moment_examples() {
        assert_eq!(sphere_moment(&[2, 0, 0], 3), rat(1, 3));
        assert_eq!(sphere_moment(&[4, 0], 2), rat(3, 8));
        assert_eq!(sphere_moment(&[1, 1], 2), rat(0, 1));
        assert_eq!(sphere_moment(&[1, 1, 0, 0], 4), rat(0, 1));
        assert_eq!(sphere_moment(&[0, 0], 2), rat(1, 1));
        assert_eq!(sphere_moment(&[2, 2], 2), rat(1, 8));
    }

    #[test]
    fn mean_of_norm_to_the_fourth_is_one() {
        // |x|^4 = sum x_i^4 + 2 sum_{i<j} x_i^2 x_j^2 in R^3
        let quartic = rat(3, 1) * sphere_moment(&[4, 0, 0], 3);
        let mixed = rat(6, 1) * sphere_moment(&[2, 2, 0], 3);
        assert_eq!(quartic + mixed, rat(1, 1));
    }
}

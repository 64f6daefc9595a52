use num_rational::BigRational;
use num_traits::One;

use super::{cos, sin, RationalSeries, SeriesError};

/// Solves `sin M cos(phi) + cos M sin(phi) = phi / x` for `phi(0) = 0`.
///
/// Each pass of `phi <- x (sin M cos(phi) + cos M sin(phi))` fixes one more
/// coefficient, so pass `i` only works to order `i + 1`.
pub fn fixed_point_solve_kepler(
    sin_m: &BigRational,
    cos_m: &BigRational,
    order: usize,
) -> Result<RationalSeries, SeriesError> {
    if sin_m * sin_m + cos_m * cos_m != BigRational::one() {
        return Err(SeriesError::NotOnUnitCircle);
    }
    let mut phi = RationalSeries::zero(1);
    for n in 1..order {
        // phi currently holds phi_0 .. phi_(n-1); extend with a zero slot.
        let mut coeffs = phi.into_coeffs();
        coeffs.push(num_traits::Zero::zero());
        let cur = RationalSeries::new(coeffs);
        let inner = cur.truncate(n);
        let rhs = &RationalSeries::compose(&cos(n), &inner)?.scale(sin_m)
            + &RationalSeries::compose(&sin(n), &inner)?.scale(cos_m);
        phi = rhs.mul_x_pow(1);
    }
    Ok(phi.truncate(order.min(phi.order())))
}

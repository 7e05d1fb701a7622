//! Compensated summation and partial sums of `j^{-s}`.

use super::dd::Real;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy)]
pub struct Neumaier<R> {
    sum: R,
    comp: R,
}

impl<R: Real> Default for Neumaier<R> {
    fn default() -> Self {
        Neumaier {
            sum: R::zero(),
            comp: R::zero(),
        }
    }
}

impl<R: Real> Neumaier<R> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: R) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> R {
        self.sum + self.comp
    }
}

impl<R: Real> FromIterator<R> for Neumaier<R> {
    fn from_iter<I: IntoIterator<Item = R>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        iter.into_iter().for_each(|x| acc.add(x));
        acc
    }
}

/// Runs shorter than this are summed term by term.
pub const DIRECT_LIMIT: u128 = 1_000_000;
/// Terms below this index are always summed directly before the
/// Euler–Maclaurin tail starts.
pub const EM_HEAD: u128 = 64;

/// `B_{2k}` for `k = 1..=8` as (numerator, denominator).
const BERNOULLI: [(f64, f64); 8] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
];
const ZETA_16: f64 = 1.000_015_282_259_408_7;

fn term<R: Real>(j: u128, s: f64) -> R {
    if s == 0.0 {
        R::one()
    } else {
        R::from_u128(j).powf(R::from_f64(-s))
    }
}

/// `Σ_{j=a}^{b} j^{-s}` summed term by term.
pub fn power_sum_direct<R: Real>(s: f64, a: u128, b: u128) -> R {
    assert!(a >= 1, "power sums start at index 1 or later");
    // smallest terms first
    (a..=b)
        .rev()
        .map(|j| term::<R>(j, s))
        .collect::<Neumaier<R>>()
        .value()
}

/// `Σ_{j=a}^{b} j^{-s}` by Euler–Maclaurin with eight Bernoulli corrections
/// after a direct head up to [`EM_HEAD`]. Returns the value and a bound on
/// its absolute error (truncation remainder plus rounding).
pub fn power_sum_euler_maclaurin<R: Real>(s: f64, a: u128, b: u128) -> (R, f64) {
    assert!(a >= 1, "power sums start at index 1 or later");
    if b < a {
        return (R::zero(), 0.0);
    }
    let a0 = a.max(EM_HEAD);
    if b < a0 {
        return (power_sum_direct(s, a, b), 0.0);
    }
    let head = if a < a0 {
        power_sum_direct::<R>(s, a, a0 - 1)
    } else {
        R::zero()
    };
    if s == 0.0 {
        return (head + R::from_u128(b - a0 + 1), 0.0);
    }

    let (ra, rb) = (R::from_u128(a0), R::from_u128(b));
    let (fa, fb) = (term::<R>(a0, s), term::<R>(b, s));
    let one_minus_s = R::one() - R::from_f64(s);
    let log_ratio = (rb / ra).ln();
    let exponent = one_minus_s * log_ratio;
    let integral = if s == 1.0 {
        log_ratio
    } else {
        ra * fa * exponent.exp_m1() / one_minus_s
    };
    // relative rounding in exp grows with the size of its argument
    let cond = exponent.to_f64().abs() + log_ratio.to_f64().abs() + 8.0;

    let mut acc = Neumaier::new();
    acc.add(head);
    acc.add(integral);
    acc.add((fa + fb) / R::from_f64(2.0));

    // d^m/dx^m x^{-s} = (-1)^m (s)_m x^{-s-m}; we track x^{-s-m} and the
    // rising factorial for odd m = 2k-1
    let mut rising = R::from_f64(s);
    let (mut da, mut db) = (fa / ra, fb / rb);
    let mut factorial = R::from_f64(2.0);
    let mut last = (R::zero(), R::zero());
    for (k, &(num, den)) in BERNOULLI.iter().enumerate() {
        let m = 2 * k + 1;
        let coeff = R::from_f64(num) / R::from_f64(den) / factorial;
        // odd derivative carries a minus sign
        let (dfa, dfb) = (-(rising * da), -(rising * db));
        acc.add(coeff * (dfb - dfa));
        last = (dfa, dfb);
        // advance to the next odd order
        let (s1, s2) = (
            R::from_f64(s) + R::from_u128(m as u128),
            R::from_f64(s) + R::from_u128(m as u128 + 1),
        );
        rising = rising * s1 * s2;
        da = da / (ra * ra);
        db = db / (rb * rb);
        factorial = factorial * R::from_u128((m + 2) as u128) * R::from_u128((m + 3) as u128);
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let remainder = 2.0 * ZETA_16 / two_pi.powi(16) * (last.1 - last.0).to_f64().abs();
    let value = acc.value();
    let rounding = R::EPSILON * (cond * integral.to_f64().abs() + 16.0 * value.to_f64().abs());
    (value, remainder + rounding)
}

/// `Σ_{j=a}^{b} j^{-s}` with a bound on its absolute error: direct below
/// [`DIRECT_LIMIT`] terms, Euler–Maclaurin above.
pub fn power_sum<R: Real>(s: f64, a: u128, b: u128) -> (R, f64) {
    if b < a {
        return (R::zero(), 0.0);
    }
    if b - a + 1 < DIRECT_LIMIT {
        let v = power_sum_direct::<R>(s, a, b);
        let err = 4.0 * R::EPSILON * v.to_f64().abs();
        (v, err)
    } else {
        power_sum_euler_maclaurin::<R>(s, a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::super::dd::DoubleDouble;
    use super::*;

    fn dd(hi: f64, lo: f64) -> DoubleDouble {
        DoubleDouble::new(hi, lo)
    }

    /// Reference values from Hurwitz zeta differences at 50 digits.
    fn references() -> Vec<(f64, u128, u128, DoubleDouble)> {
        vec![
            (0.5, 1, 3, dd(2.284457050376173, 9.613611663460743e-17)),
            (
                0.5,
                1,
                1_000_000,
                dd(1998.5401454911487, 6.847297774497333e-14),
            ),
            (
                0.5,
                1,
                1_000_000_000_000,
                dd(1999998.5396459913, -9.771232791529668e-11),
            ),
            (
                2.0 / 3.0,
                31,
                1_000_000_000,
                dd(2990.626707562404, 1.2935123294800101e-13),
            ),
            (
                1.0,
                1,
                1_000_000,
                dd(14.392726722865724, -6.667360018717937e-16),
            ),
            (
                1.0,
                1,
                1_000_000_000_000_000,
                dd(35.11599205981222, -2.650054947763289e-15),
            ),
            (
                1.5,
                100,
                10_000_000,
                dd(0.19986879446554962, 4.313420523264334e-18),
            ),
            (
                0.5,
                785,
                28074,
                dd(279.09108227102325, -1.2270745733358978e-14),
            ),
            (
                0.5,
                1,
                1 << 100,
                dd(2251799813685246.5, 0.039645491190413634),
            ),
        ]
    }

    #[test]
    fn double_sums_match_reference() {
        for (s, a, b, want) in references() {
            let (got, err) = power_sum::<f64>(s, a, b);
            let want = want.to_f64();
            let rel = ((got - want) / want).abs();
            assert!(rel < 1e-14, "s={s} [{a},{b}] rel {rel}");
            assert!(
                (got - want).abs() <= err.max(4.0 * f64::EPSILON * want),
                "bound too tight s={s} b={b}"
            );
        }
    }

    #[test]
    fn extended_sums_match_reference() {
        for (s, a, b, want) in references() {
            let (got, err) = power_sum_euler_maclaurin::<DoubleDouble>(s, a, b);
            let rel = ((got - want).to_f64() / want.to_f64()).abs();
            assert!(rel < 1e-28, "s={s} [{a},{b}] rel {rel:e}");
            assert!(err / want.to_f64() < 1e-25);
        }
    }

    #[test]
    fn euler_maclaurin_agrees_with_direct_everywhere_below_the_cutover() {
        for s in [0.25, 0.5, 2.0 / 3.0, 1.0, 1.5] {
            for (a, b) in [
                (1, 10),
                (1, 64),
                (1, 65),
                (3, 1000),
                (50, 70_000),
                (1, 1_000_000),
            ] {
                let direct = power_sum_direct::<f64>(s, a, b);
                let (em, err) = power_sum_euler_maclaurin::<f64>(s, a, b);
                assert!(((em - direct) / direct).abs() < 1e-13, "s={s} [{a},{b}]");
                assert!(err / direct < 1e-13);
            }
        }
    }

    #[test]
    fn compensated_sum_recovers_cancelled_bits() {
        let acc: Neumaier<f64> = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(acc.value(), 2.0);
        let tenth: Neumaier<f64> = std::iter::repeat_n(0.1, 1_000_000).collect();
        assert!((tenth.value() - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn zero_exponent_counts_terms() {
        assert_eq!(power_sum::<f64>(0.0, 5, 5_000_004).0, 5_000_000.0);
        assert_eq!(power_sum::<f64>(0.5, 9, 3).0, 0.0);
    }
}

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
// published coefficients, kept digit for digit
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of Γ(x) for x > 0 (Lanczos, g = 7, nine terms).
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain {
            func: "log_gamma",
            value: x,
        });
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        return (PI / (PI * x).sin()).ln() - ln_gamma_pos(1.0 - x);
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// ln Γ(x + 1/2) - ln Γ(x), evaluated without the cancellation that a plain
/// difference of two large log-gammas suffers.
fn ln_gamma_half_ratio(x: f64) -> f64 {
    if x < 32.0 {
        return ln_gamma_pos(x + 0.5) - ln_gamma_pos(x);
    }
    // Stirling: ln Γ(z) = (z - 1/2) ln z - z + ln(2π)/2 + S(z)
    // difference = ln(x)/2 + (ln1p(y) - y)/(2y) + S(x + 1/2) - S(x), y = 1/(2x)
    let y = 0.5 / x;
    let lead = (y.ln_1p() - y) / (2.0 * y);
    0.5 * x.ln() + lead + (stirling_tail(x + 0.5) - stirling_tail(x))
}

fn stirling_tail(z: f64) -> f64 {
    let r = 1.0 / z;
    let r2 = r * r;
    r * (1.0 / 12.0
        + r2 * (-1.0 / 360.0 + r2 * (1.0 / 1260.0 + r2 * (-1.0 / 1680.0 + r2 * (1.0 / 1188.0)))))
}

/// Expected 2-norm of a `d`-dimensional standard Gaussian vector, in the
/// overflow-free log form `exp(ln 2 / 2 + lnΓ((d+1)/2) - lnΓ(d/2))`.
pub fn expected_gaussian_norm(d: usize) -> f64 {
    assert!(d >= 1, "dimension must be at least 1");
    (0.5 * LN_2 + ln_gamma_half_ratio(d as f64 / 2.0)).exp()
}

/// Γ(m / 2) by the exact recurrence from Γ(1/2) = √π and Γ(1) = 1.
/// Overflows to infinity for m above ~343.
pub fn gamma_half_integer(m: usize) -> f64 {
    assert!(m >= 1);
    let (mut g, mut x) = if m.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = m as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// The direct ratio √2·Γ((d+1)/2)/Γ(d/2); `None` once either Gamma overflows.
pub fn expected_gaussian_norm_direct(d: usize) -> Option<f64> {
    let num = gamma_half_integer(d + 1);
    let den = gamma_half_integer(d);
    (num.is_finite() && den.is_finite()).then(|| std::f64::consts::SQRT_2 * num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn closed_forms() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-14);
        assert!((log_gamma(0.5).unwrap() - 0.572_364_942_924_700_1).abs() < 1e-13);
        assert!((log_gamma(10.0).unwrap() - 362_880f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn accurate_across_the_range() {
        // below 10: absolute error against exact factorials and half-integers
        for n in 1..=10u32 {
            let fact: f64 = (1..n).map(f64::from).product();
            assert!(
                (log_gamma(n as f64).unwrap() - fact.ln()).abs() < 1e-10,
                "x = {n}"
            );
            let half = gamma_half_integer(2 * n as usize + 1).ln();
            assert!(
                (log_gamma(n as f64 + 0.5).unwrap() - half).abs() < 1e-10,
                "x = {n}.5"
            );
        }
        // above, lnΓ grows to ~1.5e8 and one ulp alone exceeds 1e-10, so
        // compare relatively against the Stirling series
        for x in [100.0, 1e3, 12345.678, 1e5, 1e7] {
            let z = 1.0 / x;
            let stirling = (x - 0.5) * f64::ln(x) - x + 0.5 * (2.0 * PI).ln() + z / 12.0
                - z.powi(3) / 360.0
                + z.powi(5) / 1260.0;
            assert!(rel(log_gamma(x).unwrap(), stirling) < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(matches!(log_gamma(0.0), Err(Error::Domain { .. })));
        assert!(log_gamma(-2.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn small_dimension_norms() {
        assert!(rel(expected_gaussian_norm(1), (2.0 / PI).sqrt()) < 1e-12);
        assert!(rel(expected_gaussian_norm(2), (PI / 2.0).sqrt()) < 1e-12);
        assert!(rel(expected_gaussian_norm(3), 2.0 * (2.0 / PI).sqrt()) < 1e-12);
    }

    #[test]
    fn direct_and_log_forms_agree() {
        for d in 1..=300 {
            let direct = expected_gaussian_norm_direct(d).unwrap();
            assert!(rel(expected_gaussian_norm(d), direct) < 1e-12, "d = {d}");
        }
        assert!(expected_gaussian_norm_direct(400).is_none());
    }

    #[test]
    fn bracketed_by_sqrt_bounds_and_monotone() {
        let mut prev = 0.0;
        for &d in &[
            1usize,
            2,
            10,
            63,
            64,
            65,
            100,
            10_000,
            1_000_000,
            1_000_000_000,
        ] {
            let e = expected_gaussian_norm(d);
            assert!(e.is_finite());
            assert!(e > prev);
            assert!(e <= (d as f64).sqrt());
            if d > 1 {
                assert!(e >= ((d - 1) as f64).sqrt());
            }
            prev = e;
        }
    }

    #[test]
    fn strictly_increasing_at_large_d() {
        for base in [1_000_000usize, 123_456_789, 999_999_990] {
            let mut prev = expected_gaussian_norm(base);
            for d in base + 1..base + 10 {
                let e = expected_gaussian_norm(d);
                assert!(e > prev, "d = {d}");
                prev = e;
            }
        }
    }

    #[test]
    fn stirling_branch_is_continuous() {
        // both branches evaluated at the switch point
        let x = 32.0;
        let direct = ln_gamma_pos(x + 0.5) - ln_gamma_pos(x);
        assert!((direct - ln_gamma_half_ratio(x)).abs() < 1e-13);
    }
}

//! Closed-form uniform continuity bounds, in bits.
//!
//! Every function takes the trace distance `epsilon` and the dimension `d_A` of the
//! unconditioned system. None of them depend on `d_B`.

use serde::{Deserialize, Serialize};

use crate::entropy::RenyiOrder;
use crate::error::{invalid, Result};

/// Validated `(epsilon, d_A, alpha)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub epsilon: f64,
    pub d_a: usize,
    pub order: RenyiOrder,
}

impl BoundInputs {
    pub fn new(epsilon: f64, d_a: usize, order: RenyiOrder) -> Result<Self> {
        check_eps(epsilon)?;
        check_dim(d_a)?;
        Ok(Self {
            epsilon,
            d_a,
            order,
        })
    }
}

fn check_eps(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(invalid(format!(
            "epsilon must lie in [0, 1], got {epsilon}"
        )));
    }
    Ok(())
}

fn check_dim(d_a: usize) -> Result<()> {
    if d_a == 0 {
        return Err(invalid("d_A must be at least 1"));
    }
    Ok(())
}

fn check_below_one(order: RenyiOrder) -> Result<f64> {
    if !order.below_one() {
        return Err(invalid(format!(
            "this bound needs alpha in [1/2, 1), got {order}"
        )));
    }
    Ok(order.value())
}

/// `x log2 x` extended by 0 at 0.
fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(invalid(format!(
            "binary entropy needs x in [0, 1], got {x}"
        )));
    }
    Ok(-xlogx(x) - xlogx(1.0 - x))
}

/// `2 eps log2 d_A + (1 + eps) h(eps / (1 + eps))`, tight for conditional von Neumann entropy.
pub fn afw_von_neumann(epsilon: f64, d_a: usize) -> Result<f64> {
    check_eps(epsilon)?;
    check_dim(d_a)?;
    let h = binary_entropy(epsilon / (1.0 + epsilon))?;
    Ok(2.0 * epsilon * (d_a as f64).log2() + (1.0 + epsilon) * h)
}

/// `2 eps log2 d_A + (1 + eps) log2(1 + eps) - eps log2 eps`.
pub fn afw_limit_expression(epsilon: f64, d_a: usize) -> Result<f64> {
    check_eps(epsilon)?;
    check_dim(d_a)?;
    Ok(2.0 * epsilon * (d_a as f64).log2() + xlogx(1.0 + epsilon) - xlogx(epsilon))
}

/// `log(1+e) + log(1 + e^a d^{2(1-a)} - e (1+e)^{a-1}) / (1-a)` without range checks on `e`.
fn low_formula(e: f64, d_a: usize, alpha: f64) -> f64 {
    let s = 1.0 - alpha;
    let d = d_a as f64;
    let inner = 1.0 + e.powf(alpha) * d.powf(2.0 * s) - e / (1.0 + e).powf(s);
    (1.0 + e).log2() + inner.log2() / s
}

/// Bound on `|H~_alpha^up(A|B)_rho - H~_alpha^up(A|B)_sigma|` for `alpha < 1`.
pub fn bound_low(epsilon: f64, d_a: usize, order: RenyiOrder) -> Result<f64> {
    check_eps(epsilon)?;
    check_dim(d_a)?;
    let alpha = check_below_one(order)?;
    Ok(low_formula(epsilon, d_a, alpha))
}

/// The sharper `alpha < 1` bound when A is classical in both states.
pub fn bound_low_classical(epsilon: f64, d_a: usize, order: RenyiOrder) -> Result<f64> {
    check_eps(epsilon)?;
    check_dim(d_a)?;
    let alpha = check_below_one(order)?;
    let s = 1.0 - alpha;
    let d = d_a as f64;
    let inner = 1.0 + epsilon.powf(alpha) * d.powf(s) - epsilon / (d * (1.0 + epsilon)).powf(s);
    Ok((1.0 + epsilon).log2() + inner.log2() / s)
}

/// Bound for `alpha > 1`: [`bound_low`] at `sqrt(2 eps)` and the dual order.
///
/// For `eps > 1/2` the substituted distance exceeds 1 and the formula is evaluated as
/// written; see [`bound_high_beyond_unit`].
pub fn bound_high(epsilon: f64, d_a: usize, order: RenyiOrder) -> Result<f64> {
    check_eps(epsilon)?;
    check_dim(d_a)?;
    if order.below_one() {
        return Err(invalid(format!(
            "this bound needs alpha in (1, inf], got {order}"
        )));
    }
    Ok(low_formula(
        (2.0 * epsilon).sqrt(),
        d_a,
        order.dual().value(),
    ))
}

/// True when `sqrt(2 eps) >= 1`, where the high-order bound leaves its proven range.
pub fn bound_high_beyond_unit(epsilon: f64) -> bool {
    2.0 * epsilon >= 1.0
}

/// `log2(1 + eps d_A^2)`, the min-entropy bound.
pub fn bound_hmin(epsilon: f64, d_a: usize) -> Result<f64> {
    check_eps(epsilon)?;
    check_dim(d_a)?;
    Ok((epsilon * (d_a * d_a) as f64).ln_1p() / std::f64::consts::LN_2)
}

/// `log2((1-eps)^a + eps^a (d_A-1)^{1-a}) / (1-a)`; 0 when `d_A = 1`.
pub fn bound_jabbour_datta(epsilon: f64, d_a: usize, order: RenyiOrder) -> Result<f64> {
    check_eps(epsilon)?;
    check_dim(d_a)?;
    let alpha = check_below_one(order)?;
    if d_a == 1 {
        return Ok(0.0);
    }
    let s = 1.0 - alpha;
    let sum = (1.0 - epsilon).powf(alpha) + epsilon.powf(alpha) * ((d_a - 1) as f64).powf(s);
    Ok(sum.log2() / s)
}

/// `(2 alpha / (1 - alpha)) log2 F`, a lower bound on `H~_alpha(rho) - H~_beta(sigma)`.
pub fn leditzky_gap(fidelity: f64, order: RenyiOrder) -> Result<f64> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(invalid(format!(
            "fidelity must lie in [0, 1], got {fidelity}"
        )));
    }
    let alpha = check_below_one(order)?;
    if fidelity == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(2.0 * alpha / (1.0 - alpha) * fidelity.log2())
}

/// `2 log2 d_A`, the largest possible difference of two conditional entropies.
pub fn trivial_diameter(d_a: usize) -> f64 {
    2.0 * (d_a as f64).log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ord(a: f64) -> RenyiOrder {
        RenyiOrder::new(a).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn binary_entropy_values() {
        close(binary_entropy(0.5).unwrap(), 1.0, 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        close(
            binary_entropy(1.0 / 11.0).unwrap(),
            0.439_496_986_921_513_3,
            1e-14,
        );
        close(
            binary_entropy(0.3).unwrap(),
            binary_entropy(0.7).unwrap(),
            1e-15,
        );
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn afw_values() {
        assert_eq!(afw_von_neumann(0.0, 7).unwrap(), 0.0);
        close(
            afw_von_neumann(0.1, 2).unwrap(),
            0.683_446_685_613_664_6,
            1e-14,
        );
        let one = afw_von_neumann(0.3, 1).unwrap();
        close(one, 1.3 * binary_entropy(0.3 / 1.3).unwrap(), 1e-15);
        assert_eq!(afw_limit_expression(0.0, 3).unwrap(), 0.0);
        close(
            afw_limit_expression(0.1, 2).unwrap(),
            0.683_446_685_613_664_6,
            1e-14,
        );
    }

    #[test]
    fn afw_forms_agree_on_grid() {
        for d in [1, 2, 3, 8, 64] {
            for i in 0..=100 {
                let e = i as f64 / 100.0;
                close(
                    afw_von_neumann(e, d).unwrap(),
                    afw_limit_expression(e, d).unwrap(),
                    1e-12,
                );
            }
        }
    }

    #[test]
    fn low_order_values() {
        assert_eq!(bound_low(0.0, 5, ord(0.7)).unwrap(), 0.0);
        close(
            bound_low(0.25, 2, ord(0.5)).unwrap(),
            1.979_830_006_179_176,
            1e-13,
        );
        let direct = 1.25f64.log2() + 2.0 * (1.0 + 0.5 * 2.0 - 0.25 / 1.25f64.sqrt()).log2();
        close(bound_low(0.25, 2, ord(0.5)).unwrap(), direct, 1e-14);
        close(
            bound_low(0.1, 2, ord(1.0 - 1e-6)).unwrap(),
            0.683_447_563_259_189_8,
            1e-9,
        );
        close(
            bound_low(0.1, 2, ord(1.0 - 1e-6)).unwrap(),
            0.683_446_685_613_664_6,
            1e-4,
        );
        assert!(bound_low(0.1, 2, ord(2.0)).is_err());
        assert!(bound_low(1.1, 2, ord(0.5)).is_err());
        assert!(bound_low(0.1, 0, ord(0.5)).is_err());
    }

    #[test]
    fn classical_values() {
        assert_eq!(bound_low_classical(0.0, 3, ord(0.6)).unwrap(), 0.0);
        close(
            bound_low_classical(0.1, 4, ord(0.5)).unwrap(),
            1.466_073_055_227_672_8,
            1e-13,
        );
        close(
            bound_low_classical(0.3, 3, ord(0.75)).unwrap(),
            1.980_684_548_884_142_3,
            1e-13,
        );
        close(
            bound_low(0.3, 3, ord(0.75)).unwrap(),
            2.406_747_247_377_984,
            1e-13,
        );
        let a = bound_low_classical(0.1, 1, ord(0.5)).unwrap();
        close(a, 0.713_349_895_857_023_8, 1e-14);
        close(a, bound_low(0.1, 1, ord(0.5)).unwrap(), 1e-15);
    }

    #[test]
    fn high_order_values() {
        assert_eq!(bound_high(0.0, 4, ord(3.0)).unwrap(), 0.0);
        close(
            bound_high(0.5, 2, RenyiOrder::INFINITY).unwrap(),
            3.394_338_338_903_795_7,
            1e-13,
        );
        close(
            bound_high(0.5, 3, RenyiOrder::INFINITY).unwrap(),
            4.438_711_458_615_347,
            1e-13,
        );
        close(
            bound_high(0.1, 2, ord(2.0)).unwrap(),
            2.382_202_438_935_91,
            1e-13,
        );
        assert!(bound_high(0.1, 2, ord(0.9)).is_err());
        assert!(bound_high_beyond_unit(0.5));
        assert!(!bound_high_beyond_unit(0.49));
    }

    #[test]
    fn high_is_low_at_substituted_distance() {
        for alpha in [1.01, 1.5, 2.0, 5.0, f64::INFINITY] {
            let order = ord(alpha);
            for e in [0.01f64, 0.05, 0.1, 0.25, 0.45] {
                for d in [1, 2, 3, 4] {
                    let sub = (2.0 * e).sqrt();
                    assert_eq!(
                        bound_high(e, d, order).unwrap(),
                        bound_low(sub, d, order.dual()).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn hmin_values() {
        assert_eq!(bound_hmin(0.0, 9).unwrap(), 0.0);
        close(bound_hmin(1.0, 2).unwrap(), 5f64.log2(), 1e-15);
        close(bound_hmin(0.5, 1).unwrap(), 0.584_962_500_721_156_2, 1e-15);
    }

    #[test]
    fn jabbour_datta_values() {
        assert_eq!(bound_jabbour_datta(0.0, 3, ord(0.5)).unwrap(), 0.0);
        close(bound_jabbour_datta(1.0, 2, ord(0.5)).unwrap(), 0.0, 1e-15);
        close(
            bound_jabbour_datta(0.1, 2, ord(0.5)).unwrap(),
            0.678_071_905_112_637_7,
            1e-14,
        );
        close(
            bound_jabbour_datta(0.2, 3, ord(0.75)).unwrap(),
            1.059_600_631_135_576_5,
            1e-13,
        );
        assert_eq!(bound_jabbour_datta(0.4, 1, ord(0.6)).unwrap(), 0.0);
    }

    #[test]
    fn leditzky_values() {
        assert_eq!(leditzky_gap(1.0, ord(0.6)).unwrap(), 0.0);
        close(leditzky_gap(0.5, ord(0.5)).unwrap(), -2.0, 1e-15);
        close(
            leditzky_gap(0.9, ord(0.75)).unwrap(),
            -0.912_018_560_670_299_9,
            1e-14,
        );
        assert_eq!(leditzky_gap(0.0, ord(0.5)).unwrap(), f64::NEG_INFINITY);
        assert!(leditzky_gap(0.5, ord(2.0)).is_err());
    }

    #[test]
    fn low_tends_to_afw() {
        for d in [1, 2, 3, 4] {
            for i in 1..=20 {
                let e = i as f64 / 20.0;
                let gap =
                    bound_low(e, d, ord(1.0 - 1e-6)).unwrap() - afw_von_neumann(e, d).unwrap();
                assert!(gap.abs() <= 1e-4, "eps {e} d {d}: {gap}");
            }
        }
    }

    fn nondecreasing(f: impl Fn(f64) -> f64, upto: f64) {
        let mut prev = f(0.0);
        assert_eq!(prev, 0.0);
        for i in 1..=2000 {
            let next = f(upto * i as f64 / 2000.0);
            assert!(next.is_finite());
            assert!(next >= prev - 1e-10, "decrease {prev} -> {next}");
            prev = next;
        }
    }

    #[test]
    fn monotone_in_epsilon() {
        for d in [1, 2, 3, 5, 64] {
            nondecreasing(|e| afw_von_neumann(e, d).unwrap(), 1.0);
            nondecreasing(|e| bound_hmin(e, d).unwrap(), 1.0);
            for a in [0.5, 0.6, 0.75, 0.9, 0.99] {
                nondecreasing(|e| bound_low(e, d, ord(a)).unwrap(), 1.0);
                nondecreasing(|e| bound_low_classical(e, d, ord(a)).unwrap(), 1.0);
                // Increasing only up to the uniform-distribution point.
                let top = (d - 1) as f64 / d as f64;
                nondecreasing(|e| bound_jabbour_datta(e, d, ord(a)).unwrap(), top);
            }
            for a in [1.01, 1.5, 2.0, 5.0, f64::INFINITY] {
                nondecreasing(|e| bound_high(e, d, ord(a)).unwrap(), 1.0);
            }
        }
    }

    proptest! {
        #[test]
        fn classical_never_exceeds_general(e in 0.0f64..=1.0, d in 1usize..=64, a in 0.5f64..0.9999) {
            let order = ord(a);
            let c = bound_low_classical(e, d, order).unwrap();
            let g = bound_low(e, d, order).unwrap();
            prop_assert!(c <= g + 1e-12);
            prop_assert!(c.is_finite() && g.is_finite() && c >= -1e-15);
        }
    }
}

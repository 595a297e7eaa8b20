use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const VALID_ORDERS: &str = "[1/2, 1) ∪ (1, ∞]";

/// A Rényi order in `[1/2, 1) ∪ (1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub const INFINITY: RenyiOrder = RenyiOrder(f64::INFINITY);
    pub const HALF: RenyiOrder = RenyiOrder(0.5);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha < 0.5 || alpha == 1.0 || alpha == f64::NEG_INFINITY {
            let hint = if alpha == 1.0 {
                " (the point 1 is excluded)"
            } else {
                ""
            };
            return Err(invalid(format!(
                "Rényi order {alpha} outside the valid set {VALID_ORDERS}{hint}"
            )));
        }
        Ok(Self(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn below_one(self) -> bool {
        self.0 < 1.0
    }

    /// `(alpha - 1) / alpha`, and 1 at infinity.
    pub fn alpha_prime(self) -> f64 {
        if self.is_infinite() {
            1.0
        } else {
            (self.0 - 1.0) / self.0
        }
    }

    /// The order `beta` with `1/alpha + 1/beta = 2`.
    pub fn dual(self) -> RenyiOrder {
        if self.is_infinite() {
            RenyiOrder::HALF
        } else if self.0 == 0.5 {
            RenyiOrder::INFINITY
        } else {
            RenyiOrder(self.0 / (2.0 * self.0 - 1.0))
        }
    }
}

/// Free-function form of [`RenyiOrder::dual`].
pub fn dual_order(order: RenyiOrder) -> RenyiOrder {
    order.dual()
}

impl fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for RenyiOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let value = match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" | "∞" => f64::INFINITY,
            lower => {
                if let Some((num, den)) = lower.split_once('/') {
                    let num: f64 = num.trim().parse().map_err(|_| bad_order(t))?;
                    let den: f64 = den.trim().parse().map_err(|_| bad_order(t))?;
                    num / den
                } else {
                    lower.parse::<f64>().map_err(|_| bad_order(t))?
                }
            }
        };
        RenyiOrder::new(value)
    }
}

fn bad_order(s: &str) -> Error {
    invalid(format!(
        "cannot parse Rényi order '{s}'; expected a number, a fraction or 'inf' in {VALID_ORDERS}"
    ))
}

impl Serialize for RenyiOrder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for RenyiOrder {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => RenyiOrder::new(x).map_err(serde::de::Error::custom),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_excluded_values() {
        for bad in [0.0, 0.25, 0.4999, 1.0, f64::NAN, f64::NEG_INFINITY, -2.0] {
            assert!(RenyiOrder::new(bad).is_err(), "{bad}");
        }
        let msg = RenyiOrder::new(1.0).unwrap_err().to_string();
        assert!(msg.contains(VALID_ORDERS) && msg.contains("excluded"));
    }

    #[test]
    fn alpha_prime_matches_definition() {
        for a in [0.5, 0.6, 0.75, 0.99, 1.01, 2.0, 5.0] {
            let o = RenyiOrder::new(a).unwrap();
            assert!((o.alpha_prime() - (a - 1.0) / a).abs() <= 1e-15);
        }
        assert_eq!(RenyiOrder::INFINITY.alpha_prime(), 1.0);
    }

    #[test]
    fn dual_examples() {
        let two = RenyiOrder::new(2.0).unwrap();
        assert!((two.dual().value() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(RenyiOrder::INFINITY.dual(), RenyiOrder::HALF);
        assert_eq!(RenyiOrder::HALF.dual(), RenyiOrder::INFINITY);
    }

    #[test]
    fn dual_is_involutive_and_satisfies_reciprocal_sum() {
        for a in [0.5, 0.55, 0.75, 0.9, 1.01, 1.5, 2.0, 5.0, 100.0] {
            let o = RenyiOrder::new(a).unwrap();
            let b = o.dual();
            if !b.is_infinite() {
                assert!((1.0 / a + 1.0 / b.value() - 2.0).abs() < 1e-12);
            }
            assert!((b.dual().value() - a).abs() < 1e-12 * a);
        }
    }

    #[test]
    fn parses_literals() {
        assert_eq!("inf".parse::<RenyiOrder>().unwrap(), RenyiOrder::INFINITY);
        assert_eq!("1/2".parse::<RenyiOrder>().unwrap(), RenyiOrder::HALF);
        assert_eq!("2".parse::<RenyiOrder>().unwrap().value(), 2.0);
        assert!("1".parse::<RenyiOrder>().is_err());
        assert!("abc".parse::<RenyiOrder>().is_err());
    }

    #[test]
    fn serde_uses_inf_string() {
        let v = serde_json::to_string(&vec![RenyiOrder::INFINITY, RenyiOrder::HALF]).unwrap();
        assert_eq!(v, r#"["inf",0.5]"#);
        let back: Vec<RenyiOrder> = serde_json::from_str(&v).unwrap();
        assert_eq!(back, vec![RenyiOrder::INFINITY, RenyiOrder::HALF]);
        assert!(serde_json::from_str::<RenyiOrder>("1.0").is_err());
    }
}

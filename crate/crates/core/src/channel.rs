//! Quantum channels used by the data-processing checks.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::operator::{check_same_dim, hermitize, trace_out_b, CMatrix, PsdOperator};
use crate::state::{haar_unitary, random_density, DensityOperator, Ensemble, StateRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelFamily {
    PartialTrace,
    Unitary,
    Pinching,
    Mixing,
}

impl ChannelFamily {
    pub const ALL: [ChannelFamily; 4] = [
        ChannelFamily::PartialTrace,
        ChannelFamily::Unitary,
        ChannelFamily::Pinching,
        ChannelFamily::Mixing,
    ];
}

impl fmt::Display for ChannelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelFamily::PartialTrace => "partial-trace",
            ChannelFamily::Unitary => "unitary",
            ChannelFamily::Pinching => "pinching",
            ChannelFamily::Mixing => "mixing",
        })
    }
}

/// A completely positive trace-preserving map on `d_A * d_B` dimensional operators.
#[derive(Clone, Debug)]
pub enum Channel {
    /// `X -> tr_B X`.
    PartialTrace { d_a: usize, d_b: usize },
    /// `X -> U X U^†`.
    Unitary(CMatrix),
    /// Keeps the diagonal in the computational basis.
    Pinching { dim: usize },
    /// `X -> (1 - t) X + t tr(X) tau`.
    Mixing { t: f64, tau: DensityOperator },
}

impl Channel {
    /// A random member of `family` acting on `d_a * d_b` dimensional operators.
    pub fn sample(
        family: ChannelFamily,
        d_a: usize,
        d_b: usize,
        rng: &mut StateRng,
    ) -> Result<Self> {
        let dim = d_a * d_b;
        if dim == 0 {
            return Err(invalid("dimensions must be at least 1"));
        }
        Ok(match family {
            ChannelFamily::PartialTrace => Channel::PartialTrace { d_a, d_b },
            ChannelFamily::Unitary => Channel::Unitary(haar_unitary(dim, rng)),
            ChannelFamily::Pinching => Channel::Pinching { dim },
            ChannelFamily::Mixing => {
                let t = rng.random_range(0.0..1.0);
                let tau = random_density(dim, Ensemble::HilbertSchmidt, rng)?;
                Channel::Mixing { t, tau }
            }
        })
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Channel::PartialTrace { d_a, d_b } => d_a * d_b,
            Channel::Unitary(u) => u.nrows(),
            Channel::Pinching { dim } => *dim,
            Channel::Mixing { tau, .. } => tau.dim(),
        }
    }

    pub fn apply(&self, x: &PsdOperator) -> Result<PsdOperator> {
        check_same_dim(self.input_dim(), x.dim())?;
        let m = x.matrix();
        let mut out = match self {
            Channel::PartialTrace { d_a, d_b } => trace_out_b(m, *d_a, *d_b),
            Channel::Unitary(u) => u * m * u.adjoint(),
            Channel::Pinching { dim } => CMatrix::from_fn(*dim, *dim, |i, j| {
                if i == j {
                    m[(i, i)]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
            Channel::Mixing { t, tau } => {
                m * Complex64::new(1.0 - t, 0.0) + tau.matrix() * Complex64::new(t * x.trace(), 0.0)
            }
        };
        hermitize(&mut out);
        Ok(PsdOperator::from_matrix_unchecked(out))
    }
}

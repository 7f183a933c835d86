//! The cyclotomic integers `Z[xi]`, `xi = exp(i pi / 4)`, with their two
//! planar embeddings.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// `a + b xi + c xi^2 + d xi^3`, reduced with `xi^4 = -1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cyc8(pub [i64; 4]);

impl Cyc8 {
    pub const ZERO: Cyc8 = Cyc8([0, 0, 0, 0]);
    pub const ONE: Cyc8 = Cyc8([1, 0, 0, 0]);
    pub const XI: Cyc8 = Cyc8([0, 1, 0, 0]);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Cyc8([a, b, c, d])
    }

    pub fn coeffs(&self) -> [i64; 4] {
        self.0
    }

    /// `xi^j`, for any integer `j`.
    pub fn xi_pow(j: i64) -> Cyc8 {
        let j = j.rem_euclid(8) as usize;
        let mut c = [0; 4];
        if j < 4 {
            c[j] = 1;
        } else {
            c[j - 4] = -1;
        }
        Cyc8(c)
    }

    /// Galois conjugation `xi -> xi^3`.
    pub fn star(&self) -> Cyc8 {
        let [a, b, c, d] = self.0;
        Cyc8([a, d, -c, b])
    }

    /// Position in physical space, `x` evaluated at `xi = (1 + i) / sqrt 2`.
    pub fn embed_physical(&self) -> [f64; 2] {
        let [a, b, c, d] = self.0.map(|v| v as f64);
        let s = FRAC_1_SQRT_2;
        [a + s * (b - d), s * (b + d) + c]
    }

    /// Position in internal space, `embed_physical(star(x))`.
    pub fn embed_internal(&self) -> [f64; 2] {
        let [a, b, c, d] = self.0.map(|v| v as f64);
        let s = FRAC_1_SQRT_2;
        [a + s * (d - b), s * (b + d) - c]
    }

    pub fn norm_sq_coeffs(&self) -> i64 {
        self.0.iter().map(|v| v * v).sum()
    }
}

impl Add for Cyc8 {
    type Output = Cyc8;
    fn add(self, o: Cyc8) -> Cyc8 {
        Cyc8(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for Cyc8 {
    type Output = Cyc8;
    fn sub(self, o: Cyc8) -> Cyc8 {
        Cyc8(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for Cyc8 {
    type Output = Cyc8;
    fn neg(self) -> Cyc8 {
        Cyc8(self.0.map(|v| -v))
    }
}

impl Mul for Cyc8 {
    type Output = Cyc8;
    fn mul(self, o: Cyc8) -> Cyc8 {
        let mut out = [0i64; 4];
        for i in 0..4 {
            for j in 0..4 {
                let p = self.0[i] * o.0[j];
                if i + j < 4 {
                    out[i + j] += p;
                } else {
                    out[i + j - 4] -= p;
                }
            }
        }
        Cyc8(out)
    }
}

impl fmt::Display for Cyc8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// An element `numerator / 2` of the half lattice `L/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfCyc8 {
    pub numerator: Cyc8,
}

impl HalfCyc8 {
    pub fn new(numerator: Cyc8) -> Self {
        HalfCyc8 { numerator }
    }

    pub fn from_integral(x: Cyc8) -> Self {
        HalfCyc8 {
            numerator: Cyc8(x.0.map(|v| 2 * v)),
        }
    }

    /// True when the element lies in `L/2` but not in `L`.
    pub fn is_proper_half(&self) -> bool {
        self.numerator.0.iter().any(|v| v % 2 != 0)
    }

    pub fn neg(&self) -> Self {
        HalfCyc8 {
            numerator: -self.numerator,
        }
    }

    pub fn embed_physical(&self) -> [f64; 2] {
        let [x, y] = self.numerator.embed_physical();
        [0.5 * x, 0.5 * y]
    }

    pub fn embed_internal(&self) -> [f64; 2] {
        let [x, y] = self.numerator.embed_internal();
        [0.5 * x, 0.5 * y]
    }

    /// Coefficients as real numbers (numerator halved).
    pub fn coeffs(&self) -> [f64; 4] {
        self.numerator.0.map(|v| v as f64 * 0.5)
    }
}

/// The 4x4 matrix whose rows are `(embed_physical(xi^j), embed_internal(xi^j))`.
pub fn basis_matrix(order: [usize; 4]) -> [[f64; 4]; 4] {
    order.map(|j| {
        let x = Cyc8::xi_pow(j as i64);
        let p = x.embed_physical();
        let q = x.embed_internal();
        [p[0], p[1], q[0], q[1]]
    })
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut m: [[f64; 4]; 4]) -> f64 {
    let mut det = 1.0;
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .expect("non-empty range");
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        let top = m[col];
        for row in m.iter_mut().skip(col + 1) {
            let factor = row[col] / top[col];
            for (x, t) in row.iter_mut().zip(top).skip(col) {
                *x -= factor * t;
            }
        }
    }
    det
}

/// Points of the Minkowski-embedded lattice per unit 4-volume.
pub fn lattice_density() -> f64 {
    static DENSITY: OnceLock<f64> = OnceLock::new();
    *DENSITY.get_or_init(|| 1.0 / determinant(basis_matrix([0, 1, 2, 3])).abs())
}

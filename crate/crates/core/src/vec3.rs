//! Minimal 3-vector used for positions, momenta and directions.

use core::ops::{Add, Mul, Neg, Sub};

#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);
    pub const Z: Vec3 = Vec3([0.0, 0.0, 1.0]);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn x(self) -> f64 {
        self.0[0]
    }

    pub fn y(self) -> f64 {
        self.0[1]
    }

    pub fn z(self) -> f64 {
        self.0[2]
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3([
            self.0[1] * o.0[2] - self.0[2] * o.0[1],
            self.0[2] * o.0[0] - self.0[0] * o.0[2],
            self.0[0] * o.0[1] - self.0[1] * o.0[0],
        ])
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Unit vector along `self`; the zero vector maps to `+z`.
    pub fn unit(self) -> Vec3 {
        let n = self.norm();
        if n == 0.0 {
            Vec3::Z
        } else {
            self * (1.0 / n)
        }
    }

    /// Polar angle cosine and azimuth of the direction of `self`.
    pub fn polar(self) -> (f64, f64) {
        let n = self.norm();
        if n == 0.0 {
            return (1.0, 0.0);
        }
        let c = (self.0[2] / n).clamp(-1.0, 1.0);
        let phi = if self.0[0] == 0.0 && self.0[1] == 0.0 {
            0.0
        } else {
            self.0[1].atan2(self.0[0])
        };
        (c, phi)
    }

    /// Orthonormal frame `(e1, e2, axis)` with `axis` along `self`.
    pub fn frame(self) -> (Vec3, Vec3, Vec3) {
        let w = self.unit();
        let helper = if w.0[0].abs() < 0.9 {
            Vec3::new(1.0, 0.0, 0.0)
        } else {
            Vec3::new(0.0, 1.0, 0.0)
        };
        let u = helper.cross(w).unit();
        let v = w.cross(u);
        (u, v, w)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

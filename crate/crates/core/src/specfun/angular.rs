//! Product quadrature on the unit sphere.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use crate::quadrature::gauss_legendre;
use crate::Vec3;

/// Gauss–Legendre in `cos(theta)` times a uniform azimuthal rule.
///
/// With `n_theta` polar and `n_phi` azimuthal nodes the grid integrates every
/// spherical harmonic of degree up to `min(2 n_theta - 1, n_phi - 1)` exactly
/// (in exact arithmetic); [`AngularGrid::degree`] reports that bound.
#[derive(Debug, Clone)]
pub struct AngularGrid {
    pub nodes: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Cosines of the polar nodes measured from [`AngularGrid::axis`].
    pub cos_theta: Vec<f64>,
    pub axis: Vec3,
}

impl AngularGrid {
    pub fn product(n_theta: usize, n_phi: usize) -> Self {
        Self::product_about(n_theta, n_phi, Vec3::Z)
    }

    /// Grid whose polar axis is `axis`. Node `(it, ip)` is stored at index
    /// `it * n_phi + ip`.
    pub fn product_about(n_theta: usize, n_phi: usize, axis: Vec3) -> Self {
        let gl = gauss_legendre(n_theta);
        let (e1, e2, e3) = axis.frame();
        let dphi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (&c, &w) in gl.nodes.iter().zip(&gl.weights) {
            let s = (1.0 - c * c).max(0.0).sqrt();
            for ip in 0..n_phi {
                let (sp, cp) = (ip as f64 * dphi).sin_cos();
                nodes.push(e1 * (s * cp) + e2 * (s * sp) + e3 * c);
                weights.push(w * dphi);
            }
        }
        Self {
            nodes,
            weights,
            n_theta,
            n_phi,
            cos_theta: gl.nodes,
            axis: e3,
        }
    }

    /// Smallest product grid exact through spherical-harmonic degree `degree`.
    pub fn for_degree(degree: usize) -> Self {
        Self::product(degree / 2 + 1, degree + 1)
    }

    pub fn degree(&self) -> usize {
        (2 * self.n_theta - 1).min(self.n_phi - 1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<T>(&self, mut f: impl FnMut(Vec3) -> T) -> T
    where
        T: core::ops::Mul<f64, Output = T> + core::iter::Sum,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&n, &w)| f(n) * w)
            .sum()
    }
}

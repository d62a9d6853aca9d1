use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::quadrature::RadialProfile;
use crate::special::{fundamental_laplace, log_weight};

/// Constant fit of `u / E` near the inner boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularMass {
    /// mean of `u / E` over the window, `E` the normalised fundamental solution
    pub m_est: f64,
    pub fit_window: (f64, f64),
    /// `max / min` of `u / E` over the window
    pub fit_spread: f64,
    /// mean of `u / r^{2-N}` (`u / log(2e/r)` in the plane) over the window
    pub profile_coefficient: f64,
}

/// Fits over the innermost decade `[r_0, 10 r_0]` of the profile's nodes.
pub fn extract_singular_mass(u: &RadialProfile, dim: usize) -> Result<SingularMass> {
    if dim < 2 {
        return Err(domain(format!("dimension {dim} < 2")));
    }
    let nodes = u.nodes();
    let r0 = nodes[0];
    let top = 10.0 * r0 * (1.0 + 1e-12);
    let idx: Vec<usize> = (0..nodes.len()).take_while(|&i| nodes[i] <= top).collect();
    if idx.len() < 5 {
        return Err(Error::WindowTooSmall { nodes: idx.len() });
    }
    let mut ratios = Vec::with_capacity(idx.len());
    let mut coeffs = Vec::with_capacity(idx.len());
    for &i in &idx {
        let r = nodes[i];
        let v = u.values()[i];
        if !(v > 0.0) {
            return Err(Error::InvalidProfile(format!("profile not positive at r = {r}")));
        }
        ratios.push(v / fundamental_laplace(dim, r)?);
        let shape = if dim == 2 { log_weight(r) } else { r.powf(2.0 - dim as f64) };
        coeffs.push(v / shape);
    }
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    Ok(SingularMass {
        m_est: mean(&ratios),
        fit_window: (r0, nodes[*idx.last().unwrap()]),
        fit_spread: hi / lo,
        profile_coefficient: mean(&coeffs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::RadialGrid;
    use crate::special::fundamental_schrodinger;

    #[test]
    fn exact_multiple_of_e() {
        let g = RadialGrid::geometric(1.0 / 64.0, 8).unwrap();
        let u = RadialProfile::from_fn(g.nodes().to_vec(), |r| 0.1 * fundamental_laplace(3, r).unwrap(), (1.0, 0.0))
            .unwrap();
        let m = extract_singular_mass(&u, 3).unwrap();
        assert!((m.m_est - 0.1).abs() < 1e-14);
        assert!((m.fit_spread - 1.0).abs() < 1e-14);
        assert!((m.profile_coefficient - 0.1 / (4.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert_eq!(m.fit_window.0, 1.0 / 64.0);
    }

    #[test]
    fn yukawa_mass_tends_to_one() {
        let mut last = f64::INFINITY;
        for inner in [1e-2, 1e-4, 1e-6] {
            let g = RadialGrid::geometric(inner, 8).unwrap();
            let u = RadialProfile::from_fn(g.nodes().to_vec(), |r| fundamental_schrodinger(3, 1.0, r).unwrap(), (1.0, 0.0))
                .unwrap();
            let err = (extract_singular_mass(&u, 3).unwrap().m_est - 1.0).abs();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-4);
    }

    #[test]
    fn small_window_is_an_error() {
        let u = RadialProfile::new(vec![0.2, 0.5, 1.0], vec![3.0, 2.0, 1.0], (1.0, 0.0)).unwrap();
        assert!(matches!(extract_singular_mass(&u, 3), Err(Error::WindowTooSmall { nodes: 3 })));
    }
}

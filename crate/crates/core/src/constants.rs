//! Physical constants (CODATA 2018 exact values).

/// Reduced Planck constant, J·s.
pub const REDUCED_PLANCK: f64 = 1.054571817e-34;

/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.8541878128e-12;

/// Constants bundle handed to formulas that need more than one of them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub reduced_planck: f64,
    pub vacuum_permittivity: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            reduced_planck: REDUCED_PLANCK,
            vacuum_permittivity: VACUUM_PERMITTIVITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codata_values() {
        let c = PhysicalConstants::default();
        assert!(c.reduced_planck > 0.0);
        assert!(c.vacuum_permittivity > 0.0);
        assert_eq!(c.reduced_planck, 1.054571817e-34);
        assert_eq!(c.vacuum_permittivity, 8.8541878128e-12);
    }
}

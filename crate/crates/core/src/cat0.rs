//! A validated complex bundled with its hyperplanes.

use thiserror::Error;

use crate::complex::{ComplexError, CubeComplex, ValidationOptions, ValidationReport, Violation};
use crate::hyperplanes::{HyperplaneError, HyperplaneSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Cat0Error {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Hyperplane(#[from] HyperplaneError),
    #[error("complex is not CAT(0): {0}")]
    Invalid(Violation),
}

#[derive(Debug, Clone)]
pub struct Cat0Complex {
    complex: CubeComplex,
    hyperplanes: HyperplaneSystem,
}

impl Cat0Complex {
    /// Validates with default options, then computes hyperplanes.
    pub fn new(complex: CubeComplex) -> Result<Self, Cat0Error> {
        Self::with_options(complex, &ValidationOptions::default()).map(|(c, _)| c)
    }

    pub fn with_options(
        complex: CubeComplex,
        opts: &ValidationOptions,
    ) -> Result<(Self, ValidationReport), Cat0Error> {
        let report = complex.validate(opts);
        if let Some(v) = &report.violation {
            return Err(Cat0Error::Invalid(v.clone()));
        }
        let me = Self::assume_valid(complex)?;
        Ok((me, report))
    }

    /// Computes hyperplanes without running the validator. Hyperplane
    /// construction still rejects complexes whose edge classes are not
    /// two-sided.
    pub fn assume_valid(complex: CubeComplex) -> Result<Self, Cat0Error> {
        let hyperplanes = HyperplaneSystem::compute(&complex)?;
        Ok(Self {
            complex,
            hyperplanes,
        })
    }

    pub fn complex(&self) -> &CubeComplex {
        &self.complex
    }

    pub fn hyperplanes(&self) -> &HyperplaneSystem {
        &self.hyperplanes
    }

    pub fn n_vertices(&self) -> usize {
        self.complex.n_vertices()
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn into_complex(self) -> CubeComplex {
        self.complex
    }
}

//! The octagonal cut-and-project scheme over `Z[xi]`, `xi` a primitive
//! eighth root of unity, with the star map `xi -> xi^3`.

mod cyc8;
mod diffraction;
mod mld;
mod modelset;

pub use cyc8::{basis_matrix, determinant, lattice_density, Cyc8, HalfCyc8};
pub use diffraction::{
    additivity_witness, amplitude_ratio, amplitude_ratio_alt, diffraction_amplitude,
    diffraction_intensity, intensity_table, intensity_table_csv, phase_chi, ratio_parts,
    singular_margin, wrap_unit, AdditivityWitness, IntensityRow, Ratio, SINGULAR_THRESHOLD,
    WITNESS_MARGIN,
};
pub use mld::{mld_check, mld_witness, MldReport, MLD_TRANSLATION};
pub use modelset::{
    autocorr_coefficient, empirical_autocorr, generate_model_set, three_point_coefficient,
    three_point_correlation, three_point_search, ModelSetPatch,
    ThreePointCandidate, SchemeConfig, DEFAULT_WINDOW_SHIFT,
};

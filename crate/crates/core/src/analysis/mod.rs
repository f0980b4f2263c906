//! Diameters, window maxima, proof constants and the inequality checks run along a
//! trajectory.

pub mod certificate;
pub mod checks;
pub mod diameter;
pub mod rate;

pub use certificate::{
    build_certificate, build_certificate_with, certificate_constants, CertificateOptions,
    ConsensusCertificate, ProofConstants,
};
pub use checks::{
    probe_directions, verify_hull_confinement, verify_lemma_chain, verify_window_contraction,
    CheckRecord, HullReport,
};
pub use diameter::{
    compute_m0, diameter_at, history_diameter, point_cloud_diameter, window_diameters,
    WindowDiameters,
};
pub use rate::fit_decay_rate;

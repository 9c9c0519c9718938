//! Reference alert types: daily volumes and payoffs of the seven EMR alert
//! categories used by the default configuration and the test suites.

use alloc::vec::Vec;

use crate::datagen::TypeVolume;
use crate::types::{PayoffStructure, TypePayoff};

/// Share of warned benign users who abandon the access request.
pub const DEFAULT_QUIT_PROB: f64 = 0.186;

/// Loss per abandoned benign request.
pub const DEFAULT_QUIT_LOSS: f64 = -1.0;

pub const DEFAULT_AUDIT_COST: f64 = 1.0;

pub const TYPE_NAMES: [&str; 7] = [
    "Same Last Name",
    "Department Co-worker",
    "Neighbor (<= 0.5 miles)",
    "Same Address",
    "Last Name; Neighbor (<= 0.5 miles)",
    "Last Name; Same Address",
    "Last Name; Same Address; Neighbor (<= 0.5 miles)",
];

/// Daily alert count (mean, standard deviation) per type.
pub const DAILY_VOLUME: [(f64, f64); 7] = [
    (196.57, 17.30),
    (29.02, 5.56),
    (140.46, 23.23),
    (10.84, 3.73),
    (25.43, 4.51),
    (15.14, 4.10),
    (43.27, 6.45),
];

/// `(u_dc, u_du, u_ac, u_au)` per type.
pub const PAYOFFS: [(f64, f64, f64, f64); 7] = [
    (100.0, -400.0, -2000.0, 400.0),
    (150.0, -500.0, -2250.0, 400.0),
    (150.0, -600.0, -2500.0, 450.0),
    (300.0, -800.0, -2500.0, 600.0),
    (400.0, -1000.0, -3000.0, 650.0),
    (600.0, -1500.0, -5000.0, 700.0),
    (700.0, -2000.0, -6000.0, 800.0),
];

pub fn reference_type_payoffs() -> Vec<TypePayoff> {
    PAYOFFS
        .iter()
        .map(|&(u_dc, u_du, u_ac, u_au)| TypePayoff {
            u_dc,
            u_du,
            u_ac,
            u_au,
            audit_cost: DEFAULT_AUDIT_COST,
            quit_prob: DEFAULT_QUIT_PROB,
            quit_loss: DEFAULT_QUIT_LOSS,
        })
        .collect()
}

pub fn reference_payoffs() -> PayoffStructure {
    PayoffStructure::new(reference_type_payoffs()).expect("reference payoffs are sign-valid")
}

pub fn reference_volumes() -> Vec<TypeVolume> {
    DAILY_VOLUME
        .iter()
        .map(|&(mean, std_dev)| TypeVolume { mean, std_dev })
        .collect()
}

/// Two small types used by the oracle cross-checks.
pub fn two_type_payoffs(quit_prob: f64, quit_loss: f64) -> PayoffStructure {
    PayoffStructure::new(alloc::vec![
        TypePayoff {
            u_dc: 2.0,
            u_du: -8.0,
            u_ac: -10.0,
            u_au: 5.0,
            audit_cost: 1.0,
            quit_prob,
            quit_loss,
        },
        TypePayoff {
            u_dc: 1.0,
            u_du: -5.0,
            u_ac: -6.0,
            u_au: 4.0,
            audit_cost: 1.0,
            quit_prob,
            quit_loss,
        },
    ])
    .expect("fixture payoffs are sign-valid")
}

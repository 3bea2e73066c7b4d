//! Embedding verdicts from transform signs: sign scans with witnesses,
//! moment-product certificates, and the critical exponent of `ℓ_q^n`.

mod certificate;
mod critical;
mod scan;

pub use certificate::{sign_change_certificate, CertificateReport};
pub use critical::{critical_exponent, CriticalReport, CriticalStep};
pub use scan::{scan_points, sign_scan, sign_scan_with, PointEvaluator, ScanConfig, SignScanReport, Verdict, Witness};

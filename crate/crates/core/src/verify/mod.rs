//! Verdicts on cluster structure, eigenvalue counts and band gaps, plus report output.

mod bands;
mod clusters;
mod report;
mod weyl;

pub use bands::{check_bands, sigma_bands, Band, BandReport};
pub use clusters::{
    check_cluster_law, detect_clusters, BinomialConvention, Cluster, ClusterInput, ClusterReport, ClusterRow,
    VolumeFit, DEFAULT_GAP_THRESHOLD,
};
pub use report::{emit_report, render, CheckOutcome, Report, ReportFormat, SCHEMA_VERSION};
pub use weyl::{check_weyl_law, twisted_liouville_volume, WeylLawRecord, COUNT_TOLERANCE};

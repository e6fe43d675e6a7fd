//! Point-cloud data model, file IO, exact spatial queries and local
//! Gaussian statistics.

mod io;
mod kdtree;
mod model;
mod stats;

pub use io::{
    load_cloud, load_cloud_auto, save_classified, write_classified_ply, write_cloud,
    write_ply_ascii, write_xyz, CloudFormat,
};
pub use kdtree::{linear_scan, Neighbor, SpatialIndex};
pub use model::{CloudError, PointCloud, PointLabel};
pub use stats::{local_statistics, LocalStats, PointStats};

//! Keypoint export as CSV (`index,x,y,z,r,g,b,d_g,d_c`) or as a cloud file.

use std::io::Write;

use crate::cloud::ColoredPointCloud;
use crate::detector::{KeypointSet, SaliencyField};
use crate::error::{Error, Result};
use crate::io::{write_cloud, CloudFormat};

pub const KEYPOINT_CSV_HEADER: [&str; 9] = ["index", "x", "y", "z", "r", "g", "b", "d_g", "d_c"];

/// Writes one row per keypoint. Saliency columns are left empty when the
/// corresponding field is not given (e.g. for the random baseline).
pub fn write_keypoints_csv<W: Write>(
    writer: W,
    cloud: &ColoredPointCloud,
    keypoints: &KeypointSet,
    geometric: Option<&SaliencyField>,
    photometric: Option<&SaliencyField>,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    w.write_record(KEYPOINT_CSV_HEADER)?;
    let field = |f: Option<&SaliencyField>, i: usize| f.map(|f| f.value(i).to_string()).unwrap_or_default();
    for &i in &keypoints.indices {
        let p = cloud.points().get(i).ok_or(Error::IndexOutOfRange { index: i, len: cloud.len() })?;
        w.write_record([
            i.to_string(),
            p.gx.to_string(),
            p.gy.to_string(),
            p.gz.to_string(),
            p.r.to_string(),
            p.g.to_string(),
            p.b.to_string(),
            field(geometric, i),
            field(photometric, i),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// The selected points as a cloud file of the given format.
pub fn keypoints_to_cloud_bytes(
    cloud: &ColoredPointCloud,
    keypoints: &KeypointSet,
    format: CloudFormat,
) -> Result<Vec<u8>> {
    write_cloud(&cloud.select(&keypoints.indices)?, format)
}

//! Sparse multi-label datasets.
//!
//! Feature indices are 1-based everywhere they are visible (in [`SparseVector`]
//! entries and in files); label indices are 0-based in memory and 1-based in
//! files.

mod dataset;
mod format;
mod mask;
mod sparse;

pub use dataset::{LabelVector, MultiLabelDataset};
pub use format::{parse_dataset, parse_label_sets, write_dataset, write_label_sets};
pub use mask::{mask_labels, MaskSpec, Masked};
pub use sparse::SparseVector;

use crate::error::{Error, Result};

/// Appends one length-q augmentation vector to every instance.
///
/// The new features occupy indices `D+1..=D+q`; zero values are dropped.
pub fn extend_features(
    ds: &MultiLabelDataset,
    augmentations: &[Vec<f64>],
) -> Result<MultiLabelDataset> {
    if augmentations.len() != ds.num_instances() {
        return Err(Error::InvalidConfig(format!(
            "{} augmentation rows for {} instances",
            augmentations.len(),
            ds.num_instances()
        )));
    }
    let q = ds.num_labels();
    let offset = ds.num_features();
    let mut instances = Vec::with_capacity(ds.num_instances());
    for (i, (x, aug)) in ds.instances().iter().zip(augmentations).enumerate() {
        if aug.len() != q {
            return Err(Error::InvalidConfig(format!(
                "augmentation for instance {i} has length {}, expected {q}",
                aug.len()
            )));
        }
        instances.push(x.extended(offset, aug)?);
    }
    MultiLabelDataset::new(
        offset + q,
        q,
        instances,
        ds.observed_labels().to_vec(),
        ds.ground_truth().map(<[LabelVector]>::to_vec),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(d: usize, q: usize) -> MultiLabelDataset {
        let x = SparseVector::new(vec![(1, 1.0), (d, 2.0)]).unwrap();
        let y = LabelVector::from_positives(q, &[0]).unwrap();
        MultiLabelDataset::new(d, q, vec![x], vec![y], None).unwrap()
    }

    #[test]
    fn zero_augmentation_only_grows_dimension() {
        let ds = toy(5, 2);
        let ext = extend_features(&ds, &[vec![0.0, 0.0]]).unwrap();
        assert_eq!(ext.num_features(), 7);
        assert_eq!(ext.instances()[0], ds.instances()[0]);
        assert_eq!(ext.observed_labels(), ds.observed_labels());
    }

    #[test]
    fn augmentation_lands_after_base_features() {
        let ds = toy(5, 2);
        let ext = extend_features(&ds, &[vec![0.3, 0.9]]).unwrap();
        assert_eq!(
            ext.instances()[0].entries(),
            &[(1, 1.0), (5, 2.0), (6, 0.3), (7, 0.9)]
        );
    }

    #[test]
    fn chained_extension_indices() {
        let ds = toy(5, 2);
        let once = extend_features(&ds, &[vec![0.3, 0.9]]).unwrap();
        let twice = extend_features(&once, &[vec![0.1, 0.2]]).unwrap();
        assert_eq!(twice.num_features(), 9);
        let tail: Vec<_> = twice.instances()[0].entries()[4..].to_vec();
        assert_eq!(tail, vec![(8, 0.1), (9, 0.2)]);
        // first D coordinates untouched
        assert_eq!(&twice.instances()[0].entries()[..2], ds.instances()[0].entries());
    }

    #[test]
    fn wrong_augmentation_length_is_rejected() {
        let ds = toy(5, 2);
        assert!(extend_features(&ds, &[vec![0.3]]).is_err());
        assert!(extend_features(&ds, &[]).is_err());
    }
}

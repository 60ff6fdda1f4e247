use crate::dataio::csv_stream::FlowRecord;
use crate::dataio::labels::NUM_CLASSES;
use crate::error::{Error, Result};
use crate::numerics::{Scalar, SeededRng, Tensor};

/// One mini-batch: features `[B, T, 1]`, one-hot targets `[B, classes]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch<T> {
    pub features: Tensor<T>,
    pub targets: Tensor<T>,
    pub labels: Vec<usize>,
}

impl<T: Scalar> Batch<T> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Assembles a batch from labeled records.
    pub fn from_records<'a>(
        records: impl IntoIterator<Item = &'a FlowRecord>,
        classes: usize,
    ) -> Result<Self> {
        let mut feats = Vec::new();
        let mut labels = Vec::new();
        let mut width = None;
        for r in records {
            let label = r.label.ok_or_else(|| {
                Error::Data("record without a class label in a training batch".into())
            })?;
            if label >= classes {
                return Err(Error::Data(format!(
                    "class label {label} out of range 0..{classes}"
                )));
            }
            let w = *width.get_or_insert(r.features.len());
            if r.features.len() != w {
                return Err(Error::FeatureLength {
                    expected: w,
                    actual: r.features.len(),
                });
            }
            feats.extend(r.features.iter().map(|&v| T::from_f64(v)));
            labels.push(label);
        }
        let b = labels.len();
        let t = width.unwrap_or(0);
        let mut targets = Tensor::zeros(&[b, classes]);
        for (i, &l) in labels.iter().enumerate() {
            targets.data_mut()[i * classes + l] = T::one();
        }
        Ok(Batch {
            features: Tensor::from_vec(&[b, t, 1], feats)?,
            targets,
            labels,
        })
    }
}

/// Iterator over fixed-size batches drawn from `records` in a given order.
/// The last batch keeps the remainder.
pub struct Batches<'a, T> {
    records: &'a [FlowRecord],
    order: Vec<usize>,
    batch_size: usize,
    classes: usize,
    pos: usize,
    _marker: std::marker::PhantomData<T>,
}

impl<'a, T: Scalar> Batches<'a, T> {
    pub fn new(
        records: &'a [FlowRecord],
        order: Vec<usize>,
        batch_size: usize,
        classes: usize,
    ) -> Result<Self> {
        if batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if let Some(&i) = order.iter().find(|&&i| i >= records.len()) {
            return Err(Error::Data(format!("record index {i} out of range")));
        }
        Ok(Batches {
            records,
            order,
            batch_size,
            classes,
            pos: 0,
            _marker: std::marker::PhantomData,
        })
    }

    pub fn batch_count(&self) -> usize {
        self.order.len().div_ceil(self.batch_size)
    }
}

impl<T: Scalar> Iterator for Batches<'_, T> {
    type Item = Result<Batch<T>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.pos >= self.order.len() {
            return None;
        }
        let end = (self.pos + self.batch_size).min(self.order.len());
        let idx = &self.order[self.pos..end];
        self.pos = end;
        Some(Batch::from_records(
            idx.iter().map(|&i| &self.records[i]),
            self.classes,
        ))
    }
}

/// Batches over all records, optionally in a seeded shuffled order.
pub fn batches<T: Scalar>(
    records: &[FlowRecord],
    batch_size: usize,
    seed: u64,
    shuffle: bool,
) -> Result<Batches<'_, T>> {
    let mut order: Vec<usize> = (0..records.len()).collect();
    if shuffle {
        SeededRng::stream(seed, "batches").shuffle(&mut order);
    }
    Batches::new(records, order, batch_size, NUM_CLASSES)
}

//! Peak heap use of streaming ingestion must not grow with input length.

use std::alloc::{GlobalAlloc, Layout, System};
use std::io::Read;
use std::sync::atomic::{AtomicUsize, Ordering};

use botnet_gru_cnn::dataio::{
    CsvSchema, FeatureRange, FittedFeatures, FlowStream, DEFAULT_FEATURES,
};

struct Counting;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc(layout) };
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::SeqCst) + layout.size();
            PEAK.fetch_max(now, Ordering::SeqCst);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        CURRENT.fetch_sub(layout.size(), Ordering::SeqCst);
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

/// CSV text produced on demand, one row at a time.
struct LazyFlows {
    rows: usize,
    next: usize,
    pending: Vec<u8>,
    pos: usize,
}

impl LazyFlows {
    fn new(rows: usize) -> Self {
        let mut header: Vec<String> = DEFAULT_FEATURES.iter().map(|s| s.to_string()).collect();
        header.push("category".into());
        header.push("subcategory".into());
        LazyFlows {
            rows,
            next: 0,
            pending: format!("{}\n", header.join(",")).into_bytes(),
            pos: 0,
        }
    }

    fn refill(&mut self) {
        self.pending.clear();
        self.pos = 0;
        if self.next == self.rows {
            return;
        }
        let i = self.next;
        self.next += 1;
        let mut line = String::with_capacity(160);
        for c in 0..DEFAULT_FEATURES.len() {
            line.push_str(&format!("{}.{},", (i + c) % 97, (i * 7 + c) % 1000));
        }
        line.push_str(if i.is_multiple_of(2) {
            "Normal,Normal\n"
        } else {
            "DDoS,TCP\n"
        });
        self.pending.extend_from_slice(line.as_bytes());
    }
}

impl Read for LazyFlows {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        if self.pos == self.pending.len() {
            self.refill();
        }
        let n = buf.len().min(self.pending.len() - self.pos);
        buf[..n].copy_from_slice(&self.pending[self.pos..self.pos + n]);
        self.pos += n;
        Ok(n)
    }
}

fn scaler() -> FittedFeatures {
    let ranges = DEFAULT_FEATURES
        .iter()
        .map(|n| FeatureRange {
            name: n.to_string(),
            min: 0.0,
            max: 97.0,
        })
        .collect();
    FittedFeatures::from_ranges(ranges).unwrap()
}

/// Streams `rows` records and returns (records seen, peak bytes above the
/// starting heap).
fn stream_peak(rows: usize, fitted: &FittedFeatures) -> (usize, usize) {
    let base = CURRENT.load(Ordering::SeqCst);
    PEAK.store(base, Ordering::SeqCst);
    let stream =
        FlowStream::from_reader(LazyFlows::new(rows), &CsvSchema::default(), "lazy").unwrap();
    let mut seen = 0;
    let mut checksum = 0.0;
    for rec in stream.normalized(fitted) {
        let rec = rec.unwrap();
        checksum += rec.features[0];
        seen += 1;
    }
    assert!(checksum.is_finite());
    (seen, PEAK.load(Ordering::SeqCst) - base)
}

#[test]
fn peak_memory_is_independent_of_row_count() {
    let fitted = scaler();
    let (small_rows, small_peak) = stream_peak(10_000, &fitted);
    let (large_rows, large_peak) = stream_peak(1_000_000, &fitted);
    assert_eq!(small_rows, 10_000);
    assert_eq!(large_rows, 1_000_000);
    println!("peak heap: 10k rows {small_peak} B, 1M rows {large_peak} B");
    assert!(
        large_peak <= small_peak + 4096,
        "peak grew with input: {small_peak} B for 10k rows, {large_peak} B for 1M rows"
    );
}

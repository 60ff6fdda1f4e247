//! Layer table for the default model and for a narrower variant.

use botnet_gru_cnn::network::{summary, Architecture};

fn main() {
    let arch = Architecture::default();
    println!("{}", summary(&arch));

    let narrow = Architecture {
        filters: 32,
        gru_units: 4,
        ..arch
    };
    println!("{}", summary(&narrow));
}

//! Finite-difference check of the full network's gradients, then the same
//! check with the GRU recurrent gradients sign-flipped.

use botnet_gru_cnn::network::{Architecture, NetworkParameters};
use botnet_gru_cnn::training::{gradient_check, GradCheckConfig, Mutation};

fn main() -> botnet_gru_cnn::Result<()> {
    let params = NetworkParameters::<f64>::build(&Architecture::default(), 1);
    let clean = gradient_check(&params, &GradCheckConfig::default())?;
    print!("{clean}");

    let mutated = gradient_check(
        &params,
        &GradCheckConfig {
            mutation: Some(Mutation::FlipGruRecurrent),
            ..Default::default()
        },
    )?;
    print!("{mutated}");
    Ok(())
}

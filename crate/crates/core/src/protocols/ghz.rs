use super::spec::{ghz_capable_axis, squeezing_steps};
use crate::spin::{apply_steps, coherent_state, DickeState, Sign};
use crate::{Error, Result};

/// Maximally entangled state reached by twisting a coherent state for
/// `χt = π/2` (with the squeezing rotation, which vanishes there). The input
/// axis is chosen so the cat lies along `y` and `Jy` resolves it at the
/// Heisenberg limit.
pub fn ghz_state(n: usize) -> Result<DickeState> {
    if n < 2 {
        return Err(Error::TooFewParticles { min: 2, found: n });
    }
    let axis = ghz_capable_axis(n);
    let steps = squeezing_steps(n, std::f64::consts::FRAC_PI_2, axis)?;
    Ok(apply_steps(&coherent_state(n, axis, Sign::Plus)?, &steps))
}

//! Sign classes of a velocity component against a control component.

use navier_picard::control::{sign_partition, SignClass};
use navier_picard::fields::{GridSpec, ScalarField};

fn main() -> navier_picard::Result<()> {
    let g = GridSpec::periodic_2pi(16)?;
    let v = ScalarField::from_fn(g, |x| x[0].sin() * x[1].cos());
    let r = ScalarField::from_fn(g, |x| x[2].cos());
    let part = sign_partition(&v, &r)?;
    for class in SignClass::ALL {
        println!("{class:?}: {} points, equal sign: {}", part.count(class), class.is_equal_sign());
    }
    Ok(())
}

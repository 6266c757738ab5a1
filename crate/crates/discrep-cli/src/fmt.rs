//! Float serialization: 17 significant digits, enough for f64 to round-trip
//! bit-exactly through text.

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt17_round_trips_exactly() {
        for x in [
            0.075,
            1.0 / 13.0,
            1.05,
            f64::MIN_POSITIVE,
            987654321.12345,
            -3.5e-200,
        ] {
            let parsed: f64 = fmt17(x).parse().unwrap();
            assert_eq!(parsed.to_bits(), x.to_bits(), "{x} -> {}", fmt17(x));
        }
    }
}

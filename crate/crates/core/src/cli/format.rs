//! Number formatting and CSV emission.

use std::io::Write;

use crate::achievable::BoundaryPoint;
use crate::error::Result;
use crate::ray::Ray;
use crate::region::Region;

/// Format `x` like C's `%.12g`: 12 significant digits, trailing zeros trimmed,
/// scientific notation outside `[1e-4, 1e12)`.
pub fn fmt_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Round to the 12 significant digits that the text outputs carry.
pub fn round_g12(x: f64) -> f64 {
    fmt_g12(x).parse().unwrap_or(x)
}

pub const REGION_HEADER: [&str; 11] = [
    "theta_deg",
    "k",
    "ra",
    "rb",
    "lambda1",
    "lambda2",
    "lambda3",
    "lambda4",
    "lambda5",
    "lambda6",
    "active_state_count",
];

fn k_field(ray: Ray) -> String {
    fmt_g12(ray.k())
}

fn region_row(p: &BoundaryPoint, with_shares: bool) -> Vec<String> {
    let mut row = vec![fmt_g12(p.ray.theta_deg()), k_field(p.ray), fmt_g12(p.ra), fmt_g12(p.rb)];
    if with_shares {
        row.extend(p.shares.lambda().iter().map(|l| fmt_g12(*l)));
        row.push(p.active_states().len().to_string());
    } else {
        row.extend(std::iter::repeat(String::new()).take(7));
    }
    row
}

/// Write one CSV row per swept point. `with_shares = false` leaves the
/// time-share and state-count columns empty.
pub fn write_region_csv<W: Write>(out: W, region: &Region, with_shares: bool) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(REGION_HEADER)?;
    for p in region.points() {
        w.write_record(region_row(p, with_shares))?;
    }
    w.flush()?;
    Ok(())
}

//! Number formatting with a fixed count of significant digits.

/// `x` rounded to `digits` significant digits, in plain notation for
/// moderate exponents and scientific notation otherwise, without trailing
/// zeros.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        trim(&format!("{:.*}", (digits as i32 - 1 - exp).max(0) as usize, x))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Space-separated [`sig`] values.
pub fn sig_all(xs: &[f64], digits: usize) -> String {
    xs.iter().map(|&x| sig(x, digits)).collect::<Vec<_>>().join(" ")
}

//! Command-line value parsing: complex literals and space descriptors.

use num_complex::Complex64;

/// Parse a complex literal.
///
/// Grammar (whitespace is ignored everywhere):
///
/// ```text
/// complex := real | imag | real sign imag
/// real    := any float literal, e-notation allowed
/// imag    := [float] "i"        ("i" alone means 1i, "-i" means -1i)
/// ```
///
/// Examples: `2`, `2i`, `-i`, `0.5-0.25i`, `1e-3+2.5e-4i`.
pub fn parse_complex(raw: &str) -> Result<Complex64, String> {
    let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    let parse_part = |txt: &str| -> Result<f64, String> {
        let v: f64 = txt
            .parse()
            .map_err(|_| format!("invalid number `{txt}` in `{raw}`"))?;
        if !v.is_finite() {
            return Err(format!("non-finite component `{txt}` in `{raw}`"));
        }
        Ok(v)
    };
    if let Some(body) = s.strip_suffix(['i', 'I']) {
        // Split at the last '+'/'-' that is neither leading nor an
        // exponent sign; everything after it is the imaginary part.
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        let (re_txt, im_txt) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let im = match im_txt {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => parse_part(other)?,
        };
        let re = if re_txt.is_empty() { 0.0 } else { parse_part(re_txt)? };
        Ok(Complex64::new(re, im))
    } else {
        Ok(Complex64::new(parse_part(&s)?, 0.0))
    }
}

/// A named family preset: `real:N`, `complex:M`, `quat:M`, or `oct`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyArg {
    Real(u32),
    Complex(u32),
    Quaternionic(u32),
    Octonionic,
}

pub fn parse_family(raw: &str) -> Result<FamilyArg, String> {
    let s = raw.trim().to_ascii_lowercase();
    if s == "oct" || s == "octonionic" {
        return Ok(FamilyArg::Octonionic);
    }
    let (name, num) = s.split_once(':').ok_or_else(|| {
        format!("family `{raw}` must look like real:N, complex:M, quat:M, or oct")
    })?;
    let n: u32 = num
        .parse()
        .map_err(|_| format!("invalid member index `{num}` in `{raw}`"))?;
    match name {
        "real" => Ok(FamilyArg::Real(n)),
        "complex" => Ok(FamilyArg::Complex(n)),
        "quat" | "quaternionic" => Ok(FamilyArg::Quaternionic(n)),
        other => Err(format!("unknown family `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plain_forms() {
        assert_eq!(parse_complex("2").unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(parse_complex("-3.5").unwrap(), Complex64::new(-3.5, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("+i").unwrap(), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn composite_forms() {
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(parse_complex("0.5-0.25i").unwrap(), Complex64::new(0.5, -0.25));
        assert_eq!(parse_complex("1 + 2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(parse_complex("-1.5-2i").unwrap(), Complex64::new(-1.5, -2.0));
        assert_eq!(parse_complex("1+i").unwrap(), Complex64::new(1.0, 1.0));
    }

    #[test]
    fn exponent_notation() {
        assert_eq!(parse_complex("1e-3i").unwrap(), Complex64::new(0.0, 1e-3));
        assert_eq!(
            parse_complex("1e-3+2.5e-4i").unwrap(),
            Complex64::new(1e-3, 2.5e-4)
        );
        assert_eq!(parse_complex("1E+3i").unwrap(), Complex64::new(0.0, 1e3));
        assert_eq!(parse_complex("2e5").unwrap(), Complex64::new(2e5, 0.0));
    }

    #[test]
    fn rejections() {
        assert!(parse_complex("").is_err());
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("1+2j").is_err());
        assert!(parse_complex("1+2").is_err());
        assert!(parse_complex("nan").is_err());
        assert!(parse_complex("infi").is_err());
        assert!(parse_complex("1++2i").is_err());
    }

    #[test]
    fn families() {
        assert_eq!(parse_family("real:3").unwrap(), FamilyArg::Real(3));
        assert_eq!(parse_family("complex:2").unwrap(), FamilyArg::Complex(2));
        assert_eq!(parse_family("quat:2").unwrap(), FamilyArg::Quaternionic(2));
        assert_eq!(parse_family("oct").unwrap(), FamilyArg::Octonionic);
        assert!(parse_family("real").is_err());
        assert!(parse_family("sedenion:2").is_err());
    }

    proptest! {
        #[test]
        fn roundtrip_exact(re in -1e12f64..1e12, im in -1e12f64..1e12) {
            let text = format!(
                "{re:e}{}{im:e}i",
                if im.is_sign_negative() { "" } else { "+" }
            );
            let z = parse_complex(&text).unwrap();
            prop_assert_eq!(z.re.to_bits(), re.to_bits());
            prop_assert_eq!(z.im.to_bits(), im.to_bits());
        }
    }
}

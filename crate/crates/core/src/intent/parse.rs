//! Recovering coordinates from free-form backend replies.

use std::sync::OnceLock;

use regex::Regex;

use crate::world::Vec3;

fn number_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?").unwrap())
}

/// All finite real numbers in `text`, left to right.
pub fn scan_numbers(text: &str) -> impl Iterator<Item = f64> + '_ {
    number_re()
        .find_iter(text)
        .filter_map(|m| m.as_str().parse::<f64>().ok())
        .filter(|v| v.is_finite())
}

/// First three numbers in the reply as `(x, y, z)`; `None` when the reply
/// carries fewer than three.
pub fn parse_target(text: &str) -> Option<Vec3> {
    let mut it = scan_numbers(text);
    let x = it.next()?;
    let y = it.next()?;
    let z = it.next()?;
    Some(Vec3::new(x, y, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_triple() {
        assert_eq!(parse_target("(120, 0, 250)"), Some(Vec3::new(120.0, 0.0, 250.0)));
    }

    #[test]
    fn verbose_reply_with_labels() {
        assert_eq!(
            parse_target("Sure! Target: x=120.5, y=0, z=250."),
            Some(Vec3::new(120.5, 0.0, 250.0))
        );
    }

    #[test]
    fn refusal_has_no_target() {
        assert_eq!(parse_target("I cannot determine a target."), None);
        assert_eq!(parse_target("Only two numbers: 1, 2"), None);
        assert_eq!(parse_target(""), None);
    }

    #[test]
    fn signs_decimals_and_exponents() {
        assert_eq!(parse_target("(-10.0, +0.5, .25)"), Some(Vec3::new(-10.0, 0.5, 0.25)));
        assert_eq!(parse_target("1e2 2E-1 3"), Some(Vec3::new(100.0, 0.2, 3.0)));
    }

    #[test]
    fn overflowing_numbers_are_skipped() {
        assert_eq!(parse_target("1e999, 1, 2, 3"), Some(Vec3::new(1.0, 2.0, 3.0)));
    }

    #[test]
    fn extra_numbers_are_ignored() {
        assert_eq!(parse_target("(1, 2, 3) or maybe (4, 5, 6)"), Some(Vec3::new(1.0, 2.0, 3.0)));
    }
}

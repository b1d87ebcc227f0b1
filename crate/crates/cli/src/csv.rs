//! `maturity,value,label` output, label-major and maturity-minor. Numbers use
//! the shortest representation that round-trips.

use std::fmt::Write as _;

use hka_credit::curves::Curve;

pub const HEADER: &str = "maturity,value,label";

pub fn render(curves: &[Curve]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for curve in curves {
        let label = quote(&curve.label);
        for &(m, v) in curve.points() {
            let _ = writeln!(out, "{m},{v},{label}");
        }
    }
    out
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hka_credit::curves::CurveKind;

    #[test]
    fn rows_follow_curve_order() {
        let a = Curve::new("b", CurveKind::Yield, vec![(1.0, 0.1), (2.0, 0.2)]).unwrap();
        let b = Curve::new("a,1", CurveKind::Yield, vec![(1.0, 1.0 / 3.0)]).unwrap();
        assert_eq!(
            render(&[a, b]),
            "maturity,value,label\n1,0.1,b\n2,0.2,b\n1,0.3333333333333333,\"a,1\"\n"
        );
    }

    #[test]
    fn shortest_round_trip() {
        for v in [0.1f64 + 0.2, 1e-300, 123456.789, -0.0] {
            assert_eq!(v.to_string().parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }
}

//! Deterministic output: fixed 9-significant-digit float formatting, the
//! sweep CSV schema, and the JSON mirror.

use std::io::Write;

use entfi::SweepRow;

pub const SWEEP_HEADER: &str = "lambda,T,lambdaT,J0,EN,EN_pred,f,rel_err,P_det,error";

/// Nine significant digits, exponent form; NaN spelled out.
pub fn fmt_sig9(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.8e}")
    }
}

pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> std::io::Result<()> {
    w.write_all(SWEEP_HEADER.as_bytes())?;
    w.write_all(b"\n")?;
    for row in rows {
        let error = row.error.as_deref().unwrap_or("");
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_sig9(row.lambda),
            fmt_sig9(row.transmittance),
            fmt_sig9(row.lambda_t),
            fmt_sig9(row.j0),
            fmt_sig9(row.en),
            fmt_sig9(row.en_pred),
            fmt_sig9(row.f),
            fmt_sig9(row.rel_err),
            fmt_sig9(row.p_det),
            error
        )?;
    }
    Ok(())
}

pub fn write_sweep_json<W: Write>(mut w: W, rows: &[SweepRow]) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut w, rows)?;
    w.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_formatting() {
        assert_eq!(fmt_sig9(1.2223924213), "1.22239242e0");
        assert_eq!(fmt_sig9(2.30233e-3), "2.30233000e-3");
        assert_eq!(fmt_sig9(f64::NAN), "NaN");
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{SWEEP_HEADER}\n"));
    }
}

use std::io::{Read, Write};
use std::str::FromStr;

use super::{BenchMethod, BenchRow, LevelRow, Method, SweepRow};
use crate::error::{Error, Result};

pub const SWEEP_HEADER: [&str; 12] = [
    "lambda",
    "system",
    "partition",
    "method",
    "order_or_k",
    "energy",
    "reference",
    "abs_error",
    "rel_error",
    "iterations",
    "wall_time_ns",
    "error",
];

pub const LEVELS_HEADER: [&str; 3] = ["lambda", "n", "energy_exact"];

pub const BENCH_HEADER: [&str; 6] = [
    "method",
    "order_or_k",
    "n_basis",
    "repetitions",
    "wall_time_ns",
    "incremental_time_ns",
];

const BENCH_NOTE: &str = "# single-threaded sequential timing; medians after one warmup pass";

/// 17 significant digits in scientific notation, enough to round-trip.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn opt_display<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn parse<T: FromStr>(field: &str, name: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::Io(format!("cannot parse {name} from '{field}'")))
}

fn parse_opt<T: FromStr>(field: &str, name: &str) -> Result<Option<T>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse(field, name).map(Some)
    }
}

fn check_header(reader: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Io(format!(
            "unexpected header '{}'",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            format_float(r.lambda),
            r.system.as_str().to_string(),
            r.partition.as_str().to_string(),
            r.method.as_str().to_string(),
            r.order_or_k.to_string(),
            opt_float(r.energy),
            opt_float(r.reference),
            opt_float(r.abs_error),
            opt_float(r.rel_error),
            opt_display(r.iterations),
            opt_display(r.wall_time_ns),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &SWEEP_HEADER)?;
    reader
        .records()
        .map(|rec| {
            let rec = rec?;
            let f = |i: usize| rec.get(i).unwrap_or("");
            Ok(SweepRow {
                lambda: parse(f(0), "lambda")?,
                system: f(1).parse()?,
                partition: f(2).parse()?,
                method: f(3).parse::<Method>()?,
                order_or_k: parse(f(4), "order_or_k")?,
                energy: parse_opt(f(5), "energy")?,
                reference: parse_opt(f(6), "reference")?,
                abs_error: parse_opt(f(7), "abs_error")?,
                rel_error: parse_opt(f(8), "rel_error")?,
                iterations: parse_opt(f(9), "iterations")?,
                wall_time_ns: parse_opt(f(10), "wall_time_ns")?,
                error: Some(f(11).to_string()).filter(|s| !s.is_empty()),
            })
        })
        .collect()
}

pub fn write_levels_csv<W: Write>(out: W, rows: &[LevelRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LEVELS_HEADER)?;
    for r in rows {
        w.write_record([
            format_float(r.lambda),
            r.n.to_string(),
            format_float(r.energy),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_levels_csv<R: Read>(input: R) -> Result<Vec<LevelRow>> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &LEVELS_HEADER)?;
    reader
        .records()
        .map(|rec| {
            let rec = rec?;
            let f = |i: usize| rec.get(i).unwrap_or("");
            Ok(LevelRow {
                lambda: parse(f(0), "lambda")?,
                n: parse(f(1), "n")?,
                energy: parse(f(2), "energy_exact")?,
            })
        })
        .collect()
}

/// Writes a `#` comment line stating the timing conditions, then the table.
pub fn write_bench_csv<W: Write>(mut out: W, rows: &[BenchRow]) -> Result<()> {
    writeln!(out, "{BENCH_NOTE}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BENCH_HEADER)?;
    for r in rows {
        w.write_record([
            r.method.as_str().to_string(),
            r.order_or_k.to_string(),
            r.n_basis.to_string(),
            r.repetitions.to_string(),
            r.wall_time_ns.to_string(),
            r.incremental_time_ns.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_bench_csv<R: Read>(input: R) -> Result<Vec<BenchRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    check_header(&mut reader, &BENCH_HEADER)?;
    reader
        .records()
        .map(|rec| {
            let rec = rec?;
            let f = |i: usize| rec.get(i).unwrap_or("");
            Ok(BenchRow {
                method: f(0).parse::<BenchMethod>()?,
                order_or_k: parse(f(1), "order_or_k")?,
                n_basis: parse(f(2), "n_basis")?,
                repetitions: parse(f(3), "repetitions")?,
                wall_time_ns: parse(f(4), "wall_time_ns")?,
                incremental_time_ns: parse(f(5), "incremental_time_ns")?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemKind;
    use crate::partition::Scheme;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 123456.789, 0.0] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn header_is_exact() {
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "lambda,system,partition,method,order_or_k,energy,reference,abs_error,rel_error,iterations,wall_time_ns,error\n"
        );
    }

    #[test]
    fn sweep_rows_round_trip_with_empty_fields() {
        let rows = vec![
            SweepRow {
                lambda: 0.1,
                system: SystemKind::CosineBox,
                partition: Scheme::EpsteinNesbet,
                method: Method::BwptSc,
                order_or_k: 3,
                energy: Some(4.9),
                reference: Some(4.8),
                abs_error: Some(0.1),
                rel_error: None,
                iterations: Some(12),
                wall_time_ns: Some(999),
                error: None,
            },
            SweepRow {
                lambda: -2.5,
                system: SystemKind::Oscillator,
                partition: Scheme::Standard,
                method: Method::Rspt,
                order_or_k: 7,
                energy: None,
                reference: None,
                abs_error: None,
                rel_error: None,
                iterations: None,
                wall_time_ns: None,
                error: Some("order 7, \"quoted\"".into()),
            },
        ];
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        assert_eq!(read_sweep_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn bench_rows_round_trip_past_the_comment() {
        let rows = vec![BenchRow {
            method: BenchMethod::BwptNaive,
            order_or_k: 3,
            n_basis: 200,
            repetitions: 5,
            wall_time_ns: 10,
            incremental_time_ns: -4,
        }];
        let mut buf = Vec::new();
        write_bench_csv(&mut buf, &rows).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("# single-threaded"));
        assert_eq!(read_bench_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(read_sweep_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_levels_csv("lambda,n,energy\n".as_bytes()).is_err());
    }
}

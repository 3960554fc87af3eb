//! CSV input and output for coefficient data.
//!
//! Dumps come in two flavours: `n,coeff_real,coeff_imag` (complex embedding)
//! and the exact `n,cyclo_order,c0,c1,...` with rational power-basis
//! coefficients. Inputs are `n,value` or `n,value_re,value_im`.

use crate::chars::DirichletCharacter;
use crate::cyclo::CycloNumber;
use crate::error::{Error, Result};
use crate::qseries::QExpansion;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::io::{Read, Write};
use std::str::FromStr;

/// Parses an exact rational written as an integer, `p/q`, or a decimal
/// with optional exponent (`-1.25e-3`).
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if t.contains('/') {
        let r = BigRational::from_str(t).ok()?;
        return Some(r);
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let num = BigInt::from_str(&format!("{}{}", int_part, frac_part).trim_start_matches('0').to_string())
        .unwrap_or_else(|_| BigInt::zero());
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(num);
    if scale >= 0 {
        r *= BigRational::from_integer(ten.pow(scale as u32));
    } else {
        r /= BigRational::from_integer(ten.pow((-scale) as u32));
    }
    Some(if neg { -r } else { r })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Rows of a headed CSV file whose first column is n = 1, 2, 3, ...
fn indexed_rows<R: Read>(reader: R, start: u64) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    rdr.headers()?;
    let mut rows = Vec::new();
    let mut expected = start;
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let n: u64 = rec
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(line, "first column must be the index n"))?;
        if n != expected {
            return Err(parse_err(line, format!("expected n = {}, found {}", expected, n)));
        }
        expected += 1;
        rows.push((line, rec.iter().skip(1).map(str::to_string).collect()));
    }
    Ok(rows)
}

/// Reads exact values from `n,value` or `n,value_re,value_im` (n from 1).
pub fn read_exact_values<R: Read>(reader: R) -> Result<Vec<CycloNumber>> {
    indexed_rows(reader, 1)?
        .into_iter()
        .map(|(line, cols)| {
            let field = |i: usize| {
                parse_rational(&cols[i])
                    .ok_or_else(|| parse_err(line, format!("not a rational number: {:?}", cols[i])))
            };
            match cols.len() {
                1 => Ok(CycloNumber::from_rational(field(0)?)),
                2 => {
                    let re = CycloNumber::from_rational(field(0)?);
                    let im = CycloNumber::from_rational(field(1)?);
                    Ok(re + im * CycloNumber::root_of_unity(4, 1))
                }
                k => Err(parse_err(line, format!("expected 2 or 3 columns, found {}", k + 1))),
            }
        })
        .collect()
}

/// Reads floating-point values from `n,value` or `n,value_re,value_im` (n from 1).
pub fn read_complex_values<R: Read>(reader: R) -> Result<Vec<Complex64>> {
    indexed_rows(reader, 1)?
        .into_iter()
        .map(|(line, cols)| {
            let field = |i: usize| {
                cols[i]
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .or_else(|| parse_rational(&cols[i]).and_then(|r| num_traits::ToPrimitive::to_f64(&r)))
                    .ok_or_else(|| parse_err(line, format!("not a number: {:?}", cols[i])))
            };
            match cols.len() {
                1 => Ok(Complex64::new(field(0)?, 0.0)),
                2 => Ok(Complex64::new(field(0)?, field(1)?)),
                k => Err(parse_err(line, format!("expected 2 or 3 columns, found {}", k + 1))),
            }
        })
        .collect()
}

/// Writes `n,coeff_real,coeff_imag` rows for n = start, start + 1, ...
pub fn write_complex<W: Write>(writer: W, coeffs: &[CycloNumber], start: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["n", "coeff_real", "coeff_imag"])?;
    for (i, c) in coeffs.iter().enumerate() {
        let z = c.to_complex();
        w.write_record([(start + i).to_string(), z.re.to_string(), z.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes exact `n,cyclo_order,c0,c1,...` rows.
pub fn write_exact<W: Write>(writer: W, coeffs: &[CycloNumber], start: usize) -> Result<()> {
    write_exact_with_metadata(writer, coeffs, start, &[])
}

fn write_exact_with_metadata<W: Write>(
    mut writer: W,
    coeffs: &[CycloNumber],
    start: usize,
    metadata: &[(&str, String)],
) -> Result<()> {
    for (k, v) in metadata {
        writeln!(writer, "# {}={}", k, v)?;
    }
    let width = coeffs.iter().map(|c| c.coeffs().len()).max().unwrap_or(1);
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(writer);
    let mut header = vec!["n".to_string(), "cyclo_order".to_string()];
    header.extend((0..width).map(|j| format!("c{}", j)));
    w.write_record(&header)?;
    for (i, c) in coeffs.iter().enumerate() {
        let mut row = vec![(start + i).to_string(), c.order().to_string()];
        row.extend(c.coeffs().iter().map(|q| q.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_exact`]; returns the first index and values.
pub fn read_exact<R: Read>(reader: R) -> Result<(usize, Vec<CycloNumber>)> {
    let mut text = String::new();
    let mut reader = reader;
    reader.read_to_string(&mut text)?;
    let start = text
        .lines()
        .find(|l| !l.trim_start().starts_with('#'))
        .and_then(|_| {
            text.lines()
                .filter(|l| !l.trim_start().starts_with('#'))
                .nth(1)
                .and_then(|l| l.split(',').next())
                .and_then(|s| s.trim().parse::<u64>().ok())
        })
        .unwrap_or(1);
    let rows = indexed_rows(text.as_bytes(), start)?;
    let values = rows
        .into_iter()
        .map(|(line, cols)| {
            let order: u64 = cols
                .first()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(line, "missing cyclotomic order"))?;
            let qs = cols[1..]
                .iter()
                .filter(|s| !s.is_empty())
                .map(|s| parse_rational(s).ok_or_else(|| parse_err(line, format!("not a rational number: {:?}", s))))
                .collect::<Result<Vec<_>>>()?;
            CycloNumber::from_coeffs(order, qs)
                .ok_or_else(|| parse_err(line, format!("wrong number of coefficients for order {}", order)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((start as usize, values))
}

/// Parses the `M;[e1,e2,...];conductor;parity` character format.
pub fn parse_character(text: &str) -> Result<DirichletCharacter> {
    let bad = || Error::Domain(format!("malformed character {:?}", text));
    let mut parts = text.trim().split(';');
    let modulus: u64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    let exps = parts.next().ok_or_else(bad)?;
    let inner = exps.strip_prefix('[').and_then(|s| s.strip_suffix(']')).ok_or_else(bad)?;
    let exponents = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?
    };
    let chi = DirichletCharacter::from_exponents(modulus, exponents)?;
    if chi.dump_line() != text.trim() {
        return Err(bad());
    }
    Ok(chi)
}

/// Exact dump of a q-expansion: metadata comment lines, then a(0), a(1), ...
pub fn write_qexpansion<W: Write>(writer: W, f: &QExpansion) -> Result<()> {
    let metadata = [
        ("weight_twice", f.weight_twice().to_string()),
        ("level", f.level().to_string()),
        ("character", f.character().dump_line()),
        ("cuspidal", f.is_cuspidal().to_string()),
        ("shimura_cuspidal", f.is_shimura_cuspidal().to_string()),
    ];
    write_exact_with_metadata(writer, f.coeffs(), 0, &metadata)
}

pub fn read_qexpansion<R: Read>(mut reader: R) -> Result<QExpansion> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let mut meta = std::collections::HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.trim_start().strip_prefix('#') {
            let (k, v) = rest
                .trim()
                .split_once('=')
                .ok_or_else(|| parse_err(i + 1, "metadata lines are # key=value"))?;
            meta.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    let get = |k: &str| meta.get(k).ok_or_else(|| parse_err(1, format!("missing metadata {}", k)));
    let weight_twice: u32 = get("weight_twice")?.parse().map_err(|_| parse_err(1, "bad weight"))?;
    let level: u64 = get("level")?.parse().map_err(|_| parse_err(1, "bad level"))?;
    let character = parse_character(get("character")?)?;
    let cuspidal: bool = get("cuspidal")?.parse().map_err(|_| parse_err(1, "bad cuspidal flag"))?;
    let star: bool = get("shimura_cuspidal")?
        .parse()
        .map_err(|_| parse_err(1, "bad shimura_cuspidal flag"))?;
    let (start, coeffs) = read_exact(text.as_bytes())?;
    if start != 0 {
        return Err(parse_err(1, "q-expansion dumps start at n = 0"));
    }
    let f = QExpansion::new(coeffs, weight_twice, level, character).with_shimura_cuspidal(star);
    if cuspidal {
        f.into_cuspidal()
    } else {
        Ok(f)
    }
}

/// Exact value written as a plain rational when possible, else as a complex pair.
pub fn value_string(c: &CycloNumber) -> String {
    match c.as_rational() {
        Some(q) if q.denom().is_one() => q.numer().to_string(),
        Some(q) => q.to_string(),
        None => {
            let z = c.to_complex();
            format!("{}{:+}i", z.re, z.im)
        }
    }
}

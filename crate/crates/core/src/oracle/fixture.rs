//! Versioned CSV fixtures holding an oracle frontier.
//!
//! Layout:
//!
//! ```text
//! format=oracle-frontier,version=1,instance=bsc,chain=Y-X-Z,p1=0.5,p_y=0.2,p_z=0.1,d=0.05,levels=9,u_card=2,w_card=3
//! r1,r,dx
//! 0,0.297..,0.05
//! ```
//!
//! The first row names the instance; the binary source is rebuilt with
//! [`SourceModel::binary_yxz`] from `p1`, `p_y`, `p_z`. Numbers are written
//! with 9 significant digits.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::region::{ChainDirection, SourceModel};

use super::frontier::{OraclePoint, QuantizedKernelSpace};

pub const FIXTURE_FORMAT: &str = "oracle-frontier";
pub const FIXTURE_VERSION: u32 = 1;

/// Plain decimal with 9 significant digits.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x == 0.0 { "0".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit; redo with one fewer
    // decimal in that case.
    let digits = s.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
    let significant = digits.trim_start_matches('0').len();
    if significant > 9 && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

/// Instance parameters of a fixture.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureParams {
    pub instance: String,
    pub chain: ChainDirection,
    pub p1: f64,
    pub p_y: f64,
    pub p_z: f64,
    pub d: f64,
    pub levels: usize,
    pub u_card: usize,
    pub w_card: usize,
}

impl FixtureParams {
    /// The binary source with Hamming distortion described by the header.
    pub fn model(&self) -> Result<SourceModel> {
        match self.chain {
            ChainDirection::Yxz => SourceModel::binary_yxz(self.p1, self.p_y, self.p_z),
            ChainDirection::Yzx => Err(Error::Fixture("only Y-X-Z fixtures are defined".into())),
        }
    }

    pub fn space(&self) -> QuantizedKernelSpace {
        QuantizedKernelSpace::new(self.levels, self.u_card, self.w_card)
    }
}

/// Header plus the Pareto points.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleFixture {
    pub params: FixtureParams,
    pub points: Vec<OraclePoint>,
}

fn csv_err(e: csv::Error) -> Error {
    Error::Fixture(e.to_string())
}

pub fn write_fixture<W: Write>(out: W, f: &OracleFixture) -> Result<()> {
    let p = &f.params;
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    let header = [
        format!("format={FIXTURE_FORMAT}"),
        format!("version={FIXTURE_VERSION}"),
        format!("instance={}", p.instance),
        format!("chain={}", p.chain.label()),
        format!("p1={}", p.p1),
        format!("p_y={}", p.p_y),
        format!("p_z={}", p.p_z),
        format!("d={}", p.d),
        format!("levels={}", p.levels),
        format!("u_card={}", p.u_card),
        format!("w_card={}", p.w_card),
    ];
    w.write_record(&header).map_err(csv_err)?;
    w.write_record(["r1", "r", "dx"]).map_err(csv_err)?;
    for pt in &f.points {
        w.write_record([format_sig9(pt.r1), format_sig9(pt.r), format_sig9(pt.dx)])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Fixture(e.to_string()))
}

pub fn read_fixture<R: Read>(input: R) -> Result<OracleFixture> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = r.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Fixture("empty fixture".into()))?
        .map_err(csv_err)?;
    let mut kv = std::collections::BTreeMap::new();
    for field in header.iter() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| Error::Fixture(format!("header field `{field}` is not key=value")))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| kv.get(k).ok_or_else(|| Error::Fixture(format!("header lacks `{k}`")));
    let num = |k: &str| -> Result<f64> {
        get(k)?
            .parse()
            .map_err(|_| Error::Fixture(format!("`{k}` is not a number")))
    };
    let int = |k: &str| -> Result<usize> {
        get(k)?
            .parse()
            .map_err(|_| Error::Fixture(format!("`{k}` is not an integer")))
    };
    if get("format")? != FIXTURE_FORMAT {
        return Err(Error::Fixture(format!("unknown format `{}`", get("format")?)));
    }
    if int("version")? != FIXTURE_VERSION as usize {
        return Err(Error::Fixture(format!("unsupported version {}", get("version")?)));
    }
    let params = FixtureParams {
        instance: get("instance")?.clone(),
        chain: ChainDirection::parse(get("chain")?).map_err(|e| Error::Fixture(e.to_string()))?,
        p1: num("p1")?,
        p_y: num("p_y")?,
        p_z: num("p_z")?,
        d: num("d")?,
        levels: int("levels")?,
        u_card: int("u_card")?,
        w_card: int("w_card")?,
    };
    let columns = records
        .next()
        .ok_or_else(|| Error::Fixture("missing column header".into()))?
        .map_err(csv_err)?;
    if columns.iter().collect::<Vec<_>>() != ["r1", "r", "dx"] {
        return Err(Error::Fixture("column header must be r1,r,dx".into()));
    }
    let mut points = Vec::new();
    for (line, rec) in records.enumerate() {
        let rec = rec.map_err(csv_err)?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Fixture(format!("row {} is not numeric", line + 3)))?;
        if vals.len() != 3 {
            return Err(Error::Fixture(format!("row {} needs 3 values", line + 3)));
        }
        points.push(OraclePoint {
            r1: vals[0],
            r: vals[1],
            dx: vals[2],
        });
    }
    Ok(OracleFixture { params, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(1.0), "1.00000000");
        assert_eq!(format_sig9(0.229187654321), "0.229187654");
        assert_eq!(format_sig9(123.456789012), "123.456789");
        assert_eq!(format_sig9(-0.5), "-0.500000000");
        assert_eq!(format_sig9(9.9999999999), "10.0000000");
        assert_eq!(format_sig9(1.5e-12), "0.00000000000150000000");
    }

    #[test]
    fn round_trip() {
        let f = OracleFixture {
            params: FixtureParams {
                instance: "bsc".into(),
                chain: ChainDirection::Yxz,
                p1: 0.5,
                p_y: 0.2,
                p_z: 0.1,
                d: 0.05,
                levels: 5,
                u_card: 2,
                w_card: 2,
            },
            points: vec![OraclePoint { r1: 0.0, r: 0.3, dx: 0.05 }],
        };
        let mut buf = Vec::new();
        write_fixture(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("format=oracle-frontier,version=1,instance=bsc,"));
        assert_eq!(read_fixture(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn rejects_other_versions() {
        let text = "format=oracle-frontier,version=2\nr1,r,dx\n";
        assert!(matches!(read_fixture(text.as_bytes()), Err(Error::Fixture(_))));
    }
}

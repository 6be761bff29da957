//! Network checkpoints.
//!
//! Binary layout, all little-endian:
//!
//! | offset | type | content |
//! |---|---|---|
//! | 0 | `[u8; 8]` | magic `GNNCKPT1` |
//! | 8 | `u64` | dimension `d` |
//! | 16 | `u64` | width `n` |
//! | 24 | `f64` | scale `beta` |
//! | 32 | `u64` | base activation: 0 tanh, 1 relu |
//! | 40 | `f64 x d*n` | `W`, row-major (`W[k*n + j]`) |
//! | ... | `f64 x n` | `b` |
//! | ... | `f64 x n` | `c` |
//!
//! The CSV form has a `field,index,value` header and one row per scalar in
//! the same order (`d`, `n`, `beta`, `base`, then `W`, `b`, `c`). Floats are
//! written in shortest round-trip form, so both encodings reproduce every
//! parameter bit for bit.

use std::io::{Read, Write};

use galerkin_nn::{Activation, ActivationSpec, ShallowNetwork};

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed checkpoint: {0}")]
    Format(String),
    #[error(transparent)]
    Network(#[from] galerkin_nn::Error),
}

const MAGIC: &[u8; 8] = b"GNNCKPT1";

fn base_code(a: Activation) -> u64 {
    match a {
        Activation::Tanh => 0,
        Activation::Relu => 1,
    }
}

fn base_from(code: u64) -> Result<Activation, CheckpointError> {
    match code {
        0 => Ok(Activation::Tanh),
        1 => Ok(Activation::Relu),
        _ => Err(CheckpointError::Format(format!("unknown activation code {code}"))),
    }
}

pub fn write_binary(net: &ShallowNetwork, mut w: impl Write) -> Result<(), CheckpointError> {
    let act = net.activation();
    let mut buf = Vec::with_capacity(40 + 8 * (net.weights().len() + 2 * net.width()));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(net.dim() as u64).to_le_bytes());
    buf.extend_from_slice(&(net.width() as u64).to_le_bytes());
    buf.extend_from_slice(&act.scale.to_le_bytes());
    buf.extend_from_slice(&base_code(act.base).to_le_bytes());
    for x in net.weights().iter().chain(net.biases()).chain(net.coeffs()) {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_binary(mut r: impl Read) -> Result<ShallowNetwork, CheckpointError> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    if buf.len() < 40 || &buf[..8] != MAGIC {
        return Err(CheckpointError::Format("missing GNNCKPT1 header".into()));
    }
    let word = |i: usize| -> [u8; 8] { buf[i..i + 8].try_into().expect("8-byte slice") };
    let d = u64::from_le_bytes(word(8)) as usize;
    let n = u64::from_le_bytes(word(16)) as usize;
    let beta = f64::from_le_bytes(word(24));
    let base = base_from(u64::from_le_bytes(word(32)))?;
    let count = d
        .checked_add(2)
        .and_then(|k| k.checked_mul(n))
        .ok_or_else(|| CheckpointError::Format("size overflow".into()))?;
    if buf.len() != 40 + 8 * count {
        return Err(CheckpointError::Format(format!(
            "expected {} bytes for d={d}, n={n}, found {}",
            40 + 8 * count,
            buf.len()
        )));
    }
    let vals: Vec<f64> = (0..count).map(|i| f64::from_le_bytes(word(40 + 8 * i))).collect();
    let (w, rest) = vals.split_at(d * n);
    let (b, c) = rest.split_at(n);
    Ok(ShallowNetwork::new(
        d,
        w.to_vec(),
        b.to_vec(),
        c.to_vec(),
        ActivationSpec::new(base, beta)?,
    )?)
}

#[derive(serde::Serialize, serde::Deserialize)]
struct Row {
    field: String,
    index: usize,
    value: String,
}

fn float_text(x: f64) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.serialize(x).expect("in-memory write");
    let bytes = w.into_inner().expect("in-memory flush");
    String::from_utf8(bytes).expect("ascii").trim_end().to_string()
}

pub fn write_csv(net: &ShallowNetwork, w: impl Write) -> Result<(), CheckpointError> {
    let mut out = csv::Writer::from_writer(w);
    let act = net.activation();
    let mut row = |field: &str, index: usize, value: String| {
        out.serialize(Row {
            field: field.into(),
            index,
            value,
        })
    };
    row("d", 0, net.dim().to_string())?;
    row("n", 0, net.width().to_string())?;
    row("beta", 0, float_text(act.scale))?;
    row("base", 0, act.base.name().to_string())?;
    for (field, vals) in [("W", net.weights()), ("b", net.biases()), ("c", net.coeffs())] {
        for (i, x) in vals.iter().enumerate() {
            row(field, i, float_text(*x))?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv(r: impl Read) -> Result<ShallowNetwork, CheckpointError> {
    let mut rd = csv::Reader::from_reader(r);
    let mut d = None;
    let mut n = None;
    let mut beta = None;
    let mut base = None;
    let (mut w, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
    for row in rd.deserialize() {
        let row: Row = row?;
        let float = || {
            row.value
                .parse::<f64>()
                .map_err(|_| CheckpointError::Format(format!("bad number `{}` in field {}", row.value, row.field)))
        };
        let int = || {
            row.value
                .parse::<usize>()
                .map_err(|_| CheckpointError::Format(format!("bad integer `{}` in field {}", row.value, row.field)))
        };
        let target = match row.field.as_str() {
            "d" => {
                d = Some(int()?);
                continue;
            }
            "n" => {
                n = Some(int()?);
                continue;
            }
            "beta" => {
                beta = Some(float()?);
                continue;
            }
            "base" => {
                base = Some(match row.value.as_str() {
                    "tanh" => Activation::Tanh,
                    "relu" => Activation::Relu,
                    other => return Err(CheckpointError::Format(format!("unknown activation `{other}`"))),
                });
                continue;
            }
            "W" => &mut w,
            "b" => &mut b,
            "c" => &mut c,
            other => return Err(CheckpointError::Format(format!("unknown field `{other}`"))),
        };
        if row.index != target.len() {
            return Err(CheckpointError::Format(format!("{} entries out of order", row.field)));
        }
        target.push(float()?);
    }
    let missing = |f: &str| CheckpointError::Format(format!("missing field `{f}`"));
    let d = d.ok_or_else(|| missing("d"))?;
    let n = n.ok_or_else(|| missing("n"))?;
    if w.len() != d * n || b.len() != n || c.len() != n {
        return Err(CheckpointError::Format(format!("parameter counts do not match d={d}, n={n}")));
    }
    let act = ActivationSpec::new(base.ok_or_else(|| missing("base"))?, beta.ok_or_else(|| missing("beta"))?)?;
    Ok(ShallowNetwork::new(d, w, b, c, act)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net() -> ShallowNetwork {
        ShallowNetwork::new(
            2,
            vec![0.1, -0.2, 1.0 / 3.0, 1e-300, f64::MIN_POSITIVE, -0.0],
            vec![0.5, -1.25, 7e22],
            vec![1.0, 2.0 / 7.0, -3.5],
            ActivationSpec::tanh(0.1 + 0.2),
        )
        .unwrap()
    }

    fn bits(n: &ShallowNetwork) -> Vec<u64> {
        let mut v: Vec<u64> = n.weights().iter().chain(n.biases()).chain(n.coeffs()).map(|x| x.to_bits()).collect();
        v.push(n.activation().scale.to_bits());
        v
    }

    #[test]
    fn binary_layout() {
        let mut buf = Vec::new();
        write_binary(&net(), &mut buf).unwrap();
        assert_eq!(buf.len(), 40 + 8 * 12);
        assert_eq!(&buf[..8], b"GNNCKPT1");
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(buf[16..24].try_into().unwrap()), 3);
        assert_eq!(f64::from_le_bytes(buf[40..48].try_into().unwrap()), 0.1);
        let back = read_binary(buf.as_slice()).unwrap();
        assert_eq!(bits(&back), bits(&net()));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut buf = Vec::new();
        write_csv(&net(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("field,index,value\nd,0,2\nn,0,3\n"));
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(bits(&back), bits(&net()));
        assert_eq!(back.activation().base, Activation::Tanh);
    }

    #[test]
    fn corrupt_input_rejected() {
        let mut buf = Vec::new();
        write_binary(&net(), &mut buf).unwrap();
        assert!(read_binary(&buf[..buf.len() - 1]).is_err());
        buf[0] = b'X';
        assert!(read_binary(buf.as_slice()).is_err());
        assert!(read_csv("field,index,value\nd,0,1\nn,0,1\n".as_bytes()).is_err());
    }
}

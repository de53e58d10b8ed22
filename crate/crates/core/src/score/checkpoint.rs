//! Versioned checkpoint container: magic, little-endian u32 JSON header
//! length, JSON header (dims, schedule), then raw little-endian f64
//! parameter blobs (score network, then discriminator when present).

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

use super::model::{DiscModel, ScoreModel};
use super::nn::Mlp;
use super::schedule::{make_schedule, NoiseSchedule};

const MAGIC: &[u8; 8] = b"BSCKPT01";

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    version: u32,
    m_antennas: usize,
    columns: usize,
    score_dims: Vec<usize>,
    disc_dims: Option<Vec<usize>>,
    sigma_min: f64,
    sigma_max: f64,
    t_scales: usize,
}

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub score: ScoreModel,
    pub disc: Option<DiscModel>,
    pub schedule: NoiseSchedule,
}

pub fn save_checkpoint(ckpt: &Checkpoint, path: &Path) -> Result<()> {
    let header = Header {
        version: 1,
        m_antennas: ckpt.score.m_antennas,
        columns: ckpt.score.columns,
        score_dims: ckpt.score.net.dims().to_vec(),
        disc_dims: ckpt.disc.as_ref().map(|d| d.net.dims().to_vec()),
        sigma_min: ckpt.schedule.sigma_min,
        sigma_max: ckpt.schedule.sigma_max,
        t_scales: ckpt.schedule.len(),
    };
    let header_json = serde_json::to_vec(&header)
        .map_err(|e| Error::Checkpoint(format!("header encode: {e}")))?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(MAGIC)?;
    f.write_all(&(header_json.len() as u32).to_le_bytes())?;
    f.write_all(&header_json)?;
    for &p in ckpt.score.net.params() {
        f.write_all(&p.to_le_bytes())?;
    }
    if let Some(disc) = &ckpt.disc {
        for &p in disc.net.params() {
            f.write_all(&p.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_params(buf: &[u8], count: usize, offset: &mut usize) -> Result<Vec<f64>> {
    let need = count * 8;
    if buf.len() < *offset + need {
        return Err(Error::Checkpoint(format!(
            "truncated parameter blob: need {} bytes at offset {}",
            need, *offset
        )));
    }
    let out = buf[*offset..*offset + need]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    *offset += need;
    Ok(out)
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    if buf.len() < 12 || &buf[..8] != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let hlen = u32::from_le_bytes(buf[8..12].try_into().unwrap()) as usize;
    if buf.len() < 12 + hlen {
        return Err(Error::Checkpoint("truncated header".into()));
    }
    let header: Header = serde_json::from_slice(&buf[12..12 + hlen])
        .map_err(|e| Error::Checkpoint(format!("header decode: {e}")))?;
    if header.version != 1 {
        return Err(Error::Checkpoint(format!(
            "unsupported version {}",
            header.version
        )));
    }
    let mut offset = 12 + hlen;

    let score_count: usize = header
        .score_dims
        .windows(2)
        .map(|w| w[0] * w[1] + w[1])
        .sum();
    let score_params = read_params(&buf, score_count, &mut offset)?;
    let score = ScoreModel {
        m_antennas: header.m_antennas,
        columns: header.columns,
        net: Mlp::from_params(header.score_dims.clone(), score_params)?,
    };

    let disc = match &header.disc_dims {
        Some(dims) => {
            let count: usize = dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
            let params = read_params(&buf, count, &mut offset)?;
            Some(DiscModel {
                m_antennas: header.m_antennas,
                columns: header.columns,
                net: Mlp::from_params(dims.clone(), params)?,
            })
        }
        None => None,
    };
    if offset != buf.len() {
        return Err(Error::Checkpoint(format!(
            "{} trailing bytes",
            buf.len() - offset
        )));
    }

    let schedule = make_schedule(header.sigma_min, header.sigma_max, header.t_scales)?;
    Ok(Checkpoint {
        score,
        disc,
        schedule,
    })
}

//! JSON-lines layout files: one `{"n","seed","tx","rx"[,"gains"]}` object per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ChannelMatrix, ChannelMode, NetworkLayout, Point, SystemParams};
use crate::error::{LinqError, Result};

#[derive(Serialize, Deserialize)]
struct Line {
    n: usize,
    seed: u64,
    tx: Vec<Point>,
    rx: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gains: Option<Vec<f64>>,
}

/// A layout plus, for realistic channels, the gains it was evaluated with.
#[derive(Clone, Debug, PartialEq)]
pub struct LayoutRecord {
    pub layout: NetworkLayout,
    /// Row-major linear gains; present only for realistic channels.
    pub gains: Option<Vec<f64>>,
}

impl LayoutRecord {
    pub fn path_loss(layout: NetworkLayout) -> Self {
        Self {
            layout,
            gains: None,
        }
    }

    /// The record's channel: stored gains if any, else recomputed path loss.
    pub fn channel(&self, params: &SystemParams) -> Result<ChannelMatrix> {
        match &self.gains {
            Some(g) => ChannelMatrix::from_gains(
                self.layout.n_links(),
                g.clone(),
                params.noise_power(),
                ChannelMode::Realistic,
                None,
            ),
            None => super::build_channel(&self.layout, params, ChannelMode::PathLossOnly, 0),
        }
    }
}

pub fn write_layouts(path: impl AsRef<Path>, records: &[LayoutRecord]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| LinqError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = Line {
            n: r.layout.n_links(),
            seed: r.layout.seed(),
            tx: r.layout.tx().to_vec(),
            rx: r.layout.rx().to_vec(),
            gains: r.gains.clone(),
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n").map_err(|e| LinqError::io(path, e))?;
    }
    w.flush().map_err(|e| LinqError::io(path, e))
}

pub fn read_layouts(path: impl AsRef<Path>, dense_cap: usize) -> Result<Vec<LayoutRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| LinqError::io(path, e))?;
    let mut out = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| LinqError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let l: Line = serde_json::from_str(&line)?;
        if l.tx.len() != l.n || l.rx.len() != l.n {
            return Err(LinqError::Shape(format!(
                "{}:{}: n = {} but {} tx / {} rx",
                path.display(),
                k + 1,
                l.n,
                l.tx.len(),
                l.rx.len()
            )));
        }
        if let Some(g) = &l.gains {
            if g.len() != l.n * l.n {
                return Err(LinqError::Shape(format!(
                    "{}:{}: expected {} gains, got {}",
                    path.display(),
                    k + 1,
                    l.n * l.n,
                    g.len()
                )));
            }
        }
        out.push(LayoutRecord {
            layout: NetworkLayout::new(l.tx, l.rx, l.seed, dense_cap)?,
            gains: l.gains,
        });
    }
    Ok(out)
}

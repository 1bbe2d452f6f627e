use crate::error::{Error, Result};

/// Per-feature statistics from [`whiten`].
#[derive(Debug, Clone, PartialEq)]
pub struct Whitening {
    pub mean: Vec<f64>,
    /// Population standard deviation; 0 marks a constant feature.
    pub std: Vec<f64>,
}

impl Whitening {
    pub fn apply(&self, data: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        data.iter()
            .map(|row| {
                if row.len() != self.mean.len() {
                    return Err(Error::Dimension { expected: self.mean.len(), actual: row.len() });
                }
                Ok(row
                    .iter()
                    .zip(self.mean.iter().zip(&self.std))
                    .map(|(x, (m, s))| if *s > 0.0 { (x - m) / s } else { 0.0 })
                    .collect())
            })
            .collect()
    }
}

/// Zero mean, unit variance per feature (column). Constant features are
/// centered to zero and left unscaled.
pub fn whiten(data: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, Whitening)> {
    if data.len() < 2 {
        return Err(Error::Data(format!("whitening needs at least 2 patterns, got {}", data.len())));
    }
    let width = data[0].len();
    if width == 0 || data.iter().any(|r| r.len() != width) {
        return Err(Error::Data("patterns must share a nonzero width".into()));
    }
    let n = data.len() as f64;
    let mut mean = vec![0.0; width];
    let mut std = vec![0.0; width];
    for k in 0..width {
        let constant = data.iter().all(|r| r[k] == data[0][k]);
        let mu = data.iter().map(|r| r[k]).sum::<f64>() / n;
        mean[k] = mu;
        if !constant {
            let var = data.iter().map(|r| (r[k] - mu) * (r[k] - mu)).sum::<f64>() / n;
            std[k] = var.sqrt();
        }
    }
    let stats = Whitening { mean, std };
    let out = stats.apply(data)?;
    Ok((out, stats))
}

/// Local contrastive normalization of one feature map with zero padding.
///
/// Each pixel has its `(2r+1)^2` neighborhood mean subtracted and is divided
/// by the neighborhood's population standard deviation only when that
/// deviation exceeds 1.
pub fn lcn(grid: &[Vec<f64>], radius: usize) -> Result<Vec<Vec<f64>>> {
    if grid.is_empty() || grid[0].is_empty() {
        return Err(Error::Data("feature map is empty".into()));
    }
    if radius == 0 {
        return Err(Error::Parameter("radius must be >= 1".into()));
    }
    let (rows, cols) = (grid.len(), grid[0].len());
    if grid.iter().any(|r| r.len() != cols) {
        return Err(Error::Data("feature map rows differ in length".into()));
    }
    let r = radius as isize;
    let count = ((2 * radius + 1) * (2 * radius + 1)) as f64;
    let at = |i: isize, j: isize| -> f64 {
        if i < 0 || j < 0 || i >= rows as isize || j >= cols as isize {
            0.0
        } else {
            grid[i as usize][j as usize]
        }
    };
    let mut out = vec![vec![0.0; cols]; rows];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let (ci, cj) = (i as isize, j as isize);
            let mut sum = 0.0;
            for di in -r..=r {
                for dj in -r..=r {
                    sum += at(ci + di, cj + dj);
                }
            }
            let mean = sum / count;
            let mut sq = 0.0;
            for di in -r..=r {
                for dj in -r..=r {
                    let d = at(ci + di, cj + dj) - mean;
                    sq += d * d;
                }
            }
            let std = (sq / count).sqrt();
            let centered = grid[i][j] - mean;
            *cell = if std > 1.0 { centered / std } else { centered };
        }
    }
    Ok(out)
}

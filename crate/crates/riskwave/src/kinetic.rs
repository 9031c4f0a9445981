//! Empirical aggregation of an e-particle ensemble into macro density,
//! impulse and velocity fields on the risk rectangle.
//!
//! Each particle carries one or more extensive variables; depositing
//! variable `j` builds that variable's density and impulse grids, and the
//! per-cell impulse/density quotient is the fluid velocity. Different
//! variables generally produce different velocity fields from the same
//! particles.

use std::io::Read;

use thiserror::Error;

/// One economic agent as a point on the risk rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct EParticle {
    /// Risk coordinates (x, y).
    pub position: [f64; 2],
    /// Rate of risk-rating change (vx, vy).
    pub velocity: [f64; 2],
    /// Extensive variables u_1..u_l carried by the agent, l >= 1.
    pub extensive: Vec<f64>,
}

impl EParticle {
    /// Financial impulses of every extensive variable: `u_j * (vx, vy)`.
    pub fn impulses(&self) -> Vec<[f64; 2]> {
        self.extensive
            .iter()
            .map(|u| [u * self.velocity[0], u * self.velocity[1]])
            .collect()
    }
}

/// Uniform cell layout over the rectangle; cell (i, j) spans
/// `[i dx, (i+1) dx] x [j dy, (j+1) dy]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x_extent: f64,
    pub y_extent: f64,
}

impl GridSpec {
    pub fn dx(&self) -> f64 {
        self.x_extent / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.y_extent / self.ny as f64
    }
}

/// Per-cell scalar values.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

/// Per-cell 2-vector values.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub spec: GridSpec,
    pub values: Vec<[f64; 2]>,
}

/// Per-cell velocities; cells whose density sits below the floor are empty.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub spec: GridSpec,
    pub values: Vec<Option<[f64; 2]>>,
}

impl ScalarField {
    pub fn zeros(spec: GridSpec) -> Self {
        ScalarField {
            spec,
            values: vec![0.0; spec.nx * spec.ny],
        }
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.nx + i]
    }
}

impl VectorField {
    pub fn zeros(spec: GridSpec) -> Self {
        VectorField {
            spec,
            values: vec![[0.0; 2]; spec.nx * spec.ny],
        }
    }

    pub fn total(&self) -> [f64; 2] {
        self.values
            .iter()
            .fold([0.0, 0.0], |acc, v| [acc[0] + v[0], acc[1] + v[1]])
    }

    pub fn at(&self, i: usize, j: usize) -> [f64; 2] {
        self.values[j * self.spec.nx + i]
    }
}

impl VelocityField {
    pub fn at(&self, i: usize, j: usize) -> Option<[f64; 2]> {
        self.values[j * self.spec.nx + i]
    }
}

/// How particle weights are spread over cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DepositMode {
    #[default]
    NearestCell,
    Bilinear,
}

#[derive(Debug, Error)]
pub enum KineticError {
    #[error("particle {index} at ({x}, {y}) outside [0, {x_extent}] x [0, {y_extent}]")]
    OutOfDomain {
        index: usize,
        x: f64,
        y: f64,
        x_extent: f64,
        y_extent: f64,
    },
    #[error("variable index {index} out of range for particle {particle} with {len} variables")]
    VariableIndex {
        index: usize,
        particle: usize,
        len: usize,
    },
    #[error("grids are incompatible: {0}")]
    IncompatibleGrids(String),
    #[error("invalid grid spec: {0}")]
    BadGrid(String),
    #[error("particle {index} has a non-finite value")]
    NonFinite { index: usize },
    #[error("particle {index} carries no extensive variables")]
    NoExtensive { index: usize },
    #[error("csv header must be x,y,vx,vy,u1[,u2,...], got {0:?}")]
    BadHeader(Vec<String>),
    #[error("csv record {record}: {detail}")]
    BadRecord { record: usize, detail: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn validate_ensemble(
    particles: &[EParticle],
    spec: &GridSpec,
    variable: usize,
) -> Result<(), KineticError> {
    if spec.nx == 0 || spec.ny == 0 || !(spec.x_extent > 0.0) || !(spec.y_extent > 0.0) {
        return Err(KineticError::BadGrid(format!("{spec:?}")));
    }
    for (index, particle) in particles.iter().enumerate() {
        if particle.extensive.is_empty() {
            return Err(KineticError::NoExtensive { index });
        }
        if variable >= particle.extensive.len() {
            return Err(KineticError::VariableIndex {
                index: variable,
                particle: index,
                len: particle.extensive.len(),
            });
        }
        let finite = particle.position.iter().all(|v| v.is_finite())
            && particle.velocity.iter().all(|v| v.is_finite())
            && particle.extensive.iter().all(|v| v.is_finite());
        if !finite {
            return Err(KineticError::NonFinite { index });
        }
        let [x, y] = particle.position;
        if !(0.0..=spec.x_extent).contains(&x) || !(0.0..=spec.y_extent).contains(&y) {
            return Err(KineticError::OutOfDomain {
                index,
                x,
                y,
                x_extent: spec.x_extent,
                y_extent: spec.y_extent,
            });
        }
    }
    Ok(())
}

/// Deposits extensive variable `variable` of every particle onto the grid,
/// returning the density and impulse fields.
///
/// Deposition conserves totals exactly up to rounding: the grid sum equals
/// the particle sum of `u_j` and `u_j v` regardless of the kernel.
pub fn deposit_fields(
    particles: &[EParticle],
    spec: GridSpec,
    variable: usize,
    mode: DepositMode,
) -> Result<(ScalarField, VectorField), KineticError> {
    validate_ensemble(particles, &spec, variable)?;
    let mut density = ScalarField::zeros(spec);
    let mut impulse = VectorField::zeros(spec);
    let (dx, dy) = (spec.dx(), spec.dy());
    let clamp = |idx: i64, n: usize| -> usize { idx.clamp(0, n as i64 - 1) as usize };

    for particle in particles {
        let u = particle.extensive[variable];
        let [vx, vy] = particle.velocity;
        let [x, y] = particle.position;
        match mode {
            DepositMode::NearestCell => {
                let i = clamp((x / dx).floor() as i64, spec.nx);
                let j = clamp((y / dy).floor() as i64, spec.ny);
                let cell = j * spec.nx + i;
                density.values[cell] += u;
                impulse.values[cell][0] += u * vx;
                impulse.values[cell][1] += u * vy;
            }
            DepositMode::Bilinear => {
                // Cloud-in-cell on the cell-center lattice, clamped at the
                // borders so no weight leaves the grid.
                let gx = x / dx - 0.5;
                let gy = y / dy - 0.5;
                let ix = gx.floor();
                let iy = gy.floor();
                let wx = gx - ix;
                let wy = gy - iy;
                let cols = [(ix as i64, 1.0 - wx), (ix as i64 + 1, wx)];
                let rows = [(iy as i64, 1.0 - wy), (iy as i64 + 1, wy)];
                for &(jj, wj) in &rows {
                    for &(ii, wi) in &cols {
                        let w = wi * wj;
                        if w == 0.0 {
                            continue;
                        }
                        let cell = clamp(jj, spec.ny) * spec.nx + clamp(ii, spec.nx);
                        density.values[cell] += u * w;
                        impulse.values[cell][0] += u * vx * w;
                        impulse.values[cell][1] += u * vy * w;
                    }
                }
            }
        }
    }
    Ok((density, impulse))
}

/// Default density floor: `1e-12` of the mean absolute cell density.
pub fn default_density_floor(density: &ScalarField) -> f64 {
    let n = density.values.len().max(1) as f64;
    let mean = density.values.iter().map(|v| v.abs()).sum::<f64>() / n;
    if mean > 0.0 {
        1e-12 * mean
    } else {
        f64::MIN_POSITIVE
    }
}

/// Per-cell fluid velocity `impulse / density`; cells with density below the
/// floor are marked empty rather than assigned a fabricated zero velocity.
pub fn field_velocity(
    density: &ScalarField,
    impulse: &VectorField,
    floor: f64,
) -> Result<VelocityField, KineticError> {
    if density.spec != impulse.spec {
        return Err(KineticError::IncompatibleGrids(format!(
            "density {:?} vs impulse {:?}",
            density.spec, impulse.spec
        )));
    }
    let values = density
        .values
        .iter()
        .zip(impulse.values.iter())
        .map(|(&rho, p)| {
            if rho.abs() >= floor {
                Some([p[0] / rho, p[1] / rho])
            } else {
                None
            }
        })
        .collect();
    Ok(VelocityField {
        spec: density.spec,
        values,
    })
}

/// Reads an ensemble from CSV with header `x,y,vx,vy,u1[,u2,...]`.
pub fn read_particles_csv<R: Read>(reader: R) -> Result<Vec<EParticle>, KineticError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.to_string())
        .collect();
    let fixed = ["x", "y", "vx", "vy"];
    let header_ok = headers.len() > fixed.len()
        && headers[..fixed.len()] == fixed
        && headers[fixed.len()..]
            .iter()
            .enumerate()
            .all(|(i, h)| *h == format!("u{}", i + 1));
    if !header_ok {
        return Err(KineticError::BadHeader(headers));
    }
    let n_vars = headers.len() - fixed.len();
    let mut out = Vec::new();
    for (record_idx, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != fixed.len() + n_vars {
            return Err(KineticError::BadRecord {
                record: record_idx + 1,
                detail: format!(
                    "expected {} fields, got {}",
                    fixed.len() + n_vars,
                    record.len()
                ),
            });
        }
        let parse = |field: &str| -> Result<f64, KineticError> {
            field.parse::<f64>().map_err(|e| KineticError::BadRecord {
                record: record_idx + 1,
                detail: format!("bad number {field:?}: {e}"),
            })
        };
        let x = parse(&record[0])?;
        let y = parse(&record[1])?;
        let vx = parse(&record[2])?;
        let vy = parse(&record[3])?;
        let extensive = record
            .iter()
            .skip(fixed.len())
            .map(parse)
            .collect::<Result<Vec<f64>, _>>()?;
        out.push(EParticle {
            position: [x, y],
            velocity: [vx, vy],
            extensive,
        });
    }
    Ok(out)
}

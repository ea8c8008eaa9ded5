//! Initial data named by the run configuration.

use std::fmt;
use std::fs;
use std::str::FromStr;

use super::settings::Settings;
use crate::error::{Error, Result};
use crate::solver::soliton;
use crate::spectral::{read_field, Field, FieldPair, SpectralGrid};
use crate::verify::random_band_limited;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equation {
    Mkdv,
    System,
}

impl FromStr for Equation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mkdv" => Ok(Equation::Mkdv),
            "system" => Ok(Equation::System),
            other => Err(Error::InvalidArgument(format!("unknown equation {other:?} (mkdv|system)"))),
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Equation::Mkdv => "mkdv",
            Equation::System => "system",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialKind {
    Soliton,
    Multiscale,
    Random,
    File,
}

impl FromStr for InitialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "soliton" => Ok(InitialKind::Soliton),
            "multiscale" => Ok(InitialKind::Multiscale),
            "random" => Ok(InitialKind::Random),
            "file" => Ok(InitialKind::File),
            other => Err(Error::InvalidArgument(format!(
                "unknown initial data {other:?} (soliton|multiscale|random|file)"
            ))),
        }
    }
}

impl fmt::Display for InitialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitialKind::Soliton => "soliton",
            InitialKind::Multiscale => "multiscale",
            InitialKind::Random => "random",
            InitialKind::File => "file",
        })
    }
}

/// Highest dyadic level of the multi-scale data.
pub const MULTISCALE_LEVELS: u32 = 4;

/// `sum_{j <= 4} a 2^(-j/4) cos(2^j xi_1 x + j + shift)` with `xi_1` the
/// lowest frequency of the grid.
pub fn multiscale(grid: &SpectralGrid, amplitude: f64, shift: f64) -> Result<Field> {
    if (1i64 << MULTISCALE_LEVELS) > grid.dealias_cutoff() {
        return Err(Error::Precondition(format!(
            "multi-scale data needs mode {} below the dealiasing cutoff {}",
            1 << MULTISCALE_LEVELS,
            grid.dealias_cutoff()
        )));
    }
    let xi1 = grid.spacing();
    Ok(Field::from_fn(grid, |x| {
        (0..=MULTISCALE_LEVELS)
            .map(|j| {
                let level = f64::from(j);
                amplitude * 2f64.powf(-level / 4.0) * (2f64.powi(j as i32) * xi1 * x + level + shift).cos()
            })
            .sum()
    })
    .dealias())
}

/// Initial state of either equation.
#[derive(Clone, Debug)]
pub enum State {
    Single(Field),
    Pair(FieldPair),
}

impl State {
    pub fn fields(&self) -> Vec<&Field> {
        match self {
            State::Single(u) => vec![u],
            State::Pair(p) => vec![&p.u, &p.v],
        }
    }
}

/// Per-command defaults for the data keys.
#[derive(Clone, Copy, Debug)]
pub struct DataDefaults {
    pub length: f64,
    pub points: usize,
    pub initial: InitialKind,
    pub amplitude: f64,
    pub band: i64,
}

pub fn resolve_grid(settings: &Settings, length: f64, points: usize) -> Result<SpectralGrid> {
    SpectralGrid::new(settings.value("grid.L", length)?, settings.value("grid.K", points)?)
}

fn read_input(path: &str) -> Result<Field> {
    read_field(&fs::read_to_string(path)?)
}

/// Builds the configured data. Random data draws from `seed` (and `seed + 1`
/// for the second component); soliton pairs use two separated waves of
/// speeds `c` and `2c`.
pub fn initial_state(settings: &Settings, equation: Equation, d: DataDefaults, seed: u64) -> Result<State> {
    let kind = settings.value("data.initial", d.initial)?;
    if kind == InitialKind::File {
        let input: String = settings.value("data.input", String::new())?;
        let paths: Vec<&str> = input.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
        return match (equation, paths.as_slice()) {
            (Equation::Mkdv, [u]) => Ok(State::Single(read_input(u)?)),
            (Equation::System, [u, v]) => Ok(State::Pair(FieldPair::new(read_input(u)?, read_input(v)?)?)),
            _ => Err(Error::InvalidArgument(format!(
                "--initial file needs {} path(s) in --input",
                if equation == Equation::Mkdv { 1 } else { 2 }
            ))),
        };
    }
    let grid = resolve_grid(settings, d.length, d.points)?;
    let amplitude = settings.value("data.amplitude", d.amplitude)?;
    let build = |component: u64| -> Result<Field> {
        match kind {
            InitialKind::Soliton => {
                let speed = settings.value("data.speed", 1.0)?;
                let l = grid.length();
                if equation == Equation::Mkdv {
                    Ok(soliton(speed, 0.5 * l, &grid)?.scale(amplitude))
                } else if component == 0 {
                    Ok(soliton(speed, 0.4 * l, &grid)?.scale(amplitude))
                } else {
                    Ok(soliton(2.0 * speed, 0.6 * l, &grid)?.scale(0.7 * amplitude))
                }
            }
            InitialKind::Multiscale => multiscale(&grid, amplitude, 0.5 * component as f64),
            InitialKind::Random => {
                let band = settings.value("data.band", d.band)?;
                random_band_limited(&grid, band, amplitude, seed + component)
            }
            InitialKind::File => unreachable!("handled above"),
        }
    };
    match equation {
        Equation::Mkdv => Ok(State::Single(build(0)?)),
        Equation::System => Ok(State::Pair(FieldPair::new(build(0)?, build(1)?)?)),
    }
}

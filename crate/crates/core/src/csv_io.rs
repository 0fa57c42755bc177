//! Trajectory export and the reader used by the identification commands.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::identification::TimeSeries;
use crate::simulation::Trajectory;

pub const TRAJECTORY_COLUMNS: [&str; 16] = [
    "t",
    "x0",
    "y0",
    "psi",
    "u",
    "v_m",
    "r",
    "delta_cmd",
    "delta",
    "n_cmd",
    "n_p",
    "U_A",
    "gamma_A",
    "X_total",
    "Y_total",
    "N_total",
];

/// Shortest representation that parses back to the same double. Plain
/// notation is used except for very small or very large magnitudes.
pub fn format_value(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn header(traj: &Trajectory) -> Vec<String> {
    let mut cols: Vec<String> = TRAJECTORY_COLUMNS.iter().map(|c| c.to_string()).collect();
    for label in &traj.component_labels {
        for axis in ["X", "Y", "N"] {
            cols.push(format!("{axis}_{label}"));
        }
    }
    cols
}

pub fn write_trajectory<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header(traj))?;
    let mut row = Vec::with_capacity(16 + 3 * traj.component_labels.len());
    for s in &traj.samples {
        row.clear();
        let st = &s.state;
        let f = &s.forces.total;
        row.extend([
            s.t,
            st.x0,
            st.y0,
            st.psi,
            st.u,
            st.v_m,
            st.r,
            s.command.delta,
            s.realized.delta,
            s.command.n_p,
            s.realized.n_p,
            s.apparent_wind.speed,
            s.apparent_wind.angle,
            f.x,
            f.y,
            f.n,
        ]);
        for label in &traj.component_labels {
            let c = s
                .forces
                .components
                .iter()
                .find(|(l, _)| l == label)
                .map(|(_, c)| *c)
                .unwrap_or_default();
            row.extend([c.x, c.y, c.n]);
        }
        w.write_record(row.iter().map(|x| format_value(*x)))?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(())
}

pub fn write_trajectory_file(traj: &Trajectory, path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    let mut buf = BufWriter::new(file);
    write_trajectory(traj, &mut buf)?;
    buf.flush().map_err(io)
}

/// Numeric table keyed by header name.
#[derive(Debug, Clone, PartialEq)]
pub struct Columns {
    pub names: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl Columns {
    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.data[i].as_slice())
    }

    pub fn rows(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }
}

pub fn read_columns<R: Read>(input: R) -> Result<Columns> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let names: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    let mut data = vec![Vec::new(); names.len()];
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        for (j, field) in rec.iter().enumerate() {
            let v = field
                .parse::<f64>()
                .map_err(|_| Error::Csv(format!("row {}, column `{}`: not a number: {field:?}", i + 2, names[j])))?;
            data[j].push(v);
        }
    }
    Ok(Columns { names, data })
}

pub fn read_columns_file(path: &Path) -> Result<Columns> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_columns(file)
}

/// Sample interval of a `t` column, rejecting non-uniform spacing.
pub fn uniform_step(t: &[f64]) -> Result<f64> {
    if t.len() < 2 {
        return Err(Error::SeriesTooShort {
            needed: 2,
            got: t.len(),
        });
    }
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Csv("time column is not increasing".into()));
    }
    for (i, w) in t.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt {
            return Err(Error::Csv(format!(
                "non-uniform sampling at row {}: step {} vs mean {dt}",
                i + 3,
                w[1] - w[0]
            )));
        }
    }
    Ok(dt)
}

/// Builds an identification series from `t`, `r` and `delta` columns, with
/// `u` and `v_m` attached when present.
pub fn time_series(cols: &Columns) -> Result<TimeSeries> {
    let need = |name: &str| {
        cols.get(name)
            .ok_or_else(|| Error::Csv(format!("missing column `{name}`")))
    };
    let dt = uniform_step(need("t")?)?;
    let mut series = TimeSeries::new(dt, need("r")?.to_vec(), need("delta")?.to_vec())?;
    series.u = cols.get("u").map(<[f64]>::to_vec);
    series.v_m = cols.get("v_m").map(<[f64]>::to_vec);
    series.validate()?;
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formatting_switches_to_exponent_at_extremes() {
        assert_eq!(format_value(0.1), "0.1");
        assert_eq!(format_value(0.0), "0");
        assert_eq!(format_value(1e-7), "1e-7");
        assert_eq!(format_value(-2.5e20), "-2.5e20");
        assert_eq!(format_value(123456.0), "123456");
    }

    proptest! {
        #[test]
        fn values_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(format_value(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn trajectory_round_trips_exactly() {
        use crate::config::{bundled_ship, ModelKind};
        use crate::simulation::{simulate, SimulationConfig, SimulationSetup};
        use crate::{ControlInput, ShipState};

        let model = bundled_ship().build_model(ModelKind::Mmg, false).unwrap();
        let setup = SimulationSetup {
            initial_state: ShipState::with_velocity(0.3, 0.01, 0.0),
            ..SimulationSetup::default()
        };
        let mut c = |t: f64, _: &ShipState| ControlInput::new(0.2 * (0.1 * t).sin(), 15.0);
        let traj = simulate(model.as_ref(), &mut c, &setup, &SimulationConfig::fixed(30.0, 0.1)).unwrap();
        let mut buf = Vec::new();
        write_trajectory(&traj, &mut buf).unwrap();
        let cols = read_columns(buf.as_slice()).unwrap();
        assert_eq!(cols.names, header(&traj));
        assert_eq!(cols.rows(), traj.samples.len());
        for (i, s) in traj.samples.iter().enumerate() {
            assert_eq!(cols.get("psi").unwrap()[i].to_bits(), s.state.psi.to_bits());
            assert_eq!(
                cols.get("Y_R").unwrap()[i].to_bits(),
                s.forces.components[2].1.y.to_bits()
            );
        }
        let series = time_series(&cols).unwrap();
        assert!((series.dt - 0.1).abs() < 1e-12);
    }

    #[test]
    fn reads_series_and_rejects_gaps() {
        let text = "t,r,delta,u\n0,0,0.1,1\n0.5,0.01,0.1,1\n1,0.02,0.1,1\n";
        let s = time_series(&read_columns(text.as_bytes()).unwrap()).unwrap();
        assert_eq!(s.dt, 0.5);
        assert_eq!(s.r, [0.0, 0.01, 0.02]);
        assert!(s.u.is_some() && s.v_m.is_none());

        let gap = "t,r,delta\n0,0,0\n0.5,0,0\n1.5,0,0\n";
        assert!(time_series(&read_columns(gap.as_bytes()).unwrap()).is_err());
        let missing = "t,r\n0,0\n1,0\n2,0\n";
        assert!(time_series(&read_columns(missing.as_bytes()).unwrap()).is_err());
    }
}

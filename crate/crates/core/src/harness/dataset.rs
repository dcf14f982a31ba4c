//! CSV export of sampled worlds.

use std::io::Write;

use crate::deferral::Sample;
use crate::error::{Error, Result};
use crate::hypotheses::{FiniteClass, Role};
use crate::worlds::{
    make_cal_counterexample_world, make_fig4_world, make_theorem1_world, sample_labeled, theorem1_support,
    MixtureWorld,
};

pub const WORLDS: [&str; 4] = ["fig4", "mixture", "cal", "theorem1"];

/// `n` samples from the named world with its default parameters.
pub fn generate(world: &str, n: usize, seed: u64) -> Result<Vec<Sample>> {
    match world {
        "fig4" => sample_labeled(&make_fig4_world(), n, seed),
        "mixture" => {
            let w = MixtureWorld::new(10, 20, 1.0, MixtureWorld::half_perfect_expert(10), 0)?;
            sample_labeled(&w, n, seed)
        }
        "cal" => sample_labeled(&make_cal_counterexample_world().world, n, seed),
        "theorem1" => {
            let h = FiniteClass::support_bounded(2, theorem1_support(2), Role::Classifier);
            sample_labeled(&make_theorem1_world(2, 0.1, &h)?, n, seed)
        }
        other => Err(Error::InvalidWorld(format!("unknown world {other:?}; expected one of {}", WORLDS.join(", ")))),
    }
}

/// Columns `x_0..x_{d-1},y,m`; `m` is empty when the expert label is absent.
pub fn write_csv<W: Write>(samples: &[Sample], out: W) -> Result<()> {
    let dim = samples.first().map_or(0, |s| s.x.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..dim).map(|i| format!("x_{i}")).collect();
    header.extend(["y".to_string(), "m".to_string()]);
    w.write_record(&header)?;
    for s in samples {
        if s.x.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: s.x.len() });
        }
        let mut row: Vec<String> = s.x.iter().map(|v| v.to_string()).collect();
        row.push(s.y.to_string());
        row.push(s.m.map(|m| m.to_string()).unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_csv`].
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<Sample>> {
    let mut r = csv::Reader::from_reader(input);
    let dim = r.headers()?.len().checked_sub(2).ok_or(Error::Config("dataset needs y and m columns".into()))?;
    let parse = |field: &str| field.parse::<f64>().map_err(|e| Error::Config(format!("bad number {field:?}: {e}")));
    let label = |field: &str| field.parse::<usize>().map_err(|e| Error::Config(format!("bad label {field:?}: {e}")));
    r.records()
        .map(|rec| {
            let rec = rec?;
            let x = (0..dim).map(|i| parse(&rec[i])).collect::<Result<Vec<_>>>()?;
            let m = match &rec[dim + 1] {
                "" => None,
                f => Some(label(f)?),
            };
            Ok(Sample { x, y: label(&rec[dim])?, m })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_with_missing_expert() {
        let mut s = generate("fig4", 20, 1).unwrap();
        s[3] = s[3].without_expert();
        let mut buf = Vec::new();
        write_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x_0,y,m\n"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), s);
    }

    #[test]
    fn unknown_world_rejected() {
        assert!(matches!(generate("moon", 3, 0), Err(Error::InvalidWorld(_))));
    }
}

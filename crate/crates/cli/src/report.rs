//! Machine-readable output.

use std::io::{self, Write};

use serde::Serialize;
use specnorm_core::{EstimateReport, Method};

/// The flat JSON object printed by `specnorm estimate`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsonReport {
    pub estimate_sq: f64,
    pub estimate: f64,
    pub effective_rank: f64,
    pub method_used: Method,
    pub r_used: Option<usize>,
    pub iterations_used: usize,
    pub eps: f64,
    pub delta: f64,
    pub seed: u64,
    pub wall_time_ms: f64,
}

impl JsonReport {
    pub fn new(report: &EstimateReport, wall_time_ms: f64) -> Self {
        JsonReport {
            estimate_sq: report.estimate_sq,
            estimate: report.estimate_sq.sqrt(),
            effective_rank: report.effective_rank,
            method_used: report.method_used,
            r_used: report.r_used,
            iterations_used: report.iterations_used,
            eps: report.epsilon,
            delta: report.delta,
            seed: report.seed,
            wall_time_ms,
        }
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> io::Result<()> {
        serde_json::to_writer(&mut w, self)?;
        writeln!(w)
    }

    /// One `key value` pair per line.
    pub fn write_plain<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "estimate {}", self.estimate)?;
        writeln!(w, "estimate_sq {}", self.estimate_sq)?;
        writeln!(w, "effective_rank {}", self.effective_rank)?;
        writeln!(w, "method_used {}", self.method_used)?;
        match self.r_used {
            Some(r) => writeln!(w, "r_used {r}")?,
            None => writeln!(w, "r_used none")?,
        }
        writeln!(w, "iterations_used {}", self.iterations_used)?;
        writeln!(w, "eps {}", self.eps)?;
        writeln!(w, "delta {}", self.delta)?;
        writeln!(w, "seed {}", self.seed)?;
        writeln!(w, "wall_time_ms {}", self.wall_time_ms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use specnorm_core::{estimate, EstimateRequest, Matrix};

    #[test]
    fn json_field_names_and_order() {
        let m = Matrix::identity(3).unwrap();
        let rep = estimate(&m, &EstimateRequest::new(0.1, 0.1, Method::Exact, 7)).unwrap();
        let mut out = Vec::new();
        JsonReport::new(&rep, 1.5).write_json(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "{\"estimate_sq\":1.0,\"estimate\":1.0,\"effective_rank\":3.0,\"method_used\":\"exact\",\
             \"r_used\":null,\"iterations_used\":0,\"eps\":0.1,\"delta\":0.1,\"seed\":7,\"wall_time_ms\":1.5}\n"
        );
    }

    #[test]
    fn plain_output() {
        let m = Matrix::diagonal(&[2.0, 1.0]).unwrap();
        let rep = estimate(&m, &EstimateRequest::new(0.1, 0.1, Method::Exact, 1)).unwrap();
        let mut out = Vec::new();
        JsonReport::new(&rep, 0.0).write_plain(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("estimate 2\nestimate_sq 4\n"), "{text}");
        assert!(text.contains("r_used none\n"));
    }
}

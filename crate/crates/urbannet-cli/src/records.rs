//! Lifted-box record file: one line per lifted detection with frame id,
//! class, confidence, center, size, Euler angles, residuals and the
//! reconstruction path flags.

use std::path::Path;

use urbannet::descriptor::VehicleClass;
use urbannet::geometry::{Box3D, Dimensions, EulerAngles, WorldPoint};
use urbannet::io::{self, FormatError};
use urbannet::lifting::{LiftFlags, LiftResult};

const FORMAT: &str = "lifted";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct LiftedRecord {
    pub frame: u64,
    pub class: VehicleClass,
    pub confidence: f64,
    pub box3d: Box3D,
    pub closure_residual: Option<f64>,
    pub dim_deltas: Option<(f64, f64)>,
    pub path: String,
}

pub fn path_label(flags: &LiftFlags) -> String {
    let mut s = if flags.dims_completion {
        "dims".to_string()
    } else if flags.alternate_triple {
        "alt".to_string()
    } else {
        "primary".to_string()
    };
    if flags.centroid_normal_fallback {
        s.push_str("+cnf");
    }
    s
}

impl LiftedRecord {
    pub fn new(frame: u64, class: VehicleClass, confidence: f64, lift: &LiftResult) -> Self {
        Self {
            frame,
            class,
            confidence,
            box3d: lift.box3d,
            closure_residual: lift.closure_residual,
            dim_deltas: lift.dim_deltas,
            path: path_label(&lift.flags),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "-".to_string())
}

fn parse_opt(path: &Path, line: usize, tok: &str) -> Result<Option<f64>, FormatError> {
    if tok == "-" {
        Ok(None)
    } else {
        io::parse_f64(path, line, tok).map(Some)
    }
}

pub fn write_lifted(records: &[LiftedRecord]) -> String {
    let mut s = String::new();
    s.push_str(&io::header_line(FORMAT, VERSION));
    s.push('\n');
    s.push_str("# frame class confidence cx cy cz w l h yaw pitch roll closure dw dl path\n");
    for r in records {
        s.push_str(&format!(
            "{} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {}\n",
            r.frame,
            r.class.as_str(),
            r.confidence,
            r.box3d.center.x,
            r.box3d.center.y,
            r.box3d.center.z,
            r.box3d.size.width,
            r.box3d.size.length,
            r.box3d.size.height,
            r.box3d.rotation.yaw,
            r.box3d.rotation.pitch,
            r.box3d.rotation.roll,
            opt(r.closure_residual),
            opt(r.dim_deltas.map(|d| d.0)),
            opt(r.dim_deltas.map(|d| d.1)),
            r.path,
        ));
    }
    s
}

pub fn read_lifted(path: &Path, text: &str) -> Result<Vec<LiftedRecord>, FormatError> {
    io::check_header(path, text.lines().next(), FORMAT, VERSION)?;
    let mut out = Vec::new();
    for (ln, line) in io::data_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 16 {
            return Err(FormatError::parse(
                path,
                ln,
                format!("lifted record needs 16 fields, got {}", toks.len()),
            ));
        }
        let frame: u64 = toks[0]
            .parse()
            .map_err(|_| FormatError::parse(path, ln, "bad frame id"))?;
        let class = VehicleClass::parse(toks[1])
            .ok_or_else(|| FormatError::parse(path, ln, format!("unknown class '{}'", toks[1])))?;
        let f = |i: usize| io::parse_f64(path, ln, toks[i]);
        let size = Dimensions::new(f(6)?, f(7)?, f(8)?)
            .map_err(|e| FormatError::parse(path, ln, e.to_string()))?;
        let box3d = Box3D::new(
            WorldPoint::new(f(3)?, f(4)?, f(5)?),
            size,
            EulerAngles::new(f(9)?, f(10)?, f(11)?),
        )
        .map_err(|e| FormatError::parse(path, ln, e.to_string()))?;
        let dw = parse_opt(path, ln, toks[13])?;
        let dl = parse_opt(path, ln, toks[14])?;
        out.push(LiftedRecord {
            frame,
            class,
            confidence: f(2)?,
            box3d,
            closure_residual: parse_opt(path, ln, toks[12])?,
            dim_deltas: match (dw, dl) {
                (Some(a), Some(b)) => Some((a, b)),
                _ => None,
            },
            path: toks[15].to_string(),
        });
    }
    Ok(out)
}

//! Second-stage monocular 3D vehicle detection for static long-range traffic
//! cameras: given tight 2D boxes, a pinhole camera, a lane-centerline map and
//! a triangulated road-geometry map, recover full 9-DOF 3D bounding boxes
//! (size, position and all three rotations), plus a synthetic benchmark
//! generator and an evaluation suite (rotated 3D/BEV IoU, AP at 40 recall
//! positions, range-binned IoU, ablations).

pub mod descriptor;
pub mod eval;
pub mod geometry;
pub mod io;
pub mod lanes;
pub mod lifting;
pub mod net;
pub mod seeded;
pub mod synth;
pub mod tin;

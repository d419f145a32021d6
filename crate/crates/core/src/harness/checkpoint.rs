//! Versioned binary checkpoints of a trajectory or a coupling run.
//!
//! Layout (little-endian throughout) is described in `docs/checkpoint-format.md`.

use num_complex::Complex64;

use crate::coupling::{CouplingConfig, CouplingRecord, TauMonitor};
use crate::dynamics::{FlowState, Integrator, SimConfig};
use crate::error::{Error, Result};
use crate::noise::{RngLineage, StochConvState};
use crate::propagator::XAlphaConfig;
use crate::spectral::{PairField, SpectralField, SpectralGrid};

pub const MAGIC: &[u8; 6] = b"SDNLW1";
pub const VERSION: u16 = 1;
const DIGEST_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub enum Checkpoint {
    Flow(FlowState),
    Coupling(CouplingRecord),
}

impl Checkpoint {
    pub fn kind(&self) -> u8 {
        match self {
            Checkpoint::Flow(_) => 0,
            Checkpoint::Coupling(_) => 1,
        }
    }

    pub fn config(&self) -> &SimConfig {
        match self {
            Checkpoint::Flow(s) => &s.config,
            Checkpoint::Coupling(r) => &r.reference.config,
        }
    }

    pub fn t(&self) -> f64 {
        match self {
            Checkpoint::Flow(s) => s.t,
            Checkpoint::Coupling(r) => r.t(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.buf.extend_from_slice(MAGIC);
        w.u16(VERSION);
        w.u8(self.kind());
        let cfg = config_bytes(self.config());
        w.buf.extend_from_slice(&cfg);
        w.buf.extend_from_slice(&sha(&cfg));
        match self {
            Checkpoint::Flow(s) => w.flow(s),
            Checkpoint::Coupling(r) => w.coupling(r),
        }
        let digest = sha(&w.buf);
        w.buf.extend_from_slice(&digest);
        w.buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() + 3 + DIGEST_LEN {
            return Err(corrupt("file is truncated"));
        }
        if &bytes[..MAGIC.len()] != MAGIC {
            return Err(corrupt("bad magic bytes, not a checkpoint"));
        }
        let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
        let mut r = Reader { buf: body, pos: MAGIC.len() };
        let version = r.u16()?;
        if version != VERSION {
            return Err(corrupt(&format!("format version {version} is not supported (expected {VERSION})")));
        }
        if sha(body) != digest {
            return Err(corrupt("checksum mismatch, file is truncated or corrupted"));
        }
        let kind = r.u8()?;
        let start = r.pos;
        let config = r.config()?;
        let cfg_digest = r.take(DIGEST_LEN)?;
        if sha(&body[start..start + CONFIG_LEN]) != cfg_digest {
            return Err(corrupt("config digest mismatch"));
        }
        let grid = config.grid()?;
        let out = match kind {
            0 => Checkpoint::Flow(r.flow(grid, config)?),
            1 => Checkpoint::Coupling(r.coupling(grid, config)?),
            k => return Err(corrupt(&format!("unknown record kind {k}"))),
        };
        if r.pos != body.len() {
            return Err(corrupt("trailing bytes after record"));
        }
        Ok(out)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    /// Refuses to continue with a different step size or model; only the horizon may change.
    pub fn check_resume(&self, requested: &SimConfig) -> Result<()> {
        let stored = self.config();
        if stored.dt.to_bits() != requested.dt.to_bits() {
            return Err(Error::Checkpoint(format!(
                "checkpoint was written with dt = {} but dt = {} was requested; resuming across step sizes is not allowed",
                stored.dt, requested.dt
            )));
        }
        let same = SimConfig { horizon: stored.horizon, ..*requested };
        if config_bytes(&same) != config_bytes(stored) {
            return Err(Error::Checkpoint("config hash differs from the checkpoint beyond the horizon".into()));
        }
        Ok(())
    }
}

fn corrupt(msg: &str) -> Error {
    Error::Checkpoint(msg.to_string())
}

fn sha(bytes: &[u8]) -> [u8; DIGEST_LEN] {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).into()
}

const CONFIG_LEN: usize = 8 * 8 + 2;

fn config_bytes(c: &SimConfig) -> Vec<u8> {
    let mut w = Writer::default();
    w.u64(c.n as u64);
    w.u64(c.m as u64);
    w.f64(c.s);
    w.f64(c.gamma);
    w.f64(c.alpha);
    w.f64(c.dt);
    w.f64(c.horizon);
    w.u64(c.seed);
    w.u8(match c.integrator {
        Integrator::Lawson => 0,
        Integrator::Etd1 => 1,
        Integrator::Midpoint => 2,
    });
    w.u8(c.cubic as u8);
    debug_assert_eq!(w.buf.len(), CONFIG_LEN);
    w.buf
}

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, x: u8) {
        self.buf.push(x);
    }
    fn u16(&mut self, x: u16) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn u64(&mut self, x: u64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn f64(&mut self, x: f64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn field(&mut self, f: &SpectralField) {
        self.u64(f.coeffs().len() as u64);
        for c in f.coeffs() {
            self.f64(c.re);
            self.f64(c.im);
        }
    }
    fn pair(&mut self, p: &PairField) {
        self.field(&p.u);
        self.field(&p.ut);
    }
    fn flow(&mut self, s: &FlowState) {
        self.f64(s.t);
        self.u64(s.step);
        self.f64(s.stick.t);
        self.u64(s.stick.lineage.seed);
        self.u64(s.stick.lineage.step);
        self.pair(&s.u0);
        self.pair(&s.linear);
        self.pair(&s.stick.value);
        self.pair(&s.v);
    }
    fn coupling(&mut self, r: &CouplingRecord) {
        self.flow(&r.reference);
        self.pair(&r.w);
        self.pair(&r.diff0);
        self.pair(&r.diff_linear);
        self.f64(r.diff_xalpha);
        self.f64(r.u1_xalpha);
        self.field(&r.h);
        self.f64(r.hcost);
        self.f64(r.log_density);
        self.f64(r.last_epsilon);
        let m = &r.monitor;
        self.f64(m.threshold);
        self.f64(m.alpha);
        self.f64(m.gamma);
        for x in m.running_max {
            self.f64(x);
        }
        self.u8(m.stopped_at.is_some() as u8);
        self.f64(m.stopped_at.unwrap_or(0.0));
        let c = &r.config;
        self.f64(c.c_univ);
        self.f64(c.prefactor_power);
        self.f64(c.base_power);
        self.f64(c.xalpha.t_star);
        self.f64(c.xalpha.dt);
        self.u64(c.xalpha.pad as u64);
        self.f64(c.xalpha_refresh);
        self.u64(c.pad as u64);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or_else(|| corrupt("file is truncated"))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| corrupt("size field overflows"))
    }
    fn config(&mut self) -> Result<SimConfig> {
        let n = self.usize()?;
        let m = self.usize()?;
        let (s, gamma, alpha, dt, horizon) = (self.f64()?, self.f64()?, self.f64()?, self.f64()?, self.f64()?);
        let seed = self.u64()?;
        let integrator = match self.u8()? {
            0 => Integrator::Lawson,
            1 => Integrator::Etd1,
            2 => Integrator::Midpoint,
            k => return Err(corrupt(&format!("unknown integrator tag {k}"))),
        };
        let cubic = match self.u8()? {
            0 => false,
            1 => true,
            k => return Err(corrupt(&format!("bad boolean {k}"))),
        };
        let cfg = SimConfig { n, m, s, gamma, alpha, dt, horizon, seed, integrator, cubic };
        cfg.validate()?;
        Ok(cfg)
    }
    fn field(&mut self, grid: SpectralGrid) -> Result<SpectralField> {
        let len = self.usize()?;
        if len != grid.len() {
            return Err(corrupt(&format!("field has {len} coefficients, grid needs {}", grid.len())));
        }
        let mut coeffs = Vec::with_capacity(len);
        for _ in 0..len {
            coeffs.push(Complex64::new(self.f64()?, self.f64()?));
        }
        SpectralField::from_raw_coeffs(grid, coeffs)
    }
    fn pair(&mut self, grid: SpectralGrid) -> Result<PairField> {
        PairField::new(self.field(grid)?, self.field(grid)?)
    }
    fn flow(&mut self, grid: SpectralGrid, config: SimConfig) -> Result<FlowState> {
        let t = self.f64()?;
        let step = self.u64()?;
        let stick_t = self.f64()?;
        let lineage = RngLineage { seed: self.u64()?, step: self.u64()? };
        let u0 = self.pair(grid)?;
        let linear = self.pair(grid)?;
        let stick = StochConvState { value: self.pair(grid)?, t: stick_t, lineage };
        let v = self.pair(grid)?;
        Ok(FlowState { u0, linear, stick, v, t, step, config })
    }
    fn coupling(&mut self, grid: SpectralGrid, config: SimConfig) -> Result<CouplingRecord> {
        let reference = self.flow(grid, config)?;
        let w = self.pair(grid)?;
        let diff0 = self.pair(grid)?;
        let diff_linear = self.pair(grid)?;
        let diff_xalpha = self.f64()?;
        let u1_xalpha = self.f64()?;
        let h = self.field(grid)?;
        let (hcost, log_density, last_epsilon) = (self.f64()?, self.f64()?, self.f64()?);
        let (threshold, alpha, gamma) = (self.f64()?, self.f64()?, self.f64()?);
        let running_max = [self.f64()?, self.f64()?, self.f64()?];
        let stopped = self.u8()? != 0;
        let stopped_t = self.f64()?;
        let monitor = TauMonitor { threshold, alpha, gamma, running_max, stopped_at: stopped.then_some(stopped_t) };
        let (c_univ, prefactor_power, base_power) = (self.f64()?, self.f64()?, self.f64()?);
        let xalpha = XAlphaConfig { t_star: self.f64()?, dt: self.f64()?, pad: self.usize()? };
        let xalpha_refresh = self.f64()?;
        let pad = self.usize()?;
        let cc = CouplingConfig { c_univ, prefactor_power, base_power, xalpha, xalpha_refresh, pad };
        cc.validate()?;
        Ok(CouplingRecord {
            reference,
            w,
            diff0,
            diff_linear,
            diff_xalpha,
            u1_xalpha,
            h,
            hcost,
            log_density,
            last_epsilon,
            monitor,
            config: cc,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::CouplingStepper;
    use crate::dynamics::FlowStepper;
    use crate::spectral::ModeIndex;

    fn small() -> SimConfig {
        SimConfig { dt: 0.05, seed: 3, ..SimConfig::with_n(2) }
    }

    fn bump(grid: SpectralGrid) -> PairField {
        PairField::position(SpectralField::cosine(grid, ModeIndex::new(1, 1), 0.4).unwrap())
    }

    #[test]
    fn flow_round_trip_is_byte_identical() {
        let sim = small();
        let stepper = FlowStepper::new(sim).unwrap();
        let mut state = stepper.start(bump(sim.grid().unwrap())).unwrap();
        for _ in 0..7 {
            stepper.step(&mut state).unwrap();
        }
        let bytes = Checkpoint::Flow(state.clone()).to_bytes();
        let back = Checkpoint::from_bytes(&bytes).unwrap();
        assert_eq!(back, Checkpoint::Flow(state));
        assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn coupling_round_trip_is_byte_identical() {
        let sim = small();
        let g = sim.grid().unwrap();
        let stepper = CouplingStepper::new(sim).unwrap();
        let mut rec = CouplingRecord::new(PairField::zeros(g), bump(g), sim, CouplingConfig::default()).unwrap();
        rec = rec.with_monitor(50.0).unwrap();
        for _ in 0..5 {
            stepper.step(&mut rec).unwrap();
        }
        let bytes = Checkpoint::Coupling(rec.clone()).to_bytes();
        let back = Checkpoint::from_bytes(&bytes).unwrap();
        assert_eq!(back.to_bytes(), bytes);
        if let Checkpoint::Coupling(r) = back {
            assert_eq!(r.w, rec.w);
            assert_eq!(r.monitor, rec.monitor);
        }
    }

    #[test]
    fn truncated_and_corrupted_files_are_refused() {
        let sim = small();
        let state = FlowState::new(PairField::zeros(sim.grid().unwrap()), sim).unwrap();
        let bytes = Checkpoint::Flow(state).to_bytes();
        for cut in [0, 5, 20, bytes.len() / 2, bytes.len() - 1] {
            assert!(matches!(Checkpoint::from_bytes(&bytes[..cut]), Err(Error::Checkpoint(_))), "cut {cut}");
        }
        let mut flipped = bytes.clone();
        flipped[100] ^= 1;
        assert!(Checkpoint::from_bytes(&flipped).is_err());
        let mut wrong_version = bytes;
        wrong_version[6] = 9;
        let msg = Checkpoint::from_bytes(&wrong_version).unwrap_err().to_string();
        assert!(msg.contains("version"), "{msg}");
    }

    #[test]
    fn resume_guard() {
        let sim = small();
        let cp = Checkpoint::Flow(FlowState::new(PairField::zeros(sim.grid().unwrap()), sim).unwrap());
        assert!(cp.check_resume(&SimConfig { horizon: 9.0, ..sim }).is_ok());
        let err = cp.check_resume(&SimConfig { dt: 0.025, ..sim }).unwrap_err().to_string();
        assert!(err.contains("dt"), "{err}");
        assert!(cp.check_resume(&SimConfig { gamma: 0.5, ..sim }).is_err());
    }
}

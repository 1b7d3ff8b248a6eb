//! Run configuration: flat `section.key = value` text (TOML dotted keys).
//!
//! Schema (all keys optional unless the command needs them):
//!
//! | key | type | default |
//! |---|---|---|
//! | task.command | string | the command given on the command line |
//! | task.id | string | task.command |
//! | pair.potential | "yamaguchi" \| "yukawa" | "yamaguchi" |
//! | pair.strength, pair.beta | float | 0.3, 1.0 |
//! | pair.coupling, pair.mu | float | -2.0, 1.0 |
//! | three.masses | [float; 3] | [1, 1, 1] |
//! | three.bosons | bool | false |
//! | three.strength, three.beta | [float; 3] | [0, 0, 0], [1, 1, 1] |
//! | three.strip | float | narrowest β of the interacting pairs |
//! | numerics.nodes, numerics.grading, numerics.generations | int | 10, 2, 3 |
//! | numerics.theta, numerics.tail_theta | float | 0.3, 0.25 |
//! | numerics.side_pts, numerics.scan | int | 12, 40 |
//! | numerics.tol | float | 1e-10 |
//! | numerics.e_max | float | 10.0 |
//! | region.re_min, region.re_max, region.im_min, region.im_max | float | none |
//! | sheet.l0 | int | 1 |
//! | sheet.level_bits | [int] | one per distinct threshold, all 1 |
//! | bound.e_min, bound.e_max | float | -2.0, just below the lowest threshold |
//! | loci.lambda1, loci.lambda2, loci.c | float | -2.0, -0.1, 0.9 |
//! | loci.grid, loci.samples | int | 201, 10000 |
//! | path.thresholds | [float] | [] |
//! | path.points | [[re, im]] | [] |
//! | path.start_l0 | int | 0 |
//! | path.start_bits | [int] | all 0 |
//! | path.check_domain | bool | false |
//! | path.c | float | 0.5 |
//! | path.tube | float | 1e-3 |

use std::collections::BTreeMap;
use toml::Value;

pub const COMMANDS: [&str; 7] =
    ["pair-spectrum", "pair-resonances", "loci", "sheet-map", "three-bound", "three-resonances", "verify"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub id: String,
    pub pair_potential: String,
    pub pair_strength: f64,
    pub pair_beta: f64,
    pub pair_coupling: f64,
    pub pair_mu: f64,
    pub masses: [f64; 3],
    pub bosons: bool,
    pub strength: [f64; 3],
    pub beta: [f64; 3],
    pub strip: Option<f64>,
    pub nodes: usize,
    pub grading: usize,
    pub generations: usize,
    pub theta: f64,
    pub tail_theta: f64,
    pub side_pts: usize,
    pub scan: usize,
    pub tol: f64,
    pub e_max: f64,
    pub region: Option<[f64; 4]>,
    pub l0: i32,
    pub level_bits: Option<Vec<u8>>,
    pub bound_e_min: f64,
    pub bound_e_max: Option<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub loci_c: f64,
    pub loci_grid: usize,
    pub loci_samples: usize,
    pub path_thresholds: Vec<f64>,
    pub path_points: Vec<[f64; 2]>,
    pub start_l0: i32,
    pub start_bits: Option<Vec<u8>>,
    pub check_domain: bool,
    pub path_c: f64,
    pub tube: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            id: String::new(),
            pair_potential: "yamaguchi".into(),
            pair_strength: 0.3,
            pair_beta: 1.0,
            pair_coupling: -2.0,
            pair_mu: 1.0,
            masses: [1.0; 3],
            bosons: false,
            strength: [0.0; 3],
            beta: [1.0; 3],
            strip: None,
            nodes: 10,
            grading: 2,
            generations: 3,
            theta: 0.3,
            tail_theta: 0.25,
            side_pts: 12,
            scan: 40,
            tol: 1e-10,
            e_max: 10.0,
            region: None,
            l0: 1,
            level_bits: None,
            bound_e_min: -2.0,
            bound_e_max: None,
            lambda1: -2.0,
            lambda2: -0.1,
            loci_c: 0.9,
            loci_grid: 201,
            loci_samples: 10000,
            path_thresholds: Vec::new(),
            path_points: Vec::new(),
            start_l0: 0,
            start_bits: None,
            check_domain: false,
            path_c: 0.5,
            tube: 1e-3,
        }
    }
}

/// Flatten nested tables into dotted keys.
fn flatten(prefix: &str, t: &toml::Table, out: &mut BTreeMap<String, Value>) {
    for (k, v) in t {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(sub) => flatten(&key, sub, out),
            _ => {
                out.insert(key, v.clone());
            }
        }
    }
}

fn float(v: &Value, key: &str) -> Result<f64, String> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(format!("{key}: expected a number")),
    }
}

fn int(v: &Value, key: &str) -> Result<i64, String> {
    v.as_integer().ok_or_else(|| format!("{key}: expected an integer"))
}

fn count(v: &Value, key: &str) -> Result<usize, String> {
    let i = int(v, key)?;
    usize::try_from(i).map_err(|_| format!("{key}: must be non-negative"))
}

fn floats(v: &Value, key: &str) -> Result<Vec<f64>, String> {
    v.as_array().ok_or_else(|| format!("{key}: expected an array"))?.iter().map(|x| float(x, key)).collect()
}

fn three(v: &Value, key: &str) -> Result<[f64; 3], String> {
    let f = floats(v, key)?;
    f.try_into().map_err(|_| format!("{key}: expected three numbers"))
}

fn bits(v: &Value, key: &str) -> Result<Vec<u8>, String> {
    v.as_array()
        .ok_or_else(|| format!("{key}: expected an array"))?
        .iter()
        .map(|x| match int(x, key)? {
            0 => Ok(0),
            1 => Ok(1),
            _ => Err(format!("{key}: bits must be 0 or 1")),
        })
        .collect()
}

fn text(v: &Value, key: &str) -> Result<String, String> {
    v.as_str().map(str::to_string).ok_or_else(|| format!("{key}: expected a string"))
}

impl RunConfig {
    /// Parse config text for `command`. Unknown keys are errors.
    pub fn parse(src: &str, command: &str) -> Result<Self, String> {
        let table: toml::Table = src.parse().map_err(|e: toml::de::Error| e.message().to_string())?;
        let mut flat = BTreeMap::new();
        flatten("", &table, &mut flat);
        let mut c = RunConfig { command: command.to_string(), ..Default::default() };
        let mut region = [None; 4];
        for (k, v) in &flat {
            let k = k.as_str();
            match k {
                "task.command" => c.command = text(v, k)?,
                "task.id" => c.id = text(v, k)?,
                "pair.potential" => c.pair_potential = text(v, k)?,
                "pair.strength" => c.pair_strength = float(v, k)?,
                "pair.beta" => c.pair_beta = float(v, k)?,
                "pair.coupling" => c.pair_coupling = float(v, k)?,
                "pair.mu" => c.pair_mu = float(v, k)?,
                "three.masses" => c.masses = three(v, k)?,
                "three.bosons" => c.bosons = v.as_bool().ok_or_else(|| format!("{k}: expected a bool"))?,
                "three.strength" => c.strength = three(v, k)?,
                "three.beta" => c.beta = three(v, k)?,
                "three.strip" => c.strip = Some(float(v, k)?),
                "numerics.nodes" => c.nodes = count(v, k)?,
                "numerics.grading" => c.grading = count(v, k)?,
                "numerics.generations" => c.generations = count(v, k)?,
                "numerics.theta" => c.theta = float(v, k)?,
                "numerics.tail_theta" => c.tail_theta = float(v, k)?,
                "numerics.side_pts" => c.side_pts = count(v, k)?,
                "numerics.scan" => c.scan = count(v, k)?,
                "numerics.tol" => c.tol = float(v, k)?,
                "numerics.e_max" => c.e_max = float(v, k)?,
                "region.re_min" => region[0] = Some(float(v, k)?),
                "region.re_max" => region[1] = Some(float(v, k)?),
                "region.im_min" => region[2] = Some(float(v, k)?),
                "region.im_max" => region[3] = Some(float(v, k)?),
                "sheet.l0" => c.l0 = int(v, k)? as i32,
                "sheet.level_bits" => c.level_bits = Some(bits(v, k)?),
                "bound.e_min" => c.bound_e_min = float(v, k)?,
                "bound.e_max" => c.bound_e_max = Some(float(v, k)?),
                "loci.lambda1" => c.lambda1 = float(v, k)?,
                "loci.lambda2" => c.lambda2 = float(v, k)?,
                "loci.c" => c.loci_c = float(v, k)?,
                "loci.grid" => c.loci_grid = count(v, k)?,
                "loci.samples" => c.loci_samples = count(v, k)?,
                "path.thresholds" => c.path_thresholds = floats(v, k)?,
                "path.points" => {
                    let arr = v.as_array().ok_or_else(|| format!("{k}: expected an array of [re, im]"))?;
                    c.path_points = arr
                        .iter()
                        .map(|p| {
                            let f = floats(p, k)?;
                            f.try_into().map_err(|_| format!("{k}: each point is [re, im]"))
                        })
                        .collect::<Result<_, String>>()?;
                }
                "path.start_l0" => c.start_l0 = int(v, k)? as i32,
                "path.start_bits" => c.start_bits = Some(bits(v, k)?),
                "path.check_domain" => c.check_domain = v.as_bool().ok_or_else(|| format!("{k}: expected a bool"))?,
                "path.c" => c.path_c = float(v, k)?,
                "path.tube" => c.tube = float(v, k)?,
                _ => return Err(format!("unknown key {k}")),
            }
        }
        match region {
            [None, None, None, None] => {}
            [Some(a), Some(b), Some(cc), Some(d)] => c.region = Some([a, b, cc, d]),
            _ => return Err("region needs all of re_min, re_max, im_min, im_max".into()),
        }
        if c.command != command {
            return Err(format!("task.command = {} but {command} was requested", c.command));
        }
        if c.id.is_empty() {
            c.id = c.command.clone();
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), String> {
        if !COMMANDS.contains(&self.command.as_str()) {
            return Err(format!("unknown command {}", self.command));
        }
        if self.id.is_empty() || !self.id.chars().all(|ch| ch.is_ascii_alphanumeric() || "-_.".contains(ch)) {
            return Err(format!("task.id {:?} is not a plain file stem", self.id));
        }
        if !["yamaguchi", "yukawa"].contains(&self.pair_potential.as_str()) {
            return Err(format!("pair.potential {} unknown", self.pair_potential));
        }
        let pos = [
            ("numerics.tol", self.tol),
            ("numerics.e_max", self.e_max),
            ("pair.beta", self.pair_beta),
            ("pair.mu", self.pair_mu),
            ("path.tube", self.tube),
        ];
        for (k, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{k} must be positive"));
            }
        }
        if self.masses.iter().chain(&self.beta).any(|&m| !(m > 0.0)) {
            return Err("three.masses and three.beta must be positive".into());
        }
        if self.nodes < 2 || self.side_pts < 2 || self.scan < 1 || self.loci_grid < 2 {
            return Err("numerics.nodes, numerics.side_pts, loci.grid ≥ 2 and numerics.scan ≥ 1".into());
        }
        if !(self.theta.abs() < std::f64::consts::FRAC_PI_2) {
            return Err("numerics.theta must satisfy |θ| < π/2".into());
        }
        if let Some([a, b, c, d]) = self.region {
            if !(b > a && d > c) {
                return Err("region is degenerate".into());
            }
        }
        if self.l0.abs() > 1 || self.start_l0.abs() > 1 {
            return Err("l0 must be -1, 0 or 1".into());
        }
        if !(self.path_c > 0.0 && self.path_c < 1.0) {
            return Err("path.c must lie in (0, 1)".into());
        }
        if let Some(e) = self.bound_e_max {
            if !(e > self.bound_e_min) {
                return Err("bound.e_max must exceed bound.e_min".into());
            }
        }
        Ok(())
    }

    /// Every field as (dotted key, TOML value text), in a fixed order. Feeding the
    /// lines back through `parse` gives the same config.
    pub fn echo(&self) -> Vec<(String, String)> {
        let f = |x: f64| Value::Float(x).to_string();
        let fa = |x: &[f64]| Value::Array(x.iter().map(|&v| Value::Float(v)).collect()).to_string();
        let ba = |x: &[u8]| Value::Array(x.iter().map(|&v| Value::Integer(v as i64)).collect()).to_string();
        let s = |x: &str| Value::String(x.to_string()).to_string();
        let i = |x: i64| Value::Integer(x).to_string();
        let mut out = vec![
            ("task.command", s(&self.command)),
            ("task.id", s(&self.id)),
            ("pair.potential", s(&self.pair_potential)),
            ("pair.strength", f(self.pair_strength)),
            ("pair.beta", f(self.pair_beta)),
            ("pair.coupling", f(self.pair_coupling)),
            ("pair.mu", f(self.pair_mu)),
            ("three.masses", fa(&self.masses)),
            ("three.bosons", self.bosons.to_string()),
            ("three.strength", fa(&self.strength)),
            ("three.beta", fa(&self.beta)),
            ("numerics.nodes", i(self.nodes as i64)),
            ("numerics.grading", i(self.grading as i64)),
            ("numerics.generations", i(self.generations as i64)),
            ("numerics.theta", f(self.theta)),
            ("numerics.tail_theta", f(self.tail_theta)),
            ("numerics.side_pts", i(self.side_pts as i64)),
            ("numerics.scan", i(self.scan as i64)),
            ("numerics.tol", f(self.tol)),
            ("numerics.e_max", f(self.e_max)),
            ("sheet.l0", i(self.l0 as i64)),
            ("bound.e_min", f(self.bound_e_min)),
            ("loci.lambda1", f(self.lambda1)),
            ("loci.lambda2", f(self.lambda2)),
            ("loci.c", f(self.loci_c)),
            ("loci.grid", i(self.loci_grid as i64)),
            ("loci.samples", i(self.loci_samples as i64)),
            ("path.thresholds", fa(&self.path_thresholds)),
            (
                "path.points",
                Value::Array(
                    self.path_points
                        .iter()
                        .map(|p| Value::Array(vec![Value::Float(p[0]), Value::Float(p[1])]))
                        .collect(),
                )
                .to_string(),
            ),
            ("path.start_l0", i(self.start_l0 as i64)),
            ("path.check_domain", self.check_domain.to_string()),
            ("path.c", f(self.path_c)),
            ("path.tube", f(self.tube)),
        ];
        if let Some(b) = self.strip {
            out.push(("three.strip", f(b)));
        }
        if let Some([a, b, c, d]) = self.region {
            out.push(("region.re_min", f(a)));
            out.push(("region.re_max", f(b)));
            out.push(("region.im_min", f(c)));
            out.push(("region.im_max", f(d)));
        }
        if let Some(b) = &self.level_bits {
            out.push(("sheet.level_bits", ba(b)));
        }
        if let Some(b) = &self.start_bits {
            out.push(("path.start_bits", ba(b)));
        }
        if let Some(e) = self.bound_e_max {
            out.push(("bound.e_max", f(e)));
        }
        out.sort_by(|a, b| a.0.cmp(b.0));
        out.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

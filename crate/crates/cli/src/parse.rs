//! Channel, resource, group and state specifiers.
//!
//! | kind     | forms                                                                 |
//! |----------|-----------------------------------------------------------------------|
//! | channel  | `depolarizing:d:p`, `pauli:px:py:pz`, `identity:d`, `random:d:k:seed`, `unitary:FILE`, `replacer:FILE`, `FILE` |
//! | resource | `pauli`, `pauli-xy`, `gellmann:d`, `single:FILE`, `FILE`             |
//! | group    | `zn:N`, `dihedral:N`, `sym:k`, `FILE`                                 |
//! | state    | `mixed:d`, `basis:d:k`, `FILE`                                        |
//!
//! Files hold the JSON wire formats of `qot_core::json`.

use std::path::Path;

use qot_core::channel::ChannelJson;
use qot_core::groups::GroupJson;
use qot_core::sampling::{random_unital_channel, Rng};
use qot_core::seminorm::ResourceJson;
use qot_core::{ComplexMatrix, DensityMatrix, FiniteGroupTable, QuantumChannel, ResourceSet};

use crate::CliError;

fn bad(field: &'static str, msg: impl Into<String>) -> CliError {
    CliError::Input { field, msg: msg.into() }
}

fn num<T: std::str::FromStr>(field: &'static str, s: &str) -> Result<T, CliError> {
    s.parse().map_err(|_| bad(field, format!("cannot parse number `{s}`")))
}

fn read_json<T: serde::de::DeserializeOwned>(field: &'static str, path: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(Path::new(path)).map_err(|e| bad(field, format!("{path}: {e}")))?;
    qot_core::json::from_str(&text).map_err(|e| bad(field, format!("{path}: {e}")))
}

fn core(field: &'static str) -> impl Fn(qot_core::Error) -> CliError {
    move |e| bad(field, e.to_string())
}

pub fn channel(s: &str) -> Result<QuantumChannel, CliError> {
    const F: &str = "--channel";
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["depolarizing", d, p] => QuantumChannel::depolarizing(num(F, d)?, num(F, p)?).map_err(core(F)),
        ["pauli", x, y, z] => QuantumChannel::pauli(num(F, x)?, num(F, y)?, num(F, z)?).map_err(core(F)),
        ["identity", d] => Ok(QuantumChannel::identity(num(F, d)?)),
        ["random", d, k, seed] => {
            let (d, k): (usize, usize) = (num(F, d)?, num(F, k)?);
            if d == 0 || k == 0 {
                return Err(bad(F, "random channel needs d ≥ 1 and k ≥ 1"));
            }
            Ok(random_unital_channel(d, k, &mut Rng::seeded(num(F, seed)?)))
        }
        ["unitary", path] => {
            let u: ComplexMatrix = read_json(F, path)?;
            QuantumChannel::unitary(u).map_err(core(F))
        }
        ["replacer", path] => {
            let m: ComplexMatrix = read_json(F, path)?;
            let sigma = DensityMatrix::from_matrix(m).map_err(core(F))?;
            QuantumChannel::replacer(&sigma).map_err(core(F))
        }
        [path] if path.ends_with(".json") => {
            let j: ChannelJson = read_json(F, path)?;
            QuantumChannel::from_json(j).map_err(core(F))
        }
        _ => Err(bad(F, format!("unknown channel specifier `{s}`"))),
    }
}

pub fn resource(s: &str) -> Result<ResourceSet, CliError> {
    const F: &str = "--resource";
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["pauli"] => Ok(ResourceSet::pauli()),
        ["pauli-xy"] => Ok(ResourceSet::pauli_xy()),
        ["gellmann", d] => ResourceSet::gell_mann(num(F, d)?).map_err(core(F)),
        ["single", path] => {
            let m: ComplexMatrix = read_json(F, path)?;
            ResourceSet::single(m).map_err(core(F))
        }
        [path] if path.ends_with(".json") => {
            let j: ResourceJson = read_json(F, path)?;
            ResourceSet::from_json(j).map_err(core(F))
        }
        _ => Err(bad(F, format!("unknown resource specifier `{s}`"))),
    }
}

pub fn group(s: &str) -> Result<FiniteGroupTable, CliError> {
    const F: &str = "--group";
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["zn", n] => FiniteGroupTable::cyclic(num(F, n)?).map_err(core(F)),
        ["dihedral", n] => FiniteGroupTable::dihedral(num(F, n)?).map_err(core(F)),
        ["sym", k] => FiniteGroupTable::symmetric(num(F, k)?).map_err(core(F)),
        [path] if path.ends_with(".json") => {
            let j: GroupJson = read_json(F, path)?;
            FiniteGroupTable::from_json(j).map_err(core(F))
        }
        _ => Err(bad(F, format!("unknown group specifier `{s}`"))),
    }
}

pub fn state(field: &'static str, s: &str) -> Result<DensityMatrix, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["mixed", d] => {
            let d: usize = num(field, d)?;
            if d == 0 {
                return Err(bad(field, "dimension must be positive"));
            }
            Ok(DensityMatrix::maximally_mixed(d))
        }
        ["basis", d, k] => {
            let (d, k): (usize, usize) = (num(field, d)?, num(field, k)?);
            if k >= d {
                return Err(bad(field, format!("basis index {k} out of range for dimension {d}")));
            }
            Ok(DensityMatrix::basis(d, k))
        }
        [path] if path.ends_with(".json") => {
            let m: ComplexMatrix = read_json(field, path)?;
            DensityMatrix::from_matrix(m).map_err(core(field))
        }
        _ => Err(bad(field, format!("unknown state specifier `{s}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specifiers() {
        assert_eq!(channel("depolarizing:2:0.5").unwrap().dim(), 2);
        assert_eq!(channel("pauli:0.1:0.2:0.3").unwrap().dim(), 2);
        assert_eq!(resource("gellmann:3").unwrap().len(), 8);
        assert_eq!(group("zn:4").unwrap().order(), 4);
        assert_eq!(state("--rho", "basis:3:2").unwrap().dim(), 3);
    }

    #[test]
    fn errors_name_the_field() {
        let e = channel("depolarizing:2:x").unwrap_err().to_string();
        assert!(e.contains("--channel"), "{e}");
        let e = resource("nope").unwrap_err().to_string();
        assert!(e.contains("--resource"), "{e}");
        let e = group("missing.json").unwrap_err().to_string();
        assert!(e.contains("--group") && e.contains("missing.json"), "{e}");
        assert!(channel("depolarizing:2:1.5").is_err());
    }
}

//! Network checkpoints: JSON files holding the spec, the parameters, and the
//! standardizer the network was trained behind. Floats survive the round
//! trip exactly (shortest-representation encoding).

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::Standardizer;
use crate::error::{Error, Result};

use super::Network;

const FORMAT: &str = "dal-checkpoint";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub network: Network,
    /// Present when the network expects standardized inputs.
    pub standardizer: Option<Standardizer>,
    /// Whether the network predicts standardized targets.
    pub standardized_targets: bool,
}

pub fn save_checkpoint(
    path: &Path,
    network: &Network,
    standardizer: Option<&Standardizer>,
    standardized_targets: bool,
) -> Result<()> {
    let ck = Checkpoint {
        format: FORMAT.to_string(),
        version: VERSION,
        network: network.clone(),
        standardizer: standardizer.cloned(),
        standardized_targets,
    };
    let file = BufWriter::new(File::create(path)?);
    serde_json::to_writer(file, &ck)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let file = BufReader::new(File::open(path)?);
    let ck: Checkpoint = serde_json::from_reader(file)?;
    if ck.format != FORMAT {
        return Err(Error::Config(format!(
            "{} is not a network checkpoint (format '{}')",
            path.display(),
            ck.format
        )));
    }
    if ck.version != VERSION {
        return Err(Error::Config(format!(
            "unsupported checkpoint version {}",
            ck.version
        )));
    }
    // revalidate shape chain and finiteness
    let net = Network::from_parts(
        ck.network.spec().clone(),
        ck.network.weights().to_vec(),
        ck.network.biases().to_vec(),
    )?;
    Ok(Checkpoint {
        network: net,
        ..ck
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{fit_standardizer, generate_rosenbrock};
    use crate::nn::NetworkSpec;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.json");
        let net = Network::init(NetworkSpec::new(3).with_hidden(vec![5, 2]), 42).unwrap();
        let ds = generate_rosenbrock(20, 3, -2.0, 2.0, 1).unwrap();
        let st = fit_standardizer(&ds, &[0, 1, 2, 3, 4]).unwrap();
        save_checkpoint(&path, &net, Some(&st), true).unwrap();
        let ck = load_checkpoint(&path).unwrap();
        assert_eq!(ck.network, net);
        assert!(ck.standardized_targets);
        let st2 = ck.standardizer.unwrap();
        assert_eq!(st2.feature_mean, st.feature_mean);
        assert_eq!(st2.feature_std, st.feature_std);
        assert_eq!(st2.target_mean, st.target_mean);
        assert_eq!(st2.target_std, st.target_std);
    }

    #[test]
    fn rejects_foreign_json() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("other.json");
        std::fs::write(&path, "{\"hello\": 1}").unwrap();
        assert!(load_checkpoint(&path).is_err());
    }
}

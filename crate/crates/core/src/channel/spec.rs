use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Channel;
use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, Hamiltonian, ThermoContext};

/// On-disk channel description.
///
/// ```json
/// { "dim_in": 2, "dim_out": 2, "kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]],
///   "h_in": [[[0,0],[0,0]],[[0,0],[1,0]]], "beta": 1.0 }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_in: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_out: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl ChannelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Snapshot of a channel, optionally with a temperature.
    pub fn from_channel(ch: &Channel, beta: Option<f64>) -> Self {
        Self {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            kraus: ch.kraus().to_vec(),
            h_in: ch.h_in().map(|h| h.matrix().clone()),
            h_out: ch.h_out().map(|h| h.matrix().clone()),
            beta,
        }
    }

    /// Validate into a channel. A lone `h_in` is reused as `h_out` when the
    /// dimensions agree.
    pub fn to_channel(&self) -> Result<Channel> {
        for k in &self.kraus {
            if k.rows() != self.dim_out || k.cols() != self.dim_in {
                return Err(Error::ShapeMismatch(format!(
                    "Kraus operator is {}x{}, spec declares {}x{}",
                    k.rows(),
                    k.cols(),
                    self.dim_out,
                    self.dim_in
                )));
            }
        }
        let h_in = self.h_in.clone().map(Hamiltonian::new).transpose()?;
        let mut h_out = self.h_out.clone().map(Hamiltonian::new).transpose()?;
        if h_out.is_none() && self.dim_in == self.dim_out {
            h_out = h_in.clone();
        }
        Channel::from_kraus(self.kraus.clone(), h_in, h_out)
    }

    /// The spec's temperature, if present.
    pub fn context(&self) -> Result<Option<ThermoContext>> {
        self.beta.map(ThermoContext::new).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::erasure;

    #[test]
    fn round_trip() {
        let ch = erasure(2).with_hamiltonian(Hamiltonian::diag(&[0.0, 1.0])).unwrap();
        let spec = ChannelSpec::from_channel(&ch, Some(1.0));
        let back = ChannelSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(spec, back);
        let ch2 = back.to_channel().unwrap();
        assert_eq!(ch2.kraus(), ch.kraus());
        assert_eq!(ch2.h_out(), ch.h_out());
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(ChannelSpec::from_json("{"), Err(Error::Parse(_))));
        let text = r#"{"dim_in":2,"dim_out":2,"kraus":[[[[1,0],[0,0]],[[0,0],[1,0]]]],"extra":1}"#;
        assert!(matches!(ChannelSpec::from_json(text), Err(Error::Parse(_))));
        let text = r#"{"dim_in":3,"dim_out":2,"kraus":[[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#;
        let spec = ChannelSpec::from_json(text).unwrap();
        assert!(matches!(spec.to_channel(), Err(Error::ShapeMismatch(_))));
    }
}

//! JSON document formats shared by the library and the command line.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::{StateVector, C64};

/// `{ dims: [..], amplitudes: [[re, im], ..] }`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDoc {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateDoc {
    pub fn from_state(s: &StateVector) -> Self {
        Self {
            dims: s.dims().to_vec(),
            amplitudes: amps_to_pairs(s.amplitudes()),
        }
    }

    /// Validates normalization.
    pub fn to_state(&self) -> Result<StateVector> {
        StateVector::new(self.dims.clone(), amps_from_pairs(&self.amplitudes))
    }
}

pub fn amps_to_pairs(amps: &[C64]) -> Vec<[f64; 2]> {
    amps.iter().map(|z| [z.re, z.im]).collect()
}

pub fn amps_from_pairs(pairs: &[[f64; 2]]) -> Vec<C64> {
    pairs.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_doc_parses_and_validates() {
        let doc: StateDoc =
            serde_json::from_str(r#"{"dims":[2],"amplitudes":[[0.6,0.0],[0.0,0.8]]}"#).unwrap();
        let s = doc.to_state().unwrap();
        assert_eq!(StateDoc::from_state(&s), doc);
        let bad: StateDoc = serde_json::from_str(r#"{"dims":[2],"amplitudes":[[1,0],[1,0]]}"#).unwrap();
        assert!(bad.to_state().is_err());
    }
}

use std::collections::HashMap;
use std::sync::RwLock;

use sunitgap_core::quadfield::{fundamental_unit, UnitInfo};
use sunitgap_core::Result;

/// Shared memo of fundamental units keyed by `D`.
#[derive(Debug, Default)]
pub struct UnitCache {
    units: RwLock<HashMap<u64, UnitInfo>>,
}

impl UnitCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, d: u64) -> Result<UnitInfo> {
        if let Some(u) = self.units.read().expect("unit cache poisoned").get(&d) {
            return Ok(u.clone());
        }
        let unit = fundamental_unit(d)?;
        self.units.write().expect("unit cache poisoned").entry(d).or_insert_with(|| unit.clone());
        Ok(unit)
    }

    pub fn len(&self) -> usize {
        self.units.read().expect("unit cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

//! Builders for the two stack layouts used throughout: a liquid flow cell
//! and a metal-mirror Fabry–Pérot cavity, both between semi-infinite windows.

use crate::error::Result;
use crate::materials::{DispersiveMaterial, MetalMirror};
use crate::tmm::{Layer, Stack};

/// `window | liquid (l_cell) | window`.
pub fn flow_cell(liquid: &DispersiveMaterial, l_cell_um: f64, window: &DispersiveMaterial) -> Result<Stack> {
    Ok(Stack::new(
        window.clone(),
        vec![Layer::new(liquid.clone(), l_cell_um)?],
        window.clone(),
    ))
}

/// `window | mirror | fill (L) | mirror | window`.
pub fn fabry_perot(
    fill: &DispersiveMaterial,
    length_um: f64,
    mirror: &MetalMirror,
    window: &DispersiveMaterial,
) -> Result<Stack> {
    let metal = mirror.effective_material();
    let t = mirror.thickness_um();
    Ok(Stack::new(
        window.clone(),
        vec![
            Layer::new(metal.clone(), t)?,
            Layer::new(fill.clone(), length_um)?,
            Layer::new(metal, t)?,
        ],
        window.clone(),
    ))
}

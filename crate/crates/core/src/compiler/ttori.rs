//! Tile set to `TTORI_C` constraint system.

use crate::error::{Error, Result};
use crate::gadget::catalog::{instantiate_at, Gadget, Instance, MAX_K};
use crate::gadget::system::ConstraintSystem;
use crate::tiling::TileSet;

/// Switch count for a tile set: `4·max(t, 2) + 1`.
pub fn switch_count(ts: &TileSet) -> Result<u32> {
    ts.validate()?;
    let k = 4 * ts.colors.max(2) + 1;
    if k > MAX_K {
        return Err(Error::InstanceTooLarge(format!("{} tile colors need k = {k}, above the cap {MAX_K}", ts.colors)));
    }
    Ok(k)
}

/// Compiler output together with its instantiation tree.
pub struct Compiled {
    pub k: u32,
    pub system: ConstraintSystem,
    pub tree: Instance,
}

pub fn compile_ttori_tree(ts: &TileSet) -> Result<Compiled> {
    let k = switch_count(ts)?;
    let g = Gadget::Ttori { k, tiles: ts.tiles.clone() };
    let (mut system, tree) = instantiate_at(&g, &[], "r")?;
    system.manifest = Some(tree.census());
    Ok(Compiled { k, system, tree })
}

/// The full `TTORI_C` system for `ts`, with a gadget manifest.
pub fn compile_ttori(ts: &TileSet) -> Result<ConstraintSystem> {
    compile_ttori_tree(ts).map(|c| c.system)
}

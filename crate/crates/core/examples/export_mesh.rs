//! Writes the cosh surface of revolution as an OBJ mesh.

use relcurv::cli::{revolve, write_obj_to};
use relcurv::rotational::CoshProfile;

fn main() -> relcurv::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "cosh.obj".into());
    let mesh = revolve(&CoshProfile, (-1.0, 1.0), 64, 64)?;
    write_obj_to(&mesh, 9, Some(path.as_ref()))?;
    println!("{}: {} vertices, {} faces", path, mesh.vertices.len(), mesh.faces.len());
    Ok(())
}

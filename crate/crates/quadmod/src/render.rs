//! Tile-parallel rendering. Tiles are rendered on a pool and copied into
//! the image by position, so the bytes never depend on the thread count.

use quadmod_core::moduli::MapForm;
use quadmod_core::raster::{self, ImageBuffer, Kernel, PixelKernel, RasterJob, TileImage, Window};
use quadmod_core::RasterError;
use rayon::prelude::*;

use crate::threads;

pub fn render_parallel<K: PixelKernel + Sync + ?Sized>(
    kernel: &K,
    window: &Window,
    tile: u32,
    threads: usize,
) -> ImageBuffer {
    let tiles = raster::tiles(window, tile);
    let parts: Vec<TileImage> = threads::with_pool(threads, || {
        tiles.par_iter().map(|t| raster::render_tile(kernel, window, *t)).collect()
    });
    raster::assemble(window, &parts)
}

/// Renders `job` (with `form` for the dynamical plane) on `threads` workers.
pub fn render_job(job: &RasterJob, form: Option<&MapForm>, threads: usize) -> Result<ImageBuffer, RasterError> {
    let kernel = Kernel::for_job(job, form)?;
    Ok(render_parallel(&kernel, &job.window, job.tile, threads))
}

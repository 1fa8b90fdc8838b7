/**
 * Perceptually uniform color ramp for obstacle heatmaps.
 *
 * Control points follow the familiar dark-violet to yellow ramp used
 * for density plots; between control points we interpolate linearly in
 * RGB and round once, so colormap() is a deterministic pure function
 * both the renderer and the tests can call.
 */

export type Rgb = [number, number, number];

const STOPS: Rgb[] = [
  [68, 1, 84],
  [71, 44, 122],
  [59, 81, 139],
  [44, 113, 142],
  [33, 144, 141],
  [39, 173, 129],
  [92, 200, 99],
  [170, 220, 50],
  [253, 231, 37],
];

/** Map t in [0, 1] (clamped) to an RGB triple. */
export function colormap(t: number): Rgb {
  if (!Number.isFinite(t)) throw new Error("colormap input must be finite");
  const x = Math.min(1, Math.max(0, t)) * (STOPS.length - 1);
  const k = Math.min(STOPS.length - 2, Math.floor(x));
  const f = x - k;
  const a = STOPS[k];
  const b = STOPS[k + 1];
  return [
    Math.round(a[0] + (b[0] - a[0]) * f),
    Math.round(a[1] + (b[1] - a[1]) * f),
    Math.round(a[2] + (b[2] - a[2]) * f),
  ];
}

/**
 * Colormap a whole raster (max-normalized, like the server's greyscale
 * export) into a flat RGB list in the raster's own (i, j) order.
 */
export function colormapRaster(values: ArrayLike<number>, peak: number): Uint8ClampedArray {
  const out = new Uint8ClampedArray(values.length * 3);
  for (let k = 0; k < values.length; k++) {
    const [r, g, b] = colormap(peak > 0 ? values[k] / peak : 0);
    out[3 * k] = r;
    out[3 * k + 1] = g;
    out[3 * k + 2] = b;
  }
  return out;
}

/**
 * Screen <-> world coordinate mapping for the map canvas.
 *
 * The canvas shows the grid with world +x to the right and world +y
 * upward (screen y grows downward, so rows are flipped). Each grid
 * cell occupies a scale x scale pixel block; cell (0, 0) of the grid
 * sits at the bottom-left of the canvas.
 */

import type { MapRaster } from "./api.js";

export interface Viewport {
  /** pixels per grid cell, integer >= 1 */
  scale: number;
  nx: number;
  ny: number;
  cellSize: number;
  origin: [number, number];
}

export function viewportFor(raster: MapRaster, scale = 8): Viewport {
  if (!Number.isInteger(scale) || scale < 1) throw new Error("scale must be an integer >= 1");
  return {
    scale,
    nx: raster.nx,
    ny: raster.ny,
    cellSize: raster.cellSize,
    origin: raster.origin,
  };
}

export function canvasWidth(v: Viewport): number {
  return v.nx * v.scale;
}

export function canvasHeight(v: Viewport): number {
  return v.ny * v.scale;
}

export interface ScreenPos {
  px: number;
  py: number;
}

/** World (x, y) to canvas pixels (float, not snapped). */
export function worldToScreen(v: Viewport, x: number, y: number): ScreenPos {
  const px = ((x - v.origin[0]) / v.cellSize) * v.scale;
  const py = canvasHeight(v) - ((y - v.origin[1]) / v.cellSize) * v.scale;
  return { px, py };
}

/** Canvas pixels back to world (x, y). */
export function screenToWorld(v: Viewport, px: number, py: number): [number, number] {
  const x = v.origin[0] + (px / v.scale) * v.cellSize;
  const y = v.origin[1] + ((canvasHeight(v) - py) / v.scale) * v.cellSize;
  return [x, y];
}

/** Clamp a screen position to the canvas rectangle. */
export function clampToCanvas(v: Viewport, pos: ScreenPos): ScreenPos {
  return {
    px: Math.min(canvasWidth(v), Math.max(0, pos.px)),
    py: Math.min(canvasHeight(v), Math.max(0, pos.py)),
  };
}

/** Grid cell under a screen position, or null when outside the canvas. */
export function screenToCell(v: Viewport, pos: ScreenPos): [number, number] | null {
  const [x, y] = screenToWorld(v, pos.px, pos.py);
  return worldToCell(v, x, y);
}

/** Grid cell containing a world position (floor quantization, matching the server). */
export function worldToCell(v: Viewport, x: number, y: number): [number, number] | null {
  const i = Math.floor((x - v.origin[0]) / v.cellSize);
  const j = Math.floor((y - v.origin[1]) / v.cellSize);
  if (i < 0 || i >= v.nx || j < 0 || j >= v.ny) return null;
  return [i, j];
}

/** World position of a cell center. */
export function cellToWorld(v: Viewport, i: number, j: number): [number, number] {
  return [v.origin[0] + (i + 0.5) * v.cellSize, v.origin[1] + (j + 0.5) * v.cellSize];
}

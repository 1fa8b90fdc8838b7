/**
 * Editor state machine for the waypoint-adjustment loop.
 *
 * The editor is a pure client: the server's validity classification and
 * plans are authoritative. Dragging gives instant feedback from a local
 * raster lookup (optimistic badge), and syncKeypoints reconciles those
 * badges with the server response.
 */

import type {
  KeypointValidity,
  MapRaster,
  PlanFailure,
  PlanPayload,
  SceneNavClient,
  ValidityStatus,
} from "./api.js";
import { colormap } from "./colormap.js";
import {
  canvasHeight,
  canvasWidth,
  screenToWorld,
  type ScreenPos,
  type Viewport,
  viewportFor,
} from "./transform.js";

export interface Keypoint {
  /** world position; z carried through untouched when present */
  world: [number, number] | [number, number, number];
  /** local (optimistic) or server-confirmed validity */
  badge: ValidityStatus;
  /** true until the server confirms the badge */
  optimistic: boolean;
  /** server's nearest-walkable cell for non-walkable points */
  suggestion: [number, number] | null;
}

export interface PathOverlay {
  cells: [number, number][];
  waypoints: [number, number, number][];
  frameSchedule: number[];
}

export interface EditorState {
  sessionId: string;
  raster: MapRaster;
  viewport: Viewport;
  keypoints: Keypoint[];
  overlay: PathOverlay | null;
  failure: PlanFailure | null;
  /** true iff local keypoint edits have not been sent to the server */
  dirty: boolean;
  revision: number;
}

export function createEditor(
  sessionId: string,
  raster: MapRaster,
  scale = 8,
): EditorState {
  return {
    sessionId,
    raster,
    viewport: viewportFor(raster, scale),
    keypoints: [],
    overlay: null,
    failure: null,
    dirty: false,
    revision: 0,
  };
}

/** Classify a world position against the downloaded raster (no server). */
export function localValidity(raster: MapRaster, x: number, y: number): ValidityStatus {
  const i = Math.floor((x - raster.origin[0]) / raster.cellSize);
  const j = Math.floor((y - raster.origin[1]) / raster.cellSize);
  if (i < 0 || i >= raster.nx || j < 0 || j >= raster.ny) return "out_of_bounds";
  return raster.values[i * raster.ny + j] === 0 ? "walkable" : "obstacle";
}

export function addKeypoint(state: EditorState, world: [number, number]): EditorState {
  const kp: Keypoint = {
    world,
    badge: localValidity(state.raster, world[0], world[1]),
    optimistic: true,
    suggestion: null,
  };
  return { ...state, keypoints: [...state.keypoints, kp], dirty: true };
}

/**
 * Move keypoint `index` to a screen position. Positions outside the
 * canvas are clamped half a pixel inside so the landing cell is always
 * on the grid. Marks the state dirty and sets an optimistic badge.
 */
export function dragKeypoint(
  state: EditorState,
  index: number,
  pos: ScreenPos,
): EditorState {
  if (index < 0 || index >= state.keypoints.length) {
    throw new Error(`no keypoint at index ${index}`);
  }
  const v = state.viewport;
  const px = Math.min(canvasWidth(v) - 0.5, Math.max(0, pos.px));
  const py = Math.min(canvasHeight(v), Math.max(0.5, pos.py));
  const [x, y] = screenToWorld(v, px, py);
  const keypoints = state.keypoints.slice();
  keypoints[index] = {
    world: [x, y],
    badge: localValidity(state.raster, x, y),
    optimistic: true,
    suggestion: null,
  };
  return { ...state, keypoints, dirty: true, overlay: null };
}

/** Push local keypoints to the server and adopt its classification. */
export async function syncKeypoints(
  state: EditorState,
  client: SceneNavClient,
): Promise<EditorState> {
  if (state.keypoints.length === 0) throw new Error("no keypoints to sync");
  const resp = await client.putKeypoints(
    state.sessionId,
    state.keypoints.map((k) => [...k.world]),
  );
  const keypoints = state.keypoints.map((k, idx) => {
    const v: KeypointValidity = resp.validity[idx];
    return { ...k, badge: v.status, optimistic: false, suggestion: v.suggestion };
  });
  return { ...state, keypoints, dirty: false, revision: resp.revision };
}

/**
 * Request a plan for the synced keypoints. On success the overlay holds
 * the server's dense path cells verbatim; on a structured failure the
 * failure panel names the failing segment.
 */
export async function replan(
  state: EditorState,
  client: SceneNavClient,
): Promise<EditorState> {
  if (state.dirty) throw new Error("sync keypoints before planning");
  const result = await client.plan(state.sessionId);
  if (!result.ok) {
    return { ...state, overlay: null, failure: result.error };
  }
  const plan: PlanPayload = result.plan;
  const overlay: PathOverlay = {
    cells: plan.dense_path.map(([i, j]) => [i, j]),
    waypoints: plan.sparse_waypoints,
    frameSchedule: plan.frame_schedule,
  };
  return { ...state, overlay, failure: null, revision: result.revision };
}

export interface RenderedHeatmap {
  width: number;
  height: number;
  /** RGBA, row-major from the top-left pixel */
  pixels: Uint8ClampedArray;
}

/**
 * Rasterize the map into an RGBA buffer. Pixel columns follow world +x,
 * pixel rows run top-to-bottom in decreasing world y, matching the
 * server's image export. Values are max-normalized before colormapping.
 */
export function renderHeatmap(raster: MapRaster, scale = 8): RenderedHeatmap {
  if (raster.values.length !== raster.nx * raster.ny) {
    throw new Error(
      `raster length ${raster.values.length} does not match dims ` +
        `${raster.nx}x${raster.ny}`,
    );
  }
  const width = raster.nx * scale;
  const height = raster.ny * scale;
  let peak = 0;
  for (let k = 0; k < raster.values.length; k++) {
    if (raster.values[k] > peak) peak = raster.values[k];
  }
  const pixels = new Uint8ClampedArray(width * height * 4);
  for (let py = 0; py < height; py++) {
    const j = raster.ny - 1 - Math.floor(py / scale);
    for (let px = 0; px < width; px++) {
      const i = Math.floor(px / scale);
      const value = raster.values[i * raster.ny + j];
      const [r, g, b] = colormap(peak > 0 ? value / peak : 0);
      const o = (py * width + px) * 4;
      pixels[o] = r;
      pixels[o + 1] = g;
      pixels[o + 2] = b;
      pixels[o + 3] = 255;
    }
  }
  return { width, height, pixels };
}

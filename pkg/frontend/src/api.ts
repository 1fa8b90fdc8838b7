/**
 * Typed client for the scene-nav planning service. The editor talks to
 * the service exclusively through this module; all authoritative state
 * (maps, validity, plans) comes from the server.
 */

export interface SessionSummary {
  session_id: string;
  cells: [number, number];
  cell_size: number;
  origin: [number, number];
  map_checksum: string;
  revision: number;
}

export type ValidityStatus = "walkable" | "obstacle" | "out_of_bounds";

export interface KeypointValidity {
  status: ValidityStatus;
  cell: [number, number] | null;
  suggestion: [number, number] | null;
}

export interface KeypointsResponse {
  revision: number;
  validity: KeypointValidity[];
}

export interface PlanPayload {
  schema: string;
  dense_path: [number, number][];
  sparse_waypoints: [number, number, number][];
  frame_schedule: number[];
  segments: { start_index: number; cost: number }[];
  config: Record<string, unknown>;
}

export interface PlanFailure {
  code: string;
  message: string;
  segment: number;
  start: [number, number];
  goal: [number, number];
  explored: number;
}

export type PlanResult =
  | { ok: true; revision: number; plan: PlanPayload }
  | { ok: false; error: PlanFailure };

export interface ServiceError {
  code: string;
  message: string;
  [key: string]: unknown;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: ServiceError,
  ) {
    super(`${detail.code}: ${detail.message}`);
  }
}

/** Map raster in grid layout: value(i, j) at index i * ny + j. */
export interface MapRaster {
  nx: number;
  ny: number;
  cellSize: number;
  origin: [number, number];
  values: Float64Array;
}

/** Parse the service's CSV map format (header line, one row per x index). */
export function parseMapCsv(text: string): MapRaster {
  const lines = text.split("\n").filter((ln) => ln.trim().length > 0);
  if (lines.length === 0) throw new Error("empty map CSV");
  const header: Record<string, string> = {};
  for (const tok of lines[0].split(/\s+/)) {
    const eq = tok.indexOf("=");
    if (eq > 0) header[tok.slice(0, eq)] = tok.slice(eq + 1);
  }
  const [nx, ny] = header["cells"].split("x").map(Number);
  const [ox, oy] = header["origin"].split(",").map(Number);
  const cellSize = Number(header["cell_size"]);
  if (!Number.isFinite(nx) || !Number.isFinite(ny)) {
    throw new Error("bad CSV header: " + lines[0]);
  }
  if (lines.length - 1 !== nx) {
    throw new Error(`CSV declares ${nx} rows, found ${lines.length - 1}`);
  }
  const values = new Float64Array(nx * ny);
  for (let i = 0; i < nx; i++) {
    const row = lines[1 + i].split(",").map(Number);
    if (row.length !== ny) throw new Error(`row ${i} has ${row.length} columns`);
    for (let j = 0; j < ny; j++) values[i * ny + j] = row[j];
  }
  return { nx, ny, cellSize, origin: [ox, oy], values };
}

export class SceneNavClient {
  constructor(private baseUrl: string) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await fetch(this.baseUrl + path, init);
    if (!resp.ok) {
      let detail: ServiceError = { code: "http_error", message: resp.statusText };
      try {
        const body = await resp.json();
        if (body && body.error) detail = body.error as ServiceError;
      } catch {
        // non-JSON error body, keep the generic detail
      }
      throw new ApiError(resp.status, detail);
    }
    return resp;
  }

  async createSession(body: {
    fixture?: string;
    scene_xyz?: string;
    lam?: number;
    kernel_radius?: number;
    impassable?: number;
  }): Promise<SessionSummary> {
    const resp = await this.request("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return (await resp.json()) as SessionSummary;
  }

  async getMapCsv(sessionId: string): Promise<string> {
    const resp = await this.request(`/sessions/${sessionId}/map?format=csv`);
    return await resp.text();
  }

  async getMapRaster(sessionId: string): Promise<MapRaster> {
    return parseMapCsv(await this.getMapCsv(sessionId));
  }

  async putKeypoints(
    sessionId: string,
    keypoints: number[][],
    strict = false,
  ): Promise<KeypointsResponse> {
    const resp = await this.request(`/sessions/${sessionId}/keypoints`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ keypoints, strict }),
    });
    return (await resp.json()) as KeypointsResponse;
  }

  async plan(sessionId: string): Promise<PlanResult> {
    const resp = await this.request(`/sessions/${sessionId}/plan`, {
      method: "POST",
    });
    return (await resp.json()) as PlanResult;
  }
}

// HTTP client for the trajectory service. Every method is a direct wrapper
// around one endpoint; all numbers shown in the UI come from these responses.

import type {
  DatasetStats,
  EpisodeResponse,
  ErrorEnvelope,
  PlanRow,
  QueryResponse,
  RasterizeResponse,
  RolloutResponse,
  SceneResponse,
  StrokePayload,
} from "./types";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  // Network-level failures can be retried verbatim; domain rejections cannot.
  readonly retryable: boolean;

  constructor(code: string, message: string, status: number, retryable = false) {
    super(message);
    this.code = code;
    this.status = status;
    this.retryable = retryable;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class StudioApi {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    const raw = fetchFn ?? globalThis.fetch;
    this.fetchFn = raw.bind(globalThis);
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      throw new ApiError("unreachable", `server unreachable: ${reason}`, 0, true);
    }
    if (!response.ok) {
      let code = "http_error";
      let message = `${response.status} ${response.statusText}`;
      try {
        const body = (await response.json()) as ErrorEnvelope;
        code = body.error.code;
        message = body.error.message;
      } catch {
        // Non-envelope error body; keep the status text.
      }
      throw new ApiError(code, message, response.status);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  getScene(sceneId: string): Promise<SceneResponse> {
    return this.request(`/scene/${encodeURIComponent(sceneId)}`);
  }

  rasterize(payload: StrokePayload): Promise<RasterizeResponse> {
    return this.post("/sketch/rasterize", payload);
  }

  query(waypoints: number[][], k: number): Promise<QueryResponse> {
    return this.post("/similarity/query", { waypoints, k });
  }

  rollout(plan: PlanRow[], episodeId: string, sceneId?: string): Promise<RolloutResponse> {
    const rows = plan.map((row) => ({
      x: row.x,
      y: row.y,
      z: row.z,
      ...(row.gripper ? { gripper: row.gripper } : {}),
    }));
    return this.post("/rollout", {
      plan: rows,
      episode_id: episodeId,
      ...(sceneId ? { scene_id: sceneId } : {}),
    });
  }

  getEpisode(episodeId: string, sceneId?: string): Promise<EpisodeResponse> {
    const query = sceneId ? `?scene_id=${encodeURIComponent(sceneId)}` : "";
    return this.request(`/episode/${encodeURIComponent(episodeId)}${query}`);
  }

  stats(): Promise<DatasetStats> {
    return this.request("/dataset/stats");
  }
}

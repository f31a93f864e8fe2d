// Canvas session state: the current stroke, its annotations, the waypoint
// plan, and whatever overlays the server has returned. No DOM, no fetch,
// and no geometry: edits append raw input coordinates, the server does all
// snapping, projection, and distance work.

import type {
  HeightAnnotation,
  MarkerClick,
  MarkerKind,
  PlanRow,
  SceneResponse,
  SimilarityResult,
  SketchEvent,
  StrokePayload,
} from "./types";

export type ToolMode = "draw" | "close" | "open" | "height";

export interface SimilarOverlay {
  result: SimilarityResult;
  // Verbatim "pixels" array from GET /episode/{id}?scene_id=...
  pixels: [number, number][];
}

export interface ExecutedOverlay {
  pixels: [number, number][];
  roundtripError: number;
}

export interface Overlays {
  sketchPng: string | null;
  events: SketchEvent[];
  executed: ExecutedOverlay | null;
  similar: SimilarOverlay[];
  notice: string | null;
}

export interface Banner {
  code: string;
  message: string;
  retryable: boolean;
}

export const DEFAULT_K = 10;
export const DEFAULT_RESAMPLE_M = 64;

function emptyOverlays(): Overlays {
  return { sketchPng: null, events: [], executed: null, similar: [], notice: null };
}

export class CanvasSession {
  sceneId: string | null = null;
  scene: SceneResponse | null = null;
  samples: [number, number][] = [];
  markerClicks: MarkerClick[] = [];
  heightAnnotations: HeightAnnotation[] = [];
  plan: PlanRow[] = [];
  k = DEFAULT_K;
  resampleM = DEFAULT_RESAMPLE_M;
  mode: ToolMode = "draw";
  heightValue = 0.5;
  inflight = { submit: false, compare: false };
  overlays: Overlays = emptyOverlays();
  banner: Banner | null = null;

  // The stroke is frozen while a rollout request is in flight.
  get canEdit(): boolean {
    return !this.inflight.compare;
  }

  get canSubmit(): boolean {
    return this.samples.length >= 2 && !this.inflight.submit && !this.inflight.compare;
  }

  get canCompare(): boolean {
    return this.plan.length >= 2 && !this.inflight.compare;
  }

  addSample(u: number, v: number): boolean {
    if (!this.canEdit) return false;
    this.samples.push([u, v]);
    this.clearOverlays();
    return true;
  }

  addMarker(pixel: [number, number], kind: MarkerKind): boolean {
    if (!this.canEdit) return false;
    this.markerClicks.push({ pixel, kind });
    this.clearOverlays();
    return true;
  }

  addHeight(pixel: [number, number], height: number): boolean {
    if (!this.canEdit) return false;
    this.heightAnnotations.push({ pixel, height });
    this.clearOverlays();
    return true;
  }

  clearStroke(): boolean {
    if (!this.canEdit) return false;
    this.samples = [];
    this.markerClicks = [];
    this.heightAnnotations = [];
    this.clearOverlays();
    return true;
  }

  // Stale results must never outlive an edit; new overlays arrive only from
  // the next round of server responses.
  clearOverlays(): void {
    this.overlays = emptyOverlays();
  }

  strokePayload(): StrokePayload {
    return {
      samples: this.samples.map((s) => [s[0], s[1]]),
      marker_clicks: this.markerClicks.map((m) => ({
        pixel: [m.pixel[0], m.pixel[1]],
        kind: m.kind,
      })),
      height_annotations: this.heightAnnotations.map((h) => ({
        pixel: [h.pixel[0], h.pixel[1]],
        height: h.height,
      })),
      resample_m: this.resampleM,
    };
  }

  // Inverse of strokePayload, for loading a saved stroke file.
  applyStrokePayload(payload: StrokePayload): boolean {
    if (!this.canEdit) return false;
    this.samples = payload.samples.map((s) => [s[0], s[1]]);
    this.markerClicks = payload.marker_clicks.map((m) => ({
      pixel: [m.pixel[0], m.pixel[1]],
      kind: m.kind,
    }));
    this.heightAnnotations = payload.height_annotations.map((h) => ({
      pixel: [h.pixel[0], h.pixel[1]],
      height: h.height,
    }));
    this.resampleM = payload.resample_m;
    this.clearOverlays();
    return true;
  }
}

// Wire types for the trajectory service. Field names must match the HTTP
// payloads exactly; the stroke payload doubles as the on-disk stroke format.

export type MarkerKind = "close" | "open";

export interface MarkerClick {
  pixel: [number, number];
  kind: MarkerKind;
}

export interface HeightAnnotation {
  pixel: [number, number];
  height: number;
}

export interface StrokePayload {
  samples: [number, number][];
  marker_clicks: MarkerClick[];
  height_annotations: HeightAnnotation[];
  resample_m: number;
}

export interface CameraInfo {
  fx: number;
  fy: number;
  cx: number;
  cy: number;
  quaternion: number[];
  translation: number[];
  width: number;
  height: number;
}

export interface SceneResponse {
  scene_id: string;
  camera: CameraInfo;
  image_b64: string;
}

export interface SketchEvent {
  step: number;
  kind: MarkerKind;
  pixel: [number, number];
}

export interface RasterizeResponse {
  png_b64: string;
  events: SketchEvent[];
  spec: {
    mode: string;
    vertices: [number, number][];
    time_norm: number[];
    height_norm: number[];
  };
}

export interface SimilarityResult {
  episode_id: string;
  skill: string;
  distance: number;
}

export interface QueryResponse {
  results: SimilarityResult[];
}

export interface EpisodeStep {
  step: number;
  px: number;
  py: number;
  pz: number;
  gripper_sensed: number;
  gripper_target: number;
}

export interface EpisodeLog {
  episode_id: string;
  skill: string;
  instruction: string;
  steps: EpisodeStep[];
}

// "pixels" and "dropped_count" appear only when the request named a scene.
export interface EpisodeResponse {
  episode: EpisodeLog;
  pixels?: [number, number][];
  dropped_count?: number;
}

export interface PlanRow {
  x: number;
  y: number;
  z: number;
  gripper: MarkerKind | null;
}

export interface RolloutResponse {
  episode: EpisodeLog;
  roundtrip_error: number;
  pixels?: [number, number][];
  dropped_count?: number;
}

export interface DatasetStats {
  episode_count: number;
  total_steps: number;
  skills: Record<string, number>;
  camera_count: number;
  scene_count: number;
}

export interface ErrorEnvelope {
  error: {
    code: string;
    message: string;
  };
}

// Wire types for the review service API. Field names mirror the JSON
// payloads exactly; the UI never derives these values locally.

export interface FrameInfo {
  id: string;
  width: number;
  height: number;
  has_mask: boolean;
  thumbnail_url: string;
  image_url: string;
}

export interface FramesResponse {
  frames: FrameInfo[];
}

/** One row of /api/scores; cluster fields appear only after /api/select. */
export interface ScoreRow {
  id: string;
  B: number;
  C: number;
  E: number;
  H: number;
  S: number;
  F: number;
  cluster?: number | null;
  distance?: number | null;
  rank?: number | null;
  is_representative?: boolean;
}

export interface ScoresResponse {
  reference_id: string;
  weights: number[];
  normalize_features: boolean;
  frames: ScoreRow[];
}

/** Body of /api/select, identical to the CLI's manifest.json. */
export interface SelectionResponse extends ScoresResponse {
  version: string;
  kind: string;
  k: number;
  seed: number;
  strategy: string;
  feature_params: Record<string, number>;
}

export interface PromptPoint {
  x: number;
  y: number;
  label: 0 | 1;
}

export type Bbox = [number, number, number, number];

export interface PromptEntry {
  frame_id: string;
  points: PromptPoint[];
  bbox: Bbox | null;
}

export interface ExportResponse {
  version: number;
  strategy: string;
  seed: number;
  prompts: PromptEntry[];
}

export interface StatusResponse {
  state: string;
  dataset_loaded: boolean;
  frame_count: number;
  reference_id: string | null;
  progress: { done: number; total: number };
  has_selection: boolean;
}

export interface SelectRequest {
  k: number;
  seed: number;
  strategy?: string;
  weights?: number[];
}

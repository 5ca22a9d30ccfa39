// Payload shapes of the /api/v1 service, mirrored from its JSON Schemas.

export interface EndoExoPoint {
  video_id: string;
  exo_sensitivity: number;
  endo_response: number | null;
  viral_potential: number | null;
  views_total: number;
  shares_total: number;
  views_percentile: number | null;
  shares_percentile: number | null;
  supercritical_flag: boolean;
  title?: string;
  author?: string;
}

export interface MapResponse {
  points: EndoExoPoint[];
  pending: string[];
}

export interface CollectionInfo {
  name: string;
  video_ids: string[];
  default_flag: boolean;
}

export interface HipParamsPayload {
  mu: number;
  C: number;
  c: number;
  theta: number;
}

export interface VideoMetadata {
  video_id: string;
  title: string;
  author: string;
  category: string;
  upload_date: string;
  days: number;
  views_total: number;
  shares_total: number;
  fitted: boolean;
  params?: HipParamsPayload;
  branching_factor?: number;
}

export interface SeriesResponse {
  video_id: string;
  train_days: number;
  forecast_from: number;
  to: number;
  observed_views: number[];
  shares: number[];
  fitted_views: number[];
  forecast_views: number[];
}

export type JobState = 'queued' | 'crawling' | 'fitting' | 'done' | 'failed';

export interface FitJob {
  job_id: string;
  video_id: string;
  collection: string;
  state: JobState;
  error?: { code: string; message: string } | null;
  submitted_at: number;
  finished_at?: number | null;
}

export interface SimulatePromotionResponse {
  video_id: string;
  volume: number;
  promoted_views: number[];
  incremental_total: number;
  projected_point: EndoExoPoint;
}

export interface ApiError {
  code: string;
  message: string;
  details: Record<string, unknown>;
}

/** Response shapes of the casemix HTTP service (schema version 1). */

export type Interval = [number, number];

export interface SpreadRow {
  label: string;
  mean: number;
  q1: number;
  q2: number;
  q3: number;
}

export interface HistogramData {
  label: string;
  edges: number[];
  counts: number[];
}

export interface FrontierInfo {
  k: number;
  size: number;
  labels: string[];
  frontier: Interval[];
  ideal: number[];
  nadir: number[];
}

export interface BoundsResponse extends FrontierInfo {
  spread: SpreadRow[];
  histograms: HistogramData[];
}

export interface PointResponse extends FrontierInfo {
  index: number;
  point: number[];
  progress: number;
}

export interface UniformityRow {
  label: string;
  mean_gap: number;
  std_gap: number;
  cv: number | null;
  max_gap: number;
}

export interface UniformityResponse extends FrontierInfo {
  uniformity: UniformityRow[];
}

export interface RangeResponse extends FrontierInfo {
  requested: Interval[];
  clamped: boolean;
  achievable: Interval[] | null;
  count: number;
  coverage_percent: number;
  best: number[] | null;
  best_progress: number | null;
  page: number;
  page_size: number;
  candidates: number[][];
  candidate_indices: number[];
  nested_ranges: string[];
  text: string;
}

export interface AlternativesSummary {
  histograms: HistogramData[];
  spread: SpreadRow[];
}

export interface GoalResponse extends FrontierInfo {
  goal: number[];
  dominated: boolean;
  status: string;
  alternatives_total: number;
  alternatives: number[][];
  alternatives_summary: AlternativesSummary | null;
  closest: number[] | null;
  change: number[] | null;
  text: string;
}

export interface GenerateRequest {
  points: number;
  threads?: number;
  stage?: number;
  proximity?: number;
  seed?: number;
  alg?: number;
}

export interface GenerateStart {
  job_id: string;
  total_stages: number;
}

export interface GenerateProgress {
  job_id: string;
  status: "running" | "done" | "failed";
  stage: number;
  total_stages: number;
  points: number;
  error: string | null;
}

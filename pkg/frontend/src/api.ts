import type {
  BoundsResponse,
  GenerateProgress,
  GenerateRequest,
  GenerateStart,
  GoalResponse,
  PointResponse,
  RangeResponse,
  UniformityResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchFn = typeof globalThis.fetch;

/** Thin typed client over the service endpoints; does no math of its own. */
export class ApiClient {
  constructor(
    private base: string,
    private fetchFn: FetchFn = globalThis.fetch.bind(globalThis),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && body.detail) {
          detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
        }
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  getBounds(): Promise<BoundsResponse> {
    return this.request("/frontier/bounds");
  }

  getPoint(index: number): Promise<PointResponse> {
    return this.request(`/frontier/point/${index}`);
  }

  getUniformity(): Promise<UniformityResponse> {
    return this.request("/frontier/uniformity");
  }

  rangeQuery(low: number[], high: number[], page = 1, pageSize = 100): Promise<RangeResponse> {
    return this.post("/query/range", { low, high, page, page_size: pageSize });
  }

  goalQuery(point: number[]): Promise<GoalResponse> {
    return this.post("/query/goal", { point });
  }

  startGeneration(config: GenerateRequest): Promise<GenerateStart> {
    return this.post("/generate", config);
  }

  generationProgress(jobId: string): Promise<GenerateProgress> {
    return this.request(`/generate/${jobId}/progress`);
  }
}

/**
 * Poll a generation job until it leaves the running state; reports every
 * progress snapshot through `onProgress`.
 */
export function pollGeneration(
  api: ApiClient,
  jobId: string,
  onProgress: (p: GenerateProgress) => void,
  intervalMs = 1000,
): Promise<GenerateProgress> {
  return new Promise((resolve, reject) => {
    const timer = setInterval(async () => {
      try {
        const progress = await api.generationProgress(jobId);
        onProgress(progress);
        if (progress.status !== "running") {
          clearInterval(timer);
          if (progress.status === "failed") {
            reject(new ApiError(500, progress.error ?? "generation failed"));
          } else {
            resolve(progress);
          }
        }
      } catch (err) {
        clearInterval(timer);
        reject(err);
      }
    }, intervalMs);
  });
}

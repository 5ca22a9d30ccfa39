import type {
  ApiError,
  CollectionInfo,
  FitJob,
  MapResponse,
  SeriesResponse,
  SimulatePromotionResponse,
  VideoMetadata,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiRequestError extends Error {
  constructor(
    public readonly status: number,
    public readonly payload: ApiError,
  ) {
    super(`${payload.code}: ${payload.message}`);
  }
}

async function parse<T>(response: Response): Promise<T> {
  if (!response.ok) {
    throw new ApiRequestError(response.status, (await response.json()) as ApiError);
  }
  return (await response.json()) as T;
}

/** Typed client for the /api/v1 service. All model math stays server-side;
 *  this client only moves payloads. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}/api/v1${path}`;
  }

  health(): Promise<{ status: string; queue_depth: number }> {
    return this.fetchFn(this.url('/health')).then((r) => parse(r));
  }

  listCollections(): Promise<CollectionInfo[]> {
    return this.fetchFn(this.url('/collections')).then((r) => parse(r));
  }

  createCollection(name: string): Promise<CollectionInfo> {
    return this.fetchFn(this.url(`/collections/${encodeURIComponent(name)}`), {
      method: 'POST',
    }).then((r) => parse(r));
  }

  deleteCollection(name: string): Promise<{ deleted: string }> {
    return this.fetchFn(this.url(`/collections/${encodeURIComponent(name)}`), {
      method: 'DELETE',
    }).then((r) => parse(r));
  }

  getMap(collection: string): Promise<MapResponse> {
    return this.fetchFn(this.url(`/collections/${encodeURIComponent(collection)}/map`)).then(
      (r) => parse(r),
    );
  }

  /** Raw body text of the map endpoint, for byte-level comparisons. */
  async getMapRaw(collection: string): Promise<string> {
    const response = await this.fetchFn(
      this.url(`/collections/${encodeURIComponent(collection)}/map`),
    );
    if (!response.ok) {
      throw new ApiRequestError(response.status, (await response.json()) as ApiError);
    }
    return response.text();
  }

  submitVideo(idOrUrl: string, collection: string): Promise<FitJob> {
    return this.fetchFn(this.url('/videos'), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ id_or_url: idOrUrl, collection }),
    }).then((r) => parse(r));
  }

  getJob(jobId: string): Promise<FitJob> {
    return this.fetchFn(this.url(`/jobs/${encodeURIComponent(jobId)}`)).then((r) => parse(r));
  }

  getVideo(videoId: string): Promise<VideoMetadata> {
    return this.fetchFn(this.url(`/videos/${encodeURIComponent(videoId)}`)).then((r) =>
      parse(r),
    );
  }

  getSeries(videoId: string): Promise<SeriesResponse> {
    return this.fetchFn(this.url(`/videos/${encodeURIComponent(videoId)}/series`)).then((r) =>
      parse(r),
    );
  }

  simulatePromotion(videoId: string, volume: number): Promise<SimulatePromotionResponse> {
    return this.fetchFn(
      this.url(`/videos/${encodeURIComponent(videoId)}/simulate-promotion`),
      {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ volume }),
      },
    ).then((r) => parse(r));
  }
}

import type { ApiClient } from './api';
import { bubbleGeometry, type BubbleGeometry } from './geometry';
import { pollJob, type PollOptions } from './poll';
import type {
  CollectionInfo,
  EndoExoPoint,
  FitJob,
  MapResponse,
  SeriesResponse,
  SimulatePromotionResponse,
  VideoMetadata,
} from './types';

export interface ActiveVideoState {
  collection: string;
  selectedId: string | null;
  whatIfVolume: number;
  lastSimulation: SimulatePromotionResponse | null;
}

export interface PanelData {
  collections: CollectionInfo[];
  map: MapResponse | null;
  metadata: VideoMetadata | null;
  series: SeriesResponse | null;
  job: FitJob | null;
  lastError: string | null;
}

type Listener = () => void;

/** Single source of truth for the four panels. Selecting a bubble routes
 *  every panel to the same video id; what-if responses are held verbatim
 *  and never written back to the server. */
export class AppStore {
  readonly active: ActiveVideoState = {
    collection: 'demo',
    selectedId: null,
    whatIfVolume: 0,
    lastSimulation: null,
  };

  readonly panels: PanelData = {
    collections: [],
    map: null,
    metadata: null,
    series: null,
    job: null,
    lastError: null,
  };

  private listeners: Listener[] = [];
  // guards against a stale response landing after a newer selection
  private selectionEpoch = 0;

  constructor(private readonly api: ApiClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  async refreshCollections(): Promise<void> {
    this.panels.collections = await this.api.listCollections();
    this.notify();
  }

  async setCollection(name: string): Promise<void> {
    this.active.collection = name;
    this.active.selectedId = null;
    this.active.lastSimulation = null;
    this.panels.metadata = null;
    this.panels.series = null;
    await this.refreshMap();
  }

  async refreshMap(): Promise<void> {
    this.panels.map = await this.api.getMap(this.active.collection);
    this.notify();
  }

  /** Map bubble click handler: all four panels switch to this video. */
  async selectVideo(videoId: string): Promise<void> {
    const epoch = ++this.selectionEpoch;
    this.active.selectedId = videoId;
    this.active.lastSimulation = null;
    this.panels.lastError = null;
    this.notify();
    const [metadata, series] = await Promise.all([
      this.api.getVideo(videoId),
      this.api.getSeries(videoId).catch(() => null),
    ]);
    if (epoch !== this.selectionEpoch) return; // superseded by a newer click
    this.panels.metadata = metadata;
    this.panels.series = series;
    this.notify();
  }

  /** The video id each panel currently references; the sync invariant is
   *  that all non-null entries agree. */
  panelIds(): { map: string | null; chart: string | null; metadata: string | null; preview: string | null } {
    return {
      map: this.active.selectedId,
      chart: this.panels.series?.video_id ?? null,
      metadata: this.panels.metadata?.video_id ?? null,
      preview: this.previewVideoId(),
    };
  }

  previewVideoId(): string | null {
    return this.active.selectedId;
  }

  previewEmbedUrl(): string | null {
    const id = this.previewVideoId();
    return id === null ? null : `https://www.youtube.com/embed/${encodeURIComponent(id)}`;
  }

  selectedPoint(): EndoExoPoint | null {
    if (this.active.selectedId === null || this.panels.map === null) return null;
    return this.panels.map.points.find((p) => p.video_id === this.active.selectedId) ?? null;
  }

  /** Post a stateless what-if; the response is stored as delivered by the
   *  API, with no client-side recomputation. */
  async runWhatIf(volume: number): Promise<SimulatePromotionResponse> {
    if (this.active.selectedId === null) {
      throw new Error('no active video');
    }
    this.active.whatIfVolume = volume;
    const response = await this.api.simulatePromotion(this.active.selectedId, volume);
    this.active.lastSimulation = response;
    this.notify();
    return response;
  }

  clearWhatIf(): void {
    this.active.whatIfVolume = 0;
    this.active.lastSimulation = null;
    this.notify();
  }

  /** Ghost bubble for the current what-if, or null when none is pending. */
  ghostGeometry(): BubbleGeometry | null {
    const sim = this.active.lastSimulation;
    if (sim === null) return null;
    return bubbleGeometry(sim.projected_point);
  }

  selectedGeometry(): BubbleGeometry | null {
    const point = this.selectedPoint();
    return point === null ? null : bubbleGeometry(point);
  }

  /** The incremental_total exactly as the API reported it. */
  incrementalTotalDisplay(): string | null {
    const sim = this.active.lastSimulation;
    return sim === null ? null : String(sim.incremental_total);
  }

  /** Submit a new video, poll the job to completion, then refresh the map. */
  async addVideo(idOrUrl: string, pollOptions: PollOptions = {}): Promise<FitJob> {
    const submitted = await this.api.submitVideo(idOrUrl, this.active.collection);
    this.panels.job = submitted;
    this.notify();
    const job = await pollJob(this.api, submitted.job_id, {
      ...pollOptions,
      onUpdate: (j) => {
        this.panels.job = j;
        this.notify();
        pollOptions.onUpdate?.(j);
      },
    });
    if (job.state === 'done') await this.refreshMap();
    return job;
  }
}

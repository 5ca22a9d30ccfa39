import type { ApiClient } from './api';
import type { FitJob } from './types';

export interface PollOptions {
  intervalMs?: number;
  backoff?: number;
  maxIntervalMs?: number;
  sleep?: (ms: number) => Promise<void>;
  onUpdate?: (job: FitJob) => void;
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/** Poll a fit job until done or failed; 1 s base interval with backoff. */
export async function pollJob(
  api: ApiClient,
  jobId: string,
  options: PollOptions = {},
): Promise<FitJob> {
  const {
    intervalMs = 1000,
    backoff = 1.5,
    maxIntervalMs = 10000,
    sleep = defaultSleep,
    onUpdate,
  } = options;
  let wait = intervalMs;
  for (;;) {
    const job = await api.getJob(jobId);
    onUpdate?.(job);
    if (job.state === 'done' || job.state === 'failed') return job;
    await sleep(wait);
    wait = Math.min(wait * backoff, maxIntervalMs);
  }
}

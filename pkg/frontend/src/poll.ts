/** Job polling with a 1 second base interval and gentle backoff.
 *
 * Polling never decreases a progress counter on screen because the
 * server guarantees monotonic counters; the poller just reports the
 * latest snapshot and stops on done or failed.
 */

import { ApiClient, Job } from "./api.js";

export const BASE_INTERVAL_MS = 1000;
export const MAX_INTERVAL_MS = 5000;
export const BACKOFF = 1.5;

export interface PollerHooks {
  onUpdate: (job: Job) => void;
  onDone: (job: Job) => void;
  onError?: (err: unknown) => void;
  /** injectable for tests */
  setTimeoutFn?: (fn: () => void, ms: number) => unknown;
}

export function nextInterval(current: number): number {
  return Math.min(Math.round(current * BACKOFF), MAX_INTERVAL_MS);
}

export class JobPoller {
  private stopped = false;
  private interval = BASE_INTERVAL_MS;
  readonly waits: number[] = [];

  constructor(
    private api: ApiClient,
    private jobId: string,
    private hooks: PollerHooks,
  ) {}

  start() {
    this.schedule(0);
  }

  stop() {
    this.stopped = true;
  }

  private schedule(ms: number) {
    const timer = this.hooks.setTimeoutFn ?? ((fn: () => void, t: number) => setTimeout(fn, t));
    if (ms > 0) this.waits.push(ms);
    timer(() => void this.tick(), ms);
  }

  private async tick() {
    if (this.stopped) return;
    let job: Job;
    try {
      job = await this.api.job(this.jobId);
    } catch (err) {
      this.hooks.onError?.(err);
      this.interval = nextInterval(this.interval);
      this.schedule(this.interval);
      return;
    }
    this.hooks.onUpdate(job);
    if (job.state === "done" || job.state === "failed") {
      this.stopped = true;
      this.hooks.onDone(job);
      return;
    }
    this.interval = nextInterval(this.interval);
    this.schedule(this.interval);
  }
}

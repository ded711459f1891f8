// Synthesis jobs run server-side; the UI polls their state every two
// seconds until they settle.

import type { ServiceClient } from "./api.js";
import type { JobInfo } from "./types.js";

export const JOB_POLL_INTERVAL_MS = 2000;

export interface JobWatch {
  onUpdate?: (job: JobInfo) => void;
  onDone: (job: JobInfo) => void;
  onFailed?: (job: JobInfo) => void;
}

export class JobPoller {
  private readonly client: ServiceClient;
  private readonly workspaceId: string;
  private readonly intervalMs: number;
  private timer: ReturnType<typeof setInterval> | null = null;
  private checking = false;

  constructor(
    client: ServiceClient,
    workspaceId: string,
    intervalMs: number = JOB_POLL_INTERVAL_MS,
  ) {
    this.client = client;
    this.workspaceId = workspaceId;
    this.intervalMs = intervalMs;
  }

  get active(): boolean {
    return this.timer !== null;
  }

  /** Poll one job until it reaches "done" or "failed". */
  watch(jobId: string, callbacks: JobWatch): void {
    this.stop();
    const check = async () => {
      if (this.checking) return; // a slow response outlived the interval
      this.checking = true;
      try {
        const job = await this.client.getJob(this.workspaceId, jobId);
        if (job.state === "done") {
          this.stop();
          callbacks.onDone(job);
        } else if (job.state === "failed") {
          this.stop();
          callbacks.onFailed?.(job);
        } else {
          callbacks.onUpdate?.(job);
        }
      } finally {
        this.checking = false;
      }
    };
    this.timer = setInterval(() => void check(), this.intervalMs);
    void check();
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
